// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Large-deviation thermodynamics of dissipative quantum walks on directed
//! graphs.
//!
//! A directed graph defines a quantum stochastic walk: the de-directed
//! adjacency matrix drives coherent hopping and the Google matrix `G` supplies
//! jump operators `√G_ij |i⟩⟨j|`. Counting jumps per destination node and
//! tilting the generator by `e^{-s_i}` gives the dynamical free energy θ(s),
//! whose derivatives are the node activities (a dynamical quantum pagerank)
//! and the indices of dispersion.
//!
//! ```
//! use qsw_thermo::{graph, lindblad, tilt};
//!
//! let g = graph::parse_edge_list("0 1").unwrap();
//! let model = lindblad::build_qsw(&g, 0.85, 1.0).unwrap();
//! let s0 = tilt::TiltVector::zeros(model.n());
//! assert!(tilt::theta(&model, &s0).unwrap().abs() < 1e-8);
//! let alpha = tilt::activity(&model, &s0, 1e-4).unwrap();
//! let direct = tilt::activity_via_steady_state(&model).unwrap();
//! assert!((alpha[0] - direct[0]).abs() < 5e-6);
//! ```

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lindblad;
pub mod report;
pub mod tilt;
pub mod trajectory;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, ProbabilityVector, StochasticMatrix};
pub use linalg::ComplexMatrix;
pub use lindblad::{DensityMatrix, QswModel, Superoperator};
pub use tilt::{ThermoPoint, TiltVector};
pub use trajectory::{EnsembleStats, TrajectoryRecord};
