// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dynamical free energy, activity and dispersion along the uniform tilt,
//! written as CSV to stdout.
//!
//!     cargo run --example theta_scan -- [graph.edges] [s_min] [s_max] [steps]

use std::env;
use std::fs;
use std::io;

use qsw_thermo::graph::{parse_edge_list, DEFAULT_DAMPING};
use qsw_thermo::lindblad::build_qsw;
use qsw_thermo::tilt::{scan, uniform_grid, write_scan_csv, DEFAULT_FD_STEP};

fn main() -> qsw_thermo::Result<()> {
    let args: Vec<String> = env::args().skip(1).collect();
    let path = args
        .first()
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/two_node.edges").into());
    let num = |k: usize, default: f64| {
        args.get(k)
            .map(|v| v.parse().expect("numeric argument"))
            .unwrap_or(default)
    };
    let (s_min, s_max, steps) = (num(1, -3.0), num(2, 3.0), num(3, 25.0) as usize);

    let model = build_qsw(
        &parse_edge_list(&fs::read_to_string(path)?)?,
        DEFAULT_DAMPING,
        1.0,
    )?;
    let grid = uniform_grid(model.n(), s_min, s_max, steps)?;
    let points = scan(&model, &grid, DEFAULT_FD_STEP);
    write_scan_csv(model.n(), &grid, &points, &[], io::stdout().lock())
}
