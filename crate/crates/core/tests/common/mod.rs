// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Models and generators shared by the integration tests.

#![allow(dead_code)]

use qsw_thermo::graph::{parse_edge_list, DirectedGraph, DEFAULT_DAMPING};
use qsw_thermo::lindblad::build_qsw;
use qsw_thermo::QswModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TWO_NODE: &str = include_str!("../../examples/two_node.edges");
pub const SIX_NODE: &str = include_str!("../../examples/six_node.edges");

pub fn model(text: &str, coherent_weight: f64) -> QswModel {
    build_qsw(
        &parse_edge_list(text).unwrap(),
        DEFAULT_DAMPING,
        coherent_weight,
    )
    .unwrap()
}

pub fn single() -> QswModel {
    model("n 1", 1.0)
}

pub fn two_node(coherent_weight: f64) -> QswModel {
    model(TWO_NODE, coherent_weight)
}

pub fn six_node(coherent_weight: f64) -> QswModel {
    model(SIX_NODE, coherent_weight)
}

/// The bundled models at the given coherent weight.
pub fn bundled(coherent_weight: f64) -> Vec<(&'static str, QswModel)> {
    vec![
        ("two_node", two_node(coherent_weight)),
        ("six_node", six_node(coherent_weight)),
    ]
}

/// Random digraph with `n` nodes and link probability `p`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for src in 0..n {
        for dst in 0..n {
            if src != dst && rng.random::<f64>() < p {
                edges.push((src, dst));
            }
        }
    }
    DirectedGraph::new(n, edges).unwrap()
}

/// `count` random digraphs with 1..=max_n nodes, reproducible from `seed`.
pub fn random_graphs(seed: u64, count: usize, max_n: usize) -> Vec<DirectedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=max_n);
            random_graph(&mut rng, n, 0.35)
        })
        .collect()
}
