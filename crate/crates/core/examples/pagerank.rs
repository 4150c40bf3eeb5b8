// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Google matrix and classical pagerank of an edge list.
//!
//!     cargo run --example pagerank -- [graph.edges] [damping]

use std::env;
use std::fs;

use qsw_thermo::graph::{
    google_matrix, pagerank, parse_edge_list, DEFAULT_DAMPING, DEFAULT_PAGERANK_TOL,
};

fn main() -> qsw_thermo::Result<()> {
    let mut args = env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/six_node.edges").into());
    let damping = args
        .next()
        .map(|d| d.parse().expect("damping must be a number"))
        .unwrap_or(DEFAULT_DAMPING);

    let g = parse_edge_list(&fs::read_to_string(&path)?)?;
    let google = google_matrix(&g, damping)?;
    println!(
        "{} nodes, {} links, damping {damping}",
        g.n(),
        g.edge_count()
    );
    println!("Google matrix (column j = hop probabilities out of j):");
    for i in 0..g.n() {
        let row: Vec<String> = (0..g.n())
            .map(|j| format!("{:.4}", google.get(i, j)))
            .collect();
        println!("  {}", row.join("  "));
    }

    let pi = pagerank(&google, DEFAULT_PAGERANK_TOL)?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| pi[b].total_cmp(&pi[a]));
    println!("pagerank, best first:");
    for i in order {
        println!("  node {i}: {:.6}", pi[i]);
    }
    Ok(())
}
