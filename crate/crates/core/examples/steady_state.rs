// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Stationary state of the walk as the coherent weight grows, and relaxation
//! towards it from the maximally mixed state.
//!
//!     cargo run --example steady_state

use qsw_thermo::graph::{pagerank, parse_edge_list, DEFAULT_DAMPING, DEFAULT_PAGERANK_TOL};
use qsw_thermo::lindblad::{build_qsw, evolve, steady_state};
use qsw_thermo::tilt::activity_via_steady_state;
use qsw_thermo::DensityMatrix;

fn main() -> qsw_thermo::Result<()> {
    let g = parse_edge_list(include_str!("six_node.edges"))?;

    for cw in [0.0, 0.5, 1.0, 4.0] {
        let model = build_qsw(&g, DEFAULT_DAMPING, cw)?;
        let rho = steady_state(&model)?;
        let pi = pagerank(model.google(), DEFAULT_PAGERANK_TOL)?;
        let alpha = activity_via_steady_state(&model)?;
        let largest_coherence = (0..6)
            .flat_map(|i| (0..6).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| rho.matrix()[(i, j)].norm())
            .fold(0.0, f64::max);
        println!("coherent weight {cw}: largest |coherence| {largest_coherence:.4}");
        println!("  node  pagerank  population  activity");
        for i in 0..6 {
            println!(
                "  {i:>4}  {:.6}  {:.6}    {:.6}",
                pi[i],
                rho.populations()[i],
                alpha[i]
            );
        }
    }

    let model = build_qsw(&g, DEFAULT_DAMPING, 1.0)?;
    let target = steady_state(&model)?;
    let mut rho = DensityMatrix::maximally_mixed(6);
    println!("distance to the steady state from I/6:");
    for step in 1..=6 {
        rho = evolve(&model, &rho, 2.0, 1e-3)?;
        println!(
            "  t = {:>4.1}: {:.3e}",
            2.0 * step as f64,
            rho.matrix().max_abs_diff(target.matrix())
        );
    }
    Ok(())
}
