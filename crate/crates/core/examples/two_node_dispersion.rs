// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Index of dispersion on the two-node graph. Both nodes approach Poissonian
//! statistics in the inactive region and the global dispersion has no peak.
//!
//!     cargo run --example two_node_dispersion

use qsw_thermo::graph::{parse_edge_list, DEFAULT_DAMPING};
use qsw_thermo::lindblad::build_qsw;
use qsw_thermo::tilt::{crossover, scan, uniform_grid, DEFAULT_FD_STEP};

fn main() -> qsw_thermo::Result<()> {
    let model = build_qsw(
        &parse_edge_list(include_str!("two_node.edges"))?,
        DEFAULT_DAMPING,
        1.0,
    )?;
    let grid = uniform_grid(2, -3.0, 3.0, 13)?;
    let points = scan(&model, &grid, DEFAULT_FD_STEP);

    println!("     s   delta_0   delta_1   delta_global");
    for p in points.iter().flatten() {
        let d = |i: usize| p.delta[i].map_or("-".into(), |v| format!("{v:.5}"));
        let total = p.delta_global.map_or("-".into(), |v| format!("{v:.5}"));
        println!("{:>6.2}   {}   {}   {total}", p.s.as_slice()[0], d(0), d(1));
    }
    if let Some(c) = crossover(&points) {
        let at = grid[c.index].as_slice()[0];
        if c.interior {
            println!("interior maximum of delta_global at s = {at}");
        } else {
            println!("largest delta_global sits at the edge s = {at}; no interior maximum");
        }
    }
    Ok(())
}
