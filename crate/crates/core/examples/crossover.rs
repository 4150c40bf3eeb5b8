// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Crossover between the active and inactive regimes on the six-node graph:
//! the normalized activity moves between two plateaus and the global
//! dispersion peaks where it moves. The limiting shares come from the
//! recycling-only and no-jump generators.
//!
//!     cargo run --example crossover

use qsw_thermo::graph::{parse_edge_list, DEFAULT_DAMPING};
use qsw_thermo::lindblad::build_qsw;
use qsw_thermo::tilt::{
    crossover, limit_point, plateau_drift, scan, uniform_grid, LimitMode, DEFAULT_FD_STEP,
};

fn shares(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> qsw_thermo::Result<()> {
    let model = build_qsw(
        &parse_edge_list(include_str!("six_node.edges"))?,
        DEFAULT_DAMPING,
        1.0,
    )?;
    let grid = uniform_grid(6, -6.0, 6.0, 25)?;
    let points = scan(&model, &grid, DEFAULT_FD_STEP);

    println!("     s   delta_global   normalized activity");
    for p in points.iter().flatten() {
        let an = p.alpha_norm.as_deref().map_or("-".into(), shares);
        println!(
            "{:>6.2}   {:>12.5}   {an}",
            p.s.as_slice()[0],
            p.delta_global.unwrap_or(f64::NAN)
        );
    }

    if let Some(c) = crossover(&points) {
        println!(
            "delta_global peaks at s = {} ({:.5}, interior: {})",
            grid[c.index].as_slice()[0],
            c.delta_global,
            c.interior
        );
    }
    if let Some((lo, hi)) = plateau_drift(&points) {
        println!(
            "end-interval drift of the shares: {lo:.1e} (active end), {hi:.1e} (inactive end)"
        );
    }
    for mode in [LimitMode::Active, LimitMode::Inactive] {
        let limit = limit_point(&model, mode)?;
        let an = limit.alpha_norm.as_deref().map_or("-".into(), shares);
        println!(
            "{mode:?} limit: leading rate {:.5}, shares {an}",
            limit.leading_rate
        );
    }
    Ok(())
}
