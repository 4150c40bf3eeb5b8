// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum-jump Monte Carlo: one trajectory's jump record, then ensemble
//! counting statistics against the spectral activity and dispersion.
//!
//!     cargo run --release --example trajectories -- [n_traj] [t_max]

use std::env;

use qsw_thermo::graph::{parse_edge_list, DEFAULT_DAMPING};
use qsw_thermo::lindblad::build_qsw;
use qsw_thermo::tilt::{activity, dispersion, DEFAULT_FD_STEP};
use qsw_thermo::trajectory::{
    ensemble_stats, simulate, uniform_superposition, InitialState, DEFAULT_DT,
};
use qsw_thermo::TiltVector;

fn main() -> qsw_thermo::Result<()> {
    let mut args = env::args().skip(1);
    let n_traj: usize = args
        .next()
        .map(|v| v.parse().expect("n_traj"))
        .unwrap_or(2000);
    let t_max: f64 = args
        .next()
        .map(|v| v.parse().expect("t_max"))
        .unwrap_or(100.0);
    let model = build_qsw(
        &parse_edge_list(include_str!("two_node.edges"))?,
        DEFAULT_DAMPING,
        1.0,
    )?;

    let rec = simulate(&model, &uniform_superposition(2), 10.0, DEFAULT_DT, 7)?;
    println!("one trajectory to t = 10: {} jumps", rec.total_jumps());
    for e in rec.jump_events.iter().take(8) {
        println!("  t = {:7.4}  {} -> {}", e.time, e.src, e.dst);
    }

    let stats = ensemble_stats(
        &model,
        &InitialState::SteadyState,
        t_max,
        DEFAULT_DT,
        n_traj,
        0,
    )?;
    let zero = TiltVector::zeros(2);
    let alpha = activity(&model, &zero, DEFAULT_FD_STEP)?;
    let (delta, _) = dispersion(&model, &zero, DEFAULT_FD_STEP)?;
    println!("{n_traj} trajectories to t = {t_max}:");
    for i in 0..2 {
        let se = stats.standard_errors.as_ref().map_or(f64::NAN, |v| v[i]);
        let d = stats.dispersion_hat.as_ref().map_or(f64::NAN, |v| v[i]);
        let dse = stats
            .dispersion_standard_errors
            .as_ref()
            .map_or(f64::NAN, |v| v[i]);
        println!(
            "  node {i}: rate {:.5} ± {se:.5} (spectral {:.5}), dispersion {d:.4} ± {dse:.4} (spectral {:.4})",
            stats.mean_rate[i],
            alpha[i],
            delta[i].unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
