// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! θ(s) two ways: the leading eigenvalue of the tilted generator and the
//! growth rate of the tilted trace under time integration.
//!
//!     cargo run --release --example tilted_integration

use qsw_thermo::graph::{parse_edge_list, DEFAULT_DAMPING};
use qsw_thermo::lindblad::build_qsw;
use qsw_thermo::tilt::theta;
use qsw_thermo::trajectory::{integrate_tilted, DEFAULT_DT};
use qsw_thermo::TiltVector;

fn main() -> qsw_thermo::Result<()> {
    let model = build_qsw(
        &parse_edge_list(include_str!("six_node.edges"))?,
        DEFAULT_DAMPING,
        1.0,
    )?;
    println!("        s_0   spectral θ     integrated θ   difference   gap");
    for k in 0..9 {
        // Bias only the jumps into node 0.
        let mut s = vec![0.0; 6];
        s[0] = -2.0 + 0.5 * k as f64;
        let s = TiltVector::new(s)?;
        let spectral = theta(&model, &s)?;
        let run = integrate_tilted(&model, &s, 60.0, DEFAULT_DT, 10)?;
        println!(
            "{:>11.2}   {spectral:>12.8}   {:>12.8}   {:>10.1e}   {}",
            s.as_slice()[0],
            run.theta,
            (spectral - run.theta).abs(),
            run.spectral_gap.map_or("-".into(), |g| format!("{g:.4}"))
        );
    }
    Ok(())
}
