// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qsw_thermo::lindblad::evolve;
use qsw_thermo::tilt::theta;
use qsw_thermo::trajectory::{
    ensemble_stats, integrate_tilted, run_ensemble, simulate, simulate_observed,
    theta_by_integration, uniform_superposition, InitialState, DEFAULT_DT,
};
use qsw_thermo::{DensityMatrix, TiltVector};
use rayon::prelude::*;

#[test]
fn trajectory_average_reproduces_master_equation() {
    let m = common::two_node(1.0);
    let psi0 = uniform_superposition(2);
    let times = [0.5, 2.0];
    let n_traj = 10_000;
    let states: Vec<Vec<Vec<Complex64>>> = (0..n_traj as u64)
        .into_par_iter()
        .map(|seed| {
            simulate_observed(&m, &psi0, 2.0, DEFAULT_DT, 900 + seed, &times)
                .unwrap()
                .1
        })
        .collect();
    let rho0 = DensityMatrix::pure(&psi0).unwrap();
    for (k, &t) in times.iter().enumerate() {
        let exact = evolve(&m, &rho0, t, DEFAULT_DT).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let samples: Vec<Complex64> =
                    states.iter().map(|s| s[k][i] * s[k][j].conj()).collect();
                let nf = n_traj as f64;
                let mean: Complex64 = samples.iter().sum::<Complex64>() / nf;
                for part in [|z: Complex64| z.re, |z: Complex64| z.im] {
                    let var = samples
                        .iter()
                        .map(|&z| (part(z) - part(mean)).powi(2))
                        .sum::<f64>()
                        / (nf - 1.0);
                    let se = (var / nf).sqrt();
                    let gap = (part(mean) - part(exact.matrix()[(i, j)])).abs();
                    assert!(
                        gap <= 5.0 * se + 1e-12,
                        "t={t} ({i},{j}): gap {gap}, se {se}"
                    );
                }
            }
        }
    }
}

#[test]
fn renormalization_period_does_not_change_log_trace() {
    let m = common::two_node(1.0);
    for s in [vec![-1.0, -1.0], vec![0.5, -0.8], vec![2.0, 1.0]] {
        let s = TiltVector::new(s).unwrap();
        let every = integrate_tilted(&m, &s, 10.0, DEFAULT_DT, 1).unwrap();
        let sparse = integrate_tilted(&m, &s, 10.0, DEFAULT_DT, 50).unwrap();
        assert!(
            (every.log_trace - sparse.log_trace).abs() <= 1e-9,
            "{} vs {}",
            every.log_trace,
            sparse.log_trace
        );
    }
}

#[test]
fn classical_jumps_follow_google_columns() {
    let m = common::model("0 1\n1 2\n2 0\n0 2", 0.0);
    let rec = simulate(
        &m,
        &[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
        20_000.0,
        DEFAULT_DT,
        3,
    )
    .unwrap();
    let mut tally = [[0u64; 3]; 3];
    let mut current = 0;
    for e in &rec.jump_events {
        // Without coherent motion the walker sits on a node until it jumps.
        assert_eq!(e.src, current);
        tally[e.src][e.dst] += 1;
        current = e.dst;
    }
    for (src, row) in tally.iter().enumerate() {
        let total: u64 = row.iter().sum();
        for (dst, &hits) in row.iter().enumerate() {
            let p = m.google().get(dst, src);
            let f = hits as f64 / total as f64;
            let sigma = (p * (1.0 - p) / total as f64).sqrt();
            assert!((f - p).abs() <= 5.0 * sigma, "{src}->{dst}: {f} vs {p}");
        }
    }
}

#[test]
fn integrated_theta_matches_spectral_theta() {
    let m = common::two_node(1.0);
    for s in [vec![-1.0, -1.0], vec![-0.3, 0.0], vec![1.0, 0.4]] {
        let s = TiltVector::new(s).unwrap();
        let slope = theta_by_integration(&m, &s, 40.0, DEFAULT_DT).unwrap();
        assert!((slope - theta(&m, &s).unwrap()).abs() <= 1e-3);
    }
    let zero = theta_by_integration(&m, &TiltVector::zeros(2), 40.0, DEFAULT_DT).unwrap();
    assert!(zero.abs() <= 1e-6);
    let one = theta_by_integration(
        &common::single(),
        &TiltVector::new(vec![1.0]).unwrap(),
        20.0,
        DEFAULT_DT,
    )
    .unwrap();
    assert!((one - ((-1.0f64).exp() - 1.0)).abs() <= 1e-6);
}

#[test]
fn single_node_is_a_unit_rate_poisson_stream() {
    let stats = ensemble_stats(
        &common::single(),
        &InitialState::default(),
        100.0,
        DEFAULT_DT,
        2000,
        17,
    )
    .unwrap();
    let se = stats.standard_errors.as_ref().unwrap()[0];
    assert!((stats.mean_rate[0] - 1.0).abs() <= 3.0 * se);
    let d = stats.dispersion_hat.as_ref().unwrap()[0];
    let dse = stats.dispersion_standard_errors.as_ref().unwrap()[0];
    assert!((d - 1.0).abs() <= 5.0 * dse, "dispersion {d} ± {dse}");
}

#[test]
fn ensembles_are_reproducible() {
    let m = common::six_node(1.0);
    let a = run_ensemble(
        &m,
        &InitialState::SteadyState,
        5.0,
        DEFAULT_DT,
        16,
        40,
        true,
    )
    .unwrap();
    let b = run_ensemble(
        &m,
        &InitialState::SteadyState,
        5.0,
        DEFAULT_DT,
        16,
        40,
        true,
    )
    .unwrap();
    assert_eq!(a.stats, b.stats);
    for (x, y) in a.records.iter().zip(&b.records) {
        assert_eq!(x.counts, y.counts);
        assert_eq!(x.jump_events.len(), y.jump_events.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn records_are_consistent(seed in any::<u64>(), t_max in 0.5f64..20.0) {
        let m = common::six_node(1.0);
        let rec = simulate(&m, &uniform_superposition(6), t_max, DEFAULT_DT, seed).unwrap();
        prop_assert_eq!(rec.total_jumps(), rec.jump_events.len() as u64);
        let mut per_node = vec![0u64; 6];
        let mut last = 0.0;
        for e in &rec.jump_events {
            prop_assert!(e.time > last && e.time <= t_max);
            last = e.time;
            per_node[e.dst] += 1;
        }
        prop_assert_eq!(per_node, rec.counts);
    }
}
