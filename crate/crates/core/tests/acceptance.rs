// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails or overruns its time budget.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qsw_thermo::graph::{pagerank, DEFAULT_PAGERANK_TOL};
use qsw_thermo::linalg::{eigenvalues, Lu};
use qsw_thermo::lindblad::{build_qsw, evolve, steady_state};
use qsw_thermo::tilt::{
    activity, activity_via_observables, activity_via_steady_state, crossover, normalized_activity,
    plateau_drift, scan, theta, uniform_grid, DEFAULT_FD_STEP,
};
use qsw_thermo::trajectory::{ensemble_stats, theta_by_integration, InitialState, DEFAULT_DT};
use qsw_thermo::{ComplexMatrix, DensityMatrix, QswModel, ThermoPoint, TiltVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn scanned(m: &QswModel, lo: f64, hi: f64, steps: usize) -> Result<Vec<ThermoPoint>, String> {
    let grid = uniform_grid(m.n(), lo, hi, steps).map_err(|e| e.to_string())?;
    scan(m, &grid, DEFAULT_FD_STEP)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())
}

fn relaxation_anchor() -> Verdict {
    let mut models: Vec<QswModel> = common::bundled(1.0).into_iter().map(|(_, m)| m).collect();
    models.push(common::single());
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    for _ in 0..20 {
        let n = rng.random_range(1..=8);
        let g = common::random_graph(&mut rng, n, 0.3);
        models.push(build_qsw(&g, 0.85, 1.0).map_err(|e| e.to_string())?);
    }
    let mut worst: f64 = 0.0;
    for m in &models {
        let t = theta(m, &TiltVector::zeros(m.n())).map_err(|e| e.to_string())?;
        worst = worst.max(t.abs());
    }
    check(
        worst <= 1e-8,
        format!("max |theta(0)| = {worst:.1e} over {} models", models.len()),
    )
}

fn triple_activity_identity() -> Verdict {
    let mut worst: f64 = 0.0;
    for cw in [0.0, 1.0] {
        for (_, m) in common::bundled(cw) {
            let fd = activity(&m, &TiltVector::zeros(m.n()), DEFAULT_FD_STEP)
                .map_err(|e| e.to_string())?;
            let obs = activity_via_observables(&m).map_err(|e| e.to_string())?;
            let ss = activity_via_steady_state(&m).map_err(|e| e.to_string())?;
            worst = worst
                .max(max_gap(&fd, &obs))
                .max(max_gap(&fd, &ss))
                .max(max_gap(&obs, &ss));
        }
    }
    check(worst <= 5e-6, format!("largest pairwise gap {worst:.1e}"))
}

fn classical_reduction() -> Verdict {
    let mut classical: f64 = 0.0;
    for (_, m) in common::bundled(0.0) {
        let pi = pagerank(m.google(), DEFAULT_PAGERANK_TOL).map_err(|e| e.to_string())?;
        let pop = steady_state(&m).map_err(|e| e.to_string())?.populations();
        let a =
            activity(&m, &TiltVector::zeros(m.n()), DEFAULT_FD_STEP).map_err(|e| e.to_string())?;
        classical = classical
            .max(max_gap(&pop, pi.as_slice()))
            .max(max_gap(&a, pi.as_slice()));
    }
    let mut active: f64 = 0.0;
    for (_, m) in common::bundled(1.0) {
        let pi = pagerank(m.google(), DEFAULT_PAGERANK_TOL).map_err(|e| e.to_string())?;
        let a = activity(&m, &TiltVector::uniform(m.n(), -8.0), DEFAULT_FD_STEP)
            .map_err(|e| e.to_string())?;
        let shares = normalized_activity(&a).map_err(|e| e.to_string())?;
        active = active.max(max_gap(&shares, pi.as_slice()));
    }
    check(
        classical <= 1e-6 && active <= 1e-3,
        format!(
            "classical gap {classical:.1e}, normalized activity at s=-8 vs pagerank {active:.1e}"
        ),
    )
}

fn theta_oracles() -> Verdict {
    let m = common::two_node(1.0);
    let mut worst: f64 = 0.0;
    for k in 0..9 {
        let sigma = -2.0 + 0.5 * k as f64;
        // The uniform direction and a single-node direction.
        for s in [vec![sigma, sigma], vec![sigma, 0.0]] {
            let s = TiltVector::new(s).map_err(|e| e.to_string())?;
            let spectral = theta(&m, &s).map_err(|e| e.to_string())?;
            let slope =
                theta_by_integration(&m, &s, 40.0, DEFAULT_DT).map_err(|e| e.to_string())?;
            worst = worst.max((spectral - slope).abs());
        }
    }
    let single = common::single();
    let mut closed: f64 = 0.0;
    for k in 0..9 {
        let sigma = -2.0 + 0.5 * k as f64;
        let t =
            theta(&single, &TiltVector::new(vec![sigma]).unwrap()).map_err(|e| e.to_string())?;
        closed = closed.max((t - ((-sigma).exp() - 1.0)).abs());
    }
    check(
        worst <= 1e-3 && closed <= 1e-8,
        format!("eigenvalue vs integration {worst:.1e}, single-node closed form {closed:.1e}"),
    )
}

fn monte_carlo_consistency() -> Verdict {
    let (n_traj, t_max) = (10_000, 200.0);
    let m = common::two_node(1.0);
    let stats = ensemble_stats(&m, &InitialState::SteadyState, t_max, DEFAULT_DT, n_traj, 1)
        .map_err(|e| e.to_string())?;
    let zero = TiltVector::zeros(2);
    let alpha = activity(&m, &zero, DEFAULT_FD_STEP).map_err(|e| e.to_string())?;
    let (delta, _) =
        qsw_thermo::tilt::dispersion(&m, &zero, DEFAULT_FD_STEP).map_err(|e| e.to_string())?;
    let se = stats.standard_errors.as_ref().unwrap();
    let d_hat = stats.dispersion_hat.as_ref().unwrap();
    let d_se = stats.dispersion_standard_errors.as_ref().unwrap();
    let mut z_rate: f64 = 0.0;
    let mut z_disp: f64 = 0.0;
    for i in 0..2 {
        z_rate = z_rate.max(((stats.mean_rate[i] - alpha[i]) / se[i]).abs());
        z_disp = z_disp.max(((d_hat[i] - delta[i].unwrap()) / d_se[i]).abs());
    }

    let single = ensemble_stats(
        &common::single(),
        &InitialState::default(),
        t_max,
        DEFAULT_DT,
        n_traj,
        2,
    )
    .map_err(|e| e.to_string())?;
    let poisson = single.dispersion_hat.as_ref().unwrap()[0];
    let z_poisson =
        ((poisson - 1.0) / single.dispersion_standard_errors.as_ref().unwrap()[0]).abs();
    check(
        z_rate <= 3.0 && z_disp <= 5.0 && z_poisson <= 5.0,
        format!("two-node |z| rate {z_rate:.2}, dispersion {z_disp:.2}; single-node dispersion {poisson:.4} (|z| {z_poisson:.2})"),
    )
}

fn thermodynamic_structure() -> Verdict {
    let mut rise: f64 = f64::NEG_INFINITY;
    let mut curvature: f64 = f64::INFINITY;
    let mut lowest: f64 = f64::INFINITY;
    let scans = [
        (common::two_node(1.0), -3.0, 3.0, 61),
        (common::six_node(1.0), -6.0, 6.0, 49),
        (common::six_node(0.0), -3.0, 3.0, 25),
    ];
    for (m, lo, hi, steps) in &scans {
        let points = scanned(m, *lo, *hi, *steps)?;
        let th: Vec<f64> = points.iter().map(|p| p.theta).collect();
        rise = th.windows(2).map(|w| w[1] - w[0]).fold(rise, f64::max);
        curvature = th
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(curvature, f64::min);
        lowest = points
            .iter()
            .flat_map(|p| p.alpha.iter().copied())
            .fold(lowest, f64::min);
    }
    check(
        rise <= 1e-10 && curvature >= -1e-8 && lowest >= -1e-8,
        format!("largest theta increase {rise:.1e}, smallest second difference {curvature:.1e}, smallest activity {lowest:.1e}"),
    )
}

fn two_node_dispersion() -> Verdict {
    let points = scanned(&common::two_node(1.0), -3.0, 3.0, 61)?;
    let inactive: Vec<&ThermoPoint> = points.iter().filter(|p| p.s.as_slice()[0] >= 0.0).collect();
    let mut drop: f64 = 0.0;
    let mut kink: f64 = 0.0;
    for i in 0..2 {
        let d: Vec<f64> = inactive
            .iter()
            .map(|p| p.delta[i].unwrap_or(f64::NAN))
            .collect();
        drop = d.windows(2).map(|w| w[0] - w[1]).fold(drop, f64::max);
        kink = d
            .windows(3)
            .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs())
            .fold(kink, f64::max);
    }
    let end: f64 = points
        .last()
        .unwrap()
        .delta
        .iter()
        .map(|d| (1.0 - d.unwrap_or(f64::NAN)).abs())
        .fold(0.0, f64::max);
    let results: Vec<_> = points.iter().cloned().map(Ok).collect();
    let peak = crossover(&results).ok_or("delta_global undefined")?;
    check(
        drop <= 0.0 && kink <= 1e-2 && end <= 1e-2 && !peak.interior,
        format!(
            "delta_i non-decreasing for s >= 0 (largest drop {drop:.1e}), |1 - delta_i(3)| <= {end:.1e}, delta_global peak at grid edge: {}",
            !peak.interior
        ),
    )
}

fn crossover_on_stand_in() -> Verdict {
    let points = scanned(&common::six_node(1.0), -6.0, 6.0, 49)?;
    let results: Vec<_> = points.iter().cloned().map(Ok).collect();
    let peak = crossover(&results).ok_or("delta_global undefined")?;
    let at = points[peak.index].s.as_slice()[0];
    let (lo, hi) = plateau_drift(&results).ok_or("normalized activity undefined at an end")?;
    check(
        peak.interior && at.is_finite() && lo <= 0.05 && hi <= 0.05,
        format!(
            "delta_global peak {:.4} at s = {at} (interior: {}), end drift of normalized activity {lo:.1e} / {hi:.1e}",
            peak.delta_global, peak.interior
        ),
    )
}

fn numerical_hygiene() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = common::six_node(1.0);
    let a = ComplexMatrix::from_fn(6, 6, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let p = a.matmul(&a.adjoint());
    let mut rho = DensityMatrix::new(p.scale(1.0 / p.trace())).map_err(|e| e.to_string())?;
    let (mut trace, mut herm): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        rho = evolve(&m, &rho, 1.0, DEFAULT_DT).map_err(|e| e.to_string())?;
        trace = trace.max((rho.matrix().trace().re - 1.0).abs());
        herm = herm.max(rho.matrix().hermiticity_defect());
    }

    let (mut ratio_lo, mut ratio_hi) = (f64::INFINITY, 0.0f64);
    for sigma in [-0.5, 0.5] {
        let s = TiltVector::uniform(6, sigma);
        let at = |h: f64| activity(&m, &s, h).map_err(|e| e.to_string());
        let (a1, a2, a3) = (at(0.1)?, at(0.05)?, at(0.025)?);
        for i in 0..6 {
            let r = (a1[i] - a2[i]).abs() / (a2[i] - a3[i]).abs();
            ratio_lo = ratio_lo.min(r);
            ratio_hi = ratio_hi.max(r);
        }
    }

    let (mut tr_gap, mut det_gap): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let mat = ComplexMatrix::from_fn(6, 6, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let spectrum = eigenvalues(&mat).map_err(|e| e.to_string())?;
        let det = Lu::factor(&mat, 0.0)
            .map_err(|e| e.to_string())?
            .determinant();
        tr_gap = tr_gap.max((spectrum.iter().sum::<Complex64>() - mat.trace()).norm());
        det_gap = det_gap.max((spectrum.iter().product::<Complex64>() - det).norm() / det.norm());
    }
    check(
        trace <= 1e-9 && herm <= 1e-9 && (3.0..=5.0).contains(&ratio_lo) && (3.0..=5.0).contains(&ratio_hi)
            && tr_gap <= 1e-8 && det_gap <= 1e-6,
        format!(
            "trace {trace:.1e}, hermiticity {herm:.1e}, step-halving ratios in [{ratio_lo:.2}, {ratio_hi:.2}], eigen trace {tr_gap:.1e}, det {det_gap:.1e}"
        ),
    )
}

struct Criterion {
    id: u8,
    name: &'static str,
    /// Wall-clock budget in seconds, where one is stated.
    budget: Option<u64>,
    run: fn() -> Verdict,
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: 1,
        name: "relaxation anchor",
        budget: Some(10),
        run: relaxation_anchor,
    },
    Criterion {
        id: 2,
        name: "triple-path activity identity",
        budget: Some(30),
        run: triple_activity_identity,
    },
    Criterion {
        id: 3,
        name: "classical reduction",
        budget: Some(30),
        run: classical_reduction,
    },
    Criterion {
        id: 4,
        name: "theta oracle equivalence",
        budget: Some(60),
        run: theta_oracles,
    },
    Criterion {
        id: 5,
        name: "Monte Carlo consistency",
        budget: Some(300),
        run: monte_carlo_consistency,
    },
    Criterion {
        id: 6,
        name: "thermodynamic structure",
        budget: None,
        run: thermodynamic_structure,
    },
    Criterion {
        id: 7,
        name: "two-node dispersion shape",
        budget: Some(60),
        run: two_node_dispersion,
    },
    Criterion {
        id: 8,
        name: "crossover on the six-node stand-in",
        budget: None,
        run: crossover_on_stand_in,
    },
    Criterion {
        id: 9,
        name: "numerical hygiene",
        budget: None,
        run: numerical_hygiene,
    },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for Criterion {
        id,
        name,
        budget,
        run,
    } in CRITERIA
    {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let over = budget.is_some_and(|b| elapsed > Duration::from_secs(b));
        let (ok, detail) = match verdict {
            Ok(d) => (!over, d),
            Err(d) => (false, d),
        };
        let timing = match budget {
            Some(b) => format!("{:.1} s of {b} s", elapsed.as_secs_f64()),
            None => format!("{:.1} s", elapsed.as_secs_f64()),
        };
        println!(
            "{} [{id}] {name}: {detail} ({timing})",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
