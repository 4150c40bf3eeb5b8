// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Quantum-jump unraveling of the walk and the two stochastic/integration
//! cross-checks of the counting statistics.
//!
//! Between jumps the unnormalized state follows `ψ' = -i H_eff ψ` with the
//! same RK4 scheme used elsewhere. A jump fires when `‖ψ‖²` falls below a
//! uniform draw `r`; the crossing time is bisected to 1e-10 inside the
//! bracketing step. Jump `k` is then chosen with weight `‖L_k ψ‖²`.
//!
//! Randomness: trajectory `idx` of an ensemble seeded with `seed0` uses a
//! ChaCha8 stream keyed by `seed0 + idx`, so results do not depend on how
//! trajectories are scheduled across threads.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, norm2, rk4_step_matrix, ComplexMatrix, Rk4, ZERO};
use crate::lindblad::{steady_state, QswModel};
use crate::report::fmt_f64;
use crate::tilt::{TiltVector, Tilting};

/// Default integration step, in units of the unit hopping amplitude.
pub const DEFAULT_DT: f64 = 1e-3;
const BISECTION_TOL: f64 = 1e-10;
const NORM_GROWTH_TOL: f64 = 1e-12;

/// One recorded jump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub dst: usize,
    pub src: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub t_final: f64,
    /// Empty when event recording was switched off.
    pub jump_events: Vec<JumpEvent>,
    /// Jumps into each node.
    pub counts: Vec<u64>,
}

impl TrajectoryRecord {
    pub fn total_jumps(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// CSV with columns `time,dst,src`.
    pub fn write_events_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "dst", "src"])?;
        for e in &self.jump_events {
            w.write_record([fmt_f64(e.time), e.dst.to_string(), e.src.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Starting state of each trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialState {
    /// `Σ_i |i⟩ / √n`
    #[default]
    UniformSuperposition,
    /// A fixed normalized state.
    Pure(Vec<Complex64>),
    /// A pure state drawn per trajectory so that the ensemble average is
    /// the steady state; counting statistics are then stationary from t = 0.
    SteadyState,
}

/// Normalized uniform superposition over `n` nodes.
pub fn uniform_superposition(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n]
}

/// Weighted pure components `ρ = Σ_k p_k |φ_k⟩⟨φ_k|` from a Cholesky factor.
fn pure_components(rho: &ComplexMatrix) -> Vec<(f64, Vec<Complex64>)> {
    let n = rho.rows();
    let mut c = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = rho[(j, j)].re;
        for k in 0..j {
            d -= c[(j, k)].norm_sqr();
        }
        if d <= 1e-15 {
            continue;
        }
        let djj = d.sqrt();
        c[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut v = rho[(i, j)];
            for k in 0..j {
                v -= c[(i, k)] * c[(j, k)].conj();
            }
            c[(i, j)] = v / djj;
        }
    }
    (0..n)
        .filter_map(|k| {
            let col: Vec<Complex64> = (0..n).map(|i| c[(i, k)]).collect();
            let w = norm2(&col).powi(2);
            (w > 0.0).then(|| (w, col.iter().map(|z| z / w.sqrt()).collect()))
        })
        .collect()
}

struct Propagator {
    generator: ComplexMatrix,
    dt: f64,
    step: ComplexMatrix,
    stages: Rk4,
    scratch: Vec<Complex64>,
}

impl Propagator {
    fn new(model: &QswModel, dt: f64) -> Self {
        let generator = model
            .effective_hamiltonian()
            .scale(Complex64::new(0.0, -1.0));
        let step = rk4_step_matrix(&generator, dt);
        let n = model.n();
        Self {
            generator,
            dt,
            step,
            stages: Rk4::new(n),
            scratch: vec![ZERO; n],
        }
    }

    /// Advances `psi` by `h`; full steps use the precomputed matrix.
    fn advance(&mut self, psi: &mut [Complex64], h: f64) {
        if h == self.dt {
            self.step.mul_vec_into(psi, &mut self.scratch);
            psi.copy_from_slice(&self.scratch);
        } else {
            self.stages.step(&self.generator, psi, h);
        }
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_sim_args(model: &QswModel, psi0: &[Complex64], t_max: f64, dt: f64) -> Result<()> {
    if psi0.len() != model.n() {
        return Err(Error::Shape(format!(
            "state of length {} for {} nodes",
            psi0.len(),
            model.n()
        )));
    }
    if (norm2(psi0) - 1.0).abs() > 1e-10 {
        return Err(Error::Domain("initial state must have unit norm".into()));
    }
    if !(t_max > 0.0) || !(dt > 0.0) || !t_max.is_finite() || !dt.is_finite() {
        return Err(Error::Domain("t_max and dt must be positive".into()));
    }
    Ok(())
}

/// A single trajectory from `psi0` up to `t_max`.
pub fn simulate(
    model: &QswModel,
    psi0: &[Complex64],
    t_max: f64,
    dt: f64,
    seed: u64,
) -> Result<TrajectoryRecord> {
    check_sim_args(model, psi0, t_max, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run(model, psi0.to_vec(), t_max, dt, seed, &mut rng, &[], true).map(|(rec, _)| rec)
}

/// Like [`simulate`], also returning the normalized state at each of the
/// sorted `observe` times.
pub fn simulate_observed(
    model: &QswModel,
    psi0: &[Complex64],
    t_max: f64,
    dt: f64,
    seed: u64,
    observe: &[f64],
) -> Result<(TrajectoryRecord, Vec<Vec<Complex64>>)> {
    check_sim_args(model, psi0, t_max, dt)?;
    if observe.windows(2).any(|w| w[0] > w[1]) || observe.iter().any(|&t| !(t >= 0.0) || t > t_max)
    {
        return Err(Error::Domain(
            "observation times must be sorted within [0, t_max]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run(
        model,
        psi0.to_vec(),
        t_max,
        dt,
        seed,
        &mut rng,
        observe,
        true,
    )
}

#[allow(clippy::too_many_arguments)]
fn run(
    model: &QswModel,
    mut psi: Vec<Complex64>,
    t_max: f64,
    dt: f64,
    seed: u64,
    rng: &mut ChaCha8Rng,
    observe: &[f64],
    record_events: bool,
) -> Result<(TrajectoryRecord, Vec<Vec<Complex64>>)> {
    let n = model.n();
    let mut prop = Propagator::new(model, dt);
    let mut counts = vec![0u64; n];
    let mut events = Vec::new();
    let mut snapshots = Vec::with_capacity(observe.len());
    let mut next_obs = 0;
    let mut t = 0.0;
    let mut threshold: f64 = rng.random();
    let mut norm = norm_sqr(&psi);
    let mut trial = psi.clone();
    let mut weights = vec![0.0; model.jump_count()];

    loop {
        while next_obs < observe.len() && observe[next_obs] <= t {
            let scale = 1.0 / norm.sqrt();
            snapshots.push(psi.iter().map(|z| z * scale).collect());
            next_obs += 1;
        }
        if t >= t_max {
            break;
        }
        let mut stop = (t + dt).min(t_max);
        if next_obs < observe.len() {
            stop = stop.min(observe[next_obs]);
        }
        let h = if stop == t + dt { dt } else { stop - t };
        trial.copy_from_slice(&psi);
        prop.advance(&mut trial, h);
        let next = norm_sqr(&trial);
        if !next.is_finite() {
            return Err(Error::Divergence(format!("in trajectory state at t = {t}")));
        }
        if next > norm * (1.0 + NORM_GROWTH_TOL) + f64::MIN_POSITIVE {
            return Err(Error::Model(format!(
                "state norm grew from {norm} to {next}: H_eff is not dissipative"
            )));
        }
        if next > threshold {
            std::mem::swap(&mut psi, &mut trial);
            norm = next;
            t = stop;
            continue;
        }

        // the norm crosses the threshold inside (t, t + h]
        let (mut lo, mut hi) = (0.0, h);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            trial.copy_from_slice(&psi);
            prop.advance(&mut trial, mid);
            if norm_sqr(&trial) > threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        trial.copy_from_slice(&psi);
        prop.advance(&mut trial, hi);
        let t_jump = t + hi;

        for (w, j) in weights.iter_mut().zip(model.jumps()) {
            *w = j.rate() * trial[j.src].norm_sqr();
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Model(format!(
                "no jump channel open at t = {t_jump}"
            )));
        }
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = weights.len() - 1;
        for (k, &w) in weights.iter().enumerate() {
            if pick < w {
                chosen = k;
                break;
            }
            pick -= w;
        }
        let jump = model.jumps()[chosen];
        let amp = trial[jump.src];
        let phase = if amp.norm() > 0.0 {
            amp / amp.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        psi.iter_mut().for_each(|z| *z = ZERO);
        psi[jump.dst] = phase;
        norm = 1.0;
        counts[jump.dst] += 1;
        if record_events {
            events.push(JumpEvent {
                time: t_jump,
                dst: jump.dst,
                src: jump.src,
            });
        }
        threshold = rng.random();
        t = t_jump;
    }

    Ok((
        TrajectoryRecord {
            seed,
            t_final: t_max,
            jump_events: events,
            counts,
        },
        snapshots,
    ))
}

/// Per-node count statistics over an ensemble of trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub n_traj: usize,
    pub t_final: f64,
    /// `[K_i]_ave / t`
    pub mean_rate: Vec<f64>,
    /// Sample variance of `K_i`, divided by `t`. Absent for one trajectory.
    pub var_rate: Option<Vec<f64>>,
    /// Sample variance over mean of `K_i`.
    pub dispersion_hat: Option<Vec<f64>>,
    /// Standard error of `mean_rate`.
    pub standard_errors: Option<Vec<f64>>,
    /// Delta-method standard error of `dispersion_hat`.
    pub dispersion_standard_errors: Option<Vec<f64>>,
}

impl EnsembleStats {
    /// Statistics of per-trajectory counts `counts[traj][node]`.
    pub fn from_counts(counts: &[Vec<u64>], t_final: f64) -> Result<Self> {
        let n_traj = counts.len();
        if n_traj == 0 {
            return Err(Error::Domain("empty ensemble".into()));
        }
        let nodes = counts[0].len();
        let nf = n_traj as f64;
        let mut mean_rate = Vec::with_capacity(nodes);
        let mut var_rate = Vec::with_capacity(nodes);
        let mut disp = Vec::with_capacity(nodes);
        let mut se = Vec::with_capacity(nodes);
        let mut disp_se = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let xs: Vec<f64> = counts.iter().map(|c| c[i] as f64).collect();
            let mean = xs.iter().sum::<f64>() / nf;
            mean_rate.push(mean / t_final);
            if n_traj < 2 {
                continue;
            }
            let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
            let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / nf;
            let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
            let var = m2 * nf / (nf - 1.0);
            var_rate.push(var / t_final);
            se.push(var.sqrt() / nf.sqrt() / t_final);
            if mean > 0.0 {
                let d = var / mean;
                disp.push(d);
                // Var(v/m) ≈ Var(v)/m² + v² Var(m)/m⁴ - 2 v Cov(m, v)/m³
                let var_v = (m4 - m2 * m2) / nf;
                let var_m = m2 / nf;
                let cov = m3 / nf;
                let v = var;
                let dv = var_v / (mean * mean) + v * v * var_m / mean.powi(4)
                    - 2.0 * v * cov / mean.powi(3);
                disp_se.push(dv.max(0.0).sqrt());
            } else {
                disp.push(0.0);
                disp_se.push(0.0);
            }
        }
        let some = |v: Vec<f64>| (n_traj >= 2).then_some(v);
        Ok(Self {
            n_traj,
            t_final,
            mean_rate,
            var_rate: some(var_rate),
            dispersion_hat: some(disp),
            standard_errors: some(se),
            dispersion_standard_errors: some(disp_se),
        })
    }
}

/// Trajectories and their statistics.
#[derive(Debug, Clone)]
pub struct EnsembleRun {
    pub stats: EnsembleStats,
    pub records: Vec<TrajectoryRecord>,
}

/// Runs `n_traj` trajectories in parallel; trajectory `idx` uses seed `seed0 + idx`.
pub fn run_ensemble(
    model: &QswModel,
    initial: &InitialState,
    t_max: f64,
    dt: f64,
    n_traj: usize,
    seed0: u64,
    record_events: bool,
) -> Result<EnsembleRun> {
    if n_traj == 0 {
        return Err(Error::Domain("need at least one trajectory".into()));
    }
    let components = match initial {
        InitialState::SteadyState => Some(pure_components(steady_state(model)?.matrix())),
        _ => None,
    };
    let fixed = match initial {
        InitialState::UniformSuperposition => Some(uniform_superposition(model.n())),
        InitialState::Pure(psi) => Some(psi.clone()),
        InitialState::SteadyState => None,
    };
    if let Some(psi) = &fixed {
        check_sim_args(model, psi, t_max, dt)?;
    } else {
        check_sim_args(model, &uniform_superposition(model.n()), t_max, dt)?;
    }

    let records = (0..n_traj)
        .into_par_iter()
        .map(|idx| {
            let seed = seed0.wrapping_add(idx as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi0 = match (&fixed, &components) {
                (Some(psi), _) => psi.clone(),
                (None, Some(parts)) => {
                    let mut u: f64 = rng.random();
                    let mut picked = &parts[parts.len() - 1].1;
                    for (w, phi) in parts {
                        if u < *w {
                            picked = phi;
                            break;
                        }
                        u -= w;
                    }
                    picked.clone()
                }
                (None, None) => unreachable!(),
            };
            run(model, psi0, t_max, dt, seed, &mut rng, &[], record_events).map(|(r, _)| r)
        })
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<Vec<u64>> = records.iter().map(|r| r.counts.clone()).collect();
    let stats = EnsembleStats::from_counts(&counts, t_max)?;
    Ok(EnsembleRun { stats, records })
}

/// Per-node jump-count statistics over `n_traj` independent trajectories.
pub fn ensemble_stats(
    model: &QswModel,
    initial: &InitialState,
    t_max: f64,
    dt: f64,
    n_traj: usize,
    seed0: u64,
) -> Result<EnsembleStats> {
    run_ensemble(model, initial, t_max, dt, n_traj, seed0, false).map(|r| r.stats)
}

/// θ(s) from the growth rate of `Tr ρ(s, t)` under the tilted generator.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratedTheta {
    /// Least-squares slope of `log Tr ρ(s, t)` over the last 20% of the run.
    pub theta: f64,
    /// `log Tr ρ(s, t_max)`, accumulated across renormalizations.
    pub log_trace: f64,
    /// Gap below the leading eigenvalue; the transient decays at this rate.
    pub spectral_gap: Option<f64>,
}

/// Slope estimate of θ, renormalizing every 10 steps.
pub fn theta_by_integration(model: &QswModel, s: &TiltVector, t_max: f64, dt: f64) -> Result<f64> {
    integrate_tilted(model, s, t_max, dt, 10).map(|r| r.theta)
}

/// Evolves `vec(I/n)` under `W_s` by RK4, dividing by the trace every
/// `renorm_every` steps and accumulating the logarithm of the factors.
pub fn integrate_tilted(
    model: &QswModel,
    s: &TiltVector,
    t_max: f64,
    dt: f64,
    renorm_every: usize,
) -> Result<IntegratedTheta> {
    if !(t_max > 0.0) || !(dt > 0.0) || renorm_every == 0 {
        return Err(Error::Domain(
            "t_max, dt and the renormalization period must be positive".into(),
        ));
    }
    let tilting = Tilting::per_node(model);
    let w = tilting.superoperator(s)?;
    let n = model.n();
    let mut v =
        linalg::vec(&ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)))?;
    let steps = linalg::step_count(t_max, dt);
    let h = t_max / steps as f64;
    let window_start = 0.8 * t_max;
    let trace = |v: &[Complex64]| (0..n).map(|i| v[i + n * i].re).sum::<f64>();

    let mut stepper = Rk4::new(v.len());
    let mut log_acc = 0.0;
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut log_trace = 0.0;
    for k in 1..=steps {
        stepper.step(w.matrix(), &mut v, h);
        let tr = trace(&v);
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::Divergence(format!(
                "trace {tr} during tilted integration"
            )));
        }
        let t = h * k as f64;
        log_trace = log_acc + tr.ln();
        if t >= window_start {
            sx += t;
            sy += log_trace;
            sxx += t * t;
            sxy += t * log_trace;
            count += 1.0;
        }
        if k % renorm_every == 0 {
            v.iter_mut().for_each(|z| *z /= tr);
            log_acc += tr.ln();
        }
    }
    let theta = if count >= 2.0 {
        let mx = sx / count;
        let my = sy / count;
        (sxy / count - mx * my) / (sxx / count - mx * mx)
    } else {
        log_trace / t_max
    };
    Ok(IntegratedTheta {
        theta,
        log_trace,
        spectral_gap: tilting.spectral_gap(s).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;
    use crate::lindblad::build_qsw;

    fn single() -> QswModel {
        build_qsw(&parse_edge_list("n 1").unwrap(), 0.85, 1.0).unwrap()
    }

    #[test]
    fn deterministic_under_seed() {
        let m = build_qsw(&parse_edge_list("0 1").unwrap(), 0.85, 1.0).unwrap();
        let psi = uniform_superposition(2);
        let a = simulate(&m, &psi, 20.0, 1e-3, 7).unwrap();
        let b = simulate(&m, &psi, 20.0, 1e-3, 7).unwrap();
        assert_eq!(a, b);
        let c = simulate(&m, &psi, 20.0, 1e-3, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn record_invariants() {
        let m = build_qsw(&parse_edge_list("0 1\n1 2\n2 0\n0 2").unwrap(), 0.85, 1.0).unwrap();
        let rec = simulate(&m, &uniform_superposition(3), 30.0, 1e-3, 1).unwrap();
        assert_eq!(rec.total_jumps() as usize, rec.jump_events.len());
        let mut prev = 0.0;
        for e in &rec.jump_events {
            assert!(e.time > prev && e.time <= 30.0);
            prev = e.time;
        }
        for node in 0..3 {
            let c = rec.jump_events.iter().filter(|e| e.dst == node).count() as u64;
            assert_eq!(c, rec.counts[node]);
        }
    }

    #[test]
    fn single_node_is_unit_rate_poisson() {
        let m = single();
        let rec = simulate(&m, &[Complex64::new(1.0, 0.0)], 2000.0, 1e-2, 3).unwrap();
        let rate = rec.counts[0] as f64 / 2000.0;
        // Poisson(2000) has sd ≈ 45, i.e. 0.022 in rate
        assert!((rate - 1.0).abs() < 0.07, "rate {rate}");
    }

    #[test]
    fn rejects_bad_input() {
        let m = single();
        assert!(simulate(&m, &[Complex64::new(2.0, 0.0)], 1.0, 1e-3, 0).is_err());
        assert!(simulate(&m, &[Complex64::new(1.0, 0.0)], 0.0, 1e-3, 0).is_err());
        assert!(simulate(&m, &uniform_superposition(2), 1.0, 1e-3, 0).is_err());
        assert!(ensemble_stats(&m, &InitialState::default(), 1.0, 1e-3, 0, 0).is_err());
    }

    #[test]
    fn single_trajectory_stats_have_no_variance() {
        let s = EnsembleStats::from_counts(&[vec![4, 6]], 2.0).unwrap();
        assert_eq!(s.mean_rate, vec![2.0, 3.0]);
        assert!(s.var_rate.is_none() && s.dispersion_hat.is_none());
    }

    #[test]
    fn stats_from_known_counts() {
        let s = EnsembleStats::from_counts(&[vec![1], vec![3], vec![5]], 1.0).unwrap();
        assert_eq!(s.mean_rate, vec![3.0]);
        assert_eq!(s.var_rate.unwrap(), vec![4.0]);
        assert!((s.dispersion_hat.unwrap()[0] - 4.0 / 3.0).abs() < 1e-15);
        assert!((s.standard_errors.unwrap()[0] - 2.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cholesky_components_rebuild_state() {
        let m = build_qsw(&parse_edge_list("0 1").unwrap(), 0.85, 1.0).unwrap();
        let rho = steady_state(&m).unwrap();
        let parts = pure_components(rho.matrix());
        let mut rebuilt = ComplexMatrix::zeros(2, 2);
        for (w, phi) in &parts {
            rebuilt = rebuilt.add(&ComplexMatrix::from_fn(2, 2, |i, j| {
                phi[i] * phi[j].conj() * *w
            }));
        }
        assert!(rebuilt.max_abs_diff(rho.matrix()) < 1e-14);
        assert!((parts.iter().map(|p| p.0).sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrated_theta_basics() {
        let m = single();
        let r = integrate_tilted(&m, &TiltVector::new(vec![1.0]).unwrap(), 10.0, 1e-3, 10).unwrap();
        assert!((r.theta - ((-1.0f64).exp() - 1.0)).abs() < 1e-6);
        let m2 = build_qsw(&parse_edge_list("0 1").unwrap(), 0.85, 1.0).unwrap();
        let zero = theta_by_integration(&m2, &TiltVector::zeros(2), 20.0, 1e-3).unwrap();
        assert!(zero.abs() < 1e-6);
    }
}
