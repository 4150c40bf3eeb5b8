// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Counting statistics of the walk: the tilted generator, the dynamical free
//! energy θ(s) as its leading eigenvalue, and the activity and dispersion
//! obtained from θ by central finite differences.
//!
//! A counting group collects the jumps whose counts share one tilt entry.
//! By default node `i` counts every jump landing on `i`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, inner, ComplexMatrix};
use crate::lindblad::{
    self, assemble, no_jump_generator, recycling_generator, QswModel, Superoperator,
};
use crate::report::{fmt_f64, fmt_opt};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Derivatives smaller than this leave the dispersion undefined.
pub const MIN_SLOPE: f64 = 1e-12;
/// Total activity below this leaves the normalized activity undefined.
pub const MIN_TOTAL_ACTIVITY: f64 = 1e-12;

/// How jumps are grouped into counting variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingScheme {
    /// One counter per destination node.
    #[default]
    PerNode,
    /// One counter per jump operator, in [`QswModel::jumps`] order.
    PerJump,
}

impl CountingScheme {
    pub fn group_count(self, model: &QswModel) -> usize {
        match self {
            CountingScheme::PerNode => model.n(),
            CountingScheme::PerJump => model.jump_count(),
        }
    }

    fn group_of(self, model: &QswModel, jump: usize) -> usize {
        match self {
            CountingScheme::PerNode => model.jumps()[jump].dst,
            CountingScheme::PerJump => jump,
        }
    }
}

/// Counting fields, one per counting group.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltVector(Vec<f64>);

impl TiltVector {
    pub fn new(s: Vec<f64>) -> Result<Self> {
        if s.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("tilt entries must be finite".into()));
        }
        Ok(Self(s))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn uniform(len: usize, s: f64) -> Self {
        Self(vec![s; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The common value if every entry is equal.
    pub fn uniform_value(&self) -> Option<f64> {
        let first = *self.0.first()?;
        self.0.iter().all(|&x| x == first).then_some(first)
    }

    fn shifted(&self, index: usize, by: f64) -> Self {
        let mut s = self.0.clone();
        s[index] += by;
        Self(s)
    }
}

/// The s → ±∞ limits of a uniform tilt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitMode {
    #[default]
    None,
    /// s → +∞: every recycling term dropped, leaving `H_eff` evolution.
    Inactive,
    /// s → −∞: recycling terms only, after factoring out `e^{-s}`.
    Active,
}

/// Tilted generators and θ for one model and counting scheme.
#[derive(Debug, Clone, Copy)]
pub struct Tilting<'a> {
    model: &'a QswModel,
    scheme: CountingScheme,
}

impl<'a> Tilting<'a> {
    pub fn new(model: &'a QswModel, scheme: CountingScheme) -> Self {
        Self { model, scheme }
    }

    pub fn per_node(model: &'a QswModel) -> Self {
        Self::new(model, CountingScheme::PerNode)
    }

    pub fn model(&self) -> &'a QswModel {
        self.model
    }

    pub fn group_count(&self) -> usize {
        self.scheme.group_count(self.model)
    }

    fn check(&self, s: &TiltVector) -> Result<()> {
        if s.len() != self.group_count() {
            return Err(Error::Shape(format!(
                "tilt of length {} for {} counting groups",
                s.len(),
                self.group_count()
            )));
        }
        Ok(())
    }

    /// Per-jump recycling weights `e^{-s_g}` for the group `g` of each jump.
    pub fn weights(&self, s: &TiltVector) -> Result<Vec<f64>> {
        self.check(s)?;
        Ok((0..self.model.jump_count())
            .map(|k| (-s.0[self.scheme.group_of(self.model, k)]).exp())
            .collect())
    }

    /// `W_s = L + Σ_g (e^{-s_g} - 1) Σ_{k∈g} L̄_k ⊗ L_k`.
    pub fn superoperator(&self, s: &TiltVector) -> Result<Superoperator> {
        assemble(self.model, &self.weights(s)?)
    }

    /// Recycling superoperator of a single counting group.
    pub fn group_recycling(&self, group: usize) -> Result<Superoperator> {
        let w: Vec<f64> = (0..self.model.jump_count())
            .map(|k| {
                if self.scheme.group_of(self.model, k) == group {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        recycling_generator(self.model, &w)
    }

    /// Largest real part of the spectrum of `W_s`.
    pub fn theta(&self, s: &TiltVector) -> Result<f64> {
        linalg::spectral_abscissa(self.superoperator(s)?.matrix())
    }

    /// Gap between the leading real part and the next distinct one.
    pub fn spectral_gap(&self, s: &TiltVector) -> Result<f64> {
        let spectrum = linalg::eigenvalues(self.superoperator(s)?.matrix())?;
        let lead = linalg::leading_index(&spectrum);
        let top = spectrum[lead].re;
        Ok(spectrum
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != lead)
            .map(|(_, z)| top - z.re)
            .fold(f64::INFINITY, f64::min))
    }

    /// `α_g = -∂θ/∂s_g` by central differences.
    pub fn activity(&self, s: &TiltVector, h: f64) -> Result<Vec<f64>> {
        check_step(h)?;
        self.check(s)?;
        (0..s.len())
            .map(|g| {
                let plus = self.theta(&s.shifted(g, h))?;
                let minus = self.theta(&s.shifted(g, -h))?;
                Ok(-(plus - minus) / (2.0 * h))
            })
            .collect()
    }

    /// Full thermodynamic record at `s`, including the step-halving check.
    pub fn point(&self, s: &TiltVector, h: f64) -> Result<ThermoPoint> {
        check_step(h)?;
        self.check(s)?;
        let theta = self.theta(s)?;
        let groups = s.len();
        let mut alpha = Vec::with_capacity(groups);
        let mut delta = Vec::with_capacity(groups);
        let mut fd_change: f64 = 0.0;
        for g in 0..groups {
            let plus = self.theta(&s.shifted(g, h))?;
            let minus = self.theta(&s.shifted(g, -h))?;
            let first = (plus - minus) / (2.0 * h);
            let second = (plus - 2.0 * theta + minus) / (h * h);
            alpha.push(-first);
            delta.push((first.abs() > MIN_SLOPE).then(|| -second / first));

            let plus_half = self.theta(&s.shifted(g, 0.5 * h))?;
            let minus_half = self.theta(&s.shifted(g, -0.5 * h))?;
            let alpha_half = -(plus_half - minus_half) / h;
            fd_change = fd_change.max((alpha_half + first).abs());
        }
        let delta_global = delta.iter().copied().sum::<Option<f64>>();
        let alpha_norm = normalized_activity(&alpha).ok();
        Ok(ThermoPoint {
            s: s.clone(),
            theta,
            alpha,
            alpha_norm,
            delta,
            delta_global,
            fd_change,
        })
    }
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!(
            "finite-difference step {h} must be positive"
        )));
    }
    Ok(())
}

/// θ, activity and dispersion at one tilt.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoPoint {
    pub s: TiltVector,
    /// Dynamical free energy, per unit time.
    pub theta: f64,
    /// Jumps per unit time into each counting group.
    pub alpha: Vec<f64>,
    /// `alpha / Σ alpha`, absent when the total vanishes.
    pub alpha_norm: Option<Vec<f64>>,
    /// Variance-to-mean ratio per group; absent where the mean vanishes.
    pub delta: Vec<Option<f64>>,
    /// `Σ delta`, absent if any component is.
    pub delta_global: Option<f64>,
    /// Largest change of any activity when the step is halved.
    pub fd_change: f64,
}

/// [`Tilting::superoperator`] with per-node counting.
pub fn tilted_superoperator(model: &QswModel, s: &TiltVector) -> Result<Superoperator> {
    Tilting::per_node(model).superoperator(s)
}

/// Dynamical free energy with per-node counting.
pub fn theta(model: &QswModel, s: &TiltVector) -> Result<f64> {
    Tilting::per_node(model).theta(s)
}

/// Per-node activity by central differences of θ.
pub fn activity(model: &QswModel, s: &TiltVector, h: f64) -> Result<Vec<f64>> {
    Tilting::per_node(model).activity(s, h)
}

/// Per-node index of dispersion `-∂²θ/∂θ` and its sum.
pub fn dispersion(
    model: &QswModel,
    s: &TiltVector,
    h: f64,
) -> Result<(Vec<Option<f64>>, Option<f64>)> {
    let p = Tilting::per_node(model).point(s, h)?;
    Ok((p.delta, p.delta_global))
}

/// `α_i(0) = Σ_j G_ij ρ_jj` from the steady state.
pub fn activity_via_steady_state(model: &QswModel) -> Result<Vec<f64>> {
    let rho = lindblad::steady_state(model)?;
    let pop = rho.populations();
    let g = model.google();
    Ok((0..model.n())
        .map(|i| (0..model.n()).map(|j| g.get(i, j) * pop[j]).sum())
        .collect())
}

/// `Tr[O_i ρ_ss]` with `O_i = Σ_j L_ij† L_ij`.
pub fn activity_via_observables(model: &QswModel) -> Result<Vec<f64>> {
    let rho = lindblad::steady_state(model)?;
    Ok((0..model.n())
        .map(|i| rho.expectation(&model.counting_observable(i)))
        .collect())
}

/// `α_i / Σ_j α_j`.
pub fn normalized_activity(alpha: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = alpha.iter().sum();
    if !(total > MIN_TOTAL_ACTIVITY) {
        return Err(Error::UndefinedNormalization(total));
    }
    Ok(alpha.iter().map(|a| a / total).collect())
}

/// Evaluates every grid point independently, in parallel, keeping input
/// order. Failures stay in place.
pub fn scan(model: &QswModel, grid: &[TiltVector], h: f64) -> Vec<Result<ThermoPoint>> {
    scan_with(Tilting::per_node(model), grid, h)
}

pub fn scan_with(tilting: Tilting<'_>, grid: &[TiltVector], h: f64) -> Vec<Result<ThermoPoint>> {
    grid.par_iter().map(|s| tilting.point(s, h)).collect()
}

/// `steps` equally spaced uniform tilts from `s_min` to `s_max`.
pub fn uniform_grid(len: usize, s_min: f64, s_max: f64, steps: usize) -> Result<Vec<TiltVector>> {
    if steps == 0 {
        return Err(Error::Domain("grid needs at least one point".into()));
    }
    if !s_min.is_finite() || !s_max.is_finite() {
        return Err(Error::Domain("grid bounds must be finite".into()));
    }
    if steps == 1 {
        return Ok(vec![TiltVector::uniform(len, s_min)]);
    }
    let step = (s_max - s_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            let s = if k == steps - 1 {
                s_max
            } else {
                s_min + step * k as f64
            };
            TiltVector::uniform(len, s)
        })
        .collect())
}

/// Generator for a limit mode; `None` gives the Liouvillian.
pub fn limit_generator(model: &QswModel, mode: LimitMode) -> Superoperator {
    match mode {
        LimitMode::None => lindblad::liouvillian(model),
        LimitMode::Inactive => no_jump_generator(model),
        LimitMode::Active => {
            recycling_generator(model, &vec![1.0; model.jump_count()]).expect("weights match jumps")
        }
    }
}

/// Leading behaviour in a limit mode.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPoint {
    pub mode: LimitMode,
    /// Inactive: θ itself. Active: the coefficient `μ` in `θ ≈ μ e^{-s}`.
    pub leading_rate: f64,
    /// Inactive: identically zero. Active: diverges, so absent.
    pub alpha: Option<Vec<f64>>,
    /// Active: limiting share of jumps per node. Inactive: undefined.
    pub alpha_norm: Option<Vec<f64>>,
}

/// Evaluates the s → ±∞ limits without forming `e^{-s}`.
pub fn limit_point(model: &QswModel, mode: LimitMode) -> Result<LimitPoint> {
    let gen = limit_generator(model, mode);
    let spectrum = linalg::eigenvalues(gen.matrix())?;
    let lead = spectrum[linalg::leading_index(&spectrum)];
    match mode {
        LimitMode::None => Ok(LimitPoint {
            mode,
            leading_rate: lead.re,
            alpha: None,
            alpha_norm: None,
        }),
        LimitMode::Inactive => Ok(LimitPoint {
            mode,
            leading_rate: lead.re,
            alpha: Some(vec![0.0; model.n()]),
            alpha_norm: None,
        }),
        LimitMode::Active => {
            // θ ≈ e^{-s} μ(J); ∂μ/∂(weight of group i) = wᴴ J_i v / wᴴ v
            let m = gen.matrix();
            let v = linalg::eigenvector(m, lead)?;
            let w = linalg::eigenvector(&m.adjoint(), lead.conj())?;
            let denom = inner(&w, &v);
            let tilting = Tilting::per_node(model);
            let shares = (0..model.n())
                .map(|i| {
                    let ji = tilting.group_recycling(i)?;
                    Ok((inner(&w, &ji.matrix().mul_vec(&v)) / denom).re)
                })
                .collect::<Result<Vec<f64>>>()?;
            let alpha_norm = normalized_activity(&shares)?;
            Ok(LimitPoint {
                mode,
                leading_rate: lead.re,
                alpha: None,
                alpha_norm: Some(alpha_norm),
            })
        }
    }
}

/// Location of the largest global dispersion on a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    pub index: usize,
    pub delta_global: f64,
    /// Strictly above both neighbours and not at either end of the grid.
    pub interior: bool,
}

pub fn crossover(points: &[Result<ThermoPoint>]) -> Option<Crossover> {
    let values: Vec<Option<f64>> = points
        .iter()
        .map(|p| p.as_ref().ok().and_then(|p| p.delta_global))
        .collect();
    let (index, best) = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    let interior = index > 0
        && index + 1 < values.len()
        && matches!(values[index - 1], Some(v) if v < best)
        && matches!(values[index + 1], Some(v) if v < best);
    Some(Crossover {
        index,
        delta_global: best,
        interior,
    })
}

/// Drift of the normalized activity over the first and last grid intervals,
/// each relative to the end-to-end change. Small values at both ends mean the
/// scan has reached the two plateaus. `None` if an end point is missing or the
/// two ends coincide.
pub fn plateau_drift(points: &[Result<ThermoPoint>]) -> Option<(f64, f64)> {
    let norm = |i: usize| points.get(i)?.as_ref().ok()?.alpha_norm.clone();
    let k = points.len();
    if k < 3 {
        return None;
    }
    let dist = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let (first, second, penult, last) = (norm(0)?, norm(1)?, norm(k - 2)?, norm(k - 1)?);
    let span = dist(&first, &last);
    if span == 0.0 {
        return None;
    }
    Some((dist(&first, &second) / span, dist(&penult, &last) / span))
}

/// Writes a scan as CSV: `s` (or `s_1..s_k` for non-uniform grids), `theta`,
/// `alpha_*`, `alpha_norm_*`, `delta_*`, `delta_global`, `error`.
pub fn write_scan_csv<W: Write>(
    groups: usize,
    grid: &[TiltVector],
    points: &[Result<ThermoPoint>],
    extra: &[(String, LimitPoint)],
    out: W,
) -> Result<()> {
    let uniform = grid.iter().all(|s| s.uniform_value().is_some());
    let mut header: Vec<String> = if uniform {
        vec!["s".into()]
    } else {
        (1..=groups).map(|i| format!("s_{i}")).collect()
    };
    header.push("theta".into());
    for prefix in ["alpha", "alpha_norm", "delta"] {
        header.extend((1..=groups).map(|i| format!("{prefix}_{i}")));
    }
    header.push("delta_global".into());
    header.push("error".into());

    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header)?;
    for (s, point) in grid.iter().zip(points) {
        let mut row: Vec<String> = if uniform {
            vec![fmt_f64(s.as_slice()[0])]
        } else {
            s.as_slice().iter().map(|&x| fmt_f64(x)).collect()
        };
        match point {
            Ok(p) => {
                row.push(fmt_f64(p.theta));
                row.extend(p.alpha.iter().map(|&a| fmt_f64(a)));
                match &p.alpha_norm {
                    Some(an) => row.extend(an.iter().map(|&a| fmt_f64(a))),
                    None => row.extend(std::iter::repeat_n(String::new(), groups)),
                }
                row.extend(p.delta.iter().map(|&d| fmt_opt(d)));
                row.push(fmt_opt(p.delta_global));
                row.push(String::new());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 3 * groups + 2));
                row.push(e.to_string());
            }
        }
        w.write_record(&row)?;
    }
    for (label, lp) in extra {
        let mut row = vec![label.clone()];
        if !uniform {
            row.extend(std::iter::repeat_n(label.clone(), groups - 1));
        }
        row.push(match lp.mode {
            LimitMode::Active => String::new(),
            _ => fmt_f64(lp.leading_rate),
        });
        match &lp.alpha {
            Some(a) => row.extend(a.iter().map(|&x| fmt_f64(x))),
            None => row.extend(std::iter::repeat_n(String::new(), groups)),
        }
        match &lp.alpha_norm {
            Some(a) => row.extend(a.iter().map(|&x| fmt_f64(x))),
            None => row.extend(std::iter::repeat_n(String::new(), groups)),
        }
        row.extend(std::iter::repeat_n(String::new(), groups + 1));
        row.push(String::new());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Restriction of `W_s` to diagonal operators: the classical tilted
/// generator, entry `(i, j)` = `W_s[(i,i),(j,j)]`.
pub fn diagonal_restriction(w: &Superoperator) -> ComplexMatrix {
    let n = (w.dim() as f64).sqrt().round() as usize;
    ComplexMatrix::from_fn(n, n, |i, j| w.matrix()[(i + n * i, j + n * j)])
}
