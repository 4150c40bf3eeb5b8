// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! The Google-matrix quantum stochastic walk: model assembly, Liouvillian
//! superoperator, steady state, and time evolution of density matrices.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{
    google_matrix, symmetrized_adjacency, DirectedGraph, RealMatrix, StochasticMatrix,
};
use crate::linalg::{self, kron, unvec, vec, ComplexMatrix, ONE};

/// Residual/eigenvalue tolerance for the Liouvillian kernel.
pub const STEADY_STATE_TOL: f64 = 1e-8;

/// Jump operator `amplitude * |dst⟩⟨src|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub dst: usize,
    pub src: usize,
    pub amplitude: f64,
}

impl Jump {
    pub fn rate(&self) -> f64 {
        self.amplitude * self.amplitude
    }

    pub fn matrix(&self, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(self.dst, self.src)] = Complex64::new(self.amplitude, 0.0);
        m
    }
}

/// Hamiltonian, jump operators and the Google matrix they came from.
#[derive(Debug, Clone)]
pub struct QswModel {
    n: usize,
    hamiltonian: RealMatrix,
    jumps: Vec<Jump>,
    google: StochasticMatrix,
    damping: f64,
    coherent_weight: f64,
}

/// Builds the walk with `H = coherent_weight * A_sym` and one jump
/// `√G_ij |i⟩⟨j|` for every strictly positive Google-matrix entry.
pub fn build_qsw(g: &DirectedGraph, damping: f64, coherent_weight: f64) -> Result<QswModel> {
    if !(coherent_weight >= 0.0) || !coherent_weight.is_finite() {
        return Err(Error::Domain(format!(
            "coherent weight {coherent_weight} must be finite and >= 0"
        )));
    }
    let google = google_matrix(g, damping)?;
    let hamiltonian = symmetrized_adjacency(g).scaled(coherent_weight);
    let n = g.n();
    let mut jumps = Vec::with_capacity(n * n);
    for src in 0..n {
        for dst in 0..n {
            let rate = google.get(dst, src);
            if rate > 0.0 {
                jumps.push(Jump {
                    dst,
                    src,
                    amplitude: rate.sqrt(),
                });
            }
        }
    }
    let model = QswModel {
        n,
        hamiltonian,
        jumps,
        google,
        damping,
        coherent_weight,
    };
    model.check()?;
    Ok(model)
}

impl QswModel {
    fn check(&self) -> Result<()> {
        if self.hamiltonian != self.hamiltonian.transpose() {
            return Err(Error::Model("Hamiltonian is not symmetric".into()));
        }
        let mut outflow = vec![0.0; self.n];
        for j in &self.jumps {
            if !(j.amplitude > 0.0) {
                return Err(Error::Model(format!(
                    "jump {j:?} has non-positive amplitude"
                )));
            }
            outflow[j.src] += j.rate();
        }
        if let Some((src, total)) = outflow
            .iter()
            .enumerate()
            .find(|(_, t)| (*t - 1.0).abs() > 1e-12)
        {
            return Err(Error::Model(format!(
                "jump rates out of node {src} sum to {total}"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self) -> &RealMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// Number of jump operators.
    pub fn jump_count(&self) -> usize {
        self.jumps.len()
    }

    pub fn google(&self) -> &StochasticMatrix {
        &self.google
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn coherent_weight(&self) -> f64 {
        self.coherent_weight
    }

    pub fn hamiltonian_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_real(&self.hamiltonian)
    }

    /// `Σ_k L_k† L_k`
    pub fn decay_operator(&self) -> ComplexMatrix {
        let mut o = ComplexMatrix::zeros(self.n, self.n);
        for j in &self.jumps {
            o[(j.src, j.src)] += Complex64::new(j.rate(), 0.0);
        }
        o
    }

    /// `H - (i/2) Σ_k L_k† L_k`
    pub fn effective_hamiltonian(&self) -> ComplexMatrix {
        self.hamiltonian_complex()
            .add(&self.decay_operator().scale(Complex64::new(0.0, -0.5)))
    }

    /// `O_i = Σ_j L_ij† L_ij`, the rate observable of jumps landing on `node`.
    pub fn counting_observable(&self, node: usize) -> ComplexMatrix {
        let mut o = ComplexMatrix::zeros(self.n, self.n);
        for j in self.jumps.iter().filter(|j| j.dst == node) {
            o[(j.src, j.src)] += Complex64::new(j.rate(), 0.0);
        }
        o
    }
}

/// Unit-trace Hermitian positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Checks Hermiticity and trace to 1e-10 and eigenvalues to -1e-8.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("density matrix must be square".into()));
        }
        let herm = m.hermiticity_defect();
        if herm > 1e-10 {
            return Err(Error::Domain(format!("not Hermitian (defect {herm:e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::Domain(format!("trace {tr} is not 1")));
        }
        let rho = Self(m);
        let min = rho.min_eigenvalue()?;
        if min < -1e-8 {
            return Err(Error::Domain(format!("negative eigenvalue {min:e}")));
        }
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2 = linalg::norm2(psi).powi(2);
        if !(norm2 > 0.0) {
            return Err(Error::Domain("zero state vector".into()));
        }
        let n = psi.len();
        Ok(Self(ComplexMatrix::from_fn(n, n, |i, j| {
            psi[i] * psi[j].conj() / norm2
        })))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self(ComplexMatrix::identity(n).scale(Complex64::new(1.0 / n as f64, 0.0)))
    }

    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diagonal(
            &p.iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect::<Vec<_>>(),
        ))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.0[(i, i)].re).collect()
    }

    /// `Tr[O ρ]`, real part.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        op.matmul(&self.0).trace().re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let herm = self
            .0
            .add(&self.0.adjoint())
            .scale(Complex64::new(0.5, 0.0));
        Ok(linalg::eigenvalues(&herm)?
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.0.write_csv(out)
    }
}

/// Linear map on column-stacked `n x n` operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator(ComplexMatrix);

impl Superoperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("superoperator must be square".into()));
        }
        if !m.is_finite() {
            return Err(Error::Divergence("in superoperator".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Dimension `n²` of the vectorized space.
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        unvec(&self.0.mul_vec(&vec(rho)?))
    }

    /// Largest entry of `vec(I)† S`; zero for trace-preserving generators.
    pub fn trace_defect(&self) -> f64 {
        let n = (self.dim() as f64).sqrt().round() as usize;
        (0..self.dim())
            .map(|col| {
                (0..n)
                    .map(|i| self.0[(i + n * i, col)])
                    .sum::<Complex64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.0.write_csv(out)
    }
}

/// `-i(I⊗H - Hᵀ⊗I) - ½(I⊗D + Dᵀ⊗I)` with `D = Σ L†L`: the generator
/// of no-jump evolution under `H_eff`.
pub fn no_jump_generator(model: &QswModel) -> Superoperator {
    let n = model.n;
    let id = ComplexMatrix::identity(n);
    let h = model.hamiltonian_complex();
    let d = model.decay_operator();
    let minus_i = Complex64::new(0.0, -1.0);
    let half = Complex64::new(-0.5, 0.0);
    // sizes are bounded by n², far from overflow for any graph we can store
    let mut m = kron(&id, &h).expect("kron").scale(minus_i);
    m.add_scaled(-minus_i, &kron(&h.transpose(), &id).expect("kron"));
    m.add_scaled(half, &kron(&id, &d).expect("kron"));
    m.add_scaled(half, &kron(&d.transpose(), &id).expect("kron"));
    Superoperator(m)
}

/// No-jump part plus `Σ_k weights[k] · (L̄_k ⊗ L_k)`; a weight of 1 on every
/// jump gives the Liouvillian.
pub fn assemble(model: &QswModel, weights: &[f64]) -> Result<Superoperator> {
    if weights.len() != model.jumps.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} jumps",
            weights.len(),
            model.jumps.len()
        )));
    }
    let mut m = no_jump_generator(model).into_matrix();
    add_recycling(model, weights, &mut m);
    Superoperator::new(m)
}

/// `Σ_k weights[k] · (L̄_k ⊗ L_k)` alone.
pub fn recycling_generator(model: &QswModel, weights: &[f64]) -> Result<Superoperator> {
    if weights.len() != model.jumps.len() {
        return Err(Error::Shape("weight count differs from jump count".into()));
    }
    let mut m = ComplexMatrix::zeros(model.n * model.n, model.n * model.n);
    add_recycling(model, weights, &mut m);
    Superoperator::new(m)
}

fn add_recycling(model: &QswModel, weights: &[f64], m: &mut ComplexMatrix) {
    let n = model.n;
    // L̄⊗L for L = a|i⟩⟨j| has the single entry a² at ((i,i), (j,j))
    for (jump, &w) in model.jumps.iter().zip(weights) {
        let row = jump.dst + n * jump.dst;
        let col = jump.src + n * jump.src;
        m[(row, col)] += Complex64::new(w * jump.rate(), 0.0);
    }
}

/// Lindblad generator of the model.
pub fn liouvillian(model: &QswModel) -> Superoperator {
    assemble(model, &vec![1.0; model.jumps.len()]).expect("weights match jumps")
}

/// Unique stationary state, from the kernel of the Liouvillian.
pub fn steady_state(model: &QswModel) -> Result<DensityMatrix> {
    let l = liouvillian(model);
    let v = linalg::null_vector(l.matrix(), STEADY_STATE_TOL)?;
    let raw = unvec(&v)?;
    let tr = raw.trace();
    if tr.norm() < 1e-300 {
        return Err(Error::Model("kernel vector has zero trace".into()));
    }
    let rho = raw.scale(ONE / tr);
    let rho = rho.add(&rho.adjoint()).scale(Complex64::new(0.5, 0.0));
    let tr = rho.trace().re;
    let rho = rho.scale(Complex64::new(1.0 / tr, 0.0));
    DensityMatrix::new(rho)
}

/// Integrates the master equation from `rho0` for time `t`.
pub fn evolve(model: &QswModel, rho0: &DensityMatrix, t: f64, dt: f64) -> Result<DensityMatrix> {
    if rho0.n() != model.n {
        return Err(Error::Shape(format!(
            "{}-level state for a {}-node model",
            rho0.n(),
            model.n
        )));
    }
    let l = liouvillian(model);
    let v = linalg::integrate_linear(l.matrix(), &vec(rho0.matrix())?, t, dt)?;
    Ok(DensityMatrix::from_matrix_unchecked(unvec(&v)?))
}

/// Direct commutator/anticommutator evaluation of the master-equation
/// right-hand side, independent of the vectorized form.
pub fn lindblad_rhs(model: &QswModel, rho: &ComplexMatrix) -> ComplexMatrix {
    let n = model.n;
    let h = model.hamiltonian_complex();
    let comm = h.matmul(rho).sub(&rho.matmul(&h));
    let mut out = comm.scale(Complex64::new(0.0, -1.0));
    for jump in &model.jumps {
        let l = jump.matrix(n);
        let ld = l.adjoint();
        let ldl = ld.matmul(&l);
        out = out.add(&l.matmul(rho).matmul(&ld));
        let anti = ldl.matmul(rho).add(&rho.matmul(&ldl));
        out.add_scaled(Complex64::new(-0.5, 0.0), &anti);
    }
    out
}
