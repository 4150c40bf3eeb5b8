// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! General complex eigenproblem: Householder reduction to Hessenberg form,
//! single-shift QR with Wilkinson shifts on the active window, then inverse
//! iteration for the eigenvector of a selected eigenvalue.

use num_complex::Complex64;

use super::matrix::{inner, norm2, ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues whose real parts differ by less than this count as tied.
pub const REAL_PART_TIE: f64 = 1e-10;
const ITERATIONS_PER_DIM: usize = 100;

/// Leading eigenpair (largest real part) with the optional full spectrum.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub leading_eigenvalue: Complex64,
    pub leading_right_eigenvector: Vec<Complex64>,
    pub full_spectrum: Option<Vec<Complex64>>,
}

/// All eigenvalues plus the leading right eigenvector, unit 2-norm.
pub fn eig_general(m: &ComplexMatrix) -> Result<SpectralResult> {
    let spectrum = eigenvalues(m)?;
    let lead = spectrum[leading_index(&spectrum)];
    let v = eigenvector(m, lead)?;
    Ok(SpectralResult {
        leading_eigenvalue: lead,
        leading_right_eigenvector: v,
        full_spectrum: Some(spectrum),
    })
}

/// Index of the eigenvalue with the largest real part; near-ties go to the
/// one with the smallest imaginary magnitude.
pub fn leading_index(spectrum: &[Complex64]) -> usize {
    let max_re = spectrum
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    spectrum
        .iter()
        .enumerate()
        .filter(|(_, z)| max_re - z.re < REAL_PART_TIE)
        .min_by(|(_, a), (_, b)| {
            a.im.abs()
                .total_cmp(&b.im.abs())
                .then(b.re.total_cmp(&a.re))
        })
        .map(|(i, _)| i)
        .expect("non-empty spectrum")
}

/// Largest real part of the spectrum.
pub fn spectral_abscissa(m: &ComplexMatrix) -> Result<f64> {
    let spectrum = eigenvalues(m)?;
    Ok(spectrum[leading_index(&spectrum)].re)
}

/// Every eigenvalue of a square matrix, in no particular order.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    check_square_finite(m)?;
    let n = m.rows();
    if n == 0 {
        return Err(Error::Shape("empty matrix".into()));
    }
    let mut h = m.clone();
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

fn check_square_finite(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "{}x{} matrix is not square",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::Divergence("in eigensolver input".into()));
    }
    Ok(())
}

/// In-place unitary similarity to upper Hessenberg form.
fn reduce_to_hessenberg(h: &mut ComplexMatrix) {
    let n = h.rows();
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k + 1..n] {
            *vi /= vnorm;
        }
        // H <- (I - 2vv†) H
        for j in 0..n {
            let dot: Complex64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            let dot = dot * 2.0;
            for i in k + 1..n {
                h[(i, j)] -= v[i] * dot;
            }
        }
        // H <- H (I - 2vv†)
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j]).sum();
            let dot = dot * 2.0;
            for j in k + 1..n {
                h[(i, j)] -= dot * v[j].conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

fn l1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Eigenvalues of an upper Hessenberg matrix; `h` is overwritten.
fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut eig = vec![ZERO; n];
    let cap = ITERATIONS_PER_DIM * n;
    let scale = h.frobenius_norm();
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;
    let mut rot = Vec::with_capacity(n);

    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // find the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let mut s = l1(h[(lo, lo)]) + l1(h[(lo - 1, lo - 1)]);
            if s == 0.0 {
                s = scale;
            }
            if l1(h[(lo, lo - 1)]) <= f64::EPSILON * s {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::Eigensolver { iterations: total });
        }

        let mu = if since_deflation.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75, 0.75) * l1(h[(hi, hi - 1)])
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        // QR by Givens rotations on the window
        rot.clear();
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (ONE, ZERO)
            } else {
                (x / r, y / r)
            };
            for j in k..=hi {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = c.conj() * a + s.conj() * b;
                h[(k + 1, j)] = -s * a + c * b;
            }
            rot.push((c, s));
        }
        // RQ
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 1).min(hi) {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s;
                h[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}

/// Eigenvalue of the trailing 2x2 block closer to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Exactly-zero pivots are replaced with `pivot_floor` so that
    /// nearly singular shifted systems remain solvable.
    pub fn factor(m: &ComplexMatrix, pivot_floor: f64) -> Result<Self> {
        check_square_finite(m)?;
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| lu[(a, k)].norm().total_cmp(&lu[(b, k)].norm()))
                .unwrap();
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            if lu[(k, k)].norm() == 0.0 {
                lu[(k, k)] = Complex64::new(pivot_floor, 0.0);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn determinant(&self) -> Complex64 {
        let d: Complex64 = (0..self.lu.rows()).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }
}

/// Unit right eigenvector for an (approximate) eigenvalue, by inverse iteration.
pub fn eigenvector(m: &ComplexMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    check_square_finite(m)?;
    let n = m.rows();
    let norm = match m.frobenius_norm() {
        x if x > 0.0 => x,
        _ => 1.0,
    };
    let mut shifted = m.clone();
    for i in 0..n {
        shifted[(i, i)] -= lambda;
    }
    let lu = Lu::factor(&shifted, f64::EPSILON * norm)?;
    // deterministic start with no special alignment to any basis vector
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            Complex64::new(
                1.0 + 0.37 * ((i * 7 + 3) % 11) as f64,
                0.21 * ((i * 5 + 1) % 7) as f64,
            )
        })
        .collect();
    let target = 1e-10 * norm;
    let mut best = (f64::INFINITY, v.clone());
    for _ in 0..8 {
        let mut w = lu.solve(&v);
        let wn = norm2(&w);
        if !wn.is_finite() || wn == 0.0 {
            break;
        }
        for z in &mut w {
            *z /= wn;
        }
        v = w;
        let mv = m.mul_vec(&v);
        let res = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if res < best.0 {
            best = (res, v.clone());
        }
        if res <= target {
            break;
        }
    }
    if !best.0.is_finite() {
        return Err(Error::Divergence("in inverse iteration".into()));
    }
    Ok(best.1)
}

/// Kernel vector of a matrix whose zero eigenvalue is simple.
///
/// Fails with [`Error::Degenerate`] unless exactly one eigenvalue lies
/// within `tol` of zero.
pub fn null_vector(m: &ComplexMatrix, tol: f64) -> Result<Vec<Complex64>> {
    let spectrum = eigenvalues(m)?;
    let count = spectrum.iter().filter(|z| z.norm() <= tol).count();
    if count != 1 {
        return Err(Error::Degenerate { count, tol });
    }
    let nearest = spectrum
        .iter()
        .copied()
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let v = eigenvector(m, nearest)?;
    let residual = norm2(&m.mul_vec(&v));
    if residual > tol * m.frobenius_norm().max(1.0) {
        return Err(Error::Convergence {
            iterations: 8,
            residual,
        });
    }
    Ok(v)
}

/// `wᴴ M v / wᴴ v` with `w` the left eigenvector, for refining a simple eigenvalue.
pub fn rayleigh_refine(m: &ComplexMatrix, lambda: Complex64) -> Result<Complex64> {
    let v = eigenvector(m, lambda)?;
    let w = eigenvector(&m.adjoint(), lambda.conj())?;
    let denom = inner(&w, &v);
    if denom.norm() < 1e-300 {
        return Ok(lambda);
    }
    Ok(inner(&w, &m.mul_vec(&v)) / denom)
}
