// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex kernels: Kronecker products, column-stacking vectorization,
//! the general eigenproblem, and fixed-step linear integration.
//!
//! Vectorization stacks columns, so `vec(ρ)[i + n*j] = ρ[(i, j)]` and
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

mod eigen;
mod matrix;
mod ode;

use num_complex::Complex64;

pub use eigen::{
    eig_general, eigenvalues, eigenvector, leading_index, null_vector, rayleigh_refine,
    spectral_abscissa, Lu, SpectralResult, REAL_PART_TIE,
};
pub use matrix::{inner, norm2, ComplexMatrix};
pub(crate) use matrix::{ONE, ZERO};
pub use ode::{integrate_linear, rk4_step_matrix};
pub(crate) use ode::{step_count, Rk4};

use crate::error::{Error, Result};

/// Kronecker product `A ⊗ B`. Zero entries of `A` are skipped.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r.checked_mul(c).is_some() => (r, c),
        _ => return Err(Error::Size("Kronecker product dimensions overflow".into())),
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let x = a[(ia, ja)];
            if x == ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                let r = ia * b.rows() + ib;
                for jb in 0..b.cols() {
                    out[(r, ja * b.cols() + jb)] = x * b[(ib, jb)];
                }
            }
        }
    }
    Ok(out)
}

/// Column-stacking vectorization of a square matrix.
pub fn vec(rho: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !rho.is_square() {
        return Err(Error::Shape(format!(
            "vec of a {}x{} matrix",
            rho.rows(),
            rho.cols()
        )));
    }
    let n = rho.rows();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(rho[(i, j)]);
        }
    }
    Ok(v)
}

/// Inverse of [`vec`].
pub fn unvec(v: &[Complex64]) -> Result<ComplexMatrix> {
    let n = (v.len() as f64).sqrt().round() as usize;
    if n * n != v.len() || n == 0 {
        return Err(Error::Shape(format!(
            "length {} is not a positive square",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| v[i + n * j]))
}
