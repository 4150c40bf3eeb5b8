// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE};
use crate::error::{Error, Result};

/// Number of equal steps of size at most `dt` covering `[0, t]`.
pub(crate) fn step_count(t: f64, dt: f64) -> usize {
    if t <= 0.0 {
        return 0;
    }
    let raw = t / dt;
    let rounded = raw.round();
    // avoid an extra sliver step when t is a multiple of dt up to rounding
    if (raw - rounded).abs() <= 1e-9 * raw.max(1.0) {
        rounded.max(1.0) as usize
    } else {
        raw.ceil() as usize
    }
}

fn check_args(t: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("step {dt} must be positive")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time {t} must be non-negative")));
    }
    Ok(())
}

/// Classical RK4 on `v' = M v` from 0 to `t` with steps no longer than `dt`.
pub fn integrate_linear(
    m: &ComplexMatrix,
    v0: &[Complex64],
    t: f64,
    dt: f64,
) -> Result<Vec<Complex64>> {
    check_args(t, dt)?;
    if !m.is_square() || m.cols() != v0.len() {
        return Err(Error::Shape(format!(
            "{}x{} generator with a vector of length {}",
            m.rows(),
            m.cols(),
            v0.len()
        )));
    }
    let steps = step_count(t, dt);
    let mut v = v0.to_vec();
    if steps == 0 {
        return Ok(v);
    }
    let h = t / steps as f64;
    let mut stepper = Rk4::new(v.len());
    for _ in 0..steps {
        stepper.step(m, &mut v, h);
        if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Divergence("during linear integration".into()));
        }
    }
    Ok(v)
}

/// Scratch buffers for repeated RK4 steps of a linear system.
pub(crate) struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub(crate) fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    pub(crate) fn step(&mut self, m: &ComplexMatrix, v: &mut [Complex64], h: f64) {
        m.mul_vec_into(v, &mut self.k1);
        for i in 0..v.len() {
            self.tmp[i] = v[i] + self.k1[i] * (0.5 * h);
        }
        m.mul_vec_into(&self.tmp, &mut self.k2);
        for i in 0..v.len() {
            self.tmp[i] = v[i] + self.k2[i] * (0.5 * h);
        }
        m.mul_vec_into(&self.tmp, &mut self.k3);
        for i in 0..v.len() {
            self.tmp[i] = v[i] + self.k3[i] * h;
        }
        m.mul_vec_into(&self.tmp, &mut self.k4);
        for i in 0..v.len() {
            v[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * (h / 6.0);
        }
    }
}

/// One RK4 step of `v' = M v` as an explicit matrix:
/// `I + hM + (hM)²/2 + (hM)³/6 + (hM)⁴/24`.
pub fn rk4_step_matrix(m: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let n = m.rows();
    let hm = m.scale(Complex64::new(h, 0.0));
    let id = ComplexMatrix::identity(n);
    // Horner: I + hM (I + hM/2 (I + hM/3 (I + hM/4)))
    let mut acc = id.add(&hm.scale(Complex64::new(0.25, 0.0)));
    for k in [3.0, 2.0] {
        acc = id.add(&hm.matmul(&acc).scale(ONE / k));
    }
    id.add(&hm.matmul(&acc))
}
