// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numeric formatting shared by every CSV writer.

use num_complex::Complex64;

/// 17 significant digits; parses back to the identical `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Empty field for absent values.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn fmt_complex(z: Complex64) -> String {
    let im = fmt_f64(z.im);
    if im.starts_with('-') {
        format!("{}{}i", fmt_f64(z.re), im)
    } else {
        format!("{}+{}i", fmt_f64(z.re), im)
    }
}
