use alloc::vec;
use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

/// Whether the initial term `|a_{N_0}|^r` enters the variation sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariationMode {
    WithInitial,
    Oscillation,
}

pub(crate) fn check_exponent(name: &'static str, r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        Err(Error::Exponent { name, value: r })
    } else {
        Ok(())
    }
}

/// Supremum over increasing index chains, `O(M^2)`.
///
/// When the optimal chain has a single nonzero term the modulus of that term is
/// returned directly rather than `(|t|^r)^{1/r}`, so one-jump sequences are exact.
pub(crate) fn variation_dp(
    len: usize,
    seed: impl Fn(usize) -> f64,
    dist: impl Fn(usize, usize) -> f64,
    r: f64,
    mode: VariationMode,
) -> f64 {
    if r.is_infinite() {
        return match mode {
            VariationMode::WithInitial => (0..len).map(&seed).fold(0.0, f64::max),
            VariationMode::Oscillation => {
                let mut best = 0.0f64;
                for i in 0..len {
                    for j in 0..i {
                        best = best.max(dist(i, j));
                    }
                }
                best
            }
        };
    }
    // (sum, number of nonzero terms, modulus of the term when there is only one)
    let mut best = vec![(0.0f64, 0u32, 0.0f64); len];
    let mut top = (0.0f64, 0u32, 0.0f64);
    for i in 0..len {
        let mut cur = match mode {
            VariationMode::WithInitial => {
                let m = seed(i);
                if m > 0.0 {
                    (math::pow_abs(m, r), 1, m)
                } else {
                    (0.0, 0, 0.0)
                }
            }
            VariationMode::Oscillation => (0.0, 0, 0.0),
        };
        for j in 0..i {
            let d = dist(i, j);
            if d == 0.0 {
                continue;
            }
            let prev = best[j];
            let cand = prev.0 + math::pow_abs(d, r);
            if cand > cur.0 {
                cur = (cand, prev.1 + 1, if prev.1 == 0 { d } else { 0.0 });
            }
        }
        best[i] = cur;
        if cur.0 > top.0 {
            top = cur;
        }
    }
    match top.1 {
        0 => 0.0,
        1 => top.2,
        _ if r == 1.0 => top.0,
        _ if r == 2.0 => math::sqrt(top.0),
        _ => math::powf(top.0, 1.0 / r),
    }
}

/// `r`-variation norm of a complex sequence.
pub fn variation_norm(a: &[Complex64], r: f64, mode: VariationMode) -> Result<f64> {
    check_exponent("r", r)?;
    if a.is_empty() {
        return Err(Error::Empty);
    }
    Ok(variation_dp(a.len(), |i| math::abs(a[i]), |i, j| math::abs(a[i] - a[j]), r, mode))
}

/// `r`-variation norm of a real sequence.
pub fn variation_norm_real(a: &[f64], r: f64, mode: VariationMode) -> Result<f64> {
    check_exponent("r", r)?;
    if a.is_empty() {
        return Err(Error::Empty);
    }
    Ok(variation_dp(a.len(), |i| a[i].abs(), |i, j| (a[i] - a[j]).abs(), r, mode))
}
