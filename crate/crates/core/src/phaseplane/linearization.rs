use alloc::vec::Vec;
use num_complex::Complex64;
use rand::Rng;

use super::FreqInterval;
use crate::math;
use crate::{Error, Result};

/// Stopping data at one grid point: thresholds `N_0 < ... < N_K` and
/// coefficients `d_1, ..., d_K`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinPoint {
    pub thresholds: Vec<f64>,
    pub coeffs: Vec<Complex64>,
}

impl LinPoint {
    pub fn k(&self) -> usize {
        self.coeffs.len()
    }
}

/// Per-point frequency stopping sequences with `l^{r'}`-normalised coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Linearization {
    r: f64,
    points: Vec<LinPoint>,
}

impl Linearization {
    pub fn new(r: f64, points: Vec<LinPoint>) -> Result<Self> {
        if r.is_nan() || r <= 1.0 {
            return Err(Error::Exponent { name: "r", value: r });
        }
        let rc = math::conjugate_exponent(r);
        for p in &points {
            let ok_len = p.thresholds.len() == p.coeffs.len() + 1 || (p.thresholds.is_empty() && p.coeffs.is_empty());
            if !ok_len {
                return Err(Error::InvalidParameter { name: "linearization", reason: "need K + 1 thresholds for K coefficients" });
            }
            if p.thresholds.iter().any(|t| !t.is_finite()) || p.thresholds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter { name: "linearization", reason: "thresholds must increase strictly" });
            }
            if !p.coeffs.is_empty() {
                let s: f64 = p.coeffs.iter().map(|&d| math::pow_abs(math::abs(d), rc)).sum();
                if (s - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter { name: "linearization", reason: "coefficients not normalised in l^{r'}" });
                }
            }
        }
        Ok(Self { r, points })
    }

    /// `K(x) = 0` everywhere.
    pub fn empty(n: usize, r: f64) -> Result<Self> {
        Self::new(r, alloc::vec![LinPoint::default(); n])
    }

    /// Seeded generator: `K(x)` uniform in `0..=4`, thresholds distinct
    /// half-integers `m + 1/2` with `m` in `lo..hi`, complex coefficients normalised in `l^{r'}`.
    pub fn random<R: Rng + ?Sized>(n: usize, r: f64, lo: i64, hi: i64, rng: &mut R) -> Result<Self> {
        if hi - lo < 5 {
            return Err(Error::InvalidParameter { name: "threshold range", reason: "needs at least five half-integers" });
        }
        let rc = math::conjugate_exponent(r);
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let k = rng.random_range(0..=4usize);
            let mut ms: Vec<i64> = Vec::with_capacity(k + 1);
            while ms.len() < k + 1 {
                let m = rng.random_range(lo..hi);
                if !ms.contains(&m) {
                    ms.push(m);
                }
            }
            ms.sort_unstable();
            let thresholds = ms.iter().map(|&m| m as f64 + 0.5).collect();
            let mut coeffs: Vec<Complex64> = (0..k)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            normalise(&mut coeffs, rc);
            points.push(LinPoint { thresholds, coeffs });
        }
        Self::new(r, points)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `r' = r / (r - 1)`.
    pub fn r_conj(&self) -> f64 {
        math::conjugate_exponent(self.r)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LinPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &LinPoint {
        &self.points[i]
    }

    /// `d_P(x_i)`: `d_j` for the unique `j` with `N_{j-1} not in omega_P` and `N_j in omega_P2`.
    pub fn d_p(&self, i: usize, omega: &FreqInterval, omega2: &FreqInterval) -> Option<Complex64> {
        let p = &self.points[i];
        (1..p.thresholds.len())
            .find(|&j| !omega.contains(p.thresholds[j - 1]) && omega2.contains(p.thresholds[j]))
            .map(|j| p.coeffs[j - 1])
    }

    /// `sum_{j >= 1, N_j in omega} |d_j|^{r'}` at `x_i`.
    pub fn mass_in(&self, i: usize, omega: &FreqInterval) -> f64 {
        let p = &self.points[i];
        let rc = self.r_conj();
        (1..p.thresholds.len())
            .filter(|&j| omega.contains(p.thresholds[j]))
            .map(|j| math::pow_abs(math::abs(p.coeffs[j - 1]), rc))
            .sum()
    }
}

fn normalise(coeffs: &mut [Complex64], rc: f64) {
    if coeffs.is_empty() {
        return;
    }
    if coeffs.iter().all(|d| d.re == 0.0 && d.im == 0.0) {
        coeffs[0] = Complex64::new(1.0, 0.0);
    }
    let s: f64 = coeffs.iter().map(|&d| math::pow_abs(math::abs(d), rc)).sum();
    let scale = 1.0 / math::powf(s, 1.0 / rc);
    for d in coeffs {
        *d *= scale;
    }
}
