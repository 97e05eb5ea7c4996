use alloc::vec::Vec;
use num_complex::Complex64;

use super::variation::{check_exponent, variation_dp, VariationMode};
use super::{dft, idft, Signal, Spectrum};
use crate::math;
use crate::{Error, Result};

/// `S_n f`, the Fourier projection onto `|k| < n`; zero for `n <= 0`.
pub fn partial_sum(f: &Signal, n: i64) -> Result<Signal> {
    let half = (f.len() / 2) as i64;
    if n > half {
        return Err(Error::FrequencyOutOfRange { frequency: n, limit: half });
    }
    if n <= 0 {
        return Signal::zeros(f.len());
    }
    let spec = dft(f);
    let mut out = Spectrum::zeros(f.len())?;
    for k in (1 - n)..n {
        out.set(k, spec.get(k))?;
    }
    Ok(idft(&out))
}

/// Spectrum plus twiddle table for evaluating partial-sum and truncation
/// sequences at individual grid points.
#[derive(Debug, Clone)]
pub struct PartialSumTable {
    spectrum: Spectrum,
    twiddles: Vec<Complex64>,
}

impl PartialSumTable {
    pub fn new(f: &Signal) -> Self {
        Self::from_spectrum(dft(f))
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        let n = spectrum.len();
        let twiddles = (0..n).map(|t| math::cis_turns(t as f64 / n as f64)).collect();
        Self { spectrum, twiddles }
    }

    pub fn len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `F(k) e^{2 pi i k x_j}`.
    #[inline]
    fn term(&self, k: i64, j: usize) -> Complex64 {
        let n = self.len() as i64;
        self.spectrum.get(k) * self.twiddles[(k * j as i64).rem_euclid(n) as usize]
    }

    /// `S_0 f(x_j), ..., S_{N/2} f(x_j)` written into `out`.
    pub fn partial_sums_at(&self, j: usize, out: &mut Vec<Complex64>) {
        let half = (self.len() / 2) as i64;
        out.clear();
        let mut acc = Complex64::new(0.0, 0.0);
        out.push(acc);
        for n in 1..=half {
            let k = n - 1;
            acc += self.term(k, j);
            if k > 0 {
                acc += self.term(-k, j);
            }
            out.push(acc);
        }
    }

    /// One-sided truncations `sum_{-N/2 <= k < m} F(k) e^{2 pi i k x_j}` for
    /// `m = -N/2, ..., N/2`, i.e. thresholds `m - 1/2`.
    pub fn truncations_at(&self, j: usize, out: &mut Vec<Complex64>) {
        let half = (self.len() / 2) as i64;
        out.clear();
        let mut acc = Complex64::new(0.0, 0.0);
        out.push(acc);
        for k in -half..half {
            acc += self.term(k, j);
            out.push(acc);
        }
    }

    /// `S_[r] f(x_j)`.
    pub fn variation_at(&self, j: usize, r: f64, buf: &mut Vec<Complex64>) -> f64 {
        self.partial_sums_at(j, buf);
        oscillation(buf, r)
    }

    /// `C_[r] f(x_j)`.
    pub fn truncation_variation_at(&self, j: usize, r: f64, buf: &mut Vec<Complex64>) -> f64 {
        self.truncations_at(j, buf);
        oscillation(buf, r)
    }

    /// `sup_n |S_n f(x_j)|`.
    pub fn maximal_at(&self, j: usize, buf: &mut Vec<Complex64>) -> f64 {
        self.partial_sums_at(j, buf);
        buf.iter().map(|&z| math::abs(z)).fold(0.0, f64::max)
    }
}

fn oscillation(a: &[Complex64], r: f64) -> f64 {
    variation_dp(
        a.len(),
        |i| math::abs(a[i]),
        |i, k| math::abs(a[i] - a[k]),
        r,
        VariationMode::Oscillation,
    )
}

/// Sequence `(S_n f(x_j))_{n=0..N/2}`.
pub fn partial_sum_sequence_at(f: &Signal, j: usize) -> Vec<Complex64> {
    let mut out = Vec::new();
    PartialSumTable::new(f).partial_sums_at(j, &mut out);
    out
}

/// Truncation sequence at `x_j`, see [`PartialSumTable::truncations_at`].
pub fn truncation_sequence_at(f: &Signal, j: usize) -> Vec<Complex64> {
    let mut out = Vec::new();
    PartialSumTable::new(f).truncations_at(j, &mut out);
    out
}

fn pointwise(f: &Signal, eval: impl Fn(&PartialSumTable, usize, &mut Vec<Complex64>) -> f64) -> Result<Signal> {
    let table = PartialSumTable::new(f);
    let mut buf = Vec::with_capacity(f.len() + 1);
    Signal::from_real((0..f.len()).map(|j| eval(&table, j, &mut buf)).collect())
}

/// `S_[r] f`: oscillation-mode `r`-variation of the partial sums at each point.
pub fn variational_partial_sums(f: &Signal, r: f64) -> Result<Signal> {
    check_exponent("r", r)?;
    pointwise(f, |t, j, buf| t.variation_at(j, r, buf))
}

/// `C_[r] f`: `r`-variation of the one-sided frequency truncations at each point.
pub fn variational_truncation(f: &Signal, r: f64) -> Result<Signal> {
    check_exponent("r", r)?;
    pointwise(f, |t, j, buf| t.truncation_variation_at(j, r, buf))
}

/// Carleson maximal function `sup_n |S_n f|`.
pub fn carleson_maximal(f: &Signal) -> Result<Signal> {
    pointwise(f, |t, j, buf| t.maximal_at(j, buf))
}
