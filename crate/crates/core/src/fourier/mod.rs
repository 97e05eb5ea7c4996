//! Torus Fourier analysis on `N = 2^L` grid points.
//!
//! Coefficients use the Riemann-sum normalisation
//! `F(k) = (1/N) sum_i f(x_i) e^{-2 pi i k x_i}` so that a constant signal has
//! `F(0)` equal to the constant, and `f(x_i) = sum_k F(k) e^{2 pi i k x_i}`.

mod fft;
mod operators;
pub(crate) mod variation;

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

pub use fft::{dft, idft};
pub use operators::{
    carleson_maximal, partial_sum, partial_sum_sequence_at, truncation_sequence_at,
    variational_partial_sums, variational_truncation, PartialSumTable,
};
pub use variation::{variation_norm, variation_norm_real, VariationMode};

/// Smallest admissible grid length.
pub const MIN_LEN: usize = 8;

fn check_len(len: usize) -> Result<()> {
    if len < MIN_LEN || !len.is_power_of_two() {
        Err(Error::Sizing { len })
    } else {
        Ok(())
    }
}

/// Complex samples `f(i/N)` on the cyclic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_len(samples.len())?;
        Ok(Self { samples })
    }

    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    /// Samples `f(x_i)` with `x_i = i / len`.
    pub fn from_fn(len: usize, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        check_len(len)?;
        let step = 1.0 / len as f64;
        Ok(Self { samples: (0..len).map(|i| f(i as f64 * step)).collect() })
    }

    /// `e^{2 pi i k x}`.
    pub fn tone(len: usize, k: i64) -> Result<Self> {
        check_len(len)?;
        let n = len as i64;
        Ok(Self {
            samples: (0..n)
                .map(|i| math::cis_turns((k * i).rem_euclid(n) as f64 / n as f64))
                .collect(),
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `L` with `N = 2^L`.
    pub fn log2_len(&self) -> u32 {
        self.samples.len().trailing_zeros()
    }

    #[inline]
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn re(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.re).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.samples.iter().map(|&z| math::abs(z)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|&z| math::abs(z)).fold(0.0, f64::max)
    }

    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Self {
        Self { samples: self.samples.iter().map(|&z| f(z)).collect() }
    }

    pub fn zip_with(
        &self,
        other: &Signal,
        mut f: impl FnMut(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            samples: self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Signal) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    /// Riemann-sum inner product `(1/N) sum f conj(g)`.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        self.same_grid(other)?;
        let sum: Complex64 =
            self.samples.iter().zip(&other.samples).map(|(a, b)| a * b.conj()).sum();
        Ok(sum / self.len() as f64)
    }

    pub fn same_grid(&self, other: &Signal) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), found: other.len() });
        }
        Ok(())
    }
}

/// Fourier coefficients indexed by `k` in `[-N/2, N/2)`.
///
/// Stored in transform order (`k mod N`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    /// From coefficients in transform order.
    pub fn from_transform_order(coeffs: Vec<Complex64>) -> Result<Self> {
        check_len(coeffs.len())?;
        Ok(Self { coeffs })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_transform_order(vec![Complex64::new(0.0, 0.0); len])
    }

    /// Builds a spectrum from `(k, value)` pairs; later pairs overwrite earlier ones.
    pub fn from_pairs(len: usize, pairs: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = Self::zeros(len)?;
        for &(k, v) in pairs {
            s.set(k, v)?;
        }
        Ok(s)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn half(&self) -> i64 {
        (self.coeffs.len() / 2) as i64
    }

    #[inline]
    fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.coeffs.len() as i64) as usize
    }

    fn check_k(&self, k: i64) -> Result<()> {
        let h = self.half();
        if k < -h || k >= h {
            return Err(Error::FrequencyOutOfRange { frequency: k, limit: h });
        }
        Ok(())
    }

    /// Coefficient at frequency `k`; zero outside the band.
    #[inline]
    pub fn get(&self, k: i64) -> Complex64 {
        let h = self.half();
        if k < -h || k >= h {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[self.slot(k)]
        }
    }

    pub fn set(&mut self, k: i64, v: Complex64) -> Result<()> {
        self.check_k(k)?;
        let s = self.slot(k);
        self.coeffs[s] = v;
        Ok(())
    }

    pub fn transform_order(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(k, F(k))` for `k = -N/2 .. N/2 - 1`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let h = self.half();
        (-h..h).map(move |k| (k, self.get(k)))
    }

    /// `sum |F(k)|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths() {
        assert_eq!(Signal::zeros(12), Err(Error::Sizing { len: 12 }));
        assert_eq!(Signal::zeros(4), Err(Error::Sizing { len: 4 }));
        assert!(Signal::zeros(8).is_ok());
    }

    #[test]
    fn inner_product_conjugate_symmetric() {
        let f = Signal::from_fn(16, |x| Complex64::new(x, 1.0 - x * x)).unwrap();
        let g = Signal::from_fn(16, |x| Complex64::new(math::sin_cos(7.0 * x).0, x)).unwrap();
        let fg = f.inner(&g).unwrap();
        let gf = g.inner(&f).unwrap();
        assert!((fg - gf.conj()).norm() < 1e-14);
        assert!(f.inner(&f).unwrap().re > 0.0);
        assert!(f.inner(&f).unwrap().im.abs() < 1e-15);
    }

    #[test]
    fn spectrum_indexing() {
        let mut s = Spectrum::zeros(8).unwrap();
        s.set(-4, Complex64::new(1.0, 0.0)).unwrap();
        s.set(3, Complex64::new(2.0, 0.0)).unwrap();
        assert!(s.set(4, Complex64::new(0.0, 0.0)).is_err());
        assert_eq!(s.get(-4).re, 1.0);
        assert_eq!(s.get(3).re, 2.0);
        assert_eq!(s.get(100).re, 0.0);
        let ks: Vec<i64> = s.iter().map(|(k, _)| k).collect();
        assert_eq!(ks, (-4..4).collect::<Vec<_>>());
    }
}
