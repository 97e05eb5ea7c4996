//! Weights on the `N`-grid: masses, Muckenhoupt constants, doubling, maximal
//! and sharp functions.

mod ap;
mod dyadic;
mod maximal;

use alloc::vec::Vec;

use crate::fourier::Signal;
use crate::math;
use crate::{Error, Result};

pub use ap::{ap_constant, ap_constant_on, doubling_exponent};
pub use dyadic::{Arc, DyadicGrid, DyadicInterval};
pub use maximal::{dyadic_sharp, maximal, Averaging};

/// Exponents whose `A_p` constants are computed when a weight is built.
pub const CACHED_AP: [f64; 4] = [1.5, 2.0, 3.0, 4.0];

/// Strictly positive weight with cached masses, doubling exponent and `A_p` table.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    samples: Vec<f64>,
    /// `prefix[i] = (1/N) sum_{t < i} w_t`
    prefix: Vec<f64>,
    /// `levels[j][i] = w(I)` for the dyadic interval of level `j`, index `i`.
    levels: Vec<Vec<f64>>,
    gamma: f64,
    ap_table: [f64; 4],
}

impl Weight {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len();
        if n < crate::fourier::MIN_LEN || !n.is_power_of_two() {
            return Err(Error::Sizing { len: n });
        }
        if let Some(index) = samples.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::NonPositiveWeight { index });
        }
        let inv = 1.0 / n as f64;
        let mut prefix = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for &w in &samples {
            acc += w * inv;
            prefix.push(acc);
        }
        let log2 = n.trailing_zeros() as usize;
        let mut levels = alloc::vec![Vec::new(); log2 + 1];
        levels[log2] = samples.iter().map(|w| w * inv).collect();
        for l in (0..log2).rev() {
            levels[l] = levels[l + 1].chunks(2).map(|c| c[0] + c[1]).collect();
        }
        let mut w = Self { samples, prefix, levels, gamma: 0.0, ap_table: [0.0; 4] };
        w.gamma = ap::exact_doubling(&w);
        let table = CACHED_AP.map(|p| ap::ap_over_arcs(&w, p));
        w.ap_table = table;
        Ok(w)
    }

    /// `w = 1`.
    pub fn lebesgue(n: usize) -> Result<Self> {
        Self::new(alloc::vec![1.0; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn log2_len(&self) -> u32 {
        self.samples.len().trailing_zeros()
    }

    #[inline]
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Doubling exponent `gamma`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `w([0, 1))`.
    pub fn total(&self) -> f64 {
        self.levels[0][0]
    }

    /// `w(I)` from the dyadic table; `I` must not be finer than the grid.
    pub fn dyadic_mass(&self, d: DyadicInterval) -> f64 {
        self.levels[d.level as usize][d.index as usize]
    }

    /// Mass of `[0, t)` in grid units, piecewise linear inside cells and extended periodically.
    fn cumulative(&self, t: f64) -> f64 {
        let n = self.len() as f64;
        let wraps = math::floor(t / n);
        let u = t - wraps * n;
        let i = (math::floor(u) as usize).min(self.len() - 1);
        let frac = u - i as f64;
        wraps * self.total() + self.prefix[i] + frac * self.samples[i] / n
    }

    /// `w([a, b))` for `a <= b` given in torus coordinates; arcs longer than one turn count multiply.
    pub fn arc_mass(&self, a: f64, b: f64) -> f64 {
        let n = self.len() as f64;
        self.cumulative(b * n) - self.cumulative(a * n)
    }

    /// Mass of a grid-aligned arc.
    pub fn cells_mass(&self, arc: Arc) -> f64 {
        let n = self.len();
        let end = arc.start + arc.len;
        if end <= n {
            self.prefix[end] - self.prefix[arc.start]
        } else {
            self.total() - self.prefix[arc.start] + self.prefix[end - n]
        }
    }

    /// `w(2^k I)` with the dilation centred on `I` and wrapped around the torus.
    pub fn dilated_mass(&self, d: DyadicInterval, k: u32) -> f64 {
        let half = d.len() * (1u64 << k) as f64 * 0.5;
        if half >= 0.5 {
            return self.total();
        }
        let c = d.center();
        self.arc_mass(c - half, c + half)
    }

    /// `(1/N) sum h_i w_i`.
    pub fn integrate(&self, h: &[f64]) -> f64 {
        debug_assert_eq!(h.len(), self.len());
        h.iter().zip(&self.samples).map(|(a, b)| a * b).sum::<f64>() / self.len() as f64
    }

    /// Cached or freshly computed `[w]_{A_p}`.
    pub fn ap(&self, p: f64) -> Result<f64> {
        if let Some(i) = CACHED_AP.iter().position(|&q| q == p) {
            return Ok(self.ap_table[i]);
        }
        ap_constant(self, p)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.samples.iter().map(|w| w * c).collect())
    }
}

/// `w(x) = (d(x) + 1/(2N))^a` with `d` the torus distance to the origin.
pub fn power_weight(n: usize, a: f64) -> Result<Weight> {
    if !(a > -0.95 && a < 5.0) {
        return Err(Error::InvalidParameter { name: "a", reason: "power weight exponent outside (-0.95, 5)" });
    }
    let reg = 0.5 / n as f64;
    Weight::new(
        (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                math::powf(x.min(1.0 - x) + reg, a)
            })
            .collect(),
    )
}

/// `(sum |f|^p w / N)^{1/p}`; `p = inf` gives the grid maximum.
pub fn weighted_lp_norm(f: &Signal, p: f64, w: &Weight) -> Result<f64> {
    weighted_lp_norm_of(&f.abs(), p, w)
}

/// As [`weighted_lp_norm`] for precomputed moduli.
pub fn weighted_lp_norm_of(values: &[f64], p: f64, w: &Weight) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Exponent { name: "p", value: p });
    }
    if values.len() != w.len() {
        return Err(Error::LengthMismatch { expected: w.len(), found: values.len() });
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let s: f64 = values.iter().zip(w.samples()).map(|(v, w)| math::pow_abs(*v, p) * w).sum();
    let s = s / w.len() as f64;
    Ok(if p == 1.0 {
        s
    } else if p == 2.0 {
        math::sqrt(s)
    } else {
        math::powf(s, 1.0 / p)
    })
}
