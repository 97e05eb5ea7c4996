//! Littlewood–Paley families and the weighted variational inequality for them.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::fourier::{dft, idft, variation_norm, Signal, Spectrum, VariationMode};
use crate::math;
use crate::weights::{dyadic_sharp, maximal, weighted_lp_norm_of, Averaging, Weight};
use crate::{Error, Result};

/// Smooth step: 0 for `v <= -delta`, 1 for `v >= delta`; a jump at 0 when `delta = 0`.
fn smooth_step(v: f64, delta: f64) -> f64 {
    if v >= delta {
        return 1.0;
    }
    if v <= -delta {
        return 0.0;
    }
    let e = |x: f64| if x > 0.0 { math::exp(-1.0 / x) } else { 0.0 };
    let t = v / delta;
    let (a, b) = (e(1.0 + t), e(1.0 - t));
    a / (a + b)
}

/// `eta_m(k) = S(u - m + 1/2) - S(u - m - 1/2)` with `u = log2 |k|`, for `m` in `0..top`;
/// the finest band keeps everything above its lower edge.
fn band_multiplier(k: i64, m: u32, top: u32, delta: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let u = math::log2(k.unsigned_abs() as f64) - m as f64;
    let upper = if m + 1 == top { 0.0 } else { smooth_step(u - 0.5, delta) };
    smooth_step(u + 0.5, delta) - upper
}

/// Family `(f_j)` indexed by scales `j` ascending, each with spectrum in
/// `{2^{-j} / C < |xi| < C 2^{-j}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpFamily {
    c: f64,
    scales: Vec<i32>,
    members: Vec<Signal>,
    dc: Complex64,
    leakage: f64,
}

impl LpFamily {
    /// A family from given members; `leakage` is measured against the bands of `c`.
    pub fn from_members(c: f64, scales: Vec<i32>, members: Vec<Signal>) -> Result<Self> {
        check_band_constant(c)?;
        if scales.len() != members.len() || members.is_empty() {
            return Err(Error::InvalidParameter { name: "members", reason: "need one scale per member" });
        }
        if scales.windows(2).any(|s| s[0] >= s[1]) {
            return Err(Error::InvalidParameter { name: "scales", reason: "must increase strictly" });
        }
        let n = members[0].len();
        if let Some(m) = members.iter().find(|m| m.len() != n) {
            return Err(Error::LengthMismatch { expected: n, found: m.len() });
        }
        let leakage = scales.iter().zip(&members).map(|(&j, f)| leakage_of(f, j, c)).fold(0.0, f64::max);
        Ok(Self { c, scales, members, dc: Complex64::new(0.0, 0.0), leakage })
    }

    pub fn band_constant(&self) -> f64 {
        self.c
    }

    pub fn scales(&self) -> &[i32] {
        &self.scales
    }

    pub fn members(&self) -> &[Signal] {
        &self.members
    }

    pub fn grid_len(&self) -> usize {
        self.members[0].len()
    }

    /// `hat f(0)` of the source signal, not part of any member.
    pub fn dc(&self) -> Complex64 {
        self.dc
    }

    /// Largest Fourier coefficient of a member outside its band.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for m in &mut out.members {
            *m = m.scale(Complex64::new(lambda, 0.0));
        }
        out.dc *= lambda;
        out.leakage *= lambda.abs();
        out
    }

    /// `f_{j_0} + ... + f_j` at grid point `x`, prefixed by 0.
    fn cumulative_at(&self, x: usize) -> Vec<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut out = Vec::with_capacity(self.members.len() + 1);
        out.push(acc);
        for m in &self.members {
            acc += m.samples()[x];
            out.push(acc);
        }
        out
    }
}

fn check_band_constant(c: f64) -> Result<()> {
    if !(c > core::f64::consts::SQRT_2 && c <= 4.0) {
        return Err(Error::InvalidParameter { name: "C", reason: "band constant must lie in (sqrt 2, 4]" });
    }
    Ok(())
}

fn leakage_of(f: &Signal, j: i32, c: f64) -> f64 {
    let centre = math::powf(2.0, -(j as f64));
    dft(f)
        .iter()
        .filter(|&(k, _)| {
            let a = k.unsigned_abs() as f64;
            !(a > centre / c && a < centre * c)
        })
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max)
}

/// Smooth dyadic frequency decomposition of `f` with scales `j = -(L-1), ..., 0`
/// (`|xi|` near `2^{-j}`); the zero frequency is kept aside.
pub fn lp_family(f: &Signal, c: f64) -> Result<LpFamily> {
    check_band_constant(c)?;
    let n = f.len();
    let top = f.log2_len();
    let delta = (math::log2(c) - 0.5).min(0.5);
    let spec = dft(f);
    let mut scales = Vec::with_capacity(top as usize);
    let mut members = Vec::with_capacity(top as usize);
    for m in (0..top).rev() {
        let pairs: Vec<(i64, Complex64)> = spec
            .iter()
            .filter_map(|(k, v)| {
                let eta = band_multiplier(k, m, top, delta);
                (eta != 0.0).then_some((k, v * eta))
            })
            .collect();
        scales.push(-(m as i32));
        members.push(idft(&Spectrum::from_pairs(n, &pairs)?));
    }
    let mut fam = LpFamily::from_members(c, scales, members)?;
    fam.dc = spec.get(0);
    Ok(fam)
}

/// Pointwise `sup_{N_0 < ... < N_K} (sum_k |sum_{N_{k-1} < j <= N_k} f_j|^r)^{1/r}`.
pub fn variational_field(fam: &LpFamily, r: f64) -> Result<Vec<f64>> {
    (0..fam.grid_len()).map(|x| variation_norm(&fam.cumulative_at(x), r, VariationMode::Oscillation)).collect()
}

/// Pointwise `(sum_j |f_j|^s)^{1/s}`, exact when one member is nonzero.
pub fn square_field(fam: &LpFamily, s: f64) -> Result<Vec<f64>> {
    if s.is_nan() || s < 1.0 {
        return Err(Error::Exponent { name: "s", value: s });
    }
    Ok((0..fam.grid_len())
        .map(|x| {
            let mut nonzero = fam.members.iter().map(|m| math::abs(m.samples()[x])).filter(|&a| a > 0.0);
            match (nonzero.next(), nonzero.next()) {
                (None, _) => 0.0,
                (Some(a), None) => a,
                _ => {
                    let sum: f64 = fam.members.iter().map(|m| math::pow_abs(math::abs(m.samples()[x]), s)).sum();
                    math::powf(sum, 1.0 / s)
                }
            }
        })
        .collect())
}

/// `L^p(w)` norm of [`variational_field`].
pub fn variational_lp_norm(fam: &LpFamily, r: f64, p: f64, w: &Weight) -> Result<f64> {
    check_grid(fam, w)?;
    weighted_lp_norm_of(&variational_field(fam, r)?, p, w)
}

fn check_grid(fam: &LpFamily, w: &Weight) -> Result<()> {
    if fam.grid_len() != w.len() {
        return Err(Error::LengthMismatch { expected: w.len(), found: fam.grid_len() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LepingleRatio {
    pub value: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Right side vanishes; `value` is then 0.
    pub degenerate: bool,
}

/// Variational norm over `||(sum_j |f_j|^s)^{1/s}||_{L^p(w)}` with `s = min(r, 2)`.
pub fn lepingle_ratio(fam: &LpFamily, r: f64, p: f64, w: &Weight) -> Result<LepingleRatio> {
    check_grid(fam, w)?;
    let lhs = variational_lp_norm(fam, r, p, w)?;
    let rhs = weighted_lp_norm_of(&square_field(fam, r.min(2.0))?, p, w)?;
    if rhs <= 0.0 {
        return Ok(LepingleRatio { value: 0.0, lhs, rhs, degenerate: true });
    }
    Ok(LepingleRatio { value: lhs / rhs, lhs, rhs, degenerate: false })
}

/// `max_x (T f)^#(x) / M_t(|f|)(x)` over points where the maximal function is positive,
/// with `T f` the variational field and `|f|` the `l^s` field.
pub fn sharp_ratio(fam: &LpFamily, r: f64, t: f64) -> Result<f64> {
    let field = Signal::from_real(variational_field(fam, r)?)?;
    let sharp = dyadic_sharp(&field);
    let vector = Signal::from_real(square_field(fam, r.min(2.0))?)?;
    let m = maximal(&vector, t, Averaging::Lebesgue)?;
    Ok(sharp
        .samples()
        .iter()
        .zip(m.samples())
        .filter(|(_, d)| d.re > 0.0)
        .map(|(s, d)| s.re / d.re)
        .fold(0.0, f64::max))
}
