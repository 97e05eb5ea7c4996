use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::tree::is_overlapping;
use super::{FreqInterval, Linearization, PacketSpectrum, TileCollection, TopIndex, TreeTop};
use crate::fourier::{dft, Signal};
use crate::math;
use crate::weights::{DyadicInterval, Weight};
use crate::{Error, Result};

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

/// `a_P = <f, phi_{P1}>` for every bitile, in collection order.
pub fn coefficients(coll: &TileCollection, f: &Signal) -> Result<Vec<Complex64>> {
    check_len(coll.lattice().len(), f.len())?;
    let spec = dft(f);
    let lat = coll.lattice();
    coll.tiles()
        .iter()
        .map(|b| Ok(PacketSpectrum::for_tile(&lat.tile1(b), lat.consts().c3, f.len())?.inner_from(&spec)))
        .collect()
}

/// `(sum_{P in Q} |a_P|^2 1_{I_P} / |I_P|)^{1/2}` from precomputed coefficients.
pub fn square_function_from(coll: &TileCollection, members: &[usize], coeffs: &[Complex64]) -> Signal {
    let n = coll.lattice().len();
    let log2 = coll.lattice().log2_len();
    let mut acc = vec![0.0f64; n];
    for &i in members {
        let b = &coll.tiles()[i];
        let v = coeffs[i].norm_sqr() / b.interval().len();
        let cells = b.interval().cells(log2);
        for a in &mut acc[cells.start..cells.start + cells.len] {
            *a += v;
        }
    }
    Signal::from_real(acc.into_iter().map(math::sqrt).collect()).expect("lattice length is valid")
}

/// Tree square function `S_Q f`.
pub fn tree_square_function(coll: &TileCollection, members: &[usize], f: &Signal) -> Result<Signal> {
    let coeffs = coefficients(coll, f)?;
    Ok(square_function_from(coll, members, &coeffs))
}

/// Size over restricted tops for any alive sub-collection.
#[derive(Debug, Clone)]
pub struct SizeEvaluator<'a> {
    coll: &'a TileCollection,
    weight: &'a Weight,
    index: TopIndex,
    coeffs: Vec<Complex64>,
    /// `|a_P|^2 w(I_P) / |I_P|`
    energy: Vec<f64>,
}

impl<'a> SizeEvaluator<'a> {
    pub fn new(coll: &'a TileCollection, f: &Signal, weight: &'a Weight) -> Result<Self> {
        check_len(coll.lattice().len(), weight.len())?;
        let coeffs = coefficients(coll, f)?;
        Ok(Self::from_coefficients(coll, coeffs, weight))
    }

    pub fn from_coefficients(coll: &'a TileCollection, coeffs: Vec<Complex64>, weight: &'a Weight) -> Self {
        let energy = coll
            .tiles()
            .iter()
            .zip(&coeffs)
            .map(|(b, a)| a.norm_sqr() * weight.dyadic_mass(b.interval()) / b.interval().len())
            .collect();
        Self { coll, weight, index: TopIndex::new(coll), coeffs, energy }
    }

    pub fn index(&self) -> &TopIndex {
        &self.index
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn energy(&self, i: usize) -> f64 {
        self.energy[i]
    }

    /// Alive members of the maximal 2-overlapping tree at top number `t`.
    pub fn overlapping_members(&self, t: usize, alive: &[bool]) -> Vec<usize> {
        let top = self.index.tops()[t];
        self.index
            .members_at(t)
            .iter()
            .copied()
            .filter(|&i| alive[i] && is_overlapping(self.coll.lattice(), &top, &self.coll.tiles()[i]))
            .collect()
    }

    /// `||S_{T2} f||^2_{L^2(w)}` for the maximal alive 2-overlapping tree at top `t`.
    pub fn tree_energy(&self, t: usize, alive: &[bool]) -> f64 {
        let top = self.index.tops()[t];
        self.index
            .members_at(t)
            .iter()
            .filter(|&&i| alive[i] && is_overlapping(self.coll.lattice(), &top, &self.coll.tiles()[i]))
            .map(|&i| self.energy[i])
            .sum()
    }

    /// `w(I_T)^{-1/2} ||S_{T2} f||_{L^2(w)}` at top `t`.
    pub fn top_size(&self, t: usize, alive: &[bool]) -> f64 {
        let m = self.weight.dyadic_mass(self.index.tops()[t].interval);
        math::sqrt(self.tree_energy(t, alive) / m)
    }

    /// Size of the alive sub-collection and a maximising top.
    pub fn size_of(&self, alive: &[bool]) -> (f64, Option<TreeTop>) {
        let mut best = (0.0, None);
        for t in 0..self.index.len() {
            let s = self.top_size(t, alive);
            if s > best.0 {
                best = (s, Some(self.index.tops()[t]));
            }
        }
        best
    }

    pub fn size(&self) -> f64 {
        self.size_of(&vec![true; self.coll.len()]).0
    }
}

/// Size of a collection: supremum over restricted-top 2-overlapping trees.
pub fn size(coll: &TileCollection, f: &Signal, w: &Weight) -> Result<f64> {
    Ok(SizeEvaluator::new(coll, f, w)?.size())
}

/// `[1 + (dist(x, c(I)) / |I|)^2]^{-1/2}` with torus distance.
pub fn chi_tilde(interval: &DyadicInterval, x: f64) -> f64 {
    let mut d = (x - interval.center()).abs();
    d -= math::floor(d);
    let d = d.min(1.0 - d) / interval.len();
    1.0 / math::sqrt(1.0 + d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMode {
    Standard,
    Improved,
}

/// Density integrals for a fixed `(g, w, lin, D)`.
#[derive(Debug, Clone)]
pub struct DensityEvaluator<'a> {
    weight: &'a Weight,
    lin: &'a Linearization,
    /// `|g|^{r'} w` per grid point
    h: Vec<f64>,
    decay: f64,
}

impl<'a> DensityEvaluator<'a> {
    pub fn new(g: &Signal, weight: &'a Weight, lin: &'a Linearization, decay: f64) -> Result<Self> {
        check_len(weight.len(), g.len())?;
        check_len(weight.len(), lin.len())?;
        let rc = lin.r_conj();
        let h = g
            .samples()
            .iter()
            .zip(weight.samples())
            .map(|(&z, &w)| math::pow_abs(math::abs(z), rc) * w)
            .collect();
        Ok(Self { weight, lin, h, decay })
    }

    pub fn r_conj(&self) -> f64 {
        self.lin.r_conj()
    }

    /// `int chi~_I^D |g|^{r'} sum_{N_j in omega} |d_j|^{r'} w`.
    pub fn integral(&self, interval: &DyadicInterval, omega: &FreqInterval) -> f64 {
        let n = self.h.len();
        let mut acc = 0.0;
        for (i, &h) in self.h.iter().enumerate() {
            if h == 0.0 {
                continue;
            }
            let mass = self.lin.mass_in(i, omega);
            if mass == 0.0 {
                continue;
            }
            let chi = chi_tilde(interval, i as f64 / n as f64);
            acc += math::powf(chi, self.decay) * h * mass;
        }
        acc / n as f64
    }

    /// Density of a top raised to the power `r'`.
    pub fn raw(&self, interval: &DyadicInterval, omega: &FreqInterval) -> f64 {
        self.integral(interval, omega) / self.weight.dyadic_mass(*interval)
    }

    pub fn top_density(&self, top: &TreeTop) -> f64 {
        math::powf(self.raw(&top.interval, &top.omega()), 1.0 / self.r_conj())
    }

    /// Standard density over tops with an alive member, or improved density over alive bitiles.
    pub fn density_of(&self, coll: &TileCollection, index: &TopIndex, alive: &[bool], mode: DensityMode) -> f64 {
        let mut best = 0.0f64;
        match mode {
            DensityMode::Standard => {
                for (top, members) in index.iter() {
                    if members.iter().any(|&i| alive[i]) {
                        best = best.max(self.raw(&top.interval, &top.omega()));
                    }
                }
            }
            DensityMode::Improved => {
                let lat = coll.lattice();
                for (i, b) in coll.tiles().iter().enumerate() {
                    if alive[i] {
                        best = best.max(self.raw(&b.interval(), &lat.omega_p2(b)));
                    }
                }
            }
        }
        math::powf(best, 1.0 / self.r_conj())
    }
}

/// Density (standard or improved) of a collection.
pub fn density(
    coll: &TileCollection,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
    mode: DensityMode,
) -> Result<f64> {
    let eval = DensityEvaluator::new(g, w, lin, coll.consts().d)?;
    let index = TopIndex::new(coll);
    Ok(eval.density_of(coll, &index, &vec![true; coll.len()], mode))
}
