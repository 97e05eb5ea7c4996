use alloc::vec::Vec;
use num_complex::Complex64;

use super::{FreqInterval, Tile};
use crate::fourier::{idft, Signal, Spectrum};
use crate::math;
use crate::{Error, Result};

/// Values of the bump below this are set to zero.
pub const BUMP_CUTOFF: f64 = 1e-14;

/// Smooth bump `exp(1 - 1/(1 - 4u^2))` on `|u| < 1/2`, one at the origin.
pub fn bump(u: f64) -> f64 {
    let s = 1.0 - 4.0 * u * u;
    if s <= 0.0 {
        return 0.0;
    }
    let v = math::exp(1.0 - 1.0 / s);
    if v < BUMP_CUTOFF {
        0.0
    } else {
        v
    }
}

/// Frequency profile `phi_J(xi)`: the bump rescaled to `c3 * J`.
pub fn profile(omega: &FreqInterval, c3: f64, xi: f64) -> f64 {
    bump((xi - omega.center()) / (c3 * omega.len()))
}

/// Fourier coefficients of a wave packet on the integers `first .. first + values.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketSpectrum {
    first: i64,
    values: Vec<Complex64>,
}

impl PacketSpectrum {
    /// `hat phi_p(k) = |I|^{1/2} sqrt(phi_omega(k)) e^{-2 pi i c(I) k}`.
    pub fn for_tile(tile: &Tile, c3: f64, n: usize) -> Result<Self> {
        let support = tile.omega.dilate(c3);
        let half = (n / 2) as i64;
        let band = FreqInterval::new(-(half as f64) - 0.5, half as f64 - 0.5);
        if !band.contains_interval(&support) {
            let k = if support.lo < band.lo { math::floor(support.lo) } else { math::ceil(support.hi) };
            return Err(Error::FrequencyOutOfRange { frequency: k as i64, limit: half });
        }
        let first = math::ceil(support.lo) as i64;
        let last = math::floor(support.hi) as i64;
        let scale = math::sqrt(tile.interval.len());
        let values = (first..=last)
            .map(|k| {
                let amp = profile(&tile.omega, c3, k as f64);
                if amp == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                // c(I) k mod 1 computed exactly for dyadic centres
                let phase = frac_product(tile.interval.index, tile.interval.level, k);
                math::cis_turns(-phase) * (scale * math::sqrt(amp))
            })
            .collect();
        Ok(Self { first, values })
    }

    pub fn first(&self) -> i64 {
        self.first
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.first + i as i64, v))
    }

    /// `<f, phi> = sum_k F(k) conj(hat phi(k))`.
    pub fn inner_from(&self, spec: &Spectrum) -> Complex64 {
        self.iter().map(|(k, v)| spec.get(k) * v.conj()).sum()
    }

    pub fn to_spectrum(&self, n: usize) -> Result<Spectrum> {
        let mut s = Spectrum::zeros(n)?;
        for (k, v) in self.iter() {
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn to_signal(&self, n: usize) -> Result<Signal> {
        Ok(idft(&self.to_spectrum(n)?))
    }

    /// `||phi||_2^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// `((index + 1/2) 2^-level * k) mod 1`, exact in binary floating point.
fn frac_product(index: u64, level: u32, k: i64) -> f64 {
    let den = 1i128 << (level + 1);
    let num = ((2 * index as i128 + 1) * k as i128).rem_euclid(den);
    num as f64 / den as f64
}

/// Wave packet adapted to `tile`, spectrum supported in `c3 * omega`.
pub fn wave_packet(tile: &Tile, c3: f64, n: usize) -> Result<Signal> {
    PacketSpectrum::for_tile(tile, c3, n)?.to_signal(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::dft;
    use crate::phaseplane::frequency_cell;
    use crate::weights::DyadicInterval;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tile(level: u32, index: u64, m: i64) -> Tile {
        Tile { interval: DyadicInterval { level, index }, omega: frequency_cell(level, m) }
    }

    #[test]
    fn bump_shape() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(0.5), 0.0);
        assert_eq!(bump(-0.7), 0.0);
        assert!(bump(0.2) > bump(0.3));
        assert_eq!(bump(0.499), 0.0);
    }

    #[test]
    fn support_and_norm() {
        for (level, m) in [(0u32, 5i64), (2, -7), (4, 3), (6, -2)] {
            let t = tile(level, 0, m);
            let p = PacketSpectrum::for_tile(&t, 0.75, 256).unwrap();
            let support = t.omega.dilate(0.75);
            for (k, v) in p.iter() {
                assert!(v.norm() == 0.0 || support.contains(k as f64));
            }
            let norm = p.energy().sqrt();
            assert!((0.5..=2.0).contains(&norm), "level {level}: {norm}");
            let s = p.to_signal(256).unwrap();
            let ip = s.inner(&s).unwrap();
            assert!((ip.re - p.energy()).abs() < 1e-12);
        }
    }

    #[test]
    fn band_is_enforced() {
        let t = tile(3, 0, 15);
        assert!(PacketSpectrum::for_tile(&t, 0.75, 256).is_ok());
        assert!(PacketSpectrum::for_tile(&t, 0.75, 128).is_err());
    }

    #[test]
    fn translates_share_modulus_and_disjoint_spectra_are_orthogonal() {
        let a = wave_packet(&tile(3, 1, 2), 0.75, 128).unwrap();
        let b = wave_packet(&tile(3, 5, 2), 0.75, 128).unwrap();
        // shift by (5 - 1)/8 of a turn = 64 samples
        for i in 0..128 {
            assert!((a.samples()[i].norm() - b.samples()[(i + 64) % 128].norm()).abs() < 1e-12);
        }
        let c = PacketSpectrum::for_tile(&tile(3, 1, 3), 0.75, 128).unwrap().to_spectrum(128).unwrap();
        let ip = PacketSpectrum::for_tile(&tile(3, 1, 2), 0.75, 128).unwrap().inner_from(&c);
        assert_eq!(ip, Complex64::new(0.0, 0.0));
        // the grid inner product agrees up to transform rounding
        let c_sig = wave_packet(&tile(3, 1, 3), 0.75, 128).unwrap();
        assert!(a.inner(&c_sig).unwrap().norm() < 1e-15);
        assert!(PacketSpectrum::for_tile(&tile(3, 1, 2), 0.75, 128).unwrap().inner_from(&dft(&c_sig)).norm() < 1e-15);
    }

    #[test]
    fn sampling_identity() {
        let n = 256;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let level = 4;
        let m = 2;
        let omega = frequency_cell(level, m);
        let pairs: Vec<(i64, Complex64)> = (-60..60)
            .map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        let spec = Spectrum::from_pairs(n, &pairs).unwrap();
        let mut acc = Spectrum::zeros(n).unwrap();
        for index in 0..1u64 << level {
            let t = Tile { interval: DyadicInterval { level, index }, omega };
            let p = PacketSpectrum::for_tile(&t, 0.75, n).unwrap();
            let c = p.inner_from(&spec);
            for (k, v) in p.iter() {
                acc.set(k, acc.get(k) + c * v).unwrap();
            }
        }
        for (k, v) in acc.iter() {
            let want = spec.get(k) * profile(&omega, 0.75, k as f64);
            assert!((v - want).norm() < 1e-12);
        }
    }
}
