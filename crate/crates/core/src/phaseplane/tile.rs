use alloc::vec::Vec;

use super::AdmissibleConstants;
use crate::math;
use crate::weights::DyadicInterval;
use crate::{Error, Result};

/// Half-open frequency interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqInterval {
    pub lo: f64,
    pub hi: f64,
}

impl FreqInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x < self.hi
    }

    pub fn contains_interval(&self, other: &FreqInterval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &FreqInterval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    /// Dilation by `c` about the centre.
    pub fn dilate(&self, c: f64) -> Self {
        let m = self.center();
        let h = 0.5 * c * self.len();
        Self { lo: m - h, hi: m + h }
    }

    pub fn hull(&self, other: &FreqInterval) -> Self {
        Self { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Gap between two disjoint intervals, zero if they meet.
    pub fn distance(&self, other: &FreqInterval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi).max(0.0)
    }
}

/// Rectangle `I x omega` of area one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tile {
    pub interval: DyadicInterval,
    pub omega: FreqInterval,
}

/// Bitile at spatial level `level` (`|I| = 2^-level`), position `position`,
/// low-tile frequency index `freq` in units of `2^level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitile {
    pub level: u32,
    pub position: u64,
    pub freq: i64,
}

impl Bitile {
    pub fn interval(&self) -> DyadicInterval {
        DyadicInterval { level: self.level, index: self.position }
    }
}

/// Width-`2^level` frequency cell `[m 2^level - 1/2, (m + 1) 2^level - 1/2)`.
///
/// The half-unit shift puts integer frequencies at cell interiors, so the
/// finest cells each carry exactly one Fourier mode.
pub fn frequency_cell(level: u32, m: i64) -> FreqInterval {
    let h = (1u64 << level) as f64;
    FreqInterval { lo: m as f64 * h - 0.5, hi: (m + 1) as f64 * h - 0.5 }
}

/// Geometry of all bitiles on an `N = 2^L` grid for one set of constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    consts: AdmissibleConstants,
    log2_len: u32,
    /// Empty low-tile cells between `omega_P1` and `omega_P2`.
    gap: i64,
    /// Frequency indices of admitted bitiles are multiples of this.
    stride: i64,
}

impl Lattice {
    pub fn new(log2_len: u32, consts: AdmissibleConstants) -> Result<Self> {
        consts.validate()?;
        if log2_len < 3 || log2_len > 30 {
            return Err(Error::Sizing { len: 1usize.checked_shl(log2_len).unwrap_or(0) });
        }
        // centres of C2-dilated tiles must not overlap: index difference >= C2
        let gap = (math::ceil(consts.c2 - 1.0) as i64).max(0);
        let span = (1 + gap) as f64 + 0.5 * (consts.c21 + consts.c22);
        if span > 2.0 * consts.c1 + 1e-12 {
            return Err(Error::Constants("|omega_P| exceeds C1 (|omega_P1| + |omega_P2|)"));
        }
        let stride = math::ceil(span - 1e-12) as i64;
        Ok(Self { consts, log2_len, gap, stride })
    }

    pub fn consts(&self) -> &AdmissibleConstants {
        &self.consts
    }

    pub fn log2_len(&self) -> u32 {
        self.log2_len
    }

    pub fn len(&self) -> usize {
        1 << self.log2_len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn gap(&self) -> i64 {
        self.gap
    }

    pub fn stride(&self) -> i64 {
        self.stride
    }

    /// Frequencies carried by the grid: `[-N/2 - 1/2, N/2 - 1/2)`.
    pub fn band(&self) -> FreqInterval {
        let h = (self.len() / 2) as f64;
        FreqInterval { lo: -h - 0.5, hi: h - 0.5 }
    }

    pub fn omega_p1(&self, b: &Bitile) -> FreqInterval {
        frequency_cell(b.level, b.freq)
    }

    pub fn omega_p2(&self, b: &Bitile) -> FreqInterval {
        frequency_cell(b.level, b.freq + 1 + self.gap)
    }

    /// `hull(C21 omega_P1, C22 omega_P2)`.
    pub fn omega(&self, b: &Bitile) -> FreqInterval {
        self.omega_p1(b).dilate(self.consts.c21).hull(&self.omega_p2(b).dilate(self.consts.c22))
    }

    /// `hull(C2 omega_P1, C2 omega_P2)`.
    pub fn omega_tilde(&self, b: &Bitile) -> FreqInterval {
        self.omega_p1(b).dilate(self.consts.c2).hull(&self.omega_p2(b).dilate(self.consts.c2))
    }

    pub fn tile1(&self, b: &Bitile) -> Tile {
        Tile { interval: b.interval(), omega: self.omega_p1(b) }
    }

    pub fn tile2(&self, b: &Bitile) -> Tile {
        Tile { interval: b.interval(), omega: self.omega_p2(b) }
    }

    /// Finest admissible level: `omega_P` must fit in the band.
    pub fn max_level(&self) -> Option<u32> {
        (0..self.log2_len).rev().find(|&l| !self.frequency_slots(l).is_empty())
    }

    /// Admitted low-tile indices at `level`, ascending.
    pub fn frequency_slots(&self, level: u32) -> Vec<i64> {
        if level >= self.log2_len {
            return Vec::new();
        }
        let band = self.band();
        let cells = (self.len() >> level) as i64;
        let lo = -(cells / 2) - self.stride - 2;
        let hi = cells / 2 + 2;
        let first = lo.div_euclid(self.stride) * self.stride;
        (0..)
            .map(|t| first + t * self.stride)
            .take_while(|&m| m <= hi)
            .filter(|&m| {
                let b = Bitile { level, position: 0, freq: m };
                band.contains_interval(&self.omega(&b))
            })
            .collect()
    }

    pub fn is_admitted(&self, b: &Bitile) -> bool {
        b.level < self.log2_len
            && b.position < 1u64 << b.level
            && b.freq.rem_euclid(self.stride) == 0
            && self.band().contains_interval(&self.omega(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_bitiles_have_area_two() {
        let lat = Lattice::new(8, AdmissibleConstants::default()).unwrap();
        assert_eq!((lat.gap(), lat.stride()), (0, 2));
        for level in 0..7 {
            for m in lat.frequency_slots(level) {
                let b = Bitile { level, position: 0, freq: m };
                let area = b.interval().len() * lat.omega(&b).len();
                assert_eq!(area, 2.0);
                assert_eq!(lat.omega(&b), lat.omega_tilde(&b));
                assert_eq!(lat.omega_p1(&b).hi, lat.omega_p2(&b).lo);
                // omega_P is itself a frequency cell one level up
                assert_eq!(lat.omega(&b), frequency_cell(level + 1, m / 2));
            }
            assert_eq!(lat.frequency_slots(level).len(), 128 >> level);
        }
        // the whole band is not a frequency cell of the shifted grid
        assert!(lat.frequency_slots(7).is_empty());
        assert_eq!(lat.max_level(), Some(6));
    }

    #[test]
    fn general_constants_respect_ordering() {
        let c = AdmissibleConstants { c2: 2.0, c3: 1.5, c21: 2.0, c22: 2.0, c1: 2.0, k0: 8.0, d: 13.0 };
        let lat = Lattice::new(8, c).unwrap();
        assert_eq!((lat.gap(), lat.stride()), (1, 4));
        let b = Bitile { level: 2, position: 1, freq: lat.frequency_slots(2)[3] };
        let (p1, p2) = (lat.omega_p1(&b).dilate(c.c2), lat.omega_p2(&b).dilate(c.c2));
        assert!(p1.hi <= p2.lo);
        assert!(lat.omega(&b).contains_interval(&lat.omega_tilde(&b)));
        assert!(lat.omega(&b).len() <= c.c1 * 2.0 * lat.omega_p1(&b).len());
        let bad = AdmissibleConstants { c2: 1.5, c3: 1.0, c21: 1.5, c22: 1.5, c1: 1.5, k0: 8.0, d: 13.0 };
        assert!(Lattice::new(8, bad).is_err());
    }

    #[test]
    fn interval_helpers() {
        let a = FreqInterval::new(0.0, 4.0);
        assert_eq!(a.dilate(0.5), FreqInterval::new(1.0, 3.0));
        assert!(a.contains(0.0) && !a.contains(4.0));
        let b = FreqInterval::new(6.0, 7.0);
        assert_eq!(a.distance(&b), 2.0);
        assert!(!a.intersects(&b));
        assert_eq!(a.hull(&b), FreqInterval::new(0.0, 7.0));
    }
}
