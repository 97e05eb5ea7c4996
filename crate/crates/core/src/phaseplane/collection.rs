use alloc::vec::Vec;

use super::{AdmissibleConstants, Bitile, Lattice};
use crate::weights::DyadicGrid;
use crate::{Error, Result};

/// Outcome of checking (S1)-(S3) on a collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparationFlags {
    /// `dist(omega_P1, omega_P2) / |omega_P1|` constant over the collection.
    pub s1: bool,
    /// Equal-scale bitiles with intersecting `omega_P` have equal `omega_P`.
    pub s2: bool,
    /// `|I_P| > |I_P'|` implies `|omega_P| < |omega_P'1| / K0`.
    pub s3: bool,
}

impl SeparationFlags {
    pub fn all(&self) -> bool {
        self.s1 && self.s2 && self.s3
    }
}

/// Finite set of bitiles on one lattice, ordered by scale, position, frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct TileCollection {
    lattice: Lattice,
    tiles: Vec<Bitile>,
    flags: SeparationFlags,
}

impl TileCollection {
    pub fn new(lattice: Lattice, mut tiles: Vec<Bitile>) -> Result<Self> {
        if tiles.iter().any(|b| !lattice.is_admitted(b)) {
            return Err(Error::InvalidParameter { name: "tiles", reason: "bitile outside the lattice" });
        }
        tiles.sort_unstable();
        tiles.dedup();
        let flags = separation_flags(&lattice, &tiles);
        Ok(Self { lattice, tiles, flags })
    }

    pub fn empty(lattice: Lattice) -> Self {
        Self { lattice, tiles: Vec::new(), flags: SeparationFlags { s1: true, s2: true, s3: true } }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn consts(&self) -> &AdmissibleConstants {
        self.lattice.consts()
    }

    pub fn tiles(&self) -> &[Bitile] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn flags(&self) -> SeparationFlags {
        self.flags
    }

    pub fn index_of(&self, b: &Bitile) -> Option<usize> {
        self.tiles.binary_search(b).ok()
    }

    /// Sub-collection of the listed members (order and duplicates ignored).
    pub fn select(&self, members: &[usize]) -> Self {
        let tiles = members.iter().map(|&i| self.tiles[i]).collect();
        Self::new(self.lattice, tiles).expect("members of an admitted collection")
    }

    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let tiles = (0..self.len()).filter(|&i| keep(i)).map(|i| self.tiles[i]).collect();
        Self::new(self.lattice, tiles).expect("members of an admitted collection")
    }

    /// Distinct levels present, ascending.
    pub fn levels(&self) -> Vec<u32> {
        let mut l: Vec<u32> = self.tiles.iter().map(|b| b.level).collect();
        l.dedup();
        l
    }
}

pub fn separation_flags(lattice: &Lattice, tiles: &[Bitile]) -> SeparationFlags {
    let s1 = {
        let mut ratios = tiles.iter().map(|b| {
            let (p1, p2) = (lattice.omega_p1(b), lattice.omega_p2(b));
            p1.distance(&p2) / p1.len()
        });
        match ratios.next() {
            None => true,
            Some(r0) => ratios.all(|r| (r - r0).abs() <= 1e-12 * (1.0 + r0)),
        }
    };
    let mut levels: Vec<u32> = tiles.iter().map(|b| b.level).collect();
    levels.sort_unstable();
    levels.dedup();
    let s2 = levels.iter().all(|&l| {
        let mut omegas: Vec<_> =
            tiles.iter().filter(|b| b.level == l).map(|b| lattice.omega(b)).collect();
        omegas.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        omegas.windows(2).all(|w| w[0] == w[1] || !w[0].intersects(&w[1]))
    });
    let width = |l: u32| {
        let b = Bitile { level: l, position: 0, freq: 0 };
        (lattice.omega(&b).len(), lattice.omega_p1(&b).len())
    };
    let k0 = lattice.consts().k0;
    let s3 = levels.iter().enumerate().all(|(i, &coarse)| {
        levels[i + 1..].iter().all(|&fine| width(coarse).0 < width(fine).1 / k0)
    });
    SeparationFlags { s1, s2, s3 }
}

/// Levels `base, base + gap, base + 2 gap, ...` that carry at least one bitile.
pub fn scale_levels(lattice: &Lattice, scale_gap: u32, base: u32) -> Vec<u32> {
    let max = match lattice.max_level() {
        Some(m) => m,
        None => return Vec::new(),
    };
    (0..)
        .map(|t| base + t * scale_gap.max(1))
        .take_while(|&l| l <= max)
        .collect()
}

/// Full lattice on the given levels: every position and every admitted frequency.
pub fn build_on_levels(
    grid: DyadicGrid,
    consts: AdmissibleConstants,
    levels: &[u32],
) -> Result<TileCollection> {
    let lattice = Lattice::new(grid.log2_len(), consts)?;
    let mut tiles = Vec::new();
    for &level in levels {
        let slots = lattice.frequency_slots(level);
        if slots.is_empty() {
            return Err(Error::InvalidParameter { name: "levels", reason: "level has no admissible bitile" });
        }
        for position in 0..1u64 << level {
            tiles.extend(slots.iter().map(|&freq| Bitile { level, position, freq }));
        }
    }
    TileCollection::new(lattice, tiles)
}

/// Full lattice on levels `0, gap, 2 gap, ...`; `scale_gap >= ceil(log2 K0)`.
pub fn build_bitile_collection(
    grid: DyadicGrid,
    consts: AdmissibleConstants,
    scale_gap: u32,
) -> Result<TileCollection> {
    if scale_gap < consts.min_scale_gap() || scale_gap == 0 {
        return Err(Error::InvalidParameter { name: "scale_gap", reason: "below ceil(log2 K0)" });
    }
    let lattice = Lattice::new(grid.log2_len(), consts)?;
    build_on_levels(grid, consts, &scale_levels(&lattice, scale_gap, 0))
}
