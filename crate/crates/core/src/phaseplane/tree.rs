use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{frequency_cell, Bitile, FreqInterval, Lattice, TileCollection};
use crate::math;
use crate::weights::DyadicInterval;

/// Tree top `(I_T, xi_T)` with `omega_T` the frequency cell of width `1/|I_T|`
/// and index `freq`; `xi_T` is its centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeTop {
    pub interval: DyadicInterval,
    pub freq: i64,
}

impl TreeTop {
    pub fn omega(&self) -> FreqInterval {
        frequency_cell(self.interval.level, self.freq)
    }

    pub fn xi(&self) -> f64 {
        self.omega().center()
    }

    /// Tops with `xi` shifted by `delta` cells of `omega_T`.
    pub fn shifted(&self, delta: i64) -> Self {
        Self { interval: self.interval, freq: self.freq + delta }
    }

    /// Canonical tie-break key: leftmost `I_T`, then lowest `omega_T`, then coarsest level.
    pub fn tie_key(&self) -> (u64, i64, u32) {
        let shift = 62 - self.interval.level;
        (self.interval.index << shift, self.freq << self.interval.level, self.interval.level)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Overlapping2,
    Lacunary2,
    Mixed,
}

/// `I_P` inside `I_T` and `omega_T` inside `omega~_P`.
pub fn is_member(lattice: &Lattice, top: &TreeTop, b: &Bitile) -> bool {
    top.interval.contains(&b.interval()) && lattice.omega_tilde(b).contains_interval(&top.omega())
}

/// `xi_T` in `C2 omega_P2`.
pub fn is_overlapping(lattice: &Lattice, top: &TreeTop, b: &Bitile) -> bool {
    lattice.omega_p2(b).dilate(lattice.consts().c2).contains(top.xi())
}

/// Bitiles of a collection (by index) sharing a top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    pub top: TreeTop,
    pub members: Vec<usize>,
}

impl Tree {
    pub fn new(top: TreeTop, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Self { top, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_valid(&self, coll: &TileCollection) -> bool {
        self.members.iter().all(|&i| i < coll.len() && is_member(coll.lattice(), &self.top, &coll.tiles()[i]))
    }

    pub fn kind(&self, coll: &TileCollection) -> TreeKind {
        let lat = coll.lattice();
        let over = self.members.iter().filter(|&&i| is_overlapping(lat, &self.top, &coll.tiles()[i])).count();
        if over == self.members.len() {
            TreeKind::Overlapping2
        } else if over == 0 {
            TreeKind::Lacunary2
        } else {
            TreeKind::Mixed
        }
    }

    /// `(2-overlapping part, 2-lacunary part)` with the same top.
    pub fn split(&self, coll: &TileCollection) -> (Tree, Tree) {
        let lat = coll.lattice();
        let (o, l): (Vec<usize>, Vec<usize>) =
            self.members.iter().partition(|&&i| is_overlapping(lat, &self.top, &coll.tiles()[i]));
        (Tree { top: self.top, members: o }, Tree { top: self.top, members: l })
    }
}

/// Range of top frequency indices at `level` whose cell fits in `omega~_P`.
fn top_freqs(lattice: &Lattice, b: &Bitile, level: u32) -> core::ops::RangeInclusive<i64> {
    let t = lattice.omega_tilde(b);
    let w = (1u64 << level) as f64;
    let lo = math::ceil((t.lo + 0.5) / w) as i64;
    let hi = math::floor((t.hi + 0.5) / w) as i64 - 1;
    lo..=hi
}

/// Every restricted top carrying at least one member, with its maximal tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TopIndex {
    tops: Vec<TreeTop>,
    members: Vec<Vec<usize>>,
}

impl TopIndex {
    pub fn new(coll: &TileCollection) -> Self {
        let lat = coll.lattice();
        let mut map: BTreeMap<TreeTop, Vec<usize>> = BTreeMap::new();
        for (i, b) in coll.tiles().iter().enumerate() {
            for level in 0..=b.level {
                let interval = b.interval().ancestor(level);
                for freq in top_freqs(lat, b, level) {
                    map.entry(TreeTop { interval, freq }).or_default().push(i);
                }
            }
        }
        let (tops, members) = map.into_iter().unzip();
        Self { tops, members }
    }

    pub fn len(&self) -> usize {
        self.tops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tops.is_empty()
    }

    pub fn tops(&self) -> &[TreeTop] {
        &self.tops
    }

    /// Members of the maximal tree at top number `t`, ascending.
    pub fn members_at(&self, t: usize) -> &[usize] {
        &self.members[t]
    }

    pub fn find(&self, top: &TreeTop) -> Option<usize> {
        self.tops.binary_search(top).ok()
    }

    pub fn members(&self, top: &TreeTop) -> &[usize] {
        self.find(top).map(|t| self.members[t].as_slice()).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TreeTop, &[usize])> {
        self.tops.iter().zip(self.members.iter().map(Vec::as_slice))
    }
}
