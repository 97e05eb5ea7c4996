use alloc::vec::Vec;

/// Dyadic interval `[index * 2^-level, (index + 1) * 2^-level)` of the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub level: u32,
    pub index: u64,
}

impl DyadicInterval {
    pub const UNIT: DyadicInterval = DyadicInterval { level: 0, index: 0 };

    pub fn new(level: u32, index: u64) -> Option<Self> {
        (level < 63 && index < 1u64 << level).then_some(Self { level, index })
    }

    #[inline]
    pub fn len(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    #[inline]
    pub fn start(&self) -> f64 {
        self.index as f64 * self.len()
    }

    #[inline]
    pub fn end(&self) -> f64 {
        (self.index + 1) as f64 * self.len()
    }

    #[inline]
    pub fn center(&self) -> f64 {
        (self.index as f64 + 0.5) * self.len()
    }

    /// Half-open containment of a point reduced mod 1.
    pub fn contains_point(&self, x: f64) -> bool {
        let x = x - crate::math::floor(x);
        x >= self.start() && x < self.end()
    }

    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.level >= self.level && other.index >> (other.level - self.level) == self.index
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self { level: self.level - 1, index: self.index >> 1 })
    }

    /// Ancestor at `level <= self.level`.
    pub fn ancestor(&self, level: u32) -> Self {
        debug_assert!(level <= self.level);
        Self { level, index: self.index >> (self.level - level) }
    }

    pub fn children(&self) -> [Self; 2] {
        let l = self.level + 1;
        [Self { level: l, index: 2 * self.index }, Self { level: l, index: 2 * self.index + 1 }]
    }

    /// Grid cells `start .. start + count` covered on an `N = 2^log2_len` grid.
    pub fn cells(&self, log2_len: u32) -> Arc {
        debug_assert!(self.level <= log2_len);
        let count = 1usize << (log2_len - self.level);
        Arc { start: self.index as usize * count, len: count }
    }
}

/// Union of grid cells `start, start + 1, ..., start + len - 1` taken mod `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub start: usize,
    pub len: usize,
}

impl Arc {
    pub fn cell_indices(&self, n: usize) -> impl Iterator<Item = usize> {
        let s = self.start;
        (0..self.len).map(move |t| (s + t) % n)
    }
}

/// Dyadic intervals of `[0, 1)` down to the grid scale `1/N`, plus the
/// half-shifted copies whose endpoints are still grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGrid {
    log2_len: u32,
}

impl DyadicGrid {
    pub fn new(log2_len: u32) -> Self {
        Self { log2_len }
    }

    pub fn for_len(n: usize) -> Self {
        Self { log2_len: n.trailing_zeros() }
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

    pub fn level(&self, level: u32) -> impl Iterator<Item = DyadicInterval> {
        (0..1u64 << level).map(move |index| DyadicInterval { level, index })
    }

    pub fn intervals(&self) -> impl Iterator<Item = DyadicInterval> + '_ {
        (0..=self.log2_len).flat_map(move |l| self.level(l))
    }

    /// Intervals shifted by half their length, for levels `1 .. L - 1`.
    pub fn shifted_arcs(&self) -> Vec<Arc> {
        let n = self.len();
        let mut out = Vec::new();
        for level in 1..self.log2_len {
            let len = n >> level;
            for i in 0..1usize << level {
                out.push(Arc { start: (i * len + len / 2) % n, len });
            }
        }
        out
    }

    /// Every dyadic interval followed by every shifted copy.
    pub fn all_arcs(&self) -> Vec<Arc> {
        let mut out: Vec<Arc> = self.intervals().map(|d| d.cells(self.log2_len)).collect();
        out.extend(self.shifted_arcs());
        out
    }
}
