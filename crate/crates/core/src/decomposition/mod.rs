//! Greedy tree selection by size and by density, counting functions,
//! well-separatedness, the two-parameter pipeline and tree-estimate monitors.

mod counting;
mod density;
mod size;
mod tree_estimate;
mod two_param;

use alloc::vec::Vec;

use crate::math;
use crate::phaseplane::{Bitile, FreqInterval, TileCollection, TreeTop};
use crate::weights::DyadicInterval;

pub use counting::{check_well_separated, counting_function, level_set_masses, SeparationReport, Violation};
pub use density::density_decompose;
pub use size::size_decompose;
pub use tree_estimate::{tree_estimate_ratio, tree_estimates, TreeEstimate, TreeRatio};
pub use two_param::{two_parameter_decompose, LevelPart, TwoParameterResult};

/// Top `(I_T, xi_T)` with an arbitrary real top frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopData {
    pub interval: DyadicInterval,
    pub xi: f64,
}

impl TopData {
    /// `[xi - 1/(2|I|), xi + 1/(2|I|))`.
    pub fn omega(&self) -> FreqInterval {
        let h = 0.5 / self.interval.len();
        FreqInterval::new(self.xi - h, self.xi + h)
    }
}

impl From<TreeTop> for TopData {
    fn from(t: TreeTop) -> Self {
        Self { interval: t.interval, xi: t.xi() }
    }
}

/// Membership test for an arbitrary top.
pub fn is_member_of(coll: &TileCollection, top: &TopData, b: &Bitile) -> bool {
    top.interval.contains(&b.interval()) && coll.lattice().omega_tilde(b).contains_interval(&top.omega())
}

/// `xi_T` in `C2 omega_P2`.
pub fn is_overlapping_at(coll: &TileCollection, top: &TopData, b: &Bitile) -> bool {
    let lat = coll.lattice();
    lat.omega_p2(b).dilate(lat.consts().c2).contains(top.xi)
}

/// Alive members of the maximal tree with the given top.
pub fn maximal_tree(coll: &TileCollection, top: &TopData, alive: &[bool]) -> Vec<usize> {
    (0..coll.len()).filter(|&i| alive[i] && is_member_of(coll, top, &coll.tiles()[i])).collect()
}

/// Why a tree was selected, stored numerically so it can be re-checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certificate {
    /// `w(I_T) <= alpha^{-2} ||S_{T2} f||^2_{L^2(w)}`.
    Size { alpha: f64, top_mass: f64, energy: f64 },
    /// `w(I_T) <= alpha^{-r'} int chi~^D |g|^{r'} sum_{N_j in omega_T} |d_j|^{r'} w`.
    Density { alpha: f64, r_conj: f64, top_mass: f64, integral: f64 },
    /// Companion tree removed together with the selected tree at `parent`.
    Companion { parent: usize },
    /// Bitiles left once size and density both vanish, kept as singleton trees.
    Residual,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        match *self {
            Certificate::Size { alpha, top_mass, energy } => energy >= alpha * alpha * top_mass,
            Certificate::Density { alpha, r_conj, top_mass, integral } => {
                integral > math::powf(alpha, r_conj) * top_mass
            }
            Certificate::Companion { .. } | Certificate::Residual => true,
        }
    }

    /// The selection inequality with an unsquared norm, `||S_{T2} f|| >= alpha^2 w(I_T)`.
    pub fn unsquared_form(&self) -> Option<bool> {
        match *self {
            Certificate::Size { alpha, top_mass, energy } => Some(math::sqrt(energy) >= alpha * alpha * top_mass),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeRole {
    Selected,
    /// Top frequency `xi_T - 1/(2|I_T|)`.
    Plus,
    /// Top frequency `xi_T + 1/(2|I_T|)`.
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectedTree {
    pub top: TopData,
    pub role: TreeRole,
    /// Indices into the input collection.
    pub members: Vec<usize>,
    /// 2-overlapping witness `T2` for size selections.
    pub witness: Vec<usize>,
    pub certificate: Certificate,
}

/// Ordered selected trees plus the untouched remainder, all by index into the input.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub input_len: usize,
    pub trees: Vec<SelectedTree>,
    pub remainder: Vec<usize>,
}

impl DecompositionResult {
    /// Selected trees and remainder cover the input exactly once.
    pub fn is_partition(&self) -> bool {
        let mut seen = alloc::vec![0u32; self.input_len];
        for i in self.trees.iter().flat_map(|t| t.members.iter()).chain(self.remainder.iter()) {
            if *i >= self.input_len {
                return false;
            }
            seen[*i] += 1;
        }
        seen.iter().all(|&c| c == 1)
    }

    pub fn remainder_collection(&self, coll: &TileCollection) -> TileCollection {
        coll.select(&self.remainder)
    }

    pub fn selected(&self) -> impl Iterator<Item = &SelectedTree> {
        self.trees.iter().filter(|t| t.role == TreeRole::Selected)
    }

    pub fn certificates_hold(&self) -> bool {
        self.trees.iter().all(|t| t.certificate.holds())
    }

    /// Alive mask of the remainder.
    /// Size-selected trees restricted to their 2-overlapping witnesses.
    pub fn witness_trees(&self) -> Vec<(TopData, Vec<usize>)> {
        self.trees
            .iter()
            .filter(|t| matches!(t.certificate, Certificate::Size { .. }))
            .map(|t| (t.top, t.witness.clone()))
            .collect()
    }

    pub fn remainder_mask(&self) -> Vec<bool> {
        let mut alive = alloc::vec![false; self.input_len];
        for &i in &self.remainder {
            alive[i] = true;
        }
        alive
    }
}
