use alloc::vec;
use alloc::vec::Vec;

use super::density::density_decompose_with;
use super::size::size_decompose_with;
use super::{Certificate, SelectedTree, TopData, TreeRole};
use crate::fourier::Signal;
use crate::math;
use crate::phaseplane::{DensityEvaluator, DensityMode, Linearization, SizeEvaluator, TileCollection, TopIndex};
use crate::weights::Weight;
use crate::{Error, Result};

/// One nonempty level `P_n` of the two-parameter decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelPart {
    pub n: i64,
    pub trees: Vec<SelectedTree>,
    /// Union of the tree members, sorted.
    pub members: Vec<usize>,
    /// `size(P_n)` and `density(P_n)` by re-evaluation.
    pub size: f64,
    pub density: f64,
    /// `2^{-n/(2 q0)} E_1` and `2^{-n/r'}`.
    pub size_bound: f64,
    pub density_bound: f64,
    /// `sum_{T in T_n} w(I_T)` over selected trees.
    pub top_mass: f64,
}

impl LevelPart {
    pub fn bounds_hold(&self) -> bool {
        self.size <= self.size_bound && self.density <= self.density_bound
    }

    /// `c_n` in `sum w(I_T) <= c_n 2^n`.
    pub fn mass_constant(&self) -> f64 {
        self.top_mass * math::powf(2.0, -(self.n as f64))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoParameterResult {
    pub input_len: usize,
    pub e1: f64,
    pub levels: Vec<LevelPart>,
}

impl TwoParameterResult {
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![0u32; self.input_len];
        for &i in self.levels.iter().flat_map(|l| l.members.iter()) {
            if i >= self.input_len {
                return false;
            }
            seen[i] += 1;
        }
        seen.iter().all(|&c| c == 1)
    }

    pub fn bounds_hold(&self) -> bool {
        self.levels.iter().all(LevelPart::bounds_hold)
    }

    pub fn max_mass_constant(&self) -> f64 {
        self.levels.iter().map(LevelPart::mass_constant).fold(0.0, f64::max)
    }
}

/// Largest `n` with `size <= 2^{-n/(2 q0)} e1` and `density <= 2^{-n/r'}`.
fn start_level(size: f64, density: f64, e1: f64, q0: f64, rc: f64) -> i64 {
    let mut a = f64::INFINITY;
    if size > 0.0 {
        a = 2.0 * q0 * math::log2(e1 / size);
    }
    if density > 0.0 {
        a = a.min(-rc * math::log2(density));
    }
    if !a.is_finite() {
        return 0;
    }
    let mut n = math::floor(a) as i64;
    while size > level_size(n, e1, q0) || density > level_density(n, rc) {
        n -= 1;
    }
    n
}

fn level_size(n: i64, e1: f64, q0: f64) -> f64 {
    math::powf(2.0, -(n as f64) / (2.0 * q0)) * e1
}

fn level_density(n: i64, rc: f64) -> f64 {
    math::powf(2.0, -(n as f64) / rc)
}

/// Splits `P` into levels `P_n`, each a union of trees, by alternating size and
/// density selection at thresholds halved per level, skipping empty levels.
#[allow(clippy::too_many_arguments)]
pub fn two_parameter_decompose(
    coll: &TileCollection,
    f: &Signal,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
    q0: f64,
    r: f64,
) -> Result<TwoParameterResult> {
    if !(q0 > 1.0 && q0.is_finite()) {
        return Err(Error::Exponent { name: "q0", value: q0 });
    }
    if !(r > 2.0 * q0) || (r - lin.r()).abs() > 0.0 {
        return Err(Error::InvalidParameter { name: "r", reason: "need r > 2 q0 matching the linearization" });
    }
    let rc = lin.r_conj();
    let n_pts = w.len() as f64;
    let support: f64 = f.samples().iter().zip(w.samples()).filter(|(z, _)| z.norm_sqr() > 0.0).map(|(_, &v)| v).sum();
    let e1 = math::powf(support / n_pts, 1.0 / (2.0 * q0));
    let mut result = TwoParameterResult { input_len: coll.len(), e1, levels: Vec::new() };
    if coll.is_empty() {
        return Ok(result);
    }
    let size_eval = SizeEvaluator::new(coll, f, w)?;
    let dens_eval = DensityEvaluator::new(g, w, lin, coll.consts().d)?;
    let index = TopIndex::new(coll);
    let mut alive = vec![true; coll.len()];
    let mut n = i64::MIN;
    while alive.iter().any(|&a| a) {
        let size = size_eval.size_of(&alive).0;
        let density = dens_eval.density_of(coll, &index, &alive, DensityMode::Standard);
        n = n.max(start_level(size, density, e1, q0, rc));
        let mut trees = Vec::new();
        if size == 0.0 && density == 0.0 {
            let rest: Vec<usize> = (0..coll.len()).filter(|&i| alive[i]).collect();
            for i in rest {
                let b = coll.tiles()[i];
                alive[i] = false;
                trees.push(SelectedTree {
                    top: TopData { interval: b.interval(), xi: coll.lattice().omega_p2(&b).center() },
                    role: TreeRole::Selected,
                    members: vec![i],
                    witness: Vec::new(),
                    certificate: Certificate::Residual,
                });
            }
        } else {
            let alpha = level_size(n + 1, e1, q0);
            if size > 0.0 && alpha > 0.0 {
                let part = size_decompose_with(coll, &size_eval, w, alpha, Some(alive.clone()))?;
                alive = part.remainder_mask();
                trees.extend(part.trees);
            }
            let part = density_decompose_with(coll, &index, &dens_eval, w, level_density(n + 1, rc), Some(alive.clone()))?;
            alive = part.remainder_mask();
            let offset = trees.len();
            trees.extend(part.trees.into_iter().map(|mut t| {
                if let Certificate::Companion { parent } = &mut t.certificate {
                    *parent += offset;
                }
                t
            }));
        }
        if !trees.is_empty() {
            let mut members: Vec<usize> = trees.iter().flat_map(|t| t.members.iter().copied()).collect();
            members.sort_unstable();
            let mut mask = vec![false; coll.len()];
            for &i in &members {
                mask[i] = true;
            }
            let top_mass = trees
                .iter()
                .filter(|t| t.role == TreeRole::Selected)
                .map(|t| w.dyadic_mass(t.top.interval))
                .sum();
            result.levels.push(LevelPart {
                n,
                size: size_eval.size_of(&mask).0,
                density: dens_eval.density_of(coll, &index, &mask, DensityMode::Standard),
                size_bound: level_size(n, e1, q0),
                density_bound: level_density(n, rc),
                top_mass,
                members,
                trees,
            });
        }
        n += 1;
    }
    Ok(result)
}
