use alloc::vec;
use alloc::vec::Vec;

use super::{Certificate, DecompositionResult, SelectedTree, TopData, TreeRole};
use crate::fourier::Signal;
use crate::phaseplane::{SizeEvaluator, TileCollection};
use crate::weights::Weight;
use crate::{Error, Result};

/// Greedy selection by size: repeatedly take the 2-overlapping tree with
/// `||S_{T2} f||^2_{L^2(w)} >= alpha^2 w(I_{T2})` and minimal `xi`, then remove the
/// maximal tree with its top. Stops when the remainder has size below `alpha`.
pub fn size_decompose(coll: &TileCollection, f: &Signal, w: &Weight, alpha: f64) -> Result<DecompositionResult> {
    let eval = SizeEvaluator::new(coll, f, w)?;
    size_decompose_with(coll, &eval, w, alpha, None)
}

/// As [`size_decompose`] on the alive part of `coll`, using a prepared evaluator.
pub fn size_decompose_with(
    coll: &TileCollection,
    eval: &SizeEvaluator<'_>,
    w: &Weight,
    alpha: f64,
    alive: Option<Vec<bool>>,
) -> Result<DecompositionResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter { name: "alpha", reason: "must be positive" });
    }
    let mut alive = alive.unwrap_or_else(|| vec![true; coll.len()]);
    let index = eval.index();
    let mut trees = Vec::new();
    loop {
        let mut best: Option<(usize, f64)> = None;
        for (t, top) in index.tops().iter().enumerate() {
            let energy = eval.tree_energy(t, &alive);
            if energy <= 0.0 || energy < alpha * alpha * w.dyadic_mass(top.interval) {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, _)) => {
                    let other = &index.tops()[b];
                    (top.xi(), top.tie_key()) < (other.xi(), other.tie_key())
                }
            };
            if better {
                best = Some((t, energy));
            }
        }
        let Some((t, energy)) = best else { break };
        let top = index.tops()[t];
        let witness = eval.overlapping_members(t, &alive);
        let members: Vec<usize> = index.members_at(t).iter().copied().filter(|&i| alive[i]).collect();
        for &i in &members {
            alive[i] = false;
        }
        trees.push(SelectedTree {
            top: TopData::from(top),
            role: TreeRole::Selected,
            members,
            witness,
            certificate: Certificate::Size { alpha, top_mass: w.dyadic_mass(top.interval), energy },
        });
    }
    let remainder = (0..coll.len()).filter(|&i| alive[i]).collect();
    Ok(DecompositionResult { input_len: coll.len(), trees, remainder })
}
