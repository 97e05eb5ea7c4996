use alloc::vec;
use alloc::vec::Vec;

use super::{maximal_tree, Certificate, DecompositionResult, SelectedTree, TopData, TreeRole};
use crate::fourier::Signal;
use crate::math;
use crate::phaseplane::{DensityEvaluator, Linearization, TileCollection, TopIndex};
use crate::weights::Weight;
use crate::{Error, Result};

/// Greedy selection by density: among tops whose density exceeds `alpha` and
/// that still carry a bitile, take the one with largest `|I_T|`, remove its
/// maximal tree and then the maximal trees at `xi_T -+ 1/(2|I_T|)`.
pub fn density_decompose(
    coll: &TileCollection,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
    alpha: f64,
) -> Result<DecompositionResult> {
    let eval = DensityEvaluator::new(g, w, lin, coll.consts().d)?;
    let index = TopIndex::new(coll);
    density_decompose_with(coll, &index, &eval, w, alpha, None)
}

pub fn density_decompose_with(
    coll: &TileCollection,
    index: &TopIndex,
    eval: &DensityEvaluator<'_>,
    w: &Weight,
    alpha: f64,
    alive: Option<Vec<bool>>,
) -> Result<DecompositionResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter { name: "alpha", reason: "must be positive" });
    }
    let rc = eval.r_conj();
    let threshold = math::powf(alpha, rc);
    let mut alive = alive.unwrap_or_else(|| vec![true; coll.len()]);
    // density of a top does not depend on which bitiles are still present
    let violating: Vec<(usize, f64, f64)> = index
        .tops()
        .iter()
        .enumerate()
        .filter(|(t, _)| index.members_at(*t).iter().any(|&i| alive[i]))
        .filter_map(|(t, top)| {
            let mass = w.dyadic_mass(top.interval);
            let integral = eval.integral(&top.interval, &top.omega());
            (integral > threshold * mass).then_some((t, mass, integral))
        })
        .collect();
    let mut order: Vec<&(usize, f64, f64)> = violating.iter().collect();
    order.sort_by_key(|(t, _, _)| {
        let top = index.tops()[*t];
        (top.interval.level, top.tie_key())
    });
    let mut trees = Vec::new();
    for &&(t, top_mass, integral) in &order {
        let top = index.tops()[t];
        let members: Vec<usize> = index.members_at(t).iter().copied().filter(|&i| alive[i]).collect();
        if members.is_empty() {
            continue;
        }
        for &i in &members {
            alive[i] = false;
        }
        let parent = trees.len();
        let data = TopData::from(top);
        trees.push(SelectedTree {
            top: data,
            role: TreeRole::Selected,
            members,
            witness: Vec::new(),
            certificate: Certificate::Density { alpha, r_conj: rc, top_mass, integral },
        });
        let half = 0.5 / top.interval.len();
        for (role, xi) in [(TreeRole::Plus, data.xi - half), (TreeRole::Minus, data.xi + half)] {
            let companion = TopData { interval: top.interval, xi };
            let members = maximal_tree(coll, &companion, &alive);
            if members.is_empty() {
                continue;
            }
            for &i in &members {
                alive[i] = false;
            }
            trees.push(SelectedTree {
                top: companion,
                role,
                members,
                witness: Vec::new(),
                certificate: Certificate::Companion { parent },
            });
        }
    }
    let remainder = (0..coll.len()).filter(|&i| alive[i]).collect();
    Ok(DecompositionResult { input_len: coll.len(), trees, remainder })
}
