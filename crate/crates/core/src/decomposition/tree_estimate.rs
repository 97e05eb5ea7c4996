use alloc::vec;
use alloc::vec::Vec;

use super::counting::in_dilation;
use super::TopData;
use crate::fourier::Signal;
use crate::math;
use crate::phaseplane::{
    model_operator, DensityEvaluator, DensityMode, Linearization, SizeEvaluator, TileCollection, TopIndex,
};
use crate::weights::{weighted_lp_norm_of, Weight};
use crate::{Error, Result};

/// Decay exponent divided out of the annulus ratios.
pub const TAIL_DECAY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeRatio {
    pub value: f64,
    /// `size(T) density(T) = 0`, or an annulus that is empty on the torus.
    pub degenerate: bool,
}

/// All tree-estimate monitors for one tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeEstimate {
    pub size: f64,
    pub density: f64,
    pub improved_density: f64,
    /// `||1_{I_T} g C_T f||_{L^s(w)} / (w(I_T)^{1/s} size density)`.
    pub core: f64,
    /// `(k, ratio)` for the annuli `2^{k+1} I_T \ 2^k I_T`, times `2^{TAIL_DECAY k}`.
    pub tails: Vec<(u32, f64)>,
    /// `||g C_T f||_{L^1(w)} / (w(I_T) size density)`.
    pub global: f64,
    /// `||g C_T f||_{L^1(w)} / (w(I_T) size density~)` when the bitiles are pairwise disjoint.
    pub improved: Option<f64>,
    pub degenerate: bool,
}

struct Prepared {
    size: f64,
    density: f64,
    improved_density: f64,
    pairwise_disjoint: bool,
    /// `|g C_T f|` on the grid.
    product: Vec<f64>,
}

fn prepare(
    coll: &TileCollection,
    members: &[usize],
    f: &Signal,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
) -> Result<Prepared> {
    let sub = coll.select(members);
    let size = SizeEvaluator::new(&sub, f, w)?.size();
    let eval = DensityEvaluator::new(g, w, lin, sub.consts().d)?;
    let index = TopIndex::new(&sub);
    let alive = vec![true; sub.len()];
    let density = eval.density_of(&sub, &index, &alive, DensityMode::Standard);
    let improved_density = eval.density_of(&sub, &index, &alive, DensityMode::Improved);
    let lat = sub.lattice();
    let tiles = sub.tiles();
    let pairwise_disjoint = tiles.iter().enumerate().all(|(a, p)| {
        tiles[a + 1..].iter().all(|q| {
            let (ip, iq) = (p.interval(), q.interval());
            !(ip.contains(&iq) || iq.contains(&ip)) || !lat.omega(p).intersects(&lat.omega(q))
        })
    });
    let ct = model_operator(&sub, f, lin)?;
    let product = ct.samples().iter().zip(g.samples()).map(|(a, b)| math::abs(a * b)).collect();
    Ok(Prepared { size, density, improved_density, pairwise_disjoint, product })
}

fn check_s(s: f64, lin: &Linearization) -> Result<()> {
    if !(s >= 1.0 && s <= lin.r_conj()) {
        return Err(Error::Exponent { name: "s", value: s });
    }
    Ok(())
}

fn masked_norm(prep: &Prepared, w: &Weight, s: f64, keep: impl Fn(usize) -> bool) -> Result<f64> {
    let v: Vec<f64> = prep.product.iter().enumerate().map(|(i, &x)| if keep(i) { x } else { 0.0 }).collect();
    weighted_lp_norm_of(&v, s, w)
}

fn shell_ratio(prep: &Prepared, top: &TopData, w: &Weight, s: f64, k: u32, denom: f64) -> Result<TreeRatio> {
    let n = w.len();
    if top.interval.len() * (1u64 << k) as f64 >= 1.0 {
        return Ok(TreeRatio { value: 0.0, degenerate: true });
    }
    let norm = masked_norm(prep, w, s, |i| {
        in_dilation(&top.interval, k + 1, i, n) && !in_dilation(&top.interval, k, i, n)
    })?;
    Ok(TreeRatio { value: norm * math::powf(2.0, TAIL_DECAY * k as f64) / denom, degenerate: false })
}

/// Tree-estimate ratio for the tree `members` with top `top`: `shell = -1` is the
/// core estimate on `I_T`, `shell = k >= 0` the annulus `2^{k+1} I_T \ 2^k I_T`.
#[allow(clippy::too_many_arguments)]
pub fn tree_estimate_ratio(
    coll: &TileCollection,
    top: &TopData,
    members: &[usize],
    f: &Signal,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
    s: f64,
    shell: i32,
) -> Result<TreeRatio> {
    check_s(s, lin)?;
    if shell < -1 {
        return Err(Error::InvalidParameter { name: "shell", reason: "must be at least -1" });
    }
    let prep = prepare(coll, members, f, g, w, lin)?;
    let denom = math::powf(w.dyadic_mass(top.interval), 1.0 / s) * prep.size * prep.density;
    if denom <= 0.0 {
        return Ok(TreeRatio { value: 0.0, degenerate: true });
    }
    if shell == -1 {
        let n = w.len();
        let norm = masked_norm(&prep, w, s, |i| top.interval.contains_point(i as f64 / n as f64))?;
        Ok(TreeRatio { value: norm / denom, degenerate: false })
    } else {
        shell_ratio(&prep, top, w, s, shell as u32, denom)
    }
}

/// Core, annuli `k = 1..=max_shell`, global `L^1` and, for disjoint bitiles, improved ratios.
#[allow(clippy::too_many_arguments)]
pub fn tree_estimates(
    coll: &TileCollection,
    top: &TopData,
    members: &[usize],
    f: &Signal,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
    s: f64,
    max_shell: u32,
) -> Result<TreeEstimate> {
    check_s(s, lin)?;
    let prep = prepare(coll, members, f, g, w, lin)?;
    let mass = w.dyadic_mass(top.interval);
    let sd = prep.size * prep.density;
    let mut out = TreeEstimate {
        size: prep.size,
        density: prep.density,
        improved_density: prep.improved_density,
        core: 0.0,
        tails: Vec::new(),
        global: 0.0,
        improved: None,
        degenerate: sd <= 0.0,
    };
    if out.degenerate {
        return Ok(out);
    }
    let n = w.len();
    let denom = math::powf(mass, 1.0 / s) * sd;
    out.core = masked_norm(&prep, w, s, |i| top.interval.contains_point(i as f64 / n as f64))? / denom;
    for k in 1..=max_shell {
        let r = shell_ratio(&prep, top, w, s, k, denom)?;
        if !r.degenerate {
            out.tails.push((k, r.value));
        }
    }
    let l1 = weighted_lp_norm_of(&prep.product, 1.0, w)?;
    out.global = l1 / (mass * sd);
    if prep.pairwise_disjoint && prep.improved_density > 0.0 {
        out.improved = Some(l1 / (mass * prep.size * prep.improved_density));
    }
    Ok(out)
}
