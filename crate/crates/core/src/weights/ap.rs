use super::{Arc, DyadicGrid, Weight};
use crate::math;
use crate::{Error, Result};

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 1.0 {
        Err(Error::Exponent { name: "p", value: p })
    } else {
        Ok(())
    }
}

/// `avg_J(w) * avg_J(w^{-1/(p-1)})^{p-1}` maximised over `arcs`.
pub fn ap_constant_on(w: &Weight, p: f64, arcs: &[Arc]) -> Result<f64> {
    check_p(p)?;
    let n = w.len();
    let e = -1.0 / (p - 1.0);
    let s = w.samples();
    let dual: alloc::vec::Vec<f64> = s.iter().map(|&v| math::powf(v, e)).collect();
    let mut best = 0.0f64;
    for arc in arcs {
        let (mut a, mut b) = (0.0, 0.0);
        for i in arc.cell_indices(n) {
            a += s[i];
            b += dual[i];
        }
        let len = arc.len as f64;
        best = best.max((a / len) * math::powf(b / len, p - 1.0));
    }
    Ok(best)
}

pub(super) fn ap_over_arcs(w: &Weight, p: f64) -> f64 {
    ap_constant_on(w, p, &DyadicGrid::for_len(w.len()).all_arcs()).unwrap_or(f64::NAN)
}

/// `[w]_{A_p}` over dyadic and half-shifted dyadic intervals down to the grid scale.
pub fn ap_constant(w: &Weight, p: f64) -> Result<f64> {
    ap_constant_on(w, p, &DyadicGrid::for_len(w.len()).all_arcs())
}

/// Least `gamma` with `w(2^k I) <= 2^{gamma k} w(I)` for all dyadic `I` and
/// `2^k |I| <= 1`, computed as the largest observed `log2(w(2^k I)/w(I))/k`.
pub(super) fn exact_doubling(w: &Weight) -> f64 {
    let grid = DyadicGrid::for_len(w.len());
    let mut gamma = f64::NEG_INFINITY;
    for d in grid.intervals() {
        let m = w.dyadic_mass(d);
        for k in 1..=d.level {
            let ratio = w.dilated_mass(d, k) / m;
            gamma = gamma.max(math::log2(ratio) / k as f64);
        }
    }
    gamma
}

/// Cached doubling exponent.
pub fn doubling_exponent(w: &Weight) -> f64 {
    w.gamma()
}
