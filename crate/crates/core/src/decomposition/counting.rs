use alloc::vec;
use alloc::vec::Vec;

use super::{is_member_of, is_overlapping_at, TopData};
use crate::phaseplane::TileCollection;
use crate::weights::{DyadicInterval, Weight};
use crate::{Error, Result};

/// Whether grid point `i / n` lies in the centred dilation `2^k I` on the torus.
pub(crate) fn in_dilation(interval: &DyadicInterval, k: u32, i: usize, n: usize) -> bool {
    // half-cell units so that every endpoint is an integer
    let n2 = 2 * n as i128;
    let len2 = (n2 as f64 * interval.len()) as i128;
    let span = len2 << k;
    if span >= n2 {
        return true;
    }
    let start2 = (n2 as f64 * interval.start()) as i128 - (span - len2) / 2;
    (2 * i as i128 - start2).rem_euclid(n2) < span
}

/// `N^{[k]} = sum_T 1_{2^k I_T}` sampled on the grid of length `n`.
pub fn counting_function<'a>(tops: impl IntoIterator<Item = &'a DyadicInterval>, k: u32, n: usize) -> Vec<u32> {
    let mut out = vec![0u32; n];
    for top in tops {
        for (i, o) in out.iter_mut().enumerate() {
            if in_dilation(top, k, i, n) {
                *o += 1;
            }
        }
    }
    out
}

/// `w({N > lambda})` for each `lambda`.
pub fn level_set_masses(counts: &[u32], w: &Weight, lambdas: &[f64]) -> Result<Vec<f64>> {
    if counts.len() != w.len() {
        return Err(Error::LengthMismatch { expected: w.len(), found: counts.len() });
    }
    let n = counts.len() as f64;
    Ok(lambdas
        .iter()
        .map(|&l| counts.iter().zip(w.samples()).filter(|(&c, _)| c as f64 > l).map(|(_, &v)| v).sum::<f64>() / n)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    /// 1 or 2.
    pub condition: u8,
    pub trees: (usize, usize),
    pub bitiles: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub separated: bool,
    pub first_violation: Option<Violation>,
    pub pairs_checked: usize,
}

/// Pairwise check of both separation conditions over a family of 2-overlapping trees.
///
/// (i) for `P` in `T`, `P'` in `T' != T` with `|I_P| > |I_P'|`: `C3 omega_P1` and
/// `C3 omega_P'1` are disjoint or `I_P'` misses `I_T`.
/// (ii) distinct elements of the union at equal scale have disjoint
/// `I_P x C3 omega_P1`; a bitile listed in two trees counts as two elements.
pub fn check_well_separated(coll: &TileCollection, trees: &[(TopData, Vec<usize>)]) -> Result<SeparationReport> {
    let lat = coll.lattice();
    let c3 = lat.consts().c3;
    for (top, members) in trees {
        for &i in members {
            let b = coll.tiles().get(i).ok_or(Error::InvalidParameter { name: "trees", reason: "member index out of range" })?;
            if !is_member_of(coll, top, b) || !is_overlapping_at(coll, top, b) {
                return Err(Error::InvalidParameter { name: "trees", reason: "tree is not 2-overlapping" });
            }
        }
    }
    let items: Vec<(usize, usize)> =
        trees.iter().enumerate().flat_map(|(t, (_, m))| m.iter().map(move |&i| (t, i))).collect();
    let mut pairs = 0;
    for (a, &(t, i)) in items.iter().enumerate() {
        for &(u, j) in &items[a + 1..] {
            pairs += 1;
            let (p, q) = (&coll.tiles()[i], &coll.tiles()[j]);
            let (wp, wq) = (lat.omega_p1(p).dilate(c3), lat.omega_p1(q).dilate(c3));
            let violation = if p.level == q.level {
                (p.interval() == q.interval() && wp.intersects(&wq)).then_some(2)
            } else if t != u {
                // orient so that `big` has the larger interval
                let (small_tree, small) = if p.level < q.level { (u, q) } else { (t, p) };
                let big_tree = if small_tree == t { u } else { t };
                let top = trees[big_tree].0.interval;
                let si = small.interval();
                let meets = top.contains(&si) || si.contains(&top);
                (wp.intersects(&wq) && meets).then_some(1)
            } else {
                None
            };
            if let Some(condition) = violation {
                return Ok(SeparationReport {
                    separated: false,
                    first_violation: Some(Violation { condition, trees: (t, u), bitiles: (i, j) }),
                    pairs_checked: pairs,
                });
            }
        }
    }
    Ok(SeparationReport { separated: true, first_violation: None, pairs_checked: pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(top: &DyadicInterval, k: u32, n: usize) -> Vec<u32> {
        // interval arithmetic in f64 on the torus
        let len = top.len() * (1u64 << k) as f64;
        let a = top.center() - len / 2.0;
        (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                let d = (x - a).rem_euclid(1.0);
                u32::from(len >= 1.0 || d < len)
            })
            .collect()
    }

    #[test]
    fn dilations_match_direct_evaluation() {
        let n = 64;
        for level in 0..=6 {
            for index in 0..1u64 << level {
                let top = DyadicInterval::new(level, index).unwrap();
                for k in 0..5 {
                    assert_eq!(counting_function([&top], k, n), oracle(&top, k, n), "{level} {index} {k}");
                }
            }
        }
    }

    #[test]
    fn counting_examples() {
        let n = 32;
        assert!(counting_function(&[], 2, n).iter().all(|&c| c == 0));
        let top = DyadicInterval::new(2, 1).unwrap();
        let c = counting_function([&top], 0, n);
        for (i, v) in c.iter().enumerate() {
            assert_eq!(*v, u32::from(top.contains_point(i as f64 / n as f64)));
        }
        let inner = DyadicInterval::new(3, 2).unwrap();
        let c = counting_function([&top, &inner], 0, n);
        assert_eq!(*c.iter().max().unwrap(), 2);
        for (i, v) in c.iter().enumerate() {
            assert_eq!(*v == 2, inner.contains_point(i as f64 / n as f64));
        }
        let tops = [top, inner, DyadicInterval::new(1, 1).unwrap()];
        let c0 = counting_function(&tops, 0, n);
        let total: u32 = c0.iter().sum();
        assert!((total as f64 / n as f64 - tops.iter().map(|t| t.len()).sum::<f64>()).abs() < 1e-15);
        for k in 0..4 {
            let (a, b) = (counting_function(&tops, k, n), counting_function(&tops, k + 1, n));
            assert!(a.iter().zip(&b).all(|(x, y)| x <= y));
        }
    }

    #[test]
    fn level_sets() {
        let w = Weight::lebesgue(8).unwrap();
        let m = level_set_masses(&[0, 1, 2, 3, 0, 0, 1, 1], &w, &[0.0, 1.0, 2.5]).unwrap();
        assert_eq!(m, vec![5.0 / 8.0, 2.0 / 8.0, 1.0 / 8.0]);
    }
}
