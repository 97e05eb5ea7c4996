use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::norms::coefficients;
use super::{Linearization, PacketSpectrum, TileCollection};
use crate::fourier::variation::{check_exponent, variation_dp, VariationMode};
use crate::fourier::Signal;
use crate::math;
use crate::weights::Weight;
use crate::{Error, Result};

/// `phi_{P1}` sampled on the grid for every bitile.
#[derive(Debug, Clone)]
pub struct PacketTable {
    packets: Vec<Signal>,
}

impl PacketTable {
    pub fn new(coll: &TileCollection) -> Result<Self> {
        let lat = coll.lattice();
        let packets = coll
            .tiles()
            .iter()
            .map(|b| PacketSpectrum::for_tile(&lat.tile1(b), lat.consts().c3, lat.len())?.to_signal(lat.len()))
            .collect::<Result<_>>()?;
        Ok(Self { packets })
    }

    pub fn get(&self, i: usize) -> &Signal {
        &self.packets[i]
    }
}

fn check(coll: &TileCollection, lens: &[usize]) -> Result<()> {
    let n = coll.lattice().len();
    for &l in lens {
        if l != n {
            return Err(Error::LengthMismatch { expected: n, found: l });
        }
    }
    Ok(())
}

/// `C_P f = sum_P a_P phi_{P1} d_P` from precomputed coefficients and packets.
pub fn model_operator_with(
    coll: &TileCollection,
    members: &[usize],
    coeffs: &[Complex64],
    packets: &PacketTable,
    lin: &Linearization,
) -> Signal {
    let lat = coll.lattice();
    let n = lat.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for &i in members {
        let b = &coll.tiles()[i];
        let (omega, omega2) = (lat.omega(b), lat.omega_p2(b));
        let phi = packets.get(i).samples();
        for (x, o) in out.iter_mut().enumerate() {
            if let Some(d) = lin.d_p(x, &omega, &omega2) {
                *o += coeffs[i] * phi[x] * d;
            }
        }
    }
    Signal::new(out).expect("lattice length is valid")
}

/// Linearised model operator `C_P f`.
pub fn model_operator(coll: &TileCollection, f: &Signal, lin: &Linearization) -> Result<Signal> {
    check(coll, &[f.len(), lin.len()])?;
    let coeffs = coefficients(coll, f)?;
    let packets = PacketTable::new(coll)?;
    let all: Vec<usize> = (0..coll.len()).collect();
    Ok(model_operator_with(coll, &all, &coeffs, &packets, lin))
}

/// Locates the active stopping index per bitile by bracketing `omega_P2` rather than scanning pairs.
fn active_coefficient(lin: &Linearization, x: usize, lo: f64, lo2: f64, hi2: f64) -> Option<Complex64> {
    let t = &lin.point(x).thresholds;
    let j = t.partition_point(|&v| v < lo2);
    if j == 0 || j >= t.len() || t[j] >= hi2 {
        return None;
    }
    let prev = t[j - 1];
    // prev < lo2 <= hi(omega_P); outside omega_P only below its lower end
    (prev < lo).then(|| lin.point(x).coeffs[j - 1])
}

/// `B_P(f, g) = sum_P a_P <phi_{P1} d_P, g w>` restricted to `members`.
pub fn bilinear_form_with(
    coll: &TileCollection,
    members: &[usize],
    coeffs: &[Complex64],
    packets: &PacketTable,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
) -> Complex64 {
    let lat = coll.lattice();
    let n = lat.len();
    let gw: Vec<Complex64> = g.samples().iter().zip(w.samples()).map(|(z, &v)| z.conj() * v).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &i in members {
        let b = &coll.tiles()[i];
        let (omega, omega2) = (lat.omega(b), lat.omega_p2(b));
        let phi = packets.get(i).samples();
        let mut pairing = Complex64::new(0.0, 0.0);
        for x in 0..n {
            if let Some(d) = active_coefficient(lin, x, omega.lo, omega2.lo, omega2.hi) {
                pairing += phi[x] * d * gw[x];
            }
        }
        total += coeffs[i] * pairing / n as f64;
    }
    total
}

pub fn bilinear_form(
    coll: &TileCollection,
    f: &Signal,
    g: &Signal,
    w: &Weight,
    lin: &Linearization,
) -> Result<Complex64> {
    check(coll, &[f.len(), g.len(), w.len(), lin.len()])?;
    let coeffs = coefficients(coll, f)?;
    let packets = PacketTable::new(coll)?;
    let all: Vec<usize> = (0..coll.len()).collect();
    Ok(bilinear_form_with(coll, &all, &coeffs, &packets, g, w, lin))
}

/// `C_{r,P} f(x)`: supremum over threshold chains of the `l^r` norm of the activated packet sums.
///
/// Thresholds only matter through the cell they occupy in the partition of the
/// line by the endpoints of every `omega_P` and `omega_P2`, so the supremum is a
/// dynamic program over those cells. Cost per point is `O(m^2 + m |P|)` with `m <= 3|P| + 1`.
pub fn variational_model_operator(coll: &TileCollection, f: &Signal, r: f64) -> Result<Signal> {
    check_exponent("r", r)?;
    check(coll, &[f.len()])?;
    let coeffs = coefficients(coll, f)?;
    let packets = PacketTable::new(coll)?;
    let lat = coll.lattice();
    let n = lat.len();
    if coll.is_empty() {
        return Signal::zeros(n);
    }
    let mut breaks: Vec<f64> = Vec::new();
    for b in coll.tiles() {
        breaks.extend([lat.omega(b).lo, lat.omega_p2(b).lo, lat.omega_p2(b).hi]);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // cell 0 is below every break, cell c >= 1 is [breaks[c-1], breaks[c])
    let cells = breaks.len() + 1;
    let cell_of = |v: f64| breaks.partition_point(|&b| b <= v);
    // per cell: bitiles whose omega_P2 holds it, with the first cell of omega_P
    let mut upper: Vec<Vec<(usize, usize)>> = vec![Vec::new(); cells];
    for (i, b) in coll.tiles().iter().enumerate() {
        let (c_lo, c2_lo, c2_hi) = (cell_of(lat.omega(b).lo), cell_of(lat.omega_p2(b).lo), cell_of(lat.omega_p2(b).hi));
        for list in &mut upper[c2_lo..c2_hi] {
            list.push((i, c_lo));
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut jump = vec![0.0f64; cells * cells];
    let mut add = vec![Complex64::new(0.0, 0.0); cells + 1];
    for x in 0..n {
        for c in 0..cells {
            for a in add.iter_mut() {
                *a = Complex64::new(0.0, 0.0);
            }
            for &(i, c_lo) in &upper[c] {
                add[c_lo] += coeffs[i] * packets.get(i).samples()[x];
            }
            // thresholds in cell c' < c_lo lie below omega_P
            let mut run = Complex64::new(0.0, 0.0);
            for cp in (0..c).rev() {
                run += add[cp + 1];
                jump[c * cells + cp] = math::abs(run);
            }
        }
        out.push(variation_dp(cells, |_| 0.0, |i, j| jump[i * cells + j], r, VariationMode::Oscillation));
    }
    Signal::from_real(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{idft, Spectrum};
    use crate::phaseplane::{build_on_levels, AdmissibleConstants, Bitile, Lattice, LinPoint};
    use crate::weights::{power_weight, DyadicGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(n: usize, rng: &mut ChaCha8Rng) -> Signal {
        let h = (n / 2) as i64;
        let pairs: Vec<(i64, Complex64)> = (-h..h)
            .map(|k| (k, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        idft(&Spectrum::from_pairs(n, &pairs).unwrap())
    }

    fn pick(full: &TileCollection, count: usize, rng: &mut ChaCha8Rng) -> TileCollection {
        let mut picks = Vec::new();
        while picks.len() < count {
            let i = rng.random_range(0..full.len());
            if !picks.contains(&i) {
                picks.push(i);
            }
        }
        full.select(&picks)
    }

    #[test]
    fn empty_linearization_gives_zero() {
        let full = build_on_levels(DyadicGrid::new(6), AdmissibleConstants::default(), &[0, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_signal(64, &mut rng);
        let lin = Linearization::empty(64, 3.0).unwrap();
        assert_eq!(model_operator(&full, &f, &lin).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn single_bitile_unwinds_definition() {
        let lat = Lattice::new(6, AdmissibleConstants::default()).unwrap();
        let b = Bitile { level: 2, position: 1, freq: 2 };
        let coll = TileCollection::new(lat, alloc::vec![b]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_signal(64, &mut rng);
        let d = Complex64::new(0.6, 0.8);
        let (lo, t2) = (lat.omega(&b).lo - 1.0, lat.omega_p2(&b).center());
        let lin = Linearization::new(
            2.0,
            alloc::vec![LinPoint { thresholds: alloc::vec![lo, t2], coeffs: alloc::vec![d] }; 64],
        )
        .unwrap();
        let a = coefficients(&coll, &f).unwrap()[0];
        let phi = PacketTable::new(&coll).unwrap();
        let c = model_operator(&coll, &f, &lin).unwrap();
        for x in 0..64 {
            let want = a * phi.get(0).samples()[x] * d;
            assert!((c.samples()[x] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn pairing_paths_agree_and_are_additive() {
        let full = build_on_levels(DyadicGrid::new(7), AdmissibleConstants::default(), &[0, 3, 5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let coll = pick(&full, 60, &mut rng);
            let f = random_signal(128, &mut rng);
            let g = random_signal(128, &mut rng);
            let w = power_weight(128, 0.5).unwrap();
            let lin = Linearization::random(128, 3.0, -64, 64, &mut rng).unwrap();
            let c = model_operator(&coll, &f, &lin).unwrap();
            let gw = Signal::from_fn(128, |_| Complex64::new(0.0, 0.0))
                .unwrap()
                .zip_with(&g, |_, z| z)
                .unwrap();
            let lhs: Complex64 = c
                .samples()
                .iter()
                .zip(gw.samples())
                .zip(w.samples())
                .map(|((a, b), v)| a * b.conj() * v)
                .sum::<Complex64>()
                / 128.0;
            let rhs = bilinear_form(&coll, &f, &g, &w, &lin).unwrap();
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
            let coeffs = coefficients(&coll, &f).unwrap();
            let packets = PacketTable::new(&coll).unwrap();
            let left: Vec<usize> = (0..coll.len()).filter(|i| i % 3 == 0).collect();
            let right: Vec<usize> = (0..coll.len()).filter(|i| i % 3 != 0).collect();
            let parts = bilinear_form_with(&coll, &left, &coeffs, &packets, &g, &w, &lin)
                + bilinear_form_with(&coll, &right, &coeffs, &packets, &g, &w, &lin);
            assert!((parts - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    /// Every subset of the raw thresholds, enumerated depth first.
    fn chain_oracle(coll: &TileCollection, vals: &[Complex64], raw: &[f64], r: f64, max_len: usize) -> f64 {
        let lat = coll.lattice();
        let jump = |a: f64, b: f64| -> f64 {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, p) in coll.tiles().iter().enumerate() {
                if !lat.omega(p).contains(a) && lat.omega_p2(p).contains(b) {
                    s += vals[i];
                }
            }
            s.norm()
        };
        fn go(last: usize, len: usize, acc: f64, raw: &[f64], r: f64, max_len: usize, jump: &dyn Fn(f64, f64) -> f64, best: &mut f64) {
            *best = best.max(acc);
            if len == max_len {
                return;
            }
            for next in last + 1..raw.len() {
                go(next, len + 1, acc + jump(raw[last], raw[next]).powf(r), raw, r, max_len, jump, best);
            }
        }
        let mut best = 0.0;
        for start in 0..raw.len() {
            go(start, 1, 0.0, raw, r, max_len, &jump, &mut best);
        }
        best.powf(1.0 / r)
    }

    #[test]
    fn variational_operator_single_and_empty() {
        let lat = Lattice::new(5, AdmissibleConstants::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_signal(32, &mut rng);
        assert_eq!(variational_model_operator(&TileCollection::empty(lat), &f, 2.0).unwrap().max_abs(), 0.0);
        let coll = TileCollection::new(lat, alloc::vec![Bitile { level: 1, position: 1, freq: 2 }]).unwrap();
        let a = coefficients(&coll, &f).unwrap()[0];
        let phi = PacketTable::new(&coll).unwrap();
        let v = variational_model_operator(&coll, &f, 3.0).unwrap();
        for x in 0..32 {
            assert!((v.samples()[x].re - (a * phi.get(0).samples()[x]).norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn variational_operator_matches_full_enumeration_at_16() {
        let full = build_on_levels(DyadicGrid::new(4), AdmissibleConstants::default(), &[0, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let raw: Vec<f64> = (-10..9).map(|m| m as f64 + 0.5).collect();
        for trial in 0..4 {
            let coll = pick(&full, 2 + trial % 3, &mut rng);
            let f = random_signal(16, &mut rng);
            let coeffs = coefficients(&coll, &f).unwrap();
            let packets = PacketTable::new(&coll).unwrap();
            for r in [1.5, 3.0] {
                let v = variational_model_operator(&coll, &f, r).unwrap();
                for x in [0usize, 5, 11] {
                    let vals: Vec<Complex64> =
                        (0..coll.len()).map(|i| coeffs[i] * packets.get(i).samples()[x]).collect();
                    let want = chain_oracle(&coll, &vals, &raw, r, raw.len());
                    assert!((v.samples()[x].re - want).abs() < 1e-12 * (1.0 + want), "trial {trial} r {r} x {x}");
                }
            }
        }
    }

    #[test]
    fn variational_operator_short_chains_at_64() {
        let full = build_on_levels(DyadicGrid::new(6), AdmissibleConstants::default(), &[0, 2, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let raw: Vec<f64> = (-34..33).map(|m| m as f64 + 0.5).collect();
        for size in [2usize, 4] {
            let coll = pick(&full, size, &mut rng);
            let f = random_signal(64, &mut rng);
            let coeffs = coefficients(&coll, &f).unwrap();
            let packets = PacketTable::new(&coll).unwrap();
            let v = variational_model_operator(&coll, &f, 2.0).unwrap();
            for x in [3usize, 40] {
                let vals: Vec<Complex64> = (0..coll.len()).map(|i| coeffs[i] * packets.get(i).samples()[x]).collect();
                let short = chain_oracle(&coll, &vals, &raw, 2.0, 4);
                let got = v.samples()[x].re;
                assert!(got >= short - 1e-12);
                if size <= 2 {
                    assert!((got - short).abs() < 1e-12 * (1.0 + short));
                }
            }
        }
    }

    #[test]
    fn dominates_every_linearization() {
        let full = build_on_levels(DyadicGrid::new(6), AdmissibleConstants::default(), &[0, 2, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let coll = pick(&full, 25, &mut rng);
        let f = random_signal(64, &mut rng);
        let g = random_signal(64, &mut rng);
        let w = power_weight(64, 0.5).unwrap();
        let r = 3.0;
        let v = variational_model_operator(&coll, &f, r).unwrap();
        let bound: f64 = (0..64).map(|x| v.samples()[x].re * g.samples()[x].norm() * w.samples()[x]).sum::<f64>() / 64.0;
        for _ in 0..10 {
            let lin = Linearization::random(64, r, -33, 33, &mut rng).unwrap();
            let c = model_operator(&coll, &f, &lin).unwrap();
            for x in 0..64 {
                assert!(c.samples()[x].norm() <= v.samples()[x].re + 1e-12);
            }
            assert!(bilinear_form(&coll, &f, &g, &w, &lin).unwrap().norm() <= bound + 1e-12);
        }
    }
}
