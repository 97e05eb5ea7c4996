use alloc::vec;
use alloc::vec::Vec;

use super::{DyadicGrid, Weight};
use crate::fourier::Signal;
use crate::math;
use crate::{Error, Result};

/// Measure used for the averages in [`maximal`].
#[derive(Debug, Clone, Copy)]
pub enum Averaging<'a> {
    Lebesgue,
    Weighted(&'a Weight),
}

/// `M_t f` or `M_{t,w} f`: supremum of `t`-averages over grid-aligned arcs whose closure contains the point.
pub fn maximal(f: &Signal, t: f64, avg: Averaging<'_>) -> Result<Signal> {
    if t.is_nan() || t.is_infinite() || t < 1.0 {
        return Err(Error::Exponent { name: "t", value: t });
    }
    let n = f.len();
    let ones = vec![1.0; n];
    let w: &[f64] = match avg {
        Averaging::Lebesgue => &ones,
        Averaging::Weighted(w) => {
            if w.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: w.len() });
            }
            w.samples()
        }
    };
    // doubled prefix sums so arcs never need to wrap
    let mut num = vec![0.0; 2 * n + 1];
    let mut den = vec![0.0; 2 * n + 1];
    for i in 0..2 * n {
        let v = f.samples()[i % n];
        num[i + 1] = num[i] + math::pow_abs(math::abs(v), t) * w[i % n];
        den[i + 1] = den[i] + w[i % n];
    }
    let whole = num[n] / den[n];
    let mut best = vec![whole; n];
    let mut suffix = vec![0.0f64; n];
    for a in 0..n {
        // suffix[m] = max over lengths >= m of the average on cells a .. a+len
        let mut run = 0.0f64;
        for len in (1..n).rev() {
            run = run.max((num[a + len] - num[a]) / (den[a + len] - den[a]));
            suffix[len] = run;
        }
        // the closed arc of length `len` covers points a .. a+len
        for m in 0..n {
            let v = suffix[m.max(1)];
            let i = (a + m) % n;
            if v > best[i] {
                best[i] = v;
            }
        }
    }
    let out: Vec<f64> = best
        .into_iter()
        .map(|v| if t == 1.0 { v } else { math::powf(v, 1.0 / t) })
        .collect();
    Signal::from_real(out)
}

/// Dyadic sharp maximal function `sup_{I containing x} |I|^{-1} int_I |f - avg_I f|`.
pub fn dyadic_sharp(f: &Signal) -> Signal {
    let n = f.len();
    let grid = DyadicGrid::for_len(n);
    let s = f.samples();
    let mut best = vec![0.0f64; n];
    for d in grid.intervals() {
        let arc = d.cells(grid.log2_len());
        let cells = arc.start..arc.start + arc.len;
        let mean = s[cells.clone()].iter().sum::<num_complex::Complex64>() / arc.len as f64;
        let osc = s[cells.clone()].iter().map(|&z| math::abs(z - mean)).sum::<f64>() / arc.len as f64;
        for b in &mut best[cells] {
            *b = b.max(osc);
        }
    }
    Signal::from_real(best).expect("length already validated")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::power_weight;
    use num_complex::Complex64;

    fn indicator(n: usize, lo: f64, hi: f64) -> Signal {
        Signal::from_fn(n, |x| Complex64::new(if x >= lo && x < hi { 1.0 } else { 0.0 }, 0.0)).unwrap()
    }

    /// Direct enumeration of every grid arc and every covered point.
    fn brute_maximal(f: &Signal, t: f64, w: &[f64]) -> Vec<f64> {
        let n = f.len();
        let mut best = vec![0.0f64; n];
        for a in 0..n {
            for len in 1..=n {
                let (mut num, mut den) = (0.0, 0.0);
                for c in a..a + len {
                    num += f.samples()[c % n].norm().powf(t) * w[c % n];
                    den += w[c % n];
                }
                let v = (num / den).powf(1.0 / t);
                let reach = if len == n { n - 1 } else { len };
                for m in 0..=reach {
                    let i = (a + m) % n;
                    best[i] = best[i].max(v);
                }
            }
        }
        best
    }

    #[test]
    fn indicator_quarter_at_half() {
        let f = indicator(64, 0.0, 0.25);
        let m = maximal(&f, 1.0, Averaging::Lebesgue).unwrap();
        assert!((m.samples()[32].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn matches_enumeration() {
        let f = Signal::from_fn(32, |x| Complex64::new(math::sin_cos(9.0 * x).0, x * x)).unwrap();
        let w = power_weight(32, 0.5).unwrap();
        for t in [1.0, 2.0, 3.5] {
            let fast = maximal(&f, t, Averaging::Weighted(&w)).unwrap();
            let slow = brute_maximal(&f, t, w.samples());
            for (a, b) in fast.re().iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12);
            }
            let fast = maximal(&f, t, Averaging::Lebesgue).unwrap();
            let slow = brute_maximal(&f, t, &[1.0; 32]);
            for (a, b) in fast.re().iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constants_and_power_means() {
        let c = Signal::from_real(vec![-1.5; 16]).unwrap();
        let w = power_weight(16, 0.7).unwrap();
        for t in [1.0, 2.0, 4.0] {
            for v in maximal(&c, t, Averaging::Weighted(&w)).unwrap().re() {
                assert!((v - 1.5).abs() < 1e-12);
            }
        }
        let f = Signal::from_fn(64, |x| Complex64::new(math::sin_cos(20.0 * x * x).1, 0.0)).unwrap();
        let m1 = maximal(&f, 1.0, Averaging::Lebesgue).unwrap().re();
        let m3 = maximal(&f, 3.0, Averaging::Lebesgue).unwrap().re();
        for (a, b) in m1.iter().zip(&m3) {
            assert!(b >= &(a - 1e-12));
        }
        assert!(maximal(&f, 0.5, Averaging::Lebesgue).is_err());
    }

    #[test]
    fn sharp_function_examples() {
        let c = Signal::from_real(vec![2.0; 16]).unwrap();
        assert!(dyadic_sharp(&c).max_abs() < 1e-15);
        let h = indicator(8, 0.0, 0.5);
        for v in dyadic_sharp(&h).re() {
            assert!((v - 0.5).abs() < 1e-15);
        }
        let f = Signal::from_fn(64, |x| Complex64::new(math::sin_cos(13.0 * x).0, x)).unwrap();
        let sharp = dyadic_sharp(&f).re();
        let m1 = maximal(&f, 1.0, Averaging::Lebesgue).unwrap().re();
        for (s, m) in sharp.iter().zip(&m1) {
            assert!(*s <= 2.0 * m + 1e-12);
        }
    }
}
