use alloc::vec::Vec;
use num_complex::Complex64;

use super::{Signal, Spectrum};
use crate::math;

/// In-place iterative radix-2 transform with kernel `e^{sign 2 pi i k j / N}`.
fn fft_in_place(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let twiddles: Vec<Complex64> =
        (0..n / 2).map(|k| math::cis_turns(sign * k as f64 / n as f64)).collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Forward transform, `F(k) = (1/N) sum_i f(x_i) e^{-2 pi i k x_i}`.
pub fn dft(f: &Signal) -> Spectrum {
    let mut data = f.samples().to_vec();
    fft_in_place(&mut data, -1.0);
    let inv = 1.0 / data.len() as f64;
    for z in &mut data {
        *z *= inv;
    }
    Spectrum::from_transform_order(data).expect("signal length already validated")
}

/// Inverse transform, `f(x_i) = sum_k F(k) e^{2 pi i k x_i}`.
pub fn idft(spec: &Spectrum) -> Signal {
    let mut data = spec.transform_order().to_vec();
    fft_in_place(&mut data, 1.0);
    Signal::new(data).expect("spectrum length already validated")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct O(N^2) summation.
    fn direct_dft(f: &[Complex64]) -> Vec<Complex64> {
        let n = f.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in f.iter().enumerate() {
                    acc += v * math::cis_turns(-(((k * j) % n) as f64) / n as f64);
                }
                acc / n as f64
            })
            .collect()
    }

    fn random_signal(n: usize, seed: u64) -> Signal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Signal::new(
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_signal_has_only_dc() {
        let f = Signal::from_fn(32, |_| Complex64::new(1.0, 0.0)).unwrap();
        let s = dft(&f);
        for (k, c) in s.iter() {
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn pure_tone_is_a_single_coefficient() {
        let s = dft(&Signal::tone(64, 3).unwrap());
        for (k, c) in s.iter() {
            let want = if k == 3 { 1.0 } else { 0.0 };
            assert!((c - Complex64::new(want, 0.0)).norm() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn matches_direct_summation_at_64() {
        let f = random_signal(64, 7);
        let fast = dft(&f);
        let slow = direct_dft(f.samples());
        for (a, b) in fast.transform_order().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for (n, seed) in [(8, 1), (64, 2), (1024, 3)] {
            let f = random_signal(n, seed);
            let spec = dft(&f);
            let back = idft(&spec);
            let sup = f.max_abs();
            let err = back
                .samples()
                .iter()
                .zip(f.samples())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10 * sup);
            let lhs: f64 = f.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
            assert!((lhs - spec.energy()).abs() < 1e-10 * lhs);
        }
    }
}
