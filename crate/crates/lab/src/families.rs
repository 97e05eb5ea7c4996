//! Seeded test-signal families.

use carleson_core::fourier::{idft, Spectrum};
use carleson_core::phaseplane::bump;
use carleson_core::{Complex64, Signal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::FamilySpec;
use crate::error::Result;

/// Independent stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random trigonometric polynomial with frequencies `|k| <= degree`.
pub fn random_trig<R: Rng>(n: usize, degree: i64, rng: &mut R) -> Result<Signal> {
    let degree = degree.min(n as i64 / 2 - 1);
    let pairs: Vec<(i64, Complex64)> = (-degree..=degree).map(|k| (k, random_complex(rng))).collect();
    Ok(idft(&Spectrum::from_pairs(n, &pairs)?))
}

/// `e(k0 x) D_m(x - x0)` with `D_m = sum_{|k| <= m} e(k x)`, frequencies kept inside the band.
pub fn dirichlet<R: Rng>(n: usize, rng: &mut R) -> Result<Signal> {
    let half = n as i64 / 2;
    let m = rng.random_range((half / 8).max(1)..half / 2);
    let k0 = rng.random_range(-(half - 1 - m)..=(half - 1 - m));
    let x0 = rng.random_range(0..n) as f64 / n as f64;
    let pairs: Vec<(i64, Complex64)> = (-m..=m)
        .map(|k| (k0 + k, Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 * x0)))
        .collect();
    Ok(idft(&Spectrum::from_pairs(n, &pairs)?))
}

/// `sum_j e_j e(2^j x)` with independent signs over `2^j < N/2`.
pub fn lacunary<R: Rng>(n: usize, rng: &mut R) -> Result<Signal> {
    let half = n as i64 / 2;
    let pairs: Vec<(i64, Complex64)> = (0..)
        .map(|j| 1i64 << j)
        .take_while(|&k| k < half)
        .map(|k| (k, Complex64::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0)))
        .collect();
    Ok(idft(&Spectrum::from_pairs(n, &pairs)?))
}

/// Indicator of a random arc with its spectrum tapered by a smooth bump of width `N/2`.
pub fn smoothed_indicator<R: Rng>(n: usize, rng: &mut R) -> Result<Signal> {
    let start = rng.random_range(0..n);
    let len = rng.random_range(n / 16..n / 2).max(1);
    let raw: Vec<f64> = (0..n).map(|i| if (i + n - start) % n < len { 1.0 } else { 0.0 }).collect();
    let spec = carleson_core::fourier::dft(&Signal::from_real(raw)?);
    let pairs: Vec<(i64, Complex64)> =
        spec.iter().map(|(k, v)| (k, v * bump(k as f64 / n as f64))).collect();
    Ok(idft(&Spectrum::from_pairs(n, &pairs)?))
}

pub fn single_tone<R: Rng>(n: usize, rng: &mut R) -> Result<Signal> {
    let half = n as i64 / 2;
    Ok(Signal::tone(n, rng.random_range(-half..half))?)
}

/// One member of `spec` on a grid of length `n`, for trial `trial`.
pub fn generate(spec: &FamilySpec, n: usize, trial: u64, rng: &mut ChaCha8Rng) -> Result<Signal> {
    match spec {
        FamilySpec::RandomTrig => random_trig(n, n as i64 / 4, rng),
        FamilySpec::Dirichlet => dirichlet(n, rng),
        FamilySpec::Lacunary => lacunary(n, rng),
        FamilySpec::Adversarial if trial % 2 == 0 => dirichlet(n, rng),
        FamilySpec::Adversarial => lacunary(n, rng),
        FamilySpec::SmoothedIndicator => smoothed_indicator(n, rng),
        FamilySpec::SingleTone => single_tone(n, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use carleson_core::fourier::dft;

    #[test]
    fn families_are_deterministic_and_band_limited() {
        let specs = [
            FamilySpec::RandomTrig,
            FamilySpec::Dirichlet,
            FamilySpec::Lacunary,
            FamilySpec::Adversarial,
            FamilySpec::SmoothedIndicator,
            FamilySpec::SingleTone,
        ];
        for spec in &specs {
            for trial in 0..4 {
                let a = generate(spec, 128, trial, &mut trial_rng(7, trial)).unwrap();
                let b = generate(spec, 128, trial, &mut trial_rng(7, trial)).unwrap();
                assert_eq!(a, b);
                assert!(a.max_abs() > 0.0);
                // nothing at the Nyquist frequency except for tones
                if *spec != FamilySpec::SingleTone {
                    assert!(dft(&a).get(-64).norm() < 1e-12);
                }
            }
        }
        let a = generate(&FamilySpec::RandomTrig, 128, 0, &mut trial_rng(7, 0)).unwrap();
        let b = generate(&FamilySpec::RandomTrig, 128, 1, &mut trial_rng(7, 1)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn dirichlet_has_unit_coefficients_on_a_block() {
        let f = dirichlet(256, &mut trial_rng(3, 0)).unwrap();
        let mags: Vec<f64> = dft(&f).iter().map(|(_, v)| v.norm()).filter(|&m| m > 1e-9).collect();
        assert!(mags.len() >= 2 * 16 + 1);
        assert!(mags.iter().all(|m| (m - 1.0).abs() < 1e-12));
    }
}
