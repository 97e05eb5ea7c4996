//! Float helpers backed by `libm`, so results are identical with and without `std`.

use num_complex::Complex64;

pub use core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    // repeated squaring; exact for small n on representable values
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn log2(x: f64) -> f64 {
    libm::log2(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

/// Complex modulus.
#[inline]
pub fn abs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `e^{2 pi i t}`.
#[inline]
pub fn cis_turns(t: f64) -> Complex64 {
    let (s, c) = sin_cos(2.0 * PI * t);
    Complex64::new(c, s)
}

/// `|x|^r` with the common small exponents done by multiplication.
#[inline]
pub fn pow_abs(x: f64, r: f64) -> f64 {
    let x = x.abs();
    if r == 1.0 {
        x
    } else if r == 2.0 {
        x * x
    } else if r == 3.0 {
        x * x * x
    } else if r == 4.0 {
        let s = x * x;
        s * s
    } else if x == 0.0 {
        0.0
    } else {
        powf(x, r)
    }
}

/// Hölder conjugate `r / (r - 1)`; `1` maps to `inf` and `inf` to `1`.
#[inline]
pub fn conjugate_exponent(r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else if r == 1.0 {
        f64::INFINITY
    } else {
        r / (r - 1.0)
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(3.0, 4), 81.0);
        assert_eq!(powi(2.0, -2), 0.25);
        assert_eq!(powi(7.5, 0), 1.0);
    }

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((fit_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(2.0), 2.0);
        assert_eq!(conjugate_exponent(f64::INFINITY), 1.0);
        assert!((conjugate_exponent(3.0) - 1.5).abs() < 1e-15);
    }
}
