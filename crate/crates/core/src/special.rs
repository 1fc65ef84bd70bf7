//! Complex log-gamma and the Gauss hypergeometric function on `[0, 1)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_{2k} / (2k (2k − 1))` for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Below this modulus the Stirling series is not used directly.
const STIRLING_MIN: f64 = 15.0;

/// Maximum number of terms summed in any hypergeometric series.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Principal branch of `ln Γ(z)`.
///
/// Stirling series after an upward shift for `Re z ≥ 1/2`, reflection
/// otherwise. Fails at the poles `z = 0, −1, −2, …`.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("z", format!("non-finite argument {z}")));
    }
    if is_pole(z) {
        return Err(Error::GammaPole { re: z.re, im: z.im });
    }
    if z.re >= 0.5 {
        return Ok(log_gamma_right(z));
    }
    // conj(lnΓ(z)) = lnΓ(conj z); work in the closed upper half plane
    if z.im < 0.0 {
        return log_gamma_complex(z.conj()).map(|v| v.conj());
    }
    // sin πz = (i/2) e^{−iπz} (1 − e^{2πiz}); the last factor stays off the cut
    let i = Complex64::i();
    let w = (2.0 * PI * i * z).exp();
    let log_sin = Complex64::new(-std::f64::consts::LN_2, 0.5 * PI) - i * PI * z + (1.0 - w).ln();
    Ok(Complex64::from(PI.ln()) - log_sin - log_gamma_right(1.0 - z))
}

fn log_gamma_right(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut x = z;
    while x.norm() < STIRLING_MIN {
        shift += x.ln();
        x += 1.0;
    }
    let inv = x.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series - shift
}

/// `Γ(z)`; errors at poles.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    log_gamma_complex(z).map(Complex64::exp)
}

/// `1/Γ(z)`, which is entire: zero at the poles of `Γ`.
pub fn rgamma_complex(z: Complex64) -> Complex64 {
    if is_pole(z) {
        Complex64::new(0.0, 0.0)
    } else {
        log_gamma_complex(z).map_or(Complex64::new(f64::NAN, f64::NAN), |v| (-v).exp())
    }
}

/// Gauss hypergeometric function `₂F₁(a, b; c; y)` for real `0 ≤ y < 1`.
///
/// Power series for `y ≤ 1/2`; otherwise the connection formula to argument
/// `1 − y`. When `c − a − b` lies near an integer the connection formula is
/// evaluated on a circle around that integer and the value at the requested
/// point recovered by the Cauchy integral.
pub fn hyp2f1_complex(a: Complex64, b: Complex64, c: Complex64, y: f64) -> Result<Complex64> {
    if !(0.0..1.0).contains(&y) {
        return Err(Error::invalid("y", format!("must lie in [0, 1), got {y}")));
    }
    hyp2f1_split(a, b, c, y, 1.0 - y)
}

/// As [`hyp2f1_complex`] with the complement `1 − y` supplied separately,
/// so callers close to `y = 1` keep full relative precision in it.
pub(crate) fn hyp2f1_split(a: Complex64, b: Complex64, c: Complex64, y: f64, one_minus_y: f64) -> Result<Complex64> {
    if is_pole(c) {
        return Err(Error::GammaPole { re: c.re, im: c.im });
    }
    if y == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if is_pole(a) || is_pole(b) || y <= 0.5 {
        return series(a, b, c, Complex64::from(y));
    }

    let s = c - a - b;
    let m = s.re.round();
    let offset = s - m;
    if offset.norm() < DEGENERATE_RADIUS {
        // φ(σ) = F(a, b; a + b + σ; y) is analytic in σ around m.
        let center = Complex64::new(m, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..CONTOUR_POINTS {
            let theta = 2.0 * PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
            let dz = Complex64::from_polar(CONTOUR_RADIUS, theta);
            let zeta = center + dz;
            let value = connection(a, b, a + b + zeta, y, one_minus_y)?;
            acc += value * dz / (zeta - s);
        }
        return Ok(acc / CONTOUR_POINTS as f64);
    }
    connection(a, b, c, y, one_minus_y)
}

const DEGENERATE_RADIUS: f64 = 0.05;
const CONTOUR_RADIUS: f64 = 0.25;
const CONTOUR_POINTS: usize = 32;

fn connection(a: Complex64, b: Complex64, c: Complex64, _y: f64, z1: f64) -> Result<Complex64> {
    let s = c - a - b;
    let lg_c = log_gamma_complex(c)?;
    let first = {
        let r = rgamma_complex(c - a) * rgamma_complex(c - b);
        if r == Complex64::new(0.0, 0.0) {
            r
        } else {
            (lg_c + log_gamma_complex(s)?).exp() * r * series(a, b, 1.0 - s, Complex64::from(z1))?
        }
    };
    let second = {
        let r = rgamma_complex(a) * rgamma_complex(b);
        if r == Complex64::new(0.0, 0.0) {
            r
        } else {
            (lg_c + log_gamma_complex(-s)? + s * z1.ln()).exp()
                * r
                * series(c - a, c - b, 1.0 + s, Complex64::from(z1))?
        }
    };
    Ok(first + second)
}

fn series(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut small = 0;
    for n in 0..MAX_SERIES_TERMS {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        if term.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence {
        terms: MAX_SERIES_TERMS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn log_gamma_known_values() {
        assert!(log_gamma_complex(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma_complex(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma_complex(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        // Γ(6) = 120
        let g6 = gamma_complex(c(6.0, 0.0)).unwrap();
        assert!(close(g6, c(120.0, 0.0), 1e-14));
    }

    #[test]
    fn modulus_on_imaginary_line() {
        // |Γ(1+iy)|² = πy / sinh(πy)
        for y in [0.3, 1.0, 2.5, 7.0] {
            let lg = log_gamma_complex(c(1.0, y)).unwrap();
            let got = (2.0 * lg.re).exp();
            let want = PI * y / (PI * y).sinh();
            assert!((got - want).abs() < 1e-12 * want, "y = {y}");
        }
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        let lg = log_gamma_complex(c(0.5, 1.3)).unwrap();
        assert!(((2.0 * lg.re).exp() - PI / (PI * 1.3).cosh()).abs() < 1e-13);
    }

    #[test]
    fn reference_value_off_axis() {
        // Γ(4 + 10i) from an independent high-precision evaluation
        let g = gamma_complex(c(4.0, 10.0)).unwrap();
        assert!(close(
            g,
            c(0.000_771_534_294_239_966_3, -0.001_019_082_799_041_712),
            1e-12
        ));
    }

    #[test]
    fn reflection_region_matches_recurrence() {
        // Γ(z+1) = z Γ(z) across the Re z = 1/2 switch
        for z in [c(-2.3, 0.7), c(-0.4, -3.0), c(0.2, 0.0), c(-7.5, 12.0), c(-40.2, 0.1)] {
            let lhs = gamma_complex(z + 1.0).unwrap();
            let rhs = z * gamma_complex(z).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm(), "z = {z}");
        }
    }

    #[test]
    fn principal_branch_is_continuous() {
        // walk along a path crossing Re z = 1/2 and the real axis region
        let mut prev = log_gamma_complex(c(3.0, 5.0)).unwrap();
        for k in 1..=400 {
            let s = k as f64 / 400.0;
            let z = c(3.0 - 8.0 * s, 5.0 - 4.0 * s);
            let v = log_gamma_complex(z).unwrap();
            assert!((v.im - prev.im).abs() < 0.5, "jump near {z}");
            prev = v;
        }
    }

    #[test]
    fn poles_are_errors() {
        for z in [0.0, -1.0, -5.0] {
            assert!(matches!(log_gamma_complex(c(z, 0.0)), Err(Error::GammaPole { .. })));
            assert_eq!(rgamma_complex(c(z, 0.0)), c(0.0, 0.0));
        }
    }

    #[test]
    fn hyp2f1_at_origin() {
        let v = hyp2f1_complex(c(0.3, 1.0), c(-2.0, 0.5), c(1.0, -1.0), 0.0).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn hyp2f1_logarithm_identity() {
        // ₂F₁(1,1;2;y) = −ln(1−y)/y
        for y in [0.25, 0.5, 0.75, 0.99, 0.999_999] {
            let v = hyp2f1_complex(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), y).unwrap();
            let want = -(1.0 - y).ln() / y;
            assert!((v.re - want).abs() < 1e-11 * want && v.im.abs() < 1e-11, "y = {y}: {v}");
        }
        let v = hyp2f1_complex(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 0.25).unwrap();
        assert!((v.re - 1.150_728_289_807_123_8).abs() < 1e-14);
    }

    #[test]
    fn hyp2f1_elementary_closed_forms() {
        // ₂F₁(a, b; b; y) = (1 − y)^{−a}
        let a = c(0.7, -1.3);
        let b = c(2.0, 0.4);
        for y in [0.1, 0.6, 0.95] {
            let v = hyp2f1_complex(a, b, b, y).unwrap();
            let want = (-a * (1.0 - y).ln()).exp();
            assert!(close(v, want, 1e-11), "y = {y}");
        }
    }

    #[test]
    fn gauss_summation_limit() {
        let (a, b, cc) = (c(0.3, 0.5), c(-0.2, 1.0), c(2.5, -0.5));
        let s = cc - a - b;
        let want = (log_gamma_complex(cc).unwrap() + log_gamma_complex(s).unwrap()
            - log_gamma_complex(cc - a).unwrap()
            - log_gamma_complex(cc - b).unwrap())
        .exp();
        let v = hyp2f1_complex(a, b, cc, 1.0 - 1e-12).unwrap();
        assert!(close(v, want, 1e-8), "{v} vs {want}");
    }

    #[test]
    fn integer_gap_uses_limit() {
        // c − a − b = 0 exactly: ₂F₁(1/2, 1/2; 1; y) = (2/π) K(y)
        // with K(0.9) = 2.5780921133481733
        let v = hyp2f1_complex(c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0), 0.9).unwrap();
        assert!((v.re - 2.0 / PI * 2.578_092_113_348_173_3).abs() < 1e-12);
        // c − a − b = 1: ₂F₁(1,1;3;y) = 2[(1−y)ln(1−y) + y]/y²
        for y in [0.7, 0.999] {
            let v = hyp2f1_complex(c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), y).unwrap();
            let want = 2.0 * ((1.0 - y) * (1.0 - y).ln() + y) / (y * y);
            assert!((v.re - want).abs() < 1e-12 * want, "y = {y}");
        }
    }

    #[test]
    fn near_integer_gap_is_continuous() {
        let (a, b) = (c(0.4, 0.9), c(0.6, 0.2));
        let base = a + b + 2.0;
        let y = 0.8;
        let f0 = hyp2f1_complex(a, b, base, y).unwrap();
        for d in [1e-9, 1e-5, 0.049, 0.051] {
            let f = hyp2f1_complex(a, b, base + c(0.0, d), y).unwrap();
            // derivative in c is O(1), so the change must be O(d)
            assert!((f - f0).norm() < 5.0 * d + 1e-12, "shift {d}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(hyp2f1_complex(c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0), 0.3).is_err());
        assert!(hyp2f1_complex(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), 1.0).is_err());
        assert!(hyp2f1_complex(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), -0.1).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn param() -> impl Strategy<Value = Complex64> {
            (-1.5f64..2.5, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
        }

        proptest! {
            #[test]
            fn contiguous_relation(a in param(), b in param(), cc in (0.2f64..3.0, -3.0f64..3.0), y in 0.0f64..0.97) {
                let cc = Complex64::new(cc.0, cc.1);
                let f = hyp2f1_complex(a, b, cc, y).unwrap();
                let fa = hyp2f1_complex(a + 1.0, b, cc, y).unwrap();
                let fab = hyp2f1_complex(a + 1.0, b + 1.0, cc + 1.0, y).unwrap();
                let lhs = f - fa;
                let rhs = -(b * y / cc) * fab;
                let scale = f.norm().max(fa.norm()).max(rhs.norm()).max(1.0);
                prop_assert!((lhs - rhs).norm() <= 1e-9 * scale, "{} vs {}", lhs, rhs);
            }

            #[test]
            fn gamma_recurrence(re in -30.0f64..30.0, im in -30.0f64..30.0) {
                let z = Complex64::new(re, im);
                prop_assume!(z.im.abs() > 1e-3 || (z.re - z.re.round()).abs() > 1e-3);
                let lhs = log_gamma_complex(z + 1.0).unwrap();
                let rhs = log_gamma_complex(z).unwrap() + z.ln();
                // equal modulo 2πi
                let diff = lhs - rhs;
                let k = (diff.im / (2.0 * PI)).round();
                prop_assert!(diff.re.abs() < 1e-11 * lhs.norm().max(1.0));
                prop_assert!((diff.im - 2.0 * PI * k).abs() < 1e-11 * lhs.norm().max(1.0));
            }
        }
    }
}
