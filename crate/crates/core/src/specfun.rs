//! Self-contained special-function kernel.
//!
//! Provides exactly what the distribution and antenna modules need:
//!
//! - confluent hypergeometric `1F1(a, b, x)` (power series with Kummer's
//!   transform for negative arguments),
//! - `1F1(m, 1, x)` as a finite polynomial for integer `m`,
//! - Bessel `J1` (power series below 13, Hankel asymptotic expansion above;
//!   absolute error <= 1e-10 on |x| <= 1000),
//! - lower incomplete gamma for integer shape,
//! - factorial / log-factorial / binomial helpers.
//!
//! Everything is pure, real-valued `f64` and safe to call concurrently.

use crate::error::{Error, Result};

/// Relative size at which a series term is considered negligible.
pub const SERIES_RELATIVE_TOL: f64 = 1e-15;

/// Hard cap on series terms; past this the evaluation reports
/// `converged = false`.
pub const SERIES_MAX_TERMS: usize = 10_000;

/// Outcome of a series-based evaluation.
///
/// Callers must not consume `value` when `converged` is false; the
/// distribution layer promotes that case to an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecfunResult {
    pub value: f64,
    pub converged: bool,
    pub terms_used: usize,
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

/// Confluent hypergeometric function 1F1(a, b, x) = sum_i (a)_i x^i / (i! (b)_i).
///
/// For x < 0 the direct series alternates and loses precision to
/// cancellation, so Kummer's transform 1F1(a,b,x) = e^x 1F1(b-a, b, -x) is
/// applied to restore a same-sign series.
///
/// `b` must not be zero or a negative integer (the series poles).
pub fn confluent_1f1(a: f64, b: f64, x: f64) -> Result<SpecfunResult> {
    check_finite("a", a)?;
    check_finite("x", x)?;
    check_finite("b", b)?;
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "1F1 parameter b must not be a non-positive integer, got {b}"
        )));
    }
    if x < 0.0 {
        let t = confluent_series(b - a, b, -x);
        return Ok(SpecfunResult {
            value: x.exp() * t.value,
            ..t
        });
    }
    Ok(confluent_series(a, b, x))
}

fn confluent_series(a: f64, b: f64, x: f64) -> SpecfunResult {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut small_streak = 0u32;
    for i in 0..SERIES_MAX_TERMS {
        let k = i as f64;
        term *= (a + k) * x / ((b + k) * (k + 1.0));
        sum += term;
        if term.abs() <= SERIES_RELATIVE_TOL * sum.abs() {
            // Two consecutive negligible terms guard against a transient
            // dip while coefficients still change sign.
            small_streak += 1;
            if small_streak >= 2 || term == 0.0 {
                return SpecfunResult {
                    value: sum,
                    converged: true,
                    terms_used: i + 2,
                };
            }
        } else {
            small_streak = 0;
        }
    }
    SpecfunResult {
        value: sum,
        converged: false,
        terms_used: SERIES_MAX_TERMS,
    }
}

/// 1F1(m, 1, x) for integer m >= 1 as the finite polynomial
///
/// ```text
/// e^x * sum_{i=0}^{m-1} (m-1)! x^i / ((m-1-i)! (i!)^2)
/// ```
///
/// obtained from Kummer's transform; no truncation is involved.
pub fn kummer_polynomial(m: u32, x: f64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidParameter("kummer_polynomial requires m >= 1".into()));
    }
    check_finite("x", x)?;
    Ok(x.exp() * kummer_polynomial_sum(m, x))
}

/// The polynomial factor of [`kummer_polynomial`] without the `e^x` term.
///
/// Exposed so distribution code can fold the exponential into its own
/// prefactor and avoid overflow/underflow pairs.
pub fn kummer_polynomial_sum(m: u32, x: f64) -> f64 {
    let mf = f64::from(m);
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for i in 0..(m - 1) {
        let k = f64::from(i);
        // c_{i+1}/c_i = (m-1-i) / (i+1)^2
        term *= x * (mf - 1.0 - k) / ((k + 1.0) * (k + 1.0));
        sum += term;
    }
    sum
}

/// Bessel function of the first kind, order one.
///
/// Power series for |x| <= 13:
///
/// ```text
/// J1(x) = sum_k (-1)^k (x/2)^{2k+1} / (k! (k+1)!)
/// ```
///
/// Hankel asymptotic expansion for |x| > 13, truncated at its smallest
/// term. Absolute error is below 1e-10 on |x| <= 1000 (validated against
/// a 40-digit reference grid); odd symmetry is exact by construction.
pub fn bessel_j1(x: f64) -> Result<f64> {
    check_finite("x", x)?;
    let ax = x.abs();
    let val = if ax <= 13.0 {
        j1_series(ax)
    } else {
        j1_asymptotic(ax)
    };
    Ok(if x < 0.0 { -val } else { val })
}

fn j1_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = x / 2.0;
    let mut sum = term;
    for k in 1..60 {
        let kf = k as f64;
        term *= -q / (kf * (kf + 1.0));
        sum += term;
        if term.abs() < 1e-18 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

fn j1_asymptotic(x: f64) -> f64 {
    // J1 + iY1 = sqrt(2/(pi x)) e^{i chi} sum_k i^k r_k, chi = x - 3pi/4,
    // r_k = r_{k-1} (4 - (2k-1)^2) / (8 k x). The series diverges, so it is
    // truncated at its smallest term.
    let mut re = 1.0f64; // k = 0 term
    let mut im = 0.0f64;
    let mut r = 1.0f64;
    let mut prev = f64::INFINITY;
    for k in 1..40u32 {
        let kf = f64::from(k);
        let t = 2.0 * kf - 1.0;
        r *= (4.0 - t * t) / (8.0 * kf * x);
        if r.abs() >= prev {
            break;
        }
        prev = r.abs();
        match k % 4 {
            1 => im += r,
            2 => re -= r,
            3 => im -= r,
            _ => re += r,
        }
        if r.abs() < 1e-18 {
            break;
        }
    }
    let chi = x - 3.0 * std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (chi.cos() * re - chi.sin() * im)
}

/// Lower incomplete gamma for integer shape a >= 1:
///
/// ```text
/// gamma(a, x) = (a-1)! (1 - e^{-x} sum_{k=0}^{a-1} x^k / k!)
/// ```
///
/// Monotone nondecreasing in x, gamma(a, 0) = 0 and gamma(a, inf) = (a-1)!.
///
/// The identity above cancels catastrophically when x << a (the true value
/// is tiny against (a-1)!), so that branch evaluates the ascending series
/// `x^a e^{-x} sum_n x^n / (a (a+1) ... (a+n))` instead, keeping relative
/// accuracy near machine precision everywhere.
pub fn lower_incomplete_gamma_int(a: u32, x: f64) -> Result<f64> {
    if a < 1 {
        return Err(Error::InvalidParameter("incomplete gamma requires a >= 1".into()));
    }
    check_finite("x", x)?;
    if x < 0.0 {
        return Err(Error::InvalidParameter(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let af = f64::from(a);
    if x < af + 1.0 {
        // ascending series, all terms positive
        let mut term = 1.0 / af;
        let mut sum = term;
        for n in 1..500 {
            term *= x / (af + f64::from(n));
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return Ok((af * x.ln() - x).exp() * sum);
    }
    // Poisson-weight recurrence: every u_k = e^{-x} x^k / k! lies in [0, 1],
    // so there is no overflow even for large x; e^{-x} underflow at huge x
    // correctly collapses the sum to zero.
    let mut u = (-x).exp();
    let mut sum = u;
    for k in 1..a {
        u *= x / f64::from(k);
        sum += u;
    }
    Ok(factorial(a - 1) * (1.0 - sum).max(0.0))
}

/// n! as f64; exact for n <= 22, correctly rounded up to n = 170.
pub fn factorial(n: u32) -> f64 {
    assert!(n <= 170, "factorial overflows f64 for n > 170");
    let mut f = 1.0f64;
    for k in 2..=n {
        f *= f64::from(k);
    }
    f
}

/// ln(n!) by direct summation.
pub fn ln_factorial(n: u32) -> f64 {
    let mut s = 0.0f64;
    for k in 2..=n {
        s += f64::from(k).ln();
    }
    s
}

/// Binomial coefficient C(n, k) as f64.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 0..k {
        c *= f64::from(n - i) / f64::from(i + 1);
    }
    c
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle digits
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E: f64 = std::f64::consts::E;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    // ----- confluent hypergeometric --------------------------------------

    #[test]
    fn confluent_exponential_identity() {
        // 1F1(1, 1, x) = e^x
        let r = confluent_1f1(1.0, 1.0, 2.0).unwrap();
        assert!(r.converged);
        assert!(rel(r.value, E * E) < 1e-14, "got {}", r.value);
    }

    #[test]
    fn confluent_at_zero_is_one() {
        for m in [0.739, 1.0, 10.1, 19.4] {
            let r = confluent_1f1(m, 1.0, 0.0).unwrap();
            assert_eq!(r.value, 1.0);
            assert!(r.terms_used >= 1);
        }
    }

    #[test]
    fn confluent_identity_2_1() {
        // 1F1(2, 1, x) = e^x (1 + x); reference value from a 40-digit
        // series evaluation.
        let r = confluent_1f1(2.0, 1.0, 1.0).unwrap();
        assert!(rel(r.value, 5.43656365691809047) < 1e-14);
    }

    #[test]
    fn confluent_spot_values() {
        // 40-digit series references.
        let cases = [
            (19.0, 1.0, 0.7, 289.915279529048021),
            (19.4, 1.0, 14.0, 2.64435618686182246e16),
            (10.1, 1.0, 25.0, 1.07673741900621197e19),
            (0.739, 1.0, 3.3, 16.3972656907565591),
        ];
        for (a, b, x, want) in cases {
            let r = confluent_1f1(a, b, x).unwrap();
            assert!(r.converged);
            assert!(rel(r.value, want) < 1e-12, "1F1({a},{b},{x}) = {} want {want}", r.value);
        }
    }

    #[test]
    fn confluent_negative_argument_uses_transform() {
        // Heavy cancellation cases for the raw series; the transform keeps
        // full precision. References from 40-digit arithmetic.
        let r = confluent_1f1(3.0, 2.0, -5.0).unwrap();
        assert!(rel(r.value, -0.0101069204986282006) < 1e-12, "got {}", r.value);
        let r = confluent_1f1(2.5, 1.5, -12.0).unwrap();
        assert!(rel(r.value, -4.30094864732974683e-5) < 1e-11, "got {}", r.value);
    }

    #[test]
    fn confluent_rejects_bad_b() {
        assert!(confluent_1f1(1.0, 0.0, 1.0).is_err());
        assert!(confluent_1f1(1.0, -3.0, 1.0).is_err());
        // non-integer negative b is a valid parameter
        assert!(confluent_1f1(1.0, -0.5, 0.3).is_ok());
    }

    #[test]
    fn confluent_rejects_non_finite() {
        assert!(confluent_1f1(1.0, 1.0, f64::NAN).is_err());
        assert!(confluent_1f1(f64::INFINITY, 1.0, 1.0).is_err());
    }

    // ----- Kummer polynomial ----------------------------------------------

    #[test]
    fn kummer_m1_is_exponential() {
        for x in [-3.0, 0.0, 0.5, 10.0, 50.0] {
            assert!(rel(kummer_polynomial(1, x).unwrap(), x.exp()) < 1e-15);
        }
    }

    #[test]
    fn kummer_m2_matches_series() {
        let k = kummer_polynomial(2, 1.0).unwrap();
        assert!(rel(k, 2.0 * E) < 1e-12);
        let s = confluent_1f1(2.0, 1.0, 1.0).unwrap().value;
        assert!(rel(k, s) < 1e-12);
    }

    #[test]
    fn kummer_19_spot_value() {
        let k = kummer_polynomial(19, 0.7).unwrap();
        assert!(rel(k, 289.915279529048021) < 1e-13);
        let s = confluent_1f1(19.0, 1.0, 0.7).unwrap().value;
        assert!(rel(k, s) < 1e-10);
    }

    #[test]
    fn kummer_rejects_m0() {
        assert!(kummer_polynomial(0, 1.0).is_err());
    }

    #[test]
    fn kummer_agrees_with_series_over_grid() {
        // Core agreement invariant: m in 1..=25, x in [0, 50].
        for m in 1..=25u32 {
            let mut x = 0.0;
            while x <= 50.0 {
                let k = kummer_polynomial(m, x).unwrap();
                let s = confluent_1f1(f64::from(m), 1.0, x).unwrap();
                assert!(s.converged);
                assert!(
                    (k - s.value).abs() / k < 1e-9,
                    "m={m} x={x}: kummer={k} series={}",
                    s.value
                );
                x += 2.5;
            }
        }
    }

    // ----- Bessel J1 -------------------------------------------------------

    #[test]
    fn j1_at_zero() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    }

    #[test]
    fn j1_first_root() {
        let v = bessel_j1(3.8317059702).unwrap();
        assert!(v.abs() < 1e-9, "J1 at first root = {v}");
    }

    #[test]
    fn j1_at_one() {
        // 50-term power series reference (40-digit arithmetic).
        assert!((bessel_j1(1.0).unwrap() - 0.440050585744933516).abs() < 1e-13);
    }

    #[test]
    fn j1_reference_grid() {
        // 40-digit references across both implementation branches.
        let cases = [
            (0.5, 0.242268457674873886),
            (2.0, 0.576724807756873387),
            (3.5, 0.137377527362327186),
            (5.0, -0.327579137591465222),
            (7.0, -0.0046828234823458327),
            (10.0, 0.0434727461688614367),
            (12.5, -0.165483804614759718),
            (13.0, -0.0703180521217783712),
            (13.5, 0.0380492920860014232),
            (15.0, 0.205104038613522761),
            (18.0, -0.187994885488069594),
            (20.0, 0.0668331241758500456),
            (25.0, -0.125350249580289905),
            (50.0, -0.0975118281251751377),
            (123.456, -0.0108395848565206487),
            (500.0, 0.0104726134703722928),
            (1000.0, 0.00472831190708952392),
        ];
        for (x, want) in cases {
            let got = bessel_j1(x).unwrap();
            assert!((got - want).abs() < 1e-10, "J1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn j1_rejects_non_finite() {
        assert!(bessel_j1(f64::NAN).is_err());
        assert!(bessel_j1(f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn j1_odd_symmetry(x in -1000.0f64..1000.0) {
            let p = bessel_j1(x).unwrap();
            let n = bessel_j1(-x).unwrap();
            prop_assert!((p + n).abs() <= 1e-14);
        }
    }

    // ----- incomplete gamma ------------------------------------------------

    #[test]
    fn gamma_a1_closed_form() {
        for x in [0.0, 0.5, 2.0, 10.0] {
            let g = lower_incomplete_gamma_int(1, x).unwrap();
            assert!((g - (1.0 - (-x).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_at_zero() {
        for a in [1, 3, 10, 25] {
            assert_eq!(lower_incomplete_gamma_int(a, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn gamma_spot_values() {
        // 40-digit references.
        let cases = [
            (1, 0.5, 0.393469340287366576),
            (3, 2.0, 0.646647167633873081),
            (5, 4.5, 11.2295141670068285),
            (10, 3.0, 400.070892656305289),
            (25, 30.0, 5.22887837247884867e23),
        ];
        for (a, x, want) in cases {
            let g = lower_incomplete_gamma_int(a, x).unwrap();
            assert!(rel(g, want) < 1e-12, "gamma({a},{x}) = {g}, want {want}");
        }
    }

    #[test]
    fn gamma_relative_accuracy_at_small_x() {
        // the complement identity cancels here; the series branch keeps
        // relative precision (40-digit references)
        let cases = [
            (25u32, 0.1, 3.63332199026523629e-27),
            (25, 0.5, 7.37207694765580066e-10),
            (10, 0.25, 7.59960910194242402e-8),
        ];
        for (a, x, want) in cases {
            let g = lower_incomplete_gamma_int(a, x).unwrap();
            assert!(rel(g, want) < 1e-12, "gamma({a},{x}) = {g:e}, want {want:e}");
        }
    }

    #[test]
    fn gamma_saturates_to_factorial() {
        for a in [1u32, 3, 10] {
            let g = lower_incomplete_gamma_int(a, 1e4).unwrap();
            assert!(rel(g, factorial(a - 1)) < 1e-15);
        }
    }

    #[test]
    fn gamma_rejects_bad_input() {
        assert!(lower_incomplete_gamma_int(0, 1.0).is_err());
        assert!(lower_incomplete_gamma_int(3, -0.1).is_err());
    }

    proptest! {
        #[test]
        fn gamma_monotone_and_bounded(a in 1u32..26, x1 in 0.0f64..80.0, dx in 0.0f64..20.0) {
            let g1 = lower_incomplete_gamma_int(a, x1).unwrap();
            let g2 = lower_incomplete_gamma_int(a, x1 + dx).unwrap();
            prop_assert!(g2 >= g1 - 1e-12);
            prop_assert!(g1 >= 0.0 && g1 <= factorial(a - 1) * (1.0 + 1e-15));
        }
    }

    // ----- factorial helpers -----------------------------------------------

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(factorial(18), 6402373705728000.0);
    }

    #[test]
    fn ln_factorial_consistency() {
        for n in [2u32, 10, 50, 170] {
            if n <= 170 {
                let direct = factorial(n).ln();
                assert!((ln_factorial(n) - direct).abs() < 1e-9 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(18, 0), 1.0);
        assert_eq!(binomial(4, 7), 0.0);
        assert!(rel(binomial(50, 25), 1.2641060643775e14) < 1e-10);
    }
}
