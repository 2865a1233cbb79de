//! Real gamma-family scalars: log-gamma, digamma, finite digamma
//! differences and gamma ratios.
//!
//! Everything here is a pure function of `f64` arguments. Ratios whose
//! arguments differ by a nonnegative integer never touch `ln Γ`; they are
//! evaluated as rising products.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_R: f64 = 10.900511;

#[allow(clippy::excessive_precision)]
const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// ln(2·sqrt(e/π))
#[allow(clippy::excessive_precision)]
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452223455184457816472122518527279025978;

/// Below this the digamma argument is shifted upward before the asymptotic
/// series is applied.
const DIGAMMA_ASYMPTOTIC_FROM: f64 = 10.0;

/// B_{2k} / (2k) for k = 1..=7.
const DIGAMMA_ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// A finite real argument.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RealArg(f64);

impl RealArg {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::NonFinite(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_pole(self) -> bool {
        is_nonpositive_integer(self.0)
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn check_arg(x: f64) -> Result<RealArg> {
    let arg = RealArg::new(x)?;
    if arg.is_pole() {
        return Err(Error::Pole(x));
    }
    Ok(arg)
}

/// sin(πx) with the argument reduced modulo 2 first, so that large |x|
/// does not lose the fractional part.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    (PI * r).sin()
}

/// `ln|Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma_abs(x: f64) -> Result<(f64, f64)> {
    let x = check_arg(x)?.value();
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> (f64, f64) {
    if x < 0.5 {
        // Γ(x)Γ(1-x) = π / sin(πx), and Γ(1-x) > 0 here.
        let s = sin_pi(x);
        let (lg, _) = ln_gamma_unchecked(1.0 - x);
        return (PI.ln() - s.abs().ln() - lg, s.signum());
    }
    let sum = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |acc, (i, &dk)| {
            acc + dk / (x - 1.0 + i as f64)
        });
    let lg = sum.ln()
        + LN_2_SQRT_E_OVER_PI
        + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).ln();
    (lg, 1.0)
}

/// ψ(x), the logarithmic derivative of Γ.
pub fn digamma(x: f64) -> Result<f64> {
    let mut y = check_arg(x)?.value();
    let mut shift = 0.0;
    while y < DIGAMMA_ASYMPTOTIC_FROM {
        shift += 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut pow = inv2;
    let mut tail = 0.0;
    for c in DIGAMMA_ASYMPTOTIC {
        tail += c * pow;
        pow *= inv2;
    }
    Ok(y.ln() - 0.5 / y - tail - shift)
}

/// ψ(a+m) − ψ(a) as the finite sum Σ_{j<m} 1/(a+j).
pub fn digamma_diff(a: f64, m: usize) -> Result<f64> {
    let a = RealArg::new(a)?.value();
    let mut sum = 0.0;
    for j in 0..m {
        let t = a + j as f64;
        if t == 0.0 {
            return Err(Error::Pole(t));
        }
        sum += 1.0 / t;
    }
    Ok(sum)
}

/// Rising factorial x(x+1)···(x+m−1); the empty product is 1.
pub fn pochhammer(x: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (x + j as f64))
}

/// Γ(num)/Γ(den).
///
/// When `num − den` is a nonnegative integer the ratio is the rising
/// product `den·(den+1)···(num−1)`; otherwise it goes through `ln Γ`.
pub fn gamma_ratio(num: f64, den: f64) -> Result<f64> {
    let num = RealArg::new(num)?.value();
    let den = RealArg::new(den)?.value();
    let shift = num - den;
    if shift >= 0.0 && shift == shift.round() && shift <= u32::MAX as f64 {
        let value = pochhammer(den, shift as usize);
        return if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Overflow)
        };
    }
    let (ln_num, sign_num) = ln_gamma_abs(num)?;
    let (ln_den, sign_den) = ln_gamma_abs(den)?;
    let log = ln_num - ln_den;
    if log > f64::MAX.ln() {
        return Err(Error::Overflow);
    }
    Ok(sign_num * sign_den * log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn ln_gamma_small_values() {
        assert_eq!(ln_gamma_abs(1.0).unwrap().1, 1.0);
        assert!(ln_gamma_abs(1.0).unwrap().0.abs() < 1e-15);
        let (lg, s) = ln_gamma_abs(5.0).unwrap();
        assert_eq!(s, 1.0);
        assert!((lg - 24f64.ln()).abs() < 1e-14);
        let (lg, _) = ln_gamma_abs(0.5).unwrap();
        assert!((lg - PI.sqrt().ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_negative_sign() {
        // Γ(-0.5) = -2√π
        let (lg, s) = ln_gamma_abs(-0.5).unwrap();
        assert_eq!(s, -1.0);
        assert!(rel(lg.exp(), 2.0 * PI.sqrt()) < 1e-13);
        // Γ(-1.5) = 4√π/3
        let (lg, s) = ln_gamma_abs(-1.5).unwrap();
        assert_eq!(s, 1.0);
        assert!(rel(lg.exp(), 4.0 * PI.sqrt() / 3.0) < 1e-13);
    }

    #[test]
    fn ln_gamma_factorials_up_to_170() {
        let mut ln_fact = 0.0f64;
        for n in 1..=170u32 {
            let (lg, _) = ln_gamma_abs(n as f64 + 1.0).unwrap();
            ln_fact += (n as f64).ln();
            assert!((lg - ln_fact).abs() <= 1e-12 * ln_fact.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn poles_are_rejected() {
        for x in [0.0, -1.0, -7.0] {
            assert_eq!(ln_gamma_abs(x), Err(Error::Pole(x)));
            assert_eq!(digamma(x), Err(Error::Pole(x)));
        }
        assert!(matches!(digamma_diff(-2.0, 3), Err(Error::Pole(_))));
        assert!(matches!(gamma_ratio(0.5, -3.0), Err(Error::Pole(_))));
        assert!(matches!(ln_gamma_abs(f64::NAN), Err(Error::NonFinite(_))));
    }

    #[test]
    fn digamma_reference_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        let half = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-14);
    }

    #[test]
    fn digamma_diff_examples() {
        assert!((digamma_diff(0.5, 2).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(digamma_diff(3.7, 0).unwrap(), 0.0);
        assert!((digamma_diff(1.0, 3).unwrap() - (1.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn gamma_ratio_examples() {
        assert_eq!(gamma_ratio(5.0, 3.0).unwrap(), 12.0);
        assert_eq!(gamma_ratio(0.3, 0.3).unwrap(), 1.0);
        assert_eq!(gamma_ratio(4.5, 2.5).unwrap(), 8.75);
        assert!(rel(gamma_ratio(0.5, 1.0).unwrap(), PI.sqrt()) < 1e-13);
        assert_eq!(gamma_ratio(400.0, 0.5), Err(Error::Overflow));
        assert_eq!(gamma_ratio(200.25, 0.5), Err(Error::Overflow));
    }

    #[test]
    fn digamma_recurrence_on_grid() {
        let mut x = 0.1;
        while x <= 100.0 {
            let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            assert!(d.abs() <= 1e-12, "x = {x}: {d}");
            x += 0.37;
        }
    }

    #[test]
    fn digamma_diff_matches_digamma_difference() {
        for &a in &[-3.5, -0.25, 0.1, 0.75, 2.0, 13.3, 60.0] {
            for m in 0..40 {
                let lhs = digamma_diff(a, m).unwrap();
                let rhs = digamma(a + m as f64).unwrap() - digamma(a).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10, "a = {a}, m = {m}");
            }
        }
    }

    proptest! {
        #[test]
        fn gamma_ratio_integer_path_matches_log_path(den in 0.05f64..60.0, m in 0usize..40) {
            let num = den + m as f64;
            let fast = gamma_ratio(num, den).unwrap();
            let (a, _) = ln_gamma_abs(num).unwrap();
            let (b, _) = ln_gamma_abs(den).unwrap();
            let slow = (a - b).exp();
            prop_assert!(rel(fast, slow) <= 1e-12);
        }

        #[test]
        fn reflection_reproduces_pi_over_sin(x in 0.001f64..1.999) {
            prop_assume!((x - 1.0).abs() > 1e-3);
            let (a, _) = ln_gamma_abs(x).unwrap();
            let (b, _) = ln_gamma_abs(1.0 - x).unwrap();
            let expected = (PI / sin_pi(x)).abs().ln();
            prop_assert!((a + b - expected).abs() <= 1e-10);
        }

        #[test]
        fn digamma_recurrence_holds(x in 0.1f64..100.0) {
            let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            prop_assert!(d.abs() <= 1e-12);
        }
    }
}
