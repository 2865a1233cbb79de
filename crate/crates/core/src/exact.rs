//! Exact rational oracle.
//!
//! Polynomials are built from their explicit series with every gamma ratio
//! reduced to a rising product, so each monomial coefficient is a product
//! of linear factors in the differentiated parameter. Differentiating
//! those products by the product rule gives `∂P_n/∂(parameter)` exactly,
//! without going through the closed-form coefficient rows. The rows are
//! then checked against it coefficient-for-coefficient.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ortho::{Family, FamilySpec, Param};

pub use num_rational::BigRational;

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Nearest `f64`.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, an integer, or a plain decimal such as `-0.125` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Domain(format!("not a rational number: {text:?}"));
    if t.contains('/') {
        let r = BigRational::from_str(t).map_err(|_| bad())?;
        return Ok(r);
    }
    let (neg, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty()
        || !whole
            .chars()
            .chain(frac.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let mantissa = BigInt::from_str(&format!("0{whole}{frac}")).map_err(|_| bad())?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(mantissa, scale);
    Ok(if neg { -r } else { r })
}

/// Formats as `p/q` in lowest terms (or `p` for integers), sign on `p`.
pub fn format_rational(x: &BigRational) -> String {
    x.to_string()
}

/// Expansion point of a [`MonomialPoly`]: powers of `z` or of `z − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Center {
    Zero,
    One,
}

impl Center {
    fn value(self) -> BigRational {
        match self {
            Center::Zero => BigRational::zero(),
            Center::One => BigRational::one(),
        }
    }
}

/// Polynomial `Σ c_i (z − center)^i` with exact coefficients. Trailing
/// zero coefficients are trimmed; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialPoly {
    center: Center,
    coeffs: Vec<BigRational>,
}

impl MonomialPoly {
    pub fn new(center: Center, mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { center, coeffs }
    }

    pub fn zero(center: Center) -> Self {
        Self {
            center,
            coeffs: Vec::new(),
        }
    }

    pub fn center(&self) -> Center {
        self.center
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `(z − center)^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: &BigRational) -> BigRational {
        let t = z - self.center.value();
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &t + c)
    }

    pub fn eval_f64(&self, z: &BigRational) -> f64 {
        to_f64(&self.eval(z))
    }

    /// Re-expands around another center by binomial expansion.
    pub fn recenter(&self, to: Center) -> Self {
        if to == self.center || self.is_zero() {
            return Self {
                center: to,
                coeffs: self.coeffs.clone(),
            };
        }
        // z − from = (z − to) + shift
        let shift = to.value() - self.center.value();
        let n = self.coeffs.len();
        let mut out = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            // c (y + shift)^i = Σ_j C(i,j) shift^{i−j} y^j
            let mut binom = BigInt::one();
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                let pow = num_traits::pow(shift.clone(), i - j);
                *slot += c * &pow * BigRational::from_integer(binom.clone());
                binom = binom * BigInt::from(i - j) / BigInt::from(j + 1);
            }
        }
        Self::new(to, out)
    }

    fn add_scaled(&mut self, other: &MonomialPoly, scale: &BigRational) {
        debug_assert_eq!(self.center, other.center);
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * scale;
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
}

impl fmt::Display for MonomialPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let var = match self.center {
            Center::Zero => "z",
            Center::One => "(z-1)",
        };
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*{var}")?,
                _ => write!(f, "{c}*{var}^{i}")?,
            }
        }
        Ok(())
    }
}

/// A family with exact rational parameters, checked against the same
/// domains as [`FamilySpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSpec {
    family: Family,
    alpha: BigRational,
    beta: BigRational,
    lambda: BigRational,
    wrt: Param,
}

impl ExactSpec {
    pub fn laguerre(alpha: BigRational) -> Result<Self> {
        if alpha <= int(-1) {
            return Err(Error::Domain(format!(
                "laguerre requires alpha > -1, got {alpha}"
            )));
        }
        Ok(Self {
            family: Family::Laguerre,
            alpha,
            beta: int(0),
            lambda: int(0),
            wrt: Param::Alpha,
        })
    }

    pub fn gegenbauer(lambda: BigRational) -> Result<Self> {
        if lambda <= ratio(-1, 2) || lambda.is_zero() {
            return Err(Error::Domain(format!(
                "gegenbauer requires lambda > -1/2 and lambda != 0, got {lambda}"
            )));
        }
        Ok(Self {
            family: Family::Gegenbauer,
            alpha: int(0),
            beta: int(0),
            lambda,
            wrt: Param::Lambda,
        })
    }

    pub fn jacobi(alpha: BigRational, beta: BigRational, wrt: Param) -> Result<Self> {
        if alpha <= int(-1) {
            return Err(Error::Domain(format!(
                "jacobi requires alpha > -1, got {alpha}"
            )));
        }
        if beta <= int(-1) {
            return Err(Error::Domain(format!(
                "jacobi requires beta > -1, got {beta}"
            )));
        }
        if wrt == Param::Lambda {
            return Err(Error::Domain(
                "jacobi derivatives are taken wrt alpha or beta".into(),
            ));
        }
        Ok(Self {
            family: Family::Jacobi,
            alpha,
            beta,
            lambda: int(0),
            wrt,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn wrt(&self) -> Param {
        self.wrt
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn param_value(&self) -> &BigRational {
        match self.wrt {
            Param::Alpha => &self.alpha,
            Param::Beta => &self.beta,
            Param::Lambda => &self.lambda,
        }
    }

    /// Same spec with the targeted parameter replaced; domain-checked.
    pub fn with_param(&self, value: BigRational) -> Result<Self> {
        match (self.family, self.wrt) {
            (Family::Laguerre, _) => Self::laguerre(value),
            (Family::Gegenbauer, _) => Self::gegenbauer(value),
            (Family::Jacobi, Param::Alpha) => Self::jacobi(value, self.beta.clone(), Param::Alpha),
            (Family::Jacobi, _) => Self::jacobi(self.alpha.clone(), value, Param::Beta),
        }
    }

    /// Named parameters in a stable order.
    pub fn parameters(&self) -> Vec<(&'static str, &BigRational)> {
        match self.family {
            Family::Laguerre => vec![("alpha", &self.alpha)],
            Family::Gegenbauer => vec![("lambda", &self.lambda)],
            Family::Jacobi => vec![("alpha", &self.alpha), ("beta", &self.beta)],
        }
    }

    /// Float counterpart (parameters rounded to nearest).
    pub fn to_float(&self) -> Result<FamilySpec> {
        match self.family {
            Family::Laguerre => FamilySpec::laguerre(to_f64(&self.alpha)),
            Family::Gegenbauer => FamilySpec::gegenbauer(to_f64(&self.lambda)),
            Family::Jacobi => FamilySpec::jacobi(to_f64(&self.alpha), to_f64(&self.beta), self.wrt),
        }
    }

    pub fn center(&self) -> Center {
        match self.family {
            Family::Laguerre => Center::Zero,
            _ => Center::One,
        }
    }

    /// A family parameter as a linear function of the targeted one.
    fn linear(&self, which: Param) -> Linear {
        let value = match which {
            Param::Alpha => &self.alpha,
            Param::Beta => &self.beta,
            Param::Lambda => &self.lambda,
        };
        if which == self.wrt {
            Linear {
                offset: int(0),
                slope: int(1),
            }
        } else {
            Linear {
                offset: value.clone(),
                slope: int(0),
            }
        }
    }
}

impl fmt::Display for ExactSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family)?;
        for (i, (name, v)) in self.parameters().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={v}")?;
        }
        if self.family == Family::Jacobi {
            write!(f, "; wrt {}", self.wrt)?;
        }
        f.write_str(")")
    }
}

/// `offset + slope·p` in the targeted parameter `p`.
#[derive(Debug, Clone)]
struct Linear {
    offset: BigRational,
    slope: BigRational,
}

impl Linear {
    fn plus(&self, c: BigRational) -> Self {
        Self {
            offset: &self.offset + c,
            slope: self.slope.clone(),
        }
    }

    fn times(&self, c: i64) -> Self {
        Self {
            offset: &self.offset * int(c),
            slope: &self.slope * int(c),
        }
    }

    fn add(&self, other: &Linear) -> Self {
        Self {
            offset: &self.offset + &other.offset,
            slope: &self.slope + &other.slope,
        }
    }

    fn at(&self, p: &BigRational) -> BigRational {
        &self.offset + &self.slope * p
    }
}

/// `constant · Π num / Π den` with linear factors in the targeted parameter.
#[derive(Debug, Clone)]
struct FactorProduct {
    constant: BigRational,
    num: Vec<Linear>,
    den: Vec<Linear>,
}

impl FactorProduct {
    fn new(constant: BigRational) -> Self {
        Self {
            constant,
            num: Vec::new(),
            den: Vec::new(),
        }
    }

    /// Multiplies by the rising product `(x)_m`.
    fn rising(mut self, x: &Linear, m: usize) -> Self {
        self.num.extend((0..m).map(|j| x.plus(int(j as i64))));
        self
    }

    /// Divides by the rising product `(x)_m`.
    fn over_rising(mut self, x: &Linear, m: usize) -> Self {
        self.den.extend((0..m).map(|j| x.plus(int(j as i64))));
        self
    }

    fn product(factors: &[Linear], p: &BigRational) -> BigRational {
        factors
            .iter()
            .fold(BigRational::one(), |acc, f| acc * f.at(p))
    }

    /// d/dp of Π factors by the product rule.
    fn product_derivative(factors: &[Linear], p: &BigRational) -> BigRational {
        let values: Vec<BigRational> = factors.iter().map(|f| f.at(p)).collect();
        let mut total = BigRational::zero();
        for (i, f) in factors.iter().enumerate() {
            if f.slope.is_zero() {
                continue;
            }
            let rest = values
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(f.slope.clone(), |acc, (_, v)| acc * v);
            total += rest;
        }
        total
    }

    fn value(&self, p: &BigRational) -> BigRational {
        &self.constant * Self::product(&self.num, p) / Self::product(&self.den, p)
    }

    fn derivative(&self, p: &BigRational) -> BigRational {
        let n = Self::product(&self.num, p);
        let d = Self::product(&self.den, p);
        let dn = Self::product_derivative(&self.num, p);
        let dd = Self::product_derivative(&self.den, p);
        &self.constant * (dn * &d - n * dd) / (&d * &d)
    }
}

fn factorial(m: usize) -> BigRational {
    BigRational::from_integer((1..=m).fold(BigInt::one(), |acc, j| acc * BigInt::from(j)))
}

/// Series coefficients of `P_n` around the family's center, each as a
/// product of linear factors in the targeted parameter.
fn series_factors(spec: &ExactSpec, n: usize) -> Vec<FactorProduct> {
    let alpha = spec.linear(Param::Alpha);
    let beta = spec.linear(Param::Beta);
    let lambda = spec.linear(Param::Lambda);
    (0..=n)
        .map(|k| {
            let denom = factorial(k) * factorial(n - k);
            match spec.family {
                Family::Laguerre => {
                    // (−1)^k/(k!(n−k)!) (α+k+1)_{n−k} z^k
                    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
                    FactorProduct::new(sign / denom).rising(&alpha.plus(int(k as i64 + 1)), n - k)
                }
                Family::Gegenbauer => {
                    // (2λ)_{n+k} / ((λ+½)_k k!(n−k)! 2^k) (z−1)^k
                    let two_k = num_traits::pow(int(2), k);
                    FactorProduct::new(BigRational::one() / (denom * two_k))
                        .rising(&lambda.times(2), n + k)
                        .over_rising(&lambda.plus(ratio(1, 2)), k)
                }
                Family::Jacobi => {
                    // (α+k+1)_{n−k} (n+α+β+1)_k / (k!(n−k)! 2^k) (z−1)^k
                    let two_k = num_traits::pow(int(2), k);
                    FactorProduct::new(BigRational::one() / (denom * two_k))
                        .rising(&alpha.plus(int(k as i64 + 1)), n - k)
                        .rising(&alpha.add(&beta).plus(int(n as i64 + 1)), k)
                }
            }
        })
        .collect()
}

/// `P_n` with exact coefficients; powers of `z` for Laguerre, of `z − 1`
/// for Gegenbauer and Jacobi.
pub fn exact_poly(spec: &ExactSpec, n: usize) -> MonomialPoly {
    let p = spec.param_value();
    let coeffs = series_factors(spec, n).iter().map(|f| f.value(p)).collect();
    MonomialPoly::new(spec.center(), coeffs)
}

/// `∂P_n/∂(parameter)` with exact coefficients, by differentiating each
/// series coefficient symbolically.
pub fn exact_param_derivative(spec: &ExactSpec, n: usize) -> MonomialPoly {
    let p = spec.param_value();
    let coeffs = series_factors(spec, n)
        .iter()
        .map(|f| f.derivative(p))
        .collect();
    MonomialPoly::new(spec.center(), coeffs)
}

/// Leading coefficient `k_n` (of `z^n` or `(z−1)^n`).
pub fn exact_leading_coefficient(spec: &ExactSpec, n: usize) -> BigRational {
    exact_poly(spec, n).coeff(n)
}

/// `Σ_{j<m} 1/(a+j)`.
fn harmonic_shifted(a: &BigRational, m: usize) -> BigRational {
    (0..m).fold(BigRational::zero(), |acc, j| {
        acc + (a + int(j as i64)).recip()
    })
}

fn jacobi_alpha_row(n: usize, alpha: &BigRational, beta: &BigRational) -> Vec<BigRational> {
    let s = alpha + beta + int(1);
    let nn = int(n as i64);
    let mut row = Vec::with_capacity(n + 1);
    for k in 0..n {
        let kk = int(k as i64);
        // (2k+s)/(k+s) · Π_{j=k}^{n−1} (j+β+1) / Π_{j=k+1}^{n−1} (j+s); the
        // leading ratio is 1 at k = 0 (s·Γ(s) = Γ(s+1)).
        let lead = if k == 0 {
            int(1)
        } else {
            (int(2) * &kk + &s) / (&kk + &s)
        };
        let mut value = lead;
        for j in k..n {
            value *= int(j as i64) + beta + int(1);
        }
        for j in k + 1..n {
            value /= int(j as i64) + &s;
        }
        value /= (&nn - &kk) * (&kk + &nn + &s);
        row.push(value);
    }
    row.push(harmonic_shifted(&(&nn + &s), n));
    row
}

/// The closed-form row `a_{n0}, …, a_{nn}` in exact arithmetic.
pub fn exact_coefficient_row(spec: &ExactSpec, n: usize) -> Vec<BigRational> {
    match (spec.family, spec.wrt) {
        (Family::Laguerre, _) => {
            let mut row: Vec<BigRational> = (0..n).map(|k| ratio(1, (n - k) as i64)).collect();
            row.push(int(0));
            row
        }
        (Family::Gegenbauer, _) => {
            let lam = &spec.lambda;
            let nn = int(n as i64);
            let mut row: Vec<BigRational> = (0..n)
                .map(|k| {
                    if (n - k) % 2 == 1 {
                        return int(0);
                    }
                    let kk = int(k as i64);
                    int(4) * (&kk + lam) / ((&nn - &kk) * (&kk + &nn + int(2) * lam))
                })
                .collect();
            row.push(harmonic_shifted(lam, n));
            row
        }
        (Family::Jacobi, Param::Beta) => jacobi_alpha_row(n, &spec.beta, &spec.alpha)
            .into_iter()
            .enumerate()
            .map(|(k, a)| if (k + n).is_multiple_of(2) { a } else { -a })
            .collect(),
        (Family::Jacobi, _) => jacobi_alpha_row(n, &spec.alpha, &spec.beta),
    }
}

/// Outcome of an exact expansion check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// The lowest power at which `Σ a_k P_k` and `∂P_n` differ.
    Fail {
        power: usize,
        expected: BigRational,
        found: BigRational,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// `Σ_k a_{nk} P_k` as an exact polynomial.
pub fn exact_expansion(spec: &ExactSpec, n: usize) -> MonomialPoly {
    let row = exact_coefficient_row(spec, n);
    let mut sum = MonomialPoly::zero(spec.center());
    for (k, a) in row.iter().enumerate() {
        if !a.is_zero() {
            sum.add_scaled(&exact_poly(spec, k), a);
        }
    }
    sum
}

/// Checks `Σ_k a_{nk} P_k = ∂P_n/∂(parameter)` coefficient by coefficient.
pub fn verify_expansion_exact(spec: &ExactSpec, n: usize) -> Verdict {
    compare(&exact_param_derivative(spec, n), &exact_expansion(spec, n))
}

fn compare(expected: &MonomialPoly, found: &MonomialPoly) -> Verdict {
    let len = expected.coeffs.len().max(found.coeffs.len());
    for power in 0..len {
        let (e, f) = (expected.coeff(power), found.coeff(power));
        if e != f {
            return Verdict::Fail {
                power,
                expected: e,
                found: f,
            };
        }
    }
    Verdict::Pass
}

/// Top coefficient of `∂P_n` equals `a_{nn} · k_n`.
pub fn verify_lemma_exact(spec: &ExactSpec, n: usize) -> bool {
    let row = exact_coefficient_row(spec, n);
    exact_param_derivative(spec, n).coeff(n) == &row[n] * exact_leading_coefficient(spec, n)
}

pub const LAGUERRE_GRID: [(i64, i64); 5] = [(-3, 4), (-1, 4), (0, 1), (1, 3), (2, 1)];
pub const GEGENBAUER_GRID: [(i64, i64); 5] = [(-1, 4), (1, 4), (1, 2), (1, 1), (7, 3)];
pub const JACOBI_GRID: [(i64, i64); 5] = [(-3, 4), (-1, 4), (0, 1), (1, 2), (3, 1)];

/// The rational verification grid: 5 Laguerre α, 5 Gegenbauer λ, and all
/// 25 Jacobi (α, β) pairs for each of the two derivative targets.
pub fn default_grid() -> Vec<ExactSpec> {
    let r = |(p, q): (i64, i64)| ratio(p, q);
    let mut out = Vec::new();
    for a in LAGUERRE_GRID {
        out.push(ExactSpec::laguerre(r(a)).expect("grid is in domain"));
    }
    for l in GEGENBAUER_GRID {
        out.push(ExactSpec::gegenbauer(r(l)).expect("grid is in domain"));
    }
    for wrt in [Param::Alpha, Param::Beta] {
        for a in JACOBI_GRID {
            for b in JACOBI_GRID {
                out.push(ExactSpec::jacobi(r(a), r(b), wrt).expect("grid is in domain"));
            }
        }
    }
    out
}
