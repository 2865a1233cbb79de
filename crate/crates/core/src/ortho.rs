//! The three classical families: evaluation, endpoint values, z-derivatives,
//! leading coefficients, differential operators and Christoffel–Darboux sums.
//!
//! Normalizations are the standard ones: `L_n^{(α)}(0) = (α+1)_n / n!`,
//! `C_n^{(λ)}(1) = (2λ)_n / n!`, `P_n^{(α,β)}(1) = (α+1)_n / n!`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special_fn::{gamma_ratio, pochhammer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Laguerre,
    Gegenbauer,
    Jacobi,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Laguerre, Family::Gegenbauer, Family::Jacobi];

    pub fn name(self) -> &'static str {
        match self {
            Family::Laguerre => "laguerre",
            Family::Gegenbauer => "gegenbauer",
            Family::Jacobi => "jacobi",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The parameter a derivative is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Alpha,
    Beta,
    Lambda,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Lambda => "lambda",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Zero,
    PlusOne,
    MinusOne,
}

impl Endpoint {
    pub fn value(self) -> f64 {
        match self {
            Endpoint::Zero => 0.0,
            Endpoint::PlusOne => 1.0,
            Endpoint::MinusOne => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Endpoint::Zero => "zero",
            Endpoint::PlusOne => "plus_one",
            Endpoint::MinusOne => "minus_one",
        }
    }
}

/// A polynomial family together with its parameters and the parameter
/// that derivatives target. Immutable once constructed; construction
/// enforces the classical orthogonality domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    family: Family,
    alpha: f64,
    beta: f64,
    lambda: f64,
    wrt: Param,
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}

impl FamilySpec {
    pub fn laguerre(alpha: f64) -> Result<Self> {
        finite("alpha", alpha)?;
        if alpha <= -1.0 {
            return Err(Error::Domain(format!(
                "laguerre requires alpha > -1, got {alpha}"
            )));
        }
        Ok(Self::laguerre_unchecked(alpha))
    }

    pub fn gegenbauer(lambda: f64) -> Result<Self> {
        finite("lambda", lambda)?;
        if lambda <= -0.5 || lambda == 0.0 {
            return Err(Error::Domain(format!(
                "gegenbauer requires lambda > -1/2 and lambda != 0, got {lambda}"
            )));
        }
        Ok(Self::gegenbauer_unchecked(lambda))
    }

    pub fn jacobi(alpha: f64, beta: f64, wrt: Param) -> Result<Self> {
        finite("alpha", alpha)?;
        finite("beta", beta)?;
        if alpha <= -1.0 {
            return Err(Error::Domain(format!(
                "jacobi requires alpha > -1, got {alpha}"
            )));
        }
        if beta <= -1.0 {
            return Err(Error::Domain(format!(
                "jacobi requires beta > -1, got {beta}"
            )));
        }
        if wrt == Param::Lambda {
            return Err(Error::Domain(
                "jacobi derivatives are taken wrt alpha or beta".into(),
            ));
        }
        Ok(Self::jacobi_unchecked(alpha, beta, wrt))
    }

    fn laguerre_unchecked(alpha: f64) -> Self {
        Self {
            family: Family::Laguerre,
            alpha,
            beta: 0.0,
            lambda: 0.0,
            wrt: Param::Alpha,
        }
    }

    fn gegenbauer_unchecked(lambda: f64) -> Self {
        Self {
            family: Family::Gegenbauer,
            alpha: 0.0,
            beta: 0.0,
            lambda,
            wrt: Param::Lambda,
        }
    }

    fn jacobi_unchecked(alpha: f64, beta: f64, wrt: Param) -> Self {
        Self {
            family: Family::Jacobi,
            alpha,
            beta,
            lambda: 0.0,
            wrt,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn wrt(&self) -> Param {
        self.wrt
    }

    /// Current value of the parameter named by `wrt`.
    pub fn param_value(&self) -> f64 {
        match self.wrt {
            Param::Alpha => self.alpha,
            Param::Beta => self.beta,
            Param::Lambda => self.lambda,
        }
    }

    /// Same family with the targeted parameter replaced by `value`.
    pub fn with_param(&self, value: f64) -> Result<Self> {
        match (self.family, self.wrt) {
            (Family::Laguerre, _) => Self::laguerre(value),
            (Family::Gegenbauer, _) => Self::gegenbauer(value),
            (Family::Jacobi, Param::Alpha) => Self::jacobi(value, self.beta, Param::Alpha),
            (Family::Jacobi, _) => Self::jacobi(self.alpha, value, Param::Beta),
        }
    }

    /// Jacobi with α and β exchanged; the targeted parameter follows the swap.
    pub fn swapped(&self) -> Self {
        let wrt = match self.wrt {
            Param::Alpha => Param::Beta,
            Param::Beta => Param::Alpha,
            Param::Lambda => Param::Lambda,
        };
        Self {
            alpha: self.beta,
            beta: self.alpha,
            wrt,
            ..*self
        }
    }

    /// Named parameters in a stable order.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match self.family {
            Family::Laguerre => vec![("alpha", self.alpha)],
            Family::Gegenbauer => vec![("lambda", self.lambda)],
            Family::Jacobi => vec![("alpha", self.alpha), ("beta", self.beta)],
        }
    }

    /// The family with every parameter raised by `shift` (λ for Gegenbauer,
    /// α and β for Jacobi), as produced by one z-differentiation.
    fn raised(&self, shift: f64) -> Self {
        match self.family {
            Family::Laguerre => Self::laguerre_unchecked(self.alpha + shift),
            Family::Gegenbauer => Self::gegenbauer_unchecked(self.lambda + shift),
            Family::Jacobi => {
                Self::jacobi_unchecked(self.alpha + shift, self.beta + shift, self.wrt)
            }
        }
    }

    /// α+β+1, the recurring Jacobi shift.
    fn jacobi_s(&self) -> f64 {
        self.alpha + self.beta + 1.0
    }
}

impl fmt::Display for FamilySpec {
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

/// `P_0(z), …, P_n(z)` by three-term recurrence.
pub fn eval_sequence(spec: &FamilySpec, n: usize, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    let (a, b, lam) = (spec.alpha, spec.beta, spec.lambda);
    let p1 = match spec.family {
        Family::Laguerre => a + 1.0 - z,
        Family::Gegenbauer => 2.0 * lam * z,
        Family::Jacobi => (a + 1.0) + (a + b + 2.0) * (z - 1.0) / 2.0,
    };
    out.push(p1);
    let s = spec.jacobi_s();
    for k in 1..n {
        let kf = k as f64;
        let (prev, cur) = (out[k - 1], out[k]);
        let next = match spec.family {
            Family::Laguerre => ((2.0 * kf + 1.0 + a - z) * cur - (kf + a) * prev) / (kf + 1.0),
            Family::Gegenbauer => {
                (2.0 * (kf + lam) * z * cur - (kf + 2.0 * lam - 1.0) * prev) / (kf + 1.0)
            }
            Family::Jacobi => {
                let c = 2.0 * kf + s;
                let a1 = 2.0 * (kf + 1.0) * (kf + s) * (c - 1.0);
                let a2 = c * (a * a - b * b);
                let a3 = (c - 1.0) * c * (c + 1.0);
                let a4 = 2.0 * (kf + a) * (kf + b) * (c + 1.0);
                ((a2 + a3 * z) * cur - a4 * prev) / a1
            }
        };
        out.push(next);
    }
    out
}

/// `P_n(z)` by recurrence.
pub fn eval(spec: &FamilySpec, n: usize, z: f64) -> f64 {
    eval_sequence(spec, n, z)[n]
}

/// Coefficients `c_k` of the explicit series `P_n = Σ c_k t^k`, where
/// `t = z` for Laguerre and `t = (z−1)/2` for the other two families.
fn series_coefficients(spec: &FamilySpec, n: usize) -> Vec<f64> {
    let (a, lam, s) = (spec.alpha, spec.lambda, spec.jacobi_s());
    let mut c = Vec::with_capacity(n + 1);
    let first = match spec.family {
        Family::Laguerre | Family::Jacobi => pochhammer(a + 1.0, n),
        Family::Gegenbauer => pochhammer(2.0 * lam, n),
    } / pochhammer(1.0, n);
    c.push(first);
    for k in 0..n {
        let (kf, nk) = (k as f64, (n - k) as f64);
        let ratio = match spec.family {
            Family::Laguerre => -nk / ((kf + 1.0) * (a + kf + 1.0)),
            Family::Gegenbauer => {
                (2.0 * lam + n as f64 + kf) * nk / ((lam + 0.5 + kf) * (kf + 1.0))
            }
            Family::Jacobi => (n as f64 + s + kf) * nk / ((a + kf + 1.0) * (kf + 1.0)),
        };
        c.push(c[k] * ratio);
    }
    c
}

fn series_variable(spec: &FamilySpec, z: f64) -> (f64, f64) {
    match spec.family {
        Family::Laguerre => (z, 1.0),
        _ => ((z - 1.0) / 2.0, 0.5),
    }
}

/// `P_n(z)` by summing the explicit series. Secondary engine for
/// cross-checks; loses accuracy to cancellation for large `n`.
pub fn eval_series(spec: &FamilySpec, n: usize, z: f64) -> f64 {
    let (t, _) = series_variable(spec, z);
    series_coefficients(spec, n)
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * t + c)
}

/// Term-wise differentiated explicit series.
fn series_z_derivative(spec: &FamilySpec, n: usize, z: f64) -> f64 {
    let (t, dt) = series_variable(spec, z);
    let c = series_coefficients(spec, n);
    let d = c
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &ck)| acc * t + k as f64 * ck);
    d * dt
}

/// Closed-form value of `P_k` at a special point.
pub fn special_value(spec: &FamilySpec, k: usize, endpoint: Endpoint) -> Result<f64> {
    let value = match (spec.family, endpoint) {
        (Family::Laguerre, Endpoint::Zero) => {
            gamma_ratio(k as f64 + spec.alpha + 1.0, spec.alpha + 1.0)?
        }
        (Family::Gegenbauer, Endpoint::PlusOne | Endpoint::MinusOne) => {
            let sign = if endpoint == Endpoint::MinusOne && k % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            sign * gamma_ratio(k as f64 + 2.0 * spec.lambda, 2.0 * spec.lambda)?
        }
        (Family::Jacobi, Endpoint::PlusOne) => {
            gamma_ratio(k as f64 + spec.alpha + 1.0, spec.alpha + 1.0)?
        }
        _ => {
            return Err(Error::InvalidEndpoint {
                family: spec.family.name(),
                endpoint: endpoint.name(),
            })
        }
    };
    Ok(value / pochhammer(1.0, k))
}

/// Points where the derivative relations divide by zero.
fn relation_singular_points(family: Family) -> &'static [f64] {
    match family {
        Family::Laguerre => &[0.0],
        _ => &[1.0, -1.0],
    }
}

/// Within this distance of a singular point the relation is abandoned for
/// the differentiated series.
const RELATION_BAND: f64 = 0.25;

/// `dP_n/dz`.
///
/// Uses the classical relations expressing the derivative through `P_n`
/// and `P_{n−1}`; near their singular points (z = 0 for Laguerre, z = ±1
/// otherwise) falls back to the term-wise differentiated series, expanded
/// around the nearest point so that the series stays short-range.
pub fn z_derivative(spec: &FamilySpec, n: usize, z: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if relation_singular_points(spec.family)
        .iter()
        .any(|&p| (z - p).abs() < RELATION_BAND)
    {
        return if spec.family != Family::Laguerre && z < 0.0 {
            // P_n(z) = (−1)^n P̃_n(−z) with the parameters exchanged.
            let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
            sign * series_z_derivative(&spec.swapped(), n, -z)
        } else {
            series_z_derivative(spec, n, z)
        };
    }
    let seq = eval_sequence(spec, n, z);
    let (pn, pm) = (seq[n], seq[n - 1]);
    let nf = n as f64;
    match spec.family {
        Family::Laguerre => (nf * pn - (nf + spec.alpha) * pm) / z,
        Family::Gegenbauer => (nf * z * pn - (nf + 2.0 * spec.lambda - 1.0) * pm) / (z * z - 1.0),
        Family::Jacobi => {
            let (a, b) = (spec.alpha, spec.beta);
            let c = 2.0 * nf + a + b;
            (nf * (b - a + c * z) * pn - 2.0 * (nf + a) * (nf + b) * pm) / (c * (z * z - 1.0))
        }
    }
}

/// `d²P_n/dz²` through the parameter-raised family of degree `n−2`.
pub fn z_second_derivative(spec: &FamilySpec, n: usize, z: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let factor = match spec.family {
        Family::Laguerre => 1.0,
        Family::Gegenbauer => 4.0 * spec.lambda * (spec.lambda + 1.0),
        Family::Jacobi => {
            let t = n as f64 + spec.jacobi_s();
            t * (t + 1.0) / 4.0
        }
    };
    factor * eval(&spec.raised(2.0), n - 2, z)
}

/// Coefficient `k_n` of `z^n` (Laguerre) or `(z−1)^n` (Gegenbauer, Jacobi).
pub fn leading_coefficient(spec: &FamilySpec, n: usize) -> Result<f64> {
    let value = (0..n).fold(1.0, |acc, j| {
        let jf = j as f64;
        acc * match spec.family {
            Family::Laguerre => -1.0 / (jf + 1.0),
            Family::Gegenbauer => 2.0 * (spec.lambda + jf) / (jf + 1.0),
            Family::Jacobi => (n as f64 + spec.jacobi_s() + jf) / (2.0 * (jf + 1.0)),
        }
    });
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow)
    }
}

/// A scalar function of z that may supply its own first and second
/// derivatives.
pub trait ScalarFn {
    fn value(&self, z: f64) -> f64;

    /// `(f'(z), f''(z))` when known analytically.
    fn derivatives(&self, _z: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Wraps a plain closure; derivatives come from central differences.
pub struct Sampled<F>(pub F);

impl<F: Fn(f64) -> f64> ScalarFn for Sampled<F> {
    fn value(&self, z: f64) -> f64 {
        (self.0)(z)
    }
}

/// `P_n` of a family with exact derivative channels.
#[derive(Debug, Clone, Copy)]
pub struct FamilyPolynomial {
    pub spec: FamilySpec,
    pub n: usize,
}

impl ScalarFn for FamilyPolynomial {
    fn value(&self, z: f64) -> f64 {
        eval(&self.spec, self.n, z)
    }

    fn derivatives(&self, z: f64) -> Option<(f64, f64)> {
        Some((
            z_derivative(&self.spec, self.n, z),
            z_second_derivative(&self.spec, self.n, z),
        ))
    }
}

/// Central-difference first and second derivatives with step
/// `ε^{1/3}·max(1, |z|)`.
pub fn central_derivatives(f: &dyn Fn(f64) -> f64, z: f64) -> (f64, f64) {
    let h = f64::EPSILON.cbrt() * z.abs().max(1.0);
    let (fp, f0, fm) = (f(z + h), f(z), f(z - h));
    ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
}

/// The family's second-order operator applied to values `(f, f', f'')`.
pub fn apply_operator(spec: &FamilySpec, n: usize, z: f64, f: f64, d1: f64, d2: f64) -> f64 {
    let nf = n as f64;
    match spec.family {
        Family::Laguerre => z * d2 + (spec.alpha + 1.0 - z) * d1 + nf * f,
        Family::Gegenbauer => {
            (1.0 - z * z) * d2 - (2.0 * spec.lambda + 1.0) * z * d1
                + nf * (nf + 2.0 * spec.lambda) * f
        }
        Family::Jacobi => {
            let (a, b) = (spec.alpha, spec.beta);
            (1.0 - z * z) * d2 + (b - a - (a + b + 2.0) * z) * d1 + nf * (nf + a + b + 1.0) * f
        }
    }
}

/// Residual of the family's differential operator applied to `f` at `z`.
pub fn ode_residual(spec: &FamilySpec, n: usize, f: &dyn ScalarFn, z: f64) -> f64 {
    let value = f.value(z);
    let (d1, d2) = f
        .derivatives(z)
        .unwrap_or_else(|| central_derivatives(&|x| f.value(x), z));
    apply_operator(spec, n, z, value, d1, d2)
}

fn check_endpoint(spec: &FamilySpec, endpoint: Endpoint) -> Result<()> {
    let ok = matches!(
        (spec.family, endpoint),
        (Family::Laguerre, Endpoint::Zero)
            | (Family::Gegenbauer, Endpoint::PlusOne | Endpoint::MinusOne)
            | (Family::Jacobi, Endpoint::PlusOne)
    );
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidEndpoint {
            family: spec.family.name(),
            endpoint: endpoint.name(),
        })
    }
}

/// Christoffel–Darboux identity collapsed at a special point `z′`, closed
/// form: the two-term ratio in `P_n(z)`, `P_{n−1}(z)` over `z − z′`.
///
/// The matching left-hand sum is [`cd_endpoint_brute`].
pub fn cd_endpoint_sum(spec: &FamilySpec, n: usize, z: f64, endpoint: Endpoint) -> Result<f64> {
    check_endpoint(spec, endpoint)?;
    let zp = endpoint.value();
    if z == zp {
        return Err(Error::Degenerate(format!("z equals the endpoint {zp}")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let seq = eval_sequence(spec, n, z);
    let (pn, pm) = (seq[n], seq[n - 1]);
    let nf = n as f64;
    Ok(match (spec.family, endpoint) {
        (Family::Laguerre, _) => -(nf * pn - (nf + spec.alpha) * pm) / z,
        (Family::Gegenbauer, Endpoint::PlusOne) => {
            0.5 * (nf * pn - (nf + 2.0 * spec.lambda - 1.0) * pm) / (z - 1.0)
        }
        (Family::Gegenbauer, _) => {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * 0.5 * (-nf * pn - (nf + 2.0 * spec.lambda - 1.0) * pm) / (z + 1.0)
        }
        (Family::Jacobi, _) => {
            let (a, b, s) = (spec.alpha, spec.beta, spec.jacobi_s());
            let prefactor = 2.0 * gamma_ratio(nf + s, nf + b)? / (2.0 * nf + s - 1.0);
            prefactor * (nf * pn - (nf + a) * pm) / (z - 1.0)
        }
    })
}

/// Left-hand side of the collapsed Christoffel–Darboux identity, summed
/// term by term: `Σ L_k`, `Σ (±1)^k (k+λ) C_k`, or
/// `Σ (2k+α+β+1) Γ(k+α+β+1)/Γ(k+β+1) P_k`.
pub fn cd_endpoint_brute(spec: &FamilySpec, n: usize, z: f64, endpoint: Endpoint) -> Result<f64> {
    check_endpoint(spec, endpoint)?;
    if n == 0 {
        return Ok(0.0);
    }
    let seq = eval_sequence(spec, n - 1, z);
    let mut sum = 0.0;
    for (k, &pk) in seq.iter().enumerate() {
        let kf = k as f64;
        let weight = match (spec.family, endpoint) {
            (Family::Laguerre, _) => 1.0,
            (Family::Gegenbauer, Endpoint::MinusOne) if k % 2 == 1 => -(kf + spec.lambda),
            (Family::Gegenbauer, _) => kf + spec.lambda,
            (Family::Jacobi, _) => {
                // (2k+s)Γ(k+s) = Γ(k+s+1)·(2k+s)/(k+s); at k = 0 the ratio is 1.
                let s = spec.jacobi_s();
                let r = if k == 0 {
                    1.0
                } else {
                    (2.0 * kf + s) / (kf + s)
                };
                r * gamma_ratio(kf + s + 1.0, kf + spec.beta + 1.0)?
            }
        };
        sum += weight * pk;
    }
    Ok(sum)
}

/// Christoffel–Darboux kernel weights `h_k`, scaled so that every factor
/// is a rising product: `k!/(α+1)_k`, `k!(k+λ)/(2λ)_k`, and for Jacobi
/// `(2k+s) k! (s+1)_{k−1} / ((α+1)_k (β+1)_k)` with `w_0 = 1`, `s = α+β+1`.
fn cd_weight(spec: &FamilySpec, k: usize) -> f64 {
    let kf = k as f64;
    let fact = pochhammer(1.0, k);
    match spec.family {
        Family::Laguerre => fact / pochhammer(spec.alpha + 1.0, k),
        Family::Gegenbauer => fact * (kf + spec.lambda) / pochhammer(2.0 * spec.lambda, k),
        Family::Jacobi => {
            if k == 0 {
                return 1.0;
            }
            let s = spec.jacobi_s();
            (2.0 * kf + s) * fact * pochhammer(s + 1.0, k - 1)
                / (pochhammer(spec.alpha + 1.0, k) * pochhammer(spec.beta + 1.0, k))
        }
    }
}

/// `Σ_{k<n} h_k P_k(z) P_k(z′)` with the weights of [`cd_weight`].
pub fn cd_kernel_sum(spec: &FamilySpec, n: usize, z: f64, zp: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (u, v) = (
        eval_sequence(spec, n - 1, z),
        eval_sequence(spec, n - 1, zp),
    );
    (0..n).map(|k| cd_weight(spec, k) * u[k] * v[k]).sum()
}

/// `Σ_{k<n} |h_k P_k(z) P_k(z′)|`, the cancellation-free scale of the kernel.
pub fn cd_kernel_magnitude(spec: &FamilySpec, n: usize, z: f64, zp: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (u, v) = (
        eval_sequence(spec, n - 1, z),
        eval_sequence(spec, n - 1, zp),
    );
    (0..n)
        .map(|k| (cd_weight(spec, k) * u[k] * v[k]).abs())
        .sum()
}

/// Closed Christoffel–Darboux form matching [`cd_kernel_sum`]:
/// `c_n (P_n(z)P_{n−1}(z′) − P_{n−1}(z)P_n(z′)) / (z − z′)`.
pub fn cd_kernel_closed(spec: &FamilySpec, n: usize, z: f64, zp: f64) -> Result<f64> {
    if z == zp {
        return Err(Error::Degenerate("z equals z'".into()));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let fact = pochhammer(1.0, n);
    let c = match spec.family {
        Family::Laguerre => -fact / pochhammer(spec.alpha + 1.0, n - 1),
        Family::Gegenbauer => fact / (2.0 * pochhammer(2.0 * spec.lambda, n - 1)),
        Family::Jacobi => {
            let s = spec.jacobi_s();
            2.0 * fact * pochhammer(s + 1.0, n - 1)
                / ((2.0 * nf + s - 1.0)
                    * pochhammer(spec.alpha + 1.0, n - 1)
                    * pochhammer(spec.beta + 1.0, n - 1))
        }
    };
    let (u, v) = (eval_sequence(spec, n, z), eval_sequence(spec, n, zp));
    Ok(c * (u[n] * v[n - 1] - u[n - 1] * v[n]) / (z - zp))
}

/// `C_n^{(λ)}(z)` through `P_n^{(λ−½, λ−½)}(z)` and the prefactor
/// `(2λ)_n / (λ+½)_n`.
pub fn gegenbauer_from_jacobi(lambda: f64, n: usize, z: f64) -> Result<f64> {
    FamilySpec::gegenbauer(lambda)?;
    let jacobi = FamilySpec::jacobi(lambda - 0.5, lambda - 0.5, Param::Alpha)?;
    let prefactor = gamma_ratio(n as f64 + 2.0 * lambda, 2.0 * lambda)?
        / gamma_ratio(n as f64 + lambda + 0.5, lambda + 0.5)?;
    Ok(prefactor * eval(&jacobi, n, z))
}

/// `P_n^{(α,β)}(1 − 2z/β)`, which tends to `L_n^{(α)}(z)` as β → ∞.
pub fn laguerre_limit_probe(alpha: f64, n: usize, z: f64, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::Domain(format!(
            "limit probe needs beta > 0, got {beta}"
        )));
    }
    let spec = FamilySpec::jacobi(alpha, beta, Param::Beta)?;
    Ok(eval(&spec, n, 1.0 - 2.0 * z / beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    fn specs() -> Vec<FamilySpec> {
        let mut out = Vec::new();
        for a in [-0.75, -0.2, 0.0, 0.5, 2.5] {
            out.push(FamilySpec::laguerre(a).unwrap());
        }
        for l in [-0.3, 0.25, 0.5, 1.0, 3.2] {
            out.push(FamilySpec::gegenbauer(l).unwrap());
        }
        for a in [-0.75, 0.0, 1.5] {
            for b in [-0.25, 0.5, 3.0] {
                out.push(FamilySpec::jacobi(a, b, Param::Alpha).unwrap());
            }
        }
        out
    }

    /// Direct series oracle with every coefficient built from its own
    /// factorial products, independent of the ratio recurrence above.
    fn series_oracle(spec: &FamilySpec, n: usize, z: f64) -> f64 {
        if spec.family() != Family::Laguerre && z < 0.0 {
            // keep |(z-1)/2| <= 1/2 via P_n(z) = (-1)^n P_n^{swapped}(-z)
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            return sign * series_oracle(&spec.swapped(), n, -z);
        }
        let fact = |m: usize| pochhammer(1.0, m);
        let (a, lam, s) = (
            spec.alpha(),
            spec.lambda(),
            spec.alpha() + spec.beta() + 1.0,
        );
        (0..=n)
            .map(|k| match spec.family() {
                Family::Laguerre => {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign / fact(k) * pochhammer(a + k as f64 + 1.0, n - k) / fact(n - k)
                        * z.powi(k as i32)
                }
                Family::Gegenbauer => {
                    pochhammer(2.0 * lam, n + k)
                        / (pochhammer(lam + 0.5, k) * fact(k) * fact(n - k))
                        * ((z - 1.0) / 2.0).powi(k as i32)
                }
                Family::Jacobi => {
                    pochhammer(a + k as f64 + 1.0, n - k) * pochhammer(n as f64 + s, k)
                        / (fact(k) * fact(n - k))
                        * ((z - 1.0) / 2.0).powi(k as i32)
                }
            })
            .sum()
    }

    fn series_oracle_magnitude(spec: &FamilySpec, n: usize, z: f64) -> f64 {
        if spec.family() != Family::Laguerre && z < 0.0 {
            return series_oracle_magnitude(&spec.swapped(), n, -z);
        }
        let (t, _) = series_variable(spec, z);
        series_coefficients(spec, n)
            .iter()
            .enumerate()
            .map(|(k, c)| (c * t.powi(k as i32)).abs())
            .sum()
    }

    #[test]
    fn domain_checks() {
        assert!(FamilySpec::laguerre(-1.0).is_err());
        assert!(FamilySpec::gegenbauer(0.0).is_err());
        assert!(FamilySpec::gegenbauer(-0.5).is_err());
        assert!(FamilySpec::jacobi(0.0, -1.5, Param::Alpha).is_err());
        assert!(FamilySpec::jacobi(0.0, 0.0, Param::Lambda).is_err());
        assert!(FamilySpec::laguerre(f64::NAN).is_err());
        let msg = FamilySpec::gegenbauer(-0.7).unwrap_err().to_string();
        assert!(msg.contains("lambda > -1/2"), "{msg}");
    }

    #[test]
    fn sequence_examples() {
        let lag = FamilySpec::laguerre(0.3).unwrap();
        assert_eq!(eval_sequence(&lag, 0, 4.2), vec![1.0]);
        let lag = FamilySpec::laguerre(0.7).unwrap();
        assert!((eval(&lag, 1, 0.0) - 1.7).abs() < 1e-15);
        let geg = FamilySpec::gegenbauer(1.0).unwrap();
        assert!(eval(&geg, 2, 0.5).abs() < 1e-15);
    }

    #[test]
    fn recurrence_matches_series() {
        for spec in specs() {
            for n in 0..=15 {
                for i in 0..=20 {
                    let z = if spec.family() == Family::Laguerre {
                        i as f64 * 0.5
                    } else {
                        -1.0 + i as f64 * 0.1
                    };
                    let r = eval(&spec, n, z);
                    let o = series_oracle(&spec, n, z);
                    // the float series carries its own rounding error, bounded
                    // by the sum of term magnitudes; tests/exact_oracle.rs
                    // checks the recurrence against exact rationals instead
                    let slack = 64.0 * f64::EPSILON * series_oracle_magnitude(&spec, n, z);
                    assert!(
                        (r - o).abs() <= 1e-9 * (1.0 + o.abs()) + slack,
                        "{spec} n={n} z={z}: {r} vs {o}"
                    );
                    if z >= 0.0 {
                        let e = eval_series(&spec, n, z);
                        assert!(
                            (e - o).abs() <= 1e-9 * (1.0 + o.abs()) + 2.0 * slack,
                            "{spec} n={n} z={z}: {e} vs {o}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn special_value_examples() {
        let lag = FamilySpec::laguerre(0.5).unwrap();
        assert!((special_value(&lag, 2, Endpoint::Zero).unwrap() - 1.875).abs() < 1e-15);
        let geg = FamilySpec::gegenbauer(0.8).unwrap();
        assert_eq!(special_value(&geg, 0, Endpoint::PlusOne).unwrap(), 1.0);
        let jac = FamilySpec::jacobi(1.0, 0.37, Param::Alpha).unwrap();
        assert_eq!(special_value(&jac, 2, Endpoint::PlusOne).unwrap(), 3.0);
        assert!(matches!(
            special_value(&jac, 2, Endpoint::Zero),
            Err(Error::InvalidEndpoint { .. })
        ));
        assert!(matches!(
            special_value(&lag, 2, Endpoint::PlusOne),
            Err(Error::InvalidEndpoint { .. })
        ));
    }

    #[test]
    fn special_value_matches_evaluation() {
        for spec in specs() {
            let points: &[Endpoint] = match spec.family() {
                Family::Laguerre => &[Endpoint::Zero],
                Family::Gegenbauer => &[Endpoint::PlusOne, Endpoint::MinusOne],
                Family::Jacobi => &[Endpoint::PlusOne],
            };
            for &e in points {
                for k in 0..=20 {
                    let closed = special_value(&spec, k, e).unwrap();
                    let value = eval(&spec, k, e.value());
                    assert!(
                        (closed - value).abs() <= 1e-11 * closed.abs().max(1e-300) + 1e-300,
                        "{spec} k={k} {e:?}: {closed} vs {value}"
                    );
                }
            }
        }
    }

    #[test]
    fn z_derivative_examples() {
        let lag = FamilySpec::laguerre(0.4).unwrap();
        for z in [-1.0, 0.0, 0.1, 3.0] {
            assert!((z_derivative(&lag, 1, z) + 1.0).abs() < 1e-14);
        }
        let geg = FamilySpec::gegenbauer(0.6).unwrap();
        for z in [-1.0, -0.5, 0.3, 1.0] {
            assert!((z_derivative(&geg, 1, z) - 1.2).abs() < 1e-14);
        }
        for spec in specs() {
            assert_eq!(z_derivative(&spec, 0, 0.3), 0.0);
        }
    }

    #[test]
    fn z_derivative_matches_raised_family_and_differences() {
        for spec in specs() {
            for n in 1..=15 {
                for i in 0..=16 {
                    let z = if spec.family() == Family::Laguerre {
                        i as f64 * 0.4
                    } else {
                        -1.0 + i as f64 * 0.125
                    };
                    let d = z_derivative(&spec, n, z);
                    let factor = match spec.family() {
                        Family::Laguerre => -1.0,
                        Family::Gegenbauer => 2.0 * spec.lambda(),
                        Family::Jacobi => (n as f64 + spec.jacobi_s()) / 2.0,
                    };
                    let raised = factor * eval(&spec.raised(1.0), n - 1, z);
                    assert!(
                        close(d, raised, 1e-10),
                        "{spec} n={n} z={z}: {d} vs {raised}"
                    );
                    // five-point stencil
                    let h = 1e-4;
                    let f = |x: f64| eval(&spec, n, x);
                    let fd = (8.0 * (f(z + h) - f(z - h)) - (f(z + 2.0 * h) - f(z - 2.0 * h)))
                        / (12.0 * h);
                    assert!(
                        (d - fd).abs() <= 1e-7 * (1.0 + d.abs()),
                        "{spec} n={n} z={z}: {d} vs {fd}"
                    );
                }
            }
        }
    }

    #[test]
    fn leading_coefficient_examples() {
        let lag = FamilySpec::laguerre(3.3).unwrap();
        assert!((leading_coefficient(&lag, 3).unwrap() + 1.0 / 6.0).abs() < 1e-16);
        let geg = FamilySpec::gegenbauer(1.0).unwrap();
        assert_eq!(leading_coefficient(&geg, 2).unwrap(), 4.0);
        let jac = FamilySpec::jacobi(0.0, 0.0, Param::Alpha).unwrap();
        assert_eq!(leading_coefficient(&jac, 1).unwrap(), 1.0);
        let big = FamilySpec::gegenbauer(1e3).unwrap();
        assert_eq!(leading_coefficient(&big, 400), Err(Error::Overflow));
    }

    #[test]
    fn leading_coefficient_matches_series_top_term() {
        for spec in specs() {
            for n in 0..=15 {
                let c = series_coefficients(&spec, n);
                let top = match spec.family() {
                    Family::Laguerre => c[n],
                    _ => c[n] / 2f64.powi(n as i32),
                };
                let k = leading_coefficient(&spec, n).unwrap();
                assert!(close(k, top, 1e-12), "{spec} n={n}");
            }
        }
    }

    #[test]
    fn ode_examples() {
        let lag = FamilySpec::laguerre(0.5).unwrap();
        let p = FamilyPolynomial { spec: lag, n: 3 };
        assert!(ode_residual(&lag, 3, &p, 0.7).abs() < 1e-8);
        let geg = FamilySpec::gegenbauer(0.8).unwrap();
        let p = FamilyPolynomial { spec: geg, n: 4 };
        assert!(ode_residual(&geg, 4, &p, -0.3).abs() < 1e-8);
        let one = Sampled(|_z: f64| 1.0);
        for spec in specs() {
            assert_eq!(ode_residual(&spec, 0, &one, 0.4), 0.0);
        }
    }

    #[test]
    fn ode_annihilates_family_polynomials() {
        for spec in specs() {
            for n in 0..=15 {
                for i in 1..10 {
                    let z = if spec.family() == Family::Laguerre {
                        i as f64 * 0.7
                    } else {
                        -1.0 + i as f64 * 0.2
                    };
                    let p = FamilyPolynomial { spec, n };
                    let (d1, d2) = p.derivatives(z).unwrap();
                    let v = p.value(z);
                    let scale = d2.abs() * (1.0 + z * z)
                        + d1.abs()
                            * (3.0 + z.abs())
                            * (1.0 + spec.alpha().abs() + spec.beta().abs() + spec.lambda().abs())
                        + (n * (n + 6)) as f64 * v.abs()
                        + 1.0;
                    let r = ode_residual(&spec, n, &p, z);
                    assert!(r.abs() <= 1e-7 * scale, "{spec} n={n} z={z}: {r}");
                }
            }
        }
    }

    #[test]
    fn ode_with_difference_derivatives() {
        let geg = FamilySpec::gegenbauer(0.8).unwrap();
        let f = Sampled(|z: f64| eval(&geg, 4, z));
        assert!(ode_residual(&geg, 4, &f, -0.3).abs() < 1e-4);
    }

    #[test]
    fn cd_endpoint_examples() {
        let lag = FamilySpec::laguerre(0.9).unwrap();
        assert!((cd_endpoint_sum(&lag, 1, 2.3, Endpoint::Zero).unwrap() - 1.0).abs() < 1e-14);
        let geg = FamilySpec::gegenbauer(0.7).unwrap();
        assert!((cd_endpoint_sum(&geg, 1, 0.2, Endpoint::PlusOne).unwrap() - 0.7).abs() < 1e-14);
        assert!((cd_endpoint_sum(&geg, 1, 0.2, Endpoint::MinusOne).unwrap() - 0.7).abs() < 1e-14);
        let jac = FamilySpec::jacobi(0.5, 1.25, Param::Alpha).unwrap();
        let brute = cd_endpoint_brute(&jac, 1, 0.1, Endpoint::PlusOne).unwrap();
        // (α+β+1)Γ(α+β+1)/Γ(β+1) = Γ(α+β+2)/Γ(β+1)
        let expect = gamma_ratio(3.75, 2.25).unwrap();
        assert!((brute - expect).abs() < 1e-14);
        assert!((cd_endpoint_sum(&jac, 1, 0.1, Endpoint::PlusOne).unwrap() - expect).abs() < 1e-13);
        assert!(matches!(
            cd_endpoint_sum(&lag, 3, 0.0, Endpoint::Zero),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            cd_endpoint_sum(&jac, 3, 0.0, Endpoint::MinusOne),
            Err(Error::InvalidEndpoint { .. })
        ));
    }

    #[test]
    fn cd_endpoint_collapse_matches_brute_force() {
        for spec in specs() {
            let points: &[Endpoint] = match spec.family() {
                Family::Laguerre => &[Endpoint::Zero],
                Family::Gegenbauer => &[Endpoint::PlusOne, Endpoint::MinusOne],
                Family::Jacobi => &[Endpoint::PlusOne],
            };
            for &e in points {
                for n in 0..=15 {
                    for z in [-0.83, -0.4, 0.15, 0.66, 2.5] {
                        let closed = cd_endpoint_sum(&spec, n, z, e).unwrap();
                        let brute = cd_endpoint_brute(&spec, n, z, e).unwrap();
                        assert!(
                            close(closed, brute, 1e-10),
                            "{spec} {e:?} n={n} z={z}: {closed} vs {brute}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn laguerre_derivative_is_negative_partial_sum() {
        for a in [-0.5, 0.0, 1.3] {
            let spec = FamilySpec::laguerre(a).unwrap();
            for n in 1..=15 {
                for z in [0.1, 0.9, 2.0, 7.5] {
                    let seq = eval_sequence(&spec, n, z);
                    let sum: f64 = seq[..n].iter().sum();
                    let d = z_derivative(&spec, n, z);
                    assert!(close(d, -sum, 1e-10), "a={a} n={n} z={z}");
                }
            }
        }
    }

    #[test]
    fn gegenbauer_through_jacobi() {
        for z in [-0.7, 0.0, 0.45] {
            assert!((gegenbauer_from_jacobi(1.0, 1, z).unwrap() - 2.0 * z).abs() < 1e-15);
            assert_eq!(gegenbauer_from_jacobi(0.3, 0, z).unwrap(), 1.0);
        }
        let direct = eval(&FamilySpec::gegenbauer(0.75).unwrap(), 5, 0.2);
        let via = gegenbauer_from_jacobi(0.75, 5, 0.2).unwrap();
        assert!((direct - via).abs() <= 1e-12 * direct.abs());
        assert!(gegenbauer_from_jacobi(0.0, 2, 0.1).is_err());
    }

    #[test]
    fn limit_probe_examples() {
        for beta in [10.0, 1e3, 1e6] {
            assert_eq!(laguerre_limit_probe(0.2, 0, 1.7, beta).unwrap(), 1.0);
        }
        // exact discrepancy is -2/β
        assert!(laguerre_limit_probe(0.0, 1, 1.0, 1e3).unwrap().abs() <= 2e-3 * (1.0 + 1e-12));
        let target = eval(&FamilySpec::laguerre(0.5).unwrap(), 3, 2.0);
        let e3 = (laguerre_limit_probe(0.5, 3, 2.0, 1e3).unwrap() - target).abs();
        let e4 = (laguerre_limit_probe(0.5, 3, 2.0, 1e4).unwrap() - target).abs();
        assert!(e3 / e4 > 8.0 && e3 / e4 < 12.0, "{e3} {e4}");
        assert!(laguerre_limit_probe(0.5, 3, 2.0, -4.0).is_err());
    }

    proptest! {
        #[test]
        fn jacobi_reflection(a in -0.95f64..4.0, b in -0.95f64..4.0, n in 0usize..20, z in -1.0f64..1.0) {
            let spec = FamilySpec::jacobi(a, b, Param::Alpha).unwrap();
            let lhs = eval(&spec, n, z);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = sign * eval(&spec.swapped(), n, -z);
            let scale = (0..=n).map(|k| eval(&spec, k, 1.0).abs().max(eval(&spec.swapped(), k, 1.0).abs())).fold(1.0, f64::max);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1e-3 * scale));
        }

        #[test]
        fn cd_kernel_identity(lam in -0.45f64..3.0, n in 1usize..=15, z in -1.0f64..1.0, zp in -1.0f64..1.0) {
            prop_assume!((z - zp).abs() > 1e-3 && lam.abs() > 1e-2);
            let spec = FamilySpec::gegenbauer(lam).unwrap();
            let lhs = cd_kernel_sum(&spec, n, z, zp);
            let rhs = cd_kernel_closed(&spec, n, z, zp).unwrap();
            let scale: f64 = (0..n).map(|k| (cd_weight(&spec, k) * eval(&spec, k, z) * eval(&spec, k, zp)).abs()).sum();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * scale.max(1e-300), "{lhs} {rhs}");
        }
    }
}
