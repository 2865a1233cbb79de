//! Closed-form coefficient rows `a_{nk}` of the parameter-derivative
//! expansion `∂P_n/∂λ = Σ_k a_{nk} P_k`, and evaluation of the derivative
//! through them.
//!
//! Diagonal entries are digamma differences, always taken as finite sums
//! of shifted reciprocals. Off-diagonal Jacobi entries contain two gamma
//! ratios with the same integer shift `n−k`; they are multiplied together
//! one factor pair at a time so intermediate values stay near unity.
//!
//! Rows are accumulated in double-double and rounded once, so each entry
//! is within one unit in the last place of the exact value at the given
//! (binary) parameters.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::ortho::{self, eval_sequence, Family, FamilyPolynomial, FamilySpec, Param, ScalarFn};

/// Row `a_{n0}, …, a_{nn}` for a fixed degree.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub family: Family,
    pub wrt: Param,
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl CoefficientVector {
    pub fn diagonal(&self) -> f64 {
        self.coeffs[self.n]
    }

    /// `Σ_k a_{nk} values[k]`.
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().zip(values).map(|(a, v)| a * v).sum()
    }
}

fn check_degree_len(n: usize) -> Result<()> {
    if n > u32::MAX as usize {
        return Err(Error::Domain(format!("degree {n} is too large")));
    }
    Ok(())
}

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

/// `Σ_{j<m} 1/(a+j)` in double-double; `a` itself may be double-double.
fn shifted_harmonic(a: Dd, m: usize) -> Result<Dd> {
    let mut sum = dd(0.0);
    for j in 0..m {
        let t = a + j as f64;
        if t.is_zero() {
            return Err(Error::Pole(t.to_f64()));
        }
        sum = sum + dd(1.0) / t;
    }
    Ok(sum)
}

/// `a_{nk} = 1/(n−k)` for `k < n`, `a_{nn} = 0`; independent of α.
pub fn laguerre_coeffs(n: usize) -> CoefficientVector {
    let mut coeffs: Vec<f64> = (0..n).map(|k| 1.0 / (n - k) as f64).collect();
    coeffs.push(0.0);
    CoefficientVector {
        family: Family::Laguerre,
        wrt: Param::Alpha,
        n,
        coeffs,
    }
}

pub fn gegenbauer_coeffs(n: usize, lambda: f64) -> Result<CoefficientVector> {
    FamilySpec::gegenbauer(lambda)?;
    check_degree_len(n)?;
    let nf = n as f64;
    let two_lambda = dd(lambda) * 2.0;
    let mut coeffs: Vec<f64> = (0..n)
        .map(|k| {
            if (n - k) % 2 == 1 {
                return 0.0;
            }
            let kf = k as f64;
            let num = (dd(lambda) + kf) * 4.0;
            let den = (two_lambda + (kf + nf)) * (nf - kf);
            (num / den).to_f64()
        })
        .collect();
    coeffs.push(shifted_harmonic(dd(lambda), n)?.to_f64());
    Ok(CoefficientVector {
        family: Family::Gegenbauer,
        wrt: Param::Lambda,
        n,
        coeffs,
    })
}

/// Same row as [`gegenbauer_coeffs`], built from the half-range sum over
/// `j = 1..=⌊n/2⌋` with terms `(n−2j+λ) / (j(n−j+λ))` landing at `k = n−2j`.
pub fn gegenbauer_coeffs_even_form(n: usize, lambda: f64) -> Result<CoefficientVector> {
    FamilySpec::gegenbauer(lambda)?;
    check_degree_len(n)?;
    let nf = n as f64;
    let mut coeffs = vec![0.0; n + 1];
    for j in 1..=n / 2 {
        let jf = j as f64;
        let num = dd(lambda) + (nf - 2.0 * jf);
        let den = (dd(lambda) + (nf - jf)) * jf;
        coeffs[n - 2 * j] = (num / den).to_f64();
    }
    coeffs[n] = shifted_harmonic(dd(lambda), n)?.to_f64();
    Ok(CoefficientVector {
        family: Family::Gegenbauer,
        wrt: Param::Lambda,
        n,
        coeffs,
    })
}

/// `α + β + 1` without rounding the sum.
fn jacobi_s(alpha: f64, beta: f64) -> Dd {
    Dd::sum(alpha, beta) + 1.0
}

/// Weights `c_k` (k < n) of
/// `(z+1) dP_n/dz − n P_n = Σ_k c_k P_k`, namely
/// `c_k = (2k+s) Γ(n+β+1)Γ(k+s) / (Γ(k+β+1)Γ(n+s))` with `s = α+β+1`.
///
/// At `k = 0` the factor `(2k+s)/(k+s)` is 1 even when `s = 0`.
fn jacobi_rhs_weights_dd(n: usize, alpha: f64, beta: f64) -> Vec<Dd> {
    let s = jacobi_s(alpha, beta);
    let mut weights = vec![dd(0.0); n];
    // tail[k] = Π_{j=k+1}^{n-1} (j+β+1)/(j+s)
    let mut tail = dd(1.0);
    for k in (0..n).rev() {
        let kf = k as f64;
        let b = Dd::sum(beta, kf + 1.0);
        let lead = if k == 0 {
            dd(1.0)
        } else {
            (s + 2.0 * kf) / (s + kf)
        };
        weights[k] = lead * b * tail;
        tail = tail * (b / (s + kf));
    }
    weights
}

fn jacobi_rhs_weights(n: usize, alpha: f64, beta: f64) -> Vec<f64> {
    jacobi_rhs_weights_dd(n, alpha, beta)
        .into_iter()
        .map(|w| w.to_f64())
        .collect()
}

/// Row for `∂P_n^{(α,β)}/∂α`.
pub fn jacobi_alpha_coeffs(n: usize, alpha: f64, beta: f64) -> Result<CoefficientVector> {
    FamilySpec::jacobi(alpha, beta, Param::Alpha)?;
    check_degree_len(n)?;
    let nf = n as f64;
    let s = jacobi_s(alpha, beta);
    let mut coeffs: Vec<f64> = jacobi_rhs_weights_dd(n, alpha, beta)
        .into_iter()
        .enumerate()
        .map(|(k, c)| (c / ((s + (k as f64 + nf)) * (nf - k as f64))).to_f64())
        .collect();
    coeffs.push(shifted_harmonic(s + nf, n)?.to_f64());
    Ok(CoefficientVector {
        family: Family::Jacobi,
        wrt: Param::Alpha,
        n,
        coeffs,
    })
}

/// Row for `∂P_n^{(α,β)}/∂β`: the α-row with α and β exchanged, signed by
/// `(−1)^{k+n}`.
pub fn jacobi_beta_coeffs(n: usize, alpha: f64, beta: f64) -> Result<CoefficientVector> {
    let swapped = jacobi_alpha_coeffs(n, beta, alpha)?;
    let coeffs = swapped
        .coeffs
        .into_iter()
        .enumerate()
        .map(|(k, a)| if (k + n).is_multiple_of(2) { a } else { -a })
        .collect();
    Ok(CoefficientVector {
        family: Family::Jacobi,
        wrt: Param::Beta,
        n,
        coeffs,
    })
}

/// The coefficient row matching `spec` and its targeted parameter.
pub fn coefficients(spec: &FamilySpec, n: usize) -> Result<CoefficientVector> {
    match (spec.family(), spec.wrt()) {
        (Family::Laguerre, _) => Ok(laguerre_coeffs(n)),
        (Family::Gegenbauer, _) => gegenbauer_coeffs(n, spec.lambda()),
        (Family::Jacobi, Param::Beta) => jacobi_beta_coeffs(n, spec.alpha(), spec.beta()),
        (Family::Jacobi, _) => jacobi_alpha_coeffs(n, spec.alpha(), spec.beta()),
    }
}

/// `∂P_n/∂(parameter)` at `z`, assembled from the coefficient row.
pub fn param_derivative_eval(spec: &FamilySpec, n: usize, z: f64) -> Result<f64> {
    let row = coefficients(spec, n)?;
    Ok(row.dot(&eval_sequence(spec, n, z)))
}

/// `a_{nn}` as the parameter log-derivative of the leading coefficient
/// `k_n`: each linear factor `(c + p)` of `k_n` contributes `1/(c + p)`.
pub fn diagonal_via_lemma(spec: &FamilySpec, n: usize) -> Result<f64> {
    let nf = n as f64;
    // k_n factors: Laguerre (−1)/(j+1); Gegenbauer 2(λ+j)/(j+1);
    // Jacobi (n+s+j)/(2(j+1)). Only λ- or (α,β)-dependent factors count.
    let base = match spec.family() {
        Family::Laguerre => return Ok(0.0),
        Family::Gegenbauer => spec.lambda(),
        Family::Jacobi => nf + (spec.alpha() + spec.beta() + 1.0),
    };
    let mut sum = 0.0;
    for j in 0..n {
        let factor = base + j as f64;
        if factor == 0.0 {
            return Err(Error::Pole(factor));
        }
        sum += 1.0 / factor;
    }
    Ok(sum)
}

/// The differentiated equation's inhomogeneity expanded over `P_k`, k < n:
/// `Σ L_k` (Laguerre), `4 Σ_{k≡n (2)} (k+λ) C_k` (Gegenbauer), or the
/// Jacobi weights of `(z±1)dP_n/dz − nP_n`.
pub fn rhs_expansion(spec: &FamilySpec, n: usize, z: f64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let values = eval_sequence(spec, n - 1, z);
    let weights: Vec<f64> = match (spec.family(), spec.wrt()) {
        (Family::Laguerre, _) => vec![1.0; n],
        (Family::Gegenbauer, _) => (0..n)
            .map(|k| {
                if (n - k).is_multiple_of(2) {
                    4.0 * (k as f64 + spec.lambda())
                } else {
                    0.0
                }
            })
            .collect(),
        (Family::Jacobi, Param::Beta) => jacobi_rhs_weights(n, spec.beta(), spec.alpha())
            .into_iter()
            .enumerate()
            .map(|(k, c)| if (k + n).is_multiple_of(2) { c } else { -c })
            .collect(),
        (Family::Jacobi, _) => jacobi_rhs_weights(n, spec.alpha(), spec.beta()),
    };
    Ok(weights.iter().zip(&values).map(|(w, v)| w * v).sum())
}

/// The same inhomogeneity computed directly from `P_n` and `dP_n/dz`:
/// `−dL_n/dz`, `2z dC_n/dz − 2nC_n`, `(z+1)dP_n/dz − nP_n` (wrt α) or
/// `(z−1)dP_n/dz − nP_n` (wrt β).
pub fn rhs_direct(spec: &FamilySpec, n: usize, z: f64) -> f64 {
    let d = ortho::z_derivative(spec, n, z);
    let p = ortho::eval(spec, n, z);
    let nf = n as f64;
    match (spec.family(), spec.wrt()) {
        (Family::Laguerre, _) => -d,
        (Family::Gegenbauer, _) => 2.0 * z * d - 2.0 * nf * p,
        (Family::Jacobi, Param::Beta) => (z - 1.0) * d - nf * p,
        (Family::Jacobi, _) => (z + 1.0) * d - nf * p,
    }
}

/// `z ↦ ∂P_n/∂(parameter)` with derivative channels `Σ a_k P_k'` and
/// `Σ a_k P_k''`.
#[derive(Debug, Clone)]
pub struct ParamDerivative {
    spec: FamilySpec,
    row: CoefficientVector,
}

impl ParamDerivative {
    pub fn new(spec: &FamilySpec, n: usize) -> Result<Self> {
        Ok(Self {
            spec: *spec,
            row: coefficients(spec, n)?,
        })
    }

    pub fn row(&self) -> &CoefficientVector {
        &self.row
    }
}

impl ScalarFn for ParamDerivative {
    fn value(&self, z: f64) -> f64 {
        self.row.dot(&eval_sequence(&self.spec, self.row.n, z))
    }

    fn derivatives(&self, z: f64) -> Option<(f64, f64)> {
        let (mut d1, mut d2) = (0.0, 0.0);
        for (k, a) in self.row.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            let (p1, p2) = FamilyPolynomial {
                spec: self.spec,
                n: k,
            }
            .derivatives(z)?;
            d1 += a * p1;
            d2 += a * p2;
        }
        Some((d1, d2))
    }
}
