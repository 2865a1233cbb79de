//! Verification sweeps over parameter grids.
//!
//! Each sweep is a list of independent cases; cases are evaluated either
//! sequentially or on the rayon pool (with the `parallel` feature) and the
//! results are gathered in case order, so reports are identical whatever
//! the execution mode or worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{self, ExactSpec, Verdict};
use crate::ortho::{self, Endpoint, Family, FamilySpec, Param};
use crate::param_deriv::{self, ParamDerivative};

/// Tolerances of the float sweeps.
pub mod tolerance {
    /// Parameter step of the central difference.
    pub const FD_STEP: f64 = 1e-6;
    /// `|closed form − central difference| ≤ FD_AGREEMENT·(1+|value|)`.
    pub const FD_AGREEMENT: f64 = 1e-5;
    /// Diagonal from the leading-coefficient log-derivative vs the row.
    pub const LEMMA: f64 = 1e-13;
    /// Entry-wise agreement of the two Gegenbauer row constructions.
    pub const GEGENBAUER_FORMS: f64 = 1e-13;
    /// Full Christoffel–Darboux identity, relative to `Σ|h_k P_k(z) P_k(z′)|`.
    pub const CD_KERNEL: f64 = 1e-9;
    /// Collapsed identity vs brute-force sum, relative to `1+|sum|`.
    pub const CD_ENDPOINT: f64 = 1e-10;
    /// Differentiated equation residual, relative to `1+|inhomogeneity|`.
    pub const ODE: f64 = 1e-6;
    /// Gegenbauer through Jacobi, relative to `1+max(|C_n(z)|, |C_n(1)|)`.
    pub const GEGENBAUER_JACOBI: f64 = 1e-12;
    /// Jacobi reflection, relative to `1+max(|P_n(z)|, |P_n(1)|, |P_n(−1)|)`.
    pub const REFLECTION: f64 = 1e-11;
    /// Minimum error reduction of the Laguerre limit from β = 10³ to 10⁴.
    pub const LIMIT_RATIO: f64 = 8.0;
}

/// Degree caps of the float sweeps; `--max-n` lowers them further.
pub mod caps {
    pub const FD: usize = 20;
    pub const LEMMA: usize = 30;
    pub const GEGENBAUER_FORMS: usize = 30;
    pub const CD: usize = 15;
    pub const ODE: usize = 12;
    pub const RELATIONS: usize = 15;
    pub const LIMIT: usize = 5;
}

const SEED: u64 = 0x0005_eed0_f0c7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon's current pool; falls back to sequential without the
    /// `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map over `items`.
pub fn map_cases<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub check: &'static str,
    pub family: Family,
    pub spec: String,
    pub n: usize,
    pub detail: String,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} n={}: {}",
            self.check, self.spec, self.n, self.detail
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyTally {
    pub family: Family,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub tallies: Vec<FamilyTally>,
    pub first_failure: Option<Counterexample>,
}

impl SuiteReport {
    fn collect(name: &'static str, outcomes: Vec<Outcome>) -> Self {
        let mut tallies: Vec<FamilyTally> = Family::ALL
            .iter()
            .map(|&family| FamilyTally {
                family,
                passed: 0,
                failed: 0,
            })
            .collect();
        let mut first_failure = None;
        for o in outcomes {
            let tally = tallies
                .iter_mut()
                .find(|t| t.family == o.family)
                .expect("all families");
            match o.failure {
                None => tally.passed += 1,
                Some(c) => {
                    tally.failed += 1;
                    first_failure.get_or_insert(c);
                }
            }
        }
        Self {
            name,
            tallies,
            first_failure,
        }
    }

    pub fn passed(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0)
    }

    pub fn checks(&self) -> usize {
        self.tallies.iter().map(|t| t.passed + t.failed).sum()
    }

    pub fn checks_passed(&self) -> usize {
        self.tallies.iter().map(|t| t.passed).sum()
    }
}

#[derive(Debug)]
struct Outcome {
    family: Family,
    failure: Option<Counterexample>,
}

impl Outcome {
    fn check(
        check: &'static str,
        spec: &FamilySpec,
        n: usize,
        ok: bool,
        detail: impl FnOnce() -> String,
    ) -> Self {
        Self {
            family: spec.family(),
            failure: (!ok).then(|| Counterexample {
                check,
                family: spec.family(),
                spec: spec.to_string(),
                n,
                detail: detail(),
            }),
        }
    }

    fn error(check: &'static str, spec: &FamilySpec, n: usize, err: crate::Error) -> Self {
        Self::check(check, spec, n, false, || err.to_string())
    }
}

/// Float counterpart of [`exact::default_grid`].
pub fn float_grid() -> Vec<FamilySpec> {
    exact::default_grid()
        .iter()
        .map(|s| s.to_float().expect("grid is in domain"))
        .collect()
}

fn degrees(cap: usize, max_n: usize) -> std::ops::RangeInclusive<usize> {
    0..=cap.min(max_n)
}

fn cases(grid: &[FamilySpec], cap: usize, max_n: usize) -> Vec<(usize, FamilySpec, usize)> {
    let mut out = Vec::new();
    for (i, spec) in grid.iter().enumerate() {
        for n in degrees(cap, max_n) {
            out.push((i, *spec, n));
        }
    }
    out
}

/// Deterministic per-case generator.
fn case_rng(tag: u64, index: usize, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ (tag << 48) ^ ((index as u64) << 16) ^ n as u64)
}

/// A random point of the family's natural interval (Laguerre truncated to
/// `[0, 10]`), kept away from the ends when `interior`.
pub fn random_z(rng: &mut impl Rng, family: Family, interior: bool) -> f64 {
    let margin = if interior { 1e-2 } else { 0.0 };
    match family {
        Family::Laguerre => rng.random_range(margin..10.0),
        _ => rng.random_range(-1.0 + margin..1.0 - margin),
    }
}

/// Exact sweep: the closed-form row reproduces the symbolically
/// differentiated series, and the lemma's leading-coefficient identity
/// holds, for every grid point and `n ≤ max_n`.
pub fn exact_suite(max_n: usize, exec: Execution) -> SuiteReport {
    let grid = exact::default_grid();
    let mut work: Vec<(&ExactSpec, usize)> = Vec::new();
    for spec in &grid {
        for n in 0..=max_n {
            work.push((spec, n));
        }
    }
    let outcomes = map_cases(exec, &work, |&(spec, n)| {
        let failure = match exact::verify_expansion_exact(spec, n) {
            Verdict::Pass if exact::verify_lemma_exact(spec, n) => None,
            Verdict::Pass => {
                Some("leading coefficient of the derivative is not a_nn*k_n".to_string())
            }
            Verdict::Fail {
                power,
                expected,
                found,
            } => Some(format!(
                "power {power}: derivative has {expected}, expansion gives {found}"
            )),
        };
        Outcome {
            family: spec.family(),
            failure: failure.map(|detail| Counterexample {
                check: "exact",
                family: spec.family(),
                spec: spec.to_string(),
                n,
                detail,
            }),
        }
    });
    SuiteReport::collect("exact", outcomes)
}

/// Closed-form derivative vs central difference in the parameter, 10
/// random z per case.
pub fn fd_suite(max_n: usize, exec: Execution) -> SuiteReport {
    let work = cases(&float_grid(), caps::FD, max_n);
    let outcomes = map_cases(exec, &work, |&(i, spec, n)| {
        let mut rng = case_rng(1, i, n);
        let h = tolerance::FD_STEP;
        let p = spec.param_value();
        let (up, down) = match (spec.with_param(p + h), spec.with_param(p - h)) {
            (Ok(u), Ok(d)) => (u, d),
            (Err(e), _) | (_, Err(e)) => return Outcome::error("fd", &spec, n, e),
        };
        for _ in 0..10 {
            let z = random_z(&mut rng, spec.family(), false);
            let v = match param_deriv::param_derivative_eval(&spec, n, z) {
                Ok(v) => v,
                Err(e) => return Outcome::error("fd", &spec, n, e),
            };
            let fd = (ortho::eval(&up, n, z) - ortho::eval(&down, n, z)) / (2.0 * h);
            if (v - fd).abs() > tolerance::FD_AGREEMENT * (1.0 + v.abs()) {
                return Outcome::check("fd", &spec, n, false, || {
                    format!("z={z}: closed form {v}, central difference {fd}")
                });
            }
        }
        Outcome::check("fd", &spec, n, true, String::new)
    });
    SuiteReport::collect("fd", outcomes)
}

/// Diagonal via the leading coefficient vs the row diagonal; Laguerre
/// diagonal exactly zero.
pub fn lemma_suite(max_n: usize, exec: Execution) -> SuiteReport {
    let work = cases(&float_grid(), caps::LEMMA, max_n);
    let outcomes = map_cases(exec, &work, |&(_, spec, n)| {
        let (lemma, row) = match (
            param_deriv::diagonal_via_lemma(&spec, n),
            param_deriv::coefficients(&spec, n),
        ) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(e), _) | (_, Err(e)) => return Outcome::error("lemma", &spec, n, e),
        };
        let diag = row.diagonal();
        let ok = if spec.family() == Family::Laguerre {
            lemma == 0.0 && diag == 0.0
        } else {
            (lemma - diag).abs() <= tolerance::LEMMA
        };
        Outcome::check("lemma", &spec, n, ok, || {
            format!("lemma {lemma}, row {diag}")
        })
    });
    SuiteReport::collect("lemma", outcomes)
}

/// The direct and the half-range Gegenbauer rows agree entry-wise.
pub fn gegenbauer_forms_suite(max_n: usize, exec: Execution) -> SuiteReport {
    let grid: Vec<FamilySpec> = float_grid()
        .into_iter()
        .filter(|s| s.family() == Family::Gegenbauer)
        .collect();
    let work = cases(&grid, caps::GEGENBAUER_FORMS, max_n);
    let outcomes = map_cases(exec, &work, |&(_, spec, n)| {
        let lam = spec.lambda();
        match (
            param_deriv::gegenbauer_coeffs(n, lam),
            param_deriv::gegenbauer_coeffs_even_form(n, lam),
        ) {
            (Ok(a), Ok(b)) => {
                let worst = a
                    .coeffs
                    .iter()
                    .zip(&b.coeffs)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                Outcome::check(
                    "gegenbauer-forms",
                    &spec,
                    n,
                    worst <= tolerance::GEGENBAUER_FORMS,
                    || format!("max entry difference {worst}"),
                )
            }
            (Err(e), _) | (_, Err(e)) => Outcome::error("gegenbauer-forms", &spec, n, e),
        }
    });
    SuiteReport::collect("gegenbauer-forms", outcomes)
}

fn endpoints(family: Family) -> &'static [Endpoint] {
    match family {
        Family::Laguerre => &[Endpoint::Zero],
        Family::Gegenbauer => &[Endpoint::PlusOne, Endpoint::MinusOne],
        Family::Jacobi => &[Endpoint::PlusOne],
    }
}

/// Full Christoffel–Darboux identity at 20 random `(z, z′)` pairs, and the
/// endpoint collapse against its brute-force sum.
pub fn cd_suite(max_n: usize, exec: Execution) -> SuiteReport {
    let work = cases(&float_grid(), caps::CD, max_n);
    let outcomes = map_cases(exec, &work, |&(i, spec, n)| {
        let mut rng = case_rng(2, i, n);
        for _ in 0..20 {
            let z = random_z(&mut rng, spec.family(), false);
            let zp = random_z(&mut rng, spec.family(), false);
            if z == zp {
                continue;
            }
            let lhs = ortho::cd_kernel_sum(&spec, n, z, zp);
            let rhs = match ortho::cd_kernel_closed(&spec, n, z, zp) {
                Ok(v) => v,
                Err(e) => return Outcome::error("cd", &spec, n, e),
            };
            let scale = ortho::cd_kernel_magnitude(&spec, n, z, zp);
            if (lhs - rhs).abs() > tolerance::CD_KERNEL * scale {
                return Outcome::check("cd", &spec, n, false, || {
                    format!("z={z}, z'={zp}: sum {lhs}, closed form {rhs}")
                });
            }
            for &e in endpoints(spec.family()) {
                if z == e.value() {
                    continue;
                }
                let (closed, brute) = match (
                    ortho::cd_endpoint_sum(&spec, n, z, e),
                    ortho::cd_endpoint_brute(&spec, n, z, e),
                ) {
                    (Ok(c), Ok(b)) => (c, b),
                    (Err(err), _) | (_, Err(err)) => return Outcome::error("cd", &spec, n, err),
                };
                if (closed - brute).abs() > tolerance::CD_ENDPOINT * (1.0 + brute.abs()) {
                    return Outcome::check("cd", &spec, n, false, || {
                        format!(
                            "endpoint {}, z={z}: collapsed {closed}, brute force {brute}",
                            e.name()
                        )
                    });
                }
            }
        }
        Outcome::check("cd", &spec, n, true, String::new)
    });
    SuiteReport::collect("cd", outcomes)
}

/// The family operator applied to the expansion-computed derivative equals
/// the direct inhomogeneity at 10 interior points.
pub fn ode_suite(max_n: usize, exec: Execution) -> SuiteReport {
    let work = cases(&float_grid(), caps::ODE, max_n);
    let outcomes = map_cases(exec, &work, |&(i, spec, n)| {
        let mut rng = case_rng(3, i, n);
        let f = match ParamDerivative::new(&spec, n) {
            Ok(f) => f,
            Err(e) => return Outcome::error("ode", &spec, n, e),
        };
        for _ in 0..10 {
            let z = random_z(&mut rng, spec.family(), true);
            let lhs = ortho::ode_residual(&spec, n, &f, z);
            let rhs = param_deriv::rhs_direct(&spec, n, z);
            if (lhs - rhs).abs() > tolerance::ODE * (1.0 + rhs.abs()) {
                return Outcome::check("ode", &spec, n, false, || {
                    format!("z={z}: operator gives {lhs}, inhomogeneity {rhs}")
                });
            }
        }
        Outcome::check("ode", &spec, n, true, String::new)
    });
    SuiteReport::collect("ode", outcomes)
}

/// Gegenbauer through Jacobi (Gegenbauer grid), Jacobi reflection (Jacobi
/// grid, wrt α entries) and the Laguerre limit of Jacobi (Laguerre grid).
pub fn relations_suite(max_n: usize, exec: Execution) -> SuiteReport {
    let grid: Vec<FamilySpec> = float_grid()
        .into_iter()
        .filter(|s| s.family() != Family::Jacobi || s.wrt() == Param::Alpha)
        .collect();
    let work: Vec<_> = cases(&grid, caps::RELATIONS, max_n)
        .into_iter()
        .filter(|(_, spec, n)| spec.family() != Family::Laguerre || (1..=caps::LIMIT).contains(n))
        .collect();
    let outcomes = map_cases(exec, &work, |&(i, spec, n)| {
        let mut rng = case_rng(4, i, n);
        match spec.family() {
            Family::Gegenbauer => {
                let top = ortho::eval(&spec, n, 1.0).abs();
                for _ in 0..10 {
                    let z = random_z(&mut rng, Family::Gegenbauer, false);
                    let direct = ortho::eval(&spec, n, z);
                    let via = match ortho::gegenbauer_from_jacobi(spec.lambda(), n, z) {
                        Ok(v) => v,
                        Err(e) => return Outcome::error("gegenbauer-jacobi", &spec, n, e),
                    };
                    let scale = 1.0 + direct.abs().max(top);
                    if (direct - via).abs() > tolerance::GEGENBAUER_JACOBI * scale {
                        return Outcome::check("gegenbauer-jacobi", &spec, n, false, || {
                            format!("z={z}: recurrence {direct}, via jacobi {via}")
                        });
                    }
                }
                Outcome::check("gegenbauer-jacobi", &spec, n, true, String::new)
            }
            Family::Jacobi => {
                let swapped = spec.swapped();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let top = ortho::eval(&spec, n, 1.0)
                    .abs()
                    .max(ortho::eval(&spec, n, -1.0).abs());
                for _ in 0..10 {
                    let z = random_z(&mut rng, Family::Jacobi, false);
                    let lhs = ortho::eval(&spec, n, z);
                    let rhs = sign * ortho::eval(&swapped, n, -z);
                    if (lhs - rhs).abs() > tolerance::REFLECTION * (1.0 + lhs.abs().max(top)) {
                        return Outcome::check("reflection", &spec, n, false, || {
                            format!("z={z}: {lhs} vs reflected {rhs}")
                        });
                    }
                }
                Outcome::check("reflection", &spec, n, true, String::new)
            }
            Family::Laguerre => {
                for z in [0.5, 1.25, 2.0, 3.5] {
                    let target = ortho::eval(&spec, n, z);
                    let probe = |beta| ortho::laguerre_limit_probe(spec.alpha(), n, z, beta);
                    let (e3, e4) = match (probe(1e3), probe(1e4)) {
                        (Ok(a), Ok(b)) => ((a - target).abs(), (b - target).abs()),
                        (Err(e), _) | (_, Err(e)) => {
                            return Outcome::error("laguerre-limit", &spec, n, e)
                        }
                    };
                    if e3.is_nan() || e3 < tolerance::LIMIT_RATIO * e4 {
                        return Outcome::check("laguerre-limit", &spec, n, false, || {
                            format!("z={z}: error {e3} at beta=1e3, {e4} at beta=1e4")
                        });
                    }
                }
                Outcome::check("laguerre-limit", &spec, n, true, String::new)
            }
        }
    });
    SuiteReport::collect("relations", outcomes)
}

/// Every float sweep, in a fixed order.
pub fn float_suites(max_n: usize, exec: Execution) -> Vec<SuiteReport> {
    vec![
        fd_suite(max_n, exec),
        lemma_suite(max_n, exec),
        gegenbauer_forms_suite(max_n, exec),
        cd_suite(max_n, exec),
        ode_suite(max_n, exec),
        relations_suite(max_n, exec),
    ]
}
