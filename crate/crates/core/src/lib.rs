//! Parameter derivatives of the generalized Laguerre, Gegenbauer and Jacobi
//! polynomials, expanded in the same family:
//!
//! ```text
//! ∂P_n(λ; z)/∂λ = Σ_{k=0}^{n} a_{nk}(λ) P_k(λ; z)
//! ```
//!
//! The float engine lives in [`ortho`] and [`param_deriv`]; [`exact`] is an
//! arbitrary-precision rational oracle that checks each expansion
//! coefficient-for-coefficient, and [`suite`] runs both kinds of checks over
//! parameter grids.

pub mod cli;
mod dd;
pub mod error;
pub mod exact;
pub mod ortho;
pub mod param_deriv;
pub mod special_fn;
pub mod suite;

pub use error::{Error, Result};
pub use ortho::{Endpoint, Family, FamilySpec, Param};
