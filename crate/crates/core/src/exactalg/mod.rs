//! Exact arithmetic over ℚ: sparse multivariate polynomials, reduced
//! rational functions, roots and partial fractions in a distinguished
//! variable, and linear algebra over ℚ and ℚ(vars).

mod dense;
pub mod gcd;
pub mod linalg;
pub mod partial;
pub mod poly;
pub mod ratfunc;
pub mod registry;
pub mod roots;
pub mod unipoly;

use thiserror::Error;

pub use gcd::{gcd, lcm};
pub use linalg::{linear_solve, nullspace, Field, Matrix, SolutionSet};
pub use partial::{partial_fractions, poles, squarefree_factor, PartialFraction, PartialFractions};
pub use poly::{q_frac, q_int, Monomial, MultiPoly, Q};
pub use ratfunc::RationalFunction;
pub use registry::{Var, VarKind, VariableRegistry};
pub use roots::rational_roots;
pub use unipoly::UniPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("denominator has an irreducible factor of degree at least 2")]
    NonLinearFactor,
    #[error("right-hand side is not in the ideal")]
    NotInIdeal,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` already registered")]
    DuplicateVariable(String),
}

/// `∂f/∂v`, checking that `v` is registered.
pub fn derive(
    reg: &VariableRegistry,
    f: &RationalFunction,
    v: Var,
) -> Result<RationalFunction, AlgError> {
    if !reg.contains(v) {
        return Err(AlgError::UnknownVariable(format!("#{}", v.0)));
    }
    Ok(f.derive(v))
}
