//! Exact intersection-number engine for compactified universal
//! semiabelian families.
//!
//! The crate models three presented graded rings with rational
//! coefficients and a monomial rewrite system apiece:
//!
//! * the **base** model over the moduli of principally polarized
//!   abelian varieties with a fixed boundary stratum, on generators
//!   `mu`, `alpha`, `eta`;
//! * the **poincare** model of the compactified universal family,
//!   which adds the divisor generator `xi` cutting out the zero
//!   section's closure;
//! * the **level**-`m` model, whose `m` generators `xi_0 … xi_{m-1}`
//!   track the branches of the level structure over the boundary.
//!
//! On top of the rewrite engine sit the derived quantities the crate
//! exists to compute exactly:
//!
//! * the coefficients of the extended theta divisor, solved from the
//!   gluing and vanishing constraints rather than assumed:
//!   `D = xi + mu + alpha/2 + eta/4`;
//! * the boundary intersection number `D^{g+1} = n (g+1)!/6`;
//! * its level-`m` analog `m^{g+1} n (g+1)!/6`.
//!
//! All arithmetic is exact (`num::BigRational`); every top-degree
//! evaluation can be cross-checked against an independent randomized
//! table oracle, and `verify::run_verification` sweeps the full set of
//! invariants.

pub mod derivations;
pub mod error;
pub mod models;
pub mod parse;
pub mod rewrite;
pub mod ring;
pub mod verify;

pub use error::{Error, Result};
pub use models::{
    make_base_ring, make_level_ring, make_poincare_ring, shift_pullback, CurvePairing, ModelKind,
    RingModel, Section, TestCurve,
};
pub use parse::{parse_expr, parse_model_descriptor};
pub use ring::{ClassExpr, GenId, Monomial, Rational};
