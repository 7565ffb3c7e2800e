//! Exact symbolic calculus for super-pseudodifferential operators.
//!
//! The coefficient ring is a free Grassmann-graded differential polynomial
//! algebra over exact rationals in a spatial variable `x`, an odd variable
//! `theta`, even/odd time variables and jet variables for unknown functions,
//! with the odd derivation `D = d_theta + theta d_x` (so `D^2 = d_x`).
//!
//! On top of it sits the operator ring of formal series `sum f_i D^i` with
//! reliability-window tracking, and the hierarchy layers: the supersymmetric
//! BKP hierarchy, its two-component extension and the D-type Drinfeld-Sokolov
//! reduction, each with a registry of machine-checkable operator identities.

pub mod error;
pub mod superalgebra;
pub mod psido;
pub mod sbkp;
pub mod s2bkp;
pub mod dsd;
pub mod check;
pub mod gen;

pub use error::CoreError;
pub use superalgebra::{Jet, JetFamily, Monomial, Parity, Rat, SuperPolynomial, SymbolId};
pub use psido::{Bound, OpCtx, SuperPsiDO, Window};
pub use check::{registry, run_check, run_many, RunConfig, VerificationReport};
pub use sbkp::HierarchyContext;
