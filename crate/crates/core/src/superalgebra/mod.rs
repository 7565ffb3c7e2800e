//! The coefficient ring: a free super-differential polynomial algebra over
//! exact rationals.
//!
//! Generators are the spatial variable `x`, the odd variable `theta`, even
//! times `t_{4k-2}`, odd times `t_{4k-1}` (plus hatted copies) and jet
//! variables `f_i^{(d)}` standing for the d-fold D-derivative of an unknown
//! function. Odd generators anticommute and square to zero; products are kept
//! in a canonical form with a fixed global order on odd symbols, so equality
//! is literal map equality.

mod symbol;
mod monomial;
mod poly;
mod derivation;
mod subst;
mod antideriv;

pub use symbol::{Jet, JetFamily, Parity, SymbolId};
pub use monomial::Monomial;
pub use poly::{rat, rat_int, Rat, SuperPolynomial};
pub use derivation::{
    apply_d, apply_d_n, apply_partial, evolutionary_derive, time_partial, FlowRule,
};
pub use subst::{solve_relation_for_jet, ConstraintSet};
pub use antideriv::d_preimage;
