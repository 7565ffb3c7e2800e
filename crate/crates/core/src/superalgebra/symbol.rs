use std::fmt;

use crate::error::{CoreError, Result};

/// Z/2 grading. Odd elements anticommute and square to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_int(i: i64) -> Parity {
        if i.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// Koszul sign (-1)^{|a||b|} as a boolean "negate" flag.
    pub fn koszul_negates(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Families of jet variables. The base parity of a family member with index
/// `i` follows the conventions of the hierarchies built on top:
/// `|u_i| = i`, `|uhat_i| = i+1`, `|a_i| = |b_i| = i`, `|v_i| = 0`,
/// `|rho| = 1`; eigenfunction families carry a user-assigned parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetFamily {
    /// Dressing coefficients a_i of the lower Volterra group.
    A,
    /// Dressing coefficients b_i of the hat Volterra group.
    B,
    /// Lax coefficients u_i.
    U,
    /// Hat Lax coefficients uhat_i.
    UHat,
    /// D-type reduced Lax coefficients v_i (even).
    V,
    /// D-type reduced odd coefficient rho.
    Rho,
    /// Eigenfunctions phi_j with a chosen parity.
    Phi(u8, Parity),
    /// Scratch family used internally by solvers; parity chosen per use.
    Tmp(Parity),
}

impl JetFamily {
    pub fn base_parity(self, index: i32) -> Parity {
        match self {
            JetFamily::A | JetFamily::B | JetFamily::U => Parity::of_int(index as i64),
            JetFamily::UHat => Parity::of_int(index as i64 + 1),
            JetFamily::V => Parity::Even,
            JetFamily::Rho => Parity::Odd,
            JetFamily::Phi(_, p) => p,
            JetFamily::Tmp(p) => p,
        }
    }

    pub fn prefix(self) -> String {
        match self {
            JetFamily::A => "a".into(),
            JetFamily::B => "b".into(),
            JetFamily::U => "u".into(),
            JetFamily::UHat => "uhat".into(),
            JetFamily::V => "v".into(),
            JetFamily::Rho => "rho".into(),
            JetFamily::Phi(j, _) => format!("phi{j}"),
            JetFamily::Tmp(_) => "w".into(),
        }
    }
}

/// A jet variable: the `d`-fold D-derivative of unknown `family_index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub family: JetFamily,
    pub index: i32,
    pub d: u32,
}

impl Jet {
    pub fn new(family: JetFamily, index: i32, d: u32) -> Jet {
        Jet { family, index, d }
    }

    pub fn parity(&self) -> Parity {
        if self.d % 2 == 0 {
            self.family.base_parity(self.index)
        } else {
            self.family.base_parity(self.index).flip()
        }
    }
}

/// A generator of the coefficient ring.
///
/// The derived `Ord` fixes the global canonical order used for odd parts of
/// monomials: `theta < t_{4k-1} < that_{4k-1} < odd jets` (jets ordered by
/// family, index, derivative count).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolId {
    X,
    Theta,
    /// t_m with m = 4k-2 (even parity). Stores the literal subscript m.
    EvenTime(u32),
    /// t_m with m = 4k-1 (odd parity).
    OddTime(u32),
    HatEvenTime(u32),
    HatOddTime(u32),
    Jet(Jet),
}

impl SymbolId {
    pub fn parity(&self) -> Parity {
        match self {
            SymbolId::X | SymbolId::EvenTime(_) | SymbolId::HatEvenTime(_) => Parity::Even,
            SymbolId::Theta | SymbolId::OddTime(_) | SymbolId::HatOddTime(_) => Parity::Odd,
            SymbolId::Jet(j) => j.parity(),
        }
    }

    pub fn jet(family: JetFamily, index: i32, d: u32) -> SymbolId {
        SymbolId::Jet(Jet::new(family, index, d))
    }

    /// Time symbol from a literal subscript m (2, 3, 6, 7, ...).
    pub fn time(m: u32, hat: bool) -> Result<SymbolId> {
        match (m % 4, hat) {
            (2, false) => Ok(SymbolId::EvenTime(m)),
            (3, false) => Ok(SymbolId::OddTime(m)),
            (2, true) => Ok(SymbolId::HatEvenTime(m)),
            (3, true) => Ok(SymbolId::HatOddTime(m)),
            _ => Err(CoreError::UnknownTime(m)),
        }
    }

    /// Number of jet factors this symbol contributes to a monomial's degree.
    pub fn is_jet(&self) -> bool {
        matches!(self, SymbolId::Jet(_))
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolId::X => write!(f, "x"),
            SymbolId::Theta => write!(f, "theta"),
            SymbolId::EvenTime(m) | SymbolId::OddTime(m) => write!(f, "t{m}"),
            SymbolId::HatEvenTime(m) | SymbolId::HatOddTime(m) => write!(f, "ht{m}"),
            SymbolId::Jet(j) => write!(f, "{}{}^{}", j.family.prefix(), j.index, j.d),
        }
    }
}
