use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CoreError, Result};

use super::monomial::Monomial;
use super::symbol::{Parity, SymbolId};

/// Exact rational coefficients. No floating point anywhere.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// An element of the free super-differential polynomial ring: a finite map
/// from canonical monomials to nonzero exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuperPolynomial {
    terms: BTreeMap<Monomial, Rat>,
}

impl SuperPolynomial {
    pub fn zero() -> SuperPolynomial {
        SuperPolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> SuperPolynomial {
        SuperPolynomial::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> SuperPolynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        SuperPolynomial { terms }
    }

    pub fn constant_int(n: i64) -> SuperPolynomial {
        SuperPolynomial::constant(rat_int(n))
    }

    pub fn symbol(s: SymbolId) -> SuperPolynomial {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::symbol(s), Rat::one());
        SuperPolynomial { terms }
    }

    pub fn monomial(m: Monomial, c: Rat) -> SuperPolynomial {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SuperPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The constant (monomial-1) coefficient.
    pub fn constant_part(&self) -> Rat {
        self.coefficient(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scaled(&self, c: &Rat) -> SuperPolynomial {
        if c.is_zero() {
            return SuperPolynomial::zero();
        }
        SuperPolynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Graded-commutative product with Koszul signs, canonical output.
    pub fn mul_poly(&self, other: &SuperPolynomial) -> SuperPolynomial {
        self.mul_capped(other, None)
    }

    /// Product dropping monomials whose jet degree exceeds `cap`.
    pub fn mul_capped(&self, other: &SuperPolynomial, cap: Option<u32>) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((neg, m)) = m1.mul(m2) {
                    if let Some(cap) = cap {
                        if m.jet_degree() > cap {
                            continue;
                        }
                    }
                    let c = c1 * c2;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// Drops monomials of jet degree above `cap` (no-op for `None`).
    pub fn truncate_degree(&self, cap: Option<u32>) -> SuperPolynomial {
        match cap {
            None => self.clone(),
            Some(cap) => SuperPolynomial {
                terms: self
                    .terms
                    .iter()
                    .filter(|(m, _)| m.jet_degree() <= cap)
                    .map(|(m, c)| (m.clone(), c.clone()))
                    .collect(),
            },
        }
    }

    /// Smallest jet degree among terms (None for the zero polynomial).
    pub fn min_jet_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.jet_degree()).min()
    }

    pub fn max_jet_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.jet_degree()).max()
    }

    /// Parity when homogeneous, `None` for zero or mixed polynomials.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next()?;
        for p in it {
            if p != first {
                return None;
            }
        }
        Some(first)
    }

    /// Splits into (even, odd) homogeneous parts.
    pub fn split_parity(&self) -> (SuperPolynomial, SuperPolynomial) {
        let mut even = SuperPolynomial::zero();
        let mut odd = SuperPolynomial::zero();
        for (m, c) in &self.terms {
            match m.parity() {
                Parity::Even => even.add_term(m.clone(), c.clone()),
                Parity::Odd => odd.add_term(m.clone(), c.clone()),
            }
        }
        (even, odd)
    }

    pub fn pow(&self, k: u32) -> SuperPolynomial {
        let mut acc = SuperPolynomial::one();
        for _ in 0..k {
            acc = acc.mul_poly(self);
        }
        acc
    }

    /// Ring homomorphism sending each symbol to `image(symbol)` (identity
    /// when `image` returns `None`). Images must match the symbol's parity.
    pub fn substitute<F>(&self, image: &F) -> Result<SuperPolynomial>
    where
        F: Fn(&SymbolId) -> Option<SuperPolynomial>,
    {
        let mut out = SuperPolynomial::zero();
        for (m, c) in &self.terms {
            let mut acc = SuperPolynomial::constant(c.clone());
            for (s, k) in m.even_part() {
                match image(s) {
                    None => {
                        let mono = SuperPolynomial::symbol(*s);
                        for _ in 0..*k {
                            acc = acc.mul_poly(&mono);
                        }
                    }
                    Some(img) => {
                        check_parity(s, &img)?;
                        for _ in 0..*k {
                            acc = acc.mul_poly(&img);
                        }
                    }
                }
            }
            for s in m.odd_part() {
                match image(s) {
                    None => acc = acc.mul_poly(&SuperPolynomial::symbol(*s)),
                    Some(img) => {
                        check_parity(s, &img)?;
                        acc = acc.mul_poly(&img);
                    }
                }
            }
            out = out + acc;
        }
        Ok(out)
    }

    /// All distinct symbols occurring in the polynomial.
    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        let mut seen = std::collections::BTreeSet::new();
        self.terms
            .keys()
            .flat_map(|m| m.symbols().collect::<Vec<_>>())
            .filter(move |s| seen.insert(*s))
    }

    /// True if the symbol occurs anywhere.
    pub fn mentions(&self, s: &SymbolId) -> bool {
        self.terms.keys().any(|m| m.contains(s))
    }

    /// Coefficient of the bare monomial `{s}` if `s` occurs linearly there
    /// (i.e. the monomial consisting of exactly this one symbol).
    pub fn linear_coefficient(&self, s: &SymbolId) -> Rat {
        self.coefficient(&Monomial::symbol(*s))
    }
}

fn check_parity(s: &SymbolId, img: &SuperPolynomial) -> Result<()> {
    if img.is_zero() {
        return Ok(());
    }
    match img.parity() {
        Some(p) if p == s.parity() => Ok(()),
        _ => Err(CoreError::Parity(format!(
            "substitution image of {s} must be homogeneous of parity {}",
            s.parity()
        ))),
    }
}

impl Add for SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(mut self, rhs: SuperPolynomial) -> SuperPolynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<'a> Add<&'a SuperPolynomial> for SuperPolynomial {
    type Output = SuperPolynomial;
    fn add(mut self, rhs: &'a SuperPolynomial) -> SuperPolynomial {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
        self
    }
}

impl Sub for SuperPolynomial {
    type Output = SuperPolynomial;
    fn sub(mut self, rhs: SuperPolynomial) -> SuperPolynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Neg for SuperPolynomial {
    type Output = SuperPolynomial;
    fn neg(self) -> SuperPolynomial {
        SuperPolynomial {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Mul for &SuperPolynomial {
    type Output = SuperPolynomial;
    fn mul(self, rhs: &SuperPolynomial) -> SuperPolynomial {
        self.mul_poly(rhs)
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::symbol::{Jet, JetFamily};

    fn th() -> SuperPolynomial {
        SuperPolynomial::symbol(SymbolId::Theta)
    }
    fn x() -> SuperPolynomial {
        SuperPolynomial::symbol(SymbolId::X)
    }
    fn t(m: u32) -> SuperPolynomial {
        SuperPolynomial::symbol(SymbolId::time(m, false).unwrap())
    }

    #[test]
    fn theta_squared_is_zero() {
        assert!(th().mul_poly(&th()).is_zero());
    }

    #[test]
    fn koszul_sign_on_reorder() {
        // t3 * theta = -(theta * t3)
        let lhs = t(3).mul_poly(&th());
        let rhs = th().mul_poly(&t(3));
        assert_eq!(lhs, -rhs);
    }

    #[test]
    fn even_symbol_commutes() {
        // (x + theta*t3) * x = x^2 + theta*t3*x
        let p = x() + th().mul_poly(&t(3));
        let lhs = p.clone().mul_poly(&x());
        let rhs = x().mul_poly(&p);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.num_terms(), 2);
    }

    #[test]
    fn graded_commutativity_homogeneous() {
        let a1 = SuperPolynomial::symbol(SymbolId::Jet(Jet::new(JetFamily::A, 1, 0)));
        // odd*odd anticommute
        let lhs = a1.mul_poly(&th());
        let rhs = th().mul_poly(&a1);
        assert_eq!(lhs, -rhs);
    }
}
