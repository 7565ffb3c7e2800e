use std::fmt;

use super::symbol::{Parity, SymbolId};

/// A canonical monomial: a commuting part (even symbols with positive
/// exponents, sorted) times a strictly increasing product of odd symbols.
///
/// Any odd symbol appearing twice kills the monomial, so `odd` never holds
/// repeats. Construction from arbitrarily ordered factors returns the
/// transposition sign picked up while sorting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    even: Vec<(SymbolId, u32)>,
    odd: Vec<SymbolId>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial { even: Vec::new(), odd: Vec::new() }
    }

    pub fn symbol(s: SymbolId) -> Monomial {
        match s.parity() {
            Parity::Even => Monomial { even: vec![(s, 1)], odd: Vec::new() },
            Parity::Odd => Monomial { even: Vec::new(), odd: vec![s] },
        }
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    pub fn even_part(&self) -> &[(SymbolId, u32)] {
        &self.even
    }

    pub fn odd_part(&self) -> &[SymbolId] {
        &self.odd
    }

    pub fn parity(&self) -> Parity {
        Parity::of_int(self.odd.len() as i64)
    }

    /// Number of jet factors, counting even exponents with multiplicity.
    pub fn jet_degree(&self) -> u32 {
        let e: u32 = self.even.iter().filter(|(s, _)| s.is_jet()).map(|(_, k)| *k).sum();
        let o = self.odd.iter().filter(|s| s.is_jet()).count() as u32;
        e + o
    }

    pub fn contains(&self, s: &SymbolId) -> bool {
        match s.parity() {
            Parity::Even => self.even.iter().any(|(t, _)| t == s),
            Parity::Odd => self.odd.contains(s),
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.even.iter().map(|(s, _)| *s).chain(self.odd.iter().copied())
    }

    /// Multiplicity of a symbol (0 or 1 for odd symbols).
    pub fn exponent(&self, s: &SymbolId) -> u32 {
        match s.parity() {
            Parity::Even => self
                .even
                .iter()
                .find(|(t, _)| t == s)
                .map(|(_, k)| *k)
                .unwrap_or(0),
            Parity::Odd => u32::from(self.odd.contains(s)),
        }
    }

    /// Product of two canonical monomials. Returns `None` when an odd symbol
    /// repeats; otherwise the Koszul sign (true = negate) and the product.
    pub fn mul(&self, other: &Monomial) -> Option<(bool, Monomial)> {
        let mut even = Vec::with_capacity(self.even.len() + other.even.len());
        let (mut i, mut j) = (0, 0);
        while i < self.even.len() && j < other.even.len() {
            match self.even[i].0.cmp(&other.even[j].0) {
                std::cmp::Ordering::Less => {
                    even.push(self.even[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    even.push(other.even[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    even.push((self.even[i].0, self.even[i].1 + other.even[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        even.extend_from_slice(&self.even[i..]);
        even.extend_from_slice(&other.even[j..]);

        // Merge odd parts counting inversions: each element of `other` that
        // must pass left over elements of `self` contributes one sign flip.
        let mut odd = Vec::with_capacity(self.odd.len() + other.odd.len());
        let mut inversions = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < self.odd.len() && j < other.odd.len() {
            match self.odd[i].cmp(&other.odd[j]) {
                std::cmp::Ordering::Less => {
                    odd.push(self.odd[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    inversions += self.odd.len() - i;
                    odd.push(other.odd[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => return None,
            }
        }
        odd.extend_from_slice(&self.odd[i..]);
        odd.extend_from_slice(&other.odd[j..]);

        Some((inversions % 2 == 1, Monomial { even, odd }))
    }

    /// Build from an ordered factor list; returns the sign from sorting.
    pub fn from_factors(factors: &[SymbolId]) -> Option<(bool, Monomial)> {
        let mut acc = Monomial::one();
        let mut neg = false;
        for s in factors {
            let (n, m) = acc.mul(&Monomial::symbol(*s))?;
            acc = m;
            neg ^= n;
        }
        Some((neg, acc))
    }

    /// Monomial with `s`'s exponent lowered by one (s must occur).
    pub fn without_one(&self, s: &SymbolId) -> Monomial {
        let mut m = self.clone();
        match s.parity() {
            Parity::Even => {
                for k in 0..m.even.len() {
                    if &m.even[k].0 == s {
                        if m.even[k].1 == 1 {
                            m.even.remove(k);
                        } else {
                            m.even[k].1 -= 1;
                        }
                        break;
                    }
                }
            }
            Parity::Odd => m.odd.retain(|t| t != s),
        }
        m
    }

    /// Splits the odd part at position `j`: (prefix incl. even part, suffix).
    pub fn split_odd(&self, j: usize) -> (Monomial, SymbolId, Monomial) {
        let prefix = Monomial { even: self.even.clone(), odd: self.odd[..j].to_vec() };
        let suffix = Monomial { even: Vec::new(), odd: self.odd[j + 1..].to_vec() };
        (prefix, self.odd[j], suffix)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (s, k) in &self.even {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *k == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{k}")?;
            }
        }
        for s in &self.odd {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::symbol::{Jet, JetFamily};

    #[test]
    fn odd_square_vanishes() {
        let th = Monomial::symbol(SymbolId::Theta);
        assert!(th.mul(&th).is_none());
    }

    #[test]
    fn transposition_sign() {
        let t3 = Monomial::symbol(SymbolId::OddTime(3));
        let th = Monomial::symbol(SymbolId::Theta);
        // t3 * theta = -(theta t3): one inversion.
        let (neg, m) = t3.mul(&th).unwrap();
        assert!(neg);
        assert_eq!(m.odd_part(), &[SymbolId::Theta, SymbolId::OddTime(3)]);
        // theta * t3 keeps order.
        let (neg, _) = th.mul(&t3).unwrap();
        assert!(!neg);
    }

    #[test]
    fn jet_degree_counts_multiplicity() {
        let a1 = SymbolId::Jet(Jet::new(JetFamily::A, 1, 1)); // even (|a1|+1)
        let m = Monomial::from_factors(&[a1, a1, SymbolId::X]).unwrap().1;
        assert_eq!(m.jet_degree(), 2);
    }
}
