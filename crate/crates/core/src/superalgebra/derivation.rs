use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{CoreError, Result};

use super::poly::{rat_int, Rat, SuperPolynomial};
use super::symbol::{Jet, JetFamily, Parity, SymbolId};

/// A graded derivation given by its parity and its action on generators.
/// `None` means the generator is outside the rule's domain (an error for
/// evolutionary rules, zero for total-time derivatives is expressed by
/// returning `Some(0)`).
pub trait DerivationRule {
    fn parity(&self) -> Parity;
    fn image(&self, s: &SymbolId) -> Result<SuperPolynomial>;
}

/// Applies a graded derivation to a polynomial via the graded Leibniz rule
/// `delta(ab) = delta(a) b + (-1)^{|delta||a|} a delta(b)`.
pub fn derive(p: &SuperPolynomial, rule: &dyn DerivationRule) -> Result<SuperPolynomial> {
    let mut out = SuperPolynomial::zero();
    let odd_rule = rule.parity().is_odd();
    for (m, c) in p.terms() {
        // Even factors first: everything to their left is even, so the image
        // can be pulled to the front at no sign cost.
        for (s, k) in m.even_part() {
            let img = rule.image(s)?;
            if img.is_zero() {
                continue;
            }
            let rest = m.without_one(s);
            let term = img.mul_poly(&SuperPolynomial::monomial(rest, c * rat_int(*k as i64)));
            out = out + term;
        }
        // Odd factors pick up (-1)^{|delta| * (number of odd symbols passed)}.
        for j in 0..m.odd_part().len() {
            let (prefix, s, suffix) = m.split_odd(j);
            let img = rule.image(&s)?;
            if img.is_zero() {
                continue;
            }
            let mut coeff = c.clone();
            if odd_rule && j % 2 == 1 {
                coeff = -coeff;
            }
            let term = SuperPolynomial::monomial(prefix, coeff)
                .mul_poly(&img)
                .mul_poly(&SuperPolynomial::monomial(suffix, Rat::from_integer(1.into())));
            out = out + term;
        }
    }
    Ok(out)
}

/// The superderivation D = d_theta + theta d_x: D(x) = theta, D(theta) = 1,
/// D kills all time variables and shifts jets by one derivative.
struct DRule;

impl DerivationRule for DRule {
    fn parity(&self) -> Parity {
        Parity::Odd
    }
    fn image(&self, s: &SymbolId) -> Result<SuperPolynomial> {
        Ok(match s {
            SymbolId::X => SuperPolynomial::symbol(SymbolId::Theta),
            SymbolId::Theta => SuperPolynomial::one(),
            SymbolId::EvenTime(_)
            | SymbolId::OddTime(_)
            | SymbolId::HatEvenTime(_)
            | SymbolId::HatOddTime(_) => SuperPolynomial::zero(),
            SymbolId::Jet(j) => SuperPolynomial::symbol(SymbolId::Jet(Jet::new(
                j.family,
                j.index,
                j.d + 1,
            ))),
        })
    }
}

pub fn apply_d(p: &SuperPolynomial) -> SuperPolynomial {
    derive(p, &DRule).expect("D is total")
}

pub fn apply_d_n(p: &SuperPolynomial, n: u32) -> SuperPolynomial {
    let mut q = p.clone();
    for _ in 0..n {
        q = apply_d(&q);
    }
    q
}

/// The even derivation d_x = D^2.
pub fn apply_partial(p: &SuperPolynomial) -> SuperPolynomial {
    apply_d(&apply_d(p))
}

/// Partial derivative with respect to an explicit time symbol. Jets carry no
/// explicit time dependence, so the image of every other generator is zero.
struct TimePartial {
    t: SymbolId,
}

impl DerivationRule for TimePartial {
    fn parity(&self) -> Parity {
        self.t.parity()
    }
    fn image(&self, s: &SymbolId) -> Result<SuperPolynomial> {
        Ok(if s == &self.t {
            SuperPolynomial::one()
        } else {
            SuperPolynomial::zero()
        })
    }
}

/// d/dt_m (explicit dependence only). Errors on a malformed subscript.
pub fn time_partial(p: &SuperPolynomial, m: u32, hat: bool) -> Result<SuperPolynomial> {
    let t = SymbolId::time(m, hat)?;
    derive(p, &TimePartial { t })
}

/// A hierarchy flow acting on the coefficient ring: an evolutionary part
/// assigning values to base jets (prolonged to derivative jets so that the
/// rule graded-commutes with D) plus explicit time-translation terms
/// `sum c_j d/dt_{m_j}` for operators carrying explicit time dependence.
#[derive(Clone)]
pub struct FlowRule {
    pub parity: Parity,
    jets: BTreeMap<(JetFamily, i32), SuperPolynomial>,
    times: Vec<(SuperPolynomial, u32, bool)>,
    /// When false, a jet family with no assignment derives to zero instead of
    /// erroring. Used by flows that act on one sector only.
    pub strict: bool,
}

impl FlowRule {
    pub fn new(parity: Parity) -> FlowRule {
        FlowRule { parity, jets: BTreeMap::new(), times: Vec::new(), strict: true }
    }

    pub fn assign_jet(&mut self, family: JetFamily, index: i32, value: SuperPolynomial) {
        self.jets.insert((family, index), value);
    }

    /// Adds a term `coeff * d/dt_m`. The combined parity of every term must
    /// equal the rule parity.
    pub fn add_time_term(&mut self, coeff: SuperPolynomial, m: u32, hat: bool) {
        self.times.push((coeff, m, hat));
    }

    pub fn jet_assignment(&self, family: JetFamily, index: i32) -> Option<&SuperPolynomial> {
        self.jets.get(&(family, index))
    }

    /// Value of the prolonged assignment on `Jet(family, index, d)`:
    /// `(-1)^{d |delta|} D^d(base)`, which makes the rule graded-commute
    /// with D (forced by the Leibniz rule at operator level).
    fn prolonged(&self, j: &Jet) -> Result<Option<SuperPolynomial>> {
        match self.jets.get(&(j.family, j.index)) {
            None => {
                if self.strict {
                    Err(CoreError::UnassignedJet(format!("{}", SymbolId::Jet(*j))))
                } else {
                    Ok(None)
                }
            }
            Some(base) => {
                let mut v = apply_d_n(base, j.d);
                if self.parity.is_odd() && j.d % 2 == 1 {
                    v = -v;
                }
                Ok(Some(v))
            }
        }
    }

    /// Applies the full flow derivation to a polynomial.
    pub fn apply(&self, p: &SuperPolynomial) -> Result<SuperPolynomial> {
        struct JetPart<'a>(&'a FlowRule);
        impl<'a> DerivationRule for JetPart<'a> {
            fn parity(&self) -> Parity {
                self.0.parity
            }
            fn image(&self, s: &SymbolId) -> Result<SuperPolynomial> {
                match s {
                    SymbolId::Jet(j) => Ok(self.0.prolonged(j)?.unwrap_or_else(SuperPolynomial::zero)),
                    _ => Ok(SuperPolynomial::zero()),
                }
            }
        }
        let mut out = derive(p, &JetPart(self))?;
        for (coeff, m, hat) in &self.times {
            // coeff * d/dt is a derivation of parity |coeff| + |t|; that must
            // match the flow parity for the graded Leibniz bookkeeping.
            let t = SymbolId::time(*m, *hat)?;
            let part_parity = match coeff.parity() {
                Some(p) => p.add(t.parity()),
                None if coeff.is_zero() => continue,
                None => {
                    return Err(CoreError::Parity(
                        "time term coefficient must be parity homogeneous".into(),
                    ))
                }
            };
            if part_parity != self.parity {
                return Err(CoreError::Parity(format!(
                    "time term d/dt{m} has parity {part_parity}, flow is {}",
                    self.parity
                )));
            }
            // (c * d/dt)(a) := c * (d/dt a); this is a graded derivation of
            // parity |c| + |t|. Expand the bare d/dt with its own parity and
            // multiply by the coefficient afterwards.
            let d = derive(p, &TimePartial { t })?;
            out = out + coeff.mul_poly(&d);
        }
        Ok(out)
    }
}

/// Spec-level entry point: the unique graded derivation extending a base-jet
/// assignment map (plus optional time terms), applied to `p`.
pub fn evolutionary_derive(p: &SuperPolynomial, rule: &FlowRule) -> Result<SuperPolynomial> {
    rule.apply(p)
}

#[allow(dead_code)]
fn is_zero_rat(r: &Rat) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::poly::rat;

    fn sym(s: SymbolId) -> SuperPolynomial {
        SuperPolynomial::symbol(s)
    }
    fn jet(f: JetFamily, i: i32, d: u32) -> SymbolId {
        SymbolId::Jet(Jet::new(f, i, d))
    }

    #[test]
    fn d_of_x_is_theta_and_d_squared_is_partial() {
        assert_eq!(apply_d(&sym(SymbolId::X)), sym(SymbolId::Theta));
        assert_eq!(apply_d(&apply_d(&sym(SymbolId::X))), SuperPolynomial::one());
        // d_x on jets shifts by two
        let u10 = sym(jet(JetFamily::U, 1, 0));
        assert_eq!(apply_partial(&u10), sym(jet(JetFamily::U, 1, 2)));
    }

    #[test]
    fn d_on_theta_times_odd_jet() {
        // D(theta * u1^(0)) = u1^(0) - theta * u1^(1)  (|u1| odd)
        let p = sym(SymbolId::Theta).mul_poly(&sym(jet(JetFamily::U, 1, 0)));
        let expect = sym(jet(JetFamily::U, 1, 0))
            - sym(SymbolId::Theta).mul_poly(&sym(jet(JetFamily::U, 1, 1)));
        assert_eq!(apply_d(&p), expect);
    }

    #[test]
    fn time_partial_examples() {
        // d/dt2 (t2 x) = x
        let p = sym(SymbolId::EvenTime(2)).mul_poly(&sym(SymbolId::X));
        assert_eq!(time_partial(&p, 2, false).unwrap(), sym(SymbolId::X));
        // d/dt7 (t3 t7) = -t3 (odd derivation passes one odd symbol)
        let p = sym(SymbolId::OddTime(3)).mul_poly(&sym(SymbolId::OddTime(7)));
        assert_eq!(time_partial(&p, 7, false).unwrap(), -sym(SymbolId::OddTime(3)));
        // jets carry no explicit time dependence
        let u = sym(jet(JetFamily::U, 1, 0));
        assert!(time_partial(&u, 2, false).unwrap().is_zero());
        assert!(time_partial(&u, 5, false).is_err());
    }

    #[test]
    fn evolutionary_prolongation_of_zero() {
        let mut rule = FlowRule::new(Parity::Even);
        rule.assign_jet(JetFamily::A, 1, SuperPolynomial::zero());
        let p = sym(jet(JetFamily::A, 1, 2));
        assert!(rule.apply(&p).unwrap().is_zero());
    }

    #[test]
    fn evolutionary_odd_rule_with_sign() {
        // rule a1 -> a1^(1) has odd parity (|a1| odd, image even).
        // delta(a1^(0) a1^(1)) = (a1^(1))^2 + a1^(0) a1^(2):
        //   Leibniz second term: (-1)^{|d||a1|} a1 * delta(a1^(1)),
        //   delta(a1^(1)) = (-1)^{1*1} D(a1^(1)) = -a1^(2).
        let mut rule = FlowRule::new(Parity::Odd);
        rule.assign_jet(JetFamily::A, 1, sym(jet(JetFamily::A, 1, 1)));
        let p = sym(jet(JetFamily::A, 1, 0)).mul_poly(&sym(jet(JetFamily::A, 1, 1)));
        let got = rule.apply(&p).unwrap();
        let expect = sym(jet(JetFamily::A, 1, 1)).mul_poly(&sym(jet(JetFamily::A, 1, 1)))
            + sym(jet(JetFamily::A, 1, 0)).mul_poly(&sym(jet(JetFamily::A, 1, 2)));
        assert_eq!(got, expect);
    }

    #[test]
    fn unassigned_jet_errors() {
        let rule = FlowRule::new(Parity::Even);
        let p = sym(jet(JetFamily::A, 1, 0));
        assert!(rule.apply(&p).is_err());
    }

    #[test]
    fn even_rule_preserves_parity() {
        let mut rule = FlowRule::new(Parity::Even);
        rule.assign_jet(
            JetFamily::A,
            1,
            sym(jet(JetFamily::A, 1, 2)).scaled(&rat(3, 2)),
        );
        let p = sym(jet(JetFamily::A, 1, 0)).mul_poly(&sym(SymbolId::Theta));
        let q = rule.apply(&p).unwrap();
        assert_eq!(q.parity(), Some(Parity::Even));
    }
}
