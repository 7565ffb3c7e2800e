use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{CoreError, Result};

use super::derivation::apply_d_n;
use super::poly::SuperPolynomial;
use super::symbol::{Jet, SymbolId};

/// A triangular substitution set resolving constraints on dressing jets.
///
/// Each entry pins a base jet `f_i^(d0)` to a polynomial; every deeper
/// derivative `f_i^(d)`, `d >= d0`, is rewritten to `D^(d-d0)` of the stored
/// value. Entries are normalized on insertion so stored right-hand sides do
/// not themselves mention substitutable jets; application is then a bounded
/// rewrite-to-fixpoint (prolonged values may reintroduce lower-derivative
/// substitutable jets, which strictly decreases along the rewrite).
#[derive(Clone, Debug, Default)]
pub struct ConstraintSet {
    base: BTreeMap<(crate::superalgebra::JetFamily, i32), (u32, SuperPolynomial)>,
    /// Optional jet-degree cap used when normalizing self-referential
    /// entries; the fixpoint then lives in the degree-capped quotient.
    pub deg_cap: Option<u32>,
}

impl ConstraintSet {
    pub fn new(deg_cap: Option<u32>) -> ConstraintSet {
        ConstraintSet { base: BTreeMap::new(), deg_cap }
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Jet, &SuperPolynomial)> {
        self.base
            .iter()
            .map(|((f, i), (d0, v))| (Jet::new(*f, *i, *d0), v))
    }

    fn entry_for(&self, j: &Jet) -> Option<(u32, &SuperPolynomial)> {
        self.base
            .get(&(j.family, j.index))
            .filter(|(d0, _)| *d0 <= j.d)
            .map(|(d0, v)| (*d0, v))
    }

    /// Adds `jet := value`, normalizing the value through the current set.
    /// A self-referential value (the jet occurs in its own right side inside
    /// higher-degree monomials) is resolved by degree-raising iteration and
    /// requires a degree cap.
    pub fn insert(&mut self, jet: Jet, value: SuperPolynomial) -> Result<()> {
        if let Some((d0, _)) = self.base.get(&(jet.family, jet.index)) {
            if *d0 <= jet.d {
                return Err(CoreError::Inconsistent(format!(
                    "jet {} already constrained at derivative {d0}",
                    SymbolId::Jet(jet)
                )));
            }
        }
        let mut v = self.apply(&value)?;
        let target = SymbolId::Jet(jet);
        if v.mentions(&target) || mentions_deeper(&v, &jet) {
            let cap = self.deg_cap.ok_or_else(|| {
                CoreError::DegreeCapRequired(format!(
                    "self-referential constraint on {target} needs a jet-degree cap"
                ))
            })?;
            // Each pass substitutes the candidate into itself; occurrences sit
            // in monomials of jet degree >= 2, so the unresolved part gains
            // degree every pass and dies at the cap.
            for _ in 0..=cap {
                let vv = substitute_single(&v, &jet, &v)?.truncate_degree(Some(cap));
                if vv == v {
                    break;
                }
                v = vv;
            }
            if v.mentions(&target) || mentions_deeper(&v, &jet) {
                return Err(CoreError::Inconsistent(format!(
                    "constraint on {target} did not resolve under degree cap"
                )));
            }
        }
        self.base.insert((jet.family, jet.index), (jet.d, v));
        Ok(())
    }

    /// Rewrites a polynomial to its normal form modulo the constraints.
    pub fn apply(&self, p: &SuperPolynomial) -> Result<SuperPolynomial> {
        if self.base.is_empty() {
            return Ok(p.truncate_degree(self.deg_cap));
        }
        let mut q = p.truncate_degree(self.deg_cap);
        // Derivative counts strictly decrease along rewrites, so this
        // terminates; the loop bound is a safety margin.
        for _ in 0..10_000 {
            let subs: Vec<(Jet, SuperPolynomial)> = q
                .symbols()
                .filter_map(|s| match s {
                    SymbolId::Jet(j) => self.entry_for(&j).map(|(d0, v)| {
                        (j, apply_d_n(v, j.d - d0))
                    }),
                    _ => None,
                })
                .collect();
            if subs.is_empty() {
                return Ok(q);
            }
            let map: BTreeMap<SymbolId, SuperPolynomial> = subs
                .into_iter()
                .map(|(j, v)| (SymbolId::Jet(j), v))
                .collect();
            q = q.substitute(&|s: &SymbolId| map.get(s).cloned())?;
            q = q.truncate_degree(self.deg_cap);
        }
        Err(CoreError::Inconsistent(
            "constraint rewriting did not reach a fixpoint".into(),
        ))
    }

    /// Merges another set into this one (re-normalizing both sides).
    pub fn merge(&mut self, other: &ConstraintSet) -> Result<()> {
        for (j, v) in other.entries() {
            self.insert(j, v.clone())?;
        }
        Ok(())
    }
}

fn mentions_deeper(p: &SuperPolynomial, jet: &Jet) -> bool {
    p.symbols().any(|s| match s {
        SymbolId::Jet(j) => j.family == jet.family && j.index == jet.index && j.d >= jet.d,
        _ => false,
    })
}

fn substitute_single(
    p: &SuperPolynomial,
    jet: &Jet,
    value: &SuperPolynomial,
) -> Result<SuperPolynomial> {
    p.substitute(&|s: &SymbolId| match s {
        SymbolId::Jet(j) if j.family == jet.family && j.index == jet.index && j.d >= jet.d => {
            Some(apply_d_n(value, j.d - jet.d))
        }
        _ => None,
    })
}

/// Searches a relation `rel = 0` for a jet that occurs linearly with a
/// rational coefficient, ranked by (index + d, index) descending; returns
/// the jet and the solved right-hand side `-(rel - c*jet)/c`.
///
/// The right side may still mention the jet inside higher-degree monomials;
/// `ConstraintSet::insert` resolves that under a degree cap.
pub fn solve_relation_for_jet(rel: &SuperPolynomial) -> Option<(Jet, SuperPolynomial)> {
    let mut candidates: Vec<Jet> = rel
        .symbols()
        .filter_map(|s| match s {
            SymbolId::Jet(j) => {
                if rel.linear_coefficient(&s).is_zero() {
                    None
                } else {
                    Some(j)
                }
            }
            _ => None,
        })
        .collect();
    candidates.sort_by_key(|j| {
        (
            -(j.index as i64 + j.d as i64),
            -(j.index as i64),
            j.family,
        )
    });
    let jet = *candidates.first()?;
    let s = SymbolId::Jet(jet);
    let c = rel.linear_coefficient(&s);
    let linear = SuperPolynomial::monomial(super::monomial::Monomial::symbol(s), c.clone());
    let rest = rel.clone() - linear;
    let rhs = rest.scaled(&(-c.recip()));
    Some((jet, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::symbol::JetFamily;
    use crate::superalgebra::SuperPolynomial as P;

    fn jet_sym(f: JetFamily, i: i32, d: u32) -> SymbolId {
        SymbolId::jet(f, i, d)
    }

    #[test]
    fn prolonged_substitution_and_idempotence() {
        // a1^(2) := a1 a1^(1); then a1^(3) rewrites to (a1^(1))^2 after
        // resubstitution (a1 a1^(2) -> a1 a1 a1^(1) = 0).
        let mut cs = ConstraintSet::new(None);
        let rhs = P::symbol(jet_sym(JetFamily::A, 1, 0))
            .mul_poly(&P::symbol(jet_sym(JetFamily::A, 1, 1)));
        cs.insert(Jet::new(JetFamily::A, 1, 2), rhs).unwrap();

        let p = P::symbol(jet_sym(JetFamily::A, 1, 3));
        let q = cs.apply(&p).unwrap();
        let expect = P::symbol(jet_sym(JetFamily::A, 1, 1))
            .mul_poly(&P::symbol(jet_sym(JetFamily::A, 1, 1)));
        assert_eq!(q, expect);
        // idempotent
        assert_eq!(cs.apply(&q).unwrap(), q);
    }

    #[test]
    fn solve_picks_highest_jet() {
        // rel = 2*a3 + a1^(2) + a1*a1^(1): solves for a3 (index+d tie broken
        // by index).
        let rel = P::symbol(jet_sym(JetFamily::A, 3, 0)).scaled(&crate::superalgebra::poly::rat_int(2))
            + P::symbol(jet_sym(JetFamily::A, 1, 2))
            + P::symbol(jet_sym(JetFamily::A, 1, 0))
                .mul_poly(&P::symbol(jet_sym(JetFamily::A, 1, 1)));
        let (j, rhs) = solve_relation_for_jet(&rel).unwrap();
        assert_eq!(j, Jet::new(JetFamily::A, 3, 0));
        assert!(!rhs.mentions(&jet_sym(JetFamily::A, 3, 0)));
    }
}
