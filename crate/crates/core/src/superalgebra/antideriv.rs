use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::derivation::apply_d;
use super::monomial::Monomial;
use super::poly::{Rat, SuperPolynomial};
use super::symbol::{Jet, SymbolId};

/// Solves `D(x) = g` for a polynomial `x`, if one exists.
///
/// Candidate monomials are produced by formally un-deriving the target's
/// monomials (lowering a jet derivative, trading theta for x, or adjoining a
/// theta factor), expanding the pool a few times to absorb cross terms, and
/// the coefficients are then fixed by exact Gaussian elimination. Returns a
/// particular solution with free directions set to zero, or `None` when `g`
/// is not a D-image of the candidate span.
pub fn d_preimage(g: &SuperPolynomial) -> Option<SuperPolynomial> {
    if g.is_zero() {
        return Some(SuperPolynomial::zero());
    }
    let mut candidates: BTreeSet<Monomial> = BTreeSet::new();
    let mut frontier: BTreeSet<Monomial> = g.terms().map(|(m, _)| m.clone()).collect();
    for _ in 0..4 {
        let mut new_frontier = BTreeSet::new();
        for m in &frontier {
            for c in underive_candidates(m) {
                if candidates.insert(c.clone()) {
                    // Monomials D(c) produces beyond the current targets may
                    // themselves need cancelling; feed them back once.
                    let dc = apply_d(&SuperPolynomial::monomial(c, Rat::from_integer(1.into())));
                    for (mm, _) in dc.terms() {
                        new_frontier.insert(mm.clone());
                    }
                }
            }
        }
        if new_frontier.is_subset(&frontier) {
            break;
        }
        frontier.extend(new_frontier);
    }
    if candidates.is_empty() {
        return None;
    }

    let cols: Vec<Monomial> = candidates.into_iter().collect();
    let images: Vec<SuperPolynomial> = cols
        .iter()
        .map(|m| apply_d(&SuperPolynomial::monomial(m.clone(), Rat::from_integer(1.into()))))
        .collect();

    let mut row_index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for img in &images {
        for (m, _) in img.terms() {
            let next = row_index.len();
            row_index.entry(m.clone()).or_insert(next);
        }
    }
    for (m, _) in g.terms() {
        if !row_index.contains_key(m) {
            return None; // no candidate produces this monomial at all
        }
    }

    let nrows = row_index.len();
    let ncols = cols.len();
    let mut a = vec![vec![Rat::zero(); ncols + 1]; nrows];
    for (j, img) in images.iter().enumerate() {
        for (m, c) in img.terms() {
            a[row_index[m]][j] = c.clone();
        }
    }
    for (m, c) in g.terms() {
        a[row_index[m]][ncols] = c.clone();
    }

    let solution = gaussian_solve(&mut a, ncols)?;
    let mut out = SuperPolynomial::zero();
    for (j, c) in solution.into_iter().enumerate() {
        if !c.is_zero() {
            out.add_term(cols[j].clone(), c);
        }
    }
    debug_assert_eq!(&apply_d(&out), g);
    Some(out)
}

/// Monomials nu such that D(nu) can contain mu.
fn underive_candidates(mu: &Monomial) -> Vec<Monomial> {
    let mut out = Vec::new();
    // Lower one jet derivative.
    for s in mu.symbols() {
        if let SymbolId::Jet(j) = s {
            if j.d >= 1 {
                let lowered = SymbolId::Jet(Jet::new(j.family, j.index, j.d - 1));
                if let Some((_, m)) =
                    mu.without_one(&s).mul(&Monomial::symbol(lowered))
                {
                    out.push(m);
                }
            }
        }
    }
    // theta -> x (from D(x) = theta).
    if mu.contains(&SymbolId::Theta) {
        if let Some((_, m)) = mu
            .without_one(&SymbolId::Theta)
            .mul(&Monomial::symbol(SymbolId::X))
        {
            out.push(m);
        }
    }
    // adjoin theta (from D(theta) = 1).
    if let Some((_, m)) = mu.mul(&Monomial::symbol(SymbolId::Theta)) {
        out.push(m);
    }
    out
}

/// Row-reduces `[A | b]` and returns a particular solution of `A x = b`
/// (free variables zero), or `None` when inconsistent.
fn gaussian_solve(a: &mut [Vec<Rat>], ncols: usize) -> Option<Vec<Rat>> {
    let nrows = a.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut row = 0usize;
    for col in 0..ncols {
        let Some(pr) = (row..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let inv = a[row][col].clone().recip();
        for c in col..=ncols {
            a[row][c] = &a[row][c] * &inv;
        }
        for r in 0..nrows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=ncols {
                    let delta = &f * &a[row][c];
                    a[r][c] = &a[r][c] - &delta;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == nrows {
            break;
        }
    }
    // Inconsistent if a zero row has a nonzero rhs.
    for r in 0..nrows {
        if a[r][..ncols].iter().all(|c| c.is_zero()) && !a[r][ncols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); ncols];
    for col in 0..ncols {
        if let Some(r) = pivot_of_col[col] {
            x[col] = a[r][ncols].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::symbol::JetFamily;

    fn sym(s: SymbolId) -> SuperPolynomial {
        SuperPolynomial::symbol(s)
    }

    #[test]
    fn preimage_of_theta_is_x() {
        let x = d_preimage(&sym(SymbolId::Theta)).unwrap();
        assert_eq!(apply_d(&x), sym(SymbolId::Theta));
    }

    #[test]
    fn preimage_roundtrip_random_shapes() {
        // x = theta * a1^(1) + x^2: check D-preimage of D(x).
        let p = sym(SymbolId::Theta).mul_poly(&sym(SymbolId::jet(JetFamily::A, 1, 1)))
            + sym(SymbolId::X).mul_poly(&sym(SymbolId::X));
        let g = apply_d(&p);
        let q = d_preimage(&g).unwrap();
        assert_eq!(apply_d(&q), g);
    }

    #[test]
    fn constants_are_images_of_theta() {
        let y = d_preimage(&SuperPolynomial::one()).unwrap();
        assert_eq!(apply_d(&y), SuperPolynomial::one());
    }

    #[test]
    fn non_image_returns_none() {
        // a bare base jet has no polynomial D-antiderivative: the theta
        // ladder never closes
        let u = sym(SymbolId::jet(JetFamily::U, 1, 0));
        assert!(d_preimage(&u).is_none());
    }
}
