//! n-th roots of super-pseudodifferential operators.
//!
//! The exponent is factored as `n = 2^a * m` with `m` odd and the root is
//! taken as a chain of square roots followed by one odd-order root. Each
//! stage runs a descending Gauss-Seidel sweep: the top order of the residual
//! `A - R^k` is cancelled by a new coefficient of R, found by probing the
//! linearized channel with a fresh symbol. For square roots with an odd
//! leading D-power the odd-parity coefficients enter only through their
//! D-derivative, so the sweep takes an exact jet antiderivative there; the
//! parity grading of the root leaves no room for integration constants,
//! which makes the result unique.

use num_traits::Zero;

use crate::error::{CoreError, Result};
use crate::superalgebra::{d_preimage, JetFamily, Parity, SuperPolynomial, SymbolId};

use super::{Bound, OpCtx, SuperPsiDO, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootSide {
    Lower,
    Hat,
}

/// Extracts R with `R^n = a`, exact within the returned window. `Lower`
/// expects a `D^n`-led operator with descending tail; `Hat` a `D^{-n}`-led
/// one whose tail has positive jet degree.
pub fn nth_root(a: &SuperPsiDO, n: u32, side: RootSide, ctx: &OpCtx) -> Result<SuperPsiDO> {
    if n == 0 {
        return Err(CoreError::Inconsistent("root exponent must be positive".into()));
    }
    let sign: i64 = match side {
        RootSide::Lower => 1,
        RootSide::Hat => -1,
    };
    let mut exponent = n as i64;
    let mut cur_lead = sign * n as i64;
    check_leading(a, cur_lead)?;

    let mut current = a.clone();
    while exponent % 2 == 0 {
        exponent /= 2;
        cur_lead /= 2;
        current = root_stage(&current, 2, cur_lead, ctx)?;
    }
    if exponent > 1 {
        cur_lead /= exponent;
        current = root_stage(&current, exponent as u32, cur_lead, ctx)?;
    }
    Ok(current)
}

/// The degree-zero slice must be exactly D^{top}; jet-degree >= 1 tails may
/// sit anywhere (hat-side operators carry them above the leading order).
fn check_leading(a: &SuperPsiDO, top: i64) -> Result<()> {
    for (k, c) in a.orders() {
        let deg0: Vec<_> = c.terms().filter(|(m, _)| m.jet_degree() == 0).collect();
        let ok = if *k == top {
            deg0.len() == 1
                && deg0[0].0.is_one()
                && *deg0[0].1 == num_traits::One::one()
        } else {
            deg0.is_empty()
        };
        if !ok {
            return Err(CoreError::Root {
                order: *k,
                degree: 0,
                msg: format!("shape mismatch: degree-0 part is not D^{top}"),
            });
        }
    }
    if a.coeff(top).constant_part().is_zero() {
        return Err(CoreError::Root {
            order: top,
            degree: 0,
            msg: format!("shape mismatch: degree-0 part is not D^{top}"),
        });
    }
    Ok(())
}

/// One stage: R with R^k = a, where R is led by D^lead.
fn root_stage(a: &SuperPsiDO, k: u32, lead: i64, ctx: &OpCtx) -> Result<SuperPsiDO> {
    check_leading(a, lead * k as i64)?;
    let deg = super::min_deg(a.window().deg, ctx.deg_cap);
    let mut root = SuperPsiDO::d_power(lead).restricted(&Window::all().with_deg(deg));
    // Descending sweep. Each new coefficient kills the residual's current
    // top order; corrections perturb the same order only at strictly higher
    // jet degree, and lower orders otherwise.
    let max_outer = 8 * (lead.abs() as usize * k as usize + 64);
    let mut guard = 0usize;
    let mut last_state: Option<(i64, SuperPolynomial)> = None;
    loop {
        guard += 1;
        if guard > max_outer * 64 {
            return Err(CoreError::Root {
                order: ctx.keep_lo,
                degree: 0,
                msg: "root sweep did not terminate".into(),
            });
        }
        let power = root.power(k, ctx);
        let resid = a.sub(&power);
        if let Some(e) = top_nonzero(&resid, ctx.keep_lo) {
            let c = resid.coeff(e);
            if last_state.as_ref() == Some(&(e, c.clone())) {
                return Err(CoreError::Root {
                    order: e,
                    degree: 0,
                    msg: "sweep made no progress (dead channel)".into(),
                });
            }
            last_state = Some((e, c));
        }
        let Some(e) = top_nonzero(&resid, ctx.keep_lo) else {
            // Coefficients at slot j were pinned by residual orders
            // j + lead (k-1) >= resid.lo, so the root is certified that far.
            let lo = match resid.window().lo {
                Bound::Fin(l) => Bound::Fin(l - lead * (k as i64 - 1)),
                b => b,
            };
            return Ok(root.restricted(&Window { lo, hi: Bound::PosInf, deg }));
        };
        let part = resid.coeff(e);
        let correction = cancel_at(&root, &part, e, lead, k, ctx)?;
        root = root.add(&correction);
    }
}

fn top_nonzero(op: &SuperPsiDO, floor: i64) -> Option<i64> {
    op.orders()
        .filter(|(k, c)| **k >= floor && !c.is_zero() && op.window().contains(**k))
        .map(|(k, _)| *k)
        .max()
}

/// Finds a single-term correction `x D^j` cancelling the residual's leading
/// monomials at order `e` against the current root.
fn cancel_at(
    root: &SuperPsiDO,
    part: &SuperPolynomial,
    e: i64,
    lead: i64,
    k: u32,
    ctx: &OpCtx,
) -> Result<SuperPsiDO> {
    let (even, odd) = part.split_parity();
    let mut out = SuperPsiDO::zero().restricted(&root.window());
    for target in [even, odd] {
        if target.is_zero() {
            continue;
        }
        let p = target.parity().expect("homogeneous by split");
        let j0 = e - lead * (k as i64 - 1);
        // Direct channel at slot j0.
        let slot_parity = coefficient_parity(root, j0);
        if slot_parity == p {
            let alpha = probe(root, j0, p, e, 0, k, ctx);
            if !alpha.is_zero() {
                out = out.add(&SuperPsiDO::term(j0, target.scaled(&alpha.recip())));
                continue;
            }
        }
        // Derivative channel at slot j0 + 1.
        let q = p.flip();
        let alpha = probe(root, j0 + 1, q, e, 1, k, ctx);
        if alpha.is_zero() {
            return Err(CoreError::Root {
                order: e,
                degree: 0,
                msg: "no solve channel at this order".into(),
            });
        }
        let scaled = target.scaled(&alpha.recip());
        let y = d_preimage(&scaled).ok_or_else(|| CoreError::Root {
            order: e,
            degree: 0,
            msg: "residual is not a jet D-image; no polynomial root".into(),
        })?;
        let (ye, yo) = y.split_parity();
        let y = if q == Parity::Even { ye } else { yo };
        out = out.add(&SuperPsiDO::term(j0 + 1, y));
    }
    if out.is_zero_stored() {
        return Err(CoreError::Root {
            order: e,
            degree: 0,
            msg: "dead channels (parity obstruction)".into(),
        });
    }
    Ok(out)
}

/// Parity a coefficient at order `j` must carry for the root to stay parity
/// homogeneous: |R| + j with |R| = lead mod 2.
fn coefficient_parity(root: &SuperPsiDO, j: i64) -> Parity {
    let r = root.parity().unwrap_or(Parity::Even);
    r.add(Parity::of_int(j))
}

/// Coefficient of `w^{(d)}`'s bare monomial in the residual channel at
/// order `e` when a fresh symbol `w` of parity `q` is inserted at slot `j`:
/// expands `(R + wD^j)^k - R^k` and reads the linear scalar term.
fn probe(
    root: &SuperPsiDO,
    j: i64,
    q: Parity,
    e: i64,
    d: u32,
    k: u32,
    ctx: &OpCtx,
) -> crate::superalgebra::Rat {
    let w = SymbolId::jet(JetFamily::Tmp(q), 0, 0);
    let probe_op = root.add(&SuperPsiDO::term(j, SuperPolynomial::symbol(w)));
    let image = probe_op.power(k, ctx).sub(&root.power(k, ctx));
    let target = SymbolId::jet(JetFamily::Tmp(q), 0, d);
    image.coeff(e).linear_coefficient(&target)
}
