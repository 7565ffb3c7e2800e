//! The operator ring: formal series `sum_i f_i D^i` with window-tracked
//! truncation.
//!
//! Composition follows the super Leibniz rule
//! `D^n f = sum_i [n choose n-i] (-1)^{|f|(n-i)} f^{[i]} D^{n-i}` for n >= 0,
//! with the super binomial
//! `[n over m] = binom(floor(n/2), floor(m/2))`, zero when `n-m < 0` or
//! `(n, n-m) = (0, 1) mod 2`. Negative powers are pushed through the
//! recursion `D^{-1} f = (-1)^{|f|} (f D^{-1} - D^{-1} f^{[1]} D^{-1})`,
//! which descends without end; the window keeps track of where the stored
//! coefficients are still exact.
//!
//! A window `[lo, hi]` (with infinite ends allowed) means: coefficients of
//! orders inside the band equal the stored ones exactly, coefficients outside
//! are unknown. An optional jet-degree cap declares that stored coefficients
//! are exact only up to that total degree in jet variables; every operation
//! propagates the cap conservatively.

mod root;

pub use root::{nth_root, RootSide};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{CoreError, Result};
use crate::superalgebra::{apply_d, rat_int, Monomial, Parity, Rat, SuperPolynomial};

/// One end of a reliability window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Fin(i64),
    PosInf,
}

impl Bound {
    pub fn fin(self) -> Option<i64> {
        match self {
            Bound::Fin(k) => Some(k),
            _ => None,
        }
    }
    fn add_fin(self, d: i64) -> Bound {
        match self {
            Bound::Fin(k) => Bound::Fin(k + d),
            b => b,
        }
    }
    fn max(self, other: Bound) -> Bound {
        use Bound::*;
        match (self, other) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, b) | (b, NegInf) => b,
            (Fin(a), Fin(b)) => Fin(a.max(b)),
        }
    }
    fn min(self, other: Bound) -> Bound {
        use Bound::*;
        match (self, other) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, b) | (b, PosInf) => b,
            (Fin(a), Fin(b)) => Fin(a.min(b)),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::Fin(k) => write!(f, "{k}"),
            Bound::PosInf => write!(f, "+inf"),
        }
    }
}

/// Reliability descriptor of a truncated operator: the contiguous band of
/// orders on which stored coefficients are exact, and an optional jet-degree
/// cap on coefficient exactness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: Bound,
    pub hi: Bound,
    pub deg: Option<u32>,
}

impl Window {
    pub fn all() -> Window {
        Window { lo: Bound::NegInf, hi: Bound::PosInf, deg: None }
    }

    pub fn above(lo: i64) -> Window {
        Window { lo: Bound::Fin(lo), hi: Bound::PosInf, deg: None }
    }

    pub fn with_deg(mut self, deg: Option<u32>) -> Window {
        self.deg = deg;
        self
    }

    pub fn contains(&self, order: i64) -> bool {
        let lo_ok = match self.lo {
            Bound::NegInf => true,
            Bound::Fin(k) => order >= k,
            Bound::PosInf => false,
        };
        let hi_ok = match self.hi {
            Bound::PosInf => true,
            Bound::Fin(k) => order <= k,
            Bound::NegInf => false,
        };
        lo_ok && hi_ok
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
            deg: min_deg(self.deg, other.deg),
        }
    }

    pub fn is_empty(&self) -> bool {
        match (self.lo, self.hi) {
            (Bound::Fin(a), Bound::Fin(b)) => a > b,
            (Bound::PosInf, _) | (_, Bound::NegInf) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)?;
        if let Some(d) = self.deg {
            write!(f, " deg<={d}")?;
        }
        Ok(())
    }
}

pub(crate) fn min_deg(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (None, d) | (d, None) => d,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Ambient computation settings threaded through operator operations:
/// the storage floor for infinite descending expansions and an optional
/// jet-degree cap imposed on results.
#[derive(Debug, Clone, Copy)]
pub struct OpCtx {
    pub keep_lo: i64,
    pub deg_cap: Option<u32>,
}

impl OpCtx {
    pub fn new(keep_lo: i64) -> OpCtx {
        OpCtx { keep_lo, deg_cap: None }
    }
    pub fn with_deg(keep_lo: i64, deg_cap: Option<u32>) -> OpCtx {
        OpCtx { keep_lo, deg_cap }
    }
}

/// A truncated super-pseudodifferential operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperPsiDO {
    coeffs: BTreeMap<i64, SuperPolynomial>,
    window: Window,
}

/// The super binomial bracket `[n over m]` of the composition rule, for
/// n >= 0. Zero when `n - m < 0` or `(n, n-m) = (0, 1) mod 2`, otherwise
/// `binom(floor(n/2), floor(m/2))`.
pub fn super_binomial(n: i64, m: i64) -> BigInt {
    assert!(n >= 0, "super_binomial needs n >= 0");
    let i = n - m;
    if i < 0 || m < 0 {
        return BigInt::zero();
    }
    if n % 2 == 0 && i % 2 == 1 {
        return BigInt::zero();
    }
    binomial(BigInt::from(n / 2), BigInt::from(m / 2))
}

/// Normal-orders `D^n (f D^0)`: the returned list holds `(order, coeff)`
/// pairs of the expansion, plus a flag telling whether an infinite
/// descending tail was cut at `keep_lo`.
pub fn push_d_past(
    n: i64,
    f: &SuperPolynomial,
    keep_lo: i64,
) -> (Vec<(i64, SuperPolynomial)>, bool) {
    if f.is_zero() {
        return (Vec::new(), false);
    }
    if n >= 0 {
        let mut out: BTreeMap<i64, SuperPolynomial> = BTreeMap::new();
        let (even, odd) = f.split_parity();
        for (p, fp) in [(Parity::Even, even), (Parity::Odd, odd)] {
            if fp.is_zero() {
                continue;
            }
            let mut deriv = fp;
            for i in 0..=n {
                let b = super_binomial(n, n - i);
                if !b.is_zero() {
                    let mut c = deriv.scaled(&Rat::from_integer(b));
                    if p.is_odd() && (n - i) % 2 == 1 {
                        c = -c;
                    }
                    merge(&mut out, n - i, c);
                }
                if i < n {
                    deriv = apply_d(&deriv);
                }
            }
        }
        return (out.into_iter().filter(|(_, c)| !c.is_zero()).collect(), false);
    }

    // n < 0: peel D^{-1} one at a time via
    // D^{-1} g = (-1)^{|g|} (g D^{-1} - D^{-1} g^{[1]} D^{-1}).
    // With a running multiplier m (starting at +1) the s-th emitted term is
    // m (-1)^{|g^{[s]}|} g^{[s]} at order k-1-s, and m flips to
    // -m (-1)^{|g^{[s]}|} before the next step.
    let mut terms: Vec<(i64, SuperPolynomial)> = vec![(0, f.clone())];
    let mut truncated = false;
    for _ in 0..(-n) {
        let mut next: BTreeMap<i64, SuperPolynomial> = BTreeMap::new();
        for (k, g) in terms {
            let (even, odd) = g.split_parity();
            for (p, gp) in [(Parity::Even, even), (Parity::Odd, odd)] {
                if gp.is_zero() {
                    continue;
                }
                let mut cur = gp;
                let mut cur_parity = p;
                let mut negate = false;
                let mut ord = k - 1;
                loop {
                    let with_parity_sign = negate ^ cur_parity.is_odd();
                    merge(
                        &mut next,
                        ord,
                        if with_parity_sign { -cur.clone() } else { cur.clone() },
                    );
                    negate = !with_parity_sign;
                    let d = apply_d(&cur);
                    if d.is_zero() {
                        break;
                    }
                    if ord <= keep_lo {
                        truncated = true;
                        break;
                    }
                    cur = d;
                    cur_parity = cur_parity.flip();
                    ord -= 1;
                }
            }
        }
        terms = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    }
    (terms, truncated)
}

fn merge(map: &mut BTreeMap<i64, SuperPolynomial>, order: i64, c: SuperPolynomial) {
    if c.is_zero() {
        return;
    }
    match map.remove(&order) {
        None => {
            map.insert(order, c);
        }
        Some(prev) => {
            let s = prev + c;
            if !s.is_zero() {
                map.insert(order, s);
            }
        }
    }
}

impl SuperPsiDO {
    pub fn zero() -> SuperPsiDO {
        SuperPsiDO { coeffs: BTreeMap::new(), window: Window::all() }
    }

    pub fn one() -> SuperPsiDO {
        SuperPsiDO::d_power(0)
    }

    /// D^k, exact everywhere.
    pub fn d_power(k: i64) -> SuperPsiDO {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k, SuperPolynomial::one());
        SuperPsiDO { coeffs, window: Window::all() }
    }

    /// Multiplication operator by a coefficient (order-zero term).
    pub fn function(f: SuperPolynomial) -> SuperPsiDO {
        SuperPsiDO::term(0, f)
    }

    pub fn from_terms(terms: Vec<(i64, SuperPolynomial)>, window: Window) -> SuperPsiDO {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            if window.contains(k) {
                merge(&mut coeffs, k, c.truncate_degree(window.deg));
            }
        }
        SuperPsiDO { coeffs, window }
    }

    pub fn term(order: i64, c: SuperPolynomial) -> SuperPsiDO {
        SuperPsiDO::from_terms(vec![(order, c)], Window::all())
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn coeff(&self, order: i64) -> SuperPolynomial {
        self.coeffs.get(&order).cloned().unwrap_or_else(SuperPolynomial::zero)
    }

    pub fn orders(&self) -> impl Iterator<Item = (&i64, &SuperPolynomial)> {
        self.coeffs.iter()
    }

    pub fn is_zero_stored(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest order that can carry a nonzero coefficient: the max stored
    /// order when the window is exact above, unbounded otherwise.
    fn max_support(&self) -> Bound {
        match self.window.hi {
            Bound::PosInf => self
                .coeffs
                .keys()
                .next_back()
                .map(|k| Bound::Fin(*k))
                .unwrap_or(Bound::NegInf),
            _ => Bound::PosInf,
        }
    }

    fn min_support(&self) -> Bound {
        match self.window.lo {
            Bound::NegInf => self
                .coeffs
                .keys()
                .next()
                .map(|k| Bound::Fin(*k))
                .unwrap_or(Bound::PosInf),
            _ => Bound::NegInf,
        }
    }

    /// Restricts storage and the declared window to `[lo, hi]` intersected
    /// with the current window.
    pub fn restricted(&self, w: &Window) -> SuperPsiDO {
        let window = self.window.intersect(w);
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(k, _)| window.contains(**k))
            .map(|(k, c)| (*k, c.truncate_degree(window.deg)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        SuperPsiDO { coeffs, window }
    }

    pub fn map_coeffs<F>(&self, f: F) -> SuperPsiDO
    where
        F: Fn(&SuperPolynomial) -> SuperPolynomial,
    {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (*k, f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        SuperPsiDO { coeffs: coeffs, window: self.window }
    }

    pub fn add(&self, other: &SuperPsiDO) -> SuperPsiDO {
        let window = self.window.intersect(&other.window);
        let mut coeffs = BTreeMap::new();
        for (k, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if window.contains(*k) {
                merge(&mut coeffs, *k, c.truncate_degree(window.deg));
            }
        }
        SuperPsiDO { coeffs, window }
    }

    pub fn sub(&self, other: &SuperPsiDO) -> SuperPsiDO {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SuperPsiDO {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scaled(&self, c: &Rat) -> SuperPsiDO {
        self.map_coeffs(|f| f.scaled(c))
    }

    /// Operator parity when every stored term has |f_i| + i constant.
    pub fn parity(&self) -> Option<Parity> {
        let mut result: Option<Parity> = None;
        for (k, c) in &self.coeffs {
            let cp = c.parity()?;
            let p = cp.add(Parity::of_int(*k));
            match result {
                None => result = Some(p),
                Some(q) if q == p => {}
                _ => return None,
            }
        }
        result
    }

    /// Composition, exact inside the computed output window. The caller
    /// context caps infinite descending expansions at `ctx.keep_lo`.
    pub fn compose(&self, other: &SuperPsiDO, ctx: &OpCtx) -> SuperPsiDO {
        let deg = min_deg(min_deg(self.window.deg, other.window.deg), ctx.deg_cap);
        // Window algebra: unknown coefficients of A below its lo pollute
        // output orders <= A.lo - 1 + maxB; unknown B-low pollutes
        // <= maxA + B.lo - 1. Unknown-high tails (never produced here) would
        // pollute everything when the other side reaches below order zero.
        let mut lo = Bound::NegInf;
        if let Bound::Fin(alo) = self.window.lo {
            lo = lo.max(match other.max_support() {
                Bound::NegInf => Bound::NegInf, // other is zero
                b => b.add_fin(alo),
            });
        }
        if let Bound::Fin(blo) = other.window.lo {
            lo = lo.max(match self.max_support() {
                Bound::NegInf => Bound::NegInf,
                b => b.add_fin(blo),
            });
        }
        let mut hi = Bound::PosInf;
        if self.window.hi != Bound::PosInf {
            hi = Bound::NegInf; // unknown high tail: nothing reliable above
        }
        if other.window.hi != Bound::PosInf {
            hi = Bound::NegInf;
        }

        let mut coeffs: BTreeMap<i64, SuperPolynomial> = BTreeMap::new();
        let mut any_truncated = false;
        for (i, fi) in &self.coeffs {
            for (j, gj) in &other.coeffs {
                let (expansion, truncated) = push_d_past(*i, gj, ctx.keep_lo - *j);
                if truncated {
                    any_truncated = true;
                }
                for (s, h) in expansion {
                    let order = s + j;
                    if order < ctx.keep_lo {
                        continue;
                    }
                    let c = fi.mul_capped(&h, deg);
                    merge(&mut coeffs, order, c);
                }
            }
        }
        if any_truncated {
            lo = lo.max(Bound::Fin(ctx.keep_lo));
        }
        let window = Window { lo, hi, deg };
        SuperPsiDO {
            coeffs: coeffs
                .into_iter()
                .filter(|(k, c)| window.contains(*k) && !c.is_zero())
                .collect(),
            window,
        }
    }

    pub fn mul_function_left(&self, f: &SuperPolynomial) -> SuperPsiDO {
        self.map_coeffs(|c| f.mul_capped(c, self.window.deg))
    }

    /// A^k by iterated composition.
    pub fn power(&self, k: u32, ctx: &OpCtx) -> SuperPsiDO {
        let mut acc = SuperPsiDO::one();
        for _ in 0..k {
            acc = acc.compose(self, ctx);
        }
        acc
    }

    /// Projection onto orders >= 0 (`plus`) or < 0 (`minus`).
    pub fn project_plus(&self) -> Result<SuperPsiDO> {
        if self.window.hi != Bound::PosInf {
            return Err(CoreError::Window(
                "plus projection needs the nonnegative half inside the window".into(),
            ));
        }
        let coeffs: BTreeMap<i64, SuperPolynomial> = self
            .coeffs
            .iter()
            .filter(|(k, _)| **k >= 0)
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        match self.window.lo {
            Bound::Fin(lo) if lo > 0 => Err(CoreError::Window(format!(
                "plus projection unreliable: window starts at {lo} > 0"
            ))),
            _ => Ok(SuperPsiDO {
                coeffs,
                window: Window { lo: Bound::NegInf, hi: Bound::PosInf, deg: self.window.deg },
            }),
        }
    }

    pub fn project_minus(&self) -> Result<SuperPsiDO> {
        let coeffs: BTreeMap<i64, SuperPolynomial> = self
            .coeffs
            .iter()
            .filter(|(k, _)| **k < 0)
            .map(|(k, c)| (*k, c.clone()))
            .collect();
        if self.window.hi != Bound::PosInf {
            return Err(CoreError::Window(
                "minus projection needs the negative half inside the window".into(),
            ));
        }
        Ok(SuperPsiDO {
            coeffs,
            window: Window { lo: self.window.lo, hi: Bound::PosInf, deg: self.window.deg },
        })
    }

    /// Formal adjoint: term-wise `(f D^i)* = (-1)^{|f| i} (D^i)* f` with
    /// `(D^i)* = (-1)^{i(i+1)/2} D^i`, normal-ordered. This is the unique
    /// extension of `D* = -D`, `f* = f` satisfying the graded
    /// anti-homomorphism rule `(PQ)* = (-1)^{|P||Q|} Q* P*`.
    pub fn adjoint(&self, ctx: &OpCtx) -> SuperPsiDO {
        let deg = min_deg(self.window.deg, ctx.deg_cap);
        let mut coeffs: BTreeMap<i64, SuperPolynomial> = BTreeMap::new();
        let mut any_truncated = false;
        for (i, fi) in &self.coeffs {
            let tri_neg = (i * (i + 1) / 2).rem_euclid(2) == 1;
            let (even, odd) = fi.split_parity();
            for (p, part) in [(Parity::Even, even), (Parity::Odd, odd)] {
                if part.is_zero() {
                    continue;
                }
                let koszul_neg = p.is_odd() && i.rem_euclid(2) == 1;
                let neg = tri_neg ^ koszul_neg;
                let (expansion, truncated) = push_d_past(*i, &part, ctx.keep_lo);
                if truncated {
                    any_truncated = true;
                }
                for (s, h) in expansion {
                    if s < ctx.keep_lo {
                        continue;
                    }
                    merge(&mut coeffs, s, if neg { -h } else { h });
                }
            }
        }
        let mut lo = self.window.lo;
        if any_truncated {
            lo = lo.max(Bound::Fin(ctx.keep_lo));
        }
        let hi = if self.window.hi == Bound::PosInf { Bound::PosInf } else { Bound::NegInf };
        let window = Window { lo, hi, deg };
        SuperPsiDO {
            coeffs: coeffs
                .into_iter()
                .filter(|(k, c)| window.contains(*k) && !c.is_zero())
                .collect(),
            window,
        }
    }

    /// Supercommutator `[X, Y] = XY - (-1)^{|X||Y|} YX` of homogeneous
    /// operators.
    pub fn supercommutator(&self, other: &SuperPsiDO, ctx: &OpCtx) -> Result<SuperPsiDO> {
        let px = self.parity().ok_or_else(|| {
            CoreError::Parity("supercommutator needs homogeneous left operand".into())
        })?;
        let py = other.parity().ok_or_else(|| {
            CoreError::Parity("supercommutator needs homogeneous right operand".into())
        })?;
        let xy = self.compose(other, ctx);
        let yx = other.compose(self, ctx);
        Ok(if px.koszul_negates(py) { xy.add(&yx) } else { xy.sub(&yx) })
    }

    /// Inverse of a monic operator `1 + N` where `N` has only negative
    /// orders (lower Volterra) or only positive orders (hat side, requires a
    /// jet-degree cap since the Neumann series terminates by degree there).
    pub fn invert_monic(&self, ctx: &OpCtx) -> Result<SuperPsiDO> {
        let lead = self.coeff(0);
        if lead.constant_part() != Rat::one() || lead.num_terms() != 1 {
            return Err(CoreError::Inconsistent(
                "invert_monic expects leading term exactly 1 at order 0".into(),
            ));
        }
        let n = {
            let mut n = self.clone();
            n.coeffs.remove(&0);
            n
        };
        let lower = n.coeffs.keys().all(|k| *k < 0);
        let upper = n.coeffs.keys().all(|k| *k > 0);
        if !n.coeffs.is_empty() && !lower && !upper {
            return Err(CoreError::Inconsistent(
                "invert_monic expects a strictly one-sided tail".into(),
            ));
        }
        let deg = min_deg(self.window.deg, ctx.deg_cap);
        if upper && !n.coeffs.is_empty() {
            let min_degree = n
                .coeffs
                .values()
                .filter_map(|c| c.min_jet_degree())
                .min()
                .unwrap_or(0);
            if deg.is_none() && min_degree >= 1 {
                return Err(CoreError::DegreeCapRequired(
                    "hat-side inversion needs a jet-degree cap".into(),
                ));
            }
        }
        let ctx = OpCtx { keep_lo: ctx.keep_lo, deg_cap: deg };
        let mut acc = SuperPsiDO::one().restricted(&Window::all().with_deg(deg));
        let mut pow = SuperPsiDO::one().restricted(&Window::all().with_deg(deg));
        // Termination: lower tails sink below keep_lo, hat tails gain jet
        // degree; iterate until the running power dies.
        for _ in 0..10_000 {
            pow = pow.compose(&n, &ctx).neg();
            if pow.is_zero_stored() {
                break;
            }
            acc = acc.add(&pow);
        }
        Ok(acc)
    }

    /// Coefficient of D^{-1}.
    pub fn residue(&self) -> Result<SuperPolynomial> {
        if !self.window.contains(-1) {
            return Err(CoreError::Window(format!(
                "residue needs order -1 inside the window {}",
                self.window
            )));
        }
        Ok(self.coeff(-1))
    }

    /// Applies a purely differential operator to a coefficient-ring element.
    pub fn apply_to_function(&self, phi: &SuperPolynomial) -> Result<SuperPolynomial> {
        if self.coeffs.keys().any(|k| *k < 0) {
            return Err(CoreError::Inconsistent(
                "apply_to_function needs a differential operator (orders >= 0)".into(),
            ));
        }
        let mut out = SuperPolynomial::zero();
        for (i, fi) in &self.coeffs {
            let mut d = phi.clone();
            for _ in 0..*i {
                d = apply_d(&d);
            }
            out = out + fi.mul_poly(&d);
        }
        Ok(out)
    }

    /// Number of nonzero stored monomials on orders inside `band` (clipped
    /// to the operator's own window).
    pub fn residual_terms_in(&self, band: &Window) -> usize {
        let w = self.window.intersect(band);
        self.coeffs
            .iter()
            .filter(|(k, _)| w.contains(**k))
            .map(|(_, c)| c.truncate_degree(w.deg).num_terms())
            .sum()
    }

    /// Formats as `f_k D^k + ...`, highest order first.
    pub fn render(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().rev() {
            let cs = format!("{c}");
            let body = if *k == 0 {
                format!("({cs})")
            } else {
                format!("({cs})*D^{k}")
            };
            parts.push(body);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for SuperPsiDO {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.render(), self.window)
    }
}

/// Convenience: the operator `c * D^k` with rational coefficient.
pub fn c_d_power(c: i64, k: i64) -> SuperPsiDO {
    SuperPsiDO::term(k, SuperPolynomial::constant(rat_int(c)))
}

/// The operator Q = D - 2 theta D^2 realizing `d_theta - theta d_x`.
pub fn q_operator() -> SuperPsiDO {
    let theta = SuperPolynomial::symbol(crate::superalgebra::SymbolId::Theta);
    SuperPsiDO::d_power(1).add(&SuperPsiDO::term(2, theta.scaled(&rat_int(-2))))
}

#[allow(dead_code)]
fn unused_monomial(_: &Monomial) {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::{apply_d, rat, JetFamily, SymbolId};

    fn sym(s: SymbolId) -> SuperPolynomial {
        SuperPolynomial::symbol(s)
    }
    fn ctx() -> OpCtx {
        OpCtx::new(-8)
    }
    fn odd_jet() -> SuperPolynomial {
        sym(SymbolId::jet(JetFamily::U, 1, 0))
    }
    fn even_jet() -> SuperPolynomial {
        sym(SymbolId::jet(JetFamily::U, 2, 0))
    }

    #[test]
    fn super_binomial_examples() {
        use num_bigint::BigInt;
        assert_eq!(super_binomial(1, 1), BigInt::from(1));
        assert_eq!(super_binomial(1, 0), BigInt::from(1));
        assert_eq!(super_binomial(2, 1), BigInt::from(0));
        assert_eq!(super_binomial(4, 2), BigInt::from(2));
    }

    #[test]
    fn super_binomial_against_iterated_push() {
        // D^4 f by repeated application of the n = 1 rule must reproduce
        // coefficient 2 on f^{[2]} D^2.
        let f = even_jet();
        let mut op = SuperPsiDO::term(0, f.clone());
        for _ in 0..4 {
            op = SuperPsiDO::d_power(1).compose(&op, &ctx());
        }
        let direct = SuperPsiDO::d_power(4).compose(&SuperPsiDO::term(0, f.clone()), &ctx());
        assert_eq!(op, direct);
        let expect = apply_d(&apply_d(&f)).scaled(&rat(2, 1));
        assert_eq!(direct.coeff(2), expect);
    }

    #[test]
    fn push_rule_order_one_and_two() {
        // D f = f^{[1]} + (-1)^{|f|} f D
        for f in [odd_jet(), even_jet()] {
            let (terms, _) = push_d_past(1, &f, -8);
            let m: std::collections::BTreeMap<i64, SuperPolynomial> =
                terms.into_iter().collect();
            assert_eq!(m[&0], apply_d(&f));
            let sign = if f.parity().unwrap().is_odd() { rat(-1, 1) } else { rat(1, 1) };
            assert_eq!(m[&1], f.scaled(&sign));
        }
        // D^2 f = f^{[2]} + f D^2 (no D term)
        let f = odd_jet();
        let (terms, _) = push_d_past(2, &f, -8);
        let m: std::collections::BTreeMap<i64, SuperPolynomial> = terms.into_iter().collect();
        assert_eq!(m.len(), 2);
        assert_eq!(m[&2], f);
        assert_eq!(m[&0], apply_d(&apply_d(&f)));
    }

    #[test]
    fn negative_push_oracle() {
        // D * (D^{-1} f) = f + O(below floor), for both parities.
        for f in [even_jet(), odd_jet()] {
            let (terms, truncated) = push_d_past(-1, &f, -6);
            assert!(truncated);
            let inv = SuperPsiDO::from_terms(terms, Window::above(-6));
            let back = SuperPsiDO::d_power(1).compose(&inv, &ctx());
            let expect = SuperPsiDO::term(0, f.clone()).restricted(&back.window());
            let diff = back.sub(&expect);
            assert_eq!(diff.residual_terms_in(&diff.window()), 0);
        }
    }

    #[test]
    fn compose_d_with_inverse_is_one() {
        let inv = SuperPsiDO::d_power(-1);
        let prod = SuperPsiDO::d_power(1).compose(&inv, &ctx());
        assert_eq!(prod, SuperPsiDO::one().restricted(&prod.window()));
    }

    #[test]
    fn compose_d_with_odd_function() {
        // D (u1 D^0) = u1^{[1]} - u1 D for odd u1
        let u = odd_jet();
        let prod = SuperPsiDO::d_power(1).compose(&SuperPsiDO::term(0, u.clone()), &ctx());
        assert_eq!(prod.coeff(0), apply_d(&u));
        assert_eq!(prod.coeff(1), -u);
    }

    #[test]
    fn adjoint_examples() {
        // (D)* = -D
        let adj = SuperPsiDO::d_power(1).adjoint(&ctx());
        assert_eq!(adj, SuperPsiDO::d_power(1).neg().restricted(&adj.window()));
        // (f D^0)* = f
        let f = odd_jet();
        let adj = SuperPsiDO::term(0, f.clone()).adjoint(&ctx());
        assert_eq!(adj.coeff(0), f);
        // (D^k)* = (-1)^{k(k+1)/2} D^k for a few k
        for k in [-2i64, -1, 0, 1, 2, 3, 4] {
            let adj = SuperPsiDO::d_power(k).adjoint(&ctx());
            let sign = if (k * (k + 1) / 2).rem_euclid(2) == 1 { -1 } else { 1 };
            let expect = c_d_power(sign, k).restricted(&adj.window());
            assert_eq!(adj, expect, "k = {k}");
        }
    }

    #[test]
    fn adjoint_involution_on_sample() {
        let a = SuperPsiDO::d_power(2)
            .add(&SuperPsiDO::term(0, even_jet()))
            .add(&SuperPsiDO::term(-2, even_jet()));
        let back = a.adjoint(&ctx()).adjoint(&ctx());
        let diff = back.sub(&a);
        assert_eq!(diff.residual_terms_in(&diff.window()), 0);
    }

    #[test]
    fn q_realization() {
        // Q^2 = -d_x and {D, Q} = 0, exactly.
        let q = q_operator();
        let q2 = q.compose(&q, &ctx());
        let expect = SuperPsiDO::d_power(2).neg();
        assert_eq!(q2, expect.restricted(&q2.window()));
        let anti = SuperPsiDO::d_power(1)
            .supercommutator(&q, &ctx())
            .unwrap();
        assert_eq!(anti.residual_terms_in(&anti.window()), 0);
    }

    #[test]
    fn supercommutator_examples() {
        // [D, D] = 2 d_x
        let c = SuperPsiDO::d_power(1)
            .supercommutator(&SuperPsiDO::d_power(1), &ctx())
            .unwrap();
        assert_eq!(c, c_d_power(2, 2).restricted(&c.window()));
        // [d_x, x] = 1
        let x = SuperPsiDO::term(0, sym(SymbolId::X));
        let c = SuperPsiDO::d_power(2).supercommutator(&x, &ctx()).unwrap();
        assert_eq!(c, SuperPsiDO::one().restricted(&c.window()));
    }

    #[test]
    fn projections_partition() {
        let a = SuperPsiDO::d_power(1)
            .add(&SuperPsiDO::term(0, odd_jet()))
            .add(&SuperPsiDO::term(-1, even_jet()));
        let plus = a.project_plus().unwrap();
        let minus = a.project_minus().unwrap();
        assert_eq!(plus.coeff(1), SuperPolynomial::one());
        assert_eq!(plus.coeff(0), odd_jet());
        assert!(plus.coeff(-1).is_zero());
        assert_eq!(minus.coeff(-1), even_jet());
        let sum = plus.add(&minus).sub(&a);
        assert_eq!(sum.residual_terms_in(&sum.window()), 0);
    }

    #[test]
    fn invert_monic_lower() {
        // (1 + a1 D^{-1})^{-1} must compose back to 1 within band.
        let a1 = sym(SymbolId::jet(JetFamily::A, 1, 0));
        let phi = SuperPsiDO::one().add(&SuperPsiDO::term(-1, a1));
        let inv = phi.invert_monic(&ctx()).unwrap();
        let prod = phi.compose(&inv, &ctx());
        let diff = prod.sub(&SuperPsiDO::one());
        assert_eq!(diff.residual_terms_in(&diff.window()), 0);
        let prod2 = inv.compose(&phi, &ctx());
        let diff2 = prod2.sub(&SuperPsiDO::one());
        assert_eq!(diff2.residual_terms_in(&diff2.window()), 0);
    }

    #[test]
    fn invert_monic_hat_needs_cap_and_works() {
        let b1 = sym(SymbolId::jet(JetFamily::B, 1, 0));
        let phihat = SuperPsiDO::one().add(&SuperPsiDO::term(1, b1));
        assert!(phihat.invert_monic(&ctx()).is_err());
        let cctx = OpCtx::with_deg(-8, Some(4));
        let inv = phihat.invert_monic(&cctx).unwrap();
        let prod = phihat.compose(&inv, &cctx);
        let diff = prod.sub(&SuperPsiDO::one());
        assert_eq!(diff.residual_terms_in(&diff.window()), 0);
    }

    #[test]
    fn residue_and_apply() {
        assert_eq!(SuperPsiDO::d_power(-1).residue().unwrap(), SuperPolynomial::one());
        let l = SuperPsiDO::d_power(1).add(&SuperPsiDO::term(0, odd_jet()));
        assert!(l.residue().unwrap().is_zero());
        // res(f D^0 * D^{-1}) = f
        let f = even_jet();
        let prod = SuperPsiDO::term(0, f.clone()).compose(&SuperPsiDO::d_power(-1), &ctx());
        assert_eq!(prod.residue().unwrap(), f);
        // apply to function
        let phi = sym(SymbolId::jet(JetFamily::Phi(1, crate::superalgebra::Parity::Even), 1, 0));
        let got = SuperPsiDO::d_power(1).apply_to_function(&phi).unwrap();
        assert_eq!(got, apply_d(&phi));
        assert!(SuperPsiDO::d_power(-1).apply_to_function(&phi).is_err());
    }

    #[test]
    fn window_soundness_compose() {
        // Recomputing with a larger band and restricting must agree.
        let a1 = sym(SymbolId::jet(JetFamily::A, 1, 0));
        let a2 = sym(SymbolId::jet(JetFamily::A, 2, 0));
        let phi = SuperPsiDO::one()
            .add(&SuperPsiDO::term(-1, a1))
            .add(&SuperPsiDO::term(-2, a2));
        let small = OpCtx::new(-5);
        let large = OpCtx::new(-9);
        let inv_s = phi.invert_monic(&small).unwrap();
        let inv_l = phi.invert_monic(&large).unwrap();
        let l_s = phi.compose(&SuperPsiDO::d_power(1), &small).compose(&inv_s, &small);
        let l_l = phi.compose(&SuperPsiDO::d_power(1), &large).compose(&inv_l, &large);
        let diff = l_s.sub(&l_l.restricted(&l_s.window()));
        assert_eq!(diff.residual_terms_in(&l_s.window()), 0);
    }

    #[test]
    fn nth_root_trivial_and_dressed() {
        let cctx = OpCtx::with_deg(-8, Some(5));
        // D^8 has 8th root D
        let r = nth_root(&SuperPsiDO::d_power(8), 8, RootSide::Lower, &cctx).unwrap();
        assert_eq!(r.coeff(1), SuperPolynomial::one());
        assert_eq!(r.orders().count(), 1);
        // dressed: Phi D^8 Phi^{-1} roots back to Phi D Phi^{-1}
        let a1 = sym(SymbolId::jet(JetFamily::A, 1, 0));
        let a2 = sym(SymbolId::jet(JetFamily::A, 2, 0));
        let phi = SuperPsiDO::one()
            .add(&SuperPsiDO::term(-1, a1))
            .add(&SuperPsiDO::term(-2, a2));
        let inv = phi.invert_monic(&cctx).unwrap();
        let l8 = phi
            .compose(&SuperPsiDO::d_power(8), &cctx)
            .compose(&inv, &cctx);
        let root = nth_root(&l8, 8, RootSide::Lower, &cctx).unwrap();
        let oracle = phi
            .compose(&SuperPsiDO::d_power(1), &cctx)
            .compose(&inv, &cctx);
        let diff = root.sub(&oracle);
        assert_eq!(diff.residual_terms_in(&diff.window()), 0, "root vs dressing");
    }

    #[test]
    fn nth_root_hat_side() {
        let cctx = OpCtx::with_deg(-8, Some(4));
        let b1 = sym(SymbolId::jet(JetFamily::B, 1, 0));
        let b2 = sym(SymbolId::jet(JetFamily::B, 2, 0));
        let phihat = SuperPsiDO::one()
            .add(&SuperPsiDO::term(1, b1))
            .add(&SuperPsiDO::term(2, b2));
        let inv = phihat.invert_monic(&cctx).unwrap();
        let l2 = phihat
            .compose(&SuperPsiDO::d_power(-2), &cctx)
            .compose(&inv, &cctx);
        let root = nth_root(&l2, 2, RootSide::Hat, &cctx).unwrap();
        let oracle = phihat
            .compose(&SuperPsiDO::d_power(-1), &cctx)
            .compose(&inv, &cctx);
        let diff = root.sub(&oracle);
        assert_eq!(diff.residual_terms_in(&diff.window()), 0, "hat root vs dressing");
        // shape mismatch is reported for D^{4n}
        assert!(nth_root(&SuperPsiDO::d_power(8), 2, RootSide::Hat, &cctx).is_err());
    }
}
