//! Truncated multivariate power series with exact coefficients.
//!
//! Variables come in five kinds over a shared ambient space: `z_1..z_s`,
//! their conjugates `zb_1..zb_s`, `zeta_1..zeta_r`, their conjugates
//! `zetab_1..zetab_r`, and optionally a single self-conjugate real variable
//! `t`. Two grading modes control truncation degrees:
//!
//! * `Total`  — every variable has weight 1;
//! * `Weighted` — `z`/`zb` weigh 1, `zeta`/`zetab` weigh 0, `t` weighs 2.
//!
//! Invariants maintained by every constructor and operation:
//!
//! * stored terms have degree <= `order` in the series' own grading;
//! * zero coefficients are never stored;
//! * exponent keys all have length `space.num_vars()`;
//! * equality compares the space, the grading, the order, and the terms —
//!   two series truncated at different orders are never equal.
//!
//! Arithmetic truncates to the minimum of the operand orders, which is the
//! only sound choice: a dropped tail in either factor could otherwise leak
//! into retained degrees.

mod compose;
mod json;
mod matrix;

pub use compose::{compose, identity_substitution, invert_map};
pub use matrix::SeriesMatrix;

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;
use std::collections::BTreeMap;
use std::fmt;

/// Which block of the ambient variable list a variable lives in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub enum VarKind {
    Z,
    ZBar,
    Zeta,
    ZetaBar,
    T,
}

/// A single variable: a kind plus a 0-based index within its block.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    pub fn z(i: usize) -> Self {
        Var { kind: VarKind::Z, index: i }
    }
    pub fn zb(i: usize) -> Self {
        Var { kind: VarKind::ZBar, index: i }
    }
    pub fn zeta(i: usize) -> Self {
        Var { kind: VarKind::Zeta, index: i }
    }
    pub fn zetab(i: usize) -> Self {
        Var { kind: VarKind::ZetaBar, index: i }
    }
    pub fn t() -> Self {
        Var { kind: VarKind::T, index: 0 }
    }

    /// The conjugate variable (t is self-conjugate).
    pub fn conj(self) -> Self {
        let kind = match self.kind {
            VarKind::Z => VarKind::ZBar,
            VarKind::ZBar => VarKind::Z,
            VarKind::Zeta => VarKind::ZetaBar,
            VarKind::ZetaBar => VarKind::Zeta,
            VarKind::T => VarKind::T,
        };
        Var { kind, index: self.index }
    }
}

/// Grading mode; part of a series' identity.
#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize, serde::Deserialize)]
pub enum Grading {
    #[serde(rename = "total")]
    Total,
    #[serde(rename = "weighted")]
    Weighted,
}

/// Ambient variable space: `s >= 1` directions of `z`, `r >= 0` directions
/// of `zeta`, and optionally `t`. Exponent vectors are laid out as
/// `z_1..z_s, zb_1..zb_s, zeta_1..zeta_r, zetab_1..zetab_r[, t]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct VarSpace {
    pub s: usize,
    pub r: usize,
    pub has_t: bool,
}

impl VarSpace {
    pub fn new(s: usize, r: usize, has_t: bool) -> Self {
        assert!(s >= 1, "a variable space needs at least one z direction");
        VarSpace { s, r, has_t }
    }

    pub fn num_vars(&self) -> usize {
        2 * self.s + 2 * self.r + usize::from(self.has_t)
    }

    /// Position of a variable in the exponent layout. Panics when the
    /// variable does not exist in this space.
    pub fn index_of(&self, v: Var) -> usize {
        match v.kind {
            VarKind::Z => {
                assert!(v.index < self.s, "z index out of range");
                v.index
            }
            VarKind::ZBar => {
                assert!(v.index < self.s, "zb index out of range");
                self.s + v.index
            }
            VarKind::Zeta => {
                assert!(v.index < self.r, "zeta index out of range");
                2 * self.s + v.index
            }
            VarKind::ZetaBar => {
                assert!(v.index < self.r, "zetab index out of range");
                2 * self.s + self.r + v.index
            }
            VarKind::T => {
                assert!(self.has_t && v.index == 0, "t absent from this space");
                2 * self.s + 2 * self.r
            }
        }
    }

    pub fn var_at(&self, pos: usize) -> Var {
        assert!(pos < self.num_vars(), "variable position out of range");
        if pos < self.s {
            Var::z(pos)
        } else if pos < 2 * self.s {
            Var::zb(pos - self.s)
        } else if pos < 2 * self.s + self.r {
            Var::zeta(pos - 2 * self.s)
        } else if pos < 2 * self.s + 2 * self.r {
            Var::zetab(pos - 2 * self.s - self.r)
        } else {
            Var::t()
        }
    }

    /// Weight of the variable at `pos` in the given grading.
    pub fn weight_at(&self, pos: usize, grading: Grading) -> u32 {
        match grading {
            Grading::Total => 1,
            Grading::Weighted => match self.var_at(pos).kind {
                VarKind::Z | VarKind::ZBar => 1,
                VarKind::Zeta | VarKind::ZetaBar => 0,
                VarKind::T => 2,
            },
        }
    }

    /// Degree of an exponent vector in the given grading.
    pub fn degree(&self, exp: &[u32], grading: Grading) -> u32 {
        debug_assert_eq!(exp.len(), self.num_vars());
        match grading {
            Grading::Total => exp.iter().sum(),
            Grading::Weighted => exp
                .iter()
                .enumerate()
                .map(|(i, &e)| e * self.weight_at(i, Grading::Weighted))
                .sum(),
        }
    }

    /// Human-readable variable name (1-based indices), used in reports.
    pub fn var_name(&self, pos: usize) -> String {
        let v = self.var_at(pos);
        match v.kind {
            VarKind::Z => format!("z{}", v.index + 1),
            VarKind::ZBar => format!("zb{}", v.index + 1),
            VarKind::Zeta => format!("zeta{}", v.index + 1),
            VarKind::ZetaBar => format!("zetab{}", v.index + 1),
            VarKind::T => "t".to_string(),
        }
    }
}

/// Sparse truncated power series. See the module docs for the invariants.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    space: VarSpace,
    grading: Grading,
    order: u32,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl TruncatedSeries {
    pub fn zero(space: VarSpace, grading: Grading, order: u32) -> Self {
        TruncatedSeries { space, grading, order, terms: BTreeMap::new() }
    }

    pub fn constant(space: VarSpace, grading: Grading, order: u32, c: GaussianRational) -> Self {
        let mut s = Self::zero(space, grading, order);
        if !c.is_zero() {
            s.terms.insert(vec![0; space.num_vars()], c);
        }
        s
    }

    pub fn one(space: VarSpace, grading: Grading, order: u32) -> Self {
        Self::constant(space, grading, order, GaussianRational::one())
    }

    /// The monomial `c * x^exp`; terms beyond the order are dropped.
    pub fn monomial(
        space: VarSpace,
        grading: Grading,
        order: u32,
        exp: Vec<u32>,
        c: GaussianRational,
    ) -> Self {
        assert_eq!(exp.len(), space.num_vars(), "exponent length mismatch");
        let mut s = Self::zero(space, grading, order);
        if !c.is_zero() && space.degree(&exp, grading) <= order {
            s.terms.insert(exp, c);
        }
        s
    }

    /// The variable `v` as a series.
    pub fn var(space: VarSpace, grading: Grading, order: u32, v: Var) -> Self {
        let mut exp = vec![0; space.num_vars()];
        exp[space.index_of(v)] = 1;
        Self::monomial(space, grading, order, exp, GaussianRational::one())
    }

    pub fn space(&self) -> VarSpace {
        self.space
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the given exponent vector (zero when absent).
    pub fn coeff(&self, exp: &[u32]) -> GaussianRational {
        self.terms.get(exp).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&vec![0; self.space.num_vars()])
    }

    /// Smallest degree among stored terms; `None` for the zero series.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| self.space.degree(e, self.grading)).min()
    }

    /// First stored term in exponent order, for deterministic reports.
    pub fn first_term(&self) -> Option<(Vec<u32>, GaussianRational)> {
        self.terms.iter().next().map(|(e, c)| (e.clone(), c.clone()))
    }

    fn assert_compat(&self, other: &Self) {
        assert_eq!(self.space, other.space, "variable space mismatch");
        assert_eq!(self.grading, other.grading, "grading mismatch");
    }

    fn insert_add(&mut self, exp: Vec<u32>, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        if self.space.degree(&exp, self.grading) > self.order {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    // Clean up cancellations immediately.
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compat(other);
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.space, self.grading, order);
        for (e, c) in &self.terms {
            out.insert_add(e.clone(), c.clone());
        }
        for (e, c) in &other.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -&*c;
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero(self.space, self.grading, self.order);
        if c.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compat(other);
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.space, self.grading, order);
        for (ea, ca) in &self.terms {
            let da = self.space.degree(ea, self.grading);
            if da > order {
                continue;
            }
            for (eb, cb) in &other.terms {
                let db = self.space.degree(eb, self.grading);
                if da + db > order {
                    continue;
                }
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_add(exp, ca * cb);
            }
        }
        out
    }

    /// Formal conjugate: swaps `z <-> zb` and `zeta <-> zetab`, fixes `t`,
    /// and conjugates every coefficient. An involution and a ring map.
    pub fn conjugate(&self) -> Self {
        let n = self.space.num_vars();
        let mut out = Self::zero(self.space, self.grading, self.order);
        for (e, c) in &self.terms {
            let mut exp = vec![0u32; n];
            for (pos, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let v = self.space.var_at(pos).conj();
                exp[self.space.index_of(v)] = p;
            }
            out.terms.insert(exp, c.conj());
        }
        out
    }

    /// Real part, `(self + conj(self)) / 2`.
    pub fn real_part(&self) -> Self {
        self.add(&self.conjugate()).scale(&GaussianRational::from_ratio(1, 2))
    }

    /// Partial derivative. The output order drops by the variable's weight:
    /// order `d - 1` for unit-weight variables, `d` for weight-0 variables
    /// and `d - 2` for `t` in the weighted grading (saturating at zero).
    pub fn differentiate(&self, v: Var) -> Self {
        let pos = self.space.index_of(v);
        let w = self.space.weight_at(pos, self.grading);
        let order = self.order.saturating_sub(w);
        let mut out = Self::zero(self.space, self.grading, order);
        for (e, c) in &self.terms {
            if e[pos] == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[pos] -= 1;
            let factor = GaussianRational::from_int(i64::from(e[pos]));
            out.insert_add(exp, c * &factor);
        }
        out
    }

    /// Truncate to a lower order. Panics when asked to raise the order;
    /// use `assert_exact_to` for that.
    pub fn truncate(&self, order: u32) -> Self {
        assert!(order <= self.order, "truncate cannot raise the order");
        let mut out = Self::zero(self.space, self.grading, order);
        for (e, c) in &self.terms {
            if self.space.degree(e, self.grading) <= order {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Reinterpret the series at a higher order. This is the caller's
    /// assertion that the series is exactly known there (e.g. monomials and
    /// other finite polynomials); it is not a sound operation on genuinely
    /// truncated data.
    pub fn assert_exact_to(&self, order: u32) -> Self {
        assert!(order >= self.order, "assert_exact_to cannot lower the order");
        let mut out = self.clone();
        out.order = order;
        out
    }

    /// Drop every term that uses a variable selected by the predicate
    /// (substituting zero for those variables).
    pub fn set_vars_zero(&self, selected: impl Fn(Var) -> bool) -> Self {
        let mut out = Self::zero(self.space, self.grading, self.order);
        for (e, c) in &self.terms {
            let kill = e
                .iter()
                .enumerate()
                .any(|(pos, &p)| p > 0 && selected(self.space.var_at(pos)));
            if !kill {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Keep only terms whose exponent vector satisfies the predicate.
    pub fn filter_terms(&self, keep: impl Fn(&[u32]) -> bool) -> Self {
        let mut out = Self::zero(self.space, self.grading, self.order);
        for (e, c) in &self.terms {
            if keep(e) {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Total exponent over all variables of one kind in a term.
    pub fn kind_degree(space: &VarSpace, exp: &[u32], kind: VarKind) -> u32 {
        exp.iter()
            .enumerate()
            .filter(|(pos, _)| space.var_at(*pos).kind == kind)
            .map(|(_, &e)| e)
            .sum()
    }

    /// Move the series into another space/grading/order. Every term must
    /// exist in the target space (e.g. `t`-free when the target lacks `t`)
    /// and satisfy the target order; otherwise an error is returned.
    pub fn reinterpret(&self, space: VarSpace, grading: Grading, order: u32) -> Result<Self> {
        let mut out = Self::zero(space, grading, order);
        for (e, c) in &self.terms {
            let mut exp = vec![0u32; space.num_vars()];
            for (pos, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                let v = self.space.var_at(pos);
                let ok = match v.kind {
                    VarKind::Z | VarKind::ZBar => v.index < space.s,
                    VarKind::Zeta | VarKind::ZetaBar => v.index < space.r,
                    VarKind::T => space.has_t,
                };
                if !ok {
                    return Err(Error::Invalid(format!(
                        "term uses {} which is absent from the target space",
                        self.space.var_name(pos)
                    )));
                }
                exp[space.index_of(v)] = p;
            }
            if space.degree(&exp, grading) > order {
                return Err(Error::Invalid(
                    "term exceeds the target truncation order".to_string(),
                ));
            }
            out.terms.insert(exp, c.clone());
        }
        Ok(out)
    }

    /// Render a monomial exponent as `z1^2*zetab1`, or `1` when empty.
    pub fn monomial_name(space: &VarSpace, exp: &[u32]) -> String {
        let mut parts = Vec::new();
        for (pos, &p) in exp.iter().enumerate() {
            if p == 1 {
                parts.push(space.var_name(pos));
            } else if p > 1 {
                parts.push(format!("{}^{}", space.var_name(pos), p));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 + O({})", self.order + 1);
        }
        let body: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("({})*{}", c, Self::monomial_name(&self.space, e)))
            .collect();
        write!(f, "{} + O({})", body.join(" + "), self.order + 1)
    }
}
