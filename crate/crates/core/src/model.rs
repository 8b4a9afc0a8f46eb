//! Defining equations of constant-Levi-rank model hypersurfaces.
//!
//! A model hypersurface is cut out by
//! `Re(w) = z^T H(zeta, zeta_bar) z_bar + Re(z_bar^T S(zeta, zeta_bar) z_bar)`
//! with `H` Hermitian and `S` symmetric. This module builds the pair `(H, S)`
//! in closed form from seed data `(H0, S(zeta))`, verifies the rank-condition
//! PDE system satisfied by every such equation, assembles the Levi form and
//! its Schur complement, extracts the weighted-degree-2 model from a
//! perturbed defining series, and re-derives the equation order by order from
//! the PDE system as an independent cross-check of the closed form.
//!
//! Invariants maintained throughout: `H` stays Hermitian and `S` symmetric as
//! series matrices, `H(0,0)` stays invertible, and every series is truncated
//! at a stated total order in `(zeta, zeta_bar)`.

use crate::error::{Error, Result};
use crate::linalg::{mat_inverse, mat_is_hermitian, mat_shape, Mat};
use crate::scalar::GaussianRational;
use crate::series::{Grading, SeriesMatrix, TruncatedSeries, Var, VarKind, VarSpace};
use serde::{Deserialize, Serialize};

/// Seed data: a constant Hermitian form `H0` and a symmetric matrix `S(zeta)`
/// of holomorphic series vanishing at 0.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr", into = "ModelRepr")]
pub struct ModelData {
    s: usize,
    r: usize,
    order: u32,
    h0: Mat,
    sz: SeriesMatrix,
}

impl ModelData {
    /// Validates and wraps seed data.
    pub fn new(h0: Mat, sz: SeriesMatrix) -> Result<Self> {
        let (rows, cols) = mat_shape(&h0);
        if rows == 0 || rows != cols {
            return Err(Error::Dimension(format!(
                "H0 must be square and nonempty, got {rows}x{cols}"
            )));
        }
        let s = rows;
        if !mat_is_hermitian(&h0) {
            return Err(Error::DegenerateHermitian("H0 is not Hermitian".into()));
        }
        if mat_inverse(&h0).is_none() {
            return Err(Error::DegenerateHermitian("H0 is singular".into()));
        }
        if sz.rows() != s || sz.cols() != s {
            return Err(Error::Dimension(format!(
                "S(zeta) must be {s}x{s}, got {}x{}",
                sz.rows(),
                sz.cols()
            )));
        }
        let space = sz.space();
        if space.s != s || space.has_t {
            return Err(Error::Dimension(
                "S(zeta) must live in the (z, zeta) variable space of the model".into(),
            ));
        }
        if sz.grading() != Grading::Total {
            return Err(Error::Invalid("S(zeta) must use the total grading".into()));
        }
        if !sz.is_symmetric_series() {
            return Err(Error::Invalid("S(zeta) must be symmetric".into()));
        }
        for i in 0..s {
            for j in 0..s {
                for (exp, _) in sz.at(i, j).terms() {
                    let zeta = TruncatedSeries::kind_degree(&space, exp, VarKind::Zeta);
                    if space.degree(exp, Grading::Total) != zeta {
                        return Err(Error::Invalid(
                            "S(zeta) must depend on the zeta variables only".into(),
                        ));
                    }
                    if zeta == 0 {
                        return Err(Error::Invalid("S(zeta) must vanish at 0".into()));
                    }
                }
            }
        }
        Ok(Self {
            s,
            r: space.r,
            order: sz.order(),
            h0,
            sz,
        })
    }

    /// Number of `z` variables.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of `zeta` variables.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Truncation order of `S(zeta)`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// The constant Hermitian form.
    pub fn h0(&self) -> &Mat {
        &self.h0
    }

    /// The symmetric series matrix `S(zeta)`.
    pub fn sz(&self) -> &SeriesMatrix {
        &self.sz
    }

    /// Re-truncates to order `d`; refuses to lift above the stored order.
    pub fn at_order(&self, d: u32) -> Result<Self> {
        if d > self.order {
            return Err(Error::Invalid(format!(
                "stored order {} is below the requested order {d}",
                self.order
            )));
        }
        let mut out = self.clone();
        out.sz = out.sz.truncate(d);
        out.order = d;
        Ok(out)
    }

    /// The partial derivatives `S_{zeta_alpha}(0)` as constant matrices.
    pub fn s_partials_at_zero(&self) -> Vec<Mat> {
        (0..self.r)
            .map(|a| self.sz.differentiate(Var::zeta(a)).eval_zero())
            .collect()
    }

    /// True iff the matrices `S_{zeta_alpha}(0)` are linearly independent.
    pub fn is_two_nondegenerate(&self) -> bool {
        let partials = self.s_partials_at_zero();
        if partials.is_empty() {
            return false;
        }
        let rows: Vec<Vec<GaussianRational>> =
            partials.iter().map(crate::linalg::vectorize).collect();
        crate::linalg::rank(&rows) == self.r
    }
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    s: usize,
    r: usize,
    order: u32,
    #[serde(rename = "H0")]
    h0: Mat,
    #[serde(rename = "S")]
    sz: Vec<Vec<TruncatedSeries>>,
}

impl TryFrom<ModelRepr> for ModelData {
    type Error = Error;

    fn try_from(repr: ModelRepr) -> Result<Self> {
        let sz = SeriesMatrix::from_entries(repr.sz)?;
        let data = ModelData::new(repr.h0, sz)?;
        if data.s != repr.s || data.r != repr.r || data.order != repr.order {
            return Err(Error::Invalid(
                "declared (s, r, order) do not match the matrix data".into(),
            ));
        }
        Ok(data)
    }
}

impl From<ModelData> for ModelRepr {
    fn from(data: ModelData) -> Self {
        let sz = (0..data.s)
            .map(|i| (0..data.s).map(|j| data.sz.at(i, j).clone()).collect())
            .collect();
        ModelRepr {
            s: data.s,
            r: data.r,
            order: data.order,
            h0: data.h0,
            sz,
        }
    }
}

/// The coefficient pair `(H, S)` of a defining equation
/// `Re(w) = z^T H z_bar + Re(z_bar^T S z_bar)`, truncated in `(zeta, zeta_bar)`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "EquationRepr", into = "EquationRepr")]
pub struct DefiningEquation {
    s: usize,
    r: usize,
    order: u32,
    h: SeriesMatrix,
    smat: SeriesMatrix,
}

impl DefiningEquation {
    /// Validates and wraps a coefficient pair.
    pub fn new(h: SeriesMatrix, smat: SeriesMatrix) -> Result<Self> {
        let s = h.rows();
        if s == 0 || !h.is_square() || smat.rows() != s || smat.cols() != s {
            return Err(Error::Dimension(format!(
                "H and S must be square of equal size, got {}x{} and {}x{}",
                h.rows(),
                h.cols(),
                smat.rows(),
                smat.cols()
            )));
        }
        let space = h.space();
        if smat.space() != space || space.s != s || space.has_t {
            return Err(Error::Dimension(
                "H and S must share the (z, zeta) variable space of the model".into(),
            ));
        }
        if h.grading() != Grading::Total || smat.grading() != Grading::Total {
            return Err(Error::Invalid("H and S must use the total grading".into()));
        }
        if h.order() != smat.order() {
            return Err(Error::Invalid(
                "H and S must share a truncation order".into(),
            ));
        }
        for m in [&h, &smat] {
            for i in 0..s {
                for j in 0..s {
                    for (exp, _) in m.at(i, j).terms() {
                        let zeta = TruncatedSeries::kind_degree(&space, exp, VarKind::Zeta);
                        let zetab = TruncatedSeries::kind_degree(&space, exp, VarKind::ZetaBar);
                        if space.degree(exp, Grading::Total) != zeta + zetab {
                            return Err(Error::Invalid(
                                "H and S must depend on (zeta, zeta_bar) only".into(),
                            ));
                        }
                    }
                }
            }
        }
        if !h.is_hermitian_series() {
            return Err(Error::DegenerateHermitian("H is not Hermitian".into()));
        }
        if !smat.is_symmetric_series() {
            return Err(Error::Invalid("S is not symmetric".into()));
        }
        if mat_inverse(&h.eval_zero()).is_none() {
            return Err(Error::DegenerateHermitian("H(0,0) is singular".into()));
        }
        Ok(Self {
            s,
            r: space.r,
            order: h.order(),
            h,
            smat,
        })
    }

    /// Number of `z` variables.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of `zeta` variables.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Truncation order in `(zeta, zeta_bar)`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// The Hermitian coefficient matrix `H(zeta, zeta_bar)`.
    pub fn h(&self) -> &SeriesMatrix {
        &self.h
    }

    /// The symmetric coefficient matrix `S(zeta, zeta_bar)`.
    pub fn s_mat(&self) -> &SeriesMatrix {
        &self.smat
    }

    /// Re-truncates to order `d`; refuses to lift above the stored order.
    pub fn at_order(&self, d: u32) -> Result<Self> {
        if d > self.order {
            return Err(Error::Invalid(format!(
                "stored order {} is below the requested order {d}",
                self.order
            )));
        }
        let mut out = self.clone();
        out.h = out.h.truncate(d);
        out.smat = out.smat.truncate(d);
        out.order = d;
        Ok(out)
    }

    /// The scalar right-hand side
    /// `P = z^T H z_bar + (z_bar^T S z_bar + z^T conj(S) z) / 2`,
    /// exact to total order `order + 2` because every term has `z`-degree 2.
    pub fn assemble_p(&self) -> TruncatedSeries {
        let space = self.h.space();
        let d = self.order + 2;
        let half = GaussianRational::from_ratio(1, 2);
        let z: Vec<TruncatedSeries> = (0..self.s)
            .map(|i| TruncatedSeries::var(space, Grading::Total, d, Var::z(i)))
            .collect();
        let zb: Vec<TruncatedSeries> = (0..self.s)
            .map(|i| TruncatedSeries::var(space, Grading::Total, d, Var::zb(i)))
            .collect();
        let mut p = TruncatedSeries::zero(space, Grading::Total, d);
        for i in 0..self.s {
            for j in 0..self.s {
                let hij = self.h.at(i, j).assert_exact_to(d);
                p = p.add(&z[i].mul(&hij).mul(&zb[j]));
                let sij = self.smat.at(i, j).assert_exact_to(d).scale(&half);
                let quad = zb[i].mul(&sij).mul(&zb[j]);
                p = p.add(&quad).add(&quad.conjugate());
            }
        }
        p
    }

    /// Recovers the seed pair: `H0 = H(0,0)` and
    /// `S(zeta) = (H0^T)^{-1} (S(zeta, 0) - S(0, 0)) H0^{-1}`.
    pub fn seed_model(&self) -> Result<ModelData> {
        let h0 = self.h.eval_zero();
        let h0_inv = mat_inverse(&h0).ok_or_else(|| Error::Singular("H(0,0)".into()))?;
        let h0_inv_t = crate::linalg::mat_transpose(&h0_inv);
        let space = self.h.space();
        let s_hol = self.smat.set_vars_zero(|v| v.kind == VarKind::ZetaBar);
        let s_const =
            SeriesMatrix::from_scalar_matrix(&s_hol.eval_zero(), space, Grading::Total, self.order);
        let diff = s_hol.sub(&s_const);
        let left = SeriesMatrix::from_scalar_matrix(&h0_inv_t, space, Grading::Total, self.order);
        let right = SeriesMatrix::from_scalar_matrix(&h0_inv, space, Grading::Total, self.order);
        ModelData::new(h0, left.mul(&diff).mul(&right))
    }
}

#[derive(Serialize, Deserialize)]
struct EquationRepr {
    s: usize,
    r: usize,
    order: u32,
    #[serde(rename = "H")]
    h: Vec<Vec<TruncatedSeries>>,
    #[serde(rename = "S")]
    smat: Vec<Vec<TruncatedSeries>>,
}

impl TryFrom<EquationRepr> for DefiningEquation {
    type Error = Error;

    fn try_from(repr: EquationRepr) -> Result<Self> {
        let h = SeriesMatrix::from_entries(repr.h)?;
        let smat = SeriesMatrix::from_entries(repr.smat)?;
        let eq = DefiningEquation::new(h, smat)?;
        if eq.s != repr.s || eq.r != repr.r || eq.order != repr.order {
            return Err(Error::Invalid(
                "declared (s, r, order) do not match the matrix data".into(),
            ));
        }
        Ok(eq)
    }
}

impl From<DefiningEquation> for EquationRepr {
    fn from(eq: DefiningEquation) -> Self {
        let grid = |m: &SeriesMatrix| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.at(i, j).clone()).collect())
                .collect()
        };
        EquationRepr {
            s: eq.s,
            r: eq.r,
            order: eq.order,
            h: grid(&eq.h),
            smat: grid(&eq.smat),
        }
    }
}

/// A scalar defining series split into its weighted-degree-2 part `P` and a
/// perturbation `Q` of strictly higher weighted degree. The truncation order
/// in `(zeta, zeta_bar)` is tracked separately because those variables have
/// weight 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefiningSeries {
    p: TruncatedSeries,
    q: TruncatedSeries,
    zeta_order: u32,
}

impl DefiningSeries {
    /// Validates the homogeneity split: `P` has weighted degree exactly 2 and
    /// no `t`, `Q` has weighted degree at least 3, and both respect the
    /// declared `zeta` truncation.
    pub fn new(p: TruncatedSeries, q: TruncatedSeries, zeta_order: u32) -> Result<Self> {
        let space = p.space();
        if q.space() != space || !space.has_t {
            return Err(Error::Dimension(
                "P and Q must share a variable space containing t".into(),
            ));
        }
        if p.grading() != Grading::Weighted || q.grading() != Grading::Weighted {
            return Err(Error::Invalid("P and Q must use the weighted grading".into()));
        }
        for (exp, _) in p.terms() {
            if space.degree(exp, Grading::Weighted) != 2 {
                return Err(Error::Invalid(
                    "P must be weighted-homogeneous of degree 2".into(),
                ));
            }
            if TruncatedSeries::kind_degree(&space, exp, VarKind::T) > 0 {
                return Err(Error::Invalid("P must not involve t".into()));
            }
        }
        for (exp, _) in q.terms() {
            if space.degree(exp, Grading::Weighted) <= 2 {
                return Err(Error::Invalid(
                    "Q must have weighted degree greater than 2".into(),
                ));
            }
        }
        for series in [&p, &q] {
            for (exp, _) in series.terms() {
                let zeta = TruncatedSeries::kind_degree(&space, exp, VarKind::Zeta)
                    + TruncatedSeries::kind_degree(&space, exp, VarKind::ZetaBar);
                if zeta > zeta_order {
                    return Err(Error::Invalid(format!(
                        "term exceeds the declared zeta truncation order {zeta_order}"
                    )));
                }
            }
        }
        Ok(Self { p, q, zeta_order })
    }

    /// Wraps a defining equation as the `P` part, with perturbation `Q`.
    pub fn from_equation(eq: &DefiningEquation, q: TruncatedSeries) -> Result<Self> {
        let space = VarSpace::new(eq.s(), eq.r(), true);
        let p = eq.assemble_p().reinterpret(space, Grading::Weighted, 2)?;
        Self::new(p, q, eq.order())
    }

    /// The weighted-degree-2 part.
    pub fn p(&self) -> &TruncatedSeries {
        &self.p
    }

    /// The higher-weight perturbation.
    pub fn q(&self) -> &TruncatedSeries {
        &self.q
    }

    /// Truncation order in `(zeta, zeta_bar)`.
    pub fn zeta_order(&self) -> u32 {
        self.zeta_order
    }
}

/// Builds the defining equation from seed data in closed form:
/// `H = (H0 (Id - Sb H0^T S H0)^{-1} + (Id - H0 Sb H0^T S)^{-1} H0) / 2` and
/// `S_full = H0^T (Id - S H0 Sb H0^T)^{-1} S H0`, where `Sb` is the formal
/// conjugate of `S(zeta)`.
pub fn build_model(data: &ModelData) -> Result<DefiningEquation> {
    let space = data.sz.space();
    let d = data.order;
    let lift = |m: &Mat| SeriesMatrix::from_scalar_matrix(m, space, Grading::Total, d);
    let h0 = lift(&data.h0);
    let h0t = lift(&crate::linalg::mat_transpose(&data.h0));
    let s = &data.sz;
    let sb = s.conjugate();
    let id = SeriesMatrix::identity(data.s, space, Grading::Total, d);
    let half = GaussianRational::from_ratio(1, 2);

    let inv1 = id.sub(&sb.mul(&h0t).mul(s).mul(&h0)).neumann_inverse()?;
    let inv2 = id.sub(&h0.mul(&sb).mul(&h0t).mul(s)).neumann_inverse()?;
    let h_full = h0.mul(&inv1).add(&inv2.mul(&h0)).scale(&half);

    let inv3 = id.sub(&s.mul(&h0).mul(&sb).mul(&h0t)).neumann_inverse()?;
    let s_full = h0t.mul(&inv3).mul(s).mul(&h0);

    DefiningEquation::new(h_full, s_full)
}

/// One violation of the rank-condition PDE system, pinned to the earliest
/// offending monomial in the fixed scan order.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RankFailure {
    /// Which of the two equations failed (1 = Hermitian part, 2 = symmetric part).
    pub equation: u8,
    /// 1-based `zeta` index of the outer derivative.
    pub alpha: usize,
    /// 1-based `zeta_bar` index of the outer derivative.
    pub beta: usize,
    /// 1-based matrix entry position.
    pub row: usize,
    /// 1-based matrix entry position.
    pub col: usize,
    /// Offending monomial, rendered in the variable names of the space.
    pub monomial: String,
    pub lhs: GaussianRational,
    pub rhs: GaussianRational,
}

/// Outcome of checking the rank-condition PDE system on a defining equation.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RankReport {
    pub ok: bool,
    /// Order to which the identities were compared (input order minus 2).
    pub order: u32,
    /// Number of `(alpha, beta)` derivative pairs checked.
    pub pairs: usize,
    pub failure: Option<RankFailure>,
}

struct RankContext {
    h_zeta: Vec<SeriesMatrix>,
    h_zetab: Vec<SeriesMatrix>,
    s_zeta: Vec<SeriesMatrix>,
    h_inv: SeriesMatrix,
    h_inv_t: SeriesMatrix,
    check_order: u32,
}

impl RankContext {
    fn new(eq: &DefiningEquation) -> Result<Self> {
        let h_inv = eq.h.inverse()?;
        Ok(Self {
            h_zeta: (0..eq.r).map(|a| eq.h.differentiate(Var::zeta(a))).collect(),
            h_zetab: (0..eq.r).map(|b| eq.h.differentiate(Var::zetab(b))).collect(),
            s_zeta: (0..eq.r).map(|a| eq.smat.differentiate(Var::zeta(a))).collect(),
            h_inv_t: h_inv.transpose(),
            h_inv,
            check_order: eq.order.saturating_sub(2),
        })
    }
}

fn first_entry_failure(
    lhs: &SeriesMatrix,
    rhs: &SeriesMatrix,
    equation: u8,
    alpha: usize,
    beta: usize,
    order: u32,
) -> Option<RankFailure> {
    let lhs = lhs.truncate(order);
    let rhs = rhs.truncate(order);
    let space = lhs.space();
    for i in 0..lhs.rows() {
        for j in 0..lhs.cols() {
            let diff = lhs.at(i, j).sub(rhs.at(i, j));
            if let Some((exp, _)) = diff.first_term() {
                return Some(RankFailure {
                    equation,
                    alpha: alpha + 1,
                    beta: beta + 1,
                    row: i + 1,
                    col: j + 1,
                    monomial: TruncatedSeries::monomial_name(&space, &exp),
                    lhs: lhs.at(i, j).coeff(&exp),
                    rhs: rhs.at(i, j).coeff(&exp),
                });
            }
        }
    }
    None
}

fn check_rank_pair(
    ctx: &RankContext,
    alpha: usize,
    beta: usize,
) -> Option<RankFailure> {
    let lhs1 = ctx.h_zeta[alpha].differentiate(Var::zetab(beta));
    let rhs1 = ctx.h_zeta[alpha]
        .mul(&ctx.h_inv)
        .mul(&ctx.h_zetab[beta])
        .add(&ctx.s_zeta[beta].conjugate().mul(&ctx.h_inv_t).mul(&ctx.s_zeta[alpha]));
    if let Some(f) = first_entry_failure(&lhs1, &rhs1, 1, alpha, beta, ctx.check_order) {
        return Some(f);
    }
    let lhs2 = ctx.s_zeta[alpha].differentiate(Var::zetab(beta));
    let rhs2 = ctx.h_zetab[beta]
        .transpose()
        .mul(&ctx.h_inv_t)
        .mul(&ctx.s_zeta[alpha])
        .add(&ctx.s_zeta[alpha].mul(&ctx.h_inv).mul(&ctx.h_zetab[beta]));
    first_entry_failure(&lhs2, &rhs2, 2, alpha, beta, ctx.check_order)
}

/// Checks, for every derivative pair `(alpha, beta)`, the two identities
/// `H_{za zb} = H_{za} H^{-1} H_{zb} + conj(S_{zb}) (H^{-1})^T S_{za}` and
/// `S_{za zb} = H_{zb}^T (H^T)^{-1} S_{za} + S_{za} H^{-1} H_{zb}`
/// (subscripts denoting `zeta_alpha` / `zeta_bar_beta` derivatives), and
/// reports the earliest failure in the fixed scan order.
pub fn verify_rank_condition(eq: &DefiningEquation) -> Result<RankReport> {
    let ctx = RankContext::new(eq)?;
    let pairs: Vec<(usize, usize)> = (0..eq.r)
        .flat_map(|a| (0..eq.r).map(move |b| (a, b)))
        .collect();
    #[cfg(feature = "parallel")]
    let failure = {
        use rayon::prelude::*;
        crate::par::install(|| {
            pairs
                .par_iter()
                .map(|&(a, b)| check_rank_pair(&ctx, a, b))
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .next()
    };
    #[cfg(not(feature = "parallel"))]
    let failure = pairs
        .iter()
        .filter_map(|&(a, b)| check_rank_pair(&ctx, a, b))
        .next();
    Ok(RankReport {
        ok: failure.is_none(),
        order: ctx.check_order,
        pairs: pairs.len(),
        failure,
    })
}

/// Single-threaded variant of [`verify_rank_condition`] with identical output.
pub fn verify_rank_condition_sequential(eq: &DefiningEquation) -> Result<RankReport> {
    let ctx = RankContext::new(eq)?;
    let mut failure = None;
    'outer: for a in 0..eq.r {
        for b in 0..eq.r {
            if let Some(f) = check_rank_pair(&ctx, a, b) {
                failure = Some(f);
                break 'outer;
            }
        }
    }
    Ok(RankReport {
        ok: failure.is_none(),
        order: eq.order.saturating_sub(2),
        pairs: eq.r * eq.r,
        failure,
    })
}

/// The Levi form of a defining equation, with its kernel-block Schur
/// complement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LeviForm {
    /// `(s+r) x (s+r)` matrix of mixed second derivatives of `P`, rows
    /// indexed by `(z, zeta)` and columns by `(z_bar, zeta_bar)`.
    pub matrix: SeriesMatrix,
    /// `D - C A^{-1} B` for the natural blocks; vanishes iff the Levi form
    /// has constant rank `s` to the working order.
    pub schur: SeriesMatrix,
}

/// Assembles the Levi form `[[A, B], [C, D]]` of `P` and its Schur complement.
pub fn levi_form_series(eq: &DefiningEquation) -> Result<LeviForm> {
    let p = eq.assemble_p();
    let space = p.space();
    let d = eq.order;
    let n = eq.s + eq.r;
    let hol = |k: usize| {
        if k < eq.s {
            Var::z(k)
        } else {
            Var::zeta(k - eq.s)
        }
    };
    let antihol = |k: usize| {
        if k < eq.s {
            Var::zb(k)
        } else {
            Var::zetab(k - eq.s)
        }
    };
    let matrix = SeriesMatrix::from_fn(n, n, space, Grading::Total, d, |i, j| {
        p.differentiate(hol(i)).differentiate(antihol(j))
    });
    let a = matrix.submatrix(0, eq.s, 0, eq.s);
    let b = matrix.submatrix(0, eq.s, eq.s, n);
    let c = matrix.submatrix(eq.s, n, 0, eq.s);
    let dd = matrix.submatrix(eq.s, n, eq.s, n);
    let schur = dd.sub(&c.mul(&a.inverse()?).mul(&b));
    Ok(LeviForm { matrix, schur })
}

/// Splits the weighted-degree-2 part of a defining series into its `(H, S)`
/// coefficient pair; the perturbation `Q` is discarded.
///
/// Fails if `P` contains terms outside the model shape: every term must have
/// `(z, z_bar)`-bidegree `(1,1)`, `(0,2)`, or `(2,0)`, and the holomorphic
/// quadratic part must be the conjugate of the antiholomorphic one.
pub fn extract_weighted_model(full: &DefiningSeries) -> Result<DefiningEquation> {
    let p_space = full.p().space();
    let (s, r) = (p_space.s, p_space.r);
    let space = VarSpace::new(s, r, false);
    let d = full.zeta_order();
    let zero = TruncatedSeries::zero(space, Grading::Total, d);
    let mut h = vec![vec![zero.clone(); s]; s];
    let mut quad = vec![vec![zero.clone(); s]; s];
    let mut quad_conj = vec![vec![zero.clone(); s]; s];

    let single_index = |block: &[u32]| -> Option<usize> {
        let mut found = None;
        for (i, &e) in block.iter().enumerate() {
            match e {
                0 => {}
                1 if found.is_none() => found = Some(i),
                _ => return None,
            }
        }
        found
    };
    let two = GaussianRational::from_int(2);

    for (exp, c) in full.p().terms() {
        let (zexp, rest) = exp.split_at(s);
        let (zbexp, zrest) = rest.split_at(s);
        let mut zeta_exp = vec![0u32; 2 * s + 2 * r];
        zeta_exp[2 * s..].copy_from_slice(&zrest[..2 * r]);
        let mono = TruncatedSeries::monomial(space, Grading::Total, d, zeta_exp, c.clone());
        let zdeg: u32 = zexp.iter().sum();
        let zbdeg: u32 = zbexp.iter().sum();
        match (zdeg, zbdeg) {
            (1, 1) => {
                let (i, j) = (single_index(zexp).unwrap(), single_index(zbexp).unwrap());
                h[i][j] = h[i][j].add(&mono);
            }
            (0, 2) => match single_pair(zbexp) {
                Some((j, k)) => {
                    quad[j][k] = quad[j][k].add(&mono);
                    quad[k][j] = quad[k][j].add(&mono);
                }
                None => {
                    let k = zbexp.iter().position(|&e| e == 2).ok_or_else(bad_shape)?;
                    quad[k][k] = quad[k][k].add(&mono.scale(&two));
                }
            },
            (2, 0) => match single_pair(zexp) {
                Some((j, k)) => {
                    quad_conj[j][k] = quad_conj[j][k].add(&mono);
                    quad_conj[k][j] = quad_conj[k][j].add(&mono);
                }
                None => {
                    let k = zexp.iter().position(|&e| e == 2).ok_or_else(bad_shape)?;
                    quad_conj[k][k] = quad_conj[k][k].add(&mono.scale(&two));
                }
            },
            _ => return Err(bad_shape()),
        }
    }
    for i in 0..s {
        for j in 0..s {
            if quad_conj[i][j] != quad[i][j].conjugate() {
                return Err(Error::Invalid(
                    "holomorphic and antiholomorphic quadratic parts are not conjugate".into(),
                ));
            }
        }
    }
    let h = SeriesMatrix::from_entries(h)?;
    let smat = SeriesMatrix::from_entries(quad)?;
    DefiningEquation::new(h, smat)
}

fn bad_shape() -> Error {
    Error::Invalid("P contains terms outside the model shape".into())
}

/// The two distinct positions carrying exponent 1, if the block is exactly
/// a product of two distinct variables.
fn single_pair(block: &[u32]) -> Option<(usize, usize)> {
    let ones: Vec<usize> = block
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == 1)
        .map(|(i, _)| i)
        .collect();
    if ones.len() == 2 && block.iter().all(|&e| e <= 1) {
        Some((ones[0], ones[1]))
    } else {
        None
    }
}

/// Re-derives the defining equation from the rank-condition PDE system alone,
/// sweeping mixed `(zeta, zeta_bar)`-bidegrees in increasing total degree.
///
/// Boundary data: `H(zeta, 0) = H0` and `S(zeta, 0) = H0^T S(zeta) H0`. Each
/// bidegree-`(i, j)` coefficient block is reconstructed from strictly lower
/// bidegrees through the double Euler identity
/// `i * j * F = sum_{a,b} zeta_a zeta_bar_b (F_{zeta_a zeta_bar_b})`.
pub fn pde_propagate_oracle(data: &ModelData) -> Result<DefiningEquation> {
    let space = data.sz.space();
    let d = data.order;
    let grading = Grading::Total;
    let lift = |m: &Mat| SeriesMatrix::from_scalar_matrix(m, space, grading, d);
    let h0 = lift(&data.h0);
    let h0t = lift(&crate::linalg::mat_transpose(&data.h0));
    let mut h = h0.clone();
    let mut smat = h0t.mul(&data.sz).mul(&h0);

    for m in 2..=d {
        let h_inv = h.inverse()?;
        let h_inv_t = h_inv.transpose();
        let h_zeta: Vec<SeriesMatrix> = (0..data.r).map(|a| h.differentiate(Var::zeta(a))).collect();
        let h_zetab: Vec<SeriesMatrix> =
            (0..data.r).map(|b| h.differentiate(Var::zetab(b))).collect();
        let s_zeta: Vec<SeriesMatrix> =
            (0..data.r).map(|a| smat.differentiate(Var::zeta(a))).collect();
        let mut h_next = h.clone();
        let mut s_next = smat.clone();
        for a in 0..data.r {
            for b in 0..data.r {
                let rhs1 = h_zeta[a]
                    .mul(&h_inv)
                    .mul(&h_zetab[b])
                    .add(&s_zeta[b].conjugate().mul(&h_inv_t).mul(&s_zeta[a]));
                let rhs2 = h_zetab[b]
                    .transpose()
                    .mul(&h_inv_t)
                    .mul(&s_zeta[a])
                    .add(&s_zeta[a].mul(&h_inv).mul(&h_zetab[b]));
                let mut exp = vec![0u32; space.num_vars()];
                exp[space.index_of(Var::zeta(a))] = 1;
                exp[space.index_of(Var::zetab(b))] = 1;
                for i in 1..m {
                    let j = m - i;
                    let scale = GaussianRational::from_ratio(1, (i as i64) * (j as i64));
                    let mono =
                        TruncatedSeries::monomial(space, grading, d, exp.clone(), scale);
                    let part1 = bidegree_part(&rhs1, i - 1, j - 1, d).scale_series(&mono);
                    let part2 = bidegree_part(&rhs2, i - 1, j - 1, d).scale_series(&mono);
                    h_next = h_next.add(&part1);
                    s_next = s_next.add(&part2);
                }
            }
        }
        h = h_next;
        smat = s_next;
    }
    DefiningEquation::new(h, smat)
}

/// Extracts the `(zeta, zeta_bar)`-bidegree-`(i, j)` part entrywise as an
/// exact polynomial lifted back to order `d`.
fn bidegree_part(m: &SeriesMatrix, i: u32, j: u32, d: u32) -> SeriesMatrix {
    let space = m.space();
    m.map_entries(|e| {
        e.filter_terms(|exp| {
            TruncatedSeries::kind_degree(&space, exp, VarKind::Zeta) == i
                && TruncatedSeries::kind_degree(&space, exp, VarKind::ZetaBar) == j
        })
        .assert_exact_to(d)
    })
}
