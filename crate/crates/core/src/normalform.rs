//! Normal forms for defining equations and their seed data.
//!
//! Three reductions live here. First, `normalize_equation` brings a defining
//! equation into the shape produced by `build_model`: a fiberwise linear
//! change of `z` removes the purely holomorphic tail of `H`, a shift of `w`
//! removes the pluriharmonic part of `S`, and the seed pair `(H0, S(zeta))`
//! is read off the result; `perturb_equation` is the inverse dressing used to
//! exercise it. Second, `reconstruct_from_seed` rebuilds the equation from
//! seed data with the normalized leading part kept explicit, cross-checking
//! the closed form of `build_model` through a second arithmetic route. Third,
//! `normal_form_reduce` re-parametrizes the fiber variables so the pivot
//! entries of `S(zeta)` — chosen by `pivot_select` — become exactly
//! `zeta_1, ..., zeta_r`, and `verify_equivalence_witness` checks an explicit
//! equivalence `(U, g)` between two seed pairs entry by entry.
//!
//! Invariants: normalizing an equation already in model shape returns the
//! trivial record; `reconstruct_from_seed` agrees with `build_model` exactly;
//! `normal_form_reduce` is idempotent and preserves both two-nondegeneracy
//! and the realizability verdict; a witness passes from `m1` to `m2` iff its
//! inverse passes from `m2` to `m1`.

use crate::error::{Error, Result};
use crate::lie::Involution;
use crate::linalg::{
    mat_conj, mat_inverse, mat_is_zero, mat_mul, mat_shape, mat_transpose, rank, Mat,
};
use crate::model::{DefiningEquation, ModelData};
use crate::scalar::GaussianRational;
use crate::series::{
    compose, identity_substitution, invert_map, Grading, SeriesMatrix, TruncatedSeries, Var,
    VarKind,
};
use crate::symbols::BigradedSymbol;
use serde::{Deserialize, Serialize};

/// True iff every term of every entry involves the `zeta` variables only.
fn is_zeta_only(m: &SeriesMatrix) -> bool {
    let space = m.space();
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| {
            m.at(i, j).terms().all(|(e, _)| {
                space.degree(e, Grading::Total)
                    == TruncatedSeries::kind_degree(&space, e, VarKind::Zeta)
            })
        })
    })
}

/// True iff every term of every entry involves the `zeta_bar` variables only.
fn is_zeta_bar_only(m: &SeriesMatrix) -> bool {
    let space = m.space();
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| {
            m.at(i, j).terms().all(|(e, _)| {
                space.degree(e, Grading::Total)
                    == TruncatedSeries::kind_degree(&space, e, VarKind::ZetaBar)
            })
        })
    })
}

/// The substitutions used by `normalize_equation`: the matrix `A(zeta)` of
/// the fiberwise linear change `z -> (Id + A) z` and the pluriharmonic part
/// of `S` absorbed into the transversal coordinate.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "RecordRepr", into = "RecordRepr")]
pub struct NormalizationRecord {
    a: SeriesMatrix,
    removed: SeriesMatrix,
}

impl NormalizationRecord {
    /// The matrix of the fiberwise linear change, vanishing at `zeta = 0`.
    pub fn a(&self) -> &SeriesMatrix {
        &self.a
    }

    /// The pluriharmonic part of `S` removed by the transversal shift.
    pub fn removed(&self) -> &SeriesMatrix {
        &self.removed
    }
}

#[derive(Serialize, Deserialize)]
struct RecordRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<TruncatedSeries>>,
    removed: Vec<Vec<TruncatedSeries>>,
}

impl TryFrom<RecordRepr> for NormalizationRecord {
    type Error = Error;

    fn try_from(repr: RecordRepr) -> Result<Self> {
        let a = SeriesMatrix::from_entries(repr.a)?;
        let removed = SeriesMatrix::from_entries(repr.removed)?;
        if !is_zeta_only(&a) || !mat_is_zero(&a.eval_zero()) {
            return Err(Error::Invalid(
                "A must depend on zeta alone and vanish at 0".into(),
            ));
        }
        if !is_zeta_bar_only(&removed) || !removed.is_symmetric_series() {
            return Err(Error::Invalid(
                "the removed part must be symmetric and depend on zeta_bar alone".into(),
            ));
        }
        Ok(NormalizationRecord { a, removed })
    }
}

impl From<NormalizationRecord> for RecordRepr {
    fn from(rec: NormalizationRecord) -> Self {
        let grid = |m: &SeriesMatrix| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.at(i, j).clone()).collect())
                .collect()
        };
        RecordRepr {
            a: grid(&rec.a),
            removed: grid(&rec.removed),
        }
    }
}

/// Normalizes a defining equation and reads off its seed data.
///
/// The purely holomorphic tail of `H` determines `A(zeta)` through
/// `H(zeta, 0) = (Id + A(zeta))^T H(0,0)`; substituting `z -> (Id + A) z`
/// then leaves `H` with mixed terms only, and the part of the transformed `S`
/// that is free of `zeta` is dropped, being absorbable into the transversal
/// coordinate. Returns the recovered seed pair together with the record of
/// both substitutions. The recovered pair parametrizes the input hypersurface
/// whenever the input satisfies the rank condition; the reduction itself is
/// formal and does not check it.
pub fn normalize_equation(eq: &DefiningEquation) -> Result<(ModelData, NormalizationRecord)> {
    let space = eq.h().space();
    let d = eq.order();
    let lift = |m: &Mat| SeriesMatrix::from_scalar_matrix(m, space, Grading::Total, d);
    let h0 = eq.h().eval_zero();
    let h0_inv = mat_inverse(&h0).ok_or_else(|| Error::Singular("H(0,0)".into()))?;

    let hol_tail = eq
        .h()
        .set_vars_zero(|v| v.kind == VarKind::ZetaBar)
        .sub(&lift(&h0));
    let a = hol_tail.mul(&lift(&h0_inv)).transpose();

    let id = SeriesMatrix::identity(eq.s(), space, Grading::Total, d);
    let c_inv = id.add(&a).inverse()?;
    let cbar_inv = id.add(&a.conjugate()).inverse()?;
    let h_new = c_inv.transpose().mul(eq.h()).mul(&cbar_inv);
    let s_new = cbar_inv.transpose().mul(eq.s_mat()).mul(&cbar_inv);

    let removed = s_new.set_vars_zero(|v| v.kind == VarKind::Zeta);
    let normalized = DefiningEquation::new(h_new, s_new.sub(&removed))?;
    let data = normalized.seed_model()?;
    Ok((data, NormalizationRecord { a, removed }))
}

/// Dresses a defining equation with a fiberwise linear change and a
/// pluriharmonic shift, producing another presentation of the same
/// hypersurface; `normalize_equation` undoes it.
///
/// `a` must depend on `zeta` alone and vanish at 0; `plh` must be symmetric
/// and depend on `zeta_bar` alone. Both must share the equation's space,
/// grading and order.
pub fn perturb_equation(
    eq: &DefiningEquation,
    a: &SeriesMatrix,
    plh: &SeriesMatrix,
) -> Result<DefiningEquation> {
    let space = eq.h().space();
    let d = eq.order();
    let s = eq.s();
    for (m, what) in [(a, "A"), (plh, "the pluriharmonic shift")] {
        if m.rows() != s || m.cols() != s {
            return Err(Error::Dimension(format!(
                "{what} must be {s}x{s}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.space() != space || m.grading() != Grading::Total || m.order() != d {
            return Err(Error::Dimension(format!(
                "{what} must share the equation's space, grading and order"
            )));
        }
    }
    if !is_zeta_only(a) || !mat_is_zero(&a.eval_zero()) {
        return Err(Error::Invalid(
            "A must depend on zeta alone and vanish at 0".into(),
        ));
    }
    if !is_zeta_bar_only(plh) || !plh.is_symmetric_series() {
        return Err(Error::Invalid(
            "the pluriharmonic shift must be symmetric and depend on zeta_bar alone".into(),
        ));
    }

    let id = SeriesMatrix::identity(s, space, Grading::Total, d);
    let c = id.add(a);
    let cbar = c.conjugate();
    let h_t = c.transpose().mul(eq.h()).mul(&cbar);
    let s_t = cbar.transpose().mul(eq.s_mat()).mul(&cbar).add(plh);
    DefiningEquation::new(h_t, s_t)
}

/// Rebuilds the defining equation from seed data with the normalized leading
/// part explicit: `H = H0 + correction` and `S = H0^T S(zeta) H0 + tail`,
/// where both remainders are geometric tails of positive degree. Agrees with
/// `build_model` exactly and serves as a second arithmetic route to it.
pub fn reconstruct_from_seed(data: &ModelData) -> Result<DefiningEquation> {
    let space = data.sz().space();
    let d = data.order();
    let lift = |m: &Mat| SeriesMatrix::from_scalar_matrix(m, space, Grading::Total, d);
    let h0 = lift(data.h0());
    let h0t = lift(&mat_transpose(data.h0()));
    let s = data.sz();
    let sb = s.conjugate();
    let id = SeriesMatrix::identity(data.s(), space, Grading::Total, d);
    let half = GaussianRational::from_ratio(1, 2);

    let tail1 = id
        .sub(&sb.mul(&h0t).mul(s).mul(&h0))
        .neumann_inverse()?
        .sub(&id);
    let tail2 = id
        .sub(&h0.mul(&sb).mul(&h0t).mul(s))
        .neumann_inverse()?
        .sub(&id);
    let h = h0.add(&h0.mul(&tail1).add(&tail2.mul(&h0)).scale(&half));

    let tail3 = id
        .sub(&s.mul(&h0).mul(&sb).mul(&h0t))
        .neumann_inverse()?
        .sub(&id);
    let s_full = h0t.mul(s).mul(&h0).add(&h0t.mul(&tail3).mul(s).mul(&h0));
    DefiningEquation::new(h, s_full)
}

/// A tuple of matrix positions, one per fiber direction, at which the
/// quadratic blocks of a symbol form an invertible entry matrix. Positions
/// are 1-based pairs `(j, k)` with `j <= k`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PivotTuple {
    pub positions: Vec<(usize, usize)>,
}

/// Upper-triangular positions of an `s x s` symmetric matrix, 0-based,
/// ordered by smaller index first and larger index second.
fn symmetric_positions(s: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(s * (s + 1) / 2);
    for j in 0..s {
        for k in j..s {
            out.push((j, k));
        }
    }
    out
}

/// Selects the first position tuple, in lexicographic order over the ordered
/// symmetric positions, whose entry matrix across the quadratic blocks is
/// invertible. Fails iff the blocks are linearly dependent.
pub fn pivot_select(base: &BigradedSymbol) -> Result<PivotTuple> {
    let s = base.s();
    let r = base.r();
    if r == 0 {
        return Err(Error::Dimension(
            "the symbol has no fiber directions to pivot on".into(),
        ));
    }
    let blocks = base.s02_blocks();
    let pos = symmetric_positions(s);
    let m = pos.len();
    if r <= m {
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            let entry: Mat = idx
                .iter()
                .map(|&p| {
                    blocks
                        .iter()
                        .map(|block| block[pos[p].0][pos[p].1].clone())
                        .collect()
                })
                .collect();
            if rank(&entry) == r {
                return Ok(PivotTuple {
                    positions: idx.iter().map(|&p| (pos[p].0 + 1, pos[p].1 + 1)).collect(),
                });
            }
            let mut i = r;
            while i > 0 && idx[i - 1] == m - r + (i - 1) {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..r {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Err(Error::Precondition(
        "no position tuple has an invertible entry matrix; the quadratic blocks are linearly dependent"
            .into(),
    ))
}

/// Re-parametrizes the fiber so the pivot entries of `S(zeta)` become exactly
/// `zeta_1, ..., zeta_r`: the pivot entries themselves define the map `F`,
/// and `S` is composed with the inverse of `F`. Leaves `H0` untouched and is
/// idempotent.
pub fn normal_form_reduce(data: &ModelData) -> Result<ModelData> {
    let inv = Involution::new(data.h0().clone(), GaussianRational::one())?;
    let base = BigradedSymbol::from_s02_blocks(inv, &data.s_partials_at_zero())?;
    let pivot = pivot_select(&base)?;

    let space = data.sz().space();
    let d = data.order();
    let f: Vec<TruncatedSeries> = pivot
        .positions
        .iter()
        .map(|&(j, k)| data.sz().at(j - 1, k - 1).clone())
        .collect();
    let g = invert_map(&f)?;
    let mut subs = identity_substitution(space, Grading::Total, d);
    for (alpha, ga) in g.iter().enumerate() {
        subs[space.index_of(Var::zeta(alpha))] = ga.clone();
    }
    let entries = (0..data.s())
        .map(|i| {
            (0..data.s())
                .map(|j| compose(data.sz().at(i, j), &subs))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ModelData::new(data.h0().clone(), SeriesMatrix::from_entries(entries)?)
}

/// An explicit equivalence between two seed pairs: an invertible matrix `U`
/// acting on `z` and a formal change `g` of the fiber variables with `g(0) = 0`
/// and invertible linear part.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "WitnessRepr", into = "WitnessRepr")]
pub struct EquivalenceWitness {
    u: Mat,
    g: Vec<TruncatedSeries>,
}

impl EquivalenceWitness {
    /// Validates and wraps a witness pair.
    pub fn new(u: Mat, g: Vec<TruncatedSeries>) -> Result<Self> {
        let (rows, cols) = mat_shape(&u);
        if rows == 0 || rows != cols {
            return Err(Error::Dimension(format!(
                "U must be square and nonempty, got {rows}x{cols}"
            )));
        }
        if mat_inverse(&u).is_none() {
            return Err(Error::Singular("U".into()));
        }
        if g.is_empty() {
            return Err(Error::Dimension(
                "g needs at least one fiber component".into(),
            ));
        }
        let space = g[0].space();
        let order = g[0].order();
        if space.s != rows || space.has_t || g.len() != space.r {
            return Err(Error::Dimension(
                "g must map the fiber of the (z, zeta) space matched to U".into(),
            ));
        }
        let mut jac: Mat = vec![vec![GaussianRational::zero(); space.r]; space.r];
        for (b, comp) in g.iter().enumerate() {
            if comp.space() != space || comp.grading() != Grading::Total || comp.order() != order {
                return Err(Error::Dimension(
                    "the components of g disagree on space, grading or order".into(),
                ));
            }
            for (e, _) in comp.terms() {
                let zeta = TruncatedSeries::kind_degree(&space, e, VarKind::Zeta);
                if space.degree(e, Grading::Total) != zeta {
                    return Err(Error::Invalid(
                        "the components of g must be series in zeta alone".into(),
                    ));
                }
            }
            if !comp.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm);
            }
            for a in 0..space.r {
                let mut e = vec![0u32; space.num_vars()];
                e[space.index_of(Var::zeta(a))] = 1;
                jac[b][a] = comp.coeff(&e);
            }
        }
        if mat_inverse(&jac).is_none() {
            return Err(Error::SingularLinearPart);
        }
        Ok(EquivalenceWitness { u, g })
    }

    /// The matrix acting on `z`.
    pub fn u(&self) -> &Mat {
        &self.u
    }

    /// The components of the fiber change.
    pub fn g(&self) -> &[TruncatedSeries] {
        &self.g
    }

    /// Size of `U`.
    pub fn s(&self) -> usize {
        self.u.len()
    }

    /// Number of fiber components.
    pub fn r(&self) -> usize {
        self.g.len()
    }

    /// Truncation order of the fiber change.
    pub fn order(&self) -> u32 {
        self.g[0].order()
    }

    /// The inverse witness `(U^{-1}, g^{-1})`.
    pub fn invert(&self) -> Result<Self> {
        let u_inv = mat_inverse(&self.u).expect("U was validated invertible");
        Self::new(u_inv, invert_map(&self.g)?)
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessRepr {
    #[serde(rename = "U")]
    u: Mat,
    g: Vec<TruncatedSeries>,
}

impl TryFrom<WitnessRepr> for EquivalenceWitness {
    type Error = Error;

    fn try_from(repr: WitnessRepr) -> Result<Self> {
        EquivalenceWitness::new(repr.u, repr.g)
    }
}

impl From<EquivalenceWitness> for WitnessRepr {
    fn from(w: EquivalenceWitness) -> Self {
        WitnessRepr { u: w.u, g: w.g }
    }
}

/// First discrepancy found when checking a witness, pinned to a matrix entry
/// (1-based) and, for the series part, to the earliest offending monomial.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub enum EquivalenceMismatch {
    HermitianForm {
        row: usize,
        col: usize,
        expected: GaussianRational,
        found: GaussianRational,
    },
    QuadraticPart {
        row: usize,
        col: usize,
        monomial: String,
        expected: GaussianRational,
        found: GaussianRational,
    },
}

/// Outcome of checking an equivalence witness between two seed pairs.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EquivalenceReport {
    pub ok: bool,
    /// Order to which the series parts were compared.
    pub order: u32,
    pub mismatch: Option<EquivalenceMismatch>,
}

/// Checks that the witness transforms `m1` into `m2`: the Hermitian forms
/// must satisfy `H0' = U^T H0 conj(U)` and the series parts
/// `S'(zeta) = U^T S(g(zeta)) U`, both exactly to the common order.
pub fn verify_equivalence_witness(
    m1: &ModelData,
    m2: &ModelData,
    w: &EquivalenceWitness,
) -> Result<EquivalenceReport> {
    if m1.s() != m2.s() || m1.s() != w.s() || m1.r() != m2.r() || m1.r() != w.r() {
        return Err(Error::Dimension(format!(
            "witness of shape ({}, {}) cannot relate seed pairs of shapes ({}, {}) and ({}, {})",
            w.s(),
            w.r(),
            m1.s(),
            m1.r(),
            m2.s(),
            m2.r()
        )));
    }
    let order = m1.order().min(m2.order()).min(w.order());
    let space = m1.sz().space();

    let transformed_h = mat_mul(&mat_mul(&mat_transpose(w.u()), m1.h0()), &mat_conj(w.u()));
    for i in 0..m1.s() {
        for j in 0..m1.s() {
            if transformed_h[i][j] != m2.h0()[i][j] {
                return Ok(EquivalenceReport {
                    ok: false,
                    order,
                    mismatch: Some(EquivalenceMismatch::HermitianForm {
                        row: i + 1,
                        col: j + 1,
                        expected: m2.h0()[i][j].clone(),
                        found: transformed_h[i][j].clone(),
                    }),
                });
            }
        }
    }

    let mut subs = identity_substitution(space, Grading::Total, order);
    for a in 0..m1.r() {
        subs[space.index_of(Var::zeta(a))] = w.g()[a].truncate(order);
    }
    let entries = (0..m1.s())
        .map(|i| {
            (0..m1.s())
                .map(|j| compose(m1.sz().at(i, j), &subs))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let composed = SeriesMatrix::from_entries(entries)?;
    let lift = |m: &Mat| SeriesMatrix::from_scalar_matrix(m, space, Grading::Total, order);
    let transformed_s = lift(&mat_transpose(w.u())).mul(&composed).mul(&lift(w.u()));
    let target = m2.sz().truncate(order);
    for i in 0..m1.s() {
        for j in 0..m1.s() {
            let diff = transformed_s.at(i, j).sub(target.at(i, j));
            if let Some((e, _)) = diff.first_term() {
                return Ok(EquivalenceReport {
                    ok: false,
                    order,
                    mismatch: Some(EquivalenceMismatch::QuadraticPart {
                        row: i + 1,
                        col: j + 1,
                        monomial: TruncatedSeries::monomial_name(&space, &e),
                        expected: target.at(i, j).coeff(&e),
                        found: transformed_s.at(i, j).coeff(&e),
                    }),
                });
            }
        }
    }
    Ok(EquivalenceReport {
        ok: true,
        order,
        mismatch: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, pde_propagate_oracle, verify_rank_condition};
    use crate::series::VarSpace;
    use crate::symbols::{check_realizable, first_order_constancy, modified_symbol_at_zero};

    fn gr(s: &str) -> GaussianRational {
        GaussianRational::parse(s).expect("literal")
    }

    fn mat(rows: &[&[&str]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|c| gr(c)).collect()).collect()
    }

    fn zeta_mono(space: VarSpace, order: u32, powers: &[(usize, u32)], c: &str) -> TruncatedSeries {
        let mut e = vec![0u32; space.num_vars()];
        for &(a, p) in powers {
            e[space.index_of(Var::zeta(a))] += p;
        }
        TruncatedSeries::monomial(space, Grading::Total, order, e, gr(c))
    }

    fn zeta_bar_mono(
        space: VarSpace,
        order: u32,
        powers: &[(usize, u32)],
        c: &str,
    ) -> TruncatedSeries {
        let mut e = vec![0u32; space.num_vars()];
        for &(a, p) in powers {
            e[space.index_of(Var::zetab(a))] += p;
        }
        TruncatedSeries::monomial(space, Grading::Total, order, e, gr(c))
    }

    /// s = 1, r = 1, H0 = [1], S = [zeta].
    fn cone_data(order: u32) -> ModelData {
        let space = VarSpace::new(1, 1, false);
        let sz = SeriesMatrix::from_entries(vec![vec![zeta_mono(space, order, &[(0, 1)], "1")]])
            .expect("1x1");
        ModelData::new(mat(&[&["1"]]), sz).expect("seed data")
    }

    /// s = 2, r = 2, an indefinite form with genuinely coupled blocks.
    fn wide_data() -> ModelData {
        let space = VarSpace::new(2, 2, false);
        let order = 6;
        let z1 = zeta_mono(space, order, &[(0, 1)], "1");
        let z2 = zeta_mono(space, order, &[(1, 1)], "1");
        let zero = TruncatedSeries::zero(space, Grading::Total, order);
        let sz = SeriesMatrix::from_entries(vec![
            vec![z1, z2.clone()],
            vec![z2, zero],
        ])
        .expect("2x2");
        let h0 = mat(&[&["1", "1i"], &["-1i", "2"]]);
        ModelData::new(h0, sz).expect("seed data")
    }

    /// s = 2, r = 2, pivot entries needing an actual inversion.
    fn triangular_data(order: u32) -> ModelData {
        let space = VarSpace::new(2, 2, false);
        let s11 = zeta_mono(space, order, &[(0, 1)], "1")
            .add(&zeta_mono(space, order, &[(1, 2)], "1"));
        let s12 = zeta_mono(space, order, &[(1, 1)], "1");
        let zero = TruncatedSeries::zero(space, Grading::Total, order);
        let sz = SeriesMatrix::from_entries(vec![
            vec![s11, s12.clone()],
            vec![s12, zero],
        ])
        .expect("2x2");
        ModelData::new(mat(&[&["1", "0"], &["0", "1"]]), sz).expect("seed data")
    }

    fn symbol_from_blocks(h0: Mat, blocks: &[Mat]) -> BigradedSymbol {
        let inv = Involution::new(h0, GaussianRational::one()).expect("involution");
        BigradedSymbol::from_s02_blocks(inv, blocks).expect("symbol")
    }

    #[test]
    fn normalizing_a_model_changes_nothing() {
        let data = cone_data(6);
        let eq = build_model(&data).unwrap();
        let (recovered, record) = normalize_equation(&eq).unwrap();
        assert_eq!(recovered, data);
        assert!(record.a().is_zero());
        assert!(record.removed().is_zero());
        assert_eq!(pde_propagate_oracle(&recovered).unwrap(), eq);
    }

    #[test]
    fn holomorphic_dressing_is_undone() {
        let data = wide_data();
        let eq = build_model(&data).unwrap();
        let space = eq.h().space();
        let d = eq.order();
        let mut a = SeriesMatrix::zero(2, 2, space, Grading::Total, d);
        a.set(0, 0, zeta_mono(space, d, &[(0, 1)], "1+1i"));
        a.set(0, 1, zeta_mono(space, d, &[(1, 2)], "1"));
        a.set(1, 0, zeta_mono(space, d, &[(0, 1), (1, 1)], "-1/2"));
        let plh = SeriesMatrix::zero(2, 2, space, Grading::Total, d);

        let dressed = perturb_equation(&eq, &a, &plh).unwrap();
        assert_ne!(dressed, eq);
        assert!(verify_rank_condition(&dressed).unwrap().ok);

        let (recovered, record) = normalize_equation(&dressed).unwrap();
        assert_eq!(recovered, data);
        assert_eq!(record.a(), &a);
        assert!(record.removed().is_zero());
    }

    #[test]
    fn pluriharmonic_dressing_is_undone() {
        let data = cone_data(6);
        let eq = build_model(&data).unwrap();
        let space = eq.h().space();
        let d = eq.order();
        let a = SeriesMatrix::zero(1, 1, space, Grading::Total, d);
        let mut plh = SeriesMatrix::zero(1, 1, space, Grading::Total, d);
        plh.set(
            0,
            0,
            zeta_bar_mono(space, d, &[(0, 2)], "1/2")
                .add(&TruncatedSeries::constant(space, Grading::Total, d, gr("3"))),
        );

        let dressed = perturb_equation(&eq, &a, &plh).unwrap();
        assert_ne!(dressed, eq);
        let (recovered, record) = normalize_equation(&dressed).unwrap();
        assert_eq!(recovered, data);
        assert!(record.a().is_zero());
        assert_eq!(record.removed(), &plh);
    }

    #[test]
    fn combined_dressing_is_undone() {
        let data = wide_data();
        let eq = build_model(&data).unwrap();
        let space = eq.h().space();
        let d = eq.order();
        let mut a = SeriesMatrix::zero(2, 2, space, Grading::Total, d);
        a.set(0, 1, zeta_mono(space, d, &[(0, 1)], "2i"));
        a.set(1, 1, zeta_mono(space, d, &[(1, 1)], "1"));
        let mut plh = SeriesMatrix::zero(2, 2, space, Grading::Total, d);
        plh.set(0, 1, zeta_bar_mono(space, d, &[(0, 1)], "1"));
        plh.set(1, 0, zeta_bar_mono(space, d, &[(0, 1)], "1"));

        let dressed = perturb_equation(&eq, &a, &plh).unwrap();
        let (recovered, record) = normalize_equation(&dressed).unwrap();
        assert_eq!(recovered, data);
        assert_eq!(record.a(), &a);
        assert!(!record.removed().is_zero());
    }

    #[test]
    fn normalization_record_round_trips_through_json() {
        let data = cone_data(4);
        let eq = build_model(&data).unwrap();
        let space = eq.h().space();
        let mut a = SeriesMatrix::zero(1, 1, space, Grading::Total, 4);
        a.set(0, 0, zeta_mono(space, 4, &[(0, 1)], "1"));
        let plh = SeriesMatrix::zero(1, 1, space, Grading::Total, 4);
        let dressed = perturb_equation(&eq, &a, &plh).unwrap();
        let (_, record) = normalize_equation(&dressed).unwrap();

        let text = serde_json::to_string(&record).unwrap();
        let back: NormalizationRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, record);
    }

    #[test]
    fn reconstruction_matches_the_closed_form() {
        let quadric = {
            let space = VarSpace::new(2, 1, false);
            let zero = TruncatedSeries::zero(space, Grading::Total, 6);
            let sz = SeriesMatrix::from_entries(vec![
                vec![zero.clone(), zero.clone()],
                vec![zero.clone(), zero],
            ])
            .expect("2x2");
            ModelData::new(mat(&[&["1", "0"], &["0", "-1"]]), sz).expect("seed data")
        };
        let dense = {
            let space = VarSpace::new(2, 2, false);
            let s11 = zeta_mono(space, 8, &[(0, 1)], "1")
                .add(&zeta_mono(space, 8, &[(1, 2)], "1"));
            let s12 = zeta_mono(space, 8, &[(1, 1)], "1");
            let s22 = zeta_mono(space, 8, &[(0, 2)], "1");
            let sz = SeriesMatrix::from_entries(vec![
                vec![s11, s12.clone()],
                vec![s12, s22],
            ])
            .expect("2x2");
            ModelData::new(mat(&[&["0", "1"], &["1", "0"]]), sz).expect("seed data")
        };
        for data in [cone_data(8), wide_data(), quadric, dense] {
            assert_eq!(
                reconstruct_from_seed(&data).unwrap(),
                build_model(&data).unwrap()
            );
        }
    }

    #[test]
    fn pivot_selection_on_the_pinned_shapes() {
        let unit = symbol_from_blocks(mat(&[&["1"]]), &[mat(&[&["1"]])]);
        assert_eq!(pivot_select(&unit).unwrap().positions, vec![(1, 1)]);

        let off_diagonal = symbol_from_blocks(
            mat(&[&["1", "0"], &["0", "1"]]),
            &[mat(&[&["0", "1"], &["1", "0"]])],
        );
        assert_eq!(pivot_select(&off_diagonal).unwrap().positions, vec![(1, 2)]);

        let spanning = symbol_from_blocks(
            mat(&[&["1", "0"], &["0", "1"]]),
            &[
                mat(&[&["1", "0"], &["0", "0"]]),
                mat(&[&["0", "1"], &["1", "0"]]),
            ],
        );
        assert_eq!(
            pivot_select(&spanning).unwrap().positions,
            vec![(1, 1), (1, 2)]
        );
    }

    #[test]
    fn pivot_selection_skips_degenerate_tuples() {
        let shifted = symbol_from_blocks(
            mat(&[&["1", "0"], &["0", "1"]]),
            &[
                mat(&[&["0", "0"], &["0", "1"]]),
                mat(&[&["0", "1"], &["1", "0"]]),
            ],
        );
        assert_eq!(
            pivot_select(&shifted).unwrap().positions,
            vec![(1, 2), (2, 2)]
        );
    }

    #[test]
    fn pivot_selection_rejects_dependent_blocks() {
        let dependent = symbol_from_blocks(
            mat(&[&["1", "0"], &["0", "1"]]),
            &[
                mat(&[&["1", "0"], &["0", "0"]]),
                mat(&[&["2", "0"], &["0", "0"]]),
            ],
        );
        assert!(matches!(
            pivot_select(&dependent),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn the_reduction_substitution_is_the_frozen_inverse() {
        let space = VarSpace::new(1, 1, false);
        let f = vec![zeta_mono(space, 4, &[(0, 1)], "2").add(&zeta_mono(space, 4, &[(0, 2)], "1"))];
        let g = invert_map(&f).unwrap();
        let want = zeta_mono(space, 4, &[(0, 1)], "1/2")
            .add(&zeta_mono(space, 4, &[(0, 2)], "-1/8"))
            .add(&zeta_mono(space, 4, &[(0, 3)], "1/16"))
            .add(&zeta_mono(space, 4, &[(0, 4)], "-5/128"));
        assert_eq!(g[0], want);
    }

    #[test]
    fn reduction_pins_the_pivot_entries() {
        let space = VarSpace::new(1, 1, false);
        let sz = SeriesMatrix::from_entries(vec![vec![zeta_mono(space, 4, &[(0, 1)], "2")
            .add(&zeta_mono(space, 4, &[(0, 2)], "1"))]])
        .expect("1x1");
        let data = ModelData::new(mat(&[&["1"]]), sz).expect("seed data");

        let reduced = normal_form_reduce(&data).unwrap();
        assert_eq!(reduced.h0(), data.h0());
        assert_eq!(*reduced.sz().at(0, 0), zeta_mono(space, 4, &[(0, 1)], "1"));
        assert_eq!(normal_form_reduce(&reduced).unwrap(), reduced);
    }

    #[test]
    fn reduction_straightens_the_triangular_family() {
        let data = triangular_data(5);
        let reduced = normal_form_reduce(&data).unwrap();

        let space = VarSpace::new(2, 2, false);
        let z1 = zeta_mono(space, 5, &[(0, 1)], "1");
        let z2 = zeta_mono(space, 5, &[(1, 1)], "1");
        let zero = TruncatedSeries::zero(space, Grading::Total, 5);
        let want = ModelData::new(
            mat(&[&["1", "0"], &["0", "1"]]),
            SeriesMatrix::from_entries(vec![vec![z1, z2.clone()], vec![z2, zero]]).expect("2x2"),
        )
        .expect("seed data");
        assert_eq!(reduced, want);
        assert_eq!(normal_form_reduce(&reduced).unwrap(), reduced);
    }

    #[test]
    fn already_reduced_data_is_a_fixed_point() {
        let data = wide_data();
        assert_eq!(normal_form_reduce(&data).unwrap(), data);
    }

    #[test]
    fn reduction_preserves_the_verdicts() {
        let space = VarSpace::new(1, 1, false);
        let bent = ModelData::new(
            mat(&[&["1"]]),
            SeriesMatrix::from_entries(vec![vec![zeta_mono(space, 4, &[(0, 1)], "2")
                .add(&zeta_mono(space, 4, &[(0, 2)], "1"))]])
            .expect("1x1"),
        )
        .expect("seed data");

        for data in [bent, triangular_data(5)] {
            let reduced = normal_form_reduce(&data).unwrap();
            assert_eq!(
                reduced.is_two_nondegenerate(),
                data.is_two_nondegenerate()
            );
            let eq = build_model(&data).unwrap();
            let eq_reduced = build_model(&reduced).unwrap();
            let foc = first_order_constancy(&eq).unwrap().constant_to_first_order;
            let foc_reduced = first_order_constancy(&eq_reduced)
                .unwrap()
                .constant_to_first_order;
            assert_eq!(foc, foc_reduced);
            if foc {
                let verdict = check_realizable(&modified_symbol_at_zero(&eq).unwrap()).realizable;
                let verdict_reduced =
                    check_realizable(&modified_symbol_at_zero(&eq_reduced).unwrap()).realizable;
                assert_eq!(verdict, verdict_reduced);
            }
        }
    }

    #[test]
    fn witness_accepts_the_scaled_model() {
        let m1 = cone_data(6);
        let space = VarSpace::new(1, 1, false);
        let m2 = ModelData::new(
            mat(&[&["4"]]),
            SeriesMatrix::from_entries(vec![vec![zeta_mono(space, 6, &[(0, 1)], "1")]])
                .expect("1x1"),
        )
        .expect("seed data");
        let w = EquivalenceWitness::new(
            mat(&[&["2"]]),
            vec![zeta_mono(space, 6, &[(0, 1)], "1/4")],
        )
        .unwrap();

        let report = verify_equivalence_witness(&m1, &m2, &w).unwrap();
        assert!(report.ok);
        assert_eq!(report.order, 6);
        assert_eq!(report.mismatch, None);
    }

    #[test]
    fn witness_rejects_the_wrong_fiber_map() {
        let m1 = cone_data(6);
        let space = VarSpace::new(1, 1, false);
        let m2 = ModelData::new(
            mat(&[&["4"]]),
            SeriesMatrix::from_entries(vec![vec![zeta_mono(space, 6, &[(0, 1)], "1")]])
                .expect("1x1"),
        )
        .expect("seed data");
        let w = EquivalenceWitness::new(
            mat(&[&["2"]]),
            vec![zeta_mono(space, 6, &[(0, 1)], "1")],
        )
        .unwrap();

        let report = verify_equivalence_witness(&m1, &m2, &w).unwrap();
        assert!(!report.ok);
        assert_eq!(
            report.mismatch,
            Some(EquivalenceMismatch::QuadraticPart {
                row: 1,
                col: 1,
                monomial: "zeta1".to_string(),
                expected: gr("1"),
                found: gr("4"),
            })
        );
    }

    #[test]
    fn witness_rejects_the_wrong_hermitian_form() {
        let m1 = cone_data(6);
        let w = EquivalenceWitness::new(
            mat(&[&["2"]]),
            vec![zeta_mono(VarSpace::new(1, 1, false), 6, &[(0, 1)], "1/4")],
        )
        .unwrap();

        let report = verify_equivalence_witness(&m1, &m1, &w).unwrap();
        assert!(!report.ok);
        assert_eq!(
            report.mismatch,
            Some(EquivalenceMismatch::HermitianForm {
                row: 1,
                col: 1,
                expected: gr("1"),
                found: gr("4"),
            })
        );
    }

    #[test]
    fn witness_inversion_swaps_the_roles() {
        let m1 = cone_data(6);
        let space = VarSpace::new(1, 1, false);
        let m2 = ModelData::new(
            mat(&[&["4"]]),
            SeriesMatrix::from_entries(vec![vec![zeta_mono(space, 6, &[(0, 1)], "1")]])
                .expect("1x1"),
        )
        .expect("seed data");
        let w = EquivalenceWitness::new(
            mat(&[&["2"]]),
            vec![zeta_mono(space, 6, &[(0, 1)], "1/4")],
        )
        .unwrap();

        let inverse = w.invert().unwrap();
        assert_eq!(inverse.u(), &mat(&[&["1/2"]]));
        assert_eq!(inverse.g()[0], zeta_mono(space, 6, &[(0, 1)], "4"));
        assert!(verify_equivalence_witness(&m2, &m1, &inverse).unwrap().ok);
        assert!(!verify_equivalence_witness(&m1, &m2, &inverse).unwrap().ok);
    }

    #[test]
    fn witness_construction_rejects_bad_data() {
        let space = VarSpace::new(1, 1, false);
        let good_g = vec![zeta_mono(space, 4, &[(0, 1)], "1")];
        assert!(matches!(
            EquivalenceWitness::new(mat(&[&["0"]]), good_g.clone()),
            Err(Error::Singular(_))
        ));

        let constant = vec![good_g[0].add(&TruncatedSeries::one(space, Grading::Total, 4))];
        assert!(matches!(
            EquivalenceWitness::new(mat(&[&["1"]]), constant),
            Err(Error::NonzeroConstantTerm)
        ));

        let z_var = vec![TruncatedSeries::var(space, Grading::Total, 4, Var::z(0))];
        assert!(matches!(
            EquivalenceWitness::new(mat(&[&["1"]]), z_var),
            Err(Error::Invalid(_))
        ));

        let wide = VarSpace::new(1, 2, false);
        let short = vec![zeta_mono(wide, 4, &[(0, 1)], "1")];
        assert!(matches!(
            EquivalenceWitness::new(mat(&[&["1"]]), short),
            Err(Error::Dimension(_))
        ));

        let folded = vec![
            zeta_mono(wide, 4, &[(0, 1)], "1").add(&zeta_mono(wide, 4, &[(1, 1)], "1")),
            zeta_mono(wide, 4, &[(0, 1)], "1").add(&zeta_mono(wide, 4, &[(1, 1)], "1")),
        ];
        assert!(matches!(
            EquivalenceWitness::new(mat(&[&["1"]]), folded),
            Err(Error::SingularLinearPart)
        ));
    }

    #[test]
    fn witness_round_trips_through_json() {
        let space = VarSpace::new(1, 1, false);
        let w = EquivalenceWitness::new(
            mat(&[&["2"]]),
            vec![zeta_mono(space, 6, &[(0, 1)], "1/4")],
        )
        .unwrap();
        let text = serde_json::to_string(&w).unwrap();
        let back: EquivalenceWitness = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);

        let tampered = text.replace("\"2\"", "\"0\"");
        assert!(serde_json::from_str::<EquivalenceWitness>(&tampered).is_err());
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let m1 = cone_data(6);
        let wide = wide_data();
        let w = EquivalenceWitness::new(
            mat(&[&["2"]]),
            vec![zeta_mono(VarSpace::new(1, 1, false), 6, &[(0, 1)], "1/4")],
        )
        .unwrap();
        assert!(matches!(
            verify_equivalence_witness(&m1, &wide, &w),
            Err(Error::Dimension(_))
        ));
    }
}
