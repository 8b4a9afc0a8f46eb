//! Explicit infinitesimal symmetries of model hypersurfaces as holomorphic
//! vector fields with exact series coefficients, and a symbolic tangency
//! verifier.
//!
//! A field stores the `w`-free part of its `d/dw` coefficient plus a scalar
//! for the `w * d/dw` direction (used by the scaling field), and series
//! coefficients for the `z` and `zeta` directions; all coefficients are
//! holomorphic (no conjugated variables, no `t`). Tangency is decided by
//! substituting `Re(w) = P`, `w = P + i t` into the field applied to the
//! defining function and checking that the real part vanishes identically to
//! the working order.

use crate::error::{Error, Result};
use crate::lie::{sigma, CspElement};
use crate::linalg::{rank, span_solve, vectorize, Mat};
use crate::model::DefiningEquation;
use crate::realize::SymbolInput;
use crate::scalar::GaussianRational;
use crate::series::{Grading, SeriesMatrix, TruncatedSeries, Var, VarKind, VarSpace};
use serde::{Deserialize, Serialize};

/// A holomorphic vector field `Xw d/dw + sum Xz_j d/dz_j + sum Xzeta_a d/dzeta_a`
/// with `Xw = xw + w_linear * w`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct HoloVectorField {
    xw: TruncatedSeries,
    w_linear: GaussianRational,
    xz: Vec<TruncatedSeries>,
    xzeta: Vec<TruncatedSeries>,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    #[serde(rename = "Xw")]
    xw: TruncatedSeries,
    w_linear: GaussianRational,
    #[serde(rename = "Xz")]
    xz: Vec<TruncatedSeries>,
    #[serde(rename = "Xzeta")]
    xzeta: Vec<TruncatedSeries>,
}

impl TryFrom<FieldRepr> for HoloVectorField {
    type Error = Error;
    fn try_from(r: FieldRepr) -> Result<Self> {
        HoloVectorField::new(r.xw, r.w_linear, r.xz, r.xzeta)
    }
}

impl From<HoloVectorField> for FieldRepr {
    fn from(f: HoloVectorField) -> Self {
        FieldRepr { xw: f.xw, w_linear: f.w_linear, xz: f.xz, xzeta: f.xzeta }
    }
}

fn expect_holomorphic(series: &TruncatedSeries, what: &str) -> Result<()> {
    let space = series.space();
    for (exp, _) in series.terms() {
        let zb = TruncatedSeries::kind_degree(&space, exp, VarKind::ZBar);
        let cb = TruncatedSeries::kind_degree(&space, exp, VarKind::ZetaBar);
        let t = TruncatedSeries::kind_degree(&space, exp, VarKind::T);
        if zb != 0 || cb != 0 || t != 0 {
            return Err(Error::Invalid(format!(
                "{what} must depend on holomorphic variables only"
            )));
        }
    }
    Ok(())
}

impl HoloVectorField {
    /// Validates coefficient spaces, counts, and holomorphy.
    pub fn new(
        xw: TruncatedSeries,
        w_linear: GaussianRational,
        xz: Vec<TruncatedSeries>,
        xzeta: Vec<TruncatedSeries>,
    ) -> Result<Self> {
        let space = xw.space();
        if space.has_t {
            return Err(Error::Invalid(
                "field coefficients live in the t-free space".into(),
            ));
        }
        if xz.len() != space.s || xzeta.len() != space.r {
            return Err(Error::Dimension(format!(
                "expected {} z-coefficients and {} zeta-coefficients",
                space.s,
                space.r
            )));
        }
        for series in xz.iter().chain(xzeta.iter()) {
            if series.space() != space
                || series.order() != xw.order()
                || series.grading() != xw.grading()
            {
                return Err(Error::Invalid(
                    "all field coefficients must share space, grading and order".into(),
                ));
            }
        }
        expect_holomorphic(&xw, "the w-coefficient")?;
        for series in &xz {
            expect_holomorphic(series, "a z-coefficient")?;
        }
        for series in &xzeta {
            expect_holomorphic(series, "a zeta-coefficient")?;
        }
        Ok(Self { xw, w_linear, xz, xzeta })
    }

    /// The zero field on `s` z-directions and `r` zeta-directions.
    pub fn zero(s: usize, r: usize, order: u32) -> Self {
        let space = VarSpace::new(s, r, false);
        let zero = TruncatedSeries::zero(space, Grading::Total, order);
        Self {
            xw: zero.clone(),
            w_linear: GaussianRational::zero(),
            xz: vec![zero.clone(); s],
            xzeta: vec![zero; r],
        }
    }

    /// The `w`-free part of the `d/dw` coefficient.
    pub fn xw(&self) -> &TruncatedSeries {
        &self.xw
    }

    /// Coefficient of `w * d/dw`.
    pub fn w_linear(&self) -> &GaussianRational {
        &self.w_linear
    }

    /// Coefficients of the `d/dz_j`.
    pub fn xz(&self) -> &[TruncatedSeries] {
        &self.xz
    }

    /// Coefficients of the `d/dzeta_a`.
    pub fn xzeta(&self) -> &[TruncatedSeries] {
        &self.xzeta
    }

    /// The coefficient space.
    pub fn space(&self) -> VarSpace {
        self.xw.space()
    }

    /// Truncation order of the coefficients.
    pub fn order(&self) -> u32 {
        self.xw.order()
    }

    pub fn is_zero(&self) -> bool {
        self.xw.is_zero()
            && self.w_linear.is_zero()
            && self.xz.iter().all(TruncatedSeries::is_zero)
            && self.xzeta.iter().all(TruncatedSeries::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            xw: self.xw.add(&other.xw),
            w_linear: &self.w_linear + &other.w_linear,
            xz: self.xz.iter().zip(&other.xz).map(|(a, b)| a.add(b)).collect(),
            xzeta: self.xzeta.iter().zip(&other.xzeta).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            xw: self.xw.scale(c),
            w_linear: &self.w_linear * c,
            xz: self.xz.iter().map(|s| s.scale(c)).collect(),
            xzeta: self.xzeta.iter().map(|s| s.scale(c)).collect(),
        }
    }

    pub fn truncate(&self, order: u32) -> Self {
        Self {
            xw: self.xw.truncate(order),
            w_linear: self.w_linear.clone(),
            xz: self.xz.iter().map(|s| s.truncate(order)).collect(),
            xzeta: self.xzeta.iter().map(|s| s.truncate(order)).collect(),
        }
    }
}

/// Lifts a scalar row vector to a 1 x n series matrix.
fn lift_row(
    row: &[GaussianRational],
    space: VarSpace,
    order: u32,
) -> SeriesMatrix {
    SeriesMatrix::from_scalar_matrix(&vec![row.to_vec()], space, Grading::Total, order)
}

/// The transversal symmetry attached to `(a, b)`: the field whose `d/dw`
/// part is `2(b i + (conj(a)^T conj(H(0, zetab)) + Xz(zeta) conj(S(0, zetab))) z)`
/// and whose `d/dz` part is the row
/// `(a^T H0 - conj(a)^T S(zeta, 0) + conj(a)^T S(0,0)) H(zeta, 0)^{-1}`.
pub fn transversal_symmetry(
    eq: &DefiningEquation,
    a: &[GaussianRational],
    b: &GaussianRational,
) -> Result<HoloVectorField> {
    let s = eq.s();
    if a.len() != s {
        return Err(Error::Dimension(format!("a must have length {s}")));
    }
    if b != &b.conj() {
        return Err(Error::Invalid("b must be real".into()));
    }
    let space = eq.h().space();
    let d = eq.order();
    let abar: Vec<GaussianRational> = a.iter().map(GaussianRational::conj).collect();

    let kill_bar = |m: &SeriesMatrix| m.set_vars_zero(|v| v.kind == VarKind::ZetaBar);
    let kill_hol = |m: &SeriesMatrix| m.set_vars_zero(|v| v.kind == VarKind::Zeta);
    let h_zeta0 = kill_bar(eq.h());
    let s_zeta0 = kill_bar(eq.s_mat());
    let h_0conj = kill_hol(eq.h()).conjugate();
    let s_0conj = kill_hol(eq.s_mat()).conjugate();
    let h0 = eq.h().eval_zero();
    let s00 = eq.s_mat().eval_zero();

    let lead = lift_row(&crate::linalg::mat_vec(&crate::linalg::mat_transpose(&h0), a), space, d);
    let drift = lift_row(&abar, space, d).mul(&s_zeta0);
    let base = lift_row(&crate::linalg::mat_vec(&crate::linalg::mat_transpose(&s00), &abar), space, d);
    let xz_row = lead.sub(&drift).add(&base).mul(&h_zeta0.inverse()?);

    let ww_row = lift_row(&abar, space, d)
        .mul(&h_0conj)
        .add(&xz_row.mul(&s_0conj));
    let two = GaussianRational::parse("2").expect("literal");
    let mut xw = TruncatedSeries::monomial(
        space,
        Grading::Total,
        d,
        vec![0; space.num_vars()],
        b * &GaussianRational::parse("2i").expect("literal"),
    );
    for j in 0..s {
        let z_j = TruncatedSeries::var(space, Grading::Total, d, Var::z(j));
        xw = xw.add(&ww_row.at(0, j).mul(&z_j).scale(&two));
    }
    let xz = (0..s).map(|j| xz_row.at(0, j).clone()).collect();
    let xzeta = vec![TruncatedSeries::zero(space, Grading::Total, d); eq.r()];
    HoloVectorField::new(xw, GaussianRational::zero(), xz, xzeta)
}

/// The isotropy symmetry attached to an element `x` acting through the
/// stabilizer: `Xz = z^T y` for `y = (x - (H0^T)^{-1} x^* H0^T) / 2` and
/// `Xzeta_a = sum_b c_ab zeta_b`, where the `c_ab` are the exact span
/// coefficients of the bracket of `y` with each embedded kernel generator.
///
/// Fails when that bracket leaves the span of the generators.
pub fn isotropy_symmetry(
    input: &SymbolInput,
    x: &Mat,
    order: u32,
) -> Result<HoloVectorField> {
    let s = input.s();
    let r = input.r();
    let x_elem = CspElement::from_l(x.clone())?;
    if x_elem.s() != s {
        return Err(Error::Dimension(format!("x must be {s}x{s}")));
    }
    let half = GaussianRational::parse("1/2").expect("literal");
    let y = x_elem.add(&sigma(input.inv(), &x_elem)?).scale(&half);
    let generators: Vec<CspElement> = input
        .pairs()
        .iter()
        .map(|(s02, omega)| {
            CspElement::new(
                s,
                GaussianRational::zero(),
                omega.clone(),
                s02.clone(),
                crate::linalg::mat_zero(s, s),
                vec![GaussianRational::zero(); s],
                vec![GaussianRational::zero(); s],
                GaussianRational::zero(),
            )
        })
        .collect::<Result<_>>()?;
    let gens: Vec<Vec<GaussianRational>> = generators
        .iter()
        .map(|e| vectorize(&e.assemble()))
        .collect();
    let mut c = Vec::with_capacity(r);
    for e_a in &generators {
        let bracket = y.bracket(e_a);
        let coeffs = span_solve(&gens, &vectorize(&bracket.assemble())).ok_or_else(|| {
            Error::Precondition(
                "the adjoint action of x does not preserve the kernel directions".into(),
            )
        })?;
        c.push(coeffs);
    }
    let space = VarSpace::new(s, r, false);
    let mut xz = Vec::with_capacity(s);
    for j in 0..s {
        let mut series = TruncatedSeries::zero(space, Grading::Total, order);
        for k in 0..s {
            let z_k = TruncatedSeries::var(space, Grading::Total, order, Var::z(k));
            series = series.add(&z_k.scale(&y.l()[k][j]));
        }
        xz.push(series);
    }
    let mut xzeta = Vec::with_capacity(r);
    for c_a in &c {
        let mut series = TruncatedSeries::zero(space, Grading::Total, order);
        for (b, coeff) in c_a.iter().enumerate() {
            let zeta_b = TruncatedSeries::var(space, Grading::Total, order, Var::zeta(b));
            series = series.add(&zeta_b.scale(coeff));
        }
        xzeta.push(series);
    }
    HoloVectorField::new(
        TruncatedSeries::zero(space, Grading::Total, order),
        GaussianRational::zero(),
        xz,
        xzeta,
    )
}

/// The scaling field `2 w d/dw + sum_j z_j d/dz_j`.
pub fn euler_symmetry(s: usize, r: usize, order: u32) -> HoloVectorField {
    let space = VarSpace::new(s, r, false);
    let xz = (0..s)
        .map(|j| TruncatedSeries::var(space, Grading::Total, order, Var::z(j)))
        .collect();
    HoloVectorField::new(
        TruncatedSeries::zero(space, Grading::Total, order),
        GaussianRational::parse("2").expect("literal"),
        xz,
        vec![TruncatedSeries::zero(space, Grading::Total, order); r],
    )
    .expect("zero and linear coefficients are holomorphic")
}

/// Applies the derivation part of `x` to a `w`-free holomorphic series.
fn apply_field(x: &HoloVectorField, g: &TruncatedSeries) -> TruncatedSeries {
    let mut out = TruncatedSeries::zero(g.space(), g.grading(), g.order().saturating_sub(1));
    for (j, coeff) in x.xz.iter().enumerate() {
        out = out.add(&coeff.truncate(out.order()).mul(&g.differentiate(Var::z(j))));
    }
    for (a, coeff) in x.xzeta.iter().enumerate() {
        out = out.add(&coeff.truncate(out.order()).mul(&g.differentiate(Var::zeta(a))));
    }
    out
}

/// The vector-field bracket `[x, y]`, truncated one order below the inputs.
pub fn holo_bracket(x: &HoloVectorField, y: &HoloVectorField) -> HoloVectorField {
    let w = x.order().saturating_sub(1);
    let xw = apply_field(x, &y.xw)
        .add(&x.xw.truncate(w).scale(&y.w_linear))
        .sub(&apply_field(y, &x.xw))
        .sub(&y.xw.truncate(w).scale(&x.w_linear));
    let xz = (0..x.xz.len())
        .map(|j| apply_field(x, &y.xz[j]).sub(&apply_field(y, &x.xz[j])))
        .collect();
    let xzeta = (0..x.xzeta.len())
        .map(|a| apply_field(x, &y.xzeta[a]).sub(&apply_field(y, &x.xzeta[a])))
        .collect();
    HoloVectorField::new(xw, GaussianRational::zero(), xz, xzeta)
        .expect("bracket of holomorphic fields is holomorphic")
}

/// Outcome of the tangency check, with the earliest offending monomial when
/// the residual is nonzero.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TangencyReport {
    pub ok: bool,
    /// Order to which the residual was verified.
    pub order: u32,
    pub monomial: Option<String>,
    pub value: Option<GaussianRational>,
}

/// Checks that the real part of the field applied to `Re(w) - P` vanishes on
/// the hypersurface: substitutes `w = P + i t` and requires the residual
/// series in `(z, zb, zeta, zetab, t)` to vanish identically to the
/// equation's order.
pub fn verify_tangency(eq: &DefiningEquation, x: &HoloVectorField) -> Result<TangencyReport> {
    let s = eq.s();
    let r = eq.r();
    if x.space() != VarSpace::new(s, r, false) {
        return Err(Error::Dimension(
            "field and equation live in different variable spaces".into(),
        ));
    }
    let w = eq.order().min(x.order());
    let space_t = VarSpace::new(s, r, true);
    let p = eq.assemble_p().reinterpret(space_t, Grading::Total, eq.order() + 2)?;
    let half = GaussianRational::parse("1/2").expect("literal");
    let lift = |series: &TruncatedSeries| -> Result<TruncatedSeries> {
        series.truncate(w).reinterpret(space_t, Grading::Total, w)
    };
    let mut app = lift(x.xw())?.scale(&half);
    if !x.w_linear().is_zero() {
        let mut t_exp = vec![0u32; space_t.num_vars()];
        t_exp[space_t.num_vars() - 1] = 1;
        let it = TruncatedSeries::monomial(
            space_t,
            Grading::Total,
            w,
            t_exp,
            GaussianRational::parse("1i").expect("literal"),
        );
        let w_sub = p.truncate(w).add(&it);
        app = app.add(&w_sub.scale(&(x.w_linear() * &half)));
    }
    for (j, coeff) in x.xz().iter().enumerate() {
        app = app.sub(&lift(coeff)?.mul(&p.differentiate(Var::z(j)).truncate(w)));
    }
    for (a, coeff) in x.xzeta().iter().enumerate() {
        app = app.sub(&lift(coeff)?.mul(&p.differentiate(Var::zeta(a)).truncate(w)));
    }
    let residual = app.add(&app.conjugate()).scale(&half);
    match residual.first_term() {
        None => Ok(TangencyReport { ok: true, order: w, monomial: None, value: None }),
        Some((exp, value)) => Ok(TangencyReport {
            ok: false,
            order: w,
            monomial: Some(TruncatedSeries::monomial_name(&space_t, &exp)),
            value: Some(value),
        }),
    }
}

/// Real-linear independence helper: stacks the real and imaginary parts of
/// the degree <= 1 coefficients of each field and returns the rank.
pub fn real_span_dimension(fields: &[HoloVectorField]) -> usize {
    let mut rows = Vec::new();
    for f in fields {
        let mut row = Vec::new();
        let mut push = |c: &GaussianRational| {
            let conj = c.conj();
            let re_twice = c + &conj;
            let im_twice = &(c - &conj) * &GaussianRational::parse("-1i").expect("literal");
            row.push(re_twice);
            row.push(im_twice);
        };
        let space = f.space();
        let origin = vec![0u32; space.num_vars()];
        push(&f.xw().coeff(&origin));
        push(f.w_linear());
        for series in f.xz().iter().chain(f.xzeta().iter()) {
            push(&series.coeff(&origin));
            for pos in 0..space.num_vars() {
                let mut exp = origin.clone();
                exp[pos] = 1;
                push(&series.coeff(&exp));
            }
        }
        for pos in 0..space.num_vars() {
            let mut exp = origin.clone();
            exp[pos] = 1;
            push(&f.xw().coeff(&exp));
        }
        rows.push(row);
    }
    rank(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Involution;
    use crate::linalg::{mat_identity, mat_zero};
    use crate::model::{build_model, ModelData};
    use crate::realize::realize_model;

    fn gr(text: &str) -> GaussianRational {
        GaussianRational::parse(text).unwrap()
    }

    fn mat(entries: &[&[&str]]) -> Mat {
        entries
            .iter()
            .map(|row| row.iter().map(|c| gr(c)).collect())
            .collect()
    }

    /// s=1, r=1, H0=[1], S(zeta)=[zeta1].
    fn cone_eq(d: u32) -> DefiningEquation {
        let space = VarSpace::new(1, 1, false);
        let sz = SeriesMatrix::from_fn(1, 1, space, Grading::Total, d, |_, _| {
            TruncatedSeries::var(space, Grading::Total, d, Var::zeta(0))
        });
        build_model(&ModelData::new(vec![vec![gr("1")]], sz).unwrap()).unwrap()
    }

    /// s=2, r=2 model with non-identity Hermitian form.
    fn wide_eq(d: u32) -> DefiningEquation {
        let space = VarSpace::new(2, 2, false);
        let h0 = mat(&[&["1", "1i"], &["-1i", "2"]]);
        let zero = TruncatedSeries::zero(space, Grading::Total, d);
        let z1 = TruncatedSeries::var(space, Grading::Total, d, Var::zeta(0));
        let z2 = TruncatedSeries::var(space, Grading::Total, d, Var::zeta(1));
        let sz = SeriesMatrix::from_entries(vec![vec![z1, z2.clone()], vec![z2, zero]]).unwrap();
        build_model(&ModelData::new(h0, sz).unwrap()).unwrap()
    }

    /// s=2, r=1, H0=Id, S02=E11, Omega=diag(1,0).
    fn corner_input() -> SymbolInput {
        SymbolInput::new(
            Involution::new(mat_identity(2), gr("1")).unwrap(),
            vec![(
                mat(&[&["1", "0"], &["0", "0"]]),
                mat(&[&["1", "0"], &["0", "0"]]),
            )],
        )
        .unwrap()
    }

    /// s=2, r=2, H0=Id, zero frame blocks.
    fn resting_input() -> SymbolInput {
        SymbolInput::new(
            Involution::new(mat_identity(2), gr("1")).unwrap(),
            vec![
                (mat(&[&["1", "0"], &["0", "0"]]), mat_zero(2, 2)),
                (mat(&[&["0", "1"], &["1", "0"]]), mat_zero(2, 2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn pure_imaginary_translation_is_a_symmetry() {
        let eq = cone_eq(6);
        let field = transversal_symmetry(&eq, &[gr("0")], &gr("1")).unwrap();
        let space = field.space();
        assert_eq!(
            field.xw(),
            &TruncatedSeries::monomial(space, Grading::Total, 6, vec![0; 4], gr("2i"))
        );
        assert!(field.xz()[0].is_zero());
        assert!(field.xzeta()[0].is_zero());
        assert!(verify_tangency(&eq, &field).unwrap().ok);
    }

    #[test]
    fn cone_field_matches_the_normalized_shortcut() {
        let eq = cone_eq(6);
        let field = transversal_symmetry(&eq, &[gr("1")], &gr("0")).unwrap();
        let space = field.space();
        let z = TruncatedSeries::var(space, Grading::Total, 6, Var::z(0));
        let zeta = TruncatedSeries::var(space, Grading::Total, 6, Var::zeta(0));
        let one = TruncatedSeries::monomial(space, Grading::Total, 6, vec![0; 4], gr("1"));
        assert_eq!(field.xw(), &z.scale(&gr("2")));
        assert_eq!(&field.xz()[0], &one.sub(&zeta));
        assert!(verify_tangency(&eq, &field).unwrap().ok);
    }

    #[test]
    fn random_looking_transversal_fields_are_tangent() {
        let eq = wide_eq(5);
        for (a, b) in [
            (vec![gr("1+1i"), gr("2")], gr("3/2")),
            (vec![gr("-1/3"), gr("1i")], gr("0")),
            (vec![gr("2-1i"), gr("-5/7+1i")], gr("-2")),
        ] {
            let field = transversal_symmetry(&eq, &a, &b).unwrap();
            let report = verify_tangency(&eq, &field).unwrap();
            assert!(report.ok, "failed at {:?}", report.monomial);
        }
    }

    #[test]
    fn quadric_translations_are_tangent() {
        let space = VarSpace::new(2, 1, false);
        let sz = SeriesMatrix::zero(2, 2, space, Grading::Total, 6);
        let eq = build_model(&ModelData::new(mat_identity(2), sz).unwrap()).unwrap();
        let field = transversal_symmetry(&eq, &[gr("1i"), gr("2")], &gr("1")).unwrap();
        assert!(verify_tangency(&eq, &field).unwrap().ok);
    }

    #[test]
    fn sign_flips_are_caught() {
        let eq = cone_eq(6);
        let good = transversal_symmetry(&eq, &[gr("1")], &gr("0")).unwrap();
        let space = good.space();
        let zeta = TruncatedSeries::var(space, Grading::Total, 6, Var::zeta(0));
        let one = TruncatedSeries::monomial(space, Grading::Total, 6, vec![0; 4], gr("1"));
        let bad = HoloVectorField::new(
            good.xw().clone(),
            GaussianRational::zero(),
            vec![one.add(&zeta)],
            vec![TruncatedSeries::zero(space, Grading::Total, 6)],
        )
        .unwrap();
        let report = verify_tangency(&eq, &bad).unwrap();
        assert!(!report.ok);
        let name = report.monomial.unwrap();
        assert_eq!(
            name,
            TruncatedSeries::monomial_name(&VarSpace::new(1, 1, true), &[0, 1, 1, 0, 0])
        );
        assert_eq!(report.value.unwrap(), gr("-1"));
    }

    #[test]
    fn euler_field_is_tangent_to_every_model() {
        for eq in [cone_eq(6), wide_eq(5)] {
            let field = euler_symmetry(eq.s(), eq.r(), eq.order());
            assert!(verify_tangency(&eq, &field).unwrap().ok);
        }
    }

    #[test]
    fn heisenberg_structure_constants_come_from_the_hermitian_form() {
        let eq = wide_eq(5);
        let h0 = eq.h().eval_zero();
        let center = transversal_symmetry(&eq, &[gr("0"), gr("0")], &gr("1")).unwrap();
        let basis_a = [
            vec![gr("1"), gr("0")],
            vec![gr("0"), gr("1")],
            vec![gr("1i"), gr("0")],
            vec![gr("0"), gr("1i")],
        ];
        let fields: Vec<HoloVectorField> = basis_a
            .iter()
            .map(|a| transversal_symmetry(&eq, a, &gr("0")).unwrap())
            .collect();
        for (i, a) in basis_a.iter().enumerate() {
            for (j, b) in basis_a.iter().enumerate() {
                let bracket = holo_bracket(&fields[i], &fields[j]);
                let pairing: GaussianRational = (0..2)
                    .map(|p| {
                        (0..2)
                            .map(|q| &(&a[p] * &h0[p][q]) * &b[q].conj())
                            .fold(GaussianRational::zero(), |acc, v| &acc + &v)
                    })
                    .fold(GaussianRational::zero(), |acc, v| &acc + &v);
                let lambda = &(&pairing - &pairing.conj()) * &gr("-1i");
                let expected = center.truncate(bracket.order()).scale(&lambda);
                assert_eq!(bracket, expected);
            }
            let with_center = holo_bracket(&fields[i], &center);
            assert!(with_center.is_zero());
        }
        let mut all = fields.clone();
        all.push(center);
        assert_eq!(real_span_dimension(&all), 5);
    }

    #[test]
    fn euler_bracket_grades_the_translations() {
        let eq = wide_eq(5);
        let euler = euler_symmetry(2, 2, 5);
        let v = transversal_symmetry(&eq, &[gr("1"), gr("1i")], &gr("0")).unwrap();
        let center = transversal_symmetry(&eq, &[gr("0"), gr("0")], &gr("1")).unwrap();
        assert_eq!(
            holo_bracket(&euler, &v),
            v.truncate(4).scale(&gr("-1"))
        );
        assert_eq!(
            holo_bracket(&euler, &center),
            center.truncate(4).scale(&gr("-2"))
        );
    }

    #[test]
    fn isotropy_rotation_of_the_corner_model_is_tangent() {
        let input = corner_input();
        let x = mat(&[&["0", "0"], &["0", "1i"]]);
        let field = isotropy_symmetry(&input, &x, 6).unwrap();
        let space = field.space();
        let z2 = TruncatedSeries::var(space, Grading::Total, 6, Var::z(1));
        assert!(field.xz()[0].is_zero());
        assert_eq!(&field.xz()[1], &z2.scale(&gr("1i")));
        assert!(field.xzeta()[0].is_zero());
        let eq = build_model(&realize_model(&input, 6).unwrap()).unwrap();
        assert!(verify_tangency(&eq, &field).unwrap().ok);
    }

    #[test]
    fn scalar_isotropy_rotates_the_kernel_directions() {
        let input = resting_input();
        let x = mat(&[&["1i", "0"], &["0", "1i"]]);
        let field = isotropy_symmetry(&input, &x, 6).unwrap();
        let space = field.space();
        for j in 0..2 {
            let z_j = TruncatedSeries::var(space, Grading::Total, 6, Var::z(j));
            assert_eq!(&field.xz()[j], &z_j.scale(&gr("1i")));
        }
        for a in 0..2 {
            let zeta_a = TruncatedSeries::var(space, Grading::Total, 6, Var::zeta(a));
            assert_eq!(&field.xzeta()[a], &zeta_a.scale(&gr("2i")));
        }
        let eq = build_model(&realize_model(&input, 6).unwrap()).unwrap();
        assert!(verify_tangency(&eq, &field).unwrap().ok);
    }

    #[test]
    fn isotropy_rejects_decomposition_breakers() {
        let input = corner_input();
        let x = mat(&[&["1i", "0"], &["0", "0"]]);
        assert!(matches!(
            isotropy_symmetry(&input, &x, 6),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_isotropy_gives_the_zero_field() {
        let field = isotropy_symmetry(&corner_input(), &mat_zero(2, 2), 6).unwrap();
        assert!(field.is_zero());
    }

    #[test]
    fn fields_round_trip_through_json() {
        let eq = wide_eq(5);
        let field = transversal_symmetry(&eq, &[gr("1+1i"), gr("-2")], &gr("1/2")).unwrap();
        let text = serde_json::to_string(&field).unwrap();
        let back: HoloVectorField = serde_json::from_str(&text).unwrap();
        assert_eq!(back, field);

        let euler = euler_symmetry(2, 2, 5);
        let text = serde_json::to_string(&euler).unwrap();
        let back: HoloVectorField = serde_json::from_str(&text).unwrap();
        assert_eq!(back, euler);
    }
}
