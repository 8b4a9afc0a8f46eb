//! Realization of abstract modified symbols as model data: the quadratic and
//! frame blocks `(S02_a, Omega_a)` are integrated to a full `S(zeta)` by
//! truncated matrix exponentials in the assembled block representation, and
//! the resulting model provably carries the input symbol back at the origin.
//!
//! The exponential terminates because the assembled generator is linear in
//! `zeta`; the product `exp(X) exp(-pi00 X)` must differ from the identity in
//! the quadratic block alone, and this purity is asserted, not assumed.

use crate::error::{Error, Result};
use crate::lie::{CspElement, Involution};
use crate::linalg::{mat_identity, rank, span_contains, vectorize, Mat};
use crate::model::{build_model, ModelData};
use crate::series::{Grading, SeriesMatrix, TruncatedSeries, Var, VarSpace};
use crate::symbols::{
    bigraded_symbol_at_zero, check_realizable, first_order_constancy, modified_symbol_at_zero,
    BigradedSymbol, ModifiedSymbol,
};
use serde::Serialize;

/// A realizable abstract modified symbol presented by its block pairs
/// `(S02_a, Omega_a)`; construction validates shapes, symmetry, linear
/// independence of the quadratic blocks, and realizability.
#[derive(Clone, PartialEq, Debug)]
pub struct SymbolInput {
    inv: Involution,
    pairs: Vec<(Mat, Mat)>,
}

impl SymbolInput {
    /// Validates the pairs and the realizability of the induced symbol.
    pub fn new(inv: Involution, pairs: Vec<(Mat, Mat)>) -> Result<Self> {
        let input = Self { inv, pairs };
        let quad: Vec<Vec<_>> = input.pairs.iter().map(|(s02, _)| vectorize(s02)).collect();
        if rank(&quad) != input.pairs.len() {
            return Err(Error::Invalid(
                "quadratic blocks must be linearly independent".into(),
            ));
        }
        let sym = input.to_modified_symbol()?;
        if !check_realizable(&sym).realizable {
            return Err(Error::Precondition(
                "the symbol fails the realizability span conditions".into(),
            ));
        }
        Ok(input)
    }

    /// Reads the pairs off a modified symbol (realizability re-checked).
    pub fn from_modified_symbol(sym: &ModifiedSymbol) -> Result<Self> {
        let pairs = sym
            .base()
            .s02_blocks()
            .into_iter()
            .zip(sym.omega().iter().cloned())
            .collect();
        Self::new(sym.base().inv().clone(), pairs)
    }

    /// The equivalent modified-symbol view.
    pub fn to_modified_symbol(&self) -> Result<ModifiedSymbol> {
        let s02: Vec<Mat> = self.pairs.iter().map(|(s02, _)| s02.clone()).collect();
        let omega = self.pairs.iter().map(|(_, omega)| omega.clone()).collect();
        let base = BigradedSymbol::from_s02_blocks(self.inv.clone(), &s02)?;
        ModifiedSymbol::new(base, omega)
    }

    /// The involution data `(H0, e^{ih})`.
    pub fn inv(&self) -> &Involution {
        &self.inv
    }

    /// The block pairs `(S02_a, Omega_a)`.
    pub fn pairs(&self) -> &[(Mat, Mat)] {
        &self.pairs
    }

    /// Number of `z` variables.
    pub fn s(&self) -> usize {
        self.inv.s()
    }

    /// Number of kernel directions.
    pub fn r(&self) -> usize {
        self.pairs.len()
    }
}

/// Assembles `sum_a zeta_a * block_a` as a series matrix at the given order.
fn linear_pencil(
    blocks: &[Mat],
    space: VarSpace,
    order: u32,
) -> SeriesMatrix {
    let n = blocks[0].len();
    let mut x = SeriesMatrix::zero(n, n, space, Grading::Total, order);
    for (a, block) in blocks.iter().enumerate() {
        let zeta = TruncatedSeries::var(space, Grading::Total, order, Var::zeta(a));
        x = x.add(&SeriesMatrix::from_scalar_matrix(block, space, Grading::Total, order).scale_series(&zeta));
    }
    x
}

/// Integrates the symbol to model data at the given truncation order:
/// `S(zeta)` is the quadratic block of `exp(X) exp(-pi00 X)` for
/// `X = sum_a zeta_a e_a`, where `e_a` embeds `(Omega_a, S02_a)`.
pub fn realize_model(input: &SymbolInput, order: u32) -> Result<ModelData> {
    let s = input.s();
    let r = input.r();
    if r == 0 {
        return Err(Error::Dimension("need at least one kernel direction".into()));
    }
    let space = VarSpace::new(s, r, false);
    let full: Vec<Mat> = input
        .pairs
        .iter()
        .map(|(s02, omega)| {
            CspElement::new(
                s,
                crate::scalar::GaussianRational::zero(),
                omega.clone(),
                s02.clone(),
                crate::linalg::mat_zero(s, s),
                vec![crate::scalar::GaussianRational::zero(); s],
                vec![crate::scalar::GaussianRational::zero(); s],
                crate::scalar::GaussianRational::zero(),
            )
            .map(|e| e.assemble())
        })
        .collect::<Result<_>>()?;
    let frame: Vec<Mat> = input
        .pairs
        .iter()
        .map(|(_, omega)| CspElement::from_l(omega.clone()).map(|e| e.assemble()))
        .collect::<Result<_>>()?;
    let x = linear_pencil(&full, space, order);
    let x_frame = linear_pencil(&frame, space, order);
    let product = x.exp()?.mul(&x_frame.neg().exp()?);
    let n = 2 * s + 2;
    let defect = product.sub(&SeriesMatrix::identity(n, space, Grading::Total, order));
    for i in 0..n {
        for j in 0..n {
            let inside = (1..s + 1).contains(&i) && (s + 1..2 * s + 1).contains(&j);
            if !inside && !defect.at(i, j).is_zero() {
                return Err(Error::Invalid(format!(
                    "realization defect has an entry outside the quadratic block at ({i}, {j})"
                )));
            }
        }
    }
    ModelData::new(
        input.inv.h().clone(),
        defect.submatrix(1, s + 1, s + 1, 2 * s + 1),
    )
}

/// One discrepancy found while round-tripping a symbol through realization.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub enum RoundtripFailure {
    HermitianForm { expected: Mat, found: Mat },
    QuadraticBlock { alpha: usize, expected: Mat, found: Mat },
    NotConstantToFirstOrder,
    FrameOutsideStabilizer { alpha: usize, difference: Mat },
}

/// Outcome of the realization round-trip check.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct RoundtripReport {
    pub ok: bool,
    pub failures: Vec<RoundtripFailure>,
}

/// Realizes the symbol, rebuilds the defining equation, and checks that the
/// symbol read back at the origin matches: the Hermitian form and quadratic
/// blocks exactly, and the frame blocks up to stabilizer directions.
pub fn verify_roundtrip(input: &SymbolInput, order: u32) -> Result<RoundtripReport> {
    let model = realize_model(input, order)?;
    let eq = build_model(&model)?;
    let recovered = bigraded_symbol_at_zero(&eq)?;
    let mut failures = Vec::new();
    if recovered.inv().h() != input.inv.h() {
        failures.push(RoundtripFailure::HermitianForm {
            expected: input.inv.h().clone(),
            found: recovered.inv().h().clone(),
        });
    }
    let blocks = recovered.s02_blocks();
    for (a, (expected, _)) in input.pairs.iter().enumerate() {
        if &blocks[a] != expected {
            failures.push(RoundtripFailure::QuadraticBlock {
                alpha: a + 1,
                expected: expected.clone(),
                found: blocks[a].clone(),
            });
        }
    }
    let foc = first_order_constancy(&eq)?;
    if !foc.constant_to_first_order {
        failures.push(RoundtripFailure::NotConstantToFirstOrder);
    } else if failures.is_empty() {
        let sym = input.to_modified_symbol()?;
        let recovered_mod = modified_symbol_at_zero(&eq)?;
        let mut gens: Vec<Vec<_>> = sym.g00prime().iter().map(vectorize).collect();
        gens.push(vectorize(&mat_identity(input.s())));
        for (a, (_, omega)) in input.pairs.iter().enumerate() {
            let diff = crate::linalg::mat_sub(&recovered_mod.omega()[a], omega);
            if !span_contains(&gens, &vectorize(&diff)) {
                failures.push(RoundtripFailure::FrameOutsideStabilizer {
                    alpha: a + 1,
                    difference: diff,
                });
            }
        }
    }
    Ok(RoundtripReport {
        ok: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::ad_l_on_s02;
    use crate::linalg::{mat_scale, mat_zero};
    use crate::model::verify_rank_condition;
    use crate::scalar::GaussianRational;
    use crate::series::VarKind;

    fn gr(text: &str) -> GaussianRational {
        GaussianRational::parse(text).unwrap()
    }

    fn mat(entries: &[&[&str]]) -> Mat {
        entries
            .iter()
            .map(|row| row.iter().map(|c| gr(c)).collect())
            .collect()
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

    /// s=2, r=2, H0=Id, independent quadratic blocks, Omega_1=Id, Omega_2=0.
    fn spanning_input() -> SymbolInput {
        SymbolInput::new(
            Involution::new(mat_identity(2), gr("1")).unwrap(),
            vec![
                (mat(&[&["1", "0"], &["0", "0"]]), mat_identity(2)),
                (mat(&[&["0", "1"], &["1", "0"]]), mat_zero(2, 2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_frames_realize_linearly() {
        let input = SymbolInput::new(
            Involution::new(mat_identity(2), gr("1")).unwrap(),
            vec![
                (mat(&[&["1", "0"], &["0", "0"]]), mat_zero(2, 2)),
                (mat(&[&["0", "1"], &["1", "0"]]), mat_zero(2, 2)),
            ],
        )
        .unwrap();
        let model = realize_model(&input, 5).unwrap();
        let space = VarSpace::new(2, 2, false);
        let z1 = TruncatedSeries::var(space, Grading::Total, 5, Var::zeta(0));
        let z2 = TruncatedSeries::var(space, Grading::Total, 5, Var::zeta(1));
        let expected = SeriesMatrix::from_scalar_matrix(
            &mat(&[&["1", "0"], &["0", "0"]]),
            space,
            Grading::Total,
            5,
        )
        .scale_series(&z1)
        .add(
            &SeriesMatrix::from_scalar_matrix(
                &mat(&[&["0", "1"], &["1", "0"]]),
                space,
                Grading::Total,
                5,
            )
            .scale_series(&z2),
        );
        assert_eq!(model.sz(), &expected);
    }

    #[test]
    fn corner_example_matches_the_scalar_exponential() {
        let model = realize_model(&corner_input(), 4).unwrap();
        let space = VarSpace::new(2, 1, false);
        let coeffs = [("1", 1u32), ("1", 2), ("2/3", 3), ("1/3", 4)];
        let mut top = TruncatedSeries::zero(space, Grading::Total, 4);
        for (c, k) in coeffs {
            top = top.add(&TruncatedSeries::monomial(
                space,
                Grading::Total,
                4,
                vec![0, 0, 0, 0, k, 0],
                gr(c),
            ));
        }
        assert_eq!(model.sz().at(0, 0), &top);
        assert!(model.sz().at(0, 1).is_zero());
        assert!(model.sz().at(1, 0).is_zero());
        assert!(model.sz().at(1, 1).is_zero());
    }

    #[test]
    fn low_order_terms_follow_the_bracket_expansion() {
        for input in [corner_input(), spanning_input()] {
            let model = realize_model(&input, 4).unwrap();
            let space = model.sz().space();
            let r = input.r();
            let mut expected = SeriesMatrix::zero(input.s(), input.s(), space, Grading::Total, 4);
            for (b, (s02, _)) in input.pairs().iter().enumerate() {
                let zeta = TruncatedSeries::var(space, Grading::Total, 4, Var::zeta(b));
                expected = expected.add(
                    &SeriesMatrix::from_scalar_matrix(s02, space, Grading::Total, 4)
                        .scale_series(&zeta),
                );
            }
            for a in 0..r {
                for b in 0..r {
                    let bracket = ad_l_on_s02(&input.pairs()[a].1, &input.pairs()[b].0);
                    let mut exp = vec![0u32; space.num_vars()];
                    exp[2 * input.s() + a] += 1;
                    exp[2 * input.s() + b] += 1;
                    let mono = TruncatedSeries::monomial(space, Grading::Total, 4, exp, gr("1/2"));
                    expected = expected.add(
                        &SeriesMatrix::from_scalar_matrix(
                            &mat_scale(&bracket, &gr("1")),
                            space,
                            Grading::Total,
                            4,
                        )
                        .scale_series(&mono),
                    );
                }
            }
            let low = |m: &SeriesMatrix| {
                m.map_entries(|e| {
                    e.filter_terms(|exp| {
                        TruncatedSeries::kind_degree(&space, exp, VarKind::Zeta) <= 2
                    })
                })
            };
            assert_eq!(low(model.sz()), low(&expected));
        }
    }

    #[test]
    fn realized_blocks_recover_the_partials() {
        let input = spanning_input();
        let model = realize_model(&input, 5).unwrap();
        assert!(model.is_two_nondegenerate());
        assert_eq!(model.h0(), input.inv().h());
        let partials = model.s_partials_at_zero();
        for (a, (s02, _)) in input.pairs().iter().enumerate() {
            assert_eq!(&partials[a], s02);
        }
    }

    #[test]
    fn realized_models_pass_the_rank_condition() {
        let model = realize_model(&corner_input(), 6).unwrap();
        let eq = build_model(&model).unwrap();
        assert!(verify_rank_condition(&eq).unwrap().ok);
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        let inv = Involution::new(mat_identity(2), gr("1")).unwrap();
        let dependent = SymbolInput::new(
            inv.clone(),
            vec![
                (mat(&[&["1", "0"], &["0", "0"]]), mat_zero(2, 2)),
                (mat(&[&["2", "0"], &["0", "0"]]), mat_zero(2, 2)),
            ],
        );
        assert!(matches!(dependent, Err(Error::Invalid(_))));
        let unrealizable = SymbolInput::new(
            inv,
            vec![(
                mat(&[&["1", "0"], &["0", "0"]]),
                mat(&[&["0", "1"], &["0", "0"]]),
            )],
        );
        assert!(matches!(unrealizable, Err(Error::Precondition(_))));
    }

    #[test]
    fn realization_round_trips() {
        for input in [corner_input(), spanning_input()] {
            let report = verify_roundtrip(&input, 6).unwrap();
            assert!(report.ok, "failures: {:?}", report.failures);
        }
    }

    #[test]
    fn symbol_views_convert_both_ways() {
        let input = spanning_input();
        let sym = input.to_modified_symbol().unwrap();
        let back = SymbolInput::from_modified_symbol(&sym).unwrap();
        assert_eq!(back, input);
    }
}
