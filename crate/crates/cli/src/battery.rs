//! End-to-end verification battery: each criterion exercises one pipeline
//! through the library on fixture files and seeded samples, and contributes
//! a single pass/fail verdict to the run report.
//!
//! Criteria run in ascending numeric order; seeded sampling makes every run
//! byte-identical for a fixed configuration.

use crate::commands::{read_json, InputError};
use crate::report::RunReport;
use crmw_core::lie::Involution;
use crmw_core::linalg::{
    mat_add, mat_identity, mat_mul, mat_scale, mat_transpose, Mat,
};
use crmw_core::model::{
    build_model, extract_weighted_model, pde_propagate_oracle, verify_rank_condition,
    DefiningEquation, DefiningSeries, ModelData,
};
use crmw_core::normalform::{
    normal_form_reduce, pivot_select, reconstruct_from_seed, verify_equivalence_witness,
    EquivalenceWitness,
};
use crmw_core::realize::{realize_model, verify_roundtrip, SymbolInput};
use crmw_core::sample::{model_batch, symbol_batch, Sampler};
use crmw_core::scalar::GaussianRational;
use crmw_core::series::{Grading, SeriesMatrix, TruncatedSeries, Var, VarKind, VarSpace};
use crmw_core::symbols::{
    act_on_modified_symbol, bigraded_symbol_at_zero, check_realizable, first_order_constancy,
    modified_symbol_at_zero, BigradedSymbol, ModifiedSymbol,
};
use crmw_core::symmetry::{
    euler_symmetry, holo_bracket, isotropy_symmetry, real_span_dimension, transversal_symmetry,
    verify_tangency, HoloVectorField,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Battery configuration file: where the fixtures live and what to run.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryConfig {
    /// Fixture directory, relative to the config file.
    pub fixtures: PathBuf,
    /// Truncation order for the checks that honor one.
    #[serde(default = "default_order")]
    pub order: u32,
    /// Criterion numbers to execute, in any order; duplicates are ignored.
    pub criteria: Vec<u8>,
    /// Sample count floor for the randomized criteria.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Seed for all randomized criteria.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_order() -> u32 {
    6
}

fn default_samples() -> usize {
    20
}

fn default_seed() -> u64 {
    77
}

/// Failure channel inside one criterion: bad input aborts the run (exit 2),
/// a mathematical failure records a verdict and keeps going.
enum CritErr {
    Input(InputError),
    Fail(Value),
}

type CritResult = Result<(), CritErr>;

fn math<T>(r: Result<T, crmw_core::error::Error>, context: &str) -> Result<T, CritErr> {
    r.map_err(|e| CritErr::Fail(json!({ "context": context, "error": e.to_string() })))
}

fn ensure(cond: bool, detail: impl FnOnce() -> Value) -> CritResult {
    if cond {
        Ok(())
    } else {
        Err(CritErr::Fail(detail()))
    }
}

/// Shared state handed to each criterion.
struct Cx<'a> {
    dir: PathBuf,
    order: u32,
    samples: usize,
    seed: u64,
    report: &'a mut RunReport,
}

impl Cx<'_> {
    fn fixture<T: DeserializeOwned>(&mut self, name: &str) -> Result<T, CritErr> {
        read_json(self.report, name, &self.dir.join(name)).map_err(CritErr::Input)
    }
}

type Criterion = fn(&mut Cx<'_>) -> CritResult;

const CRITERIA: &[(u8, &str, Criterion)] = &[
    (1, "closed construction agrees with propagation and reconstruction", criterion_01),
    (2, "constructed equations pass the rank check; a broken one is pinpointed", criterion_02),
    (3, "the geometric-series equation matches term for term", criterion_03),
    (4, "realized models start with the expected linear and quadratic terms", criterion_04),
    (5, "realization round-trips the symbol data", criterion_05),
    (6, "the span conditions separate the two reference frames", criterion_06),
    (7, "symmetry candidates are tangent and the flipped control is not", criterion_07),
    (8, "transversal fields close a Heisenberg algebra of the right size", criterion_08),
    (9, "pivot reduction is idempotent and pins the pivot entries", criterion_09),
    (10, "the equivalence-witness verifier accepts, rejects, and inverts", criterion_10),
    (11, "higher-order perturbations do not change the extracted data", criterion_11),
    (12, "the structure-group action preserves verdicts and composes", criterion_12),
];

/// `battery`: run the selected criteria against the fixture directory.
pub fn battery(config_path: &Path, criteria_override: &[u8]) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("battery", default_order());
    let config: BatteryConfig = read_json(&mut report, "config", config_path)?;
    report.order = config.order;

    let base = match config_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let dir = base.join(&config.fixtures);

    let mut selected: Vec<u8> = if criteria_override.is_empty() {
        config.criteria.clone()
    } else {
        criteria_override.to_vec()
    };
    selected.sort_unstable();
    selected.dedup();

    if selected.is_empty() {
        eprintln!("warning: empty criteria list; nothing was checked");
        report.output = Some(json!({ "warning": "empty criteria list", "criteria": [] }));
        return Ok(report);
    }

    let mut ran = Vec::new();
    for &n in &selected {
        let Some((_, label, run)) = CRITERIA.iter().find(|(k, _, _)| *k == n) else {
            return Err(format!("unknown criterion {n}; valid values are 1..=12"));
        };
        let name = format!("criterion-{n:02}");
        let outcome = {
            let mut cx = Cx {
                dir: dir.clone(),
                order: config.order,
                samples: config.samples,
                seed: config.seed,
                report: &mut report,
            };
            run(&mut cx)
        };
        match outcome {
            Ok(()) => report.verdict(&name, true),
            Err(CritErr::Fail(detail)) => {
                report.fail(&name, json!({ "label": label, "detail": detail }))
            }
            Err(CritErr::Input(msg)) => return Err(format!("{name}: {msg}")),
        }
        ran.push(json!({ "criterion": n, "label": label }));
    }
    report.output = Some(json!({ "criteria": ran }));
    Ok(report)
}

fn gr(text: &str) -> GaussianRational {
    GaussianRational::parse(text).expect("literal")
}

fn mat(rows: &[&[&str]]) -> Mat {
    rows.iter()
        .map(|r| r.iter().map(|t| gr(t)).collect())
        .collect()
}

fn zeta_mono(space: VarSpace, order: u32, zeta: usize, power: u32, c: &str) -> TruncatedSeries {
    let mut exp = vec![0; space.num_vars()];
    exp[space.index_of(Var::zeta(zeta))] = power;
    TruncatedSeries::monomial(space, Grading::Total, order, exp, gr(c))
}

/// Closed construction, seed reconstruction, and the propagation oracle must
/// produce identical equations on a batch of sampled seed pairs.
fn criterion_01(cx: &mut Cx<'_>) -> CritResult {
    let n = cx.samples.max(20);
    for (idx, data) in model_batch(cx.seed, n, 3, 3, 5).iter().enumerate() {
        let closed = math(build_model(data), "closed construction")?;
        let rebuilt = math(reconstruct_from_seed(data), "seed reconstruction")?;
        let oracle = math(pde_propagate_oracle(data), "propagation oracle")?;
        ensure(closed == rebuilt, || {
            json!({ "instance": idx, "mismatch": "seed reconstruction" })
        })?;
        ensure(closed == oracle, || {
            json!({ "instance": idx, "mismatch": "propagation oracle" })
        })?;
    }
    Ok(())
}

/// Every constructed equation passes the rank check; a hand-broken stored
/// equation fails it with a named monomial.
fn criterion_02(cx: &mut Cx<'_>) -> CritResult {
    let lc: ModelData = cx.fixture("lightcone.model.json")?;
    let eq = math(build_model(&lc), "lightcone build")?;
    ensure(eq.order() == 8, || json!({ "expected_order": 8, "got": eq.order() }))?;
    let rank = math(verify_rank_condition(&eq), "lightcone rank check")?;
    ensure(rank.ok, || json!({ "model": "lightcone", "failure": &rank.failure }))?;

    for (idx, data) in model_batch(cx.seed + 1, 5, 3, 3, 5).iter().enumerate() {
        let eq = math(build_model(data), "sampled build")?;
        let rank = math(verify_rank_condition(&eq), "sampled rank check")?;
        ensure(rank.ok, || json!({ "instance": idx, "failure": &rank.failure }))?;
    }

    let broken: DefiningEquation = cx.fixture("broken.eq.json")?;
    let rank = math(verify_rank_condition(&broken), "broken rank check")?;
    ensure(!rank.ok, || json!({ "expected": "failure", "got": "pass" }))?;
    let failure = match &rank.failure {
        Some(f) => f,
        None => return Err(CritErr::Fail(json!({ "missing": "failure record" }))),
    };
    ensure(!failure.monomial.is_empty(), || json!({ "failure": failure }))?;
    Ok(())
}

/// The rank-one reference model solves to geometric series, term for term.
fn criterion_03(cx: &mut Cx<'_>) -> CritResult {
    let lc: ModelData = cx.fixture("lightcone.model.json")?;
    ensure(
        lc.s() == 1 && lc.r() == 1 && lc.order() == 8 && *lc.h0() == mat_identity(1),
        || json!({ "fixture": "lightcone.model.json", "problem": "unexpected shape" }),
    )?;
    let eq = math(build_model(&lc), "build")?;
    let space = eq.h().space();
    let mut h_expected = TruncatedSeries::zero(space, Grading::Total, 8);
    for k in 0..=4u32 {
        h_expected = h_expected.add(&TruncatedSeries::monomial(
            space,
            Grading::Total,
            8,
            vec![0, 0, k, k],
            GaussianRational::one(),
        ));
    }
    let mut s_expected = TruncatedSeries::zero(space, Grading::Total, 8);
    for k in 0..=3u32 {
        s_expected = s_expected.add(&TruncatedSeries::monomial(
            space,
            Grading::Total,
            8,
            vec![0, 0, k + 1, k],
            GaussianRational::one(),
        ));
    }
    ensure(eq.h().at(0, 0) == &h_expected, || json!({ "entry": "H(1,1)" }))?;
    ensure(eq.s_mat().at(0, 0) == &s_expected, || json!({ "entry": "S(1,1)" }))?;
    Ok(())
}

/// Realized models expand with linear coefficients equal to the quadratic
/// blocks and quadratic coefficients given by the frame brackets.
fn criterion_04(cx: &mut Cx<'_>) -> CritResult {
    let n = cx.samples.max(20);
    let inputs = symbol_batch(cx.seed + 2, n, 3)
        .map_err(|e| CritErr::Fail(json!({ "context": "symbol sampling", "error": e.to_string() })))?;
    let half = gr("1/2");
    for (idx, input) in inputs.iter().enumerate() {
        let s = input.s();
        let r = input.r();
        let data = math(realize_model(input, 4), "realization")?;
        let space = data.sz().space();
        let mut expected = SeriesMatrix::zero(s, s, space, Grading::Total, 4);
        for (b, (s02, _)) in input.pairs().iter().enumerate() {
            let zb = TruncatedSeries::var(space, Grading::Total, 4, Var::zeta(b));
            expected = expected.add(
                &SeriesMatrix::from_scalar_matrix(s02, space, Grading::Total, 4)
                    .scale_series(&zb),
            );
        }
        for a in 0..r {
            for b in 0..r {
                let omega_a = &input.pairs()[a].1;
                let s02_b = &input.pairs()[b].0;
                let bracket = mat_add(&mat_mul(omega_a, s02_b), &mat_mul(s02_b, &mat_transpose(omega_a)));
                let mut exp = vec![0u32; space.num_vars()];
                exp[space.index_of(Var::zeta(a))] += 1;
                exp[space.index_of(Var::zeta(b))] += 1;
                let mono =
                    TruncatedSeries::monomial(space, Grading::Total, 4, exp, GaussianRational::one());
                expected = expected.add(
                    &SeriesMatrix::from_scalar_matrix(&mat_scale(&bracket, &half), space, Grading::Total, 4)
                        .scale_series(&mono),
                );
            }
        }
        let actual = data.sz().map_entries(|e| {
            e.filter_terms(|exp| TruncatedSeries::kind_degree(&space, exp, VarKind::Zeta) <= 2)
        });
        ensure(actual == expected, || json!({ "instance": idx }))?;
    }
    Ok(())
}

/// Realization recovers the symbol it was built from, on every stored symbol.
fn criterion_05(cx: &mut Cx<'_>) -> CritResult {
    for name in ["s1.sym.json", "diag.sym.json", "spanning.sym.json"] {
        let sym: ModifiedSymbol = cx.fixture(name)?;
        let input = math(SymbolInput::from_modified_symbol(&sym), name)?;
        let rt = math(verify_roundtrip(&input, cx.order), name)?;
        ensure(rt.ok, || json!({ "fixture": name, "failures": &rt.failures }))?;
    }
    Ok(())
}

/// The realizability test accepts the diagonal frame and rejects the
/// off-diagonal one with the pinned violation certificate.
fn criterion_06(cx: &mut Cx<'_>) -> CritResult {
    let diag: ModifiedSymbol = cx.fixture("diag.sym.json")?;
    let verdict = check_realizable(&diag);
    ensure(verdict.realizable, || {
        json!({ "fixture": "diag.sym.json", "violation": &verdict.violation })
    })?;
    ensure(!verdict.certificate.is_empty(), || {
        json!({ "fixture": "diag.sym.json", "missing": "certificate" })
    })?;

    let off: ModifiedSymbol = cx.fixture("offdiag.sym.json")?;
    let verdict = check_realizable(&off);
    ensure(!verdict.realizable, || {
        json!({ "fixture": "offdiag.sym.json", "expected": "violation" })
    })?;
    let v = match &verdict.violation {
        Some(v) => v,
        None => return Err(CritErr::Fail(json!({ "missing": "violation record" }))),
    };
    ensure(v.condition == 1 && v.alpha == 1 && v.beta == 1, || json!({ "violation": v }))?;
    ensure(v.residual == mat(&[&["0", "1"], &["1", "0"]]), || json!({ "violation": v }))?;
    Ok(())
}

/// Transversal, isotropy, and Euler candidates annihilate the defining
/// function; flipping one sign inside a field breaks tangency.
fn criterion_07(cx: &mut Cx<'_>) -> CritResult {
    let mut sampler = Sampler::new(cx.seed + 3);
    let mut models: Vec<(String, ModelData)> = Vec::new();
    for name in ["lightcone.model.json", "wide.model.json"] {
        let data: ModelData = cx.fixture(name)?;
        let data = math(data.at_order(cx.order.min(data.order())), name)?;
        models.push((name.to_string(), data));
    }
    for k in 0..3 {
        let (s, r) = sampler.shape(2, 2);
        models.push((format!("sampled-{k}"), sampler.model_data(s, r, cx.order)));
    }

    let mut pairs = 0usize;
    for (name, data) in &models {
        let eq = math(build_model(data), name)?;
        for _ in 0..2 {
            let (a, b) = sampler.transversal_params(eq.s());
            let field = math(transversal_symmetry(&eq, &a, &b), "transversal field")?;
            let t = math(verify_tangency(&eq, &field), "tangency check")?;
            ensure(t.ok, || json!({ "model": name, "field": "transversal", "monomial": &t.monomial }))?;
            pairs += 1;
        }
        let euler = euler_symmetry(eq.s(), eq.r(), eq.order());
        let t = math(verify_tangency(&eq, &euler), "tangency check")?;
        ensure(t.ok, || json!({ "model": name, "field": "euler", "monomial": &t.monomial }))?;
    }
    ensure(pairs >= 10, || json!({ "pairs": pairs, "needed": 10 }))?;

    let zero = GaussianRational::zero();
    let i = GaussianRational::i();

    let corner: ModifiedSymbol = cx.fixture("diag.sym.json")?;
    let corner = math(SymbolInput::from_modified_symbol(&corner), "diag.sym.json")?;
    let x = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), i.clone()]];
    let field = math(isotropy_symmetry(&corner, &x, cx.order), "corner isotropy field")?;
    let data = math(realize_model(&corner, cx.order), "corner realization")?;
    let eq = math(build_model(&data), "corner build")?;
    let t = math(verify_tangency(&eq, &field), "tangency check")?;
    ensure(t.ok, || json!({ "field": "corner isotropy", "monomial": &t.monomial }))?;

    let resting: ModifiedSymbol = cx.fixture("omega0.sym.json")?;
    let resting = math(SymbolInput::from_modified_symbol(&resting), "omega0.sym.json")?;
    let x = mat_scale(&mat_identity(2), &i);
    let field = math(isotropy_symmetry(&resting, &x, cx.order), "scalar isotropy field")?;
    let data = math(realize_model(&resting, cx.order), "resting realization")?;
    let eq = math(build_model(&data), "resting build")?;
    let t = math(verify_tangency(&eq, &field), "tangency check")?;
    ensure(t.ok, || json!({ "field": "scalar isotropy", "monomial": &t.monomial }))?;

    let lc: ModelData = cx.fixture("lightcone.model.json")?;
    let lc = math(lc.at_order(cx.order.min(lc.order())), "lightcone")?;
    let eq = math(build_model(&lc), "lightcone build")?;
    let good = math(
        transversal_symmetry(&eq, &[GaussianRational::one()], &zero),
        "cone field",
    )?;
    let space = good.space();
    let zeta = TruncatedSeries::var(space, Grading::Total, eq.order(), Var::zeta(0));
    let one = TruncatedSeries::constant(space, Grading::Total, eq.order(), GaussianRational::one());
    let bad = math(
        HoloVectorField::new(
            good.xw().clone(),
            GaussianRational::zero(),
            vec![one.add(&zeta)],
            vec![TruncatedSeries::zero(space, Grading::Total, eq.order())],
        ),
        "flipped field",
    )?;
    let t = math(verify_tangency(&eq, &bad), "tangency check")?;
    ensure(!t.ok && t.monomial.is_some() && t.value.is_some(), || {
        json!({ "expected": "nonzero residual", "got": "tangent" })
    })?;
    Ok(())
}

/// The transversal fields close a Heisenberg algebra whose structure
/// constants come from the Hermitian form, with the pinned center.
fn criterion_08(cx: &mut Cx<'_>) -> CritResult {
    let minus_i = gr("-1i");
    let two_i = gr("2i");
    for name in ["lightcone.model.json", "wide.model.json"] {
        let data: ModelData = cx.fixture(name)?;
        let data = math(data.at_order(cx.order.min(data.order())), name)?;
        let eq = math(build_model(&data), name)?;
        let s = eq.s();
        let h0 = eq.h().eval_zero();
        let zero = GaussianRational::zero();

        let mut basis_a: Vec<Vec<GaussianRational>> = Vec::new();
        for unit in [GaussianRational::one(), GaussianRational::i()] {
            for k in 0..s {
                let mut a = vec![zero.clone(); s];
                a[k] = unit.clone();
                basis_a.push(a);
            }
        }
        let mut fields = Vec::new();
        for a in &basis_a {
            fields.push(math(transversal_symmetry(&eq, a, &zero), "transversal field")?);
        }
        let center = math(
            transversal_symmetry(&eq, &vec![zero.clone(); s], &GaussianRational::one()),
            "center field",
        )?;
        let space = center.space();
        let expected_center = TruncatedSeries::constant(space, Grading::Total, eq.order(), two_i.clone());
        ensure(center.xw() == &expected_center, || json!({ "model": name, "field": "center" }))?;
        ensure(
            center.xz().iter().all(TruncatedSeries::is_zero)
                && center.xzeta().iter().all(TruncatedSeries::is_zero),
            || json!({ "model": name, "field": "center", "problem": "non-vertical" }),
        )?;

        for (p, a) in basis_a.iter().enumerate() {
            for (q, b) in basis_a.iter().enumerate() {
                let bracket = holo_bracket(&fields[p], &fields[q]);
                let pairing: GaussianRational = (0..s)
                    .map(|u| {
                        (0..s)
                            .map(|v| &(&a[u] * &h0[u][v]) * &b[v].conj())
                            .fold(GaussianRational::zero(), |acc, t| &acc + &t)
                    })
                    .fold(GaussianRational::zero(), |acc, t| &acc + &t);
                let lambda = &(&pairing - &pairing.conj()) * &minus_i;
                let expected = center.truncate(bracket.order()).scale(&lambda);
                ensure(bracket == expected, || json!({ "model": name, "pair": [p, q] }))?;
            }
            ensure(holo_bracket(&fields[p], &center).is_zero(), || {
                json!({ "model": name, "pair": [p, "center"] })
            })?;
        }
        let mut all = fields.clone();
        all.push(center.clone());
        let dim = real_span_dimension(&all);
        ensure(dim == 2 * s + 1, || {
            json!({ "model": name, "dimension": dim, "expected": 2 * s + 1 })
        })?;
    }
    Ok(())
}

/// Pivot selection returns the pinned tuples, and the reduction pins the
/// pivot entries to single variables, idempotently.
fn criterion_09(cx: &mut Cx<'_>) -> CritResult {
    let one = GaussianRational::one();

    let inv1 = math(Involution::new(mat_identity(1), one.clone()), "involution")?;
    let sym1 = math(
        BigradedSymbol::from_s02_blocks(inv1, &[mat(&[&["1"]])]),
        "rank-one symbol",
    )?;
    let tuple = math(pivot_select(&sym1), "pivot selection")?;
    ensure(tuple.positions == vec![(1, 1)], || json!({ "shape": "scalar", "tuple": &tuple }))?;

    let inv2 = math(Involution::new(mat_identity(2), one.clone()), "involution")?;
    let sym2 = math(
        BigradedSymbol::from_s02_blocks(inv2.clone(), &[mat(&[&["0", "1"], &["1", "0"]])]),
        "off-diagonal symbol",
    )?;
    let tuple = math(pivot_select(&sym2), "pivot selection")?;
    ensure(tuple.positions == vec![(1, 2)], || json!({ "shape": "off-diagonal", "tuple": &tuple }))?;

    let sym3 = math(
        BigradedSymbol::from_s02_blocks(
            inv2,
            &[
                mat(&[&["1", "0"], &["0", "0"]]),
                mat(&[&["0", "1"], &["1", "0"]]),
            ],
        ),
        "two-block symbol",
    )?;
    let tuple = math(pivot_select(&sym3), "pivot selection")?;
    ensure(tuple.positions == vec![(1, 1), (1, 2)], || {
        json!({ "shape": "two-block", "tuple": &tuple })
    })?;

    // Bent rank-one data: the pivot entry straightens to the bare variable.
    let space1 = VarSpace::new(1, 1, false);
    let bent_entry = zeta_mono(space1, 6, 0, 1, "2").add(&zeta_mono(space1, 6, 0, 2, "1"));
    let mut sz = SeriesMatrix::zero(1, 1, space1, Grading::Total, 6);
    sz.set(0, 0, bent_entry);
    let bent = math(ModelData::new(mat_identity(1), sz), "bent data")?;
    let reduced = math(normal_form_reduce(&bent), "reduction")?;
    let zeta1 = TruncatedSeries::var(space1, Grading::Total, 6, Var::zeta(0));
    ensure(reduced.sz().at(0, 0) == &zeta1, || json!({ "shape": "bent", "entry": "(1,1)" }))?;
    let again = math(normal_form_reduce(&reduced), "second reduction")?;
    ensure(again == reduced, || json!({ "shape": "bent", "problem": "not idempotent" }))?;

    // Triangular family: both pivot entries straighten simultaneously.
    let space2 = VarSpace::new(2, 2, false);
    let mut sz = SeriesMatrix::zero(2, 2, space2, Grading::Total, 6);
    sz.set(0, 0, zeta_mono(space2, 6, 0, 1, "1").add(&zeta_mono(space2, 6, 1, 2, "1")));
    sz.set(0, 1, zeta_mono(space2, 6, 1, 1, "1"));
    sz.set(1, 0, zeta_mono(space2, 6, 1, 1, "1"));
    let tri = math(ModelData::new(mat_identity(2), sz), "triangular data")?;
    let inv = math(Involution::new(tri.h0().clone(), one.clone()), "involution")?;
    let base = math(
        BigradedSymbol::from_s02_blocks(inv, &tri.s_partials_at_zero()),
        "triangular symbol",
    )?;
    let tuple = math(pivot_select(&base), "pivot selection")?;
    let reduced = math(normal_form_reduce(&tri), "reduction")?;
    let rspace = reduced.sz().space();
    for (b, (j, k)) in tuple.positions.iter().enumerate() {
        let expected = TruncatedSeries::var(rspace, Grading::Total, reduced.order(), Var::zeta(b));
        ensure(reduced.sz().at(j - 1, k - 1) == &expected, || {
            json!({ "shape": "triangular", "entry": [j, k] })
        })?;
    }
    let again = math(normal_form_reduce(&reduced), "second reduction")?;
    ensure(again == reduced, || json!({ "shape": "triangular", "problem": "not idempotent" }))?;

    // Already-reduced data is a fixed point.
    let wide: ModelData = cx.fixture("wide.model.json")?;
    let fixed = math(normal_form_reduce(&wide), "reduction")?;
    ensure(fixed == wide, || json!({ "shape": "wide", "problem": "moved a fixed point" }))?;
    Ok(())
}

/// The witness verifier accepts the stored witness, rejects a wrong fiber
/// map with a located mismatch, and accepts the inverted witness backwards.
fn criterion_10(cx: &mut Cx<'_>) -> CritResult {
    let m1: ModelData = cx.fixture("m1.model.json")?;
    let m2: ModelData = cx.fixture("m2.model.json")?;
    let good: EquivalenceWitness = cx.fixture("good.witness.json")?;
    let bad: EquivalenceWitness = cx.fixture("bad.witness.json")?;

    let report = math(verify_equivalence_witness(&m1, &m2, &good), "good witness")?;
    ensure(report.ok, || json!({ "witness": "good", "mismatch": &report.mismatch }))?;

    let report = math(verify_equivalence_witness(&m1, &m2, &bad), "bad witness")?;
    ensure(!report.ok && report.mismatch.is_some(), || {
        json!({ "witness": "bad", "expected": "mismatch" })
    })?;

    let inverted = math(good.invert(), "witness inversion")?;
    let report = math(verify_equivalence_witness(&m2, &m1, &inverted), "inverted witness")?;
    ensure(report.ok, || json!({ "witness": "inverted", "mismatch": &report.mismatch }))?;
    Ok(())
}

/// Adding admissible higher-order terms and re-extracting the weighted part
/// changes neither the equation nor any symbol computed from it.
fn criterion_11(cx: &mut Cx<'_>) -> CritResult {
    let mut sampler = Sampler::new(cx.seed + 4);
    for name in ["lightcone.model.json", "wide.model.json"] {
        let data: ModelData = cx.fixture(name)?;
        let data = math(data.at_order(cx.order.min(data.order())), name)?;
        let eq = math(build_model(&data), name)?;
        let base_before = math(bigraded_symbol_at_zero(&eq), "base symbol")?;
        let sym_before = math(modified_symbol_at_zero(&eq), "modified symbol")?;
        for k in 0..3 {
            let q = sampler.weighted_perturbation(eq.s(), eq.r(), eq.order());
            let full = math(DefiningSeries::from_equation(&eq, q), "perturbed series")?;
            let extracted = math(extract_weighted_model(&full), "extraction")?;
            ensure(extracted == eq, || {
                json!({ "model": name, "instance": k, "stage": "equation" })
            })?;
            let base_after = math(bigraded_symbol_at_zero(&extracted), "base symbol")?;
            ensure(base_after == base_before, || {
                json!({ "model": name, "instance": k, "stage": "base symbol" })
            })?;
            let sym_after = math(modified_symbol_at_zero(&extracted), "modified symbol")?;
            ensure(sym_after == sym_before, || {
                json!({ "model": name, "instance": k, "stage": "modified symbol" })
            })?;
        }
    }
    Ok(())
}

/// The structure-group action preserves realizability both ways, preserves
/// the stabilizer dimension and constancy, and composes contravariantly.
fn criterion_12(cx: &mut Cx<'_>) -> CritResult {
    let mut sampler = Sampler::new(cx.seed + 5);

    let off: ModifiedSymbol = cx.fixture("offdiag.sym.json")?;
    let g = sampler.group_element(off.s());
    let acted = math(act_on_modified_symbol(&g, &off), "action on frame")?;
    ensure(!check_realizable(&acted).realizable, || {
        json!({ "fixture": "offdiag.sym.json", "expected": "still non-realizable" })
    })?;

    let inputs = symbol_batch(cx.seed + 6, 4, 3)
        .map_err(|e| CritErr::Fail(json!({ "context": "symbol sampling", "error": e.to_string() })))?;
    for (idx, input) in inputs.iter().enumerate() {
        let sym = math(input.to_modified_symbol(), "symbol assembly")?;
        let g1 = sampler.group_element(sym.s());
        let g2 = sampler.group_element(sym.s());
        let inner = math(act_on_modified_symbol(&g2, &sym), "inner action")?;
        let nested = math(act_on_modified_symbol(&g1, &inner), "outer action")?;
        let composed = math(act_on_modified_symbol(&g1.group_mul(&g2), &sym), "composed action")?;
        ensure(composed == nested, || json!({ "instance": idx, "mismatch": "composition" }))?;
        ensure(check_realizable(&nested).realizable, || {
            json!({ "instance": idx, "mismatch": "realizability" })
        })?;
        ensure(nested.g00prime().len() == sym.g00prime().len(), || {
            json!({ "instance": idx, "mismatch": "stabilizer dimension" })
        })?;
        let back = math(SymbolInput::from_modified_symbol(&nested), "acted symbol input")?;
        let data = math(realize_model(&back, 4), "realization")?;
        let eq = math(build_model(&data), "realized build")?;
        let foc = math(first_order_constancy(&eq), "constancy check")?;
        ensure(foc.constant_to_first_order, || {
            json!({ "instance": idx, "mismatch": "first-order constancy" })
        })?;
    }
    Ok(())
}
