//! Subcommand implementations: parse JSON inputs, call the library, and
//! assemble deterministic run reports. No mathematics lives here — every
//! computation and every verdict is delegated to the core crate.

use crate::report::RunReport;
use crmw_core::lie::Involution;
use crmw_core::model::{build_model, verify_rank_condition, DefiningEquation, ModelData};
use crmw_core::normalform::{
    normal_form_reduce, normalize_equation, pivot_select, verify_equivalence_witness,
    EquivalenceWitness,
};
use crmw_core::realize::{realize_model, verify_roundtrip, SymbolInput};
use crmw_core::scalar::GaussianRational;
use crmw_core::symbols::{
    bigraded_symbol_at_zero, check_realizable, first_order_constancy, modified_symbol_at_zero,
    BigradedSymbol, ModifiedSymbol,
};
use crmw_core::symmetry::{
    euler_symmetry, real_span_dimension, transversal_symmetry, verify_tangency, HoloVectorField,
};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use std::fs;
use std::path::Path;

/// A problem with the invocation or its input files; mapped to exit code 2.
pub type InputError = String;

/// Reads a JSON file, recording its hash in the report under `role`.
pub fn read_json<T: DeserializeOwned>(
    report: &mut RunReport,
    role: &str,
    path: &Path,
) -> Result<T, InputError> {
    let bytes = fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    report.record_input(role, &bytes);
    serde_json::from_slice(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("library types serialize")
}

/// Where a defining equation comes from: a stored equation or seed data to
/// build one from.
pub enum EquationSource<'a> {
    Equation(&'a Path),
    Model(&'a Path),
}

fn load_equation(
    report: &mut RunReport,
    source: &EquationSource<'_>,
    order: u32,
) -> Result<DefiningEquation, InputError> {
    match source {
        EquationSource::Equation(path) => {
            let eq: DefiningEquation = read_json(report, "eq", path)?;
            eq.at_order(order.min(eq.order())).map_err(|e| e.to_string())
        }
        EquationSource::Model(path) => {
            let data: ModelData = read_json(report, "model", path)?;
            let data = data
                .at_order(order.min(data.order()))
                .map_err(|e| e.to_string())?;
            build_model(&data).map_err(|e| e.to_string())
        }
    }
}

/// `build`: seed data in, defining equation out.
pub fn build(model: &Path, order: u32) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("build", order);
    let data: ModelData = read_json(&mut report, "model", model)?;
    let data = data
        .at_order(order.min(data.order()))
        .map_err(|e| e.to_string())?;
    let eq = build_model(&data).map_err(|e| e.to_string())?;
    report.verdict("built", true);
    report.output = Some(to_value(&eq));
    Ok(report)
}

/// `verify-rank`: check the rank-condition identities on an equation.
pub fn verify_rank(source: &EquationSource<'_>, order: u32) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("verify-rank", order);
    let eq = load_equation(&mut report, source, order)?;
    let rank = verify_rank_condition(&eq).map_err(|e| e.to_string())?;
    if rank.ok {
        report.verdict("rank_condition", true);
    } else {
        report.fail("rank_condition", to_value(&rank.failure));
    }
    report.output = Some(to_value(&rank));
    Ok(report)
}

/// `symbol`: bigraded symbol, first-order constancy, and — when constancy
/// holds — the modified symbol at the origin.
pub fn symbol(source: &EquationSource<'_>, order: u32) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("symbol", order);
    let eq = load_equation(&mut report, source, order)?;
    let base = bigraded_symbol_at_zero(&eq).map_err(|e| e.to_string())?;
    report.verdict("two_nondegenerate", base.is_two_nondegenerate());
    let foc = first_order_constancy(&eq).map_err(|e| e.to_string())?;
    if foc.constant_to_first_order {
        report.verdict("constant_to_first_order", true);
    } else {
        report.fail("constant_to_first_order", to_value(&foc.obstructions));
    }
    let modified = if foc.constant_to_first_order {
        Some(modified_symbol_at_zero(&eq).map_err(|e| e.to_string())?)
    } else {
        None
    };
    report.output = Some(json!({
        "two_nondegenerate": base.is_two_nondegenerate(),
        "foc": foc,
        "modified": modified,
    }));
    Ok(report)
}

/// `realizable`: decide the span conditions for a stored modified symbol.
pub fn realizable(symbol_path: &Path, order: u32) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("realizable", order);
    let sym: ModifiedSymbol = read_json(&mut report, "symbol", symbol_path)?;
    let verdict = check_realizable(&sym);
    if verdict.realizable {
        report.verdict("realizable", true);
    } else {
        report.fail("realizable", to_value(&verdict.violation));
    }
    report.output = Some(to_value(&verdict));
    Ok(report)
}

/// `realize`: produce seed data from a realizable symbol and verify the
/// round trip back to the symbol.
pub fn realize(symbol_path: &Path, order: u32) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("realize", order);
    let sym: ModifiedSymbol = read_json(&mut report, "symbol", symbol_path)?;
    let verdict = check_realizable(&sym);
    if !verdict.realizable {
        report.fail("realizable", to_value(&verdict.violation));
        return Ok(report);
    }
    report.verdict("realizable", true);
    let input = match SymbolInput::from_modified_symbol(&sym) {
        Ok(input) => {
            report.verdict("independent_blocks", true);
            input
        }
        Err(crmw_core::error::Error::Invalid(msg)) => {
            report.fail("independent_blocks", json!({ "error": msg }));
            return Ok(report);
        }
        Err(e) => return Err(e.to_string()),
    };
    let data = realize_model(&input, order).map_err(|e| e.to_string())?;
    let roundtrip = verify_roundtrip(&input, order).map_err(|e| e.to_string())?;
    if roundtrip.ok {
        report.verdict("roundtrip", true);
    } else {
        report.fail("roundtrip", to_value(&roundtrip.failures));
    }
    report.output = Some(json!({ "model": data, "roundtrip": roundtrip }));
    Ok(report)
}

/// `symmetries`: verify the standard transversal fields, the Euler field,
/// and the Heisenberg span dimension on a model.
pub fn symmetries(model: &Path, order: u32) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("symmetries", order);
    let data: ModelData = read_json(&mut report, "model", model)?;
    let data = data
        .at_order(order.min(data.order()))
        .map_err(|e| e.to_string())?;
    let eq = build_model(&data).map_err(|e| e.to_string())?;
    let s = eq.s();
    let r = eq.r();
    let zero = GaussianRational::zero();
    let one = GaussianRational::one();
    let i = GaussianRational::i();

    let mut fields: Vec<(String, HoloVectorField)> = Vec::new();
    for k in 0..s {
        let mut a = vec![zero.clone(); s];
        a[k] = one.clone();
        fields.push((
            format!("V{}", k + 1),
            transversal_symmetry(&eq, &a, &zero).map_err(|e| e.to_string())?,
        ));
        let mut ai = vec![zero.clone(); s];
        ai[k] = i.clone();
        fields.push((
            format!("iV{}", k + 1),
            transversal_symmetry(&eq, &ai, &zero).map_err(|e| e.to_string())?,
        ));
    }
    fields.push((
        "W".to_string(),
        transversal_symmetry(&eq, &vec![zero.clone(); s], &one).map_err(|e| e.to_string())?,
    ));
    let heisenberg: Vec<HoloVectorField> = fields.iter().map(|(_, f)| f.clone()).collect();
    fields.push(("E".to_string(), euler_symmetry(s, r, eq.order())));

    let mut tangency = Vec::new();
    for (name, field) in &fields {
        let t = verify_tangency(&eq, field).map_err(|e| e.to_string())?;
        let check = format!("tangent_{name}");
        if t.ok {
            report.verdict(&check, true);
        } else {
            report.fail(&check, to_value(&t));
        }
        tangency.push(json!({ "field": name, "report": t }));
    }
    let span = real_span_dimension(&heisenberg);
    report.verdict("heisenberg_dimension", span == 2 * s + 1);
    report.output = Some(json!({
        "span_dimension": span,
        "expected_span": 2 * s + 1,
        "tangency": tangency,
    }));
    Ok(report)
}

/// `normalize`: recover seed data from an equation, then reduce it to the
/// pivot normal form when the quadratic blocks are independent.
pub fn normalize(eq_path: &Path, order: u32) -> Result<RunReport, InputError> {
    let mut report = RunReport::new("normalize", order);
    let eq: DefiningEquation = read_json(&mut report, "eq", eq_path)?;
    let eq = eq
        .at_order(order.min(eq.order()))
        .map_err(|e| e.to_string())?;
    let (seed, record) = normalize_equation(&eq).map_err(|e| e.to_string())?;
    report.verdict("normalized", true);

    let inv =
        Involution::new(seed.h0().clone(), GaussianRational::one()).map_err(|e| e.to_string())?;
    let base = BigradedSymbol::from_s02_blocks(inv, &seed.s_partials_at_zero())
        .map_err(|e| e.to_string())?;
    match pivot_select(&base) {
        Ok(pivot) => {
            report.verdict("two_nondegenerate", true);
            let reduced = normal_form_reduce(&seed).map_err(|e| e.to_string())?;
            report.output = Some(json!({
                "seed": seed,
                "record": record,
                "pivot": pivot,
                "reduced": reduced,
            }));
        }
        Err(e) => {
            report.fail("two_nondegenerate", json!({ "error": e.to_string() }));
            report.output = Some(json!({
                "seed": seed,
                "record": record,
                "pivot": Value::Null,
                "reduced": Value::Null,
            }));
        }
    }
    Ok(report)
}

/// `equiv`: check an explicit witness between two seed pairs.
pub fn equiv(
    models: &[std::path::PathBuf],
    witness: &Path,
    order: u32,
) -> Result<RunReport, InputError> {
    if models.len() != 2 {
        return Err(format!(
            "equiv needs exactly two --model inputs, got {}",
            models.len()
        ));
    }
    let mut report = RunReport::new("equiv", order);
    let m1: ModelData = read_json(&mut report, "model1", &models[0])?;
    let m2: ModelData = read_json(&mut report, "model2", &models[1])?;
    let w: EquivalenceWitness = read_json(&mut report, "witness", witness)?;
    let m1 = m1
        .at_order(order.min(m1.order()))
        .map_err(|e| e.to_string())?;
    let m2 = m2
        .at_order(order.min(m2.order()))
        .map_err(|e| e.to_string())?;
    let result = verify_equivalence_witness(&m1, &m2, &w).map_err(|e| e.to_string())?;
    if result.ok {
        report.verdict("equivalent", true);
    } else {
        report.fail("equivalent", to_value(&result.mismatch));
    }
    report.output = Some(to_value(&result));
    Ok(report)
}
