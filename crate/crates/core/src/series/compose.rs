//! Substitution of series into series, and inversion of formal maps.
//!
//! Soundness of truncation: a term of the source series that was dropped by
//! truncation has degree above the source order; as long as every variable
//! with positive weight receives a series of at least that weight's minimal
//! degree, the dropped tail can only produce output terms above the output
//! order. `compose` enforces exactly this precondition and fails otherwise.

use super::{Grading, TruncatedSeries, Var, VarKind, VarSpace};
use crate::error::{Error, Result};
use crate::linalg::{mat_inverse, Mat};
use crate::scalar::GaussianRational;

/// One series per variable of `space`, each mapping to itself.
pub fn identity_substitution(
    space: VarSpace,
    grading: Grading,
    order: u32,
) -> Vec<TruncatedSeries> {
    (0..space.num_vars())
        .map(|pos| TruncatedSeries::var(space, grading, order, space.var_at(pos)))
        .collect()
}

/// Substitute `subs[k]` for the `k`-th variable of `f`'s space.
///
/// All substituted series must live on one common space and grading; the
/// output order is the minimum of `f`'s order and every substituted series'
/// order. Every variable that actually occurs in `f` with positive weight
/// `w` must receive a series of minimal degree at least `w`, otherwise the
/// substitution cannot respect truncation and an error is returned.
pub fn compose(f: &TruncatedSeries, subs: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    let src = f.space();
    let n = src.num_vars();
    if subs.len() != n {
        return Err(Error::Dimension(format!(
            "substitution needs {} series, got {}",
            n,
            subs.len()
        )));
    }
    let space = subs[0].space();
    let grading = subs[0].grading();
    let mut order = f.order();
    for s in subs {
        if s.space() != space || s.grading() != grading {
            return Err(Error::Dimension(
                "substituted series disagree on space or grading".to_string(),
            ));
        }
        order = order.min(s.order());
    }

    // Which variables occur, and with which maximal exponent.
    let mut max_exp = vec![0u32; n];
    for (e, _) in f.terms() {
        for (pos, &p) in e.iter().enumerate() {
            max_exp[pos] = max_exp[pos].max(p);
        }
    }
    for pos in 0..n {
        if max_exp[pos] == 0 {
            continue;
        }
        let w = src.weight_at(pos, f.grading());
        if w == 0 {
            continue;
        }
        let min_deg = subs[pos].min_degree();
        if min_deg.map_or(false, |m| m < w) {
            return Err(Error::IllFoundedSubstitution(format!(
                "series substituted for {} must vanish to degree {}",
                src.var_name(pos),
                w
            )));
        }
    }

    // Memoized powers of each substituted series, truncated to the output
    // order up front.
    let mut pows: Vec<Vec<TruncatedSeries>> = Vec::with_capacity(n);
    for pos in 0..n {
        let base = if subs[pos].order() > order {
            subs[pos].truncate(order)
        } else {
            subs[pos].clone()
        };
        let mut table = vec![TruncatedSeries::one(space, grading, order)];
        for k in 1..=max_exp[pos] as usize {
            let next = table[k - 1].mul(&base);
            table.push(next);
        }
        pows.push(table);
    }

    let mut out = TruncatedSeries::zero(space, grading, order);
    for (e, c) in f.terms() {
        let mut prod = TruncatedSeries::constant(space, grading, order, c.clone());
        for (pos, &p) in e.iter().enumerate() {
            if p > 0 {
                prod = prod.mul(&pows[pos][p as usize]);
            }
        }
        out = out.add(&prod);
    }
    Ok(out)
}

/// Invert a formal self-map of the `zeta` block.
///
/// `f` lists the images of `zeta_1..zeta_r` as series in `zeta` alone, with
/// zero constant term and invertible linear part, all on one space with the
/// total grading. Returns the compositional inverse `g` (so `f(g) = id` and
/// `g(f) = id` to the common order). The iteration is Newton's method with
/// the constant linear part, which settles one further degree per step.
pub fn invert_map(f: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>> {
    if f.is_empty() {
        return Err(Error::Dimension("cannot invert an empty map".to_string()));
    }
    let space = f[0].space();
    let grading = f[0].grading();
    let order = f[0].order();
    let r = space.r;
    if f.len() != r {
        return Err(Error::Dimension(format!(
            "a zeta self-map needs {} components, got {}",
            r,
            f.len()
        )));
    }
    if grading != Grading::Total {
        return Err(Error::Precondition(
            "map inversion requires the total grading".to_string(),
        ));
    }
    for comp in f {
        if comp.space() != space || comp.grading() != grading || comp.order() != order {
            return Err(Error::Dimension(
                "map components disagree on space, grading or order".to_string(),
            ));
        }
        for (e, _) in comp.terms() {
            let zeta_deg = TruncatedSeries::kind_degree(&space, e, VarKind::Zeta);
            let total: u32 = e.iter().sum();
            if zeta_deg != total {
                return Err(Error::Invalid(
                    "map components must be series in zeta alone".to_string(),
                ));
            }
        }
        if !comp.constant_term().is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
    }

    // Linear part and its inverse.
    let mut jac: Mat = vec![vec![GaussianRational::zero(); r]; r];
    for (b, comp) in f.iter().enumerate() {
        for a in 0..r {
            let mut e = vec![0u32; space.num_vars()];
            e[space.index_of(Var::zeta(a))] = 1;
            jac[b][a] = comp.coeff(&e);
        }
    }
    let jinv = mat_inverse(&jac).ok_or(Error::SingularLinearPart)?;

    let zeta_series: Vec<TruncatedSeries> = (0..r)
        .map(|a| TruncatedSeries::var(space, grading, order, Var::zeta(a)))
        .collect();
    let apply_jinv = |v: &[TruncatedSeries]| -> Vec<TruncatedSeries> {
        (0..r)
            .map(|a| {
                let mut acc = TruncatedSeries::zero(space, grading, order);
                for (b, comp) in v.iter().enumerate() {
                    acc = acc.add(&comp.scale(&jinv[a][b]));
                }
                acc
            })
            .collect()
    };

    let mut g = apply_jinv(&zeta_series);
    for _ in 0..=order {
        let mut subs = identity_substitution(space, grading, order);
        for (a, ga) in g.iter().enumerate() {
            subs[space.index_of(Var::zeta(a))] = ga.clone();
        }
        let err: Vec<TruncatedSeries> = f
            .iter()
            .enumerate()
            .map(|(b, comp)| Ok(compose(comp, &subs)?.sub(&zeta_series[b])))
            .collect::<Result<_>>()?;
        if err.iter().all(TruncatedSeries::is_zero) {
            return Ok(g);
        }
        let corr = apply_jinv(&err);
        for (a, ga) in g.iter_mut().enumerate() {
            *ga = ga.sub(&corr[a]);
        }
    }
    Err(Error::Invalid(
        "map inversion did not converge to the working order".to_string(),
    ))
}
