//! Pointwise invariants of a defining equation at the origin: the bigraded
//! symbol `(H0, Xi_alpha)`, the frame matrices along the kernel directions,
//! first-order constancy as an exact linear feasibility problem, the
//! stabilizer algebra of the symbol, and realizability tests for abstract
//! modified symbols.
//!
//! All decisions are exact: span memberships and feasibility reduce to
//! rational Gaussian elimination, and infeasibility is reported through
//! deterministic quotient representatives (pivot coordinates eliminated in a
//! fixed order), never through tolerances.

use crate::error::{Error, Result};
use crate::lie::{ad_l_on_s02, GroupElement00, Involution};
use crate::linalg::{
    mat_add, mat_conj, mat_inverse, mat_mul, mat_neg, mat_shape, mat_sub, mat_transpose,
    nullspace, rank, rref, solve_canonical, span_solve, vectorize, Mat, SpanReducer,
};
use crate::model::DefiningEquation;
use crate::scalar::GaussianRational;
use crate::series::{SeriesMatrix, Var};
use serde::{Deserialize, Serialize};

/// The pointwise symbol `(H0, e^{ih}, Xi_1..Xi_r)` of a defining equation.
#[derive(Clone, PartialEq, Debug)]
pub struct BigradedSymbol {
    inv: Involution,
    xi: Vec<Mat>,
}

impl BigradedSymbol {
    /// Validates shapes and the symmetry of every block `e^{-ih} Xi_a H0^{-1}`.
    pub fn new(inv: Involution, xi: Vec<Mat>) -> Result<Self> {
        let s = inv.s();
        for (a, m) in xi.iter().enumerate() {
            if mat_shape(m) != (s, s) {
                return Err(Error::Dimension(format!(
                    "Xi_{} must be {s}x{s}",
                    a + 1
                )));
            }
        }
        let sym = Self { inv, xi };
        for (a, block) in sym.s02_blocks().iter().enumerate() {
            if !crate::linalg::mat_is_symmetric(block) {
                return Err(Error::Invalid(format!(
                    "Xi_{} does not induce a symmetric quadratic block",
                    a + 1
                )));
            }
        }
        Ok(sym)
    }

    /// Builds the symbol from its symmetric quadratic blocks instead of `Xi`.
    pub fn from_s02_blocks(inv: Involution, s02: &[Mat]) -> Result<Self> {
        let xi = s02
            .iter()
            .map(|b| crate::linalg::mat_scale(&mat_mul(b, inv.h()), inv.eih()))
            .collect();
        Self::new(inv, xi)
    }

    /// The involution data `(H0, e^{ih})`.
    pub fn inv(&self) -> &Involution {
        &self.inv
    }

    /// The kernel-direction matrices `Xi_alpha`.
    pub fn xi(&self) -> &[Mat] {
        &self.xi
    }

    /// Number of `z` variables.
    pub fn s(&self) -> usize {
        self.inv.s()
    }

    /// Number of kernel directions.
    pub fn r(&self) -> usize {
        self.xi.len()
    }

    /// The symmetric blocks `S02_a = e^{-ih} Xi_a H0^{-1}`.
    pub fn s02_blocks(&self) -> Vec<Mat> {
        let h_inv = mat_inverse(self.inv.h()).expect("validated invertible");
        let phase = self.inv.eih().conj();
        self.xi
            .iter()
            .map(|xi| crate::linalg::mat_scale(&mat_mul(xi, &h_inv), &phase))
            .collect()
    }

    /// The opposite blocks `H0 conj(S02_a) H0^T`.
    pub fn sm2_blocks(&self) -> Vec<Mat> {
        let h = self.inv.h();
        let ht = mat_transpose(h);
        self.s02_blocks()
            .iter()
            .map(|b| mat_mul(&mat_mul(h, &mat_conj(b)), &ht))
            .collect()
    }

    /// True iff the `Xi_alpha` are linearly independent and nonempty.
    pub fn is_two_nondegenerate(&self) -> bool {
        if self.xi.is_empty() {
            return false;
        }
        let rows: Vec<Vec<GaussianRational>> = self.xi.iter().map(vectorize).collect();
        rank(&rows) == self.xi.len()
    }
}

/// A bigraded symbol enriched with kernel-direction matrices `Omega_alpha`
/// and the stabilizer algebra of the underlying symbol.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "ModifiedSymbolRepr", into = "ModifiedSymbolRepr")]
pub struct ModifiedSymbol {
    base: BigradedSymbol,
    omega: Vec<Mat>,
    g00prime: Vec<Mat>,
}

impl ModifiedSymbol {
    /// Wraps a base symbol with `Omega` matrices; the stabilizer algebra is
    /// recomputed deterministically.
    pub fn new(base: BigradedSymbol, omega: Vec<Mat>) -> Result<Self> {
        let s = base.s();
        if omega.len() != base.r() {
            return Err(Error::Dimension(format!(
                "expected {} Omega matrices, got {}",
                base.r(),
                omega.len()
            )));
        }
        for (a, m) in omega.iter().enumerate() {
            if mat_shape(m) != (s, s) {
                return Err(Error::Dimension(format!(
                    "Omega_{} must be {s}x{s}",
                    a + 1
                )));
            }
        }
        let g00prime = g00_prime(&base);
        Ok(Self {
            base,
            omega,
            g00prime,
        })
    }

    /// The underlying bigraded symbol.
    pub fn base(&self) -> &BigradedSymbol {
        &self.base
    }

    /// The kernel-direction matrices `Omega_alpha`.
    pub fn omega(&self) -> &[Mat] {
        &self.omega
    }

    /// Basis of the stabilizer algebra.
    pub fn g00prime(&self) -> &[Mat] {
        &self.g00prime
    }

    /// Number of `z` variables.
    pub fn s(&self) -> usize {
        self.base.s()
    }

    /// Number of kernel directions.
    pub fn r(&self) -> usize {
        self.base.r()
    }

    /// True iff `m` lies in the span of the stabilizer algebra.
    pub fn stabilizer_contains(&self, m: &Mat) -> bool {
        let gens: Vec<Vec<GaussianRational>> = self.g00prime.iter().map(vectorize).collect();
        crate::linalg::span_contains(&gens, &vectorize(m))
    }
}

#[derive(Serialize, Deserialize)]
struct ModifiedSymbolRepr {
    #[serde(rename = "H")]
    h: Mat,
    eih: GaussianRational,
    #[serde(rename = "Xi")]
    xi: Vec<Mat>,
    #[serde(rename = "Omega")]
    omega: Vec<Mat>,
    g00prime: Vec<Mat>,
}

impl TryFrom<ModifiedSymbolRepr> for ModifiedSymbol {
    type Error = Error;

    fn try_from(repr: ModifiedSymbolRepr) -> Result<Self> {
        let inv = Involution::new(repr.h, repr.eih)?;
        let base = BigradedSymbol::new(inv, repr.xi)?;
        let sym = ModifiedSymbol::new(base, repr.omega)?;
        if sym.g00prime != repr.g00prime {
            return Err(Error::Invalid(
                "stored stabilizer basis does not match the symbol data".into(),
            ));
        }
        Ok(sym)
    }
}

impl From<ModifiedSymbol> for ModifiedSymbolRepr {
    fn from(sym: ModifiedSymbol) -> Self {
        ModifiedSymbolRepr {
            h: sym.base.inv.h().clone(),
            eih: sym.base.inv.eih().clone(),
            xi: sym.base.xi,
            omega: sym.omega,
            g00prime: sym.g00prime,
        }
    }
}

/// Reads the bigraded symbol off a defining equation at the origin:
/// `H0 = H(0,0)`, `e^{ih} = 1`, `Xi_a = (H0^T)^{-1} S_{zeta_a}(0,0)`.
pub fn bigraded_symbol_at_zero(eq: &DefiningEquation) -> Result<BigradedSymbol> {
    let h0 = eq.h().eval_zero();
    let h0t_inv = mat_inverse(&mat_transpose(&h0))
        .ok_or_else(|| Error::DegenerateHermitian("H(0,0) is singular".into()))?;
    let xi = (0..eq.r())
        .map(|a| {
            let s_a = eq.s_mat().differentiate(Var::zeta(a)).eval_zero();
            mat_mul(&h0t_inv, &s_a)
        })
        .collect();
    BigradedSymbol::new(Involution::new(h0, GaussianRational::one())?, xi)
}

/// The frame matrices `Omega_b = (H^T)^{-1} H_{zeta_b}^T` as series, one per
/// kernel direction, at order one below the input order.
pub fn frame_omega(eq: &DefiningEquation) -> Result<Vec<SeriesMatrix>> {
    let h_inv_t = eq.h().inverse()?.transpose();
    Ok((0..eq.r())
        .map(|b| {
            let d = eq.h().differentiate(Var::zeta(b)).transpose();
            h_inv_t.truncate(d.order()).mul(&d)
        })
        .collect())
}

/// One residual class obstructing first-order constancy.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FocObstruction {
    /// 1-based kernel-direction indices of the failing pair.
    pub alpha: usize,
    pub beta: usize,
    /// Quotient representative of the residual (pivot coordinates of the
    /// reachable span eliminated).
    pub residual: Mat,
}

/// Outcome of the first-order-constancy decision.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FocReport {
    pub constant_to_first_order: bool,
    /// A normalizing solution `B_alpha` (canonical: free variables zero).
    /// When the full system is infeasible this is the best-effort solution
    /// used to compute the residuals.
    pub b: Vec<Mat>,
    /// Nonzero residual classes, listed in `(alpha, beta)` order; empty
    /// exactly when `constant_to_first_order`.
    pub obstructions: Vec<FocObstruction>,
}

/// The origin data entering the first-order-constancy system.
struct FocData {
    s: usize,
    r: usize,
    s02: Vec<Mat>,
    sm2: Vec<Mat>,
    /// `T[a][b]`: the `zeta_b`-derivative at 0 of the frame block field
    /// `(H^T)^{-1} S_{zeta_a} H^{-1}`.
    t: Vec<Vec<Mat>>,
}

fn foc_data(eq: &DefiningEquation) -> Result<FocData> {
    let sym = bigraded_symbol_at_zero(eq)?;
    let h_inv = eq.h().inverse()?;
    let h_inv_t = h_inv.transpose();
    let mut t = Vec::new();
    for a in 0..eq.r() {
        let field = h_inv_t
            .mul(&eq.s_mat().differentiate(Var::zeta(a)))
            .mul(&h_inv);
        t.push(
            (0..eq.r())
                .map(|b| field.differentiate(Var::zeta(b)).eval_zero())
                .collect(),
        );
    }
    Ok(FocData {
        s: eq.s(),
        r: eq.r(),
        s02: sym.s02_blocks(),
        sm2: sym.sm2_blocks(),
        t,
    })
}

/// The matrix with a single 1 at `(p, q)`.
fn unit_mat(s: usize, p: usize, q: usize) -> Mat {
    let mut m = crate::linalg::mat_zero(s, s);
    m[p][q] = GaussianRational::one();
    m
}

/// Opposite-block action `B^T M + M B` of a `(0,0)` element on a `(0,-2)` block.
fn act_on_m(b: &Mat, m: &Mat) -> Mat {
    mat_add(&mat_mul(&mat_transpose(b), m), &mat_mul(m, b))
}

/// Accumulates rows of an exact complex-linear system `A x = rhs`.
struct SystemBuilder {
    cols: usize,
    a: Mat,
    rhs: Vec<GaussianRational>,
}

impl SystemBuilder {
    fn new(cols: usize) -> Self {
        Self {
            cols,
            a: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Adds `s*s` rows stating `expr = rhs` entrywise, where `expr` is given
    /// by its value on each unknown-block basis element.
    fn push_matrix_equation(
        &mut self,
        s: usize,
        columns: &[(usize, Mat)],
        rhs: &Mat,
    ) {
        let mut rows = vec![vec![GaussianRational::zero(); self.cols]; s * s];
        for (col, value) in columns {
            let v = vectorize(value);
            for (row, coeff) in v.into_iter().enumerate() {
                rows[row][*col] = coeff;
            }
        }
        self.a.extend(rows);
        self.rhs.extend(vectorize(rhs));
    }

    fn solve(&self) -> Option<Vec<GaussianRational>> {
        solve_canonical(&self.a, &self.rhs)
    }
}

fn unvectorize(s: usize, v: &[GaussianRational]) -> Mat {
    (0..s).map(|i| v[i * s..(i + 1) * s].to_vec()).collect()
}

/// Pushes, for every pair `(a, b)`, the homogeneous normalizer condition
/// `B_a^T Sm2_b + Sm2_b B_a - sum_g mu^g Sm2_g = 0` with `mu` unknowns
/// starting at column `mu_base`.
fn push_normalizer_rows(sys: &mut SystemBuilder, data: &FocData, mu_base: usize) {
    let (s, r) = (data.s, data.r);
    let zero = crate::linalg::mat_zero(s, s);
    for a in 0..r {
        for b in 0..r {
            let mut cols = Vec::new();
            for p in 0..s {
                for q in 0..s {
                    cols.push((a * s * s + p * s + q, act_on_m(&unit_mat(s, p, q), &data.sm2[b])));
                }
            }
            for g in 0..r {
                cols.push((mu_base + (a * r + b) * r + g, mat_neg(&data.sm2[g])));
            }
            sys.push_matrix_equation(s, &cols, &zero);
        }
    }
}

/// Solves the full system: normalizer rows plus, for every `(a, b)`,
/// `T_ab - [B_a, S02_b] in span{S02_g}`.
fn solve_full(data: &FocData) -> Option<Vec<Mat>> {
    let (s, r) = (data.s, data.r);
    let nb = r * s * s;
    let cols = nb + 2 * r * r * r;
    let mut sys = SystemBuilder::new(cols);
    push_normalizer_rows(&mut sys, data, nb);
    let lambda_base = nb + r * r * r;
    for a in 0..r {
        for b in 0..r {
            let mut colspec = Vec::new();
            for p in 0..s {
                for q in 0..s {
                    colspec.push((
                        a * s * s + p * s + q,
                        mat_neg(&ad_l_on_s02(&unit_mat(s, p, q), &data.s02[b])),
                    ));
                }
            }
            for g in 0..r {
                colspec.push((lambda_base + (a * r + b) * r + g, mat_neg(&data.s02[g])));
            }
            sys.push_matrix_equation(s, &colspec, &mat_neg(&data.t[a][b]));
        }
    }
    sys.solve()
        .map(|x| (0..r).map(|a| unvectorize(s, &x[a * s * s..(a + 1) * s * s])).collect())
}

/// Solves the relaxed system: normalizer rows plus symmetry of the residual
/// classes, `([B_a, S02_b] - [B_b, S02_a]) - (T_ab - T_ba) in span{S02_g}`.
fn solve_relaxed(data: &FocData) -> Option<Vec<Mat>> {
    let (s, r) = (data.s, data.r);
    let nb = r * s * s;
    let n_pairs = r * (r.saturating_sub(1)) / 2;
    let cols = nb + r * r * r + n_pairs * r;
    let mut sys = SystemBuilder::new(cols);
    push_normalizer_rows(&mut sys, data, nb);
    let nu_base = nb + r * r * r;
    let mut pair_index = 0;
    for a in 0..r {
        for b in (a + 1)..r {
            let mut colspec = Vec::new();
            for p in 0..s {
                for q in 0..s {
                    let e = unit_mat(s, p, q);
                    colspec.push((a * s * s + p * s + q, ad_l_on_s02(&e, &data.s02[b])));
                    colspec.push((
                        b * s * s + p * s + q,
                        mat_neg(&ad_l_on_s02(&e, &data.s02[a])),
                    ));
                }
            }
            for g in 0..r {
                colspec.push((nu_base + pair_index * r + g, mat_neg(&data.s02[g])));
            }
            let rhs = mat_sub(&data.t[a][b], &data.t[b][a]);
            sys.push_matrix_equation(s, &colspec, &rhs);
            pair_index += 1;
        }
    }
    sys.solve()
        .map(|x| (0..r).map(|a| unvectorize(s, &x[a * s * s..(a + 1) * s * s])).collect())
}

/// Decides whether the symbol of `eq` is constant to first order at the
/// origin by exact linear feasibility, and computes canonical residual
/// classes when it is not.
pub fn first_order_constancy(eq: &DefiningEquation) -> Result<FocReport> {
    let data = foc_data(eq)?;
    if let Some(b) = solve_full(&data) {
        return Ok(FocReport {
            constant_to_first_order: true,
            b,
            obstructions: Vec::new(),
        });
    }
    let b = solve_relaxed(&data)
        .unwrap_or_else(|| vec![crate::linalg::mat_zero(data.s, data.s); data.r]);
    let gens: Vec<Vec<GaussianRational>> = data.s02.iter().map(vectorize).collect();
    let reducer = SpanReducer::new(&gens);
    let mut obstructions = Vec::new();
    for a in 0..data.r {
        for bidx in 0..data.r {
            let residual_mat = mat_sub(&data.t[a][bidx], &ad_l_on_s02(&b[a], &data.s02[bidx]));
            let reduced = reducer.reduce(&vectorize(&residual_mat));
            if reduced.iter().any(|c| !c.is_zero()) {
                obstructions.push(FocObstruction {
                    alpha: a + 1,
                    beta: bidx + 1,
                    residual: unvectorize(data.s, &reduced),
                });
            }
        }
    }
    Ok(FocReport {
        constant_to_first_order: false,
        b,
        obstructions,
    })
}

/// Assembles the modified symbol of `eq` at the origin: the bigraded symbol
/// plus `Omega_a = (frame Omega_a)(0) + B_a` for a normalizing solution `B`.
///
/// Fails when the symbol is not constant to first order.
pub fn modified_symbol_at_zero(eq: &DefiningEquation) -> Result<ModifiedSymbol> {
    let report = first_order_constancy(eq)?;
    if !report.constant_to_first_order {
        return Err(Error::Precondition(
            "the symbol is not constant to first order at the origin".into(),
        ));
    }
    let frame = frame_omega(eq)?;
    let omega = frame
        .iter()
        .zip(&report.b)
        .map(|(f, b)| mat_add(&f.eval_zero(), b))
        .collect();
    ModifiedSymbol::new(bigraded_symbol_at_zero(eq)?, omega)
}

/// Basis of the stabilizer algebra of a bigraded symbol: all `B` with
/// `B^T M_a + M_a B in span{M_g}` for `M_a = H0 conj(Xi_a)` and
/// `B S02_a + S02_a B^T in span{S02_g}`, projected from the joint solution
/// space by a final elimination.
pub fn g00_prime(base: &BigradedSymbol) -> Vec<Mat> {
    let s = base.s();
    let r = base.r();
    let s02 = base.s02_blocks();
    let m_blocks: Vec<Mat> = base
        .xi()
        .iter()
        .map(|xi| mat_mul(base.inv().h(), &mat_conj(xi)))
        .collect();
    let nb = s * s;
    let cols = nb + 2 * r * r;
    let mut sys = SystemBuilder::new(cols);
    let zero = crate::linalg::mat_zero(s, s);
    for a in 0..r {
        let mut colspec = Vec::new();
        for p in 0..s {
            for q in 0..s {
                colspec.push((p * s + q, act_on_m(&unit_mat(s, p, q), &m_blocks[a])));
            }
        }
        for g in 0..r {
            colspec.push((nb + a * r + g, mat_neg(&m_blocks[g])));
        }
        sys.push_matrix_equation(s, &colspec, &zero);

        let mut colspec = Vec::new();
        for p in 0..s {
            for q in 0..s {
                colspec.push((p * s + q, ad_l_on_s02(&unit_mat(s, p, q), &s02[a])));
            }
        }
        for g in 0..r {
            colspec.push((nb + r * r + a * r + g, mat_neg(&s02[g])));
        }
        sys.push_matrix_equation(s, &colspec, &zero);
    }
    let kernel = nullspace(&sys.a);
    let mut projected: Mat = kernel.iter().map(|v| v[..nb].to_vec()).collect();
    if projected.is_empty() {
        return Vec::new();
    }
    let pivots = rref(&mut projected);
    projected.truncate(pivots.len());
    projected.iter().map(|v| unvectorize(s, v)).collect()
}

/// A span-membership certificate for one realizability condition.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SpanWitness {
    /// Which condition (1 = opposite blocks, 2 = quadratic blocks).
    pub condition: u8,
    /// 1-based kernel-direction indices.
    pub alpha: usize,
    pub beta: usize,
    /// Coefficients over the respective block family.
    pub coefficients: Vec<GaussianRational>,
}

/// The first violated realizability condition, with its quotient residual.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SpanViolation {
    pub condition: u8,
    pub alpha: usize,
    pub beta: usize,
    pub residual: Mat,
}

/// Outcome of the realizability test on a modified symbol.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RealizabilityReport {
    pub realizable: bool,
    /// Span coefficients for every condition when realizable.
    pub certificate: Vec<SpanWitness>,
    pub violation: Option<SpanViolation>,
}

/// Tests the two span conditions characterizing realizable modified symbols:
/// `Omega_b^T M_a + M_a Omega_b in span{M_g}` for `M_a = H0 conj(Xi_a)`, and
/// `[Omega_a, S02_b] - [Omega_b, S02_a] in span{S02_g}` with
/// `[W, Sigma] = W Sigma + Sigma W^T`.
pub fn check_realizable(sym: &ModifiedSymbol) -> RealizabilityReport {
    let base = sym.base();
    let s02 = base.s02_blocks();
    let m_blocks: Vec<Mat> = base
        .xi()
        .iter()
        .map(|xi| mat_mul(base.inv().h(), &mat_conj(xi)))
        .collect();
    let m_gens: Vec<Vec<GaussianRational>> = m_blocks.iter().map(vectorize).collect();
    let s_gens: Vec<Vec<GaussianRational>> = s02.iter().map(vectorize).collect();
    let mut certificate = Vec::new();
    let r = sym.r();
    let s = sym.s();
    for a in 0..r {
        for b in 0..r {
            let value = act_on_m(&sym.omega()[b], &m_blocks[a]);
            match span_solve(&m_gens, &vectorize(&value)) {
                Some(coefficients) => certificate.push(SpanWitness {
                    condition: 1,
                    alpha: a + 1,
                    beta: b + 1,
                    coefficients,
                }),
                None => {
                    let reduced = SpanReducer::new(&m_gens).reduce(&vectorize(&value));
                    return RealizabilityReport {
                        realizable: false,
                        certificate: Vec::new(),
                        violation: Some(SpanViolation {
                            condition: 1,
                            alpha: a + 1,
                            beta: b + 1,
                            residual: unvectorize(s, &reduced),
                        }),
                    };
                }
            }
        }
    }
    for a in 0..r {
        for b in 0..r {
            let value = mat_sub(
                &ad_l_on_s02(&sym.omega()[a], &s02[b]),
                &ad_l_on_s02(&sym.omega()[b], &s02[a]),
            );
            match span_solve(&s_gens, &vectorize(&value)) {
                Some(coefficients) => certificate.push(SpanWitness {
                    condition: 2,
                    alpha: a + 1,
                    beta: b + 1,
                    coefficients,
                }),
                None => {
                    let reduced = SpanReducer::new(&s_gens).reduce(&vectorize(&value));
                    return RealizabilityReport {
                        realizable: false,
                        certificate: Vec::new(),
                        violation: Some(SpanViolation {
                            condition: 2,
                            alpha: a + 1,
                            beta: b + 1,
                            residual: unvectorize(s, &reduced),
                        }),
                    };
                }
            }
        }
    }
    RealizabilityReport {
        realizable: true,
        certificate,
        violation: None,
    }
}

/// Transports a modified symbol by a structure-group element, applying all
/// three transformation laws coherently and recomputing the stabilizer.
pub fn act_on_modified_symbol(g: &GroupElement00, sym: &ModifiedSymbol) -> Result<ModifiedSymbol> {
    let inv = g.act_involution(sym.base().inv())?;
    let xi = sym.base().xi().iter().map(|m| g.act_xi(m)).collect();
    let omega = sym.omega().iter().map(|m| g.act_omega(m)).collect();
    ModifiedSymbol::new(BigradedSymbol::new(inv, xi)?, omega)
}
