//! The bigraded matrix Lie algebra underlying the symbol calculus, its
//! antilinear involution, and the structure-group action.
//!
//! Elements are `(2s+2) x (2s+2)` complex matrices determined by blocks
//!
//! ```text
//! [  c     0      0    0 ]
//! [ v1     L     S02   0 ]
//! [ v2   S0m2  -L^T    0 ]
//! [ iu   v2^T  -v1^T  -c ]
//! ```
//!
//! with `S02` and `S0m2` symmetric. The bigrade decomposition puts `u` in
//! `(-2,0)`, `v1` in `(-1,1)`, `v2` in `(-1,-1)`, `c` and `L` in `(0,0)`,
//! `S02` in `(0,2)` and `S0m2` in `(0,-2)`. The bracket is the matrix
//! commutator; `disassemble` doubles as a proof that a commutator stayed in
//! the algebra. All block constraints are validated on construction, so a
//! value of `CspElement` is always a genuine algebra element.

use crate::error::{Error, Result};
use crate::linalg::{
    mat_conj, mat_identity, mat_inverse, mat_is_hermitian, mat_is_symmetric, mat_is_zero,
    mat_mul, mat_neg, mat_scale, mat_star, mat_sub, mat_transpose, mat_vec, mat_zero, Mat,
};
use crate::scalar::GaussianRational;
use serde::{Deserialize, Serialize};

fn vec_conj(v: &[GaussianRational]) -> Vec<GaussianRational> {
    v.iter().map(GaussianRational::conj).collect()
}

fn vec_is_zero(v: &[GaussianRational]) -> bool {
    v.iter().all(GaussianRational::is_zero)
}

/// One element of the bigraded algebra; see the module docs for the layout.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "CspRepr", into = "CspRepr")]
pub struct CspElement {
    s: usize,
    c: GaussianRational,
    l: Mat,
    s02: Mat,
    s0m2: Mat,
    v1: Vec<GaussianRational>,
    v2: Vec<GaussianRational>,
    u: GaussianRational,
}

#[derive(Serialize, Deserialize, Clone)]
struct CspRepr {
    s: usize,
    c: GaussianRational,
    #[serde(rename = "L")]
    l: Mat,
    #[serde(rename = "S02")]
    s02: Mat,
    #[serde(rename = "S0m2")]
    s0m2: Mat,
    v1: Vec<GaussianRational>,
    v2: Vec<GaussianRational>,
    u: GaussianRational,
}

impl TryFrom<CspRepr> for CspElement {
    type Error = Error;
    fn try_from(r: CspRepr) -> Result<Self> {
        CspElement::new(r.s, r.c, r.l, r.s02, r.s0m2, r.v1, r.v2, r.u)
    }
}

impl From<CspElement> for CspRepr {
    fn from(e: CspElement) -> Self {
        CspRepr { s: e.s, c: e.c, l: e.l, s02: e.s02, s0m2: e.s0m2, v1: e.v1, v2: e.v2, u: e.u }
    }
}

fn expect_square(m: &Mat, s: usize, name: &str) -> Result<()> {
    if m.len() != s || m.iter().any(|row| row.len() != s) {
        return Err(Error::Dimension(format!("{name} block must be {s} x {s}")));
    }
    Ok(())
}

impl CspElement {
    /// Validating constructor from all blocks.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        s: usize,
        c: GaussianRational,
        l: Mat,
        s02: Mat,
        s0m2: Mat,
        v1: Vec<GaussianRational>,
        v2: Vec<GaussianRational>,
        u: GaussianRational,
    ) -> Result<Self> {
        if s == 0 {
            return Err(Error::Dimension("block size s must be positive".to_string()));
        }
        expect_square(&l, s, "L")?;
        expect_square(&s02, s, "S02")?;
        expect_square(&s0m2, s, "S0m2")?;
        if v1.len() != s || v2.len() != s {
            return Err(Error::Dimension(format!("v1 and v2 must have length {s}")));
        }
        if !mat_is_symmetric(&s02) {
            return Err(Error::Invalid("S02 block must be symmetric".to_string()));
        }
        if !mat_is_symmetric(&s0m2) {
            return Err(Error::Invalid("S0m2 block must be symmetric".to_string()));
        }
        Ok(CspElement { s, c, l, s02, s0m2, v1, v2, u })
    }

    pub fn zero(s: usize) -> Self {
        CspElement {
            s,
            c: GaussianRational::zero(),
            l: mat_zero(s, s),
            s02: mat_zero(s, s),
            s0m2: mat_zero(s, s),
            v1: vec![GaussianRational::zero(); s],
            v2: vec![GaussianRational::zero(); s],
            u: GaussianRational::zero(),
        }
    }

    /// Element with only the `L` block set.
    pub fn from_l(l: Mat) -> Result<Self> {
        let s = l.len();
        let mut e = Self::zero(s);
        expect_square(&l, s, "L")?;
        e.l = l;
        Ok(e)
    }

    /// Element with only the `S02` block set.
    pub fn from_s02(s02: Mat) -> Result<Self> {
        let s = s02.len();
        let mut e = Self::zero(s);
        expect_square(&s02, s, "S02")?;
        if !mat_is_symmetric(&s02) {
            return Err(Error::Invalid("S02 block must be symmetric".to_string()));
        }
        e.s02 = s02;
        Ok(e)
    }

    /// Element with only the `S0m2` block set.
    pub fn from_s0m2(s0m2: Mat) -> Result<Self> {
        let s = s0m2.len();
        let mut e = Self::zero(s);
        expect_square(&s0m2, s, "S0m2")?;
        if !mat_is_symmetric(&s0m2) {
            return Err(Error::Invalid("S0m2 block must be symmetric".to_string()));
        }
        e.s0m2 = s0m2;
        Ok(e)
    }

    pub fn s(&self) -> usize {
        self.s
    }
    pub fn c(&self) -> &GaussianRational {
        &self.c
    }
    pub fn l(&self) -> &Mat {
        &self.l
    }
    pub fn s02(&self) -> &Mat {
        &self.s02
    }
    pub fn s0m2(&self) -> &Mat {
        &self.s0m2
    }
    pub fn v1(&self) -> &[GaussianRational] {
        &self.v1
    }
    pub fn v2(&self) -> &[GaussianRational] {
        &self.v2
    }
    pub fn u(&self) -> &GaussianRational {
        &self.u
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
            && self.u.is_zero()
            && mat_is_zero(&self.l)
            && mat_is_zero(&self.s02)
            && mat_is_zero(&self.s0m2)
            && vec_is_zero(&self.v1)
            && vec_is_zero(&self.v2)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.s, other.s, "block size mismatch");
        CspElement {
            s: self.s,
            c: &self.c + &other.c,
            l: crate::linalg::mat_add(&self.l, &other.l),
            s02: crate::linalg::mat_add(&self.s02, &other.s02),
            s0m2: crate::linalg::mat_add(&self.s0m2, &other.s0m2),
            v1: self.v1.iter().zip(&other.v1).map(|(a, b)| a + b).collect(),
            v2: self.v2.iter().zip(&other.v2).map(|(a, b)| a + b).collect(),
            u: &self.u + &other.u,
        }
    }

    pub fn scale(&self, k: &GaussianRational) -> Self {
        CspElement {
            s: self.s,
            c: &self.c * k,
            l: mat_scale(&self.l, k),
            s02: mat_scale(&self.s02, k),
            s0m2: mat_scale(&self.s0m2, k),
            v1: self.v1.iter().map(|a| a * k).collect(),
            v2: self.v2.iter().map(|a| a * k).collect(),
            u: &self.u * k,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-GaussianRational::one())
    }

    /// The full `(2s+2) x (2s+2)` matrix.
    pub fn assemble(&self) -> Mat {
        let s = self.s;
        let n = 2 * s + 2;
        let mut m = mat_zero(n, n);
        m[0][0] = self.c.clone();
        m[n - 1][n - 1] = -&self.c;
        m[n - 1][0] = &GaussianRational::i() * &self.u;
        for i in 0..s {
            m[1 + i][0] = self.v1[i].clone();
            m[1 + s + i][0] = self.v2[i].clone();
            m[n - 1][1 + i] = self.v2[i].clone();
            m[n - 1][1 + s + i] = -&self.v1[i];
            for j in 0..s {
                m[1 + i][1 + j] = self.l[i][j].clone();
                m[1 + i][1 + s + j] = self.s02[i][j].clone();
                m[1 + s + i][1 + j] = self.s0m2[i][j].clone();
                m[1 + s + i][1 + s + j] = -&self.l[j][i];
            }
        }
        m
    }

    /// Recover the blocks from a full matrix, verifying every structural
    /// constraint of the algebra.
    pub fn disassemble(m: &Mat) -> Result<Self> {
        let n = m.len();
        if n < 4 || n % 2 != 0 || m.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension(
                "algebra elements are square matrices of even size at least 4".to_string(),
            ));
        }
        let s = (n - 2) / 2;
        let c = m[0][0].clone();
        for j in 1..n {
            if !m[0][j].is_zero() {
                return Err(Error::Invalid(format!(
                    "matrix is outside the algebra: first row must vanish past column 0, found entry at column {j}"
                )));
            }
        }
        for i in 0..n - 1 {
            if !m[i][n - 1].is_zero() {
                return Err(Error::Invalid(format!(
                    "matrix is outside the algebra: last column must vanish above the corner, found entry at row {i}"
                )));
            }
        }
        if m[n - 1][n - 1] != -&c {
            return Err(Error::Invalid(
                "matrix is outside the algebra: corner entries must be opposite".to_string(),
            ));
        }
        let block = |r0: usize, c0: usize| -> Mat {
            (0..s).map(|i| (0..s).map(|j| m[r0 + i][c0 + j].clone()).collect()).collect()
        };
        let l = block(1, 1);
        let s02 = block(1, 1 + s);
        let s0m2 = block(1 + s, 1);
        let neg_lt = block(1 + s, 1 + s);
        if neg_lt != mat_neg(&mat_transpose(&l)) {
            return Err(Error::Invalid(
                "matrix is outside the algebra: lower diagonal block must be the negative transpose of the upper one".to_string(),
            ));
        }
        let v1: Vec<GaussianRational> = (0..s).map(|i| m[1 + i][0].clone()).collect();
        let v2: Vec<GaussianRational> = (0..s).map(|i| m[1 + s + i][0].clone()).collect();
        for j in 0..s {
            if m[n - 1][1 + j] != v2[j] || m[n - 1][1 + s + j] != -&v1[j] {
                return Err(Error::Invalid(
                    "matrix is outside the algebra: bottom row must repeat the first-column blocks".to_string(),
                ));
            }
        }
        let u = &m[n - 1][0] * &(-GaussianRational::i());
        CspElement::new(s, c, l, s02, s0m2, v1, v2, u)
    }

    /// Matrix commutator; the result is disassembled, which proves the
    /// algebra is closed for these arguments.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.s, other.s, "block size mismatch");
        let a = self.assemble();
        let b = other.assemble();
        let comm = mat_sub(&mat_mul(&a, &b), &mat_mul(&b, &a));
        Self::disassemble(&comm).expect("commutator escaped the algebra")
    }

    /// Component of one bigrade, all other blocks zeroed. Valid bigrades
    /// are (0,0), (0,2), (0,-2), (-1,1), (-1,-1) and (-2,0).
    pub fn project(&self, k: i32, w: i32) -> Self {
        let mut out = Self::zero(self.s);
        match (k, w) {
            (0, 0) => {
                out.c = self.c.clone();
                out.l = self.l.clone();
            }
            (0, 2) => out.s02 = self.s02.clone(),
            (0, -2) => out.s0m2 = self.s0m2.clone(),
            (-1, 1) => out.v1 = self.v1.clone(),
            (-1, -1) => out.v2 = self.v2.clone(),
            (-2, 0) => out.u = self.u.clone(),
            _ => panic!("({k},{w}) is not a bigrade of this algebra"),
        }
        out
    }
}

/// `(0,0)`-block action on the `(0,2)` slot: `B . S = B S + S B^T`.
pub fn ad_l_on_s02(b: &Mat, sig: &Mat) -> Mat {
    crate::linalg::mat_add(&mat_mul(b, sig), &mat_mul(sig, &mat_transpose(b)))
}

/// `(0,0)`-block action on the `(0,-2)` slot: `B . S = -(B^T S + S B)`.
pub fn ad_l_on_s0m2(b: &Mat, sig: &Mat) -> Mat {
    mat_neg(&crate::linalg::mat_add(
        &mat_mul(&mat_transpose(b), sig),
        &mat_mul(sig, b),
    ))
}

/// Datum of the antilinear involution: an invertible Hermitian `H` and a
/// unimodular scalar. Two data give the same involution exactly when they
/// agree up to a simultaneous sign flip, and equality tests that.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "InvolutionRepr", into = "InvolutionRepr")]
pub struct Involution {
    h: Mat,
    eih: GaussianRational,
}

#[derive(Serialize, Deserialize, Clone)]
struct InvolutionRepr {
    #[serde(rename = "H")]
    h: Mat,
    eih: GaussianRational,
}

impl TryFrom<InvolutionRepr> for Involution {
    type Error = Error;
    fn try_from(r: InvolutionRepr) -> Result<Self> {
        Involution::new(r.h, r.eih)
    }
}

impl From<Involution> for InvolutionRepr {
    fn from(v: Involution) -> Self {
        InvolutionRepr { h: v.h, eih: v.eih }
    }
}

impl Involution {
    pub fn new(h: Mat, eih: GaussianRational) -> Result<Self> {
        let s = h.len();
        if s == 0 || h.iter().any(|row| row.len() != s) {
            return Err(Error::Dimension("H must be square and nonempty".to_string()));
        }
        if !mat_is_hermitian(&h) {
            return Err(Error::DegenerateHermitian("H must be Hermitian".to_string()));
        }
        if mat_inverse(&h).is_none() {
            return Err(Error::DegenerateHermitian("H must be invertible".to_string()));
        }
        if !(&eih * &eih.conj()).is_one() {
            return Err(Error::Invalid(
                "the scalar of an involution must be unimodular".to_string(),
            ));
        }
        Ok(Involution { h, eih })
    }

    pub fn h(&self) -> &Mat {
        &self.h
    }

    pub fn eih(&self) -> &GaussianRational {
        &self.eih
    }

    pub fn s(&self) -> usize {
        self.h.len()
    }
}

impl PartialEq for Involution {
    fn eq(&self, other: &Self) -> bool {
        (self.h == other.h && self.eih == other.eih)
            || (self.h == mat_neg(&other.h) && self.eih == -&other.eih)
    }
}

impl Eq for Involution {}

/// Apply the antilinear involution attached to `(H, e^{ih})` to an algebra
/// element. It is an involution (applying it twice is the identity) and it
/// exchanges the `(0,2)`/`(0,-2)` and `(-1,1)`/`(-1,-1)` slots.
pub fn sigma(inv: &Involution, x: &CspElement) -> Result<CspElement> {
    let s = inv.s();
    if x.s() != s {
        return Err(Error::Dimension(
            "involution and element block sizes differ".to_string(),
        ));
    }
    let h = inv.h();
    let eih = inv.eih();
    let ht_inv = mat_inverse(&mat_transpose(h)).expect("validated invertible");
    let h_inv = mat_inverse(h).expect("validated invertible");

    let c = x.c().conj();
    let v1 = mat_vec(&mat_scale(&ht_inv, eih), &vec_conj(x.v2()));
    let v2 = mat_vec(&mat_scale(h, eih), &vec_conj(x.v1()));
    let l = mat_neg(&mat_mul(&ht_inv, &mat_mul(&mat_star(x.l()), &mat_transpose(h))));
    let s02 = mat_mul(&ht_inv, &mat_mul(&mat_conj(x.s0m2()), &h_inv));
    let s0m2 = mat_mul(h, &mat_mul(&mat_conj(x.s02()), &mat_transpose(h)));
    let u = &(eih * eih) * &x.u().conj();
    CspElement::new(s, c, l, s02, s0m2, v1, v2, u)
}

/// Element of the structure group acting on symbol data: a nonzero scalar
/// and an invertible matrix.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "GroupRepr", into = "GroupRepr")]
pub struct GroupElement00 {
    b: GaussianRational,
    m: Mat,
}

#[derive(Serialize, Deserialize, Clone)]
struct GroupRepr {
    b: GaussianRational,
    #[serde(rename = "B")]
    m: Mat,
}

impl TryFrom<GroupRepr> for GroupElement00 {
    type Error = Error;
    fn try_from(r: GroupRepr) -> Result<Self> {
        GroupElement00::new(r.b, r.m)
    }
}

impl From<GroupElement00> for GroupRepr {
    fn from(g: GroupElement00) -> Self {
        GroupRepr { b: g.b, m: g.m }
    }
}

impl GroupElement00 {
    pub fn new(b: GaussianRational, m: Mat) -> Result<Self> {
        if b.is_zero() {
            return Err(Error::Invalid("group scalar must be nonzero".to_string()));
        }
        let s = m.len();
        if s == 0 || m.iter().any(|row| row.len() != s) {
            return Err(Error::Dimension("group matrix must be square".to_string()));
        }
        if mat_inverse(&m).is_none() {
            return Err(Error::Singular("group matrix must be invertible".to_string()));
        }
        Ok(GroupElement00 { b, m })
    }

    pub fn identity(s: usize) -> Self {
        GroupElement00 { b: GaussianRational::one(), m: mat_identity(s) }
    }

    pub fn b(&self) -> &GaussianRational {
        &self.b
    }

    pub fn matrix(&self) -> &Mat {
        &self.m
    }

    /// The unimodular-like factor `b / conj(b)` entering the actions.
    pub fn phase(&self) -> GaussianRational {
        &self.b * &self.b.conj().inv().expect("nonzero scalar")
    }

    /// `H -> B^T H conj(B)`, `e^{ih} -> (b/conj(b)) e^{ih}`.
    pub fn act_involution(&self, inv: &Involution) -> Result<Involution> {
        let bt = mat_transpose(&self.m);
        let h = mat_mul(&bt, &mat_mul(inv.h(), &mat_conj(&self.m)));
        Involution::new(h, &self.phase() * inv.eih())
    }

    /// `Xi -> (b/conj(b)) B^{-1} Xi conj(B)`.
    pub fn act_xi(&self, xi: &Mat) -> Mat {
        let binv = mat_inverse(&self.m).expect("validated invertible");
        mat_scale(&mat_mul(&binv, &mat_mul(xi, &mat_conj(&self.m))), &self.phase())
    }

    /// `Omega -> B^{-1} Omega B`.
    pub fn act_omega(&self, omega: &Mat) -> Mat {
        let binv = mat_inverse(&self.m).expect("validated invertible");
        mat_mul(&binv, &mat_mul(omega, &self.m))
    }

    /// `S -> B^{-1} S B^{-T}` on the `(0,2)` slot.
    pub fn act_s02(&self, s02: &Mat) -> Mat {
        let binv = mat_inverse(&self.m).expect("validated invertible");
        mat_mul(&binv, &mat_mul(s02, &mat_transpose(&binv)))
    }

    /// Product with `act(a.group_mul(b)) = act(a) . act(b)` (apply `b`
    /// first, then `a`).
    pub fn group_mul(&self, rhs: &Self) -> Self {
        GroupElement00 { b: &self.b * &rhs.b, m: mat_mul(&rhs.m, &self.m) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(s: &str) -> GaussianRational {
        GaussianRational::parse(s).unwrap()
    }

    fn m(rows: &[&[&str]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|e| gr(e)).collect()).collect()
    }

    fn generic_element() -> CspElement {
        CspElement::new(
            2,
            gr("1+2i"),
            m(&[&["1", "2i"], &["0", "-1/2"]]),
            m(&[&["1", "3"], &["3", "-1i"]]),
            m(&[&["0", "1/2"], &["1/2", "2"]]),
            vec![gr("1"), gr("-1i")],
            vec![gr("2"), gr("0")],
            gr("5-1i"),
        )
        .unwrap()
    }

    #[test]
    fn assemble_then_disassemble_round_trips() {
        let e = generic_element();
        let back = CspElement::disassemble(&e.assemble()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn disassemble_rejects_broken_structure() {
        let e = generic_element();
        let mut bad = e.assemble();
        bad[0][3] = gr("1");
        assert!(CspElement::disassemble(&bad).is_err());

        let mut bad = e.assemble();
        bad[5][5] = gr("7");
        assert!(CspElement::disassemble(&bad).is_err());

        let mut bad = e.assemble();
        bad[5][1] = gr("9");
        assert!(CspElement::disassemble(&bad).is_err());
    }

    #[test]
    fn constructor_rejects_asymmetric_blocks() {
        assert!(CspElement::from_s02(m(&[&["0", "1"], &["2", "0"]])).is_err());
        assert!(CspElement::from_s0m2(m(&[&["0", "1"], &["2", "0"]])).is_err());
    }

    #[test]
    fn bracket_matches_block_formulas_on_l_and_s_slots() {
        let b = m(&[&["1", "2"], &["-1i", "0"]]);
        let sig = m(&[&["2", "1"], &["1", "-3"]]);
        let x = CspElement::from_l(b.clone()).unwrap();
        let y02 = CspElement::from_s02(sig.clone()).unwrap();
        let y0m2 = CspElement::from_s0m2(sig.clone()).unwrap();

        let br = x.bracket(&y02);
        assert_eq!(br.s02(), &ad_l_on_s02(&b, &sig));
        assert!(br.project(0, 0).is_zero());
        assert!(br.project(0, -2).is_zero());

        let br = x.bracket(&y0m2);
        assert_eq!(br.s0m2(), &ad_l_on_s0m2(&b, &sig));
        assert!(br.project(0, 2).is_zero());
    }

    #[test]
    fn scalar_part_acts_trivially_on_s_slots() {
        let mut e = CspElement::zero(2);
        e.c = gr("3+1i");
        let y = CspElement::from_s02(m(&[&["1", "0"], &["0", "2"]])).unwrap();
        assert!(e.bracket(&y).is_zero());
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi() {
        let a = generic_element();
        let mut b = CspElement::zero(2);
        b.v1 = vec![gr("1i"), gr("2")];
        b.l = m(&[&["0", "1"], &["1", "0"]]);
        let mut c = CspElement::zero(2);
        c.v2 = vec![gr("1"), gr("1")];
        c.s0m2 = m(&[&["1", "0"], &["0", "0"]]);

        assert_eq!(a.bracket(&b), b.bracket(&a).neg());
        let jac = a
            .bracket(&b.bracket(&c))
            .add(&b.bracket(&c.bracket(&a)))
            .add(&c.bracket(&a.bracket(&b)));
        assert!(jac.is_zero());
    }

    #[test]
    fn v_blocks_bracket_into_the_u_slot() {
        let mut x = CspElement::zero(1);
        x.v1 = vec![gr("1")];
        let mut y = CspElement::zero(1);
        y.v2 = vec![gr("1")];
        let br = x.bracket(&y);
        assert_eq!(br.u(), &gr("2i"));
        assert!(br.project(0, 0).is_zero());
        assert!(br.project(-1, 1).is_zero());
        assert!(br.project(-1, -1).is_zero());
    }

    #[test]
    fn involution_validation() {
        assert!(Involution::new(m(&[&["1", "1"], &["0", "1"]]), gr("1")).is_err());
        assert!(Involution::new(m(&[&["0", "0"], &["0", "0"]]), gr("1")).is_err());
        assert!(Involution::new(m(&[&["1", "0"], &["0", "1"]]), gr("2")).is_err());
        // Unimodular non-real scalars are fine.
        assert!(Involution::new(m(&[&["1"]]), gr("3/5+4/5i")).is_ok());
    }

    #[test]
    fn involutions_equal_up_to_sign_flip() {
        let a = Involution::new(m(&[&["1"]]), gr("1i")).unwrap();
        let b = Involution::new(m(&[&["-1"]]), gr("-1i")).unwrap();
        let c = Involution::new(m(&[&["-1"]]), gr("1i")).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sigma_moves_v1_into_the_v2_slot() {
        let inv = Involution::new(m(&[&["2"]]), gr("1i")).unwrap();
        let mut x = CspElement::zero(1);
        x.v1 = vec![gr("1+1i")];
        let y = sigma(&inv, &x).unwrap();
        assert!(vec_is_zero(y.v1()));
        assert_eq!(y.v2(), &[gr("2+2i")]);
    }

    #[test]
    fn sigma_squares_to_the_identity() {
        let inv = Involution::new(m(&[&["0", "1"], &["1", "0"]]), gr("1i")).unwrap();
        let x = generic_element();
        let once = sigma(&inv, &x).unwrap();
        let twice = sigma(&inv, &once).unwrap();
        assert_eq!(twice, x);
    }

    #[test]
    fn group_action_examples() {
        let g = GroupElement00::new(gr("1"), m(&[&["2"]])).unwrap();
        let inv = Involution::new(m(&[&["1"]]), gr("1")).unwrap();
        assert_eq!(g.act_involution(&inv).unwrap().h(), &m(&[&["4"]]));

        let g = GroupElement00::new(gr("1i"), m(&[&["1"]])).unwrap();
        let xi = m(&[&["1"]]);
        assert_eq!(g.act_xi(&xi), m(&[&["-1"]]));
    }

    #[test]
    fn group_mul_matches_composed_actions() {
        let g1 = GroupElement00::new(gr("1+1i"), m(&[&["1", "1"], &["0", "1"]])).unwrap();
        let g2 = GroupElement00::new(gr("2"), m(&[&["0", "1"], &["-1", "0"]])).unwrap();
        let inv = Involution::new(m(&[&["1", "1i"], &["-1i", "3"]]), gr("1")).unwrap();
        let xi = m(&[&["1", "2"], &["3", "4i"]]);
        let om = m(&[&["1", "0"], &["1", "-1"]]);
        let s02 = m(&[&["1", "2i"], &["2i", "0"]]);

        let prod = g1.group_mul(&g2);
        assert_eq!(
            prod.act_involution(&inv).unwrap(),
            g1.act_involution(&g2.act_involution(&inv).unwrap()).unwrap()
        );
        assert_eq!(prod.act_xi(&xi), g1.act_xi(&g2.act_xi(&xi)));
        assert_eq!(prod.act_omega(&om), g1.act_omega(&g2.act_omega(&om)));
        assert_eq!(prod.act_s02(&s02), g1.act_s02(&g2.act_s02(&s02)));
    }

    #[test]
    fn csp_serde_round_trip() {
        let e = generic_element();
        let text = serde_json::to_string(&e).unwrap();
        assert!(text.contains("\"S02\""));
        let back: CspElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);

        // Asymmetric S02 is rejected at parse time.
        let bad = text.replace(
            "\"S02\":[[\"1\",\"3\"],[\"3\",\"-1i\"]]",
            "\"S02\":[[\"1\",\"3\"],[\"4\",\"-1i\"]]",
        );
        assert_ne!(bad, text);
        assert!(serde_json::from_str::<CspElement>(&bad).is_err());
    }
}
