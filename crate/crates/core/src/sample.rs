//! Seeded generators for seed data, realizable symbols, group elements and
//! higher-weight perturbations.
//!
//! Every draw is a small exact Gaussian rational taken from a deterministic
//! ChaCha stream, so batteries built on these generators reproduce bit for
//! bit across runs and platforms. Generators that must satisfy nontrivial
//! invariants (invertibility, realizability) enforce them by construction —
//! diagonal families conjugated by random group elements — and panic loudly
//! if an invariant ever fails, since that would indicate a defect in the
//! library itself rather than in the caller.

use crate::error::Result;
use crate::lie::{GroupElement00, Involution};
use crate::linalg::{mat_inverse, Mat};
use crate::model::ModelData;
use crate::realize::SymbolInput;
use crate::scalar::GaussianRational;
use crate::series::{Grading, SeriesMatrix, TruncatedSeries, Var, VarSpace};
use crate::symbols::{act_on_modified_symbol, BigradedSymbol, ModifiedSymbol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic source of small exact scalars and structured objects.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    /// A sampler whose whole stream is fixed by `seed`.
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A real rational with numerator in `-4..=4` and denominator in `1..=3`.
    pub fn rational(&mut self) -> GaussianRational {
        let num: i64 = self.rng.gen_range(-4..=4);
        let den: i64 = self.rng.gen_range(1..=3);
        GaussianRational::from_ratio(num, den)
    }

    /// A nonzero real rational.
    pub fn nonzero_rational(&mut self) -> GaussianRational {
        loop {
            let c = self.rational();
            if !c.is_zero() {
                return c;
            }
        }
    }

    /// A Gaussian rational with small real and imaginary parts.
    pub fn gaussian(&mut self) -> GaussianRational {
        let re = self.rational();
        let im = self.rational();
        &re + &(&im * &GaussianRational::i())
    }

    /// A nonzero Gaussian rational.
    pub fn nonzero_gaussian(&mut self) -> GaussianRational {
        loop {
            let c = self.gaussian();
            if !c.is_zero() {
                return c;
            }
        }
    }

    /// A unimodular scalar drawn from a fixed exact menu.
    pub fn unimodular(&mut self) -> GaussianRational {
        let menu = ["1", "-1", "1i", "-1i", "3/5+4/5i"];
        GaussianRational::parse(menu[self.rng.gen_range(0..menu.len())]).expect("literal")
    }

    /// A shape `(s, r)` with both components in `1..=max_s` and `1..=max_r`.
    pub fn shape(&mut self, max_s: usize, max_r: usize) -> (usize, usize) {
        (self.rng.gen_range(1..=max_s), self.rng.gen_range(1..=max_r))
    }

    /// A random invertible Hermitian `s x s` matrix. Invertibility is reached
    /// by adding a real multiple of the identity, which terminates because a
    /// matrix has finitely many eigenvalues.
    pub fn hermitian_form(&mut self, s: usize) -> Mat {
        let mut h = vec![vec![GaussianRational::zero(); s]; s];
        for i in 0..s {
            h[i][i] = self.rational();
            for j in (i + 1)..s {
                let c = self.gaussian();
                h[i][j] = c.clone();
                h[j][i] = c.conj();
            }
        }
        drift_to_invertible(h)
    }

    /// A random invertible `s x s` matrix.
    pub fn invertible(&mut self, s: usize) -> Mat {
        let m = (0..s)
            .map(|_| (0..s).map(|_| self.gaussian()).collect())
            .collect();
        drift_to_invertible(m)
    }

    /// Seed data of shape `(s, r)` with a sparse random `S(zeta)`, never
    /// identically zero.
    pub fn model_data(&mut self, s: usize, r: usize, order: u32) -> ModelData {
        let space = VarSpace::new(s, r, false);
        let h0 = self.hermitian_form(s);
        loop {
            let zero = TruncatedSeries::zero(space, Grading::Total, order);
            let mut entries = vec![vec![zero; s]; s];
            for i in 0..s {
                for j in i..s {
                    for _ in 0..self.rng.gen_range(0..=2) {
                        let deg = self.rng.gen_range(1..=order.min(3));
                        let mut exp = vec![0u32; space.num_vars()];
                        for _ in 0..deg {
                            exp[space.index_of(Var::zeta(self.rng.gen_range(0..r)))] += 1;
                        }
                        let mono = TruncatedSeries::monomial(
                            space,
                            Grading::Total,
                            order,
                            exp,
                            self.nonzero_gaussian(),
                        );
                        entries[i][j] = entries[i][j].add(&mono);
                        if i != j {
                            entries[j][i] = entries[i][j].clone();
                        }
                    }
                }
            }
            let sz = SeriesMatrix::from_entries(entries).expect("square grid");
            if sz.is_zero() {
                continue;
            }
            return ModelData::new(h0, sz).expect("sampled seed data is valid");
        }
    }

    /// A random group element: nonzero scalar and invertible matrix.
    pub fn group_element(&mut self, s: usize) -> GroupElement00 {
        GroupElement00::new(self.nonzero_gaussian(), self.invertible(s))
            .expect("sampled group element is valid")
    }

    /// A realizable symbol of shape `(s, r)` with `r <= s`: a diagonal family
    /// (which satisfies the span conditions identically) conjugated by a
    /// random group element.
    pub fn realizable_symbol(&mut self, s: usize, r: usize) -> SymbolInput {
        assert!(
            (1..=s).contains(&r),
            "the diagonal family needs 1 <= r <= s, got ({s}, {r})"
        );
        let mut h = vec![vec![GaussianRational::zero(); s]; s];
        for i in 0..s {
            h[i][i] = self.nonzero_rational();
        }
        let inv = Involution::new(h, self.unimodular()).expect("diagonal involution");
        let s02: Vec<Mat> = (0..r)
            .map(|a| {
                let mut m = vec![vec![GaussianRational::zero(); s]; s];
                m[a][a] = self.nonzero_gaussian();
                m
            })
            .collect();
        let omega: Vec<Mat> = (0..r)
            .map(|_| {
                let mut m = vec![vec![GaussianRational::zero(); s]; s];
                for i in 0..s {
                    m[i][i] = self.gaussian();
                }
                m
            })
            .collect();
        let base = BigradedSymbol::from_s02_blocks(inv, &s02).expect("diagonal family");
        let sym = ModifiedSymbol::new(base, omega).expect("diagonal family");
        let acted = act_on_modified_symbol(&self.group_element(s), &sym)
            .expect("the group action is defined on every symbol");
        SymbolInput::from_modified_symbol(&acted)
            .expect("conjugation preserves independence and the span conditions")
    }

    /// Random parameters `(a, b)` for a transversal symmetry: a complex
    /// vector and a real scalar.
    pub fn transversal_params(&mut self, s: usize) -> (Vec<GaussianRational>, GaussianRational) {
        let a = (0..s).map(|_| self.gaussian()).collect();
        (a, self.rational())
    }

    /// A nonzero real perturbation of weighted degree exactly 3 in the
    /// `t`-extended space: cubic in `(z, z_bar)` with `zeta` exponents within
    /// the declared truncation.
    pub fn weighted_perturbation(&mut self, s: usize, r: usize, zeta_order: u32) -> TruncatedSeries {
        let space = VarSpace::new(s, r, true);
        loop {
            let mut acc = TruncatedSeries::zero(space, Grading::Weighted, 3);
            for _ in 0..self.rng.gen_range(1..=3) {
                let mut exp = vec![0u32; space.num_vars()];
                for _ in 0..3 {
                    let i = self.rng.gen_range(0..s);
                    let v = if self.rng.gen_bool(0.5) { Var::z(i) } else { Var::zb(i) };
                    exp[space.index_of(v)] += 1;
                }
                for _ in 0..self.rng.gen_range(0..=zeta_order.min(2)) {
                    let a = self.rng.gen_range(0..r);
                    let v = if self.rng.gen_bool(0.5) {
                        Var::zeta(a)
                    } else {
                        Var::zetab(a)
                    };
                    exp[space.index_of(v)] += 1;
                }
                let mono =
                    TruncatedSeries::monomial(space, Grading::Weighted, 3, exp, self.nonzero_gaussian());
                acc = acc.add(&mono);
            }
            let q = acc.add(&acc.conjugate());
            if !q.is_zero() {
                return q;
            }
        }
    }
}

/// Adds `k * Id` for the smallest `k >= 0` making the matrix invertible.
fn drift_to_invertible(mut m: Mat) -> Mat {
    let one = GaussianRational::one();
    loop {
        if mat_inverse(&m).is_some() {
            return m;
        }
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = &row[i] + &one;
        }
    }
}

/// Convenience wrapper: `n` seed-data draws over shapes up to `(max_s, max_r)`.
pub fn model_batch(seed: u64, n: usize, max_s: usize, max_r: usize, order: u32) -> Vec<ModelData> {
    let mut sampler = Sampler::new(seed);
    (0..n)
        .map(|_| {
            let (s, r) = sampler.shape(max_s, max_r);
            sampler.model_data(s, r, order)
        })
        .collect()
}

/// Convenience wrapper: `n` realizable-symbol draws with `r <= s <= max_s`.
pub fn symbol_batch(seed: u64, n: usize, max_s: usize) -> Result<Vec<SymbolInput>> {
    let mut sampler = Sampler::new(seed);
    Ok((0..n)
        .map(|_| {
            let s = sampler.rng.gen_range(1..=max_s);
            let r = sampler.rng.gen_range(1..=s);
            sampler.realizable_symbol(s, r)
        })
        .collect())
}
