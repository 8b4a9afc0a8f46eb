//! Serde representation of truncated series.
//!
//! A series serializes as its variable counts, order, grading and a term
//! list; coefficients use the canonical Gaussian-rational string form.
//! Deserialization validates everything: exponent lengths, the truncation
//! order, duplicate monomials and zero coefficients are all rejected, so a
//! value that parses is already in canonical form and re-serializes to the
//! same bytes (term order is the sorted exponent order).

use super::{Grading, TruncatedSeries, VarSpace};
use crate::scalar::GaussianRational;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct VarsRepr {
    s: usize,
    r: usize,
    t: bool,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    c: GaussianRational,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    vars: VarsRepr,
    order: u32,
    grading: Grading,
    terms: Vec<TermRepr>,
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let space = self.space();
        let repr = SeriesRepr {
            vars: VarsRepr { s: space.s, r: space.r, t: space.has_t },
            order: self.order(),
            grading: self.grading(),
            terms: self
                .terms()
                .map(|(e, c)| TermRepr { exp: e.clone(), c: c.clone() })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.vars.s < 1 {
            return Err(D::Error::custom("series needs at least one z direction"));
        }
        let space = VarSpace::new(repr.vars.s, repr.vars.r, repr.vars.t);
        let mut out = TruncatedSeries::zero(space, repr.grading, repr.order);
        for term in &repr.terms {
            if term.exp.len() != space.num_vars() {
                return Err(D::Error::custom(format!(
                    "exponent vector length {} does not match the {} variables",
                    term.exp.len(),
                    space.num_vars()
                )));
            }
            if space.degree(&term.exp, repr.grading) > repr.order {
                return Err(D::Error::custom(
                    "term degree exceeds the declared order",
                ));
            }
            if term.c.is_zero() {
                return Err(D::Error::custom("zero coefficients must be omitted"));
            }
            if !out.coeff(&term.exp).is_zero() {
                return Err(D::Error::custom("duplicate monomial in term list"));
            }
            let mono = TruncatedSeries::monomial(
                space,
                repr.grading,
                repr.order,
                term.exp.clone(),
                term.c.clone(),
            );
            out = out.add(&mono);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Var;

    fn sample() -> TruncatedSeries {
        let space = VarSpace::new(1, 1, false);
        TruncatedSeries::var(space, Grading::Total, 3, Var::zeta(0))
            .add(&TruncatedSeries::monomial(
                space,
                Grading::Total,
                3,
                vec![0, 0, 2, 1],
                GaussianRational::parse("-1/2+1i").unwrap(),
            ))
    }

    #[test]
    fn round_trip_preserves_everything() {
        let s = sample();
        let text = serde_json::to_string(&s).unwrap();
        let back: TruncatedSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn canonical_text_form() {
        let s = sample();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"vars":{"s":1,"r":1,"t":false},"order":3,"grading":"total","terms":[{"exp":[0,0,1,0],"c":"1"},{"exp":[0,0,2,1],"c":"-1/2+1i"}]}"#
        );
    }

    #[test]
    fn rejects_degree_above_order() {
        let text = r#"{"vars":{"s":1,"r":1,"t":false},"order":1,"grading":"total","terms":[{"exp":[0,0,2,0],"c":"1"}]}"#;
        assert!(serde_json::from_str::<TruncatedSeries>(text).is_err());
    }

    #[test]
    fn rejects_duplicate_and_zero_terms() {
        let dup = r#"{"vars":{"s":1,"r":1,"t":false},"order":2,"grading":"total","terms":[{"exp":[0,0,1,0],"c":"1"},{"exp":[0,0,1,0],"c":"2"}]}"#;
        assert!(serde_json::from_str::<TruncatedSeries>(dup).is_err());
        let zero = r#"{"vars":{"s":1,"r":1,"t":false},"order":2,"grading":"total","terms":[{"exp":[0,0,1,0],"c":"0"}]}"#;
        assert!(serde_json::from_str::<TruncatedSeries>(zero).is_err());
    }

    #[test]
    fn rejects_bad_exponent_length() {
        let text = r#"{"vars":{"s":1,"r":1,"t":false},"order":2,"grading":"total","terms":[{"exp":[0,0,1],"c":"1"}]}"#;
        assert!(serde_json::from_str::<TruncatedSeries>(text).is_err());
    }

    #[test]
    fn weighted_grading_round_trips() {
        let space = VarSpace::new(1, 1, true);
        let s = TruncatedSeries::monomial(
            space,
            Grading::Weighted,
            2,
            vec![1, 1, 3, 0, 0],
            GaussianRational::parse("2i").unwrap(),
        );
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains(r#""grading":"weighted""#));
        assert!(text.contains(r#""t":true"#));
        let back: TruncatedSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
