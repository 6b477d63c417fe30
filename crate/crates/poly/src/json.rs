//! JSON term-list encoding: `[{"coeff": 2, "exps": {"X1": 1, "A2": -1}}]`.
//! Coefficients outside the `i64` range are written as decimal strings.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Int, LaurentPoly, VarId};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Small(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Term {
    coeff: Coeff,
    exps: BTreeMap<String, i32>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<Term> = self
            .terms()
            .into_iter()
            .map(|(m, c)| Term {
                coeff: match c.to_i64() {
                    Some(v) => Coeff::Small(v),
                    None => Coeff::Text(c.to_string()),
                },
                exps: m.into_iter().map(|(v, e)| (v.to_string(), e)).collect(),
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms = Vec::<Term>::deserialize(d)?;
        let mut rows = Vec::with_capacity(terms.len());
        for t in terms {
            let c: Int = match t.coeff {
                Coeff::Small(v) => Int::from(v),
                Coeff::Text(s) => s.parse().map_err(|_| D::Error::custom(format!("bad coefficient {s:?}")))?,
            };
            let mut m = Vec::with_capacity(t.exps.len());
            for (name, e) in t.exps {
                let v: VarId = name.parse().map_err(D::Error::custom)?;
                m.push((v, e));
            }
            rows.push((m, c));
        }
        Ok(LaurentPoly::from_terms(rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let p: LaurentPoly = "(A4 + X2)/X4 - 3".parse().unwrap();
        let big = LaurentPoly::constant("123456789012345678901234567890".parse::<Int>().unwrap());
        for q in [p, big, LaurentPoly::zero()] {
            let s = serde_json::to_string(&q).unwrap();
            let back: LaurentPoly = serde_json::from_str(&s).unwrap();
            assert_eq!(back, q);
        }
        let s = serde_json::to_string(&"X1^2".parse::<LaurentPoly>().unwrap()).unwrap();
        assert_eq!(s, r#"[{"coeff":1,"exps":{"X1":2}}]"#);
    }
}
