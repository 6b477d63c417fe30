//! Evaluation of Laurent polynomials modulo the prime `2^61 − 1` at fixed
//! pseudo-random points. Equal polynomials always get equal fingerprints;
//! distinct ones collide with probability about `degree / 2^61` per point.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::{Int, LaurentPoly, VarId};

pub const MODULUS: u64 = (1 << 61) - 1;
const POINTS: usize = 2;

pub type Fingerprint = [u64; POINTS];

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

/// `a^{-1}`; `None` for zero.
pub fn inverse(a: u64) -> Option<u64> {
    (a != 0).then(|| pow(a, MODULUS - 2))
}

fn residue(c: &Int) -> u64 {
    match c.to_i64() {
        Some(v) => v.rem_euclid(MODULUS as i64) as u64,
        None => {
            let m = BigInt::from(MODULUS);
            ((c.to_big() % &m + &m) % &m).to_u64().expect("reduced")
        }
    }
}

pub fn negate(f: Fingerprint) -> Fingerprint {
    f.map(|a| (MODULUS - a) % MODULUS)
}

/// Values of every variable at the evaluation points, drawn from a fixed
/// seed so fingerprints are reproducible.
pub struct Evaluator {
    values: Vec<FxHashMap<VarId, u64>>,
    rng: ChaCha8Rng,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator { values: vec![FxHashMap::default(); POINTS], rng: ChaCha8Rng::seed_from_u64(0x4c50_6772_6170_6821) }
    }
}

impl Evaluator {
    fn value(&mut self, k: usize, v: VarId) -> u64 {
        if let Some(&x) = self.values[k].get(&v) {
            return x;
        }
        let x = self.rng.gen_range(2..MODULUS);
        self.values[k].insert(v, x);
        x
    }

    /// `None` if a variable with a negative exponent evaluates to zero
    /// (never for the generated points).
    pub fn eval(&mut self, p: &LaurentPoly) -> Option<Fingerprint> {
        let mut out = [0u64; POINTS];
        for (mono, c) in p.terms() {
            let c = residue(&c);
            for (k, slot) in out.iter_mut().enumerate() {
                let mut t = c;
                for &(v, e) in &mono {
                    let x = self.value(k, v);
                    let base = if e < 0 { inverse(x)? } else { x };
                    t = mul(t, pow(base, e.unsigned_abs() as u64));
                }
                *slot = (*slot + t) % MODULUS;
            }
        }
        Some(out)
    }

    /// Evaluates `p` with the variables in `subst` replaced by the given
    /// fingerprints (the rest take their own point values).
    pub fn eval_with(&mut self, p: &LaurentPoly, subst: &dyn Fn(VarId) -> Option<Fingerprint>) -> Option<Fingerprint> {
        let mut out = [0u64; POINTS];
        for (mono, c) in p.terms() {
            let c = residue(&c);
            for (k, slot) in out.iter_mut().enumerate() {
                let mut t = c;
                for &(v, e) in &mono {
                    let x = match subst(v) {
                        Some(f) => f[k],
                        None => self.value(k, v),
                    };
                    let base = if e < 0 { inverse(x)? } else { x };
                    t = mul(t, pow(base, e.unsigned_abs() as u64));
                }
                *slot = (*slot + t) % MODULUS;
            }
        }
        Some(out)
    }
}

/// Pointwise quotient; `None` if `b` vanishes at a point.
pub fn divide(a: Fingerprint, b: Fingerprint) -> Option<Fingerprint> {
    let mut out = [0u64; POINTS];
    for k in 0..POINTS {
        out[k] = mul(a[k], inverse(b[k])?);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_operations_commute_with_evaluation() {
        let p: LaurentPoly = "(X1 + A2)^3/X2 - 7*X1".parse().unwrap();
        let q: LaurentPoly = "X2^2 + 123456789012345678901234567890*A1".parse().unwrap();
        let mut e = Evaluator::default();
        let (fp, fq) = (e.eval(&p).unwrap(), e.eval(&q).unwrap());
        let prod = e.eval(&(&p * &q)).unwrap();
        for k in 0..POINTS {
            assert_eq!(prod[k], mul(fp[k], fq[k]));
        }
        assert_eq!(divide(prod, fq).unwrap(), fp);
        assert_eq!(e.eval(&-&p).unwrap(), negate(fp));
        let z = VarId::z(1);
        let r: LaurentPoly = "Z1^2 + Z1/X1".parse().unwrap();
        let direct = e.eval(&r.substitute(z, &q).unwrap()).unwrap();
        assert_eq!(e.eval_with(&r, &|v| (v == z).then_some(fq)).unwrap(), direct);
    }
}
