use crate::{LaurentPoly, PolyError, VarId};

/// Largest `s` with `q^s | p` in the Laurent ring. `q` must not be a unit.
pub fn multiplicity(p: &LaurentPoly, q: &LaurentPoly) -> Result<u32, PolyError> {
    multiplicity_over(p, q, &|_| false)
}

/// `q` divides `p` in the ring where the variables selected by `coefficient`
/// are polynomial (not inverted) and the rest are Laurent.
pub fn divides_over(q: &LaurentPoly, p: &LaurentPoly, coefficient: &dyn Fn(VarId) -> bool) -> Result<bool, PolyError> {
    Ok(quotient_over(p, q, coefficient)?.is_some())
}

fn quotient_over(p: &LaurentPoly, q: &LaurentPoly, coefficient: &dyn Fn(VarId) -> bool) -> Result<Option<LaurentPoly>, PolyError> {
    Ok(p.exact_divide(q)?.filter(|r| r.vars().iter().filter(|v| coefficient(**v)).all(|v| r.degree_range(*v).0 >= 0)))
}

/// [`multiplicity`] in the ring where the variables selected by `coefficient`
/// are not inverted. `q` must not be a unit of that ring.
pub fn multiplicity_over(p: &LaurentPoly, q: &LaurentPoly, coefficient: &dyn Fn(VarId) -> bool) -> Result<u32, PolyError> {
    if p.is_zero() {
        return Err(PolyError::DenUndefined("multiplicity in the zero polynomial".into()));
    }
    if q.is_zero() || (q.is_laurent_unit() && !q.vars().iter().any(|v| coefficient(*v))) {
        return Err(PolyError::DenUndefined(format!("{q} is zero or a unit")));
    }
    let mut s = 0;
    let mut rest = p.clone();
    while let Some(next) = quotient_over(&rest, q, coefficient)? {
        rest = next;
        s += 1;
    }
    Ok(s)
}

/// `den(P, x, Q) = min_k (k + max{s : Q^s | p_k})` where `P = Σ p_k x^k`.
///
/// This is the exponent of `x` divided out of `P` when forming the exchange
/// polynomial's reduced form. `P` must be a polynomial in `x`.
pub fn den(p: &LaurentPoly, x: VarId, q: &LaurentPoly) -> Result<u32, PolyError> {
    den_over(p, x, q, &|_| false)
}

/// [`den`] in the ring where the variables selected by `coefficient` are not
/// inverted, so that a monomial in them is not a unit.
pub fn den_over(p: &LaurentPoly, x: VarId, q: &LaurentPoly, coefficient: &dyn Fn(VarId) -> bool) -> Result<u32, PolyError> {
    if p.is_zero() {
        return Err(PolyError::DenUndefined("den of the zero polynomial".into()));
    }
    let coeffs = p.coefficients_in(x);
    if coeffs.iter().any(|(k, _)| *k < 0) {
        return Err(PolyError::DenUndefined(format!("{x} occurs with a negative exponent in {p}")));
    }
    let mut best = u32::MAX;
    for (k, pk) in coeffs {
        let k = k as u32;
        if k >= best {
            break;
        }
        best = best.min(k + multiplicity_over(&pk, q, coefficient)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> LaurentPoly {
        LaurentPoly::var(VarId::x(i))
    }

    #[test]
    fn small_cases() {
        let x = VarId::x(1);
        let q = &v(2) + &LaurentPoly::one();
        // x·q + q² has k=0 term q² (s=2) and k=1 term q (1+1)
        let p = &(&v(1) * &q) + &q.pow(2);
        assert_eq!(den(&p, x, &q).unwrap(), 2);
        let p = &v(1) + &q;
        assert_eq!(den(&p, x, &q).unwrap(), 1);
        let p = &v(1) + &v(3);
        assert_eq!(den(&p, x, &q).unwrap(), 0);
        assert_eq!(den(&(&q * &v(1).pow(3)), x, &q).unwrap(), 4);
    }

    #[test]
    fn invalid_inputs() {
        let x = VarId::x(1);
        let q = &v(2) + &LaurentPoly::one();
        assert!(den(&LaurentPoly::zero(), x, &q).is_err());
        assert!(den(&v(1), x, &v(2)).is_err());
        assert!(den(&LaurentPoly::var_pow(x, -1), x, &q).is_err());
    }

    #[test]
    fn coefficient_monomials_are_not_units() {
        let a = LaurentPoly::var(VarId::a(2));
        let coefficient = |v: VarId| v.tag == crate::Tag::A;
        assert!(multiplicity(&a, &a).is_err());
        assert_eq!(multiplicity_over(&a.pow(2), &a, &coefficient).unwrap(), 2);
        // A1 + X2 is not divisible by A2 once A2 cannot be inverted
        let p = &LaurentPoly::var(VarId::a(1)) + &v(2);
        assert_eq!(den_over(&p, VarId::x(2), &a, &coefficient).unwrap(), 0);
        assert!(!divides_over(&a, &p, &coefficient).unwrap());
        assert!(divides_over(&v(2), &p.mul_poly(&v(2)), &coefficient).unwrap());
    }
}
