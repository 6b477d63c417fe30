//! Multivariate gcd over ℤ by recursive content extraction and the
//! subresultant polynomial remainder sequence.

use crate::{Int, LaurentPoly, VarId};

/// Greatest common divisor in the Laurent ring `ℤ[vars^±]`.
///
/// Laurent monomials are units there, so only the monomial-free polynomial
/// parts matter. The result is a polynomial with no monomial factor whose
/// graded-lex-least coefficient is positive. `gcd(0, 0) = 0`.
pub fn gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let pa = a.polynomial_part();
    let pb = b.polynomial_part();
    poly_gcd(&pa, &pb).polynomial_part().normalize_sign()
}

/// Divides `g` by its gcd with `k` until the two are coprime, removing every
/// factor of `g` that shares an irreducible factor with `k`.
pub fn strip_common_factors(g: &LaurentPoly, k: &LaurentPoly) -> LaurentPoly {
    let mut g = g.clone();
    loop {
        let d = gcd(&g, k);
        if d.is_zero() || d.is_constant() {
            return g;
        }
        g = g.exact_divide(&d).expect("nonzero gcd").expect("gcd divides its argument");
    }
}

fn int_gcd_poly(c: &Int, p: &LaurentPoly) -> LaurentPoly {
    LaurentPoly::constant(c.gcd(&p.int_content()))
}

/// gcd of polynomials with non-negative exponents, up to sign.
fn poly_gcd(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if let Some(c) = a.as_constant() {
        return int_gcd_poly(&c, b);
    }
    if let Some(c) = b.as_constant() {
        return int_gcd_poly(&c, a);
    }
    if a == b || a == &-b {
        return a.clone();
    }
    // a variable present in only one argument: fold over its coefficients
    if let Some(v) = a.vars().iter().find(|v| !b.involves(**v)) {
        return fold_gcd(b, a, *v);
    }
    if let Some(v) = b.vars().iter().find(|v| !a.involves(**v)) {
        return fold_gcd(a, b, *v);
    }
    if a.total_degree() <= b.total_degree() {
        if poly_div(b, a).is_some() {
            return a.clone();
        }
    } else if poly_div(a, b).is_some() {
        return b.clone();
    }
    let v = *a.vars().iter().min_by_key(|v| a.degree(**v).min(b.degree(**v))).expect("nonconstant");
    univariate_gcd(a, b, v)
}

/// gcd(`other`, every coefficient of `p` in `v`), where `v` does not occur in `other`.
fn fold_gcd(other: &LaurentPoly, p: &LaurentPoly, v: VarId) -> LaurentPoly {
    let mut g = other.clone();
    for (_, c) in p.coefficients_in(v) {
        g = poly_gcd(&g, &c);
        if g.is_unit() {
            return LaurentPoly::one();
        }
    }
    g
}

/// Dense coefficients in `v`, index = degree.
fn dense(p: &LaurentPoly, v: VarId) -> Vec<LaurentPoly> {
    let cs = p.coefficients_in(v);
    let deg = cs.last().map(|(d, _)| *d).unwrap_or(0).max(0) as usize;
    let mut out = vec![LaurentPoly::zero(); deg + 1];
    for (d, c) in cs {
        out[d as usize] = c;
    }
    out
}

fn from_dense(cs: &[LaurentPoly], v: VarId) -> LaurentPoly {
    let terms: Vec<LaurentPoly> = cs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(d, c)| c * &LaurentPoly::var_pow(v, d as i32)).collect();
    LaurentPoly::sum(terms.iter())
}

fn trim(p: &mut Vec<LaurentPoly>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn content(cs: &[LaurentPoly]) -> LaurentPoly {
    let mut g = LaurentPoly::zero();
    for c in cs {
        g = poly_gcd(&g, c);
        if g.is_unit() {
            return LaurentPoly::one();
        }
    }
    g
}

/// Exact quotient in the polynomial ring (the Laurent quotient must have no
/// negative exponents).
fn poly_div(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    a.exact_divide(b).expect("nonzero divisor").filter(|q| q.is_polynomial())
}

fn divide_all(cs: &[LaurentPoly], d: &LaurentPoly) -> Vec<LaurentPoly> {
    cs.iter().map(|c| poly_div(c, d).expect("exact by construction")).collect()
}

/// Pseudo-remainder of `a` by `b`: `lc(b)^(deg a - deg b + 1) · a mod b`.
fn prem(a: &[LaurentPoly], b: &[LaurentPoly]) -> Vec<LaurentPoly> {
    let n = b.len() - 1;
    let lb = &b[n];
    let mut r = a.to_vec();
    let delta = a.len() - b.len() + 1;
    let mut steps = 0;
    while r.len() > n && !(r.len() == 1 && r[0].is_zero()) {
        let m = r.len() - 1;
        let lr = r[m].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (k, bk) in b.iter().enumerate() {
            let idx = m - n + k;
            r[idx] = &r[idx] - &(&lr * bk);
        }
        r.pop();
        trim(&mut r);
        steps += 1;
        if r.len() <= n {
            break;
        }
    }
    if steps < delta {
        let f = lb.pow((delta - steps) as u32);
        for c in r.iter_mut() {
            *c = &*c * &f;
        }
    }
    trim(&mut r);
    r
}

fn is_zero_dense(p: &[LaurentPoly]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn univariate_gcd(a: &LaurentPoly, b: &LaurentPoly, v: VarId) -> LaurentPoly {
    let da = dense(a, v);
    let db = dense(b, v);
    let ca = content(&da);
    let cb = content(&db);
    let cont = poly_gcd(&ca, &cb);
    let mut pa = divide_all(&da, &ca);
    let mut pb = divide_all(&db, &cb);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    let mut g = LaurentPoly::one();
    let mut h = LaurentPoly::one();
    loop {
        let d = pa.len() - pb.len();
        let r = prem(&pa, &pb);
        if is_zero_dense(&r) {
            break;
        }
        if r.len() == 1 {
            return cont;
        }
        let div = &g * &h.pow(d as u32);
        pa = pb;
        pb = divide_all(&r, &div);
        g = pa.last().expect("nonempty").clone();
        h = if d == 0 {
            h
        } else {
            poly_div(&g.pow(d as u32), &h.pow(d as u32 - 1)).expect("subresultant division is exact")
        };
    }
    let cpb = content(&pb);
    let prim = divide_all(&pb, &cpb);
    &from_dense(&prim, v) * &cont
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> LaurentPoly {
        LaurentPoly::var(VarId::x(i))
    }

    #[test]
    fn common_factor_found() {
        let f = &x(1) + &x(2);
        let g = &(&x(1) * &x(3)) + &LaurentPoly::one();
        let h = &x(2) - &x(3);
        let a = &f * &g;
        let b = &f * &h;
        assert_eq!(gcd(&a, &b), f.normalize_sign());
        assert!(gcd(&g, &h).is_one());
    }

    #[test]
    fn integer_content_and_monomials() {
        let a = LaurentPoly::monomial(6, &[(VarId::x(1), 2)]);
        let b = LaurentPoly::monomial(4, &[(VarId::x(2), -1)]);
        assert_eq!(gcd(&a, &b), LaurentPoly::constant(2));
        let p = (&x(1) + &x(2)).scale(&Int::from(3));
        let q = (&x(1) + &x(2)).scale(&Int::from(-6));
        assert_eq!(gcd(&p, &q), (&x(1) + &x(2)).scale(&Int::from(3)));
    }

    #[test]
    fn repeated_factors_stripped() {
        let f = &x(1) + &LaurentPoly::one();
        let g = &f.pow(3) * &(&x(2) + &x(3));
        let stripped = strip_common_factors(&g, &f);
        assert_eq!(stripped, &x(2) + &x(3));
    }

    #[test]
    fn high_degree_univariate() {
        let f = &x(1).pow(3) - &LaurentPoly::constant(2);
        let a = &f * &(&x(1).pow(2) + &LaurentPoly::one());
        let b = &f * &(&x(1) - &LaurentPoly::constant(5));
        assert_eq!(gcd(&a, &b), f.normalize_sign());
    }
}
