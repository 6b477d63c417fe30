use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::{Int, PolyError, VarId};

/// A sparse Laurent polynomial with integer coefficients.
///
/// Terms are stored densely over a per-polynomial variable list. The
/// representation is canonical: the variable list is strictly increasing and
/// contains only variables with some nonzero exponent, terms are sorted by
/// descending graded-lexicographic order, and no coefficient is zero. Two
/// polynomials are therefore equal iff their fields are equal.
#[derive(Clone)]
pub struct LaurentPoly {
    vars: Arc<[VarId]>,
    exps: Vec<i32>,
    coeffs: Vec<Int>,
}

/// Ascending graded-lexicographic comparison of two exponent rows.
pub(crate) fn grlex_cmp(a: &[i32], b: &[i32]) -> Ordering {
    let da: i64 = a.iter().map(|&e| e as i64).sum();
    let db: i64 = b.iter().map(|&e| e as i64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Exponent row ordered by graded-lex; used as a `BTreeMap` key in division.
#[derive(Clone, PartialEq, Eq)]
struct GrKey(Vec<i32>);

impl PartialOrd for GrKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GrKey {
    fn cmp(&self, other: &Self) -> Ordering {
        grlex_cmp(&self.0, &other.0)
    }
}

fn empty_vars() -> Arc<[VarId]> {
    Arc::from(Vec::<VarId>::new())
}

/// Merged variable list plus the column position of each input variable in it.
fn union_vars(a: &[VarId], b: &[VarId]) -> (Vec<VarId>, Vec<usize>, Vec<usize>) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut ia, mut ib) = (0, 0);
    let mut map_a = Vec::with_capacity(a.len());
    let mut map_b = Vec::with_capacity(b.len());
    while ia < a.len() || ib < b.len() {
        let take = match (a.get(ia), b.get(ib)) {
            (Some(x), Some(y)) => x.cmp(y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => unreachable!(),
        };
        match take {
            Ordering::Less => {
                map_a.push(out.len());
                out.push(a[ia]);
                ia += 1;
            }
            Ordering::Greater => {
                map_b.push(out.len());
                out.push(b[ib]);
                ib += 1;
            }
            Ordering::Equal => {
                map_a.push(out.len());
                map_b.push(out.len());
                out.push(a[ia]);
                ia += 1;
                ib += 1;
            }
        }
    }
    (out, map_a, map_b)
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { vars: empty_vars(), exps: Vec::new(), coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Int::ONE)
    }

    pub fn constant(c: impl Into<Int>) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { vars: empty_vars(), exps: Vec::new(), coeffs: vec![c] }
    }

    pub fn var(v: VarId) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: VarId, e: i32) -> Self {
        if e == 0 {
            return Self::one();
        }
        LaurentPoly { vars: Arc::from(vec![v]), exps: vec![e], coeffs: vec![Int::ONE] }
    }

    /// `coeff · ∏ v^e`; repeated variables have their exponents summed.
    pub fn monomial(coeff: impl Into<Int>, factors: &[(VarId, i32)]) -> Self {
        Self::from_terms(vec![(factors.to_vec(), coeff.into())])
    }

    /// Builds a polynomial from an arbitrary list of terms, combining like terms.
    pub fn from_terms(terms: Vec<(Vec<(VarId, i32)>, Int)>) -> Self {
        let mut vars: Vec<VarId> = terms.iter().flat_map(|(m, _)| m.iter().map(|(v, _)| *v)).collect();
        vars.sort();
        vars.dedup();
        let nv = vars.len();
        let mut rows = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            let mut row = vec![0i32; nv];
            for (v, e) in m {
                let pos = vars.binary_search(&v).expect("collected above");
                row[pos] += e;
            }
            rows.push((row, c));
        }
        Self::build(vars, rows)
    }

    /// Canonicalizes raw rows over `vars`.
    fn build(vars: Vec<VarId>, mut rows: Vec<(Vec<i32>, Int)>) -> Self {
        rows.sort_by(|a, b| grlex_cmp(&b.0, &a.0));
        let mut merged: Vec<(Vec<i32>, Int)> = Vec::with_capacity(rows.len());
        for (r, c) in rows {
            if let Some(last) = merged.last_mut() {
                if last.0 == r {
                    last.1 += &c;
                    continue;
                }
            }
            merged.push((r, c));
        }
        merged.retain(|(_, c)| !c.is_zero());
        Self::from_sorted_rows(vars, merged)
    }

    /// Rows must already be sorted descending, distinct and nonzero.
    fn from_sorted_rows(vars: Vec<VarId>, rows: Vec<(Vec<i32>, Int)>) -> Self {
        let nv = vars.len();
        let used: Vec<bool> = (0..nv).map(|k| rows.iter().any(|(r, _)| r[k] != 0)).collect();
        let keep: Vec<usize> = (0..nv).filter(|&k| used[k]).collect();
        let mut exps = Vec::with_capacity(rows.len() * keep.len());
        let mut coeffs = Vec::with_capacity(rows.len());
        for (r, c) in rows {
            exps.extend(keep.iter().map(|&k| r[k]));
            coeffs.push(c);
        }
        let vars: Arc<[VarId]> = if keep.len() == nv { Arc::from(vars) } else { keep.iter().map(|&k| vars[k]).collect() };
        LaurentPoly { vars, exps, coeffs }
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn nterms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn nv(&self) -> usize {
        self.vars.len()
    }

    fn row(&self, k: usize) -> &[i32] {
        let nv = self.nv();
        &self.exps[k * nv..(k + 1) * nv]
    }

    /// Iterates over `(exponent row, coefficient)` in descending term order.
    /// Row entries correspond to [`LaurentPoly::vars`].
    pub fn rows(&self) -> impl Iterator<Item = (&[i32], &Int)> + '_ {
        (0..self.nterms()).map(move |k| (self.row(k), &self.coeffs[k]))
    }

    /// Terms as sparse `(variable, exponent)` lists.
    pub fn terms(&self) -> Vec<(Vec<(VarId, i32)>, Int)> {
        self.rows()
            .map(|(r, c)| {
                let m = self.vars.iter().zip(r).filter(|(_, &e)| e != 0).map(|(v, &e)| (*v, e)).collect();
                (m, c.clone())
            })
            .collect()
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Int> {
        if self.is_zero() {
            Some(Int::ZERO)
        } else if self.is_constant() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.nterms() == 1 && self.coeffs[0].is_one()
    }

    /// `±1`.
    pub fn is_unit(&self) -> bool {
        self.is_constant() && self.nterms() == 1 && self.coeffs[0].is_unit()
    }

    pub fn is_monomial(&self) -> bool {
        self.nterms() == 1
    }

    /// `±` a Laurent monomial: the units of the Laurent ring over ℤ.
    pub fn is_laurent_unit(&self) -> bool {
        self.nterms() == 1 && self.coeffs[0].is_unit()
    }

    /// All exponents are non-negative.
    pub fn is_polynomial(&self) -> bool {
        self.exps.iter().all(|&e| e >= 0)
    }

    /// All coefficients are positive (the zero polynomial counts as positive).
    pub fn has_positive_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    fn var_pos(&self, v: VarId) -> Option<usize> {
        self.vars.binary_search(&v).ok()
    }

    pub fn involves(&self, v: VarId) -> bool {
        self.var_pos(v).is_some()
    }

    /// `(min, max)` exponent of `v` over all terms; `(0, 0)` if absent or zero.
    pub fn degree_range(&self, v: VarId) -> (i32, i32) {
        match self.var_pos(v) {
            None => (0, 0),
            Some(p) => {
                let it = (0..self.nterms()).map(|k| self.row(k)[p]);
                let lo = it.clone().min().unwrap_or(0);
                let hi = it.max().unwrap_or(0);
                (lo, hi)
            }
        }
    }

    pub fn degree(&self, v: VarId) -> i32 {
        self.degree_range(v).1
    }

    pub fn total_degree(&self) -> i64 {
        self.rows().map(|(r, _)| r.iter().map(|&e| e as i64).sum::<i64>()).max().unwrap_or(0)
    }

    pub fn leading_coeff(&self) -> Option<&Int> {
        self.coeffs.first()
    }

    /// Coefficient of the graded-lex-least monomial.
    pub fn trailing_coeff(&self) -> Option<&Int> {
        self.coeffs.last()
    }

    /// Positive integer content (gcd of coefficients); zero for the zero polynomial.
    pub fn int_content(&self) -> Int {
        let mut g = Int::ZERO;
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Multiplies by `-1` if needed so that the graded-lex-least term is positive.
    pub fn normalize_sign(&self) -> LaurentPoly {
        match self.trailing_coeff() {
            Some(c) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    fn remap(&self, vars: &[VarId], map: &[usize]) -> Vec<i32> {
        let nv = vars.len();
        let mut out = vec![0i32; nv * self.nterms()];
        for k in 0..self.nterms() {
            let row = self.row(k);
            let dst = &mut out[k * nv..(k + 1) * nv];
            for (j, &e) in row.iter().enumerate() {
                dst[map[j]] = e;
            }
        }
        out
    }

    /// Both operands laid out over a common variable list.
    fn aligned(&self, other: &LaurentPoly) -> (Arc<[VarId]>, std::borrow::Cow<'_, [i32]>, Vec<i32>) {
        if self.vars == other.vars {
            return (self.vars.clone(), std::borrow::Cow::Borrowed(&self.exps), other.exps.clone());
        }
        let (vars, ma, mb) = union_vars(&self.vars, &other.vars);
        let ea = self.remap(&vars, &ma);
        let eb = other.remap(&vars, &mb);
        (Arc::from(vars), std::borrow::Cow::Owned(ea), eb)
    }

    pub fn add_poly(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (vars, ea, eb) = self.aligned(other);
        let nv = vars.len();
        let (na, nb) = (self.nterms(), other.nterms());
        let mut rows: Vec<(Vec<i32>, Int)> = Vec::with_capacity(na + nb);
        let (mut i, mut j) = (0, 0);
        let mut cancelled = false;
        while i < na || j < nb {
            let ord = if i == na {
                Ordering::Less
            } else if j == nb {
                Ordering::Greater
            } else {
                grlex_cmp(&ea[i * nv..(i + 1) * nv], &eb[j * nv..(j + 1) * nv])
            };
            match ord {
                Ordering::Greater => {
                    rows.push((ea[i * nv..(i + 1) * nv].to_vec(), self.coeffs[i].clone()));
                    i += 1;
                }
                Ordering::Less => {
                    rows.push((eb[j * nv..(j + 1) * nv].to_vec(), other.coeffs[j].clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.coeffs[i] + &other.coeffs[j];
                    if c.is_zero() {
                        cancelled = true;
                    } else {
                        rows.push((ea[i * nv..(i + 1) * nv].to_vec(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        if !cancelled {
            // every variable of either operand still occurs
            let exps: Vec<i32> = rows.iter().flat_map(|(r, _)| r.iter().copied()).collect();
            let coeffs = rows.into_iter().map(|(_, c)| c).collect();
            return LaurentPoly { vars, exps, coeffs };
        }
        Self::from_sorted_rows(vars.to_vec(), rows)
    }

    pub fn sub_poly(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add_poly(&other.neg_poly())
    }

    pub fn neg_poly(&self) -> LaurentPoly {
        LaurentPoly { vars: self.vars.clone(), exps: self.exps.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &Int) -> LaurentPoly {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { vars: self.vars.clone(), exps: self.exps.clone(), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_int_exact(&self, c: &Int) -> Option<LaurentPoly> {
        let coeffs = self.coeffs.iter().map(|x| x.div_exact(c)).collect::<Option<Vec<_>>>()?;
        Some(LaurentPoly { vars: self.vars.clone(), exps: self.exps.clone(), coeffs })
    }

    /// Product with a single-term polynomial; term order is preserved.
    fn mul_monomial(&self, m: &LaurentPoly) -> LaurentPoly {
        debug_assert!(m.is_monomial());
        let (vars, ea, eb) = self.aligned(m);
        let nv = vars.len();
        let mut exps = ea.into_owned();
        for k in 0..self.nterms() {
            for j in 0..nv {
                exps[k * nv + j] += eb[j];
            }
        }
        let c = &m.coeffs[0];
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        let out = LaurentPoly { vars, exps, coeffs };
        if out.vars.iter().enumerate().all(|(j, _)| (0..out.nterms()).any(|k| out.exps[k * nv + j] != 0)) {
            out
        } else {
            let rows = (0..out.nterms()).map(|k| (out.row(k).to_vec(), out.coeffs[k].clone())).collect();
            Self::from_sorted_rows(out.vars.to_vec(), rows)
        }
    }

    pub fn mul_poly(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.is_monomial() {
            return self.mul_monomial(other);
        }
        if self.is_monomial() {
            return other.mul_monomial(self);
        }
        let (vars, ea, eb) = self.aligned(other);
        let nv = vars.len();
        let mut acc: FxHashMap<Vec<i32>, Int> = FxHashMap::default();
        acc.reserve(self.nterms() * other.nterms() / 2 + 1);
        let mut buf = vec![0i32; nv];
        for i in 0..self.nterms() {
            let ra = &ea[i * nv..(i + 1) * nv];
            let ca = &self.coeffs[i];
            for j in 0..other.nterms() {
                let rb = &eb[j * nv..(j + 1) * nv];
                for k in 0..nv {
                    buf[k] = ra[k] + rb[k];
                }
                let prod = ca * &other.coeffs[j];
                match acc.get_mut(buf.as_slice()) {
                    Some(c) => *c += &prod,
                    None => {
                        acc.insert(buf.clone(), prod);
                    }
                }
            }
        }
        let mut rows: Vec<(Vec<i32>, Int)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        rows.sort_by(|a, b| grlex_cmp(&b.0, &a.0));
        Self::from_sorted_rows(vars.to_vec(), rows)
    }

    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_poly(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_poly(&base);
            }
        }
        result
    }

    /// Integer power; negative exponents require a Laurent monomial base.
    pub fn powi(&self, e: i32) -> Result<LaurentPoly, PolyError> {
        if e >= 0 {
            return Ok(self.pow(e as u32));
        }
        let inv = self.monomial_inverse().ok_or_else(|| PolyError::NotInvertible(self.to_string()))?;
        Ok(inv.pow(e.unsigned_abs()))
    }

    /// Inverse of `±` a Laurent monomial.
    pub fn monomial_inverse(&self) -> Option<LaurentPoly> {
        if !self.is_laurent_unit() {
            return None;
        }
        Some(LaurentPoly { vars: self.vars.clone(), exps: self.exps.iter().map(|e| -e).collect(), coeffs: self.coeffs.clone() })
    }

    pub fn product<'a>(factors: impl IntoIterator<Item = &'a LaurentPoly>) -> LaurentPoly {
        factors.into_iter().fold(Self::one(), |acc, f| acc.mul_poly(f))
    }

    pub fn sum<'a>(terms: impl IntoIterator<Item = &'a LaurentPoly>) -> LaurentPoly {
        let mut rows: Vec<(Vec<(VarId, i32)>, Int)> = Vec::new();
        for t in terms {
            rows.extend(t.terms());
        }
        Self::from_terms(rows)
    }

    /// Splits `self = m · p` where `m` is a monic Laurent monomial and `p` is a
    /// polynomial not divisible by any variable.
    pub fn split_monomial(&self) -> (LaurentPoly, LaurentPoly) {
        if self.is_zero() {
            return (Self::one(), Self::zero());
        }
        let nv = self.nv();
        let mut mins = vec![i32::MAX; nv];
        for k in 0..self.nterms() {
            for (j, &e) in self.row(k).iter().enumerate() {
                mins[j] = mins[j].min(e);
            }
        }
        let factors: Vec<(VarId, i32)> = self.vars.iter().zip(&mins).filter(|(_, &m)| m != 0).map(|(v, &m)| (*v, m)).collect();
        if factors.is_empty() {
            return (Self::one(), self.clone());
        }
        let mut exps = self.exps.clone();
        for k in 0..self.nterms() {
            for j in 0..nv {
                exps[k * nv + j] -= mins[j];
            }
        }
        let rows = (0..self.nterms()).map(|k| (exps[k * nv..(k + 1) * nv].to_vec(), self.coeffs[k].clone())).collect();
        (Self::monomial(1, &factors), Self::from_sorted_rows(self.vars.to_vec(), rows))
    }

    /// Like [`LaurentPoly::split_monomial`] but only variables selected by
    /// `pick` enter the monomial; the others stay in the second factor.
    pub fn split_monomial_in(&self, pick: impl Fn(VarId) -> bool) -> (LaurentPoly, LaurentPoly) {
        let (m, _) = self.split_monomial();
        let factors: Vec<(VarId, i32)> = m.terms().into_iter().next().map_or_else(Vec::new, |(f, _)| f.into_iter().filter(|(v, _)| pick(*v)).collect());
        let m = Self::monomial(1, &factors);
        let rest = self.mul_poly(&m.monomial_inverse().expect("monomial"));
        (m, rest)
    }

    /// Polynomial part of [`LaurentPoly::split_monomial`].
    pub fn polynomial_part(&self) -> LaurentPoly {
        self.split_monomial().1
    }

    /// `self = Σ_k c_k · v^k`; returns `(k, c_k)` with ascending `k`, `c_k ≠ 0`.
    pub fn coefficients_in(&self, v: VarId) -> Vec<(i32, LaurentPoly)> {
        let Some(p) = self.var_pos(v) else {
            return if self.is_zero() { Vec::new() } else { vec![(0, self.clone())] };
        };
        let mut buckets: BTreeMap<i32, Vec<(Vec<i32>, Int)>> = BTreeMap::new();
        for k in 0..self.nterms() {
            let mut r = self.row(k).to_vec();
            let d = r[p];
            r[p] = 0;
            buckets.entry(d).or_default().push((r, self.coeffs[k].clone()));
        }
        // removing one column keeps the relative order inside each bucket
        buckets.into_iter().map(|(d, rows)| (d, Self::from_sorted_rows(self.vars.to_vec(), rows))).collect()
    }

    /// Coefficient of `v^k`.
    pub fn coefficient_of(&self, v: VarId, k: i32) -> LaurentPoly {
        self.coefficients_in(v).into_iter().find(|(d, _)| *d == k).map(|(_, c)| c).unwrap_or_else(Self::zero)
    }

    /// Renames variables. The map must be injective on the variables present.
    pub fn rename(&self, f: impl Fn(VarId) -> VarId) -> LaurentPoly {
        let rows = self.terms().into_iter().map(|(m, c)| (m.into_iter().map(|(v, e)| (f(v), e)).collect(), c)).collect();
        Self::from_terms(rows)
    }

    /// Sets `v = 0`. Fails if `v` occurs with a negative exponent.
    pub fn eval_zero(&self, v: VarId) -> Result<LaurentPoly, PolyError> {
        let Some(p) = self.var_pos(v) else {
            return Ok(self.clone());
        };
        if (0..self.nterms()).any(|k| self.row(k)[p] < 0) {
            return Err(PolyError::NotInvertible(format!("{v} = 0 in {self}")));
        }
        let rows = (0..self.nterms()).filter(|&k| self.row(k)[p] == 0).map(|k| (self.row(k).to_vec(), self.coeffs[k].clone())).collect();
        Ok(Self::from_sorted_rows(self.vars.to_vec(), rows))
    }

    /// Replaces `v` by `expr`. Negative powers of `v` require `expr` to be a
    /// Laurent unit.
    pub fn substitute(&self, v: VarId, expr: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
        if !self.involves(v) {
            return Ok(self.clone());
        }
        let coeffs = self.coefficients_in(v);
        if coeffs.iter().any(|(d, _)| *d < 0) && !expr.is_laurent_unit() {
            return Err(PolyError::NotInvertible(format!("substituting {expr} for {v} under a negative power")));
        }
        let mut out = Self::zero();
        for (d, c) in coeffs {
            out = out.add_poly(&c.mul_poly(&expr.powi(d)?));
        }
        Ok(out)
    }

    /// Replaces `v` by `expr` when the result is known to be a Laurent
    /// polynomial even though `v` appears in denominators: clears `v^d`,
    /// substitutes, and divides by `expr^d` exactly.
    pub fn substitute_exact(&self, v: VarId, expr: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
        let (lo, _) = self.degree_range(v);
        if lo >= 0 || expr.is_laurent_unit() {
            return self.substitute(v, expr);
        }
        let d = -lo;
        let cleared = self.mul_poly(&Self::var_pow(v, d)).substitute(v, expr)?;
        cleared.exact_divide(&expr.pow(d as u32))?.ok_or(PolyError::NotDivisible)
    }

    /// Simultaneous substitution of every mapped variable. Variables absent
    /// from `map` are left alone. Denominators are cleared and divided out
    /// exactly, so non-monomial images are allowed under negative powers as
    /// long as the final result is a Laurent polynomial.
    pub fn substitute_all(&self, map: &dyn Fn(VarId) -> Option<LaurentPoly>) -> Result<LaurentPoly, PolyError> {
        let nv = self.nv();
        let images: Vec<Option<LaurentPoly>> = self.vars.iter().map(|v| map(*v)).collect();
        let mut shift = vec![0i32; nv];
        for (j, img) in images.iter().enumerate() {
            if let Some(img) = img {
                if !img.is_laurent_unit() {
                    shift[j] = -(0..self.nterms()).map(|k| self.row(k)[j]).min().unwrap_or(0).min(0);
                }
            }
        }
        let mut power_cache: FxHashMap<(usize, i32), LaurentPoly> = FxHashMap::default();
        let mut acc: Vec<LaurentPoly> = Vec::with_capacity(self.nterms());
        for k in 0..self.nterms() {
            let row = self.row(k);
            let mut kept: Vec<(VarId, i32)> = Vec::new();
            let mut term = Self::constant(self.coeffs[k].clone());
            let mut factors: Vec<(usize, i32)> = Vec::new();
            for j in 0..nv {
                let e = row[j] + shift[j];
                match &images[j] {
                    None => {
                        if e != 0 {
                            kept.push((self.vars[j], e));
                        }
                    }
                    Some(_) if e == 0 => {}
                    Some(_) => factors.push((j, e)),
                }
            }
            if !kept.is_empty() {
                term = term.mul_poly(&Self::monomial(1, &kept));
            }
            // multiply the smaller factors first
            factors.sort_by_key(|&(j, e)| images[j].as_ref().map(|p| p.nterms()).unwrap_or(1) * e.unsigned_abs() as usize);
            for (j, e) in factors {
                let pw = match power_cache.get(&(j, e)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = images[j].as_ref().unwrap().powi(e)?;
                        power_cache.insert((j, e), p.clone());
                        p
                    }
                };
                term = term.mul_poly(&pw);
            }
            acc.push(term);
        }
        let total = Self::sum(acc.iter());
        let mut denom = Self::one();
        for (j, &s) in shift.iter().enumerate() {
            if s > 0 {
                denom = denom.mul_poly(&images[j].as_ref().unwrap().pow(s as u32));
            }
        }
        if denom.is_one() {
            return Ok(total);
        }
        total.exact_divide(&denom)?.ok_or(PolyError::NotDivisible)
    }

    /// Exact division in the Laurent ring: `Some(r)` with `self = q · r`, or
    /// `None` when no Laurent polynomial quotient exists.
    pub fn exact_divide(&self, q: &LaurentPoly) -> Result<Option<LaurentPoly>, PolyError> {
        if q.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(Self::zero()));
        }
        let (mp, p0) = self.split_monomial();
        let (mq, q0) = q.split_monomial();
        let quotient = if let Some(c) = q0.as_constant() {
            match p0.div_int_exact(&c) {
                Some(r) => r,
                None => return Ok(None),
            }
        } else {
            match poly_divide(&p0, &q0) {
                Some(r) => r,
                None => return Ok(None),
            }
        };
        let shift = mp.mul_poly(&mq.monomial_inverse().expect("monic monomial"));
        Ok(Some(quotient.mul_poly(&shift)))
    }

    /// `true` iff `q` divides `self` in the Laurent ring.
    pub fn divisible_by(&self, q: &LaurentPoly) -> bool {
        matches!(self.exact_divide(q), Ok(Some(_)))
    }
}

/// Division of polynomials (non-negative exponents) with a check for
/// exactness. Returns `None` when `q ∤ p`.
fn poly_divide(p: &LaurentPoly, q: &LaurentPoly) -> Option<LaurentPoly> {
    // every variable of q must occur in p with at least the same degree
    for (j, v) in q.vars.iter().enumerate() {
        let dq = (0..q.nterms()).map(|k| q.row(k)[j]).max().unwrap_or(0);
        if p.degree(*v) < dq {
            return None;
        }
    }
    if q.total_degree() > p.total_degree() {
        return None;
    }
    let (vars, ep, eq) = p.aligned(q);
    let nv = vars.len();
    let lead_q: Vec<i32> = eq[0..nv].to_vec();
    let lc_q = q.coeffs[0].clone();
    let q_rest: Vec<(Vec<i32>, Int)> = (1..q.nterms()).map(|k| (eq[k * nv..(k + 1) * nv].to_vec(), q.coeffs[k].clone())).collect();
    let mut rem: BTreeMap<GrKey, Int> = BTreeMap::new();
    for k in 0..p.nterms() {
        rem.insert(GrKey(ep[k * nv..(k + 1) * nv].to_vec()), p.coeffs[k].clone());
    }
    let mut quotient: Vec<(Vec<i32>, Int)> = Vec::new();
    while let Some((GrKey(lead), c)) = rem.pop_last() {
        let mut t = Vec::with_capacity(nv);
        for j in 0..nv {
            let d = lead[j] - lead_q[j];
            if d < 0 {
                return None;
            }
            t.push(d);
        }
        let qc = c.div_exact(&lc_q)?;
        for (row, qcoef) in &q_rest {
            let key: Vec<i32> = row.iter().zip(&t).map(|(a, b)| a + b).collect();
            let delta = -(&qc * qcoef);
            let key = GrKey(key);
            match rem.get_mut(&key) {
                Some(v) => {
                    *v += &delta;
                    if v.is_zero() {
                        rem.remove(&key);
                    }
                }
                None => {
                    rem.insert(key, delta);
                }
            }
        }
        quotient.push((t, qc));
    }
    // quotient terms were produced in strictly descending order
    Some(LaurentPoly::from_sorted_rows(vars.to_vec(), quotient))
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.exps == other.exps && self.coeffs == other.coeffs
    }
}

impl Eq for LaurentPoly {}

impl Hash for LaurentPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.vars.hash(state);
        self.exps.hash(state);
        self.coeffs.hash(state);
    }
}

impl Default for LaurentPoly {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<VarId> for LaurentPoly {
    fn from(v: VarId) -> Self {
        LaurentPoly::var(v)
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(c)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$inner(rhs)
            }
        }
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$inner(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$inner(rhs)
            }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_poly);
forward_binop!(Sub, sub, sub_poly);
forward_binop!(Mul, mul, mul_poly);

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_poly()
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_poly()
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, factors: &[(VarId, i32)]) -> fmt::Result {
    for (k, (v, e)) in factors.iter().enumerate() {
        if k > 0 {
            write!(f, "*")?;
        }
        if *e == 1 {
            write!(f, "{v}")?;
        } else {
            write!(f, "{v}^{e}")?;
        }
    }
    Ok(())
}

fn write_polynomial(f: &mut fmt::Formatter<'_>, p: &LaurentPoly) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    for (k, (m, c)) in p.terms().into_iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        if m.is_empty() {
            write!(f, "{a}")?;
        } else {
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write_monomial(f, &m)?;
        }
    }
    Ok(())
}

/// Canonical rendering. Laurent polynomials are written as a polynomial over
/// the monomial that clears every negative exponent, e.g. `(A4 + X2)/X4`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let denom: Vec<(VarId, i32)> = self
            .vars
            .iter()
            .enumerate()
            .filter_map(|(j, v)| {
                let lo = (0..self.nterms()).map(|k| self.row(k)[j]).min().unwrap_or(0);
                (lo < 0).then_some((*v, -lo))
            })
            .collect();
        if denom.is_empty() {
            return write_polynomial(f, self);
        }
        let numer = self.mul_poly(&LaurentPoly::monomial(1, &denom));
        if numer.nterms() == 1 && !numer.coeffs[0].is_negative() {
            write_polynomial(f, &numer)?;
        } else {
            write!(f, "(")?;
            write_polynomial(f, &numer)?;
            write!(f, ")")?;
        }
        write!(f, "/")?;
        if denom.len() == 1 {
            write_monomial(f, &denom)
        } else {
            write!(f, "(")?;
            write_monomial(f, &denom)?;
            write!(f, ")")
        }
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}
