//! LP seeds: cluster variables grounded in an ambient Laurent ring, exchange
//! polynomials over positional symbols `Z_1..Z_n`, exchange Laurent
//! polynomials via `den`, mutation, and seed equivalence.

use std::fmt;

use serde::Serialize;

use crate::poly::{den_over, divides_over, gcd};
use crate::{Error, LaurentPoly, Result, Tag, VarId};

/// Positional cluster symbol `Z_i`, `1 ≤ i ≤ n`.
pub fn z(i: usize) -> VarId {
    VarId::z(i)
}

fn zp(i: usize) -> LaurentPoly {
    LaurentPoly::var(z(i))
}

/// Coefficient symbols: polynomial, never inverted.
fn is_coefficient(v: VarId) -> bool {
    v.tag == Tag::A
}

/// `p` with its monomial factor in cluster variables removed; monomials in
/// the coefficients `A` are not units and stay.
pub fn cluster_polynomial_part(p: &LaurentPoly) -> LaurentPoly {
    p.split_monomial_in(|v| !is_coefficient(v)).1
}

/// Removes from `g` every factor it shares with `k`, including coefficient
/// monomials `A_m` dividing `k`. A factor is removed with its full
/// multiplicity in `g` even where `k` holds it fewer times; such cases need
/// more than one gcd round and are logged.
fn strip_shared(g: &LaurentPoly, k: &LaurentPoly) -> LaurentPoly {
    let mut h = g.clone();
    let mut rounds = 0;
    loop {
        let d = gcd(&h, k);
        if d.is_zero() || d.is_constant() {
            break;
        }
        h = h.exact_divide(&d).expect("nonzero gcd").expect("gcd divides its argument");
        rounds += 1;
    }
    if rounds > 1 {
        log::debug!("common factors of {g} and {k} removed in {rounds} rounds");
    }
    for a in k.vars().iter().copied().filter(|&a| is_coefficient(a) && k.degree_range(a).0 > 0) {
        let low = h.degree_range(a).0;
        if low > 0 {
            h = h.mul_poly(&LaurentPoly::var_pow(a, -low));
        }
    }
    h
}

/// Auxiliary symbol used when testing the defining property of `hatF`.
fn fresh() -> VarId {
    VarId::z(0)
}

/// One failed seed axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedViolation {
    pub index: usize,
    pub rule: &'static str,
    pub detail: String,
}

impl fmt::Display for SeedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{} violates {}: {}", self.index, self.rule, self.detail)
    }
}

/// Structural checks of a candidate seed: shapes, the variable alphabet of
/// each `F_i`, (LP1) no variable divides `F_i` and `F_i` is not a unit,
/// (LP2) `F_i` does not involve `Z_i`.
pub fn validate_seed(vars: &[LaurentPoly], exchange: &[LaurentPoly]) -> Vec<SeedViolation> {
    let n = vars.len();
    let mut out = Vec::new();
    let mut bad = |index, rule, detail: String| out.push(SeedViolation { index, rule, detail });
    if n == 0 || exchange.len() != n {
        bad(0, "shape", format!("{n} variables and {} exchange polynomials", exchange.len()));
        return out;
    }
    for (k, v) in vars.iter().enumerate() {
        if v.is_zero() {
            bad(k + 1, "shape", "zero cluster variable".into());
        }
    }
    for (k, f) in exchange.iter().enumerate() {
        let i = k + 1;
        if f.is_zero() || f.is_unit() {
            bad(i, "LP1", format!("{f} is zero or a unit"));
            continue;
        }
        if !f.is_polynomial() {
            bad(i, "shape", format!("{f} has negative exponents"));
        }
        for v in f.vars() {
            let ok = match v.tag {
                Tag::A => true,
                Tag::Z => v.index >= 1 && (v.index as usize) <= n,
                _ => false,
            };
            if !ok {
                bad(i, "shape", format!("{f} uses {v}, expected Z1..Z{n} and coefficients in A"));
            }
        }
        if f.involves(z(i)) {
            bad(i, "LP2", format!("{f} involves Z{i}"));
        }
        // only cluster variables matter: the A_j are coefficients
        for v in f.vars().iter().filter(|v| v.tag == Tag::Z) {
            if f.degree_range(*v).0 > 0 {
                bad(i, "LP1", format!("{f} is divisible by {v}"));
            }
        }
    }
    out
}

/// A seed of rank `n`. `vars[i-1]` is the grounding of `Z_i` (the cluster
/// variable as a Laurent polynomial in the ambient variables); `exchange[i-1]`
/// is `F_i` over `{Z_j : j ≠ i}` with coefficients in `ℤ[A]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Seed {
    vars: Vec<LaurentPoly>,
    exchange: Vec<LaurentPoly>,
    /// `hat_exps[i-1][j-1] = den(F_i, Z_j, F_j)`, so `hatF_i = F_i / ∏ Z_j^d`.
    hat_exps: Vec<Vec<u32>>,
}

/// What a mutation changed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutationInfo {
    pub direction: usize,
    /// `true` when the new cluster variable was negated to make its expansion positive.
    pub variable_negated: bool,
    /// Exchange polynomials that changed, by index.
    pub changed_exchange: Vec<usize>,
}

impl Seed {
    pub fn new(vars: Vec<LaurentPoly>, exchange: Vec<LaurentPoly>) -> Result<Self> {
        let violations = validate_seed(&vars, &exchange);
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::Seed(msgs.join("; ")));
        }
        let n = vars.len();
        let mut hat_exps = vec![vec![0u32; n]; n];
        for i in 1..=n {
            for j in 1..=n {
                // also when F_i lacks Z_j: then den counts how often F_j divides F_i
                if i != j {
                    hat_exps[i - 1][j - 1] = den_over(&exchange[i - 1], z(j), &exchange[j - 1], &is_coefficient)?;
                }
            }
        }
        Ok(Seed { vars, exchange, hat_exps })
    }

    /// The seed whose groundings are the bare symbols `Z_i` themselves.
    pub fn formal(&self) -> Seed {
        let vars = (1..=self.rank()).map(zp).collect();
        Seed { vars, exchange: self.exchange.clone(), hat_exps: self.hat_exps.clone() }
    }

    /// Same exchange data, new groundings.
    pub fn with_groundings(&self, vars: Vec<LaurentPoly>) -> Result<Seed> {
        if vars.len() != self.rank() || vars.iter().any(|v| v.is_zero()) {
            return Err(Error::Seed("grounding shape mismatch".into()));
        }
        Ok(Seed { vars, exchange: self.exchange.clone(), hat_exps: self.hat_exps.clone() })
    }

    pub fn rank(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&self, i: usize) -> &LaurentPoly {
        &self.vars[i - 1]
    }

    pub fn vars(&self) -> &[LaurentPoly] {
        &self.vars
    }

    pub fn exchange(&self, i: usize) -> &LaurentPoly {
        &self.exchange[i - 1]
    }

    pub fn exchanges(&self) -> &[LaurentPoly] {
        &self.exchange
    }

    /// `∏_{j≠i} Z_j^{den(F_i, Z_j, F_j)}`.
    pub fn hat_denominator(&self, i: usize) -> LaurentPoly {
        let f: Vec<(VarId, i32)> = (1..=self.rank()).filter(|&j| self.hat_exps[i - 1][j - 1] > 0).map(|j| (z(j), self.hat_exps[i - 1][j - 1] as i32)).collect();
        LaurentPoly::monomial(1, &f)
    }

    /// `hatF_i = F_i / ∏_{j≠i} Z_j^{den(F_i, Z_j, F_j)}`.
    pub fn hat_f(&self, i: usize) -> LaurentPoly {
        let inv = self.hat_denominator(i).monomial_inverse().expect("monomial");
        self.exchange[i - 1].mul_poly(&inv)
    }

    /// Checks the defining property of `hatF_i`: for every `j ≠ i`, replacing
    /// `Z_j` by `F_j / W` (fresh `W`) gives a Laurent polynomial not
    /// divisible by `F_j`.
    pub fn hat_f_characterized(&self, i: usize) -> bool {
        let h = self.hat_f(i);
        (1..=self.rank()).filter(|&j| j != i).all(|j| {
            let fj = &self.exchange[j - 1];
            let img = fj.mul_poly(&LaurentPoly::var_pow(fresh(), -1));
            match h.substitute_exact(z(j), &img) {
                Ok(r) => !divides_over(fj, &r, &is_coefficient).unwrap_or(true),
                Err(_) => false,
            }
        })
    }

    /// Evaluates an expression in the symbols `Z_k` at the groundings.
    pub fn ground(&self, p: &LaurentPoly) -> Result<LaurentPoly> {
        Ok(p.substitute_all(&|v| (v.tag == Tag::Z && v.index >= 1 && (v.index as usize) <= self.rank()).then(|| self.vars[v.index as usize - 1].clone()))?)
    }

    /// The exchange relation `Z_i · Z_i' = hatF_i`, with the new variable's grounding.
    pub fn exchanged_variable(&self, i: usize) -> Result<LaurentPoly> {
        let num = self.ground(&self.exchange[i - 1])?;
        let den = self.ground(&self.hat_denominator(i).mul_poly(&zp(i)))?;
        num.exact_divide(&den)?.ok_or_else(|| Error::NotLaurent(format!("exchanged variable at {i}: ({num})/({den})")))
    }

    pub fn mutate(&self, i: usize) -> Result<Seed> {
        Ok(self.mutate_detailed(i)?.0)
    }

    /// Mutation in direction `i`.
    pub fn mutate_detailed(&self, i: usize) -> Result<(Seed, MutationInfo)> {
        self.check_direction(i)?;
        let new_var = self.exchanged_variable(i)?;
        let negated = !new_var.is_zero() && new_var.coeffs().iter().all(|c| c.is_negative());
        self.mutate_given(i, if negated { -new_var } else { new_var }, negated)
    }

    fn check_direction(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank() {
            return Err(Error::Invalid(format!("direction {i} outside 1..={}", self.rank())));
        }
        Ok(())
    }

    /// Mutation in direction `i` with the new grounding supplied by the
    /// caller. `negated` records that it is `−hatF_i / Z_i`, so `Z_i` enters
    /// the other exchange polynomials with a sign flip.
    pub fn mutate_given(&self, i: usize, new_var: LaurentPoly, negated: bool) -> Result<(Seed, MutationInfo)> {
        self.check_direction(i)?;
        let n = self.rank();
        let hat = self.hat_f(i);
        let mut exchange = self.exchange.clone();
        let mut changed = Vec::new();
        for j in (1..=n).filter(|&j| j != i) {
            let fj = &self.exchange[j - 1];
            if !fj.involves(z(i)) {
                continue;
            }
            let k = hat.eval_zero(z(j)).map_err(|_| Error::Seed(format!("hatF{i} has Z{j} in a denominator while F{j} involves Z{i}")))?;
            let g = fj.substitute(z(i), &k.mul_poly(&LaurentPoly::var_pow(z(i), -1)))?;
            let h = strip_shared(&cluster_polynomial_part(&g), &cluster_polynomial_part(&k));
            let mut f = cluster_polynomial_part(&h).normalize_sign();
            if negated {
                f = f.substitute(z(i), &-zp(i))?.normalize_sign();
            }
            if f != *fj {
                changed.push(j);
            }
            exchange[j - 1] = f;
        }
        let mut vars = self.vars.clone();
        vars[i - 1] = new_var;
        let seed = Seed::new(vars, exchange).map_err(|e| Error::Seed(format!("mutation at {i} produced an invalid seed: {e}")))?;
        Ok((seed, MutationInfo { direction: i, variable_negated: negated, changed_exchange: changed }))
    }

    /// Mutates along `path` in order.
    pub fn mutate_path(&self, path: &[usize]) -> Result<Seed> {
        let mut t = self.clone();
        for &i in path {
            t = t.mutate(i)?;
        }
        Ok(t)
    }

    /// Moves position `i` to position `perm[i-1]`, renaming symbols to match.
    pub fn permuted(&self, perm: &[usize]) -> Result<Seed> {
        let n = self.rank();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!("{perm:?} is not a permutation of 1..={n}")));
        }
        let rename = |v: VarId| if v.tag == Tag::Z && v.index >= 1 { z(perm[v.index as usize - 1]) } else { v };
        let mut vars = vec![LaurentPoly::zero(); n];
        let mut exchange = vec![LaurentPoly::zero(); n];
        let mut hat_exps = vec![vec![0u32; n]; n];
        for i in 1..=n {
            let p = perm[i - 1];
            vars[p - 1] = self.vars[i - 1].clone();
            exchange[p - 1] = self.exchange[i - 1].rename(rename);
            for j in 1..=n {
                hat_exps[p - 1][perm[j - 1] - 1] = self.hat_exps[i - 1][j - 1];
            }
        }
        Ok(Seed { vars, exchange, hat_exps })
    }

    /// A permutation `π` with `other.var(π(i)) = ±self.var(i)`, if one exists.
    pub fn alignment(&self, other: &Seed) -> Option<Vec<usize>> {
        if self.rank() != other.rank() {
            return None;
        }
        let mut used = vec![false; other.rank()];
        let mut perm = Vec::with_capacity(self.rank());
        for v in &self.vars {
            let k = (0..other.rank()).find(|&k| !used[k] && unit_multiple(v, &other.vars[k]).is_some())?;
            used[k] = true;
            perm.push(k + 1);
        }
        Some(perm)
    }
}

/// `Some(±1)` when `b = ±a`.
fn unit_multiple(a: &LaurentPoly, b: &LaurentPoly) -> Option<i64> {
    if a == b {
        Some(1)
    } else if *a == -b {
        Some(-1)
    } else {
        None
    }
}

/// Positional equivalence: each grounding and each exchange polynomial
/// agree up to `±1`, exchange polynomials compared after accounting for the
/// sign of each symbol.
pub fn seeds_equivalent(t1: &Seed, t2: &Seed) -> bool {
    if t1.rank() != t2.rank() {
        return false;
    }
    let mut signs = Vec::with_capacity(t1.rank());
    for (a, b) in t1.vars.iter().zip(&t2.vars) {
        match unit_multiple(a, b) {
            Some(s) => signs.push(s),
            None => return false,
        }
    }
    t1.exchange.iter().zip(&t2.exchange).all(|(f1, f2)| {
        let flipped = if signs.iter().all(|&s| s == 1) {
            Ok(f1.clone())
        } else {
            f1.substitute_all(&|v| (v.tag == Tag::Z && v.index >= 1 && signs.get(v.index as usize - 1) == Some(&-1)).then(|| -LaurentPoly::var(v)))
        };
        flipped.is_ok_and(|f| unit_multiple(&f, f2).is_some())
    })
}

/// Equivalence after reordering positions by matching groundings.
pub fn seeds_equivalent_unordered(t1: &Seed, t2: &Seed) -> bool {
    match t1.alignment(t2).map(|p| t1.permuted(&p)) {
        Some(Ok(p)) => seeds_equivalent(&p, t2),
        _ => false,
    }
}

/// Outcome of the commutation check for a pair of directions.
#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    pub i: usize,
    pub j: usize,
    /// `Some(reason)` when the hypotheses fail; nothing else is checked then.
    pub precondition_failure: Option<String>,
    pub commute: bool,
    /// `μ_j μ_i μ_j μ_i (t) ≡ t` and `μ_i μ_j μ_i μ_j (t) ≡ t`.
    pub four_step_recovery: bool,
}

impl CommutationReport {
    pub fn passed(&self) -> bool {
        self.precondition_failure.is_none() && self.commute && self.four_step_recovery
    }
}

/// Checks that mutations at `i` and `j` commute when `Z_j` is absent from
/// `F_i` and `F_i / F_j` is not a unit.
pub fn check_commutation(t: &Seed, i: usize, j: usize) -> Result<CommutationReport> {
    let mut r = CommutationReport { i, j, precondition_failure: None, commute: false, four_step_recovery: false };
    let n = t.rank();
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::Invalid(format!("directions ({i},{j}) outside 1..={n}")));
    }
    if i == j {
        r.precondition_failure = Some("directions coincide".into());
    } else if t.exchange(i).involves(z(j)) {
        r.precondition_failure = Some(format!("F{i} involves Z{j}"));
    } else if unit_multiple(t.exchange(i), t.exchange(j)).is_some() {
        r.precondition_failure = Some(format!("F{i}/F{j} is a unit"));
    }
    if r.precondition_failure.is_some() {
        return Ok(r);
    }
    let ij = t.mutate_path(&[j, i])?;
    let ji = t.mutate_path(&[i, j])?;
    r.commute = seeds_equivalent(&ij, &ji);
    r.four_step_recovery = seeds_equivalent(&t.mutate_path(&[i, j, i, j])?, t) && seeds_equivalent(&t.mutate_path(&[j, i, j, i])?, t);
    Ok(r)
}

/// Treats the variables of `t` as free symbols (`Z_i`, or `names[i-1]` when
/// given), replays `path`, and returns every cluster variable met along the
/// way, in order, as Laurent polynomials in those symbols.
pub fn expand_in_cluster(t: &Seed, path: &[usize], names: Option<&[VarId]>) -> Result<Vec<LaurentPoly>> {
    let mut cur = match names {
        Some(ns) => t.with_groundings(ns.iter().map(|v| LaurentPoly::var(*v)).collect())?,
        None => t.formal(),
    };
    let mut out = Vec::with_capacity(path.len());
    for &i in path {
        cur = cur.mutate(i).map_err(|e| match e {
            Error::NotLaurent(m) => Error::NotLaurent(format!("Laurent phenomenon violated: {m}")),
            other => other,
        })?;
        out.push(cur.var(i).clone());
    }
    Ok(out)
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.rank() {
            let d = self.hat_denominator(i);
            let hat = if d.is_one() { String::new() } else { format!(", hatF = F/({d})") };
            writeln!(f, "Z{i} = {}  F = {}{hat}", self.vars[i - 1], self.exchange[i - 1])?;
        }
        Ok(())
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
