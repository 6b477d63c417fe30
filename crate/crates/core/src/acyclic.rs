//! The variables `Y_I` (acyclic functions / principal minors of the
//! Y-matrix), the path sums `P_S^{i,j}`, exhaustive checks of the identities
//! relating them, and rewriting `Y_I` in the variables of a nested collection.

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::digraph::{Digraph, VertexSet};
use crate::nested::MaximalNestedCollection;
use crate::{Error, Int, LaurentPoly, Result, VarId};

/// Ring in which `Y`-expressions are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Laurent polynomials in the `X_i` and `A_i`.
    Expanded,
    /// Polynomials in free symbols `Y_1, ..., Y_n` standing for the diagonal
    /// of the Y-matrix. Identities among minors that hold here hold after
    /// any specialization, in particular `Y_i = F_i / X_i`.
    Diagonal,
}

fn x(i: usize) -> LaurentPoly {
    LaurentPoly::var(VarId::x(i))
}

fn a(i: usize) -> LaurentPoly {
    LaurentPoly::var(VarId::a(i))
}

/// `X̃_{f(i)}`: `A_i` for a loop, `X_{f(i)}` otherwise.
fn tilde(i: usize, target: usize) -> VarId {
    if i == target {
        VarId::a(i)
    } else {
        VarId::x(target)
    }
}

/// `Y_I = Σ_f ∏_{i∈I} X̃_{f(i)} / ∏_{i∈I} X_i` over acyclic `f : I → [n]`
/// (each `f(i)` is `i` or an out-neighbor of `i`; the only cycles of the
/// functional graph are loops). `Y_∅ = 1`.
pub fn y_by_enumeration(g: &Digraph, set: VertexSet) -> LaurentPoly {
    if set.is_empty() {
        return LaurentPoly::one();
    }
    let members = set.to_vec();
    let mut f = vec![0usize; g.n() + 1];
    let mut terms: Vec<(Vec<(VarId, i32)>, Int)> = Vec::new();
    assign(g, set, &members, 0, &mut f, &mut terms);
    let num = LaurentPoly::from_terms(terms);
    let den: Vec<(VarId, i32)> = members.iter().map(|&i| (VarId::x(i), -1)).collect();
    num.mul_poly(&LaurentPoly::monomial(1, &den))
}

fn assign(g: &Digraph, set: VertexSet, members: &[usize], k: usize, f: &mut [usize], out: &mut Vec<(Vec<(VarId, i32)>, Int)>) {
    if k == members.len() {
        let mono = members.iter().map(|&i| (tilde(i, f[i]), 1)).collect();
        out.push((mono, Int::ONE));
        return;
    }
    let i = members[k];
    for t in std::iter::once(i).chain(g.out_neighbors(i).iter()) {
        // a non-loop arrow closes a cycle iff following assigned arrows from
        // its head returns to `i`
        if t != i {
            let mut v = t;
            let mut cycle = false;
            while set.contains(v) && f[v] != 0 && f[v] != v {
                v = f[v];
                if v == i {
                    cycle = true;
                    break;
                }
            }
            if cycle {
                continue;
            }
        }
        f[i] = t;
        assign(g, set, members, k + 1, f, out);
        f[i] = 0;
    }
}

/// `Y_i` in the given basis.
pub fn y_diagonal_entry(g: &Digraph, i: usize, basis: Basis) -> LaurentPoly {
    match basis {
        Basis::Diagonal => LaurentPoly::var(VarId::y(VertexSet::singleton(i).mask())),
        Basis::Expanded => {
            let f = LaurentPoly::sum(std::iter::once(&a(i)).chain(g.out_neighbors(i).iter().map(x).collect::<Vec<_>>().iter()));
            f.mul_poly(&LaurentPoly::var_pow(VarId::x(i), -1))
        }
    }
}

/// The Y-matrix entry in row `i`, column `j`: `Y_i` on the diagonal, `-1`
/// for an edge `i → j`, `0` otherwise.
pub fn y_matrix_entry(g: &Digraph, i: usize, j: usize, basis: Basis) -> LaurentPoly {
    if i == j {
        y_diagonal_entry(g, i, basis)
    } else if g.has_edge(i, j) {
        LaurentPoly::constant(-1)
    } else {
        LaurentPoly::zero()
    }
}

/// The minor with the given (ordered) row and column indices.
pub fn y_submatrix(g: &Digraph, rows: &[usize], cols: &[usize], basis: Basis) -> Vec<Vec<LaurentPoly>> {
    rows.iter().map(|&i| cols.iter().map(|&j| y_matrix_entry(g, i, j, basis)).collect()).collect()
}

/// Fraction-free (Bareiss) determinant over the Laurent polynomial ring; all
/// divisions are exact. The empty determinant is 1.
pub fn det(matrix: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = matrix.len();
    if n == 0 {
        return LaurentPoly::one();
    }
    let mut m: Vec<Vec<LaurentPoly>> = matrix.to_vec();
    let mut negate = false;
    let mut prev = LaurentPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return LaurentPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.exact_divide(&prev).expect("nonzero pivot").expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// `det(𝒴_I)`, the principal minor on `I`.
pub fn y_by_determinant(g: &Digraph, set: VertexSet, basis: Basis) -> LaurentPoly {
    let v = set.to_vec();
    det(&y_submatrix(g, &v, &v, basis))
}

/// Simple paths `i → j` all of whose intermediate vertices lie in `s`, as
/// vertex sets. For `i = j` only the trivial path.
pub fn simple_paths(g: &Digraph, s: VertexSet, i: usize, j: usize) -> Vec<VertexSet> {
    if i == j {
        return vec![VertexSet::singleton(i)];
    }
    let mut out = Vec::new();
    fn dfs(g: &Digraph, s: VertexSet, v: usize, j: usize, used: VertexSet, out: &mut Vec<VertexSet>) {
        for w in g.out_neighbors(v).iter() {
            if w == j {
                out.push(used.with(j));
            } else if s.contains(w) && !used.contains(w) {
                dfs(g, s, w, j, used.with(w), out);
            }
        }
    }
    dfs(g, s, i, j, VertexSet::singleton(i), &mut out);
    out
}

/// `P_S^{i,j} = Σ_p Y_{S−p}` with `Y` supplied by the caller.
pub fn p_path_with(g: &Digraph, s: VertexSet, i: usize, j: usize, y: &mut dyn FnMut(VertexSet) -> LaurentPoly) -> LaurentPoly {
    let terms: Vec<LaurentPoly> = simple_paths(g, s, i, j).into_iter().map(|p| y(s.minus(p))).collect();
    LaurentPoly::sum(terms.iter())
}

/// `(−1)^{1+#\{s∈S' strictly between i and j\}} det(𝒴_{S'i, S'j})`, `S' = S − {i,j}`.
pub fn p_by_minor(g: &Digraph, s: VertexSet, i: usize, j: usize, basis: Basis) -> LaurentPoly {
    assert_ne!(i, j, "the minor formula needs distinct endpoints");
    let sp = s.without(i).without(j);
    let rows = sp.with(i).to_vec();
    let cols = sp.with(j).to_vec();
    let d = det(&y_submatrix(g, &rows, &cols, basis));
    if sp.count_between(i, j).is_multiple_of(2) {
        -d
    } else {
        d
    }
}

/// Memoized `Y_S` and `P_S^{i,j}` in one basis. In the expanded basis `Y`
/// comes from acyclic functions, in the diagonal basis from minors.
pub struct YTable<'g> {
    g: &'g Digraph,
    basis: Basis,
    cache: FxHashMap<VertexSet, LaurentPoly>,
}

impl<'g> YTable<'g> {
    pub fn new(g: &'g Digraph, basis: Basis) -> Self {
        YTable { g, basis, cache: FxHashMap::default() }
    }

    pub fn graph(&self) -> &'g Digraph {
        self.g
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn y(&mut self, s: VertexSet) -> LaurentPoly {
        if s.is_empty() {
            return LaurentPoly::one();
        }
        if let Some(v) = self.cache.get(&s) {
            return v.clone();
        }
        let v = match self.basis {
            Basis::Expanded => y_by_enumeration(self.g, s),
            Basis::Diagonal => y_by_determinant(self.g, s, Basis::Diagonal),
        };
        self.cache.insert(s, v.clone());
        v
    }

    pub fn p(&mut self, s: VertexSet, i: usize, j: usize) -> LaurentPoly {
        let g = self.g;
        p_path_with(g, s, i, j, &mut |t| self.y(t))
    }

    /// `X_i` in the expanded basis (the diagonal basis has no `X`).
    fn x(&self, i: usize) -> LaurentPoly {
        debug_assert_eq!(self.basis, Basis::Expanded);
        x(i)
    }
}

/// `P_S^{i,j}` in the expanded basis.
pub fn p_path(g: &Digraph, s: VertexSet, i: usize, j: usize) -> LaurentPoly {
    YTable::new(g, Basis::Expanded).p(s, i, j)
}

/// Pass/fail counts for one identity family.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityTally {
    pub name: String,
    pub basis: Basis,
    pub checked: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl IdentityTally {
    fn new(name: &str, basis: Basis) -> Self {
        IdentityTally { name: name.to_string(), basis, checked: 0, failed: 0, first_failure: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(witness());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub tallies: Vec<IdentityTally>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0)
    }

    pub fn checked(&self) -> usize {
        self.tallies.iter().map(|t| t.checked).sum()
    }

    pub fn failed(&self) -> usize {
        self.tallies.iter().map(|t| t.failed).sum()
    }

    pub fn merge(&mut self, other: IdentityReport) {
        self.tallies.extend(other.tallies);
    }
}

/// Which identity families to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityScope {
    /// Identities among `Y` and `P` only, in the diagonal basis.
    YOnly,
    /// Everything, with the X/A identities in the expanded basis and the
    /// Y-only identities in both bases.
    Full,
}

/// Instantiates every identity over all admissible index choices. Graphs
/// above `cap` vertices are rejected.
pub fn verify_identities(g: &Digraph, scope: IdentityScope, cap: usize) -> Result<IdentityReport> {
    if g.n() > cap {
        return Err(Error::Limit(format!("{} vertices exceeds the identity-check cap {cap}", g.n())));
    }
    let mut tallies = Vec::new();
    let mut diag = YTable::new(g, Basis::Diagonal);
    tallies.extend(y_identities(&mut diag)?);
    tallies.push(jacobi(g, Basis::Diagonal));
    tallies.push(ikj_virtual(g)?);
    if scope == IdentityScope::Full {
        let mut exp = YTable::new(g, Basis::Expanded);
        tallies.extend(y_identities(&mut exp)?);
        tallies.extend(xa_identities(&mut exp));
    }
    Ok(IdentityReport { tallies })
}

/// Component factorization, `Y_{Si} = Y_{S⊕i} Y_{S⊖i}`, the minor formula
/// for `P`, the exchange identity and the three-index path identity.
fn y_identities(t: &mut YTable<'_>) -> Result<Vec<IdentityTally>> {
    let g = t.graph();
    let basis = t.basis();
    let n = g.n();
    let all = g.vertices();
    let mut fac = IdentityTally::new("component factorization", basis);
    let mut det_enum = IdentityTally::new("determinant equals acyclic-function sum", basis);
    let mut yis = IdentityTally::new("Y_Si = Y_(S+i) Y_(S-i)", basis);
    let mut pdet = IdentityTally::new("path sum equals signed minor", basis);
    let mut yex = IdentityTally::new("exchange identity Y_Si Y_Sj = Y_Sij Y_S + P P", basis);
    let mut yex_split = IdentityTally::new("exchange identity in oplus/ominus form", basis);
    let mut ikj = IdentityTally::new("three-index path identity", basis);
    for s in all.subsets() {
        if !s.is_empty() {
            let comps = g.scc_partition(s);
            let prod = LaurentPoly::product(comps.iter().map(|c| t.y(*c)).collect::<Vec<_>>().iter());
            let ys = t.y(s);
            fac.record(prod == ys, || format!("I = {s}"));
            if basis == Basis::Expanded {
                det_enum.record(y_by_determinant(g, s, Basis::Expanded) == ys, || format!("I = {s}"));
            }
        }
        for i in 1..=n {
            let lhs = t.y(s.with(i));
            let rhs = &t.y(g.oplus(s, i)) * &t.y(g.ominus(s, i));
            yis.record(lhs == rhs, || format!("S = {s}, i = {i}"));
            for j in 1..=n {
                if i != j {
                    let ok = t.p(s, i, j) == p_by_minor(g, s, i, j, basis);
                    pdet.record(ok, || format!("S = {s}, i = {i}, j = {j}"));
                }
            }
        }
        let outside: Vec<usize> = all.minus(s).iter().collect();
        for &i in &outside {
            for &j in &outside {
                if i >= j {
                    continue;
                }
                let lhs = &t.y(s.with(i)) * &t.y(s.with(j));
                let rhs = &(&t.y(s.with(i).with(j)) * &t.y(s)) + &(&t.p(s, i, j) * &t.p(s, j, i));
                yex.record(lhs == rhs, || format!("S = {s}, i = {i}, j = {j}"));
                let left = &t.y(g.oplus(s, i)) * &t.y(g.oplus(s, j));
                let den = &t.y(g.ominus(s, i)) * &t.y(g.ominus(s, j));
                let ok = rhs.exact_divide(&den)?.is_some_and(|q| q == left);
                yex_split.record(ok, || format!("S = {s}, i = {i}, j = {j}"));
            }
            for &k in &outside {
                if k == i {
                    continue;
                }
                for j in 1..=n {
                    if j == k {
                        continue;
                    }
                    let ok = ikj_holds(t, s, i, k, j);
                    ikj.record(ok, || format!("S = {s}, i = {i}, k = {k}, j = {j}"));
                }
            }
        }
    }
    let mut out = vec![fac, yis, pdet, yex, yex_split, ikj];
    if basis == Basis::Expanded {
        out.insert(1, det_enum);
    }
    Ok(out)
}

fn ikj_holds(t: &mut YTable<'_>, s: VertexSet, i: usize, k: usize, j: usize) -> bool {
    let lhs = &t.p(s.with(k), i, j) * &t.y(s);
    let rhs = if i != j {
        &(&t.p(s, i, k) * &t.p(s, k, j)) + &(&t.p(s, i, j) * &t.y(s.with(k)))
    } else {
        &t.p(s, i, j) * &t.y(s.with(k))
    };
    lhs == rhs
}

/// The `j ∈ S` case through a virtual vertex `j'` with the single edge
/// `j → j'`: the identity for `(i, k, j')` holds in the extended graph and its
/// path sums agree with those for `(i, k, j)` in the original graph.
fn ikj_virtual(g: &Digraph) -> Result<IdentityTally> {
    let n = g.n();
    let mut tally = IdentityTally::new("three-index path identity via virtual vertex", Basis::Diagonal);
    let mut base = YTable::new(g, Basis::Diagonal);
    let mut exts: Vec<Digraph> = Vec::new();
    for j in 1..=n {
        exts.push(g.with_extra_vertex(&[(j, n + 1)])?);
    }
    let mut ext_tables: Vec<YTable<'_>> = exts.iter().map(|e| YTable::new(e, Basis::Diagonal)).collect();
    for s in g.vertices().subsets() {
        for j in s.iter() {
            let t = &mut ext_tables[j - 1];
            let jp = n + 1;
            for i in g.vertices().minus(s).iter() {
                for k in g.vertices().minus(s).iter() {
                    if i == k {
                        continue;
                    }
                    let holds = ikj_holds(t, s, i, k, jp);
                    let same = t.p(s.with(k), i, jp) == base.p(s.with(k), i, j) && t.p(s, k, jp) == base.p(s, k, j) && t.p(s, i, jp) == base.p(s, i, j);
                    let direct = ikj_holds(&mut base, s, i, k, j);
                    tally.record(holds && same && direct, || format!("S = {s}, i = {i}, k = {k}, j = {j}"));
                }
            }
        }
    }
    Ok(tally)
}

/// Dodgson condensation on every square submatrix of `𝒴` of size ≥ 2,
/// rows and columns taken in increasing order.
fn jacobi(g: &Digraph, basis: Basis) -> IdentityTally {
    let mut tally = IdentityTally::new("Dodgson condensation on Y-matrix minors", basis);
    let all = g.vertices();
    for rows in all.subsets() {
        let m = rows.len();
        if m < 2 {
            continue;
        }
        for cols in all.subsets().filter(|c| c.len() == m) {
            let mat = y_submatrix(g, &rows.to_vec(), &cols.to_vec(), basis);
            let sub = |r0: usize, r1: usize, c0: usize, c1: usize| -> LaurentPoly {
                let part: Vec<Vec<LaurentPoly>> = mat[r0..r1].iter().map(|row| row[c0..c1].to_vec()).collect();
                det(&part)
            };
            let lhs = &det(&mat) * &sub(1, m - 1, 1, m - 1);
            let rhs = &(&sub(0, m - 1, 0, m - 1) * &sub(1, m, 1, m)) - &(&sub(0, m - 1, 1, m) * &sub(1, m, 0, m - 1));
            tally.record(lhs == rhs, || format!("rows {rows}, columns {cols}"));
        }
    }
    tally
}

/// `Σ_{j∉Si} P_S^{i,j} X_j + Σ_{j∈Si} P_S^{i,j} A_j`.
pub fn linear_numerator(t: &mut YTable<'_>, s: VertexSet, i: usize) -> LaurentPoly {
    let n = t.graph().n();
    let si = s.with(i);
    let terms: Vec<LaurentPoly> = (1..=n)
        .map(|j| {
            let p = t.p(s, i, j);
            if si.contains(j) {
                &p * &a(j)
            } else {
                &p * &t.x(j)
            }
        })
        .collect();
    LaurentPoly::sum(terms.iter())
}

/// Identities involving `X` and `A`: the linear expansion of `X_i Y_{Si}`
/// and the polynomiality of the quotient by `Y_{S⊖i}`.
fn xa_identities(t: &mut YTable<'_>) -> Vec<IdentityTally> {
    let g = t.graph();
    let mut maxmut = IdentityTally::new("X_i Y_Si as a path expansion", Basis::Expanded);
    let mut maxmut_split = IdentityTally::new("X_i Y_(S+i) as a path expansion over Y_(S-i)", Basis::Expanded);
    let mut fpoly = IdentityTally::new("path expansion over Y_(S-i) depends only on S+i", Basis::Expanded);
    for s in g.vertices().subsets() {
        for i in g.vertices().minus(s).iter() {
            let num = linear_numerator(t, s, i);
            maxmut.record(&t.x(i) * &t.y(s.with(i)) == num, || format!("S = {s}, i = {i}"));
            let q = num.exact_divide(&t.y(g.ominus(s, i))).ok().flatten();
            let lhs = &t.x(i) * &t.y(g.oplus(s, i));
            maxmut_split.record(q.as_ref() == Some(&lhs), || format!("S = {s}, i = {i}"));
            let reduced = g.oplus(s, i).without(i);
            fpoly.record(q == Some(linear_numerator(t, reduced, i)), || format!("S = {s}, i = {i}"));
        }
    }
    vec![maxmut, maxmut_split, fpoly]
}

/// The symbol standing for `Y_S`.
pub fn y_var(s: VertexSet) -> VarId {
    VarId::y(s.mask())
}

fn y_sym(s: VertexSet) -> LaurentPoly {
    if s.is_empty() {
        LaurentPoly::one()
    } else {
        LaurentPoly::var(y_var(s))
    }
}

/// Rewrites `Y_I` as a Laurent polynomial in the symbols `Y_{S_i}` of a
/// maximal nested collection, by moving a vertex outside `I` up to the top
/// through internal mutations (each new variable obtained from the
/// exchange identity) and then factoring over components.
pub struct CollectionExpander<'g> {
    g: &'g Digraph,
    memo: FxHashMap<(MaximalNestedCollection, VertexSet), LaurentPoly>,
}

impl<'g> CollectionExpander<'g> {
    pub fn new(g: &'g Digraph) -> Self {
        CollectionExpander { g, memo: FxHashMap::default() }
    }

    pub fn express(&mut self, m: &MaximalNestedCollection, set: VertexSet) -> Result<LaurentPoly> {
        if !set.is_subset(m.support()) {
            return Err(Error::Invalid(format!("{set} is not contained in the support {}", m.support())));
        }
        self.go(m, set)
    }

    fn go(&mut self, m: &MaximalNestedCollection, set: VertexSet) -> Result<LaurentPoly> {
        if set.is_empty() {
            return Ok(LaurentPoly::one());
        }
        if m.contains_set(set) {
            return Ok(y_sym(set));
        }
        let key = (m.clone(), set);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let v = self.compute(m, set)?;
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn compute(&mut self, m: &MaximalNestedCollection, set: VertexSet) -> Result<LaurentPoly> {
        let g = self.g;
        let comps = g.scc_partition(set);
        if comps.len() > 1 {
            let mut out = LaurentPoly::one();
            for c in comps {
                out = &out * &self.go(m, c)?;
            }
            return Ok(out);
        }
        let tops = m.maxima();
        let top = *tops.iter().find(|&&j| set.is_subset(m.set_of(j).expect("active"))).expect("a strongly connected subset lies in one component");
        let top_set = m.set_of(top).expect("active");
        if tops.len() > 1 {
            return self.go(&m.restrict(top_set), set);
        }
        if !set.contains(top) {
            return self.go(&m.restrict(top_set.without(top)), set);
        }
        let k = top_set.minus(set).first().expect("set is a proper subset of the top member");
        let mut cur = m.clone();
        let mut steps: Vec<(VertexSet, LaurentPoly)> = Vec::new();
        while let Some(up) = cur.cover(k) {
            let expr = self.new_member(&cur, k, up)?;
            let (_, next) = cur.mutate(g, k)?;
            steps.push((next.set_of(up).expect("active"), expr));
            cur = next;
        }
        let mut r = self.go(&cur, set)?;
        for (new_set, expr) in steps.into_iter().rev() {
            r = r.substitute_exact(y_var(new_set), &expr).map_err(|e| Error::NotLaurent(format!("Y{set} in {m}: {e}")))?;
        }
        Ok(r)
    }

    /// `Y_N` for the member `N = (S_{k⁺} − k) ⊕ k⁺` created by internal
    /// mutation at `k`, in the symbols of `cur`:
    /// `Y_N = (Y_{S_{k⁺}} Y_R + P_R^{k,k⁺} P_R^{k⁺,k}) / (Y_{R⊖k} Y_{R⊖k⁺} Y_{S_k})`,
    /// `R = S_{k⁺} − {k, k⁺}`.
    fn new_member(&mut self, cur: &MaximalNestedCollection, k: usize, up: usize) -> Result<LaurentPoly> {
        let g = self.g;
        let s_up = cur.set_of(up).expect("active");
        let s_k = cur.set_of(k).expect("active");
        let r = s_up.without(k).without(up);
        let below = cur.restrict(s_up.without(up));
        let mut err = None;
        let mut y = |t: VertexSet| match self.go(&below, t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                LaurentPoly::zero()
            }
        };
        let yr = y(r);
        let p1 = p_path_with(g, r, k, up, &mut y);
        let p2 = p_path_with(g, r, up, k, &mut y);
        let den = &(&y(g.ominus(r, k)) * &y(g.ominus(r, up))) * &y_sym(s_k);
        if let Some(e) = err {
            return Err(e);
        }
        let num = &(&y_sym(s_up) * &yr) + &(&p1 * &p2);
        num.exact_divide(&den)?.ok_or_else(|| Error::NotLaurent(format!("new member after mutating {cur} at {k}")))
    }
}

/// `Y_I` in the symbols of `m`.
pub fn express_y_in_collection(g: &Digraph, m: &MaximalNestedCollection, set: VertexSet) -> Result<LaurentPoly> {
    CollectionExpander::new(g).express(m, set)
}

/// Replaces every `Y_S` symbol by its X/A expansion.
pub fn expand_y_symbols(expr: &LaurentPoly, t: &mut YTable<'_>) -> Result<LaurentPoly> {
    debug_assert_eq!(t.basis(), Basis::Expanded);
    let images: FxHashMap<VarId, LaurentPoly> = expr
        .vars()
        .iter()
        .filter_map(|v| match v.tag {
            crate::Tag::Y => Some((*v, t.y(VertexSet::from_mask(v.index)))),
            _ => None,
        })
        .collect();
    Ok(expr.substitute_all(&|v| images.get(&v).cloned())?)
}
