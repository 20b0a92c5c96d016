//! Container family for pairs with small sumset: a tree of triple
//! hypergraphs `H(A_1, A_2, A_3)` grown by repeated container steps.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;
use serde::{Deserialize, Serialize};

use crate::combin::k_subsets;
use crate::containers::{self, ContainerError, ParamPack, PartedHypergraph, Vertex};
use crate::exec::Exec;
use crate::group::GroupCtx;
use crate::setops::{sumset, ElemSet, SetError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("parameter out of range: {0}")]
    Params(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("container step failed at node {node}: {source}")]
    Container { node: String, source: ContainerError },
    #[error("degree condition fails at node {node} for y = {y:?}")]
    DegreeCondition { node: String, y: Vec<u32> },
    #[error("child equals its parent at node {0}")]
    NoProgress(String),
    #[error("tree exceeded the height bound {0}")]
    TooDeep(u64),
}

/// `H(A_1, A_2, C)` with edges `{a, b, c}`, `a + b = c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleHypergraph {
    pub a1: ElemSet,
    pub a2: ElemSet,
    pub c: ElemSet,
}

impl TripleHypergraph {
    pub fn edge_count(&self) -> Result<u64, SetError> {
        triple_edge_count(&self.a1, &self.a2, &self.c)
    }

    pub fn to_parted(&self) -> Result<PartedHypergraph, ContainerError> {
        PartedHypergraph::triple(&self.a1, &self.a2, &self.c)
    }

    fn label(&self) -> String {
        format!("({} | {} | {})", self.a1.to_text(), self.a2.to_text(), self.c.to_text())
    }
}

/// `|{(a, b) in A_1 x A_2 : a + b in C}|`.
pub fn triple_edge_count(a1: &ElemSet, a2: &ElemSet, c: &ElemSet) -> Result<u64, SetError> {
    let g = a1.group();
    for s in [a2, c] {
        if s.group() != g {
            return Err(SetError::GroupMismatch(g, s.group()));
        }
    }
    let mut n = 0;
    for a in a1.iter() {
        for b in a2.iter() {
            if c.contains(g.add(a, b)?) {
                n += 1;
            }
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafKind {
    SmallContainer,
    SmallMax,
    SmallLast,
    FewEdges,
}

impl LeafKind {
    pub fn name(self) -> &'static str {
        match self {
            LeafKind::SmallContainer => "small_container",
            LeafKind::SmallMax => "small_max",
            LeafKind::SmallLast => "small_last",
            LeafKind::FewEdges => "few_edges",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyEntry {
    pub a1: ElemSet,
    pub a2: ElemSet,
    pub b: ElemSet,
    pub leaf_kind: LeafKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub n: usize,
    pub s1: usize,
    pub s2: usize,
    pub m: usize,
    pub eps: f64,
    pub ln_n: f64,
    /// `max(1, floor(m / ln n))`.
    pub q: u64,
    /// `max(1, ceil(sqrt q))` before per-node clamping.
    pub b: u64,
    pub rounding_note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    pub height: u64,
    pub height_bound: u64,
    pub nodes: usize,
    pub internal_nodes: usize,
    pub leaves: usize,
    pub max_branching: usize,
    /// Every internal node had at most `n^{4b}` children (`b` as used there).
    pub branching_ok: bool,
    /// Internal nodes where `b` had to be lowered to fit the part sizes.
    pub b_clamped_nodes: usize,
    pub leaf_kinds: BTreeMap<String, usize>,
    /// Failures reported by the per-round runtime checks of the container step.
    pub container_check_failures: usize,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyOutput {
    pub params: FamilyParams,
    pub family: Vec<FamilyEntry>,
    pub stats: TreeStats,
}

/// Validates the range `ln n <= s_2 <= m <= s_1^2 ln n`, `s_1 <= s_2`.
pub fn family_params(n: usize, s1: usize, s2: usize, m: usize, eps: f64) -> Result<FamilyParams, FamilyError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FamilyError::Params(format!("eps = {eps} must lie in (0, 1)")));
    }
    if n < 2 {
        return Err(FamilyError::Params("n must be at least 2".into()));
    }
    let ln_n = (n as f64).ln();
    if s1 > s2 {
        return Err(FamilyError::Params(format!("s1 = {s1} exceeds s2 = {s2}")));
    }
    if (s2 as f64) < ln_n || s2 > m || (m as f64) > (s1 * s1) as f64 * ln_n {
        return Err(FamilyError::Params(format!(
            "need ln n <= s2 <= m <= s1^2 ln n (ln n = {ln_n:.4}, s1 = {s1}, s2 = {s2}, m = {m})"
        )));
    }
    let q = ((m as f64 / ln_n).floor() as u64).max(1);
    let b = ((q as f64).sqrt().ceil() as u64).max(1);
    Ok(FamilyParams {
        n,
        s1,
        s2,
        m,
        eps,
        ln_n,
        q,
        b,
        rounding_note: format!(
            "q = max(1, floor(m / ln n)) = {q}; b = max(1, ceil(sqrt q)) = {b}, lowered per node to min(|V1|, |V2|, m)"
        ),
    })
}

/// `ceil(2^18 eps^-2 ln n)`.
pub fn height_bound(eps: f64, n: usize) -> u64 {
    (2f64.powi(18) / (eps * eps) * (n as f64).ln()).ceil() as u64
}

/// Natural log of the family-size bound `exp(2^20 eps^-2 sqrt(m) (ln n)^{3/2})`.
pub fn ln_family_bound(eps: f64, n: usize, m: usize) -> f64 {
    2f64.powi(20) / (eps * eps) * (m as f64).sqrt() * (n as f64).ln().powf(1.5)
}

fn eps_sq(eps: f64) -> BigRational {
    let e = BigRational::from_f64(eps).expect("finite eps");
    &e * &e
}

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Leaf test, in the order (i)..(iv); `None` for internal nodes.
fn classify(
    node: &TripleHypergraph,
    p: &FamilyParams,
    f_len: usize,
    e2: &BigRational,
) -> Result<Option<LeafKind>, SetError> {
    let (l1, l2, l3) = (node.a1.len(), node.a2.len(), node.c.len());
    if l1 < p.s1 || l2 < p.s2 {
        return Ok(Some(LeafKind::SmallContainer));
    }
    if (l1.max(l2) as f64) < p.m as f64 / p.ln_n {
        return Ok(Some(LeafKind::SmallMax));
    }
    if l3 + p.m < f_len {
        return Ok(Some(LeafKind::SmallLast));
    }
    if rat(node.edge_count()?) < e2 * rat((l1 * l2) as u64) {
        return Ok(Some(LeafKind::FewEdges));
    }
    Ok(None)
}

/// An admissible pair `(X_1, X_2)` and its sumset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    pub x1: ElemSet,
    pub x2: ElemSet,
    pub sum: ElemSet,
}

/// All `(X_1, X_2)` with `|X_i| = s_i` and `|X_1 + X_2| <= m`.
pub fn admissible_pairs(f1: &ElemSet, f2: &ElemSet, s1: usize, s2: usize, m: usize) -> Result<Vec<Seed>, SetError> {
    let g = f1.group();
    let pick = |f: &ElemSet, s: usize| -> Result<Vec<ElemSet>, SetError> {
        if f.len() > 128 {
            return Err(SetError::Parse("ground set too large for exhaustive pairs".into()));
        }
        k_subsets(f.len() as u32, s as u32)
            .into_iter()
            .map(|mask| ElemSet::new(g, crate::combin::mask_indices(mask).into_iter().map(|i| f.elements()[i])))
            .collect()
    };
    let (c1, c2) = (pick(f1, s1)?, pick(f2, s2)?);
    let mut out = Vec::new();
    for x1 in &c1 {
        for x2 in &c2 {
            let sum = sumset(x1, x2)?;
            if sum.len() <= m {
                out.push(Seed { x1: x1.clone(), x2: x2.clone(), sum });
            }
        }
    }
    Ok(out)
}

struct Expansion {
    children: Vec<(TripleHypergraph, Vec<usize>)>,
    b_clamped: bool,
    branching_ok: bool,
    check_failures: usize,
}

/// One container step at an internal node, run on every seed that reaches it.
fn expand(
    node: &TripleHypergraph,
    seeds: &[usize],
    all: &[Seed],
    p: &FamilyParams,
) -> Result<Expansion, FamilyError> {
    let label = node.label();
    let cerr = |source| FamilyError::Container { node: label.clone(), source };
    let h = node.to_parted().map_err(cerr)?;
    let b_cap = (node.a1.len().min(node.a2.len()).min(p.m) as u64).max(1);
    let b = p.b.min(b_cap);
    let big_r = eps_sq(p.eps).recip();
    let pack = ParamPack::new(&h, p.m as u64, b, p.q, big_r).map_err(cerr)?;
    let rep = containers::check_degree_condition(&h, &pack).map_err(cerr)?;
    if !rep.holds {
        return Err(FamilyError::DegreeCondition { node: label, y: rep.worst_y });
    }
    let table = containers::delta_table(&h, &pack);
    let (n1, n2) = (node.a1.len() as Vertex, node.a2.len() as Vertex);
    let index = |set: &ElemSet, x: i64| set.elements().binary_search(&x).ok().map(|i| i as Vertex);
    let mut children: BTreeMap<TripleHypergraph, Vec<usize>> = BTreeMap::new();
    let mut check_failures = 0;
    for &si in seeds {
        let seed = &all[si];
        let mut ind: Vec<Vertex> = Vec::new();
        for x in seed.x1.iter() {
            ind.push(index(&node.a1, x).ok_or_else(|| cerr(ContainerError::BadVertex(0)))?);
        }
        for x in seed.x2.iter() {
            ind.push(n1 + index(&node.a2, x).ok_or_else(|| cerr(ContainerError::BadVertex(0)))?);
        }
        for (k, c) in node.c.iter().enumerate() {
            if !seed.sum.contains(c) {
                ind.push(n1 + n2 + k as Vertex);
            }
        }
        let rec = containers::build_container(&h, &ind, &pack, &table).map_err(cerr)?;
        if !rec.failures.is_empty() {
            check_failures += 1;
        }
        let part = |i: usize| -> Result<ElemSet, SetError> {
            ElemSet::new(node.a1.group(), rec.container[i].iter().map(|&v| h.label(v)))
        };
        let child = TripleHypergraph { a1: part(0)?, a2: part(1)?, c: part(2)? };
        if &child == node {
            return Err(FamilyError::NoProgress(label));
        }
        children.entry(child).or_default().push(si);
    }
    let branching_ok = (children.len() as f64).ln() <= 4.0 * b as f64 * p.ln_n + 1e-9;
    Ok(Expansion {
        children: children.into_iter().collect(),
        b_clamped: b < p.b,
        branching_ok,
        check_failures,
    })
}

/// Grows the tree from `H(F_1, F_2, F_1 + F_2)` following every admissible
/// pair, and keeps the leaves with `|A_i| >= s_i` and `|B| <= m`.
pub fn build_family(
    f1: &ElemSet,
    f2: &ElemSet,
    s1: usize,
    s2: usize,
    m: usize,
    eps: f64,
    exec: Exec,
) -> Result<FamilyOutput, FamilyError> {
    if f1.group() != f2.group() {
        return Err(SetError::GroupMismatch(f1.group(), f2.group()).into());
    }
    if f1.len() != f2.len() {
        return Err(FamilyError::Params("F1 and F2 must have the same size".into()));
    }
    let n = f1.len();
    let p = family_params(n, s1, s2, m, eps)?;
    let f = sumset(f1, f2)?;
    let e2 = eps_sq(eps);
    let bound = height_bound(eps, n);
    let mut stats = TreeStats { height_bound: bound, branching_ok: true, ..TreeStats::default() };
    let seeds = if s1 > n || s2 > n { Vec::new() } else { admissible_pairs(f1, f2, s1, s2, m)? };
    stats.seeds = seeds.len();

    let root = TripleHypergraph { a1: f1.clone(), a2: f2.clone(), c: f.clone() };
    let mut level: Vec<(TripleHypergraph, Vec<usize>)> = vec![(root, (0..seeds.len()).collect())];
    let mut family = BTreeSet::new();
    let mut depth = 0u64;
    while !level.is_empty() {
        if depth > bound {
            return Err(FamilyError::TooDeep(bound));
        }
        stats.nodes += level.len();
        let mut internal = Vec::new();
        for (node, sd) in level {
            match classify(&node, &p, f.len(), &e2)? {
                Some(kind) => {
                    stats.leaves += 1;
                    stats.height = stats.height.max(depth);
                    *stats.leaf_kinds.entry(kind.name().to_string()).or_insert(0) += 1;
                    let b = f.difference(&node.c)?;
                    if node.a1.len() >= s1 && node.a2.len() >= s2 && b.len() <= m {
                        family.insert(FamilyEntry { a1: node.a1, a2: node.a2, b, leaf_kind: kind });
                    }
                }
                None => internal.push((node, sd)),
            }
        }
        stats.internal_nodes += internal.len();
        let expanded: Vec<Result<Expansion, FamilyError>> =
            exec.map(&internal, |(node, sd)| expand(node, sd, &seeds, &p));
        let mut next: BTreeMap<TripleHypergraph, Vec<usize>> = BTreeMap::new();
        for ex in expanded {
            let ex = ex?;
            stats.max_branching = stats.max_branching.max(ex.children.len());
            stats.branching_ok &= ex.branching_ok;
            stats.b_clamped_nodes += ex.b_clamped as usize;
            stats.container_check_failures += ex.check_failures;
            for (child, sd) in ex.children {
                next.entry(child).or_default().extend(sd);
            }
        }
        level = next
            .into_iter()
            .map(|(k, mut v)| {
                v.sort_unstable();
                v.dedup();
                (k, v)
            })
            .collect();
        depth += 1;
    }
    Ok(FamilyOutput { params: p, family: family.into_iter().collect(), stats })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub pairs_checked: usize,
    pub property1_failures: usize,
    pub property2_failures: usize,
    pub family_size: usize,
    pub ln_size_bound: f64,
    pub size_bound_ok: bool,
    pub first_failure: Option<String>,
}

impl FamilyReport {
    pub fn violations(&self) -> usize {
        self.property1_failures + self.property2_failures + (!self.size_bound_ok) as usize
    }
}

fn covers(e: &FamilyEntry, s: &Seed) -> bool {
    s.x1.is_subset(&e.a1) && s.x2.is_subset(&e.a2) && e.b.is_subset(&s.sum)
}

/// Checks covering of every admissible pair, the structure dichotomy of each
/// entry, and the size bound.
#[allow(clippy::too_many_arguments)]
pub fn verify_family(
    family: &[FamilyEntry],
    f1: &ElemSet,
    f2: &ElemSet,
    s1: usize,
    s2: usize,
    m: usize,
    eps: f64,
    exec: Exec,
) -> Result<FamilyReport, FamilyError> {
    let n = f1.len();
    let ln_n = (n as f64).ln();
    let seeds = if s1 > n || s2 > n { Vec::new() } else { admissible_pairs(f1, f2, s1, s2, m)? };
    let mut rep = FamilyReport {
        pairs_checked: seeds.len(),
        family_size: family.len(),
        ln_size_bound: ln_family_bound(eps, n, m),
        ..FamilyReport::default()
    };
    let covered = exec.map(&seeds, |s| family.iter().any(|e| covers(e, s)));
    for (s, ok) in seeds.iter().zip(covered) {
        if !ok {
            rep.property1_failures += 1;
            rep.first_failure.get_or_insert_with(|| format!("uncovered pair {} / {}", s.x1.to_text(), s.x2.to_text()));
        }
    }
    let e2 = eps_sq(eps);
    for e in family {
        let small = (e.a1.len().max(e.a2.len()) as f64) <= m as f64 / ln_n;
        let f_minus_b = sumset(&e.a1, &e.a2)?.difference(&e.b)?;
        let bad = triple_edge_count(&e.a1, &e.a2, &f_minus_b)?;
        if !small && rat(bad) > &e2 * rat((e.a1.len() * e.a2.len()) as u64) {
            rep.property2_failures += 1;
            rep.first_failure
                .get_or_insert_with(|| format!("entry {} / {} has {bad} bad pairs", e.a1.to_text(), e.a2.to_text()));
        }
    }
    rep.size_bound_ok = (family.len().max(1) as f64).ln() <= rep.ln_size_bound;
    Ok(rep)
}

/// For each entry, whether some admissible pair is covered by it alone.
pub fn essential_entries(
    family: &[FamilyEntry],
    f1: &ElemSet,
    f2: &ElemSet,
    s1: usize,
    s2: usize,
    m: usize,
) -> Result<Vec<bool>, SetError> {
    let seeds = admissible_pairs(f1, f2, s1, s2, m)?;
    let mut out = vec![false; family.len()];
    for s in &seeds {
        let hits: Vec<usize> = (0..family.len()).filter(|&i| covers(&family[i], s)).collect();
        if hits.len() == 1 {
            out[hits[0]] = true;
        }
    }
    Ok(out)
}

/// The whole of `Z/n` as a ground set.
pub fn full_cyclic(n: u64) -> Result<ElemSet, SetError> {
    let g = GroupCtx::cyclic(n)?;
    ElemSet::new(g, 0..n as i64)
}
