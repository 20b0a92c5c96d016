//! Multipartite container construction for `(1,...,1,r0)`-bounded
//! multi-hypergraphs: codegree tables, the single-round greedy algorithm, and
//! the container built by iterating it down the edge-size ladder.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combin::binom;
use crate::group::GroupCtx;
use crate::setops::ElemSet;

pub type Vertex = u32;
/// Sorted vertex ids.
pub type Edge = Vec<Vertex>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContainerError {
    #[error("hypergraph has no edges")]
    EmptyHypergraph,
    #[error("edge {0:?} violates the part bound")]
    Unbounded(Edge),
    #[error("vertex {0} out of range")]
    BadVertex(Vertex),
    #[error("invalid codegree vector {0:?}")]
    BadVector(Vec<u32>),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("vertex set is not independent")]
    NotIndependent,
    #[error("independent set misses more than m vertices of the last part")]
    NotInIm,
    #[error("degree condition fails at y = {0:?}")]
    DegreeCondition(Vec<u32>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("construction reached the empty edge size without stopping")]
    NoStop,
}

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

fn pow2(e: i64) -> BigRational {
    let p = BigRational::from_integer(BigInt::from(2).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

// ---------------------------------------------------------------------------
// hypergraph

/// An `r`-partite multi-hypergraph on vertex ids `0..n`, parts contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartedHypergraph {
    labels: Vec<Vec<i64>>,
    offsets: Vec<u32>,
    bound: Vec<u32>,
    edges: BTreeMap<Edge, u64>,
    /// Position of each vertex in the order used for tie-breaking.
    rank: Vec<u32>,
}

impl PartedHypergraph {
    /// Parts given by their labels; default order is (part, position).
    pub fn new(labels: Vec<Vec<i64>>, bound: Vec<u32>) -> Result<Self, ContainerError> {
        if labels.is_empty() || labels.len() != bound.len() {
            return Err(ContainerError::BadParams("need one bound per part".into()));
        }
        let mut offsets = vec![0u32];
        for p in &labels {
            offsets.push(offsets.last().unwrap() + p.len() as u32);
        }
        let n = *offsets.last().unwrap();
        Ok(PartedHypergraph {
            labels,
            offsets,
            bound,
            edges: BTreeMap::new(),
            rank: (0..n).collect(),
        })
    }

    /// Replaces the vertex order; `order` lists vertex ids from smallest up.
    pub fn with_order(mut self, order: &[Vertex]) -> Result<Self, ContainerError> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(ContainerError::BadParams("order must list every vertex once".into()));
        }
        for (pos, &v) in order.iter().enumerate() {
            if v as usize >= n || seen[v as usize] {
                return Err(ContainerError::BadParams("order must list every vertex once".into()));
            }
            seen[v as usize] = true;
            self.rank[v as usize] = pos as u32;
        }
        Ok(self)
    }

    pub fn add_edge(&mut self, mut e: Edge, mult: u64) -> Result<(), ContainerError> {
        e.sort_unstable();
        e.dedup();
        let n = self.num_vertices() as u32;
        if let Some(&v) = e.iter().find(|&&v| v >= n) {
            return Err(ContainerError::BadVertex(v));
        }
        let prof = self.profile(&e);
        if prof.iter().zip(&self.bound).any(|(p, b)| p > b) {
            return Err(ContainerError::Unbounded(e));
        }
        if mult > 0 {
            *self.edges.entry(e).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.labels.len()
    }

    pub fn r0(&self) -> u32 {
        *self.bound.last().unwrap()
    }

    pub fn bound(&self) -> &[u32] {
        &self.bound
    }

    pub fn num_vertices(&self) -> usize {
        *self.offsets.last().unwrap() as usize
    }

    pub fn part_len(&self, i: usize) -> usize {
        self.labels[i].len()
    }

    pub fn part_vertices(&self, i: usize) -> std::ops::Range<Vertex> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn part_of(&self, v: Vertex) -> usize {
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    pub fn label(&self, v: Vertex) -> i64 {
        let p = self.part_of(v);
        self.labels[p][(v - self.offsets[p]) as usize]
    }

    pub fn labels(&self) -> &[Vec<i64>] {
        &self.labels
    }

    pub fn rank(&self, v: Vertex) -> u32 {
        self.rank[v as usize]
    }

    pub fn edges(&self) -> &BTreeMap<Edge, u64> {
        &self.edges
    }

    /// `e(H)` counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn profile(&self, e: &[Vertex]) -> Vec<u32> {
        let mut p = vec![0u32; self.r()];
        for &v in e {
            p[self.part_of(v)] += 1;
        }
        p
    }

    /// Same vertex set and order, different edges.
    pub fn with_edges(&self, edges: BTreeMap<Edge, u64>, bound: Vec<u32>) -> PartedHypergraph {
        PartedHypergraph {
            labels: self.labels.clone(),
            offsets: self.offsets.clone(),
            bound,
            edges,
            rank: self.rank.clone(),
        }
    }

    /// `H(A, B, C)`: edges `{a, b, c}` with `a + b = c`.
    pub fn triple(a: &ElemSet, b: &ElemSet, c: &ElemSet) -> Result<PartedHypergraph, ContainerError> {
        let g: GroupCtx = a.group();
        let mut h = PartedHypergraph::new(
            vec![a.elements().to_vec(), b.elements().to_vec(), c.elements().to_vec()],
            vec![1, 1, 1],
        )?;
        let (na, nb) = (a.len() as u32, b.len() as u32);
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let s = g.add(x, y).map_err(|e| ContainerError::BadParams(e.to_string()))?;
                if let Ok(k) = c.elements().binary_search(&s) {
                    h.edges.insert(vec![i as u32, na + j as u32, na + nb + k as u32], 1);
                }
            }
        }
        Ok(h)
    }

    /// Whether no edge lies inside `set` (given as a membership mask).
    pub fn is_independent(&self, member: &[bool]) -> bool {
        !self.edges.keys().any(|e| e.iter().all(|&v| member[v as usize]))
    }

    /// Text form: `parts r`, one line of labels per part, then `mult v v v`
    /// lines with global vertex ids. The last part's bound is `r0`, written as
    /// `bound x1 ... xr`.
    pub fn to_text(&self) -> String {
        let mut s = format!("parts {}\n", self.r());
        s.push_str("bound");
        for b in &self.bound {
            s.push_str(&format!(" {b}"));
        }
        s.push('\n');
        for p in &self.labels {
            let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        for (e, m) in &self.edges {
            s.push_str(&m.to_string());
            for v in e {
                s.push_str(&format!(" {v}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<PartedHypergraph, ContainerError> {
        let bad = |m: &str| ContainerError::Parse(m.to_string());
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| bad("missing header"))?;
        let r: usize = head
            .strip_prefix("parts")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| bad("header must be `parts r`"))?;
        let nums = |l: &str| -> Result<Vec<i64>, ContainerError> {
            l.split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| ContainerError::Parse(format!("{t}: {e}"))))
                .collect()
        };
        let mut next = lines.next().ok_or_else(|| bad("missing parts"))?;
        let bound = if let Some(rest) = next.strip_prefix("bound") {
            let b: Vec<u32> = nums(rest)?.into_iter().map(|x| x as u32).collect();
            next = lines.next().ok_or_else(|| bad("missing parts"))?;
            b
        } else {
            vec![1u32; r]
        };
        let mut labels = vec![nums(next)?];
        for _ in 1..r {
            labels.push(nums(lines.next().ok_or_else(|| bad("missing parts"))?)?);
        }
        let mut h = PartedHypergraph::new(labels, bound)?;
        for l in lines {
            let v = nums(l)?;
            if v.len() < 2 || v[0] < 1 {
                return Err(bad("edge lines are `mult v ...` with mult >= 1"));
            }
            h.add_edge(v[1..].iter().map(|&x| x as u32).collect(), v[0] as u64)?;
        }
        Ok(h)
    }
}

/// Every nonempty subset of `e`.
fn subsets(e: &[Vertex]) -> impl Iterator<Item = Edge> + '_ {
    (1u32..(1 << e.len())).map(move |mask| {
        e.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Codegree of every nonempty vertex set lying in some edge.
pub fn codegree_map(h: &PartedHypergraph, edges: &BTreeMap<Edge, u64>) -> HashMap<Edge, u64> {
    let mut out = HashMap::new();
    for (e, &m) in edges {
        for t in subsets(e) {
            *out.entry(t).or_insert(0) += m;
        }
    }
    let _ = h;
    out
}

/// `Δ_v` for every profile `v` realised by a subset of an edge.
pub fn max_codegrees(h: &PartedHypergraph, edges: &BTreeMap<Edge, u64>) -> HashMap<Vec<u32>, u64> {
    let mut out: HashMap<Vec<u32>, u64> = HashMap::new();
    for (t, d) in codegree_map(h, edges) {
        let p = h.profile(&t);
        let e = out.entry(p).or_insert(0);
        *e = (*e).max(d);
    }
    out
}

/// `Δ_v(H)`: the largest multiplicity-weighted codegree over vertex sets with
/// `|L ∩ V_i| = v_i`.
pub fn codegree_max(h: &PartedHypergraph, v: &[u32]) -> Result<u64, ContainerError> {
    if v.len() != h.r() || v.iter().all(|&x| x == 0) || v.iter().zip(h.bound()).any(|(a, b)| a > b) {
        return Err(ContainerError::BadVector(v.to_vec()));
    }
    Ok(max_codegrees(h, h.edges()).get(v).copied().unwrap_or(0))
}

// ---------------------------------------------------------------------------
// parameters

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPack {
    pub m: u64,
    pub b: u64,
    pub q: u64,
    #[serde(with = "rational_string")]
    pub big_r: BigRational,
    pub r0: u32,
    /// `m` was larger than the last part and has been lowered to its size.
    pub m_clamped: bool,
    pub m_requested: u64,
    pub q_clamped: bool,
}

mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl ParamPack {
    /// Validates `b <= min(|V_1|, ..., |V_{r-1}|, m)`; clamps `m` to `|V_r|`
    /// and then `q` to `m`.
    pub fn new(h: &PartedHypergraph, m: u64, b: u64, q: u64, big_r: BigRational) -> Result<Self, ContainerError> {
        let r = h.r();
        let last = h.part_len(r - 1) as u64;
        if m == 0 || b == 0 || q == 0 {
            return Err(ContainerError::BadParams("m, b, q must be positive".into()));
        }
        if big_r <= BigRational::zero() {
            return Err(ContainerError::BadParams("R must be positive".into()));
        }
        let m_eff = m.min(last).max(1);
        let q_eff = q.min(m_eff);
        let min_part = (0..r - 1).map(|i| h.part_len(i) as u64).min().unwrap_or(u64::MAX);
        if b > min_part.min(m) {
            return Err(ContainerError::BadParams(format!(
                "b = {b} exceeds min(|V_1|, ..., |V_(r-1)|, m) = {}",
                min_part.min(m)
            )));
        }
        Ok(ParamPack {
            m: m_eff,
            b,
            q: q_eff,
            big_r,
            r0: h.r0(),
            m_clamped: m_eff != m,
            m_requested: m,
            q_clamped: q_eff != q,
        })
    }

    /// `w = (|V_1|, ..., |V_{r-1}|, m)`.
    pub fn w(&self, h: &PartedHypergraph) -> Vec<u64> {
        let r = h.r();
        (0..r).map(|i| if i + 1 == r { self.m } else { h.part_len(i) as u64 }).collect()
    }

    /// `2^{-(r0+r-1)(2r0+r)} / R`.
    pub fn delta(&self, r: usize) -> BigRational {
        let r0 = self.r0 as i64;
        let r = r as i64;
        pow2(-(r0 + r - 1) * (2 * r0 + r)) / &self.big_r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeConditionReport {
    pub holds: bool,
    pub worst_y: Vec<u32>,
    /// `Δ_y / bound` at the worst `y`.
    pub ratio: f64,
}

/// Box of codegree vectors: `{0,1}^{r-1} x {0..r0}` minus zero.
pub fn degree_vectors(r: usize, r0: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (1u32 << (r - 1)) * (r0 + 1);
    for code in 0..total {
        let mut y: Vec<u32> = (0..r - 1).map(|i| code >> i & 1).collect();
        y.push(code >> (r - 1));
        if y.iter().any(|&c| c > 0) {
            out.push(y);
        }
    }
    out
}

/// `Δ_y(H) <= R (prod w_i^{y_i})^{-1} b^{|y|-1} e(H) (m/q)^{[y_r > 0]}` for
/// every nonzero `y` in the box.
pub fn check_degree_condition(h: &PartedHypergraph, p: &ParamPack) -> Result<DegreeConditionReport, ContainerError> {
    let e = h.edge_count();
    if e == 0 {
        return Err(ContainerError::EmptyHypergraph);
    }
    let maxes = max_codegrees(h, h.edges());
    let w = p.w(h);
    let r = h.r();
    let mut worst: Option<(BigRational, Vec<u32>)> = None;
    let mut holds = true;
    for y in degree_vectors(r, p.r0) {
        let d = maxes.get(&y).copied().unwrap_or(0);
        let norm: u32 = y.iter().sum();
        let mut rhs = p.big_r.clone() * rat(e) * pow(&rat(p.b), norm - 1);
        for (i, &yi) in y.iter().enumerate() {
            rhs /= pow(&rat(w[i]), yi);
        }
        if y[r - 1] > 0 {
            rhs *= frac(p.m, p.q);
        }
        let ratio = rat(d) / &rhs;
        if rat(d) > rhs {
            holds = false;
        }
        if worst.as_ref().map_or(true, |(w, _)| ratio > *w) {
            worst = Some((ratio, y));
        }
    }
    let (ratio, worst_y) = worst.expect("box is nonempty");
    Ok(DegreeConditionReport {
        holds,
        worst_y,
        ratio: ratio.to_f64().unwrap_or(f64::INFINITY),
    })
}

// ---------------------------------------------------------------------------
// codegree table

/// Edge-size vectors visited by the construction, from `(1,...,1,r0)` down
/// to zero by removing `e_{i'}` with `i' = min{i : x_i > 0}`.
pub fn ladder(r: usize, r0: u32) -> Vec<Vec<u32>> {
    let mut x: Vec<u32> = vec![1; r];
    x[r - 1] = r0;
    let mut out = vec![x.clone()];
    while let Some(i) = x.iter().position(|&c| c > 0) {
        x[i] -= 1;
        out.push(x.clone());
    }
    out
}

/// Nonzero vectors `v <= x`.
pub fn below(x: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &xi in x {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..=xi).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&c| c > 0));
    out
}

pub fn first_positive(x: &[u32]) -> Option<usize> {
    x.iter().position(|&c| c > 0)
}

/// `Δ^x_v` for every `x` on the ladder and every nonzero `v <= x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable {
    values: BTreeMap<(Vec<u32>, Vec<u32>), BigRational>,
}

impl DeltaTable {
    pub fn get(&self, x: &[u32], v: &[u32]) -> Option<&BigRational> {
        self.values.get(&(x.to_vec(), v.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Vec<u32>, Vec<u32>), &BigRational)> {
        self.values.iter()
    }
}

/// Builds the table by the recursion
/// `Δ^{x'}_{v'} = max(2 Δ^x_{v'+e_{i'}}, (b / w_{i'}) Δ^x_{v'})`.
pub fn delta_table(h: &PartedHypergraph, p: &ParamPack) -> DeltaTable {
    let maxes = max_codegrees(h, h.edges());
    let w = p.w(h);
    let lad = ladder(h.r(), p.r0);
    let mut values = BTreeMap::new();
    for v in below(&lad[0]) {
        let d = maxes.get(&v).copied().unwrap_or(0);
        values.insert((lad[0].clone(), v), rat(d));
    }
    for k in 1..lad.len() {
        let (x, xp) = (&lad[k - 1], &lad[k]);
        let i = first_positive(x).expect("ladder step");
        let ratio = frac(p.b, w[i]);
        for vp in below(xp) {
            let mut v = vp.clone();
            v[i] += 1;
            let a = rat(2) * &values[&(x.clone(), v)];
            let b = &ratio * &values[&(x.clone(), vp.clone())];
            values.insert((xp.clone(), vp), if a >= b { a } else { b });
        }
    }
    DeltaTable { values }
}

/// Closed form of the table entry:
/// `max_z 2^{|z|} prod_i (b/w_i)^{top_i - x_i - z_i} Δ_{v+z}(H)` over
/// `0 <= z <= top - x`, where `top = (1,...,1,r0)`.
pub fn delta_closed_form(h: &PartedHypergraph, p: &ParamPack, x: &[u32], v: &[u32]) -> BigRational {
    let maxes = max_codegrees(h, h.edges());
    delta_closed_form_with(&maxes, &p.w(h), p.b, p.r0, x, v)
}

pub fn delta_closed_form_with(
    maxes: &HashMap<Vec<u32>, u64>,
    w: &[u64],
    b: u64,
    r0: u32,
    x: &[u32],
    v: &[u32],
) -> BigRational {
    let r = x.len();
    let mut top = vec![1u32; r];
    top[r - 1] = r0;
    let room: Vec<u32> = top.iter().zip(x).map(|(t, xi)| t - xi).collect();
    let mut zs = vec![vec![]];
    for &c in &room {
        zs = zs
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..=c).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    let mut best = BigRational::zero();
    for z in zs {
        let vz: Vec<u32> = v.iter().zip(&z).map(|(a, b)| a + b).collect();
        let mut val = pow2(z.iter().sum::<u32>() as i64) * rat(maxes.get(&vz).copied().unwrap_or(0));
        for i in 0..r {
            val *= pow(&frac(b, w[i]), room[i] - z[i]);
        }
        if val > best {
            best = val;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// one round

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutput {
    pub g_star: BTreeMap<Edge, u64>,
    pub l: usize,
    pub u_seq: Vec<Vertex>,
    pub s_idx: Vec<usize>,
    pub w_idx: Vec<usize>,
    /// The selection guard found no unused vertex while edges remained.
    pub stalled: bool,
    pub failures: Vec<String>,
}

fn ceil_half(x: &BigRational) -> u64 {
    (x / rat(2)).ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// One pass of the greedy round on the `x`-bounded hypergraph `g`, with
/// runtime checks of independence, edge conservation and the codegree bounds.
pub fn algorithm_round(
    h: &PartedHypergraph,
    g: &BTreeMap<Edge, u64>,
    x: &[u32],
    member: &[bool],
    p: &ParamPack,
    table: &DeltaTable,
) -> Result<RoundOutput, ContainerError> {
    let view = h.with_edges(g.clone(), x.to_vec());
    if !view.is_independent(member) {
        return Err(ContainerError::NotIndependent);
    }
    let ip = first_positive(x).ok_or_else(|| ContainerError::BadVector(x.to_vec()))?;
    let mut xp = x.to_vec();
    xp[ip] -= 1;
    // thresholds for M^{x'}_v: codeg >= Δ^{x'}_v / 2
    let thresholds: HashMap<Vec<u32>, u64> = below(&xp)
        .into_iter()
        .map(|v| {
            let t = ceil_half(table.get(&xp, &v).expect("table covers ladder"));
            (v, t)
        })
        .collect();

    let mut failures = Vec::new();
    let mut a: BTreeMap<Edge, u64> = g.clone();
    let mut gs: BTreeMap<Edge, u64> = BTreeMap::new();
    let mut codeg: HashMap<Edge, u64> = HashMap::new();
    let mut used = vec![false; h.num_vertices()];
    let (mut u_seq, mut s_idx, mut w_idx) = (Vec::new(), Vec::new(), Vec::new());
    let mut stalled = false;
    let part = h.part_vertices(ip);
    loop {
        if s_idx.len() as u64 == p.b || a.is_empty() {
            break;
        }
        let mut deg: HashMap<Vertex, u64> = HashMap::new();
        for (e, &m) in &a {
            for &v in e {
                if part.contains(&v) {
                    *deg.entry(v).or_insert(0) += m;
                }
            }
        }
        // i'-maximum vertex: max degree, then smallest in the vertex order
        let pick = part
            .clone()
            .filter(|&v| !used[v as usize])
            .max_by(|&a1, &a2| {
                let d1 = deg.get(&a1).copied().unwrap_or(0);
                let d2 = deg.get(&a2).copied().unwrap_or(0);
                d1.cmp(&d2).then(h.rank(a2).cmp(&h.rank(a1)))
            });
        let Some(u) = pick else {
            stalled = true;
            break;
        };
        used[u as usize] = true;
        let j = u_seq.len();
        u_seq.push(u);
        if member[u as usize] {
            s_idx.push(j);
            let before: u64 = gs.values().sum();
            let du = deg.get(&u).copied().unwrap_or(0);
            for (e, &m) in &a {
                if e.binary_search(&u).is_ok() {
                    let rest: Edge = e.iter().copied().filter(|&v| v != u).collect();
                    for t in subsets(&rest) {
                        *codeg.entry(t).or_insert(0) += m;
                    }
                    *gs.entry(rest).or_insert(0) += m;
                }
            }
            let after: u64 = gs.values().sum();
            if after - before != du {
                failures.push(format!("edge conservation: added {} but degree {du}", after - before));
            }
        } else {
            w_idx.push(j);
        }
        let heavy = |t: &Edge| -> bool {
            let c = match codeg.get(t) {
                Some(&c) => c,
                None => return false,
            };
            let prof = h.profile(t);
            matches!(thresholds.get(&prof), Some(&th) if c >= th)
        };
        a.retain(|e, _| e.binary_search(&u).is_err() && !subsets(e).any(|t| heavy(&t)));
    }

    // Obs: I stays independent in G*
    let gview = h.with_edges(gs.clone(), xp.clone());
    if !gview.is_independent(member) {
        failures.push("independent set not independent in G*".into());
    }
    // x'-boundedness
    for e in gs.keys() {
        if h.profile(e).iter().zip(&xp).any(|(a, b)| a > b) {
            failures.push(format!("G* edge {e:?} exceeds x'"));
        }
    }
    // codegree bounds on input and output
    let gmax = max_codegrees(h, g);
    for v in below(x) {
        let d = rat(gmax.get(&v).copied().unwrap_or(0));
        if &d > table.get(x, &v).expect("table") {
            failures.push(format!("input codegree Δ_{v:?} above table"));
        }
    }
    let smax = max_codegrees(h, &gs);
    for v in below(&xp) {
        let d = rat(smax.get(&v).copied().unwrap_or(0));
        if &d > table.get(&xp, &v).expect("table") {
            failures.push(format!("output codegree Δ_{v:?} = {d} above Δ^x'"));
        }
    }
    Ok(RoundOutput {
        g_star: gs,
        l: u_seq.len(),
        u_seq,
        s_idx,
        w_idx,
        stalled,
        failures,
    })
}

// ---------------------------------------------------------------------------
// container

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContainerRecord {
    /// `S_i` as vertex ids per part.
    pub fingerprint: Vec<Vec<Vertex>>,
    /// `A_i` as vertex ids per part.
    pub container: Vec<Vec<Vertex>>,
    pub stop_stage: usize,
    /// 1-based index of the part that shrank.
    pub stop_part: usize,
    pub rounds: usize,
    /// Per-round trichotomy checks that had their hypothesis met.
    pub trichotomy_checked: usize,
    pub failures: Vec<String>,
}

/// `2^{-s(2r0+r)}`.
pub fn alpha_s(s: usize, r: usize, r0: u32) -> BigRational {
    pow2(-(s as i64) * (2 * r0 as i64 + r as i64))
}

/// `α_s prod_{j <= min(r-1, s)} (b/|V_j|) (b/m)^{max(0, s-r+1)}`.
pub fn beta_s(s: usize, h: &PartedHypergraph, p: &ParamPack) -> BigRational {
    let r = h.r();
    let mut v = alpha_s(s, r, p.r0);
    for j in 0..s.min(r - 1) {
        v *= frac(p.b, h.part_len(j) as u64);
    }
    let extra = (s as i64 - r as i64 + 1).max(0) as u32;
    v * pow(&frac(p.b, p.m), extra)
}

/// Membership mask of `I` plus the `I_m` check.
pub fn member_mask(h: &PartedHypergraph, set: &[Vertex], p: &ParamPack) -> Result<Vec<bool>, ContainerError> {
    let mut member = vec![false; h.num_vertices()];
    for &v in set {
        if v as usize >= member.len() {
            return Err(ContainerError::BadVertex(v));
        }
        member[v as usize] = true;
    }
    if !h.is_independent(&member) {
        return Err(ContainerError::NotIndependent);
    }
    let r = h.r();
    let inside = h.part_vertices(r - 1).filter(|&v| member[v as usize]).count() as u64;
    if inside + p.m < h.part_len(r - 1) as u64 {
        return Err(ContainerError::NotInIm);
    }
    Ok(member)
}

/// Runs the rounds down the ladder and stops at the first stage whose output
/// has fewer than `β_{s+1} e(H)` edges.
pub fn build_container(
    h: &PartedHypergraph,
    set: &[Vertex],
    p: &ParamPack,
    table: &DeltaTable,
) -> Result<ContainerRecord, ContainerError> {
    let member = member_mask(h, set, p)?;
    let r = h.r();
    let eh = rat(h.edge_count());
    let w = p.w(h);
    let mut fingerprint: Vec<BTreeSet<Vertex>> = vec![BTreeSet::new(); r];
    let mut failures = Vec::new();
    let mut g = h.edges().clone();
    let lad = ladder(r, p.r0);
    let mut checked = 0;
    for s in 0..lad.len() - 1 {
        let x = &lad[s];
        let xp = &lad[s + 1];
        let ip = first_positive(x).expect("ladder");
        let out = algorithm_round(h, &g, x, &member, p, table)?;
        failures.extend(out.failures.iter().map(|f| format!("stage {s}: {f}")));
        if out.stalled {
            failures.push(format!("stage {s}: selection stalled"));
        }
        for &j in &out.s_idx {
            fingerprint[ip].insert(out.u_seq[j]);
        }

        // progress trichotomy with α = α_s
        let eg = rat(g.values().sum());
        let egs = rat(out.g_star.values().sum());
        let al = alpha_s(s, r, p.r0);
        let scale = |xv: &[u32]| -> BigRational {
            let mut v = BigRational::one();
            for i in 0..r {
                let top = if i + 1 == r { p.r0 } else { 1 };
                v *= pow(&frac(p.b, w[i]), top - xv[i]);
            }
            v
        };
        if eg >= &al * scale(x) * &eh {
            checked += 1;
            let xn: u32 = x.iter().sum();
            let p1 = egs >= pow2(-(xn as i64) - x[r - 1] as i64 - 1) * &al * scale(xp) * &eh;
            let wl = rat(out.w_idx.len() as u64);
            let p2 = ip + 1 < r
                && wl >= pow2(-(ip as i64 + 1) - 1) / &p.big_r * &al * rat(h.part_len(ip) as u64);
            let p3 = ip + 1 == r
                && wl >= pow2(-(r as i64) - p.r0 as i64 - 1) / &p.big_r * &al * rat(p.q);
            if !(p1 || p2 || p3) {
                failures.push(format!("stage {s}: none of the three progress outcomes holds"));
            }
        }

        if egs < beta_s(s + 1, h, p) * &eh {
            let removed: BTreeSet<Vertex> = out.w_idx.iter().map(|&j| out.u_seq[j]).collect();
            let container = (0..r)
                .map(|i| {
                    h.part_vertices(i)
                        .filter(|v| i != ip || !removed.contains(v))
                        .collect()
                })
                .collect();
            return Ok(ContainerRecord {
                fingerprint: fingerprint.into_iter().map(|s| s.into_iter().collect()).collect(),
                container,
                stop_stage: s,
                stop_part: ip + 1,
                rounds: s + 1,
                trichotomy_checked: checked,
                failures,
            });
        }
        g = out.g_star;
    }
    Err(ContainerError::NoStop)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContainerReport {
    pub inputs: usize,
    pub containment_failures: usize,
    pub shrink_failures: usize,
    pub fingerprint_failures: usize,
    pub determinism_failures: usize,
    pub runtime_failures: usize,
    /// Inputs where the side condition on nonempty `S_i` was vacuous (all `S_i` empty).
    pub side_condition_vacuous: usize,
    /// Rounds where the progress trichotomy had its hypothesis met and was checked.
    pub trichotomy_rounds: usize,
    pub rounds: usize,
    pub distinct_fingerprints: usize,
    pub fingerprint_bound: String,
    pub fingerprint_bound_ok: bool,
    pub first_failure: Option<String>,
}

impl ContainerReport {
    pub fn total_failures(&self) -> usize {
        self.containment_failures
            + self.shrink_failures
            + self.fingerprint_failures
            + self.determinism_failures
            + self.runtime_failures
            + (!self.fingerprint_bound_ok) as usize
    }
}

/// `|A_i| <= (1-δ)|V_i|` for `i < r`, or `|A_r| <= |V_r| - δq`.
fn shrunk(h: &PartedHypergraph, p: &ParamPack, delta: &BigRational, a: &[Vec<Vertex>], i: usize) -> bool {
    let r = h.r();
    let vi = rat(h.part_len(i) as u64);
    let ai = rat(a[i].len() as u64);
    if i + 1 < r {
        ai <= (BigRational::one() - delta) * vi
    } else {
        ai <= vi - delta * rat(p.q)
    }
}

/// Builds a container for every input and checks containment, the shrink
/// dichotomy, the fingerprint conditions and that equal fingerprints give
/// equal containers.
pub fn verify_container_properties(
    h: &PartedHypergraph,
    p: &ParamPack,
    sample: &[Vec<Vertex>],
    exec: crate::exec::Exec,
) -> Result<ContainerReport, ContainerError> {
    let table = delta_table(h, p);
    let records: Vec<Result<ContainerRecord, ContainerError>> =
        exec.map(sample, |set| build_container(h, set, p, &table));
    let delta = p.delta(h.r());
    let r = h.r();
    let mut rep = ContainerReport::default();
    let mut by_fp: BTreeMap<Vec<Vec<Vertex>>, Vec<Vec<Vertex>>> = BTreeMap::new();
    let fail = |rep: &mut ContainerReport, msg: String| {
        if rep.first_failure.is_none() {
            rep.first_failure = Some(msg);
        }
    };
    for (set, rec) in sample.iter().zip(records) {
        let rec = rec?;
        rep.inputs += 1;
        rep.trichotomy_rounds += rec.trichotomy_checked;
        rep.rounds += rec.rounds;
        let member: BTreeSet<Vertex> = set.iter().copied().collect();
        for i in 0..r {
            let inside: Vec<Vertex> = h.part_vertices(i).filter(|v| member.contains(v)).collect();
            if !inside.iter().all(|v| rec.container[i].binary_search(v).is_ok()) {
                rep.containment_failures += 1;
                fail(&mut rep, format!("containment, part {}: {set:?}", i + 1));
            }
            if !rec.fingerprint[i].iter().all(|v| member.contains(v)) || rec.fingerprint[i].len() as u64 > p.b {
                rep.fingerprint_failures += 1;
                fail(&mut rep, format!("fingerprint subset, part {}: {set:?}", i + 1));
            }
            if !rec.fingerprint[i].is_empty() && !(i..r).any(|j| shrunk(h, p, &delta, &rec.container, j)) {
                rep.fingerprint_failures += 1;
                fail(&mut rep, format!("side condition, part {}: {set:?}", i + 1));
            }
        }
        if rec.fingerprint.iter().all(|s| s.is_empty()) {
            rep.side_condition_vacuous += 1;
        }
        if !(0..r).any(|i| shrunk(h, p, &delta, &rec.container, i)) {
            rep.shrink_failures += 1;
            fail(&mut rep, format!("no part shrank: {set:?}"));
        }
        if !rec.failures.is_empty() {
            rep.runtime_failures += 1;
            fail(&mut rep, format!("{set:?}: {}", rec.failures[0]));
        }
        match by_fp.get(&rec.fingerprint) {
            Some(c) if *c != rec.container => {
                rep.determinism_failures += 1;
                fail(&mut rep, format!("same fingerprint, different container: {set:?}"));
            }
            Some(_) => {}
            None => {
                by_fp.insert(rec.fingerprint.clone(), rec.container.clone());
            }
        }
    }
    rep.distinct_fingerprints = by_fp.len();
    let mut bound = num_bigint::BigUint::one();
    for i in 0..r {
        let n = h.part_len(i) as u64;
        let mut s = num_bigint::BigUint::zero();
        for k in 0..=p.b.min(n) {
            s += binom(n, k);
        }
        bound *= s;
    }
    rep.fingerprint_bound_ok = num_bigint::BigUint::from(rep.distinct_fingerprints) <= bound;
    rep.fingerprint_bound = bound.to_string();
    Ok(rep)
}

/// Every `I` in `I_m(H(A, B, C))`: any `I_1 ⊆ A`, `I_2 ⊆ B`, and
/// `I_3 ⊆ C \ (I_1 + I_2)` missing at most `m` vertices of `C`.
pub fn triple_independent_sets(h: &PartedHypergraph, g: GroupCtx, m: u64) -> Vec<Vec<Vertex>> {
    assert_eq!(h.r(), 3);
    let (na, nb, nc) = (h.part_len(0), h.part_len(1), h.part_len(2));
    assert!(na <= 20 && nb <= 20 && nc <= 20);
    let la = &h.labels()[0];
    let lb = &h.labels()[1];
    let lc = &h.labels()[2];
    let mut out = Vec::new();
    for ma in 0u32..(1 << na) {
        for mb in 0u32..(1 << nb) {
            let mut forbidden = 0u32;
            for i in 0..na {
                if ma >> i & 1 == 0 {
                    continue;
                }
                for j in 0..nb {
                    if mb >> j & 1 == 0 {
                        continue;
                    }
                    if let Ok(s) = g.add(la[i], lb[j]) {
                        if let Ok(k) = lc.binary_search(&s) {
                            forbidden |= 1 << k;
                        }
                    }
                }
            }
            let allowed = nc - forbidden.count_ones() as usize;
            if (allowed as u64) + m < nc as u64 {
                continue;
            }
            let free: Vec<usize> = (0..nc).filter(|k| forbidden >> k & 1 == 0).collect();
            for mc in 0u32..(1 << free.len()) {
                if ((mc.count_ones() as u64) + m) < nc as u64 {
                    continue;
                }
                let mut set: Vec<Vertex> = Vec::new();
                set.extend((0..na).filter(|i| ma >> i & 1 == 1).map(|i| i as Vertex));
                set.extend((0..nb).filter(|j| mb >> j & 1 == 1).map(|j| (na + j) as Vertex));
                set.extend(
                    free.iter()
                        .enumerate()
                        .filter(|(t, _)| mc >> t & 1 == 1)
                        .map(|(_, &k)| (na + nb + k) as Vertex),
                );
                out.push(set);
            }
        }
    }
    out
}

/// Random `(1,...,1,r0)`-bounded hypergraph with 2 to 4 vertices per part
/// and up to 11 edges of multiplicity 1 to 3.
pub fn random_hypergraph(seed: u64, r: usize, r0: u32) -> PartedHypergraph {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<Vec<i64>> = (0..r).map(|_| (0..rng.gen_range(2..5)).collect()).collect();
    let mut bound = vec![1u32; r];
    bound[r - 1] = r0;
    let mut h = PartedHypergraph::new(labels, bound.clone()).expect("valid parts");
    for _ in 0..rng.gen_range(1..12) {
        let mut e = Vec::new();
        for i in 0..r {
            let mut pool: Vec<Vertex> = h.part_vertices(i).collect();
            let k = rng.gen_range(0..=bound[i].min(pool.len() as u32));
            for _ in 0..k {
                let t = rng.gen_range(0..pool.len());
                e.push(pool.remove(t));
            }
        }
        if !e.is_empty() {
            h.add_edge(e, rng.gen_range(1..4)).expect("bounded edge");
        }
    }
    h
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaAgreement {
    pub hypergraphs: u64,
    pub entries: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<String>,
}

/// Recursion against closed form on `count` random hypergraphs per shape,
/// over every `r <= r_max`, `r0 <= r0_max`.
pub fn delta_agreement(seed: u64, count: u64, r_max: usize, r0_max: u32, exec: crate::exec::Exec) -> DeltaAgreement {
    let shapes: Vec<(u64, usize, u32)> = (0..count)
        .flat_map(|i| (1..=r_max).flat_map(move |r| (1..=r0_max).map(move |r0| (i, r, r0))))
        .collect();
    let parts = exec.map(&shapes, |&(i, r, r0)| {
        let h = random_hypergraph(seed ^ (i * 1_000_003 + r as u64 * 101 + r0 as u64), r, r0);
        let min_part = (0..r - 1).map(|k| h.part_len(k)).min().unwrap_or(4) as u64;
        let m = h.part_len(r - 1) as u64;
        let p = ParamPack::new(&h, m, min_part.min(m).max(1), 1, rat(1)).expect("valid params");
        let t = delta_table(&h, &p);
        let maxes = max_codegrees(&h, h.edges());
        let w = p.w(&h);
        let mut out = DeltaAgreement { hypergraphs: 1, ..Default::default() };
        for ((x, v), val) in t.entries() {
            out.entries += 1;
            if *val != delta_closed_form_with(&maxes, &w, p.b, p.r0, x, v) {
                out.mismatches += 1;
                out.first_mismatch.get_or_insert_with(|| format!("seed {seed} index {i} r {r} r0 {r0} x {x:?} v {v:?}"));
            }
        }
        out
    });
    parts.into_iter().fold(DeltaAgreement::default(), |mut a, b| {
        a.hypergraphs += b.hypergraphs;
        a.entries += b.entries;
        a.mismatches += b.mismatches;
        if a.first_mismatch.is_none() {
            a.first_mismatch = b.first_mismatch;
        }
        a
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Exec;

    fn z7() -> (GroupCtx, ElemSet) {
        let g = GroupCtx::cyclic(7).unwrap();
        (g, ElemSet::new(g, 0..7).unwrap())
    }

    #[test]
    fn codegree_examples() {
        let (_, f) = z7();
        let h = PartedHypergraph::triple(&f, &f, &f).unwrap();
        assert_eq!(h.edge_count(), 49);
        assert_eq!(codegree_max(&h, &[1, 1, 0]).unwrap(), 1);
        assert_eq!(codegree_max(&h, &[1, 1, 1]).unwrap(), 1);
        assert_eq!(codegree_max(&h, &[0, 0, 1]).unwrap(), 7);
        let empty = PartedHypergraph::new(vec![vec![0, 1], vec![0]], vec![1, 1]).unwrap();
        assert_eq!(codegree_max(&empty, &[1, 0]).unwrap(), 0);
        assert_eq!(codegree_max(&empty, &[1, 1]).unwrap(), 0);
        let mut one = empty.clone();
        one.add_edge(vec![0, 2], 3).unwrap();
        for v in [[1, 0], [0, 1], [1, 1]] {
            assert_eq!(codegree_max(&one, &v).unwrap(), 3);
        }
        assert!(codegree_max(&one, &[0, 0]).is_err());
        assert!(codegree_max(&one, &[2, 0]).is_err());
    }

    #[test]
    fn bound_is_enforced() {
        let mut h = PartedHypergraph::new(vec![vec![0, 1], vec![0, 1]], vec![1, 1]).unwrap();
        assert!(matches!(h.add_edge(vec![0, 1], 1), Err(ContainerError::Unbounded(_))));
        assert!(matches!(h.add_edge(vec![9], 1), Err(ContainerError::BadVertex(9))));
    }

    #[test]
    fn text_round_trip() {
        let h = random_hypergraph(3, 3, 2);
        let back = PartedHypergraph::parse_text(&h.to_text()).unwrap();
        assert_eq!(back, h);
        assert!(PartedHypergraph::parse_text("parts x").is_err());
    }

    #[test]
    fn degree_condition_examples() {
        let (_, f) = z7();
        let h = PartedHypergraph::triple(&f, &f, &f).unwrap();
        let p = ParamPack::new(&h, 2, 2, 2, rat(4)).unwrap();
        let rep = check_degree_condition(&h, &p).unwrap();
        assert!(rep.holds, "{rep:?}");
        let tiny = ParamPack::new(&h, 2, 2, 2, frac(4, 1_000_000)).unwrap();
        let rep = check_degree_condition(&h, &tiny).unwrap();
        assert!(!rep.holds);
        assert!(rep.ratio > 1.0);
        let empty = PartedHypergraph::new(vec![vec![0], vec![0]], vec![1, 1]).unwrap();
        let p = ParamPack::new(&empty, 1, 1, 1, rat(1)).unwrap();
        assert_eq!(check_degree_condition(&empty, &p), Err(ContainerError::EmptyHypergraph));
    }

    #[test]
    fn params_clamp_and_validate() {
        let (_, f) = z7();
        let h = PartedHypergraph::triple(&f, &f, &f).unwrap();
        let p = ParamPack::new(&h, 20, 2, 15, rat(1)).unwrap();
        assert!(p.m_clamped && p.q_clamped);
        assert_eq!((p.m, p.q), (7, 7));
        assert!(ParamPack::new(&h, 2, 3, 2, rat(1)).is_err());
    }

    #[test]
    fn ladder_shape() {
        assert_eq!(ladder(3, 1), vec![vec![1, 1, 1], vec![0, 1, 1], vec![0, 0, 1], vec![0, 0, 0]]);
        assert_eq!(ladder(2, 2).len(), 4);
        assert_eq!(below(&[1, 2]).len(), 5);
    }

    #[test]
    fn two_part_table_by_hand() {
        let mut h = PartedHypergraph::new(vec![vec![0, 1, 2], vec![0, 1]], vec![1, 1]).unwrap();
        h.add_edge(vec![0, 3], 2).unwrap();
        h.add_edge(vec![1, 3], 1).unwrap();
        h.add_edge(vec![2, 4], 1).unwrap();
        let p = ParamPack::new(&h, 2, 1, 1, rat(1)).unwrap();
        let t = delta_table(&h, &p);
        // base codegrees: Δ_(1,0)=2, Δ_(0,1)=3, Δ_(1,1)=2
        assert_eq!(t.get(&[1, 1], &[0, 1]).unwrap(), &rat(3));
        // x' = (0,1): max(2 Δ_(1,1), (1/3) Δ_(0,1)) = max(4, 1)
        assert_eq!(t.get(&[0, 1], &[0, 1]).unwrap(), &rat(4));
        for ((x, v), val) in t.entries() {
            assert_eq!(val, &delta_closed_form(&h, &p, x, v));
        }
    }

    #[test]
    fn table_dominates_base_when_b_equals_w() {
        let h = random_hypergraph(5, 2, 1);
        let b = h.part_len(0).min(2) as u64;
        let p = ParamPack::new(&h, b, b, 1, rat(1)).unwrap();
        let t = delta_table(&h, &p);
        let maxes = max_codegrees(&h, h.edges());
        for ((_, v), val) in t.entries() {
            assert!(val >= &rat(maxes.get(v).copied().unwrap_or(0)));
        }
    }

    #[test]
    fn recursion_matches_closed_form_random() {
        for seed in 0..40 {
            for r in 1..=3 {
                for r0 in 1..=3 {
                    let h = random_hypergraph(seed * 31 + r as u64 * 7 + r0 as u64, r, r0);
                    let min_part = (0..r - 1).map(|i| h.part_len(i)).min().unwrap_or(4) as u64;
                    let m = h.part_len(r - 1) as u64;
                    let b = min_part.min(m).max(1);
                    let p = ParamPack::new(&h, m, b, 1, rat(1)).unwrap();
                    let t = delta_table(&h, &p);
                    for ((x, v), val) in t.entries() {
                        assert_eq!(val, &delta_closed_form(&h, &p, x, v), "seed {seed} x {x:?} v {v:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn delta_agreement_sweep() {
        let d = delta_agreement(9, 10, 3, 3, Exec::default());
        assert_eq!(d.hypergraphs, 90);
        assert_eq!(d.mismatches, 0);
        assert!(d.entries > 0);
    }

    #[test]
    fn empty_set_round_uses_only_w() {
        let (_, f) = z7();
        let h = PartedHypergraph::triple(&f, &f, &f).unwrap();
        let p = ParamPack::new(&h, 7, 2, 2, rat(4)).unwrap();
        let t = delta_table(&h, &p);
        let out = algorithm_round(&h, h.edges(), &[1, 1, 1], &vec![false; 21], &p, &t).unwrap();
        assert!(out.s_idx.is_empty());
        assert!(out.g_star.is_empty());
        assert_eq!(out.w_idx.len(), out.l);
        assert!(out.failures.is_empty(), "{:?}", out.failures);
    }

    #[test]
    fn single_edge_round() {
        let mut h = PartedHypergraph::new(vec![vec![0, 1], vec![0, 1]], vec![1, 1]).unwrap();
        h.add_edge(vec![1, 2], 1).unwrap();
        let p = ParamPack::new(&h, 2, 1, 1, rat(1)).unwrap();
        let t = delta_table(&h, &p);
        let mut member = vec![false; 4];
        member[1] = true;
        let out = algorithm_round(&h, h.edges(), &[1, 1], &member, &p, &t).unwrap();
        assert_eq!(out.u_seq[0], 1);
        assert_eq!(out.s_idx, vec![0]);
        assert_eq!(out.g_star.get(&vec![2]), Some(&1));
    }

    #[test]
    fn round_depends_only_on_selected_members() {
        // two inputs that agree on every selected vertex give the same output
        let mut h = PartedHypergraph::new(vec![vec![0, 1], vec![0, 1]], vec![1, 1]).unwrap();
        h.add_edge(vec![0, 2], 2).unwrap();
        h.add_edge(vec![1, 3], 1).unwrap();
        let p = ParamPack::new(&h, 2, 1, 1, rat(1)).unwrap();
        let t = delta_table(&h, &p);
        let mut a = vec![false; 4];
        a[0] = true;
        let mut b = a.clone();
        b[3] = true;
        let oa = algorithm_round(&h, h.edges(), &[1, 1], &a, &p, &t).unwrap();
        let ob = algorithm_round(&h, h.edges(), &[1, 1], &b, &p, &t).unwrap();
        assert_eq!(oa.s_idx.len(), 1);
        assert_eq!(oa, ob);
    }

    #[test]
    fn non_independent_input_rejected() {
        let mut h = PartedHypergraph::new(vec![vec![0], vec![0]], vec![1, 1]).unwrap();
        h.add_edge(vec![0, 1], 1).unwrap();
        let p = ParamPack::new(&h, 1, 1, 1, rat(1)).unwrap();
        let t = delta_table(&h, &p);
        assert_eq!(build_container(&h, &[0, 1], &p, &t), Err(ContainerError::NotIndependent));
        assert_eq!(build_container(&h, &[0], &p, &t).unwrap().container.len(), 2);
    }

    #[test]
    fn z7_small_sample_is_clean() {
        let (g, f) = z7();
        let h = PartedHypergraph::triple(&f, &f, &f).unwrap();
        let p = ParamPack::new(&h, 2, 2, 2, rat(4)).unwrap();
        let all = triple_independent_sets(&h, g, 2);
        let sample: Vec<_> = all.iter().step_by(37).cloned().collect();
        let rep = verify_container_properties(&h, &p, &sample, Exec::default()).unwrap();
        assert_eq!(rep.total_failures(), 0, "{rep:?}");
        assert_eq!(verify_container_properties(&h, &p, &[], Exec::default()).unwrap().inputs, 0);
    }

    #[test]
    fn alternative_order_is_deterministic() {
        let (g, f) = z7();
        let h = PartedHypergraph::triple(&f, &f, &f).unwrap();
        let order: Vec<Vertex> = (0..21).rev().collect();
        let h2 = h.clone().with_order(&order).unwrap();
        let p = ParamPack::new(&h2, 2, 2, 2, rat(4)).unwrap();
        let sample: Vec<_> = triple_independent_sets(&h2, g, 2).into_iter().step_by(53).collect();
        let rep = verify_container_properties(&h2, &p, &sample, Exec::Sequential).unwrap();
        assert_eq!(rep.total_failures(), 0, "{rep:?}");
    }
}
