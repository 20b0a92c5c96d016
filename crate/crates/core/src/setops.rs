//! Finite sets in a [`GroupCtx`], sumsets, restricted sumsets along a link
//! graph, and arithmetic-progression fitting.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::group::{GroupCtx, GroupError};

/// Universes up to this many bits get a dense bitset; larger ones fall back
/// to sorted merging.
pub const DENSE_CUTOFF_BITS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetError {
    #[error("sets live in different groups ({0} vs {1})")]
    GroupMismatch(GroupCtx, GroupCtx),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("operation requires a nonempty set")]
    Empty,
    #[error("operation is only defined over the integers")]
    NotIntegers,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("link graph index ({0}, {1}) out of range")]
    OutOfRange(usize, usize),
}

// ---------------------------------------------------------------------------
// dense bits

#[derive(Debug, Clone, PartialEq, Eq)]
struct DenseBits {
    offset: i64,
    nbits: usize,
    words: Vec<u64>,
}

impl DenseBits {
    fn zeros(offset: i64, nbits: usize) -> Self {
        DenseBits {
            offset,
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    fn from_sorted(offset: i64, nbits: usize, elems: &[i64]) -> Self {
        let mut b = Self::zeros(offset, nbits);
        for &x in elems {
            let p = (x - offset) as usize;
            b.words[p / 64] |= 1 << (p % 64);
        }
        b
    }

    fn contains(&self, x: i64) -> bool {
        if x < self.offset {
            return false;
        }
        let p = (x - self.offset) as u64;
        if p >= self.nbits as u64 {
            return false;
        }
        let p = p as usize;
        self.words[p / 64] >> (p % 64) & 1 == 1
    }

    fn ones(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let t = w.trailing_zeros() as usize;
                out.push(self.offset + (wi * 64 + t) as i64);
                w &= w - 1;
            }
        }
        out
    }

    /// `self |= src << shift`, dropping bits past `self.nbits`.
    fn or_shifted_left(&mut self, src: &DenseBits, shift: usize) {
        let ws = shift / 64;
        let bs = shift % 64;
        for (i, &w) in src.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let d = i + ws;
            if d < self.words.len() {
                self.words[d] |= w << bs;
            }
            if bs > 0 && d + 1 < self.words.len() {
                self.words[d + 1] |= w >> (64 - bs);
            }
        }
        self.mask_tail();
    }

    /// `self |= src >> shift`.
    fn or_shifted_right(&mut self, src: &DenseBits, shift: usize) {
        let ws = shift / 64;
        let bs = shift % 64;
        for d in 0..self.words.len() {
            let i = d + ws;
            if i >= src.words.len() {
                break;
            }
            let mut w = src.words[i] >> bs;
            if bs > 0 && i + 1 < src.words.len() {
                w |= src.words[i + 1] << (64 - bs);
            }
            self.words[d] |= w;
        }
        self.mask_tail();
    }

    fn mask_tail(&mut self) {
        let extra = self.words.len() * 64 - self.nbits;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ElemSet

/// A finite subset of a group: sorted, distinct, canonical elements.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "ElemSetRepr", into = "ElemSetRepr")]
pub struct ElemSet {
    group: GroupCtx,
    elems: Vec<i64>,
    bits: Option<DenseBits>,
}

#[derive(Serialize, Deserialize)]
struct ElemSetRepr {
    group: GroupCtx,
    elements: Vec<i64>,
}

impl TryFrom<ElemSetRepr> for ElemSet {
    type Error = SetError;
    fn try_from(r: ElemSetRepr) -> Result<Self, SetError> {
        ElemSet::new(r.group, r.elements)
    }
}

impl From<ElemSet> for ElemSetRepr {
    fn from(s: ElemSet) -> Self {
        ElemSetRepr {
            group: s.group,
            elements: s.elems,
        }
    }
}

impl PartialEq for ElemSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elems == other.elems
    }
}
impl Eq for ElemSet {}

impl std::hash::Hash for ElemSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.hash(state);
        self.elems.hash(state);
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.elems.cmp(&other.elems)
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.group)?;
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl ElemSet {
    /// Builds a set; cyclic elements are reduced mod `n`, duplicates dropped.
    pub fn new<I: IntoIterator<Item = i64>>(group: GroupCtx, elems: I) -> Result<Self, SetError> {
        let mut v: Vec<i64> = elems.into_iter().map(|x| group.reduce(x)).collect();
        v.sort_unstable();
        v.dedup();
        Ok(Self::from_canonical(group, v))
    }

    pub fn empty(group: GroupCtx) -> Self {
        Self::from_canonical(group, Vec::new())
    }

    /// Integer interval `{lo, ..., hi}` (empty when `hi < lo`).
    pub fn interval(lo: i64, hi: i64) -> Self {
        Self::from_canonical(GroupCtx::integers(), (lo..=hi).collect())
    }

    /// `{start + k*diff : 0 <= k < len}` in `group`.
    pub fn progression(group: GroupCtx, start: i64, diff: i64, len: usize) -> Result<Self, SetError> {
        let mut v = Vec::with_capacity(len);
        let mut x = group.reduce(start);
        for _ in 0..len {
            v.push(x);
            x = group.add(x, group.reduce(diff))?;
        }
        Self::new(group, v)
    }

    fn from_canonical(group: GroupCtx, elems: Vec<i64>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        let bits = match (group.modulus(), elems.first(), elems.last()) {
            (Some(n), _, _) if (n as usize) <= DENSE_CUTOFF_BITS => {
                Some(DenseBits::from_sorted(0, n as usize, &elems))
            }
            (None, Some(&lo), Some(&hi)) => {
                let span = (hi as i128 - lo as i128 + 1) as u128;
                (span <= DENSE_CUTOFF_BITS as u128)
                    .then(|| DenseBits::from_sorted(lo, span as usize, &elems))
            }
            _ => None,
        };
        ElemSet { group, elems, bits }
    }

    pub fn group(&self) -> GroupCtx {
        self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[i64] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.elems.iter().copied()
    }

    pub fn min_elem(&self) -> Option<i64> {
        self.elems.first().copied()
    }

    pub fn max_elem(&self) -> Option<i64> {
        self.elems.last().copied()
    }

    pub fn contains(&self, x: i64) -> bool {
        match &self.bits {
            Some(b) => b.contains(x),
            None => self.elems.binary_search(&x).is_ok(),
        }
    }

    pub fn has_dense_cache(&self) -> bool {
        self.bits.is_some()
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.group == other.group && self.elems.iter().all(|&x| other.contains(x))
    }

    pub fn translate(&self, t: i64) -> Result<ElemSet, SetError> {
        let v = self
            .elems
            .iter()
            .map(|&x| self.group.add(x, t))
            .collect::<Result<Vec<_>, _>>()?;
        ElemSet::new(self.group, v)
    }

    pub fn union(&self, other: &ElemSet) -> Result<ElemSet, SetError> {
        same_group(self, other)?;
        ElemSet::new(self.group, self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &ElemSet) -> Result<ElemSet, SetError> {
        same_group(self, other)?;
        let v: Vec<i64> = self.iter().filter(|&x| !other.contains(x)).collect();
        Ok(ElemSet::from_canonical(self.group, v))
    }

    pub fn intersection_len(&self, other: &ElemSet) -> usize {
        self.iter().filter(|&x| other.contains(x)).count()
    }

    /// Parses one integer per line (blank lines and `#` comments ignored) or a
    /// JSON array.
    pub fn parse_text(group: GroupCtx, text: &str) -> Result<ElemSet, SetError> {
        let t = text.trim();
        if t.starts_with('[') {
            let v: Vec<i64> = serde_json::from_str(t).map_err(|e| SetError::Parse(e.to_string()))?;
            return ElemSet::new(group, v);
        }
        let mut v = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let x = line
                .parse::<i64>()
                .map_err(|e| SetError::Parse(format!("line {}: {e}", lineno + 1)))?;
            v.push(x);
        }
        ElemSet::new(group, v)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for x in &self.elems {
            s.push_str(&x.to_string());
            s.push('\n');
        }
        s
    }
}

fn same_group(a: &ElemSet, b: &ElemSet) -> Result<(), SetError> {
    if a.group != b.group {
        Err(SetError::GroupMismatch(a.group, b.group))
    } else {
        Ok(())
    }
}

fn require_integers(x: &ElemSet) -> Result<(), SetError> {
    if x.group.is_integers() {
        Ok(())
    } else {
        Err(SetError::NotIntegers)
    }
}

// ---------------------------------------------------------------------------
// sumsets

/// `{x + y : x in a, y in b}`.
pub fn sumset(a: &ElemSet, b: &ElemSet) -> Result<ElemSet, SetError> {
    sumset_with_cutoff(a, b, DENSE_CUTOFF_BITS)
}

/// [`sumset`] with an explicit dense-universe cutoff (in bits).
pub fn sumset_with_cutoff(a: &ElemSet, b: &ElemSet, cutoff: usize) -> Result<ElemSet, SetError> {
    same_group(a, b)?;
    let g = a.group;
    if a.is_empty() || b.is_empty() {
        return Ok(ElemSet::empty(g));
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    match g.modulus() {
        Some(n) if (n as usize) <= cutoff => {
            let n = n as usize;
            let src = DenseBits::from_sorted(0, n, &large.elems);
            let mut out = DenseBits::zeros(0, n);
            for &x in &small.elems {
                let x = x as usize;
                out.or_shifted_left(&src, x);
                if x > 0 {
                    out.or_shifted_right(&src, n - x);
                }
            }
            Ok(ElemSet::from_canonical(g, out.ones()))
        }
        Some(_) => sumset_merge(small, large),
        None => {
            let lo = g.add(a.elems[0], b.elems[0])?;
            let hi = g.add(*a.elems.last().unwrap(), *b.elems.last().unwrap())?;
            let span = hi as i128 - lo as i128 + 1;
            if span as u128 > cutoff as u128 {
                return sumset_merge(small, large);
            }
            let lmin = large.elems[0];
            let smin = small.elems[0];
            let src = DenseBits::from_sorted(lmin, (large.elems[large.len() - 1] - lmin + 1) as usize, &large.elems);
            let mut out = DenseBits::zeros(lo, span as usize);
            for &x in &small.elems {
                out.or_shifted_left(&src, (x - smin) as usize);
            }
            Ok(ElemSet::from_canonical(g, out.ones()))
        }
    }
}

fn sumset_merge(small: &ElemSet, large: &ElemSet) -> Result<ElemSet, SetError> {
    let g = small.group;
    let mut v = Vec::with_capacity(small.len() * large.len());
    for &x in &small.elems {
        for &y in &large.elems {
            v.push(g.add(x, y)?);
        }
    }
    ElemSet::new(g, v)
}

/// `r_{U,V}(x)` for every `x` in `U + V`.
pub fn rep_counts(u: &ElemSet, v: &ElemSet) -> Result<BTreeMap<i64, u64>, SetError> {
    same_group(u, v)?;
    let g = u.group;
    let mut out = BTreeMap::new();
    for &a in &u.elems {
        for &b in &v.elems {
            *out.entry(g.add(a, b)?).or_insert(0) += 1;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// link graphs

/// A bipartite link set `Γ ⊆ U × V` stored as a row-major bit matrix indexed
/// by element positions.
#[derive(Clone, PartialEq, Eq)]
pub struct LinkGraph {
    left: ElemSet,
    right: ElemSet,
    stride: usize,
    rows: Vec<u64>,
}

impl fmt::Debug for LinkGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinkGraph")
            .field("left", &self.left)
            .field("right", &self.right)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl LinkGraph {
    pub fn empty(left: ElemSet, right: ElemSet) -> Result<Self, SetError> {
        same_group(&left, &right)?;
        let stride = right.len().div_ceil(64);
        let rows = vec![0; stride * left.len()];
        Ok(LinkGraph {
            left,
            right,
            stride,
            rows,
        })
    }

    pub fn complete(left: ElemSet, right: ElemSet) -> Result<Self, SetError> {
        Self::from_predicate(left, right, |_, _| true)
    }

    /// Edge `(i, j)` present iff `keep(i, j)`, with indices into the sorted sets.
    pub fn from_predicate<F: FnMut(usize, usize) -> bool>(
        left: ElemSet,
        right: ElemSet,
        mut keep: F,
    ) -> Result<Self, SetError> {
        let mut g = Self::empty(left, right)?;
        for i in 0..g.left.len() {
            for j in 0..g.right.len() {
                if keep(i, j) {
                    g.set(i, j, true);
                }
            }
        }
        Ok(g)
    }

    pub fn left(&self) -> &ElemSet {
        &self.left
    }

    pub fn right(&self) -> &ElemSet {
        &self.right
    }

    pub fn group(&self) -> GroupCtx {
        self.left.group
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        let w = &mut self.rows[i * self.stride + j / 64];
        if on {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn try_set(&mut self, i: usize, j: usize, on: bool) -> Result<(), SetError> {
        if i >= self.left.len() || j >= self.right.len() {
            return Err(SetError::OutOfRange(i, j));
        }
        self.set(i, j, on);
        Ok(())
    }

    pub fn left_degree(&self, i: usize) -> usize {
        self.rows[i * self.stride..(i + 1) * self.stride]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn right_degree(&self, j: usize) -> usize {
        (0..self.left.len()).filter(|&i| self.has(i, j)).count()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.left.len() * self.right.len()
    }

    /// Edges as index pairs in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.left.len())
            .flat_map(move |i| (0..self.right.len()).filter(move |&j| self.has(i, j)).map(move |j| (i, j)))
    }

    /// Swaps the roles of the two sides.
    pub fn transposed(&self) -> LinkGraph {
        let mut t = LinkGraph::empty(self.right.clone(), self.left.clone())
            .expect("same group by construction");
        for (i, j) in self.edges() {
            t.set(j, i, true);
        }
        t
    }

    /// Adds every edge of `other` (same sides required).
    pub fn is_subgraph_of(&self, other: &LinkGraph) -> bool {
        self.left == other.left
            && self.right == other.right
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }
}

/// `U +^Γ V = {u + v : (u, v) ∈ Γ}`.
pub fn restricted_sumset(g: &LinkGraph) -> Result<ElemSet, SetError> {
    let grp = g.group();
    let mut v = Vec::with_capacity(g.edge_count());
    for (i, j) in g.edges() {
        v.push(grp.add(g.left.elems[i], g.right.elems[j])?);
    }
    ElemSet::new(grp, v)
}

// ---------------------------------------------------------------------------
// integer normalisation, hulls

/// Affine data recorded by [`normalize`]: `u' = (u - left_shift) / scale`,
/// `v' = (v - right_shift) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transform {
    pub left_shift: i64,
    pub right_shift: i64,
    pub scale: i64,
}

impl Transform {
    /// Image of a sum `u + v` under the transform.
    pub fn map_sum(&self, x: i64) -> i64 {
        (x - self.left_shift - self.right_shift) / self.scale
    }

    /// Preimage of a normalized sum.
    pub fn unmap_sum(&self, x: i64) -> i64 {
        x * self.scale + self.left_shift + self.right_shift
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub left: ElemSet,
    pub right: ElemSet,
    pub transform: Transform,
}

/// Translates both sets to start at 0 and divides out `gcd(U' ∪ V')`.
/// The divisor is taken as 1 when both sets are singletons.
pub fn normalize(u: &ElemSet, v: &ElemSet) -> Result<Normalized, SetError> {
    same_group(u, v)?;
    require_integers(u)?;
    let (umin, vmin) = match (u.min_elem(), v.min_elem()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(SetError::Empty),
    };
    let g = u
        .iter()
        .map(|x| x - umin)
        .chain(v.iter().map(|x| x - vmin))
        .fold(0i64, |acc, x| acc.gcd(&x));
    let scale = if g == 0 { 1 } else { g };
    let z = GroupCtx::integers();
    Ok(Normalized {
        left: ElemSet::new(z, u.iter().map(|x| (x - umin) / scale))?,
        right: ElemSet::new(z, v.iter().map(|x| (x - vmin) / scale))?,
        transform: Transform {
            left_shift: umin,
            right_shift: vmin,
            scale,
        },
    })
}

/// `ℓ(X) = max X - min X + 1`.
pub fn hull_len(x: &ElemSet) -> Result<u64, SetError> {
    require_integers(x)?;
    match (x.min_elem(), x.max_elem()) {
        (Some(lo), Some(hi)) => Ok((hi - lo) as u64 + 1),
        _ => Err(SetError::Empty),
    }
}

/// `h(X) = ℓ(X) - |X| + 1`; a full interval therefore has one hole.
pub fn holes(x: &ElemSet) -> Result<u64, SetError> {
    Ok(hull_len(x)? - x.len() as u64 + 1)
}

// ---------------------------------------------------------------------------
// arithmetic progressions

/// `{start + k*diff : 0 <= k < len}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApWindow {
    pub start: i64,
    pub diff: i64,
    pub len: u64,
}

impl ApWindow {
    pub fn member(&self, k: u64) -> i64 {
        self.start + k as i64 * self.diff
    }

    /// Membership in the integers.
    pub fn contains(&self, x: i64) -> bool {
        if self.diff == 0 {
            return self.len > 0 && x == self.start;
        }
        let off = x - self.start;
        if off % self.diff != 0 {
            return false;
        }
        let k = off / self.diff;
        k >= 0 && (k as u64) < self.len
    }

    pub fn members(&self, group: GroupCtx) -> Vec<i64> {
        (0..self.len)
            .map(|k| group.reduce(self.start + k as i64 * self.diff))
            .collect()
    }

    pub fn coverage(&self, x: &ElemSet) -> usize {
        x.iter().filter(|&e| self.contains(e)).count()
    }
}

/// A progression together with how many points of the target set it covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApCover {
    pub window: ApWindow,
    pub covered: usize,
}

/// Best cover of sorted `xs` by an AP of difference `d` and length at most
/// `cap`. The window is trimmed to start and end on covered points; ties go
/// to the smaller start.
fn cover_for_diff(xs: &[i64], d: i64, cap: u64, scratch: &mut Vec<(i64, i64, i64)>) -> ApCover {
    let base = xs[0];
    scratch.clear();
    scratch.extend(xs.iter().map(|&x| ((x - base) % d, (x - base) / d, x)));
    // xs is sorted, so a stable sort by residue keeps each class ascending
    scratch.sort_by_key(|e| e.0);
    let mut best = ApCover {
        window: ApWindow {
            start: xs[0],
            diff: d,
            len: 1,
        },
        covered: 1,
    };
    let b = &scratch[..];
    let mut i = 0;
    for j in 0..b.len() {
        if b[j].0 != b[i].0 {
            i = j;
        }
        while (b[j].1 - b[i].1) as u64 >= cap {
            i += 1;
        }
        let cnt = j - i + 1;
        let start = b[i].2;
        if cnt > best.covered || (cnt == best.covered && start < best.window.start) {
            best = ApCover {
                window: ApWindow {
                    start,
                    diff: d,
                    len: (b[j].1 - b[i].1) as u64 + 1,
                },
                covered: cnt,
            };
        }
    }
    best
}

/// For every difference `1..=max_diff`, the best cover of `x` with length at
/// most `cap`. Entry `k` is for difference `k + 1`.
pub fn ap_cover_profile(x: &ElemSet, cap: u64, max_diff: u64) -> Result<Vec<ApCover>, SetError> {
    require_integers(x)?;
    if x.is_empty() {
        return Err(SetError::Empty);
    }
    let cap = cap.max(1);
    let mut scratch = Vec::with_capacity(x.len());
    Ok((1..=max_diff.max(1) as i64)
        .map(|d| cover_for_diff(&x.elems, d, cap, &mut scratch))
        .collect())
}

/// AP of length at most `max_len` maximising `|x ∩ P|`; ties by smaller
/// difference, then smaller start.
pub fn best_ap_cover(x: &ElemSet, max_len: u64) -> Result<ApCover, SetError> {
    let l = hull_len(x)?;
    let prof = ap_cover_profile(x, max_len, l)?;
    Ok(pick_best(prof.into_iter()))
}

fn pick_best<I: Iterator<Item = ApCover>>(it: I) -> ApCover {
    let mut best: Option<ApCover> = None;
    for c in it {
        match &best {
            Some(b) if c.covered <= b.covered => {}
            _ => best = Some(c),
        }
    }
    best.expect("nonempty profile")
}

/// Two progressions sharing one common difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointApCover {
    pub first: ApCover,
    pub second: ApCover,
}

impl JointApCover {
    pub fn diff(&self) -> i64 {
        self.first.window.diff
    }

    pub fn total(&self) -> usize {
        self.first.covered + self.second.covered
    }
}

fn joint_profiles(
    x1: &ElemSet,
    x2: &ElemSet,
    cap1: u64,
    cap2: u64,
) -> Result<(Vec<ApCover>, Vec<ApCover>), SetError> {
    same_group(x1, x2)?;
    let dmax = hull_len(x1)?.max(hull_len(x2)?);
    Ok((ap_cover_profile(x1, cap1, dmax)?, ap_cover_profile(x2, cap2, dmax)?))
}

/// Pair of APs with a common difference maximising `covered1 + covered2`
/// under the two length caps; ties by smaller difference, then starts.
pub fn best_joint_ap_cover(
    x1: &ElemSet,
    x2: &ElemSet,
    cap1: u64,
    cap2: u64,
) -> Result<JointApCover, SetError> {
    let (p1, p2) = joint_profiles(x1, x2, cap1, cap2)?;
    let mut best: Option<JointApCover> = None;
    for (a, b) in p1.into_iter().zip(p2) {
        let c = JointApCover { first: a, second: b };
        match &best {
            Some(bb) if c.total() <= bb.total() => {}
            _ => best = Some(c),
        }
    }
    Ok(best.expect("nonempty profile"))
}

/// Joint cover meeting both coverage thresholds, preferring larger total and
/// then smaller difference. `None` if no common difference works.
pub fn joint_ap_witness(
    x1: &ElemSet,
    x2: &ElemSet,
    cap1: u64,
    cap2: u64,
    need1: usize,
    need2: usize,
) -> Result<Option<JointApCover>, SetError> {
    same_group(x1, x2)?;
    require_integers(x1)?;
    let dmax = hull_len(x1)?.max(hull_len(x2)?) as i64;
    let (cap1, cap2) = (cap1.max(1), cap2.max(1));
    if need1 as u64 > cap1 || need2 as u64 > cap2 || need1 > x1.len() || need2 > x2.len() {
        return Ok(None);
    }
    let mut counts = vec![0u32; dmax as usize];
    let mut scratch = Vec::new();
    // largest residue class of `xs` mod d bounds the coverage for d
    let class_bound = |xs: &[i64], d: i64, counts: &mut Vec<u32>| -> usize {
        let base = xs[0];
        let mut best = 0;
        for &x in xs {
            let r = ((x - base) % d) as usize;
            counts[r] += 1;
            best = best.max(counts[r]);
        }
        for &x in xs {
            counts[((x - base) % d) as usize] = 0;
        }
        best as usize
    };
    let mut best: Option<JointApCover> = None;
    for d in 1..=dmax {
        if class_bound(&x1.elems, d, &mut counts) < need1 || class_bound(&x2.elems, d, &mut counts) < need2 {
            continue;
        }
        let a = cover_for_diff(&x1.elems, d, cap1, &mut scratch);
        if a.covered < need1 {
            continue;
        }
        let b = cover_for_diff(&x2.elems, d, cap2, &mut scratch);
        if b.covered < need2 {
            continue;
        }
        let c = JointApCover { first: a, second: b };
        match &best {
            Some(bb) if c.total() <= bb.total() => {}
            _ => best = Some(c),
        }
    }
    Ok(best)
}
