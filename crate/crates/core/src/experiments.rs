//! Exact enumeration and sampling of pairs `(X_1, X_2)` with small sumset,
//! plus the structure and counting reports built on them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combin::{binom, k_subsets, mask_indices};
use crate::exec::Exec;
use crate::group::GroupCtx;
use crate::oracles::instance_rng;
use crate::setops::{best_joint_ap_cover, ElemSet, SetError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("exact enumeration needs {needed} pairs, above the budget {budget}; use sampling")]
    Budget { needed: String, budget: u64 },
    #[error("no admissible pair exists for these parameters")]
    NoAdmissible,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Sizes and ground set for a pair experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSpec {
    pub group: GroupCtx,
    pub n: usize,
    pub s1: usize,
    pub s2: usize,
    pub m: usize,
}

impl PairSpec {
    pub fn new(group: GroupCtx, n: usize, s1: usize, s2: usize, m: usize) -> Result<Self, ExperimentError> {
        if n == 0 || n > 64 {
            return Err(ExperimentError::Config(format!("n = {n} must lie in 1..=64")));
        }
        if s1 > n || s2 > n {
            return Err(ExperimentError::Config("s1 and s2 must not exceed n".into()));
        }
        if let Some(order) = group.order() {
            if (n as u64) > order {
                return Err(ExperimentError::Config(format!("n = {n} exceeds the group order {order}")));
            }
        }
        Ok(PairSpec { group, n, s1, s2, m })
    }

    /// `{1..n}` in the integers, `{0..n-1}` in a cyclic group.
    pub fn ground(&self) -> Vec<i64> {
        if self.group.is_integers() {
            (1..=self.n as i64).collect()
        } else {
            (0..self.n as i64).collect()
        }
    }

    pub fn ground_set(&self) -> ElemSet {
        ElemSet::new(self.group, self.ground()).expect("ground is valid")
    }

    pub fn total_pairs(&self) -> BigUint {
        binom(self.n as u64, self.s1 as u64) * binom(self.n as u64, self.s2 as u64)
    }
}

/// A pair of sets given by their elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub x1: Vec<i64>,
    pub x2: Vec<i64>,
}

/// Sumset size of two ground-set bitmasks. Bit `i` is the `i`-th ground element.
struct MaskSum {
    cyclic: Option<u32>,
}

impl MaskSum {
    fn new(spec: &PairSpec) -> Option<Self> {
        match spec.group.modulus() {
            None => Some(MaskSum { cyclic: None }),
            Some(n) if n <= 64 => Some(MaskSum { cyclic: Some(n as u32) }),
            Some(_) => None,
        }
    }

    fn size(&self, a: u64, b: u64) -> u32 {
        match self.cyclic {
            None => {
                let mut acc: u128 = 0;
                let mut bits = a;
                while bits != 0 {
                    let i = bits.trailing_zeros();
                    acc |= (b as u128) << i;
                    bits &= bits - 1;
                }
                acc.count_ones()
            }
            Some(n) => {
                let full: u128 = (1u128 << n) - 1;
                let mut acc: u128 = 0;
                let mut bits = a;
                while bits != 0 {
                    let i = bits.trailing_zeros();
                    let s = (b as u128) << i;
                    acc |= (s | (s >> n)) & full;
                    bits &= bits - 1;
                }
                acc.count_ones()
            }
        }
    }
}

/// Exact counts of pairs by sumset size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumResult {
    pub spec: PairSpec,
    /// Pairs with `|X_1 + X_2| <= m`.
    pub count: u64,
    pub total: u64,
    /// Sumset size -> number of pairs.
    pub histogram: BTreeMap<usize, u64>,
}

impl EnumResult {
    /// Count for another threshold from the same histogram.
    pub fn count_at_most(&self, m: usize) -> u64 {
        self.histogram.range(..=m).map(|(_, c)| c).sum()
    }
}

pub const DEFAULT_BUDGET: u64 = 200_000_000;

fn masks(n: usize, s: usize) -> Vec<u64> {
    k_subsets(n as u32, s as u32).into_iter().map(|m| m as u64).collect()
}

fn unmask(ground: &[i64], mask: u64) -> Vec<i64> {
    mask_indices(mask as u128).into_iter().map(|i| ground[i]).collect()
}

/// Exhaustive count of admissible pairs with a histogram of sumset sizes.
pub fn enumerate_pairs(spec: &PairSpec, budget: u64, exec: Exec) -> Result<EnumResult, ExperimentError> {
    let total = spec.total_pairs();
    if total > BigUint::from(budget) {
        return Err(ExperimentError::Budget { needed: total.to_string(), budget });
    }
    let ms = MaskSum::new(spec).ok_or_else(|| ExperimentError::Config("cyclic modulus above 64".into()))?;
    let (c1, c2) = (masks(spec.n, spec.s1), masks(spec.n, spec.s2));
    let hist = exec.map_reduce(
        &c1,
        || vec![0u64; 2 * spec.n + 1],
        |&a| {
            let mut h = vec![0u64; 2 * spec.n + 1];
            for &b in &c2 {
                h[ms.size(a, b) as usize] += 1;
            }
            h
        },
        |mut x, y| {
            for (p, q) in x.iter_mut().zip(y) {
                *p += q;
            }
            x
        },
    );
    let histogram: BTreeMap<usize, u64> = hist.into_iter().enumerate().filter(|(_, c)| *c > 0).collect();
    let mut r = EnumResult { spec: *spec, count: 0, total: total.to_u64().unwrap_or(u64::MAX), histogram };
    r.count = r.count_at_most(spec.m);
    Ok(r)
}

/// The admissible pairs themselves, in lexicographic mask order.
pub fn list_pairs(spec: &PairSpec, budget: u64) -> Result<Vec<Pair>, ExperimentError> {
    if spec.total_pairs() > BigUint::from(budget) {
        return Err(ExperimentError::Budget { needed: spec.total_pairs().to_string(), budget });
    }
    let ms = MaskSum::new(spec).ok_or_else(|| ExperimentError::Config("cyclic modulus above 64".into()))?;
    let g = spec.ground();
    let (c1, c2) = (masks(spec.n, spec.s1), masks(spec.n, spec.s2));
    let mut out = Vec::new();
    for &a in &c1 {
        for &b in &c2 {
            if ms.size(a, b) as usize <= spec.m {
                out.push(Pair { x1: unmask(&g, a), x2: unmask(&g, b) });
            }
        }
    }
    Ok(out)
}

/// Independent oracle: sets as `BTreeSet`s and a plain double loop, giving
/// sumset size -> number of pairs.
pub fn naive_histogram(spec: &PairSpec) -> BTreeMap<usize, u64> {
    let g = spec.ground();
    let subsets = |s: usize| -> Vec<Vec<i64>> {
        (0u64..1 << spec.n)
            .filter(|m| m.count_ones() as usize == s)
            .map(|m| (0..spec.n).filter(|i| m >> i & 1 == 1).map(|i| g[i]).collect())
            .collect()
    };
    let mut hist = BTreeMap::new();
    let (c1, c2) = (subsets(spec.s1), subsets(spec.s2));
    for x1 in &c1 {
        for x2 in &c2 {
            let mut sums = BTreeSet::new();
            for &a in x1 {
                for &b in x2 {
                    sums.insert(spec.group.reduce(a + b));
                }
            }
            *hist.entry(sums.len()).or_insert(0) += 1;
        }
    }
    hist
}

pub fn naive_count(spec: &PairSpec) -> u64 {
    naive_histogram(spec).range(..=spec.m).map(|(_, c)| c).sum()
}

fn sumset_len(group: GroupCtx, x1: &[i64], x2: &[i64]) -> usize {
    let mut s = BTreeSet::new();
    for &a in x1 {
        for &b in x2 {
            s.insert(group.reduce(a + b));
        }
    }
    s.len()
}

// ---------------------------------------------------------------------------
// sampling

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    /// Exactly uniform over admissible pairs.
    Rejection,
    /// Replace-one-element walk on admissible pairs; approximately uniform.
    SwapChain { burn_in: u64, thinning: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutput {
    pub spec: PairSpec,
    pub seed: u64,
    pub sampler: Sampler,
    pub pilot_acceptance: f64,
    pub exactly_uniform: bool,
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleOptions {
    pub trials: usize,
    pub seed: u64,
    /// Rejection is used when the pilot acceptance rate is at least this.
    pub acceptance_floor: f64,
    pub pilot: usize,
    pub max_attempts: u64,
}

impl SampleOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        SampleOptions { trials, seed, acceptance_floor: 1e-3, pilot: 4000, max_attempts: 1_000_000 }
    }
}

fn draw(rng: &mut impl Rng, g: &[i64], s: usize) -> Vec<i64> {
    let mut v: Vec<i64> = sample(rng, g.len(), s).into_iter().map(|i| g[i]).collect();
    v.sort_unstable();
    v
}

/// Uniform sampling by rejection when admissible pairs are common enough,
/// otherwise a swap-chain walk started from aligned intervals.
pub fn sample_pairs(spec: &PairSpec, opts: &SampleOptions, exec: Exec) -> Result<SampleOutput, ExperimentError> {
    if opts.trials == 0 {
        return Err(ExperimentError::Config("trials must be at least 1".into()));
    }
    let g = spec.ground();
    let admissible = |x1: &[i64], x2: &[i64]| sumset_len(spec.group, x1, x2) <= spec.m;
    let mut pilot_rng = instance_rng(opts.seed, u64::MAX);
    let hits = (0..opts.pilot)
        .filter(|_| {
            let x1 = draw(&mut pilot_rng, &g, spec.s1);
            let x2 = draw(&mut pilot_rng, &g, spec.s2);
            admissible(&x1, &x2)
        })
        .count();
    let rate = hits as f64 / opts.pilot.max(1) as f64;
    if rate >= opts.acceptance_floor && hits > 0 {
        let drawn: Vec<Option<Pair>> = exec.map_range(opts.trials, |i| {
            let mut rng = instance_rng(opts.seed, i as u64);
            for _ in 0..opts.max_attempts {
                let x1 = draw(&mut rng, &g, spec.s1);
                let x2 = draw(&mut rng, &g, spec.s2);
                if admissible(&x1, &x2) {
                    return Some(Pair { x1, x2 });
                }
            }
            None
        });
        let pairs = drawn.into_iter().collect::<Option<Vec<_>>>().ok_or(ExperimentError::NoAdmissible)?;
        return Ok(SampleOutput {
            spec: *spec,
            seed: opts.seed,
            sampler: Sampler::Rejection,
            pilot_acceptance: rate,
            exactly_uniform: true,
            pairs,
        });
    }
    let start = start_state(spec).ok_or(ExperimentError::NoAdmissible)?;
    let burn_in = 20 * (spec.n * (spec.s1 + spec.s2)) as u64;
    let thinning = (2 * spec.n) as u64;
    let mut rng = instance_rng(opts.seed, 0);
    let (mut x1, mut x2) = start;
    let step = |rng: &mut rand_chacha::ChaCha8Rng, x1: &mut Vec<i64>, x2: &mut Vec<i64>| {
        let first = rng.gen_bool(0.5);
        let (x, y) = if first { (x1.clone(), &*x2) } else { (x2.clone(), &*x1) };
        if x.is_empty() || x.len() == g.len() {
            return;
        }
        let out = rng.gen_range(0..x.len());
        let outside: Vec<i64> = g.iter().copied().filter(|e| !x.contains(e)).collect();
        let inn = outside[rng.gen_range(0..outside.len())];
        let mut cand = x.clone();
        cand[out] = inn;
        cand.sort_unstable();
        if sumset_len(spec.group, &cand, y) <= spec.m {
            if first {
                *x1 = cand;
            } else {
                *x2 = cand;
            }
        }
    };
    for _ in 0..burn_in {
        step(&mut rng, &mut x1, &mut x2);
    }
    let mut pairs = Vec::with_capacity(opts.trials);
    for _ in 0..opts.trials {
        for _ in 0..thinning {
            step(&mut rng, &mut x1, &mut x2);
        }
        pairs.push(Pair { x1: x1.clone(), x2: x2.clone() });
    }
    Ok(SampleOutput {
        spec: *spec,
        seed: opts.seed,
        sampler: Sampler::SwapChain { burn_in, thinning },
        pilot_acceptance: rate,
        exactly_uniform: false,
        pairs,
    })
}

/// An admissible pair to start the walk: aligned initial segments, then
/// subgroup-sized arithmetic progressions in cyclic groups.
fn start_state(spec: &PairSpec) -> Option<(Vec<i64>, Vec<i64>)> {
    let g = spec.ground();
    let x1: Vec<i64> = g[..spec.s1].to_vec();
    let x2: Vec<i64> = g[..spec.s2].to_vec();
    if sumset_len(spec.group, &x1, &x2) <= spec.m {
        return Some((x1, x2));
    }
    let n = spec.group.modulus()?;
    for h in spec.group.subgroup_sizes() {
        let d = (n / h) as i64;
        if h as usize >= spec.s1.max(spec.s2) && h as usize <= spec.m && (h - 1) as i64 * d < spec.n as i64 {
            let p: Vec<i64> = (0..h as i64).map(|k| k * d).collect();
            return Some((p[..spec.s1].to_vec(), p[..spec.s2].to_vec()));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// structure

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureStat {
    pub len1: u64,
    pub len2: u64,
    pub diff: i64,
    pub covered1: usize,
    pub covered2: usize,
    pub exceptional1: usize,
    pub exceptional2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub caps: (u64, u64),
    pub slack: f64,
    pub pairs: Vec<StructureStat>,
    /// Total exceptional count -> number of pairs.
    pub distribution: BTreeMap<usize, usize>,
    pub median_exceptional: usize,
    pub max_exceptional: usize,
}

/// `floor(s_i m / (s1 + s2) + slack)`.
pub fn structure_caps(s1: usize, s2: usize, m: usize, slack: f64) -> (u64, u64) {
    let tot = (s1 + s2) as f64;
    let cap = |s: usize| ((s as f64 * m as f64 / tot + slack).floor().max(1.0)) as u64;
    (cap(s1), cap(s2))
}

/// Best common-difference AP cover of every pair within the caps.
pub fn structure_report(
    pairs: &[Pair],
    s1: usize,
    s2: usize,
    m: usize,
    slack: f64,
    exec: Exec,
) -> Result<StructureReport, ExperimentError> {
    let (c1, c2) = structure_caps(s1, s2, m, slack);
    let z = GroupCtx::integers();
    let stats: Vec<Result<StructureStat, SetError>> = exec.map(pairs, |p| {
        let a = ElemSet::new(z, p.x1.iter().copied())?;
        let b = ElemSet::new(z, p.x2.iter().copied())?;
        let j = best_joint_ap_cover(&a, &b, c1, c2)?;
        Ok(StructureStat {
            len1: j.first.window.len,
            len2: j.second.window.len,
            diff: j.diff(),
            covered1: j.first.covered,
            covered2: j.second.covered,
            exceptional1: a.len() - j.first.covered,
            exceptional2: b.len() - j.second.covered,
        })
    });
    let stats = stats.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut distribution = BTreeMap::new();
    let mut totals: Vec<usize> = stats.iter().map(|s| s.exceptional1 + s.exceptional2).collect();
    for &t in &totals {
        *distribution.entry(t).or_insert(0) += 1;
    }
    totals.sort_unstable();
    Ok(StructureReport {
        caps: (c1, c2),
        slack,
        median_exceptional: totals.get(totals.len() / 2).copied().unwrap_or(0),
        max_exceptional: totals.last().copied().unwrap_or(0),
        pairs: stats,
        distribution,
    })
}

// ---------------------------------------------------------------------------
// counting

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub spec: PairSpec,
    pub count: u64,
    pub exact: bool,
    pub lambda: f64,
    pub beta_arg: f64,
    pub beta_used: u64,
    pub benchmark: String,
    pub ln_benchmark: f64,
    /// `2^10 m^{1/6} (s1+s2)^{2/3} λ^{2/3} sqrt(ln n)`.
    pub ln_factor: f64,
    pub ln_ratio: f64,
    pub holds: bool,
    pub in_range: bool,
}

/// Natural log of a big integer; `-inf` for zero.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 60;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `min(m / (m - s1 - s2), ln(s1 + s2))`, the first term infinite when `m <= s1 + s2`.
pub fn count_lambda(s1: usize, s2: usize, m: usize) -> f64 {
    let first = if m > s1 + s2 { m as f64 / (m - s1 - s2) as f64 } else { f64::INFINITY };
    first.min(((s1 + s2) as f64).ln())
}

/// Compares a pair count with the binomial benchmark times the growth factor.
pub fn count_report(spec: &PairSpec, count: u64, exact: bool) -> CountReport {
    let (s1, s2, m) = (spec.s1 as f64, spec.s2 as f64, spec.m as f64);
    let st = s1 + s2;
    let ln_n = (spec.n as f64).ln();
    let lambda = count_lambda(spec.s1, spec.s2, spec.m);
    let beta_arg = m + 256.0 * m.powf(7.0 / 6.0) * st.powf(-1.0 / 3.0) * lambda.powf(-1.0 / 3.0) * ln_n.sqrt();
    let beta = spec.group.beta(beta_arg);
    let top = |s: f64| ((s * (m + beta as f64)) / st).floor() as u64;
    let bench = binom(top(s1), spec.s1 as u64) * binom(top(s2), spec.s2 as u64);
    let ln_bench = ln_big(&bench);
    let ln_factor = 1024.0 * m.powf(1.0 / 6.0) * st.powf(2.0 / 3.0) * lambda.powf(2.0 / 3.0) * ln_n.sqrt();
    let ln_count = if count == 0 { f64::NEG_INFINITY } else { (count as f64).ln() };
    let holds = if count == 0 {
        true
    } else if bench.is_zero() {
        false
    } else if ln_factor > 700.0 {
        ln_count <= ln_bench + ln_factor
    } else {
        // exact enough at this size: count <= floor(bench * e^factor)
        (count as f64) <= bench.to_f64().unwrap_or(f64::INFINITY) * ln_factor.exp() * (1.0 + 1e-12)
    };
    CountReport {
        spec: *spec,
        count,
        exact,
        lambda,
        beta_arg,
        beta_used: beta,
        benchmark: bench.to_string(),
        ln_benchmark: ln_bench,
        ln_factor,
        ln_ratio: ln_count - ln_bench,
        holds,
        in_range: spec.s1 + spec.s2 <= spec.m,
    }
}
