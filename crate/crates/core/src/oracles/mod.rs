//! Checkable sumset inequalities and structural statements, plus the
//! instance generators and exhaustive sweeps that exercise them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Exec;
use crate::group::GroupCtx;
use crate::setops::{
    hull_len, normalize, rep_counts, restricted_sumset, sumset, ElemSet, LinkGraph, SetError,
};

pub mod binom;
pub mod stability;

pub use binom::{binom_lemma_check, binom_lemma_grid, BinomGridSpec, BinomVerdict};
pub use stability::{freiman_robust_check, relative_stability_check, RelativeVerdict, StabilityVerdict};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

pub(crate) fn pre(ok: bool, msg: impl FnOnce() -> String) -> Result<(), OracleError> {
    if ok {
        Ok(())
    } else {
        Err(OracleError::Precondition(msg()))
    }
}

/// Deterministic per-instance RNG, independent of scheduling.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

// ---------------------------------------------------------------------------
// alpha / Pollard

/// `max{|V'| : |V'| <= |V|, |<V'>| <= |U| + |V| - |V'|}` from the list of
/// finite subgroup sizes.
pub fn alpha_from_sizes(sizes: &[u64], u_len: usize, v_len: usize) -> u64 {
    let (u, v) = (u_len as i64, v_len as i64);
    sizes
        .iter()
        .map(|&h| (h as i64).min(v).min(u + v - h as i64))
        .max()
        .unwrap_or(0)
        .max(0) as u64
}

pub fn alpha(u: &ElemSet, v: &ElemSet) -> Result<u64, OracleError> {
    if u.group() != v.group() {
        return Err(SetError::GroupMismatch(u.group(), v.group()).into());
    }
    Ok(alpha_from_sizes(&u.group().subgroup_sizes(), u.len(), v.len()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PollardVerdict {
    pub t: u64,
    pub lhs: i64,
    pub rhs: i64,
    pub alpha_used: u64,
    pub holds: bool,
}

/// Both sides of `sum_x min(r(x), t) >= t(|U| + |V| - t - alpha)`.
pub fn pollard_check(u: &ElemSet, v: &ElemSet, t: u64) -> Result<PollardVerdict, OracleError> {
    pre(t >= 1 && t as usize <= v.len() && v.len() <= u.len(), || {
        format!("need 1 <= t <= |V| <= |U|, got t={t}, |V|={}, |U|={}", v.len(), u.len())
    })?;
    let a = alpha(u, v)?;
    let lhs: i64 = rep_counts(u, v)?.values().map(|&r| r.min(t) as i64).sum();
    let rhs = t as i64 * (u.len() as i64 + v.len() as i64 - t as i64 - a as i64);
    Ok(PollardVerdict {
        t,
        lhs,
        rhs,
        alpha_used: a,
        holds: lhs >= rhs,
    })
}

/// Outcome of an exhaustive or randomized sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub instances: u64,
    pub hypothesis_met: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl SweepSummary {
    pub fn merge(mut self, other: SweepSummary) -> SweepSummary {
        self.instances += other.instances;
        self.hypothesis_met += other.hypothesis_met;
        self.violations += other.violations;
        if self.first_violation.is_none() {
            self.first_violation = other.first_violation;
        }
        self
    }

    pub fn hit_rate(&self) -> f64 {
        if self.instances == 0 {
            0.0
        } else {
            self.hypothesis_met as f64 / self.instances as f64
        }
    }

    fn record(&mut self, met: bool, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if met {
            self.hypothesis_met += 1;
        }
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(describe());
            }
        }
    }
}

/// Pollard inequality over every pair of subsets of `{0, ..., width-1}` (read
/// in `group`) with at most `max_size` elements and every valid `t`.
/// `instances` counts (U, V, t) triples.
pub fn pollard_sweep(group: GroupCtx, width: u32, max_size: u32, exec: Exec) -> SweepSummary {
    assert!(width <= 32);
    let masks: Vec<u32> = (1u64..(1u64 << width))
        .map(|m| m as u32)
        .filter(|m| m.count_ones() <= max_size)
        .collect();
    let sizes = group.subgroup_sizes();
    let nsums = match group.modulus() {
        Some(n) => n as usize,
        None => 2 * width as usize,
    };
    let modulus = group.modulus().map(|n| n as usize);
    exec.map_reduce(
        &masks,
        SweepSummary::default,
        |&um| {
            let mut out = SweepSummary::default();
            let ul = um.count_ones() as usize;
            let ub = bits(um);
            let mut r = vec![0u64; nsums];
            for &vm in &masks {
                let vl = vm.count_ones() as usize;
                if vl > ul {
                    continue;
                }
                r.iter_mut().for_each(|c| *c = 0);
                for &a in &ub {
                    let mut w = vm;
                    while w != 0 {
                        let b = w.trailing_zeros() as usize;
                        w &= w - 1;
                        let x = match modulus {
                            Some(n) => (a + b) % n,
                            None => a + b,
                        };
                        r[x] += 1;
                    }
                }
                let al = alpha_from_sizes(&sizes, ul, vl) as i64;
                for t in 1..=vl as u64 {
                    let lhs: i64 = r.iter().map(|&c| c.min(t) as i64).sum();
                    let rhs = t as i64 * (ul as i64 + vl as i64 - t as i64 - al);
                    out.record(true, lhs >= rhs, || format!("U={um:#b} V={vm:#b} t={t}: {lhs} < {rhs}"));
                }
            }
            out
        },
        SweepSummary::merge,
    )
}

fn bits(m: u32) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).collect()
}

// ---------------------------------------------------------------------------
// supersaturation

/// `#{(x, y) in A1 x A2 : x + y not in B}`.
pub fn supersat_count(a1: &ElemSet, a2: &ElemSet, b: &ElemSet) -> Result<u64, OracleError> {
    let g = a1.group();
    if a2.group() != g || b.group() != g {
        return Err(SetError::GroupMismatch(g, if a2.group() != g { a2.group() } else { b.group() }).into());
    }
    let mut bad = 0u64;
    for x in a1.iter() {
        for y in a2.iter() {
            if !b.contains(g.add(x, y).map_err(SetError::from)?) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersatVerdict {
    pub count: u64,
    pub beta: u64,
    pub hypothesis_met: bool,
    pub required: f64,
    pub holds: bool,
}

/// If `|A1| + |A2| >= (1+2eps)(|B| + beta((1+4eps)|B|))` then at least
/// `eps^2 |A1||A2|` pairs must leave `B`.
pub fn supersat_check(a1: &ElemSet, a2: &ElemSet, b: &ElemSet, eps: f64) -> Result<SupersatVerdict, OracleError> {
    pre(eps > 0.0 && eps < 0.5, || format!("need 0 < eps < 1/2, got {eps}"))?;
    pre(!a1.is_empty() && !a2.is_empty() && !b.is_empty(), || "sets must be nonempty".into())?;
    let count = supersat_count(a1, a2, b)?;
    let beta = a1.group().beta((1.0 + 4.0 * eps) * b.len() as f64);
    let hyp = (a1.len() + a2.len()) as f64 >= (1.0 + 2.0 * eps) * (b.len() as f64 + beta as f64);
    let required = eps * eps * (a1.len() * a2.len()) as f64;
    Ok(SupersatVerdict {
        count,
        beta,
        hypothesis_met: hyp,
        required,
        holds: !hyp || count as f64 >= required,
    })
}

// ---------------------------------------------------------------------------
// regularity and the robust Kneser bound

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub k: u64,
    pub s: u64,
    pub min_left_degree: usize,
    pub min_right_degree: usize,
    pub popular_missing: Vec<i64>,
    pub is_regular: bool,
}

pub fn regularity_report(g: &LinkGraph, k: u64, s: u64) -> Result<RegularityReport, OracleError> {
    let (nu, nv) = (g.left().len(), g.right().len());
    let min_left = (0..nu).map(|i| g.left_degree(i)).min().unwrap_or(nv);
    let min_right = (0..nv).map(|j| g.right_degree(j)).min().unwrap_or(nu);
    let rs = restricted_sumset(g)?;
    let popular_missing: Vec<i64> = rep_counts(g.left(), g.right())?
        .into_iter()
        .filter(|&(x, r)| r >= k && !rs.contains(x))
        .map(|(x, _)| x)
        .collect();
    let floors = min_left as i64 >= nv as i64 - s as i64 && min_right as i64 >= nu as i64 - s as i64;
    Ok(RegularityReport {
        k,
        s,
        min_left_degree: min_left,
        min_right_degree: min_right,
        is_regular: floors && popular_missing.is_empty(),
        popular_missing,
    })
}

/// Adds every pair whose sum has at least `k` representations in `U x V`.
pub fn popular_augment(g: &LinkGraph, k: u64) -> Result<LinkGraph, OracleError> {
    let grp = g.group();
    let reps = rep_counts(g.left(), g.right())?;
    let mut out = g.clone();
    for (i, u) in g.left().iter().enumerate() {
        for (j, v) in g.right().iter().enumerate() {
            let x = grp.add(u, v).map_err(SetError::from)?;
            if reps[&x] >= k {
                out.set(i, j, true);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KneserVerdict {
    pub swapped: bool,
    pub u_len: usize,
    pub v_len: usize,
    pub restricted_len: usize,
    pub full_len: usize,
    /// `2|V| + |U| - 2K - 4s`, twice the lower bound.
    pub bound_doubled: i64,
    pub regular: bool,
    pub hypothesis_met: bool,
    pub holds: bool,
}

/// Regular link with a missing sum forces `|U +Γ V| >= |V| + |U|/2 - K - 2s`.
pub fn robust_kneser_check(g: &LinkGraph, k: u64, s: u64) -> Result<KneserVerdict, OracleError> {
    let swapped = g.left().len() > g.right().len();
    let t;
    let g = if swapped {
        t = g.transposed();
        &t
    } else {
        g
    };
    let reg = regularity_report(g, k, s)?;
    let rs = restricted_sumset(g)?;
    let full = sumset(g.left(), g.right())?;
    let (u, v) = (g.left().len() as i64, g.right().len() as i64);
    let bound_doubled = 2 * v + u - 2 * k as i64 - 4 * s as i64;
    let hyp = reg.is_regular && rs.len() != full.len();
    Ok(KneserVerdict {
        swapped,
        u_len: u as usize,
        v_len: v as usize,
        restricted_len: rs.len(),
        full_len: full.len(),
        bound_doubled,
        regular: reg.is_regular,
        hypothesis_met: hyp,
        holds: !hyp || 2 * rs.len() as i64 >= bound_doubled,
    })
}

/// Complete link minus random edges, each vertex losing at most `s`, with
/// each candidate edge dropped with probability `p`.
pub fn thin_link<R: Rng>(u: &ElemSet, v: &ElemSet, s: usize, p: f64, rng: &mut R) -> Result<LinkGraph, OracleError> {
    let mut g = LinkGraph::complete(u.clone(), v.clone())?;
    let mut pairs: Vec<(usize, usize)> = g.edges().collect();
    pairs.shuffle(rng);
    let mut lost_l = vec![0usize; u.len()];
    let mut lost_r = vec![0usize; v.len()];
    for (i, j) in pairs {
        if lost_l[i] < s && lost_r[j] < s && rng.gen_bool(p) {
            g.set(i, j, false);
            lost_l[i] += 1;
            lost_r[j] += 1;
        }
    }
    Ok(g)
}

fn random_subset<R: Rng>(group: GroupCtx, universe: i64, size: usize, rng: &mut R) -> ElemSet {
    let mut all: Vec<i64> = (0..universe).collect();
    all.shuffle(rng);
    all.truncate(size);
    ElemSet::new(group, all).expect("valid residues")
}

/// Regular instance in `Z/n` (6 <= n <= 12): random `U, V`, thinned link,
/// then popular augmentation with `K`.
pub fn kneser_instance(seed: u64, index: u64, k: u64, s: u64) -> Result<LinkGraph, OracleError> {
    let mut rng = instance_rng(seed, index);
    let n: u64 = rng.gen_range(6..=12);
    let g = GroupCtx::cyclic(n).map_err(SetError::from)?;
    let a = rng.gen_range(1..=(n as usize - 1).min(6));
    let b = rng.gen_range(1..=(n as usize - 1).min(6));
    let u = random_subset(g, n as i64, a, &mut rng);
    let v = random_subset(g, n as i64, b, &mut rng);
    let link = thin_link(&u, &v, s as usize, 0.6, &mut rng)?;
    popular_augment(&link, k)
}

/// Runs the robust Kneser check on generated instances until `target`
/// instances meet the hypothesis (or `max_instances` are drawn).
pub fn kneser_sweep(seed: u64, target: u64, max_instances: u64, exec: Exec) -> Result<SweepSummary, OracleError> {
    const CHUNK: u64 = 4096;
    let mut total = SweepSummary::default();
    let mut next = 0u64;
    while total.hypothesis_met < target && next < max_instances {
        let idx: Vec<u64> = (next..(next + CHUNK).min(max_instances)).collect();
        next += idx.len() as u64;
        let part = exec.map_reduce(
            &idx,
            || Ok(SweepSummary::default()),
            |&i| {
                let k = 1 + i % 2;
                let s = 1 + (i / 2) % 2;
                let g = kneser_instance(seed, i, k, s)?;
                let vd = robust_kneser_check(&g, k, s)?;
                let mut out = SweepSummary::default();
                out.record(vd.hypothesis_met, vd.holds, || format!("instance {i}: {vd:?} {g:?}"));
                Ok(out)
            },
            |a: Result<SweepSummary, OracleError>, b| Ok(a?.merge(b?)),
        )?;
        total = total.merge(part);
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// normalized sets with an almost-complete link

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Almost1Verdict {
    pub ell: u64,
    pub ell_prime: u64,
    pub n: usize,
    /// true when `ell <= |U| + |V| - 2K - 2`.
    pub short_hull: bool,
    /// Twice the lower bound of the active case.
    pub bound_doubled: i64,
    pub restricted_len: usize,
    pub regular: bool,
    pub hypothesis_met: bool,
    pub holds: bool,
}

/// Two-case lower bound for `|U +Γ V|` over normalized integer sets.
pub fn almost1_check(g: &LinkGraph, k: u64, s: u64) -> Result<Almost1Verdict, OracleError> {
    let (u, v) = (g.left(), g.right());
    pre(u.group().is_integers(), || "sets must be integer sets".into())?;
    pre(k >= 2, || format!("need K >= 2, got {k}"))?;
    pre(!u.is_empty() && !v.is_empty(), || "sets must be nonempty".into())?;
    pre(u.min_elem() == Some(0) && v.min_elem() == Some(0), || "hulls must start at 0".into())?;
    let ell = hull_len(u)? - 1;
    let ell_p = hull_len(v)? - 1;
    pre(ell_p <= ell, || format!("need max V <= max U, got {ell_p} > {ell}"))?;
    let norm = normalize(u, v)?;
    pre(norm.transform.scale == 1 || (u.len() == 1 && v.len() == 1), || "gcd(U u V) must be 1".into())?;

    let reg = regularity_report(g, k, s)?;
    let rs = restricted_sumset(g)?;
    let (nu, nv) = (u.len() as i64, v.len() as i64);
    let n = nu.min(nv);
    let (k, s) = (k as i64, s as i64);
    let short = ell as i64 <= nu + nv - 2 * k - 2;
    let bound_doubled = if short {
        2 * (ell as i64 + nv - 2 * s)
    } else {
        2 * (nu + nv - 4 * s - 2 * k - 2) + n
    };
    Ok(Almost1Verdict {
        ell,
        ell_prime: ell_p,
        n: n as usize,
        short_hull: short,
        bound_doubled,
        restricted_len: rs.len(),
        regular: reg.is_regular,
        hypothesis_met: reg.is_regular,
        holds: !reg.is_regular || 2 * rs.len() as i64 >= bound_doubled,
    })
}

/// Random normalized pair with hull lengths at most 13, thinned and augmented
/// link.
pub fn almost1_instance(seed: u64, index: u64, k: u64, s: u64) -> Result<LinkGraph, OracleError> {
    let z = GroupCtx::integers();
    let mut rng = instance_rng(seed, index);
    loop {
        let ell: i64 = rng.gen_range(1..=12);
        let ellp: i64 = rng.gen_range(0..=ell);
        let pick = |rng: &mut ChaCha8Rng, top: i64| {
            let mut v = vec![0, top];
            for x in 1..top {
                if rng.gen_bool(0.6) {
                    v.push(x);
                }
            }
            ElemSet::new(z, v).expect("integers")
        };
        let u = pick(&mut rng, ell);
        let v = pick(&mut rng, ellp);
        if normalize(&u, &v)?.transform.scale != 1 {
            continue;
        }
        let link = thin_link(&u, &v, s as usize, 0.5, &mut rng)?;
        return popular_augment(&link, k);
    }
}

pub fn almost1_sweep(seed: u64, instances: u64, exec: Exec) -> Result<SweepSummary, OracleError> {
    let idx: Vec<u64> = (0..instances).collect();
    exec.map_reduce(
        &idx,
        || Ok(SweepSummary::default()),
        |&i| {
            let k = 2 + i % 2;
            let s = i % 3;
            let g = almost1_instance(seed, i, k, s)?;
            let vd = almost1_check(&g, k, s)?;
            let mut out = SweepSummary::default();
            out.record(vd.hypothesis_met, vd.holds, || format!("instance {i}: {vd:?} {g:?}"));
            Ok(out)
        },
        |a: Result<SweepSummary, OracleError>, b| Ok(a?.merge(b?)),
    )
}

/// Feasible `(|V'|, |<V'>|)` pairs over every subset `V'` of `Z/n`.
pub fn subset_order_pairs(n: u64) -> Vec<(u64, u64)> {
    assert!((1..=20).contains(&n));
    let g = GroupCtx::cyclic(n).expect("n >= 1");
    let mut out = std::collections::BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let elems = (0..n as i64).filter(|i| mask >> i & 1 == 1);
        out.insert((mask.count_ones() as u64, g.generated_order(elems).expect("finite")));
    }
    out.into_iter().collect()
}

/// `alpha` read off the subset table instead of the subgroup lattice.
pub fn alpha_brute(pairs: &[(u64, u64)], u: usize, v: usize) -> u64 {
    pairs
        .iter()
        .filter(|&&(k, ord)| k as usize <= v && ord as i64 <= u as i64 + v as i64 - k as i64)
        .map(|&(k, _)| k)
        .max()
        .unwrap_or(0)
}

/// Random `U, V` in `Z/n` (`n <= n_max`, sizes `<= size_max`) compared against
/// the subset table.
pub fn alpha_sweep(seed: u64, instances: u64, n_max: u64, size_max: usize, exec: Exec) -> SweepSummary {
    let tables: Vec<Vec<(u64, u64)>> = (1..=n_max).map(subset_order_pairs).collect();
    exec.map_reduce_range(
        instances as usize,
        SweepSummary::default,
        |i| {
            let mut rng = instance_rng(seed, i as u64);
            let n = rng.gen_range(1..=n_max);
            let g = GroupCtx::cyclic(n).expect("n >= 1");
            let pick = |rng: &mut ChaCha8Rng| {
                let k = rng.gen_range(1..=size_max.min(n as usize));
                let idx = rand::seq::index::sample(rng, n as usize, k);
                ElemSet::new(g, idx.into_iter().map(|x| x as i64)).expect("in range")
            };
            let u = pick(&mut rng);
            let v = pick(&mut rng);
            let mut sum = SweepSummary::default();
            let fast = alpha(&u, &v).expect("same group");
            let slow = alpha_brute(&tables[n as usize - 1], u.len(), v.len());
            sum.record(true, fast == slow, || format!("Z/{n}: U={} V={} fast {fast} brute {slow}", u.to_text(), v.to_text()));
            sum
        },
        SweepSummary::merge,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> ElemSet {
        ElemSet::new(GroupCtx::integers(), v.iter().copied()).unwrap()
    }

    fn zn(n: u64, v: &[i64]) -> ElemSet {
        ElemSet::new(GroupCtx::cyclic(n).unwrap(), v.iter().copied()).unwrap()
    }

    #[test]
    fn alpha_random_sweep() {
        let s = alpha_sweep(1, 300, 10, 6, Exec::default());
        assert_eq!((s.instances, s.violations), (300, 0));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&z(&[0, 5]), &z(&[1, 2, 3])).unwrap(), 1);
        let u = zn(12, &[0, 1, 2, 3]);
        assert_eq!(alpha(&u, &u).unwrap(), 4);
        let w = zn(7, &[0, 1]);
        assert_eq!(alpha(&w, &w).unwrap(), 1);
    }

    #[test]
    fn alpha_matches_subset_oracle() {
        for n in 1..=12u64 {
            let pairs = subset_order_pairs(n);
            let sizes = GroupCtx::cyclic(n).unwrap().subgroup_sizes();
            for a in 0..=6usize {
                for b in 0..=6usize {
                    assert_eq!(alpha_from_sizes(&sizes, a, b), alpha_brute(&pairs, a, b), "n={n} |U|={a} |V|={b}");
                }
            }
        }
    }

    #[test]
    fn pollard_examples() {
        let u = z(&[0, 1, 2, 3, 4]);
        let p = pollard_check(&u, &u, 2).unwrap();
        assert_eq!((p.lhs, p.rhs, p.holds), (16, 14, true));
        let p = pollard_check(&u, &u, 1).unwrap();
        assert_eq!((p.lhs, p.rhs), (9, 8));
        let h = zn(12, &[0, 3, 6, 9]);
        let p = pollard_check(&h, &h, 4).unwrap();
        assert_eq!((p.lhs, p.rhs, p.alpha_used), (16, 0, 4));
        assert!(pollard_check(&z(&[0]), &z(&[0, 1]), 1).is_err());
        assert!(pollard_check(&u, &u, 0).is_err());
    }

    #[test]
    fn pollard_sweep_agrees_with_direct_check() {
        let g = GroupCtx::cyclic(6).unwrap();
        let fast = pollard_sweep(g, 6, 6, Exec::Sequential);
        let mut slow = SweepSummary::default();
        for um in 1u32..64 {
            for vm in 1u32..64 {
                if vm.count_ones() > um.count_ones() {
                    continue;
                }
                let u = ElemSet::new(g, bits(um).into_iter().map(|x| x as i64)).unwrap();
                let v = ElemSet::new(g, bits(vm).into_iter().map(|x| x as i64)).unwrap();
                for t in 1..=v.len() as u64 {
                    let p = pollard_check(&u, &v, t).unwrap();
                    slow.record(true, p.holds, String::new);
                }
            }
        }
        assert_eq!(fast.instances, slow.instances);
        assert_eq!(fast.violations, 0);
        assert_eq!(slow.violations, 0);
    }

    #[test]
    fn supersat_examples() {
        let a = z(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(supersat_count(&a, &a, &sumset(&a, &a).unwrap()).unwrap(), 0);
        assert_eq!(supersat_count(&a, &a, &z(&[])).unwrap(), 36);
        let v = supersat_check(&a, &a, &z(&[0, 1, 2, 3]), 0.1).unwrap();
        assert_eq!((v.count, v.beta, v.hypothesis_met, v.holds), (26, 1, true, true));
    }

    #[test]
    fn regularity_examples() {
        let u = z(&[0, 1, 2]);
        let full = LinkGraph::complete(u.clone(), u.clone()).unwrap();
        for k in 0..5 {
            assert!(regularity_report(&full, k, 0).unwrap().is_regular);
        }
        let mut one = full.clone();
        one.set(0, 0, false);
        // color 0 has a single representation
        let r = regularity_report(&one, 2, 1).unwrap();
        assert!(r.is_regular);
        assert!(!regularity_report(&one, 1, 1).unwrap().is_regular);
        let mut mid = full.clone();
        mid.set(1, 1, false);
        assert!(regularity_report(&mid, 2, 1).unwrap().is_regular);
        assert!(!regularity_report(&mid, 2, 0).unwrap().is_regular);
        let empty = LinkGraph::empty(u.clone(), u.clone()).unwrap();
        let r = regularity_report(&empty, 10, 2).unwrap();
        assert!(!r.is_regular);
        assert_eq!(r.min_left_degree, 0);
    }

    #[test]
    fn popular_augment_examples() {
        let u = z(&[0, 1, 2]);
        let full = LinkGraph::complete(u.clone(), u.clone()).unwrap();
        assert_eq!(popular_augment(&full, 1).unwrap(), full);
        let empty = LinkGraph::empty(u.clone(), u.clone()).unwrap();
        let aug = popular_augment(&empty, 3).unwrap();
        assert_eq!(aug.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 1), (2, 0)]);
        assert_eq!(popular_augment(&empty, 4).unwrap(), empty);
    }

    #[test]
    fn augment_is_idempotent_and_satisfies_popularity() {
        for i in 0..300 {
            let k = 1 + i % 3;
            let g = kneser_instance(7, i, k, 2).unwrap();
            let again = popular_augment(&g, k).unwrap();
            assert_eq!(again, g);
            assert!(regularity_report(&g, k, g.right().len() as u64).unwrap().popular_missing.is_empty());
        }
    }

    #[test]
    fn kneser_examples() {
        let u = zn(10, &[0, 1, 2]);
        let full = LinkGraph::complete(u.clone(), u.clone()).unwrap();
        assert!(!robust_kneser_check(&full, 2, 0).unwrap().hypothesis_met);
        let v = zn(10, &[0, 1, 2, 3, 4]);
        let mut g = LinkGraph::complete(v.clone(), u.clone()).unwrap();
        g.set(0, 0, false);
        let vd = robust_kneser_check(&g, 2, 1).unwrap();
        assert!(vd.swapped);
        assert!(vd.hypothesis_met);
        assert_eq!(vd.restricted_len, 6);
        assert_eq!(vd.bound_doubled, 10 + 3 - 4 - 4);
        assert!(vd.holds);
    }

    #[test]
    fn kneser_small_sweep() {
        let s = kneser_sweep(11, 500, 20_000, Exec::default()).unwrap();
        assert_eq!(s.violations, 0, "{:?}", s.first_violation);
        assert!(s.hypothesis_met >= 500);
    }

    #[test]
    fn almost1_examples() {
        let u = z(&[0, 1, 2, 3, 4]);
        let g = LinkGraph::complete(u.clone(), u.clone()).unwrap();
        let vd = almost1_check(&g, 2, 0).unwrap();
        assert!(vd.short_hull);
        assert_eq!(vd.bound_doubled, 2 * 9);
        assert_eq!(vd.restricted_len, 9);
        let g = LinkGraph::complete(z(&[0, 1, 5]), z(&[0, 1])).unwrap();
        let vd = almost1_check(&g, 2, 0).unwrap();
        assert!(!vd.short_hull);
        assert_eq!(vd.bound_doubled, 2 * (3 + 2 - 4 - 2) + 2);
        assert!(vd.holds);
        let bad = LinkGraph::complete(z(&[0, 2]), z(&[0, 2])).unwrap();
        assert!(almost1_check(&bad, 2, 0).is_err());
        assert!(almost1_check(&g, 1, 0).is_err());
    }

    #[test]
    fn almost1_small_sweep() {
        let s = almost1_sweep(5, 2000, Exec::default()).unwrap();
        assert_eq!(s.violations, 0, "{:?}", s.first_violation);
        assert!(s.hit_rate() >= 0.5);
    }
}
