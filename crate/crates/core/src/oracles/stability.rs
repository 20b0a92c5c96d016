//! Robust 3k-4 type stability for integer sets with an almost complete link,
//! and the relative version for containers.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{instance_rng, popular_augment, pre, supersat_count, OracleError, SweepSummary};
use crate::exec::Exec;
use crate::group::GroupCtx;
use crate::setops::{joint_ap_witness, restricted_sumset, sumset, ElemSet, JointApCover, LinkGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub n_min: usize,
    pub m_max: usize,
    pub link_size: usize,
    /// `|U +Γ V| - |U| - |V|`.
    pub r: i64,
    /// `N/2 - 13 sqrt(eps) M`.
    pub threshold: f64,
    pub preconditions_met: bool,
    pub hypothesis_met: bool,
    pub caps: (u64, u64),
    pub needs: (usize, usize),
    pub witness: Option<JointApCover>,
    pub conclusion_witnessed: bool,
    pub holds: bool,
}

fn ceil_frac(x: f64) -> usize {
    // guards against 0.9999999 style rounding when x is an integer
    (x - 1e-9).ceil().max(0.0) as usize
}

fn floor_cap(x: f64) -> u64 {
    (x + 1e-9).floor().max(1.0) as u64
}

/// If `r < N/2 - 13 sqrt(eps) M`, look for same-difference progressions
/// `P, Q` of lengths at most `|U| + r + 5 sqrt(eps) M` and `|V| + r + 5 sqrt(eps) M`
/// covering `(1 - sqrt(eps))` of each set. The witness search also runs when
/// only the basic preconditions hold, for reporting.
pub fn freiman_robust_check(g: &LinkGraph, eps: f64) -> Result<StabilityVerdict, OracleError> {
    let (u, v) = (g.left(), g.right());
    pre(u.group().is_integers(), || "sets must be integer sets".into())?;
    pre(eps > 0.0 && eps < 0.5, || format!("need 0 < eps < 1/2, got {eps}"))?;
    let se = eps.sqrt();
    let n_min = u.len().min(v.len());
    let m_max = u.len().max(v.len());
    let link_size = g.edge_count();
    let rs = restricted_sumset(g)?;
    let r = rs.len() as i64 - u.len() as i64 - v.len() as i64;
    let threshold = n_min as f64 / 2.0 - 13.0 * se * m_max as f64;
    let pre_ok = n_min >= 3
        && m_max as f64 >= 2.0 / se
        && link_size as f64 >= (1.0 - eps) * (u.len() * v.len()) as f64;
    let hyp = pre_ok && (r as f64) < threshold;
    let slack = 5.0 * se * m_max as f64;
    let caps = (
        floor_cap(u.len() as f64 + r as f64 + slack),
        floor_cap(v.len() as f64 + r as f64 + slack),
    );
    let needs = (ceil_frac((1.0 - se) * u.len() as f64), ceil_frac((1.0 - se) * v.len() as f64));
    let witness = if pre_ok {
        joint_ap_witness(u, v, caps.0, caps.1, needs.0, needs.1)?
    } else {
        None
    };
    let witnessed = witness.is_some();
    Ok(StabilityVerdict {
        n_min,
        m_max,
        link_size,
        r,
        threshold,
        preconditions_met: pre_ok,
        hypothesis_met: hyp,
        caps,
        needs,
        witness,
        conclusion_witnessed: witnessed,
        holds: !hyp || witnessed,
    })
}

/// Near-interval sets scaled by a common difference, link with at most
/// `eps |U||V|` deleted edges.
pub fn freiman_instance(seed: u64, index: u64, eps: f64) -> Result<LinkGraph, OracleError> {
    let mut rng = instance_rng(seed, index);
    let z = GroupCtx::integers();
    let ku: i64 = rng.gen_range(76..=90);
    let kv: i64 = rng.gen_range(100..=120);
    let d: i64 = rng.gen_range(1..=4);
    let shift_u: i64 = rng.gen_range(-50..=50);
    let shift_v: i64 = rng.gen_range(-50..=50);
    let perturb = |len: i64, rng: &mut rand_chacha::ChaCha8Rng| {
        let mut xs: Vec<i64> = (0..len).collect();
        for _ in 0..rng.gen_range(0..=2) {
            let i = rng.gen_range(1..xs.len() - 1);
            xs.remove(i);
        }
        // outliers: mostly near the end, occasionally far away
        for _ in 0..rng.gen_range(0..=2) {
            let far = rng.gen_bool(0.15);
            let off = if far { rng.gen_range(20..=200) } else { rng.gen_range(1..=3) };
            xs.push(len - 1 + off);
        }
        xs
    };
    let xu = perturb(ku, &mut rng);
    let xv = perturb(kv, &mut rng);
    let u = ElemSet::new(z, xu.into_iter().map(|x| x * d + shift_u))?;
    let v = ElemSet::new(z, xv.into_iter().map(|x| x * d + shift_v))?;
    let mut g = LinkGraph::complete(u.clone(), v.clone())?;
    let budget = (eps * (u.len() * v.len()) as f64).floor() as usize;
    let mut pairs: Vec<(usize, usize)> = g.edges().collect();
    pairs.shuffle(&mut rng);
    for &(i, j) in pairs.iter().take(rng.gen_range(0..=budget)) {
        g.set(i, j, false);
    }
    if rng.gen_bool(0.5) {
        // augmenting only adds edges, so the deletion budget still holds
        g = popular_augment(&g, 2)?;
    }
    Ok(g)
}

pub fn freiman_sweep(seed: u64, instances: u64, eps: f64, exec: Exec) -> Result<SweepSummary, OracleError> {
    let idx: Vec<u64> = (0..instances).collect();
    exec.map_reduce(
        &idx,
        || Ok(SweepSummary::default()),
        |&i| {
            let g = freiman_instance(seed, i, eps)?;
            let vd = freiman_robust_check(&g, eps)?;
            let mut out = SweepSummary::default();
            out.record(vd.hypothesis_met, vd.holds, || format!("instance {i}: {vd:?}"));
            Ok(out)
        },
        |a: Result<SweepSummary, OracleError>, b| Ok(a?.merge(b?)),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeVerdict {
    pub preconditions_met: bool,
    /// Why the preconditions failed, if they did.
    pub vacuous_reason: Option<String>,
    pub bad_pairs: u64,
    pub many_bad_pairs: bool,
    pub caps: (u64, u64),
    pub needs: (usize, usize),
    pub witness: Option<JointApCover>,
    pub holds: bool,
}

/// Either `eps^2 |A1||A2|` pairs leave `B`, or same-difference progressions
/// of lengths `floor((s_i/(s1+s2) + 4 sqrt(eps)) |B|)` miss at most `eps |A_i|`
/// points of `A_i`.
///
/// Besides the stated conditions this requires `min |A_i| >= 3` and
/// `max |A_i| >= 2/eps`, the size conditions of the 3k-4 step applied with
/// `eps^2`. Without them the dichotomy fails on tiny sets such as
/// `A1 = {0,1}, A2 = {0,2}, B = A1 + A2`.
pub fn relative_stability_check(
    a1: &ElemSet,
    a2: &ElemSet,
    b: &ElemSet,
    s1: u64,
    s2: u64,
    eps: f64,
) -> Result<RelativeVerdict, OracleError> {
    pre(a1.group().is_integers() && a2.group() == a1.group() && b.group() == a1.group(), || {
        "sets must be integer sets".into()
    })?;
    pre(s1 >= 1 && s1 <= s2, || format!("need 1 <= s1 <= s2, got {s1}, {s2}"))?;
    pre(eps > 0.0, || "eps must be positive".into())?;
    let tot = (s1 + s2) as f64;
    let frac = [s1 as f64 / tot, s2 as f64 / tot];
    let se = eps.sqrt();
    let (l1, l2, lb) = (a1.len() as f64, a2.len() as f64, b.len() as f64);
    let mut reason = None;
    if eps > frac[0] * frac[0] / 256.0 {
        reason = Some(format!("eps {eps} exceeds 2^-8 (s1/(s1+s2))^2"));
    } else if (1.0 - eps) * lb > l1 + l2 {
        reason = Some("(1-eps)|B| > |A1|+|A2|".into());
    } else if l1 > (frac[0] + 2.0 * se) * lb || l2 > (frac[1] + 2.0 * se) * lb {
        reason = Some("some |A_i| exceeds (s_i/(s1+s2) + 2 sqrt(eps))|B|".into());
    } else if a1.len().min(a2.len()) < 3 || (a1.len().max(a2.len()) as f64) < 2.0 / eps {
        reason = Some("sets too small for the 3k-4 step (need min >= 3, max >= 2/eps)".into());
    }
    let caps = (
        floor_cap((frac[0] + 4.0 * se) * lb),
        floor_cap((frac[1] + 4.0 * se) * lb),
    );
    let needs = (ceil_frac((1.0 - eps) * l1), ceil_frac((1.0 - eps) * l2));
    if reason.is_some() {
        return Ok(RelativeVerdict {
            preconditions_met: false,
            vacuous_reason: reason,
            bad_pairs: 0,
            many_bad_pairs: false,
            caps,
            needs,
            witness: None,
            holds: true,
        });
    }
    let bad = supersat_count(a1, a2, b)?;
    let many = bad as f64 >= eps * eps * l1 * l2;
    let witness = joint_ap_witness(a1, a2, caps.0, caps.1, needs.0, needs.1)?;
    Ok(RelativeVerdict {
        preconditions_met: true,
        vacuous_reason: None,
        bad_pairs: bad,
        many_bad_pairs: many,
        caps,
        needs,
        holds: many || witness.is_some(),
        witness,
    })
}

/// Triples built from aligned progressions of nearly equal size, with `B`
/// either a trimmed copy of `A1 + A2` or a scrambled set of the same size.
pub fn relative_instance(seed: u64, index: u64, eps: f64) -> Result<(ElemSet, ElemSet, ElemSet), OracleError> {
    let mut rng = instance_rng(seed, index);
    let z = GroupCtx::integers();
    let base = (2.0 / eps).ceil() as i64;
    let k1 = base + rng.gen_range(0..=8);
    let k2 = base + rng.gen_range(0..=8);
    let d: i64 = rng.gen_range(1..=3);
    let mut x1: Vec<i64> = (0..k1).collect();
    let mut x2: Vec<i64> = (0..k2).collect();
    for xs in [&mut x1, &mut x2] {
        for _ in 0..rng.gen_range(0..=3) {
            let i = rng.gen_range(1..xs.len() - 1);
            xs.remove(i);
        }
        if rng.gen_bool(0.3) {
            let top = *xs.last().unwrap();
            xs.push(top + rng.gen_range(2..=40));
        }
    }
    let a1 = ElemSet::new(z, x1.into_iter().map(|x| x * d))?;
    let a2 = ElemSet::new(z, x2.into_iter().map(|x| x * d + 7))?;
    let full = sumset(&a1, &a2)?;
    let b = if rng.gen_bool(0.8) {
        let mut v: Vec<i64> = full.elements().to_vec();
        for _ in 0..rng.gen_range(0..=3) {
            let i = rng.gen_range(0..v.len());
            v.remove(i);
        }
        ElemSet::new(z, v)?
    } else {
        // same size, unrelated positions
        let top = full.max_elem().unwrap() * 3;
        let mut all: Vec<i64> = (0..top).collect();
        all.shuffle(&mut rng);
        all.truncate(full.len());
        ElemSet::new(z, all)?
    };
    Ok((a1, a2, b))
}

pub fn relative_sweep(seed: u64, instances: u64, eps: f64, exec: Exec) -> Result<SweepSummary, OracleError> {
    let idx: Vec<u64> = (0..instances).collect();
    exec.map_reduce(
        &idx,
        || Ok(SweepSummary::default()),
        |&i| {
            let (a1, a2, b) = relative_instance(seed, i, eps)?;
            let vd = relative_stability_check(&a1, &a2, &b, 1, 1, eps)?;
            let mut out = SweepSummary::default();
            out.record(vd.preconditions_met, vd.holds, || format!("instance {i}: {vd:?}"));
            Ok(out)
        },
        |a: Result<SweepSummary, OracleError>, b| Ok(a?.merge(b?)),
    )
}
