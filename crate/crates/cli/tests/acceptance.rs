//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use addcomb::containers::{self, ParamPack, PartedHypergraph};
use addcomb::experiments::{self, PairSpec, DEFAULT_BUDGET};
use addcomb::family;
use addcomb::oracles::{self, binom::BinomGridSpec, stability};
use addcomb::setops::{best_ap_cover, best_joint_ap_cover, sumset};
use addcomb::{ElemSet, Exec, GroupCtx};
use num_bigint::BigInt;
use num_rational::BigRational;

const SEED: u64 = 20240601;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let t = Instant::now();
    let mut v = f();
    let el = t.elapsed();
    if let Some(l) = limit {
        if el > l {
            v.ok = false;
            v.detail.push_str(&format!("; took {el:.1?}, limit {l:?}"));
        }
    }
    (v, el)
}

fn c1_pollard() -> Verdict {
    let z = oracles::pollard_sweep(GroupCtx::integers(), 10, 10, Exec::default());
    let c = oracles::pollard_sweep(GroupCtx::cyclic(12).unwrap(), 12, 5, Exec::default());
    verdict(
        z.violations == 0 && c.violations == 0 && z.instances > 0 && c.instances > 0,
        format!(
            "Z [0,9]: {} (U,V,t) triples, {} violations; Z/12 |U|,|V|<=5: {} triples, {} violations",
            z.instances, z.violations, c.instances, c.violations
        ),
    )
}

fn c2_alpha() -> Verdict {
    let s = oracles::alpha_sweep(SEED, 10_000, 16, 6, Exec::default());
    verdict(
        s.violations == 0 && s.instances >= 10_000,
        format!("{} random instances on Z/n (n<=16), {} disagreements", s.instances, s.violations),
    )
}

fn c3_kneser() -> Verdict {
    match oracles::kneser_sweep(SEED, 10_000, 1_000_000, Exec::default()) {
        Ok(s) => verdict(
            s.violations == 0 && s.hypothesis_met >= 10_000,
            format!(
                "{} regular missing-colour instances (of {} drawn), {} violations",
                s.hypothesis_met, s.instances, s.violations
            ),
        ),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c4_stability() -> Verdict {
    let a = oracles::almost1_sweep(SEED, 2000, Exec::default());
    let f = stability::freiman_sweep(SEED, 200, 1.0 / 2500.0, Exec::default());
    match (a, f) {
        (Ok(a), Ok(f)) => verdict(
            a.violations == 0 && f.violations == 0 && a.hit_rate() >= 0.5 && f.hit_rate() >= 0.5,
            format!(
                "almost-1 structure: {} instances, hypothesis rate {:.3}, {} unwitnessed; robust 3k-4: {} instances, hypothesis rate {:.3}, {} unwitnessed",
                a.instances,
                a.hit_rate(),
                a.violations,
                f.instances,
                f.hit_rate(),
                f.violations
            ),
        ),
        (a, f) => verdict(false, format!("{:?} / {:?}", a.err(), f.err())),
    }
}

fn c5_binom() -> Verdict {
    let s = oracles::binom_lemma_grid(&BinomGridSpec::default(), Exec::default());
    verdict(
        s.violations == 0 && s.cells > 0,
        format!(
            "{} grid cells, {} exact rechecks, {} violations, worst log margin {:.4}",
            s.cells, s.exact_rechecks, s.violations, s.worst_margin
        ),
    )
}

fn c6_containers() -> Verdict {
    let g = GroupCtx::cyclic(7).unwrap();
    let f = ElemSet::new(g, 0..7).unwrap();
    let h = PartedHypergraph::triple(&f, &f, &f).unwrap();
    let pack = ParamPack::new(&h, 2, 2, 2, BigRational::from_integer(BigInt::from(4))).unwrap();
    let cond = containers::check_degree_condition(&h, &pack).unwrap();
    let sets = containers::triple_independent_sets(&h, g, 2);
    let rep = containers::verify_container_properties(&h, &pack, &sets, Exec::default()).unwrap();
    // second pass must reproduce every container
    let again = containers::verify_container_properties(&h, &pack, &sets, Exec::Sequential).unwrap();
    verdict(
        cond.holds && rep.total_failures() == 0 && rep.trichotomy_rounds > 0 && again == rep,
        format!(
            "degree condition {}, {} independent sets, {} rounds ({} with the progress check active), {} failures, {} fingerprints (bound {})",
            cond.holds,
            rep.inputs,
            rep.rounds,
            rep.trichotomy_rounds,
            rep.total_failures(),
            rep.distinct_fingerprints,
            rep.fingerprint_bound
        ),
    )
}

fn c7_delta() -> Verdict {
    let d = containers::delta_agreement(SEED, 100, 3, 3, Exec::default());
    verdict(
        d.mismatches == 0 && d.entries > 0,
        format!(
            "{} hypergraphs (100 per shape r<=3, r0<=3), {} table entries, {} mismatches",
            d.hypergraphs, d.entries, d.mismatches
        ),
    )
}

fn c8_family() -> Verdict {
    let f = family::full_cyclic(7).unwrap();
    let out = match family::build_family(&f, &f, 2, 2, 4, 0.5, Exec::default()) {
        Ok(o) => o,
        Err(e) => return verdict(false, e.to_string()),
    };
    let rep = family::verify_family(&out.family, &f, &f, 2, 2, 4, 0.5, Exec::default()).unwrap();
    let st = &out.stats;
    verdict(
        rep.violations() == 0 && st.height <= st.height_bound && st.container_check_failures == 0 && rep.pairs_checked > 0,
        format!(
            "{} entries, {} admissible pairs checked, {} + {} property violations, height {} <= {}, {} nodes",
            rep.family_size,
            rep.pairs_checked,
            rep.property1_failures,
            rep.property2_failures,
            st.height,
            st.height_bound,
            st.nodes
        ),
    )
}

fn c9_counting() -> Verdict {
    let z = GroupCtx::integers();
    let (mut cells, mut bad_enum, mut bad_bound) = (0u64, 0u64, 0u64);
    let mut first = None;
    for n in 1..=14usize {
        for s1 in 1..=n.min(4) {
            for s2 in 1..=n.min(4) {
                let base = PairSpec::new(z, n, s1, s2, 0).unwrap();
                let fast = experiments::enumerate_pairs(&base, DEFAULT_BUDGET, Exec::default()).unwrap();
                let naive = experiments::naive_histogram(&base);
                for m in 0..=2 * n {
                    cells += 1;
                    let spec = PairSpec { m, ..base };
                    let c = fast.count_at_most(m);
                    let want: u64 = naive.range(..=m).map(|(_, k)| k).sum();
                    if c != want {
                        bad_enum += 1;
                        first.get_or_insert(format!("n={n} s=({s1},{s2}) m={m}: {c} vs {want}"));
                    }
                    if !experiments::count_report(&spec, c, true).holds {
                        bad_bound += 1;
                        first.get_or_insert(format!("count bound fails at n={n} s=({s1},{s2}) m={m}"));
                    }
                }
            }
        }
    }
    verdict(
        bad_enum == 0 && bad_bound == 0,
        format!(
            "{cells} (n,s1,s2,m) cells, {bad_enum} enumeration mismatches, {bad_bound} count-bound failures{}",
            first.map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

/// Best coverage by an AP of length <= L, for every L in 1..=15, by walking
/// every start and difference.
fn brute_cover(mask: u32) -> [usize; 16] {
    let mut best = [0usize; 16];
    for a in 0..15i64 {
        for d in 1..15i64 {
            let mut c = 0;
            for k in 0..15i64 {
                let x = a + k * d;
                if x < 15 && mask >> x & 1 == 1 {
                    c += 1;
                }
                let l = (k + 1) as usize;
                best[l] = best[l].max(c);
            }
        }
    }
    for l in 1..16 {
        best[l] = best[l].max(best[l - 1]);
    }
    best
}

fn c10_ap_fitting() -> Verdict {
    let z = GroupCtx::integers();
    let mut single_bad = 0u64;
    let mut single_sets = 0u64;
    for mask in 1u32..(1 << 15) {
        if mask.count_ones() > 6 {
            continue;
        }
        single_sets += 1;
        let x = ElemSet::new(z, (0..15).filter(|i| mask >> i & 1 == 1)).unwrap();
        let brute = brute_cover(mask);
        for l in 1..=15u64 {
            let c = best_ap_cover(&x, l).unwrap();
            let honest = c.window.len <= l && c.window.coverage(&x) == c.covered;
            if !honest || c.covered != brute[l as usize] {
                single_bad += 1;
            }
        }
    }
    // joint: |A+B| = |A|+|B|-1 iff both are APs of one common difference
    let sets: Vec<ElemSet> = (1u32..(1 << 13))
        .filter(|m| (2..=5).contains(&m.count_ones()))
        .map(|m| ElemSet::new(z, (0..13).filter(|i| m >> i & 1 == 1)).unwrap())
        .collect();
    let checks = Exec::default().map(&sets, |a| {
        let (mut pairs, mut bad, mut equal) = (0u64, 0u64, 0u64);
        for b in &sets {
            pairs += 1;
            let eq = sumset(a, b).unwrap().len() == a.len() + b.len() - 1;
            let j = best_joint_ap_cover(a, b, a.len() as u64, b.len() as u64).unwrap();
            let aligned = j.first.covered == a.len() && j.second.covered == b.len();
            equal += eq as u64;
            bad += (eq != aligned) as u64;
        }
        (pairs, bad, equal)
    });
    let (pairs, joint_bad, equal) = checks.into_iter().fold((0, 0, 0), |s, c| (s.0 + c.0, s.1 + c.1, s.2 + c.2));
    // a singleton always gives equality
    let mut single_eq_bad = 0;
    for a in 0..13i64 {
        let sa = ElemSet::new(z, [a]).unwrap();
        for b in &sets {
            single_eq_bad += (sumset(&sa, b).unwrap().len() != b.len()) as u64;
        }
    }
    verdict(
        single_bad == 0 && joint_bad == 0 && single_eq_bad == 0,
        format!(
            "{single_sets} sets x 15 lengths, {single_bad} cover mismatches; {pairs} pairs with |A|,|B| in 2..=5 ({equal} equality cases), {joint_bad} equivalence failures; singleton equality failures {single_eq_bad}"
        ),
    )
}

fn run_cli(args: &[&str], dir: &Path, out: &str) -> Result<Vec<u8>, String> {
    let path = dir.join(out);
    let status = Command::new(env!("CARGO_BIN_EXE_addcomb"))
        .args(args)
        .arg("--out")
        .arg(&path)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("{args:?} exited with {status}"));
    }
    std::fs::read(&path).map_err(|e| e.to_string())
}

fn c11_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "n = 20\ns1 = 3\ns2 = 3\nm = 8\ntrials = 500\nseed = 17\n").unwrap();
    let cfg = cfg.to_str().unwrap().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["sample", "--config", &cfg],
        vec!["sample", "--config", &cfg, "--format", "csv"],
        vec!["sample", "--config", &cfg, "--m", "6"],
        vec!["enumerate", "--config", &cfg],
        vec!["structure", "--config", &cfg],
        vec!["count", "--n", "12", "--s1", "2", "--m", "6", "--group", "zn:12"],
        vec!["family", "--group", "zn:7", "--n", "7", "--s1", "2", "--m", "4", "--eps", "1/2"],
        vec!["verify", "kneser", "--seed", "5"],
        vec!["verify", "freiman", "--seed", "5"],
    ];
    let mut bad = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let a = run_cli(args, dir.path(), &format!("a{i}"));
        let b = run_cli(args, dir.path(), &format!("b{i}"));
        match (a, b) {
            (Ok(a), Ok(b)) if a == b && !a.is_empty() => {}
            (Ok(_), Ok(_)) => bad.push(format!("{args:?} differs")),
            (a, b) => bad.push(format!("{:?} {:?}", a.err(), b.err())),
        }
    }
    verdict(bad.is_empty(), format!("{} commands run twice, {} mismatches {:?}", runs.len(), bad.len(), bad))
}

fn main() {
    let criteria: Vec<(&str, Option<u64>, fn() -> Verdict)> = vec![
        ("1 Pollard sweep", Some(60), c1_pollard),
        ("2 alpha oracle", Some(60), c2_alpha),
        ("3 robust Kneser", None, c3_kneser),
        ("4 almost-1 structure and robust 3k-4", None, c4_stability),
        ("5 binomial deviation grid", Some(300), c5_binom),
        ("6 container construction on Z/7", None, c6_containers),
        ("7 codegree table closed form", None, c7_delta),
        ("8 container family on Z/7", None, c8_family),
        ("9 exact counting", None, c9_counting),
        ("10 AP fitting", None, c10_ap_fitting),
        ("11 CLI determinism", None, c11_determinism),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let (v, el) = timed(limit.map(Duration::from_secs), f);
        println!("{} [{name}] ({el:.1?}) {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += (!v.ok) as u32;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
