//! `addcomb` command-line harness.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use addcomb::containers::{self, ParamPack, PartedHypergraph};
use addcomb::experiments::{self, PairSpec, SampleOptions, DEFAULT_BUDGET};
use addcomb::family;
use addcomb::oracles::{self, binom::BinomGridSpec, stability};
use addcomb::{ElemSet, Exec, GroupCtx};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "addcomb", version, about = "Sumset inequality checks, pair enumeration and container families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one inequality oracle over a grid and report violations.
    Verify {
        /// pollard, alpha, kneser, almost1, freiman, relative, binom, containers, delta
        oracle: String,
        /// key=value file overriding the oracle's default grid.
        #[arg(long)]
        grid: Option<PathBuf>,
    },
    /// Exact count of pairs with small sumset.
    Enumerate,
    /// Random admissible pairs.
    Sample,
    /// Common-difference AP covers of admissible pairs.
    Structure,
    /// Exact count against the binomial benchmark.
    Count,
    /// Build and check the container family.
    Family,
}

#[derive(Args, Debug, Default, Clone)]
struct Common {
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    s1: Option<usize>,
    #[arg(long, global = true)]
    s2: Option<usize>,
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Accepts decimals or fractions such as 1/4.
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `z` or `zn:<n>`.
    #[arg(long, global = true)]
    group: Option<String>,
    /// Extra length allowed on AP caps in `structure`.
    #[arg(long, global = true)]
    slack: Option<f64>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// key=value lines mirroring the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run everything on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, Default, PartialEq, Eq)]
enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags merged with the config file.
#[derive(Debug, Clone)]
struct Settings {
    c: Common,
    exec: Exec,
}

fn read_kv(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_num(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
        if b == 0.0 {
            bail!("zero denominator in {s}");
        }
        return Ok(a / b);
    }
    Ok(s.parse()?)
}

fn parse_ratio(s: &str) -> Result<(u64, u64)> {
    match s.trim().split_once('/') {
        Some((a, b)) => Ok((a.trim().parse()?, b.trim().parse()?)),
        None => Ok((s.trim().parse()?, 1)),
    }
}

impl Settings {
    fn new(mut c: Common) -> Result<Self> {
        if let Some(path) = c.config.clone() {
            let kv = read_kv(&path)?;
            for (k, v) in kv {
                let p = || -> Result<usize> { v.parse().with_context(|| format!("config key {k}")) };
                match k.as_str() {
                    "n" => c.n = c.n.or(Some(p()?)),
                    "s1" => c.s1 = c.s1.or(Some(p()?)),
                    "s2" => c.s2 = c.s2.or(Some(p()?)),
                    "m" => c.m = c.m.or(Some(p()?)),
                    "trials" => c.trials = c.trials.or(Some(p()?)),
                    "seed" => c.seed = c.seed.or(Some(v.parse()?)),
                    "eps" => c.eps = c.eps.or(Some(v)),
                    "alpha" => c.alpha = c.alpha.or(Some(v)),
                    "group" => c.group = c.group.or(Some(v)),
                    "slack" => c.slack = c.slack.or(Some(v.parse()?)),
                    "out" => c.out = c.out.or(Some(PathBuf::from(v))),
                    "format" => {
                        if c.format.is_none() {
                            c.format = Some(Format::from_str(&v, true).map_err(|e| anyhow!(e))?);
                        }
                    }
                    "sequential" => c.sequential |= v == "true",
                    other => bail!("unknown config key {other}"),
                }
            }
        }
        let exec = if c.sequential { Exec::Sequential } else { Exec::default() };
        Ok(Settings { c, exec })
    }

    fn group(&self) -> Result<GroupCtx> {
        let spec = self.c.group.as_deref().unwrap_or("z");
        GroupCtx::parse(spec).map_err(|e| anyhow!("--group {spec}: {e}"))
    }

    fn need(&self, v: Option<usize>, name: &str) -> Result<usize> {
        v.ok_or_else(|| anyhow!("missing --{name}"))
    }

    fn pair_spec(&self) -> Result<PairSpec> {
        let n = self.need(self.c.n, "n")?;
        let s1 = self.need(self.c.s1, "s1")?;
        let s2 = self.c.s2.unwrap_or(s1);
        let m = self.need(self.c.m, "m")?;
        Ok(PairSpec::new(self.group()?, n, s1, s2, m)?)
    }

    fn eps(&self, default: f64) -> Result<f64> {
        self.c.eps.as_deref().map(parse_num).transpose().map(|e| e.unwrap_or(default))
    }

    fn seed(&self) -> u64 {
        self.c.seed.unwrap_or(0)
    }

    fn format(&self) -> Format {
        self.c.format.unwrap_or_default()
    }
}

/// What a command produced: a JSON document, CSV rows, and whether a
/// theorem-level check failed.
struct Output {
    json: Value,
    csv: Vec<Vec<String>>,
    violation: bool,
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn render(out: &Output, fmt: Format) -> Result<Vec<u8>> {
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&out.json)?;
            s.push(b'\n');
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            for row in &out.csv {
                w.write_record(row)?;
            }
            Ok(w.into_inner().map_err(|e| anyhow!(e.to_string()))?)
        }
    }
}

fn kv_rows(pairs: &[(&str, String)]) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
    rows.extend(pairs.iter().map(|(k, v)| vec![k.to_string(), v.clone()]));
    rows
}

// ---------------------------------------------------------------------------
// verify

struct Grid(BTreeMap<String, String>);

impl Grid {
    fn get<T: std::str::FromStr>(&self, k: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.0.get(k) {
            Some(v) => v.parse().map_err(|e| anyhow!("grid key {k}: {e}")),
            None => Ok(default),
        }
    }

    fn num(&self, k: &str, default: f64) -> Result<f64> {
        self.0.get(k).map(|v| parse_num(v)).transpose().map(|x| x.unwrap_or(default))
    }

    fn list<T>(&self, k: &str, default: Vec<T>, f: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
        match self.0.get(k) {
            Some(v) => v.split(',').map(|x| f(x.trim())).collect(),
            None => Ok(default),
        }
    }
}

fn sweep_output(oracle: &str, params: Value, s: &oracles::SweepSummary) -> Output {
    Output {
        json: json!({ "oracle": oracle, "params": params, "summary": s, "hypothesis_rate": s.hit_rate() }),
        csv: vec![
            vec!["oracle".into(), "instances".into(), "hypothesis_met".into(), "violations".into()],
            vec![oracle.into(), s.instances.to_string(), s.hypothesis_met.to_string(), s.violations.to_string()],
        ],
        violation: s.violations > 0,
    }
}

fn verify(st: &Settings, oracle: &str, grid: Option<&PathBuf>) -> Result<Output> {
    let g = match grid {
        Some(p) => {
            let kv = read_kv(p)?;
            if kv.is_empty() {
                bail!("grid file {} is empty", p.display());
            }
            Grid(kv)
        }
        None => Grid(BTreeMap::new()),
    };
    let seed = g.get("seed", st.seed())?;
    let exec = st.exec;
    match oracle {
        "pollard" => {
            let gs: String = g.get("group", st.c.group.clone().unwrap_or_else(|| "z".into()))?;
            let group = GroupCtx::parse(&gs).map_err(|e| anyhow!("{e}"))?;
            let width = g.get("width", group.modulus().unwrap_or(10) as u32)?;
            let max_size = g.get("max_size", if group.is_integers() { width } else { 5 })?;
            if width == 0 || width > 24 {
                bail!("width must lie in 1..=24");
            }
            let s = oracles::pollard_sweep(group, width, max_size, exec);
            Ok(sweep_output(oracle, json!({"group": gs, "width": width, "max_size": max_size}), &s))
        }
        "alpha" => {
            let inst = g.get("instances", 10_000u64)?;
            let n_max = g.get("n_max", 16u64)?;
            let size_max = g.get("size_max", 6usize)?;
            if n_max == 0 || n_max > 20 {
                bail!("n_max must lie in 1..=20");
            }
            let s = oracles::alpha_sweep(seed, inst, n_max, size_max, exec);
            Ok(sweep_output(oracle, json!({"instances": inst, "n_max": n_max, "size_max": size_max, "seed": seed}), &s))
        }
        "kneser" => {
            let target = g.get("target", 10_000u64)?;
            let cap = g.get("max_instances", 400_000u64)?;
            let s = oracles::kneser_sweep(seed, target, cap, exec)?;
            Ok(sweep_output(oracle, json!({"target": target, "seed": seed}), &s))
        }
        "almost1" => {
            let inst = g.get("instances", 2000u64)?;
            let s = oracles::almost1_sweep(seed, inst, exec)?;
            Ok(sweep_output(oracle, json!({"instances": inst, "seed": seed}), &s))
        }
        "freiman" => {
            let inst = g.get("instances", 200u64)?;
            let eps = g.num("eps", st.eps(1.0 / 2500.0)?)?;
            let s = stability::freiman_sweep(seed, inst, eps, exec)?;
            Ok(sweep_output(oracle, json!({"instances": inst, "eps": eps, "seed": seed}), &s))
        }
        "relative" => {
            let inst = g.get("instances", 24u64)?;
            let eps = g.num("eps", st.eps(1.0 / 1024.0)?)?;
            let s = stability::relative_sweep(seed, inst, eps, exec)?;
            Ok(sweep_output(oracle, json!({"instances": inst, "eps": eps, "seed": seed}), &s))
        }
        "binom" => {
            let d = BinomGridSpec::default();
            let spec = BinomGridSpec {
                s_min: g.get("s_min", d.s_min)?,
                s_max: g.get("s_max", d.s_max)?,
                t_min: g.get("t_min", d.t_min)?,
                t_max: g.get("t_max", d.t_max)?,
                alphas: g.list("alphas", d.alphas.clone(), parse_ratio)?,
                m_multipliers: g.list("m_multipliers", d.m_multipliers.clone(), |x| Ok(x.parse()?))?,
                rho_points: g.get("rho_points", d.rho_points)?,
            };
            if spec.s_min > spec.s_max || spec.t_min > spec.t_max || spec.alphas.is_empty() || spec.rho_points == 0 {
                bail!("binomial grid is empty");
            }
            let s = oracles::binom_lemma_grid(&spec, exec);
            Ok(Output {
                json: json!({"oracle": oracle, "params": spec_json(&spec), "summary": s}),
                csv: vec![
                    vec!["oracle".into(), "cells".into(), "exact_rechecks".into(), "violations".into()],
                    vec![oracle.into(), s.cells.to_string(), s.exact_rechecks.to_string(), s.violations.to_string()],
                ],
                violation: s.violations > 0,
            })
        }
        "containers" => {
            let modulus = g.get("modulus", 7u64)?;
            let m = g.get("m", 2u64)?;
            let b = g.get("b", 2u64)?;
            let q = g.get("q", 2u64)?;
            let (rn, rd) = parse_ratio(&g.get("R", "4".to_string())?)?;
            let grp = GroupCtx::cyclic(modulus)?;
            let f = ElemSet::new(grp, 0..modulus as i64)?;
            let h = PartedHypergraph::triple(&f, &f, &f)?;
            let pack = ParamPack::new(&h, m, b, q, BigRational::new(BigInt::from(rn), BigInt::from(rd)))?;
            let cond = containers::check_degree_condition(&h, &pack)?;
            let sets = containers::triple_independent_sets(&h, grp, pack.m);
            let rep = containers::verify_container_properties(&h, &pack, &sets, exec)?;
            let bad = rep.total_failures() > 0 || !cond.holds;
            Ok(Output {
                json: json!({"oracle": oracle, "params": {"modulus": modulus, "m": m, "b": b, "q": q, "R": format!("{rn}/{rd}")},
                    "degree_condition": cond, "report": rep}),
                csv: vec![
                    vec!["oracle".into(), "inputs".into(), "failures".into(), "distinct_fingerprints".into()],
                    vec![oracle.into(), rep.inputs.to_string(), rep.total_failures().to_string(), rep.distinct_fingerprints.to_string()],
                ],
                violation: bad,
            })
        }
        "delta" => {
            let count = g.get("count", 100u64)?;
            let r_max = g.get("r_max", 3usize)?;
            let r0_max = g.get("r0_max", 3u32)?;
            if count == 0 || r_max == 0 || r0_max == 0 {
                bail!("delta grid is empty");
            }
            let d = containers::delta_agreement(seed, count, r_max, r0_max, exec);
            Ok(Output {
                json: json!({"oracle": oracle, "params": {"count": count, "r_max": r_max, "r0_max": r0_max, "seed": seed}, "summary": d}),
                csv: vec![
                    vec!["oracle".into(), "hypergraphs".into(), "entries".into(), "mismatches".into()],
                    vec![oracle.into(), d.hypergraphs.to_string(), d.entries.to_string(), d.mismatches.to_string()],
                ],
                violation: d.mismatches > 0,
            })
        }
        other => bail!("unknown oracle {other}"),
    }
}

fn spec_json(s: &BinomGridSpec) -> Value {
    to_json(s)
}

// ---------------------------------------------------------------------------
// experiments

fn regime_notes(spec: &PairSpec) -> Vec<String> {
    let mut v = Vec::new();
    let ln_n = (spec.n as f64).ln();
    if (spec.s2 as f64) < ln_n {
        v.push(format!("s2 below ln n = {ln_n:.4}: outside asymptotic regime"));
    }
    if spec.s1 + spec.s2 > spec.m {
        v.push("m below s1 + s2: outside the structure range".into());
    }
    v
}

fn enumerate(st: &Settings) -> Result<Output> {
    let spec = st.pair_spec()?;
    let e = experiments::enumerate_pairs(&spec, DEFAULT_BUDGET, st.exec)?;
    let mut csv = vec![vec!["sumset_size".to_string(), "pairs".to_string()]];
    csv.extend(e.histogram.iter().map(|(k, c)| vec![k.to_string(), c.to_string()]));
    Ok(Output { json: json!({"result": e, "notes": regime_notes(&spec)}), csv, violation: false })
}

fn sample_opts(st: &Settings) -> SampleOptions {
    SampleOptions::new(st.c.trials.unwrap_or(1000), st.seed())
}

fn pair_text(x: &[i64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn sample(st: &Settings) -> Result<Output> {
    let spec = st.pair_spec()?;
    let s = experiments::sample_pairs(&spec, &sample_opts(st), st.exec)?;
    let mut csv = vec![vec!["index".to_string(), "x1".to_string(), "x2".to_string()]];
    csv.extend(s.pairs.iter().enumerate().map(|(i, p)| vec![i.to_string(), pair_text(&p.x1), pair_text(&p.x2)]));
    Ok(Output { json: to_json(&s), csv, violation: false })
}

fn structure(st: &Settings) -> Result<Output> {
    let spec = st.pair_spec()?;
    if !spec.group.is_integers() {
        bail!("structure reports are defined over the integers");
    }
    if spec.s1 + spec.s2 > spec.m {
        bail!("structure mode needs m >= s1 + s2");
    }
    let (pairs, source) = match experiments::list_pairs(&spec, DEFAULT_BUDGET) {
        Ok(p) if st.c.trials.is_none() => (p, json!("exhaustive")),
        _ => {
            let s = experiments::sample_pairs(&spec, &sample_opts(st), st.exec)?;
            (s.pairs, to_json(&s.sampler))
        }
    };
    let slack = st.c.slack.unwrap_or(0.0);
    let r = experiments::structure_report(&pairs, spec.s1, spec.s2, spec.m, slack, st.exec)?;
    let mut csv = vec![vec!["total_exceptional".to_string(), "pairs".to_string()]];
    csv.extend(r.distribution.iter().map(|(k, c)| vec![k.to_string(), c.to_string()]));
    let summary = json!({
        "spec": spec, "source": source, "pairs": pairs.len(), "caps": r.caps, "slack": slack,
        "distribution": r.distribution, "median_exceptional": r.median_exceptional,
        "max_exceptional": r.max_exceptional, "notes": regime_notes(&spec),
    });
    Ok(Output { json: summary, csv, violation: false })
}

fn count(st: &Settings) -> Result<Output> {
    let spec = st.pair_spec()?;
    let e = experiments::enumerate_pairs(&spec, DEFAULT_BUDGET, st.exec)?;
    let r = experiments::count_report(&spec, e.count, true);
    let csv = kv_rows(&[
        ("count", r.count.to_string()),
        ("benchmark", r.benchmark.clone()),
        ("lambda", r.lambda.to_string()),
        ("beta_used", r.beta_used.to_string()),
        ("ln_ratio", r.ln_ratio.to_string()),
        ("ln_factor", r.ln_factor.to_string()),
        ("holds", r.holds.to_string()),
    ]);
    Ok(Output { json: json!({"report": r, "notes": regime_notes(&spec)}), csv, violation: !r.holds })
}

fn run_family(st: &Settings) -> Result<Output> {
    let group = st.group()?;
    let n = st.need(st.c.n, "n")?;
    let s1 = st.need(st.c.s1, "s1")?;
    let s2 = st.c.s2.unwrap_or(s1);
    let m = st.need(st.c.m, "m")?;
    let eps = st.eps(0.5)?;
    let start = if group.is_integers() { 1 } else { 0 };
    let f = ElemSet::new(group, start..start + n as i64)?;
    let out = family::build_family(&f, &f, s1, s2, m, eps, st.exec)?;
    let rep = family::verify_family(&out.family, &f, &f, s1, s2, m, eps, st.exec)?;
    let stats_ok = out.stats.height <= out.stats.height_bound && out.stats.branching_ok;
    let mut csv = vec![["a1", "a2", "b", "leaf_kind", "len_a1", "len_a2", "len_b"].map(String::from).to_vec()];
    for e in &out.family {
        csv.push(vec![
            e.a1.to_text(),
            e.a2.to_text(),
            e.b.to_text(),
            e.leaf_kind.name().to_string(),
            e.a1.len().to_string(),
            e.a2.len().to_string(),
            e.b.len().to_string(),
        ]);
    }
    let entries: Vec<Value> = out
        .family
        .iter()
        .map(|e| {
            json!({"a1": e.a1.elements(), "a2": e.a2.elements(), "b": e.b.elements(), "leaf_kind": e.leaf_kind,
                "sizes": [e.a1.len(), e.a2.len(), e.b.len()]})
        })
        .collect();
    Ok(Output {
        json: json!({"params": out.params, "tree_stats": out.stats, "verification": rep, "family": entries}),
        csv,
        violation: rep.violations() > 0 || !stats_ok || out.stats.container_check_failures > 0,
    })
}

fn run(cli: Cli) -> Result<bool> {
    let st = Settings::new(cli.common)?;
    let out = match &cli.cmd {
        Cmd::Verify { oracle, grid } => verify(&st, oracle, grid.as_ref())?,
        Cmd::Enumerate => enumerate(&st)?,
        Cmd::Sample => sample(&st)?,
        Cmd::Structure => structure(&st)?,
        Cmd::Count => count(&st)?,
        Cmd::Family => run_family(&st)?,
    };
    let bytes = render(&out, st.format())?;
    match &st.c.out {
        Some(p) => fs::write(p, &bytes).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(out.violation)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("violation found");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
