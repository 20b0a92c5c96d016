//! Product-of-binomials deviation bound:
//!
//! `C((t/(s+t) - 2ρ + 2ρ²) m, t) · C((s/(s+t) + 2ρ) m, s)
//!     <= exp(-ρ²(s+t)) · C(sm/(s+t), s) · C(tm/(s+t), t)`
//!
//! with `ε = ρ²`. Upper indices are real, so binomials are the generalized
//! ones `C(y, k) = y(y-1)...(y-k+1)/k!`. Dividing out turns the check into a
//! product of `s + t` ratios, evaluated first in `f64` logs and, near a tie,
//! again in exact rationals against rigorous series bounds for `exp`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{pre, OracleError};
use crate::combin::binom;
use crate::exec::Exec;

/// Float verdicts closer than this to a tie are re-checked exactly.
pub const FLOAT_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinomVerdict {
    pub m: u64,
    pub s: u64,
    pub t: u64,
    pub alpha: String,
    pub rho: String,
    pub eps: f64,
    /// `ln(lhs / rhs)` in floating point.
    pub log_ratio: f64,
    /// `-eps (s + t)`.
    pub log_bound: f64,
    /// "float" or "exact".
    pub method: String,
    pub holds: bool,
    /// Same inequality with every upper index floored to an integer; reported
    /// for comparison only.
    pub floored_holds: Option<bool>,
}

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `(rho_lo, rho_hi)`: the admissible range of `sqrt(eps)`.
pub fn rho_range(m: u64, s: u64, t: u64, alpha: &BigRational) -> (BigRational, BigRational) {
    let mn = s.min(t);
    let lo = rat(32 * mn, (s + t) * m);
    let hi = alpha * rat(mn, 32 * (s + t));
    (lo, hi)
}

/// Checks the parameter conditions of the bound.
pub fn binom_preconditions(m: u64, s: u64, t: u64, alpha: &BigRational, rho: &BigRational) -> Result<(), OracleError> {
    pre(m >= 1 && s >= 1 && t >= 1, || "m, s, t must be positive".into())?;
    pre(alpha.is_positive() && *alpha <= BigRational::one(), || format!("need 0 < alpha <= 1, got {alpha}"))?;
    let st = BigRational::from_integer(BigInt::from(s + t));
    pre(BigRational::from_integer(BigInt::from(m)) >= (BigRational::one() + alpha) * &st, || {
        format!("need m >= (1+alpha)(s+t), got m={m}, s+t={}", s + t)
    })?;
    pre(&st * alpha >= rat(32, 1), || format!("need s+t >= 32/alpha, got s+t={}", s + t))?;
    let (lo, hi) = rho_range(m, s, t, alpha);
    pre(lo <= hi, || format!("empty eps range for m={m}, s={s}, t={t}, alpha={alpha} (needs m >= 1024/alpha)"))?;
    pre(*rho >= lo && *rho <= hi, || format!("sqrt(eps)={rho} outside [{lo}, {hi}]"))?;
    Ok(())
}

struct Terms {
    a_t: BigRational,
    a_s: BigRational,
    c: BigRational,
    d: BigRational,
}

fn terms(m: u64, s: u64, t: u64, rho: &BigRational) -> Terms {
    let mm = BigRational::from_integer(BigInt::from(m));
    let two = rat(2, 1);
    Terms {
        a_t: rat(t * m, s + t),
        a_s: rat(s * m, s + t),
        c: (&two * rho - &two * rho * rho) * &mm,
        d: &two * rho * &mm,
    }
}

/// `ln(lhs/rhs)` in f64, or `None` if some factor is not positive.
fn float_log_ratio(s: u64, t: u64, tm: &Terms) -> Option<f64> {
    let (a_t, a_s, c, d) = (to_f64(&tm.a_t), to_f64(&tm.a_s), to_f64(&tm.c), to_f64(&tm.d));
    let mut acc = 0.0;
    for i in 0..t {
        let den = a_t - i as f64;
        let y = -c / den;
        if den <= 0.0 || y <= -1.0 {
            return None;
        }
        acc += y.ln_1p();
    }
    for j in 0..s {
        let den = a_s - j as f64;
        if den <= 0.0 {
            return None;
        }
        acc += (d / den).ln_1p();
    }
    Some(acc)
}

fn exact_ratio(s: u64, t: u64, tm: &Terms) -> BigRational {
    let mut num = BigRational::one();
    for i in 0..t {
        let den = &tm.a_t - BigRational::from_integer(BigInt::from(i));
        num *= (&den - &tm.c) / den;
    }
    for j in 0..s {
        let den = &tm.a_s - BigRational::from_integer(BigInt::from(j));
        num *= (&den + &tm.d) / den;
    }
    num
}

/// Lower and upper rational bounds on `exp(x)` for `0 <= x`, from the Taylor
/// polynomial of degree `n` and a geometric tail bound.
pub fn exp_bounds(x: &BigRational, n: u32) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    for k in 0..=n {
        if k > 0 {
            term = term * x / BigRational::from_integer(BigInt::from(k));
        }
        sum += &term;
    }
    let next = term * x / BigRational::from_integer(BigInt::from(n + 1));
    let q = x / BigRational::from_integer(BigInt::from(n + 2));
    assert!(q < BigRational::one(), "series too short for x");
    let upper = &sum + next / (BigRational::one() - q);
    (sum, upper)
}

/// Decides `v * exp(x) <= w` exactly; `None` if undecided at every depth tried.
fn exact_le_times_exp(v: &BigRational, x: &BigRational, w: &BigRational) -> Option<bool> {
    if !v.is_positive() {
        return Some(true);
    }
    let start = x.to_f64().map(|f| f.ceil() as u32 + 8).unwrap_or(16);
    let mut n = start.max(8);
    while n < start + 400 {
        let (lo, hi) = exp_bounds(x, n);
        if v * &hi <= *w {
            return Some(true);
        }
        if v * &lo > *w {
            return Some(false);
        }
        n *= 2;
    }
    None
}

fn floor_rat(x: &BigRational) -> BigUint {
    let f = x.floor().to_integer();
    if f.is_negative() {
        BigUint::zero()
    } else {
        f.to_biguint().expect("nonnegative")
    }
}

fn floored_check(m: u64, s: u64, t: u64, rho: &BigRational) -> Option<bool> {
    let mm = BigRational::from_integer(BigInt::from(m));
    let two = rat(2, 1);
    let y1 = (rat(t, s + t) - &two * rho + &two * rho * rho) * &mm;
    let y2 = (rat(s, s + t) + &two * rho) * &mm;
    let idx = |x: &BigRational| floor_rat(x).to_u64().unwrap_or(u64::MAX);
    let lhs = binom(idx(&y1), t) * binom(idx(&y2), s);
    let rhs = binom(s * m / (s + t), s) * binom(t * m / (s + t), t);
    let x = rho * rho * BigRational::from_integer(BigInt::from(s + t));
    exact_le_times_exp(
        &BigRational::from_integer(BigInt::from(lhs)),
        &x,
        &BigRational::from_integer(BigInt::from(rhs)),
    )
}

/// Evaluates the bound without checking the parameter conditions.
pub fn binom_lemma_eval(
    m: u64,
    s: u64,
    t: u64,
    alpha: &BigRational,
    rho: &BigRational,
    force_exact: bool,
    with_floored: bool,
) -> BinomVerdict {
    let tm = terms(m, s, t, rho);
    let eps_r = rho * rho;
    let eps = to_f64(&eps_r);
    let log_bound = -eps * (s + t) as f64;
    let flog = float_log_ratio(s, t, &tm);
    let log_ratio = flog.unwrap_or(f64::NAN);
    let decided = match flog {
        Some(l) if !force_exact && l - log_bound < -FLOAT_TIE_TOL => Some(true),
        Some(l) if !force_exact && l - log_bound > FLOAT_TIE_TOL => Some(false),
        _ => None,
    };
    let (method, holds) = match decided {
        Some(h) => ("float", h),
        None => {
            let ratio = exact_ratio(s, t, &tm);
            let x = &eps_r * BigRational::from_integer(BigInt::from(s + t));
            ("exact", exact_le_times_exp(&ratio, &x, &BigRational::one()).unwrap_or(false))
        }
    };
    BinomVerdict {
        m,
        s,
        t,
        alpha: alpha.to_string(),
        rho: rho.to_string(),
        eps,
        log_ratio,
        log_bound,
        method: method.into(),
        holds,
        floored_holds: if with_floored { floored_check(m, s, t, rho) } else { None },
    }
}

/// Checks the bound at admissible parameters; inadmissible ones are errors.
pub fn binom_lemma_check(m: u64, s: u64, t: u64, alpha: &BigRational, rho: &BigRational) -> Result<BinomVerdict, OracleError> {
    binom_preconditions(m, s, t, alpha, rho)?;
    Ok(binom_lemma_eval(m, s, t, alpha, rho, false, true))
}

/// Rational approximation of `sqrt(eps)` for float inputs.
pub fn rho_from_eps(eps: f64) -> BigRational {
    BigRational::from_float(eps.sqrt()).unwrap_or_else(BigRational::zero)
}

/// Sweep grid: every `s, t` in the ranges, each `alpha`, several `m` from the
/// smallest admissible value upward, and `rho_points` evenly spaced values
/// across the admissible range of `sqrt(eps)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinomGridSpec {
    pub s_min: u64,
    pub s_max: u64,
    pub t_min: u64,
    pub t_max: u64,
    /// `(numerator, denominator)` pairs.
    pub alphas: Vec<(u64, u64)>,
    /// Multipliers applied to the smallest admissible `m`; 0 means `m_min + 1`.
    pub m_multipliers: Vec<u64>,
    pub rho_points: u64,
}

impl Default for BinomGridSpec {
    fn default() -> Self {
        BinomGridSpec {
            s_min: 32,
            s_max: 128,
            t_min: 32,
            t_max: 128,
            alphas: vec![(1, 2), (1, 1)],
            m_multipliers: vec![1, 0, 2, 4, 16],
            rho_points: 5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BinomGridSummary {
    pub cells: u64,
    pub exact_rechecks: u64,
    pub violations: u64,
    /// Largest `log_ratio - log_bound` seen; negative means every cell had room.
    pub worst_margin: f64,
    pub first_violation: Option<BinomVerdict>,
}

impl BinomGridSummary {
    fn merge(mut self, o: BinomGridSummary) -> BinomGridSummary {
        self.cells += o.cells;
        self.exact_rechecks += o.exact_rechecks;
        self.violations += o.violations;
        self.worst_margin = self.worst_margin.max(o.worst_margin);
        if self.first_violation.is_none() {
            self.first_violation = o.first_violation;
        }
        self
    }
}

/// Smallest `m` with `m >= (1+alpha)(s+t)` and `m >= 1024/alpha`.
pub fn min_admissible_m(s: u64, t: u64, alpha: &BigRational) -> u64 {
    let a = ((BigRational::one() + alpha) * rat(s + t, 1)).ceil().to_integer();
    let b = (rat(1024, 1) / alpha).ceil().to_integer();
    a.max(b).to_u64().expect("small")
}

pub fn grid_cells(spec: &BinomGridSpec) -> Vec<(u64, u64, BigRational, u64, BigRational)> {
    let mut cells = Vec::new();
    for s in spec.s_min..=spec.s_max {
        for t in spec.t_min..=spec.t_max {
            for &(an, ad) in &spec.alphas {
                let alpha = rat(an, ad);
                if rat(s + t, 1) * &alpha < rat(32, 1) {
                    continue;
                }
                let m0 = min_admissible_m(s, t, &alpha);
                let mut ms: Vec<u64> = spec
                    .m_multipliers
                    .iter()
                    .map(|&k| if k == 0 { m0 + 1 } else { m0 * k })
                    .collect();
                ms.sort_unstable();
                ms.dedup();
                for m in ms {
                    let (lo, hi) = rho_range(m, s, t, &alpha);
                    let p = spec.rho_points.max(1);
                    for k in 0..p {
                        let rho = if p == 1 {
                            lo.clone()
                        } else {
                            &lo + (&hi - &lo) * rat(k, p - 1)
                        };
                        cells.push((s, t, alpha.clone(), m, rho));
                    }
                }
            }
        }
    }
    cells
}

pub fn binom_lemma_grid(spec: &BinomGridSpec, exec: Exec) -> BinomGridSummary {
    let cells = grid_cells(spec);
    exec.map_reduce(
        &cells,
        || BinomGridSummary {
            worst_margin: f64::NEG_INFINITY,
            ..BinomGridSummary::default()
        },
        |(s, t, alpha, m, rho)| {
            let v = binom_lemma_eval(*m, *s, *t, alpha, rho, false, false);
            let bad = !v.holds;
            BinomGridSummary {
                cells: 1,
                exact_rechecks: (v.method == "exact") as u64,
                violations: bad as u64,
                worst_margin: v.log_ratio - v.log_bound,
                first_violation: bad.then_some(v),
            }
        },
        BinomGridSummary::merge,
    )
}
