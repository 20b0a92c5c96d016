//! Subset enumeration and exact binomials.

use num_bigint::BigUint;
use num_traits::One;

/// Exact `C(n, k)`.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, k)` as f64 (saturating).
pub fn binom_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binom(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// All `k`-subsets of `{0..n}` as bitmasks, in increasing numeric order.
pub fn k_subsets(n: u32, k: u32) -> Vec<u128> {
    assert!(n <= 128);
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    if k == 0 {
        out.push(0);
        return out;
    }
    let mut x: u128 = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
    let limit_bit = if n == 128 { None } else { Some(1u128 << n) };
    loop {
        out.push(x);
        // Gosper's hack
        let c = x & x.wrapping_neg();
        let r = match x.checked_add(c) {
            Some(r) => r,
            None => break,
        };
        if r == 0 {
            break;
        }
        x = (((r ^ x) >> 2) / c) | r;
        if let Some(l) = limit_bit {
            if x >= l {
                break;
            }
        }
    }
    out
}

/// All subsets of `{0..n}` with at most `k` elements, as index vectors.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            return;
        }
        for i in start..n {
            cur.push(i);
            out.push(cur.clone());
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn mask_indices(mask: u128) -> Vec<usize> {
    let mut v = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        v.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(10, 3), BigUint::from(120u32));
        assert_eq!(binom(3, 5), BigUint::from(0u32));
        assert_eq!(binom(60, 30).to_string(), "118264581564861424");
        assert!((binom_f64(20, 10) - 184756.0).abs() < 1e-6);
        assert!((ln_binom(20, 10) - 184756f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn subset_counts() {
        for n in 0..=12u32 {
            for k in 0..=n {
                let v = k_subsets(n, k);
                assert_eq!(v.len() as f64, binom_f64(n as u64, k as u64));
                assert!(v.iter().all(|m| m.count_ones() == k && (n == 128 || *m < 1u128 << n)));
                assert!(v.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(subsets_up_to(5, 2).len(), 1 + 5 + 10);
        assert_eq!(mask_indices(0b1011), vec![0, 1, 3]);
    }
}
