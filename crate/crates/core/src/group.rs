//! Ambient groups: the integers and cyclic groups `Z/nZ`.

use serde::{Deserialize, Serialize};
use std::fmt;

use num_integer::Integer;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("cyclic group modulus must be positive")]
    ZeroModulus,
    #[error("integer overflow adding {0} and {1}")]
    Overflow(i64, i64),
    #[error("element {elem} is not a canonical residue modulo {modulus}")]
    InvalidElement { elem: i64, modulus: u64 },
    #[error("cannot parse group spec {0:?} (expected `z` or `zn:<n>`)")]
    BadSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "modulus")]
pub enum GroupKind {
    Integers,
    Cyclic(u64),
}

/// An abelian group context. Immutable and `Copy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupCtx {
    kind: GroupKind,
}

impl GroupCtx {
    pub fn new(kind: GroupKind) -> Result<Self, GroupError> {
        if let GroupKind::Cyclic(0) = kind {
            return Err(GroupError::ZeroModulus);
        }
        Ok(GroupCtx { kind })
    }

    pub fn integers() -> Self {
        GroupCtx {
            kind: GroupKind::Integers,
        }
    }

    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        Self::new(GroupKind::Cyclic(n))
    }

    /// Parses `z` or `zn:<n>`.
    pub fn parse(spec: &str) -> Result<Self, GroupError> {
        let s = spec.trim().to_ascii_lowercase();
        if s == "z" {
            return Ok(Self::integers());
        }
        match s.strip_prefix("zn:").map(str::parse::<u64>) {
            Some(Ok(n)) => Self::cyclic(n),
            _ => Err(GroupError::BadSpec(spec.to_string())),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn modulus(&self) -> Option<u64> {
        match self.kind {
            GroupKind::Integers => None,
            GroupKind::Cyclic(n) => Some(n),
        }
    }

    pub fn is_integers(&self) -> bool {
        matches!(self.kind, GroupKind::Integers)
    }

    /// `|G|`, or `None` for the integers.
    pub fn order(&self) -> Option<u64> {
        self.modulus()
    }

    /// Canonical representative of `x` (least nonnegative residue for cyclic groups).
    pub fn reduce(&self, x: i64) -> i64 {
        match self.kind {
            GroupKind::Integers => x,
            GroupKind::Cyclic(n) => x.rem_euclid(n as i64),
        }
    }

    pub fn is_valid(&self, x: i64) -> bool {
        match self.kind {
            GroupKind::Integers => true,
            GroupKind::Cyclic(n) => x >= 0 && (x as u64) < n,
        }
    }

    pub fn check(&self, x: i64) -> Result<i64, GroupError> {
        if self.is_valid(x) {
            Ok(x)
        } else {
            Err(GroupError::InvalidElement {
                elem: x,
                modulus: self.modulus().unwrap_or(0),
            })
        }
    }

    /// Group addition. Overflow in the integers is an error, never wraparound.
    pub fn add(&self, a: i64, b: i64) -> Result<i64, GroupError> {
        match self.kind {
            GroupKind::Integers => a.checked_add(b).ok_or(GroupError::Overflow(a, b)),
            GroupKind::Cyclic(n) => {
                let n = n as i128;
                Ok(((a as i128 + b as i128).rem_euclid(n)) as i64)
            }
        }
    }

    pub fn neg(&self, a: i64) -> Result<i64, GroupError> {
        match self.kind {
            GroupKind::Integers => a.checked_neg().ok_or(GroupError::Overflow(0, a)),
            GroupKind::Cyclic(n) => Ok((-(a as i128)).rem_euclid(n as i128) as i64),
        }
    }

    pub fn sub(&self, a: i64, b: i64) -> Result<i64, GroupError> {
        self.add(a, self.neg(b)?)
    }

    /// Ascending cardinalities of all finite subgroups.
    pub fn subgroup_sizes(&self) -> Vec<u64> {
        match self.kind {
            GroupKind::Integers => vec![1],
            GroupKind::Cyclic(n) => divisors(n),
        }
    }

    /// Largest finite subgroup size that is at most `t`; 0 when `t < 1`.
    pub fn beta(&self, t: f64) -> u64 {
        if t.is_nan() || t < 1.0 {
            return 0;
        }
        self.subgroup_sizes()
            .into_iter()
            .filter(|&h| (h as f64) <= t)
            .max()
            .unwrap_or(0)
    }

    /// Order of the subgroup generated by `elems`, or `None` if it is infinite.
    pub fn generated_order<I: IntoIterator<Item = i64>>(&self, elems: I) -> Option<u64> {
        match self.kind {
            GroupKind::Integers => {
                if elems.into_iter().all(|x| x == 0) {
                    Some(1)
                } else {
                    None
                }
            }
            GroupKind::Cyclic(n) => {
                let g = elems
                    .into_iter()
                    .fold(n, |acc, x| acc.gcd(&(self.reduce(x) as u64)));
                Some(n / g)
            }
        }
    }
}

impl fmt::Display for GroupCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Integers => write!(f, "z"),
            GroupKind::Cyclic(n) => write!(f, "zn:{n}"),
        }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Sizes of all subsets of Z/n closed under addition (hence subgroups).
    fn brute_subgroup_sizes(n: u64) -> Vec<u64> {
        // Every subgroup of Z/n is cyclic, so closing each single generator
        // under addition reaches all of them.
        let mut sizes = std::collections::BTreeSet::new();
        for g in 0..n {
            let mut set = vec![false; n as usize];
            let mut x = 0u64;
            loop {
                if set[x as usize] {
                    break;
                }
                set[x as usize] = true;
                x = (x + g) % n;
            }
            let members: Vec<u64> = (0..n).filter(|&i| set[i as usize]).collect();
            let closed = members
                .iter()
                .all(|&a| members.iter().all(|&b| set[((a + b) % n) as usize]));
            assert!(closed);
            sizes.insert(members.len() as u64);
        }
        sizes.into_iter().collect()
    }

    #[test]
    fn constructors() {
        assert_eq!(GroupCtx::cyclic(12).unwrap().modulus(), Some(12));
        assert!(GroupCtx::integers().is_integers());
        assert_eq!(GroupCtx::cyclic(0), Err(GroupError::ZeroModulus));
        assert_eq!(GroupCtx::parse("zn:7").unwrap(), GroupCtx::cyclic(7).unwrap());
        assert_eq!(GroupCtx::parse("Z").unwrap(), GroupCtx::integers());
        assert!(GroupCtx::parse("q").is_err());
    }

    #[test]
    fn subgroup_size_examples() {
        let g12 = GroupCtx::cyclic(12).unwrap();
        assert_eq!(g12.subgroup_sizes(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(GroupCtx::integers().subgroup_sizes(), vec![1]);
        assert_eq!(GroupCtx::cyclic(7).unwrap().subgroup_sizes(), vec![1, 7]);
    }

    #[test]
    fn subgroup_sizes_match_closure_oracle() {
        for n in 1..=200 {
            let g = GroupCtx::cyclic(n).unwrap();
            assert_eq!(g.subgroup_sizes(), brute_subgroup_sizes(n), "n = {n}");
        }
    }

    #[test]
    fn beta_examples() {
        assert_eq!(GroupCtx::cyclic(12).unwrap().beta(5.0), 4);
        assert_eq!(GroupCtx::integers().beta(1e6), 1);
        assert_eq!(GroupCtx::cyclic(7).unwrap().beta(6.5), 1);
        assert_eq!(GroupCtx::cyclic(7).unwrap().beta(0.5), 0);
    }

    #[test]
    fn beta_monotone_and_divides() {
        for n in 1..=60u64 {
            let g = GroupCtx::cyclic(n).unwrap();
            let mut prev = 0;
            for t10 in 0..=(10 * n + 10) {
                let b = g.beta(t10 as f64 / 10.0);
                assert!(b >= prev);
                if b > 0 {
                    assert_eq!(n % b, 0);
                }
                prev = b;
            }
            assert_eq!(g.beta(n as f64), n);
        }
    }

    #[test]
    fn arithmetic_is_closed_and_checked() {
        let g = GroupCtx::cyclic(12).unwrap();
        for a in 0..12 {
            for b in 0..12 {
                assert!(g.is_valid(g.add(a, b).unwrap()));
            }
            assert_eq!(g.add(a, g.neg(a).unwrap()).unwrap(), 0);
        }
        let z = GroupCtx::integers();
        assert_eq!(z.add(i64::MAX, 1), Err(GroupError::Overflow(i64::MAX, 1)));
        assert_eq!(z.sub(3, 5).unwrap(), -2);
    }

    #[test]
    fn generated_orders() {
        let g = GroupCtx::cyclic(12).unwrap();
        assert_eq!(g.generated_order([4, 8]), Some(3));
        assert_eq!(g.generated_order([]), Some(1));
        assert_eq!(g.generated_order([3, 2]), Some(12));
        assert_eq!(GroupCtx::integers().generated_order([0]), Some(1));
        assert_eq!(GroupCtx::integers().generated_order([0, 2]), None);
    }
}
