//! Cross-module checks: family vs enumeration, sampler vs enumeration,
//! and sequential vs parallel agreement.

use addcomb::experiments::{self, PairSpec, SampleOptions, DEFAULT_BUDGET};
use addcomb::setops::sumset;
use addcomb::{family, oracles, ElemSet, Exec, GroupCtx};

#[test]
fn every_small_sumset_pair_on_z7_lies_in_some_family_entry() {
    let g = GroupCtx::cyclic(7).unwrap();
    let full = family::full_cyclic(7).unwrap();
    let out = family::build_family(&full, &full, 2, 2, 4, 0.5, Exec::Sequential).unwrap();
    let spec = PairSpec::new(g, 7, 2, 2, 4).unwrap();
    let pairs = experiments::list_pairs(&spec, DEFAULT_BUDGET).unwrap();
    assert!(!pairs.is_empty());
    for p in &pairs {
        let x1 = ElemSet::new(g, p.x1.iter().copied()).unwrap();
        let x2 = ElemSet::new(g, p.x2.iter().copied()).unwrap();
        let s = sumset(&x1, &x2).unwrap();
        let hit = out
            .family
            .iter()
            .any(|e| x1.is_subset(&e.a1) && x2.is_subset(&e.a2) && e.b.is_subset(&s));
        assert!(hit, "{p:?} not covered");
    }
}

#[test]
fn sampled_pairs_are_admissible() {
    let spec = PairSpec::new(GroupCtx::integers(), 16, 3, 3, 7).unwrap();
    let out = experiments::sample_pairs(&spec, &SampleOptions::new(300, 9), Exec::default()).unwrap();
    assert_eq!(out.pairs.len(), 300);
    let z = GroupCtx::integers();
    for p in &out.pairs {
        let a = ElemSet::new(z, p.x1.iter().copied()).unwrap();
        let b = ElemSet::new(z, p.x2.iter().copied()).unwrap();
        assert_eq!((a.len(), b.len()), (3, 3));
        assert!(sumset(&a, &b).unwrap().len() <= 7);
        assert!(p.x1.iter().chain(&p.x2).all(|x| (1..=16).contains(x)));
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let spec = PairSpec::new(GroupCtx::cyclic(13).unwrap(), 13, 3, 4, 9).unwrap();
    let a = experiments::enumerate_pairs(&spec, DEFAULT_BUDGET, Exec::Sequential).unwrap();
    let b = experiments::enumerate_pairs(&spec, DEFAULT_BUDGET, Exec::Parallel).unwrap();
    assert_eq!(a.histogram, b.histogram);
    assert_eq!(a.count, b.count);

    let s = oracles::alpha_sweep(3, 500, 12, 5, Exec::Sequential);
    let p = oracles::alpha_sweep(3, 500, 12, 5, Exec::Parallel);
    assert_eq!((s.instances, s.violations), (p.instances, p.violations));

    let opts = SampleOptions::new(50, 4);
    let x = experiments::sample_pairs(&spec, &opts, Exec::Sequential).unwrap();
    let y = experiments::sample_pairs(&spec, &opts, Exec::Parallel).unwrap();
    assert_eq!(x.pairs, y.pairs);
}
