//! Computational additive combinatorics: sumsets in the integers and cyclic
//! groups, checkable sumset inequalities, a multipartite hypergraph container
//! construction, and an experiment harness for pairs of sets with small sumset.

pub mod combin;
pub mod containers;
pub mod exec;
pub mod experiments;
pub mod family;
pub mod group;
pub mod oracles;
pub mod setops;

pub use exec::Exec;
pub use group::{GroupCtx, GroupError, GroupKind};
pub use setops::{ApWindow, ElemSet, LinkGraph, SetError};
