//! Constructive Hamiltonicity machinery for digraphs: degree-sequence
//! conditions, matching and 1-factor kernels, the cycle-cover algorithm,
//! regular-pair tools, shifted walks and the clustered Hamilton-cycle
//! assembly, each backed by exact oracles for small instances.

pub mod conditions;
pub mod cover;
pub mod digraph;
pub mod error;
pub mod hamilton;
pub mod matching;
pub mod rational;
pub mod regular;
pub mod walks;
pub mod assembly;
pub mod lab;

pub use digraph::{
    verify_hamilton_cycle, BipartiteGraph, DegreeSequences, Digraph, Direction,
    HamiltonCertificate, OneFactor,
};
pub use error::{Error, Result, Stage};
pub use rational::Rational;
