//! Symbolic relation algebra over binary decision diagrams, with an exact
//! solver for constructive control of Condorcet elections by deleting voters.
//!
//! Layers, bottom-up:
//!
//! - [`bdd`]: reduced ordered BDD kernel.
//! - [`relalg`]: typed relations over finite carriers, plus a dense reference backend.
//! - [`dsl`]: a small relational expression language.
//! - [`election`]: election files, the preference relation, dominance and covering.
//! - [`control`]: relativized dominance/covering and optimal deletion sets.
//! - [`oracle`]: brute-force reference solver.
//! - [`reduction`]: X4C instances and the hardness construction.

pub mod bdd;
pub mod relalg;
pub mod dsl;
pub mod election;
pub mod control;
pub mod oracle;
pub mod reduction;
