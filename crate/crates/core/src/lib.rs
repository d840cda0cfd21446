//! Exact symbolic engine for quantum cluster algebras at roots of unity.
//!
//! The crate is organised bottom-up:
//!
//! - [`cyclotomic`]: arithmetic in `Z[zeta]` for a primitive `l`-th root of
//!   unity `zeta`, with exact norms and unit tests.
//! - [`torus`]: sparse Laurent elements of a quantum torus twisted by a
//!   skew-symmetric form modulo `l`, with exact left division.
//! - [`seeds`]: compatible pairs, exchange matrices and seed mutation.
//! - [`exchange_graph`]: breadth-first exploration of mutation classes and
//!   comparison with the classical shadow at order one.
//! - [`central`]: central powers, the exchange identity for them, and
//!   Frobenius-type checks against the classical engine.
//! - [`discriminant`]: trace pipelines over free module presentations and
//!   discriminants of cluster algebras over their central subalgebras.
//! - [`weyl`]: quantized Weyl algebras via a rewriting engine, their seeds
//!   and discriminants.
//! - [`kacmoody`]: Cartan data, reduced words, and seed data for quantum
//!   unipotent cells, including degree and discriminant identities.
//! - [`selftest`]: the battery of end-to-end checks shared by the CLI and
//!   the integration tests.

pub mod central;
pub mod cyclotomic;
pub mod discriminant;
pub mod error;
pub mod exchange_graph;
pub mod kacmoody;
pub mod samples;
pub mod seeds;
pub mod selftest;
pub mod torus;
pub mod weyl;

mod intmat;

pub use cyclotomic::{CyclotomicInteger, RootContext};
pub use discriminant::{DiscriminantReport, FreePresentation, TorusPresentation};
pub use error::EngineError;
pub use exchange_graph::{ExchangeGraph, GraphLimits};
pub use kacmoody::{CartanDatum, ReducedWordData, UnipotentSeedData};
pub use seeds::{ExchangeMatrix, Seed};
pub use selftest::{BatteryOptions, CheckOutcome};
pub use torus::{SkewForm, TorusElement};
pub use weyl::{WeylElement, WeylPresentation, WeylSeedReport};
