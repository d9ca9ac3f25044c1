//! Numerical laboratory for the coarse geometry of expander sequences.
//!
//! The crate is organised bottom-up:
//!
//! | module        | contents                                                        |
//! |---------------|-----------------------------------------------------------------|
//! | [`graphs`]    | finite connected graphs, edge metrics, girth, spaces of graphs  |
//! | [`groups`]    | cyclic and `SL(2, Z/q)` groups, quotient towers, characters     |
//! | [`covers`]    | Galois covers from towers, truncated universal covers           |
//! | [`operators`] | finite-propagation block operators, lifting, localization       |
//! | [`spectral`]  | normalized Laplacians, expander certificates, Kazhdan projections |
//! | [`index`]     | index idempotents, traces, d-sequences, the obstruction experiment |
//! | [`rips`]      | Rips complexes and their component splitting                    |
//!
//! Everything is finite and exact up to floating point: operators are
//! matrices over finite index sets with finite-dimensional fibers.

pub mod covers;
pub mod error;
pub mod graphs;
pub mod groups;
pub mod index;
pub mod linalg;
pub mod operators;
pub mod rips;
pub mod spectral;

pub use covers::{CoverKind, CoverMap, FaithfulnessProfile, MetricCoverCheck};
pub use error::{Error, Result};
pub use graphs::{DistanceMatrix, Girth, Graph, SpaceOfGraphs};
pub use groups::{CharacterTable, FiniteGroup, GroupElement, Homomorphism, QuotientTower};
pub use index::{IndexIdempotent, TraceReport};
pub use num_complex::Complex64;
pub use operators::{BlockOperator, GhostProfile, IndexSpace, LocalizationResult};
pub use rips::SimplicialComplex;
pub use spectral::{ExpanderVerdict, SpectralReport};
