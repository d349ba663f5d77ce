//! Exact Hochschild cochain calculus on split spaces `A1 ⊕ A2`.
//!
//! Cochains are dense arrays of rationals; everything is computed exactly.
//! The crate covers the Gerstenhaber bracket and its relatives, bidegree
//! bookkeeping, twisting of a multiplication by a linear map, and verifiers
//! for operator identities of Rota-Baxter, Maurer-Cartan and Nijenhuis type.

pub mod algebra;
pub mod bigraded;
pub mod catalog;
pub mod cochain;
pub mod error;
pub mod filter;
pub mod io;
pub mod operators;
pub mod rational;
pub mod twisting;
pub mod verify;

pub use algebra::{Algebra, Bimodule, DualConvention, LinearOp, Role};
pub use bigraded::{ProtoStructure, SplitContext, StructureClass};
pub use cochain::Cochain;
pub use error::{Error, Result};
pub use rational::Rational;
