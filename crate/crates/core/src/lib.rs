//! Exact integral bookkeeping for intermediate Jacobian fibrations of cubic
//! fourfolds and their Beauville–Mukai analogues.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`] and [`abelian`]: integer matrices, Smith normal form, kernels,
//!   cokernels and finitely generated abelian groups.
//! * [`lattice`]: integral lattices, invariants and the standard lattices.
//! * [`brauer`]: K3-type Hodge data and Brauer group calculus.
//! * [`section_ring`]: cohomology of the universal hyperplane section and the
//!   cohomology of the complex `Λ•`.
//! * [`analytic`]: symbolic groups with divisible parts, Deligne cohomology and
//!   a small spectral-sequence engine.
//! * [`fujiki`]: Fujiki relation and BBF form identities.
//! * [`sha`]: report assembly.
//! * [`config`]: JSON/TOML input.

pub mod abelian;
pub mod analytic;
pub mod brauer;
pub mod config;
pub mod error;
pub mod fujiki;
pub mod lattice;
pub mod matrix;
pub mod section_ring;
pub mod sha;

pub use abelian::{FinAbGroup, SnfDecomposition};
pub use error::{Error, Result};
pub use lattice::{Lattice, LatticeInvariants, LatticeVector};
pub use matrix::IntegerMatrix;
