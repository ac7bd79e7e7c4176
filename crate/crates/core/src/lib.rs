//! Harmonic analysis on finite groups.
//!
//! The crate covers scaled tori, finite Heisenberg groups and dihedral
//! groups: their irreducible representations, the non-commutative Fourier
//! transform, recovery of subgroup spectra from noisy samples, and
//! discretize-then-refine limits towards Euclidean and continuous
//! Heisenberg spectra.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod group;
pub mod limits;
pub mod linalg;
pub mod noise;
pub mod phase;
pub mod quadrature;
pub mod recovery;
pub mod repr;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use group::{FiniteGroup, GroupElement, GroupSpec, Subgroup, SubgroupKind};
pub use linalg::CMatrix;
pub use repr::{enumerate_dual, DualSpace, Irrep, IrrepLabel};
