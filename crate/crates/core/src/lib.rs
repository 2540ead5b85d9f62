//! Numerical toolkit for Schrödinger operators -Δ + V on bounded convex
//! planar domains, where the potential satisfies V = h⁻² for a concave
//! height function h with max h = 1.
//!
//! The crate computes the two length scales that govern the ground state:
//! the transverse scale `L1` (largest L such that the potential sublevel
//! set {V ≤ 1 + L⁻²} has inradius at least L) and the longitudinal scale
//! `L2` (largest L such that the cross-sectional eigenvalue profile μ(x)
//! stays within L⁻² of its minimum on a window of length L). On top of
//! those it solves the full 2D Dirichlet eigenproblem and verifies the
//! comparability bounds relating λ, μ, the level sets of the ground state
//! and the scales L1, L2.

pub mod analysis;
pub mod eig2d;
pub mod error;
pub mod geometry;
pub mod potential;
pub mod scales;
pub mod sturm1d;

pub use analysis::{AnalysisConfig, CheckResult, CheckStatus};
pub use eig2d::{EigenPair2d, Grid2d, HProfile, LevelSetReport, Operator2d};
pub use error::Error;
pub use geometry::{ConvexDomain, Ellipse, GridSpec, Point, RegionMask};
pub use potential::{HeightFunction, Potential};
pub use scales::ScaleReport;
pub use sturm1d::{EigenPair1d, MuProfile, Tridiagonal1d};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
