//! Exact computations on the free Poisson chaos.
//!
//! Everything here works with step-function kernels on a shared uniform
//! grid, so that every integral reduces to a finite sum and the moment
//! formulas can be evaluated exactly (up to floating-point rounding):
//!
//! - [`partitions`] enumerates set partitions and non-crossing partitions,
//!   optionally restricted to those respecting or connecting a block structure.
//! - [`kernels`] holds [`StepKernel`], adjoints, inner products and the
//!   arc/star contractions.
//! - [`moments`] evaluates partition integrals, the free Poisson diagram
//!   formula and closed-form semicircular / free Poisson moments.
//! - [`algebra`] implements chaos expansions with the product rule; its
//!   moments give an independent route to the diagram formula.
//! - [`limits`] provides sequence generators, contraction criteria and the
//!   fourth-moment experiment harness.
//!
//! The numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

pub mod algebra;
pub mod error;
pub mod kernels;
pub mod limits;
pub mod moments;
pub mod partitions;
pub mod scalar;

pub use algebra::ChaosExpansion;
pub use error::{Error, Result};
pub use kernels::{GridSpec, StepKernel};
pub use moments::CovarianceMatrix;
pub use partitions::{BlockStructure, Partition, PartitionClass};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision step kernel.
pub type Kernel = StepKernel<f64>;
/// Single-precision step kernel.
pub type Kernel32 = StepKernel<f32>;
/// Double-precision grid.
pub type Grid = GridSpec<f64>;
/// Double-precision chaos expansion.
pub type Expansion = ChaosExpansion<f64>;
/// Double-precision covariance matrix.
pub type Covariance = CovarianceMatrix<f64>;
/// Complex double.
pub type C64 = Complex<f64>;
