//! Fourier analysis of the quarter Cantor measure.
//!
//! The measure `μ` is the Bernoulli convolution generated by the two maps
//! `x ↦ (x ± 1)/4` with equal weights. Its Fourier transform is the cosine
//! product `μ̂(t) = ∏_{k≥1} cos(2πt/4^k)`, and `{e^{2πiγx} : γ ∈ Γ}` is an
//! orthonormal basis of `L²(μ)` for the canonical set `Γ` of integers whose
//! base-4 digits are all 0 or 1.
//!
//! The crate provides:
//!
//! * [`product`]: the truncated product with a certified tail bound, and an
//!   independent oracle that sums over the atoms of the level-`L` iterated
//!   function system approximation;
//! * [`frequency`]: checked integer frequency labels and the exact zero-set
//!   predicate for `μ̂` on the integers;
//! * [`digits`]: canonical `Γ`, scaled `pΓ` and additive `4Γ ∪ (4Γ + p)` sets
//!   as instances of one base-4 digit system;
//! * [`spectral`]: the spectral function `Σ_γ |μ̂(t − γ)|²`, its residue
//!   components `c_m`, and completeness/periodicity defects on grids;
//! * [`operators`]: the isometries `S_0`, `S_1`, their adjoints, `M_k`, `U_p`
//!   and `W̃` as exact partial affine maps on labels, with the identity
//!   checks built on them.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the CLI and the reference
//! thresholds use.

pub mod digits;
pub mod error;
pub mod frequency;
pub mod operators;
pub mod product;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod summation;

pub use digits::{DigitSet, DigitSystem, LevelSet};
pub use error::{Error, Result};
pub use frequency::Frequency;
pub use operators::IndexOp;
pub use product::ProductConfig;
pub use report::CheckReport;
pub use scalar::Scalar;
pub use spectral::{CompletenessDefect, Component, DefectReport, Grid, SpectralSample};
pub use summation::NeumaierSum;

pub type ProductConfig64 = ProductConfig<f64>;
pub type ProductConfig32 = ProductConfig<f32>;
pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type SpectralSample64 = SpectralSample<f64>;
pub type SpectralSample32 = SpectralSample<f32>;
pub type CompletenessDefect64 = CompletenessDefect<f64>;
pub type DefectReport64 = DefectReport<f64>;
