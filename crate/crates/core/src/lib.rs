//! Blowup-criterion diagnostics for 3D incompressible Navier–Stokes flows.
//!
//! The crate bundles variable-growth Campanato/Morrey/Hölder norms, spectral
//! and kernel-quadrature Riesz transforms, the maximum-point frame
//! decomposition into a symmetric flow plus remainder, the no-local-collapsing
//! monitor, and a small pseudo-spectral solver that feeds it.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the CLI uses.

pub mod cli;
pub mod error;
pub mod frame;
pub mod grid;
pub mod growth;
pub mod harmonic;
pub mod nlc;
pub mod norms;
pub mod real;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use real::Real;

pub type Grid = grid::Grid3<f64>;
pub type Field = grid::ScalarField<f64>;
pub type VField = grid::VectorField3<f64>;
pub type Growth = growth::GrowthFunction<f64>;
pub type Decomposition = frame::Decomposition<f64>;

pub type Grid32 = grid::Grid3<f32>;
pub type Field32 = grid::ScalarField<f32>;
pub type VField32 = grid::VectorField3<f32>;
