//! Numerical laboratory for massive Lorentz electrodynamics of a spinning,
//! extended charged particle.
//!
//! The crate covers flat-spacetime tensor algebra, worldline and gyrograph
//! kinematics, bare-particle inertia, stationary bound-state fields, force and
//! pseudo-inertia assembly, fixed-center gyrational field dynamics with a Picard
//! iteration, the stationary renormalization flow and the initial-data
//! classifier for the singular point-mass and Abraham limits.
//!
//! Conventions: metric diag(−1, +1, +1, +1); Gaussian units with `c` explicit
//! where a function takes it; the flow module works in natural units
//! ħ = m_e = c = 1, e² = α.

pub mod admissibility;
pub mod bare_particle;
pub mod error;
pub mod fields;
pub mod forces;
pub mod gyrodynamics;
pub mod kinematics;
pub mod minkowski;
pub mod quadrature;
pub mod renormflow;

pub use error::{LedError, Result};

/// Three-vectors are plain nalgebra vectors.
pub type Vec3 = nalgebra::Vector3<f64>;
