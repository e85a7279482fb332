//! Numerical laboratory for semiclassical nonlinear Schrödinger–Poisson
//! systems whose solutions concentrate on circles.
//!
//! The workspace solves, at desk scale, the cylindrically reduced system
//!
//! ```text
//! -eps^2 Δu + V u + rho φ u = K u^p,      -Δφ = rho u^2     in R^3,
//! ```
//!
//! for small `eps`, together with the variational objects that control the
//! limit `eps -> 0`:
//!
//! * [`limit2d`] — the planar limit equation `-Δw + a w = b w^p`, its ground
//!   states and the ground-energy function `E(a, b)`;
//! * [`model`] — potential data `(V, K, rho)`, growth classification, the
//!   auxiliary concentration potentials `M` and `A` and their minimizers;
//! * [`poisson`] — the Newtonian potential of cylindrically symmetric
//!   densities via an elliptic-integral ring kernel, and the interaction
//!   energy `D(f, g)`;
//! * [`penalty`] — the Hardy-type penalization `H`, the penalized
//!   nonlinearity `g_eps`, effective potentials and decay envelopes;
//! * [`solver`] — assembly of the penalized functional `J_eps` on the
//!   reduced `(s, r)` half-plane and a descent solver for its positive
//!   critical points;
//! * [`harness`] — eps-sweeps, concentration diagnostics, decay fits and
//!   machine-readable reports.

pub mod error;
pub mod harness;
pub mod limit2d;
pub mod model;
pub mod penalty;
pub mod poisson;
pub mod solver;
pub mod util;

pub use error::{CoreError, Result};
pub use limit2d::{GroundEnergyCache, GroundState2D};
pub use model::{GrowthClass, PotentialSpec, RegionLambda};
pub use penalty::PenalizationParams;
pub use poisson::CylField;
pub use solver::{PenalizedProblem, SolveReport};
