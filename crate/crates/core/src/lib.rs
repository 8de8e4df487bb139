//! Rotational solitons of the curve shortening flow on surfaces of revolution.
//!
//! A curve on a surface evolves under the curve shortening flow when its
//! normal velocity equals its geodesic curvature. On a surface of revolution
//! the solutions that evolve purely by rotation about the axis satisfy a
//! second-order ODE system in the surface coordinates; this crate integrates
//! that system, computes the associated diagnostics (geodesic curvature,
//! turning angle, cumulative squared curvature), and cross-validates the
//! rotational motion against a direct discrete evolution of polygonal curves.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the CLI
//! live in the companion `revsol` crate.
//!
//! Modules:
//! - [`surface`]: generating-curve profiles, embedding, frames, curvature.
//! - [`soliton`]: the soliton ODE system, fixed and adaptive integrators,
//!   per-state diagnostics.
//! - [`analysis`]: conserved-quantity checks, asymptote detection, closure
//!   and Gauss–Bonnet checks, the constant-curvature probe.
//! - [`evolver`]: discrete curve shortening in the `(u, v)` chart.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod evolver;
pub mod numerics;
pub mod soliton;
pub mod surface;
pub mod tolerances;
pub mod vec3;

pub use surface::{Profile, SurfaceError};
pub use vec3::Vec3;
