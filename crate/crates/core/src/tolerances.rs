//! Verification tolerances used by the analysis suite and the acceptance tests.
//!
//! Each threshold is fixed here rather than at call sites so that the checks,
//! the CLI reports and the acceptance suite all agree on one number.

/// Margin by which the axis distance must stay positive; coordinates with
/// `phi(u) <= EPS_DOM` are treated as outside the usable chart because the
/// angular equation divides by `phi`.
pub const EPS_DOM: f64 = 1e-6;

/// `lambda_of` refuses states with `|u'| >= 1 - EPS_LAMBDA`: the turning
/// quantity `u'/sqrt(1 - u'^2)` blows up where the tangent is meridional.
pub const EPS_LAMBDA: f64 = 1e-9;

/// Initial states handed to the integrator must satisfy the unit-speed
/// relation `u'^2 + v'^2 phi^2 = 1` to this accuracy.
pub const EPS_UNIT_INIT: f64 = 1e-12;

/// Allowed drift of the unit-speed relation along an integrated trajectory
/// (adaptive tolerance 1e-10, arc length up to a few hundred units).
pub const UNIT_SPEED_DRIFT: f64 = 1e-8;

/// Agreement between the Darboux-frame curvature (second derivatives taken
/// from the ODE right-hand side) and `a * phi * u'`. The identity is exact on
/// the constraint manifold, so the residual is pure floating-point noise.
pub const KAPPA_CONSISTENCY: f64 = 1e-10;

/// Sample standard deviation of `kappa/Lambda - sigma * f` on intervals where
/// the identity applies.
pub const LAMBDA_RESIDUAL: f64 = 1e-6;

/// Drift of the Clairaut quantity `phi^2 v'` along geodesics (a = 0).
pub const CLAIRAUT_DRIFT: f64 = 1e-8;

/// Residual of the finite-difference check of `d/ds(phi^2 v') = a phi^2 u'^2`
/// at step 1e-3.
pub const CLAIRAUT_DEFECT: f64 = 1e-6;

/// Step used for the finite-difference defect check above.
pub const CLAIRAUT_DEFECT_STEP: f64 = 1e-3;

/// Distance (mod 2*pi) of a detected asymptotic parallel from the outer
/// equator on torus runs.
pub const ASYMPTOTE_U_TOL: f64 = 1e-3;

/// Trailing-window bound on `kappa^2` once a run has locked onto a parallel.
pub const TRAILING_KAPPA_SQ: f64 = 1e-8;

/// Default asymptote-lock event: `|u'|` and `|dphi|` below this, sustained.
pub const LOCK_EPS: f64 = 1e-6;

/// Arc length over which the lock condition must hold.
pub const LOCK_WINDOW: f64 = 5.0;

/// Quadrature agreement of the two closed-curve integrals of kappa.
pub const GAUSS_BONNET_AGREE: f64 = 1e-6;

/// Bound on both closed-curve integrals for parallel geodesics, where each
/// vanishes identically.
pub const GAUSS_BONNET_PARALLEL: f64 = 1e-10;

/// RK4 error ratio under step halving must land in this window for a
/// fourth-order method (16 in exact arithmetic).
pub const RK4_RATIO_LO: f64 = 12.0;
pub const RK4_RATIO_HI: f64 = 20.0;

/// Least-squares convergence order of the discrete-flow deviation in dt.
pub const DEVIATION_ORDER_MIN: f64 = 0.8;

/// The wrong-rotation-rate control must exceed the matched deviation by this
/// factor.
pub const CONTROL_FACTOR: f64 = 10.0;

/// Relative kappa variation below which a probe trajectory would count as
/// "constant curvature"; the sweep reports the minimum observed value.
pub const PROBE_NULL_KAPPA: f64 = 1e-8;
