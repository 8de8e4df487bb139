//! The rotational-soliton ODE system on a surface of revolution and its
//! integrators.
//!
//! In arc-length parametrization the soliton condition `kappa = a phi u'`
//! is equivalent to the second-order system
//!
//! ```text
//! u'' = -a u' v' phi^2 + v'^2 phi dphi
//! v'' =  a u'^2       - 2 u' v' dphi / phi
//! ```
//!
//! with `a = 0` reducing to the geodesic equations. The unit-speed relation
//! `u'^2 + v'^2 phi^2 = 1` is a first integral of the system; it is
//! monitored, not enforced (an optional per-step renormalization exists for
//! long runs). The integrated state is augmented with `f' = kappa^2` so the
//! cumulative squared curvature carries integrator accuracy rather than
//! trapezoid accuracy.

use alloc::string::String;
use alloc::vec::Vec;

use crate::surface::{Profile, SurfaceError};
use crate::tolerances::{EPS_LAMBDA, EPS_UNIT_INIT, LOCK_EPS, LOCK_WINDOW};
use crate::vec3::Vec3;

/// Rotation speed of the soliton; `a = 0` is a geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolitonParams {
    pub a: f64,
}

/// Phase point of the soliton ODE: arc length, chart coordinates and their
/// derivatives with respect to arc length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolitonState {
    pub s: f64,
    pub u: f64,
    pub v: f64,
    pub up: f64,
    pub vp: f64,
}

impl SolitonState {
    /// Deviation from the unit-speed relation `u'^2 + v'^2 phi^2 = 1`.
    pub fn constraint_residual(&self, p: &Profile) -> f64 {
        let phi = p.phi(self.u);
        libm::fabs(self.up * self.up + self.vp * self.vp * phi * phi - 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolitonError {
    Surface(SurfaceError),
    /// The requested initial tangent has zero length.
    ZeroTangent,
    /// `lambda_of` on a state too close to a meridional tangent.
    NearSingular { up: f64 },
    /// Initial state violates the unit-speed relation.
    InvalidInitial { residual: f64 },
    /// The adaptive controller could not proceed at the minimum step.
    StepSizeUnderflow { s: f64 },
    /// Step budget exhausted before any terminating event.
    StepLimit,
    BadConfig(&'static str),
}

impl From<SurfaceError> for SolitonError {
    fn from(e: SurfaceError) -> Self {
        SolitonError::Surface(e)
    }
}

impl core::fmt::Display for SolitonError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolitonError::Surface(e) => write!(f, "{e}"),
            SolitonError::ZeroTangent => write!(f, "initial tangent is zero"),
            SolitonError::NearSingular { up } => {
                write!(f, "lambda undefined near meridional tangent (u' = {up})")
            }
            SolitonError::InvalidInitial { residual } => {
                write!(f, "initial state off the unit-speed relation by {residual:e}")
            }
            SolitonError::StepSizeUnderflow { s } => {
                write!(f, "step size underflow at s = {s}")
            }
            SolitonError::StepLimit => write!(f, "step budget exhausted"),
            SolitonError::BadConfig(m) => write!(f, "bad integrator config: {m}"),
        }
    }
}

/// First derivatives of the phase-space coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDeriv {
    pub du: f64,
    pub dv: f64,
    pub dup: f64,
    pub dvp: f64,
}

/// Right-hand side of the soliton system at a state.
pub fn rhs(p: &Profile, par: &SolitonParams, st: &SolitonState) -> Result<StateDeriv, SolitonError> {
    if !p.unit_speed {
        return Err(SurfaceError::NotUnitSpeed.into());
    }
    p.check_chart(st.u)?;
    let phi = p.phi(st.u);
    let dphi = p.dphi(st.u);
    let d = StateDeriv {
        du: st.up,
        dv: st.vp,
        dup: -par.a * st.up * st.vp * phi * phi + st.vp * st.vp * phi * dphi,
        dvp: par.a * st.up * st.up - 2.0 * st.up * st.vp * dphi / phi,
    };
    if !(d.dup.is_finite() && d.dvp.is_finite()) {
        return Err(SurfaceError::AxisTooClose { u: st.u }.into());
    }
    Ok(d)
}

/// Rescale a raw initial tangent so the unit-speed relation holds exactly.
pub fn normalize_initial(
    p: &Profile,
    u0: f64,
    v0: f64,
    up0: f64,
    vp0: f64,
) -> Result<SolitonState, SolitonError> {
    p.check_chart(u0)?;
    if up0 == 0.0 && vp0 == 0.0 {
        return Err(SolitonError::ZeroTangent);
    }
    let phi = p.phi(u0);
    let norm = libm::sqrt(up0 * up0 + vp0 * vp0 * phi * phi);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(SolitonError::ZeroTangent);
    }
    Ok(SolitonState {
        s: 0.0,
        u: u0,
        v: v0,
        up: up0 / norm,
        vp: vp0 / norm,
    })
}

/// Geodesic curvature of a soliton state, `a phi u'`.
pub fn kappa_soliton(p: &Profile, par: &SolitonParams, st: &SolitonState) -> f64 {
    par.a * p.phi(st.u) * st.up
}

/// Geodesic curvature from the Darboux frame, given the second derivatives
/// of the chart coordinates.
pub fn kappa_darboux(p: &Profile, st: &SolitonState, upp: f64, vpp: f64) -> f64 {
    let phi = p.phi(st.u);
    let dphi = p.dphi(st.u);
    (-upp * st.vp + vpp * st.up) * phi + st.vp * (1.0 + st.up * st.up) * dphi
}

/// Turning quantity `u' / sqrt(1 - u'^2)`.
pub fn lambda_of(st: &SolitonState) -> Result<f64, SolitonError> {
    if libm::fabs(st.up) >= 1.0 - EPS_LAMBDA {
        return Err(SolitonError::NearSingular { up: st.up });
    }
    Ok(st.up / libm::sqrt(1.0 - st.up * st.up))
}

/// Angle between the curve and the meridians, `arccos u'`.
pub fn meridian_angle(st: &SolitonState) -> f64 {
    let c = if st.up > 1.0 {
        1.0
    } else if st.up < -1.0 {
        -1.0
    } else {
        st.up
    };
    libm::acos(c)
}

/// Rotation about the z axis.
pub fn rotate_z(x: Vec3, angle: f64) -> Vec3 {
    let (s, c) = libm::sincos(angle);
    Vec3::new(c * x.x - s * x.y, s * x.x + c * x.y, x.z)
}

/// Integration method for the soliton system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge–Kutta.
    Rk4 { h: f64 },
    /// Embedded Runge–Kutta–Fehlberg 4(5), advanced with the fifth-order
    /// solution.
    Rkf45 { abs_tol: f64, rel_tol: f64 },
}

/// Sustained-window condition declaring convergence onto a parallel geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LockConfig {
    /// Both `|u'|` and `|dphi(u)|` must stay below this.
    pub eps: f64,
    /// Arc length over which the condition must hold.
    pub window: f64,
}

impl Default for LockConfig {
    fn default() -> Self {
        LockConfig {
            eps: LOCK_EPS,
            window: LOCK_WINDOW,
        }
    }
}

/// Early-termination events monitored during integration.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EventConfig {
    pub asymptote_lock: Option<LockConfig>,
    /// Terminate when `u` leaves this window (divergence probe).
    pub u_window: Option<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub s_max: f64,
    /// Integrate both ends of the curve (backward over `[-s_max, 0]`).
    pub bidirectional: bool,
    /// Rescale the tangent onto the unit-speed relation after each step.
    pub renormalize: bool,
    pub events: EventConfig,
    /// Cap on the adaptive step, also the sampling granularity of events.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rkf45 {
                abs_tol: 1e-10,
                rel_tol: 1e-10,
            },
            s_max: 100.0,
            bidirectional: true,
            renormalize: false,
            events: EventConfig::default(),
            h_max: 5.0,
            max_steps: 2_000_000,
        }
    }
}

/// Why a leg of the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    SMaxReached,
    AsymptoteLock { u_star: f64 },
    /// `u` left the configured window; the crossing sample is recorded.
    WindowExit,
    /// The state left the profile chart; the last valid sample is kept.
    DomainExit,
    NonFinite,
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::SMaxReached => "s-max",
            Termination::AsymptoteLock { .. } => "asymptote-lock",
            Termination::WindowExit => "window-exit",
            Termination::DomainExit => "domain-exit",
            Termination::NonFinite => "non-finite",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_h: f64,
    pub max_h: f64,
}

/// Integrated soliton solution with per-sample diagnostics.
///
/// Samples are strictly increasing in `s`; `f` is the cumulative integral of
/// `kappa^2` based at `s = 0` and is non-decreasing. `v` is kept unwrapped so
/// winding about the axis stays observable. `lambda` is NaN on samples where
/// the tangent is meridional to within the working margin.
#[derive(Debug)]
pub struct Trajectory {
    pub params: SolitonParams,
    pub profile_name: String,
    pub samples: Vec<SolitonState>,
    pub kappa: Vec<f64>,
    pub lambda: Vec<f64>,
    pub f: Vec<f64>,
    pub theta: Vec<f64>,
    pub embedded: Vec<Vec3>,
    pub stats: StepStats,
    pub forward_term: Termination,
    pub backward_term: Option<Termination>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the sample closest to `s = 0`.
    pub fn idx_s0(&self) -> usize {
        let mut best = 0;
        let mut best_abs = f64::INFINITY;
        for (i, st) in self.samples.iter().enumerate() {
            let a = libm::fabs(st.s);
            if a < best_abs {
                best_abs = a;
                best = i;
            }
        }
        best
    }

    pub fn arc_span(&self) -> f64 {
        if self.samples.len() < 2 {
            return 0.0;
        }
        self.samples[self.samples.len() - 1].s - self.samples[0].s
    }
}

/// Cumulative integral of `kappa^2` by composite trapezoid over the recorded
/// samples, re-based so the value at `s = 0` vanishes.
pub fn total_curvature(traj: &Trajectory) -> Vec<f64> {
    let n = traj.len();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..n {
        let ds = traj.samples[i].s - traj.samples[i - 1].s;
        let k0 = traj.kappa[i - 1];
        let k1 = traj.kappa[i];
        acc += 0.5 * ds * (k0 * k0 + k1 * k1);
        out.push(acc);
    }
    let base = out[traj.idx_s0()];
    for v in &mut out {
        *v -= base;
    }
    out
}

/// Every embedded sample rotated by the soliton motion at flow time `t`.
pub fn soliton_at_time(traj: &Trajectory, par: &SolitonParams, t: f64) -> Vec<Vec3> {
    let angle = par.a * t;
    traj.embedded.iter().map(|&x| rotate_z(x, angle)).collect()
}

// State vector layout: [u, v, u', v', f] with f' = kappa^2.
type Y = [f64; 5];

enum FieldError {
    OffChart,
}

#[inline]
fn field(p: &Profile, a: f64, y: &Y) -> Result<Y, FieldError> {
    if p.check_chart(y[0]).is_err() {
        return Err(FieldError::OffChart);
    }
    let phi = p.phi(y[0]);
    let dphi = p.dphi(y[0]);
    let up = y[2];
    let vp = y[3];
    let kappa = a * phi * up;
    let out = [
        up,
        vp,
        -a * up * vp * phi * phi + vp * vp * phi * dphi,
        a * up * up - 2.0 * up * vp * dphi / phi,
        kappa * kappa,
    ];
    if out.iter().any(|c| !c.is_finite()) {
        return Err(FieldError::OffChart);
    }
    Ok(out)
}

#[inline]
fn axpy(y: &Y, h: f64, k: &Y) -> Y {
    let mut out = *y;
    for i in 0..5 {
        out[i] += h * k[i];
    }
    out
}

fn rk4_step(p: &Profile, a: f64, y: &Y, h: f64) -> Result<Y, FieldError> {
    let k1 = field(p, a, y)?;
    let k2 = field(p, a, &axpy(y, 0.5 * h, &k1))?;
    let k3 = field(p, a, &axpy(y, 0.5 * h, &k2))?;
    let k4 = field(p, a, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..5 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

// Fehlberg 4(5) tableau.
const A21: f64 = 1.0 / 4.0;
const A31: f64 = 3.0 / 32.0;
const A32: f64 = 9.0 / 32.0;
const A41: f64 = 1932.0 / 2197.0;
const A42: f64 = -7200.0 / 2197.0;
const A43: f64 = 7296.0 / 2197.0;
const A51: f64 = 439.0 / 216.0;
const A52: f64 = -8.0;
const A53: f64 = 3680.0 / 513.0;
const A54: f64 = -845.0 / 4104.0;
const A61: f64 = -8.0 / 27.0;
const A62: f64 = 2.0;
const A63: f64 = -3544.0 / 2565.0;
const A64: f64 = 1859.0 / 4104.0;
const A65: f64 = -11.0 / 40.0;
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
// Difference between the fifth- and fourth-order weights.
const ERR: [f64; 6] = [
    16.0 / 135.0 - 25.0 / 216.0,
    0.0,
    6656.0 / 12825.0 - 1408.0 / 2565.0,
    28561.0 / 56430.0 - 2197.0 / 4104.0,
    -9.0 / 50.0 + 1.0 / 5.0,
    2.0 / 55.0,
];

/// One Fehlberg attempt: fifth-order candidate plus scaled error norm.
fn rkf45_attempt(
    p: &Profile,
    a: f64,
    y: &Y,
    h: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(Y, f64), FieldError> {
    let k1 = field(p, a, y)?;
    let k2 = field(p, a, &axpy(y, h * A21, &k1))?;
    let mut t = *y;
    for i in 0..5 {
        t[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    let k3 = field(p, a, &t)?;
    for i in 0..5 {
        t[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    let k4 = field(p, a, &t)?;
    for i in 0..5 {
        t[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    let k5 = field(p, a, &t)?;
    for i in 0..5 {
        t[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    let k6 = field(p, a, &t)?;

    let mut y5 = *y;
    let mut err_norm_sq = 0.0;
    for i in 0..5 {
        let ks = [k1[i], k2[i], k3[i], k4[i], k5[i], k6[i]];
        let mut acc5 = 0.0;
        let mut acce = 0.0;
        for j in 0..6 {
            acc5 += B5[j] * ks[j];
            acce += ERR[j] * ks[j];
        }
        y5[i] = y[i] + h * acc5;
        let e = h * acce;
        let sk = abs_tol + rel_tol * libm::fmax(libm::fabs(y[i]), libm::fabs(y5[i]));
        err_norm_sq += (e / sk) * (e / sk);
    }
    Ok((y5, libm::sqrt(err_norm_sq / 5.0)))
}

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
const H_MIN: f64 = 1e-12;

struct Leg {
    /// `(s, y)` samples, including the initial state, in step order.
    samples: Vec<(f64, Y)>,
    term: Termination,
    stats: StepStats,
}

struct LockTracker {
    cfg: LockConfig,
    start_s: Option<f64>,
    sum_u: f64,
    count: usize,
}

impl LockTracker {
    fn new(cfg: LockConfig) -> Self {
        LockTracker {
            cfg,
            start_s: None,
            sum_u: 0.0,
            count: 0,
        }
    }

    /// Feed an accepted sample; `Some(u_star)` once the condition has held
    /// over the configured arc length.
    fn update(&mut self, p: &Profile, s: f64, y: &Y) -> Option<f64> {
        let qualifies =
            libm::fabs(y[2]) < self.cfg.eps && libm::fabs(p.dphi(y[0])) < self.cfg.eps;
        if !qualifies {
            self.start_s = None;
            self.sum_u = 0.0;
            self.count = 0;
            return None;
        }
        let start = *self.start_s.get_or_insert(s);
        self.sum_u += y[0];
        self.count += 1;
        if libm::fabs(s - start) >= self.cfg.window {
            Some(self.sum_u / self.count as f64)
        } else {
            None
        }
    }
}

/// Integrate one leg in direction `dir` (+1 forward, -1 backward) until an
/// event or `|s| = s_max`.
fn run_leg(
    p: &Profile,
    a: f64,
    y0: Y,
    dir: f64,
    cfg: &IntegratorConfig,
) -> Result<Leg, SolitonError> {
    let target = dir * cfg.s_max;
    let mut samples = Vec::new();
    let mut stats = StepStats {
        min_h: f64::INFINITY,
        ..StepStats::default()
    };
    let mut lock = cfg.events.asymptote_lock.map(LockTracker::new);
    let mut s = 0.0;
    let mut y = y0;
    samples.push((s, y));

    // The initial sample may already trip an event.
    if let Some((lo, hi)) = cfg.events.u_window {
        if y[0] < lo || y[0] > hi {
            return Ok(Leg {
                samples,
                term: Termination::WindowExit,
                stats,
            });
        }
    }
    if let Some(tr) = lock.as_mut() {
        if let Some(u_star) = tr.update(p, s, &y) {
            return Ok(Leg {
                samples,
                term: Termination::AsymptoteLock { u_star },
                stats,
            });
        }
    }

    let mut h = match cfg.method {
        Method::Rk4 { h } => dir * h,
        Method::Rkf45 { .. } => dir * libm::fmin(1e-2, cfg.h_max),
    };

    loop {
        if stats.accepted + stats.rejected > cfg.max_steps {
            return Err(SolitonError::StepLimit);
        }
        // Land exactly on the endpoint.
        if (target - s) * dir <= libm::fabs(h) {
            h = target - s;
        }
        let step = match cfg.method {
            Method::Rk4 { .. } => match rk4_step(p, a, &y, h) {
                Ok(ynew) => Some(axstep(ynew, h)),
                Err(FieldError::OffChart) => {
                    return Ok(Leg {
                        samples,
                        term: Termination::DomainExit,
                        stats,
                    })
                }
            },
            Method::Rkf45 { abs_tol, rel_tol } => {
                match rkf45_attempt(p, a, &y, h, abs_tol, rel_tol) {
                    Ok((ynew, err)) => {
                        if err <= 1.0 {
                            let scale = if err == 0.0 {
                                MAX_SCALE
                            } else {
                                libm::fmin(
                                    MAX_SCALE,
                                    libm::fmax(MIN_SCALE, SAFETY * libm::pow(err, -0.2)),
                                )
                            };
                            let h_used = h;
                            h = dir * libm::fmin(libm::fabs(h) * scale, cfg.h_max);
                            Some(axstep(ynew, h_used))
                        } else {
                            stats.rejected += 1;
                            let scale =
                                libm::fmax(MIN_SCALE, libm::fmin(1.0, SAFETY * libm::pow(err, -0.2)));
                            h *= scale;
                            if libm::fabs(h) < H_MIN {
                                return Err(SolitonError::StepSizeUnderflow { s });
                            }
                            None
                        }
                    }
                    Err(FieldError::OffChart) => {
                        // A stage left the chart: approach the boundary with
                        // smaller steps, then stop.
                        stats.rejected += 1;
                        h *= 0.3;
                        if libm::fabs(h) < H_MIN {
                            return Ok(Leg {
                                samples,
                                term: Termination::DomainExit,
                                stats,
                            });
                        }
                        None
                    }
                }
            }
        };
        let (ynew, h_used) = match step {
            Some(AxStep { y, h }) => (y, h),
            None => continue,
        };

        if ynew.iter().any(|c| !c.is_finite()) {
            return Ok(Leg {
                samples,
                term: Termination::NonFinite,
                stats,
            });
        }
        if p.check_chart(ynew[0]).is_err() {
            return Ok(Leg {
                samples,
                term: Termination::DomainExit,
                stats,
            });
        }

        s += h_used;
        let mut accepted = ynew;
        if cfg.renormalize {
            let phi = p.phi(accepted[0]);
            let q = accepted[2] * accepted[2] + accepted[3] * accepted[3] * phi * phi;
            let inv = 1.0 / libm::sqrt(q);
            accepted[2] *= inv;
            accepted[3] *= inv;
        }
        y = accepted;
        samples.push((s, y));
        stats.accepted += 1;
        stats.min_h = libm::fmin(stats.min_h, libm::fabs(h_used));
        stats.max_h = libm::fmax(stats.max_h, libm::fabs(h_used));

        if let Some((lo, hi)) = cfg.events.u_window {
            if y[0] < lo || y[0] > hi {
                return Ok(Leg {
                    samples,
                    term: Termination::WindowExit,
                    stats,
                });
            }
        }
        if let Some(tr) = lock.as_mut() {
            if let Some(u_star) = tr.update(p, s, &y) {
                return Ok(Leg {
                    samples,
                    term: Termination::AsymptoteLock { u_star },
                    stats,
                });
            }
        }
        if (target - s) * dir <= 0.0 {
            return Ok(Leg {
                samples,
                term: Termination::SMaxReached,
                stats,
            });
        }
    }
}

/// Accepted adaptive step: the candidate plus the signed step that produced it
/// (the controller mutates `h` for the next step before we commit this one).
struct AxStep {
    y: Y,
    h: f64,
}

fn axstep(y: Y, h: f64) -> AxStep {
    AxStep { y, h }
}

/// Integrate the soliton system from a normalized initial state.
///
/// Forward over `[0, s_max]`, and also backward over `[-s_max, 0]` when
/// `bidirectional` is set, so both ends of the curve are produced.
pub fn integrate(
    p: &Profile,
    par: &SolitonParams,
    init: &SolitonState,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, SolitonError> {
    if !p.unit_speed {
        return Err(SurfaceError::NotUnitSpeed.into());
    }
    if !par.a.is_finite() {
        return Err(SolitonError::BadConfig("rotation speed must be finite"));
    }
    if !(cfg.s_max > 0.0) {
        return Err(SolitonError::BadConfig("s_max must be positive"));
    }
    if !(cfg.h_max > 0.0) {
        return Err(SolitonError::BadConfig("h_max must be positive"));
    }
    match cfg.method {
        Method::Rk4 { h } if !(h > 0.0) => {
            return Err(SolitonError::BadConfig("rk4 step must be positive"))
        }
        Method::Rkf45 { abs_tol, rel_tol } if !(abs_tol > 0.0) || !(rel_tol >= 0.0) => {
            return Err(SolitonError::BadConfig("tolerances must be positive"));
        }
        _ => {}
    }
    p.check_chart(init.u)?;
    let residual = init.constraint_residual(p);
    if residual > EPS_UNIT_INIT {
        return Err(SolitonError::InvalidInitial { residual });
    }

    let y0: Y = [init.u, init.v, init.up, init.vp, 0.0];
    let forward = run_leg(p, par.a, y0, 1.0, cfg)?;
    let backward = if cfg.bidirectional {
        Some(run_leg(p, par.a, y0, -1.0, cfg)?)
    } else {
        None
    };

    let mut merged: Vec<(f64, Y)> = Vec::new();
    if let Some(b) = &backward {
        // Backward samples run 0, -h, ...; reverse the tail so the merged
        // list ascends in s and keeps the single s = 0 sample from the
        // forward leg.
        merged.extend(b.samples[1..].iter().rev().cloned());
    }
    merged.extend(forward.samples.iter().cloned());

    let n = merged.len();
    let mut samples = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    let mut f = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    let mut embedded = Vec::with_capacity(n);
    for (s, y) in &merged {
        let st = SolitonState {
            s: *s,
            u: y[0],
            v: y[1],
            up: y[2],
            vp: y[3],
        };
        kappa.push(kappa_soliton(p, par, &st));
        lambda.push(lambda_of(&st).unwrap_or(f64::NAN));
        theta.push(meridian_angle(&st));
        f.push(y[4]);
        embedded.push(p.embed(st.u, st.v).expect("sample on chart"));
        samples.push(st);
    }

    let mut stats = forward.stats;
    if let Some(b) = &backward {
        stats.accepted += b.stats.accepted;
        stats.rejected += b.stats.rejected;
        stats.min_h = libm::fmin(stats.min_h, b.stats.min_h);
        stats.max_h = libm::fmax(stats.max_h, b.stats.max_h);
    }
    if !stats.min_h.is_finite() {
        stats.min_h = 0.0;
    }

    Ok(Trajectory {
        params: *par,
        profile_name: String::from(p.name()),
        samples,
        kappa,
        lambda,
        f,
        theta,
        embedded,
        stats,
        forward_term: forward.term,
        backward_term: backward.map(|b| b.term),
    })
}
