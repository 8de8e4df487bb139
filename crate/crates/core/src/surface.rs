//! Surfaces of revolution described by a generating-curve profile.
//!
//! A profile `(phi, psi)` generates the surface
//! `X(u, v) = (phi(u) cos v, phi(u) sin v, psi(u))` with `phi > 0`. The
//! induced metric is `du^2 + phi(u)^2 dv^2` once the profile is unit speed
//! (`dphi^2 + dpsi^2 = 1`), which is the form every soliton computation in
//! this crate assumes; non-unit-speed profiles are reparametrized by arc
//! length first.

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::numerics::{adaptive_simpson, central_diff1, central_diff2, CubicSpline};
use crate::tolerances::EPS_DOM;
use crate::vec3::Vec3;

pub type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SurfaceError {
    /// Coordinate outside the profile domain.
    Domain { u: f64 },
    /// The profile is closer to the rotation axis than the usable margin.
    AxisTooClose { u: f64 },
    /// The operation requires an arc-length profile.
    NotUnitSpeed,
    /// Reparametrization could not reach the requested tolerance.
    ToleranceNotMet,
    /// Malformed construction input.
    Invalid(&'static str),
}

impl core::fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SurfaceError::Domain { u } => write!(f, "u = {u} outside profile domain"),
            SurfaceError::AxisTooClose { u } => {
                write!(f, "phi(u) within axis margin at u = {u}")
            }
            SurfaceError::NotUnitSpeed => write!(f, "profile is not arc-length parametrized"),
            SurfaceError::ToleranceNotMet => write!(f, "reparametrization tolerance not met"),
            SurfaceError::Invalid(msg) => write!(f, "invalid profile input: {msg}"),
        }
    }
}

/// Parameter interval, possibly unbounded on either side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub const fn all() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.lo && u <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Orthonormal frame of the surface at a point: `e1` along the meridian,
/// `e2` along the parallel, `n` the outward normal with `n = e1 x e2`.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub n: Vec3,
}

impl Frame {
    /// Largest deviation from orthonormality (dot products and norms).
    pub fn orthonormality_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        r = r.max(libm::fabs(self.e1.dot(self.e2)));
        r = r.max(libm::fabs(self.e1.dot(self.n)));
        r = r.max(libm::fabs(self.e2.dot(self.n)));
        r = r.max(libm::fabs(self.e1.norm() - 1.0));
        r = r.max(libm::fabs(self.e2.norm() - 1.0));
        r = r.max(libm::fabs(self.n.norm() - 1.0));
        r
    }
}

/// Generating curve of a surface of revolution, with analytic or generated
/// derivatives. Immutable after construction; safe to share across threads.
pub struct Profile {
    name: String,
    phi: Arc<ScalarFn>,
    psi: Arc<ScalarFn>,
    dphi: Arc<ScalarFn>,
    ddphi: Arc<ScalarFn>,
    dpsi: Arc<ScalarFn>,
    ddpsi: Arc<ScalarFn>,
    pub domain: Interval,
    pub unit_speed: bool,
    /// Period of the profile parameter when the generating curve is closed.
    pub u_period: Option<f64>,
}

impl core::fmt::Debug for Profile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Profile")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("unit_speed", &self.unit_speed)
            .field("u_period", &self.u_period)
            .finish()
    }
}

impl Profile {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phi(&self, u: f64) -> f64 {
        (self.phi)(u)
    }
    pub fn psi(&self, u: f64) -> f64 {
        (self.psi)(u)
    }
    pub fn dphi(&self, u: f64) -> f64 {
        (self.dphi)(u)
    }
    pub fn ddphi(&self, u: f64) -> f64 {
        (self.ddphi)(u)
    }
    pub fn dpsi(&self, u: f64) -> f64 {
        (self.dpsi)(u)
    }
    pub fn ddpsi(&self, u: f64) -> f64 {
        (self.ddpsi)(u)
    }

    /// Speed of the generating curve, `sqrt(dphi^2 + dpsi^2)`.
    pub fn speed(&self, u: f64) -> f64 {
        let dp = self.dphi(u);
        let ds = self.dpsi(u);
        libm::sqrt(dp * dp + ds * ds)
    }

    pub fn check_domain(&self, u: f64) -> Result<(), SurfaceError> {
        if !u.is_finite() || !self.domain.contains(u) {
            return Err(SurfaceError::Domain { u });
        }
        Ok(())
    }

    /// Domain check plus the axis margin needed wherever `1/phi` appears.
    pub fn check_chart(&self, u: f64) -> Result<(), SurfaceError> {
        self.check_domain(u)?;
        if self.phi(u) <= EPS_DOM {
            return Err(SurfaceError::AxisTooClose { u });
        }
        Ok(())
    }

    /// Point of the surface at coordinates `(u, v)`.
    pub fn embed(&self, u: f64, v: f64) -> Result<Vec3, SurfaceError> {
        self.check_domain(u)?;
        let (sv, cv) = libm::sincos(v);
        let p = self.phi(u);
        Ok(Vec3::new(p * cv, p * sv, self.psi(u)))
    }

    /// Metric coefficients `(g_uu, g_vv)` of the coordinate chart.
    pub fn metric_coeffs(&self, u: f64) -> Result<(f64, f64), SurfaceError> {
        self.check_domain(u)?;
        let dp = self.dphi(u);
        let ds = self.dpsi(u);
        let p = self.phi(u);
        Ok((dp * dp + ds * ds, p * p))
    }

    /// Orthonormal surface frame at `(u, v)`; requires an arc-length profile.
    pub fn frame_at(&self, u: f64, v: f64) -> Result<Frame, SurfaceError> {
        if !self.unit_speed {
            return Err(SurfaceError::NotUnitSpeed);
        }
        self.check_domain(u)?;
        let (sv, cv) = libm::sincos(v);
        let dp = self.dphi(u);
        let ds = self.dpsi(u);
        Ok(Frame {
            e1: Vec3::new(dp * cv, dp * sv, ds),
            e2: Vec3::new(-sv, cv, 0.0),
            n: Vec3::new(-ds * cv, -ds * sv, dp),
        })
    }

    /// Gauss curvature `-ddphi/phi` of the arc-length chart.
    pub fn gauss_curvature(&self, u: f64) -> Result<f64, SurfaceError> {
        if !self.unit_speed {
            return Err(SurfaceError::NotUnitSpeed);
        }
        self.check_domain(u)?;
        Ok(-self.ddphi(u) / self.phi(u))
    }

    /// Torus of revolution with radii `0 < r < big_r`, parametrized by arc
    /// length along the meridian circle: `phi(u) = R + r cos(u/r)`.
    ///
    /// The trig factors flush sub-roundoff values to zero so the equators
    /// sit exactly where `dphi` vanishes: the inner equator is an unstable
    /// equilibrium of the soliton flow, and a residual `sin(pi) ~ 1e-16`
    /// would seed its escape.
    pub fn torus(big_r: f64, r: f64) -> Profile {
        let phi = move |u: f64| big_r + r * cos_flushed(u / r);
        let psi = move |u: f64| r * sin_flushed(u / r);
        let dphi = move |u: f64| -sin_flushed(u / r);
        let ddphi = move |u: f64| -cos_flushed(u / r) / r;
        let dpsi = move |u: f64| cos_flushed(u / r);
        let ddpsi = move |u: f64| -sin_flushed(u / r) / r;
        Profile {
            name: format!("torus(R={big_r},r={r})"),
            phi: Arc::new(phi),
            psi: Arc::new(psi),
            dphi: Arc::new(dphi),
            ddphi: Arc::new(ddphi),
            dpsi: Arc::new(dpsi),
            ddpsi: Arc::new(ddpsi),
            domain: Interval::all(),
            unit_speed: true,
            u_period: Some(2.0 * core::f64::consts::PI * r),
        }
    }

    /// Torus parametrized by the meridian angle (`phi = R + r cos u`); speed
    /// `r`, so not unit speed unless `r = 1`.
    pub fn angular_torus(big_r: f64, r: f64) -> Profile {
        let phi = move |u: f64| big_r + r * cos_flushed(u);
        let psi = move |u: f64| r * sin_flushed(u);
        let dphi = move |u: f64| -r * sin_flushed(u);
        let ddphi = move |u: f64| -r * cos_flushed(u);
        let dpsi = move |u: f64| r * cos_flushed(u);
        let ddpsi = move |u: f64| -r * sin_flushed(u);
        Profile {
            name: format!("angular-torus(R={big_r},r={r})"),
            phi: Arc::new(phi),
            psi: Arc::new(psi),
            dphi: Arc::new(dphi),
            ddphi: Arc::new(ddphi),
            dpsi: Arc::new(dpsi),
            ddpsi: Arc::new(ddpsi),
            domain: Interval::all(),
            unit_speed: libm::fabs(r - 1.0) < 1e-15,
            u_period: Some(2.0 * core::f64::consts::PI),
        }
    }

    /// Flat plane as a surface of revolution: `phi = u`, `psi = 0`, `u > 0`.
    pub fn plane() -> Profile {
        Profile {
            name: "plane".to_owned(),
            phi: Arc::new(|u: f64| u),
            psi: Arc::new(|_| 0.0),
            dphi: Arc::new(|_| 1.0),
            ddphi: Arc::new(|_| 0.0),
            dpsi: Arc::new(|_| 0.0),
            ddpsi: Arc::new(|_| 0.0),
            domain: Interval::new(0.0, f64::INFINITY),
            unit_speed: true,
            u_period: None,
        }
    }

    /// Unit sphere: `phi = sin u`, `psi = -cos u` on `(0, pi)`, oriented so
    /// `dpsi > 0` at the equator.
    pub fn sphere() -> Profile {
        Profile {
            name: "sphere".to_owned(),
            phi: Arc::new(libm::sin),
            psi: Arc::new(|u: f64| -libm::cos(u)),
            dphi: Arc::new(libm::cos),
            ddphi: Arc::new(|u: f64| -libm::sin(u)),
            dpsi: Arc::new(libm::sin),
            ddpsi: Arc::new(libm::cos),
            domain: Interval::new(0.0, core::f64::consts::PI),
            unit_speed: true,
            u_period: None,
        }
    }

    /// Catenoid in arc-length form: `phi(t) = sqrt(1 + t^2)`, `psi = asinh t`,
    /// obtained from the generating curve `(cosh u, u)` via `t = sinh u`.
    pub fn catenoid() -> Profile {
        let phi = |t: f64| libm::sqrt(1.0 + t * t);
        let dphi = |t: f64| t / libm::sqrt(1.0 + t * t);
        let ddphi = |t: f64| {
            let q = 1.0 + t * t;
            1.0 / (q * libm::sqrt(q))
        };
        let dpsi = |t: f64| 1.0 / libm::sqrt(1.0 + t * t);
        let ddpsi = |t: f64| {
            let q = 1.0 + t * t;
            -t / (q * libm::sqrt(q))
        };
        Profile {
            name: "catenoid".to_owned(),
            phi: Arc::new(phi),
            psi: Arc::new(libm::asinh),
            dphi: Arc::new(dphi),
            ddphi: Arc::new(ddphi),
            dpsi: Arc::new(dpsi),
            ddpsi: Arc::new(ddpsi),
            domain: Interval::all(),
            unit_speed: true,
            u_period: None,
        }
    }

    /// Catenoid in its original parametrization `(cosh u, u)`; not unit speed.
    pub fn catenoid_original() -> Profile {
        Profile {
            name: "catenoid-original".to_owned(),
            phi: Arc::new(libm::cosh),
            psi: Arc::new(|u: f64| u),
            dphi: Arc::new(libm::sinh),
            ddphi: Arc::new(libm::cosh),
            dpsi: Arc::new(|_| 1.0),
            ddpsi: Arc::new(|_| 0.0),
            domain: Interval::all(),
            unit_speed: false,
            u_period: None,
        }
    }

    /// Profile from user functions; derivatives are generated by 4th-order
    /// central differences at step `eps^(1/5) * (|u| + 1)`.
    pub fn from_fns(
        name: &str,
        phi: Arc<ScalarFn>,
        psi: Arc<ScalarFn>,
        domain: Interval,
        unit_speed: bool,
    ) -> Profile {
        let fd_step = |u: f64| libm::pow(f64::EPSILON, 0.2) * (libm::fabs(u) + 1.0);
        let mk_d1 = |f: Arc<ScalarFn>| -> Arc<ScalarFn> {
            Arc::new(move |u: f64| central_diff1(&|x| f(x), u, fd_step(u)))
        };
        let mk_d2 = |f: Arc<ScalarFn>| -> Arc<ScalarFn> {
            Arc::new(move |u: f64| central_diff2(&|x| f(x), u, fd_step(u)))
        };
        Profile {
            name: name.to_owned(),
            dphi: mk_d1(phi.clone()),
            ddphi: mk_d2(phi.clone()),
            dpsi: mk_d1(psi.clone()),
            ddpsi: mk_d2(psi.clone()),
            phi,
            psi,
            domain,
            unit_speed,
            u_period: None,
        }
    }

    /// Profile from sampled `(u, phi, psi)` rows, cubic-interpolated.
    /// Derivatives are the exact derivatives of the interpolating splines.
    pub fn tabulated(name: &str, rows: &[(f64, f64, f64)]) -> Result<Profile, SurfaceError> {
        if rows.len() < 4 {
            return Err(SurfaceError::Invalid("tabulated profile needs >= 4 rows"));
        }
        let u: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let phi: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let psi: Vec<f64> = rows.iter().map(|r| r.2).collect();
        for w in u.windows(2) {
            if !(w[1] > w[0]) {
                return Err(SurfaceError::Invalid("tabulated u must be increasing"));
            }
        }
        if phi.iter().any(|&p| !(p > 0.0)) {
            return Err(SurfaceError::Invalid("tabulated phi must be positive"));
        }
        let domain = Interval::new(u[0], u[u.len() - 1]);
        let sp_phi = Arc::new(
            CubicSpline::natural(u.clone(), phi).ok_or(SurfaceError::Invalid("bad phi rows"))?,
        );
        let sp_psi =
            Arc::new(CubicSpline::natural(u, psi).ok_or(SurfaceError::Invalid("bad psi rows"))?);
        let (p0, p1, p2) = (sp_phi.clone(), sp_phi.clone(), sp_phi.clone());
        let (q0, q1, q2) = (sp_psi.clone(), sp_psi.clone(), sp_psi.clone());
        Ok(Profile {
            name: name.to_owned(),
            phi: Arc::new(move |t| p0.eval(t)),
            dphi: Arc::new(move |t| p1.deriv(t)),
            ddphi: Arc::new(move |t| p2.deriv2(t)),
            psi: Arc::new(move |t| q0.eval(t)),
            dpsi: Arc::new(move |t| q1.deriv(t)),
            ddpsi: Arc::new(move |t| q2.deriv2(t)),
            domain,
            unit_speed: false,
            u_period: None,
        })
    }

    /// Consistency check of the stored derivative fields against central
    /// differences, positivity of `phi`, and the unit-speed claim.
    pub fn validate(&self, n_samples: usize) -> Result<(), SurfaceError> {
        let (lo, hi) = sample_window(&self.domain);
        for i in 0..n_samples {
            let frac = (i as f64 + 0.5) / n_samples as f64;
            let u = lo + frac * (hi - lo);
            let p = self.phi(u);
            if !(p > 0.0) && p <= EPS_DOM {
                return Err(SurfaceError::AxisTooClose { u });
            }
            if self.unit_speed {
                let g = self.speed(u);
                if libm::fabs(g * g - 1.0) > 1e-10 {
                    return Err(SurfaceError::NotUnitSpeed);
                }
            }
            // First derivatives against O(h^2) central differences; the
            // threshold leaves two orders over the difference noise.
            let h = 1e-5 * (libm::fabs(u) + 1.0);
            let scale = 1.0 + libm::fabs(p) + libm::fabs(self.psi(u));
            let fd_phi = ((self.phi)(u + h) - (self.phi)(u - h)) / (2.0 * h);
            let fd_psi = ((self.psi)(u + h) - (self.psi)(u - h)) / (2.0 * h);
            if libm::fabs(self.dphi(u) - fd_phi) > 1e-6 * scale
                || libm::fabs(self.dpsi(u) - fd_psi) > 1e-6 * scale
            {
                return Err(SurfaceError::Invalid("first derivative mismatch"));
            }
            let h2 = 1e-4 * (libm::fabs(u) + 1.0);
            let fd2_phi = ((self.phi)(u + h2) - 2.0 * p + (self.phi)(u - h2)) / (h2 * h2);
            let fd2_psi =
                ((self.psi)(u + h2) - 2.0 * self.psi(u) + (self.psi)(u - h2)) / (h2 * h2);
            if libm::fabs(self.ddphi(u) - fd2_phi) > 1e-4 * scale
                || libm::fabs(self.ddpsi(u) - fd2_psi) > 1e-4 * scale
            {
                return Err(SurfaceError::Invalid("second derivative mismatch"));
            }
        }
        Ok(())
    }

    /// Reparametrize the generating curve by arc length.
    ///
    /// The same surface is produced with `unit_speed = true`; the arc-length
    /// function is accumulated by panelwise Simpson quadrature and inverted
    /// through a clamped cubic spline, refined until the parameter error is
    /// below `tol`. Unbounded aperiodic domains are covered out to arc length
    /// ~1e4 from the anchor.
    pub fn arclength_reparametrize(self, tol: f64) -> Result<Profile, SurfaceError> {
        if !(tol > 0.0) {
            return Err(SurfaceError::Invalid("tol must be positive"));
        }
        if self.unit_speed {
            return Ok(self);
        }
        let (ua, anchor, ub) = match self.u_period {
            Some(p) => (0.0, 0.0, p),
            None => reparam_window(&self)?,
        };
        let orig = Arc::new(self);
        let mut panels = 512usize;
        while panels <= 1 << 16 {
            let table = arclength_table(&orig, ua, anchor, ub, panels);
            let d0 = 1.0 / orig.speed(ua);
            let dn = 1.0 / orig.speed(ub);
            let spline = CubicSpline::clamped(table.t.clone(), table.u.clone(), d0, dn)
                .ok_or(SurfaceError::Invalid("degenerate arc-length table"))?;
            let inner = Arc::new(ReparamInner {
                orig: orig.clone(),
                spline,
                u_period: orig.u_period,
                t_period: orig.u_period.map(|_| table.t[table.t.len() - 1]),
            });
            if reparam_error(&inner, ua, tol) {
                return Ok(build_reparam_profile(inner, &orig));
            }
            panels *= 2;
        }
        Err(SurfaceError::ToleranceNotMet)
    }
}

/// `sin` with sub-roundoff results flushed to zero: arguments within one
/// rounding of a multiple of pi evaluate exactly to 0, so the symmetry
/// points of the builtin profiles are representable.
fn sin_flushed(x: f64) -> f64 {
    let s = libm::sin(x);
    if libm::fabs(s) < 2.5e-16 {
        0.0
    } else {
        s
    }
}

/// `cos` with the same flush near odd multiples of pi/2.
fn cos_flushed(x: f64) -> f64 {
    let c = libm::cos(x);
    if libm::fabs(c) < 2.5e-16 {
        0.0
    } else {
        c
    }
}

/// Bounded sampling window for validation and table construction.
fn sample_window(d: &Interval) -> (f64, f64) {
    let lo = if d.lo.is_finite() { d.lo + 1e-3 } else { -10.0 };
    let hi = if d.hi.is_finite() { d.hi - 1e-3 } else { 10.0 };
    (lo, hi)
}

/// Working `u`-range and anchor for reparametrizing an aperiodic profile:
/// bounded sides come from the domain, unbounded sides are marched out to
/// arc length 1e4 from the anchor. Arc length is measured from the anchor.
fn reparam_window(p: &Profile) -> Result<(f64, f64, f64), SurfaceError> {
    const T_SPAN: f64 = 1e4;
    let anchor = if p.domain.contains(0.0) {
        0.0
    } else if p.domain.is_bounded() {
        0.5 * (p.domain.lo + p.domain.hi)
    } else if p.domain.lo.is_finite() {
        p.domain.lo + 1.0
    } else {
        p.domain.hi - 1.0
    };
    let march = |dir: f64| -> f64 {
        let mut u = anchor;
        let mut acc = 0.0;
        let step = 0.25 * dir;
        loop {
            let next = u + step;
            if !p.domain.contains(next) {
                return if dir > 0.0 { p.domain.hi } else { p.domain.lo };
            }
            acc += 0.5 * (p.speed(u) + p.speed(next)) * libm::fabs(step);
            u = next;
            if acc >= T_SPAN || !acc.is_finite() {
                return u;
            }
        }
    };
    let lo = if p.domain.lo.is_finite() {
        p.domain.lo
    } else {
        march(-1.0)
    };
    let hi = if p.domain.hi.is_finite() {
        p.domain.hi
    } else {
        march(1.0)
    };
    if !(hi > lo) {
        return Err(SurfaceError::Invalid("empty reparametrization window"));
    }
    Ok((lo, anchor, hi))
}

struct ArcTable {
    u: Vec<f64>,
    t: Vec<f64>,
}

/// Cumulative arc length over `[ua, ub]` with `t(anchor) = 0`, Simpson per
/// panel on a near-uniform grid that contains the anchor as a node.
fn arclength_table(p: &Profile, ua: f64, anchor: f64, ub: f64, panels: usize) -> ArcTable {
    let width = ub - ua;
    let mut grid = Vec::with_capacity(panels + 2);
    if anchor > ua {
        let n_lo = libm::fmax(1.0, libm::round(panels as f64 * (anchor - ua) / width)) as usize;
        for i in 0..n_lo {
            grid.push(ua + (anchor - ua) * i as f64 / n_lo as f64);
        }
    }
    if anchor < ub {
        let n_hi = libm::fmax(1.0, libm::round(panels as f64 * (ub - anchor) / width)) as usize;
        for i in 0..=n_hi {
            grid.push(anchor + (ub - anchor) * i as f64 / n_hi as f64);
        }
    } else {
        grid.push(anchor);
    }

    let panel = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        // Composite Simpson on two half-panels: O(h^5) local error.
        (b - a) / 12.0
            * (p.speed(a) + 4.0 * p.speed(lm) + 2.0 * p.speed(m) + 4.0 * p.speed(rm) + p.speed(b))
    };
    let n = grid.len();
    let mut t = alloc::vec![0.0; n];
    let i_anchor = grid
        .iter()
        .position(|&g| g == anchor)
        .unwrap_or(0);
    for i in (0..i_anchor).rev() {
        t[i] = t[i + 1] - panel(grid[i], grid[i + 1]);
    }
    for i in i_anchor + 1..n {
        t[i] = t[i - 1] + panel(grid[i - 1], grid[i]);
    }
    ArcTable { u: grid, t }
}

struct ReparamInner {
    orig: Arc<Profile>,
    spline: CubicSpline,
    u_period: Option<f64>,
    t_period: Option<f64>,
}

impl ReparamInner {
    /// Original parameter at arc length `t`, periodic when the profile is.
    fn u_of(&self, t: f64) -> f64 {
        match (self.u_period, self.t_period) {
            (Some(up), Some(tp)) => {
                let k = libm::floor(t / tp);
                self.spline.eval(t - k * tp) + k * up
            }
            _ => self.spline.eval(t),
        }
    }
}

/// Verify `|arc(u(t)) - t| <= tol` at interior checkpoints.
fn reparam_error(inner: &ReparamInner, ua: f64, tol: f64) -> bool {
    let knots = inner.spline.knots();
    let t_lo = knots[0];
    let t_hi = knots[knots.len() - 1];
    let n_checks = 37;
    let mut u_prev = ua;
    let mut t_prev = t_lo;
    for i in 1..=n_checks {
        let t = t_lo + (t_hi - t_lo) * i as f64 / (n_checks + 1) as f64;
        let u = inner.spline.eval(t);
        let seg = adaptive_simpson(&|x| inner.orig.speed(x), u_prev, u, 0.05 * tol);
        let seg = match seg {
            Some(s) => s,
            None => return false,
        };
        let arc = t_prev + seg;
        if libm::fabs(arc - t) > tol {
            return false;
        }
        u_prev = u;
        t_prev = arc;
    }
    true
}

fn build_reparam_profile(inner: Arc<ReparamInner>, orig: &Arc<Profile>) -> Profile {
    // Chain rule with the exact speed of the original profile: evaluating
    // phi, dphi, ... all at the same u(t) keeps dphi^2 + dpsi^2 = 1 exact,
    // so the residual error is purely a shift along the curve below tol.
    let dphi_dt = |o: &Profile, u: f64| o.dphi(u) / o.speed(u);
    let dpsi_dt = |o: &Profile, u: f64| o.dpsi(u) / o.speed(u);
    let d2 = |o: &Profile, u: f64, d1: f64, d2u: f64| {
        let g = o.speed(u);
        let gp = (o.dphi(u) * o.ddphi(u) + o.dpsi(u) * o.ddpsi(u)) / g;
        (d2u - d1 * gp) / (g * g)
    };

    let c = inner.clone();
    let phi: Arc<ScalarFn> = Arc::new(move |t| c.orig.phi(c.u_of(t)));
    let c = inner.clone();
    let psi: Arc<ScalarFn> = Arc::new(move |t| c.orig.psi(c.u_of(t)));
    let c = inner.clone();
    let dphi: Arc<ScalarFn> = Arc::new(move |t| dphi_dt(&c.orig, c.u_of(t)));
    let c = inner.clone();
    let dpsi: Arc<ScalarFn> = Arc::new(move |t| dpsi_dt(&c.orig, c.u_of(t)));
    let c = inner.clone();
    let ddphi: Arc<ScalarFn> = Arc::new(move |t| {
        let u = c.u_of(t);
        d2(&c.orig, u, c.orig.dphi(u), c.orig.ddphi(u))
    });
    let c = inner.clone();
    let ddpsi: Arc<ScalarFn> = Arc::new(move |t| {
        let u = c.u_of(t);
        d2(&c.orig, u, c.orig.dpsi(u), c.orig.ddpsi(u))
    });

    // Aperiodic profiles report exactly the covered arc-length range.
    let domain = if inner.u_period.is_some() {
        Interval::all()
    } else {
        let knots = inner.spline.knots();
        Interval::new(knots[0], knots[knots.len() - 1])
    };

    Profile {
        name: format!("{}-arclen", orig.name()),
        phi,
        psi,
        dphi,
        ddphi,
        dpsi,
        ddpsi,
        domain,
        unit_speed: true,
        u_period: inner.t_period,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn torus_embed_matches_radii() {
        let t = Profile::torus(2.0, 1.0);
        let p = t.embed(0.0, 0.0).unwrap();
        assert!((p - Vec3::new(3.0, 0.0, 0.0)).norm() < 1e-15);
        let q = t.embed(PI, 0.0).unwrap();
        assert!((q - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn catenoid_embed_at_neck() {
        let c = Profile::catenoid();
        let p = c.embed(0.0, FRAC_PI_2).unwrap();
        assert!((p - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn embed_rejects_out_of_domain() {
        let s = Profile::sphere();
        assert_eq!(s.embed(4.0, 0.0), Err(SurfaceError::Domain { u: 4.0 }));
    }

    #[test]
    fn metric_of_builtin_profiles() {
        let t = Profile::torus(2.0, 1.0);
        let (guu, gvv) = t.metric_coeffs(0.0).unwrap();
        assert!((guu - 1.0).abs() < 1e-15);
        assert!((gvv - 9.0).abs() < 1e-15);

        let pl = Profile::plane();
        let (guu, gvv) = pl.metric_coeffs(2.0).unwrap();
        assert!((guu - 1.0).abs() < 1e-15);
        assert!((gvv - 4.0).abs() < 1e-15);

        let at = Profile::angular_torus(2.0, 0.5);
        let (guu, _) = at.metric_coeffs(0.7).unwrap();
        assert!((guu - 0.25).abs() < 1e-15);
    }

    #[test]
    fn frame_at_poles_of_the_meridian_circle() {
        let t = Profile::torus(2.0, 1.0);
        let f = t.frame_at(0.0, 0.0).unwrap();
        assert!((f.e1 - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
        assert!((f.e2 - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((f.n - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);

        let g = t.frame_at(PI, 0.0).unwrap();
        assert!((g.e1 - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-14);
        assert!((g.n - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-14);

        let pl = Profile::plane();
        let h = pl.frame_at(3.0, 0.0).unwrap();
        assert!((h.e1 - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((h.e2 - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((h.n - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn frame_requires_unit_speed() {
        let at = Profile::angular_torus(2.0, 0.5);
        assert_eq!(at.frame_at(0.0, 0.0).err(), Some(SurfaceError::NotUnitSpeed));
    }

    #[test]
    fn gauss_curvature_against_difference_quotient() {
        let t = Profile::torus(2.0, 1.0);
        // Independent oracle: central second difference of phi at h = 1e-5.
        let h = 1e-5;
        let ddphi_fd = |u: f64| (t.phi(u + h) - 2.0 * t.phi(u) + t.phi(u - h)) / (h * h);
        let k_fd = |u: f64| -ddphi_fd(u) / t.phi(u);

        let k0 = t.gauss_curvature(0.0).unwrap();
        assert!((k0 - 1.0 / 3.0).abs() < 1e-12);
        assert!((k0 - k_fd(0.0)).abs() < 1e-6);

        let kp = t.gauss_curvature(PI).unwrap();
        assert!((kp + 1.0).abs() < 1e-12);
        assert!((kp - k_fd(PI)).abs() < 1e-6);

        let pl = Profile::plane();
        assert_eq!(pl.gauss_curvature(1.5).unwrap(), 0.0);
    }

    #[test]
    fn gauss_curvature_sign_change_at_quarter_turns() {
        let t = Profile::torus(2.0, 1.0);
        let eps = 1e-6;
        assert!(t.gauss_curvature(FRAC_PI_2 - eps).unwrap() > 0.0);
        assert!(t.gauss_curvature(FRAC_PI_2 + eps).unwrap() < 0.0);
        assert!(t.gauss_curvature(-FRAC_PI_2 + eps).unwrap() > 0.0);
        assert!(t.gauss_curvature(-FRAC_PI_2 - eps).unwrap() < 0.0);
    }

    #[test]
    fn profiles_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Profile>();
        assert_send_sync::<crate::soliton::Trajectory>();
    }

    #[test]
    fn builtin_profiles_validate() {
        for p in [
            Profile::torus(2.0, 1.0),
            Profile::plane(),
            Profile::sphere(),
            Profile::catenoid(),
            Profile::angular_torus(2.0, 0.5),
            Profile::catenoid_original(),
        ] {
            p.validate(64).unwrap();
        }
    }

    #[test]
    fn reparametrize_plane_is_identity() {
        let p = Profile::plane().arclength_reparametrize(1e-10).unwrap();
        assert!(p.unit_speed);
        assert!((p.phi(2.5) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn reparametrize_angular_torus_closed_form() {
        // Constant speed r: the arc-length profile is R + r cos(t/r).
        let p = Profile::angular_torus(2.0, 0.5)
            .arclength_reparametrize(1e-10)
            .unwrap();
        assert!(p.unit_speed);
        assert!((p.u_period.unwrap() - PI).abs() < 1e-9);
        for i in 0..40 {
            let t = -3.0 + 6.0 * i as f64 / 39.0;
            let expect = 2.0 + 0.5 * libm::cos(t / 0.5);
            assert!(
                (p.phi(t) - expect).abs() < 1e-8,
                "phi({t}) = {} vs {expect}",
                p.phi(t)
            );
            let g = p.speed(t);
            assert!((g * g - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reparametrize_catenoid_closed_form() {
        // t = sinh u gives phi = sqrt(1 + t^2), psi = asinh t.
        let p = Profile::catenoid_original()
            .arclength_reparametrize(1e-9)
            .unwrap();
        assert!(p.unit_speed);
        for i in 0..40 {
            let t = -8.0 + 16.0 * i as f64 / 39.0;
            assert!((p.phi(t) - libm::sqrt(1.0 + t * t)).abs() < 1e-7);
            assert!((p.psi(t) - libm::asinh(t)).abs() < 1e-7);
            let g = p.speed(t);
            assert!((g * g - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn tabulated_profile_tracks_sampled_torus() {
        let t = Profile::torus(2.0, 1.0);
        let rows: Vec<(f64, f64, f64)> = (0..=400)
            .map(|i| {
                let u = -0.5 + 7.0 * i as f64 / 400.0;
                (u, t.phi(u), t.psi(u))
            })
            .collect();
        let tab = Profile::tabulated("torus-table", &rows).unwrap();
        for i in 0..60 {
            let u = 6.0 * (i as f64 + 0.5) / 60.0;
            assert!((tab.phi(u) - t.phi(u)).abs() < 1e-7);
            assert!((tab.dphi(u) - t.dphi(u)).abs() < 1e-5);
        }
        tab.validate(32).unwrap();
    }
}
