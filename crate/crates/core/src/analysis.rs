//! Verification suite over integrated trajectories: conserved quantities,
//! asymptote detection, closure and Gauss–Bonnet checks, and the
//! constant-curvature probe.

use alloc::string::String;
use alloc::vec::Vec;

use crate::numerics::{adaptive_simpson, wrap_signed};
use crate::soliton::{
    self, integrate, normalize_initial, rhs, IntegratorConfig, SolitonError, SolitonParams,
    Trajectory,
};
use crate::surface::Profile;
use crate::tolerances::{
    self, CLAIRAUT_DEFECT, CLAIRAUT_DRIFT, GAUSS_BONNET_AGREE, KAPPA_CONSISTENCY, LAMBDA_RESIDUAL,
    UNIT_SPEED_DRIFT,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalysisError {
    /// No sub-interval satisfies the preconditions of the identity check.
    NoValidInterval,
    /// The trajectory does not close within the requested tolerance.
    NotClosed,
    Soliton(SolitonError),
}

impl From<SolitonError> for AnalysisError {
    fn from(e: SolitonError) -> Self {
        AnalysisError::Soliton(e)
    }
}

impl core::fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AnalysisError::NoValidInterval => write!(f, "no interval satisfies |u'| > delta"),
            AnalysisError::NotClosed => write!(f, "trajectory is not closed"),
            AnalysisError::Soliton(e) => write!(f, "{e}"),
        }
    }
}

/// Largest deviation from the unit-speed relation over the trajectory.
pub fn unit_speed_drift(p: &Profile, traj: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .fold(0.0, |acc, st| libm::fmax(acc, st.constraint_residual(p)))
}

/// Largest pointwise difference between the Darboux-frame curvature (second
/// derivatives from the right-hand side) and `a phi u'`.
///
/// The identity holds exactly on the unit-speed relation, so each sampled
/// tangent is projected onto it first; integration drift is measured
/// separately by [`unit_speed_drift`].
pub fn kappa_consistency_residual(p: &Profile, traj: &Trajectory) -> f64 {
    let par = traj.params;
    let mut worst: f64 = 0.0;
    for st in &traj.samples {
        let phi = p.phi(st.u);
        let q = st.up * st.up + st.vp * st.vp * phi * phi;
        let inv = 1.0 / libm::sqrt(q);
        let proj = soliton::SolitonState {
            up: st.up * inv,
            vp: st.vp * inv,
            ..*st
        };
        let d = match rhs(p, &par, &proj) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let kd = soliton::kappa_darboux(p, &proj, d.dup, d.dvp);
        let ks = soliton::kappa_soliton(p, &par, &proj);
        worst = libm::fmax(worst, libm::fabs(kd - ks));
    }
    worst
}

/// Largest drift of the Clairaut quantity `phi^2 v'` from its value at the
/// `s = 0` sample. For geodesics this quantity is a first integral.
pub fn clairaut_drift(p: &Profile, traj: &Trajectory) -> f64 {
    if traj.is_empty() {
        return 0.0;
    }
    let st0 = &traj.samples[traj.idx_s0()];
    let phi0 = p.phi(st0.u);
    let c0 = phi0 * phi0 * st0.vp;
    traj.samples.iter().fold(0.0, |acc, st| {
        let phi = p.phi(st.u);
        libm::fmax(acc, libm::fabs(phi * phi * st.vp - c0))
    })
}

/// Residual of `d/ds(phi^2 v') = a phi^2 u'^2` by finite differences along
/// the recorded samples. Meaningful on fixed-step runs with small steps;
/// uniform sampling gets a 4th-order stencil so the truncation error stays
/// below the tolerance even for fast rotation rates.
pub fn clairaut_defect_residual(p: &Profile, traj: &Trajectory) -> f64 {
    let a = traj.params.a;
    let n = traj.len();
    if n < 5 {
        return 0.0;
    }
    let q = |i: usize| {
        let st = &traj.samples[i];
        let phi = p.phi(st.u);
        phi * phi * st.vp
    };
    let rhs_v = |i: usize| {
        let st = &traj.samples[i];
        let phi = p.phi(st.u);
        a * phi * phi * st.up * st.up
    };
    let mut worst: f64 = 0.0;
    for i in 2..n - 2 {
        let h = traj.samples[i].s - traj.samples[i - 1].s;
        let local_uniform = (i - 1..i + 2).all(|j| {
            let d = traj.samples[j + 1].s - traj.samples[j].s;
            libm::fabs(d / h - 1.0) < 1e-9
        });
        let lhs = if local_uniform {
            (-q(i + 2) + 8.0 * q(i + 1) - 8.0 * q(i - 1) + q(i - 2)) / (12.0 * h)
        } else {
            (q(i + 1) - q(i - 1)) / (traj.samples[i + 1].s - traj.samples[i - 1].s)
        };
        worst = libm::fmax(worst, libm::fabs(lhs - rhs_v(i)));
    }
    worst
}

/// Largest excess of `|u''|` over the bound `|a| phi + |dphi| / phi`;
/// non-positive when the bound holds everywhere.
pub fn upp_bound_excess(p: &Profile, traj: &Trajectory) -> f64 {
    let par = traj.params;
    let mut worst = f64::NEG_INFINITY;
    for st in &traj.samples {
        let d = match rhs(p, &par, st) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let phi = p.phi(st.u);
        let bound = libm::fabs(par.a) * phi + libm::fabs(p.dphi(st.u)) / phi;
        worst = libm::fmax(worst, libm::fabs(d.dup) - bound);
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

/// Largest decrease between consecutive `f` samples (0 when non-decreasing).
pub fn f_monotone_violation(traj: &Trajectory) -> f64 {
    let mut worst: f64 = 0.0;
    for w in traj.f.windows(2) {
        worst = libm::fmax(worst, w[0] - w[1]);
    }
    worst
}

/// Largest `kappa^2` over the trailing arc-length window (forward end);
/// `None` when the trajectory does not cover the window.
pub fn trailing_kappa_sq(traj: &Trajectory, window: f64) -> Option<f64> {
    if traj.arc_span() < window {
        return None;
    }
    let s_end = traj.samples.last()?.s;
    let mut worst: f64 = 0.0;
    for (st, k) in traj.samples.iter().zip(&traj.kappa).rev() {
        if st.s < s_end - window {
            break;
        }
        worst = libm::fmax(worst, k * k);
    }
    Some(worst)
}

/// Largest `kappa^2` over the leading arc-length window (backward end).
pub fn leading_kappa_sq(traj: &Trajectory, window: f64) -> Option<f64> {
    if traj.arc_span() < window {
        return None;
    }
    let s0 = traj.samples.first()?.s;
    let mut worst: f64 = 0.0;
    for (st, k) in traj.samples.iter().zip(&traj.kappa) {
        if st.s > s0 + window {
            break;
        }
        worst = libm::fmax(worst, k * k);
    }
    Some(worst)
}

fn window_asymptote(
    p: &Profile,
    states: &[soliton::SolitonState],
    span: (f64, f64),
    eps: f64,
) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for st in states {
        if st.s < span.0 || st.s > span.1 {
            continue;
        }
        if libm::fabs(st.up) >= eps {
            return None;
        }
        sum += st.u;
        count += 1;
    }
    if count == 0 {
        return None;
    }
    let u_star = sum / count as f64;
    if libm::fabs(p.dphi(u_star)) < eps {
        Some(u_star)
    } else {
        None
    }
}

/// Parallel the forward end is asymptotic to: mean of `u` over the trailing
/// window when `|u'| < eps` holds throughout and the mean sits on a parallel
/// geodesic (`|dphi| < eps`).
pub fn detect_asymptote(p: &Profile, traj: &Trajectory, eps: f64, window: f64) -> Option<f64> {
    if traj.arc_span() < window {
        return None;
    }
    let s_end = traj.samples.last()?.s;
    window_asymptote(p, &traj.samples, (s_end - window, s_end), eps)
}

/// Asymptote results for both ends of a bidirectional trajectory.
pub fn ends_asymptotes(
    p: &Profile,
    traj: &Trajectory,
    eps: f64,
    window: f64,
) -> (Option<f64>, Option<f64>) {
    let fwd = detect_asymptote(p, traj, eps, window);
    let bwd = if traj.arc_span() >= window {
        let s0 = traj.samples[0].s;
        window_asymptote(p, &traj.samples, (s0, s0 + window), eps)
    } else {
        None
    };
    (fwd, bwd)
}

/// Result of the turning-identity check: on intervals where the tangent is
/// neither parallel nor meridional and `v'` keeps its sign, the quantity
/// `kappa/Lambda - sigma * f` is constant for exactly one sign.
#[derive(Clone, Copy, Debug)]
pub struct LambdaIdentity {
    pub c_hat: f64,
    pub sign: f64,
    pub residual: f64,
    pub interval: (f64, f64),
    pub n_samples: usize,
}

/// Evaluate the turning identity on the longest admissible interval.
///
/// The ratio `kappa/Lambda` is computed in the algebraically equivalent form
/// `kappa * sqrt(1 - u'^2) / u'`, which stays finite through meridional
/// tangents. Intervals are split where `v'` changes sign: the sign in the
/// identity is the sign of `v'`, so the fitted constant only exists on a
/// fixed branch.
pub fn check_lambda_identity(
    traj: &Trajectory,
    delta: f64,
) -> Result<LambdaIdentity, AnalysisError> {
    let n = traj.len();
    let admissible = |i: usize| libm::fabs(traj.samples[i].up) > delta;
    let sgn = |x: f64| {
        if x > 0.0 {
            1i8
        } else if x < 0.0 {
            -1
        } else {
            0
        }
    };

    // Longest run of admissible samples with a consistent v' sign.
    let span_of = |st: usize, en: usize| traj.samples[en].s - traj.samples[st].s;
    let mut best: Option<(usize, usize)> = None;
    let mut consider = |st: usize, en: usize| {
        let better = match best {
            Some((bs, be)) => span_of(st, en) > span_of(bs, be),
            None => true,
        };
        if better {
            best = Some((st, en));
        }
    };
    let mut start = None::<usize>;
    let mut run_sign = 0i8;
    for i in 0..n {
        let s_i = sgn(traj.samples[i].vp);
        if admissible(i) {
            let flips = run_sign != 0 && s_i != 0 && s_i != run_sign;
            if start.is_none() {
                start = Some(i);
                run_sign = s_i;
            } else if flips {
                consider(start.unwrap(), i - 1);
                start = Some(i);
                run_sign = s_i;
            } else if run_sign == 0 {
                run_sign = s_i;
            }
        } else if let Some(st) = start.take() {
            consider(st, i - 1);
            run_sign = 0;
        }
    }
    if let Some(st) = start {
        consider(st, n - 1);
    }
    let (i0, i1) = best.ok_or(AnalysisError::NoValidInterval)?;
    if i1 - i0 < 1 {
        return Err(AnalysisError::NoValidInterval);
    }

    let ratio = |i: usize| {
        let up = traj.samples[i].up;
        let w = 1.0 - up * up;
        traj.kappa[i] * libm::sqrt(libm::fmax(w, 0.0)) / up
    };
    let mut best_fit: Option<(f64, f64, f64)> = None;
    for sigma in [1.0f64, -1.0] {
        let count = (i1 - i0 + 1) as f64;
        let mut mean = 0.0;
        for i in i0..=i1 {
            mean += ratio(i) - sigma * traj.f[i];
        }
        mean /= count;
        let mut var = 0.0;
        for i in i0..=i1 {
            let d = ratio(i) - sigma * traj.f[i] - mean;
            var += d * d;
        }
        let sd = if count > 1.0 {
            libm::sqrt(var / (count - 1.0))
        } else {
            0.0
        };
        if best_fit.is_none() || sd < best_fit.unwrap().2 {
            best_fit = Some((sigma, mean, sd));
        }
    }
    let (sign, c_hat, residual) = best_fit.unwrap();
    Ok(LambdaIdentity {
        c_hat,
        sign,
        residual,
        interval: (traj.samples[i0].s, traj.samples[i1].s),
        n_samples: i1 - i0 + 1,
    })
}

/// Detected closure of a trajectory.
#[derive(Clone, Copy, Debug)]
pub struct ClosureInfo {
    pub period: f64,
    /// Whether `u` is constant over the period (a parallel).
    pub is_parallel: bool,
    /// Residual phase-space gap at the detected period.
    pub gap: f64,
}

/// Phase-space gap between sample `j` and the initial state, wrapping the
/// periodic coordinates.
fn closure_gap(p: &Profile, traj: &Trajectory, i0: usize, j: usize) -> [f64; 4] {
    let a = &traj.samples[i0];
    let b = &traj.samples[j];
    let du = match p.u_period {
        Some(up) => wrap_signed(b.u - a.u, up),
        None => b.u - a.u,
    };
    let dv = wrap_signed(b.v - a.v, 2.0 * core::f64::consts::PI);
    [du, dv, b.up - a.up, b.vp - a.vp]
}

fn gap_norm(g: &[f64; 4]) -> f64 {
    g.iter().fold(0.0, |m, &x| libm::fmax(m, libm::fabs(x)))
}

/// Look for a return of the trajectory to its `s = 0` state (coordinates mod
/// the periods, tangent exactly). The candidate period is refined with one
/// linear least-squares step along the flow direction.
pub fn check_closed(p: &Profile, traj: &Trajectory, tol: f64) -> Option<ClosureInfo> {
    let i0 = traj.idx_s0();
    let n = traj.len();
    if n - i0 < 3 {
        return None;
    }
    let gaps: Vec<f64> = (i0..n)
        .map(|j| gap_norm(&closure_gap(p, traj, i0, j)))
        .collect();
    // Local minima of the gap, skipping the trivial one at s = 0; the last
    // sample counts when the gap is still shrinking there.
    let mut candidates: Vec<usize> = Vec::new();
    for k in 1..gaps.len() - 1 {
        if gaps[k] <= gaps[k - 1] && gaps[k] <= gaps[k + 1] && traj.samples[i0 + k].s > 1e-3 {
            candidates.push(i0 + k);
        }
    }
    let last = gaps.len() - 1;
    if last >= 1 && gaps[last] <= gaps[last - 1] && traj.samples[i0 + last].s > 1e-3 {
        candidates.push(i0 + last);
    }

    for j in candidates {
        let g = closure_gap(p, traj, i0, j);
        let st = &traj.samples[j];
        let d = match rhs(p, &traj.params, st) {
            Ok(d) => d,
            Err(_) => continue,
        };
        let gdot = [st.up, st.vp, d.dup, d.dvp];
        let denom: f64 = gdot.iter().map(|x| x * x).sum();
        if denom == 0.0 {
            continue;
        }
        let t_star = -(g[0] * gdot[0] + g[1] * gdot[1] + g[2] * gdot[2] + g[3] * gdot[3]) / denom;
        let refined = [
            g[0] + t_star * gdot[0],
            g[1] + t_star * gdot[1],
            g[2] + t_star * gdot[2],
            g[3] + t_star * gdot[3],
        ];
        let gap = gap_norm(&refined);
        if gap < tol {
            let period = st.s + t_star - traj.samples[i0].s;
            let u0 = traj.samples[i0].u;
            let mut is_parallel = true;
            for k in i0..=j {
                if libm::fabs(traj.samples[k].u - u0) > libm::fmax(tol, 1e-9) {
                    is_parallel = false;
                    break;
                }
            }
            return Some(ClosureInfo {
                period,
                is_parallel,
                gap,
            });
        }
    }
    None
}

/// Antiderivative of `phi` from the fixed anchor `u = 0` by adaptive
/// quadrature; the additive constant cancels in differences.
pub fn phi_antiderivative(p: &Profile, u: f64) -> Option<f64> {
    adaptive_simpson(&|x| p.phi(x), 0.0, u, 1e-13)
}

/// Both closed-curve integrals of the geodesic curvature: the direct
/// quadrature of `kappa` over one period, and `a * (h(u_end) - h(u_0))` with
/// `h' = phi`. They must vanish together on closed curves.
pub fn gauss_bonnet_check(
    p: &Profile,
    traj: &Trajectory,
    closure_tol: f64,
) -> Result<(f64, f64), AnalysisError> {
    let info = check_closed(p, traj, closure_tol).ok_or(AnalysisError::NotClosed)?;
    let i0 = traj.idx_s0();
    let s0 = traj.samples[i0].s;
    let s_end = s0 + info.period;

    let mut lhs = 0.0;
    let mut u_end = traj.samples[i0].u;
    for j in i0 + 1..traj.len() {
        let (sa, sb) = (traj.samples[j - 1].s, traj.samples[j].s);
        let (ka, kb) = (traj.kappa[j - 1], traj.kappa[j]);
        if sb <= s_end {
            lhs += 0.5 * (sb - sa) * (ka + kb);
            u_end = traj.samples[j].u;
            if sb == s_end {
                break;
            }
        } else {
            let frac = (s_end - sa) / (sb - sa);
            let k_end = ka + frac * (kb - ka);
            lhs += 0.5 * (s_end - sa) * (ka + k_end);
            u_end = traj.samples[j - 1].u + frac * (traj.samples[j].u - traj.samples[j - 1].u);
            break;
        }
    }

    let h0 = phi_antiderivative(p, traj.samples[i0].u).ok_or(AnalysisError::NotClosed)?;
    let h1 = phi_antiderivative(p, u_end).ok_or(AnalysisError::NotClosed)?;
    let rhs_v = traj.params.a * (h1 - h0);
    Ok((lhs, rhs_v))
}

/// Sweep report of the constant-curvature probe.
#[derive(Clone, Copy, Debug)]
pub struct ProbeReport {
    pub trajectories: usize,
    pub null_excluded: usize,
    /// Smallest relative kappa variation among non-null trajectories.
    pub min_rel_variation: Option<f64>,
    pub argmin: Option<(f64, f64)>,
}

/// Probe for solitons of constant non-zero curvature: integrate a grid of
/// initial conditions and report the least relative variation of `kappa`
/// observed over the requested arc length. Null trajectories are excluded:
/// those with `kappa` identically near zero, and exact parallel-geodesic
/// fixed points (whose true solutions have `kappa = 0` even though the
/// numerical orbit can drift off an unstable equator at roundoff scale).
pub fn constant_curvature_probe(
    p: &Profile,
    a: f64,
    n_points: usize,
    n_dirs: usize,
    arc_len: f64,
) -> ProbeReport {
    let par = SolitonParams { a };
    let span = p.u_period.unwrap_or(2.0 * core::f64::consts::PI);
    let cfg = IntegratorConfig {
        s_max: arc_len,
        bidirectional: false,
        ..IntegratorConfig::default()
    };
    let snap = |x: f64| if libm::fabs(x) < 1e-15 { 0.0 } else { x };
    let mut report = ProbeReport {
        trajectories: 0,
        null_excluded: 0,
        min_rel_variation: None,
        argmin: None,
    };
    for i in 0..n_points {
        let u0 = span * i as f64 / n_points as f64;
        for k in 0..n_dirs {
            let alpha = 2.0 * core::f64::consts::PI * k as f64 / n_dirs as f64;
            let (dir_u, dir_v) = (snap(libm::cos(alpha)), snap(libm::sin(alpha)));
            let init = match normalize_initial(p, u0, 0.0, dir_u, dir_v) {
                Ok(st) => st,
                Err(_) => continue,
            };
            let traj = match integrate(p, &par, &init, &cfg) {
                Ok(t) => t,
                Err(_) => continue,
            };
            report.trajectories += 1;
            let parallel_fixed_point = init.up == 0.0 && libm::fabs(p.dphi(init.u)) < 1e-12;
            let mut kmin = f64::INFINITY;
            let mut kmax = f64::NEG_INFINITY;
            let mut kabs: f64 = 0.0;
            for k in &traj.kappa {
                kmin = libm::fmin(kmin, *k);
                kmax = libm::fmax(kmax, *k);
                kabs = libm::fmax(kabs, libm::fabs(*k));
            }
            if parallel_fixed_point || kabs < tolerances::PROBE_NULL_KAPPA {
                report.null_excluded += 1;
                continue;
            }
            let rel = (kmax - kmin) / kabs;
            if report.min_rel_variation.map(|m| rel < m).unwrap_or(true) {
                report.min_rel_variation = Some(rel);
                report.argmin = Some((u0, alpha));
            }
        }
    }
    report
}

/// Clairaut and unit-speed conservation of the geodesic reduction (`a = 0`).
#[derive(Clone, Copy, Debug)]
pub struct GeodesicCrossCheck {
    pub clairaut_drift: f64,
    pub unit_speed_drift: f64,
}

pub fn geodesic_cross_check(
    p: &Profile,
    init: &soliton::SolitonState,
    cfg: &IntegratorConfig,
) -> Result<GeodesicCrossCheck, SolitonError> {
    let traj = integrate(p, &SolitonParams { a: 0.0 }, init, cfg)?;
    Ok(GeodesicCrossCheck {
        clairaut_drift: clairaut_drift(p, &traj),
        unit_speed_drift: unit_speed_drift(p, &traj),
    })
}

/// One named check with its residual and verdict.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Arc-length interval the check was evaluated on, when restricted.
    pub interval: Option<(f64, f64)>,
    pub note: String,
}

impl CheckResult {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> CheckResult {
        CheckResult {
            name,
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            interval: None,
            note: String::new(),
        }
    }
}

/// Which checks to run when building a [`VerificationReport`].
#[derive(Clone, Copy, Debug)]
pub struct CheckSet {
    pub unit_speed: bool,
    pub kappa_consistency: bool,
    pub clairaut: bool,
    pub lambda_identity: bool,
    pub upp_bound: bool,
    pub f_monotone: bool,
    pub asymptote: bool,
    pub closure: bool,
}

impl Default for CheckSet {
    fn default() -> Self {
        CheckSet {
            unit_speed: true,
            kappa_consistency: true,
            clairaut: true,
            lambda_identity: true,
            upp_bound: true,
            f_monotone: true,
            asymptote: true,
            closure: false,
        }
    }
}

#[derive(Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
    pub asymptote_forward: Option<f64>,
    pub asymptote_backward: Option<f64>,
    pub closure: Option<ClosureInfo>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Run the standard invariant suite on one trajectory.
///
/// `defect_traj`, when given, must be a fixed-step shadow run of the same
/// initial condition; it carries the finite-difference Clairaut-defect check,
/// which needs uniform small steps.
pub fn build_report(
    p: &Profile,
    traj: &Trajectory,
    set: &CheckSet,
    defect_traj: Option<&Trajectory>,
) -> VerificationReport {
    let mut rep = VerificationReport::default();
    if set.unit_speed {
        rep.checks.push(CheckResult::new(
            "unit-speed-drift",
            unit_speed_drift(p, traj),
            UNIT_SPEED_DRIFT,
        ));
    }
    if set.kappa_consistency {
        rep.checks.push(CheckResult::new(
            "kappa-consistency",
            kappa_consistency_residual(p, traj),
            KAPPA_CONSISTENCY,
        ));
    }
    if set.clairaut {
        if traj.params.a == 0.0 {
            rep.checks.push(CheckResult::new(
                "clairaut-drift",
                clairaut_drift(p, traj),
                CLAIRAUT_DRIFT,
            ));
        } else if let Some(shadow) = defect_traj {
            rep.checks.push(CheckResult::new(
                "clairaut-defect",
                clairaut_defect_residual(p, shadow),
                CLAIRAUT_DEFECT,
            ));
        }
    }
    if set.lambda_identity {
        match check_lambda_identity(traj, 1e-3) {
            Ok(li) => {
                let mut c = CheckResult::new("lambda-identity", li.residual, LAMBDA_RESIDUAL);
                c.interval = Some(li.interval);
                c.note = alloc::format!("c = {:.6e}, sign {:+}", li.c_hat, li.sign as i32);
                rep.checks.push(c);
            }
            Err(AnalysisError::NoValidInterval) => {
                let mut c = CheckResult::new("lambda-identity", 0.0, LAMBDA_RESIDUAL);
                c.note = String::from("no interval with |u'| > 1e-3");
                rep.checks.push(c);
            }
            Err(_) => {}
        }
    }
    if set.upp_bound {
        // Excess over the analytic bound; anything <= 0 satisfies it.
        let excess = upp_bound_excess(p, traj);
        rep.checks
            .push(CheckResult::new("u''-bound", libm::fmax(excess, 0.0), 1e-9));
    }
    if set.f_monotone {
        rep.checks.push(CheckResult::new(
            "f-monotone",
            f_monotone_violation(traj),
            1e-12,
        ));
    }
    if set.asymptote {
        let (fwd, bwd) = ends_asymptotes(p, traj, tolerances::LOCK_EPS, tolerances::LOCK_WINDOW);
        rep.asymptote_forward = fwd;
        rep.asymptote_backward = bwd;
    }
    if set.closure {
        rep.closure = check_closed(p, traj, 1e-6);
        if rep.closure.is_some() {
            if let Ok((lhs, rhs_v)) = gauss_bonnet_check(p, traj, 1e-6) {
                rep.checks.push(CheckResult::new(
                    "gauss-bonnet",
                    libm::fabs(lhs - rhs_v),
                    GAUSS_BONNET_AGREE,
                ));
            }
        }
    }
    rep
}
