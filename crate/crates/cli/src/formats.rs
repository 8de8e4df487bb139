//! On-disk formats: trajectory CSV, OBJ exports and the text report.

use std::fmt::Write as _;

use revsol_core::analysis::VerificationReport;
use revsol_core::soliton::{Termination, Trajectory};
use revsol_core::surface::Profile;
use revsol_core::vec3::Vec3;

/// Floating-point serialization used in all text outputs: 17 significant
/// digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TRAJECTORY_HEADER: &str = "s,u,v,up,vp,x,y,z,kappa,lambda,f,theta";

/// Render trajectory.csv, one row per retained sample.
pub fn trajectory_csv(traj: &Trajectory, every: usize) -> String {
    let every = every.max(1);
    let mut out = String::with_capacity(traj.len() * 220 / every + 64);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    let last = traj.len().saturating_sub(1);
    for i in 0..traj.len() {
        // Keep endpoints regardless of the stride.
        if i % every != 0 && i != last {
            continue;
        }
        let st = &traj.samples[i];
        let e = traj.embedded[i];
        let row = [
            st.s, st.u, st.v, st.up, st.vp, e.x, e.y, e.z, traj.kappa[i], traj.lambda[i],
            traj.f[i], traj.theta[i],
        ];
        let mut first = true;
        for x in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&fmt_f64(x));
        }
        out.push('\n');
    }
    out
}

/// OBJ polyline (`v`/`l` records) of the embedded trajectory.
pub fn curve_obj(traj: &Trajectory, every: usize) -> String {
    let every = every.max(1);
    let mut out = String::new();
    out.push_str("o soliton_curve\n");
    let mut count = 0usize;
    let last = traj.len().saturating_sub(1);
    for (i, p) in traj.embedded.iter().enumerate() {
        if i % every != 0 && i != last {
            continue;
        }
        let _ = writeln!(out, "v {} {} {}", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z));
        count += 1;
    }
    out.push('l');
    for i in 1..=count {
        let _ = write!(out, " {i}");
    }
    out.push('\n');
    out
}

/// OBJ polyline of a discrete evolving curve, tagged with its flow time.
pub fn polycurve_obj(p: &Profile, c: &revsol_core::evolver::PolyCurve) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# t = {}", fmt_f64(c.t));
    out.push_str("o evolved_curve\n");
    let pts = c.embed(p);
    for q in &pts {
        let _ = writeln!(out, "v {} {} {}", fmt_f64(q.x), fmt_f64(q.y), fmt_f64(q.z));
    }
    out.push('l');
    for i in 1..=pts.len() {
        let _ = write!(out, " {i}");
    }
    if c.closed && !pts.is_empty() {
        let _ = write!(out, " 1");
    }
    out.push('\n');
    out
}

/// OBJ quad mesh of the surface over a `(u, v)` grid. The `u` range covers
/// the trajectory with a margin (or one period when the profile closes).
pub fn surface_obj(p: &Profile, traj: &Trajectory, nu: usize, nv: usize) -> String {
    let (u_lo, u_hi) = match p.u_period {
        Some(period) => (0.0, period),
        None => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for st in &traj.samples {
                lo = lo.min(st.u);
                hi = hi.max(st.u);
            }
            let pad = 0.25 * (hi - lo).max(0.5);
            (
                (lo - pad).max(p.domain.lo + 1e-6),
                (hi + pad).min(p.domain.hi - 1e-6),
            )
        }
    };
    let wrap_u = p.u_period.is_some();
    let nu_pts = if wrap_u { nu } else { nu + 1 };
    let two_pi = 2.0 * std::f64::consts::PI;

    let mut out = String::new();
    out.push_str("o revolution_surface\n");
    for i in 0..nu_pts {
        let u = u_lo + (u_hi - u_lo) * i as f64 / nu as f64;
        for j in 0..nv {
            let v = two_pi * j as f64 / nv as f64;
            let pt = p.embed(u, v).unwrap_or(Vec3::new(0.0, 0.0, 0.0));
            let _ = writeln!(out, "v {} {} {}", fmt_f64(pt.x), fmt_f64(pt.y), fmt_f64(pt.z));
        }
    }
    let idx = |i: usize, j: usize| -> usize { (i % nu_pts) * nv + (j % nv) + 1 };
    for i in 0..nu {
        if !wrap_u && i + 1 >= nu_pts {
            break;
        }
        for j in 0..nv {
            let _ = writeln!(
                out,
                "f {} {} {} {}",
                idx(i, j),
                idx(i + 1, j),
                idx(i + 1, j + 1),
                idx(i, j + 1)
            );
        }
    }
    out
}

fn term_line(t: &Termination) -> String {
    match t {
        Termination::AsymptoteLock { u_star } => {
            format!("asymptote-lock (u* = {})", fmt_f64(*u_star))
        }
        other => other.label().to_string(),
    }
}

/// Human-readable run report.
pub fn report_text(
    run_name: &str,
    profile_name: &str,
    a: f64,
    raw_initial: (f64, f64, f64, f64),
    traj: &Trajectory,
    report: &VerificationReport,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "run: {run_name}");
    let _ = writeln!(out, "profile: {profile_name}");
    let _ = writeln!(out, "a: {}", fmt_f64(a));
    let (u0, v0, up0, vp0) = raw_initial;
    let _ = writeln!(
        out,
        "initial (raw): u0 = {}, v0 = {}, up0 = {}, vp0 = {}",
        fmt_f64(u0),
        fmt_f64(v0),
        fmt_f64(up0),
        fmt_f64(vp0)
    );
    let st0 = &traj.samples[traj.idx_s0()];
    let _ = writeln!(
        out,
        "initial (normalized): up0 = {}, vp0 = {}",
        fmt_f64(st0.up),
        fmt_f64(st0.vp)
    );
    let _ = writeln!(out, "samples: {}", traj.len());
    let _ = writeln!(
        out,
        "steps: accepted {}, rejected {}, h in [{:.3e}, {:.3e}]",
        traj.stats.accepted, traj.stats.rejected, traj.stats.min_h, traj.stats.max_h
    );
    let _ = writeln!(out, "termination forward: {}", term_line(&traj.forward_term));
    if let Some(b) = &traj.backward_term {
        let _ = writeln!(out, "termination backward: {}", term_line(b));
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "{:<22} {:>13} {:>11} {:>8}",
        "check", "residual", "tolerance", "verdict"
    );
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{:<22} {:>13.4e} {:>11.1e} {:>8}{}",
            c.name,
            c.residual,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" },
            if c.note.is_empty() {
                String::new()
            } else {
                format!("   ({})", c.note)
            }
        );
    }
    out.push('\n');
    match report.asymptote_forward {
        Some(u) => {
            let _ = writeln!(out, "asymptote forward: u* = {}", fmt_f64(u));
        }
        None => {
            let _ = writeln!(out, "asymptote forward: none");
        }
    }
    match report.asymptote_backward {
        Some(u) => {
            let _ = writeln!(out, "asymptote backward: u* = {}", fmt_f64(u));
        }
        None => {
            let _ = writeln!(out, "asymptote backward: none");
        }
    }
    match &report.closure {
        Some(c) => {
            let _ = writeln!(
                out,
                "closure: period = {}, parallel = {}, gap = {:.3e}",
                fmt_f64(c.period),
                c.is_parallel,
                c.gap
            );
        }
        None => {
            let _ = writeln!(out, "closure: none");
        }
    }
    out
}
