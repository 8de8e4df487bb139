//! Profile definition files: named builtins with parameters, or tabulated
//! `(u, phi, psi)` rows interpolated by cubic splines.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use revsol_core::surface::Profile;

use crate::error::AppError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileFile {
    pub name: String,
    /// builtin | tabulated
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default)]
    pub unit_speed: bool,
    /// Sampled rows for `kind = "tabulated"`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<[f64; 3]>,
    /// Optional domain clip `[lo, hi]` applied after construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}

/// Load a profile file and produce a validated arc-length profile.
pub fn load(path: &Path) -> Result<Profile, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::usage(format!("cannot read profile file {path:?}: {e}")))?;
    let pf: ProfileFile = toml::from_str(&text)
        .map_err(|e| AppError::usage(format!("bad profile file {path:?}: {e}")))?;
    build(&pf)
}

pub fn build(pf: &ProfileFile) -> Result<Profile, AppError> {
    let mut p = match pf.kind.as_str() {
        "builtin" => {
            let which = pf.builtin.as_deref().unwrap_or("");
            match which {
                "torus" => Profile::torus(pf.big_r.unwrap_or(2.0), pf.r.unwrap_or(1.0)),
                "angular-torus" => {
                    Profile::angular_torus(pf.big_r.unwrap_or(2.0), pf.r.unwrap_or(1.0))
                }
                "plane" => Profile::plane(),
                "sphere" => Profile::sphere(),
                "catenoid" => Profile::catenoid(),
                "catenoid-original" => Profile::catenoid_original(),
                other => {
                    return Err(AppError::usage(format!(
                        "builtin: unknown builtin profile {other:?}"
                    )))
                }
            }
        }
        "tabulated" => {
            let rows: Vec<(f64, f64, f64)> =
                pf.rows.iter().map(|r| (r[0], r[1], r[2])).collect();
            let mut p = Profile::tabulated(&pf.name, &rows)
                .map_err(|e| AppError::usage(format!("rows: {e}")))?;
            p.unit_speed = pf.unit_speed;
            p
        }
        other => {
            return Err(AppError::usage(format!(
                "kind: unknown profile kind {other:?} (builtin|tabulated)"
            )))
        }
    };
    if let Some([lo, hi]) = pf.domain {
        if !(hi > lo) {
            return Err(AppError::usage("domain: need lo < hi".into()));
        }
        p.domain = revsol_core::surface::Interval::new(lo, hi);
    }
    p.validate(64)
        .map_err(|e| AppError::usage(format!("profile validation: {e}")))?;
    if !p.unit_speed {
        p = p
            .arclength_reparametrize(1e-9)
            .map_err(|e| AppError::usage(format!("reparametrization: {e}")))?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_profile_is_reparametrized() {
        // Sample the angular (speed r = 0.5) torus; the loader must deliver
        // a unit-speed profile of the same surface.
        let src = Profile::angular_torus(2.0, 0.5);
        let rows: Vec<[f64; 3]> = (0..=600)
            .map(|i| {
                let u = -0.3 + 7.0 * i as f64 / 600.0;
                [u, src.phi(u), src.psi(u)]
            })
            .collect();
        let pf = ProfileFile {
            name: "sampled".into(),
            kind: "tabulated".into(),
            builtin: None,
            big_r: None,
            r: None,
            unit_speed: false,
            rows,
            domain: None,
        };
        let p = build(&pf).unwrap();
        assert!(p.unit_speed);
        for i in 0..30 {
            let t = 0.1 + 2.0 * i as f64 / 29.0;
            let g = p.speed(t);
            assert!((g * g - 1.0).abs() < 1e-7, "speed^2 at {t}: {}", g * g);
            // Same surface: phi at arc length t matches the constant-speed
            // closed form R + r cos(t / r).
            let expect = 2.0 + 0.5 * (t / 0.5).cos();
            assert!((p.phi(t) - expect).abs() < 1e-5, "phi({t}) = {}", p.phi(t));
        }
    }

    #[test]
    fn rejects_unknown_kind() {
        let pf = ProfileFile {
            name: "x".into(),
            kind: "implicit".into(),
            builtin: None,
            big_r: None,
            r: None,
            unit_speed: false,
            rows: vec![],
            domain: None,
        };
        assert!(build(&pf).is_err());
    }
}
