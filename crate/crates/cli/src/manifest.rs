//! Run manifests: the on-disk description of one integration run, with
//! canonical serialization and content hashing for reproducibility.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use revsol_core::soliton::{
    EventConfig, IntegratorConfig, LockConfig, Method, SolitonState,
};
use revsol_core::surface::Profile;

use crate::error::AppError;
use crate::profile_file;

pub const MANIFEST_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub version: u32,
    pub profile: ProfileSpec,
    pub soliton: SolitonSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub checks: ChecksSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProfileSpec {
    /// torus | plane | sphere | catenoid | file
    pub kind: String,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    /// Profile definition file for `kind = "file"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SolitonSpec {
    pub a: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InitialSpec {
    pub u0: f64,
    pub v0: f64,
    pub up0: f64,
    pub vp0: f64,
    /// Interpret `u0`/`up0` in the profile's original parameter (catenoid
    /// gallery figures give tangents in the `(cosh u, u)` parametrization).
    #[serde(default)]
    pub original_parameter: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IntegratorSpec {
    /// rkf45 | rk4
    pub method: String,
    #[serde(default = "default_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_tol")]
    pub rel_tol: f64,
    /// Fixed step for rk4.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    pub s_max: f64,
    #[serde(default = "default_true")]
    pub bidirectional: bool,
    #[serde(default)]
    pub renormalize: bool,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lock: Option<LockSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_true() -> bool {
    true
}
fn default_h_max() -> f64 {
    5.0
}
fn default_max_steps() -> usize {
    2_000_000
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        IntegratorSpec {
            method: "rkf45".into(),
            abs_tol: default_tol(),
            rel_tol: default_tol(),
            h: None,
            s_max: 100.0,
            bidirectional: true,
            renormalize: false,
            h_max: default_h_max(),
            max_steps: default_max_steps(),
            lock: None,
            window: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct LockSpec {
    pub eps: f64,
    pub window: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct WindowSpec {
    pub u_min: f64,
    pub u_max: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ChecksSpec {
    #[serde(default = "default_true")]
    pub unit_speed: bool,
    #[serde(default = "default_true")]
    pub kappa_consistency: bool,
    #[serde(default = "default_true")]
    pub clairaut: bool,
    #[serde(default = "default_true")]
    pub lambda_identity: bool,
    #[serde(default = "default_true")]
    pub upp_bound: bool,
    #[serde(default = "default_true")]
    pub f_monotone: bool,
    #[serde(default = "default_true")]
    pub asymptote: bool,
    #[serde(default)]
    pub closure: bool,
    /// Sweep a grid of initial conditions looking for constant non-zero
    /// curvature (a numerical probe, not a proof).
    #[serde(default)]
    pub probe: bool,
}

impl Default for ChecksSpec {
    fn default() -> Self {
        ChecksSpec {
            unit_speed: true,
            kappa_consistency: true,
            clairaut: true,
            lambda_identity: true,
            upp_bound: true,
            f_monotone: true,
            asymptote: true,
            closure: false,
            probe: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: String,
    /// Write every n-th sample to trajectory.csv.
    #[serde(default = "default_every")]
    pub csv_every: usize,
    #[serde(default)]
    pub obj_curve: bool,
    #[serde(default)]
    pub obj_surface: bool,
    #[serde(default = "default_nu")]
    pub surface_nu: usize,
    #[serde(default = "default_nv")]
    pub surface_nv: usize,
}

fn default_every() -> usize {
    1
}
fn default_nu() -> usize {
    64
}
fn default_nv() -> usize {
    128
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: String::new(),
            csv_every: 1,
            obj_curve: false,
            obj_surface: false,
            surface_nu: default_nu(),
            surface_nv: default_nv(),
        }
    }
}

impl RunManifest {
    pub fn from_path(path: &Path) -> Result<RunManifest, AppError> {
        let text = fs::read_to_string(path)
            .map_err(|e| AppError::usage(format!("cannot read manifest {path:?}: {e}")))?;
        let m: RunManifest = toml::from_str(&text)
            .map_err(|e| AppError::usage(format!("bad manifest {path:?}: {e}")))?;
        if m.version != MANIFEST_VERSION {
            return Err(AppError::usage(format!(
                "version: expected {MANIFEST_VERSION}, got {}",
                m.version
            )));
        }
        Ok(m)
    }

    /// Canonical serialization; the content hash is taken over these bytes.
    pub fn canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn content_hash(&self) -> String {
        sha256_hex(self.canonical_toml().as_bytes())
    }

    /// Build the runtime profile; reparametrizes non-unit-speed inputs.
    pub fn build_profile(&self) -> Result<Profile, AppError> {
        let spec = &self.profile;
        let p = match spec.kind.as_str() {
            "torus" => {
                let big_r = spec.big_r.unwrap_or(2.0);
                let r = spec.r.unwrap_or(1.0);
                if !(r > 0.0 && big_r > r) {
                    return Err(AppError::usage(format!(
                        "profile.R/profile.r: need 0 < r < R, got R = {big_r}, r = {r}"
                    )));
                }
                Profile::torus(big_r, r)
            }
            "plane" => Profile::plane(),
            "sphere" => Profile::sphere(),
            "catenoid" => Profile::catenoid(),
            "file" => {
                let rel = spec.path.as_ref().ok_or_else(|| {
                    AppError::usage("profile.path: required for kind = \"file\"".into())
                })?;
                return profile_file::load(Path::new(rel));
            }
            other => {
                return Err(AppError::usage(format!(
                    "profile.kind: unknown kind {other:?} (torus|plane|sphere|catenoid|file)"
                )))
            }
        };
        Ok(p)
    }

    /// Normalized initial state on the arc-length profile, plus the raw
    /// tangent actually used (after any original-parameter conversion).
    pub fn build_initial(&self, p: &Profile) -> Result<(SolitonState, (f64, f64, f64)), AppError> {
        let i = &self.initial;
        let (u0, up_raw) = if i.original_parameter {
            if self.profile.kind != "catenoid" {
                return Err(AppError::usage(
                    "initial.original_parameter: only supported for the catenoid profile".into(),
                ));
            }
            // t = sinh(u); tangents transform by dt/ds = cosh(u) du/ds.
            (i.u0.sinh(), i.u0.cosh() * i.up0)
        } else {
            (i.u0, i.up0)
        };
        p.check_chart(u0)
            .map_err(|e| AppError::usage(format!("initial.u0: {e}")))?;
        let st = revsol_core::soliton::normalize_initial(p, u0, i.v0, up_raw, i.vp0)
            .map_err(|e| AppError::usage(format!("initial tangent: {e}")))?;
        Ok((st, (u0, up_raw, i.vp0)))
    }

    pub fn build_integrator(&self) -> Result<IntegratorConfig, AppError> {
        let g = &self.integrator;
        let method = match g.method.as_str() {
            "rkf45" => {
                if !(g.abs_tol > 0.0) || !(g.rel_tol >= 0.0) {
                    return Err(AppError::usage(
                        "integrator.abs_tol/rel_tol: must be positive".into(),
                    ));
                }
                Method::Rkf45 {
                    abs_tol: g.abs_tol,
                    rel_tol: g.rel_tol,
                }
            }
            "rk4" => {
                let h = g.h.ok_or_else(|| {
                    AppError::usage("integrator.h: required for method = \"rk4\"".into())
                })?;
                if !(h > 0.0) {
                    return Err(AppError::usage("integrator.h: must be positive".into()));
                }
                Method::Rk4 { h }
            }
            other => {
                return Err(AppError::usage(format!(
                    "integrator.method: unknown method {other:?} (rkf45|rk4)"
                )))
            }
        };
        if !(g.s_max > 0.0) {
            return Err(AppError::usage("integrator.s_max: must be positive".into()));
        }
        if !(g.h_max > 0.0) {
            return Err(AppError::usage("integrator.h_max: must be positive".into()));
        }
        Ok(IntegratorConfig {
            method,
            s_max: g.s_max,
            bidirectional: g.bidirectional,
            renormalize: g.renormalize,
            events: EventConfig {
                asymptote_lock: g.lock.map(|l| LockConfig {
                    eps: l.eps,
                    window: l.window,
                }),
                u_window: g.window.map(|w| (w.u_min, w.u_max)),
            },
            h_max: g.h_max,
            max_steps: g.max_steps,
        })
    }

    pub fn check_set(&self) -> revsol_core::analysis::CheckSet {
        let c = &self.checks;
        revsol_core::analysis::CheckSet {
            unit_speed: c.unit_speed,
            kappa_consistency: c.kappa_consistency,
            clairaut: c.clairaut,
            lambda_identity: c.lambda_identity,
            upp_bound: c.upp_bound,
            f_monotone: c.f_monotone,
            asymptote: c.asymptote,
            closure: c.closure,
        }
    }
}

/// Echo of the manifest written into the run directory, extended with
/// provenance (tool version, content hash, output hashes) and the
/// machine-readable verification summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEcho {
    #[serde(flatten)]
    pub manifest: RunManifest,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSummary>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    pub manifest_sha256: String,
    #[serde(default)]
    pub outputs: Vec<OutputRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptote_forward_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymptote_backward_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_period: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunManifest {
        RunManifest {
            version: 1,
            profile: ProfileSpec {
                kind: "torus".into(),
                big_r: Some(2.0),
                r: Some(1.0),
                path: None,
            },
            soliton: SolitonSpec { a: 0.5 },
            initial: InitialSpec {
                u0: 0.7853981633974483,
                v0: 0.7853981633974483,
                up0: 0.0,
                vp0: 1.0,
                original_parameter: false,
            },
            integrator: IntegratorSpec {
                s_max: 40.0,
                ..IntegratorSpec::default()
            },
            checks: ChecksSpec::default(),
            output: OutputSpec::default(),
        }
    }

    #[test]
    fn canonical_toml_round_trips_bit_identically() {
        let m = sample();
        let text = m.canonical_toml();
        let back: RunManifest = toml::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.canonical_toml(), text);
        assert_eq!(back.content_hash(), m.content_hash());
    }

    #[test]
    fn hash_tracks_content() {
        let m = sample();
        let mut m2 = m.clone();
        m2.soliton.a = 0.25;
        assert_ne!(m.content_hash(), m2.content_hash());
    }

    #[test]
    fn validation_names_the_field() {
        let mut m = sample();
        m.initial.u0 = f64::NAN;
        let p = m.build_profile().unwrap();
        let err = m.build_initial(&p).unwrap_err();
        assert!(format!("{err}").contains("initial.u0"));

        let mut m = sample();
        m.integrator.s_max = 0.0;
        let err = m.build_integrator().unwrap_err();
        assert!(format!("{err}").contains("s_max"));

        let mut m = sample();
        m.profile.kind = "hyperboloid".into();
        let err = m.build_profile().unwrap_err();
        assert!(format!("{err}").contains("profile.kind"));

        let mut m = sample();
        m.integrator.method = "rk4".into();
        let err = m.build_integrator().unwrap_err();
        assert!(format!("{err}").contains("integrator.h"));
        m.integrator.h = Some(1e-3);
        assert!(m.build_integrator().is_ok());
    }

    #[test]
    fn echo_round_trips_with_provenance() {
        let m = sample();
        let echo = ManifestEcho {
            provenance: Provenance {
                tool: "revsol".into(),
                tool_version: TOOL_VERSION.into(),
                manifest_sha256: m.content_hash(),
                outputs: vec![OutputRecord {
                    path: "trajectory.csv".into(),
                    sha256: "0".repeat(64),
                }],
            },
            verification: None,
            manifest: m.clone(),
        };
        let text = toml::to_string_pretty(&echo).unwrap();
        let back: ManifestEcho = toml::from_str(&text).unwrap();
        assert_eq!(back.manifest, m);
        assert_eq!(back.provenance.manifest_sha256, m.content_hash());
    }
}
