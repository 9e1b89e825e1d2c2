//! Run configuration: a JSON document whose canonical (sorted-key) form is
//! hashed to key the output cache. The hash covers everything that affects
//! the computed numbers — subcommand, phase, seed, and the subcommand's
//! parameter block — and nothing that does not (output directory, thread
//! count).

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Top-level config schema shared by every subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the invoked subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcommand: Option<String>,
    /// Phase literal: a list of `[alpha, beta, coeff_num, coeff_den]`
    /// quadruples, e.g. `[[2,2,1,1]]` for x^2 y^2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Vec<[i64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Subcommand-specific parameters; validated by the dispatched command.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config does not match the schema: {e}")))
    }

    /// Canonical serialization: `serde_json::Value` maps are ordered, so
    /// converting through `Value` sorts every object's keys.
    pub fn canonical(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        v.to_string()
    }

    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical().as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(16);
        for b in &digest[..8] {
            hex.push_str(&format!("{b:02x}"));
        }
        hex
    }

    /// The phase literal both as a `Phase` and as its canonical JSON string
    /// (used for cross-run identity in manifests).
    pub fn phase(&self) -> Result<(osclab_core::phase::Phase, String), CliError> {
        let quads = self
            .phase
            .as_ref()
            .ok_or_else(|| CliError::Validation("this subcommand needs a \"phase\" literal".into()))?;
        let literal = serde_json::to_value(quads).expect("quadruples serialize").to_string();
        let phase = osclab_core::phase::Phase::from_quadruples(quads, &literal)?;
        Ok((phase, literal))
    }

    /// Decode `params` into the subcommand's typed parameter struct.
    pub fn params<T: serde::de::DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_value(self.params.clone())
            .map_err(|e| CliError::Validation(format!("params do not match the schema: {e}")))
    }
}

/// Cutoff parameters shared by several subcommands.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpParams {
    pub rho: f64,
    pub rho0: f64,
}

impl BumpParams {
    pub fn build(&self) -> Result<osclab_core::bump::BumpSpec, CliError> {
        Ok(osclab_core::bump::BumpSpec::new(self.rho, self.rho0)?)
    }
}

/// Log-spaced grid description.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGridParams {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl LogGridParams {
    pub fn build(&self) -> Result<Vec<f64>, CliError> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min > 0.0 && self.max > self.min)
        {
            return Err(CliError::Validation(format!(
                "log grid needs 0 < min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.count < 2 {
            return Err(CliError::Validation(format!(
                "log grid needs >= 2 points, got {}",
                self.count
            )));
        }
        let (a, b, n) = (self.min, self.max, self.count);
        Ok((0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateParams {
    /// "t" (oscillatory), "u" (undamped, mu = 0) or "r" (damped).
    pub kind: String,
    pub lambda: f64,
    #[serde(default)]
    pub mu1: f64,
    #[serde(default)]
    pub mu2: f64,
    pub bump: BumpParams,
    pub tol: f64,
    #[serde(default)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    pub bump: BumpParams,
    pub lambda: LogGridParams,
    pub tol: f64,
    #[serde(default)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SublevelParams {
    /// Monomial exponents of x^a y^b on the unit square.
    pub a: u32,
    pub b: u32,
    /// "det" (adaptive bracket) or "mc" (stratified Monte Carlo).
    pub method: String,
    pub thresholds: Vec<f64>,
    pub budget: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearParams {
    pub sign: i8,
    /// Terms of psi(x) as [exp_num, exp_den, coeff].
    pub psi: Vec<(i64, i64, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeParams {
    pub x_max: f64,
    pub h_upper: f64,
    pub m_num: i64,
    pub m_den: i64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionParams {
    #[serde(default)]
    pub shear: Option<ShearParams>,
    pub wedge: WedgeParams,
    pub alpha_num: i64,
    pub alpha_den: i64,
    pub beta: u32,
    pub l_max: u32,
    pub m_max: u32,
    pub grid: usize,
    #[serde(default)]
    pub delta_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeParams {
    /// "dispersive", "heat" or "fractional".
    pub equation: String,
    pub n: usize,
    pub l: f64,
    pub datum: BumpParams,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportParams {
    /// Config hashes of previous runs under the same cache root.
    pub records: Vec<String>,
}
