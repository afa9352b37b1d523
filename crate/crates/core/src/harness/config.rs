use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{MeshFamily, MeshSpec};
use crate::solver::{ProblemKind, Scheme};

pub const DEFAULT_EPS: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];
pub const DEFAULT_N: [usize; 5] = [64, 128, 256, 512, 1024];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// `e_N ~ C N^-r`.
    PlainPower,
    /// `e_N ~ C (N^-1 ln N)^r`.
    LogFactor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorNorm {
    /// Nodal maximum error.
    Max,
    /// `sqrt(D |e|_1^2 + ||e||_0^2)` with `D` the diffusion coefficient.
    Energy,
}

impl std::str::FromStr for ErrorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "max" => Ok(ErrorNorm::Max),
            "energy" => Ok(ErrorNorm::Energy),
            _ => Err(Error::param("norm", format!("unknown norm `{s}`, expected max or energy"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub gamma: f64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self { kind: ProblemKind::ConvectionDiffusion, gamma: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<String>,
    pub json: Option<String>,
}

/// A sweep over mesh templates, schemes, eps and N. The `eps`, `N` and
/// `gamma` fields of each template are overwritten per grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub problem: ProblemSpec,
    pub eps: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    pub meshes: Vec<MeshSpec>,
    pub schemes: Vec<Scheme>,
    pub norms: Vec<ErrorNorm>,
    /// Overrides the per-family default when set.
    pub rate_model: Option<RateModel>,
    pub output: OutputPaths,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::default(),
            eps: DEFAULT_EPS.to_vec(),
            n: DEFAULT_N.to_vec(),
            meshes: vec![MeshSpec::new(MeshFamily::Shishkin, 1e-4, 64)],
            schemes: vec![Scheme::Upwind],
            norms: vec![ErrorNorm::Max],
            rate_model: None,
            output: OutputPaths::default(),
        }
    }
}

impl StudyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("study config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(Error::Config(format!("study config: `{what}` is empty")));
        if self.eps.is_empty() {
            return empty("eps");
        }
        if self.n.is_empty() {
            return empty("N");
        }
        if self.meshes.is_empty() {
            return empty("meshes");
        }
        if self.schemes.is_empty() {
            return empty("schemes");
        }
        if self.norms.is_empty() {
            return empty("norms");
        }
        for (i, a) in self.eps.iter().enumerate() {
            if !(*a > 0.0 && *a <= 1.0) {
                return Err(Error::param("eps", format!("must lie in (0, 1], got {a}")));
            }
            if self.eps[..i].contains(a) {
                return Err(Error::Config(format!("study config: eps value {a} repeated")));
            }
        }
        for (i, n) in self.n.iter().enumerate() {
            if *n < 2 {
                return Err(Error::param("N", format!("must be at least 2, got {n}")));
            }
            if self.n[..i].contains(n) {
                return Err(Error::Config(format!("study config: N value {n} repeated")));
            }
        }
        if !(self.problem.gamma > 0.0 && self.problem.gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must be positive, got {}", self.problem.gamma)));
        }
        Ok(())
    }
}
