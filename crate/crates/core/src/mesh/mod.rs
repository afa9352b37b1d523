//! Layer-adapted mesh families on [0, 1].
//!
//! Every generator returns a [`Mesh1D`]; the layer is at `x = 0` unless a
//! [`LayerSide`] says otherwise. [`generate`] dispatches a [`MeshSpec`] to the
//! matching constructor.

mod bakhvalov;
mod equidistribution;
pub mod io;
mod mirror;
mod recursive;
mod shishkin;
mod sidorov;
mod transition;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bakhvalov::{
    bakhvalov_original, bakhvalov_type, lambert, lambert_node, BakhvalovFunction,
    BakhvalovOriginal,
};
pub use equidistribution::{
    equidistribute_analytic, ConstantMonitor, FnMonitor, LinssMonitor, MonitorFn,
    PiecewiseConstantMonitor,
};
pub use mirror::{compose_both, mirror_mesh};
pub use recursive::{duran_lombardi, gartland, GartlandVariant};
pub use shishkin::{psi_max_derivative, shishkin, stype, stype_with, Psi};
pub use sidorov::{emelyanov_composite, sidorov, sidorov_functional, EmelyanovMesh, SidorovMesh};
pub use transition::{transition_delta_veldhuizen, transition_sigma_bakhvalov, transition_sigma_shishkin};

/// A strictly increasing node vector with `x_0 = 0` and `x_N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    /// Validates and wraps `nodes`.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidMesh(format!(
                "need at least 2 cells, got {}",
                nodes.len().saturating_sub(1)
            )));
        }
        if let Some(i) = nodes.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMesh(format!("node {i} is not finite")));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidMesh(format!(
                "endpoints must be 0 and 1, got {} and {}",
                nodes[0],
                nodes.last().unwrap()
            )));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidMesh(format!(
                "nodes not strictly increasing at cell {}: {} -> {}",
                i + 1,
                nodes[i],
                nodes[i + 1]
            )));
        }
        Ok(Self { nodes })
    }

    /// Overwrites the endpoints with exactly 0 and 1, then validates.
    pub fn pinned(mut nodes: Vec<f64>) -> Result<Self> {
        if let Some(first) = nodes.first_mut() {
            *first = 0.0;
        }
        if let Some(last) = nodes.last_mut() {
            *last = 1.0;
        }
        Self::new(nodes)
    }

    pub fn uniform(cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::param("N", format!("uniform mesh needs N >= 2, got {cells}")));
        }
        let nodes = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        Self::pinned(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of subintervals N.
    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `h_i = x_i - x_{i-1}` for `i = 1..=N`.
    pub fn step(&self, i: usize) -> f64 {
        self.nodes[i] - self.nodes[i - 1]
    }

    /// All steps; entry `k` holds `h_{k+1}`.
    pub fn steps(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn min_step(&self) -> f64 {
        self.steps().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_step(&self) -> f64 {
        self.steps().into_iter().fold(0.0, f64::max)
    }

    /// Halves every cell.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(1.0);
        Self { nodes }
    }

    pub fn into_nodes(self) -> Vec<f64> {
        self.nodes
    }
}

impl TryFrom<Vec<f64>> for Mesh1D {
    type Error = Error;

    fn try_from(nodes: Vec<f64>) -> Result<Self> {
        Self::new(nodes)
    }
}

impl From<Mesh1D> for Vec<f64> {
    fn from(m: Mesh1D) -> Self {
        m.nodes
    }
}

/// Which end(s) of [0, 1] carry the layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerSide {
    #[default]
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFamily {
    #[default]
    Uniform,
    Shishkin,
    #[serde(rename = "s-type")]
    SType,
    BakhvalovOriginal,
    BakhvalovType,
    Gartland,
    GartlandType,
    DuranLombardi,
    Lambert,
    Sidorov,
    EmelyanovComposite,
    Equidistributed,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 12] = [
        MeshFamily::Uniform,
        MeshFamily::Shishkin,
        MeshFamily::SType,
        MeshFamily::BakhvalovOriginal,
        MeshFamily::BakhvalovType,
        MeshFamily::Gartland,
        MeshFamily::GartlandType,
        MeshFamily::DuranLombardi,
        MeshFamily::Lambert,
        MeshFamily::Sidorov,
        MeshFamily::EmelyanovComposite,
        MeshFamily::Equidistributed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Uniform => "uniform",
            MeshFamily::Shishkin => "shishkin",
            MeshFamily::SType => "s-type",
            MeshFamily::BakhvalovOriginal => "bakhvalov-original",
            MeshFamily::BakhvalovType => "bakhvalov-type",
            MeshFamily::Gartland => "gartland",
            MeshFamily::GartlandType => "gartland-type",
            MeshFamily::DuranLombardi => "duran-lombardi",
            MeshFamily::Lambert => "lambert",
            MeshFamily::Sidorov => "sidorov",
            MeshFamily::EmelyanovComposite => "emelyanov-composite",
            MeshFamily::Equidistributed => "equidistributed",
        }
    }

    /// Families whose construction splits the cells N/2 + N/2.
    pub fn is_split(self) -> bool {
        matches!(
            self,
            MeshFamily::Shishkin
                | MeshFamily::SType
                | MeshFamily::BakhvalovType
                | MeshFamily::EmelyanovComposite
        )
    }

    /// Families whose cell count follows from `H` rather than `N`.
    pub fn is_recursive(self) -> bool {
        matches!(
            self,
            MeshFamily::Gartland | MeshFamily::GartlandType | MeshFamily::DuranLombardi
        )
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        MeshFamily::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .or(match key.as_str() {
                "stype" => Some(MeshFamily::SType),
                "bakhvalov" => Some(MeshFamily::BakhvalovOriginal),
                "dl" => Some(MeshFamily::DuranLombardi),
                "emelyanov" => Some(MeshFamily::EmelyanovComposite),
                _ => None,
            })
            .ok_or_else(|| Error::param("family", format!("unknown mesh family `{s}`")))
    }
}

/// Parameters of one mesh family. Fields a family does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    pub family: MeshFamily,
    pub eps: f64,
    pub gamma: f64,
    pub mu: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub q: f64,
    /// Coarse step target of the recursive families; `1/N` when absent.
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub coarse_step: Option<f64>,
    pub kappa: f64,
    pub theta: f64,
    pub psi: Psi,
    pub layer_side: LayerSide,
    /// Scale of the Linß monitor used by the `Equidistributed` family.
    pub k_tilde: f64,
    /// End steps `(A, B)` of the Sidorov family; `(1/N, 1/N)` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sidorov_ends: Option<[f64; 2]>,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            family: MeshFamily::Uniform,
            eps: 1e-4,
            gamma: 1.0,
            mu: 2.0,
            n: 64,
            q: 0.5,
            coarse_step: None,
            kappa: 1.0,
            theta: 1.0,
            psi: Psi::Shishkin,
            layer_side: LayerSide::Left,
            k_tilde: 1.0,
            sidorov_ends: None,
        }
    }
}

impl MeshSpec {
    pub fn new(family: MeshFamily, eps: f64, n: usize) -> Self {
        Self { family, eps, n, ..Self::default() }
    }

    /// Spec from a family name; `bakhvalov-shishkin` (alias `bs`) selects the
    /// S-type family with the Bakhvalov–Shishkin characterizing function.
    pub fn from_name(name: &str) -> Result<Self> {
        let key = name.trim().to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "bakhvalov-shishkin" | "bs" => {
                Ok(Self { family: MeshFamily::SType, psi: Psi::BakhvalovShishkin, ..Self::default() })
            }
            _ => Ok(Self { family: key.parse()?, ..Self::default() }),
        }
    }

    /// Short name used in reports.
    pub fn label(&self) -> String {
        let base = match (self.family, self.psi) {
            (MeshFamily::SType, Psi::BakhvalovShishkin) => "bakhvalov-shishkin".to_string(),
            (MeshFamily::SType, Psi::Shishkin) => "s-type-shishkin".to_string(),
            (f, _) => f.name().to_string(),
        };
        match self.layer_side {
            LayerSide::Left => base,
            LayerSide::Right => format!("{base}-right"),
            LayerSide::Both => format!("{base}-both"),
        }
    }

    pub fn h(&self) -> f64 {
        self.coarse_step.unwrap_or(1.0 / self.n.max(1) as f64)
    }

    /// Checks the family-independent and family-specific constraints.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::param("eps", format!("must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::param("mu", format!("must be positive, got {}", self.mu)));
        }
        if !self.family.is_recursive() && self.n < 2 {
            return Err(Error::param("N", format!("must be at least 2, got {}", self.n)));
        }
        let halves = if self.layer_side == LayerSide::Both { 2 } else { 1 };
        if self.family.is_split() && (self.n % (2 * halves) != 0 || self.n < 4 * halves) {
            return Err(Error::param(
                "N",
                format!("{} needs N even and >= 4 per layer, got {}", self.family, self.n),
            ));
        }
        if self.layer_side == LayerSide::Both && self.n % 2 != 0 {
            return Err(Error::param("N", format!("two-layer meshes need even N, got {}", self.n)));
        }
        match self.family {
            MeshFamily::BakhvalovOriginal if !(self.q > 0.0 && self.q < 1.0) => {
                Err(Error::param("q", format!("must lie in (0, 1), got {}", self.q)))
            }
            MeshFamily::DuranLombardi if !(self.kappa > 0.0 && self.kappa * self.h() < 1.0) => {
                Err(Error::param(
                    "kappa",
                    format!("need kappa > 0 and kappa*H < 1, got kappa={} H={}", self.kappa, self.h()),
                ))
            }
            MeshFamily::SType if !(self.theta > 0.0) => {
                Err(Error::param("theta", format!("must be positive, got {}", self.theta)))
            }
            _ => Ok(()),
        }
    }
}

/// Why a generator returned the uniform mesh instead of its own construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    /// No tangency point `tau` in `(0, q)` exists (large eps).
    NoTangency,
    /// The transition point reached 1/2.
    TransitionClamped,
}

/// A generated mesh with the by-products of its construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedMesh {
    pub mesh: Mesh1D,
    pub fallback: Option<Fallback>,
    /// Tangency point of the original Bakhvalov construction.
    pub tau: Option<f64>,
    /// `max |h_i - h_{i-1}| * N^2` for the Sidorov-based families.
    pub smoothness: Option<f64>,
}

impl GeneratedMesh {
    pub fn plain(mesh: Mesh1D) -> Self {
        Self { mesh, fallback: None, tau: None, smoothness: None }
    }

    fn uniform_fallback(cells: usize, why: Fallback) -> Result<Self> {
        Ok(Self { fallback: Some(why), ..Self::plain(Mesh1D::uniform(cells)?) })
    }
}

/// Builds the mesh described by `spec`.
pub fn generate(spec: &MeshSpec) -> Result<GeneratedMesh> {
    spec.validate()?;
    match spec.layer_side {
        LayerSide::Left => generate_left(spec),
        LayerSide::Right => {
            let mut g = generate_left(spec)?;
            g.mesh = mirror_mesh(&g.mesh);
            Ok(g)
        }
        LayerSide::Both => {
            // A layer of width eps on [0, 1/2] is a layer of width 2 eps on [0, 1].
            let half = MeshSpec {
                eps: (2.0 * spec.eps).min(1.0),
                n: spec.n / 2,
                layer_side: LayerSide::Left,
                coarse_step: spec.coarse_step.map(|h| 2.0 * h),
                ..spec.clone()
            };
            let mut g = generate_left(&half)?;
            g.mesh = compose_both(&g.mesh);
            Ok(g)
        }
    }
}

fn generate_left(spec: &MeshSpec) -> Result<GeneratedMesh> {
    let (eps, gamma, mu, n) = (spec.eps, spec.gamma, spec.mu, spec.n);
    match spec.family {
        MeshFamily::Uniform => Ok(GeneratedMesh::plain(Mesh1D::uniform(n)?)),
        MeshFamily::Shishkin => Ok(GeneratedMesh::plain(shishkin(eps, gamma, mu, n)?)),
        MeshFamily::SType => stype(eps, gamma, mu, n, spec.theta, spec.psi),
        MeshFamily::BakhvalovOriginal => {
            let b = bakhvalov_original(eps, gamma, mu, spec.q, n)?;
            Ok(GeneratedMesh {
                mesh: b.mesh,
                fallback: b.function.is_none().then_some(Fallback::NoTangency),
                tau: b.function.map(|f| f.tau),
                smoothness: None,
            })
        }
        MeshFamily::BakhvalovType => bakhvalov_type(eps, gamma, mu, n),
        MeshFamily::Gartland => {
            Ok(GeneratedMesh::plain(gartland(eps, gamma, spec.h(), GartlandVariant::Gartland)?))
        }
        MeshFamily::GartlandType => {
            Ok(GeneratedMesh::plain(gartland(eps, gamma, spec.h(), GartlandVariant::GartlandType)?))
        }
        MeshFamily::DuranLombardi => Ok(GeneratedMesh::plain(duran_lombardi(eps, spec.h(), spec.kappa)?)),
        MeshFamily::Lambert => Ok(GeneratedMesh::plain(lambert(eps, gamma, mu, n)?)),
        MeshFamily::Sidorov => {
            let [a, b] = spec.sidorov_ends.unwrap_or([1.0 / n as f64; 2]);
            let s = sidorov(n, a, b)?;
            Ok(GeneratedMesh { smoothness: Some(s.smoothness), ..GeneratedMesh::plain(s.mesh) })
        }
        MeshFamily::EmelyanovComposite => {
            let s = emelyanov_composite(eps, gamma, mu, n)?;
            Ok(GeneratedMesh { smoothness: Some(s.coarse_smoothness), ..GeneratedMesh::plain(s.mesh) })
        }
        MeshFamily::Equidistributed => {
            let monitor = LinssMonitor::new(spec.k_tilde, eps, gamma, mu)?;
            Ok(GeneratedMesh::plain(equidistribute_analytic(&monitor, n)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_meshes() {
        assert!(Mesh1D::new(vec![0.0, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, 0.7, 0.3, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.1, 0.5, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(Mesh1D::new(vec![0.0, 0.5, 1.0]).is_ok());
    }

    #[test]
    fn steps_and_refinement() {
        let m = Mesh1D::new(vec![0.0, 0.25, 1.0]).unwrap();
        assert_eq!(m.steps(), vec![0.25, 0.75]);
        assert_eq!(m.step(2), 0.75);
        let r = m.refined();
        assert_eq!(r.nodes(), &[0.0, 0.125, 0.25, 0.625, 1.0]);
    }

    #[test]
    fn family_names_round_trip() {
        for f in MeshFamily::ALL {
            assert_eq!(f.name().parse::<MeshFamily>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.name()));
        }
        assert!("hexagonal".parse::<MeshFamily>().is_err());
    }

    #[test]
    fn spec_validation() {
        let mut s = MeshSpec::new(MeshFamily::Shishkin, 1e-4, 6);
        assert!(s.validate().is_ok());
        s.n = 7;
        assert!(s.validate().is_err());
        s.n = 8;
        s.eps = 0.0;
        assert!(s.validate().is_err());
        let dl = MeshSpec { coarse_step: Some(0.5), kappa: 2.0, ..MeshSpec::new(MeshFamily::DuranLombardi, 1e-3, 8) };
        assert!(dl.validate().is_err());
    }

    #[test]
    fn spec_json_uses_documented_keys() {
        let s = MeshSpec::from_name("bs").unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["family"], "s-type");
        assert_eq!(v["psi"], "bakhvalov-shishkin");
        assert!(v.get("N").is_some());
        let back: MeshSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
