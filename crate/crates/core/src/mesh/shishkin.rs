//! Shishkin and S-type (Shishkin-type) meshes.

use serde::{Deserialize, Serialize};

use super::transition::transition_sigma_shishkin;
use super::{Fallback, GeneratedMesh, Mesh1D};
use crate::error::{Error, Result};

/// Mesh-characterizing function `psi = exp(-lambda)` of an S-type mesh,
/// normalized so that `psi(0) = 1` and `psi(1/2) = 1/(theta N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Psi {
    /// `psi(t) = exp(-2 t ln(theta N))`: the piecewise-uniform Shishkin mesh.
    #[default]
    Shishkin,
    /// `psi(t) = 1 - 2 t (1 - 1/(theta N))`.
    BakhvalovShishkin,
}

impl Psi {
    /// `lambda(t) = -ln psi(t)` for the scaled cell count `theta * N`.
    pub fn lambda(self, t: f64, scaled_n: f64) -> f64 {
        match self {
            Psi::Shishkin => 2.0 * t * scaled_n.ln(),
            Psi::BakhvalovShishkin => -(-2.0 * t * (1.0 - 1.0 / scaled_n)).ln_1p(),
        }
    }

    pub fn eval(self, t: f64, scaled_n: f64) -> f64 {
        match self {
            Psi::Shishkin => (-self.lambda(t, scaled_n)).exp(),
            Psi::BakhvalovShishkin => 1.0 - 2.0 * t * (1.0 - 1.0 / scaled_n),
        }
    }
}

/// Piecewise-uniform Shishkin mesh: N/2 equal cells on `[0, sigma]` and on
/// `[sigma, 1]`.
pub fn shishkin(eps: f64, gamma: f64, mu: f64, n: usize) -> Result<Mesh1D> {
    check_split(n)?;
    let sigma = transition_sigma_shishkin(eps, gamma, mu, n)?;
    let half = n / 2;
    let fine = (0..=half).map(|i| sigma * i as f64 / half as f64);
    let coarse = (1..=half).map(|j| sigma + (1.0 - sigma) * j as f64 / half as f64);
    Mesh1D::pinned(fine.chain(coarse).collect())
}

/// S-type mesh with one of the built-in characterizing functions.
///
/// Falls back to the uniform mesh (flagged) when the transition point
/// `(mu eps / gamma) ln(theta N)` is not below 1/2.
pub fn stype(eps: f64, gamma: f64, mu: f64, n: usize, theta: f64, psi: Psi) -> Result<GeneratedMesh> {
    let scaled_n = theta * n as f64;
    stype_lambda(eps, gamma, mu, n, theta, |t| psi.lambda(t, scaled_n))
}

/// S-type mesh for a user-supplied characterizing function `psi`, which must
/// be strictly decreasing with `psi(0) = 1` and `psi(1/2) = 1/(theta N)`.
pub fn stype_with<F>(eps: f64, gamma: f64, mu: f64, n: usize, theta: f64, psi: F) -> Result<GeneratedMesh>
where
    F: Fn(f64) -> f64,
{
    stype_lambda(eps, gamma, mu, n, theta, |t| -psi(t).ln())
}

fn stype_lambda<F>(eps: f64, gamma: f64, mu: f64, n: usize, theta: f64, lambda: F) -> Result<GeneratedMesh>
where
    F: Fn(f64) -> f64,
{
    check_split(n)?;
    if !(theta > 0.0) {
        return Err(Error::param("theta", format!("must be positive, got {theta}")));
    }
    if !(eps > 0.0 && gamma > 0.0 && mu > 0.0) {
        return Err(Error::param("eps", "eps, gamma and mu must be positive"));
    }
    let scale = mu * eps / gamma;
    let sigma = scale * (theta * n as f64).ln();
    if !(sigma < 0.5) {
        return GeneratedMesh::uniform_fallback(n, Fallback::TransitionClamped);
    }
    let half = n / 2;
    let mut nodes: Vec<f64> = (0..=half).map(|i| scale * lambda(i as f64 / n as f64)).collect();
    let junction = nodes[half];
    nodes.extend((1..=half).map(|j| junction + (1.0 - junction) * j as f64 / half as f64));
    Ok(GeneratedMesh::plain(Mesh1D::pinned(nodes)?))
}

/// Largest `|psi'(t)|` on `[0, 1/2]`, from `samples` equal subintervals with
/// second-order differences (one-sided at the ends).
pub fn psi_max_derivative<F>(psi: F, samples: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if samples < 1000 {
        return Err(Error::param("samples", format!("need at least 1000, got {samples}")));
    }
    let h = 0.5 / samples as f64;
    let v: Vec<f64> = (0..=samples).map(|j| psi(j as f64 * h)).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("psi", "characterizing function returned a non-finite value"));
    }
    let m = samples;
    let ends = [
        (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h),
        (3.0 * v[m] - 4.0 * v[m - 1] + v[m - 2]) / (2.0 * h),
    ];
    let interior = v.windows(3).map(|w| (w[2] - w[0]) / (2.0 * h));
    Ok(ends.into_iter().chain(interior).fold(0.0, |acc, d| acc.max(d.abs())))
}

fn check_split(n: usize) -> Result<()> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::param("N", format!("split meshes need even N >= 4, got {n}")));
    }
    Ok(())
}
