//! Bakhvalov's original C¹ mesh, the Bakhvalov-type mesh and the implicitly
//! defined (Lambert-W) mesh.

use super::transition::transition_sigma_bakhvalov;
use super::{Fallback, GeneratedMesh, Mesh1D};
use crate::error::{Error, Result};
use crate::roots::find_root;

/// Bakhvalov's mesh-generating function: logarithmic on `[0, tau]`, its
/// tangent line through `(1, 1)` on `[tau, 1]`.
///
/// The tangency point is stored through its distance `gap = q - tau` to the
/// pole of the logarithm, which is where the precision matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BakhvalovFunction {
    /// `mu eps / gamma`.
    pub scale: f64,
    pub q: f64,
    pub tau: f64,
    pub gap: f64,
}

impl BakhvalovFunction {
    /// Logarithmic branch `-(mu eps/gamma) ln(1 - t/q)`.
    pub fn log_branch(&self, t: f64) -> f64 {
        -self.scale * (-t / self.q).ln_1p()
    }

    pub fn phi_tau(&self) -> f64 {
        -self.scale * (self.gap / self.q).ln()
    }

    /// `phi'(tau-)`, the slope of the logarithmic branch at `tau`.
    pub fn slope_left(&self) -> f64 {
        self.scale / self.gap
    }

    /// `phi'(tau+)`, the slope of the line from `(tau, phi(tau))` to `(1, 1)`.
    pub fn slope_right(&self) -> f64 {
        (1.0 - self.phi_tau()) / (1.0 - self.q + self.gap)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.tau {
            self.log_branch(t)
        } else {
            self.phi_tau() + self.slope_left() * ((t - self.q) + self.gap)
        }
    }
}

/// Result of [`bakhvalov_original`]; `function` is `None` when no tangency
/// point exists and the mesh is the uniform fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct BakhvalovOriginal {
    pub mesh: Mesh1D,
    pub function: Option<BakhvalovFunction>,
}

/// Bakhvalov's original mesh `x_i = phi(i/N)`.
///
/// `tau` solves `phi'(tau) (1 - tau) = 1 - phi(tau)`. A solution in `(0, q)`
/// exists iff `mu eps / gamma < q`; otherwise the uniform mesh is returned.
pub fn bakhvalov_original(eps: f64, gamma: f64, mu: f64, q: f64, n: usize) -> Result<BakhvalovOriginal> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::param("q", format!("must lie in (0, 1), got {q}")));
    }
    if !(eps > 0.0 && gamma > 0.0 && mu > 0.0) {
        return Err(Error::param("eps", "eps, gamma and mu must be positive"));
    }
    let scale = mu * eps / gamma;
    if scale >= q {
        return Ok(BakhvalovOriginal { mesh: Mesh1D::uniform(n)?, function: None });
    }
    // residual in terms of gap = q - tau; strictly decreasing, +inf at 0+
    let residual = |gap: f64| scale * (1.0 - q + gap) / gap - 1.0 - scale * (gap / q).ln();
    let gap = find_root(residual, q * 1e-300, q)?;
    let function = BakhvalovFunction { scale, q, tau: q - gap, gap };
    let nodes = (0..=n).map(|i| function.eval(i as f64 / n as f64)).collect();
    Ok(BakhvalovOriginal { mesh: Mesh1D::pinned(nodes)?, function: Some(function) })
}

/// Bakhvalov-type mesh: `x_i = -(mu eps/gamma) ln(1 - 2(1-eps) i/N)` for
/// `i <= N/2`, equidistant on `[sigma*, 1]`.
pub fn bakhvalov_type(eps: f64, gamma: f64, mu: f64, n: usize) -> Result<GeneratedMesh> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::param("N", format!("split meshes need even N >= 4, got {n}")));
    }
    let sigma = transition_sigma_bakhvalov(eps, gamma, mu)?;
    let scale = mu * eps / gamma;
    if sigma >= 0.5 {
        return GeneratedMesh::uniform_fallback(n, Fallback::TransitionClamped);
    }
    let half = n / 2;
    let mut nodes: Vec<f64> = (0..=half)
        .map(|i| -scale * (-2.0 * (1.0 - eps) * i as f64 / n as f64).ln_1p())
        .collect();
    let junction = nodes[half];
    nodes.extend((1..=half).map(|j| junction + (1.0 - junction) * j as f64 / half as f64));
    Ok(GeneratedMesh::plain(Mesh1D::pinned(nodes)?))
}

/// Root of `xi - exp(-xi/scale) + 1 - 2t = 0` on `[0, 2]`.
pub fn lambert_node(t: f64, scale: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    find_root(|xi| xi - (-xi / scale).exp_m1() - 2.0 * t, 0.0, 2.0)
}

/// Mesh generated by the implicitly defined function
/// `xi(t) - exp(-gamma xi / (mu eps)) + 1 - 2t = 0` at `t_i = i/N`, rescaled
/// by `1/xi(1)` so that the last node is 1.
pub fn lambert(eps: f64, gamma: f64, mu: f64, n: usize) -> Result<Mesh1D> {
    if n < 2 {
        return Err(Error::param("N", format!("must be at least 2, got {n}")));
    }
    if !(eps > 0.0 && gamma > 0.0 && mu > 0.0) {
        return Err(Error::param("eps", "eps, gamma and mu must be positive"));
    }
    let scale = mu * eps / gamma;
    let raw = (0..=n)
        .map(|i| lambert_node(i as f64 / n as f64, scale))
        .collect::<Result<Vec<_>>>()?;
    let end = raw[n];
    Mesh1D::pinned(raw.into_iter().map(|x| x / end).collect())
}
