use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coef = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn coef<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Coef {
    Arc::new(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// `-eps u'' - b u' + c u = f`, `b >= gamma > 0`, layer at 0.
    #[serde(alias = "cd")]
    ConvectionDiffusion,
    /// `-eps^2 u'' + c u = f`, `c > 0`, layers at both ends.
    #[serde(alias = "rd")]
    ReactionDiffusion,
}

impl ProblemKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ProblemKind::ConvectionDiffusion => "cd",
            ProblemKind::ReactionDiffusion => "rd",
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cd" | "convection-diffusion" => Ok(ProblemKind::ConvectionDiffusion),
            "rd" | "reaction-diffusion" => Ok(ProblemKind::ReactionDiffusion),
            _ => Err(Error::param("problem", format!("unknown problem kind `{s}`, expected cd or rd"))),
        }
    }
}

/// Exact solution and its derivative.
#[derive(Clone)]
pub struct Exact {
    pub u: Coef,
    pub du: Coef,
}

/// A two-point boundary value problem on [0, 1].
#[derive(Clone)]
pub struct SpProblem {
    pub kind: ProblemKind,
    pub eps: f64,
    /// Lower bound of `b` (convection) or of `sqrt(c)` (reaction).
    pub gamma: f64,
    pub b: Coef,
    pub c: Coef,
    pub f: Coef,
    pub u0: f64,
    pub u1: f64,
    pub exact: Option<Exact>,
}

impl fmt::Debug for SpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpProblem")
            .field("kind", &self.kind)
            .field("eps", &self.eps)
            .field("gamma", &self.gamma)
            .field("u0", &self.u0)
            .field("u1", &self.u1)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl SpProblem {
    /// Coefficient of `-u''`: `eps` or `eps^2`.
    pub fn diffusion(&self) -> f64 {
        match self.kind {
            ProblemKind::ConvectionDiffusion => self.eps,
            ProblemKind::ReactionDiffusion => self.eps * self.eps,
        }
    }

    pub fn exact(&self) -> Result<&Exact> {
        self.exact.as_ref().ok_or(Error::MissingExactSolution)
    }

    /// Checks the coefficient sign conditions at the given points.
    pub fn check_signs(&self, points: &[f64]) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::param("eps", format!("must lie in (0, 1], got {}", self.eps)));
        }
        for &x in points {
            let (b, c) = ((self.b)(x), (self.c)(x));
            match self.kind {
                ProblemKind::ConvectionDiffusion => {
                    if !(b >= self.gamma && self.gamma > 0.0) {
                        return Err(Error::SignError(format!("b({x}) = {b} is below gamma = {}", self.gamma)));
                    }
                    if !(c >= 0.0) {
                        return Err(Error::SignError(format!("c({x}) = {c} is negative")));
                    }
                }
                ProblemKind::ReactionDiffusion => {
                    if !(c > 0.0) {
                        return Err(Error::SignError(format!("c({x}) = {c} is not positive")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Model problems whose exact solutions carry the layer `exp(-gamma x/eps)`.
///
/// Convection-diffusion, `b = gamma`, `c = 1`:
/// `u = (e^{-gamma x/eps} - e^{-gamma/eps}) / (1 - e^{-gamma/eps}) + x(1 - x)`.
///
/// Reaction-diffusion, `c = gamma^2`:
/// `u = e^{-gamma x/eps} + e^{-gamma (1-x)/eps} + cos(pi x)`.
pub fn manufactured_problem(kind: ProblemKind, eps: f64, gamma: f64) -> Result<SpProblem> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1], got {eps}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
    }
    let k = gamma / eps;
    let tail = (-k).exp();
    match kind {
        ProblemKind::ConvectionDiffusion => {
            let denom = -(-k).exp_m1();
            let layer = move |x: f64| ((-k * x).exp() - tail) / denom;
            // the layer part solves the homogeneous convection-diffusion operator
            let f = move |x: f64| 2.0 * eps - gamma * (1.0 - 2.0 * x) + layer(x) + x * (1.0 - x);
            Ok(SpProblem {
                kind,
                eps,
                gamma,
                b: coef(move |_| gamma),
                c: coef(|_| 1.0),
                f: coef(f),
                u0: 1.0,
                u1: 0.0,
                exact: Some(Exact {
                    u: coef(move |x| layer(x) + x * (1.0 - x)),
                    du: coef(move |x| -k * (-k * x).exp() / denom + 1.0 - 2.0 * x),
                }),
            })
        }
        ProblemKind::ReactionDiffusion => {
            let pi = std::f64::consts::PI;
            let c = gamma * gamma;
            let f = move |x: f64| (eps * eps * pi * pi + c) * (pi * x).cos();
            Ok(SpProblem {
                kind,
                eps,
                gamma,
                b: coef(|_| 0.0),
                c: coef(move |_| c),
                f: coef(f),
                u0: 2.0 + tail,
                u1: tail,
                exact: Some(Exact {
                    u: coef(move |x| (-k * x).exp() + (-k * (1.0 - x)).exp() + (pi * x).cos()),
                    du: coef(move |x| -k * (-k * x).exp() + k * (-k * (1.0 - x)).exp() - pi * (pi * x).sin()),
                }),
            })
        }
    }
}
