//! Finite-difference and P1 finite-element discretizations on arbitrary
//! meshes, the tridiagonal solve and error norms.

mod problem;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::quadrature::{adaptive, AdaptiveTol, GAUSS3};

pub use problem::{coef, manufactured_problem, Coef, Exact, ProblemKind, SpProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Simple upwind: forward difference for `-b u'`.
    Upwind,
    /// Upwind in flux form, fluxes at cell midpoints.
    ConservativeUpwind,
    /// Three-point central difference (reaction-diffusion only).
    Central,
    /// Piecewise-linear Galerkin.
    #[serde(alias = "fem")]
    FemP1,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Upwind, Scheme::ConservativeUpwind, Scheme::Central, Scheme::FemP1];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Upwind => "upwind",
            Scheme::ConservativeUpwind => "conservative-upwind",
            Scheme::Central => "central",
            Scheme::FemP1 => "fem-p1",
        }
    }

    pub fn supports(self, kind: ProblemKind) -> bool {
        match self {
            Scheme::Upwind | Scheme::ConservativeUpwind => kind == ProblemKind::ConvectionDiffusion,
            Scheme::Central => kind == ProblemKind::ReactionDiffusion,
            Scheme::FemP1 => true,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "upwind" | "simple-upwind" => Ok(Scheme::Upwind),
            "conservative-upwind" | "conservative" => Ok(Scheme::ConservativeUpwind),
            "central" => Ok(Scheme::Central),
            "fem" | "fem-p1" | "p1" => Ok(Scheme::FemP1),
            _ => Err(Error::param("scheme", format!("unknown scheme `{s}`"))),
        }
    }
}

/// System for the interior unknowns `u_1..u_{N-1}`. Row `k` couples
/// `sub[k] u_{k} + diag[k] u_{k+1} + sup[k] u_{k+2}` in node numbering;
/// `sub[0]` and `sup[n-1]` are unused and zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self { sub: vec![0.0; n], diag: vec![0.0; n], sup: vec![0.0; n], rhs: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Diagonal positive, off-diagonals non-positive.
    pub fn has_m_matrix_signs(&self) -> bool {
        let n = self.len();
        (0..n).all(|k| self.diag[k] > 0.0 && (k == 0 || self.sub[k] <= 0.0) && (k + 1 == n || self.sup[k] <= 0.0))
    }

    pub fn residual_max(&self, u: &[f64]) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut r = self.diag[k] * u[k] - self.rhs[k];
                if k > 0 {
                    r += self.sub[k] * u[k - 1];
                }
                if k + 1 < n {
                    r += self.sup[k] * u[k + 1];
                }
                r.abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Gaussian elimination without pivoting for a tridiagonal system.
pub fn thomas_solve(sys: &Tridiagonal) -> Result<Vec<f64>> {
    let n = sys.len();
    if sys.sub.len() != n || sys.sup.len() != n || sys.rhs.len() != n {
        return Err(Error::param("system", "sub, diag, sup and rhs lengths differ"));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = sys.diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::PivotBreakdown { row: 0 });
    }
    c[0] = sys.sup[0] / pivot;
    d[0] = sys.rhs[0] / pivot;
    for k in 1..n {
        pivot = sys.diag[k] - sys.sub[k] * c[k - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::PivotBreakdown { row: k });
        }
        c[k] = if k + 1 < n { sys.sup[k] / pivot } else { 0.0 };
        d[k] = (sys.rhs[k] - sys.sub[k] * d[k - 1]) / pivot;
    }
    for k in (0..n - 1).rev() {
        d[k] -= c[k] * d[k + 1];
    }
    Ok(d)
}

fn sample_points(mesh: &Mesh1D) -> Vec<f64> {
    let x = mesh.nodes();
    let mut pts = x.to_vec();
    pts.extend(x.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    pts
}

fn require(scheme: Scheme, problem: &SpProblem) -> Result<()> {
    if scheme.supports(problem.kind) {
        Ok(())
    } else {
        let kind = match problem.kind {
            ProblemKind::ConvectionDiffusion => "convection-diffusion",
            ProblemKind::ReactionDiffusion => "reaction-diffusion",
        };
        Err(Error::SchemeMismatch { scheme: scheme.name(), kind })
    }
}

/// Moves the boundary values into the right-hand side.
fn close_boundary(sys: &mut Tridiagonal, problem: &SpProblem) {
    let n = sys.len();
    sys.rhs[0] -= sys.sub[0] * problem.u0;
    sys.sub[0] = 0.0;
    sys.rhs[n - 1] -= sys.sup[n - 1] * problem.u1;
    sys.sup[n - 1] = 0.0;
}

/// Upwind difference scheme for `-eps u'' - b u' + c u = f`.
///
/// With `conservative = false` row `i` reads
/// `-eps D2 u_i - b_i (u_{i+1} - u_i)/h_{i+1} + c_i u_i = f_i` with the
/// nonuniform second difference `D2`. With `conservative = true` the total
/// flux `eps u' + b u` is taken at the midpoints with upwinded `u`:
/// `-(F_{i+1/2} - F_{i-1/2})/hbar_i + (c_i + (b_{i+1/2} - b_{i-1/2})/hbar_i) u_i = f_i`,
/// `F_{i+1/2} = eps (u_{i+1} - u_i)/h_{i+1} + b_{i+1/2} u_{i+1}`.
pub fn assemble_upwind(problem: &SpProblem, mesh: &Mesh1D, conservative: bool) -> Result<Tridiagonal> {
    let scheme = if conservative { Scheme::ConservativeUpwind } else { Scheme::Upwind };
    require(scheme, problem)?;
    problem.check_signs(&sample_points(mesh))?;
    let x = mesh.nodes();
    let eps = problem.eps;
    let n = mesh.cells() - 1;
    let mut sys = Tridiagonal::zeros(n);
    for k in 0..n {
        let i = k + 1;
        let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let hbar = 0.5 * (hl + hr);
        let (dl, dr) = (eps / (hbar * hl), eps / (hbar * hr));
        let c = (problem.c)(x[i]);
        if conservative {
            let b_right = (problem.b)(0.5 * (x[i] + x[i + 1]));
            sys.sub[k] = -dl;
            sys.sup[k] = -dr - b_right / hbar;
            sys.diag[k] = dl + dr + b_right / hbar + c;
        } else {
            let b = (problem.b)(x[i]);
            sys.sub[k] = -dl;
            sys.sup[k] = -dr - b / hr;
            sys.diag[k] = dl + dr + b / hr + c;
        }
        sys.rhs[k] = (problem.f)(x[i]);
    }
    close_boundary(&mut sys, problem);
    Ok(sys)
}

/// Central difference scheme for `-eps^2 u'' + c u = f`.
pub fn assemble_central(problem: &SpProblem, mesh: &Mesh1D) -> Result<Tridiagonal> {
    require(Scheme::Central, problem)?;
    problem.check_signs(&sample_points(mesh))?;
    let x = mesh.nodes();
    let d = problem.diffusion();
    let n = mesh.cells() - 1;
    let mut sys = Tridiagonal::zeros(n);
    for k in 0..n {
        let i = k + 1;
        let (hl, hr) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        let hbar = 0.5 * (hl + hr);
        let (dl, dr) = (d / (hbar * hl), d / (hbar * hr));
        sys.sub[k] = -dl;
        sys.sup[k] = -dr;
        sys.diag[k] = dl + dr + (problem.c)(x[i]);
        sys.rhs[k] = (problem.f)(x[i]);
    }
    close_boundary(&mut sys, problem);
    Ok(sys)
}

/// P1 Galerkin for `D (u', v') - (b u', v) + (c u, v) = (f, v)`, `D` the
/// problem's diffusion coefficient, every cell integral by 3-point Gauss.
pub fn assemble_fem_p1(problem: &SpProblem, mesh: &Mesh1D) -> Result<Tridiagonal> {
    require(Scheme::FemP1, problem)?;
    problem.check_signs(&sample_points(mesh))?;
    let x = mesh.nodes();
    let d = problem.diffusion();
    let cells = mesh.cells();
    let n = cells - 1;
    // full (N+1)-row band, boundary rows dropped afterwards
    let mut sub = vec![0.0; cells + 1];
    let mut diag = vec![0.0; cells + 1];
    let mut sup = vec![0.0; cells + 1];
    let mut rhs = vec![0.0; cells + 1];
    for j in 0..cells {
        let (a, b) = (x[j], x[j + 1]);
        let h = b - a;
        let mut local = [[d / h, -d / h], [-d / h, d / h]];
        let mut load = [0.0; 2];
        let dphi = [-1.0 / h, 1.0 / h];
        for &(t, w) in GAUSS3.iter() {
            let xq = a + 0.5 * h * (t + 1.0);
            let wq = 0.5 * h * w;
            let phi = [(b - xq) / h, (xq - a) / h];
            let (bq, cq, fq) = ((problem.b)(xq), (problem.c)(xq), (problem.f)(xq));
            for r in 0..2 {
                for s in 0..2 {
                    // phi[r] * phi[s] keeps the mass part bitwise symmetric
                    local[r][s] += wq * (cq * (phi[r] * phi[s]) - bq * (dphi[s] * phi[r]));
                }
                load[r] += wq * fq * phi[r];
            }
        }
        diag[j] += local[0][0];
        sup[j] += local[0][1];
        sub[j + 1] += local[1][0];
        diag[j + 1] += local[1][1];
        rhs[j] += load[0];
        rhs[j + 1] += load[1];
    }
    let mut sys = Tridiagonal {
        sub: sub[1..=n].to_vec(),
        diag: diag[1..=n].to_vec(),
        sup: sup[1..=n].to_vec(),
        rhs: rhs[1..=n].to_vec(),
    };
    close_boundary(&mut sys, problem);
    Ok(sys)
}

pub fn assemble(problem: &SpProblem, mesh: &Mesh1D, scheme: Scheme) -> Result<Tridiagonal> {
    match scheme {
        Scheme::Upwind => assemble_upwind(problem, mesh, false),
        Scheme::ConservativeUpwind => assemble_upwind(problem, mesh, true),
        Scheme::Central => assemble_central(problem, mesh),
        Scheme::FemP1 => assemble_fem_p1(problem, mesh),
    }
}

/// Nodal values on a mesh, boundary values included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSolution {
    pub mesh: Mesh1D,
    pub values: Vec<f64>,
    pub scheme: Scheme,
}

impl DiscreteSolution {
    /// `D^- u_i = (u_i - u_{i-1}) / h_i` for `i = 1..=N`.
    pub fn backward_difference(&self, i: usize) -> f64 {
        (self.values[i] - self.values[i - 1]) / self.mesh.step(i)
    }

    /// All backward differences; entry `k` holds `D^- u_{k+1}`.
    pub fn backward_differences(&self) -> Vec<f64> {
        (1..=self.mesh.cells()).map(|i| self.backward_difference(i)).collect()
    }

    /// Piecewise-linear interpolant of the nodal values.
    pub fn interpolate(&self, x: f64) -> f64 {
        let nodes = self.mesh.nodes();
        let k = nodes.partition_point(|v| *v <= x).clamp(1, nodes.len() - 1);
        let (a, b) = (nodes[k - 1], nodes[k]);
        let t = (x - a) / (b - a);
        self.values[k - 1] + t * (self.values[k] - self.values[k - 1])
    }
}

pub fn solve(problem: &SpProblem, mesh: &Mesh1D, scheme: Scheme) -> Result<DiscreteSolution> {
    let sys = assemble(problem, mesh, scheme)?;
    let inner = thomas_solve(&sys)?;
    let mut values = Vec::with_capacity(mesh.nodes().len());
    values.push(problem.u0);
    values.extend(inner);
    values.push(problem.u1);
    Ok(DiscreteSolution { mesh: mesh.clone(), values, scheme })
}

/// `max_i |u(x_i) - u_i|`.
pub fn error_max(solution: &DiscreteSolution, exact: &Exact) -> f64 {
    solution
        .mesh
        .nodes()
        .iter()
        .zip(&solution.values)
        .map(|(x, v)| ((exact.u)(*x) - v).abs())
        .fold(0.0, f64::max)
}

/// Parts of the error of the piecewise-linear interpolant `u^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyError {
    /// `|u - u^N|_1`.
    pub h1_semi: f64,
    /// `||u - u^N||_0`.
    pub l2: f64,
    /// `(D |u - u^N|_1^2 + ||u - u^N||_0^2)^{1/2}`.
    pub energy: f64,
}

const ERROR_TOL: AdaptiveTol = AdaptiveTol { rtol: 1e-10, atol: 0.0, max_depth: 30 };

/// Energy-norm error with diffusion weight `diffusion` (`eps` for
/// convection-diffusion, `eps^2` for reaction-diffusion).
pub fn error_energy(solution: &DiscreteSolution, exact: &Exact, diffusion: f64) -> EnergyError {
    let x = solution.mesh.nodes();
    let u = &solution.values;
    let mut semi = 0.0;
    let mut l2 = 0.0;
    for j in 0..solution.mesh.cells() {
        let (a, b) = (x[j], x[j + 1]);
        let slope = (u[j + 1] - u[j]) / (b - a);
        let ua = u[j];
        semi += adaptive(&mut |t| ((exact.du)(t) - slope).powi(2), a, b, ERROR_TOL).0;
        l2 += adaptive(&mut |t| ((exact.u)(t) - (ua + slope * (t - a))).powi(2), a, b, ERROR_TOL).0;
    }
    EnergyError { h1_semi: semi.sqrt(), l2: l2.sqrt(), energy: (diffusion * semi + l2).sqrt() }
}

#[cfg(test)]
mod tests;
