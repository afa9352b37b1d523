//! A posteriori error bound for the conservative upwind scheme and the
//! equidistribution loop built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::io::fmt_f64;
use crate::mesh::{Mesh1D, PiecewiseConstantMonitor};
use crate::solver::{error_max, solve, DiscreteSolution, Scheme, SpProblem};

pub const DEFAULT_C0: f64 = 2.0;
pub const DEFAULT_MAX_ITER: usize = 20;

/// Cell monitor `M_i = sqrt(1 + (D^- u_i)^2)` for `i = 1..=N`.
pub fn arc_length_monitor(solution: &DiscreteSolution) -> Vec<f64> {
    solution.backward_differences().into_iter().map(|d| d.hypot(1.0)).collect()
}

/// `max_i h_i sqrt(1 + (D^- u_i)^2)`.
pub fn kopteva_estimator(solution: &DiscreteSolution) -> f64 {
    solution
        .mesh
        .steps()
        .iter()
        .zip(arc_length_monitor(solution))
        .map(|(h, m)| h * m)
        .fold(0.0, f64::max)
}

/// `N max_i h_i M_i / sum_j h_j M_j`; 1 for an equidistributed mesh.
pub fn equidistribution_quality(mesh: &Mesh1D, monitor: &[f64]) -> f64 {
    let masses: Vec<f64> = mesh.steps().iter().zip(monitor).map(|(h, m)| h * m).collect();
    let total: f64 = masses.iter().sum();
    let worst = masses.iter().fold(0.0f64, |a, v| a.max(*v));
    (mesh.cells() as f64 * worst / total).max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquidistributionStep {
    pub mesh: Mesh1D,
    /// Quality of the input mesh.
    pub quality: f64,
    pub monitor: Vec<f64>,
}

/// Mesh with equal arc-length monitor mass per cell, from the exact
/// inversion of the piecewise-constant cumulative monitor.
pub fn equidistribute_step(solution: &DiscreteSolution) -> Result<EquidistributionStep> {
    let monitor = arc_length_monitor(solution);
    let quality = equidistribution_quality(&solution.mesh, &monitor);
    let pc = PiecewiseConstantMonitor::new(&solution.mesh, monitor.clone())?;
    let mesh = pc.equidistribute(solution.mesh.cells())?;
    Ok(EquidistributionStep { mesh, quality, monitor })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Equidistributed,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptIterate {
    pub mesh: Mesh1D,
    pub values: Vec<f64>,
    pub monitor: Vec<f64>,
    pub quality: f64,
    pub estimator: f64,
    /// Nodal max-norm error when the problem has an exact solution.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptTrace {
    pub iterations: Vec<AdaptIterate>,
    /// Index of the accepted iterate.
    pub final_index: usize,
    pub stop_reason: StopReason,
}

impl AdaptTrace {
    pub fn accepted(&self) -> &AdaptIterate {
        &self.iterations[self.final_index]
    }

    pub const CSV_HEADER: &'static str = "iter,Q,eta,err";

    /// One row per iterate: `iter,Q,eta,err`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (k, it) in self.iterations.iter().enumerate() {
            let err = it.error.map(fmt_f64).unwrap_or_default();
            out.push_str(&format!("{k},{},{},{err}\n", fmt_f64(it.quality), fmt_f64(it.estimator)));
        }
        out
    }
}

/// Solve, measure, equidistribute, starting from the uniform mesh with `n`
/// cells, until the quality drops to `c0` or `max_iter` solves were made.
pub fn ks_adapt(problem: &SpProblem, n: usize, c0: f64, max_iter: usize) -> Result<AdaptTrace> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::param("N", format!("must be even and at least 2, got {n}")));
    }
    if !(c0 > 1.0) {
        return Err(Error::param("C0", format!("must exceed 1, got {c0}")));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    let mut mesh = Mesh1D::uniform(n)?;
    let mut iterations = Vec::new();
    for _ in 0..max_iter {
        let solution = solve(problem, &mesh, Scheme::ConservativeUpwind)?;
        let step = equidistribute_step(&solution)?;
        let error = problem.exact.as_ref().map(|ex| error_max(&solution, ex));
        let done = step.quality <= c0;
        iterations.push(AdaptIterate {
            estimator: kopteva_estimator(&solution),
            mesh: solution.mesh,
            values: solution.values,
            monitor: step.monitor,
            quality: step.quality,
            error,
        });
        if done {
            return Ok(AdaptTrace {
                final_index: iterations.len() - 1,
                iterations,
                stop_reason: StopReason::Equidistributed,
            });
        }
        mesh = step.mesh;
    }
    Ok(AdaptTrace { final_index: iterations.len() - 1, iterations, stop_reason: StopReason::MaxIter })
}
