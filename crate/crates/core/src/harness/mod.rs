//! Convergence sweeps over (mesh family, scheme, eps, N), rate estimates and
//! the Durán–Lombardi robustness table.

mod config;

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adapt::kopteva_estimator;
use crate::error::{Error, Result};
use crate::mesh::io::fmt_f64;
use crate::mesh::{duran_lombardi, generate, MeshFamily, MeshSpec, Psi};
use crate::solver::{error_energy, error_max, manufactured_problem, solve, ProblemKind, Scheme};

pub use config::{ErrorNorm, OutputPaths, ProblemSpec, RateModel, StudyConfig, DEFAULT_EPS, DEFAULT_N};

/// Environment variable capping the worker threads of a sweep.
pub const THREADS_ENV: &str = "LAYERKIT_THREADS";

/// `N^-1` or `N^-1 ln N`.
pub fn model_scale(model: RateModel, n: f64) -> f64 {
    match model {
        RateModel::PlainPower => 1.0 / n,
        RateModel::LogFactor => n.ln() / n,
    }
}

/// Orders between consecutive entries of `(N, error)`:
/// `ln(e_N / e_M) / ln(M / N)` after dividing each error by `ln N` under the
/// log-factor model. `None` when either error is zero or not finite.
pub fn rate_estimate(errors: &[(usize, f64)], model: RateModel) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| {
            let ((n0, e0), (n1, e1)) = (w[0], w[1]);
            let scale = |n: usize| match model {
                RateModel::PlainPower => 1.0,
                RateModel::LogFactor => (n as f64).ln(),
            };
            let (a, b) = (e0 / scale(n0), e1 / scale(n1));
            (a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())
                .then(|| (a / b).ln() / (n1 as f64 / n0 as f64).ln())
        })
        .collect()
}

/// Shishkin-type meshes carry a `ln N` factor in their error bounds.
pub fn default_rate_model(spec: &MeshSpec) -> RateModel {
    match (spec.family, spec.psi) {
        (MeshFamily::Shishkin, _) | (MeshFamily::SType, Psi::Shishkin) => RateModel::LogFactor,
        _ => RateModel::PlainPower,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub family: String,
    pub scheme: Scheme,
    pub norm: ErrorNorm,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Cells of the generated mesh; differs from `N` for recursive families.
    pub cells: usize,
    pub error: Option<f64>,
    /// `error / scale(N)` under the row's rate model.
    pub constant: Option<f64>,
    /// Order between this `N` and the next one in the sweep.
    pub rate: Option<f64>,
    pub rate_model: RateModel,
    /// Kopteva bound, for conservative upwind rows.
    pub estimator: Option<f64>,
    pub failure: Option<String>,
}

impl StudyRow {
    fn column_scheme(&self) -> String {
        match self.norm {
            ErrorNorm::Max => self.scheme.name().to_string(),
            ErrorNorm::Energy => format!("{}:energy", self.scheme.name()),
        }
    }
}

/// Largest implied constant over eps for one (family, scheme, norm, N).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConstant {
    pub family: String,
    pub scheme: Scheme,
    pub norm: ErrorNorm,
    #[serde(rename = "N")]
    pub n: usize,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<StudyRow>,
    pub uniform_constant: Vec<UniformConstant>,
}

impl ConvergenceReport {
    pub const CSV_HEADER: &'static str = "family,scheme,eps,N,error,constant,rate";

    /// The fixed-header CSV; energy-norm rows carry the scheme as
    /// `<scheme>:energy`. Missing values are empty fields.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.family,
                r.column_scheme(),
                fmt_f64(r.eps),
                r.n,
                opt(r.error),
                opt(r.constant),
                opt(r.rate)
            ));
        }
        out
    }

    /// Rows of one family, scheme and norm, ordered by (eps, N).
    pub fn select<'a>(&'a self, family: &'a str, scheme: Scheme, norm: ErrorNorm) -> impl Iterator<Item = &'a StudyRow> + 'a {
        self.rows.iter().filter(move |r| r.family == family && r.scheme == scheme && r.norm == norm)
    }
}

fn row_order(a: &StudyRow, b: &StudyRow) -> Ordering {
    a.family
        .cmp(&b.family)
        .then(a.scheme.cmp(&b.scheme))
        .then(a.norm.cmp(&b.norm))
        .then(a.eps.total_cmp(&b.eps))
        .then(a.n.cmp(&b.n))
}

/// Runs `f` on a pool capped by `LAYERKIT_THREADS` when that is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|n| *n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

struct Cell {
    template: usize,
    scheme: Scheme,
    eps: f64,
    n: usize,
}

struct Measured {
    cells: usize,
    max: f64,
    energy: Option<f64>,
    estimator: Option<f64>,
}

fn measure(kind: ProblemKind, gamma: f64, spec: &MeshSpec, scheme: Scheme, energy: bool) -> Result<Measured> {
    let problem = manufactured_problem(kind, spec.eps, gamma)?;
    let exact = problem.exact()?;
    let mesh = generate(spec)?.mesh;
    let solution = solve(&problem, &mesh, scheme)?;
    Ok(Measured {
        cells: mesh.cells(),
        max: error_max(&solution, exact),
        energy: energy.then(|| error_energy(&solution, exact, problem.diffusion()).energy),
        estimator: (scheme == Scheme::ConservativeUpwind).then(|| kopteva_estimator(&solution)),
    })
}

/// Builds, solves and measures every grid cell of `config`. Failures are
/// recorded in their rows; the sweep never aborts on them.
pub fn convergence_study(config: &StudyConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let kind = config.problem.kind;
    let gamma = config.problem.gamma;
    let want_energy = config.norms.contains(&ErrorNorm::Energy);
    let mut grid = Vec::new();
    for (t, _) in config.meshes.iter().enumerate() {
        for &scheme in &config.schemes {
            for &eps in &config.eps {
                for &n in &config.n {
                    grid.push(Cell { template: t, scheme, eps, n });
                }
            }
        }
    }
    let measured: Vec<(usize, Result<Measured>)> = with_thread_cap(|| {
        grid.par_iter()
            .enumerate()
            .map(|(k, c)| {
                let spec = MeshSpec { eps: c.eps, n: c.n, gamma, ..config.meshes[c.template].clone() };
                (k, measure(kind, gamma, &spec, c.scheme, want_energy))
            })
            .collect()
    });

    let mut rows = Vec::new();
    for (k, result) in measured {
        let c = &grid[k];
        let spec = &config.meshes[c.template];
        let model = config.rate_model.unwrap_or_else(|| default_rate_model(spec));
        for &norm in &config.norms {
            let (cells, error, estimator, failure) = match &result {
                Ok(m) => {
                    let e = if norm == ErrorNorm::Max { m.max } else { m.energy.unwrap_or(f64::NAN) };
                    (m.cells, Some(e), m.estimator, None)
                }
                Err(e) => (0, None, None, Some(e.to_string())),
            };
            rows.push(StudyRow {
                family: spec.label(),
                scheme: c.scheme,
                norm,
                eps: c.eps,
                n: c.n,
                cells,
                constant: error.map(|e| e / model_scale(model, c.n as f64)),
                error,
                rate: None,
                rate_model: model,
                estimator,
                failure,
            });
        }
    }
    rows.sort_by(row_order);

    // rates along N within each (family, scheme, norm, eps) run
    let same_run = |a: &StudyRow, b: &StudyRow| {
        a.family == b.family && a.scheme == b.scheme && a.norm == b.norm && a.eps == b.eps
    };
    let mut start = 0;
    while start < rows.len() {
        let mut end = start + 1;
        while end < rows.len() && same_run(&rows[start], &rows[end]) {
            end += 1;
        }
        let run: Vec<(usize, f64)> = rows[start..end].iter().map(|r| (r.n, r.error.unwrap_or(f64::NAN))).collect();
        let rates = rate_estimate(&run, rows[start].rate_model);
        for (r, rate) in rows[start..end].iter_mut().zip(rates) {
            r.rate = rate;
        }
        start = end;
    }

    let mut uniform_constant: Vec<UniformConstant> = Vec::new();
    for r in &rows {
        let Some(c) = r.constant else { continue };
        match uniform_constant
            .iter_mut()
            .find(|u| u.family == r.family && u.scheme == r.scheme && u.norm == r.norm && u.n == r.n)
        {
            Some(u) => u.constant = u.constant.max(c),
            None => uniform_constant.push(UniformConstant {
                family: r.family.clone(),
                scheme: r.scheme,
                norm: r.norm,
                n: r.n,
                constant: c,
            }),
        }
    }
    Ok(ConvergenceReport { rows, uniform_constant })
}

pub const DL_EPS_STAR_FACTORS: [f64; 4] = [0.25, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub eps: f64,
    /// `eps* / eps`.
    pub factor: f64,
    pub eps_star: f64,
    pub cells: usize,
    pub error: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessTable {
    #[serde(rename = "H")]
    pub h: f64,
    pub kappa: f64,
    pub scheme: Scheme,
    pub rows: Vec<RobustnessRow>,
    /// Per eps: the factor with the smallest error and whether it is <= 1.
    pub minimum: Vec<(f64, f64, bool)>,
}

impl RobustnessTable {
    pub const CSV_HEADER: &'static str = "eps,factor,eps_star,cells,error";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(r.eps),
                fmt_f64(r.factor),
                fmt_f64(r.eps_star),
                r.cells,
                r.error.map(fmt_f64).unwrap_or_default()
            ));
        }
        out
    }

    pub fn error_at(&self, eps: f64, factor: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.eps == eps && r.factor == factor).and_then(|r| r.error)
    }
}

/// Solves the manufactured convection-diffusion problem for each true `eps`
/// on Durán–Lombardi meshes built for `eps* = factor * eps`.
pub fn dl_robustness_study(gamma: f64, h: f64, kappa: f64, eps_values: &[f64], scheme: Scheme) -> Result<RobustnessTable> {
    if eps_values.is_empty() {
        return Err(Error::Config("no eps values given".into()));
    }
    let grid: Vec<(f64, f64)> =
        eps_values.iter().flat_map(|&e| DL_EPS_STAR_FACTORS.iter().map(move |&f| (e, f))).collect();
    let rows: Vec<RobustnessRow> = with_thread_cap(|| {
        grid.par_iter()
            .map(|&(eps, factor)| {
                let eps_star = factor * eps;
                let run = || -> Result<(usize, f64)> {
                    let problem = manufactured_problem(ProblemKind::ConvectionDiffusion, eps, gamma)?;
                    let mesh = duran_lombardi(eps_star, h, kappa)?;
                    let s = solve(&problem, &mesh, scheme)?;
                    Ok((mesh.cells(), error_max(&s, problem.exact()?)))
                };
                match run() {
                    Ok((cells, e)) => RobustnessRow { eps, factor, eps_star, cells, error: Some(e), failure: None },
                    Err(e) => RobustnessRow { eps, factor, eps_star, cells: 0, error: None, failure: Some(e.to_string()) },
                }
            })
            .collect()
    });
    let minimum = eps_values
        .iter()
        .filter_map(|&eps| {
            rows.iter()
                .filter(|r| r.eps == eps && r.error.is_some())
                .min_by(|a, b| a.error.unwrap().total_cmp(&b.error.unwrap()))
                .map(|r| (eps, r.factor, r.factor <= 1.0))
        })
        .collect();
    Ok(RobustnessTable { h, kappa, scheme, rows, minimum })
}
