//! Meshes that equidistribute a monitor function.

use super::Mesh1D;
use crate::error::{Error, Result};
use crate::quadrature::{gauss, AdaptiveTol, CumulativeIntegral, GAUSS5};
use crate::roots::{brent, ROOT_MAX_ITER};

/// A positive weight on [0, 1].
pub trait MonitorFn {
    fn eval(&self, s: f64) -> f64;

    /// Points where the monitor has a kink or jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `M(s) = max(1, K gamma / eps * exp(-gamma s / (mu eps)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinssMonitor {
    pub k_tilde: f64,
    pub eps: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl LinssMonitor {
    pub fn new(k_tilde: f64, eps: f64, gamma: f64, mu: f64) -> Result<Self> {
        for (name, v) in [("k_tilde", k_tilde), ("eps", eps), ("gamma", gamma), ("mu", mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(Self { k_tilde, eps, gamma, mu })
    }

    /// Where the exponential branch meets 1, if inside (0, 1).
    pub fn kink(&self) -> Option<f64> {
        let peak = self.k_tilde * self.gamma / self.eps;
        let s = self.mu * self.eps / self.gamma * peak.ln();
        (peak > 1.0 && s < 1.0).then_some(s)
    }
}

impl MonitorFn for LinssMonitor {
    fn eval(&self, s: f64) -> f64 {
        let layer = self.k_tilde * self.gamma / self.eps * (-self.gamma * s / (self.mu * self.eps)).exp();
        layer.max(1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.kink().into_iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMonitor(pub f64);

impl MonitorFn for ConstantMonitor {
    fn eval(&self, _s: f64) -> f64 {
        self.0
    }
}

/// Wraps a closure; `breakpoints` lists its kinks.
pub struct FnMonitor<F> {
    pub f: F,
    pub breakpoints: Vec<f64>,
}

impl<F: Fn(f64) -> f64> FnMonitor<F> {
    pub fn new(f: F) -> Self {
        Self { f, breakpoints: Vec::new() }
    }

    pub fn with_breakpoints(f: F, breakpoints: Vec<f64>) -> Self {
        Self { f, breakpoints }
    }
}

impl<F: Fn(f64) -> f64> MonitorFn for FnMonitor<F> {
    fn eval(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

/// Value `values[i]` on cell `[edges[i], edges[i+1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantMonitor {
    edges: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstantMonitor {
    pub fn new(mesh: &Mesh1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.cells() {
            return Err(Error::param(
                "values",
                format!("need one value per cell ({}), got {}", mesh.cells(), values.len()),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::param("values", format!("monitor must be positive, got {v}")));
        }
        Ok(Self { edges: mesh.nodes().to_vec(), values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Integral of the monitor over each cell of `mesh`.
    pub fn cell_masses(&self, mesh: &Mesh1D) -> Vec<f64> {
        let cum = |x: f64| self.antiderivative(x);
        mesh.nodes().windows(2).map(|w| cum(w[1]) - cum(w[0])).collect()
    }

    fn prefix(&self) -> Vec<f64> {
        let mut acc = vec![0.0];
        for (w, v) in self.edges.windows(2).zip(&self.values) {
            acc.push(acc.last().unwrap() + (w[1] - w[0]) * v);
        }
        acc
    }

    fn antiderivative(&self, x: f64) -> f64 {
        let k = match self.edges.partition_point(|e| *e <= x) {
            0 => return 0.0,
            k => (k - 1).min(self.values.len() - 1),
        };
        let before: f64 = self.edges.windows(2).zip(&self.values).take(k).map(|(w, v)| (w[1] - w[0]) * v).sum();
        before + (x - self.edges[k]) * self.values[k]
    }

    /// Exact inversion of the piecewise-linear cumulative mass.
    pub fn equidistribute(&self, n: usize) -> Result<Mesh1D> {
        if n < 2 {
            return Err(Error::param("N", format!("must be at least 2, got {n}")));
        }
        let prefix = self.prefix();
        let total = *prefix.last().unwrap();
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(0.0);
        let mut cell = 0;
        for k in 1..n {
            let target = total * k as f64 / n as f64;
            while cell + 1 < self.values.len() && prefix[cell + 1] < target {
                cell += 1;
            }
            let x = self.edges[cell] + (target - prefix[cell]) / self.values[cell];
            nodes.push(x.clamp(self.edges[cell], self.edges[cell + 1]));
        }
        nodes.push(1.0);
        Mesh1D::pinned(nodes)
    }
}

impl MonitorFn for PiecewiseConstantMonitor {
    fn eval(&self, s: f64) -> f64 {
        let k = self.edges.partition_point(|e| *e <= s).saturating_sub(1);
        self.values[k.min(self.values.len() - 1)]
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.edges[1..self.edges.len() - 1].to_vec()
    }
}

/// Nodes with equal monitor mass per cell, found by inverting the cumulative
/// integral of `monitor` with adaptive Gauss panels and Brent's method.
pub fn equidistribute_analytic<M: MonitorFn + ?Sized>(monitor: &M, n: usize) -> Result<Mesh1D> {
    if n < 2 {
        return Err(Error::param("N", format!("must be at least 2, got {n}")));
    }
    let mut bad = None;
    let mut f = |s: f64| {
        let v = monitor.eval(s);
        if !(v > 0.0 && v.is_finite()) && bad.is_none() {
            bad = Some((s, v));
        }
        v
    };
    let table = CumulativeIntegral::build(&mut f, 0.0, 1.0, &monitor.breakpoints(), AdaptiveTol::default());
    if let Some((s, v)) = bad {
        return Err(Error::QuadratureFailure(format!("monitor is {v} at s = {s}, expected positive")));
    }
    let table = table?;
    let total = table.total();

    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(0.0);
    let mut panel = 0;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while panel + 2 < table.edges.len() && table.cumulative[panel + 1] <= target {
            panel += 1;
        }
        let (a, b) = (table.edges[panel], table.edges[panel + 1]);
        let need = target - table.cumulative[panel];
        let g = |x: f64| gauss(&GAUSS5, |s| monitor.eval(s), a, x) - need;
        let x = if need <= 0.0 {
            a
        } else if g(b) <= 0.0 {
            b
        } else {
            brent(g, a, b, 1e-14, ROOT_MAX_ITER)?
        };
        nodes.push(x);
    }
    nodes.push(1.0);
    Mesh1D::pinned(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::bakhvalov_type;
    use crate::quadrature::adaptive;
    use approx::assert_relative_eq;

    #[test]
    fn constant_monitor_gives_uniform_mesh() {
        let m = equidistribute_analytic(&ConstantMonitor(3.0), 10).unwrap();
        for (i, x) in m.nodes().iter().enumerate() {
            assert_relative_eq!(*x, i as f64 / 10.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn two_level_monitor_closed_form() {
        // M = 2 on [0, 1/2), 1/2 on [1/2, 1]; total mass 5/4. The cumulative
        // mass is 2s below 1/2 and 1 + (s - 1/2)/2 above.
        let monitor = FnMonitor::with_breakpoints(|s: f64| if s < 0.5 { 2.0 } else { 0.5 }, vec![0.5]);
        let n = 5;
        let m = equidistribute_analytic(&monitor, n).unwrap();
        let inverse = |c: f64| if c <= 1.0 { c / 2.0 } else { 0.5 + 2.0 * (c - 1.0) };
        for (i, x) in m.nodes().iter().enumerate() {
            assert_relative_eq!(*x, inverse(1.25 * i as f64 / n as f64), epsilon = 1e-12);
        }
    }

    #[test]
    fn linss_monitor_cells_carry_equal_mass() {
        let monitor = LinssMonitor::new(1.0, 1e-3, 1.0, 2.0).unwrap();
        let m = equidistribute_analytic(&monitor, 64).unwrap();
        let masses: Vec<f64> = m
            .nodes()
            .windows(2)
            .map(|w| {
                let mut f = |s: f64| monitor.eval(s);
                let mut parts = vec![w[0]];
                parts.extend(monitor.breakpoints().into_iter().filter(|p| *p > w[0] && *p < w[1]));
                parts.push(w[1]);
                parts.windows(2).map(|p| adaptive(&mut f, p[0], p[1], AdaptiveTol::default()).0).sum()
            })
            .collect();
        let mean = masses.iter().sum::<f64>() / masses.len() as f64;
        for c in masses {
            assert!((c - mean).abs() <= 1e-8 * mean, "{c} vs {mean}");
        }
    }

    #[test]
    fn linss_fine_part_resembles_bakhvalov_type() {
        // Near 0 the monitor mass per cell is (mu K + 1)/N of a layer density
        // K gamma/eps, so h_1 ~ (mu + 1/K) eps/(gamma N) against 2 mu eps/(gamma N)
        // for the Bakhvalov-type mesh: a ratio of 3/4 for mu = 2, K = 1.
        for &(eps, n) in &[(1e-3, 64usize), (1e-6, 64), (1e-3, 256)] {
            let monitor = LinssMonitor::new(1.0, eps, 1.0, 2.0).unwrap();
            let eq = equidistribute_analytic(&monitor, n).unwrap();
            let bt = bakhvalov_type(eps, 1.0, 2.0, n).unwrap().mesh;
            assert_relative_eq!(eq.step(1) / bt.step(1), 0.75, max_relative = 0.02);
            let sigma = bt.nodes()[n / 2];
            let profile = step_profile(&bt);
            let worst = eq
                .nodes()
                .windows(2)
                .filter(|w| w[1] <= sigma)
                .map(|w| ((w[1] - w[0]) / profile(0.5 * (w[0] + w[1])) - 1.0).abs())
                .fold(0.0, f64::max);
            assert!(worst < 0.3, "eps={eps} N={n}: worst relative step deviation {worst}");
        }
    }

    /// Step size of `mesh` as a function of position, log-interpolated
    /// between cell midpoints.
    fn step_profile(mesh: &Mesh1D) -> impl Fn(f64) -> f64 + '_ {
        move |x: f64| {
            let mids: Vec<(f64, f64)> =
                mesh.nodes().windows(2).map(|w| (0.5 * (w[0] + w[1]), (w[1] - w[0]).ln())).collect();
            let k = mids.partition_point(|m| m.0 <= x);
            if k == 0 {
                return mids[0].1.exp();
            }
            if k == mids.len() {
                return mids[k - 1].1.exp();
            }
            let ((x0, y0), (x1, y1)) = (mids[k - 1], mids[k]);
            (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).exp()
        }
    }

    #[test]
    fn piecewise_constant_inversion_is_exact() {
        let mesh = Mesh1D::new(vec![0.0, 0.5, 1.0]).unwrap();
        let pc = PiecewiseConstantMonitor::new(&mesh, vec![3.0, 1.0]).unwrap();
        let m = pc.equidistribute(2).unwrap();
        // mass 1.5 + 0.5 = 2, half of it is reached at s = 1/3
        assert_relative_eq!(m.nodes()[1], 1.0 / 3.0, epsilon = 1e-15);
        for c in pc.cell_masses(&m) {
            assert_relative_eq!(c, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rejects_non_positive_monitor() {
        let bad = FnMonitor::new(|s: f64| s - 0.5);
        assert!(equidistribute_analytic(&bad, 4).is_err());
    }
}
