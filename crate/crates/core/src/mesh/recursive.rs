//! Recursively graded meshes: Gartland, Gartland-type and Durán–Lombardi.
//!
//! The cell count follows from the grading parameters. The final partial step
//! is shortened so the mesh ends at 1, and merged into its neighbour when it is
//! shorter than half the step the recursion would have taken.

use super::Mesh1D;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GartlandVariant {
    /// `h_{i+1} = min(H, eps H e^{gamma x_i/(2 eps)}, e h_i)`.
    Gartland,
    /// Drops the `e h_i` growth cap.
    GartlandType,
}

/// Gartland's graded mesh: `x_1 = eps H`, then
/// `h_{i+1} = min(H, eps H exp(gamma x_i / (2 eps)) [, e h_i])`.
pub fn gartland(eps: f64, gamma: f64, h: f64, variant: GartlandVariant) -> Result<Mesh1D> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::param("H", format!("must lie in (0, 1), got {h}")));
    }
    if !(eps > 0.0 && eps * h < 1.0) {
        return Err(Error::param("eps", format!("need 0 < eps*H < 1, got eps={eps} H={h}")));
    }
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
    }
    let mut nodes = vec![0.0, eps * h];
    let mut prev = eps * h;
    loop {
        let x = *nodes.last().unwrap();
        let layer = eps * h * (gamma * x / (2.0 * eps)).exp();
        let mut step = h.min(layer);
        if variant == GartlandVariant::Gartland {
            step = step.min(std::f64::consts::E * prev);
        }
        if x + step >= 1.0 {
            close(&mut nodes, step);
            break;
        }
        nodes.push(x + step);
        prev = step;
    }
    Mesh1D::pinned(nodes)
}

/// Durán–Lombardi mesh: `x_i = i kappa H eps` for `i <= 1/(kappa H) + 1`, then
/// `x_{i+1} = x_i (1 + kappa H)` until the next node would reach 1.
pub fn duran_lombardi(eps: f64, h: f64, kappa: f64) -> Result<Mesh1D> {
    let kh = kappa * h;
    if !(kappa > 0.0 && h > 0.0 && kh < 1.0) {
        return Err(Error::param("kappa", format!("need kappa, H > 0 and kappa*H < 1, got {kh}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")));
    }
    let uniform_end = (1.0 / kh + 1e-12).floor() as usize + 1;
    let mut nodes = vec![0.0];
    for i in 1..=uniform_end {
        let x = i as f64 * kh * eps;
        if x >= 1.0 {
            close(&mut nodes, kh * eps);
            return Mesh1D::pinned(nodes);
        }
        nodes.push(x);
    }
    loop {
        let x = *nodes.last().unwrap();
        let step = kh * x;
        if x + step >= 1.0 {
            close(&mut nodes, step);
            break;
        }
        nodes.push(x + step);
    }
    Mesh1D::pinned(nodes)
}

/// Appends the end node 1; drops the previous node if the last interval is
/// shorter than half of `would_be`.
fn close(nodes: &mut Vec<f64>, would_be: f64) {
    let last = *nodes.last().unwrap();
    if 1.0 - last < 0.5 * would_be && nodes.len() > 2 {
        nodes.pop();
    }
    nodes.push(1.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gartland_first_steps() {
        let m = gartland(1e-2, 1.0, 0.25, GartlandVariant::Gartland).unwrap();
        assert_relative_eq!(m.step(1), 2.5e-3, max_relative = 1e-15);
        // middle term of the three-way minimum
        assert_relative_eq!(m.step(2), 2.832_871_132_667_066e-3, max_relative = 1e-13);
    }

    #[test]
    fn gartland_is_locally_quasi_equidistant() {
        for &eps in &[1e-2, 1e-4, 1e-8] {
            for &h in &[0.25, 0.1, 0.03] {
                let s = gartland(eps, 1.0, h, GartlandVariant::Gartland).unwrap().steps();
                for w in s.windows(2) {
                    assert!(w[1] <= std::f64::consts::E * w[0] * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn gartland_type_count_bound() {
        for &h in &[0.25f64, 0.1, 0.05, 0.02] {
            // the fine-zone recursion lags its continuous limit, and its last steps
            // overshoot ln(1/eps) in scaled coordinates at a rate that creeps up
            // very slowly as eps shrinks; two extra cells cover eps >= 1e-8
            let bound = (2.0 / h).ceil() as usize + (1.0 / h).ceil() as usize + 4;
            for &eps in &[1e-2, 1e-4, 1e-6, 1e-8] {
                let m = gartland(eps, 1.0, h, GartlandVariant::GartlandType).unwrap();
                assert!(m.cells() <= bound, "H={h} eps={eps}: {} > {bound}", m.cells());
            }
        }
    }

    #[test]
    fn gartland_type_counts_across_eps() {
        // Counts from running the recursion. At H = 0.1 the super-exponential
        // tail of the fine zone takes one extra step once 1/eps exceeds the
        // next iterate of y -> y + (H/2) e^y, so eps = 1e-8 differs by one.
        let counts = |h: f64| -> Vec<usize> {
            [1e-4, 1e-6, 1e-8]
                .iter()
                .map(|&e| gartland(e, 1.0, h, GartlandVariant::GartlandType).unwrap().cells())
                .collect()
        };
        assert_eq!(counts(0.1), vec![33, 33, 34]);
        assert_eq!(counts(0.25), vec![15, 15, 15]);
        assert_eq!(counts(0.02), vec![154, 154, 154]);
    }

    #[test]
    fn gartland_counts_grow_with_inverse_eps() {
        let c: Vec<usize> = [1e-2, 1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&e| gartland(e, 1.0, 0.1, GartlandVariant::Gartland).unwrap().cells())
            .collect();
        assert!(c.windows(2).all(|w| w[1] > w[0]), "{c:?}");
    }

    #[test]
    fn duran_lombardi_structure() {
        let (eps, h, kappa) = (1e-3, 0.1, 1.0);
        let m = duran_lombardi(eps, h, kappa).unwrap();
        assert_relative_eq!(m.step(1), kappa * h * eps, max_relative = 1e-14);
        let s = m.steps();
        // uniform zone is 11 cells; graded zone is geometric
        for w in s[12..s.len() - 2].windows(2) {
            assert_relative_eq!(w[1] / w[0], 1.0 + kappa * h, max_relative = 1e-9);
        }
    }

    #[test]
    fn duran_lombardi_count_is_logarithmic() {
        let m = duran_lombardi(1e-6, 0.1, 1.0).unwrap();
        let predicted = (1.0 / 0.1) * (1e6f64).ln();
        let ratio = m.cells() as f64 / predicted;
        assert!((0.5..=2.0).contains(&ratio), "M = {} vs {predicted}", m.cells());
    }

    #[test]
    fn last_interval_not_tiny() {
        for &eps in &[1e-2, 1e-5, 1e-7] {
            let m = duran_lombardi(eps, 0.05, 1.0).unwrap();
            let n = m.cells();
            assert!(m.step(n) >= 0.5 * 0.05 * m.nodes()[n - 1] * (1.0 - 1e-12));
        }
    }
}
