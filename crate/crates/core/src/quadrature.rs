//! Gauss–Legendre rules and a bisection-adaptive integrator built on them.

use crate::error::{Error, Result};

/// 3-point Gauss–Legendre nodes and weights on [-1, 1].
pub const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
    (0.0, 0.888_888_888_888_888_9),
    (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
];

/// 5-point Gauss–Legendre nodes and weights on [-1, 1].
pub const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Applies a Gauss rule given on [-1, 1] to `[a, b]`.
#[inline]
pub fn gauss<F: FnMut(f64) -> f64>(rule: &[(f64, f64)], mut f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.iter().map(|&(t, w)| w * f(mid + half * t)).sum::<f64>() * half
}

/// Tolerances for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveTol {
    pub rtol: f64,
    pub atol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveTol {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-300, max_depth: 48 }
    }
}

/// Integrates `f` over `[a, b]` with the 5-point rule, bisecting panels until
/// the one-level refinement agrees with the coarse value.
///
/// Returns the integral and whether every panel met the tolerance before the
/// depth limit. A feature much narrower than `b - a` that falls between the
/// Gauss nodes of both halves goes unseen; split the interval near it.
pub fn adaptive<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: AdaptiveTol) -> (f64, bool) {
    let whole = gauss(&GAUSS5, &mut *f, a, b);
    recurse(f, a, b, whole, tol, 0)
}

fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: AdaptiveTol,
    depth: u32,
) -> (f64, bool) {
    let m = 0.5 * (a + b);
    let left = gauss(&GAUSS5, &mut *f, a, m);
    let right = gauss(&GAUSS5, &mut *f, m, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol.rtol * refined.abs() + tol.atol {
        return (refined, true);
    }
    if depth >= tol.max_depth || m <= a || m >= b {
        return (refined, false);
    }
    let (l, lok) = recurse(f, a, m, left, tol, depth + 1);
    let (r, rok) = recurse(f, m, b, right, tol, depth + 1);
    (l + r, lok && rok)
}

/// A partition of an interval into panels with cumulative integrals, used to
/// invert the antiderivative of a positive density.
#[derive(Debug, Clone)]
pub struct CumulativeIntegral {
    /// Panel endpoints, strictly increasing.
    pub edges: Vec<f64>,
    /// `cumulative[k]` is the integral from `edges[0]` to `edges[k]`.
    pub cumulative: Vec<f64>,
}

impl CumulativeIntegral {
    /// Builds the panel table over `[a, b]`. `breakpoints` (kinks of the
    /// integrand) are always panel edges.
    pub fn build<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        breakpoints: &[f64],
        tol: AdaptiveTol,
    ) -> Result<Self> {
        let mut outer: Vec<f64> = std::iter::once(a)
            .chain(breakpoints.iter().copied().filter(|&p| p > a && p < b))
            .chain(std::iter::once(b))
            .collect();
        outer.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        outer.dedup();

        let mut edges = vec![a];
        let mut cumulative = vec![0.0];
        for w in outer.windows(2) {
            let whole = gauss(&GAUSS5, &mut *f, w[0], w[1]);
            collect_panels(f, w[0], w[1], whole, tol, 0, &mut edges, &mut cumulative)?;
        }
        let total = *cumulative.last().unwrap();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::QuadratureFailure(format!(
                "integral over [{a}, {b}] is {total}, expected a positive finite value"
            )));
        }
        Ok(Self { edges, cumulative })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }
}

#[allow(clippy::too_many_arguments)]
fn collect_panels<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: AdaptiveTol,
    depth: u32,
    edges: &mut Vec<f64>,
    cumulative: &mut Vec<f64>,
) -> Result<()> {
    let m = 0.5 * (a + b);
    let left = gauss(&GAUSS5, &mut *f, a, m);
    let right = gauss(&GAUSS5, &mut *f, m, b);
    if !(left.is_finite() && right.is_finite()) {
        return Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]")));
    }
    let refined = left + right;
    let converged = (refined - whole).abs() <= tol.rtol * refined.abs() + tol.atol;
    if converged || depth >= tol.max_depth || m <= a || m >= b {
        if !converged && depth >= tol.max_depth {
            return Err(Error::QuadratureFailure(format!(
                "depth limit reached on [{a}, {b}]"
            )));
        }
        let base = *cumulative.last().unwrap();
        edges.push(m);
        cumulative.push(base + left);
        edges.push(b);
        cumulative.push(base + refined);
        return Ok(());
    }
    collect_panels(f, a, m, left, tol, depth + 1, edges, cumulative)?;
    collect_panels(f, m, b, right, tol, depth + 1, edges, cumulative)
}
