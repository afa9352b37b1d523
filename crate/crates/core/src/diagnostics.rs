//! Mesh measurements: local quasi-equidistance, Liu–Xu admissibility,
//! interpolation errors of the layer term and Gartland's region counts.

use serde::{Deserialize, Serialize};

use crate::mesh::io::fmt_f64;
use crate::mesh::Mesh1D;
use crate::quadrature::{adaptive, AdaptiveTol};

/// Summary of one mesh against a layer of width `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub eps: f64,
    /// Constant `S` of the sufficient admissibility condition.
    pub s: f64,
    pub quasi_constant: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub node_count: usize,
    pub cells: usize,
    pub admissibility_value: f64,
    pub con2_holds: bool,
    pub con2_margin: f64,
}

impl MeshReport {
    pub const CSV_HEADER: &'static str =
        "eps,S,quasi_constant,min_step,max_step,node_count,cells,admissibility_value,con2_holds,con2_margin";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.eps),
            fmt_f64(self.s),
            fmt_f64(self.quasi_constant),
            fmt_f64(self.min_step),
            fmt_f64(self.max_step),
            self.node_count,
            self.cells,
            fmt_f64(self.admissibility_value),
            self.con2_holds,
            fmt_f64(self.con2_margin),
        )
    }
}

pub fn mesh_report(mesh: &Mesh1D, eps: f64, s: f64) -> MeshReport {
    let con2 = liuxu_con2_check(mesh, eps, s);
    MeshReport {
        eps,
        s,
        quasi_constant: quasi_equidistance_constant(mesh),
        min_step: mesh.min_step(),
        max_step: mesh.max_step(),
        node_count: mesh.nodes().len(),
        cells: mesh.cells(),
        admissibility_value: liuxu_admissibility(mesh, eps),
        con2_holds: con2.holds,
        con2_margin: con2.margin,
    }
}

/// Smallest `K` with `h_i <= K h_j` for neighbouring cells.
pub fn quasi_equidistance_constant(mesh: &Mesh1D) -> f64 {
    mesh.steps()
        .windows(2)
        .map(|w| (w[1] / w[0]).max(w[0] / w[1]))
        .fold(1.0, f64::max)
}

/// `(h/eps)^3 exp(-2 x_left/eps)`, evaluated through its logarithm.
pub fn liuxu_term(h: f64, x_left: f64, eps: f64) -> f64 {
    (3.0 * (h / eps).ln() - 2.0 * x_left / eps).exp()
}

/// `N^2 sum_i (h_i/eps)^3 exp(-2 x_{i-1}/eps)`: the constant `C` for which the
/// mesh meets the Liu–Xu admissibility condition.
pub fn liuxu_admissibility(mesh: &Mesh1D, eps: f64) -> f64 {
    let n = mesh.cells() as f64;
    let sum: f64 = mesh.nodes().windows(2).map(|w| liuxu_term(w[1] - w[0], w[0], eps)).sum();
    n * n * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Con2 {
    pub holds: bool,
    /// Worst `h_i / bound_i` over the cells checked.
    pub margin: f64,
    /// Cells with `x_{i-1}` below the point where the layer term stops binding.
    pub fine_cells: usize,
}

/// Checks `h_i <= min(S eps/N e^{x_{i-1}/(2 eps)}, 1/N)` on the fine region,
/// the cells whose left end lies where the exponential term is the smaller
/// one. `N` is the mesh's cell count.
pub fn liuxu_con2_check(mesh: &Mesh1D, eps: f64, s: f64) -> Con2 {
    let n = mesh.cells() as f64;
    let switch = 2.0 * eps * (1.0 / (s * eps)).ln();
    let mut margin: f64 = 0.0;
    let mut fine_cells = 0;
    for w in mesh.nodes().windows(2).filter(|w| w[0] < switch) {
        let layer_bound = s * eps / n * (w[0] / (2.0 * eps)).exp();
        margin = margin.max((w[1] - w[0]) / layer_bound.min(1.0 / n));
        fine_cells += 1;
    }
    Con2 { holds: margin <= 1.0, margin, fine_cells }
}

/// The layer term whose interpolation error is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerFn {
    /// `E(x) = exp(-gamma x / eps)`.
    Exponential { gamma: f64, eps: f64 },
    /// `E(x) = value`; `eps` only enters the norm scaling.
    Constant { value: f64, eps: f64 },
}

impl LayerFn {
    pub fn exponential(gamma: f64, eps: f64) -> Self {
        LayerFn::Exponential { gamma, eps }
    }

    pub fn eps(&self) -> f64 {
        match *self {
            LayerFn::Exponential { eps, .. } | LayerFn::Constant { eps, .. } => eps,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            LayerFn::Exponential { gamma, eps } => (-gamma * x / eps).exp(),
            LayerFn::Constant { value, .. } => value,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            LayerFn::Exponential { gamma, eps } => -gamma / eps * (-gamma * x / eps).exp(),
            LayerFn::Constant { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpNorm {
    /// `eps^{1/2} |E - E^I|_1`.
    ScaledH1Semi,
    /// `eps^{-1/2} ||E - E^I||_0`.
    ScaledL2,
    /// `max |E - E^I|`.
    MaxNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationError {
    pub value: f64,
    /// Set when some cell's integral still changed by more than 1e-6
    /// relatively under bisection at the depth limit.
    pub quadrature_warning: bool,
}

/// Squared relative rounding level, `(1e-13)^2`.
const NOISE: f64 = 1e-26;

const CELL_TOL: AdaptiveTol = AdaptiveTol { rtol: 1e-10, atol: 0.0, max_depth: 30 };

/// `(int (E - E^I)^2, int (E' - (E^I)')^2)` over `[a, b]` by adaptive 5-point
/// Gauss quadrature, with a flag that is false when a panel hit the depth
/// limit with more than 1e-6 relative disagreement.
pub fn cell_error_integrals(layer: &LayerFn, a: f64, b: f64) -> (f64, f64, bool) {
    let (ea, eb) = (layer.value(a), layer.value(b));
    let slope = (eb - ea) / (b - a);
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    let mut ok = true;
    let edges = layer_panels(layer, a, b);
    // rounding floor of the integrands: E - E^I and E' - slope are computed
    // with absolute errors around ulp(E(a)) and ulp(max(|E'(a)|, |slope|))
    let (e_scale, d_scale) = (ea.abs().max(eb.abs()), layer.derivative(a).abs().max(slope.abs()));
    for w in edges.windows(2) {
        let width = w[1] - w[0];
        let (v, ok_l2) =
            integrate(&mut |x| (layer.value(x) - (ea + slope * (x - a))).powi(2), w[0], w[1], NOISE * e_scale * e_scale * width);
        let (d, ok_h1) =
            integrate(&mut |x| (layer.derivative(x) - slope).powi(2), w[0], w[1], NOISE * d_scale * d_scale * width);
        l2 += v;
        h1 += d;
        ok &= ok_l2 && ok_h1;
    }
    (l2, h1, ok)
}

/// Breakpoints `a + 2^m eps/gamma` inside `[a, b]`, so that a layer much
/// thinner than the cell is not stepped over by the Gauss nodes.
fn layer_panels(layer: &LayerFn, a: f64, b: f64) -> Vec<f64> {
    let mut edges = vec![a];
    if let LayerFn::Exponential { gamma, eps } = *layer {
        let mut d = eps / gamma;
        while a + d < b {
            edges.push(a + d);
            d *= 2.0;
        }
    }
    edges.push(b);
    edges
}

fn integrate<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, atol: f64) -> (f64, bool) {
    let tol = AdaptiveTol { atol, ..CELL_TOL };
    let (v, ok) = adaptive(f, a, b, tol);
    if ok {
        return (v, true);
    }
    let loose = AdaptiveTol { rtol: 1e-6, ..tol };
    let (_, loose_ok) = adaptive(f, a, b, loose);
    (v, loose_ok)
}

fn cell_max_error(layer: &LayerFn, a: f64, b: f64) -> f64 {
    match *layer {
        LayerFn::Constant { .. } => 0.0,
        LayerFn::Exponential { gamma, eps } => {
            let (ea, eb) = (layer.value(a), layer.value(b));
            let slope = (eb - ea) / (b - a);
            // E is convex, so E^I - E peaks where E' equals the chord slope
            let x = if slope < 0.0 { -(eps / gamma) * (-slope * eps / gamma).ln() } else { a };
            let x = x.clamp(a, b);
            (ea + slope * (x - a) - layer.value(x)).abs()
        }
    }
}

/// Scaled norm of `E - E^I`, `E^I` the piecewise-linear nodal interpolant.
pub fn interpolation_error_layer(mesh: &Mesh1D, layer: &LayerFn, norm: InterpNorm) -> InterpolationError {
    let eps = layer.eps();
    if norm == InterpNorm::MaxNorm {
        let value = mesh.nodes().windows(2).map(|w| cell_max_error(layer, w[0], w[1])).fold(0.0, f64::max);
        return InterpolationError { value, quadrature_warning: false };
    }
    let mut total = 0.0;
    let mut all_ok = true;
    for w in mesh.nodes().windows(2) {
        let (l2, h1, ok) = cell_error_integrals(layer, w[0], w[1]);
        total += if norm == InterpNorm::ScaledL2 { l2 } else { h1 };
        all_ok &= ok;
    }
    let value = match norm {
        InterpNorm::ScaledL2 => total.sqrt() / eps.sqrt(),
        _ => total.sqrt() * eps.sqrt(),
    };
    InterpolationError { value, quadrature_warning: !all_ok }
}

/// Node counts in `[0, x*]`, `(x*, x')` and `[x', 1]` with
/// `x* = K eps ln(K/H)`, `x' = K eps ln(K/eps)` and `K = 2/gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionCounts {
    pub inner: usize,
    pub transition: usize,
    pub outer: usize,
}

pub fn transition_points(eps: f64, gamma: f64, h: f64) -> (f64, f64) {
    let k = 2.0 / gamma;
    let inner = (k * eps * (k / h).ln()).clamp(0.0, 1.0);
    let outer = (k * eps * (k / eps).ln()).clamp(inner, 1.0);
    (inner, outer)
}

pub fn transition_region_counts(mesh: &Mesh1D, eps: f64, gamma: f64, h: f64) -> RegionCounts {
    let (xs, xp) = transition_points(eps, gamma, h);
    let x = mesh.nodes();
    let inner = x.iter().filter(|v| **v <= xs).count();
    let outer = x.iter().filter(|v| **v >= xp && **v > xs).count();
    RegionCounts { inner, transition: x.len() - inner - outer, outer }
}
