//! Sidorov's smoothest-ratio meshes and Emelyanov's composite mesh.
//!
//! The discrete problem `sum_i (h_{i+1}/h_i - 1)^2 -> min` subject to
//! `h_1 = A`, `h_N = B`, `sum h_i = 1` is solved by Newton's method on the
//! interior steps. The linear constraint is kept exactly by solving the KKT
//! system of each Newton step; the Hessian is tridiagonal, and a diagonal
//! shift is added whenever it is not positive definite.

use super::transition::transition_sigma_bakhvalov;
use super::Mesh1D;
use crate::roots::find_root;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SidorovMesh {
    pub mesh: Mesh1D,
    /// Value of `sum (h_{i+1}/h_i - 1)^2` at the minimizer.
    pub functional: f64,
    /// `max_i |h_i - h_{i-1}| * N^2`.
    pub smoothness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmelyanovMesh {
    pub mesh: Mesh1D,
    pub sigma: f64,
    pub fine_smoothness: f64,
    /// `max |h_i - h_{i-1}| * N^2` over the coarse part.
    pub coarse_smoothness: f64,
    pub coarse_max_step: f64,
}

/// `sum_{i=1}^{N-1} (h_{i+1}/h_i - 1)^2`.
pub fn sidorov_functional(steps: &[f64]) -> f64 {
    steps.windows(2).map(|w| (w[1] / w[0] - 1.0).powi(2)).sum()
}

fn smoothness(steps: &[f64], n: usize) -> f64 {
    let nn = (n * n) as f64;
    steps.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max) * nn
}

/// Minimizes the Sidorov functional over step vectors with `h_1 = a`,
/// `h_N = b` and unit sum.
pub fn sidorov(n: usize, a: f64, b: f64) -> Result<SidorovMesh> {
    let steps = sidorov_steps(n, a, b)?;
    let mut nodes = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    nodes.push(x);
    for h in &steps {
        x += h;
        nodes.push(x);
    }
    let mesh = Mesh1D::pinned(nodes)?;
    let s = mesh.steps();
    Ok(SidorovMesh { functional: sidorov_functional(&s), smoothness: smoothness(&s, n), mesh })
}

fn sidorov_steps(n: usize, a: f64, b: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::param("N", format!("must be at least 2, got {n}")));
    }
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::Infeasible(format!("end steps must be positive, got A={a} B={b}")));
    }
    let rest = 1.0 - a - b;
    if n == 2 {
        if rest.abs() > 1e-12 {
            return Err(Error::Infeasible(format!("two cells need A + B = 1, got {}", a + b)));
        }
        return Ok(vec![a, b]);
    }
    if rest <= 0.0 {
        return Err(Error::Infeasible(format!("A + B = {} leaves no room for {} inner steps", a + b, n - 2)));
    }

    // geometric progression from a to b, interior rescaled onto the constraint
    let ratio = (b / a).powf(1.0 / (n - 1) as f64);
    let mut h: Vec<f64> = (0..n).map(|i| a * ratio.powi(i as i32)).collect();
    h[n - 1] = b;
    let inner: f64 = h[1..n - 1].iter().sum();
    for v in &mut h[1..n - 1] {
        *v *= rest / inner;
    }

    let m = n - 2;
    let mut grad = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut f = sidorov_functional(&h);
    for _ in 0..500 {
        derivatives(&h, &mut grad, &mut diag, &mut off);
        let g = &grad[1..n - 1];
        let scale = h[1..n - 1].iter().fold(0.0f64, |acc, v| acc.max(*v));
        let mean_g = g.iter().sum::<f64>() / m as f64;
        let proj = g.iter().map(|v| (v - mean_g).abs()).fold(0.0, f64::max);
        if proj * scale <= 1e-15 * (1.0 + f) {
            break;
        }
        let d = &diag[1..n - 1];
        let e = &off[1..n - 2];
        let mut shift = 0.0;
        let dir = loop {
            if let Some(p) = kkt_direction(d, e, g, shift) {
                break p;
            }
            shift = if shift == 0.0 { 1e-10 * d.iter().fold(0.0f64, |a, v| a.max(v.abs())) } else { 4.0 * shift };
        };
        let slope: f64 = dir.iter().zip(g).map(|(p, gi)| p * gi).sum();
        if slope >= 0.0 {
            break;
        }
        let mut step = 1.0;
        let mut accepted = false;
        let mut trial = h.clone();
        for _ in 0..60 {
            for k in 0..m {
                trial[k + 1] = h[k + 1] + step * dir[k];
            }
            if trial[1..n - 1].iter().all(|v| *v > 0.0) {
                let ft = sidorov_functional(&trial);
                if ft <= f + 1e-4 * step * slope {
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        let moved = dir.iter().fold(0.0f64, |acc, p| acc.max((step * p).abs()));
        std::mem::swap(&mut h, &mut trial);
        f = sidorov_functional(&h);
        if moved <= 1e-15 * scale {
            break;
        }
    }
    Ok(h)
}

/// Gradient and tridiagonal Hessian of the functional with respect to all
/// steps. `off[i]` couples `h[i]` and `h[i+1]`.
fn derivatives(h: &[f64], grad: &mut [f64], diag: &mut [f64], off: &mut [f64]) {
    grad.iter_mut().for_each(|v| *v = 0.0);
    diag.iter_mut().for_each(|v| *v = 0.0);
    off.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..h.len() - 1 {
        let (lo, hi) = (h[i], h[i + 1]);
        let r = hi / lo - 1.0;
        grad[i + 1] += 2.0 * r / lo;
        grad[i] -= 2.0 * r * hi / (lo * lo);
        diag[i + 1] += 2.0 / (lo * lo);
        diag[i] += 2.0 * hi * hi / lo.powi(4) + 4.0 * r * hi / lo.powi(3);
        off[i] += -2.0 * hi / lo.powi(3) - 2.0 * r / (lo * lo);
    }
}

/// Newton step on the constraint plane `sum p = 0`, or `None` when the
/// shifted Hessian is not positive definite.
fn kkt_direction(diag: &[f64], off: &[f64], g: &[f64], shift: f64) -> Option<Vec<f64>> {
    let m = diag.len();
    let ones = vec![1.0; m];
    let y1 = spd_tridiagonal_solve(diag, off, g, shift)?;
    let y2 = spd_tridiagonal_solve(diag, off, &ones, shift)?;
    let s1: f64 = y1.iter().sum();
    let s2: f64 = y2.iter().sum();
    let lambda = -s1 / s2;
    Some(y1.iter().zip(&y2).map(|(a, b)| -(a + lambda * b)).collect())
}

fn spd_tridiagonal_solve(diag: &[f64], off: &[f64], rhs: &[f64], shift: f64) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut piv = diag[0] + shift;
    if !(piv > 0.0) {
        return None;
    }
    c[0] = if m > 1 { off[0] / piv } else { 0.0 };
    d[0] = rhs[0] / piv;
    for i in 1..m {
        piv = diag[i] + shift - off[i - 1] * c[i - 1];
        if !(piv > 0.0) {
            return None;
        }
        c[i] = if i + 1 < m { off[i] / piv } else { 0.0 };
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// End steps `(A, A r^{m-1})` of the geometric progression of `m` steps
/// starting at `A` with unit sum; uniform when `A m >= 1`.
fn geometric_ends(a: f64, m: usize) -> Result<[f64; 2]> {
    let mf = m as f64;
    if a * mf >= 1.0 {
        return Ok([1.0 / mf; 2]);
    }
    if m == 2 {
        return Ok([a, 1.0 - a]);
    }
    let sum = |r: f64| if r == 1.0 { mf } else { (mf * r.ln()).exp_m1() / (r - 1.0) };
    let r = find_root(|r| a * sum(r) - 1.0, 1.0, a.powf(-1.0 / (mf - 1.0)))?;
    Ok([a, a * r.powi(m as i32 - 1)])
}

/// Emelyanov's composite mesh: a Sidorov mesh with N/2 cells on the layer
/// interval `[0, sigma*]`, a smoothly graded Sidorov mesh with N/2 cells on
/// `[sigma*, 1]` whose steps rise from `(1-sigma*)/N` to `3(1-sigma*)/N`.
///
/// The fine part starts with the first Bakhvalov-type step; its last step is
/// the one a geometric progression with that start would end on. When
/// `sigma*` is clamped to 1/2 both parts use equal end steps and the mesh is
/// uniform.
pub fn emelyanov_composite(eps: f64, gamma: f64, mu: f64, n: usize) -> Result<EmelyanovMesh> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::param("N", format!("need even N >= 4, got {n}")));
    }
    let sigma = transition_sigma_bakhvalov(eps, gamma, mu)?;
    let half = n / 2;
    let nf = n as f64;
    let (fine_ends, coarse_ends) = if sigma >= 0.5 {
        ([1.0 / half as f64; 2], [1.0 / half as f64; 2])
    } else {
        let scale = mu * eps / gamma;
        let first = -scale * (-2.0 * (1.0 - eps) / nf).ln_1p() / sigma;
        (geometric_ends(first, half)?, [1.0 / nf, 3.0 / nf])
    };
    let fine = sidorov(half, fine_ends[0], fine_ends[1])?;
    let coarse = sidorov(half, coarse_ends[0], coarse_ends[1])?;

    let mut nodes: Vec<f64> = fine.mesh.nodes().iter().map(|x| sigma * x).collect();
    nodes.extend(coarse.mesh.nodes()[1..].iter().map(|x| sigma + (1.0 - sigma) * x));
    let mesh = Mesh1D::pinned(nodes)?;
    let steps = mesh.steps();
    let coarse_steps = &steps[half..];
    Ok(EmelyanovMesh {
        sigma,
        fine_smoothness: smoothness(&steps[..half], n),
        coarse_smoothness: smoothness(coarse_steps, n),
        coarse_max_step: coarse_steps.iter().fold(0.0, |a: f64, v| a.max(*v)),
        mesh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn equal_ends_give_uniform_mesh() {
        for &n in &[2usize, 5, 16] {
            let s = sidorov(n, 1.0 / n as f64, 1.0 / n as f64).unwrap();
            assert!(s.functional < 1e-24);
            for h in s.mesh.steps() {
                assert_relative_eq!(h, 1.0 / n as f64, max_relative = 1e-12);
            }
        }
    }

    /// The constraints leave one free step for N = 4: `h_3 = 1 - A - B - h_2`.
    /// Dense grid on `h_2`, refined around the best point.
    fn brute_force_n4(a: f64, b: f64) -> (f64, f64) {
        let rest = 1.0 - a - b;
        let f = |h2: f64| sidorov_functional(&[a, h2, rest - h2, b]);
        let (mut lo, mut hi) = (1e-9, rest - 1e-9);
        let mut best = lo;
        for _ in 0..8 {
            let k = 2000;
            let dx = (hi - lo) / k as f64;
            best = (0..=k)
                .map(|j| lo + j as f64 * dx)
                .min_by(|x, y| f(*x).partial_cmp(&f(*y)).unwrap())
                .unwrap();
            lo = (best - 2.0 * dx).max(1e-12);
            hi = (best + 2.0 * dx).min(rest - 1e-12);
        }
        (best, rest - best)
    }

    #[test]
    fn n4_matches_brute_force() {
        let (a, b) = (0.1, 0.4);
        let s = sidorov(4, a, b).unwrap();
        let h = s.mesh.steps();
        let (h2, h3) = brute_force_n4(a, b);
        assert_relative_eq!(h[0], a, max_relative = 1e-12);
        assert_relative_eq!(h[3], b, max_relative = 1e-12);
        assert!((h[1] - h2).abs() < 1e-6, "{} vs {h2}", h[1]);
        assert!((h[2] - h3).abs() < 1e-6, "{} vs {h3}", h[2]);
    }

    #[test]
    fn step_differences_are_second_order() {
        let c: Vec<f64> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| {
                let nf = n as f64;
                sidorov(n, 1.0 / (2.0 * nf), 2.0 / nf).unwrap().smoothness
            })
            .collect();
        let (lo, hi) = c.iter().fold((f64::MAX, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
        assert!(hi / lo < 2.0, "{c:?}");
    }

    #[test]
    fn infeasible_ends() {
        assert!(matches!(sidorov(4, 0.6, 0.5), Err(Error::Infeasible(_))));
        assert!(matches!(sidorov(2, 0.3, 0.3), Err(Error::Infeasible(_))));
        assert!(matches!(sidorov(5, -0.1, 0.3), Err(Error::Infeasible(_))));
    }

    #[test]
    fn composite_large_eps_is_uniform() {
        let m = emelyanov_composite(0.3, 1.0, 2.0, 16).unwrap();
        for h in m.mesh.steps() {
            assert_relative_eq!(h, 1.0 / 16.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn composite_with_two_fine_cells() {
        for &eps in &[1e-2, 2e-5, 2e-8] {
            let m = emelyanov_composite(eps, 1.0, 2.0, 4).unwrap();
            assert_eq!(m.mesh.cells(), 4);
            assert!((m.mesh.nodes()[2] - m.sigma).abs() <= 1e-12 * m.sigma.max(1e-300) + 1e-15);
        }
    }

    #[test]
    fn composite_fine_part_is_graded() {
        for &eps in &[1e-4, 1e-8] {
            let m = emelyanov_composite(eps, 1.0, 2.0, 64).unwrap();
            let h = m.mesh.steps();
            let ratios: Vec<f64> = h[..32].windows(2).map(|w| w[1] / w[0]).collect();
            assert!(ratios.iter().all(|r| *r > 1.0), "{ratios:?}");
            let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, g), v| (l.min(*v), g.max(*v)));
            assert!(hi - lo < 1e-6, "{lo} {hi}");
        }
    }

    #[test]
    fn composite_coarse_part() {
        let mut c = Vec::new();
        for &n in &[64usize, 128, 256] {
            let m = emelyanov_composite(1e-6, 1.0, 2.0, n).unwrap();
            assert!(m.coarse_max_step <= 4.0 / n as f64, "N={n}: {}", m.coarse_max_step);
            c.push(m.coarse_smoothness);
        }
        let (lo, hi) = c.iter().fold((f64::MAX, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
        assert!(hi / lo < 2.0, "{c:?}");
    }
}
