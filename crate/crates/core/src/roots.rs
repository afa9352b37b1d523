//! Bracketed scalar root finding.
//!
//! Brent's method: inverse quadratic / secant steps guarded by bisection, so
//! the bracket shrinks on every iteration and the method never leaves it.

use crate::error::{Error, Result};

/// Relative tolerance used by every mesh construction that needs a root.
pub const ROOT_RTOL: f64 = 1e-12;
/// Iteration cap shared by every mesh construction.
pub const ROOT_MAX_ITER: usize = 200;

/// Finds a root of `f` in `[a, b]`, requiring `f(a)` and `f(b)` of opposite
/// sign (or one of them zero).
pub fn brent<F>(mut f: F, a: f64, b: f64, rtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::RootNotBracketed { a, b });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rtol * b.abs().max(f64::MIN_POSITIVE);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::RootNotConverged { iterations: max_iter });
        }
    }
    Err(Error::RootNotConverged { iterations: max_iter })
}

/// [`brent`] with the crate-wide tolerance and iteration cap.
pub fn find_root<F>(f: F, a: f64, b: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    brent(f, a, b, ROOT_RTOL, ROOT_MAX_ITER)
}
