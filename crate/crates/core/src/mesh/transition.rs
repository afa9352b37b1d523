//! Transition points between the fine layer mesh and the coarse outer mesh.

use crate::error::{Error, Result};

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

/// Shishkin's transition point `min{1/2, mu (eps/gamma) ln N}`.
pub fn transition_sigma_shishkin(eps: f64, gamma: f64, mu: f64, n: usize) -> Result<f64> {
    positive("eps", eps)?;
    positive("gamma", gamma)?;
    positive("mu", mu)?;
    if n < 2 {
        return Err(Error::param("N", format!("must be at least 2, got {n}")));
    }
    Ok((mu * eps / gamma * (n as f64).ln()).min(0.5))
}

/// Bakhvalov-type transition point `min{1/2, mu (eps/gamma) ln(1/eps)}`.
pub fn transition_sigma_bakhvalov(eps: f64, gamma: f64, mu: f64) -> Result<f64> {
    positive("eps", eps)?;
    positive("gamma", gamma)?;
    positive("mu", mu)?;
    if eps >= 1.0 {
        return Err(Error::param("eps", format!("must be below 1 so that ln(1/eps) > 0, got {eps}")));
    }
    Ok((mu * eps / gamma * (1.0 / eps).ln()).min(0.5))
}

/// Van Veldhuizen's split point `2 eps (2 + (k+1) ln N)` for degree-`k`
/// elements, clamped to 1/2. `n` is real so that `N = e` is expressible.
pub fn transition_delta_veldhuizen(eps: f64, k: u32, n: f64) -> Result<f64> {
    positive("eps", eps)?;
    if k < 1 {
        return Err(Error::param("k", "polynomial degree must be at least 1"));
    }
    if !(n >= 2.0) {
        return Err(Error::param("N", format!("must be at least 2, got {n}")));
    }
    Ok((2.0 * eps * (2.0 + (k as f64 + 1.0) * n.ln())).min(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shishkin_examples() {
        assert_eq!(transition_sigma_shishkin(0.25, 1.0, 2.0, 4).unwrap(), 0.5);
        assert_relative_eq!(
            transition_sigma_shishkin(0.01, 1.0, 2.0, 16).unwrap(),
            0.055_451_774_444_795_6,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            transition_sigma_shishkin(0.01, 2.0, 1.0, 16).unwrap(),
            0.013_862_943_611_198_9,
            max_relative = 1e-14
        );
    }

    #[test]
    fn bakhvalov_examples() {
        assert_eq!(transition_sigma_bakhvalov(0.5, 1.0, 2.0).unwrap(), 0.5);
        let s2 = transition_sigma_bakhvalov(1e-3, 1.0, 2.0).unwrap();
        assert_relative_eq!(s2, 0.013_815_510_557_964_274, max_relative = 1e-14);
        let s1 = transition_sigma_bakhvalov(1e-3, 1.0, 1.0).unwrap();
        assert_relative_eq!(s1, 0.006_907_755_278_982_137, max_relative = 1e-14);
        assert_relative_eq!(s2, 2.0 * s1, max_relative = 1e-15);
    }

    #[test]
    fn veldhuizen_examples() {
        let d = transition_delta_veldhuizen(1e-3, 1, std::f64::consts::E).unwrap();
        assert_relative_eq!(d, 0.008, max_relative = 1e-14);
        assert_relative_eq!(
            transition_delta_veldhuizen(1e-3, 2, 32.0).unwrap(),
            0.024_794_415_416_798_36,
            max_relative = 1e-13
        );
        assert_eq!(transition_delta_veldhuizen(0.2, 3, 100.0).unwrap(), 0.5);
    }

    #[test]
    fn domain_errors() {
        assert!(transition_sigma_shishkin(0.0, 1.0, 2.0, 8).is_err());
        assert!(transition_sigma_shishkin(1e-3, -1.0, 2.0, 8).is_err());
        assert!(transition_sigma_shishkin(1e-3, 1.0, 2.0, 1).is_err());
        assert!(transition_sigma_bakhvalov(1.0, 1.0, 2.0).is_err());
        assert!(transition_sigma_bakhvalov(1.5, 1.0, 2.0).is_err());
        assert!(transition_delta_veldhuizen(-1.0, 1, 8.0).is_err());
    }
}
