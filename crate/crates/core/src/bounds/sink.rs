use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm-equivalence constants of the eigenbasis norm at a sink.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaConstants {
    pub c: f64,
    pub d: f64,
    pub tau: f64,
    /// `max(|lambda1|, |lambda2|)`.
    pub lambda: f64,
}

/// `C = |l1 - l2| / sqrt(2 + |l1| + |l2|)`, `D = sqrt(2 + |a| + lambda^2)`, `tau = C^2 / D^2`.
pub fn sigma_constants(lambda1: Complex64, lambda2: Complex64, a_mod: f64) -> Result<SigmaConstants> {
    if lambda1 == lambda2 {
        return Err(Error::domain("equal eigenvalues: the eigenbasis norm is undefined"));
    }
    let (m1, m2) = (lambda1.norm(), lambda2.norm());
    let lambda = m1.max(m2);
    let c = (lambda1 - lambda2).norm() / (2.0 + m1 + m2).sqrt();
    let d = (2.0 + a_mod + lambda * lambda).sqrt();
    Ok(SigmaConstants { c, d, tau: (c * c) / (d * d), lambda })
}

/// `r_p = tau (1 - lambda)`: the Euclidean ball of this radius about the sink lies in its basin.
pub fn sink_basin_radius(lambda: f64, tau: f64) -> f64 {
    tau * (1.0 - lambda)
}

/// `s_p = (1 - lambda) C / D^2`, the sigma-radius below which the contraction bound is `< r`.
pub fn sigma_contraction_radius(lambda: f64, c: f64, d: f64) -> f64 {
    (1.0 - lambda) * c / (d * d)
}

/// `lambda r + r^2 D^2 / C`, bounding `|f(x) - p|_sigma` when `|x - p|_sigma = r`.
pub fn sigma_contraction_bound(r: f64, lambda: f64, c: f64, d: f64) -> f64 {
    lambda * r + r * r * d * d / c
}

/// Roots `r- <= r+` of `(D^2/C) r^2 - (1 - lambda) r + xi`.
pub fn annulus_radii(xi: f64, lambda: f64, c: f64, d: f64) -> Result<(f64, f64)> {
    let one_minus = 1.0 - lambda;
    let bound = one_minus * one_minus * c / (4.0 * d * d);
    if !(xi > 0.0 && xi < bound) {
        return Err(Error::domain(format!("xi = {xi} must lie in (0, {bound})")));
    }
    let disc = (one_minus * one_minus - 4.0 * xi * d * d / c).sqrt();
    let r_plus = c / (2.0 * d * d) * (one_minus + disc);
    // Product of roots is xi C / D^2; avoids cancellation for small xi.
    let r_minus = xi * c / (d * d) / r_plus;
    Ok((r_minus, r_plus))
}

/// Supremal `eta = tau (1 - lambda)^2 / 4` for which the `eta`-chain recurrent set separates.
pub fn separation_eta(lambda: f64, tau: f64) -> f64 {
    tau * (1.0 - lambda) * (1.0 - lambda) / 4.0
}

/// `kappa = 1 + 1/M + max(1, (1 - lambda) sqrt(tau) + 2 |p| + |a|)` and
/// `eps* = (-kappa + sqrt(kappa^2 + tau (1 - lambda)^2)) / 2`.
pub fn separation_epsilon_bound(lambda: f64, tau: f64, p_norm: f64, a_mod: f64, m: f64) -> Result<(f64, f64)> {
    if !(m > 1.0) {
        return Err(Error::domain(format!("M must exceed 1, got {m}")));
    }
    let kappa = 1.0 + 1.0 / m + ((1.0 - lambda) * tau.sqrt() + 2.0 * p_norm + a_mod).max(1.0);
    Ok((kappa, positive_root(kappa, separation_eta(lambda, tau))))
}

/// `(-k + sqrt(k^2 + 4 eta)) / 2` without cancellation.
fn positive_root(kappa: f64, eta: f64) -> f64 {
    2.0 * eta / (kappa + (kappa * kappa + 4.0 * eta).sqrt())
}

/// One-dimensional bounds at an attracting fixed point of a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneDimBounds {
    pub kappa: f64,
    pub eta: f64,
    pub epsilon_star: f64,
    /// The disk of radius `1 - lambda` about the sink lies in its basin.
    pub basin_radius: f64,
}

/// `kappa = 1 + 1/M + (1 - lambda) + 2|p|`, `eta = (1 - lambda)^2 / 4`.
pub fn one_dim_bounds(lambda: f64, p_mod: f64, m: f64) -> Result<OneDimBounds> {
    if !(m > 1.0) {
        return Err(Error::domain(format!("M must exceed 1, got {m}")));
    }
    let kappa = 1.0 + 1.0 / m + (1.0 - lambda) + 2.0 * p_mod;
    let eta = separation_eta(lambda, 1.0);
    Ok(OneDimBounds { kappa, eta, epsilon_star: positive_root(kappa, eta), basin_radius: 1.0 - lambda })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symmetric_eigenvalues() {
        let s = sigma_constants(c(0.0, 1.0), c(0.0, -1.0), 1.0).unwrap();
        assert!((s.c - 1.0).abs() < 1e-15);
        assert!((s.d - 2.0).abs() < 1e-15);
        assert!((s.tau - 0.25).abs() < 1e-15);
    }

    #[test]
    fn equal_eigenvalues_rejected() {
        assert!(sigma_constants(c(0.5, 0.0), c(0.5, 0.0), 0.3).is_err());
    }

    #[test]
    fn eta_limits() {
        assert_eq!(separation_eta(0.0, 1.0), 0.25);
        assert_eq!(sink_basin_radius(0.0, 0.3), 0.3);
    }

    #[test]
    fn superattracting_origin() {
        let b = one_dim_bounds(0.0, 0.0, f64::INFINITY).unwrap();
        assert_eq!(b.kappa, 2.0);
        assert!((b.epsilon_star - 0.5 * (5f64.sqrt() - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn annulus_limits() {
        let (lam, cc, d) = (0.5, 0.7, 1.6);
        let (rm, rp) = annulus_radii(1e-14, lam, cc, d).unwrap();
        assert!(rm < 1e-13);
        assert!((rp - cc * (1.0 - lam) / (d * d)).abs() < 1e-12);
        let bound = (1.0 - lam) * (1.0 - lam) * cc / (4.0 * d * d);
        assert!(annulus_radii(bound, lam, cc, d).is_err());
        let (rm, rp) = annulus_radii(bound * (1.0 - 1e-12), lam, cc, d).unwrap();
        let mid = cc * (1.0 - lam) / (2.0 * d * d);
        assert!((rm - mid).abs() < 1e-6 && (rp - mid).abs() < 1e-6);
    }
}
