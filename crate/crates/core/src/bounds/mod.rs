//! Accuracy and separation estimates.
//!
//! Everything here is plain round-to-nearest arithmetic unless a function
//! says otherwise: these numbers are reporting thresholds, not enclosures.
//! The `*_upper` / `*_lower` variants re-evaluate the ledger with outward
//! rounding for callers who want that extra margin.

mod ledger;
mod sink;

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::maps::{fixed_points, FixedPointInfo, MapModel, Stability};

pub use ledger::{
    delta_prime, delta_prime_general, delta_prime_lower, enclosure_defect, epsilon_prime, epsilon_prime_general,
    epsilon_prime_upper, eta_general, eta_henon, r_coefficient,
};
pub use sink::{
    annulus_radii, one_dim_bounds, separation_epsilon_bound, separation_eta, sigma_constants,
    sigma_contraction_bound, sigma_contraction_radius, sink_basin_radius, OneDimBounds, SigmaConstants,
};

/// Default ratio `M` in `delta < epsilon / M`.
pub const DEFAULT_M: f64 = 1000.0;

/// How the sink data enter the separation constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMode {
    /// Full double precision.
    Exact,
    /// Sink coordinates rounded to 3 decimals and eigenvalues to the nearest
    /// 0.005, the precision at which published tables quote them.
    Rounded,
}

fn round_to(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

fn round_c(z: Complex64, step: f64) -> Complex64 {
    Complex64::new(round_to(z.re, step), round_to(z.im, step))
}

/// Sink separation constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinkSection {
    pub mode: String,
    /// Sink coordinates as `(re, im)` pairs.
    pub p: Vec<(f64, f64)>,
    pub p_norm: f64,
    pub lambda1: (f64, f64),
    /// Absent for one-dimensional maps.
    pub lambda2: Option<(f64, f64)>,
    pub lambda: f64,
    pub c: f64,
    pub d: f64,
    pub tau: f64,
    pub r_p: f64,
    pub eta: f64,
    pub kappa: f64,
    pub epsilon_star: f64,
    pub m: f64,
}

/// Separation constants from explicit sink data.
///
/// Two eigenvalues give the Hénon constants; one gives the one-dimensional
/// variant, where `C = D = tau = 1`.
pub fn sink_section_from(
    p: &[Complex64],
    eigenvalues: &[Complex64],
    p_norm: f64,
    a_mod: f64,
    m: f64,
    mode: &str,
) -> Result<SinkSection> {
    let pairs = p.iter().map(|z| (z.re, z.im)).collect();
    let l1 = eigenvalues[0];
    if eigenvalues.len() == 1 {
        let lambda = l1.norm();
        let b = one_dim_bounds(lambda, p_norm, m)?;
        return Ok(SinkSection {
            mode: mode.to_string(),
            p: pairs,
            p_norm,
            lambda1: (l1.re, l1.im),
            lambda2: None,
            lambda,
            c: 1.0,
            d: 1.0,
            tau: 1.0,
            r_p: b.basin_radius,
            eta: b.eta,
            kappa: b.kappa,
            epsilon_star: b.epsilon_star,
            m,
        });
    }
    let l2 = eigenvalues[1];
    let s = sigma_constants(l1, l2, a_mod)?;
    let (kappa, epsilon_star) = separation_epsilon_bound(s.lambda, s.tau, p_norm, a_mod, m)?;
    Ok(SinkSection {
        mode: mode.to_string(),
        p: pairs,
        p_norm,
        lambda1: (l1.re, l1.im),
        lambda2: Some((l2.re, l2.im)),
        lambda: s.lambda,
        c: s.c,
        d: s.d,
        tau: s.tau,
        r_p: sink_basin_radius(s.lambda, s.tau),
        eta: separation_eta(s.lambda, s.tau),
        kappa,
        epsilon_star,
        m,
    })
}

/// Separation constants at a sink fixed point of `map`.
pub fn sink_section(map: &MapModel, sink: &FixedPointInfo, mode: EigenMode, m: f64) -> Result<SinkSection> {
    let ncoords = map.layout().ncoords().min(if map.kind().is_henon() { 2 } else { 1 });
    let mut p: Vec<Complex64> = sink.location[..ncoords].to_vec();
    let mut ev = sink.eigenvalues.clone();
    if mode == EigenMode::Rounded {
        p = p.into_iter().map(|z| round_c(z, 1e-3)).collect();
        ev = ev.into_iter().map(|z| round_c(z, 0.005)).collect();
    }
    let p_norm = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let label = match mode {
        EigenMode::Exact => "exact",
        EigenMode::Rounded => "rounded",
    };
    sink_section_from(&p, &ev, p_norm, map.jacobian_a_mod(), m, label)
}

/// Exact and rounded sections for every sink fixed point of `map`.
pub fn sink_sections(map: &MapModel, m: f64) -> Vec<SinkSection> {
    let mut out = Vec::new();
    for fp in fixed_points(map).iter().filter(|f| f.classification == Stability::Sink) {
        for mode in [EigenMode::Exact, EigenMode::Rounded] {
            if let Ok(s) = sink_section(map, fp, mode, m) {
                out.push(s);
            }
        }
    }
    out
}

/// The `(epsilon', delta')` ledger for one model, plus optional sink constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub epsilon: f64,
    pub delta: f64,
    pub r_prime: f64,
    pub a_mod: f64,
    pub r_coeff: f64,
    pub epsilon_prime: f64,
    pub delta_prime: f64,
    pub delta0_prime: f64,
    /// Whether `epsilon'` and `delta'` were evaluated with outward rounding.
    pub conservative: bool,
    pub sinks: Vec<SinkSection>,
}

/// Ledger for an `(epsilon, delta)` model of `map`.
pub fn bounds_report(map: &MapModel, epsilon: f64, delta: f64, conservative: bool) -> BoundsReport {
    let rp = map.rprime();
    let a_mod = map.jacobian_a_mod();
    let taylor = map.taylor_bounds(rp);
    let d0 = map.delta0_prime();
    let (ep, dp) = if conservative {
        (epsilon_prime_upper(epsilon, delta, &taylor, a_mod), delta_prime_lower(delta, &taylor, a_mod, d0))
    } else {
        (epsilon_prime_general(epsilon, delta, &taylor, a_mod), delta_prime_general(delta, &taylor, a_mod, d0))
    };
    BoundsReport {
        epsilon,
        delta,
        r_prime: rp,
        a_mod,
        r_coeff: r_coefficient(epsilon, &taylor, a_mod),
        epsilon_prime: ep,
        delta_prime: dp,
        delta0_prime: d0,
        conservative,
        sinks: Vec::new(),
    }
}

impl BoundsReport {
    /// Flat `key = value` block.
    pub fn to_kv_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k:<16} = {v}");
        };
        kv("epsilon", fmt_g(self.epsilon));
        kv("delta", fmt_g(self.delta));
        kv("R'", fmt_g(self.r_prime));
        kv("|a|", fmt_g(self.a_mod));
        kv("r", fmt_g(self.r_coeff));
        kv("epsilon'", fmt_g(self.epsilon_prime));
        kv("delta'", fmt_g(self.delta_prime));
        kv("delta0'", fmt_g(self.delta0_prime));
        kv("conservative", self.conservative.to_string());
        for sink in &self.sinks {
            let _ = write!(s, "{}", sink.to_kv_text());
        }
        s
    }
}

impl SinkSection {
    pub fn to_kv_text(&self) -> String {
        let mut s = String::new();
        let pre = format!("sink[{}].", self.mode);
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{:<16} = {v}", format!("{pre}{k}"));
        };
        let pt: Vec<String> = self.p.iter().map(|&(re, im)| fmt_c(re, im)).collect();
        kv("p", format!("({})", pt.join(", ")));
        kv("|p|", fmt_g(self.p_norm));
        kv("lambda1", fmt_c(self.lambda1.0, self.lambda1.1));
        if let Some((re, im)) = self.lambda2 {
            kv("lambda2", fmt_c(re, im));
        }
        kv("lambda", fmt_g(self.lambda));
        kv("C", fmt_g(self.c));
        kv("D", fmt_g(self.d));
        kv("tau", fmt_g(self.tau));
        kv("tau(1-lambda)", fmt_g(self.r_p));
        kv("kappa", fmt_g(self.kappa));
        kv("eta", fmt_g(self.eta));
        kv("epsilon*", fmt_g(self.epsilon_star));
        kv("M", fmt_g(self.m));
        s
    }
}

/// Eight significant digits.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        let digits = if x == 0.0 { 0 } else { (7 - x.abs().log10().floor() as i32).max(0) as usize };
        format!("{x:.digits$}")
    } else {
        format!("{x:.7e}")
    }
}

fn fmt_c(re: f64, im: f64) -> String {
    if im == 0.0 {
        fmt_g(re)
    } else {
        format!("{}{}{}i", fmt_g(re), if im < 0.0 { "-" } else { "+" }, fmt_g(im.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::MapKind;

    #[test]
    fn rounded_mode_gives_published_inputs() {
        let m = MapModel::new(MapKind::HenonComplex, Some("0.3"), "-1.17", Some(2.01)).unwrap();
        let secs = sink_sections(&m, DEFAULT_M);
        let r = secs.iter().find(|s| s.mode == "rounded").unwrap();
        assert_eq!(r.p, vec![(-0.612, 0.0), (-0.612, 0.0)]);
        assert_eq!(r.lambda1, (-0.885, 0.0));
        assert_eq!(r.lambda2, Some((-0.34, 0.0)));
        let e = secs.iter().find(|s| s.mode == "exact").unwrap();
        assert!((e.tau - 0.029973).abs() < 5e-6, "{}", e.tau);
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_g(0.029871571), "0.029871571");
        assert_eq!(fmt_g(3.880793e-5), "3.8807930e-5");
        assert_eq!(fmt_g(2.5448759), "2.5448759");
    }

    #[test]
    fn report_invariants() {
        let m = MapModel::new(MapKind::HenonComplex, Some("0.15"), "-1.1875", Some(1.9)).unwrap();
        let r = bounds_report(&m, 0.0594, 2.97e-5, false);
        assert!(r.epsilon < r.epsilon_prime && r.delta_prime < r.delta);
        let c = bounds_report(&m, 0.0594, 2.97e-5, true);
        assert!(c.epsilon_prime >= r.epsilon_prime && c.delta_prime <= r.delta_prime);
    }
}
