//! The (p,ν)-extended Beta function
//!
//! `B_{p,ν}(x, y) = √(2p/π) ∫₀¹ t^{x-3/2} (1-t)^{y-3/2} K_{ν+1/2}(p / (t(1-t))) dt`
//!
//! and Chaudhry's `B(x, y; p)`, which it reduces to at `ν = 0`.
//!
//! The integrand is evaluated as one fused log-domain exponential times the
//! scaled Bessel kernel; samples whose exponent falls below
//! `-endpoint_cutoff` are taken as zero.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_k_scaled, BesselOrder};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit_interval, integrate_unit_interval_family, QuadratureConfig};
use crate::scalar::{c, ComplexScalar};

/// The extension pair `(p, ν)` with `Re p > 0`, `ν >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    p: ComplexScalar,
    nu: f64,
}

impl ExtensionParams {
    pub fn new(p: ComplexScalar, nu: f64) -> Result<Self> {
        if !(p.re > 0.0) || !p.im.is_finite() {
            return Err(Error::domain(format!("extension needs Re(p) > 0, got p = {p}")));
        }
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::domain(format!("extension needs nu >= 0, got nu = {nu}")));
        }
        Ok(Self { p, nu })
    }

    pub fn real(p: f64, nu: f64) -> Result<Self> {
        Self::new(c(p), nu)
    }

    pub fn p(&self) -> ComplexScalar {
        self.p
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Order `ν + 1/2` of the Bessel kernel.
    pub fn kernel_order(&self) -> BesselOrder {
        BesselOrder::new(self.nu + 0.5).expect("nu >= 0 gives a valid order")
    }

    /// `√(2p/π)`.
    pub(crate) fn kernel_prefactor(&self) -> ComplexScalar {
        (2.0 * self.p / PI).sqrt()
    }
}

pub(crate) fn kernel_argument(p: ComplexScalar, t: f64, s: f64) -> ComplexScalar {
    p / (t * s)
}

/// `exp(log_weight - Z) · e^{Z}K(Z)` with early exit when the combined
/// exponent is below `-cutoff`.
pub(crate) fn weighted_kernel(
    log_weight: ComplexScalar,
    z: ComplexScalar,
    order: BesselOrder,
    cutoff: f64,
) -> ComplexScalar {
    let e = log_weight - z;
    if e.re < -cutoff || !e.re.is_finite() {
        return c(0.0);
    }
    match bessel_k_scaled(order, z) {
        Ok(k) => e.exp() * k,
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

fn check_converged(r: bool, nodes: usize, what: &'static str) -> Result<()> {
    if r {
        Ok(())
    } else {
        Err(Error::NonConvergence {
            what,
            iterations: nodes,
        })
    }
}

/// `B_{p,ν}(x, y)`.
pub fn extended_beta(
    x: ComplexScalar,
    y: ComplexScalar,
    ext: &ExtensionParams,
    cfg: &QuadratureConfig,
) -> Result<ComplexScalar> {
    let order = ext.kernel_order();
    let (a, b) = (x - 1.5, y - 1.5);
    let r = integrate_unit_interval(
        |t, s| {
            let z = kernel_argument(ext.p, t, s);
            weighted_kernel(a * t.ln() + b * s.ln(), z, order, cfg.endpoint_cutoff)
        },
        cfg,
    )?;
    check_converged(r.converged, r.nodes_used, "extended beta quadrature")?;
    Ok(ext.kernel_prefactor() * r.value)
}

/// `B_{p,ν}(x + k, y)` for every `k` in `ks`, from one sweep of shared nodes.
pub fn extended_beta_family(
    x: ComplexScalar,
    y: ComplexScalar,
    ks: std::ops::Range<usize>,
    ext: &ExtensionParams,
    cfg: &QuadratureConfig,
) -> Result<Vec<ComplexScalar>> {
    let order = ext.kernel_order();
    let (a, b) = (x - 1.5, y - 1.5);
    let first = ks.start as f64;
    let n = ks.len();
    let r = integrate_unit_interval_family(
        n,
        |t, s, out| {
            let lt = t.ln();
            let base = weighted_kernel((a + first) * lt + b * s.ln(), kernel_argument(ext.p, t, s), order, cfg.endpoint_cutoff);
            if base == c(0.0) {
                out.iter_mut().for_each(|o| *o = c(0.0));
                return;
            }
            // t^k by repeated multiplication; stops contributing once it underflows
            let mut v = base;
            for o in out.iter_mut() {
                *o = v;
                v *= t;
            }
        },
        cfg,
    )?;
    check_converged(r.converged, r.nodes_used, "extended beta family quadrature")?;
    let pre = ext.kernel_prefactor();
    Ok(r.values.into_iter().map(|v| pre * v).collect())
}

/// Chaudhry's `B(x, y; p) = ∫₀¹ t^{x-1}(1-t)^{y-1} exp(-p/(t(1-t))) dt`.
pub fn chaudhry_beta(
    x: ComplexScalar,
    y: ComplexScalar,
    p: ComplexScalar,
    cfg: &QuadratureConfig,
) -> Result<ComplexScalar> {
    if !(p.re > 0.0) {
        return Err(Error::domain(format!("B(x,y;p) needs Re(p) > 0, got p = {p}")));
    }
    let (a, b) = (x - 1.0, y - 1.0);
    let r = integrate_unit_interval(
        |t, s| {
            let e = a * t.ln() + b * s.ln() - kernel_argument(p, t, s);
            if e.re < -cfg.endpoint_cutoff {
                c(0.0)
            } else {
                e.exp()
            }
        },
        cfg,
    )?;
    check_converged(r.converged, r.nodes_used, "Chaudhry beta quadrature")?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::beta;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default().with_tol(1e-12)
    }

    fn rel(a: ComplexScalar, b: ComplexScalar) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn extension_params_validate() {
        assert!(ExtensionParams::real(0.0, 0.5).is_err());
        assert!(ExtensionParams::real(1.0, -0.1).is_err());
        assert!(ExtensionParams::new(Complex64::new(-0.1, 2.0), 0.0).is_err());
        assert!(ExtensionParams::new(Complex64::new(0.5, 2.0), 0.0).is_ok());
    }

    #[test]
    fn nu_zero_is_chaudhry() {
        for (x, y, p) in [(2.0, 2.0, 1.0), (0.3, 1.7, 0.4), (-1.5, 2.5, 2.0), (3.0, 4.0, 1.0)] {
            let ext = ExtensionParams::real(p, 0.0).unwrap();
            let a = extended_beta(c(x), c(y), &ext, &cfg()).unwrap();
            let b = chaudhry_beta(c(x), c(y), c(p), &cfg()).unwrap();
            assert!(rel(a, b) < 1e-11, "({x},{y},{p}): {a} vs {b}");
        }
    }

    #[test]
    fn symmetric_in_x_y() {
        let ext = ExtensionParams::real(1.0, 0.5).unwrap();
        let a = extended_beta(c(2.0), c(3.0), &ext, &cfg()).unwrap();
        let b = extended_beta(c(3.0), c(2.0), &ext, &cfg()).unwrap();
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn family_matches_pointwise() {
        let ext = ExtensionParams::real(0.7, 0.8).unwrap();
        let fam = extended_beta_family(c(1.3), c(0.9), 0..6, &ext, &cfg()).unwrap();
        for (k, v) in fam.iter().enumerate() {
            let direct = extended_beta(c(1.3 + k as f64), c(0.9), &ext, &cfg()).unwrap();
            assert!(rel(*v, direct) < 1e-11, "k={k}");
        }
    }

    #[test]
    fn chaudhry_small_p_limit() {
        let v = chaudhry_beta(c(2.0), c(2.0), c(1e-10), &cfg()).unwrap();
        assert!((v - beta(c(2.0), c(2.0)).unwrap()).norm() < 1e-5);
    }

    #[test]
    fn complex_p_is_accepted() {
        let ext = ExtensionParams::new(Complex64::new(1.0, 0.5), 0.0).unwrap();
        let a = extended_beta(c(1.5), c(2.5), &ext, &cfg()).unwrap();
        let b = chaudhry_beta(c(1.5), c(2.5), ext.p(), &cfg()).unwrap();
        assert!(rel(a, b) < 1e-10);
        assert!(chaudhry_beta(c(1.0), c(1.0), c(-1.0), &cfg()).is_err());
    }
}
