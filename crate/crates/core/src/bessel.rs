//! Modified Bessel function of the second kind, `K_ν(z)`, for real order and
//! `Re z > 0`.
//!
//! Half-odd-integer orders use the terminating closed form. Every other order
//! goes through `K_ν(z) = ∫₀^∞ e^{-z cosh t} cosh(νt) dt`, integrated in its
//! scaled form `e^{z}K_ν(z) = ∫₀^∞ e^{-2z sinh²(t/2)} cosh(νt) dt` so that large
//! arguments do not underflow.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_interval, QuadratureConfig};
use crate::scalar::{gamma, upper_incomplete_gamma, ComplexScalar};

/// Real order of `K_ν`, with the half-odd-integer case detected up front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
    half_odd: Option<u32>,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < -1.0 {
            return Err(Error::domain(format!("Bessel order must be finite and >= -1, got {nu}")));
        }
        let shifted = nu.abs() - 0.5;
        let k = shifted.round();
        let half_odd = if k >= 0.0 && (shifted - k).abs() <= 1e-12 && k < 64.0 {
            Some(k as u32)
        } else {
            None
        };
        Ok(Self { nu, half_odd })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn is_half_odd_integer(&self) -> bool {
        self.half_odd.is_some()
    }
}

fn check_half_plane(z: ComplexScalar) -> Result<()> {
    if z.re > 0.0 && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("K_nu needs Re(z) > 0, got z = {z}")))
    }
}

/// `e^{z} K_{k+1/2}(z) = √(π/2z) Σ_{j≤k} (k+j)! / (j!(k-j)!(2z)^j)`.
fn half_odd_scaled(k: u32, z: ComplexScalar) -> ComplexScalar {
    let lead = (Complex64::new(PI, 0.0) / (2.0 * z)).sqrt();
    let inv = 1.0 / (2.0 * z);
    let mut coef = 1.0;
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(1.0, 0.0);
    for j in 0..k {
        let j = j as f64;
        let k = k as f64;
        coef *= (k - j) * (k + j + 1.0) / (j + 1.0);
        power *= inv;
        sum += power * coef;
    }
    lead * sum
}

/// Upper end of the cosh-integral support: the log-integrand has fallen
/// `drop` below its maximum.
fn cosh_integral_truncation(nu: f64, x: f64, drop: f64) -> f64 {
    let log_integrand = |t: f64| nu * t - x * (t.cosh() - 1.0);
    let t_peak = (nu / x).asinh();
    let target = log_integrand(t_peak) - drop;
    let mut hi = t_peak.max(1e-3);
    while log_integrand(hi) > target {
        hi *= 2.0;
    }
    let mut lo = t_peak;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if log_integrand(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn cosh_integral_scaled(nu: f64, z: ComplexScalar) -> Result<ComplexScalar> {
    let nu = nu.abs();
    let upper = cosh_integral_truncation(nu, z.re, 45.0);
    let cfg = QuadratureConfig::default().with_tol(1e-13);
    let r = integrate_interval(
        |t| {
            let half = (0.5 * t).sinh();
            let base = -2.0 * z * half * half;
            0.5 * ((base + nu * t).exp() + (base - nu * t).exp())
        },
        0.0,
        upper,
        &cfg,
    )?;
    Ok(r.value)
}

/// `K_ν(z)` for `Re z > 0`.
pub fn bessel_k(order: BesselOrder, z: ComplexScalar) -> Result<ComplexScalar> {
    Ok(bessel_k_scaled(order, z)? * (-z).exp())
}

/// `e^{z} K_ν(z)` for `Re z > 0`.
pub fn bessel_k_scaled(order: BesselOrder, z: ComplexScalar) -> Result<ComplexScalar> {
    check_half_plane(z)?;
    match order.half_odd {
        Some(k) => Ok(half_odd_scaled(k, z)),
        None => cosh_integral_scaled(order.nu, z),
    }
}

/// `e^{z} K_ν(z)` from the cosh integral regardless of the order, for
/// cross-checking the half-odd closed form.
pub fn bessel_k_scaled_integral(order: BesselOrder, z: ComplexScalar) -> Result<ComplexScalar> {
    check_half_plane(z)?;
    cosh_integral_scaled(order.nu, z)
}

/// Closed-form majorant of `|K_{ν+1/2}(z)|` for `ν >= 0`:
/// `½ (2|z| / (Re z)²)^{ν+1/2} Γ(ν+1/2)`.
///
/// `order` is the order of the Bessel function being bounded, i.e. `ν + 1/2`.
pub fn bessel_k_upper_bound(order: BesselOrder, z: ComplexScalar) -> Result<f64> {
    check_half_plane(z)?;
    let nu = order.nu - 0.5;
    if nu < 0.0 {
        return Err(Error::domain(format!(
            "bound holds for orders >= 1/2, got {}",
            order.nu
        )));
    }
    let x = z.re;
    let g = gamma(Complex64::new(nu + 0.5, 0.0))?.re;
    Ok(0.5 * (2.0 * z.norm() / (x * x)).powf(nu + 0.5) * g)
}

/// Sharper majorant keeping the incomplete Gamma factor:
/// `√π (|z|/2)^{ν+1/2} / Γ(ν+1) · Γ(2ν+1, Re z) / (Re z)^{2ν+1}`.
pub fn bessel_k_incomplete_gamma_bound(order: BesselOrder, z: ComplexScalar) -> Result<f64> {
    check_half_plane(z)?;
    let nu = order.nu - 0.5;
    if nu < 0.0 {
        return Err(Error::domain(format!(
            "bound holds for orders >= 1/2, got {}",
            order.nu
        )));
    }
    let x = z.re;
    let lead = PI.sqrt() * (0.5 * z.norm()).powf(nu + 0.5) / gamma(Complex64::new(nu + 1.0, 0.0))?.re;
    Ok(lead * upper_incomplete_gamma(2.0 * nu + 1.0, x)? / x.powf(2.0 * nu + 1.0))
}
