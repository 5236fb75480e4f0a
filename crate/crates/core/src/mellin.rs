//! Mellin transform of `F_{1,p,ν}` in `p`, numerically and in closed form,
//! and the inverse transform along a vertical line.
//!
//! Closed form:
//! `∫₀^∞ p^{s-1} F_{1,p,ν} dp = 2^{s-1}/√π · Γ((s-ν)/2) Γ((s+ν+1)/2)
//!   · B(b1+s, c1-b1+s)/B(b1, c1-b1) · F1(b1+s, b2, b3; c1+2s; x, y)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_k_scaled, BesselOrder};
use crate::error::{Error, Result};
use crate::ext_appell::{f1pv, EvaluationMethod, ExtendedAppellInput, Route};
use crate::ext_beta::ExtensionParams;
use crate::hyper::{appell_f1_integral, appell_f1_series, AppellParams, SeriesControl};
use crate::quadrature::{integrate_interval_decayed, integrate_semi_infinite, integrate_vertical_line, QuadratureConfig};
use crate::scalar::{beta, c, gamma, is_nonpositive_integer, ln_gamma, ComplexScalar};

/// A transform variable `s` with `Re(s-ν) > 0`, `Re(s+ν) > -1`, `Re s > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinPoint {
    s: ComplexScalar,
}

impl MellinPoint {
    pub fn new(s: ComplexScalar, nu: f64, appell: &AppellParams) -> Result<Self> {
        if !((s - nu).re > 0.0 && (s + nu).re > -1.0 && s.re > 0.0) {
            return Err(Error::domain(format!(
                "Mellin variable needs Re(s-nu) > 0, Re(s+nu) > -1, Re(s) > 0; got s = {s}, nu = {nu}"
            )));
        }
        if is_nonpositive_integer(appell.c1 + s) {
            return Err(Error::Pole {
                function: "F1 at c1 + s",
                at: appell.c1 + s,
            });
        }
        Ok(Self { s })
    }

    pub fn s(&self) -> ComplexScalar {
        self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MellinClosedForm {
    /// With the Beta ratio and `c1 + 2s`.
    #[default]
    Corrected,
    /// `2^{s-1}/√π Γ((s-ν)/2) Γ((s+ν+1)/2) F1(b1+s, b2, b3; c1+s; x, y)`.
    AsPrinted,
}

/// Vertical line `Re s = c` for the inversion, with optional overrides of the
/// measured truncation and the initial step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionContour {
    abscissa: f64,
    pub truncation: Option<f64>,
    pub step: Option<f64>,
}

impl InversionContour {
    pub fn new(abscissa: f64, nu: f64) -> Result<Self> {
        if !(abscissa > nu) {
            return Err(Error::domain(format!("inversion abscissa must exceed nu = {nu}, got {abscissa}")));
        }
        Ok(Self {
            abscissa,
            truncation: None,
            step: None,
        })
    }

    pub fn with_truncation(mut self, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::domain("truncation must be positive"));
        }
        self.truncation = Some(t);
        Ok(self)
    }

    pub fn with_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::domain("step must be positive"));
        }
        self.step = Some(h);
        Ok(self)
    }

    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }
}

/// `2^{s-3/2} Γ((s-ν)/2) Γ((s+ν+1)/2) = ∫₀^∞ u^{s-1/2} K_{ν+1/2}(u) du`.
pub fn kernel_mellin_closed(nu: f64, s: ComplexScalar) -> Result<ComplexScalar> {
    Ok((s - 1.5).exp2() * gamma((s - nu) / 2.0)? * gamma((s + nu + 1.0) / 2.0)?)
}

/// `∫₀^∞ u^{s-1/2} K_{ν+1/2}(u) du` by exp-sinh quadrature.
pub fn kernel_mellin_numeric(nu: f64, s: ComplexScalar, cfg: &QuadratureConfig) -> Result<ComplexScalar> {
    if !((s - nu).re > 0.0) {
        return Err(Error::domain(format!("kernel Mellin transform needs Re(s - nu) > 0, got s = {s}")));
    }
    let order = BesselOrder::new(nu + 0.5)?;
    let nu1 = nu + 0.5;
    let ln_small = ln_gamma(c(nu1))?.re + (nu1 - 1.0) * 2f64.ln();
    let r = integrate_semi_infinite(
        |u| {
            let lu = u.ln();
            if u < 1e-30 {
                // K(u) ~ Γ(ν')/2 (2/u)^{ν'}
                return ((s - 0.5 - nu1) * lu + ln_small).exp();
            }
            let e = (s - 0.5) * lu - u;
            if e.re < -cfg.endpoint_cutoff {
                return c(0.0);
            }
            e.exp() * bessel_k_scaled(order, c(u)).unwrap_or(c(f64::NAN))
        },
        cfg,
    )?;
    if !r.converged {
        return Err(Error::NonConvergence {
            what: "kernel Mellin quadrature",
            iterations: r.nodes_used,
        });
    }
    Ok(r.value)
}

fn appell_f1_any(params: &AppellParams, method: &EvaluationMethod) -> Result<ComplexScalar> {
    if params.x.norm() < 1.0 && params.y.norm() < 1.0 {
        appell_f1_series(
            params,
            &SeriesControl {
                tol: method.tol,
                max_terms: method.max_terms,
            },
        )
    } else {
        appell_f1_integral(params, &method.quadrature)
    }
}

/// The transform at `s` from its closed form.
pub fn mellin_forward_closed(
    appell: &AppellParams,
    nu: f64,
    s: &MellinPoint,
    form: MellinClosedForm,
    method: &EvaluationMethod,
) -> Result<ComplexScalar> {
    let s = s.s();
    let lead = (s - 1.0).exp2() / PI.sqrt() * gamma((s - nu) / 2.0)? * gamma((s + nu + 1.0) / 2.0)?;
    let a = appell;
    match form {
        MellinClosedForm::Corrected => {
            let gap = a.c1 - a.b1;
            let norm = beta(a.b1, gap)?;
            if norm == c(0.0) {
                return Err(Error::Pole {
                    function: "1/B(b1, c1-b1)",
                    at: gap,
                });
            }
            let shifted = AppellParams::new(a.b1 + s, a.b2, a.b3, a.c1 + 2.0 * s, a.x, a.y);
            Ok(lead * beta(a.b1 + s, gap + s)? / norm * appell_f1_any(&shifted, method)?)
        }
        MellinClosedForm::AsPrinted => {
            let shifted = AppellParams::new(a.b1 + s, a.b2, a.b3, a.c1 + s, a.x, a.y);
            Ok(lead * appell_f1_any(&shifted, method)?)
        }
    }
}

/// Stopping threshold on the change between tanh-sinh levels of the outer
/// rule; the error after the stop is roughly its square.
const OUTER_LEVEL_TOL: f64 = 1e-6;

/// Relative size of the `p < p_lo` tail that is replaced by its leading-power estimate.
const SMALL_P_TAIL: f64 = 1e-9;

/// The transform at `s` by quadrature in `w = ln p`: `[ln p_lo, 0]` and
/// `[0, ln p_hi]`, with `F` evaluated by `method`. Below `p_lo` the integrand
/// is replaced by its `p^{s-ν-1}` leading behavior; above `p_hi` the kernel
/// makes `F` negligible.
pub fn mellin_forward_numeric(
    appell: &AppellParams,
    nu: f64,
    s: &MellinPoint,
    method: &EvaluationMethod,
) -> Result<ComplexScalar> {
    let s = s.s();
    let cfg = &method.quadrature;
    let sigma = (s - nu).re;
    let ln_lo = (SMALL_P_TAIL.ln() / sigma).max(-138.0);
    // F(p) carries K(4p) or less, so p^s F is below the tolerance past p_hi
    let ln_hi = ((60.0 - cfg.target_rel_tol.ln()) / 4.0).max(1.0).ln();
    let eval = |p: f64| -> Result<ComplexScalar> {
        let ext = ExtensionParams::real(p, nu)?;
        f1pv(&ExtendedAppellInput::new(*appell, ext), method)
    };
    let failed = std::cell::Cell::new(None::<Error>);
    let integrand = |w: f64| match eval(w.exp()) {
        Ok(v) => (s * w).exp() * v,
        Err(e) => {
            failed.set(Some(e));
            c(0.0)
        }
    };
    let outer = cfg.with_tol(cfg.target_rel_tol.max(OUTER_LEVEL_TOL));
    let lo = integrate_interval_decayed(integrand, ln_lo, 0.0, &outer)?;
    let hi = integrate_interval_decayed(integrand, 0.0, ln_hi, &outer)?;
    if let Some(e) = failed.take() {
        return Err(e);
    }
    if !(lo.converged && hi.converged) {
        return Err(Error::NonConvergence {
            what: "forward Mellin quadrature",
            iterations: lo.nodes_used + hi.nodes_used,
        });
    }
    // ∫₀^{p_lo} p^{s-1} F dp with F ≈ F(p_lo)(p/p_lo)^{-ν}
    let p_lo = ln_lo.exp();
    let tail = (s * ln_lo).exp() * eval(p_lo)? / (s - nu);
    Ok(lo.value + hi.value + tail)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseMellin {
    pub value: ComplexScalar,
    pub truncation: f64,
    pub step: f64,
    /// Measured exponential decay rate of the integrand along the line.
    pub decay_rate: f64,
    pub nodes_used: usize,
}

/// `F_{1,p,ν}` at `p` from `(1/2π) ∫ p^{-c-iτ} φ(c+iτ) dτ`, where `φ` is
/// the closed-form transform of `form`.
pub fn mellin_inverse_numeric(
    appell: &AppellParams,
    nu: f64,
    p: f64,
    contour: &InversionContour,
    form: MellinClosedForm,
    method: &EvaluationMethod,
) -> Result<InverseMellin> {
    if !(p > 0.0) {
        return Err(Error::domain(format!("inverse Mellin needs p > 0, got {p}")));
    }
    let ln_p = p.ln();
    let r = integrate_vertical_line(
        |s| {
            let point = MellinPoint::new(s, nu, appell)?;
            Ok((-s * ln_p).exp() * mellin_forward_closed(appell, nu, &point, form, method)?)
        },
        contour.abscissa,
        contour.truncation,
        contour.step,
        &method.quadrature,
    )?;
    if !r.quadrature.converged {
        return Err(Error::NonConvergence {
            what: "inverse Mellin line integral",
            iterations: r.quadrature.nodes_used,
        });
    }
    Ok(InverseMellin {
        value: r.quadrature.value / (2.0 * PI),
        truncation: r.truncation,
        step: r.step,
        decay_rate: r.decay_rate,
        nodes_used: r.quadrature.nodes_used,
    })
}

/// The method the Mellin routines use by default: integral route.
pub fn default_method() -> EvaluationMethod {
    EvaluationMethod::default().with_route(Route::Integral)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: ComplexScalar, b: ComplexScalar) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn point_constraints() {
        let a = AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.3, 0.4);
        assert!(MellinPoint::new(c(0.5), 0.5, &a).is_err());
        assert!(MellinPoint::new(c(0.51), 0.5, &a).is_ok());
        assert!(InversionContour::new(0.5, 0.5).is_err());
    }

    #[test]
    fn kernel_transform() {
        let cfg = QuadratureConfig::default().with_tol(1e-11);
        for nu in [0.0, 0.3, 1.7] {
            for ds in [0.5, 1.0, 2.0] {
                let s = c(nu + ds);
                let n = kernel_mellin_numeric(nu, s, &cfg).unwrap();
                let cf = kernel_mellin_closed(nu, s).unwrap();
                assert!(rel(n, cf) < 1e-8, "nu={nu} s={s}: {n} vs {cf}");
            }
        }
    }

    #[test]
    fn unit_s_gamma_arithmetic() {
        // ν = 0, s = 1: 2⁰/√π Γ(1/2) Γ(1) = 1
        let a = AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.0, 0.0);
        let s = MellinPoint::new(c(1.0), 0.0, &a).unwrap();
        let v = mellin_forward_closed(&a, 0.0, &s, MellinClosedForm::AsPrinted, &default_method()).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
    }

    #[test]
    fn forward_matches_corrected_closed_form() {
        let a = AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.3, 0.4);
        let nu = 0.5;
        let s = MellinPoint::new(c(1.5), nu, &a).unwrap();
        let m = default_method();
        let n = mellin_forward_numeric(&a, nu, &s, &m).unwrap();
        let cf = mellin_forward_closed(&a, nu, &s, MellinClosedForm::Corrected, &m).unwrap();
        assert!(rel(n, cf) < 1e-7, "{n} vs {cf}");
        let printed = mellin_forward_closed(&a, nu, &s, MellinClosedForm::AsPrinted, &m).unwrap();
        assert!(rel(printed, cf) > 0.1);
    }

    #[test]
    fn inverse_reconstructs() {
        let a = AppellParams::real(1.0, 1.0, 1.0, 3.0, 0.3, 0.4);
        let nu = 0.5;
        let m = default_method();
        let direct = f1pv(&ExtendedAppellInput::new(a, ExtensionParams::real(1.0, nu).unwrap()), &m).unwrap();
        for cc in [nu + 1.0, nu + 1.5] {
            let contour = InversionContour::new(cc, nu).unwrap();
            let inv = mellin_inverse_numeric(&a, nu, 1.0, &contour, MellinClosedForm::Corrected, &m).unwrap();
            assert!(rel(inv.value, direct) < 1e-6, "c={cc}: {} vs {direct}", inv.value);
            assert!(inv.decay_rate > 1.0);
        }
    }
}
