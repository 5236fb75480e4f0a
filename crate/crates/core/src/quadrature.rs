//! Double-exponential quadrature engines.
//!
//! * [`integrate_unit_interval`]: tanh-sinh on (0, 1). The integrand receives
//!   both `t` and `1 - t`, each computed without cancellation, because the
//!   kernels in this crate depend on `t(1-t)` at both ends.
//! * [`integrate_semi_infinite`]: exp-sinh on (0, ∞).
//! * [`integrate_vertical_line`]: trapezoid rule along `Re ζ = c` with a
//!   measured truncation point.
//!
//! Abscissas and weights are built once per level and shared.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::ComplexScalar;

pub const MAX_LEVELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub target_rel_tol: f64,
    pub max_levels: usize,
    /// Magnitude of a (negative) log-integrand beyond which the sample is taken as 0.
    pub endpoint_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            target_rel_tol: 1e-10,
            max_levels: 12,
            endpoint_cutoff: 745.0,
        }
    }
}

impl QuadratureConfig {
    pub fn new(target_rel_tol: f64, max_levels: usize) -> Result<Self> {
        let cfg = Self {
            target_rel_tol,
            max_levels,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_rel_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_tol > 0.0) {
            return Err(Error::domain("target_rel_tol must be positive"));
        }
        if self.max_levels > MAX_LEVELS {
            return Err(Error::domain(format!(
                "max_levels must be at most {MAX_LEVELS}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: ComplexScalar,
    pub abs_error_estimate: f64,
    pub nodes_used: usize,
    /// False when `max_levels` was exhausted before the tolerance was met.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub values: Vec<ComplexScalar>,
    pub abs_error_estimates: Vec<f64>,
    pub nodes_used: usize,
    pub converged: bool,
}

/// One symmetric pair of tanh-sinh abscissas: `near` is the distance to the
/// closer endpoint, `far = 1 - near`.
#[derive(Debug, Clone, Copy)]
struct UnitNode {
    near: f64,
    far: f64,
    weight: f64,
}

/// One exp-sinh pair: abscissas `small = 1/large`.
#[derive(Debug, Clone, Copy)]
struct HalfLineNode {
    small: f64,
    large: f64,
    w_small: f64,
    w_large: f64,
}

fn level_abscissas(level: usize) -> impl Iterator<Item = f64> {
    let h = 0.5f64.powi(level as i32);
    let (start, stride) = if level == 0 { (1.0, 1.0) } else { (h, 2.0 * h) };
    (0..).map(move |j| start + stride * j as f64)
}

fn unit_table(level: usize) -> &'static [UnitNode] {
    static TABLES: [OnceLock<Vec<UnitNode>>; MAX_LEVELS + 1] = [const { OnceLock::new() }; MAX_LEVELS + 1];
    TABLES[level].get_or_init(|| {
        let mut nodes = Vec::new();
        for u in level_abscissas(level) {
            let w = FRAC_PI_2 * u.sinh();
            let e = (-2.0 * w).exp();
            let near = e / (1.0 + e);
            if near < 1e-300 {
                break;
            }
            let weight = std::f64::consts::PI * u.cosh() * e / ((1.0 + e) * (1.0 + e));
            nodes.push(UnitNode {
                near,
                far: 1.0 / (1.0 + e),
                weight,
            });
        }
        nodes
    })
}

fn half_line_table(level: usize) -> &'static [HalfLineNode] {
    static TABLES: [OnceLock<Vec<HalfLineNode>>; MAX_LEVELS + 1] =
        [const { OnceLock::new() }; MAX_LEVELS + 1];
    TABLES[level].get_or_init(|| {
        let mut nodes = Vec::new();
        for v in level_abscissas(level) {
            let w = FRAC_PI_2 * v.sinh();
            if w > 345.0 {
                break;
            }
            let large = w.exp();
            let small = (-w).exp();
            let dw = FRAC_PI_2 * v.cosh();
            nodes.push(HalfLineNode {
                small,
                large,
                w_small: dw * small,
                w_large: dw * large,
            });
        }
        nodes
    })
}

fn check_finite(v: &[ComplexScalar], at: f64) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { at })
    }
}

/// Shared level loop: `add_level(level, sums)` adds the weighted samples of
/// that level into `sums` and returns the number of integrand calls.
fn refine<A>(n_out: usize, cfg: &QuadratureConfig, mut add_level: A) -> Result<FamilyResult>
where
    A: FnMut(usize, &mut [ComplexScalar]) -> Result<usize>,
{
    cfg.validate()?;
    let mut sums = vec![Complex64::new(0.0, 0.0); n_out];
    let mut previous: Option<Vec<ComplexScalar>> = None;
    let mut nodes_used = 0;
    let mut errors = vec![f64::INFINITY; n_out];
    let mut values = vec![Complex64::new(0.0, 0.0); n_out];
    let mut converged = false;
    for level in 0..=cfg.max_levels {
        nodes_used += add_level(level, &mut sums)?;
        let h = 0.5f64.powi(level as i32);
        for (v, s) in values.iter_mut().zip(&sums) {
            *v = s * h;
        }
        if let Some(prev) = &previous {
            let mut all_ok = true;
            for k in 0..n_out {
                let diff = (values[k] - prev[k]).norm();
                errors[k] = diff;
                if diff > cfg.target_rel_tol * values[k].norm() && diff > 1e-300 {
                    all_ok = false;
                }
            }
            if all_ok && level >= 3 {
                converged = true;
                break;
            }
        }
        previous = Some(values.clone());
    }
    Ok(FamilyResult {
        values,
        abs_error_estimates: errors,
        nodes_used,
        converged,
    })
}

/// Tanh-sinh rule for a family of integrands evaluated at shared nodes.
///
/// `f(t, 1 - t, out)` writes all `n_out` integrand values at `t`.
pub fn integrate_unit_interval_family<F>(
    n_out: usize,
    f: F,
    cfg: &QuadratureConfig,
) -> Result<FamilyResult>
where
    F: Fn(f64, f64, &mut [ComplexScalar]),
{
    unit_family_from(n_out, f, cfg, 0.0)
}

/// Tanh-sinh over the nodes at least `min_near` away from both endpoints.
fn unit_family_from<F>(n_out: usize, f: F, cfg: &QuadratureConfig, min_near: f64) -> Result<FamilyResult>
where
    F: Fn(f64, f64, &mut [ComplexScalar]),
{
    let mut buf = vec![Complex64::new(0.0, 0.0); n_out];
    refine(n_out, cfg, |level, sums| {
        let mut calls = 0;
        if level == 0 {
            f(0.5, 0.5, &mut buf);
            check_finite(&buf, 0.5)?;
            for (s, v) in sums.iter_mut().zip(&buf) {
                *s += v * std::f64::consts::FRAC_PI_4;
            }
            calls += 1;
        }
        for node in unit_table(level).iter().take_while(|n| n.near >= min_near) {
            f(node.near, node.far, &mut buf);
            check_finite(&buf, node.near)?;
            for (s, v) in sums.iter_mut().zip(&buf) {
                *s += v * node.weight;
            }
            f(node.far, node.near, &mut buf);
            check_finite(&buf, node.far)?;
            for (s, v) in sums.iter_mut().zip(&buf) {
                *s += v * node.weight;
            }
            calls += 2;
        }
        Ok(calls)
    })
}

fn single(res: FamilyResult) -> QuadratureResult {
    QuadratureResult {
        value: res.values[0],
        abs_error_estimate: res.abs_error_estimates[0],
        nodes_used: res.nodes_used,
        converged: res.converged,
    }
}

/// ∫₀¹ f(t) dt; the integrand is called as `f(t, 1 - t)`.
pub fn integrate_unit_interval<F>(f: F, cfg: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> ComplexScalar,
{
    integrate_unit_interval_family(1, |t, s, out| out[0] = f(t, s), cfg).map(single)
}

/// ∫ₐᵇ f(x) dx by an affine map onto (0, 1).
pub fn integrate_interval<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexScalar,
{
    let len = b - a;
    let mut r = integrate_unit_interval(|t, s| {
        let x = if t <= 0.5 { a + len * t } else { b - len * s };
        f(x) * len
    }, cfg)?;
    r.abs_error_estimate = r.abs_error_estimate.abs();
    Ok(r)
}

/// Smallest endpoint distance sampled by [`integrate_interval_decayed`].
pub const DECAYED_ENDPOINT_DISTANCE: f64 = 1e-15;

/// ∫ₐᵇ f(x) dx for an integrand that is already negligible at both ends:
/// the tanh-sinh nodes closer than `DECAYED_ENDPOINT_DISTANCE · (b - a)` to
/// an endpoint are not sampled.
pub fn integrate_interval_decayed<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexScalar,
{
    let len = b - a;
    let g = |t: f64, s: f64, out: &mut [ComplexScalar]| {
        let x = if t <= 0.5 { a + len * t } else { b - len * s };
        out[0] = f(x) * len;
    };
    unit_family_from(1, g, cfg, DECAYED_ENDPOINT_DISTANCE).map(single)
}

/// ∫₀^∞ f(u) du by the exp-sinh substitution `u = exp(π/2 · sinh v)`.
pub fn integrate_semi_infinite<F>(f: F, cfg: &QuadratureConfig) -> Result<QuadratureResult>
where
    F: Fn(f64) -> ComplexScalar,
{
    refine(1, cfg, |level, sums| {
        let mut calls = 0;
        if level == 0 {
            let v = f(1.0);
            check_finite(&[v], 1.0)?;
            sums[0] += v * FRAC_PI_2;
            calls += 1;
        }
        for node in half_line_table(level) {
            let a = f(node.small);
            check_finite(&[a], node.small)?;
            let b = f(node.large);
            check_finite(&[b], node.large)?;
            sums[0] += a * node.w_small + b * node.w_large;
            calls += 2;
        }
        Ok(calls)
    })
    .map(single)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalLineResult {
    pub quadrature: QuadratureResult,
    /// Symmetric truncation point `T` actually used.
    pub truncation: f64,
    /// Final trapezoid step.
    pub step: f64,
    /// Fitted exponential decay rate of |f(c + iτ)| in the tail.
    pub decay_rate: f64,
}

/// Largest |τ| probed while looking for integrand decay.
pub const VERTICAL_LINE_MAX_ABSCISSA: f64 = 400.0;

/// ∫_{-∞}^{∞} f(c + iτ) dτ (no 1/2π factor).
///
/// `truncation`/`step` override the measured truncation point and the
/// initial trapezoid step.
pub fn integrate_vertical_line<F>(
    f: F,
    abscissa: f64,
    truncation: Option<f64>,
    step: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<VerticalLineResult>
where
    F: Fn(ComplexScalar) -> Result<ComplexScalar>,
{
    cfg.validate()?;
    let eval = |tau: f64| -> Result<ComplexScalar> {
        let v = f(Complex64::new(abscissa, tau))?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { at: tau });
        }
        Ok(v)
    };

    // decay probe on a unit grid
    let mut peak = eval(0.0)?.norm();
    let mut tail: Vec<(f64, f64)> = Vec::new();
    let mut detected = None;
    let mut quiet = 0;
    let mut tau = 1.0;
    while tau <= VERTICAL_LINE_MAX_ABSCISSA {
        let m = eval(tau)?.norm().max(eval(-tau)?.norm());
        peak = peak.max(m);
        if m > 0.0 {
            tail.push((tau, m.ln()));
        }
        if m <= cfg.target_rel_tol * 1e-3 * peak {
            quiet += 1;
            if quiet >= 2 {
                detected = Some(tau);
                break;
            }
        } else {
            quiet = 0;
        }
        tau += 1.0;
    }
    let t_detect = detected.ok_or(Error::DecayNotDetected {
        max_abscissa: VERTICAL_LINE_MAX_ABSCISSA,
    })?;
    let fit_from = tail.len() / 2;
    let decay_rate = fit_decay(&tail[fit_from..]);

    let t_final = match truncation {
        Some(t) => t,
        None => {
            let fitted = if decay_rate > 0.0 {
                let (t0, l0) = tail[fit_from];
                t0 + (l0 - (cfg.target_rel_tol * peak * decay_rate).ln()) / decay_rate
            } else {
                t_detect
            };
            (2.0 * fitted).max(t_detect).min(VERTICAL_LINE_MAX_ABSCISSA)
        }
    };

    let mut h = step.unwrap_or(0.5);
    let n = (t_final / h).ceil() as i64;
    let mut sum = eval(0.0)?;
    for k in 1..=n {
        sum += eval(k as f64 * h)? + eval(-(k as f64) * h)?;
    }
    let mut nodes = 2 * n as usize + 1;
    let mut value = sum * h;
    let mut err = f64::INFINITY;
    let mut converged = false;
    for halving in 1..=cfg.max_levels {
        let half = h / 2.0;
        let m = (t_final / half).ceil() as i64;
        let mut k = 1;
        while k <= m {
            sum += eval(k as f64 * half)? + eval(-(k as f64) * half)?;
            nodes += 2;
            k += 2;
        }
        h = half;
        let next = sum * h;
        err = (next - value).norm();
        value = next;
        if halving >= 2 && err <= cfg.target_rel_tol * value.norm().max(1e-300) {
            converged = true;
            break;
        }
    }
    Ok(VerticalLineResult {
        quadrature: QuadratureResult {
            value,
            abs_error_estimate: err,
            nodes_used: nodes,
            converged,
        },
        truncation: t_final,
        step: h,
        decay_rate,
    })
}

/// Least-squares slope of `ln|f|` against τ, negated.
fn fit_decay(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        -sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default().with_tol(1e-13)
    }

    fn re(x: f64) -> ComplexScalar {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn unit_interval_constant() {
        let r = integrate_unit_interval(|_, _| re(1.0), &cfg()).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-14);
        assert!(r.converged);
        assert!(r.nodes_used >= 1);
    }

    #[test]
    fn unit_interval_beta_polynomial() {
        let r = integrate_unit_interval(|t, s| re(t * s * s), &cfg()).unwrap();
        assert!((r.value.re - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn unit_interval_endpoint_singularity() {
        // ∫ t^{-1/2}(1-t)^{-1/2} = π
        let r = integrate_unit_interval(|t, s| re(1.0 / (t * s).sqrt()), &cfg()).unwrap();
        assert!((r.value.re - PI).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn semi_infinite_examples() {
        let r = integrate_semi_infinite(|u| re((-u).exp()), &cfg()).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-13);
        let r = integrate_semi_infinite(|u| re(u * u * (-u * u).exp()), &cfg()).unwrap();
        assert!((r.value.re - PI.sqrt() / 4.0).abs() < 1e-13);
    }

    #[test]
    fn interval_map() {
        let r = integrate_interval(|x| re(x.cos()), 0.0, 2.0, &cfg()).unwrap();
        assert!((r.value.re - 2f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn vertical_line_gaussian() {
        let r = integrate_vertical_line(|z| Ok((-(z.im * z.im)).exp() * re(1.0)), 0.0, None, None, &cfg())
            .unwrap();
        assert!((r.quadrature.value.re - PI.sqrt()).abs() < 1e-13);
        assert!(r.decay_rate > 0.0);
    }

    #[test]
    fn vertical_line_no_decay() {
        let r = integrate_vertical_line(|_| Ok(re(1.0)), 0.0, None, None, &cfg());
        assert!(matches!(r, Err(Error::DecayNotDetected { .. })));
    }

    #[test]
    fn non_finite_sample_is_error() {
        let r = integrate_unit_interval(|t, _| re(if t > 0.3 && t < 0.7 { f64::NAN } else { 1.0 }), &cfg());
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(0.0, 4).is_err());
        assert!(QuadratureConfig::new(1e-8, 17).is_err());
        assert!(QuadratureConfig::new(1e-8, 16).is_ok());
    }

    #[test]
    fn unconverged_is_flagged_not_error() {
        let c = QuadratureConfig { target_rel_tol: 1e-15, max_levels: 1, ..Default::default() };
        let r = integrate_unit_interval(|t, _| re(t.sqrt()), &c).unwrap();
        assert!(!r.converged);
    }
}
