//! The extended Appell function `F_{1,p,ν}`.
//!
//! Series route:
//! `Σ (b2)_m (b3)_n B_{p,ν}(b1+m+n, c1-b1)/B(b1, c1-b1) · x^m y^n/(m! n!)`.
//!
//! Integral route:
//! `Γ(c1)/(Γ(b1)Γ(c1-b1)) √(2p/π) ∫₀¹ t^{b1-3/2}(1-t)^{c1-b1-3/2}(1-xt)^{-b2}(1-yt)^{-b3} K_{ν+1/2}(p/(t(1-t))) dt`.
//!
//! The integral pairs `b2` with `x` so that expanding the power factors gives
//! back the series term by term. [`ExponentPairing::AsPrinted`] selects the
//! other pairing.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_beta::{extended_beta_family, kernel_argument, weighted_kernel, ExtensionParams};
use crate::hyper::{appell_f1_integral, appell_f1_series, double_series, one_minus, AppellParams, SeriesControl};
use crate::quadrature::{integrate_unit_interval, QuadratureConfig};
use crate::scalar::{beta, c, gamma, is_nonpositive_integer, ln_gamma, pochhammer, ComplexScalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedAppellInput {
    pub appell: AppellParams,
    pub ext: ExtensionParams,
}

impl ExtendedAppellInput {
    pub fn new(appell: AppellParams, ext: ExtensionParams) -> Self {
        Self { appell, ext }
    }

    /// The input with `(b2, x)` and `(b3, y)` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            appell: self.appell.swapped(),
            ext: self.ext,
        }
    }

    fn with_appell(&self, appell: AppellParams) -> Self {
        Self { appell, ext: self.ext }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Series,
    Integral,
    Auto,
}

/// Which power factor carries `b2` in the integral representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExponentPairing {
    /// `(1-xt)^{-b2}(1-yt)^{-b3}`, consistent with the series.
    #[default]
    SeriesConsistent,
    /// `(1-xt)^{-b3}(1-yt)^{-b2}`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationMethod {
    pub route: Route,
    /// Series stopping tolerance.
    pub tol: f64,
    pub max_terms: usize,
    pub quadrature: QuadratureConfig,
    pub pairing: ExponentPairing,
}

impl Default for EvaluationMethod {
    fn default() -> Self {
        Self {
            route: Route::Auto,
            tol: 1e-12,
            max_terms: 4000,
            quadrature: QuadratureConfig::default(),
            pairing: ExponentPairing::SeriesConsistent,
        }
    }
}

impl EvaluationMethod {
    pub fn with_route(mut self, route: Route) -> Self {
        self.route = route;
        self
    }

    fn series_control(&self) -> SeriesControl {
        SeriesControl {
            tol: self.tol,
            max_terms: self.max_terms,
        }
    }
}

/// `B_{p,ν}(b + k, gap)` for `k = 0, 1, ...`, computed in chunks on demand.
struct ExtendedDiagonal<'a> {
    b: ComplexScalar,
    gap: ComplexScalar,
    ext: &'a ExtensionParams,
    cfg: &'a QuadratureConfig,
    chunk: usize,
    values: Vec<ComplexScalar>,
}

impl<'a> ExtendedDiagonal<'a> {
    fn new(
        b: ComplexScalar,
        gap: ComplexScalar,
        ext: &'a ExtensionParams,
        cfg: &'a QuadratureConfig,
        chunk: usize,
    ) -> Self {
        Self {
            b,
            gap,
            ext,
            cfg,
            chunk: chunk.max(8),
            values: Vec::new(),
        }
    }

    fn get(&mut self, k: usize) -> Result<ComplexScalar> {
        while self.values.len() <= k {
            let start = self.values.len();
            let more = extended_beta_family(self.b, self.gap, start..start + self.chunk, self.ext, self.cfg)?;
            self.values.extend(more);
        }
        Ok(self.values[k])
    }
}

/// Diagonal length the double series is likely to need, so that one sweep of
/// quadrature nodes usually suffices.
fn diagonal_chunk(x: ComplexScalar, y: ComplexScalar, tol: f64) -> usize {
    let r = x.norm().max(y.norm());
    if r < 1e-3 {
        return 16;
    }
    let m = (tol.ln() / r.ln()).ceil().max(1.0);
    ((2.0 * m) as usize + 16).min(1024)
}

fn reject_degenerate_gap(appell: &AppellParams) -> Result<ComplexScalar> {
    let gap = appell.c1 - appell.b1;
    if is_nonpositive_integer(gap) {
        return Err(Error::Pole {
            function: "B(b1, c1-b1)",
            at: gap,
        });
    }
    Ok(gap)
}

/// Series for `F_{1,p,ν}(b1 + shift, b2, b3; c1 + shift; x, y)` on a shared diagonal whose base is `b1`.
fn series_on_diagonal(
    diag: &mut ExtendedDiagonal<'_>,
    shift: usize,
    b2: ComplexScalar,
    b3: ComplexScalar,
    appell: &AppellParams,
    ctl: &SeriesControl,
) -> Result<ComplexScalar> {
    let norm = beta(diag.b + shift as f64, diag.gap)?;
    if norm == c(0.0) || !norm.re.is_finite() {
        return Err(Error::Pole {
            function: "1/B(b1, c1-b1)",
            at: diag.b + shift as f64,
        });
    }
    let s = double_series(|k| Ok(diag.get(k + shift)? / norm), b2, b3, appell.x, appell.y, ctl)?;
    Ok(s)
}

/// `F_{1,p,ν}` by the double series.
pub fn f1pv_series(input: &ExtendedAppellInput, method: &EvaluationMethod) -> Result<ComplexScalar> {
    let a = &input.appell;
    a.check_series_domain()?;
    let gap = reject_degenerate_gap(a)?;
    let mut diag = ExtendedDiagonal::new(a.b1, gap, &input.ext, &method.quadrature, diagonal_chunk(a.x, a.y, method.tol));
    series_on_diagonal(&mut diag, 0, a.b2, a.b3, a, &method.series_control())
}

/// `F_{1,p,ν}` by the integral representation.
pub fn f1pv_integral(input: &ExtendedAppellInput, method: &EvaluationMethod) -> Result<ComplexScalar> {
    let a = &input.appell;
    a.check_integral_domain()?;
    let gap = reject_degenerate_gap(a)?;
    let (ex, ey) = match method.pairing {
        ExponentPairing::SeriesConsistent => (a.b2, a.b3),
        ExponentPairing::AsPrinted => (a.b3, a.b2),
    };
    let pre = (ln_gamma(a.c1)? - ln_gamma(a.b1)? - ln_gamma(gap)?).exp() * input.ext.kernel_prefactor();
    let (pa, pb) = (a.b1 - 1.5, gap - 1.5);
    let order = input.ext.kernel_order();
    let cfg = &method.quadrature;
    let r = integrate_unit_interval(
        |t, s| {
            let lw = pa * t.ln() + pb * s.ln() - ex * one_minus(a.x, t, s).ln() - ey * one_minus(a.y, t, s).ln();
            weighted_kernel(lw, kernel_argument(input.ext.p(), t, s), order, cfg.endpoint_cutoff)
        },
        cfg,
    )?;
    if !r.converged {
        return Err(Error::NonConvergence {
            what: "extended Appell integral",
            iterations: r.nodes_used,
        });
    }
    Ok(pre * r.value)
}

/// Whether `auto` would take the series route.
pub fn prefers_series(appell: &AppellParams) -> bool {
    if appell.x.norm() > 0.9 || appell.y.norm() > 0.9 {
        return false;
    }
    let gap = appell.c1 - appell.b1;
    if is_nonpositive_integer(gap) || is_nonpositive_integer(appell.c1) {
        return false;
    }
    matches!(beta(appell.b1, gap), Ok(v) if v != c(0.0) && v.norm().is_finite())
}

/// `F_{1,p,ν}` by the route `method.route` selects.
pub fn f1pv(input: &ExtendedAppellInput, method: &EvaluationMethod) -> Result<ComplexScalar> {
    reject_degenerate_gap(&input.appell)?;
    match method.route {
        Route::Series => f1pv_series(input, method),
        Route::Integral => f1pv_integral(input, method),
        Route::Auto => {
            if prefers_series(&input.appell) {
                f1pv_series(input, method)
            } else {
                f1pv_integral(input, method)
            }
        }
    }
}

/// `x / (x - 1)`.
pub fn mobius(x: ComplexScalar) -> Result<ComplexScalar> {
    if x == c(1.0) {
        return Err(Error::domain("x/(x-1) is undefined at x = 1"));
    }
    Ok(x / (x - 1.0))
}

/// Right-hand side of the transformation
/// `(1-x)^{-b2}(1-y)^{-b3} F_{1,p,ν}(c1-b1, b2, b3; c1; x/(x-1), y/(y-1))`,
/// evaluated by the integral route.
pub fn f1pv_transform(input: &ExtendedAppellInput, method: &EvaluationMethod) -> Result<ComplexScalar> {
    let a = &input.appell;
    a.check_integral_domain()?;
    let gap = a.c1 - a.b1;
    if !(gap.re > 0.0) {
        return Err(Error::domain(format!(
            "transformation needs Re(c1 - b1) > 0, got c1 - b1 = {gap}"
        )));
    }
    let (tx, ty) = (mobius(a.x)?, mobius(a.y)?);
    let inner = ExtendedAppellInput::new(AppellParams::new(gap, a.b2, a.b3, a.c1, tx, ty), input.ext);
    let (ex, ey) = match method.pairing {
        ExponentPairing::SeriesConsistent => (a.b2, a.b3),
        ExponentPairing::AsPrinted => (a.b3, a.b2),
    };
    let pre = (-ex * (1.0 - a.x).ln() - ey * (1.0 - a.y).ln()).exp();
    Ok(pre * f1pv_integral(&inner, &method.with_route(Route::Integral))?)
}

/// `∂^{M+N}/∂x^M ∂y^N F_{1,p,ν}` as
/// `(b1)_{M+N}(b2)_M(b3)_N/(c1)_{M+N} · F_{1,p,ν}(b1+M+N, b2+M, b3+N; c1+M+N; x, y)`.
pub fn f1pv_derivative(
    input: &ExtendedAppellInput,
    m: usize,
    n: usize,
    method: &EvaluationMethod,
) -> Result<ComplexScalar> {
    let a = &input.appell;
    let k = (m + n) as f64;
    let cc = pochhammer(a.c1, c(k))?;
    if cc == c(0.0) {
        return Err(Error::Pole {
            function: "1/(c1)_{M+N}",
            at: a.c1,
        });
    }
    let pre = pochhammer(a.b1, c(k))? * pochhammer(a.b2, c(m as f64))? * pochhammer(a.b3, c(n as f64))? / cc;
    let shifted = AppellParams::new(a.b1 + k, a.b2 + m as f64, a.b3 + n as f64, a.c1 + k, a.x, a.y);
    Ok(pre * f1pv(&input.with_appell(shifted), method)?)
}

fn recursion(input: &ExtendedAppellInput, n: usize, method: &EvaluationMethod, on_b2: bool) -> Result<ComplexScalar> {
    if n == 0 {
        return Err(Error::domain("recursion step count must be at least 1"));
    }
    let a = &input.appell;
    a.check_series_domain()?;
    let gap = reject_degenerate_gap(a)?;
    let ctl = method.series_control();
    let mut diag = ExtendedDiagonal::new(a.b1, gap, &input.ext, &method.quadrature, diagonal_chunk(a.x, a.y, method.tol) + 1);
    let mut total = series_on_diagonal(&mut diag, 0, a.b2, a.b3, a, &ctl)?;
    let v = if on_b2 { a.x } else { a.y };
    if v == c(0.0) {
        return Ok(total);
    }
    let mut sum = c(0.0);
    for l in 1..=n {
        let (b2, b3) = if on_b2 {
            (a.b2 + l as f64, a.b3)
        } else {
            (a.b2, a.b3 + l as f64)
        };
        sum += series_on_diagonal(&mut diag, 1, b2, b3, a, &ctl)?;
    }
    total += a.b1 * v / a.c1 * sum;
    Ok(total)
}

/// `F_{1,p,ν}(b1,b2,b3;c1;x,y) + (b1 x/c1) Σ_{l=1}^{n} F_{1,p,ν}(b1+1, b2+l, b3; c1+1; x, y)`,
/// which equals `F_{1,p,ν}` with `b2 + n`.
pub fn f1pv_recursion_b2(input: &ExtendedAppellInput, n: usize, method: &EvaluationMethod) -> Result<ComplexScalar> {
    recursion(input, n, method, true)
}

/// Mirror of [`f1pv_recursion_b2`] in `(b3, y)`.
pub fn f1pv_recursion_b3(input: &ExtendedAppellInput, n: usize, method: &EvaluationMethod) -> Result<ComplexScalar> {
    recursion(input, n, method, false)
}

struct RealBoundInput {
    b1: f64,
    b2: f64,
    b3: f64,
    c1: f64,
    x: f64,
    y: f64,
    nu: f64,
    p: num_complex::Complex64,
}

fn real_bound_input(input: &ExtendedAppellInput) -> Result<RealBoundInput> {
    let a = &input.appell;
    for (name, v) in [("b1", a.b1), ("b2", a.b2), ("b3", a.b3), ("c1", a.c1), ("x", a.x), ("y", a.y)] {
        if v.im != 0.0 {
            return Err(Error::domain(format!("bound needs real {name}, got {v}")));
        }
    }
    let r = RealBoundInput {
        b1: a.b1.re,
        b2: a.b2.re,
        b3: a.b3.re,
        c1: a.c1.re,
        x: a.x.re,
        y: a.y.re,
        nu: input.ext.nu(),
        p: input.ext.p(),
    };
    let gap = r.c1 - r.b1;
    if !(r.b1 > 0.0 && gap > 0.0) {
        return Err(Error::domain(format!("bound needs b1 > 0 and c1 - b1 > 0, got b1 = {}, c1 = {}", r.b1, r.c1)));
    }
    if !(r.x < 1.0 && r.y < 1.0) {
        return Err(Error::domain(format!("bound needs real x, y < 1, got x = {}, y = {}", r.x, r.y)));
    }
    Ok(r)
}

/// `2^ν |p|^{ν+1} / (√π (Re p)^{2ν+1}) · Γ(ν+1/2) · B(b1+ν, c1-b1+ν)/B(b1, c1-b1)`,
/// the part of the bound shared by both forms.
fn bound_prefactor(r: &RealBoundInput) -> Result<f64> {
    let gap = r.c1 - r.b1;
    let nu = r.nu;
    let lead = 2f64.powf(nu) * r.p.norm().powf(nu + 1.0) / (PI.sqrt() * r.p.re.powf(2.0 * nu + 1.0));
    let g = gamma(c(nu + 0.5))?.re;
    let ratio = beta(c(r.b1 + nu), c(gap + nu))?.re / beta(c(r.b1), c(gap))?.re;
    Ok(lead * g * ratio)
}

/// Upper bound on `|F_{1,p,ν}|` for real parameters:
/// the shared prefactor times `F1(b1+ν, b2, b3; c1+2ν; x, y)`.
pub fn f1pv_bound(input: &ExtendedAppellInput, method: &EvaluationMethod) -> Result<f64> {
    let r = real_bound_input(input)?;
    let pre = bound_prefactor(&r)?;
    let shifted = AppellParams::real(r.b1 + r.nu, r.b2, r.b3, r.c1 + 2.0 * r.nu, r.x, r.y);
    let f1 = if r.x.abs() < 0.9 && r.y.abs() < 0.9 {
        appell_f1_series(&shifted, &method.series_control())?
    } else {
        appell_f1_integral(&shifted, &method.quadrature)?
    };
    Ok(pre * f1.re)
}

/// The bound without the `F1` factor, available when both power factors are at
/// most one on (0, 1): `x, y < 0` with `b2, b3 > 0`, or `x, y > 0` with `b2, b3 < 0`.
pub fn f1pv_simple_bound(input: &ExtendedAppellInput) -> Result<Option<f64>> {
    let r = real_bound_input(input)?;
    let damped = (r.x < 0.0 && r.y < 0.0 && r.b2 > 0.0 && r.b3 > 0.0)
        || (r.x > 0.0 && r.y > 0.0 && r.b2 < 0.0 && r.b3 < 0.0);
    if !damped {
        return Ok(None);
    }
    Ok(Some(bound_prefactor(&r)?))
}
