//! Slow reference routes that share no code with the library evaluators:
//! plain trapezoid rules and brute-force double sums.
//!
//! Each integrand here vanishes with all its derivatives at the ends of its
//! interval (or is even and negligible at the truncation point), so the
//! equally spaced trapezoid rule converges faster than any power of the step.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hyper::AppellParams;
use crate::scalar::{c, ln_gamma, ComplexScalar};

/// Compensated (Neumaier) complex sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: ComplexScalar,
    comp: ComplexScalar,
}

impl NeumaierSum {
    pub fn add(&mut self, v: ComplexScalar) {
        let step = |s: f64, x: f64, comp: &mut f64| {
            let t = s + x;
            if s.abs() >= x.abs() {
                *comp += (s - t) + x;
            } else {
                *comp += (x - t) + s;
            }
            t
        };
        self.sum.re = step(self.sum.re, v.re, &mut self.comp.re);
        self.sum.im = step(self.sum.im, v.im, &mut self.comp.im);
    }

    pub fn value(&self) -> ComplexScalar {
        self.sum + self.comp
    }
}

/// `e^{x} K_ν(x)` for real `x > 0` by the trapezoid rule on
/// `∫₀^T e^{-2x sinh²(t/2)} cosh(νt) dt` with `nodes` panels.
pub fn bessel_k_scaled(nu: f64, x: f64, nodes: usize) -> f64 {
    let nu = nu.abs();
    // the log-integrand νt - x(cosh t - 1) must be 60 below its start
    let mut t_end = 1.0f64;
    while nu * t_end - x * (t_end.cosh() - 1.0) > -60.0 {
        t_end *= 1.25;
    }
    let h = t_end / nodes as f64;
    let f = |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * x * s * s).exp() * (nu * t).cosh()
    };
    let mut sum = 0.5 * f(0.0);
    for k in 1..=nodes {
        sum += f(k as f64 * h);
    }
    sum * h
}

pub fn bessel_k(nu: f64, x: f64, nodes: usize) -> f64 {
    bessel_k_scaled(nu, x, nodes) * (-x).exp()
}

/// Interior nodes of the `n`-panel trapezoid rule on (0, 1), as `(t, 1 - t)`.
fn unit_nodes(n: usize) -> impl Iterator<Item = (f64, f64)> {
    (1..n).map(move |k| {
        let t = k as f64 / n as f64;
        (t, (n - k) as f64 / n as f64)
    })
}

const K_NODES: usize = 400;

/// `√(2p/π) t^{-3/2}(1-t)^{-3/2} K_{ν+1/2}(p/(t(1-t)))` at one node, in
/// log-magnitude form; `None` when negligible.
fn kernel_weight(p: f64, nu: f64, t: f64, s: f64) -> Option<f64> {
    let z = p / (t * s);
    if z > 800.0 {
        return None;
    }
    Some((2.0 * p / PI).sqrt() * bessel_k(nu + 0.5, z, K_NODES) / (t * s).powf(1.5))
}

/// `B_{p,ν}(x + k, y)` for `k < count`, by the `n`-panel trapezoid rule.
pub fn extended_beta_family(x: f64, y: f64, count: usize, p: f64, nu: f64, n: usize) -> Vec<f64> {
    let mut acc = vec![0.0; count];
    for (t, s) in unit_nodes(n) {
        let Some(w) = kernel_weight(p, nu, t, s) else { continue };
        let mut v = w * t.powf(x) * s.powf(y);
        for a in acc.iter_mut() {
            *a += v;
            v *= t;
        }
    }
    acc.into_iter().map(|a| a / n as f64).collect()
}

pub fn extended_beta(x: f64, y: f64, p: f64, nu: f64, n: usize) -> f64 {
    extended_beta_family(x, y, 1, p, nu, n)[0]
}

/// Chaudhry's `B(x, y; p)` by the `n`-panel trapezoid rule.
pub fn chaudhry_beta(x: f64, y: f64, p: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    for (t, s) in unit_nodes(n) {
        let e = (x - 1.0) * t.ln() + (y - 1.0) * s.ln() - p / (t * s);
        if e > -745.0 {
            acc += e.exp();
        }
    }
    acc / n as f64
}

fn real_params(a: &AppellParams) -> Result<[f64; 6]> {
    let v = [a.b1, a.b2, a.b3, a.c1, a.x, a.y];
    if v.iter().any(|z| z.im != 0.0) {
        return Err(Error::domain("reference routes take real parameters"));
    }
    Ok(v.map(|z| z.re))
}

fn classical_beta(a: f64, b: f64) -> Result<f64> {
    Ok((ln_gamma(c(a))? + ln_gamma(c(b))? - ln_gamma(c(a + b))?).exp().re)
}

/// `F_{1,p,ν}` by the `terms × terms` double sum with trapezoid Beta values.
pub fn f1pv_double_sum(a: &AppellParams, p: f64, nu: f64, terms: usize, n: usize) -> Result<ComplexScalar> {
    let [b1, b2, b3, c1, x, y] = real_params(a)?;
    let gap = c1 - b1;
    let norm = classical_beta(b1, gap)?;
    let diag = extended_beta_family(b1, gap, 2 * terms, p, nu, n);
    let mut xs = vec![1.0; terms];
    let mut ys = vec![1.0; terms];
    for m in 1..terms {
        let k = (m - 1) as f64;
        xs[m] = xs[m - 1] * (b2 + k) * x / (k + 1.0);
        ys[m] = ys[m - 1] * (b3 + k) * y / (k + 1.0);
    }
    let mut sum = NeumaierSum::default();
    for m in 0..terms {
        for j in 0..terms {
            sum.add(c(diag[m + j] * xs[m] * ys[j]));
        }
    }
    Ok(sum.value() / norm)
}

/// `F_{1,p,ν}` by the `n`-panel trapezoid rule on its integral representation.
pub fn f1pv_integral(a: &AppellParams, p: f64, nu: f64, n: usize) -> Result<ComplexScalar> {
    let [b1, b2, b3, c1, x, y] = real_params(a)?;
    let gap = c1 - b1;
    if !(b1 > 0.0 && gap > 0.0 && x < 1.0 && y < 1.0) {
        return Err(Error::domain("reference integral needs c1 > b1 > 0 and x, y < 1"));
    }
    let pre = 1.0 / classical_beta(b1, gap)?;
    let mut sum = NeumaierSum::default();
    for (t, s) in unit_nodes(n) {
        let Some(w) = kernel_weight(p, nu, t, s) else { continue };
        let v = w * t.powf(b1) * s.powf(gap) * (1.0 - x * t).powf(-b2) * (1.0 - y * t).powf(-b3);
        sum.add(c(v));
    }
    Ok(sum.value() * pre / n as f64)
}

/// `Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt` by the trapezoid rule after
/// `t = x + e^u`, over `u ∈ [-60, ln 800]`.
pub fn upper_incomplete_gamma(a: f64, x: f64, nodes: usize) -> f64 {
    let g = |u: f64| {
        let v = u.exp();
        ((a - 1.0) * (x + v).ln() - x - v + u).exp()
    };
    let (lo, hi) = (-60.0f64, (800.0f64).ln());
    let h = (hi - lo) / nodes as f64;
    let mut sum = 0.5 * (g(lo) + g(hi));
    for k in 1..nodes {
        sum += g(lo + k as f64 * h);
    }
    sum * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_half_order_matches_closed_form() {
        for x in [0.01, 0.3, 1.0, 7.0, 300.0] {
            let k = bessel_k(0.5, x, 400);
            let exact = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k - exact).abs() <= 1e-13 * exact, "x={x}");
        }
    }

    #[test]
    fn chaudhry_at_tiny_p_is_classical() {
        let v = chaudhry_beta(2.0, 2.0, 1e-12, 20_000);
        assert!((v - 1.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn neumaier_recovers_small_terms() {
        let mut s = NeumaierSum::default();
        for v in [1e16, 1.0, -1e16, 1.0] {
            s.add(c(v));
        }
        assert_eq!(s.value().re, 2.0);
    }

    #[test]
    fn incomplete_gamma_integer_order() {
        // Γ(2, x) = (1 + x) e^{-x}
        for x in [0.1, 1.0, 5.0, 30.0] {
            let v = upper_incomplete_gamma(2.0, x, 4000);
            let exact = (1.0 + x) * (-x).exp();
            assert!((v - exact).abs() < 1e-12 * exact, "x={x}: {v} vs {exact}");
        }
    }
}
