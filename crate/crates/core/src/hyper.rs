//! Generalized hypergeometric series and the classical Appell `F1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_unit_interval, QuadratureConfig};
use crate::scalar::{as_real_integer, beta, c, is_nonpositive_integer, ln_gamma, ComplexScalar};

/// Stopping rule for power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Relative size of the last terms at which summation stops.
    pub tol: f64,
    /// Cap on the number of terms per summation index.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_terms: 4000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfqParams {
    pub numer: Vec<ComplexScalar>,
    pub denom: Vec<ComplexScalar>,
    pub z: ComplexScalar,
}

impl PfqParams {
    pub fn new(numer: Vec<ComplexScalar>, denom: Vec<ComplexScalar>, z: ComplexScalar) -> Self {
        Self { numer, denom, z }
    }

    /// `ω = Σβ − Σα`.
    pub fn omega(&self) -> ComplexScalar {
        self.denom.iter().sum::<ComplexScalar>() - self.numer.iter().sum::<ComplexScalar>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvergenceClass {
    Absolute,
    Conditional,
    Divergent,
}

fn terminates(numer: &[ComplexScalar]) -> bool {
    numer.iter().any(|a| is_nonpositive_integer(*a))
}

/// Sums `pFq(α; β; z)` by the term ratio
/// `t_{n+1} = t_n · Π(α_j+n) / Π(β_j+n) · z/(n+1)`.
pub fn pfq(params: &PfqParams, max_terms: usize) -> Result<ComplexScalar> {
    pfq_with_tol(params, 1e-16, max_terms)
}

pub fn pfq_with_tol(params: &PfqParams, tol: f64, max_terms: usize) -> Result<ComplexScalar> {
    pfq_with_magnitude(params, tol, max_terms).map(|(v, _)| v)
}

/// The series value together with `Σ|t_n|`, whose ratio to `|value|` measures cancellation.
pub(crate) fn pfq_with_magnitude(params: &PfqParams, tol: f64, max_terms: usize) -> Result<(ComplexScalar, f64)> {
    let p = params.numer.len();
    let q = params.denom.len();
    if let Some(b) = params.denom.iter().find(|b| is_nonpositive_integer(**b)) {
        return Err(Error::Pole {
            function: "pFq denominator",
            at: *b,
        });
    }
    if p > q + 1 && !terminates(&params.numer) {
        return Err(Error::domain(format!("{p}F{q} diverges for z != 0")));
    }
    if p == q + 1 && params.z.norm() >= 1.0 && !terminates(&params.numer) {
        return Err(Error::domain(format!(
            "{p}F{q} series needs |z| < 1, got |z| = {}",
            params.z.norm()
        )));
    }
    let mut term = c(1.0);
    let mut sum = c(1.0);
    let mut magnitude = 1.0;
    let mut quiet = 0;
    for n in 0..max_terms {
        let nf = n as f64;
        let mut ratio = params.z / (nf + 1.0);
        for a in &params.numer {
            ratio *= a + nf;
        }
        for b in &params.denom {
            ratio /= b + nf;
        }
        term *= ratio;
        sum += term;
        magnitude += term.norm();
        if term.norm() <= tol * sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok((sum, magnitude));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "pFq series",
        iterations: max_terms,
    })
}

/// Convergence on `|z| = 1` of a `q+1Fq` series, decided by `Re ω`.
pub fn pfq_unit_circle_class(params: &PfqParams) -> Result<ConvergenceClass> {
    if params.numer.len() != params.denom.len() + 1 {
        return Err(Error::domain(format!(
            "unit-circle classification needs p = q + 1, got p = {}, q = {}",
            params.numer.len(),
            params.denom.len()
        )));
    }
    if (params.z.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::domain("unit-circle classification needs |z| = 1"));
    }
    let w = params.omega().re;
    let at_one = (params.z - 1.0).norm() <= 1e-12;
    Ok(if w > 0.0 {
        ConvergenceClass::Absolute
    } else if w > -1.0 && !at_one {
        ConvergenceClass::Conditional
    } else {
        ConvergenceClass::Divergent
    })
}

/// Parameters of `F1(b1, b2, b3; c1; x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppellParams {
    pub b1: ComplexScalar,
    pub b2: ComplexScalar,
    pub b3: ComplexScalar,
    pub c1: ComplexScalar,
    pub x: ComplexScalar,
    pub y: ComplexScalar,
}

impl AppellParams {
    pub fn new(
        b1: ComplexScalar,
        b2: ComplexScalar,
        b3: ComplexScalar,
        c1: ComplexScalar,
        x: ComplexScalar,
        y: ComplexScalar,
    ) -> Self {
        Self { b1, b2, b3, c1, x, y }
    }

    pub fn real(b1: f64, b2: f64, b3: f64, c1: f64, x: f64, y: f64) -> Self {
        Self::new(c(b1), c(b2), c(b3), c(c1), c(x), c(y))
    }

    /// `(b1, b3, b2; c1; y, x)`, the image under the variable swap.
    pub fn swapped(&self) -> Self {
        Self {
            b2: self.b3,
            b3: self.b2,
            x: self.y,
            y: self.x,
            ..*self
        }
    }

    pub fn check_series_domain(&self) -> Result<()> {
        if is_nonpositive_integer(self.c1) {
            return Err(Error::Pole {
                function: "F1 (c1)",
                at: self.c1,
            });
        }
        if self.x.norm() >= 1.0 || self.y.norm() >= 1.0 {
            return Err(Error::domain(format!(
                "double series needs |x| < 1 and |y| < 1, got x = {}, y = {}",
                self.x, self.y
            )));
        }
        Ok(())
    }

    pub fn check_integral_domain(&self) -> Result<()> {
        if !(self.c1.re > self.b1.re && self.b1.re > 0.0) {
            return Err(Error::domain(format!(
                "integral representation needs Re(c1) > Re(b1) > 0, got b1 = {}, c1 = {}",
                self.b1, self.c1
            )));
        }
        for (name, v) in [("x", self.x), ("y", self.y)] {
            let w = 1.0 - v;
            if w.im == 0.0 && w.re <= 0.0 {
                return Err(Error::domain(format!(
                    "need |arg(1 - {name})| < pi, got {name} = {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `1 - v·t`, evaluated from whichever of `t`, `1 - t` is accurate.
pub(crate) fn one_minus(v: ComplexScalar, t: f64, s: f64) -> ComplexScalar {
    if t <= 0.5 {
        1.0 - v * t
    } else {
        (1.0 - v) + v * s
    }
}

/// Single-index coefficients `(b)_m v^m / m!`; `None` past a terminating index.
struct Binomial {
    b: ComplexScalar,
    v: ComplexScalar,
    values: Vec<ComplexScalar>,
    last: Option<usize>,
}

impl Binomial {
    fn new(b: ComplexScalar, v: ComplexScalar) -> Self {
        let last = if v == c(0.0) {
            Some(0)
        } else {
            as_real_integer(b).filter(|n| *n <= 0).map(|n| (-n) as usize)
        };
        Self {
            b,
            v,
            values: vec![c(1.0)],
            last,
        }
    }

    fn get(&mut self, m: usize) -> Option<ComplexScalar> {
        if matches!(self.last, Some(l) if m > l) {
            return None;
        }
        while self.values.len() <= m {
            let k = self.values.len() - 1;
            let next = self.values[k] * (self.b + k as f64) * self.v / (k as f64 + 1.0);
            self.values.push(next);
        }
        Some(self.values[m])
    }
}

/// Sums `Σ_{m,n} D_{m+n} (b2)_m (b3)_n x^m y^n / (m! n!)` over growing square
/// blocks; stops after three consecutive blocks whose boundary terms are all
/// below `tol · |partial sum|`.
pub(crate) fn double_series<D>(
    mut diagonal: D,
    b2: ComplexScalar,
    b3: ComplexScalar,
    x: ComplexScalar,
    y: ComplexScalar,
    ctl: &SeriesControl,
) -> Result<ComplexScalar>
where
    D: FnMut(usize) -> Result<ComplexScalar>,
{
    let mut xs = Binomial::new(b2, x);
    let mut ys = Binomial::new(b3, y);
    let mut diag: Vec<ComplexScalar> = Vec::new();
    let mut d = |k: usize, diag: &mut Vec<ComplexScalar>| -> Result<ComplexScalar> {
        while diag.len() <= k {
            diag.push(diagonal(diag.len())?);
        }
        Ok(diag[k])
    };
    let mut sum = c(0.0);
    let mut quiet = 0;
    for big in 0..ctl.max_terms {
        let mut boundary = 0.0f64;
        if let Some(xm) = xs.get(big) {
            for n in 0..=big {
                let Some(yn) = ys.get(n) else { break };
                let term = d(big + n, &mut diag)? * xm * yn;
                boundary = boundary.max(term.norm());
                sum += term;
            }
        }
        if let Some(yn) = ys.get(big) {
            for m in 0..big {
                let Some(xm) = xs.get(m) else { break };
                let term = d(m + big, &mut diag)? * xm * yn;
                boundary = boundary.max(term.norm());
                sum += term;
            }
        }
        if boundary <= ctl.tol * sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "double series",
        iterations: ctl.max_terms,
    })
}

/// `F1` by its double power series with diagonal weights `(b1)_k/(c1)_k`.
pub fn appell_f1_series(params: &AppellParams, ctl: &SeriesControl) -> Result<ComplexScalar> {
    params.check_series_domain()?;
    let mut ratio = c(1.0);
    let mut k_done = 0usize;
    double_series(
        |k| {
            while k_done < k {
                ratio *= (params.b1 + k_done as f64) / (params.c1 + k_done as f64);
                k_done += 1;
            }
            Ok(ratio)
        },
        params.b2,
        params.b3,
        params.x,
        params.y,
        ctl,
    )
}

/// `F1` by the series with diagonal weights `B(b1+k, c1−b1) / B(b1, c1−b1)`,
/// each computed from log-Gamma directly.
pub fn appell_f1_series_beta_form(params: &AppellParams, ctl: &SeriesControl) -> Result<ComplexScalar> {
    params.check_series_domain()?;
    let gap = params.c1 - params.b1;
    let base = beta(params.b1, gap)?;
    if base == c(0.0) {
        return Err(Error::Pole {
            function: "1/B(b1, c1-b1)",
            at: gap,
        });
    }
    let ln_gap = ln_gamma(gap)?;
    double_series(
        |k| {
            let kf = k as f64;
            let num = params.b1 + kf;
            if is_nonpositive_integer(num) {
                return Ok(c(0.0));
            }
            let lb = ln_gamma(num)? + ln_gap - ln_gamma(params.c1 + kf)?;
            Ok(lb.exp() / base)
        },
        params.b2,
        params.b3,
        params.x,
        params.y,
        ctl,
    )
}

/// `F1` by the Euler-type integral over (0, 1).
pub fn appell_f1_integral(params: &AppellParams, cfg: &QuadratureConfig) -> Result<ComplexScalar> {
    params.check_integral_domain()?;
    let gap = params.c1 - params.b1;
    let pre = (ln_gamma(params.c1)? - ln_gamma(params.b1)? - ln_gamma(gap)?).exp();
    let a = params.b1 - 1.0;
    let b = gap - 1.0;
    let r = integrate_unit_interval(
        |t, s| {
            let e = a * t.ln() + b * s.ln()
                - params.b2 * one_minus(params.x, t, s).ln()
                - params.b3 * one_minus(params.y, t, s).ln();
            e.exp()
        },
        cfg,
    )?;
    if !r.converged {
        return Err(Error::NonConvergence {
            what: "F1 Euler integral",
            iterations: r.nodes_used,
        });
    }
    Ok(pre * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rel(a: ComplexScalar, b: ComplexScalar) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn complex(re: f64, im: f64) -> ComplexScalar {
        Complex64::new(re, im)
    }

    #[test]
    fn pfq_binomial_collapse() {
        let z = c(0.37);
        let p = PfqParams::new(vec![c(1.3), c(2.2)], vec![c(2.2)], z);
        let v = pfq(&p, 10_000).unwrap();
        assert!(rel(v, c((1.0 - 0.37f64).powf(-1.3))) < 1e-14);
    }

    #[test]
    fn pfq_at_zero_is_one() {
        let p = PfqParams::new(vec![c(1.3), c(-2.5)], vec![c(0.7), c(4.0), c(5.0)], c(0.0));
        assert_eq!(pfq(&p, 10).unwrap(), c(1.0));
    }

    #[test]
    fn pfq_exponential_and_errors() {
        let p = PfqParams::new(vec![], vec![], c(-3.0));
        assert!(rel(pfq(&p, 1000).unwrap(), c((-3.0f64).exp())) < 1e-14);
        let p = PfqParams::new(vec![c(1.0), c(1.0)], vec![c(2.0)], c(1.5));
        assert!(pfq(&p, 1000).is_err());
        let p = PfqParams::new(vec![c(1.0)], vec![c(-2.0)], c(0.5));
        assert!(matches!(pfq(&p, 1000), Err(Error::Pole { .. })));
        let p = PfqParams::new(vec![c(1.0), c(1.0)], vec![c(2.0)], c(0.9999));
        assert!(matches!(pfq(&p, 50), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn pfq_terminating() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, cc, z) = (1.5, 2.5, 3.0);
        let p = PfqParams::new(vec![c(-2.0), c(b)], vec![c(cc)], c(z));
        let expect = 1.0 - 2.0 * b * z / cc + b * (b + 1.0) * z * z / (cc * (cc + 1.0));
        assert!(rel(pfq(&p, 100).unwrap(), c(expect)) < 1e-14);
    }

    #[test]
    fn unit_circle_classes() {
        let cls = |a: Vec<f64>, b: Vec<f64>, z: ComplexScalar| {
            pfq_unit_circle_class(&PfqParams::new(
                a.into_iter().map(c).collect(),
                b.into_iter().map(c).collect(),
                z,
            ))
        };
        assert_eq!(cls(vec![1.0, 1.0], vec![3.0], c(1.0)).unwrap(), ConvergenceClass::Absolute);
        assert_eq!(cls(vec![1.0, 1.0], vec![2.0], c(-1.0)).unwrap(), ConvergenceClass::Conditional);
        assert_eq!(cls(vec![1.0, 1.0], vec![2.0], c(1.0)).unwrap(), ConvergenceClass::Divergent);
        assert_eq!(cls(vec![2.0, 2.0], vec![1.0], c(-1.0)).unwrap(), ConvergenceClass::Divergent);
        assert!(cls(vec![1.0], vec![3.0], c(1.0)).is_err());
        assert!(cls(vec![1.0, 1.0], vec![3.0], c(0.5)).is_err());
    }

    #[test]
    fn f1_trivial_reductions() {
        let ctl = SeriesControl::default();
        let p = AppellParams::real(1.2, 0.7, -0.4, 2.9, 0.0, 0.0);
        assert!(rel(appell_f1_series(&p, &ctl).unwrap(), c(1.0)) < 1e-15);
        // b2 = 0 collapses onto 2F1(b1, b3; c1; y)
        let p = AppellParams::real(1.2, 0.0, 0.8, 2.9, 0.6, -0.45);
        let f = appell_f1_series(&p, &ctl).unwrap();
        let g = pfq(&PfqParams::new(vec![c(1.2), c(0.8)], vec![c(2.9)], c(-0.45)), 10_000).unwrap();
        assert!(rel(f, g) < 1e-13);
    }

    #[test]
    fn f1_beta_form_agrees() {
        let ctl = SeriesControl { tol: 1e-15, ..Default::default() };
        let p = AppellParams::real(1.3, -0.7, 1.6, 3.1, 0.55, -0.6);
        let a = appell_f1_series(&p, &ctl).unwrap();
        let b = appell_f1_series_beta_form(&p, &ctl).unwrap();
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn f1_integral_reductions() {
        let cfg = QuadratureConfig::default().with_tol(1e-13);
        let p = AppellParams::real(2.0, 1.0, 1.0, 4.0, 0.0, 0.0);
        assert!(rel(appell_f1_integral(&p, &cfg).unwrap(), c(1.0)) < 1e-13);
        // x = y merges the power factors: 2F1(b1, b2 + b3; c1; x)
        let p = AppellParams::real(1.1, 0.6, -1.3, 2.7, 0.35, 0.35);
        let f = appell_f1_integral(&p, &cfg).unwrap();
        let g = pfq(&PfqParams::new(vec![c(1.1), c(0.6 - 1.3)], vec![c(2.7)], c(0.35)), 10_000).unwrap();
        assert!(rel(f, g) < 1e-11);
    }

    #[test]
    fn f1_domain_errors() {
        let ctl = SeriesControl::default();
        let cfg = QuadratureConfig::default();
        assert!(appell_f1_series(&AppellParams::real(1.0, 1.0, 1.0, 2.0, 1.2, 0.0), &ctl).is_err());
        assert!(appell_f1_series(&AppellParams::real(1.0, 1.0, 1.0, -2.0, 0.2, 0.0), &ctl).is_err());
        assert!(appell_f1_integral(&AppellParams::real(2.0, 1.0, 1.0, 1.5, 0.2, 0.0), &cfg).is_err());
        assert!(appell_f1_integral(&AppellParams::real(1.0, 1.0, 1.0, 2.0, 1.5, 0.0), &cfg).is_err());
        // outside the unit disk but off the cut: fine for the integral
        assert!(appell_f1_integral(&AppellParams::real(1.0, 1.0, 1.0, 2.0, -3.0, 0.5), &cfg).is_ok());
    }

    #[test]
    fn f1_polynomial_case_terminates() {
        // b2 = -2: only m <= 2 contributes
        let ctl = SeriesControl::default();
        let p = AppellParams::real(1.0, -2.0, 0.0, 2.0, 0.9, 0.5);
        // F1(1,-2,0;2;x,y) = 2F1(1,-2;2;x) = 1 - x + x²/3
        let x: f64 = 0.9;
        let expect = 1.0 - x + x * x / 3.0;
        assert!(rel(appell_f1_series(&p, &ctl).unwrap(), c(expect)) < 1e-14);
    }

    #[test]
    fn f1_symmetry() {
        let ctl = SeriesControl { tol: 1e-15, ..Default::default() };
        let p = AppellParams::new(c(0.9), complex(0.3, 0.4), c(1.7), c(2.2), c(0.4), complex(-0.2, 0.3));
        let a = appell_f1_series(&p, &ctl).unwrap();
        let b = appell_f1_series(&p.swapped(), &ctl).unwrap();
        assert!(rel(a, b) < 1e-12);
    }
}
