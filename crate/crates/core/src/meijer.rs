//! Meijer G for the four shapes tied to `K_ν`: `G^{2,0}_{1,2}`, `G^{2,1}_{1,2}`,
//! `G^{2,0}_{0,2}` and `G^{4,0}_{0,4}`.
//!
//! The general evaluator sums residues of the `Γ(β_j - ζ)` pole families
//! (one `pF_{q-1}` series per family). When that sum cancels badly, which
//! happens for large arguments, the value is taken from the matching `K_ν`
//! closed form instead.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_k, bessel_k_scaled, BesselOrder};
use crate::error::{Error, Result};
use crate::ext_appell::{f1pv_integral, EvaluationMethod, ExponentPairing, ExtendedAppellInput};
use crate::ext_beta::kernel_argument;
use crate::hyper::{one_minus, pfq_with_magnitude, PfqParams};
use crate::quadrature::integrate_unit_interval;
use crate::report::{params, VerificationRecord};
use crate::scalar::{c, cos_pi, gamma, ln_gamma, rgamma, ComplexScalar};

/// Relative perturbation used when two `β_j` of the pole families differ by an integer.
pub const DEGENERACY_EPSILON: f64 = 1e-5;

/// Largest `Σ|terms| / |sum|` the residue sum may show before it is distrusted.
const MAX_CANCELLATION: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GCase {
    G2012,
    G2112,
    G2002,
    G4004,
}

impl GCase {
    /// `(m, n, p, q)`.
    pub fn orders(self) -> (usize, usize, usize, usize) {
        match self {
            GCase::G2012 => (2, 0, 1, 2),
            GCase::G2112 => (2, 1, 1, 2),
            GCase::G2002 => (2, 0, 0, 2),
            GCase::G4004 => (4, 0, 0, 4),
        }
    }

    /// `κ = m + n - (p + q)/2`; the function is defined for `|arg z| < πκ`.
    pub fn kappa(self) -> f64 {
        let (m, n, p, q) = self.orders();
        (m + n) as f64 - (p + q) as f64 / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GSpec {
    pub case: GCase,
    pub alpha: Vec<ComplexScalar>,
    pub beta: Vec<ComplexScalar>,
    pub z: ComplexScalar,
}

impl GSpec {
    pub fn new(case: GCase, alpha: Vec<ComplexScalar>, beta: Vec<ComplexScalar>, z: ComplexScalar) -> Result<Self> {
        let (_, _, p, q) = case.orders();
        if alpha.len() != p || beta.len() != q {
            return Err(Error::domain(format!(
                "{case:?} needs {p} alpha and {q} beta parameters, got {} and {}",
                alpha.len(),
                beta.len()
            )));
        }
        if z == c(0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain(format!("Meijer G argument must be finite and nonzero, got {z}")));
        }
        if z.arg().abs() >= PI * case.kappa() {
            return Err(Error::domain(format!(
                "{case:?} needs |arg z| < {}π, got z = {z}",
                case.kappa()
            )));
        }
        Ok(Self { case, alpha, beta, z })
    }

    fn with_beta(&self, beta: Vec<ComplexScalar>) -> Self {
        Self { beta, ..self.clone() }
    }

    fn degenerate_pair(&self) -> Option<(usize, usize)> {
        let (m, ..) = self.case.orders();
        for h in 0..m {
            for j in h + 1..m {
                let d = self.beta[h] - self.beta[j];
                if d.im.abs() < 1e-12 && (d.re - d.re.round()).abs() < 1e-9 {
                    return Some((h, j));
                }
            }
        }
        None
    }
}

/// Value of the residue sum and `Σ_k |A_k| Σ_n |t_{k,n}|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueSum {
    pub value: ComplexScalar,
    pub magnitude: f64,
}

impl ResidueSum {
    pub fn cancellation(&self) -> f64 {
        self.magnitude / self.value.norm()
    }
}

/// Residue (Slater) sum; fails with [`Error::Degenerate`] when two pole families collide.
pub fn meijer_g_residue(spec: &GSpec) -> Result<ResidueSum> {
    if let Some((h, j)) = spec.degenerate_pair() {
        return Err(Error::Degenerate(format!(
            "beta_{} - beta_{} = {} is an integer",
            h + 1,
            j + 1,
            spec.beta[h] - spec.beta[j]
        )));
    }
    let (m, n, p, q) = spec.case.orders();
    let sign = if (p + m + n) % 2 == 0 { 1.0 } else { -1.0 };
    let arg = sign * spec.z;
    let mut value = c(0.0);
    let mut magnitude = 0.0;
    for k in 0..m {
        let bk = spec.beta[k];
        let mut a = c(1.0);
        // each difference is formed once so that near-degenerate pole families
        // see the same spacing in every factor
        let da: Vec<ComplexScalar> = spec.alpha.iter().map(|al| bk - al).collect();
        let db: Vec<ComplexScalar> = spec.beta.iter().map(|bl| bk - bl).collect();
        for l in 0..m {
            if l != k {
                a *= gamma(-db[l])?;
            }
        }
        for l in 0..n {
            a *= gamma(1.0 + da[l]).map_err(|_| {
                Error::Degenerate(format!("Gamma(1 + beta_{} - alpha_{}) sits on a pole", k + 1, l + 1))
            })?;
        }
        for l in m..q {
            a *= rgamma(1.0 + db[l]);
        }
        for l in n..p {
            a *= rgamma(-da[l]);
        }
        if a == c(0.0) {
            continue;
        }
        a *= (bk * spec.z.ln()).exp();
        let numer = da.iter().map(|d| 1.0 + d).collect();
        let denom = (0..q).filter(|l| *l != k).map(|l| 1.0 + db[l]).collect();
        let (s, mag) = pfq_with_magnitude(&PfqParams::new(numer, denom, arg), 1e-17, 20_000)?;
        value += a * s;
        magnitude += a.norm() * mag;
    }
    Ok(ResidueSum { value, magnitude })
}

/// Residue sum with degenerate spacing resolved by averaging the evaluations
/// at `β_j ± j·ε` (first-order terms cancel).
pub fn meijer_g_residue_regularized(spec: &GSpec) -> Result<ResidueSum> {
    if spec.degenerate_pair().is_none() {
        return meijer_g_residue(spec);
    }
    let (m, ..) = spec.case.orders();
    let shifted = |sign: f64| {
        let beta = spec
            .beta
            .iter()
            .enumerate()
            .map(|(j, b)| if j < m { b + sign * (j + 1) as f64 * DEGENERACY_EPSILON } else { *b })
            .collect();
        meijer_g_residue(&spec.with_beta(beta))
    };
    let (up, down) = (shifted(1.0)?, shifted(-1.0)?);
    Ok(ResidueSum {
        value: 0.5 * (up.value + down.value),
        magnitude: up.magnitude.max(down.magnitude),
    })
}

/// `mantissa · exp(log_factor)`; keeps `e^{±w}` factors out of floating range trouble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled {
    pub mantissa: ComplexScalar,
    pub log_factor: ComplexScalar,
}

impl LogScaled {
    pub fn value(&self) -> ComplexScalar {
        self.mantissa * self.log_factor.exp()
    }
}

fn near(a: ComplexScalar, b: ComplexScalar) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

fn real_order(nu: ComplexScalar) -> Result<BesselOrder> {
    if nu.im.abs() > 1e-12 {
        return Err(Error::domain(format!("closed form needs a real Bessel order, got {nu}")));
    }
    BesselOrder::new(nu.re.abs())
}

/// `G^{2,0}_{0,2}(v | b1, b2) = 2 v^{(b1+b2)/2} K_{b1-b2}(2√v)`.
fn g2002_closed(v: ComplexScalar, b1: ComplexScalar, b2: ComplexScalar) -> Result<LogScaled> {
    let order = real_order(b1 - b2)?;
    let r = 2.0 * v.sqrt();
    Ok(LogScaled {
        mantissa: 2.0 * ((b1 + b2) / 2.0 * v.ln()).exp() * bessel_k_scaled(order, r)?,
        log_factor: -r,
    })
}

/// Closed form through `K_ν` when the parameters have the shape of one of the
/// Bessel reductions; domain error otherwise.
pub fn meijer_g_closed_form(spec: &GSpec) -> Result<LogScaled> {
    let w = spec.z;
    let b = &spec.beta;
    let shape_err = || Error::domain(format!("{:?} parameters have no K closed form", spec.case));
    match spec.case {
        GCase::G2012 | GCase::G2112 => {
            let mu = (b[0] + b[1]) / 2.0;
            let nu = (b[0] - b[1]) / 2.0;
            if !near(spec.alpha[0], mu + 0.5) {
                return Err(shape_err());
            }
            let order = real_order(nu)?;
            let wmu = (mu * w.ln()).exp();
            let ks = bessel_k_scaled(order, w / 2.0)?;
            if spec.case == GCase::G2012 {
                Ok(LogScaled {
                    mantissa: wmu * ks / PI.sqrt(),
                    log_factor: -w,
                })
            } else {
                let cs = cos_pi(nu.re);
                if cs.abs() < 1e-14 {
                    return Err(Error::Degenerate("cos(πν) = 0 in the G^{2,1}_{1,2} closed form".into()));
                }
                Ok(LogScaled {
                    mantissa: wmu * PI.sqrt() * ks / cs,
                    log_factor: c(0.0),
                })
            }
        }
        GCase::G2002 => g2002_closed(w, b[0], b[1]),
        GCase::G4004 => {
            // parameters must split into {A, A + 1/2} and {B, B + 1/2}
            let mut idx = [0usize, 1, 2, 3];
            idx.sort_by(|i, j| b[*i].re.total_cmp(&b[*j].re));
            let pairings = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]];
            for pr in pairings {
                let (a0, a1, b0, b1) = (b[idx[pr[0]]], b[idx[pr[1]]], b[idx[pr[2]]], b[idx[pr[3]]]);
                let (lo_a, hi_a) = if a0.re <= a1.re { (a0, a1) } else { (a1, a0) };
                let (lo_b, hi_b) = if b0.re <= b1.re { (b0, b1) } else { (b1, b0) };
                if near(hi_a - lo_a, c(0.5)) && near(hi_b - lo_b, c(0.5)) {
                    let order = real_order(2.0 * (lo_a - lo_b))?;
                    let r = 4.0 * (w.ln() / 4.0).exp();
                    return Ok(LogScaled {
                        mantissa: 4.0 * PI * ((lo_a + lo_b) / 2.0 * w.ln()).exp() * bessel_k_scaled(order, r)?,
                        log_factor: -r,
                    });
                }
            }
            Err(shape_err())
        }
    }
}

/// How a [`meijer_g`] value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GRoute {
    Residue,
    ResidueRegularized,
    ClosedForm,
}

/// Meijer G by residues, falling back to the `K` closed form when the
/// residue sum cancels by more than six digits.
pub fn meijer_g_traced(spec: &GSpec) -> Result<(ComplexScalar, GRoute)> {
    let route = if spec.degenerate_pair().is_some() {
        GRoute::ResidueRegularized
    } else {
        GRoute::Residue
    };
    let residue = meijer_g_residue_regularized(spec);
    match residue {
        Ok(r) if r.value.norm() > 0.0 && r.cancellation() <= MAX_CANCELLATION => Ok((r.value, route)),
        other => match meijer_g_closed_form(spec) {
            Ok(v) => Ok((v.value(), GRoute::ClosedForm)),
            Err(e) => match other {
                Ok(_) => Err(Error::NonConvergence {
                    what: "Meijer G residue sum (cancellation)",
                    iterations: 0,
                }),
                Err(re) if re.is_domain_like() => Err(re),
                Err(_) => Err(e),
            },
        },
    }
}

pub fn meijer_g(spec: &GSpec) -> Result<ComplexScalar> {
    meijer_g_traced(spec).map(|(v, _)| v)
}

/// The five `K_ν ↔ G` identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KgIdentity {
    /// `K_ν(z) = √π e^z G^{2,0}_{1,2}(2z | 1/2; ν, -ν)`
    ExpG2012,
    /// `K_ν(z) = cos(πν)/√π e^{-z} G^{2,1}_{1,2}(2z | 1/2; ν, -ν)`
    CosG2112,
    /// `K_ν(z) = z^{-μ} 2^{μ-1} G^{2,0}_{0,2}(z²/4 | (μ+ν)/2, (μ-ν)/2)`
    G2002,
    /// `K_ν(z) = cos(πν) (2z)^{-μ} e^{-z}/√π G^{2,1}_{1,2}(2z | μ+1/2; μ+ν, μ-ν)`
    ShiftedG2112,
    /// `K_ν(z) = z^{-μ} 4^{μ-1}/π G^{4,0}_{0,4}(z⁴/256 | (μ+ν)/4, (2+μ+ν)/4, (μ-ν)/4, (2+μ-ν)/4)`
    G4004,
}

impl KgIdentity {
    pub const ALL: [KgIdentity; 5] = [
        KgIdentity::ExpG2012,
        KgIdentity::CosG2112,
        KgIdentity::G2002,
        KgIdentity::ShiftedG2112,
        KgIdentity::G4004,
    ];

    pub fn label(self) -> &'static str {
        match self {
            KgIdentity::ExpG2012 => "k_g2012",
            KgIdentity::CosG2112 => "k_g2112",
            KgIdentity::G2002 => "k_g2002",
            KgIdentity::ShiftedG2112 => "k_g2112_mu",
            KgIdentity::G4004 => "k_g4004",
        }
    }

    /// Whether the identity depends on `μ`.
    pub fn has_mu(self) -> bool {
        matches!(self, KgIdentity::G2002 | KgIdentity::ShiftedG2112 | KgIdentity::G4004)
    }

    /// Whether the identity carries a `cos(πν)` factor.
    pub fn has_cos(self) -> bool {
        matches!(self, KgIdentity::CosG2112 | KgIdentity::ShiftedG2112)
    }
}

/// The G descriptor and the prefactor `P` with `K_ν(z) = P · G`.
pub fn kg_identity_spec(which: KgIdentity, nu: f64, z: ComplexScalar, mu: f64) -> Result<(GSpec, ComplexScalar)> {
    let h = c(0.5);
    let sqrt_pi = PI.sqrt();
    let (nu_c, mu_c) = (c(nu), c(mu));
    let zpow = |e: f64| (e * z.ln()).exp();
    Ok(match which {
        KgIdentity::ExpG2012 => (
            GSpec::new(GCase::G2012, vec![h], vec![nu_c, -nu_c], 2.0 * z)?,
            sqrt_pi * z.exp(),
        ),
        KgIdentity::CosG2112 => (
            GSpec::new(GCase::G2112, vec![h], vec![nu_c, -nu_c], 2.0 * z)?,
            cos_pi(nu) / sqrt_pi * (-z).exp(),
        ),
        KgIdentity::G2002 => (
            GSpec::new(GCase::G2002, vec![], vec![(mu_c + nu) / 2.0, (mu_c - nu) / 2.0], z * z / 4.0)?,
            zpow(-mu) * 2f64.powf(mu - 1.0),
        ),
        KgIdentity::ShiftedG2112 => (
            GSpec::new(GCase::G2112, vec![mu_c + 0.5], vec![mu_c + nu, mu_c - nu], 2.0 * z)?,
            cos_pi(nu) * (-mu * (2.0 * z).ln()).exp() * (-z).exp() / sqrt_pi,
        ),
        KgIdentity::G4004 => (
            GSpec::new(
                GCase::G4004,
                vec![],
                vec![
                    (mu_c + nu) / 4.0,
                    (2.0 + mu_c + nu) / 4.0,
                    (mu_c - nu) / 4.0,
                    (2.0 + mu_c - nu) / 4.0,
                ],
                z.powu(4) / 256.0,
            )?,
            zpow(-mu) * 4f64.powf(mu - 1.0) / PI,
        ),
    })
}

pub const KG_TOL: f64 = 1e-7;

/// Compares `K_ν(z)` with the G side of `which`, the G evaluated by residues only.
pub fn verify_k_g_identity(which: KgIdentity, nu: f64, z: f64, mu: f64) -> Result<VerificationRecord> {
    let (spec, pre) = kg_identity_spec(which, nu, c(z), mu)?;
    let k = bessel_k(BesselOrder::new(nu.abs())?, c(z))?;
    let g = meijer_g_residue(&spec)?;
    Ok(VerificationRecord::compare(
        "meijer",
        format!("{}/nu={nu}/z={z}/mu={mu}", which.label()),
        params([("nu", nu), ("z", z), ("mu", mu)]),
        k,
        pre * g.value,
        KG_TOL,
        format!("bessel_k vs {:?} residue sum", spec.case),
    ))
}

/// The five G-form integral representations of `F_{1,p,ν}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremOneForm {
    ExpG2012,
    CosG2112,
    G2002,
    ShiftedG2112,
    G4004,
}

impl TheoremOneForm {
    pub const ALL: [TheoremOneForm; 5] = [
        TheoremOneForm::ExpG2012,
        TheoremOneForm::CosG2112,
        TheoremOneForm::G2002,
        TheoremOneForm::ShiftedG2112,
        TheoremOneForm::G4004,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TheoremOneForm::ExpG2012 => "int_g2012",
            TheoremOneForm::CosG2112 => "int_g2112",
            TheoremOneForm::G2002 => "int_g2002",
            TheoremOneForm::ShiftedG2112 => "int_g2112_mu",
            TheoremOneForm::G4004 => "int_g4004",
        }
    }

    pub fn has_mu(self) -> bool {
        matches!(self, TheoremOneForm::G2002 | TheoremOneForm::ShiftedG2112 | TheoremOneForm::G4004)
    }

    pub fn has_cos(self) -> bool {
        matches!(self, TheoremOneForm::CosG2112 | TheoremOneForm::ShiftedG2112)
    }
}

/// `F_{1,p,ν}` from the G-form integrand of `form`, each G factor evaluated
/// through its `K` closed form.
pub fn theorem1_integral(
    form: TheoremOneForm,
    input: &ExtendedAppellInput,
    mu: f64,
    method: &EvaluationMethod,
) -> Result<ComplexScalar> {
    let a = &input.appell;
    a.check_integral_domain()?;
    let gap = a.c1 - a.b1;
    let p = input.ext.p();
    let nu1 = input.ext.nu() + 0.5;
    let cs = cos_pi(nu1);
    if form.has_cos() && cs.abs() < 1e-12 {
        return Err(Error::Degenerate(format!("cos(π(ν+1/2)) = 0 at ν = {}", input.ext.nu())));
    }
    if form == TheoremOneForm::G4004 && p.arg().abs() >= PI / 4.0 {
        return Err(Error::domain("the G^{4,0}_{0,4} form needs |arg p| < π/4"));
    }
    let pre = (ln_gamma(a.c1)? - ln_gamma(a.b1)? - ln_gamma(gap)?).exp();
    let mu_c = c(mu);
    let sqrt_pi = PI.sqrt();
    let outer = match form {
        TheoremOneForm::ExpG2012 => (2.0 * p).sqrt(),
        TheoremOneForm::CosG2112 => (2.0 * p).sqrt() * cs / PI,
        TheoremOneForm::G2002 => 2f64.powf(mu - 0.5) * ((0.5 - mu) * p.ln()).exp() / sqrt_pi,
        TheoremOneForm::ShiftedG2112 => ((0.5 - mu) * (2.0 * p).ln()).exp() * cs / PI,
        TheoremOneForm::G4004 => ((0.5 - mu) * p.ln()).exp() * 2f64.powf(2.0 * mu - 1.5) / PI.powf(1.5),
    };
    let (ex, ey) = match method.pairing {
        ExponentPairing::SeriesConsistent => (a.b2, a.b3),
        ExponentPairing::AsPrinted => (a.b3, a.b2),
    };
    let (pa, pb) = (a.b1 - 1.5, gap - 1.5);
    let cfg = &method.quadrature;
    let h = c(0.5);
    let n1 = c(nu1);
    let failed = std::cell::Cell::new(None::<Error>);
    let r = integrate_unit_interval(
        |t, s| {
            let z = kernel_argument(p, t, s);
            let lw = pa * t.ln() + pb * s.ln() - ex * one_minus(a.x, t, s).ln() - ey * one_minus(a.y, t, s).ln();
            if (lw - z).re < -cfg.endpoint_cutoff {
                return c(0.0);
            }
            let ltau = (t * s).ln();
            let g = match form {
                TheoremOneForm::ExpG2012 => GSpec::new(GCase::G2012, vec![h], vec![n1, -n1], 2.0 * z)
                    .and_then(|g| meijer_g_closed_form(&g))
                    .map(|g| (g, z)),
                TheoremOneForm::CosG2112 => GSpec::new(GCase::G2112, vec![h], vec![n1, -n1], 2.0 * z)
                    .and_then(|g| meijer_g_closed_form(&g))
                    .map(|g| (g, -z)),
                TheoremOneForm::G2002 => GSpec::new(
                    GCase::G2002,
                    vec![],
                    vec![(2.0 * mu_c + 2.0 * nu1) / 4.0, (2.0 * mu_c - 2.0 * nu1) / 4.0],
                    z * z / 4.0,
                )
                .and_then(|g| meijer_g_closed_form(&g))
                .map(|g| (g, c(mu * ltau))),
                TheoremOneForm::ShiftedG2112 => {
                    GSpec::new(GCase::G2112, vec![mu_c + 0.5], vec![mu_c + nu1, mu_c - nu1], 2.0 * z)
                        .and_then(|g| meijer_g_closed_form(&g))
                        .map(|g| (g, mu * ltau - z))
                }
                TheoremOneForm::G4004 => GSpec::new(
                    GCase::G4004,
                    vec![],
                    vec![
                        (mu_c + nu1) / 4.0,
                        (2.0 + mu_c + nu1) / 4.0,
                        (mu_c - nu1) / 4.0,
                        (2.0 + mu_c - nu1) / 4.0,
                    ],
                    z.powu(4) / 256.0,
                )
                .and_then(|g| meijer_g_closed_form(&g))
                .map(|g| (g, c(mu * ltau))),
            };
            match g {
                Ok((g, extra)) => {
                    let e = lw + extra + g.log_factor;
                    if e.re < -cfg.endpoint_cutoff {
                        c(0.0)
                    } else {
                        e.exp() * g.mantissa
                    }
                }
                Err(err) => {
                    failed.set(Some(err));
                    c(0.0)
                }
            }
        },
        cfg,
    )?;
    if let Some(err) = failed.take() {
        return Err(err);
    }
    if !r.converged {
        return Err(Error::NonConvergence {
            what: "G-form integral",
            iterations: r.nodes_used,
        });
    }
    Ok(pre * outer * r.value)
}

pub const THEOREM1_TOL: f64 = 1e-8;

/// Compares the G-form integral of `form` with the `K`-kernel integral.
pub fn verify_theorem1(
    form: TheoremOneForm,
    input: &ExtendedAppellInput,
    mu: f64,
    method: &EvaluationMethod,
) -> Result<VerificationRecord> {
    let lhs = theorem1_integral(form, input, mu, method)?;
    let rhs = f1pv_integral(input, method)?;
    let a = &input.appell;
    Ok(VerificationRecord::compare(
        "meijer",
        format!("{}/mu={mu}", form.label()),
        params([
            ("b1", a.b1.re),
            ("b2", a.b2.re),
            ("b3", a.b3.re),
            ("c1", a.c1.re),
            ("x", a.x.re),
            ("y", a.y.re),
            ("p", input.ext.p().re),
            ("nu", input.ext.nu()),
            ("mu", mu),
        ]),
        lhs,
        rhs,
        THEOREM1_TOL,
        "G-form integrand (G via K closed form) vs K-kernel integral",
    ))
}
