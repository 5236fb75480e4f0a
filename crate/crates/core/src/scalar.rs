//! Complex Gamma-family functions and principal-branch powers.
//!
//! Gamma uses a 15-term Lanczos sum (g = 671/128) on `Re(z) >= 1/2` and the
//! reflection formula elsewhere, so the real and complex paths share one
//! implementation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used for every parameter and value in the crate.
pub type ComplexScalar = Complex64;

const LANCZOS_G_SHIFT: f64 = 5.242_187_5; // 671/128 + 1/2
const LANCZOS_C0: f64 = 0.999_999_999_999_997_092;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

/// `(λ)_υ` as a value object; see [`pochhammer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PochhammerArg {
    pub base: ComplexScalar,
    pub offset: ComplexScalar,
}

impl PochhammerArg {
    pub fn new(base: ComplexScalar, offset: ComplexScalar) -> Self {
        Self { base, offset }
    }

    pub fn eval(&self) -> Result<ComplexScalar> {
        pochhammer(self.base, self.offset)
    }
}

pub(crate) fn c(re: f64) -> ComplexScalar {
    Complex64::new(re, 0.0)
}

/// Returns `Some(n)` when `z` is exactly the real integer `n`.
pub(crate) fn as_real_integer(z: ComplexScalar) -> Option<i64> {
    if z.im == 0.0 && z.re.is_finite() && z.re == z.re.round() && z.re.abs() < 9.0e15 {
        Some(z.re as i64)
    } else {
        None
    }
}

pub fn is_nonpositive_integer(z: ComplexScalar) -> bool {
    matches!(as_real_integer(z), Some(n) if n <= 0)
}

/// `sin(πx)` with the argument reduced first so integers give exact zeros.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

pub(crate) fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn sin_pi_complex(z: ComplexScalar) -> ComplexScalar {
    let y = PI * z.im;
    Complex64::new(sin_pi(z.re) * y.cosh(), cos_pi(z.re) * y.sinh())
}

fn ln_gamma_lanczos(z: ComplexScalar) -> ComplexScalar {
    let tmp = z + LANCZOS_G_SHIFT;
    let head = (z + 0.5) * tmp.ln() - tmp;
    let mut ser = c(LANCZOS_C0);
    let mut y = z;
    for coef in LANCZOS {
        y += 1.0;
        ser += coef / y;
    }
    head + (ser * SQRT_TWO_PI / z).ln()
}

/// A logarithm of Γ(z) (branch unspecified; `exp` of it is Γ(z)).
pub fn ln_gamma(z: ComplexScalar) -> Result<ComplexScalar> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            function: "gamma",
            at: z,
        });
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_lanczos(z))
    } else {
        let s = sin_pi_complex(z);
        Ok(c(PI.ln()) - s.ln() - ln_gamma_lanczos(1.0 - z))
    }
}

/// Γ(z).
pub fn gamma(z: ComplexScalar) -> Result<ComplexScalar> {
    if let Some(n) = as_real_integer(z) {
        if n <= 0 {
            return Err(Error::Pole {
                function: "gamma",
                at: z,
            });
        }
        if n <= 21 {
            let mut f = 1.0;
            for k in 2..n {
                f *= k as f64;
            }
            return Ok(c(f));
        }
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_lanczos(z).exp())
    } else {
        let s = sin_pi_complex(z);
        Ok(PI / (s * ln_gamma_lanczos(1.0 - z).exp()))
    }
}

/// 1/Γ(z), entire: zero at the poles of Γ.
pub fn rgamma(z: ComplexScalar) -> ComplexScalar {
    if is_nonpositive_integer(z) {
        return c(0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma_lanczos(z)).exp()
    } else {
        sin_pi_complex(z) * ln_gamma_lanczos(1.0 - z).exp() / PI
    }
}

/// Pochhammer symbol `(λ)_υ = Γ(λ+υ)/Γ(λ)`.
///
/// Non-negative integer offsets use the finite product, which stays valid
/// when `λ` itself is a non-positive integer.
pub fn pochhammer(lambda: ComplexScalar, upsilon: ComplexScalar) -> Result<ComplexScalar> {
    if let Some(n) = as_real_integer(upsilon) {
        if (0..=10_000).contains(&n) {
            let mut acc = c(1.0);
            for k in 0..n {
                acc *= lambda + k as f64;
            }
            return Ok(acc);
        }
    }
    if is_nonpositive_integer(lambda) {
        return Err(Error::Pole {
            function: "pochhammer",
            at: lambda,
        });
    }
    if is_nonpositive_integer(lambda + upsilon) {
        return Err(Error::Pole {
            function: "pochhammer",
            at: lambda + upsilon,
        });
    }
    Ok((ln_gamma(lambda + upsilon)? - ln_gamma(lambda)?).exp())
}

/// Classical Beta function Γ(α)Γ(β)/Γ(α+β).
pub fn beta(alpha: ComplexScalar, beta: ComplexScalar) -> Result<ComplexScalar> {
    for z in [alpha, beta] {
        if is_nonpositive_integer(z) {
            return Err(Error::Pole {
                function: "beta",
                at: z,
            });
        }
    }
    let sum = alpha + beta;
    if is_nonpositive_integer(sum) {
        return Ok(c(0.0));
    }
    if alpha.norm() + beta.norm() < 60.0 {
        Ok(gamma(alpha)? * gamma(beta)? * rgamma(sum))
    } else {
        Ok((ln_gamma(alpha)? + ln_gamma(beta)? - ln_gamma(sum)?).exp())
    }
}

/// Upper incomplete Gamma Γ(a, x) for real `a > 0`, `x >= 0`.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("upper_incomplete_gamma needs a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("upper_incomplete_gamma needs x >= 0, got {x}")));
    }
    let full = gamma(c(a))?.re;
    if x == 0.0 {
        return Ok(full);
    }
    let log_prefactor = -x + a * x.ln();
    if x < a + 1.0 {
        // lower incomplete gamma by its power series
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..10_000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-17 {
                return Ok(full - sum * log_prefactor.exp());
            }
        }
        Err(Error::NonConvergence {
            what: "incomplete gamma series",
            iterations: 10_000,
        })
    } else {
        // modified Lentz on the Legendre continued fraction
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut cc = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            cc = b + an / cc;
            if cc.abs() < TINY {
                cc = TINY;
            }
            d = 1.0 / d;
            let del = d * cc;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                return Ok(log_prefactor.exp() * h);
            }
        }
        Err(Error::NonConvergence {
            what: "incomplete gamma continued fraction",
            iterations: 10_000,
        })
    }
}

/// `base^exponent = exp(exponent · Log base)` with the principal logarithm.
pub fn principal_power(base: ComplexScalar, exponent: ComplexScalar) -> Result<ComplexScalar> {
    if base == c(0.0) {
        if exponent.re > 0.0 {
            return Ok(c(0.0));
        }
        return Err(Error::domain(format!(
            "zero base with exponent {exponent} (Re <= 0)"
        )));
    }
    if exponent == c(0.0) {
        return Ok(c(1.0));
    }
    if base.im == 0.0 && base.re > 0.0 && exponent.im == 0.0 {
        return Ok(c(base.re.powf(exponent.re)));
    }
    Ok((exponent * base.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: ComplexScalar, b: ComplexScalar) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma(c(1.0)).unwrap(), c(1.0));
        assert_eq!(gamma(c(5.0)).unwrap(), c(24.0));
        assert!(rel(gamma(c(0.5)).unwrap(), c(PI.sqrt())) < 1e-14);
        assert!(rel(gamma(c(-0.5)).unwrap(), c(-2.0 * PI.sqrt())) < 1e-14);
        // Γ(30.5) against Γ(0.5)·Π(k+1/2)
        let mut expect = PI.sqrt();
        for k in 0..30 {
            expect *= k as f64 + 0.5;
        }
        assert!(rel(gamma(c(30.5)).unwrap(), c(expect)) < 1e-13);
    }

    #[test]
    fn gamma_complex_modulus() {
        // |Γ(iy)|² = π / (y sinh πy)
        let y = 2.5;
        let g = gamma(Complex64::new(0.0, y)).unwrap();
        let expect = PI / (y * (PI * y).sinh());
        assert!((g.norm_sqr() - expect).abs() / expect < 1e-13);
        // |Γ(1/2 + iy)|² = π / cosh πy
        let g = gamma(Complex64::new(0.5, 7.0)).unwrap();
        let expect = PI / (PI * 7.0).cosh();
        assert!((g.norm_sqr() - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn gamma_pole_is_error() {
        assert!(matches!(gamma(c(-3.0)), Err(Error::Pole { .. })));
        assert!(matches!(gamma(c(0.0)), Err(Error::Pole { .. })));
        assert_eq!(rgamma(c(-2.0)), c(0.0));
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(c(7.3), c(0.0)).unwrap(), c(1.0));
        assert_eq!(pochhammer(c(1.0), c(4.0)).unwrap(), c(24.0));
        assert_eq!(pochhammer(c(3.0), c(2.0)).unwrap(), c(12.0));
        assert_eq!(pochhammer(c(-2.0), c(3.0)).unwrap(), c(0.0));
        let g = pochhammer(c(1.5), c(0.25)).unwrap();
        let expect = gamma(c(1.75)).unwrap() / gamma(c(1.5)).unwrap();
        assert!(rel(g, expect) < 1e-14);
        assert!(pochhammer(c(-1.0), c(0.5)).is_err());
    }

    #[test]
    fn beta_examples() {
        assert!(rel(beta(c(2.0), c(3.0)).unwrap(), c(1.0 / 12.0)) < 1e-15);
        assert!(rel(beta(c(1.0), c(1.0)).unwrap(), c(1.0)) < 1e-15);
        assert!(rel(beta(c(0.5), c(0.5)).unwrap(), c(PI)) < 1e-14);
        assert!(beta(c(0.0), c(1.0)).is_err());
        assert!(rel(beta(c(40.0), c(35.5)).unwrap(), beta(c(35.5), c(40.0)).unwrap()) < 1e-14);
    }

    #[test]
    fn incomplete_gamma_examples() {
        let a = 2.5;
        assert!((upper_incomplete_gamma(a, 0.0).unwrap() - gamma(c(a)).unwrap().re).abs() < 1e-15);
        for x in [0.1, 1.0, 3.0, 20.0] {
            let v = upper_incomplete_gamma(1.0, x).unwrap();
            assert!((v - (-x).exp()).abs() / (-x).exp() < 1e-13, "x = {x}");
        }
        // Γ(1/2, x) = √π erfc(√x); erfc(1) = 0.157299207050285...
        let v = upper_incomplete_gamma(0.5, 1.0).unwrap();
        assert!((v - PI.sqrt() * 0.157_299_207_050_285_13).abs() < 1e-13);
        assert!(upper_incomplete_gamma(1.0, -1.0).is_err());
        assert!(upper_incomplete_gamma(0.0, 1.0).is_err());
    }

    #[test]
    fn principal_power_examples() {
        assert_eq!(principal_power(c(4.0), c(0.5)).unwrap(), c(2.0));
        assert_eq!(principal_power(Complex64::new(0.3, 2.0), c(0.0)).unwrap(), c(1.0));
        let v = principal_power(c(-1.0), c(0.5)).unwrap();
        assert!((v - Complex64::i()).norm() < 1e-15);
        assert!(principal_power(c(0.0), c(-1.0)).is_err());
        assert_eq!(principal_power(c(0.0), c(2.0)).unwrap(), c(0.0));
    }
}
