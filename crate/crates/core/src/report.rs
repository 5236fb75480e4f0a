//! Verification records, one per identity check.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::scalar::ComplexScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// One identity check. Field names are the report schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub suite: String,
    pub case_id: String,
    pub params: BTreeMap<String, f64>,
    #[serde(with = "nullable_complex")]
    pub lhs: ComplexScalar,
    #[serde(with = "nullable_complex")]
    pub rhs: ComplexScalar,
    #[serde(with = "nullable")]
    pub abs_err: f64,
    #[serde(with = "nullable")]
    pub rel_err: f64,
    pub tol: f64,
    pub status: Status,
    pub skip_reason: Option<String>,
    pub elapsed_ms: f64,
    pub method: String,
}

/// `|lhs - rhs| / (1 + max(|lhs|, |rhs|))`.
pub fn relative_error(lhs: ComplexScalar, rhs: ComplexScalar) -> f64 {
    (lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm()))
}

impl VerificationRecord {
    pub fn compare(
        suite: &str,
        case_id: impl Into<String>,
        params: BTreeMap<String, f64>,
        lhs: ComplexScalar,
        rhs: ComplexScalar,
        tol: f64,
        method: impl Into<String>,
    ) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = relative_error(lhs, rhs);
        let status = if rel_err <= tol { Status::Pass } else { Status::Fail };
        Self {
            suite: suite.to_string(),
            case_id: case_id.into(),
            params,
            lhs,
            rhs,
            abs_err,
            rel_err,
            tol,
            status,
            skip_reason: None,
            elapsed_ms: 0.0,
            method: method.into(),
        }
    }

    /// A check that passes when `holds`, for inequalities; `lhs`/`rhs` carry the two sides.
    pub fn inequality(
        suite: &str,
        case_id: impl Into<String>,
        params: BTreeMap<String, f64>,
        lhs: f64,
        rhs: f64,
        holds: bool,
        method: impl Into<String>,
    ) -> Self {
        let mut r = Self::compare(suite, case_id, params, lhs.into(), rhs.into(), 0.0, method);
        r.status = if holds { Status::Pass } else { Status::Fail };
        r
    }

    pub fn skipped(
        suite: &str,
        case_id: impl Into<String>,
        params: BTreeMap<String, f64>,
        tol: f64,
        reason: impl Into<String>,
        method: impl Into<String>,
    ) -> Self {
        let nan = ComplexScalar::new(f64::NAN, f64::NAN);
        Self {
            suite: suite.to_string(),
            case_id: case_id.into(),
            params,
            lhs: nan,
            rhs: nan,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            tol,
            status: Status::Skipped,
            skip_reason: Some(reason.into()),
            elapsed_ms: 0.0,
            method: method.into(),
        }
    }

    /// A check whose evaluation itself failed; the diagnostic goes in `skip_reason`.
    pub fn errored(
        suite: &str,
        case_id: impl Into<String>,
        params: BTreeMap<String, f64>,
        tol: f64,
        err: &Error,
        method: impl Into<String>,
    ) -> Self {
        let mut r = Self::skipped(suite, case_id, params, tol, err.to_string(), method);
        r.status = Status::Fail;
        r
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Non-finite values are written as `null` and read back as NaN.
mod nullable {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

mod nullable_complex {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Pair(#[serde(with = "nullable")] f64, #[serde(with = "nullable")] f64);

    pub fn serialize<S: Serializer>(v: &ComplexScalar, s: S) -> Result<S::Ok, S::Error> {
        Pair(v.re, v.im).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexScalar, D::Error> {
        let Pair(re, im) = Pair::deserialize(d)?;
        Ok(ComplexScalar::new(re, im))
    }
}

/// Builds a parameter map from `(name, value)` pairs.
pub fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
