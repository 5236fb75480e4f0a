//! Golden files: `F_{1,p,ν}` at seeded points of the sampling domain, with
//! values from the reference routes in [`crate::oracle`].

use std::io::{BufRead, BufReader, Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_appell::{f1pv, EvaluationMethod};
use crate::oracle;
use crate::report::{params, VerificationRecord};
use crate::scalar::ComplexScalar;
use crate::verify::Sample;

pub const GOLDEN_TOL: f64 = 1e-8;
const GOLDEN_SEED: u64 = 0x601d;
/// Rows whose arguments satisfy `max(|x|, |y|) ≤` this use the double sum.
const DOUBLE_SUM_RADIUS: f64 = 0.5;
const DOUBLE_SUM_TERMS: usize = 90;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Standard,
    High,
}

impl Resolution {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "standard" => Some(Resolution::Standard),
            "high" => Some(Resolution::High),
            _ => None,
        }
    }

    /// Trapezoid panels on (0, 1).
    pub fn nodes(self) -> usize {
        match self {
            Resolution::Standard => 4000,
            Resolution::High => 16000,
        }
    }

    pub fn rows(self) -> usize {
        match self {
            Resolution::Standard => 60,
            Resolution::High => 120,
        }
    }
}

/// One line of a golden file; column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub p: f64,
    pub nu: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c1: f64,
    pub x: f64,
    pub y: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub oracle: String,
}

impl GoldenRow {
    pub fn sample(&self) -> Sample {
        Sample {
            b1: self.b1,
            gap: self.c1 - self.b1,
            b2: self.b2,
            b3: self.b3,
            x: self.x,
            y: self.y,
            p: self.p,
            nu: self.nu,
        }
    }

    pub fn value(&self) -> ComplexScalar {
        ComplexScalar::new(self.value_re, self.value_im)
    }
}

fn header(res: Resolution) -> String {
    format!(
        "# oracle: brute-force double sum (|x|,|y| <= {DOUBLE_SUM_RADIUS}) or dense trapezoid integral, nodes={}, date-free",
        res.nodes()
    )
}

pub fn golden_rows(res: Resolution) -> Result<Vec<GoldenRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(GOLDEN_SEED);
    let n = res.nodes();
    (0..res.rows())
        .map(|_| {
            let s = Sample::draw(&mut rng);
            let a = s.appell();
            let (value, oracle) = if s.x.abs().max(s.y.abs()) <= DOUBLE_SUM_RADIUS {
                (
                    oracle::f1pv_double_sum(&a, s.p, s.nu, DOUBLE_SUM_TERMS, n)?,
                    format!("double_sum terms={DOUBLE_SUM_TERMS} beta_trapezoid nodes={n}"),
                )
            } else {
                (oracle::f1pv_integral(&a, s.p, s.nu, n)?, format!("trapezoid_integral nodes={n}"))
            };
            Ok(GoldenRow {
                p: s.p,
                nu: s.nu,
                b1: s.b1,
                b2: s.b2,
                b3: s.b3,
                c1: s.b1 + s.gap,
                x: s.x,
                y: s.y,
                value_re: value.re,
                value_im: value.im,
                oracle,
            })
        })
        .collect()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_golden<W: Write>(out: W, res: Resolution, rows: &[GoldenRow]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{}", header(res))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a golden file; the leading comment line is required.
pub fn read_golden<R: Read>(input: R) -> Result<Vec<GoldenRow>> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    if !first.starts_with("# oracle:") {
        return Err(Error::Io("golden file must start with '# oracle:' comment".into()));
    }
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_error))
        .collect()
}

/// Library value against every row.
pub fn verify_golden(rows: &[GoldenRow], method: &EvaluationMethod) -> Vec<VerificationRecord> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let p = params([
                ("p", row.p),
                ("nu", row.nu),
                ("b1", row.b1),
                ("b2", row.b2),
                ("b3", row.b3),
                ("c1", row.c1),
                ("x", row.x),
                ("y", row.y),
            ]);
            let id = format!("row/{i}");
            match row.sample().input().and_then(|inp| f1pv(&inp, method)) {
                Ok(v) => VerificationRecord::compare("golden", id, p, v, row.value(), GOLDEN_TOL, &row.oracle),
                Err(e) => VerificationRecord::errored("golden", id, p, GOLDEN_TOL, &e, &row.oracle),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_reverify() {
        let rows = golden_rows(Resolution::Standard).unwrap();
        assert!(rows.len() >= 50);
        assert!(rows.iter().any(|r| r.oracle.starts_with("double_sum")));
        assert!(rows.iter().any(|r| r.oracle.starts_with("trapezoid")));
        let mut buf = Vec::new();
        write_golden(&mut buf, Resolution::Standard, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().ends_with("nodes=4000, date-free"));
        assert_eq!(lines.next().unwrap(), "p,nu,b1,b2,b3,c1,x,y,value_re,value_im,oracle");
        let back = read_golden(&buf[..]).unwrap();
        assert_eq!(back, rows);
        for r in verify_golden(&back, &EvaluationMethod::default()) {
            assert!(r.passed(), "{}: rel {:e} ({})", r.case_id, r.rel_err, r.method);
        }
    }

    #[test]
    fn missing_header_is_rejected() {
        assert!(matches!(read_golden(&b"p,nu\n"[..]), Err(Error::Io(_))));
    }
}
