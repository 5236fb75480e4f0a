use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use appell_core::bessel::{bessel_k, BesselOrder};
use appell_core::ext_appell::{f1pv, prefers_series, EvaluationMethod, ExtendedAppellInput, Route};
use appell_core::ext_beta::{chaudhry_beta, extended_beta, ExtensionParams};
use appell_core::golden::{golden_rows, read_golden, verify_golden, write_golden, Resolution};
use appell_core::hyper::{appell_f1_integral, appell_f1_series, AppellParams, SeriesControl};
use appell_core::meijer::{meijer_g_traced, GCase, GSpec};
use appell_core::mellin::{
    mellin_forward_closed, mellin_forward_numeric, mellin_inverse_numeric, InversionContour, MellinClosedForm,
    MellinPoint,
};
use appell_core::quadrature::QuadratureConfig;
use appell_core::report::VerificationRecord;
use appell_core::verify::{run_suite, summarize, Suite, VerifyConfig};
use appell_core::{ComplexScalar, Error};
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_FAIL: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "appell", version, about = "Extended Beta and Appell F1 functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function; parameters as key=value (complex values like 1+2i)
    Eval {
        #[arg(value_enum)]
        function: Function,
        params: Vec<String>,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run identity-verification suites
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
        /// Record wall-clock time per record (makes reports non-reproducible)
        #[arg(long)]
        timings: bool,
    },
    /// Write a golden CSV file from the reference routes
    Golden {
        out_path: PathBuf,
        #[arg(long, value_enum, default_value_t = ResolutionArg::Standard)]
        resolution: ResolutionArg,
        /// Re-read the file and check every row against the library
        #[arg(long)]
        check: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Function {
    BetaPv,
    ChaudhryBeta,
    F1,
    F1pv,
    BesselK,
    MeijerG,
    MellinFwd,
    MellinInv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Series,
    Integral,
    Auto,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Series => Route::Series,
            RouteArg::Integral => Route::Integral,
            RouteArg::Auto => Route::Auto,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ResolutionArg {
    Standard,
    High,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_domain_like() || matches!(e, Error::Io(_)) {
        EXIT_DOMAIN
    } else {
        EXIT_CONVERGENCE
    }
}

/// Base method from `APPELL_MAX_TERMS`, `APPELL_QUAD_LEVELS` and the flags.
fn method(route: RouteArg, tol: Option<f64>) -> Result<EvaluationMethod, Error> {
    let mut m = EvaluationMethod::default().with_route(route.into());
    let env = |name: &str| -> Result<Option<usize>, Error> {
        match std::env::var(name) {
            Ok(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Domain(format!("{name} must be a non-negative integer, got {v:?}"))),
            Err(_) => Ok(None),
        }
    };
    if let Some(n) = env("APPELL_MAX_TERMS")? {
        m.max_terms = n;
    }
    let levels = env("APPELL_QUAD_LEVELS")?.unwrap_or(m.quadrature.max_levels);
    let qtol = tol.map_or(m.quadrature.target_rel_tol, |t| t.min(m.quadrature.target_rel_tol));
    m.quadrature = QuadratureConfig::new(qtol, levels)?;
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("--tol must be positive, got {t}")));
        }
        m.tol = t;
    }
    Ok(m)
}

struct Params {
    map: BTreeMap<String, String>,
}

impl Params {
    fn parse(items: &[String]) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for item in items {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("expected key=value, got {item:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self { map })
    }

    fn text(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn complex(&self, key: &str) -> Result<ComplexScalar, Error> {
        let v = self
            .text(key)
            .ok_or_else(|| Error::Domain(format!("missing parameter {key}")))?;
        v.parse::<ComplexScalar>()
            .map_err(|_| Error::Domain(format!("parameter {key}: cannot parse {v:?} as a number")))
    }

    fn real(&self, key: &str) -> Result<f64, Error> {
        let z = self.complex(key)?;
        if z.im != 0.0 {
            return Err(Error::Domain(format!("parameter {key} must be real")));
        }
        Ok(z.re)
    }

    fn appell(&self) -> Result<AppellParams, Error> {
        Ok(AppellParams::new(
            self.complex("b1")?,
            self.complex("b2")?,
            self.complex("b3")?,
            self.complex("c1")?,
            self.complex("x")?,
            self.complex("y")?,
        ))
    }

    fn closed_form(&self) -> Result<MellinClosedForm, Error> {
        match self.text("form").unwrap_or("corrected") {
            "corrected" => Ok(MellinClosedForm::Corrected),
            "printed" => Ok(MellinClosedForm::AsPrinted),
            other => Err(Error::Domain(format!("form must be corrected or printed, got {other:?}"))),
        }
    }
}

fn resolve_route(m: &EvaluationMethod, appell: &AppellParams) -> &'static str {
    match m.route {
        Route::Series => "series",
        Route::Integral => "integral",
        Route::Auto if prefers_series(appell) => "series",
        Route::Auto => "integral",
    }
}

/// Value and one-line method trace.
fn evaluate(f: Function, p: &Params, m: &EvaluationMethod) -> Result<(ComplexScalar, String), Error> {
    let quad = &m.quadrature;
    match f {
        Function::BetaPv => {
            let ext = ExtensionParams::new(p.complex("p")?, p.real("nu")?)?;
            let v = extended_beta(p.complex("x")?, p.complex("y")?, &ext, quad)?;
            Ok((v, format!("beta_pv: tanh-sinh on (0,1), tol={:e}", quad.target_rel_tol)))
        }
        Function::ChaudhryBeta => {
            let v = chaudhry_beta(p.complex("x")?, p.complex("y")?, p.complex("p")?, quad)?;
            Ok((v, format!("chaudhry_beta: tanh-sinh on (0,1), tol={:e}", quad.target_rel_tol)))
        }
        Function::F1 => {
            let a = p.appell()?;
            let ctl = SeriesControl {
                tol: m.tol,
                max_terms: m.max_terms,
            };
            match resolve_route(m, &a) {
                "series" => Ok((appell_f1_series(&a, &ctl)?, format!("f1: double series, max_terms={}", m.max_terms))),
                _ => Ok((appell_f1_integral(&a, quad)?, "f1: Euler integral, tanh-sinh".to_string())),
            }
        }
        Function::F1pv => {
            let a = p.appell()?;
            let input = ExtendedAppellInput::new(a, ExtensionParams::new(p.complex("p")?, p.real("nu")?)?);
            let v = f1pv(&input, m)?;
            Ok((v, format!("f1pv: route={}, tol={:e}, max_terms={}", resolve_route(m, &a), m.tol, m.max_terms)))
        }
        Function::BesselK => {
            let v = bessel_k(BesselOrder::new(p.real("nu")?)?, p.complex("z")?)?;
            Ok((v, "bessel_k: closed form at half-odd order, cosh integral otherwise".to_string()))
        }
        Function::MeijerG => {
            let case = match p.text("case").unwrap_or("") {
                "g2012" => GCase::G2012,
                "g2112" => GCase::G2112,
                "g2002" => GCase::G2002,
                "g4004" => GCase::G4004,
                other => {
                    return Err(Error::Domain(format!(
                        "case must be one of g2012, g2112, g2002, g4004; got {other:?}"
                    )))
                }
            };
            let (_, _, np, nq) = case.orders();
            let alpha = (1..=np).map(|i| p.complex(&format!("a{i}"))).collect::<Result<_, _>>()?;
            let beta = (1..=nq).map(|i| p.complex(&format!("b{i}"))).collect::<Result<_, _>>()?;
            let spec = GSpec::new(case, alpha, beta, p.complex("z")?)?;
            let (v, route) = meijer_g_traced(&spec)?;
            Ok((v, format!("meijer_g: {route:?}")))
        }
        Function::MellinFwd => {
            let a = p.appell()?;
            let nu = p.real("nu")?;
            let point = MellinPoint::new(p.complex("s")?, nu, &a)?;
            let m = EvaluationMethod {
                route: if m.route == Route::Auto { Route::Integral } else { m.route },
                ..*m
            };
            match p.text("mode").unwrap_or("closed") {
                "closed" => {
                    let form = p.closed_form()?;
                    let v = mellin_forward_closed(&a, nu, &point, form, &m)?;
                    Ok((v, format!("mellin_fwd: closed form ({form:?})")))
                }
                "numeric" => {
                    let v = mellin_forward_numeric(&a, nu, &point, &m)?;
                    Ok((v, "mellin_fwd: quadrature over ln p".to_string()))
                }
                other => Err(Error::Domain(format!("mode must be closed or numeric, got {other:?}"))),
            }
        }
        Function::MellinInv => {
            let a = p.appell()?;
            let nu = p.real("nu")?;
            let c = match p.text("c") {
                Some(_) => p.real("c")?,
                None => nu + 1.0,
            };
            let r = mellin_inverse_numeric(&a, nu, p.real("p")?, &InversionContour::new(c, nu)?, p.closed_form()?, m)?;
            Ok((
                r.value,
                format!(
                    "mellin_inv: line Re s = {c}, truncation={:.3}, step={:.3e}, decay_rate={:.3}, nodes={}",
                    r.truncation, r.step, r.decay_rate, r.nodes_used
                ),
            ))
        }
    }
}

fn cmd_eval(f: Function, items: &[String], route: RouteArg, tol: Option<f64>) -> u8 {
    let result = Params::parse(items)
        .and_then(|p| method(route, tol).and_then(|m| evaluate(f, &p, &m)));
    match result {
        Ok((v, trace)) => {
            println!("{:.17e} {:.17e}", v.re, v.im);
            eprintln!("{trace}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn write_report(path: &PathBuf, records: &[VerificationRecord]) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, records).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn summary_line(name: &str, records: &[VerificationRecord]) -> String {
    let (pass, total, max_rel) = summarize(records);
    format!("suite={name} pass={pass}/{total} max_rel_err={max_rel:.3e}")
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: &str,
    trials: usize,
    seed: u64,
    tol: Option<f64>,
    report: Option<PathBuf>,
    route: RouteArg,
    timings: bool,
) -> u8 {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else if let Some(s) = Suite::parse(suite) {
        vec![s]
    } else {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        eprintln!("error: unknown suite {suite:?}; expected all or one of {}", names.join(", "));
        return EXIT_USAGE;
    };
    if trials == 0 {
        eprintln!("error: --trials must be at least 1");
        return EXIT_DOMAIN;
    }
    let method = match method(route, tol) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let cfg = VerifyConfig {
        trials,
        seed,
        tol,
        method,
        timings,
    };
    let mut all = Vec::new();
    for s in suites {
        let records = run_suite(s, &cfg);
        println!("{}", summary_line(s.name(), &records));
        all.extend(records);
    }
    if suite == "all" {
        println!("{}", summary_line("all", &all));
    }
    if let Some(path) = report {
        if let Err(e) = write_report(&path, &all) {
            eprintln!("error: writing {}: {e}", path.display());
            return EXIT_DOMAIN;
        }
    }
    if all.iter().any(|r| r.status == appell_core::report::Status::Fail) {
        EXIT_FAIL
    } else {
        0
    }
}

fn cmd_golden(out_path: &PathBuf, res: ResolutionArg, check: bool) -> u8 {
    let res = match res {
        ResolutionArg::Standard => Resolution::Standard,
        ResolutionArg::High => Resolution::High,
    };
    let run = || -> Result<u8, Error> {
        let file = File::create(out_path)?;
        let rows = golden_rows(res)?;
        write_golden(BufWriter::new(file), res, &rows)?;
        eprintln!("wrote {} rows to {}", rows.len(), out_path.display());
        if !check {
            return Ok(0);
        }
        let back = read_golden(File::open(out_path)?)?;
        let records = verify_golden(&back, &EvaluationMethod::default());
        println!("{}", summary_line("golden", &records));
        Ok(if records.iter().all(|r| r.passed()) { 0 } else { EXIT_FAIL })
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Eval {
            function,
            params,
            route,
            tol,
        } => cmd_eval(function, &params, route, tol),
        Command::Verify {
            suite,
            trials,
            seed,
            tol,
            report,
            route,
            timings,
        } => cmd_verify(&suite, trials, seed, tol, report, route, timings),
        Command::Golden {
            out_path,
            resolution,
            check,
        } => cmd_golden(&out_path, resolution, check),
    };
    ExitCode::from(code)
}
