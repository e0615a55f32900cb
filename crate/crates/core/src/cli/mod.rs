//! The `waring` command line tool.
//!
//! Exit codes: 0 on success, 1 when a result fails verification, 2 on usage
//! or parse errors.

mod document;
mod parse;
mod selftest;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use document::{DecompositionDocument, MonomialTerm, PolynomialDocument, TermDocument};
pub use parse::parse_polynomial;
pub use selftest::{selftest, SelftestReport, SuiteReport};

use crate::apolarity::Form;
use crate::binary::{classify_plane, Locus, RankFourLocus};
use crate::error::Error;
use crate::numerics::{Scalar, Tolerance};
use crate::oracle::{self, cat_lower_bound, numeric_rank_fit};
use crate::ternary::{waring_decompose, MAX_TERMS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(name = "waring", version, about = "Waring decompositions of binary forms and plane quartics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose a form into powers of linear forms.
    Decompose {
        /// Polynomial text such as "x0^4 + x1^4 + x2^4", or a JSON document.
        poly: String,
        /// Tolerances: RESIDUAL, or ZERO,RANK,RESIDUAL.
        #[arg(long)]
        tol: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Print a JSON decomposition document.
        #[arg(long)]
        json: bool,
    },
    /// Catalecticant lower bound, decomposition length and optional fits.
    Rank {
        poly: String,
        /// Numerical fits, e.g. "r=6,restarts=50".
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Classify the plane f0 + a y + b z of binary quartics.
    Classify {
        f0: String,
        /// The two generators, comma separated: "y,z".
        #[arg(long = "L", value_name = "Y,Z")]
        generators: String,
        #[arg(long)]
        tol: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant suites and print a JSON report.
    Selftest {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Emit random instances of a given rank with their decompositions as
    /// JSON lines.
    Sample {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Inhomogeneous { .. }
            | Error::BadShape(_)
            | Error::DegreeMismatch { .. }
            | Error::VariableMismatch { .. }
            | Error::BadDegree { .. }
            | Error::ZeroForm => EXIT_USAGE,
            _ => EXIT_FAILED,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_FAILED,
        message: e.to_string(),
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn parse_tol(spec: Option<&str>) -> std::result::Result<Tolerance, Failure> {
    let Some(spec) = spec else {
        return Ok(Tolerance::default());
    };
    let values: Vec<f64> = spec
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("invalid tolerance '{spec}'")))?;
    let d = Tolerance::default();
    let tol = match values.as_slice() {
        [res] => Tolerance::new(d.zero_eps.min(*res), d.rank_eps.min(*res), *res),
        [z, r, res] => Tolerance::new(*z, *r, *res),
        _ => return Err(usage("--tol takes RESIDUAL or ZERO,RANK,RESIDUAL")),
    };
    tol.map_err(|e| usage(e.to_string()))
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure {
        code: EXIT_FAILED,
        message: e.to_string(),
    })?;
    writeln!(out, "{text}").map_err(io_failure)
}

fn decompose(out: &mut dyn Write, poly: &str, tol: &Tolerance, seed: u64, json: bool) -> Outcome {
    let f = parse_polynomial(poly)?;
    let d = waring_decompose(&f, tol, seed)?;
    let doc = DecompositionDocument::new(&d, &f);
    let ok = d.len() <= MAX_TERMS && doc.residual <= tol.residual_eps;
    if json {
        print_json(out, &doc)?;
    } else {
        write!(out, "{d}").map_err(io_failure)?;
        writeln!(out, "terms: {}", d.len()).map_err(io_failure)?;
        writeln!(out, "residual: {:.3e}", doc.residual).map_err(io_failure)?;
        writeln!(out, "provenance: {}", d.provenance).map_err(io_failure)?;
    }
    if ok {
        Ok(EXIT_OK)
    } else {
        Err(Failure {
            code: EXIT_FAILED,
            message: format!("verification failed: {} terms, residual {:.3e}", d.len(), doc.residual),
        })
    }
}

#[derive(Serialize)]
struct FitLine {
    rank: usize,
    restarts: usize,
    residual: f64,
}

#[derive(Serialize)]
struct RankReport {
    catalecticant_bound: usize,
    decomposition_length: Option<usize>,
    decomposition_error: Option<String>,
    fits: Vec<FitLine>,
}

fn parse_oracle(spec: &str) -> std::result::Result<(usize, usize), Failure> {
    let mut r = None;
    let mut restarts = 20;
    for part in spec.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value in '{spec}'")))?;
        let v: usize = value
            .trim()
            .parse()
            .map_err(|_| usage(format!("invalid number in '{part}'")))?;
        match key.trim() {
            "r" => r = Some(v),
            "restarts" => restarts = v,
            other => return Err(usage(format!("unknown oracle key '{other}'"))),
        }
    }
    let r = r.ok_or_else(|| usage("--oracle needs r=K"))?;
    if r == 0 {
        return Err(usage("--oracle needs r >= 1"));
    }
    Ok((r, restarts))
}

fn rank(out: &mut dyn Write, poly: &str, oracle_spec: Option<&str>, tol: &Tolerance, seed: u64, json: bool) -> Outcome {
    let f = parse_polynomial(poly)?;
    if f.is_zero(0.0) {
        return Err(Error::ZeroForm.into());
    }
    let fit_spec = oracle_spec.map(parse_oracle).transpose()?;
    let bound = cat_lower_bound(&f, tol);
    let (len, err) = match waring_decompose(&f, tol, seed) {
        Ok(d) => (Some(d.len()), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let fits = match fit_spec {
        Some((r, restarts)) => (1..=r)
            .map(|s| {
                let rep = numeric_rank_fit(&f, s, restarts, seed);
                FitLine {
                    rank: s,
                    restarts: rep.restarts,
                    residual: rep.best_residual,
                }
            })
            .collect(),
        None => Vec::new(),
    };
    let report = RankReport {
        catalecticant_bound: bound,
        decomposition_length: len,
        decomposition_error: err.clone(),
        fits,
    };
    if json {
        print_json(out, &report)?;
    } else {
        let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(io_failure);
        w(out, format!("catalecticant lower bound: {bound}"))?;
        match len {
            Some(n) => w(out, format!("decomposition length: {n}"))?,
            None => w(out, format!("decomposition failed: {}", err.as_deref().unwrap_or("")))?,
        }
        for fit in &report.fits {
            w(
                out,
                format!(
                    "fit rank {}: residual {:.3e} ({} restarts)",
                    fit.rank, fit.residual, fit.restarts
                ),
            )?;
        }
    }
    Ok(if len.is_some() { EXIT_OK } else { EXIT_FAILED })
}

fn scalar_text(z: Scalar) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("({:.6}{:+.6}i)", z.re, z.im)
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    case: String,
    r_locus: String,
    r_prime: String,
    singular_point: Option<[[f64; 2]; 2]>,
    infinity: Option<String>,
    determinant: Vec<[f64; 2]>,
}

fn classify(out: &mut dyn Write, f0: &str, generators: &str, tol: &Tolerance, json: bool) -> Outcome {
    let f0 = parse_polynomial(f0)?;
    let (y, z) = generators
        .split_once(',')
        .ok_or_else(|| usage("--L expects two comma separated generators"))?;
    let (y, z) = (parse_polynomial(y)?, parse_polynomial(z)?);
    let as_binary = |g: Form| -> std::result::Result<Form, Failure> {
        if g.nvars() != 2 || g.degree() != 4 {
            return Err(usage(format!("'{g}' is not a binary quartic")));
        }
        Ok(g)
    };
    let (f0, y, z) = (as_binary(f0)?, as_binary(y)?, as_binary(z)?);
    let cfg = classify_plane(&f0, &y, &z, tol)?;
    let line = |c: &[Scalar; 3]| {
        format!("{} + {} a + {} b = 0", scalar_text(c[0]), scalar_text(c[1]), scalar_text(c[2]))
    };
    let r_locus = match &cfg.r_locus {
        Locus::Empty => "empty".to_string(),
        Locus::Line(c) => format!("line {}", line(c)),
        Locus::Conic(q) => format!(
            "conic {} + {} a + {} b + {} a^2 + {} ab + {} b^2 = 0",
            scalar_text(q[0]),
            scalar_text(q[1]),
            scalar_text(q[2]),
            scalar_text(q[3]),
            scalar_text(q[4]),
            scalar_text(q[5])
        ),
    };
    let r_prime = match &cfg.r_prime {
        RankFourLocus::Empty => "empty".to_string(),
        RankFourLocus::Line(c) => format!("line {}", line(c)),
        RankFourLocus::Points(p) => {
            let pts: Vec<String> = p
                .iter()
                .map(|&(a, b)| format!("({}, {})", scalar_text(a), scalar_text(b)))
                .collect();
            format!("points {}", pts.join(" "))
        }
    };
    let report = ClassifyReport {
        case: format!("{:?}", cfg.case),
        r_locus,
        r_prime,
        singular_point: cfg.singular_point.map(|(a, b)| [[a.re, a.im], [b.re, b.im]]),
        infinity: cfg.infinity.map(|p| format!("{p:?}")),
        determinant: cfg.determinant.iter().map(|z| [z.re, z.im]).collect(),
    };
    if json {
        print_json(out, &report)?;
    } else {
        let mut text = format!(
            "case: {}\nrank != 3 locus: {}\nrank 4 locus: {}\n",
            report.case, report.r_locus, report.r_prime
        );
        if let Some((a, b)) = cfg.singular_point {
            text += &format!("rank 1 point: ({}, {})\n", scalar_text(a), scalar_text(b));
        }
        if let Some(p) = &report.infinity {
            text += &format!("point at infinity: {p}\n");
        }
        write!(out, "{text}").map_err(io_failure)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SampleLine {
    index: usize,
    rank: usize,
    polynomial: PolynomialDocument,
    catalecticant_bound: usize,
    decomposition: Option<DecompositionDocument>,
    error: Option<String>,
}

fn sample(out: &mut dyn Write, rank: usize, count: usize, seed: u64) -> Outcome {
    if !(1..=15).contains(&rank) {
        return Err(usage("--rank must be between 1 and 15"));
    }
    let tol = Tolerance::default();
    let mut all_ok = true;
    for index in 0..count {
        let s = seed.wrapping_add(index as u64);
        let (f, _) = oracle::random_rank_form(rank, s);
        let (decomposition, error) = match waring_decompose(&f, &tol, s) {
            Ok(d) => {
                let doc = DecompositionDocument::new(&d, &f);
                all_ok &= d.len() <= MAX_TERMS && doc.residual <= tol.residual_eps;
                (Some(doc), None)
            }
            Err(e) => {
                all_ok = false;
                (None, Some(e.to_string()))
            }
        };
        print_json(
            out,
            &SampleLine {
                index,
                rank,
                polynomial: PolynomialDocument::from_form(&f),
                catalecticant_bound: cat_lower_bound(&f, &tol),
                decomposition,
                error,
            },
        )?;
    }
    Ok(if all_ok { EXIT_OK } else { EXIT_FAILED })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Decompose { poly, tol, seed, json } => {
            decompose(out, &poly, &parse_tol(tol.as_deref())?, seed, json)
        }
        Command::Rank { poly, oracle, tol, seed, json } => {
            rank(out, &poly, oracle.as_deref(), &parse_tol(tol.as_deref())?, seed, json)
        }
        Command::Classify { f0, generators, tol, json } => {
            classify(out, &f0, &generators, &parse_tol(tol.as_deref())?, json)
        }
        Command::Selftest { n, seed } => {
            let report = selftest(n, seed, &Tolerance::default());
            let text = serde_json::to_string_pretty(&report).map_err(|e| Failure {
                code: EXIT_FAILED,
                message: e.to_string(),
            })?;
            writeln!(out, "{text}").map_err(io_failure)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Sample { rank, count, seed } => sample(out, rank, count, seed),
    }
}

/// Run the tool on `args` (including the program name) and return the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("waring").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn single_power() {
        let (code, out, _) = call(&["decompose", "x0^4"]);
        assert_eq!(code, 0);
        assert!(out.contains("terms: 1"), "{out}");
    }

    #[test]
    fn parse_errors_exit_with_usage_code() {
        let (code, _, err) = call(&["decompose", "x0^3 + x1^4"]);
        assert_eq!(code, 2);
        assert!(err.contains("inhomogeneous"), "{err}");
        assert_eq!(call(&["decompose"]).0, 2);
        assert_eq!(call(&["rank", "x0^4", "--oracle", "q=1"]).0, 2);
        assert_eq!(call(&["decompose", "x0^4", "--tol", "abc"]).0, 2);
    }

    #[test]
    fn tolerance_forms() {
        assert_eq!(parse_tol(Some("1e-5")).ok().unwrap().residual_eps, 1e-5);
        let t = parse_tol(Some("1e-12,1e-9,1e-7")).ok().unwrap();
        assert_eq!((t.zero_eps, t.rank_eps, t.residual_eps), (1e-12, 1e-9, 1e-7));
        assert!(parse_tol(Some("1e-3,1e-9,1e-7")).is_err());
    }

    #[test]
    fn classify_tangent_line() {
        let (code, out, _) = call(&["classify", "x0^3*x1", "--L", "x0^4,x1^4"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("case: C2"), "{out}");
    }
}
