//! Command-line interface: `family`, `solve`, `sweep`, `trace` and `verify`.
//!
//! Output is JSON lines behind a `{"schema": 1}` header, or a plain table.
//! Exit codes: 0 success, 2 usage, 3 precision, 4 invalid solution input,
//! 5 verification failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Complete, Integer};
use serde_json::{json, Value};

use crate::bounds::{calibrate_c2, sine_bound_holds};
use crate::config::{Config, OutputFormat};
use crate::family::{coefficient_sequence, example_family, swap_identity_check, FamilyRecord, FormFamily};
use crate::heights::{abs_log_height, check_fundamental, regulator, Fundamentality};
use crate::interval::Interval;
use crate::solver::{attach_decompositions, brute_force_oracle, solve_box, k_sweep, SearchSpec};
use crate::tracer::{trace_solution, TracerError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "cubic-thue", version, about = "Thue inequalities for families of cubic forms twisted by units")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured output format.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OutputArg {
    Json,
    Table,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Parameter of the example family.
    #[arg(long = "D", allow_hyphen_values = true, conflicts_with = "family_file")]
    pub d: Option<i64>,
    /// JSON family record (`min_poly`, `alpha_coords`, `epsilon_coords`).
    #[arg(long)]
    pub family_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the forms F_n.
    Family {
        #[command(flatten)]
        fam: FamilyArgs,
        /// `a..b` (inclusive) or a single `n`.
        #[arg(long, allow_hyphen_values = true, default_value = "0", value_parser = parse_range)]
        n: (i64, i64),
    },
    /// List the solutions of 0 < |F_n(x, y)| <= k in a box.
    Solve {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_integer)]
        k: Integer,
        #[arg(long, allow_hyphen_values = true, default_value = "-8..8", value_parser = parse_range)]
        n: (i64, i64),
        #[arg(long, default_value_t = 1000)]
        y_max: u64,
        /// Use the unpruned scan.
        #[arg(long)]
        oracle: bool,
        /// Keep solutions with x·y = 0.
        #[arg(long)]
        include_trivial: bool,
        /// Attach the unit reduction to every solution.
        #[arg(long)]
        decompose: bool,
    },
    /// Largest solution size as k grows.
    Sweep {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, value_delimiter = ',', default_value = "2,5,10,20")]
        k: Vec<i64>,
        #[arg(long, allow_hyphen_values = true, default_value = "-8..8", value_parser = parse_range)]
        n: (i64, i64),
        #[arg(long, default_value_t = 1000)]
        y_max: u64,
    },
    /// Certificate for one solution.
    Trace {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_integer)]
        x: Integer,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_integer)]
        y: Integer,
        /// Defaults to max(2, |F_n(x, y)|).
        #[arg(long, allow_hyphen_values = true, value_parser = parse_integer)]
        k: Option<Integer>,
    },
    /// Identity checks; stops at the first failure.
    Verify {
        #[arg(long = "D", value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "family_file")]
        d: Vec<i64>,
        #[arg(long)]
        family_file: Option<PathBuf>,
        /// Adds the sine calibration scan and the large solver box.
        #[arg(long)]
        deep: bool,
    },
}

pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("bad integer '{t}'"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

fn parse_integer(s: &str) -> Result<Integer, String> {
    Integer::from_str_radix(s.trim(), 10).map_err(|_| format!("bad integer '{s}'"))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Precision(String),
    InvalidSolution(String),
    Verification(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Precision(_) => 3,
            CliError::InvalidSolution(_) => 4,
            CliError::Verification(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Precision(s) => write!(f, "precision error: {s}"),
            CliError::InvalidSolution(s) => write!(f, "invalid solution: {s}"),
            CliError::Verification(s) => write!(f, "verification failed: {s}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn read_record(path: &Path) -> Result<FamilyRecord, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_family(args: &FamilyArgs) -> Result<FormFamily, CliError> {
    match (&args.family_file, args.d) {
        (Some(p), _) => FormFamily::from_record(&read_record(p)?).map_err(usage),
        (None, Some(d)) => example_family(d).map_err(usage),
        (None, None) => Err(usage("one of --D or --family-file is required")),
    }
}

struct Out<'a> {
    w: &'a mut dyn Write,
    format: OutputFormat,
    header_done: bool,
}

impl Out<'_> {
    fn json(&mut self, v: &Value) -> std::io::Result<()> {
        if !self.header_done {
            writeln!(self.w, "{}", json!({"schema": SCHEMA_VERSION}))?;
            self.header_done = true;
        }
        writeln!(self.w, "{v}")
    }

    fn line(&mut self, s: &str) -> std::io::Result<()> {
        writeln!(self.w, "{s}")
    }

    fn is_json(&self) -> bool {
        self.format == OutputFormat::Json
    }

    /// Emits the header even when no record follows.
    fn finish(&mut self) -> std::io::Result<()> {
        if self.is_json() && !self.header_done {
            writeln!(self.w, "{}", json!({"schema": SCHEMA_VERSION}))?;
            self.header_done = true;
        }
        Ok(())
    }
}

pub fn run(cli: &Cli, w: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = Config::resolve(cli.config.as_deref()).map_err(usage)?;
    if let Some(o) = cli.output {
        cfg.output = match o {
            OutputArg::Json => OutputFormat::Json,
            OutputArg::Table => OutputFormat::Table,
        };
    }
    let mut out = Out {
        w,
        format: cfg.output,
        header_done: false,
    };
    match &cli.command {
        Command::Family { fam, n } => cmd_family(&load_family(fam)?, *n, &mut out)?,
        Command::Solve {
            fam,
            k,
            n,
            y_max,
            oracle,
            include_trivial,
            decompose,
        } => {
            let fam = load_family(fam)?;
            let spec = SearchSpec {
                k: k.clone(),
                n_lo: n.0,
                n_hi: n.1,
                y_max: *y_max,
                exclude_trivial: !include_trivial,
                exclude_degenerate: true,
            };
            let mut recs = if *k < 1 {
                Vec::new()
            } else if *oracle {
                brute_force_oracle(&fam, &spec)
            } else {
                solve_box(&fam, &spec)
            };
            if *decompose {
                attach_decompositions(&fam, k, &mut recs);
            }
            if !out.is_json() {
                out.line(&format!("{:>5} {:>12} {:>12} {:>8}", "n", "x", "y", "F"))?;
            }
            for r in &recs {
                if out.is_json() {
                    out.json(&r.to_json())?;
                } else {
                    out.line(&format!("{:>5} {:>12} {:>12} {:>8}", r.n, r.x, r.y, r.value))?;
                }
            }
        }
        Command::Sweep { fam, k, n, y_max } => {
            let fam = load_family(fam)?;
            let mut ks = k.clone();
            ks.sort_unstable();
            let template = SearchSpec::new(1, n.0, n.1, *y_max);
            let rows = k_sweep(&fam, &ks, &template);
            if !out.is_json() {
                out.line("k solutions log_max fitted_exponent kappa4 box_stable")?;
            }
            let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
            for r in &rows {
                if out.is_json() {
                    out.json(&json!({
                        "k": r.k,
                        "solutions": r.solutions,
                        "log_max_quantity": r.log_max_quantity.map(|v| format!("{v:.12}")),
                        "fitted_exponent": r.fitted_exponent.map(|v| format!("{v:.12}")),
                        "kappa3": "0.5",
                        "kappa4_emp": r.kappa4_emp.map(|v| format!("{v:.12}")),
                        "box_stable": r.box_stable,
                        "added_when_doubled": r.added_when_doubled,
                    }))?;
                } else {
                    out.line(&format!(
                        "{} {} {} {} {} {}",
                        r.k,
                        r.solutions,
                        fmt(r.log_max_quantity),
                        fmt(r.fitted_exponent),
                        fmt(r.kappa4_emp),
                        r.box_stable
                    ))?;
                }
            }
        }
        Command::Trace { fam, n, x, y, k } => {
            let fam = load_family(fam)?;
            let cert = trace_solution(&fam, *n, x, y, k.as_ref(), &cfg).map_err(|e| match e {
                TracerError::Reduction(r) => CliError::InvalidSolution(r.to_string()),
                other => CliError::Precision(other.to_string()),
            })?;
            let j = cert.to_json();
            if out.is_json() {
                out.json(&j)?;
            } else {
                out.line(&serde_json::to_string_pretty(&j).expect("serializable"))?;
            }
        }
        Command::Verify { d, family_file, deep } => {
            let mut targets: Vec<(String, Result<FormFamily, String>)> = Vec::new();
            if let Some(p) = family_file {
                let rec = read_record(p)?;
                targets.push((p.display().to_string(), FormFamily::from_record(&rec).map_err(|e| e.to_string())));
            } else {
                let ds = if d.is_empty() { vec![1, 2, 3] } else { d.clone() };
                for d in ds {
                    targets.push((format!("D={d}"), example_family(d).map_err(|e| e.to_string())));
                }
            }
            for (label, fam) in targets {
                let fam = match fam {
                    Ok(f) => f,
                    Err(e) => {
                        let c = Check::new("family_load", false, e);
                        report(&mut out, &label, &c)?;
                        return Err(CliError::Verification(format!("{label}: family_load")));
                    }
                };
                for c in verify_checks(&fam, *deep) {
                    report(&mut out, &label, &c)?;
                    if !c.pass {
                        return Err(CliError::Verification(format!("{label}: {} ({})", c.name, c.detail)));
                    }
                }
            }
        }
    }
    out.finish()?;
    Ok(())
}

fn cmd_family(fam: &FormFamily, n: (i64, i64), out: &mut Out<'_>) -> Result<(), CliError> {
    for i in n.0..=n.1 {
        let f = fam.form_at(i);
        if out.is_json() {
            out.json(&json!({
                "n": i,
                "form": f.to_strings(),
                "degenerate": fam.is_degenerate(i),
            }))?;
        } else {
            out.line(&format!("{i:>5}  {f}"))?;
        }
    }
    Ok(())
}

/// Outcome of one identity check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    /// Reported but never fails the run.
    pub informational: bool,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            pass,
            detail: detail.into(),
            informational: false,
        }
    }
}

fn report(out: &mut Out<'_>, label: &str, c: &Check) -> std::io::Result<()> {
    if out.is_json() {
        out.json(&json!({
            "family": label,
            "check": c.name,
            "pass": c.pass,
            "informational": c.informational,
            "detail": c.detail,
        }))
    } else {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        out.line(&format!("{tag} {label} {} {}", c.name, c.detail))
    }
}

/// Checks in order; the sequence is lazy so that a caller can stop at the
/// first failure without paying for the rest.
pub fn verify_checks(fam: &FormFamily, deep: bool) -> impl Iterator<Item = Check> + '_ {
    type Thunk<'a> = Box<dyn FnOnce() -> Check + 'a>;
    let mut v: Vec<Thunk<'_>> = Vec::new();
    v.push(Box::new(move || {
        let k = fam.field();
        let ok = k.is_unit(fam.epsilon());
        Check::new("epsilon_unit", ok, format!("N(eps) = {}", k.norm(fam.epsilon())))
    }));
    if let Some(d) = fam.example_d() {
        v.push(Box::new(move || match example_family(d) {
            Ok(e) => {
                let ok = e.to_record() == fam.to_record();
                Check::new("example_match", ok, if ok { "family equals the D-example" } else { "family data differs from the D-example" })
            }
            Err(e) => Check::new("example_match", false, e.to_string()),
        }));
        v.push(Box::new(move || {
            let ok = fam.form_at(-1).to_strings() == ["1", "-3", "3", "-1"];
            Check::new("cube_at_minus_one", ok, format!("F_-1 = {}", fam.form_at(-1)))
        }));
        v.push(Box::new(move || {
            let bad = (-20..=20).find(|&n| !swap_identity_check(fam, n).holds);
            Check::new(
                "swap_identity",
                bad.is_none(),
                bad.map_or("F_-n(X,Y) = -F_(n-2)(Y,X) for |n| <= 20".into(), |n| format!("fails at n = {n}")),
            )
        }));
        v.push(Box::new(move || match coefficient_sequence(d, -20, 20) {
            Ok(seq) => {
                let bad = (-20..=20).find(|&n| {
                    seq.get(n).map(|a| (-a).complete()) != Some(fam.form_at(n).a[1].clone())
                });
                let ok = seq.recurrence_holds && bad.is_none();
                let detail = match bad {
                    Some(n) => format!("a_{n} does not match the form coefficient"),
                    None if !seq.recurrence_holds => "recurrence fails".into(),
                    None => "a_n = tr(eps^(n+1)) satisfies the recurrence".into(),
                };
                Check::new("recurrence", ok, detail)
            }
            Err(e) => Check::new("recurrence", false, e.to_string()),
        }));
        v.push(Box::new(move || match coefficient_sequence(d, -2, 1) {
            Ok(seq) => {
                let r = &seq.discrepancy;
                Check::new(
                    "recurrence_order",
                    r.corrected_matches(),
                    format!(
                        "a_1 = {}; order (3D^2, 3D) gives {}; order (3D, 3D^2) gives {}",
                        r.a1_trace, r.a1_corrected, r.a1_swapped_order
                    ),
                )
            }
            Err(e) => Check::new("recurrence_order", false, e.to_string()),
        }));
    }
    v.push(Box::new(move || {
        let k = fam.field();
        match (regulator(fam, 1e-25), abs_log_height(k, fam.epsilon(), 1e-25)) {
            (Ok(r), Ok(h)) => {
                let diff = (&h.height.mul_i64(3) - &r).abs();
                let ok = diff.hi().to_f64() <= 3e-12;
                Check::new("height_regulator", ok, format!("R = {}, |3h(eps) - R| <= {:e}", r.mid_string(20), diff.hi().to_f64()))
            }
            (Err(e), _) | (_, Err(e)) => Check::new("height_regulator", false, e.to_string()),
        }
    }));
    v.push(Box::new(move || {
        let (re, c) = fam.field().embed(fam.epsilon(), 1e-30);
        let dev = (&(&c.abs() * &re.sqrt()) - &Interval::one(re.prec())).abs();
        let ok = dev.hi().to_f64() <= 1e-20;
        Check::new("conjugate_modulus", ok, format!("| |eps'| eps^(1/2) - 1 | <= {:e}", dev.hi().to_f64()))
    }));
    v.push(Box::new(move || oracle_check(fam, 100)));
    v.push(Box::new(move || {
        let mut c = match check_fundamental(fam) {
            Ok(f) => Check::new(
                "fundamentality",
                true,
                format!(
                    "{} (d_K {} {}, threshold {})",
                    if f.status == Fundamentality::ProvedFundamental { "proved fundamental" } else { "not decided" },
                    if f.disc_exact { "=" } else { "bound" },
                    f.field_disc,
                    f.threshold.mid_string(12)
                ),
            ),
            Err(e) => Check::new("fundamentality", true, e.to_string()),
        };
        c.informational = true;
        c
    }));
    if deep {
        v.push(Box::new(move || {
            let (_, c) = fam.field().embed(fam.epsilon(), 1e-30);
            let Some(theta) = c.arg_positive() else {
                return Check::new("sine_calibration", false, "angle of eps' not certified");
            };
            let zero = Interval::zero(theta.prec());
            match calibrate_c2(&zero, &theta, 10_000) {
                Ok(r) => {
                    let round_trip = r.worst_n.is_none_or(|n| sine_bound_holds(&zero, &theta, n, r.c2));
                    let ok = r.c2.is_finite() && round_trip;
                    Check::new("sine_calibration", ok, format!("c2 = {} at n = {:?}, {} skipped", r.c2, r.worst_n, r.skipped.len()))
                }
                Err(e) => Check::new("sine_calibration", false, e.to_string()),
            }
        }));
        v.push(Box::new(move || oracle_check(fam, 10_000)));
    }
    v.into_iter().map(|f| f())
}

fn oracle_check(fam: &FormFamily, y_max: u64) -> Check {
    let spec = SearchSpec::new(10, -8, 8, y_max);
    let a = solve_box(fam, &spec);
    let b = brute_force_oracle(fam, &spec);
    Check::new(
        "oracle_equivalence",
        a == b,
        format!("k = 10, n in -8..8, y_max = {y_max}: {} pruned, {} oracle", a.len(), b.len()),
    )
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<(), CliError>, String) {
        let cli = Cli::try_parse_from(std::iter::once("cubic-thue").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = run(&cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-2..2"), Ok((-2, 2)));
        assert_eq!(parse_range("3"), Ok((3, 3)));
        assert_eq!(parse_range("1..=4"), Ok((1, 4)));
        assert!(parse_range("2..1").is_err());
        assert!(parse_range("a..1").is_err());
    }

    #[test]
    fn family_lines() {
        let (r, s) = run_args(&["family", "--D", "2", "--n", "1"]);
        assert!(r.is_ok());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], r#"{"schema":1}"#);
        assert!(lines[1].contains(r#"["1","-156","12","-1"]"#));
        let (r, _) = run_args(&["family", "--D", "-1"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }

    #[test]
    fn trace_rejects_non_solutions() {
        let (r, _) = run_args(&["trace", "--D", "1", "--n", "-1", "--x", "1", "--y", "2"]);
        assert_eq!(r.unwrap_err().exit_code(), 4);
        let (r, _) = run_args(&["trace", "--D", "1", "--n", "0", "--x", "0", "--y", "2"]);
        assert_eq!(r.unwrap_err().exit_code(), 4);
    }
}
