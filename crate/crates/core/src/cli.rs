//! The `leafrate` command line.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::{AnalyticsError, Estimate, PrecisionContext, Solver};
use crate::arnold::{rate_report, vertex_budget, ACount, ArnoldError, CSV_HEADER};
use crate::genfunc::{
    leaf_polynomials, read_table, write_table, CacheError, CoefficientTable, GenfuncError,
};
use crate::precision::MAX_DIGITS;

/// Largest table order the CLI will build.
pub const MAX_ORDER: usize = 1200;

/// Exhaustively counts rooted unlabelled trees by vertices and leaves,
/// computes leaf-fraction growth constants to arbitrary precision, and counts
/// trees admitted by the Arnold inequalities.
#[derive(Debug, Parser)]
#[command(name = "leafrate", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Coefficient-table cache file, read if present and (re)written when
    /// it does not cover the needed order.
    #[arg(long, global = true, env = "LEAFRATE_CACHE")]
    pub cache: Option<PathBuf>,

    /// Worker threads for exhaustive enumeration.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a_{n,k}, the number of trees with n vertices and k leaves, for n <= N.
    Counts {
        /// Largest vertex count N.
        #[arg(short = 'n', long = "n", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Print alpha, z0, x0, C1, m, sigma2 and C2.
    Constants(Numeric),
    /// Print the growth rate C(lambda) of trees with more than lambda n leaves.
    Rate {
        #[command(flatten)]
        numeric: Numeric,
        /// Leaf fractions in [0, 1), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        lambda: Vec<f64>,
    },
    /// Print the Arnold-inequality counts L_d, L'_d and A_d as CSV.
    Arnold {
        /// Curve degrees (at least 3), comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
        degrees: Vec<usize>,
        /// Largest number of trees enumerated for each A_d.
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u64,
    },
}

#[derive(Debug, Args)]
pub struct Numeric {
    /// Significant digits of the printed values (1 to 250).
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..=MAX_DIGITS as u64))]
    pub digits: u64,
    /// Series truncation order; defaults to digits * ln 10 / |ln 0.55| + 32.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub order: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Cache { path: String, source: CacheError },
    #[error("cannot write cache {path}: {source}")]
    CacheWrite { path: String, source: io::Error },
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Arnold(#[from] ArnoldError),
    #[error("{0}")]
    Tolerance(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("output: {0}")]
    Output(#[from] io::Error),
}

/// Parses `args`, runs the command, and returns the exit status:
/// 0 on success, 1 when a quantity missed its tolerance or budget or an
/// error occurred, 2 on invalid usage.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&config, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "leafrate: error: {e}");
            1
        }
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads as usize)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let mut tables = Tables {
        cache: config.cache.as_deref(),
        table: None,
    };
    let mut text = String::new();
    let code = match &config.command {
        Command::Counts { n } => {
            let t = tables.get(*n as usize, err)?;
            counts(&t, *n as usize, config.format, &mut text);
            0
        }
        Command::Constants(num) => constants(num, config.format, &mut tables, &mut text, err)?,
        Command::Rate { numeric, lambda } => {
            rate(numeric, lambda, config.format, &mut tables, &mut text, err)?
        }
        Command::Arnold { degrees, budget } => {
            arnold(degrees, *budget, &pool, &mut tables, &mut text, err)?
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(code)
}

/// Coefficient tables, backed by the optional cache file.
struct Tables<'a> {
    cache: Option<&'a Path>,
    table: Option<CoefficientTable>,
}

impl Tables<'_> {
    fn get(&mut self, order: usize, log: &mut dyn Write) -> Result<CoefficientTable, CliError> {
        if let Some(t) = &self.table {
            if t.order() >= order {
                return Ok(t.truncated(order));
            }
        }
        let Some(path) = self.cache else {
            let t = leaf_polynomials(order);
            self.table = Some(t.clone());
            return Ok(t);
        };
        let shown = path.display().to_string();
        let cached = match File::open(path) {
            Ok(f) => Some(
                read_table(BufReader::new(f)).map_err(|source| CliError::Cache {
                    path: shown.clone(),
                    source,
                })?,
            ),
            Err(e) if e.kind() == io::ErrorKind::NotFound => None,
            Err(e) => {
                return Err(CliError::Cache {
                    path: shown,
                    source: CacheError::Io(e),
                })
            }
        };
        if let Some(t) = cached.filter(|t| t.order() >= order) {
            let _ = writeln!(log, "cache hit: {shown} (order {})", t.order());
            self.table = Some(t.clone());
            return Ok(t.truncated(order));
        }
        let t = leaf_polynomials(order);
        let write = || -> io::Result<()> {
            let mut w = BufWriter::new(File::create(path)?);
            write_table(&t, &mut w)?;
            w.flush()
        };
        write().map_err(|source| CliError::CacheWrite {
            path: shown.clone(),
            source,
        })?;
        let _ = writeln!(log, "cache miss: {shown} (wrote order {order})");
        self.table = Some(t.clone());
        Ok(t)
    }
}

fn counts(t: &CoefficientTable, n: usize, format: Format, out: &mut String) {
    use std::fmt::Write as _;
    if format == Format::Csv {
        out.push_str("n,k,a_nk\n");
    }
    let sep = if format == Format::Csv { ',' } else { ' ' };
    for row in &t.rows()[..n] {
        for (i, c) in row.coeffs.iter().enumerate() {
            if c.bits() > 0 {
                let _ = writeln!(out, "{}{sep}{}{sep}{c}", row.n, i + 1);
            }
        }
    }
}

/// Runs `f` on a solver, growing the table whenever a series asks for more
/// terms than it has.
fn with_solver<T>(
    num: &Numeric,
    tables: &mut Tables,
    log: &mut dyn Write,
    f: impl Fn(&Solver) -> Result<T, AnalyticsError>,
) -> Result<(T, PrecisionContext), CliError> {
    let digits = num.digits as usize;
    let mut ctx = PrecisionContext::new(digits);
    if let Some(order) = num.order {
        ctx = ctx.with_order(order as usize);
    }
    loop {
        if ctx.order > MAX_ORDER {
            let _ = writeln!(log, "order capped at {MAX_ORDER}");
            ctx = ctx.with_order(MAX_ORDER);
        }
        let _ = writeln!(log, "digits = {digits}, order = {}", ctx.order);
        let table = tables.get(ctx.order, log)?;
        match f(&Solver::new(&table, &ctx)) {
            Err(AnalyticsError::Series(GenfuncError::InsufficientOrder { required, .. }))
                if ctx.order < MAX_ORDER && required > ctx.order =>
            {
                let next = required.max(ctx.order + ctx.order / 4);
                ctx = ctx.with_order(next);
            }
            other => return Ok((other?, ctx)),
        }
    }
}

/// The printed digits are reliable: the error stays below a tenth of a unit
/// in the last printed place.
fn within_tolerance(e: &Estimate, digits: usize) -> bool {
    let scale = e.value.log10_abs().floor();
    let unit = 10f64.powf(scale - digits as f64 + 1.0);
    e.error.is_finite() && e.error < 0.1 * unit
}

fn constants(
    num: &Numeric,
    format: Format,
    tables: &mut Tables,
    out: &mut String,
    log: &mut dyn Write,
) -> Result<i32, CliError> {
    use std::fmt::Write as _;
    let digits = num.digits as usize;
    let (c, _) = with_solver(num, tables, log, |s| s.constants())?;
    if format == Format::Csv {
        out.push_str("name,value,error\n");
    }
    let mut missed = Vec::new();
    for (name, e) in c.named() {
        let v = e.value.to_sig_digits(digits);
        match format {
            Format::Text => {
                let _ = writeln!(out, "{name} = {v}");
            }
            Format::Csv => {
                let _ = writeln!(out, "{name},{v},{:.3e}", e.error);
            }
        }
        if !within_tolerance(e, digits) {
            missed.push(format!("{name} (error {:.3e})", e.error));
        }
    }
    tolerance_status(&missed, log)
}

fn tolerance_status(missed: &[String], log: &mut dyn Write) -> Result<i32, CliError> {
    if missed.is_empty() {
        Ok(0)
    } else {
        let _ = writeln!(
            log,
            "leafrate: error: {}",
            CliError::Tolerance(format!("below requested precision: {}", missed.join(", ")))
        );
        Ok(1)
    }
}

fn rate(
    num: &Numeric,
    lambdas: &[f64],
    format: Format,
    tables: &mut Tables,
    out: &mut String,
    log: &mut dyn Write,
) -> Result<i32, CliError> {
    use std::fmt::Write as _;
    let digits = num.digits as usize;
    let (values, _) = with_solver(num, tables, log, |s| {
        lambdas
            .iter()
            .map(|&l| s.rate_function(l))
            .collect::<Result<Vec<_>, _>>()
    })?;
    if format == Format::Csv {
        out.push_str("lambda,C,z,error\n");
    }
    let mut missed = Vec::new();
    for v in &values {
        let c = v.c.value.to_sig_digits(digits);
        match format {
            Format::Text => {
                let _ = writeln!(out, "C({}) = {c}", v.lambda);
            }
            Format::Csv => {
                let z = v
                    .critical
                    .as_ref()
                    .map(|cp| cp.z.value.to_sig_digits(digits))
                    .unwrap_or_else(|| "1".into());
                let _ = writeln!(out, "{},{c},{z},{:.3e}", v.lambda, v.c.error);
            }
        }
        if !within_tolerance(&v.c, digits) {
            missed.push(format!("C({}) (error {:.3e})", v.lambda, v.c.error));
        }
    }
    tolerance_status(&missed, log)
}

fn arnold(
    degrees: &[usize],
    budget: u64,
    pool: &rayon::ThreadPool,
    tables: &mut Tables,
    out: &mut String,
    log: &mut dyn Write,
) -> Result<i32, CliError> {
    let max_n = degrees
        .iter()
        .map(|&d| vertex_budget(d).map(|b| b.n_d))
        .collect::<Result<Vec<_>, _>>()?;
    let table = tables.get(max_n.into_iter().max().unwrap_or(1), log)?;
    let rows = pool.install(|| rate_report(degrees, &table, Some(budget)))?;
    out.push_str(CSV_HEADER);
    out.push('\n');
    let mut partial = Vec::new();
    for r in &rows {
        out.push_str(&r.csv_row());
        out.push('\n');
        if let ACount::Partial(p) = &r.a {
            partial.push(format!("# A_{} incomplete: {p}", p.d));
        }
    }
    for line in &partial {
        out.push_str(line);
        out.push('\n');
    }
    Ok(if partial.is_empty() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["leafrate"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn counts_single_vertex() {
        let (code, out, _) = run_args(&["counts", "--n", "1"]);
        assert_eq!((code, out.as_str()), (0, "1 1 1\n"));
    }

    #[test]
    fn counts_csv_header() {
        let (code, out, _) = run_args(&["counts", "-n", "3", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,k,a_nk\n1,1,1\n2,1,1\n3,1,1\n3,2,1\n");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_args(&["counts", "--n", "0"]).0, 2);
        assert_eq!(run_args(&["constants", "--digits", "0"]).0, 2);
        assert_eq!(run_args(&["frobnicate"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn bad_degree_and_lambda_fail() {
        assert_eq!(run_args(&["arnold", "--degrees", "2"]).0, 1);
        assert_eq!(run_args(&["rate", "--digits", "5", "--lambda", "1.5"]).0, 1);
    }

    #[test]
    fn tolerance_check_uses_the_last_place() {
        let e = |v: f64, err: f64| Estimate {
            value: crate::real::Real::from_f64(v, 128),
            error: err,
        };
        assert!(within_tolerance(&e(2.5, 1e-12), 10));
        assert!(!within_tolerance(&e(2.5, 2e-10), 10));
        assert!(within_tolerance(&e(0.25, 1e-12), 10));
        assert!(!within_tolerance(&e(0.25, 2e-11), 10));
    }
}
