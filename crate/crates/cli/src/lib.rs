//! Command-line front end. [`run`] parses arguments, writes the report to
//! `out`, diagnostics to `err`, and returns the process exit code.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypersre::recursion::{self, ChainOptions};
use hypersre::sre::{self, DEFAULT_ENUMERATION_CAP};
use hypersre::{Alpha, BoundVariant, EnumOptions, Error, Hypergraph3, LatticeKind, Moment};
use serde::Serialize;

pub mod verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "hypersre", version, about = "Stabilizer Renyi entropy of 3-uniform hypergraph states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a generated lattice as hypergraph JSON.
    Lattice(LatticeArgs),
    /// Exact entropy by enumeration over all bit-strings.
    Exact(ComputeArgs),
    /// Monte Carlo estimate with a one-standard-error bar.
    Mc(McArgs),
    /// Chain entropy from the transfer-matrix recursion.
    Recursion(RecursionArgs),
    /// Rank-based and degree-based upper bounds.
    Bounds(ComputeArgs),
    /// Run the oracle checks on a small hypergraph.
    Verify(ComputeArgs),
    /// Entropy over a range of lattice sizes.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Renyi index: a positive number, `1`, or `inf`.
    #[arg(long, default_value = "2")]
    alpha: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Largest qubit count for exhaustive enumeration.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    max_qubits: usize,
    /// Omit timing fields so identical runs give identical bytes.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Hypergraph JSON file.
    #[arg(long, conflicts_with = "lattice")]
    input: Option<PathBuf>,
    /// Lattice family: chain, union-jack, triangular.
    #[arg(long)]
    lattice: Option<String>,
    /// Linear size L of a periodic lattice.
    #[arg(long)]
    l: Option<usize>,
    /// Number of qubits of a chain.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct LatticeArgs {
    #[command(flatten)]
    source: Source,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct McArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1 << 12)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RecursionArgs {
    /// Chain length.
    #[arg(long, required_unless_present = "fit")]
    n: Option<usize>,
    /// Fit the large-N linear form instead.
    #[arg(long)]
    fit: bool,
    #[arg(long, default_value_t = 150)]
    n_lo: usize,
    #[arg(long, default_value_t = 200)]
    n_hi: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    lattice: String,
    /// First size (L, or N for the chain).
    #[arg(long)]
    from: usize,
    /// Last size, inclusive.
    #[arg(long)]
    to: usize,
    /// Samples per size when the qubit count exceeds the enumeration cap.
    #[arg(long, default_value_t = 1 << 8)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_capacity() { EXIT_CAPACITY } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// One row of output; every subcommand except `lattice` and `verify` emits
/// these, so JSON and CSV carry the same fields.
#[derive(Serialize, Debug, Clone, Default)]
pub struct Record {
    pub command: String,
    pub lattice: Option<String>,
    pub size: Option<usize>,
    pub n: usize,
    pub alpha: String,
    pub method: String,
    pub sre: Option<f64>,
    pub sre_std_error: Option<f64>,
    /// Exact moment as `num/den`.
    pub pl_moment: Option<String>,
    pub pl_moment_decimal: Option<String>,
    pub pl_moment_std_error: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub bound_per_vertex: Option<f64>,
    pub bound_jensen: Option<f64>,
    pub bound_prev: Option<f64>,
    pub h_bar: Option<String>,
    pub delta_bar: Option<String>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub elapsed_ms: Option<u64>,
}

/// Decimal rendering of a moment that stays readable far below `f64` range.
pub fn decimal_string(m: &Moment) -> String {
    let l2 = m.log2();
    if l2.abs() < 1000.0 {
        let v = m.to_f64();
        if v == 0.0 || (1e-6..1e15).contains(&v.abs()) {
            format!("{v}")
        } else {
            format!("{v:e}")
        }
    } else {
        let l10 = l2 * std::f64::consts::LOG10_2;
        let e = l10.floor();
        format!("{}e{}", 10f64.powf(l10 - e), e as i64)
    }
}

/// Runs the CLI on `argv` (including the program name).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Lattice(a) => {
            let (h, _) = load(&a.source)?;
            write_out(out, &h.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Exact(a) => {
            let rec = timed(&a.common, || exact_record(&a.source, &a.common))?;
            emit(out, a.common.format, &[rec])
        }
        Command::Mc(a) => {
            let rec = timed(&a.common, || mc_record(&a.source, &a.common, a.samples, a.seed))?;
            emit(out, a.common.format, &[rec])
        }
        Command::Recursion(a) => {
            let rec = timed(&a.common, || recursion_record(&a))?;
            emit(out, a.common.format, &[rec])
        }
        Command::Bounds(a) => {
            let rec = timed(&a.common, || bounds_record(&a.source, &a.common))?;
            emit(out, a.common.format, &[rec])
        }
        Command::Verify(a) => {
            let (h, _) = load(&a.source)?;
            let alpha = parse_alpha(&a.common.alpha)?;
            let opts = enum_options(&a.common);
            let checks = verify::run_checks(&h, alpha, &opts)?;
            match a.common.format {
                Format::Json => write_out(out, &to_json(&verify::Report::new(h.n(), &checks))?)?,
                Format::Csv => write_out(out, &to_csv(&checks)?)?,
            }
            for c in checks.iter().filter(|c| !c.passed) {
                let _ = writeln!(err, "verification failed: {}: {}", c.name, c.detail);
            }
            Ok(verify::exit_code(&checks))
        }
        Command::Scan(a) => {
            let recs = scan_records(&a, err)?;
            emit(out, a.common.format, &recs)
        }
    }
}

fn write_out(out: &mut dyn Write, s: &str) -> Result<(), Failure> {
    out.write_all(s.as_bytes())
        .and_then(|_| if s.ends_with('\n') { Ok(()) } else { out.write_all(b"\n") })
        .map_err(|e| input_error(format!("cannot write output: {e}")))
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| input_error(format!("cannot serialize report: {e}")))
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| input_error(format!("cannot serialize report: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| input_error(format!("cannot serialize report: {e}")))?;
    String::from_utf8(bytes).map_err(|e| input_error(e.to_string()))
}

fn emit(out: &mut dyn Write, format: Format, recs: &[Record]) -> Result<i32, Failure> {
    let text = match (format, recs) {
        (Format::Json, [one]) => to_json(one)?,
        (Format::Json, many) => to_json(many)?,
        (Format::Csv, rows) => to_csv(rows)?,
    };
    write_out(out, &text)?;
    Ok(EXIT_OK)
}

fn timed(common: &Common, f: impl FnOnce() -> Result<Record, Failure>) -> Result<Record, Failure> {
    let start = Instant::now();
    let mut rec = f()?;
    if !common.deterministic {
        rec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(rec)
}

fn parse_alpha(s: &str) -> Result<Alpha, Failure> {
    s.parse::<Alpha>()
        .map_err(|e| input_error(format!("invalid --alpha: {e}")))
}

fn enum_options(common: &Common) -> EnumOptions {
    let opts = EnumOptions::default().with_cap(common.max_qubits);
    match common.threads {
        Some(t) => opts.with_threads(t),
        None => opts,
    }
}

/// The hypergraph plus, for generated lattices, its family and size.
fn load(source: &Source) -> Result<(Hypergraph3, Option<(LatticeKind, usize)>), Failure> {
    match (&source.input, &source.lattice) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
            let h = Hypergraph3::from_json(&text)
                .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            Ok((h, None))
        }
        (None, Some(kind)) => {
            let kind: LatticeKind = kind.parse()?;
            let size = match (kind, source.n, source.l) {
                (LatticeKind::Chain, Some(n), None) => n,
                (LatticeKind::Chain, _, _) => return Err(input_error("the chain takes --n (and not --l)")),
                (_, None, Some(l)) => l,
                (k, _, _) => return Err(input_error(format!("lattice {} takes --l (and not --n)", k.name()))),
            };
            Ok((kind.build(size)?, Some((kind, size))))
        }
        (None, None) => Err(input_error("one of --input or --lattice is required")),
        (Some(_), Some(_)) => Err(input_error("--input and --lattice are mutually exclusive")),
    }
}

fn base_record(command: &str, h: &Hypergraph3, lattice: Option<(LatticeKind, usize)>, alpha: Alpha) -> Record {
    Record {
        command: command.to_string(),
        lattice: lattice.map(|(k, _)| k.name().to_string()),
        size: lattice.map(|(_, s)| s),
        n: h.n(),
        alpha: alpha.to_string(),
        ..Record::default()
    }
}

fn fill_moment(rec: &mut Record, m: &Moment) {
    rec.pl_moment = m.as_exact().map(|r| format!("{}/{}", r.numer(), r.denom()));
    rec.pl_moment_decimal = Some(decimal_string(m));
}

fn exact_for(h: &Hypergraph3, alpha: Alpha, opts: &EnumOptions, rec: &mut Record) -> Result<(), Failure> {
    let r = sre::sre(h, alpha, opts)?;
    rec.method = r.method.as_str().to_string();
    rec.sre = Some(r.sre);
    if let Some(m) = &r.pl_moment {
        fill_moment(rec, m);
    }
    Ok(())
}

fn mc_for(h: &Hypergraph3, alpha: Alpha, samples: u64, seed: u64, opts: &EnumOptions, rec: &mut Record) -> Result<(), Failure> {
    let est = sre::mc_sre(h, alpha, samples, seed, opts)?;
    let a = alpha.as_f64();
    rec.method = "monte_carlo".to_string();
    rec.sre = Some(est.sre_point);
    rec.sre_std_error = Some(est.sre_std_error(a));
    rec.pl_moment_decimal = Some(decimal_string(&Moment::Float(est.mean)));
    rec.pl_moment_std_error = Some(est.std_error);
    rec.samples = Some(samples);
    rec.seed = Some(seed);
    Ok(())
}

fn exact_record(source: &Source, common: &Common) -> Result<Record, Failure> {
    let (h, lat) = load(source)?;
    let alpha = parse_alpha(&common.alpha)?;
    let mut rec = base_record("exact", &h, lat, alpha);
    exact_for(&h, alpha, &enum_options(common), &mut rec)?;
    Ok(rec)
}

fn mc_record(source: &Source, common: &Common, samples: u64, seed: u64) -> Result<Record, Failure> {
    let (h, lat) = load(source)?;
    let alpha = parse_alpha(&common.alpha)?;
    let mut rec = base_record("mc", &h, lat, alpha);
    mc_for(&h, alpha, samples, seed, &enum_options(common), &mut rec)?;
    Ok(rec)
}

fn recursion_record(a: &RecursionArgs) -> Result<Record, Failure> {
    let alpha = parse_alpha(&a.common.alpha)?;
    let alpha_f = alpha.finite()?;
    let opts = ChainOptions {
        enumeration: enum_options(&a.common),
        ..ChainOptions::default()
    };
    let mut rec = Record {
        command: "recursion".to_string(),
        lattice: Some(LatticeKind::Chain.name().to_string()),
        alpha: alpha.to_string(),
        method: "recursion".to_string(),
        ..Record::default()
    };
    if a.fit {
        let fit = recursion::asymptotic_fit(alpha, a.n_lo, a.n_hi, &opts)?;
        rec.size = Some(a.n_hi);
        rec.n = a.n_hi;
        rec.slope = Some(fit.slope);
        rec.intercept = Some(fit.intercept);
    } else {
        let n = a.n.expect("clap requires --n without --fit");
        let m = recursion::chain_pl_moment(n, alpha, &opts)?;
        rec.size = Some(n);
        rec.n = n;
        rec.sre = Some(sre::sre_from_moment(&m, alpha_f));
        fill_moment(&mut rec, &m);
    }
    Ok(rec)
}

fn bounds_record(source: &Source, common: &Common) -> Result<Record, Failure> {
    let (h, lat) = load(source)?;
    let alpha = parse_alpha(&common.alpha)?;
    let stats = h.vertex_stats()?;
    let mut rec = base_record("bounds", &h, lat, alpha);
    rec.method = "bound".to_string();
    rec.bound_per_vertex = Some(sre::upper_bound(&h, alpha, BoundVariant::PerVertex)?);
    rec.bound_jensen = Some(sre::upper_bound(&h, alpha, BoundVariant::Jensen)?);
    rec.bound_prev = Some(sre::prev_upper_bound(&h, alpha)?);
    rec.h_bar = Some(stats.h_bar.to_string());
    rec.delta_bar = Some(stats.delta_bar.to_string());
    Ok(rec)
}

fn scan_records(a: &ScanArgs, err: &mut dyn Write) -> Result<Vec<Record>, Failure> {
    let kind: LatticeKind = a.lattice.parse()?;
    let alpha = parse_alpha(&a.common.alpha)?;
    if a.from > a.to {
        return Err(input_error(format!("--from ({}) exceeds --to ({})", a.from, a.to)));
    }
    let opts = enum_options(&a.common);
    let mut recs = Vec::new();
    for size in a.from..=a.to {
        let h = match kind.build(size) {
            Ok(h) => h,
            Err(e) => {
                let _ = writeln!(err, "skipping size {size}: {e}");
                continue;
            }
        };
        let start = Instant::now();
        let mut rec = base_record("scan", &h, Some((kind, size)), alpha);
        if h.n() <= opts.cap {
            exact_for(&h, alpha, &opts, &mut rec)?;
        } else {
            mc_for(&h, alpha, a.samples, a.seed, &opts, &mut rec)?;
        }
        if !a.common.deterministic {
            rec.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
        recs.push(rec);
    }
    Ok(recs)
}
