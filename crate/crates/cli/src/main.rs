use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use parker::gaussian::{
    chi, congruum_triple, search_hourglass_with_progress, GaussianInt, SearchMode,
};
use parker::search::{msos, AssignmentPolicy, SearchResult};
use parker::survey::{
    scan_fields, scan_rings, write_records, write_report, FieldFilter, ReportFormat, RingFilter,
    ScanConfig, ScanOutcome,
};
use parker::{Error, StructureKind};
use serde_json::{json, Value};

mod verify;

#[derive(Parser, Debug)]
#[command(
    name = "parker",
    version,
    about = "Magic squares of squares over finite rings and fields"
)]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search the field of order q.
    Field(Single),
    /// Search Z/nZ.
    Ring(Single),
    /// Classify every field order in a range.
    ScanFields {
        #[command(flatten)]
        range: ScanArgs,
        #[arg(long, conflicts_with = "prime_powers")]
        primes: bool,
        /// Prime powers p^r with r >= 2 only.
        #[arg(long)]
        prime_powers: bool,
    },
    /// Classify every ring Z/nZ in a range.
    ScanRings {
        #[command(flatten)]
        range: ScanArgs,
        #[arg(long, conflicts_with = "modulus")]
        odd: bool,
        /// Keep n with n ≡ res (mod M).
        #[arg(long = "mod", value_name = "M", requires = "res")]
        modulus: Option<u64>,
        #[arg(long, value_name = "R", requires = "modulus")]
        res: Option<u64>,
    },
    /// Look for magic hourglasses of squares over Z[i].
    Hourglass {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        max_norm: u64,
        /// Log progress to stderr every K units of work.
        #[arg(long, value_name = "K")]
        report_every: Option<u64>,
    },
    /// Validate a square file.
    Verify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// The congruum triple of (m, n, k).
    Congruum {
        #[arg(allow_hyphen_values = true)]
        m: BigInt,
        #[arg(allow_hyphen_values = true)]
        n: BigInt,
        #[arg(allow_hyphen_values = true)]
        k: BigInt,
    },
    /// χ(re + im·i).
    Chi {
        #[arg(allow_hyphen_values = true)]
        re: BigInt,
        #[arg(allow_hyphen_values = true)]
        im: BigInt,
    },
}

#[derive(Args, Debug)]
struct Single {
    order: u64,
    /// Print every tuple found.
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = AssignmentPolicy::Canonical)]
    policy: AssignmentPolicy,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long)]
    from: u64,
    #[arg(long)]
    to: u64,
    #[arg(long, env = "PARKER_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    #[arg(long, default_value_t = AssignmentPolicy::Canonical)]
    policy: AssignmentPolicy,
    /// Write elapsed_ms = 0 so output is reproducible byte for byte.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exhaustive,
    ProductFirst,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub(crate) fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Invariant(_)) {
            3
        } else {
            1
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Field(args) => single(StructureKind::Field, args),
        Command::Ring(args) => single(StructureKind::Ring, args),
        Command::ScanFields {
            range,
            primes,
            prime_powers,
        } => {
            let filter = if primes {
                FieldFilter::Primes
            } else if prime_powers {
                FieldFilter::StrictPrimePowers
            } else {
                FieldFilter::All
            };
            let config = scan_config(&range)?;
            let outcome = scan_fields(range.from, range.to, filter, &config)?;
            emit_scan(&range, &outcome)
        }
        Command::ScanRings {
            range,
            odd,
            modulus,
            res,
        } => {
            let filter = match (odd, modulus, res) {
                (true, _, _) => RingFilter::Odd,
                (false, Some(0), _) => return Err(Failure::usage("--mod must be positive")),
                (false, Some(m), Some(r)) if r >= m => {
                    return Err(Failure::usage(format!("--res {r} must be below --mod {m}")))
                }
                (false, Some(modulus), Some(residue)) => {
                    RingFilter::Congruence { modulus, residue }
                }
                _ => RingFilter::All,
            };
            let config = scan_config(&range)?;
            let outcome = scan_rings(range.from, range.to, filter, &config)?;
            emit_scan(&range, &outcome)
        }
        Command::Hourglass {
            mode,
            max_norm,
            report_every,
        } => hourglass(mode, max_norm, report_every),
        Command::Verify { file, json } => verify::run(&file, json),
        Command::Congruum { m, n, k } => {
            let c = congruum_triple(m, n, k);
            println!("r={} s={} t={} congruum={}", c.r, c.s, c.t, c.congruum);
            Ok(0)
        }
        Command::Chi { re, im } => {
            let c = chi(&GaussianInt::new(re, im));
            println!("r={} s={} t={}", c.r, c.s, c.t);
            Ok(0)
        }
    }
}

fn single(kind: StructureKind, args: Single) -> Outcome {
    let result = msos(kind, args.order, args.policy)?;
    let mut out = io::stdout().lock();
    if args.json {
        let value = result_json(&result, args.list);
        writeln!(out, "{}", value)?;
    } else {
        write_plain(&mut out, &result, args.list)?;
    }
    Ok(0)
}

fn result_json(r: &SearchResult, list: bool) -> Value {
    let c = &r.carrier;
    let mut v = json!({
        "carrier": c.to_string(),
        "kind": c.structure(),
        "order": c.order(),
        "policy": r.policy,
        "tuple_count": r.tuple_count,
        "dihedral_class_count": r.dihedral_class_count,
        "parker": r.parker,
        "prefilter_reason": r.prefilter_verdict,
    });
    if c.modulus_poly().is_some() {
        v["modulus_poly"] = json!(c.modulus_poly());
    }
    if list {
        let tuples: Vec<Value> = r
            .tuples
            .iter()
            .map(|t| Value::Array(t.entries().iter().map(|&x| c.element_to_json(x)).collect()))
            .collect();
        v["tuples"] = Value::Array(tuples);
    }
    v
}

fn write_plain(out: &mut impl Write, r: &SearchResult, list: bool) -> io::Result<()> {
    let c = &r.carrier;
    let verdict = if r.parker { "Parker" } else { "non-Parker" };
    writeln!(out, "{c}")?;
    writeln!(out, "  policy:           {}", r.policy)?;
    writeln!(out, "  squares found:    {}", r.tuple_count)?;
    writeln!(out, "  dihedral classes: {}", r.dihedral_class_count)?;
    if let Some(reason) = r.prefilter_verdict {
        writeln!(out, "  ruled out by:     {reason}")?;
    }
    writeln!(out, "  verdict:          {verdict}")?;
    if list {
        for (k, t) in r.tuples.iter().enumerate() {
            writeln!(out)?;
            writeln!(out, "#{}", k + 1)?;
            let cells: Vec<String> = t
                .entries()
                .iter()
                .map(|&x| c.element_to_json(x).to_string())
                .collect();
            let width = cells.iter().map(String::len).max().unwrap_or(1);
            for row in cells.chunks(3) {
                writeln!(
                    out,
                    "  {:>w$} {:>w$} {:>w$}",
                    row[0],
                    row[1],
                    row[2],
                    w = width
                )?;
            }
        }
    }
    Ok(())
}

fn scan_config(range: &ScanArgs) -> Result<ScanConfig, Failure> {
    if range.from > range.to {
        return Err(Failure::usage(format!(
            "--from {} exceeds --to {}",
            range.from, range.to
        )));
    }
    let jobs = match range.jobs {
        Some(0) => return Err(Failure::usage("--jobs must be at least 1")),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    Ok(ScanConfig {
        jobs,
        checkpoint: range.checkpoint.clone(),
        policy: range.policy,
        record_timings: !range.no_timings,
    })
}

fn emit_scan(range: &ScanArgs, outcome: &ScanOutcome) -> Outcome {
    match &range.out {
        Some(path) => write_report(&outcome.records, range.format, path)?,
        None => write_records(&outcome.records, range.format, io::stdout().lock())?,
    }
    let parker = outcome.parker_orders();
    eprintln!(
        "{} orders scanned, {} Parker, {} non-Parker",
        outcome.records.len(),
        parker.len(),
        outcome.records.len() - parker.len()
    );
    Ok(0)
}

pub(crate) fn big_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

fn hourglass(mode: Mode, max_norm: u64, report_every: Option<u64>) -> Outcome {
    let mode = match mode {
        Mode::Exhaustive => SearchMode::Exhaustive,
        Mode::ProductFirst => SearchMode::ProductFirst,
    };
    let every = report_every.unwrap_or(0);
    let progress = |done: u64| eprintln!("progress: {done}");
    let found = search_hourglass_with_progress(mode, max_norm, every, &progress)?;
    let mut out = io::stdout().lock();
    for hit in &found.hits {
        let pair = |g: &GaussianInt| json!([big_json(&g.re), big_json(&g.im)]);
        let line = json!({
            "x": pair(&hit.x),
            "y": pair(&hit.y),
            "z": pair(&hit.z),
            "cells": hit.cells.iter().map(big_json).collect::<Vec<_>>(),
        });
        writeln!(out, "{line}")?;
    }
    eprintln!(
        "{} triples tested, {} skipped, {} hits",
        found.triples_tested,
        found.skipped,
        found.hits.len()
    );
    Ok(0)
}
