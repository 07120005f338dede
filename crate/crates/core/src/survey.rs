//! Range scans over field orders and ring moduli.
//!
//! One order is one unit of work. Workers pull orders from a shared cursor;
//! the coordinating thread buffers completions and releases them in ascending
//! order, so the record list, the checkpoint file and the record-breaker table
//! never depend on `jobs`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{Carrier, StructureKind};
use crate::arith;
use crate::error::{Error, Result};
use crate::search::{msos_field_in, msos_ring, prefilter_field, AssignmentPolicy, PrefilterReason};

/// Per-order outcome of a scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub order: u64,
    pub kind: StructureKind,
    pub square_count: usize,
    pub msos_count: usize,
    pub dihedral_class_count: usize,
    pub parker: bool,
    pub prefilter_reason: Option<PrefilterReason>,
    pub elapsed_ms: u64,
    pub policy: AssignmentPolicy,
}

pub const CSV_HEADER: [&str; 9] = [
    "order",
    "kind",
    "square_count",
    "msos_count",
    "dihedral_class_count",
    "parker",
    "prefilter_reason",
    "elapsed_ms",
    "policy",
];

/// Orders whose count beats every smaller scanned order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RecordBreakerTable {
    pub rows: Vec<(u64, usize)>,
}

impl RecordBreakerTable {
    /// Feeds the next record; records must arrive in ascending order.
    pub fn observe(&mut self, order: u64, count: usize) {
        match self.rows.last() {
            Some(&(_, best)) if count <= best => {}
            _ => self.rows.push((order, count)),
        }
    }

    pub fn from_records(records: &[ScanRecord]) -> Self {
        let mut sorted: Vec<&ScanRecord> = records.iter().collect();
        sorted.sort_by_key(|r| r.order);
        let mut table = RecordBreakerTable::default();
        for r in sorted {
            table.observe(r.order, r.msos_count);
        }
        table
    }
}

/// Record-breakers with a nonzero count that are not of the form `2p`
/// with a prime `p ≡ 1 (mod 4)`.
pub fn record_shape_exceptions(table: &RecordBreakerTable) -> Vec<u64> {
    table
        .rows
        .iter()
        .filter(|&&(n, count)| {
            count > 0 && !(n % 2 == 0 && arith::is_prime(n / 2) && (n / 2) % 4 == 1)
        })
        .map(|&(n, _)| n)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldFilter {
    Primes,
    /// `p^r` with `r ≥ 2`.
    StrictPrimePowers,
    /// Every prime power.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingFilter {
    All,
    Odd,
    Congruence { modulus: u64, residue: u64 },
}

impl FieldFilter {
    pub fn admits(self, q: u64) -> bool {
        match (self, arith::prime_power(q)) {
            (_, None) => false,
            (FieldFilter::Primes, Some((_, r))) => r == 1,
            (FieldFilter::StrictPrimePowers, Some((_, r))) => r >= 2,
            (FieldFilter::All, Some(_)) => true,
        }
    }
}

impl RingFilter {
    pub fn admits(self, n: u64) -> bool {
        match self {
            RingFilter::All => true,
            RingFilter::Odd => n % 2 == 1,
            RingFilter::Congruence { modulus, residue } => {
                modulus > 0 && n % modulus == residue % modulus
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    pub policy: AssignmentPolicy,
    /// When false every `elapsed_ms` is 0, making output byte-reproducible.
    pub record_timings: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            jobs: 1,
            checkpoint: None,
            policy: AssignmentPolicy::Canonical,
            record_timings: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOutcome {
    pub records: Vec<ScanRecord>,
    pub table: RecordBreakerTable,
}

impl ScanOutcome {
    pub fn parker_orders(&self) -> Vec<u64> {
        self.records
            .iter()
            .filter(|r| r.parker)
            .map(|r| r.order)
            .collect()
    }
}

/// Classifies one field order: pre-filter first, search only if inconclusive.
pub fn classify_field(
    q: u64,
    policy: AssignmentPolicy,
    record_timings: bool,
) -> Result<ScanRecord> {
    let start = Instant::now();
    let carrier = Carrier::field(q)?;
    let square_count = carrier.squares().len();
    let (msos_count, dihedral_class_count, prefilter_reason) = match prefilter_field(q)? {
        Some(reason) => (0, 0, Some(reason)),
        None => {
            let r = msos_field_in(carrier, policy);
            (r.tuple_count, r.dihedral_class_count, None)
        }
    };
    Ok(ScanRecord {
        order: q,
        kind: StructureKind::Field,
        square_count,
        msos_count,
        dihedral_class_count,
        parker: msos_count == 0,
        prefilter_reason,
        elapsed_ms: if record_timings {
            start.elapsed().as_millis() as u64
        } else {
            0
        },
        policy,
    })
}

pub fn classify_ring(n: u64, policy: AssignmentPolicy, record_timings: bool) -> Result<ScanRecord> {
    let start = Instant::now();
    let r = msos_ring(n, policy)?;
    Ok(ScanRecord {
        order: n,
        kind: StructureKind::Ring,
        square_count: r.carrier.squares().len(),
        msos_count: r.tuple_count,
        dihedral_class_count: r.dihedral_class_count,
        parker: r.parker,
        prefilter_reason: None,
        elapsed_ms: if record_timings {
            start.elapsed().as_millis() as u64
        } else {
            0
        },
        policy,
    })
}

pub fn scan_fields(
    lo: u64,
    hi: u64,
    filter: FieldFilter,
    config: &ScanConfig,
) -> Result<ScanOutcome> {
    let orders: Vec<u64> = (lo.max(2)..=hi).filter(|&q| filter.admits(q)).collect();
    scan_orders(StructureKind::Field, &orders, config)
}

pub fn scan_rings(
    lo: u64,
    hi: u64,
    filter: RingFilter,
    config: &ScanConfig,
) -> Result<ScanOutcome> {
    let orders: Vec<u64> = (lo.max(2)..=hi).filter(|&n| filter.admits(n)).collect();
    scan_orders(StructureKind::Ring, &orders, config)
}

/// Records already present in a checkpoint file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Checkpoint {
    pub records: Vec<ScanRecord>,
    /// Lines that could not be parsed and were ignored.
    pub skipped_lines: usize,
}

impl Checkpoint {
    pub fn completed_orders(&self, kind: StructureKind) -> BTreeSet<u64> {
        self.records
            .iter()
            .filter(|r| r.kind == kind)
            .map(|r| r.order)
            .collect()
    }
}

/// Reads a checkpoint; a missing file is an empty checkpoint and unparsable
/// lines are skipped with a warning so their orders get recomputed.
pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Checkpoint::default()),
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut out = Checkpoint::default();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<ScanRecord>(&line) {
            Ok(r) => out.records.push(r),
            Err(e) => {
                log::warn!(
                    "{}:{}: skipping corrupted checkpoint line: {e}",
                    path.display(),
                    lineno + 1
                );
                out.skipped_lines += 1;
            }
        }
    }
    Ok(out)
}

fn open_append(path: &Path) -> Result<File> {
    // A torn final line (no newline) must not swallow the next record.
    let needs_newline = match std::fs::read(path) {
        Ok(bytes) => bytes.last().is_some_and(|&b| b != b'\n'),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => false,
        Err(e) => return Err(Error::io(path, e)),
    };
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    if needs_newline {
        file.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    Ok(file)
}

fn scan_orders(kind: StructureKind, orders: &[u64], config: &ScanConfig) -> Result<ScanOutcome> {
    let mut done: BTreeMap<u64, ScanRecord> = BTreeMap::new();
    let mut sink = None;
    if let Some(path) = &config.checkpoint {
        for r in load_checkpoint(path)?.records {
            if r.kind == kind && r.policy == config.policy {
                done.insert(r.order, r);
            }
        }
        sink = Some((path.clone(), open_append(path)?));
    }
    let pending: Vec<u64> = orders
        .iter()
        .copied()
        .filter(|o| !done.contains_key(o))
        .collect();

    let cursor = AtomicUsize::new(0);
    let abort = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(u64, Result<ScanRecord>)>();
    let jobs = config.jobs.max(1).min(pending.len().max(1));

    let mut records = Vec::with_capacity(orders.len());
    let mut table = RecordBreakerTable::default();

    std::thread::scope(|scope| -> Result<()> {
        for _ in 0..jobs {
            let tx = tx.clone();
            let (cursor, abort, pending) = (&cursor, &abort, &pending);
            scope.spawn(move || loop {
                if abort.load(Ordering::Relaxed) {
                    break;
                }
                let idx = cursor.fetch_add(1, Ordering::Relaxed);
                let Some(&order) = pending.get(idx) else {
                    break;
                };
                let result = match kind {
                    StructureKind::Field => {
                        classify_field(order, config.policy, config.record_timings)
                    }
                    StructureKind::Ring => {
                        classify_ring(order, config.policy, config.record_timings)
                    }
                };
                if tx.send((order, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut buffered: BTreeMap<u64, ScanRecord> = BTreeMap::new();
        let stop = |e: Error| {
            abort.store(true, Ordering::Relaxed);
            e
        };
        for &order in orders {
            let record = if let Some(r) = done.remove(&order) {
                r
            } else {
                loop {
                    if let Some(r) = buffered.remove(&order) {
                        break r;
                    }
                    let (o, result) = rx.recv().map_err(|_| {
                        stop(Error::Invariant(format!(
                            "workers exited before order {order}"
                        )))
                    })?;
                    buffered.insert(o, result.map_err(stop)?);
                }
                .tap_checkpoint(&mut sink)
                .map_err(stop)?
            };
            log::info!(
                "{kind} {}: {} squares, {} magic squares{}",
                record.order,
                record.square_count,
                record.msos_count,
                if record.parker { " (Parker)" } else { "" }
            );
            table.observe(record.order, record.msos_count);
            records.push(record);
        }
        Ok(())
    })?;

    Ok(ScanOutcome { records, table })
}

trait TapCheckpoint: Sized {
    fn tap_checkpoint(self, sink: &mut Option<(PathBuf, File)>) -> Result<Self>;
}

impl TapCheckpoint for ScanRecord {
    fn tap_checkpoint(self, sink: &mut Option<(PathBuf, File)>) -> Result<Self> {
        if let Some((path, file)) = sink {
            let mut line = serde_json::to_string(&self)?;
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|e| Error::io(path.as_path(), e))?;
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" => Ok(ReportFormat::Jsonl),
            other => Err(format!("unknown format {other:?} (expected csv or jsonl)")),
        }
    }
}

/// Writes records as CSV (header always present) or JSON lines.
pub fn write_records<W: Write>(records: &[ScanRecord], format: ReportFormat, out: W) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                w.serialize(r)?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        ReportFormat::Jsonl => {
            let mut out = BufWriter::new(out);
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n").map_err(csv::Error::from)?;
            }
            out.flush().map_err(csv::Error::from)?;
        }
    }
    Ok(())
}

pub fn write_report(records: &[ScanRecord], format: ReportFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, format, file)
}

pub fn read_jsonl_records(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
