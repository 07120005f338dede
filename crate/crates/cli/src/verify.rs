//! `verify <file>`: line sums, distinctness and squareness of one 3×3 grid.

use std::io::{self, Write};
use std::path::Path;

use num_bigint::BigInt;
use parker::grid::{validate_square, Grid3, ValidationReport, SQUARE_LINE_NAMES};
use parker::{Carrier, Integers};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{big_json, Failure};

#[derive(Deserialize)]
struct SquareFile {
    carrier: CarrierSpec,
    cells: Vec<Value>,
}

#[derive(Deserialize)]
struct CarrierSpec {
    kind: String,
    order: Option<u64>,
    modulus_poly: Option<Vec<u64>>,
}

pub fn run(path: &Path, as_json: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let file: SquareFile = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    if file.cells.len() != 9 {
        return Err(Failure::usage(format!(
            "expected 9 cells, got {}",
            file.cells.len()
        )));
    }
    let order = || {
        file.carrier.order.ok_or_else(|| {
            Failure::usage(format!(
                "carrier kind {:?} needs an order",
                file.carrier.kind
            ))
        })
    };
    let mut out = io::stdout().lock();
    let magic = match file.carrier.kind.as_str() {
        "int" => {
            let cells = file
                .cells
                .iter()
                .map(parse_int)
                .collect::<Result<Vec<_>, _>>()?;
            let report = validate_square(&Grid3::from_slice(&cells)?, &Integers)?;
            emit(&mut out, "Z", &report, big_json, as_json)?
        }
        "field" | "ring" => {
            let carrier = match (file.carrier.kind.as_str(), &file.carrier.modulus_poly) {
                ("field", Some(poly)) => Carrier::field_with_modulus(order()?, poly)?,
                ("field", None) => Carrier::field(order()?)?,
                _ => Carrier::ring(order()?)?,
            };
            let cells = file
                .cells
                .iter()
                .map(|v| carrier.element_from_json(v))
                .collect::<Result<Vec<_>, _>>()?;
            let report = validate_square(&Grid3::from_slice(&cells)?, &carrier)?;
            let name = carrier.to_string();
            emit(
                &mut out,
                &name,
                &report,
                |&x| carrier.element_to_json(x),
                as_json,
            )?
        }
        other => return Err(Failure::usage(format!("unknown carrier kind {other:?}"))),
    };
    Ok(if magic { 0 } else { 2 })
}

fn parse_int(v: &Value) -> Result<BigInt, Failure> {
    let parsed = match v {
        Value::Number(n) => n.to_string().parse().ok(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    parsed.ok_or_else(|| Failure::usage(format!("cell {v} is not an integer")))
}

fn emit<E>(
    out: &mut impl Write,
    carrier: &str,
    r: &ValidationReport<E>,
    to_json: impl Fn(&E) -> Value,
    as_json: bool,
) -> io::Result<bool> {
    if as_json {
        let v = json!({
            "carrier": carrier,
            "line_sums": r.line_sums.iter().map(&to_json).collect::<Vec<_>>(),
            "sums_equal_count": r.sums_equal_count,
            "modal_total": to_json(&r.modal_total),
            "disagreeing_lines": r.disagreeing_lines,
            "distinct_entries": r.distinct_entries,
            "all_entries_square": r.all_entries_square,
            "is_magic_square_of_squares": r.is_magic_square_of_squares,
        });
        writeln!(out, "{}", v)?;
    } else {
        writeln!(out, "carrier: {carrier}")?;
        for (name, sum) in SQUARE_LINE_NAMES.iter().zip(&r.line_sums) {
            writeln!(out, "  {name:<14} {}", to_json(sum))?;
        }
        writeln!(
            out,
            "equal sums:         {}/8 (total {})",
            r.sums_equal_count,
            to_json(&r.modal_total)
        )?;
        writeln!(out, "distinct entries:   {}/9", r.distinct_entries)?;
        writeln!(out, "all entries square: {}", r.all_entries_square)?;
        let verdict = if r.is_magic_square_of_squares {
            "yes"
        } else {
            "no"
        };
        writeln!(out, "magic square of squares: {verdict}")?;
    }
    Ok(r.is_magic_square_of_squares)
}
