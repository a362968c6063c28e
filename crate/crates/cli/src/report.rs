//! Deterministic JSON emission: every float is rounded to twelve significant
//! digits before serialization so identical runs produce identical bytes.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use chancap_core::channels::DensityMatrix;
use chancap_core::tradeoff::round_sig12;

use crate::CliFailure;

pub fn num(v: f64) -> Value {
    Value::from(round_sig12(v))
}

pub fn state_value(rho: &DensityMatrix) -> Value {
    let m = rho.matrix();
    let rows: Vec<Value> = (0..m.rows())
        .map(|r| {
            let row: Vec<Value> = (0..m.cols())
                .map(|c| {
                    let e = m.get(r, c);
                    Value::Array(vec![num(e.re), num(e.im)])
                })
                .collect();
            Value::Array(row)
        })
        .collect();
    Value::Array(rows)
}

/// Prints the report to stdout and mirrors it into `out` when given.
pub fn emit_json(report: &Value, out: Option<&Path>) -> Result<(), CliFailure> {
    let text = format!("{}\n", serde_json::to_string_pretty(report).expect("valid json"));
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text.as_bytes())?;
    }
    Ok(())
}

/// Writes raw text to `out`, or to stdout when no path is given.
pub fn emit_text(text: &str, out: Option<&Path>) -> Result<(), CliFailure> {
    match out {
        Some(path) => std::fs::write(path, text.as_bytes())?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
