use std::io::Write;

use shannon_cone::{Error, Result};

use crate::OutputFormat;

/// A command result rendered three ways, plus the exit status on success.
#[derive(Clone, Debug)]
pub struct Emitted {
    pub json: serde_json::Value,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub text: String,
    pub exit_code: i32,
}

impl Emitted {
    pub fn new(json: serde_json::Value, headers: Vec<String>, rows: Vec<Vec<String>>, text: String) -> Self {
        Emitted {
            json,
            headers,
            rows,
            text,
            exit_code: 0,
        }
    }

    pub fn write(&self, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(e.to_string());
        match format {
            OutputFormat::Text => out.write_all(self.text.as_bytes()).map_err(io),
            OutputFormat::Json => {
                let s = serde_json::to_string_pretty(&self.json).map_err(|e| Error::Internal(e.to_string()))?;
                writeln!(out, "{s}").map_err(io)
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let csv_err = |e: csv::Error| Error::Io(e.to_string());
                w.write_record(&self.headers).map_err(csv_err)?;
                for row in &self.rows {
                    w.write_record(row).map_err(csv_err)?;
                }
                w.flush().map_err(io)
            }
        }
    }
}

/// Formats with six significant digits, dropping trailing zeros.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
