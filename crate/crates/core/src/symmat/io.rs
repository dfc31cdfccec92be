//! Plain-text matrices: a line with `n`, then `n` rows of `n` decimals.

use super::SymMatrix;
use crate::error::{Error, Result};

/// Writes every entry with 17 significant digits, enough for exact round trips.
pub fn write_matrix_text(m: &SymMatrix) -> String {
    let mut out = format!("{}\n", m.dim());
    for i in 0..m.dim() {
        let row: Vec<String> = (0..m.dim()).map(|j| format!("{:.16e}", m.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_text(text: &str) -> Result<SymMatrix> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::invalid("empty matrix text"))?
        .parse()
        .map_err(|_| Error::invalid("first line must be the dimension"))?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::invalid(format!("missing row {i}")))?;
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::invalid(format!("bad number '{t}' in row {i}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if lines.next().is_some() {
        return Err(Error::invalid("trailing rows after matrix"));
    }
    SymMatrix::from_rows(&rows)
}
