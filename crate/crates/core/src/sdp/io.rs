//! Text dump of a [`ConicProblem`].
//!
//! ```text
//! blocks <k>
//! psd <n> | nonneg <n>          (k lines, in block order)
//! constraints <m>
//! rhs <b_1> ... <b_m>
//! <c> <block> <i> <j> <coeff>   (one line per triplet)
//! ```
//!
//! `c = 0` addresses the objective, `c = 1..m` the constraints. Blocks and
//! indices are 1-based and every triplet follows the SDPA entry convention.

use super::{BlockKind, ConicProblem, Entry, LinearFunctional};
use crate::error::{Error, Result};

pub fn dump_problem(p: &ConicProblem) -> String {
    let mut out = format!("blocks {}\n", p.blocks.len());
    for b in &p.blocks {
        let kind = match b.kind {
            BlockKind::Psd => "psd",
            BlockKind::Nonneg => "nonneg",
        };
        out.push_str(&format!("{kind} {}\n", b.size));
    }
    out.push_str(&format!("constraints {}\nrhs", p.constraints.len()));
    for c in &p.constraints {
        out.push_str(&format!(" {:e}", c.rhs));
    }
    out.push('\n');
    let mut emit = |k: usize, f: &LinearFunctional| {
        for e in &f.entries {
            out.push_str(&format!("{k} {} {} {} {:e}\n", e.block + 1, e.i + 1, e.j + 1, e.coeff));
        }
    };
    emit(0, &p.objective);
    for (k, c) in p.constraints.iter().enumerate() {
        emit(k + 1, &c.functional);
    }
    out
}

pub fn load_problem(text: &str) -> Result<ConicProblem> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::invalid(format!("missing {what}")));
    let bad = |msg: String| Error::invalid(msg);

    let header = next("block count")?;
    let nblocks: usize = header
        .strip_prefix("blocks")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| bad(format!("expected 'blocks <k>', got '{header}'")))?;
    let mut p = ConicProblem::new();
    for _ in 0..nblocks {
        let line = next("block descriptor")?;
        let mut it = line.split_whitespace();
        let kind = match it.next() {
            Some("psd") => BlockKind::Psd,
            Some("nonneg") => BlockKind::Nonneg,
            _ => return Err(bad(format!("bad block descriptor '{line}'"))),
        };
        let size: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("bad block size in '{line}'")))?;
        p.add_block(kind, size);
    }
    let line = next("constraint count")?;
    let m: usize = line
        .strip_prefix("constraints")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| bad(format!("expected 'constraints <m>', got '{line}'")))?;
    let line = next("rhs")?;
    let rhs = line
        .strip_prefix("rhs")
        .ok_or_else(|| bad(format!("expected 'rhs ...', got '{line}'")))?
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| bad(format!("bad rhs value '{t}'"))))
        .collect::<Result<Vec<f64>>>()?;
    if rhs.len() != m {
        return Err(bad(format!("expected {m} rhs values, got {}", rhs.len())));
    }
    let mut functionals = vec![LinearFunctional::default(); m + 1];
    for line in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 {
            return Err(bad(format!("bad triplet line '{line}'")));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad index in '{line}'")));
        let (k, blk, i, j) = (idx(f[0])?, idx(f[1])?, idx(f[2])?, idx(f[3])?);
        let coeff: f64 = f[4].parse().map_err(|_| bad(format!("bad coefficient in '{line}'")))?;
        if k > m || blk == 0 || i == 0 || j == 0 {
            return Err(bad(format!("index out of range in '{line}'")));
        }
        functionals[k].entries.push(Entry::new(blk - 1, i - 1, j - 1, coeff));
    }
    let mut iter = functionals.into_iter();
    p.objective = iter.next().expect("objective slot");
    for (f, b) in iter.zip(rhs) {
        p.add_constraint(f, b);
    }
    p.validate()?;
    Ok(p)
}
