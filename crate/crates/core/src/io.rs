//! Text file formats for stabilizer codes and qudit states.
//!
//! Both formats are line-oriented; `#` starts a comment and blank lines are
//! ignored.
//!
//! Code file:
//!
//! ```text
//! q n k
//! a_1 b_1 ... a_n b_n     (n - k generator lines, entries in [0, q))
//! ```
//!
//! State file:
//!
//! ```text
//! q m
//! index re im             (q^m lines, indices ascending from 0)
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::gf::Field;
use crate::qstate::QuditState;
use crate::symplectic::{CodeError, StabilizerCode, SymplecticVector};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid code: {0}")]
    Code(#[from] CodeError),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// Content lines with their 1-based line numbers, comments and blanks removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            None
        } else {
            Some((i + 1, stripped))
        }
    })
}

fn parse_fields<T: std::str::FromStr>(
    line_no: usize,
    line: &str,
    expected: usize,
    what: &str,
) -> Result<Vec<T>, IoError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != expected {
        return Err(parse_err(
            line_no,
            format!("expected {expected} {what}, found {}", parts.len()),
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| parse_err(line_no, format!("cannot parse `{p}`")))
        })
        .collect()
}

/// Parse a stabilizer code from file content.
pub fn load_code_str(text: &str) -> Result<StabilizerCode, IoError> {
    let mut lines = content_lines(text);
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `q n k` header"))?;
    let vals: Vec<u64> = parse_fields(header_no, header, 3, "header integers `q n k`")?;
    let (q, n, k) = (vals[0], vals[1] as usize, vals[2] as usize);
    let field = Field::with_order(q).map_err(|e| parse_err(header_no, e.to_string()))?;
    if n == 0 {
        return Err(parse_err(header_no, "n must be at least 1"));
    }
    if k > n {
        return Err(parse_err(header_no, format!("k = {k} exceeds n = {n}")));
    }

    let mut generators = Vec::with_capacity(n - k);
    for _ in 0..n - k {
        let (line_no, line) = lines.next().ok_or_else(|| {
            parse_err(
                header_no,
                format!(
                    "expected {} generator lines, found {}",
                    n - k,
                    generators.len()
                ),
            )
        })?;
        let vals: Vec<u64> = parse_fields(line_no, line, 2 * n, "coordinates")?;
        if let Some(&bad) = vals.iter().find(|&&v| v >= q) {
            return Err(parse_err(
                line_no,
                format!("coordinate {bad} out of range [0, {q})"),
            ));
        }
        let coords: Vec<u8> = vals.iter().map(|&v| v as u8).collect();
        generators.push(SymplecticVector::from_values(&field, &coords));
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, "unexpected content after generators"));
    }
    Ok(StabilizerCode::new(&field, n, generators)?)
}

pub fn load_code(path: &Path) -> Result<StabilizerCode, IoError> {
    load_code_str(&fs::read_to_string(path)?)
}

/// Parse a state vector from file content.
pub fn load_state_str(text: &str) -> Result<QuditState, IoError> {
    let mut lines = content_lines(text);
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `q m` header"))?;
    let vals: Vec<u64> = parse_fields(header_no, header, 2, "header integers `q m`")?;
    let (q, m) = (vals[0], vals[1] as usize);
    if !(2..=64).contains(&q) {
        return Err(parse_err(
            header_no,
            format!("unsupported local dimension {q}"),
        ));
    }
    let q = q as u8;
    let dim = (q as usize).pow(m as u32);

    let mut amps = Vec::with_capacity(dim);
    for expected_index in 0..dim {
        let (line_no, line) = lines.next().ok_or_else(|| {
            parse_err(
                header_no,
                format!("expected {dim} amplitude lines, found {expected_index}"),
            )
        })?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected `index re im`, found {} fields", parts.len()),
            ));
        }
        let index: usize = parts[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("cannot parse index `{}`", parts[0])))?;
        if index != expected_index {
            return Err(parse_err(
                line_no,
                format!("indices must ascend from 0; expected {expected_index}, found {index}"),
            ));
        }
        let re: f64 = parts[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("cannot parse `{}`", parts[1])))?;
        let im: f64 = parts[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("cannot parse `{}`", parts[2])))?;
        amps.push(Complex64::new(re, im));
    }
    if let Some((line_no, _)) = lines.next() {
        return Err(parse_err(line_no, "unexpected content after amplitudes"));
    }
    QuditState::new(q, m, amps).map_err(|e| parse_err(header_no, e.to_string()))
}

pub fn load_state(path: &Path) -> Result<QuditState, IoError> {
    load_state_str(&fs::read_to_string(path)?)
}

/// Render a state in the state file format.
pub fn state_to_string(state: &QuditState) -> String {
    let mut out = format!("{} {}\n", state.q(), state.m());
    for (i, a) in state.amps().iter().enumerate() {
        out.push_str(&format!("{i} {} {}\n", a.re, a.im));
    }
    out
}

pub fn save_state(path: &Path, state: &QuditState) -> Result<(), IoError> {
    fs::write(path, state_to_string(state))?;
    Ok(())
}
