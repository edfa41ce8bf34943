//! Plain-text matrix format: a `rows cols` header line followed by
//! whitespace-separated entries, one matrix row per line. Values are written
//! with 17 significant digits so they read back bit-exact. Vectors use the
//! same format as an `n x 1` matrix; `1 x n` is also accepted on input.

use std::fmt::Write;

use super::{DenseMatrix, DenseVector};
use crate::error::{Result, Sl0Error};

fn parse_err(line: usize, message: impl Into<String>) -> Sl0Error {
    Sl0Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn format_matrix(a: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{:.16e}", a.get(i, j)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn format_vector(v: &DenseVector) -> String {
    let mut out = format!("{} 1\n", v.len());
    for x in v.as_slice() {
        writeln!(out, "{x:.16e}").unwrap();
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(header_line, format!("bad dimension {t:?}")))
        })
        .collect::<Result<_>>()?;
    let [rows, cols] = dims[..] else {
        return Err(parse_err(header_line, "header must be `rows cols`"));
    };
    if rows == 0 || cols == 0 {
        return Err(parse_err(header_line, "dimensions must be positive"));
    }

    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0;
    for (line_no, line) in lines {
        seen_rows += 1;
        if seen_rows > rows {
            return Err(parse_err(line_no, format!("more than {rows} rows")));
        }
        let before = data.len();
        for token in line.split_whitespace() {
            let value: f64 = token
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad number {token:?}")))?;
            if !value.is_finite() {
                return Err(parse_err(line_no, format!("non-finite value {token:?}")));
            }
            data.push(value);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                line_no,
                format!("expected {cols} values, found {}", data.len() - before),
            ));
        }
    }
    if seen_rows != rows {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {rows} rows, found {seen_rows}"),
        ));
    }
    DenseMatrix::from_row_major(rows, cols, data)
}

pub fn parse_vector(text: &str) -> Result<DenseVector> {
    let a = parse_matrix(text)?;
    if a.cols() != 1 && a.rows() != 1 {
        return Err(parse_err(
            1,
            format!("a vector must be n x 1 or 1 x n, found {}x{}", a.rows(), a.cols()),
        ));
    }
    DenseVector::from_vec(a.to_row_major())
}
