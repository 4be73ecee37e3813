//! Text persistence for coefficient tables.
//!
//! ```text
//! leafcount-table v1 N=<order>
//! n k value
//! ...
//! ```
//!
//! One line per nonzero `a_{n,k}`, sorted by `(n, k)`.

use std::io::{self, BufRead, Write};

use num_bigint::BigUint;
use num_traits::Zero;

use super::{CoefficientTable, LeafPolynomial};

const MAGIC: &str = "leafcount-table v1 N=";

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] io::Error),
    #[error("cache line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
}

fn corrupt(line: usize, reason: impl Into<String>) -> CacheError {
    CacheError::Corrupt {
        line,
        reason: reason.into(),
    }
}

pub fn write_table<W: Write>(table: &CoefficientTable, mut out: W) -> io::Result<()> {
    writeln!(out, "{MAGIC}{}", table.order())?;
    for r in table.rows() {
        for (i, c) in r.coeffs.iter().enumerate() {
            if !c.is_zero() {
                writeln!(out, "{} {} {}", r.n, i + 1, c)?;
            }
        }
    }
    out.flush()
}

pub fn read_table<R: BufRead>(input: R) -> Result<CoefficientTable, CacheError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| corrupt(1, "empty file"))??;
    let order: usize = header
        .strip_prefix(MAGIC)
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| corrupt(1, format!("bad header {header:?}")))?;
    let mut rows: Vec<LeafPolynomial> = (1..=order)
        .map(|n| LeafPolynomial {
            n,
            coeffs: vec![BigUint::zero(); n],
        })
        .collect();
    let mut last = (0usize, 0usize);
    let mut lineno = 1;
    for line in lines {
        lineno += 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [n, k, v] = fields[..] else {
            return Err(corrupt(
                lineno,
                format!("expected `n k value`, got {line:?}"),
            ));
        };
        let n: usize = n
            .parse()
            .map_err(|_| corrupt(lineno, format!("bad n {n:?}")))?;
        let k: usize = k
            .parse()
            .map_err(|_| corrupt(lineno, format!("bad k {k:?}")))?;
        let v: BigUint = v
            .parse()
            .map_err(|_| corrupt(lineno, format!("bad value {v:?}")))?;
        if n == 0 || n > order || k == 0 || k > n {
            return Err(corrupt(
                lineno,
                format!("entry ({n}, {k}) outside the table"),
            ));
        }
        if (n, k) <= last {
            return Err(corrupt(lineno, format!("entry ({n}, {k}) out of order")));
        }
        if v.is_zero() {
            return Err(corrupt(lineno, "zero entries are not stored"));
        }
        last = (n, k);
        rows[n - 1].coeffs[k - 1] = v;
    }
    if let Some(r) = rows.iter().find(|r| r.coeffs[0].is_zero()) {
        return Err(corrupt(
            lineno + 1,
            format!("unexpected end of file: row {} is missing", r.n),
        ));
    }
    Ok(CoefficientTable::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfunc::leaf_polynomials;

    fn text(t: &CoefficientTable) -> String {
        let mut buf = Vec::new();
        write_table(t, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let t = leaf_polynomials(40);
        let s = text(&t);
        let back = read_table(s.as_bytes()).unwrap();
        assert_eq!(back, t);
        assert_eq!(text(&back), s);
    }

    #[test]
    fn small_table_text() {
        assert_eq!(
            text(&leaf_polynomials(3)),
            "leafcount-table v1 N=3\n1 1 1\n2 1 1\n3 1 1\n3 2 1\n"
        );
    }

    #[test]
    fn corruption_names_the_line() {
        let bad = |s: &str| match read_table(s.as_bytes()) {
            Err(CacheError::Corrupt { line, .. }) => line,
            other => panic!("expected corruption, got {other:?}"),
        };
        assert_eq!(bad(""), 1);
        assert_eq!(bad("leafcount-table v2 N=3\n"), 1);
        assert_eq!(bad("leafcount-table v1 N=2\n1 1 1\n2 1 x\n"), 3);
        assert_eq!(bad("leafcount-table v1 N=2\n1 1 1\n3 1 1\n"), 3);
        assert_eq!(bad("leafcount-table v1 N=2\n2 1 1\n1 1 1\n"), 3);
        assert_eq!(bad("leafcount-table v1 N=2\n1 1 1\n2 1\n"), 3);
        assert_eq!(bad("leafcount-table v1 N=2\n1 1 1\n"), 3);
    }
}
