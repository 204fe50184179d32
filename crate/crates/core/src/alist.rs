//! MacKay alist format for sparse parity-check matrices.
//!
//! Layout: `N M` (columns, rows), the two maximum degrees, the N column
//! weights, the M row weights, then one line of 1-based row indices per
//! column followed by one line of 1-based column indices per row. Short
//! lines are padded with zeros, which readers ignore.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

pub fn write_alist<W: Write>(h: &BitMatrix, mut out: W) -> Result<()> {
    let col_lists: Vec<Vec<usize>> = (0..h.cols()).map(|c| h.col_ones(c)).collect();
    let row_lists: Vec<Vec<usize>> = (0..h.rows()).map(|r| h.row_ones(r)).collect();
    let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);

    writeln!(out, "{} {}", h.cols(), h.rows())?;
    writeln!(out, "{max_col} {max_row}")?;
    writeln!(out, "{}", join(col_lists.iter().map(Vec::len)))?;
    writeln!(out, "{}", join(row_lists.iter().map(Vec::len)))?;
    for list in &col_lists {
        writeln!(out, "{}", padded(list, max_col))?;
    }
    for list in &row_lists {
        writeln!(out, "{}", padded(list, max_row))?;
    }
    Ok(())
}

pub fn to_alist_string(h: &BitMatrix) -> String {
    let mut buf = Vec::new();
    write_alist(h, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("alist output is ASCII")
}

fn join(it: impl Iterator<Item = usize>) -> String {
    it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn padded(list: &[usize], width: usize) -> String {
    join(
        list.iter()
            .map(|&i| i + 1)
            .chain(std::iter::repeat(0))
            .take(width),
    )
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    /// Next non-blank line parsed as whitespace-separated integers.
    fn next_numbers(&mut self, what: &str) -> Result<Vec<usize>> {
        loop {
            self.line += 1;
            let Some(text) = self.inner.next() else {
                return Err(self.err(format!("unexpected end of file reading {what}")));
            };
            let text = text?;
            if text.trim().is_empty() {
                continue;
            }
            return text
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| self.err(format!("bad integer {tok:?} in {what}")))
                })
                .collect();
        }
    }

    fn err(&self, message: String) -> Error {
        Error::Parse {
            line: self.line,
            message,
        }
    }
}

pub fn read_alist<R: BufRead>(input: R) -> Result<BitMatrix> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let dims = lines.next_numbers("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(lines.err("expected `N M`".into()));
    };
    if n == 0 || m == 0 {
        return Err(lines.err("dimensions must be positive".into()));
    }
    let maxes = lines.next_numbers("maximum degrees")?;
    if maxes.len() != 2 {
        return Err(lines.err("expected two maximum degrees".into()));
    }
    let col_weights = lines.next_numbers("column weights")?;
    if col_weights.len() != n {
        return Err(lines.err(format!("expected {n} column weights")));
    }
    let row_weights = lines.next_numbers("row weights")?;
    if row_weights.len() != m {
        return Err(lines.err(format!("expected {m} row weights")));
    }

    let mut h = BitMatrix::zeros(m, n);
    for (c, &w) in col_weights.iter().enumerate() {
        let idx: Vec<usize> = lines
            .next_numbers("column list")?
            .into_iter()
            .filter(|&i| i != 0)
            .collect();
        if idx.len() != w {
            return Err(lines.err(format!("column {} lists {} entries, weight {w}", c + 1, idx.len())));
        }
        for r in idx {
            if r > m {
                return Err(lines.err(format!("row index {r} exceeds {m}")));
            }
            h.set(r - 1, c, true);
        }
    }
    for (r, &w) in row_weights.iter().enumerate() {
        let idx: Vec<usize> = lines
            .next_numbers("row list")?
            .into_iter()
            .filter(|&i| i != 0)
            .collect();
        if idx.len() != w {
            return Err(lines.err(format!("row {} lists {} entries, weight {w}", r + 1, idx.len())));
        }
        for c in idx {
            if c > n || !h.get(r, c - 1) {
                return Err(lines.err(format!(
                    "row {} entry {c} disagrees with the column lists",
                    r + 1
                )));
            }
        }
    }
    Ok(h)
}

pub fn parse_alist(text: &str) -> Result<BitMatrix> {
    read_alist(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let h = BitMatrix::from_rows(&[[1, 1, 0, 1], [0, 1, 1, 0], [1, 0, 1, 1]]).unwrap();
        let text = to_alist_string(&h);
        assert_eq!(parse_alist(&text).unwrap(), h);
    }

    #[test]
    fn known_layout_with_padding() {
        let h = BitMatrix::from_rows(&[[1, 1, 0], [0, 1, 1]]).unwrap();
        let text = to_alist_string(&h);
        assert_eq!(text, "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n");
    }

    #[test]
    fn inconsistent_lists_are_rejected() {
        let bad = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 3\n2 3\n";
        assert!(matches!(parse_alist(bad), Err(Error::Parse { line: 8, .. })));
    }

    #[test]
    fn truncated_file_is_rejected() {
        assert!(matches!(parse_alist("3 2\n2 2\n"), Err(Error::Parse { .. })));
    }
}
