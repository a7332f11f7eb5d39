//! MacKay's alist text format.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! col degrees (n values)
//! row degrees (m values)
//! n lines: 1-based row indices of each column
//! m lines: 1-based column indices of each row
//! ```
//!
//! Index lines may be right-padded with zeros up to the maximum degree.

use super::{LdpcError, ParityCheckMatrix};

pub fn save_alist(h: &ParityCheckMatrix) -> String {
    let n = h.n();
    let m = h.m();
    let col_deg: Vec<usize> = (0..n).map(|c| h.col(c).len()).collect();
    let row_deg: Vec<usize> = h.rows().iter().map(Vec::len).collect();
    let join = |xs: &mut dyn Iterator<Item = usize>| {
        xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
    };

    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n"));
    out.push_str(&format!(
        "{} {}\n",
        col_deg.iter().max().unwrap(),
        row_deg.iter().max().unwrap()
    ));
    out.push_str(&join(&mut col_deg.iter().copied()));
    out.push('\n');
    out.push_str(&join(&mut row_deg.iter().copied()));
    out.push('\n');
    for c in 0..n {
        out.push_str(&join(&mut h.col(c).iter().map(|r| r + 1)));
        out.push('\n');
    }
    for row in h.rows() {
        out.push_str(&join(&mut row.iter().map(|c| c + 1)));
        out.push('\n');
    }
    out
}

pub fn load_alist(text: &str) -> Result<ParityCheckMatrix, LdpcError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut next_line = |what: &str| -> Result<(usize, Vec<usize>), LdpcError> {
        let (lineno, line) = lines.next().ok_or_else(|| LdpcError::Alist {
            line: 0,
            reason: format!("unexpected end of input, expected {what}"),
        })?;
        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| LdpcError::Alist {
                    line: lineno,
                    reason: format!("not a non-negative integer: {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((lineno, values))
    };

    let (lineno, header) = next_line("header")?;
    let [n, m] = header[..] else {
        return Err(LdpcError::Alist {
            line: lineno,
            reason: "header must be `n m`".into(),
        });
    };
    let (lineno, maxes) = next_line("maximum degrees")?;
    let [max_col, max_row] = maxes[..] else {
        return Err(LdpcError::Alist {
            line: lineno,
            reason: "expected two maximum degrees".into(),
        });
    };
    let (lineno, col_deg) = next_line("column degrees")?;
    check_degrees(lineno, &col_deg, n, max_col, "column")?;
    let (lineno, row_deg) = next_line("row degrees")?;
    check_degrees(lineno, &row_deg, m, max_row, "row")?;

    let mut cols = Vec::with_capacity(n);
    for &deg in &col_deg {
        let (lineno, entries) = next_line("column entries")?;
        cols.push(parse_entries(lineno, entries, deg, max_col, m)?);
    }
    let mut rows = Vec::with_capacity(m);
    for &deg in &row_deg {
        let (lineno, entries) = next_line("row entries")?;
        rows.push(parse_entries(lineno, entries, deg, max_row, n)?);
    }

    // the column section must describe the same matrix as the row section
    let mut transposed = vec![Vec::new(); n];
    for (r, row) in rows.iter().enumerate() {
        for &c in row {
            transposed[c].push(r);
        }
    }
    for (c, (listed, derived)) in cols.iter_mut().zip(&transposed).enumerate() {
        listed.sort_unstable();
        if listed != derived {
            return Err(LdpcError::Alist {
                line: 0,
                reason: format!("column {} disagrees with the row lists", c + 1),
            });
        }
    }

    ParityCheckMatrix::from_rows(n, rows)
}

fn check_degrees(
    lineno: usize,
    degrees: &[usize],
    count: usize,
    max: usize,
    what: &str,
) -> Result<(), LdpcError> {
    if degrees.len() != count {
        return Err(LdpcError::Alist {
            line: lineno,
            reason: format!("expected {count} {what} degrees, found {}", degrees.len()),
        });
    }
    if let Some(d) = degrees.iter().find(|&&d| d > max || d == 0) {
        return Err(LdpcError::Alist {
            line: lineno,
            reason: format!("{what} degree {d} outside 1..={max}"),
        });
    }
    Ok(())
}

// Converts one 1-based index line to sorted 0-based indices, dropping zero
// padding.
fn parse_entries(
    lineno: usize,
    entries: Vec<usize>,
    degree: usize,
    max_degree: usize,
    bound: usize,
) -> Result<Vec<usize>, LdpcError> {
    let err = |reason: String| LdpcError::Alist {
        line: lineno,
        reason,
    };
    if entries.len() > max_degree.max(degree) {
        return Err(err(format!("more than {max_degree} entries")));
    }
    let (values, padding) = entries.split_at(entries.iter().take_while(|&&x| x != 0).count());
    if padding.iter().any(|&x| x != 0) {
        return Err(err("non-zero entry after zero padding".into()));
    }
    if values.len() != degree {
        return Err(err(format!(
            "expected {degree} entries, found {}",
            values.len()
        )));
    }
    let mut out = Vec::with_capacity(degree);
    for &x in values {
        if x > bound {
            return Err(err(format!("index {x} exceeds {bound}")));
        }
        out.push(x - 1);
    }
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        return Err(err("duplicate entry".into()));
    }
    Ok(out)
}
