//! Sparse parity-check matrices over GF(2).
//!
//! The mother code is described by its Tanner graph: `m` check nodes (rows),
//! each listing the variable nodes (columns) it constrains. Matrices are
//! immutable once built and can be shared freely between decoders.

mod alist;
mod distribution;
mod peg;

pub use alist::{load_alist, save_alist};
pub use distribution::{design_rate, DegreeDistribution};
pub use peg::build_peg_code;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LdpcError {
    #[error("invalid degree distribution: {0}")]
    Distribution(String),
    #[error("code construction failed: {0}")]
    Construction(String),
    #[error("invalid matrix: {0}")]
    Matrix(String),
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("alist parse error on line {line}: {reason}")]
    Alist { line: usize, reason: String },
}

/// Binary parity-check matrix `H` stored as sorted row supports.
///
/// Column supports and a flat edge numbering (edges ordered row by row) are
/// derived at construction time for the decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
    // for each column, the flat edge ids touching it, in row order
    col_edges: Vec<Vec<usize>>,
    row_offsets: Vec<usize>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from per-row column indices. Rows are sorted; a
    /// duplicate index, an out-of-range index or an uncovered column is
    /// rejected.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self, LdpcError> {
        if n == 0 || rows.is_empty() {
            return Err(LdpcError::Matrix("empty matrix".into()));
        }
        let mut rows = rows;
        let mut cols = vec![Vec::new(); n];
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(LdpcError::Matrix(format!("row {r} repeats a column")));
            }
            for &c in row.iter() {
                if c >= n {
                    return Err(LdpcError::Matrix(format!(
                        "row {r} references column {c} >= {n}"
                    )));
                }
                cols[c].push(r);
            }
        }
        if let Some(c) = cols.iter().position(|col| col.is_empty()) {
            return Err(LdpcError::Matrix(format!("column {c} is not checked")));
        }

        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_edges = vec![Vec::new(); n];
        let mut edge = 0;
        for row in &rows {
            row_offsets.push(edge);
            for &c in row {
                col_edges[c].push(edge);
                edge += 1;
            }
        }
        row_offsets.push(edge);

        Ok(ParityCheckMatrix {
            n,
            rows,
            cols,
            col_edges,
            row_offsets,
        })
    }

    /// Code length (number of columns).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks (rows).
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Realized rate `1 - m/n`.
    pub fn rate(&self) -> f64 {
        1.0 - self.m() as f64 / self.n as f64
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn num_edges(&self) -> usize {
        *self.row_offsets.last().unwrap()
    }

    /// Flat edge ids of row `r` are `row_edge_range(r)`, in column order.
    pub fn row_edge_range(&self, r: usize) -> std::ops::Range<usize> {
        self.row_offsets[r]..self.row_offsets[r + 1]
    }

    pub fn col_edges(&self, c: usize) -> &[usize] {
        &self.col_edges[c]
    }

    /// Histogram `degree -> number of columns`.
    pub fn column_degree_histogram(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut hist = std::collections::BTreeMap::new();
        for col in &self.cols {
            *hist.entry(col.len()).or_insert(0) += 1;
        }
        hist
    }

    /// Histogram `degree -> number of rows`.
    pub fn row_degree_histogram(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut hist = std::collections::BTreeMap::new();
        for row in &self.rows {
            *hist.entry(row.len()).or_insert(0) += 1;
        }
        hist
    }

    /// Length of the shortest cycle in the Tanner graph, or `None` if the
    /// graph is a forest.
    pub fn girth(&self) -> Option<usize> {
        // BFS from every variable node; a non-tree edge closes a cycle of
        // length d(u) + d(v) + 1 (in edges, always even here).
        let total = self.n + self.m();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; total];
        let mut parent = vec![usize::MAX; total];
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[start] = 0;
            parent[start] = usize::MAX;
            queue.clear();
            queue.push_back(start);
            while let Some(node) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[node] + 1 >= b {
                        break;
                    }
                }
                let neighbours: Box<dyn Iterator<Item = usize>> = if node < self.n {
                    Box::new(self.cols[node].iter().map(|&r| self.n + r))
                } else {
                    Box::new(self.rows[node - self.n].iter().copied())
                };
                for next in neighbours {
                    if next == parent[node] {
                        continue;
                    }
                    if dist[next] == usize::MAX {
                        dist[next] = dist[node] + 1;
                        parent[next] = node;
                        queue.push_back(next);
                    } else {
                        let cycle = dist[node] + dist[next] + 1;
                        best = Some(best.map_or(cycle, |b| b.min(cycle)));
                    }
                }
            }
        }
        best
    }
}

/// Syndrome `z = H w` of a binary word, one bit per check.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syndrome(Vec<u8>);

impl Syndrome {
    pub fn new(bits: Vec<u8>) -> Self {
        Syndrome(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }
}

/// Computes the syndrome of `word` under `h`.
pub fn syndrome(h: &ParityCheckMatrix, word: &[u8]) -> Result<Syndrome, LdpcError> {
    if word.len() != h.n() {
        return Err(LdpcError::Dimension {
            expected: h.n(),
            actual: word.len(),
        });
    }
    Ok(Syndrome(
        h.rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &c| acc ^ (word[c] & 1)))
            .collect(),
    ))
}
