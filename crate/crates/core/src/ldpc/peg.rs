//! Progressive edge growth construction.
//!
//! Variable nodes are processed in ascending degree order. Each new edge of a
//! variable goes to a check that still has spare target degree and lies as
//! far as possible from the variable in the current graph (unreachable checks
//! count as infinitely far). Ties go to the check with the lowest current
//! degree, then to the lowest rank, where ranks are a seeded permutation of
//! the check indices.

use super::{design_rate, DegreeDistribution, LdpcError, ParityCheckMatrix};
use crate::rng::Prng;

const MIN_LENGTH: usize = 64;
const UNREACHED: u32 = u32::MAX;

/// Builds an `n`-column parity-check matrix for `dist` by progressive edge
/// growth. Deterministic in `(n, dist, seed)`.
pub fn build_peg_code(
    n: usize,
    dist: &DegreeDistribution,
    seed: u64,
) -> Result<ParityCheckMatrix, LdpcError> {
    if n < MIN_LENGTH {
        return Err(LdpcError::Construction(format!(
            "length {n} below minimum {MIN_LENGTH}"
        )));
    }
    let rate = design_rate(dist);
    let m = (n as f64 * (1.0 - rate)).round() as usize;
    if m == 0 || m >= n {
        return Err(LdpcError::Construction(format!(
            "rate {rate} gives {m} checks for length {n}"
        )));
    }

    let var_counts = largest_remainder(n, &dist.variable_node_fractions());
    let check_counts = largest_remainder(m, &dist.check_node_fractions());

    let var_degrees: Vec<usize> = var_counts
        .iter()
        .flat_map(|&(d, count)| std::iter::repeat_n(d, count))
        .collect();
    if let Some(&dmax) = var_degrees.iter().max() {
        if dmax > m {
            return Err(LdpcError::Construction(format!(
                "variable degree {dmax} exceeds check count {m}"
            )));
        }
    }

    let mut rng = Prng::from_seed(seed);
    let mut check_targets: Vec<usize> = check_counts
        .iter()
        .flat_map(|&(d, count)| std::iter::repeat_n(d, count))
        .collect();
    rng.shuffle(&mut check_targets);
    let mut rank: Vec<u32> = (0..m as u32).collect();
    rng.shuffle(&mut rank);

    let edges: usize = var_degrees.iter().sum();
    balance_targets(&mut check_targets, &rank, edges)?;

    let mut graph = Growth::new(n, m);
    for (v, &degree) in var_degrees.iter().enumerate() {
        for k in 0..degree {
            let c = if k == 0 {
                graph.pick(v, &check_targets, &rank, false)
            } else {
                graph.expand_from(v);
                graph.pick(v, &check_targets, &rank, true)
            }
            .ok_or_else(|| {
                LdpcError::Construction(format!("no admissible check for variable {v}"))
            })?;
            graph.connect(v, c);
        }
    }

    let rows = graph
        .check_adj
        .into_iter()
        .map(|row| row.into_iter().map(|v| v as usize).collect())
        .collect();
    ParityCheckMatrix::from_rows(n, rows)
}

/// Splits `total` nodes across degrees by largest-remainder rounding.
/// Remainder ties favour the lower degree.
fn largest_remainder(total: usize, fractions: &[(usize, f64)]) -> Vec<(usize, usize)> {
    let exact: Vec<f64> = fractions.iter().map(|&(_, f)| f * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    fractions
        .iter()
        .zip(counts)
        .map(|(&(d, _), c)| (d, c))
        .collect()
}

// Makes the check-side socket count equal the variable-side edge count by
// nudging individual check targets by one.
fn balance_targets(targets: &mut [usize], rank: &[u32], edges: usize) -> Result<(), LdpcError> {
    let mut sockets: usize = targets.iter().sum();
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by_key(|&c| rank[c]);
    while sockets != edges {
        let before = sockets;
        for &c in &order {
            if sockets < edges {
                let low = *targets.iter().min().unwrap();
                if targets[c] == low {
                    targets[c] += 1;
                    sockets += 1;
                }
            } else if sockets > edges {
                let high = *targets.iter().max().unwrap();
                if targets[c] == high && high > 2 {
                    targets[c] -= 1;
                    sockets -= 1;
                }
            } else {
                break;
            }
        }
        if sockets == before {
            return Err(LdpcError::Construction(
                "check degrees cannot absorb the edge count".into(),
            ));
        }
    }
    Ok(())
}

struct Growth {
    var_adj: Vec<Vec<u32>>,
    check_adj: Vec<Vec<u32>>,
    check_dist: Vec<u32>,
    var_seen: Vec<bool>,
}

impl Growth {
    fn new(n: usize, m: usize) -> Self {
        Growth {
            var_adj: vec![Vec::new(); n],
            check_adj: vec![Vec::new(); m],
            check_dist: vec![UNREACHED; m],
            var_seen: vec![false; n],
        }
    }

    fn connect(&mut self, v: usize, c: usize) {
        self.var_adj[v].push(c as u32);
        self.check_adj[c].push(v as u32);
    }

    // Breadth-first search from variable `v`, recording the depth (in check
    // levels) at which each check is first reached.
    fn expand_from(&mut self, v: usize) {
        self.check_dist.iter_mut().for_each(|d| *d = UNREACHED);
        self.var_seen.iter_mut().for_each(|s| *s = false);
        self.var_seen[v] = true;
        let mut reached = 0;
        let m = self.check_adj.len();
        let mut frontier: Vec<u32> = vec![v as u32];
        let mut depth = 0u32;
        while !frontier.is_empty() && reached < m {
            let mut next = Vec::new();
            for &u in &frontier {
                for &c in &self.var_adj[u as usize] {
                    if self.check_dist[c as usize] != UNREACHED {
                        continue;
                    }
                    self.check_dist[c as usize] = depth;
                    reached += 1;
                    for &w in &self.check_adj[c as usize] {
                        if !self.var_seen[w as usize] {
                            self.var_seen[w as usize] = true;
                            next.push(w);
                        }
                    }
                }
            }
            frontier = next;
            depth += 1;
        }
    }

    fn pick(&self, v: usize, targets: &[usize], rank: &[u32], use_distance: bool) -> Option<usize> {
        let adjacent = |c: usize| self.var_adj[v].contains(&(c as u32));
        let key = |c: usize| {
            let dist = if use_distance { self.check_dist[c] } else { 0 };
            // larger distance first, then lower degree, then lower rank
            (std::cmp::Reverse(dist), self.check_adj[c].len(), rank[c])
        };
        let with_capacity = (0..self.check_adj.len())
            .filter(|&c| self.check_adj[c].len() < targets[c] && !adjacent(c))
            .min_by_key(|&c| key(c));
        with_capacity.or_else(|| {
            (0..self.check_adj.len())
                .filter(|&c| !adjacent(c))
                .min_by_key(|&c| key(c))
        })
    }
}
