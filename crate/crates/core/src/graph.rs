// Copyright 2026 qsw-thermo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Directed graphs, the de-directed adjacency used as a Hamiltonian, and the
//! Google matrix with its classical pagerank.
//!
//! Stochastic matrices are column-stochastic throughout: entry `(i, j)` is the
//! probability of moving from node `j` to node `i`.

use std::collections::BTreeSet;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::report::fmt_f64;

/// Conventional pagerank damping factor.
pub const DEFAULT_DAMPING: f64 = 0.85;
/// Default L1 residual target for [`pagerank`].
pub const DEFAULT_PAGERANK_TOL: f64 = 1e-12;
const PAGERANK_MAX_ITER: usize = 100_000;

/// A directed graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl DirectedGraph {
    /// Builds a graph, collapsing duplicate edges.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("graph must have at least one node".into()));
        }
        let edges: BTreeSet<_> = edges.into_iter().collect();
        if let Some(&(s, d)) = edges.iter().find(|&&(s, d)| s >= n || d >= n) {
            return Err(Error::Domain(format!("edge ({s}, {d}) outside 0..{n}")));
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.edges.contains(&(src, dst))
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.edges.range((node, 0)..(node + 1, 0)).count()
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Shape(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.n
            )));
        }
        Self::new(self.n, self.edges().map(|(s, d)| (perm[s], perm[d])))
    }

    /// Writes the graph in the edge-list format accepted by [`parse_edge_list`].
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n {}", self.n)?;
        for (s, d) in self.edges() {
            writeln!(out, "{s} {d}")?;
        }
        Ok(())
    }
}

/// Parses an edge list.
///
/// Blank lines and lines starting with `#` are ignored. The first remaining
/// line may be `n <count>`; otherwise the node count is one more than the
/// largest index seen.
pub fn parse_edge_list(text: &str) -> Result<DirectedGraph> {
    let mut declared: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two fields, found {}", fields.len()),
            });
        }
        if fields[0] == "n" {
            if seen_content {
                return Err(Error::Parse {
                    line: line_no,
                    message: "node count must precede the edges".into(),
                });
            }
            let count = parse_index(fields[1], line_no)?;
            if count == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "node count must be positive".into(),
                });
            }
            declared = Some((count, line_no));
            seen_content = true;
            continue;
        }
        seen_content = true;
        let src = parse_index(fields[0], line_no)?;
        let dst = parse_index(fields[1], line_no)?;
        if let Some((count, _)) = declared {
            for v in [src, dst] {
                if v >= count {
                    return Err(Error::Range {
                        line: line_no,
                        index: v.to_string(),
                    });
                }
            }
        }
        edges.push((src, dst));
    }

    let n = match declared {
        Some((count, _)) => count,
        None => {
            let max = edges
                .iter()
                .map(|&(s, d)| s.max(d))
                .max()
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    message: "empty edge list without node count".into(),
                })?;
            max.checked_add(1).ok_or(Error::Range {
                line: 0,
                index: max.to_string(),
            })?
        }
    };
    DirectedGraph::new(n, edges)
}

fn parse_index(field: &str, line: usize) -> Result<usize> {
    match field.parse::<i128>() {
        Ok(v) if v < 0 || v > usize::MAX as i128 => Err(Error::Range {
            line,
            index: field.to_string(),
        }),
        Ok(v) => Ok(v as usize),
        Err(_)
            if field
                .chars()
                .all(|c| c.is_ascii_digit() || c == '-' || c == '+')
                && field.chars().any(|c| c.is_ascii_digit()) =>
        {
            // all digits but too long for i128
            Err(Error::Range {
                line,
                index: field.to_string(),
            })
        }
        Err(_) => Err(Error::Parse {
            line,
            message: format!("invalid node index {field:?}"),
        }),
    }
}

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Shape(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn column_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|i| self.get(i, j)).sum()
    }

    /// Row-major CSV without header, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        for row in self.data.chunks(self.n.max(1)) {
            w.write_record(row.iter().map(|&v| fmt_f64(v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Column-stochastic matrix with strictly non-negative entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(RealMatrix);

impl StochasticMatrix {
    /// Validates column sums (1e-12) and non-negativity.
    pub fn new(m: RealMatrix) -> Result<Self> {
        for j in 0..m.n() {
            let sum = m.column_sum(j);
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("column {j} sums to {sum}")));
            }
            if (0..m.n()).any(|i| !(m.get(i, j) >= 0.0)) {
                return Err(Error::Domain(format!("column {j} has a negative entry")));
            }
        }
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// Probability of a hop from `src` to `dst`.
    #[inline]
    pub fn get(&self, dst: usize, src: usize) -> f64 {
        self.0.get(dst, src)
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.0
    }
}

/// Probability vector (non-negative, unit sum).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        let sum: f64 = entries.iter().sum();
        if entries.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "not a probability vector (sum {sum})"
            )));
        }
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// 0/1 adjacency of the graph with directions and self-loops removed.
pub fn symmetrized_adjacency(g: &DirectedGraph) -> RealMatrix {
    let mut a = RealMatrix::zeros(g.n());
    for (s, d) in g.edges().filter(|(s, d)| s != d) {
        a.set(s, d, 1.0);
        a.set(d, s, 1.0);
    }
    a
}

/// `damping * S + (1 - damping) / n * J`, with dangling columns of `S`
/// replaced by the uniform column.
pub fn google_matrix(g: &DirectedGraph, damping: f64) -> Result<StochasticMatrix> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::Domain(format!("damping {damping} outside (0, 1]")));
    }
    let n = g.n();
    let uniform = 1.0 / n as f64;
    let teleport = (1.0 - damping) * uniform;
    let mut m = RealMatrix::zeros(n);
    for src in 0..n {
        let deg = g.out_degree(src);
        if deg == 0 {
            for dst in 0..n {
                m.set(dst, src, damping * uniform + teleport);
            }
        } else {
            let share = 1.0 / deg as f64;
            for dst in 0..n {
                let hop = if g.has_edge(src, dst) { share } else { 0.0 };
                m.set(dst, src, damping * hop + teleport);
            }
        }
    }
    // fold rounding residue into the diagonal so columns sum to 1 at the ulp level
    for j in 0..n {
        let excess = m.column_sum(j) - 1.0;
        let largest = (0..n)
            .max_by(|&a, &b| m.get(a, j).total_cmp(&m.get(b, j)))
            .unwrap();
        m.set(largest, j, m.get(largest, j) - excess);
    }
    StochasticMatrix::new(m)
}

/// Stationary distribution of `g` by power iteration from the uniform vector.
pub fn pagerank(g: &StochasticMatrix, tol: f64) -> Result<ProbabilityVector> {
    let n = g.n();
    let mut pi = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..PAGERANK_MAX_ITER {
        let next = g.matrix().mul_vec(&pi);
        residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        let total: f64 = next.iter().sum();
        pi = next.into_iter().map(|p| p / total).collect();
        if residual <= tol {
            return ProbabilityVector::new(pi);
        }
    }
    Err(Error::Convergence {
        iterations: PAGERANK_MAX_ITER,
        residual,
    })
}
