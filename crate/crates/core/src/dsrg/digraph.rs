//! Loopless digraphs stored as packed bit rows.

use std::fmt::Write as _;

use super::DsrgError;
use crate::incidence::AntiFlag;

const WORD_BITS: usize = u64::BITS as usize;

/// A loopless directed graph on `0..n`; row `u` holds the out-neighbours of `u`.
///
/// Equality compares adjacency only; vertex labels are provenance.
#[derive(Clone)]
pub struct Digraph {
    n: usize,
    stride: usize,
    words: Vec<u64>,
    vertex_labels: Option<Vec<AntiFlag>>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.words == other.words
    }
}

impl Eq for Digraph {}

impl std::fmt::Debug for Digraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Digraph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        let stride = n.div_ceil(WORD_BITS).max(1);
        Self {
            n,
            stride,
            words: vec![0; n * stride],
            vertex_labels: None,
        }
    }

    /// Builds the digraph with an edge `u -> v` wherever `edge(u, v)` holds.
    pub fn from_fn(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Result<Self, DsrgError> {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in 0..n {
                if edge(u, v) {
                    if u == v {
                        return Err(DsrgError::Loop { vertex: u });
                    }
                    g.set(u, v);
                }
            }
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, DsrgError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(DsrgError::Parse {
                    line: 0,
                    message: format!("edge {u} {v} out of range for {n} vertices"),
                });
            }
            if u == v {
                return Err(DsrgError::Loop { vertex: u });
            }
            g.set(u, v);
        }
        Ok(g)
    }

    #[inline]
    fn set(&mut self, u: usize, v: usize) {
        self.words[u * self.stride + v / WORD_BITS] |= 1 << (v % WORD_BITS);
    }

    pub fn with_labels(mut self, labels: Vec<AntiFlag>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.vertex_labels = Some(labels);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_labels(&self) -> Option<&[AntiFlag]> {
        self.vertex_labels.as_deref()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.words[u * self.stride + v / WORD_BITS] >> (v % WORD_BITS) & 1 == 1
    }

    /// Packed out-neighbourhood of `u`.
    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.words[u * self.stride..(u + 1) * self.stride]
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * WORD_BITS + b)
            })
        })
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for u in 0..self.n {
            for v in self.out_neighbors(u) {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).map(move |v| (u, v)))
    }

    /// Reverses every edge. Labels are kept.
    pub fn transpose(&self) -> Self {
        let mut t = Self::empty(self.n);
        for (u, v) in self.edges() {
            t.set(v, u);
        }
        t.vertex_labels = self.vertex_labels.clone();
        t
    }

    /// The digraph with vertex `u` renamed `perm[u]`. Labels are dropped.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.set(perm[u], perm[v]);
        }
        g
    }

    /// `A^2` in row-major order, each entry the number of directed 2-paths.
    ///
    /// Entry `(u, w)` is the popcount of row `u` AND column `w`, with columns
    /// taken as rows of the transpose.
    pub fn square(&self) -> Vec<i64> {
        let cols = self.transpose();
        let mut out = vec![0i64; self.n * self.n];
        for u in 0..self.n {
            let ru = self.row(u);
            for w in 0..self.n {
                out[u * self.n + w] = popcount_and(ru, cols.row(w)) as i64;
            }
        }
        out
    }

    /// `dgr/1`: the vertex count, then one line of `0`/`1` per row.
    pub fn to_dgr(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1) + 8);
        writeln!(s, "{}", self.n).unwrap();
        for u in 0..self.n {
            for v in 0..self.n {
                s.push(if self.has_edge(u, v) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_dgr(text: &str) -> Result<Self, DsrgError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(DsrgError::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let n: usize = header.trim().parse().map_err(|_| DsrgError::Parse {
            line: 1,
            message: format!("expected vertex count, found {header:?}"),
        })?;
        let mut g = Self::empty(n);
        let mut rows = 0;
        for (i, line) in lines {
            let lineno = i + 1;
            if line.is_empty() && rows == n {
                continue;
            }
            if rows == n {
                return Err(DsrgError::Parse {
                    line: lineno,
                    message: format!("more than {n} rows"),
                });
            }
            if line.len() != n {
                return Err(DsrgError::Parse {
                    line: lineno,
                    message: format!("row has {} characters, expected {n}", line.len()),
                });
            }
            for (v, c) in line.bytes().enumerate() {
                match c {
                    b'0' => {}
                    b'1' if v == rows => return Err(DsrgError::Loop { vertex: rows }),
                    b'1' => g.set(rows, v),
                    other => {
                        return Err(DsrgError::Parse {
                            line: lineno,
                            message: format!("unexpected character {:?}", other as char),
                        })
                    }
                }
            }
            rows += 1;
        }
        if rows != n {
            return Err(DsrgError::Parse {
                line: rows + 2,
                message: format!("found {rows} rows, expected {n}"),
            });
        }
        Ok(g)
    }

    /// One `u v` line per edge, sorted lexicographically.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    /// Parses an edge list. The vertex count is one more than the largest
    /// index mentioned, or `n` when given.
    pub fn from_edge_list(text: &str, n: Option<usize>) -> Result<Self, DsrgError> {
        let mut edges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| DsrgError::Parse { line: i + 1, message };
            let mut parts = line.split_whitespace();
            let mut next = || -> Result<usize, DsrgError> {
                parts
                    .next()
                    .ok_or_else(|| parse_err("expected two vertex indices".into()))?
                    .parse()
                    .map_err(|e| parse_err(format!("bad vertex index: {e}")))
            };
            let (u, v) = (next()?, next()?);
            if parts.next().is_some() {
                return Err(parse_err("trailing tokens".into()));
            }
            edges.push((u, v));
        }
        let n = n.unwrap_or_else(|| edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Self::from_edges(n, &edges)
    }

    /// Reads `dgr/1` when the first line is a lone integer, an edge list otherwise.
    pub fn parse(text: &str) -> Result<Self, DsrgError> {
        let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        if first.split_whitespace().count() == 1 {
            Self::from_dgr(text)
        } else {
            Self::from_edge_list(text, None)
        }
    }
}

#[inline]
pub(crate) fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}
