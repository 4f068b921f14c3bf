//! Anti-flag digraphs and the exact directed strongly regular graph check.
//!
//! A loopless digraph with adjacency matrix `A` is a DSRG with parameters
//! `(v, k, t, λ, μ)` when `AJ = JA = kJ` and `A^2 = tI + λA + μ(J - I - A)`.
//! [`verify_dsrg`] extracts all five numbers from `A^2` and never consults a
//! formula; [`expected_params`] evaluates the closed forms so the two can be
//! compared.

mod digraph;
mod family;
mod spectrum;

use thiserror::Error;

use crate::incidence::{anti_flags, verify_2design, IncidenceError, IncidenceStructure};

pub use digraph::Digraph;
pub use family::{build_family, expected_params, FamilyInstance, FamilySpec};
pub use spectrum::{feasibility, spectrum, FeasibilityCheck, FeasibilityReport, Infeasible, Spectrum};

/// Largest vertex count [`verify_dsrg`] accepts.
pub const MAX_VERIFY_ORDER: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    T,
    Lambda,
    Mu,
}

impl std::fmt::Display for Which {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Which::T => "t",
            Which::Lambda => "lambda",
            Which::Mu => "mu",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsrgError {
    #[error("structure has no anti-flags")]
    Empty,
    #[error("loop at vertex {vertex}")]
    Loop { vertex: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("need at least 2 vertices")]
    TooSmall,
    #[error("{n} vertices exceeds the verification cap of {MAX_VERIFY_ORDER}")]
    TooLarge { n: usize },
    #[error("vertex {vertex} has out-degree {out_degree} and in-degree {in_degree}, expected {k}")]
    NotRegular {
        vertex: usize,
        out_degree: usize,
        in_degree: usize,
        k: usize,
    },
    #[error("{which} is not constant: ({}, {}) has {found}, expected {expected}", witness.0, witness.1)]
    NonConstant {
        which: Which,
        witness: (usize, usize),
        found: i64,
        expected: i64,
    },
    #[error("digraph is complete or empty")]
    Degenerate,
    #[error("Duval multiple needs t = mu, got t={t}, mu={mu}")]
    TNotMu { t: u64, mu: u64 },
    #[error("not a DSRG: {0}")]
    NotDsrg(Box<DsrgError>),
    #[error("multiple has parameters {got}, expected {expected}")]
    MultipleMismatch { got: DsrgParams, expected: DsrgParams },
    #[error("arithmetic overflow evaluating {0}")]
    Overflow(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("structure is not a partitioned set")]
    NotPartitionStructure,
    #[error("no construction for {0}")]
    NotConstructible(String),
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
}

/// The parameter tuple `(v, k, t, λ, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DsrgParams {
    pub v: u64,
    pub k: u64,
    pub t: u64,
    pub lambda: u64,
    pub mu: u64,
}

impl std::fmt::Display for DsrgParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{},{})", self.v, self.k, self.t, self.lambda, self.mu)
    }
}

impl DsrgParams {
    /// Validating constructor; see [`DsrgParams::validate`].
    pub fn new(v: u64, k: u64, t: u64, lambda: u64, mu: u64) -> Result<Self, DsrgError> {
        let p = Self { v, k, t, lambda, mu };
        p.validate()?;
        Ok(p)
    }

    /// Checks `t <= k < v`, `λ < k` and the row-sum identity
    /// `k(k + μ - λ) = t + (v - 1)μ`.
    pub fn validate(&self) -> Result<(), DsrgError> {
        if !(self.t <= self.k && self.k < self.v) {
            return Err(DsrgError::InvalidParams(format!("{self}: need t <= k < v")));
        }
        if self.lambda >= self.k {
            return Err(DsrgError::InvalidParams(format!("{self}: need lambda < k")));
        }
        if !self.row_sum_identity_holds() {
            return Err(DsrgError::InvalidParams(format!(
                "{self}: k(k+mu-lambda) != t+(v-1)mu"
            )));
        }
        Ok(())
    }

    pub fn row_sum_identity_holds(&self) -> bool {
        let (v, k, t, l, m) = (
            self.v as i128,
            self.k as i128,
            self.t as i128,
            self.lambda as i128,
            self.mu as i128,
        );
        k * (k + m - l) == t + (v - 1) * m
    }

    /// `(mv, mk, mt, mλ, mμ)`.
    pub fn scaled(&self, m: u64) -> Result<Self, DsrgError> {
        let mul = |x: u64| x.checked_mul(m).ok_or_else(|| DsrgError::Overflow(format!("{m} x {self}")));
        Ok(Self {
            v: mul(self.v)?,
            k: mul(self.k)?,
            t: mul(self.t)?,
            lambda: mul(self.lambda)?,
            mu: mul(self.mu)?,
        })
    }
}

/// `(p, B) -> (p', B')` iff `p ∈ B'`.
///
/// A vertex never points to itself because `p ∉ B`, so no loop suppression
/// is needed; [`Digraph::from_fn`] would reject one.
pub fn build_antiflag_forward(s: &IncidenceStructure) -> Result<Digraph, DsrgError> {
    antiflag_graph(s, |inc, nb, a, b| inc[a.point * nb + b.block])
}

/// `(p, B) -> (p', B')` iff `p' ∈ B`; the transpose of the forward rule.
pub fn build_antiflag_backward(s: &IncidenceStructure) -> Result<Digraph, DsrgError> {
    antiflag_graph(s, |inc, nb, a, b| inc[b.point * nb + a.block])
}

/// `(p, B) -> (p', B')` iff `p' ∈ B`, or `p = p'` and `B ≠ B'`.
///
/// Requires a 2-(v, b, k, r, λ) design with `b + λ > 2r`.
pub fn build_antiflag_backward_loopy(s: &IncidenceStructure) -> Result<Digraph, DsrgError> {
    let d = verify_2design(s)
        .map_err(|e| DsrgError::PreconditionFailed(format!("input is not a 2-design: {e}")))?;
    if d.b_blocks + d.lambda_pair <= 2 * d.r_replication {
        return Err(DsrgError::PreconditionFailed(format!(
            "{d} has b + lambda <= 2r"
        )));
    }
    antiflag_graph(s, |inc, nb, a, b| {
        inc[b.point * nb + a.block] || (a.point == b.point && a.block != b.block)
    })
}

/// On a partitioned set: `(x, S) -> (x', S')` iff `x ∈ S'`, or `S = S'` and `x ≠ x'`.
pub fn build_partition_spiked(s: &IncidenceStructure) -> Result<Digraph, DsrgError> {
    if s.groups() != Some(s.blocks()) {
        return Err(DsrgError::NotPartitionStructure);
    }
    antiflag_graph(s, |inc, nb, a, b| {
        inc[a.point * nb + b.block] || (a.block == b.block && a.point != b.point)
    })
}

fn antiflag_graph(
    s: &IncidenceStructure,
    rule: impl Fn(&[bool], usize, crate::incidence::AntiFlag, crate::incidence::AntiFlag) -> bool,
) -> Result<Digraph, DsrgError> {
    let flags = anti_flags(s);
    if flags.is_empty() {
        return Err(DsrgError::Empty);
    }
    let inc = s.incidence_matrix();
    let nb = s.num_blocks();
    let g = Digraph::from_fn(flags.len(), |u, w| u != w && rule(&inc, nb, flags[u], flags[w]))?;
    debug_assert!((0..flags.len()).all(|u| !rule(&inc, nb, flags[u], flags[u])));
    Ok(g.with_labels(flags))
}

/// Reads `(v, k, t, λ, μ)` off `A^2`, or reports the first violated condition.
pub fn verify_dsrg(d: &Digraph) -> Result<DsrgParams, DsrgError> {
    let n = d.n();
    if n < 2 {
        return Err(DsrgError::TooSmall);
    }
    if n > MAX_VERIFY_ORDER {
        return Err(DsrgError::TooLarge { n });
    }
    let in_deg = d.in_degrees();
    let k = d.out_degree(0);
    for (u, &in_degree) in in_deg.iter().enumerate() {
        let out = d.out_degree(u);
        if out != k || in_degree != k {
            return Err(DsrgError::NotRegular {
                vertex: u,
                out_degree: out,
                in_degree,
                k,
            });
        }
    }
    if k == 0 || k == n - 1 {
        return Err(DsrgError::Degenerate);
    }

    let cols = d.transpose();
    let mut found: [Option<(i64, (usize, usize))>; 3] = [None; 3];
    for u in 0..n {
        let row = d.row(u);
        for w in 0..n {
            let paths = digraph::popcount_and(row, cols.row(w)) as i64;
            let which = if u == w {
                Which::T
            } else if d.has_edge(u, w) {
                Which::Lambda
            } else {
                Which::Mu
            };
            let slot = &mut found[which as usize];
            match *slot {
                None => *slot = Some((paths, (u, w))),
                Some((expected, _)) if expected != paths => {
                    return Err(DsrgError::NonConstant {
                        which,
                        witness: (u, w),
                        found: paths,
                        expected,
                    })
                }
                Some(_) => {}
            }
        }
    }
    let value = |w: Which| found[w as usize].map(|(x, _)| x as u64).ok_or(DsrgError::Degenerate);
    let params = DsrgParams {
        v: n as u64,
        k: k as u64,
        t: value(Which::T)?,
        lambda: value(Which::Lambda)?,
        mu: value(Which::Mu)?,
    };
    debug_assert!(params.validate().is_ok(), "{params}");
    Ok(params)
}

/// Duval's blow-up `A ⊗ J_m`: vertex `(u, i)` is `u*m + i`, and `(u, i) -> (w, j)`
/// iff `u -> w`. Requires a DSRG with `t = μ`.
pub fn duval_multiple(d: &Digraph, m: usize) -> Result<Digraph, DsrgError> {
    if m == 0 {
        return Err(DsrgError::InvalidParams("multiple m must be positive".into()));
    }
    let base = verify_dsrg(d).map_err(|e| DsrgError::NotDsrg(Box::new(e)))?;
    if base.t != base.mu {
        return Err(DsrgError::TNotMu { t: base.t, mu: base.mu });
    }
    if m == 1 {
        return Ok(d.clone());
    }
    let blown = Digraph::from_fn(d.n() * m, |x, y| d.has_edge(x / m, y / m))?;
    let expected = base.scaled(m as u64)?;
    if blown.n() <= MAX_VERIFY_ORDER {
        let got = verify_dsrg(&blown)?;
        if got != expected {
            return Err(DsrgError::MultipleMismatch { got, expected });
        }
    }
    Ok(blown)
}
