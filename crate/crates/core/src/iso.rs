//! Isomorphism of small digraphs by colour refinement with individualisation
//! and backtracking.
//!
//! Refinement colours a vertex by its previous colour and the multisets of
//! colours on its out- and in-neighbours. Anti-flag digraphs are regular, so
//! below the root the signature also counts directed 2-paths into each colour
//! class. Colour ids are assigned by sorting signatures, which keeps
//! everything independent of vertex numbering.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dsrg::{build_antiflag_backward, build_antiflag_forward, Digraph, DsrgError};
use crate::incidence::{build_gdd, IncidenceError, IncidenceStructure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("size mismatch: digraphs have {left} and {right} vertices, mapping has {mapping}")]
    SizeMismatch {
        left: usize,
        right: usize,
        mapping: usize,
    },
    #[error("mapping is not a permutation: {0} appears twice or is out of range")]
    NotPermutation(usize),
    #[error("fixture line {line}: {message}")]
    Fixture { line: usize, message: String },
    #[error(transparent)]
    Dsrg(#[from] DsrgError),
    #[error(transparent)]
    Incidence(#[from] IncidenceError),
}

/// A bijection on vertex indices: vertex `u` goes to `perm[u]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMapping {
    pub perm: Vec<usize>,
}

impl VertexMapping {
    pub fn identity(n: usize) -> Self {
        Self { perm: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

impl std::fmt::Display for VertexMapping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (u, w) in self.perm.iter().enumerate() {
            writeln!(f, "{u} -> {w}")?;
        }
        Ok(())
    }
}

/// `true` iff `u -> v` in `d1` exactly when `f(u) -> f(v)` in `d2`.
pub fn verify_mapping(d1: &Digraph, d2: &Digraph, f: &VertexMapping) -> Result<bool, IsoError> {
    let n = d1.n();
    if d2.n() != n || f.len() != n {
        return Err(IsoError::SizeMismatch {
            left: n,
            right: d2.n(),
            mapping: f.len(),
        });
    }
    let mut seen = vec![false; n];
    for &w in &f.perm {
        if w >= n || std::mem::replace(&mut seen[w], true) {
            return Err(IsoError::NotPermutation(w));
        }
    }
    Ok((0..n).all(|u| (0..n).all(|v| d1.has_edge(u, v) == d2.has_edge(f.perm[u], f.perm[v]))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    Isomorphic(VertexMapping),
    NotIsomorphic,
    BudgetExceeded { nodes: u64 },
}

/// Neighbour lists, built once per search.
struct Adjacency {
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl Adjacency {
    fn new(d: &Digraph) -> Self {
        let n = d.n();
        let out: Vec<Vec<usize>> = (0..n).map(|u| d.out_neighbors(u).collect()).collect();
        let mut inn = vec![Vec::new(); n];
        for (u, row) in out.iter().enumerate() {
            for &w in row {
                inn[w].push(u);
            }
        }
        Self { out, inn }
    }

    fn signature(&self, colors: &[u32], x: usize, two_paths: bool) -> Vec<u32> {
        fn push_counts(sig: &mut Vec<u32>, counts: BTreeMap<u32, u32>) {
            sig.push(u32::MAX);
            for (c, k) in counts {
                sig.extend([c, k]);
            }
        }
        let mut sig = vec![colors[x]];
        let mut out = BTreeMap::new();
        for &y in &self.out[x] {
            *out.entry(colors[y]).or_insert(0) += 1;
        }
        push_counts(&mut sig, out);
        let mut inn = BTreeMap::new();
        for &y in &self.inn[x] {
            *inn.entry(colors[y]).or_insert(0) += 1;
        }
        push_counts(&mut sig, inn);
        if two_paths {
            let mut two = BTreeMap::new();
            for &y in &self.out[x] {
                for &z in &self.out[y] {
                    *two.entry(colors[z]).or_insert(0) += 1;
                }
            }
            push_counts(&mut sig, two);
        }
        sig
    }
}

fn class_count(colors: &[u32]) -> usize {
    let mut seen: Vec<u32> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Refines the colourings of one or more graphs jointly to a fixpoint.
/// Returns `false` as soon as the colour histograms of the graphs differ.
fn refine(graphs: &[&Adjacency], colors: &mut [Vec<u32>], two_paths: bool) -> bool {
    let mut classes = class_count(&colors[0]);
    loop {
        let sigs: Vec<Vec<Vec<u32>>> = graphs
            .iter()
            .zip(colors.iter())
            .map(|(g, c)| (0..c.len()).map(|x| g.signature(c, x, two_paths)).collect())
            .collect();
        let mut palette: Vec<&Vec<u32>> = sigs.iter().flatten().collect();
        palette.sort_unstable();
        palette.dedup();
        for (c, s) in colors.iter_mut().zip(&sigs) {
            for (x, sig) in s.iter().enumerate() {
                c[x] = palette.binary_search(&sig).expect("signature is in the palette") as u32;
            }
        }
        if !histograms_agree(colors) {
            return false;
        }
        let now = palette.len();
        if now == classes {
            return true;
        }
        classes = now;
    }
}

fn histograms_agree(colors: &[Vec<u32>]) -> bool {
    let hist = |c: &[u32]| {
        let mut h = c.to_vec();
        h.sort_unstable();
        h
    };
    let first = hist(&colors[0]);
    colors[1..].iter().all(|c| hist(c) == first)
}

/// Smallest non-singleton colour class, ties to the lowest colour id.
fn target_cell(colors: &[u32]) -> Option<u32> {
    let mut sizes: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in colors {
        *sizes.entry(c).or_insert(0) += 1;
    }
    sizes
        .into_iter()
        .filter(|&(_, s)| s > 1)
        .min_by_key(|&(c, s)| (s, c))
        .map(|(c, _)| c)
}

fn individualise(colors: &mut [u32], x: usize) {
    // Every colour id is below the vertex count, so `n` is fresh.
    colors[x] = colors.len() as u32;
}

/// The coarsest equitable colouring reached by refinement from the uniform one.
pub fn equitable_partition(d: &Digraph) -> Vec<u32> {
    let adj = Adjacency::new(d);
    let mut colors = vec![vec![0; d.n()]];
    refine(&[&adj], &mut colors, false);
    colors.pop().unwrap()
}

enum Step {
    Found(VertexMapping),
    DeadEnd,
    OutOfBudget,
}

struct Search<'a> {
    d1: &'a Digraph,
    d2: &'a Digraph,
    a1: Adjacency,
    a2: Adjacency,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, colors: [Vec<u32>; 2]) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::OutOfBudget;
        }
        let Some(cell) = target_cell(&colors[0]) else {
            let mut by_color = vec![0; colors[1].len() + 1];
            for (w, &c) in colors[1].iter().enumerate() {
                by_color[c as usize] = w;
            }
            let f = VertexMapping {
                perm: colors[0].iter().map(|&c| by_color[c as usize]).collect(),
            };
            let ok = verify_mapping(self.d1, self.d2, &f).unwrap_or(false);
            return if ok { Step::Found(f) } else { Step::DeadEnd };
        };
        let u = colors[0].iter().position(|&c| c == cell).unwrap();
        let images: Vec<usize> = (0..colors[1].len()).filter(|&w| colors[1][w] == cell).collect();
        for w in images {
            let mut next = colors.clone();
            individualise(&mut next[0], u);
            individualise(&mut next[1], w);
            if !refine(&[&self.a1, &self.a2], &mut next, true) {
                continue;
            }
            match self.run(next) {
                Step::DeadEnd => {}
                done => return done,
            }
        }
        Step::DeadEnd
    }
}

/// Searches for an isomorphism `d1 -> d2`, visiting at most `budget` nodes.
pub fn are_isomorphic(d1: &Digraph, d2: &Digraph, budget: u64) -> IsoOutcome {
    if d1.n() != d2.n() || d1.edge_count() != d2.edge_count() {
        return IsoOutcome::NotIsomorphic;
    }
    let mut search = Search {
        d1,
        d2,
        a1: Adjacency::new(d1),
        a2: Adjacency::new(d2),
        nodes: 0,
        budget,
    };
    let mut colors = [vec![0; d1.n()], vec![0; d2.n()]];
    if !refine(&[&search.a1, &search.a2], &mut colors, false) {
        return IsoOutcome::NotIsomorphic;
    }
    match search.run(colors) {
        Step::Found(f) => {
            debug_assert_eq!(verify_mapping(d1, d2, &f), Ok(true));
            IsoOutcome::Isomorphic(f)
        }
        Step::DeadEnd => IsoOutcome::NotIsomorphic,
        Step::OutOfBudget => IsoOutcome::BudgetExceeded { nodes: search.nodes },
    }
}

/// A relabelling of `d` whose adjacency matrix is the same for every graph
/// isomorphic to `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    /// Vertex `u` of the input becomes vertex `labeling.perm[u]`.
    pub labeling: VertexMapping,
    pub graph: Digraph,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("search exceeded {nodes} nodes")]
pub struct BudgetExceeded {
    pub nodes: u64,
}

/// Canonical form: the lexicographically smallest dgr/1 rendering over all
/// leaves of the individualisation tree.
pub fn canonical_form(d: &Digraph, budget: u64) -> Result<CanonicalForm, BudgetExceeded> {
    struct Canon<'a> {
        d: &'a Digraph,
        adj: Adjacency,
        nodes: u64,
        budget: u64,
        best: Option<(Vec<u64>, Vec<usize>)>,
    }

    impl Canon<'_> {
        fn leaf_key(&self, perm: &[usize]) -> Vec<u64> {
            let g = self.d.relabel(perm);
            (0..g.n()).flat_map(|u| g.row(u).to_vec()).collect()
        }

        fn run(&mut self, colors: Vec<u32>) -> Result<(), BudgetExceeded> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(BudgetExceeded { nodes: self.nodes });
            }
            let Some(cell) = target_cell(&colors) else {
                // Discrete colours are ranks once compacted.
                let mut order: Vec<usize> = (0..colors.len()).collect();
                order.sort_by_key(|&x| colors[x]);
                let mut perm = vec![0; colors.len()];
                for (rank, &x) in order.iter().enumerate() {
                    perm[x] = rank;
                }
                let key = self.leaf_key(&perm);
                if self.best.as_ref().is_none_or(|(b, _)| key < *b) {
                    self.best = Some((key, perm));
                }
                return Ok(());
            };
            for x in (0..colors.len()).filter(|&x| colors[x] == cell) {
                let mut next = vec![colors.clone()];
                individualise(&mut next[0], x);
                refine(&[&self.adj], &mut next, true);
                self.run(next.pop().unwrap())?;
            }
            Ok(())
        }
    }

    let adj = Adjacency::new(d);
    let mut colors = vec![vec![0; d.n()]];
    refine(&[&adj], &mut colors, false);
    let mut canon = Canon {
        d,
        adj,
        nodes: 0,
        budget,
        best: None,
    };
    canon.run(colors.pop().unwrap())?;
    let (_, perm) = canon.best.expect("the search tree has at least one leaf");
    Ok(CanonicalForm {
        graph: d.relabel(&perm),
        labeling: VertexMapping { perm },
    })
}

/// The shipped 36-vertex mapping between the anti-flag digraphs of K_{3,3}
/// and of two parallel classes of AG(2,3).
pub const REFERENCE_MAPPING: &str = include_str!("../data/k33_ap2_3_mapping.txt");

/// The two digraphs of [`REFERENCE_MAPPING`] and the mapping it states.
#[derive(Debug, Clone)]
pub struct ReferenceFixture {
    /// Forward anti-flag digraph of `build_gdd(2, 3)` (K_{3,3}).
    pub left: Digraph,
    /// Backward anti-flag digraph of the 9-point structure with the listed lines.
    pub right: Digraph,
    pub right_structure: IncidenceStructure,
    pub mapping: VertexMapping,
}

pub fn reference_fixture() -> Result<ReferenceFixture, IsoError> {
    parse_reference(REFERENCE_MAPPING)
}

fn parse_reference(text: &str) -> Result<ReferenceFixture, IsoError> {
    let digits = |s: &str, line: usize| -> Result<Vec<usize>, IsoError> {
        s.trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d >= 1)
                    .map(|d| d as usize - 1)
                    .ok_or_else(|| IsoError::Fixture {
                        line,
                        message: format!("expected digits 1-9 in {s:?}"),
                    })
            })
            .collect()
    };
    let pair = |s: &str, line: usize| -> Result<(String, String), IsoError> {
        let (a, b) = s.split_once(',').ok_or_else(|| IsoError::Fixture {
            line,
            message: format!("expected `a,b` in {s:?}"),
        })?;
        Ok((a.trim().to_string(), b.trim().to_string()))
    };

    let mut lines_of_right = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        if let Some(rest) = raw.strip_prefix("lines:") {
            let blocks = rest
                .split_whitespace()
                .map(|b| {
                    let mut v = digits(b, line)?;
                    v.sort_unstable();
                    Ok(v)
                })
                .collect::<Result<Vec<_>, IsoError>>()?;
            lines_of_right = Some(blocks);
            continue;
        }
        let (l, r) = raw.split_once('↔').ok_or_else(|| IsoError::Fixture {
            line,
            message: "expected `point,block ↔ block,point`".into(),
        })?;
        let (lp, lb) = pair(l, line)?;
        let (rb, rp) = pair(r, line)?;
        let point = digits(&lp, line)?;
        let mut edge = digits(&lb, line)?;
        edge.sort_unstable();
        let mut block = digits(&rb, line)?;
        block.sort_unstable();
        let right_point = digits(&rp, line)?;
        if point.len() != 1 || right_point.len() != 1 || edge.len() != 2 {
            return Err(IsoError::Fixture {
                line,
                message: "malformed row".into(),
            });
        }
        rows.push((line, point[0], edge, block, right_point[0]));
    }
    let right_lines = lines_of_right.ok_or(IsoError::Fixture {
        line: 0,
        message: "missing `lines:` header".into(),
    })?;

    let left_structure = build_gdd(2, 3)?;
    let right_structure = IncidenceStructure::from_blocks(9, right_lines)?;
    let left = build_antiflag_forward(&left_structure)?;
    let right = build_antiflag_backward(&right_structure)?;

    let index = |g: &Digraph, point: usize, block: usize| {
        g.vertex_labels()
            .and_then(|labels| labels.iter().position(|a| a.point == point && a.block == block))
    };
    let mut perm = vec![usize::MAX; left.n()];
    for (line, point, edge, block, right_point) in rows {
        let missing = |what: &str| IsoError::Fixture {
            line,
            message: format!("{what} is not an anti-flag"),
        };
        let lb = left_structure.blocks().iter().position(|b| *b == edge).ok_or_else(|| missing("left block"))?;
        let rb = right_structure.blocks().iter().position(|b| *b == block).ok_or_else(|| missing("right block"))?;
        let u = index(&left, point, lb).ok_or_else(|| missing("left pair"))?;
        let w = index(&right, right_point, rb).ok_or_else(|| missing("right pair"))?;
        if perm[u] != usize::MAX {
            return Err(IsoError::Fixture {
                line,
                message: "left vertex listed twice".into(),
            });
        }
        perm[u] = w;
    }
    if let Some(u) = perm.iter().position(|&w| w == usize::MAX) {
        return Err(IsoError::Fixture {
            line: 0,
            message: format!("no row for left vertex {u}"),
        });
    }
    Ok(ReferenceFixture {
        left,
        right,
        right_structure,
        mapping: VertexMapping { perm },
    })
}
