//! Finite incidence structures and their axiom verifiers.
//!
//! Every builder fixes a canonical ordering of points, blocks, groups and
//! parallel classes. The anti-flag digraphs number their vertices from
//! [`anti_flags`], so these orderings are part of the public contract.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffield::{make_field, FieldError};
use crate::DEFAULT_BLOCK_BUDGET;

/// Largest affine plane order accepted by [`build_affine_plane`].
pub const MAX_PLANE_ORDER: usize = 64;
/// Largest point count accepted by [`build_hyperplane_design`].
pub const MAX_HYPERPLANE_POINTS: u64 = 100_000;
/// Cap on point-block incidence tests a hyperplane design may need.
const MAX_HYPERPLANE_WORK: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IncidenceError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("construction needs {needed} blocks, budget is {budget}")]
    OutOfBudget { needed: String, budget: u64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("invalid incidence structure: {0}")]
    Invalid(String),
    #[error("structure has no parallel classes")]
    NoParallelClasses,
    #[error("cannot keep {l} parallel classes out of {available}")]
    BadL { l: usize, available: usize },
    #[error("structure has no group partition")]
    MissingGroups,
    #[error("not a partial geometry: axiom {axiom} fails ({witness})")]
    NotPg { axiom: u8, witness: String },
    #[error("not a group divisible design: {witness}")]
    NotGdd { witness: String },
    #[error("not a 2-design: {witness}")]
    NotDesign { witness: String },
    #[error("malformed structure JSON: {0}")]
    Json(String),
}

/// A point set `0..num_points` with blocks, optional group partition and
/// optional resolution into parallel classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceStructure {
    num_points: usize,
    blocks: Vec<Vec<usize>>,
    groups: Option<Vec<Vec<usize>>>,
    parallel_classes: Option<Vec<Vec<usize>>>,
}

/// A non-incident (point, block index) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AntiFlag {
    pub point: usize,
    pub block: usize,
}

/// Partial geometry parameters (points per line, lines per point, connection number).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PgParams {
    pub kappa: usize,
    pub rho: usize,
    pub tau: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GddParams {
    /// Number of groups.
    pub l: usize,
    /// Common group size.
    pub q: usize,
    /// Number of blocks through any two points of different groups.
    pub pair_index: usize,
}

/// Parameters 2-(v, b, k, r, λ) of a design, with the resolution data when
/// the structure carries parallel classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignParams {
    pub v_pts: usize,
    pub b_blocks: usize,
    pub k_blocksize: usize,
    pub r_replication: usize,
    pub lambda_pair: usize,
    /// Blocks per parallel class.
    pub s: Option<usize>,
    /// Common intersection size of non-parallel blocks.
    pub m_int: Option<usize>,
}

impl DesignParams {
    /// Checks the counting identities `r(k-1) = λ(v-1)` and `bk = vr`, and
    /// `v = m s^2`, `k = m s` when the resolution data is present.
    pub fn is_consistent(&self) -> bool {
        let (v, b, k, r, lam) = (
            self.v_pts,
            self.b_blocks,
            self.k_blocksize,
            self.r_replication,
            self.lambda_pair,
        );
        let base = k >= 2 && r * (k - 1) == lam * (v - 1) && b * k == v * r;
        let affine = match (self.s, self.m_int) {
            (Some(s), Some(m)) => v == m * s * s && k == m * s,
            _ => true,
        };
        base && affine
    }
}

impl std::fmt::Display for DesignParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "2-({},{},{},{},{})",
            self.v_pts, self.b_blocks, self.k_blocksize, self.r_replication, self.lambda_pair
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureJson {
    points: usize,
    blocks: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    groups: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parallel_classes: Option<Vec<Vec<usize>>>,
}

fn check_partition(
    parts: &[Vec<usize>],
    universe: usize,
    what: &str,
) -> Result<(), IncidenceError> {
    let mut seen = vec![false; universe];
    for part in parts {
        if part.is_empty() {
            return Err(IncidenceError::Invalid(format!("empty {what} class")));
        }
        for &x in part {
            if x >= universe {
                return Err(IncidenceError::Invalid(format!("{what} entry {x} out of range")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(IncidenceError::Invalid(format!("{what} entry {x} repeated")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(IncidenceError::Invalid(format!("{what} classes miss {missing}")));
    }
    Ok(())
}

impl IncidenceStructure {
    /// Validating constructor.
    pub fn new(
        num_points: usize,
        blocks: Vec<Vec<usize>>,
        groups: Option<Vec<Vec<usize>>>,
        parallel_classes: Option<Vec<Vec<usize>>>,
    ) -> Result<Self, IncidenceError> {
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(IncidenceError::Invalid(format!("block {i} is empty")));
            }
            if !block.windows(2).all(|w| w[0] < w[1]) {
                return Err(IncidenceError::Invalid(format!(
                    "block {i} is not strictly increasing"
                )));
            }
            if *block.last().unwrap() >= num_points {
                return Err(IncidenceError::Invalid(format!(
                    "block {i} has a point outside 0..{num_points}"
                )));
            }
        }
        let mut sorted: Vec<&Vec<usize>> = blocks.iter().collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(IncidenceError::Invalid(format!("duplicate block {:?}", w[0])));
        }
        if let Some(groups) = &groups {
            check_partition(groups, num_points, "group")?;
        }
        if let Some(classes) = &parallel_classes {
            check_partition(classes, blocks.len(), "parallel")?;
            for (c, class) in classes.iter().enumerate() {
                let mut covered = vec![false; num_points];
                for &b in class {
                    for &x in &blocks[b] {
                        if std::mem::replace(&mut covered[x], true) {
                            return Err(IncidenceError::Invalid(format!(
                                "parallel class {c} has overlapping blocks at point {x}"
                            )));
                        }
                    }
                }
                if let Some(x) = covered.iter().position(|c| !c) {
                    return Err(IncidenceError::Invalid(format!(
                        "parallel class {c} does not cover point {x}"
                    )));
                }
            }
        }
        Ok(Self {
            num_points,
            blocks,
            groups,
            parallel_classes,
        })
    }

    pub fn from_blocks(num_points: usize, blocks: Vec<Vec<usize>>) -> Result<Self, IncidenceError> {
        Self::new(num_points, blocks, None, None)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, index: usize) -> &[usize] {
        &self.blocks[index]
    }

    pub fn groups(&self) -> Option<&[Vec<usize>]> {
        self.groups.as_deref()
    }

    pub fn parallel_classes(&self) -> Option<&[Vec<usize>]> {
        self.parallel_classes.as_deref()
    }

    #[inline]
    pub fn is_incident(&self, point: usize, block: usize) -> bool {
        self.blocks[block].binary_search(&point).is_ok()
    }

    /// Point-major incidence matrix, `m[p * b + i]` is true iff `p ∈ B_i`.
    pub fn incidence_matrix(&self) -> Vec<bool> {
        let b = self.blocks.len();
        let mut m = vec![false; self.num_points * b];
        for (i, block) in self.blocks.iter().enumerate() {
            for &p in block {
                m[p * b + i] = true;
            }
        }
        m
    }

    /// For each point, the indices of the blocks through it (ascending).
    pub fn blocks_through_points(&self) -> Vec<Vec<usize>> {
        let mut through = vec![Vec::new(); self.num_points];
        for (i, block) in self.blocks.iter().enumerate() {
            for &p in block {
                through[p].push(i);
            }
        }
        through
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StructureJson {
            points: self.num_points,
            blocks: self.blocks.clone(),
            groups: self.groups.clone(),
            parallel_classes: self.parallel_classes.clone(),
        })
        .expect("structure serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, IncidenceError> {
        let raw: StructureJson =
            serde_json::from_str(text).map_err(|e| IncidenceError::Json(e.to_string()))?;
        Self::new(raw.points, raw.blocks, raw.groups, raw.parallel_classes)
    }
}

fn budget_check(count: Option<u64>, budget: u64, what: impl Fn() -> String) -> Result<u64, IncidenceError> {
    match count {
        Some(c) if c <= budget => Ok(c),
        _ => Err(IncidenceError::OutOfBudget {
            needed: what(),
            budget,
        }),
    }
}

/// The transversal design GD(l, q^{l-2}, q; ql): `l` groups of `q`
/// consecutive points, every transversal is a block.
pub fn build_gdd(l: usize, q: usize) -> Result<IncidenceStructure, IncidenceError> {
    build_gdd_with_budget(l, q, DEFAULT_BLOCK_BUDGET)
}

pub fn build_gdd_with_budget(
    l: usize,
    q: usize,
    budget: u64,
) -> Result<IncidenceStructure, IncidenceError> {
    if l < 2 || q < 2 {
        return Err(IncidenceError::BadParameter(format!(
            "group divisible design needs l >= 2 and q >= 2, got l={l}, q={q}"
        )));
    }
    let count = budget_check(
        (q as u64).checked_pow(l as u32),
        budget,
        || format!("{q}^{l}"),
    )? as usize;

    let groups: Vec<Vec<usize>> = (0..l).map(|g| (g * q..(g + 1) * q).collect()).collect();
    // Odometer over (j_1, ..., j_l); the last coordinate varies fastest, which
    // is lexicographic order of the blocks' point sequences.
    let mut blocks = Vec::with_capacity(count);
    let mut digits = vec![0usize; l];
    loop {
        blocks.push(digits.iter().enumerate().map(|(g, &j)| g * q + j).collect());
        let mut pos = l;
        loop {
            if pos == 0 {
                return IncidenceStructure::new(q * l, blocks, Some(groups), None);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < q {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// AG(2, q): point `(x, y)` has index `x*q + y`. Parallel classes are slope
/// 0, 1, ..., q-1 (field index order) followed by the verticals; lines in a
/// class are ordered by intercept.
pub fn build_affine_plane(q: usize) -> Result<IncidenceStructure, IncidenceError> {
    if q > MAX_PLANE_ORDER {
        if !crate::ffield::is_prime_power(q) {
            return Err(FieldError::NotPrimePower(q).into());
        }
        return Err(IncidenceError::BadParameter(format!(
            "affine plane order {q} exceeds {MAX_PLANE_ORDER}"
        )));
    }
    let f = make_field(q)?;
    let mut blocks = Vec::with_capacity(q * q + q);
    let mut classes = Vec::with_capacity(q + 1);
    for slope in f.elements() {
        let mut class = Vec::with_capacity(q);
        for intercept in f.elements() {
            let mut line: Vec<usize> = f
                .elements()
                .map(|x| x * q + f.add(f.mul(slope, x), intercept))
                .collect();
            line.sort_unstable();
            class.push(blocks.len());
            blocks.push(line);
        }
        classes.push(class);
    }
    let mut verticals = Vec::with_capacity(q);
    for c in f.elements() {
        verticals.push(blocks.len());
        blocks.push((0..q).map(|y| c * q + y).collect());
    }
    classes.push(verticals);
    IncidenceStructure::new(q * q, blocks, None, Some(classes))
}

/// Affine hyperplanes of GF(q)^n. Points are indexed by base-`q` encoding
/// with the first coordinate most significant; each direction uses the
/// normal vector whose first nonzero coordinate is 1.
pub fn build_hyperplane_design(q: usize, n: usize) -> Result<IncidenceStructure, IncidenceError> {
    if n < 2 {
        return Err(IncidenceError::BadParameter(format!(
            "hyperplane design needs n >= 2, got {n}"
        )));
    }
    if !crate::ffield::is_prime_power(q) {
        return Err(FieldError::NotPrimePower(q).into());
    }
    let num_points = budget_check((q as u64).checked_pow(n as u32), MAX_HYPERPLANE_POINTS, || {
        format!("{q}^{n} points")
    })? as usize;
    let directions = (num_points - 1) / (q - 1);
    budget_check(
        (directions as u64 * q as u64).checked_mul(num_points as u64),
        MAX_HYPERPLANE_WORK,
        || format!("{} blocks over {num_points} points", directions * q),
    )?;
    let f = make_field(q)?;

    let coords = |mut idx: usize| -> Vec<usize> {
        let mut c = vec![0; n];
        for slot in c.iter_mut().rev() {
            *slot = idx % q;
            idx /= q;
        }
        c
    };
    let points: Vec<Vec<usize>> = (0..num_points).map(coords).collect();
    let normals = points
        .iter()
        .filter(|a| a.iter().find(|&&x| x != 0) == Some(&1))
        .cloned()
        .collect::<Vec<_>>();
    debug_assert_eq!(normals.len(), directions);

    let dot = |a: &[usize], x: &[usize]| a.iter().zip(x).fold(0, |acc, (&ai, &xi)| f.add(acc, f.mul(ai, xi)));

    let mut blocks = Vec::with_capacity(directions * q);
    let mut classes = Vec::with_capacity(directions);
    for a in &normals {
        let mut by_value = vec![Vec::new(); q];
        for (idx, x) in points.iter().enumerate() {
            by_value[dot(a, x)].push(idx);
        }
        let start = blocks.len();
        blocks.extend(by_value);
        classes.push((start..start + q).collect());
    }
    IncidenceStructure::new(num_points, blocks, None, Some(classes))
}

/// Keeps the blocks of the first `l` parallel classes, renumbered class by class.
pub fn restrict_parallel_classes(
    s: &IncidenceStructure,
    l: usize,
) -> Result<IncidenceStructure, IncidenceError> {
    let classes = s.parallel_classes().ok_or(IncidenceError::NoParallelClasses)?;
    if l == 0 || l > classes.len() {
        return Err(IncidenceError::BadL {
            l,
            available: classes.len(),
        });
    }
    let mut blocks = Vec::new();
    let mut new_classes = Vec::with_capacity(l);
    for class in &classes[..l] {
        let start = blocks.len();
        blocks.extend(class.iter().map(|&b| s.blocks[b].clone()));
        new_classes.push((start..blocks.len()).collect());
    }
    IncidenceStructure::new(s.num_points, blocks, s.groups.clone(), Some(new_classes))
}

/// `l` disjoint consecutive `q`-sets; they are simultaneously the blocks, the
/// groups and a single parallel class.
pub fn build_partition_structure(q: usize, l: usize) -> Result<IncidenceStructure, IncidenceError> {
    if q < 1 || l < 2 {
        return Err(IncidenceError::BadParameter(format!(
            "partition structure needs q >= 1 and l >= 2, got q={q}, l={l}"
        )));
    }
    let parts: Vec<Vec<usize>> = (0..l).map(|i| (i * q..(i + 1) * q).collect()).collect();
    IncidenceStructure::new(q * l, parts.clone(), Some(parts), Some(vec![(0..l).collect()]))
}

/// The Fano plane as the cyclic design developed from {0, 1, 3} mod 7.
pub fn build_fano() -> IncidenceStructure {
    let blocks = (0..7)
        .map(|i| {
            let mut b = vec![i, (i + 1) % 7, (i + 3) % 7];
            b.sort_unstable();
            b
        })
        .collect();
    IncidenceStructure::from_blocks(7, blocks).expect("Fano plane is well formed")
}

/// Checks the partial geometry axioms and returns (κ, ρ, τ).
pub fn verify_pg(s: &IncidenceStructure) -> Result<PgParams, IncidenceError> {
    let fail = |axiom: u8, witness: String| Err(IncidenceError::NotPg { axiom, witness });
    if s.blocks.is_empty() || s.num_points == 0 {
        return fail(1, "structure is empty".into());
    }
    let kappa = s.blocks[0].len();
    if let Some(i) = s.blocks.iter().position(|b| b.len() != kappa) {
        return fail(1, format!("block {i} has size {}, block 0 has {kappa}", s.blocks[i].len()));
    }
    if kappa < 2 {
        return fail(1, format!("lines have {kappa} point(s)"));
    }
    let through = s.blocks_through_points();
    let rho = through[0].len();
    if let Some(p) = through.iter().position(|t| t.len() != rho) {
        return fail(1, format!("point {p} is on {} lines, point 0 on {rho}", through[p].len()));
    }
    if rho < 2 {
        return fail(1, format!("points are on {rho} line(s)"));
    }

    let nb = s.blocks.len();
    let inc = s.incidence_matrix();
    for p in 0..s.num_points {
        for p2 in p + 1..s.num_points {
            let shared = (0..nb).filter(|&i| inc[p * nb + i] && inc[p2 * nb + i]).count();
            if shared > 1 {
                return fail(2, format!("points {p} and {p2} share {shared} lines"));
            }
        }
    }

    let mut tau = None;
    for p in 0..s.num_points {
        for (l, line) in s.blocks.iter().enumerate() {
            if inc[p * nb + l] {
                continue;
            }
            let meeting = through[p]
                .iter()
                .filter(|&&m| line.iter().any(|&x| inc[x * nb + m]))
                .count();
            match tau {
                None if meeting == 0 => {
                    return fail(3, format!("no line through point {p} meets line {l}"))
                }
                None => tau = Some(meeting),
                Some(t) if t != meeting => {
                    return fail(
                        3,
                        format!("anti-flag ({p},{l}) sees {meeting} lines, expected {t}"),
                    )
                }
                Some(_) => {}
            }
        }
    }
    match tau {
        Some(tau) => Ok(PgParams { kappa, rho, tau }),
        None => fail(3, "structure has no anti-flags".into()),
    }
}

fn pair_counts(s: &IncidenceStructure) -> Vec<usize> {
    let v = s.num_points;
    let mut counts = vec![0; v * v];
    for block in &s.blocks {
        for (i, &a) in block.iter().enumerate() {
            for &b in &block[i + 1..] {
                counts[a * v + b] += 1;
            }
        }
    }
    counts
}

/// Checks the group divisible property against the structure's groups.
pub fn verify_gdd(s: &IncidenceStructure) -> Result<GddParams, IncidenceError> {
    let groups = s.groups().ok_or(IncidenceError::MissingGroups)?;
    let fail = |witness: String| Err(IncidenceError::NotGdd { witness });
    let q = groups[0].len();
    if let Some(g) = groups.iter().position(|g| g.len() != q) {
        return fail(format!("group {g} has size {}, group 0 has {q}", groups[g].len()));
    }
    let v = s.num_points;
    let mut group_of = vec![0; v];
    for (g, members) in groups.iter().enumerate() {
        for &x in members {
            group_of[x] = g;
        }
    }
    let counts = pair_counts(s);
    let mut pair_index = None;
    for a in 0..v {
        for b in a + 1..v {
            let c = counts[a * v + b];
            if group_of[a] == group_of[b] {
                if c != 0 {
                    return fail(format!("same-group points {a},{b} share {c} blocks"));
                }
                continue;
            }
            match pair_index {
                None if c == 0 => return fail(format!("points {a},{b} share no block")),
                None => pair_index = Some(c),
                Some(expected) if expected != c => {
                    return fail(format!("points {a},{b} share {c} blocks, expected {expected}"))
                }
                Some(_) => {}
            }
        }
    }
    match pair_index {
        Some(pair_index) => Ok(GddParams {
            l: groups.len(),
            q,
            pair_index,
        }),
        None => fail("only one group".into()),
    }
}

/// Checks that the blocks form a 2-design and fills in the resolution data
/// when the structure carries parallel classes.
pub fn verify_2design(s: &IncidenceStructure) -> Result<DesignParams, IncidenceError> {
    let fail = |witness: String| Err(IncidenceError::NotDesign { witness });
    let v = s.num_points;
    if v < 2 || s.blocks.is_empty() {
        return fail("need at least two points and one block".into());
    }
    let k = s.blocks[0].len();
    if let Some(i) = s.blocks.iter().position(|b| b.len() != k) {
        return fail(format!("block {i} has size {}, block 0 has {k}", s.blocks[i].len()));
    }
    if k < 2 {
        return fail("blocks have a single point".into());
    }
    let through = s.blocks_through_points();
    let r = through[0].len();
    if let Some(p) = through.iter().position(|t| t.len() != r) {
        return fail(format!("point {p} is on {} blocks, point 0 on {r}", through[p].len()));
    }
    let counts = pair_counts(s);
    let lambda = counts[1];
    for a in 0..v {
        for b in a + 1..v {
            let c = counts[a * v + b];
            if c != lambda {
                return fail(format!("points {a},{b} share {c} blocks, points 0,1 share {lambda}"));
            }
        }
    }
    if lambda == 0 {
        return fail("no pair of points shares a block".into());
    }

    let mut params = DesignParams {
        v_pts: v,
        b_blocks: s.blocks.len(),
        k_blocksize: k,
        r_replication: r,
        lambda_pair: lambda,
        s: None,
        m_int: None,
    };
    if let Some(classes) = s.parallel_classes() {
        params.s = Some(v / k);
        let mut class_of = vec![0; s.blocks.len()];
        for (c, members) in classes.iter().enumerate() {
            for &b in members {
                class_of[b] = c;
            }
        }
        let inc = s.incidence_matrix();
        let nb = s.blocks.len();
        let mut m_int = None;
        let mut constant = true;
        'outer: for b1 in 0..nb {
            for b2 in b1 + 1..nb {
                if class_of[b1] == class_of[b2] {
                    continue;
                }
                let meet = s.blocks[b1].iter().filter(|&&x| inc[x * nb + b2]).count();
                match m_int {
                    None => m_int = Some(meet),
                    Some(m) if m != meet => {
                        constant = false;
                        break 'outer;
                    }
                    Some(_) => {}
                }
            }
        }
        if constant {
            params.m_int = m_int;
        }
        if !params.is_consistent() {
            params.m_int = None;
        }
    }
    debug_assert!(params.is_consistent());
    Ok(params)
}

/// All non-incident (point, block) pairs ordered by point, then block index.
pub fn anti_flags(s: &IncidenceStructure) -> Vec<AntiFlag> {
    let nb = s.blocks.len();
    let inc = s.incidence_matrix();
    (0..s.num_points)
        .flat_map(|point| (0..nb).map(move |block| AntiFlag { point, block }))
        .filter(|af| !inc[af.point * nb + af.block])
        .collect()
}
