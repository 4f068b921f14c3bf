//! Brute-force oracles shared by the integration tests. Everything here is
//! written from the definitions with plain nested loops and shares no code
//! with the library's verifiers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use dsrg::incidence::{
    build_affine_plane, build_fano, build_gdd, build_hyperplane_design, build_partition_structure,
    restrict_parallel_classes,
};
use dsrg::{Digraph, IncidenceStructure};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type Params = (u64, u64, u64, u64, u64);

/// Dense 0/1 adjacency matrix.
pub fn dense(d: &Digraph) -> Vec<Vec<i64>> {
    (0..d.n())
        .map(|u| (0..d.n()).map(|w| d.has_edge(u, w) as i64).collect())
        .collect()
}

pub fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut c = vec![vec![0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// Reads `(v, k, t, λ, μ)` off a schoolbook `A^2`; `None` unless every
/// defining identity holds and both an edge and a non-edge pair exist.
pub fn dsrg_oracle(d: &Digraph) -> Option<Params> {
    let a = dense(d);
    let n = a.len();
    if n < 2 || (0..n).any(|i| a[i][i] != 0) {
        return None;
    }
    let k = a[0].iter().sum::<i64>();
    for (i, r) in a.iter().enumerate() {
        let row: i64 = r.iter().sum();
        let col: i64 = (0..n).map(|j| a[j][i]).sum();
        if row != k || col != k {
            return None;
        }
    }
    let a2 = matmul(&a, &a);
    let (mut t, mut lambda, mut mu) = (None, None, None);
    for i in 0..n {
        for j in 0..n {
            let slot = if i == j {
                &mut t
            } else if a[i][j] == 1 {
                &mut lambda
            } else {
                &mut mu
            };
            match *slot {
                None => *slot = Some(a2[i][j]),
                Some(x) if x != a2[i][j] => return None,
                Some(_) => {}
            }
        }
    }
    let (t, lambda, mu) = (t?, lambda?, mu?);
    // A^2 - tI - λA - μ(J - I - A) = 0, entry by entry.
    for i in 0..n {
        for j in 0..n {
            let id = (i == j) as i64;
            let rhs = t * id + lambda * a[i][j] + mu * (1 - id - a[i][j]);
            assert_eq!(a2[i][j], rhs);
        }
    }
    Some((n as u64, k as u64, t as u64, lambda as u64, mu as u64))
}

/// `(A - θ1 I)(A - θ2 I) = μJ`: on the complement of the all-ones vector
/// every eigenvalue is θ1 or θ2.
pub fn annihilates(d: &Digraph, theta1: i64, theta2: i64, mu: i64) -> bool {
    let a = dense(d);
    let n = a.len();
    let shift = |theta: i64| -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| (0..n).map(|j| a[i][j] - if i == j { theta } else { 0 }).collect())
            .collect()
    };
    let p = matmul(&shift(theta1), &shift(theta2));
    p.iter().all(|row| row.iter().all(|&x| x == mu))
}

pub fn trace(m: &[Vec<i64>]) -> i64 {
    (0..m.len()).map(|i| m[i][i]).sum()
}

fn blocks_sets(s: &IncidenceStructure) -> Vec<BTreeSet<usize>> {
    s.blocks().iter().map(|b| b.iter().copied().collect()).collect()
}

/// Partial geometry axioms, straight from the definition.
pub fn pg_oracle(s: &IncidenceStructure) -> Option<(usize, usize, usize)> {
    let lines = blocks_sets(s);
    let pts = s.num_points();
    let kappa = lines.first()?.len();
    if kappa < 2 || lines.iter().any(|l| l.len() != kappa) {
        return None;
    }
    let on = |p: usize| lines.iter().filter(|l| l.contains(&p)).count();
    let rho = on(0);
    if rho < 2 || (0..pts).any(|p| on(p) != rho) {
        return None;
    }
    for p in 0..pts {
        for p2 in 0..pts {
            if p != p2 && lines.iter().filter(|l| l.contains(&p) && l.contains(&p2)).count() > 1 {
                return None;
            }
        }
    }
    let mut tau = BTreeSet::new();
    for p in 0..pts {
        for l in lines.iter().filter(|l| !l.contains(&p)) {
            let seen = lines
                .iter()
                .filter(|m| m.contains(&p) && !m.is_disjoint(l))
                .count();
            tau.insert(seen);
        }
    }
    match tau.into_iter().collect::<Vec<_>>()[..] {
        [t] if t >= 1 => Some((kappa, rho, t)),
        _ => None,
    }
}

/// Group divisible property: same-group pairs in no block, cross-group pairs
/// in a constant positive number of blocks, equal group sizes.
pub fn gdd_oracle(s: &IncidenceStructure) -> Option<(usize, usize, usize)> {
    let groups = s.groups()?;
    let q = groups[0].len();
    if groups.iter().any(|g| g.len() != q) || groups.len() < 2 {
        return None;
    }
    let lines = blocks_sets(s);
    let same = |a: usize, b: usize| groups.iter().any(|g| g.contains(&a) && g.contains(&b));
    let mut cross = BTreeSet::new();
    for a in 0..s.num_points() {
        for b in a + 1..s.num_points() {
            let c = lines.iter().filter(|l| l.contains(&a) && l.contains(&b)).count();
            if same(a, b) {
                if c != 0 {
                    return None;
                }
            } else {
                cross.insert(c);
            }
        }
    }
    match cross.into_iter().collect::<Vec<_>>()[..] {
        [c] if c >= 1 => Some((groups.len(), q, c)),
        _ => None,
    }
}

/// 2-design property: constant block size ≥ 2, constant replication, every
/// pair of distinct points in the same positive number of blocks.
pub fn design_oracle(s: &IncidenceStructure) -> Option<(usize, usize, usize, usize, usize)> {
    let lines = blocks_sets(s);
    let v = s.num_points();
    let k = lines.first()?.len();
    if v < 2 || k < 2 || lines.iter().any(|l| l.len() != k) {
        return None;
    }
    let reps: BTreeSet<usize> = (0..v).map(|p| lines.iter().filter(|l| l.contains(&p)).count()).collect();
    let pairs: BTreeSet<usize> = (0..v)
        .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
        .map(|(a, b)| lines.iter().filter(|l| l.contains(&a) && l.contains(&b)).count())
        .collect();
    let (reps, pairs): (Vec<_>, Vec<_>) = (reps.into_iter().collect(), pairs.into_iter().collect());
    match (&reps[..], &pairs[..]) {
        (&[r], &[lambda]) if lambda >= 1 => Some((v, lines.len(), k, r, lambda)),
        _ => None,
    }
}

/// Replaces one random block by a different random subset, or drops one, or
/// adds one. Groups are kept; parallel classes are discarded.
fn perturb(s: &IncidenceStructure, rng: &mut StdRng) -> IncidenceStructure {
    let v = s.num_points();
    for _ in 0..100 {
        let mut blocks = s.blocks().to_vec();
        match rng.gen_range(0..4) {
            0 if blocks.len() > 1 => {
                blocks.remove(rng.gen_range(0..blocks.len()));
            }
            1 => {
                let size = rng.gen_range(1..=v);
                blocks.push(random_subset(v, size, rng));
            }
            _ => {
                let i = rng.gen_range(0..blocks.len());
                let b = &mut blocks[i];
                let out = rng.gen_range(0..b.len());
                let fresh: Vec<usize> = (0..v).filter(|x| !b.contains(x)).collect();
                if fresh.is_empty() {
                    continue;
                }
                b[out] = fresh[rng.gen_range(0..fresh.len())];
                b.sort_unstable();
            }
        }
        let groups = s.groups().map(|g| g.to_vec());
        if let Ok(t) = IncidenceStructure::new(v, blocks, groups, None) {
            return t;
        }
    }
    s.clone()
}

fn random_subset(v: usize, size: usize, rng: &mut StdRng) -> Vec<usize> {
    let mut all: Vec<usize> = (0..v).collect();
    for i in 0..size {
        let j = rng.gen_range(i..v);
        all.swap(i, j);
    }
    let mut b = all[..size].to_vec();
    b.sort_unstable();
    b
}

fn random_blocks(rng: &mut StdRng) -> IncidenceStructure {
    let v = rng.gen_range(3..=7);
    let k = rng.gen_range(2..v);
    loop {
        let b = rng.gen_range(1..=8);
        let mut blocks: Vec<Vec<usize>> = (0..b).map(|_| random_subset(v, k, rng)).collect();
        blocks.sort();
        blocks.dedup();
        if let Ok(s) = IncidenceStructure::from_blocks(v, blocks) {
            return s;
        }
    }
}

/// One small structure drawn from the seed: partitioned sets, group divisible
/// designs, truncated affine planes, the Fano plane, a hyperplane design or
/// random blocks — perturbed about half of the time.
pub fn random_structure(seed: u64) -> IncidenceStructure {
    let mut rng = StdRng::seed_from_u64(seed);
    let base = match rng.gen_range(0..6) {
        0 => build_partition_structure(rng.gen_range(1..=3), rng.gen_range(2..=4)).unwrap(),
        1 => build_gdd(rng.gen_range(2..=3), rng.gen_range(2..=3)).unwrap(),
        2 => {
            let q = [2, 3, 4][rng.gen_range(0..3)];
            let l = rng.gen_range(1..=q + 1);
            restrict_parallel_classes(&build_affine_plane(q).unwrap(), l).unwrap()
        }
        3 => build_fano(),
        4 => {
            let hd = build_hyperplane_design(2, 3).unwrap();
            restrict_parallel_classes(&hd, rng.gen_range(1..=7)).unwrap()
        }
        _ => random_blocks(&mut rng),
    };
    if rng.gen_bool(0.5) {
        perturb(&base, &mut rng)
    } else {
        base
    }
}
