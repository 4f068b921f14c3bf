//! Named construction families: their closed-form parameters and how to
//! build a representative graph.

use crate::ffield::{is_prime_power, prime_power};
use crate::incidence::{
    build_affine_plane, build_fano, build_gdd_with_budget, build_hyperplane_design,
    build_partition_structure, restrict_parallel_classes, verify_2design, IncidenceStructure,
};

use super::{
    build_antiflag_backward, build_antiflag_backward_loopy, build_antiflag_forward,
    build_partition_spiked, duval_multiple, Digraph, DsrgError, DsrgParams,
};

/// One construction family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilySpec {
    /// Forward anti-flag graph of the transversal GDD on `l` groups of size
    /// `q`, blown up by `m`.
    Gdd { l: u64, q: u64, m: u64 },
    /// Forward anti-flag graph of a partial geometry pg(κ, ρ, τ).
    PgAntiflag { kappa: u64, rho: u64, tau: u64 },
    /// Forward anti-flag graph of `l` parallel classes of AG(2, q).
    ApPencils { q: u64, l: u64 },
    /// `ApPencils` with all but one class, i.e. a transversal design TD(q, q).
    Transversal { q: u64 },
    /// Forward anti-flag graph of `l` disjoint `q`-sets.
    Partition { q: u64, l: u64 },
    /// `Partition` with the extra same-block edges.
    PartitionSpiked { q: u64, l: u64 },
    /// `l` parallel classes of an affine resolvable design with `s` blocks
    /// per class and non-parallel intersection `m`.
    AffineResolvable { m: u64, s: u64, l: u64 },
    /// Backward anti-flag graph of a 2-(v, b, k, r, λ) design.
    TwoDesignBack { v: u64, b: u64, k: u64, r: u64, lambda: u64 },
    /// Backward anti-flag graph with the same-point edges added.
    TwoDesignBackLoopy { v: u64, b: u64, k: u64, r: u64, lambda: u64 },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Gdd { .. } => "gdd",
            FamilySpec::PgAntiflag { .. } => "pg-antiflag",
            FamilySpec::ApPencils { .. } => "ap-pencils",
            FamilySpec::Transversal { .. } => "transversal",
            FamilySpec::Partition { .. } => "partition",
            FamilySpec::PartitionSpiked { .. } => "partition-spiked",
            FamilySpec::AffineResolvable { .. } => "affine-resolvable",
            FamilySpec::TwoDesignBack { .. } => "2design-back",
            FamilySpec::TwoDesignBackLoopy { .. } => "2design-back-loopy",
        }
    }

    /// Parameters as `key=value` pairs joined by `;` (safe inside a CSV field).
    pub fn params_string(&self) -> String {
        match *self {
            FamilySpec::Gdd { l, q, m } => format!("l={l};q={q};m={m}"),
            FamilySpec::PgAntiflag { kappa, rho, tau } => {
                format!("kappa={kappa};rho={rho};tau={tau}")
            }
            FamilySpec::ApPencils { q, l } => format!("q={q};l={l}"),
            FamilySpec::Transversal { q } => format!("q={q}"),
            FamilySpec::Partition { q, l } | FamilySpec::PartitionSpiked { q, l } => {
                format!("q={q};l={l}")
            }
            FamilySpec::AffineResolvable { m, s, l } => format!("m={m};s={s};l={l}"),
            FamilySpec::TwoDesignBack { v, b, k, r, lambda }
            | FamilySpec::TwoDesignBackLoopy { v, b, k, r, lambda } => {
                format!("v={v};b={b};k={k};r={r};lambda={lambda}")
            }
        }
    }

    /// Checks the hypotheses the construction needs.
    pub fn validate(&self) -> Result<(), DsrgError> {
        let bad = |msg: &str| Err(DsrgError::InvalidParams(format!("{self}: {msg}")));
        match *self {
            FamilySpec::Gdd { l, q, m } if l < 2 || q < 2 || m < 1 => bad("need l >= 2, q >= 2, m >= 1"),
            FamilySpec::PgAntiflag { kappa, rho, tau }
                if kappa < 2 || rho < 2 || tau < 1 || tau > kappa.min(rho) =>
            {
                bad("need kappa, rho >= 2 and 1 <= tau <= min(kappa, rho)")
            }
            FamilySpec::ApPencils { q, l } if q < 2 || l < 2 => bad("need q >= 2, l >= 2"),
            FamilySpec::Transversal { q } if q < 2 => bad("need q >= 2"),
            FamilySpec::Partition { q, l } | FamilySpec::PartitionSpiked { q, l } if q < 1 || l < 3 => {
                bad("need q >= 1, l >= 3")
            }
            FamilySpec::AffineResolvable { m, s, l } if m < 1 || s < 2 || l < 2 => {
                bad("need m >= 1, s >= 2, l >= 2")
            }
            FamilySpec::TwoDesignBack { v, b, k, r, lambda }
            | FamilySpec::TwoDesignBackLoopy { v, b, k, r, lambda } => {
                let (v, b, k, r, lam) = (v as u128, b as u128, k as u128, r as u128, lambda as u128);
                if !(k >= 2 && v > k && lam >= 1 && r * (k - 1) == lam * (v - 1) && b * k == v * r) {
                    return bad("not the parameters of a 2-design");
                }
                if matches!(self, FamilySpec::TwoDesignBackLoopy { .. }) && b + lam <= 2 * r {
                    return bad("need b + lambda > 2r");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.name(), self.params_string())
    }
}

/// Checked arithmetic in `u128` that reports the family on overflow.
struct Calc<'a>(&'a FamilySpec);

impl Calc<'_> {
    fn err(&self) -> DsrgError {
        DsrgError::Overflow(self.0.to_string())
    }

    fn prod(&self, factors: &[u128]) -> Result<u128, DsrgError> {
        factors
            .iter()
            .try_fold(1u128, |acc, &x| acc.checked_mul(x))
            .ok_or_else(|| self.err())
    }

    fn pow(&self, base: u64, exp: u64) -> Result<u128, DsrgError> {
        let exp = u32::try_from(exp).map_err(|_| self.err())?;
        (base as u128).checked_pow(exp).ok_or_else(|| self.err())
    }

    fn add(&self, a: u128, b: u128) -> Result<u128, DsrgError> {
        a.checked_add(b).ok_or_else(|| self.err())
    }

    fn div_exact(&self, a: u128, b: u128) -> Result<u128, DsrgError> {
        if b == 0 || !a.is_multiple_of(b) {
            return Err(DsrgError::InvalidParams(format!("{}: {a}/{b} is not an integer", self.0)));
        }
        Ok(a / b)
    }

    fn params(&self, v: u128, k: u128, t: u128, lambda: u128, mu: u128) -> Result<DsrgParams, DsrgError> {
        let narrow = |x: u128| u64::try_from(x).map_err(|_| self.err());
        DsrgParams::new(narrow(v)?, narrow(k)?, narrow(t)?, narrow(lambda)?, narrow(mu)?)
    }
}

/// Evaluates the family's closed-form parameters exactly.
pub fn expected_params(f: &FamilySpec) -> Result<DsrgParams, DsrgError> {
    f.validate()?;
    let c = Calc(f);
    let w = |x: u64| x as u128;
    match *f {
        FamilySpec::Gdd { l, q, m } => {
            let (l, q, m, ql2) = (w(l), w(q), w(m), c.pow(q, l - 2)?);
            let t = c.prod(&[m, ql2, c.add(c.prod(&[l, q - 1])?, 1)?])?;
            c.params(
                c.prod(&[m, l, ql2, q, q, q - 1])?,
                c.prod(&[m, l, ql2, q, q - 1])?,
                t,
                c.prod(&[m, ql2, l - 1, q - 1])?,
                t,
            )
        }
        FamilySpec::PgAntiflag { kappa, rho, tau } => {
            let (kappa, rho, tau) = (w(kappa), w(rho), w(tau));
            let k = c.div_exact(c.prod(&[kappa, rho, kappa - 1, rho - 1])?, tau)?;
            let extra = c.div_exact(c.prod(&[k, kappa - 1, rho - 1])?, tau)?;
            let t = kappa * rho - tau;
            c.params(c.add(k, extra)?, k, t, (kappa - 1) * (rho - 1), t)
        }
        FamilySpec::ApPencils { q, l } => ap_pencils(&c, w(q), w(l), 1),
        FamilySpec::Transversal { q } => ap_pencils(&c, w(q), w(q), 1),
        FamilySpec::AffineResolvable { m, s, l } => ap_pencils(&c, w(s), w(l), w(m)),
        FamilySpec::Partition { q, l } => {
            let (q, l) = (w(q), w(l));
            c.params(c.prod(&[q, l, l - 1])?, c.prod(&[q, l - 1])?, q, 0, q)
        }
        FamilySpec::PartitionSpiked { q, l } => {
            let (q, l) = (w(q), w(l));
            c.params(
                c.prod(&[q, l, l - 1])?,
                c.prod(&[2, q, l - 1])? - 1,
                c.prod(&[q, l])? - 1,
                c.prod(&[q, l])? - 2,
                c.prod(&[2, q])?,
            )
        }
        FamilySpec::TwoDesignBack { v, b, k, r, lambda } => {
            let (v, k, br, rl) = (w(v), w(k), w(b - r), w(r - lambda));
            let t = c.prod(&[k, rl])?;
            c.params(c.prod(&[v, br])?, c.prod(&[k, br])?, t, c.prod(&[k - 1, rl])?, t)
        }
        FamilySpec::TwoDesignBackLoopy { v, b, k, r, lambda } => {
            let (v, k, br, rl) = (w(v), w(k), w(b - r), w(r - lambda));
            let kb = c.prod(&[k, br])?;
            let krl = c.prod(&[k, rl])?;
            c.params(
                c.prod(&[v, br])?,
                c.add(kb, br - 1)?,
                c.add(krl, br - 1)?,
                c.add(krl, br - 2)?,
                c.prod(&[k + 1, rl])?,
            )
        }
    }
}

/// `m (l s^2 (s-1), l s (s-1), ls-l+1, (l-1)(s-1), ls-l+1)`.
fn ap_pencils(c: &Calc<'_>, s: u128, l: u128, m: u128) -> Result<DsrgParams, DsrgError> {
    let t = c.prod(&[m, c.add(c.prod(&[l, s - 1])?, 1)?])?;
    c.params(
        c.prod(&[m, l, s, s, s - 1])?,
        c.prod(&[m, l, s, s - 1])?,
        t,
        c.prod(&[m, l - 1, s - 1])?,
        t,
    )
}

/// A built representative of a family: the incidence structure, the anti-flag
/// graph on it, and the graph after any Duval blow-up.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub spec: FamilySpec,
    pub structure: IncidenceStructure,
    pub base: Digraph,
    pub graph: Digraph,
}

/// Builds the family's graph, or [`DsrgError::NotConstructible`] when no
/// construction for those parameters is implemented.
pub fn build_family(spec: &FamilySpec, block_budget: u64) -> Result<FamilyInstance, DsrgError> {
    spec.validate()?;
    let not_constructible = || DsrgError::NotConstructible(spec.to_string());
    let us = |x: u64| usize::try_from(x).map_err(|_| not_constructible());
    let mut multiple = 1;

    let (structure, base) = match *spec {
        FamilySpec::Gdd { l, q, m } => {
            multiple = us(m)?;
            let s = build_gdd_with_budget(us(l)?, us(q)?, block_budget)?;
            let g = build_antiflag_forward(&s)?;
            (s, g)
        }
        FamilySpec::PgAntiflag { kappa, rho, tau } => {
            let s = if kappa == 2 && tau == 1 {
                // The vertex-edge structure of K_{ρ,ρ} is pg(2, ρ, 1).
                build_gdd_with_budget(2, us(rho)?, block_budget)?
            } else if tau + 1 == rho && rho <= kappa + 1 {
                pencils(us(kappa)?, us(rho)?).ok_or_else(not_constructible)??
            } else {
                return Err(not_constructible());
            };
            let g = build_antiflag_forward(&s)?;
            (s, g)
        }
        FamilySpec::ApPencils { q, l } => {
            let s = pencils(us(q)?, us(l)?).ok_or_else(not_constructible)??;
            let g = build_antiflag_forward(&s)?;
            (s, g)
        }
        FamilySpec::Transversal { q } => {
            let s = pencils(us(q)?, us(q)?).ok_or_else(not_constructible)??;
            let g = build_antiflag_forward(&s)?;
            (s, g)
        }
        FamilySpec::Partition { q, l } => {
            let s = build_partition_structure(us(q)?, us(l)?)?;
            let g = build_antiflag_forward(&s)?;
            (s, g)
        }
        FamilySpec::PartitionSpiked { q, l } => {
            let s = build_partition_structure(us(q)?, us(l)?)?;
            let g = build_partition_spiked(&s)?;
            (s, g)
        }
        FamilySpec::AffineResolvable { m, s, l } => {
            let n = exponent_of(m, s).ok_or_else(not_constructible)? + 2;
            if !is_prime_power(us(s)?) {
                return Err(not_constructible());
            }
            let design = build_hyperplane_design(us(s)?, us(n)?)?;
            let classes = design.parallel_classes().map_or(0, |c| c.len());
            if us(l)? > classes {
                return Err(not_constructible());
            }
            let st = restrict_parallel_classes(&design, us(l)?)?;
            let g = build_antiflag_forward(&st)?;
            (st, g)
        }
        FamilySpec::TwoDesignBack { v, b, k, r, lambda } => {
            let s = find_design([v, b, k, r, lambda]).ok_or_else(not_constructible)?;
            let g = build_antiflag_backward(&s)?;
            (s, g)
        }
        FamilySpec::TwoDesignBackLoopy { v, b, k, r, lambda } => {
            let s = find_design([v, b, k, r, lambda]).ok_or_else(not_constructible)?;
            let g = build_antiflag_backward_loopy(&s)?;
            (s, g)
        }
    };
    let graph = if multiple > 1 { duval_multiple(&base, multiple)? } else { base.clone() };
    Ok(FamilyInstance {
        spec: *spec,
        structure,
        base,
        graph,
    })
}

/// The first `l` parallel classes of AG(2, q), when AG(2, q) is available.
fn pencils(q: usize, l: usize) -> Option<Result<IncidenceStructure, DsrgError>> {
    if !is_prime_power(q) || q > 64 || l > q + 1 {
        return None;
    }
    Some(
        build_affine_plane(q)
            .and_then(|ap| restrict_parallel_classes(&ap, l))
            .map_err(DsrgError::from),
    )
}

/// `e` with `base^e = x`.
fn exponent_of(x: u64, base: u64) -> Option<u64> {
    let mut acc = 1u64;
    for e in 0..64 {
        if acc == x {
            return Some(e);
        }
        acc = acc.checked_mul(base)?;
    }
    None
}

/// A design with exactly these parameters among the Fano plane and the
/// hyperplane designs AG_{n-1}(n, q).
fn find_design(params: [u64; 5]) -> Option<IncidenceStructure> {
    let [v, b, k, r, lambda] = params;
    let candidate = if params == [7, 7, 3, 3, 1] {
        build_fano()
    } else {
        if k == 0 || v % k != 0 {
            return None;
        }
        let q = v / k;
        prime_power(usize::try_from(q).ok()?)?;
        let n = exponent_of(v, q)?;
        if n < 2 {
            return None;
        }
        build_hyperplane_design(q as usize, n as usize).ok()?
    };
    let d = verify_2design(&candidate).ok()?;
    let found = [d.v_pts, d.b_blocks, d.k_blocksize, d.r_replication, d.lambda_pair].map(|x| x as u64);
    (found == [v, b, k, r, lambda]).then_some(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsrg::verify_dsrg;
    use crate::DEFAULT_BLOCK_BUDGET;

    fn p(v: u64, k: u64, t: u64, lambda: u64, mu: u64) -> DsrgParams {
        DsrgParams { v, k, t, lambda, mu }
    }

    #[test]
    fn closed_forms() {
        assert_eq!(expected_params(&FamilySpec::Gdd { l: 2, q: 4, m: 1 }).unwrap(), p(96, 24, 7, 3, 7));
        assert_eq!(expected_params(&FamilySpec::Gdd { l: 2, q: 3, m: 3 }).unwrap(), p(108, 36, 15, 6, 15));
        assert_eq!(
            expected_params(&FamilySpec::PgAntiflag { kappa: 3, rho: 2, tau: 1 }).unwrap(),
            p(36, 12, 5, 2, 5)
        );
        assert_eq!(expected_params(&FamilySpec::ApPencils { q: 3, l: 4 }).unwrap(), p(72, 24, 9, 6, 9));
        assert_eq!(expected_params(&FamilySpec::ApPencils { q: 2, l: 8 }).unwrap(), p(32, 16, 9, 7, 9));
        assert_eq!(expected_params(&FamilySpec::Transversal { q: 3 }).unwrap(), p(54, 18, 7, 4, 7));
        assert_eq!(
            expected_params(&FamilySpec::AffineResolvable { m: 2, s: 2, l: 7 }).unwrap(),
            p(56, 28, 16, 12, 16)
        );
        let fano = FamilySpec::TwoDesignBackLoopy { v: 7, b: 7, k: 3, r: 3, lambda: 1 };
        assert_eq!(expected_params(&fano).unwrap(), p(28, 15, 9, 8, 8));
    }

    #[test]
    fn overflow_is_reported() {
        let e = expected_params(&FamilySpec::Gdd { l: 40, q: 1000, m: 1 }).unwrap_err();
        assert!(matches!(e, DsrgError::Overflow(_)), "{e}");
        let e = expected_params(&FamilySpec::Gdd { l: 2, q: u64::MAX, m: u64::MAX }).unwrap_err();
        assert!(matches!(e, DsrgError::Overflow(_)));
    }

    #[test]
    fn hypotheses_are_checked() {
        assert!(expected_params(&FamilySpec::Partition { q: 2, l: 2 }).is_err());
        assert!(expected_params(&FamilySpec::PgAntiflag { kappa: 3, rho: 2, tau: 3 }).is_err());
        assert!(expected_params(&FamilySpec::TwoDesignBack { v: 7, b: 7, k: 3, r: 3, lambda: 2 }).is_err());
        // AG(2,3): b + λ = 13 > 8 = 2r, allowed; the dual-like 2-(4,6,2,3,1) has 7 > 6.
        let ag = FamilySpec::TwoDesignBackLoopy { v: 9, b: 12, k: 3, r: 4, lambda: 1 };
        assert!(expected_params(&ag).is_ok());
    }

    #[test]
    fn built_graphs_match_their_formulas() {
        let specs = [
            FamilySpec::Gdd { l: 2, q: 2, m: 2 },
            FamilySpec::PgAntiflag { kappa: 2, rho: 3, tau: 1 },
            FamilySpec::PgAntiflag { kappa: 3, rho: 3, tau: 2 },
            FamilySpec::ApPencils { q: 2, l: 3 },
            FamilySpec::Transversal { q: 2 },
            FamilySpec::Partition { q: 2, l: 4 },
            FamilySpec::PartitionSpiked { q: 1, l: 4 },
            FamilySpec::AffineResolvable { m: 2, s: 2, l: 3 },
            FamilySpec::AffineResolvable { m: 1, s: 3, l: 2 },
            FamilySpec::TwoDesignBack { v: 9, b: 12, k: 3, r: 4, lambda: 1 },
            FamilySpec::TwoDesignBackLoopy { v: 8, b: 14, k: 4, r: 7, lambda: 3 },
        ];
        for spec in specs {
            let inst = build_family(&spec, DEFAULT_BLOCK_BUDGET).unwrap();
            assert_eq!(verify_dsrg(&inst.graph).unwrap(), expected_params(&spec).unwrap(), "{spec}");
        }
    }

    #[test]
    fn unconstructible_instances() {
        for spec in [
            FamilySpec::ApPencils { q: 2, l: 4 },
            FamilySpec::ApPencils { q: 6, l: 2 },
            FamilySpec::PgAntiflag { kappa: 5, rho: 3, tau: 1 },
            FamilySpec::AffineResolvable { m: 3, s: 2, l: 2 },
        ] {
            assert!(
                matches!(build_family(&spec, DEFAULT_BLOCK_BUDGET), Err(DsrgError::NotConstructible(_))),
                "{spec}"
            );
        }
    }

    #[test]
    fn names_and_ordering() {
        let g = FamilySpec::Gdd { l: 2, q: 3, m: 1 };
        assert_eq!(g.to_string(), "gdd(l=2;q=3;m=1)");
        assert!(g < FamilySpec::Gdd { l: 2, q: 3, m: 2 });
        assert!(g < FamilySpec::Partition { q: 1, l: 3 });
    }
}
