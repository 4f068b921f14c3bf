//! Enumerates family instances up to an order, builds and verifies each one,
//! and renders the result as CSV or an aligned table.

use std::str::FromStr;

use crate::dsrg::{build_family, expected_params, spectrum, verify_dsrg, DsrgParams, FamilySpec, Spectrum};
use crate::ffield::is_prime_power;
use crate::DEFAULT_BLOCK_BUDGET;

pub const DEFAULT_MAX_ORDER: u64 = 110;
pub const DEFAULT_MULTIPLES: u64 = 13;
/// Largest order the catalog will build; matches the verification cap.
pub const MAX_CATALOG_ORDER: u64 = crate::dsrg::MAX_VERIFY_ORDER as u64;

pub const CSV_HEADER: &str = "v,k,t,lambda,mu,family,family_params,verified,theta1,theta2,m1,m2";

/// Marker appended to `family_params` for rows that are evaluated from the
/// closed form only because no structure with those parameters exists here.
pub const FORMULA_ONLY: &str = "formula-only";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyKind {
    Gdd,
    PgAntiflag,
    ApPencils,
    Transversal,
    Partition,
    PartitionSpiked,
    AffineResolvable,
    TwoDesignBack,
    TwoDesignBackLoopy,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::Gdd,
        FamilyKind::PgAntiflag,
        FamilyKind::ApPencils,
        FamilyKind::Transversal,
        FamilyKind::Partition,
        FamilyKind::PartitionSpiked,
        FamilyKind::AffineResolvable,
        FamilyKind::TwoDesignBack,
        FamilyKind::TwoDesignBackLoopy,
    ];

    /// Every family except `pg-antiflag`, whose constructible instances all
    /// duplicate `gdd` or `ap-pencils` rows.
    pub fn defaults() -> Vec<FamilyKind> {
        Self::ALL.into_iter().filter(|&f| f != FamilyKind::PgAntiflag).collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Gdd => "gdd",
            FamilyKind::PgAntiflag => "pg-antiflag",
            FamilyKind::ApPencils => "ap-pencils",
            FamilyKind::Transversal => "transversal",
            FamilyKind::Partition => "partition",
            FamilyKind::PartitionSpiked => "partition-spiked",
            FamilyKind::AffineResolvable => "affine-resolvable",
            FamilyKind::TwoDesignBack => "2design-back",
            FamilyKind::TwoDesignBackLoopy => "2design-back-loopy",
        }
    }
}

impl FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|f| f.name()).collect();
                format!("unknown family {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub struct CatalogOptions {
    pub max_order: u64,
    pub families: Vec<FamilyKind>,
    /// Largest Duval multiple applied to `gdd` instances.
    pub multiples: u64,
    pub block_budget: u64,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
            families: FamilyKind::defaults(),
            multiples: DEFAULT_MULTIPLES,
            block_budget: DEFAULT_BLOCK_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogRow {
    /// Verified parameters when `verified`, otherwise the closed form.
    pub params: DsrgParams,
    pub family: FamilySpec,
    pub formula_only: bool,
    pub verified: bool,
    pub spectrum: Option<Spectrum>,
    /// Why a constructible row failed to verify.
    pub error: Option<String>,
}

impl CatalogRow {
    pub fn family_params(&self) -> String {
        let p = self.family.params_string();
        if self.formula_only {
            format!("{p};{FORMULA_ONLY}")
        } else {
            p
        }
    }

    fn sort_key(&self) -> (u64, &'static str, FamilySpec) {
        (self.params.v, self.family.name(), self.family)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("max order {0} exceeds {MAX_CATALOG_ORDER}")]
    OrderTooLarge(u64),
}

/// Hyperplane design parameters `(s, n)` with `v(b - r) = s^n (s^n - 1) <= max_order`.
fn hyperplane_designs(max_order: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for s in (2..).take_while(|&s: &u64| s * s * (s * s - 1) <= max_order) {
        if !is_prime_power(s as usize) {
            continue;
        }
        let mut sn = s * s;
        let mut n = 2;
        while sn.saturating_mul(sn - 1) <= max_order {
            out.push((s, n));
            n += 1;
            sn = sn.saturating_mul(s);
        }
    }
    out
}

/// `2-(v, b, k, r, λ)` of the hyperplanes of GF(s)^n.
fn hyperplane_design_params(s: u64, n: u32) -> [u64; 5] {
    let v = s.pow(n);
    let r = (v - 1) / (s - 1);
    let lambda = (s.pow(n - 1) - 1) / (s - 1);
    [v, s * r, s.pow(n - 1), r, lambda]
}

/// Every instance of `kind` with order at most `opts.max_order`, and whether
/// it is formula-only.
fn instances(kind: FamilyKind, opts: &CatalogOptions) -> Vec<(FamilySpec, bool)> {
    let n_max = opts.max_order;
    let fits = |spec: &FamilySpec| expected_params(spec).is_ok_and(|p| p.v <= n_max);
    let mut out = Vec::new();
    let mut push = |spec: FamilySpec, formula_only: bool| {
        if fits(&spec) {
            out.push((spec, formula_only));
        }
    };
    // Every family has v >= 2 * (first parameter), so these bounds are loose but finite.
    match kind {
        FamilyKind::Gdd => {
            for l in (2..).take_while(|&l| l * 4 <= n_max) {
                for q in (2..).take_while(|&q: &u64| q.checked_pow(l as u32).is_some_and(|ql| ql <= n_max)) {
                    for m in 1..=opts.multiples.max(1) {
                        push(FamilySpec::Gdd { l, q, m }, false);
                    }
                }
            }
        }
        FamilyKind::PgAntiflag => {
            for rho in (2..).take_while(|&r| 2 * r * r <= n_max) {
                push(FamilySpec::PgAntiflag { kappa: 2, rho, tau: 1 }, false);
            }
            for q in (3..).take_while(|&q| 2 * q * q <= n_max).filter(|&q| is_prime_power(q as usize)) {
                for l in 2..=q + 1 {
                    push(FamilySpec::PgAntiflag { kappa: q, rho: l, tau: l - 1 }, false);
                }
            }
        }
        FamilyKind::ApPencils => {
            for q in (2..).take_while(|&q| 2 * q * q <= n_max).filter(|&q| is_prime_power(q as usize)) {
                for l in 2..=q + 1 {
                    push(FamilySpec::ApPencils { q, l }, false);
                }
            }
            // AG(2,2) has three pencils, but these orders fit the closed form.
            for l in 4..=8 {
                push(FamilySpec::ApPencils { q: 2, l }, true);
            }
        }
        FamilyKind::Transversal => {
            for q in (2..).take_while(|&q| q * q <= n_max).filter(|&q| is_prime_power(q as usize)) {
                push(FamilySpec::Transversal { q }, false);
            }
        }
        FamilyKind::Partition | FamilyKind::PartitionSpiked => {
            for l in (3..).take_while(|&l| l * (l - 1) <= n_max) {
                for q in (1..).take_while(|&q| q * l * (l - 1) <= n_max) {
                    let spec = if kind == FamilyKind::Partition {
                        FamilySpec::Partition { q, l }
                    } else {
                        FamilySpec::PartitionSpiked { q, l }
                    };
                    push(spec, false);
                }
            }
        }
        FamilyKind::AffineResolvable => {
            // n = 2 is AG(2, s), already listed as ap-pencils.
            for s in (2..).take_while(|&s| 2 * s * s <= n_max).filter(|&s| is_prime_power(s as usize)) {
                let mut m = s;
                let mut sn = s * s * s;
                while 2 * m * s * s * (s - 1) <= n_max {
                    let classes = (sn - 1) / (s - 1);
                    for l in 2..=classes {
                        push(FamilySpec::AffineResolvable { m, s, l }, false);
                    }
                    m *= s;
                    sn *= s;
                }
            }
        }
        FamilyKind::TwoDesignBack | FamilyKind::TwoDesignBackLoopy => {
            let mut designs = vec![[7, 7, 3, 3, 1]];
            designs.extend(
                hyperplane_designs(n_max)
                    .into_iter()
                    .map(|(s, n)| hyperplane_design_params(s, n as u32)),
            );
            for [v, b, k, r, lambda] in designs {
                let spec = if kind == FamilyKind::TwoDesignBack {
                    FamilySpec::TwoDesignBack { v, b, k, r, lambda }
                } else {
                    FamilySpec::TwoDesignBackLoopy { v, b, k, r, lambda }
                };
                push(spec, false);
            }
        }
    }
    out
}

fn build_row(spec: FamilySpec, formula_only: bool, block_budget: u64) -> CatalogRow {
    let expected = expected_params(&spec).expect("enumerated specs have valid closed forms");
    let outcome = if formula_only {
        Err(None)
    } else {
        build_family(&spec, block_budget)
            .and_then(|inst| verify_dsrg(&inst.graph))
            .map_err(|e| Some(e.to_string()))
            .and_then(|got| {
                if got == expected {
                    Ok(got)
                } else {
                    Err(Some(format!("built {got}, closed form {expected}")))
                }
            })
    };
    let (params, verified, error) = match outcome {
        Ok(p) => (p, true, None),
        Err(e) => (expected, false, e),
    };
    CatalogRow {
        params,
        family: spec,
        formula_only,
        verified,
        spectrum: spectrum(&params).ok(),
        error,
    }
}

/// Builds and verifies every requested instance, sorted by order, family
/// name, then family parameters.
pub fn build_catalog(opts: &CatalogOptions) -> Result<Vec<CatalogRow>, CatalogError> {
    if opts.max_order > MAX_CATALOG_ORDER {
        return Err(CatalogError::OrderTooLarge(opts.max_order));
    }
    let mut kinds = opts.families.clone();
    kinds.sort();
    kinds.dedup();
    let specs: Vec<(FamilySpec, bool)> = kinds.into_iter().flat_map(|k| instances(k, opts)).collect();

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(specs.len().max(1));
    let chunk = specs.len().div_ceil(workers).max(1);
    let mut rows: Vec<CatalogRow> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|&(spec, formula_only)| build_row(spec, formula_only, opts.block_budget))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("catalog worker panicked"))
            .collect()
    });
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(rows)
}

fn spectrum_fields(s: &Option<Spectrum>) -> [String; 4] {
    match s {
        Some(s) => [s.theta1.to_string(), s.theta2.to_string(), s.m1.to_string(), s.m2.to_string()],
        None => Default::default(),
    }
}

pub fn to_csv(rows: &[CatalogRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let p = &r.params;
        let [t1, t2, m1, m2] = spectrum_fields(&r.spectrum);
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{t1},{t2},{m1},{m2}\n",
            p.v,
            p.k,
            p.t,
            p.lambda,
            p.mu,
            r.family.name(),
            r.family_params(),
            r.verified
        ));
    }
    out
}

pub fn to_text(rows: &[CatalogRow]) -> String {
    let header = ["(v,k,t,lambda,mu)", "family", "params", "verified", "spectrum"];
    let body: Vec<[String; 5]> = rows
        .iter()
        .map(|r| {
            [
                r.params.to_string(),
                r.family.name().to_string(),
                r.family_params(),
                if r.verified { "yes".into() } else { "no".into() },
                r.spectrum.map_or_else(|| "-".into(), |s| s.to_string()),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: [&str; 5]| {
        let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(header);
    for row in &body {
        line([&row[0], &row[1], &row[2], &row[3], &row[4]]);
    }
    out
}
