use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dsrg::catalog::{build_catalog, to_csv, to_text, CatalogOptions, FamilyKind};
use dsrg::dsrg::{build_family, FamilyInstance};
use dsrg::iso::{are_isomorphic, IsoOutcome};
use dsrg::{
    build_antiflag_backward, build_antiflag_backward_loopy, build_antiflag_forward,
    build_partition_spiked, expected_params, feasibility, spectrum, verify_dsrg, Digraph,
    DsrgParams, FamilySpec, IncidenceStructure, DEFAULT_BLOCK_BUDGET, DEFAULT_NODE_BUDGET,
};

/// Directed strongly regular graphs from anti-flags of incidence structures.
#[derive(Parser)]
#[command(name = "dsrg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family instance (or a graph on a structure file) and verify it.
    Build(BuildArgs),
    /// Verify that a dgr/1 or edge-list file is a DSRG.
    Verify {
        path: PathBuf,
    },
    /// Eigenvalues and multiplicities of a parameter set.
    Spectrum(ParamArgs),
    /// Necessary conditions on a parameter set, one line per check.
    Feasibility(ParamArgs),
    /// Search for an isomorphism between two digraph files.
    Iso {
        left: PathBuf,
        right: PathBuf,
        /// Search-tree node budget (default: DSRG_BUDGET or 1000000).
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Build and verify every family instance up to an order.
    Catalog(CatalogArgs),
}

#[derive(Args)]
struct ParamArgs {
    v: u64,
    k: u64,
    t: u64,
    lambda: u64,
    mu: u64,
}

impl ParamArgs {
    fn params(&self) -> DsrgParams {
        DsrgParams {
            v: self.v,
            k: self.k,
            t: self.t,
            lambda: self.lambda,
            mu: self.mu,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Forward,
    Backward,
    BackwardLoopy,
    Spiked,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dgr,
    Edges,
}

#[derive(Args)]
struct BuildArgs {
    /// Construction family.
    #[arg(long, conflicts_with = "structure")]
    family: Option<FamilyKind>,
    /// Build from a structure JSON file instead of a family.
    #[arg(long, requires = "rule")]
    structure: Option<PathBuf>,
    /// Adjacency rule for --structure.
    #[arg(long, value_enum)]
    rule: Option<Rule>,
    #[arg(long)]
    l: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    kappa: Option<u64>,
    #[arg(long)]
    rho: Option<u64>,
    #[arg(long)]
    tau: Option<u64>,
    #[arg(long)]
    v: Option<u64>,
    #[arg(long)]
    b: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    lambda: Option<u64>,
    /// Write the digraph here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dgr")]
    format: GraphFormat,
    /// Write the incidence structure JSON here.
    #[arg(long)]
    structure_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct CatalogArgs {
    #[arg(long, default_value_t = dsrg::catalog::DEFAULT_MAX_ORDER)]
    max_order: u64,
    /// Comma-separated family names (default: all but pg-antiflag).
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<FamilyKind>>,
    /// Largest Duval multiple for gdd instances.
    #[arg(long, default_value_t = dsrg::catalog::DEFAULT_MULTIPLES)]
    multiples: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
    /// Also write the CSV table here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

type CliResult = Result<ExitCode, String>;

fn budget_from_env(default: u64) -> Result<u64, String> {
    match std::env::var("DSRG_BUDGET") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("DSRG_BUDGET must be a non-negative integer, got {s:?}")),
        Err(_) => Ok(default),
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn family_spec(a: &BuildArgs, kind: FamilyKind) -> Result<FamilySpec, String> {
    let need = |x: Option<u64>, flag: &str| x.ok_or_else(|| format!("--family {} needs --{flag}", kind.name()));
    Ok(match kind {
        FamilyKind::Gdd => FamilySpec::Gdd {
            l: need(a.l, "l")?,
            q: need(a.q, "q")?,
            m: a.m.unwrap_or(1),
        },
        FamilyKind::PgAntiflag => FamilySpec::PgAntiflag {
            kappa: need(a.kappa, "kappa")?,
            rho: need(a.rho, "rho")?,
            tau: need(a.tau, "tau")?,
        },
        FamilyKind::ApPencils => FamilySpec::ApPencils {
            q: need(a.q, "q")?,
            l: need(a.l, "l")?,
        },
        FamilyKind::Transversal => FamilySpec::Transversal { q: need(a.q, "q")? },
        FamilyKind::Partition => FamilySpec::Partition {
            q: need(a.q, "q")?,
            l: need(a.l, "l")?,
        },
        FamilyKind::PartitionSpiked => FamilySpec::PartitionSpiked {
            q: need(a.q, "q")?,
            l: need(a.l, "l")?,
        },
        FamilyKind::AffineResolvable => FamilySpec::AffineResolvable {
            m: need(a.m, "m")?,
            s: need(a.s, "s")?,
            l: need(a.l, "l")?,
        },
        FamilyKind::TwoDesignBack | FamilyKind::TwoDesignBackLoopy => {
            let (v, b, k, r, lambda) = (
                need(a.v, "v")?,
                need(a.b, "b")?,
                need(a.k, "k")?,
                need(a.r, "r")?,
                need(a.lambda, "lambda")?,
            );
            if kind == FamilyKind::TwoDesignBack {
                FamilySpec::TwoDesignBack { v, b, k, r, lambda }
            } else {
                FamilySpec::TwoDesignBackLoopy { v, b, k, r, lambda }
            }
        }
    })
}

fn cmd_build(a: BuildArgs) -> CliResult {
    let block_budget = budget_from_env(DEFAULT_BLOCK_BUDGET)?;
    let (structure, graph, expected): (IncidenceStructure, Digraph, Option<DsrgParams>) =
        match (a.family, &a.structure) {
            (Some(kind), _) => {
                let spec = family_spec(&a, kind)?;
                let expected = expected_params(&spec).map_err(|e| e.to_string())?;
                let FamilyInstance { structure, graph, .. } =
                    build_family(&spec, block_budget).map_err(|e| e.to_string())?;
                (structure, graph, Some(expected))
            }
            (None, Some(path)) => {
                let s = IncidenceStructure::from_json(&read(path)?).map_err(|e| e.to_string())?;
                let g = match a.rule.expect("clap enforces --rule") {
                    Rule::Forward => build_antiflag_forward(&s),
                    Rule::Backward => build_antiflag_backward(&s),
                    Rule::BackwardLoopy => build_antiflag_backward_loopy(&s),
                    Rule::Spiked => build_partition_spiked(&s),
                }
                .map_err(|e| e.to_string())?;
                (s, g, None)
            }
            (None, None) => return Err("build needs --family or --structure".into()),
        };

    if let Some(path) = &a.structure_out {
        write(path, &structure.to_json())?;
    }
    if let Some(path) = &a.out {
        let text = match a.format {
            GraphFormat::Dgr => graph.to_dgr(),
            GraphFormat::Edges => graph.to_edge_list(),
        };
        write(path, &text)?;
    }
    if let Some(e) = expected {
        println!("expected {e}");
    }
    match verify_dsrg(&graph) {
        Ok(got) if expected.is_none_or(|e| e == got) => {
            println!("{got} verified");
            Ok(ExitCode::SUCCESS)
        }
        Ok(got) => {
            println!("{got} MISMATCH");
            Ok(ExitCode::FAILURE)
        }
        Err(e) => {
            println!("not a DSRG: {e}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_verify(path: &Path) -> CliResult {
    let g = Digraph::parse(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    match verify_dsrg(&g) {
        Ok(p) => {
            println!("{p}");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("not a DSRG: {e}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_iso(left: &Path, right: &Path, budget: Option<u64>) -> CliResult {
    let budget = match budget {
        Some(b) => b,
        None => budget_from_env(DEFAULT_NODE_BUDGET)?,
    };
    let parse = |p: &Path| Digraph::parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display()));
    let (d1, d2) = (parse(left)?, parse(right)?);
    match are_isomorphic(&d1, &d2, budget) {
        IsoOutcome::Isomorphic(f) => {
            println!("ISOMORPHIC");
            print!("{f}");
            Ok(ExitCode::SUCCESS)
        }
        IsoOutcome::NotIsomorphic => {
            println!("NOT ISOMORPHIC");
            Ok(ExitCode::FAILURE)
        }
        IsoOutcome::BudgetExceeded { nodes } => {
            println!("BUDGET exceeded after {nodes} nodes");
            Ok(ExitCode::from(3))
        }
    }
}

fn cmd_catalog(a: CatalogArgs) -> CliResult {
    let opts = CatalogOptions {
        max_order: a.max_order,
        families: a.families.unwrap_or_else(FamilyKind::defaults),
        multiples: a.multiples,
        block_budget: budget_from_env(DEFAULT_BLOCK_BUDGET)?,
    };
    let rows = build_catalog(&opts).map_err(|e| e.to_string())?;
    if let Some(path) = &a.csv {
        write(path, &to_csv(&rows))?;
    }
    match a.format {
        TableFormat::Text => print!("{}", to_text(&rows)),
        TableFormat::Csv => print!("{}", to_csv(&rows)),
    }
    let failures = rows.iter().filter(|r| !r.verified && !r.formula_only).count();
    if failures > 0 {
        eprintln!("{failures} constructible rows failed to verify");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify { path } => cmd_verify(&path),
        Command::Spectrum(p) => match spectrum(&p.params()) {
            Ok(s) => {
                println!("{s}");
                Ok(ExitCode::SUCCESS)
            }
            Err(e) => {
                println!("infeasible: {e}");
                Ok(ExitCode::FAILURE)
            }
        },
        Command::Feasibility(p) => {
            let report = feasibility(&p.params());
            print!("{report}");
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Iso { left, right, budget } => cmd_iso(&left, &right, budget),
        Command::Catalog(a) => cmd_catalog(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
