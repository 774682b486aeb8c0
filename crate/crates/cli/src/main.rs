//! `besicover`: generate, validate and analyse finite metric spaces.
//!
//! Reports are JSON on standard output (or `--output`); diagnostics go to
//! standard error. Exit codes: 0 success, 1 a check failed, 2 bad usage or
//! unreadable input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use besicover_core::besicovitch::{besicovitch_constant, DEFAULT_CLIQUE_BUDGET};
use besicover_core::covering::{besicovitch_cover, disjoint_rearrangement, equal_radius_cover, localized_cover};
use besicover_core::doubling::{doubling_constant, lattice_resolved_radii, SolverOptions};
use besicover_core::gallery::{run_case, CASES};
use besicover_core::generators::{random_centered_family, random_subset, GenSpec};
use besicover_core::io::SpaceDocument;
use besicover_core::nets::{greedy_maximal_net, maximality_gap, net_violation};
use besicover_core::space::validate_metric;
use besicover_core::{BallFamily, BallKind, Error, FiniteMetricSpace, PointSet, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "besicover", version, about = "Exact covering analysis of finite metric spaces")]
struct Cli {
    /// Seed for every random choice (random subsets and families).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "BESICOVER_THREADS")]
    threads: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpaceArgs {
    /// Inline generator: paper_ultra:N, grid_square:N, zero_one:n,
    /// lattice:DIM:SIDE:l1|linf|l2, random_ultra:n[:seed].
    #[arg(long, conflicts_with = "space")]
    gen: Option<String>,

    /// Space file: a distance table or a generator document.
    #[arg(long)]
    space: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Open,
    Closed,
}

impl From<Kind> for BallKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Open => BallKind::Open,
            Kind::Closed => BallKind::Closed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Greedy,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated space as a distance table.
    Generate {
        #[arg(long)]
        gen: String,
    },
    /// Check the metric axioms; exits 1 with a witness if they fail.
    Validate {
        /// Space file (alternative to --gen/--space).
        file: Option<PathBuf>,
        #[command(flatten)]
        src: SpaceArgs,
    },
    /// Greedy maximal r-net over all points.
    Nets {
        #[command(flatten)]
        src: SpaceArgs,
        #[arg(long)]
        r: Rational,
        /// Pairwise distance > r instead of >= r.
        #[arg(long)]
        strict: bool,
    },
    /// Doubling constant.
    Doubling {
        #[command(flatten)]
        src: SpaceArgs,
        #[arg(long, value_enum, default_value = "closed")]
        kind: Kind,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        /// Radii to test: `all` (exact over every r > 0), `lattice`
        /// (even multiples of the spacing) or a comma list.
        #[arg(long, default_value = "all")]
        radii: String,
        /// Largest ball solved exactly; larger ones fall back to greedy.
        #[arg(long, default_value_t = 64)]
        cap: usize,
        /// Include the count for every tested ball.
        #[arg(long)]
        per_ball: bool,
    },
    /// Covering constructions on a centered family.
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Besicovitch constant: the largest overlap of a family in which no
    /// ball contains another's center.
    Besicovitch {
        #[command(flatten)]
        src: SpaceArgs,
        #[arg(long, value_enum, default_value = "closed")]
        kind: Kind,
        /// Candidate radii (comma list); default every critical radius.
        #[arg(long)]
        pool: Option<String>,
    },
    /// Run the example gallery; exits 1 if any check fails.
    Gallery {
        /// Case id or `all`.
        #[arg(long, default_value = "all")]
        case: String,
        #[arg(long = "N", default_value_t = 16)]
        n: usize,
        /// Also write the report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct FamilyArgs {
    #[command(flatten)]
    src: SpaceArgs,
    /// Ball family file; overrides --set/--radii.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Points to cover: `all`, `random:P` or a comma list of indices.
    #[arg(long, default_value = "all")]
    set: String,
    /// Radii for a random centered family (comma list).
    #[arg(long)]
    radii: Option<String>,
    /// Up to this many balls per point in a random family.
    #[arg(long, default_value_t = 1)]
    per_point: usize,
    #[arg(long, value_enum, default_value = "closed")]
    kind: Kind,
}

#[derive(Subcommand)]
enum CoverCommand {
    /// One radius, disjoint families.
    EqualRadius {
        #[command(flatten)]
        src: SpaceArgs,
        #[arg(long)]
        r: Rational,
        #[arg(long, default_value = "all")]
        set: String,
        #[arg(long, value_enum, default_value = "closed")]
        kind: Kind,
    },
    /// Radii in [r, R], disjoint families.
    Localized {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Fail when m exceeds the bound for this doubling constant.
        #[arg(long)]
        known_d: Option<usize>,
    },
    /// Subcover with bounded overlap.
    Besicovitch {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        known_l: Option<usize>,
        #[arg(long)]
        known_c: Option<usize>,
    },
    /// Bounded-overlap subcover regrouped into disjoint families.
    Rearrange {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        known_l: Option<usize>,
        #[arg(long)]
        known_d: Option<usize>,
        /// Approximate-midpoint tolerance for the bound's precondition.
        #[arg(long)]
        eps: Option<Rational>,
    },
}

/// Failure of a command, already sorted by exit code.
enum Failure {
    Usage(String),
    Check(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundViolated { .. } | Error::CoverIncomplete { .. } => Failure::Check(json!({
                "error": e.to_string(),
            })),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn load(src: &SpaceArgs) -> Result<FiniteMetricSpace, Failure> {
    match (&src.gen, &src.space) {
        (Some(g), None) => Ok(g.parse::<GenSpec>()?.build()?),
        (None, Some(path)) => Ok(read_document(path)?.build()?),
        _ => Err(usage("give exactly one of --gen or --space")),
    }
}

fn read_document(path: &Path) -> Result<SpaceDocument, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    SpaceDocument::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_radii(list: &str) -> Result<Vec<Rational>, Failure> {
    let radii = list
        .split(',')
        .map(|s| s.trim().parse::<Rational>().map_err(|e| usage(format!("radius {s:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if radii.is_empty() || radii.iter().any(|r| !r.is_positive()) {
        return Err(usage("radii must be a nonempty list of positive rationals"));
    }
    Ok(radii)
}

fn parse_set(space: &FiniteMetricSpace, spec: &str, seed: u64) -> Result<PointSet, Failure> {
    if spec == "all" {
        return Ok(space.all_points());
    }
    if let Some(p) = spec.strip_prefix("random:") {
        let p: f64 = p.parse().map_err(|_| usage(format!("bad probability in {spec:?}")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(usage("probability must be in [0, 1]"));
        }
        return Ok(random_subset(space.len(), p, seed));
    }
    let mut set = PointSet::empty(space.len());
    for part in spec.split(',') {
        let i: usize = part.trim().parse().map_err(|_| usage(format!("bad point index {part:?}")))?;
        space.check_point(i)?;
        set.insert(i);
    }
    Ok(set)
}

/// The set to cover and a family centered on it.
fn family(space: &FiniteMetricSpace, args: &FamilyArgs, seed: u64) -> Result<(PointSet, BallFamily), Failure> {
    if let Some(path) = &args.family {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let fam: BallFamily = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        fam.check_in(space)?;
        let mut centers = PointSet::empty(space.len());
        fam.iter().for_each(|b| centers.insert(b.center));
        return Ok((centers, fam));
    }
    let radii = parse_radii(args.radii.as_deref().ok_or_else(|| usage("give --family or --radii"))?)?;
    if args.per_point == 0 {
        return Err(usage("--per-point must be at least 1"));
    }
    let a = parse_set(space, &args.set, seed)?;
    if a.is_empty() {
        return Err(usage("the set to cover is empty"));
    }
    let fam = random_centered_family(&a, &radii, args.kind.into(), args.per_point, seed);
    Ok((a, fam))
}

fn envelope(command: &str, space: Option<&FiniteMetricSpace>, seed: u64, result: impl Serialize) -> Value {
    let mut v = json!({
        "tool": "besicover",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
    });
    if let Some(s) = space {
        v["space_hash"] = json!(s.content_hash());
        v["points"] = json!(s.len());
    }
    v["result"] = serde_json::to_value(result).expect("reports serialize");
    v
}

fn run(cli: &Cli) -> Outcome {
    let seed = cli.seed;
    match &cli.command {
        Command::Generate { gen } => {
            let space = gen.parse::<GenSpec>()?.build()?;
            let table: Value = serde_json::from_str(&space.to_table().to_json()).expect("table JSON");
            Ok((table, true))
        }
        Command::Validate { file, src } => {
            let doc = match (file, &src.gen, &src.space) {
                (Some(path), None, None) => read_document(path)?,
                (None, _, _) => match (&src.gen, &src.space) {
                    (Some(g), None) => SpaceDocument::Generator(g.parse()?),
                    (None, Some(path)) => read_document(path)?,
                    _ => return Err(usage("give a file, --gen or --space")),
                },
                _ => return Err(usage("give a file, --gen or --space")),
            };
            let table = match &doc {
                SpaceDocument::Table(t) => t.clone(),
                SpaceDocument::Generator(g) => g.build()?.to_table(),
            };
            let report = validate_metric(&table);
            let valid = report.valid;
            let space = if valid { Some(doc.build()?) } else { None };
            Ok((envelope("validate", space.as_ref(), seed, report), valid))
        }
        Command::Nets { src, r, strict } => {
            let space = load(src)?;
            if !r.is_positive() {
                return Err(usage("r must be positive"));
            }
            let all = space.all_points();
            let net = greedy_maximal_net(&space, &all, *r, *strict);
            let ok = net_violation(&space, &net).is_none() && maximality_gap(&space, &net, &all).is_none();
            let result = json!({
                "net": net,
                "labels": net.points.iter().map(|p| space.label(p)).collect::<Vec<_>>(),
                "size": net.points.len(),
                "valid": ok,
            });
            Ok((envelope("nets", Some(&space), seed, result), ok))
        }
        Command::Doubling {
            src,
            kind,
            method,
            radii,
            cap,
            per_ball,
        } => {
            let space = load(src)?;
            let list = match radii.as_str() {
                "all" => space.doubling_radii(),
                "lattice" => lattice_resolved_radii(&space),
                other => parse_radii(other)?,
            };
            let opts = match method {
                MethodArg::Exact => SolverOptions::exact(),
                MethodArg::Greedy => SolverOptions::greedy(),
            }
            .with_cap(*cap);
            let mut report = serde_json::to_value(doubling_constant(&space, (*kind).into(), Some(&list), opts))
                .expect("report serializes");
            if !per_ball {
                report.as_object_mut().expect("object").remove("per_ball");
            }
            Ok((envelope("doubling", Some(&space), seed, report), true))
        }
        Command::Cover(c) => cover(c, seed),
        Command::Besicovitch { src, kind, pool } => {
            let space = load(src)?;
            let pool = pool.as_deref().map(parse_radii).transpose()?;
            let report = besicovitch_constant(&space, pool.as_deref(), (*kind).into(), DEFAULT_CLIQUE_BUDGET)?;
            Ok((envelope("besicovitch", Some(&space), seed, report), true))
        }
        Command::Gallery { case, n, json: _ } => {
            let ids: Vec<&str> = if case == "all" { CASES.to_vec() } else { vec![case.as_str()] };
            let reports = ids
                .iter()
                .map(|id| run_case(id, *n, seed))
                .collect::<Result<Vec<_>, _>>()?;
            let ok = reports.iter().all(|r| r.all_pass);
            Ok((envelope("gallery", None, seed, json!({ "all_pass": ok, "cases": reports })), ok))
        }
    }
}

fn cover(c: &CoverCommand, seed: u64) -> Outcome {
    match c {
        CoverCommand::EqualRadius { src, r, set, kind } => {
            let space = load(src)?;
            let a = parse_set(&space, set, seed)?;
            let res = equal_radius_cover(&space, &a, *r, (*kind).into())?;
            let ok = res.verify(&space).is_ok();
            Ok((envelope("cover equal-radius", Some(&space), seed, res), ok))
        }
        CoverCommand::Localized { fam, known_d } => {
            let space = load(&fam.src)?;
            let (a, f) = family(&space, fam, seed)?;
            let res = localized_cover(&space, &a, &f, None, *known_d)?;
            let ok = res.cover.verify(&space).is_ok();
            Ok((envelope("cover localized", Some(&space), seed, res), ok))
        }
        CoverCommand::Besicovitch { fam, known_l, known_c } => {
            let space = load(&fam.src)?;
            let (a, f) = family(&space, fam, seed)?;
            let res = besicovitch_cover(&space, &a, &f, None, *known_l, *known_c)?;
            Ok((envelope("cover besicovitch", Some(&space), seed, res), true))
        }
        CoverCommand::Rearrange {
            fam,
            known_l,
            known_d,
            eps,
        } => {
            let space = load(&fam.src)?;
            let (a, f) = family(&space, fam, seed)?;
            let sub = besicovitch_cover(&space, &a, &f, None, None, None)?;
            let res = disjoint_rearrangement(&space, &sub.selected, Some(sub.big_r), *known_l, *known_d, *eps)?;
            let ok = res.within_bound != Some(false) && res.cover.verify(&space).is_ok();
            Ok((envelope("cover rearrange", Some(&space), seed, res), ok))
        }
    }
}

fn write_report(path: Option<&Path>, v: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(v).expect("JSON");
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("thread pool is configured once");
    }
    let (report, ok) = match run(&cli) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Check(v)) => {
            eprintln!("check failed: {}", v["error"].as_str().unwrap_or_default());
            (v, false)
        }
    };
    let mut targets = vec![cli.output.as_deref()];
    if let Command::Gallery { json: Some(p), .. } = &cli.command {
        if cli.output.is_none() {
            targets = vec![None, Some(p.as_path())];
        } else {
            targets.push(Some(p.as_path()));
        }
    }
    for t in targets {
        if let Err(e) = write_report(t, &report) {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(2);
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
