//! Command-line front end: energy estimation, tangent classification, the
//! claim-verification suite and closed-bound tables.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

use menger::energy::{
    self, EnergyEstimate, EnergyFamily, EnergyParams, PaperBound, QuadratureConfig,
};
use menger::geom::Point;
use menger::report;
use menger::segset::{self, SegmentSet};
use menger::tangent::{self, RadiusLadder, TangentVerdict};
use menger::verify::{self, Budget};

#[derive(Parser)]
#[command(
    name = "menger",
    version,
    about = "Curvature energies, thickness and tangent analysis of segment unions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a curvature energy of a set.
    Energy(EnergyArgs),
    /// Density profile and tangent classification at a base point.
    Tangent(TangentArgs),
    /// Run the numbered verification claims.
    VerifyPaper(VerifyArgs),
    /// Print the closed-form bound tables for the three-arm set.
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    U,
    I,
    M,
}

impl From<FamilyArg> for EnergyFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::U => EnergyFamily::U,
            FamilyArg::I => EnergyFamily::I,
            FamilyArg::M => EnergyFamily::M,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Budget preset for quadrature depth and sample counts.
    #[arg(long, default_value = "default")]
    budget: String,
    /// Quadrature overrides as key=value (base_order, max_depth, rel_tol,
    /// abs_tol, singularity_grading, mc_samples, seed). Repeatable.
    #[arg(long = "config", value_name = "KEY=VALUE")]
    config: Vec<String>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct EnergyArgs {
    /// Built-in set name (E, F:<n_max>, S:<resolution>, L, polygon:<k>,
    /// segment) or a path to a JSON set description.
    #[arg(long)]
    set: String,
    /// Energy family: U (global radius), I (intermediate), M (triple
    /// Menger integral).
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Integrability exponent p > 0.
    #[arg(long)]
    p: f64,
    /// Use the Monte-Carlo estimator instead of quadrature.
    #[arg(long)]
    mc: bool,
    /// Also report the thickness of the set.
    #[arg(long)]
    thickness: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TangentArgs {
    /// Built-in set name or a path to a JSON set description.
    #[arg(long)]
    set: String,
    /// Base point as comma-separated coordinates (default: origin).
    #[arg(long)]
    point: Option<String>,
    /// Outer radius of the geometric probe ladder.
    #[arg(long, default_value_t = 0.5)]
    r0: f64,
    /// Acceptance threshold on the out-of-cone density ratio.
    #[arg(long, default_value_t = tangent::DEFAULT_DELTA)]
    delta: f64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict to a comma-separated list of claim numbers (1..=10).
    #[arg(long)]
    only: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TableArgs {
    /// Number of exponent grid points per bound window.
    #[arg(long, default_value_t = 9)]
    points: usize,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Energy(args) => cmd_energy(args),
        Command::Tangent(args) => cmd_tangent(args),
        Command::VerifyPaper(args) => cmd_verify(args),
        Command::Table(args) => cmd_table(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    Budget::parse(s).ok_or_else(|| format!("unknown budget {s:?}, expected default or low"))
}

fn build_config(budget: Budget, overrides: &[String]) -> Result<QuadratureConfig, String> {
    let mut cfg = match budget {
        Budget::Default => QuadratureConfig::default(),
        Budget::Low => QuadratureConfig::low_budget(),
    };
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("config override {item:?} is not KEY=VALUE"))?;
        let bad = |e: &dyn std::fmt::Display| format!("config {key}={value}: {e}");
        match key {
            "base_order" => cfg.base_order = value.parse().map_err(|e| bad(&e))?,
            "max_depth" => cfg.max_depth = value.parse().map_err(|e| bad(&e))?,
            "rel_tol" => cfg.rel_tol = value.parse().map_err(|e| bad(&e))?,
            "abs_tol" => cfg.abs_tol = value.parse().map_err(|e| bad(&e))?,
            "singularity_grading" => {
                cfg.singularity_grading = value.parse().map_err(|e| bad(&e))?
            }
            "mc_samples" => cfg.mc_samples = value.parse().map_err(|e| bad(&e))?,
            "seed" => cfg.seed = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(format!("unknown config key {key:?}")),
        }
    }
    Ok(cfg)
}

fn parse_set(spec: &str) -> Result<SegmentSet, String> {
    let err = |e: &dyn std::fmt::Display| format!("set {spec:?}: {e}");
    match spec {
        "E" => return Ok(segset::set_e()),
        "L" => return Ok(segset::set_l()),
        "segment" | "builtin:segment" => return Ok(segset::unit_segment()),
        _ => {}
    }
    if let Some(n) = spec.strip_prefix("F:") {
        let n: usize = n.parse().map_err(|e| err(&e))?;
        return segset::set_f(n).map_err(|e| err(&e));
    }
    if let Some(r) = spec.strip_prefix("S:") {
        let r: usize = r.parse().map_err(|e| err(&e))?;
        return segset::set_s(r).map_err(|e| err(&e));
    }
    if let Some(k) = spec.strip_prefix("polygon:") {
        let k: usize = k.parse().map_err(|e| err(&e))?;
        return segset::regular_polygon(k).map_err(|e| err(&e));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| err(&e))?;
    serde_json::from_str(&text).map_err(|e| err(&e))
}

fn parse_point(spec: Option<&str>, dim: usize) -> Result<Point<f64>, String> {
    match spec {
        None => Ok(Point::zeros(dim)),
        Some(s) => {
            let coords: Vec<f64> = s
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("point {s:?}: {e}"))?;
            Point::new(&coords).map_err(|e| format!("point {s:?}: {e}"))
        }
    }
}

fn env_threads() -> usize {
    std::env::var("MENGER_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn cmd_energy(args: EnergyArgs) -> Result<ExitCode, String> {
    let budget = parse_budget(&args.common.budget)?;
    let cfg = build_config(budget, &args.common.config)?;
    let set = parse_set(&args.set)?;
    let family: EnergyFamily = args.family.into();
    let params = EnergyParams::new(args.p);
    let est: EnergyEstimate = if args.mc {
        energy::energy_mc(&set, family, &params, &cfg).map_err(|e| e.to_string())?
    } else {
        energy::energy(&set, family, &params, &cfg).map_err(|e| e.to_string())?
    };
    let thickness = args.thickness.then(|| energy::thickness(&set, &cfg));
    match args.common.format {
        Format::Json => {
            let doc = serde_json::json!({
                "set": args.set,
                "family": format!("{family:?}"),
                "p": args.p,
                "estimate": est,
                "thickness": thickness,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Csv => {
            println!("set,family,p,value,error_bound,evaluations,diverged,thickness");
            println!(
                "{},{:?},{},{:.17e},{:.17e},{},{},{}",
                args.set,
                family,
                args.p,
                est.value,
                est.error_bound,
                est.evaluations,
                est.diverged,
                thickness.map(|t| format!("{t:.17e}")).unwrap_or_default()
            );
        }
    }
    Ok(if est.diverged {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_tangent(args: TangentArgs) -> Result<ExitCode, String> {
    let _budget = parse_budget(&args.common.budget)?;
    let set = parse_set(&args.set)?;
    let point = parse_point(args.point.as_deref(), set.dim())?;
    // block-backed sets probed at the origin get the exact dyadic ladder
    let exact = !set.scaled_blocks().is_empty() && point.norm() == 0.0;
    let ladder = if exact {
        let n_max = set.scaled_blocks().len();
        let (radii, _) = tangent::block_ladder_with_directions(n_max);
        RadiusLadder::scaled(radii).map_err(|e| e.to_string())?
    } else {
        RadiusLadder::default_at_scale(args.r0).map_err(|e| e.to_string())?
    };
    let grid = tangent::DEFAULT_DIR_GRID;
    let eps = tangent::default_eps_list();
    let profile = tangent::density_profile(&set, &point, 1.0, &ladder, grid, &eps)
        .map_err(|e| e.to_string())?;
    let report = tangent::classify(&profile, args.delta, true);
    match args.common.format {
        Format::Json => {
            let doc = serde_json::json!({
                "set": args.set,
                "point": point.coords(),
                "report": report,
                "profile": profile,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Csv => {
            print!("{}", report::density_profile_csv(&profile));
        }
    }
    // only a definite verdict counts as success
    Ok(match report.verdict {
        TangentVerdict::None { witnesses: None } => ExitCode::from(2),
        _ => ExitCode::SUCCESS,
    })
}

fn parse_only(spec: Option<&str>) -> Result<Option<Vec<usize>>, String> {
    let Some(s) = spec else { return Ok(None) };
    let list: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("--only {s:?}: {e}"))?;
    if list.is_empty() || list.iter().any(|&i| !(1..=verify::CLAIM_COUNT).contains(&i)) {
        return Err(format!(
            "--only entries must be claim numbers 1..={}",
            verify::CLAIM_COUNT
        ));
    }
    Ok(Some(list))
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let budget = parse_budget(&args.common.budget)?;
    if !args.common.config.is_empty() {
        return Err("the verification suite pins its own quadrature settings".into());
    }
    let only = parse_only(args.only.as_deref())?;
    let report = verify::run_all(budget, only.as_deref(), env_threads());
    match args.common.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
    }
    for r in &report.records {
        eprintln!(
            "{}: {} ({} ms)",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.runtime_ms
        );
    }
    Ok(if !report.all_passed() {
        ExitCode::from(1)
    } else if report.any_diverged() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_table(args: TableArgs) -> Result<ExitCode, String> {
    let _budget = parse_budget(&args.common.budget)?;
    if args.points < 2 {
        return Err("--points must be at least 2".into());
    }
    let grid = |lo: f64, hi: f64| -> Vec<f64> {
        (1..=args.points)
            .map(|i| lo + (hi - lo) * i as f64 / (args.points + 1) as f64)
            .collect()
    };
    let mut rows: Vec<(String, f64, f64, Option<f64>)> = Vec::new();
    for p in grid(0.0, 1.0) {
        let b = energy::paper_bound(PaperBound::UOnE, p).map_err(|e| e.to_string())?;
        rows.push(("U".into(), p, b, Some(verify::u_energy_exact(p))));
    }
    for p in grid(1.0, 2.0) {
        let b = energy::paper_bound(PaperBound::IOnE, p).map_err(|e| e.to_string())?;
        rows.push(("I".into(), p, b, None));
    }
    for p in grid(2.0, 3.0) {
        if p < 2.0 {
            continue;
        }
        let b = energy::paper_bound(PaperBound::MOnE, p).map_err(|e| e.to_string())?;
        rows.push(("M".into(), p, b, None));
        let b = energy::paper_bound(PaperBound::TripleOnE, p).map_err(|e| e.to_string())?;
        rows.push(("F".into(), p, b, None));
    }
    match args.common.format {
        Format::Json => {
            let doc: Vec<_> = rows
                .iter()
                .map(|(family, p, bound, exact)| {
                    serde_json::json!({
                        "family": family,
                        "p": p,
                        "bound": bound,
                        "exact": exact,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Csv => {
            println!("family,p,bound,exact");
            for (family, p, bound, exact) in &rows {
                println!(
                    "{family},{p:.6},{bound:.17e},{}",
                    exact.map(|v| format!("{v:.17e}")).unwrap_or_default()
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
