//! Command-line front end: per-r analyses, front export and verification.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use mofpca::dataset::{load_csv_with, standardize, LoadOptions, ScalingMode, StandardizedDataset};
use mofpca::dominance::DEFAULT_ENUMERATION_CAP;
use mofpca::error::{Error, Result};
use mofpca::harness::{
    self, front_to_csv, front_to_json, front_to_svg, parse_front_csv, parse_front_json, pca_report,
    run_log_to_csv, sweep_to_csv, ConfigOverrides, SweepOptions,
};
use mofpca::pca::{compute_basis, BasisFile, PrincipalBasis};
use mofpca::spea2::DatasetKind;

#[derive(Parser)]
#[command(
    name = "mofpca",
    about = "Fair PCA trade-off analysis over principal component subsets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical PCA baseline: objectives of the leading-r selection.
    Pca(PcaArgs),
    /// Multi-objective search (SPEA2 or exhaustive) plus single-solution pick.
    Mofpca(MofpcaArgs),
    /// Per-r comparison table of pca and mofpca-selected solutions.
    Sweep(SweepArgs),
    /// Re-run the weighted-sum selection on a previously exported front.
    Select(SelectArgs),
    /// Check that a front file's objective values match its indices.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with one header row.
    #[arg(long)]
    input: PathBuf,
    /// Name of the sensitive column (must hold exactly two distinct values).
    #[arg(long)]
    sensitive: String,
    /// Sensitive value that defines group A.
    #[arg(long = "group-a")]
    group_a: String,
    /// Column scaling applied before the basis is computed.
    #[arg(long, value_enum, default_value_t = ScalingArg::Zscore)]
    scaling: ScalingArg,
    /// Keep the sensitive column in the feature matrix (it must be numeric).
    #[arg(long)]
    keep_sensitive: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingArg {
    Zscore,
    Pixel,
    None,
}

impl From<ScalingArg> for ScalingMode {
    fn from(a: ScalingArg) -> Self {
        match a {
            ScalingArg::Zscore => ScalingMode::ZScore,
            ScalingArg::Pixel => ScalingMode::Pixel,
            ScalingArg::None => ScalingMode::None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct PcaArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Target dimension.
    #[arg(long)]
    r: usize,
    /// Output directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also export the basis (eigenvalues, energies and the d×d matrix).
    #[arg(long)]
    export_basis: bool,
}

#[derive(Args)]
struct MofpcaArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Target dimension.
    #[arg(long)]
    r: usize,
    /// RNG seed for the evolutionary search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON or TOML file overriding the default search parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Enumerate all C(d,r) subsets instead of searching.
    #[arg(long)]
    exhaustive: bool,
    /// Maximum subset count accepted by --exhaustive.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a static SVG scatter of the front.
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "r-min", default_value_t = 1)]
    r_min: usize,
    /// Defaults to min(d, 20).
    #[arg(long = "r-max")]
    r_max: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Additionally enumerate exact fronts where C(d,r) fits the cap.
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    /// Record wall-clock runtimes (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Front file exported by `mofpca` (.json or .csv).
    #[arg(long)]
    front: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Front file exported by `mofpca` (.json or .csv).
    #[arg(long)]
    front: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Pca(args) => cmd_pca(args),
        Command::Mofpca(args) => cmd_mofpca(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Select(args) => cmd_select(args),
        Command::Verify(args) => cmd_verify(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn workers_from_env() -> usize {
    std::env::var("MOFPCA_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1)
}

fn load(input: &InputArgs) -> Result<(StandardizedDataset, PrincipalBasis)> {
    let (table, groups) = load_csv_with(
        &input.input,
        &input.sensitive,
        &input.group_a,
        LoadOptions {
            keep_sensitive: input.keep_sensitive,
        },
    )?;
    let ds = standardize(table, &groups, input.scaling.into());
    for &col in ds.constant_columns() {
        eprintln!("warning: column {col} is constant; standardized to zeros");
    }
    let basis = compute_basis(&ds)?;
    Ok((ds, basis))
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|source| Error::FileWrite {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|source| Error::FileWrite {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn to_json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn cmd_pca(args: PcaArgs) -> Result<()> {
    let (_, basis) = load(&args.input)?;
    let report = pca_report(&basis, args.r)?;
    println!(
        "pca r={} indices(1-based)={:?}\n  recon_error={} (per sample {})\n  fairness={}\n  \
         group A error per sample={}\n  group B error per sample={}",
        report.r,
        report.indices_one_based,
        report.recon_error,
        report.recon_error_per_sample,
        report.fairness,
        report.group_a_error_per_sample,
        report.group_b_error_per_sample
    );
    if let Some(dir) = &args.out {
        let path = match args.format {
            FormatArg::Json => write_file(
                dir,
                &format!("pca_r{}.json", args.r),
                &to_json_line(&report),
            )?,
            FormatArg::Csv => {
                let idx: Vec<String> = report.indices.iter().map(|i| i.to_string()).collect();
                let csv = format!(
                    "r,indices,recon_error,recon_error_per_sample,fairness,\
                     group_a_error,group_b_error,group_a_error_per_sample,group_b_error_per_sample\n\
                     {},{},{},{},{},{},{},{},{}\n",
                    report.r,
                    idx.join(";"),
                    report.recon_error,
                    report.recon_error_per_sample,
                    report.fairness,
                    report.group_a_error,
                    report.group_b_error,
                    report.group_a_error_per_sample,
                    report.group_b_error_per_sample
                );
                write_file(dir, &format!("pca_r{}.csv", args.r), &csv)?
            }
        };
        println!("wrote {}", path.display());
        if args.export_basis {
            let file = BasisFile::from_basis(&basis, true);
            let path = write_file(dir, "basis.json", &to_json_line(&file))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_mofpca(args: MofpcaArgs) -> Result<()> {
    let (ds, basis) = load(&args.input)?;
    let overrides = args
        .config
        .as_deref()
        .map(ConfigOverrides::load)
        .transpose()?;
    let workers = workers_from_env();
    let run = harness::run_mofpca(
        &ds,
        &basis,
        args.r,
        args.seed,
        overrides.as_ref(),
        args.exhaustive,
        args.cap,
        workers,
    )?;

    println!(
        "{} front for r={}: {} record(s)",
        if args.exhaustive {
            "exhaustive"
        } else {
            "spea2"
        },
        args.r,
        run.front.len()
    );
    if let Some(cfg) = &run.config {
        println!(
            "spea2 config: population={} archive={} generations={} crossover={}% seed={}",
            cfg.population_size, cfg.archive_size, cfg.generations, cfg.crossover_rate, cfg.seed
        );
    }
    let sel = &run.report.selected;
    println!(
        "selected indices(1-based)={:?} recon_error={} fairness={} score={} (lambda={})",
        sel.indices_one_based, sel.recon_error, sel.fairness, sel.weighted_score, run.report.lambda
    );

    if let Some(dir) = &args.out {
        let r = args.r;
        let p = write_file(
            dir,
            &format!("front_r{r}.csv"),
            &front_to_csv(&basis, &run.front, r),
        )?;
        println!("wrote {}", p.display());
        let p = write_file(
            dir,
            &format!("front_r{r}.json"),
            &front_to_json(&basis, &run.front, r),
        )?;
        println!("wrote {}", p.display());
        let p = write_file(
            dir,
            &format!("selection_r{r}.json"),
            &to_json_line(&run.report),
        )?;
        println!("wrote {}", p.display());
        if !run.log.is_empty() {
            let p = write_file(dir, &format!("run_log_r{r}.csv"), &run_log_to_csv(&run.log))?;
            println!("wrote {}", p.display());
        }
        if args.svg {
            let chosen = run
                .front
                .iter()
                .find(|rec| rec.selection.indices() == run.report.selected.indices);
            let p = write_file(
                dir,
                &format!("front_r{r}.svg"),
                &front_to_svg(&run.front, chosen),
            )?;
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let (ds, basis) = load(&args.input)?;
    let r_max = args.r_max.unwrap_or_else(|| basis.dim().min(20));
    let kind = match ds.scaling() {
        ScalingMode::Pixel => DatasetKind::Image,
        _ => DatasetKind::Tabular,
    };
    let rows = harness::sweep(
        &basis,
        &SweepOptions {
            r_min: args.r_min,
            r_max,
            seed: args.seed,
            kind,
            cap: args.cap,
            workers: workers_from_env(),
            include_exhaustive: args.exhaustive,
            timings: args.timings,
        },
    )?;
    let csv = sweep_to_csv(&rows, args.timings);
    match &args.out {
        Some(dir) => {
            let p = write_file(dir, "sweep.csv", &csv)?;
            println!("wrote {}", p.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn read_front_file(path: &Path, d: usize) -> Result<(usize, Vec<mofpca::dominance::FrontRecord>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
        path: path.to_path_buf(),
        source,
    })?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_front_json(&text, d),
        Some("csv") => parse_front_csv(&text, d),
        _ => Err(Error::input("front file must be .json or .csv")),
    }
}

fn cmd_select(args: SelectArgs) -> Result<()> {
    let (_, basis) = load(&args.input)?;
    let (r, records) = read_front_file(&args.front, basis.dim())?;
    let weights = mofpca::selection::compute_lambda(&basis);
    let report = harness::selection_report(&basis, &records, &weights)?;
    println!(
        "selected for r={r}: indices(1-based)={:?} recon_error={} fairness={} score={}",
        report.selected.indices_one_based,
        report.selected.recon_error,
        report.selected.fairness,
        report.selected.weighted_score
    );
    match &args.out {
        Some(dir) => {
            let p = write_file(dir, &format!("selection_r{r}.json"), &to_json_line(&report))?;
            println!("wrote {}", p.display());
        }
        None => print!("{}", to_json_line(&report)),
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let (_, basis) = load(&args.input)?;
    let (r, records) = read_front_file(&args.front, basis.dim())?;
    let issues = harness::verify_front(&basis, &records);
    if issues.is_empty() {
        println!("verify r={r}: {} record(s) OK", records.len());
        Ok(())
    } else {
        for issue in &issues {
            eprintln!(
                "mismatch at indices {:?}: stored recon={} recomputed={}, stored fairness={} recomputed={}",
                issue.indices,
                issue.stored_recon_error,
                issue.recomputed_recon_error,
                issue.stored_fairness,
                issue.recomputed_fairness
            );
        }
        Err(Error::input(format!(
            "{} of {} records failed verification",
            issues.len(),
            records.len()
        )))
    }
}
