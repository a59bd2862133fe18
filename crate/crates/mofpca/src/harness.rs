//! Report building, file formats and the per-r sweep used by the CLI.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::StandardizedDataset;
use crate::dominance::{binomial_capped, brute_force_front, FrontRecord, ParetoFront};
use crate::error::{Error, Result};
use crate::pca::{ComponentSelection, PrincipalBasis};
use crate::selection::{compute_lambda, select_solution, SelectionWeights};
use crate::spea2::{self, DatasetKind, GenerationLog, Spea2Config};

/// Fully expanded view of one front record, as written to CSV/JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontDetail {
    pub indices: Vec<usize>,
    pub indices_one_based: Vec<usize>,
    pub recon_error: f64,
    pub recon_error_per_sample: f64,
    pub fairness: f64,
    pub group_a_error: f64,
    pub group_b_error: f64,
}

impl FrontDetail {
    pub fn from_record(basis: &PrincipalBasis, record: &FrontRecord) -> Self {
        let ge = basis.group_errors(&record.selection);
        FrontDetail {
            indices: record.selection.indices().to_vec(),
            indices_one_based: record.selection.one_based(),
            recon_error: record.objectives.recon_error,
            recon_error_per_sample: record.objectives.recon_error / basis.n() as f64,
            fairness: record.objectives.fairness,
            group_a_error: ge.group_a,
            group_b_error: ge.group_b,
        }
    }
}

/// JSON front file; round-trips through [`parse_front_json`].
#[derive(Debug, Serialize, Deserialize)]
pub struct FrontFile {
    pub schema_version: u32,
    pub r: usize,
    pub d: usize,
    pub records: Vec<FrontDetail>,
}

pub const FRONT_SCHEMA_VERSION: u32 = 1;

/// Render a front as CSV (one row per record, indices joined with ';').
pub fn front_to_csv(basis: &PrincipalBasis, front: &[FrontRecord], r: usize) -> String {
    let mut out = String::from(
        "r,indices,recon_error,recon_error_per_sample,fairness,group_a_error,group_b_error\n",
    );
    for record in front {
        let detail = FrontDetail::from_record(basis, record);
        let idx: Vec<String> = detail.indices.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r,
            idx.join(";"),
            detail.recon_error,
            detail.recon_error_per_sample,
            detail.fairness,
            detail.group_a_error,
            detail.group_b_error
        ));
    }
    out
}

pub fn front_to_json(basis: &PrincipalBasis, front: &[FrontRecord], r: usize) -> String {
    let file = FrontFile {
        schema_version: FRONT_SCHEMA_VERSION,
        r,
        d: basis.dim(),
        records: front
            .iter()
            .map(|rec| FrontDetail::from_record(basis, rec))
            .collect(),
    };
    let mut json = serde_json::to_string_pretty(&file).expect("front serializes");
    json.push('\n');
    json
}

/// Parse a JSON front file back into records validated against `d`.
pub fn parse_front_json(text: &str, d: usize) -> Result<(usize, Vec<FrontRecord>)> {
    let file: FrontFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("front JSON: {e}")))?;
    if file.schema_version != FRONT_SCHEMA_VERSION {
        return Err(Error::input(format!(
            "unsupported front schema version {}",
            file.schema_version
        )));
    }
    if file.d != d {
        return Err(Error::input(format!(
            "front was computed for d = {}, dataset has d = {d}",
            file.d
        )));
    }
    let records = file
        .records
        .into_iter()
        .map(|detail| {
            Ok(FrontRecord {
                selection: ComponentSelection::new(detail.indices, d)?,
                objectives: crate::pca::ObjectiveVector {
                    recon_error: detail.recon_error,
                    fairness: detail.fairness,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((file.r, records))
}

/// Parse the CSV produced by [`front_to_csv`].
pub fn parse_front_csv(text: &str, d: usize) -> Result<(usize, Vec<FrontRecord>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::input("empty front CSV"))?;
    let columns: Vec<&str> = header.split(',').collect();
    let col = |name: &str| -> Result<usize> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::input(format!("front CSV lacks column '{name}'")))
    };
    let (ci_r, ci_idx, ci_re, ci_f) = (
        col("r")?,
        col("indices")?,
        col("recon_error")?,
        col("fairness")?,
    );
    let mut r = None;
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::input(format!(
                "front CSV line {}: expected {} fields, got {}",
                lineno + 2,
                columns.len(),
                fields.len()
            )));
        }
        let parse_f64 = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| {
                Error::input(format!("front CSV line {}: bad number '{s}'", lineno + 2))
            })
        };
        let row_r: usize = fields[ci_r]
            .parse()
            .map_err(|_| Error::input(format!("front CSV line {}: bad r", lineno + 2)))?;
        match r {
            None => r = Some(row_r),
            Some(prev) if prev != row_r => {
                return Err(Error::input("front CSV mixes different r values"))
            }
            _ => {}
        }
        let indices = fields[ci_idx]
            .split(';')
            .map(|s| {
                s.parse::<usize>().map_err(|_| {
                    Error::input(format!("front CSV line {}: bad index '{s}'", lineno + 2))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        records.push(FrontRecord {
            selection: ComponentSelection::new(indices, d)?,
            objectives: crate::pca::ObjectiveVector {
                recon_error: parse_f64(fields[ci_re])?,
                fairness: parse_f64(fields[ci_f])?,
            },
        });
    }
    let r = r.ok_or_else(|| Error::input("front CSV has no records"))?;
    Ok((r, records))
}

/// Selection report written by the `mofpca` and `select` commands.
#[derive(Debug, Serialize, Deserialize)]
pub struct SelectionReport {
    pub lambda: f64,
    pub m_re: f64,
    pub m_fm: f64,
    pub selected: ScoredRecord,
    pub scored_front: Vec<ScoredRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub indices: Vec<usize>,
    pub indices_one_based: Vec<usize>,
    pub recon_error: f64,
    pub recon_error_per_sample: f64,
    pub fairness: f64,
    pub weighted_score: f64,
}

pub fn selection_report(
    basis: &PrincipalBasis,
    front: &[FrontRecord],
    weights: &SelectionWeights,
) -> Result<SelectionReport> {
    let chosen = select_solution(front, weights)?;
    let scored = |record: &FrontRecord| ScoredRecord {
        indices: record.selection.indices().to_vec(),
        indices_one_based: record.selection.one_based(),
        recon_error: record.objectives.recon_error,
        recon_error_per_sample: record.objectives.recon_error / basis.n() as f64,
        fairness: record.objectives.fairness,
        weighted_score: weights.score(record),
    };
    Ok(SelectionReport {
        lambda: weights.lambda,
        m_re: weights.m_re,
        m_fm: weights.m_fm,
        selected: scored(&chosen),
        scored_front: front.iter().map(scored).collect(),
    })
}

/// Single-method report for the `pca` command.
#[derive(Debug, Serialize, Deserialize)]
pub struct PcaReport {
    pub r: usize,
    pub indices: Vec<usize>,
    pub indices_one_based: Vec<usize>,
    pub recon_error: f64,
    pub recon_error_per_sample: f64,
    pub fairness: f64,
    pub group_a_error: f64,
    pub group_b_error: f64,
    pub group_a_error_per_sample: f64,
    pub group_b_error_per_sample: f64,
}

pub fn pca_report(basis: &PrincipalBasis, r: usize) -> Result<PcaReport> {
    let selection = ComponentSelection::leading(r, basis.dim())
        .map_err(|_| Error::input(format!("r = {r} out of range for d = {}", basis.dim())))?;
    let objectives = basis.evaluate(&selection);
    let ge = basis.group_errors(&selection);
    Ok(PcaReport {
        r,
        indices: selection.indices().to_vec(),
        indices_one_based: selection.one_based(),
        recon_error: objectives.recon_error,
        recon_error_per_sample: objectives.recon_error / basis.n() as f64,
        fairness: objectives.fairness,
        group_a_error: ge.group_a,
        group_b_error: ge.group_b,
        group_a_error_per_sample: ge.group_a / basis.n_a() as f64,
        group_b_error_per_sample: ge.group_b / basis.n_b() as f64,
    })
}

/// Which pipeline produced a sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMethod {
    Pca,
    MofpcaSelected,
    BruteForceSelected,
}

impl SweepMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepMethod::Pca => "pca",
            SweepMethod::MofpcaSelected => "mofpca-selected",
            SweepMethod::BruteForceSelected => "brute-force-selected",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub r: usize,
    pub method: SweepMethod,
    pub recon_error: f64,
    pub recon_error_per_sample: f64,
    pub fairness: f64,
    pub group_a_error_per_sample: f64,
    pub group_b_error_per_sample: f64,
    pub selected_indices: Vec<usize>,
    /// Only populated when timing output is requested; wall-clock timings are
    /// inherently non-reproducible, so they are excluded from default output.
    pub runtime_ms: Option<u128>,
}

pub struct SweepOptions {
    pub r_min: usize,
    pub r_max: usize,
    pub seed: u64,
    pub kind: DatasetKind,
    pub cap: u64,
    pub workers: usize,
    /// Add brute-force-selected rows for every r whose subset count fits the cap.
    pub include_exhaustive: bool,
    /// Record wall-clock runtimes in the rows.
    pub timings: bool,
}

fn sweep_row(
    basis: &PrincipalBasis,
    r: usize,
    method: SweepMethod,
    record: &FrontRecord,
    runtime_ms: Option<u128>,
) -> SweepRow {
    let ge = basis.group_errors(&record.selection);
    SweepRow {
        r,
        method,
        recon_error: record.objectives.recon_error,
        recon_error_per_sample: record.objectives.recon_error / basis.n() as f64,
        fairness: record.objectives.fairness,
        group_a_error_per_sample: ge.group_a / basis.n_a() as f64,
        group_b_error_per_sample: ge.group_b / basis.n_b() as f64,
        selected_indices: record.selection.indices().to_vec(),
        runtime_ms,
    }
}

/// Per-r comparison of the classical selection against the searched one.
/// Rows are ordered by r, then method.
pub fn sweep(basis: &PrincipalBasis, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let d = basis.dim();
    if opts.r_min < 1 || opts.r_min > opts.r_max || opts.r_max > d {
        return Err(Error::input(format!(
            "sweep range {}..{} invalid for d = {d}",
            opts.r_min, opts.r_max
        )));
    }
    let weights = compute_lambda(basis);
    let mut rows = Vec::new();
    for r in opts.r_min..=opts.r_max {
        let start = std::time::Instant::now();
        let classical = ComponentSelection::leading(r, d).expect("r <= d");
        let record = FrontRecord {
            objectives: basis.evaluate(&classical),
            selection: classical,
        };
        let elapsed = opts.timings.then(|| start.elapsed().as_millis());
        rows.push(sweep_row(basis, r, SweepMethod::Pca, &record, elapsed));

        let start = std::time::Instant::now();
        let mut cfg = spea2::default_config(d, r, opts.kind)?;
        cfg.seed = opts.seed;
        let outcome = spea2::run(basis, &cfg)?;
        let chosen = select_solution(&outcome.front, &weights)?;
        let elapsed = opts.timings.then(|| start.elapsed().as_millis());
        rows.push(sweep_row(
            basis,
            r,
            SweepMethod::MofpcaSelected,
            &chosen,
            elapsed,
        ));

        if opts.include_exhaustive && binomial_capped(d, r, opts.cap) <= opts.cap {
            let start = std::time::Instant::now();
            let front = brute_force_front(basis, r, opts.cap, opts.workers)?;
            let chosen = select_solution(&front, &weights)?;
            let elapsed = opts.timings.then(|| start.elapsed().as_millis());
            rows.push(sweep_row(
                basis,
                r,
                SweepMethod::BruteForceSelected,
                &chosen,
                elapsed,
            ));
        }
    }
    Ok(rows)
}

/// Long-format CSV, one row per (r, method), directly plottable.
pub fn sweep_to_csv(rows: &[SweepRow], timings: bool) -> String {
    let mut out = String::from(
        "r,method,recon_error,recon_error_per_sample,fairness,\
         group_a_error_per_sample,group_b_error_per_sample,selected_indices",
    );
    if timings {
        out.push_str(",runtime_ms");
    }
    out.push('\n');
    for row in rows {
        let idx: Vec<String> = row.selected_indices.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}",
            row.r,
            row.method.as_str(),
            row.recon_error,
            row.recon_error_per_sample,
            row.fairness,
            row.group_a_error_per_sample,
            row.group_b_error_per_sample,
            idx.join(";")
        ));
        if timings {
            out.push(',');
            if let Some(ms) = row.runtime_ms {
                out.push_str(&ms.to_string());
            }
        }
        out.push('\n');
    }
    out
}

pub fn run_log_to_csv(log: &[GenerationLog]) -> String {
    let mut out = String::from("generation,archive_size,best_recon_error,best_fairness,spread\n");
    for line in log {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            line.generation,
            line.archive_size,
            line.best_recon_error,
            line.best_fairness,
            line.spread
        ));
    }
    out
}

/// One mismatch found by [`verify_front`].
#[derive(Debug, Serialize)]
pub struct VerifyIssue {
    pub indices: Vec<usize>,
    pub stored_recon_error: f64,
    pub recomputed_recon_error: f64,
    pub stored_fairness: f64,
    pub recomputed_fairness: f64,
}

/// Re-derive every record's objectives from its indices via `evaluate` and
/// report records whose stored values disagree (relative tolerance 1e-9,
/// absolute floor for near-zero fairness).
pub fn verify_front(basis: &PrincipalBasis, records: &[FrontRecord]) -> Vec<VerifyIssue> {
    let fairness_floor = (1e-9 * basis.total_energy() / basis.n() as f64).powi(2);
    let mut issues = Vec::new();
    for record in records {
        let fresh = basis.evaluate(&record.selection);
        let recon_ok = (fresh.recon_error - record.objectives.recon_error).abs()
            <= 1e-9 * fresh.recon_error.abs().max(1e-9);
        let fair_ok = (fresh.fairness - record.objectives.fairness).abs()
            <= 1e-9 * fresh.fairness.abs() + fairness_floor;
        if !recon_ok || !fair_ok {
            issues.push(VerifyIssue {
                indices: record.selection.indices().to_vec(),
                stored_recon_error: record.objectives.recon_error,
                recomputed_recon_error: fresh.recon_error,
                stored_fairness: record.objectives.fairness,
                recomputed_fairness: fresh.fairness,
            });
        }
    }
    issues
}

/// Minimal static SVG scatter of the front in objective space; the selected
/// record, when given, is highlighted.
pub fn front_to_svg(front: &[FrontRecord], selected: Option<&FrontRecord>) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const M: f64 = 60.0;
    let (mut lo_r, mut hi_r) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo_f, mut hi_f) = (f64::INFINITY, f64::NEG_INFINITY);
    for rec in front {
        lo_r = lo_r.min(rec.objectives.recon_error);
        hi_r = hi_r.max(rec.objectives.recon_error);
        lo_f = lo_f.min(rec.objectives.fairness);
        hi_f = hi_f.max(rec.objectives.fairness);
    }
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let sx = |v: f64| M + (v - lo_r) / span(lo_r, hi_r) * (W - 2.0 * M);
    let sy = |v: f64| H - M - (v - lo_f) / span(lo_f, hi_f) * (H - 2.0 * M);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">reconstruction error</text>\n\
         <text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\" \
         font-size=\"13\">fairness measure</text>\n",
        H - M,
        W - M,
        H - M,
        H - M,
        W / 2.0,
        H - 18.0,
        H / 2.0,
        H / 2.0,
    );
    for rec in front {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n",
            sx(rec.objectives.recon_error),
            sy(rec.objectives.fairness)
        ));
    }
    if let Some(rec) = selected {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"6\" fill=\"red\" fill-opacity=\"0.6\"/>\n",
            sx(rec.objectives.recon_error),
            sy(rec.objectives.fairness)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Partial SPEA2 configuration loaded from `--config` (JSON or TOML by file
/// extension); fields left out keep their defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub population_size: Option<usize>,
    pub archive_size: Option<usize>,
    pub generations: Option<usize>,
    pub crossover_rate: Option<f64>,
    pub seed: Option<u64>,
    pub r: Option<usize>,
    pub mutation_swaps: Option<usize>,
}

impl ConfigOverrides {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
            path: path.to_path_buf(),
            source,
        })?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        match ext {
            "json" => serde_json::from_str(&text)
                .map_err(|e| Error::config(format!("{}: {e}", path.display()))),
            "toml" => {
                toml::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
            }
            other => Err(Error::config(format!(
                "config file must be .json or .toml, got '.{other}'"
            ))),
        }
    }

    pub fn apply(&self, cfg: &mut Spea2Config) {
        if let Some(v) = self.population_size {
            cfg.population_size = v;
        }
        if let Some(v) = self.archive_size {
            cfg.archive_size = v;
        }
        if let Some(v) = self.generations {
            cfg.generations = v;
        }
        if let Some(v) = self.crossover_rate {
            cfg.crossover_rate = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.mutation_swaps {
            cfg.mutation_swaps = v;
        }
    }
}

/// End-to-end front computation for one r: SPEA2 by default, exact
/// enumeration when `exhaustive` is set.
pub struct MofpcaRun {
    pub front: ParetoFront,
    pub log: Vec<GenerationLog>,
    pub report: SelectionReport,
    pub config: Option<Spea2Config>,
}

#[allow(clippy::too_many_arguments)]
pub fn run_mofpca(
    ds: &StandardizedDataset,
    basis: &PrincipalBasis,
    r: usize,
    seed: u64,
    overrides: Option<&ConfigOverrides>,
    exhaustive: bool,
    cap: u64,
    workers: usize,
) -> Result<MofpcaRun> {
    let kind = match ds.scaling() {
        crate::dataset::ScalingMode::Pixel => DatasetKind::Image,
        _ => DatasetKind::Tabular,
    };
    let weights = compute_lambda(basis);
    if exhaustive {
        let front = brute_force_front(basis, r, cap, workers)?;
        let report = selection_report(basis, &front, &weights)?;
        Ok(MofpcaRun {
            front,
            log: Vec::new(),
            report,
            config: None,
        })
    } else {
        let mut cfg = spea2::default_config(basis.dim(), r, kind)?;
        cfg.seed = seed;
        if let Some(o) = overrides {
            o.apply(&mut cfg);
        }
        let outcome = spea2::run(basis, &cfg)?;
        let report = selection_report(basis, &outcome.front, &weights)?;
        Ok(MofpcaRun {
            front: outcome.front,
            log: outcome.log,
            report,
            config: Some(cfg),
        })
    }
}
