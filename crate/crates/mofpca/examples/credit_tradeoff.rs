//! Front + balanced pick on the bundled credit dataset.
//!
//! ```sh
//! cargo run --release -p mofpca --example credit_tradeoff
//! ```

use mofpca::dataset::{load_csv, standardize, ScalingMode};
use mofpca::pca::compute_basis;
use mofpca::selection::{compute_lambda, select_solution};
use mofpca::spea2::{default_config, run, DatasetKind};

fn main() -> mofpca::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/default_credit.csv");
    let (table, groups) = load_csv(path, "EDUCATION", "lower")?;
    let ds = standardize(table, &groups, ScalingMode::ZScore);
    let basis = compute_basis(&ds)?;
    println!(
        "dataset: {} samples, {} attributes, groups {} / {}",
        ds.n(),
        ds.dim(),
        ds.n_a(),
        ds.n_b()
    );

    let mut cfg = default_config(basis.dim(), 10, DatasetKind::Tabular)?;
    cfg.seed = 42;
    let outcome = run(&basis, &cfg)?;
    println!("non-dominated selections for r = {}:", cfg.r);
    for rec in &outcome.front {
        println!(
            "  [{}]  recon {:12.2}  fairness {:.6}",
            rec.selection, rec.objectives.recon_error, rec.objectives.fairness
        );
    }

    let weights = compute_lambda(&basis);
    let chosen = select_solution(&outcome.front, &weights)?;
    println!(
        "balanced pick (lambda = {:.3e}): components {:?} (1-based)",
        weights.lambda,
        chosen.selection.one_based()
    );
    Ok(())
}
