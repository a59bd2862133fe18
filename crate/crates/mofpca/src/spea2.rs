//! SPEA2 evolutionary search over component selections.
//!
//! Strength / raw-fitness / density follow the standard published scheme with
//! the constants fixed here: neighbor rank k = round(sqrt(population_size +
//! archive_size)), density guard +2, min-max objective normalization over the
//! current pool. The RNG is a single seeded ChaCha8 stream consumed only by
//! initialization, mating selection and variation; objective evaluation never
//! touches it, so results do not depend on any worker count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dominance::{binomial_capped, dominates, nondominated_filter, FrontRecord, ParetoFront};
use crate::error::{Error, Result};
use crate::pca::{ComponentSelection, ObjectiveVector, PrincipalBasis};

/// Which default generation budget to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Tabular,
    Image,
}

/// Search parameters. `crossover_rate` is a percentage in [0, 100]; the
/// remaining share of offspring is produced by mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spea2Config {
    pub population_size: usize,
    pub archive_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub seed: u64,
    pub r: usize,
    pub d: usize,
    /// Indices replaced per mutation; 1 is the default single-swap behaviour.
    #[serde(default = "default_mutation_swaps")]
    pub mutation_swaps: usize,
}

fn default_mutation_swaps() -> usize {
    1
}

impl Spea2Config {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size must be at least 2"));
        }
        if self.archive_size < 1 {
            return Err(Error::config("archive_size must be at least 1"));
        }
        if self.generations < 1 {
            return Err(Error::config("generations must be at least 1"));
        }
        if !(0.0..=100.0).contains(&self.crossover_rate) {
            return Err(Error::config("crossover_rate must be in [0, 100]"));
        }
        if self.r < 1 || self.r > self.d {
            return Err(Error::config(format!(
                "r = {} out of range for d = {}",
                self.r, self.d
            )));
        }
        if self.mutation_swaps < 1 || self.mutation_swaps > self.r {
            return Err(Error::config("mutation_swaps must be in [1, r]"));
        }
        Ok(())
    }

    /// Neighbor rank used for the density estimate.
    pub fn neighbor_rank(&self) -> usize {
        let k = ((self.population_size + self.archive_size) as f64)
            .sqrt()
            .round() as usize;
        k.max(1)
    }
}

/// Half-away-from-zero rounding, the single convention used for every
/// `round` in the default parameter formulas.
fn round_half_away(x: f64) -> i64 {
    x.round() as i64
}

/// Default parameters: population min(100, round(C(d,r)/2)) floored at 2,
/// archive round(population/2) floored at 1, crossover 50%, 30 generations
/// for tabular data and 50 for image data.
pub fn default_config(d: usize, r: usize, kind: DatasetKind) -> Result<Spea2Config> {
    if r < 1 || r > d {
        return Err(Error::config(format!("r = {r} out of range for d = {d}")));
    }
    let subsets = binomial_capped(d, r, 1_000);
    let population_size = round_half_away(0.5 * subsets as f64).clamp(2, 100) as usize;
    let archive_size = round_half_away(population_size as f64 / 2.0).max(1) as usize;
    Ok(Spea2Config {
        population_size,
        archive_size,
        generations: match kind {
            DatasetKind::Tabular => 30,
            DatasetKind::Image => 50,
        },
        crossover_rate: 50.0,
        seed: 0,
        r,
        d,
        mutation_swaps: 1,
    })
}

/// An individual with the SPEA2 fitness decomposition attached.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedIndividual {
    pub selection: ComponentSelection,
    pub objectives: ObjectiveVector,
    pub strength: usize,
    pub raw_fitness: f64,
    pub density: f64,
    pub fitness: f64,
}

/// Draw `population_size` pairwise-distinct size-r subsets uniformly; when
/// fewer than `population_size` subsets exist, all of them are returned.
pub fn initialize_population(cfg: &Spea2Config, rng: &mut ChaCha8Rng) -> Vec<ComponentSelection> {
    let total = binomial_capped(cfg.d, cfg.r, u64::MAX - 1);
    if total < cfg.population_size as u64 {
        let mut out = Vec::with_capacity(total as usize);
        let mut idx: Vec<usize> = (0..cfg.r).collect();
        loop {
            out.push(ComponentSelection::new(idx.clone(), cfg.d).expect("valid"));
            if !crate::dominance::next_combination(&mut idx, cfg.d) {
                break;
            }
        }
        return out;
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(cfg.population_size);
    while out.len() < cfg.population_size {
        let mut idx = rand::seq::index::sample(rng, cfg.d, cfg.r).into_vec();
        idx.sort_unstable();
        if seen.insert(idx.clone()) {
            out.push(ComponentSelection::new(idx, cfg.d).expect("sampled selection valid"));
        }
    }
    out
}

/// SPEA2 fitness for every pool member (population plus archive).
pub fn assign_fitness(
    pool: &[(ComponentSelection, ObjectiveVector)],
    neighbor_rank: usize,
) -> Vec<EvaluatedIndividual> {
    let m = pool.len();
    assert!(m > 0, "fitness over an empty pool");

    let mut strength = vec![0usize; m];
    let mut dominators: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in 0..m {
            if i != j && dominates(&pool[i].1, &pool[j].1) {
                strength[i] += 1;
                dominators[j].push(i);
            }
        }
    }
    let raw: Vec<f64> = (0..m)
        .map(|i| dominators[i].iter().map(|&j| strength[j] as f64).sum())
        .collect();

    let norm = normalize_objectives(pool.iter().map(|(_, o)| *o));
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut dists: Vec<f64> = (0..m)
            .filter(|&j| j != i)
            .map(|j| euclid(norm[i], norm[j]))
            .collect();
        dists.sort_by(f64::total_cmp);
        let sigma = if dists.is_empty() {
            0.0
        } else {
            dists[neighbor_rank.min(dists.len()) - 1]
        };
        let density = 1.0 / (sigma + 2.0);
        out.push(EvaluatedIndividual {
            selection: pool[i].0.clone(),
            objectives: pool[i].1,
            strength: strength[i],
            raw_fitness: raw[i],
            density,
            fitness: raw[i] + density,
        });
    }
    out
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

/// Min-max normalization per objective; a zero-range objective contributes 0.
fn normalize_objectives(objs: impl Iterator<Item = ObjectiveVector> + Clone) -> Vec<(f64, f64)> {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for o in objs.clone() {
        lo.0 = lo.0.min(o.recon_error);
        lo.1 = lo.1.min(o.fairness);
        hi.0 = hi.0.max(o.recon_error);
        hi.1 = hi.1.max(o.fairness);
    }
    let range = (hi.0 - lo.0, hi.1 - lo.1);
    objs.map(|o| {
        (
            if range.0 > 0.0 {
                (o.recon_error - lo.0) / range.0
            } else {
                0.0
            },
            if range.1 > 0.0 {
                (o.fairness - lo.1) / range.1
            } else {
                0.0
            },
        )
    })
    .collect()
}

/// Select the next archive: all non-dominated individuals (fitness < 1),
/// filled with the best dominated ones when short, or truncated by repeatedly
/// removing the individual closest to its nearest neighbor (ties broken by
/// the second-nearest distance, then by lexicographic genome).
pub fn environmental_selection(
    evaluated: &[EvaluatedIndividual],
    archive_size: usize,
) -> Vec<EvaluatedIndividual> {
    assert!(archive_size >= 1);
    let nd: Vec<usize> = (0..evaluated.len())
        .filter(|&i| evaluated[i].fitness < 1.0)
        .collect();

    if nd.len() <= archive_size {
        let mut archive: Vec<EvaluatedIndividual> =
            nd.iter().map(|&i| evaluated[i].clone()).collect();
        let mut rest: Vec<usize> = (0..evaluated.len())
            .filter(|&i| evaluated[i].fitness >= 1.0)
            .collect();
        rest.sort_by(|&a, &b| {
            evaluated[a]
                .fitness
                .total_cmp(&evaluated[b].fitness)
                .then_with(|| evaluated[a].selection.cmp(&evaluated[b].selection))
        });
        for &i in rest.iter().take(archive_size - archive.len()) {
            archive.push(evaluated[i].clone());
        }
        return archive;
    }

    // Truncation: normalized coordinates fixed over the non-dominated set,
    // nearest neighbors recomputed among the survivors after each removal.
    let coords = normalize_objectives(nd.iter().map(|&i| evaluated[i].objectives));
    let mut alive: Vec<usize> = (0..nd.len()).collect();
    while alive.len() > archive_size {
        let mut victim = 0usize;
        let mut victim_key: Option<(f64, f64, &ComponentSelection)> = None;
        for (pos, &i) in alive.iter().enumerate() {
            let mut d1 = f64::INFINITY;
            let mut d2 = f64::INFINITY;
            for &j in &alive {
                if i == j {
                    continue;
                }
                let dist = euclid(coords[i], coords[j]);
                if dist < d1 {
                    d2 = d1;
                    d1 = dist;
                } else if dist < d2 {
                    d2 = dist;
                }
            }
            let key = (d1, d2, &evaluated[nd[i]].selection);
            let smaller = match &victim_key {
                None => true,
                Some(best) => {
                    key.0
                        .total_cmp(&best.0)
                        .then(key.1.total_cmp(&best.1))
                        .then(key.2.cmp(best.2))
                        == std::cmp::Ordering::Less
                }
            };
            if smaller {
                victim_key = Some(key);
                victim = pos;
            }
        }
        alive.remove(victim);
    }
    alive
        .into_iter()
        .map(|i| evaluated[nd[i]].clone())
        .collect()
}

/// Mating selection: `count` binary tournaments over the archive, each
/// keeping the lower-fitness of two uniform draws (uniform pick on a tie).
pub fn binary_tournament(
    archive: &[EvaluatedIndividual],
    rng: &mut ChaCha8Rng,
    count: usize,
) -> Vec<ComponentSelection> {
    assert!(!archive.is_empty(), "tournament over an empty archive");
    (0..count)
        .map(|_| {
            let a = rng.gen_range(0..archive.len());
            let b = rng.gen_range(0..archive.len());
            let winner = if archive[a].fitness < archive[b].fitness {
                a
            } else if archive[b].fitness < archive[a].fitness {
                b
            } else if rng.gen_range(0..2u8) == 0 {
                a
            } else {
                b
            };
            archive[winner].selection.clone()
        })
        .collect()
}

/// Recombine two selections: keep their intersection, fill the remaining
/// slots by uniform sampling without replacement from the symmetric
/// difference. The child is always a feasible duplicate-free selection.
pub fn crossover(
    first: &ComponentSelection,
    second: &ComponentSelection,
    rng: &mut ChaCha8Rng,
) -> ComponentSelection {
    let r = first.len();
    debug_assert_eq!(r, second.len());
    let mut child: Vec<usize> = first
        .indices()
        .iter()
        .copied()
        .filter(|i| second.contains(*i))
        .collect();
    let mut pool: Vec<usize> = first
        .indices()
        .iter()
        .chain(second.indices())
        .copied()
        .filter(|&i| !(first.contains(i) && second.contains(i)))
        .collect();
    pool.sort_unstable();
    let need = r - child.len();
    for slot in 0..need {
        let pick = rng.gen_range(slot..pool.len());
        pool.swap(slot, pick);
    }
    child.extend_from_slice(&pool[..need]);
    child.sort_unstable();
    ComponentSelection::from_sorted_unchecked(child)
}

/// Replace one uniformly chosen index (or `swaps` of them) with uniformly
/// chosen indices currently outside the selection. Returns the parent
/// unchanged when the selection already spans all of `{0..d-1}`.
pub fn mutate(
    parent: &ComponentSelection,
    rng: &mut ChaCha8Rng,
    d: usize,
    swaps: usize,
) -> ComponentSelection {
    let r = parent.len();
    if r == d {
        return parent.clone();
    }
    let mut current = parent.indices().to_vec();
    for _ in 0..swaps.max(1) {
        let pos = rng.gen_range(0..r);
        let outside_rank = rng.gen_range(0..d - r);
        // map the rank onto the sorted complement of `current`
        let removed = current.remove(pos);
        current.sort_unstable();
        let mut seen = 0usize;
        let mut replacement = None;
        let mut cursor = 0usize;
        for candidate in 0..d {
            if cursor < current.len() && current[cursor] == candidate {
                cursor += 1;
                continue;
            }
            if candidate == removed {
                continue;
            }
            if seen == outside_rank {
                replacement = Some(candidate);
                break;
            }
            seen += 1;
        }
        current.push(replacement.expect("complement nonempty"));
        current.sort_unstable();
    }
    debug_assert!(current.iter().all(|&i| i < d));
    ComponentSelection::from_sorted_unchecked(current)
}

/// One line of the per-generation run log.
#[derive(Debug, Clone, Serialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub archive_size: usize,
    pub best_recon_error: f64,
    pub best_fairness: f64,
    /// Spread proxy: sum over objectives of the archive's range normalized
    /// by the pool's range (0 for a degenerate objective).
    pub spread: f64,
}

/// Outcome of a full run: the deduplicated non-dominated front of the final
/// archive, plus the per-generation log.
#[derive(Debug, Clone)]
pub struct Spea2Outcome {
    pub front: ParetoFront,
    pub log: Vec<GenerationLog>,
}

/// Run the full loop for `cfg.generations` generations and return the
/// non-dominated subset of the final archive.
pub fn run(basis: &PrincipalBasis, cfg: &Spea2Config) -> Result<Spea2Outcome> {
    cfg.validate()?;
    if cfg.d != basis.dim() {
        return Err(Error::config(format!(
            "config d = {} does not match basis dimension {}",
            cfg.d,
            basis.dim()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let neighbor_rank = cfg.neighbor_rank();

    let evaluate = |sel: ComponentSelection| {
        let objectives = basis.evaluate(&sel);
        (sel, objectives)
    };

    let mut population: Vec<(ComponentSelection, ObjectiveVector)> =
        initialize_population(cfg, &mut rng)
            .into_iter()
            .map(evaluate)
            .collect();
    let mut archive: Vec<EvaluatedIndividual> = Vec::new();
    let mut log = Vec::with_capacity(cfg.generations);

    for generation in 1..=cfg.generations {
        let mut pool: Vec<(ComponentSelection, ObjectiveVector)> = population.clone();
        pool.extend(archive.iter().map(|e| (e.selection.clone(), e.objectives)));

        let evaluated = assign_fitness(&pool, neighbor_rank);
        archive = environmental_selection(&evaluated, cfg.archive_size);
        log.push(generation_stats(generation, &archive, &pool));

        if generation == cfg.generations {
            break;
        }

        let mating = binary_tournament(&archive, &mut rng, cfg.population_size);
        population = variation(&mating, cfg, &mut rng)
            .into_iter()
            .map(evaluate)
            .collect();
    }

    let records: Vec<FrontRecord> = archive
        .iter()
        .map(|e| FrontRecord {
            selection: e.selection.clone(),
            objectives: e.objectives,
        })
        .collect();
    let front = nondominated_filter(&records)?;
    Ok(Spea2Outcome { front, log })
}

/// Produce the next population: round(crossover_rate% · population_size)
/// crossover children from consecutive mating-pool pairs, the remainder by
/// mutating mating-pool members in order (both with wrap-around).
fn variation(
    mating: &[ComponentSelection],
    cfg: &Spea2Config,
    rng: &mut ChaCha8Rng,
) -> Vec<ComponentSelection> {
    let p = cfg.population_size;
    let n_cross =
        round_half_away(cfg.crossover_rate / 100.0 * p as f64).clamp(0, p as i64) as usize;
    let mut next = Vec::with_capacity(p);
    for i in 0..n_cross {
        let a = &mating[(2 * i) % mating.len()];
        let b = &mating[(2 * i + 1) % mating.len()];
        next.push(crossover(a, b, rng));
    }
    for j in 0..p - n_cross {
        let parent = &mating[(2 * n_cross + j) % mating.len()];
        next.push(mutate(parent, rng, cfg.d, cfg.mutation_swaps));
    }
    next
}

fn generation_stats(
    generation: usize,
    archive: &[EvaluatedIndividual],
    pool: &[(ComponentSelection, ObjectiveVector)],
) -> GenerationLog {
    let best_recon_error = archive
        .iter()
        .map(|e| e.objectives.recon_error)
        .fold(f64::INFINITY, f64::min);
    let best_fairness = archive
        .iter()
        .map(|e| e.objectives.fairness)
        .fold(f64::INFINITY, f64::min);

    let range = |vals: &mut dyn Iterator<Item = f64>| -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in vals {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    };
    let (plo_r, phi_r) = range(&mut pool.iter().map(|(_, o)| o.recon_error));
    let (plo_f, phi_f) = range(&mut pool.iter().map(|(_, o)| o.fairness));
    let (alo_r, ahi_r) = range(&mut archive.iter().map(|e| e.objectives.recon_error));
    let (alo_f, ahi_f) = range(&mut archive.iter().map(|e| e.objectives.fairness));
    let ratio = |arange: f64, prange: f64| if prange > 0.0 { arange / prange } else { 0.0 };
    let spread = ratio(ahi_r - alo_r, phi_r - plo_r) + ratio(ahi_f - alo_f, phi_f - plo_f);

    GenerationLog {
        generation,
        archive_size: archive.len(),
        best_recon_error,
        best_fairness,
        spread,
    }
}
