//! Pareto dominance, non-dominated filtering and the exhaustive front.
//!
//! Dominance comparisons are exact floating-point comparisons: objective
//! values are computed through the same energy sums for every selection, so
//! ties are bitwise stable and an epsilon would only break transitivity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pca::{ComponentSelection, ObjectiveVector, PrincipalBasis};

/// A selection together with its evaluated objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontRecord {
    pub selection: ComponentSelection,
    pub objectives: ObjectiveVector,
}

/// Deduplicated non-dominated set, sorted by ascending reconstruction error.
pub type ParetoFront = Vec<FrontRecord>;

/// True iff `a` is at least as good as `b` in both objectives and strictly
/// better in one.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    a.recon_error <= b.recon_error
        && a.fairness <= b.fairness
        && (a.recon_error < b.recon_error || a.fairness < b.fairness)
}

/// Insert `rec` into a front kept sorted by ascending recon_error (and hence
/// strictly descending fairness). Dominated candidates are dropped; records
/// the candidate dominates are removed; an exact objective tie keeps the
/// lexicographically smaller selection.
pub(crate) fn insert_into_front(front: &mut ParetoFront, rec: FrontRecord) {
    let pos = front.partition_point(|p| p.objectives.recon_error < rec.objectives.recon_error);
    if pos > 0 && front[pos - 1].objectives.fairness <= rec.objectives.fairness {
        return; // dominated by the predecessor (strictly better recon)
    }
    if pos < front.len() {
        let peer = &front[pos];
        if peer.objectives.recon_error == rec.objectives.recon_error {
            if peer.objectives.fairness < rec.objectives.fairness {
                return; // dominated at equal recon
            }
            if peer.objectives.fairness == rec.objectives.fairness {
                if rec.selection < peer.selection {
                    front[pos] = rec;
                }
                return;
            }
        }
    }
    front.insert(pos, rec);
    let mut end = pos + 1;
    while end < front.len() && front[end].objectives.fairness >= front[pos].objectives.fairness {
        end += 1;
    }
    front.drain(pos + 1..end);
}

/// Filter `records` down to the non-dominated set, collapsing exact objective
/// duplicates to the lexicographically smallest selection; result sorted by
/// ascending recon_error.
pub fn nondominated_filter(records: &[FrontRecord]) -> Result<ParetoFront> {
    if records.is_empty() {
        return Err(Error::input("cannot filter an empty record list"));
    }
    let mut front = ParetoFront::new();
    for rec in records {
        insert_into_front(&mut front, rec.clone());
    }
    Ok(front)
}

/// Binomial coefficient saturating at `cap` (avoids overflow for large d).
pub fn binomial_capped(n: usize, k: usize, cap: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap as u128 {
            return cap.saturating_add(1);
        }
    }
    acc as u64
}

/// `rank`-th size-`r` combination of `{0..d-1}` in lexicographic order.
pub(crate) fn unrank_combination(d: usize, r: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(r);
    let mut x = 0usize;
    for slot in 0..r {
        loop {
            let with_x = binomial_capped(d - 1 - x, r - 1 - slot, u64::MAX - 1);
            if rank < with_x {
                out.push(x);
                x += 1;
                break;
            }
            rank -= with_x;
            x += 1;
        }
    }
    out
}

/// Advance `idx` to the next size-r combination of `{0..d-1}` in
/// lexicographic order; false once exhausted.
pub(crate) fn next_combination(idx: &mut [usize], d: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] < d - (r - i) {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Evaluate every size-`r` subset and return the exact Pareto front.
///
/// The enumeration may be partitioned over `workers` threads; chunk fronts
/// are merged in lexicographic chunk order, so the result is identical to
/// the sequential enumeration for any worker count.
pub fn brute_force_front(
    basis: &PrincipalBasis,
    r: usize,
    cap: u64,
    workers: usize,
) -> Result<ParetoFront> {
    let d = basis.dim();
    if r < 1 || r > d {
        return Err(Error::input(format!("r = {r} out of range for d = {d}")));
    }
    let count = binomial_capped(d, r, cap);
    if count > cap {
        return Err(Error::EnumerationCap {
            d,
            r,
            count: binomial_capped(d, r, u64::MAX - 1),
            cap,
        });
    }

    let workers = workers.max(1).min(count.max(1) as usize);
    let enumerate_range = |start: u64, end: u64| -> ParetoFront {
        let mut front = ParetoFront::new();
        if start >= end {
            return front;
        }
        let mut idx = unrank_combination(d, r, start);
        let mut remaining = end - start;
        loop {
            let sel = ComponentSelection::new(idx.clone(), d).expect("enumerated selection valid");
            let objectives = basis.evaluate(&sel);
            insert_into_front(
                &mut front,
                FrontRecord {
                    selection: sel,
                    objectives,
                },
            );
            remaining -= 1;
            if remaining == 0 || !next_combination(&mut idx, d) {
                break;
            }
        }
        front
    };

    if workers == 1 {
        return Ok(enumerate_range(0, count));
    }

    let chunk = count.div_ceil(workers as u64);
    let fronts: Vec<ParetoFront> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers as u64)
            .map(|w| {
                let start = w * chunk;
                let end = ((w + 1) * chunk).min(count);
                scope.spawn(move || enumerate_range(start, end))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });

    let mut merged = ParetoFront::new();
    for local in fronts {
        for rec in local {
            insert_into_front(&mut merged, rec);
        }
    }
    Ok(merged)
}
