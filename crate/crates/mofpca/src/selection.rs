//! Picking one record from the non-dominated set by a scale-compensated
//! weighted sum: the weight only offsets the magnitude gap between the two
//! objectives, treating them as equally important.

use serde::{Deserialize, Serialize};

use crate::dominance::FrontRecord;
use crate::error::{Error, Result};
use crate::pca::{ComponentSelection, PrincipalBasis};

/// Weighting derived from 1-dimensional projections: `m_re` is the
/// reconstruction error of the first component alone, `m_fm` the minimum
/// fairness over all single-component selections, and
/// `lambda = m_fm / (m_re + m_fm)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionWeights {
    pub lambda: f64,
    pub m_re: f64,
    pub m_fm: f64,
}

impl SelectionWeights {
    pub fn score(&self, record: &FrontRecord) -> f64 {
        self.lambda * record.objectives.recon_error
            + (1.0 - self.lambda) * record.objectives.fairness
    }
}

/// Compute the weights from the basis. A fully degenerate dataset (both
/// magnitudes zero) falls back to lambda = 1/2.
pub fn compute_lambda(basis: &PrincipalBasis) -> SelectionWeights {
    let d = basis.dim();
    assert!(d >= 1);
    let first = ComponentSelection::new(vec![0], d).expect("d >= 1");
    let m_re = basis.evaluate(&first).recon_error;
    let m_fm = (0..d)
        .map(|i| {
            let single = ComponentSelection::new(vec![i], d).expect("in range");
            basis.evaluate(&single).fairness
        })
        .fold(f64::INFINITY, f64::min);
    let lambda = if m_re + m_fm > 0.0 {
        m_fm / (m_re + m_fm)
    } else {
        0.5
    };
    SelectionWeights { lambda, m_re, m_fm }
}

/// Argmin of the weighted sum over the front; ties broken by smaller
/// reconstruction error, then by lexicographic indices. The result is always
/// a member of the front.
pub fn select_solution(front: &[FrontRecord], weights: &SelectionWeights) -> Result<FrontRecord> {
    if front.is_empty() {
        return Err(Error::input("cannot select from an empty front"));
    }
    let mut best = &front[0];
    let mut best_score = weights.score(best);
    for record in &front[1..] {
        let score = weights.score(record);
        let better = score < best_score
            || (score == best_score
                && (record.objectives.recon_error < best.objectives.recon_error
                    || (record.objectives.recon_error == best.objectives.recon_error
                        && record.selection < best.selection)));
        if better {
            best = record;
            best_score = score;
        }
    }
    Ok(best.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ScalingMode, StandardizedDataset};
    use crate::linalg::Mat;
    use crate::pca::{compute_basis, ObjectiveVector};

    fn rec(idx: &[usize], d: usize, r: f64, f: f64) -> FrontRecord {
        FrontRecord {
            selection: ComponentSelection::new(idx.to_vec(), d).unwrap(),
            objectives: ObjectiveVector {
                recon_error: r,
                fairness: f,
            },
        }
    }

    #[test]
    fn identical_groups_drive_lambda_to_zero() {
        let block = vec![
            vec![1.0, 0.2, -0.5],
            vec![-0.8, 1.4, 0.3],
            vec![0.1, -1.0, 0.9],
            vec![0.6, 0.7, -1.2],
        ];
        let mut rows = block.clone();
        rows.extend(block);
        let ds = StandardizedDataset::from_parts(
            Mat::from_rows(&rows),
            (0..4).collect(),
            ScalingMode::None,
        )
        .unwrap();
        let basis = compute_basis(&ds).unwrap();
        let w = compute_lambda(&basis);
        assert!(w.m_fm < 1e-18);
        assert!(w.m_re > 0.0);
        assert!(w.lambda < 1e-18, "lambda {}", w.lambda);
    }

    #[test]
    fn lambda_matches_hand_computation_on_toy() {
        let rows = vec![
            vec![2.0, 0.0],
            vec![-2.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ];
        let ds =
            StandardizedDataset::from_parts(Mat::from_rows(&rows), vec![0, 2], ScalingMode::None)
                .unwrap();
        let basis = compute_basis(&ds).unwrap();
        let w = compute_lambda(&basis);
        // singleton {0}: recon = trailing eigenvalue = 2
        assert!((w.m_re - 2.0).abs() < 1e-12);
        // enumerate both singletons by hand through evaluate()
        let f0 = basis
            .evaluate(&ComponentSelection::new(vec![0], 2).unwrap())
            .fairness;
        let f1 = basis
            .evaluate(&ComponentSelection::new(vec![1], 2).unwrap())
            .fairness;
        let expect = f0.min(f1);
        assert_eq!(w.m_fm, expect);
        assert!((w.lambda - expect / (2.0 + expect)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_dataset_falls_back_to_half() {
        // all-zero matrix: every objective is zero
        let rows = vec![vec![0.0, 0.0]; 4];
        let ds =
            StandardizedDataset::from_parts(Mat::from_rows(&rows), vec![0, 1], ScalingMode::None)
                .unwrap();
        let basis = compute_basis(&ds).unwrap();
        let w = compute_lambda(&basis);
        assert_eq!(w.lambda, 0.5);
    }

    #[test]
    fn singleton_front_is_forced() {
        let front = vec![rec(&[1], 4, 10.0, 0.3)];
        let w = SelectionWeights {
            lambda: 0.7,
            m_re: 1.0,
            m_fm: 1.0,
        };
        assert_eq!(select_solution(&front, &w).unwrap(), front[0]);
    }

    #[test]
    fn weighted_sum_arithmetic_picks_the_fair_record() {
        let front = vec![rec(&[0, 1], 4, 10.0, 0.5), rec(&[0, 2], 4, 12.0, 0.0)];
        let w = SelectionWeights {
            lambda: 0.01,
            m_re: 0.0,
            m_fm: 0.0,
        };
        // scores: 0.595 vs 0.12
        let chosen = select_solution(&front, &w).unwrap();
        assert_eq!(chosen.selection.indices(), &[0, 2]);
    }

    #[test]
    fn empty_front_is_an_error() {
        let w = SelectionWeights {
            lambda: 0.5,
            m_re: 1.0,
            m_fm: 1.0,
        };
        assert!(select_solution(&[], &w).is_err());
    }

    #[test]
    fn common_scaling_leaves_argmin_unchanged() {
        let front = vec![
            rec(&[0], 5, 5.0, 3.0),
            rec(&[1], 5, 6.0, 1.0),
            rec(&[2], 5, 9.0, 0.2),
        ];
        let w = SelectionWeights {
            lambda: 0.25,
            m_re: 0.0,
            m_fm: 0.0,
        };
        let baseline = select_solution(&front, &w).unwrap();
        let scaled: Vec<FrontRecord> = front
            .iter()
            .map(|r| FrontRecord {
                selection: r.selection.clone(),
                objectives: ObjectiveVector {
                    recon_error: r.objectives.recon_error * 37.0,
                    fairness: r.objectives.fairness * 37.0,
                },
            })
            .collect();
        let chosen = select_solution(&scaled, &w).unwrap();
        assert_eq!(chosen.selection, baseline.selection);
    }

    #[test]
    fn weak_minimizer_of_both_objectives_wins() {
        let front = vec![
            rec(&[0], 5, 1.0, 1.0),
            rec(&[1], 5, 1.0, 2.0),
            rec(&[2], 5, 2.0, 1.0),
        ];
        for lambda in [0.0, 0.3, 0.9, 1.0] {
            let w = SelectionWeights {
                lambda,
                m_re: 0.0,
                m_fm: 0.0,
            };
            let chosen = select_solution(&front, &w).unwrap();
            assert_eq!(chosen.selection.indices(), &[0], "lambda {lambda}");
        }
    }

    #[test]
    fn ties_break_by_recon_then_lexicographic() {
        // equal scores with lambda = 0.5
        let front = vec![
            rec(&[3], 5, 4.0, 0.0),
            rec(&[1], 5, 2.0, 2.0),
            rec(&[0], 5, 2.0, 2.0),
        ];
        let w = SelectionWeights {
            lambda: 0.5,
            m_re: 0.0,
            m_fm: 0.0,
        };
        let chosen = select_solution(&front, &w).unwrap();
        assert_eq!(chosen.selection.indices(), &[0]);
    }
}
