//! Principal basis computation and O(r) objective evaluation.
//!
//! The full orthonormal basis is computed once from the Gram matrix; per-
//! component energies are precomputed so that both objectives for any
//! component selection reduce to sums over the selected indices.

use serde::{Deserialize, Serialize};

use crate::dataset::StandardizedDataset;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Mat};

/// A sorted, duplicate-free list of `r` component indices into the basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentSelection {
    indices: Vec<usize>,
}

impl ComponentSelection {
    /// Build from strictly increasing indices; `r >= 1` is required.
    pub fn new(indices: Vec<usize>, d: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::input(
                "selection must contain at least one component",
            ));
        }
        if indices.len() > d {
            return Err(Error::input(format!(
                "selection of size {} exceeds dimension {d}",
                indices.len()
            )));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::input(
                    "selection indices must be strictly increasing (no duplicates)",
                ));
            }
        }
        if *indices.last().unwrap() >= d {
            return Err(Error::input(format!(
                "component index {} out of range for dimension {d}",
                indices.last().unwrap()
            )));
        }
        Ok(ComponentSelection { indices })
    }

    /// Build from indices in any order; duplicates are rejected.
    pub fn from_unsorted(mut indices: Vec<usize>, d: usize) -> Result<Self> {
        indices.sort_unstable();
        Self::new(indices, d)
    }

    /// The classical selection `{0, .., r-1}`.
    pub fn leading(r: usize, d: usize) -> Result<Self> {
        Self::new((0..r).collect(), d)
    }

    /// For operators whose children are feasible by construction.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(!indices.is_empty());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        ComponentSelection { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }

    /// 1-based rendering, matching the usual typographic convention.
    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }
}

impl std::fmt::Display for ComponentSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// The two objective values for one selection: total reconstruction error
/// (squared Frobenius norm, unnormalized) and the group-disparity fairness
/// measure (squared difference of per-sample group errors).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub recon_error: f64,
    pub fairness: f64,
}

impl ObjectiveVector {
    /// Bit pattern used for exact set comparisons in tests and dedup.
    pub fn bits(&self) -> (u64, u64) {
        (self.recon_error.to_bits(), self.fairness.to_bits())
    }
}

/// Raw per-group residual errors for one selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupErrors {
    pub group_a: f64,
    pub group_b: f64,
}

/// Full orthonormal principal basis with per-component energy vectors.
///
/// Columns of `u` are unit-norm eigenvectors of `XᵀX`, ordered by descending
/// eigenvalue; each eigenvector's sign is fixed so its largest-magnitude
/// entry is positive.
#[derive(Debug, Clone)]
pub struct PrincipalBasis {
    u: Mat,
    eigenvalues: Vec<f64>,
    total_energy: f64,
    group_a_energy: Vec<f64>,
    group_b_energy: Vec<f64>,
    group_a_total: f64,
    group_b_total: f64,
    n: usize,
    n_a: usize,
    n_b: usize,
}

impl PrincipalBasis {
    pub fn u(&self) -> &Mat {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn total_energy(&self) -> f64 {
        self.total_energy
    }

    pub fn group_a_energy(&self) -> &[f64] {
        &self.group_a_energy
    }

    pub fn group_b_energy(&self) -> &[f64] {
        &self.group_b_energy
    }

    pub fn group_a_total(&self) -> f64 {
        self.group_a_total
    }

    pub fn group_b_total(&self) -> f64 {
        self.group_b_total
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// Evaluate both objectives for `selection` in O(r) via the precomputed
    /// energies. Equals the direct Frobenius-norm formulas because the basis
    /// columns are orthonormal; the full selection reconstructs exactly, so
    /// both objectives are literal zeros there.
    pub fn evaluate(&self, selection: &ComponentSelection) -> ObjectiveVector {
        let d = self.dim();
        debug_assert!(selection.indices().iter().all(|&i| i < d));
        if selection.len() == d {
            return ObjectiveVector {
                recon_error: 0.0,
                fairness: 0.0,
            };
        }
        let mut kept = 0.0;
        let mut kept_a = 0.0;
        let mut kept_b = 0.0;
        for &i in selection.indices() {
            kept += self.eigenvalues[i];
            kept_a += self.group_a_energy[i];
            kept_b += self.group_b_energy[i];
        }
        let recon_error = (self.total_energy - kept).max(0.0);
        let res_a = (self.group_a_total - kept_a).max(0.0);
        let res_b = (self.group_b_total - kept_b).max(0.0);
        let gap = res_a / self.n_a as f64 - res_b / self.n_b as f64;
        ObjectiveVector {
            recon_error,
            fairness: gap * gap,
        }
    }

    /// Raw per-group residual errors for `selection`.
    pub fn group_errors(&self, selection: &ComponentSelection) -> GroupErrors {
        if selection.len() == self.dim() {
            return GroupErrors {
                group_a: 0.0,
                group_b: 0.0,
            };
        }
        let mut kept_a = 0.0;
        let mut kept_b = 0.0;
        for &i in selection.indices() {
            kept_a += self.group_a_energy[i];
            kept_b += self.group_b_energy[i];
        }
        GroupErrors {
            group_a: (self.group_a_total - kept_a).max(0.0),
            group_b: (self.group_b_total - kept_b).max(0.0),
        }
    }
}

/// Compute the full principal basis of a standardized dataset.
pub fn compute_basis(ds: &StandardizedDataset) -> Result<PrincipalBasis> {
    let x = ds.x();
    let n = x.nrows();
    let d = x.ncols();
    for i in 0..n {
        if x.row(i).iter().any(|v| !v.is_finite()) {
            return Err(Error::input("non-finite value in standardized matrix"));
        }
    }

    let gram = x.gram();
    let (raw_vals, raw_vecs) = symmetric_eigen(&gram);

    // Descending eigenvalue order; ties keep the solver's index order.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        raw_vals[b]
            .partial_cmp(&raw_vals[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut u = Mat::zeros(d, d);
    let mut eigenvalues = Vec::with_capacity(d);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(raw_vals[src].max(0.0));
        // Sign fix: largest-magnitude entry positive.
        let mut best = 0;
        let mut best_abs = -1.0;
        for row in 0..d {
            let a = raw_vecs.get(row, src).abs();
            if a > best_abs {
                best_abs = a;
                best = row;
            }
        }
        let flip = raw_vecs.get(best, src) < 0.0;
        for row in 0..d {
            let v = raw_vecs.get(row, src);
            u.set(row, col, if flip { -v } else { v });
        }
    }

    #[cfg(debug_assertions)]
    for i in 0..d {
        for j in i..d {
            let dot: f64 = (0..d).map(|k| u.get(k, i) * u.get(k, j)).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            debug_assert!(
                (dot - expect).abs() < 1e-8,
                "basis columns {i},{j} not orthonormal: {dot}"
            );
        }
    }

    // Project once, then split the per-component energies by group.
    let projected = x.matmul(&u);
    let mut group_a_energy = vec![0.0; d];
    let mut group_b_energy = vec![0.0; d];
    for &row in ds.group_a_rows() {
        for (j, v) in projected.row(row).iter().enumerate() {
            group_a_energy[j] += v * v;
        }
    }
    for &row in ds.group_b_rows() {
        for (j, v) in projected.row(row).iter().enumerate() {
            group_b_energy[j] += v * v;
        }
    }

    let mut group_a_total = 0.0;
    for &row in ds.group_a_rows() {
        group_a_total += x.row(row).iter().map(|v| v * v).sum::<f64>();
    }
    let mut group_b_total = 0.0;
    for &row in ds.group_b_rows() {
        group_b_total += x.row(row).iter().map(|v| v * v).sum::<f64>();
    }

    Ok(PrincipalBasis {
        u,
        eigenvalues,
        total_energy: group_a_total + group_b_total,
        group_a_energy,
        group_b_energy,
        group_a_total,
        group_b_total,
        n,
        n_a: ds.n_a(),
        n_b: ds.n_b(),
    })
}

/// Reference implementation of both objectives: forms the projection
/// `X U* U*ᵀ` explicitly and takes Frobenius norms. O(n·d·r); used as the
/// independent oracle for [`PrincipalBasis::evaluate`].
pub fn evaluate_direct(
    ds: &StandardizedDataset,
    basis: &PrincipalBasis,
    selection: &ComponentSelection,
) -> Result<ObjectiveVector> {
    let d = ds.dim();
    if selection.indices().iter().any(|&i| i >= d) {
        return Err(Error::input("component index out of range"));
    }
    let r = selection.len();
    let x = ds.x();
    let n = x.nrows();

    // Residual ||x - U* (U*ᵀ x)||² per row, accumulated by group.
    let mut res = vec![0.0f64; n];
    let mut coeff = vec![0.0f64; r];
    for (row, slot) in res.iter_mut().enumerate() {
        let xr = x.row(row);
        for (k, &col) in selection.indices().iter().enumerate() {
            let mut dot = 0.0;
            for (j, &xj) in xr.iter().enumerate() {
                dot += basis.u().get(j, col) * xj;
            }
            coeff[k] = dot;
        }
        let mut sq = 0.0;
        for (j, &xj) in xr.iter().enumerate() {
            let mut rec = 0.0;
            for (k, &col) in selection.indices().iter().enumerate() {
                rec += basis.u().get(j, col) * coeff[k];
            }
            let diff = xj - rec;
            sq += diff * diff;
        }
        *slot = sq;
    }

    let err_a: f64 = ds.group_a_rows().iter().map(|&i| res[i]).sum();
    let err_b: f64 = ds.group_b_rows().iter().map(|&i| res[i]).sum();
    let gap = err_a / ds.n_a() as f64 - err_b / ds.n_b() as f64;
    Ok(ObjectiveVector {
        recon_error: err_a + err_b,
        fairness: gap * gap,
    })
}

/// On-disk JSON form of a basis. The eigenvector matrix is optional; energies
/// and eigenvalues are always present.
#[derive(Debug, Serialize, Deserialize)]
pub struct BasisFile {
    pub schema_version: u32,
    pub d: usize,
    pub n: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub total_energy: f64,
    pub group_a_total: f64,
    pub group_b_total: f64,
    pub eigenvalues: Vec<f64>,
    pub group_a_energy: Vec<f64>,
    pub group_b_energy: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<f64>>>,
}

pub const BASIS_SCHEMA_VERSION: u32 = 1;

impl BasisFile {
    pub fn from_basis(basis: &PrincipalBasis, include_matrix: bool) -> Self {
        let u = include_matrix.then(|| {
            (0..basis.dim())
                .map(|i| basis.u().row(i).to_vec())
                .collect()
        });
        BasisFile {
            schema_version: BASIS_SCHEMA_VERSION,
            d: basis.dim(),
            n: basis.n(),
            n_a: basis.n_a(),
            n_b: basis.n_b(),
            total_energy: basis.total_energy(),
            group_a_total: basis.group_a_total(),
            group_b_total: basis.group_b_total(),
            eigenvalues: basis.eigenvalues().to_vec(),
            group_a_energy: basis.group_a_energy().to_vec(),
            group_b_energy: basis.group_b_energy().to_vec(),
            u,
        }
    }

    /// Rebuild a basis. Files exported without the eigenvector matrix are
    /// rejected here rather than restored with a placeholder, so a re-imported
    /// basis can never project incorrectly.
    pub fn into_basis(self) -> Result<PrincipalBasis> {
        if self.schema_version != BASIS_SCHEMA_VERSION {
            return Err(Error::input(format!(
                "unsupported basis schema version {}",
                self.schema_version
            )));
        }
        let d = self.d;
        if self.eigenvalues.len() != d
            || self.group_a_energy.len() != d
            || self.group_b_energy.len() != d
        {
            return Err(Error::input("basis file arrays disagree with dimension"));
        }
        let u =
            match self.u {
                Some(rows) => {
                    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                        return Err(Error::input("basis matrix is not d×d"));
                    }
                    Mat::from_rows(&rows)
                }
                None => return Err(Error::input(
                    "basis file lacks the eigenvector matrix; re-export with the matrix included",
                )),
            };
        Ok(PrincipalBasis {
            u,
            eigenvalues: self.eigenvalues,
            total_energy: self.total_energy,
            group_a_energy: self.group_a_energy,
            group_b_energy: self.group_b_energy,
            group_a_total: self.group_a_total,
            group_b_total: self.group_b_total,
            n: self.n,
            n_a: self.n_a,
            n_b: self.n_b,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ScalingMode;

    fn dataset(rows: &[Vec<f64>], a: Vec<usize>) -> StandardizedDataset {
        StandardizedDataset::from_parts(Mat::from_rows(rows), a, ScalingMode::None).unwrap()
    }

    #[test]
    fn selection_rejects_duplicates_and_out_of_range() {
        assert!(ComponentSelection::new(vec![0, 0], 3).is_err());
        assert!(ComponentSelection::new(vec![2, 1], 3).is_err());
        assert!(ComponentSelection::new(vec![0, 3], 3).is_err());
        assert!(ComponentSelection::new(vec![], 3).is_err());
        assert!(ComponentSelection::from_unsorted(vec![2, 0], 3).is_ok());
    }

    #[test]
    fn axis_aligned_data_yields_standard_axes() {
        // Columns scaled so cov is diag(3, 1) up to a common factor.
        let s3 = 3.0f64.sqrt();
        let rows = vec![
            vec![s3, 1.0],
            vec![-s3, -1.0],
            vec![s3, -1.0],
            vec![-s3, 1.0],
        ];
        let ds = dataset(&rows, vec![0, 1]);
        let basis = compute_basis(&ds).unwrap();
        assert!((basis.eigenvalues()[0] - 12.0).abs() < 1e-9);
        assert!((basis.eigenvalues()[1] - 4.0).abs() < 1e-9);
        // first axis is e0, second is e1 (signs fixed positive)
        assert!((basis.u().get(0, 0).abs() - 1.0).abs() < 1e-9);
        assert!(basis.u().get(1, 0).abs() < 1e-9);
        assert!((basis.u().get(1, 1).abs() - 1.0).abs() < 1e-9);
        // top-1 residual is the trailing eigenvalue mass
        let top1 = ComponentSelection::leading(1, 2).unwrap();
        let obj = basis.evaluate(&top1);
        assert!((obj.recon_error - 4.0).abs() < 1e-9);
    }

    #[test]
    fn basis_invariants_hold_on_correlated_toy() {
        let rows = vec![
            vec![1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, 0.5],
            vec![-1.0, -0.5],
        ];
        let ds = dataset(&rows, vec![0, 2]);
        let basis = compute_basis(&ds).unwrap();
        // UᵀU = I
        for i in 0..2 {
            for j in 0..2 {
                let dot: f64 = (0..2)
                    .map(|k| basis.u().get(k, i) * basis.u().get(k, j))
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-8);
            }
        }
        // eigenvalues nonincreasing, sum to total energy
        assert!(basis.eigenvalues()[0] >= basis.eigenvalues()[1]);
        let total: f64 = basis.eigenvalues().iter().sum();
        assert!((total - basis.total_energy()).abs() <= 1e-8 * basis.total_energy());
        // per-component split sums to the eigenvalue
        for i in 0..2 {
            let sum = basis.group_a_energy()[i] + basis.group_b_energy()[i];
            let lam = basis.eigenvalues()[i];
            assert!((sum - lam).abs() <= 1e-8 * lam.max(1.0));
        }
    }

    #[test]
    fn full_selection_reconstructs_exactly() {
        let rows = vec![
            vec![0.3, -1.2, 2.0],
            vec![1.5, 0.2, -0.7],
            vec![-0.4, 0.9, 0.1],
            vec![2.2, -0.5, 1.3],
            vec![-1.0, 1.1, -2.2],
        ];
        let ds = dataset(&rows, vec![0, 3]);
        let basis = compute_basis(&ds).unwrap();
        let all = ComponentSelection::leading(3, 3).unwrap();
        let obj = basis.evaluate(&all);
        assert_eq!(obj.recon_error, 0.0);
        let scale = (basis.total_energy() / basis.n() as f64).powi(2);
        assert!(obj.fairness <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn identical_groups_are_perfectly_fair() {
        let block = vec![
            vec![0.7, -0.3, 1.1],
            vec![-1.4, 0.8, 0.2],
            vec![0.5, 2.0, -0.9],
        ];
        let mut rows = block.clone();
        rows.extend(block);
        let ds = dataset(&rows, vec![0, 1, 2]);
        let basis = compute_basis(&ds).unwrap();
        for sel in [
            ComponentSelection::new(vec![0], 3).unwrap(),
            ComponentSelection::new(vec![1, 2], 3).unwrap(),
            ComponentSelection::new(vec![0, 2], 3).unwrap(),
        ] {
            let obj = basis.evaluate(&sel);
            assert!(obj.fairness < 1e-20, "fairness {} for {sel}", obj.fairness);
        }
    }

    #[test]
    fn evaluate_matches_direct_on_all_subsets() {
        // 20×6 deterministic pseudo-random matrix, every selection size.
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..6).map(|_| next()).collect()).collect();
        let ds = dataset(&rows, (0..7).collect());
        let basis = compute_basis(&ds).unwrap();
        // near-zero fairness needs an absolute floor; both routes carry
        // rounding of order 1e-15 of the per-sample energy scale
        let floor = (1e-10 * basis.total_energy() / basis.n() as f64).powi(2);
        for mask in 1u32..64 {
            let idx: Vec<usize> = (0..6).filter(|b| mask & (1 << b) != 0).collect();
            let sel = ComponentSelection::new(idx, 6).unwrap();
            let fast = basis.evaluate(&sel);
            let direct = evaluate_direct(&ds, &basis, &sel).unwrap();
            assert!(
                (fast.recon_error - direct.recon_error).abs()
                    <= 1e-8 * direct.recon_error.max(1e-12),
                "recon mismatch on {sel}: {} vs {}",
                fast.recon_error,
                direct.recon_error
            );
            assert!(
                (fast.fairness - direct.fairness).abs() <= 1e-8 * direct.fairness + floor,
                "fairness mismatch on {sel}: {} vs {}",
                fast.fairness,
                direct.fairness
            );
        }
    }

    #[test]
    fn monotone_recon_error_under_index_addition() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                (0..5)
                    .map(|j| ((i * 5 + j) as f64 * 0.7).sin() * (j as f64 + 1.0))
                    .collect()
            })
            .collect();
        let ds = dataset(&rows, vec![0, 1, 2, 3]);
        let basis = compute_basis(&ds).unwrap();
        let small = ComponentSelection::new(vec![1, 3], 5).unwrap();
        let big = ComponentSelection::new(vec![1, 2, 3], 5).unwrap();
        assert!(basis.evaluate(&big).recon_error <= basis.evaluate(&small).recon_error);
    }

    #[test]
    fn group_label_swap_leaves_fairness_unchanged() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                (0..4)
                    .map(|j| ((i + 2 * j) as f64).cos() * (1.0 + j as f64))
                    .collect()
            })
            .collect();
        let a: Vec<usize> = vec![0, 2, 4];
        let b: Vec<usize> = (0..10).filter(|i| !a.contains(i)).collect();
        let ds1 = dataset(&rows, a);
        let ds2 = dataset(&rows, b);
        let b1 = compute_basis(&ds1).unwrap();
        let b2 = compute_basis(&ds2).unwrap();
        for mask in 1u32..16 {
            let idx: Vec<usize> = (0..4).filter(|k| mask & (1 << k) != 0).collect();
            let sel = ComponentSelection::new(idx, 4).unwrap();
            assert_eq!(b1.evaluate(&sel).fairness, b2.evaluate(&sel).fairness);
        }
    }

    #[test]
    fn basis_roundtrips_through_json() {
        let rows = vec![
            vec![1.0, 0.5, -0.2],
            vec![-0.3, 1.2, 0.8],
            vec![0.9, -1.1, 0.4],
            vec![-1.6, 0.3, -0.6],
        ];
        let ds = dataset(&rows, vec![1, 2]);
        let basis = compute_basis(&ds).unwrap();
        let json = serde_json::to_string(&BasisFile::from_basis(&basis, true)).unwrap();
        let file: BasisFile = serde_json::from_str(&json).unwrap();
        let restored = file.into_basis().unwrap();
        let sel = ComponentSelection::new(vec![0, 2], 3).unwrap();
        assert_eq!(basis.evaluate(&sel), restored.evaluate(&sel));
    }

    #[test]
    fn basis_file_without_matrix_is_rejected_on_import() {
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let ds = dataset(&rows, vec![0]);
        let basis = compute_basis(&ds).unwrap();
        let file = BasisFile::from_basis(&basis, false);
        assert!(file.into_basis().is_err());
    }
}
