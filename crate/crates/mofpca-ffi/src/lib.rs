//! C ABI for the mofpca library: opaque handles, integer status codes and a
//! cbindgen-generated header (`include/mofpca.h`).
//!
//! Ownership rules: every `*_load`/`*_compute`/`*_from_*` function that
//! succeeds transfers ownership of the returned handle to the caller, who
//! must release it with the matching `*_free`. Out parameters are written
//! only when the call returns `MOFPCA_STATUS_OK`. Error details for the most
//! recent failing call on the current thread are available via
//! [`mofpca_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use mofpca::dataset::{load_csv_with, standardize, LoadOptions, ScalingMode, StandardizedDataset};
use mofpca::dominance::{brute_force_front, FrontRecord};
use mofpca::error::Error;
use mofpca::linalg::Mat;
use mofpca::pca::{compute_basis, ComponentSelection, PrincipalBasis};
use mofpca::selection::{compute_lambda, select_solution};
use mofpca::spea2::{self, DatasetKind, Spea2Config};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MofpcaStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    InvalidConfig = 3,
    EnumerationCap = 4,
    InvalidUtf8 = 5,
}

/// Opaque standardized dataset handle.
pub struct MofpcaDataset {
    inner: StandardizedDataset,
}

/// Opaque principal basis handle.
pub struct MofpcaBasis {
    inner: PrincipalBasis,
}

/// Opaque Pareto front handle (records sorted by ascending recon_error).
pub struct MofpcaFront {
    records: Vec<FrontRecord>,
}

/// SPEA2 parameters in C layout; `r` and `d` must match the basis it is
/// used with. Obtain defaults from [`mofpca_default_config`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MofpcaSpea2Config {
    pub population_size: usize,
    pub archive_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub seed: u64,
    pub r: usize,
    pub d: usize,
    pub mutation_swaps: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let cstring = CString::new(msg).unwrap_or_else(|_| CString::new("invalid message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn fail(err: Error) -> MofpcaStatus {
    let status = match err.exit_code() {
        3 => MofpcaStatus::InvalidConfig,
        4 => MofpcaStatus::EnumerationCap,
        _ => MofpcaStatus::InvalidInput,
    };
    set_error(err.to_string());
    status
}

/// Message describing the most recent failure on this thread, or NULL when
/// no failure has occurred. The pointer stays valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn mofpca_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |msg| msg.as_ptr())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mofpca_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn cstr<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, MofpcaStatus> {
    if ptr.is_null() {
        set_error(format!("{what} is NULL"));
        return Err(MofpcaStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        MofpcaStatus::InvalidUtf8
    })
}

fn scaling_from(code: i32) -> Result<ScalingMode, MofpcaStatus> {
    match code {
        0 => Ok(ScalingMode::ZScore),
        1 => Ok(ScalingMode::Pixel),
        2 => Ok(ScalingMode::None),
        other => {
            set_error(format!(
                "unknown scaling code {other} (0 zscore, 1 pixel, 2 none)"
            ));
            Err(MofpcaStatus::InvalidInput)
        }
    }
}

/// Load a CSV file and standardize it. `scaling`: 0 zscore, 1 pixel, 2 none.
///
/// # Safety
/// `path`, `sensitive_column` and `group_a_value` must be NUL-terminated
/// strings; `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn mofpca_dataset_load_csv(
    path: *const c_char,
    sensitive_column: *const c_char,
    group_a_value: *const c_char,
    scaling: i32,
    out: *mut *mut MofpcaDataset,
) -> MofpcaStatus {
    if out.is_null() {
        set_error("out is NULL");
        return MofpcaStatus::NullArgument;
    }
    let path = match cstr(path, "path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let sensitive = match cstr(sensitive_column, "sensitive_column") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let group_a = match cstr(group_a_value, "group_a_value") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let mode = match scaling_from(scaling) {
        Ok(m) => m,
        Err(s) => return s,
    };
    match load_csv_with(path, sensitive, group_a, LoadOptions::default()) {
        Ok((table, groups)) => {
            let inner = standardize(table, &groups, mode);
            *out = Box::into_raw(Box::new(MofpcaDataset { inner }));
            MofpcaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Build a dataset from a dense row-major matrix (`n` rows, `d` columns).
/// Rows listed in `group_a_rows` form group A, the rest group B.
///
/// # Safety
/// `values` must point to `n * d` doubles and `group_a_rows` to
/// `group_a_len` indices; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mofpca_dataset_from_matrix(
    values: *const f64,
    n: usize,
    d: usize,
    group_a_rows: *const usize,
    group_a_len: usize,
    scaling: i32,
    out: *mut *mut MofpcaDataset,
) -> MofpcaStatus {
    if values.is_null() || group_a_rows.is_null() || out.is_null() {
        set_error("values, group_a_rows and out must be non-NULL");
        return MofpcaStatus::NullArgument;
    }
    let mode = match scaling_from(scaling) {
        Ok(m) => m,
        Err(s) => return s,
    };
    let flat = std::slice::from_raw_parts(values, n * d);
    let rows: Vec<Vec<f64>> = (0..n).map(|i| flat[i * d..(i + 1) * d].to_vec()).collect();
    let group_a = std::slice::from_raw_parts(group_a_rows, group_a_len).to_vec();
    let names = (0..d).map(|j| format!("c{j}")).collect();
    let table = match mofpca::dataset::RawTable::new(Mat::from_rows(&rows), names) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let members: std::collections::BTreeSet<usize> = group_a.iter().copied().collect();
    if members.len() != group_a.len() {
        set_error("group_a_rows contains duplicates");
        return MofpcaStatus::InvalidInput;
    }
    if group_a.iter().any(|&i| i >= n) {
        set_error("group_a_rows index out of range");
        return MofpcaStatus::InvalidInput;
    }
    let labels = mofpca::dataset::GroupLabels {
        group_b_rows: (0..n).filter(|i| !members.contains(i)).collect(),
        group_a_rows: group_a,
        group_a_value: "a".into(),
        group_b_value: "b".into(),
    };
    if labels.group_a_rows.is_empty() || labels.group_b_rows.is_empty() {
        set_error("both groups must be nonempty");
        return MofpcaStatus::InvalidInput;
    }
    let inner = standardize(table, &labels, mode);
    *out = Box::into_raw(Box::new(MofpcaDataset { inner }));
    MofpcaStatus::Ok
}

/// # Safety
/// `dataset` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn mofpca_dataset_free(dataset: *mut MofpcaDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Sample and group counts of a dataset.
///
/// # Safety
/// `dataset` must be a live handle; out pointers may be NULL to skip a field.
#[no_mangle]
pub unsafe extern "C" fn mofpca_dataset_dims(
    dataset: *const MofpcaDataset,
    n: *mut usize,
    d: *mut usize,
    n_a: *mut usize,
    n_b: *mut usize,
) -> MofpcaStatus {
    let Some(ds) = dataset.as_ref() else {
        set_error("dataset is NULL");
        return MofpcaStatus::NullArgument;
    };
    if !n.is_null() {
        *n = ds.inner.n();
    }
    if !d.is_null() {
        *d = ds.inner.dim();
    }
    if !n_a.is_null() {
        *n_a = ds.inner.n_a();
    }
    if !n_b.is_null() {
        *n_b = ds.inner.n_b();
    }
    MofpcaStatus::Ok
}

/// Compute the full principal basis of a dataset.
///
/// # Safety
/// `dataset` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mofpca_basis_compute(
    dataset: *const MofpcaDataset,
    out: *mut *mut MofpcaBasis,
) -> MofpcaStatus {
    let Some(ds) = dataset.as_ref() else {
        set_error("dataset is NULL");
        return MofpcaStatus::NullArgument;
    };
    if out.is_null() {
        set_error("out is NULL");
        return MofpcaStatus::NullArgument;
    }
    match compute_basis(&ds.inner) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(MofpcaBasis { inner }));
            MofpcaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `basis` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn mofpca_basis_free(basis: *mut MofpcaBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Copy the eigenvalues (descending) into `buffer`; `capacity` must be at
/// least the basis dimension, which is written to `written`.
///
/// # Safety
/// `basis` must be live; `buffer` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn mofpca_basis_eigenvalues(
    basis: *const MofpcaBasis,
    buffer: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> MofpcaStatus {
    let Some(b) = basis.as_ref() else {
        set_error("basis is NULL");
        return MofpcaStatus::NullArgument;
    };
    let d = b.inner.dim();
    if !written.is_null() {
        *written = d;
    }
    if buffer.is_null() {
        set_error("buffer is NULL");
        return MofpcaStatus::NullArgument;
    }
    if capacity < d {
        set_error(format!("buffer capacity {capacity} < dimension {d}"));
        return MofpcaStatus::InvalidInput;
    }
    std::ptr::copy_nonoverlapping(b.inner.eigenvalues().as_ptr(), buffer, d);
    MofpcaStatus::Ok
}

/// Evaluate both objectives for the selection `indices[0..len]` (0-based,
/// strictly increasing).
///
/// # Safety
/// `basis` must be live; `indices` must hold `len` entries; out pointers
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn mofpca_evaluate(
    basis: *const MofpcaBasis,
    indices: *const usize,
    len: usize,
    recon_error: *mut f64,
    fairness: *mut f64,
) -> MofpcaStatus {
    let Some(b) = basis.as_ref() else {
        set_error("basis is NULL");
        return MofpcaStatus::NullArgument;
    };
    if indices.is_null() || recon_error.is_null() || fairness.is_null() {
        set_error("indices and out pointers must be non-NULL");
        return MofpcaStatus::NullArgument;
    }
    let idx = std::slice::from_raw_parts(indices, len).to_vec();
    let selection = match ComponentSelection::new(idx, b.inner.dim()) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let obj = b.inner.evaluate(&selection);
    *recon_error = obj.recon_error;
    *fairness = obj.fairness;
    MofpcaStatus::Ok
}

/// Default SPEA2 parameters for a `d`-dimensional basis and target `r`.
/// `dataset_kind`: 0 tabular (30 generations), 1 image (50).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mofpca_default_config(
    d: usize,
    r: usize,
    dataset_kind: i32,
    out: *mut MofpcaSpea2Config,
) -> MofpcaStatus {
    if out.is_null() {
        set_error("out is NULL");
        return MofpcaStatus::NullArgument;
    }
    let kind = match dataset_kind {
        0 => DatasetKind::Tabular,
        1 => DatasetKind::Image,
        other => {
            set_error(format!("unknown dataset kind {other} (0 tabular, 1 image)"));
            return MofpcaStatus::InvalidInput;
        }
    };
    match spea2::default_config(d, r, kind) {
        Ok(cfg) => {
            *out = MofpcaSpea2Config {
                population_size: cfg.population_size,
                archive_size: cfg.archive_size,
                generations: cfg.generations,
                crossover_rate: cfg.crossover_rate,
                seed: cfg.seed,
                r: cfg.r,
                d: cfg.d,
                mutation_swaps: cfg.mutation_swaps,
            };
            MofpcaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Run the evolutionary search and return the non-dominated front.
///
/// # Safety
/// `basis` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mofpca_front_spea2(
    basis: *const MofpcaBasis,
    config: MofpcaSpea2Config,
    out: *mut *mut MofpcaFront,
) -> MofpcaStatus {
    let Some(b) = basis.as_ref() else {
        set_error("basis is NULL");
        return MofpcaStatus::NullArgument;
    };
    if out.is_null() {
        set_error("out is NULL");
        return MofpcaStatus::NullArgument;
    }
    let cfg = Spea2Config {
        population_size: config.population_size,
        archive_size: config.archive_size,
        generations: config.generations,
        crossover_rate: config.crossover_rate,
        seed: config.seed,
        r: config.r,
        d: config.d,
        mutation_swaps: config.mutation_swaps,
    };
    match spea2::run(&b.inner, &cfg) {
        Ok(outcome) => {
            *out = Box::into_raw(Box::new(MofpcaFront {
                records: outcome.front,
            }));
            MofpcaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Enumerate every size-r subset (subject to `cap`) and return the exact
/// front. `workers` threads partition the enumeration; the result does not
/// depend on the worker count.
///
/// # Safety
/// `basis` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mofpca_front_exhaustive(
    basis: *const MofpcaBasis,
    r: usize,
    cap: u64,
    workers: usize,
    out: *mut *mut MofpcaFront,
) -> MofpcaStatus {
    let Some(b) = basis.as_ref() else {
        set_error("basis is NULL");
        return MofpcaStatus::NullArgument;
    };
    if out.is_null() {
        set_error("out is NULL");
        return MofpcaStatus::NullArgument;
    }
    match brute_force_front(&b.inner, r, cap, workers.max(1)) {
        Ok(records) => {
            *out = Box::into_raw(Box::new(MofpcaFront { records }));
            MofpcaStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `front` must be a handle from this library, not yet freed; NULL is a no-op.
#[no_mangle]
pub unsafe extern "C" fn mofpca_front_free(front: *mut MofpcaFront) {
    if !front.is_null() {
        drop(Box::from_raw(front));
    }
}

/// Number of records in the front.
///
/// # Safety
/// `front` must be live; `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mofpca_front_len(
    front: *const MofpcaFront,
    len: *mut usize,
) -> MofpcaStatus {
    let Some(f) = front.as_ref() else {
        set_error("front is NULL");
        return MofpcaStatus::NullArgument;
    };
    if len.is_null() {
        set_error("len is NULL");
        return MofpcaStatus::NullArgument;
    }
    *len = f.records.len();
    MofpcaStatus::Ok
}

/// Fetch record `index`: its objectives and its component indices (written
/// to `indices[0..indices_cap]`, actual count in `indices_len`).
///
/// # Safety
/// `front` must be live; `indices` must hold `indices_cap` entries; out
/// pointers may be NULL to skip fields.
#[no_mangle]
pub unsafe extern "C" fn mofpca_front_record(
    front: *const MofpcaFront,
    index: usize,
    indices: *mut usize,
    indices_cap: usize,
    indices_len: *mut usize,
    recon_error: *mut f64,
    fairness: *mut f64,
) -> MofpcaStatus {
    let Some(f) = front.as_ref() else {
        set_error("front is NULL");
        return MofpcaStatus::NullArgument;
    };
    let Some(record) = f.records.get(index) else {
        set_error(format!(
            "record index {index} out of range ({} records)",
            f.records.len()
        ));
        return MofpcaStatus::InvalidInput;
    };
    let r = record.selection.len();
    if !indices_len.is_null() {
        *indices_len = r;
    }
    if !indices.is_null() {
        if indices_cap < r {
            set_error(format!(
                "indices capacity {indices_cap} < selection size {r}"
            ));
            return MofpcaStatus::InvalidInput;
        }
        std::ptr::copy_nonoverlapping(record.selection.indices().as_ptr(), indices, r);
    }
    if !recon_error.is_null() {
        *recon_error = record.objectives.recon_error;
    }
    if !fairness.is_null() {
        *fairness = record.objectives.fairness;
    }
    MofpcaStatus::Ok
}

/// Pick the balanced solution from `front` with the scale-compensated
/// weighted sum derived from `basis`. Writes the index of the chosen record
/// plus the weighting diagnostics.
///
/// # Safety
/// `basis` and `front` must be live; out pointers may be NULL to skip fields.
#[no_mangle]
pub unsafe extern "C" fn mofpca_select(
    basis: *const MofpcaBasis,
    front: *const MofpcaFront,
    chosen_index: *mut usize,
    lambda: *mut f64,
    weighted_score: *mut f64,
) -> MofpcaStatus {
    let (Some(b), Some(f)) = (basis.as_ref(), front.as_ref()) else {
        set_error("basis and front must be non-NULL");
        return MofpcaStatus::NullArgument;
    };
    let weights = compute_lambda(&b.inner);
    let chosen = match select_solution(&f.records, &weights) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let index = f
        .records
        .iter()
        .position(|rec| *rec == chosen)
        .expect("selected record is a member of the front");
    if !chosen_index.is_null() {
        *chosen_index = index;
    }
    if !lambda.is_null() {
        *lambda = weights.lambda;
    }
    if !weighted_score.is_null() {
        *weighted_score = weights.score(&chosen);
    }
    MofpcaStatus::Ok
}
