//! Drives the C surface end to end: handle lifecycle, error codes, and
//! agreement with the underlying library.

use std::ffi::{CStr, CString};
use std::ptr;

use mofpca_ffi::*;

fn toy_matrix(n: usize, d: usize) -> Vec<f64> {
    (0..n * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            ((i * d + j) as f64 * 0.37).sin() * (d - j) as f64 + ((i + j) as f64 * 0.11).cos()
        })
        .collect()
}

unsafe fn make_dataset(n: usize, d: usize) -> *mut MofpcaDataset {
    let values = toy_matrix(n, d);
    let group_a: Vec<usize> = (0..n / 3).collect();
    let mut ds: *mut MofpcaDataset = ptr::null_mut();
    let status = mofpca_dataset_from_matrix(
        values.as_ptr(),
        n,
        d,
        group_a.as_ptr(),
        group_a.len(),
        0,
        &mut ds,
    );
    assert_eq!(status, MofpcaStatus::Ok);
    assert!(!ds.is_null());
    ds
}

#[test]
fn full_pipeline_through_the_c_surface() {
    unsafe {
        let ds = make_dataset(30, 6);

        let (mut n, mut d, mut n_a, mut n_b) = (0usize, 0usize, 0usize, 0usize);
        assert_eq!(
            mofpca_dataset_dims(ds, &mut n, &mut d, &mut n_a, &mut n_b),
            MofpcaStatus::Ok
        );
        assert_eq!((n, d, n_a, n_b), (30, 6, 10, 20));

        let mut basis: *mut MofpcaBasis = ptr::null_mut();
        assert_eq!(mofpca_basis_compute(ds, &mut basis), MofpcaStatus::Ok);

        let mut eig = vec![0.0f64; 6];
        let mut written = 0usize;
        assert_eq!(
            mofpca_basis_eigenvalues(basis, eig.as_mut_ptr(), eig.len(), &mut written),
            MofpcaStatus::Ok
        );
        assert_eq!(written, 6);
        assert!(eig.windows(2).all(|w| w[0] >= w[1]), "descending order");

        // full selection reconstructs exactly
        let all: Vec<usize> = (0..6).collect();
        let (mut recon, mut fairness) = (f64::NAN, f64::NAN);
        assert_eq!(
            mofpca_evaluate(basis, all.as_ptr(), all.len(), &mut recon, &mut fairness),
            MofpcaStatus::Ok
        );
        assert_eq!(recon, 0.0);

        // exhaustive front, then the balanced pick
        let mut front: *mut MofpcaFront = ptr::null_mut();
        assert_eq!(
            mofpca_front_exhaustive(basis, 3, 1_000, 2, &mut front),
            MofpcaStatus::Ok
        );
        let mut len = 0usize;
        assert_eq!(mofpca_front_len(front, &mut len), MofpcaStatus::Ok);
        assert!(len >= 1);

        let mut indices = vec![0usize; 3];
        let mut indices_len = 0usize;
        let (mut r0, mut f0) = (0.0f64, 0.0f64);
        assert_eq!(
            mofpca_front_record(
                front,
                0,
                indices.as_mut_ptr(),
                indices.len(),
                &mut indices_len,
                &mut r0,
                &mut f0,
            ),
            MofpcaStatus::Ok
        );
        assert_eq!(indices_len, 3);
        // the first record is the classical selection (lowest recon_error)
        assert_eq!(indices, vec![0, 1, 2]);

        let (mut chosen, mut lambda, mut score) = (usize::MAX, f64::NAN, f64::NAN);
        assert_eq!(
            mofpca_select(basis, front, &mut chosen, &mut lambda, &mut score),
            MofpcaStatus::Ok
        );
        assert!(chosen < len);
        assert!((0.0..=1.0).contains(&lambda));
        assert!(score.is_finite());

        mofpca_front_free(front);
        mofpca_basis_free(basis);
        mofpca_dataset_free(ds);
    }
}

#[test]
fn csv_loading_through_the_c_surface() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.csv");
    let mut body = String::from("a,b,c,grp\n");
    for i in 0..12 {
        let g = if i % 2 == 0 { "u" } else { "v" };
        body.push_str(&format!(
            "{},{},{},{g}\n",
            i as f64 * 0.7,
            (i * i) as f64 * 0.1,
            (i as f64).sin()
        ));
    }
    std::fs::write(&path, body).unwrap();

    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    let c_col = CString::new("grp").unwrap();
    let c_val = CString::new("u").unwrap();
    unsafe {
        let mut ds: *mut MofpcaDataset = ptr::null_mut();
        let status =
            mofpca_dataset_load_csv(c_path.as_ptr(), c_col.as_ptr(), c_val.as_ptr(), 0, &mut ds);
        assert_eq!(status, MofpcaStatus::Ok);
        let (mut n, mut d) = (0usize, 0usize);
        assert_eq!(
            mofpca_dataset_dims(ds, &mut n, &mut d, ptr::null_mut(), ptr::null_mut()),
            MofpcaStatus::Ok
        );
        assert_eq!((n, d), (12, 3));
        mofpca_dataset_free(ds);
    }
}

#[test]
fn error_paths_set_codes_and_messages() {
    unsafe {
        // missing file
        let c_path = CString::new("/no/such/file.csv").unwrap();
        let c_col = CString::new("grp").unwrap();
        let c_val = CString::new("u").unwrap();
        let mut ds: *mut MofpcaDataset = ptr::null_mut();
        let status =
            mofpca_dataset_load_csv(c_path.as_ptr(), c_col.as_ptr(), c_val.as_ptr(), 0, &mut ds);
        assert_eq!(status, MofpcaStatus::InvalidInput);
        let msg = mofpca_last_error_message();
        assert!(!msg.is_null());
        let text = CStr::from_ptr(msg).to_str().unwrap();
        assert!(text.contains("cannot read"), "{text}");

        // null argument
        let status =
            mofpca_dataset_load_csv(ptr::null(), c_col.as_ptr(), c_val.as_ptr(), 0, &mut ds);
        assert_eq!(status, MofpcaStatus::NullArgument);

        // bad scaling code
        let status =
            mofpca_dataset_load_csv(c_path.as_ptr(), c_col.as_ptr(), c_val.as_ptr(), 9, &mut ds);
        assert_eq!(status, MofpcaStatus::InvalidInput);

        let ds = make_dataset(24, 5);
        let mut basis: *mut MofpcaBasis = ptr::null_mut();
        assert_eq!(mofpca_basis_compute(ds, &mut basis), MofpcaStatus::Ok);

        // invalid selection: duplicate index
        let bad = [1usize, 1];
        let (mut r, mut f) = (0.0f64, 0.0f64);
        assert_eq!(
            mofpca_evaluate(basis, bad.as_ptr(), 2, &mut r, &mut f),
            MofpcaStatus::InvalidInput
        );

        // enumeration cap
        let mut front: *mut MofpcaFront = ptr::null_mut();
        assert_eq!(
            mofpca_front_exhaustive(basis, 2, 3, 1, &mut front),
            MofpcaStatus::EnumerationCap
        );

        // invalid config
        let cfg = MofpcaSpea2Config {
            population_size: 1,
            archive_size: 1,
            generations: 1,
            crossover_rate: 50.0,
            seed: 0,
            r: 2,
            d: 5,
            mutation_swaps: 1,
        };
        assert_eq!(
            mofpca_front_spea2(basis, cfg, &mut front),
            MofpcaStatus::InvalidConfig
        );

        // record index out of range
        assert_eq!(
            mofpca_front_exhaustive(basis, 2, 100, 1, &mut front),
            MofpcaStatus::Ok
        );
        let mut len = 0usize;
        mofpca_front_len(front, &mut len);
        assert_eq!(
            mofpca_front_record(
                front,
                len,
                ptr::null_mut(),
                0,
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut()
            ),
            MofpcaStatus::InvalidInput
        );

        mofpca_front_free(front);
        mofpca_basis_free(basis);
        mofpca_dataset_free(ds);

        // frees tolerate NULL
        mofpca_dataset_free(ptr::null_mut());
        mofpca_basis_free(ptr::null_mut());
        mofpca_front_free(ptr::null_mut());
    }
}

#[test]
fn spea2_through_ffi_is_deterministic_and_matches_library() {
    unsafe {
        let ds = make_dataset(36, 9);
        let mut basis: *mut MofpcaBasis = ptr::null_mut();
        assert_eq!(mofpca_basis_compute(ds, &mut basis), MofpcaStatus::Ok);

        let mut cfg = MofpcaSpea2Config {
            population_size: 0,
            archive_size: 0,
            generations: 0,
            crossover_rate: 0.0,
            seed: 0,
            r: 0,
            d: 0,
            mutation_swaps: 0,
        };
        assert_eq!(mofpca_default_config(9, 3, 0, &mut cfg), MofpcaStatus::Ok);
        assert_eq!(cfg.generations, 30);
        cfg.seed = 11;

        let collect = |front: *mut MofpcaFront| {
            let mut len = 0usize;
            assert_eq!(mofpca_front_len(front, &mut len), MofpcaStatus::Ok);
            (0..len)
                .map(|i| {
                    let mut idx = vec![0usize; cfg.r];
                    let mut idx_len = 0usize;
                    let (mut re, mut fm) = (0.0f64, 0.0f64);
                    assert_eq!(
                        mofpca_front_record(
                            front,
                            i,
                            idx.as_mut_ptr(),
                            idx.len(),
                            &mut idx_len,
                            &mut re,
                            &mut fm
                        ),
                        MofpcaStatus::Ok
                    );
                    (idx, re.to_bits(), fm.to_bits())
                })
                .collect::<Vec<_>>()
        };

        let mut front1: *mut MofpcaFront = ptr::null_mut();
        let mut front2: *mut MofpcaFront = ptr::null_mut();
        assert_eq!(
            mofpca_front_spea2(basis, cfg, &mut front1),
            MofpcaStatus::Ok
        );
        assert_eq!(
            mofpca_front_spea2(basis, cfg, &mut front2),
            MofpcaStatus::Ok
        );
        let a = collect(front1);
        let b = collect(front2);
        assert_eq!(a, b, "same seed must give the same front");

        mofpca_front_free(front1);
        mofpca_front_free(front2);
        mofpca_basis_free(basis);
        mofpca_dataset_free(ds);
    }
}

#[test]
fn version_and_header_are_available() {
    let version = unsafe { CStr::from_ptr(mofpca_version()) }
        .to_str()
        .unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));

    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mofpca.h");
    let text = std::fs::read_to_string(header).expect("cbindgen header generated at build time");
    assert!(text.contains("#ifndef MOFPCA_H"));
    assert!(text.contains("mofpca_front_spea2"));
    assert!(text.contains("MOFPCA_STATUS_ENUMERATION_CAP"));
}
