use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use torus_recur_ffi::*;

fn new_map(e: [i64; 4]) -> *mut TrMap {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { tr_map_new(e[0], e[1], e[2], e[3], &mut m) }, TrStatus::Ok);
    assert!(!m.is_null());
    m
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { tr_string_free(s) };
    out
}

#[test]
fn exact_quantities() {
    let m = new_map([2, 1, 1, 1]);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(tr_map_h(m, 10, &mut s), TrStatus::Ok);
        assert_eq!(take(s), "-15125");
        assert_eq!(tr_map_trace_power(m, 2, &mut s), TrStatus::Ok);
        assert_eq!(take(s), "7");
        let mut ll = 0.0;
        assert_eq!(tr_map_log_lambda(m, &mut ll), TrStatus::Ok);
        assert!((ll - 0.9624236501192069).abs() < 1e-15);
        let mut k = 0;
        assert_eq!(tr_map_exponent(m, &mut k), TrStatus::Ok);
        assert_eq!(k, 1);
        tr_map_free(m);
    }
    let golden = new_map([1, 1, 1, 0]);
    let mut k = 0;
    unsafe {
        assert_eq!(tr_map_exponent(golden, &mut k), TrStatus::Ok);
        tr_map_free(golden);
    }
    assert_eq!(k, 2);
}

#[test]
fn periodic_points_round_trip() {
    let m = new_map([2, 1, 1, 1]);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(tr_map_periodic_points_json(m, 2, 100, &mut s), TrStatus::Ok);
    }
    let pts: Vec<[String; 2]> = serde_json::from_str(&take(s)).unwrap();
    assert_eq!(pts.len(), 5);
    let mut want: Vec<[String; 2]> = torus_recur::periodic::enumerate_periodic(&torus_recur::exact::HyperbolicMap::cat(), 2, 100)
        .unwrap()
        .points
        .iter()
        .map(|p| [p.x.to_string(), p.y.to_string()])
        .collect();
    want.sort();
    let mut got = pts.clone();
    got.sort();
    assert_eq!(got, want);
    assert!(pts.iter().all(|p| p.iter().all(|c| c == "0" || c.ends_with("/5"))));
    unsafe {
        assert_eq!(tr_map_periodic_points_json(m, 10, 100, &mut s), TrStatus::CapExceeded);
        assert!(last_error_string().contains("cap"));
        tr_map_free(m);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(tr_map_new(0, -1, 1, 0, &mut m), TrStatus::Domain);
        assert!(m.is_null());
        assert!(last_error_string().contains("not hyperbolic"));
        assert_eq!(tr_map_new(2, 2, 1, 1, &mut m), TrStatus::Domain);
        assert_eq!(tr_map_new(2, 1, 1, 1, ptr::null_mut()), TrStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(tr_map_log_lambda(ptr::null(), &mut v), TrStatus::NullPointer);
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(tr_dim_formula(-1.0, 1.0, &mut a, &mut b), TrStatus::InvalidInput);
        assert_eq!(tr_dim_formula(1.0, 1.0, &mut a, &mut b), TrStatus::Ok);
        assert_eq!(last_error_string(), "");
        tr_map_free(ptr::null_mut());
        tr_string_free(ptr::null_mut());
    }
}

#[test]
fn numerics_match_the_library() {
    use torus_recur::exact::HyperbolicMap;
    use torus_recur::geometry::{membership, RecurrenceConfig};
    use torus_recur::lab::{riesz_energy_2d, Sampler};
    let map = HyperbolicMap::cat();
    let cfg = RecurrenceConfig::exponential(1.0).unwrap();
    let m = new_map([2, 1, 1, 1]);
    for (i, p) in [[0.1, 0.2], [0.0, 0.0], [0.4, 0.8], [0.2001, 0.4]].into_iter().enumerate() {
        let mut inside = -1;
        unsafe { assert_eq!(tr_membership(m, 1.0, 2, p[0], p[1], &mut inside), TrStatus::Ok) };
        assert_eq!(inside == 1, membership(&map, &cfg, 2, p).unwrap(), "point {i}");
    }
    let (mut est, mut se) = (0.0, 0.0);
    unsafe { assert_eq!(tr_energy_2d(m, 1.0, 5, 0.7, 1, 20_000, 3, &mut est, &mut se), TrStatus::Ok) };
    let r = riesz_energy_2d(&map, &cfg, 5, 0.7, Sampler::Stratified, 20_000, 3).unwrap();
    assert_eq!((est, se), (r.estimate, r.stderr));
    unsafe {
        assert_eq!(tr_energy_2d(m, 1.0, 5, -0.5, 0, 100, 3, &mut est, &mut se), TrStatus::InvalidInput);
        tr_map_free(m);
    }
}

#[test]
fn header_declares_every_export() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/torus_recur.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 10);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct TrMap TrMap;"));
    assert!(header.contains("TR_STATUS_CAP_EXCEEDED = 4"));
}

#[test]
fn c_program_links_against_static_library() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libtorus_recur_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        panic!("static library {} or C compiler missing", lib.display());
    }
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(out.stdout, b"ok\n");
}
