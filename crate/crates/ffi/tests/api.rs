use std::ffi::{CStr, CString};
use std::ptr;

use webdyn_ffi::*;

fn last_error() -> String {
    let p = webdyn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generated(json: &str) -> *mut WebdynSeries {
    let cfg = CString::new(json).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { webdyn_series_generate(cfg.as_ptr(), &mut s) }, WebdynStatus::Ok);
    assert!(!s.is_null());
    s
}

#[test]
fn generated_series_round_trip() {
    let s = generated(r#"{"seed": 3, "years": 3, "initial_sites": 500}"#);
    unsafe {
        let mut len = 0;
        assert_eq!(webdyn_series_len(s, &mut len), WebdynStatus::Ok);
        assert_eq!(len, 3);
        assert!(webdyn_last_error().is_null());

        let mut label = 0;
        assert_eq!(webdyn_series_label(s, 2, &mut label), WebdynStatus::Ok);
        assert_eq!(label, 2002);

        let mut stats = WebdynStats::default();
        assert_eq!(webdyn_series_stats(s, 0, &mut stats), WebdynStatus::Ok);
        assert_eq!((stats.label, stats.crawled_sites, stats.new_sites), (2000, 500, 500));

        let mut sizes = [0u64; WEBDYN_COMPONENT_COUNT];
        assert_eq!(webdyn_series_component_sizes(s, 0, sizes.as_mut_ptr()), WebdynStatus::Ok);
        assert_eq!(sizes.iter().sum::<u64>(), 500);

        let mut counts = [0u64; WEBDYN_STATE_COUNT * WEBDYN_STATE_COUNT];
        assert_eq!(webdyn_series_migration_counts(s, counts.as_mut_ptr()), WebdynStatus::Ok);
        let new_row = &counts[9 * WEBDYN_STATE_COUNT..];
        assert!(new_row.iter().sum::<u64>() >= 500);

        let mut json = ptr::null_mut();
        assert_eq!(webdyn_series_report_json(s, &mut json), WebdynStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        webdyn_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["labels"], serde_json::json!([2000, 2001, 2002]));

        webdyn_series_free(s);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut s = ptr::null_mut();
        let missing = CString::new("/nonexistent/webdyn/input").unwrap();
        assert_eq!(webdyn_series_load(missing.as_ptr(), &mut s), WebdynStatus::Io);
        assert!(s.is_null());
        assert!(last_error().contains("/nonexistent/webdyn/input"));

        assert_eq!(webdyn_series_load(ptr::null(), &mut s), WebdynStatus::NullPointer);
        let bad = CString::new(r#"{"seed": "x"}"#).unwrap();
        assert_eq!(webdyn_series_generate(bad.as_ptr(), &mut s), WebdynStatus::Config);

        let s = generated(r#"{"years": 1, "initial_sites": 50}"#);
        let mut label = 0;
        assert_eq!(webdyn_series_label(s, 5, &mut label), WebdynStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        assert_eq!(webdyn_series_len(s, ptr::null_mut()), WebdynStatus::NullPointer);
        assert_eq!(webdyn_series_len(ptr::null(), &mut 0), WebdynStatus::NullPointer);
        webdyn_series_free(s);
        webdyn_series_free(ptr::null_mut());
        webdyn_string_free(ptr::null_mut());
    }
}

#[test]
fn loads_written_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = webdyn::synthgen::GenConfig {
        years: 2,
        initial_sites: 200,
        ..Default::default()
    };
    webdyn::snapshot::write_series(dir.path(), &webdyn::synthgen::generate(&cfg).unwrap()).unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(webdyn_series_load(path.as_ptr(), &mut s), WebdynStatus::Ok);
        let mut len = 0;
        webdyn_series_len(s, &mut len);
        assert_eq!(len, 2);
        webdyn_series_free(s);
    }
}

#[test]
fn fits() {
    let series: Vec<f64> = (0..6).map(|i| 3.0 * 1.5f64.powi(i)).collect();
    let mut factor = 0.0;
    for method in [WebdynGrowthMethod::LogLinear, WebdynGrowthMethod::RatioThroughOrigin] {
        let status = unsafe { webdyn_fit_growth(series.as_ptr(), series.len(), method, &mut factor) };
        assert_eq!(status, WebdynStatus::Ok);
        assert!((factor - 1.5).abs() < 1e-12);
    }
    let status = unsafe { webdyn_fit_growth(series.as_ptr(), 1, WebdynGrowthMethod::LogLinear, &mut factor) };
    assert_eq!(status, WebdynStatus::InsufficientData);

    let x = [1.0, 2.0, 4.0, 8.0];
    let f = [4096u64, 1024, 256, 64];
    let (mut theta, mut log_k) = (0.0, 0.0);
    let status = unsafe { webdyn_fit_powerlaw(x.as_ptr(), f.as_ptr(), 4, 1.0, 8.0, &mut theta, &mut log_k) };
    assert_eq!(status, WebdynStatus::Ok);
    assert!((theta - 2.0).abs() < 1e-12);
    assert!((log_k - 4096f64.ln()).abs() < 1e-9);
    let status = unsafe { webdyn_fit_powerlaw(x.as_ptr(), f.as_ptr(), 4, 8.0, 1.0, &mut theta, ptr::null_mut()) };
    assert_eq!(status, WebdynStatus::Config);
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(webdyn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
