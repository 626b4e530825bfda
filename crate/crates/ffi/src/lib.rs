//! C ABI over the `webdyn` toolkit.
//!
//! Every fallible call returns a [`WebdynStatus`]. On failure, a message for
//! the calling thread can be read with [`webdyn_last_error`]. Series are
//! opaque handles created by [`webdyn_series_load`] or
//! [`webdyn_series_generate`] and released with [`webdyn_series_free`].
//! Strings returned by the library are released with [`webdyn_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use webdyn::dynamics::{MigrationState, STATE_COUNT};
use webdyn::metrics::{fit_growth_with, fit_powerlaw, FitRange, GrowthMethod, Histogram};
use webdyn::report::{load_input, Analysis, Input, ReportConfig};
use webdyn::snapshot::snapshot_stats;
use webdyn::synthgen::{generate, GenConfig};
use webdyn::Error;

/// Number of bow-tie components, the length of the array filled by
/// [`webdyn_series_component_sizes`].
pub const WEBDYN_COMPONENT_COUNT: usize = 7;

/// Number of migration states; the migration matrix has this many rows and
/// columns.
pub const WEBDYN_STATE_COUNT: usize = 10;

const _: () = assert!(WEBDYN_STATE_COUNT == STATE_COUNT);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WebdynStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidInput = 5,
    InsufficientData = 6,
    Config = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WebdynGrowthMethod {
    LogLinear = 0,
    RatioThroughOrigin = 1,
}

/// Collection statistics of one snapshot.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WebdynStats {
    pub label: i32,
    pub crawled_sites: u64,
    pub new_sites: u64,
    pub unknown_sites: u64,
    pub dead_sites: u64,
    pub total_pages: u64,
    pub total_content_bytes: u64,
    pub one_page_sites: u64,
    pub one_page_share: f64,
}

/// A loaded or generated snapshot series with its derived analyses.
pub struct WebdynSeries {
    analysis: Analysis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(WebdynStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => WebdynStatus::Io,
            Error::Parse { .. } => WebdynStatus::Parse,
            Error::InsufficientData(_) => WebdynStatus::InsufficientData,
            Error::Config(_) => WebdynStatus::Config,
            _ => WebdynStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WebdynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            WebdynStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {message}"));
            WebdynStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(WebdynStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(WebdynStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn series_arg<'a>(p: *const WebdynSeries) -> Result<&'a WebdynSeries, Failure> {
    p.as_ref().ok_or_else(|| null("series"))
}

fn check_index(series: &WebdynSeries, index: usize) -> Result<(), Failure> {
    let len = series.analysis.series().len();
    if index < len {
        Ok(())
    } else {
        Err(Failure(
            WebdynStatus::OutOfRange,
            format!("snapshot index {index} out of range for {len} snapshots"),
        ))
    }
}

fn into_handle(input: Input, out: &mut *mut WebdynSeries) -> Result<(), Failure> {
    let analysis = Analysis::new(input, ReportConfig::default())?;
    *out = Box::into_raw(Box::new(WebdynSeries { analysis }));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn webdyn_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn webdyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads every `<dir>/<year>/` snapshot. Years whose links table is
/// unreadable are kept without a hostgraph.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_load(dir: *const c_char, out: *mut *mut WebdynSeries) -> WebdynStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let dir = str_arg(dir, "dir")?;
        into_handle(load_input(Path::new(dir), None)?, out)
    })
}

/// Generates a synthetic series. `config_json` may be NULL for the default
/// configuration; missing fields take their defaults.
///
/// # Safety
/// `config_json` must be NULL or a NUL-terminated string, and `out` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_generate(
    config_json: *const c_char,
    out: *mut *mut WebdynSeries,
) -> WebdynStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let cfg = if config_json.is_null() {
            GenConfig::default()
        } else {
            GenConfig::from_json(str_arg(config_json, "config_json")?)?
        };
        into_handle(Input::from_series(generate(&cfg)?), out)
    })
}

/// # Safety
/// `series` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_free(series: *mut WebdynSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// # Safety
/// `series` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_len(series: *const WebdynSeries, out: *mut usize) -> WebdynStatus {
    guard(|| {
        *out_arg(out, "out")? = series_arg(series)?.analysis.series().len();
        Ok(())
    })
}

/// Year label of the snapshot at `index`.
///
/// # Safety
/// `series` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_label(
    series: *const WebdynSeries,
    index: usize,
    out: *mut i32,
) -> WebdynStatus {
    guard(|| {
        let s = series_arg(series)?;
        check_index(s, index)?;
        *out_arg(out, "out")? = s.analysis.series().snapshots()[index].label();
        Ok(())
    })
}

/// # Safety
/// `series` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_stats(
    series: *const WebdynSeries,
    index: usize,
    out: *mut WebdynStats,
) -> WebdynStatus {
    guard(|| {
        let s = series_arg(series)?;
        check_index(s, index)?;
        let st = snapshot_stats(s.analysis.series(), index);
        *out_arg(out, "out")? = WebdynStats {
            label: st.label,
            crawled_sites: st.crawled_sites,
            new_sites: st.new_sites,
            unknown_sites: st.unknown_sites,
            dead_sites: st.dead_sites,
            total_pages: st.total_pages,
            total_content_bytes: st.total_content_bytes,
            one_page_sites: st.one_page_sites,
            one_page_share: st.one_page_share,
        };
        Ok(())
    })
}

/// Site counts per bow-tie component in the order MAIN, OUT, IN, ISLAND,
/// TUNNEL, TIN, TOUT.
///
/// # Safety
/// `series` must be a live handle and `out` must point to
/// `WEBDYN_COMPONENT_COUNT` writable values.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_component_sizes(
    series: *const WebdynSeries,
    index: usize,
    out: *mut u64,
) -> WebdynStatus {
    guard(|| {
        let s = series_arg(series)?;
        check_index(s, index)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = s.analysis.decompositions()[index].as_ref().ok_or_else(|| {
            let label = s.analysis.series().snapshots()[index].label();
            Failure(WebdynStatus::InvalidInput, format!("links of {label} are unavailable"))
        })?;
        let sizes = d.sizes_sites();
        let out = std::slice::from_raw_parts_mut(out, WEBDYN_COMPONENT_COUNT);
        for (slot, state) in out.iter_mut().zip(MigrationState::ALL) {
            let label = state.component().expect("first states are components");
            *slot = sizes.get(&label).copied().unwrap_or(0);
        }
        Ok(())
    })
}

/// Year-over-year transition counts, row-major `[from][to]` over
/// MAIN, OUT, IN, ISLAND, TUNNEL, TIN, TOUT, UNKNOWN, DEAD, NEW.
///
/// # Safety
/// `series` must be a live handle and `out` must point to
/// `WEBDYN_STATE_COUNT * WEBDYN_STATE_COUNT` writable values.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_migration_counts(
    series: *const WebdynSeries,
    out: *mut u64,
) -> WebdynStatus {
    guard(|| {
        let s = series_arg(series)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let m = s.analysis.migration_matrix()?;
        let out = std::slice::from_raw_parts_mut(out, STATE_COUNT * STATE_COUNT);
        for (row, counts) in out.chunks_mut(STATE_COUNT).zip(&m.counts) {
            row.copy_from_slice(counts);
        }
        Ok(())
    })
}

/// Full report as pretty-printed JSON. The string must be released with
/// [`webdyn_string_free`]. Section failures are reported inside the JSON,
/// not through the status.
///
/// # Safety
/// `series` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn webdyn_series_report_json(
    series: *const WebdynSeries,
    out: *mut *mut c_char,
) -> WebdynStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let json = series_arg(series)?.analysis.report().0.to_json();
        *out = CString::new(json).expect("JSON has no NUL bytes").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn webdyn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Per-step factor of `values[n] = factor * values[n-1]`.
///
/// # Safety
/// `values` must point to `len` readable values, `method` must be one of
/// the declared variants and `factor` must be writable.
#[no_mangle]
pub unsafe extern "C" fn webdyn_fit_growth(
    values: *const f64,
    len: usize,
    method: WebdynGrowthMethod,
    factor: *mut f64,
) -> WebdynStatus {
    guard(|| {
        if values.is_null() {
            return Err(null("values"));
        }
        let factor = out_arg(factor, "factor")?;
        let method = match method {
            WebdynGrowthMethod::LogLinear => GrowthMethod::LogLinear,
            WebdynGrowthMethod::RatioThroughOrigin => GrowthMethod::RatioThroughOrigin,
        };
        *factor = fit_growth_with(std::slice::from_raw_parts(values, len), method)?.factor;
        Ok(())
    })
}

/// Exponent `theta` of `freq(x) ~ k / x^theta` fitted on the points with
/// `min <= x <= max`.
///
/// # Safety
/// `x` and `freq` must each point to `len` readable values, and `theta` and
/// `log_k` must be writable (`log_k` may be NULL).
#[no_mangle]
pub unsafe extern "C" fn webdyn_fit_powerlaw(
    x: *const f64,
    freq: *const u64,
    len: usize,
    min: f64,
    max: f64,
    theta: *mut f64,
    log_k: *mut f64,
) -> WebdynStatus {
    guard(|| {
        if x.is_null() || freq.is_null() {
            return Err(null("x or freq"));
        }
        let theta = out_arg(theta, "theta")?;
        let xs = std::slice::from_raw_parts(x, len);
        let fs = std::slice::from_raw_parts(freq, len);
        let hist = Histogram::from_points(xs.iter().copied().zip(fs.iter().copied()).collect());
        let fit = fit_powerlaw(&hist, FitRange::new(min, max)?)?;
        *theta = fit.theta;
        if let Some(k) = log_k.as_mut() {
            *k = fit.log_k;
        }
        Ok(())
    })
}
