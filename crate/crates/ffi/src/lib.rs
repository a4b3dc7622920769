//! C ABI over the `qmeasure` simulator.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns a
//! [`QmStatus`]; on failure `qm_last_error_message` describes the problem
//! until the next failing call on the same thread. Strings handed out by
//! the library must be released with `qm_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmeasure::experiment::{compare_collapse_vs_restriction, run_cat, run_scenario, CatGeometry, CatReport, Report};
use qmeasure::report::{emit_cat_report, emit_report, Format};
use qmeasure::scenario::{parse_scenario, Scenario};
use qmeasure::{Complex64, Error};

/// Status codes. The first four match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmStatus {
    Ok = 0,
    Validation = 1,
    Numerical = 2,
    Internal = 3,
    NullPointer = 4,
    Utf8 = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmFormat {
    Table = 0,
    Json = 1,
}

/// Result of `qm_compare`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QmComparison {
    pub dim: usize,
    pub n_random: usize,
    pub seed: u64,
    pub scenario_deviation: f64,
    pub worst_deviation: f64,
    pub mean_deviation: f64,
    pub worst_case: usize,
}

/// A parsed and validated scenario.
pub struct QmScenario {
    inner: Scenario,
}

/// Output of `qm_run` or `qm_run_cat`.
pub struct QmReport {
    inner: ReportKind,
}

enum ReportKind {
    Scenario(Report),
    Cat(CatReport),
}

impl ReportKind {
    fn report(&self) -> &Report {
        match self {
            ReportKind::Scenario(r) => r,
            ReportKind::Cat(c) => &c.report,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    // interior NULs cannot cross the boundary
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> QmStatus {
    match e.exit_code() {
        2 => QmStatus::Numerical,
        1 => QmStatus::Validation,
        _ => QmStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard<F>(f: F) -> QmStatus
where
    F: FnOnce() -> Result<(), (QmStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal failure (panic)");
            QmStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (QmStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (QmStatus, String) {
    (QmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (QmStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (QmStatus::Utf8, format!("{what} is not valid UTF-8")))
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn qm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a scenario JSON document.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_scenario_parse(json: *const c_char, out: *mut *mut QmScenario) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let inner = parse_scenario(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(QmScenario { inner }));
        Ok(())
    })
}

/// # Safety
/// `scenario` must come from `qm_scenario_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qm_scenario_free(scenario: *mut QmScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// System dimension of a scenario, or 0 for NULL.
///
/// # Safety
/// `scenario` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_scenario_system_dim(scenario: *const QmScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.system_dim)
}

/// Runs a scenario.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_run(scenario: *const QmScenario, out: *mut *mut QmReport) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let report = run_scenario(&s.inner).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(QmReport {
            inner: ReportKind::Scenario(report),
        }));
        Ok(())
    })
}

/// Cat superposition on a spin chain of `chain_length` sites, or on a single
/// pointer of dimension `macro_dim` when that is nonzero.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_run_cat(
    c1_re: f64,
    c1_im: f64,
    c2_re: f64,
    c2_im: f64,
    chain_length: u32,
    macro_dim: usize,
    out: *mut *mut QmReport,
) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let geometry = if macro_dim == 0 {
            CatGeometry::SpinChain { length: chain_length }
        } else {
            CatGeometry::Macro { dim: macro_dim }
        };
        let report = run_cat(Complex64::new(c1_re, c1_im), Complex64::new(c2_re, c2_im), geometry).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(QmReport {
            inner: ReportKind::Cat(report),
        }));
        Ok(())
    })
}

/// Compares collapse with restriction on `n_random` random cases.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_compare(
    scenario: *const QmScenario,
    n_random: usize,
    seed: u64,
    out: *mut QmComparison,
) -> QmStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let c = compare_collapse_vs_restriction(&s.inner, n_random, seed).map_err(lib_err)?;
        *out = QmComparison {
            dim: c.dim,
            n_random: c.n_random,
            seed: c.seed,
            scenario_deviation: c.scenario_deviation,
            worst_deviation: c.worst_deviation,
            mean_deviation: c.mean_deviation,
            worst_case: c.worst_case,
        };
        Ok(())
    })
}

/// # Safety
/// `report` must come from `qm_run`/`qm_run_cat` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qm_report_free(report: *mut QmReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Number of outcomes in a report, or 0 for NULL.
///
/// # Safety
/// `report` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qm_report_outcome_count(report: *const QmReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.report().born.outcomes.len())
}

/// Copies outcomes and their Born probabilities into caller buffers of
/// length `len`, which must be at least `qm_report_outcome_count`. Either
/// buffer may be NULL to skip it.
///
/// # Safety
/// Non-NULL buffers must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qm_report_born(
    report: *const QmReport,
    outcomes: *mut f64,
    probabilities: *mut f64,
    len: usize,
) -> QmStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?.inner.report();
        let n = r.born.outcomes.len();
        if len < n {
            return Err((
                QmStatus::Validation,
                format!("buffer holds {len} values, report has {n}"),
            ));
        }
        for (dst, src) in [(outcomes, &r.born.outcomes), (probabilities, &r.born.probabilities)] {
            if !dst.is_null() {
                ptr::copy_nonoverlapping(src.as_ptr(), dst, n);
            }
        }
        Ok(())
    })
}

/// Largest disagreement among the Born, collapsed and restricted weights.
///
/// # Safety
/// `report` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_report_max_deviation(report: *const QmReport, out: *mut f64) -> QmStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = r.inner.report().max_deviation;
        Ok(())
    })
}

/// Renders a report. Release the string with `qm_string_free`.
///
/// # Safety
/// `report` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qm_report_render(
    report: *const QmReport,
    format: QmFormat,
    out: *mut *mut c_char,
) -> QmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let format = match format {
            QmFormat::Table => Format::Table,
            QmFormat::Json => Format::Json,
        };
        let text = match &r.inner {
            ReportKind::Scenario(s) => emit_report(s, format),
            ReportKind::Cat(c) => emit_cat_report(c, format),
        };
        let text = CString::new(text).map_err(|_| (QmStatus::Internal, "report contains NUL".to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn qm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
