//! C ABI over the area-angle library.
//!
//! Every fallible call returns an [`AaStatus`]; on failure a message is kept
//! per thread and can be read with [`aa_last_error`]. Handles are opaque and
//! must be released with their matching `*_free` function. Strings returned
//! by the library are owned by the caller and released with
//! [`aa_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use area_angle::outage::ScanOptions;
use area_angle::report::{self, Metadata, ScanReport};
use area_angle::{AreaSpec, Error, Network};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Io = 4,
    InvalidNetwork = 5,
    InvalidArea = 6,
    UnknownBus = 7,
    UnknownLine = 8,
    LineOutOfService = 9,
    Islanding = 10,
    NotAreaLine = 11,
    DegenerateArea = 12,
    Singular = 13,
    DimensionMismatch = 14,
    UndefinedDirection = 15,
    EmptyResults = 16,
    Generator = 17,
    OutOfRange = 18,
    Panic = 99,
}

impl From<&Error> for AaStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => Self::Parse,
            Error::Io(_) => Self::Io,
            Error::InvalidNetwork(_) => Self::InvalidNetwork,
            Error::InvalidArea(_) => Self::InvalidArea,
            Error::UnknownBus(_) => Self::UnknownBus,
            Error::UnknownLine(_) => Self::UnknownLine,
            Error::LineOutOfService(_) => Self::LineOutOfService,
            Error::Islanding(_) => Self::Islanding,
            Error::NotAreaLine(_) => Self::NotAreaLine,
            Error::DegenerateArea(_) => Self::DegenerateArea,
            Error::Singular(_) => Self::Singular,
            Error::DimensionMismatch { .. } => Self::DimensionMismatch,
            Error::UndefinedDirection(_) => Self::UndefinedDirection,
            Error::EmptyResults => Self::EmptyResults,
            Error::Generator(_) => Self::Generator,
        }
    }
}

/// A validated network.
pub struct AaNetwork(Network);

/// An area checked against the network it was loaded with.
pub struct AaArea(AreaSpec);

/// A baseline or scan report.
pub struct AaReport(ScanReport);

/// Base-case area quantities.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AaBaseline {
    pub theta_area_rad: f64,
    pub theta_area_deg: f64,
    pub b_area: f64,
    pub p_area: f64,
    pub border_count: usize,
}

/// One border bus and its weight. `side` is 'a' or 'b'.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AaBorderWeight {
    pub bus: u32,
    pub side: c_char,
    pub weight: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: AaStatus, msg: impl Into<String>) -> AaStatus {
    set_error(msg.into());
    status
}

fn fail_with(e: Error) -> AaStatus {
    let status = AaStatus::from(&e);
    set_error(e.to_string());
    status
}

/// Runs `f`, clearing the error slot first and turning panics into a status.
fn guard(f: impl FnOnce() -> AaStatus) -> AaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(AaStatus::Panic, msg)
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, AaStatus> {
    if s.is_null() {
        return Err(fail(AaStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(AaStatus::InvalidUtf8, e.to_string()))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

macro_rules! deref {
    ($p:expr, $what:literal) => {
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(AaStatus::NullPointer, concat!("null ", $what)),
        }
    };
}

macro_rules! out_ptr {
    ($p:expr) => {
        if $p.is_null() {
            return fail(AaStatus::NullPointer, "null output pointer");
        }
    };
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next library call on the same thread.
#[no_mangle]
pub extern "C" fn aa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn aa_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a case document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aa_network_from_json(
    json: *const c_char,
    out: *mut *mut AaNetwork,
) -> AaStatus {
    guard(|| {
        out_ptr!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match area_angle::model::load_case(text.as_bytes()) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(AaNetwork(net)));
                AaStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// # Safety
/// `net` must come from [`aa_network_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn aa_network_free(net: *mut AaNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aa_network_bus_count(net: *const AaNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.bus_count())
}

/// # Safety
/// `net` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aa_network_line_count(net: *const AaNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.lines().len())
}

/// Parses an area document and checks it against `net`.
///
/// # Safety
/// `net` must be a live handle, `json` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aa_area_from_json(
    net: *const AaNetwork,
    json: *const c_char,
    out: *mut *mut AaArea,
) -> AaStatus {
    guard(|| {
        let net = deref!(net, "network");
        out_ptr!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match area_angle::model::load_area_spec(text.as_bytes(), &net.0) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(AaArea(spec)));
                AaStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// # Safety
/// `area` must come from [`aa_area_from_json`] or be null.
#[no_mangle]
pub unsafe extern "C" fn aa_area_free(area: *mut AaArea) {
    if !area.is_null() {
        drop(Box::from_raw(area));
    }
}

fn metadata() -> Metadata {
    Metadata::new("<memory>", "<memory>")
}

/// Base-case report: weights, area susceptance, angle and power.
///
/// # Safety
/// Handles must be live and `out` valid. `area` must have been loaded
/// against `net`.
#[no_mangle]
pub unsafe extern "C" fn aa_baseline(
    net: *const AaNetwork,
    area: *const AaArea,
    out: *mut *mut AaReport,
) -> AaStatus {
    guard(|| {
        let net = deref!(net, "network");
        let area = deref!(area, "area");
        out_ptr!(out);
        match report::baseline_report(&net.0, &area.0, metadata()) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(AaReport(r)));
                AaStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// Scans every single line outage inside the area, with severities.
/// `jobs` of 0 uses all cores; `fast_path` non-zero uses low-rank updates.
///
/// # Safety
/// As for [`aa_baseline`].
#[no_mangle]
pub unsafe extern "C" fn aa_scan(
    net: *const AaNetwork,
    area: *const AaArea,
    fast_path: i32,
    jobs: usize,
    out: *mut *mut AaReport,
) -> AaStatus {
    guard(|| {
        let net = deref!(net, "network");
        let area = deref!(area, "area");
        out_ptr!(out);
        let options = ScanOptions {
            fast_path: fast_path != 0,
            jobs: (jobs > 0).then_some(jobs),
        };
        match report::scan_report(&net.0, &area.0, &options, metadata()) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(AaReport(r)));
                AaStatus::Ok
            }
            Err(e) => fail_with(e),
        }
    })
}

/// # Safety
/// `report` must come from [`aa_baseline`] or [`aa_scan`], or be null.
#[no_mangle]
pub unsafe extern "C" fn aa_report_free(report: *mut AaReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aa_report_baseline(
    report: *const AaReport,
    out: *mut AaBaseline,
) -> AaStatus {
    guard(|| {
        let r = deref!(report, "report");
        out_ptr!(out);
        let b = &r.0.base;
        *out = AaBaseline {
            theta_area_rad: b.theta_area_rad,
            theta_area_deg: b.theta_area_deg,
            b_area: b.b_area,
            p_area: b.p_area,
            border_count: b.weights.len(),
        };
        AaStatus::Ok
    })
}

/// Border weight `index`, side a first.
///
/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aa_report_weight(
    report: *const AaReport,
    index: usize,
    out: *mut AaBorderWeight,
) -> AaStatus {
    guard(|| {
        let r = deref!(report, "report");
        out_ptr!(out);
        let Some(w) = r.0.base.weights.get(index) else {
            return fail(AaStatus::OutOfRange, format!("no border weight {index}"));
        };
        *out = AaBorderWeight {
            bus: w.bus,
            side: if w.side == "a" { b'a' } else { b'b' } as c_char,
            weight: w.weight,
        };
        AaStatus::Ok
    })
}

/// Number of outage rows; zero for a baseline report.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aa_report_outage_count(report: *const AaReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.outages.len())
}

/// Report as pretty JSON. Release with [`aa_string_free`].
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aa_report_to_json(report: *const AaReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => into_c_string(r.0.to_json()),
        None => ptr::null_mut(),
    }
}

/// Report as CSV, outage rows then the base row. Release with
/// [`aa_string_free`].
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn aa_report_to_csv(report: *const AaReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => into_c_string(r.0.to_csv()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn aa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
