//! C ABI over the distillery scheduling engine.
//!
//! Circuits and schedules are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns a
//! [`DistStatus`]; on failure [`dist_last_error`] describes the cause. Strings
//! returned through out-parameters are released with [`dist_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use distillery::icm::{parse_circuit, CircuitError, IcmCircuit};
use distillery::layout::{render, RenderFormat};
use distillery::reliability::{failure_cdf, min_extra_offline, min_extra_online, ReliabilityParams};
use distillery::report::{run_with_report, RunConfig, RunReport};
use distillery::schedulers::{
    AlapsStrategy, Algorithm, AsapLayout, HeraldOracle, ScheduleError, ScheduleOutcome, SchedulerLimits,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed circuit document or invalid argument value.
    Parse = 3,
    /// A circuit or schedule broke a semantic rule.
    Validation = 4,
    Capacity = 5,
    Oracle = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistAlgo {
    Asap = 0,
    AsapMatrix = 1,
    Alapt = 2,
    Alaps = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistStrategy {
    RepeatUntilSuccess = 0,
    FixedSequence = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistOracle {
    WorstCase = 0,
    Stochastic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistRenderFormat {
    Svg = 0,
    Ascii = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DistScheduleConfig {
    pub algo: DistAlgo,
    pub strategy: DistStrategy,
    pub oracle: DistOracle,
    pub seed: u64,
    pub p_f: f64,
    pub p_c: f64,
    /// Machine qubit limit; 0 means unlimited.
    pub max_wires: u32,
    /// Lanes per type for `AsapMatrix`.
    pub matrix_rows: u32,
    pub pooling: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DistCircuitStats {
    pub width: u32,
    pub ops: u32,
    pub inject_a: u32,
    pub inject_y: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DistExtra {
    pub s: u64,
    pub n_t: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DistMetrics {
    pub t: u64,
    pub s: u64,
    pub bb: u64,
    pub peak_width: u64,
}

pub struct DistCircuit {
    inner: IcmCircuit,
}

pub struct DistSchedule {
    outcome: ScheduleOutcome,
    report: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: DistStatus, message: impl Into<String>) -> DistStatus {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("nul bytes removed"));
    status
}

fn guard(f: impl FnOnce() -> DistStatus) -> DistStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(DistStatus::Internal, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, DistStatus> {
    if p.is_null() {
        return Err(fail(DistStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|e| fail(DistStatus::InvalidUtf8, e.to_string()))
}

fn params(p_f: f64, p_c: f64) -> Result<ReliabilityParams, DistStatus> {
    ReliabilityParams::new(p_f, p_c).map_err(|e| fail(DistStatus::Parse, e.to_string()))
}

fn out_string(out: *mut *mut c_char, s: String) -> DistStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            DistStatus::Ok
        }
        Err(_) => fail(DistStatus::Internal, "output contains a nul byte"),
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(DistStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn dist_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dist_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub unsafe extern "C" fn dist_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dist_circuit_from_json(json: *const c_char, out: *mut *mut DistCircuit) -> DistStatus {
    guard(|| {
        non_null!(out);
        let json = try_status!(text(json));
        match parse_circuit(json.as_bytes()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DistCircuit { inner }));
                DistStatus::Ok
            }
            Err(e @ CircuitError::Syntax { .. }) => fail(DistStatus::Parse, e.to_string()),
            Err(e) => fail(DistStatus::Validation, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dist_circuit_free(c: *mut DistCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dist_circuit_stats(c: *const DistCircuit, out: *mut DistCircuitStats) -> DistStatus {
    guard(|| {
        non_null!(c, out);
        let s = (*c).inner.stats();
        *out = DistCircuitStats { width: s.width, ops: s.ops, inject_a: s.inject_a, inject_y: s.inject_y };
        DistStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn dist_min_extra_offline(n_i: u64, p_f: f64, p_c: f64, out: *mut DistExtra) -> DistStatus {
    guard(|| {
        non_null!(out);
        if n_i == 0 {
            return fail(DistStatus::Parse, "n_i must be at least 1");
        }
        let e = min_extra_offline(n_i, &try_status!(params(p_f, p_c)));
        *out = DistExtra { s: e.s, n_t: e.n_t };
        DistStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn dist_min_extra_online(p_f: f64, p_c: f64, out: *mut DistExtra) -> DistStatus {
    guard(|| {
        non_null!(out);
        let e = min_extra_online(&try_status!(params(p_f, p_c)));
        *out = DistExtra { s: e.s, n_t: e.n_t };
        DistStatus::Ok
    })
}

#[no_mangle]
pub unsafe extern "C" fn dist_failure_cdf(s: u64, n_t: u64, p_f: f64, out: *mut f64) -> DistStatus {
    guard(|| {
        non_null!(out);
        match failure_cdf(s, n_t, p_f) {
            Ok(v) => {
                *out = v;
                DistStatus::Ok
            }
            Err(e) => fail(DistStatus::Parse, e.to_string()),
        }
    })
}

/// Worst-case ALAPS, repeat until success, at the default reliability.
#[no_mangle]
pub extern "C" fn dist_schedule_config_default() -> DistScheduleConfig {
    let rel = ReliabilityParams::default();
    DistScheduleConfig {
        algo: DistAlgo::Alaps,
        strategy: DistStrategy::RepeatUntilSuccess,
        oracle: DistOracle::WorstCase,
        seed: 0,
        p_f: rel.p_f(),
        p_c: rel.p_c(),
        max_wires: 0,
        matrix_rows: 8,
        pooling: true,
    }
}

fn run_config(cfg: &DistScheduleConfig) -> Result<RunConfig, DistStatus> {
    let strategy = match cfg.strategy {
        DistStrategy::RepeatUntilSuccess => AlapsStrategy::RepeatUntilSuccess,
        DistStrategy::FixedSequence => AlapsStrategy::FixedSequence,
    };
    let algorithm = match cfg.algo {
        DistAlgo::Asap => Algorithm::Asap { layout: AsapLayout::Column },
        DistAlgo::AsapMatrix => Algorithm::Asap { layout: AsapLayout::Matrix { rows: cfg.matrix_rows } },
        DistAlgo::Alapt => Algorithm::Alapt,
        DistAlgo::Alaps => Algorithm::Alaps { strategy },
    };
    let mut config = RunConfig::new(algorithm);
    config.reliability = params(cfg.p_f, cfg.p_c)?;
    config.oracle = match cfg.oracle {
        DistOracle::WorstCase => HeraldOracle::WorstCase,
        DistOracle::Stochastic => HeraldOracle::stochastic(cfg.seed, cfg.p_f),
    };
    config.limits = SchedulerLimits { m: (cfg.max_wires > 0).then_some(cfg.max_wires) };
    config.pooling = cfg.pooling;
    Ok(config)
}

/// Schedules `c`. The schedule is returned only if it passes validation.
#[no_mangle]
pub unsafe extern "C" fn dist_schedule_run(
    c: *const DistCircuit,
    cfg: *const DistScheduleConfig,
    out: *mut *mut DistSchedule,
) -> DistStatus {
    guard(|| {
        non_null!(c, cfg, out);
        let config = try_status!(run_config(&*cfg));
        match run_with_report(&config, &(*c).inner) {
            Ok((outcome, report)) if report.is_valid() => {
                *out = Box::into_raw(Box::new(DistSchedule { outcome, report }));
                DistStatus::Ok
            }
            Ok((_, report)) => fail(
                DistStatus::Validation,
                format!("schedule failed validation: {:?}", report.violations.first()),
            ),
            Err(e @ ScheduleError::Capacity(_)) => fail(DistStatus::Capacity, e.to_string()),
            Err(e @ ScheduleError::Oracle(_)) => fail(DistStatus::Oracle, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn dist_schedule_free(s: *mut DistSchedule) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn dist_schedule_metrics(s: *const DistSchedule, out: *mut DistMetrics) -> DistStatus {
    guard(|| {
        non_null!(s, out);
        let m = (*s).outcome.metrics;
        *out = DistMetrics { t: m.t, s: m.s, bb: m.bb, peak_width: m.peak_width };
        DistStatus::Ok
    })
}

/// Placement export as JSON.
#[no_mangle]
pub unsafe extern "C" fn dist_schedule_to_json(s: *const DistSchedule, out: *mut *mut c_char) -> DistStatus {
    guard(|| {
        non_null!(s, out);
        out_string(out, (*s).outcome.schedule.to_json())
    })
}

/// Run report as JSON, including the echoed configuration.
#[no_mangle]
pub unsafe extern "C" fn dist_schedule_report_json(s: *const DistSchedule, out: *mut *mut c_char) -> DistStatus {
    guard(|| {
        non_null!(s, out);
        out_string(out, (*s).report.to_json())
    })
}

#[no_mangle]
pub unsafe extern "C" fn dist_schedule_render(
    s: *const DistSchedule,
    format: DistRenderFormat,
    out: *mut *mut c_char,
) -> DistStatus {
    guard(|| {
        non_null!(s, out);
        let format = match format {
            DistRenderFormat::Svg => RenderFormat::Svg,
            DistRenderFormat::Ascii => RenderFormat::Ascii,
        };
        let bytes = render(&(*s).outcome.schedule, format);
        match String::from_utf8(bytes) {
            Ok(text) => out_string(out, text),
            Err(_) => fail(DistStatus::Internal, "renderer produced invalid UTF-8"),
        }
    })
}
