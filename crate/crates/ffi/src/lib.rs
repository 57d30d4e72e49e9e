//! C ABI over `ntnlink`.
//!
//! Every function returns an [`NtnStatus`]; results go through out-pointers.
//! On failure `ntn_last_error` describes the most recent error on the calling
//! thread. Handles come from `ntn_link_new*` and are released with
//! `ntn_link_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ntnlink::cli::{RunConfig, Scenario};
use ntnlink::e2e::{self, E2eError, ModulationScheme};
use ntnlink::rf::db_to_linear;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NtnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Numeric = 4,
    Panic = 5,
}

/// Opaque link handle.
pub struct NtnLink {
    scenario: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn e2e_status(e: E2eError) -> NtnStatus {
    let status = match e {
        E2eError::InvalidParameter(_) | E2eError::DiversityContract(_) => NtnStatus::InvalidArgument,
        _ => NtnStatus::Numeric,
    };
    set_error(e.to_string());
    status
}

/// Run `f`, turning panics into [`NtnStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), NtnStatus>) -> NtnStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NtnStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            NtnStatus::Panic
        }
    }
}

unsafe fn link_ref<'a>(link: *const NtnLink) -> Result<&'a NtnLink, NtnStatus> {
    if link.is_null() {
        set_error("null link handle");
        return Err(NtnStatus::NullPointer);
    }
    Ok(&*link)
}

unsafe fn write_out(out: *mut f64, v: f64) {
    *out = v;
}

fn check_out<T>(out: *mut T) -> Result<(), NtnStatus> {
    if out.is_null() {
        set_error("null output pointer");
        return Err(NtnStatus::NullPointer);
    }
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, NtnStatus> {
    if s.is_null() {
        set_error(format!("null {what}"));
        return Err(NtnStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        NtnStatus::InvalidArgument
    })
}

fn new_link(config: RunConfig, out: *mut *mut NtnLink) -> Result<(), NtnStatus> {
    let mut config = config;
    config.normalize();
    let scenario = config.scenario().map_err(|e| {
        set_error(e.to_string());
        NtnStatus::InvalidConfig
    })?;
    // SAFETY: `out` checked non-null by the callers
    unsafe { *out = Box::into_raw(Box::new(NtnLink { scenario })) };
    Ok(())
}

/// Link with the baseline parameters (HS shadowing, heterodyne detection).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ntn_link_new_default(out: *mut *mut NtnLink) -> NtnStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        new_link(RunConfig::default(), out)
    })
}

/// Link from a JSON run configuration; omitted fields take their defaults.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ntn_link_from_json(json: *const c_char, out: *mut *mut NtnLink) -> NtnStatus {
    guard(|| {
        check_out(out)?;
        *out = ptr::null_mut();
        let text = c_str(json, "configuration")?;
        let config: RunConfig = serde_json::from_str(text).map_err(|e| {
            set_error(format!("config: {e}"));
            NtnStatus::InvalidConfig
        })?;
        new_link(config, out)
    })
}

/// Release a handle; null is ignored.
///
/// # Safety
/// `link` must come from `ntn_link_new*` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ntn_link_free(link: *mut NtnLink) {
    if !link.is_null() {
        drop(Box::from_raw(link));
    }
}

fn at_snr(link: &NtnLink, gamma_h_db: f64) -> Result<e2e::E2EConfig, NtnStatus> {
    if !gamma_h_db.is_finite() {
        set_error(format!("average SNR {gamma_h_db} dB is not finite"));
        return Err(NtnStatus::InvalidArgument);
    }
    Ok(link.scenario.e2e.with_gamma_bar_h(db_to_linear(gamma_h_db)))
}

/// Shared body of the scalar metrics.
unsafe fn metric(
    link: *const NtnLink,
    gamma_h_db: f64,
    out: *mut f64,
    f: impl FnOnce(&NtnLink, &e2e::E2EConfig) -> Result<f64, E2eError>,
) -> NtnStatus {
    guard(|| {
        let link = link_ref(link)?;
        check_out(out)?;
        let cfg = at_snr(link, gamma_h_db)?;
        let v = f(link, &cfg).map_err(e2e_status)?;
        write_out(out, v);
        Ok(())
    })
}

/// Outage probability at the configured threshold.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ntn_outage_probability(link: *const NtnLink, gamma_h_db: f64, out: *mut f64) -> NtnStatus {
    metric(link, gamma_h_db, out, |l, c| e2e::outage_probability(&l.scenario.link, c))
}

/// High-SNR outage expansion.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ntn_outage_asymptotic(link: *const NtnLink, gamma_h_db: f64, out: *mut f64) -> NtnStatus {
    metric(link, gamma_h_db, out, |l, c| e2e::outage_asymptotic(&l.scenario.link, c))
}

/// End-to-end SNR CDF at linear `gamma`.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ntn_e2e_cdf(link: *const NtnLink, gamma: f64, gamma_h_db: f64, out: *mut f64) -> NtnStatus {
    metric(link, gamma_h_db, out, |l, c| e2e::e2e_cdf(gamma, &l.scenario.link, c))
}

/// Average BER for `modulation` (`ook`, `bpsk`, `mpsk:M`, `mqam:M`).
///
/// # Safety
/// `link` must be a live handle, `modulation` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ntn_avg_ber(
    link: *const NtnLink,
    modulation: *const c_char,
    gamma_h_db: f64,
    out: *mut f64,
) -> NtnStatus {
    let scheme = match guard_scheme(modulation) {
        Ok(s) => s,
        Err(s) => return s,
    };
    metric(link, gamma_h_db, out, |l, c| e2e::avg_ber(&scheme, &l.scenario.link, c))
}

unsafe fn guard_scheme(modulation: *const c_char) -> Result<ModulationScheme, NtnStatus> {
    clear_error();
    let name = c_str(modulation, "modulation")?;
    name.parse::<ModulationScheme>().map_err(e2e_status)
}

/// Ergodic capacity in nats.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ntn_ergodic_capacity(link: *const NtnLink, gamma_h_db: f64, out: *mut f64) -> NtnStatus {
    metric(link, gamma_h_db, out, |l, c| e2e::ergodic_capacity(&l.scenario.link, c))
}

/// Diversity order of the outage curve; needs circular jitter.
///
/// # Safety
/// `link` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ntn_diversity_order(link: *const NtnLink, out: *mut f64) -> NtnStatus {
    guard(|| {
        let link = link_ref(link)?;
        check_out(out)?;
        let d = &link.scenario.link.fso;
        let v = e2e::diversity_order(d.alpha, d.beta, d.eta_s, link.scenario.e2e.detection, d.jitter_ratio)
            .map_err(e2e_status)?;
        write_out(out, v);
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn ntn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ntn_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}
