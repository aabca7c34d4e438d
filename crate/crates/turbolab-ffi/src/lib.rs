//! C ABI for turbolab.
//!
//! Encoders travel as opaque handles created from JSON spec text; results
//! come back as status codes plus out-parameters or heap-allocated strings
//! (JSON / CSV) that the caller releases with [`tl_string_free`]. The last
//! error message per thread is available through [`tl_last_error`].

use rand::SeedableRng;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use turbolab::bounds;
use turbolab::classify;
use turbolab::precise::parse_decimal;
use turbolab::specfile::EncoderSpecFile;
use turbolab::turbo;
use turbolab::{Budgets, Error};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TlStatus {
    Ok = 0,
    InvalidArgument = 1,
    ParseError = 2,
    BudgetExceeded = 3,
    CheckFailed = 4,
    Internal = 5,
}

fn status_of(err: &Error) -> TlStatus {
    match err {
        Error::Spec(_) | Error::Json(_) => TlStatus::ParseError,
        Error::BudgetExceeded { .. } => TlStatus::BudgetExceeded,
        Error::CheckFailed(_) | Error::Hypotheses(_) => TlStatus::CheckFailed,
        Error::Dimension(_) | Error::SpaceMismatch | Error::MissingRoles(_) => {
            TlStatus::InvalidArgument
        }
        _ => TlStatus::Internal,
    }
}

fn fail(err: Error) -> TlStatus {
    let s = status_of(&err);
    set_error(err.to_string());
    s
}

/// An opaque loaded encoder (seed morphism plus an optional block view).
pub struct TlEncoder {
    inner: turbolab::specfile::LoadedEncoder,
}

/// The last error message raised on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a `tl_*` call and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse an encoder from JSON spec text (same schema as the CLI files).
/// On success writes a handle to `out`; release it with [`tl_encoder_free`].
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_encoder_from_json(
    json: *const c_char,
    out: *mut *mut TlEncoder,
) -> TlStatus {
    if json.is_null() || out.is_null() {
        set_error("null argument".into());
        return TlStatus::InvalidArgument;
    }
    let text = match unsafe { CStr::from_ptr(json) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("spec text is not valid UTF-8".into());
            return TlStatus::ParseError;
        }
    };
    let spec: EncoderSpecFile = match serde_json::from_str(text) {
        Ok(s) => s,
        Err(e) => return fail(Error::Json(e)),
    };
    match spec.build("encoder") {
        Ok(loaded) => {
            unsafe { *out = Box::into_raw(Box::new(TlEncoder { inner: loaded })) };
            TlStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Release an encoder handle.
///
/// # Safety
/// `h` must come from [`tl_encoder_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn tl_encoder_free(h: *mut TlEncoder) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

/// Basic shape of an encoder.
#[repr(C)]
pub struct TlEncoderInfo {
    pub letter_dim: u8,
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub m: usize,
    /// Nonzero when the encoder is memoryless and usable as an outer block.
    pub has_block_view: u8,
}

/// # Safety
/// `h` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tl_encoder_info(h: *const TlEncoder, out: *mut TlEncoderInfo) -> TlStatus {
    if h.is_null() || out.is_null() {
        set_error("null argument".into());
        return TlStatus::InvalidArgument;
    }
    let enc = unsafe { &*h };
    let seed = &enc.inner.seed;
    unsafe {
        *out = TlEncoderInfo {
            letter_dim: seed.space().bits(),
            n: seed.n(),
            k: seed.k(),
            s: seed.s(),
            m: seed.m(),
            has_block_view: u8::from(enc.inner.block.is_some()),
        };
    }
    TlStatus::Ok
}

fn to_cstring(s: String) -> *mut c_char {
    CString::new(s)
        .unwrap_or_else(|_| CString::new("").unwrap())
        .into_raw()
}

/// Classification report as JSON (recursive / totally recursive /
/// systematic verdicts, speed, memory split sizes).
///
/// # Safety
/// `h` and `out_json` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tl_classify_json(
    h: *const TlEncoder,
    n_falsify: usize,
    out_json: *mut *mut c_char,
) -> TlStatus {
    if h.is_null() || out_json.is_null() {
        set_error("null argument".into());
        return TlStatus::InvalidArgument;
    }
    let enc = unsafe { &*h };
    match classify::classify_report(&enc.inner.name, &enc.inner.seed, n_falsify, &Budgets::default())
    {
        Ok(report) => match serde_json::to_string_pretty(&report) {
            Ok(json) => {
                unsafe { *out_json = to_cstring(json) };
                TlStatus::Ok
            }
            Err(e) => fail(Error::Json(e)),
        },
        Err(e) => fail(e),
    }
}

/// Exact distances of a memoryless encoder. Infinite distances come back
/// as `UINT64_MAX`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tl_distances(
    h: *const TlEncoder,
    out_d_c: *mut u64,
    out_d_q: *mut u64,
) -> TlStatus {
    if h.is_null() || out_d_c.is_null() || out_d_q.is_null() {
        set_error("null argument".into());
        return TlStatus::InvalidArgument;
    }
    let enc = unsafe { &*h };
    let Some(block) = &enc.inner.block else {
        set_error("distances need a memoryless encoder (m = 0)".into());
        return TlStatus::InvalidArgument;
    };
    match block.distances(&Budgets::default()) {
        Ok(d) => {
            unsafe {
                *out_d_c = d.d_c.finite().unwrap_or(u64::MAX);
                *out_d_q = d.d_q.finite().unwrap_or(u64::MAX);
            }
            TlStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Exact convolutional spectrum of a seed encoder as CSV (`w,d,count`).
///
/// # Safety
/// `h` and `out_csv` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tl_inner_spectrum_csv(
    h: *const TlEncoder,
    n_steps: usize,
    w_max: usize,
    d_max: u64,
    cumulative: u8,
    out_csv: *mut *mut c_char,
) -> TlStatus {
    if h.is_null() || out_csv.is_null() {
        set_error("null argument".into());
        return TlStatus::InvalidArgument;
    }
    let enc = unsafe { &*h };
    match turbolab::spectra::inner_spectrum(
        &enc.inner.seed,
        n_steps,
        w_max,
        d_max,
        &Budgets::default(),
    ) {
        Ok(t) => {
            let table = if cumulative != 0 { &t.cumulative } else { &t.exact };
            unsafe { *out_csv = to_cstring(table.to_csv()) };
            TlStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Exact distance of a turbo instance with a sampled interleaver
/// (`interleaver_seed`; pass the same seed to reproduce a trial).
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tl_turbo_distance(
    outer: *const TlEncoder,
    inner: *const TlEncoder,
    n_blocks: usize,
    interleaver_seed: u64,
    out_d_c: *mut u64,
) -> TlStatus {
    if outer.is_null() || inner.is_null() || out_d_c.is_null() {
        set_error("null argument".into());
        return TlStatus::InvalidArgument;
    }
    let outer = unsafe { &*outer };
    let inner = unsafe { &*inner };
    let Some(block) = &outer.inner.block else {
        set_error("the outer encoder must be memoryless (m = 0)".into());
        return TlStatus::InvalidArgument;
    };
    let budgets = Budgets::default();
    let result = (|| -> turbolab::Result<u64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(interleaver_seed);
        let interleaver =
            turbo::Interleaver::sample(&mut rng, n_blocks * block.n(), block.space())?;
        let t = turbo::TurboInstance::new(
            block.clone(),
            inner.inner.seed.clone(),
            interleaver,
            n_blocks,
        )?;
        let report = turbo::turbo_distance_exact(&t, false, &budgets)?;
        report
            .d_c
            .finite()
            .ok_or_else(|| Error::CheckFailed("turbo distance is infinite".into()))
    })();
    match result {
        Ok(d) => {
            unsafe { *out_d_c = d };
            TlStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Monte Carlo distance summary over random interleavers, as JSON.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tl_mc_summary_json(
    outer: *const TlEncoder,
    inner: *const TlEncoder,
    n_blocks: usize,
    trials: usize,
    master_seed: u64,
    out_json: *mut *mut c_char,
) -> TlStatus {
    if outer.is_null() || inner.is_null() || out_json.is_null() {
        set_error("null argument".into());
        return TlStatus::InvalidArgument;
    }
    let outer = unsafe { &*outer };
    let inner = unsafe { &*inner };
    let Some(block) = &outer.inner.block else {
        set_error("the outer encoder must be memoryless (m = 0)".into());
        return TlStatus::InvalidArgument;
    };
    match turbo::monte_carlo_distance(
        block,
        &inner.inner.seed,
        n_blocks,
        trials,
        master_seed,
        false,
        &[],
        &Budgets::default(),
    ) {
        Ok(report) => match serde_json::to_string_pretty(&report.summary) {
            Ok(json) => {
                unsafe { *out_json = to_cstring(json) };
                TlStatus::Ok
            }
            Err(e) => fail(Error::Json(e)),
        },
        Err(e) => fail(e),
    }
}

/// Verdicts of the sublogarithmic growth inequality.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TlLlogVerdict {
    Holds = 0,
    Fails = 1,
    NotApplicable = 2,
}

/// Check `(t llog N)^(t llog N) <= N^t` for `t = t_num / t_den`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tl_llog_check(
    t_num: u64,
    t_den: u64,
    n: u64,
    out: *mut TlLlogVerdict,
) -> TlStatus {
    if out.is_null() || t_den == 0 || t_num == 0 {
        set_error("invalid rational t".into());
        return TlStatus::InvalidArgument;
    }
    let t = match parse_decimal(&format!("{t_num}")) {
        Ok(num) => num / parse_decimal(&format!("{t_den}")).unwrap(),
        Err(e) => return fail(e),
    };
    match bounds::llog_check(&t, n) {
        Ok(v) => {
            unsafe {
                *out = match v {
                    turbolab::precise::LlogVerdict::Holds => TlLlogVerdict::Holds,
                    turbolab::precise::LlogVerdict::Fails => TlLlogVerdict::Fails,
                    turbolab::precise::LlogVerdict::NotApplicable => TlLlogVerdict::NotApplicable,
                }
            };
            TlStatus::Ok
        }
        Err(e) => fail(e),
    }
}
