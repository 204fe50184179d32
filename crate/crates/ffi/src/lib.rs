//! C interface to `rootldpc`.
//!
//! Every function returns an [`RldpcStatus`]. On failure the message of the
//! most recent error on the calling thread is available through
//! [`rldpc_last_error`]. Handles are opaque and must be released with their
//! `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rootldpc::alist::{read_alist, write_alist};
use rootldpc::channel::outage_probability;
use rootldpc::construct::{build_root_regular, build_wstar2, DegreeDistribution};
use rootldpc::decoder::{Code, Decoder, DecoderConfig, DecoderVariant};
use rootldpc::density::evolution::{awgn_threshold, DeConfig, Ensemble};
use rootldpc::gf2::{diversity_analysis, BitMatrix, MinBlockWeight};
use rootldpc::numeric::db_to_linear;
use rootldpc::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RldpcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    BudgetExceeded = 4,
    Infeasible = 5,
    DegreeDistribution = 6,
    Numerical = 7,
    Parse = 8,
    Io = 9,
    Panic = 10,
}

/// Decoding algorithm selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RldpcVariant {
    Bp = 0,
    MinSum = 1,
}

/// Density-evolution recursion selector.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RldpcEnsemble {
    Random = 0,
    Root = 1,
}

/// A parity-check matrix together with its information positions.
pub struct RldpcCode {
    h: BitMatrix,
    code: Code,
}

/// An iterative decoder bound to a copy of a code.
pub struct RldpcDecoder {
    code: Code,
    cfg: DecoderConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(e: &Error) -> RldpcStatus {
    match e {
        Error::Dimension(_) | Error::UnsupportedBlockCount(_) | Error::GridMismatch => RldpcStatus::Dimension,
        Error::BudgetExceeded { .. } => RldpcStatus::BudgetExceeded,
        Error::Infeasible(_) | Error::DiversityCollapse => RldpcStatus::Infeasible,
        Error::DegreeDistribution(_) => RldpcStatus::DegreeDistribution,
        Error::Numerical(_) => RldpcStatus::Numerical,
        Error::Parse { .. } => RldpcStatus::Parse,
        Error::Config(_) => RldpcStatus::InvalidArgument,
        Error::Io(_) => RldpcStatus::Io,
    }
}

/// Run `f`, converting library errors and panics into status codes.
fn guard<F>(f: F) -> RldpcStatus
where
    F: FnOnce() -> Result<(), RldpcStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RldpcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RldpcStatus::Panic
        }
    }
}

fn lib<T>(r: rootldpc::Result<T>) -> Result<T, RldpcStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn fail(status: RldpcStatus, message: &str) -> RldpcStatus {
    set_error(message);
    status
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), RldpcStatus> {
    if p.is_null() {
        Err(fail(RldpcStatus::NullPointer, &format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn path_arg(path: *const c_char) -> Result<String, RldpcStatus> {
    non_null(path, "path")?;
    // SAFETY: checked non-null; the caller promises a NUL-terminated string.
    let s = unsafe { CStr::from_ptr(path) };
    s.to_str()
        .map(str::to_owned)
        .map_err(|_| fail(RldpcStatus::InvalidArgument, "path is not valid UTF-8"))
}

fn publish_code(h: BitMatrix, code: Code, out: *mut *mut RldpcCode) -> Result<(), RldpcStatus> {
    // SAFETY: the caller checked `out` and owns the slot.
    unsafe { *out = Box::into_raw(Box::new(RldpcCode { h, code })) };
    Ok(())
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes). Returns the full message length without the
/// terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rldpc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Regular (3,6) root-LDPC code of length `n` (a multiple of 4).
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rldpc_code_root_regular(n: usize, seed: u64, out: *mut *mut RldpcCode) -> RldpcStatus {
    guard(|| {
        non_null(out, "out")?;
        let root = lib(build_root_regular(n, seed))?;
        publish_code(root.h.clone(), Code::from_root(&root), out)
    })
}

/// Full-diversity code with minimum blockwise weight 2 (even `n` ≥ 4).
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rldpc_code_wstar2(n: usize, out: *mut *mut RldpcCode) -> RldpcStatus {
    guard(|| {
        non_null(out, "out")?;
        let h = lib(build_wstar2(n))?;
        let code = lib(Code::from_matrix(h.clone(), None))?;
        publish_code(h, code, out)
    })
}

/// Code read from an alist file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rldpc_code_read_alist(path: *const c_char, out: *mut *mut RldpcCode) -> RldpcStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = path_arg(path)?;
        let file = lib(File::open(&path).map_err(Error::from))?;
        let h = lib(read_alist(BufReader::new(file)))?;
        let code = lib(Code::from_matrix(h.clone(), None))?;
        publish_code(h, code, out)
    })
}

/// Write the parity-check matrix in alist format.
///
/// # Safety
/// `code` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rldpc_code_write_alist(code: *const RldpcCode, path: *const c_char) -> RldpcStatus {
    guard(|| {
        non_null(code, "code")?;
        let path = path_arg(path)?;
        let file = lib(File::create(&path).map_err(Error::from))?;
        lib(write_alist(&(*code).h, file))
    })
}

/// Length, number of checks and GF(2) rank of the parity-check matrix.
/// Any output pointer may be null.
///
/// # Safety
/// `code` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rldpc_code_dimensions(
    code: *const RldpcCode,
    n: *mut usize,
    checks: *mut usize,
    rank: *mut usize,
) -> RldpcStatus {
    guard(|| {
        non_null(code, "code")?;
        let h = &(*code).h;
        if !n.is_null() {
            *n = h.cols();
        }
        if !checks.is_null() {
            *checks = h.rows();
        }
        if !rank.is_null() {
            *rank = h.rank();
        }
        Ok(())
    })
}

/// Block diversity and minimum blockwise weight over `nc` equal blocks, by
/// exhaustive enumeration. `wstar` is set to -1 when the code has no
/// nonzero codeword.
///
/// # Safety
/// `code` must be a live handle; `diversity` and `wstar` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rldpc_code_diversity(
    code: *const RldpcCode,
    nc: usize,
    diversity: *mut usize,
    wstar: *mut i64,
) -> RldpcStatus {
    guard(|| {
        non_null(code, "code")?;
        non_null(diversity, "diversity")?;
        non_null(wstar, "wstar")?;
        let r = lib(diversity_analysis(&(*code).h, nc))?;
        *diversity = r.d;
        *wstar = match r.wstar {
            MinBlockWeight::Finite(w) => w as i64,
            MinBlockWeight::Infinite => -1,
        };
        Ok(())
    })
}

/// Release a code handle. Null is ignored.
///
/// # Safety
/// `code` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rldpc_code_free(code: *mut RldpcCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Decoder for `code` with at most `max_iter` iterations. The decoder keeps
/// its own copy of the code.
///
/// # Safety
/// `code` must be a live handle; `out` must point to writable storage for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn rldpc_decoder_new(
    code: *const RldpcCode,
    variant: RldpcVariant,
    max_iter: usize,
    out: *mut *mut RldpcDecoder,
) -> RldpcStatus {
    guard(|| {
        non_null(code, "code")?;
        non_null(out, "out")?;
        let variant = match variant {
            RldpcVariant::Bp => DecoderVariant::Bp,
            RldpcVariant::MinSum => DecoderVariant::MinSum,
        };
        let cfg = DecoderConfig { max_iter, ..DecoderConfig::with_variant(variant) };
        lib(cfg.validate())?;
        *out = Box::into_raw(Box::new(RldpcDecoder { code: (*code).code.clone(), cfg }));
        Ok(())
    })
}

/// Decode `n` channel LLRs (positive favours bit 0) into `bits`.
/// `converged` and `iterations` may be null.
///
/// # Safety
/// `decoder` must be a live handle, `llr` must hold `n` readable values and
/// `bits` `n` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rldpc_decoder_decode(
    decoder: *mut RldpcDecoder,
    llr: *const f64,
    n: usize,
    bits: *mut u8,
    converged: *mut bool,
    iterations: *mut usize,
) -> RldpcStatus {
    guard(|| {
        non_null(decoder, "decoder")?;
        non_null(llr, "llr")?;
        non_null(bits, "bits")?;
        let d = &*decoder;
        if n != d.code.n() {
            return Err(fail(RldpcStatus::Dimension, &format!("expected {} LLRs, got {n}", d.code.n())));
        }
        let input = std::slice::from_raw_parts(llr, n);
        let r = lib(Decoder::new(&d.code, &d.cfg).decode(input))?;
        std::slice::from_raw_parts_mut(bits, n).copy_from_slice(&r.hard_bits);
        if !converged.is_null() {
            *converged = r.converged;
        }
        if !iterations.is_null() {
            *iterations = r.iterations;
        }
        Ok(())
    })
}

/// Release a decoder handle. Null is ignored.
///
/// # Safety
/// `decoder` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rldpc_decoder_free(decoder: *mut RldpcDecoder) {
    if !decoder.is_null() {
        drop(Box::from_raw(decoder));
    }
}

/// AWGN density-evolution threshold (Eb/N0 in dB) of the regular (dv, dc)
/// ensemble, bisected to `tol_db`.
///
/// # Safety
/// `threshold_db` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rldpc_awgn_threshold(
    ensemble: RldpcEnsemble,
    dv: usize,
    dc: usize,
    tol_db: f64,
    threshold_db: *mut f64,
) -> RldpcStatus {
    guard(|| {
        non_null(threshold_db, "threshold_db")?;
        if dv < 2 || dc <= dv || !(tol_db > 0.0) {
            return Err(fail(RldpcStatus::InvalidArgument, "need 2 <= dv < dc and tol_db > 0"));
        }
        let ensemble = match ensemble {
            RldpcEnsemble::Random => Ensemble::Random,
            RldpcEnsemble::Root => Ensemble::Root,
        };
        let r = lib(awgn_threshold(&DegreeDistribution::regular(dv, dc), ensemble, &DeConfig::default(), tol_db))?;
        *threshold_db = r.threshold_db;
        Ok(())
    })
}

/// Monte Carlo outage probability of `nc` Rayleigh blocks at `ebn0_db`.
///
/// # Safety
/// `p_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rldpc_outage_probability(
    ebn0_db: f64,
    rate: f64,
    nc: usize,
    samples: u64,
    seed: u64,
    p_out: *mut f64,
) -> RldpcStatus {
    guard(|| {
        non_null(p_out, "p_out")?;
        if nc == 0 || samples == 0 || !(rate > 0.0 && rate <= 1.0) || !ebn0_db.is_finite() {
            return Err(fail(RldpcStatus::InvalidArgument, "need nc > 0, samples > 0, 0 < rate <= 1"));
        }
        *p_out = outage_probability(rate * db_to_linear(ebn0_db), rate, nc, samples, seed).p_out;
        Ok(())
    })
}
