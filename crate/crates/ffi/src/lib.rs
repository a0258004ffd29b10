//! C ABI over the `weylbench` core.
//!
//! Operators cross the boundary as opaque `WbOperator` handles owned by the
//! caller and released with `wb_operator_free`. Every fallible call returns a
//! `WbStatus`; on failure the message is kept per thread and can be copied out
//! with `wb_last_error_message`. Panics are caught at the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use weylbench::algebra::{decompose, json as opjson, sharp, square, AlgebraicOperator2Forms, CurvatureTensor};
use weylbench::bounds::{constants, gap_verdict_integral, PinchVerdict};
use weylbench::model_spaces::{model_curvature, ModelSpec};
use weylbench::Error;

/// Opaque operator on two-forms.
pub struct WbOperator {
    op: AlgebraicOperator2Forms,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Dimension = 3,
    Invariant = 4,
    Parse = 5,
    NotApplicable = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Constants of the rigidity theorems; unavailable entries are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WbConstants {
    pub n: usize,
    pub s_n: f64,
    pub alpha: f64,
    pub a1: f64,
    pub a2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WbVerdict {
    pub condition_value: f64,
    pub threshold: f64,
    pub satisfied: bool,
    pub strict: bool,
}

impl From<PinchVerdict> for WbVerdict {
    fn from(v: PinchVerdict) -> Self {
        WbVerdict {
            condition_value: v.condition_value,
            threshold: v.threshold,
            satisfied: v.satisfied,
            strict: v.strict,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> WbStatus {
    match e {
        Error::DimensionTooSmall { .. } | Error::WrongDimension { .. } | Error::DimensionMismatch { .. } => {
            WbStatus::Dimension
        }
        Error::Invariant(_) => WbStatus::Invariant,
        Error::InvalidInput(_) | Error::Chart(_) => WbStatus::InvalidInput,
        Error::NotApplicable(_) => WbStatus::NotApplicable,
        Error::Parse(_) => WbStatus::Parse,
        Error::Io(_) => WbStatus::Io,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), WbStatus>) -> WbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WbStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside weylbench");
            WbStatus::Panic
        }
    }
}

fn fail(e: Error) -> WbStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, WbStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(WbStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        WbStatus::InvalidInput
    })
}

unsafe fn op_arg<'a>(p: *const WbOperator) -> Result<&'a AlgebraicOperator2Forms, WbStatus> {
    if p.is_null() {
        set_error("null operator handle");
        return Err(WbStatus::NullPointer);
    }
    Ok(&(*p).op)
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, WbStatus> {
    if p.is_null() {
        set_error("null output pointer");
        return Err(WbStatus::NullPointer);
    }
    Ok(&mut *p)
}

fn curvature(op: &AlgebraicOperator2Forms) -> Result<CurvatureTensor, WbStatus> {
    CurvatureTensor::new(op.clone()).map_err(fail)
}

fn hand_out(out: &mut *mut WbOperator, op: AlgebraicOperator2Forms) {
    *out = Box::into_raw(Box::new(WbOperator { op }));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn wb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses an operator from the dense or sparse JSON exchange format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_operator_from_json(json: *const c_char, out: *mut *mut WbOperator) -> WbStatus {
    guard(|| {
        let out = out_arg(out)?;
        let op = opjson::from_json_str(str_arg(json)?).map_err(fail)?;
        hand_out(out, op);
        Ok(())
    })
}

/// Curvature tensor of a model space, e.g. `"product:sphere:2:1,sphere:2:1"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_operator_from_model(spec: *const c_char, out: *mut *mut WbOperator) -> WbStatus {
    guard(|| {
        let out = out_arg(out)?;
        let spec: ModelSpec = str_arg(spec)?.parse().map_err(fail)?;
        let pkg = model_curvature(&spec).map_err(fail)?;
        hand_out(out, pkg.r.into_operator());
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from this library that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_operator_free(op: *mut WbOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_operator_dim(op: *const WbOperator, out: *mut usize) -> WbStatus {
    guard(|| {
        *out_arg(out)? = op_arg(op)?.dim().get();
        Ok(())
    })
}

/// Dense JSON of `op` into `buf`. `written` receives the length without the
/// NUL; `WB_STATUS_BUFFER_TOO_SMALL` is returned when `len` is not enough.
///
/// # Safety
/// `op` must be a live handle, `buf` valid for `len` bytes, `written` writable.
#[no_mangle]
pub unsafe extern "C" fn wb_operator_to_json(
    op: *const WbOperator,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
) -> WbStatus {
    guard(|| {
        let written = out_arg(written)?;
        let text = opjson::to_json_string(op_arg(op)?);
        *written = text.len();
        if buf.is_null() || len <= text.len() {
            set_error(format!("need a buffer of {} bytes", text.len() + 1));
            return Err(WbStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// `⟨a, b⟩`, a quarter of the full contraction.
///
/// # Safety
/// `a`, `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_inner(a: *const WbOperator, b: *const WbOperator, out: *mut f64) -> WbStatus {
    guard(|| {
        *out_arg(out)? = op_arg(a)?.inner(op_arg(b)?).map_err(fail)?;
        Ok(())
    })
}

/// Largest component of the first Bianchi map.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_bianchi_residual(op: *const WbOperator, out: *mut f64) -> WbStatus {
    guard(|| {
        *out_arg(out)? = op_arg(op)?.bianchi_residual();
        Ok(())
    })
}

/// Weyl part of a curvature tensor (`n ≥ 4`) as a new handle.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_weyl_part(op: *const WbOperator, out: *mut *mut WbOperator) -> WbStatus {
    guard(|| {
        let out = out_arg(out)?;
        let r = curvature(op_arg(op)?)?;
        let w = decompose(&r).map_err(fail)?.weyl;
        hand_out(out, w.into_operator());
        Ok(())
    })
}

/// Scalar curvature `tr Rc` of a curvature tensor.
///
/// # Safety
/// `op` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_scalar_curvature(op: *const WbOperator, out: *mut f64) -> WbStatus {
    guard(|| {
        *out_arg(out)? = weylbench::algebra::ricci_contraction(op_arg(op)?).trace();
        Ok(())
    })
}

/// `⟨T, T♯⟩` and `⟨T, T²⟩` of a curvature tensor.
///
/// # Safety
/// `op` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_cubic_invariants(op: *const WbOperator, sharp_cubic: *mut f64, square_cubic: *mut f64) -> WbStatus {
    guard(|| {
        let (sc, qc) = (out_arg(sharp_cubic)?, out_arg(square_cubic)?);
        let t = curvature(op_arg(op)?)?;
        *sc = t.inner(&sharp(&t)).map_err(fail)?;
        *qc = t.inner(&square(&t)).map_err(fail)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_constants(n: usize, out: *mut WbConstants) -> WbStatus {
    guard(|| {
        let out = out_arg(out)?;
        let t = constants(n).map_err(fail)?;
        *out = WbConstants {
            n,
            s_n: t.s_n,
            alpha: t.alpha.unwrap_or(f64::NAN),
            a1: t.a1.unwrap_or(f64::NAN),
            a2: t.a2.unwrap_or(f64::NAN),
        };
        Ok(())
    })
}

/// Integral gap verdict for `n ≥ 5`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_gap_verdict(norm_w: f64, norm_e: f64, lambda: f64, n: usize, out: *mut WbVerdict) -> WbStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = gap_verdict_integral(norm_w, norm_e, lambda, n).map_err(fail)?.into();
        Ok(())
    })
}
