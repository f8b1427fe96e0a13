//! C ABI over `hgate-core`.
//!
//! Matrices cross the boundary as 32 doubles: row-major 4×4, each entry as
//! (re, im). Basis order is (|3/2⟩, |−3/2⟩, |1/2⟩, |−1/2⟩). Every call returns
//! an [`HgateStatus`]; on failure a detail string is kept per thread and can be
//! read with [`hgate_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hgate_core::chain::DiagChain;
use hgate_core::holonomy::{gate_from_chain, GateResult};
use hgate_core::linalg::{trace_fidelity, ComplexMat4, DIM};
use hgate_core::oracle::{integrate_lab, IntegratorConfig};
use hgate_core::{diagonalize, Error, ModelParams, SpinOps};
use num_complex::Complex64;

/// Doubles in one interleaved 4×4 complex matrix.
pub const HGATE_MATRIX_LEN: usize = 32;
const _: () = assert!(HGATE_MATRIX_LEN == 2 * DIM * DIM);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HgateStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    NotHermitian = 3,
    DegenerateCoupling = 4,
    UnitarityViolation = 5,
    NoConvergence = 6,
    StepBudgetExceeded = 7,
    NormDrift = 8,
    InvalidArgument = 9,
    Panic = 10,
}

/// Gate evaluated at one parameter point and time.
pub struct HgateGate {
    inner: GateResult,
}

/// Diagonalization data for one parameter point.
pub struct HgateChain {
    inner: DiagChain,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HgateStatus {
    match e {
        Error::NotHermitian { .. } => HgateStatus::NotHermitian,
        Error::Domain { .. } => HgateStatus::Domain,
        Error::DegenerateCoupling { .. } => HgateStatus::DegenerateCoupling,
        Error::UnitarityViolation { .. } => HgateStatus::UnitarityViolation,
        Error::NoConvergence { .. } => HgateStatus::NoConvergence,
        Error::StepBudgetExceeded { .. } => HgateStatus::StepBudgetExceeded,
        Error::NormDrift { .. } => HgateStatus::NormDrift,
        Error::Sweep(_) => HgateStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), HgateStatus>>(f: F) -> HgateStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HgateStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            HgateStatus::Panic
        }
    }
}

fn core<T>(r: hgate_core::Result<T>) -> Result<T, HgateStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), HgateStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(HgateStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn write_matrix(m: &ComplexMat4, out: *mut f64) {
    let dst = std::slice::from_raw_parts_mut(out, HGATE_MATRIX_LEN);
    for i in 0..DIM {
        for j in 0..DIM {
            dst[2 * (DIM * i + j)] = m[(i, j)].re;
            dst[2 * (DIM * i + j) + 1] = m[(i, j)].im;
        }
    }
}

unsafe fn read_matrix(src: *const f64) -> ComplexMat4 {
    let s = std::slice::from_raw_parts(src, HGATE_MATRIX_LEN);
    let mut m = ComplexMat4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            m[(i, j)] = Complex64::new(s[2 * (DIM * i + j)], s[2 * (DIM * i + j) + 1]);
        }
    }
    m
}

/// Diagonalizes the rotating-frame Hamiltonian. Free with [`hgate_chain_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn hgate_chain_new(
    omega0: f64,
    omega1: f64,
    theta: f64,
    out: *mut *mut HgateChain,
) -> HgateStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let p = core(ModelParams::new(omega0, omega1, theta))?;
        let chain = core(diagonalize(&p, &SpinOps::new()))?;
        *out = Box::into_raw(Box::new(HgateChain { inner: chain }));
        Ok(())
    })
}

/// Diagonal of the rotating-frame Hamiltonian in slot order (4 doubles).
///
/// # Safety
/// `chain` must come from [`hgate_chain_new`]; `out` must hold 4 doubles.
#[no_mangle]
pub unsafe extern "C" fn hgate_chain_h_d(chain: *const HgateChain, out: *mut f64) -> HgateStatus {
    guard(|| {
        non_null(chain, "chain")?;
        non_null(out, "out")?;
        std::slice::from_raw_parts_mut(out, DIM).copy_from_slice(&(*chain).inner.h_d);
        Ok(())
    })
}

/// The exact constant diagonalizer (32 doubles).
///
/// # Safety
/// `chain` must come from [`hgate_chain_new`]; `out` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn hgate_chain_w(chain: *const HgateChain, out: *mut f64) -> HgateStatus {
    guard(|| {
        non_null(chain, "chain")?;
        non_null(out, "out")?;
        write_matrix(&(*chain).inner.w, out);
        Ok(())
    })
}

/// Relative off-diagonal mass left by the two-step rotation product.
///
/// # Safety
/// `chain` must come from [`hgate_chain_new`]; `out` must point to one double.
#[no_mangle]
pub unsafe extern "C" fn hgate_chain_two_step_residual(
    chain: *const HgateChain,
    out: *mut f64,
) -> HgateStatus {
    guard(|| {
        non_null(chain, "chain")?;
        non_null(out, "out")?;
        *out = (*chain).inner.two_step_residual;
        Ok(())
    })
}

/// # Safety
/// `chain` must come from [`hgate_chain_new`] and not be used afterwards. Null
/// is accepted.
#[no_mangle]
pub unsafe extern "C" fn hgate_chain_free(chain: *mut HgateChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Evaluates the closed-form gate. Free with [`hgate_gate_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn hgate_gate_new(
    omega0: f64,
    omega1: f64,
    theta: f64,
    t: f64,
    out: *mut *mut HgateGate,
) -> HgateStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let p = core(ModelParams::new(omega0, omega1, theta))?;
        let ops = SpinOps::new();
        let chain = core(diagonalize(&p, &ops))?;
        let g = core(gate_from_chain(&chain, &ops, t))?;
        *out = Box::into_raw(Box::new(HgateGate { inner: g }));
        Ok(())
    })
}

unsafe fn gate_matrix(
    g: *const HgateGate,
    out: *mut f64,
    pick: fn(&GateResult) -> &ComplexMat4,
) -> HgateStatus {
    guard(|| {
        non_null(g, "gate")?;
        non_null(out, "out")?;
        write_matrix(pick(&(*g).inner), out);
        Ok(())
    })
}

/// Lab-frame propagator (32 doubles).
///
/// # Safety
/// `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn hgate_gate_u_gate(g: *const HgateGate, out: *mut f64) -> HgateStatus {
    gate_matrix(g, out, |r| &r.u_gate)
}

/// Geometric factor `exp(−iω₁t·A)` (32 doubles).
///
/// # Safety
/// `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn hgate_gate_u_geometric(g: *const HgateGate, out: *mut f64) -> HgateStatus {
    gate_matrix(g, out, |r| &r.u_geometric)
}

/// Dynamical factor `exp(−i·h_d·t)`, diagonal (32 doubles).
///
/// # Safety
/// `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn hgate_gate_u_dynamic(g: *const HgateGate, out: *mut f64) -> HgateStatus {
    gate_matrix(g, out, |r| &r.u_dynamic)
}

/// Gauge potential `A` (32 doubles).
///
/// # Safety
/// `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
#[no_mangle]
pub unsafe extern "C" fn hgate_gate_connection(g: *const HgateGate, out: *mut f64) -> HgateStatus {
    gate_matrix(g, out, |r| &r.connection.a_full)
}

/// # Safety
/// `g` must come from [`hgate_gate_new`] and not be used afterwards. Null is
/// accepted.
#[no_mangle]
pub unsafe extern "C" fn hgate_gate_free(g: *mut HgateGate) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// RK4 propagator of the lab Hamiltonian over `[0, t]`. `step_scale <= 0`
/// selects the default. `out_norm_drift` and `out_steps` may be null.
///
/// # Safety
/// `out_u` must hold 32 doubles; the optional outputs must be valid if non-null.
#[no_mangle]
pub unsafe extern "C" fn hgate_integrate_lab(
    omega0: f64,
    omega1: f64,
    theta: f64,
    t: f64,
    step_scale: f64,
    out_u: *mut f64,
    out_norm_drift: *mut f64,
    out_steps: *mut u64,
) -> HgateStatus {
    guard(|| {
        non_null(out_u, "out_u")?;
        let p = core(ModelParams::new(omega0, omega1, theta))?;
        let cfg = if step_scale > 0.0 {
            IntegratorConfig::with_step_scale(step_scale)
        } else {
            IntegratorConfig::default()
        };
        let r = core(integrate_lab(&p, t, &cfg))?;
        write_matrix(&r.u_numeric, out_u);
        if !out_norm_drift.is_null() {
            *out_norm_drift = r.norm_drift;
        }
        if !out_steps.is_null() {
            *out_steps = r.steps_taken as u64;
        }
        Ok(())
    })
}

/// `|tr(a†·b)|/4` for two interleaved matrices.
///
/// # Safety
/// `a` and `b` must each hold 32 doubles; `out` must point to one double.
#[no_mangle]
pub unsafe extern "C" fn hgate_fidelity(a: *const f64, b: *const f64, out: *mut f64) -> HgateStatus {
    guard(|| {
        non_null(a, "a")?;
        non_null(b, "b")?;
        non_null(out, "out")?;
        *out = trace_fidelity(&read_matrix(a), &read_matrix(b));
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hgate_status_message(status: HgateStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        HgateStatus::Ok => b"ok\0",
        HgateStatus::NullPointer => b"null pointer argument\0",
        HgateStatus::Domain => b"parameter outside its domain\0",
        HgateStatus::NotHermitian => b"matrix is not Hermitian\0",
        HgateStatus::DegenerateCoupling => b"coupling below floor\0",
        HgateStatus::UnitarityViolation => b"unitarity violated\0",
        HgateStatus::NoConvergence => b"integrator did not converge\0",
        HgateStatus::StepBudgetExceeded => b"step budget exceeded\0",
        HgateStatus::NormDrift => b"norm drift above limit\0",
        HgateStatus::InvalidArgument => b"invalid argument\0",
        HgateStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Copies the calling thread's last error detail into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, 0 if none.
///
/// # Safety
/// `buf` must hold `len` bytes, or be null with `len` 0.
#[no_mangle]
pub unsafe extern "C" fn hgate_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version, NUL-terminated.
#[no_mangle]
pub extern "C" fn hgate_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
