//! C ABI over the `anyon-spectrum` solvers.
//!
//! A caller creates an [`AnyonSystem`] with [`anyon_system_new`], queries it,
//! and releases it with [`anyon_system_free`]. Every fallible call returns an
//! [`AnyonStatus`]; on failure a message for the calling thread is available
//! from [`anyon_last_error_message`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use anyon_spectrum::model::{AnyonParams, EnergyResult, Method, QuantumNumbers};
use anyon_spectrum::spectrum::{solve, Tolerances};
use anyon_spectrum::wkb::{phase_integral_with, turning_points};
use anyon_spectrum::SpectrumError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnyonStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    Domain = 3,
    NoClassicalRegion = 4,
    QuadratureFailure = 5,
    BracketFailure = 6,
    IntegrationOverflow = 7,
    NotFound = 8,
    Config = 9,
    Panic = 10,
}

impl From<&SpectrumError> for AnyonStatus {
    fn from(err: &SpectrumError) -> Self {
        match err {
            SpectrumError::InvalidParams(_) => Self::InvalidParams,
            SpectrumError::Domain(_) => Self::Domain,
            SpectrumError::NoClassicalRegion(_) => Self::NoClassicalRegion,
            SpectrumError::QuadratureFailure(_) => Self::QuadratureFailure,
            SpectrumError::BracketFailure(_) => Self::BracketFailure,
            SpectrumError::IntegrationOverflow(_) => Self::IntegrationOverflow,
            SpectrumError::NotFound(_) => Self::NotFound,
            SpectrumError::Config(_) => Self::Config,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnyonMethod {
    Closed = 0,
    WkbFull = 1,
    WkbSplit = 2,
    Oracle = 3,
    Nonrel = 4,
}

impl From<AnyonMethod> for Method {
    fn from(m: AnyonMethod) -> Self {
        match m {
            AnyonMethod::Closed => Method::ClosedForm,
            AnyonMethod::WkbFull => Method::WkbFull,
            AnyonMethod::WkbSplit => Method::WkbSplit,
            AnyonMethod::Oracle => Method::Oracle,
            AnyonMethod::Nonrel => Method::NonRelativistic,
        }
    }
}

/// One level. `binding = (m - E) / m` carries full relative precision.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnyonEnergy {
    pub e_over_m: f64,
    pub binding: f64,
    pub kinetic_ev: f64,
    pub iterations: u32,
    pub residual: f64,
    pub error_estimate: f64,
}

impl AnyonEnergy {
    fn new(result: &EnergyResult, params: &AnyonParams) -> Self {
        Self {
            e_over_m: result.e_over_m(params),
            binding: result.binding(params),
            kinetic_ev: result.kinetic_ev,
            iterations: result.diagnostics.iterations,
            residual: result.diagnostics.residual,
            error_estimate: result.diagnostics.error_estimate,
        }
    }
}

/// Opaque parameter set plus solver tolerances.
pub struct AnyonSystem {
    params: AnyonParams,
    tolerances: Tolerances,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Runs `body`, turning errors and panics into a status and a stored message.
fn guard(body: impl FnOnce() -> Result<(), (AnyonStatus, String)>) -> AnyonStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AnyonStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {message}"));
            AnyonStatus::Panic
        }
    }
}

fn fail(err: SpectrumError) -> (AnyonStatus, String) {
    (AnyonStatus::from(&err), err.to_string())
}

fn null(what: &str) -> (AnyonStatus, String) {
    (AnyonStatus::NullPointer, format!("{what} is null"))
}

/// Safety: `ptr` must be null or point to a live `AnyonSystem`.
unsafe fn borrow_system<'a>(
    ptr: *const AnyonSystem,
) -> Result<&'a AnyonSystem, (AnyonStatus, String)> {
    unsafe { ptr.as_ref() }.ok_or_else(|| null("system"))
}

/// Creates a system with unit rest mass displayed as `mass_ev` eV.
///
/// # Safety
/// `out` must be null or valid for writing one pointer. The handle written
/// there must be released with [`anyon_system_free`].
#[no_mangle]
pub unsafe extern "C" fn anyon_system_new(
    spin: f64,
    xi: f64,
    charge: f64,
    mass_ev: f64,
    out: *mut *mut AnyonSystem,
) -> AnyonStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let params = AnyonParams::new(spin, xi, charge)
            .and_then(|p| p.with_mass(1.0, mass_ev))
            .map_err(fail)?;
        let handle = Box::new(AnyonSystem {
            params,
            tolerances: Tolerances::default(),
        });
        unsafe { out.write(Box::into_raw(handle)) };
        Ok(())
    })
}

/// # Safety
/// `system` must be null or a handle from [`anyon_system_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn anyon_system_free(system: *mut AnyonSystem) {
    if !system.is_null() {
        drop(unsafe { Box::from_raw(system) });
    }
}

/// Replaces the quadrature, WKB root and shooting tolerances. All must be positive.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn anyon_system_set_tolerances(
    system: *mut AnyonSystem,
    quadrature: f64,
    root: f64,
    oracle: f64,
) -> AnyonStatus {
    guard(|| {
        let sys = unsafe { system.as_mut() }.ok_or_else(|| null("system"))?;
        for v in [quadrature, root, oracle] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(fail(SpectrumError::Config(format!(
                    "tolerance must be positive, got {v}"
                ))));
            }
        }
        sys.tolerances = Tolerances {
            quadrature,
            root,
            oracle,
        };
        Ok(())
    })
}

/// Energy of level `(n_r, l)` by `method`.
///
/// # Safety
/// `system` must be null or a live handle; `out` must be null or valid for
/// writing one `AnyonEnergy`.
#[no_mangle]
pub unsafe extern "C" fn anyon_system_energy(
    system: *const AnyonSystem,
    method: AnyonMethod,
    n_r: u32,
    l: u32,
    out: *mut AnyonEnergy,
) -> AnyonStatus {
    guard(|| {
        let sys = unsafe { borrow_system(system) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let qn = QuantumNumbers::new(n_r, l).map_err(fail)?;
        let result = solve(method.into(), &sys.params, qn, &sys.tolerances).map_err(fail)?;
        unsafe { out.write(AnyonEnergy::new(&result, &sys.params)) };
        Ok(())
    })
}

/// Roots `r1 < r2 < r3` of the turning-point cubic at `E = e_over_m * m`.
///
/// # Safety
/// `roots_out` must be null or valid for writing three doubles.
#[no_mangle]
pub unsafe extern "C" fn anyon_system_turning_points(
    system: *const AnyonSystem,
    l: u32,
    e_over_m: f64,
    roots_out: *mut f64,
) -> AnyonStatus {
    guard(|| {
        let sys = unsafe { borrow_system(system) }?;
        if roots_out.is_null() {
            return Err(null("roots_out"));
        }
        let e = e_over_m * sys.params.mass;
        let tp = turning_points(&sys.params, l, e).map_err(fail)?;
        unsafe { ptr::copy_nonoverlapping(tp.roots.as_ptr(), roots_out, 3) };
        Ok(())
    })
}

/// Semiclassical action between the physical turning points at `E = e_over_m * m`.
///
/// # Safety
/// `out` must be null or valid for writing one double.
#[no_mangle]
pub unsafe extern "C" fn anyon_system_phase_integral(
    system: *const AnyonSystem,
    l: u32,
    e_over_m: f64,
    out: *mut f64,
) -> AnyonStatus {
    guard(|| {
        let sys = unsafe { borrow_system(system) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let e = e_over_m * sys.params.mass;
        let q = phase_integral_with(&sys.params, l, e, &sys.tolerances.wkb()).map_err(fail)?;
        unsafe { out.write(q.value) };
        Ok(())
    })
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `capacity` bytes, into `buffer`. Returns the full message
/// length excluding the terminator, or 0 when there is no message. Pass a
/// null buffer to query the length.
///
/// # Safety
/// `buffer` must be null or valid for writing `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn anyon_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(message) = slot.as_ref() else {
            if !buffer.is_null() && capacity > 0 {
                unsafe { buffer.write(0) };
            }
            return 0;
        };
        let bytes = message.as_bytes();
        if !buffer.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity - 1);
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buffer, n);
                buffer.add(n).write(0);
            }
        }
        bytes.len()
    })
}

/// Static NUL-terminated version string.
#[no_mangle]
pub extern "C" fn anyon_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
