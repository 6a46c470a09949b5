//! C ABI over `dynacp`.
//!
//! Every fallible call returns a [`DcpStatus`]. On failure the message is
//! kept per thread and can be read with [`dcp_last_error_message`] until
//! the next failing call on that thread. Models are opaque handles created
//! by [`dcp_model_new`] and released by [`dcp_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dynacp::closedform::{MollifierFamily, MollifierSpec, ProfileCoefficients};
use dynacp::potential::cp_potential_delta;
use dynacp::quad::{delta_energy_quad_both, OraclePath, RegulatorSpec};
use dynacp::{total_energy_density, Error, ModelParams, SpacetimePoint};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Convergence = 3,
    ExtrapolationUnreliable = 4,
    Config = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpMollifier {
    Lorentzian = 0,
    Gaussian = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcpField {
    Electric = 0,
    Magnetic = 1,
    Total = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DcpDensity {
    pub electric: f64,
    pub magnetic: f64,
    pub total: f64,
    pub far_zone: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DcpPotential {
    pub delta_v: f64,
    pub force: f64,
    pub force_error: f64,
    pub far_zone: bool,
}

/// Opaque model parameters.
pub struct DcpModel {
    params: ModelParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> DcpStatus {
    match e {
        Error::InvalidArgument(_) => DcpStatus::InvalidArgument,
        Error::Convergence { .. } => DcpStatus::Convergence,
        Error::ExtrapolationUnreliable(_) => DcpStatus::ExtrapolationUnreliable,
        Error::Config(_) => DcpStatus::Config,
        Error::Io { .. } => DcpStatus::Io,
    }
}

struct Fail(DcpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DcpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DcpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DcpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DcpStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(model: *const DcpModel) -> Result<&'a DcpModel, Fail> {
    model.as_ref().ok_or_else(|| null("model"))
}

fn mollifier(family: DcpMollifier, width: f64) -> MollifierSpec {
    let family = match family {
        DcpMollifier::Lorentzian => MollifierFamily::Lorentzian,
        DcpMollifier::Gaussian => MollifierFamily::Gaussian,
    };
    MollifierSpec::new(family, width)
}

/// Creates a model. Reduced units; `dipole` points to three components.
///
/// # Safety
/// `dipole` must point to three readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_model_new(
    omega0: f64,
    delta_omega0: f64,
    dipole: *const f64,
    light_speed: f64,
    alpha_test: f64,
    out: *mut *mut DcpModel,
) -> DcpStatus {
    guard(|| {
        if dipole.is_null() {
            return Err(null("dipole"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let d = std::slice::from_raw_parts(dipole, 3);
        let params = ModelParams {
            omega0,
            delta_omega0,
            dipole: [d[0], d[1], d[2]],
            light_speed,
            alpha_test,
        };
        params.validate()?;
        *out = Box::into_raw(Box::new(DcpModel { params }));
        Ok(())
    })
}

/// Model with `omega0 = c = |d| = alpha = 1` and `delta_omega0 = 0.01`.
#[no_mangle]
pub extern "C" fn dcp_model_default() -> *mut DcpModel {
    Box::into_raw(Box::new(DcpModel {
        params: ModelParams::default(),
    }))
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dcp_model_free(model: *mut DcpModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Closed-form electric, magnetic and total density changes at `(r, t)`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_closedform_density(
    model: *const DcpModel,
    r: f64,
    t: f64,
    family: DcpMollifier,
    width: f64,
    out: *mut DcpDensity,
) -> DcpStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let point = SpacetimePoint::new(r, t, &m.params)?;
        let d = total_energy_density(&point, &m.params, &mollifier(family, width))?;
        *out = DcpDensity {
            electric: d.electric,
            magnetic: d.magnetic,
            total: d.total,
            far_zone: d.far_zone,
        };
        Ok(())
    })
}

/// Quadrature-engine density changes under the regulator `exp(-eta k)`.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_quadrature_density(
    model: *const DcpModel,
    r: f64,
    t: f64,
    eta: f64,
    out: *mut DcpDensity,
) -> DcpStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let point = SpacetimePoint::new(r, t, &m.params)?;
        let (e, mag) = delta_energy_quad_both(&point, &m.params, &RegulatorSpec::new(eta), OraclePath::default())?;
        *out = DcpDensity {
            electric: e.value,
            magnetic: mag.value,
            total: e.value + mag.value,
            far_zone: point.far_zone,
        };
        Ok(())
    })
}

/// Potential and force changes on the test atom from the closed forms.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_potential(
    model: *const DcpModel,
    r: f64,
    t: f64,
    family: DcpMollifier,
    width: f64,
    out: *mut DcpPotential,
) -> DcpStatus {
    guard(|| {
        let m = model_ref(model)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let point = SpacetimePoint::new(r, t, &m.params)?;
        let s = cp_potential_delta(&point, &m.params, &mollifier(family, width))?;
        *out = DcpPotential {
            delta_v: s.delta_v,
            force: s.force,
            force_error: s.force_error,
            far_zone: s.far_zone,
        };
        Ok(())
    })
}

/// Exact profile coefficients as six numerator/denominator pairs, ordered
/// step, delta, delta', delta'', delta''', delta''''.
///
/// # Safety
/// `numerators` and `denominators` must each hold six values; `sign` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn dcp_coefficients(
    field: DcpField,
    numerators: *mut i64,
    denominators: *mut i64,
    sign: *mut i32,
) -> DcpStatus {
    guard(|| {
        if numerators.is_null() || denominators.is_null() || sign.is_null() {
            return Err(null("output buffer"));
        }
        let c = match field {
            DcpField::Electric => ProfileCoefficients::electric(),
            DcpField::Magnetic => ProfileCoefficients::magnetic(),
            DcpField::Total => ProfileCoefficients::total(),
        };
        let nums = std::slice::from_raw_parts_mut(numerators, 6);
        let dens = std::slice::from_raw_parts_mut(denominators, 6);
        for (i, q) in c.coefficients.iter().enumerate() {
            nums[i] = *q.numer();
            dens[i] = *q.denom();
        }
        *sign = i32::from(c.overall_sign);
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dcp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dcp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
