//! C ABI over the simulator.
//!
//! Every fallible function returns a [`PvStatus`]. On failure a message is
//! stored per thread and can be read with [`pv_last_error_message`]. Cost
//! models are opaque handles released with [`pv_cost_model_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use photonic_vqa::cost::{Ansatz, CostModel};
use photonic_vqa::counts::NoiseConfig;
use photonic_vqa::mesh::{phases_for_projector, stage_four_matrix, stage_one_matrix, PhaseVector, Stage};
use photonic_vqa::observables::{vqf_coefficients, FactorLayout};
use photonic_vqa::{Complex64, Error};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvStatus {
    Ok = 0,
    InvalidArgument = 1,
    IndexOutOfRange = 2,
    ContractViolation = 3,
    LookupFailed = 4,
    FitFailed = 5,
    ConstructionFailed = 6,
    EmptyRecord = 7,
    NumericalFailure = 8,
    DataError = 9,
    NullPointer = 10,
    Panic = 11,
}

/// Stage selector for the mesh functions.
pub const PV_STAGE_PUMP: i32 = 0;
pub const PV_STAGE_IDLER: i32 = 1;
pub const PV_STAGE_SIGNAL: i32 = 2;

/// Opaque cost model bound to its ansatz.
pub struct PvCostModel {
    model: CostModel,
    ansatz: Ansatz,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PvStatus {
    match e {
        Error::InvalidArgument(_) => PvStatus::InvalidArgument,
        Error::IndexOutOfRange(_) => PvStatus::IndexOutOfRange,
        Error::Contract(_) => PvStatus::ContractViolation,
        Error::Lookup(_) => PvStatus::LookupFailed,
        Error::Fit(_) => PvStatus::FitFailed,
        Error::Construction(_) => PvStatus::ConstructionFailed,
        Error::EmptyRecord => PvStatus::EmptyRecord,
        Error::Numerical(_) => PvStatus::NumericalFailure,
        Error::Data(_) => PvStatus::DataError,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PvStatus::Ok
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            PvStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic");
            PvStatus::Panic
        }
    }
}

fn stage_of(code: i32) -> Result<Stage, Fail> {
    match code {
        PV_STAGE_PUMP => Ok(Stage::Pump),
        PV_STAGE_IDLER => Ok(Stage::Idler),
        PV_STAGE_SIGNAL => Ok(Stage::Signal),
        _ => Err(Error::InvalidArgument(format!("unknown stage {code}")).into()),
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

/// Message of the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn new_model(model: CostModel, ansatz: Ansatz, out_model: *mut *mut PvCostModel) -> Result<(), Fail> {
    let slot = unsafe { out(out_model, "out_model")? };
    *slot = Box::into_raw(Box::new(PvCostModel { model, ansatz }));
    Ok(())
}

/// H2 energy model at bond length `r` (Å, on the tabulated grid) with the
/// one-angle ansatz.
///
/// # Safety
/// `out_model` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pv_cost_model_h2(r: f64, out_model: *mut *mut PvCostModel) -> PvStatus {
    guard(|| new_model(CostModel::h2(r)?, Ansatz::Ucc, out_model))
}

/// Factoring cost model for `n` with the three-angle pump ansatz.
///
/// # Safety
/// `out_model` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn pv_cost_model_vqf(n: u64, out_model: *mut *mut PvCostModel) -> PvStatus {
    guard(|| new_model(CostModel::vqf(n)?, Ansatz::PumpAngles, out_model))
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must come from a constructor above and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pv_cost_model_free(model: *mut PvCostModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of parameters the model expects, 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pv_cost_model_num_params(model: *const PvCostModel) -> usize {
    model.as_ref().map_or(0, |m| m.ansatz.dim())
}

/// Number of measurement settings one sampled evaluation uses.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pv_cost_model_num_settings(model: *const PvCostModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.settings().len())
}

#[allow(clippy::too_many_arguments)]
unsafe fn evaluate(
    model: *const PvCostModel,
    params: *const f64,
    n_params: usize,
    epsilon: f64,
    noise: Option<NoiseConfig>,
    eval_index: u64,
    value_out: *mut f64,
    std_err_out: *mut f64,
) -> Result<(), Fail> {
    let m = model.as_ref().ok_or(Fail::Null("model"))?;
    let x = slice(params, n_params, "params")?;
    let value = out(value_out, "value_out")?;
    let state = m.ansatz.state(x, [0.0; 4], epsilon)?;
    let e = match noise {
        None => m.model.evaluate_exact(&state),
        Some(cfg) => m.model.evaluate_sampled(&state, &cfg, eval_index)?,
    };
    *value = e.value;
    if let Some(s) = std_err_out.as_mut() {
        *s = e.std_err;
    }
    Ok(())
}

/// Noiseless cost at `params` for source indistinguishability `epsilon`.
/// `std_err_out` may be null.
///
/// # Safety
/// `params` must point to `n_params` doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_cost_model_evaluate(
    model: *const PvCostModel,
    params: *const f64,
    n_params: usize,
    epsilon: f64,
    value_out: *mut f64,
    std_err_out: *mut f64,
) -> PvStatus {
    guard(|| evaluate(model, params, n_params, epsilon, None, 0, value_out, std_err_out))
}

/// Shot-noise estimate with `counts` coincidences per setting. Pass
/// `car = INFINITY` to disable accidentals. Identical arguments give
/// identical results.
///
/// # Safety
/// `params` must point to `n_params` doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pv_cost_model_evaluate_sampled(
    model: *const PvCostModel,
    params: *const f64,
    n_params: usize,
    epsilon: f64,
    counts: u64,
    car: f64,
    seed: u64,
    eval_index: u64,
    value_out: *mut f64,
    std_err_out: *mut f64,
) -> PvStatus {
    let noise = NoiseConfig::new(counts, car, seed);
    guard(|| evaluate(model, params, n_params, epsilon, Some(noise), eval_index, value_out, std_err_out))
}

/// Writes the 4×4 matrix of a preparation (`PV_STAGE_PUMP`) or projection
/// stage in row-major order as separate real and imaginary parts.
///
/// # Safety
/// `theta` needs 3 doubles, `phi` 4, `re_out` and `im_out` 16 each.
#[no_mangle]
pub unsafe extern "C" fn pv_stage_matrix(
    stage: i32,
    theta: *const f64,
    phi: *const f64,
    re_out: *mut f64,
    im_out: *mut f64,
) -> PvStatus {
    guard(|| {
        let stage = stage_of(stage)?;
        let t = slice(theta, 3, "theta")?;
        let p = slice(phi, 4, "phi")?;
        if re_out.is_null() || im_out.is_null() {
            return Err(Fail::Null("matrix output"));
        }
        let pv = PhaseVector::new([t[0], t[1], t[2]], [p[0], p[1], p[2], p[3]], stage)?;
        let m = if stage == Stage::Pump { stage_one_matrix(&pv)? } else { stage_four_matrix(&pv)? };
        let re = std::slice::from_raw_parts_mut(re_out, 16);
        let im = std::slice::from_raw_parts_mut(im_out, 16);
        for r in 0..4 {
            for c in 0..4 {
                let z = m.get(r, c);
                re[4 * r + c] = z.re;
                im[4 * r + c] = z.im;
            }
        }
        Ok(())
    })
}

/// Phases of a projection stage whose output 2 measures the unit vector
/// `(re + i·im)`.
///
/// # Safety
/// `re`, `im`, `phi_out` need 4 doubles, `theta_out` 3.
#[no_mangle]
pub unsafe extern "C" fn pv_phases_for_projector(
    stage: i32,
    re: *const f64,
    im: *const f64,
    theta_out: *mut f64,
    phi_out: *mut f64,
) -> PvStatus {
    guard(|| {
        let stage = stage_of(stage)?;
        let re = slice(re, 4, "re")?;
        let im = slice(im, 4, "im")?;
        if theta_out.is_null() || phi_out.is_null() {
            return Err(Fail::Null("phase output"));
        }
        let beta: [Complex64; 4] = std::array::from_fn(|k| Complex64::new(re[k], im[k]));
        let pv = phases_for_projector(&beta, stage)?;
        ptr::copy_nonoverlapping(pv.theta.as_ptr(), theta_out, 3);
        ptr::copy_nonoverlapping(pv.phi.as_ptr(), phi_out, 4);
        Ok(())
    })
}

/// The 16 integer weights of the factoring Hamiltonian for `n`, ordered by
/// the number of Z factors and then lexicographically by qubit.
///
/// # Safety
/// `out16` must hold 16 int64 values.
#[no_mangle]
pub unsafe extern "C" fn pv_vqf_coefficients(n: u64, out16: *mut i64) -> PvStatus {
    guard(|| {
        if out16.is_null() {
            return Err(Fail::Null("out16"));
        }
        let w = vqf_coefficients(&FactorLayout::new(n, 2, 2)?)?;
        let dst = std::slice::from_raw_parts_mut(out16, 16);
        for (d, (c, _)) in dst.iter_mut().zip(&w) {
            *d = *c;
        }
        Ok(())
    })
}
