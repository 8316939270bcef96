//! C ABI for `hspsim`.
//!
//! Every fallible function returns an [`HspStatus`]; on failure the message is
//! available from [`hsp_last_error_message`] on the same thread. Results are
//! written through out-pointers only on success. JSA grids are opaque
//! [`HspJsa`] handles owned by the caller and released with [`hsp_jsa_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use hspsim::hom::{fock_oracle, visibility_eq7, FockTruncation};
use hspsim::jsa::{
    apply_filter, auto_axes, build_jsa, dfg_partner_wavelength, marginal, Arm, FilterSpec,
    FilterWidth, JsaGrid, PairDesign, PumpSpec,
};
use hspsim::optics::ProfileShape;
use hspsim::phasematch::{preset, PmfShape, QpmCrystal};
use hspsim::photstat::{coherent_stats, dfg_g2, hsp_stats, ArmLabel, ArmStatistics, DfgSeedModel};
use hspsim::scenario::{run_file, RunOptions};
use hspsim::schmidt::{purity_from_schmidt, schmidt_decompose, schmidt_number};
use hspsim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HspStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was malformed (bad UTF-8, wrong buffer length, ...).
    InvalidArgument = 2,
    /// Scenario file failed to parse or validate.
    Scenario = 3,
    /// A physical or numerical precondition was violated.
    Domain = 4,
    Io = 5,
    /// Internal panic caught at the boundary.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HspArm {
    Signal = 0,
    Idler = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HspShape {
    Gaussian = 0,
    Rect = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HspWidthUnit {
    Hz = 0,
    Meters = 1,
}

/// Opaque joint spectral amplitude grid.
pub struct HspJsa {
    inner: JsaGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(HspStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain { .. } => HspStatus::Domain,
            Error::Scenario(_) => HspStatus::Scenario,
            Error::Io(_) => HspStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(HspStatus::InvalidArgument, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HspStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            HspStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            HspStatus::Internal
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(HspStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    non_null(p, name)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{name} is not valid UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Failure> {
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn jsa_arg<'a>(p: *const HspJsa) -> Result<&'a JsaGrid, Failure> {
    non_null(p, "jsa")?;
    Ok(&(*p).inner)
}

unsafe fn arm_stats(p: *const f64, len: usize, name: &str) -> Result<ArmStatistics, Failure> {
    Ok(ArmStatistics::new(
        slice_arg(p, len, name)?.to_vec(),
        ArmLabel::Custom,
    )?)
}

unsafe fn write_out<T>(out: *mut T, value: T) {
    if !out.is_null() {
        *out = value;
    }
}

fn arm(a: HspArm) -> Arm {
    match a {
        HspArm::Signal => Arm::Signal,
        HspArm::Idler => Arm::Idler,
    }
}

fn shape(s: HspShape) -> ProfileShape {
    match s {
        HspShape::Gaussian => ProfileShape::Gaussian,
        HspShape::Rect => ProfileShape::Rect,
    }
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn hsp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn hsp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a normalized JSA for a Gaussian pump and a named crystal preset,
/// phase-matched for the idler wavelength, on auto-sized axes of
/// `points` x `points` spanning `+- span_fwhm` marginal FWHMs.
///
/// # Safety
/// `preset_name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hsp_jsa_build_preset(
    preset_name: *const c_char,
    pump_wavelength_m: f64,
    pump_fwhm_hz: f64,
    idler_wavelength_m: f64,
    points: usize,
    span_fwhm: f64,
    out: *mut *mut HspJsa,
) -> HspStatus {
    guard(|| {
        let name = str_arg(preset_name, "preset_name")?;
        non_null(out, "out")?;
        let p = preset(name)?;
        let pump = PumpSpec::new(pump_wavelength_m, pump_fwhm_hz, ProfileShape::Gaussian)?;
        let design = PairDesign::from_idler(&pump, idler_wavelength_m)?;
        let crystal = QpmCrystal::phase_matched(
            p.dispersion,
            design.signal,
            design.idler,
            p.length,
            PmfShape::Sinc,
        )?;
        let (sa, ia) = auto_axes(&pump, &crystal, design, points, span_fwhm)?;
        let inner = build_jsa(&pump, &crystal, sa, ia)?;
        *out = Box::into_raw(Box::new(HspJsa { inner }));
        Ok(())
    })
}

/// Applies a spectral filter to one arm and returns a new handle. A
/// non-positive `center_wavelength_m` centres the filter on that arm's axis.
///
/// # Safety
/// `jsa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hsp_jsa_apply_filter(
    jsa: *const HspJsa,
    filter_arm: HspArm,
    filter_shape: HspShape,
    center_wavelength_m: f64,
    width: f64,
    width_unit: HspWidthUnit,
    out: *mut *mut HspJsa,
) -> HspStatus {
    guard(|| {
        let grid = jsa_arg(jsa)?;
        non_null(out, "out")?;
        let center = (center_wavelength_m > 0.0).then_some(center_wavelength_m);
        let width = match width_unit {
            HspWidthUnit::Hz => FilterWidth::Hz(width),
            HspWidthUnit::Meters => FilterWidth::Wavelength(width),
        };
        let filter = FilterSpec::new(arm(filter_arm), shape(filter_shape), center, width)?;
        let inner = apply_filter(grid, &filter)?;
        *out = Box::into_raw(Box::new(HspJsa { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `jsa` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hsp_jsa_free(jsa: *mut HspJsa) {
    if !jsa.is_null() {
        drop(Box::from_raw(jsa));
    }
}

/// Grid dimensions (signal rows, idler columns).
///
/// # Safety
/// `jsa` must be a live handle; out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn hsp_jsa_shape(
    jsa: *const HspJsa,
    n_signal: *mut usize,
    n_idler: *mut usize,
) -> HspStatus {
    guard(|| {
        let (ns, ni) = jsa_arg(jsa)?.shape();
        write_out(n_signal, ns);
        write_out(n_idler, ni);
        Ok(())
    })
}

/// Schmidt number K and purity 1/K.
///
/// # Safety
/// `jsa` must be a live handle; out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn hsp_jsa_schmidt(
    jsa: *const HspJsa,
    schmidt_k: *mut f64,
    purity: *mut f64,
) -> HspStatus {
    guard(|| {
        let spec = schmidt_decompose(jsa_arg(jsa)?)?;
        write_out(schmidt_k, schmidt_number(&spec));
        write_out(purity, purity_from_schmidt(&spec));
        Ok(())
    })
}

/// Fraction of pair events surviving all filters applied so far.
///
/// # Safety
/// `jsa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hsp_jsa_heralding_efficiency(
    jsa: *const HspJsa,
    out: *mut f64,
) -> HspStatus {
    guard(|| {
        let grid = jsa_arg(jsa)?;
        non_null(out, "out")?;
        *out = grid.heralding_efficiency();
        Ok(())
    })
}

/// Intensity FWHM of one arm's marginal spectrum, in Hz.
///
/// # Safety
/// `jsa` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hsp_jsa_marginal_fwhm_hz(
    jsa: *const HspJsa,
    which: HspArm,
    out: *mut f64,
) -> HspStatus {
    guard(|| {
        let grid = jsa_arg(jsa)?;
        non_null(out, "out")?;
        let fwhm = marginal(grid, arm(which))
            .fwhm()
            .ok_or_else(|| invalid("marginal has no half-maximum crossings on the grid"))?;
        *out = fwhm / (2.0 * std::f64::consts::PI);
        Ok(())
    })
}

/// Poissonian P(0..=n_max) into `out`, which must hold `n_max + 1` values.
///
/// # Safety
/// `out` must point to `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hsp_coherent_stats(
    mean_photons: f64,
    n_max: usize,
    out: *mut f64,
    out_len: usize,
) -> HspStatus {
    guard(|| {
        non_null(out, "out")?;
        if out_len != n_max + 1 {
            return Err(invalid(format!(
                "out_len must be n_max + 1 = {}, got {out_len}",
                n_max + 1
            )));
        }
        let stats = coherent_stats(mean_photons, n_max)?;
        std::slice::from_raw_parts_mut(out, out_len).copy_from_slice(stats.probabilities());
        Ok(())
    })
}

/// Heralded-photon P0, P1, P2 into `out[3]`.
///
/// # Safety
/// `out` must point to three writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hsp_hsp_stats(
    pair_probability: f64,
    transmission: f64,
    out: *mut f64,
) -> HspStatus {
    guard(|| {
        non_null(out, "out")?;
        let stats = hsp_stats(pair_probability, transmission)?;
        std::slice::from_raw_parts_mut(out, 3).copy_from_slice(stats.probabilities());
        Ok(())
    })
}

/// Multiphoton visibility bound and the suppressed coincidence fraction for
/// two photon-number distributions (each of length >= 3).
///
/// # Safety
/// `arm_a`/`arm_b` must point to `len_a`/`len_b` doubles; out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn hsp_visibility(
    arm_a: *const f64,
    len_a: usize,
    arm_b: *const f64,
    len_b: usize,
    indistinguishability: f64,
    v_max: *mut f64,
    suppressed_fraction: *mut f64,
) -> HspStatus {
    guard(|| {
        let a = arm_stats(arm_a, len_a, "arm_a")?;
        let b = arm_stats(arm_b, len_b, "arm_b")?;
        let v = visibility_eq7(&a, &b, indistinguishability)?;
        write_out(v_max, v.v_max);
        write_out(suppressed_fraction, v.suppressed_fraction);
        Ok(())
    })
}

/// Fock-space coincidence visibility for arms with support up to two photons,
/// keeping input events with at most two photons in total.
///
/// # Safety
/// `arm_a`/`arm_b` must point to `len_a`/`len_b` doubles; `visibility` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hsp_fock_oracle(
    arm_a: *const f64,
    len_a: usize,
    arm_b: *const f64,
    len_b: usize,
    indistinguishability: f64,
    visibility: *mut f64,
) -> HspStatus {
    guard(|| {
        let a = arm_stats(arm_a, len_a, "arm_a")?;
        let b = arm_stats(arm_b, len_b, "arm_b")?;
        non_null(visibility, "visibility")?;
        *visibility =
            fock_oracle(&a, &b, indistinguishability, FockTruncation::TwoPhoton)?.visibility;
        Ok(())
    })
}

/// `g2(0) = 1 + 1/(n_seed + K)` of the seeded difference-frequency beam.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hsp_dfg_g2(n_seed: f64, schmidt_k: f64, out: *mut f64) -> HspStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = dfg_g2(&DfgSeedModel::new(n_seed, schmidt_k, 1.0)?);
        Ok(())
    })
}

/// Difference-frequency wavelength for a pump and a seed, in metres.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hsp_dfg_partner_wavelength(
    pump_wavelength_m: f64,
    seed_wavelength_m: f64,
    out: *mut f64,
) -> HspStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = dfg_partner_wavelength(pump_wavelength_m, seed_wavelength_m)?;
        Ok(())
    })
}

/// Runs a scenario file, writing outputs and `manifest.json` to `out_dir`.
/// `threads == 0` uses the default worker count.
///
/// # Safety
/// `scenario_path` and `out_dir` must be nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn hsp_scenario_run(
    scenario_path: *const c_char,
    out_dir: *const c_char,
    threads: usize,
) -> HspStatus {
    guard(|| {
        let path = PathBuf::from(str_arg(scenario_path, "scenario_path")?);
        let options = RunOptions {
            out_dir: PathBuf::from(str_arg(out_dir, "out_dir")?),
            threads: (threads > 0).then_some(threads),
            ..Default::default()
        };
        run_file(&path, &options)?;
        Ok(())
    })
}
