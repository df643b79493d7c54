//! C interface.
//!
//! Every function returns an [`AntiresStatus`]. On failure a message is kept
//! per thread and can be read with [`antires_last_error_message`]. Networks are
//! opaque handles created by one of the constructors and released with
//! [`antires_network_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use antires::network::steady_state;
use antires::oracle::{lindblad_steady_state, JCParams};
use antires::spectral::{antiresonances, lossy_component_identify, resonances, DEFAULT_AMBIGUITY_TOLERANCE};
use antires::{Error, ModeNetwork};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AntiresStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BufferTooSmall = 3,
    InvalidNetwork = 4,
    UnknownMode = 5,
    Parse = 6,
    Singular = 7,
    Eigen = 8,
    Ambiguous = 9,
    Oracle = 10,
    Other = 11,
    Panic = 12,
}

impl From<&Error> for AntiresStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidNetwork(_) | Error::InvalidGrid(_) | Error::NoDrive => AntiresStatus::InvalidNetwork,
            Error::UnknownMode(_) => AntiresStatus::UnknownMode,
            Error::Parse { .. } | Error::Json(_) => AntiresStatus::Parse,
            Error::SingularResponse { .. } => AntiresStatus::Singular,
            Error::Eigen(_) => AntiresStatus::Eigen,
            Error::AmbiguousLossyComponent { .. } => AntiresStatus::Ambiguous,
            Error::InvalidOracleParams(_) | Error::CutoffNonConvergence { .. } | Error::UndefinedG2 => {
                AntiresStatus::Oracle
            }
            _ => AntiresStatus::Other,
        }
    }
}

/// Opaque network handle.
pub struct AntiresNetwork(ModeNetwork);

/// A pole or zero: center and amplitude half-width in MHz.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AntiresFeature {
    pub center_mhz: f64,
    pub half_width_mhz: f64,
    pub multiplicity: usize,
}

/// Driven atom–cavity parameters, MHz.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AntiresJCParams {
    pub g: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub delta_pa: f64,
    pub delta_pc: f64,
    pub eta: f64,
    pub cutoff: usize,
    pub max_cutoff: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AntiresOracleResult {
    pub field_re: f64,
    pub field_im: f64,
    pub photons: f64,
    pub g2_zero: f64,
    pub cutoff: usize,
}

struct Failure(AntiresStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(AntiresStatus::from(&e), e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AntiresStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AntiresStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            AntiresStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(AntiresStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn network<'a>(handle: *const AntiresNetwork) -> Result<&'a ModeNetwork, Failure> {
    handle.as_ref().map(|n| &n.0).ok_or_else(|| null("network"))
}

unsafe fn string<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(AntiresStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn hand_out(network: ModeNetwork, out: *mut *mut AntiresNetwork) {
    *out = Box::into_raw(Box::new(AntiresNetwork(network)));
}

/// Writes `features` to `out[0..capacity]` and the number of features to
/// `count`. Fails with `BufferTooSmall` (count still set) when they do not fit.
unsafe fn write_features(
    features: Vec<AntiresFeature>,
    out: *mut AntiresFeature,
    capacity: usize,
    count: *mut usize,
) -> Result<(), Failure> {
    if count.is_null() {
        return Err(null("count"));
    }
    *count = features.len();
    if features.len() > capacity {
        return Err(Failure(
            AntiresStatus::BufferTooSmall,
            format!("{} features, room for {capacity}", features.len()),
        ));
    }
    if !features.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(features.as_ptr(), out, features.len());
    }
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn antires_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn antires_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Build a network from the JSON network format.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn antires_network_from_json(json: *const c_char, out: *mut *mut AntiresNetwork) -> AntiresStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let net = antires::netfile::parse_network(string(json, "json")?)?;
        hand_out(net, out);
        Ok(())
    })
}

/// Cavity at the frequency origin, atom at `delta_ac`, cavity driven.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn antires_network_atom_cavity(
    g: f64,
    gamma: f64,
    kappa: f64,
    delta_ac: f64,
    out: *mut *mut AntiresNetwork,
) -> AntiresStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        hand_out(ModeNetwork::atom_cavity(g, gamma, kappa, delta_ac)?, out);
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `network` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn antires_network_free(network: *mut AntiresNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Number of modes.
///
/// # Safety
/// `network` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn antires_network_len(network: *const AntiresNetwork, out: *mut usize) -> AntiresStatus {
    guard(|| {
        let net = self::network(network)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = net.len();
        Ok(())
    })
}

/// New handle with unit drive on `label` only.
///
/// # Safety
/// `network` must be a live handle, `label` a NUL-terminated string and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn antires_network_driven_at(
    network: *const AntiresNetwork,
    label: *const c_char,
    out: *mut *mut AntiresNetwork,
) -> AntiresStatus {
    guard(|| {
        let net = self::network(network)?;
        let label = string(label, "label")?;
        if out.is_null() {
            return Err(null("out"));
        }
        hand_out(net.driven_only_at(label)?, out);
        Ok(())
    })
}

/// Complex steady-state amplitude of every mode at `probe_mhz`, written to
/// `re[0..len]` and `im[0..len]` with `len` equal to the number of modes.
///
/// # Safety
/// `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn antires_steady_state(
    network: *const AntiresNetwork,
    probe_mhz: f64,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> AntiresStatus {
    guard(|| {
        let net = self::network(network)?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        if len < net.len() {
            return Err(Failure(
                AntiresStatus::BufferTooSmall,
                format!("{} modes, room for {len}", net.len()),
            ));
        }
        let state = steady_state(net, probe_mhz)?;
        for (k, a) in state.amplitudes.iter().enumerate() {
            *re.add(k) = a.re;
            *im.add(k) = a.im;
        }
        Ok(())
    })
}

/// Poles of the network, sorted by center.
///
/// # Safety
/// `out` must hold `capacity` entries (may be null when `capacity` is 0);
/// `count` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn antires_resonances(
    network: *const AntiresNetwork,
    out: *mut AntiresFeature,
    capacity: usize,
    count: *mut usize,
) -> AntiresStatus {
    guard(|| {
        let poles = resonances(self::network(network)?)?
            .into_iter()
            .map(|p| AntiresFeature {
                center_mhz: p.center,
                half_width_mhz: p.half_width,
                multiplicity: p.multiplicity,
            })
            .collect();
        write_features(poles, out, capacity, count)
    })
}

/// Zeros of the response of node `drive_label` when that node is driven.
///
/// # Safety
/// As for [`antires_resonances`]; `drive_label` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn antires_antiresonances(
    network: *const AntiresNetwork,
    drive_label: *const c_char,
    out: *mut AntiresFeature,
    capacity: usize,
    count: *mut usize,
) -> AntiresStatus {
    guard(|| {
        let label = string(drive_label, "drive_label")?;
        let zeros = antiresonances(self::network(network)?, label)?
            .into_iter()
            .map(|z| AntiresFeature {
                center_mhz: z.center,
                half_width_mhz: z.half_width,
                multiplicity: z.multiplicity,
            })
            .collect();
        write_features(zeros, out, capacity, count)
    })
}

/// Label of the node whose drive gives the narrowest antiresonances, copied
/// NUL-terminated into `buffer`.
///
/// # Safety
/// `buffer` must hold `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn antires_lossy_component(
    network: *const AntiresNetwork,
    buffer: *mut c_char,
    capacity: usize,
) -> AntiresStatus {
    guard(|| {
        let verdict = lossy_component_identify(self::network(network)?, None, DEFAULT_AMBIGUITY_TOLERANCE)?;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let bytes = verdict.label.as_bytes();
        if bytes.len() + 1 > capacity {
            return Err(Failure(
                AntiresStatus::BufferTooSmall,
                format!("label needs {} bytes", bytes.len() + 1),
            ));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buffer, bytes.len());
        *buffer.add(bytes.len()) = 0;
        Ok(())
    })
}

/// Default atom–cavity parameters: g 16, γ 3, κ 1.5 MHz, resonant probe, `eta = 0.015`.
#[no_mangle]
pub extern "C" fn antires_jc_params_default() -> AntiresJCParams {
    let p = JCParams::default();
    AntiresJCParams {
        g: p.g,
        gamma: p.gamma,
        kappa: p.kappa,
        delta_pa: p.delta_pa,
        delta_pc: p.delta_pc,
        eta: p.eta,
        cutoff: p.cutoff,
        max_cutoff: p.max_cutoff,
    }
}

/// Quantum steady state of the driven atom–cavity system.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn antires_oracle_steady_state(
    params: *const AntiresJCParams,
    out: *mut AntiresOracleResult,
) -> AntiresStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let result = lindblad_steady_state(&JCParams {
            g: p.g,
            gamma: p.gamma,
            kappa: p.kappa,
            delta_pa: p.delta_pa,
            delta_pc: p.delta_pc,
            eta: p.eta,
            cutoff: p.cutoff,
            max_cutoff: p.max_cutoff,
        })?;
        *out = AntiresOracleResult {
            field_re: result.field.re,
            field_im: result.field.im,
            photons: result.photons,
            g2_zero: result.g2_zero,
            cutoff: result.cutoff,
        };
        Ok(())
    })
}
