//! C interface to the gate simulator.
//!
//! Every fallible function returns a [`DsgStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and
//! can be read with [`dsg_last_error`]. Handles are opaque and must be
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dstirap_gate::atom::{c6_atomic_units, interaction_strength};
use dstirap_gate::config::RunConfig;
use dstirap_gate::gate::{average_fidelity, extract_channel, ideal_gate, GateChannel};
use dstirap_gate::grover::{run_grover, GroverConfig};
use dstirap_gate::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DsgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

/// Simulation settings; starts from the built-in Cs defaults.
pub struct DsgConfig {
    inner: RunConfig,
}

/// Extracted gate channel on the computational subspace.
pub struct DsgChannel {
    inner: GateChannel,
    n_qubits: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> DsgStatus {
    match err {
        Error::Config { .. } => DsgStatus::Config,
        Error::Io(_) | Error::Csv(_) => DsgStatus::Io,
        e if e.is_numerical() => DsgStatus::Numerical,
        _ => DsgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (DsgStatus, String)>) -> DsgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DsgStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside dstirap-gate");
            DsgStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DsgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DsgStatus, String) {
    (DsgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn config_mut<'a>(cfg: *mut DsgConfig) -> Result<&'a mut RunConfig, (DsgStatus, String)> {
    cfg.as_mut().map(|c| &mut c.inner).ok_or_else(|| null("config"))
}

unsafe fn config_ref<'a>(cfg: *const DsgConfig) -> Result<&'a RunConfig, (DsgStatus, String)> {
    cfg.as_ref().map(|c| &c.inner).ok_or_else(|| null("config"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (DsgStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn dsg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dsg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_default(out: *mut *mut DsgConfig) -> DsgStatus {
    guard(|| write_out(out, Box::into_raw(Box::new(DsgConfig { inner: RunConfig::default() }))))
}

/// Parse a TOML config (or run manifest).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_from_toml(text: *const c_char, out: *mut *mut DsgConfig) -> DsgStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| (DsgStatus::InvalidArgument, e.to_string()))?;
        let inner = RunConfig::from_toml(s).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(DsgConfig { inner })))
    })
}

/// # Safety
/// `cfg` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_free(cfg: *mut DsgConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn set_field(cfg: *mut DsgConfig, apply: impl FnOnce(&mut RunConfig)) -> DsgStatus {
    guard(|| {
        let c = config_mut(cfg)?;
        let mut next = c.clone();
        apply(&mut next);
        next.validate().map_err(lib_err)?;
        *c = next;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_qubits(cfg: *mut DsgConfig, n_qubits: usize) -> DsgStatus {
    set_field(cfg, |c| {
        c.geometry.qubits = n_qubits;
        c.geometry.layout = None;
        c.geometry.v_ct_mhz = None;
    })
}

/// Gate duration in μs.
///
/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_total_time(cfg: *mut DsgConfig, total_time_us: f64) -> DsgStatus {
    set_field(cfg, |c| c.pulse.total_time_us = total_time_us)
}

/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_decay(cfg: *mut DsgConfig, enabled: bool) -> DsgStatus {
    set_field(cfg, |c| c.physics.decay = enabled)
}

/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_omega_c_mhz(cfg: *mut DsgConfig, omega_c_mhz: f64) -> DsgStatus {
    set_field(cfg, |c| c.physics.omega_c_mhz = omega_c_mhz)
}

/// Uniform control–target blockade shift in MHz.
///
/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_blockade_mhz(cfg: *mut DsgConfig, v_mhz: f64) -> DsgStatus {
    set_field(cfg, |c| c.geometry.v_ct_mhz = Some(vec![v_mhz; c.geometry.qubits.saturating_sub(1)]))
}

/// Fractional Rabi errors on the controls (`xi`) and the target (`zeta`).
///
/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_rabi_errors(cfg: *mut DsgConfig, xi: f64, zeta: f64) -> DsgStatus {
    set_field(cfg, |c| {
        c.physics.xi = xi;
        c.physics.zeta = zeta;
    })
}

/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_pulse_shape(
    cfg: *mut DsgConfig,
    sigma_frac: f64,
    delta_frac: f64,
) -> DsgStatus {
    set_field(cfg, |c| {
        c.pulse.sigma_frac = sigma_frac;
        c.pulse.delta_frac = delta_frac;
    })
}

/// # Safety
/// `cfg` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_set_tolerances(cfg: *mut DsgConfig, rel_tol: f64, abs_tol: f64) -> DsgStatus {
    set_field(cfg, |c| {
        c.integrator.rel_tol = rel_tol;
        c.integrator.abs_tol = abs_tol;
    })
}

/// # Safety
/// `cfg` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_config_qubits(cfg: *const DsgConfig, out: *mut usize) -> DsgStatus {
    guard(|| write_out(out, config_ref(cfg)?.geometry.qubits))
}

/// Simulate the channel and return its average fidelity.
///
/// # Safety
/// `cfg` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_gate_fidelity(cfg: *const DsgConfig, out: *mut f64) -> DsgStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        let gate = c.gate_config().map_err(lib_err)?;
        let f = dstirap_gate::gate::gate_fidelity(&gate, c.pulse.total_time_us).map_err(lib_err)?;
        write_out(out, f)
    })
}

/// # Safety
/// `cfg` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_extract_channel(cfg: *const DsgConfig, out: *mut *mut DsgChannel) -> DsgStatus {
    guard(|| {
        let c = config_ref(cfg)?;
        let gate = c.gate_config().map_err(lib_err)?;
        let protocol = gate.protocol(c.pulse.total_time_us).map_err(lib_err)?;
        let inner = extract_channel(&protocol).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(DsgChannel { inner, n_qubits: gate.n_qubits() })))
    })
}

/// Computational dimension `d`; the superoperator is `d² × d²`.
///
/// # Safety
/// `ch` must be a valid handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn dsg_channel_dim(ch: *const DsgChannel) -> usize {
    ch.as_ref().map_or(0, |c| c.inner.d())
}

/// Copy the superoperator, row-major, into `re` and `im` (each `len ≥ d⁴`).
/// It acts on column-stacked matrices, `vec(A)[i + j·d] = A_ij`.
///
/// # Safety
/// `ch` must be a valid handle, `re` and `im` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dsg_channel_superop(
    ch: *const DsgChannel,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> DsgStatus {
    guard(|| {
        let c = ch.as_ref().ok_or_else(|| null("channel"))?;
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let s = c.inner.superop().as_slice();
        if len < s.len() {
            return Err((DsgStatus::InvalidArgument, format!("buffer holds {len} entries, need {}", s.len())));
        }
        for (k, v) in s.iter().enumerate() {
            *re.add(k) = v.re;
            *im.add(k) = v.im;
        }
        Ok(())
    })
}

/// Average fidelity against `diag(1, e^{iΓ}, …, e^{iΓ})`.
///
/// # Safety
/// `ch` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_channel_fidelity(ch: *const DsgChannel, gamma_phase: f64, out: *mut f64) -> DsgStatus {
    guard(|| {
        let c = ch.as_ref().ok_or_else(|| null("channel"))?;
        let ideal = ideal_gate(c.n_qubits, gamma_phase).map_err(lib_err)?;
        write_out(out, average_fidelity(&c.inner, &ideal).map_err(lib_err)?)
    })
}

/// # Safety
/// `ch` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn dsg_channel_free(ch: *mut DsgChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Grover success probability for `|1…1⟩`. A null `ch` uses the exact gate.
///
/// # Safety
/// `ch` must be a valid handle or null, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_grover(
    n_qubits: usize,
    iterations: usize,
    ch: *const DsgChannel,
    out: *mut f64,
) -> DsgStatus {
    guard(|| {
        let channel = ch.as_ref().map(|c| c.inner.clone());
        let p = run_grover(&GroverConfig { n_qubits, iterations, channel }).map_err(lib_err)?;
        write_out(out, p)
    })
}

/// Signed C6 coefficient in atomic units.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_c6(principal_n: u32, out: *mut f64) -> DsgStatus {
    guard(|| write_out(out, c6_atomic_units(principal_n).map_err(lib_err)?))
}

/// Blockade shift in rad/μs at separation `l_um`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dsg_interaction_strength(l_um: f64, principal_n: u32, out: *mut f64) -> DsgStatus {
    guard(|| write_out(out, interaction_strength(l_um, principal_n).map_err(lib_err)?))
}
