//! Drive envelopes of the three-step protocol: a soft π pulse on the
//! controls, the double-STIRAP pump/Stokes pair on the target, and a closing
//! π pulse of opposite sign.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::C64;

/// Gaussian width as a fraction of the d-STIRAP window.
pub const DEFAULT_SIGMA_FRAC: f64 = 0.125;
/// Half-separation of the Stokes/pump centres in units of the width.
pub const DEFAULT_DELTA_FRAC: f64 = 0.75;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseSign {
    Positive,
    Negative,
}

impl PulseSign {
    pub fn value(self) -> f64 {
        match self {
            PulseSign::Positive => 1.0,
            PulseSign::Negative => -1.0,
        }
    }
}

/// Timing of the whole gate. d-STIRAP centres and `t_mid` are measured from
/// the start of the d-STIRAP window, which opens at `t_pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pub t_pi: f64,
    pub t_d: f64,
    pub sigma: f64,
    pub delta: f64,
    pub t_s: f64,
    pub t_p: f64,
    pub t_p2: f64,
    pub t_s2: f64,
    pub t_mid: f64,
    pub gamma_phase: f64,
}

impl PulseSchedule {
    pub fn total_time(&self) -> f64 {
        2.0 * self.t_pi + self.t_d
    }

    /// Absolute time at which the d-STIRAP window opens.
    pub fn dstirap_start(&self) -> f64 {
        self.t_pi
    }

    /// Absolute time at which the closing π pulse starts.
    pub fn closing_pulse_start(&self) -> f64 {
        self.t_pi + self.t_d
    }

    /// Absolute boundaries `[0, t_pi, t_pi + t_d, total]` of the three steps.
    pub fn step_boundaries(&self) -> [f64; 4] {
        [0.0, self.t_pi, self.t_pi + self.t_d, self.total_time()]
    }

    /// Pump and Stokes magnitudes at the instant of the phase jump.
    pub fn envelopes_at_phase_jump(&self, omega_0: f64) -> (f64, f64) {
        (dstirap_pump(self.t_mid, self, omega_0), dstirap_stokes(self.t_mid, self, omega_0).norm())
    }
}

/// Raised-cosine π pulse `sign·(Ωr/2)(1 − cos(2πt/T))`, zero outside `[0, T]`.
pub fn soft_pi_amplitude(t: f64, omega_r: f64, period: f64, sign: PulseSign) -> f64 {
    if !(0.0..=period).contains(&t) {
        return 0.0;
    }
    sign.value() * 0.5 * omega_r * (1.0 - (2.0 * PI * t / period).cos())
}

pub fn gaussian(t: f64, t0: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", format!("Gaussian width must be positive, got {sigma}")));
    }
    Ok(gauss(t, t0, sigma))
}

#[inline]
fn gauss(t: f64, t0: f64, sigma: f64) -> f64 {
    let x = (t - t0) / sigma;
    (-0.5 * x * x).exp()
}

fn in_window(t: f64, sched: &PulseSchedule) -> bool {
    (0.0..=sched.t_d).contains(&t)
}

/// Pump Rabi frequency `(Ω0/2)[G(t, t_p) + G(t, t_p')]` inside the window.
pub fn dstirap_pump(t: f64, sched: &PulseSchedule, omega_0: f64) -> f64 {
    if !in_window(t, sched) {
        return 0.0;
    }
    0.5 * omega_0 * (gauss(t, sched.t_p, sched.sigma) + gauss(t, sched.t_p2, sched.sigma))
}

/// Stokes Rabi frequency with its phase, `(Ω0/2)[G(t, t_s) + G(t, t_s')] e^{−iφ(t)}`.
pub fn dstirap_stokes(t: f64, sched: &PulseSchedule, omega_0: f64) -> C64 {
    if !in_window(t, sched) {
        return C64::new(0.0, 0.0);
    }
    let magnitude = 0.5 * omega_0 * (gauss(t, sched.t_s, sched.sigma) + gauss(t, sched.t_s2, sched.sigma));
    C64::from_polar(magnitude, -phase_profile(t, sched))
}

/// Stokes phase: `Γ` before `t_mid`, zero from `t_mid` on.
pub fn phase_profile(t: f64, sched: &PulseSchedule) -> f64 {
    if t < sched.t_mid {
        sched.gamma_phase
    } else {
        0.0
    }
}

/// Lay out the gate for a total duration `total_time`.
///
/// The π pulses last `2π/Ωr` each; the remainder is the d-STIRAP window with
/// Stokes-before-pump ordering in the first half and pump-before-Stokes in
/// the second.
pub fn build_schedule(
    omega_0: f64,
    omega_r: f64,
    gamma_phase: f64,
    total_time: f64,
    sigma_frac: f64,
    delta_frac: f64,
) -> Result<PulseSchedule> {
    if !(omega_0 > 0.0) {
        return Err(Error::invalid("omega_0", "must be positive"));
    }
    if !(omega_r > 0.0) {
        return Err(Error::invalid("omega_r", "must be positive"));
    }
    if !gamma_phase.is_finite() {
        return Err(Error::invalid("gamma_phase", "must be finite"));
    }
    let t_pi = 2.0 * PI / omega_r;
    if !(total_time > 2.0 * t_pi) || !total_time.is_finite() {
        return Err(Error::invalid(
            "total_time",
            format!("{total_time} μs does not leave room for two π pulses of {t_pi:.6} μs"),
        ));
    }
    if !(sigma_frac > 0.0) || !sigma_frac.is_finite() {
        return Err(Error::invalid("sigma_frac", "must be positive"));
    }
    if !(delta_frac > 0.0) || !(sigma_frac * delta_frac < 0.25) {
        return Err(Error::invalid(
            "delta_frac",
            "need 0 < delta_frac·sigma_frac < 1/4 so every centre lies inside its half-window",
        ));
    }
    let t_d = total_time - 2.0 * t_pi;
    let sigma = sigma_frac * t_d;
    let delta = delta_frac * sigma;
    let quarter = 0.25 * t_d;
    Ok(PulseSchedule {
        t_pi,
        t_d,
        sigma,
        delta,
        t_s: quarter - delta,
        t_p: quarter + delta,
        t_p2: 3.0 * quarter - delta,
        t_s2: 3.0 * quarter + delta,
        t_mid: 0.5 * t_d,
        gamma_phase,
    })
}
