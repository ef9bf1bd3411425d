//! Dormand–Prince 5(4) with FSAL and standard step-size control.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    DormandPrince54,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest allowed step in μs.
    pub max_step: f64,
    pub max_steps: usize,
    pub method: Method,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-11,
            max_step: f64::INFINITY,
            max_steps: 20_000_000,
            method: Method::default(),
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::invalid("max_step", "must be positive"));
        }
        if self.max_steps == 0 {
            return Err(Error::invalid("max_steps", "must be at least 1"));
        }
        Ok(())
    }

    /// Both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { rel_tol: self.rel_tol / factor, abs_tol: self.abs_tol / factor, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

impl std::ops::AddAssign for IntegrationStats {
    fn add_assign(&mut self, rhs: Self) {
        self.accepted += rhs.accepted;
        self.rejected += rhs.rejected;
        self.rhs_evaluations += rhs.rhs_evaluations;
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

fn error_norm(err: &[C64], y0: &[C64], y1: &[C64], cfg: &IntegratorConfig) -> f64 {
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = cfg.abs_tol + cfg.rel_tol * a.norm().max(b.norm());
            (e / sc).norm_sqr()
        })
        .sum();
    (sum / err.len().max(1) as f64).sqrt()
}

fn initial_step(y: &[C64], f0: &[C64], span: f64, cfg: &IntegratorConfig) -> f64 {
    let rms = |v: &[C64]| {
        let s: f64 = v.iter().zip(y).map(|(x, yi)| (x / (cfg.abs_tol + cfg.rel_tol * yi.norm())).norm_sqr()).sum();
        (s / v.len().max(1) as f64).sqrt()
    };
    let (d0, d1) = (rms(y), rms(f0));
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    h.min(span).min(cfg.max_step)
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1` in place.
pub fn integrate<F>(mut f: F, t0: f64, t1: f64, y: &mut [C64], cfg: &IntegratorConfig) -> Result<IntegrationStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    cfg.validate()?;
    let mut stats = IntegrationStats::default();
    if t1 == t0 || y.is_empty() {
        return Ok(stats);
    }
    if !(t1 > t0) {
        return Err(Error::invalid("t1", format!("integration must run forward, got {t0} -> {t1}")));
    }
    let n = y.len();
    let span = t1 - t0;
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![ZERO; n]).collect();
    let mut tmp = vec![ZERO; n];
    let mut y_new = vec![ZERO; n];
    let mut err = vec![ZERO; n];

    f(t0, y, &mut k[0]);
    stats.rhs_evaluations += 1;
    let mut h = initial_step(y, &k[0], span, cfg);
    let mut t = t0;

    while t < t1 {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::TooManySteps { t, max_steps: cfg.max_steps });
        }
        let last = t + h >= t1 || (t1 - (t + h)) < 1e-12 * span;
        if last {
            h = t1 - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(span) {
            return Err(Error::StepUnderflow { t, h });
        }

        let (k1, rest) = k.split_first_mut().expect("seven stages");
        let [k2, k3, k4, k5, k6, k7] = rest else { unreachable!() };

        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (h * A21);
        }
        f(t + C2 * h, &tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        f(t + C3 * h, &tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        f(t + C4 * h, &tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        f(t + C5 * h, &tmp, k5);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        f(t + h, &tmp, k6);
        for i in 0..n {
            y_new[i] = y[i] + (k1[i] * A71 + k3[i] * A73 + k4[i] * A74 + k5[i] * A75 + k6[i] * A76) * h;
        }
        f(t + h, &y_new, k7);
        stats.rhs_evaluations += 6;
        for i in 0..n {
            err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }

        let e = error_norm(&err, y, &y_new, cfg);
        if !e.is_finite() {
            return Err(Error::NonFinite { t });
        }
        if e <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&y_new);
            std::mem::swap(k1, k7);
            let factor = if e == 0.0 { MAX_FACTOR } else { (SAFETY * e.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR) };
            h = (h * factor).min(cfg.max_step);
        } else {
            stats.rejected += 1;
            h *= (SAFETY * e.powf(-0.2)).max(MIN_FACTOR);
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::I;

    #[test]
    fn exponential_growth() {
        let mut y = vec![C64::from(1.0)];
        integrate(|_, y, dy| dy[0] = y[0], 0.0, 1.0, &mut y, &IntegratorConfig::default()).unwrap();
        assert!((y[0].re - 1f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn complex_rotation() {
        let mut y = vec![C64::from(1.0)];
        let w = 7.3;
        integrate(|_, y, dy| dy[0] = -I * w * y[0], 0.0, 2.0, &mut y, &IntegratorConfig::default()).unwrap();
        assert!((y[0] - C64::from_polar(1.0, -w * 2.0)).norm() < 1e-8);
    }

    #[test]
    fn zero_span_is_identity_and_backwards_is_error() {
        let mut y = vec![C64::new(0.3, 0.4)];
        let stats =
            integrate(|_, _, _| panic!("no evaluation"), 1.0, 1.0, &mut y, &IntegratorConfig::default()).unwrap();
        assert_eq!(stats.accepted, 0);
        assert!(integrate(|_, y, dy| dy[0] = y[0], 1.0, 0.0, &mut y, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn step_budget_is_enforced() {
        let cfg = IntegratorConfig { max_steps: 3, ..Default::default() };
        let mut y = vec![C64::from(1.0)];
        let r = integrate(|_, y, dy| dy[0] = -I * 1e4 * y[0], 0.0, 1.0, &mut y, &cfg);
        assert!(matches!(r, Err(Error::TooManySteps { .. })));
    }

    #[test]
    fn invalid_tolerances_rejected() {
        let cfg = IntegratorConfig { rel_tol: 0.0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = IntegratorConfig { abs_tol: f64::NAN, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
