//! TOML run configuration. Frequencies are ordinary MHz, times μs, lengths
//! μm; everything is converted to angular units when the gate is built.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::atom::{cesium, preset_geometry, GeometryKind, PhysicsParams, MHZ_TO_RAD_PER_US};
use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::gate::GateConfig;
use crate::pulse::{DEFAULT_DELTA_FRAC, DEFAULT_SIGMA_FRAC};

/// The shipped defaults, identical to `RunConfig::default()`.
pub const DEFAULTS_TOML: &str = include_str!("../config/defaults.toml");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsSection {
    pub omega_0_mhz: f64,
    pub omega_r_mhz: f64,
    pub omega_c_mhz: f64,
    pub delta_mhz: f64,
    /// Geometric phase in radians.
    pub gamma_phase: f64,
    pub control_rydberg_lifetime_us: f64,
    pub target_rydberg_lifetime_us: f64,
    pub e1_lifetime_us: f64,
    pub e2_lifetime_us: f64,
    /// `false` switches every decay channel off.
    pub decay: bool,
    pub xi: f64,
    pub zeta: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        let omega_0_mhz = 44.0;
        Self {
            omega_0_mhz,
            omega_r_mhz: omega_0_mhz,
            omega_c_mhz: 3.0 * omega_0_mhz,
            delta_mhz: 0.0,
            gamma_phase: std::f64::consts::PI,
            control_rydberg_lifetime_us: cesium::RYDBERG_LIFETIME_US,
            target_rydberg_lifetime_us: cesium::RYDBERG_LIFETIME_US,
            e1_lifetime_us: cesium::E1_LIFETIME_US,
            e2_lifetime_us: cesium::E2_LIFETIME_US,
            decay: true,
            xi: 0.0,
            zeta: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub qubits: usize,
    /// Defaults to the preset for `qubits`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<GeometryKind>,
    pub separation_um: f64,
    pub principal_n: u32,
    pub include_cc: bool,
    /// Explicit control–target shifts in MHz, replacing the geometric ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_ct_mhz: Option<Vec<f64>>,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            qubits: 2,
            layout: None,
            separation_um: cesium::SEPARATION_UM,
            principal_n: cesium::PRINCIPAL_N,
            include_cc: false,
            v_ct_mhz: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    pub total_time_us: f64,
    pub sigma_frac: f64,
    pub delta_frac: f64,
    pub manifold_isolation: bool,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            total_time_us: 0.6,
            sigma_frac: DEFAULT_SIGMA_FRAC,
            delta_frac: DEFAULT_DELTA_FRAC,
            manifold_isolation: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from(".") }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub physics: PhysicsSection,
    pub geometry: GeometrySection,
    pub pulse: PulseSection,
    pub integrator: IntegratorConfig,
    pub output: OutputSection,
}

fn config_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), reason: reason.into() }
}

fn rate(key: &str, lifetime: f64) -> Result<f64> {
    if !(lifetime > 0.0) {
        return Err(config_err(key, format!("lifetime must be positive, got {lifetime}")));
    }
    Ok(1.0 / lifetime)
}

impl RunConfig {
    /// Parse a config file, or the `config` table of a run manifest.
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err("<toml>", e.message()))?;
        if table.contains_key("manifest") {
            table = match table.remove("config") {
                Some(toml::Value::Table(t)) => t,
                _ => return Err(config_err("config", "manifest has no config table")),
            };
        }
        let cfg: RunConfig =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| config_err("<toml>", e.message()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.physics;
        for (key, v) in [("physics.omega_0_mhz", p.omega_0_mhz), ("physics.omega_r_mhz", p.omega_r_mhz)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(key, format!("must be positive, got {v}")));
            }
        }
        if !(p.omega_c_mhz >= 0.0 && p.omega_c_mhz.is_finite()) {
            return Err(config_err("physics.omega_c_mhz", "must be non-negative"));
        }
        for (key, v) in [
            ("physics.delta_mhz", p.delta_mhz),
            ("physics.gamma_phase", p.gamma_phase),
            ("physics.xi", p.xi),
            ("physics.zeta", p.zeta),
        ] {
            if !v.is_finite() {
                return Err(config_err(key, "must be finite"));
            }
        }
        for (key, v) in [
            ("physics.control_rydberg_lifetime_us", p.control_rydberg_lifetime_us),
            ("physics.target_rydberg_lifetime_us", p.target_rydberg_lifetime_us),
            ("physics.e1_lifetime_us", p.e1_lifetime_us),
            ("physics.e2_lifetime_us", p.e2_lifetime_us),
        ] {
            rate(key, v)?;
        }
        let g = &self.geometry;
        if !(2..=4).contains(&g.qubits) {
            return Err(config_err("geometry.qubits", format!("must be 2, 3 or 4, got {}", g.qubits)));
        }
        if let Some(kind) = g.layout {
            if kind.n_controls() + 1 != g.qubits {
                return Err(config_err("geometry.layout", format!("{kind} does not hold {} qubits", g.qubits)));
            }
        }
        if !(g.separation_um > 0.0 && g.separation_um.is_finite()) {
            return Err(config_err("geometry.separation_um", "must be positive"));
        }
        if g.principal_n == 0 {
            return Err(config_err("geometry.principal_n", "must be at least 1"));
        }
        if let Some(v) = &g.v_ct_mhz {
            if v.len() != g.qubits - 1 {
                return Err(config_err("geometry.v_ct_mhz", format!("need {} entries, got {}", g.qubits - 1, v.len())));
            }
            if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(config_err("geometry.v_ct_mhz", "entries must be finite and non-negative"));
            }
        }
        let pulse = &self.pulse;
        if !(pulse.total_time_us > 0.0 && pulse.total_time_us.is_finite()) {
            return Err(config_err("pulse.total_time_us", "must be positive"));
        }
        if !(pulse.sigma_frac > 0.0) {
            return Err(config_err("pulse.sigma_frac", "must be positive"));
        }
        if !(pulse.delta_frac > 0.0 && pulse.sigma_frac * pulse.delta_frac < 0.25) {
            return Err(config_err("pulse.delta_frac", "need 0 < delta_frac·sigma_frac < 1/4"));
        }
        self.integrator.validate().map_err(|e| config_err("integrator", e.to_string()))
    }

    pub fn layout(&self) -> Result<GeometryKind> {
        match self.geometry.layout {
            Some(k) => Ok(k),
            None => GeometryKind::for_qubits(self.geometry.qubits),
        }
    }

    /// Physical parameters in angular units.
    pub fn physics(&self) -> Result<PhysicsParams> {
        self.validate()?;
        let p = &self.physics;
        let g = &self.geometry;
        let mut geometry = preset_geometry(self.layout()?, g.separation_um, g.principal_n)?;
        geometry.include_cc = g.include_cc;
        let mut physics = PhysicsParams::cesium(&geometry)?;
        physics.omega_0 = p.omega_0_mhz * MHZ_TO_RAD_PER_US;
        physics.omega_r = p.omega_r_mhz * MHZ_TO_RAD_PER_US;
        physics.omega_c = p.omega_c_mhz * MHZ_TO_RAD_PER_US;
        physics.delta = p.delta_mhz * MHZ_TO_RAD_PER_US;
        physics.gamma_phase = p.gamma_phase;
        physics.gamma_r = rate("physics.control_rydberg_lifetime_us", p.control_rydberg_lifetime_us)?;
        physics.gamma_big_r = rate("physics.target_rydberg_lifetime_us", p.target_rydberg_lifetime_us)?;
        physics.gamma_e1 = rate("physics.e1_lifetime_us", p.e1_lifetime_us)?;
        physics.gamma_e2 = rate("physics.e2_lifetime_us", p.e2_lifetime_us)?;
        physics.xi = p.xi;
        physics.zeta = p.zeta;
        if let Some(v) = &g.v_ct_mhz {
            physics.v_ct = v.iter().map(|x| x * MHZ_TO_RAD_PER_US).collect();
        }
        if !p.decay {
            physics = physics.without_decay();
        }
        physics.validate()?;
        Ok(physics)
    }

    pub fn gate_config(&self) -> Result<GateConfig> {
        Ok(GateConfig {
            physics: self.physics()?,
            sigma_frac: self.pulse.sigma_frac,
            delta_frac: self.pulse.delta_frac,
            manifold_isolation: self.pulse.manifold_isolation,
            integrator: self.integrator.clone(),
        })
    }
}
