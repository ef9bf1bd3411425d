//! Parameter sweeps over the gate simulation and their CSV output.
//!
//! Grid points are evaluated in parallel and collected in grid order, so a
//! sweep produces identical rows regardless of the worker count.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::atom::{interaction_strength, preset_geometry, ControlLevel, GeometryKind, TargetLevel};
use crate::dynamics::run_protocol_state;
use crate::error::{Error, Result};
use crate::gate::{gate_fidelity, GateConfig};
use crate::numerics::{ComplexVector, C64};

/// Rows of grid coordinates followed by one observable.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepResult {
    fn new(columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of one column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Row with the largest value in the last column.
    pub fn argmax(&self) -> Option<&[f64]> {
        self.rows
            .iter()
            .max_by(|a, b| a.last().unwrap_or(&f64::NAN).total_cmp(b.last().unwrap_or(&f64::NAN)))
            .map(Vec::as_slice)
    }

    /// Rows whose column `name` equals `value`.
    pub fn filter(&self, name: &str, value: f64) -> SweepResult {
        let Some(k) = self.columns.iter().position(|c| c == name) else {
            return SweepResult { columns: self.columns.clone(), rows: Vec::new() };
        };
        let rows = self.rows.iter().filter(|r| r[k] == value).cloned().collect();
        SweepResult { columns: self.columns.clone(), rows }
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn check_axis(name: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(name, "grid is empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(name, "grid contains a non-finite value"));
    }
    Ok(())
}

fn run_grid<P: Sync, F>(points: &[P], f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&P) -> Result<Vec<f64>> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

/// Decay-free amplitude `⟨ψ0|ψ(T)⟩` for every control in `control` and the
/// target in `|A⟩`.
pub fn return_amplitude(config: &GateConfig, total_time: f64, control: ControlLevel) -> Result<C64> {
    let mut cfg = config.clone();
    cfg.physics = cfg.physics.without_decay();
    let spec = cfg.spec(total_time)?;
    let controls = vec![control; spec.space.n_controls()];
    let index = spec.space.index(&controls, TargetLevel::A);
    let psi0 = ComplexVector::basis(spec.space.dim(), index);
    let psi = run_protocol_state(&spec, &psi0, &cfg.integrator)?;
    Ok(psi.as_slice()[index])
}

/// `Re⟨0A|ψ(T)⟩` against `Ωc/Ω0`, controls in `|0⟩`.
pub fn amplitude_vs_omega_c(config: &GateConfig, total_time: f64, ratios: &[f64]) -> Result<SweepResult> {
    check_axis("omega_c_ratio", ratios)?;
    let rows = run_grid(ratios, |&r| {
        let mut cfg = config.clone();
        cfg.physics.omega_c = r * cfg.physics.omega_0;
        Ok(vec![r, return_amplitude(&cfg, total_time, ControlLevel::Zero)?.re])
    })?;
    Ok(SweepResult::new(&["omega_c_over_omega_0", "re_amplitude"], rows))
}

/// `Re⟨1A|ψ(T)⟩` against `V/Ω0` with the coupling of `config`, controls in
/// `|1⟩`.
pub fn amplitude_vs_v(config: &GateConfig, total_time: f64, ratios: &[f64]) -> Result<SweepResult> {
    check_axis("v_ratio", ratios)?;
    let rows = run_grid(ratios, |&r| {
        let mut cfg = config.clone();
        let v = r * cfg.physics.omega_0;
        cfg.physics = cfg.physics.with_uniform_blockade(v);
        Ok(vec![r, return_amplitude(&cfg, total_time, ControlLevel::One)?.re])
    })?;
    Ok(SweepResult::new(&["v_over_omega_0", "re_amplitude"], rows))
}

pub fn fidelity_vs_gate_time(config: &GateConfig, times: &[f64]) -> Result<SweepResult> {
    check_axis("total_time", times)?;
    let rows = run_grid(times, |&t| Ok(vec![t, gate_fidelity(config, t)?]))?;
    Ok(SweepResult::new(&["total_time_us", "fidelity"], rows))
}

/// Fidelity over the `(ξ, ζ)` grid, `ξ` outer.
pub fn rabi_error_sweep(config: &GateConfig, total_time: f64, xis: &[f64], zetas: &[f64]) -> Result<SweepResult> {
    check_axis("xi", xis)?;
    check_axis("zeta", zetas)?;
    let points: Vec<(f64, f64)> = xis.iter().flat_map(|&x| zetas.iter().map(move |&z| (x, z))).collect();
    let rows = run_grid(&points, |&(xi, zeta)| {
        let mut cfg = config.clone();
        cfg.physics.xi = xi;
        cfg.physics.zeta = zeta;
        Ok(vec![xi, zeta, gate_fidelity(&cfg, total_time)?])
    })?;
    Ok(SweepResult::new(&["xi", "zeta", "fidelity"], rows))
}

/// Fidelity over `Ωc/Ω0` (outer) and a uniform blockade `V/Ω0` (inner).
pub fn blockade_sweep(
    config: &GateConfig,
    total_time: f64,
    omega_c_ratios: &[f64],
    v_ratios: &[f64],
) -> Result<SweepResult> {
    check_axis("omega_c_ratio", omega_c_ratios)?;
    check_axis("v_ratio", v_ratios)?;
    let points: Vec<(f64, f64)> = omega_c_ratios.iter().flat_map(|&c| v_ratios.iter().map(move |&v| (c, v))).collect();
    let rows = run_grid(&points, |&(c, v)| {
        let mut cfg = config.clone();
        let w0 = cfg.physics.omega_0;
        cfg.physics.omega_c = c * w0;
        cfg.physics = cfg.physics.with_uniform_blockade(v * w0);
        Ok(vec![c, v, gate_fidelity(&cfg, total_time)?])
    })?;
    Ok(SweepResult::new(&["omega_c_over_omega_0", "v_over_omega_0", "fidelity"], rows))
}

/// Fidelity against the atom separation of a preset layout; every blockade
/// shift follows from the geometry at each point.
pub fn position_sweep(
    config: &GateConfig,
    total_time: f64,
    kind: GeometryKind,
    separations: &[f64],
    principal_n: u32,
) -> Result<SweepResult> {
    check_axis("separation", separations)?;
    if kind.n_controls() != config.physics.n_controls() {
        return Err(Error::invalid("geometry", format!("{kind} does not match a {}-qubit gate", config.n_qubits())));
    }
    let include_cc = config.physics.v_cc.iter().flatten().any(|&v| v != 0.0);
    let rows = run_grid(separations, |&l| {
        let mut geometry = preset_geometry(kind, l, principal_n)?;
        geometry.include_cc = include_cc;
        let mut cfg = config.clone();
        cfg.physics.v_ct = geometry.control_target_couplings()?;
        cfg.physics.v_cc = geometry.control_control_couplings()?;
        let v = interaction_strength(l, principal_n)?;
        Ok(vec![l, v / cfg.physics.omega_c, gate_fidelity(&cfg, total_time)?])
    })?;
    Ok(SweepResult::new(&["separation_um", "v_over_omega_c", "fidelity"], rows))
}

/// Header row, then one row per grid point with 17 significant digits.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(&result.columns)?;
    for row in &result.rows {
        w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<SweepResult> {
    let mut r = csv::Reader::from_path(path)?;
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|e| Error::Config { key: path.display().to_string(), reason: e.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(SweepResult { columns, rows })
}

/// Plain-text dump used by the CLI when no output file is wanted.
pub fn write_table(result: &SweepResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{}", result.columns.join("\t"))?;
    for row in &result.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.8}")).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}
