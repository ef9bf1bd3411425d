//! Level structure, composite Hilbert space, geometry and interaction
//! strengths.
//!
//! Units: angular frequencies in rad/μs, times in μs, lengths in μm.
//! Ordinary frequencies (MHz) only appear at the configuration boundary.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, SparseMatrix};

/// Ordinary MHz to angular rad/μs.
pub const MHZ_TO_RAD_PER_US: f64 = 2.0 * PI;

/// Hartree energy over Planck's constant, in GHz.
const HARTREE_OVER_H_GHZ: f64 = 6.579_683_920_502e6;
/// Bohr radius in μm.
const BOHR_RADIUS_UM: f64 = 5.291_772_109_03e-5;

pub const CONTROL_LEVELS: usize = 3;
pub const TARGET_LEVELS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlLevel {
    Zero = 0,
    One = 1,
    Rydberg = 2,
}

impl ControlLevel {
    pub const ALL: [ControlLevel; 3] = [ControlLevel::Zero, ControlLevel::One, ControlLevel::Rydberg];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetLevel {
    A = 0,
    B = 1,
    C = 2,
    E1 = 3,
    E2 = 4,
    R = 5,
}

impl TargetLevel {
    pub const ALL: [TargetLevel; 6] =
        [TargetLevel::A, TargetLevel::B, TargetLevel::C, TargetLevel::E1, TargetLevel::E2, TargetLevel::R];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// `n_controls` three-level control atoms followed by one six-level target.
/// Controls are the most significant digits of the basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompositeSpace {
    n_controls: usize,
}

impl CompositeSpace {
    pub fn new(n_controls: usize) -> Result<Self> {
        if n_controls == 0 {
            return Err(Error::invalid("n_controls", "need at least one control atom"));
        }
        Ok(Self { n_controls })
    }

    pub fn n_controls(&self) -> usize {
        self.n_controls
    }

    pub fn n_qubits(&self) -> usize {
        self.n_controls + 1
    }

    pub fn dim(&self) -> usize {
        CONTROL_LEVELS.pow(self.n_controls as u32) * TARGET_LEVELS
    }

    /// Dimension of the computational subspace, `2^n_qubits`.
    pub fn computational_dim(&self) -> usize {
        1 << self.n_qubits()
    }

    /// Index stride of atom `atom` (controls `0..n_controls`, then the target).
    fn stride(&self, atom: usize) -> usize {
        if atom == self.n_controls {
            1
        } else {
            CONTROL_LEVELS.pow((self.n_controls - 1 - atom) as u32) * TARGET_LEVELS
        }
    }

    fn levels(&self, atom: usize) -> usize {
        if atom == self.n_controls {
            TARGET_LEVELS
        } else {
            CONTROL_LEVELS
        }
    }

    pub fn index(&self, controls: &[ControlLevel], target: TargetLevel) -> usize {
        assert_eq!(controls.len(), self.n_controls, "wrong number of control levels");
        controls.iter().enumerate().map(|(k, c)| c.index() * self.stride(k)).sum::<usize>() + target.index()
    }

    pub fn control_level(&self, index: usize, control: usize) -> ControlLevel {
        ControlLevel::ALL[(index / self.stride(control)) % CONTROL_LEVELS]
    }

    pub fn target_level(&self, index: usize) -> TargetLevel {
        TargetLevel::ALL[index % TARGET_LEVELS]
    }

    fn check_atom_op(&self, atom: usize, rows: usize, cols: usize) -> Result<()> {
        if atom > self.n_controls {
            return Err(Error::ShapeMismatch(format!("atom index {atom} out of range for {} atoms", self.n_qubits())));
        }
        let levels = self.levels(atom);
        if rows != levels || cols != levels {
            return Err(Error::ShapeMismatch(format!("atom {atom} has {levels} levels but operator is {rows}x{cols}")));
        }
        Ok(())
    }

    /// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` acting on `atom`.
    pub fn embed_single_atom_op(&self, atom: usize, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(self.embed_sparse(atom, &SparseMatrix::from_dense(op))?.to_dense())
    }

    pub fn embed_sparse(&self, atom: usize, op: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_atom_op(atom, op.rows(), op.cols())?;
        let stride = self.stride(atom);
        let levels = self.levels(atom);
        let mut entries = Vec::with_capacity(op.nnz() * self.dim() / levels);
        for base in 0..self.dim() {
            if !(base / stride).is_multiple_of(levels) {
                continue;
            }
            for &(a, b, v) in op.entries() {
                entries.push((base + a * stride, base + b * stride, v));
            }
        }
        Ok(SparseMatrix::from_triplets(self.dim(), self.dim(), entries))
    }

    /// Full-space indices of the computational basis in binary order: control
    /// logical 0/1 is `|0>/|1>`, target logical 0/1 is `|A>/|B>`, the first
    /// control is the most significant bit and the target the least.
    pub fn computational_embedding(&self) -> Vec<usize> {
        let n = self.n_qubits();
        (0..self.computational_dim())
            .map(|bits| {
                (0..n)
                    .map(|atom| {
                        let bit = (bits >> (n - 1 - atom)) & 1;
                        bit * self.stride(atom)
                    })
                    .sum()
            })
            .collect()
    }
}

/// C6 coefficient of the nS Rydberg state in atomic units, as a signed
/// polynomial in the principal quantum number.
pub fn c6_atomic_units(principal_n: u32) -> Result<f64> {
    if principal_n < 1 {
        return Err(Error::invalid("principal_n", "principal quantum number must be >= 1"));
    }
    let n = f64::from(principal_n);
    Ok(n.powi(11) * (10.64 - 0.6294 * n + 2.33e-3 * n * n))
}

/// Convert a C6 coefficient from atomic units to GHz·μm⁶ (ordinary frequency).
pub fn c6_to_freq_units(c6_au: f64) -> f64 {
    c6_au * HARTREE_OVER_H_GHZ * BOHR_RADIUS_UM.powi(6)
}

/// Van der Waals shift `2π |C6| / l⁶` in rad/μs at separation `l` μm.
pub fn interaction_strength(l: f64, principal_n: u32) -> Result<f64> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid("l", format!("separation must be positive, got {l}")));
    }
    let c6_ghz = c6_to_freq_units(c6_atomic_units(principal_n)?).abs();
    Ok(2.0 * PI * c6_ghz * 1e3 / l.powi(6))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Pair,
    Chain3,
    Star4,
}

impl GeometryKind {
    pub fn n_controls(self) -> usize {
        match self {
            GeometryKind::Pair => 1,
            GeometryKind::Chain3 => 2,
            GeometryKind::Star4 => 3,
        }
    }

    pub fn for_qubits(n_qubits: usize) -> Result<Self> {
        match n_qubits {
            2 => Ok(GeometryKind::Pair),
            3 => Ok(GeometryKind::Chain3),
            4 => Ok(GeometryKind::Star4),
            _ => Err(Error::invalid("qubits", format!("no geometry preset for {n_qubits} qubits"))),
        }
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair" => Ok(GeometryKind::Pair),
            "chain3" => Ok(GeometryKind::Chain3),
            "star4" => Ok(GeometryKind::Star4),
            other => Err(Error::invalid("geometry", format!("unknown geometry kind `{other}`"))),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GeometryKind::Pair => "pair",
            GeometryKind::Chain3 => "chain3",
            GeometryKind::Star4 => "star4",
        };
        f.write_str(name)
    }
}

/// Atom positions in μm, controls first and the target last.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub positions: Vec<[f64; 3]>,
    pub principal_n: u32,
    pub include_cc: bool,
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Geometry {
    pub fn new(positions: Vec<[f64; 3]>, principal_n: u32, include_cc: bool) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::invalid("positions", "need at least one control and a target"));
        }
        for (i, a) in positions.iter().enumerate() {
            for b in &positions[i + 1..] {
                if !(distance(a, b) > 0.0) {
                    return Err(Error::invalid("positions", "atoms must not coincide"));
                }
            }
        }
        Ok(Self { positions, principal_n, include_cc })
    }

    pub fn n_controls(&self) -> usize {
        self.positions.len() - 1
    }

    pub fn control_target_distances(&self) -> Vec<f64> {
        let target = self.positions.last().expect("non-empty");
        self.positions[..self.n_controls()].iter().map(|c| distance(c, target)).collect()
    }

    /// Symmetric control–control distance matrix (zero diagonal).
    pub fn control_control_distances(&self) -> Vec<Vec<f64>> {
        let n = self.n_controls();
        (0..n).map(|i| (0..n).map(|j| distance(&self.positions[i], &self.positions[j])).collect()).collect()
    }

    pub fn control_target_couplings(&self) -> Result<Vec<f64>> {
        self.control_target_distances().into_iter().map(|l| interaction_strength(l, self.principal_n)).collect()
    }

    /// Control–control couplings; all zero unless `include_cc` is set.
    pub fn control_control_couplings(&self) -> Result<Vec<Vec<f64>>> {
        let d = self.control_control_distances();
        d.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(
                        |(j, &l)| {
                            if i == j || !self.include_cc {
                                Ok(0.0)
                            } else {
                                interaction_strength(l, self.principal_n)
                            }
                        },
                    )
                    .collect()
            })
            .collect()
    }
}

/// Standard layouts: a control–target pair, a collinear control–target–control
/// chain, and three controls at 120° around a central target.
pub fn preset_geometry(kind: GeometryKind, l: f64, principal_n: u32) -> Result<Geometry> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid("l", format!("separation must be positive, got {l}")));
    }
    let positions = match kind {
        GeometryKind::Pair => vec![[0.0, 0.0, 0.0], [l, 0.0, 0.0]],
        GeometryKind::Chain3 => vec![[-l, 0.0, 0.0], [l, 0.0, 0.0], [0.0, 0.0, 0.0]],
        GeometryKind::Star4 => {
            let mut p: Vec<[f64; 3]> = (0..3)
                .map(|k| {
                    let angle = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
                    [l * angle.cos(), l * angle.sin(), 0.0]
                })
                .collect();
            p.push([0.0, 0.0, 0.0]);
            p
        }
    };
    Geometry::new(positions, principal_n, false)
}

/// Atomic and laser parameters, all angular frequencies in rad/μs and rates
/// in 1/μs.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicsParams {
    /// Peak scale of the pump and Stokes envelopes.
    pub omega_0: f64,
    /// Control soft π-pulse amplitude.
    pub omega_r: f64,
    /// Coupling between the target Rydberg state and `e1`.
    pub omega_c: f64,
    /// Single-photon detuning of `e1` and `e2`.
    pub delta: f64,
    /// Geometric phase imprinted by the Stokes phase jump.
    pub gamma_phase: f64,
    pub gamma_r: f64,
    pub gamma_big_r: f64,
    pub gamma_e1: f64,
    pub gamma_e2: f64,
    /// Control–target blockade shifts, one per control.
    pub v_ct: Vec<f64>,
    /// Control–control shifts, symmetric with zero diagonal.
    pub v_cc: Vec<Vec<f64>>,
    /// Fractional Rabi error on the controls.
    pub xi: f64,
    /// Fractional Rabi error on the target.
    pub zeta: f64,
}

/// Cs reference values.
pub mod cesium {
    use super::MHZ_TO_RAD_PER_US;

    /// Ω0/2π = 44 MHz.
    pub const OMEGA_0: f64 = 44.0 * MHZ_TO_RAD_PER_US;
    /// 126S lifetime, μs.
    pub const RYDBERG_LIFETIME_US: f64 = 540.0;
    /// 7P3/2 lifetime, μs.
    pub const E1_LIFETIME_US: f64 = 0.137_54;
    /// 7P1/2 lifetime, μs.
    pub const E2_LIFETIME_US: f64 = 0.165_21;
    pub const PRINCIPAL_N: u32 = 126;
    pub const SEPARATION_UM: f64 = 6.0;
}

impl PhysicsParams {
    /// Cs parameters with blockade shifts taken from `geometry`.
    pub fn cesium(geometry: &Geometry) -> Result<Self> {
        let omega_0 = cesium::OMEGA_0;
        let params = Self {
            omega_0,
            omega_r: omega_0,
            omega_c: 3.0 * omega_0,
            delta: 0.0,
            gamma_phase: PI,
            gamma_r: 1.0 / cesium::RYDBERG_LIFETIME_US,
            gamma_big_r: 1.0 / cesium::RYDBERG_LIFETIME_US,
            gamma_e1: 1.0 / cesium::E1_LIFETIME_US,
            gamma_e2: 1.0 / cesium::E2_LIFETIME_US,
            v_ct: geometry.control_target_couplings()?,
            v_cc: geometry.control_control_couplings()?,
            xi: 0.0,
            zeta: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Cs parameters with the standard preset layout for `n_qubits`.
    pub fn cesium_preset(n_qubits: usize) -> Result<Self> {
        let kind = GeometryKind::for_qubits(n_qubits)?;
        Self::cesium(&preset_geometry(kind, cesium::SEPARATION_UM, cesium::PRINCIPAL_N)?)
    }

    pub fn n_controls(&self) -> usize {
        self.v_ct.len()
    }

    /// Same parameters with every decay rate set to zero.
    pub fn without_decay(mut self) -> Self {
        self.gamma_r = 0.0;
        self.gamma_big_r = 0.0;
        self.gamma_e1 = 0.0;
        self.gamma_e2 = 0.0;
        self
    }

    /// Replace every control–target shift by `v`.
    pub fn with_uniform_blockade(mut self, v: f64) -> Self {
        self.v_ct.iter_mut().for_each(|x| *x = v);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_0", self.omega_0),
            ("omega_r", self.omega_r),
            ("omega_c", self.omega_c),
            ("delta", self.delta),
            ("gamma_phase", self.gamma_phase),
            ("xi", self.xi),
            ("zeta", self.zeta),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if !(self.omega_0 > 0.0) {
            return Err(Error::invalid("omega_0", "must be positive"));
        }
        if !(self.omega_r > 0.0) {
            return Err(Error::invalid("omega_r", "must be positive"));
        }
        if self.omega_c < 0.0 {
            return Err(Error::invalid("omega_c", "must be non-negative"));
        }
        let rates = [
            ("gamma_r", self.gamma_r),
            ("gamma_big_r", self.gamma_big_r),
            ("gamma_e1", self.gamma_e1),
            ("gamma_e2", self.gamma_e2),
        ];
        for (name, rate) in rates {
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(Error::invalid(name, "decay rates must be finite and >= 0"));
            }
        }
        if self.v_ct.is_empty() {
            return Err(Error::invalid("v_ct", "need at least one control"));
        }
        if self.v_ct.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("v_ct", "blockade shifts must be finite and >= 0"));
        }
        let n = self.v_ct.len();
        if self.v_cc.len() != n || self.v_cc.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("v_cc", format!("must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if !self.v_cc[i][j].is_finite() || (self.v_cc[i][j] - self.v_cc[j][i]).abs() > 0.0 {
                    return Err(Error::invalid("v_cc", "must be finite and symmetric"));
                }
            }
        }
        if (1.0 + self.xi) < 0.0 || (1.0 + self.zeta) < 0.0 {
            return Err(Error::invalid("xi/zeta", "Rabi error fractions must exceed -1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{C64, ONE, ZERO};

    #[test]
    fn c6_examples() {
        assert!((c6_atomic_units(1).unwrap() - 10.01293).abs() < 1e-12);
        let c6 = c6_atomic_units(126).unwrap();
        let bracket: f64 = 10.64 - 0.6294 * 126.0 + 2.33e-3 * 126.0 * 126.0;
        assert!((bracket + 31.6733).abs() < 1e-3);
        assert!((c6 / -4.024e24 - 1.0).abs() < 1e-3, "C6(126) = {c6:e}");
        assert!(c6_atomic_units(0).is_err());
    }

    #[test]
    fn c6_magnitude_grows_over_100_to_150() {
        let mags: Vec<f64> = (100..=150).map(|n| c6_atomic_units(n).unwrap().abs()).collect();
        assert!(mags.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn atomic_unit_conversion() {
        assert_eq!(c6_to_freq_units(0.0), 0.0);
        assert!((c6_to_freq_units(1.0) / 1.44482e-19 - 1.0).abs() < 1e-5);
        let ghz = c6_to_freq_units(c6_atomic_units(126).unwrap()).abs();
        assert!((ghz / 5.814e5 - 1.0).abs() < 1e-3, "|C6| = {ghz} GHz um^6");
    }

    #[test]
    fn blockade_at_six_microns_is_about_94_omega_c() {
        let omega_c = 3.0 * cesium::OMEGA_0;
        let ratio = interaction_strength(6.0, 126).unwrap() / omega_c;
        assert!((ratio - 94.4).abs() < 0.2, "V/Ωc = {ratio}");
        let far = interaction_strength(12.0, 126).unwrap() / omega_c;
        assert!((far - ratio / 64.0).abs() < 1e-9);
        assert!(interaction_strength(0.0, 126).is_err());
        assert!(interaction_strength(-1.0, 126).is_err());
    }

    #[test]
    fn composite_dimensions() {
        let s = CompositeSpace::new(1).unwrap();
        assert_eq!((s.dim(), s.computational_dim()), (18, 4));
        let s = CompositeSpace::new(3).unwrap();
        assert_eq!((s.dim(), s.computational_dim()), (162, 16));
        assert!(CompositeSpace::new(0).is_err());
    }

    #[test]
    fn rydberg_projector_on_first_control() {
        let s = CompositeSpace::new(2).unwrap();
        let mut proj = ComplexMatrix::zeros(3, 3);
        proj[(2, 2)] = ONE;
        let embedded = s.embed_single_atom_op(0, &proj).unwrap();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let expected = if i == j && s.control_level(i, 0) == ControlLevel::Rydberg { ONE } else { ZERO };
                assert_eq!(embedded[(i, j)], expected);
            }
        }
    }

    #[test]
    fn embedding_rejects_wrong_dimension() {
        let s = CompositeSpace::new(1).unwrap();
        assert!(s.embed_single_atom_op(0, &ComplexMatrix::identity(6)).is_err());
        assert!(s.embed_single_atom_op(1, &ComplexMatrix::identity(3)).is_err());
        assert!(s.embed_single_atom_op(2, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn computational_basis_ordering() {
        let s = CompositeSpace::new(1).unwrap();
        let idx = s.computational_embedding();
        let expected = [
            s.index(&[ControlLevel::Zero], TargetLevel::A),
            s.index(&[ControlLevel::Zero], TargetLevel::B),
            s.index(&[ControlLevel::One], TargetLevel::A),
            s.index(&[ControlLevel::One], TargetLevel::B),
        ];
        assert_eq!(idx, expected);
        for n in 1..=3 {
            let idx = CompositeSpace::new(n).unwrap().computational_embedding();
            assert!(idx.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn preset_distances() {
        let pair = preset_geometry(GeometryKind::Pair, 6.0, 126).unwrap();
        assert_eq!(pair.control_target_distances(), vec![6.0]);

        let chain = preset_geometry(GeometryKind::Chain3, 6.0, 126).unwrap();
        assert!((chain.control_control_distances()[0][1] - 12.0).abs() < 1e-12);
        assert!(chain.control_target_distances().iter().all(|d| (d - 6.0).abs() < 1e-12));

        let star = preset_geometry(GeometryKind::Star4, 6.0, 126).unwrap();
        let cc = star.control_control_distances();
        for (i, row) in cc.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                if i != j {
                    assert!((d - 6.0 * 3f64.sqrt()).abs() < 1e-12);
                }
            }
        }
        assert!("hexagon".parse::<GeometryKind>().is_err());
        assert!(preset_geometry(GeometryKind::Pair, 0.0, 126).is_err());
    }

    #[test]
    fn control_control_couplings_respect_flag() {
        let mut chain = preset_geometry(GeometryKind::Chain3, 6.0, 126).unwrap();
        assert!(chain.control_control_couplings().unwrap().iter().flatten().all(|&v| v == 0.0));
        chain.include_cc = true;
        let vcc = chain.control_control_couplings().unwrap();
        let omega_c = 3.0 * cesium::OMEGA_0;
        assert!((vcc[0][1] / omega_c - 94.4 / 64.0).abs() < 0.01);
        assert_eq!(vcc[0][0], 0.0);
    }

    #[test]
    fn cesium_defaults_validate() {
        let p = PhysicsParams::cesium_preset(2).unwrap();
        assert_eq!(p.n_controls(), 1);
        assert!((p.gamma_e1 - 1.0 / 0.13754).abs() < 1e-12);
        let mut bad = p.clone();
        bad.gamma_e1 = -1.0;
        assert!(bad.validate().is_err());
        let mut bad = p;
        bad.omega_0 = C64::from(0.0).re;
        assert!(bad.validate().is_err());
    }
}
