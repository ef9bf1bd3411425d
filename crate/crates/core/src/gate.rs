//! Ideal gates, extraction of the realised channel on the computational
//! subspace, and the average gate fidelity.
//!
//! The extracted map is the full evolution projected onto the computational
//! subspace. Population that leaks out of it (decay, residual Rydberg or
//! intermediate-state occupation) is simply missing from the output, so the
//! map is trace-decreasing and leakage counts as infidelity.

use rayon::prelude::*;

use crate::atom::PhysicsParams;
use crate::dynamics::{Block, IntegratorConfig, Protocol};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianSpec;
use crate::numerics::{kron_power, paulis, ComplexMatrix, C64, ZERO};
use crate::pulse::{build_schedule, PulseSchedule, DEFAULT_DELTA_FRAC, DEFAULT_SIGMA_FRAC};

/// Diagonal target unitary on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct IdealGate {
    unitary: ComplexMatrix,
}

impl IdealGate {
    pub fn new(unitary: ComplexMatrix) -> Result<Self> {
        if !unitary.is_square() {
            return Err(Error::NotSquare { rows: unitary.rows(), cols: unitary.cols() });
        }
        let d = unitary.rows();
        let defect = (&unitary.matmul(&unitary.dagger())? - &ComplexMatrix::identity(d)).max_abs();
        if defect > 1e-10 {
            return Err(Error::invalid("unitary", format!("not unitary, |UU† − I| = {defect:e}")));
        }
        Ok(Self { unitary })
    }

    pub fn d(&self) -> usize {
        self.unitary.rows()
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        Self { unitary: self.unitary.scale(C64::cis(theta)) }
    }
}

/// `diag(1, e^{iΓ}, …, e^{iΓ})`: every computational state except
/// `|0…0⟩|A⟩` picks up the geometric phase.
pub fn ideal_gate(n_qubits: usize, gamma: f64) -> Result<IdealGate> {
    if n_qubits < 2 {
        return Err(Error::invalid("n_qubits", "the gate needs at least two qubits"));
    }
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma", "must be finite"));
    }
    let d = 1usize << n_qubits;
    let mut diag = vec![C64::cis(gamma); d];
    diag[0] = C64::from(1.0);
    IdealGate::new(ComplexMatrix::diagonal(&diag))
}

/// Linear map on `d × d` matrices as a `d² × d²` superoperator acting on
/// column-stacked vectors, `vec(A)[i + j·d] = A_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct GateChannel {
    d: usize,
    superop: ComplexMatrix,
}

impl GateChannel {
    pub fn from_superop(d: usize, superop: ComplexMatrix) -> Result<Self> {
        if superop.rows() != d * d || superop.cols() != d * d {
            return Err(Error::ShapeMismatch(format!(
                "superoperator is {}x{}, expected {}x{}",
                superop.rows(),
                superop.cols(),
                d * d,
                d * d
            )));
        }
        Ok(Self { d, superop })
    }

    /// Build from the images of the matrix units, `image(m, n) = E(|m⟩⟨n|)`.
    pub fn from_unit_images(d: usize, image: impl Fn(usize, usize) -> Result<ComplexMatrix>) -> Result<Self> {
        let mut superop = ComplexMatrix::zeros(d * d, d * d);
        for n in 0..d {
            for m in 0..d {
                let out = image(m, n)?;
                if out.rows() != d || out.cols() != d {
                    return Err(Error::ShapeMismatch("unit image has the wrong size".into()));
                }
                for (k, v) in out.vectorize().into_iter().enumerate() {
                    superop[(k, m + n * d)] = v;
                }
            }
        }
        Self::from_superop(d, superop)
    }

    pub fn identity(d: usize) -> Self {
        Self { d, superop: ComplexMatrix::identity(d * d) }
    }

    /// `ρ ↦ U ρ U†`.
    pub fn unitary_conjugation(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
        }
        // vec(U X U†) = (conj(U) ⊗ U) vec(X) for column stacking
        let conj_u = ComplexMatrix::from_fn(u.rows(), u.cols(), |i, j| u.get(i, j).conj());
        Self::from_superop(u.rows(), conj_u.kron(u))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn superop(&self) -> &ComplexMatrix {
        &self.superop
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.d || x.cols() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "input is {}x{}, channel acts on {}x{}",
                x.rows(),
                x.cols(),
                self.d,
                self.d
            )));
        }
        let v = x.vectorize();
        let n = self.d * self.d;
        let out: Vec<C64> = (0..n).map(|r| (0..n).map(|c| self.superop.get(r, c) * v[c]).sum()).collect();
        ComplexMatrix::from_column_stacked(self.d, self.d, &out)
    }
}

/// All `d²` tensor products of `{I, X, Y, Z}`.
pub fn pauli_basis(n_qubits: usize) -> Vec<ComplexMatrix> {
    let singles = paulis();
    let mut basis = vec![ComplexMatrix::identity(1)];
    for _ in 0..n_qubits {
        basis = basis.iter().flat_map(|b| singles.iter().map(move |p| b.kron(p))).collect();
    }
    basis
}

fn qubit_count(d: usize) -> Result<usize> {
    if d < 2 || !d.is_power_of_two() {
        return Err(Error::invalid("d", format!("dimension {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

/// `[Σ_j Tr(U P_j† U† E(P_j)) + d²] / [d²(d+1)]` over the Pauli basis.
pub fn average_fidelity(channel: &GateChannel, ideal: &IdealGate) -> Result<f64> {
    let d = channel.d();
    if ideal.d() != d {
        return Err(Error::ShapeMismatch(format!("channel has d = {d}, ideal gate d = {}", ideal.d())));
    }
    let n = qubit_count(d)?;
    let u = ideal.unitary();
    let u_dag = u.dagger();
    let mut sum = ZERO;
    for p in pauli_basis(n) {
        let target = u.matmul(&p)?.matmul(&u_dag)?;
        sum += target.frobenius_inner(&channel.apply(&p)?)?;
    }
    let d2 = (d * d) as f64;
    Ok((sum.re + d2) / (d2 * (d as f64 + 1.0)))
}

/// Closed form for a unitary channel `V`: `(d + |Tr(U†V)|²) / (d² + d)`.
pub fn unitary_average_fidelity(ideal: &ComplexMatrix, actual: &ComplexMatrix) -> Result<f64> {
    let d = ideal.rows() as f64;
    let overlap = ideal.frobenius_inner(actual)?;
    Ok((d + overlap.norm_sqr()) / (d * d + d))
}

/// Permutations of the controls that leave every blockade shift unchanged.
/// Drives and decay act identically on all controls, so these commute with
/// the whole evolution.
pub fn control_symmetries(physics: &PhysicsParams) -> Vec<Vec<usize>> {
    let n = physics.n_controls();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    permutations(n)
        .into_iter()
        .filter(|p| {
            (0..n).all(|k| close(physics.v_ct[p[k]], physics.v_ct[k]))
                && (0..n).all(|i| (0..n).all(|j| close(physics.v_cc[p[i]][p[j]], physics.v_cc[i][j])))
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Computational index after moving control `k` to position `perm[k]`.
fn permute_controls(index: usize, perm: &[usize], n_qubits: usize) -> usize {
    let bit = |k: usize| n_qubits - 1 - k;
    let mut out = index & 1;
    for (k, &to) in perm.iter().enumerate() {
        out |= ((index >> bit(k)) & 1) << bit(to);
    }
    out
}

/// Evolve every matrix unit of the computational subspace through the
/// protocol and project back.
///
/// Only `m ≤ n` is propagated, since the image of `|n⟩⟨m|` is the adjoint of
/// the image of `|m⟩⟨n|`. Units related by a control permutation that
/// commutes with the dynamics share one propagation.
pub fn extract_channel(protocol: &Protocol) -> Result<GateChannel> {
    extract_with_group(protocol, control_symmetries(&protocol.spec().physics))
}

/// As [`extract_channel`] but propagating every unit with `m ≤ n`.
pub fn extract_channel_exhaustive(protocol: &Protocol) -> Result<GateChannel> {
    let n = protocol.spec().space.n_controls();
    extract_with_group(protocol, vec![(0..n).collect()])
}

fn extract_with_group(protocol: &Protocol, group: Vec<Vec<usize>>) -> Result<GateChannel> {
    let space = protocol.spec().space;
    let n_qubits = space.n_qubits();
    let embed = space.computational_embedding();
    let d = embed.len();

    // for every pair: (representative, permutation, adjoint needed)
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let mut plan = Vec::new();
    for n in 0..d {
        for m in 0..=n {
            let (rep, perm, swapped) = group
                .iter()
                .map(|p| {
                    let (a, b) = (permute_controls(m, p, n_qubits), permute_controls(n, p, n_qubits));
                    if a <= b {
                        ((a, b), p, false)
                    } else {
                        ((b, a), p, true)
                    }
                })
                .min_by_key(|x| x.0)
                .expect("group contains the identity");
            let id = reps.iter().position(|&r| r == rep).unwrap_or_else(|| {
                reps.push(rep);
                reps.len() - 1
            });
            plan.push(((m, n), id, perm.clone(), swapped));
        }
    }

    let images: Vec<ComplexMatrix> = reps
        .par_iter()
        .map(|&(m, n)| {
            let mut block = Block::unit(space.dim(), embed[m], embed[n]);
            protocol.evolve(&mut block)?;
            Ok(ComplexMatrix::from_fn(d, d, |i, j| block.get(embed[i], embed[j])))
        })
        .collect::<Result<_>>()?;

    let mut superop = ComplexMatrix::zeros(d * d, d * d);
    for ((m, n), id, perm, swapped) in plan {
        let rep = &images[id];
        let p: Vec<usize> = (0..d).map(|i| permute_controls(i, &perm, n_qubits)).collect();
        let image =
            ComplexMatrix::from_fn(d, d, |i, j| if swapped { rep.get(p[j], p[i]).conj() } else { rep.get(p[i], p[j]) });
        for (k, v) in image.vectorize().into_iter().enumerate() {
            superop[(k, m + n * d)] = v;
        }
        if m != n {
            for (k, v) in image.dagger().vectorize().into_iter().enumerate() {
                superop[(k, n + m * d)] = v;
            }
        }
    }
    GateChannel::from_superop(d, superop)
}

/// Everything needed to simulate the gate at a given duration.
#[derive(Clone, Debug, PartialEq)]
pub struct GateConfig {
    pub physics: PhysicsParams,
    pub sigma_frac: f64,
    pub delta_frac: f64,
    pub manifold_isolation: bool,
    pub integrator: IntegratorConfig,
}

impl GateConfig {
    /// Cs parameters and the default pulse shape for the preset geometry.
    pub fn cesium(n_qubits: usize) -> Result<Self> {
        Ok(Self {
            physics: PhysicsParams::cesium_preset(n_qubits)?,
            sigma_frac: DEFAULT_SIGMA_FRAC,
            delta_frac: DEFAULT_DELTA_FRAC,
            manifold_isolation: true,
            integrator: IntegratorConfig::default(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.physics.n_controls() + 1
    }

    pub fn schedule(&self, total_time: f64) -> Result<PulseSchedule> {
        let p = &self.physics;
        build_schedule(p.omega_0, p.omega_r, p.gamma_phase, total_time, self.sigma_frac, self.delta_frac)
    }

    pub fn spec(&self, total_time: f64) -> Result<HamiltonianSpec> {
        HamiltonianSpec::new(self.physics.clone(), self.schedule(total_time)?, self.manifold_isolation)
    }

    /// Protocol with the decay channels implied by the physical rates.
    pub fn protocol(&self, total_time: f64) -> Result<Protocol> {
        Protocol::with_standard_decay(self.spec(total_time)?, self.integrator.clone())
    }

    pub fn ideal(&self) -> Result<IdealGate> {
        ideal_gate(self.n_qubits(), self.physics.gamma_phase)
    }
}

/// Average fidelity of the simulated gate of duration `total_time`.
pub fn gate_fidelity(config: &GateConfig, total_time: f64) -> Result<f64> {
    let channel = extract_channel(&config.protocol(total_time)?)?;
    average_fidelity(&channel, &config.ideal()?)
}

/// `kron_power` of a single-qubit gate, convenient for building test channels.
pub fn tensor_power(gate: &ComplexMatrix, n: usize) -> ComplexMatrix {
    kron_power(gate, n)
}
