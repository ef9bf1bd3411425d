//! Time-dependent Hamiltonians of the composite system.
//!
//! Step 1 drives `|1> <-> |r>` on every control, step 2 runs the two
//! double-STIRAP sequences on the target, step 3 repeats the control pulse with
//! opposite sign. The blockade term `V |r><r| ⊗ |R><R|` is on throughout.
//!
//! The Stokes field enters as `(Ω's/2)|e_i><C| + h.c.`; with this placement
//! `Ω's|A> − Ωp|C>` is an exact zero-energy eigenvector for any Stokes phase,
//! and a Stokes phase drop `Γ` returns `|A>` as `e^{iΓ}|A>`.

use std::sync::Arc;

use crate::atom::{CompositeSpace, ControlLevel, PhysicsParams, TargetLevel, CONTROL_LEVELS, TARGET_LEVELS};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, SparseMatrix, C64, ONE, ZERO};
use crate::pulse::{dstirap_pump, dstirap_stokes, soft_pi_amplitude, PulseSchedule, PulseSign};

/// Target sub-manifold that carries the qubit state `|A>` or `|B>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Manifold {
    A,
    B,
}

/// Which Stokes couplings are switched on during step 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Both `C <-> e1` and `C <-> e2`.
    Both,
    /// Only the coupling belonging to this manifold.
    Only(Manifold),
}

impl Branch {
    fn stokes_a(self) -> bool {
        matches!(self, Branch::Both | Branch::Only(Manifold::A))
    }

    fn stokes_b(self) -> bool {
        matches!(self, Branch::Both | Branch::Only(Manifold::B))
    }
}

#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    pub space: CompositeSpace,
    pub physics: PhysicsParams,
    pub schedule: PulseSchedule,
    /// Drive the `A` and `B` Raman manifolds as independent branches.
    pub manifold_isolation: bool,
}

impl HamiltonianSpec {
    pub fn new(physics: PhysicsParams, schedule: PulseSchedule, manifold_isolation: bool) -> Result<Self> {
        physics.validate()?;
        let space = CompositeSpace::new(physics.n_controls())?;
        Ok(Self { space, physics, schedule, manifold_isolation })
    }

    pub fn branches(&self) -> Vec<Branch> {
        if self.manifold_isolation {
            vec![Branch::Only(Manifold::A), Branch::Only(Manifold::B)]
        } else {
            vec![Branch::Both]
        }
    }

    /// Branch that evolves a basis state: `|B>` and `|e2>` belong to the B
    /// manifold, every other target level to A.
    pub fn branch_of(&self, index: usize) -> Branch {
        if !self.manifold_isolation {
            return Branch::Both;
        }
        match self.space.target_level(index) {
            TargetLevel::B | TargetLevel::E2 => Branch::Only(Manifold::B),
            _ => Branch::Only(Manifold::A),
        }
    }
}

/// `H(t) = H_static + Σ_k [c_k(t) M_k + conj(c_k(t)) M_k†]`.
///
/// Keeping the operators sparse and the time dependence in scalar
/// coefficients makes each right-hand-side evaluation cost `O(nnz · dim)`.
/// Writes the drive coefficients at time `t` into the output slice.
pub type Coefficients = Arc<dyn Fn(f64, &mut [C64]) + Send + Sync>;

#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    dim: usize,
    static_part: SparseMatrix,
    drives: Vec<SparseMatrix>,
    drives_dag: Vec<SparseMatrix>,
    coefficients: Coefficients,
}

impl std::fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeDependentHamiltonian")
            .field("dim", &self.dim)
            .field("static_nnz", &self.static_part.nnz())
            .field("drives", &self.drives.len())
            .finish()
    }
}

impl TimeDependentHamiltonian {
    /// `static_part` must be Hermitian; `drives[k]` is paired with the k-th
    /// coefficient written by `coefficients(t, out)`.
    pub fn new(static_part: SparseMatrix, drives: Vec<SparseMatrix>, coefficients: Coefficients) -> Result<Self> {
        let dim = static_part.rows();
        if static_part.cols() != dim || drives.iter().any(|d| d.rows() != dim || d.cols() != dim) {
            return Err(Error::ShapeMismatch("all Hamiltonian terms must be square and equal size".into()));
        }
        let defect = static_part.to_dense().hermiticity_defect()?;
        if defect > 1e-12 * static_part.to_dense().max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation: defect, tolerance: 1e-12 });
        }
        let drives_dag = drives.iter().map(SparseMatrix::dagger).collect();
        Ok(Self { dim, static_part, drives, drives_dag, coefficients })
    }

    /// A time-independent Hamiltonian.
    pub fn constant(h: &ComplexMatrix) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
        }
        Self::new(SparseMatrix::from_dense(h), Vec::new(), Arc::new(|_, _| {}))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_drives(&self) -> usize {
        self.drives.len()
    }

    pub fn static_part(&self) -> &SparseMatrix {
        &self.static_part
    }

    pub fn drives(&self) -> &[SparseMatrix] {
        &self.drives
    }

    pub fn drives_dag(&self) -> &[SparseMatrix] {
        &self.drives_dag
    }

    pub fn coefficients_into(&self, t: f64, out: &mut [C64]) {
        (self.coefficients)(t, out)
    }

    pub fn at(&self, t: f64) -> ComplexMatrix {
        let mut coeffs = vec![ZERO; self.drives.len()];
        self.coefficients_into(t, &mut coeffs);
        let mut h = self.static_part.to_dense();
        for ((m, md), c) in self.drives.iter().zip(&self.drives_dag).zip(&coeffs) {
            for &(i, j, v) in m.entries() {
                h[(i, j)] += c * v;
            }
            for &(i, j, v) in md.entries() {
                h[(i, j)] += c.conj() * v;
            }
        }
        h
    }

    /// Every index pair that some term can connect.
    pub(crate) fn pattern(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.static_part
            .entries()
            .iter()
            .chain(self.drives.iter().flat_map(|d| d.entries()))
            .chain(self.drives_dag.iter().flat_map(|d| d.entries()))
            .map(|&(i, j, _)| (i, j))
    }

    /// Restriction to an index subset closed under every term.
    pub(crate) fn restrict(&self, local: &[Option<usize>], dim: usize) -> Self {
        Self {
            dim,
            static_part: self.static_part.restrict(local, dim),
            drives: self.drives.iter().map(|d| d.restrict(local, dim)).collect(),
            drives_dag: self.drives_dag.iter().map(|d| d.restrict(local, dim)).collect(),
            coefficients: Arc::clone(&self.coefficients),
        }
    }
}

fn control_unit(a: ControlLevel, b: ControlLevel) -> SparseMatrix {
    SparseMatrix::from_triplets(CONTROL_LEVELS, CONTROL_LEVELS, vec![(a.index(), b.index(), ONE)])
}

fn target_unit(a: TargetLevel, b: TargetLevel) -> SparseMatrix {
    SparseMatrix::from_triplets(TARGET_LEVELS, TARGET_LEVELS, vec![(a.index(), b.index(), ONE)])
}

fn sum_sparse(dim: usize, parts: impl IntoIterator<Item = SparseMatrix>) -> SparseMatrix {
    let entries = parts.into_iter().flat_map(|p| p.entries().to_vec()).collect();
    SparseMatrix::from_triplets(dim, dim, entries)
}

/// `Σ_k |1><r|_k` over all controls.
fn control_raising(space: &CompositeSpace) -> SparseMatrix {
    let op = control_unit(ControlLevel::One, ControlLevel::Rydberg);
    sum_sparse(space.dim(), (0..space.n_controls()).map(|k| space.embed_sparse(k, &op).expect("valid control op")))
}

fn target_op(space: &CompositeSpace, a: TargetLevel, b: TargetLevel) -> SparseMatrix {
    space.embed_sparse(space.n_controls(), &target_unit(a, b)).expect("valid target op")
}

/// Blockade shifts, diagonal in the product basis.
fn interaction_sparse(spec: &HamiltonianSpec) -> SparseMatrix {
    let space = &spec.space;
    let n = space.n_controls();
    let mut entries = Vec::new();
    for idx in 0..space.dim() {
        let excited: Vec<usize> = (0..n).filter(|&k| space.control_level(idx, k) == ControlLevel::Rydberg).collect();
        let mut shift = 0.0;
        if space.target_level(idx) == TargetLevel::R {
            shift += excited.iter().map(|&k| spec.physics.v_ct[k]).sum::<f64>();
        }
        for (a, &i) in excited.iter().enumerate() {
            for &j in &excited[a + 1..] {
                shift += spec.physics.v_cc[i][j];
            }
        }
        if shift != 0.0 {
            entries.push((idx, idx, C64::from(shift)));
        }
    }
    SparseMatrix::from_triplets(space.dim(), space.dim(), entries)
}

pub fn interaction_hamiltonian(spec: &HamiltonianSpec) -> ComplexMatrix {
    interaction_sparse(spec).to_dense()
}

/// Control drive during a π-pulse window, `t` measured from the window start.
pub fn control_hamiltonian(t: f64, spec: &HamiltonianSpec, sign: PulseSign) -> ComplexMatrix {
    let amp = control_coefficient(t, &spec.physics, &spec.schedule, sign);
    let raise = control_raising(&spec.space).scale(C64::from(amp));
    &raise.to_dense() + &raise.dagger().to_dense()
}

fn control_coefficient(t: f64, physics: &PhysicsParams, schedule: &PulseSchedule, sign: PulseSign) -> f64 {
    (1.0 + physics.xi) * 0.5 * soft_pi_amplitude(t, physics.omega_r, schedule.t_pi, sign)
}

/// Drive coefficients for the target in the order
/// `[pump A, pump B, Stokes e1, Stokes e2, coupling e1-R]`.
fn target_coefficients(t: f64, physics: &PhysicsParams, schedule: &PulseSchedule) -> [C64; 5] {
    let scale = 0.5 * (1.0 + physics.zeta);
    let pump = C64::from(scale * dstirap_pump(t, schedule, physics.omega_0));
    let stokes = dstirap_stokes(t, schedule, physics.omega_0) * scale;
    let coupling = C64::from(scale * physics.omega_c);
    [pump, pump, stokes, stokes, coupling]
}

/// Upper halves of the six-level target drive terms, matching
/// `target_coefficients`.
fn target_drive_units(branch: Branch) -> [Option<SparseMatrix>; 5] {
    use TargetLevel::*;
    [
        Some(target_unit(A, E1)),
        Some(target_unit(B, E2)),
        branch.stokes_a().then(|| target_unit(E1, C)),
        branch.stokes_b().then(|| target_unit(E2, C)),
        Some(target_unit(E1, R)),
    ]
}

fn target_drive_ops(space: &CompositeSpace, branch: Branch) -> [Option<SparseMatrix>; 5] {
    target_drive_units(branch)
        .map(|unit| unit.map(|u| space.embed_sparse(space.n_controls(), &u).expect("valid target op")))
}

fn detuning_sparse(space: &CompositeSpace, delta: f64) -> SparseMatrix {
    sum_sparse(space.dim(), [TargetLevel::E1, TargetLevel::E2].map(|e| target_op(space, e, e).scale(C64::from(-delta))))
}

/// Six-level target Hamiltonian during the d-STIRAP window (`t` from window
/// start), including the `−Δ` detuning of both intermediate states.
pub fn target_single_atom_hamiltonian(
    t: f64,
    physics: &PhysicsParams,
    schedule: &PulseSchedule,
    branch: Branch,
) -> ComplexMatrix {
    let coeffs = target_coefficients(t, physics, schedule);
    let mut h = ComplexMatrix::zeros(TARGET_LEVELS, TARGET_LEVELS);
    for (op, c) in target_drive_units(branch).iter().zip(coeffs) {
        for &(i, j, v) in op.iter().flat_map(|op| op.entries()) {
            h[(i, j)] += c * v;
            h[(j, i)] += (c * v).conj();
        }
    }
    for e in [TargetLevel::E1, TargetLevel::E2] {
        h[(e.index(), e.index())] -= C64::from(physics.delta);
    }
    h
}

/// Target Hamiltonian embedded in the composite space.
pub fn target_hamiltonian(t: f64, spec: &HamiltonianSpec, branch: Branch) -> ComplexMatrix {
    let single = target_single_atom_hamiltonian(t, &spec.physics, &spec.schedule, branch);
    spec.space.embed_single_atom_op(spec.space.n_controls(), &single).expect("target operator has six levels")
}

/// Full Hamiltonian at absolute time `t ∈ [0, total_time]`.
pub fn full_hamiltonian(t: f64, spec: &HamiltonianSpec, branch: Branch) -> Result<ComplexMatrix> {
    let [start, s2, s3, end] = spec.schedule.step_boundaries();
    if !(start..=end).contains(&t) {
        return Err(Error::TimeOutOfRange { t, start, end });
    }
    let step = if t < s2 {
        0
    } else if t < s3 {
        1
    } else {
        2
    };
    Ok(protocol_steps(spec, branch)[step].at(t))
}

/// The three protocol steps as sparse time-dependent Hamiltonians in absolute
/// time.
pub fn protocol_steps(spec: &HamiltonianSpec, branch: Branch) -> [TimeDependentHamiltonian; 3] {
    let space = spec.space;
    let interaction = interaction_sparse(spec);
    let [_, s2, s3, _] = spec.schedule.step_boundaries();

    let control_step = |offset: f64, sign: PulseSign| {
        let physics = spec.physics.clone();
        let schedule = spec.schedule.clone();
        TimeDependentHamiltonian::new(
            interaction.clone(),
            vec![control_raising(&space)],
            Arc::new(move |t, out: &mut [C64]| {
                out[0] = C64::from(control_coefficient(t - offset, &physics, &schedule, sign));
            }),
        )
        .expect("consistent control step")
    };

    let target_step = {
        let ops = target_drive_ops(&space, branch);
        let active: Vec<usize> = (0..ops.len()).filter(|&k| ops[k].is_some()).collect();
        let drives = ops.into_iter().flatten().collect();
        let static_part = sum_sparse(space.dim(), [interaction.clone(), detuning_sparse(&space, spec.physics.delta)]);
        let physics = spec.physics.clone();
        let schedule = spec.schedule.clone();
        TimeDependentHamiltonian::new(
            static_part,
            drives,
            Arc::new(move |t, out: &mut [C64]| {
                let all = target_coefficients(t - s2, &physics, &schedule);
                for (slot, &k) in out.iter_mut().zip(&active) {
                    *slot = all[k];
                }
            }),
        )
        .expect("consistent target step")
    };

    [control_step(0.0, PulseSign::Positive), target_step, control_step(s3, PulseSign::Negative)]
}
