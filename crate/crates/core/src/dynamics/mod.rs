//! Schrödinger and Lindblad propagation, and the three-step gate protocol.
//!
//! Every propagation runs on the smallest index subset that is closed under
//! the Hamiltonian and the jump operators, starting from the support of the
//! initial condition. For a computational basis state this removes most of the
//! composite space.

mod kernel;
mod rk;

use crate::atom::{CompositeSpace, ControlLevel, PhysicsParams, TargetLevel, CONTROL_LEVELS, TARGET_LEVELS};
use crate::error::{Error, Result};
use crate::hamiltonian::{protocol_steps, Branch, HamiltonianSpec, TimeDependentHamiltonian};
use crate::numerics::{ComplexMatrix, ComplexVector, SparseMatrix, C64, ZERO};

use kernel::{adjacency, frame_energies, leave_frame, Rhs, Support};
pub use rk::{integrate, IntegrationStats, IntegratorConfig, Method};

#[derive(Clone, Debug)]
pub struct DecayChannel {
    /// Jump operator, already multiplied by the square root of its rate.
    pub operator: SparseMatrix,
    pub label: String,
}

#[derive(Clone, Debug)]
pub struct DecayChannelSet {
    dim: usize,
    channels: Vec<DecayChannel>,
}

impl DecayChannelSet {
    pub fn empty(dim: usize) -> Self {
        Self { dim, channels: Vec::new() }
    }

    pub fn push(&mut self, operator: SparseMatrix, label: impl Into<String>) -> Result<()> {
        if operator.rows() != self.dim || operator.cols() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "jump operator is {}x{}, space has dimension {}",
                operator.rows(),
                operator.cols(),
                self.dim
            )));
        }
        if operator.nnz() > 0 {
            self.channels.push(DecayChannel { operator, label: label.into() });
        }
        Ok(())
    }

    /// Spontaneous-emission channels of the control and target atoms.
    /// Channels with zero rate are left out.
    pub fn standard(space: &CompositeSpace, physics: &PhysicsParams) -> Result<Self> {
        let mut set = Self::empty(space.dim());
        let unit = |levels: usize, to: usize, from: usize, rate: f64| {
            SparseMatrix::from_triplets(levels, levels, vec![(to, from, C64::from(rate.sqrt()))])
        };
        for k in 0..space.n_controls() {
            for to in [ControlLevel::Zero, ControlLevel::One] {
                let op = unit(CONTROL_LEVELS, to.index(), ControlLevel::Rydberg.index(), physics.gamma_r / 2.0);
                set.push(space.embed_sparse(k, &op)?, format!("control{k}: r -> {to:?}"))?;
            }
        }
        let target = space.n_controls();
        let mut push_target = |to: TargetLevel, from: TargetLevel, rate: f64| {
            let op = unit(TARGET_LEVELS, to.index(), from.index(), rate);
            set.push(space.embed_sparse(target, &op)?, format!("target: {from:?} -> {to:?}"))
        };
        push_target(TargetLevel::E1, TargetLevel::R, physics.gamma_big_r)?;
        for to in [TargetLevel::A, TargetLevel::B, TargetLevel::C] {
            push_target(to, TargetLevel::E1, physics.gamma_e1 / 2.0)?;
        }
        for to in [TargetLevel::B, TargetLevel::C] {
            push_target(to, TargetLevel::E2, physics.gamma_e2 / 2.0)?;
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn channels(&self) -> &[DecayChannel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// `Σ_k a_k† a_k`.
    pub fn loss_operator(&self) -> SparseMatrix {
        let mut entries = Vec::new();
        for ch in &self.channels {
            let e = ch.operator.entries();
            for &(i, j, v) in e {
                for &(i2, j2, v2) in e {
                    if i == i2 {
                        entries.push((j, j2, v.conj() * v2));
                    }
                }
            }
        }
        SparseMatrix::from_triplets(self.dim, self.dim, entries)
    }
}

/// A dense matrix living on `rows × cols` index subsets of a larger space.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    rows: Support,
    cols: Support,
    data: Vec<C64>,
}

impl Block {
    fn from_matrix(x: &ComplexMatrix, rows: Support, cols: Support) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in &rows.indices {
            for &j in &cols.indices {
                data.push(x.get(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// `|m><n|`.
    pub(crate) fn unit(dim: usize, m: usize, n: usize) -> Self {
        Self { rows: Support::from_seed(dim, [m]), cols: Support::from_seed(dim, [n]), data: vec![C64::from(1.0)] }
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> C64 {
        match (self.rows.local[i], self.cols.local[j]) {
            (Some(a), Some(b)) => self.data[a * self.cols.len() + b],
            _ => ZERO,
        }
    }

    fn add_into(&self, out: &mut ComplexMatrix) {
        let nb = self.cols.len();
        for (a, &i) in self.rows.indices.iter().enumerate() {
            for (b, &j) in self.cols.indices.iter().enumerate() {
                out[(i, j)] += self.data[a * nb + b];
            }
        }
    }

    fn extend(&mut self, rows: Support, cols: Support) {
        let nb = cols.len();
        let mut data = vec![ZERO; rows.len() * nb];
        let old_nb = self.cols.len();
        for (a, &i) in self.rows.indices.iter().enumerate() {
            let na = rows.local[i].expect("support only grows");
            for (b, &j) in self.cols.indices.iter().enumerate() {
                let nbj = cols.local[j].expect("support only grows");
                data[na * nb + nbj] = self.data[a * old_nb + b];
            }
        }
        *self = Self { rows, cols, data };
    }
}

fn check_span(t0: f64, t1: f64) -> Result<()> {
    if !t0.is_finite() || !t1.is_finite() || t1 < t0 {
        return Err(Error::invalid("t1", format!("need finite t0 <= t1, got {t0} -> {t1}")));
    }
    Ok(())
}

/// Schrödinger evolution `i dψ/dt = H(t)ψ` from `t0` to `t1`.
pub fn propagate_state(
    h: &TimeDependentHamiltonian,
    psi0: &ComplexVector,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<ComplexVector> {
    check_span(t0, t1)?;
    if psi0.dim() != h.dim() {
        return Err(Error::ShapeMismatch(format!("state has dimension {}, Hamiltonian {}", psi0.dim(), h.dim())));
    }
    if (psi0.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::invalid("psi0", format!("state must be normalised, norm = {}", psi0.norm())));
    }
    let mut out = ComplexVector::zeros(h.dim());
    propagate_ket_into(h, psi0.as_slice(), t0, t1, cfg, true, &mut out)?;
    Ok(out)
}

fn propagate_ket_into(
    h: &TimeDependentHamiltonian,
    psi0: &[C64],
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    rotating: bool,
    out: &mut ComplexVector,
) -> Result<IntegrationStats> {
    let dim = h.dim();
    let support = Support::from_seed(dim, (0..dim).filter(|&i| psi0[i] != ZERO)).closure(&adjacency(dim, h.pattern()));
    let local = h.restrict(&support.local, support.len());
    let mut y: Vec<C64> = support.indices.iter().map(|&i| psi0[i]).collect();
    let frame = frame_energies(&local, rotating);
    let mut rhs = Rhs::ket(&local, &frame, t0);
    let stats = integrate(|t, x, dx| rhs.apply(t, x, dx), t0, t1, &mut y, cfg)?;
    leave_frame(&mut y, &frame, None, t1 - t0);
    for (k, &i) in support.indices.iter().enumerate() {
        out[i] += y[k];
    }
    Ok(stats)
}

/// `dX/dt = −i[H(t), X] + Σ_k D[a_k]X` for an arbitrary square `X0`.
pub fn propagate_lindblad(
    h: &TimeDependentHamiltonian,
    channels: &DecayChannelSet,
    x0: &ComplexMatrix,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<ComplexMatrix> {
    propagate_two_sided(h, h, channels, x0, t0, t1, cfg)
}

/// As [`propagate_lindblad`] but with a different Hamiltonian acting from
/// the left and from the right: `dX/dt = −i(H_L X − X H_R) + Σ_k D[a_k]X`.
pub fn propagate_two_sided(
    h_left: &TimeDependentHamiltonian,
    h_right: &TimeDependentHamiltonian,
    channels: &DecayChannelSet,
    x0: &ComplexMatrix,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<ComplexMatrix> {
    check_span(t0, t1)?;
    let dim = h_left.dim();
    if !x0.is_square() {
        return Err(Error::NotSquare { rows: x0.rows(), cols: x0.cols() });
    }
    if x0.rows() != dim || h_right.dim() != dim || channels.dim() != dim {
        return Err(Error::ShapeMismatch(format!(
            "X0 is {}x{}, Hamiltonians {} and {}, channels {}",
            x0.rows(),
            x0.cols(),
            dim,
            h_right.dim(),
            channels.dim()
        )));
    }
    let rows = Support::from_seed(dim, (0..dim).filter(|&i| (0..dim).any(|j| x0.get(i, j) != ZERO)));
    let cols = Support::from_seed(dim, (0..dim).filter(|&j| (0..dim).any(|i| x0.get(i, j) != ZERO)));
    let mut block = Block::from_matrix(x0, rows, cols);
    let loss = channels.loss_operator();
    evolve_block(&mut block, h_left, h_right, channels, &loss, t0, t1, cfg, true)?;
    let mut out = ComplexMatrix::zeros(dim, dim);
    block.add_into(&mut out);
    Ok(out)
}

fn evolution_adjacency(h: &TimeDependentHamiltonian, channels: &DecayChannelSet) -> Vec<Vec<usize>> {
    let jumps = channels.channels().iter().flat_map(|c| c.operator.entries().iter().map(|&(i, j, _)| (i, j)));
    adjacency(h.dim(), h.pattern().chain(jumps))
}

#[allow(clippy::too_many_arguments)]
fn evolve_block(
    block: &mut Block,
    h_left: &TimeDependentHamiltonian,
    h_right: &TimeDependentHamiltonian,
    channels: &DecayChannelSet,
    loss: &SparseMatrix,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    rotating: bool,
) -> Result<IntegrationStats> {
    let rows = block.rows.closure(&evolution_adjacency(h_left, channels));
    let cols = block.cols.closure(&evolution_adjacency(h_right, channels));
    block.extend(rows, cols);
    let (nk, nb) = (block.rows.len(), block.cols.len());
    let left = h_left.restrict(&block.rows.local, nk);
    let right = h_right.restrict(&block.cols.local, nb);
    let jumps: Vec<_> = channels
        .channels()
        .iter()
        .map(|c| (c.operator.restrict(&block.rows.local, nk), c.operator.restrict(&block.cols.local, nb)))
        .filter(|(l, r)| l.nnz() > 0 && r.nnz() > 0)
        .collect();
    let (frame_left, frame_right) = (frame_energies(&left, rotating), frame_energies(&right, rotating));
    let mut rhs = Rhs::two_sided(
        &left,
        &right,
        &loss.restrict(&block.rows.local, nk),
        &loss.restrict(&block.cols.local, nb),
        &jumps,
        &frame_left,
        &frame_right,
        t0,
    );
    let st = integrate(|t, x, dx| rhs.apply(t, x, dx), t0, t1, &mut block.data, cfg)?;
    leave_frame(&mut block.data, &frame_left, Some(&frame_right), t1 - t0);
    Ok(st)
}

/// The gate protocol with its Hamiltonians built once per manifold branch.
#[derive(Clone, Debug)]
pub struct Protocol {
    spec: HamiltonianSpec,
    channels: DecayChannelSet,
    loss: SparseMatrix,
    cfg: IntegratorConfig,
    branches: Vec<(Branch, [TimeDependentHamiltonian; 3])>,
    /// `(t0, t1, step)`; step 2 is split at the Stokes phase jump.
    segments: Vec<(f64, f64, usize)>,
}

impl Protocol {
    pub fn new(spec: HamiltonianSpec, channels: DecayChannelSet, cfg: IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if channels.dim() != spec.space.dim() {
            return Err(Error::ShapeMismatch("decay channels do not match the composite space".into()));
        }
        let branches = spec.branches().into_iter().map(|b| (b, protocol_steps(&spec, b))).collect();
        let [t0, s2, s3, end] = spec.schedule.step_boundaries();
        let jump = s2 + spec.schedule.t_mid;
        let segments = vec![(t0, s2, 0), (s2, jump, 1), (jump, s3, 1), (s3, end, 2)];
        let loss = channels.loss_operator();
        Ok(Self { spec, channels, loss, cfg, branches, segments })
    }

    /// Protocol with the standard decay channels of `spec.physics`.
    pub fn with_standard_decay(spec: HamiltonianSpec, cfg: IntegratorConfig) -> Result<Self> {
        let channels = DecayChannelSet::standard(&spec.space, &spec.physics)?;
        Self::new(spec, channels, cfg)
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    fn steps(&self, branch: Branch) -> &[TimeDependentHamiltonian; 3] {
        &self.branches.iter().find(|(b, _)| *b == branch).expect("branch built at construction").1
    }

    /// Pure-state evolution over the whole gate. Decay channels are ignored.
    pub fn run_state(&self, psi0: &ComplexVector) -> Result<ComplexVector> {
        let dim = self.spec.space.dim();
        if psi0.dim() != dim {
            return Err(Error::ShapeMismatch(format!("state has dimension {}, space {dim}", psi0.dim())));
        }
        let mut out = ComplexVector::zeros(dim);
        for (branch, steps) in &self.branches {
            let mut y: Vec<C64> =
                (0..dim).map(|i| if self.spec.branch_of(i) == *branch { psi0[i] } else { ZERO }).collect();
            if y.iter().all(|&v| v == ZERO) {
                continue;
            }
            for &(t0, t1, step) in &self.segments {
                let mut seg = ComplexVector::zeros(dim);
                propagate_ket_into(&steps[step], &y, t0, t1, &self.cfg, step != 1, &mut seg)?;
                y = seg.into_vec();
            }
            for i in 0..dim {
                out[i] += y[i];
            }
        }
        Ok(out)
    }

    /// Lindblad evolution of an arbitrary square matrix over the whole gate.
    pub fn run_density(&self, x0: &ComplexMatrix) -> Result<ComplexMatrix> {
        let dim = self.spec.space.dim();
        if x0.rows() != dim || x0.cols() != dim {
            return Err(Error::ShapeMismatch(format!("X0 is {}x{}, space {dim}", x0.rows(), x0.cols())));
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (row_branch, _) in &self.branches {
            for (col_branch, _) in &self.branches {
                let rows: Vec<usize> = (0..dim).filter(|&i| self.spec.branch_of(i) == *row_branch).collect();
                let cols: Vec<usize> = (0..dim).filter(|&j| self.spec.branch_of(j) == *col_branch).collect();
                let nonzero = |i: usize, j: usize| x0.get(i, j) != ZERO;
                let row_seed: Vec<usize> =
                    rows.iter().copied().filter(|&i| cols.iter().any(|&j| nonzero(i, j))).collect();
                let col_seed: Vec<usize> =
                    cols.iter().copied().filter(|&j| rows.iter().any(|&i| nonzero(i, j))).collect();
                if row_seed.is_empty() {
                    continue;
                }
                let mut block =
                    Block::from_matrix(x0, Support::from_seed(dim, row_seed), Support::from_seed(dim, col_seed));
                self.evolve(&mut block)?;
                block.add_into(&mut out);
            }
        }
        Ok(out)
    }

    /// Evolve a block whose rows lie in one branch and columns in one branch.
    pub(crate) fn evolve(&self, block: &mut Block) -> Result<IntegrationStats> {
        let row_branch = self.spec.branch_of(block.rows.indices[0]);
        let col_branch = self.spec.branch_of(block.cols.indices[0]);
        debug_assert!(block.rows.indices.iter().all(|&i| self.spec.branch_of(i) == row_branch));
        debug_assert!(block.cols.indices.iter().all(|&j| self.spec.branch_of(j) == col_branch));
        let (left, right) = (self.steps(row_branch), self.steps(col_branch));
        let mut stats = IntegrationStats::default();
        for &(t0, t1, step) in &self.segments {
            stats += evolve_block(
                block,
                &left[step],
                &right[step],
                &self.channels,
                &self.loss,
                t0,
                t1,
                &self.cfg,
                step != 1,
            )?;
        }
        Ok(stats)
    }
}

/// Pure-state run of the whole protocol without decay.
pub fn run_protocol_state(
    spec: &HamiltonianSpec,
    psi0: &ComplexVector,
    cfg: &IntegratorConfig,
) -> Result<ComplexVector> {
    Protocol::new(spec.clone(), DecayChannelSet::empty(spec.space.dim()), cfg.clone())?.run_state(psi0)
}

/// Lindblad run of the whole protocol with the standard decay channels.
pub fn run_protocol_density(
    spec: &HamiltonianSpec,
    x0: &ComplexMatrix,
    cfg: &IntegratorConfig,
) -> Result<ComplexMatrix> {
    Protocol::with_standard_decay(spec.clone(), cfg.clone())?.run_density(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{I, ONE};
    use std::sync::Arc;

    fn two_level(omega: f64) -> TimeDependentHamiltonian {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, omega / 2.0], &[omega / 2.0, 0.0]]).unwrap();
        TimeDependentHamiltonian::constant(&x).unwrap()
    }

    #[test]
    fn constant_rabi_pi_pulse() {
        let omega = 3.7;
        let psi = propagate_state(
            &two_level(omega),
            &ComplexVector::basis(2, 0),
            0.0,
            std::f64::consts::PI / omega,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(psi[0].norm() < 1e-8);
        assert!((psi[1] + I).norm() < 1e-8);
    }

    #[test]
    fn exponential_decay() {
        let gamma: f64 = 2.5;
        let mut ch = DecayChannelSet::empty(2);
        ch.push(SparseMatrix::from_triplets(2, 2, vec![(0, 1, C64::from(gamma.sqrt()))]), "e -> g").unwrap();
        let h = TimeDependentHamiltonian::constant(&ComplexMatrix::zeros(2, 2)).unwrap();
        let rho0 = ComplexMatrix::unit(2, 1, 1);
        for t in [0.1, 0.7, 1.3] {
            let rho = propagate_lindblad(&h, &ch, &rho0, 0.0, t, &IntegratorConfig::default()).unwrap();
            assert!((rho.get(1, 1).re - (-gamma * t).exp()).abs() < 1e-8);
            assert!((rho.trace().unwrap().re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn unitary_limit_matches_state_propagation() {
        let h = TimeDependentHamiltonian::new(
            SparseMatrix::from_dense(&ComplexMatrix::diagonal(&[ZERO, C64::from(0.4), C64::from(-0.3)])),
            vec![SparseMatrix::from_triplets(3, 3, vec![(0, 1, ONE), (1, 2, ONE)])],
            Arc::new(|t: f64, out: &mut [C64]| out[0] = C64::from_polar(1.2 * (-t * t).exp(), 0.3 * t)),
        )
        .unwrap();
        let psi0 = ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO]).unwrap();
        let cfg = IntegratorConfig::default();
        let psi = propagate_state(&h, &psi0, -2.0, 2.0, &cfg).unwrap();
        let rho = propagate_lindblad(&h, &DecayChannelSet::empty(3), &psi0.outer(&psi0), -2.0, 2.0, &cfg).unwrap();
        assert!(rho.approx_eq(&psi.outer(&psi), 1e-7));
    }

    #[test]
    fn loss_operator_of_single_channel() {
        let mut ch = DecayChannelSet::empty(2);
        ch.push(SparseMatrix::from_triplets(2, 2, vec![(0, 1, C64::from(0.5))]), "x").unwrap();
        let g = ch.loss_operator().to_dense();
        assert!(g.approx_eq(&ComplexMatrix::unit(2, 1, 1).scale(C64::from(0.25)), 1e-15));
    }

    #[test]
    fn standard_channels_are_counted() {
        let space = CompositeSpace::new(2).unwrap();
        let physics = PhysicsParams::cesium_preset(3).unwrap();
        let set = DecayChannelSet::standard(&space, &physics).unwrap();
        assert_eq!(set.len(), 2 * 2 + 1 + 3 + 2);
        assert_eq!(DecayChannelSet::standard(&space, &physics.without_decay()).unwrap().len(), 0);
    }

    #[test]
    fn support_closure_follows_edges() {
        let adj = adjacency(4, [(1, 0), (2, 1)].into_iter());
        let s = Support::from_seed(4, [0]).closure(&adj);
        assert_eq!(s.indices, vec![0, 1, 2]);
        let s = Support::from_seed(4, [3]).closure(&adj);
        assert_eq!(s.indices, vec![3]);
    }
}
