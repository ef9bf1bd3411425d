use std::f64::consts::PI;

use dstirap_gate::atom::{ControlLevel, PhysicsParams, TargetLevel};
use dstirap_gate::dynamics::{propagate_state, run_protocol_state, IntegratorConfig};
use dstirap_gate::gate::GateConfig;
use dstirap_gate::hamiltonian::{protocol_steps, target_single_atom_hamiltonian, Branch, HamiltonianSpec, Manifold};
use dstirap_gate::numerics::{kernel_basis, ComplexMatrix, ComplexVector, C64, I, ZERO};
use dstirap_gate::pulse::{build_schedule, DEFAULT_DELTA_FRAC, DEFAULT_SIGMA_FRAC};

const T: f64 = 0.6;

fn spec(n_qubits: usize) -> HamiltonianSpec {
    GateConfig::cesium(n_qubits).unwrap().spec(T).unwrap()
}

fn run_basis(spec: &HamiltonianSpec, controls: &[ControlLevel], target: TargetLevel) -> C64 {
    let i = spec.space.index(controls, target);
    let psi =
        run_protocol_state(spec, &ComplexVector::basis(spec.space.dim(), i), &IntegratorConfig::default()).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-8, "norm {}", psi.norm());
    psi[i]
}

#[test]
fn blocked_branch_returns_unchanged() {
    let a = run_basis(&spec(2), &[ControlLevel::Zero], TargetLevel::A);
    assert!((a - 1.0).norm() < 1e-2, "{a}");
}

#[test]
fn b_states_pick_up_the_phase_for_either_control() {
    let s = spec(2);
    for c in [ControlLevel::Zero, ControlLevel::One] {
        let a = run_basis(&s, &[c], TargetLevel::B);
        assert!((a + 1.0).norm() < 2e-2, "{c:?}: {a}");
    }
}

#[test]
fn three_qubit_phase_pattern() {
    let s = spec(3);
    use ControlLevel::{One, Zero};
    let a = run_basis(&s, &[Zero, Zero], TargetLevel::A);
    assert!((a - 1.0).norm() < 2e-2, "{a}");
    for controls in [[Zero, One], [One, Zero], [One, One]] {
        let a = run_basis(&s, &controls, TargetLevel::A);
        assert!((a + 1.0).norm() < 2e-2, "{controls:?}: {a}");
    }
}

#[test]
fn soft_pi_pulse_and_its_inverse() {
    let s = spec(2);
    let steps = protocol_steps(&s, Branch::Only(Manifold::A));
    let [t0, s2, s3, end] = s.schedule.step_boundaries();
    let cfg = IntegratorConfig::default().tightened(100.0);
    let one = s.space.index(&[ControlLevel::One], TargetLevel::A);
    let ryd = s.space.index(&[ControlLevel::Rydberg], TargetLevel::A);
    let psi = propagate_state(&steps[0], &ComplexVector::basis(s.space.dim(), one), t0, s2, &cfg).unwrap();
    assert!((psi[ryd] + I).norm() < 1e-8);
    let back = propagate_state(&steps[2], &psi, s3, end, &cfg).unwrap();
    assert!((back[one] - 1.0).norm() < 1e-8, "{}", back[one]);
}

#[test]
fn control_zero_is_untouched_by_pi_pulses() {
    let s = spec(2);
    let steps = protocol_steps(&s, Branch::Only(Manifold::A));
    let [t0, s2, _, _] = s.schedule.step_boundaries();
    let zero = s.space.index(&[ControlLevel::Zero], TargetLevel::A);
    let psi =
        propagate_state(&steps[0], &ComplexVector::basis(s.space.dim(), zero), t0, s2, &IntegratorConfig::default())
            .unwrap();
    assert!((psi[zero] - 1.0).norm() < 1e-12);
}

#[test]
fn unnormalised_state_is_rejected() {
    let s = spec(2);
    let steps = protocol_steps(&s, Branch::Both);
    let psi = ComplexVector::basis(s.space.dim(), 0).scale(C64::from(2.0));
    assert!(propagate_state(&steps[0], &psi, 0.0, 0.01, &IntegratorConfig::default()).is_err());
}

/// Unit drives and detuning: `(|A⟩ - |C⟩)/√2` must be dark.
#[test]
fn kernel_of_unit_drive_hamiltonian_contains_a_minus_c() {
    let (a, c, e1, r) =
        (TargetLevel::A.index(), TargetLevel::C.index(), TargetLevel::E1.index(), TargetLevel::R.index());
    let mut h = ComplexMatrix::zeros(6, 6);
    for (i, j) in [(a, e1), (c, e1), (e1, r)] {
        h[(i, j)] = C64::from(0.5);
        h[(j, i)] = C64::from(0.5);
    }
    h[(e1, e1)] = C64::from(-1.0);
    let kernel = kernel_basis(&h, 1e-9).unwrap();
    let mut target = vec![ZERO; 6];
    target[a] = C64::from(0.5f64.sqrt());
    target[c] = C64::from(-(0.5f64.sqrt()));
    let target = ComplexVector::new(target).unwrap();
    let overlap: f64 = kernel.iter().map(|k| k.inner(&target).unwrap().norm_sqr()).sum();
    assert!((overlap - 1.0).abs() < 1e-10, "projection onto kernel = {overlap}");
}

#[test]
fn a_manifold_block_has_two_dark_states() {
    let physics = PhysicsParams::cesium_preset(2).unwrap();
    let sched =
        build_schedule(physics.omega_0, physics.omega_r, PI, T, DEFAULT_SIGMA_FRAC, DEFAULT_DELTA_FRAC).unwrap();
    let idx = [TargetLevel::A.index(), TargetLevel::C.index(), TargetLevel::E1.index(), TargetLevel::R.index()];
    for k in 1..10 {
        let t = sched.t_d * k as f64 / 10.0;
        let h = target_single_atom_hamiltonian(t, &physics, &sched, Branch::Only(Manifold::A)).select(&idx, &idx);
        assert!(kernel_basis(&h, 1e-9).unwrap().len() >= 2, "t = {t}");
    }
}
