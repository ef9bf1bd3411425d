//! Density-matrix Grover search for the all-ones state, with oracle and
//! diffusion both built from the phase-gate channel.
//!
//! The gate `G = diag(1, −1, …, −1)` equals `2|0…0⟩⟨0…0| − I`, so
//! `H^⊗n G H^⊗n` is the diffusion operator and `X^⊗n G X^⊗n` is the
//! all-ones oracle up to a global sign. Only the multi-qubit gate is noisy;
//! `H` and `X` are exact.

use rayon::prelude::*;

use crate::analysis::SweepResult;
use crate::error::{Error, Result};
use crate::gate::{extract_channel, ideal_gate, GateChannel, GateConfig};
use crate::numerics::{kron_power, ComplexMatrix, C64};

#[derive(Clone, Debug)]
pub struct GroverConfig {
    pub n_qubits: usize,
    pub iterations: usize,
    /// `None` uses the exact `diag(1, −1, …, −1)`.
    pub channel: Option<GateChannel>,
}

impl GroverConfig {
    /// Exact gate at the optimal iteration count.
    pub fn ideal(n_qubits: usize) -> Result<Self> {
        Ok(Self { n_qubits, iterations: optimal_iterations(n_qubits)?, channel: None })
    }

    pub fn with_channel(n_qubits: usize, channel: GateChannel) -> Result<Self> {
        Ok(Self { n_qubits, iterations: optimal_iterations(n_qubits)?, channel: Some(channel) })
    }
}

/// `round(π/(4θ) − 1/2)` with `sin θ = 2^{−n/2}`.
pub fn optimal_iterations(n_qubits: usize) -> Result<usize> {
    if n_qubits < 2 {
        return Err(Error::invalid("n_qubits", "Grover search needs at least two qubits"));
    }
    let theta = (0.5f64).powf(n_qubits as f64 / 2.0).asin();
    Ok((std::f64::consts::FRAC_PI_4 / theta - 0.5).round() as usize)
}

/// Exact success probability `sin²((2k+1)θ)`.
pub fn ideal_success_probability(n_qubits: usize, iterations: usize) -> f64 {
    let theta = (0.5f64).powf(n_qubits as f64 / 2.0).asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

fn hadamard() -> ComplexMatrix {
    let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    ComplexMatrix::new(2, 2, vec![s, s, s, -s]).expect("2x2")
}

fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![C64::from(0.0), C64::from(1.0), C64::from(1.0), C64::from(0.0)]).expect("2x2")
}

fn conjugate(u: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.matmul(rho)?.matmul(&u.dagger())
}

/// Populations of every computational state after the search.
pub fn grover_distribution(cfg: &GroverConfig) -> Result<Vec<f64>> {
    let n = cfg.n_qubits;
    if n < 2 {
        return Err(Error::invalid("n_qubits", "Grover search needs at least two qubits"));
    }
    let d = 1usize << n;
    let channel = match &cfg.channel {
        Some(c) if c.d() != d => {
            return Err(Error::ShapeMismatch(format!("channel acts on d = {}, search on {n} qubits", c.d())))
        }
        Some(c) => c.clone(),
        None => GateChannel::unitary_conjugation(ideal_gate(n, std::f64::consts::PI)?.unitary())?,
    };
    let h = kron_power(&hadamard(), n);
    let x = kron_power(&pauli_x(), n);

    let mut rho = ComplexMatrix::unit(d, 0, 0);
    rho = conjugate(&h, &rho)?;
    for _ in 0..cfg.iterations {
        rho = conjugate(&x, &channel.apply(&conjugate(&x, &rho)?)?)?;
        rho = conjugate(&h, &channel.apply(&conjugate(&h, &rho)?)?)?;
    }
    Ok((0..d).map(|i| rho.get(i, i).re).collect())
}

/// Probability of finding `|1…1⟩`.
pub fn run_grover(cfg: &GroverConfig) -> Result<f64> {
    Ok(*grover_distribution(cfg)?.last().expect("d ≥ 4"))
}

/// Success probability at the optimal iteration count with the simulated
/// gate at each duration.
pub fn grover_vs_gate_time(config: &GateConfig, times: &[f64]) -> Result<SweepResult> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("total_time", "grid must be non-empty and finite"));
    }
    let n = config.n_qubits();
    let ideal = run_grover(&GroverConfig::ideal(n)?)?;
    let rows = times
        .par_iter()
        .map(|&t| {
            let channel = extract_channel(&config.protocol(t)?)?;
            Ok(vec![t, run_grover(&GroverConfig::with_channel(n, channel)?)?, ideal])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { columns: vec!["total_time_us".into(), "success_probability".into(), "ideal".into()], rows })
}
