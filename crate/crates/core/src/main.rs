use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dstirap_gate::analysis::{self, linspace, SweepResult};
use dstirap_gate::atom::{c6_atomic_units, c6_to_freq_units, interaction_strength, MHZ_TO_RAD_PER_US};
use dstirap_gate::config::RunConfig;
use dstirap_gate::grover::{self, optimal_iterations, GroverConfig};
use dstirap_gate::{Error, Result};

#[derive(Parser)]
#[command(name = "dstirap-gate", version, about = "Double-STIRAP geometric phase gate simulator")]
struct Cli {
    /// TOML config file (or a run manifest); built-in Cs defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps and channel extraction.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Serialize)]
struct Overrides {
    #[arg(long)]
    qubits: Option<usize>,
    /// Gate duration in μs.
    #[arg(long)]
    total_time: Option<f64>,
    #[arg(long)]
    sigma_frac: Option<f64>,
    #[arg(long)]
    delta_frac: Option<f64>,
    #[arg(long)]
    omega_c_mhz: Option<f64>,
    #[arg(long)]
    delta_mhz: Option<f64>,
    /// Switch every decay channel off.
    #[arg(long)]
    no_decay: bool,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// CSV path; the manifest is written next to it.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AmplitudeAxis {
    /// Ωc/Ω0 with the controls in |0⟩.
    OmegaC,
    /// V/Ω0 with the controls in |1⟩.
    V,
}

#[derive(Subcommand)]
enum Command {
    /// C6 coefficient and blockade shift for a Rydberg level and distance.
    C6 {
        #[arg(long, default_value_t = 126)]
        n: u32,
        /// Separation in μm.
        #[arg(long, default_value_t = 6.0)]
        l: f64,
    },
    /// Decay-free return amplitude of |A⟩ against Ωc or V.
    Amplitudes {
        #[arg(long, value_enum, default_value_t = AmplitudeAxis::OmegaC)]
        axis: AmplitudeAxis,
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        #[arg(long, default_value_t = 5.0)]
        max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[command(flatten)]
        o: Overrides,
    },
    /// Average gate fidelity against the gate duration.
    FidelityVsTime {
        #[arg(long, default_value_t = 0.2)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 17)]
        points: usize,
        #[command(flatten)]
        o: Overrides,
    },
    /// Fidelity over control (ξ) and target (ζ) Rabi errors.
    RabiSweep {
        #[arg(long, default_value_t = -0.1, allow_hyphen_values = true)]
        min: f64,
        #[arg(long, default_value_t = 0.1)]
        max: f64,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[command(flatten)]
        o: Overrides,
    },
    /// Fidelity against a uniform blockade V for several Ωc.
    BlockadeSweep {
        /// Ωc/Ω0 values.
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 4.0, 5.0])]
        omega_c: Vec<f64>,
        /// V/Ω0 range.
        #[arg(long, default_value_t = 1.0)]
        v_min: f64,
        #[arg(long, default_value_t = 30.0)]
        v_max: f64,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[command(flatten)]
        o: Overrides,
    },
    /// Fidelity against the atom separation of the preset layout.
    PositionSweep {
        #[arg(long, default_value_t = 5.7)]
        l_min: f64,
        #[arg(long, default_value_t = 6.3)]
        l_max: f64,
        #[arg(long, default_value_t = 7)]
        points: usize,
        #[command(flatten)]
        o: Overrides,
    },
    /// Grover search with the exact or simulated gate.
    Grover {
        /// Use the exact gate and print the success probability.
        #[arg(long)]
        ideal: bool,
        /// Iterations for --ideal; optimal count by default.
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value_t = 0.2)]
        t_min: f64,
        #[arg(long, default_value_t = 1.0)]
        t_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
        #[command(flatten)]
        o: Overrides,
    },
}

#[derive(Serialize)]
struct ManifestHeader {
    tool: String,
    version: String,
    command: String,
    args: Vec<String>,
    output: String,
    wall_time_s: f64,
    n_qubits: usize,
    sigma_frac: f64,
    delta_frac: f64,
    delta_mhz: f64,
    omega_c_over_omega_0: f64,
    v_ct_over_omega_c: Vec<f64>,
}

#[derive(Serialize)]
struct Manifest {
    manifest: ManifestHeader,
    config: RunConfig,
}

fn apply_overrides(mut cfg: RunConfig, o: &Overrides) -> Result<RunConfig> {
    if let Some(q) = o.qubits {
        cfg.geometry.qubits = q;
        cfg.geometry.layout = None;
        if cfg.geometry.v_ct_mhz.as_ref().is_some_and(|v| v.len() + 1 != q) {
            cfg.geometry.v_ct_mhz = None;
        }
    }
    if let Some(t) = o.total_time {
        cfg.pulse.total_time_us = t;
    }
    if let Some(v) = o.sigma_frac {
        cfg.pulse.sigma_frac = v;
    }
    if let Some(v) = o.delta_frac {
        cfg.pulse.delta_frac = v;
    }
    if let Some(v) = o.omega_c_mhz {
        cfg.physics.omega_c_mhz = v;
    }
    if let Some(v) = o.delta_mhz {
        cfg.physics.delta_mhz = v;
    }
    if o.no_decay {
        cfg.physics.decay = false;
    }
    if let Some(v) = o.rel_tol {
        cfg.integrator.rel_tol = v;
    }
    if let Some(v) = o.abs_tol {
        cfg.integrator.abs_tol = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_path(cfg: &RunConfig, o: &Overrides, stem: &str) -> PathBuf {
    o.out.clone().unwrap_or_else(|| cfg.output.dir.join(format!("{stem}.csv")))
}

fn emit(result: &SweepResult, cfg: &RunConfig, command: &str, path: &Path, started: Instant) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    analysis::write_csv(result, path)?;
    let physics = cfg.physics()?;
    let header = ManifestHeader {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        args: std::env::args().skip(1).collect(),
        output: path.display().to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
        n_qubits: cfg.geometry.qubits,
        sigma_frac: cfg.pulse.sigma_frac,
        delta_frac: cfg.pulse.delta_frac,
        delta_mhz: cfg.physics.delta_mhz,
        omega_c_over_omega_0: physics.omega_c / physics.omega_0,
        v_ct_over_omega_c: physics.v_ct.iter().map(|v| v / physics.omega_c).collect(),
    };
    let manifest = Manifest { manifest: header, config: cfg.clone() };
    let text =
        toml::to_string(&manifest).map_err(|e| Error::Config { key: "manifest".into(), reason: e.to_string() })?;
    std::fs::write(path.with_extension("manifest.toml"), text)?;
    analysis::write_table(result, &mut std::io::stdout().lock())?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let base = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let started = Instant::now();
    match cli.command {
        Command::C6 { n, l } => {
            let c6 = c6_atomic_units(n)?;
            let v = interaction_strength(l, n)?;
            let omega_c = base.physics.omega_c_mhz * MHZ_TO_RAD_PER_US;
            println!("C6          = {c6:.6e} a.u.");
            println!("|C6|        = {:.6e} GHz·μm⁶", c6_to_freq_units(c6).abs());
            println!("V           = {v:.6e} rad/μs (V/2π = {:.3} MHz)", v / MHZ_TO_RAD_PER_US);
            println!("V/Ωc        = {:.3}", v / omega_c);
        }
        Command::Amplitudes { axis, min, max, points, o } => {
            let cfg = apply_overrides(base, &o)?;
            let gate = cfg.gate_config()?;
            let grid = linspace(min, max, points);
            let t = cfg.pulse.total_time_us;
            let (result, stem) = match axis {
                AmplitudeAxis::OmegaC => (analysis::amplitude_vs_omega_c(&gate, t, &grid)?, "amplitude_vs_omega_c"),
                AmplitudeAxis::V => (analysis::amplitude_vs_v(&gate, t, &grid)?, "amplitude_vs_v"),
            };
            emit(&result, &cfg, "amplitudes", &output_path(&cfg, &o, stem), started)?;
        }
        Command::FidelityVsTime { t_min, t_max, points, o } => {
            let cfg = apply_overrides(base, &o)?;
            let result = analysis::fidelity_vs_gate_time(&cfg.gate_config()?, &linspace(t_min, t_max, points))?;
            let stem = format!("fidelity_vs_time_{}q", cfg.geometry.qubits);
            emit(&result, &cfg, "fidelity-vs-time", &output_path(&cfg, &o, &stem), started)?;
        }
        Command::RabiSweep { min, max, points, o } => {
            let cfg = apply_overrides(base, &o)?;
            let grid = linspace(min, max, points);
            let result = analysis::rabi_error_sweep(&cfg.gate_config()?, cfg.pulse.total_time_us, &grid, &grid)?;
            let stem = format!("rabi_sweep_{}q", cfg.geometry.qubits);
            emit(&result, &cfg, "rabi-sweep", &output_path(&cfg, &o, &stem), started)?;
        }
        Command::BlockadeSweep { omega_c, v_min, v_max, points, o } => {
            let cfg = apply_overrides(base, &o)?;
            let result = analysis::blockade_sweep(
                &cfg.gate_config()?,
                cfg.pulse.total_time_us,
                &omega_c,
                &linspace(v_min, v_max, points),
            )?;
            emit(&result, &cfg, "blockade-sweep", &output_path(&cfg, &o, "blockade_sweep"), started)?;
            for c in &omega_c {
                if let Some(best) = result.filter("omega_c_over_omega_0", *c).argmax() {
                    eprintln!("Ωc = {c}Ω0: best V = {}Ω0 (F = {:.6})", best[1], best[2]);
                }
            }
        }
        Command::PositionSweep { l_min, l_max, points, o } => {
            let cfg = apply_overrides(base, &o)?;
            let result = analysis::position_sweep(
                &cfg.gate_config()?,
                cfg.pulse.total_time_us,
                cfg.layout()?,
                &linspace(l_min, l_max, points),
                cfg.geometry.principal_n,
            )?;
            let stem = format!("position_sweep_{}q", cfg.geometry.qubits);
            emit(&result, &cfg, "position-sweep", &output_path(&cfg, &o, &stem), started)?;
        }
        Command::Grover { ideal, iterations, t_min, t_max, points, o } => {
            let cfg = apply_overrides(base, &o)?;
            let n = cfg.geometry.qubits;
            if ideal {
                let k = match iterations {
                    Some(k) => k,
                    None => optimal_iterations(n)?,
                };
                let p = grover::run_grover(&GroverConfig { n_qubits: n, iterations: k, channel: None })?;
                println!("{p:.4}");
            } else {
                let result = grover::grover_vs_gate_time(&cfg.gate_config()?, &linspace(t_min, t_max, points))?;
                let stem = format!("grover_{n}q");
                emit(&result, &cfg, "grover", &output_path(&cfg, &o, &stem), started)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
