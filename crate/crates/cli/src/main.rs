//! Command-line front end: analyze a scenario, run one simulation, or
//! sweep protocols × seeds, emitting CSV/JSON artifacts for external
//! plotting.
//!
//! Exit codes are stable:
//! - 0: success (for `simulate`: converged with zero Lyapunov violations)
//! - 1: unreadable or invalid input
//! - 2: `analyze` found the spectral condition violated (report still written)
//! - 3: `analyze` found the welfare optimum unassignable (report still written)
//! - 4: `simulate` did not certify: non-convergence within `t_max`,
//!   divergence, or Lyapunov violations (details on standard error)
//! - 5: a protocol precondition failed, named on standard error

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netsteer::equilibria::{self, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use netsteer::protocols::{make_protocol, ProtocolKind, ProtocolOptions, ProtocolState};
use netsteer::scenarios::{self, ScenarioSpec};
use netsteer::sim::{self, ConvergenceMetrics, LyapunovRefs, RunSummary, SimError, Trajectory};

#[derive(Parser)]
#[command(
    name = "netsteer",
    about = "Analyze and steer linear-quadratic network games",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Protocol override: open_loop, static_feedback, dynamic, adaptive.
    #[arg(long)]
    protocol: Option<String>,
    /// Integration step override.
    #[arg(long)]
    h: Option<f64>,
    /// Horizon override.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Recording stride override.
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write analysis.json: assumption verdicts, equilibria, intervention.
    Analyze {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run one simulation; write trajectory.csv and summary.json.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Seeded perturbation of the initial profile x0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the cartesian product of protocols × seeds; one subdirectory
    /// per cell plus index.json.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Protocols to sweep (repeatable); defaults to the scenario's.
        #[arg(long = "protocol")]
        protocols: Vec<String>,
        /// Seeds to sweep (repeatable); defaults to 0.
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
        #[arg(long)]
        stride: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze { scenario, out } => cmd_analyze(&scenario, &out),
        Command::Simulate {
            scenario,
            out,
            overrides,
            seed,
        } => cmd_simulate(&scenario, &out, &overrides, seed),
        Command::Sweep {
            scenario,
            out,
            protocols,
            seeds,
            h,
            t_max,
            stride,
        } => cmd_sweep(&scenario, &out, &protocols, &seeds, h, t_max, stride),
    };
    ExitCode::from(code)
}

fn load(path: &Path) -> Result<ScenarioSpec, u8> {
    scenarios::load_scenario(path).map_err(|err| {
        eprintln!("netsteer: {err}");
        1
    })
}

fn cmd_analyze(scenario_path: &Path, out: &Path) -> u8 {
    let spec = match load(scenario_path) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    let report = match equilibria::analyze(&spec.game, DEFAULT_TOL, DEFAULT_MAX_ITERS) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("netsteer: analysis failed: {err}");
            return 1;
        }
    };
    if let Err(err) = std::fs::create_dir_all(out).and_then(|_| {
        std::fs::write(
            out.join("analysis.json"),
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        )
    }) {
        eprintln!("netsteer: cannot write analysis.json: {err}");
        return 1;
    }
    if !report.assumptions.assumption2_ok {
        eprintln!(
            "netsteer: spectral condition violated (margin {:.6}); analysis written",
            report.margin
        );
        return 2;
    }
    if !report.feasible {
        eprintln!(
            "netsteer: welfare optimum is not assignable within the intervention set \
             (residual {:.3e}); analysis written",
            report.residuals.intervention.unwrap_or(f64::NAN)
        );
        return 3;
    }
    0
}

/// Seeded uniform perturbation of the initial profile, projected back
/// into the action set.
fn perturbed_x0(spec: &ScenarioSpec, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = DVector::from_iterator(
        spec.x0.len(),
        (0..spec.x0.len()).map(|_| rng.gen_range(-1.0..1.0)),
    );
    spec.game
        .action_set()
        .project(&(&spec.x0 + jitter))
        .expect("x0 has the game dimension")
}

struct PreparedRun {
    state: ProtocolState,
    refs: LyapunovRefs,
    x_ref: DVector<f64>,
    x0: DVector<f64>,
}

enum PrepareError {
    /// Protocol precondition failure (exit 5), with the named cause.
    Precondition(String),
    /// Anything else (exit 1).
    Other(String),
}

fn prepare_run(
    spec: &ScenarioSpec,
    kind: ProtocolKind,
    seed: Option<u64>,
) -> Result<PreparedRun, PrepareError> {
    let game = &spec.game;
    let x0 = match seed {
        Some(seed) => perturbed_x0(spec, seed),
        None => game
            .action_set()
            .project(&spec.x0)
            .map_err(|e| PrepareError::Other(e.to_string()))?,
    };
    let options = ProtocolOptions {
        x_s: spec
            .protocol
            .x_s
            .as_ref()
            .map(|v| DVector::from_vec(v.clone())),
        x0: Some(x0.clone()),
        skip_assignability_check: spec.protocol.skip_assignability_check,
        ..Default::default()
    };
    let state = make_protocol(kind, game, &options)
        .map_err(|err| PrepareError::Precondition(err.to_string()))?;

    let mut refs = LyapunovRefs::default();
    let x_ref = match kind {
        ProtocolKind::Dynamic => {
            let target = options
                .x_s
                .clone()
                .expect("dynamic construction checked x_s");
            let verdict = equilibria::optimal_intervention(game, &target, 10.0 * DEFAULT_TOL)
                .map_err(|e| PrepareError::Other(e.to_string()))?;
            match verdict.u_opt {
                Some(u_s) => refs.u_s = Some(u_s),
                None => {
                    return Err(PrepareError::Precondition(format!(
                        "target profile is not assignable: no admissible intervention holds it \
                         (residual {:.3e})",
                        verdict.residual
                    )))
                }
            }
            target
        }
        ProtocolKind::OpenLoop | ProtocolKind::StaticFeedback | ProtocolKind::Adaptive => {
            let x_opt = equilibria::social_optimum(game, DEFAULT_TOL, DEFAULT_MAX_ITERS)
                .map_err(|e| PrepareError::Precondition(e.to_string()))?;
            refs.x_opt = Some(x_opt.clone());
            if kind == ProtocolKind::Adaptive {
                refs.network_gain = Some(game.adjacency() * game.coupling());
            }
            x_opt
        }
    };
    Ok(PreparedRun {
        state,
        refs,
        x_ref,
        x0,
    })
}

struct RunArtifacts {
    traj: Trajectory,
    metrics: ConvergenceMetrics,
    exit: u8,
    note: String,
}

fn execute_run(
    spec: &ScenarioSpec,
    kind: ProtocolKind,
    seed: Option<u64>,
) -> Result<RunArtifacts, (u8, String)> {
    let prepared = match prepare_run(spec, kind, seed) {
        Ok(p) => p,
        Err(PrepareError::Precondition(msg)) => return Err((5, msg)),
        Err(PrepareError::Other(msg)) => return Err((1, msg)),
    };
    let traj = match sim::simulate(
        &spec.game,
        prepared.state,
        &prepared.x0,
        &spec.sim,
        &prepared.x_ref,
        &prepared.refs,
    ) {
        Ok(traj) => traj,
        Err(err @ (SimError::Diverged { .. } | SimError::NonFiniteState { .. })) => {
            return Err((4, err.to_string()))
        }
        Err(err) => return Err((1, err.to_string())),
    };
    let metrics = sim::convergence_metrics(&traj, &prepared.x_ref);
    let (exit, note) = if !traj.converged {
        (
            4,
            format!("did not converge within t_max = {}", spec.sim.t_max),
        )
    } else if metrics.lyapunov_violations > 0 {
        (
            4,
            format!(
                "converged but recorded {} Lyapunov violations",
                metrics.lyapunov_violations
            ),
        )
    } else {
        (0, String::new())
    };
    Ok(RunArtifacts {
        traj,
        metrics,
        exit,
        note,
    })
}

fn cmd_simulate(scenario_path: &Path, out: &Path, overrides: &Overrides, seed: Option<u64>) -> u8 {
    let mut spec = match load(scenario_path) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    apply_overrides(&mut spec, overrides);
    let kind = match resolve_kind(&spec, overrides.protocol.as_deref()) {
        Ok(kind) => kind,
        Err(code) => return code,
    };
    spec.protocol.kind = kind;
    let artifacts = match execute_run(&spec, kind, seed) {
        Ok(artifacts) => artifacts,
        Err((code, msg)) => {
            eprintln!("netsteer: {msg}");
            return code;
        }
    };
    let summary = RunSummary::new(&artifacts.traj, &artifacts.metrics);
    if let Err(err) = scenarios::save_results(out, &artifacts.traj, &summary, None) {
        eprintln!("netsteer: cannot write results: {err}");
        return 1;
    }
    if artifacts.exit != 0 {
        eprintln!("netsteer: {}", artifacts.note);
    }
    artifacts.exit
}

fn apply_overrides(spec: &mut ScenarioSpec, overrides: &Overrides) {
    if let Some(h) = overrides.h {
        spec.sim.h = h;
    }
    if let Some(t_max) = overrides.t_max {
        spec.sim.t_max = t_max;
    }
    if let Some(stride) = overrides.stride {
        spec.sim.record_stride = stride;
    }
}

fn resolve_kind(spec: &ScenarioSpec, name: Option<&str>) -> Result<ProtocolKind, u8> {
    match name {
        None => Ok(spec.protocol.kind),
        Some(name) => ProtocolKind::parse(name).ok_or_else(|| {
            eprintln!(
                "netsteer: unknown protocol {name:?}; expected open_loop, static_feedback, \
                 dynamic, or adaptive"
            );
            1
        }),
    }
}

#[derive(serde::Serialize)]
struct SweepCell {
    protocol: String,
    seed: u64,
    dir: String,
    exit: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<RunSummary>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    scenario_path: &Path,
    out: &Path,
    protocols: &[String],
    seeds: &[u64],
    h: Option<f64>,
    t_max: Option<f64>,
    stride: Option<usize>,
) -> u8 {
    let mut spec = match load(scenario_path) {
        Ok(spec) => spec,
        Err(code) => return code,
    };
    apply_overrides(
        &mut spec,
        &Overrides {
            protocol: None,
            h,
            t_max,
            stride,
        },
    );
    let kinds: Vec<ProtocolKind> = if protocols.is_empty() {
        vec![spec.protocol.kind]
    } else {
        match protocols
            .iter()
            .map(|name| resolve_kind(&spec, Some(name)))
            .collect::<Result<Vec<_>, u8>>()
        {
            Ok(kinds) => kinds,
            Err(code) => return code,
        }
    };
    let seeds: Vec<u64> = if seeds.is_empty() {
        vec![0]
    } else {
        seeds.to_vec()
    };

    let mut cells: Vec<(ProtocolKind, u64)> = Vec::new();
    for &kind in &kinds {
        for &seed in &seeds {
            cells.push((kind, seed));
        }
    }

    // Cells are independent: run them concurrently; each owns its state
    // and output directory, so results are deterministic per (seed,
    // config) regardless of scheduling.
    let jobs: Vec<_> = cells
        .iter()
        .map(|&(kind, seed)| {
            let spec = spec.clone();
            let out = out.to_path_buf();
            move || -> SweepCell {
                let dir_name = format!("{}_seed{}", kind.name(), seed);
                let dir = out.join(&dir_name);
                match execute_run(&spec, kind, Some(seed)) {
                    Ok(artifacts) => {
                        let summary = RunSummary::new(&artifacts.traj, &artifacts.metrics);
                        match scenarios::save_results(&dir, &artifacts.traj, &summary, None) {
                            Ok(()) => SweepCell {
                                protocol: kind.name().into(),
                                seed,
                                dir: dir_name,
                                exit: artifacts.exit,
                                error: (!artifacts.note.is_empty()).then_some(artifacts.note),
                                summary: Some(summary),
                            },
                            Err(err) => SweepCell {
                                protocol: kind.name().into(),
                                seed,
                                dir: dir_name,
                                exit: 1,
                                error: Some(err.to_string()),
                                summary: None,
                            },
                        }
                    }
                    Err((code, msg)) => SweepCell {
                        protocol: kind.name().into(),
                        seed,
                        dir: dir_name,
                        exit: code,
                        error: Some(msg),
                        summary: None,
                    },
                }
            }
        })
        .collect();
    let results = sim::run_parallel(jobs);

    // Index written after all cells complete.
    if let Err(err) = std::fs::create_dir_all(out).and_then(|_| {
        std::fs::write(
            out.join("index.json"),
            serde_json::to_string_pretty(&results).expect("cells serialize") + "\n",
        )
    }) {
        eprintln!("netsteer: cannot write index.json: {err}");
        return 1;
    }
    let worst = results.iter().map(|cell| cell.exit).max().unwrap_or(0);
    for cell in &results {
        if let Some(error) = &cell.error {
            eprintln!("netsteer: cell {}: {error}", cell.dir);
        }
    }
    worst
}
