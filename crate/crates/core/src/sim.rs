//! Projected-Euler integration of the coupled player/regulator system.
//!
//! The players follow projected pseudo-gradient dynamics
//! `ẋ = Π_𝒳(x, −F(x) + u)`; the regulator's controller state (where it
//! has one) evolves alongside. Discretization is projected explicit
//! Euler, `x⁺ = proj_𝒳(x + h·(−F(x) + u))`: iterates stay feasible by
//! construction and the scheme is the standard consistent one for
//! first-order dynamics over convex sets. Unconstrained sets reduce the
//! projections to the identity, recovering plain Euler.
//!
//! Each run records the action profile, the intervention, a
//! protocol-specific Lyapunov value, and the natural VI residual of the
//! currently shifted game, and reports convergence against a
//! caller-supplied reference. The engine never computes the optimum on
//! its own: which reference a protocol is measured against is harness
//! knowledge.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameError, NetworkGame};
use crate::protocols::{
    protocol_output, protocol_rhs, ProtocolError, ProtocolKind, ProtocolRhs, ProtocolState,
};
use crate::sets::{SetError, MEMBERSHIP_TOL};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    BadConfig(String),
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("divergence guard tripped at t = {t}: state norm {norm:.3e} exceeds ceiling")]
    Diverged { t: f64, norm: f64 },
    #[error("missing Lyapunov reference: {0}")]
    MissingReference(&'static str),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    Game(#[from] GameError),
}

fn default_h() -> f64 {
    1e-3
}
fn default_t_max() -> f64 {
    100.0
}
fn default_conv_tol() -> f64 {
    1e-6
}
fn default_stride() -> usize {
    10
}
fn default_slack() -> f64 {
    1e-6
}
fn default_ceiling() -> f64 {
    1e6
}

/// Fixed-step integration parameters.
///
/// The default step 1e-3 gives a stability margin above 100× for the
/// closed-loop time constants in this crate's regime (spectral abscissa
/// of magnitude a few at n ≈ 10).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_conv_tol")]
    pub conv_tol: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    /// Per-step slack for the Lyapunov decrease check: an increase
    /// counts as a violation only beyond `lyapunov_slack·h`.
    #[serde(default = "default_slack")]
    pub lyapunov_slack: f64,
    /// Divergence guard: any state norm beyond this aborts the run.
    #[serde(default = "default_ceiling")]
    pub bound_ceiling: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            h: default_h(),
            t_max: default_t_max(),
            conv_tol: default_conv_tol(),
            record_stride: default_stride(),
            lyapunov_slack: default_slack(),
            bound_ceiling: default_ceiling(),
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<(), SimError> {
        if self.h.is_nan() || self.h <= 0.0 {
            return Err(SimError::BadConfig(format!(
                "h must be positive, got {}",
                self.h
            )));
        }
        if self.t_max.is_nan() || self.t_max <= 0.0 {
            return Err(SimError::BadConfig(format!(
                "t_max must be positive, got {}",
                self.t_max
            )));
        }
        if self.conv_tol.is_nan() || self.conv_tol <= 0.0 {
            return Err(SimError::BadConfig(format!(
                "conv_tol must be positive, got {}",
                self.conv_tol
            )));
        }
        if self.record_stride == 0 {
            return Err(SimError::BadConfig(
                "record_stride must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Harness-side reference data for the Lyapunov monitor. Which fields a
/// run needs depends on the protocol:
/// open-loop and static feedback need `x_opt`, the dynamic protocol
/// needs the rest-point intervention `u_s`, the adaptive protocol needs
/// the true network gain `aP` the controller is estimating.
#[derive(Debug, Clone, Default)]
pub struct LyapunovRefs {
    pub x_opt: Option<DVector<f64>>,
    pub u_s: Option<DVector<f64>>,
    pub network_gain: Option<DMatrix<f64>>,
}

/// Time-indexed record of a simulation run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub x_states: Vec<DVector<f64>>,
    pub u_values: Vec<DVector<f64>>,
    pub lyapunov: Vec<f64>,
    pub vi_residuals: Vec<f64>,
    pub converged: bool,
    pub t_converged: Option<f64>,
    /// The supplied initial profile was outside the action set and was
    /// projected in.
    pub x0_projected: bool,
    pub config: SimConfig,
}

/// One projected-Euler step of the coupled system; returns the next
/// action profile and controller state.
pub fn step(
    game: &NetworkGame,
    state: &ProtocolState,
    x: &DVector<f64>,
    h: f64,
) -> Result<(DVector<f64>, ProtocolState), SimError> {
    let mut x_next = x.clone();
    let mut state_next = state.clone();
    step_mut(game, &mut state_next, &mut x_next, h)?;
    Ok((x_next, state_next))
}

fn step_mut(
    game: &NetworkGame,
    state: &mut ProtocolState,
    x: &mut DVector<f64>,
    h: f64,
) -> Result<(), SimError> {
    let u = protocol_output(state, x)?;
    let drift = -game.game_map(x)? + &u;
    let x_next = game.action_set().project(&(&*x + drift * h))?;

    match state {
        ProtocolState::OpenLoop { .. } | ProtocolState::StaticFeedback { .. } => {}
        ProtocolState::Dynamic {
            u,
            target,
            intervention_set,
        } => {
            let candidate = &*u + (&*target - &*x) * h;
            *u = intervention_set.project(&candidate)?;
        }
        ProtocolState::Adaptive { .. } => {
            if let ProtocolRhs::Adaptive { dz, dw, dk } = protocol_rhs(state, x)? {
                if let ProtocolState::Adaptive {
                    tracker,
                    compensator,
                    gain,
                    ..
                } = state
                {
                    *tracker += dz * h;
                    *compensator += dw * h;
                    *gain += dk * h;
                }
            }
        }
    }

    *x = x_next;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFiniteState { t: f64::NAN });
    }
    Ok(())
}

/// Protocol-specific Lyapunov value at the current state.
pub fn lyapunov_value(
    kind: ProtocolKind,
    x: &DVector<f64>,
    state: &ProtocolState,
    refs: &LyapunovRefs,
) -> Result<f64, SimError> {
    match kind {
        ProtocolKind::OpenLoop | ProtocolKind::StaticFeedback => {
            let x_opt = refs
                .x_opt
                .as_ref()
                .ok_or(SimError::MissingReference("x_opt"))?;
            Ok(0.5 * (x - x_opt).norm_squared())
        }
        ProtocolKind::Dynamic => {
            let u_s = refs.u_s.as_ref().ok_or(SimError::MissingReference("u_s"))?;
            match state {
                ProtocolState::Dynamic { u, target, .. } => {
                    Ok(0.5 * (x - target).norm_squared() + 0.5 * (u - u_s).norm_squared())
                }
                _ => Err(SimError::MissingReference("dynamic protocol state")),
            }
        }
        ProtocolKind::Adaptive => {
            let gain_true = refs
                .network_gain
                .as_ref()
                .ok_or(SimError::MissingReference("network gain aP"))?;
            match state {
                ProtocolState::Adaptive { gain, .. } => {
                    let e = state
                        .adaptive_error(x)
                        .expect("adaptive state yields an error vector");
                    Ok(0.5 * e.norm_squared() + 0.5 * (gain - gain_true).norm_squared())
                }
                _ => Err(SimError::MissingReference("adaptive protocol state")),
            }
        }
    }
}

/// Integrates the closed loop until `‖x − x_ref‖ ≤ conv_tol` or `t_max`.
///
/// `x_ref` is the caller's convergence reference (the optimum or the
/// dynamic protocol's target); `refs` supplies whatever the Lyapunov
/// monitor needs. The initial profile is projected into the action set
/// if necessary and the trajectory flags that it was.
pub fn simulate(
    game: &NetworkGame,
    mut state: ProtocolState,
    x0: &DVector<f64>,
    config: &SimConfig,
    x_ref: &DVector<f64>,
    refs: &LyapunovRefs,
) -> Result<Trajectory, SimError> {
    config.validate()?;
    let kind = state.kind();
    let projected = game.action_set().project(x0)?;
    let x0_projected = (x0 - &projected).norm() > MEMBERSHIP_TOL;
    let mut x = projected;

    let total_steps = (config.t_max / config.h).ceil() as usize;
    let mut traj = Trajectory {
        times: Vec::new(),
        x_states: Vec::new(),
        u_values: Vec::new(),
        lyapunov: Vec::new(),
        vi_residuals: Vec::new(),
        converged: false,
        t_converged: None,
        x0_projected,
        config: *config,
    };

    let record = |traj: &mut Trajectory,
                  t: f64,
                  x: &DVector<f64>,
                  state: &ProtocolState|
     -> Result<(), SimError> {
        let u = protocol_output(state, x)?;
        let residual = crate::equilibria::shifted_residual(game, x, &u)
            .map_err(|e| SimError::Protocol(ProtocolError::Solver(e)))?;
        traj.times.push(t);
        traj.lyapunov.push(lyapunov_value(kind, x, state, refs)?);
        traj.vi_residuals.push(residual);
        traj.x_states.push(x.clone());
        traj.u_values.push(u);
        Ok(())
    };

    record(&mut traj, 0.0, &x, &state)?;
    let mut k = 0usize;
    loop {
        let t = k as f64 * config.h;
        if (&x - x_ref).norm() <= config.conv_tol {
            traj.converged = true;
            traj.t_converged = Some(t);
            break;
        }
        if k >= total_steps {
            break;
        }
        step_mut(game, &mut state, &mut x, config.h).map_err(|err| match err {
            SimError::NonFiniteState { .. } => SimError::NonFiniteState { t },
            other => other,
        })?;
        k += 1;
        let t = k as f64 * config.h;
        let norm = x.norm().max(state.state_norm());
        if norm > config.bound_ceiling {
            return Err(SimError::Diverged { t, norm });
        }
        if k.is_multiple_of(config.record_stride) {
            record(&mut traj, t, &x, &state)?;
        }
    }
    let t_end = k as f64 * config.h;
    if traj.times.last() != Some(&t_end) {
        record(&mut traj, t_end, &x, &state)?;
    }
    Ok(traj)
}

/// Summary numbers extracted from a finished run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceMetrics {
    pub final_error: f64,
    /// First recorded time at which the error dropped to `conv_tol`.
    pub t_to_tol: Option<f64>,
    /// Recorded sample pairs where the Lyapunov value rose by more than
    /// `lyapunov_slack·h`.
    pub lyapunov_violations: usize,
}

pub fn convergence_metrics(traj: &Trajectory, x_target: &DVector<f64>) -> ConvergenceMetrics {
    let final_error = traj
        .x_states
        .last()
        .map(|x| (x - x_target).norm())
        .unwrap_or(f64::NAN);
    let t_to_tol = traj
        .times
        .iter()
        .zip(&traj.x_states)
        .find(|(_, x)| (*x - x_target).norm() <= traj.config.conv_tol)
        .map(|(t, _)| *t);
    let slack = traj.config.lyapunov_slack * traj.config.h;
    let lyapunov_violations = traj
        .lyapunov
        .windows(2)
        .filter(|w| w[1] > w[0] + slack)
        .count();
    ConvergenceMetrics {
        final_error,
        t_to_tol,
        lyapunov_violations,
    }
}

/// JSON summary written next to the CSV export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub converged: bool,
    pub t_converged: Option<f64>,
    pub final_error: f64,
    pub lyapunov_violations: usize,
}

impl RunSummary {
    pub fn new(traj: &Trajectory, metrics: &ConvergenceMetrics) -> Self {
        Self {
            converged: traj.converged,
            t_converged: traj.t_converged,
            final_error: metrics.final_error,
            lyapunov_violations: metrics.lyapunov_violations,
        }
    }
}

/// Writes the run as CSV with header `t, x_1..x_n, u_1..u_n, V, residual`.
pub fn write_trajectory_csv<W: std::io::Write>(
    traj: &Trajectory,
    mut out: W,
) -> std::io::Result<()> {
    let n = traj.x_states.first().map(|x| x.len()).unwrap_or(0);
    let mut header = String::from("t");
    for i in 1..=n {
        header.push_str(&format!(",x_{i}"));
    }
    for i in 1..=n {
        header.push_str(&format!(",u_{i}"));
    }
    header.push_str(",V,residual");
    writeln!(out, "{header}")?;
    for (k, t) in traj.times.iter().enumerate() {
        let mut row = format!("{t}");
        for v in traj.x_states[k].iter() {
            row.push_str(&format!(",{v}"));
        }
        for v in traj.u_values[k].iter() {
            row.push_str(&format!(",{v}"));
        }
        row.push_str(&format!(",{},{}", traj.lyapunov[k], traj.vi_residuals[k]));
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Runs independent jobs on their own threads and returns the results in
/// job order. Each job owns its state, so runs are deterministic per job
/// regardless of scheduling.
pub fn run_parallel<T, F>(jobs: Vec<F>) -> Vec<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    std::thread::scope(|scope| {
        let handles: Vec<_> = jobs.into_iter().map(|job| scope.spawn(job)).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation job panicked"))
            .collect()
    })
}
