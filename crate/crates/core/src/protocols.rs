//! The four intervention protocols, ordered by how much the regulator
//! knows about the game.
//!
//! - **Open loop**: full game knowledge; play the precomputed constant
//!   intervention that makes the social optimum a rest point.
//! - **Static feedback**: the regulator knows only the scaled network
//!   `aP`; feed back `proj_𝒰(aPᵀx)`, which works under weak coupling, or
//!   unconditionally when the intervention set is all of ℝⁿ.
//! - **Dynamic**: the regulator knows only a target profile; integrate
//!   the tracking error inside the intervention set.
//! - **Adaptive**: the regulator knows only the standalone marginal
//!   returns; estimate the network gain online. Restricted to symmetric
//!   networks with unconstrained actions and interventions.
//!
//! Each protocol is an explicit state machine: construction checks its
//! premises, `output` maps the observed profile to an intervention, and
//! `rhs` gives the controller's own state derivative where one exists.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::equilibria::{self, ViError};
use crate::game::NetworkGame;
use crate::sets::{ConstraintSet, SetError, MEMBERSHIP_TOL};

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("weak coupling violated: ‖aP‖ = {norm:.4} ≥ 0.5 with a constrained intervention set")]
    WeakCouplingViolated { norm: f64 },
    #[error(
        "feedback target aPᵀ·x_opt lies outside the intervention set (distance {distance:.3e})"
    )]
    FeedbackTargetOutsideInterventionSet { distance: f64 },
    #[error("adaptive intervention requires a symmetric network")]
    AsymmetricNetwork,
    #[error("adaptive intervention requires unconstrained actions")]
    UnconstrainedActionsRequired,
    #[error("adaptive intervention requires unconstrained interventions")]
    UnconstrainedInterventionsRequired,
    #[error("spectral margin {margin:.3e} is not positive")]
    SpectralMarginViolated { margin: f64 },
    #[error("target profile is not assignable: no admissible intervention holds it (residual {residual:.3e})")]
    TargetNotAssignable { residual: f64 },
    #[error("target profile lies outside the action set (distance {distance:.3e})")]
    TargetOutsideActionSet { distance: f64 },
    #[error("dynamic intervention requires a target profile x_s")]
    MissingTarget,
    #[error("adaptive intervention requires the initial profile x0")]
    MissingInitialState,
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Solver(#[from] ViError),
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    OpenLoop,
    StaticFeedback,
    Dynamic,
    Adaptive,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::OpenLoop => "open_loop",
            ProtocolKind::StaticFeedback => "static_feedback",
            ProtocolKind::Dynamic => "dynamic",
            ProtocolKind::Adaptive => "adaptive",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "open_loop" => Some(ProtocolKind::OpenLoop),
            "static_feedback" => Some(ProtocolKind::StaticFeedback),
            "dynamic" => Some(ProtocolKind::Dynamic),
            "adaptive" => Some(ProtocolKind::Adaptive),
            _ => None,
        }
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Options consumed by [`make_protocol`]; which fields matter depends on
/// the protocol kind.
#[derive(Debug, Clone)]
pub struct ProtocolOptions {
    /// Target profile for the dynamic protocol.
    pub x_s: Option<DVector<f64>>,
    /// Initial action profile; the adaptive observer starts there.
    pub x0: Option<DVector<f64>>,
    /// Skip the assignability check of `x_s`. The dynamic protocol's
    /// premise is a regulator without game data; with this flag the run
    /// proceeds unverified.
    pub skip_assignability_check: bool,
    /// Tolerance for internal equilibrium solves.
    pub tol: f64,
    /// Iteration cap for internal equilibrium solves.
    pub max_iters: usize,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            x_s: None,
            x0: None,
            skip_assignability_check: false,
            tol: equilibria::DEFAULT_TOL,
            max_iters: equilibria::DEFAULT_MAX_ITERS,
        }
    }
}

/// Controller memory for each protocol.
#[derive(Debug, Clone)]
pub enum ProtocolState {
    /// Constant output `u_opt ∈ 𝒰`.
    OpenLoop { u_opt: DVector<f64> },
    /// Memoryless feedback `proj_𝒰(aPᵀx)`; stores only the network gain
    /// and the intervention set, never `b` or the action bounds.
    StaticFeedback {
        network_gain: DMatrix<f64>,
        intervention_set: ConstraintSet,
    },
    /// Projected integrator `u̇ = Π_𝒰(u, x_s − x)`, started at `u = 0`.
    Dynamic {
        u: DVector<f64>,
        target: DVector<f64>,
        intervention_set: ConstraintSet,
    },
    /// Adaptive gain `u = Kx` with observer `z`, damping state `w`, and
    /// the known standalone returns `b`.
    Adaptive {
        tracker: DVector<f64>,
        compensator: DVector<f64>,
        gain: DMatrix<f64>,
        returns: DVector<f64>,
    },
}

impl ProtocolState {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolState::OpenLoop { .. } => ProtocolKind::OpenLoop,
            ProtocolState::StaticFeedback { .. } => ProtocolKind::StaticFeedback,
            ProtocolState::Dynamic { .. } => ProtocolKind::Dynamic,
            ProtocolState::Adaptive { .. } => ProtocolKind::Adaptive,
        }
    }

    /// Observer error `e = x − z − w` of the adaptive protocol.
    pub fn adaptive_error(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            ProtocolState::Adaptive {
                tracker,
                compensator,
                ..
            } => Some(x - tracker - compensator),
            _ => None,
        }
    }

    /// Largest norm among the controller's own state variables; feeds
    /// the simulation's boundedness guard.
    pub fn state_norm(&self) -> f64 {
        match self {
            ProtocolState::OpenLoop { u_opt } => u_opt.norm(),
            ProtocolState::StaticFeedback { .. } => 0.0,
            ProtocolState::Dynamic { u, .. } => u.norm(),
            ProtocolState::Adaptive {
                tracker,
                compensator,
                gain,
                ..
            } => tracker.norm().max(compensator.norm()).max(gain.norm()),
        }
    }
}

/// State derivative of a protocol; empty for the memoryless ones.
#[derive(Debug, Clone)]
pub enum ProtocolRhs {
    Static,
    Dynamic {
        du: DVector<f64>,
    },
    Adaptive {
        dz: DVector<f64>,
        dw: DVector<f64>,
        dk: DMatrix<f64>,
    },
}

/// Builds and premise-checks a protocol state for a game.
pub fn make_protocol(
    kind: ProtocolKind,
    game: &NetworkGame,
    options: &ProtocolOptions,
) -> Result<ProtocolState, ProtocolError> {
    match kind {
        ProtocolKind::OpenLoop => {
            let x_opt = equilibria::social_optimum(game, options.tol, options.max_iters)
                .map_err(lift_margin)?;
            let verdict = equilibria::optimal_intervention(game, &x_opt, 10.0 * options.tol)?;
            if !verdict.feasible {
                return Err(ProtocolError::TargetNotAssignable {
                    residual: verdict.residual,
                });
            }
            Ok(ProtocolState::OpenLoop {
                u_opt: verdict.u_opt.expect("feasible verdict carries u_opt"),
            })
        }
        ProtocolKind::StaticFeedback => {
            let report = game.check_assumptions();
            if !game.intervention_set().is_all_of_rn() {
                if !report.weak_coupling_ok {
                    return Err(ProtocolError::WeakCouplingViolated {
                        norm: report.ap_spectral_norm,
                    });
                }
                if !report.assumption2_ok {
                    return Err(ProtocolError::SpectralMarginViolated {
                        margin: report.margin,
                    });
                }
                let x_opt = equilibria::social_optimum(game, options.tol, options.max_iters)
                    .map_err(lift_margin)?;
                let target = game.scaled_adjacency_transpose() * &x_opt;
                let distance = (&target - game.intervention_set().project(&target)?).norm();
                if distance > MEMBERSHIP_TOL {
                    return Err(ProtocolError::FeedbackTargetOutsideInterventionSet { distance });
                }
            } else if !report.assumption2_ok {
                return Err(ProtocolError::SpectralMarginViolated {
                    margin: report.margin,
                });
            }
            Ok(ProtocolState::StaticFeedback {
                network_gain: game.scaled_adjacency_transpose(),
                intervention_set: game.intervention_set().clone(),
            })
        }
        ProtocolKind::Dynamic => {
            let target = options.x_s.clone().ok_or(ProtocolError::MissingTarget)?;
            let distance = (&target - game.action_set().project(&target)?).norm();
            if distance > MEMBERSHIP_TOL {
                return Err(ProtocolError::TargetOutsideActionSet { distance });
            }
            if !options.skip_assignability_check {
                let verdict = equilibria::optimal_intervention(game, &target, 10.0 * options.tol)?;
                if !verdict.feasible {
                    return Err(ProtocolError::TargetNotAssignable {
                        residual: verdict.residual,
                    });
                }
            }
            // u(0) = 0 is admissible: the intervention set contains the
            // origin by construction.
            Ok(ProtocolState::Dynamic {
                u: DVector::zeros(game.n()),
                target,
                intervention_set: game.intervention_set().clone(),
            })
        }
        ProtocolKind::Adaptive => {
            let report = game.check_assumptions();
            if !report.symmetric {
                return Err(ProtocolError::AsymmetricNetwork);
            }
            if !game.action_set().is_all_of_rn() {
                return Err(ProtocolError::UnconstrainedActionsRequired);
            }
            if !game.intervention_set().is_all_of_rn() {
                return Err(ProtocolError::UnconstrainedInterventionsRequired);
            }
            let x0 = options
                .x0
                .clone()
                .ok_or(ProtocolError::MissingInitialState)?;
            if x0.len() != game.n() {
                return Err(ProtocolError::DimensionMismatch {
                    expected: game.n(),
                    got: x0.len(),
                });
            }
            // Observer starts at the observed state, the gain at the
            // no-intervention game: z(0) = x(0), w(0) = 0, K(0) = 0,
            // hence e(0) = 0.
            Ok(ProtocolState::Adaptive {
                tracker: x0,
                compensator: DVector::zeros(game.n()),
                gain: DMatrix::zeros(game.n(), game.n()),
                returns: game.marginal_returns().clone(),
            })
        }
    }
}

fn lift_margin(err: ViError) -> ProtocolError {
    match err {
        ViError::SpectralMarginViolated { margin } => ProtocolError::SpectralMarginViolated { margin },
        other => ProtocolError::Solver(other),
    }
}

/// The intervention a protocol emits when the action profile is `x`.
pub fn protocol_output(
    state: &ProtocolState,
    x: &DVector<f64>,
) -> Result<DVector<f64>, ProtocolError> {
    let expected = match state {
        ProtocolState::OpenLoop { u_opt } => u_opt.len(),
        ProtocolState::StaticFeedback { network_gain, .. } => network_gain.ncols(),
        ProtocolState::Dynamic { u, .. } => u.len(),
        ProtocolState::Adaptive { gain, .. } => gain.ncols(),
    };
    if x.len() != expected {
        return Err(ProtocolError::DimensionMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(match state {
        ProtocolState::OpenLoop { u_opt } => u_opt.clone(),
        ProtocolState::StaticFeedback {
            network_gain,
            intervention_set,
        } => intervention_set.project(&(network_gain * x))?,
        ProtocolState::Dynamic { u, .. } => u.clone(),
        ProtocolState::Adaptive { gain, .. } => gain * x,
    })
}

/// Continuous-time derivative of the controller state; [`ProtocolRhs::Static`]
/// for the memoryless protocols.
pub fn protocol_rhs(state: &ProtocolState, x: &DVector<f64>) -> Result<ProtocolRhs, ProtocolError> {
    match state {
        ProtocolState::OpenLoop { .. } | ProtocolState::StaticFeedback { .. } => {
            Ok(ProtocolRhs::Static)
        }
        ProtocolState::Dynamic {
            u,
            target,
            intervention_set,
        } => {
            if x.len() != u.len() {
                return Err(ProtocolError::DimensionMismatch {
                    expected: u.len(),
                    got: x.len(),
                });
            }
            let drive = target - x;
            Ok(ProtocolRhs::Dynamic {
                du: intervention_set.project_tangent(u, &drive)?,
            })
        }
        ProtocolState::Adaptive {
            tracker,
            compensator,
            gain,
            returns,
        } => {
            if x.len() != tracker.len() {
                return Err(ProtocolError::DimensionMismatch {
                    expected: tracker.len(),
                    got: x.len(),
                });
            }
            let u = gain * x;
            let e = x - tracker - compensator;
            let dz = -tracker + gain * x + returns + &u;
            let dw = -compensator + &e * x.norm_squared();
            let dk = &e * x.transpose();
            Ok(ProtocolRhs::Adaptive { dz, dw, dk })
        }
    }
}
