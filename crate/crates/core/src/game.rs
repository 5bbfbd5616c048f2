//! The linear-quadratic network game.
//!
//! Players sit on a weighted directed network. Each payoff couples a
//! player's own action to the aggregate of her neighbors' actions
//! through a common coupling scalar, plus a standalone marginal return
//! the regulator can shift. This module owns the payoff and welfare
//! functions, the pseudo-gradient map of the game and of the welfare
//! problem, and the spectral checker that certifies a unique social
//! optimum.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::sets::ConstraintSet;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("adjacency matrix must be {n}×{n}, got {rows}×{cols}")]
    BadAdjacencyShape { n: usize, rows: usize, cols: usize },
    #[error("self loop forbidden: diagonal entry ({i},{i}) is {value}")]
    SelfLoopForbidden { i: usize, value: f64 },
    #[error("adjacency weight ({i},{j}) = {value} outside [0, 1]")]
    WeightOutOfRange { i: usize, j: usize, value: f64 },
    #[error("marginal returns must have length {n}, got {got}")]
    BadReturnsLength { n: usize, got: usize },
    #[error("action set must be a box over the players, got dimension {got} for {n} players")]
    BadActionSet { n: usize, got: usize },
    #[error("action set must be the Box variant")]
    NonBoxActionSet,
    #[error("intervention set has dimension {got}, expected {n}")]
    BadInterventionSet { n: usize, got: usize },
    #[error("intervention set must contain the origin")]
    InterventionSetMissingOrigin,
    #[error("player index {index} out of range for {n} players")]
    PlayerOutOfRange { index: usize, n: usize },
    #[error("vector has length {got}, expected {n}")]
    DimensionMismatch { n: usize, got: usize },
    #[error("non-finite value in game data")]
    NonFinite,
}

/// Verdicts and spectral diagnostics for the standing assumptions.
///
/// `margin = 1 − max_i a·λ_i(P+Pᵀ)`; the unique-optimum condition holds
/// iff the margin is positive. `weak_coupling_ok` is the stronger
/// `‖aP‖ < ½` test used by the static feedback protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub assumption1_ok: bool,
    pub symmetric: bool,
    pub lambda_min_ppt: f64,
    pub lambda_max_ppt: f64,
    pub margin: f64,
    pub ap_spectral_norm: f64,
    pub assumption2_ok: bool,
    pub weak_coupling_ok: bool,
    /// The coupling scalar is zero: the game decouples into independent
    /// scalar problems. Permitted, but worth flagging.
    pub decoupled: bool,
}

/// A linear-quadratic network game.
///
/// Immutable after construction; all operations are pure and safe to
/// call concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGame {
    n: usize,
    adjacency: DMatrix<f64>,
    coupling: f64,
    marginal_returns: DVector<f64>,
    action_set: ConstraintSet,
    intervention_set: ConstraintSet,
}

impl NetworkGame {
    /// Builds a game, validating every structural invariant: square
    /// hollow adjacency with weights in `[0, 1]`, a box action set over
    /// the players, and an intervention set containing the origin.
    pub fn new(
        adjacency: DMatrix<f64>,
        coupling: f64,
        marginal_returns: DVector<f64>,
        action_set: ConstraintSet,
        intervention_set: ConstraintSet,
    ) -> Result<Self, GameError> {
        Self::with_weight_override(
            adjacency,
            coupling,
            marginal_returns,
            action_set,
            intervention_set,
            false,
        )
    }

    /// As [`NetworkGame::new`] but optionally allowing adjacency weights
    /// outside `[0, 1]`. Nothing in the convergence analysis uses the
    /// unit bound, so experiments may relax it deliberately.
    pub fn with_weight_override(
        adjacency: DMatrix<f64>,
        coupling: f64,
        marginal_returns: DVector<f64>,
        action_set: ConstraintSet,
        intervention_set: ConstraintSet,
        allow_weights_outside_unit: bool,
    ) -> Result<Self, GameError> {
        let n = marginal_returns.len();
        if adjacency.nrows() != n || adjacency.ncols() != n {
            return Err(GameError::BadAdjacencyShape {
                n,
                rows: adjacency.nrows(),
                cols: adjacency.ncols(),
            });
        }
        if !coupling.is_finite()
            || adjacency.iter().any(|v| !v.is_finite())
            || marginal_returns.iter().any(|v| !v.is_finite())
        {
            return Err(GameError::NonFinite);
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(GameError::SelfLoopForbidden {
                    i,
                    value: adjacency[(i, i)],
                });
            }
            for j in 0..n {
                let value = adjacency[(i, j)];
                if !allow_weights_outside_unit && !(0.0..=1.0).contains(&value) {
                    return Err(GameError::WeightOutOfRange { i, j, value });
                }
            }
        }
        match &action_set {
            ConstraintSet::Box { intervals } if intervals.len() == n => {}
            ConstraintSet::Box { intervals } => {
                return Err(GameError::BadActionSet {
                    n,
                    got: intervals.len(),
                })
            }
            _ => return Err(GameError::NonBoxActionSet),
        }
        if intervention_set.dim() != n {
            return Err(GameError::BadInterventionSet {
                n,
                got: intervention_set.dim(),
            });
        }
        if !intervention_set.contains_origin() {
            return Err(GameError::InterventionSetMissingOrigin);
        }
        Ok(Self {
            n,
            adjacency,
            coupling,
            marginal_returns,
            action_set,
            intervention_set,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn marginal_returns(&self) -> &DVector<f64> {
        &self.marginal_returns
    }

    pub fn action_set(&self) -> &ConstraintSet {
        &self.action_set
    }

    pub fn intervention_set(&self) -> &ConstraintSet {
        &self.intervention_set
    }

    /// `a·Pᵀ`, the gain the static feedback protocol hands out.
    pub fn scaled_adjacency_transpose(&self) -> DMatrix<f64> {
        self.adjacency.transpose() * self.coupling
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<(), GameError> {
        if x.len() != self.n {
            return Err(GameError::DimensionMismatch {
                n: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Per-player aggregate of neighbor actions, `z_i = Σ_j P_ij x_j`.
    pub fn neighbor_aggregate(&self, x: &DVector<f64>) -> Result<DVector<f64>, GameError> {
        self.check_dim(x)?;
        Ok(&self.adjacency * x)
    }

    /// Payoff of player `i` (zero-based): `−½x_i² + x_i(a·z_i + b_i) + x_i·u_i`.
    pub fn payoff(&self, i: usize, x: &DVector<f64>, u_i: f64) -> Result<f64, GameError> {
        if i >= self.n {
            return Err(GameError::PlayerOutOfRange {
                index: i,
                n: self.n,
            });
        }
        self.check_dim(x)?;
        let z_i = self.adjacency.row(i).transpose().dot(x);
        let x_i = x[i];
        Ok(-0.5 * x_i * x_i + x_i * (self.coupling * z_i + self.marginal_returns[i]) + x_i * u_i)
    }

    /// Total payoff with no intervention:
    /// `Σ_i W_i = −½xᵀx + a·xᵀPx + bᵀx`.
    pub fn welfare(&self, x: &DVector<f64>) -> Result<f64, GameError> {
        self.check_dim(x)?;
        Ok(-0.5 * x.dot(x)
            + self.coupling * x.dot(&(&self.adjacency * x))
            + self.marginal_returns.dot(x))
    }

    /// The game map `F(x) = (I − aP)x − b` whose VI solutions over the
    /// action set are the Nash equilibria.
    pub fn game_map(&self, x: &DVector<f64>) -> Result<DVector<f64>, GameError> {
        self.check_dim(x)?;
        Ok(x - &self.adjacency * x * self.coupling - &self.marginal_returns)
    }

    /// Matrix of the game map, `I − aP`.
    pub fn game_matrix(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n) - &self.adjacency * self.coupling
    }

    /// The welfare map `H(x) = (I − a(P+Pᵀ))x − b`; `−H` is the gradient
    /// of the welfare function.
    pub fn welfare_map(&self, x: &DVector<f64>) -> Result<DVector<f64>, GameError> {
        self.check_dim(x)?;
        let sym = &self.adjacency + self.adjacency.transpose();
        Ok(x - sym * x * self.coupling - &self.marginal_returns)
    }

    /// Matrix of the welfare map, `I − a(P+Pᵀ)`.
    pub fn welfare_matrix(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n, self.n)
            - (&self.adjacency + self.adjacency.transpose()) * self.coupling
    }

    /// Spectral diagnostics for the standing assumptions. Reports, never
    /// fails: any validly constructed game yields a report.
    pub fn check_assumptions(&self) -> AssumptionReport {
        let sym = &self.adjacency + self.adjacency.transpose();
        let (lambda_min, lambda_max) = linalg::symmetric_eigen_bounds(&sym);
        let a = self.coupling;
        let extreme = if a > 0.0 { lambda_max } else { lambda_min };
        let margin = 1.0 - a * extreme;
        let ap_spectral_norm = linalg::spectral_norm(&(&self.adjacency * a));
        let symmetric = (&self.adjacency - self.adjacency.transpose())
            .iter()
            .all(|v| v.abs() <= 1e-12);
        AssumptionReport {
            // Constructed sets are nonempty, closed and convex; the
            // origin membership of the intervention set was enforced at
            // construction.
            assumption1_ok: true,
            symmetric,
            lambda_min_ppt: lambda_min,
            lambda_max_ppt: lambda_max,
            margin,
            ap_spectral_norm,
            assumption2_ok: margin > 0.0,
            weak_coupling_ok: ap_spectral_norm < 0.5,
            decoupled: a == 0.0,
        }
    }
}
