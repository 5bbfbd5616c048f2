//! Affine variational-inequality solvers.
//!
//! The Nash equilibrium and the social optimum of the game are both
//! solutions of affine VIs over the action set, with maps `F = (I−aP)x−b`
//! and `H = (I−a(P+Pᵀ))x−b`. Under a positive spectral margin both maps
//! are strongly monotone, so a projected fixed-step iteration converges
//! linearly and certifies its output through the natural residual. The
//! module also computes the open-loop intervention that makes the social
//! optimum a rest point of the game dynamics, together with its
//! feasibility verdict against the intervention set.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{GameError, NetworkGame};
use crate::linalg;
use crate::sets::{ConstraintSet, ScalarInterval, SetError, ACTIVE_TOL, MEMBERSHIP_TOL};

/// Default solver tolerance on the scaled step norm.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default iteration cap.
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum ViError {
    #[error("problem is not strongly monotone (μ = {mu:.3e} ≤ 0)")]
    NotStronglyMonotone { mu: f64 },
    #[error("iteration cap {max_iters} exhausted, residual {residual:.3e}")]
    MaxItersExhausted { max_iters: usize, residual: f64 },
    #[error("spectral margin {margin:.3e} is not positive; unique solution unsupported")]
    SpectralMarginViolated { margin: f64 },
    #[error("operation requires a Box action set")]
    NonBoxActionSet,
    #[error("point lies outside the action set (distance {distance:.3e})")]
    OutsideActionSet { distance: f64 },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// The problem: find `x̄` in the set with `(y − x̄)ᵀ(Ax̄ − c) ≥ 0` for all
/// feasible `y`.
#[derive(Debug, Clone)]
pub struct AffineVi {
    matrix: DMatrix<f64>,
    offset: DVector<f64>,
    set: ConstraintSet,
    /// λ_min of the symmetric part of the matrix; strong-monotonicity
    /// constant of the affine map (exact for affine maps).
    mu: f64,
    /// Spectral norm of the matrix; Lipschitz constant of the map.
    lipschitz: f64,
}

impl AffineVi {
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>, set: ConstraintSet) -> Self {
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let (mu, _) = linalg::symmetric_eigen_bounds(&sym);
        let lipschitz = linalg::spectral_norm(&matrix);
        Self {
            matrix,
            offset,
            set,
            mu,
            lipschitz,
        }
    }

    pub fn strong_monotonicity(&self) -> f64 {
        self.mu
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn map(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x - &self.offset
    }

    /// Natural residual `‖x − proj(x − (Ax − c))‖`; zero exactly at
    /// solutions.
    pub fn natural_residual(&self, x: &DVector<f64>) -> Result<f64, ViError> {
        let candidate = x - self.map(x);
        Ok((x - self.set.project(&candidate)?).norm())
    }

    /// Projection method with fixed step `γ = μ/L²`, which contracts by
    /// `√(1 − μ²/L²)` per iteration for strongly monotone affine maps.
    /// Terminates when `‖x_{k+1} − x_k‖/γ ≤ tol`; the returned point has
    /// natural residual at most `10·tol`.
    pub fn solve(&self, tol: f64, max_iters: usize) -> Result<DVector<f64>, ViError> {
        if self.mu <= 0.0 {
            return Err(ViError::NotStronglyMonotone { mu: self.mu });
        }
        let gamma = self.mu / (self.lipschitz * self.lipschitz);
        let mut x = self.set.project(&DVector::zeros(self.offset.len()))?;
        for _ in 0..max_iters {
            let next = self.set.project(&(&x - self.map(&x) * gamma))?;
            let step = (&next - &x).norm();
            x = next;
            if step / gamma <= tol {
                return Ok(x);
            }
        }
        Err(ViError::MaxItersExhausted {
            max_iters,
            residual: self.natural_residual(&x)?,
        })
    }
}

/// Outcome of the assignability test for a target action profile:
/// whether some admissible intervention makes it a rest point.
#[derive(Debug, Clone)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    /// Minimum-norm admissible intervention, when one exists.
    pub u_opt: Option<DVector<f64>>,
    /// The normal-cone component `v = u_opt − F(x_opt)`.
    pub normal_component: Option<DVector<f64>>,
    /// When feasible: the natural residual of the target for the shifted
    /// game map. When infeasible: distance from the admissible
    /// interventions to the intervention set.
    pub residual: f64,
}

/// Nash equilibrium `sol(𝒳, F)` via the projection method.
pub fn nash_equilibrium(
    game: &NetworkGame,
    tol: f64,
    max_iters: usize,
) -> Result<DVector<f64>, ViError> {
    let report = game.check_assumptions();
    if !report.assumption2_ok {
        return Err(ViError::SpectralMarginViolated {
            margin: report.margin,
        });
    }
    AffineVi::new(
        game.game_matrix(),
        game.marginal_returns().clone(),
        game.action_set().clone(),
    )
    .solve(tol, max_iters)
}

/// Social optimum `sol(𝒳, H)`; refuses to run when the spectral margin
/// is not positive, since uniqueness is then unsupported.
pub fn social_optimum(
    game: &NetworkGame,
    tol: f64,
    max_iters: usize,
) -> Result<DVector<f64>, ViError> {
    let report = game.check_assumptions();
    if !report.assumption2_ok {
        return Err(ViError::SpectralMarginViolated {
            margin: report.margin,
        });
    }
    AffineVi::new(
        game.welfare_matrix(),
        game.marginal_returns().clone(),
        game.action_set().clone(),
    )
    .solve(tol, max_iters)
}

/// Per-coordinate normal cone of a box at a point, as an interval of
/// admissible normal components.
fn normal_cone_interval(interval: &ScalarInterval, x_i: f64) -> ScalarInterval {
    let pinched = interval.lo().is_finite()
        && interval.hi().is_finite()
        && interval.hi() - interval.lo() <= 2.0 * ACTIVE_TOL;
    let at_lower = interval.lo().is_finite() && (x_i - interval.lo()).abs() <= ACTIVE_TOL;
    let at_upper = interval.hi().is_finite() && (x_i - interval.hi()).abs() <= ACTIVE_TOL;
    if pinched {
        ScalarInterval::unbounded()
    } else if at_lower {
        ScalarInterval::new(f64::NEG_INFINITY, 0.0).unwrap()
    } else if at_upper {
        ScalarInterval::new(0.0, f64::INFINITY).unwrap()
    } else {
        ScalarInterval::new(0.0, 0.0).unwrap()
    }
}

/// Minimum-norm element of a nonempty closed interval.
fn min_norm_in(lo: f64, hi: f64) -> f64 {
    0.0f64.max(lo).min(hi)
}

/// Computes the open-loop intervention for a target `x_opt`, i.e. the
/// minimum-norm `u` with `u − F(x_opt)` in the normal cone of the action
/// set at the target and `u` admissible, or reports infeasibility.
///
/// The admissible set decomposes per coordinate as
/// `A_i = F_i(x_opt) + N_i` with `N_i` the coordinate normal cone. For a
/// box intervention set the test is exact interval intersection. For
/// ball, subspace, or full-space sets the minimum-norm point of the
/// product cone is computed by shrinking each coordinate toward zero;
/// for a ball this is exact because both the squared norm and the
/// product cone are separable across coordinates, so the coordinatewise
/// minimizer of `‖F(x_opt)+v‖²` over the cone is the global one, and
/// membership of that point decides feasibility.
pub fn optimal_intervention(
    game: &NetworkGame,
    x_opt: &DVector<f64>,
    tol: f64,
) -> Result<FeasibilityVerdict, ViError> {
    let intervals = match game.action_set() {
        ConstraintSet::Box { intervals } => intervals,
        _ => return Err(ViError::NonBoxActionSet),
    };
    let distance = (x_opt - game.action_set().project(x_opt)?).norm();
    if distance > MEMBERSHIP_TOL {
        return Err(ViError::OutsideActionSet { distance });
    }

    let f = game.game_map(x_opt)?;
    let n = game.n();
    let cones: Vec<ScalarInterval> = (0..n)
        .map(|i| normal_cone_interval(&intervals[i], x_opt[i]))
        .collect();

    match game.intervention_set() {
        ConstraintSet::Box {
            intervals: u_intervals,
        } => {
            // Exact per-coordinate interval intersection.
            let mut u = DVector::zeros(n);
            let mut gap_sq = 0.0;
            for i in 0..n {
                let lo = (f[i] + cones[i].lo()).max(u_intervals[i].lo());
                let hi = (f[i] + cones[i].hi()).min(u_intervals[i].hi());
                if lo > hi {
                    gap_sq += (lo - hi) * (lo - hi);
                } else {
                    u[i] = min_norm_in(lo, hi);
                }
            }
            if gap_sq > 0.0 {
                return Ok(FeasibilityVerdict {
                    feasible: false,
                    u_opt: None,
                    normal_component: None,
                    residual: gap_sq.sqrt(),
                });
            }
            let residual = shifted_residual(game, x_opt, &u)?;
            Ok(FeasibilityVerdict {
                feasible: true,
                normal_component: Some(&u - &f),
                u_opt: Some(u),
                residual,
            })
        }
        u_set => {
            // Cone-minimal point: coordinatewise shrink toward zero.
            let u_star = DVector::from_iterator(
                n,
                (0..n).map(|i| min_norm_in(f[i] + cones[i].lo(), f[i] + cones[i].hi())),
            );
            let dist = (&u_star - u_set.project(&u_star)?).norm();
            if dist <= tol.max(MEMBERSHIP_TOL) {
                let residual = shifted_residual(game, x_opt, &u_star)?;
                Ok(FeasibilityVerdict {
                    feasible: true,
                    normal_component: Some(&u_star - &f),
                    u_opt: Some(u_star),
                    residual,
                })
            } else {
                Ok(FeasibilityVerdict {
                    feasible: false,
                    u_opt: None,
                    normal_component: None,
                    residual: dist,
                })
            }
        }
    }
}

/// Natural residual of `x` for the shifted game map `F − u` over the
/// action set.
pub fn shifted_residual(
    game: &NetworkGame,
    x: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<f64, ViError> {
    let drift = game.game_map(x)? - u;
    let projected = game.action_set().project(&(x - drift))?;
    Ok((x - projected).norm())
}

/// Welfare difference between the optimum and the equilibrium; the
/// efficiency loss the regulator wants to close.
pub fn welfare_gap(
    game: &NetworkGame,
    x_ne: &DVector<f64>,
    x_opt: &DVector<f64>,
) -> Result<f64, ViError> {
    Ok(game.welfare(x_opt)? - game.welfare(x_ne)?)
}

/// Solver residuals backing an [`AnalysisReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisResiduals {
    pub nash: Option<f64>,
    pub social: Option<f64>,
    pub intervention: Option<f64>,
}

/// Full equilibrium analysis of a game: spectral verdicts, both
/// equilibria, the open-loop intervention verdict, and the welfare gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub x_ne: Option<Vec<f64>>,
    pub x_opt: Option<Vec<f64>>,
    pub u_opt: Option<Vec<f64>>,
    pub feasible: bool,
    pub margin: f64,
    pub welfare_gap: Option<f64>,
    pub residuals: AnalysisResiduals,
    pub assumptions: crate::game::AssumptionReport,
}

/// Runs the analysis pipeline. Spectral failure is reported, not thrown:
/// the equilibrium fields stay empty when the margin is non-positive.
pub fn analyze(game: &NetworkGame, tol: f64, max_iters: usize) -> Result<AnalysisReport, ViError> {
    let assumptions = game.check_assumptions();
    if !assumptions.assumption2_ok {
        return Ok(AnalysisReport {
            x_ne: None,
            x_opt: None,
            u_opt: None,
            feasible: false,
            margin: assumptions.margin,
            welfare_gap: None,
            residuals: AnalysisResiduals {
                nash: None,
                social: None,
                intervention: None,
            },
            assumptions,
        });
    }
    let nash_vi = AffineVi::new(
        game.game_matrix(),
        game.marginal_returns().clone(),
        game.action_set().clone(),
    );
    let social_vi = AffineVi::new(
        game.welfare_matrix(),
        game.marginal_returns().clone(),
        game.action_set().clone(),
    );
    let x_ne = nash_vi.solve(tol, max_iters)?;
    let x_opt = social_vi.solve(tol, max_iters)?;
    let verdict = optimal_intervention(game, &x_opt, 10.0 * tol)?;
    let gap = welfare_gap(game, &x_ne, &x_opt)?;
    Ok(AnalysisReport {
        x_ne: Some(x_ne.iter().copied().collect()),
        x_opt: Some(x_opt.iter().copied().collect()),
        u_opt: verdict.u_opt.as_ref().map(|u| u.iter().copied().collect()),
        feasible: verdict.feasible,
        margin: assumptions.margin,
        welfare_gap: Some(gap),
        residuals: AnalysisResiduals {
            nash: Some(nash_vi.natural_residual(&x_ne)?),
            social: Some(social_vi.natural_residual(&x_opt)?),
            intervention: Some(verdict.residual),
        },
        assumptions,
    })
}
