//! Linear-quadratic network games under regulator interventions.
//!
//! The crate models a population of players coupled through a weighted
//! network, each ascending her own payoff gradient over a convex action
//! set, while a central regulator injects interventions to steer the
//! population toward the welfare optimum. It provides:
//!
//! - convex constraint sets with Euclidean and tangent-cone projections
//!   ([`sets`]),
//! - the game itself: payoffs, welfare, pseudo-gradient maps, and the
//!   spectral condition that guarantees a unique optimum ([`game`]),
//! - affine variational-inequality solvers for the Nash equilibrium, the
//!   social optimum, and the welfare-optimal intervention ([`equilibria`]),
//! - four intervention protocols (open-loop, static feedback, integral,
//!   adaptive) as explicit state machines ([`protocols`]),
//! - a projected-Euler simulation engine with Lyapunov monitoring
//!   ([`sim`]),
//! - scenario construction and JSON I/O, including the Cournot
//!   competition mapping ([`scenarios`]).

pub mod equilibria;
pub mod game;
mod linalg;
pub mod protocols;
pub mod scenarios;
pub mod sets;
pub mod sim;

pub use equilibria::{AffineVi, AnalysisReport, FeasibilityVerdict};
pub use game::{AssumptionReport, NetworkGame};
pub use protocols::{ProtocolKind, ProtocolOptions, ProtocolState};
pub use scenarios::{CournotParams, ScenarioSpec};
pub use sets::{ConstraintSet, ScalarInterval};
pub use sim::{SimConfig, Trajectory};
