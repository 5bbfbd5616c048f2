//! Scenario construction and JSON I/O.
//!
//! A scenario bundles a game, a protocol choice, simulation parameters,
//! and an initial profile into one JSON file. Games can be given
//! directly (`a`, `b`) or through the Cournot competition parameters
//! (`cournot: {alpha, d, beta}`), which map onto the game as `a = −β`
//! and `b = α − d`. The module also builds randomized games calibrated
//! to an exact spectral margin, for test fleets and sweeps.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibria::AnalysisReport;
use crate::game::{GameError, NetworkGame};
use crate::protocols::ProtocolKind;
use crate::sets::{ConstraintSet, SetError};
use crate::sim::{RunSummary, SimConfig, Trajectory};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("scenario must provide either `a` (with `b`) or a `cournot` block, not both")]
    AmbiguousCoupling,
    #[error("scenario provides neither `a`+`b` nor a `cournot` block")]
    MissingCoupling,
    #[error("field {field} has length {got}, expected {expected}")]
    BadLength {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("adjacency matrix P must hold n² = {expected} row-major entries, got {got}")]
    BadMatrixLength { expected: usize, got: usize },
    #[error("cournot beta must be positive, got {0}")]
    NonPositiveBeta(f64),
    #[error("cournot alpha must be positive, got {0} at firm {1}")]
    NonPositiveAlpha(f64, usize),
    #[error("cournot marginal cost must be positive, got {0} at firm {1}")]
    NonPositiveCost(f64, usize),
    #[error("random game: adjacency stayed empty after 100 draws")]
    DegenerateNetwork,
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Cournot competition with differentiated goods: `n` firms, inverse
/// demand `p_i(x) = α_i − ½(x_i + 2β Σ_{j≠i} P_ij x_j)`, marginal costs
/// `d_i`, substitution weights `P` scaled by `β`.
#[derive(Debug, Clone)]
pub struct CournotParams {
    /// Maximum willingness-to-pay per firm, currency units.
    pub alpha: DVector<f64>,
    /// Marginal cost per firm, currency units.
    pub d: DVector<f64>,
    /// Degree of product substitutability.
    pub beta: f64,
    /// Substitution weights in [0, 1], zero diagonal.
    pub substitution: DMatrix<f64>,
    pub action_set: ConstraintSet,
    pub intervention_set: ConstraintSet,
}

impl CournotParams {
    fn validate(&self) -> Result<(), ScenarioError> {
        if self.beta.is_nan() || self.beta <= 0.0 {
            return Err(ScenarioError::NonPositiveBeta(self.beta));
        }
        for (i, &a) in self.alpha.iter().enumerate() {
            if a.is_nan() || a <= 0.0 {
                return Err(ScenarioError::NonPositiveAlpha(a, i));
            }
        }
        for (i, &c) in self.d.iter().enumerate() {
            if c.is_nan() || c <= 0.0 {
                return Err(ScenarioError::NonPositiveCost(c, i));
            }
        }
        if self.alpha.len() != self.d.len() {
            return Err(ScenarioError::BadLength {
                field: "d",
                expected: self.alpha.len(),
                got: self.d.len(),
            });
        }
        Ok(())
    }
}

/// Maps Cournot competition onto the network game: `a = −β`,
/// `b = α − d`, same substitution network and sets.
pub fn cournot_to_game(params: &CournotParams) -> Result<NetworkGame, ScenarioError> {
    params.validate()?;
    Ok(NetworkGame::new(
        params.substitution.clone(),
        -params.beta,
        &params.alpha - &params.d,
        params.action_set.clone(),
        params.intervention_set.clone(),
    )?)
}

/// Sign of the coupling scalar drawn by [`random_game`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingSign {
    Positive,
    Negative,
}

fn draw_adjacency(
    rng: &mut ChaCha8Rng,
    n: usize,
    density: f64,
    symmetric: bool,
) -> Result<DMatrix<f64>, ScenarioError> {
    for _ in 0..100 {
        let mut p = DMatrix::zeros(n, n);
        for i in 0..n {
            let js = if symmetric { (i + 1)..n } else { 0..n };
            for j in js {
                if i != j && rng.gen_bool(density) {
                    // Weights uniform in (0, 1].
                    let w = 1.0 - rng.gen_range(0.0..1.0);
                    p[(i, j)] = w;
                    if symmetric {
                        p[(j, i)] = w;
                    }
                }
            }
        }
        if p.iter().any(|&v| v != 0.0) {
            return Ok(p);
        }
    }
    Err(ScenarioError::DegenerateNetwork)
}

fn calibrate_coupling(p: &DMatrix<f64>, sign: CouplingSign, margin: f64) -> f64 {
    let sym = p + p.transpose();
    let (lo, hi) = crate::linalg::symmetric_eigen_bounds(&sym);
    // Scale a so that 1 − a·λ_extreme(P+Pᵀ) equals the margin exactly,
    // with the extreme eigenvalue picked by the sign of a.
    match sign {
        CouplingSign::Positive => (1.0 - margin) / hi,
        CouplingSign::Negative => (1.0 - margin) / lo,
    }
}

/// Draws a random game whose spectral margin equals `margin` exactly.
///
/// The adjacency has zero diagonal and off-diagonal entries present with
/// probability `density` and weights uniform in (0, 1]; standalone
/// returns are uniform in [0.5, 1.5]; the action set is the box
/// `[0, 10]ⁿ` and the intervention set the full space. Deterministic in
/// the seed.
pub fn random_game(
    n: usize,
    density: f64,
    a_sign: CouplingSign,
    margin: f64,
    seed: u64,
) -> Result<NetworkGame, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = draw_adjacency(&mut rng, n, density, false)?;
    let a = calibrate_coupling(&p, a_sign, margin);
    let b = DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(0.5..1.5)));
    Ok(NetworkGame::new(
        p,
        a,
        b,
        ConstraintSet::uniform_box(0.0, 10.0, n)?,
        ConstraintSet::full(n),
    )?)
}

/// As [`random_game`] but with a symmetric adjacency and unconstrained
/// action and intervention sets, ready for the adaptive protocol.
pub fn random_symmetric_game(
    n: usize,
    density: f64,
    a_sign: CouplingSign,
    margin: f64,
    seed: u64,
) -> Result<NetworkGame, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = draw_adjacency(&mut rng, n, density, true)?;
    let a = calibrate_coupling(&p, a_sign, margin);
    let b = DVector::from_iterator(n, (0..n).map(|_| rng.gen_range(0.5..1.5)));
    Ok(NetworkGame::new(
        p,
        a,
        b,
        ConstraintSet::Box {
            intervals: vec![crate::sets::ScalarInterval::unbounded(); n],
        },
        ConstraintSet::full(n),
    )?)
}

/// Protocol choice and its options as they appear in scenario files,
/// e.g. `{"protocol": "dynamic", "x_s": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    #[serde(rename = "protocol")]
    pub kind: ProtocolKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skip_assignability_check: bool,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind) -> Self {
        Self {
            kind,
            x_s: None,
            skip_assignability_check: false,
        }
    }
}

/// A fully resolved scenario: game, protocol, simulation parameters,
/// initial profile, and an optional frozen regression optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub game: NetworkGame,
    pub protocol: ProtocolSpec,
    pub sim: SimConfig,
    pub x0: DVector<f64>,
    pub label: String,
    /// Regression pin: the social optimum precomputed when the scenario
    /// was authored.
    pub x_opt_regression: Option<DVector<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CournotBlock {
    alpha: Vec<f64>,
    d: Vec<f64>,
    beta: f64,
}

/// On-disk shape of a scenario. `P` is row-major with explicit `n`.
#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    label: String,
    n: usize,
    #[serde(rename = "P")]
    p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cournot: Option<CournotBlock>,
    action_set: ConstraintSet,
    intervention_set: ConstraintSet,
    protocol: ProtocolSpec,
    #[serde(default)]
    sim: SimConfig,
    x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_opt_regression: Option<Vec<f64>>,
}

fn resolve(file: ScenarioFile) -> Result<ScenarioSpec, ScenarioError> {
    let n = file.n;
    if file.p.len() != n * n {
        return Err(ScenarioError::BadMatrixLength {
            expected: n * n,
            got: file.p.len(),
        });
    }
    let adjacency = DMatrix::from_row_slice(n, n, &file.p);
    let action_set = file.action_set.with_dim(n)?;
    let intervention_set = file.intervention_set.with_dim(n)?;
    let game = match (file.a, file.b, file.cournot) {
        (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => {
            return Err(ScenarioError::AmbiguousCoupling)
        }
        (Some(a), Some(b), None) => {
            if b.len() != n {
                return Err(ScenarioError::BadLength {
                    field: "b",
                    expected: n,
                    got: b.len(),
                });
            }
            NetworkGame::new(
                adjacency,
                a,
                DVector::from_vec(b),
                action_set,
                intervention_set,
            )?
        }
        (None, None, Some(block)) => {
            if block.alpha.len() != n {
                return Err(ScenarioError::BadLength {
                    field: "cournot.alpha",
                    expected: n,
                    got: block.alpha.len(),
                });
            }
            cournot_to_game(&CournotParams {
                alpha: DVector::from_vec(block.alpha),
                d: DVector::from_vec(block.d),
                beta: block.beta,
                substitution: adjacency,
                action_set,
                intervention_set,
            })?
        }
        _ => return Err(ScenarioError::MissingCoupling),
    };
    if file.x0.len() != n {
        return Err(ScenarioError::BadLength {
            field: "x0",
            expected: n,
            got: file.x0.len(),
        });
    }
    if let Some(ref xr) = file.x_opt_regression {
        if xr.len() != n {
            return Err(ScenarioError::BadLength {
                field: "x_opt_regression",
                expected: n,
                got: xr.len(),
            });
        }
    }
    if let Some(ref xs) = file.protocol.x_s {
        if xs.len() != n {
            return Err(ScenarioError::BadLength {
                field: "protocol.x_s",
                expected: n,
                got: xs.len(),
            });
        }
    }
    Ok(ScenarioSpec {
        game,
        protocol: file.protocol,
        sim: file.sim,
        x0: DVector::from_vec(file.x0),
        label: file.label,
        x_opt_regression: file.x_opt_regression.map(DVector::from_vec),
    })
}

fn to_file(spec: &ScenarioSpec) -> ScenarioFile {
    let game = &spec.game;
    ScenarioFile {
        label: spec.label.clone(),
        n: game.n(),
        p: game.adjacency().transpose().as_slice().to_vec(),
        a: Some(game.coupling()),
        b: Some(game.marginal_returns().iter().copied().collect()),
        cournot: None,
        action_set: game.action_set().clone(),
        intervention_set: game.intervention_set().clone(),
        protocol: spec.protocol.clone(),
        sim: spec.sim,
        x0: spec.x0.iter().copied().collect(),
        x_opt_regression: spec
            .x_opt_regression
            .as_ref()
            .map(|x| x.iter().copied().collect()),
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioSpec, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    scenario_from_json(&text).map_err(|err| match err {
        ScenarioError::Parse { message, .. } => ScenarioError::Parse {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })
}

/// Parses a scenario from JSON text; parse errors carry serde's
/// line/column diagnostics.
pub fn scenario_from_json(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
        path: "<json>".into(),
        message: e.to_string(),
    })?;
    resolve(file)
}

pub fn scenario_to_json(spec: &ScenarioSpec) -> String {
    serde_json::to_string_pretty(&to_file(spec)).expect("scenario serialization cannot fail")
}

pub fn save_scenario(spec: &ScenarioSpec, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_json(spec) + "\n").map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes run artifacts into `dir`: `trajectory.csv`, `summary.json`,
/// and, when given, `analysis.json`.
pub fn save_results(
    dir: impl AsRef<Path>,
    traj: &Trajectory,
    summary: &RunSummary,
    report: Option<&AnalysisReport>,
) -> std::io::Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let csv = std::fs::File::create(dir.join("trajectory.csv"))?;
    crate::sim::write_trajectory_csv(traj, std::io::BufWriter::new(csv))?;
    std::fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(summary)? + "\n",
    )?;
    if let Some(report) = report {
        std::fs::write(
            dir.join("analysis.json"),
            serde_json::to_string_pretty(report)? + "\n",
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::ScalarInterval;
    use rand::Rng;

    fn cournot_two_firms() -> CournotParams {
        CournotParams {
            alpha: DVector::from_vec(vec![3.0, 3.0]),
            d: DVector::from_vec(vec![1.0, 1.0]),
            beta: 0.2,
            substitution: DMatrix::from_row_slice(2, 2, &[0.0, 0.6, 0.4, 0.0]),
            action_set: ConstraintSet::Box {
                intervals: vec![ScalarInterval::new(0.0, f64::INFINITY).unwrap(); 2],
            },
            intervention_set: ConstraintSet::uniform_box(-2.0, 0.0, 2).unwrap(),
        }
    }

    #[test]
    fn cournot_mapping_flips_beta_and_differences_returns() {
        let game = cournot_to_game(&cournot_two_firms()).unwrap();
        assert_eq!(game.coupling(), -0.2);
        assert_eq!(game.marginal_returns(), &DVector::from_vec(vec![2.0, 2.0]));
    }

    #[test]
    fn cournot_payoff_equivalence() {
        // x_i·p_i(x) − x_i·d_i + x_i·u_i must equal the game payoff,
        // which checks the inverse-demand algebra against the payoff
        // form.
        let params = cournot_two_firms();
        let game = cournot_to_game(&params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let x = DVector::from_iterator(2, (0..2).map(|_| rng.gen_range(0.0..4.0)));
            let u_i = rng.gen_range(-2.0..0.0);
            for i in 0..2 {
                let cross: f64 = (0..2)
                    .filter(|&j| j != i)
                    .map(|j| params.substitution[(i, j)] * x[j])
                    .sum();
                let price = params.alpha[i] - 0.5 * (x[i] + 2.0 * params.beta * cross);
                let direct = x[i] * price - x[i] * params.d[i] + x[i] * u_i;
                assert!((direct - game.payoff(i, &x, u_i).unwrap()).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn cournot_rejects_bad_parameters() {
        let mut p = cournot_two_firms();
        p.beta = 0.0;
        assert!(matches!(
            cournot_to_game(&p),
            Err(ScenarioError::NonPositiveBeta(_))
        ));
        let mut p = cournot_two_firms();
        p.d[1] = 0.0;
        assert!(matches!(
            cournot_to_game(&p),
            Err(ScenarioError::NonPositiveCost(..))
        ));
    }

    #[test]
    fn random_game_hits_requested_margin_exactly() {
        for (sign, seed) in [
            (CouplingSign::Positive, 1u64),
            (CouplingSign::Negative, 2),
            (CouplingSign::Positive, 3),
            (CouplingSign::Negative, 4),
        ] {
            let margin = 0.37;
            let game = random_game(6, 0.5, sign, margin, seed).unwrap();
            let report = game.check_assumptions();
            assert!(report.assumption2_ok);
            assert!(
                (report.margin - margin).abs() <= 1e-9,
                "calibrated margin {} vs requested {margin}",
                report.margin
            );
            match sign {
                CouplingSign::Positive => assert!(game.coupling() > 0.0),
                CouplingSign::Negative => assert!(game.coupling() < 0.0),
            }
            for i in 0..6 {
                assert_eq!(game.adjacency()[(i, i)], 0.0);
            }
        }
    }

    #[test]
    fn random_game_rejects_empty_networks() {
        assert!(matches!(
            random_game(4, 0.0, CouplingSign::Positive, 0.3, 1),
            Err(ScenarioError::DegenerateNetwork)
        ));
    }

    #[test]
    fn random_game_is_deterministic_in_the_seed() {
        let g1 = random_game(5, 0.4, CouplingSign::Negative, 0.3, 99).unwrap();
        let g2 = random_game(5, 0.4, CouplingSign::Negative, 0.3, 99).unwrap();
        assert_eq!(g1, g2);
        let g3 = random_game(5, 0.4, CouplingSign::Negative, 0.3, 100).unwrap();
        assert_ne!(g1, g3);
    }

    #[test]
    fn random_symmetric_game_is_symmetric() {
        let game = random_symmetric_game(7, 0.5, CouplingSign::Negative, 0.3, 5).unwrap();
        let report = game.check_assumptions();
        assert!(report.symmetric);
        assert!((report.margin - 0.3).abs() <= 1e-9);
        assert!(game.action_set().is_all_of_rn());
    }

    fn sample_spec() -> ScenarioSpec {
        let game = NetworkGame::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
            0.25,
            DVector::from_vec(vec![1.0, 1.0]),
            ConstraintSet::uniform_box(0.0, 3.0, 2).unwrap(),
            ConstraintSet::full(2),
        )
        .unwrap();
        ScenarioSpec {
            game,
            protocol: ProtocolSpec::new(ProtocolKind::OpenLoop),
            sim: SimConfig::default(),
            x0: DVector::from_vec(vec![0.0, 0.0]),
            label: "sample".into(),
            x_opt_regression: Some(DVector::from_vec(vec![2.0, 2.0])),
        }
    }

    #[test]
    fn scenario_round_trips_through_json() {
        let spec = sample_spec();
        let json = scenario_to_json(&spec);
        let back = scenario_from_json(&json).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn scenario_file_round_trips_through_disk() {
        let spec = sample_spec();
        let dir = std::env::temp_dir().join(format!("netsteer-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sample.json");
        save_scenario(&spec, &path).unwrap();
        let back = load_scenario(&path).unwrap();
        assert_eq!(spec, back);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn self_loop_in_file_is_a_named_error() {
        let json = r#"{
            "label": "bad", "n": 2,
            "P": [0.5, 0.0, 0.0, 0.0],
            "a": 0.25, "b": [1.0, 1.0],
            "action_set": {"kind": "box", "intervals": [[0, 1], [0, 1]]},
            "intervention_set": {"kind": "full", "dim": 2},
            "protocol": {"protocol": "open_loop"},
            "x0": [0.0, 0.0]
        }"#;
        match scenario_from_json(json) {
            Err(ScenarioError::Game(GameError::SelfLoopForbidden { i: 0, .. })) => {}
            other => panic!("expected SelfLoopForbidden, got {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_position_diagnostics() {
        let err = scenario_from_json("{ \"label\": ").unwrap_err();
        match err {
            ScenarioError::Parse { message, .. } => {
                assert!(message.contains("line"), "diagnostic was: {message}")
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn coupling_must_be_given_exactly_once() {
        let base = |coupling: &str| {
            format!(
                r#"{{
                "label": "x", "n": 2,
                "P": [0.0, 1.0, 1.0, 0.0],
                {coupling}
                "action_set": {{"kind": "box", "intervals": [[0, 1], [0, 1]]}},
                "intervention_set": {{"kind": "full", "dim": 2}},
                "protocol": {{"protocol": "open_loop"}},
                "x0": [0.0, 0.0]
            }}"#
            )
        };
        assert!(matches!(
            scenario_from_json(&base("")),
            Err(ScenarioError::MissingCoupling)
        ));
        let both = base(
            r#""a": 0.25, "b": [1.0, 1.0],
               "cournot": {"alpha": [3.0, 3.0], "d": [1.0, 1.0], "beta": 0.2},"#,
        );
        assert!(matches!(
            scenario_from_json(&both),
            Err(ScenarioError::AmbiguousCoupling)
        ));
    }

    #[test]
    fn cournot_scenario_parses_and_maps() {
        let json = r#"{
            "label": "cournot", "n": 2,
            "P": [0.0, 0.6, 0.4, 0.0],
            "cournot": {"alpha": [3.0, 3.0], "d": [1.0, 1.0], "beta": 0.2},
            "action_set": {"kind": "box", "intervals": [[0, "inf"], [0, "inf"]]},
            "intervention_set": {"kind": "box", "intervals": [[-2, 0], [-2, 0]]},
            "protocol": {"protocol": "dynamic", "x_s": [1.0, 1.0]},
            "sim": {"h": 0.001, "t_max": 50.0},
            "x0": [0.0, 0.0]
        }"#;
        let spec = scenario_from_json(json).unwrap();
        assert_eq!(spec.game.coupling(), -0.2);
        assert_eq!(spec.protocol.kind, ProtocolKind::Dynamic);
        assert_eq!(spec.sim.t_max, 50.0);
        // Defaults fill the unspecified sim fields.
        assert_eq!(spec.sim.record_stride, 10);
    }

    #[test]
    fn length_mismatches_name_the_field() {
        let json = r#"{
            "label": "x", "n": 2,
            "P": [0.0, 1.0, 1.0],
            "a": 0.25, "b": [1.0, 1.0],
            "action_set": {"kind": "box", "intervals": [[0, 1], [0, 1]]},
            "intervention_set": {"kind": "full", "dim": 2},
            "protocol": {"protocol": "open_loop"},
            "x0": [0.0, 0.0]
        }"#;
        assert!(matches!(
            scenario_from_json(json),
            Err(ScenarioError::BadMatrixLength {
                expected: 4,
                got: 3
            })
        ));

        let json = r#"{
            "label": "x", "n": 2,
            "P": [0.0, 1.0, 1.0, 0.0],
            "a": 0.25, "b": [1.0, 1.0],
            "action_set": {"kind": "box", "intervals": [[0, 1], [0, 1]]},
            "intervention_set": {"kind": "full", "dim": 2},
            "protocol": {"protocol": "open_loop"},
            "x0": [0.0]
        }"#;
        assert!(matches!(
            scenario_from_json(json),
            Err(ScenarioError::BadLength { field: "x0", .. })
        ));
    }
}
