//! The bundled scenario files load, pass the assumption checker, and
//! reproduce their frozen regression optima.

use std::path::{Path, PathBuf};

use netsteer::equilibria::{self, DEFAULT_MAX_ITERS};
use netsteer::scenarios::load_scenario;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

#[test]
fn cournot_taxes_loads_and_reproduces_its_optimum() {
    let spec = load_scenario(scenario("cournot_taxes.json")).unwrap();
    assert_eq!(spec.label, "cournot_taxes");
    assert_eq!(spec.game.n(), 10);
    // The cournot block maps to a = −β.
    assert_eq!(spec.game.coupling(), -0.2);
    let report = spec.game.check_assumptions();
    assert!(report.assumption2_ok, "margin {}", report.margin);

    let x_opt = equilibria::social_optimum(&spec.game, 1e-11, DEFAULT_MAX_ITERS).unwrap();
    let frozen = spec
        .x_opt_regression
        .as_ref()
        .expect("regression pin present");
    assert!(
        (&x_opt - frozen).amax() <= 1e-8,
        "regression drift: {:?} vs {:?}",
        x_opt.as_slice(),
        frozen.as_slice()
    );
    // Mixed interior/boundary optimum: some firms shut down.
    assert!(x_opt.iter().any(|&v| v == 0.0));
    assert!(x_opt.iter().any(|&v| v > 0.5));
    // Bounded taxes are feasible for it.
    let verdict = equilibria::optimal_intervention(&spec.game, &x_opt, 1e-9).unwrap();
    assert!(verdict.feasible);
    assert!(verdict
        .u_opt
        .unwrap()
        .iter()
        .all(|&u| (-2.0..=0.0).contains(&u)));
}

#[test]
fn cournot_adaptive_loads_and_reproduces_its_optimum() {
    let spec = load_scenario(scenario("cournot_adaptive.json")).unwrap();
    assert_eq!(spec.label, "cournot_adaptive");
    let report = spec.game.check_assumptions();
    assert!(report.assumption2_ok && report.symmetric);
    assert!(spec.game.action_set().is_all_of_rn());
    assert!(spec.game.intervention_set().is_all_of_rn());

    let x_opt = equilibria::social_optimum(&spec.game, 1e-11, DEFAULT_MAX_ITERS).unwrap();
    let frozen = spec
        .x_opt_regression
        .as_ref()
        .expect("regression pin present");
    assert!((&x_opt - frozen).amax() <= 1e-8);
    // Taxes and subsidies both appear: mixed-sign optimum.
    assert!(x_opt.iter().any(|&v| v > 0.0) && x_opt.iter().any(|&v| v < 0.0));
}

#[test]
fn small_bundled_scenarios_load() {
    for name in [
        "g2_open_loop.json",
        "margin_violation.json",
        "subspace_infeasible.json",
        "weak_coupling.json",
    ] {
        let spec = load_scenario(scenario(name)).unwrap();
        assert_eq!(spec.game.n(), 2, "{name}");
    }
    // The margin-violation scenario pairs a = −1 with λ_min = −2:
    // a·λ_min = (−1)(−2) = 2, margin = −1.
    let spec = load_scenario(scenario("margin_violation.json")).unwrap();
    let report = spec.game.check_assumptions();
    assert!((report.margin - -1.0).abs() < 1e-12);
    assert!(!report.assumption2_ok);
}
