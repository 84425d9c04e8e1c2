use std::fs;
use std::path::Path;

use holder_lift::harness::{
    run_experiment, ExperimentConfig, HarnessError, Prediction, SolverId, Transform, OUTPUT_ROOT_ENV,
};
use holder_lift::problems::ProblemSpec;
use holder_lift::rates::{Rate, RateQuery};

fn config(solver: SolverId, x0: f64, epsilon: f64, out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        problem: ProblemSpec::power_norm(1.0, 1.0, vec![0.0]),
        solver,
        smoothness: None,
        restart: false,
        x0: vec![x0],
        epsilon,
        max_iter: 1000,
        rho: 1.0,
        record_trace: true,
        predictions: Vec::new(),
        envelope: false,
        output_dir: out.to_path_buf(),
        seed: 7,
    }
}

fn predict(rate: Rate) -> Prediction {
    Prediction { rate, transform: Transform::None, query: RateQuery::default() }
}

#[test]
fn polyak_on_abs_beats_sharp_rate() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(SolverId::PolyakSubgradient, 10.0, 1e-6, dir.path());
    cfg.predictions.push(predict(Rate::SubgradSharp));
    let report = run_experiment(&cfg).unwrap();
    let c = &report.comparisons[0].comparison;
    assert_eq!(c.observed_iterations, 1);
    assert_eq!(c.predicted_ceiled, (4.0 * (10.0f64 / 1e-6).log2()).ceil());
    assert_eq!(c.bound_respected, Some(true));
    assert!(report.passed());
}

#[test]
fn prox_on_abs_meets_finite_termination_bound() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(SolverId::ProximalPoint, 10.0, 1e-9, dir.path());
    cfg.predictions.push(predict(Rate::ProxSharp));
    let report = run_experiment(&cfg).unwrap();
    let c = &report.comparisons[0].comparison;
    assert_eq!(c.predicted_ceiled, 10.0);
    assert!(c.observed_iterations <= 10);
    assert_eq!(c.bound_respected, Some(true));
}

#[test]
fn invalid_configs_list_every_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(SolverId::ProximalPoint, 1.0, 0.0, dir.path());
    cfg.rho = -1.0;
    cfg.x0 = vec![1.0, 2.0];
    match run_experiment(&cfg) {
        Err(HarnessError::InvalidConfig(fields)) => {
            let joined = fields.join("\n");
            for name in ["epsilon", "rho", "x0"] {
                assert!(joined.contains(name), "{name} missing from {joined}");
            }
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
    let mut gd = config(SolverId::HolderGradientDescent, 1.0, 1e-3, dir.path());
    gd.envelope = true;
    gd.problem = ProblemSpec::power_norm(1.0, 1.0, vec![0.0, 0.0]);
    gd.x0 = vec![1.0, 0.0];
    let err = run_experiment(&gd).unwrap_err().to_string();
    assert!(err.contains("smoothness") && err.contains("envelope"), "{err}");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(SolverId::HolderGradientDescent, 3.0, 1e-8, dir.path());
    cfg.problem = ProblemSpec::power_norm(0.5, 1.5, vec![0.25]);
    cfg.restart = true;
    cfg.envelope = true;
    cfg.predictions = vec![
        Prediction { rate: Rate::SubgradSharp, transform: Transform::LiftGeneral, query: RateQuery::default() },
        predict("table:gd:general".parse().unwrap()),
    ];
    let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
    run_experiment(&cfg).unwrap();
    let first = (read("trace.csv"), read("report.json"), read("envelope.csv"));
    run_experiment(&cfg).unwrap();
    let second = (read("trace.csv"), read("report.json"), read("envelope.csv"));
    assert_eq!(first, second);
    let header = String::from_utf8(first.0).unwrap();
    assert!(header.starts_with("k,restart_epoch,x,f,grad_norm,gamma,f_candidate,gap,dist\n"));
    let env = String::from_utf8(first.2).unwrap();
    assert!(env.starts_with("x,f,min_models,h\n"));
}

#[test]
fn asymptotic_predictions_are_reported_but_not_asserted() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(SolverId::PolyakSubgradient, 4.0, 1e-3, dir.path());
    cfg.predictions.push(predict("table:bundle:general".parse().unwrap()));
    let report = run_experiment(&cfg).unwrap();
    let c = &report.comparisons[0].comparison;
    assert!(c.asymptotic_only);
    assert_eq!(c.bound_respected, None);
    let json = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(!json.contains("bound_respected"));
}

#[test]
fn config_round_trips_through_json() {
    let mut cfg = config(SolverId::PolyakSubgradient, 2.0, 1e-4, Path::new("runs/a"));
    cfg.problem = ProblemSpec::piecewise_max(vec![vec![2.0], vec![-1.0]], vec![0.0, 0.0], vec![0.0]).with_radius(3.0);
    cfg.restart = true;
    cfg.predictions = vec![Prediction {
        rate: Rate::SubgradQuadratic,
        transform: Transform::RestartGrowth,
        query: RateQuery::new().q(3.0).lipschitz(4.0),
    }];
    let text = cfg.to_json();
    assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);

    let minimal = r#"{
        "problem": {"kind": "power_norm", "alpha": 1, "p": 1, "x_star": [0], "dimension": 1},
        "solver": "polyak",
        "x0": [5],
        "epsilon": 0.001,
        "output_dir": "out",
        "predictions": [{"rate": "subgrad_sharp"}]
    }"#;
    let parsed = ExperimentConfig::from_json(minimal).unwrap();
    assert_eq!(parsed.solver, SolverId::PolyakSubgradient);
    assert_eq!(parsed.predictions[0].rate, Rate::SubgradSharp);
    assert_eq!(ExperimentConfig::from_json(&parsed.to_json()).unwrap(), parsed);
    assert!(ExperimentConfig::from_json(&minimal.replace("\"x0\"", "\"x00\"")).is_err());
}

#[test]
fn output_root_variable_prefixes_relative_dirs() {
    let root = tempfile::tempdir().unwrap();
    std::env::set_var(OUTPUT_ROOT_ENV, root.path());
    let cfg = config(SolverId::PolyakSubgradient, 2.0, 1e-3, Path::new("nested/run"));
    let resolved = cfg.resolved_output_dir();
    let absolute = config(SolverId::PolyakSubgradient, 2.0, 1e-3, root.path());
    let unchanged = absolute.resolved_output_dir();
    run_experiment(&cfg).unwrap();
    std::env::remove_var(OUTPUT_ROOT_ENV);
    assert_eq!(resolved, root.path().join("nested/run"));
    assert_eq!(unchanged, root.path());
    assert!(root.path().join("nested/run/report.json").exists());
}
