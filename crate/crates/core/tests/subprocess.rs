use std::sync::Arc;

use trfds::problem::SubprocessOracle;
use trfds::{default_config, solve, Problem};

// One awk process per request: some awks buffer stdin until end of input.
const SHIFTED_SPHERE: &str = r#"while read -r line; do echo "$line" | awk '{ s = 0; for (i = 1; i <= NF; i++) s += ($i - 1) ^ 2; printf "%.17g\n", s }'; done"#;

#[test]
fn solve_through_external_program() {
    let oracle = SubprocessOracle::<f64>::spawn(SHIFTED_SPHERE).unwrap();
    let p = Problem::new("external", vec![0.0, 0.0, 0.0], Arc::new(oracle));
    let mut config = default_config(3);
    config.budget_simplex_gradients = 40;
    let record = solve(&p, &config).unwrap();
    assert!(record.f_best < 1e-6, "f = {}", record.f_best);
    assert_eq!(p.evaluation_count(), record.evaluations);
    for v in &record.x_best {
        assert!((v - 1.0).abs() < 1e-3);
    }
}

#[test]
fn protocol_failure_ends_the_run() {
    // Answers the first request, then emits garbage.
    let oracle = SubprocessOracle::<f64>::spawn(r#"read l; echo 1; while read l; do echo oops; done"#).unwrap();
    let p = Problem::new("flaky", vec![0.0, 0.0], Arc::new(oracle));
    let record = solve(&p, &default_config(2)).unwrap();
    assert!(matches!(record.termination, trfds::Termination::OracleFailure(_)));
    assert_eq!(record.f_best, 1.0);
}

#[test]
fn failure_at_start_is_an_error() {
    let oracle = SubprocessOracle::<f64>::spawn("while read l; do echo nan; done").unwrap();
    let p = Problem::new("nan", vec![0.0], Arc::new(oracle));
    assert!(solve(&p, &default_config(1)).is_err());
}
