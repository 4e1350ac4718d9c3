use theta_core::recovery::{
    gaussian_map, phase_rows, phase_table, run_experiment, run_trials, trial_rng, ExperimentConfig,
};
use theta_core::tensor::Dims;

fn small_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new("2x2x3".parse::<Dims>().unwrap(), 1, vec![4, 12]);
    cfg.trials = 8;
    cfg.seed = 3;
    cfg
}

#[test]
fn endpoints_of_the_small_sweep() {
    let stats = run_experiment(&small_config()).unwrap();
    assert_eq!(stats.record(4).unwrap().success_rate, 0.0);
    assert_eq!(stats.record(12).unwrap().success_rate, 1.0);
    assert_eq!(stats.m0, Some(4));
    assert_eq!(stats.m1, Some(12));
    assert!(stats.monotonicity_violations().is_empty());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut one = small_config();
    one.threads = Some(1);
    let mut four = small_config();
    four.threads = Some(4);
    let a = run_trials(&one).unwrap();
    let b = run_trials(&four).unwrap();
    let errs = |v: &[theta_core::recovery::TrialOutcome]| v.iter().map(|o| (o.m, o.trial, o.error)).collect::<Vec<_>>();
    assert_eq!(errs(&a), errs(&b));
}

#[test]
fn trial_streams_are_distinct() {
    use rand::Rng;
    let a: u64 = trial_rng(1, 5, 0).random();
    let b: u64 = trial_rng(1, 5, 1).random();
    let c: u64 = trial_rng(1, 6, 0).random();
    assert!(a != b && a != c && b != c);
    assert_eq!(a, trial_rng(1, 5, 0).random::<u64>());
}

#[test]
fn phase_table_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config();
    cfg.m_values = vec![4, 8, 12];
    cfg.trials = 4;
    let art = phase_table(&cfg, dir.path()).unwrap();
    let csv = std::fs::read_to_string(&art.csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "m,m_rel,m_over_3nr,m_over_3nr_logn,success_rate,median_err,mean_seconds");
    assert_eq!(lines.count(), 3);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&art.json).unwrap()).unwrap();
    assert_eq!(json["m0"], 4);
    assert_eq!(json["m1"], 12);
    let rows = phase_rows(&art.stats);
    assert!((rows[2].m_rel - 100.0).abs() < 1e-12);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = small_config();
    cfg.trials = 0;
    assert!(run_experiment(&cfg).is_err());
    let mut cfg = small_config();
    cfg.threshold = 0.0;
    assert!(run_experiment(&cfg).is_err());
    assert!(gaussian_map(&"2x2".parse().unwrap(), 0, 1).is_err());
}
