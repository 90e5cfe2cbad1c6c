use plurizero::config::{validate_config, ConfigError};
use plurizero::experiments::run_experiment;
use plurizero::report::ExperimentReport;

const DISK: &str = "[compact]\nkind = \"unit_disk\"\n[[test_forms]]\ncenter = [[1.0, 0.0]]\nradius = 0.5\n";

fn errors(text: &str) -> Vec<ConfigError> {
    validate_config(text).unwrap_err()
}

#[test]
fn heavy_tail_gamma_at_most_two_m_is_rejected() {
    let es = errors(&format!(
        "experiment = \"expected\"\nseed = 1\ndegrees = [10, 20, 40]\ntrials = 10\n[ensemble]\nlaw = \"heavy_tail\"\ngamma = 2.0\n{DISK}"
    ));
    assert!(es.iter().any(|e| e.path == "ensemble.gamma" && e.message.contains("gamma must exceed 2m")), "{es:?}");
}

#[test]
fn variance_with_alpha_one_is_rejected() {
    let es = errors(&format!(
        "experiment = \"variance\"\nseed = 1\ndegrees = [10, 20, 40, 80]\ntrials = 10\n[ensemble]\nlaw = \"gaussian\"\nalpha = 1.0\n{DISK}"
    ));
    assert!(es.iter().any(|e| e.path == "ensemble.alpha"), "{es:?}");
}

#[test]
fn variance_report_has_slope_and_ratios() {
    let cfg = validate_config(&format!(
        "experiment = \"variance\"\nseed = 2\ndegrees = [10, 20, 40, 80]\ntrials = 100\n[ensemble]\nlaw = \"gaussian\"\n{DISK}"
    ))
    .unwrap();
    let rep = run_experiment(&cfg, 2).unwrap();
    assert_eq!(rep.probes, "variance-bound");
    assert_eq!(rep.fits.len(), 1);
    assert!(rep.rows.iter().all(|r| r.audit_ratio.is_some()));
    let names: Vec<String> = rep.tables().into_iter().map(|(n, _)| n).collect();
    assert!(names.contains(&"slopes".to_string()) && names.contains(&"pairings".to_string()));
}

#[test]
fn report_json_round_trips() {
    let cfg = validate_config(
        "experiment = \"projective\"\nseed = 5\ndegrees = [3, 5]\ntrials = 6\n[ensemble]\nlaw = \"gaussian\"\n[projective]\nm = 2\n",
    )
    .unwrap();
    let rep = run_experiment(&cfg, 1).unwrap();
    let json = rep.to_json().unwrap();
    let back = ExperimentReport::from_json(&json).unwrap();
    assert_eq!(back.to_json().unwrap(), json);
    assert!(back.config.workers.is_none());
}

#[test]
fn tight_tolerance_fails_an_audit() {
    let cfg = validate_config(&format!(
        "experiment = \"expected\"\nseed = 3\ndegrees = [20]\ntrials = 20\n[audit]\ndeviation_tolerance = 1e-12\n[ensemble]\nlaw = \"gaussian\"\n{DISK}"
    ))
    .unwrap();
    let rep = run_experiment(&cfg, 1).unwrap();
    assert!(!rep.all_passed());
    assert!(rep.failed_audits().count() >= 1);
}
