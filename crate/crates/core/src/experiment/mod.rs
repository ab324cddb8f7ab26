//! Config-driven experiments: single runs with a JSON report and sweeps
//! with a CSV table.

mod config;
mod run;
mod sweep;

pub use config::{Attack, ExperimentConfig, Mode, Protocol, DEFAULT_TRIALS};
pub use run::{exit_code, report_json, run_experiment, sample_transcript};
pub use sweep::{csv_row, sweep, to_csv, CorruptAxis, SweepSpec, CSV_HEADER};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Metric;

    const DIAMOND: &str = r#"{"nodes":["a","v1","v2","b"],"edges":[["a","v1"],["v1","b"],["a","v2"],["v2","b"]],
        "alice":"a","bob":"b","corrupt":["v2"],"controller":"alice","paths":[["a","v1","b"],["a","v2","b"]]"#;

    fn config(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!("{DIAMOND}{extra}}}")).unwrap()
    }

    fn value(m: &Option<Metric>) -> String {
        m.as_ref().unwrap().exact.clone().unwrap()
    }

    #[test]
    fn diamond_p1_exact() {
        let r = run_experiment(&config("")).unwrap();
        assert_eq!(value(&r.epsilon_receiver), "0");
        assert_eq!(value(&r.epsilon_sender), "0");
        assert_eq!(value(&r.correctness_rate), "1");
        assert!(r.is_clean());
        assert_eq!(exit_code(&Ok(r)), 0);
    }

    #[test]
    fn every_protocol_runs_clean() {
        for p in ["p2", "hybrid1", "hybrid2", "weak", "tamper"] {
            let r = run_experiment(&config(&format!(r#","protocol":"{p}""#))).unwrap();
            assert!(r.is_clean(), "{p}: {:?}", r.violations);
        }
        let r = run_experiment(&config(r#","protocol":"combined","group":{"p":7,"q":3,"g":2}"#)).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
    }

    #[test]
    fn attacks_run() {
        let r = run_experiment(&config(r#","protocol":"tamper","attack":"tamper","k":4,"open_fraction":0.5"#)).unwrap();
        assert_eq!(r.details["detection_probability"].exact.as_deref(), Some("3/4"));
        let r = run_experiment(&config(r#","attack":"collude","ell":2"#)).unwrap();
        assert_eq!(r.details["hidden_guess_max"].exact.as_deref(), Some("1/4"));
        let r = run_experiment(&config(r#","attack":"reduction""#)).unwrap();
        assert!(r.is_clean());
        assert!(run_experiment(&config(r#","attack":"claim2""#)).is_err());
        let r = run_experiment(&config(r#","attack":"claim2","corrupt":["v1","v2"]"#)).unwrap();
        assert_eq!(r.details["success"].exact.as_deref(), Some("3/4"));
    }

    #[test]
    fn montecarlo_is_reproducible() {
        let cfg = config(r#","attack":"claim2","corrupt":["v1","v2"],"mode":"montecarlo","trials":2000,"seed":5"#);
        let a = report_json(&run_experiment(&cfg).unwrap()).unwrap();
        let b = report_json(&run_experiment(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_rows() {
        let base = config("");
        assert_eq!(to_csv(&sweep(&base, &SweepSpec::from_json("{}").unwrap()).unwrap()), format!("{CSV_HEADER}\n"));
        let spec = SweepSpec::from_json(r#"{"corrupt":"all"}"#).unwrap();
        let rows = sweep(&base, &spec).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.epsilon_receiver.as_ref().unwrap().exact.as_deref() == Some("0"), r.meta.honest_path);
        }
        assert!(SweepSpec::from_json(r#"{"bogus":[1]}"#).is_err());
    }
}
