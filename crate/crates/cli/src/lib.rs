//! Command-line front end for the `ncdegree` library.
//!
//! Each subcommand builds a [`commands::Report`] that is written to stdout or
//! `--out`. Exit codes: 0 success, 2 spec or usage error, 3 optimizer failure
//! or non-monotone bound family, 4 unbounded direction.

pub mod args;
pub mod cache;
pub mod commands;
mod error;
pub mod manifest;

pub use error::CliError;

use args::Command;

/// Runs one subcommand and writes its output. A partial report is written
/// before its failure is returned.
pub fn run(command: &Command) -> Result<(), CliError> {
    let (report, out) = match command {
        Command::Table1(a) => (commands::run_table1(a)?, &a.output.out),
        Command::PureBound(a) => (commands::run_pure_bound(a)?, &a.output.out),
        Command::Certify(a) => (commands::run_certify(a)?, &a.output.out),
        Command::Bound(a) => (commands::run_bound(a)?, &a.output.out),
    };
    commands::emit(&report, out.as_deref())?;
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::Cli;
    use crate::commands::{fmt_fixed, parse_sweep};
    use clap::Parser;
    use std::path::Path;

    fn parse(args: &[&str]) -> Command {
        let mut full = vec!["ncdegree"];
        full.extend_from_slice(args);
        Cli::try_parse_from(full).unwrap().command
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path.display().to_string()
    }

    const IDENTITY: &str = r#"{"type": "polynomial", "modes": 1, "terms": [{"m": [0], "n": [0], "re": 1.0}]}"#;
    const QUADRATURE: &str = r#"{"type": "polynomial", "modes": 1, "terms": [
        {"m": [0], "n": [0], "re": 1}, {"m": [1], "n": [1], "re": 2},
        {"m": [0], "n": [2], "re": 1}, {"m": [2], "n": [0], "re": 1}]}"#;

    #[test]
    fn fixed_point_never_negative_zero() {
        assert_eq!(fmt_fixed(-0.0, 2), "0.00");
        assert_eq!(fmt_fixed(-1e-9, 2), "0.00");
        assert_eq!(fmt_fixed(-0.004, 2), "0.00");
        assert_eq!(fmt_fixed(-0.006, 2), "-0.01");
        assert_eq!(fmt_fixed(0.4430709, 6), "0.443071");
    }

    #[test]
    fn sweeps() {
        assert_eq!(parse_sweep("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_sweep("0.2, 0.5").unwrap(), vec![0.2, 0.5]);
        assert_eq!(parse_sweep("2:9:1").unwrap(), vec![2.0]);
        for bad in ["", "a", "0:1", "0:1:0", "-1", "0:1:x", "nan"] {
            assert!(parse_sweep(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn table1_single_row() {
        let outcome = commands::compute_table1(1, &Default::default()).unwrap();
        assert_eq!(
            commands::table1_csv(&outcome.rows),
            "r,bound,squeezing_db,seed,status\n1,1.000000,0.00,20190517,ok\n"
        );
        for bad in [0, 10] {
            let err = commands::compute_table1(bad, &Default::default()).unwrap_err();
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn table1_overrides_are_recorded() {
        let cmd = parse(&["table1", "--max-r", "2", "--seed", "5", "--starts", "4", "--format", "json"]);
        let Command::Table1(args) = &cmd else { unreachable!() };
        let report = commands::run_table1(args).unwrap();
        let json: serde_json::Value = serde_json::from_str(&report.body).unwrap();
        assert_eq!(json["manifest"]["seed"], 5);
        assert_eq!(json["manifest"]["overrides"]["starts"], 4);
        assert_eq!(json["rows"][1]["seed"], 5);
        assert!((json["rows"][1]["bound"].as_f64().unwrap() - 0.443071).abs() < 1e-4);
    }

    #[test]
    fn bound_command_and_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let id = write(dir.path(), "id.json", IDENTITY);
        let quad = write(dir.path(), "quad.json", QUADRATURE);

        let Command::Bound(args) = parse(&["bound", "--spec", &id, "--r", "2"]) else { unreachable!() };
        let json: serde_json::Value = serde_json::from_str(&commands::run_bound(&args).unwrap().body).unwrap();
        assert!((json["result"]["bound"].as_f64().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(json["seed"], 20_190_517);

        let code = |args: &[&str]| run(&parse(args)).unwrap_err().exit_code();
        assert_eq!(code(&["bound", "--spec", &quad, "--r", "1", "--direction", "sup"]), 4);
        assert_eq!(code(&["bound", "--spec", &quad, "--r", "1", "--modes", "2"]), 2);
        assert_eq!(code(&["bound", "--spec", &quad, "--r", "1", "--format", "csv"]), 2);
        assert_eq!(code(&["bound", "--spec", "/nonexistent/spec.json", "--r", "1"]), 2);
        let garbage = write(dir.path(), "bad.json", "{\"type\": \"polynomial\"");
        assert_eq!(code(&["bound", "--spec", &garbage, "--r", "1"]), 2);
        assert_eq!(code(&["bound", "--spec", &quad, "--r", "1", "--starts", "0"]), 2);
    }

    #[test]
    fn certify_uses_and_fills_the_cache() {
        let dir = tempfile::tempdir().unwrap();
        let Command::Certify(args) = parse(&["certify", "--value", "0.3", "--max-r", "2", "--starts", "4"]) else {
            unreachable!()
        };
        let observable = ncdegree::spec::ObservableSpec::from_observable(&ncdegree::bounds::quadrature_observable());
        let manifest = manifest::RunManifest::new("certify", &args.optimizer, None);

        let mut offline = args.clone();
        offline.no_recompute = true;
        let err = commands::certify_report(&offline, observable.clone(), manifest.clone(), dir.path()).unwrap_err();
        assert_eq!(err.exit_code(), 2);

        let first = commands::certify_report(&args, observable.clone(), manifest.clone(), dir.path()).unwrap();
        assert_eq!(first.violated_r, vec![1, 2]);
        assert_eq!(first.degree_exceeds, Some(2));
        assert!(first.bounds[1].db.is_some());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

        let cached = commands::certify_report(&offline, observable, manifest, dir.path()).unwrap();
        assert_eq!(first, cached);
    }

    #[test]
    fn certify_needs_a_measurement() {
        let full = ["ncdegree", "certify", "--max-r", "2"];
        assert!(Cli::try_parse_from(full).is_err());
        let both = ["ncdegree", "certify", "--value", "1", "--db", "3"];
        assert!(Cli::try_parse_from(both).is_err());
    }

    #[test]
    fn cache_key_tracks_inputs() {
        let obs = ncdegree::spec::ObservableSpec::from_observable(&ncdegree::bounds::quadrature_observable());
        let base = args::OptimizerArgs::default();
        let seeded = args::OptimizerArgs {
            seed: Some(1),
            ..Default::default()
        };
        let key = cache::cache_key(&obs, ncdegree::Direction::Inf, &base);
        assert_eq!(key, cache::cache_key(&obs, ncdegree::Direction::Inf, &base));
        assert_ne!(key, cache::cache_key(&obs, ncdegree::Direction::Sup, &base));
        assert_ne!(key, cache::cache_key(&obs, ncdegree::Direction::Inf, &seeded));
        assert_eq!(key.len(), 64);
    }

    #[test]
    fn pure_bound_sweeps() {
        let state = r#"{"type": "compass", "R": 2, "beta": 1.0}"#;
        let (rows, _) = commands::compute_pure_bound(
            &serde_json::from_str(state).unwrap(),
            &[2, 1],
            Some(&[0.05, 3.0]),
            &Default::default(),
        )
        .unwrap();
        let summary: Vec<(f64, usize, String)> =
            rows.iter().map(|r| (r.value.unwrap(), r.r, fmt_fixed(r.bound, 3))).collect();
        assert_eq!(
            summary,
            vec![
                (0.05, 1, "1.000".into()),
                (0.05, 2, "1.000".into()),
                (3.0, 1, "0.500".into()),
                (3.0, 2, "1.000".into())
            ]
        );

        let fock = serde_json::from_str(r#"{"type": "fock", "coefficients": [{"re": 1}]}"#).unwrap();
        let err = commands::compute_pure_bound(&fock, &[1], Some(&[1.0]), &Default::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = commands::compute_pure_bound(&fock, &[0], None, &Default::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn csv_sidecar_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("t.csv");
        let cmd = parse(&["table1", "--max-r", "1", "--out", out.to_str().unwrap()]);
        run(&cmd).unwrap();
        assert!(std::fs::read_to_string(&out).unwrap().starts_with("r,bound,squeezing_db,seed,status\n"));
        let side = std::fs::read_to_string(dir.path().join("t.csv.manifest.json")).unwrap();
        let manifest: serde_json::Value = serde_json::from_str(&side).unwrap();
        assert_eq!(manifest["command"], "table1");
        assert_eq!(manifest["seed"], 20_190_517);
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        use ncdegree::Error as E;
        assert_eq!(CliError::from(E::Unbounded { norm: 20.0, value: 1.0 }).exit_code(), 4);
        assert_eq!(CliError::from(E::Spec("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(E::IllConditioned { condition: 1e13 }).exit_code(), 3);
        let nm = E::NonMonotone { r_prev: 1, prev: 0.5, r: 2, next: 0.6 };
        assert_eq!(CliError::from(nm).exit_code(), 3);
    }
}
