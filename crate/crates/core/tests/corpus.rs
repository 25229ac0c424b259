use std::path::PathBuf;

use faceted_core::oracle::{check_projection_equivalence, OracleConfig};
use faceted_core::{parse_program, Interpreter};

fn corpus() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "rkts"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect()
}

#[test]
fn corpus_is_large_enough() {
    assert!(corpus().len() >= 25);
}

#[test]
fn every_corpus_program_passes_the_oracle() {
    let mut failures = Vec::new();
    for (name, src) in corpus() {
        let program = parse_program(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        match check_projection_equivalence(&name, &program, &OracleConfig::default()) {
            Ok(report) if report.passed() => {
                assert!(report.k <= 3 && report.views.len() <= 8, "{name}");
            }
            Ok(report) => failures.push(report.to_string()),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn corpus_round_trips_through_the_printer() {
    for (name, src) in corpus() {
        let program = parse_program(&src).unwrap();
        let reparsed = parse_program(&program.to_string()).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(program, reparsed, "{name}");
    }
}

#[test]
fn corpus_runs_without_errors() {
    for (name, src) in corpus() {
        let program = parse_program(&src).unwrap();
        let mut interp = Interpreter::new();
        for item in &program.items {
            if let Err(e) = interp.run_item(item) {
                panic!("{name}: {e}");
            }
        }
    }
}
