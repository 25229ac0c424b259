use std::path::{Path, PathBuf};

use faceted_core::oracle::{check_projection_equivalence, OracleConfig, OracleError};
use faceted_core::parse_program;
use walkdir::WalkDir;

use crate::{RunConfig, EXIT_ERROR, EXIT_USAGE};

/// Source files under `paths`; directories are searched for `.rkts` files.
fn collect(paths: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<_> = WalkDir::new(path)
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "rkts"))
                .map(|e| e.into_path())
                .collect();
            found.sort();
            files.extend(found);
        } else if path.is_file() {
            files.push(path.clone());
        } else {
            return Err(format!("{}: no such file or directory", path.display()));
        }
    }
    Ok(files)
}

enum Outcome {
    Pass,
    Skipped,
    Fail,
    Unreadable,
}

fn check_file(path: &Path, config: &OracleConfig) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: error: {e}", path.display());
            return Outcome::Unreadable;
        }
    };
    let program = match parse_program(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return Outcome::Unreadable;
        }
    };
    match check_projection_equivalence(&path.display().to_string(), &program, config) {
        Ok(report) => {
            print!("{report}");
            if report.passed() {
                Outcome::Pass
            } else {
                Outcome::Fail
            }
        }
        Err(e @ (OracleError::NotOracleSafe { .. } | OracleError::TooManyLabels { .. })) => {
            println!("{}: skipped ({e})", path.display());
            Outcome::Skipped
        }
        Err(e) => {
            println!("{}: FAIL ({e})", path.display());
            Outcome::Fail
        }
    }
}

pub fn check_paths(paths: &[PathBuf], config: &RunConfig) -> u8 {
    let files = match collect(paths) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let oracle = OracleConfig {
        max_labels: config.max_labels,
        fault: config.fault,
    };
    let (mut pass, mut skipped, mut fail, mut unreadable) = (0, 0, 0, 0);
    for file in &files {
        match check_file(file, &oracle) {
            Outcome::Pass => pass += 1,
            Outcome::Skipped => skipped += 1,
            Outcome::Fail => fail += 1,
            Outcome::Unreadable => unreadable += 1,
        }
    }
    println!("{pass} passed, {fail} failed, {skipped} skipped, {unreadable} unreadable");
    if unreadable > 0 {
        EXIT_USAGE
    } else if fail > 0 {
        EXIT_ERROR
    } else {
        0
    }
}
