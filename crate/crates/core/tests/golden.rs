//! Worked examples with known printed results.

use std::time::{Duration, Instant};

use faceted_core::oracle::{check_projection_equivalence, OracleConfig};
use faceted_core::{parse_program, Interpreter};

fn printed(src: &str) -> Vec<String> {
    let program = parse_program(src).unwrap();
    let mut interp = Interpreter::new();
    let mut out = Vec::new();
    for item in &program.items {
        if let Some(v) = interp.run_item(item).unwrap() {
            out.push(v.to_string());
        }
    }
    out
}

fn corpus(name: &str) -> String {
    std::fs::read_to_string(format!("{}/corpus/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn golden_listings() {
    let start = Instant::now();
    assert_eq!(printed(&corpus("apply_faceted_fn.rkts")), ["#facet<Alice ? true : false>"]);
    assert_eq!(printed(&corpus("board_obs.rkts")), ["((3 . 4) (1 . 2))", "#star"]);
    assert_eq!(printed(&corpus("label_shadowing.rkts")), ["#facet<l ? 1 : 0>"]);
    assert_eq!(
        printed(&corpus("mark_hit.rkts")),
        [
            "#facet<p1 ? (((1 . 2)) . true) : (() . false)>",
            "#facet<p1 ? (((1 . 2) (3 . 4)) . false) : (() . false)>",
            "(((1 . 2)) . true)",
        ]
    );
    assert_eq!(printed(&corpus("social_profile.rkts"))[1], "\"p1: phone and address\"");
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn box_laundering_agrees_with_each_copy() {
    let src = corpus("box_laundering.rkts");
    assert_eq!(printed(&src).last().unwrap(), "#facet<alice ? 0 : 1>");
    let report = check_projection_equivalence("box", &parse_program(&src).unwrap(), &OracleConfig::default()).unwrap();
    assert!(report.passed(), "{report}");
    let per_view: Vec<_> = report.views.iter().map(|v| v.standard.last().unwrap().printed.clone()).collect();
    assert_eq!(per_view, ["0", "1"]);
}

#[test]
fn repeated_runs_are_identical() {
    for name in ["three_labels.rkts", "nested_splits.rkts", "effect_order.rkts"] {
        let src = corpus(name);
        assert_eq!(printed(&src), printed(&src), "{name}");
    }
}
