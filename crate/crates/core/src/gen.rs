//! Random facet trees, program counters and oracle-safe programs.
//!
//! Generated programs define one or two labels and up to two boxes at top level, then
//! run a few expressions built only from total primitives, so the faceted
//! run never raises. Every `facet` and `obs` names a top-level label, and no
//! `let-label` sits where it could run twice. Expressions are generated as
//! source text, typed as integer, boolean or box, and nest at most
//! [`MAX_DEPTH`] deep.

use std::sync::Arc;

use proptest::prelude::*;

use crate::facet::{mkfacet, Branch, LabelId, Pc, Sign, Value};
use crate::oracle::LabelView;

pub const MAX_DEPTH: u32 = 6;

/// Labels `l0..l{n-1}` with ordinals in creation order.
pub fn labels(n: u32) -> Vec<LabelId> {
    (0..n).map(|i| LabelId::new(i, format!("l{i}"))).collect()
}

/// Every total view over `labels`.
pub fn all_views(labels: &[LabelId]) -> Vec<LabelView> {
    (0..1usize << labels.len())
        .map(|mask| labels.iter().enumerate().map(|(i, l)| (l.clone(), mask & (1 << i) != 0)).collect())
        .collect()
}

fn leaf() -> BoxedStrategy<Value> {
    prop_oneof![
        4 => (0i64..6).prop_map(Value::Int),
        1 => Just(Value::Star),
        1 => any::<bool>().prop_map(Value::Bool),
    ]
    .boxed()
}

/// Facet trees over the first `n` labels in any order, repeats allowed.
pub fn raw_facet_tree(n: u32) -> BoxedStrategy<Value> {
    let ls = labels(n);
    leaf()
        .prop_recursive(5, 48, 2, move |inner| {
            let ls = ls.clone();
            (0..ls.len(), inner.clone(), inner)
                .prop_map(move |(i, a, b)| Value::facet_node(ls[i].clone(), a, b))
        })
        .boxed()
}

/// Rebuilds a tree bottom-up with [`mkfacet`].
pub fn canonicalize(v: &Value) -> Value {
    match v.as_facet() {
        Some(f) => mkfacet(f.label.clone(), canonicalize(&f.pos), canonicalize(&f.neg)),
        None => v.clone(),
    }
}

pub fn canonical_facet_tree(n: u32) -> BoxedStrategy<Value> {
    raw_facet_tree(n).prop_map(|v| canonicalize(&v)).boxed()
}

/// A consistent program counter over the first `n` labels.
pub fn pc(n: u32) -> BoxedStrategy<Pc> {
    let ls = labels(n);
    proptest::collection::vec(proptest::option::of(any::<bool>()), n as usize)
        .prop_map(move |signs| {
            let mut pc = Pc::empty();
            for (l, s) in ls.iter().zip(signs) {
                if let Some(s) = s {
                    pc = pc
                        .extend(Branch {
                            label: l.clone(),
                            sign: Sign::from_bool(s),
                        })
                        .expect("distinct labels");
                }
            }
            pc
        })
        .boxed()
}

#[derive(Debug, Clone)]
struct Ctx {
    labels: usize,
    boxes: usize,
    vars: Arc<Vec<String>>,
}

impl Ctx {
    fn with_var(&self, name: &str) -> Ctx {
        let mut vars = (*self.vars).clone();
        vars.push(name.to_string());
        Ctx {
            vars: Arc::new(vars),
            ..self.clone()
        }
    }

    fn fresh(&self) -> String {
        format!("x{}", self.vars.len())
    }
}

fn lazy(f: impl Fn() -> BoxedStrategy<String> + Send + Sync + 'static) -> BoxedStrategy<String> {
    Just(()).prop_flat_map(move |()| f()).boxed()
}

fn label(ctx: &Ctx) -> BoxedStrategy<String> {
    (0..ctx.labels).prop_map(|i| format!("l{i}")).boxed()
}

fn int_leaf(ctx: &Ctx) -> BoxedStrategy<String> {
    let mut leaves: Vec<(u32, BoxedStrategy<String>)> = vec![(6, (-3i64..10).prop_map(|n| n.to_string()).boxed())];
    if !ctx.vars.is_empty() {
        leaves.push((5, proptest::sample::select((*ctx.vars).clone()).boxed()));
    }
    if ctx.boxes > 0 {
        leaves.push((3, (0..ctx.boxes).prop_map(|i| format!("(unbox b{i})")).boxed()));
    }
    leaves.push((1, Just("(star)".to_string()).boxed()));
    proptest::strategy::Union::new_weighted(leaves).boxed()
}

fn int_expr(depth: u32, ctx: Ctx) -> BoxedStrategy<String> {
    if depth == 0 {
        return int_leaf(&ctx);
    }
    let d = depth - 1;
    let c = ctx.clone();
    let mut alts: Vec<(u32, BoxedStrategy<String>)> = vec![(10, int_leaf(&ctx))];
    let mut add = |w: u32, s: BoxedStrategy<String>| alts.push((w, s));

    let k = c.clone();
    add(3, lazy(move || {
        (prop_oneof![Just("+"), Just("-")], int_expr(d, k.clone()), int_expr(d, k.clone()))
            .prop_map(|(op, a, b)| format!("({op} {a} {b})"))
            .boxed()
    }));
    let k = c.clone();
    add(4, lazy(move || {
        (label(&k), int_expr(d, k.clone()), int_expr(d, k.clone()))
            .prop_map(|(l, a, b)| format!("(facet {l} {a} {b})"))
            .boxed()
    }));
    let k = c.clone();
    add(3, lazy(move || {
        (bool_expr(d, k.clone()), int_expr(d, k.clone()), int_expr(d, k.clone()))
            .prop_map(|(c, a, b)| format!("(if {c} {a} {b})"))
            .boxed()
    }));
    let k = c.clone();
    add(2, lazy(move || {
        let x = k.fresh();
        let inner = k.with_var(&x);
        (int_expr(d, k.clone()), int_expr(d, inner))
            .prop_map(move |(a, b)| format!("(let ([{x} {a}]) {b})"))
            .boxed()
    }));
    let k = c.clone();
    add(2, lazy(move || {
        let x = k.fresh();
        let inner = k.with_var(&x);
        (label(&k), int_expr(d, inner.clone()), int_expr(d, inner), int_expr(d, k.clone()))
            .prop_map(move |(l, f, g, a)| format!("((facet {l} (lambda ({x}) {f}) (lambda ({x}) {g})) {a})"))
            .boxed()
    }));
    let k = c.clone();
    add(1, lazy(move || {
        (label(&k), 1i64..3, int_expr(d, k.clone()))
            .prop_map(|(l, key, e)| format!("(obs {l} {key} {e})"))
            .boxed()
    }));
    let k = c.clone();
    add(1, lazy(move || {
        (prop_oneof![Just("car"), Just("cdr")], int_expr(d, k.clone()), int_expr(d, k.clone()))
            .prop_map(|(op, a, b)| format!("({op} (cons {a} {b}))"))
            .boxed()
    }));
    if c.boxes > 0 {
        let k = c.clone();
        add(3, lazy(move || {
            (box_expr(d, k.clone()), int_expr(d, k.clone()), int_expr(d, k.clone()))
                .prop_map(|(b, v, rest)| format!("(begin (set! {b} {v}) {rest})"))
                .boxed()
        }));
        let k = c.clone();
        add(2, lazy(move || box_expr(d, k.clone()).prop_map(|b| format!("(unbox {b})")).boxed()));
    }
    proptest::strategy::Union::new_weighted(alts).boxed()
}

fn bool_expr(depth: u32, ctx: Ctx) -> BoxedStrategy<String> {
    let leaf = prop_oneof![Just("true".to_string()), Just("false".to_string())].boxed();
    if depth == 0 {
        return leaf;
    }
    let d = depth - 1;
    let mut alts: Vec<(u32, BoxedStrategy<String>)> = vec![(3, leaf)];
    let k = ctx.clone();
    alts.push((5, lazy(move || {
        (prop_oneof![Just("="), Just("<")], int_expr(d, k.clone()), int_expr(d, k.clone()))
            .prop_map(|(op, a, b)| format!("({op} {a} {b})"))
            .boxed()
    })));
    let k = ctx.clone();
    alts.push((2, lazy(move || {
        (label(&k), bool_expr(d, k.clone()), bool_expr(d, k.clone()))
            .prop_map(|(l, a, b)| format!("(facet {l} {a} {b})"))
            .boxed()
    })));
    let k = ctx.clone();
    alts.push((2, lazy(move || {
        (prop_oneof![Just("and"), Just("or")], bool_expr(d, k.clone()), bool_expr(d, k.clone()))
            .prop_map(|(op, a, b)| format!("({op} {a} {b})"))
            .boxed()
    })));
    let k = ctx;
    alts.push((1, lazy(move || bool_expr(d, k.clone()).prop_map(|b| format!("(not {b})")).boxed())));
    proptest::strategy::Union::new_weighted(alts).boxed()
}

fn box_expr(depth: u32, ctx: Ctx) -> BoxedStrategy<String> {
    let n = ctx.boxes;
    let leaf = (0..n).prop_map(|i| format!("b{i}")).boxed();
    if depth == 0 {
        return leaf;
    }
    let d = depth - 1;
    let k = ctx.clone();
    let faceted = lazy(move || {
        (label(&k), 0..n, 0..n)
            .prop_map(|(l, i, j)| format!("(facet {l} b{i} b{j})"))
            .boxed()
    });
    let k = ctx;
    let chosen = lazy(move || {
        (bool_expr(d, k.clone()), 0..n, 0..n)
            .prop_map(|(c, i, j)| format!("(if {c} b{i} b{j})"))
            .boxed()
    });
    prop_oneof![3 => leaf, 1 => faceted, 1 => chosen].boxed()
}

const POLICIES: &[&str] = &["(lambda (k) (= k 1))", "(lambda (k) true)", "(lambda (k) (< k 2))"];

/// Source text of a random oracle-safe program.
pub fn program() -> BoxedStrategy<String> {
    (1..=2usize, 0..=2usize)
        .prop_flat_map(|(labels, boxes)| {
            let ctx = Ctx {
                labels,
                boxes,
                vars: Arc::new(Vec::new()),
            };
            let with_global = ctx.with_var("g0");
            (
                proptest::collection::vec(proptest::sample::select(POLICIES), labels),
                proptest::collection::vec(0i64..5, boxes),
                int_expr(MAX_DEPTH - 1, ctx),
                proptest::collection::vec(
                    prop_oneof![
                        3 => int_expr(MAX_DEPTH, with_global.clone()),
                        1 => bool_expr(MAX_DEPTH, with_global.clone()),
                        1 => (int_expr(MAX_DEPTH - 1, with_global.clone()), int_expr(MAX_DEPTH - 1, with_global))
                            .prop_map(|(a, b)| format!("(cons {a} {b})")),
                    ],
                    1..=3,
                ),
            )
        })
        .prop_map(|(policies, inits, global, exprs)| {
            let mut src = String::new();
            for (i, p) in policies.iter().enumerate() {
                src.push_str(&format!("(define l{i} (let-label l{i} {p} l{i}))\n"));
            }
            for (i, v) in inits.iter().enumerate() {
                src.push_str(&format!("(define b{i} (box {v}))\n"));
            }
            src.push_str(&format!("(define g0 {global})\n"));
            for e in &exprs {
                src.push_str(e);
                src.push('\n');
            }
            for i in 0..inits.len() {
                src.push_str(&format!("(unbox b{i})\n"));
            }
            src
        })
        .boxed()
}
