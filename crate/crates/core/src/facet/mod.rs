//! Runtime values, labels, program counters and the facet meta-functions.
//!
//! Facet trees are kept canonical: along every root-to-leaf path the labels
//! strictly increase in creation order. [`mkfacet`] is the only constructor
//! that evaluation uses, and it restores that order whatever its inputs'
//! head labels are.

mod env;
mod label;
mod store;
mod value;

pub use env::Env;
pub use label::{Branch, ConsistencyError, LabelId, Pc, Sign};
pub use store::{Addr, Store};
pub use value::{Closure, Facet, Observable, Value};

use crate::eval::EvalError;

fn head_label(v: &Value) -> Option<&LabelId> {
    v.as_facet().map(|f| &f.label)
}

/// The `label`-positive side of `v` if `v` is rooted at `label`, else `v`.
fn select(v: &Value, label: &LabelId, sign: Sign) -> Value {
    match v.as_facet() {
        Some(f) if &f.label == label => match sign {
            Sign::Positive => f.pos.clone(),
            Sign::Negative => f.neg.clone(),
        },
        _ => v.clone(),
    }
}

/// Canonicalizing facet constructor: a canonical tree equal, view for view,
/// to `<label ? pos : neg>` for canonical `pos` and `neg`.
pub fn mkfacet(label: LabelId, pos: Value, neg: Value) -> Value {
    let smallest = [head_label(&pos), head_label(&neg)]
        .into_iter()
        .flatten()
        .fold(&label, |m, l| if l < m { l } else { m })
        .clone();
    if smallest == label {
        let pos = select(&pos, &label, Sign::Positive);
        let neg = select(&neg, &label, Sign::Negative);
        Value::facet_node(label, pos, neg)
    } else {
        let left = mkfacet(
            label.clone(),
            select(&pos, &smallest, Sign::Positive),
            select(&neg, &smallest, Sign::Positive),
        );
        let right = mkfacet(
            label,
            select(&pos, &smallest, Sign::Negative),
            select(&neg, &smallest, Sign::Negative),
        );
        Value::facet_node(smallest, left, right)
    }
}

/// `<<pc ? pos : default>>`: `pos` for contexts satisfying every branch of
/// `pc`, `default` everywhere else.
pub fn construct_facet(pc: &Pc, pos: Value, default: Value) -> Value {
    fn go(branches: &[Branch], pos: Value, default: Value) -> Value {
        match branches.split_first() {
            None => pos,
            Some((b, rest)) => {
                let inner = go(rest, pos, default.clone());
                match b.sign {
                    Sign::Positive => mkfacet(b.label.clone(), inner, default),
                    Sign::Negative => mkfacet(b.label.clone(), default, inner),
                }
            }
        }
    }
    let branches: Vec<Branch> = pc.branches().collect();
    go(&branches, pos, default)
}

/// Restricts `v` to the views compatible with `pc`.
pub fn filter_by_pc(v: &Value, pc: &Pc) -> Value {
    match v.as_facet() {
        None => v.clone(),
        Some(f) => match pc.sign_of(&f.label) {
            Some(Sign::Positive) => filter_by_pc(&f.pos, pc),
            Some(Sign::Negative) => filter_by_pc(&f.neg, pc),
            None => mkfacet(f.label.clone(), filter_by_pc(&f.pos, pc), filter_by_pc(&f.neg, pc)),
        },
    }
}

fn split_pc(pc: &Pc, label: &LabelId, sign: Sign) -> Result<Pc, EvalError> {
    Ok(pc.extend(Branch {
        label: label.clone(),
        sign,
    })?)
}

/// Writes `v` through a possibly faceted reference. Each reachable address
/// receives `<<pc' ? v : old>>` where `pc'` is `pc` plus the branches leading
/// to it. Star targets are ignored.
pub fn store_write(store: &mut Store, target: &Value, pc: &Pc, v: &Value) -> Result<(), EvalError> {
    match target {
        Value::Addr(a) => {
            let old = store
                .get(*a)
                .cloned()
                .ok_or_else(|| EvalError::Type(format!("dangling address {a}")))?;
            store.set(*a, construct_facet(pc, v.clone(), old));
            Ok(())
        }
        Value::Star => Ok(()),
        Value::Facet(f) => match pc.sign_of(&f.label) {
            Some(Sign::Positive) => store_write(store, &f.pos, pc, v),
            Some(Sign::Negative) => store_write(store, &f.neg, pc, v),
            None => {
                store_write(store, &f.pos, &split_pc(pc, &f.label, Sign::Positive)?, v)?;
                store_write(store, &f.neg, &split_pc(pc, &f.label, Sign::Negative)?, v)
            }
        },
        other => Err(EvalError::Type(format!("set!: expected a box, got {other}"))),
    }
}

/// Reads through a possibly faceted reference, keeping only the parts of the
/// stored values visible under `pc`.
pub fn store_read(store: &Store, target: &Value, pc: &Pc) -> Result<Value, EvalError> {
    match target {
        Value::Addr(a) => store
            .get(*a)
            .map(|v| filter_by_pc(v, pc))
            .ok_or_else(|| EvalError::Type(format!("dangling address {a}"))),
        Value::Star => Ok(Value::Star),
        Value::Facet(f) => match pc.sign_of(&f.label) {
            Some(Sign::Positive) => store_read(store, &f.pos, pc),
            Some(Sign::Negative) => store_read(store, &f.neg, pc),
            None => {
                let pos = store_read(store, &f.pos, &split_pc(pc, &f.label, Sign::Positive)?)?;
                let neg = store_read(store, &f.neg, &split_pc(pc, &f.label, Sign::Negative)?)?;
                Ok(mkfacet(f.label.clone(), pos, neg))
            }
        },
        other => Err(EvalError::Type(format!("unbox: expected a box, got {other}"))),
    }
}

/// Projects `label` out of `v`: its positive side if `decision`, else its
/// negative side. The result mentions `label` nowhere.
pub fn obs_project(label: &LabelId, v: &Value, decision: bool) -> Value {
    match v.as_facet() {
        None => v.clone(),
        Some(f) if &f.label == label => {
            let side = if decision { &f.pos } else { &f.neg };
            obs_project(label, side, decision)
        }
        // canonical order: nothing below a larger label can be `label`
        Some(f) if &f.label > label => v.clone(),
        Some(f) => mkfacet(
            f.label.clone(),
            obs_project(label, &f.pos, decision),
            obs_project(label, &f.neg, decision),
        ),
    }
}

/// Checks the canonical-order invariant.
pub fn is_canonical(v: &Value) -> bool {
    fn go(v: &Value, floor: Option<&LabelId>) -> bool {
        match v.as_facet() {
            None => true,
            Some(f) => floor.is_none_or(|lo| &f.label > lo) && go(&f.pos, Some(&f.label)) && go(&f.neg, Some(&f.label)),
        }
    }
    go(v, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: u32) -> LabelId {
        LabelId::new(n, format!("l{n}"))
    }

    fn fac(label: u32, pos: Value, neg: Value) -> Value {
        Value::facet_node(l(label), pos, neg)
    }

    fn int(n: i64) -> Value {
        Value::Int(n)
    }

    fn pc(branches: &[(u32, bool)]) -> Pc {
        branches
            .iter()
            .map(|&(n, s)| Branch {
                label: l(n),
                sign: Sign::from_bool(s),
            })
            .collect::<Result<Pc, _>>()
            .unwrap()
    }

    #[test]
    fn construct_facet_empty_pc() {
        assert_eq!(construct_facet(&Pc::empty(), int(1), int(0)), int(1));
    }

    #[test]
    fn construct_facet_single_branch() {
        assert_eq!(construct_facet(&pc(&[(1, true)]), int(5), Value::Star), fac(1, int(5), Value::Star));
    }

    #[test]
    fn construct_facet_mixed_branches() {
        // {-l1, +l2}: l1's negative side holds the l2 spine
        assert_eq!(
            construct_facet(&pc(&[(1, false), (2, true)]), int(1), int(0)),
            fac(1, int(0), fac(2, int(1), int(0)))
        );
    }

    #[test]
    fn mkfacet_already_canonical() {
        assert_eq!(mkfacet(l(1), int(1), int(0)), fac(1, int(1), int(0)));
    }

    #[test]
    fn mkfacet_rotates_smaller_child_label() {
        let (a, b, c) = (int(10), int(11), int(12));
        assert_eq!(
            mkfacet(l(2), fac(1, a.clone(), b.clone()), c.clone()),
            fac(1, fac(2, a, c.clone()), fac(2, b, c))
        );
    }

    #[test]
    fn mkfacet_selects_on_equal_label() {
        let v = mkfacet(l(1), fac(1, int(1), int(2)), fac(1, int(3), int(4)));
        assert_eq!(v, fac(1, int(1), int(4)));
    }

    #[test]
    fn write_plain() {
        let mut s = Store::new();
        let a = s.alloc(int(0));
        store_write(&mut s, &Value::Addr(a), &Pc::empty(), &int(7)).unwrap();
        assert_eq!(s.get(a), Some(&int(7)));
    }

    #[test]
    fn write_under_pc() {
        let mut s = Store::new();
        let a = s.alloc(int(0));
        store_write(&mut s, &Value::Addr(a), &pc(&[(1, true)]), &int(7)).unwrap();
        assert_eq!(s.get(a), Some(&fac(1, int(7), int(0))));
    }

    #[test]
    fn write_through_faceted_reference() {
        let mut s = Store::new();
        let a = s.alloc(int(0));
        let b = s.alloc(int(1));
        let target = fac(1, Value::Addr(a), Value::Addr(b));
        store_write(&mut s, &target, &Pc::empty(), &int(9)).unwrap();
        assert_eq!(s.get(a), Some(&fac(1, int(9), int(0))));
        assert_eq!(s.get(b), Some(&fac(1, int(1), int(9))));
    }

    #[test]
    fn write_star_and_bad_targets() {
        let mut s = Store::new();
        let a = s.alloc(int(0));
        store_write(&mut s, &Value::Star, &Pc::empty(), &int(9)).unwrap();
        assert_eq!(s.get(a), Some(&int(0)));
        let bad = fac(1, Value::Addr(a), int(3));
        assert!(matches!(store_write(&mut s, &bad, &Pc::empty(), &int(1)), Err(EvalError::Type(_))));
    }

    #[test]
    fn read_plain_and_filtered() {
        let mut s = Store::new();
        let a = s.alloc(int(5));
        let b = s.alloc(fac(1, int(1), int(0)));
        assert_eq!(store_read(&s, &Value::Addr(a), &Pc::empty()).unwrap(), int(5));
        assert_eq!(store_read(&s, &Value::Addr(b), &pc(&[(1, true)])).unwrap(), int(1));
        assert_eq!(store_read(&s, &Value::Addr(b), &pc(&[(1, false)])).unwrap(), int(0));
        assert_eq!(store_read(&s, &Value::Addr(b), &Pc::empty()).unwrap(), fac(1, int(1), int(0)));
        assert_eq!(store_read(&s, &Value::Star, &pc(&[(2, true)])).unwrap(), Value::Star);
        assert!(store_read(&s, &int(1), &Pc::empty()).is_err());
    }

    #[test]
    fn read_through_faceted_reference() {
        let mut s = Store::new();
        let a = s.alloc(int(5));
        let b = s.alloc(int(6));
        let target = fac(1, Value::Addr(a), Value::Addr(b));
        assert_eq!(store_read(&s, &target, &Pc::empty()).unwrap(), fac(1, int(5), int(6)));
        assert_eq!(store_read(&s, &target, &pc(&[(1, false)])).unwrap(), int(6));
    }

    #[test]
    fn obs_examples() {
        let board = Value::list([Value::pair(int(1), int(2))]);
        let alice = fac(0, board.clone(), Value::Star);
        assert_eq!(obs_project(&l(0), &alice, true), board);
        assert_eq!(obs_project(&l(0), &alice, false), Value::Star);
        assert_eq!(obs_project(&l(0), &int(42), true), int(42));
        // family = l0, friends = l1
        let profile = fac(0, int(1), fac(1, int(2), int(3)));
        assert_eq!(obs_project(&l(0), &profile, false), fac(1, int(2), int(3)));
    }

    #[test]
    fn obs_reaches_below_smaller_labels() {
        let v = fac(0, fac(1, int(1), int(2)), fac(1, int(3), int(4)));
        assert_eq!(obs_project(&l(1), &v, true), fac(0, int(1), int(3)));
        assert_eq!(obs_project(&l(2), &v, true), v);
    }

    #[test]
    fn canonical_check() {
        assert!(is_canonical(&fac(0, fac(1, int(0), int(1)), int(2))));
        assert!(!is_canonical(&fac(1, fac(0, int(0), int(1)), int(2))));
        assert!(!is_canonical(&fac(1, fac(1, int(0), int(1)), int(2))));
    }
}
