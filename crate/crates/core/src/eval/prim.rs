//! Built-in procedures over base values.
//!
//! These are the "foreign" functions of the language. They never see facets:
//! the faceted evaluator distributes them over faceted arguments first, and
//! the standard evaluator never produces facets.

use std::fmt;

use serde::Serialize;

use super::EvalError;
use crate::facet::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Prim {
    Cons,
    Car,
    Cdr,
    IsNull,
    IsPair,
    NumEq,
    Lt,
    Gt,
    Le,
    Ge,
    Add,
    Sub,
    Mul,
    Not,
    List,
    Display,
    Newline,
    Error,
}

const ALL: &[Prim] = &[
    Prim::Cons,
    Prim::Car,
    Prim::Cdr,
    Prim::IsNull,
    Prim::IsPair,
    Prim::NumEq,
    Prim::Lt,
    Prim::Gt,
    Prim::Le,
    Prim::Ge,
    Prim::Add,
    Prim::Sub,
    Prim::Mul,
    Prim::Not,
    Prim::List,
    Prim::Display,
    Prim::Newline,
    Prim::Error,
];

impl Prim {
    pub fn name(self) -> &'static str {
        match self {
            Prim::Cons => "cons",
            Prim::Car => "car",
            Prim::Cdr => "cdr",
            Prim::IsNull => "null?",
            Prim::IsPair => "pair?",
            Prim::NumEq => "=",
            Prim::Lt => "<",
            Prim::Gt => ">",
            Prim::Le => "<=",
            Prim::Ge => ">=",
            Prim::Add => "+",
            Prim::Sub => "-",
            Prim::Mul => "*",
            Prim::Not => "not",
            Prim::List => "list",
            Prim::Display => "display",
            Prim::Newline => "newline",
            Prim::Error => "error",
        }
    }

    pub fn from_name(name: &str) -> Option<Prim> {
        ALL.iter().copied().find(|p| p.name() == name)
    }

    pub fn all() -> &'static [Prim] {
        ALL
    }

    /// Minimum and (optional) maximum argument count.
    pub fn arity(self) -> (usize, Option<usize>) {
        match self {
            Prim::Cons | Prim::NumEq | Prim::Lt | Prim::Gt | Prim::Le | Prim::Ge => (2, Some(2)),
            Prim::Car | Prim::Cdr | Prim::IsNull | Prim::IsPair | Prim::Not | Prim::Display => (1, Some(1)),
            Prim::Newline => (0, Some(0)),
            Prim::Add | Prim::Mul | Prim::List => (0, None),
            Prim::Sub | Prim::Error => (1, None),
        }
    }

    /// Effectful primitives observe their arguments; they are not lifted
    /// over facets and are not strict in star.
    pub fn is_effectful(self) -> bool {
        matches!(self, Prim::Display | Prim::Newline | Prim::Error)
    }

    pub fn check_arity(self, found: usize) -> Result<(), EvalError> {
        let (min, max) = self.arity();
        if found < min || max.is_some_and(|m| found > m) {
            let expected = match max {
                Some(m) if m == min => min.to_string(),
                Some(m) => format!("{min}..={m}"),
                None => format!("at least {min}"),
            };
            return Err(EvalError::Arity {
                name: self.name().to_string(),
                expected,
                found,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Prim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn int(prim: Prim, v: &Value) -> Result<i64, EvalError> {
    match v {
        Value::Int(n) => Ok(*n),
        other => Err(EvalError::Type(format!("{prim}: expected an integer, got {other}"))),
    }
}

fn base_eq(a: &Value, b: &Value) -> Result<bool, EvalError> {
    Ok(match (a, b) {
        (Value::Pair(x), Value::Pair(y)) => base_eq(&x.0, &y.0)? && base_eq(&x.1, &y.1)?,
        (Value::Closure(_) | Value::Prim(_), _) | (_, Value::Closure(_) | Value::Prim(_)) => {
            return Err(EvalError::Type(format!("=: cannot compare procedures ({a}, {b})")))
        }
        _ => a == b,
    })
}

/// Text written by `display`: strings without quotes, everything else as printed.
pub fn display_text(v: &Value) -> String {
    match v {
        Value::Str(s) => s.to_string(),
        other => other.to_string(),
    }
}

/// Applies `prim` to facet-free arguments. Output from `display` and
/// `newline` goes to `out`.
pub fn apply_scalar(prim: Prim, args: &[Value], out: &mut Vec<String>) -> Result<Value, EvalError> {
    prim.check_arity(args.len())?;
    debug_assert!(!args.iter().any(Value::is_facet), "{prim} applied to a facet");
    if !prim.is_effectful() && args.iter().any(|a| matches!(a, Value::Star)) {
        return Ok(Value::Star);
    }
    let cmp = |f: fn(i64, i64) -> bool| -> Result<Value, EvalError> {
        Ok(Value::Bool(f(int(prim, &args[0])?, int(prim, &args[1])?)))
    };
    match prim {
        Prim::Cons => Ok(Value::pair(args[0].clone(), args[1].clone())),
        Prim::Car | Prim::Cdr => match &args[0] {
            Value::Pair(p) => Ok(if prim == Prim::Car { p.0.clone() } else { p.1.clone() }),
            other => Err(EvalError::Type(format!("{prim}: expected a pair, got {other}"))),
        },
        Prim::IsNull => Ok(Value::Bool(matches!(args[0], Value::Nil))),
        Prim::IsPair => Ok(Value::Bool(matches!(args[0], Value::Pair(_)))),
        Prim::NumEq => base_eq(&args[0], &args[1]).map(Value::Bool),
        Prim::Lt => cmp(|a, b| a < b),
        Prim::Gt => cmp(|a, b| a > b),
        Prim::Le => cmp(|a, b| a <= b),
        Prim::Ge => cmp(|a, b| a >= b),
        Prim::Add | Prim::Mul => {
            let (unit, op): (i64, fn(i64, i64) -> Option<i64>) = if prim == Prim::Add {
                (0, i64::checked_add)
            } else {
                (1, i64::checked_mul)
            };
            args.iter().try_fold(Value::Int(unit), |acc, a| {
                let Value::Int(acc) = acc else { unreachable!() };
                op(acc, int(prim, a)?).map(Value::Int).ok_or(EvalError::Overflow)
            })
        }
        Prim::Sub => {
            let first = int(prim, &args[0])?;
            if args.len() == 1 {
                return first.checked_neg().map(Value::Int).ok_or(EvalError::Overflow);
            }
            args[1..].iter().try_fold(Value::Int(first), |acc, a| {
                let Value::Int(acc) = acc else { unreachable!() };
                acc.checked_sub(int(prim, a)?).map(Value::Int).ok_or(EvalError::Overflow)
            })
        }
        Prim::Not => Ok(Value::Bool(!args[0].is_truthy())),
        Prim::List => Ok(Value::list(args.to_vec())),
        Prim::Display => {
            if args[0].contains_facet_or_star() {
                return Err(EvalError::StarObserved(format!("display of {}", args[0])));
            }
            out.push(display_text(&args[0]));
            Ok(Value::Void)
        }
        Prim::Newline => {
            out.push("\n".to_string());
            Ok(Value::Void)
        }
        Prim::Error => {
            let msg = args.iter().map(display_text).collect::<Vec<_>>().join(" ");
            Err(EvalError::User(msg))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(prim: Prim, args: &[Value]) -> Result<Value, EvalError> {
        apply_scalar(prim, args, &mut Vec::new())
    }

    #[test]
    fn names_round_trip() {
        for &p in Prim::all() {
            assert_eq!(Prim::from_name(p.name()), Some(p));
        }
    }

    #[test]
    fn pairs() {
        let p = run(Prim::Cons, &[Value::Int(1), Value::Int(2)]).unwrap();
        assert_eq!(run(Prim::Car, &[p.clone()]).unwrap(), Value::Int(1));
        assert_eq!(run(Prim::Cdr, &[p]).unwrap(), Value::Int(2));
        assert!(matches!(run(Prim::Car, &[Value::Nil]), Err(EvalError::Type(_))));
    }

    #[test]
    fn star_is_absorbing_for_pure_prims() {
        assert_eq!(run(Prim::Add, &[Value::Int(1), Value::Star]).unwrap(), Value::Star);
        assert_eq!(run(Prim::IsNull, &[Value::Star]).unwrap(), Value::Star);
        assert!(matches!(run(Prim::Display, &[Value::Star]), Err(EvalError::StarObserved(_))));
    }

    #[test]
    fn equality() {
        assert_eq!(run(Prim::NumEq, &[Value::str("player1"), Value::str("player1")]).unwrap(), Value::Bool(true));
        assert_eq!(run(Prim::NumEq, &[Value::Int(1), Value::str("1")]).unwrap(), Value::Bool(false));
        assert!(run(Prim::NumEq, &[Value::Prim(Prim::Car), Value::Int(1)]).is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(run(Prim::Add, &[]).unwrap(), Value::Int(0));
        assert_eq!(run(Prim::Sub, &[Value::Int(5)]).unwrap(), Value::Int(-5));
        assert_eq!(run(Prim::Sub, &[Value::Int(5), Value::Int(2), Value::Int(1)]).unwrap(), Value::Int(2));
        assert!(matches!(run(Prim::Add, &[Value::Int(i64::MAX), Value::Int(1)]), Err(EvalError::Overflow)));
        assert!(matches!(run(Prim::Not, &[]), Err(EvalError::Arity { .. })));
    }

    #[test]
    fn display_and_error() {
        let mut out = Vec::new();
        apply_scalar(Prim::Display, &[Value::str("hi")], &mut out).unwrap();
        apply_scalar(Prim::Display, &[Value::list([Value::Int(1)])], &mut out).unwrap();
        assert_eq!(out, vec!["hi", "(1)"]);
        let err = run(Prim::Error, &[Value::str("boom"), Value::Int(3)]).unwrap_err();
        assert_eq!(err, EvalError::User("boom 3".into()));
    }
}
