use std::sync::Arc;

use super::Value;

/// Persistent lexical environment. Extending never disturbs closures that
/// captured an earlier version.
#[derive(Debug, Clone, Default)]
pub struct Env(Option<Arc<Frame>>);

#[derive(Debug)]
struct Frame {
    name: String,
    value: Value,
    next: Env,
}

impl Env {
    pub fn new() -> Env {
        Env(None)
    }

    pub fn bind(&self, name: impl Into<String>, value: Value) -> Env {
        Env(Some(Arc::new(Frame {
            name: name.into(),
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self;
        while let Some(frame) = &cur.0 {
            if frame.name == name {
                return Some(&frame.value);
            }
            cur = &frame.next;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shadowing_is_persistent() {
        let outer = Env::new().bind("x", Value::Int(1));
        let inner = outer.bind("x", Value::Int(2));
        assert_eq!(inner.lookup("x"), Some(&Value::Int(2)));
        assert_eq!(outer.lookup("x"), Some(&Value::Int(1)));
        assert_eq!(outer.lookup("y"), None);
    }
}
