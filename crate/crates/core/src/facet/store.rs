use std::fmt;

use super::Value;

/// A store address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Addr(pub usize);

impl fmt::Display for Addr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#box:{}", self.0)
    }
}

/// Boxes and label policies. Addresses are never reused.
#[derive(Debug, Clone, Default)]
pub struct Store {
    cells: Vec<Value>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn alloc(&mut self, value: Value) -> Addr {
        self.cells.push(value);
        Addr(self.cells.len() - 1)
    }

    pub fn get(&self, addr: Addr) -> Option<&Value> {
        self.cells.get(addr.0)
    }

    /// Overwrites an allocated cell. Panics on a dangling address, which can
    /// only come from a different store.
    pub fn set(&mut self, addr: Addr, value: Value) {
        self.cells[addr.0] = value;
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Addr, &Value)> {
        self.cells.iter().enumerate().map(|(i, v)| (Addr(i), v))
    }
}
