use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// A runtime label. Identity and ordering come from the creation ordinal;
/// the name is only for display.
#[derive(Debug, Clone)]
pub struct LabelId {
    ordinal: u32,
    name: Arc<str>,
}

impl LabelId {
    pub fn new(ordinal: u32, name: impl Into<Arc<str>>) -> Self {
        LabelId {
            ordinal,
            name: name.into(),
        }
    }

    pub fn ordinal(&self) -> u32 {
        self.ordinal
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl PartialEq for LabelId {
    fn eq(&self, other: &Self) -> bool {
        self.ordinal == other.ordinal
    }
}

impl Eq for LabelId {}

impl PartialOrd for LabelId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LabelId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ordinal.cmp(&other.ordinal)
    }
}

impl Hash for LabelId {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ordinal.hash(state);
    }
}

impl fmt::Display for LabelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn from_bool(positive: bool) -> Sign {
        if positive {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// A signed label, `+l` or `-l`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub label: LabelId,
    pub sign: Sign,
}

impl Branch {
    pub fn pos(label: LabelId) -> Branch {
        Branch {
            label,
            sign: Sign::Positive,
        }
    }

    pub fn neg(label: LabelId) -> Branch {
        Branch {
            label,
            sign: Sign::Negative,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.sign {
            Sign::Positive => '+',
            Sign::Negative => '-',
        };
        write!(f, "{sign}{}", self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inconsistent program counter: cannot add {added} to {pc}")]
pub struct ConsistencyError {
    pub pc: String,
    pub added: String,
}

/// Program counter: the set of branches the current context has committed to.
///
/// Keyed by label, so a label can carry at most one sign; [`Pc::extend`]
/// refuses to add the opposite branch of one already present.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pc {
    branches: BTreeMap<LabelId, Sign>,
}

impl Pc {
    pub fn empty() -> Pc {
        Pc::default()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn sign_of(&self, label: &LabelId) -> Option<Sign> {
        self.branches.get(label).copied()
    }

    pub fn contains(&self, branch: &Branch) -> bool {
        self.sign_of(&branch.label) == Some(branch.sign)
    }

    pub fn extend(&self, branch: Branch) -> Result<Pc, ConsistencyError> {
        match self.sign_of(&branch.label) {
            Some(sign) if sign != branch.sign => Err(ConsistencyError {
                pc: self.to_string(),
                added: branch.to_string(),
            }),
            _ => {
                let mut next = self.clone();
                next.branches.insert(branch.label, branch.sign);
                Ok(next)
            }
        }
    }

    /// Branches in ascending label order.
    pub fn branches(&self) -> impl Iterator<Item = Branch> + '_ {
        self.branches.iter().map(|(label, &sign)| Branch {
            label: label.clone(),
            sign,
        })
    }
}

impl FromIterator<Branch> for Result<Pc, ConsistencyError> {
    fn from_iter<I: IntoIterator<Item = Branch>>(iter: I) -> Self {
        iter.into_iter().try_fold(Pc::empty(), |pc, b| pc.extend(b))
    }
}

impl fmt::Display for Pc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.branches().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: u32) -> LabelId {
        LabelId::new(n, format!("l{n}"))
    }

    #[test]
    fn extend_empty() {
        let pc = Pc::empty().extend(Branch::pos(l(1))).unwrap();
        assert!(pc.contains(&Branch::pos(l(1))));
        assert_eq!(pc.to_string(), "{+l1}");
    }

    #[test]
    fn extend_other_label() {
        let pc = Pc::empty()
            .extend(Branch::pos(l(1)))
            .unwrap()
            .extend(Branch::neg(l(2)))
            .unwrap();
        assert_eq!(pc.to_string(), "{+l1,-l2}");
        assert_eq!(pc.len(), 2);
    }

    #[test]
    fn extend_contradiction() {
        let pc = Pc::empty().extend(Branch::pos(l(1))).unwrap();
        let err = pc.extend(Branch::neg(l(1))).unwrap_err();
        assert_eq!(err.added, "-l1");
        // re-adding the same branch is fine
        assert_eq!(pc.extend(Branch::pos(l(1))).unwrap(), pc);
    }

    #[test]
    fn labels_compare_by_ordinal() {
        assert_eq!(LabelId::new(3, "a"), LabelId::new(3, "b"));
        assert!(LabelId::new(1, "z") < LabelId::new(2, "a"));
    }
}
