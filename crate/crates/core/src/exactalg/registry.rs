use std::collections::HashMap;
use std::fmt;

use super::AlgError;

/// Index of a registered variable. Smaller indices are "larger" variables in
/// the graded lexicographic term order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Principal,
    Parametric,
    Generator,
    Jet,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VarKind::Principal => "principal",
            VarKind::Parametric => "parametric",
            VarKind::Generator => "tower-generator",
            VarKind::Jet => "jet",
        };
        f.write_str(s)
    }
}

/// Ordered set of named variables. Registration order fixes the term order.
#[derive(Clone, Debug, Default)]
pub struct VariableRegistry {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    index: HashMap<String, Var>,
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, kind: VarKind) -> Result<Var, AlgError> {
        if self.index.contains_key(name) {
            return Err(AlgError::DuplicateVariable(name.to_string()));
        }
        let v = Var(self.names.len() as u32);
        self.names.push(name.to_string());
        self.kinds.push(kind);
        self.index.insert(name.to_string(), v);
        Ok(v)
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.index.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Result<Var, AlgError> {
        self.lookup(name)
            .ok_or_else(|| AlgError::UnknownVariable(name.to_string()))
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.index()]
    }

    pub fn kind(&self, v: Var) -> VarKind {
        self.kinds[v.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.names.len() as u32).map(Var)
    }

    pub fn contains(&self, v: Var) -> bool {
        v.index() < self.names.len()
    }

    /// Variable names indexed by `Var`, for printing.
    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_rejected() {
        let mut reg = VariableRegistry::new();
        let x = reg.register("x", VarKind::Principal).unwrap();
        let t = reg.register("t", VarKind::Parametric).unwrap();
        assert!(x < t);
        assert_eq!(reg.name(t), "t");
        assert_eq!(reg.kind(x), VarKind::Principal);
        assert!(matches!(
            reg.register("x", VarKind::Parametric),
            Err(AlgError::DuplicateVariable(_))
        ));
        assert!(matches!(reg.get("y"), Err(AlgError::UnknownVariable(_))));
    }
}
