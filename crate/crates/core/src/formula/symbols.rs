use std::collections::BTreeMap;

use super::Formula;

/// Positive integer identifier of an atom.
pub type AtomId = u32;

/// Bijection between atom names and identifiers `1..=n`, in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    ids: BTreeMap<String, AtomId>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table of the atoms of `f`, numbered by first textual occurrence.
    pub fn from_formula(f: &Formula) -> Self {
        let mut table = Self::new();
        for a in f.atoms() {
            table.intern(&a);
        }
        table
    }

    /// Returns the id of `name`, assigning the next free one if needed.
    /// `last` is a position flag and is never interned.
    pub fn intern(&mut self, name: &str) -> AtomId {
        assert_ne!(name, "last", "`last` is not an atom");
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        self.names.push(name.to_string());
        let id = self.names.len() as AtomId;
        self.ids.insert(name.to_string(), id);
        id
    }

    /// Inserts `name` under an explicit id. Fails if either side is taken.
    pub(crate) fn insert_with_id(&mut self, id: AtomId, name: &str) -> Result<(), String> {
        if id == 0 {
            return Err("atom identifiers start at 1".into());
        }
        if self.ids.contains_key(name) {
            return Err(format!("duplicate atom `{name}`"));
        }
        let idx = (id - 1) as usize;
        if idx < self.names.len() && !self.names[idx].is_empty() {
            return Err(format!("duplicate atom id {id}"));
        }
        if idx >= self.names.len() {
            self.names.resize(idx + 1, String::new());
        }
        self.names[idx] = name.to_string();
        self.ids.insert(name.to_string(), id);
        Ok(())
    }

    /// True when ids are exactly `1..=len` with no holes.
    pub(crate) fn is_contiguous(&self) -> bool {
        self.names.iter().all(|n| !n.is_empty())
    }

    pub fn id(&self, name: &str) -> Option<AtomId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: AtomId) -> Option<&str> {
        if id == 0 {
            return None;
        }
        self.names.get((id - 1) as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// `(id, name)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| ((i + 1) as AtomId, n.as_str()))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Extends `self` with the atoms of `other` that are missing, keeping
    /// existing ids.
    pub fn merged(&self, other: &SymbolTable) -> SymbolTable {
        let mut out = self.clone();
        for (_, name) in other.iter() {
            out.intern(name);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    #[test]
    fn ids_follow_first_occurrence() {
        let f = parse_formula("G b & X a & b").unwrap();
        let t = SymbolTable::from_formula(&f);
        assert_eq!(t.id("b"), Some(1));
        assert_eq!(t.id("a"), Some(2));
        assert_eq!(t.name(2), Some("a"));
        assert_eq!(t.name(0), None);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn explicit_ids_detect_clashes() {
        let mut t = SymbolTable::new();
        t.insert_with_id(2, "b").unwrap();
        assert!(!t.is_contiguous());
        t.insert_with_id(1, "a").unwrap();
        assert!(t.is_contiguous());
        assert!(t.insert_with_id(1, "c").is_err());
        assert!(t.insert_with_id(3, "a").is_err());
        assert!(t.insert_with_id(0, "z").is_err());
    }

    #[test]
    fn merge_keeps_existing_ids() {
        let mut a = SymbolTable::new();
        a.intern("x");
        let mut b = SymbolTable::new();
        b.intern("y");
        b.intern("x");
        let m = a.merged(&b);
        assert_eq!(m.id("x"), Some(1));
        assert_eq!(m.id("y"), Some(2));
    }
}
