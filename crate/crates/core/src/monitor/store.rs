use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::labels::{Label, LabelError, LabelFamily};
use crate::lattice::LatticeSpec;

/// An integer tagged with a security label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledValue {
    pub value: i64,
    pub label: Label,
}

impl LabeledValue {
    pub fn new(value: i64, label: Label) -> LabeledValue {
        LabeledValue { value, label }
    }

    pub fn display<'a>(&'a self, lat: &'a LatticeSpec) -> impl fmt::Display + 'a {
        DisplayValue { v: self, lat }
    }
}

struct DisplayValue<'a> {
    v: &'a LabeledValue,
    lat: &'a LatticeSpec,
}

impl fmt::Display for DisplayValue<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.v.value, self.v.label.display(self.lat))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Label { line: usize, source: LabelError },
    #[error("line {line}: variable `{var}` bound twice")]
    Duplicate { line: usize, var: String },
}

/// Map from variable names to labeled values, kept in name order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Store {
    vars: BTreeMap<String, LabeledValue>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn get(&self, var: &str) -> Option<&LabeledValue> {
        self.vars.get(var)
    }

    pub fn insert(&mut self, var: impl Into<String>, v: LabeledValue) -> Option<LabeledValue> {
        self.vars.insert(var.into(), v)
    }

    /// Overwrites an existing binding in place; returns false if unbound.
    pub fn set(&mut self, var: &str, v: LabeledValue) -> bool {
        match self.vars.get_mut(var) {
            Some(slot) => {
                *slot = v;
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LabeledValue)> {
        self.vars.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.vars.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn same_domain(&self, other: &Store) -> bool {
        self.vars.keys().eq(other.vars.keys())
    }

    /// Parses the store file format, one `x = <int> @ <label>` per line.
    /// `true`/`false` are accepted as values.
    pub fn parse(text: &str, family: LabelFamily, lat: &LatticeSpec) -> Result<Store, StoreError> {
        let mut store = Store::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: &str| StoreError::Syntax {
                line,
                message: message.to_string(),
            };
            let (var, rest) = content
                .split_once('=')
                .ok_or_else(|| syntax("expected `x = <int> @ <label>`"))?;
            let (value, label) = rest.split_once('@').ok_or_else(|| syntax("missing `@ <label>`"))?;
            let var = var.trim();
            if !crate::lattice::is_valid_name(var) {
                return Err(syntax(&format!("invalid variable name `{var}`")));
            }
            let value = match value.trim() {
                "true" => 1,
                "false" => 0,
                v => v
                    .parse::<i64>()
                    .map_err(|_| syntax(&format!("invalid integer `{v}`")))?,
            };
            let label = Label::parse(label, family, lat).map_err(|source| StoreError::Label { line, source })?;
            if store.insert(var, LabeledValue::new(value, label)).is_some() {
                return Err(StoreError::Duplicate {
                    line,
                    var: var.to_string(),
                });
            }
        }
        Ok(store)
    }

    /// Canonical text in the store file format.
    pub fn render(&self, lat: &LatticeSpec) -> String {
        let mut out = String::new();
        for (var, v) in self.iter() {
            out.push_str(&format!("{var} = {} @ {}\n", v.value, v.label.display(lat)));
        }
        out
    }

    /// Short stable digest of the canonical text.
    pub fn digest(&self, lat: &LatticeSpec) -> String {
        let hash = Sha256::digest(self.render(lat).as_bytes());
        hex::encode(&hash[..8])
    }
}

impl FromIterator<(String, LabeledValue)> for Store {
    fn from_iter<I: IntoIterator<Item = (String, LabeledValue)>>(iter: I) -> Store {
        Store {
            vars: iter.into_iter().collect(),
        }
    }
}
