use std::fmt;

use thiserror::Error;

use crate::labels::{Label, Level};
use crate::lattice::{Elem, LatticeSpec};
use crate::monitor::{LabeledValue, Store, Strategy};

/// Which store-equivalence relation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquivDef {
    /// Pure labels: equal low labels with equal values, or both high.
    Basic,
    /// Two-point labels `L`, `H`, `P`; `P` is equivalent to anything.
    Pus2,
    /// Product labels, observed by a single principal.
    Pup,
    /// Pure and starred labels over an arbitrary lattice.
    Pua,
}

impl EquivDef {
    pub fn name(self) -> &'static str {
        match self {
            EquivDef::Basic => "basic",
            EquivDef::Pus2 => "pus2",
            EquivDef::Pup => "pup",
            EquivDef::Pua => "pua",
        }
    }

    pub fn for_strategy(s: Strategy) -> EquivDef {
        match s {
            Strategy::Naive | Strategy::Nsu => EquivDef::Basic,
            Strategy::Pus2 => EquivDef::Pus2,
            Strategy::Pup => EquivDef::Pup,
            Strategy::Pua | Strategy::PuaOriginal | Strategy::PuaUnsound => EquivDef::Pua,
        }
    }

    /// The relation for `strategy` against `adv`. The two-point relation
    /// only describes the `L` observer; a `H` observer of a two-point run
    /// falls back to the generalized relation.
    pub fn select(s: Strategy, lat: &LatticeSpec, adv: Adversary) -> EquivDef {
        match (EquivDef::for_strategy(s), adv) {
            (EquivDef::Pus2, Adversary::Level(a)) if a != lat.bottom() => EquivDef::Pua,
            (d, _) => d,
        }
    }
}

impl fmt::Display for EquivDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The observer: a lattice level, or one principal of a product label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Adversary {
    Level(Elem),
    Principal(usize),
}

impl Adversary {
    pub fn display(self, lat: &LatticeSpec) -> String {
        match self {
            Adversary::Level(e) => lat.name(e).to_string(),
            Adversary::Principal(i) => format!("principal {i}"),
        }
    }

    /// Parses an element name, or for pup a principal index (`0`, `p0`).
    pub fn parse(text: &str, s: Strategy, lat: &LatticeSpec) -> Option<Adversary> {
        match s {
            Strategy::Pup => {
                let i: usize = text.strip_prefix('p').unwrap_or(text).parse().ok()?;
                (i < lat.product_shape()?.arity()).then_some(Adversary::Principal(i))
            }
            _ => lat.elem(text).ok().map(Adversary::Level),
        }
    }

    /// Every adversary worth checking for `strategy` on `lat`.
    pub fn all_for(s: Strategy, lat: &LatticeSpec) -> Vec<Adversary> {
        match s {
            Strategy::Pup => {
                let n = lat.product_shape().map_or(0, |p| p.arity());
                (0..n).map(Adversary::Principal).collect()
            }
            _ => lat.elements().map(Adversary::Level).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("label family does not fit the {0} equivalence")]
    MixedLabelFamilies(EquivDef),
    #[error("adversary kind does not fit the {0} equivalence")]
    AdversaryKindMismatch(EquivDef),
    #[error("stores bind different variables")]
    DomainMismatch,
}

/// Per-principal view of a product label component as a label over
/// [`LatticeSpec::two_point`], where `L` is element 0 and `H` element 1.
pub fn project(level: Level) -> Label {
    match level {
        Level::L => Label::Pure(Elem::from_index(0)),
        Level::H => Label::Pure(Elem::from_index(1)),
        Level::P => Label::Star(Elem::from_index(0)),
    }
}

fn list_equiv(k: Level, m: Level, same_value: bool) -> bool {
    match (k, m) {
        (Level::P, _) | (_, Level::P) => true,
        (Level::L, Level::L) => same_value,
        (Level::H, Level::H) => true,
        _ => false,
    }
}

pub fn value_equiv(
    def: EquivDef,
    lat: &LatticeSpec,
    adv: Adversary,
    v1: &LabeledValue,
    v2: &LabeledValue,
) -> Result<bool, EquivError> {
    let same = v1.value == v2.value;
    let level = |adv: Adversary| match adv {
        Adversary::Level(a) => Ok(a),
        Adversary::Principal(_) => Err(EquivError::AdversaryKindMismatch(def)),
    };
    match def {
        EquivDef::Basic => {
            let a = level(adv)?;
            match (v1.label, v2.label) {
                (Label::Pure(k), Label::Pure(m)) => {
                    Ok((k == m && lat.leq(k, a) && same) || (!lat.leq(k, a) && !lat.leq(m, a)))
                }
                _ => Err(EquivError::MixedLabelFamilies(def)),
            }
        }
        EquivDef::Pus2 => {
            let a = level(adv)?;
            if a != lat.bottom() {
                return Err(EquivError::AdversaryKindMismatch(def));
            }
            let two = |k: Label| match k {
                Label::Pure(e) if e == lat.bottom() => Ok(Level::L),
                Label::Pure(_) => Ok(Level::H),
                Label::Star(_) => Ok(Level::P),
                Label::Prod(_) => Err(EquivError::MixedLabelFamilies(def)),
            };
            Ok(list_equiv(two(v1.label)?, two(v2.label)?, same))
        }
        EquivDef::Pup => {
            let Adversary::Principal(i) = adv else {
                return Err(EquivError::AdversaryKindMismatch(def));
            };
            match (v1.label, v2.label) {
                (Label::Prod(k), Label::Prod(m)) if k.arity() == m.arity() && i < k.arity() => {
                    Ok(list_equiv(k.get(i), m.get(i), same))
                }
                (Label::Prod(_), Label::Prod(_)) => Err(EquivError::AdversaryKindMismatch(def)),
                _ => Err(EquivError::MixedLabelFamilies(def)),
            }
        }
        EquivDef::Pua => {
            let a = level(adv)?;
            pua_equiv(lat, a, v1.label, v2.label, same).ok_or(EquivError::MixedLabelFamilies(def))
        }
    }
}

fn pua_equiv(lat: &LatticeSpec, a: Elem, k: Label, m: Label, same: bool) -> Option<bool> {
    use Label::*;
    let leq = |x, y| lat.leq(x, y);
    Some(match (k, m) {
        (Pure(k), Pure(m)) => (k == m && leq(k, a) && same) || (!leq(k, a) && !leq(m, a)),
        (Star(_), Star(_)) => true,
        (Star(a1), Pure(a2)) => !leq(a2, a) || leq(a1, a2),
        (Pure(a1), Star(a2)) => !leq(a1, a) || leq(a2, a1),
        _ => return None,
    })
}

/// Product-label values seen by principal `i`, as two-point labeled values.
pub fn project_value(v: &LabeledValue, i: usize) -> Option<LabeledValue> {
    match v.label {
        Label::Prod(p) if i < p.arity() => Some(LabeledValue::new(v.value, project(p.get(i)))),
        _ => None,
    }
}

/// The first variable (in name order) on which the stores differ for `adv`.
pub fn first_inequivalent(
    def: EquivDef,
    lat: &LatticeSpec,
    adv: Adversary,
    s1: &Store,
    s2: &Store,
) -> Result<Option<String>, EquivError> {
    if !s1.same_domain(s2) {
        return Err(EquivError::DomainMismatch);
    }
    for ((x, v1), (_, v2)) in s1.iter().zip(s2.iter()) {
        if !value_equiv(def, lat, adv, v1, v2)? {
            return Ok(Some(x.to_string()));
        }
    }
    Ok(None)
}

/// Every variable on which the stores differ for `adv`, in name order.
pub fn inequivalent_vars(
    def: EquivDef,
    lat: &LatticeSpec,
    adv: Adversary,
    s1: &Store,
    s2: &Store,
) -> Result<Vec<String>, EquivError> {
    if !s1.same_domain(s2) {
        return Err(EquivError::DomainMismatch);
    }
    let mut out = Vec::new();
    for ((x, v1), (_, v2)) in s1.iter().zip(s2.iter()) {
        if !value_equiv(def, lat, adv, v1, v2)? {
            out.push(x.to_string());
        }
    }
    Ok(out)
}

pub fn store_equiv(
    def: EquivDef,
    lat: &LatticeSpec,
    adv: Adversary,
    s1: &Store,
    s2: &Store,
) -> Result<bool, EquivError> {
    Ok(first_inequivalent(def, lat, adv, s1, s2)?.is_none())
}
