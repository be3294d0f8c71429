//! Label algebra: pure labels, starred (partially-leaked) labels, and
//! per-principal product labels over `{L, H, P}`.

use std::fmt;

use thiserror::Error;

use crate::lattice::{Elem, LatticeSpec};

/// Maximum number of principals a product label can carry.
pub const MAX_PRINCIPALS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("cannot combine labels from different families")]
    MixedLabelFamilies,
    #[error("product labels have different arities ({0} vs {1})")]
    ArityMismatch(usize, usize),
    #[error("product labels have no lattice element bound")]
    ProdNotSupported,
    #[error("invalid label `{0}`")]
    Invalid(String),
    #[error("unknown lattice element `{0}`")]
    UnknownElement(String),
}

/// One component of a product label. The derived order `L < H < P` is the
/// extended order used for equivalence checks; join is the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    L,
    H,
    P,
}

impl Level {
    pub fn join(self, other: Level) -> Level {
        self.max(other)
    }

    fn as_char(self) -> char {
        match self {
            Level::L => 'L',
            Level::H => 'H',
            Level::P => 'P',
        }
    }

    fn from_char(c: char) -> Option<Level> {
        match c {
            'L' => Some(Level::L),
            'H' => Some(Level::H),
            'P' => Some(Level::P),
            _ => None,
        }
    }
}

/// A map from principals `0..arity` to [`Level`]s, packed into two bitmasks.
///
/// Invariant: `high & partial == 0`, and no bits are set at or above `arity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProdLabel {
    arity: u8,
    high: u8,
    partial: u8,
}

impl ProdLabel {
    pub fn new(levels: &[Level]) -> Result<ProdLabel, LabelError> {
        if levels.is_empty() || levels.len() > MAX_PRINCIPALS {
            return Err(LabelError::Invalid(format!(
                "product label needs 1..={MAX_PRINCIPALS} components"
            )));
        }
        let mut label = ProdLabel::bottom(levels.len());
        for (i, &level) in levels.iter().enumerate() {
            label.set(i, level);
        }
        Ok(label)
    }

    /// All components `L`.
    pub fn bottom(arity: usize) -> ProdLabel {
        assert!((1..=MAX_PRINCIPALS).contains(&arity));
        ProdLabel {
            arity: arity as u8,
            high: 0,
            partial: 0,
        }
    }

    /// The pure label whose `H` components are the set bits of `mask`.
    pub fn from_mask(arity: usize, mask: u8) -> ProdLabel {
        let mut label = ProdLabel::bottom(arity);
        label.high = mask & label.full_mask();
        label
    }

    fn full_mask(self) -> u8 {
        ((1u16 << self.arity) - 1) as u8
    }

    fn set(&mut self, i: usize, level: Level) {
        let bit = 1u8 << i;
        self.high &= !bit;
        self.partial &= !bit;
        match level {
            Level::L => {}
            Level::H => self.high |= bit,
            Level::P => self.partial |= bit,
        }
    }

    pub fn arity(self) -> usize {
        self.arity as usize
    }

    pub fn get(self, i: usize) -> Level {
        let bit = 1u8 << i;
        if self.partial & bit != 0 {
            Level::P
        } else if self.high & bit != 0 {
            Level::H
        } else {
            Level::L
        }
    }

    pub fn levels(self) -> impl Iterator<Item = Level> {
        (0..self.arity()).map(move |i| self.get(i))
    }

    pub fn with(mut self, i: usize, level: Level) -> ProdLabel {
        self.set(i, level);
        self
    }

    pub fn join(self, other: ProdLabel) -> Result<ProdLabel, LabelError> {
        if self.arity != other.arity {
            return Err(LabelError::ArityMismatch(self.arity(), other.arity()));
        }
        let partial = self.partial | other.partial;
        let high = (self.high | other.high) & !partial;
        Ok(ProdLabel {
            arity: self.arity,
            high,
            partial,
        })
    }

    pub fn is_pure(self) -> bool {
        self.partial == 0
    }

    /// The set of `H` principals, when no component is `P`.
    pub fn pure_mask(self) -> Option<u8> {
        self.is_pure().then_some(self.high)
    }
}

impl fmt::Display for ProdLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, level) in self.levels().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", level.as_char())?;
        }
        Ok(())
    }
}

/// A security label attached to a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Pure(Elem),
    /// Partially leaked; the element is a lower bound on the pure labels
    /// the value may carry in alternate executions.
    Star(Elem),
    Prod(ProdLabel),
}

/// Which kind of labels a run works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelFamily {
    /// `Pure` and `Star` labels over a lattice.
    Lattice,
    /// `Prod` labels with a fixed number of principals.
    Product { arity: usize },
}

impl LabelFamily {
    pub fn bottom(self, lat: &LatticeSpec) -> Label {
        match self {
            LabelFamily::Lattice => Label::Pure(lat.bottom()),
            LabelFamily::Product { arity } => Label::Prod(ProdLabel::bottom(arity)),
        }
    }

    pub fn admits(self, label: &Label) -> bool {
        match (self, label) {
            (LabelFamily::Lattice, Label::Pure(_) | Label::Star(_)) => true,
            (LabelFamily::Product { arity }, Label::Prod(p)) => p.arity() == arity,
            _ => false,
        }
    }
}

impl Label {
    /// Join lifted to labels: starred if either side is starred,
    /// pointwise (with `x ⊔ P = P`) for product labels.
    pub fn join(self, other: Label, lat: &LatticeSpec) -> Result<Label, LabelError> {
        use Label::*;
        Ok(match (self, other) {
            (Pure(a), Pure(b)) => Pure(lat.join(a, b)),
            (Pure(a) | Star(a), Pure(b) | Star(b)) => Star(lat.join(a, b)),
            (Prod(a), Prod(b)) => Prod(a.join(b)?),
            _ => return Err(LabelError::MixedLabelFamilies),
        })
    }

    pub fn is_pure(&self) -> bool {
        match self {
            Label::Pure(_) => true,
            Label::Star(_) => false,
            Label::Prod(p) => p.is_pure(),
        }
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Label::Star(_))
    }

    /// The lattice element underlying a pure or starred label.
    pub fn pure_bound(&self) -> Result<Elem, LabelError> {
        match self {
            Label::Pure(e) | Label::Star(e) => Ok(*e),
            Label::Prod(_) => Err(LabelError::ProdNotSupported),
        }
    }

    pub fn family(&self) -> LabelFamily {
        match self {
            Label::Pure(_) | Label::Star(_) => LabelFamily::Lattice,
            Label::Prod(p) => LabelFamily::Product { arity: p.arity() },
        }
    }

    pub fn display<'a>(&'a self, lat: &'a LatticeSpec) -> LabelDisplay<'a> {
        LabelDisplay { label: self, lat }
    }

    /// Parses a label token in the given family.
    ///
    /// Lattice family: `NAME` or `NAME*` (also `NAME⋆`). On a two-element
    /// lattice without an element called `P`, the token `P` is accepted as
    /// the starred bottom.
    ///
    /// Product family: a comma list such as `H,P`, or the compact form
    /// `HP` with one character per principal.
    pub fn parse(text: &str, family: LabelFamily, lat: &LatticeSpec) -> Result<Label, LabelError> {
        let text = text.trim();
        match family {
            LabelFamily::Lattice => {
                if text == "P" && lat.is_two_point() && lat.elem("P").is_err() {
                    return Ok(Label::Star(lat.bottom()));
                }
                let (name, starred) = match text.strip_suffix('*').or_else(|| text.strip_suffix('⋆')) {
                    Some(base) => (base, true),
                    None => (text, false),
                };
                let e = lat
                    .elem(name)
                    .map_err(|_| LabelError::UnknownElement(name.to_string()))?;
                Ok(if starred { Label::Star(e) } else { Label::Pure(e) })
            }
            LabelFamily::Product { arity } => {
                let levels: Option<Vec<Level>> = if text.contains(',') {
                    text.split(',')
                        .map(|part| {
                            let mut cs = part.trim().chars();
                            match (cs.next(), cs.next()) {
                                (Some(c), None) => Level::from_char(c),
                                _ => None,
                            }
                        })
                        .collect()
                } else {
                    text.chars().map(Level::from_char).collect()
                };
                match levels {
                    Some(levels) if levels.len() == arity => Ok(Label::Prod(ProdLabel::new(&levels)?)),
                    _ => Err(LabelError::Invalid(text.to_string())),
                }
            }
        }
    }
}

pub struct LabelDisplay<'a> {
    label: &'a Label,
    lat: &'a LatticeSpec,
}

impl fmt::Display for LabelDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label {
            Label::Pure(e) => f.write_str(self.lat.name(*e)),
            Label::Star(e) => write!(f, "{}*", self.lat.name(*e)),
            Label::Prod(p) => write!(f, "{p}"),
        }
    }
}

/// Program-counter label. Always a pure lattice element; in product mode it
/// is the element of the powerset lattice with the same `H` principals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pc(pub Elem);

impl Pc {
    pub fn bottom(lat: &LatticeSpec) -> Pc {
        Pc(lat.bottom())
    }

    pub fn elem(self) -> Elem {
        self.0
    }

    pub fn join(self, other: Pc, lat: &LatticeSpec) -> Pc {
        Pc(lat.join(self.0, other.0))
    }
}
