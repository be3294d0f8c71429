//! Label-pair transitions of a single variable across two equivalent runs,
//! on the three-level chain with the adversary at the bottom.

use std::fmt;
use std::str::FromStr;

use crate::labels::{Label, Pc};
use crate::lang::Stmt;
use crate::lattice::{Elem, LatticeSpec};
use crate::monitor::{LabeledValue, Monitor, Status, Store, Strategy};

use super::pairs::label_universe;
use super::NiError;

/// How two labeled values can be equivalent, one class per clause shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairClass {
    /// Same visible pure label, same value.
    EqLow,
    /// Starred, then visible pure with a bound above the star's.
    StarLow,
    /// Visible pure, then starred with a bound below the pure label.
    LowStar,
    /// Both starred.
    StarStar,
    /// Both pure and hidden.
    HighHigh,
    /// Starred, then hidden pure.
    StarHigh,
    /// Hidden pure, then starred.
    HighStar,
}

impl PairClass {
    /// Table order.
    pub const ALL: [PairClass; 7] = [
        PairClass::EqLow,
        PairClass::StarLow,
        PairClass::LowStar,
        PairClass::StarStar,
        PairClass::HighHigh,
        PairClass::StarHigh,
        PairClass::HighStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairClass::EqLow => "eq-low",
            PairClass::StarLow => "star-low",
            PairClass::LowStar => "low-star",
            PairClass::StarStar => "star-star",
            PairClass::HighHigh => "high-high",
            PairClass::StarHigh => "star-high",
            PairClass::HighStar => "high-star",
        }
    }

    pub fn index(self) -> usize {
        PairClass::ALL.iter().position(|&c| c == self).unwrap()
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairClass {
    type Err = String;

    fn from_str(s: &str) -> Result<PairClass, String> {
        PairClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown pair class `{s}`"))
    }
}

/// The class of an equivalent pair of values for adversary `adv`, or
/// `None` when the values are not equivalent.
pub fn classify(lat: &LatticeSpec, adv: Elem, v1: &LabeledValue, v2: &LabeledValue) -> Option<PairClass> {
    let low = |e| lat.leq(e, adv);
    match (v1.label, v2.label) {
        (Label::Pure(k), Label::Pure(m)) => {
            if k == m && low(k) && v1.value == v2.value {
                Some(PairClass::EqLow)
            } else if !low(k) && !low(m) {
                Some(PairClass::HighHigh)
            } else {
                None
            }
        }
        (Label::Star(_), Label::Star(_)) => Some(PairClass::StarStar),
        (Label::Star(a1), Label::Pure(a2)) => {
            if !low(a2) {
                Some(PairClass::StarHigh)
            } else if lat.leq(a1, a2) {
                Some(PairClass::StarLow)
            } else {
                None
            }
        }
        (Label::Pure(a1), Label::Star(a2)) => {
            if !low(a1) {
                Some(PairClass::HighStar)
            } else if lat.leq(a2, a1) {
                Some(PairClass::LowStar)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Variable whose label pair is tracked.
pub const TRACKED: &str = "x1";

/// A witness that a program takes `row` to `col`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionWitness {
    pub store1: Store,
    pub store2: Store,
    pub final1: LabeledValue,
    pub final2: LabeledValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionResult {
    pub row: PairClass,
    pub col: PairClass,
    /// Store pairs tried before a witness was found (or in total).
    pub tried: usize,
    pub witness: Option<TransitionWitness>,
}

impl TransitionResult {
    pub fn passed(&self) -> bool {
        self.witness.is_some()
    }
}

/// Searches for equivalent initial stores, with `x1` in class `row`, from
/// which both runs of `prog` complete and leave `x1` in class `col`.
///
/// The other variables have fixed labels: `l` is `L`, `m` is `M`, `h` is
/// `H` and `ls` is `L*`. Their values range over `{0, 1}`, with `l` equal
/// in both runs.
pub fn run_transition(prog: &Stmt, row: PairClass, col: PairClass) -> Result<TransitionResult, NiError> {
    let lat = LatticeSpec::chain3();
    let e = |n| lat.elem(n).expect("chain3 element");
    let adv = lat.bottom();
    let m = Monitor::new(&lat, Strategy::Pua)?.with_tracing(false);
    let universe = label_universe(Strategy::Pua, &lat, m.family());
    let values: Vec<LabeledValue> = universe
        .iter()
        .flat_map(|&k| [0, 1].map(|n| LabeledValue::new(n, k)))
        .collect();
    let x1_pairs: Vec<(LabeledValue, LabeledValue)> = values
        .iter()
        .flat_map(|a| values.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| classify(&lat, adv, a, b) == Some(row))
        .collect();
    let fixed = [
        ("m", Label::Pure(e("M"))),
        ("h", Label::Pure(e("H"))),
        ("ls", Label::Star(e("L"))),
    ];
    let pc = Pc::bottom(&lat);
    let mut tried = 0;
    for &(x1a, x1b) in &x1_pairs {
        for l in [0, 1] {
            // One bit per run for each of m, h, ls.
            for bits in 0..1u32 << (2 * fixed.len()) {
                let mut s1 = Store::new();
                let mut s2 = Store::new();
                s1.insert(TRACKED, x1a);
                s2.insert(TRACKED, x1b);
                s1.insert("l", LabeledValue::new(l, Label::Pure(adv)));
                s2.insert("l", LabeledValue::new(l, Label::Pure(adv)));
                for (i, &(var, k)) in fixed.iter().enumerate() {
                    s1.insert(var, LabeledValue::new(((bits >> (2 * i)) & 1) as i64, k));
                    s2.insert(var, LabeledValue::new(((bits >> (2 * i + 1)) & 1) as i64, k));
                }
                tried += 1;
                let o1 = m.exec(prog, s1.clone(), pc)?;
                let o2 = m.exec(prog, s2.clone(), pc)?;
                if o1.status != Status::Completed || o2.status != Status::Completed {
                    continue;
                }
                let f1 = *o1.store.get(TRACKED).expect("x1 bound");
                let f2 = *o2.store.get(TRACKED).expect("x1 bound");
                if classify(&lat, adv, &f1, &f2) == Some(col) {
                    return Ok(TransitionResult {
                        row,
                        col,
                        tried,
                        witness: Some(TransitionWitness {
                            store1: s1,
                            store2: s2,
                            final1: f1,
                            final2: f2,
                        }),
                    });
                }
            }
        }
    }
    Ok(TransitionResult {
        row,
        col,
        tried,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::LabelFamily;
    use crate::lang::parse_program;

    #[test]
    fn classes_cover_equivalence() {
        // On chain3 with adversary L, a pair is classified iff it is
        // equivalent under the generalized relation.
        use super::super::equiv::{value_equiv, Adversary, EquivDef};
        let lat = LatticeSpec::chain3();
        let fam = LabelFamily::Lattice;
        let universe = label_universe(Strategy::Pua, &lat, fam);
        let adv = lat.bottom();
        for &k in &universe {
            for &m in &universe {
                for (a, b) in [(0, 0), (0, 1)] {
                    let (v1, v2) = (LabeledValue::new(a, k), LabeledValue::new(b, m));
                    let eq = value_equiv(EquivDef::Pua, &lat, Adversary::Level(adv), &v1, &v2).unwrap();
                    assert_eq!(classify(&lat, adv, &v1, &v2).is_some(), eq);
                }
            }
        }
    }

    #[test]
    fn high_assignment_reaches_high_high() {
        let prog = parse_program("x1 := h").unwrap();
        let r = run_transition(&prog, PairClass::EqLow, PairClass::HighHigh).unwrap();
        assert!(r.passed());
        let r = run_transition(&prog, PairClass::EqLow, PairClass::StarStar).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn class_names_parse() {
        for c in PairClass::ALL {
            assert_eq!(c.name().parse::<PairClass>().unwrap(), c);
        }
    }
}
