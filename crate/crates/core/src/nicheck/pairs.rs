use rand::Rng;

use crate::labels::{Label, LabelFamily, ProdLabel};
use crate::lattice::LatticeSpec;
use crate::monitor::{LabeledValue, Store, Strategy};

use super::equiv::{value_equiv, Adversary, EquivDef, EquivError};
use super::NiError;

/// Default limit on exhaustively enumerated pairs.
pub const DEFAULT_MAX_PAIRS: u64 = 1_000_000;

/// Labels an initial store may carry for `strategy`: every pure label,
/// plus starred ones where the strategy has them.
pub fn label_universe(strategy: Strategy, lat: &LatticeSpec, family: LabelFamily) -> Vec<Label> {
    match family {
        LabelFamily::Product { arity } => (0..1u16 << arity)
            .map(|m| Label::Prod(ProdLabel::from_mask(arity, m as u8)))
            .collect(),
        LabelFamily::Lattice => {
            let mut out: Vec<Label> = lat.elements().map(Label::Pure).collect();
            match strategy {
                Strategy::Pus2 => out.push(Label::Star(lat.bottom())),
                s if s.is_generalized() => out.extend(lat.elements().map(Label::Star)),
                _ => {}
            }
            out
        }
    }
}

/// All equivalent store pairs over a set of variables, as a product of the
/// equivalent value pairs of each variable.
#[derive(Debug, Clone)]
pub struct EquivPairSpace {
    vars: Vec<String>,
    per_var: Vec<LabeledValue>,
    pairs: Vec<(usize, usize)>,
}

impl EquivPairSpace {
    pub fn new(
        lat: &LatticeSpec,
        def: EquivDef,
        adv: Adversary,
        universe: &[Label],
        vars: impl IntoIterator<Item = String>,
        domain: &[i64],
    ) -> Result<EquivPairSpace, EquivError> {
        let per_var: Vec<LabeledValue> = universe
            .iter()
            .flat_map(|&k| domain.iter().map(move |&n| LabeledValue::new(n, k)))
            .collect();
        let mut pairs = Vec::new();
        for (i, a) in per_var.iter().enumerate() {
            for (j, b) in per_var.iter().enumerate() {
                if value_equiv(def, lat, adv, a, b)? {
                    pairs.push((i, j));
                }
            }
        }
        Ok(EquivPairSpace {
            vars: vars.into_iter().collect(),
            per_var,
            pairs,
        })
    }

    /// Equivalent value pairs for a single variable.
    pub fn value_pairs(&self) -> impl Iterator<Item = (LabeledValue, LabeledValue)> + '_ {
        self.pairs.iter().map(|&(i, j)| (self.per_var[i], self.per_var[j]))
    }

    /// Number of store pairs, saturating at `u64::MAX`.
    pub fn count(&self) -> u64 {
        let n = self.pairs.len() as u64;
        self.vars
            .iter()
            .try_fold(1u64, |acc, _| acc.checked_mul(n))
            .unwrap_or(u64::MAX)
    }

    /// The `index`-th pair in enumeration order; the last variable varies
    /// fastest.
    pub fn nth(&self, mut index: u64) -> (Store, Store) {
        let n = self.pairs.len() as u64;
        let mut picks = vec![0usize; self.vars.len()];
        for slot in picks.iter_mut().rev() {
            *slot = (index % n) as usize;
            index /= n;
        }
        self.build(&picks)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> (Store, Store) {
        let picks: Vec<usize> = self.vars.iter().map(|_| rng.gen_range(0..self.pairs.len())).collect();
        self.build(&picks)
    }

    fn build(&self, picks: &[usize]) -> (Store, Store) {
        let mut s1 = Store::new();
        let mut s2 = Store::new();
        for (var, &p) in self.vars.iter().zip(picks) {
            let (i, j) = self.pairs[p];
            s1.insert(var.clone(), self.per_var[i]);
            s2.insert(var.clone(), self.per_var[j]);
        }
        (s1, s2)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Store, Store)> + '_ {
        (0..self.count()).map(move |i| self.nth(i))
    }
}

/// Every equivalent store pair, in deterministic order, or
/// [`NiError::ExplosionGuard`] when there are more than `cap`.
pub fn gen_equiv_store_pairs(
    lat: &LatticeSpec,
    def: EquivDef,
    adv: Adversary,
    universe: &[Label],
    vars: impl IntoIterator<Item = String>,
    domain: &[i64],
    cap: u64,
) -> Result<Vec<(Store, Store)>, NiError> {
    let space = EquivPairSpace::new(lat, def, adv, universe, vars, domain)?;
    let count = space.count();
    if count > cap {
        return Err(NiError::ExplosionGuard { count, cap });
    }
    Ok(space.iter().collect())
}

/// Where the store pairs for a noninterference check come from.
#[derive(Debug, Clone)]
pub enum PairSource {
    /// Every equivalent pair over `domain`; switches to `samples` seeded
    /// random pairs when there are more than `cap`.
    Exhaustive {
        domain: Vec<i64>,
        cap: u64,
        samples: usize,
        seed: u64,
    },
    /// `n` seeded random equivalent pairs.
    Random { domain: Vec<i64>, seed: u64, n: usize },
    /// Exactly these pairs.
    Explicit(Vec<(Store, Store)>),
}

impl PairSource {
    /// Boolean values, default cap, and 20000 fallback samples.
    pub fn booleans(seed: u64) -> PairSource {
        PairSource::Exhaustive {
            domain: vec![0, 1],
            cap: DEFAULT_MAX_PAIRS,
            samples: 20_000,
            seed,
        }
    }
}
