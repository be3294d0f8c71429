use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::labels::Pc;
use crate::lang::Stmt;
use crate::lattice::LatticeSpec;
use crate::monitor::{Monitor, Status, Store};

use super::equiv::{inequivalent_vars, store_equiv, Adversary, EquivDef};
use super::pairs::{label_universe, EquivPairSpace, PairSource};
use super::NiError;

/// Two equivalent initial stores whose completed runs ended inequivalent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    /// First inequivalent variable.
    pub var: String,
    /// All inequivalent variables.
    pub vars: Vec<String>,
    pub hash1: String,
    pub hash2: String,
    pub store1: Store,
    pub store2: Store,
    pub final1: Store,
    pub final2: Store,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiReport {
    pub program_vars: usize,
    pub pairs_tested: u64,
    /// Pairs where both runs completed.
    pub completed_pairs: u64,
    /// Pairs where at least one run halted (and neither ran out of fuel).
    pub halted_pairs: u64,
    pub fuel_exhausted_pairs: u64,
    /// Size of the full pair space.
    pub space: u64,
    /// Seed used when pairs were sampled instead of enumerated.
    pub sampled_seed: Option<u64>,
    pub violations: Vec<Violation>,
}

impl NiReport {
    fn empty(program_vars: usize) -> NiReport {
        NiReport {
            program_vars,
            pairs_tested: 0,
            completed_pairs: 0,
            halted_pairs: 0,
            fuel_exhausted_pairs: 0,
            space: 0,
            sampled_seed: None,
            violations: Vec::new(),
        }
    }

    pub fn sampled(&self) -> bool {
        self.sampled_seed.is_some()
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Adds the counts and violations of `other`.
    pub fn absorb(&mut self, other: NiReport) {
        self.pairs_tested += other.pairs_tested;
        self.completed_pairs += other.completed_pairs;
        self.halted_pairs += other.halted_pairs;
        self.fuel_exhausted_pairs += other.fuel_exhausted_pairs;
        self.space = self.space.saturating_add(other.space);
        self.sampled_seed = self.sampled_seed.or(other.sampled_seed);
        self.violations.extend(other.violations);
        self.violations.sort();
    }

    /// Every variable that differs in some violation, deduplicated.
    pub fn violating_vars(&self) -> Vec<&str> {
        let mut vars: Vec<&str> = self
            .violations
            .iter()
            .flat_map(|v| v.vars.iter().map(String::as_str))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }
}

impl fmt::Display for NiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pairs tested     {}", self.pairs_tested)?;
        writeln!(f, "both completed   {}", self.completed_pairs)?;
        writeln!(f, "halted           {}", self.halted_pairs)?;
        writeln!(f, "fuel exhausted   {}", self.fuel_exhausted_pairs)?;
        match self.sampled_seed {
            Some(seed) => writeln!(f, "sampled          yes, seed {seed}, space {}", self.space)?,
            None => writeln!(f, "sampled          no (exhaustive)")?,
        }
        writeln!(f, "violations       {}", self.violations.len())?;
        for v in &self.violations {
            for var in &v.vars {
                writeln!(f, "VIOLATION\t{var}\t{}\t{}", v.hash1, v.hash2)?;
            }
        }
        Ok(())
    }
}

enum PairResult {
    Completed(Option<Violation>),
    Halted,
    Fuel,
}

fn run_pair(
    m: &Monitor,
    def: EquivDef,
    adv: Adversary,
    prog: &Stmt,
    s1: Store,
    s2: Store,
) -> Result<PairResult, NiError> {
    let lat = m.lattice();
    let pc = Pc::bottom(lat);
    let m = m.with_tracing(false);
    let o1 = m.exec(prog, s1.clone(), pc)?;
    let o2 = m.exec(prog, s2.clone(), pc)?;
    Ok(match (o1.status, o2.status) {
        (Status::FuelExhausted { .. }, _) | (_, Status::FuelExhausted { .. }) => PairResult::Fuel,
        (Status::Completed, Status::Completed) => {
            let vars = inequivalent_vars(def, lat, adv, &o1.store, &o2.store)?;
            PairResult::Completed(vars.first().cloned().map(|var| Violation {
                var,
                vars,
                hash1: s1.digest(lat),
                hash2: s2.digest(lat),
                store1: s1,
                store2: s2,
                final1: o1.store,
                final2: o2.store,
            }))
        }
        _ => PairResult::Halted,
    })
}

fn tally(results: Vec<PairResult>, report: &mut NiReport) {
    for r in results {
        report.pairs_tested += 1;
        match r {
            PairResult::Completed(v) => {
                report.completed_pairs += 1;
                report.violations.extend(v);
            }
            PairResult::Halted => report.halted_pairs += 1,
            PairResult::Fuel => report.fuel_exhausted_pairs += 1,
        }
    }
    report.violations.sort();
}

/// Runs `prog` from both stores of every pair (from `pc = ⊥`) and reports
/// completed pairs whose final stores are distinguishable by `adv`.
pub fn check_tini(
    m: &Monitor,
    def: EquivDef,
    adv: Adversary,
    prog: &Stmt,
    source: &PairSource,
) -> Result<NiReport, NiError> {
    let lat = m.lattice();
    let vars = prog.variables();
    let mut report = NiReport::empty(vars.len());
    let run = |(s1, s2): (Store, Store)| run_pair(m, def, adv, prog, s1, s2);
    let universe = label_universe(m.strategy(), lat, m.family());
    let sample = |space: &EquivPairSpace, seed: u64, n: usize| -> Vec<(Store, Store)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| space.sample(&mut rng)).collect()
    };
    let results: Vec<PairResult> = match source {
        PairSource::Explicit(pairs) => {
            report.space = pairs.len() as u64;
            for (s1, s2) in pairs {
                m.validate(prog, s1)?;
                m.validate(prog, s2)?;
                if !store_equiv(def, lat, adv, s1, s2)? {
                    return Err(NiError::InequivalentPair);
                }
            }
            pairs.iter().cloned().map(run).collect::<Result<_, _>>()?
        }
        PairSource::Exhaustive {
            domain,
            cap,
            samples,
            seed,
        } => {
            let space = EquivPairSpace::new(lat, def, adv, &universe, vars, domain)?;
            report.space = space.count();
            if report.space <= *cap {
                (0..report.space)
                    .into_par_iter()
                    .map(|i| run(space.nth(i)))
                    .collect::<Result<_, _>>()?
            } else {
                report.sampled_seed = Some(*seed);
                sample(&space, *seed, *samples)
                    .into_par_iter()
                    .map(run)
                    .collect::<Result<_, _>>()?
            }
        }
        PairSource::Random { domain, seed, n } => {
            let space = EquivPairSpace::new(lat, def, adv, &universe, vars, domain)?;
            report.space = space.count();
            report.sampled_seed = Some(*seed);
            sample(&space, *seed, *n)
                .into_par_iter()
                .map(run)
                .collect::<Result<_, _>>()?
        }
    };
    tally(results, &mut report);
    Ok(report)
}

/// Whether `adv` cannot observe a context running under `pc`.
pub fn pc_hidden_from(lat: &LatticeSpec, pc: Pc, adv: Adversary) -> bool {
    match adv {
        Adversary::Level(a) => !lat.leq(pc.elem(), a),
        Adversary::Principal(i) => lat.product_shape().is_some_and(|s| s.mask(pc.elem()) & (1 << i) != 0),
    }
}

/// Runs `prog` from `store` under a `pc` hidden from `adv` and checks the
/// final store is still equivalent to the initial one. Runs that halt or
/// run out of fuel pass vacuously.
pub fn check_confinement(
    m: &Monitor,
    def: EquivDef,
    adv: Adversary,
    prog: &Stmt,
    store: &Store,
    pc: Pc,
) -> Result<bool, NiError> {
    let lat = m.lattice();
    if !pc_hidden_from(lat, pc, adv) {
        return Err(NiError::PcVisible);
    }
    m.validate(prog, store)?;
    let out = m.with_tracing(false).exec(prog, store.clone(), pc)?;
    Ok(match out.status {
        Status::Completed => store_equiv(def, lat, adv, store, &out.store)?,
        _ => true,
    })
}
