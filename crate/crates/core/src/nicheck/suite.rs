use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::labels::Pc;
use crate::lang::{Expr, Stmt};
use crate::lattice::LatticeSpec;
use crate::monitor::{Monitor, Strategy};

use super::equiv::{Adversary, EquivDef};
use super::lemmas::{check_expr_lemma, lemmas_for_run};
use super::pairs::{label_universe, EquivPairSpace, PairSource};
use super::tini::{check_confinement, check_tini, pc_hidden_from, NiReport};
use super::NiError;

/// The lattice a strategy's noninterference check runs on, given the
/// lattice a program was written for. pus2 only exists on two points and
/// pup needs a product; a non-product lattice falls back to two principals.
pub fn lattice_for(strategy: Strategy, declared: &LatticeSpec) -> Cow<'_, LatticeSpec> {
    match strategy {
        Strategy::Pus2 if !declared.is_two_point() => Cow::Owned(LatticeSpec::two_point()),
        Strategy::Pup if declared.product_shape().is_none() => Cow::Owned(LatticeSpec::powerset(2)),
        _ => Cow::Borrowed(declared),
    }
}

/// One (strategy, adversary) cell of a suite run.
#[derive(Debug, Clone)]
pub struct SuiteRow {
    pub strategy: Strategy,
    pub lattice: String,
    pub adversary: String,
    pub def: EquivDef,
    pub report: NiReport,
}

/// Checks `prog` under every strategy in `strategies` against every
/// adversary of the lattice each one runs on (or just `adversary`, by
/// name, when given).
pub fn tini_suite(
    prog: &Stmt,
    declared: &LatticeSpec,
    strategies: &[Strategy],
    adversary: Option<&str>,
    fuel: u64,
    source: &PairSource,
) -> Result<Vec<SuiteRow>, NiError> {
    let mut rows = Vec::new();
    for &s in strategies {
        let lat = lattice_for(s, declared);
        let m = Monitor::new(&lat, s)?.with_fuel(fuel);
        let advs = match adversary {
            None => Adversary::all_for(s, &lat),
            Some(name) => {
                vec![Adversary::parse(name, s, &lat).ok_or_else(|| NiError::UnknownAdversary(name.to_string()))?]
            }
        };
        for adv in advs {
            let def = EquivDef::select(s, &lat, adv);
            let report = check_tini(&m, def, adv, prog, source)?;
            rows.push(SuiteRow {
                strategy: s,
                lattice: lattice_name(&lat),
                adversary: adv.display(&lat),
                def,
                report,
            });
        }
    }
    Ok(rows)
}

/// Counts and failures of a [`lemma_suite`] run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaReport {
    pub traces: u64,
    pub expr_pairs: u64,
    pub confined_runs: u64,
    pub violations: Vec<String>,
}

impl LemmaReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn absorb(&mut self, other: LemmaReport) {
        self.traces += other.traces;
        self.expr_pairs += other.expr_pairs;
        self.confined_runs += other.confined_runs;
        self.violations.extend(other.violations);
    }
}

/// Runs the lemma checks on up to `pairs` equivalent store pairs (all of
/// them when there are fewer; otherwise drawn with `seed`) per strategy
/// and adversary: trace lemmas on both runs from `⊥`, the expression lemma
/// on every expression, and confinement plus trace lemmas from the first
/// store under each pc hidden from the adversary.
pub fn lemma_suite(
    prog: &Stmt,
    declared: &LatticeSpec,
    strategies: &[Strategy],
    fuel: u64,
    pairs: u64,
    seed: u64,
) -> Result<LemmaReport, NiError> {
    let mut exprs: Vec<&Expr> = Vec::new();
    prog.for_each_expr(&mut |e| exprs.push(e));
    let mut report = LemmaReport::default();
    for &s in strategies {
        let lat = lattice_for(s, declared);
        let m = Monitor::new(&lat, s)?.with_fuel(fuel);
        let universe = label_universe(s, &lat, m.family());
        for adv in Adversary::all_for(s, &lat) {
            let def = EquivDef::select(s, &lat, adv);
            let space = EquivPairSpace::new(&lat, def, adv, &universe, prog.variables(), &[0, 1])?;
            let hidden: Vec<Pc> = lat
                .elements()
                .map(Pc)
                .filter(|&pc| pc_hidden_from(&lat, pc, adv))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let total = space.count();
            for k in 0..pairs.min(total) {
                let (s1, s2) = if total <= pairs {
                    space.nth(k)
                } else {
                    space.sample(&mut rng)
                };
                let ctx = || {
                    format!(
                        "{s}, adversary {}, stores {} / {}",
                        adv.display(&lat),
                        s1.digest(&lat),
                        s2.digest(&lat)
                    )
                };
                for st in [&s1, &s2] {
                    for v in lemmas_for_run(&m, prog, st, Pc::bottom(&lat))? {
                        report.violations.push(format!("{}: {v}", ctx()));
                    }
                    report.traces += 1;
                }
                for e in &exprs {
                    if !check_expr_lemma(&m, def, adv, e, &s1, &s2)? {
                        report
                            .violations
                            .push(format!("{}: expression lemma fails on {e}", ctx()));
                    }
                    report.expr_pairs += 1;
                }
                for &pc in &hidden {
                    if !check_confinement(&m, def, adv, prog, &s1, pc)? {
                        report.violations.push(format!(
                            "{}: confinement fails under pc {}",
                            ctx(),
                            lat.name(pc.elem())
                        ));
                    }
                    for v in lemmas_for_run(&m, prog, &s1, pc)? {
                        report.violations.push(format!("{}: {v}", ctx()));
                    }
                    report.confined_runs += 1;
                    report.traces += 1;
                }
            }
        }
    }
    Ok(report)
}

fn lattice_name(lat: &LatticeSpec) -> String {
    let names: Vec<&str> = lat.elements().map(|e| lat.name(e)).collect();
    format!("{{{}}}", names.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;

    #[test]
    fn lattice_choice() {
        let fig5 = LatticeSpec::fig5();
        assert!(lattice_for(Strategy::Pus2, &fig5).is_two_point());
        assert_eq!(lattice_for(Strategy::Pup, &fig5).product_shape().unwrap().arity(), 2);
        assert_eq!(lattice_for(Strategy::Pua, &fig5).len(), fig5.len());
    }

    #[test]
    fn suite_covers_every_adversary() {
        let prog = parse_program("x := y").unwrap();
        let lat = LatticeSpec::chain3();
        let rows = tini_suite(&prog, &lat, &Strategy::SOUND, None, 1000, &PairSource::booleans(0)).unwrap();
        let per: Vec<usize> = Strategy::SOUND
            .iter()
            .map(|s| rows.iter().filter(|r| r.strategy == *s).count())
            .collect();
        assert_eq!(per, [3, 2, 2, 3, 3]);
        assert!(rows.iter().all(|r| r.report.is_clean()));
        let lemmas = lemma_suite(&prog, &lat, &Strategy::SOUND, 1000, 16, 0).unwrap();
        assert!(lemmas.is_clean(), "{:?}", lemmas.violations);
        assert!(lemmas.confined_runs > 0);
        let one = tini_suite(&prog, &lat, &[Strategy::Pua], Some("M"), 1000, &PairSource::booleans(0)).unwrap();
        assert_eq!(one.len(), 1);
    }
}
