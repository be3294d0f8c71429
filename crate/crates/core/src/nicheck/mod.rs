//! Executable store-equivalence relations, the noninterference pair runner,
//! per-derivation lemma checks and the label-transition search.

mod equiv;
mod gen;
mod lemmas;
mod pairs;
mod suite;
mod tini;
mod transitions;

use thiserror::Error;

use crate::monitor::MonitorError;

pub use equiv::{
    first_inequivalent, inequivalent_vars, project, project_value, store_equiv, value_equiv, Adversary, EquivDef,
    EquivError,
};
pub use gen::{random_program, GenConfig};
pub use lemmas::{check_expr_lemma, check_trace_lemmas, lemmas_for_run, Lemma, LemmaViolation};
pub use pairs::{gen_equiv_store_pairs, label_universe, EquivPairSpace, PairSource, DEFAULT_MAX_PAIRS};
pub use suite::{lattice_for, lemma_suite, tini_suite, LemmaReport, SuiteRow};
pub use tini::{check_confinement, check_tini, pc_hidden_from, NiReport, Violation};
pub use transitions::{classify, run_transition, PairClass, TransitionResult, TransitionWitness, TRACKED};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NiError {
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error("{count} store pairs exceed the cap of {cap}")]
    ExplosionGuard { count: u64, cap: u64 },
    #[error("explicit store pair is not equivalent for the adversary")]
    InequivalentPair,
    #[error("the pc must be hidden from the adversary")]
    PcVisible,
    #[error("no adversary `{0}` for this strategy and lattice")]
    UnknownAdversary(String),
}
