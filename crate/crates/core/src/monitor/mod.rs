//! Big-step monitored interpreter with pluggable assignment strategies.

mod store;
mod trace;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::labels::{Label, LabelError, LabelFamily, Level, Pc, ProdLabel};
use crate::lang::{Expr, Loc, Stmt, StmtKind};
use crate::lattice::LatticeSpec;

pub use store::{LabeledValue, Store, StoreError};
pub use trace::{BranchKind, HaltReason, Rule, Span, Trace, TraceEvent};

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Naive,
    Nsu,
    Pus2,
    Pup,
    Pua,
    PuaOriginal,
    PuaUnsound,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Naive,
        Strategy::Nsu,
        Strategy::Pus2,
        Strategy::Pup,
        Strategy::Pua,
        Strategy::PuaOriginal,
        Strategy::PuaUnsound,
    ];

    /// Strategies expected to satisfy noninterference.
    pub const SOUND: [Strategy; 5] = [
        Strategy::Nsu,
        Strategy::Pus2,
        Strategy::Pup,
        Strategy::Pua,
        Strategy::PuaOriginal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Naive => "naive",
            Strategy::Nsu => "nsu",
            Strategy::Pus2 => "pus2",
            Strategy::Pup => "pup",
            Strategy::Pua => "pua",
            Strategy::PuaOriginal => "pua_original",
            Strategy::PuaUnsound => "pua_unsound",
        }
    }

    /// Whether stores under this strategy may hold starred labels.
    pub fn allows_star(self) -> bool {
        matches!(
            self,
            Strategy::Pus2 | Strategy::Pua | Strategy::PuaOriginal | Strategy::PuaUnsound
        )
    }

    pub fn is_generalized(self) -> bool {
        matches!(self, Strategy::Pua | Strategy::PuaOriginal | Strategy::PuaUnsound)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}`")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Strategy, UnknownStrategy> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s || st.name().replace('_', "-") == s)
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("strategy {strategy} cannot run on this lattice: {reason}")]
    IncompatibleLattice { strategy: Strategy, reason: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{var}`: label {label} is not allowed under {strategy}")]
    LabelNotAllowed {
        var: String,
        label: String,
        strategy: Strategy,
    },
    #[error(transparent)]
    Label(#[from] LabelError),
}

/// Result of the assignment rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOutcome {
    Write { rule: Rule, label: Label },
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    Halted { reason: HaltReason, loc: Loc },
    FuelExhausted { loc: Loc },
}

impl Status {
    pub fn is_completed(&self) -> bool {
        matches!(self, Status::Completed)
    }
}

/// A finished run: its status, the store when it stopped, and the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub store: Store,
    pub trace: Trace,
}

enum Stop {
    Halt(HaltReason, Loc),
    Fuel(Loc),
    Error(MonitorError),
}

impl From<MonitorError> for Stop {
    fn from(e: MonitorError) -> Stop {
        Stop::Error(e)
    }
}

impl From<LabelError> for Stop {
    fn from(e: LabelError) -> Stop {
        Stop::Error(e.into())
    }
}

/// A monitor for one lattice and strategy.
#[derive(Debug, Clone, Copy)]
pub struct Monitor<'a> {
    lat: &'a LatticeSpec,
    strategy: Strategy,
    family: LabelFamily,
    fuel: u64,
    tracing: bool,
}

impl<'a> Monitor<'a> {
    pub fn new(lat: &'a LatticeSpec, strategy: Strategy) -> Result<Monitor<'a>, MonitorError> {
        let incompatible = |reason: &str| MonitorError::IncompatibleLattice {
            strategy,
            reason: reason.to_string(),
        };
        let family = match strategy {
            Strategy::Pus2 => {
                if lat.product_shape().map(|s| s.arity()) != Some(1) {
                    return Err(incompatible("needs the two-point lattice {L, H}"));
                }
                LabelFamily::Lattice
            }
            Strategy::Pup => {
                let shape = lat
                    .product_shape()
                    .ok_or_else(|| incompatible("needs a powerset lattice over {L, H}"))?;
                LabelFamily::Product { arity: shape.arity() }
            }
            _ => LabelFamily::Lattice,
        };
        Ok(Monitor {
            lat,
            strategy,
            family,
            fuel: DEFAULT_FUEL,
            tracing: true,
        })
    }

    pub fn with_fuel(mut self, fuel: u64) -> Monitor<'a> {
        self.fuel = fuel;
        self
    }

    /// Turns event recording on or off. Outcomes are identical either way.
    pub fn with_tracing(mut self, on: bool) -> Monitor<'a> {
        self.tracing = on;
        self
    }

    pub fn lattice(&self) -> &'a LatticeSpec {
        self.lat
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn family(&self) -> LabelFamily {
        self.family
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    fn join(&self, a: Label, b: Label) -> Result<Label, LabelError> {
        let k = a.join(b, self.lat)?;
        // The two-point system has a single partially-leaked label.
        Ok(match (self.strategy, k) {
            (Strategy::Pus2, Label::Star(_)) => Label::Star(self.lat.bottom()),
            _ => k,
        })
    }

    /// The label a pc contributes to a join.
    pub fn pc_label(&self, pc: Pc) -> Label {
        match self.family {
            LabelFamily::Lattice => Label::Pure(pc.elem()),
            LabelFamily::Product { arity } => {
                let mask = self.shape().mask(pc.elem());
                Label::Prod(ProdLabel::from_mask(arity, mask))
            }
        }
    }

    fn shape(&self) -> &'a crate::lattice::ProductShape {
        self.lat
            .product_shape()
            .expect("product mode requires a product lattice")
    }

    pub fn eval(&self, store: &Store, e: &Expr) -> Result<LabeledValue, MonitorError> {
        Ok(match e {
            Expr::Const(n) => LabeledValue::new(*n, self.family.bottom(self.lat)),
            Expr::Var(x) => *store.get(x).ok_or_else(|| MonitorError::UnboundVariable(x.clone()))?,
            Expr::BinOp(op, a, b) => {
                let a = self.eval(store, a)?;
                let b = self.eval(store, b)?;
                LabeledValue::new(op.apply(a.value, b.value), self.join(a.label, b.label)?)
            }
            Expr::Not(a) => {
                let a = self.eval(store, a)?;
                LabeledValue::new((a.value == 0) as i64, a.label)
            }
        })
    }

    /// The new label for `x := e` where `x` holds label `l` and `e`
    /// evaluated to label `m`.
    pub fn assign_label(&self, l: Label, pc: Pc, m: Label) -> Result<AssignOutcome, MonitorError> {
        let lat = self.lat;
        let pcl = self.pc_label(pc);
        let write = |rule, label| Ok(AssignOutcome::Write { rule, label });
        match self.strategy {
            Strategy::Naive => write(Rule::Naive, self.join(pcl, m)?),
            Strategy::Nsu => {
                if lat.leq(pc.elem(), l.pure_bound()?) {
                    write(Rule::Nsu, Label::Pure(lat.join(pc.elem(), m.pure_bound()?)))
                } else {
                    Ok(AssignOutcome::Halt)
                }
            }
            Strategy::Pus2 => {
                let bot = lat.bottom();
                let k = if pc.elem() == bot {
                    m
                } else if l == Label::Pure(pc.elem()) {
                    self.join(m, pcl)?
                } else {
                    Label::Star(bot)
                };
                write(Rule::Pus, k)
            }
            Strategy::Pup => {
                let (Label::Prod(lp), Label::Prod(mp)) = (l, m) else {
                    return Err(LabelError::MixedLabelFamilies.into());
                };
                if lp.arity() != mp.arity() {
                    return Err(LabelError::ArityMismatch(lp.arity(), mp.arity()).into());
                }
                let pcmask = self.shape().mask(pc.elem());
                let mut k = mp;
                for a in 0..mp.arity() {
                    let level = if pcmask & (1 << a) == 0 {
                        mp.get(a)
                    } else if lp.get(a) == Level::H {
                        mp.get(a).join(Level::H)
                    } else {
                        Level::P
                    };
                    k = k.with(a, level);
                }
                write(Rule::PusProduct, Label::Prod(k))
            }
            Strategy::Pua | Strategy::PuaOriginal | Strategy::PuaUnsound => {
                let ax = l.pure_bound()?;
                if lat.leq(pc.elem(), ax) {
                    return write(Rule::Assn1, self.join(pcl, m)?);
                }
                let (rule, bound) = match self.strategy {
                    Strategy::Pua => (Rule::Assn2, lat.meet(lat.join(pc.elem(), m.pure_bound()?), ax)),
                    Strategy::PuaOriginal => (Rule::Assn2Original, lat.meet(pc.elem(), ax)),
                    _ => (Rule::Assn2Unsound, ax),
                };
                write(rule, Label::Star(bound))
            }
        }
    }

    /// The pc for a branch on a guard labeled `guard` under `pc`, or `None`
    /// when the guard is partially leaked.
    pub fn branch_guard(&self, guard: Label, pc: Pc) -> Option<Pc> {
        let e = match guard {
            Label::Pure(e) => e,
            Label::Star(_) => return None,
            Label::Prod(p) => self.shape().elem(p.pure_mask()?),
        };
        Some(pc.join(Pc(e), self.lat))
    }

    /// Checks that `store` binds every variable of `prog` with labels this
    /// strategy can hold.
    pub fn validate(&self, prog: &Stmt, store: &Store) -> Result<(), MonitorError> {
        for var in prog.variables() {
            if store.get(&var).is_none() {
                return Err(MonitorError::UnboundVariable(var));
            }
        }
        for (var, v) in store.iter() {
            let ok = self.family.admits(&v.label)
                && match v.label {
                    Label::Star(e) => {
                        self.strategy.is_generalized() || (self.strategy == Strategy::Pus2 && e == self.lat.bottom())
                    }
                    _ => true,
                };
            if !ok {
                return Err(MonitorError::LabelNotAllowed {
                    var: var.to_string(),
                    label: v.label.display(self.lat).to_string(),
                    strategy: self.strategy,
                });
            }
        }
        Ok(())
    }

    /// Validates the store and runs the program from `pc = ⊥`.
    pub fn run(&self, prog: &Stmt, store: &Store) -> Result<Outcome, MonitorError> {
        self.validate(prog, store)?;
        self.exec(prog, store.clone(), Pc::bottom(self.lat))
    }

    /// Runs `stmt` under `pc` without validating the store up front.
    pub fn exec(&self, stmt: &Stmt, store: Store, pc: Pc) -> Result<Outcome, MonitorError> {
        let mut run = Run {
            m: self,
            store,
            trace: Trace::default(),
            fuel: self.fuel,
        };
        let status = match run.stmt(stmt, pc) {
            Ok(()) => Status::Completed,
            Err(Stop::Halt(reason, loc)) => Status::Halted { reason, loc },
            Err(Stop::Fuel(loc)) => Status::FuelExhausted { loc },
            Err(Stop::Error(e)) => return Err(e),
        };
        Ok(Outcome {
            status,
            store: run.store,
            trace: run.trace,
        })
    }
}

struct Run<'m, 'a> {
    m: &'m Monitor<'a>,
    store: Store,
    trace: Trace,
    fuel: u64,
}

impl Run<'_, '_> {
    fn event(&mut self, e: impl FnOnce() -> TraceEvent) {
        if self.m.tracing {
            self.trace.events.push(e());
        }
    }

    fn span(&mut self, loc: Loc, pc: Pc, start: usize) {
        if self.m.tracing {
            let end = self.trace.events.len();
            self.trace.spans.push(Span { loc, pc, start, end });
        }
    }

    fn guard(&mut self, loc: Loc, kind: BranchKind, e: &Expr, pc: Pc) -> Result<(bool, Pc), Stop> {
        let g = self.m.eval(&self.store, e)?;
        let Some(inner) = self.m.branch_guard(g.label, pc) else {
            self.event(|| TraceEvent::Halt {
                loc,
                reason: HaltReason::BranchOnPartiallyLeaked,
                pc,
                var: None,
                label: g.label,
            });
            return Err(Stop::Halt(HaltReason::BranchOnPartiallyLeaked, loc));
        };
        let taken = g.value != 0;
        self.event(|| TraceEvent::Branch {
            loc,
            kind,
            taken,
            guard: g.label,
            outer_pc: pc,
            pc: inner,
        });
        Ok((taken, inner))
    }

    fn stmt(&mut self, s: &Stmt, pc: Pc) -> Result<(), Stop> {
        let start = self.trace.events.len();
        match &s.kind {
            StmtKind::Skip => {}
            StmtKind::Assign(x, e) => {
                let v = self.m.eval(&self.store, e)?;
                let old = *self
                    .store
                    .get(x)
                    .ok_or_else(|| MonitorError::UnboundVariable(x.clone()))?;
                match self.m.assign_label(old.label, pc, v.label)? {
                    AssignOutcome::Write { rule, label } => {
                        let new = LabeledValue::new(v.value, label);
                        self.store.set(x, new);
                        self.event(|| TraceEvent::Assign {
                            loc: s.loc,
                            rule,
                            var: x.clone(),
                            old,
                            new,
                            rhs: v.label,
                            pc,
                        });
                    }
                    AssignOutcome::Halt => {
                        self.event(|| TraceEvent::Halt {
                            loc: s.loc,
                            reason: HaltReason::NsuViolation,
                            pc,
                            var: Some(x.clone()),
                            label: old.label,
                        });
                        return Err(Stop::Halt(HaltReason::NsuViolation, s.loc));
                    }
                }
            }
            StmtKind::Seq(a, b) => {
                self.stmt(a, pc)?;
                self.stmt(b, pc)?;
            }
            StmtKind::If(e, t, f) => {
                let (taken, inner) = self.guard(s.loc, BranchKind::If, e, pc)?;
                self.stmt(if taken { t } else { f }, inner)?;
            }
            StmtKind::While(e, body) => {
                // Iteration i runs the remaining loop under the pc
                // accumulated from the first i guards.
                let mut suffixes = vec![(start, pc)];
                let mut cur = pc;
                loop {
                    if self.fuel == 0 {
                        return Err(Stop::Fuel(s.loc));
                    }
                    self.fuel -= 1;
                    let (taken, inner) = self.guard(s.loc, BranchKind::While, e, cur)?;
                    if !taken {
                        break;
                    }
                    self.stmt(body, inner)?;
                    cur = inner;
                    suffixes.push((self.trace.events.len(), cur));
                }
                for &(from, at) in suffixes.iter().skip(1).rev() {
                    self.span(s.loc, at, from);
                }
            }
        }
        self.span(s.loc, pc, start);
        Ok(())
    }
}
