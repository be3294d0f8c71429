//! The bundled example programs with their stores and expected outcomes.
//!
//! Each fixture `<name>` has a program `<name>.prog`, optional stores
//! `<name>.store1`, `<name>.store2`, ... and an expectations file
//! `<name>.expect` with one directive per line:
//!
//! ```text
//! title <free text>
//! lattice <builtin>
//! run <store> <strategy> completed [var=value@label ...]
//! run <store> <strategy> halted <reason> <line> [var=value@label ...]
//! trace <store> <strategy> <line> <var> <new-label> <pc>
//! guard <store> <strategy> <line> <guard-label>
//! transition <row-class> <col-class>
//! ```

use std::fmt;

use thiserror::Error;

use crate::labels::{Label, LabelFamily};
use crate::lang::{parse_program, Stmt, SyntaxError};
use crate::lattice::{LatticeError, LatticeSpec};
use crate::monitor::{HaltReason, Monitor, MonitorError, Outcome, Status, Store, StoreError, Strategy, TraceEvent};
use crate::nicheck::{run_transition, NiError, PairClass};

mod files {
    include!(concat!(env!("OUT_DIR"), "/corpus_files.rs"));
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("no fixture named `{0}`")]
    UnknownFixture(String),
    #[error("{file}: {source}")]
    Syntax { file: String, source: SyntaxError },
    #[error("{file}: {source}")]
    Lattice { file: String, source: LatticeError },
    #[error("{file}: {source}")]
    Store { file: String, source: StoreError },
    #[error("{file} line {line}: {message}")]
    Expect { file: String, line: usize, message: String },
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Check(#[from] NiError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpectStatus {
    Completed,
    Halted { reason: HaltReason, line: u32 },
}

/// An expected `var=value@label` binding; the label is kept as text and
/// parsed in the label family of the run it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub var: String,
    pub value: i64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Run {
        store: String,
        strategy: Strategy,
        status: ExpectStatus,
        bindings: Vec<Binding>,
    },
    Trace {
        store: String,
        strategy: Strategy,
        line: u32,
        var: String,
        label: String,
        pc: String,
    },
    Guard {
        store: String,
        strategy: Strategy,
        line: u32,
        label: String,
    },
    Transition {
        row: PairClass,
        col: PairClass,
    },
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub title: Option<String>,
    pub source: &'static str,
    pub program: Stmt,
    pub lattice_name: String,
    pub lattice: LatticeSpec,
    /// `(store name, file text)`, e.g. `("store1", "x = 0 @ L\n")`.
    pub stores: Vec<(String, &'static str)>,
    pub expectations: Vec<Expectation>,
}

/// Alternative names accepted by [`fixture`].
pub const ALIASES: [(&str, &str); 1] = [("table1", "listing3")];

fn file(name: &str) -> Option<&'static str> {
    files::FILES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Fixture names in corpus order.
pub fn names() -> Vec<&'static str> {
    files::FILES
        .iter()
        .filter_map(|(n, _)| n.strip_suffix(".prog"))
        .collect()
}

pub fn fixtures() -> Result<Vec<Fixture>, CorpusError> {
    names().into_iter().map(fixture).collect()
}

pub fn fixture(name: &str) -> Result<Fixture, CorpusError> {
    let name = ALIASES
        .iter()
        .find(|(alias, _)| *alias == name)
        .map_or(name, |(_, target)| target);
    let prog_file = format!("{name}.prog");
    let source = file(&prog_file).ok_or_else(|| CorpusError::UnknownFixture(name.to_string()))?;
    let program = parse_program(source).map_err(|source| CorpusError::Syntax {
        file: prog_file,
        source,
    })?;
    let prefix = format!("{name}.store");
    let stores = files::FILES
        .iter()
        .filter_map(|(n, text)| n.strip_prefix(&prefix).map(|suffix| (format!("store{suffix}"), *text)))
        .collect();
    let expect_file = format!("{name}.expect");
    let mut title = None;
    let mut lattice_name = "two_point".to_string();
    let mut expectations = Vec::new();
    for (i, raw) in file(&expect_file).unwrap_or("").lines().enumerate() {
        let err = |message: String| CorpusError::Expect {
            file: expect_file.clone(),
            line: i + 1,
            message,
        };
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (head, rest) = content.split_once(' ').unwrap_or((content, ""));
        match head {
            "title" => title = Some(rest.trim().to_string()),
            "lattice" => lattice_name = rest.trim().to_string(),
            _ => expectations.push(parse_expectation(head, rest).map_err(err)?),
        }
    }
    let lattice = LatticeSpec::builtin(&lattice_name).map_err(|source| CorpusError::Lattice {
        file: expect_file.clone(),
        source,
    })?;
    Ok(Fixture {
        name: name.to_string(),
        title,
        source,
        program,
        lattice_name,
        lattice,
        stores,
        expectations,
    })
}

fn parse_binding(tok: &str) -> Result<Binding, String> {
    let bad = || format!("expected var=value@label, got `{tok}`");
    let (var, rest) = tok.split_once('=').ok_or_else(bad)?;
    let (value, label) = rest.split_once('@').ok_or_else(bad)?;
    Ok(Binding {
        var: var.to_string(),
        value: value.parse().map_err(|_| bad())?,
        label: label.to_string(),
    })
}

fn parse_expectation(head: &str, rest: &str) -> Result<Expectation, String> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    let strategy = |t: Option<&&str>| -> Result<Strategy, String> {
        t.ok_or("missing strategy")?.parse().map_err(|e| format!("{e}"))
    };
    let line = |t: Option<&&str>| -> Result<u32, String> {
        t.ok_or("missing line")?
            .parse()
            .map_err(|_| "invalid line number".to_string())
    };
    let need = |n: usize| {
        if toks.len() < n {
            Err(format!("`{head}` needs at least {n} fields"))
        } else {
            Ok(())
        }
    };
    match head {
        "run" => {
            need(3)?;
            let (status, bindings_at) = match toks[2] {
                "completed" => (ExpectStatus::Completed, 3),
                "halted" => {
                    need(5)?;
                    let reason = match toks[3] {
                        "NsuViolation" => HaltReason::NsuViolation,
                        "BranchOnPartiallyLeaked" => HaltReason::BranchOnPartiallyLeaked,
                        r => return Err(format!("unknown halt reason `{r}`")),
                    };
                    (
                        ExpectStatus::Halted {
                            reason,
                            line: line(toks.get(4))?,
                        },
                        5,
                    )
                }
                s => return Err(format!("unknown status `{s}`")),
            };
            Ok(Expectation::Run {
                store: toks[0].to_string(),
                strategy: strategy(toks.get(1))?,
                status,
                bindings: toks[bindings_at..]
                    .iter()
                    .map(|t| parse_binding(t))
                    .collect::<Result<_, _>>()?,
            })
        }
        "trace" => {
            need(6)?;
            Ok(Expectation::Trace {
                store: toks[0].to_string(),
                strategy: strategy(toks.get(1))?,
                line: line(toks.get(2))?,
                var: toks[3].to_string(),
                label: toks[4].to_string(),
                pc: toks[5].to_string(),
            })
        }
        "guard" => {
            need(4)?;
            Ok(Expectation::Guard {
                store: toks[0].to_string(),
                strategy: strategy(toks.get(1))?,
                line: line(toks.get(2))?,
                label: toks[3].to_string(),
            })
        }
        "transition" => {
            need(2)?;
            Ok(Expectation::Transition {
                row: toks[0].parse()?,
                col: toks[1].parse()?,
            })
        }
        h => Err(format!("unknown directive `{h}`")),
    }
}

/// One checked expectation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub description: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayReport {
    pub fixture: String,
    pub checks: Vec<Check>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "{mark} {}", c.description)?;
            if !c.detail.is_empty() {
                write!(f, " ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Fixture {
    pub fn store_text(&self, name: &str) -> Option<&'static str> {
        self.stores.iter().find(|(n, _)| n == name).map(|(_, text)| *text)
    }

    pub fn monitor(&self, strategy: Strategy) -> Result<Monitor<'_>, CorpusError> {
        Ok(Monitor::new(&self.lattice, strategy)?)
    }

    pub fn store(&self, name: &str, family: LabelFamily) -> Result<Store, CorpusError> {
        let file = format!("{}.{name}", self.name);
        let text = self
            .store_text(name)
            .ok_or_else(|| CorpusError::UnknownFixture(file.clone()))?;
        Store::parse(text, family, &self.lattice).map_err(|source| CorpusError::Store { file, source })
    }

    /// Runs the program from a named store under `strategy`.
    pub fn run(&self, store: &str, strategy: Strategy) -> Result<Outcome, CorpusError> {
        let m = self.monitor(strategy)?;
        let s = self.store(store, m.family())?;
        Ok(m.run(&self.program, &s)?)
    }

    fn label(&self, text: &str, family: LabelFamily) -> Result<Label, CorpusError> {
        Label::parse(text, family, &self.lattice).map_err(|e| CorpusError::Expect {
            file: format!("{}.expect", self.name),
            line: 0,
            message: e.to_string(),
        })
    }

    /// Checks every expectation of the fixture.
    pub fn replay(&self) -> Result<ReplayReport, CorpusError> {
        let lat = &self.lattice;
        let mut checks = Vec::new();
        for exp in &self.expectations {
            let check = match exp {
                Expectation::Run {
                    store,
                    strategy,
                    status,
                    bindings,
                } => {
                    let out = self.run(store, *strategy)?;
                    let family = self.monitor(*strategy)?.family();
                    let got = match out.status {
                        Status::Completed => "completed".to_string(),
                        Status::Halted { reason, loc } => format!("halted {reason} {}", loc.line),
                        Status::FuelExhausted { loc } => format!("fuel exhausted {}", loc.line),
                    };
                    let mut passed = match (status, out.status) {
                        (ExpectStatus::Completed, Status::Completed) => true,
                        (ExpectStatus::Halted { reason, line }, Status::Halted { reason: r, loc }) => {
                            *reason == r && *line == loc.line
                        }
                        _ => false,
                    };
                    let mut detail = got;
                    for b in bindings {
                        let want = self.label(&b.label, family)?;
                        match out.store.get(&b.var) {
                            Some(v) if v.value == b.value && v.label == want => {}
                            Some(v) => {
                                passed = false;
                                detail.push_str(&format!("; {} = {}", b.var, v.display(lat)));
                            }
                            None => {
                                passed = false;
                                detail.push_str(&format!("; {} unbound", b.var));
                            }
                        }
                    }
                    let want = bindings
                        .iter()
                        .map(|b| format!(" {}={}@{}", b.var, b.value, b.label))
                        .collect::<String>();
                    let status = match status {
                        ExpectStatus::Completed => "completed".to_string(),
                        ExpectStatus::Halted { reason, line } => format!("halted {reason} {line}"),
                    };
                    Check {
                        description: format!("run {store} {strategy}: {status}{want}"),
                        passed,
                        detail: if passed { String::new() } else { detail },
                    }
                }
                Expectation::Trace {
                    store,
                    strategy,
                    line,
                    var,
                    label,
                    pc,
                } => {
                    let out = self.run(store, *strategy)?;
                    let family = self.monitor(*strategy)?.family();
                    let want = self.label(label, family)?;
                    let hit = out.trace.events.iter().find_map(|e| match e {
                        TraceEvent::Assign {
                            loc, var: x, new, pc, ..
                        } if loc.line == *line && x == var => Some((new.label, *pc)),
                        _ => None,
                    });
                    let passed = matches!(hit, Some((k, p)) if k == want && lat.name(p.elem()) == pc);
                    Check {
                        description: format!("trace {store} {strategy} line {line}: {var} -> {label} under pc {pc}"),
                        passed,
                        detail: match hit {
                            Some((k, p)) if !passed => {
                                format!("got {} under pc {}", k.display(lat), lat.name(p.elem()))
                            }
                            None => "no assignment recorded".to_string(),
                            _ => String::new(),
                        },
                    }
                }
                Expectation::Guard {
                    store,
                    strategy,
                    line,
                    label,
                } => {
                    let out = self.run(store, *strategy)?;
                    let family = self.monitor(*strategy)?.family();
                    let want = self.label(label, family)?;
                    let hit = out.trace.events.iter().rev().find_map(|e| match e {
                        TraceEvent::Branch { loc, guard, .. }
                        | TraceEvent::Halt {
                            loc,
                            label: guard,
                            var: None,
                            ..
                        } if loc.line == *line => Some(*guard),
                        _ => None,
                    });
                    Check {
                        description: format!("guard {store} {strategy} line {line}: {label}"),
                        passed: hit == Some(want),
                        detail: match hit {
                            Some(k) if k != want => format!("got {}", k.display(lat)),
                            None => "no branch recorded".to_string(),
                            _ => String::new(),
                        },
                    }
                }
                Expectation::Transition { row, col } => {
                    let r = run_transition(&self.program, *row, *col)?;
                    Check {
                        description: format!("transition {row} -> {col}"),
                        passed: r.passed(),
                        detail: match &r.witness {
                            Some(w) => format!(
                                "x1 ends {} / {}",
                                w.final1.display(&LatticeSpec::chain3()),
                                w.final2.display(&LatticeSpec::chain3())
                            ),
                            None => format!("no witness in {} store pairs", r.tried),
                        },
                    }
                }
            };
            checks.push(check);
        }
        Ok(ReplayReport {
            fixture: self.name.clone(),
            checks,
        })
    }
}
