use std::fmt;

use crate::labels::{Label, Pc};
use crate::lang::Loc;
use crate::lattice::LatticeSpec;

use super::store::LabeledValue;

/// Which assignment rule produced a label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Naive,
    Nsu,
    Pus,
    PusProduct,
    Assn1,
    Assn2,
    Assn2Original,
    Assn2Unsound,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Naive => "assn-naive",
            Rule::Nsu => "assn-NSU",
            Rule::Pus => "assn-PUS",
            Rule::PusProduct => "assn-PUS'",
            Rule::Assn1 => "assn-1",
            Rule::Assn2 => "assn-2",
            Rule::Assn2Original => "assn-2-original",
            Rule::Assn2Unsound => "assn-2-unsound",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HaltReason {
    /// Assignment under a pc not below the variable's label (NSU only).
    NsuViolation,
    /// Branch or loop guard carries a partially-leaked label.
    BranchOnPartiallyLeaked,
}

impl HaltReason {
    pub fn name(self) -> &'static str {
        match self {
            HaltReason::NsuViolation => "NsuViolation",
            HaltReason::BranchOnPartiallyLeaked => "BranchOnPartiallyLeaked",
        }
    }
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchKind {
    If,
    While,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Assign {
        loc: Loc,
        rule: Rule,
        var: String,
        old: LabeledValue,
        new: LabeledValue,
        /// Label of the assigned expression.
        rhs: Label,
        pc: Pc,
    },
    Branch {
        loc: Loc,
        kind: BranchKind,
        taken: bool,
        guard: Label,
        outer_pc: Pc,
        /// pc for the chosen branch body (or the next loop iteration).
        pc: Pc,
    },
    Halt {
        loc: Loc,
        reason: HaltReason,
        pc: Pc,
        /// Assigned variable for NSU halts.
        var: Option<String>,
        /// Offending label: the variable's label for NSU halts, the guard
        /// label for branch halts.
        label: Label,
    },
}

impl TraceEvent {
    pub fn loc(&self) -> Loc {
        match self {
            TraceEvent::Assign { loc, .. } | TraceEvent::Branch { loc, .. } | TraceEvent::Halt { loc, .. } => *loc,
        }
    }

    /// One tab-separated line: `line rule var old-label new-label pc`.
    ///
    /// Branch rows use `if-t`, `if-f`, `while-t` or `while-f` as the rule,
    /// `-` for var and old label, and the guard label in the new-label
    /// column. Halt rows use `halt-nsu` or `halt-branch`.
    pub fn tsv(&self, lat: &LatticeSpec) -> String {
        let pcname = |pc: &Pc| lat.name(pc.elem()).to_string();
        match self {
            TraceEvent::Assign {
                loc,
                rule,
                var,
                old,
                new,
                pc,
                ..
            } => format!(
                "{}\t{}\t{}\t{}\t{}\t{}",
                loc.line,
                rule,
                var,
                old.label.display(lat),
                new.label.display(lat),
                pcname(pc)
            ),
            TraceEvent::Branch {
                loc,
                kind,
                taken,
                guard,
                pc,
                ..
            } => {
                let rule = match (kind, taken) {
                    (BranchKind::If, true) => "if-t",
                    (BranchKind::If, false) => "if-f",
                    (BranchKind::While, true) => "while-t",
                    (BranchKind::While, false) => "while-f",
                };
                format!("{}\t{}\t-\t-\t{}\t{}", loc.line, rule, guard.display(lat), pcname(pc))
            }
            TraceEvent::Halt {
                loc,
                reason,
                pc,
                var,
                label,
            } => match reason {
                HaltReason::NsuViolation => format!(
                    "{}\thalt-nsu\t{}\t{}\t-\t{}",
                    loc.line,
                    var.as_deref().unwrap_or("-"),
                    label.display(lat),
                    pcname(pc)
                ),
                HaltReason::BranchOnPartiallyLeaked => format!(
                    "{}\thalt-branch\t-\t-\t{}\t{}",
                    loc.line,
                    label.display(lat),
                    pcname(pc)
                ),
            },
        }
    }
}

/// A completed sub-derivation: the command at `loc` ran under `pc` and
/// produced exactly the events `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub loc: Loc,
    pub pc: Pc,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    /// Every command execution that ran to completion, innermost first.
    pub spans: Vec<Span>,
}

impl Trace {
    pub fn assignments(&self) -> impl Iterator<Item = &TraceEvent> {
        self.events.iter().filter(|e| matches!(e, TraceEvent::Assign { .. }))
    }

    pub fn tsv(&self, lat: &LatticeSpec) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.tsv(lat));
            out.push('\n');
        }
        out
    }
}
