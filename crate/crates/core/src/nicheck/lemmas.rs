use std::fmt;
use std::sync::OnceLock;

use crate::labels::{Label, Pc};
use crate::lang::{Expr, Loc};
use crate::lattice::{Elem, LatticeSpec};
use crate::monitor::{LabeledValue, Monitor, Store, Trace, TraceEvent};

use super::equiv::{project, value_equiv, Adversary, EquivDef};
use super::NiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lemma {
    /// Equivalent stores evaluate an expression to equivalent values.
    ExprEval,
    /// A starred variable under a pc above its bound stays starred, with a
    /// bound no higher.
    StarPreservation,
    /// A starred variable that ends pure had a pc below its old bound.
    StarToPureOld,
    /// A changed variable that ends pure had a pc below its new label.
    PcLemma,
    /// A starred variable that ends pure had a pc below its new label.
    StarToPureNew,
    /// Running under a hidden pc keeps the store equivalent.
    Confinement,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::ExprEval => "expression evaluation",
            Lemma::StarPreservation => "star preservation",
            Lemma::StarToPureOld => "star-to-pure (old bound)",
            Lemma::PcLemma => "pc lemma",
            Lemma::StarToPureNew => "star-to-pure (new label)",
            Lemma::Confinement => "confinement",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaViolation {
    pub lemma: Lemma,
    pub loc: Loc,
    pub var: String,
    pub detail: String,
}

impl fmt::Display for LemmaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} on {}: {}", self.lemma, self.loc, self.var, self.detail)
    }
}

fn two_point() -> &'static LatticeSpec {
    static TWO: OnceLock<LatticeSpec> = OnceLock::new();
    TWO.get_or_init(LatticeSpec::two_point)
}

/// The lemma conditions for one variable across one sub-derivation.
fn check_var(lat: &LatticeSpec, pc: Elem, entry: LabeledValue, exit: LabeledValue) -> Vec<(Lemma, String)> {
    let mut out = Vec::new();
    let show = |v: &LabeledValue| v.display(lat).to_string();
    let pcname = lat.name(pc);
    if let Label::Star(a) = entry.label {
        if !lat.leq(pc, a) {
            let ok = matches!(exit.label, Label::Star(b) if lat.leq(b, a));
            if !ok {
                out.push((
                    Lemma::StarPreservation,
                    format!("{} became {} under pc {pcname}", show(&entry), show(&exit)),
                ));
            }
        }
        if let Label::Pure(b) = exit.label {
            if !lat.leq(pc, a) {
                out.push((
                    Lemma::StarToPureOld,
                    format!("{} became {} under pc {pcname}", show(&entry), show(&exit)),
                ));
            }
            if !lat.leq(pc, b) {
                out.push((
                    Lemma::StarToPureNew,
                    format!("{} became {} under pc {pcname}", show(&entry), show(&exit)),
                ));
            }
        }
    }
    if let Label::Pure(b) = exit.label {
        if entry != exit && !lat.leq(pc, b) {
            out.push((
                Lemma::PcLemma,
                format!("{} became {} under pc {pcname}", show(&entry), show(&exit)),
            ));
        }
    }
    out
}

/// Checks the per-derivation lemmas on every completed command of `trace`.
///
/// Product labels are checked one principal at a time on the two-point
/// projection; `lat` must then be the product lattice the pc lives in.
pub fn check_trace_lemmas(lat: &LatticeSpec, trace: &Trace) -> Vec<LemmaViolation> {
    let mut out = Vec::new();
    for span in &trace.spans {
        let mut changed: Vec<(&str, LabeledValue, LabeledValue)> = Vec::new();
        for ev in &trace.events[span.start..span.end] {
            if let TraceEvent::Assign { var, old, new, .. } = ev {
                match changed.iter_mut().find(|(x, _, _)| x == var) {
                    Some(slot) => slot.2 = *new,
                    None => changed.push((var, *old, *new)),
                }
            }
        }
        for (var, entry, exit) in changed {
            let mut found = Vec::new();
            match (entry.label, exit.label) {
                (Label::Prod(p), Label::Prod(q)) => {
                    let mask = lat.product_shape().map_or(0, |s| s.mask(span.pc.elem()));
                    for i in 0..p.arity() {
                        let pc = Elem::from_index(((mask >> i) & 1) as usize);
                        let e = LabeledValue::new(entry.value, project(p.get(i)));
                        let x = LabeledValue::new(exit.value, project(q.get(i)));
                        for (lemma, detail) in check_var(two_point(), pc, e, x) {
                            found.push((lemma, format!("principal {i}: {detail}")));
                        }
                    }
                }
                _ => found = check_var(lat, span.pc.elem(), entry, exit),
            }
            out.extend(found.into_iter().map(|(lemma, detail)| LemmaViolation {
                lemma,
                loc: span.loc,
                var: var.to_string(),
                detail,
            }));
        }
    }
    out
}

/// Evaluates `e` in both stores and checks the results are equivalent.
pub fn check_expr_lemma(
    m: &Monitor,
    def: EquivDef,
    adv: Adversary,
    e: &Expr,
    s1: &Store,
    s2: &Store,
) -> Result<bool, NiError> {
    let v1 = m.eval(s1, e)?;
    let v2 = m.eval(s2, e)?;
    Ok(value_equiv(def, m.lattice(), adv, &v1, &v2)?)
}

/// Runs the trace lemmas on a run of `prog` from `store` under `pc`.
pub fn lemmas_for_run(
    m: &Monitor,
    prog: &crate::lang::Stmt,
    store: &Store,
    pc: Pc,
) -> Result<Vec<LemmaViolation>, NiError> {
    let out = m.with_tracing(true).exec(prog, store.clone(), pc)?;
    Ok(check_trace_lemmas(m.lattice(), &out.trace))
}
