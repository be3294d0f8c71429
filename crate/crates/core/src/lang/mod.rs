//! The While language: integer expressions, assignment, sequencing,
//! conditionals and loops.

mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::{parse_expr, parse_program, SyntaxError};
pub use print::{print_expr, print_program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Lt,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::And => "and",
            BinOp::Or => "or",
        }
    }

    /// Binding strength; larger binds tighter.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Lt => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul => 5,
        }
    }

    /// Wrapping 64-bit arithmetic; comparisons and connectives yield 0/1
    /// with nonzero meaning true.
    pub fn apply(self, a: i64, b: i64) -> i64 {
        match self {
            BinOp::Add => a.wrapping_add(b),
            BinOp::Sub => a.wrapping_sub(b),
            BinOp::Mul => a.wrapping_mul(b),
            BinOp::Eq => (a == b) as i64,
            BinOp::Lt => (a < b) as i64,
            BinOp::And => (a != 0 && b != 0) as i64,
            BinOp::Or => (a != 0 || b != 0) as i64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(String),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::BinOp(op, Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::BinOp(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Not(e) => e.collect_vars(out),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

/// 1-based source position of the first token of a statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A statement with its source location. Equality ignores locations.
#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Skip,
    Assign(String, Expr),
    Seq(Box<Stmt>, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    While(Expr, Box<Stmt>),
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Stmt) -> bool {
        self.kind == other.kind
    }
}

impl Stmt {
    pub fn new(kind: StmtKind, loc: Loc) -> Stmt {
        Stmt { kind, loc }
    }

    /// Builds a statement with a default location (for generated programs).
    pub fn of(kind: StmtKind) -> Stmt {
        Stmt::new(kind, Loc::default())
    }

    pub fn skip() -> Stmt {
        Stmt::of(StmtKind::Skip)
    }

    pub fn assign(var: &str, e: Expr) -> Stmt {
        Stmt::of(StmtKind::Assign(var.to_string(), e))
    }

    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::of(StmtKind::Seq(Box::new(a), Box::new(b)))
    }

    pub fn if_(guard: Expr, then: Stmt, otherwise: Stmt) -> Stmt {
        Stmt::of(StmtKind::If(guard, Box::new(then), Box::new(otherwise)))
    }

    pub fn while_(guard: Expr, body: Stmt) -> Stmt {
        Stmt::of(StmtKind::While(guard, Box::new(body)))
    }

    /// Right-nested sequence of `stmts`; `skip` when empty.
    pub fn block(stmts: Vec<Stmt>) -> Stmt {
        let mut iter = stmts.into_iter().rev();
        let Some(mut acc) = iter.next() else {
            return Stmt::skip();
        };
        for s in iter {
            let loc = s.loc;
            acc = Stmt::new(StmtKind::Seq(Box::new(s), Box::new(acc)), loc);
        }
        acc
    }

    /// Every variable read or written by the program.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            StmtKind::Skip => {}
            StmtKind::Assign(x, e) => {
                out.insert(x.clone());
                e.collect_vars(out);
            }
            StmtKind::Seq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            StmtKind::If(e, a, b) => {
                e.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
            StmtKind::While(e, body) => {
                e.collect_vars(out);
                body.collect_vars(out);
            }
        }
    }

    /// Visits every expression (assignment right-hand sides and guards).
    pub fn for_each_expr<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        match &self.kind {
            StmtKind::Skip => {}
            StmtKind::Assign(_, e) => f(e),
            StmtKind::Seq(a, b) => {
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
            StmtKind::If(e, a, b) => {
                f(e);
                a.for_each_expr(f);
                b.for_each_expr(f);
            }
            StmtKind::While(e, body) => {
                f(e);
                body.for_each_expr(f);
            }
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}
