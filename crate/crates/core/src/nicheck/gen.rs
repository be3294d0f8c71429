use rand::seq::SliceRandom;
use rand::Rng;

use crate::lang::{parse_program, print_program, BinOp, Expr, Stmt};

const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "k"];

/// Shape limits for generated programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub vars: usize,
    pub depth: usize,
    /// Statements per block, at most.
    pub width: usize,
    pub loops: bool,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            vars: 4,
            depth: 4,
            width: 3,
            loops: true,
        }
    }
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    vars: Vec<&'static str>,
    cfg: GenConfig,
}

impl<R: Rng> Gen<'_, R> {
    fn var(&mut self) -> &'static str {
        self.vars.choose(self.rng).copied().expect("at least one variable")
    }

    fn atom(&mut self) -> Expr {
        if self.rng.gen_bool(0.7) {
            Expr::var(self.var())
        } else {
            Expr::Const(self.rng.gen_range(0..=2))
        }
    }

    fn expr(&mut self) -> Expr {
        const OPS: [BinOp; 7] = [
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Eq,
            BinOp::Lt,
            BinOp::And,
            BinOp::Or,
        ];
        match self.rng.gen_range(0..10) {
            0..=3 => self.atom(),
            4 => Expr::not(self.atom()),
            _ => {
                let op = *OPS.choose(self.rng).unwrap();
                Expr::bin(op, self.atom(), self.atom())
            }
        }
    }

    fn guard(&mut self) -> Expr {
        if self.rng.gen_bool(0.8) {
            Expr::var(self.var())
        } else {
            Expr::not(Expr::var(self.var()))
        }
    }

    fn block(&mut self, depth: usize) -> Stmt {
        let n = self.rng.gen_range(1..=self.cfg.width);
        Stmt::block((0..n).map(|_| self.stmt(depth)).collect())
    }

    fn stmt(&mut self, depth: usize) -> Stmt {
        let roll = if depth <= 1 { 0 } else { self.rng.gen_range(0..10) };
        if roll <= 5 {
            Stmt::assign(self.var(), self.expr())
        } else if roll <= 8 || !self.cfg.loops {
            let g = self.guard();
            let t = self.block(depth - 1);
            let f = if self.rng.gen_bool(0.5) {
                self.block(depth - 1)
            } else {
                Stmt::skip()
            };
            Stmt::if_(g, t, f)
        } else {
            let g = self.guard();
            let body = self.block(depth - 1);
            Stmt::while_(g, body)
        }
    }
}

/// A random program over at most `cfg.vars` variables and nesting at most
/// `cfg.depth`, with source locations from its canonical printed form.
pub fn random_program(rng: &mut impl Rng, cfg: GenConfig) -> Stmt {
    let vars = NAMES[..cfg.vars.clamp(1, NAMES.len())].to_vec();
    let mut g = Gen { rng, vars, cfg };
    let prog = g.block(cfg.depth.max(1));
    parse_program(&print_program(&prog)).expect("printed programs reparse")
}
