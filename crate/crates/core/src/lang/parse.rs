use thiserror::Error;

use super::{BinOp, Expr, Loc, Stmt, StmtKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("{line}:{col}: unknown operator `{op}`")]
    UnknownOperator { line: u32, col: u32, op: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Skip,
    If,
    Then,
    Else,
    While,
    Do,
    Not,
    And,
    Or,
    True,
    False,
    Assign,
    Eq,
    Lt,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Newline,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Newline => "newline".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", tok_text(other)),
        }
    }
}

fn tok_text(t: &Tok) -> &'static str {
    match t {
        Tok::Skip => "skip",
        Tok::If => "if",
        Tok::Then => "then",
        Tok::Else => "else",
        Tok::While => "while",
        Tok::Do => "do",
        Tok::Not => "not",
        Tok::And => "and",
        Tok::Or => "or",
        Tok::True => "true",
        Tok::False => "false",
        Tok::Assign => ":=",
        Tok::Eq => "=",
        Tok::Lt => "<",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Semi => ";",
        _ => "?",
    }
}

struct Token {
    tok: Tok,
    loc: Loc,
}

fn lex(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let loc = Loc { line, col };
        let start = i;
        let tok = match c {
            '\n' => {
                i += 1;
                out.push(Token { tok: Tok::Newline, loc });
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "skip" => Tok::Skip,
                    "if" => Tok::If,
                    "then" => Tok::Then,
                    "else" => Tok::Else,
                    "while" => Tok::While,
                    "do" => Tok::Do,
                    "not" => Tok::Not,
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                }
            }
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let n = digits.parse::<u64>().map_err(|_| SyntaxError::Syntax {
                    line,
                    col,
                    message: format!("integer literal `{digits}` out of range"),
                })?;
                Tok::Int(n)
            }
            _ => {
                let next = chars.get(i + 1).copied();
                let (tok, len) = match (c, next) {
                    (':', Some('=')) => (Tok::Assign, 2),
                    ('=', Some('=')) => (Tok::Eq, 2),
                    ('=', _) => (Tok::Eq, 1),
                    ('<', Some('=')) | ('>', _) | ('!', _) | ('&', _) | ('|', _) => {
                        let op: String = match next {
                            Some(n) if "=&|".contains(n) => [c, n].iter().collect(),
                            _ => c.to_string(),
                        };
                        return Err(SyntaxError::UnknownOperator { line, col, op });
                    }
                    ('<', _) => (Tok::Lt, 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    ('*', _) => (Tok::Star, 1),
                    ('(', _) => (Tok::LParen, 1),
                    (')', _) => (Tok::RParen, 1),
                    ('{', _) => (Tok::LBrace, 1),
                    ('}', _) => (Tok::RBrace, 1),
                    (';', _) => (Tok::Semi, 1),
                    ('/' | '%' | '^' | '~', _) => {
                        return Err(SyntaxError::UnknownOperator {
                            line,
                            col,
                            op: c.to_string(),
                        })
                    }
                    _ => {
                        return Err(SyntaxError::Syntax {
                            line,
                            col,
                            message: format!("unexpected character `{c}`"),
                        })
                    }
                };
                i += len;
                tok
            }
        };
        col += (i - start) as u32;
        out.push(Token { tok, loc });
    }
    out.push(Token {
        tok: Tok::Eof,
        loc: Loc { line, col },
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn loc(&self) -> Loc {
        self.toks[self.pos].loc
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        let loc = self.loc();
        Err(SyntaxError::Syntax {
            line: loc.line,
            col: loc.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            ))
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Semi) {
            self.bump();
        }
    }

    /// Statements up to (not including) `end`.
    fn stmts(&mut self, end: &Tok) -> Result<Stmt, SyntaxError> {
        let mut list = Vec::new();
        self.skip_separators();
        while self.peek() != end {
            list.push(self.stmt()?);
            match self.peek() {
                Tok::Newline | Tok::Semi => self.skip_separators(),
                t if t == end => {}
                other => {
                    return self.error(format!(
                        "expected `;` or newline after statement, found {}",
                        other.describe()
                    ))
                }
            }
        }
        Ok(Stmt::block(list))
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let loc = self.loc();
        let save = self.pos;
        let kind = match self.bump() {
            Tok::Skip => StmtKind::Skip,
            Tok::Ident(name) => {
                match self.peek() {
                    Tok::Assign | Tok::Eq => {
                        self.bump();
                    }
                    other => return self.error(format!("expected `:=` after `{name}`, found {}", other.describe())),
                }
                StmtKind::Assign(name, self.expr()?)
            }
            Tok::If => {
                let guard = self.expr()?;
                if *self.peek() == Tok::Then {
                    self.bump();
                }
                let then = self.body()?;
                let otherwise = if self.next_significant() == &Tok::Else {
                    self.skip_newlines();
                    self.bump();
                    self.body()?
                } else {
                    Stmt::new(StmtKind::Skip, loc)
                };
                StmtKind::If(guard, Box::new(then), Box::new(otherwise))
            }
            Tok::While => {
                let guard = self.expr()?;
                if *self.peek() == Tok::Do {
                    self.bump();
                }
                StmtKind::While(guard, Box::new(self.body()?))
            }
            Tok::LBrace => {
                let inner = self.stmts(&Tok::RBrace)?;
                self.expect(Tok::RBrace)?;
                return Ok(Stmt::new(inner.kind, loc));
            }
            other => {
                self.pos = save;
                return self.error(format!("expected a statement, found {}", other.describe()));
            }
        };
        Ok(Stmt::new(kind, loc))
    }

    /// A branch or loop body: one statement, optionally on the next line.
    fn body(&mut self) -> Result<Stmt, SyntaxError> {
        self.skip_newlines();
        self.stmt()
    }

    fn next_significant(&self) -> &Tok {
        let mut p = self.pos;
        while self.toks[p].tok == Tok::Newline {
            p += 1;
        }
        &self.toks[p].tok
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Or => BinOp::Or,
                Tok::And => BinOp::And,
                Tok::Eq => BinOp::Eq,
                Tok::Lt => BinOp::Lt,
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                Tok::Star => BinOp::Mul,
                _ => return Ok(lhs),
            };
            let prec = op.precedence();
            if prec < min_prec {
                return Ok(lhs);
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Expr::not(self.unary()?))
            }
            Tok::Minus => {
                self.bump();
                let save = self.pos;
                match self.bump() {
                    Tok::Int(n) if n <= i64::MAX as u64 + 1 => Ok(Expr::Const((n as i64).wrapping_neg())),
                    Tok::Int(_) => {
                        self.pos = save;
                        self.error("integer literal out of range")
                    }
                    _ => {
                        self.pos = save;
                        self.error("unary `-` applies only to integer literals")
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let save = self.pos;
        match self.bump() {
            Tok::Int(n) => match i64::try_from(n) {
                Ok(v) => Ok(Expr::Const(v)),
                Err(_) => {
                    self.pos = save;
                    self.error("integer literal out of range")
                }
            },
            Tok::True => Ok(Expr::Const(1)),
            Tok::False => Ok(Expr::Const(0)),
            Tok::Ident(x) => Ok(Expr::Var(x)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => {
                self.pos = save;
                self.error(format!("expected an expression, found {}", other.describe()))
            }
        }
    }
}

/// Parses a whole program. Statements are separated by `;` or newlines,
/// `else` is optional, and `=` is accepted in place of `:=`.
pub fn parse_program(text: &str) -> Result<Stmt, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let prog = p.stmts(&Tok::Eof)?;
    p.expect(Tok::Eof)?;
    Ok(prog)
}

pub fn parse_expr(text: &str) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_separators();
    p.expect(Tok::Eof)?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assign(x: &str, e: Expr) -> Stmt {
        Stmt::assign(x, e)
    }

    #[test]
    fn listing_one() {
        let src = "x := false; y := false\nif (not(z))\n  x := true\nif (not(x))\n  y := true\n";
        let got = parse_program(src).unwrap();
        let want = Stmt::block(vec![
            assign("x", Expr::Const(0)),
            assign("y", Expr::Const(0)),
            Stmt::if_(Expr::not(Expr::var("z")), assign("x", Expr::Const(1)), Stmt::skip()),
            Stmt::if_(Expr::not(Expr::var("x")), assign("y", Expr::Const(1)), Stmt::skip()),
        ]);
        assert_eq!(got, want);
        // Locations point at the first token of each statement.
        let StmtKind::Seq(_, rest) = &got.kind else { panic!() };
        let StmtKind::Seq(_, rest) = &rest.kind else { panic!() };
        let StmtKind::Seq(if1, _) = &rest.kind else { panic!() };
        assert_eq!(if1.loc, Loc { line: 2, col: 1 });
        let StmtKind::If(_, body, _) = &if1.kind else { panic!() };
        assert_eq!(body.loc, Loc { line: 3, col: 3 });
    }

    #[test]
    fn skip_only() {
        assert_eq!(parse_program("skip").unwrap(), Stmt::skip());
        assert_eq!(parse_program("").unwrap(), Stmt::skip());
        assert_eq!(parse_program("# nothing\n").unwrap(), Stmt::skip());
    }

    #[test]
    fn else_on_following_line() {
        let src = "if (x')\n  z = y1\nelse\n  z = y2\nif x1 then z = x1";
        let p = parse_program(src).unwrap();
        let want = Stmt::seq(
            Stmt::if_(
                Expr::var("x'"),
                assign("z", Expr::var("y1")),
                assign("z", Expr::var("y2")),
            ),
            Stmt::if_(Expr::var("x1"), assign("z", Expr::var("x1")), Stmt::skip()),
        );
        assert_eq!(p, want);
    }

    #[test]
    fn precedence() {
        let e = parse_expr("a + b * c = d or not e and f < 2").unwrap();
        let want = Expr::bin(
            BinOp::Or,
            Expr::bin(
                BinOp::Eq,
                Expr::bin(
                    BinOp::Add,
                    Expr::var("a"),
                    Expr::bin(BinOp::Mul, Expr::var("b"), Expr::var("c")),
                ),
                Expr::var("d"),
            ),
            Expr::bin(
                BinOp::And,
                Expr::not(Expr::var("e")),
                Expr::bin(BinOp::Lt, Expr::var("f"), Expr::Const(2)),
            ),
        );
        assert_eq!(e, want);
        assert_eq!(
            parse_expr("a - b - c").unwrap(),
            Expr::bin(
                BinOp::Sub,
                Expr::bin(BinOp::Sub, Expr::var("a"), Expr::var("b")),
                Expr::var("c")
            )
        );
        assert_eq!(parse_expr("-9223372036854775808").unwrap(), Expr::Const(i64::MIN));
        assert_eq!(
            parse_expr("x - -1").unwrap(),
            Expr::bin(BinOp::Sub, Expr::var("x"), Expr::Const(-1))
        );
    }

    #[test]
    fn blocks_and_loops() {
        let p = parse_program("while n < 3 do { n := n + 1; s := s + n }\n{ }").unwrap();
        let body = Stmt::seq(
            assign("n", Expr::bin(BinOp::Add, Expr::var("n"), Expr::Const(1))),
            assign("s", Expr::bin(BinOp::Add, Expr::var("s"), Expr::var("n"))),
        );
        let want = Stmt::seq(
            Stmt::while_(Expr::bin(BinOp::Lt, Expr::var("n"), Expr::Const(3)), body),
            Stmt::skip(),
        );
        assert_eq!(p, want);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_program("x := a / b"),
            Err(SyntaxError::UnknownOperator { line: 1, col: 8, .. })
        ));
        assert!(matches!(
            parse_program("x := a >= b"),
            Err(SyntaxError::UnknownOperator { .. })
        ));
        assert!(matches!(
            parse_program("x := "),
            Err(SyntaxError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_program("x := 1 y := 2"),
            Err(SyntaxError::Syntax { .. })
        ));
        assert!(matches!(parse_program("if x then"), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse_program("{ x := 1"), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(parse_program("x := -y"), Err(SyntaxError::Syntax { .. })));
        assert!(matches!(
            parse_program("x := 9223372036854775808"),
            Err(SyntaxError::Syntax { .. })
        ));
        assert!(matches!(
            parse_program("skip\n  x := @"),
            Err(SyntaxError::Syntax { line: 2, col: 8, .. })
        ));
    }
}
