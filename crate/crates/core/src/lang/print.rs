use super::{Expr, Stmt, StmtKind};

const UNARY: u8 = 6;
const ATOM: u8 = 7;

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Const(_) | Expr::Var(_) => ATOM,
        Expr::Not(_) => UNARY,
        Expr::BinOp(op, _, _) => op.precedence(),
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e {
        Expr::Const(n) => out.push_str(&n.to_string()),
        Expr::Var(x) => out.push_str(x),
        Expr::Not(inner) => {
            out.push_str("not ");
            write_operand(inner, expr_prec(inner) < UNARY, out);
        }
        Expr::BinOp(op, a, b) => {
            let p = op.precedence();
            write_operand(a, expr_prec(a) < p, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            // Binary operators are left-associative.
            write_operand(b, expr_prec(b) <= p, out);
        }
    }
}

fn write_operand(e: &Expr, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
    }
    write_expr(e, out);
    if parens {
        out.push(')');
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn indent(depth: usize, out: &mut String) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// Writes the statements of a block, one per line. A left-nested sequence
/// gets its own braces so the tree shape survives a reparse.
fn write_block(s: &Stmt, depth: usize, out: &mut String) {
    let mut cur = s;
    loop {
        match &cur.kind {
            StmtKind::Seq(a, b) => {
                write_line(a, depth, out);
                cur = b;
            }
            _ => {
                write_line(cur, depth, out);
                return;
            }
        }
    }
}

fn write_line(s: &Stmt, depth: usize, out: &mut String) {
    indent(depth, out);
    if let StmtKind::Seq(..) = s.kind {
        out.push_str("{\n");
        write_block(s, depth + 1, out);
        indent(depth, out);
        out.push_str("}\n");
    } else {
        write_stmt(s, depth, out);
        out.push('\n');
    }
}

fn write_braced(s: &Stmt, depth: usize, out: &mut String) {
    out.push_str("{\n");
    write_block(s, depth + 1, out);
    indent(depth, out);
    out.push('}');
}

fn write_stmt(s: &Stmt, depth: usize, out: &mut String) {
    match &s.kind {
        StmtKind::Skip => out.push_str("skip"),
        StmtKind::Assign(x, e) => {
            out.push_str(x);
            out.push_str(" := ");
            write_expr(e, out);
        }
        StmtKind::Seq(..) => write_braced(s, depth, out),
        StmtKind::If(e, t, f) => {
            out.push_str("if ");
            write_expr(e, out);
            out.push_str(" then ");
            write_braced(t, depth, out);
            if f.kind != StmtKind::Skip {
                out.push_str(" else ");
                write_braced(f, depth, out);
            }
        }
        StmtKind::While(e, body) => {
            out.push_str("while ");
            write_expr(e, out);
            out.push_str(" do ");
            write_braced(body, depth, out);
        }
    }
}

/// Canonical concrete syntax; `parse_program(&print_program(s)) == s`.
pub fn print_program(s: &Stmt) -> String {
    let mut out = String::new();
    write_block(s, 0, &mut out);
    out
}
