//! Canonical source rendering of a [`TaskProgram`].

use std::fmt::Write;

use super::ast::*;

/// Renders a program as source text that parses back to the same tree.
pub fn pretty_print(program: &TaskProgram) -> String {
    let mut out = String::new();
    if let Some(comment) = &program.leading_comment {
        for line in comment.lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                let _ = writeln!(out, "# {line}");
            }
        }
    }
    out.push_str("def task_program():\n");
    block(&mut out, &program.body, 1);
    out
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for s in stmts {
        stmt(out, s, depth);
    }
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    let pad = "    ".repeat(depth);
    match &s.kind {
        StmtKind::Expr(e) => {
            let _ = writeln!(out, "{pad}{}", expr(e));
        }
        StmtKind::Assign { target: t, value } => {
            let _ = writeln!(out, "{pad}{} = {}", target(t), expr(value));
        }
        StmtKind::AugAssign { target: t, op, value } => {
            let _ = writeln!(out, "{pad}{} {} {}", target(t), op.symbol(), expr(value));
        }
        StmtKind::If { cond, then, elifs, orelse } => {
            let _ = writeln!(out, "{pad}if {}:", expr(cond));
            block(out, then, depth + 1);
            for (c, b) in elifs {
                let _ = writeln!(out, "{pad}elif {}:", expr(c));
                block(out, b, depth + 1);
            }
            if let Some(b) = orelse {
                let _ = writeln!(out, "{pad}else:");
                block(out, b, depth + 1);
            }
        }
        StmtKind::While { cond, body } => {
            let _ = writeln!(out, "{pad}while {}:", expr(cond));
            block(out, body, depth + 1);
        }
        StmtKind::For { target, iter, body } => {
            let _ = writeln!(out, "{pad}for {target} in {}:", expr(iter));
            block(out, body, depth + 1);
        }
        StmtKind::Break => {
            let _ = writeln!(out, "{pad}break");
        }
        StmtKind::Continue => {
            let _ = writeln!(out, "{pad}continue");
        }
        StmtKind::Return(None) => {
            let _ = writeln!(out, "{pad}return");
        }
        StmtKind::Return(Some(e)) => {
            let _ = writeln!(out, "{pad}return {}", expr(e));
        }
        StmtKind::Pass => {
            let _ = writeln!(out, "{pad}pass");
        }
    }
}

fn target(t: &Target) -> String {
    match t {
        Target::Name(n) => n.clone(),
        Target::Index { base, index } => format!("{}[{}]", sub(base, ATOM), expr(index)),
    }
}

const OR: u8 = 1;
const AND: u8 = 2;
const NOT: u8 = 3;
const CMP: u8 = 4;
const ARITH: u8 = 5;
const TERM: u8 = 6;
const NEG: u8 = 7;
const ATOM: u8 = 8;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::BoolOp { op: BoolOp::Or, .. } => OR,
        Expr::BoolOp { op: BoolOp::And, .. } => AND,
        Expr::Not(_) => NOT,
        Expr::Compare { .. } => CMP,
        Expr::BinOp { op: BinOp::Add | BinOp::Sub, .. } => ARITH,
        Expr::BinOp { .. } => TERM,
        Expr::Neg(_) => NEG,
        _ => ATOM,
    }
}

fn sub(e: &Expr, min: u8) -> String {
    let s = expr(e);
    if precedence(e) < min {
        format!("({s})")
    } else {
        s
    }
}

fn expr(e: &Expr) -> String {
    match e {
        Expr::Str(s) => quote(s),
        Expr::Int(i) => i.to_string(),
        Expr::Float(f) => format!("{f:?}"),
        Expr::Bool(true) => "True".into(),
        Expr::Bool(false) => "False".into(),
        Expr::None => "None".into(),
        Expr::Name(n) => n.clone(),
        Expr::MathPi => "math.pi".into(),
        Expr::List(items) => {
            let parts: Vec<String> = items.iter().map(expr).collect();
            format!("[{}]", parts.join(", "))
        }
        Expr::Neg(x) => format!("-{}", sub(x, NEG)),
        Expr::Not(x) => format!("not {}", sub(x, NOT)),
        Expr::BinOp { op, lhs, rhs } => {
            let p = precedence(e);
            format!("{} {} {}", sub(lhs, p), op.symbol(), sub(rhs, p + 1))
        }
        Expr::Compare { op, lhs, rhs } => {
            format!("{} {} {}", sub(lhs, ARITH), op.symbol(), sub(rhs, ARITH))
        }
        Expr::BoolOp { op, lhs, rhs } => {
            let p = precedence(e);
            let word = match op {
                BoolOp::And => "and",
                BoolOp::Or => "or",
            };
            format!("{} {word} {}", sub(lhs, p), sub(rhs, p + 1))
        }
        Expr::Call { callee, args, .. } => {
            let parts: Vec<String> = args.iter().map(expr).collect();
            format!("{callee}({})", parts.join(", "))
        }
        Expr::Index { base, index } => format!("{}[{}]", sub(base, ATOM), expr(index)),
        Expr::Append { receiver, arg } => format!("{}.append({})", sub(receiver, ATOM), expr(arg)),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
