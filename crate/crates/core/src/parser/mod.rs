//! Parser for the restricted task-program language.
//!
//! The accepted language is a small, closed subset of Python 3: a single
//! zero-parameter `def task_program():` whose body uses assignments, `if`,
//! `while`, `for ... in`, list displays, arithmetic, comparisons and calls to
//! a whitelist of callees (the active domain's APIs plus `len`, `str`, `int`,
//! `range`, `time.sleep` and `list.append`). Anything else that is
//! syntactically plausible is reported as [`ParseErrorKind::UnsupportedFeature`]
//! rather than a syntax error, so callers can tell "bad text" from "valid
//! Python we do not model".

pub mod ast;
mod extract;
mod lexer;
mod printer;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use ast::*;
pub use extract::{extract_program_block, ExtractError, ExtractedProgram};
pub use printer::pretty_print;

use lexer::{Tok, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    Syntax,
    UnsupportedFeature,
    BadShape,
}

impl ParseErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "SyntaxError",
            ParseErrorKind::UnsupportedFeature => "UnsupportedFeature",
            ParseErrorKind::BadShape => "BadShape",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{}: {message} (line {}, column {})", kind.as_str(), span.line, span.col)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, span: Span, message: impl Into<String>) -> Self {
        ParseError {
            kind,
            span,
            message: message.into(),
        }
    }
}

const GENERAL_BUILTINS: &[&str] = &["len", "str", "int", "range"];

const UNSUPPORTED_KEYWORDS: &[(&str, &str)] = &[
    ("class", "class definition"),
    ("try", "try/except"),
    ("except", "try/except"),
    ("finally", "try/except"),
    ("with", "with statement"),
    ("lambda", "lambda"),
    ("global", "global declaration"),
    ("nonlocal", "nonlocal declaration"),
    ("del", "del statement"),
    ("assert", "assert statement"),
    ("raise", "raise statement"),
    ("yield", "generator"),
    ("async", "async"),
    ("await", "async"),
    ("from", "import"),
    ("import", "import"),
    ("is", "identity comparison"),
];

/// Parses `source` against a callee whitelist made of `domain_apis` plus the builtins.
pub fn parse_program(source: &str, domain_apis: &[&str]) -> Result<TaskProgram, ParseError> {
    let tokens = lexer::tokenize(source)?;
    let callees: BTreeSet<String> = domain_apis
        .iter()
        .chain(GENERAL_BUILTINS)
        .map(|s| s.to_string())
        .collect();
    let mut parser = Parser {
        tokens,
        pos: 0,
        callees,
        loop_depth: 0,
    };
    let (def_line, body) = parser.module()?;
    Ok(TaskProgram {
        leading_comment: leading_comment(source, def_line),
        body,
    })
}

fn leading_comment(source: &str, def_line: u32) -> Option<String> {
    let lines: Vec<&str> = source.lines().take(def_line.saturating_sub(1) as usize).collect();
    let mut block = Vec::new();
    for line in lines.iter().rev() {
        let t = line.trim();
        match t.strip_prefix('#') {
            Some(rest) => block.push(rest.strip_prefix(' ').unwrap_or(rest).trim_end()),
            None => break,
        }
    }
    if block.is_empty() {
        return None;
    }
    block.reverse();
    Some(block.join("\n"))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    callees: BTreeSet<String>,
    loop_depth: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let i = (self.pos + off).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Name(n) if n == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(ParseErrorKind::Syntax, self.span(), msg))
    }

    fn unsupported<T>(&self, what: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(
            ParseErrorKind::UnsupportedFeature,
            self.span(),
            what,
        ))
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            self.syntax(format!("expected `{op}`, found {}", describe(self.peek())))
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Newline => {
                self.advance();
                Ok(())
            }
            Tok::Eof | Tok::Dedent => Ok(()),
            Tok::Op(";") => self.unsupported("multiple statements on one line"),
            Tok::Op(",") => self.unsupported("tuple"),
            Tok::Name(n) if n == "if" => self.unsupported("conditional expression"),
            Tok::Name(n) if n == "for" => self.unsupported("comprehension"),
            other => self.syntax(format!("expected end of line, found {}", describe(other))),
        }
    }

    fn check_reserved(&self) -> PResult<()> {
        if let Tok::Name(n) = self.peek() {
            if let Some((_, what)) = UNSUPPORTED_KEYWORDS.iter().find(|(k, _)| k == n) {
                return self.unsupported(*what);
            }
        }
        Ok(())
    }

    /// Returns the line of the `def` and the function body.
    fn module(&mut self) -> PResult<(u32, Vec<Stmt>)> {
        let mut found: Option<(u32, Vec<Stmt>)> = None;
        loop {
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Newline => {
                    self.advance();
                }
                Tok::Indent => return self.syntax("unexpected indent"),
                Tok::Name(n) if n == "import" => {
                    self.advance();
                    let module = match self.advance().tok {
                        Tok::Name(m) => m,
                        other => return self.syntax(format!("expected module name, found {}", describe(&other))),
                    };
                    if module != "time" && module != "math" {
                        return Err(ParseError::new(
                            ParseErrorKind::UnsupportedFeature,
                            self.tokens[self.pos - 1].span,
                            format!("import of `{module}`"),
                        ));
                    }
                    if self.is_op(".") || self.is_op(",") || self.is_kw("as") {
                        return self.unsupported("import form");
                    }
                    self.expect_newline()?;
                }
                Tok::Name(n) if n == "from" => return self.unsupported("import"),
                Tok::Op("@") => return self.unsupported("decorator"),
                Tok::Name(n) if n == "def" => {
                    let span = self.span();
                    self.advance();
                    let name = match self.advance().tok {
                        Tok::Name(n) => n,
                        other => return self.syntax(format!("expected function name, found {}", describe(&other))),
                    };
                    if name != "task_program" {
                        return Err(ParseError::new(
                            ParseErrorKind::BadShape,
                            span,
                            format!("unexpected function `{name}`; only `task_program` may be defined"),
                        ));
                    }
                    if found.is_some() {
                        return Err(ParseError::new(
                            ParseErrorKind::BadShape,
                            span,
                            "`task_program` is defined more than once",
                        ));
                    }
                    self.expect_op("(")?;
                    if !self.is_op(")") {
                        return Err(ParseError::new(
                            ParseErrorKind::BadShape,
                            self.span(),
                            "`task_program` must take no parameters",
                        ));
                    }
                    self.expect_op(")")?;
                    if self.is_op("->") {
                        return self.unsupported("return annotation");
                    }
                    self.expect_op(":")?;
                    let body = self.suite()?;
                    found = Some((span.line, body));
                }
                Tok::Name(n) if n == "class" => return self.unsupported("class definition"),
                _ => {
                    return Err(ParseError::new(
                        ParseErrorKind::BadShape,
                        self.span(),
                        "statement outside `task_program`",
                    ))
                }
            }
        }
        found.ok_or_else(|| {
            ParseError::new(
                ParseErrorKind::BadShape,
                self.span(),
                "no `def task_program():` found",
            )
        })
    }

    fn suite(&mut self) -> PResult<Vec<Stmt>> {
        if !matches!(self.peek(), Tok::Newline) {
            // single-line suite: `if x: pass`
            let stmt = self.simple_stmt()?;
            return Ok(vec![stmt]);
        }
        self.advance();
        if !matches!(self.peek(), Tok::Indent) {
            return self.syntax("expected an indented block");
        }
        self.advance();
        let mut body = Vec::new();
        while !matches!(self.peek(), Tok::Dedent | Tok::Eof) {
            body.push(self.stmt()?);
        }
        if matches!(self.peek(), Tok::Dedent) {
            self.advance();
        }
        Ok(body)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        if let Tok::Indent = self.peek() {
            return self.syntax("unexpected indent");
        }
        if self.eat_kw("if") {
            let cond = self.expr()?;
            self.expect_op(":")?;
            let then = self.suite()?;
            let mut elifs = Vec::new();
            let mut orelse = None;
            loop {
                if self.eat_kw("elif") {
                    let c = self.expr()?;
                    self.expect_op(":")?;
                    elifs.push((c, self.suite()?));
                } else if self.eat_kw("else") {
                    self.expect_op(":")?;
                    orelse = Some(self.suite()?);
                    break;
                } else {
                    break;
                }
            }
            return Ok(Stmt {
                kind: StmtKind::If { cond, then, elifs, orelse },
                span,
            });
        }
        if self.eat_kw("while") {
            let cond = self.expr()?;
            self.expect_op(":")?;
            let body = self.loop_body()?;
            if self.is_kw("else") {
                return self.unsupported("loop else clause");
            }
            return Ok(Stmt {
                kind: StmtKind::While { cond, body },
                span,
            });
        }
        if self.eat_kw("for") {
            let target = match self.advance().tok {
                Tok::Name(n) if !is_keyword(&n) => n,
                Tok::Op("(") | Tok::Op("[") => return self.unsupported("tuple unpacking"),
                other => return self.syntax(format!("expected loop variable, found {}", describe(&other))),
            };
            if self.is_op(",") {
                return self.unsupported("tuple unpacking");
            }
            if !self.eat_kw("in") {
                return self.syntax("expected `in`");
            }
            let iter = self.expr()?;
            self.expect_op(":")?;
            let body = self.loop_body()?;
            if self.is_kw("else") {
                return self.unsupported("loop else clause");
            }
            return Ok(Stmt {
                kind: StmtKind::For { target, iter, body },
                span,
            });
        }
        if self.is_kw("def") {
            return self.unsupported("nested function definition");
        }
        if self.is_kw("elif") || self.is_kw("else") {
            return self.syntax(format!("unexpected {}", describe(self.peek())));
        }
        self.simple_stmt()
    }

    fn loop_body(&mut self) -> PResult<Vec<Stmt>> {
        self.loop_depth += 1;
        let body = self.suite();
        self.loop_depth -= 1;
        body
    }

    fn simple_stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        self.check_reserved()?;
        let kind = if self.eat_kw("pass") {
            StmtKind::Pass
        } else if self.is_kw("break") || self.is_kw("continue") {
            let is_break = self.is_kw("break");
            if self.loop_depth == 0 {
                return self.syntax(format!(
                    "`{}` outside loop",
                    if is_break { "break" } else { "continue" }
                ));
            }
            self.advance();
            if is_break {
                StmtKind::Break
            } else {
                StmtKind::Continue
            }
        } else if self.eat_kw("return") {
            if matches!(self.peek(), Tok::Newline | Tok::Eof | Tok::Dedent) {
                StmtKind::Return(None)
            } else {
                StmtKind::Return(Some(self.expr()?))
            }
        } else {
            let lhs = self.expr()?;
            if self.is_op("=") {
                self.advance();
                let target = self.target(lhs)?;
                let value = self.expr()?;
                if self.is_op("=") {
                    return self.unsupported("chained assignment");
                }
                StmtKind::Assign { target, value }
            } else if let Tok::Op(op) = self.peek().clone() {
                let aug = match op {
                    "+=" => Some(AugOp::Add),
                    "-=" => Some(AugOp::Sub),
                    "*=" => Some(AugOp::Mul),
                    "/=" | "//=" | "%=" | "**=" | "&=" | "|=" | "^=" | ">>=" | "<<=" => {
                        return self.unsupported(format!("augmented assignment `{op}`"))
                    }
                    ":=" => return self.unsupported("assignment expression"),
                    ":" => return self.unsupported("annotated assignment"),
                    _ => None,
                };
                match aug {
                    Some(op) => {
                        self.advance();
                        let target = self.target(lhs)?;
                        let value = self.expr()?;
                        StmtKind::AugAssign { target, op, value }
                    }
                    None => StmtKind::Expr(lhs),
                }
            } else {
                StmtKind::Expr(lhs)
            }
        };
        self.expect_newline()?;
        Ok(Stmt { kind, span })
    }

    fn target(&self, lhs: Expr) -> PResult<Target> {
        match lhs {
            Expr::Name(n) => Ok(Target::Name(n)),
            Expr::Index { base, index } => Ok(Target::Index {
                base: *base,
                index: *index,
            }),
            _ => Err(ParseError::new(
                ParseErrorKind::Syntax,
                self.tokens[self.pos.saturating_sub(1)].span,
                "cannot assign to expression",
            )),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.check_reserved()?;
        let e = self.or_expr()?;
        if self.is_kw("if") {
            return self.unsupported("conditional expression");
        }
        Ok(e)
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat_kw("or") {
            let rhs = self.and_expr()?;
            lhs = Expr::BoolOp {
                op: BoolOp::Or,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.not_expr()?;
        while self.eat_kw("and") {
            let rhs = self.not_expr()?;
            lhs = Expr::BoolOp {
                op: BoolOp::And,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            return Ok(Expr::Not(Box::new(self.not_expr()?)));
        }
        self.comparison()
    }

    fn cmp_op(&mut self) -> PResult<Option<CmpOp>> {
        let op = match self.peek() {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::Ne,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::Ge,
            Tok::Name(n) if n == "in" => CmpOp::In,
            Tok::Name(n) if n == "not" && matches!(self.peek_at(1), Tok::Name(m) if m == "in") => {
                self.advance();
                CmpOp::NotIn
            }
            Tok::Name(n) if n == "is" => return self.unsupported("identity comparison"),
            _ => return Ok(None),
        };
        self.advance();
        Ok(Some(op))
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.arith()?;
        match self.cmp_op()? {
            None => Ok(lhs),
            Some(op) => {
                let rhs = self.arith()?;
                if self.cmp_op()?.is_some() {
                    return self.unsupported("chained comparison");
                }
                Ok(Expr::Compare {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                })
            }
        }
    }

    fn arith(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op("+") => BinOp::Add,
                Tok::Op("-") => BinOp::Sub,
                Tok::Op("<<") | Tok::Op(">>") | Tok::Op("&") | Tok::Op("|") | Tok::Op("^") => {
                    return self.unsupported("bitwise operator")
                }
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::BinOp {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                Tok::Op("//") => BinOp::FloorDiv,
                Tok::Op("%") => BinOp::Mod,
                Tok::Op("@") => return self.unsupported("matrix multiplication"),
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::BinOp {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
    }

    fn factor(&mut self) -> PResult<Expr> {
        if self.eat_op("-") {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        if self.is_op("+") {
            return self.unsupported("unary plus");
        }
        if self.is_op("~") {
            return self.unsupported("bitwise operator");
        }
        let base = self.postfix()?;
        if self.is_op("**") {
            return self.unsupported("exponentiation");
        }
        Ok(base)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let start = self.span();
        let mut e = self.atom()?;
        loop {
            if self.is_op("(") {
                let span = self.span();
                let callee = match &e {
                    Expr::Name(n) => n.clone(),
                    _ => return self.unsupported("call of a computed value"),
                };
                if !self.callees.contains(&callee) {
                    return Err(ParseError::new(
                        ParseErrorKind::UnsupportedFeature,
                        start,
                        format!("call to unknown function `{callee}`"),
                    ));
                }
                let args = self.call_args()?;
                e = Expr::Call {
                    callee,
                    args,
                    span: Span::new(start.line, start.col.min(span.col)),
                };
            } else if self.is_op("[") {
                self.advance();
                if self.is_op(":") {
                    return self.unsupported("slicing");
                }
                let index = self.expr()?;
                if self.is_op(":") {
                    return self.unsupported("slicing");
                }
                if self.is_op(",") {
                    return self.unsupported("tuple index");
                }
                self.expect_op("]")?;
                e = Expr::Index {
                    base: Box::new(e),
                    index: Box::new(index),
                };
            } else if self.is_op(".") {
                self.advance();
                let attr = match self.advance().tok {
                    Tok::Name(a) => a,
                    other => return self.syntax(format!("expected attribute name, found {}", describe(&other))),
                };
                match (&e, attr.as_str()) {
                    (Expr::Name(m), "sleep") if m == "time" => {
                        if !self.is_op("(") {
                            return self.unsupported("attribute access");
                        }
                        let args = self.call_args()?;
                        e = Expr::Call {
                            callee: "time.sleep".into(),
                            args,
                            span: start,
                        };
                    }
                    (Expr::Name(m), "pi") if m == "math" => e = Expr::MathPi,
                    (_, "append") => {
                        if !self.is_op("(") {
                            return self.unsupported("attribute access");
                        }
                        let mut args = self.call_args()?;
                        if args.len() != 1 {
                            return self.syntax("append takes exactly one argument");
                        }
                        e = Expr::Append {
                            receiver: Box::new(e),
                            arg: Box::new(args.remove(0)),
                        };
                    }
                    (Expr::Name(m), a) if m == "math" || m == "time" => {
                        return self.unsupported(format!("`{m}.{a}`"))
                    }
                    (_, a) if self.is_op("(") => {
                        return self.unsupported(format!("method call `.{a}()`"))
                    }
                    (_, a) => return self.unsupported(format!("attribute access `.{a}`")),
                }
            } else {
                return Ok(e);
            }
        }
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_op("(")?;
        let mut args = Vec::new();
        while !self.is_op(")") {
            if self.is_op("*") || self.is_op("**") {
                return self.unsupported("star arguments");
            }
            if matches!(self.peek(), Tok::Name(_)) && matches!(self.peek_at(1), Tok::Op("=")) {
                return self.unsupported("keyword argument");
            }
            args.push(self.expr()?);
            if self.is_kw("for") {
                return self.unsupported("generator expression");
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok(args)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let tok = self.peek().clone();
        match tok {
            Tok::Int(i) => {
                self.advance();
                Ok(Expr::Int(i))
            }
            Tok::Float(f) => {
                self.advance();
                Ok(Expr::Float(f))
            }
            Tok::Str(s) => {
                self.advance();
                let mut s = s;
                // implicit concatenation of adjacent literals
                while let Tok::Str(more) = self.peek().clone() {
                    self.advance();
                    s.push_str(&more);
                }
                Ok(Expr::Str(s))
            }
            Tok::Name(n) => {
                match n.as_str() {
                    "True" => {
                        self.advance();
                        return Ok(Expr::Bool(true));
                    }
                    "False" => {
                        self.advance();
                        return Ok(Expr::Bool(false));
                    }
                    "None" => {
                        self.advance();
                        return Ok(Expr::None);
                    }
                    _ => {}
                }
                self.check_reserved()?;
                if is_keyword(&n) {
                    return self.syntax(format!("unexpected keyword `{n}`"));
                }
                self.advance();
                Ok(Expr::Name(n))
            }
            Tok::Op("(") => {
                self.advance();
                if self.is_op(")") {
                    return self.unsupported("tuple");
                }
                let e = self.expr()?;
                if self.is_op(",") {
                    return self.unsupported("tuple");
                }
                if self.is_kw("for") {
                    return self.unsupported("generator expression");
                }
                self.expect_op(")")?;
                Ok(e)
            }
            Tok::Op("[") => {
                self.advance();
                let mut items = Vec::new();
                while !self.is_op("]") {
                    items.push(self.expr()?);
                    if self.is_kw("for") {
                        return self.unsupported("list comprehension");
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("]")?;
                Ok(Expr::List(items))
            }
            Tok::Op("{") => {
                // `{}` and `{k: v}` are dicts, anything else is a set
                let mut depth = 0usize;
                let mut is_dict = matches!(self.peek_at(1), Tok::Op("}"));
                for t in &self.tokens[self.pos + 1..] {
                    match &t.tok {
                        Tok::Op("(") | Tok::Op("[") | Tok::Op("{") => depth += 1,
                        Tok::Op(")") | Tok::Op("]") => depth = depth.saturating_sub(1),
                        Tok::Op("}") if depth == 0 => break,
                        Tok::Op("}") => depth -= 1,
                        Tok::Op(":") if depth == 0 => {
                            is_dict = true;
                            break;
                        }
                        Tok::Eof => break,
                        _ => {}
                    }
                }
                self.unsupported(if is_dict { "dict literal" } else { "set literal" })
            }
            Tok::Op(op) => self.syntax(format!("unexpected `{op}`")),
            Tok::Newline => self.syntax("unexpected end of line"),
            Tok::Indent => self.syntax("unexpected indent"),
            Tok::Dedent | Tok::Eof => self.syntax("unexpected end of input"),
        }
    }
}

fn is_keyword(n: &str) -> bool {
    matches!(
        n,
        "def" | "if" | "elif" | "else" | "while" | "for" | "in" | "not" | "and" | "or" | "break"
            | "continue" | "return" | "pass" | "True" | "False" | "None" | "import" | "from"
            | "class" | "lambda" | "try" | "except" | "finally" | "with" | "as" | "global"
            | "nonlocal" | "del" | "assert" | "raise" | "yield" | "is" | "async" | "await"
    )
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) => format!("`{n}`"),
        Tok::Int(i) => format!("`{i}`"),
        Tok::Float(f) => format!("`{f}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::Op(o) => format!("`{o}`"),
        Tok::Newline => "end of line".into(),
        Tok::Indent => "indent".into(),
        Tok::Dedent => "dedent".into(),
        Tok::Eof => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROBOT: &[&str] = &[
        "get_current_location",
        "get_all_rooms",
        "is_in_room",
        "go_to",
        "ask",
        "say",
        "pick",
        "place",
    ];

    fn parse(src: &str) -> Result<TaskProgram, ParseError> {
        parse_program(src, ROBOT)
    }

    fn kind_of(src: &str) -> (ParseErrorKind, String) {
        let e = parse(src).unwrap_err();
        (e.kind, e.message)
    }

    #[test]
    fn minimal_program() {
        let p = parse("def task_program():\n    pass").unwrap();
        assert_eq!(p.body.len(), 1);
        assert_eq!(p.body[0].kind, StmtKind::Pass);
        assert_eq!(p.leading_comment, None);
    }

    #[test]
    fn seed_task_one_has_five_statements() {
        let src = include_str!("../../fixtures/seeds/task1.txt");
        let p = parse(src).unwrap();
        assert_eq!(p.body.len(), 5);
        assert!(p
            .instruction()
            .unwrap()
            .starts_with("Go to Arjun's office, ask him if he is ready to head out,"));
    }

    #[test]
    fn dict_literal_is_unsupported() {
        assert_eq!(
            kind_of("def task_program():\n    x = {1:2}"),
            (ParseErrorKind::UnsupportedFeature, "dict literal".into())
        );
        assert_eq!(
            kind_of("def task_program():\n    x = {1, 2}").1,
            "set literal"
        );
    }

    #[test]
    fn unsupported_constructs_are_named() {
        let cases = [
            ("x = [a for a in b]", "list comprehension"),
            ("x = lambda: 1", "lambda"),
            ("x = y[1:2]", "slicing"),
            ("x = \"a\".upper()", "method call `.upper()`"),
            ("try:\n        pass", "try/except"),
            ("with x:\n        pass", "with statement"),
            ("for a, b in c:\n        pass", "tuple unpacking"),
            ("def inner():\n        pass", "nested function definition"),
            ("x = 1 if y else 2", "conditional expression"),
            ("x = 2 ** 3", "exponentiation"),
            ("x = 1 < 2 < 3", "chained comparison"),
            ("print(\"hi\")", "call to unknown function `print`"),
            ("say(message=\"hi\")", "keyword argument"),
            ("x = f\"{y}\"", "f-string"),
            ("import os", "import"),
        ];
        for (body, want) in cases {
            let src = format!("def task_program():\n    {body}\n");
            let (kind, msg) = kind_of(&src);
            assert_eq!(kind, ParseErrorKind::UnsupportedFeature, "{body}");
            assert_eq!(msg, want, "{body}");
        }
    }

    #[test]
    fn bad_shapes() {
        assert_eq!(kind_of("x = 1\n").0, ParseErrorKind::BadShape);
        assert_eq!(kind_of("def task_program(x):\n    pass\n").0, ParseErrorKind::BadShape);
        assert_eq!(kind_of("def helper():\n    pass\n").0, ParseErrorKind::BadShape);
        assert_eq!(
            kind_of("def task_program():\n    pass\ndef task_program():\n    pass\n").0,
            ParseErrorKind::BadShape
        );
        assert_eq!(
            kind_of("def task_program():\n    pass\ntask_program()\n").0,
            ParseErrorKind::BadShape
        );
        assert_eq!(kind_of("").0, ParseErrorKind::BadShape);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse("def task_program():\n    x = (1 +\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = parse("def task_program():\n    go_to(\"a\"\n    say(\"b\")\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = parse("def task_program():\n    break\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.span.line, 2);
    }

    #[test]
    fn import_time_is_accepted() {
        let p = parse("import time\n\ndef task_program():\n    time.sleep(1)\n").unwrap();
        assert!(matches!(&p.body[0].kind, StmtKind::Expr(Expr::Call { callee, .. }) if callee == "time.sleep"));
    }

    #[test]
    fn math_pi_and_negation() {
        let p = parse_program("def task_program():\n    rotate(\"g\", -math.pi/6)\n", &["rotate"]).unwrap();
        let StmtKind::Expr(Expr::Call { args, .. }) = &p.body[0].kind else {
            panic!()
        };
        assert_eq!(
            args[1],
            Expr::BinOp {
                op: BinOp::Div,
                lhs: Box::new(Expr::Neg(Box::new(Expr::MathPi))),
                rhs: Box::new(Expr::Int(6)),
            }
        );
    }

    #[test]
    fn elif_chain_and_single_line_suites() {
        let p = parse(
            "def task_program():\n    x = 1\n    if x == 1: say(\"a\")\n    elif x == 2:\n        say(\"b\")\n    else:\n        pass\n",
        )
        .unwrap();
        let StmtKind::If { elifs, orelse, .. } = &p.body[1].kind else {
            panic!()
        };
        assert_eq!(elifs.len(), 1);
        assert!(orelse.is_some());
    }

    #[test]
    fn spans_point_at_statements() {
        let p = parse("def task_program():\n    x = 1\n\n    say(\"hi\")\n").unwrap();
        assert_eq!(p.body[1].span, Span::new(4, 5));
    }
}
