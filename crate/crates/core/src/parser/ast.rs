//! Syntax tree for the restricted task-program language.

use serde::Serialize;

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A parsed `def task_program():` with its optional leading instruction comment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskProgram {
    /// Comment block preceding the definition, `#` markers stripped, one entry per line.
    pub leading_comment: Option<String>,
    pub body: Vec<Stmt>,
}

impl TaskProgram {
    /// The leading comment as a single-line instruction, without the `Instruction:` tag.
    pub fn instruction(&self) -> Option<String> {
        self.leading_comment.as_deref().map(super::extract::join_instruction_lines)
    }

    /// Copy of the program with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> TaskProgram {
        let mut out = self.clone();
        zero_block(&mut out.body);
        out
    }

    /// Number of statements, nested ones included.
    pub fn statement_count(&self) -> usize {
        fn count(stmts: &[Stmt]) -> usize {
            stmts
                .iter()
                .map(|s| {
                    1 + match &s.kind {
                        StmtKind::If { then, elifs, orelse, .. } => {
                            count(then)
                                + elifs.iter().map(|(_, b)| count(b)).sum::<usize>()
                                + orelse.as_deref().map_or(0, count)
                        }
                        StmtKind::While { body, .. } | StmtKind::For { body, .. } => count(body),
                        _ => 0,
                    }
                })
                .sum()
        }
        count(&self.body)
    }
}

fn zero_block(stmts: &mut [Stmt]) {
    for s in stmts {
        s.span = Span::default();
        match &mut s.kind {
            StmtKind::Expr(e) | StmtKind::Return(Some(e)) => zero_expr(e),
            StmtKind::Assign { target, value } | StmtKind::AugAssign { target, value, .. } => {
                if let Target::Index { base, index } = target {
                    zero_expr(base);
                    zero_expr(index);
                }
                zero_expr(value);
            }
            StmtKind::If { cond, then, elifs, orelse } => {
                zero_expr(cond);
                zero_block(then);
                for (c, b) in elifs {
                    zero_expr(c);
                    zero_block(b);
                }
                if let Some(b) = orelse {
                    zero_block(b);
                }
            }
            StmtKind::While { cond, body } => {
                zero_expr(cond);
                zero_block(body);
            }
            StmtKind::For { iter, body, .. } => {
                zero_expr(iter);
                zero_block(body);
            }
            StmtKind::Return(None)
            | StmtKind::Break
            | StmtKind::Continue
            | StmtKind::Pass => {}
        }
    }
}

fn zero_expr(e: &mut Expr) {
    match e {
        Expr::Call { args, span, .. } => {
            *span = Span::default();
            args.iter_mut().for_each(zero_expr);
        }
        Expr::List(items) => items.iter_mut().for_each(zero_expr),
        Expr::Neg(x) | Expr::Not(x) => zero_expr(x),
        Expr::BinOp { lhs, rhs, .. }
        | Expr::Compare { lhs, rhs, .. }
        | Expr::BoolOp { lhs, rhs, .. } => {
            zero_expr(lhs);
            zero_expr(rhs);
        }
        Expr::Index { base, index } => {
            zero_expr(base);
            zero_expr(index);
        }
        Expr::Append { receiver, arg } => {
            zero_expr(receiver);
            zero_expr(arg);
        }
        Expr::Str(_)
        | Expr::Int(_)
        | Expr::Float(_)
        | Expr::Bool(_)
        | Expr::None
        | Expr::Name(_)
        | Expr::MathPi => {}
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum StmtKind {
    Expr(Expr),
    Assign {
        target: Target,
        value: Expr,
    },
    AugAssign {
        target: Target,
        op: AugOp,
        value: Expr,
    },
    If {
        cond: Expr,
        then: Vec<Stmt>,
        elifs: Vec<(Expr, Vec<Stmt>)>,
        orelse: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    For {
        target: String,
        iter: Expr,
        body: Vec<Stmt>,
    },
    Break,
    Continue,
    Return(Option<Expr>),
    Pass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Target {
    Name(String),
    Index { base: Expr, index: Expr },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AugOp {
    Add,
    Sub,
    Mul,
}

impl AugOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AugOp::Add => "+=",
            AugOp::Sub => "-=",
            AugOp::Mul => "*=",
        }
    }

    pub fn binop(self) -> BinOp {
        match self {
            AugOp::Add => BinOp::Add,
            AugOp::Sub => BinOp::Sub,
            AugOp::Mul => BinOp::Mul,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    FloorDiv,
    Mod,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::FloorDiv => "//",
            BinOp::Mod => "%",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    NotIn,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::In => "in",
            CmpOp::NotIn => "not in",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoolOp {
    And,
    Or,
}

/// Builtins callable from task programs in every domain.
pub const BUILTINS: &[&str] = &["len", "str", "int", "range", "time.sleep"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Expr {
    Str(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    None,
    Name(String),
    /// `math.pi`, the only attribute constant the language knows.
    MathPi,
    List(Vec<Expr>),
    Neg(Box<Expr>),
    BinOp {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Compare {
        op: CmpOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    BoolOp {
        op: BoolOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Not(Box<Expr>),
    /// Call of a domain API or builtin; `callee` is `time.sleep` for the dotted builtin.
    Call {
        callee: String,
        args: Vec<Expr>,
        span: Span,
    },
    Index {
        base: Box<Expr>,
        index: Box<Expr>,
    },
    /// `receiver.append(arg)`
    Append {
        receiver: Box<Expr>,
        arg: Box<Expr>,
    },
}
