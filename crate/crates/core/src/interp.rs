//! Tree-walking evaluator that routes every API call through the growing world.

use std::collections::HashMap;

use serde::Serialize;

use crate::choice::ChoiceRecord;
use crate::domain::DomainSpec;
use crate::error::{DomainError, ErrorClass};
use crate::parser::{AugOp, BinOp, BoolOp, CmpOp, Expr, Span, Stmt, StmtKind, Target, TaskProgram};
use crate::trace::TraceEvent;
use crate::value::Value;
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_steps: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetKind {
    Steps,
    ApiCalls,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed {
        error_class: ErrorClass,
        message: String,
        span: Span,
    },
    BudgetExceeded {
        kind: BudgetKind,
        span: Span,
    },
}

/// One API call as the program saw it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiRecord {
    pub api: String,
    pub args: Vec<serde_json::Value>,
    /// Absent when the call raised.
    pub ret: Option<serde_json::Value>,
    pub choices_consumed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub transcript: Vec<String>,
    pub api_trace: Vec<ApiRecord>,
    pub steps: u64,
    /// Every draw made, in order; replaying these reproduces the run.
    pub choices: Vec<ChoiceRecord>,
    pub events: Vec<TraceEvent>,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        matches!(self.status, RunStatus::Completed)
    }

    /// Error class and message for anything that did not complete.
    pub fn failure(&self) -> Option<(ErrorClass, String, Span)> {
        match &self.status {
            RunStatus::Completed => None,
            RunStatus::Failed {
                error_class,
                message,
                span,
            } => Some((*error_class, message.clone(), *span)),
            RunStatus::BudgetExceeded { kind, span } => {
                let what = match kind {
                    BudgetKind::Steps => "step budget exceeded",
                    BudgetKind::ApiCalls => "API call budget exceeded",
                };
                Some((ErrorClass::BudgetExceeded, what.to_string(), *span))
            }
        }
    }
}

enum Halt {
    Error(ErrorClass, String),
    Budget(BudgetKind),
}

impl From<DomainError> for Halt {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::BudgetExceeded(_) => Halt::Budget(BudgetKind::ApiCalls),
            other => Halt::Error(other.class(), other.to_string()),
        }
    }
}

fn rt(msg: impl Into<String>) -> Halt {
    Halt::Error(ErrorClass::RuntimeError, msg.into())
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return,
}

type Eval<T> = Result<T, Halt>;

struct Interp<'a> {
    domain: &'a DomainSpec,
    world: &'a mut World,
    limits: Limits,
    env: HashMap<String, Value>,
    span: Span,
    api_trace: Vec<ApiRecord>,
}

/// Runs `task_program` to completion or first failure in `world`.
pub fn run_program(program: &TaskProgram, domain: &DomainSpec, world: &mut World, limits: &Limits) -> RunOutcome {
    let mut it = Interp {
        domain,
        world,
        limits: *limits,
        env: HashMap::new(),
        span: Span::default(),
        api_trace: Vec::new(),
    };
    let status = match it.block(&program.body) {
        Ok(_) => RunStatus::Completed,
        Err(Halt::Error(error_class, message)) => {
            it.world.log(TraceEvent::Failed {
                error_class: error_class.as_str().to_string(),
                message: message.clone(),
            });
            RunStatus::Failed {
                error_class,
                message,
                span: it.span,
            }
        }
        Err(Halt::Budget(kind)) => {
            it.world.log(TraceEvent::Failed {
                error_class: ErrorClass::BudgetExceeded.as_str().to_string(),
                message: format!("{kind:?} budget exceeded"),
            });
            RunStatus::BudgetExceeded { kind, span: it.span }
        }
    };
    let api_trace = std::mem::take(&mut it.api_trace);
    RunOutcome {
        status,
        transcript: world.transcript().to_vec(),
        api_trace,
        steps: world.step_count(),
        choices: world.choice_log().to_vec(),
        events: world.take_events(),
    }
}

impl Interp<'_> {
    fn step(&mut self) -> Eval<()> {
        if self.world.step_count >= self.limits.max_steps {
            return Err(Halt::Budget(BudgetKind::Steps));
        }
        self.world.step_count += 1;
        Ok(())
    }

    fn block(&mut self, stmts: &[Stmt]) -> Eval<Flow> {
        for s in stmts {
            match self.stmt(s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &Stmt) -> Eval<Flow> {
        self.step()?;
        self.span = s.span;
        match &s.kind {
            StmtKind::Expr(e) => {
                self.expr(e)?;
            }
            StmtKind::Assign { target, value } => {
                let v = self.expr(value)?;
                self.assign(target, v)?;
            }
            StmtKind::AugAssign { target, op, value } => self.aug_assign(target, *op, value)?,
            StmtKind::If {
                cond,
                then,
                elifs,
                orelse,
            } => {
                if self.expr(cond)?.truthy() {
                    return self.block(then);
                }
                for (c, body) in elifs {
                    if self.expr(c)?.truthy() {
                        return self.block(body);
                    }
                }
                if let Some(body) = orelse {
                    return self.block(body);
                }
            }
            StmtKind::While { cond, body } => loop {
                self.span = s.span;
                if !self.expr(cond)?.truthy() {
                    break;
                }
                match self.block(body)? {
                    Flow::Break => break,
                    Flow::Return => return Ok(Flow::Return),
                    Flow::Normal | Flow::Continue => {}
                }
            },
            StmtKind::For { target, iter, body } => {
                let seq = self.expr(iter)?;
                let mut i = 0;
                loop {
                    let item = match &seq {
                        Value::List(l) => l.borrow().get(i).cloned(),
                        Value::Str(s) => s.chars().nth(i).map(|c| Value::Str(c.to_string())),
                        other => return Err(rt(format!("'{}' object is not iterable", other.type_name()))),
                    };
                    let Some(item) = item else { break };
                    i += 1;
                    self.step()?;
                    self.env.insert(target.clone(), item);
                    match self.block(body)? {
                        Flow::Break => break,
                        Flow::Return => return Ok(Flow::Return),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
            }
            StmtKind::Break => return Ok(Flow::Break),
            StmtKind::Continue => return Ok(Flow::Continue),
            StmtKind::Return(value) => {
                if let Some(v) = value {
                    self.expr(v)?;
                }
                return Ok(Flow::Return);
            }
            StmtKind::Pass => {}
        }
        Ok(Flow::Normal)
    }

    fn assign(&mut self, target: &Target, v: Value) -> Eval<()> {
        match target {
            Target::Name(n) => {
                self.env.insert(n.clone(), v);
            }
            Target::Index { base, index } => {
                let base = self.expr(base)?;
                let idx = self.expr(index)?;
                let Value::List(l) = &base else {
                    return Err(rt(format!(
                        "'{}' object does not support item assignment",
                        base.type_name()
                    )));
                };
                let len = l.borrow().len();
                let i = resolve_index(&idx, len)?;
                l.borrow_mut()[i] = v;
            }
        }
        Ok(())
    }

    fn aug_assign(&mut self, target: &Target, op: AugOp, value: &Expr) -> Eval<()> {
        let current = match target {
            Target::Name(n) => self.lookup(n)?,
            Target::Index { base, index } => {
                let b = self.expr(base)?;
                let i = self.expr(index)?;
                index_value(&b, &i)?
            }
        };
        let rhs = self.expr(value)?;
        // `+=` on a list extends it in place, so aliases see the change
        if let (AugOp::Add, Value::List(l), Value::List(r)) = (op, &current, &rhs) {
            let extra = r.borrow().clone();
            l.borrow_mut().extend(extra);
            return Ok(());
        }
        let updated = binop(op.binop(), &current, &rhs)?;
        self.assign(target, updated)
    }

    fn lookup(&self, name: &str) -> Eval<Value> {
        self.env
            .get(name)
            .cloned()
            .ok_or_else(|| rt(format!("name '{name}' is not defined")))
    }

    fn expr(&mut self, e: &Expr) -> Eval<Value> {
        self.step()?;
        Ok(match e {
            Expr::Str(s) => Value::Str(s.clone()),
            Expr::Int(i) => Value::Int(*i),
            Expr::Float(f) => Value::Float(*f),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::None => Value::None,
            Expr::MathPi => Value::Float(std::f64::consts::PI),
            Expr::Name(n) => self.lookup(n)?,
            Expr::List(items) => {
                let mut vs = Vec::with_capacity(items.len());
                for i in items {
                    vs.push(self.expr(i)?);
                }
                Value::list(vs)
            }
            Expr::Neg(inner) => match self.expr(inner)? {
                Value::Int(i) => Value::Int(i.checked_neg().ok_or_else(|| rt("integer overflow"))?),
                Value::Bool(b) => Value::Int(-i64::from(b)),
                Value::Float(f) => Value::Float(-f),
                other => return Err(rt(format!("bad operand type for unary -: '{}'", other.type_name()))),
            },
            Expr::Not(inner) => Value::Bool(!self.expr(inner)?.truthy()),
            Expr::BinOp { op, lhs, rhs } => {
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                binop(*op, &l, &r)?
            }
            Expr::Compare { op, lhs, rhs } => {
                let l = self.expr(lhs)?;
                let r = self.expr(rhs)?;
                Value::Bool(compare(*op, &l, &r)?)
            }
            Expr::BoolOp { op, lhs, rhs } => {
                let l = self.expr(lhs)?;
                match (op, l.truthy()) {
                    (BoolOp::And, false) | (BoolOp::Or, true) => l,
                    _ => self.expr(rhs)?,
                }
            }
            Expr::Index { base, index } => {
                let b = self.expr(base)?;
                let i = self.expr(index)?;
                index_value(&b, &i)?
            }
            Expr::Append { receiver, arg } => {
                let r = self.expr(receiver)?;
                let a = self.expr(arg)?;
                match r {
                    Value::List(l) => l.borrow_mut().push(a),
                    other => {
                        return Err(rt(format!("'{}' object has no attribute 'append'", other.type_name())));
                    }
                }
                Value::None
            }
            Expr::Call { callee, args, span } => {
                let mut vs = Vec::with_capacity(args.len());
                for a in args {
                    vs.push(self.expr(a)?);
                }
                let outer = self.span;
                self.span = *span;
                let v = self.call(callee, vs)?;
                self.span = outer;
                v
            }
        })
    }

    fn call(&mut self, callee: &str, args: Vec<Value>) -> Eval<Value> {
        match callee {
            "len" => {
                let [v] = one_arg(callee, args)?;
                match &v {
                    Value::Str(s) => Ok(Value::Int(s.chars().count() as i64)),
                    Value::List(l) => Ok(Value::Int(l.borrow().len() as i64)),
                    other => Err(rt(format!("object of type '{}' has no len()", other.type_name()))),
                }
            }
            "str" => {
                let [v] = one_arg(callee, args)?;
                Ok(Value::Str(v.to_display_string()))
            }
            "int" => {
                let [v] = one_arg(callee, args)?;
                to_int(&v).map(Value::Int)
            }
            "range" => self.range(args),
            "time.sleep" => {
                let [v] = one_arg(callee, args)?;
                if v.as_number().is_none() {
                    return Err(rt(format!("time.sleep() expects a number, got '{}'", v.type_name())));
                }
                self.world.invalidate_sampled();
                Ok(Value::None)
            }
            api => {
                let before = self.world.choice_log().len();
                let json_args: Vec<_> = args.iter().map(Value::to_json).collect();
                let result = self.domain.apply_api(self.world, api, &args);
                self.api_trace.push(ApiRecord {
                    api: api.to_string(),
                    args: json_args,
                    ret: result.as_ref().ok().map(Value::to_json),
                    choices_consumed: self.world.choice_log().len() - before,
                });
                Ok(result?)
            }
        }
    }

    fn range(&mut self, args: Vec<Value>) -> Eval<Value> {
        let ints = args
            .iter()
            .map(|a| match a {
                Value::Int(i) => Ok(*i),
                Value::Bool(b) => Ok(i64::from(*b)),
                other => Err(rt(format!(
                    "'{}' object cannot be interpreted as an integer",
                    other.type_name()
                ))),
            })
            .collect::<Eval<Vec<i64>>>()?;
        let (start, stop, step) = match ints[..] {
            [stop] => (0, stop, 1),
            [start, stop] => (start, stop, 1),
            [start, stop, step] => (start, stop, step),
            _ => return Err(rt(format!("range expected 1 to 3 arguments, got {}", ints.len()))),
        };
        if step == 0 {
            return Err(rt("range() arg 3 must not be zero"));
        }
        let span = i128::from(stop) - i128::from(start);
        let len = if (span > 0) == (step > 0) && span != 0 {
            let s = i128::from(step);
            ((span.abs() + s.abs() - 1) / s.abs()) as u128
        } else {
            0
        };
        // each element costs at least one step, so a longer range can never finish
        if len > u128::from(self.limits.max_steps) {
            return Err(Halt::Budget(BudgetKind::Steps));
        }
        let items = (0..len as i64).map(|k| Value::Int(start + k * step)).collect();
        Ok(Value::list(items))
    }
}

fn one_arg(callee: &str, args: Vec<Value>) -> Eval<[Value; 1]> {
    let n = args.len();
    <[Value; 1]>::try_from(args).map_err(|_| rt(format!("{callee}() takes exactly one argument ({n} given)")))
}

fn to_int(v: &Value) -> Eval<i64> {
    match v {
        Value::Int(i) => Ok(*i),
        Value::Bool(b) => Ok(i64::from(*b)),
        Value::Float(f) if f.is_finite() && f.abs() < 9.2e18 => Ok(f.trunc() as i64),
        Value::Float(f) => Err(rt(format!("cannot convert float {f} to integer"))),
        Value::Str(s) => {
            let t = s.trim().replace('_', "");
            t.parse::<i64>()
                .map_err(|_| rt(format!("invalid literal for int() with base 10: {}", v.repr())))
        }
        other => Err(rt(format!(
            "int() argument must be a string or a number, not '{}'",
            other.type_name()
        ))),
    }
}

fn resolve_index(idx: &Value, len: usize) -> Eval<usize> {
    let i = match idx {
        Value::Int(i) => *i,
        Value::Bool(b) => i64::from(*b),
        other => return Err(rt(format!("indices must be integers, not {}", other.type_name()))),
    };
    let len_i = len as i64;
    let j = if i < 0 { i + len_i } else { i };
    if j < 0 || j >= len_i {
        return Err(rt("index out of range"));
    }
    Ok(j as usize)
}

fn index_value(base: &Value, idx: &Value) -> Eval<Value> {
    match base {
        Value::List(l) => {
            let l = l.borrow();
            Ok(l[resolve_index(idx, l.len())?].clone())
        }
        Value::Str(s) => {
            let chars: Vec<char> = s.chars().collect();
            Ok(Value::Str(chars[resolve_index(idx, chars.len())?].to_string()))
        }
        other => Err(rt(format!("'{}' object is not subscriptable", other.type_name()))),
    }
}

enum Num {
    I(i64),
    F(f64),
}

fn num(v: &Value) -> Option<Num> {
    match v {
        Value::Int(i) => Some(Num::I(*i)),
        Value::Bool(b) => Some(Num::I(i64::from(*b))),
        Value::Float(f) => Some(Num::F(*f)),
        _ => None,
    }
}

fn overflow() -> Halt {
    rt("integer overflow")
}

fn repeat(items: &Value, n: i64) -> Value {
    let n = n.max(0) as usize;
    match items {
        Value::Str(s) => Value::Str(s.repeat(n)),
        Value::List(l) => {
            let l = l.borrow();
            Value::list(l.iter().cloned().cycle().take(l.len() * n).collect())
        }
        _ => unreachable!(),
    }
}

fn binop(op: BinOp, l: &Value, r: &Value) -> Eval<Value> {
    let mismatch = || {
        rt(format!(
            "unsupported operand type(s) for {}: '{}' and '{}'",
            op.symbol(),
            l.type_name(),
            r.type_name()
        ))
    };
    match (op, l, r) {
        (BinOp::Add, Value::Str(a), Value::Str(b)) => return Ok(Value::Str(format!("{a}{b}"))),
        (BinOp::Add, Value::List(a), Value::List(b)) => {
            let mut v = a.borrow().clone();
            v.extend(b.borrow().iter().cloned());
            return Ok(Value::list(v));
        }
        (BinOp::Mul, seq @ (Value::Str(_) | Value::List(_)), Value::Int(n))
        | (BinOp::Mul, Value::Int(n), seq @ (Value::Str(_) | Value::List(_))) => {
            // guard against absurd allocations
            if *n > 1_000_000 {
                return Err(rt("sequence repetition too large"));
            }
            return Ok(repeat(seq, *n));
        }
        _ => {}
    }
    let (a, b) = match (num(l), num(r)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(mismatch()),
    };
    Ok(match (a, b) {
        (Num::I(a), Num::I(b)) => match op {
            BinOp::Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
            BinOp::Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
            BinOp::Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
            BinOp::Div => {
                if b == 0 {
                    return Err(rt("division by zero"));
                }
                Value::Float(a as f64 / b as f64)
            }
            BinOp::FloorDiv | BinOp::Mod => {
                if b == 0 {
                    return Err(rt("integer division or modulo by zero"));
                }
                let q = a.checked_div(b).ok_or_else(overflow)?;
                let m = a.wrapping_rem(b);
                // floor toward negative infinity
                let (q, m) = if m != 0 && ((m < 0) != (b < 0)) { (q - 1, m + b) } else { (q, m) };
                Value::Int(if op == BinOp::FloorDiv { q } else { m })
            }
        },
        (a, b) => {
            let a = match a {
                Num::I(i) => i as f64,
                Num::F(f) => f,
            };
            let b = match b {
                Num::I(i) => i as f64,
                Num::F(f) => f,
            };
            match op {
                BinOp::Add => Value::Float(a + b),
                BinOp::Sub => Value::Float(a - b),
                BinOp::Mul => Value::Float(a * b),
                BinOp::Div | BinOp::FloorDiv | BinOp::Mod if b == 0.0 => {
                    return Err(rt("float division by zero"));
                }
                BinOp::Div => Value::Float(a / b),
                BinOp::FloorDiv => Value::Float((a / b).floor()),
                BinOp::Mod => {
                    let m = a - b * (a / b).floor();
                    Value::Float(m)
                }
            }
        }
    })
}

fn compare(op: CmpOp, l: &Value, r: &Value) -> Eval<bool> {
    match op {
        CmpOp::Eq => Ok(l.loose_eq(r)),
        CmpOp::Ne => Ok(!l.loose_eq(r)),
        CmpOp::In | CmpOp::NotIn => {
            let found = match r {
                Value::List(items) => items.borrow().iter().any(|x| x.loose_eq(l)),
                Value::Str(hay) => match l {
                    Value::Str(needle) => hay.contains(needle.as_str()),
                    other => {
                        return Err(rt(format!(
                            "'in <string>' requires string as left operand, not {}",
                            other.type_name()
                        )))
                    }
                },
                other => return Err(rt(format!("argument of type '{}' is not iterable", other.type_name()))),
            };
            Ok(found == (op == CmpOp::In))
        }
        CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge => {
            let ord = match (l, r) {
                (Value::Str(a), Value::Str(b)) => a.cmp(b),
                _ => match (l.as_number(), r.as_number()) {
                    (Some(a), Some(b)) => match a.partial_cmp(&b) {
                        Some(o) => o,
                        None => return Ok(false),
                    },
                    _ => {
                        return Err(rt(format!(
                            "'{}' not supported between instances of '{}' and '{}'",
                            op.symbol(),
                            l.type_name(),
                            r.type_name()
                        )))
                    }
                },
            };
            use std::cmp::Ordering::*;
            Ok(match op {
                CmpOp::Lt => ord == Less,
                CmpOp::Le => ord != Greater,
                CmpOp::Gt => ord == Greater,
                _ => ord != Less,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::ScriptedChoices;
    use crate::parser::parse_program;

    fn run_src(src: &str, script: Vec<usize>) -> RunOutcome {
        run_with(src, script, Limits::default())
    }

    fn run_with(src: &str, script: Vec<usize>, limits: Limits) -> RunOutcome {
        let d = DomainSpec::robot();
        let p = parse_program(src, &d.api_names()).unwrap();
        let mut w = World::new(Box::new(ScriptedChoices::new(script)), d.config.clone());
        run_program(&p, &d, &mut w, &limits)
    }

    fn body(lines: &str) -> String {
        let mut s = String::from("def task_program():\n");
        for l in lines.lines() {
            s.push_str("    ");
            s.push_str(l);
            s.push('\n');
        }
        s
    }

    fn said(lines: &str) -> Vec<String> {
        let out = run_src(&body(lines), vec![]);
        assert!(out.completed(), "{:?}", out.status);
        out.transcript
    }

    fn fails_with(lines: &str) -> ErrorClass {
        run_src(&body(lines), vec![]).failure().expect("expected failure").0
    }

    #[test]
    fn seed_task_one() {
        let src = include_str!("../fixtures/seeds/task1.txt");
        for (i, answer) in ["Yes", "No"].iter().enumerate() {
            let out = run_src(src, vec![i]);
            assert!(out.completed());
            let apis: Vec<_> = out.api_trace.iter().map(|r| r.api.as_str()).collect();
            assert_eq!(apis, ["get_current_location", "go_to", "ask", "go_to", "say"]);
            assert_eq!(out.transcript.last().unwrap(), &format!("Arjun said: {answer}"));
            assert_eq!(out.api_trace[2].choices_consumed, 1);
        }
    }

    #[test]
    fn substring_membership() {
        assert_eq!(said("say(str(\"classroom\" not in \"room_2\"))"), ["True"]);
        assert_eq!(said("say(str(len([\"a\", \"b\"])))"), ["2"]);
    }

    #[test]
    fn no_implicit_coercion() {
        assert_eq!(fails_with("say(\"count: \" + 3)"), ErrorClass::RuntimeError);
    }

    #[test]
    fn endless_loop_runs_out_of_steps() {
        let out = run_with(&body("while True:\n    pass"), vec![], Limits { max_steps: 1000 });
        assert!(matches!(
            out.status,
            RunStatus::BudgetExceeded {
                kind: BudgetKind::Steps,
                ..
            }
        ));
        assert_eq!(out.steps, 1000);
    }

    #[test]
    fn step_budget_is_exact() {
        // one statement plus one expression node
        let src = body("pass\npass");
        let out = run_with(&src, vec![], Limits { max_steps: 2 });
        assert!(out.completed());
        let out = run_with(&src, vec![], Limits { max_steps: 1 });
        assert!(!out.completed());
    }

    #[test]
    fn undefined_variable() {
        assert_eq!(fails_with("say(x)"), ErrorClass::RuntimeError);
    }

    #[test]
    fn python_arithmetic() {
        assert_eq!(
            said("say(str(-7 // 2) + \" \" + str(-7 % 2) + \" \" + str(7 / 2) + \" \" + str(7 % -3))"),
            ["-4 1 3.5 -2"]
        );
        assert_eq!(fails_with("x = 1 / 0"), ErrorClass::RuntimeError);
        assert_eq!(said("say(str(int(\" 42 \")) + str(int(3.9)))"), ["423"]);
        assert_eq!(fails_with("x = int(\"abc\")"), ErrorClass::RuntimeError);
    }

    #[test]
    fn lists_alias_and_mutate() {
        let lines = "a = []\nb = a\nb.append(\"x\")\na += [\"y\"]\nb[0] = \"z\"\nsay(str(a))\nsay(str(a[-1]))";
        assert_eq!(said(lines), ["['z', 'y']", "y"]);
        assert_eq!(fails_with("a = [1]\nx = a[3]"), ErrorClass::RuntimeError);
        assert_eq!(fails_with("for c in 3:\n    pass"), ErrorClass::RuntimeError);
    }

    #[test]
    fn control_flow() {
        let lines = "out = \"\"\nfor i in range(10):\n    if i % 2 == 0:\n        continue\n    if i > 6:\n        break\n    out += str(i)\nsay(out)\nreturn\nsay(\"unreachable\")";
        assert_eq!(said(lines), ["135"]);
        assert_eq!(said("x = 0 or \"fallback\"\nsay(x)"), ["fallback"]);
        assert_eq!(said("if 0:\n    say(\"a\")\nelif []:\n    say(\"b\")\nelse:\n    say(\"c\")"), ["c"]);
    }

    #[test]
    fn huge_range_is_a_budget_failure() {
        let out = run_src(&body("for i in range(1000000000):\n    pass"), vec![]);
        assert!(matches!(out.status, RunStatus::BudgetExceeded { .. }));
    }

    #[test]
    fn sleep_resamples() {
        let src = include_str!("../fixtures/seeds/task5.txt");
        // absent, absent, present, answer Yes
        let out = run_src(src, vec![0, 0, 1, 0]);
        assert!(out.completed(), "{:?}", out.status);
        assert_eq!(out.choices.len(), 4);
    }

    #[test]
    fn failure_points_at_the_call() {
        let src = include_str!("../fixtures/known_bugs/pick_then_go_to_apple.txt");
        let out = run_src(src, vec![]);
        let (class, _, span) = out.failure().unwrap();
        assert_eq!(class, ErrorClass::TypeError);
        assert_eq!(span.line, 3);
        assert_eq!(out.api_trace.last().unwrap().ret, None);
    }
}
