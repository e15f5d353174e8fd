use angelsim_core::corpus;
use angelsim_core::parser::{
    parse_program, pretty_print, BinOp, BoolOp, CmpOp, Expr, Span, Stmt, StmtKind, Target, TaskProgram,
};
use proptest::prelude::*;

const APIS: &[&str] = &["say", "go_to", "is_in_room", "ask", "pick", "place", "get_all_rooms"];
const VARS: &[&str] = &["x", "count", "room", "items", "found", "response"];

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(VARS).prop_map(str::to_string)
}

fn string_lit() -> impl Strategy<Value = String> {
    prop::string::string_regex("[a-z '\"\\\\\n\t#:]{0,10}").unwrap()
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..1000).prop_map(Expr::Int),
        prop::sample::select(vec![0.5, 1.25, 2.0, 1e-3]).prop_map(Expr::Float),
        any::<bool>().prop_map(Expr::Bool),
        Just(Expr::None),
        string_lit().prop_map(Expr::Str),
        name().prop_map(Expr::Name),
        Just(Expr::MathPi),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let b = || inner.clone().prop_map(Box::new);
        prop_oneof![
            (prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::FloorDiv, BinOp::Mod]), b(), b())
                .prop_map(|(op, lhs, rhs)| Expr::BinOp { op, lhs, rhs }),
            (
                prop::sample::select(vec![CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::In, CmpOp::NotIn]),
                b(),
                b()
            )
                .prop_map(|(op, lhs, rhs)| Expr::Compare { op, lhs, rhs }),
            (prop::sample::select(vec![BoolOp::And, BoolOp::Or]), b(), b())
                .prop_map(|(op, lhs, rhs)| Expr::BoolOp { op, lhs, rhs }),
            b().prop_map(Expr::Not),
            b().prop_map(Expr::Neg),
            prop::collection::vec(inner.clone(), 0..3).prop_map(Expr::List),
            (b(), b()).prop_map(|(base, index)| Expr::Index { base, index }),
            (
                prop::sample::select(vec!["len", "str", "int", "range", "say", "is_in_room"]),
                prop::collection::vec(inner.clone(), 0..3)
            )
                .prop_map(|(c, args)| Expr::Call { callee: c.to_string(), args, span: Span::default() }),
        ]
    })
}

fn stmt(depth: u32) -> BoxedStrategy<Stmt> {
    let simple = prop_oneof![
        expr().prop_map(StmtKind::Expr),
        (name(), expr()).prop_map(|(n, value)| StmtKind::Assign { target: Target::Name(n), value }),
        (name(), expr(), expr()).prop_map(|(n, index, value)| StmtKind::Assign {
            target: Target::Index { base: Expr::Name(n), index },
            value
        }),
        (name(), expr()).prop_map(|(n, arg)| StmtKind::Expr(Expr::Append {
            receiver: Box::new(Expr::Name(n)),
            arg: Box::new(arg)
        })),
        Just(StmtKind::Pass),
        Just(StmtKind::Return(None)),
        expr().prop_map(|e| StmtKind::Return(Some(e))),
    ];
    let kind = if depth == 0 {
        simple.boxed()
    } else {
        let block = || prop::collection::vec(stmt(depth - 1), 1..3);
        let loop_block = || {
            prop::collection::vec(
                prop_oneof![4 => stmt(depth - 1), 1 => Just(StmtKind::Break).prop_map(at), 1 => Just(StmtKind::Continue).prop_map(at)],
                1..3,
            )
        };
        prop_oneof![
            3 => simple,
            1 => (expr(), block(), prop::collection::vec((expr(), block()), 0..2), prop::option::of(block()))
                .prop_map(|(cond, then, elifs, orelse)| StmtKind::If { cond, then, elifs, orelse }),
            1 => (expr(), loop_block()).prop_map(|(cond, body)| StmtKind::While { cond, body }),
            1 => (name(), expr(), loop_block()).prop_map(|(target, iter, body)| StmtKind::For { target, iter, body }),
        ]
        .boxed()
    };
    kind.prop_map(at).boxed()
}

fn at(kind: StmtKind) -> Stmt {
    Stmt { kind, span: Span::default() }
}

fn program() -> impl Strategy<Value = TaskProgram> {
    (prop::option::of("[A-Za-z ,.]{1,30}"), prop::collection::vec(stmt(2), 1..6)).prop_map(|(c, body)| TaskProgram {
        leading_comment: c.map(|c| c.trim().to_string()).filter(|c| !c.is_empty()),
        body,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn printing_then_parsing_is_identity(p in program()) {
        let text = pretty_print(&p);
        let back = parse_program(&text, APIS).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back.without_spans(), p.without_spans(), "{}", text);
        prop_assert_eq!(pretty_print(&back), text);
    }

    #[test]
    fn parsing_is_deterministic(p in program()) {
        let text = pretty_print(&p);
        prop_assert_eq!(parse_program(&text, APIS), parse_program(&text, APIS));
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[ -~\n\t]{0,200}") {
        let _ = parse_program(&text, APIS);
    }
}

#[test]
fn fixtures_round_trip() {
    for f in corpus::all() {
        let apis: Vec<&str> = match f.domain {
            "gripper" => vec!["rotate"],
            "calendar" => vec!["schedule_on_calendar"],
            _ => APIS.iter().copied().chain(["get_current_location"]).collect(),
        };
        let p = parse_program(f.source, &apis).unwrap();
        let again = parse_program(&pretty_print(&p), &apis).unwrap();
        assert_eq!(again.without_spans(), p.without_spans(), "{}", f.name);
    }
}
