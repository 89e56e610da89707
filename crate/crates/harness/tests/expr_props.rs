use deltabound_harness::expr::{BinOp, Func};
use deltabound_harness::{parse_expr, Env, Expr, ParseErrorKind, Var};
use proptest::prelude::*;

fn arb_leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000).prop_map(|n| Expr::Num(f64::from(n))),
        (0.0f64..1e6).prop_map(Expr::Num),
        prop::sample::select(Var::ALL.to_vec()).prop_map(Expr::Var),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    arb_leaf().prop_recursive(6, 64, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (
                prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            (inner.clone(), 0u32..5).prop_map(|(e, k)| Expr::Pow(Box::new(e), k)),
            (
                prop::sample::select(vec![Func::Exp, Func::Abs]),
                inner.clone()
            )
                .prop_map(|(f, a)| Expr::Call(f, vec![a])),
            (
                prop::sample::select(vec![Func::Min, Func::Max]),
                inner.clone(),
                inner
            )
                .prop_map(|(f, a, b)| Expr::Call(f, vec![a, b])),
        ]
    })
}

fn env() -> Env {
    Var::ALL
        .iter()
        .enumerate()
        .fold(Env::new(), |e, (k, &v)| e.with(v, 0.5 + k as f64))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(e in arb_expr()) {
        let printed = e.to_string();
        let back = parse_expr(&printed).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", printed);
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn parse_never_panics(s in "[ -~]{0,40}") {
        if let Err(err) = parse_expr(&s) {
            prop_assert!(err.offset <= s.len());
        }
    }

    #[test]
    fn parse_never_panics_on_grammar_soup(
        parts in prop::collection::vec(
            prop::sample::select(vec!["x", "1", "2.5", "(", ")", "+", "-", "*", "/", "^", "min", "exp", ",", " ", "1e", "3"]),
            0..30,
        )
    ) {
        let s: String = parts.concat();
        if let Err(err) = parse_expr(&s) {
            prop_assert!(err.offset <= s.len());
        }
    }

    #[test]
    fn subtraction_and_division_associate_left(a in 1u32..100, b in 1u32..100, c in 1u32..100) {
        let (a, b, c) = (f64::from(a), f64::from(b), f64::from(c));
        let src = format!("{a} - {b} - {c}");
        prop_assert_eq!(parse_expr(&src).unwrap().eval(&env()).unwrap(), (a - b) - c);
        let src = format!("{a} / {b} / {c}");
        prop_assert_eq!(parse_expr(&src).unwrap().eval(&env()).unwrap(), (a / b) / c);
    }

    #[test]
    fn product_binds_tighter_than_sum(a in 0u32..100, b in 0u32..100, c in 0u32..100) {
        let (a, b, c) = (f64::from(a), f64::from(b), f64::from(c));
        let v = parse_expr(&format!("{a} + {b} * {c}")).unwrap().eval(&env()).unwrap();
        prop_assert_eq!(v, a + b * c);
        let v = parse_expr(&format!("{a} * {b} - {c}")).unwrap().eval(&env()).unwrap();
        prop_assert_eq!(v, a * b - c);
    }

    #[test]
    fn power_binds_tighter_than_negation(a in 1u32..50, k in 0u32..4) {
        let a = f64::from(a);
        let v = parse_expr(&format!("-{a}^{k}")).unwrap().eval(&env()).unwrap();
        prop_assert_eq!(v, -a.powi(k as i32));
    }
}

#[test]
fn spec_examples() {
    let e = parse_expr("1 + s*y").unwrap();
    assert_eq!(
        e,
        Expr::binary(
            BinOp::Add,
            Expr::Num(1.0),
            Expr::binary(BinOp::Mul, Expr::Var(Var::S), Expr::Var(Var::Y))
        )
    );
    let e = parse_expr("exp(-(x+y))").unwrap();
    assert_eq!(
        e,
        Expr::Call(
            Func::Exp,
            vec![Expr::Neg(Box::new(Expr::binary(
                BinOp::Add,
                Expr::Var(Var::X),
                Expr::Var(Var::Y)
            )))]
        )
    );
    assert_eq!(
        parse_expr("2*3 + 4").unwrap().eval(&Env::new()).unwrap(),
        10.0
    );
    assert_eq!(
        parse_expr("x^2").unwrap().eval(&Env::xy(3.0, 0.0)).unwrap(),
        9.0
    );
    assert_eq!(
        parse_expr("min(x, y)")
            .unwrap()
            .eval(&Env::xy(2.0, 5.0))
            .unwrap(),
        2.0
    );
}

#[test]
fn malformed_inputs_are_positioned() {
    let cases: &[(&str, usize)] = &[
        ("x +", 3),
        ("x ^ 0.5", 4),
        ("max(x)", 0),
        ("foo(x)", 0),
        ("x # y", 2),
        ("(x", 2),
        ("x)", 1),
    ];
    for (src, offset) in cases {
        let err = parse_expr(src).unwrap_err();
        assert_eq!(err.offset, *offset, "{src}: {err}");
    }
    assert!(matches!(
        parse_expr("x ^ 0.5").unwrap_err().kind,
        ParseErrorKind::BadExponent
    ));
}
