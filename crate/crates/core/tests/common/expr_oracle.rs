//! Random expression trees with a direct recursive interpreter.

use acoufem::config::{parse_expression, Variables};
use proptest::prelude::*;

#[derive(Debug, Clone)]
pub enum Tree {
    Num(f64),
    Var(usize),
    Neg(Box<Tree>),
    Bin(char, Box<Tree>, Box<Tree>),
    Fun(&'static str, Box<Tree>),
}

const VARS: [&str; 5] = ["x", "y", "z", "t", "f"];
const FUNS: [&str; 6] = ["sin", "cos", "tan", "exp", "sqrt", "abs"];

impl Tree {
    pub fn render(&self) -> String {
        match self {
            Tree::Num(v) => format!("{v:?}"),
            Tree::Var(i) => VARS[*i].to_string(),
            Tree::Neg(a) => format!("(-{})", a.render()),
            Tree::Bin(op, a, b) => format!("({} {op} {})", a.render(), b.render()),
            Tree::Fun(name, a) => format!("{name}({})", a.render()),
        }
    }

    /// `None` marks a domain error.
    pub fn value(&self, vars: &[f64; 5]) -> Option<f64> {
        let v = match self {
            Tree::Num(v) => *v,
            Tree::Var(i) => vars[*i],
            Tree::Neg(a) => -a.value(vars)?,
            Tree::Bin(op, a, b) => {
                let (a, b) = (a.value(vars)?, b.value(vars)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' if b == 0.0 => return None,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Tree::Fun(name, a) => {
                let a = a.value(vars)?;
                match *name {
                    "sin" => a.sin(),
                    "cos" => a.cos(),
                    "tan" => a.tan(),
                    "exp" => a.exp(),
                    "sqrt" if a < 0.0 => return None,
                    "sqrt" => a.sqrt(),
                    _ => a.abs(),
                }
            }
        };
        v.is_finite().then_some(v)
    }
}

pub fn tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![
        (0u32..10_000).prop_map(|k| Tree::Num(k as f64 / 1000.0)),
        (0usize..5).prop_map(Tree::Var),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Tree::Neg(Box::new(a))),
            (
                prop::sample::select(vec!['+', '-', '*', '/', '^']),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Tree::Bin(op, Box::new(a), Box::new(b))),
            (prop::sample::select(FUNS.to_vec()), inner).prop_map(|(f, a)| Tree::Fun(f, Box::new(a))),
        ]
    })
}

/// Compares parser and interpreter on one tree: equal results within 1e-12
/// relative, or a domain error on both sides.
pub fn check(t: &Tree, vars: &[f64; 5]) -> Result<(), String> {
    let text = t.render();
    let expr = parse_expression(&text).map_err(|e| format!("{text}: {e}"))?;
    let bindings = Variables {
        x: vars[0],
        y: vars[1],
        z: vars[2],
        t: vars[3],
        f: vars[4],
    };
    match (t.value(vars), expr.evaluate(&bindings)) {
        (Some(want), Ok(got)) if got == want || (got - want).abs() <= 1e-12 * want.abs() => Ok(()),
        (None, Err(_)) => Ok(()),
        (want, got) => Err(format!("{text}: oracle {want:?}, parser {got:?}")),
    }
}
