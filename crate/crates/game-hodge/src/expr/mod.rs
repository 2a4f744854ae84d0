//! Symbolic expression trees for utility functions.
//!
//! Utilities are stored as immutable ASTs so that simultaneous gradients,
//! Jacobians and Hessians are exact: identities that hold symbolically
//! (mixed-partial symmetry, zero divergence, ...) hold to machine precision
//! at every evaluation point instead of up to a finite-difference error.
//!
//! The grammar accepted by [`parse`]:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := '-' term | factor (('*' | '/') factor)*
//! factor := base ('^' uint)?
//! base   := number | ident | '(' expr ')' | '-' factor | func '(' expr ')'
//! ```
//!
//! `+ - * /` are left-associative; exponents are nonnegative integer
//! literals; unary minus binds looser than `^` and `*`, so `-x^2` is
//! `-(x^2)` and `-x*y` is `-(x*y)`. Identifiers are ASCII letters, digits
//! and underscores, starting with a letter.
//!
//! Builtin functions: `sin`, `cos`, `exp`, `tanh`, and the compactly
//! supported `bump(t) = exp(-1/(1-t^2))` for `|t| < 1`, `0` otherwise.
//! Derivatives of `bump` are closed under differentiation via the
//! `bump_d<k>` family (`bump_d1` is the first derivative and so on); these
//! names appear in rendered derivatives and are accepted back by the
//! parser so that every expression round-trips.

mod parse;

pub use parse::parse;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Builtin analytic functions.
///
/// `Bump(k)` is the k-th derivative of the bump function; `Bump(0)` is the
/// bump function itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Bump(u32),
}

impl Func {
    pub fn name(&self) -> String {
        match self {
            Func::Sin => "sin".to_string(),
            Func::Cos => "cos".to_string(),
            Func::Exp => "exp".to_string(),
            Func::Tanh => "tanh".to_string(),
            Func::Bump(0) => "bump".to_string(),
            Func::Bump(k) => format!("bump_d{k}"),
        }
    }

    fn apply(&self, t: f64) -> f64 {
        match self {
            Func::Sin => t.sin(),
            Func::Cos => t.cos(),
            Func::Exp => t.exp(),
            Func::Tanh => t.tanh(),
            Func::Bump(k) => bump_deriv(*k, t),
        }
    }
}

/// Immutable symbolic expression tree.
///
/// Exponents are nonnegative integer literals, which keeps differentiation
/// closed-form and avoids branch cuts. Constants produced by [`parse`] and
/// [`Expr::simplify`] are nonnegative; negative values are represented as
/// `Neg(Const)` so that rendering round-trips structurally.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Parse-time errors, with byte offsets into the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("exponent at byte {offset} must be a nonnegative integer literal")]
    Exponent { offset: usize },
}

/// Evaluation-time errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// Variable bindings for evaluation: parallel slices of names and values.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    names: &'a [String],
    values: &'a [f64],
}

impl<'a> Env<'a> {
    pub fn new(names: &'a [String], values: &'a [f64]) -> Self {
        debug_assert_eq!(names.len(), values.len());
        Env { names, values }
    }

    fn lookup(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn pow(self, n: u32) -> Expr {
        Expr::Pow(Box::new(self), n)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Evaluate with standard real arithmetic. `x^0` is 1 everywhere.
    pub fn eval(&self, env: &Env) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(name) => env
                .lookup(name)
                .ok_or_else(|| EvalError::UnboundVariable(name.clone())),
            Expr::Add(a, b) => Ok(a.eval(env)? + b.eval(env)?),
            Expr::Sub(a, b) => Ok(a.eval(env)? - b.eval(env)?),
            Expr::Mul(a, b) => Ok(a.eval(env)? * b.eval(env)?),
            Expr::Div(a, b) => {
                let d = b.eval(env)?;
                if d == 0.0 {
                    Err(EvalError::DivisionByZero)
                } else {
                    Ok(a.eval(env)? / d)
                }
            }
            Expr::Pow(a, n) => Ok(a.eval(env)?.powi(*n as i32)),
            Expr::Neg(a) => Ok(-a.eval(env)?),
            Expr::Call(f, arg) => Ok(f.apply(arg.eval(env)?)),
        }
    }

    /// Exact symbolic partial derivative with respect to `var`, simplified.
    pub fn differentiate(&self, var: &str) -> Expr {
        self.derivative_raw(var).simplify()
    }

    fn derivative_raw(&self, var: &str) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(name) => {
                if name == var {
                    Expr::Const(1.0)
                } else {
                    Expr::Const(0.0)
                }
            }
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.derivative_raw(var)),
                Box::new(b.derivative_raw(var)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.derivative_raw(var)),
                Box::new(b.derivative_raw(var)),
            ),
            Expr::Mul(a, b) => {
                let da = a.derivative_raw(var);
                let db = b.derivative_raw(var);
                Expr::Add(
                    Box::new(Expr::Mul(Box::new(da), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(db))),
                )
            }
            Expr::Div(a, b) => {
                // (a'b - ab') / b^2
                let da = a.derivative_raw(var);
                let db = b.derivative_raw(var);
                let num = Expr::Sub(
                    Box::new(Expr::Mul(Box::new(da), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(db))),
                );
                Expr::Div(Box::new(num), Box::new(Expr::Pow(b.clone(), 2)))
            }
            Expr::Pow(a, n) => {
                if *n == 0 {
                    Expr::Const(0.0)
                } else {
                    let da = a.derivative_raw(var);
                    let outer = Expr::Mul(
                        Box::new(Expr::Const(*n as f64)),
                        Box::new(Expr::Pow(a.clone(), n - 1)),
                    );
                    Expr::Mul(Box::new(outer), Box::new(da))
                }
            }
            Expr::Neg(a) => Expr::Neg(Box::new(a.derivative_raw(var))),
            Expr::Call(f, arg) => {
                let da = arg.derivative_raw(var);
                let outer = match f {
                    Func::Sin => Expr::Call(Func::Cos, arg.clone()),
                    Func::Cos => Expr::Neg(Box::new(Expr::Call(Func::Sin, arg.clone()))),
                    Func::Exp => Expr::Call(Func::Exp, arg.clone()),
                    Func::Tanh => Expr::Sub(
                        Box::new(Expr::Const(1.0)),
                        Box::new(Expr::Pow(Box::new(Expr::Call(Func::Tanh, arg.clone())), 2)),
                    ),
                    Func::Bump(k) => Expr::Call(Func::Bump(k + 1), arg.clone()),
                };
                Expr::Mul(Box::new(outer), Box::new(da))
            }
        }
    }

    /// Constant folding and identity elimination. Idempotent and
    /// semantics-preserving: `simplify(e)` evaluates to the same value as
    /// `e` wherever `e` is defined.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(c) => const_node(*c),
            Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => simp_add(a.simplify(), b.simplify()),
            Expr::Sub(a, b) => simp_sub(a.simplify(), b.simplify()),
            Expr::Mul(a, b) => simp_mul(a.simplify(), b.simplify()),
            Expr::Div(a, b) => simp_div(a.simplify(), b.simplify()),
            Expr::Pow(a, n) => simp_pow(a.simplify(), *n),
            Expr::Neg(a) => simp_neg(a.simplify()),
            Expr::Call(f, arg) => Expr::Call(*f, Box::new(arg.simplify())),
        }
    }

    /// Render to a string that re-parses to a structurally identical tree.
    pub fn render(&self) -> String {
        self.to_string()
    }

    /// The set of variable names occurring in this expression.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(name) => {
                out.insert(name.as_str());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
        }
    }
}

/// The bump value at `t`: `exp(-1/(1-t^2))` inside the open support, else 0.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// k-th derivative of the bump function, zero (exactly) for |t| >= 1.
///
/// Inside the support the derivative is `bump(t) * N_k(t) / (1-t^2)^(2k)`
/// with polynomial prefactors satisfying
/// `N_{k+1} = -2t N_k + (1-t^2)^2 N_k' + 4kt(1-t^2) N_k`, `N_0 = 1`.
fn bump_deriv(order: u32, t: f64) -> f64 {
    if order == 0 {
        return bump(t);
    }
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let mut n_k = vec![1.0f64];
    for k in 0..order {
        n_k = next_prefactor(&n_k, k);
    }
    let d = 1.0 - t * t;
    bump(t) * poly_eval(&n_k, t) / d.powi(2 * order as i32)
}

fn next_prefactor(n_k: &[f64], k: u32) -> Vec<f64> {
    let d2 = [1.0, 0.0, -2.0, 0.0, 1.0]; // (1-t^2)^2
    let mut out = poly_mul(&[0.0, -2.0], n_k);
    poly_acc(&mut out, &poly_mul(&d2, &poly_deriv(n_k)));
    let kt_d = poly_mul(&[0.0, 4.0 * k as f64], &[1.0, 0.0, -1.0]);
    poly_acc(&mut out, &poly_mul(&kt_d, n_k));
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_acc(acc: &mut Vec<f64>, other: &[f64]) {
    if other.len() > acc.len() {
        acc.resize(other.len(), 0.0);
    }
    for (i, &c) in other.iter().enumerate() {
        acc[i] += c;
    }
}

fn poly_deriv(a: &[f64]) -> Vec<f64> {
    if a.len() <= 1 {
        return vec![0.0];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

fn poly_eval(a: &[f64], t: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Canonical constant node: nonnegative `Const`, negatives as `Neg(Const)`.
fn const_node(v: f64) -> Expr {
    if v == 0.0 {
        Expr::Const(0.0)
    } else if v < 0.0 {
        Expr::Neg(Box::new(Expr::Const(-v)))
    } else {
        Expr::Const(v)
    }
}

/// Constant value of a canonical node, if it is one.
fn const_value(e: &Expr) -> Option<f64> {
    match e {
        Expr::Const(c) => Some(*c),
        Expr::Neg(inner) => match inner.as_ref() {
            Expr::Const(c) => Some(-*c),
            _ => None,
        },
        _ => None,
    }
}

fn is_zero(e: &Expr) -> bool {
    const_value(e) == Some(0.0)
}

fn is_one(e: &Expr) -> bool {
    const_value(e) == Some(1.0)
}

fn simp_add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (const_value(&a), const_value(&b)) {
        if (x + y).is_finite() {
            return const_node(x + y);
        }
    }
    Expr::Add(Box::new(a), Box::new(b))
}

fn simp_sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return simp_neg(b);
    }
    if let (Some(x), Some(y)) = (const_value(&a), const_value(&b)) {
        if (x - y).is_finite() {
            return const_node(x - y);
        }
    }
    Expr::Sub(Box::new(a), Box::new(b))
}

fn simp_mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return Expr::Const(0.0);
    }
    if is_one(&a) {
        return b;
    }
    if is_one(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (const_value(&a), const_value(&b)) {
        if (x * y).is_finite() {
            return const_node(x * y);
        }
    }
    Expr::Mul(Box::new(a), Box::new(b))
}

fn simp_div(a: Expr, b: Expr) -> Expr {
    if is_one(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (const_value(&a), const_value(&b)) {
        if y != 0.0 && (x / y).is_finite() {
            return const_node(x / y);
        }
    }
    Expr::Div(Box::new(a), Box::new(b))
}

fn simp_pow(a: Expr, n: u32) -> Expr {
    if n == 0 {
        return Expr::Const(1.0);
    }
    if n == 1 {
        return a;
    }
    if let Some(x) = const_value(&a) {
        let v = x.powi(n as i32);
        if v.is_finite() {
            return const_node(v);
        }
    }
    Expr::Pow(Box::new(a), n)
}

fn simp_neg(a: Expr) -> Expr {
    match a {
        Expr::Neg(inner) => *inner,
        Expr::Const(c) if c == 0.0 => Expr::Const(0.0),
        Expr::Const(c) if c < 0.0 => Expr::Const(-c),
        other => Expr::Neg(Box::new(other)),
    }
}

// Rendering. Parenthesization follows the grammar: right operands of
// `+`/`-` that are themselves sums, non-factor operands of `*`/`/`, and
// non-atomic `^` bases get parentheses; a leading `-` captures the rest of
// its term, so negated operands inside products are always parenthesized.

fn is_sum(e: &Expr) -> bool {
    matches!(e, Expr::Add(..) | Expr::Sub(..))
}

fn is_negative(e: &Expr) -> bool {
    matches!(e, Expr::Neg(..)) || matches!(e, Expr::Const(c) if *c < 0.0)
}

fn is_atom(e: &Expr) -> bool {
    matches!(e, Expr::Var(..) | Expr::Call(..)) || matches!(e, Expr::Const(c) if *c >= 0.0)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, needs: bool) -> fmt::Result {
            if needs {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Const(c) => {
                if *c == 0.0 {
                    write!(f, "0")
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(name) => write!(f, "{name}"),
            Expr::Add(a, b) => {
                write!(f, "{a} + ")?;
                paren(f, b, is_sum(b))
            }
            Expr::Sub(a, b) => {
                write!(f, "{a} - ")?;
                paren(f, b, is_sum(b))
            }
            Expr::Mul(a, b) => {
                paren(f, a, is_sum(a) || is_negative(a))?;
                write!(f, "*")?;
                paren(f, b, is_sum(b) || is_negative(b))
            }
            Expr::Div(a, b) => {
                paren(f, a, is_sum(a) || is_negative(a))?;
                write!(f, "/")?;
                paren(f, b, !matches!(b.as_ref(), Expr::Pow(..)) && !is_atom(b))
            }
            Expr::Pow(a, n) => {
                paren(f, a, !is_atom(a))?;
                write!(f, "^{n}")
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                paren(f, a, is_sum(a))
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars_xy() -> Vec<String> {
        vec!["x".to_string(), "y".to_string()]
    }

    fn eval_at(e: &Expr, names: &[String], values: &[f64]) -> f64 {
        e.eval(&Env::new(names, values)).unwrap()
    }

    #[test]
    fn parse_product() {
        let e = parse("x*y", &["x", "y"]).unwrap();
        assert_eq!(
            e,
            Expr::Mul(Box::new(Expr::var("x")), Box::new(Expr::var("y")))
        );
    }

    #[test]
    fn parse_orbit_utility() {
        // -x*y - x^3*y: leading minus negates the whole first term.
        let e = parse("-x*y - x^3*y", &["x", "y"]).unwrap();
        let expected = Expr::Sub(
            Box::new(Expr::Neg(Box::new(Expr::Mul(
                Box::new(Expr::var("x")),
                Box::new(Expr::var("y")),
            )))),
            Box::new(Expr::Mul(
                Box::new(Expr::var("x").pow(3)),
                Box::new(Expr::var("y")),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn parse_incomplete_input_reports_offset() {
        let err = parse("x +", &["x"]).unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                offset: 3,
                message: "expected expression".to_string()
            }
        );
    }

    #[test]
    fn parse_rejects_unknown_identifier_and_function() {
        assert!(matches!(
            parse("x + z", &["x"]),
            Err(ParseError::UnknownIdentifier { ref name, offset: 4 }) if name == "z"
        ));
        assert!(matches!(
            parse("log(x)", &["x"]),
            Err(ParseError::UnknownFunction { ref name, offset: 0 }) if name == "log"
        ));
    }

    #[test]
    fn parse_rejects_bad_exponents() {
        assert!(matches!(
            parse("x^-2", &["x"]),
            Err(ParseError::Exponent { .. })
        ));
        assert!(matches!(
            parse("x^2.5", &["x"]),
            Err(ParseError::Exponent { .. })
        ));
    }

    #[test]
    fn unary_minus_binds_looser_than_pow() {
        let e = parse("-x^2", &["x"]).unwrap();
        assert_eq!(e, Expr::Neg(Box::new(Expr::var("x").pow(2))));
    }

    #[test]
    fn eval_product() {
        let e = parse("x*y", &["x", "y"]).unwrap();
        assert_eq!(eval_at(&e, &vars_xy(), &[2.0, 3.0]), 6.0);
    }

    #[test]
    fn eval_bump_boundary_and_center() {
        let names = vec!["t".to_string()];
        let e = parse("bump(t)", &["t"]).unwrap();
        assert_eq!(eval_at(&e, &names, &[1.0]), 0.0);
        assert_eq!(eval_at(&e, &names, &[-1.0]), 0.0);
        assert_eq!(eval_at(&e, &names, &[2.5]), 0.0);
        // exp(-1) from a high-precision evaluation
        assert!((eval_at(&e, &names, &[0.0]) - 0.36787944117144233).abs() < 1e-12);
    }

    #[test]
    fn eval_division_by_zero() {
        let e = parse("x / y", &["x", "y"]).unwrap();
        let names = vars_xy();
        assert_eq!(
            e.eval(&Env::new(&names, &[1.0, 0.0])),
            Err(EvalError::DivisionByZero)
        );
    }

    #[test]
    fn eval_missing_binding() {
        let e = parse("x + y", &["x", "y"]).unwrap();
        let names = vec!["x".to_string()];
        assert_eq!(
            e.eval(&Env::new(&names, &[1.0])),
            Err(EvalError::UnboundVariable("y".to_string()))
        );
    }

    #[test]
    fn derivative_of_product_is_other_factor() {
        let e = parse("x*y", &["x", "y"]).unwrap();
        assert_eq!(e.differentiate("x"), Expr::var("y"));
    }

    #[test]
    fn derivative_matches_orbit_second_component() {
        let u2 = parse("-x*y - x^3*y", &["x", "y"]).unwrap();
        let expected = parse("-x - x^3", &["x", "y"]).unwrap();
        assert_eq!(u2.differentiate("y"), expected);
    }

    #[test]
    fn bump_derivative_matches_central_difference() {
        let names = vec!["t".to_string()];
        let e = parse("bump(t)", &["t"]).unwrap();
        let de = e.differentiate("t");
        for &t in &[0.5, -0.3, 0.9, 0.0] {
            let h = 1e-6;
            let fd = (eval_at(&e, &names, &[t + h]) - eval_at(&e, &names, &[t - h])) / (2.0 * h);
            let exact = eval_at(&de, &names, &[t]);
            assert!(
                (exact - fd).abs() <= 1e-6 * (1.0 + exact.abs()),
                "t={t}: exact={exact}, fd={fd}"
            );
        }
        // Outside and at the edge of the support the derivative is zero.
        assert_eq!(eval_at(&de, &names, &[1.0]), 0.0);
        assert_eq!(eval_at(&de, &names, &[-3.0]), 0.0);
    }

    #[test]
    fn second_bump_derivative_value() {
        // bump''(0) = -2/e, from the series of exp(-1/(1-t^2)) at 0.
        let d2 = parse("bump(t)", &["t"])
            .unwrap()
            .differentiate("t")
            .differentiate("t");
        let names = vec!["t".to_string()];
        let got = eval_at(&d2, &names, &[0.0]);
        assert!((got - (-2.0 * (-1.0f64).exp())).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn simplify_drops_zero_terms_and_unit_factors() {
        let e = parse("0*y + x", &["x", "y"]).unwrap();
        assert_eq!(e.simplify(), Expr::var("x"));
        let e = parse("x^1 * 1", &["x"]).unwrap();
        assert_eq!(e.simplify(), Expr::var("x"));
    }

    #[test]
    fn mixed_partials_cancel_to_zero_literal() {
        let e = parse("x*y", &["x", "y"]).unwrap();
        let dxy = e.differentiate("x").differentiate("y");
        let dyx = e.differentiate("y").differentiate("x");
        let diff = Expr::Sub(Box::new(dxy), Box::new(dyx)).simplify();
        assert_eq!(diff, Expr::Const(0.0));
    }

    #[test]
    fn simplify_folds_negative_constants_canonically() {
        let e = parse("1 - 3", &["x"]).unwrap().simplify();
        assert_eq!(e, Expr::Neg(Box::new(Expr::Const(2.0))));
        // and the canonical form re-parses identically
        assert_eq!(parse(&e.render(), &["x"]).unwrap(), e);
    }

    #[test]
    fn render_round_trips_spec_examples() {
        let cases = ["x*y", "-x*y - x^3*y", "x^3", "x * -y^2", "sin(x)*cos(y)"];
        for text in cases {
            let e = parse(text, &["x", "y"]).unwrap();
            let back = parse(&e.render(), &["x", "y"]).unwrap();
            assert_eq!(back, e, "round trip failed for {text}");
        }
    }

    #[test]
    fn render_derivative_of_bump_round_trips() {
        let de = parse("bump(x)", &["x"]).unwrap().differentiate("x");
        let back = parse(&de.render(), &["x"]).unwrap();
        assert_eq!(back, de);
    }

    #[test]
    fn simplify_is_idempotent_on_examples() {
        for text in ["0*y + x", "x^0 + 2*3", "-(-x) - 0", "1*x/1 + (2 - 5)"] {
            let e = parse(text, &["x", "y"]).unwrap();
            let s1 = e.simplify();
            assert_eq!(s1.simplify(), s1, "not idempotent for {text}");
        }
    }
}
