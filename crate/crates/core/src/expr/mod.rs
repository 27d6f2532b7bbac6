//! Exact symbolic expressions over phase-space symbols.
//!
//! [`Expr`] is an immutable tree. Construction is cheap and unnormalized;
//! [`simplify`] maps any tree onto its unique canonical form (sums and
//! products flattened, sorted and collected, gamma ratios folded into
//! rational functions of `s`, dummy indices renamed).

mod diff;
mod eval;
mod normal;
mod parse;
pub mod rational;
mod render;
mod subst;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

pub use diff::{diff_p, diff_x};
pub use eval::{eval_numeric, eval_numeric_bound, Bindings, FieldProvider};
pub use normal::{coeff_to_expr as ratfunc_to_expr, as_rational, coefficient_of_s, expand_terms, is_zero, simplify, split_s_coefficient};
pub use rational::{q, qr, Qi, RatFunc, Q};
pub use parse::{parse_expr, parse_substitution};
pub use render::{from_json, render, to_json, Format};
pub use subst::{pin_dimension, substitute, substitute_param};

/// Abstract spacetime index name. Names starting with `#` are reserved for
/// canonical dummy indices.
pub type Index = String;

/// Well-known parameter names.
pub mod params {
    pub const S: &str = "s";
    pub const D: &str = "d";
    pub const HBAR: &str = "hbar";
    pub const MU: &str = "mu";
    pub const EPS: &str = "eps";
    pub const LAMBDA: &str = "lambda";
    pub const T: &str = "t";
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Pi,
    E,
    /// The imaginary unit; always absorbed into exact coefficients.
    I,
}

/// Affine exponent `c + s_coeff·s + d_coeff·d` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent {
    pub c: Q,
    pub s: Q,
    pub d: Q,
}

impl Exponent {
    pub fn new(c: Q, s: Q, d: Q) -> Self {
        Exponent { c, s, d }
    }
    pub fn constant(c: Q) -> Self {
        Exponent { c, s: Q::zero(), d: Q::zero() }
    }
    pub fn int(n: i64) -> Self {
        Exponent::constant(q(n))
    }
    /// `c + k·s`
    pub fn affine(c: Q, k: Q) -> Self {
        Exponent { c, s: k, d: Q::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.s.is_zero() && self.d.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.c.is_one() && self.s.is_zero() && self.d.is_zero()
    }
    pub fn is_constant(&self) -> bool {
        self.s.is_zero() && self.d.is_zero()
    }
    pub fn as_integer(&self) -> Option<i64> {
        if self.is_constant() && self.c.is_integer() {
            self.c.to_integer().to_i64()
        } else {
            None
        }
    }
    pub fn add(&self, o: &Exponent) -> Exponent {
        Exponent { c: &self.c + &o.c, s: &self.s + &o.s, d: &self.d + &o.d }
    }
    pub fn sub(&self, o: &Exponent) -> Exponent {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> Exponent {
        Exponent { c: -self.c.clone(), s: -self.s.clone(), d: -self.d.clone() }
    }
    pub fn scale(&self, k: &Q) -> Exponent {
        Exponent { c: &self.c * k, s: &self.s * k, d: &self.d * k }
    }
    /// Product of two exponents when the result stays affine.
    pub fn mul(&self, o: &Exponent) -> Option<Exponent> {
        if self.is_constant() {
            Some(o.scale(&self.c))
        } else if o.is_constant() {
            Some(self.scale(&o.c))
        } else {
            None
        }
    }
    pub fn to_expr(&self) -> Expr {
        let mut parts = Vec::new();
        if !self.c.is_zero() {
            parts.push(Expr::Rational(self.c.clone()));
        }
        if !self.s.is_zero() {
            parts.push(Expr::Product(vec![Expr::Rational(self.s.clone()), Expr::s()]));
        }
        if !self.d.is_zero() {
            parts.push(Expr::Product(vec![Expr::Rational(self.d.clone()), Expr::d()]));
        }
        match parts.len() {
            0 => Expr::zero(),
            1 => parts.pop().unwrap(),
            _ => Expr::Sum(parts),
        }
    }
    /// Reads an affine exponent back out of an expression in `s` and `d`.
    pub fn from_expr(e: &Expr) -> Option<Exponent> {
        let n = simplify(e);
        normal::affine_in_s_d(&n)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(&self.to_expr(), Format::Text))
    }
}

/// A background field or one of its partial derivatives.
///
/// `indices` is kept sorted; each `laplacians` unit stands for a contracted
/// pair `∂_a ∂_a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldAtom {
    pub name: String,
    pub indices: Vec<Index>,
    pub laplacians: u32,
}

impl FieldAtom {
    pub fn new(name: impl Into<String>) -> Self {
        FieldAtom { name: name.into(), indices: vec![], laplacians: 0 }
    }
    pub fn with_indices(name: impl Into<String>, idx: &[&str]) -> Self {
        FieldAtom {
            name: name.into(),
            indices: idx.iter().map(|s| s.to_string()).collect(),
            laplacians: 0,
        }
        .normalized()
    }
    /// Sorts indices and folds repeated pairs into Laplacians.
    pub fn normalized(mut self) -> Self {
        self.indices.sort();
        let mut out: Vec<Index> = Vec::with_capacity(self.indices.len());
        for ix in self.indices.drain(..) {
            if out.last() == Some(&ix) {
                out.pop();
                self.laplacians += 1;
            } else {
                out.push(ix);
            }
        }
        self.indices = out;
        self
    }
    /// Number of spatial derivatives carried.
    pub fn order(&self) -> usize {
        self.indices.len() + 2 * self.laplacians as usize
    }
    pub fn derivative(&self, mu: &str) -> Self {
        let mut f = self.clone();
        f.indices.push(mu.to_string());
        f.normalized()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MomentumAtom {
    Component(Index),
    /// `p² = p_a p_a` (Euclidean).
    Square,
}

/// Expression node. Variant order defines the canonical node ordering.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Rational(Q),
    Constant(Constant),
    Param(String),
    Field(FieldAtom),
    Momentum(MomentumAtom),
    Delta(Index, Index),
    Gamma(Exponent),
    /// `sin(π·arg)`
    SinPi(Exponent),
    /// Opaque functional such as `V[φ²/g²]`.
    Func(String, Box<Expr>),
    Log(Box<Expr>),
    Power(Box<Expr>, Exponent),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Rational(q(n))
    }
    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::Rational(qr(n, d))
    }
    pub fn zero() -> Expr {
        Expr::int(0)
    }
    pub fn one() -> Expr {
        Expr::int(1)
    }
    pub fn pi() -> Expr {
        Expr::Constant(Constant::Pi)
    }
    pub fn e() -> Expr {
        Expr::Constant(Constant::E)
    }
    pub fn i() -> Expr {
        Expr::Constant(Constant::I)
    }
    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }
    pub fn s() -> Expr {
        Expr::param(params::S)
    }
    pub fn d() -> Expr {
        Expr::param(params::D)
    }
    pub fn lambda() -> Expr {
        Expr::param(params::LAMBDA)
    }
    pub fn field(name: &str) -> Expr {
        Expr::Field(FieldAtom::new(name))
    }
    /// `∂_{i1}…∂_{ik} name`
    pub fn field_d(name: &str, idx: &[&str]) -> Expr {
        Expr::Field(FieldAtom::with_indices(name, idx))
    }
    /// `∂² name`
    pub fn laplacian(name: &str) -> Expr {
        Expr::Field(FieldAtom { name: name.to_string(), indices: vec![], laplacians: 1 })
    }
    pub fn p(mu: &str) -> Expr {
        Expr::Momentum(MomentumAtom::Component(mu.to_string()))
    }
    pub fn p2() -> Expr {
        Expr::Momentum(MomentumAtom::Square)
    }
    pub fn delta(a: &str, b: &str) -> Expr {
        Expr::Delta(a.to_string(), b.to_string())
    }
    pub fn gamma(arg: Exponent) -> Expr {
        Expr::Gamma(arg)
    }
    pub fn log(x: Expr) -> Expr {
        Expr::Log(Box::new(x))
    }
    pub fn func(name: &str, arg: Expr) -> Expr {
        Expr::Func(name.to_string(), Box::new(arg))
    }
    pub fn pow(self, e: Exponent) -> Expr {
        Expr::Power(Box::new(self), e)
    }
    pub fn powi(self, n: i64) -> Expr {
        self.pow(Exponent::int(n))
    }
    pub fn recip(self) -> Expr {
        self.powi(-1)
    }
    pub fn sum(items: impl IntoIterator<Item = Expr>) -> Expr {
        Expr::Sum(items.into_iter().collect())
    }
    pub fn product(items: impl IntoIterator<Item = Expr>) -> Expr {
        Expr::Product(items.into_iter().collect())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Expr::Rational(_))
    }

    /// Calls `f` on every node, parents before children.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Func(_, a) | Expr::Log(a) | Expr::Power(a, _) => a.visit(f),
            Expr::Product(v) | Expr::Sum(v) => v.iter().for_each(|c| c.visit(f)),
            _ => {}
        }
    }

    pub fn contains_param(&self, name: &str) -> bool {
        let mut hit = false;
        self.visit(&mut |e| match e {
            Expr::Param(p) if p == name => hit = true,
            Expr::Gamma(a) | Expr::SinPi(a) | Expr::Power(_, a)
                if (name == params::S && !a.s.is_zero()) || (name == params::D && !a.d.is_zero()) =>
            {
                hit = true
            }
            _ => {}
        });
        hit
    }

    pub fn contains_field(&self, name: &str) -> bool {
        let mut hit = false;
        self.visit(&mut |e| {
            if let Expr::Field(f) = e {
                if f.name == name {
                    hit = true;
                }
            }
        });
        hit
    }

    pub fn contains_momentum(&self) -> bool {
        let mut hit = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::Momentum(_)) {
                hit = true;
            }
        });
        hit
    }

    /// Applies `f` bottom-up, rebuilding the tree.
    pub fn map(&self, f: &impl Fn(Expr) -> Expr) -> Expr {
        let rebuilt = match self {
            Expr::Func(n, a) => Expr::Func(n.clone(), Box::new(a.map(f))),
            Expr::Log(a) => Expr::Log(Box::new(a.map(f))),
            Expr::Power(a, e) => Expr::Power(Box::new(a.map(f)), e.clone()),
            Expr::Product(v) => Expr::Product(v.iter().map(|c| c.map(f)).collect()),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|c| c.map(f)).collect()),
            other => other.clone(),
        };
        f(rebuilt)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self, Format::Text))
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::Sum(vec![self, o])
    }
}
impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::Sum(vec![self, -o])
    }
}
impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::Product(vec![self, o])
    }
}
impl Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        Expr::Product(vec![self, o.recip()])
    }
}
impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Rational(r) => Expr::Rational(-r),
            other => Expr::Product(vec![Expr::int(-1), other]),
        }
    }
}

/// Exact structural equality after canonicalization.
pub fn equivalent(a: &Expr, b: &Expr) -> bool {
    is_zero(&(a.clone() - b.clone()))
}
