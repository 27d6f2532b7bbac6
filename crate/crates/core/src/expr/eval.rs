//! Double-precision evaluation of expressions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use super::rational::q_to_f64;
use super::{params, Constant, Exponent, Expr, Index, MomentumAtom};
use crate::error::{Error, Result};
use crate::special;

/// Supplies numeric values of a field and its concrete partial derivatives.
pub trait FieldProvider: Send + Sync {
    /// `derivs` lists coordinate directions, e.g. `[0, 2]` for `∂_0∂_2`.
    fn value(&self, name: &str, derivs: &[usize]) -> Option<Complex64>;
}

#[derive(Clone)]
pub struct Bindings {
    pub scalars: HashMap<String, Complex64>,
    pub fields: Option<Arc<dyn FieldProvider>>,
    pub momentum: Option<Vec<Complex64>>,
    pub dim: usize,
}

impl Default for Bindings {
    fn default() -> Self {
        Bindings { scalars: HashMap::new(), fields: None, momentum: None, dim: 4 }
    }
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn with(mut self, name: &str, v: f64) -> Self {
        self.scalars.insert(name.to_string(), Complex64::new(v, 0.0));
        self
    }
    pub fn with_complex(mut self, name: &str, v: Complex64) -> Self {
        self.scalars.insert(name.to_string(), v);
        self
    }
    pub fn with_fields(mut self, f: Arc<dyn FieldProvider>) -> Self {
        self.fields = Some(f);
        self
    }
    pub fn with_momentum(self, p: Vec<f64>) -> Self {
        self.with_complex_momentum(p.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }
    pub fn with_complex_momentum(mut self, p: Vec<Complex64>) -> Self {
        self.dim = p.len();
        self.momentum = Some(p);
        self
    }
}

/// Evaluates `e`. Repeated indices are summed over `0..dim`.
pub fn eval_numeric(e: &Expr, b: &Bindings) -> Result<Complex64> {
    let free = free_indices(e);
    if let Some(i) = free.iter().next() {
        return Err(Error::UnboundSymbol(format!("free index {i}")));
    }
    Ev { b }.eval(e, &BTreeMap::new())
}

/// Evaluates `e` with some indices bound to concrete directions; the rest must be summed.
pub fn eval_numeric_bound(e: &Expr, b: &Bindings, bound: &BTreeMap<Index, usize>) -> Result<Complex64> {
    if let Some(i) = free_indices(e).iter().find(|i| !bound.contains_key(*i)) {
        return Err(Error::UnboundSymbol(format!("free index {i}")));
    }
    Ev { b }.eval(e, bound)
}

type Env = BTreeMap<Index, usize>;

fn count_indices(e: &Expr, out: &mut BTreeMap<Index, usize>) {
    let bump = |i: &Index, out: &mut BTreeMap<Index, usize>| *out.entry(i.clone()).or_default() += 1;
    match e {
        Expr::Field(f) => f.indices.iter().for_each(|i| bump(i, out)),
        Expr::Momentum(MomentumAtom::Component(i)) => bump(i, out),
        Expr::Delta(a, c) => {
            bump(a, out);
            bump(c, out);
        }
        Expr::Product(v) => {
            for c in v {
                for i in free_indices(c) {
                    bump(&i, out);
                }
            }
        }
        Expr::Power(base, ex) => {
            let k = ex.as_integer().filter(|k| *k > 0).unwrap_or(1);
            for i in free_indices(base) {
                for _ in 0..k {
                    bump(&i, out);
                }
            }
        }
        Expr::Sum(v) => {
            for c in v {
                for i in free_indices(c) {
                    out.insert(i, 1);
                }
            }
        }
        Expr::Log(a) | Expr::Func(_, a) => {
            for i in free_indices(a) {
                bump(&i, out);
            }
        }
        _ => {}
    }
}

fn free_indices(e: &Expr) -> BTreeSet<Index> {
    let mut m = BTreeMap::new();
    count_indices(e, &mut m);
    m.into_iter().filter(|(_, c)| *c == 1).map(|(i, _)| i).collect()
}

fn summed_here(e: &Expr) -> Vec<Index> {
    let mut m = BTreeMap::new();
    count_indices(e, &mut m);
    m.into_iter().filter(|(_, c)| *c >= 2).map(|(i, _)| i).collect()
}

struct Ev<'a> {
    b: &'a Bindings,
}

impl Ev<'_> {
    fn eval(&self, e: &Expr, env: &Env) -> Result<Complex64> {
        let sums: Vec<Index> = summed_here(e).into_iter().filter(|i| !env.contains_key(i)).collect();
        if sums.is_empty() {
            return self.eval_node(e, env);
        }
        let dim = self.b.dim;
        let mut total = Complex64::new(0.0, 0.0);
        let mut counter = vec![0usize; sums.len()];
        loop {
            let mut inner = env.clone();
            for (i, v) in sums.iter().zip(&counter) {
                inner.insert(i.clone(), *v);
            }
            total += self.eval_node(e, &inner)?;
            let mut k = 0;
            loop {
                if k == counter.len() {
                    return Ok(total);
                }
                counter[k] += 1;
                if counter[k] < dim {
                    break;
                }
                counter[k] = 0;
                k += 1;
            }
        }
    }

    fn index(&self, i: &Index, env: &Env) -> Result<usize> {
        env.get(i).copied().ok_or_else(|| Error::UnboundSymbol(format!("index {i}")))
    }

    fn scalar(&self, name: &str) -> Result<Complex64> {
        if let Some(v) = self.b.scalars.get(name) {
            return Ok(*v);
        }
        if name == params::D {
            return Ok(Complex64::new(self.b.dim as f64, 0.0));
        }
        Err(Error::UnboundSymbol(name.to_string()))
    }

    fn exponent(&self, x: &Exponent) -> Result<Complex64> {
        let mut v = Complex64::new(q_to_f64(&x.c), 0.0);
        if !x.s.is_zero() {
            v += q_to_f64(&x.s) * self.scalar(params::S)?;
        }
        if !x.d.is_zero() {
            v += q_to_f64(&x.d) * self.scalar(params::D)?;
        }
        Ok(v)
    }

    fn eval_node(&self, e: &Expr, env: &Env) -> Result<Complex64> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(match e {
            Expr::Rational(r) => c(q_to_f64(r)),
            Expr::Constant(Constant::Pi) => c(std::f64::consts::PI),
            Expr::Constant(Constant::E) => c(std::f64::consts::E),
            Expr::Constant(Constant::I) => Complex64::i(),
            Expr::Param(p) => self.scalar(p)?,
            Expr::Field(f) => {
                let fields = self
                    .b
                    .fields
                    .as_ref()
                    .ok_or_else(|| Error::UnboundSymbol(format!("field {}", f.name)))?;
                let mut base = Vec::new();
                for i in &f.indices {
                    base.push(self.index(i, env)?);
                }
                // each Laplacian adds a summed pair of directions
                let lap = f.laplacians as usize;
                let dim = self.b.dim;
                let mut total = c(0.0);
                let combos = dim.pow(lap as u32);
                for k in 0..combos {
                    let mut d = base.clone();
                    let mut r = k;
                    for _ in 0..lap {
                        d.push(r % dim);
                        d.push(r % dim);
                        r /= dim;
                    }
                    d.sort();
                    total += fields
                        .value(&f.name, &d)
                        .ok_or_else(|| Error::UnboundSymbol(format!("field {}", f.name)))?;
                }
                total
            }
            Expr::Momentum(m) => {
                let p = self.b.momentum.as_ref().ok_or_else(|| Error::UnboundSymbol("p".into()))?;
                match m {
                    MomentumAtom::Component(i) => p[self.index(i, env)?],
                    MomentumAtom::Square => p.iter().map(|x| x * x).sum(),
                }
            }
            Expr::Delta(a, b) => {
                if self.index(a, env)? == self.index(b, env)? {
                    c(1.0)
                } else {
                    c(0.0)
                }
            }
            Expr::Gamma(x) => {
                let z = self.exponent(x)?;
                if special::is_gamma_pole(z) {
                    return Err(Error::GammaPole(format!("Γ({x})")));
                }
                special::gamma(z)
            }
            Expr::SinPi(x) => (std::f64::consts::PI * self.exponent(x)?).sin(),
            Expr::Func(name, _) => self.scalar(&format!("{name}[]"))?,
            Expr::Log(a) => self.eval(a, env)?.ln(),
            Expr::Power(base, ex) => {
                if let Some(k) = ex.as_integer() {
                    if k > 1 && !free_indices(base).iter().all(|i| env.contains_key(i)) {
                        return Err(Error::UnboundSymbol("power of indexed base".into()));
                    }
                    let v = self.eval(base, env)?;
                    if k >= 0 {
                        v.powu(k as u32)
                    } else {
                        v.powu((-k) as u32).inv()
                    }
                } else {
                    let v = self.eval(base, env)?;
                    v.powc(self.exponent(ex)?)
                }
            }
            Expr::Product(v) => {
                let mut acc = c(1.0);
                for f in v {
                    acc *= self.eval(f, env)?;
                }
                acc
            }
            Expr::Sum(v) => {
                let mut acc = c(0.0);
                for f in v {
                    acc += self.eval(f, env)?;
                }
                acc
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{qr, simplify};

    #[test]
    fn gamma_ratio_at_six() {
        let e = Expr::gamma(Exponent::affine(qr(-4, 1), qr(1, 1))) / Expr::gamma(Exponent::affine(qr(0, 1), qr(1, 1)));
        let v = eval_numeric(&e, &Bindings::new().with("s", 6.0)).unwrap();
        assert!((v.re - 1.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn power_over_rational_function() {
        let v = Expr::field("V");
        let s = Expr::s();
        let e = v.pow(Exponent::affine(qr(2, 1), qr(-1, 1)))
            / ((s.clone() - Expr::int(1)) * (s - Expr::int(2)));
        struct Const2;
        impl FieldProvider for Const2 {
            fn value(&self, _: &str, d: &[usize]) -> Option<Complex64> {
                Some(Complex64::new(if d.is_empty() { 2.0 } else { 0.0 }, 0.0))
            }
        }
        let b = Bindings::new().with("s", 4.0).with_fields(Arc::new(Const2));
        let v = eval_numeric(&e, &b).unwrap();
        assert!((v.re - 1.0 / 24.0).abs() < 1e-15);
        let w = eval_numeric(&simplify(&e), &b).unwrap();
        assert!((w.re - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn sin_pi_half() {
        let e = Expr::SinPi(Exponent::affine(qr(0, 1), qr(1, 1))) / Expr::pi();
        let v = eval_numeric(&e, &Bindings::new().with("s", 0.5)).unwrap();
        assert!((v.re - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        let e = Expr::gamma(Exponent::affine(qr(-4, 1), qr(1, 1)));
        let r = eval_numeric(&e, &Bindings::new().with("s", 4.0));
        assert!(matches!(r, Err(Error::GammaPole(_))));
        assert!(matches!(eval_numeric(&Expr::param("m"), &Bindings::new()), Err(Error::UnboundSymbol(_))));
    }

    #[test]
    fn contracted_indices_sum() {
        let e = Expr::p("a") * Expr::p("a");
        let b = Bindings::new().with_momentum(vec![1.0, 2.0, 3.0, 4.0]);
        assert!((eval_numeric(&e, &b).unwrap().re - 30.0).abs() < 1e-12);
        assert!((eval_numeric(&Expr::delta("a", "a"), &b).unwrap().re - 4.0).abs() < 1e-12);
    }
}
