//! Canonical normal form.
//!
//! An expression is normalized into a sum of monomials. Each monomial is a
//! sorted map `atom -> exponent` and carries an exact coefficient in
//! `Q(i)(s)`. Powers of sums with non-natural exponents become opaque atoms
//! whose content is itself canonical, so the whole construction recurses.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::{q, qr, Poly, Qi, RatFunc, Q};
use super::{params, Constant, Exponent, Expr, FieldAtom, Index, MomentumAtom};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Const(Constant),
    /// Positive prime (or unfactored integer) raised to a non-integer power.
    Base(BigInt),
    Param(String),
    Field(FieldAtom),
    Momentum(MomentumAtom),
    Delta(Index, Index),
    Gamma(Exponent),
    SinPi(Exponent),
    Func(String, Box<Expr>),
    Log(Box<Expr>),
    Opaque(Box<Expr>),
}

pub(crate) type Mono = BTreeMap<Atom, Exponent>;

#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct Normal {
    pub terms: BTreeMap<Mono, RatFunc>,
}

impl Normal {
    pub fn zero() -> Self {
        Normal::default()
    }
    pub fn constant(c: RatFunc) -> Self {
        let mut n = Normal::zero();
        n.add_raw(Mono::new(), c);
        n
    }
    pub fn one() -> Self {
        Normal::constant(RatFunc::one())
    }
    pub fn atom(a: Atom, e: Exponent) -> Self {
        let mut m = Mono::new();
        m.insert(a, e);
        let mut n = Normal::zero();
        n.insert(m, RatFunc::one());
        n
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn single(&self) -> Option<(&Mono, &RatFunc)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }
    /// Pure coefficient (no atoms); zero counts.
    pub fn as_coefficient(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return Some(RatFunc::zero());
        }
        self.single().and_then(|(m, c)| m.is_empty().then(|| c.clone()))
    }

    fn add_raw(&mut self, m: Mono, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let n = old.add(&c);
                if n.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = n;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Inserts a monomial after bringing it to canonical shape.
    pub fn insert(&mut self, m: Mono, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let finished = finish(m);
        for (fm, fc) in finished.terms {
            self.add_raw(fm, fc.mul(&c));
        }
    }

    pub fn add(&self, o: &Normal) -> Normal {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_raw(m.clone(), c.clone());
        }
        out
    }
    /// `self · o` when `self` is one term holding `o^{-k}` as an opaque atom.
    fn absorb(&self, o: &Normal) -> Option<Normal> {
        if o.terms.len() < 2 {
            return None;
        }
        let (m, c) = self.single()?;
        for (a, e) in m {
            if let Atom::Opaque(x) = a {
                if e.as_integer().is_some_and(|k| k < 0) && to_normal(x) == *o {
                    let mut m2 = m.clone();
                    m2.insert(a.clone(), e.add(&Exponent::int(1)));
                    let mut out = Normal::zero();
                    out.insert(m2, c.clone());
                    return Some(out);
                }
            }
        }
        None
    }
    pub fn scale(&self, k: &RatFunc) -> Normal {
        if k.is_zero() {
            return Normal::zero();
        }
        Normal { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul(k))).collect() }
    }
    pub fn mul(&self, o: &Normal) -> Normal {
        if let Some(n) = self.absorb(o).or_else(|| o.absorb(self)) {
            return n;
        }
        let mut out = Normal::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let mut m = m1.clone();
                for (a, e) in m2 {
                    merge_atom(&mut m, a.clone(), e.clone());
                }
                out.insert(m, c1.mul(c2));
            }
        }
        out
    }
}

fn merge_atom(m: &mut Mono, a: Atom, e: Exponent) {
    match m.get_mut(&a) {
        Some(old) => {
            *old = old.add(&e);
        }
        None => {
            m.insert(a, e);
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points

pub fn simplify(e: &Expr) -> Expr {
    to_expr(&to_normal(e))
}

pub fn is_zero(e: &Expr) -> bool {
    to_normal(e).is_zero()
}

/// Exact rational value, if the expression is a plain rational number.
pub fn as_rational(e: &Expr) -> Option<Q> {
    let n = to_normal(e);
    let c = n.as_coefficient()?.as_constant()?;
    c.is_real().then_some(c.re)
}

/// Canonical terms as `(coefficient in s, monomial with unit coefficient)`.
pub fn expand_terms(e: &Expr) -> Vec<(RatFunc, Expr)> {
    to_normal(e)
        .terms
        .into_iter()
        .map(|(m, c)| (c, mono_to_expr(&m)))
        .collect()
}

/// Splits an expression whose terms all share one monomial into `(coefficient, monomial)`.
pub fn split_s_coefficient(e: &Expr) -> Option<(RatFunc, Expr)> {
    let n = to_normal(e);
    let (m, c) = n.single()?;
    Some((c.clone(), mono_to_expr(m)))
}

/// Coefficient of `s` when `e` is a polynomial of degree ≤ 1 in `s` with rational coefficients.
pub fn coefficient_of_s(e: &Expr) -> Option<Q> {
    affine_in_s_d(e).filter(|x| x.d.is_zero()).map(|x| x.s)
}

pub(crate) fn affine_in_s_d(e: &Expr) -> Option<Exponent> {
    let n = to_normal(e);
    let mut out = Exponent::int(0);
    for (m, c) in &n.terms {
        if m.is_empty() {
            if !c.den().degree().is_some_and(|d| d == 0) {
                return None;
            }
            let cs = c.num().coeffs();
            if cs.len() > 2 || cs.iter().any(|x| !x.is_real()) {
                return None;
            }
            let k = c.den().lead().re;
            out.c = cs.first().map(|x| &x.re / &k).unwrap_or_else(Q::zero);
            out.s = cs.get(1).map(|x| &x.re / &k).unwrap_or_else(Q::zero);
        } else if m.len() == 1 && m.get(&Atom::Param(params::D.into())).is_some_and(|x| x.is_one()) {
            let k = c.as_constant().filter(|x| x.is_real())?;
            out.d = k.re;
        } else {
            return None;
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Expr -> Normal

pub(crate) fn to_normal(e: &Expr) -> Normal {
    match e {
        Expr::Rational(r) => Normal::constant(RatFunc::rational(r.clone())),
        Expr::Constant(Constant::I) => Normal::constant(RatFunc::constant(Qi::i())),
        Expr::Constant(c) => Normal::atom(Atom::Const(*c), Exponent::int(1)),
        Expr::Param(p) if p == params::S => Normal::constant(RatFunc::s()),
        Expr::Param(p) => Normal::atom(Atom::Param(p.clone()), Exponent::int(1)),
        Expr::Field(f) => Normal::atom(Atom::Field(f.clone().normalized()), Exponent::int(1)),
        Expr::Momentum(m) => Normal::atom(Atom::Momentum(m.clone()), Exponent::int(1)),
        Expr::Delta(a, b) => {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            Normal::atom(Atom::Delta(a.clone(), b.clone()), Exponent::int(1))
        }
        Expr::Gamma(arg) => gamma_normal(arg),
        Expr::SinPi(arg) => sinpi_normal(arg),
        Expr::Func(n, a) => Normal::atom(Atom::Func(n.clone(), Box::new(simplify(a))), Exponent::int(1)),
        Expr::Log(x) => log_normal(&to_normal(x)),
        Expr::Power(b, ex) => pow_normal(&to_normal(b), ex),
        Expr::Product(v) => product_normal(v),
        Expr::Sum(v) => v.iter().fold(Normal::zero(), |acc, c| acc.add(&to_normal(c))),
    }
}

/// Multiplies factors, first pooling exponents of equal multi-term bases so
/// that `a^{-3}·a^2` cancels before any positive power is expanded.
fn product_normal(v: &[Expr]) -> Normal {
    fn flatten<'a>(v: &'a [Expr], out: &mut Vec<&'a Expr>) {
        for f in v {
            match f {
                Expr::Product(w) => flatten(w, out),
                other => out.push(other),
            }
        }
    }
    let mut flat = Vec::new();
    flatten(v, &mut flat);
    let mut pooled: Vec<(Normal, Exponent)> = Vec::new();
    let mut acc = Normal::one();
    for f in flat {
        let (base, ex) = match f {
            Expr::Power(b, e) => (&**b, e.clone()),
            other => (other, Exponent::int(1)),
        };
        if !matches!(base, Expr::Sum(_)) {
            acc = acc.mul(&to_normal(f));
            continue;
        }
        let nb = to_normal(base);
        if nb.terms.len() < 2 {
            acc = acc.mul(&pow_normal(&nb, &ex));
            continue;
        }
        match pooled.iter_mut().find(|(b, _)| *b == nb) {
            Some((_, e)) => *e = e.add(&ex),
            None => pooled.push((nb, ex)),
        }
    }
    for (b, e) in pooled {
        acc = acc.mul(&pow_normal(&b, &e));
    }
    acc
}

fn gamma_normal(arg: &Exponent) -> Normal {
    if !arg.is_constant() {
        return Normal::atom(Atom::Gamma(arg.clone()), Exponent::int(1));
    }
    let c = &arg.c;
    if c.is_integer() {
        if c.is_positive() {
            let n = c.to_integer().to_i64().unwrap_or(i64::MAX);
            if n <= 200 {
                let mut f = Q::one();
                for k in 1..n {
                    f *= q(k);
                }
                return Normal::constant(RatFunc::rational(f));
            }
        }
        // pole or huge argument: stays symbolic
        return Normal::atom(Atom::Gamma(arg.clone()), Exponent::int(1));
    }
    if (c - qr(1, 2)).is_integer() {
        // Γ(n + 1/2) = rational · √π
        let n = (c - qr(1, 2)).to_integer().to_i64().unwrap_or(0);
        let mut r = Q::one();
        if n >= 0 {
            for k in 0..n {
                r *= qr(2 * k + 1, 2);
            }
        } else {
            for k in (n..0).rev() {
                r /= qr(2 * k + 1, 2);
            }
        }
        return Normal::atom(Atom::Const(Constant::Pi), Exponent::constant(qr(1, 2)))
            .scale(&RatFunc::rational(r));
    }
    Normal::atom(Atom::Gamma(arg.clone()), Exponent::int(1))
}

fn sinpi_normal(arg: &Exponent) -> Normal {
    if arg.is_constant() {
        let c = &arg.c;
        if c.is_integer() {
            return Normal::zero();
        }
        let h = c - qr(1, 2);
        if h.is_integer() {
            let n = h.to_integer();
            let sign = if n.is_even() { 1 } else { -1 };
            return Normal::constant(RatFunc::rational(q(sign)));
        }
    }
    Normal::atom(Atom::SinPi(arg.clone()), Exponent::int(1))
}

fn exponent_normal(e: &Exponent) -> Normal {
    let mut n = Normal::constant(RatFunc::rational(e.c.clone()).add(&RatFunc::s().scale(&Qi::real(e.s.clone()))));
    if !e.d.is_zero() {
        n = n.add(&Normal::atom(Atom::Param(params::D.into()), Exponent::int(1)).scale(&RatFunc::rational(e.d.clone())));
    }
    n
}

/// Prime factorization of small positive integers; larger values stay whole.
fn factor_positive(n: &BigInt) -> Vec<(BigInt, i64)> {
    let mut out = Vec::new();
    match n.to_u64() {
        Some(mut v) if v > 1 => {
            let mut p = 2u64;
            while p * p <= v && p < 1_000_000 {
                let mut k = 0;
                while v % p == 0 {
                    v /= p;
                    k += 1;
                }
                if k > 0 {
                    out.push((BigInt::from(p), k));
                }
                p += 1;
            }
            if v > 1 {
                out.push((BigInt::from(v), 1));
            }
        }
        Some(_) => {}
        None => out.push((n.clone(), 1)),
    }
    out
}

/// `r^e` for positive rational `r` and non-integer exponent, as base atoms.
fn positive_rational_power(r: &Q, e: &Exponent) -> Normal {
    let mut n = Normal::one();
    for (p, k) in factor_positive(r.numer()) {
        n = n.mul(&Normal::atom(Atom::Base(p), e.scale(&q(k))));
    }
    for (p, k) in factor_positive(r.denom()) {
        n = n.mul(&Normal::atom(Atom::Base(p), e.scale(&q(-k))));
    }
    n
}

fn pow_normal(b: &Normal, e: &Exponent) -> Normal {
    if e.is_zero() {
        return Normal::one();
    }
    if let Some(k) = e.as_integer() {
        if k >= 0 {
            let mut acc = Normal::one();
            for _ in 0..k {
                acc = acc.mul(b);
            }
            return acc;
        }
    }
    if b.is_zero() {
        return Normal::atom(Atom::Opaque(Box::new(Expr::zero())), e.clone());
    }
    if let Some((m, c)) = b.single() {
        let mut out = coefficient_power(c, e);
        let mut mono = Mono::new();
        for (a, ae) in m {
            match ae.mul(e) {
                Some(ne) => merge_atom(&mut mono, a.clone(), ne),
                None => {
                    let inner = Expr::Power(Box::new(atom_to_expr(a)), ae.clone());
                    merge_atom(&mut mono, Atom::Opaque(Box::new(inner)), e.clone());
                }
            }
        }
        let mut atoms = Normal::zero();
        atoms.insert(mono, RatFunc::one());
        out = out.mul(&atoms);
        return out;
    }
    // multi-term base: pull out the monomial shared by every term
    let mut common: Option<Mono> = None;
    for m in b.terms.keys() {
        let next: Mono = m
            .iter()
            .filter(|(_, ae)| ae.is_constant())
            .filter_map(|(a, ae)| match &common {
                None => Some((a.clone(), ae.clone())),
                Some(c) => c.get(a).map(|ce| (a.clone(), if ce.c < ae.c { ce.clone() } else { ae.clone() })),
            })
            .collect();
        common = Some(next);
    }
    let common = common.unwrap_or_default();
    if !common.is_empty() {
        let mut inv = Normal::zero();
        inv.insert(common.iter().map(|(a, ae)| (a.clone(), ae.neg())).collect(), RatFunc::one());
        let mut fac = Normal::zero();
        fac.insert(common, RatFunc::one());
        return pow_normal(&fac, e).mul(&pow_normal(&b.mul(&inv), e));
    }
    let (_, lead) = b.terms.iter().next().unwrap();
    let integer = e.as_integer().is_some();
    let content = lead.as_constant().filter(|c| {
        !c.is_zero() && (integer || (c.is_real() && c.re.is_positive()))
    });
    let (content_pow, prim) = match content {
        Some(c) if !c.is_one() => {
            let inv = RatFunc::constant(c.inv());
            (coefficient_power(&RatFunc::constant(c), e), b.scale(&inv))
        }
        _ => (Normal::one(), b.clone()),
    };
    content_pow.mul(&Normal::atom(Atom::Opaque(Box::new(to_expr(&prim))), e.clone()))
}

fn coefficient_power(c: &RatFunc, e: &Exponent) -> Normal {
    if c.is_one() {
        return Normal::one();
    }
    if let Some(k) = e.as_integer() {
        return Normal::constant(c.powi(k));
    }
    if let Some(k) = c.as_constant() {
        if k.is_real() && k.re.is_positive() {
            return positive_rational_power(&k.re, e);
        }
    }
    Normal::atom(Atom::Opaque(Box::new(coeff_to_expr(c))), e.clone())
}

fn log_normal(x: &Normal) -> Normal {
    if let Some((m, c)) = x.single() {
        let mut out = Normal::zero();
        if !c.is_one() {
            match c.as_constant() {
                Some(k) if k.is_real() && k.re.is_positive() => {
                    for (p, e) in factor_positive(k.re.numer()) {
                        out = out.add(&Normal::atom(Atom::Log(Box::new(Expr::Rational(Q::from_integer(p)))), Exponent::int(1)).scale(&RatFunc::rational(q(e))));
                    }
                    for (p, e) in factor_positive(k.re.denom()) {
                        out = out.add(&Normal::atom(Atom::Log(Box::new(Expr::Rational(Q::from_integer(p)))), Exponent::int(1)).scale(&RatFunc::rational(q(-e))));
                    }
                }
                _ => {
                    out = out.add(&Normal::atom(Atom::Log(Box::new(coeff_to_expr(c))), Exponent::int(1)));
                }
            }
        }
        for (a, ae) in m {
            let term = match a {
                Atom::Const(Constant::E) => exponent_normal(ae),
                Atom::Base(p) => exponent_normal(ae).mul(&Normal::atom(
                    Atom::Log(Box::new(Expr::Rational(Q::from_integer(p.clone())))),
                    Exponent::int(1),
                )),
                Atom::Opaque(inner) => exponent_normal(ae)
                    .mul(&Normal::atom(Atom::Log(inner.clone()), Exponent::int(1))),
                other => exponent_normal(ae)
                    .mul(&Normal::atom(Atom::Log(Box::new(atom_to_expr(other))), Exponent::int(1))),
            };
            out = out.add(&term);
        }
        return out;
    }
    if x.is_zero() {
        return Normal::atom(Atom::Log(Box::new(Expr::zero())), Exponent::int(1));
    }
    let (_, lead) = x.terms.iter().next().unwrap();
    match lead.as_constant().filter(|c| c.is_real() && c.re.is_positive() && !c.is_one()) {
        Some(c) => {
            let prim = x.scale(&RatFunc::constant(c.inv()));
            log_normal(&Normal::constant(RatFunc::constant(c)))
                .add(&Normal::atom(Atom::Log(Box::new(to_expr(&prim))), Exponent::int(1)))
        }
        None => Normal::atom(Atom::Log(Box::new(to_expr(x))), Exponent::int(1)),
    }
}

// ---------------------------------------------------------------------------
// Monomial finishing: index contraction, dummy renaming, gamma ratios

fn atom_indices(a: &Atom) -> Vec<Index> {
    match a {
        Atom::Field(f) => f.indices.clone(),
        Atom::Momentum(MomentumAtom::Component(i)) => vec![i.clone()],
        Atom::Delta(x, y) => vec![x.clone(), y.clone()],
        _ => vec![],
    }
}

fn atom_rename(a: &Atom, f: &impl Fn(&str) -> String) -> Atom {
    match a {
        Atom::Field(fa) => Atom::Field(
            FieldAtom {
                name: fa.name.clone(),
                indices: fa.indices.iter().map(|i| f(i)).collect(),
                laplacians: fa.laplacians,
            }
            .normalized(),
        ),
        Atom::Momentum(MomentumAtom::Component(i)) => Atom::Momentum(MomentumAtom::Component(f(i))),
        Atom::Delta(x, y) => {
            let (x, y) = (f(x), f(y));
            if x <= y {
                Atom::Delta(x, y)
            } else {
                Atom::Delta(y, x)
            }
        }
        other => other.clone(),
    }
}

fn finish(mono: Mono) -> Normal {
    let mut rigid = Mono::new();
    let mut items: Vec<Atom> = Vec::new();
    let mut extra = Normal::one();
    let mut coeff = RatFunc::one();
    for (a, e) in mono {
        if e.is_zero() {
            continue;
        }
        match (&a, e.as_integer()) {
            (Atom::Base(p), Some(k)) => {
                coeff = coeff.mul(&RatFunc::rational(Q::from_integer(p.clone())).powi(k));
            }
            (Atom::Opaque(inner), Some(k)) if k > 0 => {
                extra = extra.mul(&pow_normal(&to_normal(inner), &Exponent::int(k)));
            }
            (_, Some(k)) if k > 0 && !atom_indices(&a).is_empty() => {
                for _ in 0..k {
                    items.push(a.clone());
                }
            }
            _ => {
                merge_atom(&mut rigid, a, e);
            }
        }
    }
    let mut d_pow = 0i64;
    contract(&mut items, &mut d_pow);
    let items = rename_dummies(items);
    let mut m = rigid;
    for a in items {
        merge_atom(&mut m, a, Exponent::int(1));
    }
    if d_pow != 0 {
        merge_atom(&mut m, Atom::Param(params::D.into()), Exponent::int(d_pow));
    }
    m.retain(|_, e| !e.is_zero());
    let (gcoeff, gextra) = fold_gamma_ratios(&mut m);
    let mut out = Normal::zero();
    out.add_raw(m, coeff.mul(&gcoeff));
    let one = Normal::one();
    for x in [extra, gextra] {
        if x != one {
            out = out.mul(&x);
        }
    }
    out
}

fn contract(items: &mut Vec<Atom>, d_pow: &mut i64) {
    loop {
        let mut changed = false;
        'outer: for i in 0..items.len() {
            if let Atom::Delta(a, b) = items[i].clone() {
                if a == b {
                    items.remove(i);
                    *d_pow += 1;
                    changed = true;
                    break 'outer;
                }
                for (from, to) in [(&b, &a), (&a, &b)] {
                    if let Some(j) = (0..items.len()).find(|&j| j != i && atom_indices(&items[j]).contains(from)) {
                        let renamed = atom_rename(&items[j], &|x: &str| if x == from { to.clone() } else { x.to_string() });
                        items[j] = renamed;
                        items.remove(i);
                        changed = true;
                        break 'outer;
                    }
                }
            }
        }
        if !changed {
            'pairs: for i in 0..items.len() {
                if let Atom::Momentum(MomentumAtom::Component(a)) = &items[i] {
                    for j in (i + 1)..items.len() {
                        if items[j] == items[i] {
                            let _ = a;
                            items.remove(j);
                            items[i] = Atom::Momentum(MomentumAtom::Square);
                            changed = true;
                            break 'pairs;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn rename_dummies(mut items: Vec<Atom>) -> Vec<Atom> {
    let mut counts: BTreeMap<Index, usize> = BTreeMap::new();
    for a in &items {
        for i in atom_indices(a) {
            *counts.entry(i).or_default() += 1;
        }
    }
    let dummies: BTreeSet<Index> = counts.into_iter().filter(|(_, c)| *c == 2).map(|(i, _)| i).collect();
    if dummies.is_empty() {
        return items;
    }
    let mask = |a: &Atom| atom_rename(a, &|x: &str| if dummies.contains(x) { "#".to_string() } else { x.to_string() });
    let mut keyed: Vec<(Atom, Atom)> = items.drain(..).map(|a| (mask(&a), a)).collect();
    keyed.sort();
    let mut mapping: BTreeMap<Index, Index> = BTreeMap::new();
    for (pos, (_, a)) in keyed.iter().enumerate() {
        let mut fresh: Vec<Index> = atom_indices(a)
            .into_iter()
            .filter(|i| dummies.contains(i) && !mapping.contains_key(i))
            .collect();
        fresh.dedup();
        // order fresh dummies of one atom by their partner atom
        fresh.sort_by_key(|i| {
            let partner = keyed
                .iter()
                .enumerate()
                .find(|(k, (_, b))| *k != pos && atom_indices(b).contains(i))
                .map(|(_, (m, _))| m.clone());
            (partner, i.clone())
        });
        for i in fresh {
            let name = format!("#{}", mapping.len() + 1);
            mapping.insert(i, name);
        }
    }
    keyed
        .into_iter()
        .map(|(_, a)| atom_rename(&a, &|x: &str| mapping.get(x).cloned().unwrap_or_else(|| x.to_string())))
        .collect()
}

/// Collapses gamma functions whose arguments differ by integers onto one
/// representative, returning the rational-function and polynomial factors.
fn fold_gamma_ratios(m: &mut Mono) -> (RatFunc, Normal) {
    let mut groups: BTreeMap<(Q, Q, Q), Vec<(Exponent, i64)>> = BTreeMap::new();
    for (a, e) in m.iter() {
        if let (Atom::Gamma(arg), Some(k)) = (a, e.as_integer()) {
            let frac = &arg.c - Q::from_integer(arg.c.floor().to_integer());
            groups.entry((arg.s.clone(), arg.d.clone(), frac)).or_default().push((arg.clone(), k));
        }
    }
    let mut coeff = RatFunc::one();
    let mut extra = Normal::one();
    for (_, members) in groups {
        if members.len() < 2 {
            continue;
        }
        let base = members.iter().map(|(a, _)| a.c.clone()).min().unwrap();
        let total: i64 = members.iter().map(|(_, k)| k).sum();
        let mut x0 = members[0].0.clone();
        x0.c = base.clone();
        for (arg, k) in &members {
            m.remove(&Atom::Gamma(arg.clone()));
            let shift = (&arg.c - &base).to_integer().to_i64().unwrap_or(0);
            for j in 0..shift {
                let mut lin = x0.clone();
                lin.c = &lin.c + q(j);
                if lin.d.is_zero() {
                    let f = RatFunc::rational(lin.c.clone()).add(&RatFunc::s().scale(&Qi::real(lin.s.clone())));
                    coeff = coeff.mul(&f.powi(*k));
                } else {
                    extra = extra.mul(&pow_normal(&to_normal(&lin.to_expr()), &Exponent::int(*k)));
                }
            }
        }
        if total != 0 {
            merge_atom(m, Atom::Gamma(x0), Exponent::int(total));
        }
    }
    (coeff, extra)
}

// ---------------------------------------------------------------------------
// Normal -> Expr

pub(crate) fn atom_to_expr(a: &Atom) -> Expr {
    match a {
        Atom::Const(c) => Expr::Constant(*c),
        Atom::Base(p) => Expr::Rational(Q::from_integer(p.clone())),
        Atom::Param(p) => Expr::Param(p.clone()),
        Atom::Field(f) => Expr::Field(f.clone()),
        Atom::Momentum(m) => Expr::Momentum(m.clone()),
        Atom::Delta(a, b) => Expr::Delta(a.clone(), b.clone()),
        Atom::Gamma(x) => Expr::Gamma(x.clone()),
        Atom::SinPi(x) => Expr::SinPi(x.clone()),
        Atom::Func(n, x) => Expr::Func(n.clone(), x.clone()),
        Atom::Log(x) => Expr::Log(x.clone()),
        Atom::Opaque(x) => (**x).clone(),
    }
}

fn qi_to_expr(c: &Qi) -> Expr {
    let im_part = |im: &Q| {
        if im.is_one() {
            Expr::Constant(Constant::I)
        } else {
            Expr::Product(vec![Expr::Rational(im.clone()), Expr::Constant(Constant::I)])
        }
    };
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => Expr::Rational(c.re.clone()),
        (true, false) => im_part(&c.im),
        _ => Expr::Sum(vec![Expr::Rational(c.re.clone()), im_part(&c.im)]),
    }
}

fn poly_to_expr(p: &Poly) -> Expr {
    let mut parts = Vec::new();
    for (k, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let sk = match k {
            0 => None,
            1 => Some(Expr::s()),
            _ => Some(Expr::Power(Box::new(Expr::s()), Exponent::int(k as i64))),
        };
        parts.push(match sk {
            None => qi_to_expr(c),
            Some(sk) if c.is_one() => sk,
            Some(sk) => Expr::Product(vec![qi_to_expr(c), sk]),
        });
    }
    match parts.len() {
        0 => Expr::zero(),
        1 => parts.pop().unwrap(),
        _ => Expr::Sum(parts),
    }
}

pub fn coeff_to_expr(c: &RatFunc) -> Expr {
    if let Some(k) = c.as_constant() {
        return qi_to_expr(&k);
    }
    let num = poly_to_expr(c.num());
    if c.den().degree() == Some(0) {
        return num;
    }
    let den = Expr::Power(Box::new(poly_to_expr(c.den())), Exponent::int(-1));
    if matches!(&num, Expr::Rational(r) if r.is_one()) {
        den
    } else {
        Expr::Product(vec![num, den])
    }
}

fn mono_to_expr(m: &Mono) -> Expr {
    let mut factors: Vec<Expr> = m
        .iter()
        .map(|(a, e)| {
            let base = atom_to_expr(a);
            if e.is_one() {
                base
            } else {
                Expr::Power(Box::new(base), e.clone())
            }
        })
        .collect();
    match factors.len() {
        0 => Expr::one(),
        1 => factors.pop().unwrap(),
        _ => Expr::Product(factors),
    }
}

pub(crate) fn to_expr(n: &Normal) -> Expr {
    let mut terms: Vec<Expr> = n
        .terms
        .iter()
        .map(|(m, c)| {
            if m.is_empty() {
                return coeff_to_expr(c);
            }
            let body = mono_to_expr(m);
            if c.is_one() {
                return body;
            }
            let mut f = vec![coeff_to_expr(c)];
            match body {
                Expr::Product(v) => f.extend(v),
                other => f.push(other),
            }
            Expr::Product(f)
        })
        .collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::Sum(terms),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_collapse() {
        let v = Expr::field("V");
        let e = (v.clone() + Expr::zero()) * Expr::one();
        assert_eq!(simplify(&e), v);
    }

    #[test]
    fn like_factors_collect_into_power() {
        let v = Expr::field("V");
        assert_eq!(simplify(&(v.clone() * v.clone())), v.powi(2));
    }

    #[test]
    fn gamma_ratio_becomes_rising_factorial() {
        let r = Expr::gamma(Exponent::affine(q(3), q(1))) / Expr::gamma(Exponent::affine(q(0), q(1)));
        let s = Expr::s();
        let expect = s.clone() * (s.clone() + Expr::int(1)) * (s + Expr::int(2));
        assert_eq!(simplify(&r), simplify(&expect));
    }

    #[test]
    fn half_integer_gamma_is_rational_times_sqrt_pi() {
        // Γ(-3/2) = 4√π/3
        let g = simplify(&Expr::gamma(Exponent::constant(qr(-3, 2))));
        let expect = simplify(&(Expr::rat(4, 3) * Expr::pi().pow(Exponent::constant(qr(1, 2)))));
        assert_eq!(g, expect);
    }

    #[test]
    fn delta_contracts_and_laplacian_folds() {
        let e = Expr::delta("a", "b") * Expr::field_d("V", &["a", "b"]);
        assert_eq!(simplify(&e), Expr::laplacian("V"));
        assert_eq!(simplify(&Expr::delta("a", "a")), Expr::d());
        let pp = Expr::p("a") * Expr::p("a");
        assert_eq!(simplify(&pp), Expr::p2());
    }

    #[test]
    fn dummy_names_are_canonical() {
        let a = Expr::field_d("V", &["x"]) * Expr::field_d("V", &["x"]);
        let b = Expr::field_d("V", &["y"]) * Expr::field_d("V", &["y"]);
        assert_eq!(simplify(&a), simplify(&b));
        let c = Expr::p("u") * Expr::p("w") * Expr::field_d("V", &["u", "w"]);
        let d = Expr::p("k") * Expr::p("j") * Expr::field_d("V", &["j", "k"]);
        assert_eq!(simplify(&c), simplify(&d));
    }

    #[test]
    fn log_expands_over_products() {
        let v = Expr::field("V");
        let e = Expr::log(Expr::e().pow(Exponent::constant(qr(-3, 2))) * v.clone() * v.clone());
        let expect = Expr::rat(-3, 2) + Expr::int(2) * Expr::log(v);
        assert_eq!(simplify(&e), simplify(&expect));
    }

    #[test]
    fn opaque_power_cancels() {
        let a = Expr::lambda() + Expr::p2() + Expr::field("V");
        let e = a.clone().powi(-3) * a.clone().powi(2) * a.clone();
        assert_eq!(simplify(&e), Expr::one());
    }

    #[test]
    fn rational_functions_in_s_combine() {
        let s = Expr::s();
        let e = (s.clone() - Expr::int(1)).recip() - (s.clone() - Expr::int(2)).recip();
        let expect = -((s.clone() - Expr::int(1)) * (s - Expr::int(2))).recip();
        assert_eq!(simplify(&e), simplify(&expect));
    }
}
