//! Phase-space symbols, generalized Poisson brackets and the Moyal product.
//!
//! A [`Symbol`] is a sum of [`NCWord`]s: an ordered product of genuinely
//! noncommuting factors with a commuting [`Expr`] coefficient. Resolvent-type
//! factors `(λ + base)^k` are built on one of a few fixed bases, each a
//! function of the momentum slash `S = p·γ` plus the background field.

use std::collections::BTreeMap;

use crate::clifford::{self, GammaFactor, GammaWord};
use crate::error::{Error, Result};
use crate::expr::{diff_p, diff_x, params, simplify, Exponent, Expr, Index, MomentumAtom};

pub const BOSON_FIELD: &str = "V";
pub const DIRAC_FIELD: &str = "phi";
pub const MAX_BRACKET_ORDER: usize = 4;

/// Base of a resolvent or power factor. All bases except `Boson` are
/// functions of `S`; `Phi` and `Boson` are scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseKind {
    /// `p² + V`
    Boson,
    /// `φ`
    Phi,
    /// `φ + iS`
    A,
    /// `φ - iS`
    AStar,
    /// `φ + (2t-1) iS`
    Feynman,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Base {
    pub kind: BaseKind,
    /// Shifted by `+iε`.
    pub eps: bool,
}

impl Base {
    pub const BOSON: Base = Base { kind: BaseKind::Boson, eps: false };
    pub const PHI: Base = Base { kind: BaseKind::Phi, eps: false };
    pub const A: Base = Base { kind: BaseKind::A, eps: false };
    pub const A_STAR: Base = Base { kind: BaseKind::AStar, eps: false };
    pub const FEYNMAN: Base = Base { kind: BaseKind::Feynman, eps: false };

    pub fn with_eps(self) -> Base {
        Base { eps: true, ..self }
    }
    pub fn without_eps(self) -> Base {
        Base { eps: false, ..self }
    }
    pub fn is_scalar(&self) -> bool {
        matches!(self.kind, BaseKind::Boson | BaseKind::Phi)
    }
    pub fn field(&self) -> &'static str {
        match self.kind {
            BaseKind::Boson => BOSON_FIELD,
            _ => DIRAC_FIELD,
        }
    }
    /// Coefficient `c` of `iS` in the base.
    pub fn slash_coeff(&self) -> Expr {
        match self.kind {
            BaseKind::Boson | BaseKind::Phi => Expr::zero(),
            BaseKind::A => Expr::one(),
            BaseKind::AStar => Expr::int(-1),
            BaseKind::Feynman => Expr::int(2) * Expr::param(params::T) - Expr::one(),
        }
    }
    /// Scalar part of the base.
    pub fn scalar_part(&self) -> Expr {
        let f = match self.kind {
            BaseKind::Boson => Expr::p2() + Expr::field(BOSON_FIELD),
            _ => Expr::field(DIRAC_FIELD),
        };
        if self.eps {
            f + Expr::i() * Expr::param(params::EPS)
        } else {
            f
        }
    }
    /// The base as a commuting expression, valid only for scalar bases.
    pub fn scalar_expr(&self) -> Option<Expr> {
        self.is_scalar().then(|| self.scalar_part())
    }
    pub fn name(&self) -> String {
        let n = match self.kind {
            BaseKind::Boson => "a",
            BaseKind::Phi => "B",
            BaseKind::A => "A",
            BaseKind::AStar => "A*",
            BaseKind::Feynman => "F_t",
        };
        if self.eps {
            format!("{n}_eps")
        } else {
            n.to_string()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    Gamma(Index),
    /// `S = p·γ`
    Slash,
    /// `(λ + base)^power`
    Res { base: Base, power: i64 },
    /// `base^exp`, produced by the spectral integral.
    Pow { base: Base, exp: Exponent },
}

impl Factor {
    pub fn res(base: Base, power: i64) -> Factor {
        Factor::Res { base, power }
    }
    pub fn gamma(i: &str) -> Factor {
        Factor::Gamma(i.to_string())
    }
    /// True for factors that are functions of `S` only (they commute with each other).
    pub fn is_slash_function(&self) -> bool {
        !matches!(self, Factor::Gamma(_))
    }
    fn base(&self) -> Option<Base> {
        match self {
            Factor::Res { base, .. } | Factor::Pow { base, .. } => Some(*base),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NCWord {
    pub coeff: Expr,
    pub factors: Vec<Factor>,
}

impl NCWord {
    pub fn new(coeff: Expr, factors: Vec<Factor>) -> Self {
        NCWord { coeff, factors }
    }
    pub fn scalar(coeff: Expr) -> Self {
        NCWord::new(coeff, vec![])
    }
    pub fn mul(&self, o: &NCWord) -> NCWord {
        let mut f = self.factors.clone();
        f.extend(o.factors.iter().cloned());
        NCWord::new(self.coeff.clone() * o.coeff.clone(), f)
    }
    pub fn scale(&self, k: &Expr) -> NCWord {
        NCWord::new(k.clone() * self.coeff.clone(), self.factors.clone())
    }
    pub fn gamma_count(&self) -> usize {
        self.factors.iter().filter(|f| matches!(f, Factor::Gamma(_) | Factor::Slash)).count()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Symbol {
    pub words: Vec<NCWord>,
}

impl Symbol {
    pub fn zero() -> Self {
        Symbol::default()
    }
    pub fn one() -> Self {
        Symbol::from_word(NCWord::scalar(Expr::one()))
    }
    pub fn from_word(w: NCWord) -> Self {
        Symbol { words: vec![w] }
    }
    pub fn scalar(e: Expr) -> Self {
        Symbol::from_word(NCWord::scalar(e))
    }
    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }
    pub fn add(&self, o: &Symbol) -> Symbol {
        let mut w = self.words.clone();
        w.extend(o.words.iter().cloned());
        Symbol { words: w }
    }
    pub fn neg(&self) -> Symbol {
        self.scale(&Expr::int(-1))
    }
    pub fn sub(&self, o: &Symbol) -> Symbol {
        self.add(&o.neg())
    }
    pub fn scale(&self, k: &Expr) -> Symbol {
        Symbol { words: self.words.iter().map(|w| w.scale(k)).collect() }
    }
    /// Pointwise (order-preserving) product.
    pub fn mul(&self, o: &Symbol) -> Symbol {
        let mut out = Vec::new();
        for a in &self.words {
            for b in &o.words {
                out.push(a.mul(b));
            }
        }
        Symbol { words: out }
    }
    pub fn canonical(&self) -> Symbol {
        canonicalize(&self.words)
    }
}

// ---------------------------------------------------------------------------
// Derivatives

fn factor_dx(f: &Factor, mu: &str) -> Vec<(Expr, Vec<Factor>)> {
    match f {
        Factor::Gamma(_) | Factor::Slash => vec![],
        Factor::Res { base, power } => {
            let d = Expr::field_d(base.field(), &[mu]);
            vec![(Expr::int(*power) * d, nonzero_res(*base, power - 1))]
        }
        Factor::Pow { base, exp } => {
            let d = Expr::field_d(base.field(), &[mu]);
            vec![(exp.to_expr() * d, vec![Factor::Pow { base: *base, exp: exp.sub(&Exponent::int(1)) }])]
        }
    }
}

fn nonzero_res(base: Base, power: i64) -> Vec<Factor> {
    if power == 0 {
        vec![]
    } else {
        vec![Factor::Res { base, power }]
    }
}

fn factor_dp(f: &Factor, mu: &str) -> Vec<(Expr, Vec<Factor>)> {
    match f {
        Factor::Gamma(_) => vec![],
        Factor::Slash => vec![(Expr::one(), vec![Factor::Gamma(mu.to_string())])],
        Factor::Res { base, power } => match base.kind {
            BaseKind::Phi => vec![],
            BaseKind::Boson => vec![(Expr::int(2 * power) * Expr::p(mu), nonzero_res(*base, power - 1))],
            _ => {
                // ∂_p X = c·iγ^μ, expanded by the noncommutative Leibniz rule
                let c = base.slash_coeff() * Expr::i();
                let g = Factor::Gamma(mu.to_string());
                let k = *power;
                let mut out = Vec::new();
                if k > 0 {
                    for j in 0..k {
                        let mut w = nonzero_res(*base, j);
                        w.push(g.clone());
                        w.extend(nonzero_res(*base, k - 1 - j));
                        out.push((c.clone(), w));
                    }
                } else {
                    let n = -k;
                    for j in 1..=n {
                        let mut w = nonzero_res(*base, -j);
                        w.push(g.clone());
                        w.extend(nonzero_res(*base, -(n - j + 1)));
                        out.push((-c.clone(), w));
                    }
                }
                out
            }
        },
        Factor::Pow { base, exp } => match base.kind {
            BaseKind::Phi => vec![],
            BaseKind::Boson => vec![(
                Expr::int(2) * exp.to_expr() * Expr::p(mu),
                vec![Factor::Pow { base: *base, exp: exp.sub(&Exponent::int(1)) }],
            )],
            _ => panic!("momentum derivative of a complex power of a matrix symbol is not supported"),
        },
    }
}

fn word_derivative(w: &NCWord, mu: &str, x: bool) -> Vec<NCWord> {
    let dc = if x { diff_x(&w.coeff, mu) } else { diff_p(&w.coeff, mu) };
    let mut out = Vec::new();
    if dc != Expr::zero() {
        out.push(NCWord::new(dc, w.factors.clone()));
    }
    for (i, f) in w.factors.iter().enumerate() {
        let parts = if x { factor_dx(f, mu) } else { factor_dp(f, mu) };
        for (c, repl) in parts {
            let mut fs = w.factors[..i].to_vec();
            fs.extend(repl);
            fs.extend(w.factors[i + 1..].iter().cloned());
            out.push(NCWord::new(c * w.coeff.clone(), fs));
        }
    }
    out
}

pub fn symbol_dx(a: &Symbol, mu: &str) -> Symbol {
    Symbol { words: a.words.iter().flat_map(|w| word_derivative(w, mu, true)).collect() }
}

pub fn symbol_dp(a: &Symbol, mu: &str) -> Symbol {
    Symbol { words: a.words.iter().flat_map(|w| word_derivative(w, mu, false)).collect() }
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)
}

/// `{A,B}_(n) = Σ_k C(n,k)(-1)^k (∂_x^{n-k}∂_p^k A)(∂_p^{n-k}∂_x^k B)` with
/// the x-indices of `A` paired with the p-indices of `B` and vice versa.
pub fn poisson_bracket_n(a: &Symbol, b: &Symbol, n: usize) -> Result<Symbol> {
    if n > MAX_BRACKET_ORDER {
        return Err(Error::OrderTooLarge { requested: n, max: MAX_BRACKET_ORDER });
    }
    if n == 0 {
        return Ok(a.mul(b).canonical());
    }
    let idx: Vec<String> = (0..n).map(|j| format!("~k{j}")).collect();
    let mut total = Symbol::zero();
    for k in 0..=n {
        let (xs, ps) = idx.split_at(n - k);
        let mut da = a.clone();
        for m in xs {
            da = symbol_dx(&da, m);
        }
        for m in ps {
            da = symbol_dp(&da, m);
        }
        let mut db = b.clone();
        for m in xs {
            db = symbol_dp(&db, m);
        }
        for m in ps {
            db = symbol_dx(&db, m);
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        total = total.add(&da.mul(&db).scale(&Expr::int(sign * binomial(n, k))));
    }
    Ok(total.canonical())
}

/// `A ∘ B = Σ_{n ≤ order} (iħ/2)^n / n! {A,B}_(n)`.
pub fn star_product(a: &Symbol, b: &Symbol, order: usize) -> Result<Symbol> {
    if order > MAX_BRACKET_ORDER {
        return Err(Error::OrderTooLarge { requested: order, max: MAX_BRACKET_ORDER });
    }
    let mut total = Symbol::zero();
    let mut fact = 1i64;
    for n in 0..=order {
        if n > 0 {
            fact *= n as i64;
        }
        let w = (Expr::i() * Expr::param(params::HBAR) / Expr::int(2)).powi(n as i64) / Expr::int(fact);
        total = total.add(&poisson_bracket_n(a, b, n)?.scale(&w));
    }
    Ok(total.canonical())
}

// ---------------------------------------------------------------------------
// Canonical form of words

fn factor_indices(f: &[Factor]) -> Vec<Index> {
    f.iter()
        .filter_map(|x| match x {
            Factor::Gamma(i) => Some(i.clone()),
            _ => None,
        })
        .collect()
}

fn sort_key(f: &Factor) -> (u8, Option<Base>) {
    match f {
        Factor::Res { base, .. } | Factor::Pow { base, .. } => (0, Some(*base)),
        Factor::Slash => (1, None),
        Factor::Gamma(_) => (2, None),
    }
}

/// Sorts and merges every maximal run of mutually commuting factors.
fn merge_runs(coeff: &mut Expr, f: Vec<Factor>) -> Vec<Factor> {
    // scalar bases commute with everything: pull them to the front
    let (mut out, rest): (Vec<Factor>, Vec<Factor>) =
        f.into_iter().partition(|x| x.base().is_some_and(|b| b.is_scalar()));
    let mut run: Vec<Factor> = Vec::new();
    let flush = |run: &mut Vec<Factor>, out: &mut Vec<Factor>, coeff: &mut Expr| {
        run.sort_by_key(sort_key);
        out.extend(merge_sorted(std::mem::take(run), coeff));
    };
    for x in rest {
        if x.is_slash_function() {
            run.push(x);
        } else {
            flush(&mut run, &mut out, coeff);
            out.push(x);
        }
    }
    flush(&mut run, &mut out, coeff);
    let mut head: Vec<Factor> = Vec::new();
    let n_scalar = out.iter().take_while(|x| x.base().is_some_and(|b| b.is_scalar())).count();
    let mut scal: Vec<Factor> = out.drain(..n_scalar).collect();
    scal.sort_by_key(sort_key);
    head.extend(merge_sorted(scal, coeff));
    head.extend(out);
    head
}

fn merge_sorted(f: Vec<Factor>, coeff: &mut Expr) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::new();
    for x in f {
        match (out.last_mut(), &x) {
            (Some(Factor::Res { base: b1, power: p1 }), Factor::Res { base: b2, power: p2 }) if b1 == b2 => {
                *p1 += p2;
                if *p1 == 0 {
                    out.pop();
                }
            }
            (Some(Factor::Pow { base: b1, exp: e1 }), Factor::Pow { base: b2, exp: e2 }) if b1 == b2 => {
                *e1 = e1.add(e2);
                if e1.is_zero() {
                    out.pop();
                }
            }
            (Some(Factor::Slash), Factor::Slash) => {
                out.pop();
                *coeff = coeff.clone() * Expr::p2();
            }
            _ => out.push(x),
        }
    }
    out
}

/// Contracts adjacent `γ^aγ^a` and absorbs coefficient deltas and momentum
/// components into gamma factors, splitting the coefficient into monomials.
fn absorb_word(coeff: &Expr, f: &[Factor]) -> Vec<(Expr, Vec<Factor>)> {
    // route through the Clifford absorber by temporarily mapping factors
    let gf: Vec<GammaFactor> = f
        .iter()
        .map(|x| match x {
            Factor::Gamma(i) => GammaFactor::Index(i.clone()),
            _ => GammaFactor::Index(String::new()),
        })
        .collect();
    let mut out = Vec::new();
    for (c, g) in clifford::absorb(coeff, &gf) {
        let fs: Vec<Factor> = f
            .iter()
            .zip(g)
            .map(|(orig, new)| match (orig, new) {
                (Factor::Gamma(_), GammaFactor::Index(i)) => Factor::Gamma(i),
                (Factor::Gamma(_), GammaFactor::Slash) => Factor::Slash,
                (o, _) => o.clone(),
            })
            .collect();
        out.push((c, fs));
    }
    out
}

fn contract_adjacent(coeff: &mut Expr, f: Vec<Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::new();
    for x in f {
        match (out.last(), &x) {
            (Some(Factor::Gamma(a)), Factor::Gamma(b)) if a == b => {
                out.pop();
                *coeff = coeff.clone() * Expr::d();
            }
            _ => out.push(x),
        }
    }
    out
}

/// Renames indices shared between coefficient and factors by order of
/// appearance in the word.
fn rename_word_indices(coeff: &Expr, f: &[Factor]) -> (Expr, Vec<Factor>) {
    let mut map: BTreeMap<Index, Index> = BTreeMap::new();
    for i in factor_indices(f) {
        if !map.contains_key(&i) {
            let name = format!("#w{}", map.len() + 1);
            map.insert(i, name);
        }
    }
    if map.keys().all(|k| map[k] == *k) {
        return (coeff.clone(), f.to_vec());
    }
    // two-step rename avoids clashes between old and new names
    let tmp: BTreeMap<Index, Index> = map.keys().map(|k| (k.clone(), format!("~tmp{k}"))).collect();
    let apply = |m: &BTreeMap<Index, Index>, e: &Expr| rename_expr_indices(e, m);
    let c = apply(&tmp, coeff);
    let back: BTreeMap<Index, Index> = map.iter().map(|(k, v)| (tmp[k].clone(), v.clone())).collect();
    let c = apply(&back, &c);
    let fs = f
        .iter()
        .map(|x| match x {
            Factor::Gamma(i) => Factor::Gamma(map[i].clone()),
            o => o.clone(),
        })
        .collect();
    (simplify(&c), fs)
}

pub(crate) fn rename_expr_indices(e: &Expr, m: &BTreeMap<Index, Index>) -> Expr {
    let r = |i: &str| m.get(i).cloned().unwrap_or_else(|| i.to_string());
    e.map(&|n| match n {
        Expr::Field(a) => Expr::Field(
            crate::expr::FieldAtom { name: a.name.clone(), indices: a.indices.iter().map(|i| r(i)).collect(), laplacians: a.laplacians }
                .normalized(),
        ),
        Expr::Momentum(MomentumAtom::Component(i)) => Expr::p(&r(&i)),
        Expr::Delta(a, b) => Expr::delta(&r(&a), &r(&b)),
        o => o,
    })
}

/// Brings a list of words to canonical form and collects like words.
pub fn canonicalize(words: &[NCWord]) -> Symbol {
    let mut pending: Vec<(Expr, Vec<Factor>)> = words.iter().map(|w| (w.coeff.clone(), w.factors.clone())).collect();
    let mut finished: Vec<(Expr, Vec<Factor>)> = Vec::new();
    for _ in 0..8 {
        let mut next = Vec::new();
        for (c, f) in pending.drain(..) {
            let mut c = c;
            let f = merge_runs(&mut c, f);
            let f = contract_adjacent(&mut c, f);
            for (c2, f2) in absorb_word(&simplify(&c), &f) {
                if f2 == f {
                    finished.push((c2, f2));
                } else {
                    next.push((c2, f2));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        pending = next;
    }
    finished.extend(pending);
    let mut groups: Vec<(Vec<Factor>, Vec<Expr>)> = Vec::new();
    for (c, f) in finished {
        let (c, f) = rename_word_indices(&c, &f);
        match groups.iter_mut().find(|(g, _)| *g == f) {
            Some((_, cs)) => cs.push(c),
            None => groups.push((f, vec![c])),
        }
    }
    let mut words: Vec<NCWord> = groups
        .into_iter()
        .map(|(f, cs)| NCWord::new(simplify(&Expr::Sum(cs)), f))
        .filter(|w| w.coeff != Expr::zero())
        .collect();
    words.sort_by(|a, b| a.factors.cmp(&b.factors));
    Symbol { words }
}

/// Rotates a word under the spinor trace so that a trailing run of
/// slash-functions joins the leading run.
pub fn cyclic_normalize(w: &NCWord) -> NCWord {
    let f = &w.factors;
    if !f.iter().any(|x| matches!(x, Factor::Gamma(_))) {
        return w.clone();
    }
    let tail = f.iter().rev().take_while(|x| x.is_slash_function()).count();
    if tail == 0 {
        return w.clone();
    }
    let mut g = f[f.len() - tail..].to_vec();
    g.extend(f[..f.len() - tail].iter().cloned());
    NCWord::new(w.coeff.clone(), g)
}

/// A phase-space trace `∫d^dx d^dp/(2π)^d tr(·)` awaiting momentum integration.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceTrace {
    /// Words without gamma structure inside resolvents, already spinor-traced.
    pub traced: Expr,
    /// Words whose gamma content is interleaved with slash-functions, in cyclic normal form.
    pub deferred: Vec<NCWord>,
}

pub fn phase_space_trace(a: &Symbol) -> PhaseSpaceTrace {
    let rotated: Vec<NCWord> = a.canonical().words.iter().map(cyclic_normalize).collect();
    let sym = canonicalize(&rotated);
    let mut traced = Vec::new();
    let mut deferred = Vec::new();
    for w in sym.words {
        let pure_gamma = w.factors.iter().all(|x| matches!(x, Factor::Gamma(_) | Factor::Slash));
        if pure_gamma {
            let gw = GammaWord::new(
                w.coeff.clone(),
                w.factors
                    .iter()
                    .map(|x| match x {
                        Factor::Gamma(i) => GammaFactor::Index(i.clone()),
                        _ => GammaFactor::Slash,
                    })
                    .collect(),
            );
            traced.push(clifford::spinor_trace(&gw));
        } else {
            deferred.push(w);
        }
    }
    PhaseSpaceTrace { traced: simplify(&Expr::Sum(traced)), deferred }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(base: Base) -> Symbol {
        Symbol::from_word(NCWord::new(Expr::one(), vec![Factor::res(base, 1)]))
    }
    fn r0(base: Base) -> Symbol {
        Symbol::from_word(NCWord::new(Expr::one(), vec![Factor::res(base, -1)]))
    }

    #[test]
    fn boson_first_bracket_vanishes() {
        let b = poisson_bracket_n(&r0(Base::BOSON), &x(Base::BOSON), 1).unwrap();
        assert!(b.is_zero(), "{b:?}");
    }

    #[test]
    fn boson_second_bracket() {
        let b = poisson_bracket_n(&r0(Base::BOSON), &x(Base::BOSON), 2).unwrap();
        let v = |i: &[&str]| Expr::field_d("V", i);
        let want = Symbol {
            words: vec![
                NCWord::new(Expr::int(-4) * Expr::laplacian("V"), vec![Factor::res(Base::BOSON, -2)]),
                NCWord::new(
                    Expr::int(4) * v(&["m"]) * v(&["m"]) + Expr::int(8) * Expr::p("m") * Expr::p("n") * v(&["m", "n"]),
                    vec![Factor::res(Base::BOSON, -3)],
                ),
            ],
        }
        .canonical();
        assert_eq!(b, want);
    }

    #[test]
    fn unit_and_order_zero() {
        let b = x(Base::A);
        assert_eq!(star_product(&Symbol::one(), &b, 3).unwrap(), b.canonical());
        assert!(matches!(poisson_bracket_n(&b, &b, 9), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn p_star_f_order_one() {
        let p = Symbol::scalar(Expr::p("m"));
        let f = Symbol::scalar(Expr::field("V"));
        let got = star_product(&p, &f, 1).unwrap();
        let want = Symbol::scalar(
            Expr::p("m") * Expr::field("V")
                - Expr::i() * Expr::param("hbar") / Expr::int(2) * Expr::field_d("V", &["m"]),
        )
        .canonical();
        assert_eq!(got, want);
    }

    #[test]
    fn dirac_first_order_trace_vanishes() {
        let xa = x(Base::A);
        let r = r0(Base::A);
        let r1 = poisson_bracket_n(&r, &xa, 1)
            .unwrap()
            .mul(&r)
            .scale(&(Expr::rat(-1, 2) * Expr::i()));
        assert!(!r1.canonical().is_zero());
        let t = phase_space_trace(&r1);
        assert_eq!(t.traced, Expr::zero());
        assert!(t.deferred.is_empty(), "{:?}", t.deferred);
    }

    #[test]
    fn odd_gamma_trace_is_zero() {
        let w = Symbol::from_word(NCWord::new(Expr::one(), vec![Factor::gamma("a"), Factor::gamma("b"), Factor::gamma("c")]));
        assert_eq!(phase_space_trace(&w).traced, Expr::zero());
    }
}
