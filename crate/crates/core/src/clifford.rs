//! Euclidean gamma-matrix algebra on abstract indices.
//!
//! A [`GammaWord`] is an ordered product of `γ^a` and momentum slashes
//! `S = p·γ`, with `{γ^a, γ^b} = 2δ^{ab}`, `S² = p²` and `tr 1 = 4`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::expr::{expand_terms, ratfunc_to_expr, simplify, Expr, Index, MomentumAtom};
use crate::phasespace::{Base, BaseKind, Factor, NCWord};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GammaFactor {
    Index(Index),
    /// `p·γ`
    Slash,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaWord {
    pub coeff: Expr,
    pub factors: Vec<GammaFactor>,
}

impl GammaWord {
    pub fn new(coeff: Expr, factors: Vec<GammaFactor>) -> Self {
        GammaWord { coeff, factors }
    }
    pub fn gammas(idx: &[&str]) -> Self {
        GammaWord::new(Expr::one(), idx.iter().map(|i| GammaFactor::Index(i.to_string())).collect())
    }
}

/// `{x, y}/2` for two generators: `δ^{ab}`, `p^a` or `p²`.
pub fn anticommutator_half(x: &GammaFactor, y: &GammaFactor) -> Expr {
    match (x, y) {
        (GammaFactor::Index(a), GammaFactor::Index(b)) => Expr::delta(a, b),
        (GammaFactor::Index(a), GammaFactor::Slash) | (GammaFactor::Slash, GammaFactor::Index(a)) => Expr::p(a),
        (GammaFactor::Slash, GammaFactor::Slash) => Expr::p2(),
    }
}

fn order(x: &GammaFactor, y: &GammaFactor) -> Ordering {
    x.cmp(y)
}

fn reduce_into(coeff: Expr, f: Vec<GammaFactor>, out: &mut Vec<(Expr, Vec<GammaFactor>)>) {
    for i in 0..f.len().saturating_sub(1) {
        if f[i] == f[i + 1] {
            let factor = match &f[i] {
                GammaFactor::Index(_) => Expr::d(),
                GammaFactor::Slash => Expr::p2(),
            };
            let mut g = f.clone();
            g.drain(i..i + 2);
            return reduce_into(coeff * factor, g, out);
        }
    }
    for i in 0..f.len().saturating_sub(1) {
        if order(&f[i], &f[i + 1]) == Ordering::Greater {
            let two_delta = Expr::int(2) * anticommutator_half(&f[i], &f[i + 1]);
            let mut without = f.clone();
            without.drain(i..i + 2);
            let mut swapped = f.clone();
            swapped.swap(i, i + 1);
            reduce_into(coeff.clone() * two_delta, without, out);
            return reduce_into(-coeff, swapped, out);
        }
    }
    out.push((coeff, f));
}

/// Splits a monomial into its top-level factors.
pub(crate) fn factors_of(e: &Expr) -> Vec<Expr> {
    match e {
        Expr::Product(v) => v.clone(),
        Expr::Rational(r) if num_traits::One::is_one(r) => vec![],
        other => vec![other.clone()],
    }
}

/// Moves coefficient deltas and momentum components that share an index
/// with the word into the word: `δ^{ab}γ^b → γ^a`, `p_a γ^a → S`.
pub(crate) fn absorb(coeff: &Expr, f: &[GammaFactor]) -> Vec<(Expr, Vec<GammaFactor>)> {
    let mut out = Vec::new();
    for (c, mono) in expand_terms(coeff) {
        let mut fs = factors_of(&mono);
        let mut word = f.to_vec();
        loop {
            let in_word = |i: &Index, w: &[GammaFactor]| w.iter().any(|g| *g == GammaFactor::Index(i.clone()));
            let hit = fs.iter().position(|x| match x {
                Expr::Delta(a, b) => in_word(a, &word) || in_word(b, &word),
                Expr::Momentum(MomentumAtom::Component(a)) => in_word(a, &word),
                _ => false,
            });
            let Some(k) = hit else { break };
            match fs.remove(k) {
                Expr::Delta(a, b) => {
                    let (from, to) = if in_word(&a, &word) { (a, b) } else { (b, a) };
                    for g in word.iter_mut() {
                        if *g == GammaFactor::Index(from.clone()) {
                            *g = GammaFactor::Index(to.clone());
                        }
                    }
                }
                Expr::Momentum(MomentumAtom::Component(a)) => {
                    for g in word.iter_mut() {
                        if *g == GammaFactor::Index(a.clone()) {
                            *g = GammaFactor::Slash;
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        fs.insert(0, ratfunc_to_expr(&c));
        out.push((Expr::Product(fs), word));
    }
    out
}

/// Sorts generators by anticommutation and contracts repeated pairs.
pub fn gamma_reduce(w: &GammaWord) -> Vec<GammaWord> {
    let mut pending = vec![(w.coeff.clone(), w.factors.clone())];
    let mut done = Vec::new();
    // absorbing a delta can create a new adjacent pair, so iterate
    for _ in 0..8 {
        let mut raw = Vec::new();
        for (c, f) in pending.drain(..) {
            reduce_into(c, f, &mut raw);
        }
        let mut next = Vec::new();
        for w in collect(raw) {
            let parts = absorb(&w.coeff, &w.factors);
            if parts.len() == 1 && parts[0].1 == w.factors {
                done.push((w.coeff, w.factors));
            } else {
                next.extend(parts);
            }
        }
        if next.is_empty() {
            break;
        }
        pending = next;
    }
    done.extend(pending);
    collect(done)
}

pub(crate) fn collect(raw: Vec<(Expr, Vec<GammaFactor>)>) -> Vec<GammaWord> {
    let mut groups: Vec<(Vec<GammaFactor>, Vec<Expr>)> = Vec::new();
    for (c, f) in raw {
        match groups.iter_mut().find(|(g, _)| *g == f) {
            Some((_, cs)) => cs.push(c),
            None => groups.push((f, vec![c])),
        }
    }
    let mut out: Vec<GammaWord> = groups
        .into_iter()
        .map(|(f, cs)| GammaWord::new(simplify(&Expr::Sum(cs)), f))
        .filter(|w| w.coeff != Expr::zero())
        .collect();
    out.sort_by(|a, b| a.factors.cmp(&b.factors));
    out
}

fn trace_raw(f: &[GammaFactor]) -> Expr {
    if f.is_empty() {
        return Expr::int(4);
    }
    if f.len() % 2 == 1 {
        return Expr::zero();
    }
    let mut terms = Vec::new();
    for k in 1..f.len() {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let mut rest: Vec<GammaFactor> = f[1..].to_vec();
        rest.remove(k - 1);
        terms.push(Expr::int(sign) * anticommutator_half(&f[0], &f[k]) * trace_raw(&rest));
    }
    Expr::Sum(terms)
}

/// Spinor trace with `tr 1 = 4`.
pub fn spinor_trace(w: &GammaWord) -> Expr {
    simplify(&(w.coeff.clone() * trace_raw(&w.factors)))
}

/// Moves a gamma matrix through a resolvent power:
/// `γ^μ (λ+Ã)^{-b} γ^ν = (λ+Ã*)^{-b} γ^μγ^ν + (p^μ/p²)[(λ+Ã)^{-b} - (λ+Ã*)^{-b}] S γ^ν`.
///
/// Follows from `γ^μ h(S) = h(-S) γ^μ + (p^μ/p²)(h(S) - h(-S)) S`.
pub fn gamma_pass(w: &NCWord) -> Result<Vec<NCWord>> {
    let (mu, base, b, nu) = match w.factors.as_slice() {
        [Factor::Gamma(mu), Factor::Res { base, power }, Factor::Gamma(nu)] if *power < 0 => (mu, *base, *power, nu),
        f => return Err(Error::PatternMismatch(format!("expected γ (λ+A)^-b γ, got {f:?}"))),
    };
    let g = |i: &Index| Factor::Gamma(i.clone());
    match base.kind {
        BaseKind::Phi | BaseKind::Boson => {
            return Ok(vec![NCWord::new(w.coeff.clone(), vec![Factor::res(base, b), g(mu), g(nu)])])
        }
        BaseKind::A if !base.eps => {}
        _ => return Err(Error::PatternMismatch(format!("gamma passing through base {}", base.name()))),
    }
    let star = Base::A_STAR;
    let pmu = w.coeff.clone() * Expr::p(mu) / Expr::p2();
    Ok(vec![
        NCWord::new(w.coeff.clone(), vec![Factor::res(star, b), g(mu), g(nu)]),
        NCWord::new(pmu.clone(), vec![Factor::res(base, b), Factor::Slash, g(nu)]),
        NCWord::new(-pmu, vec![Factor::res(star, b), Factor::Slash, g(nu)]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contraction_gives_dimension() {
        let r = gamma_reduce(&GammaWord::gammas(&["a", "a"]));
        assert_eq!(r, vec![GammaWord::new(Expr::d(), vec![])]);
    }

    #[test]
    fn anticommutator_is_two_delta() {
        let mut raw = Vec::new();
        reduce_into(Expr::one(), GammaWord::gammas(&["a", "b"]).factors, &mut raw);
        reduce_into(Expr::one(), GammaWord::gammas(&["b", "a"]).factors, &mut raw);
        let r = collect(raw);
        assert_eq!(r, vec![GammaWord::new(simplify(&(Expr::int(2) * Expr::delta("a", "b"))), vec![])]);
    }

    #[test]
    fn slash_squares_to_p2() {
        let r = gamma_reduce(&GammaWord::new(Expr::one(), vec![GammaFactor::Slash, GammaFactor::Slash]));
        assert_eq!(r, vec![GammaWord::new(Expr::p2(), vec![])]);
    }

    #[test]
    fn traces() {
        assert_eq!(spinor_trace(&GammaWord::gammas(&["a"])), Expr::zero());
        assert_eq!(spinor_trace(&GammaWord::gammas(&["a", "b"])), simplify(&(Expr::int(4) * Expr::delta("a", "b"))));
        let four = spinor_trace(&GammaWord::gammas(&["a", "b", "c", "e"]));
        let want = Expr::int(4)
            * (Expr::delta("a", "b") * Expr::delta("c", "e") - Expr::delta("a", "c") * Expr::delta("b", "e")
                + Expr::delta("a", "e") * Expr::delta("b", "c"));
        assert_eq!(four, simplify(&want));
    }

    #[test]
    fn sandwich_contraction() {
        // γ^a γ^b γ^a = (2 - d) γ^b
        let r = gamma_reduce(&GammaWord::gammas(&["a", "b", "a"]));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].factors, vec![GammaFactor::Index("b".into())]);
        assert_eq!(r[0].coeff, simplify(&(Expr::int(2) - Expr::d())));
    }

    #[test]
    fn gamma_pass_shapes() {
        let sandwich = NCWord::new(Expr::one(), vec![Factor::gamma("m"), Factor::res(Base::A, -1), Factor::gamma("n")]);
        let out = gamma_pass(&sandwich).unwrap();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].factors, vec![Factor::res(Base::A_STAR, -1), Factor::gamma("m"), Factor::gamma("n")]);
        assert_eq!(out[1].factors, vec![Factor::res(Base::A, -1), Factor::Slash, Factor::gamma("n")]);
        let scalar = NCWord::new(Expr::one(), vec![Factor::gamma("m"), Factor::res(Base::PHI, -1), Factor::gamma("n")]);
        assert_eq!(gamma_pass(&scalar).unwrap()[0].factors, vec![Factor::res(Base::PHI, -1), Factor::gamma("m"), Factor::gamma("n")]);
        let bad = NCWord::new(Expr::one(), vec![Factor::res(Base::A, -1), Factor::gamma("n")]);
        assert!(matches!(gamma_pass(&bad), Err(Error::PatternMismatch(_))));
    }
}
