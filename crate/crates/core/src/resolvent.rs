//! The ħ-graded resolvent symbol `R̃(λ) = Σ ħⁿ R̃₍ₙ₎` solving `R̃ ∘ (λ + Ã) = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::phasespace::{
    canonicalize, cyclic_normalize, poisson_bracket_n, Base, Factor, NCWord, Symbol, MAX_BRACKET_ORDER,
};

/// Orders covered without extended mode.
pub const PAPER_MAX_ORDER: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Boson,
    Dirac,
}

/// Which bracket terms enter `R̃₍ₙ₎`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recursion {
    /// `R̃₍ₙ₎ = -Σ_{k=1}^{n} (i/2)^k/k! {R̃₍ₙ₋ₖ₎, λ+Ã}₍ₖ₎ (λ+Ã)^{-1}`, the exact solution.
    #[default]
    Full,
    /// Keeps only the `k = n` bracket against `R̃₍₀₎`. Identical to `Full`
    /// for the boson, where `R̃₍₁₎ = 0`; for the Dirac operator it drops the
    /// `{R̃₍₁₎, λ+Ã}₍₁₎` feedback at second order.
    LeadingBracket,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub base: Base,
}

impl OperatorSpec {
    /// `-∂² + V`, symbol `p² + V`.
    pub fn boson() -> Self {
        OperatorSpec { kind: OperatorKind::Boson, base: Base::BOSON }
    }
    /// `γ·∂ + φ`, symbol `φ + iγ·p`.
    pub fn dirac() -> Self {
        OperatorSpec { kind: OperatorKind::Dirac, base: Base::A }
    }
    pub fn new(kind: OperatorKind) -> Self {
        match kind {
            OperatorKind::Boson => Self::boson(),
            OperatorKind::Dirac => Self::dirac(),
        }
    }
    /// The symbol `Ã` itself.
    pub fn symbol(&self) -> Symbol {
        match self.kind {
            OperatorKind::Boson => Symbol::scalar(self.base.scalar_part()),
            OperatorKind::Dirac => Symbol {
                words: vec![
                    NCWord::scalar(self.base.scalar_part()),
                    NCWord::new(Expr::i(), vec![Factor::Slash]),
                ],
            },
        }
    }
    /// `(λ + Ã)^k` as a single word.
    pub fn shifted_power(&self, k: i64) -> Symbol {
        Symbol::from_word(NCWord::new(Expr::one(), vec![Factor::res(self.base, k)]))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventExpansion {
    pub op: OperatorSpec,
    pub recursion: Recursion,
    /// `terms[n]` is `R̃₍ₙ₎` with the `(i/2)^k/k!` weights folded in.
    pub terms: Vec<Symbol>,
}

impl ResolventExpansion {
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }
    /// Each term rotated under the spinor trace. Only meaningful inside a trace.
    pub fn cyclic_form(&self) -> Vec<Symbol> {
        self.terms
            .iter()
            .map(|t| canonicalize(&t.words.iter().map(cyclic_normalize).collect::<Vec<_>>()))
            .collect()
    }
}

fn weight(k: usize) -> Expr {
    let fact: i64 = (1..=k as i64).product();
    (Expr::i() / Expr::int(2)).powi(k as i64) / Expr::int(fact)
}

/// Expands the resolvent symbol through `max_order`. Orders above two need `extended`.
pub fn resolvent_expand(op: &OperatorSpec, max_order: usize, extended: bool) -> Result<ResolventExpansion> {
    resolvent_expand_with(op, max_order, extended, Recursion::Full)
}

pub fn resolvent_expand_with(
    op: &OperatorSpec,
    max_order: usize,
    extended: bool,
    recursion: Recursion,
) -> Result<ResolventExpansion> {
    let cap = if extended { MAX_BRACKET_ORDER } else { PAPER_MAX_ORDER };
    if max_order > cap {
        return Err(Error::OrderTooLarge { requested: max_order, max: cap });
    }
    let x = op.shifted_power(1);
    let xinv = op.shifted_power(-1);
    let mut terms = vec![xinv.canonical()];
    for n in 1..=max_order {
        let mut acc = Symbol::zero();
        let first = match recursion {
            Recursion::Full => 1,
            Recursion::LeadingBracket => n,
        };
        for k in first..=n {
            let b = poisson_bracket_n(&terms[n - k], &x, k)?;
            acc = acc.add(&b.scale(&weight(k)));
        }
        terms.push(acc.mul(&xinv).neg().canonical());
    }
    Ok(ResolventExpansion { op: op.clone(), recursion, terms })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolventReport {
    /// Residual of `R̃ ∘ (λ + Ã) - 1` at each ħ order; all empty when the check passes.
    pub residuals: Vec<Symbol>,
}

impl ResolventReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(Symbol::is_zero)
    }
}

/// Computes the ħ-graded star product `R̃ ∘ (λ + Ã)` symbolically and checks it equals 1.
pub fn verify_resolvent(exp: &ResolventExpansion) -> Result<ResolventReport> {
    let x = exp.op.shifted_power(1);
    let mut residuals = Vec::new();
    for n in 0..=exp.order() {
        let mut acc = if n == 0 { Symbol::one().neg() } else { Symbol::zero() };
        for k in 0..=n {
            acc = acc.add(&poisson_bracket_n(&exp.terms[n - k], &x, k)?.scale(&weight(k)));
        }
        residuals.push(acc.canonical());
    }
    let report = ResolventReport { residuals };
    if let Some((n, r)) = report.residuals.iter().enumerate().find(|(_, r)| !r.is_zero()) {
        return Err(Error::VerificationFailed(format!("nonzero residual at order hbar^{n}: {r:?}")));
    }
    Ok(report)
}

/// Total number of field derivatives in a word's coefficient, if uniform.
pub fn derivative_grade(w: &NCWord) -> Option<usize> {
    let mut grades = crate::expr::expand_terms(&w.coeff).into_iter().map(|(_, m)| {
        let mut g = 0usize;
        m.visit(&mut |e| {
            if let Expr::Field(a) = e {
                g += a.order();
            }
        });
        // powers of a differentiated field count with multiplicity
        if let Expr::Product(fs) = &m {
            for f in fs {
                if let Expr::Power(b, e) = f {
                    if let (Expr::Field(a), Some(k)) = (b.as_ref(), e.as_integer()) {
                        g += a.order() * (k.max(1) as usize - 1);
                    }
                }
            }
        }
        g
    });
    let first = grades.next()?;
    grades.all(|g| g == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(c: Expr, f: Vec<Factor>) -> NCWord {
        NCWord::new(c, f)
    }

    #[test]
    fn boson_first_order_vanishes() {
        let e = resolvent_expand(&OperatorSpec::boson(), 2, false).unwrap();
        assert!(e.terms[1].is_zero());
    }

    #[test]
    fn boson_second_order_matches_display() {
        let e = resolvent_expand(&OperatorSpec::boson(), 2, false).unwrap();
        let b = Base::BOSON;
        let want = canonicalize(&[
            w(Expr::rat(-1, 2) * Expr::laplacian("V"), vec![Factor::res(b, -3)]),
            w(
                Expr::rat(1, 2) * Expr::field_d("V", &["m"]) * Expr::field_d("V", &["m"])
                    + Expr::p("m") * Expr::p("n") * Expr::field_d("V", &["m", "n"]),
                vec![Factor::res(b, -4)],
            ),
        ]);
        assert_eq!(e.terms[2], want);
    }

    #[test]
    fn residual_vanishes() {
        for op in [OperatorSpec::boson(), OperatorSpec::dirac()] {
            let e = resolvent_expand(&op, 2, false).unwrap();
            assert!(verify_resolvent(&e).unwrap().passed());
        }
    }

    #[test]
    fn order_cap() {
        assert!(matches!(
            resolvent_expand(&OperatorSpec::boson(), 3, false),
            Err(Error::OrderTooLarge { requested: 3, max: 2 })
        ));
        let e = resolvent_expand(&OperatorSpec::boson(), 3, true).unwrap();
        assert!(verify_resolvent(&e).is_ok());
    }

    #[test]
    fn broken_expansion_is_rejected() {
        let mut e = resolvent_expand(&OperatorSpec::boson(), 2, false).unwrap();
        e.terms[2] = e.terms[2].scale(&Expr::int(2));
        assert!(matches!(verify_resolvent(&e), Err(Error::VerificationFailed(_))));
    }

    #[test]
    fn leading_bracket_matches_display() {
        // -(1/4) (λ+Ã)^{-3} γ^μ (λ+Ã)^{-1} γ^ν ∂_{μν}φ under the trace
        let e = resolvent_expand_with(&OperatorSpec::dirac(), 2, false, Recursion::LeadingBracket).unwrap();
        let a = Base::A;
        let want = canonicalize(&[w(
            Expr::rat(-1, 4) * Expr::field_d("phi", &["m", "n"]),
            vec![Factor::res(a, -3), Factor::gamma("m"), Factor::res(a, -1), Factor::gamma("n")],
        )]);
        assert_eq!(e.cyclic_form()[2], want);
        assert!(matches!(verify_resolvent(&e), Err(Error::VerificationFailed(_))));
        let b = resolvent_expand_with(&OperatorSpec::boson(), 2, false, Recursion::LeadingBracket).unwrap();
        assert_eq!(b.terms, resolvent_expand(&OperatorSpec::boson(), 2, false).unwrap().terms);
    }

    #[test]
    fn grading() {
        let e = resolvent_expand(&OperatorSpec::dirac(), 2, false).unwrap();
        for (n, t) in e.terms.iter().enumerate() {
            for word in &t.words {
                assert_eq!(derivative_grade(word), Some(n), "{word:?}");
            }
        }
    }
}
