//! Semigroup integrals `(sin πs/π) ∫₀^∞ dλ λ^{-s} (…)` over resolvent words.
//!
//! Single-base words integrate in closed form. Words mixing `λ+Ã` and
//! `λ+Ã*` go through either a Feynman parameter with a Hadamard finite part,
//! or the partial-fraction operator identity with an `iε` shift.

use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::{q, simplify, Exponent, Expr, Q};
use crate::phasespace::{canonicalize, Base, BaseKind, Factor, NCWord};

/// A λ-dependent term awaiting the semigroup integral.
#[derive(Clone, Debug, PartialEq)]
pub struct MellinTerm {
    pub word: NCWord,
}

impl MellinTerm {
    /// Checks that the λ-integral has a nonempty convergence strip in `s`.
    pub fn new(word: NCWord) -> Result<Self> {
        let decay: i64 = word
            .factors
            .iter()
            .map(|f| match f {
                Factor::Res { power, .. } => -power,
                _ => 0,
            })
            .sum();
        if decay < 1 {
            return Err(Error::ValidityViolated(format!(
                "λ-decay {decay} leaves no convergence strip for the semigroup integral"
            )));
        }
        Ok(MellinTerm { word })
    }

    /// `(power, base)` of every resolvent factor.
    fn resolvents(&self) -> Vec<(Base, i64)> {
        self.word
            .factors
            .iter()
            .filter_map(|f| match f {
                Factor::Res { base, power } => Some((*base, -power)),
                _ => None,
            })
            .collect()
    }
}

/// `Γ(s+k-1)/(Γ(s)Γ(k))`, normalized to a rising factorial.
pub fn mellin_prefactor(k: i64) -> Expr {
    let fact: i64 = (1..k).product();
    simplify(&(Expr::gamma(Exponent::affine(q(k - 1), q(1))) / (Expr::gamma(Exponent::affine(q(0), q(1))) * Expr::int(fact))))
}

/// `1 - s - k`
pub fn mellin_exponent(k: i64) -> Exponent {
    Exponent::affine(q(1 - k), q(-1))
}

/// `(sin πs/π) ∫₀^∞ λ^{-s}(λ+a)^{-k} dλ = Γ(s+k-1)/(Γ(s)Γ(k)) a^{1-s-k}` for a commuting base.
pub fn mellin_rule(base: &Expr, k: i64) -> Result<Expr> {
    if k < 1 {
        return Err(Error::ValidityViolated(format!("power {k} has no convergence strip")));
    }
    Ok(simplify(&(mellin_prefactor(k) * base.clone().pow(mellin_exponent(k)))))
}

/// Applies the semigroup integral to a word whose λ-dependence sits on one base.
pub fn mellin_word(t: &MellinTerm) -> Result<NCWord> {
    let res = t.resolvents();
    let base = res[0].0;
    if res.iter().any(|(b, _)| *b != base) {
        let names: Vec<String> = res.iter().map(|(b, _)| b.name()).collect();
        return Err(Error::NonCommutingBase(format!("mixed resolvent bases {}", names.join(", "))));
    }
    let k: i64 = res.iter().map(|(_, k)| k).sum();
    let mut factors = Vec::new();
    let mut placed = false;
    for f in &t.word.factors {
        match f {
            Factor::Res { .. } if !placed => {
                factors.push(Factor::Pow { base, exp: mellin_exponent(k) });
                placed = true;
            }
            Factor::Res { .. } => {}
            other => factors.push(other.clone()),
        }
    }
    Ok(NCWord::new(simplify(&(mellin_prefactor(k) * t.word.coeff.clone())), factors))
}

/// Splits off the `(λ+Ã)^{-a}(λ+Ã*)^{-b}` head of a word.
fn mixed_pattern(t: &MellinTerm) -> Result<(i64, i64, Vec<Factor>)> {
    let f = &t.word.factors;
    match f.as_slice() {
        [Factor::Res { base: b1, power: p1 }, Factor::Res { base: b2, power: p2 }, rest @ ..]
            if b1.kind == BaseKind::A && b2.kind == BaseKind::AStar && *p1 < 0 && *p2 < 0 && !b1.eps && !b2.eps =>
        {
            if rest.iter().any(|x| matches!(x, Factor::Res { .. } | Factor::Pow { .. })) {
                return Err(Error::PatternMismatch("extra λ-dependent factors after the mixed pair".into()));
            }
            Ok((-p1, -p2, rest.to_vec()))
        }
        _ => Err(Error::PatternMismatch(format!("expected (λ+A)^-a (λ+A*)^-b, got {f:?}"))),
    }
}

fn binomial_q(n: i64, k: i64) -> Q {
    if k < 0 || n < k {
        return Q::zero();
    }
    (0..k).fold(Q::one(), |acc, j| acc * q(n - j) / q(j + 1))
}

/// `∫₀¹ dt P(t) (2t-1)^{-m}`, possibly a Hadamard finite part at `t = 1/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FPIntegral {
    /// Polynomial coefficients of `P` in increasing powers of `t`.
    pub numerator: Vec<Q>,
    pub pole_order: Exponent,
}

/// A Feynman-parametrized term: `FP ∫₀¹ dt w(t) · word`, where the word's
/// resolvent sits on the base `λ + φ + (2t-1)iS`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeynmanTerm {
    pub weight: Vec<Q>,
    pub term: MellinTerm,
}

/// `X^{-a}X*^{-b} = Γ(a+b)/(Γ(a)Γ(b)) ∫₀¹ dt t^{a-1}(1-t)^{b-1} (tX + (1-t)X*)^{-(a+b)}`.
pub fn feynman_combine(t: &MellinTerm) -> Result<FeynmanTerm> {
    let (a, b, rest) = mixed_pattern(t)?;
    let norm = binomial_q(a + b - 2, a - 1) * q(a + b - 1);
    // t^{a-1} (1-t)^{b-1}
    let mut weight = vec![Q::zero(); (a + b - 1) as usize];
    for j in 0..b {
        let c = binomial_q(b - 1, j) * if j % 2 == 0 { Q::one() } else { -Q::one() };
        weight[(a - 1 + j) as usize] += c * &norm;
    }
    let mut factors = vec![Factor::res(Base::FEYNMAN, -(a + b))];
    factors.extend(rest);
    Ok(FeynmanTerm { weight, term: MellinTerm { word: NCWord::new(t.word.coeff.clone(), factors) } })
}

/// Hadamard finite part with symmetric excision around `t = 1/2`.
pub fn hadamard_fp(f: &FPIntegral) -> Result<Q> {
    let m = f
        .pole_order
        .as_integer()
        .filter(|m| *m >= 0)
        .ok_or_else(|| Error::NonPoleSingularity(format!("(2t-1)^(-{:?}) is not a pole", f.pole_order)))?;
    // t = (u+1)/2, dt = du/2: P((u+1)/2) = Σ c_j u^j
    let n = f.numerator.len();
    let mut cu = vec![Q::zero(); n];
    for (k, ak) in f.numerator.iter().enumerate() {
        let scale = ak / Q::from_integer(num_bigint::BigInt::from(2).pow(k as u32));
        for j in 0..=k {
            cu[j] += &scale * binomial_q(k as i64, j as i64);
        }
    }
    let mut total = Q::zero();
    for (j, c) in cu.iter().enumerate() {
        let e = j as i64 - m;
        // FP ∫_{-1}^{1} u^e du; the log term of e = -1 is odd and drops
        if e != -1 && e % 2 == 0 {
            total += c * q(2) / q(e + 1);
        }
    }
    Ok(total / q(2))
}

/// Decomposes `(λ+Ã)^{-a}(λ+Ã*)^{-b}` using `(λ+Ã) + (λ+Ã*) = 2(λ+φ̃)`.
pub fn operator_identity_decompose(t: &MellinTerm) -> Result<Vec<MellinTerm>> {
    let (a, b, rest) = mixed_pattern(t)?;
    let mut out = Vec::new();
    let mut push = |c: Q, k: i64, base: Base, j: i64| {
        let coeff = simplify(&(Expr::Rational(c) * t.word.coeff.clone()));
        let mut factors = vec![Factor::res(Base::PHI, -k), Factor::res(base, -j)];
        factors.extend(rest.iter().cloned());
        out.push(MellinTerm { word: NCWord::new(coeff, factors) });
    };
    // 1/(X^a Y^b) with X + Y = c: Σ_j C(a+b-j-1, b-1)/c^{a+b-j} X^{-j} + (X ↔ Y)
    let two = q(2);
    for j in 1..=a {
        let k = a + b - j;
        push(binomial_q(k - 1, b - 1) / two.pow(k as i32), k, Base::A, j);
    }
    for j in 1..=b {
        let k = a + b - j;
        push(binomial_q(k - 1, a - 1) / two.pow(k as i32), k, Base::A_STAR, j);
    }
    // paper's ordering: by resolvent power, A before A*
    out.sort_by_key(|m| {
        let (_, j) = m.resolvents()[1];
        let star = m.resolvents()[1].0.kind == BaseKind::AStar;
        (j, star)
    });
    Ok(out)
}

/// `(iS)^{-n}` as `i^{-n} S^{n mod 2} (p²)^{-⌈n/2⌉}` with the sign of `δ = ±iS` folded in.
fn inverse_slash(n: i64, sign: i64) -> (Expr, Vec<Factor>) {
    let coeff = (Expr::i() * Expr::int(sign)).powi(-n) * Expr::p2().powi(-n + n / 2);
    let f = if n % 2 == 1 { vec![Factor::Slash] } else { vec![] };
    (coeff, f)
}

/// Evaluates the λ-integral of `(λ+B̃)^{-k}(λ+C)^{-m}`, `B̃ = φ̃+iε`, `C ∈ {Ã, Ã*}`,
/// by partial fractions in λ with `δ = C - B̃`, then takes `ε → 0⁺`.
pub fn mellin_epsilon(t: &MellinTerm) -> Result<Vec<NCWord>> {
    let f = &t.word.factors;
    let (k, cbase, m, rest) = match f.as_slice() {
        [Factor::Res { base: b, power: pk }, Factor::Res { base: c, power: pm }, rest @ ..]
            if b.kind == BaseKind::Phi && *pk < 0 && *pm < 0 =>
        {
            (-pk, *c, -pm, rest.to_vec())
        }
        _ => return Err(Error::PatternMismatch(format!("expected (λ+φ)^-k (λ+C)^-m, got {f:?}"))),
    };
    let sign = match cbase.kind {
        BaseKind::A => 1,
        BaseKind::AStar => -1,
        _ => {
            return Err(Error::EpsilonLimitDivergent(format!(
                "δ = {} - (φ+iε) vanishes as ε → 0",
                cbase.name()
            )))
        }
    };
    let bbase = Base::PHI.with_eps();
    let mut words = Vec::new();
    let mut emit = |c: Q, dpow: i64, base: Base, j: i64| -> Result<()> {
        let (dc, df) = inverse_slash(dpow, sign);
        let mut factors = vec![Factor::res(base, -j)];
        factors.extend(df);
        factors.extend(rest.iter().cloned());
        let w = NCWord::new(Expr::Rational(c) * dc * t.word.coeff.clone(), factors);
        words.push(mellin_word(&MellinTerm::new(w)?)?);
        Ok(())
    };
    // 1/(y^k (y+δ)^m): y^{-j} gets (-1)^{k-j} C(m+k-j-1, k-j) δ^{-(m+k-j)},
    // (y+δ)^{-j} gets (-1)^{m-j} C(k+m-j-1, m-j) (-δ)^{-(k+m-j)}
    for j in 1..=k {
        let s = if (k - j) % 2 == 0 { Q::one() } else { -Q::one() };
        emit(s * binomial_q(m + k - j - 1, k - j), m + k - j, bbase, j)?;
    }
    for j in 1..=m {
        let n = k + m - j;
        let s = if (m - j + n) % 2 == 0 { Q::one() } else { -Q::one() };
        emit(s * binomial_q(n - 1, m - j), n, cbase, j)?;
    }
    // ε → 0⁺: δ carries no ε, so the limit is the substitution B̃ → φ̃
    let limited: Vec<NCWord> = words
        .into_iter()
        .map(|w| {
            let factors = w
                .factors
                .into_iter()
                .map(|x| match x {
                    Factor::Pow { base, exp } if base.eps => Factor::Pow { base: base.without_eps(), exp },
                    o => o,
                })
                .collect();
            NCWord::new(w.coeff, factors)
        })
        .collect();
    Ok(canonicalize(&limited).words)
}

/// Runs the identity path on a mixed term and checks that the `φ̃`-base parts cancel.
pub fn identity_path(t: &MellinTerm) -> Result<Vec<NCWord>> {
    let mut all = Vec::new();
    for piece in operator_identity_decompose(t)? {
        all.extend(mellin_epsilon(&piece)?);
    }
    let words = canonicalize(&all).words;
    if let Some(w) = words.iter().find(|w| {
        w.factors.iter().any(|f| matches!(f, Factor::Pow { base, .. } if base.kind == BaseKind::Phi))
    }) {
        return Err(Error::VerificationFailed(format!("φ-base remainder did not cancel: {w:?}")));
    }
    Ok(words)
}

/// Value of `FP ∫₀¹ w(t) |2t-1|^{-x} sgn(2t-1)^m dt` when `x ≡ m (mod 2)`, so the
/// integrand is the rational function `w(t)(2t-1)^{-x}`.
pub fn feynman_scale_integral(weight: &[Q], x: &Q, m: u8) -> Result<Q> {
    if !x.is_integer() {
        return Err(Error::NonPoleSingularity(format!("|2t-1|^(-{x}) is not a pole")));
    }
    let xi = x.to_integer().to_i64().expect("small exponent");
    if (xi - m as i64).abs() % 2 != 0 {
        return Err(Error::NonPoleSingularity(format!("sgn(2t-1)|2t-1|^(-{xi}) is not a pole")));
    }
    if xi < 0 {
        // (2t-1)^{|x|} multiplies the weight
        let mut num = weight.to_vec();
        for _ in 0..(-xi) {
            let mut next = vec![Q::zero(); num.len() + 1];
            for (i, c) in num.iter().enumerate() {
                next[i + 1] += c * q(2);
                next[i] -= c;
            }
            num = next;
        }
        return hadamard_fp(&FPIntegral { numerator: num, pole_order: Exponent::int(0) });
    }
    hadamard_fp(&FPIntegral { numerator: weight.to_vec(), pole_order: Exponent::int(xi) })
}

/// `∫₀¹ w(t) dt` for the commuting limit of a Feynman weight.
pub fn weight_integral(weight: &[Q]) -> Q {
    weight.iter().enumerate().map(|(k, c)| c / q(k as i64 + 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::qr;

    fn term(factors: Vec<Factor>) -> MellinTerm {
        MellinTerm::new(NCWord::new(Expr::one(), factors)).unwrap()
    }

    #[test]
    fn rule_values() {
        let a = Expr::field("V");
        assert_eq!(mellin_rule(&a, 1).unwrap(), simplify(&a.clone().pow(Exponent::affine(q(0), q(-1)))));
        let k3 = mellin_rule(&a, 3).unwrap() * (Expr::rat(-1, 2) * Expr::laplacian("V"));
        let want = Expr::rat(-1, 4) * Expr::s() * (Expr::s() + Expr::one()) * a.clone().pow(Exponent::affine(q(-2), q(-1))) * Expr::laplacian("V");
        assert_eq!(simplify(&k3), simplify(&want));
        let k4 = mellin_prefactor(4);
        let want = Expr::s() * (Expr::s() + Expr::one()) * (Expr::s() + Expr::int(2)) / Expr::int(6);
        assert_eq!(k4, simplify(&want));
    }

    #[test]
    fn mixed_bases_rejected() {
        let t = term(vec![Factor::res(Base::A, -3), Factor::res(Base::A_STAR, -1)]);
        assert!(matches!(mellin_word(&t), Err(Error::NonCommutingBase(_))));
        assert!(MellinTerm::new(NCWord::new(Expr::one(), vec![Factor::res(Base::A, 1)])).is_err());
    }

    #[test]
    fn feynman_three_one() {
        let t = term(vec![Factor::res(Base::A, -3), Factor::res(Base::A_STAR, -1)]);
        let f = feynman_combine(&t).unwrap();
        assert_eq!(f.weight, vec![q(0), q(0), q(3)]);
        assert_eq!(f.term.word.factors, vec![Factor::res(Base::FEYNMAN, -4)]);
        assert_eq!(weight_integral(&f.weight), q(1));
        let bad = term(vec![Factor::res(Base::A, -3)]);
        assert!(matches!(feynman_combine(&bad), Err(Error::PatternMismatch(_))));
    }

    #[test]
    fn finite_parts() {
        let fp = |num: Vec<Q>, m: i64| hadamard_fp(&FPIntegral { numerator: num, pole_order: Exponent::int(m) }).unwrap();
        assert_eq!(fp(vec![q(0), q(0), q(1)], 4), qr(-1, 3));
        assert_eq!(fp(vec![q(1)], 2), q(-1));
        assert_eq!(fp(vec![q(0), q(0), q(1)], 0), qr(1, 3));
        let half = FPIntegral { numerator: vec![q(1)], pole_order: Exponent::constant(qr(1, 2)) };
        assert!(matches!(hadamard_fp(&half), Err(Error::NonPoleSingularity(_))));
    }

    #[test]
    fn identity_three_one() {
        let t = term(vec![Factor::res(Base::A, -3), Factor::res(Base::A_STAR, -1)]);
        let d = operator_identity_decompose(&t).unwrap();
        let got: Vec<(Expr, Vec<Factor>)> = d.iter().map(|m| (m.word.coeff.clone(), m.word.factors.clone())).collect();
        let want = vec![
            (Expr::rat(1, 8), vec![Factor::res(Base::PHI, -3), Factor::res(Base::A, -1)]),
            (Expr::rat(1, 8), vec![Factor::res(Base::PHI, -3), Factor::res(Base::A_STAR, -1)]),
            (Expr::rat(1, 4), vec![Factor::res(Base::PHI, -2), Factor::res(Base::A, -2)]),
            (Expr::rat(1, 2), vec![Factor::res(Base::PHI, -1), Factor::res(Base::A, -3)]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn identity_path_closed_form() {
        // -(1/8)(iS)^{-3}(A^{-s} - A*^{-s}) - s/(4(iS)^2) A^{-s-1} - s(s+1)/(4 iS) A^{-s-2}
        let t = term(vec![Factor::res(Base::A, -3), Factor::res(Base::A_STAR, -1)]);
        let got = identity_path(&t).unwrap();
        let pw = |b: Base, k: i64| Factor::Pow { base: b, exp: Exponent::affine(q(-k), q(-1)) };
        let s = Expr::s();
        let (c3, f3) = inverse_slash(3, 1);
        let (c2, _) = inverse_slash(2, 1);
        let (c1, f1) = inverse_slash(1, 1);
        let mut w = vec![
            NCWord::new(Expr::rat(-1, 8) * c3.clone(), [vec![pw(Base::A, 0)], f3.clone()].concat()),
            NCWord::new(Expr::rat(1, 8) * c3, [vec![pw(Base::A_STAR, 0)], f3].concat()),
            NCWord::new(Expr::rat(-1, 4) * s.clone() * c2, vec![pw(Base::A, 1)]),
            NCWord::new(Expr::rat(-1, 4) * s.clone() * (s + Expr::one()) * c1, [vec![pw(Base::A, 2)], f1].concat()),
        ];
        w.sort_by(|a, b| a.factors.cmp(&b.factors));
        assert_eq!(got, canonicalize(&w).words);
    }
}
