//! Momentum integrals `∫ d^dp/(2π)^d` in `d` dimensions.
//!
//! Scalar (boson) integrands use the standard master formula. Dirac
//! integrands are functions of `S = p·γ` and are integrated branch by branch:
//! on the eigenspaces `S = ±|p|` the symbol `φ + iS` becomes `φ ± i|p|`, and the
//! spinor trace picks out the average over both branches.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::clifford::{factors_of, spinor_trace, GammaFactor, GammaWord};
use crate::error::{Error, Result};
use crate::expr::{expand_terms, q, qr, ratfunc_to_expr, simplify, Exponent, Expr, MomentumAtom, Q};
use crate::phasespace::{Base, BaseKind, Factor, NCWord};

/// `2/((4π)^{d/2} Γ(d/2))`, the angular volume over `(2π)^d`.
pub fn angular_measure() -> Expr {
    let half_d = Exponent::new(q(0), q(0), qr(1, 2));
    simplify(&(Expr::int(2) / ((Expr::int(4) * Expr::pi()).pow(half_d.clone()) * Expr::gamma(half_d))))
}

fn momentum_rank(fs: &[Expr]) -> Result<(Vec<String>, Vec<Expr>)> {
    let mut idx = Vec::new();
    let mut rest = Vec::new();
    for f in fs {
        match f {
            Expr::Momentum(MomentumAtom::Component(a)) => idx.push(a.clone()),
            Expr::Power(b, e) if matches!(b.as_ref(), Expr::Momentum(MomentumAtom::Component(_))) => {
                let Expr::Momentum(MomentumAtom::Component(a)) = b.as_ref() else { unreachable!() };
                let k = e
                    .as_integer()
                    .filter(|k| *k > 0)
                    .ok_or(Error::UnsupportedRank(usize::MAX))?;
                idx.extend(std::iter::repeat_n(a.clone(), k as usize));
            }
            o => rest.push(o.clone()),
        }
    }
    Ok((idx, rest))
}

/// Replaces momentum components by their rotational average:
/// `p^a p^b → δ^{ab}p²/d`, rank 4 likewise, odd ranks vanish.
pub fn tensor_reduce(e: &Expr) -> Result<Expr> {
    let mut out = Vec::new();
    for (c, mono) in expand_terms(e) {
        let (idx, rest) = momentum_rank(&factors_of(&mono))?;
        let structure = match idx.len() {
            0 => Expr::one(),
            n if n % 2 == 1 => continue,
            2 => Expr::delta(&idx[0], &idx[1]) * Expr::p2() / Expr::d(),
            4 => {
                let d = |i: usize, j: usize| Expr::delta(&idx[i], &idx[j]);
                (d(0, 1) * d(2, 3) + d(0, 2) * d(1, 3) + d(0, 3) * d(1, 2)) * Expr::p2().powi(2)
                    / (Expr::d() * (Expr::d() + Expr::int(2)))
            }
            n => return Err(Error::UnsupportedRank(n)),
        };
        out.push(ratfunc_to_expr(&c) * Expr::Product(rest) * structure);
    }
    Ok(simplify(&Expr::Sum(out)))
}

/// Splits a momentum-component-free expression by its power of `p²`.
pub fn split_p2_power(e: &Expr) -> Result<Vec<(Q, Expr)>> {
    let mut groups: Vec<(Q, Vec<Expr>)> = Vec::new();
    for (c, mono) in expand_terms(e) {
        let mut k = Q::zero();
        let mut rest = vec![ratfunc_to_expr(&c)];
        for f in factors_of(&mono) {
            match &f {
                Expr::Momentum(MomentumAtom::Square) => k += q(1),
                Expr::Power(b, x) if matches!(b.as_ref(), Expr::Momentum(MomentumAtom::Square)) => {
                    if !x.is_constant() {
                        return Err(Error::NoRule(format!("non-constant power of p²: {f}")));
                    }
                    k += x.c.clone();
                }
                Expr::Momentum(MomentumAtom::Component(_)) => {
                    return Err(Error::NoRule(format!("unreduced momentum component in {mono}")))
                }
                _ => rest.push(f.clone()),
            }
        }
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, v)) => v.push(Expr::Product(rest)),
            None => groups.push((k, vec![Expr::Product(rest)])),
        }
    }
    Ok(groups.into_iter().map(|(k, v)| (k, simplify(&Expr::Sum(v)))).collect())
}

fn gamma_pole(e: &Exponent) -> bool {
    e.s.is_zero() && e.d.is_zero() && e.c.is_integer() && e.c <= Q::zero()
}

/// `∫ d^dp/(2π)^d (p²)^m (p²+a)^{-σ} = Γ(m+d/2)Γ(σ-m-d/2) / ((4π)^{d/2} Γ(d/2) Γ(σ)) a^{d/2+m-σ}`.
pub fn scalar_master(a: &Expr, sigma: &Exponent, m: &Q) -> Result<Expr> {
    let half_d = Exponent::new(q(0), q(0), qr(1, 2));
    let top = half_d.add(&Exponent::constant(m.clone()));
    let tail = sigma.sub(&top);
    if gamma_pole(&top) || gamma_pole(&tail) {
        return Err(Error::ValidityViolated(format!("Γ pole in the scalar master at σ = {sigma:?}, m = {m}")));
    }
    let e = Expr::gamma(top.clone()) * Expr::gamma(tail.clone())
        / ((Expr::int(4) * Expr::pi()).pow(half_d.clone()) * Expr::gamma(half_d) * Expr::gamma(sigma.clone()))
        * a.clone().pow(top.sub(sigma));
    Ok(simplify(&e))
}

/// One radial integral `∫ d^dp/(2π)^d |p|^j Avg_±[(±1)^m (φ + iκ(±|p|))^{-σ}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialPiece {
    pub coeff: Expr,
    pub j: i64,
    /// 0 for the even branch average, 1 for the odd one.
    pub m: u8,
    pub base: Base,
    pub sigma: Exponent,
}

impl RadialPiece {
    /// `x = d + j`, the radial power.
    pub fn x(&self) -> Exponent {
        Exponent::new(q(self.j), q(0), q(1))
    }
}

/// Closed form of a radial piece with `d` symbolic:
/// `κ^m K_d φ^{x-σ} Γ(x)Γ(σ-x)/Γ(σ) · {cos(πx/2), -i sin(πx/2)}`.
pub fn radial_master(p: &RadialPiece) -> Result<Expr> {
    let kappa = match p.base.kind {
        BaseKind::A => 1,
        BaseKind::AStar => -1,
        BaseKind::Phi => return Ok(Expr::zero()),
        _ => return Err(Error::NoRule(format!("radial master for base {}", p.base.name()))),
    };
    let x = p.x();
    let tail = p.sigma.sub(&x);
    let branch = if p.m == 0 {
        Expr::SinPi(x.add(&Exponent::int(1)).scale(&qr(1, 2)))
    } else {
        -Expr::i() * Expr::SinPi(x.scale(&qr(1, 2)))
    };
    let phi = p.base.without_eps().scalar_part();
    let e = p.coeff.clone()
        * Expr::int(if p.m == 1 { kappa } else { 1 })
        * angular_measure()
        * Expr::gamma(x.clone())
        * Expr::gamma(tail.clone())
        / Expr::gamma(p.sigma.clone())
        * phi.pow(tail.neg())
        * branch;
    Ok(simplify(&e))
}

fn gamma_factors(f: &[Factor]) -> Result<Vec<GammaFactor>> {
    f.iter()
        .map(|x| match x {
            Factor::Gamma(i) => Ok(GammaFactor::Index(i.clone())),
            Factor::Slash => Ok(GammaFactor::Slash),
            o => Err(Error::NoRule(format!("slash-function {o:?} after a gamma matrix"))),
        })
        .collect()
}

/// Traces a post-semigroup word and reduces it to radial pieces.
///
/// The word must read `B^{-σ} S^n Γ`, with `B` the only λ-free power factor
/// and `Γ` a gamma word.
pub fn spectral_pieces(w: &NCWord) -> Result<Vec<RadialPiece>> {
    let head = w.factors.iter().take_while(|f| f.is_slash_function()).count();
    let (sfun, gam) = w.factors.split_at(head);
    let mut gword = gamma_factors(gam)?;
    let mut pow: Option<(Base, Exponent)> = None;
    let mut slashes = Vec::new();
    for f in sfun {
        match f {
            Factor::Pow { base, exp } if pow.is_none() => pow = Some((*base, exp.clone())),
            Factor::Slash => slashes.push(GammaFactor::Slash),
            o => return Err(Error::NoRule(format!("unsupported factor {o:?} in {:?}", w.factors))),
        }
    }
    let (base, exp) = pow.ok_or_else(|| Error::NoRule(format!("no integrated power in {:?}", w.factors)))?;
    let sigma = exp.neg();
    slashes.append(&mut gword);
    let gword = slashes;
    let mut out = Vec::new();
    if base.kind == BaseKind::Boson {
        if !gword.is_empty() {
            return Err(Error::NoRule("gamma matrices in a scalar symbol".into()));
        }
        for (k, c) in split_p2_power(&tensor_reduce(&w.coeff)?)? {
            let k2 = (k.clone() * q(2)).to_integer().to_i64().unwrap_or(0);
            out.push(RadialPiece { coeff: c, j: k2, m: 0, base, sigma: sigma.clone() });
        }
        return Ok(out);
    }
    // tr[(E + O S) F] = E tr F + O tr(S F), with O carrying 1/|p|
    let even = spinor_trace(&GammaWord::new(w.coeff.clone(), gword.clone()));
    let mut with_s = vec![GammaFactor::Slash];
    with_s.extend(gword);
    let odd = spinor_trace(&GammaWord::new(w.coeff.clone(), with_s));
    for (m, part) in [(0u8, even), (1u8, odd)] {
        for (k, c) in split_p2_power(&tensor_reduce(&part)?)? {
            if c == Expr::zero() {
                continue;
            }
            let j = (k * q(2)).to_integer().to_i64().expect("integral |p| power") - m as i64;
            out.push(RadialPiece { coeff: c, j, m, base, sigma: sigma.clone() });
        }
    }
    Ok(out)
}

/// Momentum integral of a post-semigroup word with `d` symbolic.
pub fn integrate_word(w: &NCWord) -> Result<Expr> {
    let mut total = Vec::new();
    for p in spectral_pieces(w)? {
        total.push(match p.base.kind {
            BaseKind::Boson => {
                let a = Expr::field(crate::phasespace::BOSON_FIELD);
                p.coeff.clone() * scalar_master(&a, &p.sigma, &qr(p.j, 2))?
            }
            _ => radial_master(&p)?,
        });
    }
    Ok(simplify(&Expr::Sum(total)))
}

/// `tr ∫ d^dp/(2π)^d (φ + iγ·p)^{-σ}` in the form
/// `2^{d/2} π^{1/2-d/2} φ^{-σ} (φ²)^{d/2} Γ(σ-d) / (Γ(1/2-d/2) Γ(σ))`.
pub fn dirac_power_trace(phi: &Expr, sigma: &Exponent) -> Result<Expr> {
    let d = Exponent::new(q(0), q(0), q(1));
    let tail = sigma.sub(&d);
    let at_four = Exponent::new(tail.c.clone() + q(4) * tail.d.clone(), tail.s.clone(), q(0));
    if gamma_pole(&tail) || gamma_pole(&at_four) {
        return Err(Error::ValidityViolated(format!("Γ(σ-d) has a pole at σ = {sigma:?}")));
    }
    let half_d = d.scale(&qr(1, 2));
    let e = Expr::int(2).pow(half_d.clone())
        * Expr::pi().pow(Exponent::constant(qr(1, 2)).sub(&half_d))
        * phi.clone().pow(sigma.neg())
        * phi.clone().powi(2).pow(half_d.clone())
        * Expr::gamma(tail)
        / (Expr::gamma(Exponent::constant(qr(1, 2)).sub(&half_d)) * Expr::gamma(sigma.clone()));
    Ok(simplify(&e))
}

/// A registered Dirac-sector integral.
#[derive(Clone, Debug, Serialize)]
pub struct RuleRecord {
    pub id: &'static str,
    /// Human-readable integrand shape.
    pub pattern: &'static str,
    /// Expected closed form, as LaTeX, with `d = 4`.
    pub result: String,
    pub validity: &'static str,
    /// Oracle claim that checks the rule numerically.
    pub claim: &'static str,
}

pub fn dirac_rule_table() -> Vec<RuleRecord> {
    vec![
        RuleRecord {
            id: "dirac-power-trace",
            pattern: "tr (phi + i p.gamma)^(-s)",
            result: r"\frac{3\phi^{4-s}\Gamma(s-4)}{\pi^{2}\Gamma(s)}".into(),
            validity: "0 < Re d < Re s",
            claim: "dirac-power-trace",
        },
        RuleRecord {
            id: "mixed-gamma-gamma",
            pattern: "-1/4 tr (l+A)^-3 (l+A*)^-1 g^mu g^nu d_mu d_nu phi",
            result: r"\frac{\phi^{1-s}\partial^2\phi}{8\pi^{2}(s-1)}".into(),
            validity: "Re s > 1; finite part at t = 1/2",
            claim: "rule-mixed-gamma-gamma",
        },
        RuleRecord {
            id: "pure-slash-gamma",
            pattern: "-1/4 tr (l+A)^-4 (p^mu/p^2) S g^nu d_mu d_nu phi",
            result: r"-\frac{\phi^{1-s}\partial^2\phi}{32\pi^{2}(s-1)}".into(),
            validity: "Re s > 1",
            claim: "rule-pure-slash-gamma",
        },
        RuleRecord {
            id: "mixed-slash-gamma",
            pattern: "+1/4 tr (l+A)^-3 (l+A*)^-1 (p^mu/p^2) S g^nu d_mu d_nu phi",
            result: r"-\frac{\phi^{1-s}\partial^2\phi}{32\pi^{2}(s-1)}".into(),
            validity: "Re s > 1; finite part at t = 1/2",
            claim: "rule-mixed-slash-gamma",
        },
    ]
}

/// The rule table as a JSON manifest.
pub fn rule_manifest() -> serde_json::Value {
    serde_json::json!({ "schema_version": 1, "rules": dirac_rule_table() })
}

/// Looks up a rule by id.
pub fn dirac_rule(id: &str) -> Result<RuleRecord> {
    dirac_rule_table()
        .into_iter()
        .find(|r| r.id == id)
        .ok_or_else(|| Error::NoRule(format!("no registered integral '{id}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::pin_dimension;

    #[test]
    fn tensor_reduction() {
        let v = Expr::field_d("V", &["a", "b"]);
        let got = tensor_reduce(&(Expr::p("a") * Expr::p("b") * v)).unwrap();
        assert_eq!(got, simplify(&(Expr::p2() * Expr::laplacian("V") / Expr::d())));
        assert_eq!(tensor_reduce(&(Expr::p("a") * Expr::field_d("V", &["a"]))).unwrap(), Expr::zero());
        let r4 = Expr::p("a") * Expr::p("b") * Expr::p("c") * Expr::p("e") * Expr::field_d("V", &["a", "b", "c", "e"]);
        let want = Expr::int(3) * Expr::p2().powi(2) * Expr::Field(crate::expr::FieldAtom { name: "V".into(), indices: vec![], laplacians: 2 })
            / (Expr::d() * (Expr::d() + Expr::int(2)));
        assert_eq!(tensor_reduce(&r4).unwrap(), simplify(&want));
        let r6 = Expr::product(["a", "b", "c", "e", "f", "g"].map(Expr::p));
        assert!(matches!(tensor_reduce(&r6), Err(Error::UnsupportedRank(6))));
    }

    #[test]
    fn scalar_master_at_four() {
        let v = Expr::field("V");
        let got = pin_dimension(&scalar_master(&v, &Exponent::affine(q(0), q(1)), &q(0)).unwrap());
        let s = Expr::s();
        let want = v.pow(Exponent::affine(q(2), q(-1)))
            / (Expr::int(16) * Expr::pi().powi(2) * (s.clone() - Expr::one()) * (s - Expr::int(2)));
        assert_eq!(got, simplify(&want));
    }

    #[test]
    fn power_trace_limit() {
        let phi = Expr::field("phi");
        let s = Exponent::affine(q(0), q(1));
        let got = pin_dimension(&dirac_power_trace(&phi, &s).unwrap());
        let want = Expr::int(3) * phi.clone().pow(Exponent::affine(q(4), q(-1))) * Expr::gamma(Exponent::affine(q(-4), q(1)))
            / (Expr::pi().powi(2) * Expr::gamma(s.clone()));
        assert_eq!(got, simplify(&want));
        assert!(matches!(dirac_power_trace(&phi, &Exponent::int(4)), Err(Error::ValidityViolated(_))));
        // the branch form with tr 1 = 4 agrees at d = 4
        let w = NCWord::new(Expr::one(), vec![Factor::Pow { base: Base::A, exp: s.neg() }]);
        assert_eq!(pin_dimension(&integrate_word(&w).unwrap()), got);
    }

    #[test]
    fn table_lookup() {
        assert!(dirac_rule("pure-slash-gamma").is_ok());
        assert!(matches!(dirac_rule("nope"), Err(Error::NoRule(_))));
        assert_eq!(rule_manifest()["rules"].as_array().unwrap().len(), 4);
    }
}
