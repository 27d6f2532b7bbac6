//! Zeta-function densities and their `s`-derivative at zero.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clifford::gamma_pass;
use crate::error::{Error, Result};
use crate::expr::{
    diff_x, expand_terms, params, pin_dimension, q, qr, ratfunc_to_expr, render, simplify, Exponent, Expr, Format, Qi, RatFunc, Q,
};
use crate::mellin::{feynman_combine, feynman_scale_integral, identity_path, mellin_word, MellinTerm};
use crate::momint::{integrate_word, radial_master, spectral_pieces};
use crate::phasespace::{canonicalize, Base, BaseKind, Factor, NCWord};
use crate::resolvent::{resolvent_expand_with, OperatorKind, OperatorSpec, Recursion, PAPER_MAX_ORDER};

/// How the mixed `(λ+Ã)^{-a}(λ+Ã*)^{-b}` λ-integrals are done.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiracPath {
    /// Feynman parameter and Hadamard finite part.
    #[default]
    FeynmanFp,
    /// Partial-fraction identity with the `iε` shift.
    OperatorIdentity,
}

/// Density of `ζ(s)` under `∫ d⁴x`, split by ħ order, at `d = 4`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaDensity {
    pub kind: OperatorKind,
    pub by_order: Vec<Expr>,
}

impl ZetaDensity {
    pub fn total(&self) -> Expr {
        simplify(&Expr::Sum(self.by_order.clone()))
    }
}

/// Integrates one single-base or mixed word over λ and p, with `d` symbolic
/// except where the Feynman finite part needs it pinned.
fn integrate_lambda_p(w: &NCWord, path: DiracPath) -> Result<Expr> {
    let term = MellinTerm::new(w.clone())?;
    let mixed = {
        let mut bases = w.factors.iter().filter_map(|f| match f {
            Factor::Res { base, .. } => Some(*base),
            _ => None,
        });
        let first = bases.next();
        bases.any(|b| Some(b) != first)
    };
    if !mixed {
        return integrate_word(&mellin_word(&term)?);
    }
    match path {
        DiracPath::FeynmanFp => {
            let ft = feynman_combine(&term)?;
            let mut pw = mellin_word(&ft.term)?;
            for f in pw.factors.iter_mut() {
                if let Factor::Pow { base, .. } = f {
                    if base.kind == BaseKind::Feynman {
                        *base = Base::A;
                    }
                }
            }
            let mut total = Vec::new();
            for piece in spectral_pieces(&pw)? {
                let x = piece.x();
                let x4 = x.c.clone() + x.d.clone() * crate::expr::q(4);
                let fp = feynman_scale_integral(&ft.weight, &x4, piece.m)?;
                total.push(pin_dimension(&radial_master(&piece)?) * Expr::Rational(fp));
            }
            Ok(simplify(&Expr::Sum(total)))
        }
        DiracPath::OperatorIdentity => {
            let words = identity_path(&term)?;
            let parts: Result<Vec<Expr>> = words.iter().map(integrate_word).collect();
            Ok(simplify(&Expr::Sum(parts?)))
        }
    }
}

/// Rewrites a cyclic-normal Dirac word so every gamma matrix sits to the
/// right of all slash-functions.
fn pass_gammas(w: &NCWord) -> Result<Vec<NCWord>> {
    let f = &w.factors;
    let has_gamma = f.iter().any(|x| matches!(x, Factor::Gamma(_)));
    if !has_gamma {
        return Ok(vec![w.clone()]);
    }
    match f.as_slice() {
        [head @ Factor::Res { .. }, g1 @ Factor::Gamma(_), r @ Factor::Res { .. }, g2 @ Factor::Gamma(_)] => {
            let inner = NCWord::new(w.coeff.clone(), vec![g1.clone(), r.clone(), g2.clone()]);
            let out: Vec<NCWord> = gamma_pass(&inner)?
                .into_iter()
                .map(|x| {
                    let mut fs = vec![head.clone()];
                    fs.extend(x.factors);
                    NCWord::new(x.coeff, fs)
                })
                .collect();
            Ok(canonicalize(&out).words)
        }
        _ if f.iter().skip_while(|x| x.is_slash_function()).all(|x| !x.is_slash_function()) => Ok(vec![w.clone()]),
        _ => Err(Error::PatternMismatch(format!("no gamma-passing rule for {f:?}"))),
    }
}

/// `ζ(s)` density contributed by one trace word, at `d = 4`.
pub fn word_zeta(w: &NCWord, path: DiracPath) -> Result<Expr> {
    let mut parts = Vec::new();
    for v in pass_gammas(w)? {
        parts.push(integrate_lambda_p(&v, path)?);
    }
    Ok(simplify(&pin_dimension(&Expr::Sum(parts))))
}

/// `ζ(s)` density of the operator through ħ order `order`.
pub fn zeta_density(op: &OperatorSpec, order: usize, path: DiracPath) -> Result<ZetaDensity> {
    zeta_density_with(op, order, path, Recursion::Full)
}

pub fn zeta_density_with(op: &OperatorSpec, order: usize, path: DiracPath, recursion: Recursion) -> Result<ZetaDensity> {
    if order > PAPER_MAX_ORDER {
        return Err(Error::OrderTooLarge { requested: order, max: PAPER_MAX_ORDER });
    }
    let exp = resolvent_expand_with(op, order, false, recursion)?;
    let terms = match op.kind {
        OperatorKind::Boson => exp.terms.clone(),
        OperatorKind::Dirac => exp.cyclic_form(),
    };
    let mut by_order = Vec::new();
    for sym in &terms {
        let mut words = Vec::new();
        for w in &sym.words {
            words.extend(pass_gammas(w)?);
        }
        let parts = words.par_iter().map(|v| integrate_lambda_p(v, path)).collect::<Result<Vec<_>>>()?;
        by_order.push(simplify(&pin_dimension(&Expr::Sum(parts))));
    }
    Ok(ZetaDensity { kind: op.kind, by_order })
}

/// Mass dimension of the operator, which is also that of its field.
pub fn operator_dimension(kind: OperatorKind) -> i64 {
    match kind {
        OperatorKind::Boson => 2,
        OperatorKind::Dirac => 1,
    }
}

fn factors(m: &Expr) -> Vec<Expr> {
    match m {
        Expr::Product(v) => v.clone(),
        Expr::Rational(r) if *r == q(1) => vec![],
        e => vec![e.clone()],
    }
}

fn is_gradient(f: &Expr) -> bool {
    match f {
        Expr::Field(a) => a.order() > 0,
        Expr::Power(b, _) => is_gradient(b),
        _ => false,
    }
}

fn ratfunc_derivative_at_zero(r: &RatFunc) -> Result<(Qi, Qi)> {
    let zero = Qi::zero();
    let pole = || Error::PoleAtZero(format!("coefficient {} is singular at s = 0", render(&ratfunc_to_expr(r), Format::Text)));
    let r0 = r.eval(&zero).ok_or_else(pole)?;
    let r1 = r.derivative().eval(&zero).ok_or_else(pole)?;
    Ok((r0, r1))
}

fn qi_expr(x: &Qi) -> Expr {
    ratfunc_to_expr(&RatFunc::constant(x.clone()))
}

/// One term `coeff · grad_factor · ln(log_arg)`; without `log_arg` the log is absent.
#[derive(Clone, Debug, PartialEq)]
pub struct DetTerm {
    pub coeff: Expr,
    pub log_arg: Option<Expr>,
    pub grad_factor: Expr,
}

impl DetTerm {
    pub fn to_expr(&self) -> Expr {
        let base = self.coeff.clone() * self.grad_factor.clone();
        match &self.log_arg {
            Some(a) => base * Expr::log(a.clone()),
            None => base,
        }
    }
}

/// Density of `ln det` under `∫ d⁴x`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetDensity {
    pub terms: Vec<DetTerm>,
}

impl DetDensity {
    pub fn to_expr(&self) -> Expr {
        simplify(&Expr::Sum(self.terms.iter().map(DetTerm::to_expr).collect()))
    }

    /// Regroups an expression into terms with one logarithm each, the scale
    /// entering as `μ^{-2}` inside the log.
    pub fn from_expr(e: &Expr) -> Result<DetDensity> {
        let mu = Expr::param(params::MU);
        // group key: non-log monomial; value: (log atom -> coefficient, constant part)
        let mut groups: BTreeMap<Expr, (BTreeMap<Expr, Qi>, Qi)> = BTreeMap::new();
        for (r, m) in expand_terms(e) {
            let c = r
                .as_constant()
                .ok_or_else(|| Error::PatternMismatch(format!("s-dependent determinant term {}", render(&m, Format::Text))))?;
            let mut key = Vec::new();
            let mut log = None;
            for f in factors(&m) {
                match f {
                    Expr::Log(a) if log.is_none() => log = Some(*a),
                    Expr::Log(_) => return Err(Error::PatternMismatch(format!("product of logarithms in {}", render(&m, Format::Text)))),
                    other => key.push(other),
                }
            }
            let slot = groups.entry(simplify(&Expr::Product(key))).or_insert_with(|| (BTreeMap::new(), Qi::zero()));
            match log {
                Some(a) => {
                    let v = slot.0.entry(a).or_insert_with(Qi::zero);
                    *v = &*v + &c;
                }
                None => slot.1 = &slot.1 + &c,
            }
        }
        let mut terms = Vec::new();
        for (key, (logs, constant)) in groups {
            let logs: Vec<(Expr, Qi)> = logs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            let (grad, rest): (Vec<Expr>, Vec<Expr>) = factors(&key).into_iter().partition(is_gradient);
            let grad_factor = simplify(&Expr::Product(grad));
            let rest = simplify(&Expr::Product(rest));
            if logs.is_empty() {
                if !constant.is_zero() {
                    terms.push(DetTerm { coeff: simplify(&(qi_expr(&constant) * rest)), log_arg: None, grad_factor });
                }
                continue;
            }
            // normalize so that μ enters as μ^{-2}, else so that the first log has unit power
            let scale = match logs.iter().find(|(a, _)| *a == mu) {
                Some((_, c)) => c * &Qi::real(qr(-1, 2)),
                None => logs[0].1.clone(),
            };
            let inv = scale.inv();
            let mut arg = Vec::new();
            for (a, c) in &logs {
                let k = c * &inv;
                if !k.is_real() {
                    return Err(Error::PatternMismatch(format!("complex log weight in {}", render(&key, Format::Text))));
                }
                arg.push(a.clone().pow(Exponent::constant(k.re)));
            }
            let k0 = &constant * &inv;
            if !k0.is_zero() {
                if !k0.is_real() {
                    return Err(Error::PatternMismatch(format!("complex log constant in {}", render(&key, Format::Text))));
                }
                arg.push(Expr::e().pow(Exponent::constant(k0.re)));
            }
            terms.push(DetTerm {
                coeff: simplify(&(qi_expr(&scale) * rest)),
                log_arg: Some(simplify(&Expr::Product(arg))),
                grad_factor,
            });
        }
        Ok(DetDensity { terms })
    }

    /// Term by term, each logarithm kept whole.
    pub fn render(&self, fmt: Format) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, t) in self.terms.iter().enumerate() {
            let front = simplify(&(t.coeff.clone() * t.grad_factor.clone()));
            let mut body = render(&front, fmt);
            if let Some(a) = &t.log_arg {
                let inner = body.trim_start_matches('-');
                if inner.contains(" + ") || inner.contains(" - ") {
                    body = format!("({body})");
                }
                let arg = render(&simplify(a), fmt);
                body = match fmt {
                    Format::Latex => format!(r"{body} \ln\left({arg}\right)"),
                    _ => format!("{body}*ln({arg})"),
                };
            }
            match body.strip_prefix('-') {
                Some(rest) if k > 0 => out.push_str(&format!(" - {rest}")),
                _ if k > 0 => out.push_str(&format!(" + {body}")),
                _ => out.push_str(&body),
            }
        }
        out
    }

    /// JSON array of `{"coeff", "log_arg", "grad_factor"}` strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    json!({
                        "coeff": render(&t.coeff, Format::Text),
                        "log_arg": t.log_arg.as_ref().map(|a| render(a, Format::Text)),
                        "grad_factor": render(&t.grad_factor, Format::Text),
                    })
                })
                .collect(),
        )
    }
}

/// `ln det = −∂_s ζ(s)|_{s=0}` with the scale inserted so every log is dimensionless.
pub fn ds_at_zero(z: &ZetaDensity) -> Result<DetDensity> {
    let dim = Qi::int(operator_dimension(z.kind));
    let ln_mu = Expr::log(Expr::param(params::MU));
    let mut out = Vec::new();
    for (r, m) in expand_terms(&z.total()) {
        let mut k = Q::from_integer(0.into());
        let mut field = None;
        let mut rest = Vec::new();
        for f in factors(&m) {
            match &f {
                Expr::Power(b, e) if !e.s.is_zero() => {
                    if field.is_some() || !matches!(b.as_ref(), Expr::Field(a) if a.order() == 0) || !e.d.is_zero() {
                        return Err(Error::NoRule(format!("s-dependence outside one field power: {}", render(&m, Format::Text))));
                    }
                    k = e.s.clone();
                    field = Some((**b).clone());
                    rest.push((**b).clone().pow(Exponent::constant(e.c.clone())));
                }
                _ => rest.push(f),
            }
        }
        let x = Expr::Product(rest);
        let (r0, r1) = ratfunc_derivative_at_zero(&r)?;
        // −∂_s[r(s) F^{ks} μ^{dim·s}] at s = 0
        let mut t = -qi_expr(&r1);
        if !r0.is_zero() {
            let mut logs = qi_expr(&dim) * ln_mu.clone();
            if let Some(f) = field {
                logs = logs + Expr::Rational(k) * Expr::log(f);
            }
            t = t - qi_expr(&r0) * logs;
        }
        out.push(t * x);
    }
    DetDensity::from_expr(&simplify(&Expr::Sum(out)))
}

/// Integration by parts `f(F)∂²F → −f′(F)(∂F)²` on every term whose gradient
/// factor is a single Laplacian. Returns the rewritten density and the
/// discarded total derivative.
pub fn integrate_by_parts_normalize(dd: &DetDensity) -> Result<(DetDensity, Expr)> {
    const IX: &str = "a";
    let mut kept = Vec::new();
    let mut boundary = Vec::new();
    for t in &dd.terms {
        match &t.grad_factor {
            Expr::Field(a) if a.laplacians == 1 && a.indices.is_empty() => {
                let f = match &t.log_arg {
                    Some(l) => t.coeff.clone() * Expr::log(l.clone()),
                    None => t.coeff.clone(),
                };
                let df = diff_x(&f, IX);
                let dfield = Expr::field_d(&a.name, &[IX]);
                kept.push(-(df * dfield.clone()));
                boundary.push(diff_x(&(f * dfield), IX));
            }
            _ => kept.push(t.to_expr()),
        }
    }
    Ok((DetDensity::from_expr(&simplify(&Expr::Sum(kept)))?, simplify(&Expr::Sum(boundary))))
}

/// Mass dimensions of the symbols that may appear in a density.
pub fn default_dimensions() -> BTreeMap<String, Q> {
    [("V", 2), ("phi", 1), (params::MU, 1), ("m", 1), ("lc", 0), ("gt", 0), ("V[]", 4), (params::S, 0)]
        .into_iter()
        .map(|(n, d)| (n.to_string(), Q::from_integer(d.into())))
        .collect()
}

/// Mass dimension of one monomial, affine in `s`.
pub fn mass_dimension(m: &Expr, dims: &BTreeMap<String, Q>) -> Result<Exponent> {
    let lookup = |n: &str| dims.get(n).cloned().ok_or_else(|| Error::UnboundSymbol(n.to_string()));
    Ok(match m {
        Expr::Rational(_) | Expr::Constant(_) | Expr::Gamma(_) | Expr::SinPi(_) | Expr::Delta(..) => Exponent::int(0),
        Expr::Param(n) => Exponent::constant(lookup(n)?),
        Expr::Field(a) => Exponent::constant(lookup(&a.name)? + Q::from_integer((a.order() as i64).into())),
        Expr::Momentum(_) => return Err(Error::PatternMismatch("momentum in a spacetime density".into())),
        Expr::Func(n, _) => Exponent::constant(lookup(&format!("{n}[]"))?),
        Expr::Log(a) => {
            let d = mass_dimension_of(a, dims)?;
            if !d.is_zero() {
                return Err(Error::ValidityViolated(format!("logarithm of a dimensionful argument {}", render(a, Format::Text))));
            }
            Exponent::int(0)
        }
        Expr::Power(b, e) => {
            let db = mass_dimension(b, dims)?;
            db.mul(e).ok_or_else(|| Error::ValidityViolated(format!("power of an s-dependent dimension {}", render(m, Format::Text))))?
        }
        Expr::Product(v) => {
            let mut acc = Exponent::int(0);
            for f in v {
                acc = acc.add(&mass_dimension(f, dims)?);
            }
            acc
        }
        Expr::Sum(_) => mass_dimension_of(m, dims)?,
    })
}

/// Dimension shared by every term of `e`; mismatched terms are an error.
pub fn mass_dimension_of(e: &Expr, dims: &BTreeMap<String, Q>) -> Result<Exponent> {
    let mut out: Option<Exponent> = None;
    for (_, m) in expand_terms(e) {
        let d = mass_dimension(&m, dims)?;
        match &out {
            Some(o) if *o != d => {
                return Err(Error::ValidityViolated(format!("inhomogeneous dimensions in {}", render(e, Format::Text))))
            }
            _ => out = Some(d),
        }
    }
    Ok(out.unwrap_or_else(|| Exponent::int(0)))
}

/// Checks that every ζ term has dimension `4 − dim·s` (the `μ^{dim·s}` is implicit).
pub fn check_zeta_dimensions(z: &ZetaDensity) -> Result<()> {
    let want = Exponent::affine(q(4), q(-operator_dimension(z.kind)));
    check_terms(&z.total(), &want)
}

/// Checks that every determinant term has dimension four and a dimensionless log argument.
pub fn check_det_dimensions(dd: &DetDensity) -> Result<()> {
    for t in &dd.terms {
        check_terms(&(t.coeff.clone() * t.grad_factor.clone()), &Exponent::int(4))?;
        if let Some(a) = &t.log_arg {
            check_terms(a, &Exponent::int(0))?;
        }
    }
    Ok(())
}

fn check_terms(e: &Expr, want: &Exponent) -> Result<()> {
    let dims = default_dimensions();
    for (_, m) in expand_terms(e) {
        let d = mass_dimension(&m, &dims)?;
        if d != *want {
            return Err(Error::ValidityViolated(format!(
                "term {} has dimension {}, expected {}",
                render(&m, Format::Text),
                render(&d.to_expr(), Format::Text),
                render(&want.to_expr(), Format::Text)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{q, Exponent};

    fn pi2() -> Expr {
        Expr::pi().powi(2)
    }

    #[test]
    fn boson_zeta() {
        let z = zeta_density(&OperatorSpec::boson(), 2, DiracPath::default()).unwrap();
        let s = Expr::s();
        let v = |c: i64| Expr::field("V").pow(Exponent::affine(q(c), q(-1)));
        let want = (v(2) / ((s.clone() - Expr::one()) * (s.clone() - Expr::int(2)))
            - v(0) * Expr::laplacian("V") / Expr::int(6)
            + s.clone() * v(-1) * Expr::field_d("V", &["a"]) * Expr::field_d("V", &["a"]) / Expr::int(12))
            / (Expr::int(16) * pi2());
        assert_eq!(z.total(), simplify(&want));
        assert_eq!(z.by_order[1], Expr::zero());
    }

    fn phi(c: i64) -> Expr {
        Expr::field("phi").pow(Exponent::affine(q(c), q(-1)))
    }

    fn grad2(f: &str) -> Expr {
        Expr::field_d(f, &["a"]) * Expr::field_d(f, &["a"])
    }

    fn mu2() -> Expr {
        Expr::param(params::MU).powi(2)
    }

    #[test]
    fn dirac_zeta_by_recursion() {
        let s = Expr::s();
        let lead = (Expr::int(3) * phi(4)
            / ((s.clone() - Expr::one()) * (s.clone() - Expr::int(2)) * (s.clone() - Expr::int(3)) * (s.clone() - Expr::int(4)))
            + phi(1) * Expr::laplacian("phi") / (Expr::int(16) * (s.clone() - Expr::one())))
            / pi2();
        let full = (Expr::int(3) * phi(4)
            / ((s.clone() - Expr::one()) * (s.clone() - Expr::int(2)) * (s.clone() - Expr::int(3)) * (s.clone() - Expr::int(4)))
            + phi(1) * Expr::laplacian("phi") / (Expr::int(4) * (s.clone() - Expr::one()))
            - phi(0) * grad2("phi") / Expr::int(8))
            / pi2();
        for path in [DiracPath::FeynmanFp, DiracPath::OperatorIdentity] {
            let z = zeta_density_with(&OperatorSpec::dirac(), 2, path, Recursion::LeadingBracket).unwrap();
            assert_eq!(z.total(), simplify(&lead));
            let z = zeta_density_with(&OperatorSpec::dirac(), 2, path, Recursion::Full).unwrap();
            assert_eq!(z.total(), simplify(&full));
            check_zeta_dimensions(&z).unwrap();
        }
    }

    #[test]
    fn boson_determinant() {
        let z = zeta_density(&OperatorSpec::boson(), 2, DiracPath::default()).unwrap();
        let (dd, _) = integrate_by_parts_normalize(&ds_at_zero(&z).unwrap()).unwrap();
        let v = Expr::field("V");
        let want = (v.clone().powi(2) * Expr::log(Expr::e().pow(Exponent::constant(qr(-3, 2))) * v.clone() / mu2())
            + grad2("V") / (Expr::int(6) * v))
            / (Expr::int(32) * pi2());
        assert_eq!(dd.to_expr(), simplify(&want));
        assert_eq!(dd.terms.len(), 2);
        check_det_dimensions(&dd).unwrap();
    }

    #[test]
    fn dirac_determinant() {
        let f = Expr::field("phi");
        let log_phi = Expr::log(f.clone().powi(2) / mu2());
        let pot = f.clone().powi(4) * Expr::log(f.clone().powi(2) * Expr::e().pow(Exponent::constant(qr(-25, 6))) / mu2());
        let det = |rec| {
            let z = zeta_density_with(&OperatorSpec::dirac(), 2, DiracPath::default(), rec).unwrap();
            let (dd, _) = integrate_by_parts_normalize(&ds_at_zero(&z).unwrap()).unwrap();
            check_det_dimensions(&dd).unwrap();
            dd.to_expr()
        };
        let paper = (pot.clone() + log_phi.clone() * Expr::rat(1, 2) * grad2("phi")) / (Expr::int(16) * pi2());
        assert_eq!(det(Recursion::LeadingBracket), simplify(&paper));
        let full = (pot + log_phi * grad2("phi")) / (Expr::int(16) * pi2());
        assert_eq!(det(Recursion::Full), simplify(&full));
    }

    #[test]
    fn first_boson_term_before_scale() {
        let s = Expr::s();
        let z = ZetaDensity {
            kind: OperatorKind::Boson,
            by_order: vec![Expr::field("V").pow(Exponent::affine(q(2), q(-1))) / ((s.clone() - Expr::one()) * (s - Expr::int(2)))],
        };
        let dd = ds_at_zero(&z).unwrap();
        let at_mu_one = crate::expr::substitute_param(&dd.to_expr(), params::MU, &Expr::one()).unwrap();
        let v = Expr::field("V");
        assert_eq!(at_mu_one, simplify(&(v.clone().powi(2) / Expr::int(2) * (Expr::log(v) - Expr::rat(3, 2)))));
    }

    #[test]
    fn s_free_exponent_gives_derivative_only() {
        let z = ZetaDensity { kind: OperatorKind::Boson, by_order: vec![Expr::s() * grad2("V") / Expr::field("V")] };
        let dd = ds_at_zero(&z).unwrap();
        assert_eq!(dd.to_expr(), simplify(&(-grad2("V") / Expr::field("V"))));
    }

    #[test]
    fn pole_at_zero() {
        let z = ZetaDensity { kind: OperatorKind::Boson, by_order: vec![Expr::field("V").powi(2) / Expr::s()] };
        assert!(matches!(ds_at_zero(&z), Err(Error::PoleAtZero(_))));
    }

    #[test]
    fn ibp_leaves_gradient_squared_alone() {
        let dd = DetDensity::from_expr(&(grad2("V") / Expr::field("V"))).unwrap();
        let (out, boundary) = integrate_by_parts_normalize(&dd).unwrap();
        assert_eq!(out, dd);
        assert_eq!(boundary, Expr::zero());
    }

    #[test]
    fn mu_only_in_logs() {
        let z = zeta_density(&OperatorSpec::dirac(), 2, DiracPath::default()).unwrap();
        let dd = ds_at_zero(&z).unwrap();
        for t in &dd.terms {
            assert!(!t.coeff.contains_param(params::MU) && !t.grad_factor.contains_param(params::MU));
        }
        let f = Expr::field("phi");
        let at_mu = crate::expr::substitute_param(&dd.to_expr(), params::MU, &f).unwrap();
        assert!(!matches!(at_mu, Expr::Sum(ref v) if v.iter().any(|t| format!("{t:?}").contains("Param(\"mu\")"))));
    }

    #[test]
    fn dimension_mismatch_is_caught() {
        let z = ZetaDensity { kind: OperatorKind::Boson, by_order: vec![Expr::field("V").pow(Exponent::affine(q(1), q(-1)))] };
        assert!(matches!(check_zeta_dimensions(&z), Err(Error::ValidityViolated(_))));
    }
}
