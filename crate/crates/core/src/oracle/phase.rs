//! Numeric evaluation of phase-space symbols at complex `(x, p)` and the
//! Moyal-product residual of a resolvent expansion, with derivatives taken by
//! Cauchy contour integrals.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::gamma_rep::{GammaRep, M4};
use crate::error::{Error, Result};
use crate::expr::{eval_numeric_bound, params, Bindings, FieldProvider};
use crate::phasespace::{Base, Factor, NCWord, Symbol};
use crate::resolvent::{OperatorKind, ResolventExpansion};

type C = Complex64;
pub const DIM: usize = 4;

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

/// A polynomial background field of degree ≤ 4 in four variables.
#[derive(Clone, Debug)]
pub struct PolyField {
    pub name: String,
    pub terms: Vec<(f64, [u32; DIM])>,
}

impl PolyField {
    /// Value `v0` at the origin plus small random terms of degree 1 to 4.
    pub fn random(name: &str, v0: f64, rng: &mut impl Rng) -> Self {
        let mut terms = vec![(v0, [0; DIM])];
        for e0 in 0..=4u32 {
            for e1 in 0..=4 - e0 {
                for e2 in 0..=4 - e0 - e1 {
                    for e3 in 0..=4 - e0 - e1 - e2 {
                        let deg = e0 + e1 + e2 + e3;
                        if deg > 0 {
                            terms.push((rng.gen_range(-0.3..0.3) / deg as f64, [e0, e1, e2, e3]));
                        }
                    }
                }
            }
        }
        PolyField { name: name.to_string(), terms }
    }

    /// `∂^derivs` at a complex point.
    pub fn derivative(&self, x: &[C; DIM], derivs: &[usize]) -> C {
        let mut order = [0u32; DIM];
        for d in derivs {
            order[*d] += 1;
        }
        let mut total = c(0.0);
        for (coef, e) in &self.terms {
            let mut v = c(*coef);
            for k in 0..DIM {
                if e[k] < order[k] {
                    v = c(0.0);
                    break;
                }
                let falling: u32 = (e[k] - order[k] + 1..=e[k]).product();
                v *= c(falling as f64) * x[k].powu(e[k] - order[k]);
            }
            total += v;
        }
        total
    }
}

struct FieldAt {
    field: Arc<PolyField>,
    x: [C; DIM],
}

impl FieldProvider for FieldAt {
    fn value(&self, name: &str, derivs: &[usize]) -> Option<C> {
        (name == self.field.name).then(|| self.field.derivative(&self.x, derivs))
    }
}

/// A sampled phase-space point.
#[derive(Clone, Debug)]
pub struct PhasePoint {
    pub x: [C; DIM],
    pub p: [C; DIM],
    pub lambda: C,
}

impl PhasePoint {
    fn shifted(&self, z: C, dir: &[f64; 2 * DIM]) -> PhasePoint {
        let mut out = self.clone();
        for k in 0..DIM {
            out.x[k] += z * dir[k];
            out.p[k] += z * dir[DIM + k];
        }
        out
    }
}

/// Evaluates symbols with an explicit gamma representation.
pub struct SymbolEvaluator {
    pub rep: GammaRep,
    pub field: Arc<PolyField>,
}

impl SymbolEvaluator {
    pub fn new(field: PolyField) -> Self {
        SymbolEvaluator { rep: GammaRep::chiral(), field: Arc::new(field) }
    }

    pub fn bindings(&self, pt: &PhasePoint) -> Bindings {
        Bindings::new()
            .with_complex(params::LAMBDA, pt.lambda)
            .with_complex_momentum(pt.p.to_vec())
            .with_fields(Arc::new(FieldAt { field: self.field.clone(), x: pt.x }))
    }

    fn scalar(&self, e: &crate::expr::Expr, pt: &PhasePoint) -> Result<C> {
        eval_numeric_bound(e, &self.bindings(pt), &BTreeMap::new())
    }

    /// `λ + base` (with `shift`) or the bare base as a matrix.
    fn base_matrix(&self, base: Base, pt: &PhasePoint, with_lambda: bool) -> Result<M4> {
        if base.eps {
            return Err(Error::PatternMismatch("iε bases are not evaluated numerically".into()));
        }
        let scalar = self.scalar(&base.scalar_part(), pt)? + if with_lambda { pt.lambda } else { c(0.0) };
        let slash = self.scalar(&base.slash_coeff(), pt)?;
        Ok(M4::identity() * scalar + self.rep.slash(&pt.p) * (C::i() * slash))
    }

    fn factor_matrix(&self, f: &Factor, pt: &PhasePoint, env: &BTreeMap<String, usize>) -> Result<M4> {
        Ok(match f {
            Factor::Gamma(i) => self.rep.gammas[*env.get(i).ok_or_else(|| Error::UnboundSymbol(format!("index {i}")))?],
            Factor::Slash => self.rep.slash(&pt.p),
            Factor::Res { base, power } => {
                let m = self.base_matrix(*base, pt, true)?;
                let m = if *power < 0 {
                    m.try_inverse().ok_or_else(|| Error::NonPoleSingularity("singular resolvent".into()))?
                } else {
                    m
                };
                m.pow(power.unsigned_abs() as u32)
            }
            Factor::Pow { .. } => return Err(Error::PatternMismatch("complex powers are not evaluated here".into())),
        })
    }

    /// One word, summed over the directions of its gamma indices.
    pub fn word(&self, w: &NCWord, pt: &PhasePoint) -> Result<M4> {
        self.word_bound(w, pt, &BTreeMap::new())
    }

    /// One word with some indices held at fixed directions.
    pub fn word_bound(&self, w: &NCWord, pt: &PhasePoint, fixed: &BTreeMap<String, usize>) -> Result<M4> {
        let mut names: Vec<String> = w
            .factors
            .iter()
            .filter_map(|f| match f {
                Factor::Gamma(i) => Some(i.clone()),
                _ => None,
            })
            .collect();
        names.sort();
        names.dedup();
        names.retain(|n| !fixed.contains_key(n));
        let b = self.bindings(pt);
        let mut total = M4::zeros();
        for code in 0..DIM.pow(names.len() as u32) {
            let mut env = fixed.clone();
            let mut r = code;
            for n in &names {
                env.insert(n.clone(), r % DIM);
                r /= DIM;
            }
            let coeff = eval_numeric_bound(&w.coeff, &b, &env)?;
            if coeff == c(0.0) {
                continue;
            }
            let mut m = M4::identity() * coeff;
            for f in &w.factors {
                m *= self.factor_matrix(f, pt, &env)?;
            }
            total += m;
        }
        Ok(total)
    }

    pub fn symbol(&self, s: &Symbol, pt: &PhasePoint) -> Result<M4> {
        let mut total = M4::zeros();
        for w in &s.words {
            total += self.word(w, pt)?;
        }
        Ok(total)
    }
}

const CONTOUR_POINTS: usize = 32;
const CONTOUR_RADIUS: f64 = 0.08;

/// First and second derivatives of `f(pt + z·dir)` at `z = 0`.
fn directional(f: &dyn Fn(&PhasePoint) -> Result<M4>, pt: &PhasePoint, dir: &[f64; 2 * DIM]) -> Result<[M4; 2]> {
    let mut d1 = M4::zeros();
    let mut d2 = M4::zeros();
    for k in 0..CONTOUR_POINTS {
        let w = C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / CONTOUR_POINTS as f64);
        let v = f(&pt.shifted(w * CONTOUR_RADIUS, dir))?;
        d1 += v * w.inv();
        d2 += v * w.inv().powu(2);
    }
    let n = CONTOUR_POINTS as f64;
    Ok([d1 / c(n * CONTOUR_RADIUS), d2 * c(2.0 / (n * CONTOUR_RADIUS * CONTOUR_RADIUS))])
}

fn unit(k: usize) -> [f64; 2 * DIM] {
    let mut d = [0.0; 2 * DIM];
    d[k] = 1.0;
    d
}

/// Gradient and Hessian in the eight phase-space coordinates `(x, p)`.
struct Jet2 {
    value: M4,
    grad: Vec<M4>,
    hess: Vec<Vec<M4>>,
}

fn jet(f: &dyn Fn(&PhasePoint) -> Result<M4>, pt: &PhasePoint, second: bool) -> Result<Jet2> {
    let n = 2 * DIM;
    let value = f(pt)?;
    let mut grad = Vec::with_capacity(n);
    let mut pure = Vec::with_capacity(n);
    for k in 0..n {
        let [d1, d2] = directional(f, pt, &unit(k))?;
        grad.push(d1);
        pure.push(d2);
    }
    let mut hess = vec![vec![M4::zeros(); n]; n];
    if second {
        for a in 0..n {
            hess[a][a] = pure[a];
            for b in a + 1..n {
                let mut d = unit(a);
                d[b] = 1.0;
                let [_, d2] = directional(f, pt, &d)?;
                let m = (d2 - pure[a] - pure[b]) * c(0.5);
                hess[a][b] = m;
                hess[b][a] = m;
            }
        }
    }
    Ok(Jet2 { value, grad, hess })
}

/// Relative Frobenius size of `R̃ ∘ (λ + Ã) − 1` at each ħ order, through
/// second order, with all derivatives taken numerically.
pub fn moyal_residual(exp: &ResolventExpansion, ev: &SymbolEvaluator, pt: &PhasePoint) -> Result<Vec<f64>> {
    if exp.order() > 2 {
        return Err(Error::OrderTooLarge { requested: exp.order(), max: 2 });
    }
    let kind = exp.op.kind;
    let x_fn = |q: &PhasePoint| -> Result<M4> {
        match kind {
            OperatorKind::Boson => ev.base_matrix(Base::BOSON, q, true),
            OperatorKind::Dirac => ev.base_matrix(Base::A, q, true),
        }
    };
    let r = |n: usize| move |q: &PhasePoint| ev.symbol(&exp.terms[n], q);
    let xj = jet(&x_fn, pt, true)?;
    let w1 = C::i() * 0.5;
    let w2 = w1 * w1 * 0.5;
    let (xs, ps) = (0..DIM, DIM..2 * DIM);
    let mut out = Vec::new();
    for n in 0..=exp.order() {
        // terms of the residual, kept apart to set the scale
        let mut parts: Vec<M4> = Vec::new();
        let rn = r(n)(pt)?;
        parts.push(rn * xj.value);
        if n == 0 {
            parts.push(-M4::identity());
        }
        if n >= 1 {
            let j = jet(&r(n - 1), pt, false)?;
            for (mx, mp) in xs.clone().zip(ps.clone()) {
                parts.push(j.grad[mx] * xj.grad[mp] * w1);
                parts.push(-(j.grad[mp] * xj.grad[mx]) * w1);
            }
        }
        if n == 2 {
            let j = jet(&r(0), pt, true)?;
            for a in 0..DIM {
                for b in 0..DIM {
                    parts.push(j.hess[a][b] * xj.hess[DIM + a][DIM + b] * w2);
                    parts.push(-(j.hess[a][DIM + b] * xj.hess[DIM + a][b]) * (w2 * 2.0));
                    parts.push(j.hess[DIM + a][DIM + b] * xj.hess[a][b] * w2);
                }
            }
        }
        let sum: M4 = parts.iter().sum();
        let scale: f64 = parts.iter().map(|m| m.norm()).sum();
        out.push(sum.norm() / scale.max(f64::MIN_POSITIVE));
    }
    Ok(out)
}

/// A point with `V, φ ∈ [0.5, 3]`, `|p| ∈ [0.1, 5]`, `λ ∈ [0.1, 10]`.
pub fn sample_point(rng: &mut impl Rng) -> (f64, PhasePoint) {
    let v0 = rng.gen_range(0.5..3.0);
    let mut p = [c(0.0); DIM];
    let norm = rng.gen_range(0.1..5.0);
    let dir: Vec<f64> = (0..DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
    for k in 0..DIM {
        p[k] = c(norm * dir[k] / len);
    }
    let x = [c(0.0); DIM];
    (v0, PhasePoint { x, p, lambda: c(rng.gen_range(0.1..10.0)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolvent::{resolvent_expand, resolvent_expand_with, OperatorSpec, Recursion};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polynomial_derivatives() {
        let f = PolyField { name: "V".into(), terms: vec![(2.0, [3, 1, 0, 0])] };
        let x = [c(1.5), c(2.0), c(0.0), c(0.0)];
        assert!((f.derivative(&x, &[0, 0, 1]) - c(2.0 * 6.0 * 1.5)).norm() < 1e-14);
        assert_eq!(f.derivative(&x, &[2]), c(0.0));
    }

    #[test]
    fn residuals_vanish_numerically() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (op, name) in [(OperatorSpec::boson(), "V"), (OperatorSpec::dirac(), "phi")] {
            let exp = resolvent_expand(&op, 2, false).unwrap();
            let (v0, pt) = sample_point(&mut rng);
            let ev = SymbolEvaluator::new(PolyField::random(name, v0, &mut rng));
            let res = moyal_residual(&exp, &ev, &pt).unwrap();
            assert!(res.iter().all(|r| *r < 1e-10), "{res:?}");
        }
    }

    #[test]
    fn truncated_recursion_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let exp = resolvent_expand_with(&OperatorSpec::dirac(), 2, false, Recursion::LeadingBracket).unwrap();
        let (v0, pt) = sample_point(&mut rng);
        let ev = SymbolEvaluator::new(PolyField::random("phi", v0, &mut rng));
        let res = moyal_residual(&exp, &ev, &pt).unwrap();
        assert!(res[1] < 1e-10 && res[2] > 1e-6, "{res:?}");
    }
}
