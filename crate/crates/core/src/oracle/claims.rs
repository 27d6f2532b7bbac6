//! Registered claims, each checked at sampled points against an independent
//! numeric evaluation.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gamma_rep::{sphere_design, GammaRep, M4};
use super::phase::{moyal_residual, sample_point, PhasePoint, PolyField, SymbolEvaluator, DIM};
use super::quad::{finite_part, integrate};
use crate::clifford::gamma_pass;
use crate::error::{Error, Result};
use crate::expr::{eval_numeric, params, pin_dimension, q, Bindings, Exponent, Expr, FieldProvider, Q};
use crate::mellin::{feynman_combine, hadamard_fp, mellin_rule, FPIntegral, MellinTerm};
use crate::momint::{dirac_power_trace, scalar_master};
use crate::phasespace::{Base, BaseKind, Factor, NCWord};
use crate::resolvent::{resolvent_expand, OperatorKind, OperatorSpec};
use crate::zeta::{ds_at_zero, integrate_by_parts_normalize, word_zeta, zeta_density, DetDensity, DiracPath};

type C = Complex64;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationCase {
    pub claim: String,
    pub sample: usize,
    pub bindings: BTreeMap<String, f64>,
    /// `[re, im]`
    pub analytic: [f64; 2],
    pub numeric: [f64; 2],
    pub rel_error: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Outcome {
    bindings: BTreeMap<String, f64>,
    analytic: C,
    numeric: C,
    /// Replaces the default relative error when the comparison is not scalar.
    rel_error: Option<f64>,
}

impl Outcome {
    fn new(bindings: BTreeMap<String, f64>, analytic: C, numeric: C) -> Self {
        Outcome { bindings, analytic, numeric, rel_error: None }
    }
}

type Runner = fn(&mut ChaCha8Rng, usize) -> Result<Outcome>;

/// A claim with its default sample count and tolerance.
pub struct Claim {
    pub id: &'static str,
    pub samples: usize,
    pub tol: f64,
    pub description: &'static str,
    run: Runner,
}

/// All registered claims, ordered by id.
pub fn claims() -> Vec<Claim> {
    let mut v = vec![
        Claim {
            id: "boson-scale-coefficient",
            samples: 10,
            tol: 1e-10,
            description: "μ-dependence of ln det(−∂²+V) equals ½ tr E²/(16π²)",
            run: boson_scale,
        },
        Claim {
            id: "dirac-power-trace",
            samples: 5,
            tol: 1e-8,
            description: "tr ∫ (φ + iγ·p)^{-s} against eigenvalue radial quadrature",
            run: power_trace,
        },
        Claim {
            id: "dirac-scale-coefficient",
            samples: 10,
            tol: 1e-10,
            description: "μ-dependence of ln det(γ·∂+φ) equals the D†D heat-kernel coefficient",
            run: dirac_scale,
        },
        Claim {
            id: "feynman-combination",
            samples: 20,
            tol: 1e-10,
            description: "Feynman-parameter weights for X^{-a}X*^{-b}",
            run: feynman,
        },
        Claim {
            id: "grg-identity",
            samples: 100,
            tol: 1e-12,
            description: "passing γ^μ through (λ+Ã)^{-b}",
            run: grg,
        },
        Claim {
            id: "hadamard-fp",
            samples: 10,
            tol: 1e-8,
            description: "finite part at t = 1/2 against excision quadrature",
            run: hadamard,
        },
        Claim {
            id: "ibp-dirac",
            samples: 5,
            tol: 1e-10,
            description: "integration by parts leaves ∫ ln det(γ·∂+φ) unchanged",
            run: ibp_dirac,
        },
        Claim {
            id: "mellin-rule",
            samples: 20,
            tol: 1e-10,
            description: "semigroup λ-integral of (λ+a)^{-k}",
            run: mellin,
        },
        Claim {
            id: "resolvent-residual-boson-order2",
            samples: 50,
            tol: 1e-10,
            description: "R̃ ∘ (λ+Ã) − 1 for −∂²+V, derivatives by contour integrals",
            run: |r, _| residual(r, OperatorKind::Boson),
        },
        Claim {
            id: "resolvent-residual-dirac-order2",
            samples: 50,
            tol: 1e-10,
            description: "R̃ ∘ (λ+Ã) − 1 for γ·∂+φ, derivatives by contour integrals",
            run: |r, _| residual(r, OperatorKind::Dirac),
        },
        Claim {
            id: "rule-mixed-gamma-gamma",
            samples: 3,
            tol: 1e-8,
            description: "−¼ tr (λ+Ã)^{-3}(λ+Ã*)^{-1}γ^μγ^ν ∂_{μν}φ",
            run: |r, _| rule(r, RuleWord::MixedGammaGamma),
        },
        Claim {
            id: "rule-mixed-slash-gamma",
            samples: 3,
            tol: 1e-8,
            description: "¼ tr (λ+Ã)^{-3}(λ+Ã*)^{-1}(p^μ/p²)S γ^ν ∂_{μν}φ",
            run: |r, _| rule(r, RuleWord::MixedSlashGamma),
        },
        Claim {
            id: "rule-pure-slash-gamma",
            samples: 3,
            tol: 1e-8,
            description: "−¼ tr (λ+Ã)^{-4}(p^μ/p²)S γ^ν ∂_{μν}φ",
            run: |r, _| rule(r, RuleWord::PureSlashGamma),
        },
        Claim {
            id: "scalar-master",
            samples: 20,
            tol: 1e-10,
            description: "∫ d⁴p (p²)^m (p²+a)^{-σ} against radial quadrature",
            run: master,
        },
    ];
    v.sort_by_key(|c| c.id);
    v
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

fn sample_rng(seed: u64, id: &str, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(id));
    rng.set_stream(k as u64);
    rng
}

fn rel(a: C, n: C) -> f64 {
    let scale = a.norm().max(n.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - n).norm() / scale
    }
}

fn run_claim(c: &Claim, seed: u64, n: usize, tol: f64) -> Vec<VerificationCase> {
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, c.id, k);
            match (c.run)(&mut rng, k) {
                Ok(o) => {
                    let e = o.rel_error.unwrap_or_else(|| rel(o.analytic, o.numeric));
                    VerificationCase {
                        claim: c.id.to_string(),
                        sample: k,
                        bindings: o.bindings,
                        analytic: [o.analytic.re, o.analytic.im],
                        numeric: [o.numeric.re, o.numeric.im],
                        rel_error: e,
                        tol,
                        passed: e <= tol,
                        error: None,
                    }
                }
                Err(err) => VerificationCase {
                    claim: c.id.to_string(),
                    sample: k,
                    bindings: BTreeMap::new(),
                    analytic: [f64::NAN; 2],
                    numeric: [f64::NAN; 2],
                    rel_error: f64::INFINITY,
                    tol,
                    passed: false,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect()
}

/// Runs one claim. `n_samples` and `tol` default to the claim's own.
pub fn verify_claim(id: &str, seed: u64, n_samples: Option<usize>, tol: Option<f64>) -> Result<Vec<VerificationCase>> {
    let all = claims();
    let c = all.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownClaim(id.to_string()))?;
    Ok(run_claim(c, seed, n_samples.unwrap_or(c.samples), tol.unwrap_or(c.tol)))
}

/// Every claim at its default sample count.
pub fn verify_suite(seed: u64) -> Report {
    let cases = claims()
        .par_iter()
        .map(|c| run_claim(c, seed, c.samples, c.tol))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Report { seed, cases }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub cases: Vec<VerificationCase>,
}

impl Report {
    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.cases.iter().all(|c| c.passed)
    }

    pub fn json_lines(&self) -> String {
        self.cases
            .iter()
            .map(|c| serde_json::to_string(c).expect("case serializes"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// One row per claim with the worst sample.
    pub fn summary_table(&self) -> String {
        let mut rows: BTreeMap<&str, (usize, usize, f64, f64)> = BTreeMap::new();
        for c in &self.cases {
            let r = rows.entry(&c.claim).or_insert((0, 0, 0.0, c.tol));
            r.0 += 1;
            r.1 += c.passed as usize;
            r.2 = r.2.max(c.rel_error);
        }
        let mut out = format!("{:<34} {:>7} {:>11} {:>9}  result\n", "claim", "passed", "worst", "tol");
        for (id, (n, ok, worst, tol)) in rows {
            let verdict = if ok == n { "PASS" } else { "FAIL" };
            out.push_str(&format!("{id:<34} {:>7} {worst:>11.3e} {tol:>9.1e}  {verdict}\n", format!("{ok}/{n}")));
        }
        out
    }
}

fn binds(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// `∫₀¹ g` to `tol` relative to a rough first pass.
fn unit_quad(g: impl Fn(f64) -> C, tol: f64) -> Result<C> {
    let rough = integrate(&g, 0.0, 1.0, 1e-6)?;
    integrate(&g, 0.0, 1.0, (tol * rough.norm()).max(1e-300))
}

/// `∫_L^∞ g` for `g ~ x^{-decay}`, `decay > 1`, through `x = L v^{-β}` with
/// `β = 1/(decay - 1)`, which makes the integrand finite and smooth at `v = 0`.
fn tail_quad(g: impl Fn(f64) -> C, length: f64, decay: f64, tol: f64) -> Result<C> {
    let beta = 1.0 / (decay - 1.0);
    let v = unit_quad(
        |v| {
            let x = length * v.powf(-beta);
            if v == 0.0 || !x.is_finite() {
                return C::new(0.0, 0.0);
            }
            g(x) * v.powf(-beta - 1.0)
        },
        tol,
    )?;
    Ok(v * beta * length)
}

/// `∫₀^∞ f` for `f` smooth at 0 and `f ~ x^{-decay}` at infinity.
fn half_line_quad(f: impl Fn(f64) -> C + Copy, length: f64, decay: f64, tol: f64) -> Result<C> {
    let head = unit_quad(|u| f(length * u), tol)? * length;
    Ok(head + tail_quad(f, length, decay, tol)?)
}

/// `∫₀^∞ λ^{-σ} f(λ) dλ` for `σ < 1` and `f ~ λ^{-decay}` at infinity, with
/// `L` the scale on which `f` varies and `size` the typical magnitude of `f`.
/// Below `L` the substitution `λ = L u^{1/(1-σ)}` removes the endpoint power.
fn mellin_quad(f: impl Fn(f64) -> C + Copy, sigma: f64, decay: f64, length: f64, size: f64, tol: f64) -> Result<C> {
    let alpha = 1.0 / (1.0 - sigma);
    let head = unit_quad(|u| f(length * u.powf(alpha)) / size, tol)? * alpha * length.powf(1.0 - sigma);
    let tail = tail_quad(|l| l.powf(-sigma) * f(l) / size, length, decay + sigma, tol)?;
    Ok((head + tail) * size)
}

/// `φ₀ + g·x + ½ x·H·x`.
fn jet_field(name: &str, v0: f64, g: &[f64; DIM], h: &[[f64; DIM]; DIM]) -> PolyField {
    let mut terms = vec![(v0, [0u32; DIM])];
    for a in 0..DIM {
        let mut e = [0u32; DIM];
        e[a] = 1;
        terms.push((g[a], e));
        for b in a..DIM {
            let mut e = [0u32; DIM];
            e[a] += 1;
            e[b] += 1;
            terms.push((if a == b { 0.5 * h[a][a] } else { h[a][b] }, e));
        }
    }
    PolyField { name: name.to_string(), terms }
}

fn random_jet(rng: &mut ChaCha8Rng) -> ([f64; DIM], [[f64; DIM]; DIM]) {
    let mut g = [0.0; DIM];
    let mut h = [[0.0; DIM]; DIM];
    for a in 0..DIM {
        g[a] = rng.gen_range(-1.0..1.0);
        for b in a..DIM {
            h[a][b] = rng.gen_range(-1.0..1.0);
            h[b][a] = h[a][b];
        }
    }
    (g, h)
}

fn origin() -> PhasePoint {
    let z = C::new(0.0, 0.0);
    PhasePoint { x: [z; DIM], p: [z; DIM], lambda: z }
}

fn power_trace(rng: &mut ChaCha8Rng, k: usize) -> Result<Outcome> {
    let s = if k == 0 { 6.3 } else { rng.gen_range(4.2..9.0) };
    let phi = rng.gen_range(0.5..3.0);
    let sigma = Exponent::affine(q(0), q(1));
    let closed = pin_dimension(&dirac_power_trace(&Expr::param("phi"), &sigma)?);
    let analytic = eval_numeric(&closed, &Bindings::new().with("phi", phi).with(params::S, s))?;
    let rep = GammaRep::chiral();
    let numeric = half_line_quad(
        |p| {
            let eig = rep.dirac_eigenvalues(phi, &[p, 0.0, 0.0, 0.0]);
            let tr: C = eig.iter().map(|e| e.powf(-s)).sum();
            tr * p.powi(3) / (8.0 * PI * PI)
        },
        phi,
        s - 3.0,
        1e-13,
    )?;
    Ok(Outcome::new(binds(&[("phi", phi), ("s", s)]), analytic, numeric))
}

fn grg(rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let (v0, pt) = sample_point(rng);
    let ev = SymbolEvaluator::new(PolyField::random("phi", v0, rng));
    let b = rng.gen_range(1..=4i64);
    let fixed: BTreeMap<String, usize> =
        [("m".to_string(), rng.gen_range(0..DIM)), ("n".to_string(), rng.gen_range(0..DIM))].into();
    let w = NCWord::new(Expr::one(), vec![Factor::gamma("m"), Factor::res(Base::A, -b), Factor::gamma("n")]);
    let lhs = ev.word_bound(&w, &pt, &fixed)?;
    let mut rhs = M4::zeros();
    for v in gamma_pass(&w)? {
        rhs += ev.word_bound(&v, &pt, &fixed)?;
    }
    let p2: f64 = pt.p.iter().map(|x| x.norm_sqr()).sum();
    Ok(Outcome {
        bindings: binds(&[
            ("phi", v0),
            ("|p|", p2.sqrt()),
            ("lambda", pt.lambda.re),
            ("b", b as f64),
            ("mu", fixed["m"] as f64),
            ("nu", fixed["n"] as f64),
        ]),
        analytic: rhs.trace(),
        numeric: lhs.trace(),
        rel_error: Some((lhs - rhs).norm() / lhs.norm()),
    })
}

fn residual(rng: &mut ChaCha8Rng, kind: OperatorKind) -> Result<Outcome> {
    let (v0, pt) = sample_point(rng);
    let name = match kind {
        OperatorKind::Boson => "V",
        OperatorKind::Dirac => "phi",
    };
    let ev = SymbolEvaluator::new(PolyField::random(name, v0, rng));
    let exp = resolvent_expand(&OperatorSpec::new(kind), 2, false)?;
    let r = moyal_residual(&exp, &ev, &pt)?;
    let worst = r.iter().cloned().fold(0.0, f64::max);
    let p2: f64 = pt.p.iter().map(|x| x.norm_sqr()).sum();
    Ok(Outcome {
        bindings: binds(&[(name, v0), ("|p|", p2.sqrt()), ("lambda", pt.lambda.re)]),
        analytic: C::new(0.0, 0.0),
        numeric: C::new(worst, 0.0),
        rel_error: Some(worst),
    })
}

#[derive(Clone, Copy)]
enum RuleWord {
    MixedGammaGamma,
    PureSlashGamma,
    MixedSlashGamma,
}

fn rule_word(r: RuleWord) -> NCWord {
    let hess = Expr::field_d("phi", &["m", "n"]);
    let pm = Expr::p("m") / Expr::p2();
    let (a, astar) = (Base::A, Base::A_STAR);
    match r {
        RuleWord::MixedGammaGamma => NCWord::new(
            Expr::rat(-1, 4) * hess,
            vec![Factor::res(a, -3), Factor::res(astar, -1), Factor::gamma("m"), Factor::gamma("n")],
        ),
        RuleWord::PureSlashGamma => {
            NCWord::new(Expr::rat(-1, 4) * hess * pm, vec![Factor::res(a, -4), Factor::Slash, Factor::gamma("n")])
        }
        RuleWord::MixedSlashGamma => NCWord::new(
            Expr::rat(1, 4) * hess * pm,
            vec![Factor::res(a, -3), Factor::res(astar, -1), Factor::Slash, Factor::gamma("n")],
        ),
    }
}

/// `∂²_λ Π (λ + z_j)^{-k_j}`.
fn second_derivative(lambda: f64, zs: &[(C, i64)]) -> C {
    let mut g = C::new(1.0, 0.0);
    let (mut l1, mut l2) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for (z, k) in zs {
        let u = (z + lambda).inv();
        g *= u.powi(*k as i32);
        l1 -= u * *k as f64;
        l2 += u * u * *k as f64;
    }
    g * (l1 * l1 + l2)
}

/// The word's spinor trace over `d⁴p/(2π)⁴` and the semigroup λ-integral,
/// continued to `1 < s < 3` by integrating by parts twice in λ. The resolvent
/// block is diagonal on the eigenspaces of `n̸`, so each branch is a scalar
/// integral weighted by the averaged trace of the remaining gamma factors.
fn rule(rng: &mut ChaCha8Rng, which: RuleWord) -> Result<Outcome> {
    let s = if rng.gen_bool(0.5) { rng.gen_range(1.5..1.8) } else { rng.gen_range(2.2..2.7) };
    let phi = rng.gen_range(0.5..3.0);
    let (_, h) = random_jet(rng);
    let field = jet_field("phi", phi, &[0.0; DIM], &h);
    let ev = SymbolEvaluator::new(field);
    let w = rule_word(which);

    let engine = word_zeta(&w, DiracPath::FeynmanFp)?;
    let analytic = eval_numeric(&engine, &ev.bindings(&origin()).with(params::S, s))?;

    let split = w.factors.iter().position(|f| !matches!(f, Factor::Res { .. })).unwrap_or(w.factors.len());
    let mut res = Vec::new();
    for f in &w.factors[..split] {
        if let Factor::Res { base, power } = f {
            let kappa = match base.kind {
                BaseKind::A => 1.0,
                BaseKind::AStar => -1.0,
                _ => return Err(Error::PatternMismatch(format!("base {}", base.name()))),
            };
            res.push((kappa, -power));
        }
    }
    let total: i64 = res.iter().map(|(_, k)| k).sum();
    let rest = NCWord::new(w.coeff.clone(), w.factors[split..].to_vec());
    let design = sphere_design();
    let mut weights = [C::new(0.0, 0.0); 2];
    for n in &design {
        let mut pt = origin();
        for k in 0..DIM {
            pt.p[k] = C::new(n[k], 0.0);
        }
        let m = ev.word(&rest, &pt)?;
        let proj = ev.rep.projectors(n);
        for (wt, pr) in weights.iter_mut().zip(proj.iter()) {
            *wt += (pr * m).trace() / design.len() as f64;
        }
    }

    let mut numeric = C::new(0.0, 0.0);
    for (branch, wt) in [1.0, -1.0].into_iter().zip(weights) {
        if wt.norm() < 1e-14 {
            continue;
        }
        // the radial integrand falls like p^{-(s + total - 4)}
        let radial = half_line_quad(
            |p| {
                // in units of |φ + ip|, so that nothing overflows as p → ∞
                let len = phi.hypot(p);
                let zs: Vec<(C, i64)> =
                    res.iter().map(|(kappa, k)| (C::new(phi, kappa * branch * p) / len, *k)).collect();
                let inner = mellin_quad(|l| second_derivative(l, &zs), s - 2.0, total as f64 + 2.0, 1.0, 1.0, 1e-12)
                    .unwrap_or(C::new(f64::NAN, 0.0));
                let power = 3.0 * p.ln() + (3.0 - s - total as f64 - 2.0) * len.ln();
                inner * power.exp() / (8.0 * PI * PI)
            },
            phi,
            s + total as f64 - 4.0,
            1e-11,
        )?;
        numeric += wt * radial;
    }
    numeric *= (PI * s).sin() / PI / ((1.0 - s) * (2.0 - s));
    if !numeric.is_finite() {
        return Err(Error::NonConvergent("inner λ-integral".into()));
    }
    Ok(Outcome::new(binds(&[("phi", phi), ("s", s)]), analytic, numeric))
}

fn mellin(rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let k = rng.gen_range(1..=4i64);
    let s = rng.gen_range(0.1..0.9);
    let a = rng.gen_range(0.5..3.0);
    let closed = mellin_rule(&Expr::param("a"), k)?;
    let analytic = eval_numeric(&closed, &Bindings::new().with("a", a).with(params::S, s))?;
    let numeric = mellin_quad(|l| C::new((l + a).powi(-(k as i32)), 0.0), s, k as f64, a, a.powi(-(k as i32)), 1e-14)? * ((PI * s).sin() / PI);
    Ok(Outcome::new(binds(&[("a", a), ("k", k as f64), ("s", s)]), analytic, numeric))
}

fn hadamard(rng: &mut ChaCha8Rng, k: usize) -> Result<Outcome> {
    let (numerator, m): (Vec<i64>, i64) = if k == 0 {
        (vec![0, 0, 1], 4)
    } else {
        ((0..rng.gen_range(1..=5)).map(|_| rng.gen_range(-3..=3)).collect(), rng.gen_range(1..=4))
    };
    let fp = FPIntegral { numerator: numerator.iter().map(|c| q(*c)).collect(), pole_order: Exponent::int(m) };
    let exact = hadamard_fp(&fp)?;
    let analytic = C::new(crate::expr::rational::q_to_f64(&exact), 0.0);
    let poly = numerator.clone();
    let numeric = finite_part(
        move |t| {
            let p: f64 = poly.iter().rev().fold(0.0, |acc, c| acc * t + *c as f64);
            C::new(p * (2.0 * t - 1.0).powi(-(m as i32)), 0.0)
        },
        0.0,
        1.0,
        0.5,
        m as usize,
        1e-13,
    )?;
    let mut b = binds(&[("order", m as f64)]);
    for (j, c) in numerator.iter().enumerate() {
        b.insert(format!("c{j}"), *c as f64);
    }
    Ok(Outcome { bindings: b, analytic, numeric, rel_error: Some((analytic - numeric).norm() / analytic.norm().max(1.0)) })
}

fn feynman(rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let a = rng.gen_range(1..=3i64);
    let b = rng.gen_range(1..=3i64);
    let (phi, p, l) = (rng.gen_range(0.5..3.0), rng.gen_range(0.1..5.0), rng.gen_range(0.1..10.0));
    let term = MellinTerm::new(NCWord::new(Expr::one(), vec![Factor::res(Base::A, -a), Factor::res(Base::A_STAR, -b)]))?;
    let ft = feynman_combine(&term)?;
    let weight: Vec<f64> = ft.weight.iter().map(crate::expr::rational::q_to_f64).collect();
    let z = C::new(l + phi, p);
    let w = z.conj();
    let analytic = z.powi(-(a as i32)) * w.powi(-(b as i32));
    let g = |t: f64| {
        let poly: f64 = weight.iter().rev().fold(0.0, |acc, c| acc * t + c);
        (z * t + w * (1.0 - t)).powi(-((a + b) as i32)) * poly
    };
    let numeric = integrate(g, 0.0, 1.0, 1e-14 * analytic.norm())?;
    Ok(Outcome::new(binds(&[("a", a as f64), ("b", b as f64), ("phi", phi), ("|p|", p), ("lambda", l)]), analytic, numeric))
}

fn master(rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let m = rng.gen_range(0..=2i64);
    let sigma = rng.gen_range(m as f64 + 2.2..m as f64 + 6.0);
    let a = rng.gen_range(0.5..3.0);
    let closed = pin_dimension(&scalar_master(&Expr::param("a"), &Exponent::affine(q(0), q(1)), &Q::from_integer(m.into()))?);
    let analytic = eval_numeric(&closed, &Bindings::new().with("a", a).with(params::S, sigma))?;
    let numeric = half_line_quad(
        |p| C::new(p.powi(3) * p.powi(2 * m as i32) * (p * p + a).powf(-sigma) / (8.0 * PI * PI), 0.0),
        a.sqrt(),
        2.0 * sigma - 3.0 - 2.0 * m as f64,
        1e-13,
    )?;
    Ok(Outcome::new(binds(&[("a", a), ("m", m as f64), ("sigma", sigma)]), analytic, numeric))
}

static BOSON_DET: OnceLock<Result<DetDensity>> = OnceLock::new();
static DIRAC_DET: OnceLock<Result<DetDensity>> = OnceLock::new();

/// The engine determinant after integration by parts.
fn engine_det(kind: OperatorKind) -> Result<DetDensity> {
    let cell = match kind {
        OperatorKind::Boson => &BOSON_DET,
        OperatorKind::Dirac => &DIRAC_DET,
    };
    cell.get_or_init(|| {
        let z = zeta_density(&OperatorSpec::new(kind), 2, DiracPath::default())?;
        Ok(integrate_by_parts_normalize(&ds_at_zero(&z)?)?.0)
    })
    .clone()
}

/// `ζ(0)` read off the `ln μ` dependence of the engine determinant.
fn engine_zeta0(kind: OperatorKind, field: Arc<dyn FieldProvider>) -> Result<C> {
    let det = engine_det(kind)?.to_expr();
    let at = |mu: f64| eval_numeric(&det, &Bindings::new().with(params::MU, mu).with_fields(field.clone()));
    let dim = match kind {
        OperatorKind::Boson => 2.0,
        OperatorKind::Dirac => 1.0,
    };
    Ok(-(at(E)? - at(1.0)?) / dim)
}

struct JetProvider(PolyField);

impl FieldProvider for JetProvider {
    fn value(&self, name: &str, derivs: &[usize]) -> Option<C> {
        (name == self.0.name).then(|| self.0.derivative(&[C::new(0.0, 0.0); DIM], derivs))
    }
}

fn boson_scale(rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let v = rng.gen_range(0.5..3.0);
    let (g, h) = random_jet(rng);
    let analytic = engine_zeta0(OperatorKind::Boson, Arc::new(JetProvider(jet_field("V", v, &g, &h))))?;
    // −∂² + V = −∂² − E: ½ E² / (16π²), the ∂²E part integrating to zero
    let numeric = C::new(0.5 * v * v / (16.0 * PI * PI), 0.0);
    Ok(Outcome::new(binds(&[("V", v), ("|dV|", g.iter().map(|x| x * x).sum::<f64>().sqrt())]), analytic, numeric))
}

fn dirac_scale(rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let phi = rng.gen_range(0.5..3.0);
    let (g, h) = random_jet(rng);
    let analytic = engine_zeta0(OperatorKind::Dirac, Arc::new(JetProvider(jet_field("phi", phi, &g, &h))))?;
    // D†D = −∂² + φ² − γ·∂φ = −∂² − E; ζ_D(0) = ζ_{D†D}(0)
    let rep = GammaRep::chiral();
    let gc: Vec<C> = g.iter().map(|x| C::new(*x, 0.0)).collect();
    let e = rep.slash(&gc) - M4::identity() * C::new(phi * phi, 0.0);
    let numeric = (e * e).trace() * 0.5 / (16.0 * PI * PI);
    Ok(Outcome::new(binds(&[("phi", phi), ("|dphi|", g.iter().map(|x| x * x).sum::<f64>().sqrt())]), analytic, numeric))
}

/// `φ(x) = φ₀ + A exp(−x₀²/w²)`, constant in the other directions.
struct Bump {
    phi0: f64,
    amp: f64,
    width: f64,
    x0: f64,
}

impl Bump {
    fn derivative(&self, order: usize) -> f64 {
        let u = self.x0 / self.width;
        let g = self.amp * (-u * u).exp();
        // Hermite form of d^k/dx^k exp(−x²/w²)
        let (mut h0, mut h1) = (1.0, 2.0 * u);
        if order == 0 {
            return self.phi0 + g;
        }
        for k in 1..order {
            let h2 = 2.0 * u * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * h1 * g / self.width.powi(order as i32)
    }
}

impl FieldProvider for Bump {
    fn value(&self, name: &str, derivs: &[usize]) -> Option<C> {
        if name != "phi" {
            return None;
        }
        let v = if derivs.iter().all(|d| *d == 0) { self.derivative(derivs.len()) } else { 0.0 };
        Some(C::new(v, 0.0))
    }
}

fn ibp_dirac(rng: &mut ChaCha8Rng, _: usize) -> Result<Outcome> {
    let phi0 = rng.gen_range(0.5..3.0);
    let amp = phi0 * rng.gen_range(-0.4..0.4);
    let width = rng.gen_range(0.5..2.0);
    let z = zeta_density(&OperatorSpec::dirac(), 2, DiracPath::default())?;
    let before = ds_at_zero(&z)?.to_expr();
    let after = engine_det(OperatorKind::Dirac)?.to_expr();
    let density = |e: &Expr, x0: f64, amp: f64| -> Result<C> {
        eval_numeric(e, &Bindings::new().with(params::MU, 1.0).with_fields(Arc::new(Bump { phi0, amp, width, x0 })))
    };
    let profile = |e: &Expr| -> Result<C> {
        let bg = density(e, 0.0, 0.0)?;
        let reach = 12.0 * width;
        integrate(|x| density(e, x, amp).map(|v| v - bg).unwrap_or(C::new(f64::NAN, 0.0)), -reach, reach, 1e-14)
    };
    let analytic = profile(&after)?;
    let numeric = profile(&before)?;
    Ok(Outcome::new(binds(&[("phi0", phi0), ("amp", amp), ("width", width)]), analytic, numeric))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(id: &str, n: usize) {
        let cases = verify_claim(id, DEFAULT_SEED, Some(n), None).unwrap();
        for c in &cases {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn registry_is_sorted_and_covers_rules() {
        let ids: Vec<_> = claims().iter().map(|c| c.id).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
        for r in crate::momint::dirac_rule_table() {
            assert!(ids.contains(&r.claim), "{}", r.claim);
        }
        assert!(matches!(verify_claim("nope", 1, None, None), Err(Error::UnknownClaim(_))));
    }

    #[test]
    fn cheap_claims() {
        for id in ["grg-identity", "mellin-rule", "hadamard-fp", "feynman-combination", "scalar-master", "dirac-power-trace"] {
            check(id, 3);
        }
    }

    #[test]
    fn rule_claims() {
        for id in ["rule-mixed-gamma-gamma", "rule-pure-slash-gamma", "rule-mixed-slash-gamma"] {
            check(id, 1);
        }
    }

    #[test]
    fn scale_and_ibp_claims() {
        for id in ["boson-scale-coefficient", "dirac-scale-coefficient", "ibp-dirac"] {
            check(id, 2);
        }
    }

    #[test]
    fn deterministic() {
        let a = verify_claim("grg-identity", 3, Some(4), None).unwrap();
        let b = verify_claim("grg-identity", 3, Some(4), None).unwrap();
        assert_eq!(a, b);
    }
}
