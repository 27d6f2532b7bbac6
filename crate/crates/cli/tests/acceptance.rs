//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process fails if a criterion fails for any reason other than a known,
//! recorded discrepancy, or if a recorded discrepancy stops holding exactly.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use symdet_core::expr::{params, q, qr, simplify, Exponent, Expr};
use symdet_core::mellin::{hadamard_fp, FPIntegral};
use symdet_core::momint::dirac_power_trace;
use symdet_core::oracle::claims::{verify_claim, DEFAULT_SEED};
use symdet_core::oracle::quad::finite_part;
use symdet_core::resolvent::{resolvent_expand, verify_resolvent, OperatorSpec, Recursion};
use symdet_core::yukawa::{default_potential, effective_action, substitute_potential, z_eff_first_term, COUPLING};
use symdet_core::zeta::{
    ds_at_zero, integrate_by_parts_normalize, zeta_density, zeta_density_with, DetDensity, DiracPath, ZetaDensity,
};
use symdet_core::Result;

use num_complex::Complex64;

enum Status {
    Pass,
    Fail,
    /// Fails against the reference value; the recorded discrepancy holds exactly.
    KnownDiscrepancy,
}

struct Verdict {
    status: Status,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Verdict {
    Verdict { status: Status::Pass, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Verdict {
    Verdict { status: Status::Fail, detail: detail.into() }
}

fn known(detail: impl Into<String>) -> Verdict {
    Verdict { status: Status::KnownDiscrepancy, detail: detail.into() }
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn pi2() -> Expr {
    Expr::pi().powi(2)
}

fn mu2() -> Expr {
    Expr::param(params::MU).powi(2)
}

fn s_exp(c: i64, s: i64) -> Exponent {
    Exponent::affine(q(c), q(s))
}

fn grad2(f: &str) -> Expr {
    Expr::field_d(f, &["a"]) * Expr::field_d(f, &["a"])
}

fn e_pow(c: Expr, n: i64, d: i64) -> Expr {
    c * Expr::e().pow(Exponent::constant(qr(n, d)))
}

fn symdet(args: &[&str]) -> (bool, String, Duration) {
    let t = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_symdet")).args(args).env_remove("SYMDET_SEED").output().expect("binary runs");
    (out.status.success(), String::from_utf8_lossy(&out.stdout).into_owned(), t.elapsed())
}

fn det_of(z: &ZetaDensity) -> Result<DetDensity> {
    Ok(integrate_by_parts_normalize(&ds_at_zero(z)?)?.0)
}

fn dirac_det(rec: Recursion) -> Result<DetDensity> {
    det_of(&zeta_density_with(&OperatorSpec::dirac(), 2, DiracPath::default(), rec)?)
}

fn reference_boson() -> Expr {
    let v = Expr::field("V");
    let body = v.clone().powi(2) * Expr::log(e_pow(v.clone() / mu2(), -3, 2)) + grad2("V") / (Expr::int(6) * v);
    simplify(&(body / (Expr::int(32) * pi2())))
}

fn reference_dirac() -> Expr {
    let phi = Expr::field("phi");
    let log = |c: Expr| Expr::log(c);
    let body = phi.clone().powi(4) * log(e_pow(phi.clone().powi(2) / mu2(), -25, 6))
        + log(phi.powi(2) / mu2()) * Expr::rat(1, 2) * grad2("phi");
    simplify(&(body / (Expr::int(16) * pi2())))
}

/// The full recursion's extra gradient term relative to the reference result.
fn dirac_excess() -> Expr {
    simplify(&(Expr::log(Expr::field("phi").powi(2) / mu2()) * grad2("phi") / (Expr::int(32) * pi2())))
}

fn criterion_1() -> Result<Verdict> {
    let (ok, out, t) = symdet(&["boson", "--format", "json"]);
    let det = det_of(&zeta_density(&OperatorSpec::boson(), 2, DiracPath::default())?)?;
    let cli: serde_json::Value = serde_json::from_str(out.trim()).unwrap_or_default();
    let same_output = cli["density"]["text"] == det.render(symdet_core::expr::Format::Text);
    let exact = det.to_expr() == reference_boson();
    Ok(check(
        ok && same_output && exact && t < Duration::from_secs(5),
        format!("canonical forms equal: {exact}; CLI prints this density: {same_output}; {:.2} s < 5 s", t.as_secs_f64()),
    ))
}

fn criterion_2() -> Result<Verdict> {
    let z = zeta_density(&OperatorSpec::boson(), 2, DiracPath::default())?;
    let v = Expr::field("V");
    let s = Expr::param(params::S);
    let want = (v.clone().pow(s_exp(2, -1)) / ((s.clone() - Expr::int(1)) * (s.clone() - Expr::int(2)))
        - v.clone().pow(s_exp(0, -1)) * Expr::laplacian("V") / Expr::int(6)
        + s * v.pow(s_exp(-1, -1)) * grad2("V") / Expr::int(12))
        / (Expr::int(16) * pi2());
    let exact = z.total() == simplify(&want);
    Ok(check(exact, format!("ζ(s) density equal to the three-term display: {exact}")))
}

fn criterion_3() -> Result<Verdict> {
    let det = ds_at_zero(&zeta_density(&OperatorSpec::boson(), 2, DiracPath::default())?)?;
    let (l, phi) = (Expr::param("lc"), Expr::field("phi"));
    let sub = substitute_potential(&det, &(l.clone() * phi.clone().powi(2) / Expr::int(2)))?;
    let pot: Vec<_> = sub.terms.iter().filter(|t| t.grad_factor == Expr::one()).collect();
    let want = l.clone().powi(2) * phi.clone().powi(4) / Expr::int(4)
        * Expr::log(e_pow(l * phi.powi(2) / (Expr::int(2) * mu2()), -3, 2))
        / (Expr::int(32) * pi2());
    let got = simplify(&Expr::Sum(pot.iter().map(|t| t.to_expr()).collect()));
    let exact = got == simplify(&want);
    Ok(check(exact, format!("potential part after V → λφ²/2 equal: {exact}")))
}

fn criterion_4() -> Result<Verdict> {
    let (ok, _, t) = symdet(&["dirac", "--format", "json"]);
    let full = dirac_det(Recursion::Full)?.to_expr();
    let leading = dirac_det(Recursion::LeadingBracket)?.to_expr();
    let reference = reference_dirac();
    if full == reference && ok && t < Duration::from_secs(30) {
        return Ok(pass(format!("canonical forms equal; {:.2} s < 30 s", t.as_secs_f64())));
    }
    let recorded = full == simplify(&(reference.clone() + dirac_excess())) && leading == reference;
    let detail = format!(
        "default (full recursion) gradient-log coefficient is 1/(16π²)·(∂φ)², twice the reference \
         1/(16π²)·½(∂φ)²; φ⁴ ln(φ²e^{{-25/6}}/μ²) term matches; leading-bracket recursion equals the \
         reference result exactly: {}; {:.2} s < 30 s",
        leading == reference,
        t.as_secs_f64()
    );
    Ok(if recorded && ok && t < Duration::from_secs(30) { known(detail) } else { fail(detail) })
}

fn criterion_5() -> Result<Verdict> {
    let zeta2 = |path, rec| -> Result<Expr> {
        Ok(zeta_density_with(&OperatorSpec::dirac(), 2, path, rec)?.by_order[2].clone())
    };
    let phi = Expr::field("phi");
    let s = Expr::param(params::S);
    let reference = simplify(
        &(phi.clone().pow(s_exp(1, -1)) * Expr::laplacian("phi") / (Expr::int(16) * pi2() * (s.clone() - Expr::int(1)))),
    );
    let fp = zeta2(DiracPath::FeynmanFp, Recursion::Full)?;
    let oi = zeta2(DiracPath::OperatorIdentity, Recursion::Full)?;
    if fp == oi && fp == reference {
        return Ok(pass("both paths give φ^{1-s}∂²φ/(16π²(s-1))"));
    }
    let full_form = simplify(
        &(phi.clone().pow(s_exp(1, -1)) * Expr::laplacian("phi") / (Expr::int(4) * pi2() * (s - Expr::int(1)))
            - phi.pow(s_exp(0, -1)) * grad2("phi") / (Expr::int(8) * pi2())),
    );
    let lfp = zeta2(DiracPath::FeynmanFp, Recursion::LeadingBracket)?;
    let loi = zeta2(DiracPath::OperatorIdentity, Recursion::LeadingBracket)?;
    let recorded = fp == oi && fp == full_form && lfp == reference && loi == reference;
    let detail = format!(
        "paths identical: {}; default ħ² term is φ^{{1-s}}∂²φ/(4π²(s-1)) − φ^{{-s}}(∂φ)²/(8π²), \
         twice the reference value after integration by parts; with the leading-bracket recursion both \
         paths equal φ^{{1-s}}∂²φ/(16π²(s-1)) exactly: {}",
        fp == oi,
        lfp == reference && loi == reference
    );
    Ok(if recorded { known(detail) } else { fail(detail) })
}

fn criterion_6() -> Result<Verdict> {
    let fp = FPIntegral { numerator: vec![q(0), q(0), q(1)], pole_order: Exponent::int(4) };
    let exact = hadamard_fp(&fp)? == qr(-1, 3);
    let numeric =
        finite_part(|t| Complex64::new(t * t / (2.0 * t - 1.0).powi(4), 0.0), 0.0, 1.0, 0.5, 4, 1e-13)?;
    let err = (numeric.re + 1.0 / 3.0).abs();
    Ok(check(exact && err < 1e-8, format!("exact −1/3: {exact}; excision quadrature off by {err:.1e} < 1e-8")))
}

fn criterion_7() -> Result<Verdict> {
    let t = Instant::now();
    let phi = Expr::field("phi");
    let s = Exponent::affine(q(0), q(1));
    let closed = symdet_core::expr::pin_dimension(&dirac_power_trace(&phi, &s)?);
    let want = Expr::int(3) * phi.pow(s_exp(4, -1)) * Expr::gamma(s_exp(-4, 1)) / (pi2() * Expr::gamma(s));
    let exact = simplify(&closed) == simplify(&want);
    let cases = verify_claim("dirac-power-trace", DEFAULT_SEED, Some(5), Some(1e-8))?;
    let worst = cases.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let all = cases.iter().all(|c| c.passed) && cases.iter().all(|c| c.bindings["s"] > 4.0);
    let el = t.elapsed();
    Ok(check(
        exact && all && el < Duration::from_secs(10),
        format!(
            "closed form 3φ^{{4-s}}Γ(s-4)/(π²Γ(s)): {exact}; 5 samples with Re s > 4 (first s = {}), worst rel. error {worst:.1e} ≤ 1e-8; {:.2} s < 10 s",
            cases[0].bindings["s"],
            el.as_secs_f64()
        ),
    ))
}

fn criterion_8() -> Result<Verdict> {
    let mut symbolic = true;
    for op in [OperatorSpec::boson(), OperatorSpec::dirac()] {
        symbolic &= verify_resolvent(&resolvent_expand(&op, 2, false)?)?.passed();
    }
    let mut worst = 0.0f64;
    let mut n = 0;
    let mut all = true;
    for id in ["resolvent-residual-boson-order2", "resolvent-residual-dirac-order2"] {
        let cases = verify_claim(id, DEFAULT_SEED, Some(50), Some(1e-10))?;
        n += cases.len();
        all &= cases.iter().all(|c| c.passed);
        worst = cases.iter().map(|c| c.rel_error).fold(worst, f64::max);
    }
    Ok(check(
        symbolic && all && n == 100,
        format!("symbolic residual exactly 0 through ħ²: {symbolic}; {n} sampled points, worst numeric residual {worst:.1e} ≤ 1e-10"),
    ))
}

fn criterion_9() -> Result<Verdict> {
    let (m, l, phi) = (Expr::param("m"), Expr::param("lc"), Expr::field("phi"));
    let boson = ds_at_zero(&zeta_density(&OperatorSpec::boson(), 2, DiracPath::default())?)?;
    let v = m.clone().powi(2) + l.clone() * phi.clone().powi(2) / Expr::int(2);
    let z = z_eff_first_term(&substitute_potential(&boson, &v)?)?;
    let z_want = simplify(
        &(l.clone().powi(2) * phi.clone().powi(2)
            / (Expr::int(6) * Expr::int(16) * pi2() * (Expr::int(2) * m.powi(2) + l * phi.clone().powi(2)))),
    );
    let z_ok = z == z_want;

    let g = Expr::param(COUPLING);
    let kin_ref = simplify(&(g.clone().powi(-2) - Expr::log(phi.clone().powi(2) / mu2()) / (Expr::int(16) * pi2())));
    let pot_ref = simplify(
        &(default_potential()
            - phi.clone().powi(4) * Expr::log(e_pow(phi.clone().powi(2) / mu2(), -25, 6)) / (Expr::int(16) * pi2())),
    );
    let full_raw = ds_at_zero(&zeta_density(&OperatorSpec::dirac(), 2, DiracPath::default())?)?;
    let full = effective_action(&full_raw, &g, &default_potential())?;
    if z_ok && full.kinetic() == kin_ref && full.potential() == pot_ref {
        return Ok(pass("effective action and Z_eff first term equal"));
    }
    let leading_raw =
        ds_at_zero(&zeta_density_with(&OperatorSpec::dirac(), 2, DiracPath::default(), Recursion::LeadingBracket)?)?;
    let leading = effective_action(&leading_raw, &g, &default_potential())?;
    let doubled = simplify(&(g.powi(-2) - Expr::log(phi.powi(2) / mu2()) / (Expr::int(8) * pi2())));
    let recorded = z_ok
        && full.potential() == pot_ref
        && full.kinetic() == doubled
        && leading.kinetic() == kin_ref
        && leading.potential() == pot_ref;
    let detail = format!(
        "Z_eff first term λ²φ²/[6(4π)²(2m²+λφ²)]: {z_ok}; potential V − φ⁴ln(φ²e^{{-25/6}}/μ²)/(16π²): {}; \
         kinetic coefficient is 1/g̃² − ln(φ²/μ²)/(8π²) on the default pipeline, the reference 1/(16π²) \
         only with the leading-bracket recursion: {}",
        full.potential() == pot_ref,
        leading.kinetic() == kin_ref
    );
    Ok(if recorded { known(detail) } else { fail(detail) })
}

fn criterion_10() -> Result<Verdict> {
    let (ok, out, t) = symdet(&["verify", "--suite", "all"]);
    let summary = out.lines().last().unwrap_or("").to_string();
    Ok(check(ok && t < Duration::from_secs(120), format!("{summary}; {:.1} s < 120 s", t.as_secs_f64())))
}

type Criterion = fn() -> Result<Verdict>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("boson determinant", criterion_1),
        ("boson zeta density", criterion_2),
        ("phi^4 substitution", criterion_3),
        ("Dirac determinant", criterion_4),
        ("path agreement", criterion_5),
        ("Hadamard finite part", criterion_6),
        ("Dirac power trace", criterion_7),
        ("resolvent defining property", criterion_8),
        ("Yukawa assembly", criterion_9),
        ("verification suite", criterion_10),
    ];
    let mut unexpected = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let v = run().unwrap_or_else(|e| fail(format!("error: {e}")));
        let tag = match v.status {
            Status::Pass => "PASS",
            Status::Fail => {
                unexpected += 1;
                "FAIL"
            }
            Status::KnownDiscrepancy => "FAIL (recorded discrepancy)",
        };
        println!("criterion {:>2} {name:<28} {tag}: {}", k + 1, v.detail);
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
