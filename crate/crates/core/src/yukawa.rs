//! Large-N Yukawa effective action assembled from the Dirac determinant.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::{render, simplify, substitute, Expr, Format};
use crate::zeta::{integrate_by_parts_normalize, DetDensity, DetTerm};

/// Name of the rescaled Yukawa coupling `g̃`.
pub const COUPLING: &str = "gt";
/// The opaque scalar self-interaction.
pub const POTENTIAL: &str = "V";
pub const FERMION_BILINEAR: &str = "-psibar (gamma.d + phi) psi";
pub const FERMION_BILINEAR_LATEX: &str = r"-\bar\psi(\gamma\cdot\partial+\phi)\psi";

/// Field redefinitions applied on the way from the `N+1` flavour action.
pub const RESCALINGS: [&str; 3] = ["psi_{N+1} -> sqrt(N) psi_{N+1}", "phi -> phi/g", "gt^2 = g^2 N fixed as N -> inf"];

/// `Γ₀/N` density, split into its tree and fermion-loop parts. The kinetic
/// coefficients multiply `(1/2)(∂φ)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionDensity {
    pub tree_kinetic: Expr,
    pub loop_kinetic: Expr,
    pub tree_potential: Expr,
    pub loop_potential: Expr,
    pub rescalings: Vec<String>,
}

fn grad2(f: &str) -> Expr {
    Expr::field_d(f, &["a"]) * Expr::field_d(f, &["a"])
}

impl ActionDensity {
    /// `Z_eff(φ)`.
    pub fn kinetic(&self) -> Expr {
        simplify(&(self.tree_kinetic.clone() + self.loop_kinetic.clone()))
    }
    pub fn potential(&self) -> Expr {
        simplify(&(self.tree_potential.clone() + self.loop_potential.clone()))
    }
    /// Everything except the fermion bilinear.
    pub fn bosonic_expr(&self) -> Expr {
        simplify(&(self.kinetic() * Expr::rat(1, 2) * grad2("phi") + self.potential()))
    }
    pub fn render(&self, fmt: Format) -> String {
        let bilinear = match fmt {
            Format::Latex => FERMION_BILINEAR_LATEX,
            _ => FERMION_BILINEAR,
        };
        let half = match fmt {
            Format::Latex => r"\frac{1}{2}\partial_\mu\phi\,\partial^\mu\phi",
            _ => "(1/2)(d_mu phi)^2",
        };
        let signed = |e: &Expr| {
            let r = grouped(e, fmt);
            match r.strip_prefix('-') {
                Some(rest) => format!(" - {rest}"),
                None => format!(" + {r}"),
            }
        };
        format!(
            "{bilinear} + [{}{}] {half} + {}{}",
            render(&self.tree_kinetic, fmt),
            signed(&self.loop_kinetic),
            render(&self.tree_potential, fmt),
            signed(&self.loop_potential)
        )
    }
    pub fn to_json(&self) -> Value {
        let t = |e: &Expr| render(e, Format::Text);
        json!({
            "fermion_bilinear": FERMION_BILINEAR,
            "kinetic": {"tree": t(&self.tree_kinetic), "loop": t(&self.loop_kinetic)},
            "potential": {"tree": t(&self.tree_potential), "loop": t(&self.loop_potential)},
            "rescalings": self.rescalings,
        })
    }
}

/// Renders with each logarithm kept whole where the expression allows it.
fn grouped(e: &Expr, fmt: Format) -> String {
    match DetDensity::from_expr(e) {
        Ok(d) if !d.terms.is_empty() => d.render(fmt),
        _ => render(e, fmt),
    }
}

/// Splits gradient-free terms from `(∂φ)²` terms after integration by parts.
fn split_det(det: &DetDensity, field: &str) -> Result<(Vec<DetTerm>, Vec<DetTerm>)> {
    let (det, _) = integrate_by_parts_normalize(det)?;
    let g2 = simplify(&grad2(field));
    let mut pot = Vec::new();
    let mut kin = Vec::new();
    for t in det.terms {
        if t.grad_factor == Expr::one() {
            pot.push(t);
        } else if t.grad_factor == g2 {
            kin.push(t);
        } else {
            return Err(Error::PatternMismatch(format!("gradient structure {}", render(&t.grad_factor, Format::Text))));
        }
    }
    Ok((pot, kin))
}

fn sum_terms(ts: &[DetTerm]) -> Expr {
    simplify(&Expr::Sum(ts.iter().map(|t| t.to_expr()).collect()))
}

fn without_grad(ts: &[DetTerm]) -> Expr {
    sum_terms(
        &ts.iter()
            .map(|t| DetTerm { grad_factor: Expr::one(), ..t.clone() })
            .collect::<Vec<_>>(),
    )
}

/// `Γ₀ = ∫ {bilinear + (1/g̃²)(1/2)(∂φ)² + V[φ²/g̃²]} − ln det(γ·∂+φ)`.
pub fn effective_action(det: &DetDensity, coupling: &Expr, potential: &Expr) -> Result<ActionDensity> {
    let (pot, kin) = split_det(det, "phi")?;
    Ok(ActionDensity {
        tree_kinetic: simplify(&coupling.clone().powi(-2)),
        loop_kinetic: simplify(&(-Expr::int(2) * without_grad(&kin))),
        tree_potential: potential.clone(),
        loop_potential: simplify(&-sum_terms(&pot)),
        rescalings: RESCALINGS.iter().map(|s| s.to_string()).collect(),
    })
}

/// `V[φ²/g̃²]` as an opaque functional.
pub fn default_potential() -> Expr {
    let g = Expr::param(COUPLING);
    Expr::func(POTENTIAL, Expr::field("phi").powi(2) / g.powi(2))
}

/// First field-dependent correction to the `(1/2)(∂φ)²` coefficient from
/// `Γ = S + (1/2) ln det(−∂² + V)` once `V` has been replaced by a function of `φ`.
pub fn z_eff_first_term(boson_det: &DetDensity) -> Result<Expr> {
    let e = boson_det.to_expr();
    if e.contains_field("V") {
        return Err(Error::SubstitutionMissing("the boson determinant still depends on V".into()));
    }
    let (_, kin) = split_det(boson_det, "phi")?;
    let plain: Vec<DetTerm> = kin.into_iter().filter(|t| t.log_arg.is_none()).collect();
    // (1/2) ln det · c (∂φ)² is c · (1/2)(∂φ)²
    Ok(simplify(&without_grad(&plain)))
}

/// Substitutes `V` into the integrated-by-parts density and regroups the logs.
pub fn substitute_potential(det: &DetDensity, replacement: &Expr) -> Result<DetDensity> {
    let (det, _) = integrate_by_parts_normalize(det)?;
    DetDensity::from_expr(&substitute(&det.to_expr(), "V", replacement)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{params, qr, Exponent};
    use crate::resolvent::{OperatorSpec, Recursion};
    use crate::zeta::{ds_at_zero, zeta_density, zeta_density_with, DiracPath};

    fn pi2() -> Expr {
        Expr::pi().powi(2)
    }

    fn mu2() -> Expr {
        Expr::param(params::MU).powi(2)
    }

    fn dirac_det(rec: Recursion) -> DetDensity {
        ds_at_zero(&zeta_density_with(&OperatorSpec::dirac(), 2, DiracPath::default(), rec).unwrap()).unwrap()
    }

    fn boson_det() -> DetDensity {
        ds_at_zero(&zeta_density(&OperatorSpec::boson(), 2, DiracPath::default()).unwrap()).unwrap()
    }

    #[test]
    fn assembles_effective_action() {
        let g = Expr::param(COUPLING);
        let phi = Expr::field("phi");
        let a = effective_action(&dirac_det(Recursion::LeadingBracket), &g, &default_potential()).unwrap();
        let kin = g.clone().powi(-2) - Expr::log(phi.clone().powi(2) / mu2()) / (Expr::int(16) * pi2());
        assert_eq!(a.kinetic(), simplify(&kin));
        let pot = default_potential()
            - phi.clone().powi(4) * Expr::log(phi.powi(2) / mu2() * Expr::e().pow(Exponent::constant(qr(-25, 6))))
                / (Expr::int(16) * pi2());
        assert_eq!(a.potential(), simplify(&pot));
        assert_eq!(a.rescalings.len(), 3);
    }

    #[test]
    fn empty_determinant_is_classical() {
        let g = Expr::param(COUPLING);
        let a = effective_action(&DetDensity { terms: vec![] }, &g, &default_potential()).unwrap();
        assert_eq!(a.loop_kinetic, Expr::zero());
        assert_eq!(a.loop_potential, Expr::zero());
        assert_eq!(a.kinetic(), simplify(&g.powi(-2)));
    }

    #[test]
    fn z_eff_massive() {
        let (m, l, phi) = (Expr::param("m"), Expr::param("lc"), Expr::field("phi"));
        let v = m.clone().powi(2) + l.clone() * phi.clone().powi(2) / Expr::int(2);
        let det = substitute_potential(&boson_det(), &v).unwrap();
        let z = z_eff_first_term(&det).unwrap();
        let want = l.clone().powi(2) * phi.clone().powi(2)
            / (Expr::int(6) * Expr::int(16) * pi2() * (Expr::int(2) * m.powi(2) + l.clone() * phi.powi(2)));
        assert_eq!(z, simplify(&want));
        let massless = crate::expr::substitute_param(&z, "m", &Expr::zero()).unwrap();
        assert_eq!(massless, simplify(&(l / (Expr::int(96) * pi2()))));
    }

    #[test]
    fn z_eff_needs_substitution() {
        assert!(matches!(z_eff_first_term(&boson_det()), Err(Error::SubstitutionMissing(_))));
    }

    #[test]
    fn phi4_substitution() {
        let (l, phi) = (Expr::param("lc"), Expr::field("phi"));
        let det = substitute_potential(&boson_det(), &(l.clone() * phi.clone().powi(2) / Expr::int(2))).unwrap();
        let pot: Vec<_> = det.terms.iter().filter(|t| t.grad_factor == Expr::one()).collect();
        assert_eq!(pot.len(), 1);
        assert_eq!(pot[0].coeff, simplify(&(l.clone().powi(2) * phi.clone().powi(4) / (Expr::int(4) * Expr::int(32) * pi2()))));
        let arg = Expr::e().pow(Exponent::constant(qr(-3, 2))) * l * phi.powi(2) / (Expr::int(2) * mu2());
        assert_eq!(pot[0].log_arg, Some(simplify(&arg)));
    }
}
