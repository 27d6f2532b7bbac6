use std::cell::Cell;

use super::{diff_x, params, simplify, Exponent, Expr, FieldAtom, MomentumAtom};
use crate::error::{Error, Result};

fn rename_indices(e: &Expr, f: &impl Fn(&str) -> String) -> Expr {
    e.map(&|n| match n {
        Expr::Field(a) => Expr::Field(
            FieldAtom {
                name: a.name,
                indices: a.indices.iter().map(|i| f(i)).collect(),
                laplacians: a.laplacians,
            }
            .normalized(),
        ),
        Expr::Momentum(MomentumAtom::Component(i)) => Expr::p(&f(&i)),
        Expr::Delta(a, b) => Expr::delta(&f(&a), &f(&b)),
        other => other,
    })
}

fn has_free_index(e: &Expr) -> bool {
    let mut hit = false;
    e.visit(&mut |n| {
        let free = |i: &String| !i.starts_with('#');
        match n {
            Expr::Field(a) if a.indices.iter().any(free) => hit = true,
            Expr::Momentum(MomentumAtom::Component(i)) if free(i) => hit = true,
            Expr::Delta(a, b) if free(a) || free(b) => hit = true,
            _ => {}
        }
    });
    hit
}

/// Replaces the field `target` and every derivative of it by the matching
/// derivative of `replacement`.
pub fn substitute(e: &Expr, target: &str, replacement: &Expr) -> Result<Expr> {
    let repl = simplify(replacement);
    if has_free_index(&repl) {
        return Err(Error::InconsistentSubstitution(format!(
            "replacement for {target} carries a free index: {repl}"
        )));
    }
    let counter = Cell::new(0usize);
    let fresh = || {
        counter.set(counter.get() + 1);
        format!("~{}", counter.get())
    };
    let out = e.map(&|n| match n {
        Expr::Field(a) if a.name == target => {
            let tag = fresh();
            let mut r = rename_indices(&repl, &|i: &str| {
                if i.starts_with('#') {
                    format!("{i}{tag}")
                } else {
                    i.to_string()
                }
            });
            for i in &a.indices {
                r = diff_x(&r, i);
            }
            for _ in 0..a.laplacians {
                let k = fresh();
                r = diff_x(&diff_x(&r, &k), &k);
            }
            r
        }
        other => other,
    });
    Ok(simplify(&out))
}

fn subst_exponent(x: &Exponent, name: &str, v: &Exponent) -> Exponent {
    let k = if name == params::S { &x.s } else { &x.d };
    let mut rest = x.clone();
    if name == params::S {
        rest.s = num_traits::Zero::zero();
    } else {
        rest.d = num_traits::Zero::zero();
    }
    rest.add(&v.scale(k))
}

/// Replaces a parameter. For `s` and `d` the replacement must be affine in
/// `s` and `d` so that exponents and gamma arguments stay affine.
pub fn substitute_param(e: &Expr, name: &str, replacement: &Expr) -> Result<Expr> {
    let affine = if name == params::S || name == params::D {
        Some(Exponent::from_expr(replacement).ok_or_else(|| {
            Error::InconsistentSubstitution(format!("{name} must map to an affine expression in s and d"))
        })?)
    } else {
        None
    };
    let out = e.map(&|n| match (n, &affine) {
        (Expr::Param(p), _) if p == name => replacement.clone(),
        (Expr::Power(b, x), Some(v)) => Expr::Power(b, subst_exponent(&x, name, v)),
        (Expr::Gamma(x), Some(v)) => Expr::Gamma(subst_exponent(&x, name, v)),
        (Expr::SinPi(x), Some(v)) => Expr::SinPi(subst_exponent(&x, name, v)),
        (other, _) => other,
    });
    Ok(simplify(&out))
}

/// Sets the spacetime dimension to 4.
pub fn pin_dimension(e: &Expr) -> Expr {
    substitute_param(e, params::D, &Expr::int(4)).expect("integer replacement is affine")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_potential() {
        let v2 = Expr::field("V").powi(2);
        let repl = Expr::param("lc") * Expr::field("phi").powi(2) / Expr::int(2);
        let got = substitute(&v2, "V", &repl).unwrap();
        let want = simplify(&(Expr::param("lc").powi(2) * Expr::field("phi").powi(4) / Expr::int(4)));
        assert_eq!(got, want);
    }

    #[test]
    fn derivative_atoms_follow() {
        let repl = Expr::param("m2") + Expr::param("lc") * Expr::field("phi").powi(2) / Expr::int(2);
        let got = substitute(&Expr::field_d("V", &["mu"]), "V", &repl).unwrap();
        let want = simplify(&(Expr::param("lc") * Expr::field("phi") * Expr::field_d("phi", &["mu"])));
        assert_eq!(got, want);
    }

    #[test]
    fn identity_and_free_index() {
        let e = simplify(&(Expr::field("V").powi(3) + Expr::laplacian("V")));
        assert_eq!(substitute(&e, "V", &Expr::field("V")).unwrap(), e);
        assert!(substitute(&e, "V", &Expr::field_d("phi", &["mu"])).is_err());
    }

    #[test]
    fn pin_d() {
        let e = Expr::gamma(Exponent::new(num_traits::Zero::zero(), super::super::q(1), super::super::qr(-1, 2)));
        let got = pin_dimension(&e);
        assert_eq!(got, Expr::gamma(Exponent::affine(super::super::q(-2), super::super::q(1))));
    }
}
