use super::{simplify, Exponent, Expr, MomentumAtom};

#[derive(Clone, Copy)]
enum Wrt<'a> {
    X(&'a str),
    P(&'a str),
}

/// `∂/∂x^mu`, simplified.
pub fn diff_x(e: &Expr, mu: &str) -> Expr {
    simplify(&raw(e, Wrt::X(mu)))
}

/// `∂/∂p_mu`, simplified.
pub fn diff_p(e: &Expr, mu: &str) -> Expr {
    simplify(&raw(e, Wrt::P(mu)))
}

fn raw(e: &Expr, w: Wrt) -> Expr {
    match e {
        Expr::Rational(_) | Expr::Constant(_) | Expr::Param(_) | Expr::Delta(..) => Expr::zero(),
        Expr::Gamma(_) | Expr::SinPi(_) => Expr::zero(),
        Expr::Field(f) => match w {
            Wrt::X(mu) => Expr::Field(f.derivative(mu)),
            Wrt::P(_) => Expr::zero(),
        },
        Expr::Momentum(m) => match (w, m) {
            (Wrt::X(_), _) => Expr::zero(),
            (Wrt::P(mu), MomentumAtom::Component(nu)) => Expr::delta(nu, mu),
            (Wrt::P(mu), MomentumAtom::Square) => Expr::int(2) * Expr::p(mu),
        },
        Expr::Func(name, a) => {
            let da = raw(a, w);
            Expr::Func(format!("{name}'"), a.clone()) * da
        }
        Expr::Log(a) => raw(a, w) * (**a).clone().recip(),
        Expr::Power(b, ex) => {
            let db = raw(b, w);
            ex.to_expr() * Expr::Power(b.clone(), ex.sub(&Exponent::int(1))) * db
        }
        Expr::Product(v) => Expr::Sum(
            (0..v.len())
                .map(|i| {
                    let mut f = v.clone();
                    f[i] = raw(&v[i], w);
                    Expr::Product(f)
                })
                .collect(),
        ),
        Expr::Sum(v) => Expr::Sum(v.iter().map(|c| raw(c, w)).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rule_on_square() {
        let v = Expr::field("V");
        let got = diff_x(&v.clone().powi(2), "mu");
        assert_eq!(got, simplify(&(Expr::int(2) * v * Expr::field_d("V", &["mu"]))));
    }

    #[test]
    fn momentum_is_x_independent() {
        assert_eq!(diff_x(&Expr::p2(), "mu"), Expr::zero());
        assert_eq!(diff_p(&Expr::p2(), "mu"), simplify(&(Expr::int(2) * Expr::p("mu"))));
    }

    #[test]
    fn derivative_indices_sorted() {
        assert_eq!(diff_x(&Expr::field_d("V", &["nu"]), "mu"), Expr::field_d("V", &["mu", "nu"]));
    }
}
