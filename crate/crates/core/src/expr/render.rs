use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::rational::Q;
use super::{Constant, Exponent, Expr, FieldAtom, MomentumAtom};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Latex,
    Text,
    Json,
}

pub fn render(e: &Expr, fmt: Format) -> String {
    match fmt {
        Format::Json => to_json(e).to_string(),
        Format::Latex => Printer { latex: true, dummies: dummy_order(e) }.expr(e),
        Format::Text => Printer { latex: false, dummies: dummy_order(e) }.expr(e),
    }
}

fn dummy_order(e: &Expr) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    e.visit(&mut |n| {
        let mut push = |i: &String| {
            if i.starts_with('#') && !out.contains(i) {
                out.push(i.clone());
            }
        };
        match n {
            Expr::Field(f) => f.indices.iter().for_each(&mut push),
            Expr::Momentum(MomentumAtom::Component(i)) => push(i),
            Expr::Delta(a, b) => {
                push(a);
                push(b);
            }
            _ => {}
        }
    });
    out
}

const GREEK: [&str; 24] = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu", "nu",
    "xi", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi", "psi", "omega", "varphi",
];
const DUMMY_NAMES: [&str; 8] = ["mu", "nu", "rho", "sigma", "alpha", "beta", "kappa", "tau"];

struct Printer {
    latex: bool,
    dummies: Vec<String>,
}

impl Printer {
    fn name(&self, n: &str) -> String {
        if !self.latex {
            return n.to_string();
        }
        let (head, tail) = match n.split_once('_') {
            Some((h, t)) => (h, Some(t)),
            None => (n, None),
        };
        let head = if GREEK.contains(&head) { format!("\\{head}") } else { head.to_string() };
        match tail {
            Some(t) => format!("{head}_{{{}}}", self.name(t)),
            None => head,
        }
    }

    fn index(&self, i: &str) -> String {
        let base = match self.dummies.iter().position(|d| d == i) {
            Some(k) if k < DUMMY_NAMES.len() => DUMMY_NAMES[k].to_string(),
            Some(k) => format!("i{k}"),
            None => i.to_string(),
        };
        if self.latex {
            self.name(&base)
        } else {
            base
        }
    }

    fn rational(&self, r: &Q) -> String {
        if r.is_integer() {
            return r.to_string();
        }
        let (n, d) = (r.numer().abs(), r.denom().clone());
        let sign = if r.is_negative() { "-" } else { "" };
        if self.latex {
            format!("{sign}\\frac{{{n}}}{{{d}}}")
        } else {
            format!("{sign}{n}/{d}")
        }
    }

    fn exponent(&self, x: &Exponent) -> String {
        let mut s = String::new();
        let push = |coef: &Q, sym: &str, s: &mut String| {
            if coef.is_zero() {
                return;
            }
            let neg = coef.is_negative();
            let mag = coef.abs();
            if !s.is_empty() {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            let m = if mag.is_one() && !sym.is_empty() { String::new() } else { self.rational(&mag) };
            s.push_str(&m);
            s.push_str(sym);
        };
        push(&x.c, "", &mut s);
        push(&x.s, "s", &mut s);
        push(&x.d, "d", &mut s);
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }

    fn field(&self, f: &FieldAtom) -> String {
        let n = self.name(&f.name);
        let mut pre = String::new();
        if self.latex {
            match f.laplacians {
                0 => {}
                1 => pre.push_str("\\partial^2 "),
                k => pre.push_str(&format!("\\partial^{{{}}} ", 2 * k)),
            }
            for i in &f.indices {
                pre.push_str(&format!("\\partial_{{{}}}", self.index(i)));
            }
            if !f.indices.is_empty() {
                pre.push(' ');
            }
        } else {
            match f.laplacians {
                0 => {}
                1 => pre.push_str("d^2 "),
                k => pre.push_str(&format!("d^{} ", 2 * k)),
            }
            for i in &f.indices {
                pre.push_str(&format!("d_{} ", self.index(i)));
            }
        }
        format!("{pre}{n}")
    }

    fn is_compound(e: &Expr) -> bool {
        match e {
            Expr::Sum(_) | Expr::Product(_) | Expr::Power(..) => true,
            Expr::Rational(r) => !r.is_integer() || r.is_negative(),
            Expr::Field(f) => f.order() > 0,
            _ => false,
        }
    }

    fn paren(&self, s: String) -> String {
        if self.latex {
            format!("\\left({s}\\right)")
        } else {
            format!("({s})")
        }
    }

    fn power(&self, b: &Expr, x: &Exponent) -> String {
        let base = if Self::is_compound(b) { self.paren(self.expr(b)) } else { self.expr(b) };
        let ex = self.exponent(x);
        if self.latex {
            format!("{base}^{{{ex}}}")
        } else if x.as_integer().is_some_and(|k| k >= 0) {
            format!("{base}^{ex}")
        } else {
            format!("{base}^({ex})")
        }
    }

    fn product(&self, v: &[Expr]) -> String {
        let mut sign = false;
        let mut num: Vec<String> = Vec::new();
        let mut den: Vec<String> = Vec::new();
        let mut coef_num = String::new();
        let mut coef_den = String::new();
        for f in v {
            match f {
                Expr::Rational(r) => {
                    if r.is_negative() {
                        sign = !sign;
                    }
                    let r = r.abs();
                    if !r.numer().is_one() {
                        coef_num = r.numer().to_string();
                    }
                    if !r.denom().is_one() {
                        coef_den = r.denom().to_string();
                    }
                }
                Expr::Power(b, x) if x.is_constant() && x.c.is_negative() => {
                    let flipped = x.neg();
                    den.push(if flipped.is_one() { self.factor(b) } else { self.power(b, &flipped) });
                }
                other => num.push(self.factor(other)),
            }
        }
        if !coef_num.is_empty() {
            num.insert(0, coef_num);
        }
        if !coef_den.is_empty() {
            den.insert(0, coef_den);
        }
        let sep = if self.latex { " " } else { "*" };
        let n = if num.is_empty() { "1".to_string() } else { num.join(sep) };
        let body = if den.is_empty() {
            n
        } else if self.latex {
            format!("\\frac{{{n}}}{{{}}}", den.join(" "))
        } else {
            let d = if den.len() > 1 { format!("({})", den.join("*")) } else { den[0].clone() };
            format!("{n}/{d}")
        };
        if sign {
            format!("-{body}")
        } else {
            body
        }
    }

    fn factor(&self, e: &Expr) -> String {
        match e {
            Expr::Sum(_) => self.paren(self.expr(e)),
            Expr::Field(f) if f.order() > 0 && !self.latex => self.paren(self.expr(e)),
            _ => self.expr(e),
        }
    }

    fn expr(&self, e: &Expr) -> String {
        match e {
            Expr::Rational(r) => self.rational(r),
            Expr::Constant(Constant::Pi) => if self.latex { "\\pi" } else { "pi" }.into(),
            Expr::Constant(Constant::E) => "e".into(),
            Expr::Constant(Constant::I) => "i".into(),
            Expr::Param(p) => self.name(p),
            Expr::Field(f) => self.field(f),
            Expr::Momentum(MomentumAtom::Component(i)) => {
                if self.latex {
                    format!("p_{{{}}}", self.index(i))
                } else {
                    format!("p_{}", self.index(i))
                }
            }
            Expr::Momentum(MomentumAtom::Square) => if self.latex { "p^{2}" } else { "p^2" }.into(),
            Expr::Delta(a, b) => {
                if self.latex {
                    format!("\\delta_{{{}{}}}", self.index(a), self.index(b))
                } else {
                    format!("delta_{},{}", self.index(a), self.index(b))
                }
            }
            Expr::Gamma(x) => {
                if self.latex {
                    format!("\\Gamma\\left({}\\right)", self.exponent(x))
                } else {
                    format!("Gamma({})", self.exponent(x))
                }
            }
            Expr::SinPi(x) => {
                if self.latex {
                    format!("\\sin\\left(\\pi \\left({}\\right)\\right)", self.exponent(x))
                } else {
                    format!("sin(pi*({}))", self.exponent(x))
                }
            }
            Expr::Func(n, a) => {
                if self.latex {
                    format!("{}\\left[{}\\right]", self.name(n), self.expr(a))
                } else {
                    format!("{n}[{}]", self.expr(a))
                }
            }
            Expr::Log(a) => {
                if self.latex {
                    format!("\\ln{}", self.paren(self.expr(a)))
                } else {
                    format!("ln({})", self.expr(a))
                }
            }
            Expr::Power(b, x) => {
                if x.is_constant() && x.c.is_negative() {
                    self.product(std::slice::from_ref(e))
                } else {
                    self.power(b, x)
                }
            }
            Expr::Product(v) => self.product(v),
            Expr::Sum(v) => {
                let mut s = String::new();
                for (k, t) in v.iter().enumerate() {
                    let r = self.expr(t);
                    if k == 0 {
                        s.push_str(&r);
                    } else if let Some(rest) = r.strip_prefix('-') {
                        s.push_str(" - ");
                        s.push_str(rest);
                    } else {
                        s.push_str(" + ");
                        s.push_str(&r);
                    }
                }
                s
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

fn q_json(r: &Q) -> Value {
    Value::String(r.to_string())
}

fn q_parse(v: &Value) -> Result<Q> {
    let s = v.as_str().ok_or_else(|| Error::Parse(format!("expected rational string, got {v}")))?;
    s.parse::<Q>().map_err(|e| Error::Parse(format!("bad rational {s}: {e}")))
}

fn exp_json(x: &Exponent) -> Value {
    json!({"const": q_json(&x.c), "s_coeff": q_json(&x.s), "d_coeff": q_json(&x.d)})
}

fn exp_parse(v: &Value) -> Result<Exponent> {
    let get = |k: &str| -> Result<Q> {
        match v.get(k) {
            Some(x) => q_parse(x),
            None if k == "d_coeff" => Ok(Q::zero()),
            None => Err(Error::Parse(format!("exponent missing {k}"))),
        }
    };
    Ok(Exponent { c: get("const")?, s: get("s_coeff")?, d: get("d_coeff")? })
}

pub fn to_json(e: &Expr) -> Value {
    let kids = |v: &[Expr]| Value::Array(v.iter().map(to_json).collect());
    match e {
        Expr::Rational(r) => json!({"node": "rational", "value": q_json(r)}),
        Expr::Constant(c) => json!({"node": "constant", "name": match c {
            Constant::Pi => "pi", Constant::E => "e", Constant::I => "i" }}),
        Expr::Param(p) => json!({"node": "param", "name": p}),
        Expr::Field(f) => json!({"node": "field", "name": f.name, "indices": f.indices, "laplacians": f.laplacians}),
        Expr::Momentum(MomentumAtom::Component(i)) => json!({"node": "momentum", "index": i}),
        Expr::Momentum(MomentumAtom::Square) => json!({"node": "momentum_square"}),
        Expr::Delta(a, b) => json!({"node": "delta", "indices": [a, b]}),
        Expr::Gamma(x) => json!({"node": "gamma", "exponent": exp_json(x)}),
        Expr::SinPi(x) => json!({"node": "sin_pi", "exponent": exp_json(x)}),
        Expr::Func(n, a) => json!({"node": "func", "name": n, "children": [to_json(a)]}),
        Expr::Log(a) => json!({"node": "log", "children": [to_json(a)]}),
        Expr::Power(b, x) => json!({"node": "power", "children": [to_json(b)], "exponent": exp_json(x)}),
        Expr::Product(v) => json!({"node": "product", "children": kids(v)}),
        Expr::Sum(v) => json!({"node": "sum", "children": kids(v)}),
    }
}

pub fn from_json(v: &Value) -> Result<Expr> {
    let node = v.get("node").and_then(Value::as_str).ok_or_else(|| Error::Parse("missing node".into()))?;
    let s = |k: &str| -> Result<String> {
        v.get(k).and_then(Value::as_str).map(str::to_string).ok_or_else(|| Error::Parse(format!("{node}: missing {k}")))
    };
    let children = || -> Result<Vec<Expr>> {
        v.get("children")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse(format!("{node}: missing children")))?
            .iter()
            .map(from_json)
            .collect()
    };
    let first = || -> Result<Box<Expr>> {
        children()?.into_iter().next().map(Box::new).ok_or_else(|| Error::Parse(format!("{node}: empty children")))
    };
    let exponent = || exp_parse(v.get("exponent").ok_or_else(|| Error::Parse(format!("{node}: missing exponent")))?);
    Ok(match node {
        "rational" => Expr::Rational(q_parse(v.get("value").unwrap_or(&Value::Null))?),
        "constant" => match s("name")?.as_str() {
            "pi" => Expr::pi(),
            "e" => Expr::e(),
            "i" => Expr::i(),
            other => return Err(Error::Parse(format!("unknown constant {other}"))),
        },
        "param" => Expr::Param(s("name")?),
        "field" => {
            let indices = v
                .get("indices")
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(|x| x.as_str().map(str::to_string)).collect())
                .unwrap_or_default();
            let laplacians = v.get("laplacians").and_then(Value::as_u64).unwrap_or(0) as u32;
            Expr::Field(FieldAtom { name: s("name")?, indices, laplacians })
        }
        "momentum" => Expr::Momentum(MomentumAtom::Component(s("index")?)),
        "momentum_square" => Expr::p2(),
        "delta" => {
            let ix: Vec<String> = v
                .get("indices")
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(|x| x.as_str().map(str::to_string)).collect())
                .unwrap_or_default();
            if ix.len() != 2 {
                return Err(Error::Parse("delta needs two indices".into()));
            }
            Expr::Delta(ix[0].clone(), ix[1].clone())
        }
        "gamma" => Expr::Gamma(exponent()?),
        "sin_pi" => Expr::SinPi(exponent()?),
        "func" => Expr::Func(s("name")?, first()?),
        "log" => Expr::Log(first()?),
        "power" => Expr::Power(first()?, exponent()?),
        "product" => Expr::Product(children()?),
        "sum" => Expr::Sum(children()?),
        other => return Err(Error::Parse(format!("unknown node {other}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::simplify;

    #[test]
    fn latex_power_and_laplacian() {
        assert_eq!(render(&Expr::field("V").powi(2), Format::Latex), "V^{2}");
        assert_eq!(render(&Expr::laplacian("V"), Format::Latex), "\\partial^2 V");
    }

    #[test]
    fn json_round_trip() {
        let e = simplify(
            &(Expr::field("V").pow(Exponent::affine(super::super::q(2), super::super::q(-1)))
                * Expr::log(Expr::field("V") / Expr::param("mu").powi(2))
                + Expr::field_d("V", &["a"]) * Expr::field_d("V", &["a"]) / Expr::int(6)),
        );
        let back = from_json(&to_json(&e)).unwrap();
        assert_eq!(back, e);
    }
}
