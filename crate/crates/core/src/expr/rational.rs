//! Exact coefficient arithmetic: Gaussian rationals and rational functions of `s`.
//!
//! Every monomial of a normalized expression carries a [`RatFunc`] coefficient,
//! which is how gamma-function ratios and the `1/((s-1)(s-2))` style prefactors
//! stay exact all the way to the `s = 0` derivative.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators: fall back to component-wise conversion
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qi {
    pub re: Q,
    pub im: Q,
}

impl Qi {
    pub fn new(re: Q, im: Q) -> Self {
        Qi { re, im }
    }
    pub fn real(re: Q) -> Self {
        Qi { re, im: Q::zero() }
    }
    pub fn int(n: i64) -> Self {
        Qi::real(q(n))
    }
    pub fn i() -> Self {
        Qi { re: Q::zero(), im: Q::one() }
    }
    pub fn zero() -> Self {
        Qi::int(0)
    }
    pub fn one() -> Self {
        Qi::int(1)
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        Qi { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "division by zero in Gaussian rational");
        Qi { re: &self.re / &n, im: -&self.im / &n }
    }
    pub fn powi(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().powi(-e);
        }
        let mut acc = Qi::one();
        let mut base = self.clone();
        let mut k = e as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }
    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
}

impl fmt::Display for Qi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            _ => write!(f, "({}{}{}i)", self.re, if self.im.is_negative() { "" } else { "+" }, self.im),
        }
    }
}

impl<'a> Add<&'a Qi> for &'a Qi {
    type Output = Qi;
    fn add(self, o: &Qi) -> Qi {
        Qi { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}
impl<'a> Sub<&'a Qi> for &'a Qi {
    type Output = Qi;
    fn sub(self, o: &Qi) -> Qi {
        Qi { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}
impl<'a> Mul<&'a Qi> for &'a Qi {
    type Output = Qi;
    fn mul(self, o: &Qi) -> Qi {
        Qi {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}
impl<'a> Div<&'a Qi> for &'a Qi {
    type Output = Qi;
    fn div(self, o: &Qi) -> Qi {
        self * &o.inv()
    }
}
impl Neg for Qi {
    type Output = Qi;
    fn neg(self) -> Qi {
        Qi { re: -self.re, im: -self.im }
    }
}

/// Dense univariate polynomial in `s`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Qi>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Qi>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }
    pub fn constant(c: Qi) -> Self {
        Poly::new(vec![c])
    }
    /// `s + a`
    pub fn linear(a: Q) -> Self {
        Poly::new(vec![Qi::real(a), Qi::one()])
    }
    pub fn coeffs(&self) -> &[Qi] {
        &self.coeffs
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
    pub fn lead(&self) -> Qi {
        self.coeffs.last().cloned().unwrap_or_else(Qi::zero)
    }
    pub fn scale(&self, c: &Qi) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }
    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Qi::zero();
        Poly::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&z) + o.coeffs.get(k).unwrap_or(&z))
                .collect(),
        )
    }
    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().cloned().map(Neg::neg).collect() }
    }
    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Qi::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead_inv = d.lead().inv();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Qi::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&c * dc);
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv())
    }
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }
    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Qi::int(k as i64))
                .collect(),
        )
    }
    pub fn eval(&self, s: &Qi) -> Qi {
        let mut acc = Qi::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * s) + c;
        }
        acc
    }
    pub fn eval_c64(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * s + c.to_c64();
        }
        acc
    }
}

/// Reduced rational function `num/den` in `s` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let l = d.lead().inv();
        RatFunc { num: n.scale(&l), den: d.scale(&l) }
    }
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::constant(Qi::one()) }
    }
    pub fn one() -> Self {
        RatFunc::constant(Qi::one())
    }
    pub fn constant(c: Qi) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::constant(Qi::one()) }
    }
    pub fn rational(c: Q) -> Self {
        RatFunc::constant(Qi::real(c))
    }
    pub fn s() -> Self {
        RatFunc { num: Poly::linear(Q::zero()), den: Poly::constant(Qi::one()) }
    }
    /// `s + a`
    pub fn linear(a: Q) -> Self {
        RatFunc { num: Poly::linear(a), den: Poly::constant(Qi::one()) }
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
    pub fn as_constant(&self) -> Option<Qi> {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Some(Qi::zero()),
            (Some(0), Some(0)) => Some(self.num.lead()),
            _ => None,
        }
    }
    pub fn add(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }
    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    pub fn inv(&self) -> RatFunc {
        RatFunc::new(self.den.clone(), self.num.clone())
    }
    pub fn div(&self, o: &RatFunc) -> RatFunc {
        self.mul(&o.inv())
    }
    pub fn powi(&self, e: i64) -> RatFunc {
        if e < 0 {
            return self.inv().powi(-e);
        }
        let mut acc = RatFunc::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    pub fn scale(&self, c: &Qi) -> RatFunc {
        RatFunc::new(self.num.scale(c), self.den.clone())
    }
    pub fn derivative(&self) -> RatFunc {
        RatFunc::new(
            self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }
    /// Exact value at a point; `None` at a pole.
    pub fn eval(&self, s: &Qi) -> Option<Qi> {
        let d = self.den.eval(s);
        if d.is_zero() {
            None
        } else {
            Some(&self.num.eval(s) / &d)
        }
    }
    pub fn eval_c64(&self, s: Complex64) -> Complex64 {
        self.num.eval_c64(s) / self.den.eval_c64(s)
    }
    /// True when the coefficient has no `s` dependence.
    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_cancels_common_factor() {
        // (s-1)(s+2) / (s-1) = s+2
        let a = Poly::linear(q(-1)).mul(&Poly::linear(q(2)));
        let r = RatFunc::new(a, Poly::linear(q(-1)));
        assert_eq!(r, RatFunc::linear(q(2)));
    }

    #[test]
    fn partial_fractions_recombine() {
        // 1/(s-1) - 1/(s-2) = -1/((s-1)(s-2))
        let a = RatFunc::linear(q(-1)).inv();
        let b = RatFunc::linear(q(-2)).inv();
        let lhs = a.sub(&b);
        let rhs = RatFunc::linear(q(-1)).mul(&RatFunc::linear(q(-2))).inv().neg();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_at_zero_of_inverse_quartic() {
        // d/ds 1/((s-1)(s-2)(s-3)(s-4)) at 0 = (25/12)/24
        let mut p = RatFunc::one();
        for k in 1..=4 {
            p = p.mul(&RatFunc::linear(q(-k)));
        }
        let d = p.inv().derivative().eval(&Qi::zero()).unwrap();
        assert_eq!(d, Qi::real(qr(25, 288)));
    }

    #[test]
    fn gaussian_inverse() {
        let z = Qi::new(q(3), q(4));
        assert!((&z * &z.inv()).is_one());
    }
}
