//! Adaptive Gauss–Kronrod quadrature with infinite ranges and Hadamard
//! finite parts by excision.

use std::collections::BinaryHeap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_INTERVALS: usize = 4000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    /// `∫|f|` on the piece, for the roundoff floor.
    abs: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let (lo, hi) = (f(c - h * XGK[j]), f(c + h * XGK[j]));
        let s = lo + hi;
        k += s * WGK[j];
        abs += (lo.norm() + hi.norm()) * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    Piece { a, b, value: k * h, err: ((k - g) * h).norm(), abs: abs * h.abs() }
}

/// `∫_a^b f` to absolute tolerance `tol`, bisecting the worst subinterval.
/// A tolerance below the roundoff level `50 ε ∫|f|` is raised to it.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    let mut heap = BinaryHeap::new();
    let first = gk15(&f, a, b);
    let (mut total, mut err, mut abs) = (first.value, first.err, first.abs);
    heap.push(first);
    while err > tol.max(50.0 * f64::EPSILON * abs) {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergent(format!("[{a}, {b}]: error estimate {err:e} after {MAX_INTERVALS} subintervals")));
        }
        let worst = heap.pop().unwrap();
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::NonConvergent(format!("interval [{}, {}] cannot be split", worst.a, worst.b)));
        }
        let (l, r) = (gk15(&f, worst.a, m), gk15(&f, m, worst.b));
        total += l.value + r.value - worst.value;
        err += l.err + r.err - worst.err;
        abs += l.abs + r.abs - worst.abs;
        heap.push(l);
        heap.push(r);
        if heap.len() % 64 == 0 {
            // refresh the running sums against drift
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.err).sum();
            abs = heap.iter().map(|p| p.abs).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

/// `∫_a^∞ f` through `x = a + t/(1 − t)`.
pub fn integrate_to_infinity(f: impl Fn(f64) -> Complex64, a: f64, tol: f64) -> Result<Complex64> {
    integrate(
        |t| {
            let u = 1.0 - t;
            let x = a + t / u;
            if x.is_finite() {
                f(x) / (u * u)
            } else {
                Complex64::new(0.0, 0.0)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Hadamard finite part of `∫_a^b f` with a pole of order `order` at interior
/// point `c`, for `f` meromorphic there: the symmetric excision `|x − c| > δ`
/// is evaluated at several `δ`. Symmetric excision leaves only odd powers of
/// `δ`, so the divergent `δ^{-k}` and vanishing `δ^k` terms are fitted away.
pub fn finite_part(f: impl Fn(f64) -> Complex64, a: f64, b: f64, c: f64, order: usize, tol: f64) -> Result<Complex64> {
    let h = 0.5 * (c - a).min(b - c);
    let deltas: Vec<f64> = (0..24).map(|k| h * (0.25 + 0.75 * k as f64 / 23.0)).collect();
    let mut basis: Vec<Box<dyn Fn(f64) -> f64>> = vec![Box::new(|_| 1.0)];
    for k in (1..order as i32).filter(|k| k % 2 == 1) {
        basis.push(Box::new(move |d: f64| d.powi(-k)));
    }
    for k in [1, 3, 5, 7, 9] {
        basis.push(Box::new(move |d: f64| (d / h).powi(k)));
    }
    let rows = deltas.len();
    let cols = basis.len();
    let mut m = DMatrix::<f64>::zeros(rows, cols);
    let mut yr = DVector::<f64>::zeros(rows);
    let mut yi = DVector::<f64>::zeros(rows);
    for (r, d) in deltas.iter().enumerate() {
        let scale = f(c - d).norm().max(f(c + d).norm()).max(1.0) * d;
        let v = integrate(&f, a, c - d, tol * scale)? + integrate(&f, c + d, b, tol * scale)?;
        yr[r] = v.re;
        yi[r] = v.im;
        for (k, g) in basis.iter().enumerate() {
            m[(r, k)] = g(*d);
        }
    }
    let svd = m.svd(true, true);
    let re = svd.solve(&yr, 1e-14).map_err(|e| Error::NonConvergent(e.to_string()))?;
    let im = svd.solve(&yi, 1e-14).map_err(|e| Error::NonConvergent(e.to_string()))?;
    Ok(Complex64::new(re[0], im[0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn polynomial() {
        let v = integrate(|t| r(t * t), 0.0, 1.0, 1e-14).unwrap();
        assert!((v.re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn mellin_type_integral() {
        let v = integrate_to_infinity(|l| r(l.powf(-0.5) / (l + 1.0).powi(2)), 0.0, 1e-13).unwrap();
        assert!((v.re - std::f64::consts::FRAC_PI_2).abs() < 1e-11, "{v}");
    }

    #[test]
    fn finite_part_quartic_pole() {
        let v = finite_part(|t| r(t * t / (2.0 * t - 1.0).powi(4)), 0.0, 1.0, 0.5, 4, 1e-14).unwrap();
        assert!((v.re + 1.0 / 3.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn finite_part_double_pole() {
        let v = finite_part(|u| r(1.0 / (u * u)), -1.0, 1.0, 0.0, 2, 1e-14).unwrap();
        assert!((v.re + 2.0).abs() < 1e-9, "{v}");
    }
}
