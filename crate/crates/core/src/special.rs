//! Special functions on complex arguments.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) by the Lanczos approximation with reflection for Re z < 1/2.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (PI * z).sin();
        return PI / (s * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// True when `z` sits on a pole of Γ.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.im.abs() < 1e-12 && z.re <= 0.5 && (z.re - z.re.round()).abs() < 1e-12
}

pub fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        for (n, f) in [(1, 1.0), (2, 1.0), (5, 24.0), (10, 362_880.0)] {
            let g = gamma_real(n as f64);
            assert!((g - f).abs() / f < 1e-13, "{n}: {g}");
        }
    }

    #[test]
    fn half_integer_and_reflection() {
        assert!((gamma_real(0.5) - PI.sqrt()).abs() < 1e-14);
        let v = gamma_real(-1.5);
        assert!((v - 4.0 * PI.sqrt() / 3.0).abs() < 1e-13);
    }

    #[test]
    fn recurrence_off_axis() {
        let z = Complex64::new(1.3, 0.7);
        let lhs = gamma(z + 1.0);
        let rhs = z * gamma(z);
        assert!((lhs - rhs).norm() / lhs.norm() < 1e-13);
    }
}
