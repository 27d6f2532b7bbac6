//! Explicit 4×4 Euclidean gamma matrices.

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

pub type M4 = Matrix4<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Chiral representation with Hermitian `γ^μ` and `{γ^μ, γ^ν} = 2δ^{μν}`.
#[derive(Clone, Debug)]
pub struct GammaRep {
    pub gammas: [M4; 4],
}

impl Default for GammaRep {
    fn default() -> Self {
        Self::chiral()
    }
}

impl GammaRep {
    pub fn chiral() -> Self {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        let pauli = [[[z, o], [o, z]], [[z, -i], [i, z]], [[o, z], [z, -o]]];
        let mut gammas = [M4::zeros(); 4];
        for (k, s) in pauli.iter().enumerate() {
            for r in 0..2 {
                for col in 0..2 {
                    gammas[k][(r, col + 2)] = -i * s[r][col];
                    gammas[k][(r + 2, col)] = i * s[r][col];
                }
            }
        }
        for r in 0..2 {
            gammas[3][(r, r + 2)] = o;
            gammas[3][(r + 2, r)] = o;
        }
        GammaRep { gammas }
    }

    /// `γ·p`.
    pub fn slash(&self, p: &[Complex64]) -> M4 {
        let mut m = M4::zeros();
        for (g, pk) in self.gammas.iter().zip(p) {
            m += g * *pk;
        }
        m
    }

    /// Largest entry of `{γ^μ, γ^ν} − 2δ^{μν}`.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let mut m = self.gammas[a] * self.gammas[b] + self.gammas[b] * self.gammas[a];
                if a == b {
                    m -= M4::identity() * c(2.0, 0.0);
                }
                worst = worst.max(m.iter().map(|x| x.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Eigenvalues of `φ + i γ·p` for real `p`, from the Hermitian matrix `γ·p`.
    pub fn dirac_eigenvalues(&self, phi: f64, p: &[f64]) -> [Complex64; 4] {
        let pc: Vec<Complex64> = p.iter().map(|x| c(*x, 0.0)).collect();
        let e = SymmetricEigen::new(self.slash(&pc));
        let mut out = [c(0.0, 0.0); 4];
        for (o, v) in out.iter_mut().zip(e.eigenvalues.iter()) {
            *o = c(phi, *v);
        }
        out
    }

    /// Spectral projectors `(1 ± n̸)/2` for a unit vector `n`.
    pub fn projectors(&self, n: &[f64]) -> [M4; 2] {
        let nc: Vec<Complex64> = n.iter().map(|x| c(*x, 0.0)).collect();
        let s = self.slash(&nc);
        let half = c(0.5, 0.0);
        [(M4::identity() + s) * half, (M4::identity() - s) * half]
    }
}

/// Vertices of the 24-cell: a spherical 5-design on `S³`.
pub fn sphere_design() -> Vec<[f64; 4]> {
    let mut out = Vec::with_capacity(24);
    for k in 0..4 {
        for sgn in [1.0, -1.0] {
            let mut v = [0.0; 4];
            v[k] = sgn;
            out.push(v);
        }
    }
    for bits in 0..16u32 {
        let mut v = [0.5; 4];
        for (k, x) in v.iter_mut().enumerate() {
            if bits >> k & 1 == 1 {
                *x = -0.5;
            }
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_algebra() {
        let g = GammaRep::chiral();
        assert!(g.clifford_defect() < 1e-15);
        for m in &g.gammas {
            assert!((m.adjoint() - m).norm() < 1e-15);
        }
    }

    #[test]
    fn spectrum() {
        let g = GammaRep::chiral();
        let ev = g.dirac_eigenvalues(1.5, &[0.3, -1.2, 0.4, 2.0]);
        let norm = (0.09f64 + 1.44 + 0.16 + 4.0).sqrt();
        let mut im: Vec<f64> = ev.iter().map(|z| z.im).collect();
        im.sort_by(f64::total_cmp);
        assert!((im[0] + norm).abs() < 1e-12 && (im[3] - norm).abs() < 1e-12);
        assert!(ev.iter().all(|z| (z.re - 1.5).abs() < 1e-12));
    }

    #[test]
    fn design_averages_quartic_moments() {
        let d = sphere_design();
        let n = d.len() as f64;
        let m2: f64 = d.iter().map(|v| v[0] * v[0]).sum::<f64>() / n;
        let m4: f64 = d.iter().map(|v| v[0].powi(4)).sum::<f64>() / n;
        let m22: f64 = d.iter().map(|v| v[0] * v[0] * v[1] * v[1]).sum::<f64>() / n;
        assert!((m2 - 0.25).abs() < 1e-15);
        assert!((m4 - 1.0 / 8.0).abs() < 1e-15);
        assert!((m22 - 1.0 / 24.0).abs() < 1e-15);
    }
}
