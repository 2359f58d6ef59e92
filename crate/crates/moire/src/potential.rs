//! The moiré tunnelling potential `U(z) = Σ_k ω^k e^{½(zω̄^k − z̄ω^k)}`.

use crate::lattice::{c64, omega_pow, pairing, C64};

/// Three-term exponential sum `Σ c_j e^{i⟨z, f_j⟩}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierPotential {
    /// `(frequency, coefficient)` pairs.
    pub terms: [(C64, C64); 3],
}

impl FourierPotential {
    pub fn eval(&self, z: C64) -> C64 {
        self.terms
            .iter()
            .map(|&(f, c)| c * C64::from_polar(1.0, pairing(z, f)))
            .sum()
    }
}

/// Direct evaluation of `U(z)`.
pub fn eval_u(z: C64) -> C64 {
    (0..3)
        .map(|k| {
            let w = omega_pow(k);
            let arg = 0.5 * (z * w.conj() - z.conj() * w);
            omega_pow(k) * arg.exp()
        })
        .sum()
}

/// Exact Fourier form of `U(sign·z)`: frequencies `sign·iω^k`, coefficients `ω^k`.
pub fn fourier_u(sign: i32) -> FourierPotential {
    assert!(sign == 1 || sign == -1, "sign must be ±1");
    let s = sign as f64;
    let term = |k: i64| (c64(0.0, s) * omega_pow(k), omega_pow(k));
    FourierPotential {
        terms: [term(0), term(1), term(2)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lattice_point, omega};
    use approx::assert_abs_diff_eq;

    #[test]
    fn vanishes_at_origin() {
        assert_abs_diff_eq!(eval_u(c64(0.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rotation_and_translation() {
        let z0 = c64(0.3, 0.1);
        assert_abs_diff_eq!((eval_u(omega() * z0) - omega() * eval_u(z0)).norm(), 0.0, epsilon = 1e-14);
        let shifted = eval_u(z0 + lattice_point(1, 0));
        assert_abs_diff_eq!((shifted - omega().conj() * eval_u(z0)).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn fourier_terms() {
        let plus = fourier_u(1);
        let minus = fourier_u(-1);
        assert_eq!(plus.terms[0], (c64(0.0, 1.0), c64(1.0, 0.0)));
        for j in 0..3 {
            assert_eq!(minus.terms[j].0, -plus.terms[j].0);
            assert_eq!(minus.terms[j].1, plus.terms[j].1);
        }
        let z = c64(-0.8, 1.7);
        assert_abs_diff_eq!((minus.eval(z) - eval_u(-z)).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn dft_oracle_recovers_coefficients() {
        // Sample U over the cell of 3Λ and project onto each frequency.
        let g = 48usize;
        let (e1, e2) = (3.0 * lattice_point(1, 0), 3.0 * lattice_point(0, 1));
        let samples: Vec<(C64, C64)> = (0..g * g)
            .map(|idx| {
                let (i, j) = (idx / g, idx % g);
                let z = e1 * (i as f64 / g as f64) + e2 * (j as f64 / g as f64);
                (z, eval_u(z))
            })
            .collect();
        let project = |f: C64| {
            samples
                .iter()
                .map(|&(z, u)| u * C64::from_polar(1.0, -pairing(z, f)))
                .sum::<C64>()
                / (g * g) as f64
        };
        for &(f, c) in fourier_u(1).terms.iter() {
            assert_abs_diff_eq!((project(f) - c).norm(), 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!((project(c64(0.0, 1.0)) - 1.0).norm(), 0.0, epsilon = 1e-12);
        assert!(project(c64(0.0, -1.0)).norm() < 1e-12);
    }
}
