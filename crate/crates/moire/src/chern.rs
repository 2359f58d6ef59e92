//! Chern number of the flat-band line bundle: from the multipliers, and from
//! a lattice of gauge-invariant link variables.

use crate::error::{MoireError, Result};
use crate::lattice::{c64, omega, DualIndex, C64};
use crate::linalg::inner;
use crate::planewave::{PlaneWaveBasis, SpinorState};
use crate::spectra::lowest_state;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Samples per boundary segment when following the log-multiplier branch.
pub const BOUNDARY_SAMPLES: usize = 64;
pub const MIN_OVERLAP: f64 = 1e-8;
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// `e_p^{(n)}(k) = [e^{πip₁²ω + 2πikp₁}(−1)^{p₁+p₂}]^n` for `p = ωp₁ − p₂`.
pub fn multiplier(p1: i64, p2: i64, k: C64, n: u32) -> C64 {
    let i = c64(0.0, 1.0);
    let sign = if (p1 + p2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let p1f = p1 as f64;
    (sign * (i * PI * p1f * p1f * omega() + 2.0 * PI * i * k * p1f).exp()).powu(n)
}

/// `p = ωp₁ − p₂`.
pub fn lattice_shift(p1: i64, p2: i64) -> C64 {
    omega() * p1 as f64 - p2 as f64
}

/// `|e_{p+p′}(k) − e_{p′}(k+p) e_p(k)|`.
pub fn cocycle_defect(p: (i64, i64), q: (i64, i64), k: C64, n: u32) -> f64 {
    let lhs = multiplier(p.0 + q.0, p.1 + q.1, k, n);
    let rhs = multiplier(q.0, q.1, k + lattice_shift(p.0, p.1), n) * multiplier(p.0, p.1, k, n);
    (lhs - rhs).norm()
}

/// Change of `arg f` along `a → b`, followed continuously through `samples` steps.
fn phase_change(f: impl Fn(C64) -> C64, a: C64, b: C64, samples: usize) -> f64 {
    let mut total = 0.0;
    let mut prev = f(a);
    for s in 1..=samples {
        let cur = f(a + (b - a) * (s as f64 / samples as f64));
        total += (cur / prev).arg();
        prev = cur;
    }
    total
}

/// `c₁ = (i/2π)(log e_ω(1) − log e_ω(0) − log e_1(ω) + log e_1(0))`, with each
/// logarithm continued along the cell boundary.
pub fn chern_analytic(n: u32) -> Result<i64> {
    if n == 0 {
        return Err(MoireError::InvalidLayers(0));
    }
    let zero = c64(0.0, 0.0);
    // The bottom and top edges are glued by `e_ω`, the left and right by `e_1`.
    let along_one = phase_change(|k| multiplier(1, 0, k, n), zero, c64(1.0, 0.0), BOUNDARY_SAMPLES);
    let along_omega = phase_change(|k| multiplier(0, -1, k, n), zero, omega(), BOUNDARY_SAMPLES);
    let winding = (along_one - along_omega) / (2.0 * PI);
    if (winding - winding.round()).abs() > INTEGRALITY_TOL {
        return Err(MoireError::BranchAmbiguity { winding });
    }
    // (i/2π)·(i·2π·winding)
    Ok(-(winding.round() as i64))
}

/// Half-pixel grid over the dual cell: `k_{ij} = s_i f₁ + s_j f₂` with
/// `f₁ = dual(1,0)`, `f₂ = dual(0,1)` and `s_i = (i + ½)/G`, row-major in `i`.
pub fn berry_grid_points(g: usize) -> Vec<C64> {
    let (f1, f2) = (DualIndex::new(1, 0).point(), DualIndex::new(0, 1).point());
    (0..g * g)
        .map(|idx| {
            let (i, j) = (idx / g, idx % g);
            f1 * ((i as f64 + 0.5) / g as f64) + f2 * ((j as f64 + 0.5) / g as f64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChernNumeric {
    pub value: i64,
    /// `(1/2π) Σ Arg(U₁U₂U₃U₄)` before rounding.
    pub flux: f64,
    pub grid: usize,
    pub min_overlap: f64,
}

/// Link-variable Chern number from states on [`berry_grid_points`]. States
/// past the cell edge are obtained from the periodic gauge
/// `Φ_{k+p} = e^{−i⟨z,p⟩}Φ_k`.
pub fn chern_from_states(basis: &PlaneWaveBasis, states: &[SpinorState], g: usize) -> Result<ChernNumeric> {
    if states.len() != g * g {
        return Err(MoireError::DimensionMismatch { expected: g * g, got: states.len() });
    }
    let shifted = |i: usize, j: usize| -> SpinorState {
        let s = &states[(i % g) * g + j % g];
        let (di, dj) = ((i / g) as i64, (j / g) as i64);
        if di == 0 && dj == 0 {
            s.clone()
        } else {
            s.shift_momentum(basis, DualIndex::new(di, dj))
        }
    };
    let mut min_overlap = f64::INFINITY;
    let mut total = 0.0;
    for i in 0..g {
        for j in 0..g {
            let corners = [shifted(i, j), shifted(i + 1, j), shifted(i + 1, j + 1), shifted(i, j + 1)];
            let mut prod = c64(1.0, 0.0);
            for c in 0..4 {
                let u = inner(corners[c].coeffs(), corners[(c + 1) % 4].coeffs());
                let m = u.norm() / (corners[c].norm() * corners[(c + 1) % 4].norm());
                min_overlap = min_overlap.min(m);
                if m < MIN_OVERLAP {
                    return Err(MoireError::DegenerateOverlap { modulus: m });
                }
                prod *= u;
            }
            total += prod.arg();
        }
    }
    let flux = total / (2.0 * PI);
    if (flux - flux.round()).abs() > INTEGRALITY_TOL {
        return Err(MoireError::NonIntegralChern { value: flux });
    }
    // The bundle's first Chern class carries the opposite sign to the link flux.
    Ok(ChernNumeric { value: -(flux.round() as i64), flux, grid: g, min_overlap })
}

/// Flat-band Chern number on a `G × G` grid from smallest right singular vectors.
pub fn chern_numeric(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], g: usize) -> Result<ChernNumeric> {
    if g < 6 {
        return Err(MoireError::InvalidArgument(format!("Berry grid must be at least 6, got {g}")));
    }
    let states: Vec<SpinorState> = berry_grid_points(g)
        .par_iter()
        .map(|&k| {
            let (_, v) = lowest_state(basis, alpha, t, k)?;
            SpinorState::from_coeffs(basis.spec(), v)
        })
        .collect::<Result<_>>()?;
    chern_from_states(basis, &states, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_shift_is_one() {
        assert!((multiplier(0, 0, c64(0.3, -0.7), 3) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn cocycle_law() {
        let k = c64(0.3, 0.1);
        assert!(cocycle_defect((1, 0), (0, 1), k, 2) < 1e-12);
        for p in [(1, 0), (0, 1), (2, -1), (-1, 3)] {
            for q in [(1, 1), (0, -2), (3, 0)] {
                for n in 1..=3 {
                    let scale = multiplier(p.0 + q.0, p.1 + q.1, k, n).norm().max(1.0);
                    assert!(cocycle_defect(p, q, k, n) < 1e-12 * scale, "{p:?} {q:?} {n}");
                }
            }
        }
    }

    #[test]
    fn modulus_depends_on_imaginary_part() {
        for (p1, n) in [(1, 1), (2, 2), (-1, 3)] {
            let k = c64(0.37, 0.21);
            let m = multiplier(p1, 5, k, n).norm();
            let base = multiplier(p1, 5, c64(0.37, 0.0), n).norm();
            let expected = base * (-2.0 * PI * n as f64 * p1 as f64 * k.im).exp();
            assert!((m - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn analytic_values() {
        for n in 1..=5 {
            assert_eq!(chern_analytic(n).unwrap(), -(n as i64));
        }
    }

    #[test]
    fn grid_avoids_dirac_points() {
        use crate::lattice::distance_to_dual_coset;
        for g in [6, 8, 12, 16] {
            for k in berry_grid_points(g) {
                assert!(distance_to_dual_coset(k, c64(0.0, 0.0)) > 1e-3);
                assert!(distance_to_dual_coset(k, c64(0.0, -1.0)) > 1e-3);
            }
        }
    }
}
