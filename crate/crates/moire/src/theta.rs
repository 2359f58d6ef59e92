//! Theta functions at modulus ω and the explicit flat-band family.
//!
//! `θ(ζ) = −Σ_n exp(πi(n+½)²ω + 2πi(n+½)(ζ+½))`, odd, with simple zeros on
//! `ℤ + ωℤ`. Moiré coordinates are related by `z = (4/3)πiω ζ` and
//! `𝐤 = √3ω k`.

use crate::error::{MoireError, Result};
use crate::lattice::{c64, cell_area, lattice_point, omega, pairing, stacking_point, DualIndex, C64, SQRT3};
use crate::planewave::{BasisSpec, PlaneWaveBasis, SpinorState};
use crate::spectra::{flatband_multiplicity, lowest_state};
use std::f64::consts::PI;

pub const THETA_TERMS: usize = 12;
pub const GRID_SIZE: usize = 256;

/// Truncated theta series summed over `|n + ½| ≤ M + ½`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThetaSeries {
    pub m: usize,
}

impl Default for ThetaSeries {
    fn default() -> Self {
        Self { m: THETA_TERMS }
    }
}

impl ThetaSeries {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    fn terms(&self) -> impl Iterator<Item = f64> {
        let m = self.m as i64;
        (-m - 1..=m).map(|n| n as f64 + 0.5)
    }

    fn term(h: f64, zeta: C64) -> C64 {
        let i = c64(0.0, 1.0);
        (i * PI * h * h * omega() + 2.0 * PI * i * h * (zeta + 0.5)).exp()
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        -self.terms().map(|h| Self::term(h, zeta)).sum::<C64>()
    }

    pub fn derivative(&self, zeta: C64) -> C64 {
        let i = c64(0.0, 1.0);
        -self.terms().map(|h| 2.0 * PI * i * h * Self::term(h, zeta)).sum::<C64>()
    }
}

pub fn theta(zeta: C64) -> C64 {
    ThetaSeries::default().eval(zeta)
}

/// `θ′(0)` from the term-wise differentiated series.
pub fn theta_prime0() -> C64 {
    ThetaSeries::default().derivative(c64(0.0, 0.0))
}

/// Distance from `ζ` to the zero set `ℤ + ωℤ`.
pub fn distance_to_zero_set(zeta: C64) -> f64 {
    let v = 2.0 * zeta.im / SQRT3;
    let u = zeta.re + 0.5 * v;
    let mut best = f64::INFINITY;
    for du in -1..=1 {
        for dv in -1..=1 {
            let p = c64(u.round() + du as f64, 0.0) + omega() * (v.round() + dv as f64);
            best = best.min((zeta - p).norm());
        }
    }
    best
}

/// `g_k(ζ) = e^{2πζ(k−k̄)/√3} θ(ζ+k)/θ(ζ)`, quasi-periodic with characters
/// `e^{2πi(am+bn)}` for `k = ωa − b`.
pub fn g_k(zeta: C64, k: C64) -> C64 {
    (2.0 * PI * zeta * (k - k.conj()) / SQRT3).exp() * theta(zeta + k) / theta(zeta)
}

/// `F_k(ζ) = e^{2π(ζ−ζ̄)k/√3} θ(ζ+k)/θ(ζ)`, periodic on `ℤ + ωℤ`.
pub fn fk(zeta: C64, k: C64) -> Result<C64> {
    if distance_to_zero_set(zeta) < 1e-9 {
        return Err(MoireError::PoleAt(zeta));
    }
    Ok((2.0 * PI * (zeta - zeta.conj()) * k / SQRT3).exp() * theta(zeta + k) / theta(zeta))
}

/// `ζ = 3z/(4πiω)`.
pub fn zeta_of(z: C64) -> C64 {
    3.0 * z / (c64(0.0, 4.0 * PI) * omega())
}

/// `k = 𝐤/(√3ω)`.
pub fn k_of(kb: C64) -> C64 {
    kb / (SQRT3 * omega())
}

/// `F_𝐤(z) = F_k(3z/(4πiω))`, periodic on Λ.
pub fn fk_moire(z: C64, kb: C64) -> Result<C64> {
    fk(zeta_of(z), k_of(kb))
}

/// Half-pixel sampling grid on the fundamental cell of `ℂ/Λ` with exact
/// Fourier synthesis and analysis for the modes of a [`PlaneWaveBasis`].
#[derive(Debug, Clone)]
pub struct CellGrid {
    g: usize,
    /// `(⟨e₁,p⟩, ⟨e₂,p⟩)/2π` for every basis mode.
    freq: Vec<(i64, i64)>,
    bmin: i64,
    bcount: usize,
    roots: Vec<C64>,
    area: f64,
}

impl CellGrid {
    pub fn new(basis: &PlaneWaveBasis, g: usize) -> Self {
        let (e1, e2) = (lattice_point(1, 0), lattice_point(0, 1));
        let freq: Vec<(i64, i64)> = basis
            .modes()
            .iter()
            .map(|d| {
                let p = d.point();
                let a = pairing(e1, p) / (2.0 * PI);
                let b = pairing(e2, p) / (2.0 * PI);
                (a.round() as i64, b.round() as i64)
            })
            .collect();
        let bmin = freq.iter().map(|f| f.1).min().unwrap_or(0);
        let bmax = freq.iter().map(|f| f.1).max().unwrap_or(0);
        let roots = (0..2 * g).map(|r| C64::from_polar(1.0, PI * r as f64 / g as f64)).collect();
        Self { g, freq, bmin, bcount: (bmax - bmin + 1) as usize, roots, area: cell_area() }
    }

    pub fn size(&self) -> usize {
        self.g
    }

    /// `e^{2πi f (2i+1)/(2G)}`.
    #[inline]
    fn root(&self, f: i64, i: usize) -> C64 {
        let r = (f * (2 * i as i64 + 1)).rem_euclid(2 * self.g as i64) as usize;
        self.roots[r]
    }

    /// Sample points `z_{ij} = s_i e₁ + s_j e₂`, `s_i = (i + ½)/G`, row-major.
    pub fn points(&self) -> Vec<C64> {
        let g = self.g;
        let (e1, e2) = (lattice_point(1, 0), lattice_point(0, 1));
        (0..g * g)
            .map(|idx| {
                let (i, j) = (idx / g, idx % g);
                e1 * ((i as f64 + 0.5) / g as f64) + e2 * ((j as f64 + 0.5) / g as f64)
            })
            .collect()
    }

    /// Values of `Σ c_p e^{i⟨z,p⟩}/√|ℂ/Λ|` on the grid.
    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        let g = self.g;
        let mut partial = vec![c64(0.0, 0.0); self.bcount * g];
        for (c, &(a, b)) in coeffs.iter().zip(&self.freq) {
            if *c == c64(0.0, 0.0) {
                continue;
            }
            let row = &mut partial[(b - self.bmin) as usize * g..][..g];
            for (i, slot) in row.iter_mut().enumerate() {
                *slot += c * self.root(a, i);
            }
        }
        let scale = 1.0 / self.area.sqrt();
        let mut out = vec![c64(0.0, 0.0); g * g];
        for bi in 0..self.bcount {
            let b = bi as i64 + self.bmin;
            let row = &partial[bi * g..][..g];
            if row.iter().all(|z| *z == c64(0.0, 0.0)) {
                continue;
            }
            let phases: Vec<C64> = (0..g).map(|j| self.root(b, j)).collect();
            for i in 0..g {
                let ri = row[i] * scale;
                let dst = &mut out[i * g..][..g];
                for (d, p) in dst.iter_mut().zip(&phases) {
                    *d += ri * p;
                }
            }
        }
        out
    }

    /// Fourier coefficients of grid values by the trapezoidal rule.
    pub fn analyze(&self, values: &[C64]) -> Vec<C64> {
        let g = self.g;
        assert_eq!(values.len(), g * g);
        let mut partial = vec![c64(0.0, 0.0); self.bcount * g];
        for bi in 0..self.bcount {
            let b = bi as i64 + self.bmin;
            let phases: Vec<C64> = (0..g).map(|j| self.root(b, j).conj()).collect();
            for i in 0..g {
                let src = &values[i * g..][..g];
                partial[bi * g + i] = src.iter().zip(&phases).map(|(v, p)| v * p).sum();
            }
        }
        let scale = self.area.sqrt() / (g * g) as f64;
        self.freq
            .iter()
            .map(|&(a, b)| {
                let row = &partial[(b - self.bmin) as usize * g..][..g];
                row.iter().enumerate().map(|(i, v)| v * self.root(a, i).conj()).sum::<C64>() * scale
            })
            .collect()
    }
}

/// Normalised kernel element of `D(α)` at `k = 0` for a simple magic α.
///
/// Convention: unit coefficient norm (the `L²(ℂ/Λ; ℂ²)` norm) and the
/// zero-frequency coefficient of the second component real and nonnegative.
#[derive(Debug, Clone)]
pub struct MagicKernel {
    pub alpha: C64,
    pub state: SpinorState,
    pub singular_value: f64,
}

impl MagicKernel {
    pub fn compute(cutoff: usize, alpha: C64, probe: C64) -> Result<Self> {
        let basis = PlaneWaveBasis::new(BasisSpec::new(1, cutoff))?;
        let multiplicity = flatband_multiplicity(&basis, alpha, &[], probe, 1e-6)?;
        if multiplicity != 1 {
            return Err(MoireError::NotSimpleMagic { alpha, multiplicity });
        }
        let (s, v) = lowest_state(&basis, alpha, &[], c64(0.0, 0.0))?;
        let mut state = SpinorState::from_coeffs(basis.spec(), v)?;
        let idx = basis.index(1, DualIndex::new(0, 0)).expect("zero mode");
        let c0 = state.coeffs()[idx];
        if c0.norm() > 0.0 {
            state.scale(c0.conj() / c0.norm());
        }
        let state = state.normalized();
        Ok(Self { alpha, state, singular_value: s })
    }

    /// Zero-frequency coefficient of `u₂`.
    pub fn zero_mode(&self) -> f64 {
        let m = self.state.spec().mode_count();
        self.state.coeffs()[m + m / 2].re
    }

    /// `∫_{ℂ/Λ} u₂ dm`.
    pub fn integral(&self) -> f64 {
        self.zero_mode() * cell_area().sqrt()
    }
}

/// `|I(u₂)|` at a simple magic parameter.
pub fn integral_i(cutoff: usize, alpha: C64, probe: C64) -> Result<f64> {
    Ok(MagicKernel::compute(cutoff, alpha, probe)?.integral().abs())
}

/// The family `𝐤 ↦ Φ_𝐤` of flat-band states of `D_n(α;t) + 𝐤`.
#[derive(Debug, Clone)]
pub struct FlatBandFamily {
    basis: PlaneWaveBasis,
    t: Vec<f64>,
    kernel: MagicKernel,
    grid: CellGrid,
    points: Vec<C64>,
    u_grid: [Vec<C64>; 2],
}

impl FlatBandFamily {
    pub fn new(basis: &PlaneWaveBasis, t: &[f64], kernel: MagicKernel, grid_size: usize) -> Result<Self> {
        if t.len() + 1 != basis.layers() {
            return Err(MoireError::TunnellingLength { expected: basis.layers() - 1, got: t.len() });
        }
        if kernel.state.spec().cutoff != basis.cutoff() {
            return Err(MoireError::InvalidArgument("kernel and basis cutoffs differ".into()));
        }
        let grid = CellGrid::new(basis, grid_size);
        let points = grid.points();
        let zs = stacking_point();
        if let Some(&z) = points.iter().find(|&&z| distance_to_zero_set(zeta_of(z + zs)) < 1e-9) {
            return Err(MoireError::GridPole(z));
        }
        let u_grid = [grid.synthesize(kernel.state.component(0)), grid.synthesize(kernel.state.component(1))];
        Ok(Self { basis: basis.clone(), t: t.to_vec(), kernel, grid, points, u_grid })
    }

    pub fn kernel(&self) -> &MagicKernel {
        &self.kernel
    }

    pub fn basis(&self) -> &PlaneWaveBasis {
        &self.basis
    }

    /// Samples of the periodic parts of `u` on the grid.
    pub fn kernel_samples(&self) -> (&[C64], &[C64], &[C64]) {
        (&self.points, &self.u_grid[0], &self.u_grid[1])
    }

    /// `θ(k)^{n−1}` with `k = 𝐤/(√3ω)`.
    pub fn theta_factor(&self, kb: C64) -> C64 {
        theta(k_of(kb)).powu(self.basis.layers() as u32 - 1)
    }

    /// Coefficients of `v_𝐤 = F_𝐤(z + z_S)u` in the single-layer basis.
    pub fn v(&self, kb: C64) -> Result<[Vec<C64>; 2]> {
        let zs = stacking_point();
        let f: Vec<C64> = self.points.iter().map(|&z| fk_moire(z + zs, kb)).collect::<Result<_>>()?;
        let prod = |u: &[C64]| -> Vec<C64> { u.iter().zip(&f).map(|(a, b)| a * b).collect() };
        Ok([self.grid.analyze(&prod(&self.u_grid[0])), self.grid.analyze(&prod(&self.u_grid[1]))])
    }

    /// `Φ_𝐤`: `φ₁, φ₂ = θ(k)^{n−1}v_𝐤`, odd higher components zero, and
    /// `φ_{2m+2} = −t_m (2D_z̄ + 𝐤)⁻¹ φ_{2m}`.
    pub fn state(&self, kb: C64) -> Result<SpinorState> {
        let [v1, v2] = self.v(kb)?;
        let th = self.theta_factor(kb);
        let mut s = SpinorState::zeros(self.basis.spec());
        for (d, v) in s.component_mut(0).iter_mut().zip(&v1) {
            *d = th * v;
        }
        let mut cur: Vec<C64> = v2.iter().map(|v| th * v).collect();
        s.component_mut(1).copy_from_slice(&cur);
        for m in 1..self.basis.layers() {
            for (i, c) in cur.iter_mut().enumerate() {
                let sym = self.basis.mode_momentum(i) + kb;
                if sym.norm() < 1e-12 {
                    if c.norm() > 0.0 {
                        return Err(MoireError::SingularResolvent { component: 2 * m + 1, modulus: sym.norm() });
                    }
                    continue;
                }
                *c = -self.t[m - 1] * *c / sym;
            }
            s.component_mut(2 * m + 1).copy_from_slice(&cur);
        }
        Ok(s)
    }

    /// The `𝐤 → 0` limit: for `n ≥ 2` only the constant mode of `φ_{2n}` survives,
    /// with value `(−1)^{n−1}(∏t)(θ′(0)/√3ω)^{n−1}` times the zero mode of `u₂`.
    pub fn state_at_origin(&self) -> SpinorState {
        let n = self.basis.layers();
        if n == 1 {
            return self.kernel.state.clone();
        }
        let mut s = SpinorState::zeros(self.basis.spec());
        let prod: f64 = self.t.iter().product();
        let sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        let factor = (theta_prime0() / (SQRT3 * omega())).powu(n as u32 - 1) * prod * sign;
        let idx = self.basis.index(2 * n - 1, DualIndex::new(0, 0)).expect("zero mode");
        s.coeffs_mut()[idx] = factor * self.kernel.zero_mode();
        s
    }
}
