//! Translations `ℒ_a`, the rotation `𝒞`, and their joint sectors on the space
//! of `3Λ`-periodic spinors.
//!
//! Plane waves have momenta `κ = ω(m + ωn)/√3` in the hexagon
//! `max(|m|, |n|, |m − n|) ≤ N₃`, which `κ ↦ ω̄κ` maps onto itself. A basis with
//! two blocks carries the `ℂ^{4n}` space of `H`; the lower block rotates with an
//! extra factor `ω̄`.

use crate::error::{MoireError, Result};
use crate::lattice::{c64, k_from_fractional, lattice_point, omega, omega_pow, pairing, LatticeIndex, C64, SQRT3};
use crate::linalg::{collinearity, dense_right_singular, norm, singular_values, CsrMatrix};
use faer::Mat;
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

/// Kernel threshold relative to `‖D‖₂`.
pub const KERNEL_TOL: f64 = 1e-6;
pub const DEFAULT_SYM_CUTOFF: usize = 9;

#[derive(Debug, Clone)]
pub struct SymmetryBasis {
    layers: usize,
    cutoff: usize,
    blocks: usize,
    modes: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
}

impl SymmetryBasis {
    /// `blocks = 1` for `D_n`, `2` for `H_n`.
    pub fn new(layers: usize, cutoff: usize, blocks: usize) -> Result<Self> {
        if layers == 0 {
            return Err(MoireError::InvalidLayers(layers));
        }
        if cutoff == 0 {
            return Err(MoireError::InvalidCutoff(cutoff));
        }
        if !(1..=2).contains(&blocks) {
            return Err(MoireError::InvalidArgument(format!("blocks must be 1 or 2, got {blocks}")));
        }
        let n = cutoff as i64;
        let modes: Vec<(i64, i64)> = (-n..=n)
            .flat_map(|m| (-n..=n).map(move |k| (m, k)))
            .filter(|&(m, k)| (m - k).abs() <= n)
            .collect();
        let index = modes.iter().enumerate().map(|(i, &d)| (d, i)).collect();
        Ok(Self { layers, cutoff, blocks, modes, index })
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn components(&self) -> usize {
        2 * self.layers * self.blocks
    }

    pub fn dim(&self) -> usize {
        self.components() * self.modes.len()
    }

    pub fn momentum_of(d: (i64, i64)) -> C64 {
        omega() * (c64(d.0 as f64, 0.0) + omega() * d.1 as f64) / SQRT3
    }

    pub fn index(&self, component: usize, d: (i64, i64)) -> Option<usize> {
        (component < self.components()).then_some(())?;
        self.index.get(&d).map(|&i| component * self.modes.len() + i)
    }

    pub fn entry(&self, flat: usize) -> (usize, (i64, i64)) {
        (flat / self.modes.len(), self.modes[flat % self.modes.len()])
    }

    fn depth(d: (i64, i64)) -> i64 {
        d.0.abs().max(d.1.abs()).max((d.0 - d.1).abs())
    }

    /// Constant state on component `c` (0-based).
    pub fn constant(&self, c: usize) -> Vec<C64> {
        let mut v = vec![c64(0.0, 0.0); self.dim()];
        v[self.index(c, (0, 0)).expect("component in range")] = c64(1.0, 0.0);
        v
    }

    /// `ω^{±1}·` on `(m, n)`: `ω̄κ` has indices `(n − m, −m)`.
    fn rotate_index(d: (i64, i64)) -> (i64, i64) {
        (d.1 - d.0, -d.0)
    }

    /// Phase picked up by component `c` under `𝒞`.
    fn rotation_phase(&self, c: usize) -> C64 {
        let per = 2 * self.layers;
        let (block, local) = (c / per, c % per);
        let l = (local / 2) as i64;
        let j = if local % 2 == 0 { omega_pow(-l) } else { omega_pow(l) };
        if block == 1 {
            j * omega_pow(-1)
        } else {
            j
        }
    }

    /// `ℒ_a` eigenvalue of the basis vector `flat`.
    fn translation_phase(&self, flat: usize, a: LatticeIndex) -> C64 {
        let (c, d) = self.entry(flat);
        let mut ph = C64::from_polar(1.0, pairing(a.point(), Self::momentum_of(d)));
        if c % 2 == 0 {
            ph *= omega_pow(a.a1 + a.a2);
        }
        ph
    }

    /// Translation character of a basis vector as `(c₁, c₂)` with
    /// `ℒ_a = ω^{c₁a₁ + c₂a₂}`.
    fn character(&self, flat: usize) -> (u8, u8) {
        let (c, d) = self.entry(flat);
        let extra = if c % 2 == 0 { 1 } else { 0 };
        let kap = Self::momentum_of(d);
        let c1 = phase_class(pairing(lattice_point(1, 0), kap)) + extra;
        let c2 = phase_class(pairing(lattice_point(0, 1), kap)) + extra;
        ((c1 % 3) as u8, (c2 % 3) as u8)
    }
}

/// `x/(2π/3)` rounded into `ℤ₃`.
fn phase_class(x: f64) -> i64 {
    ((x / (2.0 * PI / 3.0)).round() as i64).rem_euclid(3)
}

/// Translation character `a ↦ e^{i⟨a,𝐤⟩}` of `𝐤 = k_from_fractional(k₁, k₂)`.
fn momentum_character(k1: u8, k2: u8) -> (u8, u8) {
    let k = k_from_fractional(k1 as f64, k2 as f64);
    (
        phase_class(pairing(lattice_point(1, 0), k)) as u8,
        phase_class(pairing(lattice_point(0, 1), k)) as u8,
    )
}

/// `ℒ_a`: the translation phase `e^{i⟨a,κ⟩}` on every mode, times `ω^{a₁+a₂}`
/// on odd (1-based) components.
pub fn apply_translation(basis: &SymmetryBasis, state: &[C64], a: LatticeIndex) -> Vec<C64> {
    state.iter().enumerate().map(|(i, v)| v * basis.translation_phase(i, a)).collect()
}

/// `𝒞`: `κ ↦ ω̄κ` with the component phases `J = (1, 1, ω̄, ω, ω̄², ω², …)`.
pub fn apply_rotation(basis: &SymmetryBasis, state: &[C64]) -> Result<Vec<C64>> {
    let mut out = vec![c64(0.0, 0.0); state.len()];
    let mut dropped = 0;
    for (i, &v) in state.iter().enumerate() {
        if v == c64(0.0, 0.0) {
            continue;
        }
        let (c, d) = basis.entry(i);
        match basis.index(c, SymmetryBasis::rotate_index(d)) {
            Some(j) => out[j] = basis.rotation_phase(c) * v,
            None => dropped += 1,
        }
    }
    if dropped > 0 {
        return Err(MoireError::RotationLeavesBox { dropped });
    }
    Ok(out)
}

/// The 9 one-dimensional labels `(k, p)` and the two three-dimensional orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorLabel {
    OneDim { k: u8, p: u8 },
    Orbit(u8),
}

impl SectorLabel {
    pub fn all() -> Vec<SectorLabel> {
        let mut v: Vec<SectorLabel> = (0..3).flat_map(|k| (0..3).map(move |p| SectorLabel::OneDim { k, p })).collect();
        v.push(SectorLabel::Orbit(1));
        v.push(SectorLabel::Orbit(2));
        v
    }

    /// Translation characters covered by the label.
    fn characters(self) -> Vec<(u8, u8)> {
        match self {
            SectorLabel::OneDim { k, .. } => vec![momentum_character(k, k)],
            SectorLabel::Orbit(1) => [(1, 0), (0, 2), (2, 1)].iter().map(|&(a, b)| momentum_character(a, b)).collect(),
            SectorLabel::Orbit(_) => [(2, 0), (0, 1), (1, 2)].iter().map(|&(a, b)| momentum_character(a, b)).collect(),
        }
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorLabel::OneDim { k, p } => write!(f, "L2_{{{k},{p}}}"),
            SectorLabel::Orbit(1) => write!(f, "L2_(1,0)"),
            SectorLabel::Orbit(_) => write!(f, "L2_(2,0)"),
        }
    }
}

/// Group average over `ℤ₃² ⋊ ℤ₃` with the character of `label`.
pub fn sector_project(basis: &SymmetryBasis, state: &[C64], label: SectorLabel) -> Result<Vec<C64>> {
    let mut acc = vec![c64(0.0, 0.0); state.len()];
    match label {
        SectorLabel::OneDim { k, p } => {
            let kb = k_from_fractional(k as f64, k as f64);
            let mut rotated = state.to_vec();
            for l in 0..3 {
                let wl = omega_pow((l * p as i64) % 3);
                for a1 in 0..3 {
                    for a2 in 0..3 {
                        let a = LatticeIndex::new(a1, a2);
                        let w = C64::from_polar(1.0, -pairing(a.point(), kb)) * wl / 27.0;
                        for (o, v) in acc.iter_mut().zip(apply_translation(basis, &rotated, a)) {
                            *o += w * v;
                        }
                    }
                }
                rotated = apply_rotation(basis, &rotated)?;
            }
        }
        SectorLabel::Orbit(_) => {
            let chars = label.characters();
            for (i, v) in state.iter().enumerate() {
                if chars.contains(&basis.character(i)) {
                    acc[i] = *v;
                }
            }
        }
    }
    Ok(acc)
}

/// Orthonormal basis of a sector as sparse columns.
pub fn sector_basis(basis: &SymmetryBasis, label: SectorLabel) -> Vec<Vec<(usize, C64)>> {
    let chars = label.characters();
    let members: Vec<usize> = (0..basis.dim()).filter(|&i| chars.contains(&basis.character(i))).collect();
    let p = match label {
        SectorLabel::OneDim { p, .. } => p as i64,
        SectorLabel::Orbit(_) => return members.into_iter().map(|i| vec![(i, c64(1.0, 0.0))]).collect(),
    };
    let image = |i: usize| -> (usize, C64) {
        let (c, d) = basis.entry(i);
        (basis.index(c, SymmetryBasis::rotate_index(d)).expect("hexagon is rotation invariant"), basis.rotation_phase(c))
    };
    let mut seen = vec![false; basis.dim()];
    let mut cols = Vec::new();
    for i in members {
        if seen[i] {
            continue;
        }
        // v = Σ_ℓ ω^{ℓp} 𝒞^ℓ e_i
        let mut entries = vec![(i, c64(1.0, 0.0))];
        let (mut cur, mut coef) = (i, c64(1.0, 0.0));
        seen[i] = true;
        for l in 1..3 {
            let (j, ph) = image(cur);
            coef *= ph;
            cur = j;
            seen[j] = true;
            entries.push((j, coef * omega_pow((l * p) % 3)));
        }
        let mut merged: Vec<(usize, C64)> = Vec::new();
        for (j, v) in entries {
            match merged.iter_mut().find(|e| e.0 == j) {
                Some(e) => e.1 += v,
                None => merged.push((j, v)),
            }
        }
        merged.retain(|e| e.1.norm() > 1e-12);
        let nrm = merged.iter().map(|e| e.1.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            cols.push(merged.into_iter().map(|(j, v)| (j, v / nrm)).collect());
        }
    }
    cols
}

/// `D_n(α; t)` at `k = 0` on the `3Λ`-periodic basis (single block).
pub fn assemble_d3(basis: &SymmetryBasis, alpha: C64, t: &[f64]) -> Result<CsrMatrix> {
    let n = basis.layers();
    if t.len() + 1 != n {
        return Err(MoireError::TunnellingLength { expected: n - 1, got: t.len() });
    }
    let mc = basis.mode_count();
    let dim = 2 * n * mc;
    let mut trip = Vec::new();
    for c in 0..2 * n {
        for (i, &d) in basis.modes.iter().enumerate() {
            trip.push((c * mc + i, c * mc + i, SymmetryBasis::momentum_of(d)));
        }
    }
    // i ω^k in mode indices: (1, −1), (1, 2), (−2, −1).
    let shifts = [(1i64, -1i64), (1, 2), (-2, -1)];
    for (k, &(sm, sn)) in shifts.iter().enumerate() {
        let coef = alpha * omega_pow(k as i64);
        for (i, &(m, q)) in basis.modes.iter().enumerate() {
            if let Some(&j) = basis.index.get(&(m + sm, q + sn)) {
                trip.push((j, mc + i, coef));
            }
            if let Some(&j) = basis.index.get(&(m - sm, q - sn)) {
                trip.push((mc + j, i, coef));
            }
        }
    }
    for (j, &tj) in t.iter().enumerate() {
        for i in 0..mc {
            trip.push(((2 * j) * mc + i, (2 * j + 2) * mc + i, c64(tj, 0.0)));
            trip.push(((2 * j + 3) * mc + i, (2 * j + 1) * mc + i, c64(tj, 0.0)));
        }
    }
    Ok(CsrMatrix::from_triplets(dim, dim, trip))
}

/// `H = [[0, D*], [D, 0]]` on a two-block basis.
pub fn assemble_h3(basis: &SymmetryBasis, alpha: C64, t: &[f64]) -> Result<CsrMatrix> {
    if basis.blocks() != 2 {
        return Err(MoireError::InvalidArgument("H needs a two-block basis".into()));
    }
    let half = SymmetryBasis::new(basis.layers(), basis.cutoff(), 1)?;
    let d = assemble_d3(&half, alpha, t)?;
    let h = half.dim();
    let mut trip: Vec<(usize, usize, C64)> = d.triplets().map(|(i, j, v)| (h + i, j, v)).collect();
    trip.extend(d.triplets().map(|(i, j, v)| (j, h + i, v.conj())));
    Ok(CsrMatrix::from_triplets(2 * h, 2 * h, trip))
}

/// `‖A‖₂` by power iteration on `AᴴA`.
fn spectral_norm(a: &CsrMatrix) -> f64 {
    let mut x: Vec<C64> = (0..a.ncols()).map(|i| c64(1.0 + (i % 7) as f64, (i % 5) as f64)).collect();
    let mut est = 0.0;
    for _ in 0..60 {
        let nx = norm(&x);
        x.iter_mut().for_each(|z| *z /= nx);
        let y = a.mul_vec(&x);
        est = norm(&y);
        x = a.mul_vec_adjoint(&y);
    }
    est
}

fn restrict(a: &CsrMatrix, cols: &[Vec<(usize, C64)>]) -> Mat<C64> {
    let mut out = Mat::<C64>::zeros(a.nrows(), cols.len());
    let at = a.adjoint();
    // column j of A·Q = Σ_i q_i · A[:, i]; A[:, i] is row i of Aᴴ conjugated.
    for (j, col) in cols.iter().enumerate() {
        for &(i, q) in col {
            for (r, v) in at.row(i) {
                out[(r, j)] += v.conj() * q;
            }
        }
    }
    out
}

fn kernel_dim(a: &CsrMatrix, cols: &[Vec<(usize, C64)>], scale: f64) -> Result<usize> {
    if cols.is_empty() {
        return Ok(0);
    }
    let m = restrict(a, cols);
    let s = singular_values(m.as_ref())?;
    Ok(s.iter().filter(|&&x| x < KERNEL_TOL * scale).count())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorKernel {
    pub label: SectorLabel,
    pub dim: usize,
    pub d_kernel: usize,
    pub h_kernel: usize,
}

/// Kernel dimensions of `D` and `H` restricted to every sector.
pub fn sector_kernels(layers: usize, cutoff: usize, alpha: C64, t: &[f64]) -> Result<Vec<SectorKernel>> {
    let b1 = SymmetryBasis::new(layers, cutoff, 1)?;
    let b2 = SymmetryBasis::new(layers, cutoff, 2)?;
    let d = assemble_d3(&b1, alpha, t)?;
    let h = assemble_h3(&b2, alpha, t)?;
    let scale = spectral_norm(&d);
    SectorLabel::all()
        .into_par_iter()
        .map(|label| {
            let q1 = sector_basis(&b1, label);
            let q2 = sector_basis(&b2, label);
            Ok(SectorKernel {
                label,
                dim: q1.len(),
                d_kernel: kernel_dim(&d, &q1, scale)?,
                h_kernel: kernel_dim(&h, &q2, scale)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtectedCheck {
    pub alpha: C64,
    pub t: Vec<f64>,
    pub sectors: Vec<SectorKernel>,
    /// Kernel of `D` on `L²_{1,0}` is nontrivial.
    pub first_sector_ok: bool,
    /// Kernel of `D` on `L²_{0,[1−n]}` is spanned by `e_{2n}`.
    pub last_sector_ok: bool,
    pub last_collinearity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtectedReport {
    pub layers: usize,
    pub cutoff: usize,
    pub checks: Vec<ProtectedCheck>,
}

impl ProtectedReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.first_sector_ok && c.last_sector_ok)
    }
}

/// For every `(α, t)`: sector kernels, `ker_{L²_{1,0}} D ≠ 0`, and
/// `ker_{L²_{0,[1−n]}} D = ℂ e_{2n}`.
pub fn verify_protected(layers: usize, cutoff: usize, alphas: &[C64], ts: &[Vec<f64>]) -> Result<ProtectedReport> {
    let b1 = SymmetryBasis::new(layers, cutoff, 1)?;
    let last = SectorLabel::OneDim { k: 0, p: ((1 - layers as i64).rem_euclid(3)) as u8 };
    let e2n = b1.constant(2 * layers - 1);
    let mut checks = Vec::new();
    for &alpha in alphas {
        for t in ts {
            let sectors = sector_kernels(layers, cutoff, alpha, t)?;
            let get = |l: SectorLabel| sectors.iter().find(|s| s.label == l).expect("label").clone();
            let first_sector_ok = get(SectorLabel::OneDim { k: 1, p: 0 }).d_kernel >= 1;
            let d = assemble_d3(&b1, alpha, t)?;
            let q = sector_basis(&b1, last);
            let (s, v) = dense_right_singular(restrict(&d, &q).as_ref())?;
            let mut x = vec![c64(0.0, 0.0); b1.dim()];
            let j = 0;
            debug_assert!(!s.is_empty());
            for (col, qc) in q.iter().enumerate() {
                for &(i, val) in qc {
                    x[i] += val * v[(col, j)];
                }
            }
            let last_collinearity = collinearity(&x, &e2n);
            let last_sector_ok = get(last).d_kernel == 1 && last_collinearity > 1.0 - 1e-8;
            checks.push(ProtectedCheck { alpha, t: t.clone(), sectors, first_sector_ok, last_sector_ok, last_collinearity });
        }
    }
    Ok(ProtectedReport { layers, cutoff, checks })
}

/// `max |(M·X − Y·M) e_j|` over basis vectors `e_j` at least two shells inside
/// the box, where `X` acts on the domain and `Y` on the range.
pub fn interior_commutator(
    basis: &SymmetryBasis,
    m: &CsrMatrix,
    domain: impl Fn(&[C64]) -> Result<Vec<C64>>,
    range: impl Fn(&[C64]) -> Result<Vec<C64>>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..basis.dim() {
        let (_, d) = basis.entry(j);
        if SymmetryBasis::depth(d) + 2 > basis.cutoff() as i64 {
            continue;
        }
        let mut e = vec![c64(0.0, 0.0); basis.dim()];
        e[j] = c64(1.0, 0.0);
        let lhs = m.mul_vec(&domain(&e)?);
        let rhs = range(&m.mul_vec(&e))?;
        for (a, b) in lhs.iter().zip(&rhs) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(dim: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..dim).map(|_| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    fn dist(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn shift_table_matches_momenta() {
        for (k, d) in [(1i64, -1i64), (1, 2), (-2, -1)].iter().enumerate() {
            let want = c64(0.0, 1.0) * omega_pow(k as i64);
            assert!((SymmetryBasis::momentum_of(*d) - want).norm() < 1e-14);
        }
        let d = (3, -2);
        let rot = SymmetryBasis::momentum_of(SymmetryBasis::rotate_index(d));
        assert!((rot - omega_pow(-1) * SymmetryBasis::momentum_of(d)).norm() < 1e-13);
    }

    #[test]
    fn group_laws() {
        let b = SymmetryBasis::new(2, 4, 2).unwrap();
        let x = random_state(b.dim(), 1);
        let id = apply_translation(&b, &x, LatticeIndex::new(0, 0));
        assert!(dist(&id, &x) < 1e-14);
        let (a, c) = (LatticeIndex::new(1, 2), LatticeIndex::new(-2, 1));
        let lhs = apply_translation(&b, &apply_translation(&b, &x, c), a);
        let rhs = apply_translation(&b, &x, a + c);
        assert!(dist(&lhs, &rhs) < 1e-12);
        let r3 = apply_rotation(&b, &apply_rotation(&b, &apply_rotation(&b, &x).unwrap()).unwrap()).unwrap();
        assert!(dist(&r3, &x) < 1e-12);
        assert!((norm(&apply_rotation(&b, &x).unwrap()) - norm(&x)).abs() < 1e-12);
        assert!((norm(&apply_translation(&b, &x, a)) - norm(&x)).abs() < 1e-12);
        let e1 = b.constant(0);
        assert!(dist(&apply_rotation(&b, &e1).unwrap(), &e1) < 1e-15);
    }

    #[test]
    fn commutation_with_operators() {
        let alpha = c64(0.586, 0.0);
        let b1 = SymmetryBasis::new(2, 5, 1).unwrap();
        let d = assemble_d3(&b1, alpha, &[0.7]).unwrap();
        let a = LatticeIndex::new(1, 0);
        let tr = |x: &[C64]| Ok(apply_translation(&b1, x, a));
        assert!(interior_commutator(&b1, &d, tr, tr).unwrap() < 1e-12);

        let b2 = SymmetryBasis::new(2, 5, 2).unwrap();
        let h = assemble_h3(&b2, alpha, &[0.7]).unwrap();
        let rot = |x: &[C64]| apply_rotation(&b2, x);
        assert!(interior_commutator(&b2, &h, rot, rot).unwrap() < 1e-10);
        let tr2 = |x: &[C64]| Ok(apply_translation(&b2, x, LatticeIndex::new(0, 1)));
        assert!(interior_commutator(&b2, &h, tr2, tr2).unwrap() < 1e-12);
    }

    #[test]
    fn projectors_resolve_identity() {
        let b = SymmetryBasis::new(2, 3, 1).unwrap();
        let x = random_state(b.dim(), 5);
        let mut sum = vec![c64(0.0, 0.0); b.dim()];
        for label in SectorLabel::all() {
            let p = sector_project(&b, &x, label).unwrap();
            let pp = sector_project(&b, &p, label).unwrap();
            assert!(dist(&p, &pp) < 1e-12, "{label}");
            sum.iter_mut().zip(&p).for_each(|(s, v)| *s += v);
        }
        assert!(dist(&sum, &x) < 1e-12);
    }

    #[test]
    fn constant_states_sit_in_expected_sectors() {
        let b = SymmetryBasis::new(2, 3, 1).unwrap();
        let e1 = b.constant(0);
        let p = sector_project(&b, &e1, SectorLabel::OneDim { k: 1, p: 0 }).unwrap();
        assert!(dist(&p, &e1) < 1e-12);
        let e4 = b.constant(3);
        let p = sector_project(&b, &e4, SectorLabel::OneDim { k: 0, p: 2 }).unwrap();
        assert!(dist(&p, &e4) < 1e-12);
    }

    #[test]
    fn sector_bases_are_orthonormal_and_complete() {
        let b = SymmetryBasis::new(1, 3, 2).unwrap();
        let mut total = 0;
        for label in SectorLabel::all() {
            let q = sector_basis(&b, label);
            total += q.len();
            for col in &q {
                let mut v = vec![c64(0.0, 0.0); b.dim()];
                col.iter().for_each(|&(i, z)| v[i] = z);
                assert!((norm(&v) - 1.0).abs() < 1e-12);
                let p = sector_project(&b, &v, label).unwrap();
                assert!(dist(&p, &v) < 1e-12, "{label}");
            }
        }
        assert_eq!(total, b.dim());
    }
}
