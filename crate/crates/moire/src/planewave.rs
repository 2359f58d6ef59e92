//! Truncated Floquet plane-wave basis and operator assembly.
//!
//! Component `c` (0-based) of a `2n`-spinor is expanded in
//! `e^{i⟨z, p + q_c⟩}/√|ℂ/Λ|` with `p = √3ω(m + ωn)`, `|m|,|n| ≤ N`. The
//! offset is `q_c = i` for even `c` and `0` for odd `c`, which makes every
//! basis function invariant under the twisted translations. With this
//! normalisation the Euclidean coefficient norm is the `L²(ℂ/Λ)` norm; the
//! `L²(ℂ/3Λ)` norm is three times larger.
//!
//! Flat index: `c·(2N+1)² + (m+N)(2N+1) + (n+N)`.

use crate::error::{MoireError, Result};
use crate::lattice::{c64, omega_pow, DualIndex, C64};
use crate::linalg::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    pub layers: usize,
    pub cutoff: usize,
}

impl BasisSpec {
    pub const fn new(layers: usize, cutoff: usize) -> Self {
        Self { layers, cutoff }
    }

    pub fn components(&self) -> usize {
        2 * self.layers
    }

    pub fn mode_count(&self) -> usize {
        (2 * self.cutoff + 1).pow(2)
    }

    pub fn dim(&self) -> usize {
        self.components() * self.mode_count()
    }
}

/// Frequency shifts `iω^k − i` of the `U(z)` coupling as dual indices.
pub const U_SHIFTS: [DualIndex; 3] = [DualIndex::new(0, 0), DualIndex::new(0, 1), DualIndex::new(-1, 0)];

#[derive(Debug, Clone)]
pub struct PlaneWaveBasis {
    spec: BasisSpec,
    modes: Vec<DualIndex>,
    momenta: Vec<C64>,
}

impl PlaneWaveBasis {
    pub fn new(spec: BasisSpec) -> Result<Self> {
        if spec.layers < 1 {
            return Err(MoireError::InvalidLayers(spec.layers));
        }
        if spec.cutoff < 1 {
            return Err(MoireError::InvalidCutoff(spec.cutoff));
        }
        let n = spec.cutoff as i64;
        let modes: Vec<DualIndex> = (-n..=n).flat_map(|m| (-n..=n).map(move |k| DualIndex::new(m, k))).collect();
        let momenta = modes.iter().map(|d| d.point()).collect();
        Ok(Self { spec, modes, momenta })
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn layers(&self) -> usize {
        self.spec.layers
    }

    pub fn cutoff(&self) -> usize {
        self.spec.cutoff
    }

    pub fn components(&self) -> usize {
        self.spec.components()
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn modes(&self) -> &[DualIndex] {
        &self.modes
    }

    /// Lattice momentum `p` of mode `i` (without offset).
    pub fn mode_momentum(&self, i: usize) -> C64 {
        self.momenta[i]
    }

    pub fn mode_index(&self, d: DualIndex) -> Option<usize> {
        let n = self.spec.cutoff as i64;
        if d.m.abs() > n || d.n.abs() > n {
            return None;
        }
        let w = 2 * n + 1;
        Some(((d.m + n) * w + (d.n + n)) as usize)
    }

    pub fn index(&self, component: usize, d: DualIndex) -> Option<usize> {
        if component >= self.components() {
            return None;
        }
        self.mode_index(d).map(|i| component * self.mode_count() + i)
    }

    /// Inverse of [`Self::index`].
    pub fn entry(&self, flat: usize) -> (usize, DualIndex) {
        let m = self.mode_count();
        (flat / m, self.modes[flat % m])
    }

    /// Momentum offset `q_c`.
    pub fn offset(&self, component: usize) -> C64 {
        if component.is_multiple_of(2) {
            c64(0.0, 1.0)
        } else {
            c64(0.0, 0.0)
        }
    }

    /// Full momentum `p + q_c` of a flat index.
    pub fn momentum(&self, flat: usize) -> C64 {
        let m = self.mode_count();
        self.momenta[flat % m] + self.offset(flat / m)
    }

    /// Mode-major ordering with components interleaved; narrows the band of
    /// every assembled operator.
    pub fn solver_order(&self) -> Vec<usize> {
        let (mc, cc) = (self.mode_count(), self.components());
        (0..mc).flat_map(|i| (0..cc).map(move |c| c * mc + i)).collect()
    }

    /// The single-layer basis with the same cutoff.
    pub fn layer_one(&self) -> Self {
        Self {
            spec: BasisSpec::new(1, self.spec.cutoff),
            modes: self.modes.clone(),
            momenta: self.momenta.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMeta {
    pub alpha: C64,
    pub t: Vec<f64>,
    pub k: C64,
    pub spec: BasisSpec,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: CsrMatrix,
    pub meta: OperatorMeta,
}

fn check_t(basis: &PlaneWaveBasis, t: &[f64]) -> Result<()> {
    let expected = basis.layers() - 1;
    if t.len() != expected {
        return Err(MoireError::TunnellingLength { expected, got: t.len() });
    }
    if let Some(bad) = t.iter().find(|x| !x.is_finite()) {
        return Err(MoireError::InvalidArgument(format!("non-finite tunnelling parameter {bad}")));
    }
    Ok(())
}

fn coupling_triplets(basis: &PlaneWaveBasis, alpha: C64, out: &mut Vec<(usize, usize, C64)>) {
    for (i, &p) in basis.modes().iter().enumerate() {
        for (k, &s) in U_SHIFTS.iter().enumerate() {
            let coef = alpha * omega_pow(k as i64);
            // U(z): component 0 ← component 1, frequency p ↦ p + s.
            if let Some(row) = basis.index(0, p + s) {
                out.push((row, basis.mode_count() + i, coef));
            }
            // U(−z): component 1 ← component 0, frequency p ↦ p − s.
            if let Some(row) = basis.index(1, p - s) {
                out.push((row, i, coef));
            }
        }
    }
}

/// `D_n(α; t) + k` on the truncated basis.
pub fn assemble_dn(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], k: C64) -> Result<OperatorMatrix> {
    check_t(basis, t)?;
    let (dim, mc) = (basis.dim(), basis.mode_count());
    let mut trip = Vec::with_capacity(dim * 3 + 6 * mc);
    for flat in 0..dim {
        trip.push((flat, flat, basis.momentum(flat) + k));
    }
    coupling_triplets(basis, alpha, &mut trip);
    for (j, &tj) in t.iter().enumerate() {
        for i in 0..mc {
            trip.push(((2 * j) * mc + i, (2 * j + 2) * mc + i, c64(tj, 0.0)));
            trip.push(((2 * j + 3) * mc + i, (2 * j + 1) * mc + i, c64(tj, 0.0)));
        }
    }
    Ok(OperatorMatrix {
        matrix: CsrMatrix::from_triplets(dim, dim, trip),
        meta: OperatorMeta { alpha, t: t.to_vec(), k, spec: basis.spec() },
    })
}

/// Coefficient of α: `D_n(α) = D_n(0) + αB`.
pub fn assemble_b(basis: &PlaneWaveBasis) -> OperatorMatrix {
    let dim = basis.dim();
    let mut trip = Vec::with_capacity(6 * basis.mode_count());
    coupling_triplets(basis, c64(1.0, 0.0), &mut trip);
    OperatorMatrix {
        matrix: CsrMatrix::from_triplets(dim, dim, trip),
        meta: OperatorMeta {
            alpha: c64(1.0, 0.0),
            t: vec![0.0; basis.layers() - 1],
            k: c64(0.0, 0.0),
            spec: basis.spec(),
        },
    }
}

/// The Hermitian Bloch operator `[[0, D†], [D, 0]]` with `D = D_n(α;t) + k`.
pub fn assemble_hnk(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], k: C64) -> Result<OperatorMatrix> {
    let d = assemble_dn(basis, alpha, t, k)?;
    let dim = basis.dim();
    let trip = d
        .matrix
        .triplets()
        .flat_map(|(i, j, v)| [(dim + i, j, v), (j, dim + i, v.conj())])
        .collect();
    Ok(OperatorMatrix {
        matrix: CsrMatrix::from_triplets(2 * dim, 2 * dim, trip),
        meta: d.meta,
    })
}

/// Coefficient vector of a `2n`-spinor in a [`PlaneWaveBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    spec: BasisSpec,
    coeffs: Vec<C64>,
}

impl SpinorState {
    pub fn zeros(spec: BasisSpec) -> Self {
        Self { spec, coeffs: vec![c64(0.0, 0.0); spec.dim()] }
    }

    pub fn from_coeffs(spec: BasisSpec, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != spec.dim() {
            return Err(MoireError::DimensionMismatch { expected: spec.dim(), got: coeffs.len() });
        }
        Ok(Self { spec, coeffs })
    }

    /// The unit vector on `(component, mode)`.
    pub fn basis_vector(basis: &PlaneWaveBasis, component: usize, mode: DualIndex) -> Option<Self> {
        let idx = basis.index(component, mode)?;
        let mut s = Self::zeros(basis.spec());
        s.coeffs[idx] = c64(1.0, 0.0);
        Some(s)
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[C64] {
        let m = self.spec.mode_count();
        &self.coeffs[c * m..(c + 1) * m]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [C64] {
        let m = self.spec.mode_count();
        &mut self.coeffs[c * m..(c + 1) * m]
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.coeffs)
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        crate::linalg::inner(&self.coeffs, &other.coeffs)
    }

    pub fn scale(&mut self, s: C64) {
        self.coeffs.iter_mut().for_each(|z| *z *= s);
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.scale(c64(1.0 / n, 0.0));
        }
        self
    }

    /// Multiplication by `e^{−i⟨z,d⟩}`: coefficient of mode `q` moves to `q − d`.
    /// Modes pushed out of the box are dropped.
    pub fn shift_momentum(&self, basis: &PlaneWaveBasis, d: DualIndex) -> Self {
        let mut out = Self::zeros(self.spec);
        for (flat, &v) in self.coeffs.iter().enumerate() {
            if v == c64(0.0, 0.0) {
                continue;
            }
            let (c, mode) = basis.entry(flat);
            if let Some(j) = basis.index(c, mode - d) {
                out.coeffs[j] = v;
            }
        }
        out
    }
}

/// Divides each coefficient by `(p + q_c + k)^power`.
pub fn apply_resolvent_d0(basis: &PlaneWaveBasis, state: &SpinorState, k: C64, power: u32) -> Result<SpinorState> {
    if state.spec() != basis.spec() {
        return Err(MoireError::DimensionMismatch { expected: basis.dim(), got: state.coeffs().len() });
    }
    if power == 0 {
        return Err(MoireError::InvalidArgument("resolvent power must be at least 1".into()));
    }
    let mut out = state.clone();
    for (flat, v) in out.coeffs.iter_mut().enumerate() {
        if *v == c64(0.0, 0.0) {
            continue;
        }
        let sym = basis.momentum(flat) + k;
        if sym.norm() < 1e-12 {
            return Err(MoireError::SingularResolvent { component: basis.entry(flat).0, modulus: sym.norm() });
        }
        *v /= sym.powu(power);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{singular_values, smallest_singular};
    use approx::assert_abs_diff_eq;

    fn basis(n: usize, cutoff: usize) -> PlaneWaveBasis {
        PlaneWaveBasis::new(BasisSpec::new(n, cutoff)).unwrap()
    }

    #[test]
    fn sizes_and_offsets() {
        let b = basis(1, 1);
        assert_eq!(b.dim(), 18);
        assert_eq!(b.offset(0), c64(0.0, 1.0));
        assert_eq!(b.offset(1), c64(0.0, 0.0));
        assert!(PlaneWaveBasis::new(BasisSpec::new(0, 3)).is_err());
    }

    #[test]
    fn index_round_trip() {
        let b = basis(2, 3);
        for flat in 0..b.dim() {
            let (c, d) = b.entry(flat);
            assert_eq!(b.index(c, d), Some(flat));
        }
        assert_eq!(b.index(0, DualIndex::new(4, 0)), None);
    }

    #[test]
    fn shifts_are_the_u_frequencies() {
        for (k, s) in U_SHIFTS.iter().enumerate() {
            let f = c64(0.0, 1.0) * omega_pow(k as i64) - c64(0.0, 1.0);
            assert_abs_diff_eq!((s.point() - f).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn free_operator_is_diagonal() {
        let b = basis(1, 3);
        let d = assemble_dn(&b, c64(0.0, 0.0), &[], c64(0.0, 0.0)).unwrap();
        assert!(d.matrix.triplets().all(|(i, j, _)| i == j));
        let s = singular_values(d.matrix.to_dense().as_ref()).unwrap();
        assert!(s[0] < 1e-14);
    }

    #[test]
    fn row_sparsity() {
        let b = basis(3, 4);
        let d = assemble_dn(&b, c64(0.6, 0.0), &[1.0, 0.5], c64(0.1, 0.2)).unwrap();
        assert!((0..b.dim()).all(|i| d.matrix.row_nnz(i) <= 5));
    }

    #[test]
    fn protected_constant_state() {
        let b = basis(2, 4);
        let d = assemble_dn(&b, c64(0.0, 0.0), &[1.0], c64(0.0, 0.0)).unwrap();
        let e = SpinorState::basis_vector(&b, 3, DualIndex::new(0, 0)).unwrap();
        let r = d.matrix.mul_vec(e.coeffs());
        assert!(crate::linalg::norm(&r) < 1e-15);
    }

    #[test]
    fn linearity_in_alpha() {
        let b = basis(2, 3);
        let (t, k, a) = ([0.7], c64(0.2, -0.1), c64(0.7, 0.2));
        let d1 = assemble_dn(&b, a, &t, k).unwrap().matrix;
        let d0 = assemble_dn(&b, c64(0.0, 0.0), &t, k).unwrap().matrix;
        let bm = assemble_b(&b).matrix;
        assert!(d1.max_abs_diff(&d0.add_scaled(a, &bm)) < 1e-15);
    }

    #[test]
    fn b_structure() {
        let b = basis(2, 4);
        let bm = assemble_b(&b).matrix;
        let mc = b.mode_count();
        for flat in 0..b.dim() {
            let (c, d) = b.entry(flat);
            let nnz = bm.row_nnz(flat);
            if c >= 2 {
                assert_eq!(nnz, 0);
            } else if d.m.abs() < 4 && d.n.abs() < 4 {
                assert_eq!(nnz, 3, "interior row {flat}");
            }
        }
        assert!(bm.triplets().all(|(_, j, _)| j < 2 * mc));
    }

    #[test]
    fn hermitian_bloch_operator() {
        let b = basis(2, 3);
        let h = assemble_hnk(&b, c64(0.586, 0.0), &[1.0], c64(0.3, 0.1)).unwrap().matrix;
        assert!(h.max_abs_diff(&h.adjoint()) == 0.0);
    }

    #[test]
    fn resolvent_round_trip_and_error() {
        let b = basis(2, 3);
        let k = c64(0.23, -0.41);
        let mut s = SpinorState::zeros(b.spec());
        for (i, v) in s.coeffs_mut().iter_mut().enumerate() {
            *v = c64((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos());
        }
        let r = apply_resolvent_d0(&b, &s, k, 1).unwrap();
        for flat in 0..b.dim() {
            let back = r.coeffs()[flat] * (b.momentum(flat) + k);
            assert_abs_diff_eq!((back - s.coeffs()[flat]).norm(), 0.0, epsilon = 1e-13);
        }
        let e = SpinorState::basis_vector(&b, 1, DualIndex::new(0, 0)).unwrap();
        assert!(matches!(
            apply_resolvent_d0(&b, &e, c64(0.0, 0.0), 1),
            Err(MoireError::SingularResolvent { .. })
        ));
    }

    #[test]
    fn banded_solver_agrees_with_dense() {
        let b = basis(2, 4);
        let d = assemble_dn(&b, c64(0.586, 0.0), &[1.0], c64(0.17, -0.21)).unwrap().matrix;
        let sv = smallest_singular(&d, &b.solver_order(), 3).unwrap();
        let dense = singular_values(d.to_dense().as_ref()).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(sv.values[j], dense[j], epsilon = 1e-11);
        }
    }
}
