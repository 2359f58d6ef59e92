//! Sparse operators, a banded LU with partial pivoting, and block inverse
//! iteration for the smallest singular triplets. Dense work goes through faer.

use crate::error::{MoireError, Result};
use crate::lattice::C64;
use faer::{Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Builds the matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        triplets.retain(|&(_, _, v)| v != C64::new(0.0, 0.0));
        for (i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i},{j}) out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzeros of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i).find(|&(c, _)| c == j).map_or(C64::new(0.0, 0.0), |(_, v)| v)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `A^H x`.
    pub fn mul_vec_adjoint(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![C64::new(0.0, 0.0); self.ncols];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                y[j] += v.conj() * x[i];
            }
        }
        y
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    /// `AᴴA`.
    pub fn gram(&self) -> Self {
        let mut trip = Vec::new();
        for r in 0..self.nrows() {
            let row: Vec<(usize, C64)> = self.row(r).collect();
            for &(i, a) in &row {
                for &(j, b) in &row {
                    trip.push((i, j, a.conj() * b));
                }
            }
        }
        Self::from_triplets(self.ncols(), self.ncols(), trip)
    }

    pub fn adjoint(&self) -> Self {
        let t = self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, t)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: C64, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let t = self.triplets().chain(other.triplets().map(|(i, j, v)| (i, j, s * v))).collect();
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.add_scaled(C64::new(-1.0, 0.0), other)
            .values
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Upper bound on the spectral norm, `sqrt(‖A‖₁‖A‖_∞)`.
    pub fn norm_bound(&self) -> f64 {
        let mut col = vec![0.0; self.ncols];
        let mut row_max: f64 = 0.0;
        for i in 0..self.nrows {
            let mut s = 0.0;
            for (j, v) in self.row(i) {
                s += v.norm();
                col[j] += v.norm();
            }
            row_max = row_max.max(s);
        }
        let col_max = col.iter().fold(0.0f64, |m, &c| m.max(c));
        (row_max * col_max).sqrt()
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }
}

/// LU factorisation `PA = LU` of a banded matrix after a symmetric reordering.
///
/// Storage follows the LAPACK `gbtrf` layout: column-major with leading
/// dimension `2kl + ku + 1`. Exactly zero pivots are replaced by
/// `ε‖A‖`, which keeps inverse iteration well defined on singular input.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    kv: usize,
    ldab: usize,
    ab: Vec<C64>,
    ipiv: Vec<usize>,
    inv_order: Vec<usize>,
    replaced_pivots: usize,
    min_pivot: f64,
}

impl BandLu {
    /// Factor `A` reordered so that position `r` holds original index `order[r]`.
    pub fn factor(a: &CsrMatrix, order: &[usize]) -> Self {
        Self::factor_shifted(a, order, C64::new(0.0, 0.0))
    }

    /// Factor `A + σI`.
    pub fn factor_shifted(a: &CsrMatrix, order: &[usize], shift: C64) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "band LU needs a square matrix");
        assert_eq!(order.len(), n);
        let mut inv_order = vec![usize::MAX; n];
        for (r, &o) in order.iter().enumerate() {
            inv_order[o] = r;
        }
        assert!(inv_order.iter().all(|&r| r != usize::MAX), "order must be a permutation");

        let (mut kl, mut ku) = (0usize, 0usize);
        for (i, j, _) in a.triplets() {
            let (pi, pj) = (inv_order[i], inv_order[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
        let kv = kl + ku;
        let ldab = 2 * kl + ku + 1;
        let mut ab = vec![C64::new(0.0, 0.0); ldab * n];
        for (i, j, v) in a.triplets() {
            let (pi, pj) = (inv_order[i], inv_order[j]);
            ab[pj * ldab + kv + pi - pj] += v;
        }
        if shift != C64::new(0.0, 0.0) {
            for j in 0..n {
                ab[j * ldab + kv] += shift;
            }
        }
        let anorm = a.max_abs().max(f64::MIN_POSITIVE);
        let mut lu = Self { n, kl, kv, ldab, ab, ipiv: vec![0; n], inv_order, replaced_pivots: 0, min_pivot: f64::INFINITY };
        lu.factor_in_place(anorm);
        lu
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kv + i - j
    }

    fn factor_in_place(&mut self, anorm: f64) {
        let (n, kl, kv) = (self.n, self.kl, self.kv);
        let ku = kv - kl;
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let base = self.at(j, j);
            let mut jp = 0;
            let mut best = -1.0;
            for r in 0..=km {
                let m = self.ab[base + r].norm();
                if m > best {
                    best = m;
                    jp = r;
                }
            }
            if best < 1e-300 {
                self.ab[base] = C64::new(f64::EPSILON * anorm, 0.0);
                self.replaced_pivots += 1;
                jp = 0;
            }
            self.min_pivot = self.min_pivot.min(best);
            self.ipiv[j] = j + jp;
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let (x, y) = (self.at(j, c), self.at(j + jp, c));
                    self.ab.swap(x, y);
                }
            }
            let inv = self.ab[base].inv();
            for r in 1..=km {
                self.ab[base + r] *= inv;
            }
            for c in j + 1..=ju {
                let f = self.ab[self.at(j, c)];
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                let col = self.at(j, c);
                for r in 1..=km {
                    let l = self.ab[base + r];
                    self.ab[col + r] -= l * f;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of exactly-zero pivots that were regularised.
    pub fn replaced_pivots(&self) -> usize {
        self.replaced_pivots
    }

    /// Smallest pivot modulus before regularisation.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    fn permute_in(&self, b: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.n];
        for (i, &v) in b.iter().enumerate() {
            out[self.inv_order[i]] = v;
        }
        out
    }

    fn permute_out(&self, x: &[C64], b: &mut [C64]) {
        for (i, v) in b.iter_mut().enumerate() {
            *v = x[self.inv_order[i]];
        }
    }

    /// Overwrites `b` with `A⁻¹b`.
    pub fn solve(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, kv) = (self.n, self.kl, self.kv);
        let mut x = self.permute_in(b);
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap(j, p);
            }
            let xj = x[j];
            let km = kl.min(n - 1 - j);
            let base = self.at(j, j);
            for r in 1..=km {
                x[j + r] -= self.ab[base + r] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.ab[self.at(j, j)];
            let xj = x[j];
            let col = j * self.ldab + kv - j;
            for i in j.saturating_sub(kv)..j {
                x[i] -= self.ab[col + i] * xj;
            }
        }
        self.permute_out(&x, b);
    }

    /// Overwrites `b` with `A⁻ᴴb`.
    pub fn solve_adjoint(&self, b: &mut [C64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, kv) = (self.n, self.kl, self.kv);
        let mut x = self.permute_in(b);
        for j in 0..n {
            let col = j * self.ldab + kv - j;
            let mut s = x[j];
            for i in j.saturating_sub(kv)..j {
                s -= self.ab[col + i].conj() * x[i];
            }
            x[j] = s / self.ab[self.at(j, j)].conj();
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let km = kl.min(n - 1 - j);
            let base = self.at(j, j);
            let mut s = x[j];
            for r in 1..=km {
                s -= self.ab[base + r].conj() * x[j + r];
            }
            x[j] = s;
            let p = self.ipiv[j];
            if p != j {
                x.swap(j, p);
            }
        }
        self.permute_out(&x, b);
    }
}

/// Smallest singular values (ascending) with their right singular vectors.
#[derive(Debug, Clone)]
pub struct SingularTriplets {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    pub iterations: usize,
}

const MAX_INVERSE_ITERATIONS: usize = 200;
const FAST_ITERATIONS: usize = 30;
/// `η² / max|A|²` for the fallback on the normal equations.
const GRAM_SHIFT: f64 = 1e-6;

/// Block inverse iteration on `(AᴴA)⁻¹` with Rayleigh–Ritz extraction.
///
/// `order` is the bandwidth-reducing permutation handed to [`BandLu`]. The
/// singular values are read off the thin SVD of `A·X`, so small values keep
/// absolute accuracy near `ε‖A‖`.
///
/// When `σ₁/σ₂` is near machine precision the solves with `A` drown every
/// direction but the first in rounding error. In that case (detected by an
/// exactly zero pivot or by stalling) the iteration is rerun on
/// `AᴴA + η²`, which has the same singular vectors and a bounded inverse.
pub fn smallest_singular(a: &CsrMatrix, order: &[usize], count: usize) -> Result<SingularTriplets> {
    let n = a.ncols();
    if count == 0 || count > n {
        return Err(MoireError::InvalidArgument(format!("cannot extract {count} singular values from dimension {n}")));
    }
    let lu = BandLu::factor(a, order);
    if lu.replaced_pivots() == 0 {
        let apply = |x: &mut Mat<C64>| {
            // Re-orthonormalising between the two solves keeps a near-null
            // direction from swamping the rest of the block.
            for c in 0..x.ncols() {
                lu.solve_adjoint(x.col_as_slice_mut(c));
            }
            orthonormalize(x);
            for c in 0..x.ncols() {
                lu.solve(x.col_as_slice_mut(c));
            }
        };
        let t = block_iteration(a, count, FAST_ITERATIONS, apply)?;
        if t.iterations < FAST_ITERATIONS {
            return Ok(t);
        }
    }
    let scale = a.max_abs();
    let gram = a.gram().add_scaled(C64::new(GRAM_SHIFT * scale * scale, 0.0), &CsrMatrix::identity(n));
    let lu = BandLu::factor(&gram, order);
    let apply = |x: &mut Mat<C64>| {
        for c in 0..x.ncols() {
            lu.solve(x.col_as_slice_mut(c));
        }
    };
    block_iteration(a, count, MAX_INVERSE_ITERATIONS, apply)
}

fn block_iteration(
    a: &CsrMatrix,
    count: usize,
    max_iterations: usize,
    apply: impl Fn(&mut Mat<C64>),
) -> Result<SingularTriplets> {
    let n = a.ncols();
    let block = (count + 4).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_f1a7);
    let mut x = Mat::<C64>::from_fn(n, block, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    orthonormalize(&mut x);

    let anorm = a.norm_bound();
    let mut prev: Option<(Vec<f64>, Mat<C64>)> = None;
    for it in 1..=max_iterations {
        apply(&mut x);
        orthonormalize(&mut x);
        let (values, ritz) = rayleigh_ritz(a, &x)?;
        x = ritz;
        let done = match &prev {
            Some((pv, px)) => converged(&values[..count], &pv[..count], anorm) && subspace_settled(px, &x, count),
            None => false,
        };
        if done || it == max_iterations {
            let vectors = (0..count).map(|c| x.col_as_slice(c).to_vec()).collect();
            return Ok(SingularTriplets { values: values[..count].to_vec(), vectors, iterations: it });
        }
        prev = Some((values, x.clone()));
    }
    unreachable!()
}

fn converged(new: &[f64], old: &[f64], anorm: f64) -> bool {
    new.iter()
        .zip(old)
        .all(|(a, b)| (a - b).abs() <= 1e-13 * a.abs() + 64.0 * f64::EPSILON * anorm)
}

fn subspace_settled(old: &Mat<C64>, new: &Mat<C64>, count: usize) -> bool {
    let n = old.nrows();
    let block = old.ncols();
    // Every wanted new vector must lie in the previous block to high accuracy.
    (0..count).all(|c| {
        let v = new.col_as_slice(c);
        let captured: f64 = (0..block)
            .map(|b| {
                let u = old.col_as_slice(b);
                let d: C64 = (0..n).map(|i| u[i].conj() * v[i]).sum();
                d.norm_sqr()
            })
            .sum();
        1.0 - captured < 1e-14
    })
}

fn rayleigh_ritz(a: &CsrMatrix, x: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let (n, b) = (x.nrows(), x.ncols());
    let mut w = Mat::<C64>::zeros(a.nrows(), b);
    for c in 0..b {
        let y = a.mul_vec(x.col_as_slice(c));
        w.col_as_slice_mut(c).copy_from_slice(&y);
    }
    let svd = w.thin_svd().map_err(|e| MoireError::Decomposition(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let v = svd.V();
    // faer orders singular values non-increasingly; reverse to ascending.
    let values: Vec<f64> = (0..b).rev().map(|i| s[i].re).collect();
    let vr = Mat::<C64>::from_fn(b, b, |i, j| v[(i, b - 1 - j)]);
    let mut out = x * &vr;
    debug_assert_eq!(out.nrows(), n);
    orthonormalize(&mut out);
    Ok((values, out))
}

/// Modified Gram–Schmidt, applied twice.
pub fn orthonormalize(x: &mut Mat<C64>) {
    let (n, b) = (x.nrows(), x.ncols());
    for _ in 0..2 {
        for c in 0..b {
            for p in 0..c {
                let (head, tail) = x.as_mut().split_at_col_mut(c);
                let u = head.col(p);
                let mut v = tail.col_mut(0);
                let mut d = C64::new(0.0, 0.0);
                for i in 0..n {
                    d += u[i].conj() * v[i];
                }
                for i in 0..n {
                    v[i] -= d * u[i];
                }
            }
            let col = x.col_as_slice_mut(c);
            let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 0.0 {
                col.iter_mut().for_each(|z| *z /= nrm);
            }
        }
    }
}

/// All singular values of a dense matrix, ascending.
pub fn singular_values(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    let mut s = a.singular_values().map_err(|e| MoireError::Decomposition(format!("{e:?}")))?;
    s.reverse();
    Ok(s)
}

/// Dense SVD; returns ascending singular values and matching right vectors.
pub fn dense_right_singular(a: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let svd = a.svd().map_err(|e| MoireError::Decomposition(format!("{e:?}")))?;
    let k = a.nrows().min(a.ncols());
    let s = svd.S().column_vector();
    let v = svd.V();
    let values = (0..k).rev().map(|i| s[i].re).collect();
    let vecs = Mat::<C64>::from_fn(v.nrows(), k, |i, j| v[(i, k - 1 - j)]);
    Ok((values, vecs))
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(a: MatRef<'_, C64>) -> Result<Vec<C64>> {
    a.eigenvalues().map_err(|e| MoireError::Decomposition(format!("{e:?}")))
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(a: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = a.self_adjoint_eigen(Side::Lower).map_err(|e| MoireError::Decomposition(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..a.nrows()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|e| MoireError::Decomposition(format!("{e:?}")))
}

pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(u: &[C64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|⟨u,v⟩| / (‖u‖‖v‖)`.
pub fn collinearity(u: &[C64], v: &[C64]) -> f64 {
    inner(u, v).norm() / (norm(u) * norm(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_banded(n: usize, bw: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            for j in i.saturating_sub(bw)..(i + bw + 1).min(n) {
                if rng.random::<f64>() < 0.6 {
                    t.push((i, j, C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)));
                }
            }
        }
        CsrMatrix::from_triplets(n, n, t)
    }

    // Reverses blocks of 3, which keeps the band narrow.
    fn shuffled(n: usize) -> Vec<usize> {
        let mut o: Vec<usize> = (0..n).collect();
        for chunk in o.chunks_mut(3) {
            chunk.reverse();
        }
        o
    }

    #[test]
    fn band_lu_matches_dense_solve() {
        let n = 40;
        let a = random_banded(n, 4, 7);
        let order = shuffled(n);
        let lu = BandLu::factor(&a, &order);
        let b: Vec<C64> = (0..n).map(|i| C64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.03)).collect();
        let mut x = b.clone();
        lu.solve(&mut x);
        let r = a.mul_vec(&x);
        let err: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "residual {err}");
        let mut y = b.clone();
        lu.solve_adjoint(&mut y);
        let r = a.mul_vec_adjoint(&y);
        let err: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "adjoint residual {err}");
    }

    #[test]
    fn zero_pivot_is_regularised() {
        let t = vec![(0, 0, C64::new(0.0, 0.0)), (1, 1, C64::new(2.0, 0.0))];
        let a = CsrMatrix::from_triplets(2, 2, t);
        let lu = BandLu::factor(&a, &[0, 1]);
        assert_eq!(lu.replaced_pivots(), 1);
    }

    #[test]
    fn smallest_singular_matches_dense() {
        let n = 60;
        let a = random_banded(n, 3, 3);
        let order: Vec<usize> = (0..n).collect();
        let sv = smallest_singular(&a, &order, 3).unwrap();
        let dense = singular_values(a.to_dense().as_ref()).unwrap();
        for j in 0..3 {
            assert!((sv.values[j] - dense[j]).abs() < 1e-10, "{} vs {}", sv.values[j], dense[j]);
            let av = a.mul_vec(&sv.vectors[j]);
            assert!((norm(&av) - sv.values[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn exactly_singular_input() {
        // Seed 11 produces a matrix with two exact null directions.
        let n = 60;
        let a = random_banded(n, 3, 11);
        let order: Vec<usize> = (0..n).collect();
        let sv = smallest_singular(&a, &order, 3).unwrap();
        let dense = singular_values(a.to_dense().as_ref()).unwrap();
        assert!(sv.values[0] < 1e-14 && sv.values[1] < 1e-14);
        assert!((sv.values[2] - dense[2]).abs() < 1e-10);
    }

    #[test]
    fn csr_basics() {
        let a = CsrMatrix::from_triplets(
            2,
            3,
            vec![(0, 1, C64::new(1.0, 1.0)), (0, 1, C64::new(1.0, 0.0)), (1, 2, C64::new(0.0, -3.0))],
        );
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 1), C64::new(2.0, 1.0));
        let h = a.adjoint();
        assert_eq!(h.get(1, 0), C64::new(2.0, -1.0));
        let x = vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(2.0, 0.0)];
        let y = a.mul_vec(&x);
        assert_eq!(y[0], C64::new(2.0, 1.0) * C64::new(0.0, 1.0));
        assert_eq!(y[1], C64::new(0.0, -6.0));
    }
}
