//! Singular-value bands, magic parameters and flat-band multiplicities.

use crate::error::{MoireError, Result};
use crate::lattice::{c64, distance_to_dual_coset, k_from_fractional, C64};
use crate::linalg::{eigenvalues, smallest_singular, BandLu, SingularTriplets};
use crate::planewave::{assemble_b, assemble_dn, PlaneWaveBasis};
use faer::Mat;
use rayon::prelude::*;

/// Default second probe used to validate magic candidates.
pub const DEFAULT_CHECK_PROBE: C64 = C64::new(0.31, 0.4);
pub const DEFAULT_PROBE: C64 = C64::new(0.17, -0.21);
pub const RESIDUAL_GATE: f64 = 1e-6;
pub const DEDUP_TOL: f64 = 1e-6;
/// Relative distance within which a candidate must reappear at the check probe.
pub const SCREEN_TOL: f64 = 1e-4;

/// The `count` smallest singular values of `D_n(α;t) + k`, ascending.
pub fn singular_bands(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], k: C64, count: usize) -> Result<Vec<f64>> {
    Ok(singular_triplets(basis, alpha, t, k, count)?.values)
}

pub fn singular_triplets(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], k: C64, count: usize) -> Result<SingularTriplets> {
    let d = assemble_dn(basis, alpha, t, k)?;
    smallest_singular(&d.matrix, &basis.solver_order(), count)
}

/// Smallest singular value and its right singular vector.
pub fn lowest_state(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], k: C64) -> Result<(f64, Vec<C64>)> {
    let mut tr = singular_triplets(basis, alpha, t, k, 1)?;
    Ok((tr.values[0], tr.vectors.swap_remove(0)))
}

/// Number of singular values of `D_n(α;t) + k` below `tol`.
pub fn flatband_multiplicity(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], k: C64, tol: f64) -> Result<usize> {
    let d = assemble_dn(basis, alpha, t, k)?;
    let order = basis.solver_order();
    let mut count = 2usize;
    loop {
        let sv = smallest_singular(&d.matrix, &order, count.min(basis.dim()))?;
        let below = sv.values.iter().filter(|&&s| s < tol).count();
        if below < sv.values.len() || count >= basis.dim() {
            return Ok(below);
        }
        count *= 2;
    }
}

/// Rejects probes where `D(0) + k` is singular.
pub fn check_probe(k: C64) -> Result<()> {
    let i = c64(0.0, 1.0);
    let distance = [c64(0.0, 0.0), i, -i]
        .iter()
        .map(|&s| distance_to_dual_coset(k, s))
        .fold(f64::INFINITY, f64::min);
    if distance < 1e-6 {
        Err(MoireError::ProbeOnSpectrum { k, distance })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagicEntry {
    pub alpha: C64,
    pub residual: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagicAngleSet {
    pub entries: Vec<MagicEntry>,
    pub probe: C64,
    pub check_probe: C64,
    pub cutoff: usize,
    pub layers: usize,
    pub max_modulus: f64,
    /// Birman–Schwinger eigenvalues inside the modulus bound, before validation.
    pub candidates: usize,
    /// Candidates that reappear at the check probe and go on to the residual gate.
    pub screened: usize,
}

impl MagicAngleSet {
    /// Positive real entries, ascending.
    pub fn real_positive(&self) -> Vec<&MagicEntry> {
        let mut v: Vec<&MagicEntry> = self
            .entries
            .iter()
            .filter(|e| e.alpha.re > 0.0 && e.alpha.im.abs() <= 1e-6 * e.alpha.re.max(1.0))
            .collect();
        v.sort_by(|a, b| a.alpha.re.total_cmp(&b.alpha.re));
        v
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.real_positive().iter().map(|e| e.alpha.re).collect()
    }
}

/// Parameters `α` with `|α| ≤ max_modulus` for which `D(α) + k` is singular
/// for every `k`.
///
/// The linear pencil `D_n(0;t) + k + αB` is reduced to the layer-1 rows and
/// columns, where `B` lives: `α = −1/μ` for the nonzero eigenvalues `μ` of
/// `[(D_n(0;t) + k)⁻¹B]_{11}`. A candidate must reappear in the same spectrum
/// at an independent probe `k′`, and is kept when the smallest singular value
/// of `D(α) + k′` is below the gate.
pub fn magic_angles(
    basis: &PlaneWaveBasis,
    t: &[f64],
    probe: C64,
    check: C64,
    max_modulus: f64,
) -> Result<MagicAngleSet> {
    check_probe(probe)?;
    check_probe(check)?;
    let to_alpha = |mu: Vec<C64>| -> Vec<C64> {
        mu.into_iter().filter(|m| m.norm() > 1.0 / max_modulus).map(|m| -1.0 / m).collect()
    };
    let mut candidates = to_alpha(birman_schwinger_eigenvalues(basis, t, probe)?);
    candidates.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    let n_candidates = candidates.len();
    // Genuine parameters do not move with k; spurious ones do.
    let others = to_alpha(birman_schwinger_eigenvalues(basis, t, check)?);
    candidates.retain(|a| others.iter().any(|b| (a - b).norm() <= SCREEN_TOL * a.norm().max(1.0)));
    let screened = candidates.len();

    let single = basis.layer_one();
    let residuals: Vec<f64> = candidates
        .par_iter()
        .map(|&a| singular_bands(&single, a, &[], check, 1).map(|v| v[0]))
        .collect::<Result<_>>()?;

    let mut accepted: Vec<(C64, f64)> = Vec::new();
    for (a, r) in candidates.into_iter().zip(residuals) {
        if r >= RESIDUAL_GATE {
            continue;
        }
        match accepted.iter_mut().find(|(b, _)| (*b - a).norm() <= DEDUP_TOL) {
            Some(slot) => slot.1 = slot.1.min(r),
            None => accepted.push((a, r)),
        }
    }
    let entries = accepted
        .par_iter()
        .map(|&(alpha, residual)| {
            flatband_multiplicity(&single, alpha, &[], probe, RESIDUAL_GATE)
                .map(|multiplicity| MagicEntry { alpha, residual, multiplicity })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MagicAngleSet {
        entries,
        probe,
        check_probe: check,
        cutoff: basis.cutoff(),
        layers: basis.layers(),
        max_modulus,
        candidates: n_candidates,
        screened,
    })
}

/// Nonzero spectrum of `(D_n(0;t) + k)⁻¹B`, computed on the layer-1 block
/// that carries every nonzero column of `B`.
pub fn birman_schwinger_eigenvalues(basis: &PlaneWaveBasis, t: &[f64], k: C64) -> Result<Vec<C64>> {
    let g = assemble_dn(basis, c64(0.0, 0.0), t, k)?;
    let b = assemble_b(basis).matrix;
    let lu = BandLu::factor(&g.matrix, &basis.solver_order());
    let l = 2 * basis.mode_count();
    let dim = basis.dim();
    let mut cols: Vec<Vec<C64>> = vec![vec![c64(0.0, 0.0); dim]; l];
    for (i, j, v) in b.triplets() {
        cols[j][i] += v;
    }
    cols.par_iter_mut().for_each(|c| lu.solve(c));
    // D_n(0;t) + k never mixes even and odd components, so on layer 1 the
    // operator is [[0, A], [C, 0]] and its spectrum is ±√spec(AC).
    let h = l / 2;
    let a = Mat::<C64>::from_fn(h, h, |i, j| cols[h + j][i]);
    let c = Mat::<C64>::from_fn(h, h, |i, j| cols[j][h + i]);
    let lambda = eigenvalues((a * c).as_ref())?;
    let mut mu = Vec::with_capacity(l);
    for z in lambda.into_iter().filter(|z| z.norm() > 1e-24) {
        let r = z.sqrt();
        mu.extend([r, -r]);
    }
    Ok(mu)
}

/// Polishes an approximate magic parameter with shift-invert iteration on
/// the pencil `D(0) + k + αB` of the single-layer operator.
pub fn refine_magic(basis: &PlaneWaveBasis, alpha0: C64, probe: C64) -> Result<C64> {
    check_probe(probe)?;
    let single = basis.layer_one();
    let g = assemble_dn(&single, c64(0.0, 0.0), &[], probe)?.matrix;
    let b = assemble_b(&single).matrix;
    let order = single.solver_order();
    let mut alpha = alpha0;
    let mut x: Vec<C64> = (0..single.dim()).map(|i| c64(1.0, (i as f64 * 0.37).sin())).collect();
    for _ in 0..40 {
        let lu = BandLu::factor(&g.add_scaled(alpha, &b), &order);
        // Power steps on (G + αB)⁻¹B, whose dominant eigenvalue is −1/(α* − α).
        let mut nu = c64(0.0, 0.0);
        for _ in 0..3 {
            let nx = crate::linalg::norm(&x);
            x.iter_mut().for_each(|z| *z /= nx);
            let mut y = b.mul_vec(&x);
            lu.solve(&mut y);
            nu = crate::linalg::inner(&x, &y);
            x = y;
        }
        if nu.norm() == 0.0 {
            return Err(MoireError::Convergence("magic refinement stalled".into()));
        }
        let step = -1.0 / nu;
        alpha += step;
        if step.norm() <= 1e-14 * alpha.norm().max(1.0) {
            return Ok(alpha);
        }
    }
    if (alpha - alpha0).norm() > 0.5 {
        return Err(MoireError::Convergence(format!("refinement drifted from {alpha0} to {alpha}")));
    }
    Ok(alpha)
}

/// Named point of a k-path in fractional coordinates of [`k_from_fractional`].
#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub label: String,
    pub k1: f64,
    pub k2: f64,
}

impl Waypoint {
    pub fn new(label: &str, k1: f64, k2: f64) -> Self {
        Self { label: label.to_string(), k1, k2 }
    }

    pub fn k(&self) -> C64 {
        k_from_fractional(self.k1, self.k2)
    }
}

/// `K(0,0) → Γ(½,½) → K′(1,1) → M(2,1)`.
pub fn default_path() -> Vec<Waypoint> {
    vec![
        Waypoint::new("K", 0.0, 0.0),
        Waypoint::new("G", 0.5, 0.5),
        Waypoint::new("K'", 1.0, 1.0),
        Waypoint::new("M", 2.0, 1.0),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSample {
    pub segment: usize,
    pub fraction: f64,
    pub k1: f64,
    pub k2: f64,
    pub k: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub samples: Vec<KSample>,
    /// `bands[s][j]` is `E_{j+1}` at sample `s`.
    pub bands: Vec<Vec<f64>>,
    pub alpha: C64,
    pub t: Vec<f64>,
    pub layers: usize,
    pub cutoff: usize,
}

impl BandStructure {
    pub fn band(&self, j: usize) -> Vec<f64> {
        self.bands.iter().map(|b| b[j]).collect()
    }
}

/// Samples of a polyline path; each segment contributes `per_segment`
/// points starting at its first waypoint.
pub fn path_samples(path: &[Waypoint], per_segment: usize) -> Vec<KSample> {
    let mut out = Vec::new();
    for (s, w) in path.windows(2).enumerate() {
        for j in 0..per_segment {
            let f = j as f64 / per_segment as f64;
            let k1 = w[0].k1 + f * (w[1].k1 - w[0].k1);
            let k2 = w[0].k2 + f * (w[1].k2 - w[0].k2);
            out.push(KSample { segment: s, fraction: f, k1, k2, k: k_from_fractional(k1, k2) });
        }
    }
    out
}

pub fn band_path(
    basis: &PlaneWaveBasis,
    alpha: C64,
    t: &[f64],
    path: &[Waypoint],
    per_segment: usize,
    band_count: usize,
) -> Result<BandStructure> {
    if path.len() < 2 || per_segment == 0 {
        return Err(MoireError::InvalidArgument("a path needs two waypoints and at least one sample".into()));
    }
    let samples = path_samples(path, per_segment);
    let bands = samples
        .par_iter()
        .map(|s| singular_bands(basis, alpha, t, s.k, band_count))
        .collect::<Result<Vec<_>>>()?;
    Ok(BandStructure {
        samples,
        bands,
        alpha,
        t: t.to_vec(),
        layers: basis.layers(),
        cutoff: basis.cutoff(),
    })
}

/// Half-pixel `g × g` grid over `[0,3)²` in the coordinates of
/// [`k_from_fractional`], which covers one cell of `Λ*`.
pub fn k_grid(g: usize) -> Vec<C64> {
    (0..g * g)
        .map(|idx| {
            let (i, j) = (idx / g, idx % g);
            let s = 3.0 / g as f64;
            k_from_fractional((i as f64 + 0.5) * s, (j as f64 + 0.5) * s)
        })
        .collect()
}

/// `E₁` over a list of momenta.
pub fn lowest_band_on(basis: &PlaneWaveBasis, alpha: C64, t: &[f64], ks: &[C64]) -> Result<Vec<f64>> {
    ks.par_iter()
        .map(|&k| singular_bands(basis, alpha, t, k, 1).map(|v| v[0]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::dual_point;
    use crate::planewave::BasisSpec;

    fn basis(n: usize, cutoff: usize) -> PlaneWaveBasis {
        PlaneWaveBasis::new(BasisSpec::new(n, cutoff)).unwrap()
    }

    #[test]
    fn free_bands_are_symbol_moduli() {
        let b = basis(1, 4);
        let k = c64(0.137, -0.291);
        let got = singular_bands(&b, c64(0.0, 0.0), &[], k, 6).unwrap();
        let mut oracle: Vec<f64> = (0..b.dim()).map(|f| (b.momentum(f) + k).norm()).collect();
        oracle.sort_by(f64::total_cmp);
        for j in 0..6 {
            assert!((got[j] - oracle[j]).abs() < 1e-12, "{j}: {} vs {}", got[j], oracle[j]);
        }
    }

    #[test]
    fn dirac_points_are_protected() {
        let b = basis(2, 6);
        for k in [c64(0.0, 0.0), c64(0.0, -1.0)] {
            let e = singular_bands(&b, c64(0.8, 0.0), &[0.6], k, 1).unwrap();
            assert!(e[0] < 1e-10, "{e:?}");
        }
    }

    #[test]
    fn free_dirac_cone() {
        let b = basis(1, 4);
        let d = c64(6e-4, 8e-4);
        let e = singular_bands(&b, c64(0.0, 0.0), &[], d, 2).unwrap();
        assert!((e[0] - 1e-3).abs() < 1e-12);
        assert!(e[1] > 0.5);
    }

    #[test]
    fn probe_validation() {
        assert!(check_probe(dual_point(1, -2)).is_err());
        assert!(check_probe(c64(0.0, -1.0) + dual_point(0, 1)).is_err());
        assert!(check_probe(DEFAULT_PROBE).is_ok());
    }

    #[test]
    fn path_sampling_counts() {
        let s = path_samples(&default_path(), 5);
        assert_eq!(s.len(), 15);
        assert_eq!(s[5].segment, 1);
        assert!((s[5].k - c64(0.5, 0.5) * 0.0 - k_from_fractional(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn multiplicity_off_magic_is_zero() {
        let b = basis(1, 6);
        assert_eq!(flatband_multiplicity(&b, c64(0.3, 0.0), &[], DEFAULT_PROBE, 1e-6).unwrap(), 0);
    }

    #[test]
    fn halved_eigenproblem_matches_full_pencil() {
        for (n, t) in [(1, vec![]), (2, vec![0.7])] {
            let b = basis(n, 3);
            let k = DEFAULT_PROBE;
            let g = assemble_dn(&b, c64(0.0, 0.0), &t, k).unwrap().matrix.to_dense();
            let bm = assemble_b(&b).matrix.to_dense();
            let full = faer::linalg::solvers::Solve::solve(&g.partial_piv_lu(), &bm);
            let mut expected = eigenvalues(full.as_ref()).unwrap();
            expected.retain(|z| z.norm() > 1e-10);
            let got = birman_schwinger_eigenvalues(&b, &t, k).unwrap();
            assert_eq!(got.len(), expected.len());
            for z in &expected {
                let d = got.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-8 * z.norm().max(1.0), "{z}");
            }
        }
    }
}
