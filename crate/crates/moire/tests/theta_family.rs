use moire::chern::multiplier;
use moire::lattice::{c64, omega, pairing, stacking_point, C64, SQRT3};
use moire::linalg::{collinearity, norm};
use moire::planewave::{assemble_dn, BasisSpec, PlaneWaveBasis};
use moire::spectra::{lowest_state, DEFAULT_PROBE};
use moire::theta::{integral_i, k_of, FlatBandFamily, MagicKernel};

const FIRST_MAGIC: f64 = 0.5856635583895589;
const CUTOFF: usize = 8;

fn family(n: usize) -> (PlaneWaveBasis, FlatBandFamily) {
    let b = PlaneWaveBasis::new(BasisSpec::new(n, CUTOFF)).unwrap();
    let kernel = MagicKernel::compute(CUTOFF, c64(FIRST_MAGIC, 0.0), DEFAULT_PROBE).unwrap();
    let f = FlatBandFamily::new(&b, &vec![1.0; n - 1], kernel, 64).unwrap();
    (b, f)
}

#[test]
fn states_solve_the_layered_equation() {
    for n in 1..=3 {
        let (b, fam) = family(n);
        let t = vec![1.0; n - 1];
        for k in [c64(0.31, 0.22), c64(-0.7, 0.45), c64(1.1, -1.4)] {
            let phi = fam.state(k).unwrap();
            let d = assemble_dn(&b, c64(FIRST_MAGIC, 0.0), &t, k).unwrap().matrix;
            let residual = norm(&d.mul_vec(phi.coeffs())) / phi.norm();
            assert!(residual < 1e-7, "n={n} k={k}: {residual}");
            let (_, v) = lowest_state(&b, c64(FIRST_MAGIC, 0.0), &t, k).unwrap();
            assert!(collinearity(phi.coeffs(), &v) > 1.0 - 1e-6);
        }
    }
}

#[test]
fn norm_transforms_with_the_multiplier() {
    for n in 1..=3 {
        let (_, fam) = family(n);
        let kb = c64(0.31, 0.22);
        let h0 = fam.state(kb).unwrap().norm().powi(2);
        for (p1, p2) in [(1i64, 0i64), (0, 1), (-1, 2)] {
            let p = omega() * p1 as f64 - p2 as f64;
            let h1 = fam.state(kb + SQRT3 * omega() * p).unwrap().norm().powi(2);
            let e = multiplier(p1, p2, k_of(kb), n as u32).norm_sqr();
            assert!((h0 / h1 - e).abs() < 1e-8 * e, "n={n} p=({p1},{p2})");
        }
    }
}

#[test]
fn states_are_holomorphic_in_momentum() {
    let (_, fam) = family(2);
    let k = c64(0.31, 0.22);
    let h = 1e-4;
    let s = |k| fam.state(k).unwrap().into_coeffs();
    let (xp, xm, yp, ym) = (s(k + h), s(k - h), s(k + c64(0.0, h)), s(k - c64(0.0, h)));
    let i = c64(0.0, 1.0);
    let (mut dbar, mut dz) = (0.0f64, 0.0f64);
    for j in 0..xp.len() {
        dbar = dbar.max((((xp[j] - xm[j]) + i * (yp[j] - ym[j])) / (4.0 * h)).norm());
        dz = dz.max((((xp[j] - xm[j]) - i * (yp[j] - ym[j])) / (4.0 * h)).norm());
    }
    assert!(dbar < 1e-6 * dz, "dbar {dbar} vs dz {dz}");
}

#[test]
fn kernel_vanishes_where_the_quotient_has_its_pole() {
    let cutoff = 12;
    let b = PlaneWaveBasis::new(BasisSpec::new(1, cutoff)).unwrap();
    let kernel = MagicKernel::compute(cutoff, c64(FIRST_MAGIC, 0.0), DEFAULT_PROBE).unwrap();
    let m = b.mode_count();
    let eval = |z: C64, c: usize| -> C64 {
        (0..m)
            .map(|i| kernel.state.coeffs()[c * m + i] * C64::from_polar(1.0, pairing(z, b.momentum(c * m + i))))
            .sum()
    };
    let z = -stacking_point();
    let generic = eval(c64(0.3, 0.1), 1).norm();
    assert!(eval(z, 0).norm() < 1e-10 * generic);
    assert!(eval(z, 1).norm() < 1e-10 * generic);
}

#[test]
fn origin_limit_is_continuous() {
    for n in 2..=3 {
        let (_, fam) = family(n);
        let origin = fam.state_at_origin();
        let near = fam.state(C64::from_polar(1e-6, 0.7)).unwrap();
        let diff: Vec<C64> = near.coeffs().iter().zip(origin.coeffs()).map(|(a, b)| a - b).collect();
        assert!(norm(&diff) < 1e-4 * origin.norm(), "n={n}");
    }
}

#[test]
fn kernel_integral_converges_in_cutoff() {
    let a = integral_i(12, c64(FIRST_MAGIC, 0.0), DEFAULT_PROBE).unwrap();
    let b = integral_i(14, c64(FIRST_MAGIC, 0.0), DEFAULT_PROBE).unwrap();
    assert!((a - b).abs() < 1e-9 * a);
    assert!(a > 1.0);
}
