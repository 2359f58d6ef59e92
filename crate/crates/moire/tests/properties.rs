use moire::chern::{cocycle_defect, multiplier};
use moire::lattice::{
    c64, dual_point, fractional_from_k, k_from_fractional, lattice_point, omega, omega_pow, pairing, C64,
};
use moire::potential::{eval_u, fourier_u};
use moire::theta::{fk, g_k, theta};
use proptest::prelude::*;
use std::f64::consts::PI;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

prop_compose! {
    fn point(scale: f64)(x in -scale..scale, y in -scale..scale) -> C64 { c64(x, y) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn potential_symmetries(z in point(5.0), a1 in -3i64..=3, a2 in -3i64..=3) {
        let u = eval_u(z);
        prop_assert!(close(eval_u(omega() * z), omega() * u, 1e-12));
        prop_assert!(close(eval_u(z + lattice_point(a1, a2)), omega_pow(-(a1 + a2)) * u, 1e-11));
        prop_assert!(close(eval_u(z.conj()).conj(), u, 1e-12));
        prop_assert!(close(fourier_u(1).eval(z), u, 1e-12));
        prop_assert!(close(fourier_u(-1).eval(z), eval_u(-z), 1e-12));
    }

    #[test]
    fn dual_pairing_is_integral(a1 in -4i64..=4, a2 in -4i64..=4, m in -4i64..=4, n in -4i64..=4) {
        let x = pairing(lattice_point(a1, a2), dual_point(m, n)) / (2.0 * PI);
        prop_assert!((x - x.round()).abs() < 1e-10);
    }

    #[test]
    fn fractional_coordinates_round_trip(k1 in -3.0f64..3.0, k2 in -3.0f64..3.0) {
        let (a, b) = fractional_from_k(k_from_fractional(k1, k2));
        prop_assert!((a - k1).abs() < 1e-12 && (b - k2).abs() < 1e-12);
    }

    #[test]
    fn theta_transformation_laws(z in point(1.0)) {
        let i = c64(0.0, 1.0);
        let th = theta(z);
        prop_assert!(close(theta(z + 1.0), -th, 1e-11));
        prop_assert!(close(theta(-z), -th, 1e-11));
        let rhs = -(-i * PI * omega() - 2.0 * PI * i * z).exp() * th;
        prop_assert!(close(theta(z + omega()), rhs, 1e-10));
    }

    #[test]
    fn fk_is_lattice_periodic(z in point(0.9), k in point(0.9), m in -2i64..=2, n in -2i64..=2) {
        prop_assume!(theta(z).norm() > 1e-3);
        let shift = c64(m as f64, 0.0) + omega() * n as f64;
        let a = fk(z, k).unwrap();
        let b = fk(z + shift, k).unwrap();
        prop_assert!(close(a, b, 1e-9));
    }

    #[test]
    fn g_k_characters(z in point(0.9), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        prop_assume!(theta(z).norm() > 1e-3);
        let k = omega() * a - b;
        let g = g_k(z, k);
        prop_assert!(close(g_k(z + 1.0, k), C64::from_polar(1.0, 2.0 * PI * a) * g, 1e-9));
        prop_assert!(close(g_k(z + omega(), k), C64::from_polar(1.0, 2.0 * PI * b) * g, 1e-9));
    }

    #[test]
    fn multiplier_cocycle(p1 in -3i64..=3, p2 in -3i64..=3, q1 in -3i64..=3, q2 in -3i64..=3, k in point(1.0), n in 1u32..=4) {
        let scale = multiplier(p1 + q1, p2 + q2, k, n).norm().max(1.0);
        prop_assert!(cocycle_defect((p1, p2), (q1, q2), k, n) <= 1e-11 * scale);
    }
}
