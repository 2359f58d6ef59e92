use moire::chern::{chern_analytic, chern_numeric};
use moire::lattice::c64;
use moire::perturbation::{log_samples, separation_constant, separation_fit};
use moire::planewave::{BasisSpec, PlaneWaveBasis};
use moire::symmetry::{sector_kernels, verify_protected, SectorLabel};

const FIRST_MAGIC: f64 = 0.5856635583895589;

#[test]
fn lattice_chern_number_matches_multipliers() {
    for (n, grids) in [(1usize, vec![6, 8]), (2, vec![8])] {
        let b = PlaneWaveBasis::new(BasisSpec::new(n, 6)).unwrap();
        for g in grids {
            let c = chern_numeric(&b, c64(FIRST_MAGIC, 0.0), &vec![1.0; n - 1], g).unwrap();
            assert_eq!(c.value, chern_analytic(n as u32).unwrap(), "n={n} G={g}");
            assert!((c.flux - c.flux.round()).abs() < 1e-8);
        }
    }
}

#[test]
fn grid_below_six_is_rejected() {
    let b = PlaneWaveBasis::new(BasisSpec::new(1, 4)).unwrap();
    assert!(chern_numeric(&b, c64(FIRST_MAGIC, 0.0), &[], 4).is_err());
}

#[test]
fn two_layer_kernels_sit_in_the_expected_sectors() {
    let sectors = sector_kernels(2, 6, c64(0.3, 0.0), &[1.0]).unwrap();
    let with_kernel: Vec<SectorLabel> = sectors.iter().filter(|s| s.d_kernel > 0).map(|s| s.label).collect();
    assert_eq!(with_kernel.len(), 2, "{with_kernel:?}");
    assert!(with_kernel.contains(&SectorLabel::OneDim { k: 0, p: 2 }));
    assert!(with_kernel.contains(&SectorLabel::OneDim { k: 1, p: 0 }));
}

#[test]
fn protected_states_for_three_layers() {
    let report = verify_protected(3, 6, &[c64(0.4, 0.0), c64(1.1, 0.0)], &[vec![0.5, 2.0]]).unwrap();
    assert!(report.passed(), "{report:?}");
}

#[test]
fn separation_constant_is_cutoff_stable() {
    let a = separation_constant(10, c64(FIRST_MAGIC, 0.0)).unwrap();
    let b = separation_constant(12, c64(FIRST_MAGIC, 0.0)).unwrap();
    assert!((a.value - b.value).abs() < 1e-10);
    assert!(a.value > 0.0 && a.value < 1.0);
}

#[test]
fn second_band_grows_linearly_at_k_prime() {
    let c = separation_constant(10, c64(FIRST_MAGIC, 0.0)).unwrap().value;
    let fit = separation_fit(10, c64(FIRST_MAGIC, 0.0), &log_samples(1e-3, 1e-2, 6)).unwrap();
    assert!(fit.e1.iter().all(|&e| e < 1e-8));
    assert!((fit.slope - c).abs() < 0.02 * c);
}
