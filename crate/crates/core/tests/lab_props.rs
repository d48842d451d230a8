use proptest::prelude::*;
use torsionlab_core::decompose::dw_decompose;
use torsionlab_core::lab::{freq_band_check, geometric_ratio_scan, injectivity_probe, multilinear_t};
use torsionlab_core::linalg::Matrix;
use torsionlab_core::{AffineMap, Interval, PolyCurve};

fn cubic_curve() -> PolyCurve {
    PolyCurve::from_coeffs(&[&[0.0, 1.0, 0.5], &[0.0, 0.0, 1.0, 0.3], &[0.2, 0.0, 0.0, 1.0]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn moment_ratio_is_exact(seed in any::<u64>(), samples in 3usize..400, lo in -3.0f64..3.0, len in 0.1f64..4.0) {
        let iv = Interval::closed(lo, lo + len);
        let r2 = geometric_ratio_scan(&PolyCurve::moment(2).unwrap(), iv, samples, seed).unwrap();
        prop_assert!((r2.min_ratio - 1.0).abs() < 1e-9);
        let r3 = geometric_ratio_scan(&PolyCurve::moment(3).unwrap(), iv, samples, seed).unwrap();
        prop_assert!((r3.min_ratio - 0.5).abs() < 1e-9);
    }

    #[test]
    fn ratio_scan_unimodular_invariance(seed in any::<u64>(), shear in -2.0f64..2.0, k in 0.25f64..4.0, shift in prop::collection::vec(-3.0f64..3.0, 3)) {
        let g = cubic_curve();
        let iv = Interval::closed(0.2, 0.9);
        // det = k · (1/k) · 1 = 1
        let m = Matrix::from_row_slice(3, 3, &[k, shear, 0.0, 0.0, 1.0 / k, shear, 0.0, 0.0, 1.0]);
        let mapped = g.apply_affine(&AffineMap::new(m, shift).unwrap());
        let a = geometric_ratio_scan(&g, iv, 300, seed).unwrap();
        let b = geometric_ratio_scan(&mapped, iv, 300, seed).unwrap();
        prop_assert!((a.min_ratio - b.min_ratio).abs() <= 1e-9 * a.min_ratio.max(1.0));
    }

    #[test]
    fn ratio_scan_reparametrization_invariance(seed in any::<u64>(), a in 0.25f64..4.0, b in -2.0f64..2.0) {
        let g = cubic_curve();
        let iv = Interval::closed(0.2, 0.9);
        let rep = g.reparametrize(a, b).unwrap();
        let pre = Interval::closed((iv.lo - b) / a, (iv.hi - b) / a);
        let r0 = geometric_ratio_scan(&g, iv, 300, seed).unwrap();
        let r1 = geometric_ratio_scan(&rep, pre, 300, seed).unwrap();
        prop_assert!((r0.min_ratio - r1.min_ratio).abs() <= 1e-9 * r0.min_ratio.max(1.0));
    }
}

#[test]
fn moment_injectivity_floor_is_seed_independent() {
    for d in [2, 3] {
        let m = PolyCurve::moment(d).unwrap();
        let floors: Vec<f64> = (0..10).map(|s| injectivity_probe(&m, Interval::closed(0.0, 1.0), 200, s).unwrap().min_gap).collect();
        let lo = floors.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(lo > 1e-4, "d = {d}: {floors:?}");
    }
}

#[test]
fn frequency_bands_are_monotone() {
    let g = PolyCurve::from_coeffs(&[&[0.0, 1.0, 0.3], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.0, 1.0]]).unwrap();
    let dec = dw_decompose(&g).unwrap();
    for (piece, cert) in dec.pieces.iter().zip(&dec.first_coord) {
        if cert.center.im != 0.0 || piece.interval.interior_contains(cert.center.re) {
            continue;
        }
        let bands: Vec<_> = (-8..=8).filter_map(|n| freq_band_check(&g, piece, cert, n).ok()).collect();
        for w in bands.windows(2) {
            assert!(w[1].lo >= w[0].lo, "{w:?}");
        }
    }
}

#[test]
fn bilinear_form_converges_under_node_doubling() {
    let one: &dyn Fn(f64) -> f64 = &|_| 1.0;
    let g = PolyCurve::moment(2).unwrap();
    let unit = Interval::closed(0.0, 1.0);
    let a = multilinear_t(&g, &[one, one], &[unit, unit], 6).unwrap();
    let b = multilinear_t(&g, &[one, one], &[unit, unit], 12).unwrap();
    assert!((a - b).abs() < 1e-3 * b);
}
