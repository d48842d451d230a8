use num_complex::Complex64;
use proptest::prelude::*;
use torsionlab_core::poly::{parse_poly, poly_det, roots};
use torsionlab_core::Polynomial;

fn coeffs(max_deg: usize) -> impl Strategy<Value = Vec<f64>> {
    (1..=max_deg).prop_flat_map(|deg| {
        (prop::collection::vec(-1.0f64..1.0, deg), prop_oneof![-1.0f64..-0.1, 0.1f64..1.0]).prop_map(|(mut c, lead)| {
            c.push(lead);
            c
        })
    })
}

fn small_int_poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-4i32..=4, 1..4).prop_map(|c| Polynomial::new(c.into_iter().map(f64::from).collect()))
}

fn max_abs(c: &[f64]) -> f64 {
    c.iter().fold(0.0, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_rebuild_the_polynomial(c in coeffs(8)) {
        let q = Polynomial::new(c.clone());
        let set = roots(&q, 1e-12).unwrap();
        prop_assert_eq!(set.total_multiplicity(), q.degree().unwrap());
        let mut prod = vec![Complex64::new(q.leading(), 0.0)];
        for &(z, m) in &set.roots {
            for _ in 0..m {
                let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
                for (k, &a) in prod.iter().enumerate() {
                    next[k + 1] += a;
                    next[k] -= a * z;
                }
                prod = next;
            }
        }
        let scale = max_abs(&c);
        for (k, &a) in c.iter().enumerate() {
            prop_assert!((prod[k].re - a).abs() <= 1e-8 * scale, "coefficient {}: {} vs {}", k, prod[k].re, a);
            prop_assert!(prod[k].im.abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn compose_affine_round_trip(c in coeffs(8), a in prop_oneof![-2.0f64..-0.5, 0.5f64..2.0], b in -1.0f64..1.0) {
        let q = Polynomial::new(c.clone());
        let back = q.compose_affine(a, b).compose_affine(1.0 / a, -b / a);
        let scale = max_abs(&c);
        for (k, &ck) in c.iter().enumerate() {
            prop_assert!((back.coeff(k) - ck).abs() <= 1e-12 * scale, "{} vs {}", back.coeff(k), ck);
        }
    }

    #[test]
    fn det_is_alternating(entries in prop::collection::vec(small_int_poly(), 9), i in 0usize..3, j in 0usize..3) {
        prop_assume!(i != j);
        let m: Vec<Vec<Polynomial>> = entries.chunks(3).map(|r| r.to_vec()).collect();
        let mut swapped = m.clone();
        swapped.swap(i, j);
        let a = poly_det(&m);
        let b = poly_det(&swapped);
        let n = a.coeffs().len().max(b.coeffs().len());
        for k in 0..n {
            prop_assert_eq!(a.coeff(k), -b.coeff(k));
        }
    }

    #[test]
    fn det_is_linear_in_a_row(entries in prop::collection::vec(small_int_poly(), 9), extra in prop::collection::vec(small_int_poly(), 3)) {
        let m: Vec<Vec<Polynomial>> = entries.chunks(3).map(|r| r.to_vec()).collect();
        let mut alt = m.clone();
        alt[0] = extra.clone();
        let mut sum = m.clone();
        sum[0] = m[0].iter().zip(&extra).map(|(a, b)| a + b).collect();
        let lhs = poly_det(&sum);
        let rhs = &poly_det(&m) + &poly_det(&alt);
        for k in 0..lhs.coeffs().len().max(rhs.coeffs().len()) {
            prop_assert_eq!(lhs.coeff(k), rhs.coeff(k));
        }
    }

    #[test]
    fn parse_format_is_idempotent(c in prop::collection::vec(-64i32..=64, 1..10), scale in 0u32..4) {
        let coeffs: Vec<f64> = c.iter().map(|&x| f64::from(x) / f64::from(1u32 << scale)).collect();
        let text = Polynomial::new(coeffs).to_string();
        let once = parse_poly(&text).unwrap();
        let twice = parse_poly(&once.to_string()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.to_string(), twice.to_string());
    }
}
