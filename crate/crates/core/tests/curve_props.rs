use proptest::prelude::*;
use torsionlab_core::linalg::Matrix;
use torsionlab_core::{AffineMap, Interval, OffspringSpec, PolyCurve, Polynomial};

/// Curves of dimension `d` whose component `i` has degree at most `n`, built
/// as a perturbation of the moment curve so that torsion is not identically
/// zero.
fn curve(d: usize, n: usize) -> impl Strategy<Value = PolyCurve> {
    prop::collection::vec(-1.0f64..1.0, d * (n + 1)).prop_map(move |c| {
        let comps: Vec<Polynomial> = (0..d)
            .map(|i| {
                let mut cs = c[i * (n + 1)..(i + 1) * (n + 1)].to_vec();
                cs[i + 1] += 2.0;
                Polynomial::new(cs)
            })
            .collect();
        PolyCurve::new(comps).unwrap()
    })
}

fn any_curve() -> impl Strategy<Value = PolyCurve> {
    (2usize..=4).prop_flat_map(|d| (d..=6).prop_flat_map(move |n| curve(d, n)))
}

fn matrix(d: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, d * d).prop_map(move |v| {
        let mut m = Matrix::from_row_slice(d, d, &v);
        for i in 0..d {
            m[(i, i)] += 2.0;
        }
        m
    })
}

fn close_coeffs(a: &Polynomial, b: &Polynomial, rel: f64) -> Result<(), TestCaseError> {
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(f64::MIN_POSITIVE);
    let n = a.coeffs().len().max(b.coeffs().len());
    for k in 0..n {
        prop_assert!((a.coeff(k) - b.coeff(k)).abs() <= rel * scale, "coefficient {}: {} vs {}", k, a.coeff(k), b.coeff(k));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn torsion_is_affine_equivariant((g, m, shift) in any_curve().prop_flat_map(|g| {
        let d = g.dim();
        (Just(g), matrix(d), prop::collection::vec(-5.0f64..5.0, d))
    })) {
        let map = AffineMap::new(m, shift).unwrap();
        let lhs = g.apply_affine(&map).torsion_poly();
        let rhs = g.torsion_poly().scale(map.det());
        close_coeffs(&lhs, &rhs, 1e-10)?;
    }

    #[test]
    fn torsion_reparametrization_law(g in any_curve(), a in prop_oneof![-2.0f64..-0.5, 0.5f64..2.0], b in -1.0f64..1.0) {
        let d = g.dim() as i32;
        let lhs = g.reparametrize(a, b).unwrap().torsion_poly();
        let rhs = g.torsion_poly().compose_affine(a, b).scale(a.powi(d * (d + 1) / 2));
        close_coeffs(&lhs, &rhs, 1e-10)?;
    }

    #[test]
    fn jacobian_is_antisymmetric((g, ts, i, j) in any_curve().prop_flat_map(|g| {
        let d = g.dim();
        (Just(g), prop::collection::vec(-1.5f64..1.5, d), 0..d, 0..d)
    })) {
        prop_assume!(i != j);
        let mut sw = ts.clone();
        sw.swap(i, j);
        let a = g.jacobian_j(&ts);
        let b = g.jacobian_j(&sw);
        prop_assert!((a + b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn vandermonde_factor_is_symmetric((g, ts, perm_seed) in any_curve().prop_flat_map(|g| {
        let d = g.dim();
        (Just(g), prop::collection::vec(-1.5f64..1.5, d), any::<u64>())
    })) {
        let Ok(base) = g.j_vandermonde_factor(&ts) else { return Ok(()); };
        let mut perm = ts.clone();
        let n = perm.len();
        let mut s = perm_seed;
        for k in (1..n).rev() {
            perm.swap(k, (s % (k as u64 + 1)) as usize);
            s /= k as u64 + 1;
        }
        let other = g.j_vandermonde_factor(&perm).unwrap();
        prop_assert!((base - other).abs() <= 1e-9 * base.abs().max(1e-300), "{} vs {}", base, other);
    }

    #[test]
    fn vandermonde_factor_diagonal_limit(g in any_curve(), s in -1.0f64..1.0, dir in prop::collection::vec(-1.0f64..1.0, 4)) {
        let d = g.dim();
        let fact: f64 = (1..d).map(|j| (1..=j).product::<usize>() as f64).product();
        let target = g.torsion_poly().eval(s) / fact;
        let err = |eps: f64| {
            let ts: Vec<f64> = (0..d).map(|j| s + eps * (j as f64 + 0.5 * dir[j])).collect();
            (g.j_vandermonde_factor(&ts).unwrap() - target).abs()
        };
        let (e1, e2) = (err(1e-3), err(1e-4));
        // O(ε): shrinking ε tenfold shrinks the error at least about tenfold.
        prop_assert!(e2 <= 0.2 * e1 + 1e-9 * (1.0 + target.abs()), "{} then {}", e1, e2);
    }

    #[test]
    fn normalized_torsion_is_one_at_zero(g in any_curve(), t0 in -0.3f64..0.3) {
        let l = g.torsion_poly().eval(t0);
        prop_assume!(l.abs() > 1e-3);
        let (_, h) = g.normalize_at(t0).unwrap();
        prop_assert!((h.torsion_poly().eval(0.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn moment_offspring_keeps_torsion(d in 2usize..=5, shifts in prop::collection::vec(0.0f64..1.0, 1..5)) {
        let m = PolyCurve::moment(d).unwrap();
        let spec = OffspringSpec::new(shifts, Interval::closed(-2.0, 2.0));
        let (child, _) = m.offspring(&spec).unwrap();
        close_coeffs(&child.torsion_poly(), &m.torsion_poly(), 1e-12)?;
    }
}
