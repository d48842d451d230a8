use num_complex::Complex64;
use proptest::prelude::*;
use torsionlab_core::exec::Sequential;
use torsionlab_core::linalg::{transpose_vec, Matrix};
use torsionlab_core::oscillatory::{extension_eval, grid_norm, Extension};
use torsionlab_core::{AffineMap, GridSpec, Interval, PolyCurve, Polynomial};

fn curve() -> impl Strategy<Value = PolyCurve> {
    (2usize..=3).prop_flat_map(|d| {
        prop::collection::vec(-1.0f64..1.0, d * 4).prop_map(move |c| {
            let comps: Vec<Polynomial> = (0..d)
                .map(|i| {
                    let mut cs = c[i * 4..(i + 1) * 4].to_vec();
                    cs[i + 1] += 1.5;
                    Polynomial::new(cs)
                })
                .collect();
            PolyCurve::new(comps).unwrap()
        })
    })
}

fn with_point() -> impl Strategy<Value = (PolyCurve, Vec<f64>)> {
    curve().prop_flat_map(|g| {
        let d = g.dim();
        (Just(g), prop::collection::vec(-3.0f64..3.0, d))
    })
}

fn f(t: f64) -> Complex64 {
    Complex64::new((1.3 * t).cos() + 0.5, 0.4 * t * t)
}

const SUPPORT: Interval = Interval { lo: -0.5, hi: 0.5, lo_closed: true, hi_closed: true };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn parametrization_invariance((g, x) in with_point(), a in prop_oneof![-2.0f64..-0.5, 0.5f64..2.0], b in -0.5f64..0.5) {
        let base = extension_eval(&g, f, true, &x, SUPPORT, 256).unwrap();
        let rep = g.reparametrize(a, b).unwrap();
        let (u, v) = ((SUPPORT.lo - b) / a, (SUPPORT.hi - b) / a);
        let pre = Interval::closed(u.min(v), u.max(v));
        let moved = extension_eval(&rep, |t| f(a * t + b), true, &x, pre, 256).unwrap();
        prop_assert!((moved - base).norm() <= 1e-6 * base.norm().max(1.0));
    }

    #[test]
    fn affine_covariance((g, x, m) in with_point().prop_flat_map(|(g, x)| {
        let d = g.dim();
        (Just(g), Just(x), prop::collection::vec(-0.5f64..0.5, d * d))
    })) {
        let d = g.dim();
        let mut m = Matrix::from_row_slice(d, d, &m);
        for i in 0..d {
            m[(i, i)] += 1.0;
        }
        let map = AffineMap::linear(m.clone()).unwrap();
        let lhs = extension_eval(&g.apply_affine(&map), f, true, &x, SUPPORT, 256).unwrap();
        let mx = transpose_vec(&m, &x);
        let rhs = extension_eval(&g, f, true, &mx, SUPPORT, 256).unwrap() * map.det().abs().powf(2.0 / (d * (d + 1)) as f64);
        prop_assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1e-300));
    }

    #[test]
    fn linear_in_f((g, x) in with_point(), c in (-2.0f64..2.0, -2.0f64..2.0)) {
        let c = Complex64::new(c.0, c.1);
        let h = |t: f64| Complex64::new(t.sin(), 1.0);
        let lhs = extension_eval(&g, |t| f(t) + c * h(t), false, &x, SUPPORT, 128).unwrap();
        let rhs = extension_eval(&g, f, false, &x, SUPPORT, 128).unwrap() + c * extension_eval(&g, h, false, &x, SUPPORT, 128).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn modulation_translates((g, x, x0) in with_point().prop_flat_map(|(g, x)| {
        let d = g.dim();
        (Just(g), Just(x), prop::collection::vec(-1.0f64..1.0, d))
    })) {
        let modulated = |t: f64| {
            let ph: f64 = g.eval(t).iter().zip(&x0).map(|(a, b)| a * b).sum();
            Complex64::new(ph.cos(), ph.sin()) * f(t)
        };
        let shifted: Vec<f64> = x.iter().zip(&x0).map(|(a, b)| a - b).collect();
        let a = extension_eval(&g, modulated, true, &shifted, SUPPORT, 200).unwrap();
        let b = extension_eval(&g, f, true, &x, SUPPORT, 200).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn grid_norm_ignores_parametrization(a in 0.5f64..2.0, b in -0.5f64..0.5) {
        let g = PolyCurve::from_coeffs(&[&[0.0, 1.0, 0.2], &[0.0, 0.0, 1.0, 0.1]]).unwrap();
        let grid = GridSpec::cube(2, 6.0, 24, 256, SUPPORT).unwrap();
        let op = Extension::midpoint(&g, SUPPORT, 256, true).unwrap();
        let base = grid_norm(&op.field(&Sequential, &op.sample(f), &grid).unwrap(), &grid, 4.0);
        let rep = g.reparametrize(a, b).unwrap();
        let pre = Interval::closed((SUPPORT.lo - b) / a, (SUPPORT.hi - b) / a);
        let op2 = Extension::midpoint(&rep, pre, 256, true).unwrap();
        let moved = grid_norm(&op2.field(&Sequential, &op2.sample(|t| f(a * t + b)), &grid).unwrap(), &grid, 4.0);
        prop_assert!((moved - base).abs() <= 1e-8 * base);
    }
}
