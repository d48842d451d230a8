//! Polynomial curves `γ: R → R^d` and the affine-invariant quantities built
//! from them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{self, Matrix};
use crate::poly::{poly_det, poly_det_bound, Polynomial, MAX_DEGREE};

pub const MAX_DIM: usize = 8;

/// Coefficients of the torsion polynomial below this multiple of the
/// cofactor-expansion magnitude bound are rounding noise.
const TORSION_NOISE: f64 = 64.0 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    components: Vec<Polynomial>,
}

impl PolyCurve {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let d = components.len();
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::Dimension { d });
        }
        if let Some(degree) = components.iter().filter_map(Polynomial::degree).find(|&k| k > MAX_DEGREE) {
            return Err(Error::Degree { degree });
        }
        Ok(PolyCurve { components })
    }

    /// Builds a curve from ascending coefficient lists.
    pub fn from_coeffs(components: &[&[f64]]) -> Result<Self> {
        Self::new(components.iter().map(|c| Polynomial::new(c.to_vec())).collect())
    }

    /// `(t, t²/2!, …, t^d/d!)`, the curve with torsion identically one.
    pub fn moment(d: usize) -> Result<Self> {
        let mut fact = 1.0;
        let comps = (1..=d)
            .map(|j| {
                fact *= j as f64;
                Polynomial::monomial(1.0 / fact, j)
            })
            .collect();
        Self::new(comps)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn max_degree(&self) -> usize {
        self.components.iter().filter_map(Polynomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(t)).collect()
    }

    /// `γ^{(order)}(t)`
    pub fn derivative_at(&self, t: f64, order: usize) -> Vec<f64> {
        self.components.iter().map(|c| c.derivative(order).eval(t)).collect()
    }

    pub fn derivative_curve(&self, order: usize) -> Vec<Polynomial> {
        self.components.iter().map(|c| c.derivative(order)).collect()
    }

    /// `d(d+1)/2`, the homogeneity degree of the torsion.
    pub fn torsion_weight(&self) -> usize {
        let d = self.dim();
        d * (d + 1) / 2
    }

    /// `L(t) = det(γ'(t), …, γ^{(d)}(t))` as an exact polynomial (up to
    /// coefficient rounding, which is cleaned against the expansion bound).
    pub fn torsion_poly(&self) -> Polynomial {
        let d = self.dim();
        let m: Vec<Vec<Polynomial>> = (0..d).map(|i| (1..=d).map(|j| self.components[i].derivative(j)).collect()).collect();
        let det = poly_det(&m);
        let bound = poly_det_bound(&m);
        det.clean_against(&bound, TORSION_NOISE * d as f64)
    }

    pub fn is_degenerate(&self) -> bool {
        self.torsion_poly().is_zero()
    }

    /// `|L(t)|^{2/(d(d+1))}`
    pub fn affine_arclength(&self, t: f64) -> f64 {
        arclength_from_torsion(self.torsion_poly().eval(t), self.dim())
    }

    /// `J(t_1, …, t_d) = det(γ'(t_1), …, γ'(t_d))`
    pub fn jacobian_j(&self, ts: &[f64]) -> f64 {
        assert_eq!(ts.len(), self.dim(), "jacobian_j needs d points");
        let cols: Vec<Vec<f64>> = ts.iter().map(|&t| self.derivative_at(t, 1)).collect();
        linalg::det(&linalg::from_columns(&cols))
    }

    /// `J(t)/v(t)` with `v(t) = ∏_{i<j}(t_j − t_i)`, computed from Newton
    /// divided differences of `γ'` so no cancellation occurs for nearby
    /// points.
    pub fn j_vandermonde_factor(&self, ts: &[f64]) -> Result<f64> {
        let d = self.dim();
        if ts.len() != d {
            return Err(Error::invalid("j_vandermonde_factor needs d points"));
        }
        for i in 0..d {
            for j in i + 1..d {
                if ts[i] == ts[j] {
                    return Err(Error::CoincidentPoints);
                }
            }
        }
        Ok(self.divided_difference_det(ts))
    }

    /// det of the columns `γ'[t_1], γ'[t_1,t_2], …, γ'[t_1,…,t_d]`. At a
    /// diagonal point this is `L(s)/∏_{j<d} j!`.
    pub(crate) fn divided_difference_det(&self, ts: &[f64]) -> f64 {
        let d = self.dim();
        let mut cols = vec![vec![0.0; d]; d];
        for (i, comp) in self.components.iter().enumerate() {
            let mut p = comp.derivative(1);
            for (k, &t) in ts.iter().enumerate() {
                cols[k][i] = p.eval(t);
                p = p.deflate_at(t);
            }
        }
        linalg::det(&linalg::from_columns(&cols))
    }

    /// `det(γ^{(n_1)}(t), …, γ^{(n_d)}(t))` for arbitrary derivative orders.
    pub fn derivative_minor(&self, orders: &[usize], t: f64) -> f64 {
        let cols: Vec<Vec<f64>> = orders.iter().map(|&n| self.derivative_at(t, n)).collect();
        linalg::det(&linalg::from_columns(&cols))
    }

    pub fn apply_affine(&self, map: &AffineMap) -> PolyCurve {
        let d = self.dim();
        assert_eq!(map.dim(), d, "affine map dimension mismatch");
        let comps = (0..d)
            .map(|i| {
                let mut acc = Polynomial::constant(map.translation[i]);
                for j in 0..d {
                    acc = &acc + &self.components[j].scale(map.matrix[(i, j)]);
                }
                acc
            })
            .collect();
        PolyCurve { components: comps }
    }

    /// `t ↦ γ(a·t + b)`
    pub fn reparametrize(&self, a: f64, b: f64) -> Result<PolyCurve> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::invalid("reparametrization slope must be nonzero"));
        }
        Ok(PolyCurve { components: self.components.iter().map(|c| c.compose_affine(a, b)).collect() })
    }

    /// Moves `t0` to the origin and applies `A x = D^{-1}(x − γ(t0))`, where
    /// `D = [γ'(t0) ⋯ γ^{(d)}(t0)]`, so the result `Γ` has `Γ(0) = 0` and
    /// `Γ^{(j)}(0) = e_j`. The returned map has `det A = 1/L(t0)` and acts on
    /// the shifted curve `t ↦ γ(t + t0)`.
    pub fn normalize_at(&self, t0: f64) -> Result<(AffineMap, PolyCurve)> {
        let d = self.dim();
        if self.torsion_poly().eval(t0) == 0.0 {
            return Err(Error::SingularPoint { t: t0 });
        }
        let cols: Vec<Vec<f64>> = (1..=d).map(|j| self.derivative_at(t0, j)).collect();
        let inv = linalg::inverse(&linalg::from_columns(&cols)).ok_or(Error::SingularPoint { t: t0 })?;
        let base = self.eval(t0);
        let translation: Vec<f64> = linalg::mat_vec(&inv, &base).into_iter().map(|x| -x).collect();
        let map = AffineMap::new(inv, translation)?;
        let shifted = self.reparametrize(1.0, t0)?;
        let mut normalized = shifted.apply_affine(&map);
        // γ(t0) is subtracted exactly in exact arithmetic; drop the residue.
        for c in normalized.components.iter_mut() {
            let mut coeffs = c.coeffs().to_vec();
            if let Some(c0) = coeffs.first_mut() {
                *c0 = 0.0;
            }
            *c = Polynomial::new(coeffs);
        }
        Ok((map, normalized))
    }

    /// `Γ(t) = (δ^{-1}γ_1(δt), …, δ^{-d}γ_d(δt))`. Then `L_Γ(t) = L_γ(δt)`,
    /// and a derivative minor of orders `n_1 < … < n_d` picks up the factor
    /// `δ^{Σn_i − d(d+1)/2}`.
    pub fn anisotropic_rescale(&self, delta: f64) -> Result<PolyCurve> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::invalid("rescale factor must be positive"));
        }
        let comps =
            self.components.iter().enumerate().map(|(i, c)| c.compose_affine(delta, 0.0).scale(delta.powi(-(i as i32 + 1)))).collect();
        Ok(PolyCurve { components: comps })
    }

    /// The averaged curve `γ_h(t) = (1/K)Σ_j γ(t + h_j)` and its interval
    /// `I_h = ∩_j (I − h_j)`, which may be empty.
    pub fn offspring(&self, spec: &OffspringSpec) -> Result<(PolyCurve, Interval)> {
        let k = spec.shifts.len();
        if k == 0 {
            return Err(Error::invalid("offspring needs at least one shift"));
        }
        let comps = self
            .components
            .iter()
            .map(|c| {
                let sum = spec.shifts.iter().fold(Polynomial::zero(), |acc, &h| &acc + &c.compose_affine(1.0, h));
                sum.scale(1.0 / k as f64)
            })
            .collect();
        Ok((PolyCurve { components: comps }, spec.interval()))
    }
}

pub(crate) fn arclength_from_torsion(l: f64, d: usize) -> f64 {
    l.abs().powf(2.0 / (d * (d + 1)) as f64)
}

/// `∏_{i<j}(t_j − t_i)`
pub fn vandermonde(ts: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            v *= ts[j] - ts[i];
        }
    }
    v
}

/// Lower unit-triangular `A_h` with `(A_h)_{ij} = (1/K)Σ_k h_k^{i−j}/(i−j)!`
/// for `i ≥ j`. It maps the moment curve to its offspring minus the mean of
/// the moment curve at the shifts.
pub fn offspring_correction_matrix(h: &[f64], d: usize) -> Matrix {
    let k = h.len().max(1) as f64;
    Matrix::from_fn(d, d, |i, j| {
        if i < j {
            0.0
        } else {
            let e = (i - j) as i32;
            let fact: f64 = (1..=(i - j)).map(|x| x as f64).product();
            h.iter().map(|&hk| hk.powi(e) / fact).sum::<f64>() / k
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    matrix: Matrix,
    translation: Vec<f64>,
    det: f64,
}

impl AffineMap {
    pub fn new(matrix: Matrix, translation: Vec<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != translation.len() {
            return Err(Error::invalid("affine map needs a square matrix matching the translation"));
        }
        let det = linalg::det(&matrix);
        Ok(AffineMap { matrix, translation, det })
    }

    pub fn linear(matrix: Matrix) -> Result<Self> {
        let d = matrix.nrows();
        Self::new(matrix, vec![0.0; d])
    }

    pub fn identity(d: usize) -> Self {
        AffineMap { matrix: Matrix::identity(d, d), translation: vec![0.0; d], det: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn is_invertible(&self) -> bool {
        self.det != 0.0
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.matrix, x).iter().zip(&self.translation).map(|(a, b)| a + b).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OffspringSpec {
    pub shifts: Vec<f64>,
    pub base: Interval,
}

impl OffspringSpec {
    pub fn new(shifts: Vec<f64>, base: Interval) -> Self {
        OffspringSpec { shifts, base }
    }

    /// `I_h = ∩_j (I − h_j)`
    pub fn interval(&self) -> Interval {
        self.shifts.iter().fold(Interval::real_line(), |acc, &h| acc.intersect(&self.base.shift(h)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn curve(exprs: &[&str]) -> PolyCurve {
        PolyCurve::new(exprs.iter().map(|e| parse_poly(e).unwrap()).collect()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(PolyCurve::moment(3).unwrap().torsion_poly(), Polynomial::constant(1.0));
        assert_eq!(curve(&["t", "t^2", "t^3"]).torsion_poly(), Polynomial::constant(12.0));
        assert_eq!(curve(&["t", "t^2", "t^4"]).torsion_poly(), Polynomial::new(vec![0.0, 48.0]));
        assert!(curve(&["t", "2t"]).is_degenerate());
        assert!(curve(&["t", "t^2", "t + t^2"]).is_degenerate());
    }

    #[test]
    fn torsion_degree_bound() {
        let c = curve(&["t^3 + t", "t^4 - t^2", "t^5 + 2t^3 + 1"]);
        let (d, n) = (3, 5);
        assert!(c.torsion_poly().degree().unwrap() <= d * n - d * (d + 1) / 2);
    }

    #[test]
    fn arclength_examples() {
        assert!(close(PolyCurve::moment(3).unwrap().affine_arclength(0.7), 1.0, 1e-15));
        assert!(close(curve(&["t", "t^2"]).affine_arclength(-3.0), 2f64.powf(1.0 / 3.0), 1e-15));
        assert_eq!(curve(&["t", "t^2", "t^4"]).affine_arclength(0.0), 0.0);
    }

    #[test]
    fn jacobian_and_vandermonde() {
        let par = curve(&["t", "t^2"]);
        assert!(close(par.jacobian_j(&[0.0, 1.0]), 2.0, 1e-15));
        assert_eq!(par.jacobian_j(&[0.4, 0.4]), 0.0);
        assert!(close(par.jacobian_j(&[0.3, 1.1]), -par.jacobian_j(&[1.1, 0.3]), 1e-15));
        assert_eq!(vandermonde(&[0.0, 1.0, 2.0]), 2.0);
        assert_eq!(vandermonde(&[0.5, 0.5, 3.0]), 0.0);
        assert_eq!(vandermonde(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn vandermonde_factor_examples() {
        let par = curve(&["t", "t^2"]);
        assert!(close(par.j_vandermonde_factor(&[-0.3, 2.5]).unwrap(), 2.0, 1e-14));
        let m3 = PolyCurve::moment(3).unwrap();
        assert!(close(m3.j_vandermonde_factor(&[0.1, -2.0, 1.3]).unwrap(), 0.5, 1e-13));
        assert_eq!(par.j_vandermonde_factor(&[1.0, 1.0]), Err(Error::CoincidentPoints));
        // Two routes agree: J = P·v.
        let c = curve(&["t + t^3", "t^2 - t^4", "t^5"]);
        let ts = [0.2, -0.9, 1.4];
        let p = c.j_vandermonde_factor(&ts).unwrap();
        assert!(close(c.jacobian_j(&ts), p * vandermonde(&ts), 1e-12));
    }

    #[test]
    fn vandermonde_factor_diagonal_limit() {
        let c = curve(&["t + t^3", "t^2 - t^4", "t^5"]);
        let s = 0.6;
        let target = c.torsion_poly().eval(s) / 2.0; // 0!·1!·2!
        let mut prev = f64::INFINITY;
        for e in [1e-2, 1e-3, 1e-4] {
            let err = (c.j_vandermonde_factor(&[s + e, s - 0.5 * e, s + 0.3 * e]).unwrap() - target).abs();
            assert!(err < prev);
            assert!(err < 50.0 * e, "{err} at {e}");
            prev = err;
        }
    }

    #[test]
    fn affine_examples() {
        let par = curve(&["t", "t^2"]);
        assert_eq!(par.apply_affine(&AffineMap::identity(2)), par);
        let m = AffineMap::linear(Matrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(par.apply_affine(&m), curve(&["2t", "t^2"]));
        let m = AffineMap::new(Matrix::from_row_slice(2, 2, &[1.0, 3.0, -2.0, 0.5]), vec![1.0, -4.0]).unwrap();
        let lhs = par.apply_affine(&m).torsion_poly();
        let rhs = par.torsion_poly().scale(m.det());
        assert!(close(lhs.coeff(0), rhs.coeff(0), 1e-14));
    }

    #[test]
    fn reparametrize_examples() {
        let par = curve(&["t", "t^2"]);
        assert_eq!(par.reparametrize(1.0, 0.0).unwrap(), par);
        let r = par.reparametrize(2.0, 0.0).unwrap();
        assert_eq!(r, curve(&["2t", "4t^2"]));
        assert_eq!(r.torsion_poly(), Polynomial::constant(16.0));
        assert!(par.reparametrize(0.0, 1.0).is_err());
        let c = curve(&["t", "t^2", "t^4"]);
        let (a, b) = (-1.5, 0.25);
        let r = c.reparametrize(a, b).unwrap();
        for t in [-1.0, 0.3, 2.0] {
            assert!(close(r.affine_arclength(t), a.abs() * c.affine_arclength(a * t + b), 1e-12));
        }
    }

    #[test]
    fn normalize_examples() {
        let m3 = PolyCurve::moment(3).unwrap();
        let (map, g) = m3.normalize_at(0.0).unwrap();
        assert!((map.matrix() - Matrix::identity(3, 3)).norm() < 1e-15);
        assert_eq!(g, m3);

        let (_, g) = curve(&["t", "t^2"]).normalize_at(0.0).unwrap();
        assert_eq!(g, curve(&["t", "t^2/2"]));

        let c = curve(&["t", "t^2", "t^3"]);
        let (map, g) = c.normalize_at(1.0).unwrap();
        assert!(close(map.det(), 1.0 / 12.0, 1e-14));
        for j in 1..=3 {
            let dj = g.derivative_at(0.0, j);
            for (i, v) in dj.iter().enumerate() {
                assert!((v - if i + 1 == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        assert!(g.eval(0.0).iter().all(|v| *v == 0.0));
        assert!(close(g.torsion_poly().eval(0.0), 1.0, 1e-10));
        assert!(matches!(curve(&["t", "t^2", "t^4"]).normalize_at(0.0), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn rescale_examples() {
        let c = curve(&["t", "t^2", "t^4"]);
        assert_eq!(c.anisotropic_rescale(1.0).unwrap(), c);
        let m = PolyCurve::moment(4).unwrap();
        let r = m.anisotropic_rescale(0.3).unwrap();
        for (a, b) in r.components().iter().zip(m.components()) {
            for k in 0..=4 {
                assert!(close(a.coeff(k), b.coeff(k), 1e-14));
            }
        }
        let g = c.anisotropic_rescale(0.5).unwrap();
        assert_eq!(g, curve(&["t", "t^2", "t^4/2"]));
        // L_Γ(t) = L_γ(δt); the (1,2,4) minor carries the excess factor δ^1.
        assert_eq!(g.torsion_poly(), Polynomial::new(vec![0.0, 24.0]));
        for t in [-0.7, 0.4, 1.9] {
            assert!(close(g.derivative_minor(&[1, 2, 4], t), 0.5 * c.derivative_minor(&[1, 2, 4], 0.5 * t), 1e-12));
        }
        assert!(c.anisotropic_rescale(0.0).is_err());
    }

    #[test]
    fn offspring_examples() {
        let par = curve(&["t", "t^2"]);
        let base = Interval::closed(0.0, 1.0);
        let (g, iv) = par.offspring(&OffspringSpec::new(vec![0.0], base)).unwrap();
        assert_eq!(g, par);
        assert_eq!(iv, base);

        let h = 0.7;
        let (g, _) = par.offspring(&OffspringSpec::new(vec![0.0, h], base)).unwrap();
        let expect = curve(&["t + 0.35", "t^2 + 0.7t + 0.245"]);
        for (a, b) in g.components().iter().zip(expect.components()) {
            for k in 0..=2 {
                assert!(close(a.coeff(k), b.coeff(k), 1e-14));
            }
        }
        assert_eq!(g.torsion_poly(), Polynomial::constant(2.0));

        let (_, iv) = par.offspring(&OffspringSpec::new(vec![0.0, 0.5], base)).unwrap();
        assert_eq!(iv, Interval::closed(-0.5, 0.5).intersect(&Interval::closed(0.0, 1.0)));
        assert!(par.offspring(&OffspringSpec::new(vec![], base)).is_err());
        let (_, iv) = par.offspring(&OffspringSpec::new(vec![0.0, 3.0], base)).unwrap();
        assert!(iv.is_empty());
    }

    #[test]
    fn offspring_interval_matches_spec_example() {
        // I = [0,1], h = (0, 0.5): I_h = [0,1] ∩ [−0.5, 0.5] = [0, 0.5].
        let iv = OffspringSpec::new(vec![0.0, 0.5], Interval::closed(0.0, 1.0)).interval();
        assert_eq!(iv, Interval::closed(0.0, 0.5));
    }

    #[test]
    fn correction_matrix() {
        assert_eq!(offspring_correction_matrix(&[0.0], 3), Matrix::identity(3, 3));
        assert_eq!(offspring_correction_matrix(&[0.0, 1.0], 2), Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 1.0]));
        let h = [0.0, 0.13, 0.4];
        let a = offspring_correction_matrix(&h, 4);
        assert!(close(linalg::det(&a), 1.0, 1e-15));
        // A_h m(t) = mean_k m(t + h_k) − mean_k m(h_k) for the moment curve m.
        let m = PolyCurve::moment(4).unwrap();
        let t = 0.77;
        let lhs = linalg::mat_vec(&a, &m.eval(t));
        for i in 0..4 {
            let rhs: f64 = h.iter().map(|&hk| m.eval(t + hk)[i] - m.eval(hk)[i]).sum::<f64>() / 3.0;
            assert!(close(lhs[i], rhs, 1e-13));
        }
    }

    #[test]
    fn moment_offspring_keeps_torsion() {
        let m = PolyCurve::moment(4).unwrap();
        let (g, _) = m.offspring(&OffspringSpec::new(vec![0.0, 0.3, -1.2], Interval::real_line())).unwrap();
        assert_eq!(g.torsion_poly(), Polynomial::constant(1.0));
    }

    #[test]
    fn constructor_limits() {
        assert_eq!(PolyCurve::new(vec![Polynomial::zero()]), Err(Error::Dimension { d: 1 }));
        assert!(PolyCurve::new(vec![Polynomial::monomial(1.0, 17), Polynomial::zero()]).is_err());
    }
}
