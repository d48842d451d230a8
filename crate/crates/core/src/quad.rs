//! Quadrature rules and a reproducible summation.

use alloc::vec;
use alloc::vec::Vec;

/// Gauss–Legendre rule on `[-1, 1]`: `(nodes, weights)`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// A rule on a finite interval: `∫_a^b f ≈ Σ w_i f(t_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss(a: f64, b: f64, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        Rule { nodes: x.iter().map(|&xi| c + h * xi).collect(), weights: w.iter().map(|&wi| h * wi).collect() }
    }

    /// Composite Gauss rule over `panels` equal subintervals.
    pub fn composite_gauss(a: f64, b: f64, panels: usize, n: usize) -> Self {
        let mut rule = Rule { nodes: Vec::new(), weights: Vec::new() };
        let h = (b - a) / panels as f64;
        for k in 0..panels {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == panels { b } else { lo + h };
            rule.extend(&Rule::gauss(lo, hi, n));
        }
        rule
    }

    /// Composite midpoint rule with `n` cells.
    pub fn midpoint(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        Rule { nodes: (0..n).map(|i| a + (i as f64 + 0.5) * h).collect(), weights: vec![h; n] }
    }

    pub fn extend(&mut self, other: &Rule) {
        self.nodes.extend_from_slice(&other.nodes);
        self.weights.extend_from_slice(&other.weights);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, never on how work was split.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}
