//! Sampled checks of the inequalities behind the restriction estimates:
//! the geometric inequality, offspring torsion, injectivity of the sum map,
//! frequency bands, multilinear forms, convolution densities and the
//! multilinear decay fit.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::curve::{arclength_from_torsion, OffspringSpec, PolyCurve};
use crate::decompose::{level_sets_of, DecompositionPiece, FirstCoordCertificate, ROOT_TOL};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::fit::linear_fit;
use crate::interval::Interval;
use crate::oscillatory::{grid_norm, Extension, GridSpec};
use crate::poly::{real_roots, Polynomial};
use crate::quad::{gauss_legendre, pairwise_sum, Rule};
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct RatioScanReport {
    pub min_ratio: f64,
    pub argmin: Vec<f64>,
    pub samples: usize,
    /// `(samples so far, running minimum)` at powers of two and at the end.
    pub history: Vec<(usize, f64)>,
}

fn require_bounded(iv: &Interval) -> Result<()> {
    if !iv.is_bounded() || iv.is_empty() || iv.length() == 0.0 {
        return Err(Error::invalid("piece must be a bounded interval of positive length"));
    }
    Ok(())
}

/// Errors unless the torsion is free of zeros inside the open interval.
fn require_nonvanishing(l: &Polynomial, iv: &Interval) -> Result<()> {
    if l.is_zero() {
        return Err(Error::DegenerateTorsion);
    }
    if let Some(t) = real_roots(l, ROOT_TOL)?.into_iter().find(|&t| iv.interior_contains(t)) {
        return Err(Error::SingularPoint { t });
    }
    Ok(())
}

/// Minimum over random tuples in `piece` of
/// `|J(t)| / (∏|L(t_j)|^{1/d} · |v(t)|)`, computed through the divided
/// difference form of `J/v`.
pub fn geometric_ratio_scan(curve: &PolyCurve, piece: Interval, samples: usize, seed: u64) -> Result<RatioScanReport> {
    let d = curve.dim();
    require_bounded(&piece)?;
    if samples < d {
        return Err(Error::invalid("need at least d samples"));
    }
    let l = curve.torsion_poly();
    require_nonvanishing(&l, &piece)?;

    let mut rng = rng::stream(seed, 0);
    let mut min_ratio = f64::INFINITY;
    let mut argmin = vec![0.0; d];
    let mut history = Vec::new();
    let mut ts = vec![0.0; d];
    for s in 1..=samples {
        for t in ts.iter_mut() {
            *t = rng::uniform(&mut rng, piece.lo, piece.hi);
        }
        if let Ok(p) = curve.j_vandermonde_factor(&ts) {
            let lprod: f64 = ts.iter().map(|&t| l.eval(t).abs().powf(1.0 / d as f64)).product();
            let r = p.abs() / lprod;
            if r.is_finite() && r < min_ratio {
                min_ratio = r;
                argmin.copy_from_slice(&ts);
            }
        }
        if s.is_power_of_two() || s == samples {
            history.push((s, min_ratio));
        }
    }
    Ok(RatioScanReport { min_ratio, argmin, samples, history })
}

/// Largest `|L_{γ_h}(t) − 1|` over random offspring with `K ≤ 4` shifts in
/// `[0, 2δ]` and `t ∈ [−δ, δ]`, for a curve normalized at `0`. The base
/// interval is `[−3δ, 3δ]`, so `I_h` always contains `[−δ, δ]`.
pub fn offspring_torsion_check(curve: &PolyCurve, delta: f64, trials: usize, seed: u64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("δ must lie in (0, 1)"));
    }
    let d = curve.dim();
    let mut deviation = 0.0f64;
    for (i, c) in curve.components().iter().enumerate() {
        deviation = deviation.max(c.eval(0.0).abs());
        for j in 1..=d {
            let target = if i + 1 == j { 1.0 } else { 0.0 };
            deviation = deviation.max((c.derivative(j).eval(0.0) - target).abs());
        }
    }
    if deviation > 1e-9 {
        return Err(Error::NotNormalized { deviation });
    }

    let base = Interval::closed(-3.0 * delta, 3.0 * delta);
    let window = Interval::closed(-delta, delta);
    let mut rng = rng::stream(seed, 0);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let k = rng.random_range(1..=4usize);
        let shifts: Vec<f64> = (0..k).map(|_| 2.0 * delta * rng.random::<f64>()).collect();
        let spec = OffspringSpec::new(shifts, base);
        let (child, ih) = curve.offspring(&spec)?;
        let l = child.torsion_poly();
        let iv = ih.intersect(&window);
        for _ in 0..8 {
            let u: f64 = rng.random();
            if iv.is_empty() {
                continue;
            }
            let t = iv.lo + u * (iv.hi - iv.lo);
            worst = worst.max((l.eval(t) - 1.0).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InjectivityReport {
    /// Smallest `‖Φ(s) − Φ(t)‖ / ‖s − t‖` over sampled pairs.
    pub min_gap: f64,
    pub witness: (Vec<f64>, Vec<f64>),
    pub samples: usize,
}

/// Probes `Φ(t) = Σ_j γ(t_j)` on sampled increasing tuples in `piece`.
pub fn injectivity_probe(curve: &PolyCurve, piece: Interval, samples: usize, seed: u64) -> Result<InjectivityReport> {
    require_bounded(&piece)?;
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let d = curve.dim();
    let mut rng = rng::stream(seed, 0);
    let tuples: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let mut t: Vec<f64> = (0..d).map(|_| rng::uniform(&mut rng, piece.lo, piece.hi)).collect();
            t.sort_by(f64::total_cmp);
            t
        })
        .collect();
    let images: Vec<Vec<f64>> = tuples
        .iter()
        .map(|t| {
            let mut acc = vec![0.0; d];
            for &tj in t {
                for (a, g) in acc.iter_mut().zip(curve.eval(tj)) {
                    *a += g;
                }
            }
            acc
        })
        .collect();
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let mut best = (f64::INFINITY, 0, 1);
    for i in 0..samples {
        for j in i + 1..samples {
            let den = dist(&tuples[i], &tuples[j]);
            if den == 0.0 {
                continue;
            }
            let r = dist(&images[i], &images[j]) / den;
            if r < best.0 {
                best = (r, i, j);
            }
        }
    }
    Ok(InjectivityReport { min_gap: best.0, witness: (tuples[best.1].clone(), tuples[best.2].clone()), samples })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyBand {
    pub n: i32,
    pub lo: f64,
    pub hi: f64,
    /// max/min of `|γ₁(s)| / s^{ℓ+1}` over the dyadic piece, after
    /// normalization.
    pub comparability: f64,
}

/// Range of `|γ₁|` over the dyadic piece `{2^n ≤ |t − b| < 2^{n+1}}` of a
/// curve piece, after reflecting so the piece lies right of its center
/// `b`, translating `b` to `0`, subtracting `γ₁` at the piece endpoint
/// nearest `b` and dividing by the certificate constant `B`. With
/// `|γ₁'| ∼ |s|^ℓ` the band sits at `|ξ₁| ∼ 2^{n(ℓ+1)}`.
pub fn freq_band_check(curve: &PolyCurve, piece: &DecompositionPiece, cert: &FirstCoordCertificate, n: i32) -> Result<FrequencyBand> {
    let c = cert.center;
    if c.im != 0.0 {
        return Err(Error::ComplexCenter { re: c.re, im: c.im });
    }
    let b = c.re;
    let iv = piece.interval;
    if iv.interior_contains(b) {
        return Err(Error::CenterInterior { center: b });
    }
    let right = b <= iv.lo;
    let sign = if right { 1.0 } else { -1.0 };
    // s = sign·(t − b) ≥ 0 on the piece.
    let (s_lo, s_hi) = if right { (iv.lo - b, iv.hi - b) } else { (b - iv.hi, b - iv.lo) };
    let g1 = curve.component(0).compose_affine(sign, b);
    let g = (&g1 - &Polynomial::constant(g1.eval(s_lo))).scale(1.0 / cert.b);

    let band = Interval::half_open(2f64.powi(n), 2f64.powi(n + 1)).intersect(&Interval::closed(s_lo, s_hi));
    if band.is_empty() || band.length() == 0.0 {
        return Err(Error::EmptyPiece);
    }
    let mut cands = vec![band.lo, band.hi];
    cands.extend(real_roots(&g.derivative(1), ROOT_TOL)?.into_iter().filter(|&s| band.interior_contains(s)));
    cands.extend(real_roots(&g, ROOT_TOL)?.into_iter().filter(|&s| band.interior_contains(s)));
    let vals: Vec<f64> = cands.iter().map(|&s| g.eval(s).abs()).collect();
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(0.0, f64::max);

    let e = cert.ell as i32 + 1;
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    for s in band.probe_points(256, 1.0) {
        let r = g.eval(s).abs() / s.powi(e);
        rmin = rmin.min(r);
        rmax = rmax.max(r);
    }
    Ok(FrequencyBand { n, lo, hi, comparability: rmax / rmin })
}

// ---------------------------------------------------------------------------
// Multilinear forms

/// Halvings in the geometric grading toward a panel endpoint.
const GRADING_LEVELS: usize = 12;

/// `∫_0^U h(u) du` on geometrically graded panels toward `u = 0`, which
/// absorbs the logarithmic behaviour left after the power substitution.
fn graded<F: FnMut(f64) -> f64>(upper: f64, x: &[f64], w: &[f64], mut h: F) -> f64 {
    let mut total = 0.0;
    let mut hi = upper;
    for level in 0..=GRADING_LEVELS {
        let lo = if level == GRADING_LEVELS { 0.0 } else { 0.5 * hi };
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += x.iter().zip(w).map(|(&xi, &wi)| wi * r * h(c + r * xi)).sum::<f64>();
        hi = lo;
    }
    total
}

/// `∫_lo^hi h(t) ∏_{s ∈ sing} |t − s|^{−α} dt` for smooth `h`. The interval
/// is cut at the singular points and at midpoints between cuts; near a
/// singular endpoint `e` the substitution `u = |t − e|^{1−α}` turns the
/// local factor into the constant `1/(1 − α)`.
fn singular_integral<F: FnMut(f64) -> f64>(lo: f64, hi: f64, sing: &[f64], alpha: f64, nodes: usize, mut h: F) -> f64 {
    let (x, w) = gauss_legendre(nodes);
    let mut cuts: Vec<f64> = sing.iter().copied().filter(|&s| s > lo && s < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let is_sing = |p: f64| sing.contains(&p);
    let beta = 1.0 / (1.0 - alpha);
    let mut total = 0.0;
    for win in cuts.windows(2) {
        let (a, b) = (win[0], win[1]);
        let m = 0.5 * (a + b);
        for (e, far, dir) in [(a, m, 1.0), (b, m, -1.0)] {
            let len = (far - e).abs();
            if len == 0.0 {
                continue;
            }
            if is_sing(e) {
                // Distances are formed from the offset so nearby singular
                // points stay resolved below the spacing of floats near t.
                let others =
                    |delta: f64| sing.iter().filter(|&&s| s != e).map(|&s| ((e - s) + dir * delta).abs().powf(-alpha)).product::<f64>();
                total += beta
                    * graded(len.powf(1.0 - alpha), &x, &w, |u| {
                        let delta = u.powf(beta);
                        h(e + dir * delta) * others(delta)
                    });
            } else {
                let kernel = |t: f64| sing.iter().map(|&s| (t - s).abs().powf(-alpha)).product::<f64>();
                total += graded(len, &x, &w, |u| {
                    let t = e + dir * u;
                    h(t) * kernel(t)
                });
            }
        }
    }
    total
}

/// `T_ℓ(g) = ∫ ∏ g_i(t_i)^{(d+1)/d} λ(t_i)^{(d+1)/(2d)} ∏_{i<j} |t_i − t_j|^{−1/d} dt`
/// for `ℓ ≤ 3` nonnegative functions with bounded supports. `quad_nodes` is
/// the Gauss order per panel.
pub fn multilinear_t(curve: &PolyCurve, g: &[&dyn Fn(f64) -> f64], supports: &[Interval], quad_nodes: usize) -> Result<f64> {
    let ell = g.len();
    if ell == 0 || ell > 3 {
        return Err(Error::invalid("multilinear forms are implemented for 1 ≤ ℓ ≤ 3"));
    }
    if supports.len() != ell {
        return Err(Error::invalid("one support per function"));
    }
    if supports.iter().any(|s| !s.is_bounded()) {
        return Err(Error::invalid("supports must be bounded"));
    }
    let d = curve.dim();
    let df = d as f64;
    let l = curve.torsion_poly();
    let alpha = 1.0 / df;
    let weight = |i: usize, t: f64| -> f64 {
        let gv = g[i](t);
        if gv <= 0.0 {
            return 0.0;
        }
        gv.powf((df + 1.0) / df) * arclength_from_torsion(l.eval(t), d).powf((df + 1.0) / (2.0 * df))
    };
    let n = quad_nodes.max(2);
    let sup = |i: usize| (supports[i].lo, supports[i].hi);
    // Cut the outer variable where the inner supports begin and end so the
    // outer integrand is smooth on each panel.
    let outer_cuts: Vec<f64> = supports[1..].iter().flat_map(|s| [s.lo, s.hi]).collect();
    let value = match ell {
        1 => {
            let (a, b) = sup(0);
            singular_integral(a, b, &[], 0.0, n, |t| weight(0, t))
        }
        2 => {
            let (a, b) = sup(0);
            let (a2, b2) = sup(1);
            piecewise(a, b, &outer_cuts, n, |t1| weight(0, t1) * singular_integral(a2, b2, &[t1], alpha, n, |t2| weight(1, t2)))
        }
        _ => {
            let (a, b) = sup(0);
            let (a2, b2) = sup(1);
            let (a3, b3) = sup(2);
            piecewise(a, b, &outer_cuts, n, |t1| {
                let w1 = weight(0, t1);
                if w1 == 0.0 {
                    return 0.0;
                }
                w1 * singular_integral(a2, b2, &[t1], alpha, n, |t2| {
                    let w2 = weight(1, t2);
                    if w2 == 0.0 {
                        return 0.0;
                    }
                    w2 * singular_integral(a3, b3, &[t1, t2], alpha, n, |t3| weight(2, t3))
                })
            })
        }
    };
    Ok(value)
}

/// Graded Gauss quadrature on `[a, b]` cut at the interior points of `cuts`,
/// refined toward every cut and both ends.
fn piecewise<F: FnMut(f64) -> f64>(a: f64, b: f64, cuts: &[f64], nodes: usize, mut h: F) -> f64 {
    let mut ends: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    ends.extend([a, b]);
    singular_integral(a, b, &ends, 0.0, nodes, &mut h)
}

// ---------------------------------------------------------------------------
// Convolution densities in the plane

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvolutionDensity {
    /// Contribution of the solution with `t₁ < t₂`.
    pub ordered: f64,
    /// Sum over both orderings of the solution pair.
    pub total: f64,
    /// `ξ` lies on the fold `J = 0`.
    pub singular: bool,
}

/// Splits a degree-two planar curve as `γ(t) = c₀ + c₁t + c₂t²` and returns
/// `(c₀, [c₁ c₂]^{-1}, det[c₁ c₂])`.
fn quadratic_frame(curve: &PolyCurve) -> Result<([f64; 2], [[f64; 2]; 2], f64)> {
    if curve.dim() != 2 {
        return Err(Error::Dimension { d: curve.dim() });
    }
    if curve.max_degree() > 2 {
        return Err(Error::Degree { degree: curve.max_degree() });
    }
    let c = |i: usize, k: usize| curve.component(i).coeff(k);
    let det = c(0, 1) * c(1, 2) - c(0, 2) * c(1, 1);
    if det == 0.0 {
        return Err(Error::DegenerateTorsion);
    }
    let inv = [[c(1, 2) / det, -c(0, 2) / det], [-c(1, 1) / det, c(0, 1) / det]];
    Ok(([c(0, 0), c(1, 0)], inv, det))
}

/// Density at `ξ` of the push-forward of `f(t₁)f(t₂)λ(t₁)λ(t₂) dt₁dt₂` under
/// `Φ(t₁, t₂) = γ(t₁) + γ(t₂)`, for a nondegenerate curve of degree two.
pub fn convolution_density_2d<F: Fn(f64) -> f64>(curve: &PolyCurve, f: F, xi: [f64; 2]) -> Result<ConvolutionDensity> {
    let (c0, inv, _) = quadratic_frame(curve)?;
    let r = [xi[0] - 2.0 * c0[0], xi[1] - 2.0 * c0[1]];
    let s1 = inv[0][0] * r[0] + inv[0][1] * r[1];
    let s2 = inv[1][0] * r[0] + inv[1][1] * r[1];
    let disc = 2.0 * s2 - s1 * s1;
    let scale = 1e-12 * (1.0 + s1 * s1 + s2.abs());
    if disc.abs() <= scale {
        return Ok(ConvolutionDensity { ordered: 0.0, total: 0.0, singular: true });
    }
    if disc < 0.0 {
        return Ok(ConvolutionDensity { ordered: 0.0, total: 0.0, singular: false });
    }
    let h = 0.5 * disc.sqrt();
    let (t1, t2) = (0.5 * s1 - h, 0.5 * s1 + h);
    let l = curve.torsion_poly();
    let lam = |t: f64| arclength_from_torsion(l.eval(t), 2);
    let j = curve.jacobian_j(&[t1, t2]).abs();
    let ordered = f(t1) * f(t2) * lam(t1) * lam(t2) / j;
    Ok(ConvolutionDensity { ordered, total: 2.0 * ordered, singular: false })
}

/// `(∫ total density dξ, (∫ f λ)²)` for `f` supported in `support`. The
/// density is integrated in the coordinates `σ = (t₁+t₂, t₁²+t₂²)` with
/// `σ₂ = σ₁²/2 + u²`, which removes the fold singularity.
pub fn convolution_mass<F: Fn(f64) -> f64>(curve: &PolyCurve, f: F, support: Interval, nodes: usize) -> Result<(f64, f64)> {
    require_bounded(&support)?;
    let (c0, _, det) = quadratic_frame(curve)?;
    let l = curve.torsion_poly();
    let lam = |t: f64| arclength_from_torsion(l.eval(t), 2);
    let expected = Rule::composite_gauss(support.lo, support.hi, nodes, 8).integrate(|t| f(t) * lam(t));

    let (a, b) = (support.lo, support.hi);
    let u_max = (b - a) / 2f64.sqrt();
    let s_rule = Rule::composite_gauss(2.0 * a, 2.0 * b, nodes, 8);
    let u_rule = Rule::composite_gauss(0.0, u_max, nodes, 8);
    let mut rows = Vec::with_capacity(s_rule.len());
    for (&s1, &ws) in s_rule.nodes.iter().zip(&s_rule.weights) {
        let mut acc = 0.0;
        for (&u, &wu) in u_rule.nodes.iter().zip(&u_rule.weights) {
            let s2 = 0.5 * s1 * s1 + u * u;
            let xi = [
                2.0 * c0[0] + curve.component(0).coeff(1) * s1 + curve.component(0).coeff(2) * s2,
                2.0 * c0[1] + curve.component(1).coeff(1) * s1 + curve.component(1).coeff(2) * s2,
            ];
            let dens = convolution_density_2d(curve, &f, xi)?;
            acc += wu * dens.total * det.abs() * 2.0 * u;
        }
        rows.push(ws * acc);
    }
    Ok((pairwise_sum(&rows), expected * expected))
}

// ---------------------------------------------------------------------------
// Multilinear decay

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayConfig {
    pub half_width: f64,
    pub resolution: usize,
    /// Quadrature nodes per level-set interval.
    pub nodes: usize,
    pub q: f64,
    pub p: f64,
    /// Level index of the top (largest-torsion) piece.
    pub top: i32,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig { half_width: 32.0, resolution: 256, nodes: 1024, q: 6.0, p: 2.0, top: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub epsilon: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(n_D − n_1, log of the normalized product norm)`
    pub points: Vec<(f64, f64)>,
    /// Unnormalized `‖∏_j E χ_{I_{n_j}}‖_{L^{q/D}}` per separation.
    pub raw_norms: Vec<f64>,
}

/// For each separation `s`, levels `n_1 = top − s`, `n_2 = n_1 + ⌊s/2⌋`,
/// `n_3 = top`; computes `‖∏_j E(χ_{I_{n_j}})‖_{L^{q/3}(box)}` divided by
/// `∏_j ‖χ_{I_{n_j}}‖_{L^p(λ)}` and fits its base-2 logarithm against `s`,
/// so the normalized norm behaves like `2^{−ε s}`. `I_n` is the torsion level
/// set `{2^n ≤ |L| < 2^{n+1}}` inside `piece`.
pub fn multilinear_decay_fit<E: Executor>(
    exec: &E,
    curve: &PolyCurve,
    piece: Interval,
    separations: &[u32],
    config: &DecayConfig,
) -> Result<DecayFit> {
    const FACTORS: usize = 3;
    if curve.dim() != 2 {
        return Err(Error::Dimension { d: curve.dim() });
    }
    if separations.len() < 2 {
        return Err(Error::DegenerateData("need at least two separations"));
    }
    let l = curve.torsion_poly();
    if l.is_zero() {
        return Err(Error::DegenerateTorsion);
    }
    let grid = GridSpec::cube(2, config.half_width, config.resolution, config.nodes, piece_or_unit(&piece))?;

    let mut cache: BTreeMap<i32, (Vec<Complex64>, f64)> = BTreeMap::new();
    let mut level = |n: i32| -> Result<(Vec<Complex64>, f64)> {
        if let Some(v) = cache.get(&n) {
            return Ok(v.clone());
        }
        let parts: Vec<Interval> =
            level_sets_of(&l, n)?.into_iter().map(|iv| iv.intersect(&piece)).filter(|iv| !iv.is_empty() && iv.length() > 0.0).collect();
        if parts.is_empty() {
            return Err(Error::EmptyPiece);
        }
        let mut rule = Rule { nodes: Vec::new(), weights: Vec::new() };
        for iv in &parts {
            rule.extend(&Rule::midpoint(iv.lo, iv.hi, config.nodes));
        }
        let op = Extension::from_rule(curve, &rule, true);
        let f = op.sample_real(|_| 1.0);
        let field = op.field(exec, &f, &grid)?;
        let input = op.input_norm(&f, config.p);
        cache.insert(n, (field.clone(), input));
        Ok((field, input))
    };

    let mut points = Vec::new();
    let mut raw_norms = Vec::new();
    for &s in separations {
        let s = s as i32;
        let levels = [config.top - s, config.top - s + s / 2, config.top];
        let mut product = vec![Complex64::new(1.0, 0.0); grid.len()];
        let mut inputs = 1.0;
        for &n in &levels[..FACTORS] {
            let (field, input) = level(n)?;
            for (p, v) in product.iter_mut().zip(&field) {
                *p *= v;
            }
            inputs *= input;
        }
        let norm = grid_norm(&product, &grid, config.q / FACTORS as f64);
        raw_norms.push(norm);
        points.push((s as f64, (norm / inputs).log2()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(DecayFit { epsilon: -fit.slope, intercept: fit.intercept, r_squared: fit.r_squared, points, raw_norms })
}

/// A bounded stand-in support for grid construction; the actual quadrature
/// runs on the level sets.
fn piece_or_unit(piece: &Interval) -> Interval {
    if piece.is_bounded() && !piece.is_empty() && piece.length() > 0.0 {
        *piece
    } else {
        Interval::closed(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::AffineMap;
    use crate::decompose::dw_decompose;
    use crate::exec::Sequential;
    use crate::linalg::Matrix;

    fn curve(c: &[&[f64]]) -> PolyCurve {
        PolyCurve::from_coeffs(c).unwrap()
    }

    fn parabola() -> PolyCurve {
        curve(&[&[0.0, 1.0], &[0.0, 0.0, 1.0]])
    }

    #[test]
    fn ratio_scan_anchors() {
        let r = geometric_ratio_scan(&parabola(), Interval::closed(-2.0, 3.0), 500, 1).unwrap();
        assert!((r.min_ratio - 1.0).abs() < 1e-12);
        let m3 = PolyCurve::moment(3).unwrap();
        let r = geometric_ratio_scan(&m3, Interval::closed(0.0, 1.0), 500, 9).unwrap();
        assert!((r.min_ratio - 0.5).abs() < 1e-12);
        assert!(r.history.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(r.history.last().unwrap().0, 500);
    }

    #[test]
    fn ratio_scan_positive_and_stable() {
        let c = curve(&[&[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.0, 1.0]]);
        let a = geometric_ratio_scan(&c, Interval::closed(1.0, 2.0), 10_000, 3).unwrap();
        let b = geometric_ratio_scan(&c, Interval::closed(1.0, 2.0), 100_000, 3).unwrap();
        assert!(a.min_ratio > 0.0 && b.min_ratio > 0.0);
        assert!(b.min_ratio <= a.min_ratio);
        assert!(b.min_ratio > 0.5 * a.min_ratio);
        assert!(matches!(geometric_ratio_scan(&c, Interval::closed(-1.0, 1.0), 10, 0), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn ratio_scan_invariances() {
        let c = curve(&[&[0.0, 1.0, 0.5], &[0.0, 0.0, 1.0, 0.3], &[0.2, 0.0, 0.0, 1.0]]);
        let iv = Interval::closed(0.2, 0.9);
        let base = geometric_ratio_scan(&c, iv, 2000, 5).unwrap();
        let m = Matrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 0.5, 0.3, 0.0, 0.0, 1.0]);
        let mapped = c.apply_affine(&AffineMap::new(m, vec![1.0, -2.0, 0.5]).unwrap());
        let r = geometric_ratio_scan(&mapped, iv, 2000, 5).unwrap();
        assert!((r.min_ratio - base.min_ratio).abs() < 1e-9 * base.min_ratio);
        let (a, b) = (2.0, -0.4);
        let rep = c.reparametrize(a, b).unwrap();
        let pre = Interval::closed((iv.lo - b) / a, (iv.hi - b) / a);
        let r = geometric_ratio_scan(&rep, pre, 2000, 5).unwrap();
        assert!((r.min_ratio - base.min_ratio).abs() < 1e-9 * base.min_ratio);
    }

    #[test]
    fn offspring_torsion() {
        let m = PolyCurve::moment(3).unwrap();
        assert!(offspring_torsion_check(&m, 0.1, 50, 1).unwrap() < 1e-12);
        let c = curve(&[&[0.0, 1.0], &[0.0, 0.0, 0.5, 0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0 / 6.0]]);
        let devs: Vec<f64> = [0.01, 0.05, 0.1].iter().map(|&d| offspring_torsion_check(&c, d, 200, 4).unwrap()).collect();
        assert!(devs[0] <= 0.5);
        assert!(devs.windows(2).all(|w| w[0] <= w[1]), "{devs:?}");
        let raw = curve(&[&[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]);
        assert!(matches!(offspring_torsion_check(&raw, 0.1, 5, 0), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn injectivity() {
        let r = injectivity_probe(&parabola(), Interval::closed(-1.0, 1.0), 200, 2).unwrap();
        assert!(r.min_gap > 0.0);
        let c = curve(&[&[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]);
        let r = injectivity_probe(&c, Interval::closed(0.0, 1.0), 200, 2).unwrap();
        assert!(r.min_gap > 0.0);
        assert!(r.witness.0.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn frequency_bands() {
        let c = curve(&[&[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.0, 1.0]]);
        let dec = dw_decompose(&c).unwrap();
        for (piece, cert) in dec.pieces.iter().zip(&dec.first_coord) {
            let mut prev_lo = 0.0;
            for n in -10..=10 {
                let band = freq_band_check(&c, piece, cert, n).unwrap();
                assert!((band.lo - 2f64.powi(n)).abs() < 1e-12 * band.lo);
                assert!((band.hi - 2f64.powi(n + 1)).abs() < 1e-12 * band.hi);
                assert!((band.comparability - 1.0).abs() < 1e-9);
                assert!(band.lo >= prev_lo);
                prev_lo = band.lo;
                let far = freq_band_check(&c, piece, cert, n + 3).unwrap();
                assert!(far.lo > band.hi);
            }
        }
    }

    #[test]
    fn frequency_band_quadratic_first_coordinate() {
        // γ₁ = t², so ℓ = 1 on t > 0 and bands scale like 4^n.
        let c = curve(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]);
        let dec = dw_decompose(&c).unwrap();
        let (piece, cert) = dec.pieces.iter().zip(&dec.first_coord).find(|(p, _)| p.interval.contains(1.0)).unwrap();
        assert_eq!(cert.ell, 1);
        let band = freq_band_check(&c, piece, cert, 2).unwrap();
        assert!((band.lo - 16.0 / cert.b).abs() < 1e-9 && (band.hi - 64.0 / cert.b).abs() < 1e-9);
    }

    #[test]
    fn multilinear_anchors() {
        let c = parabola();
        let one: &dyn Fn(f64) -> f64 = &|_| 1.0;
        let unit = Interval::closed(0.0, 1.0);
        let t1 = multilinear_t(&c, &[one], &[unit], 8).unwrap();
        assert!((t1 - 2f64.powf(0.25)).abs() < 1e-10);
        let t2 = multilinear_t(&c, &[one, one], &[unit, unit], 8).unwrap();
        let expect = 2f64.sqrt() * 8.0 / 3.0;
        assert!((t2 - expect).abs() < 1e-6 * expect, "{t2} vs {expect}");
        let t2b = multilinear_t(&c, &[one, one], &[unit, unit], 16).unwrap();
        assert!((t2 - t2b).abs() < 1e-3 * t2b);
        let zero: &dyn Fn(f64) -> f64 = &|_| 0.0;
        assert_eq!(multilinear_t(&c, &[one, zero], &[unit, unit], 8).unwrap(), 0.0);
        assert!(multilinear_t(&c, &[one; 4], &[unit; 4], 8).is_err());
        assert!(multilinear_t(&c, &[one], &[Interval::real_line()], 8).is_err());
    }

    #[test]
    fn trilinear_matches_brute_force() {
        // ∫∫∫_{[0,1]^3} ∏|t_i − t_j|^{-1/2}: compare two orders.
        let c = parabola();
        let one: &dyn Fn(f64) -> f64 = &|_| 1.0;
        let unit = Interval::closed(0.0, 1.0);
        let a = multilinear_t(&c, &[one; 3], &[unit; 3], 4).unwrap();
        let b = multilinear_t(&c, &[one; 3], &[unit; 3], 6).unwrap();
        assert!((a - b).abs() < 1e-3 * b, "{a} vs {b}");
        // Disjoint supports: smooth integrand, plain Gauss agrees.
        let (s1, s2, s3) = (Interval::closed(0.0, 1.0), Interval::closed(2.0, 3.0), Interval::closed(4.0, 5.0));
        let v = multilinear_t(&c, &[one; 3], &[s1, s2, s3], 8).unwrap();
        let r = Rule::composite_gauss(0.0, 1.0, 4, 8);
        let mut brute = 0.0;
        for (&x, &wx) in r.nodes.iter().zip(&r.weights) {
            for (&y, &wy) in r.nodes.iter().zip(&r.weights) {
                for (&z, &wz) in r.nodes.iter().zip(&r.weights) {
                    let (t1, t2, t3) = (x, y + 2.0, z + 4.0);
                    let k = ((t1 - t2).abs() * (t1 - t3).abs() * (t2 - t3).abs()).powf(-0.5);
                    brute += wx * wy * wz * k;
                }
            }
        }
        let brute = brute * 2f64.powf(0.75);
        assert!((v - brute).abs() < 1e-9 * brute);
    }

    #[test]
    fn convolution_examples() {
        let c = parabola();
        let d = convolution_density_2d(&c, |_| 1.0, [1.0, 1.0]).unwrap();
        assert!((d.ordered - 2f64.powf(2.0 / 3.0) / 2.0).abs() < 1e-14);
        assert_eq!(d.total, 2.0 * d.ordered);
        let below = convolution_density_2d(&c, |_| 1.0, [1.0, 0.4]).unwrap();
        assert_eq!((below.total, below.singular), (0.0, false));
        assert!(convolution_density_2d(&c, |_| 1.0, [1.0, 0.5]).unwrap().singular);
        let bumpf = |t: f64| crate::oscillatory::bump(2.0 * t - 1.0);
        let (mass, expected) = convolution_mass(&c, bumpf, Interval::closed(0.0, 1.0), 32).unwrap();
        assert!((mass - expected).abs() < 0.02 * expected, "{mass} vs {expected}");
        let skew = curve(&[&[1.0, 2.0, 0.5], &[-1.0, 0.3, 1.5]]);
        let (mass, expected) = convolution_mass(&skew, bumpf, Interval::closed(0.0, 1.0), 32).unwrap();
        assert!((mass - expected).abs() < 0.02 * expected, "{mass} vs {expected}");
    }

    #[test]
    fn decay_fit_small_grid() {
        let c = curve(&[&[0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]);
        let cfg = DecayConfig { half_width: 16.0, resolution: 32, nodes: 128, ..DecayConfig::default() };
        let piece = Interval::new(0.0, 1.0, false, true);
        let fit = multilinear_decay_fit(&Sequential, &c, piece, &[0, 2, 4], &cfg).unwrap();
        assert!(fit.epsilon > 0.0);
        assert!(fit.raw_norms.windows(2).all(|w| w[1] < w[0]));

        // Zero separation is the cube of a single extension.
        let grid = GridSpec::cube(2, 16.0, 32, 128, piece).unwrap();
        let iv = level_sets_of(&c.torsion_poly(), 0).unwrap().into_iter().map(|iv| iv.intersect(&piece)).find(|iv| !iv.is_empty()).unwrap();
        let op = Extension::from_rule(&c, &Rule::midpoint(iv.lo, iv.hi, 128), true);
        let field = op.field(&Sequential, &op.sample_real(|_| 1.0), &grid).unwrap();
        let cubed: Vec<Complex64> = field.iter().map(|v| v * v * v).collect();
        assert!((grid_norm(&cubed, &grid, 2.0) - fit.raw_norms[0]).abs() < 1e-12 * fit.raw_norms[0]);
    }
}
