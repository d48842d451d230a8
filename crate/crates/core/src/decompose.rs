//! Interval decompositions of the real line on which a polynomial is
//! comparable to a monomial `A·|t − b|^k`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use crate::curve::PolyCurve;
use crate::error::{Error, Result};
use crate::interval::{segment_line, Interval};
use crate::lab::InjectivityReport;
use crate::poly::{real_roots, roots, ComplexRootSet, Polynomial};

/// Root tolerance used by every decomposition.
pub const ROOT_TOL: f64 = 1e-12;
/// Probe points per piece when measuring a certificate.
pub const PROBES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionPiece {
    pub interval: Interval,
    pub center: Complex64,
    pub k: usize,
    /// The constant `A` in `|Q(t)| ∼ A·|t − b|^k`.
    pub a: f64,
    /// Measured sup/inf of `|Q(t)| / (A·|t − b|^k)` over the probe grid.
    pub ratio_bound: f64,
    /// Set when the center's real part lies strictly inside the interval.
    pub center_interior: bool,
}

/// Comparability `|γ₁'(t)| ∼ B·|t − c|^ℓ` attached to a curve piece.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstCoordCertificate {
    pub center: Complex64,
    pub ell: usize,
    pub b: f64,
    pub ratio_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveDecomposition {
    pub pieces: Vec<DecompositionPiece>,
    /// Parallel to `pieces`.
    pub first_coord: Vec<FirstCoordCertificate>,
    pub injectivity_report: Option<InjectivityReport>,
}

impl CurveDecomposition {
    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum D2Kind {
    /// `|p(t)| ∼ A·|t − b|^k`
    Gap,
    /// `|t − b| ∼ A`
    Dyadic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct D2Piece {
    pub interval: Interval,
    pub kind: D2Kind,
    pub k: usize,
    pub a: f64,
    pub ratio_bound: f64,
}

/// `|q(t)|`, evaluated directly where the value clears the rounding floor
/// and through the factored form near clustered roots.
struct Magnitude<'a> {
    q: &'a Polynomial,
    abs_q: Polynomial,
    lead: f64,
    roots: &'a [(Complex64, usize)],
}

impl<'a> Magnitude<'a> {
    fn new(q: &'a Polynomial, roots: &'a [(Complex64, usize)]) -> Self {
        Magnitude { q, abs_q: q.abs_coeffs(), lead: q.leading().abs(), roots }
    }

    fn at(&self, t: f64) -> f64 {
        let direct = self.q.eval(t).abs();
        if direct > 1e3 * f64::EPSILON * self.abs_q.eval(t.abs()) {
            return direct;
        }
        self.roots.iter().fold(self.lead, |acc, (z, m)| acc * (Complex64::new(t, 0.0) - z).norm().powi(*m as i32))
    }
}

/// sup/inf of `f` over the probe grid, skipping points where it is not a
/// positive finite number.
fn measured_ratio<F: Fn(f64) -> f64>(interval: &Interval, scale: f64, f: F) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for t in interval.probe_points(PROBES, scale) {
        let r = f(t);
        if r.is_finite() && r > 0.0 {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if hi > 0.0 {
        hi / lo
    } else {
        1.0
    }
}

fn root_scale(rs: &[(Complex64, usize)]) -> f64 {
    1.0 + rs.iter().map(|(z, _)| z.norm()).fold(0.0, f64::max)
}

/// Cells of points whose nearest complex root is `b`, cut into annuli
/// `½|b − b_j| ≤ |t − b| < ½|b − b_{j+1}|`. Ties go to the lower root index.
pub fn nearest_zero_cells(q: &Polynomial) -> Result<Vec<DecompositionPiece>> {
    let set = roots(q, ROOT_TOL)?;
    Ok(cells_from_roots(q, &set))
}

pub(crate) fn cells_from_roots(q: &Polynomial, set: &ComplexRootSet) -> Vec<DecompositionPiece> {
    let rs = &set.roots;
    if rs.is_empty() {
        let c = q.coeff(0).abs();
        return vec![DecompositionPiece {
            interval: Interval::real_line(),
            center: Complex64::zero(),
            k: 0,
            a: c,
            ratio_bound: 1.0,
            center_interior: false,
        }];
    }

    let mut breaks = Vec::new();
    for (i, (b, _)) in rs.iter().enumerate() {
        for (j, (c, _)) in rs.iter().enumerate() {
            if i == j {
                continue;
            }
            if i < j && b.re != c.re {
                breaks.push((b.norm_sqr() - c.norm_sqr()) / (2.0 * (b.re - c.re)));
            }
            let r = 0.5 * (b - c).norm();
            let disc = r * r - b.im * b.im;
            if disc >= 0.0 {
                let s = disc.sqrt();
                breaks.push(b.re - s);
                breaks.push(b.re + s);
            }
        }
    }

    let label = |t: f64| -> Option<(usize, usize)> {
        let z = Complex64::new(t, 0.0);
        let mut best = 0;
        for i in 1..rs.len() {
            if (z - rs[i].0).norm() < (z - rs[best].0).norm() {
                best = i;
            }
        }
        let s = (z - rs[best].0).norm();
        let ring = rs.iter().enumerate().filter(|&(j, (c, _))| j != best && 0.5 * (rs[best].0 - c).norm() <= s).count();
        Some((best, ring))
    };

    let mag = Magnitude::new(q, rs);
    let scale = root_scale(rs);
    segment_line(&breaks, label)
        .into_iter()
        .map(|(interval, (i, _))| {
            let b = rs[i].0;
            let s = Complex64::new(interval.sample_point(), 0.0) - b;
            let s = s.norm();
            let mut k = rs[i].1;
            let mut a = q.leading().abs();
            for (j, (c, m)) in rs.iter().enumerate() {
                if j == i {
                    continue;
                }
                if 0.5 * (b - c).norm() <= s {
                    k += m;
                } else {
                    a *= (b - c).norm().powi(*m as i32);
                }
            }
            let ratio_bound = measured_ratio(&interval, scale, |t| mag.at(t) / (a * (Complex64::new(t, 0.0) - b).norm().powi(k as i32)));
            DecompositionPiece { interval, center: b, k, a, ratio_bound, center_interior: b.im != 0.0 && interval.interior_contains(b.re) }
        })
        .collect()
}

/// Splits the line around the real center `b` into gaps, where `|p|` is
/// comparable to a monomial in `|t − b|`, and dyadic windows, where `|t − b|`
/// itself is nearly constant. At most `4·deg p + 2` pieces.
pub fn d2_gaps_dyadic(p: &Polynomial, b: f64) -> Result<Vec<D2Piece>> {
    let set = roots(p, ROOT_TOL)?;
    Ok(d2_from_roots(p, &set, b))
}

fn d2_from_roots(p: &Polynomial, set: &ComplexRootSet, b: f64) -> Vec<D2Piece> {
    let center = Complex64::new(b, 0.0);
    let mut rho: Vec<(f64, usize)> = set.roots.iter().map(|(z, m)| ((z - center).norm(), *m)).collect();
    rho.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Windows [ρ/2, 2ρ] in s = |t − b|, merged where they overlap.
    let mut windows: Vec<(f64, f64)> = Vec::new();
    for &(r, _) in rho.iter().filter(|r| r.0 > 0.0) {
        let (lo, hi) = (0.5 * r, 2.0 * r);
        match windows.last_mut() {
            Some(w) if lo <= w.1 => w.1 = w.1.max(hi),
            _ => windows.push((lo, hi)),
        }
    }

    let lead = p.leading().abs();
    let gap_cert = |s: f64| -> (usize, f64) {
        let mut k = 0;
        let mut a = lead;
        for &(r, m) in &rho {
            if r < s {
                k += m;
            } else {
                a *= r.powi(m as i32);
            }
        }
        (k, a)
    };

    let mag = Magnitude::new(p, &set.roots);
    let scale = root_scale(&set.roots).max(1.0 + b.abs());
    let mut out = Vec::new();
    let mut push = |interval: Interval, kind: D2Kind, k: usize, a: f64| {
        if interval.is_empty() {
            return;
        }
        let ratio_bound = match kind {
            D2Kind::Gap => measured_ratio(&interval, scale, |t| mag.at(t) / (a * (t - b).abs().powi(k as i32))),
            D2Kind::Dyadic => measured_ratio(&interval, scale, |t| (t - b).abs() / a),
        };
        out.push(D2Piece { interval, kind, k, a, ratio_bound });
    };

    // Central gap (b − s1, b + s1).
    let s1 = windows.first().map_or(f64::INFINITY, |w| w.0);
    let (k, a) = gap_cert(0.5 * s1.min(1.0));
    push(Interval::open(b - s1, b + s1), D2Kind::Gap, k, a);
    for (idx, &(lo, hi)) in windows.iter().enumerate() {
        let a = (lo * hi).sqrt();
        push(Interval::closed(b - hi, b - lo), D2Kind::Dyadic, 0, a);
        push(Interval::closed(b + lo, b + hi), D2Kind::Dyadic, 0, a);
        let next = windows.get(idx + 1).map_or(f64::INFINITY, |w| w.0);
        let mid = if next.is_finite() { (hi * next).sqrt() } else { 2.0 * hi };
        let (k, a) = gap_cert(mid);
        push(Interval::open(b - next, b - hi), D2Kind::Gap, k, a);
        push(Interval::open(b + hi, b + next), D2Kind::Gap, k, a);
    }
    out.sort_by(|x, y| x.interval.lo.total_cmp(&y.interval.lo));
    out
}

/// Splits `iv` at `c` when `c` is strictly inside it.
fn split_at(iv: Interval, c: f64) -> Vec<Interval> {
    if iv.interior_contains(c) {
        vec![Interval::new(iv.lo, c, iv.lo_closed, false), Interval::new(c, iv.hi, true, iv.hi_closed)]
    } else {
        vec![iv]
    }
}

/// Decomposes `R` into intervals carrying both a torsion certificate
/// `|L(t)| ∼ A·|t − b|^k` and a first-coordinate certificate
/// `|γ₁'(t)| ∼ B·|t − c|^ℓ`.
pub fn dw_decompose(curve: &PolyCurve) -> Result<CurveDecomposition> {
    let l = curve.torsion_poly();
    if l.is_zero() {
        return Err(Error::DegenerateTorsion);
    }
    let g1 = curve.component(0).derivative(1);
    if g1.is_zero() {
        return Err(Error::DegenerateTorsion);
    }
    let l_roots = roots(&l, ROOT_TOL)?;
    let g_roots = roots(&g1, ROOT_TOL)?;
    let l_mag = Magnitude::new(&l, &l_roots.roots);
    let g_mag = Magnitude::new(&g1, &g_roots.roots);
    let scale = root_scale(&l_roots.roots).max(root_scale(&g_roots.roots));
    let g_cells = cells_from_roots(&g1, &g_roots);

    let l_ratio = |iv: &Interval, b: Complex64, k: usize, a: f64| {
        measured_ratio(iv, scale, |t| l_mag.at(t) / (a * (Complex64::new(t, 0.0) - b).norm().powi(k as i32)))
    };
    let g_ratio = |iv: &Interval, c: Complex64, ell: usize, bb: f64| {
        measured_ratio(iv, scale, |t| g_mag.at(t) / (bb * (Complex64::new(t, 0.0) - c).norm().powi(ell as i32)))
    };

    let mut pieces = Vec::new();
    let mut first_coord = Vec::new();
    for cell in cells_from_roots(&l, &l_roots) {
        let b = cell.center;
        let c = b.re;
        let parts = if b.im == 0.0 && cell.k > 0 { split_at(cell.interval, c) } else { vec![cell.interval] };
        for part in parts {
            for d2 in d2_from_roots(&g1, &g_roots, c) {
                let iv = part.intersect(&d2.interval);
                if iv.is_empty() {
                    continue;
                }
                match d2.kind {
                    D2Kind::Gap => {
                        let center = Complex64::new(c, 0.0);
                        pieces.push(DecompositionPiece {
                            interval: iv,
                            center: b,
                            k: cell.k,
                            a: cell.a,
                            ratio_bound: l_ratio(&iv, b, cell.k, cell.a),
                            center_interior: b.im != 0.0 && cell.k > 0 && iv.interior_contains(c),
                        });
                        first_coord.push(FirstCoordCertificate {
                            center,
                            ell: d2.k,
                            b: d2.a,
                            ratio_bound: g_ratio(&iv, center, d2.k, d2.a),
                        });
                    }
                    D2Kind::Dyadic => {
                        // |t − c| ∼ ρ here, so L is comparable to a constant.
                        let a = cell.a * d2.a.powi(cell.k as i32);
                        for g in &g_cells {
                            let sub = iv.intersect(&g.interval);
                            if sub.is_empty() {
                                continue;
                            }
                            pieces.push(DecompositionPiece {
                                interval: sub,
                                center: b,
                                k: 0,
                                a,
                                ratio_bound: l_ratio(&sub, b, 0, a),
                                center_interior: false,
                            });
                            first_coord.push(FirstCoordCertificate {
                                center: g.center,
                                ell: g.k,
                                b: g.a,
                                ratio_bound: g_ratio(&sub, g.center, g.k, g.a),
                            });
                        }
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&i, &j| pieces[i].interval.lo.total_cmp(&pieces[j].interval.lo));
    Ok(CurveDecomposition {
        pieces: order.iter().map(|&i| pieces[i].clone()).collect(),
        first_coord: order.iter().map(|&i| first_coord[i].clone()).collect(),
        injectivity_report: None,
    })
}

/// `{t : 2^n ≤ |L(t)| < 2^{n+1}}` as a sorted list of disjoint intervals.
pub fn torsion_level_sets(curve: &PolyCurve, n: i32) -> Result<Vec<Interval>> {
    let l = curve.torsion_poly();
    if l.is_zero() {
        return Err(Error::DegenerateTorsion);
    }
    level_sets_of(&l, n)
}

pub(crate) fn level_sets_of(l: &Polynomial, n: i32) -> Result<Vec<Interval>> {
    let lo = 2f64.powi(n);
    let hi = 2f64.powi(n + 1);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for c in [lo, -lo] {
        lower.extend(real_roots(&(l - &Polynomial::constant(c)), ROOT_TOL)?);
    }
    for c in [hi, -hi] {
        upper.extend(real_roots(&(l - &Polynomial::constant(c)), ROOT_TOL)?);
    }
    let breaks: Vec<f64> = lower.iter().chain(&upper).copied().collect();
    let inside = |t: f64| {
        let v = l.eval(t).abs();
        v >= lo && v < hi
    };
    let segs = segment_line(&breaks, |t| inside(t).then_some(()));
    // An endpoint belongs to the set when it solves |L| = 2^n. A point that
    // also solves |L| = 2^{n+1} (possible only at the resolution of f64)
    // goes to the next level, which keeps consecutive levels disjoint.
    let closed = |e: f64| e.is_finite() && lower.contains(&e) && !upper.contains(&e);
    Ok(segs.into_iter().map(|(iv, ())| Interval::new(iv.lo, iv.hi, closed(iv.lo), closed(iv.hi))).collect())
}

/// `I_{j,n} = {t ∈ I_j : 2^n ≤ |t − b_j| < 2^{n+1}}` for a piece whose
/// real center is not interior.
pub fn dyadic_pieces(piece: &DecompositionPiece, n: i32) -> Result<Interval> {
    let b = piece.center;
    if b.im != 0.0 {
        return Err(Error::ComplexCenter { re: b.re, im: b.im });
    }
    let iv = piece.interval;
    if iv.interior_contains(b.re) {
        return Err(Error::CenterInterior { center: b.re });
    }
    let (lo, hi) = (2f64.powi(n), 2f64.powi(n + 1));
    let band = if b.re <= iv.lo { Interval::half_open(b.re + lo, b.re + hi) } else { Interval::new(b.re - hi, b.re - lo, false, true) };
    let out = iv.intersect(&band);
    Ok(if out.is_empty() { Interval::empty() } else { out })
}

/// `min_z |t − z|` over the root set.
pub fn dist_weight(zs: &ComplexRootSet, t: f64) -> Result<f64> {
    if zs.is_empty() {
        return Err(Error::EmptyRootSet);
    }
    let z = Complex64::new(t, 0.0);
    Ok(zs.roots.iter().map(|(r, _)| (z - r).norm()).fold(f64::INFINITY, f64::min))
}

/// Piece count bound `2·(dN)·(N + 2)`.
pub fn piece_count_bound(curve: &PolyCurve) -> usize {
    let (d, n) = (curve.dim(), curve.max_degree());
    2 * d * n * (n + 2)
}
