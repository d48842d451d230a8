//! Invariant suites. Each check returns the measured quantity next to the
//! bound it is held to, so a report shows the margin and not only the verdict.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::{json, Value};
use torsionlab_core::curve::AffineMap;
use torsionlab_core::decompose::{dw_decompose, nearest_zero_cells, ROOT_TOL};
use torsionlab_core::exponents::{
    drury_iterate, duality_map, extension_admissible, extension_threshold, interp_region_check, rat, restriction_admissible,
    restriction_threshold, weight_exponent, ExponentPair,
};
use torsionlab_core::lab::{convolution_mass, freq_band_check, geometric_ratio_scan, multilinear_decay_fit, multilinear_t, DecayConfig};
use torsionlab_core::linalg::{transpose_vec, Matrix};
use torsionlab_core::oscillatory::{bump, extension_eval, knapp_scaling_fit, packet_count_slope, stationary_decay_fit, KnappConfig};
use torsionlab_core::poly::{real_roots, Polynomial};
use torsionlab_core::rng::{stream, uniform, StreamRng};
use torsionlab_core::{Complex64, Interval, PolyCurve};

use crate::config::{GridConfig, SearchConfig};
use crate::exec::Pool;
use crate::random::RandomFamily;
use crate::report::num;
use crate::sweep;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Effort {
    Full,
    Quick,
}

impl Effort {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Effort::Full => full,
            Effort::Quick => quick,
        }
    }
}

pub struct Ctx<'a> {
    pub exec: &'a Pool,
    pub seed: u64,
    pub effort: Effort,
    /// Random curves in the geometric ratio scan.
    pub curves: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Property {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// The bound `value` is held to (`≤`, `≥` or `=` depending on the check).
    pub bound: f64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// Acceptance criterion number, if the check is one.
    pub criterion: Option<u8>,
    pub name: &'static str,
    pub properties: Vec<Property>,
    /// Extra measurements worth reporting.
    pub data: BTreeMap<String, Value>,
}

impl Outcome {
    fn new(criterion: Option<u8>, name: &'static str) -> Self {
        Outcome { criterion, name, properties: Vec::new(), data: BTreeMap::new() }
    }

    pub fn passed(&self) -> bool {
        !self.properties.is_empty() && self.properties.iter().all(|p| p.passed)
    }

    pub fn summary(&self) -> String {
        let failed: Vec<&Property> = self.properties.iter().filter(|p| !p.passed).collect();
        if self.properties.is_empty() {
            return "no properties checked".into();
        }
        match failed.first() {
            None => format!("{} properties", self.properties.len()),
            Some(p) => {
                let note = p.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
                format!("{} of {} failed; first: {} = {:e} vs {:e}{note}", failed.len(), self.properties.len(), p.name, p.value, p.bound)
            }
        }
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(name, value <= bound, value, bound);
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(name, value >= bound, value, bound);
    }

    fn above(&mut self, name: impl Into<String>, value: f64, bound: f64) {
        self.push(name, value > bound, value, bound);
    }

    fn holds(&mut self, name: impl Into<String>, ok: bool) {
        self.push(name, ok, if ok { 1.0 } else { 0.0 }, 1.0);
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, value: f64, bound: f64) {
        self.properties.push(Property { name: name.into(), passed, value, bound, note: None });
    }

    /// Records an error as a failed property.
    fn error(&mut self, name: impl Into<String>, e: impl std::fmt::Display) {
        self.properties.push(Property { name: name.into(), passed: false, value: f64::NAN, bound: f64::NAN, note: Some(e.to_string()) });
    }

    fn data(&mut self, key: &str, v: Value) {
        self.data.insert(key.into(), v);
    }

    pub fn to_json(&self) -> Value {
        let props: Vec<Value> = self
            .properties
            .iter()
            .map(|p| {
                let mut v = json!({ "name": p.name, "passed": p.passed, "value": num(p.value), "bound": num(p.bound) });
                if let Some(n) = &p.note {
                    v["note"] = json!(n);
                }
                v
            })
            .collect();
        json!({
            "criterion": self.criterion,
            "name": self.name,
            "passed": self.passed(),
            "properties": props,
            "data": self.data,
        })
    }
}

/// Folds a whole-check error into the outcome.
fn guarded(criterion: Option<u8>, name: &'static str, f: impl FnOnce(&mut Outcome) -> torsionlab_core::Result<()>) -> Outcome {
    let mut out = Outcome::new(criterion, name);
    if let Err(e) = f(&mut out) {
        out.error("completed", e);
    }
    out
}

pub type CheckFn = fn(&Ctx) -> Outcome;

pub struct Check {
    pub criterion: Option<u8>,
    pub name: &'static str,
    pub run: CheckFn,
}

pub const SUITES: [&str; 6] = ["algebra", "decompose", "geometric", "oscillatory", "exponents", "all"];

pub fn checks() -> Vec<Check> {
    vec![
        Check { criterion: Some(1), name: "torsion algebra exactness", run: torsion_algebra },
        Check { criterion: Some(2), name: "moment curve anchors", run: moment_anchors },
        Check { criterion: Some(3), name: "decomposition certificates", run: decomposition_certificates },
        Check { criterion: Some(4), name: "drury iteration", run: drury_iteration },
        Check { criterion: Some(5), name: "interpolation region", run: interpolation_region },
        Check { criterion: Some(6), name: "knapp scaling", run: knapp_scaling },
        Check { criterion: Some(7), name: "stationary phase", run: stationary_phase },
        Check { criterion: Some(8), name: "extension invariances", run: extension_invariances },
        Check { criterion: Some(9), name: "multilinear quadrature anchors", run: multilinear_anchors },
        Check { criterion: Some(10), name: "multilinear decay", run: multilinear_decay },
        Check { criterion: Some(11), name: "convolution mass", run: convolution_mass_check },
        Check { criterion: Some(12), name: "frequency band separation", run: frequency_bands },
        Check { criterion: Some(13), name: "exponent exactness", run: exponent_exactness },
        Check { criterion: Some(14), name: "uniformity sweep", run: uniformity_sweep },
        Check { criterion: None, name: "geometric ratio scan", run: ratio_scan },
    ]
}

pub fn suite_members(suite: &str) -> Option<Vec<Check>> {
    let ids: &[Option<u8>] = match suite {
        "algebra" => &[Some(1), Some(2)],
        "decompose" => &[Some(3), Some(12)],
        "geometric" => &[Some(8), Some(9), Some(11), None],
        "oscillatory" => &[Some(6), Some(7), Some(10), Some(14)],
        "exponents" => &[Some(4), Some(5), Some(13)],
        "all" => return Some(checks()),
        _ => return None,
    };
    Some(checks().into_iter().filter(|c| ids.contains(&c.criterion)).collect())
}

pub fn check_by_criterion(id: u8) -> Option<Check> {
    checks().into_iter().find(|c| c.criterion == Some(id))
}

// ---------------------------------------------------------------------------
// helpers

fn rel_coeff_error(a: &Polynomial, b: &Polynomial) -> f64 {
    let n = a.coeffs().len().max(b.coeffs().len());
    let diff = (0..n).map(|k| (a.coeff(k) - b.coeff(k)).abs()).fold(0.0, f64::max);
    let scale = b.max_abs_coeff();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn random_curve(rng: &mut StreamRng, d: usize, degree: usize) -> PolyCurve {
    loop {
        let comps = (0..d).map(|_| Polynomial::new((0..=degree).map(|_| uniform(rng, -1.0, 1.0)).collect())).collect();
        let c = PolyCurve::new(comps).expect("dimension and degree in range");
        if !c.is_degenerate() {
            return c;
        }
    }
}

fn random_matrix(rng: &mut StreamRng, d: usize) -> Matrix {
    loop {
        let m = Matrix::from_fn(d, d, |_, _| uniform(rng, -1.0, 1.0)) + Matrix::identity(d, d);
        if m.determinant().abs() > 0.1 {
            return m;
        }
    }
}

fn random_scale(rng: &mut StreamRng) -> f64 {
    let a = uniform(rng, 0.5, 2.0);
    if uniform(rng, 0.0, 1.0) < 0.5 {
        -a
    } else {
        a
    }
}

fn parabola() -> PolyCurve {
    PolyCurve::from_coeffs(&[&[0.0, 1.0], &[0.0, 0.0, 1.0]]).expect("valid curve")
}

fn small_rational(rng: &mut StreamRng, lo: i64, hi: i64, max_den: i64) -> BigRational {
    let den = 1 + (uniform(rng, 0.0, max_den as f64) as i64).min(max_den - 1);
    let num = (uniform(rng, (lo * den) as f64, (hi * den) as f64) as i64).max(lo * den);
    rat(num, den)
}

// ---------------------------------------------------------------------------
// algebra

fn torsion_algebra(ctx: &Ctx) -> Outcome {
    guarded(Some(1), "torsion algebra exactness", |out| {
        let n = ctx.effort.pick(200, 50);
        let (mut worst_affine, mut worst_reparam) = (0.0f64, 0.0f64);
        for i in 0..n {
            let mut rng = stream(ctx.seed, 0x0100_0000 + i as u64);
            let d = 2 + (uniform(&mut rng, 0.0, 3.0) as usize).min(2);
            let degree = d + (uniform(&mut rng, 0.0, (7 - d) as f64) as usize).min(6 - d);
            let c = random_curve(&mut rng, d, degree);
            let l = c.torsion_poly();

            let m = random_matrix(&mut rng, d);
            let shift: Vec<f64> = (0..d).map(|_| uniform(&mut rng, -2.0, 2.0)).collect();
            let map = AffineMap::new(m, shift)?;
            let lhs = c.apply_affine(&map).torsion_poly();
            worst_affine = worst_affine.max(rel_coeff_error(&lhs, &l.scale(map.det())));

            let (a, b) = (random_scale(&mut rng), uniform(&mut rng, -1.0, 1.0));
            let lhs = c.reparametrize(a, b)?.torsion_poly();
            let rhs = l.compose_affine(a, b).scale(a.powi((d * (d + 1) / 2) as i32));
            worst_reparam = worst_reparam.max(rel_coeff_error(&lhs, &rhs));
        }
        out.at_most("affine map, max relative coefficient error", worst_affine, 1e-10);
        out.at_most("reparametrization, max relative coefficient error", worst_reparam, 1e-10);
        out.data("triples", json!(n));
        Ok(())
    })
}

fn moment_anchors(ctx: &Ctx) -> Outcome {
    guarded(Some(2), "moment curve anchors", |out| {
        for d in 2..=5 {
            let l = PolyCurve::moment(d)?.torsion_poly();
            out.at_most(format!("d={d}: |L - 1| coefficientwise"), rel_coeff_error(&l, &Polynomial::constant(1.0)), 1e-9);
        }
        let mut rng = stream(ctx.seed, 0x0200_0000);
        for (d, expect) in [(2usize, 1.0), (3, 0.5)] {
            let c = PolyCurve::moment(d)?;
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let ts: Vec<f64> = (0..d).map(|_| uniform(&mut rng, -3.0, 3.0)).collect();
                worst = worst.max((c.j_vandermonde_factor(&ts)? - expect).abs());
            }
            out.at_most(format!("d={d}: |J/v - {expect}|"), worst, 1e-9);
            let scan = geometric_ratio_scan(&c, Interval::closed(-2.0, 3.0), ctx.effort.pick(20_000, 2000), ctx.seed)?;
            out.at_most(format!("d={d}: |ratio scan minimum - {expect}|"), (scan.min_ratio - expect).abs(), 1e-9);
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// decompose

fn decomposition_certificates(ctx: &Ctx) -> Outcome {
    guarded(Some(3), "decomposition certificates", |out| {
        let n = ctx.effort.pick(100, 25);
        let mut partition_failures = 0usize;
        let mut worst_excess = f64::NEG_INFINITY;
        let mut pieces_total = 0usize;
        for i in 0..n {
            let mut rng = stream(ctx.seed, 0x0300_0000 + i as u64);
            let deg = 1 + (uniform(&mut rng, 0.0, 8.0) as usize).min(7);
            let mut cs: Vec<f64> = (0..=deg).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
            if cs[deg].abs() < 1e-3 {
                cs[deg] = 1.0;
            }
            let q = Polynomial::new(cs);
            let pieces = nearest_zero_cells(&q)?;
            pieces_total += pieces.len();
            if !is_partition(pieces.iter().map(|p| p.interval).collect()) {
                partition_failures += 1;
            }
            let bound = 3f64.powi(deg as i32);
            for p in &pieces {
                // Independent re-measurement on 10^3 probes.
                let ratios: Vec<f64> = p
                    .interval
                    .probe_points(1000, 1.0 + p.center.re.abs())
                    .into_iter()
                    .map(|t| q.eval(t).abs() / (p.a * (Complex64::new(t, 0.0) - p.center).norm().powi(p.k as i32)))
                    .filter(|r| r.is_finite() && *r > 0.0)
                    .collect();
                let hi = ratios.iter().copied().fold(0.0, f64::max);
                let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let measured = (hi / lo).max(p.ratio_bound);
                worst_excess = worst_excess.max(measured / bound);
            }
        }
        out.at_most("decompositions failing to partition R", partition_failures as f64, 0.0);
        out.at_most("max ratio bound / 3^deg", worst_excess, 1.0);
        out.data("polynomials", json!(n));
        out.data("pieces", json!(pieces_total));
        Ok(())
    })
}

/// Pairwise disjoint and covering `R`: sorted endpoints meet, each joint
/// owned by exactly one side.
pub fn is_partition(mut ivs: Vec<Interval>) -> bool {
    ivs.retain(|iv| !iv.is_empty());
    ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let (Some(first), Some(last)) = (ivs.first(), ivs.last()) else {
        return false;
    };
    if first.lo != f64::NEG_INFINITY || last.hi != f64::INFINITY {
        return false;
    }
    ivs.windows(2).all(|w| w[0].hi == w[1].lo && (w[0].hi_closed != w[1].lo_closed))
}

fn frequency_bands(_ctx: &Ctx) -> Outcome {
    guarded(Some(12), "frequency band separation", |out| {
        let c = PolyCurve::from_coeffs(&[&[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 0.0, 1.0]])?;
        let dec = dw_decompose(&c)?;
        let mut min_gap = f64::INFINITY;
        let mut overlaps = 0usize;
        for (piece, cert) in dec.pieces.iter().zip(&dec.first_coord) {
            for n in -10..=10 {
                let a = freq_band_check(&c, piece, cert, n)?;
                let b = freq_band_check(&c, piece, cert, n + 3)?;
                let gap = b.lo / a.hi;
                min_gap = min_gap.min(gap);
                if !(a.hi < b.lo) {
                    overlaps += 1;
                }
            }
        }
        out.at_most("overlapping band pairs (n, n+3)", overlaps as f64, 0.0);
        out.above("min lo(n+3)/hi(n)", min_gap, 1.0);
        out.data("pieces", json!(dec.len()));
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// exponents

fn drury_iteration(_ctx: &Ctx) -> Outcome {
    guarded(Some(4), "drury iteration", |out| {
        for d in 2..=6usize {
            let target = extension_threshold(d);
            let seq = drury_iterate(d, &rat(1, 1), 200)?;
            let t = to_f64(&target);
            let hit = seq.iter().position(|p| (to_f64(p) - t).abs() < 1e-9);
            out.holds(format!("d={d}: within 1e-9 of {target} in 200 steps"), hit.is_some());
            out.data(&format!("d{d}_steps"), json!(hit.map(|i| i + 1)));
        }
        let prefix = drury_iterate(3, &rat(1, 1), 3)?;
        out.holds("d=3 prefix is (5, 75/11, 1125/161)", prefix == [rat(5, 1), rat(75, 11), rat(1125, 161)]);
        Ok(())
    })
}

fn to_f64(x: &BigRational) -> f64 {
    torsionlab_core::ExtRational::Finite(x.clone()).to_f64()
}

fn interpolation_region(_ctx: &Ctx) -> Outcome {
    guarded(Some(5), "interpolation region", |out| {
        for p0 in [rat(1, 1), rat(5, 1), rat(75, 11)] {
            let v = interp_region_check(3, &p0)?;
            out.holds(format!("d=3, p0={p0}: strict"), v.strict);
        }
        let v = interp_region_check(3, &rat(7, 1))?;
        out.holds("d=3, p0=7: lhs = rhs exactly", v.lhs == v.rhs && !v.strict);
        Ok(())
    })
}

fn exponent_exactness(ctx: &Ctx) -> Outcome {
    guarded(Some(13), "exponent exactness", |out| {
        let mut disagreements = 0usize;
        let mut involution_failures = 0usize;
        let mut admissible_seen = 0usize;
        for i in 0..100u64 {
            let mut rng = stream(ctx.seed, 0x0d00_0000 + i);
            let d = 2 + (uniform(&mut rng, 0.0, 5.0) as usize).min(4);
            let q = small_rational(&mut rng, 1, 40, 12) + rat(1, 1);
            // A third on each scaling line, the rest anywhere.
            let half = rat((d * (d + 1)) as i64, 2);
            let pair = match i % 3 {
                0 => ExponentPair::from_p_prime((&q * &half).into(), q.clone().into())?,
                1 => {
                    let q = &q * &half;
                    ExponentPair::from_p_prime((&q / &half).into(), q.into())?
                }
                _ => ExponentPair::finite(small_rational(&mut rng, 1, 6, 12) + rat(1, 1), q.clone())?,
            };
            let ext = extension_admissible(d, &pair);
            admissible_seen += ext as usize;
            if ext != restriction_admissible(d, &duality_map(&pair)?) {
                disagreements += 1;
            }
            if duality_map(&duality_map(&pair)?)? != pair {
                involution_failures += 1;
            }
        }
        out.at_most("duality cross-check disagreements (100 pairs)", disagreements as f64, 0.0);
        out.at_most("duality involution failures", involution_failures as f64, 0.0);
        out.above("extension-admissible pairs among them", admissible_seen as f64, 0.0);

        let mut nonzero = 0usize;
        for i in 0..50u64 {
            let mut rng = stream(ctx.seed, 0x0d10_0000 + i);
            let d = 2 + (uniform(&mut rng, 0.0, 5.0) as usize).min(4);
            let q = small_rational(&mut rng, 1, 20, 9);
            let p_prime = &q * rat((d * (d + 1)) as i64, 2);
            if p_prime < rat(1, 1) {
                continue;
            }
            let pair = ExponentPair::from_p_prime(p_prime.into(), q.into())?;
            if weight_exponent(d, &pair)? != rat(0, 1) {
                nonzero += 1;
            }
        }
        out.at_most("nonzero weight exponents on the scaling line (50 pairs)", nonzero as f64, 0.0);
        out.holds("q_d(3) = 7/6", restriction_threshold(3) == rat(7, 6));
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// geometric

fn extension_invariances(ctx: &Ctx) -> Outcome {
    guarded(Some(8), "extension invariances", |out| {
        let per_dim = ctx.effort.pick(20, 5);
        let support = Interval::closed(0.0, 1.0);
        let nodes = 2000;
        let f = |t: f64| Complex64::new((2.0 * t).cos() + t, (1.0 - t * t) * 0.5);
        let (mut worst_param, mut worst_affine) = (0.0f64, 0.0f64);
        for d in [2usize, 3] {
            for i in 0..per_dim {
                let mut rng = stream(ctx.seed, 0x0800_0000 + (d as u64) * 1000 + i as u64);
                let degree = d + (uniform(&mut rng, 0.0, 3.0) as usize).min(2);
                let c = random_curve(&mut rng, d, degree);
                let (a, b) = (random_scale(&mut rng), uniform(&mut rng, -1.0, 1.0));
                let rep = c.reparametrize(a, b)?;
                let (lo, hi) = ((support.lo - b) / a, (support.hi - b) / a);
                let pre = Interval::closed(lo.min(hi), lo.max(hi));
                let m = random_matrix(&mut rng, d);
                let shift: Vec<f64> = (0..d).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
                let map = AffineMap::new(m.clone(), shift.clone())?;
                let moved = c.apply_affine(&map);
                let factor = map.det().abs().powf(2.0 / (d * (d + 1)) as f64);
                for _ in 0..10 {
                    let x: Vec<f64> = (0..d).map(|_| uniform(&mut rng, -4.0, 4.0)).collect();
                    let base = extension_eval(&c, f, true, &x, support, nodes)?;
                    let scale = base.norm().max(1.0);

                    let r = extension_eval(&rep, |t| f(a * t + b), true, &x, pre, nodes)?;
                    worst_param = worst_param.max((r - base).norm() / scale);

                    let lhs = extension_eval(&moved, f, true, &x, support, nodes)?;
                    let phase: f64 = x.iter().zip(&shift).map(|(u, v)| u * v).sum();
                    let mtx = transpose_vec(&m, &x);
                    let rhs = extension_eval(&c, f, true, &mtx, support, nodes)? * Complex64::from_polar(factor, phase);
                    worst_affine = worst_affine.max((lhs - rhs).norm() / rhs.norm().max(1.0));
                }
            }
        }
        out.at_most("parametrization invariance, max relative error", worst_param, 1e-6);
        out.at_most("affine covariance, max relative error", worst_affine, 1e-8);
        Ok(())
    })
}

fn multilinear_anchors(_ctx: &Ctx) -> Outcome {
    guarded(Some(9), "multilinear quadrature anchors", |out| {
        let c = parabola();
        let one: &dyn Fn(f64) -> f64 = &|_| 1.0;
        let unit = Interval::closed(0.0, 1.0);
        let t1 = multilinear_t(&c, &[one], &[unit], 8)?;
        let t2 = multilinear_t(&c, &[one, one], &[unit, unit], 8)?;
        out.at_most("|T1 - 2^(1/4)|", (t1 - 2f64.powf(0.25)).abs(), 1e-3);
        out.at_most("|T2 - 2^(1/2)·8/3|", (t2 - 2f64.sqrt() * 8.0 / 3.0).abs(), 5e-3);
        out.data("t1", num(t1));
        out.data("t2", num(t2));
        Ok(())
    })
}

fn convolution_mass_check(_ctx: &Ctx) -> Outcome {
    guarded(Some(11), "convolution mass", |out| {
        let f = |t: f64| bump(2.0 * t - 1.0);
        let (mass, expected) = convolution_mass(&parabola(), f, Interval::closed(0.0, 1.0), 32)?;
        out.at_most("relative mass error", (mass - expected).abs() / expected, 0.02);
        out.data("mass", num(mass));
        out.data("expected", num(expected));
        Ok(())
    })
}

/// Minimum geometric ratio on each decomposition piece (clipped to
/// `[-2, 2]`) of random curves in dimensions 2 and 3.
fn ratio_scan(ctx: &Ctx) -> Outcome {
    guarded(None, "geometric ratio scan", |out| {
        let samples = ctx.effort.pick(4000, 500);
        let window = Interval::closed(-2.0, 2.0);
        let mut rows = Vec::new();
        let mut global_min = f64::INFINITY;
        for i in 0..ctx.curves {
            let d = 2 + i % 2;
            let fam = RandomFamily { dim: d, degree: d + 2, coeff_box: 1.0, count: 1, seed: None, near_degenerate: None };
            let c = fam.generate(ctx.seed.wrapping_add(0x0900_0000 + i as u64))?.curves.remove(0);
            let dec = dw_decompose(&c)?;
            // Pieces built around clustered zeros may hold several zeros of
            // L; the scan runs between consecutive ones.
            let zeros = real_roots(&c.torsion_poly(), ROOT_TOL)?;
            let mut curve_min = f64::INFINITY;
            let mut scanned = 0u64;
            for piece in &dec.pieces {
                let iv = piece.interval.intersect(&window);
                if iv.is_empty() {
                    continue;
                }
                let mut cuts: Vec<f64> = zeros.iter().copied().filter(|&z| iv.interior_contains(z)).collect();
                cuts.insert(0, iv.lo);
                cuts.push(iv.hi);
                for w in cuts.windows(2) {
                    if !(w[1] - w[0] > 1e-6) {
                        continue;
                    }
                    let scan = geometric_ratio_scan(&c, Interval::closed(w[0], w[1]), samples, ctx.seed.wrapping_add(scanned))?;
                    curve_min = curve_min.min(scan.min_ratio);
                    scanned += 1;
                }
            }
            global_min = global_min.min(curve_min);
            rows.push(json!({ "dim": d, "pieces": dec.len(), "min_ratio": num(curve_min) }));
        }
        out.above("smallest ratio over all curves and pieces", global_min, 0.0);
        out.data("curves", Value::Array(rows));
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// oscillatory

fn knapp_scaling(ctx: &Ctx) -> Outcome {
    guarded(Some(6), "knapp scaling", |out| {
        let deltas: Vec<f64> = (3..=7).map(|k| 2f64.powi(-k)).collect();
        let config = KnappConfig { resolution: ctx.effort.pick(512, 128), ..KnappConfig::default() };
        let fit = knapp_scaling_fit(ctx.exec, &parabola(), 6.0, &deltas, &config)?;
        out.at_most("|slope - 0.5|", (fit.slope - 0.5).abs(), 0.05);
        out.data("slope", num(fit.slope));
        out.data("r_squared", num(fit.r_squared));
        out.data("ratio_spread", num(fit.ratio_spread));
        let count = packet_count_slope(&parabola(), 2.0, &[2, 4, 8, 16], 10.0)?;
        out.at_most("|packet-count slope - 1/q'|", (count.slope - 0.5).abs(), 0.05);
        out.data("packet_slope", num(count.slope));
        Ok(())
    })
}

fn stationary_phase(ctx: &Ctx) -> Outcome {
    guarded(Some(7), "stationary phase", |out| {
        let top = ctx.effort.pick(8, 6);
        let radii: Vec<f64> = (0..=top).map(|k| 64.0 * 2f64.powf(k as f64 / 2.0)).collect();
        let nodes = ctx.effort.pick(8192, 4096);
        let support = Interval::closed(-1.0, 1.0);
        let a = stationary_decay_fit(&parabola(), bump, support, &[0.0, 1.0], &radii, nodes)?;
        let b = stationary_decay_fit(&parabola(), bump, support, &[0.0, 1.0], &radii, 2 * nodes)?;
        out.at_most("|exponent + 0.5|", (a.exponent + 0.5).abs(), 0.05);
        out.at_most("|exponent change under node doubling|", (a.exponent - b.exponent).abs(), 0.01);
        out.data("exponent", num(a.exponent));
        out.data("exponent_doubled", num(b.exponent));
        Ok(())
    })
}

fn multilinear_decay(ctx: &Ctx) -> Outcome {
    guarded(Some(10), "multilinear decay", |out| {
        // L = 6t: a simple zero, so k = 1 on (0, 1].
        let c = PolyCurve::from_coeffs(&[&[0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]])?;
        let config = DecayConfig { resolution: ctx.effort.pick(256, 64), nodes: ctx.effort.pick(1024, 256), ..DecayConfig::default() };
        let fit = multilinear_decay_fit(ctx.exec, &c, Interval::new(0.0, 1.0, false, true), &[0, 2, 4, 6], &config)?;
        let decreasing = fit.raw_norms.windows(2).all(|w| w[1] < w[0]);
        let normalized_decreasing = fit.points.windows(2).all(|w| w[1].1 < w[0].1);
        out.holds("product norms strictly decreasing", decreasing);
        out.holds("normalized product norms strictly decreasing", normalized_decreasing);
        out.above("fitted epsilon", fit.epsilon, 0.0);
        out.at_least("r^2", fit.r_squared, 0.9);
        out.data("raw_norms", json!(fit.raw_norms.iter().map(|&v| num(v)).collect::<Vec<_>>()));
        out.data("log2_normalized", json!(fit.points.iter().map(|p| num(p.1)).collect::<Vec<_>>()));
        Ok(())
    })
}

/// Parameters of the smoke sweep: 20 random degree-4 plane curves at
/// `(p, q) = (2, 6)`.
pub fn smoke_sweep_params(effort: Effort) -> (RandomFamily, GridConfig, SearchConfig) {
    let family = RandomFamily { dim: 2, degree: 4, coeff_box: 1.0, count: 20, seed: None, near_degenerate: None };
    let grid = GridConfig { resolution: effort.pick(64, 32), nodes: effort.pick(512, 256), ..GridConfig::default() };
    let search = SearchConfig { budget: effort.pick(40, 12), ..SearchConfig::default() };
    (family, grid, search)
}

fn uniformity_sweep(ctx: &Ctx) -> Outcome {
    let mut out = Outcome::new(Some(14), "uniformity sweep");
    let (family, grid, search) = smoke_sweep_params(ctx.effort);
    let run = || -> Result<(sweep::Sweep, String), crate::CliError> {
        let fam = family.generate(ctx.seed)?;
        let s = sweep::run(ctx.exec, &fam, &grid, &search)?;
        let text = crate::report::to_text(&s.to_json());
        Ok((s, text))
    };
    match (run(), run()) {
        (Ok((s, first)), Ok((_, second))) => {
            let finite = s.rows.iter().filter(|r| r.weighted.ratio().is_some_and(f64::is_finite)).count();
            out.at_least("curves with a finite weighted ratio", finite as f64, family.count as f64);
            match s.weighted_max() {
                Some(m) => out.above("weighted family max", m, 0.0),
                None => out.holds("weighted family max reported", false),
            }
            out.holds("rerun byte-identical", first == second);
            out.data("family_max_weighted", s.weighted_max().map_or(Value::Null, num));
            out.data("family_max_unweighted", s.unweighted_max().map_or(Value::Null, num));
        }
        (Err(e), _) | (_, Err(e)) => out.error("completed", e),
    }
    out
}
