//! Extension operators `E f(x) = ∫ e^{i x·γ(t)} f(t) λ(t) dt` (and the
//! unweighted `F`) discretized by the composite midpoint rule, together with
//! box norms, Knapp examples, stationary phase checks and a norm lower-bound
//! search.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::curve::{arclength_from_torsion, PolyCurve};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::fit::{linear_fit, LinearFit};
use crate::interval::Interval;
use crate::quad::{pairwise_sum, Rule};

/// Largest admissible phase change between neighbouring quadrature nodes.
pub const MAX_PHASE_STEP: f64 = PI / 4.0;
/// Cap on the number of grid points (512² in the plane, 64³ in space).
pub const MAX_GRID_POINTS: usize = 1 << 18;

/// A cell-centred grid on an axis-aligned box, plus the quadrature used in `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: usize,
    pub nodes: usize,
    pub support: Interval,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, resolution: usize, nodes: usize, support: Interval) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("box corners must have equal, nonzero dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::invalid("box must be bounded with lo < hi on every axis"));
        }
        if resolution < 2 {
            return Err(Error::invalid("grid resolution must be at least 2"));
        }
        let total = (resolution as f64).powi(lo.len() as i32);
        if total > MAX_GRID_POINTS as f64 {
            return Err(Error::invalid("grid exceeds the direct-summation cap"));
        }
        if nodes == 0 {
            return Err(Error::invalid("need at least one quadrature node"));
        }
        if !support.is_bounded() || support.is_empty() {
            return Err(Error::invalid("t-support must be a bounded nonempty interval"));
        }
        Ok(GridSpec { lo, hi, resolution, nodes, support })
    }

    /// The box `[-h, h]^d`.
    pub fn cube(d: usize, half: f64, resolution: usize, nodes: usize, support: Interval) -> Result<Self> {
        Self::new(vec![-half; d], vec![half; d], resolution, nodes, support)
    }

    /// The box `∏ [-h_i, h_i]`.
    pub fn centered(half: &[f64], resolution: usize, nodes: usize, support: Interval) -> Result<Self> {
        Self::new(half.iter().map(|h| -h).collect(), half.to_vec(), resolution, nodes, support)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.resolution as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.spacing(i)).product()
    }

    /// Row-major multi-index of a flat index; the first axis varies slowest.
    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let d = self.dim();
        let mut out = vec![0; d];
        for axis in (0..d).rev() {
            out[axis] = idx % self.resolution;
            idx /= self.resolution;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx).iter().enumerate().map(|(axis, &i)| self.lo[axis] + (i as f64 + 0.5) * self.spacing(axis)).collect()
    }

    /// Whether the point touches the outermost layer of cells.
    pub fn on_boundary(&self, idx: usize) -> bool {
        self.multi_index(idx).iter().any(|&i| i == 0 || i + 1 == self.resolution)
    }

    /// `max_i |x_i|` per axis over the box.
    pub fn corner(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| a.abs().max(b.abs())).collect()
    }
}

/// A curve sampled on a midpoint quadrature rule, ready to evaluate
/// `E f(x) ≈ Σ_k w_k f(t_k) e^{i x·γ(t_k)}`.
#[derive(Clone, Debug)]
pub struct Extension {
    dim: usize,
    nodes: Vec<f64>,
    /// Quadrature weight times `λ(t_k)` (or times one when unweighted).
    weights: Vec<f64>,
    cell: Vec<f64>,
    points: Vec<f64>,
    derivs: Vec<f64>,
    weighted: bool,
}

impl Extension {
    pub fn midpoint(curve: &PolyCurve, support: Interval, nodes: usize, weighted: bool) -> Result<Self> {
        if !support.is_bounded() || support.is_empty() {
            return Err(Error::invalid("t-support must be a bounded nonempty interval"));
        }
        if nodes == 0 {
            return Err(Error::invalid("need at least one quadrature node"));
        }
        Ok(Self::from_rule(curve, &Rule::midpoint(support.lo, support.hi, nodes), weighted))
    }

    pub fn for_grid(curve: &PolyCurve, grid: &GridSpec, weighted: bool) -> Result<Self> {
        if grid.dim() != curve.dim() {
            return Err(Error::invalid("grid and curve dimensions differ"));
        }
        Self::midpoint(curve, grid.support, grid.nodes, weighted)
    }

    /// Uses the rule's weights as cell widths for the aliasing check.
    pub fn from_rule(curve: &PolyCurve, rule: &Rule, weighted: bool) -> Self {
        let d = curve.dim();
        let torsion = curve.torsion_poly();
        let dgamma = curve.derivative_curve(1);
        let mut points = Vec::with_capacity(rule.len() * d);
        let mut derivs = Vec::with_capacity(rule.len() * d);
        let mut weights = Vec::with_capacity(rule.len());
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            points.extend(curve.components().iter().map(|c| c.eval(t)));
            derivs.extend(dgamma.iter().map(|c| c.eval(t)));
            let lam = if weighted { arclength_from_torsion(torsion.eval(t), d) } else { 1.0 };
            weights.push(w * lam);
        }
        Extension { dim: d, nodes: rule.nodes.clone(), weights, cell: rule.weights.clone(), points, derivs, weighted }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.nodes.iter().map(|&t| f(t)).collect()
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> Vec<Complex64> {
        self.nodes.iter().map(|&t| Complex64::new(f(t), 0.0)).collect()
    }

    /// `max_k h_k·|x·γ'(t_k)|`
    pub fn phase_step(&self, x: &[f64]) -> f64 {
        let d = self.dim;
        self.cell
            .iter()
            .enumerate()
            .map(|(k, h)| h * self.derivs[k * d..(k + 1) * d].iter().zip(x).map(|(g, xi)| g * xi).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// Worst phase step over a box with the given per-axis extents.
    pub fn corner_phase_step(&self, corner: &[f64]) -> f64 {
        let d = self.dim;
        self.cell
            .iter()
            .enumerate()
            .map(|(k, h)| h * self.derivs[k * d..(k + 1) * d].iter().zip(corner).map(|(g, c)| g.abs() * c).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        let step = self.corner_phase_step(&grid.corner());
        if step > MAX_PHASE_STEP {
            return Err(Error::Aliasing { step, limit: MAX_PHASE_STEP, context: "grid corner" });
        }
        Ok(())
    }

    pub fn eval(&self, f: &[Complex64], x: &[f64]) -> Result<Complex64> {
        let step = self.phase_step(x);
        if step > MAX_PHASE_STEP {
            return Err(Error::Aliasing { step, limit: MAX_PHASE_STEP, context: "evaluation point" });
        }
        Ok(self.eval_unchecked(f, x))
    }

    /// The quadrature sum without the aliasing check.
    pub fn eval_unchecked(&self, f: &[Complex64], x: &[f64]) -> Complex64 {
        let d = self.dim;
        let mut acc = Complex64::zero();
        for (k, fk) in f.iter().enumerate() {
            if fk.is_zero() {
                continue;
            }
            let phase: f64 = self.points[k * d..(k + 1) * d].iter().zip(x).map(|(g, xi)| g * xi).sum();
            let (s, c) = phase.sin_cos();
            acc += fk * Complex64::new(c, s) * self.weights[k];
        }
        acc
    }

    /// The field on every grid point, in row-major order.
    pub fn field<E: Executor>(&self, exec: &E, f: &[Complex64], grid: &GridSpec) -> Result<Vec<Complex64>> {
        if grid.dim() != self.dim {
            return Err(Error::invalid("grid and curve dimensions differ"));
        }
        self.check_grid(grid)?;
        Ok(exec.map(grid.len(), |idx| self.eval_unchecked(f, &grid.point(idx))))
    }

    /// `(Σ_k |f_k|^p λ_k w_k)^{1/p}`: the `L^p(λ dt)` norm for a weighted
    /// operator and the `L^p(dt)` norm otherwise.
    pub fn input_norm(&self, f: &[Complex64], p: f64) -> f64 {
        let terms: Vec<f64> = f.iter().zip(&self.weights).map(|(v, w)| v.norm().powf(p) * w).collect();
        pairwise_sum(&terms).powf(1.0 / p)
    }

    /// Precomputes `w_k e^{i x·γ(t_k)}` for every grid point so repeated
    /// evaluations become matrix–vector products.
    pub fn phase_table<E: Executor>(&self, exec: &E, grid: &GridSpec) -> Result<PhaseTable> {
        self.check_grid(grid)?;
        let d = self.dim;
        let m = self.nodes.len();
        let rows = exec.map(grid.len(), |idx| {
            let x = grid.point(idx);
            (0..m)
                .map(|k| {
                    let phase: f64 = self.points[k * d..(k + 1) * d].iter().zip(&x).map(|(g, xi)| g * xi).sum();
                    let (s, c) = phase.sin_cos();
                    Complex64::new(c, s) * self.weights[k]
                })
                .collect::<Vec<_>>()
        });
        Ok(PhaseTable { nodes: m, entries: rows.into_iter().flatten().collect() })
    }
}

#[derive(Clone, Debug)]
pub struct PhaseTable {
    nodes: usize,
    entries: Vec<Complex64>,
}

impl PhaseTable {
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.entries.chunks(self.nodes).map(|row| row.iter().zip(f).fold(Complex64::zero(), |acc, (a, b)| acc + a * b)).collect()
    }
}

/// One-shot `E_γ f(x)` (or `F_γ f(x)` when `weighted` is false) with a
/// midpoint rule of `nodes` cells on `support`.
pub fn extension_eval<F: Fn(f64) -> Complex64>(
    curve: &PolyCurve,
    f: F,
    weighted: bool,
    x: &[f64],
    support: Interval,
    nodes: usize,
) -> Result<Complex64> {
    let op = Extension::midpoint(curve, support, nodes, weighted)?;
    op.eval(&op.sample(f), x)
}

/// `(Σ |v|^q · cell volume)^{1/q}`; quasi-norms for `q < 1` included.
pub fn grid_norm(values: &[Complex64], grid: &GridSpec, q: f64) -> f64 {
    assert_eq!(values.len(), grid.len(), "field does not match the grid");
    let terms: Vec<f64> = values.iter().map(|v| v.norm().powf(q)).collect();
    (pairwise_sum(&terms) * grid.cell_volume()).powf(1.0 / q)
}

/// Largest magnitude on the boundary shell relative to the peak magnitude.
pub fn tail_indicator(values: &[Complex64], grid: &GridSpec) -> f64 {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let shell = (0..values.len()).filter(|&i| grid.on_boundary(i)).map(|i| values[i].norm()).fold(0.0, f64::max);
    shell / peak
}

// ---------------------------------------------------------------------------
// Knapp examples

#[derive(Clone, Debug, PartialEq)]
pub struct KnappPacket {
    pub n: u32,
    pub q_prime: f64,
    pub x: Vec<f64>,
    /// `[2^{-n}, 2^{-n+1})`
    pub support: Interval,
    pub amplitude: f64,
}

/// `g = Σ_n 2^{n/q'} e^{i x_n·γ(t)} χ_{[2^{-n}, 2^{-n+1})}` for `n = 1..=N`.
#[derive(Clone, Debug)]
pub struct KnappFamily {
    pub packets: Vec<KnappPacket>,
    curve: PolyCurve,
}

pub const MAX_PACKETS: u32 = 20;

/// Packets modulated to points `x_n` on the first axis. Consecutive points
/// are `spacing` times twice the dual-box diameter `(Σ_i 4^{n i})^{1/2}` of
/// packet `n` apart.
pub fn knapp_packets(curve: &PolyCurve, q_prime: f64, count: u32, spacing: f64) -> Result<KnappFamily> {
    if count == 0 || count > MAX_PACKETS {
        return Err(Error::invalid("packet count must lie in 1..=20"));
    }
    if !(spacing > 0.0) {
        return Err(Error::invalid("packet spacing must be positive"));
    }
    if !(q_prime >= 1.0) {
        return Err(Error::invalid("q' must be at least 1"));
    }
    let d = curve.dim();
    let mut offset = 0.0;
    let packets = (1..=count)
        .map(|n| {
            let nf = n as f64;
            let diameter = (1..=d).map(|i| 4f64.powf(nf * i as f64)).sum::<f64>().sqrt();
            offset += spacing * 2.0 * diameter;
            let mut x = vec![0.0; d];
            x[0] = offset;
            KnappPacket {
                n,
                q_prime,
                x,
                support: Interval::half_open(2f64.powi(-(n as i32)), 2f64.powi(1 - n as i32)),
                amplitude: 2f64.powf(nf / q_prime),
            }
        })
        .collect();
    Ok(KnappFamily { packets, curve: curve.clone() })
}

impl KnappFamily {
    pub fn eval(&self, t: f64) -> Complex64 {
        for p in &self.packets {
            if p.support.contains(t) {
                let phase: f64 = self.curve.eval(t).iter().zip(&p.x).map(|(g, x)| g * x).sum();
                let (s, c) = phase.sin_cos();
                return Complex64::new(c, s) * p.amplitude;
            }
        }
        Complex64::zero()
    }

    /// `‖g‖_{L^{q'}(dt)}` by midpoint quadrature on each packet support.
    pub fn lq_prime_norm(&self, nodes_per_packet: usize) -> f64 {
        let q = self.packets.first().map_or(1.0, |p| p.q_prime);
        let parts: Vec<f64> = self
            .packets
            .iter()
            .map(|p| Rule::midpoint(p.support.lo, p.support.hi, nodes_per_packet).integrate(|t| self.eval(t).norm().powf(q)))
            .collect();
        pairwise_sum(&parts).powf(1.0 / q)
    }
}

/// Log–log slope of `‖g‖_{q'}` against the packet count.
pub fn packet_count_slope(curve: &PolyCurve, q_prime: f64, counts: &[u32], spacing: f64) -> Result<LinearFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in counts {
        let fam = knapp_packets(curve, q_prime, n, spacing)?;
        xs.push((n as f64).ln());
        ys.push(fam.lq_prime_norm(64).ln());
    }
    linear_fit(&xs, &ys)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KnappConfig {
    /// Dual box half-widths are `c·δ^{-i}` on axis `i`.
    pub box_scale: f64,
    pub resolution: usize,
    pub nodes: usize,
}

impl Default for KnappConfig {
    fn default() -> Self {
        KnappConfig { box_scale: 8.0 * PI, resolution: 512, nodes: 128 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnappFit {
    pub slope: f64,
    pub expected: f64,
    pub r_squared: f64,
    /// `(δ, ‖E χ_{[0,δ]}‖_q, ‖χ_{[0,δ]}‖_{L^p(λ)})` with `p` on the scaling line.
    pub points: Vec<(f64, f64, f64)>,
    /// max/min of the Knapp ratio `‖Ef‖_q / ‖f‖_{L^p(λ)}` across `δ`.
    pub ratio_spread: f64,
}

/// Fits `log ‖E_Γ χ_{[0,δ]}‖_{L^q(box_δ)}` against `log δ`, where `Γ` is the
/// curve normalized at `0` and `box_δ = ∏ [−cδ^{-i}, cδ^{-i}]`. The scaling
/// prediction is `1 − d(d+1)/(2q)`.
pub fn knapp_scaling_fit<E: Executor>(exec: &E, curve: &PolyCurve, q: f64, deltas: &[f64], config: &KnappConfig) -> Result<KnappFit> {
    let d = curve.dim();
    let weight = (d * (d + 1)) as f64 / 2.0;
    let (_, gamma) = curve.normalize_at(0.0)?;
    let l = gamma.torsion_poly();
    // Scaling-line exponent: p' = 2q/(d(d+1)).
    let p_prime = q / weight;
    let p = if p_prime > 1.0 { p_prime / (p_prime - 1.0) } else { f64::INFINITY };
    let mut points = Vec::new();
    for &delta in deltas {
        if !(delta > 0.0) {
            return Err(Error::invalid("δ must be positive"));
        }
        let support = Interval::closed(0.0, delta);
        let probe = Rule::midpoint(0.0, delta, config.nodes);
        if probe.nodes.iter().any(|&t| l.eval(t) == 0.0) {
            return Err(Error::SingularPoint { t: 0.0 });
        }
        let half: Vec<f64> = (1..=d).map(|i| config.box_scale * delta.powi(-(i as i32))).collect();
        let grid = GridSpec::centered(&half, config.resolution, config.nodes, support)?;
        let op = Extension::for_grid(&gamma, &grid, true)?;
        let f = op.sample_real(|_| 1.0);
        let field = op.field(exec, &f, &grid)?;
        let norm = grid_norm(&field, &grid, q);
        let input = if p.is_finite() { op.input_norm(&f, p) } else { 1.0 };
        points.push((delta, norm, input));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    let ratios: Vec<f64> = points.iter().map(|p| p.1 / p.2).collect();
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(KnappFit { slope: fit.slope, expected: 1.0 - weight / q, r_squared: fit.r_squared, points, ratio_spread: hi / lo })
}

// ---------------------------------------------------------------------------
// Stationary phase

#[derive(Clone, Debug, PartialEq)]
pub struct DecayExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(r, |E f(r·direction)|)`
    pub points: Vec<(f64, f64)>,
}

/// `exp(−1/(1 − t²))` on `(−1, 1)`.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Fits `log |E f(r·direction)|` against `log r`.
pub fn stationary_decay_fit<F: Fn(f64) -> f64>(
    curve: &PolyCurve,
    f: F,
    support: Interval,
    direction: &[f64],
    radii: &[f64],
    nodes: usize,
) -> Result<DecayExponentFit> {
    if direction.len() != curve.dim() {
        return Err(Error::invalid("direction has the wrong dimension"));
    }
    let op = Extension::midpoint(curve, support, nodes, true)?;
    let fv = op.sample_real(f);
    let mut points = Vec::new();
    for &r in radii {
        let x: Vec<f64> = direction.iter().map(|v| v * r).collect();
        points.push((r, op.eval(&fv, &x)?.norm()));
    }
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::DegenerateData("extension vanishes at a sample radius"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(DecayExponentFit { exponent: fit.slope, intercept: fit.intercept, r_squared: fit.r_squared, points })
}

// ---------------------------------------------------------------------------
// Norm lower bounds

/// Parametric test functions on the grid's `t`-support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFamily {
    /// `exp(−(t−c)²/(2w²))·e^{iξt}`
    Gaussian,
    /// `χ_{[a, a+δ]}` with `δ` dyadic
    Indicator,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunction {
    Gaussian { center: f64, width: f64, frequency: f64 },
    Indicator { start: f64, length: f64 },
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> Complex64 {
        match *self {
            TestFunction::Gaussian { center, width, frequency } => {
                let u = (t - center) / width;
                let (s, c) = (frequency * t).sin_cos();
                Complex64::new(c, s) * (-0.5 * u * u).exp()
            }
            TestFunction::Indicator { start, length } => {
                if t >= start && t < start + length {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::zero()
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormSearch {
    pub lower_bound: f64,
    pub best: TestFunction,
    pub evaluations: usize,
}

/// Coordinate ascent on `‖E f‖_{L^q(box)} / ‖f‖_{L^p(λ)}` (or the
/// unweighted pair `‖F f‖_q / ‖f‖_{L^p(dt)}`) over the family. Running out of
/// budget is the normal way to stop.
pub fn norm_ratio_search<E: Executor>(
    exec: &E,
    curve: &PolyCurve,
    p: f64,
    q: f64,
    grid: &GridSpec,
    family: TestFamily,
    budget: usize,
    weighted: bool,
) -> Result<NormSearch> {
    let op = Extension::for_grid(curve, grid, weighted)?;
    let table = op.phase_table(exec, grid)?;
    let iv = grid.support;
    let len = iv.length();
    let cell = len / grid.nodes as f64;
    let mut evaluations = 0usize;
    let mut score = |tf: &TestFunction| -> f64 {
        evaluations += 1;
        let f = op.sample(|t| tf.eval(t));
        let input = op.input_norm(&f, p);
        if !(input > 0.0) {
            return 0.0;
        }
        grid_norm(&table.apply(&f), grid, q) / input
    };

    let clamp = |v: f64, lo: f64, hi: f64| v.max(lo).min(hi);
    let project = |tf: TestFunction| -> TestFunction {
        match tf {
            TestFunction::Gaussian { center, width, frequency } => TestFunction::Gaussian {
                center: clamp(center, iv.lo, iv.hi),
                width: clamp(width, 2.0 * cell, len),
                frequency: clamp(frequency, -0.5 / cell, 0.5 / cell),
            },
            TestFunction::Indicator { start, length } => {
                let length = clamp(length, 2.0 * cell, len);
                TestFunction::Indicator { start: clamp(start, iv.lo, iv.hi - length), length }
            }
        }
    };

    let mut starts = Vec::new();
    if matches!(family, TestFamily::Gaussian | TestFamily::Both) {
        starts.push(TestFunction::Gaussian { center: iv.sample_point(), width: len / 4.0, frequency: 0.0 });
    }
    if matches!(family, TestFamily::Indicator | TestFamily::Both) {
        starts.push(TestFunction::Indicator { start: iv.lo, length: len });
    }
    let per_start = budget / starts.len().max(1);

    let mut best: Option<(f64, TestFunction)> = None;
    for start in starts {
        let mut cur = project(start);
        let mut cur_score = score(&cur);
        let mut used = 1;
        let mut steps: Vec<f64> = match cur {
            TestFunction::Gaussian { .. } => vec![len / 4.0, 0.5, len.recip() * PI],
            TestFunction::Indicator { .. } => vec![len / 4.0, 0.5],
        };
        'ascent: while used < per_start {
            let mut improved = false;
            for axis in 0..steps.len() {
                for sign in [1.0, -1.0] {
                    if used >= per_start {
                        break 'ascent;
                    }
                    let cand = project(nudge(cur, axis, sign * steps[axis]));
                    if cand == cur {
                        continue;
                    }
                    let s = score(&cand);
                    used += 1;
                    if s > cur_score {
                        cur = cand;
                        cur_score = s;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                steps.iter_mut().for_each(|s| *s *= 0.5);
                if steps.iter().all(|s| *s < 1e-9) {
                    break;
                }
            }
        }
        if best.is_none_or(|b| cur_score > b.0) {
            best = Some((cur_score, cur));
        }
    }
    let (lower_bound, best) = best.ok_or(Error::DegenerateData("empty test family"))?;
    Ok(NormSearch { lower_bound, best, evaluations })
}

/// Moves one parameter. Widths move by the factor `2^step`; indicator
/// lengths stay dyadic multiples of the start and move by a factor two.
fn nudge(tf: TestFunction, axis: usize, step: f64) -> TestFunction {
    match tf {
        TestFunction::Gaussian { center, width, frequency } => match axis {
            0 => TestFunction::Gaussian { center: center + step, width, frequency },
            1 => TestFunction::Gaussian { center, width: width * 2f64.powf(step), frequency },
            _ => TestFunction::Gaussian { center, width, frequency: frequency + step },
        },
        TestFunction::Indicator { start, length } => match axis {
            0 => TestFunction::Indicator { start: start + step, length },
            _ => TestFunction::Indicator { start, length: length * 2f64.powf(step.signum()) },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::AffineMap;
    use crate::exec::Sequential;
    use crate::linalg::Matrix;

    fn parabola() -> PolyCurve {
        PolyCurve::from_coeffs(&[&[0.0, 1.0], &[0.0, 0.0, 1.0]]).unwrap()
    }

    fn one(_: f64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn extension_at_origin() {
        let v = extension_eval(&parabola(), one, true, &[0.0, 0.0], Interval::closed(-1.0, 1.0), 64).unwrap();
        assert!((v.re - 2.0 * 2f64.powf(1.0 / 3.0)).abs() < 1e-12 && v.im.abs() < 1e-15);
        let cubic = PolyCurve::from_coeffs(&[&[0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]).unwrap();
        let odd = |t: f64| Complex64::new(t, 0.0);
        let v = extension_eval(&cubic, odd, false, &[0.0, 0.0], Interval::closed(-1.0, 1.0), 64).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn conjugate_symmetry() {
        let c = parabola();
        let f = |t: f64| Complex64::new(1.0 + t * t, 0.0);
        let iv = Interval::closed(-1.0, 2.0);
        let a = extension_eval(&c, f, true, &[1.3, -0.7], iv, 200).unwrap();
        let b = extension_eval(&c, f, true, &[-1.3, 0.7], iv, 200).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn aliasing_is_rejected() {
        let r = extension_eval(&parabola(), one, true, &[0.0, 1000.0], Interval::closed(-1.0, 1.0), 16);
        assert!(matches!(r, Err(Error::Aliasing { .. })));
    }

    #[test]
    fn grid_norm_basics() {
        let g = GridSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 8, 4, Interval::closed(0.0, 1.0)).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); g.len()];
        for q in [0.5, 1.0, 2.0, 6.0] {
            assert!((grid_norm(&ones, &g, q) - 1.0).abs() < 1e-14);
        }
        let scaled: Vec<_> = ones.iter().map(|v| v * Complex64::new(0.0, -3.0)).collect();
        assert!((grid_norm(&scaled, &g, 3.0) - 3.0).abs() < 1e-13);
        assert_eq!(g.point(0), vec![1.0 / 16.0, 1.0 / 16.0]);
        assert_eq!(g.point(1), vec![1.0 / 16.0, 3.0 / 16.0]);
        assert!(GridSpec::cube(2, 1.0, 1, 4, Interval::closed(0.0, 1.0)).is_err());
        assert!(GridSpec::cube(2, 1.0, 1024, 4, Interval::closed(0.0, 1.0)).is_err());
    }

    #[test]
    fn grid_norm_converges_under_refinement() {
        let c = parabola();
        let norm = |res: usize| {
            let g = GridSpec::cube(2, 8.0, res, 256, Interval::closed(-1.0, 1.0)).unwrap();
            let op = Extension::for_grid(&c, &g, true).unwrap();
            let field = op.field(&Sequential, &op.sample(one), &g).unwrap();
            grid_norm(&field, &g, 6.0)
        };
        let (a, b) = (norm(64), norm(128));
        assert!((a - b).abs() / b < 0.01, "{a} vs {b}");
    }

    #[test]
    fn reparametrization_and_affine_laws() {
        let c = PolyCurve::from_coeffs(&[&[0.1, 1.0, 0.3], &[0.0, 0.2, 1.0, -0.4]]).unwrap();
        let f = |t: f64| Complex64::new((t * 1.7).cos(), t * 0.2);
        let iv = Interval::closed(-0.5, 1.0);
        let x = [2.0, -3.0];
        let base = extension_eval(&c, f, true, &x, iv, 400).unwrap();

        let (a, b) = (-0.8, 0.3);
        let r = c.reparametrize(a, b).unwrap();
        let pre = Interval::closed((iv.hi - b) / a, (iv.lo - b) / a);
        let moved = extension_eval(&r, |t| f(a * t + b), true, &x, pre, 400).unwrap();
        assert!((moved - base).norm() < 1e-10 * base.norm().max(1.0));

        let m = Matrix::from_row_slice(2, 2, &[1.5, 0.4, -0.2, 0.9]);
        let map = AffineMap::linear(m.clone()).unwrap();
        let mg = c.apply_affine(&map);
        let lhs = extension_eval(&mg, f, true, &x, iv, 400).unwrap();
        let mtx = crate::linalg::transpose_vec(&m, &x);
        let rhs = extension_eval(&c, f, true, &mtx, iv, 400).unwrap() * map.det().abs().powf(1.0 / 3.0);
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn modulation_translates_field() {
        let c = parabola();
        let iv = Interval::closed(-1.0, 1.0);
        let x0 = [1.5, -0.5];
        let x = [0.7, 2.0];
        let shifted = [x[0] - x0[0], x[1] - x0[1]];
        let f = |t: f64| Complex64::new(1.0 - t * t, 0.0);
        let g = |t: f64| {
            let ph = x0[0] * t + x0[1] * t * t;
            Complex64::new(ph.cos(), ph.sin()) * f(t)
        };
        let a = extension_eval(&c, g, true, &shifted, iv, 300).unwrap();
        let b = extension_eval(&c, f, true, &x, iv, 300).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn midpoint_order_on_smooth_input() {
        let c = parabola();
        let iv = Interval::closed(-1.0, 1.0);
        let f = |t: f64| Complex64::new((1.0 + t).exp(), 0.0);
        let x = [1.0, 2.0];
        let v = |n| extension_eval(&c, f, true, &x, iv, n).unwrap();
        let reference = v(8192);
        let e1 = (v(64) - reference).norm();
        let e2 = (v(128) - reference).norm();
        assert!((e1 / e2).log2() > 1.9);
    }

    #[test]
    fn packets() {
        let c = parabola();
        let one_packet = knapp_packets(&c, 2.0, 1, 10.0).unwrap();
        assert!((one_packet.lq_prime_norm(64) - 1.0).abs() < 1e-12);
        let fam = knapp_packets(&c, 2.0, 6, 10.0).unwrap();
        for w in fam.packets.windows(2) {
            assert!(w[0].support.intersect(&w[1].support).is_empty());
            assert!(w[1].x[0] > w[0].x[0]);
        }
        let fit = packet_count_slope(&c, 2.0, &[2, 4, 8, 16], 10.0).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.05);
        assert!(knapp_packets(&c, 2.0, 21, 10.0).is_err());
    }

    #[test]
    fn stationary_phase_rejects_zero_input() {
        let r = stationary_decay_fit(&parabola(), |_| 0.0, Interval::closed(-1.0, 1.0), &[0.0, 1.0], &[16.0, 32.0], 512);
        assert!(matches!(r, Err(Error::DegenerateData(_))));
    }

    #[test]
    fn phase_table_matches_direct_field() {
        let c = parabola();
        let g = GridSpec::cube(2, 4.0, 8, 64, Interval::closed(-1.0, 1.0)).unwrap();
        let op = Extension::for_grid(&c, &g, true).unwrap();
        let f = op.sample(|t| Complex64::new(t, 1.0));
        let direct = op.field(&Sequential, &f, &g).unwrap();
        let table = op.phase_table(&Sequential, &g).unwrap().apply(&f);
        for (a, b) in direct.iter().zip(&table) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn indicator_search_reproduces_knapp_value() {
        let c = parabola();
        let g = GridSpec::cube(2, 8.0, 32, 256, Interval::closed(0.0, 1.0)).unwrap();
        let s = norm_ratio_search(&Sequential, &c, 2.0, 6.0, &g, TestFamily::Indicator, 1, true).unwrap();
        let op = Extension::for_grid(&c, &g, true).unwrap();
        let f = op.sample(one);
        let direct = grid_norm(&op.field(&Sequential, &f, &g).unwrap(), &g, 6.0) / op.input_norm(&f, 2.0);
        assert!((s.lower_bound - direct).abs() < 1e-12 * direct);
        let more = norm_ratio_search(&Sequential, &c, 2.0, 6.0, &g, TestFamily::Both, 30, true).unwrap();
        assert!(more.lower_bound >= s.lower_bound * (1.0 - 1e-12));
        assert!(more.evaluations <= 30);
    }
}
