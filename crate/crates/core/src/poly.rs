//! Univariate real polynomials.
//!
//! Coefficients are stored in ascending order and kept canonical: the
//! highest stored coefficient is nonzero, and the zero polynomial has no
//! coefficients at all.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 16;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c·t^k`
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
    }

    /// `Σ |c_k| |t|^k`, the rounding-error scale of [`Polynomial::eval`].
    pub fn eval_abs(&self, t: f64) -> f64 {
        let t = t.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c.abs())
    }

    pub fn derivative(&self, order: usize) -> Polynomial {
        if order >= self.coeffs.len() {
            return Polynomial::zero();
        }
        let coeffs = (order..self.coeffs.len())
            .map(|k| {
                let falling: f64 = (k + 1 - order..=k).map(|j| j as f64).product();
                falling * self.coeffs[k]
            })
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `t ↦ q(a·t + b)`
    pub fn compose_affine(&self, a: f64, b: f64) -> Polynomial {
        let lin = Polynomial::new(vec![b, a]);
        let mut acc = Polynomial::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Polynomial::constant(c);
        }
        acc
    }

    /// Quotient of `(q(t) - q(r)) / (t - r)` by synthetic division.
    pub fn deflate_at(&self, r: f64) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let n = self.coeffs.len() - 1;
        let mut out = vec![0.0; n];
        let mut acc = 0.0;
        for k in (1..=n).rev() {
            acc = acc * r + self.coeffs[k];
            out[k - 1] = acc;
        }
        Polynomial::new(out)
    }

    /// Drops coefficients whose magnitude is at or below `bound[k]`.
    pub(crate) fn clean_against(&self, bound: &Polynomial, rel: f64) -> Polynomial {
        let coeffs = self.coeffs.iter().enumerate().map(|(k, &c)| if c.abs() <= rel * bound.coeff(k) { 0.0 } else { c }).collect();
        Polynomial::new(coeffs)
    }

    pub fn abs_coeffs(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.abs()).collect())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    /// Highest degree first, e.g. `t^3 - 2.5t + 1`. Output parses back to
    /// the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    f.write_char('-')?;
                }
            } else {
                f.write_str(if c < 0.0 { " - " } else { " + " })?;
            }
            first = false;
            if k == 0 || mag != 1.0 {
                write!(f, "{}", mag)?;
            }
            match k {
                0 => {}
                1 => f.write_char('t')?,
                _ => write!(f, "t^{}", k)?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses sums of terms `c*t^k` in the single variable `t`.
///
/// Accepted forms per term: `3`, `2.5t`, `2.5*t`, `t^4`, `-t^2/2`, `1e-3t^2`.
pub fn parse_poly(expr: &str) -> Result<Polynomial> {
    Parser { src: expr.as_bytes(), pos: 0 }.parse()
}

impl core::str::FromStr for Polynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    fn parse(mut self) -> Result<Polynomial> {
        let mut coeffs = vec![0.0; MAX_DEGREE + 1];
        let mut sign = 1.0;
        match self.peek() {
            Some(b'-') => {
                sign = -1.0;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            None => return Err(self.err("empty expression")),
            _ => {}
        }
        loop {
            let (c, k) = self.term()?;
            coeffs[k] += sign * c;
            match self.peek() {
                None => break,
                Some(b'+') => sign = 1.0,
                Some(b'-') => sign = -1.0,
                Some(ch) => return Err(self.unexpected(ch)),
            }
            self.pos += 1;
        }
        Ok(Polynomial::new(coeffs))
    }

    fn unexpected(&self, ch: u8) -> Error {
        if ch.is_ascii_alphabetic() {
            let start = self.pos;
            let mut end = start;
            while end < self.src.len() && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_') {
                end += 1;
            }
            Error::UnknownIdentifier { position: start, name: String::from_utf8_lossy(&self.src[start..end]).to_string() }
        } else {
            self.err(alloc::format!("unexpected character `{}`", ch as char))
        }
    }

    fn term(&mut self) -> Result<(f64, usize)> {
        let mut c = 1.0;
        let mut have_number = false;
        match self.peek() {
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => {
                c = self.number()?;
                have_number = true;
            }
            Some(b't') => {}
            Some(ch) => return Err(self.unexpected(ch)),
            None => return Err(self.err("expected a term")),
        }
        let mut k = 0;
        let mut star = false;
        if have_number && self.peek() == Some(b'*') {
            self.pos += 1;
            star = true;
        }
        match self.peek() {
            Some(b't') if !self.ident_continues(self.pos + 1) => {
                self.pos += 1;
                k = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    k = self.integer()?;
                }
            }
            Some(ch) if ch.is_ascii_alphabetic() => return Err(self.unexpected(ch)),
            _ if star => return Err(self.err("expected `t` after `*`")),
            _ => {}
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            match self.peek() {
                Some(ch) if ch.is_ascii_digit() || ch == b'.' => {}
                _ => return Err(self.err("expected a number after `/`")),
            }
            let den = self.number()?;
            if den == 0.0 {
                return Err(self.err("division by zero"));
            }
            c /= den;
        }
        if k > MAX_DEGREE {
            return Err(Error::Degree { degree: k });
        }
        Ok((c, k))
    }

    fn ident_continues(&self, at: usize) -> bool {
        self.src.get(at).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let mut i = start;
        while i < s.len() && s[i].is_ascii_digit() {
            i += 1;
        }
        if i < s.len() && s[i] == b'.' {
            i += 1;
            while i < s.len() && s[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = core::str::from_utf8(&s[start..i]).map_err(|_| self.err("invalid utf-8"))?;
        let v: f64 = text.parse().map_err(|_| self.err(alloc::format!("malformed number `{}`", text)))?;
        self.pos = i;
        Ok(v)
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer exponent"));
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        text.parse().map_err(|_| Error::Parse { position: start, message: "exponent too large".into() })
    }
}

// ---------------------------------------------------------------------------
// Roots

/// Distinct complex roots with multiplicities, sorted by real part and then
/// imaginary part. Nonreal roots come in exact conjugate pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRootSet {
    pub roots: Vec<(Complex64, usize)>,
    /// Largest `|q(root)| / Σ|c_k||root|^k` over the returned roots.
    pub residual: f64,
}

impl ComplexRootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Real roots (exactly zero imaginary part) with multiplicities.
    pub fn real_roots(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.roots.iter().filter(|(z, _)| z.im == 0.0).map(|(z, m)| (z.re, *m))
    }

    pub fn from_points(points: &[Complex64]) -> Self {
        ComplexRootSet { roots: points.iter().map(|&z| (z, 1)).collect(), residual: 0.0 }
    }
}

const ROOT_ITERATIONS: usize = 2000;
const MERGE_FLOOR: f64 = 1e-6;

/// All complex roots of `q` by Aberth–Ehrlich simultaneous iteration from
/// deterministic starting points.
///
/// Roots whose cluster radius is below `max(1e-6, tol^(1/m))·(1+|z|)` for a
/// prospective multiplicity `m` are merged into one root of multiplicity `m`.
pub fn roots(q: &Polynomial, tol: f64) -> Result<ComplexRootSet> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let c = q.coeffs();
    let zero_mult = c.iter().take_while(|&&x| x == 0.0).count();
    let reduced = Polynomial::new(c[zero_mult..].to_vec());
    let n = reduced.degree().unwrap_or(0);

    let mut points: Vec<Complex64> = Vec::with_capacity(n);
    if n == 1 {
        points.push(Complex64::new(-reduced.coeff(0) / reduced.coeff(1), 0.0));
    } else if n > 1 {
        points = aberth(&reduced)?;
    }

    let clusters = merge_clusters(&reduced, &points, tol);
    let mut roots = symmetrize(clusters);
    if zero_mult > 0 {
        roots.push((Complex64::zero(), zero_mult));
    }
    roots.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));

    let residual = roots
        .iter()
        .map(|(z, _)| {
            let scale = q.abs_coeffs().eval(z.norm()).max(f64::MIN_POSITIVE);
            q.eval_complex(*z).norm() / scale
        })
        .fold(0.0, f64::max);
    Ok(ComplexRootSet { roots, residual })
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex64>> {
    let n = p.degree().unwrap_or(0);
    let dp = p.derivative(1);
    let abs_p = p.abs_coeffs();
    let lead = p.leading().abs();
    // Geometric mean modulus of the roots, then a slightly rotated circle.
    let radius = (p.coeff(0).abs() / lead).powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius * (1.0 + 0.01 * k as f64 / n as f64), angle)
        })
        .collect();

    let eps = f64::EPSILON;
    for _ in 0..ROOT_ITERATIONS {
        let mut done = true;
        for k in 0..n {
            let pk = p.eval_complex(z[k]);
            let scale = abs_p.eval(z[k].norm());
            if pk.norm() <= 4.0 * eps * scale {
                continue;
            }
            done = false;
            let w = pk / dp.eval_complex(z[k]);
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.is_finite() {
                z[k] -= step;
            } else {
                let bump = Complex64::new(eps, eps) * (1.0 + z[k].norm());
                z[k] += bump;
            }
        }
        if done {
            return Ok(z);
        }
    }
    let residual = z.iter().map(|&r| p.eval_complex(r).norm() / abs_p.eval(r.norm()).max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    // Multiple roots stall at the noise floor rather than reaching it exactly.
    if residual <= 1e-12 {
        Ok(z)
    } else {
        Err(Error::RootsDidNotConverge { iterations: ROOT_ITERATIONS, residual })
    }
}

/// Groups simple root estimates into multiple roots. A group of `m` nearest
/// neighbours merges when it fits in a disc of radius
/// `max(1e-6, tol^(1/m))·(1+|c|)` about its centroid `c` and `q(c)` is
/// negligible; larger groups are tried first.
fn merge_clusters(q: &Polynomial, points: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let abs_q = q.abs_coeffs();
    let accept = tol.max(1e-10);
    let mut free: Vec<Complex64> = points.to_vec();
    let mut out = Vec::new();
    loop {
        let mut best: Option<(usize, Vec<usize>, Complex64, f64)> = None;
        for i in 0..free.len() {
            let mut order: Vec<usize> = (0..free.len()).collect();
            order.sort_by(|&a, &b| (free[a] - free[i]).norm().total_cmp(&(free[b] - free[i]).norm()));
            for m in (2..=free.len()).rev() {
                if best.as_ref().is_some_and(|b| b.1.len() > m) {
                    break;
                }
                let group = &order[..m];
                let c = group.iter().map(|&k| free[k]).sum::<Complex64>() / m as f64;
                let spread = group.iter().map(|&k| (free[k] - c).norm()).fold(0.0, f64::max);
                let radius = MERGE_FLOOR.max(tol.powf(1.0 / m as f64)) * (1.0 + c.norm());
                if spread > radius {
                    continue;
                }
                let scale = abs_q.eval(c.norm()).max(f64::MIN_POSITIVE);
                if q.eval_complex(c).norm() / scale > accept {
                    continue;
                }
                if best.as_ref().is_none_or(|b| b.1.len() < m || spread < b.3) {
                    best = Some((i, group.to_vec(), c, spread));
                }
                break;
            }
        }
        let Some((_, mut group, c, _)) = best else { break };
        group.sort_unstable_by(|a, b| b.cmp(a));
        for k in &group {
            free.swap_remove(*k);
        }
        out.push((polish_multiple(q, c, group.len()), group.len()));
    }
    out.extend(free.into_iter().map(|z| (z, 1)));
    out
}

/// An `m`-fold root of `q` is a simple root of `q^(m-1)`.
fn polish_multiple(q: &Polynomial, c: Complex64, m: usize) -> Complex64 {
    let f = q.derivative(m - 1);
    let df = f.derivative(1);
    let mut z = c;
    for _ in 0..8 {
        let step = f.eval_complex(z) / df.eval_complex(z);
        if !step.is_finite() || step.norm() > 1e-3 * (1.0 + c.norm()) {
            return c;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    if (z - c).norm() > 1e-3 * (1.0 + c.norm()) {
        c
    } else {
        z
    }
}

/// Snaps near-real roots onto the axis and pairs the rest into exact
/// conjugates.
fn symmetrize(clusters: Vec<(Complex64, usize)>) -> Vec<(Complex64, usize)> {
    let mut out = Vec::with_capacity(clusters.len());
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (z, m) in clusters {
        if z.im.abs() <= 1e-9 * (1.0 + z.norm()) {
            out.push((Complex64::new(z.re, 0.0), m));
        } else if z.im > 0.0 {
            upper.push((z, m));
        } else {
            lower.push((z, m));
        }
    }
    for (z, m) in upper {
        let partner = lower
            .iter()
            .enumerate()
            .filter(|(_, w)| w.1 == m)
            .min_by(|a, b| (a.1 .0 - z.conj()).norm().total_cmp(&(b.1 .0 - z.conj()).norm()))
            .map(|(i, _)| i);
        match partner {
            Some(i) => {
                let (w, _) = lower.swap_remove(i);
                let avg = (z + w.conj()) * 0.5;
                out.push((avg, m));
                out.push((avg.conj(), m));
            }
            None => out.push((Complex64::new(z.re, 0.0), m)),
        }
    }
    for (w, m) in lower {
        out.push((Complex64::new(w.re, 0.0), m));
    }
    out
}

/// Real roots of `q` in increasing order, each polished by Newton steps on
/// the real line. Multiple roots are reported once.
pub fn real_roots(q: &Polynomial, tol: f64) -> Result<Vec<f64>> {
    if q.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let set = roots(q, tol)?;
    let dq = q.derivative(1);
    Ok(set.real_roots().map(|(x, m)| if m == 1 { polish_real(q, &dq, x) } else { x }).collect())
}

fn polish_real(q: &Polynomial, dq: &Polynomial, mut x: f64) -> f64 {
    for _ in 0..4 {
        let d = dq.eval(x);
        if d == 0.0 {
            break;
        }
        let step = q.eval(x) / d;
        if !step.is_finite() || step.abs() > 1e-6 * (1.0 + x.abs()) {
            break;
        }
        x -= step;
    }
    x
}

// ---------------------------------------------------------------------------
// Polynomial matrices

/// Square matrix of polynomials, stored row-major.
pub type PolyMatrix = Vec<Vec<Polynomial>>;

/// Determinant by cofactor expansion with memoized minors (no division).
pub fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    expand_minors(m, true)
}

/// Permanent of the coefficient-wise absolute values; bounds every
/// coefficient of [`poly_det`] from above.
pub fn poly_det_bound(m: &[Vec<Polynomial>]) -> Polynomial {
    let abs: Vec<Vec<Polynomial>> = m.iter().map(|row| row.iter().map(Polynomial::abs_coeffs).collect()).collect();
    expand_minors(&abs, false)
}

fn expand_minors(m: &[Vec<Polynomial>], alternating: bool) -> Polynomial {
    let d = m.len();
    assert!(d <= 8 && m.iter().all(|r| r.len() == d), "poly_det needs a square matrix with d <= 8");
    if d == 0 {
        return Polynomial::constant(1.0);
    }
    // minors[mask]: determinant of the last popcount(mask) rows restricted to
    // the columns in mask.
    let full = (1usize << d) - 1;
    let mut minors: Vec<Option<Polynomial>> = vec![None; 1 << d];
    minors[0] = Some(Polynomial::constant(1.0));
    for size in 1..=d {
        let row = d - size;
        for mask in 1..=full {
            if (mask as u32).count_ones() as usize != size {
                continue;
            }
            let mut acc = Polynomial::zero();
            let mut position = 0;
            for col in 0..d {
                if mask & (1 << col) == 0 {
                    continue;
                }
                let rest = minors[mask & !(1 << col)].as_ref().expect("smaller minors first");
                let term = &m[row][col] * rest;
                acc = if alternating && position % 2 == 1 { &acc - &term } else { &acc + &term };
                position += 1;
            }
            minors[mask] = Some(acc);
        }
    }
    minors[full].take().unwrap_or_default()
}
