//! Exact exponent arithmetic: admissible lines, duality, the Drury induction
//! map, interpolation vertices and the weighted/unweighted ranges.
//!
//! All predicates use arbitrary-precision rationals; `∞` is a distinguished
//! value above every finite rational.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::curve::PolyCurve;
use crate::error::{Error, Result};
use crate::poly::roots;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinite,
}

impl ExtRational {
    pub fn finite(n: i64, d: i64) -> Self {
        ExtRational::Finite(rat(n, d))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }

    pub fn as_finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinite => None,
        }
    }

    /// `1/x`, with `1/∞ = 0`. Errors at zero.
    pub fn recip(&self) -> Result<BigRational> {
        match self {
            ExtRational::Infinite => Ok(BigRational::zero()),
            ExtRational::Finite(r) if r.is_zero() => Err(Error::ExponentRange("reciprocal of zero".into())),
            ExtRational::Finite(r) => Ok(r.recip()),
        }
    }

    /// Hölder conjugate `x/(x−1)` for `x ≥ 1`, with `1′ = ∞` and `∞′ = 1`.
    pub fn conjugate(&self) -> Result<ExtRational> {
        match self {
            ExtRational::Infinite => Ok(ExtRational::Finite(BigRational::one())),
            ExtRational::Finite(r) => {
                let one = BigRational::one();
                match r.cmp(&one) {
                    Ordering::Less => Err(Error::ExponentRange(format!("conjugate of {r} < 1"))),
                    Ordering::Equal => Ok(ExtRational::Infinite),
                    Ordering::Greater => Ok(ExtRational::Finite(r / (r - &one))),
                }
            }
        }
    }

    /// Product with a positive finite rational.
    fn scaled(&self, c: &BigRational) -> ExtRational {
        match self {
            ExtRational::Infinite => ExtRational::Infinite,
            ExtRational::Finite(r) => ExtRational::Finite(r * c),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Infinite => f64::INFINITY,
            ExtRational::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(r: BigRational) -> Self {
        ExtRational::Finite(r)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinite, ExtRational::Infinite) => Ordering::Equal,
            (ExtRational::Infinite, _) => Ordering::Greater,
            (_, ExtRational::Infinite) => Ordering::Less,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Infinite => f.write_str("inf"),
            ExtRational::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Accepts `inf`, `∞`, integers, `a/b` and plain decimals such as `1.25`.
impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse { position: 0, message: format!("not a rational: {s:?}") };
        if matches!(s, "inf" | "Inf" | "infinity" | "∞") {
            return Ok(ExtRational::Infinite);
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(ExtRational::Finite(BigRational::new(n, d)));
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = whole.starts_with('-');
            let whole: BigInt = if whole.is_empty() || whole == "-" { BigInt::zero() } else { whole.parse().map_err(|_| bad())? };
            let frac_n: BigInt = frac.parse().map_err(|_| bad())?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let mag = BigRational::new(whole.abs() * &den + frac_n, den);
            return Ok(ExtRational::Finite(if neg { -mag } else { mag }));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(ExtRational::Finite(BigRational::from_integer(n)))
    }
}

/// A pair `(p, q)` with `1 ≤ p ≤ ∞` and `0 < q ≤ ∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentPair {
    pub p: ExtRational,
    pub q: ExtRational,
}

impl ExponentPair {
    pub fn new(p: ExtRational, q: ExtRational) -> Result<Self> {
        if p < ExtRational::Finite(BigRational::one()) {
            return Err(Error::ExponentRange(format!("p = {p} must be at least 1")));
        }
        if q <= ExtRational::Finite(BigRational::zero()) {
            return Err(Error::ExponentRange(format!("q = {q} must be positive")));
        }
        Ok(ExponentPair { p, q })
    }

    pub fn finite(p: BigRational, q: BigRational) -> Result<Self> {
        Self::new(p.into(), q.into())
    }

    /// The pair with the given `p′` and `q`.
    pub fn from_p_prime(p_prime: ExtRational, q: ExtRational) -> Result<Self> {
        Self::new(p_prime.conjugate()?, q)
    }

    pub fn p_prime(&self) -> ExtRational {
        self.p.conjugate().expect("p ≥ 1 by construction")
    }

    pub fn q_prime(&self) -> Result<ExtRational> {
        self.q.conjugate()
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p = {}, q = {})", self.p, self.q)
    }
}

fn require_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(Error::Dimension { d });
    }
    Ok(())
}

fn half_dd1(d: usize) -> BigRational {
    rat((d * (d + 1)) as i64, 2)
}

/// `q_d = (d² + d + 2)/(d² + d)`, the excluded restriction endpoint.
pub fn restriction_threshold(d: usize) -> BigRational {
    int(d * d + d + 2) / int(d * d + d)
}

/// `(d² + d + 2)/2`, the extension-side endpoint and the Drury fixed point.
pub fn extension_threshold(d: usize) -> BigRational {
    int(d * d + d + 2) / int(2)
}

/// `p′ = d(d+1)q/2` and `q > q_d`.
pub fn restriction_admissible(d: usize, pair: &ExponentPair) -> bool {
    if d < 2 {
        return false;
    }
    pair.p_prime() == pair.q.scaled(&half_dd1(d)) && pair.q > ExtRational::Finite(restriction_threshold(d))
}

/// `q = d(d+1)p′/2` and `q > (d² + d + 2)/2`.
pub fn extension_admissible(d: usize, pair: &ExponentPair) -> bool {
    if d < 2 {
        return false;
    }
    pair.q == pair.p_prime().scaled(&half_dd1(d)) && pair.q > ExtRational::Finite(extension_threshold(d))
}

/// `(p, q) ↦ (q′, p′)`. Needs `q ≥ 1`.
pub fn duality_map(pair: &ExponentPair) -> Result<ExponentPair> {
    ExponentPair::new(pair.q_prime()?, pair.p_prime())
}

/// The `p` with `d/p = 2/(d+2) + (d−2)/((d+2)p₀)`, i.e.
/// `p = d(d+2)p₀ / (2p₀ + d − 2)`, for `1 ≤ p₀ ≤ (d² + d + 2)/2`.
pub fn drury_step(d: usize, p0: &BigRational) -> Result<BigRational> {
    require_dim(d, 2)?;
    if *p0 < BigRational::one() || *p0 > extension_threshold(d) {
        return Err(Error::ExponentRange(format!("p0 = {p0} outside [1, {}]", extension_threshold(d))));
    }
    Ok(step_map(d, p0))
}

fn step_map(d: usize, p0: &BigRational) -> BigRational {
    int(d * (d + 2)) * p0 / (int(2) * p0 + int(d - 2))
}

/// `iterations` successive Drury steps starting from `p_start ≥ 1`.
pub fn drury_iterate(d: usize, p_start: &BigRational, iterations: usize) -> Result<Vec<BigRational>> {
    require_dim(d, 2)?;
    if *p_start < BigRational::one() {
        return Err(Error::ExponentRange(format!("p_start = {p_start} below 1")));
    }
    let mut out = Vec::with_capacity(iterations);
    let mut p = p_start.clone();
    for _ in 0..iterations {
        p = step_map(d, &p);
        out.push(p.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpVertex {
    /// `(a⁻¹, b⁻¹)`
    pub vertex: (BigRational, BigRational),
    /// `((d+2)(d−1)/2)·a⁻¹ + b⁻¹ − d(d−1)/2`
    pub lhs: BigRational,
    /// `d/p₀`
    pub rhs: BigRational,
    pub strict: bool,
}

/// Vertex `(d/(d+2), 2/(d+2) + (d−2)/((d+2)p₀))` of the interpolation
/// region and whether it satisfies the strict inequality `lhs < d/p₀`.
pub fn interp_region_check(d: usize, p0: &BigRational) -> Result<InterpVertex> {
    require_dim(d, 2)?;
    if *p0 < BigRational::one() || *p0 > extension_threshold(d) {
        return Err(Error::ExponentRange(format!("p0 = {p0} outside [1, {}]", extension_threshold(d))));
    }
    let a_inv = int(d) / int(d + 2);
    let b_inv = int(2) / int(d + 2) + int(d - 2) / (int(d + 2) * p0);
    let lhs = int((d + 2) * (d - 1)) / int(2) * &a_inv + &b_inv - int(d * (d - 1)) / int(2);
    let rhs = int(d) / p0;
    let strict = lhs < rhs;
    Ok(InterpVertex { vertex: (a_inv, b_inv), lhs, rhs, strict })
}

/// `q ≥ (d² + 2d)/2`, the range where the basic geometric inequality suffices.
pub fn christ_range(d: usize, q: &ExtRational) -> bool {
    *q >= ExtRational::Finite(int(d * d + 2 * d) / int(2))
}

/// The complementary case `q < (d² + 2d)/2` handled by the induction.
pub fn christ_range_complement(d: usize, q: &ExtRational) -> bool {
    !christ_range(d, q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionProfile {
    /// Largest multiplicity of a real zero of the torsion (0 if none).
    pub k_min: usize,
    /// Degree of the torsion.
    pub k_max: usize,
    pub n_min: BigRational,
    pub n_max: BigRational,
}

impl TorsionProfile {
    pub fn new(d: usize, k_min: usize, k_max: usize) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::invalid("k_min exceeds k_max"));
        }
        let base = d * (d + 1) / 2;
        Ok(TorsionProfile { k_min, k_max, n_min: int(k_min + base), n_max: int(k_max + base) })
    }

    /// A profile from arbitrary `N_min ≤ N_max`, for range experiments.
    pub fn from_bounds(n_min: BigRational, n_max: BigRational) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::invalid("n_min exceeds n_max"));
        }
        Ok(TorsionProfile { k_min: 0, k_max: 0, n_min, n_max })
    }
}

pub fn torsion_profile(curve: &PolyCurve) -> Result<TorsionProfile> {
    let l = curve.torsion_poly();
    let k_max = l.degree().filter(|_| !l.is_zero()).ok_or(Error::DegenerateTorsion)?;
    let k_min = if k_max == 0 { 0 } else { roots(&l, crate::decompose::ROOT_TOL)?.real_roots().map(|(_, m)| m).max().unwrap_or(0) };
    TorsionProfile::new(curve.dim(), k_min, k_max)
}

/// Unweighted range for `d ≥ 3`: `1 ≤ p < q_d` and either `p ≤ q` with
/// `N_min q ≤ p′ ≤ N_max q`, or `p > q` with `N_min q < p′ < N_max q`.
pub fn unweighted_range(profile: &TorsionProfile, d: usize, pair: &ExponentPair) -> Result<bool> {
    require_dim(d, 3)?;
    if pair.p >= ExtRational::Finite(restriction_threshold(d)) {
        return Ok(false);
    }
    let pp = pair.p_prime();
    let lo = pair.q.scaled(&profile.n_min);
    let hi = pair.q.scaled(&profile.n_max);
    Ok(if pair.p <= pair.q { lo <= pp && pp <= hi } else { lo < pp && pp < hi })
}

/// `−1/q + d(d+1)/(2p′)`, defined for `q ≤ 2p′/(d(d+1))`.
pub fn weight_exponent(d: usize, pair: &ExponentPair) -> Result<BigRational> {
    require_dim(d, 2)?;
    let pp = pair.p_prime();
    let dd = int(d * (d + 1));
    let limit = pp.scaled(&(int(2) / &dd));
    if pair.q > limit {
        return Err(Error::ExponentRange(format!("q = {} exceeds 2p'/(d(d+1)) = {limit}", pair.q)));
    }
    Ok(-pair.q.recip()? + dd / int(2) * pp.recip()?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub q: BigRational,
    pub p: ExtRational,
    pub p_prime: BigRational,
    pub admissible: bool,
    pub weight_exponent: BigRational,
}

/// Rows on the scaling line `p′ = d(d+1)q/2` for each `q` with `p′ ≥ 1`.
pub fn exponent_table(d: usize, qs: &[BigRational]) -> Result<Vec<TableRow>> {
    require_dim(d, 2)?;
    qs.iter()
        .map(|q| {
            let p_prime = q * half_dd1(d);
            if p_prime < BigRational::one() {
                return Err(Error::ExponentRange(format!("q = {q} gives p' = {p_prime} < 1")));
            }
            let pair = ExponentPair::from_p_prime(p_prime.clone().into(), q.clone().into())?;
            Ok(TableRow {
                q: q.clone(),
                p: pair.p.clone(),
                admissible: restriction_admissible(d, &pair),
                weight_exponent: weight_exponent(d, &pair)?,
                p_prime,
            })
        })
        .collect()
}

/// Renders a rational as `n/d`, or `inf`.
pub fn render(x: &ExtRational) -> String {
    x.to_string()
}
