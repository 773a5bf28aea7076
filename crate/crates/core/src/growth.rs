//! Exact counts of integral mapping classes: torsion growth, density growth, the growth
//! function of the connected-sum schema, gcd statistics and ball-count bounds.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homotopy::{iota_k, ClassElement};
use crate::linalg::cohomology;
use crate::map::DGAMap;
use crate::obstruction::ElementaryExtension;
use crate::rational::{fmt_q, pow_q, q, Q};
use crate::smith::{integer_normal_form, IntegerLatticeQuotient};
use crate::wspace::RepresentativeSpace;
use crate::zoo::builtin_pair;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TorsionCount {
    Finite(u64),
    Unbounded,
}

/// Integral image of ι₁ for the extension `ext` over the base map φ|base, in cohomology
/// coordinates of the target. The base generators must be closed; η then ranges over the
/// harmonic representatives one degree down.
pub fn iota_lattice(phi: &DGAMap, ext: &ElementaryExtension) -> Result<IntegerLatticeQuotient> {
    let base = ext.base();
    let tgt = phi.target();
    let base_map = phi.restrict_source(base)?;
    for i in 0..base.ngens() {
        if !base.diff_of(i).is_zero() {
            return Err(Error::Validation("level-1 lattice needs closed base generators".into()));
        }
    }
    // one η per (base generator, harmonic representative)
    let mut etas: Vec<Vec<crate::algebra::Element>> = Vec::new();
    for i in 0..base.ngens() {
        let deg = base.generators()[i].degree;
        if deg == 0 || deg - 1 > tgt.truncation() {
            continue;
        }
        for r in cohomology(tgt, deg - 1)?.representatives {
            let mut eta = vec![tgt.zero(); base.ngens()];
            eta[i] = r;
            etas.push(eta);
        }
    }
    let n = ext.degree();
    let coh = cohomology(tgt, n)?;
    let rows = ext.new_generators().len() * coh.dimension();
    let mut m: Vec<Vec<BigInt>> = vec![Vec::new(); rows];
    for eta in etas {
        let f = ClassElement::new(base_map.clone(), eta, 1)?;
        let col: Vec<Q> = iota_k(&f, ext)?.iter().map(|x| coh.project(x)).collect::<Result<Vec<_>>>()?.concat();
        for (r, x) in col.iter().enumerate() {
            if !x.is_integer() {
                return Err(Error::NotIntegral);
            }
            m[r].push(x.to_integer());
        }
    }
    if m.iter().all(|r| r.is_empty()) {
        m = vec![vec![BigInt::zero()]; rows];
    }
    Ok(integer_normal_form(&m))
}

/// Size of the fiber over the rational class of a ↦ d·y, b ↦ d²z in [S³×S⁴, S⁴].
pub fn torsion_count(d: i64) -> Result<TorsionCount> {
    let pair = builtin_pair("s3xs4->s4")?;
    let y = &pair.y.algebra;
    let x = &pair.x.algebra;
    let phi = DGAMap::from_strs(y.clone(), x.clone(), &[&format!("{d}*y"), &format!("{}*z", d * d)])?;
    let ext = ElementaryExtension::new(y, 1, 2)?;
    let lattice = iota_lattice(&phi, &ext)?;
    Ok(match lattice.order() {
        None => TorsionCount::Unbounded,
        Some(o) => TorsionCount::Finite(o.try_into().map_err(|_| Error::Validation("order exceeds u64".into()))?),
    })
}

/// Distinct values of α₂β₁ - α₁β₂ over integer points with |β₁|, |β₂| ≤ R.
pub fn density_count(a1: i64, a2: i64, r: &Q) -> Result<u64> {
    if a1 == 0 && a2 == 0 {
        return Err(Error::DegenerateDirection);
    }
    if r.is_negative() {
        return Err(Error::Validation("radius must be nonnegative".into()));
    }
    let r: i64 = r.floor().to_integer().try_into().map_err(|_| Error::Validation("radius too large".into()))?;
    if a1 == 0 {
        return Ok((2 * r + 1) as u64);
    }
    // for fixed β₁ the values form a progression of step |α₁|; merge per residue class
    let g = a1.abs();
    let mut by_residue: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
    for b1 in -r..=r {
        let c = a2 * b1;
        let res = c.rem_euclid(g);
        let k0 = (c - res) / g;
        by_residue.entry(res).or_default().push((k0 - r, k0 + r));
    }
    let mut total = 0u64;
    for (_, mut iv) in by_residue {
        iv.sort();
        let (mut lo, mut hi) = iv[0];
        for &(a, b) in &iv[1..] {
            if a > hi + 1 {
                total += (hi - lo + 1) as u64;
                lo = a;
                hi = b;
            } else {
                hi = hi.max(b);
            }
        }
        total += (hi - lo + 1) as u64;
    }
    Ok(total)
}

static TOTIENT: Mutex<Vec<u64>> = Mutex::new(Vec::new());

/// φ(0..=n) by a linear sieve, memoized for the process.
pub fn totients(n: usize) -> Vec<u64> {
    let mut cache = TOTIENT.lock().unwrap();
    if cache.len() <= n {
        let m = (n + 1).max(2 * cache.len());
        let mut phi = vec![0u64; m];
        let mut primes: Vec<usize> = Vec::new();
        if m > 1 {
            phi[1] = 1;
        }
        for i in 2..m {
            if phi[i] == 0 {
                phi[i] = (i - 1) as u64;
                primes.push(i);
            }
            for &p in &primes {
                if i * p >= m {
                    break;
                }
                if i % p == 0 {
                    phi[i * p] = phi[i] * p as u64;
                    break;
                }
                phi[i * p] = phi[i] * (p - 1) as u64;
            }
        }
        *cache = phi;
    }
    cache[..=n].to_vec()
}

/// Σ_{0<a,b≤N} gcd(a, b) = Σ_k φ(k)⌊N/k⌋².
pub fn gcd_sum(n: u64) -> u128 {
    let phi = totients(n as usize);
    (1..=n).map(|k| phi[k as usize] as u128 * ((n / k) as u128).pow(2)).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub parameter: u64,
    pub count: u128,
    pub terms: [u128; 3],
    pub oracle: Option<u128>,
}

/// 2D² + 4Σ_{0<d<D} 2d + Σ_{0<|d₁|,|d₂|<D} 2gcd(d₁, d₂).
pub fn growth_count(d: u64) -> Result<GrowthReport> {
    if d == 0 {
        return Err(Error::Validation("D must be positive".into()));
    }
    let d128 = d as u128;
    let t1 = 2 * d128 * d128;
    let t2 = 4 * d128 * (d128 - 1);
    let t3 = 8 * gcd_sum(d - 1);
    Ok(GrowthReport { parameter: d, count: t1 + t2 + t3, terms: [t1, t2, t3], oracle: None })
}

/// The same count by direct enumeration of the sums.
pub fn growth_count_direct(d: u64) -> u128 {
    let d = d as i64;
    let mut t = 2 * (d as u128) * (d as u128);
    for x in 1..d {
        t += 4 * 2 * x as u128;
    }
    for d1 in -(d - 1)..d {
        for d2 in -(d - 1)..d {
            if d1 != 0 && d2 != 0 {
                t += 2 * d1.abs().gcd(&d2.abs()) as u128;
            }
        }
    }
    t
}

#[derive(Clone, Debug, Serialize)]
pub struct FitPoint {
    pub parameter: u64,
    pub count: u128,
    /// count / (D² ln D), floating point.
    pub approx_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFit {
    pub points: Vec<FitPoint>,
    /// Mean ratio, floating point.
    pub approx_constant: f64,
    /// Largest |ratio / mean - 1|.
    pub approx_max_deviation: f64,
}

pub fn growth_fit(ds: &[u64]) -> Result<GrowthFit> {
    let mut points = Vec::new();
    for &d in ds {
        if d < 2 {
            return Err(Error::Validation("fit needs D ≥ 2".into()));
        }
        let r = growth_count(d)?;
        let df = d as f64;
        points.push(FitPoint { parameter: d, count: r.count, approx_ratio: r.count as f64 / (df * df * df.ln()) });
    }
    let mean = points.iter().map(|p| p.approx_ratio).sum::<f64>() / points.len().max(1) as f64;
    let dev = points.iter().map(|p| (p.approx_ratio / mean - 1.0).abs()).fold(0.0, f64::max);
    Ok(GrowthFit { points, approx_constant: mean, approx_max_deviation: dev })
}

/// π² enclosure: 98696044010893586188 / 10¹⁹ < π² < 98696044010893586189 / 10¹⁹.
pub fn pi_squared_bounds() -> (Q, Q) {
    let den = BigInt::from(10u64).pow(19);
    let lo = BigInt::parse_bytes(b"98696044010893586188", 10).unwrap();
    (Q::new(lo.clone(), den.clone()), Q::new(lo + 1, den))
}

#[derive(Clone, Debug, Serialize)]
pub struct GcdProportion {
    pub n: u64,
    pub k: u64,
    #[serde(serialize_with = "ser_q")]
    pub observed: Q,
    #[serde(serialize_with = "ser_q")]
    pub upper: Q,
    /// Rational enclosure of (2 - π²/6)/(4k²).
    #[serde(serialize_with = "ser_pair")]
    pub lower: (Q, Q),
    pub ok: bool,
}

fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(v))
}

fn ser_pair<S: serde::Serializer>(v: &(Q, Q), s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq([fmt_q(&v.0), fmt_q(&v.1)])
}

/// Pairs 0 < a, b ≤ N with gcd(a, b) = k, as a proportion of N².
pub fn gcd_proportion_bounds(n: u64, k: u64) -> Result<GcdProportion> {
    if k == 0 || n < k {
        return Err(Error::Validation("need N ≥ k ≥ 1".into()));
    }
    let m = (n / k) as usize;
    let phi = totients(m);
    let coprime: u128 = 2 * phi[1..=m].iter().map(|&x| x as u128).sum::<u128>() - 1;
    let observed = Q::new(BigInt::from(coprime), BigInt::from(n as u128 * n as u128));
    let k2 = Q::from_integer(BigInt::from(k as u128 * k as u128));
    let upper = Q::one() / &k2;
    let (p_lo, p_hi) = pi_squared_bounds();
    let lower_of = |p: &Q| (q(2) - p / q(6)) / (q(4) * &k2);
    // the true lower bound lies between these
    let lower = (lower_of(&p_hi), lower_of(&p_lo));
    let ok = observed <= upper && observed >= lower.1;
    Ok(GcdProportion { n, k, observed, upper, lower, ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct BallBoundInput {
    pub dims: Vec<u32>,
    /// Coefficients of P′_k in ascending order.
    pub polys: Vec<Vec<Q>>,
    pub radius: Q,
}

/// R^{Σ dims} ∏ P′_k(R).
pub fn ball_count_bound(input: &BallBoundInput) -> Result<Q> {
    if input.radius.is_negative() {
        return Err(Error::Validation("radius must be nonnegative".into()));
    }
    for p in &input.polys {
        if p.last().map_or(false, |c| c.is_negative()) {
            return Err(Error::Validation("polynomials need a nonnegative leading coefficient".into()));
        }
    }
    let r = &input.radius;
    let mut out = pow_q(r, input.dims.iter().sum());
    for p in &input.polys {
        let mut v = Q::zero();
        for c in p.iter().rev() {
            v = v * r + c;
        }
        out *= v;
    }
    Ok(out)
}

/// Bound input for [S³×S⁴, S⁴]: one class in H⁴ and one in H⁷, each stage with P′ = 3.
pub fn s3xs4_bound_input(radius: Q) -> BallBoundInput {
    BallBoundInput { dims: vec![1, 1], polys: vec![vec![q(3)], vec![q(3)]], radius }
}

/// Classes (d, h mod 2|d|) of [S³×S⁴, S⁴] having a representative a ↦ d·y, b ↦ d²z + h·xy
/// with all coefficients at most R in absolute value.
pub fn s3xs4_class_count(radius: &Q) -> u64 {
    let r = radius.floor().to_integer();
    let r: i64 = r.try_into().unwrap_or(0).max(0);
    let mut total = 0u64;
    let mut d = 0i64;
    while d * d <= r {
        let hs = (2 * r + 1) as u64;
        if d == 0 {
            total += hs;
        } else {
            total += 2 * hs.min(2 * d as u64);
        }
        d += 1;
    }
    total
}

/// ‖φ(v)‖∞^{1/deg v} maximized over generators, kept exact as (norm, degree).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzProxy {
    #[serde(serialize_with = "ser_q")]
    pub norm: Q,
    pub degree: u32,
}

impl LipschitzProxy {
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.norm.to_f64().unwrap_or(f64::INFINITY).powf(1.0 / self.degree as f64)
    }
}

pub fn lipschitz_proxy(phi: &DGAMap, w: &RepresentativeSpace) -> Result<LipschitzProxy> {
    let src = phi.source();
    let mut best = LipschitzProxy { norm: Q::zero(), degree: 1 };
    for (i, g) in src.generators().iter().enumerate() {
        let img = phi.image(i);
        if !w.contains(img)? {
            return Err(Error::NotInW(src.generators()[i].name.clone()));
        }
        let n = img.norm_inf();
        if n.is_zero() {
            continue;
        }
        // n^{1/a} > m^{1/b}  ⇔  n^b > m^a
        if best.norm.is_zero() || pow_q(&n, best.degree) > pow_q(&best.norm, g.degree) {
            best = LipschitzProxy { norm: n, degree: g.degree };
        }
    }
    Ok(best)
}
