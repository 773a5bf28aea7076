//! B ⊗ ∧(t, dt): polynomial part Σ b_i ⊗ t^i plus Σ c_j ⊗ t^j dt.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraId, Element, FreeCDGA};
use crate::error::{Error, Result};
use crate::rational::{q, Q};

pub const DEFAULT_T_CAP: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalElement {
    alg: AlgebraId,
    poly: BTreeMap<u32, Element>,
    dt: BTreeMap<u32, Element>,
}

fn insert(map: &mut BTreeMap<u32, Element>, i: u32, x: Element) {
    if x.is_zero() {
        return;
    }
    let v = match map.remove(&i) {
        Some(y) => &y + &x,
        None => x,
    };
    if !v.is_zero() {
        map.insert(i, v);
    }
}

/// (-1)^{deg} applied monomial by monomial.
pub fn sigma(a: &FreeCDGA, x: &Element) -> Element {
    let mut out = a.zero().with_overflow(x.overflow());
    for (m, c) in x.terms() {
        let c = if a.mono_degree(m) % 2 == 1 { -c.clone() } else { c.clone() };
        out.add_term(m.clone(), c);
    }
    out
}

impl IntervalElement {
    pub fn zero(alg: AlgebraId) -> Self {
        IntervalElement { alg, poly: BTreeMap::new(), dt: BTreeMap::new() }
    }

    /// b ⊗ 1.
    pub fn constant(b: &Element) -> Self {
        Self::t_term(b, 0)
    }

    /// b ⊗ t^i.
    pub fn t_term(b: &Element, i: u32) -> Self {
        let mut u = Self::zero(b.algebra());
        insert(&mut u.poly, i, b.clone());
        u
    }

    /// c ⊗ t^j dt.
    pub fn dt_term(c: &Element, j: u32) -> Self {
        let mut u = Self::zero(c.algebra());
        insert(&mut u.dt, j, c.clone());
        u
    }

    pub fn algebra(&self) -> AlgebraId {
        self.alg
    }

    pub fn poly_part(&self) -> &BTreeMap<u32, Element> {
        &self.poly
    }

    pub fn dt_part(&self) -> &BTreeMap<u32, Element> {
        &self.dt
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_empty() && self.dt.is_empty()
    }

    pub fn t_degree(&self) -> u32 {
        let a = self.poly.keys().next_back().copied().unwrap_or(0);
        let b = self.dt.keys().next_back().copied().unwrap_or(0);
        a.max(b)
    }

    pub fn checked_add(&self, other: &IntervalElement) -> Result<IntervalElement> {
        if self.alg != other.alg {
            return Err(Error::MixedAlgebra);
        }
        let mut r = self.clone();
        for (i, x) in &other.poly {
            insert(&mut r.poly, *i, x.clone());
        }
        for (i, x) in &other.dt {
            insert(&mut r.dt, *i, x.clone());
        }
        Ok(r)
    }

    pub fn add(&self, other: &IntervalElement) -> IntervalElement {
        self.checked_add(other).expect("adding interval elements of different algebras")
    }

    pub fn sub(&self, other: &IntervalElement) -> IntervalElement {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> IntervalElement {
        let mut r = Self::zero(self.alg);
        for (i, x) in &self.poly {
            insert(&mut r.poly, *i, x.scale(c));
        }
        for (i, x) in &self.dt {
            insert(&mut r.dt, *i, x.scale(c));
        }
        r
    }

    /// Largest coefficient over all components.
    pub fn norm_inf(&self) -> Q {
        self.poly.values().chain(self.dt.values()).map(|e| e.norm_inf()).fold(Q::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Operations that need the base algebra.
#[derive(Clone, Debug)]
pub struct Interval {
    base: Arc<FreeCDGA>,
}

impl Interval {
    pub fn new(base: &Arc<FreeCDGA>) -> Self {
        Interval { base: base.clone() }
    }

    pub fn base(&self) -> &Arc<FreeCDGA> {
        &self.base
    }

    fn check(&self, u: &IntervalElement) -> Result<()> {
        if u.alg != self.base.id() {
            Err(Error::MixedAlgebra)
        } else {
            Ok(())
        }
    }

    pub fn mul(&self, u: &IntervalElement, v: &IntervalElement) -> Result<IntervalElement> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.mul_unchecked(u, v))
    }

    pub(crate) fn mul_unchecked(&self, u: &IntervalElement, v: &IntervalElement) -> IntervalElement {
        let a = &self.base;
        let mut r = IntervalElement::zero(a.id());
        for (i, x) in &u.poly {
            for (k, y) in &v.poly {
                insert(&mut r.poly, i + k, a.mul_unchecked(x, y));
            }
            for (k, y) in &v.dt {
                insert(&mut r.dt, i + k, a.mul_unchecked(x, y));
            }
        }
        for (i, x) in &u.dt {
            for (k, y) in &v.poly {
                // dt passes y
                insert(&mut r.dt, i + k, a.mul_unchecked(x, &sigma(a, y)));
            }
        }
        r
    }

    pub fn d(&self, u: &IntervalElement) -> Result<IntervalElement> {
        self.check(u)?;
        let a = &self.base;
        let mut r = IntervalElement::zero(a.id());
        for (i, x) in &u.poly {
            insert(&mut r.poly, *i, a.d_unchecked(x));
            if *i > 0 {
                insert(&mut r.dt, i - 1, sigma(a, x).scale(&q(*i as i64)));
            }
        }
        for (j, x) in &u.dt {
            insert(&mut r.dt, *j, a.d_unchecked(x));
        }
        Ok(r)
    }

    /// Substitute t = s, dt = 0.
    pub fn eval(&self, u: &IntervalElement, s: &Q) -> Result<Element> {
        self.check(u)?;
        let mut out = self.base.zero();
        for (i, x) in &u.poly {
            let mut p = Q::one();
            for _ in 0..*i {
                p *= s;
            }
            out = &out + &x.scale(&p);
        }
        Ok(out)
    }

    pub fn restrict(&self, u: &IntervalElement, endpoint: u8) -> Result<Element> {
        self.eval(u, &q(endpoint as i64))
    }

    /// ∫₀ᵗ: kills t^i terms; c ⊗ t^j dt ↦ (-1)^{deg c} c ⊗ t^{j+1}/(j+1).
    pub fn int_0_t(&self, u: &IntervalElement) -> Result<IntervalElement> {
        self.check(u)?;
        let a = &self.base;
        let mut r = IntervalElement::zero(a.id());
        for (j, x) in &u.dt {
            insert(&mut r.poly, j + 1, sigma(a, x).scale(&Q::new(1.into(), (j + 1).into())));
        }
        Ok(r)
    }

    /// ∫₀¹: c ⊗ t^j dt ↦ (-1)^{deg c} c/(j+1).
    pub fn int_0_1(&self, u: &IntervalElement) -> Result<Element> {
        self.check(u)?;
        let a = &self.base;
        let mut out = a.zero();
        for (j, x) in &u.dt {
            out = &out + &sigma(a, x).scale(&Q::new(1.into(), (j + 1).into()));
        }
        Ok(out)
    }

    /// Degree of a homogeneous interval element (poly terms count deg b, dt terms deg c + 1).
    pub fn degree_ok(&self, u: &IntervalElement, n: u32) -> bool {
        use crate::algebra::Deg;
        let a = &self.base;
        u.poly.values().all(|x| matches!(a.degree_of(x), Deg::Any) || a.degree_of(x) == Deg::Exactly(n))
            && u.dt.values().all(|x| {
                matches!(a.degree_of(x), Deg::Any) || (n >= 1 && a.degree_of(x) == Deg::Exactly(n - 1))
            })
    }
}
