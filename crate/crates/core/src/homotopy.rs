//! Homotopies A → B ⊗ ∧(t, dt) and classes of first-order deformations φ + η⊗e.

use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{Element, FreeCDGA};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalElement, DEFAULT_T_CAP};
use crate::map::DGAMap;
use crate::obstruction::ElementaryExtension;
use crate::rational::{sign_q, Q};

#[derive(Clone, Debug)]
pub struct Homotopy {
    source: Arc<FreeCDGA>,
    target: Arc<FreeCDGA>,
    images: Vec<IntervalElement>,
    start: DGAMap,
    end: DGAMap,
}

impl Homotopy {
    /// Validates degrees, the t-degree cap and the chain condition on generators.
    pub fn new(source: Arc<FreeCDGA>, target: Arc<FreeCDGA>, images: Vec<IntervalElement>) -> Result<Self> {
        Self::with_cap(source, target, images, DEFAULT_T_CAP)
    }

    pub fn with_cap(source: Arc<FreeCDGA>, target: Arc<FreeCDGA>, images: Vec<IntervalElement>, cap: u32) -> Result<Self> {
        if images.len() != source.ngens() {
            return Err(Error::InvalidHomotopy("one image per generator expected".into()));
        }
        let iv = Interval::new(&target);
        for (i, g) in source.generators().iter().enumerate() {
            let u = &images[i];
            if u.algebra() != target.id() {
                return Err(Error::MixedAlgebra);
            }
            if u.t_degree() > cap {
                return Err(Error::TDegreeCap { degree: u.t_degree(), cap });
            }
            if !iv.degree_ok(u, g.degree) {
                return Err(Error::InvalidHomotopy(format!("image of {} has the wrong degree", g.name)));
            }
        }
        let h = Self::assemble(source, target, images)?;
        for i in 0..h.source.ngens() {
            let lhs = iv.d(&h.images[i])?;
            let rhs = h.apply(h.source.diff_of(i))?;
            if lhs != rhs {
                return Err(Error::InvalidHomotopy(format!("chain condition fails on {}", h.source.generators()[i].name)));
            }
        }
        Ok(h)
    }

    pub(crate) fn assemble(source: Arc<FreeCDGA>, target: Arc<FreeCDGA>, images: Vec<IntervalElement>) -> Result<Self> {
        let iv = Interval::new(&target);
        let s = images.iter().map(|u| iv.restrict(u, 0)).collect::<Result<Vec<_>>>()?;
        let e = images.iter().map(|u| iv.restrict(u, 1)).collect::<Result<Vec<_>>>()?;
        let start = DGAMap::new_unchecked(source.clone(), target.clone(), s);
        let end = DGAMap::new_unchecked(source.clone(), target.clone(), e);
        Ok(Homotopy { source, target, images, start, end })
    }

    /// f ⊗ 1.
    pub fn constant(f: &DGAMap) -> Self {
        let images = f.images().iter().map(IntervalElement::constant).collect();
        Homotopy {
            source: f.source().clone(),
            target: f.target().clone(),
            images,
            start: f.clone(),
            end: f.clone(),
        }
    }

    pub fn source(&self) -> &Arc<FreeCDGA> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FreeCDGA> {
        &self.target
    }

    pub fn images(&self) -> &[IntervalElement] {
        &self.images
    }

    pub fn interval(&self) -> Interval {
        Interval::new(&self.target)
    }

    pub fn apply(&self, x: &Element) -> Result<IntervalElement> {
        apply_images(&self.source, &self.target, &self.images, x)
    }

    pub fn is_valid(&self) -> bool {
        Self::new(self.source.clone(), self.target.clone(), self.images.clone()).is_ok()
    }

    /// Largest coefficient over all images.
    pub fn norm_inf(&self) -> Q {
        self.images.iter().map(|u| u.norm_inf()).fold(Q::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn restrict_source(&self, sub: &Arc<FreeCDGA>) -> Result<Homotopy> {
        let k = sub.ngens();
        if k > self.source.ngens() || sub.generators() != &self.source.generators()[..k] {
            return Err(Error::MixedAlgebra);
        }
        Self::assemble(sub.clone(), self.target.clone(), self.images[..k].to_vec())
    }
}

/// Image of a source element under generator images in B ⊗ ∧(t, dt).
pub(crate) fn apply_images(source: &FreeCDGA, target: &Arc<FreeCDGA>, images: &[IntervalElement], x: &Element) -> Result<IntervalElement> {
    if x.algebra() != source.id() {
        return Err(Error::MixedAlgebra);
    }
    let iv = Interval::new(target);
    let mut out = IntervalElement::zero(target.id());
    for (m, c) in x.terms() {
        if source.mono_degree(m) > target.truncation() {
            continue;
        }
        let mut p = IntervalElement::constant(&target.scalar(c.clone()));
        for &(g, e) in m.factors() {
            for _ in 0..e {
                p = iv.mul_unchecked(&p, &images[g]);
            }
        }
        out = out.add(&p);
    }
    Ok(out)
}

pub fn restrict(h: &Homotopy, endpoint: u8) -> DGAMap {
    if endpoint == 0 {
        h.start.clone()
    } else {
        h.end.clone()
    }
}

/// H is a valid homotopy with H|₀ = f and H|₁ = g.
pub fn is_homotopy(h: &Homotopy, f: &DGAMap, g: &DGAMap) -> bool {
    h.is_valid() && h.start == *f && h.end == *g && f.is_valid() && g.is_valid()
}

/// φ + η⊗e with e of degree k, e² = 0.
#[derive(Clone, Debug)]
pub struct ClassElement {
    pub base: DGAMap,
    pub eta: Vec<Element>,
    pub level: u32,
}

impl ClassElement {
    pub fn new(base: DGAMap, eta: Vec<Element>, level: u32) -> Result<Self> {
        let c = ClassElement { base, eta, level };
        c.validate()?;
        Ok(c)
    }

    pub fn zero(base: &DGAMap, level: u32) -> Self {
        ClassElement { base: base.clone(), eta: vec![base.target().zero(); base.source().ngens()], level }
    }

    pub fn validate(&self) -> Result<()> {
        let src = self.base.source();
        let tgt = self.base.target();
        if self.level == 0 {
            return Err(Error::Validation("level must be positive".into()));
        }
        if self.eta.len() != src.ngens() {
            return Err(Error::InvalidEta("one value per generator expected".into()));
        }
        for (i, g) in src.generators().iter().enumerate() {
            let e = &self.eta[i];
            if e.algebra() != tgt.id() {
                return Err(Error::MixedAlgebra);
            }
            match tgt.degree_of(e) {
                crate::algebra::Deg::Any => {}
                crate::algebra::Deg::Exactly(k) if k + self.level == g.degree => {}
                _ => return Err(Error::InvalidEta(g.name.clone())),
            }
            if tgt.d(e)? != self.apply(src.diff_of(i))? {
                return Err(Error::InvalidEta(g.name.clone()));
            }
        }
        Ok(())
    }

    /// η on arbitrary elements via η(uw) = (-1)^{k·deg w} η(u)φ(w) + φ(u)η(w).
    pub fn apply(&self, x: &Element) -> Result<Element> {
        let src = self.base.source();
        let tgt = self.base.target();
        if x.algebra() != src.id() {
            return Err(Error::MixedAlgebra);
        }
        let mut out = tgt.zero();
        for (m, c) in x.terms() {
            if src.mono_degree(m) > tgt.truncation() + self.level {
                continue;
            }
            let mut phi_p = tgt.one();
            let mut eta_p = tgt.zero();
            for &(g, e) in m.factors() {
                let deg = src.generators()[g].degree;
                for _ in 0..e {
                    let s = sign_q((self.level * deg) % 2 == 1);
                    let t1 = tgt.mul_unchecked(&eta_p, self.base.image(g)).scale(&s);
                    let t2 = tgt.mul_unchecked(&phi_p, &self.eta[g]);
                    eta_p = &t1 + &t2;
                    phi_p = tgt.mul_unchecked(&phi_p, self.base.image(g));
                }
            }
            out = &out + &eta_p.scale(c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> ClassElement {
        ClassElement { base: self.base.clone(), eta: self.eta.iter().map(|e| e.scale(c)).collect(), level: self.level }
    }
}

pub fn boxplus(f: &ClassElement, g: &ClassElement) -> Result<ClassElement> {
    if f.base != g.base {
        return Err(Error::BaseMismatch);
    }
    if f.level != g.level {
        return Err(Error::LevelMismatch);
    }
    let eta = f.eta.iter().zip(&g.eta).map(|(a, b)| a + b).collect();
    Ok(ClassElement { base: f.base.clone(), eta, level: f.level })
}

/// v ↦ η(dv) for the new generators of an elementary extension over F's source.
pub fn iota_k(f: &ClassElement, ext: &ElementaryExtension) -> Result<Vec<Element>> {
    f.validate()?;
    if f.base.source().id() != ext.base().id() {
        return Err(Error::MixedAlgebra);
    }
    ext.new_generators()
        .map(|v| {
            let dv = ext.base().restrict_from(ext.total().diff_of(v), ext.total())?;
            f.apply(&dv)
        })
        .collect()
}
