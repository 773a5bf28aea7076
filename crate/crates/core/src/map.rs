//! Homomorphisms of free CDGAs, determined by generator images.

use std::sync::Arc;

use num_traits::Zero;

use crate::algebra::{Deg, Element, FreeCDGA};
use crate::error::{Error, Result};
use crate::rational::{pow_q, Q};

#[derive(Clone, Debug)]
pub struct DGAMap {
    source: Arc<FreeCDGA>,
    target: Arc<FreeCDGA>,
    images: Vec<Element>,
}

impl PartialEq for DGAMap {
    fn eq(&self, other: &Self) -> bool {
        self.source.id() == other.source.id() && self.target.id() == other.target.id() && self.images == other.images
    }
}

impl DGAMap {
    /// Validates degrees and the chain condition on generators.
    pub fn new(source: Arc<FreeCDGA>, target: Arc<FreeCDGA>, images: Vec<Element>) -> Result<Self> {
        let m = DGAMap { source, target, images };
        m.validate()?;
        Ok(m)
    }

    pub fn new_unchecked(source: Arc<FreeCDGA>, target: Arc<FreeCDGA>, images: Vec<Element>) -> Self {
        DGAMap { source, target, images }
    }

    /// Images given as polynomial strings, in generator order of the source.
    pub fn from_strs(source: Arc<FreeCDGA>, target: Arc<FreeCDGA>, images: &[&str]) -> Result<Self> {
        let imgs = images.iter().map(|s| target.parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, imgs)
    }

    pub fn identity(a: &Arc<FreeCDGA>) -> Self {
        let images = (0..a.ngens()).map(|i| a.gen(i)).collect();
        DGAMap { source: a.clone(), target: a.clone(), images }
    }

    pub fn zero(source: &Arc<FreeCDGA>, target: &Arc<FreeCDGA>) -> Self {
        DGAMap { source: source.clone(), target: target.clone(), images: vec![target.zero(); source.ngens()] }
    }

    pub fn source(&self) -> &Arc<FreeCDGA> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FreeCDGA> {
        &self.target
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Element {
        &self.images[i]
    }

    pub fn validate(&self) -> Result<()> {
        if self.images.len() != self.source.ngens() {
            return Err(Error::InvalidMap("one image per generator expected".into()));
        }
        for (i, g) in self.source.generators().iter().enumerate() {
            let img = &self.images[i];
            if img.algebra() != self.target.id() {
                return Err(Error::MixedAlgebra);
            }
            match self.target.degree_of(img) {
                Deg::Any => {}
                Deg::Exactly(k) if k == g.degree => {}
                _ => return Err(Error::InvalidMap(format!("image of {} has the wrong degree", g.name))),
            }
            let lhs = self.target.d(img)?;
            let rhs = self.apply(self.source.diff_of(i))?;
            if lhs != rhs {
                return Err(Error::InvalidMap(format!("chain condition fails on {}", g.name)));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.algebra() != self.source.id() {
            return Err(Error::MixedAlgebra);
        }
        let t = &self.target;
        let mut out = t.zero().with_overflow(x.overflow());
        for (m, c) in x.terms() {
            if self.source.mono_degree(m) > t.truncation() {
                out = out.with_overflow(true);
                continue;
            }
            let mut p = t.scalar(c.clone());
            for &(g, e) in m.factors() {
                for _ in 0..e {
                    p = t.mul_unchecked(&p, &self.images[g]);
                }
            }
            out = &out + &p;
        }
        Ok(out)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &DGAMap) -> Result<DGAMap> {
        if other.target.id() != self.source.id() {
            return Err(Error::MixedAlgebra);
        }
        let images = other.images.iter().map(|x| self.apply(x)).collect::<Result<Vec<_>>>()?;
        Ok(DGAMap { source: other.source.clone(), target: self.target.clone(), images })
    }

    /// Restriction to a prefix sub-algebra of the source.
    pub fn restrict_source(&self, sub: &Arc<FreeCDGA>) -> Result<DGAMap> {
        let k = sub.ngens();
        if k > self.source.ngens() || sub.generators() != &self.source.generators()[..k] {
            return Err(Error::MixedAlgebra);
        }
        Ok(DGAMap { source: sub.clone(), target: self.target.clone(), images: self.images[..k].to_vec() })
    }

    /// Largest coefficient over all generator images.
    pub fn norm_inf(&self) -> Q {
        self.images.iter().map(|e| e.norm_inf()).fold(Q::zero(), |a, b| if b > a { b } else { a })
    }
}

/// v ↦ t^{weight(v)} v.
pub fn weight_scaling(a: &Arc<FreeCDGA>, t: &Q) -> Result<DGAMap> {
    if t.is_zero() {
        return Err(Error::Validation("scaling parameter must be nonzero".into()));
    }
    for (i, g) in a.generators().iter().enumerate() {
        let w = g.weight.ok_or_else(|| Error::MissingWeights(g.name.clone()))?;
        for m in a.diff_of(i).terms().keys() {
            if a.mono_weight(m) != Some(w) {
                return Err(Error::WeightInhomogeneousDifferential(g.name.clone()));
            }
        }
    }
    let images = a
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| a.gen(i).scale(&pow_q(t, g.weight.unwrap_or(0))))
        .collect();
    DGAMap::new(a.clone(), a.clone(), images)
}
