//! Obstruction classes for elementary extensions, explicit extensions, and stage-wise homotopy search.

use std::ops::Range;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{Element, FreeCDGA};
use crate::error::{Error, Result};
use crate::homotopy::{apply_images, is_homotopy, Homotopy};
use crate::interval::{Interval, IntervalElement};
use crate::linalg::{cohomology, relative_cohomology, solve_d, QMatrix, RelativeCohomologySpace};
use crate::map::DGAMap;
use crate::rational::{fmt_q, Q};

/// New generators `start..end` of `total`, all of one degree, with differentials in the prefix.
#[derive(Clone, Debug)]
pub struct ElementaryExtension {
    total: Arc<FreeCDGA>,
    base: Arc<FreeCDGA>,
    start: usize,
    end: usize,
    degree: u32,
}

impl ElementaryExtension {
    pub fn new(total: &Arc<FreeCDGA>, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > total.ngens() {
            return Err(Error::InvalidProblem("empty or out-of-range extension".into()));
        }
        let degree = total.generators()[start].degree;
        for v in start..end {
            if total.generators()[v].degree != degree {
                return Err(Error::InvalidProblem("new generators must share one degree".into()));
            }
            let dv = total.diff_of(v);
            if dv.terms().keys().any(|m| m.max_gen().map_or(false, |g| g >= start)) {
                return Err(Error::InvalidProblem(format!("d{} leaves the base", total.generators()[v].name)));
            }
            if !total.d(dv)?.is_zero() {
                return Err(Error::InvalidProblem(format!("d{} is not closed", total.generators()[v].name)));
            }
        }
        let base = total.prefix(start)?;
        Ok(ElementaryExtension { total: total.clone(), base, start, end, degree })
    }

    pub fn total(&self) -> &Arc<FreeCDGA> {
        &self.total
    }

    pub fn base(&self) -> &Arc<FreeCDGA> {
        &self.base
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn new_generators(&self) -> Range<usize> {
        self.start..self.end
    }

    /// dv as an element of the base.
    pub fn diff_in_base(&self, v: usize) -> Result<Element> {
        self.base.restrict_from(self.total.diff_of(v), &self.total)
    }
}

/// Splits the generator list into maximal runs of one degree whose differentials lie in the preceding generators.
pub fn extension_stages(a: &FreeCDGA) -> Vec<Range<usize>> {
    let gens = a.generators();
    let mut out: Vec<Range<usize>> = Vec::new();
    let mut start = 0;
    for v in 0..gens.len() {
        let fits = v > start
            && gens[v].degree == gens[start].degree
            && a.diff_of(v).terms().keys().all(|m| m.max_gen().map_or(true, |g| g < start));
        if v > start && !fits {
            out.push(start..v);
            start = v;
        }
    }
    if start < gens.len() {
        out.push(start..gens.len());
    }
    out
}

/// f: 𝓐 → 𝓑, g: 𝓐⊗∧V → 𝓒, h: 𝓑 → 𝓒 and H from g|𝓐 (t = 0) to h∘f (t = 1).
#[derive(Clone, Debug)]
pub struct ObstructionProblem {
    pub ext: ElementaryExtension,
    pub f: DGAMap,
    pub g: DGAMap,
    pub h: DGAMap,
    pub homotopy: Homotopy,
}

impl ObstructionProblem {
    pub fn new(ext: ElementaryExtension, f: DGAMap, g: DGAMap, h: DGAMap, homotopy: Homotopy) -> Result<Self> {
        let p = ObstructionProblem { ext, f, g, h, homotopy };
        p.validate()?;
        Ok(p)
    }

    /// Absolute problem: extend f over V, with 𝓒 = Q and h the augmentation.
    pub fn absolute(ext: ElementaryExtension, f: DGAMap) -> Result<Self> {
        let unit = FreeCDGA::from_parts(Vec::new(), Vec::new(), f.target().truncation(), false)?;
        let h = DGAMap::zero(f.target(), &unit);
        let g = DGAMap::zero(ext.total(), &unit);
        let homotopy = Homotopy::constant(&DGAMap::zero(ext.base(), &unit));
        Self::new(ext, f, g, h, homotopy)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidProblem(m.to_string()));
        if self.f.source().id() != self.ext.base().id() {
            return bad("f must start at the base of the extension");
        }
        if self.g.source().id() != self.ext.total().id() {
            return bad("g must start at the extended algebra");
        }
        if self.h.source().id() != self.f.target().id() || self.h.target().id() != self.g.target().id() {
            return bad("h must go from the target of f to the target of g");
        }
        for m in [&self.f, &self.g, &self.h] {
            m.validate().map_err(|e| Error::InvalidProblem(e.to_string()))?;
        }
        let g_base = self.g.restrict_source(self.ext.base())?;
        let hf = self.h.compose(&self.f)?;
        if !is_homotopy(&self.homotopy, &g_base, &hf) {
            return bad("H is not a homotopy from g on the base to h∘f");
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionClass {
    /// (f(dv), g(v) + ∫₀¹H(dv)) per new generator.
    pub cochain: Vec<(Element, Element)>,
    /// Coordinates in H^{n+1}(h) per new generator.
    pub coordinates: Vec<Vec<Q>>,
    space: RelativeCohomologySpace,
}

impl ObstructionClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|v| v.iter().all(|x| x.is_zero()))
    }

    pub fn space(&self) -> &RelativeCohomologySpace {
        &self.space
    }
}

pub fn obstruction(p: &ObstructionProblem) -> Result<ObstructionClass> {
    p.validate()?;
    let n = p.ext.degree();
    let space = relative_cohomology(&p.h, n + 1)?;
    let iv = p.homotopy.interval();
    let mut cochain = Vec::new();
    let mut coordinates = Vec::new();
    for v in p.ext.new_generators() {
        let dv = p.ext.diff_in_base(v)?;
        let ob = p.f.apply(&dv)?;
        let oc = p.g.image(v) + &iv.int_0_1(&p.homotopy.apply(&dv)?)?;
        coordinates.push(space.project(&ob, &oc)?);
        cochain.push((ob, oc));
    }
    Ok(ObstructionClass { cochain, coordinates, space })
}

/// (b(v), c(v)) with db = f(dv) and dc = h(b) - g(v) - ∫₀¹H(dv).
pub fn solve_primitive(o: &ObstructionClass) -> Result<Vec<(Element, Element)>> {
    o.cochain
        .iter()
        .map(|(ob, oc)| o.space.primitive(ob, oc)?.ok_or(Error::NonzeroObstruction))
        .collect()
}

/// g(v) + ∫₀ᵗH(dv) + d(c ⊗ t).
pub(crate) fn extended_image(iv: &Interval, g_v: &Element, h_dv: &IntervalElement, c: &Element) -> Result<IntervalElement> {
    let mut u = IntervalElement::constant(g_v);
    u = u.add(&iv.int_0_t(h_dv)?);
    u = u.add(&iv.d(&IntervalElement::t_term(c, 1))?);
    Ok(u)
}

pub fn extend_with_primitive(p: &ObstructionProblem, prim: &[(Element, Element)]) -> Result<(DGAMap, Homotopy)> {
    let range = p.ext.new_generators();
    if prim.len() != range.len() {
        return Err(Error::InvalidProblem("one primitive per new generator expected".into()));
    }
    let total = p.ext.total();
    let mut f_imgs: Vec<Element> = p.f.images().to_vec();
    let mut h_imgs: Vec<IntervalElement> = p.homotopy.images().to_vec();
    let iv = p.homotopy.interval();
    for (k, v) in range.enumerate() {
        let (b, c) = &prim[k];
        let dv = p.ext.diff_in_base(v)?;
        f_imgs.push(b.clone());
        h_imgs.push(extended_image(&iv, p.g.image(v), &p.homotopy.apply(&dv)?, c)?);
    }
    // generators after the extension are not part of the problem
    let ext_alg = total.prefix(p.ext.new_generators().end)?;
    let f_tilde = DGAMap::new(ext_alg.clone(), p.f.target().clone(), f_imgs)?;
    let h_tilde = Homotopy::new(ext_alg.clone(), p.g.target().clone(), h_imgs)?;
    let g_ext = p.g.restrict_source(&ext_alg)?;
    if !is_homotopy(&h_tilde, &g_ext, &p.h.compose(&f_tilde)?) {
        return Err(Error::InvalidHomotopy("extended homotopy has the wrong endpoints".into()));
    }
    Ok((f_tilde, h_tilde))
}

/// Deformations D of a homotopy on the generators of `p` with D|₀ = D|₁ = 0 (dt terms only).
/// Each direction lists one dt-only interval element per generator.
pub(crate) fn loop_directions(p: &Arc<FreeCDGA>, b: &Arc<FreeCDGA>, h_imgs: &[IntervalElement]) -> Result<Vec<Vec<IntervalElement>>> {
    let zero = IntervalElement::zero(b.id());
    let mut dirs: Vec<Vec<IntervalElement>> = Vec::new();
    for w in 0..p.ngens() {
        let deg = p.generators()[w].degree;
        let dw = p.diff_of(w);
        if !dw.is_zero() && !dirs.is_empty() && deg <= b.truncation() {
            let deltas: Vec<IntervalElement> = dirs
                .iter()
                .map(|dir| first_order(p, b, h_imgs, dir, dw))
                .collect::<Result<Vec<_>>>()?;
            let coh = cohomology(b, deg)?;
            let tmax = deltas.iter().map(|u| u.t_degree()).max().unwrap_or(0);
            let mut rows: Vec<Vec<Q>> = Vec::new();
            for j in 0..=tmax {
                let per_dir: Vec<Vec<Q>> = deltas
                    .iter()
                    .map(|u| match u.dt_part().get(&j) {
                        Some(x) => coh.project(x),
                        None => Ok(vec![Q::zero(); coh.dimension()]),
                    })
                    .collect::<Result<Vec<_>>>()?;
                for r in 0..coh.dimension() {
                    rows.push(per_dir.iter().map(|v| v[r].clone()).collect());
                }
            }
            let combos: Vec<Vec<Q>> = if rows.is_empty() {
                (0..dirs.len()).map(|k| unit(dirs.len(), k)).collect()
            } else {
                QMatrix::from_rows(&rows).kernel()
            };
            let mut next = Vec::new();
            for nu in combos {
                let mut dir = combine(&dirs, &nu, b.id());
                let delta = combine_one(&deltas, &nu, b.id());
                let mut dw_img = IntervalElement::zero(b.id());
                for (j, x) in delta.dt_part() {
                    dw_img = dw_img.add(&IntervalElement::dt_term(&solve_d(b, x)?, *j));
                }
                dir.push(dw_img);
                next.push(dir);
            }
            dirs = next;
        } else {
            for dir in dirs.iter_mut() {
                dir.push(zero.clone());
            }
        }
        if deg >= 1 && deg - 1 <= b.truncation() {
            for r in cohomology(b, deg - 1)?.representatives {
                let mut dir = vec![zero.clone(); w];
                dir.push(IntervalElement::dt_term(&r, 0));
                dirs.push(dir);
            }
        }
    }
    Ok(dirs)
}

fn unit(n: usize, k: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[k] = num_traits::One::one();
    v
}

fn combine(dirs: &[Vec<IntervalElement>], nu: &[Q], alg: u64) -> Vec<IntervalElement> {
    let len = dirs.first().map_or(0, |d| d.len());
    (0..len)
        .map(|i| {
            let mut acc = IntervalElement::zero(alg);
            for (d, c) in dirs.iter().zip(nu) {
                if !c.is_zero() {
                    acc = acc.add(&d[i].scale(c));
                }
            }
            acc
        })
        .collect()
}

fn combine_one(xs: &[IntervalElement], nu: &[Q], alg: u64) -> IntervalElement {
    let mut acc = IntervalElement::zero(alg);
    for (x, c) in xs.iter().zip(nu) {
        if !c.is_zero() {
            acc = acc.add(&x.scale(c));
        }
    }
    acc
}

/// (H + D)(x) - H(x); exact in D because dt² = 0.
fn first_order(p: &FreeCDGA, b: &Arc<FreeCDGA>, h_imgs: &[IntervalElement], dir: &[IntervalElement], x: &Element) -> Result<IntervalElement> {
    let mut shifted: Vec<IntervalElement> = h_imgs.to_vec();
    for (i, d) in dir.iter().enumerate() {
        shifted[i] = shifted[i].add(d);
    }
    let a = apply_images(p, b, &shifted, x)?;
    let c = apply_images(p, b, &h_imgs[..p.ngens()], x)?;
    Ok(a.sub(&c))
}

/// Where the stage search failed.
#[derive(Clone, Debug, Serialize)]
pub struct StageObstruction {
    pub stage: usize,
    pub degree: u32,
    /// Class of b - g - ∫₀¹H(d·) per generator, flattened.
    pub class: Vec<String>,
    /// Rank of the correction available from loops of the previous stages.
    pub loop_rank: usize,
}

#[derive(Clone, Debug)]
pub enum Between {
    Homotopic(Homotopy),
    Obstructed(StageObstruction),
}

/// How loops are used when the stage class is nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LoopMode {
    /// Kill the class completely or report an obstruction.
    Kill,
    /// Move the class into a fixed complement of the loop image.
    Reduce,
    Off,
}

pub(crate) struct StageOutcome {
    pub kappa: Vec<Element>,
    pub shift: Q,
    pub obstructed: Option<(Vec<Vec<Q>>, usize)>,
}

/// Applies loop corrections to `h_imgs` (on generators `0..stage.start`) and returns the corrected κ.
pub(crate) fn correct_stage(
    src: &Arc<FreeCDGA>,
    b: &Arc<FreeCDGA>,
    h_imgs: &mut Vec<IntervalElement>,
    stage: Range<usize>,
    kappa: Vec<Element>,
    mode: LoopMode,
) -> Result<StageOutcome> {
    let n = src.generators()[stage.start].degree;
    if n > b.truncation() {
        return Ok(StageOutcome { kappa, shift: Q::zero(), obstructed: None });
    }
    let coh = cohomology(b, n)?;
    let class: Vec<Vec<Q>> = kappa.iter().map(|k| coh.project(k)).collect::<Result<Vec<_>>>()?;
    let flat: Vec<Q> = class.iter().flatten().cloned().collect();
    if mode == LoopMode::Off || flat.is_empty() {
        let obstructed = if flat.iter().any(|x| !x.is_zero()) { Some((class, 0)) } else { None };
        return Ok(StageOutcome { kappa, shift: Q::zero(), obstructed });
    }
    let p = src.prefix(stage.start)?;
    let dirs = loop_directions(&p, b, &h_imgs[..stage.start])?;
    let iv = Interval::new(b);
    let mut l_vecs: Vec<Vec<Element>> = Vec::new();
    let mut cols: Vec<Vec<Q>> = Vec::new();
    for dir in &dirs {
        let mut ls = Vec::new();
        let mut col = Vec::new();
        for v in stage.clone() {
            let dv = p.restrict_from(src.diff_of(v), src)?;
            let l = iv.int_0_1(&first_order(&p, b, &h_imgs[..stage.start], dir, &dv)?)?;
            col.extend(coh.project(&l)?);
            ls.push(l);
        }
        l_vecs.push(ls);
        cols.push(col);
    }
    let lmat = QMatrix::from_cols(flat.len(), &cols);
    let loop_rank = lmat.rank();
    let q: Option<Vec<Q>> = match mode {
        LoopMode::Kill => lmat.solve(&flat),
        LoopMode::Reduce => {
            // flat = L q + w with w in the span of unit vectors off the pivot rows of L's column space.
            let indep = lmat.independent_cols();
            let basis: Vec<Vec<Q>> = indep.iter().map(|&j| lmat.col(j)).collect();
            let t = QMatrix::from_rows(&basis);
            let pivot_rows = t.rref().1;
            let mut full = basis.clone();
            for i in 0..flat.len() {
                if !pivot_rows.contains(&i) {
                    full.push(unit(flat.len(), i));
                }
            }
            let sol = QMatrix::from_cols(flat.len(), &full).solve(&flat).expect("complement spans");
            let mut qv = vec![Q::zero(); dirs.len()];
            for (k, &j) in indep.iter().enumerate() {
                qv[j] = sol[k].clone();
            }
            Some(qv)
        }
        LoopMode::Off => unreachable!(),
    };
    let Some(qv) = q else {
        return Ok(StageOutcome { kappa, shift: Q::zero(), obstructed: Some((class, loop_rank)) });
    };
    let mut shift = Q::zero();
    let mut kappa = kappa;
    for (k, c) in qv.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (i, d) in dirs[k].iter().enumerate() {
            h_imgs[i] = h_imgs[i].add(&d.scale(c));
        }
        for (j, l) in l_vecs[k].iter().enumerate() {
            kappa[j] = &kappa[j] - &l.scale(c);
        }
        if c.abs() > shift {
            shift = c.abs();
        }
    }
    Ok(StageOutcome { kappa, shift, obstructed: None })
}

/// Searches for a homotopy from `start` (t = 0) to `end` (t = 1), stage by stage,
/// absorbing stage classes into loops of the earlier stages when possible.
pub fn homotopy_between(start: &DGAMap, end: &DGAMap) -> Result<Between> {
    if start.source().id() != end.source().id() || start.target().id() != end.target().id() {
        return Err(Error::MixedAlgebra);
    }
    start.validate()?;
    end.validate()?;
    let src = start.source();
    let b = start.target();
    let iv = Interval::new(b);
    let mut h_imgs: Vec<IntervalElement> = Vec::new();
    for (si, stage) in extension_stages(src).into_iter().enumerate() {
        let p = src.prefix(stage.start)?;
        let mut kappa = Vec::new();
        for v in stage.clone() {
            let dv = p.restrict_from(src.diff_of(v), src)?;
            let integral = iv.int_0_1(&apply_images(&p, b, &h_imgs, &dv)?)?;
            kappa.push(&(end.image(v) - start.image(v)) - &integral);
        }
        let out = correct_stage(src, b, &mut h_imgs, stage.clone(), kappa, LoopMode::Kill)?;
        if let Some((class, loop_rank)) = out.obstructed {
            return Ok(Between::Obstructed(StageObstruction {
                stage: si,
                degree: src.generators()[stage.start].degree,
                class: class.iter().flatten().map(fmt_q).collect(),
                loop_rank,
            }));
        }
        let p = src.prefix(stage.start)?;
        for (k, v) in stage.clone().enumerate() {
            let c = if out.kappa[k].is_zero() { b.zero() } else { solve_d(b, &out.kappa[k])? };
            let dv = p.restrict_from(src.diff_of(v), src)?;
            let h_dv = apply_images(&p, b, &h_imgs, &dv)?;
            h_imgs.push(extended_image(&iv, start.image(v), &h_dv, &c)?);
        }
    }
    let h = Homotopy::new(src.clone(), b.clone(), h_imgs)?;
    if !is_homotopy(&h, start, end) {
        return Err(Error::InvalidHomotopy("stage search produced wrong endpoints".into()));
    }
    Ok(Between::Homotopic(h))
}
