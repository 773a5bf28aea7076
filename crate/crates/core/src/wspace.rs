//! Finite-dimensional representative spaces W inside a model of X, and homotoping maps into ℚ[W].

use std::ops::Range;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{Element, FreeCDGA};
use crate::error::{Error, Result};
use crate::homotopy::{apply_images, is_homotopy, Homotopy};
use crate::interval::{Interval, IntervalElement};
use crate::linalg::{cohomology, degree_matrix, solve_d, QMatrix};
use crate::map::DGAMap;
use crate::obstruction::{correct_stage, extended_image, extension_stages, LoopMode};
use crate::rational::{fmt_q, Q};

#[derive(Clone, Debug)]
pub struct WStage {
    pub generators: Range<usize>,
    pub degree: u32,
    /// Antiderivatives of the coboundaries expressible in ℚ[W] of the earlier stages.
    pub s_part: Vec<Element>,
    /// Cohomology representatives in this stage's degree.
    pub h_part: Vec<Element>,
}

#[derive(Clone, Debug)]
pub struct RepresentativeSpace {
    pub domain: Arc<FreeCDGA>,
    pub y_model: Arc<FreeCDGA>,
    pub stages: Vec<WStage>,
}

impl RepresentativeSpace {
    /// All W elements from stages `< k`.
    pub fn elements_before(&self, k: usize) -> Vec<Element> {
        self.stages[..k].iter().flat_map(|s| s.s_part.iter().chain(&s.h_part).cloned()).collect()
    }

    pub fn elements(&self) -> Vec<Element> {
        self.elements_before(self.stages.len())
    }

    /// Coordinate vectors spanning ℚ[W_k] in degree n (possibly dependent).
    pub fn algebra_span(&self, k: usize, n: u32) -> Result<Vec<Vec<Q>>> {
        span_products(&self.domain, &self.elements_before(k), n)
    }

    pub fn contains(&self, x: &Element) -> Result<bool> {
        let n = match self.domain.degree_of(x) {
            crate::algebra::Deg::Any => return Ok(true),
            crate::algebra::Deg::Exactly(n) => n,
            crate::algebra::Deg::Mixed => return Ok(false),
        };
        if n > self.domain.truncation() {
            return Ok(x.is_zero());
        }
        let span = self.algebra_span(self.stages.len(), n)?;
        let v = self.domain.coords(x, n)?;
        Ok(in_span(&span, &v, self.domain.basis(n)?.len()))
    }
}

fn in_span(span: &[Vec<Q>], v: &[Q], dim: usize) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return true;
    }
    let m = QMatrix::from_cols(dim, span);
    let mut with = span.to_vec();
    with.push(v.to_vec());
    QMatrix::from_cols(dim, &with).rank() == m.rank()
}

fn span_products(a: &FreeCDGA, elems: &[Element], n: u32) -> Result<Vec<Vec<Q>>> {
    let degs: Vec<u32> = elems
        .iter()
        .map(|e| match a.degree_of(e) {
            crate::algebra::Deg::Exactly(d) => d,
            _ => 0,
        })
        .collect();
    let mut out = Vec::new();
    fn rec(a: &FreeCDGA, elems: &[Element], degs: &[u32], from: usize, left: u32, acc: Element, out: &mut Vec<Vec<Q>>, n: u32) -> Result<()> {
        if left == 0 {
            if !acc.is_zero() {
                out.push(a.coords(&acc, n)?);
            }
            return Ok(());
        }
        for i in from..elems.len() {
            if degs[i] == 0 || degs[i] > left {
                continue;
            }
            let next = a.mul_unchecked(&acc, &elems[i]);
            if next.is_zero() {
                continue;
            }
            rec(a, elems, degs, i, left - degs[i], next, out, n)?;
        }
        Ok(())
    }
    rec(a, elems, &degs, 0, n, a.one(), &mut out, n)?;
    Ok(out)
}

pub fn construct_w(domain: &Arc<FreeCDGA>, y_model: &Arc<FreeCDGA>) -> Result<RepresentativeSpace> {
    let mut w = RepresentativeSpace { domain: domain.clone(), y_model: y_model.clone(), stages: Vec::new() };
    for range in extension_stages(y_model) {
        let n = y_model.generators()[range.start].degree;
        if n > domain.truncation() {
            break;
        }
        let mut s_part = Vec::new();
        if n + 1 <= domain.truncation() {
            // ℚ[W_k]^{n+1} ∩ im d_n
            let dim = domain.basis(n + 1)?.len();
            let u = w.algebra_span(w.stages.len(), n + 1)?;
            let dm = degree_matrix(domain, n)?;
            let image: Vec<Vec<Q>> = dm.independent_cols().iter().map(|&j| dm.col(j)).collect();
            if !u.is_empty() && !image.is_empty() {
                let mut cols = u.clone();
                cols.extend(image.iter().map(|v| v.iter().map(|x| -x.clone()).collect::<Vec<_>>()));
                let ker = QMatrix::from_cols(dim, &cols).kernel();
                let mut inter: Vec<Vec<Q>> = Vec::new();
                for kv in ker {
                    let mut vec = vec![Q::zero(); dim];
                    for (c, col) in kv.iter().zip(&u) {
                        if c.is_zero() {
                            continue;
                        }
                        for (o, x) in vec.iter_mut().zip(col) {
                            *o += c * x;
                        }
                    }
                    inter.push(vec);
                }
                let basis_idx = if inter.is_empty() { Vec::new() } else { QMatrix::from_cols(dim, &inter).independent_cols() };
                for j in basis_idx {
                    let e = domain.from_coords(&inter[j], n + 1)?;
                    s_part.push(solve_d(domain, &e)?);
                }
            }
        }
        let h_part = cohomology(domain, n)?.representatives;
        w.stages.push(WStage { generators: range, degree: n, s_part, h_part });
    }
    Ok(w)
}

#[derive(Clone, Debug, Serialize)]
pub struct StageNorm {
    pub stage: usize,
    pub degree: u32,
    /// Largest W-coordinate of the new generator images.
    pub map_norm: String,
    /// Largest coefficient of the antiderivatives and loop shifts used.
    pub homotopy_norm: String,
}

#[derive(Clone, Debug)]
pub struct IntoW {
    pub map: DGAMap,
    pub homotopy: Homotopy,
    pub trace: Vec<StageNorm>,
}

/// Homotopes φ′ into ℚ[W]. With `reduce_loops`, stage classes are moved into a fixed complement of the loop image first.
pub fn homotope_into_w(phi_prime: &DGAMap, w: &RepresentativeSpace, reduce_loops: bool) -> Result<IntoW> {
    phi_prime.validate()?;
    let src = phi_prime.source();
    let b = phi_prime.target();
    if src.id() != w.y_model.id() || b.id() != w.domain.id() {
        return Err(Error::MixedAlgebra);
    }
    let iv = Interval::new(b);
    let mut h_imgs: Vec<IntervalElement> = Vec::new();
    let mut images: Vec<Element> = Vec::new();
    let mut trace = Vec::new();
    for (si, range) in extension_stages(src).into_iter().enumerate() {
        let n = src.generators()[range.start].degree;
        let p = src.prefix(range.start)?;
        if si >= w.stages.len() {
            // above the truncation: everything is zero in these degrees
            for v in range.clone() {
                images.push(b.zero());
                h_imgs.push(IntervalElement::constant(phi_prime.image(v)));
            }
            continue;
        }
        let mut b_tilde = Vec::new();
        let mut kappa = Vec::new();
        for v in range.clone() {
            let dv = p.restrict_from(src.diff_of(v), src)?;
            let phi_k = DGAMap::new_unchecked(p.clone(), b.clone(), images.clone());
            let target_dv = phi_k.apply(&dv)?;
            let bt = if target_dv.is_zero() { b.zero() } else { solve_d(b, &target_dv)? };
            let integral = iv.int_0_1(&apply_images(&p, b, &h_imgs, &dv)?)?;
            kappa.push(&(&bt - phi_prime.image(v)) - &integral);
            b_tilde.push(bt);
        }
        let mode = if reduce_loops { LoopMode::Reduce } else { LoopMode::Off };
        let out = correct_stage(src, b, &mut h_imgs, range.clone(), kappa, mode)?;
        let coh = cohomology(b, n)?;
        let stage = &w.stages[si];
        let mut map_norm = Q::zero();
        let mut hom_norm = out.shift.clone();
        for (k, v) in range.clone().enumerate() {
            let kap = &out.kappa[k];
            let class = coh.project(kap)?;
            let a = coh.representative(&class)?;
            let bv = &b_tilde[k] - &a;
            let c = solve_d(b, &(kap - &a))?;
            let dv = p.restrict_from(src.diff_of(v), src)?;
            let h_dv = apply_images(&p, b, &h_imgs, &dv)?;
            h_imgs.push(extended_image(&iv, phi_prime.image(v), &h_dv, &c)?);
            for x in w_coordinates(b, stage, &b_tilde[k], &class)? {
                if x.abs() > map_norm {
                    map_norm = x.abs();
                }
            }
            if c.norm_inf() > hom_norm {
                hom_norm = c.norm_inf();
            }
            images.push(bv);
        }
        trace.push(StageNorm { stage: si, degree: n, map_norm: fmt_q(&map_norm), homotopy_norm: fmt_q(&hom_norm) });
    }
    let map = DGAMap::new(src.clone(), b.clone(), images)?;
    let homotopy = Homotopy::new(src.clone(), b.clone(), h_imgs)?;
    if !is_homotopy(&homotopy, phi_prime, &map) {
        return Err(Error::InvalidHomotopy("into-W homotopy has the wrong endpoints".into()));
    }
    Ok(IntoW { map, homotopy, trace })
}

/// Coordinates of b̃ in the stage's S basis followed by the harmonic class coordinates (negated, since b = b̃ - a).
fn w_coordinates(b: &FreeCDGA, stage: &WStage, b_tilde: &Element, class: &[Q]) -> Result<Vec<Q>> {
    let mut out: Vec<Q> = class.iter().map(|x| -x.clone()).collect();
    if b_tilde.is_zero() {
        return Ok(out);
    }
    if stage.s_part.is_empty() {
        return Err(Error::NotInW(b.fmt_element(b_tilde)));
    }
    let cols = stage.s_part.iter().map(|e| b.coords(e, stage.degree)).collect::<Result<Vec<_>>>()?;
    let dim = b.basis(stage.degree)?.len();
    let v = b.coords(b_tilde, stage.degree)?;
    let x = QMatrix::from_cols(dim, &cols).solve(&v).ok_or_else(|| Error::NotInW(b.fmt_element(b_tilde)))?;
    out.extend(x);
    Ok(out)
}
