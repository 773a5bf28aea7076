#![allow(dead_code)]

use std::sync::Arc;

use cdga::rational::q;
use cdga::zoo::{builtin_model, MODEL_IDS};
use cdga::{Element, FreeCDGA, Generator, IntervalElement, Q};
use rand::Rng;

pub fn model(id: &str) -> Arc<FreeCDGA> {
    builtin_model(id).unwrap().algebra
}

pub fn all_models() -> Vec<Arc<FreeCDGA>> {
    MODEL_IDS.iter().map(|id| model(id)).collect()
}

pub fn s4() -> Arc<FreeCDGA> {
    model("s4")
}

/// Free algebra on x:3, y:4 only (no z), truncated at 8.
pub fn s3_y_free() -> Arc<FreeCDGA> {
    FreeCDGA::build(vec![Generator::new("x", 3), Generator::new("y", 4)], &[], 8).unwrap()
}

pub fn small_q<R: Rng>(rng: &mut R) -> Q {
    let n = rng.gen_range(-4..=4);
    let d = rng.gen_range(1..=3);
    Q::new(n.into(), d.into())
}

/// Random homogeneous element of degree n (zero when the degree is empty).
pub fn random_element<R: Rng>(rng: &mut R, a: &FreeCDGA, n: u32) -> Element {
    let len = a.basis(n).unwrap().len();
    let coords: Vec<Q> = (0..len).map(|_| if rng.gen_bool(0.6) { small_q(rng) } else { q(0) }).collect();
    a.from_coords(&coords, n).unwrap()
}

/// Random interval element of degree n: Σ b_i t^i + Σ c_j t^j dt, t-degree ≤ 3.
pub fn random_interval<R: Rng>(rng: &mut R, a: &FreeCDGA, n: u32) -> IntervalElement {
    let mut u = IntervalElement::zero(a.id());
    for i in 0..=3 {
        if rng.gen_bool(0.7) {
            u = u.add(&IntervalElement::t_term(&random_element(rng, a, n), i));
        }
        if n >= 1 && rng.gen_bool(0.7) {
            u = u.add(&IntervalElement::dt_term(&random_element(rng, a, n - 1), i));
        }
    }
    u
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

use cdga::linalg::degree_matrix;
use cdga::{cohomology, solve_d, DGAMap, ElementaryExtension, Homotopy, Interval, ObstructionProblem, QMatrix};

/// Random closed element of degree n: harmonic part plus a coboundary.
pub fn random_cocycle<R: Rng>(rng: &mut R, a: &Arc<FreeCDGA>, n: u32) -> Element {
    if n > a.truncation() {
        return a.zero();
    }
    let h = cohomology(a, n).unwrap();
    let coords: Vec<Q> = (0..h.dimension()).map(|_| if rng.gen_bool(0.7) { small_q(rng) } else { q(0) }).collect();
    let mut x = h.representative(&coords).unwrap();
    if n >= 1 && rng.gen_bool(0.5) {
        x = &x + &a.d(&random_element(rng, a, n - 1)).unwrap();
    }
    x
}

/// Random DGA map built generator by generator; `None` when some f(dv) is not exact.
pub fn random_map<R: Rng>(rng: &mut R, src: &Arc<FreeCDGA>, tgt: &Arc<FreeCDGA>) -> Option<DGAMap> {
    let mut images: Vec<Element> = Vec::new();
    for (i, g) in src.generators().iter().enumerate() {
        let mut partial = images.clone();
        partial.resize(src.ngens(), tgt.zero());
        let rhs = DGAMap::new_unchecked(src.clone(), tgt.clone(), partial).apply(src.diff_of(i)).unwrap();
        let base = if rhs.is_zero() { tgt.zero() } else { solve_d(tgt, &rhs).ok()? };
        images.push(&base + &random_cocycle(rng, tgt, g.degree));
    }
    DGAMap::new(src.clone(), tgt.clone(), images).ok()
}

/// Small algebras 𝓐 ⊗ ∧(v): generators, the name of v's differential partner terms, and dv.
fn extension_specs<R: Rng>(rng: &mut R) -> Vec<(Vec<Generator>, Vec<(String, String)>)> {
    let c = |rng: &mut R| {
        let k: i64 = rng.gen_range(1..=2);
        if rng.gen_bool(0.5) { k } else { -k }
    };
    vec![
        (vec![Generator::new("a", 4), Generator::new("v", 7)], vec![("v".into(), format!("{}*a^2", c(rng)))]),
        (vec![Generator::new("x", 3), Generator::new("y", 4), Generator::new("v", 7)], vec![("v".into(), format!("{}*y^2", c(rng)))]),
        (vec![Generator::new("x", 3), Generator::new("y", 4), Generator::new("v", 6)], vec![("v".into(), format!("{}*x*y", c(rng)))]),
        (vec![Generator::new("a", 2), Generator::new("v", 3)], vec![("v".into(), format!("{}*a^2", c(rng)))]),
        (vec![Generator::new("u", 2), Generator::new("w", 3), Generator::new("v", 4)], vec![("v".into(), format!("{}*u*w", c(rng)))]),
        (
            vec![Generator::new("a", 2), Generator::new("b", 3), Generator::new("e", 2), Generator::new("v", 3)],
            vec![("b".into(), "a^2".into()), ("v".into(), format!("{}*a*e + {}*e^2", c(rng), c(rng)))],
        ),
    ]
}

pub fn small_targets() -> Vec<Arc<FreeCDGA>> {
    let mut v = all_models();
    v.push(s3_y_free());
    v.push(FreeCDGA::build(vec![Generator::new("u", 2), Generator::new("w", 3)], &[], 8).unwrap());
    v
}

/// A random extension problem: absolute (𝓒 = Q) or relative with a possibly nonconstant H.
pub fn random_problem<R: Rng>(rng: &mut R) -> ObstructionProblem {
    let targets = small_targets();
    loop {
        let mut specs = extension_specs(rng);
        let (gens, diffs) = specs.swap_remove(rng.gen_range(0..specs.len()));
        let d: Vec<(&str, &str)> = diffs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let total = FreeCDGA::build(gens, &d, 8).unwrap();
        let n = total.ngens();
        let ext = ElementaryExtension::new(&total, n - 1, n).unwrap();
        let b = targets[rng.gen_range(0..targets.len())].clone();
        let Some(f) = random_map(rng, ext.base(), &b) else { continue };
        if rng.gen_bool(0.4) {
            return ObstructionProblem::absolute(ext, f).unwrap();
        }
        let c = targets[rng.gen_range(0..targets.len())].clone();
        let Some(h) = random_map(rng, &b, &c) else { continue };
        let hf = h.compose(&f).unwrap();
        // H(a) = hf(a) + d(c ⊗ (t - 1)) on closed generators, so H ends at h∘f
        let iv = Interval::new(&c);
        let base = ext.base();
        let images: Vec<IntervalElement> = (0..base.ngens())
            .map(|i| {
                let deg = base.generators()[i].degree;
                let mut u = IntervalElement::constant(hf.image(i));
                if base.diff_of(i).is_zero() && deg >= 1 && rng.gen_bool(0.5) {
                    let cc = random_element(rng, &c, deg - 1);
                    let shift = IntervalElement::t_term(&cc, 1).sub(&IntervalElement::constant(&cc));
                    u = u.add(&iv.d(&shift).unwrap());
                }
                u
            })
            .collect();
        let homotopy = Homotopy::new(base.clone(), c.clone(), images).unwrap_or_else(|_| Homotopy::constant(&hf));
        let g0 = cdga::restrict(&homotopy, 0);
        let dv = ext.diff_in_base(n - 1).unwrap();
        let rhs = g0.apply(&dv).unwrap();
        let gv = if rhs.is_zero() { c.zero() } else {
            match solve_d(&c, &rhs) {
                Ok(x) => x,
                Err(_) => continue,
            }
        };
        let gv = &gv + &random_cocycle(rng, &c, total.generators()[n - 1].degree);
        let mut gimgs = g0.images().to_vec();
        gimgs.push(gv);
        let g = DGAMap::new(total.clone(), c.clone(), gimgs).unwrap();
        return ObstructionProblem::new(ext, f, g, h, homotopy).unwrap();
    }
}

/// Whether (b, c) with db = f(dv), dc = h(b) - g(v) - ∫₀¹H(dv) exists, by one direct linear solve.
pub fn direct_extension_exists(p: &ObstructionProblem) -> bool {
    let v = p.ext.new_generators().start;
    let n = p.ext.degree();
    let bb = p.f.target();
    let cc = p.g.target();
    let dv = p.ext.diff_in_base(v).unwrap();
    let top = p.f.apply(&dv).unwrap();
    let iv = Interval::new(cc);
    let low = &p.g.image(v).clone() + &iv.int_0_1(&p.homotopy.apply(&dv).unwrap()).unwrap();
    let dim = |a: &FreeCDGA, k: u32| if k > a.truncation() { 0 } else { a.basis(k).unwrap().len() };
    let (bn, bn1) = (dim(bb, n), dim(bb, n + 1));
    let (cn1, cn) = (if n >= 1 { dim(cc, n - 1) } else { 0 }, dim(cc, n));
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    if bn1 > 0 {
        let db = degree_matrix(bb, n).unwrap();
        let t = bb.coords(&top, n + 1).unwrap();
        for i in 0..bn1 {
            let mut r = db.row(i);
            r.resize(bn + cn1, q(0));
            rows.push(r);
            rhs.push(t[i].clone());
        }
    }
    if cn > 0 {
        let hcols: Vec<Vec<Q>> = bb.basis(n).unwrap().iter().map(|m| cc.coords(&p.h.apply(&bb.monomial(m.clone(), q(1))).unwrap(), n).unwrap()).collect();
        let hm = QMatrix::from_cols(cn, &hcols);
        let dc = if cn1 > 0 { Some(degree_matrix(cc, n - 1).unwrap()) } else { None };
        let t = cc.coords(&low, n).unwrap();
        for i in 0..cn {
            let mut r = hm.row(i);
            if let Some(dc) = dc {
                r.extend(dc.row(i).iter().map(|x| -x.clone()));
            }
            rows.push(r);
            rhs.push(t[i].clone());
        }
    }
    if rows.is_empty() {
        return top.is_zero() && low.is_zero();
    }
    QMatrix::from_rows_n(&rows, bn + cn1).solve(&rhs).is_some()
}
