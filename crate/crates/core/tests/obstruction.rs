mod common;

use std::sync::Arc;

use cdga::rational::q;
use cdga::zoo::{builtin_pair, classify_map, PAIR_IDS};
use cdga::{
    construct_w, extend_with_primitive, homotope_into_w, homotopy_between, is_homotopy, obstruction, restrict, solve_primitive, Between,
    DGAMap, ElementaryExtension, Error, FreeCDGA, Generator, Homotopy, Interval, IntervalElement, ObstructionProblem,
};
use common::*;

fn s4_ext() -> ElementaryExtension {
    ElementaryExtension::new(&s4(), 1, 2).unwrap()
}

#[test]
fn trivial_problem_has_zero_class() {
    let ext = s4_ext();
    let x = model("s3xs4");
    let f = DGAMap::from_strs(ext.base().clone(), x.clone(), &["3*y"]).unwrap();
    let h = DGAMap::identity(&x);
    let g = DGAMap::from_strs(s4(), x.clone(), &["3*y", "9*z + x*y"]).unwrap();
    let p = ObstructionProblem::new(ext, f.clone(), g.clone(), h, Homotopy::constant(&f)).unwrap();
    let o = obstruction(&p).unwrap();
    assert!(o.is_zero());
    let prim = solve_primitive(&o).unwrap();
    let (ft, ht) = extend_with_primitive(&p, &prim).unwrap();
    assert!(ft.is_valid());
    assert!(is_homotopy(&ht, &g, &ft));
}

#[test]
fn exact_square_has_zero_class_and_extends() {
    let ext = s4_ext();
    let x = model("s3xs4");
    for alpha in [-2i64, 1, 3] {
        let f = DGAMap::from_strs(ext.base().clone(), x.clone(), &[&format!("{alpha}*y")]).unwrap();
        let p = ObstructionProblem::absolute(ext.clone(), f).unwrap();
        let o = obstruction(&p).unwrap();
        assert!(o.is_zero());
        let prim = solve_primitive(&o).unwrap();
        assert_eq!(prim[0].0, x.parse(&format!("{}*z", alpha * alpha)).unwrap());
        assert!(prim[0].1.is_zero());
        let (ft, _) = extend_with_primitive(&p, &prim).unwrap();
        assert!(ft.is_valid());
        assert_eq!(ft.image(1), &x.parse(&format!("{}*z", alpha * alpha)).unwrap());
    }
}

#[test]
fn missing_antiderivative_gives_nonzero_class() {
    let ext = s4_ext();
    let free = s3_y_free();
    for alpha in [-2i64, 1, 3] {
        let f = DGAMap::from_strs(ext.base().clone(), free.clone(), &[&format!("{alpha}*y")]).unwrap();
        let o = obstruction(&ObstructionProblem::absolute(ext.clone(), f).unwrap()).unwrap();
        assert!(!o.is_zero());
        assert_eq!(o.cochain[0].0, free.parse(&format!("{}*y^2", alpha * alpha)).unwrap());
        assert_eq!(solve_primitive(&o).unwrap_err(), Error::NonzeroObstruction);
    }
    let f0 = DGAMap::from_strs(ext.base().clone(), free.clone(), &["0"]).unwrap();
    assert!(obstruction(&ObstructionProblem::absolute(ext, f0).unwrap()).unwrap().is_zero());
}

#[test]
fn invalid_problems_are_rejected() {
    let ext = s4_ext();
    let x = model("s3xs4");
    let f = DGAMap::from_strs(ext.base().clone(), x.clone(), &["y"]).unwrap();
    let g = DGAMap::from_strs(s4(), x.clone(), &["2*y", "4*z"]).unwrap();
    let r = ObstructionProblem::new(ext, f.clone(), g, DGAMap::identity(&x), Homotopy::constant(&f));
    assert!(matches!(r, Err(Error::InvalidProblem(_))));
}

#[test]
fn obstruction_vanishes_iff_direct_solve_succeeds() {
    let mut rng = seeded(2024);
    let (mut zero, mut nonzero) = (0, 0);
    for _ in 0..200 {
        let p = random_problem(&mut rng);
        let o = obstruction(&p).unwrap();
        assert_eq!(o.is_zero(), direct_extension_exists(&p));
        if o.is_zero() {
            zero += 1;
            let (ft, ht) = extend_with_primitive(&p, &solve_primitive(&o).unwrap()).unwrap();
            assert!(ft.is_valid());
            assert!(is_homotopy(&ht, &p.g, &p.h.compose(&ft).unwrap()));
        } else {
            nonzero += 1;
        }
    }
    // both outcomes are exercised
    assert!(zero > 20 && nonzero > 20, "zero={zero} nonzero={nonzero}");
}

#[test]
fn class_is_unchanged_by_homotopies_rel_endpoints() {
    // adding d(e ⊗ (t² - t)) on closed generators keeps both ends of H
    let mut rng = seeded(99);
    let mut changed = 0;
    for _ in 0..120 {
        let p = random_problem(&mut rng);
        let base = p.ext.base().clone();
        let c = p.g.target().clone();
        let iv = Interval::new(&c);
        let images: Vec<IntervalElement> = (0..base.ngens())
            .map(|i| {
                let mut u = p.homotopy.images()[i].clone();
                let deg = base.generators()[i].degree;
                if base.diff_of(i).is_zero() && deg >= 1 {
                    let e = random_element(&mut rng, &c, deg - 1);
                    let bump = IntervalElement::t_term(&e, 2).sub(&IntervalElement::t_term(&e, 1));
                    u = u.add(&iv.d(&bump).unwrap());
                }
                u
            })
            .collect();
        let Ok(h2) = Homotopy::new(base, c, images) else { continue };
        if h2.images() == p.homotopy.images() {
            continue;
        }
        let p2 = ObstructionProblem::new(p.ext.clone(), p.f.clone(), p.g.clone(), p.h.clone(), h2).unwrap();
        assert_eq!(obstruction(&p).unwrap().coordinates, obstruction(&p2).unwrap().coordinates);
        changed += 1;
    }
    assert!(changed > 10);
}

fn line_map(a1: i64, a2: i64, b1: i64, b2: i64) -> DGAMap {
    let w = model("s3x(s4vs4)");
    let img_a = format!("{a1}*y1 + {a2}*y2");
    let img_b = format!("{}*z11 + {}*z12 + {}*z22 + {b1}*x*y1 + {b2}*x*y2", a1 * a1, 2 * a1 * a2, a2 * a2);
    DGAMap::from_strs(s4(), w, &[&img_a, &img_b]).unwrap()
}

#[test]
fn homotopy_along_the_line() {
    let (f0, f1) = (line_map(1, 2, 0, 0), line_map(1, 2, 3, 6));
    let Between::Homotopic(h) = homotopy_between(&f0, &f1).unwrap() else { panic!("expected a homotopy") };
    assert!(is_homotopy(&h, &f0, &f1));
    assert_eq!(restrict(&h, 0).images(), f0.images());
    assert_eq!(restrict(&h, 1).images(), f1.images());
    assert!(matches!(homotopy_between(&f0, &line_map(1, 2, 1, 0)).unwrap(), Between::Obstructed(_)));
}

#[test]
fn w_for_a_single_closed_generator() {
    let w = construct_w(&model("s3xs4"), &model("s3")).unwrap();
    assert_eq!(w.stages.len(), 1);
    assert!(w.stages[0].s_part.is_empty());
    assert_eq!(w.stages[0].h_part, vec![model("s3xs4").parse("x").unwrap()]);
}

#[test]
fn w_for_the_product() {
    let x = model("s3xs4");
    let w = construct_w(&x, &s4()).unwrap();
    let all = w.elements();
    for e in ["y", "x*y", "z"] {
        assert!(w.contains(&x.parse(e).unwrap()).unwrap(), "{e}");
    }
    assert!(all.contains(&x.parse("y").unwrap()));
    assert!(w.stages[1].s_part.contains(&x.parse("z").unwrap()));
}

/// S³×S⁴ with extra generators u:2, w:3, dw = u², so degree 4 has the exact class u².
fn roomy() -> Arc<FreeCDGA> {
    FreeCDGA::build(
        vec![Generator::new("u", 2), Generator::new("x", 3), Generator::new("w", 3), Generator::new("y", 4), Generator::new("z", 7)],
        &[("w", "u^2"), ("z", "y^2")],
        8,
    )
    .unwrap()
}

#[test]
fn into_w_removes_exact_perturbation() {
    let x = roomy();
    let w = construct_w(&x, &s4()).unwrap();
    for k in [1i64, -2, 3] {
        let phi = DGAMap::from_strs(s4(), x.clone(), &[&format!("y + {k}*u^2"), &format!("z + {}*y*w + {}*u^2*w", 2 * k, k * k)]).unwrap();
        assert!(!w.contains(phi.image(0)).unwrap());
        let out = homotope_into_w(&phi, &w, false).unwrap();
        assert_eq!(out.map.image(0), &x.parse("y").unwrap());
        assert!(is_homotopy(&out.homotopy, &phi, &out.map));
        assert_eq!(out.trace.len(), 2);
    }
}

#[test]
fn into_w_fixes_maps_already_in_w() {
    let x = model("s3xs4");
    let w = construct_w(&x, &s4()).unwrap();
    let phi = DGAMap::from_strs(s4(), x.clone(), &["2*y", "4*z + 5*x*y"]).unwrap();
    let out = homotope_into_w(&phi, &w, false).unwrap();
    assert_eq!(out.map.images(), phi.images());
    assert!(out.homotopy.images().iter().zip(phi.images()).all(|(u, e)| *u == IntervalElement::constant(e)));
}

#[test]
fn into_w_over_random_maps() {
    let mut rng = seeded(8);
    let mut pairs: Vec<(Arc<FreeCDGA>, Arc<FreeCDGA>)> = PAIR_IDS.iter().map(|id| {
        let p = builtin_pair(id).unwrap();
        (p.y.algebra, p.x.algebra)
    }).collect();
    pairs.push((s4(), roomy()));
    for (y, x) in pairs {
        let w = construct_w(&x, &y).unwrap();
        let mut done = 0;
        while done < 30 {
            let Some(phi) = random_map(&mut rng, &y, &x) else { continue };
            let out = homotope_into_w(&phi, &w, false).unwrap();
            assert!(out.map.images().iter().all(|e| w.contains(e).unwrap()));
            assert!(is_homotopy(&out.homotopy, &phi, &out.map));
            let again = homotope_into_w(&out.map, &w, false).unwrap();
            assert_eq!(again.map.images(), out.map.images());
            done += 1;
        }
    }
}

#[test]
fn classification_survives_into_w() {
    let mut rng = seeded(12);
    for id in ["s3xs4->s4", "s3x(s4vs4)->s4", "hopf-pair", "s7->s4"] {
        let pair = builtin_pair(id).unwrap();
        let w = construct_w(&pair.x.algebra, &pair.y.algebra).unwrap();
        let mut done = 0;
        while done < 20 {
            let Some(phi) = random_map(&mut rng, &pair.y.algebra, &pair.x.algebra) else { continue };
            let out = homotope_into_w(&phi, &w, false).unwrap();
            let (a, b) = (classify_map(&pair, &phi).unwrap(), classify_map(&pair, &out.map).unwrap());
            assert_eq!(a.canonical, b.canonical);
            done += 1;
        }
    }
    let _ = q(0);
}
