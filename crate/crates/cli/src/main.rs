//! Command-line front end over the `cdga` library. Every subcommand prints one JSON document
//! (or its text/CSV rendering) on stdout; errors go to stderr as `{"error", "message"}`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use cdga::growth::{
    ball_count_bound, density_count, gcd_proportion_bounds, growth_count, growth_count_direct, growth_fit, s3xs4_bound_input, torsion_count,
    BallBoundInput, TorsionCount,
};
use cdga::obstruction::extension_stages;
use cdga::quant::{finite_to_one_bound, four_lemma_fuzz, four_lemma_predict, CellComplex, LemmaKind, DEFAULT_WINDOW};
use cdga::rational::{fmt_q, parse_q};
use cdga::repro;
use cdga::zoo::{classify_map, builtin_ids, builtin_model, builtin_pair, find_pair, load_model_with, model_source, print_model, NamedModel, DEFAULT_TRUNCATION};
use cdga::{
    cohomology, construct_w, extend_with_primitive, homotope_into_w, homotopy_between, is_homotopy, obstruction, relative_cohomology,
    solve_primitive, Between, DGAMap, ElementaryExtension, Error, FreeCDGA, IntervalElement, ObstructionProblem, Q,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "cdga", version, about = "Exact computations with free CDGAs, obstruction classes and mapping-class counts")]
struct Cli {
    /// Output rendering.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Model files; their `name` lines make them addressable like built-in identifiers.
    #[arg(long = "model-file", global = true)]
    model_files: Vec<PathBuf>,
    /// Truncation degree for model files without a `truncate` line.
    #[arg(long, env = "CDGA_TRUNCATION", global = true)]
    truncation: Option<u32>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Built-in models, schemas and pairs.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
    /// Dimension and representatives of H^n.
    Cohomology {
        #[arg(long)]
        model: String,
        #[arg(long)]
        degree: u32,
    },
    /// H^n of the cone of φ: source → target.
    Relcohomology {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// Image of each source generator, in order.
        #[arg(long = "image", required = true)]
        images: Vec<String>,
        #[arg(long)]
        degree: u32,
    },
    /// Obstruction class for extending f over the last stage of `model` (absolute problem).
    Obstruct(ExtendArgs),
    /// Extension over the last stage; exit 2 when the class is nonzero.
    Extend(ExtendArgs),
    /// Searches for a homotopy between two maps.
    HomotopyCheck {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long = "start", required = true)]
        start: Vec<String>,
        #[arg(long = "end", required = true)]
        end: Vec<String>,
    },
    /// Homotopes a map into the representative space W.
    IntoW {
        #[arg(long)]
        pair: String,
        #[arg(long = "image", required = true)]
        images: Vec<String>,
        /// Move stage classes into a fixed complement of the loop image first.
        #[arg(long)]
        reduce_loops: bool,
    },
    /// Rational invariants and canonical class of a map.
    Classify {
        #[arg(long)]
        pair: String,
        #[arg(long = "image", required = true)]
        images: Vec<String>,
    },
    /// Counting functions.
    Count {
        #[command(subcommand)]
        what: CountWhat,
    },
    /// R^{Σ dims} ∏ P′_k(R); defaults to the s3xs4 input.
    Ballbound {
        #[arg(long)]
        radius: String,
        /// Comma-separated dimensions, one per factor.
        #[arg(long)]
        dims: Option<String>,
        /// Ascending coefficients of P′_k, one flag per factor, comma-separated.
        #[arg(long = "poly")]
        polys: Vec<String>,
    },
    /// Quantitative four lemmas.
    Fourlemma {
        #[command(subcommand)]
        action: FourLemmaAction,
    },
    /// ∏_k |H^k(X; π_k)| for a cell complex.
    Fto1Bound {
        /// circle, sphere, rp2, torus or klein.
        #[arg(long, conflicts_with = "complex_file")]
        complex: Option<String>,
        /// JSON file {"cells": [...], "boundary": [[[...]]]}.
        #[arg(long)]
        complex_file: Option<PathBuf>,
        /// Coefficients as `k:m1,m2`; repeat per degree.
        #[arg(long = "coeff")]
        coeffs: Vec<String>,
    },
    /// One-shot reproduction of a worked example.
    Repro {
        #[arg(value_enum)]
        example: Example,
    },
}

#[derive(Subcommand)]
enum ModelsAction {
    List,
    Show { id: String },
}

#[derive(clap::Args)]
struct ExtendArgs {
    /// Model whose last extension stage is adjoined.
    #[arg(long)]
    model: String,
    #[arg(long)]
    target: String,
    /// Images of the base generators, in order.
    #[arg(long = "image")]
    images: Vec<String>,
}

#[derive(Subcommand)]
enum CountWhat {
    /// Torsion of the classes over degree d (2|d|, or unbounded at 0).
    Torsion {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// Distinct Hopf parts in the box |β| ≤ R along (α₁, α₂).
    Density {
        #[arg(long, allow_hyphen_values = true)]
        a1: i64,
        #[arg(long, allow_hyphen_values = true)]
        a2: i64,
        #[arg(long)]
        radius: String,
        /// Also count by hashing every point.
        #[arg(long)]
        oracle: bool,
    },
    /// Classes of bounded complexity; `--fit` adds an approximate D² ln D fit.
    Growth {
        #[arg(long = "D")]
        d: u64,
        #[arg(long)]
        oracle: bool,
        /// Comma-separated parameters for the fit.
        #[arg(long)]
        fit: Option<String>,
    },
    /// Proportion of pairs in [1, N]² with gcd k, with its bounds.
    Gcd {
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        k: u64,
    },
}

#[derive(Subcommand)]
enum FourLemmaAction {
    /// Evaluates the predicted constant.
    Predict {
        #[arg(long, value_enum)]
        kind: Kind,
        /// C₁,C₂,C₃,C₄ as rationals.
        #[arg(long)]
        constants: String,
        #[arg(long)]
        tau: String,
        /// rk m₁,rk m₂,rk m₃.
        #[arg(long)]
        ranks: String,
    },
    /// Fuzzes seeded random diagrams against the predicted constant.
    Verify {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 500)]
        runs: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Injective,
    Surjective,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    Example1,
    Example2,
    Example3,
}

/// Failures mapped to exit codes: 1 for bad input, 2 for computations that cannot succeed.
enum Failure {
    Input(String, String),
    Compute(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
        match e {
            Error::NonzeroObstruction
            | Error::NotExact
            | Error::SearchWindowExceeded(_)
            | Error::DimensionTooLarge(_)
            | Error::NotInW(_)
            | Error::TDegreeCap { .. }
            | Error::NotIntegral => Failure::Compute(kind, e.to_string()),
            _ => Failure::Input(kind, e.to_string()),
        }
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input("Validation".into(), msg.into())
}

type Out = Result<(Value, bool), Failure>;

struct Ctx {
    files: Vec<NamedModel>,
    truncation: Option<u32>,
}

impl Ctx {
    fn model(&self, id: &str) -> Result<Arc<FreeCDGA>, Failure> {
        if let Some(m) = self.files.iter().find(|m| m.identifier == id) {
            return Ok(m.algebra.clone());
        }
        let m = builtin_model(id)?;
        match self.truncation {
            Some(t) if t != m.algebra.truncation() => {
                // built-in sources pin their truncation; drop that line so the override applies
                let text: String = model_source(id)?.lines().filter(|l| !l.trim_start().starts_with("truncate")).map(|l| format!("{l}\n")).collect();
                Ok(load_model_with(&text, Some(t))?.algebra)
            }
            _ => Ok(m.algebra),
        }
    }
}

fn rational(s: &str) -> Result<Q, Failure> {
    parse_q(s.trim()).ok_or_else(|| input(format!("not a rational number: {s}")))
}

fn list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Failure> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse().map_err(|_| input(format!("bad list entry: {x}")))).collect()
}

fn map_from(source: Arc<FreeCDGA>, target: Arc<FreeCDGA>, images: &[String]) -> Result<DGAMap, Failure> {
    if images.len() != source.ngens() {
        return Err(input(format!("expected {} images, got {}", source.ngens(), images.len())));
    }
    let refs: Vec<&str> = images.iter().map(|s| s.as_str()).collect();
    Ok(DGAMap::from_strs(source, target, &refs)?)
}

fn images_json(m: &DGAMap) -> Value {
    let (s, t) = (m.source(), m.target());
    Value::Object(s.generators().iter().zip(m.images()).map(|(g, e)| (g.name.clone(), json!(t.fmt_element(e)))).collect())
}

/// Σ bᵢ tⁱ + Σ cⱼ tʲ dt, with zero printed as `0`.
fn interval_str(base: &FreeCDGA, u: &IntervalElement) -> String {
    let poly = u.poly_part().iter().map(|(i, b)| format!("({})*t^{i}", base.fmt_element(b)));
    let dt = u.dt_part().iter().map(|(j, c)| format!("({})*t^{j}*dt", base.fmt_element(c)));
    let terms: Vec<String> = poly.chain(dt).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn qs(v: &[Q]) -> Value {
    json!(v.iter().map(fmt_q).collect::<Vec<_>>())
}

fn models(ctx: &Ctx, action: ModelsAction) -> Out {
    match action {
        ModelsAction::List => {
            let rows: Vec<Value> = builtin_ids().into_iter().map(|(id, kind)| json!({"id": id, "kind": kind})).collect();
            let files: Vec<Value> = ctx.files.iter().map(|m| json!({"id": m.identifier, "kind": "file"})).collect();
            Ok((json!({"models": rows.into_iter().chain(files).collect::<Vec<_>>()}), true))
        }
        ModelsAction::Show { id } => {
            let m = match ctx.files.iter().find(|m| m.identifier == id) {
                Some(m) => m.clone(),
                None => builtin_model(&id)?,
            };
            let a = &m.algebra;
            let gens: Vec<Value> = a
                .generators()
                .iter()
                .enumerate()
                .map(|(i, g)| json!({"name": g.name, "degree": g.degree, "weight": g.weight, "differential": a.fmt_element(a.diff_of(i))}))
                .collect();
            Ok((json!({"identifier": m.identifier, "truncation": a.truncation(), "generators": gens, "note": m.note, "source": print_model(&m)}), true))
        }
    }
}

fn last_stage(total: &Arc<FreeCDGA>) -> Result<ElementaryExtension, Failure> {
    let stage = extension_stages(total).pop().ok_or_else(|| input("model has no generators"))?;
    Ok(ElementaryExtension::new(total, stage.start, stage.end)?)
}

fn obstruct(ctx: &Ctx, args: ExtendArgs, extend: bool) -> Out {
    let total = ctx.model(&args.model)?;
    let target = ctx.model(&args.target)?;
    let ext = last_stage(&total)?;
    let f = map_from(ext.base().clone(), target.clone(), &args.images)?;
    let p = ObstructionProblem::absolute(ext.clone(), f)?;
    let o = obstruction(&p)?;
    let names: Vec<String> = ext.new_generators().map(|i| total.generators()[i].name.clone()).collect();
    if !extend {
        let cochain: Vec<Value> = o.cochain.iter().map(|(b, _)| json!(target.fmt_element(b))).collect();
        return Ok((
            json!({"generators": names, "degree": ext.degree(), "zero": o.is_zero(), "coordinates": o.coordinates.iter().map(|c| qs(c)).collect::<Vec<_>>(), "cochain": cochain}),
            true,
        ));
    }
    let prim = solve_primitive(&o)?;
    let (ft, _) = extend_with_primitive(&p, &prim)?;
    Ok((json!({"generators": names, "map": images_json(&ft), "valid": ft.is_valid()}), true))
}

fn complex_named(name: &str) -> Result<CellComplex, Failure> {
    let (cells, boundary): (Vec<usize>, Vec<Vec<Vec<i64>>>) = match name {
        "circle" => (vec![1, 1], vec![vec![], vec![vec![0]]]),
        "sphere" => (vec![1, 0, 1], vec![vec![], vec![vec![]], vec![]]),
        "rp2" => (vec![1, 1, 1], vec![vec![], vec![vec![0]], vec![vec![2]]]),
        "torus" => (vec![1, 2, 1], vec![vec![], vec![vec![0, 0]], vec![vec![0], vec![0]]]),
        "klein" => (vec![1, 2, 1], vec![vec![], vec![vec![0, 0]], vec![vec![2], vec![0]]]),
        _ => return Err(input(format!("unknown complex {name}"))),
    };
    Ok(CellComplex::new(cells, boundary)?)
}

fn fto1(complex: Option<String>, file: Option<PathBuf>, coeffs: Vec<String>) -> Out {
    let x = match (complex, file) {
        (Some(n), _) => complex_named(&n)?,
        (None, Some(p)) => {
            let text = fs::read_to_string(&p).map_err(|e| input(format!("{}: {e}", p.display())))?;
            let c: CellComplex = serde_json::from_str(&text).map_err(|e| input(format!("complex file: {e}")))?;
            c.validate()?;
            c
        }
        (None, None) => return Err(input("give --complex or --complex-file")),
    };
    let mut per_degree: Vec<Vec<u64>> = vec![Vec::new(); x.dim() + 1];
    for c in &coeffs {
        let (k, ms) = c.split_once(':').ok_or_else(|| input(format!("coefficient entry needs the form k:m1,m2: {c}")))?;
        let k: usize = k.trim().parse().map_err(|_| input(format!("bad degree in {c}")))?;
        if k >= per_degree.len() {
            per_degree.resize(k + 1, Vec::new());
        }
        per_degree[k].extend(list::<u64>(ms)?);
    }
    let bound = finite_to_one_bound(&x, &per_degree)?;
    Ok((json!({"cells": x.cells, "coefficients": per_degree, "bound": bound.to_string()}), true))
}

fn count(what: CountWhat) -> Out {
    match what {
        CountWhat::Torsion { d } => Ok(match torsion_count(d)? {
            TorsionCount::Finite(n) => (json!({"d": d, "count": n, "unbounded": false}), true),
            TorsionCount::Unbounded => (json!({"d": d, "count": null, "unbounded": true}), true),
        }),
        CountWhat::Density { a1, a2, radius, oracle } => {
            let r = rational(&radius)?;
            let c = density_count(a1, a2, &r)?;
            let mut v = json!({"a1": a1, "a2": a2, "radius": fmt_q(&r), "count": c});
            if oracle {
                let ri: i64 = r.floor().to_integer().try_into().map_err(|_| input("radius too large for the oracle"))?;
                let o = repro::density_brute_force(a1, a2, ri);
                v["oracle"] = json!(o);
                return Ok((v, o == c));
            }
            Ok((v, true))
        }
        CountWhat::Growth { d, oracle, fit } => {
            let mut r = growth_count(d)?;
            if oracle {
                r.oracle = Some(growth_count_direct(d));
            }
            let ok = r.oracle.map_or(true, |o| o == r.count);
            let mut v = json!({"D": d, "count": r.count.to_string().parse::<u64>().map(Value::from).unwrap_or(json!(r.count.to_string())),
                "terms": r.terms.iter().map(|t| json!(*t as u64)).collect::<Vec<_>>(), "oracle": r.oracle.map(|o| o as u64)});
            if let Some(f) = fit {
                let fit = growth_fit(&list::<u64>(&f)?)?;
                v["fit"] = json!({
                    "approximate": true,
                    "points": fit.points.iter().map(|p| json!({"D": p.parameter, "count": p.count as u64, "approx_ratio": p.approx_ratio})).collect::<Vec<_>>(),
                    "approx_constant": fit.approx_constant,
                    "approx_max_deviation": fit.approx_max_deviation,
                });
            }
            Ok((v, ok))
        }
        CountWhat::Gcd { n, k } => {
            let r = gcd_proportion_bounds(n, k)?;
            Ok((serde_json::to_value(&r).unwrap(), r.ok))
        }
    }
}

fn fourlemma(action: FourLemmaAction, seed: u64) -> Out {
    let lk = |k: Kind| match k {
        Kind::Injective => LemmaKind::Injective,
        Kind::Surjective => LemmaKind::Surjective,
    };
    match action {
        FourLemmaAction::Predict { kind, constants, tau, ranks } => {
            let c: Vec<Q> = constants.split(',').map(rational).collect::<Result<_, _>>()?;
            let c: [Q; 4] = c.try_into().map_err(|_| input("need four constants"))?;
            let r: [u32; 3] = list::<u32>(&ranks)?.try_into().map_err(|_| input("need three ranks"))?;
            let tau = rational(&tau)?;
            if c.iter().chain([&tau]).any(|x| *x < Q::from_integer(0.into())) {
                return Err(input("constants must be nonnegative"));
            }
            let p = four_lemma_predict(lk(kind), &c, &tau, r);
            Ok((json!({"kind": lk(kind), "predicted": fmt_q(&p)}), true))
        }
        FourLemmaAction::Verify { kind, runs, window } => {
            if window < 1 {
                return Err(input("window must be positive"));
            }
            let s = four_lemma_fuzz(lk(kind), runs, seed, window);
            let ok = s.violations.is_empty();
            let mut v = serde_json::to_value(&s).unwrap();
            v["window"] = json!(window);
            v["all_ok"] = json!(ok);
            Ok((v, ok))
        }
    }
}

fn run(cli: Cli) -> Out {
    let mut files = Vec::new();
    for p in &cli.model_files {
        let text = fs::read_to_string(p).map_err(|e| input(format!("{}: {e}", p.display())))?;
        files.push(load_model_with(&text, cli.truncation)?);
    }
    let ctx = Ctx { files, truncation: cli.truncation.filter(|&t| t != DEFAULT_TRUNCATION) };
    match cli.command {
        Command::Models { action } => models(&ctx, action),
        Command::Cohomology { model, degree } => {
            let a = ctx.model(&model)?;
            let h = cohomology(&a, degree)?;
            let reps: Vec<String> = (0..h.dimension())
                .map(|i| {
                    let e: Vec<Q> = (0..h.dimension()).map(|j| Q::from_integer(((i == j) as i64).into())).collect();
                    h.representative(&e).map(|x| a.fmt_element(&x))
                })
                .collect::<Result<_, _>>()?;
            Ok((json!({"model": model, "degree": degree, "dimension": h.dimension(), "representatives": reps}), true))
        }
        Command::Relcohomology { source, target, images, degree } => {
            let phi = map_from(ctx.model(&source)?, ctx.model(&target)?, &images)?;
            let h = relative_cohomology(&phi, degree)?;
            let reps: Vec<Value> = h.representatives.iter().map(|(a, b)| json!([phi.source().fmt_element(a), phi.target().fmt_element(b)])).collect();
            Ok((json!({"degree": degree, "dimension": h.dimension(), "representatives": reps}), true))
        }
        Command::Obstruct(args) => obstruct(&ctx, args, false),
        Command::Extend(args) => obstruct(&ctx, args, true),
        Command::HomotopyCheck { source, target, start, end } => {
            let (s, t) = (ctx.model(&source)?, ctx.model(&target)?);
            let f0 = map_from(s.clone(), t.clone(), &start)?;
            let f1 = map_from(s, t.clone(), &end)?;
            Ok(match homotopy_between(&f0, &f1)? {
                Between::Homotopic(h) if !is_homotopy(&h, &f0, &f1) => {
                    return Err(Failure::Compute("InvalidHomotopy".into(), "search returned a map that is not a homotopy".into()))
                }
                Between::Homotopic(h) => {
                    let imgs: Vec<String> = h.images().iter().map(|u| interval_str(&t, u)).collect();
                    (json!({"homotopic": true, "homotopy": imgs}), true)
                }
                Between::Obstructed(o) => (json!({"homotopic": false, "obstruction": o}), true),
            })
        }
        Command::IntoW { pair, images, reduce_loops } => {
            let p = pair_or_file(&ctx, &pair)?;
            let phi = map_from(p.0, p.1.clone(), &images)?;
            let w = construct_w(&p.1, phi.source())?;
            let out = homotope_into_w(&phi, &w, reduce_loops)?;
            Ok((json!({"map": images_json(&out.map), "trace": out.trace}), true))
        }
        Command::Classify { pair, images } => {
            let p = builtin_pair(&pair)?;
            let phi = map_from(p.y.algebra.clone(), p.x.algebra.clone(), &images)?;
            Ok((serde_json::to_value(classify_map(&p, &phi)?).unwrap(), true))
        }
        Command::Count { what } => count(what),
        Command::Ballbound { radius, dims, polys } => {
            let r = rational(&radius)?;
            let input_ = match dims {
                None => s3xs4_bound_input(r),
                Some(d) => BallBoundInput {
                    dims: list(&d)?,
                    polys: polys.iter().map(|p| p.split(',').map(rational).collect::<Result<Vec<_>, _>>()).collect::<Result<_, _>>()?,
                    radius: r,
                },
            };
            if input_.dims.len() != input_.polys.len() {
                return Err(input("one --poly per dimension expected"));
            }
            let b = ball_count_bound(&input_)?;
            Ok((json!({"radius": fmt_q(&input_.radius), "dims": input_.dims, "bound": fmt_q(&b)}), true))
        }
        Command::Fourlemma { action } => fourlemma(action, cli.seed),
        Command::Fto1Bound { complex, complex_file, coeffs } => fto1(complex, complex_file, coeffs),
        Command::Repro { example } => {
            let n = match example {
                Example::Example1 => 1,
                Example::Example2 => 2,
                Example::Example3 => 3,
            };
            let r = repro::example(n)?;
            Ok((serde_json::to_value(&r).unwrap(), r.pass))
        }
    }
}

/// (Y, X) for a built-in pair identifier or `x->y` over any addressable models.
fn pair_or_file(ctx: &Ctx, id: &str) -> Result<(Arc<FreeCDGA>, Arc<FreeCDGA>), Failure> {
    if let Ok(p) = builtin_pair(id) {
        return Ok((p.y.algebra, p.x.algebra));
    }
    let (x, y) = id.split_once("->").ok_or_else(|| input(format!("unknown pair {id}")))?;
    if let Ok(p) = find_pair(x, y) {
        return Ok((p.y.algebra, p.x.algebra));
    }
    Ok((ctx.model(y)?, ctx.model(x)?))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Flattens nested values into dotted keys.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        Value::Array(a) => out.push((prefix.to_string(), a.iter().map(scalar).collect::<Vec<_>>().join("; "))),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).unwrap() + "\n",
        Format::Text => {
            let mut rows = Vec::new();
            flatten("", v, &mut rows);
            rows.iter().map(|(k, x)| format!("{k}: {x}\n")).collect()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            // a top-level array of records becomes a table; anything else becomes key,value rows
            let table = v.as_object().and_then(|m| m.values().find_map(|x| x.as_array().filter(|a| !a.is_empty() && a.iter().all(|r| r.is_object()))));
            match table {
                Some(records) => {
                    let mut header = Vec::new();
                    flatten("", &records[0], &mut header);
                    w.write_record(header.iter().map(|(k, _)| k)).unwrap();
                    for r in records {
                        let mut row = Vec::new();
                        flatten("", r, &mut row);
                        w.write_record(row.iter().map(|(_, x)| x)).unwrap();
                    }
                }
                None => {
                    let mut rows = Vec::new();
                    flatten("", v, &mut rows);
                    w.write_record(["key", "value"]).unwrap();
                    for (k, x) in rows {
                        w.write_record([k, x]).unwrap();
                    }
                }
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (format, output) = (cli.format, cli.output.clone());
    match run(cli) {
        Ok((v, ok)) => {
            let text = render(&v, format);
            match output {
                Some(p) => {
                    if let Err(e) = fs::write(&p, text) {
                        eprintln!("{}", json!({"error": "Io", "message": format!("{}: {e}", p.display())}));
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            // checks that ran but failed are computation outcomes, not input errors
            ExitCode::from(if ok { 0 } else { 2 })
        }
        Err(Failure::Input(kind, msg)) => {
            eprintln!("{}", json!({"error": kind, "message": msg}));
            ExitCode::from(1)
        }
        Err(Failure::Compute(kind, msg)) => {
            eprintln!("{}", json!({"error": kind, "message": msg}));
            ExitCode::from(2)
        }
    }
}
