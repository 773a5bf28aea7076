//! Built-in models, the textual model format, mapping-class schemas and classification of maps.
//!
//! Format, one directive per line (`#` starts a comment):
//!
//! ```text
//! name s4
//! truncate 8
//! gen a 4 1
//! gen b 7 2
//! d b = a^2
//! ```
//!
//! `gen <name> <degree> [weight]`; `d <name> = <polynomial>` with `*`, `^` and `p/q` coefficients.

use std::fmt::Write as _;
use std::ops::Range;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{check_cdga, parse_poly, FreeCDGA, Generator, RawPoly};
use crate::error::{Error, Result};
use crate::linalg::{cohomology, solve_d};
use crate::map::DGAMap;
use crate::obstruction::extension_stages;
use crate::rational::{fmt_q, Q};

pub const DEFAULT_TRUNCATION: u32 = 8;

#[derive(Clone, Debug)]
pub struct NamedModel {
    pub identifier: String,
    pub algebra: Arc<FreeCDGA>,
    pub extension_order: Vec<Range<usize>>,
    pub weights: Option<Vec<u32>>,
    pub note: String,
}

pub fn load_model(text: &str) -> Result<NamedModel> {
    load_model_with(text, None)
}

/// `truncation` overrides the default used when the text has no `truncate` line.
pub fn load_model_with(text: &str, truncation: Option<u32>) -> Result<NamedModel> {
    let mut name = String::from("unnamed");
    let mut trunc = truncation.unwrap_or(DEFAULT_TRUNCATION);
    let mut gens: Vec<Generator> = Vec::new();
    let mut diffs: Vec<(usize, String, usize)> = Vec::new();
    let mut note = String::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
        let line = match raw.find('#') {
            Some(p) => {
                if note.is_empty() && raw.trim_start().starts_with("#:") {
                    note = raw.trim_start()[2..].trim().to_string();
                }
                &raw[..p]
            }
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "name" => {
                if toks.len() != 2 {
                    return Err(err("expected `name <identifier>`"));
                }
                name = toks[1].to_string();
            }
            "truncate" => {
                if toks.len() != 2 {
                    return Err(err("expected `truncate <degree>`"));
                }
                trunc = toks[1].parse().map_err(|_| err("truncation must be a nonnegative integer"))?;
            }
            "gen" => {
                if toks.len() != 3 && toks.len() != 4 {
                    return Err(err("expected `gen <name> <degree> [weight]`"));
                }
                if !toks[1].chars().next().map_or(false, |c| c.is_ascii_alphabetic())
                    || !toks[1].chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    return Err(err("generator names are alphanumeric and start with a letter"));
                }
                let degree: u32 = toks[2].parse().map_err(|_| err("degree must be a nonnegative integer"))?;
                let g = if toks.len() == 4 {
                    let w: u32 = toks[3].parse().map_err(|_| err("weight must be a nonnegative integer"))?;
                    Generator::weighted(toks[1], degree, w)
                } else {
                    Generator::new(toks[1], degree)
                };
                gens.push(g);
            }
            "d" => {
                let rest = line.trim_start()[1..].trim();
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| err("expected `d <name> = <polynomial>`"))?;
                let lhs = lhs.trim();
                let idx = gens.iter().position(|g| g.name == lhs).ok_or_else(|| err(&format!("unknown generator {lhs}")))?;
                if diffs.iter().any(|(i, _, _)| *i == idx) {
                    return Err(err(&format!("second differential for {lhs}")));
                }
                diffs.push((idx, rhs.trim().to_string(), line_no));
            }
            other => return Err(err(&format!("unknown directive {other}"))),
        }
    }
    let names: Vec<String> = gens.iter().map(|g| g.name.clone()).collect();
    let mut raw: Vec<RawPoly> = vec![Vec::new(); gens.len()];
    for (idx, poly, line) in diffs {
        raw[idx] = parse_poly(&names, &poly).map_err(|msg| Error::Parse { line, msg })?;
    }
    let weights = if gens.iter().all(|g| g.weight.is_some()) && !gens.is_empty() {
        Some(gens.iter().map(|g| g.weight.unwrap()).collect())
    } else {
        None
    };
    let algebra = FreeCDGA::from_parts(gens, raw, trunc, false)?;
    let report = check_cdga(&algebra);
    if !report.is_valid() {
        return Err(Error::Validation(report.messages().join("; ")));
    }
    let extension_order = extension_stages(&algebra);
    Ok(NamedModel { identifier: name, algebra, extension_order, weights, note })
}

/// Canonical text; `load_model(print_model(m))` rebuilds the same algebra.
pub fn print_model(m: &NamedModel) -> String {
    let a = &m.algebra;
    let mut s = String::new();
    if !m.note.is_empty() {
        let _ = writeln!(s, "#: {}", m.note);
    }
    let _ = writeln!(s, "name {}", m.identifier);
    let _ = writeln!(s, "truncate {}", a.truncation());
    for g in a.generators() {
        match g.weight {
            Some(w) => {
                let _ = writeln!(s, "gen {} {} {}", g.name, g.degree, w);
            }
            None => {
                let _ = writeln!(s, "gen {} {}", g.name, g.degree);
            }
        }
    }
    for (i, g) in a.generators().iter().enumerate() {
        let dv = a.diff_of(i);
        if !dv.is_zero() {
            let _ = writeln!(s, "d {} = {}", g.name, a.fmt_element(dv));
        }
    }
    s
}

const S2: &str = "#: minimal model of S^2
name s2
truncate 8
gen a 2 1
gen b 3 2
d b = a^2
";

const S3: &str = "#: minimal model of S^3
name s3
truncate 8
gen x 3 1
";

const S4: &str = "#: minimal model of S^4
name s4
truncate 8
gen a 4 1
gen b 7 2
d b = a^2
";

const S7: &str = "#: minimal model of S^7
name s7
truncate 8
gen x 7 1
";

const S3XS4: &str = "#: model of S^3 x S^4 through degree 8
name s3xs4
truncate 8
gen x 3 1
gen y 4 1
gen z 7 2
d z = y^2
";

const S3XS4VS4: &str = "#: model of S^3 x (S^4 v S^4) through degree 8, higher generators omitted
name s3x(s4vs4)
truncate 8
gen x 3 1
gen y1 4 1
gen y2 4 1
gen z11 7 2
gen z12 7 2
gen z22 7 2
d z11 = y1^2
d z12 = y1*y2
d z22 = y2^2
";

pub const MODEL_IDS: [&str; 6] = ["s2", "s3", "s4", "s7", "s3xs4", "s3x(s4vs4)"];
pub const SCHEMA_IDS: [&str; 1] = ["cs2-schema"];
pub const PAIR_IDS: [&str; 5] = ["s3xs4->s4", "s3x(s4vs4)->s4", "hopf-pair", "s7->s4", "s3->s4"];

/// Every addressable identifier with its kind.
pub fn builtin_ids() -> Vec<(&'static str, &'static str)> {
    let mut v: Vec<(&str, &str)> = MODEL_IDS.iter().map(|s| (*s, "model")).collect();
    v.extend(SCHEMA_IDS.iter().map(|s| (*s, "schema")));
    v.extend(PAIR_IDS.iter().map(|s| (*s, "pair")));
    v
}

pub fn model_source(id: &str) -> Result<&'static str> {
    Ok(match id {
        "s2" => S2,
        "s3" => S3,
        "s4" => S4,
        "s7" => S7,
        "s3xs4" => S3XS4,
        "s3x(s4vs4)" => S3XS4VS4,
        _ => return Err(Error::UnknownSchema(id.to_string())),
    })
}

pub fn builtin_model(id: &str) -> Result<NamedModel> {
    load_model(model_source(id)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SchemaKind {
    /// (d, h), h modulo 2|d|.
    DegreeHopf,
    /// (α₁, α₂, β₁, β₂), β moving along the direction (α₁, α₂).
    Density,
    /// (h), no identification.
    Hopf,
    /// (d₁, d₂, h), h modulo 2 gcd(d₁, d₂).
    ConnectedSum,
    /// No invariants.
    Trivial,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantSpec {
    pub name: String,
    pub range: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingClassSchema {
    pub identifier: String,
    pub kind: SchemaKind,
    pub invariants: Vec<InvariantSpec>,
    pub rule: String,
}

fn spec(name: &str, range: &str) -> InvariantSpec {
    InvariantSpec { name: name.into(), range: range.into() }
}

fn reduce_mod(h: &Q, m: &Q) -> Q {
    if m.is_zero() {
        return h.clone();
    }
    h - m * (h / m).floor()
}

fn gcd_q(a: &Q, b: &Q) -> Q {
    // gcd of rationals: gcd of numerators over lcm of denominators
    let l = a.denom().lcm(b.denom());
    let an = (a * Q::from_integer(l.clone())).to_integer();
    let bn = (b * Q::from_integer(l.clone())).to_integer();
    Q::new(an.gcd(&bn), l)
}

impl MappingClassSchema {
    pub fn new(identifier: &str, kind: SchemaKind) -> Self {
        let (invariants, rule) = match kind {
            SchemaKind::DegreeHopf => (vec![spec("d", "Z"), spec("h", "Z")], "h modulo 2|d| (no identification when d = 0)"),
            SchemaKind::Density => (
                vec![spec("alpha1", "Z"), spec("alpha2", "Z"), spec("beta1", "Z"), spec("beta2", "Z")],
                "(beta1, beta2) modulo the line direction (alpha1, alpha2); class m = alpha2*beta1 - alpha1*beta2",
            ),
            SchemaKind::Hopf => (vec![spec("h", "Z")], "no identification"),
            SchemaKind::ConnectedSum => (
                vec![spec("d1", "Z"), spec("d2", "Z"), spec("h", "Z")],
                "h modulo 2 gcd(d1, d2) (no identification when d1 = d2 = 0)",
            ),
            SchemaKind::Trivial => (Vec::new(), "a single class"),
        };
        MappingClassSchema { identifier: identifier.into(), kind, invariants, rule: rule.into() }
    }

    /// Modulus of the last invariant given the others; `None` when it is a free invariant.
    pub fn modulus(&self, inv: &[Q]) -> Option<Q> {
        let two = Q::from_integer(2.into());
        let m = match self.kind {
            SchemaKind::DegreeHopf => inv[0].abs() * two,
            SchemaKind::ConnectedSum => gcd_q(&inv[0], &inv[1]) * two,
            _ => return None,
        };
        if m.is_zero() {
            None
        } else {
            Some(m)
        }
    }

    /// Representative tuple of the class.
    pub fn canonical(&self, inv: &[Q]) -> Vec<Q> {
        match self.kind {
            SchemaKind::DegreeHopf | SchemaKind::ConnectedSum => {
                let mut v = inv.to_vec();
                if let Some(m) = self.modulus(inv) {
                    let last = v.len() - 1;
                    v[last] = reduce_mod(&v[last], &m);
                }
                v
            }
            SchemaKind::Density => {
                if inv[0].is_zero() && inv[1].is_zero() {
                    inv.to_vec()
                } else {
                    vec![inv[0].clone(), inv[1].clone(), &inv[1] * &inv[2] - &inv[0] * &inv[3]]
                }
            }
            _ => inv.to_vec(),
        }
    }

    /// All integral tuples are realized by maps.
    pub fn realizable(&self, inv: &[Q]) -> bool {
        inv.len() == self.invariants.len() && inv.iter().all(|x| x.is_integer())
    }
}

pub fn builtin_schema(id: &str) -> Result<MappingClassSchema> {
    match id {
        "cs2-schema" => Ok(MappingClassSchema::new(id, SchemaKind::ConnectedSum)),
        _ => Err(Error::UnknownSchema(id.to_string())),
    }
}

/// Maps X → Y, represented by DGA maps M_Y → M_X.
#[derive(Clone, Debug)]
pub struct ModelPair {
    pub identifier: String,
    pub y: NamedModel,
    pub x: NamedModel,
    pub schema: MappingClassSchema,
}

pub fn builtin_pair(id: &str) -> Result<ModelPair> {
    let (x, y, kind) = match id {
        "s3xs4->s4" => ("s3xs4", "s4", SchemaKind::DegreeHopf),
        "s3x(s4vs4)->s4" => ("s3x(s4vs4)", "s4", SchemaKind::Density),
        "hopf-pair" => ("s3", "s2", SchemaKind::Hopf),
        "s7->s4" => ("s7", "s4", SchemaKind::Hopf),
        "s3->s4" => ("s3", "s4", SchemaKind::Trivial),
        _ => return Err(Error::UnknownSchema(id.to_string())),
    };
    Ok(ModelPair {
        identifier: id.to_string(),
        y: builtin_model(y)?,
        x: builtin_model(x)?,
        schema: MappingClassSchema::new(id, kind),
    })
}

/// Pair whose models have the given identifiers (target model first, as in X → Y).
pub fn find_pair(x: &str, y: &str) -> Result<ModelPair> {
    for id in PAIR_IDS {
        let p = builtin_pair(id)?;
        if p.x.identifier == x && p.y.identifier == y {
            return Ok(p);
        }
    }
    Err(Error::UnknownSchema(format!("{x}->{y}")))
}

/// Per stage of the source, the cohomology coordinates of φ(v) - solve_d(φ(dv)).
pub fn rational_invariants(phi: &DGAMap) -> Result<Vec<Vec<Q>>> {
    phi.validate()?;
    let src = phi.source();
    let tgt = phi.target();
    let mut out = Vec::new();
    for stage in extension_stages(src) {
        let n = src.generators()[stage.start].degree;
        if n > tgt.truncation() {
            continue;
        }
        let coh = cohomology(tgt, n)?;
        let mut v = Vec::new();
        for g in stage {
            let img_d = phi.apply(src.diff_of(g))?;
            let anti = if img_d.is_zero() { tgt.zero() } else { solve_d(tgt, &img_d)? };
            v.extend(coh.project(&(phi.image(g) - &anti))?);
        }
        out.push(v);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub pair: String,
    pub names: Vec<String>,
    #[serde(serialize_with = "ser_qs")]
    pub values: Vec<Q>,
    #[serde(serialize_with = "ser_qs")]
    pub canonical: Vec<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub modulus: Option<Q>,
}

fn ser_qs<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_q))
}

fn ser_opt_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&fmt_q(x)),
        None => s.serialize_none(),
    }
}

pub fn classify_map(pair: &ModelPair, phi: &DGAMap) -> Result<Classification> {
    if phi.source().id() != pair.y.algebra.id() || phi.target().id() != pair.x.algebra.id() {
        return Err(Error::UnknownSchema(format!("map does not belong to the pair {}", pair.identifier)));
    }
    let values: Vec<Q> = rational_invariants(phi)?.into_iter().flatten().collect();
    if values.len() != pair.schema.invariants.len() {
        return Err(Error::UnknownSchema(pair.identifier.clone()));
    }
    Ok(Classification {
        pair: pair.identifier.clone(),
        names: pair.schema.invariants.iter().map(|i| i.name.clone()).collect(),
        canonical: pair.schema.canonical(&values),
        modulus: pair.schema.modulus(&values),
        values,
    })
}
