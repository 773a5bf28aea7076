//! Free graded-commutative algebras over Q with a differential, truncated above a fixed degree.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CohomologyData, QMatrix};
use crate::rational::{fmt_q, parse_q, sign_q, Q};

pub type AlgebraId = u64;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub weight: Option<u32>,
}

impl Generator {
    pub fn new(name: &str, degree: u32) -> Self {
        Generator { name: name.to_string(), degree, weight: None }
    }

    pub fn weighted(name: &str, degree: u32, weight: u32) -> Self {
        Generator { name: name.to_string(), degree, weight: Some(weight) }
    }
}

/// Sorted (generator index, exponent) pairs. The empty monomial is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn gen(i: usize) -> Self {
        Monomial(vec![(i, 1)])
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.last().map(|f| f.0)
    }
}

/// Sorts a word of generator powers into a monomial, tracking the Koszul sign.
/// Returns `None` when an odd generator appears twice.
pub fn normalize_word(degrees: &[u32], word: &[(usize, u32)]) -> Option<(Monomial, bool)> {
    let mut flat: Vec<usize> = Vec::new();
    for &(g, e) in word {
        if e == 0 {
            continue;
        }
        if degrees[g] % 2 == 1 {
            if e > 1 {
                return None;
            }
            flat.push(g);
        } else {
            for _ in 0..e {
                flat.push(g);
            }
        }
    }
    // Insertion sort; each swap of two odd letters flips the sign.
    let mut neg = false;
    for i in 1..flat.len() {
        let mut j = i;
        while j > 0 && flat[j - 1] > flat[j] {
            if degrees[flat[j - 1]] % 2 == 1 && degrees[flat[j]] % 2 == 1 {
                neg = !neg;
            }
            flat.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut out: Vec<(usize, u32)> = Vec::new();
    for g in flat {
        match out.last_mut() {
            Some((h, e)) if *h == g => {
                if degrees[g] % 2 == 1 {
                    return None;
                }
                *e += 1;
            }
            _ => out.push((g, 1)),
        }
    }
    Some((Monomial(out), neg))
}

#[derive(Clone, Debug)]
pub struct Element {
    alg: AlgebraId,
    terms: BTreeMap<Monomial, Q>,
    overflow: bool,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.terms == other.terms
    }
}

impl Eq for Element {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Deg {
    Any,
    Exactly(u32),
    Mixed,
}

impl Element {
    pub fn zero(alg: AlgebraId) -> Self {
        Element { alg, terms: BTreeMap::new(), overflow: false }
    }

    pub fn algebra(&self) -> AlgebraId {
        self.alg
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sticky flag: some product in the history of this element exceeded the truncation degree.
    pub fn overflow(&self) -> bool {
        self.overflow
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        if self.alg != other.alg {
            return Err(Error::MixedAlgebra);
        }
        let mut r = self.clone();
        r.overflow |= other.overflow;
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn scale(&self, c: &Q) -> Element {
        if c.is_zero() {
            return Element { alg: self.alg, terms: BTreeMap::new(), overflow: self.overflow };
        }
        Element {
            alg: self.alg,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
            overflow: self.overflow,
        }
    }

    pub(crate) fn retag(&self, alg: AlgebraId) -> Element {
        Element { alg, terms: self.terms.clone(), overflow: self.overflow }
    }

    pub(crate) fn with_overflow(mut self, flag: bool) -> Element {
        self.overflow |= flag;
        self
    }

    /// Largest absolute coefficient.
    pub fn norm_inf(&self) -> Q {
        crate::rational::max_abs(self.terms.values())
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs).expect("adding elements of different algebras")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_add(&-rhs).expect("subtracting elements of different algebras")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Q::one())
    }
}

pub(crate) struct DegreeBasis {
    pub basis: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
}

/// Validation findings; empty means the algebra is a valid CDGA.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CdgaReport {
    pub degree_violations: Vec<String>,
    pub ordering_violations: Vec<String>,
    pub d_squared_violations: Vec<String>,
    pub minimality_violations: Vec<String>,
    pub other: Vec<String>,
}

impl CdgaReport {
    pub fn is_valid(&self) -> bool {
        self.degree_violations.is_empty()
            && self.ordering_violations.is_empty()
            && self.d_squared_violations.is_empty()
            && self.minimality_violations.is_empty()
            && self.other.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        let mut v = Vec::new();
        v.extend(self.other.iter().cloned());
        v.extend(self.degree_violations.iter().cloned());
        v.extend(self.ordering_violations.iter().cloned());
        v.extend(self.d_squared_violations.iter().cloned());
        v.extend(self.minimality_violations.iter().cloned());
        v
    }
}

pub struct FreeCDGA {
    id: AlgebraId,
    gens: Vec<Generator>,
    diff: Vec<Element>,
    truncation: u32,
    minimal: bool,
    bases: Vec<OnceLock<DegreeBasis>>,
    pub(crate) dmats: Vec<OnceLock<QMatrix>>,
    pub(crate) coh: Vec<OnceLock<CohomologyData>>,
}

impl fmt::Debug for FreeCDGA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeCDGA")
            .field("generators", &self.gens)
            .field("truncation", &self.truncation)
            .finish()
    }
}

impl PartialEq for FreeCDGA {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

/// A differential given before the algebra exists: (coefficient, word of generator powers).
pub type RawPoly = Vec<(Q, Vec<(usize, u32)>)>;

impl FreeCDGA {
    /// Builds the algebra without validating the CDGA axioms; see [`check_cdga`].
    pub fn from_parts(gens: Vec<Generator>, diffs: Vec<RawPoly>, truncation: u32, minimal: bool) -> Result<Arc<FreeCDGA>> {
        if diffs.len() != gens.len() {
            return Err(Error::InvalidAlgebra("one differential per generator expected".into()));
        }
        let degrees: Vec<u32> = gens.iter().map(|g| g.degree).collect();
        let mut hasher = DefaultHasher::new();
        truncation.hash(&mut hasher);
        minimal.hash(&mut hasher);
        gens.hash(&mut hasher);
        let mut normalized: Vec<BTreeMap<Monomial, Q>> = Vec::new();
        for raw in &diffs {
            let mut terms: BTreeMap<Monomial, Q> = BTreeMap::new();
            for (c, word) in raw {
                if word.iter().any(|&(g, _)| g >= gens.len()) {
                    return Err(Error::InvalidAlgebra("differential references an unknown generator".into()));
                }
                if let Some((m, neg)) = normalize_word(&degrees, word) {
                    let c = if neg { -c.clone() } else { c.clone() };
                    let e = terms.entry(m).or_insert_with(Q::zero);
                    *e += c;
                }
            }
            terms.retain(|_, c| !c.is_zero());
            for (m, c) in &terms {
                m.hash(&mut hasher);
                c.hash(&mut hasher);
            }
            0xffusize.hash(&mut hasher);
            normalized.push(terms);
        }
        let id = hasher.finish();
        let diff = normalized.into_iter().map(|terms| Element { alg: id, terms, overflow: false }).collect();
        let n = truncation as usize + 1;
        Ok(Arc::new(FreeCDGA {
            id,
            gens,
            diff,
            truncation,
            minimal,
            bases: (0..n).map(|_| OnceLock::new()).collect(),
            dmats: (0..n).map(|_| OnceLock::new()).collect(),
            coh: (0..n).map(|_| OnceLock::new()).collect(),
        }))
    }

    /// Builds and validates; differentials are given as polynomial strings in generator names.
    pub fn build(gens: Vec<Generator>, diffs: &[(&str, &str)], truncation: u32) -> Result<Arc<FreeCDGA>> {
        let names: Vec<String> = gens.iter().map(|g| g.name.clone()).collect();
        let mut raw: Vec<RawPoly> = vec![Vec::new(); gens.len()];
        for (name, poly) in diffs {
            let i = names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::InvalidAlgebra(format!("unknown generator {name}")))?;
            raw[i] = parse_poly(&names, poly).map_err(|msg| Error::InvalidAlgebra(msg))?;
        }
        let a = Self::from_parts(gens, raw, truncation, false)?;
        let report = check_cdga(&a);
        if !report.is_valid() {
            return Err(Error::InvalidAlgebra(report.messages().join("; ")));
        }
        Ok(a)
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_minimal_flagged(&self) -> bool {
        self.minimal
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.gens.iter().map(|g| g.degree).collect()
    }

    /// The sub-algebra on the first `m` generators.
    pub fn prefix(&self, m: usize) -> Result<Arc<FreeCDGA>> {
        let gens = self.gens[..m].to_vec();
        let mut raw = Vec::new();
        for e in &self.diff[..m] {
            if e.terms.keys().any(|mono| mono.max_gen().map_or(false, |g| g >= m)) {
                return Err(Error::InvalidAlgebra("prefix is not closed under d".into()));
            }
            raw.push(e.terms.iter().map(|(mono, c)| (c.clone(), mono.0.clone())).collect());
        }
        Self::from_parts(gens, raw, self.truncation, self.minimal)
    }

    /// Same generators and differential, different truncation.
    pub fn with_truncation(&self, truncation: u32) -> Result<Arc<FreeCDGA>> {
        let raw = self.diff.iter().map(|e| e.terms.iter().map(|(mono, c)| (c.clone(), mono.0.clone())).collect()).collect();
        Self::from_parts(self.gens.clone(), raw, truncation, self.minimal)
    }

    pub fn zero(&self) -> Element {
        Element::zero(self.id)
    }

    pub fn one(&self) -> Element {
        self.scalar(Q::one())
    }

    pub fn scalar(&self, c: Q) -> Element {
        self.monomial(Monomial::one(), c)
    }

    pub fn monomial(&self, m: Monomial, c: Q) -> Element {
        let mut e = self.zero();
        e.add_term(m, c);
        e
    }

    pub fn gen(&self, i: usize) -> Element {
        self.monomial(Monomial::gen(i), Q::one())
    }

    pub fn gen_named(&self, name: &str) -> Result<Element> {
        let i = self.gen_index(name).ok_or_else(|| Error::InvalidAlgebra(format!("unknown generator {name}")))?;
        Ok(self.gen(i))
    }

    /// Parses a polynomial in this algebra's generator names.
    pub fn parse(&self, s: &str) -> Result<Element> {
        let names: Vec<String> = self.gens.iter().map(|g| g.name.clone()).collect();
        let raw = parse_poly(&names, s).map_err(|msg| Error::Parse { line: 0, msg })?;
        self.from_raw(&raw)
    }

    pub fn from_raw(&self, raw: &RawPoly) -> Result<Element> {
        let degrees = self.degrees();
        let mut e = self.zero();
        for (c, word) in raw {
            if word.iter().any(|&(g, _)| g >= self.ngens()) {
                return Err(Error::InvalidAlgebra("unknown generator index".into()));
            }
            if let Some((m, neg)) = normalize_word(&degrees, word) {
                if self.mono_degree(&m) > self.truncation {
                    e.overflow = true;
                    continue;
                }
                e.add_term(m, if neg { -c.clone() } else { c.clone() });
            }
        }
        Ok(e)
    }

    pub fn mono_degree(&self, m: &Monomial) -> u32 {
        m.0.iter().map(|&(g, e)| self.gens[g].degree * e).sum()
    }

    pub fn mono_weight(&self, m: &Monomial) -> Option<u32> {
        let mut w = 0;
        for &(g, e) in &m.0 {
            w += self.gens[g].weight? * e;
        }
        Some(w)
    }

    pub fn degree_of(&self, x: &Element) -> Deg {
        let mut d = Deg::Any;
        for m in x.terms.keys() {
            let k = self.mono_degree(m);
            d = match d {
                Deg::Any => Deg::Exactly(k),
                Deg::Exactly(j) if j == k => d,
                _ => return Deg::Mixed,
            };
        }
        d
    }

    fn check(&self, x: &Element) -> Result<()> {
        if x.alg != self.id {
            Err(Error::MixedAlgebra)
        } else {
            Ok(())
        }
    }

    /// Product of two monomials with Koszul sign; `None` if zero.
    pub fn mul_mono(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut neg = false;
        // Every odd factor of `b` moves left past the odd factors of `a` with larger index.
        for &(gb, _) in &b.0 {
            if self.gens[gb].degree % 2 == 0 {
                continue;
            }
            for &(ga, _) in &a.0 {
                if ga > gb && self.gens[ga].degree % 2 == 1 {
                    neg = !neg;
                }
            }
        }
        let mut out: Vec<(usize, u32)> = Vec::with_capacity(a.0.len() + b.0.len());
        let (mut i, mut j) = (0, 0);
        while i < a.0.len() || j < b.0.len() {
            if j == b.0.len() || (i < a.0.len() && a.0[i].0 < b.0[j].0) {
                out.push(a.0[i]);
                i += 1;
            } else if i == a.0.len() || b.0[j].0 < a.0[i].0 {
                out.push(b.0[j]);
                j += 1;
            } else {
                let g = a.0[i].0;
                if self.gens[g].degree % 2 == 1 {
                    return None;
                }
                out.push((g, a.0[i].1 + b.0[j].1));
                i += 1;
                j += 1;
            }
        }
        Some((Monomial(out), neg))
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    pub(crate) fn mul_unchecked(&self, x: &Element, y: &Element) -> Element {
        let mut r = self.zero();
        r.overflow = x.overflow || y.overflow;
        for (ma, ca) in &x.terms {
            let da = self.mono_degree(ma);
            for (mb, cb) in &y.terms {
                if da + self.mono_degree(mb) > self.truncation {
                    r.overflow = true;
                    continue;
                }
                if let Some((m, neg)) = self.mul_mono(ma, mb) {
                    let c = ca * cb;
                    r.add_term(m, if neg { -c } else { c });
                }
            }
        }
        r
    }

    pub fn pow(&self, x: &Element, k: u32) -> Result<Element> {
        self.check(x)?;
        let mut r = self.one();
        for _ in 0..k {
            r = self.mul_unchecked(&r, x);
        }
        Ok(r)
    }

    /// d of a generator, as stored.
    pub fn diff_of(&self, i: usize) -> &Element {
        &self.diff[i]
    }

    pub fn d(&self, x: &Element) -> Result<Element> {
        self.check(x)?;
        Ok(self.d_unchecked(x))
    }

    pub(crate) fn d_unchecked(&self, x: &Element) -> Element {
        let mut r = self.zero();
        r.overflow = x.overflow;
        for (m, c) in &x.terms {
            let dm = self.d_mono(m);
            r.overflow |= dm.overflow;
            for (mm, cc) in dm.terms {
                r.add_term(mm, cc * c);
            }
        }
        r
    }

    /// Left derivation: d(p·r) = dp·r + (-1)^{|p|} p·dr, peeling one generator power at a time.
    pub fn d_mono(&self, m: &Monomial) -> Element {
        if m.0.is_empty() {
            return self.zero();
        }
        let (g, e) = m.0[0];
        let rest = Monomial(m.0[1..].to_vec());
        let gdeg = self.gens[g].degree;
        // d(g^e) = e g^{e-1} dg  (e = 1 when g is odd)
        let lower = if e > 1 { Monomial(vec![(g, e - 1)]) } else { Monomial::one() };
        let dp = self.mul_unchecked(&self.monomial(lower, Q::from_integer(e.into())), &self.diff[g]);
        let rest_el = self.monomial(rest.clone(), Q::one());
        let mut r = self.mul_unchecked(&dp, &rest_el);
        if !rest.is_one() {
            let p = self.monomial(Monomial(vec![(g, e)]), sign_q((gdeg * e) % 2 == 1));
            let dr = self.d_mono(&rest);
            r = &r + &self.mul_unchecked(&p, &dr);
        }
        r
    }

    /// Monomial basis of degree `n` in canonical order.
    pub fn basis(&self, n: u32) -> Result<&[Monomial]> {
        Ok(&self.degree_basis(n)?.basis)
    }

    pub(crate) fn degree_basis(&self, n: u32) -> Result<&DegreeBasis> {
        if n > self.truncation {
            return Err(Error::DegreeOutOfRange { degree: n, max: self.truncation });
        }
        Ok(self.bases[n as usize].get_or_init(|| {
            let mut out = Vec::new();
            let mut cur = Vec::new();
            self.enumerate(0, n, &mut cur, &mut out);
            out.sort();
            let index = out.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
            DegreeBasis { basis: out, index }
        }))
    }

    fn enumerate(&self, g: usize, remaining: u32, cur: &mut Vec<(usize, u32)>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(Monomial(cur.clone()));
            return;
        }
        if g == self.gens.len() {
            return;
        }
        let deg = self.gens[g].degree;
        let cap = if deg % 2 == 1 { 1 } else { remaining / deg };
        for e in 0..=cap.min(remaining / deg) {
            if e > 0 {
                cur.push((g, e));
            }
            self.enumerate(g + 1, remaining - e * deg, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }

    /// Coordinates of a homogeneous element in `basis(n)`.
    pub fn coords(&self, x: &Element, n: u32) -> Result<Vec<Q>> {
        self.check(x)?;
        let b = self.degree_basis(n)?;
        let mut v = vec![Q::zero(); b.basis.len()];
        for (m, c) in &x.terms {
            match b.index.get(m) {
                Some(&i) => v[i] = c.clone(),
                None => {
                    return Err(Error::Validation(format!(
                        "element has a term of degree {} where degree {n} was expected",
                        self.mono_degree(m)
                    )))
                }
            }
        }
        Ok(v)
    }

    pub fn from_coords(&self, v: &[Q], n: u32) -> Result<Element> {
        let b = self.degree_basis(n)?;
        let mut e = self.zero();
        for (m, c) in b.basis.iter().zip(v) {
            e.add_term(m.clone(), c.clone());
        }
        Ok(e)
    }

    /// Re-tags an element of another algebra whose generators form a prefix of this one.
    pub fn embed(&self, x: &Element, from: &FreeCDGA) -> Result<Element> {
        if x.alg != from.id {
            return Err(Error::MixedAlgebra);
        }
        if from.gens.len() > self.gens.len() || from.gens[..] != self.gens[..from.gens.len()] {
            return Err(Error::MixedAlgebra);
        }
        let mut e = x.retag(self.id);
        let over: Vec<Monomial> = e.terms.keys().filter(|m| self.mono_degree(m) > self.truncation).cloned().collect();
        for m in over {
            e.terms.remove(&m);
            e.overflow = true;
        }
        Ok(e)
    }

    /// Inverse of [`FreeCDGA::embed`]: fails if `x` uses generators outside this prefix.
    pub fn restrict_from(&self, x: &Element, from: &FreeCDGA) -> Result<Element> {
        if x.alg != from.id {
            return Err(Error::MixedAlgebra);
        }
        if self.gens.len() > from.gens.len() || self.gens[..] != from.gens[..self.gens.len()] {
            return Err(Error::MixedAlgebra);
        }
        if x.terms.keys().any(|m| m.max_gen().map_or(false, |g| g >= self.gens.len())) {
            return Err(Error::Validation("element uses generators outside the sub-algebra".into()));
        }
        Ok(x.retag(self.id))
    }

    pub fn fmt_mono(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        m.0.iter()
            .map(|&(g, e)| if e == 1 { self.gens[g].name.clone() } else { format!("{}^{}", self.gens[g].name, e) })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Canonical text form, parseable by [`FreeCDGA::parse`].
    pub fn fmt_element(&self, x: &Element) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in x.terms.iter().enumerate() {
            let neg = c < &Q::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&fmt_q(&a));
            } else if a.is_one() {
                s.push_str(&self.fmt_mono(m));
            } else {
                s.push_str(&format!("{}*{}", fmt_q(&a), self.fmt_mono(m)));
            }
        }
        s
    }
}

/// Parses `2*x*y^2 - 1/3*z + 4` against a list of generator names.
pub fn parse_poly(names: &[String], s: &str) -> std::result::Result<RawPoly, String> {
    let toks = tokenize(s)?;
    let mut out: RawPoly = Vec::new();
    let mut i = 0;
    if toks.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut first = true;
    while i < toks.len() {
        let mut sign = Q::one();
        match &toks[i] {
            Tok::Plus if !first => i += 1,
            Tok::Minus => {
                sign = -sign;
                i += 1;
            }
            _ if first => {}
            t => return Err(format!("expected + or -, found {t:?}")),
        }
        // unary signs after the binary one, as in `x + -2*y`
        while let Some(t @ (Tok::Plus | Tok::Minus)) = toks.get(i) {
            if *t == Tok::Minus {
                sign = -sign;
            }
            i += 1;
        }
        first = false;
        let mut coef = Q::one();
        let mut word = Vec::new();
        let mut expect_factor = true;
        while i < toks.len() && expect_factor {
            match &toks[i] {
                Tok::Num(n) => {
                    coef *= n.clone();
                    i += 1;
                }
                Tok::Name(name) => {
                    let g = names.iter().position(|x| x == name).ok_or_else(|| format!("unknown generator {name}"))?;
                    i += 1;
                    let mut e = 1u32;
                    if i < toks.len() && toks[i] == Tok::Caret {
                        match toks.get(i + 1) {
                            Some(Tok::Num(n)) if n.is_integer() && n >= &Q::one() => {
                                e = n.numer().try_into().map_err(|_| "exponent too large".to_string())?;
                                i += 2;
                            }
                            _ => return Err("bad exponent".into()),
                        }
                    }
                    word.push((g, e));
                }
                t => return Err(format!("unexpected {t:?}")),
            }
            if i < toks.len() && toks[i] == Tok::Star {
                i += 1;
            } else {
                expect_factor = false;
            }
        }
        if expect_factor {
            return Err("dangling *".into());
        }
        out.push((sign * coef, word));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
}

fn tokenize(s: &str) -> std::result::Result<Vec<Tok>, String> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '+' {
            out.push(Tok::Plus);
            i += 1;
        } else if c == '-' {
            out.push(Tok::Minus);
            i += 1;
        } else if c == '*' {
            out.push(Tok::Star);
            i += 1;
        } else if c == '^' {
            out.push(Tok::Caret);
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '/') {
                i += 1;
            }
            let lit: String = cs[st..i].iter().collect();
            out.push(Tok::Num(parse_q(&lit).ok_or_else(|| format!("bad number {lit}"))?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Name(cs[st..i].iter().collect()));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

pub fn check_cdga(a: &FreeCDGA) -> CdgaReport {
    let mut rep = CdgaReport::default();
    let mut seen = std::collections::HashSet::new();
    for g in &a.gens {
        if g.degree == 0 {
            rep.other.push(format!("generator {} has degree 0", g.name));
        }
        if g.degree > a.truncation {
            rep.other.push(format!("generator {} lies above the truncation degree", g.name));
        }
        if !seen.insert(g.name.clone()) {
            rep.other.push(format!("duplicate generator name {}", g.name));
        }
    }
    if !rep.other.is_empty() {
        return rep;
    }
    for (i, g) in a.gens.iter().enumerate() {
        let dv = &a.diff[i];
        for m in dv.terms.keys() {
            if a.mono_degree(m) != g.degree + 1 {
                rep.degree_violations.push(format!("d{} has a term of degree {} instead of {}", g.name, a.mono_degree(m), g.degree + 1));
                break;
            }
        }
        if dv.terms.keys().any(|m| m.max_gen().map_or(false, |h| h >= i)) {
            rep.ordering_violations.push(format!("d{} uses a generator not introduced before it", g.name));
        }
        let dd = a.d_unchecked(dv);
        if !dd.is_zero() {
            rep.d_squared_violations.push(format!("d(d{}) = {}", g.name, a.fmt_element(&dd)));
        }
        if a.minimal && dv.terms.keys().any(|m| m.0.len() == 1 && m.0[0].1 == 1) {
            rep.minimality_violations.push(format!("d{} has a linear part", g.name));
        }
    }
    rep
}
