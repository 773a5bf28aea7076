//! C-injectivity and C-surjectivity of homomorphisms into normed spaces, the quantitative
//! four lemmas, and the finite-to-one bound through universal coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::polyhedral::{ball_max_count, covering_radius, lifting_constant, op_norm_inf};
use crate::rational::{fmt_q, pow_q, q, Q};
use crate::smith::smith_diagonal;

pub const DEFAULT_WINDOW: i64 = 20;

/// ℤ^free ⊕ ⊕ ℤ/t_i with t₁ | t₂ | …; generators are the free ones followed by the torsion ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FGGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl FGGroup {
    pub fn free(rank: usize) -> Self {
        FGGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.torsion.iter().any(|&t| t < 2) {
            return Err(Error::Validation("torsion factors must be at least 2".into()));
        }
        if self.torsion.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Validation("torsion factors must divide in sequence".into()));
        }
        Ok(())
    }

    pub fn ngens(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }
}

/// h: A → ℚ^dim with the ℓ∞ norm, given on generators.
#[derive(Clone, Debug)]
pub struct NormedHom {
    pub source: FGGroup,
    pub target_dim: usize,
    pub images: Vec<Vec<Q>>,
}

impl NormedHom {
    pub fn new(source: FGGroup, target_dim: usize, images: Vec<Vec<Q>>) -> Result<Self> {
        let h = NormedHom { source, target_dim, images };
        h.validate()?;
        Ok(h)
    }

    /// The free group ℤ^cols mapped by the columns of `m`.
    pub fn from_matrix(m: &QMatrix) -> Self {
        NormedHom { source: FGGroup::free(m.ncols()), target_dim: m.nrows(), images: (0..m.ncols()).map(|j| m.col(j)).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        if self.images.len() != self.source.ngens() {
            return Err(Error::Validation("one image per generator expected".into()));
        }
        if self.images.iter().any(|v| v.len() != self.target_dim) {
            return Err(Error::Validation("image has the wrong dimension".into()));
        }
        if self.images[self.source.free_rank..].iter().any(|v| v.iter().any(|x| !x.is_zero())) {
            return Err(Error::Validation("torsion generators must map to 0".into()));
        }
        Ok(())
    }

    fn free_matrix(&self) -> QMatrix {
        QMatrix::from_cols(self.target_dim, &self.images[..self.source.free_rank])
    }

    /// Largest #h⁻¹(B) over closed 1-balls B; `None` when infinite.
    pub fn injectivity_constant(&self, window: i64) -> Result<Option<u64>> {
        self.validate()?;
        let base = ball_max_count(&self.free_matrix(), window)?;
        Ok(base.map(|c| c * self.source.torsion_order()))
    }

    /// Covering radius of h(A); `None` when h(A) does not span.
    pub fn surjectivity_constant(&self, window: i64) -> Result<Option<Q>> {
        self.validate()?;
        covering_radius(&self.free_matrix(), window)
    }
}

pub fn c_injective(h: &NormedHom, c: &Q) -> Result<bool> {
    Ok(match h.injectivity_constant(DEFAULT_WINDOW)? {
        Some(k) => Q::from_integer(k.into()) <= *c,
        None => false,
    })
}

pub fn c_surjective(h: &NormedHom, c: &Q) -> Result<bool> {
    Ok(match h.surjectivity_constant(DEFAULT_WINDOW)? {
        Some(mu) => mu <= *c,
        None => false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaKind {
    Injective,
    Surjective,
}

/// Injective: (C₁+τ)^{rk m₁} τ^{rk m₂} C₂C₄. Surjective: C₁ + 3τC₃^{rk m₃+1}C₄.
/// `c` holds C₁..C₄; entries not used by the kind are ignored.
pub fn four_lemma_predict(kind: LemmaKind, c: &[Q; 4], tau: &Q, ranks: [u32; 3]) -> Q {
    match kind {
        LemmaKind::Injective => pow_q(&(&c[0] + tau), ranks[0]) * pow_q(tau, ranks[1]) * &c[1] * &c[3],
        LemmaKind::Surjective => &c[0] + q(3) * tau * pow_q(&c[2], ranks[2] + 1) * &c[3],
    }
}

/// Integer matrix stored row-major.
pub type IMatrix = Vec<Vec<i64>>;

fn to_q(m: &IMatrix, rows: usize, cols: usize) -> QMatrix {
    let mut out = QMatrix::zeros(rows, cols);
    for (i, r) in m.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            out.set(i, j, q(*x));
        }
    }
    out
}

/// A₁ → A₂ → A₃ → A₄ over V₁ → V₂ → V₃ → V₄ with verticals φ_i, all groups free.
#[derive(Clone, Debug)]
pub struct QuadDiagram {
    pub ranks: [usize; 4],
    pub f: [IMatrix; 3],
    pub m: [QMatrix; 3],
    pub phi: [QMatrix; 4],
    pub tau: Q,
}

impl QuadDiagram {
    /// Builds the diagram with τ the least lifting constant of m₂.
    pub fn new(ranks: [usize; 4], f: [IMatrix; 3], m: [QMatrix; 3], phi: [QMatrix; 4]) -> Result<Self> {
        let tau = lifting_constant(&m[1]);
        let d = QuadDiagram { ranks, f, m, phi, tau };
        d.validate()?;
        Ok(d)
    }

    fn fq(&self, i: usize) -> QMatrix {
        to_q(&self.f[i], self.ranks[i + 1], self.ranks[i])
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::Validation(s.to_string()));
        for i in 0..3 {
            if self.f[i].len() != self.ranks[i + 1] || self.f[i].iter().any(|r| r.len() != self.ranks[i]) {
                return bad("f has the wrong shape");
            }
        }
        for i in 0..2 {
            // integral exactness: f_{i+1} f_i = 0, ranks add up, and im f_i is saturated
            let a = self.fq(i);
            let b = self.fq(i + 1);
            if !b.mul(&a).is_zero() {
                return bad("top row is not a complex");
            }
            if a.rank() + b.rank() != self.ranks[i + 1] {
                return bad("top row is not exact");
            }
            let big: Vec<Vec<BigInt>> = self.f[i].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            if smith_diagonal(&big).iter().any(|x| !x.is_one()) {
                return bad("image of f is not saturated");
            }
            let (ma, mb) = (&self.m[i], &self.m[i + 1]);
            if !mb.mul(ma).is_zero() || ma.rank() + mb.rank() != mb.ncols() {
                return bad("bottom row is not exact");
            }
        }
        for i in 0..3 {
            if self.phi[i + 1].mul(&self.fq(i)) != self.m[i].mul(&self.phi[i]) {
                return bad("diagram does not commute");
            }
        }
        if op_norm_inf(&self.m[0]) > Q::one() || op_norm_inf(&self.m[2]) > Q::one() {
            return bad("m1 and m3 need operator norm at most 1");
        }
        if self.tau < lifting_constant(&self.m[1]) {
            return bad("tau is below the lifting constant of m2");
        }
        Ok(())
    }

    pub fn m_ranks(&self) -> [u32; 3] {
        [self.m[0].rank() as u32, self.m[1].rank() as u32, self.m[2].rank() as u32]
    }
}

impl QMatrix {
    pub fn is_zero(&self) -> bool {
        (0..self.nrows()).all(|i| self.row(i).iter().all(|x| x.is_zero()))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FourLemmaReport {
    pub kind: LemmaKind,
    /// C₁..C₄ as used in the prediction ("-" where unused).
    pub constants: Vec<String>,
    pub tau: String,
    pub predicted: String,
    pub measured: String,
    /// measured / predicted.
    pub ratio: String,
    pub window: i64,
    pub seed: Option<u64>,
    pub ok: bool,
    /// Prediction with every constant and τ replaced by max(·, 1).
    pub predicted_unit_floor: String,
    pub ok_unit_floor: bool,
}

/// Least constants of the verticals, as they enter the lemma.
fn constants(d: &QuadDiagram, kind: LemmaKind, window: i64) -> Result<Option<[Q; 4]>> {
    let h = |i: usize| NormedHom::from_matrix(&d.phi[i]);
    let inj = |i: usize| -> Result<Option<Q>> { Ok(h(i).injectivity_constant(window)?.map(|c| Q::from_integer(c.into()))) };
    let sur = |i: usize| h(i).surjectivity_constant(window);
    let c = match kind {
        LemmaKind::Injective => [sur(0)?, inj(1)?, Some(Q::zero()), inj(3)?],
        LemmaKind::Surjective => [sur(0)?, Some(Q::zero()), sur(2)?, inj(3)?],
    };
    if c.iter().any(|x| x.is_none()) {
        return Ok(None);
    }
    Ok(Some(c.map(|x| x.unwrap())))
}

pub fn four_lemma_verify(d: &QuadDiagram, kind: LemmaKind, window: i64) -> Result<FourLemmaReport> {
    d.validate()?;
    let used = match kind {
        LemmaKind::Injective => [true, true, false, true],
        LemmaKind::Surjective => [true, false, true, true],
    };
    let Some(c) = constants(d, kind, window)? else {
        return Err(Error::Validation("a hypothesis constant is infinite".into()));
    };
    let predicted = four_lemma_predict(kind, &c, &d.tau, d.m_ranks());
    let floor = |x: &Q| if *x < Q::one() { Q::one() } else { x.clone() };
    let floored = four_lemma_predict(kind, &c.clone().map(|x| floor(&x)), &floor(&d.tau), d.m_ranks());
    let measured = match kind {
        LemmaKind::Injective => NormedHom::from_matrix(&d.phi[2])
            .injectivity_constant(window)?
            .map(|k| Q::from_integer(k.into())),
        LemmaKind::Surjective => NormedHom::from_matrix(&d.phi[1]).surjectivity_constant(window)?,
    };
    let ok_unit_floor = measured.as_ref().is_some_and(|m| *m <= floored);
    let (measured_s, ok, ratio) = match &measured {
        None => ("infinite".to_string(), false, "infinite".to_string()),
        Some(m) => {
            let ratio = if predicted.is_zero() { if m.is_zero() { "0".into() } else { "infinite".into() } } else { fmt_q(&(m / &predicted)) };
            (fmt_q(m), *m <= predicted, ratio)
        }
    };
    Ok(FourLemmaReport {
        kind,
        constants: c.iter().zip(used).map(|(x, u)| if u { fmt_q(x) } else { "-".into() }).collect(),
        tau: fmt_q(&d.tau),
        predicted: fmt_q(&predicted),
        measured: measured_s,
        ratio,
        window,
        seed: None,
        ok,
        predicted_unit_floor: fmt_q(&floored),
        ok_unit_floor,
    })
}

fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> (IMatrix, IMatrix) {
    // product of elementary matrices, with its inverse
    let mut u: IMatrix = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut inv = u.clone();
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            u[0][0] = -1;
            inv[0][0] = -1;
        }
        return (u, inv);
    }
    for _ in 0..rng.gen_range(0..3) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let c = if rng.gen_bool(0.5) { 1 } else { -1 };
        // u ← E u with E = I + c e_ij, inv ← inv E⁻¹
        for k in 0..n {
            u[i][k] += c * u[j][k];
        }
        for row in inv.iter_mut() {
            row[j] -= c * row[i];
        }
    }
    (u, inv)
}

fn imul(a: &IMatrix, b: &IMatrix, inner: usize, cols: usize) -> IMatrix {
    a.iter().map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum()).collect()).collect()
}

fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let rows: Vec<Vec<Q>> = (0..n).map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect()).collect();
        let m = if n == 0 { QMatrix::zeros(0, 0) } else { QMatrix::from_rows(&rows) };
        if m.rank() == n {
            return m;
        }
    }
}

fn scale(m: &QMatrix, c: &Q) -> QMatrix {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.set(i, j, m.get(i, j) * c);
        }
    }
    out
}

/// Random diagram of free groups of rank ≤ 2 with integer entries in [-3, 3]; the verticals
/// are invertible and the bottom row is obtained by transport, then rescaled so that m₁, m₃
/// have operator norm ≤ 1.
pub fn random_diagram<R: Rng>(rng: &mut R) -> QuadDiagram {
    loop {
        let k1 = rng.gen_range(0..=2usize);
        let k2 = rng.gen_range(0..=(2 - k1));
        let k3 = rng.gen_range(0..=(2 - k2));
        let n1 = rng.gen_range(k1..=2);
        let n4 = rng.gen_range(k3..=2);
        let ranks = [n1, k1 + k2, k2 + k3, n4];
        let mut std: [IMatrix; 3] = [
            vec![vec![0; ranks[0]]; ranks[1]],
            vec![vec![0; ranks[1]]; ranks[2]],
            vec![vec![0; ranks[2]]; ranks[3]],
        ];
        for j in 0..k1 {
            std[0][j][j] = 1;
        }
        for i in 0..k2 {
            std[1][i][k1 + i] = 1;
        }
        for i in 0..k3 {
            std[2][i][k2 + i] = 1;
        }
        let us: Vec<(IMatrix, IMatrix)> = ranks.iter().map(|&n| random_unimodular(rng, n)).collect();
        let f: [IMatrix; 3] = std::array::from_fn(|i| {
            let a = imul(&us[i + 1].0, &std[i], ranks[i + 1], ranks[i]);
            imul(&a, &us[i].1, ranks[i], ranks[i])
        });
        if f.iter().any(|m| m.iter().flatten().any(|x| x.abs() > 3)) {
            continue;
        }
        let p: Vec<QMatrix> = ranks.iter().map(|&n| random_invertible(rng, n)).collect();
        let fq: Vec<QMatrix> = (0..3).map(|i| to_q(&f[i], ranks[i + 1], ranks[i])).collect();
        let transport = |i: usize, p: &[QMatrix]| p[i + 1].mul(&fq[i]).mul(&p[i].inverse().unwrap());
        let mut phi = p.clone();
        let s1 = op_norm_inf(&transport(0, &phi));
        if s1 > Q::one() {
            phi[0] = scale(&phi[0], &s1);
        }
        let s4 = op_norm_inf(&transport(2, &phi));
        if s4 > Q::one() {
            phi[3] = scale(&phi[3], &(Q::one() / s4));
        }
        let m: [QMatrix; 3] = std::array::from_fn(|i| transport(i, &phi));
        let phi: [QMatrix; 4] = std::array::from_fn(|i| phi[i].clone());
        return QuadDiagram::new(ranks, f, m, phi).expect("generated diagram is valid");
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzSummary {
    pub kind: LemmaKind,
    pub seed: u64,
    pub runs: usize,
    pub ok: usize,
    pub violations: Vec<FourLemmaReport>,
    pub unit_floor_violations: usize,
    pub inconclusive: usize,
}

pub fn four_lemma_fuzz(kind: LemmaKind, runs: usize, seed: u64, window: i64) -> FuzzSummary {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s = FuzzSummary { kind, seed, runs, ok: 0, violations: Vec::new(), unit_floor_violations: 0, inconclusive: 0 };
    for _ in 0..runs {
        let d = random_diagram(&mut rng);
        match four_lemma_verify(&d, kind, window) {
            Ok(r) if r.ok => s.ok += 1,
            Ok(r) if r.ok_unit_floor => {
                let mut r = r;
                r.seed = Some(seed);
                s.violations.push(r);
            }
            Ok(mut r) => {
                r.seed = Some(seed);
                s.unit_floor_violations += 1;
                s.violations.push(r);
            }
            Err(Error::SearchWindowExceeded(_)) => s.inconclusive += 1,
            Err(e) => panic!("fuzz diagram rejected: {e}"),
        }
    }
    s
}

/// Cellular chain complex: `boundary[k]` is ∂_k: C_k → C_{k-1} as a c_{k-1} × c_k matrix (`boundary[0]` is empty).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellComplex {
    pub cells: Vec<usize>,
    pub boundary: Vec<IMatrix>,
}

impl CellComplex {
    pub fn new(cells: Vec<usize>, boundary: Vec<IMatrix>) -> Result<Self> {
        let c = CellComplex { cells, boundary };
        c.validate()?;
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.boundary.len() != self.cells.len() {
            return Err(Error::Validation("one boundary matrix per degree expected".into()));
        }
        for k in 1..self.cells.len() {
            let b = &self.boundary[k];
            if b.len() != self.cells[k - 1] || b.iter().any(|r| r.len() != self.cells[k]) {
                return Err(Error::Validation(format!("boundary {k} has the wrong shape")));
            }
            if k >= 2 {
                let prod = imul(&self.boundary[k - 1], b, self.cells[k - 1], self.cells[k]);
                if prod.iter().flatten().any(|&x| x != 0) {
                    return Err(Error::Validation(format!("boundary {} ∘ boundary {k} is nonzero", k - 1)));
                }
            }
        }
        Ok(())
    }

    /// Smith diagonal of ∂_k (empty outside 1..=dim).
    fn diag(&self, k: usize) -> Vec<BigInt> {
        if k == 0 || k >= self.cells.len() || self.cells[k] == 0 || self.cells[k - 1] == 0 {
            return Vec::new();
        }
        let big: Vec<Vec<BigInt>> = self.boundary[k].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        smith_diagonal(&big)
    }

    /// (free rank, torsion factors) of H_k.
    pub fn homology(&self, k: usize) -> (usize, Vec<BigInt>) {
        if k >= self.cells.len() {
            return (0, Vec::new());
        }
        let out = self.diag(k).len();
        let inc = self.diag(k + 1);
        let torsion = inc.iter().filter(|t| !t.is_one()).cloned().collect();
        (self.cells[k] - out - inc.len(), torsion)
    }

    pub fn disjoint_union(&self, other: &CellComplex) -> CellComplex {
        let n = self.cells.len().max(other.cells.len());
        let c = |x: &CellComplex, k: usize| x.cells.get(k).copied().unwrap_or(0);
        let cells: Vec<usize> = (0..n).map(|k| c(self, k) + c(other, k)).collect();
        let mut boundary = vec![Vec::new()];
        for k in 1..n {
            let mut m = vec![vec![0i64; cells[k]]; cells[k - 1]];
            for (x, ro, co) in [(self, 0, 0), (other, c(self, k - 1), c(self, k))] {
                if k < x.cells.len() {
                    for (i, r) in x.boundary[k].iter().enumerate() {
                        for (j, &v) in r.iter().enumerate() {
                            m[ro + i][co + j] = v;
                        }
                    }
                }
            }
            boundary.push(m);
        }
        CellComplex { cells, boundary }
    }
}

/// |H^k(X; ℤ/m)| = m^{β_k} ∏_{t | tors H_k} gcd(t, m) ∏_{t | tors H_{k-1}} gcd(t, m).
pub fn cohomology_order(x: &CellComplex, k: usize, m: u64) -> BigInt {
    let m = BigInt::from(m);
    let (beta, tors) = x.homology(k);
    let mut out = num_traits::pow(m.clone(), beta);
    for t in tors {
        out *= t.gcd(&m);
    }
    if k >= 1 {
        for t in x.homology(k - 1).1 {
            out *= t.gcd(&m);
        }
    }
    out
}

/// ∏_{k=1}^{dim X} |H^k(X; π_k)| with π_k = ⊕ ℤ/m given by `coefficients[k]`.
pub fn finite_to_one_bound(x: &CellComplex, coefficients: &[Vec<u64>]) -> Result<BigInt> {
    x.validate()?;
    let mut out = BigInt::one();
    for k in 1..=x.dim() {
        for &m in coefficients.get(k).map(|v| v.as_slice()).unwrap_or(&[]) {
            if m == 0 {
                return Err(Error::Validation("coefficient groups must be finite".into()));
            }
            out *= cohomology_order(x, k, m);
        }
    }
    Ok(out)
}
