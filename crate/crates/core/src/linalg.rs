//! Dense exact linear algebra over Q and degree-wise cohomology.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::algebra::{Element, FreeCDGA};
use crate::error::{Error, Result};
use crate::map::DGAMap;
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    /// Like `from_rows`, with the column count given so that an empty row list is allowed.
    pub fn from_rows_n(rows: &[Vec<Q>], cols: usize) -> Self {
        if rows.is_empty() {
            return Self::zeros(0, cols);
        }
        let m = Self::from_rows(rows);
        assert_eq!(m.cols, cols, "row length mismatch");
        m
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<Q> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        s += a * x;
                    }
                }
                s
            })
            .collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut r = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = r.get(i, j) + a * b;
                        r.set(i, j, v);
                    }
                }
            }
        }
        r
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut r = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                r.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                r.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        r
    }

    /// Reduced row echelon form; pivots are taken column by column, first nonzero row wins.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rv = m.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &f * rv;
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Kernel basis, one vector per free column, with that free variable set to 1.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for f in 0..self.cols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[f] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, f).clone();
            }
            out.push(v);
        }
        out
    }

    /// Indices of a maximal independent subset of columns (greedy, left to right).
    pub fn independent_cols(&self) -> Vec<usize> {
        self.rref().1
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Self::zeros(0, 0));
        }
        let (r, pivots) = self.hcat(&Self::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        Solver::new(self).solve(b)
    }
}

/// Precomputed elimination for repeated solves of `A x = b`.
#[derive(Clone, Debug)]
pub struct Solver {
    transform: QMatrix,
    pivots: Vec<usize>,
    cols: usize,
}

impl Solver {
    pub fn new(a: &QMatrix) -> Self {
        let (r, pivots_all) = a.hcat(&QMatrix::identity(a.nrows())).rref();
        let pivots: Vec<usize> = pivots_all.into_iter().filter(|&p| p < a.ncols()).collect();
        let mut transform = QMatrix::zeros(a.nrows(), a.nrows());
        for i in 0..a.nrows() {
            for j in 0..a.nrows() {
                transform.set(i, j, r.get(i, a.ncols() + j).clone());
            }
        }
        Solver { transform, pivots, cols: a.ncols() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Particular solution with every free variable zero, or `None` if inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        let y = self.transform.mul_vec(b);
        if y[self.pivots.len()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in self.pivots.iter().enumerate() {
            x[p] = y[i].clone();
        }
        Some(x)
    }
}

/// Cohomology of a cochain complex at one spot, given the incoming and outgoing differentials.
#[derive(Clone, Debug)]
pub struct CohomologyData {
    pub ambient: usize,
    pub reps: Vec<Vec<Q>>,
    pub boundary_basis: Vec<Vec<Q>>,
    projector: QMatrix,
    outgoing: QMatrix,
    incoming: Solver,
}

impl CohomologyData {
    /// `incoming`: C^{n-1} → C^n, `outgoing`: C^n → C^{n+1}.
    pub fn new(incoming: &QMatrix, outgoing: &QMatrix) -> Self {
        let ambient = outgoing.ncols();
        assert_eq!(incoming.nrows(), ambient);
        let bcols = incoming.independent_cols();
        let boundary_basis: Vec<Vec<Q>> = bcols.iter().map(|&j| incoming.col(j)).collect();
        let mut span = boundary_basis.clone();
        let mut reps = Vec::new();
        for z in outgoing.kernel() {
            let mut trial = span.clone();
            trial.push(z.clone());
            if QMatrix::from_cols(ambient, &trial).rank() == trial.len() {
                span = trial;
                reps.push(z);
            }
        }
        // Complete reps + boundaries to a basis with unit vectors and invert.
        let mut full: Vec<Vec<Q>> = reps.clone();
        full.extend(boundary_basis.iter().cloned());
        for i in 0..ambient {
            let mut e = vec![Q::zero(); ambient];
            e[i] = Q::one();
            let mut trial = full.clone();
            trial.push(e);
            if QMatrix::from_cols(ambient, &trial).rank() == trial.len() {
                full = trial;
            }
        }
        let inv = QMatrix::from_cols(ambient, &full).inverse().expect("completed basis is invertible");
        let k = reps.len();
        let mut projector = QMatrix::zeros(k, ambient);
        for i in 0..k {
            for j in 0..ambient {
                projector.set(i, j, inv.get(i, j).clone());
            }
        }
        CohomologyData { ambient, reps, boundary_basis, projector, outgoing: outgoing.clone(), incoming: Solver::new(incoming) }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn is_closed(&self, v: &[Q]) -> bool {
        self.outgoing.mul_vec(v).iter().all(|x| x.is_zero())
    }

    /// Class coordinates of a cocycle.
    pub fn project(&self, v: &[Q]) -> Result<Vec<Q>> {
        if v.len() != self.ambient {
            return Err(Error::Validation("cochain has the wrong length".into()));
        }
        if !self.is_closed(v) {
            return Err(Error::Validation("projecting a non-closed cochain".into()));
        }
        Ok(self.projector.mul_vec(v))
    }

    pub fn rep_combination(&self, coords: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.ambient];
        for (c, r) in coords.iter().zip(&self.reps) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(r) {
                *o += c * x;
            }
        }
        out
    }

    /// Preimage under the incoming differential; free variables zero.
    pub fn primitive(&self, v: &[Q]) -> Option<Vec<Q>> {
        self.incoming.solve(v)
    }
}

/// Matrix of d: A^n → A^{n+1}; no rows when n+1 exceeds the truncation.
pub fn degree_matrix(a: &FreeCDGA, n: u32) -> Result<&QMatrix> {
    let src = a.basis(n)?.len();
    Ok(a.dmats[n as usize].get_or_init(|| {
        if n + 1 > a.truncation() {
            return QMatrix::zeros(0, src);
        }
        let basis = a.basis(n).expect("checked").to_vec();
        let cols: Vec<Vec<Q>> = basis
            .iter()
            .map(|m| a.coords(&a.d_mono(m), n + 1).expect("d raises degree by one"))
            .collect();
        QMatrix::from_cols(a.basis(n + 1).expect("checked").len(), &cols)
    }))
}

fn incoming_matrix(a: &FreeCDGA, n: u32) -> Result<QMatrix> {
    let dim = a.basis(n)?.len();
    if n == 0 {
        return Ok(QMatrix::zeros(dim, 0));
    }
    Ok(degree_matrix(a, n - 1)?.clone())
}

/// Cohomology in degree n ≤ truncation; the top degree is computed in the truncated algebra.
#[derive(Clone, Debug)]
pub struct CohomologySpace {
    pub degree: u32,
    pub representatives: Vec<Element>,
    algebra: Arc<FreeCDGA>,
}

impl CohomologySpace {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    pub fn project(&self, x: &Element) -> Result<Vec<Q>> {
        let v = self.algebra.coords(x, self.degree)?;
        data(&self.algebra, self.degree)?.project(&v)
    }

    pub fn representative(&self, coords: &[Q]) -> Result<Element> {
        let d = data(&self.algebra, self.degree)?;
        self.algebra.from_coords(&d.rep_combination(coords), self.degree)
    }
}

pub(crate) fn data(a: &FreeCDGA, n: u32) -> Result<&CohomologyData> {
    let inc = incoming_matrix(a, n)?;
    let out = degree_matrix(a, n)?;
    Ok(a.coh[n as usize].get_or_init(|| CohomologyData::new(&inc, out)))
}

pub fn cohomology(a: &Arc<FreeCDGA>, n: u32) -> Result<CohomologySpace> {
    let d = data(a, n)?;
    let reps = d.reps.iter().map(|v| a.from_coords(v, n)).collect::<Result<Vec<_>>>()?;
    Ok(CohomologySpace { degree: n, representatives: reps, algebra: a.clone() })
}

/// Some x with dx = b, from the span of the pivot monomials of d.
pub fn solve_d(a: &FreeCDGA, b: &Element) -> Result<Element> {
    if b.algebra() != a.id() {
        return Err(Error::MixedAlgebra);
    }
    if b.is_zero() {
        return Ok(a.zero());
    }
    let n = match a.degree_of(b) {
        crate::algebra::Deg::Exactly(n) => n,
        _ => return Err(Error::Validation("solve_d needs a homogeneous element".into())),
    };
    if n == 0 {
        return Err(Error::NotExact);
    }
    let v = a.coords(b, n)?;
    let x = data(a, n)?.primitive(&v).ok_or(Error::NotExact)?;
    a.from_coords(&x, n - 1)
}

/// Cohomology of the mapping cone C^n = A^n ⊕ B^{n-1}, d(a, b) = (da, φ(a) - db).
#[derive(Clone, Debug)]
pub struct RelativeCohomologySpace {
    pub degree: u32,
    pub representatives: Vec<(Element, Element)>,
    data: CohomologyData,
    phi: DGAMap,
}

impl RelativeCohomologySpace {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    pub fn cochain_coords(&self, a: &Element, b: &Element) -> Result<Vec<Q>> {
        cone_coords(&self.phi, self.degree, a, b)
    }

    pub fn is_cocycle(&self, a: &Element, b: &Element) -> Result<bool> {
        Ok(self.data.is_closed(&self.cochain_coords(a, b)?))
    }

    pub fn project(&self, a: &Element, b: &Element) -> Result<Vec<Q>> {
        self.data.project(&self.cochain_coords(a, b)?)
    }

    /// (x, y) ∈ C^{n-1} with d(x, y) = (a, b), or `None` if the class is nonzero.
    pub fn primitive(&self, a: &Element, b: &Element) -> Result<Option<(Element, Element)>> {
        let v = self.cochain_coords(a, b)?;
        match self.data.primitive(&v) {
            None => Ok(None),
            Some(x) => Ok(Some(split_cone(&self.phi, self.degree - 1, &x)?)),
        }
    }
}

fn dim_or_zero(a: &FreeCDGA, n: i64) -> usize {
    if n < 0 || n > a.truncation() as i64 {
        0
    } else {
        a.basis(n as u32).map(|b| b.len()).unwrap_or(0)
    }
}

fn cone_coords(phi: &DGAMap, n: u32, a: &Element, b: &Element) -> Result<Vec<Q>> {
    let src = phi.source();
    let tgt = phi.target();
    let mut v = if dim_or_zero(src, n as i64) > 0 { src.coords(a, n)? } else { check_zero(a)? };
    let w = if dim_or_zero(tgt, n as i64 - 1) > 0 { tgt.coords(b, n - 1)? } else { check_zero(b)? };
    v.extend(w);
    Ok(v)
}

fn check_zero(x: &Element) -> Result<Vec<Q>> {
    if x.is_zero() {
        Ok(Vec::new())
    } else {
        Err(Error::DegreeOutOfRange { degree: u32::MAX, max: 0 })
    }
}

fn split_cone(phi: &DGAMap, n: u32, v: &[Q]) -> Result<(Element, Element)> {
    let src = phi.source();
    let tgt = phi.target();
    let k = dim_or_zero(src, n as i64);
    let a = if k > 0 { src.from_coords(&v[..k], n)? } else { src.zero() };
    let b = if dim_or_zero(tgt, n as i64 - 1) > 0 { tgt.from_coords(&v[k..], n - 1)? } else { tgt.zero() };
    Ok((a, b))
}

/// Matrix of the cone differential C^n → C^{n+1}.
fn cone_matrix(phi: &DGAMap, n: u32) -> Result<QMatrix> {
    let src = phi.source();
    let tgt = phi.target();
    let (a_n, b_n1) = (dim_or_zero(src, n as i64), dim_or_zero(tgt, n as i64 - 1));
    let (a_n1, b_n) = (dim_or_zero(src, n as i64 + 1), dim_or_zero(tgt, n as i64));
    let mut m = QMatrix::zeros(a_n1 + b_n, a_n + b_n1);
    if a_n > 0 {
        let basis = src.basis(n)?.to_vec();
        for (j, mono) in basis.iter().enumerate() {
            let x = src.monomial(mono.clone(), Q::one());
            if a_n1 > 0 {
                let dx = src.coords(&src.d(&x)?, n + 1)?;
                for (i, c) in dx.into_iter().enumerate() {
                    m.set(i, j, c);
                }
            }
            if b_n > 0 {
                let px = tgt.coords(&phi.apply(&x)?, n)?;
                for (i, c) in px.into_iter().enumerate() {
                    m.set(a_n1 + i, j, c);
                }
            }
        }
    }
    if b_n1 > 0 && b_n > 0 {
        let basis = tgt.basis(n - 1)?.to_vec();
        for (j, mono) in basis.iter().enumerate() {
            let y = tgt.monomial(mono.clone(), Q::one());
            let dy = tgt.coords(&tgt.d(&y)?, n)?;
            for (i, c) in dy.into_iter().enumerate() {
                m.set(a_n1 + i, a_n + j, -c);
            }
        }
    }
    Ok(m)
}

pub fn relative_cohomology(phi: &DGAMap, n: u32) -> Result<RelativeCohomologySpace> {
    let max = phi.source().truncation().max(phi.target().truncation() + 1);
    if n > max {
        return Err(Error::DegreeOutOfRange { degree: n, max });
    }
    let outgoing = cone_matrix(phi, n)?;
    let incoming = if n == 0 { QMatrix::zeros(outgoing.ncols(), 0) } else { cone_matrix(phi, n - 1)? };
    let data = CohomologyData::new(&incoming, &outgoing);
    let reps = data.reps.iter().map(|v| split_cone(phi, n, v)).collect::<Result<Vec<_>>>()?;
    Ok(RelativeCohomologySpace { degree: n, representatives: reps, data, phi: phi.clone() })
}
