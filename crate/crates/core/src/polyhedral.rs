//! Exact ℓ∞ geometry for small lattices and subspaces: coset minimization, lifting
//! constants, lattice points in unit balls and covering radii.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::Q;

fn subsets(n: usize, max_size: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1u32 << n)).filter_map(move |mask| {
        if mask.count_ones() as usize > max_size {
            return None;
        }
        Some((0..n).filter(|i| mask & (1 << i) != 0).collect())
    })
}

fn norm_inf(v: &[Q]) -> Q {
    v.iter().map(|x| x.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

/// min over s ∈ span(S) of ‖v + s‖∞.
///
/// Computed on the dual side: the maximum of |cᵀv| / ‖c‖₁ over the circuits c of S^⊥,
/// which are the vertices of S^⊥ ∩ (ℓ¹ unit ball).
pub fn coset_norm_min(v: &[Q], s: &[Vec<Q>]) -> Q {
    let n = v.len();
    if n == 0 {
        return Q::zero();
    }
    let b = QMatrix::from_rows_n(s, n);
    let rank = b.rank();
    if rank == n {
        return Q::zero();
    }
    let mut best = Q::zero();
    for t in subsets(n, rank + 1) {
        let mut sub = QMatrix::zeros(b.nrows(), t.len());
        for i in 0..b.nrows() {
            for (k, &j) in t.iter().enumerate() {
                sub.set(i, k, b.get(i, j).clone());
            }
        }
        let ker = sub.kernel();
        if ker.len() != 1 || ker[0].iter().any(|x| x.is_zero()) {
            continue;
        }
        let c = &ker[0];
        let dot: Q = c.iter().zip(&t).map(|(ci, &j)| ci * &v[j]).sum();
        let l1: Q = c.iter().map(|x| x.abs()).sum();
        let val = dot.abs() / l1;
        if val > best {
            best = val;
        }
    }
    best
}

/// ℓ∞ → ℓ∞ operator norm: the largest absolute row sum.
pub fn op_norm_inf(m: &QMatrix) -> Q {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<Q>())
        .fold(Q::zero(), |a, b| if b > a { b } else { a })
}

/// Vertices of (column space of m) ∩ [-1, 1]^n.
pub fn image_cube_vertices(m: &QMatrix) -> Vec<Vec<Q>> {
    let n = m.nrows();
    let cols: Vec<Vec<Q>> = m.independent_cols().iter().map(|&j| m.col(j)).collect();
    let k = cols.len();
    if k == 0 {
        return vec![vec![Q::zero(); n]];
    }
    let basis = QMatrix::from_cols(n, &cols);
    let mut out: Vec<Vec<Q>> = Vec::new();
    for t in subsets(n, k).filter(|t| t.len() == k) {
        let sq = QMatrix::from_rows(&t.iter().map(|&i| basis.row(i)).collect::<Vec<_>>());
        let Some(inv) = sq.inverse() else { continue };
        for signs in 0u32..(1 << k) {
            let s: Vec<Q> = (0..k).map(|i| if signs & (1 << i) != 0 { -Q::one() } else { Q::one() }).collect();
            let x = inv.mul_vec(&s);
            let v = basis.mul_vec(&x);
            if norm_inf(&v) <= Q::one() && !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Smallest τ with min{‖u‖∞ : m u = v} ≤ τ‖v‖∞ for all v in the image of m.
pub fn lifting_constant(m: &QMatrix) -> Q {
    let ker = m.kernel();
    let mut tau = Q::zero();
    for w in image_cube_vertices(m) {
        if w.iter().all(|x| x.is_zero()) {
            continue;
        }
        let u0 = m.solve(&w).expect("vertex lies in the image");
        let val = coset_norm_min(&u0, &ker);
        if val > tau {
            tau = val;
        }
    }
    tau
}

/// Largest number of points of the lattice spanned by the columns of `m` in a closed ℓ∞ ball
/// of radius 1. `None` when the columns are dependent, so some ball holds infinitely many.
pub fn ball_max_count(m: &QMatrix, window: i64) -> Result<Option<u64>> {
    let r = m.ncols();
    let n = m.nrows();
    if r == 0 {
        return Ok(Some(1));
    }
    if m.rank() < r {
        return Ok(None);
    }
    // left inverse through r independent rows
    let rows = m.transpose().independent_cols();
    let sq = QMatrix::from_rows(&rows.iter().map(|&i| m.row(i)).collect::<Vec<_>>());
    let inv = sq.inverse().expect("independent rows");
    let two = Q::from_integer(2.into());
    let mut bound = vec![0i64; r];
    for (i, b) in bound.iter_mut().enumerate() {
        let s: Q = inv.row(i).iter().map(|x| x.abs()).sum::<Q>() * &two;
        let f = s.floor().to_integer().to_i64().unwrap_or(i64::MAX);
        if f > window {
            return Err(Error::SearchWindowExceeded(window));
        }
        *b = f;
    }
    // P = {x : ‖Mx‖∞ ≤ 2}
    let mut pts: Vec<Vec<Q>> = Vec::new();
    let mut x = bound.iter().map(|b| -b).collect::<Vec<i64>>();
    loop {
        let xv: Vec<Q> = x.iter().map(|&c| Q::from_integer(c.into())).collect();
        let y = m.mul_vec(&xv);
        if norm_inf(&y) <= two {
            pts.push(y);
        }
        let mut i = 0;
        while i < r {
            if x[i] < bound[i] {
                x[i] += 1;
                break;
            }
            x[i] = -bound[i];
            i += 1;
        }
        if i == r {
            break;
        }
    }
    // lower faces: ℓ₀ = 0 (anchor at the origin), ℓ_j among the attained coordinates
    let mut choices: Vec<Vec<Q>> = vec![vec![Q::zero()]];
    for j in 1..n {
        let mut vals: Vec<Q> = pts.iter().map(|p| p[j].clone()).filter(|v| !v.is_positive()).collect();
        vals.sort();
        vals.dedup();
        choices.push(vals);
    }
    let mut best = 0u64;
    let mut idx = vec![0usize; n];
    loop {
        let lo: Vec<&Q> = (0..n).map(|j| &choices[j][idx[j]]).collect();
        let cnt = pts
            .iter()
            .filter(|p| p.iter().enumerate().all(|(j, c)| c >= lo[j] && *c <= lo[j] + &two))
            .count() as u64;
        best = best.max(cnt);
        let mut j = 0;
        while j < n {
            idx[j] += 1;
            if idx[j] < choices[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == n {
            break;
        }
    }
    Ok(Some(best))
}

fn lcm_denominators(m: &QMatrix) -> BigInt {
    let mut l = BigInt::one();
    for i in 0..m.nrows() {
        for x in m.row(i) {
            l = l.lcm(x.denom());
        }
    }
    l
}

/// Lower-triangular basis (positive diagonal) of the lattice spanned by integer columns.
fn hermite_basis(rows: usize, mut cols: Vec<Vec<i128>>) -> Option<Vec<Vec<i128>>> {
    let mut basis = Vec::new();
    for i in 0..rows {
        loop {
            let nz: Vec<usize> = (0..cols.len()).filter(|&j| cols[j][i] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&j| cols[j][i].abs()).unwrap();
            for &j in &nz {
                if j != p {
                    let q = cols[j][i].div_euclid(cols[p][i]);
                    let pc = cols[p].clone();
                    for (a, b) in cols[j].iter_mut().zip(&pc) {
                        *a -= q * b;
                    }
                }
            }
        }
        let p = (0..cols.len()).find(|&j| cols[j][i] != 0)?;
        let mut c = cols.remove(p);
        if c[i] < 0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        basis.push(c);
    }
    Some(basis)
}

fn det_adj(b: &[Vec<i128>]) -> (i128, Vec<Vec<i128>>) {
    // b given as columns; build row-major matrix and compute det/adjugate by cofactors (n ≤ 4)
    let n = b.len();
    let a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| b[j][i]).collect()).collect();
    fn det(a: &[Vec<i128>]) -> i128 {
        let n = a.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return a[0][0];
        }
        let mut s = 0;
        for j in 0..n {
            if a[0][j] == 0 {
                continue;
            }
            let minor: Vec<Vec<i128>> = a[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            s += sign * a[0][j] * det(&minor);
        }
        s
    }
    let d = det(&a);
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = a
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != i).map(|(_, &x)| x).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = sign * det(&minor);
        }
    }
    (d, adj)
}

/// Smallest μ such that every point is within ℓ∞ distance μ of the lattice spanned by the
/// columns of `m`. `None` when the lattice does not span the ambient space.
pub fn covering_radius(m: &QMatrix, window: i64) -> Result<Option<Q>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Some(Q::zero()));
    }
    if n > 4 {
        return Err(Error::DimensionTooLarge(n));
    }
    if m.rank() < n {
        return Ok(None);
    }
    let qd = lcm_denominators(m);
    let to_i = |x: &Q| -> Result<i128> {
        (x * Q::from_integer(qd.clone())).to_integer().to_i128().ok_or(Error::SearchWindowExceeded(window))
    };
    let mut cols = Vec::new();
    for j in 0..m.ncols() {
        cols.push(m.col(j).iter().map(to_i).collect::<Result<Vec<i128>>>()?);
    }
    let h = hermite_basis(n, cols).expect("full rank lattice");
    // cells of the period 2L are indexed by 0 ≤ z_i < 2 h_ii; distances in quarter units of L-scale
    let b4: Vec<Vec<i128>> = h.iter().map(|c| c.iter().map(|x| 4 * x).collect()).collect();
    let (det, adj) = det_adj(&b4);
    let diag: Vec<i128> = (0..n).map(|i| 2 * h[i][i]).collect();
    let cells: i128 = diag.iter().product();
    if cells > 4_000_000 {
        return Err(Error::SearchWindowExceeded(window));
    }
    let adj_row_l1: Vec<i128> = adj.iter().map(|r| r.iter().map(|x| x.abs()).sum()).collect();
    let mut worst: i128 = 0;
    let mut z = vec![0i128; n];
    loop {
        let c: Vec<i128> = z.iter().map(|x| 2 * x + 1).collect();
        let dist = cvp_inf(&b4, det, &adj, &adj_row_l1, &c, window)?;
        worst = worst.max(dist);
        let mut i = 0;
        while i < n {
            z[i] += 1;
            if z[i] < diag[i] {
                break;
            }
            z[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(Some(Q::new(BigInt::from(worst + 1), BigInt::from(4) * qd)))
}

fn cvp_inf(b: &[Vec<i128>], det: i128, adj: &[Vec<i128>], adj_l1: &[i128], c: &[i128], window: i64) -> Result<i128> {
    let n = c.len();
    let eval = |x: &[i128]| -> i128 {
        (0..n).map(|i| (b.iter().zip(x).map(|(col, xi)| col[i] * xi).sum::<i128>() - c[i]).abs()).max().unwrap_or(0)
    };
    // y = B⁻¹c = adj·c / det
    let num: Vec<i128> = adj.iter().map(|r| r.iter().zip(c).map(|(a, b)| a * b).sum()).collect();
    let x0: Vec<i128> = num.iter().map(|v| round_div(*v, det)).collect();
    let mut best = eval(&x0);
    let half: Vec<i128> = adj_l1.iter().map(|s| (best * s).div_euclid(det.abs()) + 1).collect();
    if half.iter().any(|&h| h > window as i128) {
        return Err(Error::SearchWindowExceeded(window));
    }
    let lo: Vec<i128> = (0..n).map(|i| x0[i] - half[i]).collect();
    let mut x = lo.clone();
    loop {
        let v = eval(&x);
        if v < best {
            best = v;
        }
        let mut i = 0;
        while i < n {
            x[i] += 1;
            if x[i] <= x0[i] + half[i] {
                break;
            }
            x[i] = lo[i];
            i += 1;
        }
        if i == n {
            break;
        }
    }
    Ok(best)
}

fn round_div(a: i128, b: i128) -> i128 {
    let (a, b) = if b < 0 { (-a, -b) } else { (a, b) };
    (2 * a + b).div_euclid(2 * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn qv(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn coset_examples() {
        assert_eq!(coset_norm_min(&qv(&[3]), &[]), q(3));
        assert_eq!(coset_norm_min(&qv(&[1, 1]), &[qv(&[1, -1])]), q(1));
        assert_eq!(coset_norm_min(&qv(&[5, -2]), &[qv(&[1, 0]), qv(&[0, 1])]), q(0));
        // min over t of max(|1+t|, |2+t|) is 1/2
        assert_eq!(coset_norm_min(&qv(&[1, 2]), &[qv(&[1, 1])]), qf(1, 2));
    }

    #[test]
    fn lifting_of_scalar() {
        let m = QMatrix::from_rows(&[vec![q(2)]]);
        assert_eq!(lifting_constant(&m), qf(1, 2));
        let p = QMatrix::from_rows(&[vec![q(1), q(1)]]);
        assert_eq!(lifting_constant(&p), qf(1, 2));
        assert_eq!(lifting_constant(&QMatrix::zeros(2, 2)), q(0));
    }

    #[test]
    fn ball_counts() {
        let id = QMatrix::from_rows(&[vec![q(1)]]);
        assert_eq!(ball_max_count(&id, 20).unwrap(), Some(3));
        let two = QMatrix::from_rows(&[vec![q(2)]]);
        assert_eq!(ball_max_count(&two, 20).unwrap(), Some(2));
        let half = QMatrix::from_rows(&[vec![qf(1, 2)]]);
        assert_eq!(ball_max_count(&half, 20).unwrap(), Some(5));
        let id2 = QMatrix::identity(2);
        assert_eq!(ball_max_count(&id2, 20).unwrap(), Some(9));
        let dep = QMatrix::from_rows(&[vec![q(1), q(0)]]);
        assert_eq!(ball_max_count(&dep, 20).unwrap(), None);
    }

    #[test]
    fn covering_examples() {
        let id = QMatrix::from_rows(&[vec![q(1)]]);
        assert_eq!(covering_radius(&id, 20).unwrap(), Some(qf(1, 2)));
        assert_eq!(covering_radius(&QMatrix::identity(2), 20).unwrap(), Some(qf(1, 2)));
        let thin = QMatrix::from_rows(&[vec![q(1)], vec![q(0)]]);
        assert_eq!(covering_radius(&thin, 20).unwrap(), None);
        let three = QMatrix::from_rows(&[vec![qf(3, 2)]]);
        assert_eq!(covering_radius(&three, 20).unwrap(), Some(qf(3, 4)));
        // hexagonal-ish lattice spanned by (2,0), (1,1): points with x+y even
        let hex = QMatrix::from_rows(&[vec![q(2), q(1)], vec![q(0), q(1)]]);
        assert_eq!(covering_radius(&hex, 20).unwrap(), Some(q(1)));
    }
}
