//! Smith normal form over ℤ and quotients ℤ^r / (column span).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerLatticeQuotient {
    pub ambient_rank: usize,
    /// Sublattice generators as columns, stored row by row.
    pub generators: Vec<Vec<BigInt>>,
    /// Positive invariant factors d₁ | d₂ | …, one per unit of rank.
    pub invariant_factors: Vec<BigInt>,
    /// r − rank: the number of infinite cyclic summands of the quotient.
    pub free_rank: usize,
}

impl IntegerLatticeQuotient {
    /// `None` when the quotient is infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.invariant_factors.iter().fold(BigInt::one(), |a, b| a * b))
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Nonzero diagonal of the Smith form, normalized positive and dividing in sequence.
pub fn smith_diagonal(rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nr = a.len();
    let nc = if nr == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..nr {
                if a[i][t].is_zero() {
                    continue;
                }
                let qt = a[i][t].div_floor(&a[t][t]);
                for j in t..nc {
                    let v = &a[t][j] * &qt;
                    a[i][j] -= v;
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..nc {
                if a[t][j].is_zero() {
                    continue;
                }
                let qt = a[t][j].div_floor(&a[t][t]);
                for i in t..nr {
                    let v = &a[i][t] * &qt;
                    a[i][j] -= v;
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the rest of the block
                let mut bad = None;
                'outer: for i in t + 1..nr {
                    for j in t + 1..nc {
                        if !(&a[i][j] % &a[t][t]).is_zero() {
                            bad = Some(i);
                            break 'outer;
                        }
                    }
                }
                match bad {
                    None => break,
                    Some(i) => {
                        for j in t..nc {
                            let v = a[i][j].clone();
                            a[t][j] += v;
                        }
                        continue;
                    }
                }
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..nr {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..nc {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            }
            if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Quotient of ℤ^r (r = number of rows) by the span of the columns of `rows`.
pub fn integer_normal_form(rows: &[Vec<BigInt>]) -> IntegerLatticeQuotient {
    let diag = smith_diagonal(rows);
    IntegerLatticeQuotient {
        ambient_rank: rows.len(),
        generators: rows.to_vec(),
        free_rank: rows.len() - diag.len(),
        invariant_factors: diag,
    }
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn two_by_two_diagonal() {
        let q = integer_normal_form(&int_matrix(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(q.invariant_factors, big(&[1, 6]));
        assert_eq!(q.order(), Some(BigInt::from(6)));
    }

    #[test]
    fn identity_quotient_is_trivial() {
        let q = integer_normal_form(&int_matrix(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]));
        assert_eq!(q.invariant_factors, big(&[1, 1, 1]));
        assert_eq!(q.order(), Some(BigInt::one()));
    }

    #[test]
    fn rank_deficit_is_infinite() {
        let q = integer_normal_form(&int_matrix(&[vec![2, 4], vec![1, 2]]));
        assert_eq!(q.free_rank, 1);
        assert_eq!(q.order(), None);
        let z = integer_normal_form(&int_matrix(&[vec![0]]));
        assert_eq!(z.order(), None);
    }

    #[test]
    fn single_entry() {
        for d in 1..20 {
            let q = integer_normal_form(&int_matrix(&[vec![2 * d]]));
            assert_eq!(q.order(), Some(BigInt::from(2 * d)));
        }
    }

    #[test]
    fn factors_divide() {
        let q = integer_normal_form(&int_matrix(&[vec![4, 6, 2], vec![10, -4, 8], vec![2, 2, 14]]));
        for w in q.invariant_factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero());
        }
    }
}
