//! Small exact linear algebra helpers shared across the crate: Gaussian
//! elimination over the rationals, Smith normal form over the integers, and
//! Laplace-expansion determinants used as independent oracles.

// Index-style loops read better than iterator chains in this matrix code.
#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rat::Rat;

/// Rank of a rational matrix (rows of equal length; empty matrix has rank 0).
pub fn rat_rank(mat: &[Vec<Rat>]) -> usize {
    let mut m: Vec<Vec<Rat>> = mat.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pivot);
        let inv = m[row][col].recip();
        for c in col..cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let v = &m[r][c] - &(&factor * &m[row][c]);
                    m[r][c] = v;
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Solve `A x = b` when the solution is unique (full column rank and
/// consistent). Returns `None` if inconsistent or underdetermined.
pub fn rat_solve_unique(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    assert_eq!(rows, b.len(), "shape mismatch");
    // Augmented reduction.
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in col..=cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    let v = &m[r][c] - &(&factor * &m[row][c]);
                    m[r][c] = v;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    // Inconsistent if a zero row has nonzero rhs.
    for r in row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    if pivot_cols.len() != cols {
        return None; // underdetermined
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

/// Basis of the right kernel of a rational matrix.
pub fn rat_kernel(mat: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rat>> = mat.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for c in col..cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..cols {
                    let v = &m[r][c] - &(&factor * &m[row][c]);
                    m[r][c] = v;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -&m[r][free];
        }
        basis.push(v);
    }
    basis
}

/// Diagonal of the Smith normal form, as nonnegative integers with the
/// divisibility chain `d_1 | d_2 | ...`. Trailing zeros indicate rank
/// deficiency.
pub fn smith_normal_form(mat: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    let n = rows.min(cols);
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let mut diag = Vec::with_capacity(n);
    let mut top = 0;
    while top < n {
        // Find the entry of smallest nonzero absolute value in the
        // remaining submatrix.
        let mut best: Option<(usize, usize)> = None;
        for r in top..rows {
            for c in top..cols {
                if !m[r][c].is_zero() && best.is_none_or(|(br, bc)| m[r][c].abs() < m[br][bc].abs())
                {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else {
            break; // rest of the matrix is zero
        };
        m.swap(top, br);
        for row in m.iter_mut() {
            row.swap(top, bc);
        }
        // Reduce the pivot row and column.
        let mut dirty = true;
        while dirty {
            dirty = false;
            for r in top + 1..rows {
                if !m[r][top].is_zero() {
                    let q = div_round(&m[r][top], &m[top][top]);
                    if !q.is_zero() {
                        for c in top..cols {
                            let sub = &q * &m[top][c];
                            m[r][c] -= sub;
                        }
                    }
                    if !m[r][top].is_zero() {
                        m.swap(top, r);
                        dirty = true;
                    }
                }
            }
            for c in top + 1..cols {
                if !m[top][c].is_zero() {
                    let q = div_round(&m[top][c], &m[top][top]);
                    if !q.is_zero() {
                        for r in top..rows {
                            let sub = &q * &m[r][top];
                            m[r][c] -= sub;
                        }
                    }
                    if !m[top][c].is_zero() {
                        for row in m.iter_mut() {
                            row.swap(top, c);
                        }
                        dirty = true;
                    }
                }
            }
        }
        // Enforce divisibility: the pivot must divide every remaining entry.
        let mut offender = None;
        'scan: for r in top + 1..rows {
            for c in top + 1..cols {
                if !(&m[r][c] % &m[top][top]).is_zero() {
                    offender = Some(r);
                    break 'scan;
                }
            }
        }
        if let Some(r) = offender {
            let row: Vec<BigInt> = m[r][top..cols].to_vec();
            for (offset, v) in row.into_iter().enumerate() {
                m[top][top + offset] += v;
            }
            continue; // redo this pivot
        }
        diag.push(m[top][top].abs());
        top += 1;
    }
    while diag.len() < n {
        diag.push(BigInt::zero());
    }
    diag
}

// Quotient rounded to nearest, which makes the gcd-style reduction shrink
// remainders fast.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if &r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Determinant by Laplace expansion along the first row. Exponential; only
/// for small oracle matrices.
pub fn det_laplace(mat: &[Vec<BigInt>]) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::from(1);
    }
    assert!(mat.iter().all(|r| r.len() == n), "square matrix required");
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut det = BigInt::zero();
    for (c, entry) in mat[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(cc, _)| cc != c)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = entry * det_laplace(&minor);
        if c % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Matrix rank via nonvanishing minors, using Laplace determinants only.
/// Independent of the elimination-based [`rat_rank`]; oracle use.
pub fn minor_rank(mat: &[Vec<BigInt>]) -> usize {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    for r in (1..=rows.min(cols)).rev() {
        for row_set in subsets_of_size(rows, r) {
            for col_set in subsets_of_size(cols, r) {
                let sub: Vec<Vec<BigInt>> = row_set
                    .iter()
                    .map(|&ri| col_set.iter().map(|&ci| mat[ri][ci].clone()).collect())
                    .collect();
                if !det_laplace(&sub).is_zero() {
                    return r;
                }
            }
        }
    }
    0
}

/// All size-`k` subsets of `0..n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ir(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| Rat::int(v)).collect())
            .collect()
    }

    fn ib(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    #[test]
    fn rank_basic() {
        assert_eq!(rat_rank(&ir(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rat_rank(&ir(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rat_rank(&ir(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(rat_rank(&ir(&[&[1], &[1]])), 1);
    }

    #[test]
    fn solve_unique() {
        let a = ir(&[&[2, 0], &[0, 3]]);
        let b = vec![Rat::int(1), Rat::int(1)];
        let x = rat_solve_unique(&a, &b).unwrap();
        assert_eq!(x, vec![Rat::new(1, 2), Rat::new(1, 3)]);

        // Inconsistent.
        let a = ir(&[&[1, 1], &[1, 1]]);
        let b = vec![Rat::int(1), Rat::int(2)];
        assert!(rat_solve_unique(&a, &b).is_none());

        // Underdetermined.
        let a = ir(&[&[1, 1]]);
        let b = vec![Rat::int(1)];
        assert!(rat_solve_unique(&a, &b).is_none());
    }

    #[test]
    fn kernel_basis() {
        let a = ir(&[&[1, 1, 0], &[0, 0, 1]]);
        let k = rat_kernel(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![-Rat::one(), Rat::one(), Rat::zero()]);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(
            smith_normal_form(&ib(&[&[1, 0], &[1, 2]])),
            vec![BigInt::from(1), BigInt::from(2)]
        );
        assert_eq!(smith_normal_form(&ib(&[&[2, 0]])), vec![BigInt::from(2)]);
        assert_eq!(
            smith_normal_form(&ib(&[&[2, 4], &[6, 8]])),
            vec![BigInt::from(2), BigInt::from(4)]
        );
        // Rank-deficient.
        assert_eq!(
            smith_normal_form(&ib(&[&[1, 2], &[2, 4]])),
            vec![BigInt::from(1), BigInt::from(0)]
        );
    }

    #[test]
    fn snf_divisibility_chain() {
        let m = ib(&[&[4, 6, 2], &[6, 12, 6], &[2, 6, 10]]);
        let d = smith_normal_form(&m);
        for w in d.windows(2) {
            if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "chain broken: {d:?}");
            }
        }
        // Determinant is preserved up to sign.
        let det = det_laplace(&m).abs();
        let prod: BigInt = d.iter().product();
        assert_eq!(prod, det);
    }

    #[test]
    fn minor_rank_agrees_with_elimination() {
        let cases = [
            ib(&[&[1, 0], &[1, 2]]),
            ib(&[&[1, 2], &[2, 4]]),
            ib(&[&[0, 0], &[0, 0]]),
            ib(&[&[1, 1, 1], &[1, 2, 3]]),
            ib(&[&[3]]),
        ];
        for m in &cases {
            let as_rat: Vec<Vec<Rat>> = m
                .iter()
                .map(|r| r.iter().map(|v| Rat::from_bigint(v.clone())).collect())
                .collect();
            assert_eq!(minor_rank(m), rat_rank(&as_rat));
        }
    }

    #[test]
    fn subsets_enumeration() {
        assert_eq!(
            subsets_of_size(3, 2),
            vec![vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        assert_eq!(subsets_of_size(3, 0), vec![Vec::<usize>::new()]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            // Three independent rank routes agree: elimination over Q,
            // nonzero count of the Smith diagonal, and Laplace minors.
            #[test]
            fn rank_routes_agree(
                entries in proptest::collection::vec(-4i64..5, 9),
                rows in 1usize..4,
            ) {
                let cols = 3;
                let m_int: Vec<Vec<BigInt>> = (0..rows)
                    .map(|r| (0..cols).map(|c| BigInt::from(entries[r * cols + c])).collect())
                    .collect();
                let m_rat: Vec<Vec<Rat>> = m_int
                    .iter()
                    .map(|r| r.iter().map(|v| Rat::from_bigint(v.clone())).collect())
                    .collect();
                let by_elimination = rat_rank(&m_rat);
                let by_snf = smith_normal_form(&m_int)
                    .iter()
                    .filter(|d| !d.is_zero())
                    .count();
                let by_minors = minor_rank(&m_int);
                prop_assert_eq!(by_elimination, by_snf);
                prop_assert_eq!(by_elimination, by_minors);
            }
        }
    }
}
