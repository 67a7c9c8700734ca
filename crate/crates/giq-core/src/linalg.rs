//! Exact linear algebra over the rationals: reduced row echelon form,
//! rank, kernel bases and determinants. Pivoting is deterministic
//! (leftmost column, then topmost nonzero row) so downstream bases are
//! reproducible byte for byte.

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = Rational::one() / m[r][c].clone();
        for j in c..cols {
            let v = &m[r][j] * &inv;
            m[r][j] = v;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let v = &m[i][j] - &(&m[r][j] * &f);
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut copy = m.clone();
    rref(&mut copy).len()
}

/// Basis of the right kernel, one vector per free column in ascending
/// column order. With RREF pivots normalized to 1, a free column `j`
/// yields the vector with 1 at `j` and minus the pivot-row entries at
/// the pivot columns; when a free column has no support in any pivot
/// row the vector is a plain unit vector.
pub fn kernel_basis(m: &Matrix, ncols: usize) -> Vec<Vec<Rational>> {
    let mut copy: Matrix = m.iter().map(|row| {
        assert_eq!(row.len(), ncols);
        row.clone()
    }).collect();
    let pivots = rref(&mut copy);
    let is_pivot = {
        let mut flags = vec![false; ncols];
        for &c in &pivots {
            flags[c] = true;
        }
        flags
    };
    let mut basis = Vec::new();
    for j in 0..ncols {
        if is_pivot[j] {
            continue;
        }
        let mut v = vec![Rational::zero(); ncols];
        v[j] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -copy[row][j].clone();
        }
        basis.push(v);
    }
    basis
}

/// Determinant by exact Gaussian elimination; panics on nonsquare input.
pub fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "determinant of nonsquare matrix");
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if pr != c {
            a.swap(c, pr);
            det = -det;
        }
        det *= a[c][c].clone();
        let inv = Rational::one() / a[c][c].clone();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let v = &a[i][j] - &(&a[c][j] * &f);
                a[i][j] = v;
            }
        }
    }
    det
}

/// Solve `A x = b` for square nonsingular `A`; `None` if singular.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    assert_eq!(b.len(), n);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            assert_eq!(row.len(), n);
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 1, -1, -1], &[1, -1, 1, -1], &[1, -1, -1, 1]]);
        assert_eq!(rank(&a), 3);
        let k = kernel_basis(&a, 4);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![rat(1), rat(1), rat(1), rat(1)]);
    }

    #[test]
    fn kernel_of_unit_row_is_remaining_columns() {
        let a = m(&[&[1, 0, 0, 0]]);
        let k = kernel_basis(&a, 4);
        assert_eq!(k.len(), 3);
        assert_eq!(k[0], vec![rat(0), rat(1), rat(0), rat(0)]);
        assert_eq!(k[2], vec![rat(0), rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn empty_matrix_kernel_is_identity() {
        let k = kernel_basis(&Vec::new(), 3);
        assert_eq!(k.len(), 3);
        for (i, v) in k.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(*x, if i == j { rat(1) } else { rat(0) });
            }
        }
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&m(&[&[2, 0], &[0, 3]])), rat(6));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), rat(0));
        let tri = m(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]);
        assert_eq!(determinant(&tri), rat(-5));
    }

    #[test]
    fn solve_small_system() {
        let a = m(&[&[2, 1], &[1, -1]]);
        let x = solve(&a, &[rat(5), rat(1)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(1)]);
        assert!(solve(&m(&[&[1, 1], &[2, 2]]), &[rat(0), rat(0)]).is_none());
    }
}
