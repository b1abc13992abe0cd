//! Dense exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Brings `rows` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row.
pub fn rref(rows: &mut Vec<Vec<Rational>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.retain(|row| row.iter().any(|v| !v.is_zero()));
    pivots
}

/// Unique solution of the square system `a·x = b`, or `None` if `a` is singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = b.len();
    for (row, rhs) in a.iter_mut().zip(b) {
        row.push(rhs.clone());
    }
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c][c..].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *v -= &factor * p;
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn rref_reports_rank_and_drops_dependent_rows() {
        let mut m = vec![
            vec![int(1), int(2), int(3)],
            vec![int(2), int(4), int(6)],
            vec![int(0), int(1), int(1)],
        ];
        let pivots = rref(&mut m, 3);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], vec![int(1), int(0), int(1)]);
        assert_eq!(m[1], vec![int(0), int(1), int(1)]);
    }

    #[test]
    fn solves_and_detects_singularity() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let x = solve_square(a, &[int(1), int(2)]).unwrap();
        assert_eq!(x, vec![ratio(1, 5), ratio(3, 5)]);
        let s = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(solve_square(s, &[int(1), int(2)]).is_none());
    }
}
