//! Linear solver over the field of rational functions.
//!
//! Uses fraction-free Bareiss elimination on polynomial-cleared rows, so all
//! intermediate entries stay polynomial. Underdetermined systems return the
//! particular solution with every free variable set to zero; inconsistent
//! systems report Unsolvable.


use crate::error::{Error, Result};
use crate::poly::{poly_lcm, Poly};
use crate::ratfunc::RatFunc;

/// Solves matrix * x = rhs. matrix has one inner Vec per row; all rows must
/// share the same length. Free variables are set to zero.
pub fn solve_linear(matrix: &[Vec<RatFunc>], rhs: &[RatFunc]) -> Result<Vec<RatFunc>> {
    let nrows = matrix.len();
    assert_eq!(nrows, rhs.len(), "matrix and rhs row counts differ");
    let ncols = matrix.first().map(|r| r.len()).unwrap_or(0);
    for row in matrix {
        assert_eq!(row.len(), ncols, "ragged matrix");
    }
    if ncols == 0 {
        if matrix.iter().zip(rhs).any(|(_, b)| !b.is_zero()) {
            return Err(Error::Unsolvable);
        }
        return Ok(Vec::new());
    }

    // Clear denominators row by row: each row becomes polynomial entries with
    // the rhs appended as an extra column.
    let mut rows: Vec<Vec<Poly>> = Vec::with_capacity(nrows);
    for (row, b) in matrix.iter().zip(rhs) {
        let mut lcm = Poly::one();
        for e in row.iter().chain(std::iter::once(b)) {
            if !e.den().is_one() {
                lcm = poly_lcm(&lcm, e.den());
            }
        }
        let cleared: Vec<Poly> = row
            .iter()
            .chain(std::iter::once(b))
            .map(|e| e.num().mul(&lcm.exact_div(e.den()).unwrap()))
            .collect();
        rows.push(cleared);
    }

    // Fraction-free forward elimination. pivots[j] = (row, col) in order.
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut prev = Poly::one();
    let mut prow = 0usize;
    for col in 0..ncols {
        if prow >= nrows {
            break;
        }
        let pivot = (prow..nrows)
            .filter(|r| !rows[*r][col].is_zero())
            .min_by_key(|r| {
                let p = &rows[*r][col];
                (p.total_degree(), p.num_terms())
            });
        let Some(pr) = pivot else {
            continue;
        };
        rows.swap(prow, pr);
        for r in prow + 1..nrows {
            for c in col + 1..=ncols {
                let t = rows[prow][col]
                    .mul(&rows[r][c])
                    .sub(&rows[r][col].mul(&rows[prow][c]));
                rows[r][c] = t.exact_div(&prev).expect("Bareiss division is exact");
            }
            rows[r][col] = Poly::zero();
        }
        prev = rows[prow][col].clone();
        pivots.push((prow, col));
        prow += 1;
    }

    // Inconsistency: a zeroed row with nonzero rhs.
    for r in prow..nrows {
        if rows[r][..ncols].iter().all(|e| e.is_zero()) && !rows[r][ncols].is_zero() {
            return Err(Error::Unsolvable);
        }
    }

    // Back substitution; non-pivot columns stay zero.
    let mut x = vec![RatFunc::zero(); ncols];
    for (r, c) in pivots.iter().rev() {
        let mut acc = RatFunc::new(rows[*r][ncols].clone(), Poly::one());
        for j in c + 1..ncols {
            if !rows[*r][j].is_zero() && !x[j].is_zero() {
                acc = acc.sub(&RatFunc::from_poly(rows[*r][j].clone()).mul(&x[j]));
            }
        }
        x[*c] = acc.div(&RatFunc::from_poly(rows[*r][*c].clone()));
    }

    // Rows below the pivot block were checked; rows inside the block with a
    // skipped column may still be inconsistent only if elimination missed
    // them, which cannot happen with column-order pivoting.
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::{K, N};

    fn rf(i: i64) -> RatFunc {
        RatFunc::from_int(i)
    }

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1 -> (2, 1)
        let m = vec![vec![rf(1), rf(1)], vec![rf(1), rf(-1)]];
        let b = vec![rf(3), rf(1)];
        assert_eq!(solve_linear(&m, &b).unwrap(), vec![rf(2), rf(1)]);
    }

    #[test]
    fn underdetermined_sets_free_vars_to_zero() {
        // x + y = n -> (n, 0)
        let m = vec![vec![rf(1), rf(1)]];
        let b = vec![RatFunc::var(N)];
        assert_eq!(solve_linear(&m, &b).unwrap(), vec![RatFunc::var(N), rf(0)]);
    }

    #[test]
    fn inconsistent_is_unsolvable() {
        // x = 1, x = 2
        let m = vec![vec![rf(1)], vec![rf(1)]];
        let b = vec![rf(1), rf(2)];
        assert_eq!(solve_linear(&m, &b), Err(Error::Unsolvable));
    }

    #[test]
    fn rational_function_entries() {
        // (1/k) x = 1/(k+1)  ->  x = k/(k+1)
        let inv_k = RatFunc::one().div(&RatFunc::var(K));
        let rhs = RatFunc::new(Poly::one(), Poly::var(K).add(&Poly::one()));
        let m = vec![vec![inv_k]];
        let b = vec![rhs.clone()];
        let x = solve_linear(&m, &b).unwrap();
        assert_eq!(x[0], RatFunc::var(K).mul(&rhs));
    }

    #[test]
    fn dependent_rows_are_fine() {
        // x + y = 2, 2x + 2y = 4 -> (2, 0)
        let m = vec![vec![rf(1), rf(1)], vec![rf(2), rf(2)]];
        let b = vec![rf(2), rf(4)];
        assert_eq!(solve_linear(&m, &b).unwrap(), vec![rf(2), rf(0)]);
    }

    #[test]
    fn parameter_coefficients() {
        // n x = n^2 -> x = n
        let m = vec![vec![RatFunc::var(N)]];
        let b = vec![RatFunc::var(N).mul(&RatFunc::var(N))];
        assert_eq!(solve_linear(&m, &b).unwrap(), vec![RatFunc::var(N)]);
    }
}
