//! Helpers shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use sigfl_core::Matrix;

/// Exact rank of an integer matrix by fraction-free Gaussian elimination
/// over the rationals.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n_cols {
        let Some(pivot) = (rank..n_rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..n_rows {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for c in col..n_cols {
                    let delta = &f * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    Matrix::from_fn(r, c, |i, j| rows[i][j] as f64)
}

/// Integer matrix with entries in `-3..=3`; some rows are replaced by copies,
/// negations or zeros so that rank deficiency is common.
pub fn random_int_matrix<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> Vec<Vec<i64>> {
    let r = rng.random_range(1..=max_dim);
    let c = rng.random_range(1..=max_dim);
    let mut rows: Vec<Vec<i64>> = (0..r)
        .map(|_| (0..c).map(|_| rng.random_range(-3..=3)).collect())
        .collect();
    for i in 1..r {
        match rng.random_range(0..6) {
            0 => rows[i] = rows[rng.random_range(0..i)].clone(),
            1 => rows[i] = rows[rng.random_range(0..i)].iter().map(|x| -x).collect(),
            2 => rows[i] = vec![0; c],
            3 => {
                let (a, b) = (rng.random_range(0..i), rng.random_range(0..i));
                let sum: Vec<i64> = rows[a].iter().zip(&rows[b]).map(|(x, y)| x + y).collect();
                if sum.iter().all(|x| x.abs() <= 3) {
                    rows[i] = sum;
                }
            }
            _ => {}
        }
    }
    rows
}
