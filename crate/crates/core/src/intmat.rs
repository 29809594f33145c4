//! Exact integer matrix reductions: Smith normal form with transforms, row
//! Hermite normal form, and integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntMat = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMat {
    m.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &IntMat, b: &IntMat, inner: usize, cols: usize) -> IntMat {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `u · a · v = diag`, with `u`, `v` unimodular.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Nonnegative diagonal, `diag[i] | diag[i+1]`, length `min(rows, cols)`.
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub u: IntMat,
    pub u_inv: IntMat,
    pub v: IntMat,
    pub v_inv: IntMat,
}

/// Smith normal form by row/column reduction. Pivot: smallest nonzero
/// absolute value, ties broken by lowest row, then lowest column.
pub fn smith(a: &IntMat, rows: usize, cols: usize) -> Smith {
    let mut a = a.clone();
    let mut u = identity(rows);
    let mut u_inv = identity(rows);
    let mut v = identity(cols);
    let mut v_inv = identity(cols);
    let mut rank = 0;

    for t in 0..rows.min(cols) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => a[i][j].abs() < a[pi][pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return finish(a, rank, rows, cols, u, u_inv, v, v_inv);
            };
            if pi != t {
                a.swap(pi, t);
                u.swap(pi, t);
                for row in u_inv.iter_mut() {
                    row.swap(pi, t);
                }
            }
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(pj, t);
                }
                for row in v.iter_mut() {
                    row.swap(pj, t);
                }
                v_inv.swap(pj, t);
            }

            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in 0..cols {
                    let d = &q * &a[t][j];
                    a[i][j] -= d;
                }
                for j in 0..rows {
                    let d = &q * &u[t][j];
                    u[i][j] -= d;
                }
                for r in 0..rows {
                    let d = &q * &u_inv[r][i];
                    u_inv[r][t] += d;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in 0..rows {
                    let d = &q * &a[i][t];
                    a[i][j] -= d;
                }
                for i in 0..cols {
                    let d = &q * &v[i][t];
                    v[i][j] -= d;
                }
                for k in 0..cols {
                    let d = &q * &v_inv[j][k];
                    v_inv[t][k] += d;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }

            let offender = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t]))
            });
            if let Some(i) = offender {
                for j in 0..cols {
                    let x = a[i][j].clone();
                    a[t][j] += x;
                }
                for j in 0..rows {
                    let x = u[i][j].clone();
                    u[t][j] += x;
                }
                for r in 0..rows {
                    let x = u_inv[r][t].clone();
                    u_inv[r][i] -= x;
                }
                continue;
            }
            break;
        }
        if a[t][t].is_negative() {
            for j in 0..cols {
                a[t][j] = -&a[t][j];
            }
            for j in 0..rows {
                u[t][j] = -&u[t][j];
            }
            for r in 0..rows {
                u_inv[r][t] = -&u_inv[r][t];
            }
        }
        rank += 1;
    }
    finish(a, rank, rows, cols, u, u_inv, v, v_inv)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    a: IntMat,
    rank: usize,
    rows: usize,
    cols: usize,
    u: IntMat,
    u_inv: IntMat,
    v: IntMat,
    v_inv: IntMat,
) -> Smith {
    let diag = (0..rows.min(cols)).map(|i| a[i][i].clone()).collect();
    Smith {
        diag,
        rank,
        u,
        u_inv,
        v,
        v_inv,
    }
}

/// Basis (as columns, returned as a list of vectors) of `{x ∈ Z^cols : a x = 0}`.
pub fn kernel(a: &IntMat, rows: usize, cols: usize) -> Vec<Vec<BigInt>> {
    let s = smith(a, rows, cols);
    (s.rank..cols)
        .map(|j| (0..cols).map(|i| s.v[i][j].clone()).collect())
        .collect()
}

/// Row Hermite normal form of a full-rank square basis (rows are basis
/// vectors): upper triangular, positive diagonal, entries above the diagonal
/// reduced into `[0, pivot)`. Returns `None` if the rows are dependent.
pub fn hermite_rows(basis: &IntMat) -> Option<IntMat> {
    let n = basis.len();
    let mut a = basis.clone();
    for c in 0..n {
        loop {
            let p = (c..n)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()))?;
            a.swap(p, c);
            let mut done = true;
            for i in c + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[c][c]);
                for j in 0..n {
                    let d = &q * &a[c][j];
                    a[i][j] -= d;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[c][c].is_negative() {
            for j in 0..n {
                a[c][j] = -&a[c][j];
            }
        }
        for r in 0..c {
            let q = a[r][c].div_floor(&a[c][c]);
            if q.is_zero() {
                continue;
            }
            for j in 0..n {
                let d = &q * &a[c][j];
                a[r][j] -= d;
            }
        }
    }
    Some(a)
}

/// Reduces `x` modulo the row lattice of `hnf` so that `0 ≤ x_i < hnf[i][i]`.
/// Returns the reduced vector and the integer coefficients `k` with
/// `x = reduced + Σ k_i · hnf[i]`.
pub fn reduce_mod_hermite(x: &[BigInt], hnf: &IntMat) -> (Vec<BigInt>, Vec<BigInt>) {
    let n = hnf.len();
    let mut r = x.to_vec();
    let mut k = vec![BigInt::zero(); n];
    for i in 0..n {
        let q = r[i].div_floor(&hnf[i][i]);
        if !q.is_zero() {
            for j in 0..n {
                let d = &q * &hnf[i][j];
                r[j] -= d;
            }
        }
        k[i] = q;
    }
    (r, k)
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

pub fn determinant_of_triangular(hnf: &IntMat) -> BigInt {
    (0..hnf.len()).map(|i| hnf[i][i].clone()).product()
}
