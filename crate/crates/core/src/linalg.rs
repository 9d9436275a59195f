//! Exact linear algebra over the rationals (Gaussian elimination with
//! rational pivots; every step is exact, so ranks and kernels are certified).

use crate::ring::{rat, Rat};
use num_traits::Zero;

pub type Vector = Vec<Rat>;
pub type Matrix = Vec<Vector>;

pub fn zeros(n: usize) -> Vector {
    vec![rat(0); n]
}

/// Reduced row echelon form; returns `(rref, pivot_columns)`.
pub fn rref(mut m: Matrix) -> (Matrix, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = rat(1) / m[row][col].clone();
        for c in col..cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in col..cols {
                    let v = &m[i][c] - &f * &m[row][c];
                    m[i][c] = v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    (m, pivots)
}

pub fn rank(m: Matrix) -> usize {
    rref(m).1.len()
}

/// Basis for the null space of `m` (vectors of length `cols`).
pub fn kernel_basis(m: Matrix, cols: usize) -> Vec<Vector> {
    let (r, pivots) = rref(m);
    let mut basis = Vec::new();
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; cols];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut vkr = zeros(cols);
        vkr[free] = rat(1);
        for (i, &p) in pivots.iter().enumerate() {
            vkr[p] = -r[i][free].clone();
        }
        basis.push(vkr);
    }
    basis
}

/// One solution of `m x = rhs`, if consistent.
pub fn solve(m: &Matrix, rhs: &Vector) -> Option<Vector> {
    let rows = m.len();
    assert_eq!(rows, rhs.len());
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut aug: Matrix = m
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    if aug.is_empty() {
        // No constraints: the zero vector works when rhs is empty.
        return Some(zeros(cols));
    }
    let (r, pivots) = rref(std::mem::take(&mut aug));
    if pivots.contains(&cols) {
        return None; // inconsistent
    }
    let mut x = zeros(cols);
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[i][cols].clone();
    }
    Some(x)
}

/// Row space basis (rref rows) of the given spanning set.
pub fn row_space(vectors: Vec<Vector>) -> Matrix {
    if vectors.is_empty() {
        return Vec::new();
    }
    rref(vectors).0
}

/// Reduce `v` modulo the row space `rows` (assumed in rref).
pub fn reduce_mod(rows: &Matrix, pivots: &[usize], v: &Vector) -> Vector {
    let mut out = v.clone();
    for (i, &p) in pivots.iter().enumerate() {
        if !out[p].is_zero() {
            let f = out[p].clone();
            for c in 0..out.len() {
                let val = &out[c] - &f * &rows[i][c];
                out[c] = val;
            }
        }
    }
    out
}

/// Matrix-vector product.
pub fn matvec(m: &Matrix, v: &Vector) -> Vector {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(rat(0), |acc, (a, b)| acc + a * b)
        })
        .collect()
}
