//! Small dense linear algebra over ℚ and ℤ: row reduction, inverses,
//! kernels, and Hermite normal form for integer lattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type QMat = Vec<Vec<BigRational>>;
pub type QVec = Vec<BigRational>;

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn identity(n: usize) -> QMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
}

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![q(0); c]; r]
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut out = zeros(n, p);
    for i in 0..n {
        for k in 0..m {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..p {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

pub fn mat_vec(a: &QMat, v: &[BigRational]) -> QVec {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn transpose(a: &QMat) -> QMat {
    let c = a.first().map_or(0, |r| r.len());
    (0..c).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_sub(a: &QMat, b: &QMat) -> QMat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn vec_add(a: &[BigRational], b: &[BigRational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[BigRational], b: &[BigRational]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Quadratic form `vᵀ G v`.
pub fn quad_form(g: &QMat, v: &[BigRational]) -> BigRational {
    v.iter().zip(mat_vec(g, v)).map(|(x, y)| x * y).sum()
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMat) -> usize {
    rref(&mut m.clone()).len()
}

/// Basis of `{x : m x = 0}`.
pub fn kernel(m: &QMat, cols: usize) -> Vec<QVec> {
    let mut r = m.clone();
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![q(0); cols];
            v[f] = q(1);
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut aug: QMat = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Some solution of `m x = b`, or `None` when inconsistent.
pub fn solve(m: &QMat, b: &[BigRational]) -> Option<QVec> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut aug: QMat = m.iter().zip(b).map(|(row, x)| row.iter().cloned().chain([x.clone()]).collect()).collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![q(0); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = aug[i][cols].clone();
    }
    Some(x)
}

/// Row Hermite normal form of an integer matrix; zero rows dropped.
pub fn hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out_rank = 0;
    for c in 0..cols {
        // Euclid on column c among rows out_rank..
        loop {
            let nonzero: Vec<usize> = (out_rank..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| rows[i][c].abs()).unwrap();
            rows.swap(out_rank, p);
            if rows[out_rank][c].is_negative() {
                for x in rows[out_rank].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            let mut done = true;
            for i in out_rank + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let f = rows[i][c].div_floor(&rows[out_rank][c]);
                for j in 0..cols {
                    let t = &f * &rows[out_rank][j];
                    rows[i][j] -= t;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if out_rank < rows.len() && !rows[out_rank][c].is_zero() {
            for i in 0..out_rank {
                let f = rows[i][c].div_floor(&rows[out_rank][c]);
                for j in 0..cols {
                    let t = &f * &rows[out_rank][j];
                    rows[i][j] -= t;
                }
            }
            out_rank += 1;
        }
    }
    rows.truncate(out_rank);
    rows
}

/// HNF basis of the ℤ-span of rational row vectors.
pub fn lattice_basis(vectors: &[QVec]) -> Vec<QVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let den = vectors.iter().flatten().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
    let ints: Vec<Vec<BigInt>> =
        vectors.iter().map(|v| v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
    hnf(ints)
        .into_iter()
        .map(|row| row.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
        .collect()
}

/// Whether `v` is an integer combination of the (independent) rows of `basis`.
pub fn in_lattice(basis: &[QVec], v: &[BigRational]) -> bool {
    let bt = transpose(&basis.to_vec());
    match solve(&bt, v) {
        Some(c) => c.iter().all(|x| x.is_integer()) && mat_vec(&bt, &c) == v,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn kernel_dimension() {
        let a = m(&[&[1, 1, 0], &[0, 0, 0]]);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn hnf_of_redundant_generators() {
        let b = hnf(vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(2)],
            vec![BigInt::from(1), BigInt::from(1)],
        ]);
        assert_eq!(b.len(), 2);
        // index of the lattice = |det| = 2
        let det = &b[0][0] * &b[1][1] - &b[0][1] * &b[1][0];
        assert_eq!(det.abs(), BigInt::from(2));
        let basis: Vec<QVec> = b.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
        assert!(in_lattice(&basis, &[q(3), q(1)]));
        assert!(!in_lattice(&basis, &[q(1), q(0)]));
    }
}
