//! Dense helpers on small row-major matrices. The search loops call these
//! millions of times, so they avoid allocation where they can.

use std::ops::{Add, Div, Mul, Neg, Sub};

use twofloat::TwoFloat;

const STACK: usize = 16;

/// Determinant by LU with partial pivoting.
pub fn det(a: &[f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    if n == 0 {
        return 1.0;
    }
    let mut buf = [0.0f64; STACK * STACK];
    let mut heap;
    let m: &mut [f64] = if n <= STACK {
        &mut buf[..n * n]
    } else {
        heap = vec![0.0; n * n];
        &mut heap
    };
    m.copy_from_slice(a);
    let mut d = 1.0;
    for c in 0..n {
        let mut p = c;
        for r in c + 1..n {
            if m[r * n + c].abs() > m[p * n + c].abs() {
                p = r;
            }
        }
        let piv = m[p * n + c];
        if piv == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
            }
            d = -d;
        }
        d *= piv;
        for r in c + 1..n {
            let f = m[r * n + c] / piv;
            if f != 0.0 {
                for j in c + 1..n {
                    m[r * n + j] -= f * m[c * n + j];
                }
            }
        }
    }
    d
}

/// Cholesky test: every pivot must exceed `tol`.
pub fn is_positive_definite(a: &[f64], n: usize, tol: f64) -> bool {
    let mut buf = [0.0f64; STACK * STACK];
    let mut heap;
    let l: &mut [f64] = if n <= STACK {
        &mut buf[..n * n]
    } else {
        heap = vec![0.0; n * n];
        &mut heap
    };
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= tol {
                    return false;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

/// Solves `a x = b`; `None` when a pivot vanishes.
pub fn solve(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for c in 0..n {
        let mut p = c;
        for r in c + 1..n {
            if m[r * n + c].abs() > m[p * n + c].abs() {
                p = r;
            }
        }
        let piv = m[p * n + c];
        if piv.abs() < 1e-300 {
            return None;
        }
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
            }
            x.swap(p, c);
        }
        for r in c + 1..n {
            let f = m[r * n + c] / piv;
            if f != 0.0 {
                for j in c..n {
                    m[r * n + j] -= f * m[c * n + j];
                }
                x[r] -= f * x[c];
            }
        }
    }
    for c in (0..n).rev() {
        let mut s = x[c];
        for j in c + 1..n {
            s -= m[c * n + j] * x[j];
        }
        x[c] = s / m[c * n + c];
    }
    Some(x)
}

pub fn inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    for c in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[c] = 1.0;
        let col = solve(a, n, &e)?;
        for r in 0..n {
            inv[r * n + c] = col[r];
        }
    }
    Some(inv)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let m = nalgebra::DMatrix::from_row_slice(n, n, a);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition `a = Q diag(l) Q^T`; returns `(l, Q)` with `Q` row-major
/// and eigenvalues ascending.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = nalgebra::DMatrix::from_row_slice(n, n, a);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut q = vec![0.0; n * n];
    for (c, &src) in order.iter().enumerate() {
        for r in 0..n {
            q[r * n + c] = eig.eigenvectors[(r, src)];
        }
    }
    (vals, q)
}

/// Arithmetic needed by the precision-generic Jacobi sweep.
pub trait Real:
    Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    /// Relative resolution of the type.
    fn epsilon() -> f64;
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn epsilon() -> f64 {
        f64::EPSILON
    }
}

impl Real for TwoFloat {
    fn from_f64(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn abs(self) -> Self {
        TwoFloat::abs(&self)
    }
    fn sqrt(self) -> Self {
        TwoFloat::sqrt(self)
    }
    fn epsilon() -> f64 {
        1e-30
    }
}

/// Cyclic Jacobi eigenvalue iteration; generic so the same code runs in
/// double-double when a double-precision signature is ambiguous.
pub fn jacobi_eigenvalues<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut m = a.to_vec();
    let zero = T::from_f64(0.0);
    let one = T::from_f64(1.0);
    let two = T::from_f64(2.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m[i * n + i].to_f64().powi(2);
            for j in i + 1..n {
                off += m[i * n + j].to_f64().powi(2);
            }
        }
        if off <= T::epsilon().powi(2) * diag.max(1.0) * 1e-4 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == zero {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (two * apq);
                let sign = if theta < zero { -one } else { one };
                let t = sign / (theta.abs() + (theta * theta + one).sqrt());
                let c = one / (t * t + one).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).collect()
}

/// Vector orthogonal (Euclidean) to the `n-1` given rows of length `n`, by
/// signed cofactors. Zero if the rows are dependent.
pub fn cofactor_null_vector(rows: &[Vec<f64>], n: usize) -> Vec<f64> {
    debug_assert_eq!(rows.len() + 1, n);
    let mut out = vec![0.0; n];
    let mut minor = vec![0.0; (n - 1) * (n - 1)];
    for (col, o) in out.iter_mut().enumerate() {
        for (r, row) in rows.iter().enumerate() {
            let mut c2 = 0;
            for (c, &v) in row.iter().enumerate() {
                if c != col {
                    minor[r * (n - 1) + c2] = v;
                    c2 += 1;
                }
            }
        }
        let sign = if (col + n - 1) % 2 == 0 { 1.0 } else { -1.0 };
        *o = sign * det(&minor, n - 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(n: usize) -> Vec<f64> {
        (0..n * n).map(|k| 1.0 / ((k / n + k % n + 1) as f64)).collect()
    }

    #[test]
    fn det_matches_known_values() {
        assert!((det(&[2.0, 1.0, 1.0, 3.0], 2) - 5.0).abs() < 1e-14);
        assert!((det(&[0.0, 1.0, 1.0, 0.0], 2) + 1.0).abs() < 1e-14);
        // det of the 4x4 Hilbert matrix is 1/6048000.
        assert!((det(&hilbert(4), 4) * 6_048_000.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cholesky_agrees_with_eigenvalues() {
        let a = [1.0, -0.5, -0.5, 1.0];
        assert!(is_positive_definite(&a, 2, 1e-12));
        let b = [1.0, -1.0, -1.0, 1.0];
        assert!(!is_positive_definite(&b, 2, 1e-12));
        assert!(symmetric_eigenvalues(&b, 2)[0].abs() < 1e-14);
    }

    #[test]
    fn inverse_roundtrip() {
        let h = hilbert(5);
        let inv = inverse(&h, 5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let s: f64 = (0..5).map(|k| h[i * 5 + k] * inv[k * 5 + j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn jacobi_agrees_in_both_precisions() {
        let h = hilbert(6);
        let mut reference = symmetric_eigenvalues(&h, 6);
        let mut d = jacobi_eigenvalues(&h, 6);
        d.sort_by(f64::total_cmp);
        let hd: Vec<TwoFloat> = h.iter().map(|&x| TwoFloat::from(x)).collect();
        let mut e: Vec<f64> = jacobi_eigenvalues(&hd, 6).into_iter().map(|x| x.to_f64()).collect();
        e.sort_by(f64::total_cmp);
        reference.sort_by(f64::total_cmp);
        for i in 0..6 {
            assert!((d[i] - reference[i]).abs() < 1e-12);
            assert!((e[i] - reference[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cofactor_vector_is_orthogonal() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 4.0]];
        let v = cofactor_null_vector(&rows, 3);
        for r in &rows {
            let s: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(s.abs() < 1e-12);
        }
        assert!(v.iter().any(|x| x.abs() > 0.1));
    }
}
