//! Small dense linear-algebra kit: vector helpers, a column-major matrix and
//! a diagonally pivoted LDLᵀ factorization for the reduced Newton systems.

use crate::scalar::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    // independent partial sums let the compiler vectorize
    let mut acc = [T::zero(); 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail = ca.remainder().iter().zip(cb.remainder()).fold(T::zero(), |s, (&x, &y)| s + x * y);
    for (pa, pb) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += pa[k] * pb[k];
        }
    }
    let pairs = [acc[0] + acc[4], acc[1] + acc[5], acc[2] + acc[6], acc[3] + acc[7]];
    (pairs[0] + pairs[2]) + (pairs[1] + pairs[3]) + tail
}

pub fn norm_sq<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

/// Conjugate gradients for a symmetric positive definite operator.
///
/// Stops once `‖r‖ ≤ rel_tol·‖rhs‖`. Returns `None` on negative or zero
/// curvature, non-finite values, or when `max_iter` is exhausted.
pub fn conjugate_gradient<T: Scalar>(
    mut apply: impl FnMut(&[T]) -> Vec<T>,
    rhs: &[T],
    rel_tol: T,
    max_iter: usize,
) -> Option<Vec<T>> {
    let n = rhs.len();
    let mut x = vec![T::zero(); n];
    let target = rel_tol * norm(rhs);
    let mut r = rhs.to_vec();
    let mut rr = norm_sq(&r);
    if rr.sqrt() <= target {
        return Some(x);
    }
    let mut p = r.clone();
    for _ in 0..max_iter {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return None;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = norm_sq(&r);
        if !rr_next.is_finite() {
            return None;
        }
        if rr_next.sqrt() <= target {
            return Some(x);
        }
        let beta = rr_next / rr;
        rr = rr_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    None
}

/// ‖x‖₀
pub fn nnz<T: Scalar>(a: &[T]) -> usize {
    a.iter().filter(|v| !v.is_zero()).count()
}

pub fn support<T: Scalar>(a: &[T]) -> Vec<usize> {
    a.iter()
        .enumerate()
        .filter_map(|(i, v)| (!v.is_zero()).then_some(i))
        .collect()
}

pub fn gather<T: Copy>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i]).collect()
}

/// Dense matrix stored column-major, so column access is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    /// Builds from column-major storage.
    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<T>) -> Option<Self> {
        (data.len() == nrows * ncols).then_some(Self { nrows, ncols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return None;
        }
        Some(Self::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// `A x`; zero entries of `x` are skipped, which makes sparse iterates cheap.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(x.len(), self.ncols);
        let mut y = vec![T::zero(); self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (yi, &aij) in y.iter_mut().zip(self.col(j)) {
                *yi += aij * xj;
            }
        }
        y
    }

    /// `Aᵀ y`
    pub fn tr_mul_vec(&self, y: &[T]) -> Vec<T> {
        debug_assert_eq!(y.len(), self.nrows);
        (0..self.ncols).map(|j| dot(self.col(j), y)).collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            let col = self.mul_vec(other.col(j));
            out.col_mut(j).copy_from_slice(&col);
        }
        out
    }

    /// Rescales every column to unit Euclidean norm; zero columns stay zero.
    pub fn normalize_columns(&mut self) {
        for j in 0..self.ncols {
            let c = self.col_mut(j);
            let nrm = norm(c);
            if nrm > T::zero() {
                c.iter_mut().for_each(|v| *v /= nrm);
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.nrows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.nrows + i]
    }
}

/// Relative pivot floor below which a reduced Hessian counts as singular.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// `P A Pᵀ = L D Lᵀ` for symmetric `A`, choosing the largest remaining diagonal
/// entry as the pivot at each step (rank revealing on semidefinite matrices).
#[derive(Debug, Clone)]
pub struct SymmetricFactor<T> {
    n: usize,
    perm: Vec<usize>,
    lower: DenseMatrix<T>,
    diag: Vec<T>,
}

impl<T: Scalar> SymmetricFactor<T> {
    /// Returns `None` when a pivot falls below `PIVOT_FLOOR` times the largest
    /// diagonal magnitude of the input.
    pub fn new(a: &DenseMatrix<T>) -> Option<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "factorization needs a square matrix");
        let mut w = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = (0..n).fold(T::zero(), |m, i| m.max(a[(i, i)].abs()));
        if n > 0 && !(scale > T::zero()) {
            return None;
        }
        let floor = T::lit(PIVOT_FLOOR) * scale;
        let mut diag = vec![T::zero(); n];

        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| w[(i, i)].abs().partial_cmp(&w[(j, j)].abs()).unwrap())
                .unwrap();
            if p != k {
                swap_sym(&mut w, k, p);
                perm.swap(k, p);
            }
            let d = w[(k, k)];
            if !(d.abs() > floor) {
                return None;
            }
            diag[k] = d;
            for i in k + 1..n {
                w[(i, k)] /= d;
            }
            for j in k + 1..n {
                let ljd = w[(j, k)] * d;
                if ljd.is_zero() {
                    continue;
                }
                for i in k + 1..n {
                    let lik = w[(i, k)];
                    w[(i, j)] -= lik * ljd;
                }
            }
        }
        let lower = DenseMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => w[(i, j)],
            std::cmp::Ordering::Equal => T::one(),
            std::cmp::Ordering::Less => T::zero(),
        });
        Some(Self {
            n,
            perm,
            lower,
            diag,
        })
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        assert_eq!(rhs.len(), self.n);
        let n = self.n;
        let mut y: Vec<T> = self.perm.iter().map(|&p| rhs[p]).collect();
        for j in 0..n {
            let yj = y[j];
            for (i, yi) in y.iter_mut().enumerate().skip(j + 1) {
                *yi -= self.lower[(i, j)] * yj;
            }
        }
        for (yi, &d) in y.iter_mut().zip(&self.diag) {
            *yi /= d;
        }
        for j in (0..n).rev() {
            let mut s = y[j];
            for (i, &yi) in y.iter().enumerate().skip(j + 1) {
                s -= self.lower[(i, j)] * yi;
            }
            y[j] = s;
        }
        let mut x = vec![T::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    pub fn pivots(&self) -> &[T] {
        &self.diag
    }
}

// Row and column swap. The trailing block is kept fully symmetric, and rows of
// the already computed multipliers move with it.
fn swap_sym<T: Scalar>(w: &mut DenseMatrix<T>, k: usize, p: usize) {
    let n = w.nrows();
    for j in 0..n {
        let a = w[(k, j)];
        w[(k, j)] = w[(p, j)];
        w[(p, j)] = a;
    }
    for i in 0..n {
        let a = w[(i, k)];
        w[(i, k)] = w[(i, p)];
        w[(i, p)] = a;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cg_solves_spd_and_rejects_indefinite() {
        let a = DenseMatrix::from_rows(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]]).unwrap();
        let b = vec![1.0, 2.0, 3.0];
        let x = conjugate_gradient(|v| a.mul_vec(v), &b, 1e-14, 50).unwrap();
        let r: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm(&r) < 1e-12);
        let ind = DenseMatrix::diagonal(&[1.0, -1.0]);
        assert!(conjugate_gradient(|v| ind.mul_vec(v), &[1.0, 1.0], 1e-12, 10).is_none());
    }

    fn spd(n: usize, seed: u64) -> DenseMatrix<f64> {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let b = DenseMatrix::from_fn(n + 3, n, |_, _| next());
        b.transpose().matmul(&b)
    }

    #[test]
    fn solves_spd_system() {
        let a = spd(8, 3);
        let x_true: Vec<f64> = (0..8).map(|i| i as f64 - 3.5).collect();
        let rhs = a.mul_vec(&x_true);
        let f = SymmetricFactor::new(&a).unwrap();
        let x = f.solve(&rhs);
        assert!(dist(&x, &x_true) < 1e-10);
    }

    #[test]
    fn solves_indefinite_with_nonzero_diagonal() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap();
        let f = SymmetricFactor::new(&a).unwrap();
        let x = f.solve(&[5.0, -4.0]);
        assert!(dist(&a.mul_vec(&x), &[5.0, -4.0]) < 1e-12);
    }

    #[test]
    fn rank_deficient_gram_is_rejected() {
        // 2 x 3 matrix: its 3 x 3 Gram has rank 2
        let b = DenseMatrix::from_rows(&[vec![1.0, 0.5, 2.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let g = b.transpose().matmul(&b);
        assert!(SymmetricFactor::new(&g).is_none());
    }

    #[test]
    fn empty_system_is_trivially_solvable() {
        let f = SymmetricFactor::<f64>::new(&DenseMatrix::zeros(0, 0)).unwrap();
        assert!(f.solve(&[]).is_empty());
    }

    #[test]
    fn zero_matrix_is_rejected() {
        assert!(SymmetricFactor::<f64>::new(&DenseMatrix::zeros(2, 2)).is_none());
    }

    #[test]
    fn sparse_mul_skips_zeros_consistently() {
        let a = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64);
        let y = a.mul_vec(&[0.0, 1.0, 0.0, -1.0]);
        assert_eq!(y, vec![-2.0, -2.0, -2.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 0.0, 0.0]), vec![0.0, 1.0, 2.0, 3.0]);
    }
}
