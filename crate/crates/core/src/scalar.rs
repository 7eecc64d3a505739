//! Scalar abstraction shared by every module.
//!
//! All linear algebra runs on `nalgebra` dense matrices with
//! `num_complex::Complex<T>` entries, where `T` is any real floating type
//! implementing [`Real`]. `f64` is the working precision used by the CLI and
//! the acceptance suite; `f32` is supported for cheap sweeps at looser
//! tolerances.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating scalar usable throughout the crate.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// Machine epsilon of the scalar type.
    fn eps() -> Self;
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

#[inline]
pub fn cr<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// e^{i phase}
#[inline]
pub fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

#[inline]
pub fn norm_sqr<T: Real>(z: &Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn modulus<T: Real>(z: &Complex<T>) -> T {
    norm_sqr(z).sqrt()
}

/// Largest entry modulus of a matrix.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| {
        let a = modulus(z);
        if a > acc {
            a
        } else {
            acc
        }
    })
}

/// Root-sum-square of all entries (unnormalized Frobenius norm).
pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + norm_sqr(z)).sqrt()
}

/// Entrywise complex conjugate.
pub fn conj_matrix<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.map(|z| z.conj())
}

/// Hilbert–Schmidt inner product tr(A† B).
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    a.iter()
        .zip(b.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    let n = m.nrows().min(m.ncols());
    (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + m[(i, i)])
}

/// Index sets of the connected components of the nonzero pattern of a
/// square matrix (entries compared to exact zero), each sorted ascending.
/// Components are ordered by their smallest index.
pub fn block_components<T: Real>(m: &CMatrix<T>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let zero = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        for i in 0..n {
            if i != j && (m[(i, j)] != zero || m[(j, i)] != zero) {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

fn submatrix<T: Real>(m: &CMatrix<T>, idx: &[usize]) -> CMatrix<T> {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Eigen-decomposition of a Hermitian matrix, solved block by block over
/// [`block_components`]. Eigenvalues come unsorted, paired with columns.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = m.nrows();
    let mut values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for block in block_components(m) {
        let eig = submatrix(m, &block).symmetric_eigen();
        for k in 0..block.len() {
            let col = values.len();
            values.push(eig.eigenvalues[k]);
            for (i, &row) in block.iter().enumerate() {
                vectors[(row, col)] = eig.eigenvectors[(i, k)];
            }
        }
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, solved block by block.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    block_components(m)
        .into_iter()
        .flat_map(|block| submatrix(m, &block).symmetric_eigenvalues().iter().copied().collect::<Vec<_>>())
        .collect()
}

/// Matrix product that exploits exact zeros: when either factor has fewer
/// than a quarter of its entries nonzero the product is accumulated column
/// by column over the nonzeros only.
pub fn matmul<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions differ");
    let zero = Complex::new(T::zero(), T::zero());
    let nnz = |m: &CMatrix<T>| m.iter().filter(|z| **z != zero).count();
    let (na, nb) = (nnz(a), nnz(b));
    let sparse_a = na * 4 < a.len();
    let sparse_b = nb * 4 < b.len();
    if sparse_b && (!sparse_a || nb * a.nrows() <= na * b.ncols()) {
        sparse_right(a, b)
    } else if sparse_a {
        sparse_right(&b.transpose(), &a.transpose()).transpose()
    } else {
        a * b
    }
}

fn sparse_right<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = CMatrix::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let w = b[(k, j)];
            if w != zero {
                out.column_mut(j).axpy(w, &a.column(k), Complex::new(T::one(), T::zero()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blockwise_eigen_matches_dense() {
        // two blocks {0, 2} and {1, 3}
        let mut m = CMatrix::<f64>::zeros(4, 4);
        m[(0, 0)] = cr(1.0);
        m[(0, 2)] = c(0.5, 0.25);
        m[(2, 0)] = c(0.5, -0.25);
        m[(1, 3)] = cr(2.0);
        m[(3, 1)] = cr(2.0);
        m[(3, 3)] = cr(-1.0);
        assert_eq!(block_components(&m), vec![vec![0, 2], vec![1, 3]]);
        let (values, vectors) = hermitian_eigen(&m);
        let d = CMatrix::from_diagonal(&CVector::from_iterator(4, values.iter().map(|&v| cr(v))));
        assert!(max_abs(&(&vectors * d * vectors.adjoint() - &m)) < 1e-14);
        let mut a = hermitian_eigenvalues(&m);
        let mut b: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-14));
    }

    #[test]
    fn sparse_product_matches_dense() {
        let dense = CMatrix::<f64>::from_fn(6, 5, |i, j| c(i as f64 - 1.5, j as f64 * 0.5));
        let mut sparse = CMatrix::<f64>::zeros(5, 6);
        sparse[(1, 2)] = c(0.5, -2.0);
        sparse[(4, 0)] = cr(3.0);
        let mut sparse_left = CMatrix::<f64>::zeros(7, 6);
        sparse_left[(6, 3)] = c(-1.0, 1.0);
        for (x, y) in [(&dense, &sparse), (&sparse_left, &dense)] {
            assert!(max_abs(&(matmul(x, y) - x * y)) < 1e-14);
        }
        assert!(max_abs(&(matmul(&sparse, &dense) - &sparse * &dense)) < 1e-14);
    }
}
