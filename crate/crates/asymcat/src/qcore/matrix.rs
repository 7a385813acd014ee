//! Dense complex matrices.
//!
//! Everything in this crate works on small dense matrices (dimension ≤ 64),
//! stored row-major over `Complex64`. The composite index convention is fixed
//! throughout: for a product space A⊗B, basis state `i = i_A * dim_B + i_B`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Build a real matrix from nested rows of `f64`.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        m
    }

    /// Column vector |ket⟩ as an n×1 matrix.
    pub fn ket(amplitudes: &[C64]) -> Self {
        Self {
            rows: amplitudes.len(),
            cols: 1,
            data: amplitudes.to_vec(),
        }
    }

    /// Computational basis state |i⟩⟨i|.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m[(i, i)] = C64::new(1.0, 0.0);
        m
    }

    /// |i⟩⟨j| matrix unit.
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖a − b‖_F.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ‖m − m†‖_F, zero iff Hermitian.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        dev.sqrt()
    }

    /// (m + m†)/2.
    pub fn hermitize(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Kronecker product with composite index `i = i_self * other_dim + i_other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self[(ia, ja)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..other.rows {
                    for jb in 0..other.cols {
                        out[(ia * other.rows + ib, ja * other.cols + jb)] = a * other[(ib, jb)];
                    }
                }
            }
        }
        out
    }

    /// Tr(self · other).
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli σx.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

/// Pauli σy.
pub fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(0.0, -1.0);
    m[(1, 0)] = C64::new(0.0, 1.0);
    m
}

/// Pauli σz.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

/// Kronecker product of two operators (alias used at call sites that speak
/// in terms of subsystem tensor products).
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Which factor of a bipartite product space survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of a square matrix on A⊗B with `dim = dim_a * dim_b`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Keep,
) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!(
            "partial trace expects a {0}x{0} matrix, got {1}x{2}",
            dim_a * dim_b,
            m.rows(),
            m.cols()
        )));
    }
    let out = match keep {
        Keep::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Keep::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn basis_bookkeeping() {
        // |0⟩⟨0| ⊗ |1⟩⟨1| occupies composite index 0*2+1 = 1.
        let p0 = ComplexMatrix::basis_projector(2, 0);
        let p1 = ComplexMatrix::basis_projector(2, 1);
        let t = tensor(&p0, &p1);
        for i in 0..4 {
            let expect = if i == 1 { 1.0 } else { 0.0 };
            assert_relative_eq!(t[(i, i)].re, expect);
        }
    }

    #[test]
    fn product_state_diagonal_entry() {
        // Diagonal Bloch entries multiply under the tensor product.
        let rho_s = ComplexMatrix::from_real_rows(&[
            &[(1.0 - 0.9013) / 2.0, 0.4333 / 2.0],
            &[0.4333 / 2.0, (1.0 + 0.9013) / 2.0],
        ]);
        let rho_c = ComplexMatrix::from_real_rows(&[
            &[(1.0 + 0.2928) / 2.0, 0.5710 / 2.0],
            &[0.5710 / 2.0, (1.0 - 0.2928) / 2.0],
        ]);
        let joint = tensor(&rho_s, &rho_c);
        let expected = ((1.0 - 0.9013) / 2.0) * ((1.0 + 0.2928) / 2.0);
        assert_relative_eq!(joint[(0, 0)].re, expected, max_relative = 1e-15);
        assert_relative_eq!(joint.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_product_factorizes() {
        let a = ComplexMatrix::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]);
        let b = ComplexMatrix::from_real_rows(&[&[0.5, 0.2], &[0.2, 0.5]]);
        let joint = tensor(&a, &b);
        let ta = partial_trace(&joint, 2, 2, Keep::A).unwrap();
        let tb = partial_trace(&joint, 2, 2, Keep::B).unwrap();
        assert!(ta.distance(&a) < 1e-14);
        assert!(tb.distance(&b) < 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexMatrix::ket(&[
            C64::new(inv, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(inv, 0.0),
        ]);
        let rho = &bell * &bell.adjoint();
        let red = partial_trace(&rho, 2, 2, Keep::B).unwrap();
        assert!(red.distance(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::zeros(3, 3);
        assert!(partial_trace(&m, 2, 2, Keep::A).is_err());
    }

    #[test]
    fn tensor_partial_trace_adjointness() {
        // Tr[(A⊗B)·M] = Tr[B · Tr_A((A⊗I)·M ... )]; checked in the
        // concrete form Tr[(A⊗B)M] = Tr[B·K] with K the A-contraction of M.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut rand_mat = |n: usize| {
            ComplexMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
        };
        for _ in 0..10 {
            let a = rand_mat(2);
            let b = rand_mat(3);
            let m = rand_mat(6);
            let lhs = tensor(&a, &b).trace_product(&m);
            // K[i,j] = Σ_{p,q} A[p,q] M[(q,i),(p,j)]
            let k = ComplexMatrix::from_fn(3, 3, |i, j| {
                let mut acc = C64::new(0.0, 0.0);
                for p in 0..2 {
                    for q in 0..2 {
                        acc += a[(p, q)] * m[(q * 3 + i, p * 3 + j)];
                    }
                }
                acc
            });
            let rhs = b.trace_product(&k);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
