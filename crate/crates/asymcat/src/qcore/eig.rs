//! Hermitian eigendecomposition through a real-symmetric embedding.
//!
//! A Hermitian `H = A + iB` (A symmetric, B antisymmetric) embeds as the real
//! symmetric block matrix `[[A, -B], [B, A]]` whose spectrum is that of `H`
//! with every eigenvalue doubled. Eigenvectors of the embedding come in pairs
//! `(a; b)` and `(-b; a)` that both map to the same complex eigenvector
//! `a + ib`, so recovering a complex eigenbasis amounts to keeping one member
//! of each pair.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Real-symmetric embedding `[[Re, -Im], [Im, Re]]` of a Hermitian matrix.
pub fn embed_hermitian(m: &ComplexMatrix) -> DMatrix<f64> {
    let d = m.rows();
    let mut out = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + d, j + d)] = z.re;
            out[(i, j + d)] = -z.im;
            out[(i + d, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`embed_hermitian`], averaging the redundant blocks.
pub fn unembed_hermitian(p: &DMatrix<f64>) -> ComplexMatrix {
    let d = p.nrows() / 2;
    ComplexMatrix::from_fn(d, d, |i, j| {
        let re = 0.5 * (p[(i, j)] + p[(i + d, j + d)]);
        let im = 0.5 * (p[(i + d, j)] - p[(i, j + d)]);
        C64::new(re, im)
    })
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Inputs within `tol.eig_symmetrize` of Hermitian are symmetrized first;
/// anything further is rejected. Returns eigenvalues in descending order and
/// the matching orthonormal eigenvectors as columns, so that `m = V Λ V†`.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition expects a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let dev = m.hermiticity_deviation();
    let scale = m.frobenius_norm().max(1.0);
    if dev > tol.eig_symmetrize * scale {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: tol.eig_symmetrize * scale,
        });
    }
    let h = m.hermitize();
    let d = h.rows();
    let eig = SymmetricEigen::new(embed_hermitian(&h));

    // Candidates sorted by eigenvalue, most positive first.
    let mut order: Vec<usize> = (0..2 * d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut values = Vec::with_capacity(d);
    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(d);
    for &k in &order {
        if vectors.len() == d {
            break;
        }
        let col = eig.eigenvectors.column(k);
        let mut v: Vec<C64> = (0..d).map(|i| C64::new(col[i], col[i + d])).collect();
        // Project out previously accepted vectors. Candidates from distinct
        // eigenvalues are already orthogonal; within a degenerate cluster each
        // complex eigenvector shows up twice, and its duplicate projects to
        // (numerically) zero.
        for prev in &vectors {
            let overlap: C64 = prev.iter().zip(&v).map(|(p, x)| p.conj() * x).sum();
            for (x, p) in v.iter_mut().zip(prev) {
                *x -= overlap * p;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for x in &mut v {
                *x /= C64::new(norm, 0.0);
            }
            values.push(eig.eigenvalues[k]);
            vectors.push(v);
        }
    }
    if vectors.len() != d {
        return Err(Error::OptimizationFailed(
            "failed to recover a complex eigenbasis from the real embedding".into(),
        ));
    }
    let vmat = ComplexMatrix::from_fn(d, d, |i, j| vectors[j][i]);
    Ok((values, vmat))
}

/// Nearest positive semidefinite matrix in Frobenius norm (eigenvalue clip).
pub fn psd_project(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.rows();
    match d {
        0 => m.clone(),
        1 => {
            let v = m[(0, 0)].re.max(0.0);
            let mut out = ComplexMatrix::zeros(1, 1);
            out[(0, 0)] = C64::new(v, 0.0);
            out
        }
        2 => psd_project_2x2(m),
        _ => {
            let eig = SymmetricEigen::new(embed_hermitian(&m.hermitize()));
            let n = 2 * d;
            let mut p = DMatrix::<f64>::zeros(n, n);
            for k in 0..n {
                let lambda = eig.eigenvalues[k];
                if lambda <= 0.0 {
                    continue;
                }
                let v = eig.eigenvectors.column(k);
                for i in 0..n {
                    for j in 0..n {
                        p[(i, j)] += lambda * v[i] * v[j];
                    }
                }
            }
            unembed_hermitian(&p)
        }
    }
}

/// Closed-form PSD projection for 2x2 Hermitian matrices.
fn psd_project_2x2(m: &ComplexMatrix) -> ComplexMatrix {
    let h = m.hermitize();
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let (lo, hi) = (mean - rad, mean + rad);
    if lo >= 0.0 {
        return h;
    }
    if hi <= 0.0 {
        return ComplexMatrix::zeros(2, 2);
    }
    // Keep the positive eigenpair only: P = hi * |v⟩⟨v|.
    // Eigenvector for hi: (b, hi - a) unless b ≈ 0.
    let mut out = ComplexMatrix::zeros(2, 2);
    if b.norm() < 1e-300 {
        if a >= d {
            out[(0, 0)] = C64::new(hi, 0.0);
        } else {
            out[(1, 1)] = C64::new(hi, 0.0);
        }
        return out;
    }
    let v0 = b;
    let v1 = C64::new(hi - a, 0.0);
    let n2 = v0.norm_sqr() + v1.norm_sqr();
    out[(0, 0)] = C64::new(hi * v0.norm_sqr() / n2, 0.0);
    out[(1, 1)] = C64::new(hi * v1.norm_sqr() / n2, 0.0);
    out[(0, 1)] = v0 * v1.conj() * (hi / n2);
    out[(1, 0)] = out[(0, 1)].conj();
    out
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    if m.rows() == 1 {
        return m[(0, 0)].re;
    }
    let eig = SymmetricEigen::new(embed_hermitian(&m.hermitize()));
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Hermitian square root via the spectral decomposition, clipping negative
/// eigenvalues to zero.
pub fn sqrt_psd(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (vals, vecs) = hermitian_eig(m, tol)?;
    let d = m.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, &lambda) in vals.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        if s == 0.0 {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj() * s;
            }
        }
    }
    Ok(out)
}

/// Trace norm ‖m‖₁ of a Hermitian matrix (sum of |eigenvalues|).
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> f64 {
    if m.rows() == 1 {
        return m[(0, 0)].re.abs();
    }
    let eig = SymmetricEigen::new(embed_hermitian(&m.hermitize()));
    // The embedding doubles every eigenvalue.
    0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::{pauli_x, C64};
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let raw = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        raw.hermitize()
    }

    fn reconstruct(vals: &[f64], vecs: &ComplexMatrix) -> ComplexMatrix {
        let d = vecs.rows();
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, &l) in vals.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj() * l;
                }
            }
        }
        out
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let (vals, _) = hermitian_eig(&ComplexMatrix::identity(4), &Tolerances::default()).unwrap();
        for v in vals {
            approx::assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pauli_x_spectrum() {
        let (vals, _) = hermitian_eig(&pauli_x(), &Tolerances::default()).unwrap();
        approx::assert_relative_eq!(vals[0], 1.0, epsilon = 1e-12);
        approx::assert_relative_eq!(vals[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn embedding_doubles_the_spectrum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(5, &mut rng);
        let (vals, _) = hermitian_eig(&h, &Tolerances::default()).unwrap();
        let emb = SymmetricEigen::new(embed_hermitian(&h));
        let mut doubled: Vec<f64> = vals.iter().flat_map(|&v| [v, v]).collect();
        doubled.sort_by(f64::total_cmp);
        let mut emb_vals: Vec<f64> = emb.eigenvalues.iter().copied().collect();
        emb_vals.sort_by(f64::total_cmp);
        for (a, b) in doubled.iter().zip(&emb_vals) {
            approx::assert_relative_eq!(a, b, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3, 6, 8, 16] {
            let h = random_hermitian(n, &mut rng);
            let (vals, vecs) = hermitian_eig(&h, &Tolerances::default()).unwrap();
            let r = reconstruct(&vals, &vecs);
            assert!(
                r.distance(&h) < 1e-10 * h.frobenius_norm().max(1.0),
                "reconstruction residual {} at n={}",
                r.distance(&h),
                n
            );
            // Eigenvalues descending.
            for w in vals.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_spectrum_reconstruction() {
        // Projector with a three-fold degenerate eigenvalue.
        let mut p = ComplexMatrix::zeros(4, 4);
        for i in 0..3 {
            p[(i, i)] = C64::new(2.5, 0.0);
        }
        p[(3, 3)] = C64::new(-1.0, 0.0);
        let (vals, vecs) = hermitian_eig(&p, &Tolerances::default()).unwrap();
        assert!(reconstruct(&vals, &vecs).distance(&p) < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(1.0, 0.0); // asymmetric beyond tolerance
        assert!(hermitian_eig(&m, &Tolerances::default()).is_err());
    }

    #[test]
    fn psd_projection_clips_negatives() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in [1usize, 2, 3, 7] {
            let h = random_hermitian(n, &mut rng);
            let p = psd_project(&h);
            assert!(min_eigenvalue(&p) > -1e-10);
            // Projection is idempotent and fixes PSD inputs.
            assert!(psd_project(&p).distance(&p) < 1e-9);
        }
    }

    #[test]
    fn psd_projection_2x2_matches_generic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let h = random_hermitian(2, &mut rng);
            let fast = psd_project(&h);
            // Generic path via the embedding.
            let eig = SymmetricEigen::new(embed_hermitian(&h));
            let n = 4;
            let mut p = nalgebra::DMatrix::<f64>::zeros(n, n);
            for k in 0..n {
                let l = eig.eigenvalues[k];
                if l <= 0.0 {
                    continue;
                }
                let v = eig.eigenvectors.column(k);
                for i in 0..n {
                    for j in 0..n {
                        p[(i, j)] += l * v[i] * v[j];
                    }
                }
            }
            let slow = unembed_hermitian(&p);
            assert!(fast.distance(&slow) < 1e-10);
        }
    }

    #[test]
    fn trace_norm_of_pauli() {
        approx::assert_relative_eq!(trace_norm_hermitian(&pauli_x()), 2.0, epsilon = 1e-12);
    }
}
