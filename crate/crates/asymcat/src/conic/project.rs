//! Nearest-point projection onto the CPTP (optionally mask-constrained) set.
//!
//! Dykstra's alternating projections between the PSD cone and the affine set
//! {trace-preserving, masked entries zero} converge to the Frobenius-nearest
//! point of the intersection. Used to repair measured Choi matrices that fail
//! positivity slightly.

use num_complex::Complex64 as C64;

use crate::qcore::eig::{min_eigenvalue, psd_project};
use crate::qcore::matrix::ComplexMatrix;
use crate::{Error, Result};

/// Orthogonal projection onto {J Hermitian : Tr_out-blocks = δ_ab on unmasked
/// diagonal slots, masked entries zero}.
fn project_affine(j: &ComplexMatrix, dim_in: usize, dim_out: usize, mask: Option<&ComplexMatrix>) -> ComplexMatrix {
    let mut out = j.hermitize();
    let allowed = |r: usize, c: usize| -> bool {
        mask.map_or(true, |m| m[(r, c)].re > 0.5)
    };
    if mask.is_some() {
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                if !allowed(r, c) {
                    out[(r, c)] = C64::new(0.0, 0.0);
                }
            }
        }
    }
    // Per input block (a,b): Σ_k J[(a,k),(b,k)] = δ_ab, distributing the
    // correction over the unmasked diagonal slots of that block.
    for a in 0..dim_in {
        for b in 0..dim_in {
            let slots: Vec<usize> = (0..dim_out)
                .filter(|&k| allowed(a * dim_out + k, b * dim_out + k))
                .collect();
            if slots.is_empty() {
                continue;
            }
            let target = if a == b { 1.0 } else { 0.0 };
            let sum: C64 = slots
                .iter()
                .map(|&k| out[(a * dim_out + k, b * dim_out + k)])
                .sum();
            let corr = (C64::new(target, 0.0) - sum) / slots.len() as f64;
            for &k in &slots {
                out[(a * dim_out + k, b * dim_out + k)] += corr;
            }
        }
    }
    out
}

/// Frobenius-nearest CPTP Choi matrix to `j`, additionally constrained to the
/// support of `mask` when given. Returns the affine-side iterate, so trace
/// preservation and the mask hold exactly and positivity within `tol`.
pub fn nearest_cptp(
    j: &ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
    mask: Option<&ComplexMatrix>,
    tol: f64,
    max_iter: usize,
) -> Result<ComplexMatrix> {
    let n = dim_in * dim_out;
    if j.rows() != n || !j.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Choi must be {n}x{n}, got {}x{}",
            j.rows(),
            j.cols()
        )));
    }
    let mut x = j.hermitize();
    let mut p = ComplexMatrix::zeros(n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    let mut aff = x.clone();
    for _ in 0..max_iter {
        let y = psd_project(&(&x + &p));
        p = &(&x + &p) - &y;
        aff = project_affine(&(&y + &q), dim_in, dim_out, mask);
        q = &(&y + &q) - &aff;
        let gap = y.distance(&aff);
        x = aff.clone();
        if gap < tol && min_eigenvalue(&aff) > -tol {
            return Ok(aff);
        }
    }
    let min = min_eigenvalue(&aff);
    if min > -10.0 * tol {
        Ok(aff)
    } else {
        Err(Error::NotPsd(min))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::partial_trace;
    use crate::qcore::{kraus_to_choi, Keep};

    #[test]
    fn fixes_slightly_nonpositive_choi() {
        let j = kraus_to_choi(&crate::protocols::Protocol::main().kraus).unwrap();
        // Perturb asymmetrically to break positivity.
        let mut bad = j.clone();
        bad[(1, 2)] += C64::new(0.02, 0.01);
        bad[(2, 1)] += C64::new(0.02, -0.01);
        bad[(5, 5)] -= C64::new(0.03, 0.0);
        let fixed = nearest_cptp(&bad, 4, 4, None, 1e-9, 5000).unwrap();
        assert!(min_eigenvalue(&fixed) > -1e-8);
        let tr_out = partial_trace(&fixed, 4, 4, Keep::A).unwrap();
        assert!(tr_out.distance(&ComplexMatrix::identity(4)) < 1e-9);
        // Stays close to the input.
        assert!(fixed.distance(&bad) < 0.2);
    }

    #[test]
    fn cptp_input_is_fixed_point() {
        let j = kraus_to_choi(&[ComplexMatrix::identity(2)]).unwrap();
        let fixed = nearest_cptp(&j, 2, 2, None, 1e-10, 1000).unwrap();
        assert!(fixed.distance(&j) < 1e-9);
    }
}
