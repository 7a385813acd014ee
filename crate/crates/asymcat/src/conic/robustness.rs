//! Generalized robustness of asymmetry.
//!
//! With free states diagonal in the energy eigenbasis, the robustness
//! `min { s ≥ 0 : (ρ + sτ)/(1+s) free }` has the epigraph form
//! `min Tr(D) − 1` over diagonal `D ⪰ ρ`: writing `(1+s)·δ = ρ + sτ` with δ
//! diagonal shows `D = (1+s)δ` dominates ρ, and conversely. For a qubit the
//! optimum is `2|ρ01|`.

use num_complex::Complex64 as C64;

use super::{solve, MatrixExpr, SdpOptions, SdpProblem};
use crate::qcore::{ComplexMatrix, DensityMatrix};
use crate::Result;

/// Closed-form qubit robustness 2|ρ01|.
pub fn qubit_robustness(rho: &DensityMatrix) -> f64 {
    2.0 * rho.coherence().norm()
}

/// Robustness of asymmetry by semidefinite programming.
///
/// `free_basis`, when given, holds the energy eigenbasis as matrix columns;
/// the free states are the ones diagonal in that basis. Defaults to the
/// computational basis.
pub fn robustness_of_asymmetry(
    rho: &DensityMatrix,
    free_basis: Option<&ComplexMatrix>,
    opts: &SdpOptions,
) -> Result<f64> {
    let d = rho.dim();
    let work = match free_basis {
        Some(basis) => &(&basis.adjoint() * rho.mat()) * basis,
        None => rho.mat().clone(),
    };

    // One 1x1 variable per diagonal entry of D.
    let vars: Vec<(String, usize)> = (0..d).map(|i| (format!("d{i}"), 1)).collect();
    let mut p = SdpProblem::new(vars);
    for i in 0..d {
        let coeff = ComplexMatrix::identity(1);
        p.objective.add_trace_term(i, &coeff, -1.0);
    }
    // D − ρ ⪰ 0 with D = diag(d_0..d_{d-1}).
    let mut expr = MatrixExpr::new(d);
    expr.constant = -&work;
    for i in 0..d {
        expr.push(i, i, i, 0, 0, C64::new(1.0, 0.0));
    }
    p.psd_constraints.push(expr);

    let sol = solve(&p, opts)?.require_optimal()?;
    Ok((-sol.objective_value - 1.0).max(0.0))
}
