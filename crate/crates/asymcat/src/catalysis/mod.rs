//! Correlating-catalytic channel optimization.
//!
//! For fixed system and catalyst states the best TIO channel is a
//! semidefinite program over the channel's Choi matrix: positivity, trace
//! preservation, the Bohr-frequency mask, exact catalyst return, and a linear
//! coherence objective. The mask makes the Choi matrix block-diagonal over
//! Bohr-frequency classes, so the program is posed directly on those blocks.
//! On top of that sits a quasi-Newton search over the input states
//! ([`bilevel`]) and the state-space scans ([`scan`]).

pub mod bilevel;
pub mod scan;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::conic::{
    solve, LinearFunctional, MatrixExpr, SdpOptions, SdpProblem, SdpSolution, SdpStatus, WarmStart,
};
use crate::qcore::{bloch_to_density, BlochVector, ComplexMatrix, DensityMatrix, Keep, QuantumChannel};
use crate::tio::TioContext;
use crate::{Error, Result};

pub use bilevel::{bilevel_search, BilevelOutcome, OptimizerTrace, SearchSettings};
pub use scan::{scan_mixed_states, scan_pure_states, MixedScanPoint, PureScanPoint, ScanSettings};

/// One catalysis problem instance.
#[derive(Debug, Clone)]
pub struct CatalysisInstance {
    pub system_state: DensityMatrix,
    pub catalyst_state: DensityMatrix,
    pub ctx: TioContext,
    /// Require the catalyst marginal to return exactly (default). Disabling
    /// drops the return constraint entirely.
    pub exact_return: bool,
}

impl CatalysisInstance {
    pub fn new(system_state: DensityMatrix, catalyst_state: DensityMatrix, ctx: TioContext) -> Result<Self> {
        if system_state.dim() != 2 {
            return Err(Error::DimensionMismatch("system must be a qubit".into()));
        }
        if ctx.dim() != system_state.dim() * catalyst_state.dim() {
            return Err(Error::DimensionMismatch(format!(
                "context dim {} does not match 2x{} composite",
                ctx.dim(),
                catalyst_state.dim()
            )));
        }
        Ok(Self {
            system_state,
            catalyst_state,
            ctx,
            exact_return: true,
        })
    }

    pub fn from_bloch(system: &BlochVector, catalyst: &BlochVector, ctx: TioContext) -> Result<Self> {
        Self::new(bloch_to_density(system)?, bloch_to_density(catalyst)?, ctx)
    }

    pub fn catalyst_dim(&self) -> usize {
        self.catalyst_state.dim()
    }
}

/// Compact solver diagnostics carried in results.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverDiag {
    pub status: SdpStatus,
    pub objective_value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
}

impl SolverDiag {
    fn from(sol: &SdpSolution) -> Self {
        Self {
            status: sol.status,
            objective_value: sol.objective_value,
            primal_residual: sol.primal_residual,
            dual_residual: sol.dual_residual,
            gap: sol.gap,
            iterations: sol.iterations,
        }
    }
}

/// Result of one optimal-channel solve.
#[derive(Debug, Clone)]
pub struct CatalysisResult {
    pub channel: QuantumChannel,
    pub system_out: DensityMatrix,
    pub catalyst_out: DensityMatrix,
    /// Robustness increment Δη of the system.
    pub increment: f64,
    pub robustness_in: f64,
    pub robustness_out: f64,
    pub solver_diag: SolverDiag,
}

/// Choi-block bookkeeping for a Bohr-frequency mask.
pub(crate) struct BlockStructure {
    pub dim: usize,
    pub classes: Vec<Vec<(usize, usize)>>,
    index: HashMap<(usize, usize), (usize, usize)>,
}

impl BlockStructure {
    pub fn new(ctx: &TioContext) -> Self {
        let classes = ctx.bohr_classes();
        let mut index = HashMap::new();
        for (c, members) in classes.iter().enumerate() {
            for (p, &pair) in members.iter().enumerate() {
                index.insert(pair, (c, p));
            }
        }
        Self {
            dim: ctx.dim(),
            classes,
            index,
        }
    }

    pub fn var_specs(&self) -> Vec<(String, usize)> {
        self.classes
            .iter()
            .enumerate()
            .map(|(i, m)| (format!("block{i}"), m.len()))
            .collect()
    }

    /// Where a Choi entry ((a,i),(b,k)) lives, if the mask allows it.
    fn locate(&self, row: usize, col: usize) -> Option<(usize, usize, usize)> {
        let d = self.dim;
        let (c1, p) = self.index[&(row / d, row % d)];
        let (c2, q) = self.index[&(col / d, col % d)];
        (c1 == c2).then_some((c1, p, q))
    }

    /// Split `Σ w_rc · J[r,c]` into real and imaginary part functionals over
    /// the block variables; weights on masked-out entries vanish.
    pub fn weights_to_functionals(
        &self,
        weights: &[(usize, usize, C64)],
    ) -> (LinearFunctional, LinearFunctional) {
        let n = self.classes.len();
        let mut coeff: Vec<ComplexMatrix> = self
            .classes
            .iter()
            .map(|m| ComplexMatrix::zeros(m.len(), m.len()))
            .collect();
        for &(r, c, w) in weights {
            if let Some((cls, p, q)) = self.locate(r, c) {
                coeff[cls][(q, p)] += w;
            }
        }
        let mut re = LinearFunctional::zero(n);
        let mut im = LinearFunctional::zero(n);
        for (cls, d) in coeff.into_iter().enumerate() {
            if d.max_abs() == 0.0 {
                continue;
            }
            // Re Tr(D V) = Tr(((D+D†)/2) V), Im Tr(D V) = Tr(((D−D†)/2i) V).
            let d_adj = d.adjoint();
            let h_re = (&d + &d_adj).scale_re(0.5);
            let h_im = (&d - &d_adj).scale(C64::new(0.0, -0.5));
            re.add_trace_term(cls, &h_re, 1.0);
            im.add_trace_term(cls, &h_im, 1.0);
        }
        (re, im)
    }

    /// Rebuild the full Choi matrix, zero outside the mask.
    pub fn assemble_choi(&self, values: &[ComplexMatrix]) -> ComplexMatrix {
        let d = self.dim;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for (cls, members) in self.classes.iter().enumerate() {
            for (p, &(a, i)) in members.iter().enumerate() {
                for (q, &(b, k)) in members.iter().enumerate() {
                    j[(a * d + i, b * d + k)] = values[cls][(p, q)];
                }
            }
        }
        j
    }
}

/// Build the optimal-channel SDP for one phase angle.
fn build_problem(inst: &CatalysisInstance, blocks: &BlockStructure, phi: f64) -> SdpProblem {
    let d = blocks.dim;
    let dc = inst.catalyst_dim();
    let joint = inst.system_state.tensor(&inst.catalyst_state);
    let x = joint.mat();

    let mut p = SdpProblem::new(blocks.var_specs());
    for (v, spec) in blocks.var_specs().iter().enumerate() {
        p.psd_constraints.push(MatrixExpr::variable(v, spec.1));
    }

    // Trace preservation: Σ_k J[(a,k),(b,k)] = δ_ab for a ≤ b; pairs whose
    // diagonal slots are fully masked are identities 0 = 0 and are skipped.
    for a in 0..d {
        for b in a..d {
            let weights: Vec<(usize, usize, C64)> = (0..d)
                .map(|k| (a * d + k, b * d + k, C64::new(1.0, 0.0)))
                .collect();
            let (re, im) = blocks.weights_to_functionals(&weights);
            let target = if a == b { 1.0 } else { 0.0 };
            if re.coeffs.iter().any(Option::is_some) {
                p.equalities.push((re, target));
            }
            if a != b && im.coeffs.iter().any(Option::is_some) {
                p.equalities.push((im, 0.0));
            }
        }
    }

    // Catalyst return: Tr_S[E(ρs⊗ρc)] = ρc entrywise.
    if inst.exact_return {
        for pr in 0..dc {
            for qc in pr..dc {
                let mut weights = Vec::new();
                for a in 0..d {
                    for b in 0..d {
                        let w = x[(a, b)];
                        if w == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for s in 0..2 {
                            weights.push((a * d + s * dc + pr, b * d + s * dc + qc, w));
                        }
                    }
                }
                let (re, im) = blocks.weights_to_functionals(&weights);
                let target = inst.catalyst_state.mat()[(pr, qc)];
                p.equalities.push((re, target.re));
                if pr != qc {
                    p.equalities.push((im, target.im));
                }
            }
        }
    }

    // Objective: Re(e^{-iφ} ⟨0|ρ'_s|1⟩) with ρ'_s = Tr_C E(ρs⊗ρc).
    let mut weights = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let w = x[(a, b)];
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..dc {
                weights.push((a * d + c, b * d + dc + c, w));
            }
        }
    }
    let (re, im) = blocks.weights_to_functionals(&weights);
    let mut obj = LinearFunctional::zero(blocks.classes.len());
    for (v, c) in re.coeffs.iter().enumerate() {
        if let Some(c) = c {
            obj.add_trace_term(v, c, phi.cos());
        }
    }
    for (v, c) in im.coeffs.iter().enumerate() {
        if let Some(c) = c {
            obj.add_trace_term(v, c, phi.sin());
        }
    }
    p.objective = obj;
    p
}

/// Optimal TIO channel for a fixed instance, maximizing the output coherence
/// over a grid of objective phases (the default single phase φ=0 is optimal
/// whenever the data is real; a complex optimum triggers automatic
/// escalation to a 16-point grid).
pub fn optimal_tio_channel(
    inst: &CatalysisInstance,
    phase_grid: usize,
    opts: &SdpOptions,
) -> Result<CatalysisResult> {
    optimal_tio_channel_warm(inst, phase_grid, opts, None).map(|(r, _)| r)
}

/// [`optimal_tio_channel`] variant exposing solver warm-start state for
/// sweeps over nearby instances.
pub fn optimal_tio_channel_warm(
    inst: &CatalysisInstance,
    phase_grid: usize,
    opts: &SdpOptions,
    warm: Option<&WarmStart>,
) -> Result<(CatalysisResult, WarmStart)> {
    let grid = phase_grid.max(1);
    let blocks = BlockStructure::new(&inst.ctx);
    let mut best: Option<(f64, SdpSolution)> = None;
    for k in 0..grid {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / grid as f64;
        let mut o = opts.clone();
        if let (0, Some(w)) = (k, warm) {
            o.warm = Some(w.clone());
        }
        let sol = solve(&build_problem(inst, &blocks, phi), &o)?.require_optimal()?;
        if best.as_ref().is_none_or(|(v, _)| sol.objective_value > *v) {
            best = Some((sol.objective_value, sol));
        }
    }
    let (_, sol) = best.expect("grid is non-empty");

    let result = finish(inst, &blocks, sol)?;
    // Escalate when the optimum carries an unexpected complex phase.
    let c = result.0.system_out.coherence();
    if grid == 1 && c.im.abs() > 1e-6 * c.re.abs().max(1e-12) {
        return optimal_tio_channel_warm(inst, 16, opts, warm);
    }
    Ok(result)
}

fn finish(
    inst: &CatalysisInstance,
    blocks: &BlockStructure,
    sol: SdpSolution,
) -> Result<(CatalysisResult, WarmStart)> {
    let choi = blocks.assemble_choi(&sol.variable_values);
    let d = blocks.dim;
    let channel = QuantumChannel::from_choi_unchecked(choi, d, d)?;
    let joint = inst.system_state.tensor(&inst.catalyst_state);
    let out = channel.apply_mat(joint.mat());
    let tol = crate::tol::Tolerances::printed();
    let dc = inst.catalyst_dim();
    let system_out = DensityMatrix::new(
        crate::qcore::partial_trace(&out, 2, dc, Keep::A)?,
        &tol,
    )?;
    let catalyst_out = DensityMatrix::new(
        crate::qcore::partial_trace(&out, 2, dc, Keep::B)?,
        &tol,
    )?;
    let robustness_in = 2.0 * inst.system_state.coherence().norm();
    let robustness_out = 2.0 * system_out.coherence().norm();
    let diag = SolverDiag::from(&sol);
    Ok((
        CatalysisResult {
            channel,
            system_out,
            catalyst_out,
            increment: robustness_out - robustness_in,
            robustness_in,
            robustness_out,
            solver_diag: diag,
        },
        sol.warm,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Protocol;
    use crate::tio::{build_mask, is_tio, HamiltonianSpec};
    use approx::assert_relative_eq;

    fn qubit_ctx() -> TioContext {
        build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit())
    }

    fn main_instance() -> CatalysisInstance {
        let p = Protocol::main();
        CatalysisInstance::from_bloch(&p.system, &p.catalyst, qubit_ctx()).unwrap()
    }

    #[test]
    fn optimum_at_reference_states_is_certified_value() {
        // The hand-constructed reference channel achieves 0.09817 at these
        // states; the exact optimum of the channel SDP is a bit higher. The
        // expected value below was frozen from two independent formulations
        // (Bohr-block and full-Choi) agreeing to 1e-8 with duality gap < 1e-8.
        let res = optimal_tio_channel(&main_instance(), 1, &SdpOptions::default()).unwrap();
        assert_relative_eq!(res.increment, 0.101173, epsilon = 2e-4);
        assert!(res.increment > 0.098172 - 1e-6, "below the explicit-channel bound");
        // The channel is TIO by construction and CPTP within solver accuracy.
        let (ok, dev) = is_tio(&res.channel, &qubit_ctx(), 1e-8);
        assert!(ok, "deviation {dev}");
        let report = res.channel.cptp_report();
        assert!(report.min_choi_eigenvalue > -1e-6);
        assert!(report.tp_deviation < 1e-6);
        // Catalyst returned exactly (affine-feasible iterate).
        let inst = main_instance();
        assert!(res.catalyst_out.trace_distance(&inst.catalyst_state) < 1e-6);
    }

    #[test]
    fn reference_channel_reproduces_published_increment() {
        // Applying the published channel to the published states gives the
        // published numbers.
        let p = Protocol::main();
        let ch = crate::qcore::QuantumChannel::from_kraus(p.kraus.clone()).unwrap();
        let inst = main_instance();
        let joint = inst.system_state.tensor(&inst.catalyst_state);
        let out = ch.apply_mat(joint.mat());
        let sys = crate::qcore::partial_trace(&out, 2, 2, Keep::A).unwrap();
        let cat = crate::qcore::partial_trace(&out, 2, 2, Keep::B).unwrap();
        let delta = 2.0 * sys[(0, 1)].norm() - 2.0 * inst.system_state.coherence().norm();
        assert_relative_eq!(delta, 0.0982, epsilon = 5e-4);
        assert_relative_eq!(2.0 * sys[(0, 1)].re, 0.5314, epsilon = 2e-3);
        assert_relative_eq!(sys[(0, 0)].re - sys[(1, 1)].re, -0.3251, epsilon = 2e-3);
        assert!(cat.distance(inst.catalyst_state.mat()) < 1e-3);
    }

    #[test]
    fn maximally_coherent_system_cannot_improve() {
        let inst = CatalysisInstance::from_bloch(
            &BlochVector::new(1.0, 0.0, 0.0),
            &BlochVector::new(0.5710, 0.0, 0.2928),
            qubit_ctx(),
        )
        .unwrap();
        let res = optimal_tio_channel(&inst, 1, &SdpOptions::default()).unwrap();
        assert!(res.increment.abs() < 1e-6, "increment {}", res.increment);
        assert_relative_eq!(res.robustness_in, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn free_inputs_stay_free() {
        let inst = CatalysisInstance::from_bloch(
            &BlochVector::new(0.0, 0.0, -0.6),
            &BlochVector::new(0.0, 0.0, 0.3),
            qubit_ctx(),
        )
        .unwrap();
        let res = optimal_tio_channel(&inst, 1, &SdpOptions::default()).unwrap();
        assert!(res.robustness_out < 1e-6, "R_out {}", res.robustness_out);
        assert!(res.increment.abs() < 1e-6);
    }

    #[test]
    fn degenerate_hamiltonians_allow_full_amplification() {
        // All-ones mask: any channel is free. The constructive certificate
        // "discard S, prepare |+⟩, keep the catalyst marginal" is feasible,
        // so the optimum reaches R = 1.
        let ctx = TioContext::new(HamiltonianSpec::degenerate(4));
        let p = Protocol::main();
        let inst = CatalysisInstance::from_bloch(&p.system, &p.catalyst, ctx).unwrap();
        let rin = 2.0 * inst.system_state.coherence().norm();
        let res = optimal_tio_channel(&inst, 1, &SdpOptions::default()).unwrap();
        // Printed reference states overshoot purity by ~5e-5, which the
        // all-free optimum inherits.
        assert_relative_eq!(res.increment, 1.0 - rin, epsilon = 1e-4);
    }

    #[test]
    fn increment_never_negative_identity_feasible() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..5 {
            let s = BlochVector::new(rng.gen_range(0.0..0.8), 0.0, rng.gen_range(-0.8..0.0));
            let c = BlochVector::new(rng.gen_range(0.0..0.7), 0.0, rng.gen_range(-0.5..0.5));
            let inst = CatalysisInstance::from_bloch(&s, &c, qubit_ctx()).unwrap();
            let res = optimal_tio_channel(&inst, 1, &SdpOptions::default()).unwrap();
            assert!(res.increment >= -1e-8, "Δη = {}", res.increment);
            // Self-consistency: increment recomputed from the returned states.
            let recomputed = 2.0 * res.system_out.coherence().norm()
                - 2.0 * inst.system_state.coherence().norm();
            assert!((res.increment - recomputed).abs() < 1e-8);
        }
    }

    #[test]
    fn objective_phase_invariance_under_free_unitary() {
        // Rotating ρs by diag(1, e^{-iφ}) changes neither R nor Δη.
        let base = main_instance();
        let res0 = optimal_tio_channel(&base, 1, &SdpOptions::default()).unwrap();
        for phi in [0.7f64, 2.1, 3.9, 5.5] {
            let mut u = ComplexMatrix::identity(2);
            u[(1, 1)] = C64::from_polar(1.0, -phi);
            let rotated = &(&u * base.system_state.mat()) * &u.adjoint();
            let inst = CatalysisInstance::new(
                DensityMatrix::new(rotated, &crate::tol::Tolerances::printed()).unwrap(),
                base.catalyst_state.clone(),
                qubit_ctx(),
            )
            .unwrap();
            let res = optimal_tio_channel(&inst, 1, &SdpOptions::default()).unwrap();
            assert!(
                (res.increment - res0.increment).abs() < 1e-6,
                "phi={phi}: {} vs {}",
                res.increment,
                res0.increment
            );
        }
    }

    #[test]
    fn warm_start_agrees_with_cold() {
        let inst = main_instance();
        let (r1, warm) =
            optimal_tio_channel_warm(&inst, 1, &SdpOptions::default(), None).unwrap();
        let (r2, _) =
            optimal_tio_channel_warm(&inst, 1, &SdpOptions::default(), Some(&warm)).unwrap();
        assert!((r1.increment - r2.increment).abs() < 1e-7);
        assert!(r2.solver_diag.iterations <= r1.solver_diag.iterations);
    }
}
