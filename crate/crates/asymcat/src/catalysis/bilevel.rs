//! Bi-level search: quasi-Newton ascent over input states with the optimal
//! channel SDP as the inner objective.
//!
//! Outer variables are the polar angle of the pure system state (its Bloch
//! vector confined to the xz-plane; free unitaries remove the y component
//! without changing the achievable increment) and the catalyst's (x, z) Bloch
//! components. Gradients come from central finite differences (h = 1e-4)
//! feeding a BFGS ascent with Armijo backtracking and projection onto the
//! Bloch disc; multi-starts are seeded deterministically and merged by a
//! fixed tie-break.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{optimal_tio_channel_warm, CatalysisInstance, CatalysisResult};
use crate::conic::{SdpOptions, WarmStart};
use crate::qcore::BlochVector;
use crate::tio::TioContext;
use crate::{Error, Result};

/// Hyperparameters of the outer optimizer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchSettings {
    /// Central-difference step.
    pub fd_step: f64,
    /// Armijo sufficient-increase constant.
    pub armijo_c: f64,
    /// Outer iteration cap.
    pub max_iterations: usize,
    /// Stop when the gradient infinity-norm falls below this.
    pub grad_tol: f64,
    /// Inner solver residual tolerance.
    pub inner_tol: f64,
    /// Objective phase grid of the inner solve.
    pub phase_grid: usize,
    /// Keep the catalyst strictly inside the Bloch disc by this margin.
    pub disc_margin: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            fd_step: 1e-4,
            armijo_c: 1e-4,
            max_iterations: 200,
            grad_tol: 1e-5,
            inner_tol: 1e-8,
            phase_grid: 1,
            disc_margin: 1e-6,
        }
    }
}

/// Per-iteration record of one start.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub params: Vec<f64>,
    pub objective: f64,
    pub grad_norm: f64,
}

/// Full record of one start.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub start_index: usize,
    pub initial_params: Vec<f64>,
    pub steps: Vec<TraceStep>,
    pub converged: bool,
    pub error: Option<String>,
}

/// Outcome of a multi-start search.
#[derive(Debug)]
pub struct BilevelOutcome {
    pub best: CatalysisResult,
    pub best_system: BlochVector,
    pub best_catalyst: BlochVector,
    pub best_start: usize,
    pub traces: Vec<OptimizerTrace>,
}

/// Parameter space of the outer problem.
#[derive(Clone, Copy)]
enum Outer {
    /// (θ, x_c, z_c): pure system state at polar angle θ plus catalyst.
    Full,
    /// (x_c, z_c) with the system state fixed.
    CatalystOnly(BlochVector),
}

impl Outer {
    fn dim(&self) -> usize {
        match self {
            Outer::Full => 3,
            Outer::CatalystOnly(_) => 2,
        }
    }

    fn states(&self, p: &[f64]) -> (BlochVector, BlochVector) {
        match self {
            Outer::Full => (
                BlochVector::pure_xz(p[0]),
                BlochVector::new(p[1], 0.0, p[2]),
            ),
            Outer::CatalystOnly(s) => (*s, BlochVector::new(p[0], 0.0, p[1])),
        }
    }

    /// Clamp parameters into the feasible box/disc.
    fn project(&self, p: &mut [f64], margin: f64) {
        let (xi, zi, theta) = match self {
            Outer::Full => (1, 2, true),
            Outer::CatalystOnly(_) => (0, 1, false),
        };
        if theta {
            p[0] = p[0].clamp(0.0, std::f64::consts::PI);
        }
        let r = (p[xi] * p[xi] + p[zi] * p[zi]).sqrt();
        let rmax = 1.0 - margin;
        if r > rmax {
            p[xi] *= rmax / r;
            p[zi] *= rmax / r;
        }
    }
}

struct Evaluator<'a> {
    ctx: &'a TioContext,
    outer: Outer,
    settings: &'a SearchSettings,
    warm: Option<WarmStart>,
    evals: usize,
}

impl Evaluator<'_> {
    fn objective(&mut self, p: &[f64]) -> Result<(f64, Option<CatalysisResult>)> {
        let (s, c) = self.outer.states(p);
        let inst = CatalysisInstance::from_bloch(&s, &c, self.ctx.clone())?;
        let opts = SdpOptions {
            tol: self.settings.inner_tol,
            gap_tol: (self.settings.inner_tol * 10.0).max(1e-7),
            ..SdpOptions::default()
        };
        let (res, warm) =
            optimal_tio_channel_warm(&inst, self.settings.phase_grid, &opts, self.warm.as_ref())?;
        self.warm = Some(warm);
        self.evals += 1;
        Ok((res.increment, Some(res)))
    }

    fn value(&mut self, p: &[f64]) -> Result<f64> {
        self.objective(p).map(|(v, _)| v)
    }

    fn gradient(&mut self, p: &[f64]) -> Result<Vec<f64>> {
        let h = self.settings.fd_step;
        let mut g = vec![0.0; p.len()];
        for i in 0..p.len() {
            let mut plus = p.to_vec();
            let mut minus = p.to_vec();
            plus[i] += h;
            minus[i] -= h;
            self.outer.project(&mut plus, self.settings.disc_margin);
            self.outer.project(&mut minus, self.settings.disc_margin);
            let denom = plus[i] - minus[i];
            if denom.abs() < 1e-12 {
                g[i] = 0.0;
                continue;
            }
            g[i] = (self.value(&plus)? - self.value(&minus)?) / denom;
        }
        Ok(g)
    }
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// BFGS ascent from one start; returns the trace plus the best point found.
fn run_start(
    ctx: &TioContext,
    outer: Outer,
    start_index: usize,
    mut p: Vec<f64>,
    settings: &SearchSettings,
) -> (OptimizerTrace, Option<(Vec<f64>, f64)>) {
    let mut trace = OptimizerTrace {
        start_index,
        initial_params: p.clone(),
        steps: Vec::new(),
        converged: false,
        error: None,
    };
    let mut ev = Evaluator {
        ctx,
        outer,
        settings,
        warm: None,
        evals: 0,
    };
    let n = outer.dim();
    outer.project(&mut p, settings.disc_margin);

    let mut f = match ev.value(&p) {
        Ok(v) => v,
        Err(e) => {
            trace.error = Some(e.to_string());
            return (trace, None);
        }
    };
    let mut g = match ev.gradient(&p) {
        Ok(g) => g,
        Err(e) => {
            trace.error = Some(e.to_string());
            return (trace, None);
        }
    };
    // Inverse Hessian estimate.
    let mut h_inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for it in 0..settings.max_iterations {
        let gnorm = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        trace.steps.push(TraceStep {
            iteration: it,
            params: p.clone(),
            objective: f,
            grad_norm: gnorm,
        });
        if gnorm < settings.grad_tol {
            trace.converged = true;
            break;
        }

        let mut dir = mat_vec(&h_inv, &g);
        let dd: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
        if dd <= 0.0 {
            // Not an ascent direction; reset to steepest ascent.
            dir = g.clone();
            h_inv = (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
        }
        let slope: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();

        // Backtracking line search with projection.
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let mut cand: Vec<f64> = p.iter().zip(&dir).map(|(x, d)| x + alpha * d).collect();
            outer.project(&mut cand, settings.disc_margin);
            match ev.value(&cand) {
                Ok(fc) if fc >= f + settings.armijo_c * alpha * slope => {
                    accepted = Some((cand, fc));
                    break;
                }
                Ok(_) => alpha *= 0.5,
                Err(e) => {
                    trace.error = Some(e.to_string());
                    alpha *= 0.5;
                }
            }
            if alpha < 1e-10 {
                break;
            }
        }
        let Some((p_new, f_new)) = accepted else {
            trace.converged = true; // no ascent possible along this direction
            break;
        };

        let g_new = match ev.gradient(&p_new) {
            Ok(g) => g,
            Err(e) => {
                trace.error = Some(e.to_string());
                break;
            }
        };

        // BFGS update of the inverse Hessian (ascent convention: work on -f).
        let s: Vec<f64> = p_new.iter().zip(&p).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g.iter().zip(&g_new).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let rho = 1.0 / sy;
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let hy = mat_vec(&h_inv, &y);
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h_inv[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + rho * rho * yhy * s[i] * s[j]
                        + rho * s[i] * s[j];
                }
            }
        }
        p = p_new;
        f = f_new;
        g = g_new;
    }

    if trace.steps.is_empty() {
        trace.steps.push(TraceStep {
            iteration: 0,
            params: p.clone(),
            objective: f,
            grad_norm: f64::NAN,
        });
    }
    (trace, Some((p, f)))
}

fn seeded_starts(outer: Outer, starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..starts)
        .map(|_| {
            let catalyst = {
                let r = rng.gen_range(0.0f64..1.0).sqrt() * 0.95;
                let ang = rng.gen_range(0.0..std::f64::consts::TAU);
                (r * ang.cos(), r * ang.sin())
            };
            match outer {
                Outer::Full => vec![
                    rng.gen_range(0.05..std::f64::consts::FRAC_PI_2 * 1.9),
                    catalyst.0,
                    catalyst.1,
                ],
                Outer::CatalystOnly(_) => vec![catalyst.0, catalyst.1],
            }
        })
        .collect()
}

fn search(
    ctx: &TioContext,
    outer: Outer,
    starts: usize,
    seed: u64,
    settings: &SearchSettings,
) -> Result<BilevelOutcome> {
    if starts == 0 {
        return Err(Error::BadProblem("need at least one start".into()));
    }
    let inits = seeded_starts(outer, starts, seed);
    let runs = crate::par::map_par(starts, |i| {
        run_start(ctx, outer, i, inits[i].clone(), settings)
    });

    // Deterministic tie-break: objective, then solver residual, then index.
    let mut best: Option<(usize, Vec<f64>, f64, CatalysisResult)> = None;
    let mut traces = Vec::with_capacity(starts);
    for (i, (trace, found)) in runs.into_iter().enumerate() {
        traces.push(trace);
        let Some((p, f)) = found else { continue };
        let (s, c) = outer.states(&p);
        let inst = CatalysisInstance::from_bloch(&s, &c, ctx.clone())?;
        let opts = SdpOptions {
            tol: settings.inner_tol,
            ..SdpOptions::default()
        };
        let (res, _) = optimal_tio_channel_warm(&inst, settings.phase_grid, &opts, None)?;
        let better = match &best {
            None => true,
            Some((bi, _, bf, bres)) => {
                f > *bf + 1e-12
                    || ((f - *bf).abs() <= 1e-12
                        && (res.solver_diag.primal_residual, i)
                            < (bres.solver_diag.primal_residual, *bi))
            }
        };
        if better {
            best = Some((i, p, f, res));
        }
    }
    let (best_start, p, _, best) = best.ok_or_else(|| {
        Error::OptimizationFailed(format!(
            "all {starts} starts failed: {:?}",
            traces.iter().filter_map(|t| t.error.clone()).collect::<Vec<_>>()
        ))
    })?;
    let (best_system, best_catalyst) = outer.states(&p);
    Ok(BilevelOutcome {
        best,
        best_system,
        best_catalyst,
        best_start,
        traces,
    })
}

/// Multi-start bi-level search over pure system states and qubit catalysts.
pub fn bilevel_search(
    ctx: &TioContext,
    catalyst_dim: usize,
    starts: usize,
    seed: u64,
    settings: &SearchSettings,
) -> Result<BilevelOutcome> {
    if catalyst_dim != 2 {
        return Err(Error::BadProblem(
            "only qubit catalysts are supported".into(),
        ));
    }
    search(ctx, Outer::Full, starts, seed, settings)
}

/// Catalyst-only BFGS ascent from one explicit start; used by the scans for
/// continuation. Returns the final parameters and objective when the start
/// produced any evaluation at all.
pub(crate) fn run_start_public(
    ctx: &TioContext,
    system: BlochVector,
    start_index: usize,
    init: Vec<f64>,
    settings: &SearchSettings,
) -> Option<(Vec<f64>, f64)> {
    let (_, found) = run_start(ctx, Outer::CatalystOnly(system), start_index, init, settings);
    found
}

/// Catalyst-only optimization for a fixed system state.
pub fn optimize_catalyst(
    ctx: &TioContext,
    system: BlochVector,
    starts: usize,
    seed: u64,
    settings: &SearchSettings,
) -> Result<BilevelOutcome> {
    search(ctx, Outer::CatalystOnly(system), starts, seed, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Protocol;
    use crate::tio::{build_mask, HamiltonianSpec};

    fn ctx() -> TioContext {
        build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit())
    }

    #[test]
    fn stationary_at_reference_optimum() {
        // A single start at the reference states stays there.
        let p = Protocol::main();
        let settings = SearchSettings::default();
        let theta = p.system.x.atan2(p.system.z);
        let outcome = {
            let outer = Outer::Full;
            let (trace, found) = run_start(
                &ctx(),
                outer,
                0,
                vec![theta, p.catalyst.x, p.catalyst.z],
                &settings,
            );
            assert!(trace.error.is_none(), "{:?}", trace.error);
            found.unwrap()
        };
        // The ascent must not fall below the SDP optimum at the starting
        // states (0.101173, dual-route certified) minus slack.
        assert!(outcome.1 > 0.1005, "objective {} after polish", outcome.1);
    }

    #[test]
    fn catalyst_search_beats_fixed_reference() {
        // With the system fixed at the reference state, optimizing the
        // catalyst must find at least the reference increment.
        let p = Protocol::main();
        let settings = SearchSettings::default();
        let out = optimize_catalyst(&ctx(), p.system, 4, 11, &settings).unwrap();
        assert!(out.best.increment > 0.0982 - 5e-4, "got {}", out.best.increment);
    }
}
