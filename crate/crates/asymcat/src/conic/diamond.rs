//! Diamond norm of hermiticity-preserving maps.
//!
//! Uses the standard semidefinite program: for a map Φ with Choi matrix J,
//!
//! ```text
//! ‖Φ‖◇ = min ½‖Tr_out Y0‖∞ + ½‖Tr_out Y1‖∞
//!        s.t. [[Y0, −J], [−J†, Y1]] ⪰ 0
//! ```
//!
//! with the spectral-norm epigraphs `s·I − Tr_out Y ⪰ 0`. The value always
//! dominates the induced trace norm probed on pure inputs, which serves as an
//! independent lower-bound oracle in tests.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{solve, MatrixExpr, SdpOptions, SdpProblem, SdpSolution};
use crate::qcore::eig::trace_norm_hermitian;
use crate::qcore::{ComplexMatrix, QuantumChannel};
use crate::{Error, Result};

/// Which norm quantifies channel deviations. The diamond norm is the
/// operational choice; the trace norm of the (input-normalized) Choi matrix
/// is exposed for sensitivity analysis only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ChannelNormKind {
    Diamond,
    ChoiTraceNorm,
}

/// Diamond norm of a hermiticity-preserving map given as a channel object
/// (typically a difference of channels).
pub fn diamond_norm(map: &QuantumChannel, opts: &SdpOptions) -> Result<f64> {
    diamond_norm_choi(map.choi(), map.dim_in(), map.dim_out(), opts).map(|(v, _)| v)
}

/// Diamond norm from a Choi matrix, also returning the solver report.
pub fn diamond_norm_choi(
    choi: &ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
    opts: &SdpOptions,
) -> Result<(f64, SdpSolution)> {
    let n = dim_in * dim_out;
    if choi.rows() != n || !choi.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Choi must be {n}x{n}, got {}x{}",
            choi.rows(),
            choi.cols()
        )));
    }

    let mut p = SdpProblem::new(vec![
        ("y0".into(), n),
        ("y1".into(), n),
        ("s0".into(), 1),
        ("s1".into(), 1),
    ]);
    p.objective.add_trace_term(2, &ComplexMatrix::identity(1), -0.5);
    p.objective.add_trace_term(3, &ComplexMatrix::identity(1), -0.5);

    // Block constraint [[Y0, −J], [−J†, Y1]] ⪰ 0.
    let mut block = MatrixExpr::new(2 * n);
    for r in 0..n {
        for c in 0..n {
            block.constant[(r, n + c)] = -choi[(r, c)];
            block.constant[(n + r, c)] = -choi[(c, r)].conj();
            block.push(0, r, c, r, c, C64::new(1.0, 0.0));
            block.push(1, n + r, n + c, r, c, C64::new(1.0, 0.0));
        }
    }
    p.psd_constraints.push(block);

    // s·I − Tr_out Y ⪰ 0 for both blocks.
    for (var, s_var) in [(0usize, 2usize), (1, 3)] {
        let mut e = MatrixExpr::new(dim_in);
        for a in 0..dim_in {
            e.push(s_var, a, a, 0, 0, C64::new(1.0, 0.0));
            for b in 0..dim_in {
                for k in 0..dim_out {
                    e.push(var, a, b, a * dim_out + k, b * dim_out + k, C64::new(-1.0, 0.0));
                }
            }
        }
        p.psd_constraints.push(e);
    }

    let sol = solve(&p, opts)?.require_optimal()?;
    Ok(((-sol.objective_value).max(0.0), sol))
}

/// Channel-deviation size under the selected norm convention.
pub fn channel_norm(map: &QuantumChannel, kind: ChannelNormKind, opts: &SdpOptions) -> Result<f64> {
    match kind {
        ChannelNormKind::Diamond => diamond_norm(map, opts),
        ChannelNormKind::ChoiTraceNorm => {
            Ok(trace_norm_hermitian(map.choi()) / map.dim_in() as f64)
        }
    }
}

/// Lower bound on the diamond norm: `max_ψ ‖(Φ⊗id)(|ψ⟩⟨ψ|)‖₁` over `samples`
/// Haar-ish random pure inputs on the doubled space (plus the maximally
/// entangled state, which is the exact optimum surprisingly often).
pub fn induced_trace_norm_lower_bound(
    choi: &ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
    samples: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = apply_extended(choi, dim_in, dim_out, &max_entangled(dim_in));
    for _ in 0..samples {
        let mut psi: Vec<C64> = (0..dim_in * dim_in)
            .map(|_| {
                C64::new(
                    rng.sample(rand_distr::StandardNormal),
                    rng.sample(rand_distr::StandardNormal),
                )
            })
            .collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut psi {
            *z /= norm;
        }
        best = best.max(apply_extended(choi, dim_in, dim_out, &psi));
    }
    best
}

fn max_entangled(d: usize) -> Vec<C64> {
    let mut psi = vec![C64::new(0.0, 0.0); d * d];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        psi[i * d + i] = C64::new(amp, 0.0);
    }
    psi
}

/// ‖(Φ⊗id)(|ψ⟩⟨ψ|)‖₁ for |ψ⟩ on input⊗reference with the reference a copy of
/// the input space.
fn apply_extended(choi: &ComplexMatrix, dim_in: usize, dim_out: usize, psi: &[C64]) -> f64 {
    let dr = dim_in;
    let n = dim_out * dr;
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..dim_in {
        for b in 0..dim_in {
            for i in 0..dim_out {
                for k in 0..dim_out {
                    let j = choi[(a * dim_out + i, b * dim_out + k)];
                    if j == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for p in 0..dr {
                        for q in 0..dr {
                            out[(i * dr + p, k * dr + q)] +=
                                j * psi[a * dr + p] * psi[b * dr + q].conj();
                        }
                    }
                }
            }
        }
    }
    trace_norm_hermitian(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{kraus_to_choi, pauli_z};
    use approx::assert_relative_eq;

    fn opts() -> SdpOptions {
        SdpOptions::default()
    }

    #[test]
    fn zero_map_has_zero_norm() {
        let z = ComplexMatrix::zeros(4, 4);
        let (v, _) = diamond_norm_choi(&z, 2, 2, &opts()).unwrap();
        assert!(v < 1e-8);
    }

    #[test]
    fn identity_channel_has_norm_one() {
        let j = kraus_to_choi(&[ComplexMatrix::identity(2)]).unwrap();
        let (v, _) = diamond_norm_choi(&j, 2, 2, &opts()).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn unitary_difference_reaches_two() {
        // id − conjugation-by-σz: orthogonal images on equator states, so the
        // brute-force bound over pure inputs already reaches 2.
        let id = kraus_to_choi(&[ComplexMatrix::identity(2)]).unwrap();
        let zz = kraus_to_choi(&[pauli_z()]).unwrap();
        let diff = &id - &zz;
        let lower = induced_trace_norm_lower_bound(&diff, 2, 2, 200, 7);
        assert_relative_eq!(lower, 2.0, epsilon = 1e-9);
        let (v, _) = diamond_norm_choi(&diff, 2, 2, &opts()).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn dominates_sampled_lower_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for trial in 0..5 {
            // Random hermiticity-preserving map: difference of two random
            // channels.
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
                let raw: Vec<ComplexMatrix> = (0..2)
                    .map(|_| {
                        ComplexMatrix::from_fn(2, 2, |_, _| {
                            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        })
                    })
                    .collect();
                let mut gram = ComplexMatrix::zeros(2, 2);
                for k in &raw {
                    gram = &gram + &(&k.adjoint() * k);
                }
                let top = crate::qcore::hermitian_eig(&gram, &crate::tol::Tolerances::default())
                    .unwrap()
                    .0[0];
                let kraus: Vec<ComplexMatrix> =
                    raw.iter().map(|k| k.scale_re(1.0 / top.sqrt())).collect();
                kraus_to_choi(&kraus).unwrap()
            };
            let diff = &mk(&mut rng) - &mk(&mut rng);
            let (v, _) = diamond_norm_choi(&diff, 2, 2, &opts()).unwrap();
            let lower = induced_trace_norm_lower_bound(&diff, 2, 2, 500, 100 + trial);
            assert!(
                v >= lower - 1e-6,
                "diamond {v} below sampled lower bound {lower}"
            );
        }
    }

    #[test]
    fn triangle_inequality_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..3 {
            let rand_herm_choi = |rng: &mut rand_chacha::ChaCha8Rng| {
                ComplexMatrix::from_fn(4, 4, |_, _| {
                    C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
                })
                .hermitize()
            };
            let j1 = rand_herm_choi(&mut rng);
            let j2 = rand_herm_choi(&mut rng);
            let (v1, _) = diamond_norm_choi(&j1, 2, 2, &opts()).unwrap();
            let (v2, _) = diamond_norm_choi(&j2, 2, 2, &opts()).unwrap();
            let (v12, _) = diamond_norm_choi(&(&j1 + &j2), 2, 2, &opts()).unwrap();
            assert!(v12 <= v1 + v2 + 1e-6);
        }
    }
}
