//! Translationally invariant operations: Bohr-frequency masks, membership
//! tests, projections, and the qubit reachability conditions.
//!
//! A channel commutes with the time translations generated by H exactly when
//! its Choi matrix is supported on entries whose input and output Bohr
//! frequencies match: entry ((a,i),(b,k)) survives iff `E_a − E_i = E_b − E_k`
//! (equivalently `E_a − E_b = E_i − E_k`). The 0/1 matrix of surviving
//! positions is the mask M, and membership is `J = J ⊙ M`.

use num_complex::Complex64 as C64;

use crate::conic::nearest_cptp;
use crate::qcore::{ComplexMatrix, QuantumChannel};
use crate::tol::Tolerances;
use crate::{Error, Result};

/// Energy of each basis state of one subsystem, in a fixed arbitrary quantum.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub energies: Vec<f64>,
}

impl HamiltonianSpec {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::BadProblem("energies must be finite and non-empty".into()));
        }
        Ok(Self { energies })
    }

    /// The default nondegenerate qubit spectrum (0, 1).
    pub fn qubit() -> Self {
        Self { energies: vec![0.0, 1.0] }
    }

    /// Fully degenerate spectrum, making every channel free.
    pub fn degenerate(dim: usize) -> Self {
        Self { energies: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Composite spectrum with energies added pairwise, self-major indexing.
    pub fn compose(&self, other: &HamiltonianSpec) -> HamiltonianSpec {
        let mut energies = Vec::with_capacity(self.dim() * other.dim());
        for &ea in &self.energies {
            for &eb in &other.energies {
                energies.push(ea + eb);
            }
        }
        HamiltonianSpec { energies }
    }
}

/// Hamiltonian of the composite plus the derived Choi-support mask.
#[derive(Debug, Clone)]
pub struct TioContext {
    pub h_total: HamiltonianSpec,
    pub mask: ComplexMatrix,
}

impl TioContext {
    /// Context for a single system with the given spectrum.
    pub fn new(h_total: HamiltonianSpec) -> Self {
        let mask = bohr_mask(&h_total.energies);
        Self { h_total, mask }
    }

    pub fn dim(&self) -> usize {
        self.h_total.dim()
    }

    /// Partition of the index pairs (a, i) into Bohr-frequency classes; the
    /// masked Choi matrix is block-diagonal over these classes.
    pub fn bohr_classes(&self) -> Vec<Vec<(usize, usize)>> {
        let e = &self.h_total.energies;
        let d = e.len();
        let mut classes: Vec<(f64, Vec<(usize, usize)>)> = Vec::new();
        for a in 0..d {
            for i in 0..d {
                let omega = e[a] - e[i];
                match classes
                    .iter_mut()
                    .find(|(w, _)| (*w - omega).abs() <= 1e-12)
                {
                    Some((_, members)) => members.push((a, i)),
                    None => classes.push((omega, vec![(a, i)])),
                }
            }
        }
        // Deterministic order: descending Bohr frequency.
        classes.sort_by(|(w1, _), (w2, _)| w2.total_cmp(w1));
        classes.into_iter().map(|(_, members)| members).collect()
    }
}

/// Mask over Choi positions: entry ((a,i),(b,k)) is 1 iff E_a − E_i = E_b − E_k.
fn bohr_mask(energies: &[f64]) -> ComplexMatrix {
    let d = energies.len();
    let n = d * d;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, i) = (r / d, r % d);
        let (b, k) = (c / d, c % d);
        let lhs = energies[a] - energies[i];
        let rhs = energies[b] - energies[k];
        if (lhs - rhs).abs() <= 1e-12 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Build the TIO context of a system⊗catalyst composite.
pub fn build_mask(hs: &HamiltonianSpec, hc: &HamiltonianSpec) -> TioContext {
    TioContext::new(hs.compose(hc))
}

/// TIO membership: deviation ‖J − J⊙M‖_F and the verdict at tolerance `tol`.
pub fn is_tio(ch: &QuantumChannel, ctx: &TioContext, tol: f64) -> (bool, f64) {
    let masked = ch.choi().hadamard(&ctx.mask);
    let deviation = ch.choi().distance(&masked);
    (deviation <= tol, deviation)
}

/// Project a channel onto the TIO set by masking its Choi matrix.
///
/// Masking preserves trace preservation exactly and positivity for exactly
/// CPTP inputs (verified numerically, not assumed). When the masked Choi of a
/// noisy measured channel fails positivity by more than `tol.choi` scaled to
/// 1e-6, the nearest CPTP masked channel is returned instead.
pub fn tio_projection(ch: &QuantumChannel, ctx: &TioContext, tol: &Tolerances) -> Result<QuantumChannel> {
    let masked = ch.choi().hadamard(&ctx.mask);
    let candidate = QuantumChannel::from_choi_unchecked(masked.clone(), ch.dim_in(), ch.dim_out())?;
    // Masking preserves trace preservation exactly, so only a positivity
    // failure (possible for measured data) triggers the repair path.
    let report = candidate.cptp_report();
    if report.min_choi_eigenvalue > -1e-6 {
        return Ok(candidate);
    }
    let repaired = nearest_cptp(
        &masked,
        ch.dim_in(),
        ch.dim_out(),
        Some(&ctx.mask),
        tol.choi,
        20_000,
    )?;
    QuantumChannel::from_choi_unchecked(repaired, ch.dim_in(), ch.dim_out())
}

/// The raw masked map J⊙M as a hermiticity-preserving channel, without any
/// positivity repair. This is the reference point for deviation-from-TIO
/// error bounds.
pub fn tio_masked_map(ch: &QuantumChannel, ctx: &TioContext) -> Result<QuantumChannel> {
    QuantumChannel::hermiticity_preserving(
        ch.choi().hadamard(&ctx.mask),
        ch.dim_in(),
        ch.dim_out(),
    )
}

fn pole_ratio(num: f64, den: f64) -> Option<f64> {
    // √(num/den) with the z = ±1 pole handled as a limit: both zero means
    // the factor is absent; a positive numerator over a zero denominator is
    // an infinite requirement.
    if den > 1e-12 {
        Some((num.max(0.0) / den).sqrt())
    } else if num <= 1e-12 {
        None
    } else {
        Some(f64::INFINITY)
    }
}

/// Largest of the two population-ratio factors √((1∓z_from)/(1∓z_to)).
fn ratio_factor(z_from: f64, z_to: f64) -> Option<f64> {
    let r1 = pole_ratio(1.0 - z_from, 1.0 - z_to);
    let r2 = pole_ratio(1.0 + z_from, 1.0 + z_to);
    match (r1, r2) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

/// Whether a TIO can turn the qubit state `from` into `to`:
/// √(x²+y²)·max{√((1−z')/(1−z)), √((1+z')/(1+z))} ≤ √(x'²+y'²) − margin,
/// with primes on the `from` side.
pub fn qubit_tio_reachable(
    from: &crate::qcore::BlochVector,
    to: &crate::qcore::BlochVector,
    margin: f64,
) -> bool {
    let target_coherence = to.coherence();
    let source_coherence = from.coherence();
    match ratio_factor(from.z, to.z) {
        None => target_coherence <= source_coherence - margin,
        Some(f) => {
            if f.is_infinite() {
                // factor only matters if the target carries coherence
                target_coherence <= 1e-12 && 0.0 <= source_coherence - margin
            } else {
                target_coherence * f <= source_coherence - margin
            }
        }
    }
}

/// The printed sufficient condition guarding against catalyst embezzlement:
/// lhs ≤ |x'| − ε_C, with (x,y,z) the catalyst input and primes its output.
/// Deliberately stricter than [`qubit_tio_reachable`] (|x'| instead of
/// √(x'²+y'²)).
pub fn constraint_eq8(
    catalyst_in: &crate::qcore::BlochVector,
    catalyst_out: &crate::qcore::BlochVector,
    epsilon_c: f64,
) -> (bool, f64, f64) {
    let rhs = catalyst_out.x.abs() - epsilon_c;
    let lhs = match ratio_factor(catalyst_out.z, catalyst_in.z) {
        None => catalyst_in.coherence(),
        Some(f) => {
            if f.is_infinite() {
                if catalyst_in.coherence() <= 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                catalyst_in.coherence() * f
            }
        }
    };
    (lhs <= rhs, lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::Protocol;
    use crate::qcore::{pauli_x, tensor, BlochVector, QuantumChannel};
    use approx::assert_relative_eq;

    /// The two-qubit mask in its printed block form.
    fn reference_mask() -> ComplexMatrix {
        let m0 = [
            [1, 0, 0, 0],
            [0, 1, 1, 0],
            [0, 1, 1, 0],
            [0, 0, 0, 1],
        ];
        let m1 = [
            [0, 1, 1, 0],
            [0, 0, 0, 1],
            [0, 0, 0, 1],
            [0, 0, 0, 0],
        ];
        let m2 = [
            [0, 0, 0, 1],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
        ];
        let t = |m: &[[i32; 4]; 4]| -> [[i32; 4]; 4] {
            let mut out = [[0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    out[i][j] = m[j][i];
                }
            }
            out
        };
        let m1t = t(&m1);
        let m2t = t(&m2);
        let blocks: [[&[[i32; 4]; 4]; 4]; 4] = [
            [&m0, &m1, &m1, &m2],
            [&m1t, &m0, &m0, &m1],
            [&m1t, &m0, &m0, &m1],
            [&m2t, &m1t, &m1t, &m0],
        ];
        ComplexMatrix::from_fn(16, 16, |r, c| {
            let v = blocks[r / 4][c / 4][r % 4][c % 4];
            C64::new(v as f64, 0.0)
        })
    }

    #[test]
    fn two_qubit_mask_matches_block_form_exactly() {
        let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
        let reference = reference_mask();
        for r in 0..16 {
            for c in 0..16 {
                assert_eq!(
                    ctx.mask[(r, c)].re,
                    reference[(r, c)].re,
                    "mask mismatch at ({r},{c})"
                );
            }
        }
    }

    #[test]
    fn single_qubit_mask_is_phase_covariant() {
        let ctx = TioContext::new(HamiltonianSpec::qubit());
        // Allowed: diagonal of each diagonal block plus the |0><1| slots.
        let expect = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (a, i) = (r / 2, r % 2);
            let (b, k) = (c / 2, c % 2);
            let allowed = (a as i32 - i as i32) == (b as i32 - k as i32);
            C64::new(if allowed { 1.0 } else { 0.0 }, 0.0)
        });
        assert!(ctx.mask.distance(&expect) < 1e-15);
        // The off-diagonal block (a=0,b=1) keeps exactly the (i=0,k=1) slot.
        assert_eq!(ctx.mask[(0 * 2 + 0, 1 * 2 + 1)].re, 1.0);
        assert_eq!(ctx.mask[(0 * 2 + 1, 1 * 2 + 0)].re, 0.0);
    }

    #[test]
    fn degenerate_spectrum_allows_everything() {
        let ctx = TioContext::new(HamiltonianSpec::degenerate(2));
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(ctx.mask[(r, c)].re, 1.0);
            }
        }
    }

    #[test]
    fn bohr_classes_partition_and_match_mask() {
        let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
        let classes = ctx.bohr_classes();
        let sizes: Vec<usize> = classes.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 16);
        assert_eq!(sizes, vec![1, 4, 6, 4, 1]);
        // Mask support = same-class pairs.
        let d = 4;
        let class_of = |a: usize, i: usize| -> usize {
            classes
                .iter()
                .position(|cl| cl.contains(&(a, i)))
                .unwrap()
        };
        for r in 0..16 {
            for c in 0..16 {
                let same = class_of(r / d, r % d) == class_of(c / d, c % d);
                assert_eq!(ctx.mask[(r, c)].re > 0.5, same);
            }
        }
    }

    #[test]
    fn ideal_channel_is_tio_exactly() {
        let ch = QuantumChannel::from_kraus(Protocol::main().kraus).unwrap();
        let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
        let (ok, dev) = is_tio(&ch, &ctx, 1e-12);
        assert!(ok, "deviation {dev}");
        assert!(dev < 1e-12);
    }

    #[test]
    fn identity_channel_is_tio() {
        let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
        let (ok, dev) = is_tio(&QuantumChannel::identity(4), &ctx, 1e-12);
        assert!(ok);
        assert!(dev < 1e-15);
    }

    #[test]
    fn hadamard_conjugation_is_not_tio() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::from_real_rows(&[&[inv, inv], &[inv, -inv]]);
        let u = tensor(&h, &ComplexMatrix::identity(2));
        let ch = QuantumChannel::unitary(&u).unwrap();
        let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
        let (ok, dev) = is_tio(&ch, &ctx, 1e-9);
        assert!(!ok);
        assert!(dev > 0.1);
    }

    #[test]
    fn projection_is_idempotent_and_fixes_ideal() {
        let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
        let tol = Tolerances::default();
        let ch = QuantumChannel::from_kraus(Protocol::main().kraus).unwrap();
        let proj = tio_projection(&ch, &ctx, &tol).unwrap();
        assert!(proj.choi().distance(ch.choi()) < 1e-12);

        // A noisy non-TIO channel projects to a TIO fixed point.
        let noisy = QuantumChannel::unitary(&tensor(&pauli_x(), &ComplexMatrix::identity(2)))
            .unwrap();
        let mix = QuantumChannel::from_choi_unchecked(
            &ch.choi().scale_re(0.9) + &noisy.choi().scale_re(0.1),
            4,
            4,
        )
        .unwrap();
        let p1 = tio_projection(&mix, &ctx, &tol).unwrap();
        let (ok, dev) = is_tio(&p1, &ctx, 1e-12);
        assert!(ok, "projected deviation {dev}");
        let p2 = tio_projection(&p1, &ctx, &tol).unwrap();
        assert!(p1.choi().distance(p2.choi()) < 1e-10);
    }

    #[test]
    fn reachability_examples() {
        // Any state reaches a diagonal target.
        assert!(qubit_tio_reachable(
            &BlochVector::new(0.3, 0.1, -0.4),
            &BlochVector::new(0.0, 0.0, 0.7),
            0.0
        ));
        // Coherence cannot grow for free.
        assert!(!qubit_tio_reachable(
            &BlochVector::new(0.1, 0.0, 0.0),
            &BlochVector::new(0.5, 0.0, 0.0),
            0.0
        ));
        // Measured catalyst return: evaluates to lhs ≈ 0.4405 ≤ 0.4801.
        let from = BlochVector::new(0.4800, -0.0140, 0.2776);
        let to = BlochVector::new(0.4363, -0.0072, 0.2912);
        assert!(qubit_tio_reachable(&from, &to, 0.0));
        let f = ratio_factor(from.z, to.z).unwrap();
        assert_relative_eq!(to.coherence() * f, 0.4405, epsilon = 2e-4);
        assert_relative_eq!(from.coherence(), 0.4801, epsilon = 2e-4);
    }

    #[test]
    fn reachability_is_reflexive() {
        let states = [
            BlochVector::new(0.3, 0.2, 0.5),
            BlochVector::new(0.0, 0.0, 1.0),
            BlochVector::new(0.9, 0.0, 0.0),
        ];
        for s in states {
            assert!(qubit_tio_reachable(&s, &s, 0.0), "{s:?}");
        }
    }

    #[test]
    fn reachability_is_transitive_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
        let mut sample = || loop {
            let b = BlochVector::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if b.norm() < 0.999 {
                return b;
            }
        };
        let mut checked = 0;
        for _ in 0..2000 {
            let (a, b, c) = (sample(), sample(), sample());
            if qubit_tio_reachable(&a, &b, 0.0) && qubit_tio_reachable(&b, &c, 0.0) {
                checked += 1;
                assert!(
                    qubit_tio_reachable(&a, &c, 1e-12),
                    "transitivity fails: {a:?} -> {b:?} -> {c:?}"
                );
            }
        }
        assert!(checked > 10, "too few transitive triples sampled");
    }

    #[test]
    fn constraint_examples() {
        // Measured values with ε_C = 0.0073.
        let cin = BlochVector::new(0.4363, -0.0072, 0.2912);
        let cout = BlochVector::new(0.4800, -0.0140, 0.2776);
        let (ok, lhs, rhs) = constraint_eq8(&cin, &cout, 0.0073);
        assert!(ok);
        assert_relative_eq!(lhs, 0.4405, epsilon = 2e-4);
        assert_relative_eq!(rhs, 0.4727, epsilon = 2e-4);

        // Exact return with ε_C = 0 sits on the boundary (y = 0 states).
        let c = BlochVector::new(0.5710, 0.0, 0.2928);
        let (ok, lhs, rhs) = constraint_eq8(&c, &c, 0.0);
        assert!(ok);
        assert_relative_eq!(lhs, rhs, epsilon = 1e-12);

        // A huge ε_C kills it.
        let (ok, _, _) = constraint_eq8(&cin, &cout, 0.5);
        assert!(!ok);
    }
}
