// debug probe: independent cross-checks (not part of the deliverable)
use asymcat::conic::*;
use asymcat::protocols::Protocol;
use asymcat::qcore::*;
use asymcat::tio::*;
use num_complex::Complex64 as C64;

fn main() {
    let p = Protocol::main();
    let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
    let rho_s = bloch_to_density(&p.system).unwrap();
    let rho_c = bloch_to_density(&p.catalyst).unwrap();
    let x = rho_s.tensor(&rho_c);

    // Full 16x16 Choi variable, mask as equality constraints — independent
    // of the Bohr-block formulation.
    let mut prob = SdpProblem::new(vec![("J".into(), 16)]);
    prob.psd_constraints.push(MatrixExpr::variable(0, 16));
    // mask zeros
    for r in 0..16 {
        for c in r..16 {
            if ctx.mask[(r, c)].re < 0.5 {
                prob.equalities.push((LinearFunctional::re_entry(1, 16, 0, r, c), 0.0));
                if r != c { prob.equalities.push((LinearFunctional::im_entry(1, 16, 0, r, c), 0.0)); }
            }
        }
    }
    // TP
    for a in 0..4 {
        for b in a..4 {
            let mut re = LinearFunctional::zero(1);
            let mut im = LinearFunctional::zero(1);
            let mut w = ComplexMatrix::zeros(16, 16);
            for k in 0..4 { w[(b*4+k, a*4+k)] = C64::new(1.0, 0.0); }
            re.add_trace_term(0, &w, 1.0);
            let wi = w.scale(C64::new(0.0, -1.0));
            im.add_trace_term(0, &wi, 1.0);
            prob.equalities.push((re, if a == b { 1.0 } else { 0.0 }));
            if a != b { prob.equalities.push((im, 0.0)); }
        }
    }
    // catalyst return: Tr_S[E(X)][p,q] = rho_c[p,q]
    for pp in 0..2 {
        for q in pp..2 {
            let mut w = ComplexMatrix::zeros(16, 16);
            for a in 0..4 { for b in 0..4 {
                let xv = x.mat()[(a,b)];
                for s in 0..2 {
                    // coefficient of J[(a, s*2+pp), (b, s*2+q)] is xv: Tr(W J) with W[(col),(row)] = coeff
                    w[(b*4 + s*2 + q, a*4 + s*2 + pp)] += xv;
                }
            }}
            let mut re = LinearFunctional::zero(1);
            re.add_trace_term(0, &w, 1.0);
            let mut im = LinearFunctional::zero(1);
            im.add_trace_term(0, &w.scale(C64::new(0.0, -1.0)), 1.0);
            let target = rho_c.mat()[(pp, q)];
            prob.equalities.push((re, target.re));
            if pp != q { prob.equalities.push((im, target.im)); }
        }
    }
    // objective Re rho'_s[0,1]
    let mut w = ComplexMatrix::zeros(16, 16);
    for a in 0..4 { for b in 0..4 {
        let xv = x.mat()[(a,b)];
        for c in 0..2 {
            w[(b*4 + 2 + c, a*4 + c)] += xv;
        }
    }}
    prob.objective.add_trace_term(0, &w, 1.0);

    let sol = solve(&prob, &SdpOptions::default()).unwrap();
    println!("full-choi status {:?}, objective {:.8} -> delta = {:.6}", sol.status, sol.objective_value, 2.0*sol.objective_value - 0.4333);
    println!("residuals p {:.2e} d {:.2e} gap {:.2e} iters {}", sol.primal_residual, sol.dual_residual, sol.gap, sol.iterations);

    // Covariance check of the mask definition: a channel passing is_tio must
    // commute with time translations; test on the ideal channel.
    let ch = QuantumChannel::from_kraus(p.kraus.clone()).unwrap();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let energies = [0.0, 1.0, 1.0, 2.0];
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let t: f64 = rng.gen_range(-3.0..3.0);
        let u = ComplexMatrix::from_fn(4, 4, |i, j| if i == j { C64::from_polar(1.0, -energies[i]*t) } else { C64::new(0.0,0.0) });
        let rho = {
            let m = ComplexMatrix::from_fn(4, 4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let h = &m * &m.adjoint();
            let tr = h.trace().re;
            h.scale_re(1.0/tr)
        };
        let lhs = ch.apply_mat(&(&(&u * &rho) * &u.adjoint()));
        let rhs = &(&u * &ch.apply_mat(&rho)) * &u.adjoint();
        worst = worst.max(lhs.distance(&rhs));
    }
    println!("covariance worst deviation (ideal channel): {:.3e}", worst);
}
