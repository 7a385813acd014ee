// debug probe (not part of the deliverable)
use asymcat::catalysis::*;
use asymcat::conic::SdpOptions;
use asymcat::protocols::Protocol;
use asymcat::qcore::*;
use asymcat::tio::*;

fn main() {
    let p = Protocol::main();
    let ctx = build_mask(&HamiltonianSpec::qubit(), &HamiltonianSpec::qubit());
    let inst = CatalysisInstance::from_bloch(&p.system, &p.catalyst, ctx.clone()).unwrap();
    let res = optimal_tio_channel(&inst, 1, &SdpOptions::default()).unwrap();
    println!("increment = {:.6}", res.increment);
    println!("solver: {:?}", res.solver_diag);

    // Independent certificate checks on the returned channel:
    let ch = &res.channel;
    let rep = ch.cptp_report();
    println!("CPTP: min eig {:.3e}, tp dev {:.3e}", rep.min_choi_eigenvalue, rep.tp_deviation);
    let (ok, dev) = is_tio(ch, &ctx, 1e-8);
    println!("TIO: {} deviation {:.3e}", ok, dev);
    let joint = inst.system_state.tensor(&inst.catalyst_state);
    let out = ch.apply_mat(joint.mat());
    let cat_out = partial_trace(&out, 2, 2, Keep::B).unwrap();
    println!("catalyst return dist: {:.3e}", cat_out.distance(inst.catalyst_state.mat()));
    let sys_out = partial_trace(&out, 2, 2, Keep::A).unwrap();
    println!("rho'_s = x {:.4} z {:.4}, coherence {:.6}", 2.0*sys_out[(0,1)].re, sys_out[(0,0)].re-sys_out[(1,1)].re, sys_out[(0,1)].norm());
    println!("out trace {:.6}, min eig {:.3e}", out.trace().re, min_eigenvalue(&out));

    // Also: what does the PRINTED channel deliver on the same inputs?
    let ch_paper = QuantumChannel::from_kraus(p.kraus.clone()).unwrap();
    let out2 = ch_paper.apply_mat(joint.mat());
    let s2 = partial_trace(&out2, 2, 2, Keep::A).unwrap();
    let c2 = partial_trace(&out2, 2, 2, Keep::B).unwrap();
    println!("printed channel: R'={:.6} (delta {:.6}), catalyst dist {:.3e}",
        2.0*s2[(0,1)].norm(), 2.0*s2[(0,1)].norm() - 0.4333, c2.distance(inst.catalyst_state.mat()));

    // Brute force cross-check at a slightly different instance: catalyst-free (diagonal) should give 0.
    let inst2 = CatalysisInstance::from_bloch(&p.system, &BlochVector::new(0.0,0.0,0.2928), ctx.clone()).unwrap();
    let res2 = optimal_tio_channel(&inst2, 1, &SdpOptions::default()).unwrap();
    println!("diagonal catalyst increment: {:.2e}", res2.increment);
}
