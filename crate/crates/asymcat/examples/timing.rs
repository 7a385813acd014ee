// timing probe (not part of the repo)
use asymcat::conic::robustness_of_asymmetry;
use asymcat::conic::diamond::diamond_norm_choi;
use asymcat::conic::SdpOptions;
use asymcat::qcore::*;
use std::time::Instant;

fn main() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let opts = SdpOptions::default();

    // robustness batch
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let n = 200;
    for _ in 0..n {
        let mut b = BlochVector::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let nn = b.norm();
        if nn > 1.0 { b = BlochVector::new(b.x/nn*0.99, b.y/nn*0.99, b.z/nn*0.99); }
        let rho = bloch_to_density(&b).unwrap();
        let r = robustness_of_asymmetry(&rho, None, &opts).unwrap();
        worst = worst.max((r - 2.0*rho.coherence().norm()).abs());
    }
    println!("robustness: {} solves in {:?} ({:?}/solve), worst err {:.2e}", n, t0.elapsed(), t0.elapsed()/n, worst);

    // diamond norm of a difference map
    let id = kraus_to_choi(&[ComplexMatrix::identity(2)]).unwrap();
    let zz = kraus_to_choi(&[pauli_z()]).unwrap();
    let diff = &id - &zz;
    let t0 = Instant::now();
    let m = 20;
    let mut v = 0.0;
    for _ in 0..m {
        v = diamond_norm_choi(&diff, 2, 2, &opts).unwrap().0;
    }
    println!("diamond(2x2 maps): {} solves in {:?} ({:?}/solve), value {:.8}", m, t0.elapsed(), t0.elapsed()/m, v);

    // small-difference map (like epsilon computations: near-zero maps)
    let small = diff.scale_re(0.004);
    let t0 = Instant::now();
    let mut v2 = 0.0;
    for _ in 0..m {
        v2 = diamond_norm_choi(&small, 2, 2, &opts).unwrap().0;
    }
    println!("diamond(small map): {} solves in {:?} ({:?}/solve), value {:.8} (expect 0.008)", m, t0.elapsed(), t0.elapsed()/m, v2);
}
