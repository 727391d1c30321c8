//! The three root laws behind the comparison model: their cumulant
//! functions, the mean/variance identities the fitter relies on, and exact
//! sampling from the tilted judgment distributions.
//!
//! Run with: `cargo run --example root_laws`

use gbt_diffusion::rng::stream;
use gbt_diffusion::{RootLaw, DEFAULT_SEED};

fn main() {
    let laws = [RootLaw::Uniform, RootLaw::Binary, RootLaw::Gaussian];

    // --- Cumulant functions -------------------------------------------------
    // Phi(t) = log E[exp(t R)] under the base law. Phi'(t) is the mean
    // judgment once the law is tilted by a score gap t; Phi''(t) its
    // variance. Both enter the fitter: Phi' in the gradient, Phi'' in the
    // Hessian.
    println!("cumulants at t = 0.8:");
    for law in laws {
        let t = 0.8;
        println!(
            "  {:<8}  Phi = {:+.6}  Phi' = {:+.6}  Phi'' = {:+.6}",
            law.name(),
            law.phi(t),
            law.phi_prime(t),
            law.phi_second(t)
        );
    }

    // Symmetry: a zero score gap cannot prefer either side, and the
    // curvature at zero matches the base law's variance.
    for law in laws {
        assert_eq!(law.phi(0.0), 0.0);
        assert_eq!(law.phi_prime(0.0), 0.0);
        let var = law.phi_second(0.0);
        assert!((var - law.variance()).abs() < 1e-12);
        assert!((law.phi(0.3) - law.phi(-0.3)).abs() < 1e-15, "Phi is even");
    }
    println!("\nPhi(0) = 0, Phi'(0) = 0, and Phi''(0) equals the base variance for every law");

    // Phi' saturates at the law's range bound: an enormous score gap can
    // promise at most total preference. (The uniform law approaches its
    // bound slowly, like 1 - 1/t.)
    for law in [RootLaw::Uniform, RootLaw::Binary] {
        let extreme = law.phi_prime(1000.0);
        println!(
            "  {:<8} Phi'(1000) = {:.6} (range sup = {})",
            law.name(),
            extreme,
            law.range_sup()
        );
        assert!(extreme <= law.range_sup());
        assert!(extreme > 0.99 * law.range_sup());
    }

    // --- Exact tilted samplers ----------------------------------------------
    // sample_comparison draws R from the tilted law (inverse-CDF for
    // uniform, coin flip for binary, shifted normal for Gaussian). The
    // empirical mean of many draws must approach Phi'(t) and the empirical
    // variance Phi''(t).
    println!("\ntilted sampling at t = 1.3 (200k draws):");
    let t = 1.3;
    let n = 200_000;
    for law in laws {
        let mut rng = stream(DEFAULT_SEED, 7);
        let draws: Vec<f64> = (0..n).map(|_| law.sample_comparison(t, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        println!(
            "  {:<8}  mean = {:+.4} (Phi' = {:+.4})   var = {:.4} (Phi'' = {:.4})",
            law.name(),
            mean,
            law.phi_prime(t),
            var,
            law.phi_second(t)
        );
        // 6-sigma Monte Carlo bands.
        let tol = 6.0 * (law.phi_second(t) / n as f64).sqrt();
        assert!((mean - law.phi_prime(t)).abs() < tol);
        // Every draw stays inside the law's admissible judgment range.
        assert!(draws.iter().all(|&r| law.contains(r)));
    }
    println!("\nempirical moments match the cumulant derivatives for every law");
}
