//! Root laws: comparison-noise distributions and their cumulant functions.
//!
//! A root law `f` is the distribution of the comparison value `r` when the two
//! compared alternatives have equal scores. It is symmetric around zero. Under
//! a score gap `theta_ab = theta_a - theta_b`, comparisons follow the
//! exponentially tilted density `p(r | theta_ab) ∝ f(r) · exp(r · theta_ab)`.
//!
//! Each law exposes its cumulant-generating function `Φ(t) = log ∫ e^{rt} df(r)`
//! together with the first two derivatives and an exact sampler from the tilted
//! model. `Φ` is convex with `Φ(0) = 0`, `Φ'(0) = 0`, and `Φ''(0) = Var(f)`;
//! `Φ'` maps score gaps to expected comparison values and saturates at the
//! supremum of the comparison range.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Below this magnitude the uniform law's `Φ`, `Φ'`, `Φ''` switch to truncated
/// series: the closed forms subtract nearly equal `1/t`-scale terms and lose
/// all significant digits as `t → 0`.
const SMALL_T: f64 = 1e-4;

/// Below this tilt magnitude the uniform sampler uses a linearized inverse
/// CDF; the exact expression computes `expm1(2θ)/θ`-style ratios that
/// degenerate to `0/0` at `θ = 0`.
const SMALL_TILT: f64 = 1e-6;

/// Above this tilt magnitude `expm1(2θ)` overflows `f64`; the exact inverse
/// CDF simplifies to its asymptotic form with error below `e^{-2θ}`.
const HUGE_TILT: f64 = 350.0;

/// A symmetric comparison-noise distribution.
///
/// Comparison values live in a symmetric range `𝓡`: `[-1, 1]` for
/// [`Uniform`](RootLaw::Uniform), `{-1, +1}` for [`Binary`](RootLaw::Binary),
/// and all of `ℝ` for [`Gaussian`](RootLaw::Gaussian).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootLaw {
    /// Continuous judgments, uniform on `[-1, 1]` at zero score gap.
    Uniform,
    /// Win/loss outcomes on `{-1, +1}`, fair coin at zero score gap.
    Binary,
    /// Unbounded real judgments, standard normal at zero score gap.
    Gaussian,
}

impl RootLaw {
    /// All supported laws, handy for sweeping tests and experiments.
    pub const ALL: [RootLaw; 3] = [RootLaw::Uniform, RootLaw::Binary, RootLaw::Gaussian];

    /// Lowercase name as used in CLI flags and config files.
    pub fn name(self) -> &'static str {
        match self {
            RootLaw::Uniform => "uniform",
            RootLaw::Binary => "binary",
            RootLaw::Gaussian => "gaussian",
        }
    }

    /// Supremum of the comparison range `𝓡` (`+∞` for the Gaussian law).
    pub fn range_sup(self) -> f64 {
        match self {
            RootLaw::Uniform | RootLaw::Binary => 1.0,
            RootLaw::Gaussian => f64::INFINITY,
        }
    }

    /// Whether `r` is a valid comparison value under this law.
    pub fn contains(self, r: f64) -> bool {
        match self {
            RootLaw::Uniform => r.is_finite() && (-1.0..=1.0).contains(&r),
            RootLaw::Binary => r == 1.0 || r == -1.0,
            RootLaw::Gaussian => r.is_finite(),
        }
    }

    /// Variance of the untilted law; equals `phi_second(0)`.
    pub fn variance(self) -> f64 {
        match self {
            RootLaw::Uniform => 1.0 / 3.0,
            RootLaw::Binary | RootLaw::Gaussian => 1.0,
        }
    }

    /// Cumulant-generating function `Φ(t)`.
    ///
    /// Uniform: `log(sinh t / t)`, binary: `log cosh t`, Gaussian: `t²/2`.
    /// Evaluation is overflow-free for all finite `t` and switches to a
    /// truncated series near zero where the closed forms cancel.
    ///
    /// # Panics
    /// If `t` is not finite.
    pub fn phi(self, t: f64) -> f64 {
        assert!(t.is_finite(), "phi: t must be finite, got {t}");
        match self {
            RootLaw::Uniform => {
                let a = t.abs();
                if a <= SMALL_T {
                    let t2 = t * t;
                    t2 / 6.0 - t2 * t2 / 180.0
                } else {
                    // log(sinh a / a) = a + log1p(-e^{-2a}) - log(2a)
                    a + (-(-2.0 * a).exp()).ln_1p() - (2.0 * a).ln()
                }
            }
            RootLaw::Binary => {
                let a = t.abs();
                // log cosh a = a + log1p(e^{-2a}) - log 2
                a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
            }
            RootLaw::Gaussian => 0.5 * t * t,
        }
    }

    /// First derivative `Φ'(t)`: the mean comparison under tilt `t`.
    ///
    /// Uniform: `coth t − 1/t`, binary: `tanh t`, Gaussian: `t`.
    ///
    /// # Panics
    /// If `t` is not finite.
    pub fn phi_prime(self, t: f64) -> f64 {
        assert!(t.is_finite(), "phi_prime: t must be finite, got {t}");
        match self {
            RootLaw::Uniform => {
                if t.abs() <= SMALL_T {
                    let t2 = t * t;
                    t / 3.0 - t * t2 / 45.0 + 2.0 * t * t2 * t2 / 945.0
                } else {
                    let a = t.abs();
                    // coth a - 1/a, with coth a = 1 + 2 e^{-2a} / (1 - e^{-2a})
                    let e = (-2.0 * a).exp();
                    let v = 1.0 + 2.0 * e / (1.0 - e) - 1.0 / a;
                    v.copysign(t)
                }
            }
            RootLaw::Binary => t.tanh(),
            RootLaw::Gaussian => t,
        }
    }

    /// Second derivative `Φ''(t)`: the comparison variance under tilt `t`.
    ///
    /// Uniform: `1/t² − 1/sinh²t`, binary: `1 − tanh²t`, Gaussian: `1`.
    /// Strictly positive everywhere for all three laws.
    ///
    /// # Panics
    /// If `t` is not finite.
    pub fn phi_second(self, t: f64) -> f64 {
        assert!(t.is_finite(), "phi_second: t must be finite, got {t}");
        match self {
            RootLaw::Uniform => {
                let a = t.abs();
                if a <= SMALL_T {
                    let t2 = t * t;
                    1.0 / 3.0 - t2 / 15.0 + 2.0 * t2 * t2 / 189.0
                } else if a >= HUGE_TILT {
                    // 1/sinh² underflows to 0 long before this point.
                    1.0 / (a * a)
                } else {
                    // sinh a = e^a (1 - e^{-2a}) / 2, kept in factored form so
                    // the square never overflows for a < ~350.
                    let s = 0.5 * a.exp() * (-(-2.0 * a).exp_m1());
                    1.0 / (a * a) - 1.0 / (s * s)
                }
            }
            RootLaw::Binary => {
                // sech² t = 4 e^{-2|t|} / (1 + e^{-2|t|})²; the naive
                // 1 - tanh² t rounds to zero from |t| ≈ 19 onward.
                let e = (-2.0 * t.abs()).exp();
                4.0 * e / ((1.0 + e) * (1.0 + e))
            }
            RootLaw::Gaussian => 1.0,
        }
    }

    /// Draws one comparison from the tilted model `p(r|θ) ∝ f(r) e^{rθ}`.
    ///
    /// All three samplers are exact (no rejection, no discretization):
    /// binary flips a coin with `P(+1) = e^θ/(e^θ + e^{-θ})`, Gaussian returns
    /// `N(θ, 1)`, and uniform inverts the tilted CDF,
    /// `r = −1 + log1p(u·(e^{2θ}−1))/θ`, with stable branches for tiny and
    /// huge `θ`.
    ///
    /// # Panics
    /// If `theta_ab` is not finite.
    pub fn sample_comparison<R: Rng + ?Sized>(self, theta_ab: f64, rng: &mut R) -> f64 {
        assert!(
            theta_ab.is_finite(),
            "sample_comparison: theta_ab must be finite, got {theta_ab}"
        );
        match self {
            RootLaw::Uniform => {
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                sample_tilted_uniform(theta_ab, u)
            }
            RootLaw::Binary => {
                // P(+1) = sigmoid(2θ), computed on the non-overflowing side.
                let p = 1.0 / (1.0 + (-2.0 * theta_ab).exp());
                if rng.gen::<f64>() < p {
                    1.0
                } else {
                    -1.0
                }
            }
            RootLaw::Gaussian => theta_ab + rng.sample::<f64, _>(StandardNormal),
        }
    }
}

/// Inverse CDF of the tilted uniform law on `[-1, 1]`, for `u ∈ (0, 1)`.
fn sample_tilted_uniform(theta: f64, u: f64) -> f64 {
    if theta.abs() < SMALL_TILT {
        // r(u) = -1 + 2u + 2θu(1-u) + O(θ²): exact at θ=0, smooth across it.
        -1.0 + 2.0 * u + 2.0 * theta * u * (1.0 - u)
    } else if theta >= HUGE_TILT {
        // Mass piles up at +1; log1p(u·expm1(2θ)) = 2θ + ln u + O(e^{-2θ}).
        1.0 + u.ln() / theta
    } else {
        // Exact inverse CDF. For θ < 0, expm1(2θ) ∈ (-1, 0) so the log1p
        // argument stays in (-1, 0] and the expression is stable as is.
        -1.0 + (u * (2.0 * theta).exp_m1()).ln_1p() / theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    // Frozen reference values, computed with 40-digit arithmetic.
    const PHI_UNIFORM_AT_1: f64 = 0.161_439_361_571_195_63;
    const BINARY_P_PLUS_AT_1: f64 = 0.880_797_077_977_882_4;

    #[test]
    fn phi_at_zero_is_zero_for_all_laws() {
        for law in RootLaw::ALL {
            assert_eq!(law.phi(0.0), 0.0, "{}", law.name());
            assert_eq!(law.phi_prime(0.0), 0.0, "{}", law.name());
        }
    }

    #[test]
    fn phi_second_at_zero_is_the_variance() {
        for law in RootLaw::ALL {
            assert_abs_diff_eq!(law.phi_second(0.0), law.variance(), epsilon = 1e-15);
        }
    }

    #[test]
    fn uniform_phi_matches_reference_values() {
        assert_abs_diff_eq!(RootLaw::Uniform.phi(1.0), PHI_UNIFORM_AT_1, epsilon = 1e-15);
        // Asymptotically phi(t) = t - log(2t) + O(e^{-2t}).
        assert_abs_diff_eq!(
            RootLaw::Uniform.phi(30.0),
            30.0 - 60.0_f64.ln(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn phi_is_even_in_t() {
        let grid = [1e-6, 1e-4, 1e-3, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0, 300.0, 700.0];
        for law in RootLaw::ALL {
            for &t in &grid {
                assert_eq!(law.phi(t), law.phi(-t), "{} at t={t}", law.name());
                assert_eq!(law.phi_prime(t), -law.phi_prime(-t), "{} at t={t}", law.name());
                assert_eq!(law.phi_second(t), law.phi_second(-t), "{} at t={t}", law.name());
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        const H: f64 = 1e-4;
        const TOL: f64 = 1e-5;
        let grid = [-5.0, -1.3, -0.5, -0.01, 0.0, 0.02, 0.3, 0.9, 2.0, 7.0];
        for law in RootLaw::ALL {
            for &t in &grid {
                let fd1 = (law.phi(t + H) - law.phi(t - H)) / (2.0 * H);
                assert_abs_diff_eq!(law.phi_prime(t), fd1, epsilon = TOL);
                let fd2 = (law.phi_prime(t + H) - law.phi_prime(t - H)) / (2.0 * H);
                assert_abs_diff_eq!(law.phi_second(t), fd2, epsilon = TOL);
            }
        }
    }

    #[test]
    fn series_and_closed_form_agree_at_the_threshold() {
        // Reference values either side of the series switch (30-digit
        // arithmetic). The series side is accurate to machine precision; the
        // closed-form side is allowed its documented cancellation noise,
        // which must stay far below the solver's 1e-10 tolerance.
        let law = RootLaw::Uniform;
        let lo = SMALL_T * 0.999;
        assert_abs_diff_eq!(law.phi(lo), 1.663_334_999_446_663_3e-9, epsilon = 1e-22);
        assert_abs_diff_eq!(law.phi_prime(lo), 3.329_999_997_784_438e-5, epsilon = 1e-18);
        assert_abs_diff_eq!(law.phi_second(lo), 0.333_333_332_667_999_36, epsilon = 1e-15);
        let hi = SMALL_T * 1.001;
        assert_abs_diff_eq!(law.phi(hi), 1.670_001_666_108_885_5e-9, epsilon = 5e-14);
        assert_abs_diff_eq!(law.phi_prime(hi), 3.336_666_664_437_771e-5, epsilon = 1e-8);
        assert_abs_diff_eq!(law.phi_second(hi), 0.333_333_332_665_332_66, epsilon = 1e-7);
    }

    #[test]
    fn phi_second_is_positive_everywhere_representable() {
        // Positivity holds wherever the true value is at all representable;
        // for the bounded laws sech²-type curvature underflows past |t|≈370,
        // where 0.0 is the correctly rounded result.
        for law in RootLaw::ALL {
            for &t in &[0.0, 1e-5, 1e-3, 0.5, 5.0, 40.0, 300.0] {
                assert!(law.phi_second(t) > 0.0, "{} at t={t}", law.name());
            }
            assert!(law.phi_second(1e4) >= 0.0);
        }
    }

    #[test]
    fn phi_prime_saturates_at_range_sup() {
        assert_abs_diff_eq!(RootLaw::Binary.phi_prime(40.0), 1.0, epsilon = 1e-12);
        assert!(RootLaw::Uniform.phi_prime(1e6) < 1.0);
        assert_abs_diff_eq!(RootLaw::Uniform.phi_prime(1e6), 1.0, epsilon = 2e-6);
    }

    #[test]
    fn range_membership() {
        assert!(RootLaw::Uniform.contains(0.3));
        assert!(RootLaw::Uniform.contains(-1.0));
        assert!(!RootLaw::Uniform.contains(1.2));
        assert!(RootLaw::Binary.contains(1.0));
        assert!(!RootLaw::Binary.contains(0.5));
        assert!(RootLaw::Gaussian.contains(1e9));
        assert!(!RootLaw::Gaussian.contains(f64::NAN));
    }

    #[test]
    #[should_panic(expected = "must be finite")]
    fn phi_rejects_non_finite_input() {
        RootLaw::Uniform.phi(f64::NAN);
    }

    #[test]
    #[should_panic(expected = "must be finite")]
    fn sampler_rejects_non_finite_tilt() {
        let mut rng = stream(0, 0);
        RootLaw::Binary.sample_comparison(f64::INFINITY, &mut rng);
    }

    #[test]
    fn untilted_uniform_sampler_has_zero_mean_and_third_variance() {
        let mut rng = stream(11, 0);
        let n = 100_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| RootLaw::Uniform.sample_comparison(0.0, &mut rng))
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n as f64;
        // 3-sigma bands: stderr(mean) = sqrt(1/3n), stderr(var) ≈ sqrt((1/5 - 1/9)/n).
        assert!(mean.abs() < 3.0 * (1.0 / (3.0 * n as f64)).sqrt(), "mean={mean}");
        assert!((var - 1.0 / 3.0).abs() < 3.0 * (0.089 / n as f64).sqrt(), "var={var}");
        assert!(samples.iter().all(|r| (-1.0..=1.0).contains(r)));
    }

    #[test]
    fn binary_sampler_matches_tilted_probability() {
        let mut rng = stream(12, 0);
        let n = 100_000;
        let wins = (0..n)
            .filter(|_| RootLaw::Binary.sample_comparison(1.0, &mut rng) == 1.0)
            .count();
        let p_hat = wins as f64 / n as f64;
        let se = (BINARY_P_PLUS_AT_1 * (1.0 - BINARY_P_PLUS_AT_1) / n as f64).sqrt();
        assert!((p_hat - BINARY_P_PLUS_AT_1).abs() < 3.0 * se, "p_hat={p_hat}");
    }

    #[test]
    fn tilted_sampler_mean_is_phi_prime() {
        // The tilted-mean identity E[r | θ] = Φ'(θ), for each law at a few tilts.
        let cases = [
            (RootLaw::Uniform, 5.0),
            (RootLaw::Uniform, -0.7),
            (RootLaw::Binary, 0.4),
            (RootLaw::Gaussian, 2.0),
        ];
        for (i, &(law, theta)) in cases.iter().enumerate() {
            let mut rng = stream(13, i as u64);
            let n = 100_000;
            let sum: f64 = (0..n).map(|_| law.sample_comparison(theta, &mut rng)).sum();
            let mean = sum / n as f64;
            let se = (law.phi_second(theta) / n as f64).sqrt();
            assert!(
                (mean - law.phi_prime(theta)).abs() < 3.0 * se,
                "{} at theta={theta}: mean={mean}, expected {}",
                law.name(),
                law.phi_prime(theta)
            );
        }
    }

    #[test]
    fn tilted_uniform_branches_agree_at_their_seams() {
        // Each replacement branch is compared against the exact inverse CDF
        // evaluated at the same tilt (both are computable in f64 there).
        let exact = |theta: f64, u: f64| -1.0 + (u * (2.0 * theta).exp_m1()).ln_1p() / theta;
        for u in [0.1, 0.5, 0.9] {
            let tiny = SMALL_TILT * 0.99; // linearized branch active
            assert_abs_diff_eq!(sample_tilted_uniform(tiny, u), exact(tiny, u), epsilon = 1e-11);
            let huge = HUGE_TILT; // asymptotic branch active, expm1 still finite
            assert_abs_diff_eq!(sample_tilted_uniform(huge, u), exact(huge, u), epsilon = 1e-13);
        }
    }

    #[test]
    fn extreme_tilts_concentrate_at_the_range_edges() {
        let mut rng = stream(14, 0);
        for _ in 0..100 {
            let hi = RootLaw::Uniform.sample_comparison(500.0, &mut rng);
            assert!(hi > 0.9 && hi <= 1.0, "hi={hi}");
            let lo = RootLaw::Uniform.sample_comparison(-500.0, &mut rng);
            assert!(lo < -0.9 && lo >= -1.0, "lo={lo}");
        }
    }
}
