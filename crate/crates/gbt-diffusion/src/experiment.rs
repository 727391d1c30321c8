//! Synthetic-experiment harness: goodness-probability heatmaps over random
//! Gaussian embeddings, and normalized-MSE curves versus feature dimension
//! and versus comparison count.
//!
//! Every run is deterministic given its seed: each (grid point, trial) pair
//! owns a dedicated RNG stream, trials fan out across worker threads, and
//! results are reduced in grid order.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::embedding::{good_check_monte_carlo, Embedding, GoodnessOptions};
use crate::error::{Error, Result};
use crate::model::{fit, ModelConfig, SolverOptions};
use crate::rng::{stream, stream_id};
use crate::root_law::RootLaw;

/// Everything that defines a synthetic ground truth except the draw itself.
#[derive(Debug, Clone)]
pub struct GroundTruthSpec {
    /// Ground-truth feature matrix `x†`.
    pub embedding: Embedding,
    /// Ground-truth comparison-graph matrix `L†`.
    pub laplacian: DMatrix<f64>,
    /// Ground-truth prior scale `σ†`.
    pub sigma: f64,
    /// Root law `f†` generating the comparisons.
    pub law: RootLaw,
}

/// A drawn ground truth: preferences `β†` with scores `θ† = x†ᵀβ†`.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// The generating specification.
    pub spec: GroundTruthSpec,
    /// Drawn preference vector `β† ~ 𝒩(0, (σ†)²I + x†L†x†ᵀ)`.
    pub beta: DVector<f64>,
    /// Ground-truth scores `θ† = x†ᵀβ†`.
    pub theta: DVector<f64>,
    /// True when the covariance needed a `+1e-12·I` shift to factor.
    pub regularized: bool,
}

/// Draws `β† ~ 𝒩(0, (σ†)²I + x†L†x†ᵀ)` via a Cholesky factor of the
/// covariance and computes `θ† = x†ᵀβ†`.
///
/// # Errors
/// [`Error::DimensionMismatch`] if `L†` is not `A×A`; [`Error::Numerical`]
/// if the covariance fails to factor even after the recorded `+1e-12·I`
/// regularization.
pub fn generate_ground_truth<R: Rng + ?Sized>(
    spec: &GroundTruthSpec,
    rng: &mut R,
) -> Result<GroundTruth> {
    let a = spec.embedding.num_alternatives();
    let d = spec.embedding.dim();
    if spec.laplacian.nrows() != a || spec.laplacian.ncols() != a {
        return Err(Error::DimensionMismatch {
            what: "ground-truth graph matrix must be A×A",
            expected: a,
            got: spec.laplacian.nrows().max(spec.laplacian.ncols()),
        });
    }
    if !(spec.sigma > 0.0 && spec.sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "ground-truth sigma must be positive and finite, got {}",
            spec.sigma
        )));
    }
    let x = spec.embedding.matrix();
    let covariance = DMatrix::identity(d, d) * (spec.sigma * spec.sigma)
        + x * &spec.laplacian * x.transpose();
    let (factor, regularized) = match covariance.clone().cholesky() {
        Some(c) => (c, false),
        None => {
            let shifted = covariance + DMatrix::identity(d, d) * 1e-12;
            let c = shifted.cholesky().ok_or_else(|| {
                Error::Numerical("ground-truth covariance failed to factor".into())
            })?;
            (c, true)
        }
    };
    let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let beta = factor.l() * z;
    let theta = x.tr_mul(&beta);
    Ok(GroundTruth { spec: spec.clone(), beta, theta, regularized })
}

/// Draws `n` comparisons: pairs uniform over unordered distinct pairs with
/// uniform orientation, each judgment sampled from the law tilted by
/// `θ†_a − θ†_b`.
///
/// # Panics
/// If `θ†` has fewer than two entries.
pub fn generate_dataset<R: Rng + ?Sized>(
    theta_dagger: &DVector<f64>,
    n: usize,
    law: RootLaw,
    rng: &mut R,
) -> Dataset {
    let a = theta_dagger.len();
    assert!(a >= 2, "comparison generation needs at least two alternatives");
    let mut d = Dataset::new(a);
    for _ in 0..n {
        let i = rng.gen_range(0..a);
        let j = (i + rng.gen_range(1..a)) % a;
        let r = law.sample_comparison(theta_dagger[i] - theta_dagger[j], rng);
        d.push(i, j, r).expect("generated comparisons are valid by construction");
    }
    d
}

/// Normalized mean squared error of one trial:
/// `‖(θ* − θ̄*) − (θ† − θ̄†)‖² / ‖θ† − θ̄†‖²` (both sides centered, so
/// constant shifts cancel). Returns `None` when `θ†` is constant (the
/// ratio is undefined and the trial must be discarded).
///
/// # Panics
/// If the vectors' lengths differ.
pub fn nmse(theta_star: &DVector<f64>, theta_dagger: &DVector<f64>) -> Option<f64> {
    assert_eq!(theta_star.len(), theta_dagger.len(), "nmse: length mismatch");
    let center = |v: &DVector<f64>| {
        let mean = v.mean();
        v.map(|t| t - mean)
    };
    let c_star = center(theta_star);
    let c_dagger = center(theta_dagger);
    // Both sums use the same expression and order so that the all-zero
    // estimate (no data) yields a bitwise-identical numerator and
    // denominator, making nMSE exactly 1 there.
    let denominator: f64 = (0..c_dagger.len()).map(|i| (0.0 - c_dagger[i]).powi(2)).sum();
    if denominator == 0.0 {
        return None;
    }
    let numerator: f64 = (0..c_star.len()).map(|i| (c_star[i] - c_dagger[i]).powi(2)).sum();
    Some(numerator / denominator)
}

/// [`nmse`] plus the per-trial self-checks the harness promises: exact zero
/// at the truth and shift invariance of the estimate.
fn audited_nmse(theta_star: &DVector<f64>, theta_dagger: &DVector<f64>) -> Option<f64> {
    let value = nmse(theta_star, theta_dagger)?;
    assert_eq!(
        nmse(theta_dagger, theta_dagger),
        Some(0.0),
        "nmse must vanish exactly at the truth"
    );
    let shifted = theta_star.map(|t| t + 3.25);
    let shifted_value = nmse(&shifted, theta_dagger).expect("same denominator");
    assert!(
        (shifted_value - value).abs() <= 1e-9 * value.max(1.0),
        "nmse must be invariant to constant shifts: {value} vs {shifted_value}"
    );
    Some(value)
}

/// One aggregated grid point of an experiment: where it sits, which series
/// it belongs to, and the estimate with its uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    /// Ordered grid coordinates, e.g. `[("a", 4), ("d", 2)]`.
    pub coords: Vec<(String, f64)>,
    /// Series name (heatmap mode or model name).
    pub series: String,
    /// Mean nMSE or goodness probability.
    pub estimate: f64,
    /// Standard error of the estimate (binomial or sample-based).
    pub stderr: f64,
    /// Trials aggregated into the estimate.
    pub n_seeds: usize,
    /// Trials discarded (undefined nMSE), counted rather than hidden.
    pub discarded: usize,
}

impl ExperimentResult {
    /// Looks up a coordinate by name.
    pub fn coord(&self, name: &str) -> Option<f64> {
        self.coords.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Which embedding enters the goodness check in a heatmap cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatmapMode {
    /// The raw Gaussian draw `x`.
    Plain,
    /// The Gaussian draw stacked under an identity block: `[I; x]`.
    IdentityConcat,
}

impl HeatmapMode {
    /// Series name used in results and figures.
    pub fn series(&self) -> &'static str {
        match self {
            HeatmapMode::Plain => "plain",
            HeatmapMode::IdentityConcat => "identity_concat",
        }
    }
}

/// Grid and budget for [`run_goodness_heatmap`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeatmapOptions {
    /// Inclusive alternative-count range (min 2).
    pub a_range: (usize, usize),
    /// Inclusive feature-dimension range (min 1).
    pub d_range: (usize, usize),
    /// Gaussian embeddings drawn per cell.
    pub n_embeddings: usize,
    /// Random graph matrices tested per embedding (scale sweep included).
    pub trials_per: usize,
    /// Whether cells check the raw draw or its identity-stacked variant.
    pub mode: HeatmapMode,
    /// Base seed; the same seed draws the same embeddings in both modes.
    pub seed: u64,
}

impl Default for HeatmapOptions {
    fn default() -> Self {
        HeatmapOptions {
            a_range: (2, 8),
            d_range: (1, 8),
            n_embeddings: 200,
            trials_per: 50,
            mode: HeatmapMode::Plain,
            seed: crate::DEFAULT_SEED,
        }
    }
}

/// Estimates, per `(A, D)` cell, the probability that an i.i.d. Gaussian
/// `D×A` embedding (optionally stacked under an identity block) passes the
/// goodness check with no violation found. Estimates carry binomial
/// standard errors. Cells run in parallel; every (cell, draw) pair owns an
/// RNG stream, so the output is deterministic and the two modes see the
/// same Gaussian draws under the same seed.
///
/// # Errors
/// [`Error::InvalidParameter`] on an empty grid or zero budget; numerical
/// failures from the goodness solves propagate.
pub fn run_goodness_heatmap(opts: &HeatmapOptions) -> Result<Vec<ExperimentResult>> {
    if opts.a_range.0 < 2 || opts.a_range.1 < opts.a_range.0 {
        return Err(Error::InvalidParameter(format!(
            "heatmap alternative range must satisfy 2 <= lo <= hi, got {:?}",
            opts.a_range
        )));
    }
    if opts.d_range.0 < 1 || opts.d_range.1 < opts.d_range.0 {
        return Err(Error::InvalidParameter(format!(
            "heatmap dimension range must satisfy 1 <= lo <= hi, got {:?}",
            opts.d_range
        )));
    }
    if opts.n_embeddings == 0 {
        return Err(Error::InvalidParameter("heatmap needs at least one embedding per cell".into()));
    }
    let mut cells: Vec<(usize, usize, usize)> = Vec::new();
    for a in opts.a_range.0..=opts.a_range.1 {
        for d in opts.d_range.0..=opts.d_range.1 {
            cells.push((cells.len(), a, d));
        }
    }

    let check = GoodnessOptions::light(opts.trials_per);
    cells
        .into_par_iter()
        .map(|(cell_idx, a, d)| -> Result<ExperimentResult> {
            let mut passes = 0usize;
            for trial in 0..opts.n_embeddings {
                // One stream per (cell, draw): the draw itself plus the
                // check's randomness. Both modes consume the draw
                // identically, so they test the same Gaussian ensemble.
                let mut rng = stream(opts.seed, stream_id(cell_idx as u64, trial as u64));
                let raw = Embedding::gaussian(d, a, &mut rng);
                let emb = match opts.mode {
                    HeatmapMode::Plain => raw,
                    HeatmapMode::IdentityConcat => {
                        Embedding::concat(&Embedding::identity(a), &raw)?
                    }
                };
                let report = good_check_monte_carlo(&emb, &check, &mut rng)?;
                if report.passed() {
                    passes += 1;
                }
            }
            let n = opts.n_embeddings;
            let p = passes as f64 / n as f64;
            let stderr = (p * (1.0 - p) / n as f64).sqrt();
            Ok(ExperimentResult {
                coords: vec![("a".into(), a as f64), ("d".into(), d as f64)],
                series: opts.mode.series().into(),
                estimate: p,
                stderr,
                n_seeds: n,
                discarded: 0,
            })
        })
        .collect()
}

/// Grid and budget for [`run_nmse_vs_dim`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmseVsDimOptions {
    /// Number of alternatives `A`.
    pub alternatives: usize,
    /// Comparisons per trial `N`.
    pub comparisons: usize,
    /// Feature dimensions to sweep.
    pub dims: Vec<usize>,
    /// Independent trials per dimension.
    pub n_seeds: usize,
    /// Base seed.
    pub seed: u64,
}

impl Default for NmseVsDimOptions {
    fn default() -> Self {
        NmseVsDimOptions {
            alternatives: 10,
            comparisons: 100,
            dims: (1..=8).collect(),
            n_seeds: 30,
            seed: crate::DEFAULT_SEED,
        }
    }
}

/// Model series of the dimension sweep.
const DIM_SERIES: [&str; 3] = ["full_embedding", "identity", "gaussian_features"];

/// Sweeps feature dimension `D`: each trial draws a ground truth on the
/// stacked embedding `x† = [I; x̃†]` (standard-Gaussian `x̃†`, uniform law,
/// `L† = 0`, `σ† = 1`), generates `N` comparisons, and fits three models
/// sharing the ground truth's law, graph, and scale but differing in
/// features: the full `x†`, the identity block alone, and the Gaussian
/// block alone. Emits mean nMSE ± stderr per dimension and series.
///
/// # Errors
/// [`Error::InvalidParameter`] on an empty grid; solver failures propagate.
pub fn run_nmse_vs_dim(opts: &NmseVsDimOptions) -> Result<Vec<ExperimentResult>> {
    if opts.dims.is_empty() || opts.n_seeds == 0 || opts.alternatives < 2 {
        return Err(Error::InvalidParameter(
            "dimension sweep needs dims, seeds, and at least two alternatives".into(),
        ));
    }
    let a = opts.alternatives;
    let solver = SolverOptions::default();
    let mut rows = Vec::with_capacity(opts.dims.len() * DIM_SERIES.len());
    for (d_idx, &dim) in opts.dims.iter().enumerate() {
        if dim == 0 {
            return Err(Error::InvalidParameter("feature dimension must be positive".into()));
        }
        let per_seed: Vec<Result<[Option<f64>; 3]>> = (0..opts.n_seeds)
            .into_par_iter()
            .map(|seed_idx| -> Result<[Option<f64>; 3]> {
                let mut rng = stream(opts.seed, stream_id(d_idx as u64, seed_idx as u64));
                let tail = Embedding::gaussian(dim, a, &mut rng);
                let full = Embedding::concat(&Embedding::identity(a), &tail)?;
                let spec = GroundTruthSpec {
                    embedding: full.clone(),
                    laplacian: DMatrix::zeros(a, a),
                    sigma: 1.0,
                    law: RootLaw::Uniform,
                };
                let truth = generate_ground_truth(&spec, &mut rng)?;
                let data = generate_dataset(&truth.theta, opts.comparisons, spec.law, &mut rng);
                let mut out = [None; 3];
                for (slot, emb) in
                    [full, Embedding::identity(a), tail].into_iter().enumerate()
                {
                    let cfg =
                        ModelConfig::new(spec.law, spec.sigma, emb, DMatrix::zeros(a, a))?;
                    let fitres = fit(&cfg, &data, &solver)?;
                    out[slot] = audited_nmse(&fitres.theta_star, &truth.theta);
                }
                Ok(out)
            })
            .collect();
        let mut values: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        let mut discarded = [0usize; 3];
        for seed_result in per_seed {
            let trial = seed_result?;
            for (slot, v) in trial.into_iter().enumerate() {
                match v {
                    Some(value) => values[slot].push(value),
                    None => discarded[slot] += 1,
                }
            }
        }
        for (slot, series) in DIM_SERIES.iter().enumerate() {
            let (estimate, stderr) = mean_and_stderr(&values[slot]);
            rows.push(ExperimentResult {
                coords: vec![("d".into(), dim as f64)],
                series: (*series).into(),
                estimate,
                stderr,
                n_seeds: values[slot].len(),
                discarded: discarded[slot],
            });
        }
    }
    Ok(rows)
}

/// Grid and budget for [`run_nmse_vs_count`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NmseVsCountOptions {
    /// One-hot class sizes; the alternative count is their sum.
    pub partition: Vec<usize>,
    /// Comparison counts to sweep.
    pub counts: Vec<usize>,
    /// Independent trials per count (trials share draws across counts via
    /// nested prefixes, so curves are comparable pointwise).
    pub n_seeds: usize,
    /// Base seed.
    pub seed: u64,
}

impl Default for NmseVsCountOptions {
    fn default() -> Self {
        NmseVsCountOptions {
            partition: vec![5, 5],
            counts: (0..=10).map(|k| k * 10).collect(),
            n_seeds: 30,
            seed: crate::DEFAULT_SEED,
        }
    }
}

/// Model series of the comparison-count sweep.
const COUNT_SERIES: [&str; 2] = ["one_hot", "classic"];

/// Sweeps comparison count `N`: the ground truth lives on a one-hot
/// embedding stacked with an identity block (uniform law, `L† = 0`,
/// `σ† = 1`); a class-aware model (the same one-hot embedding) is compared
/// against classic identity-feature fitting. Each seed draws one ground
/// truth and one maximal dataset, and every `N` fits on its prefix — so
/// `N = 0` fits the empty dataset (`θ* = 0`, nMSE exactly 1) and curves
/// move smoothly in `N`.
///
/// # Errors
/// [`Error::InvalidParameter`] on empty grids or a bad partition; solver
/// failures propagate.
pub fn run_nmse_vs_count(opts: &NmseVsCountOptions) -> Result<Vec<ExperimentResult>> {
    if opts.counts.is_empty() || opts.n_seeds == 0 {
        return Err(Error::InvalidParameter("count sweep needs counts and seeds".into()));
    }
    let one_hot = Embedding::one_hot(&opts.partition, 1.0)?;
    let a = one_hot.num_alternatives();
    if a < 2 {
        return Err(Error::InvalidParameter("count sweep needs at least two alternatives".into()));
    }
    let max_n = *opts.counts.iter().max().expect("non-empty counts");
    let solver = SolverOptions::default();

    // Per seed: one ground truth, one maximal dataset, nMSE of both models
    // on every prefix length.
    let per_seed: Vec<Result<Vec<[Option<f64>; 2]>>> = (0..opts.n_seeds)
        .into_par_iter()
        .map(|seed_idx| -> Result<Vec<[Option<f64>; 2]>> {
            let mut rng = stream(opts.seed, stream_id(0, seed_idx as u64));
            let spec = GroundTruthSpec {
                embedding: one_hot.clone(),
                laplacian: DMatrix::zeros(a, a),
                sigma: 1.0,
                law: RootLaw::Uniform,
            };
            let truth = generate_ground_truth(&spec, &mut rng)?;
            let full_data = generate_dataset(&truth.theta, max_n, spec.law, &mut rng);
            let one_hot_cfg =
                ModelConfig::new(spec.law, spec.sigma, one_hot.clone(), DMatrix::zeros(a, a))?;
            let classic_cfg = ModelConfig::classic(spec.law, spec.sigma, a);
            let mut per_count = Vec::with_capacity(opts.counts.len());
            for &n in &opts.counts {
                let mut prefix = Dataset::new(a);
                for s in &full_data.samples()[..n.min(full_data.len())] {
                    prefix.push(s.a, s.b, s.r)?;
                }
                let mut pair = [None; 2];
                for (slot, cfg) in [&one_hot_cfg, &classic_cfg].into_iter().enumerate() {
                    let fitres = fit(cfg, &prefix, &solver)?;
                    pair[slot] = audited_nmse(&fitres.theta_star, &truth.theta);
                }
                per_count.push(pair);
            }
            Ok(per_count)
        })
        .collect();

    let mut rows = Vec::with_capacity(opts.counts.len() * COUNT_SERIES.len());
    let mut values: Vec<[Vec<f64>; 2]> =
        opts.counts.iter().map(|_| [Vec::new(), Vec::new()]).collect();
    let mut discarded: Vec<[usize; 2]> = vec![[0; 2]; opts.counts.len()];
    for seed_result in per_seed {
        let per_count = seed_result?;
        for (count_idx, pair) in per_count.into_iter().enumerate() {
            for (slot, v) in pair.into_iter().enumerate() {
                match v {
                    Some(value) => values[count_idx][slot].push(value),
                    None => discarded[count_idx][slot] += 1,
                }
            }
        }
    }
    for (count_idx, &n) in opts.counts.iter().enumerate() {
        for (slot, series) in COUNT_SERIES.iter().enumerate() {
            let (estimate, stderr) = mean_and_stderr(&values[count_idx][slot]);
            rows.push(ExperimentResult {
                coords: vec![("n".into(), n as f64)],
                series: (*series).into(),
                estimate,
                stderr,
                n_seeds: values[count_idx][slot].len(),
                discarded: discarded[count_idx][slot],
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ground_truth_reduces_to_standard_normal_without_graph() {
        let spec = GroundTruthSpec {
            embedding: Embedding::identity(3),
            laplacian: DMatrix::zeros(3, 3),
            sigma: 1.0,
            law: RootLaw::Uniform,
        };
        let mut rng = stream(90, 0);
        let n = 20_000;
        let mut cov = DMatrix::zeros(3, 3);
        for _ in 0..n {
            let gt = generate_ground_truth(&spec, &mut rng).unwrap();
            assert!(!gt.regularized);
            cov += &gt.beta * gt.beta.transpose();
        }
        cov /= n as f64;
        assert!((cov - DMatrix::identity(3, 3)).norm() < 0.05, "empirical covariance off");
    }

    #[test]
    fn ground_truth_score_variance_matches_closed_form() {
        let mut rng = stream(90, 1);
        let emb = Embedding::gaussian(2, 4, &mut rng);
        let lap = crate::laplacian::random_laplacian(4, &mut rng);
        let sigma = 1.3;
        let spec = GroundTruthSpec {
            embedding: emb.clone(),
            laplacian: lap.clone(),
            sigma,
            law: RootLaw::Uniform,
        };
        let x = emb.matrix();
        let covariance = DMatrix::identity(2, 2) * sigma * sigma + x * &lap * x.transpose();
        let score_cov = x.tr_mul(&(&covariance * x));
        let n = 40_000;
        let mut empirical = DVector::zeros(4);
        for _ in 0..n {
            let gt = generate_ground_truth(&spec, &mut rng).unwrap();
            empirical += gt.theta.map(|t| t * t);
        }
        empirical /= n as f64;
        for i in 0..4 {
            let expected = score_cov[(i, i)];
            assert!(
                (empirical[i] - expected).abs() <= 0.05 * expected.max(1.0),
                "var(theta_{i}) = {} vs {}",
                empirical[i],
                expected
            );
        }
    }

    #[test]
    fn ground_truth_is_deterministic_per_seed() {
        let spec = GroundTruthSpec {
            embedding: Embedding::identity(4),
            laplacian: DMatrix::zeros(4, 4),
            sigma: 2.0,
            law: RootLaw::Binary,
        };
        let a = generate_ground_truth(&spec, &mut stream(91, 7)).unwrap();
        let b = generate_ground_truth(&spec, &mut stream(91, 7)).unwrap();
        assert_eq!(a.beta, b.beta);
        assert_eq!(a.theta, b.theta);
    }

    #[test]
    fn generated_pairs_are_uniform_and_judgments_centered() {
        let theta = DVector::zeros(4);
        let mut rng = stream(92, 0);
        let n = 30_000;
        let d = generate_dataset(&theta, n, RootLaw::Uniform, &mut rng);
        assert_eq!(d.len(), n);
        let mut pair_counts = std::collections::HashMap::new();
        let mut mean_r = 0.0;
        for s in d.samples() {
            assert_ne!(s.a, s.b);
            let key = (s.a.min(s.b), s.a.max(s.b));
            *pair_counts.entry(key).or_insert(0usize) += 1;
            mean_r += s.r;
        }
        mean_r /= n as f64;
        // Six unordered pairs; each expected n/6 with sd ~ sqrt(n·p(1-p)).
        let expected = n as f64 / 6.0;
        let sd = (n as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        assert_eq!(pair_counts.len(), 6);
        for (&pair, &count) in &pair_counts {
            assert!(
                (count as f64 - expected).abs() < 5.0 * sd,
                "pair {pair:?} count {count} vs expected {expected}"
            );
        }
        // Untilted uniform judgments: mean 0, variance 1/3.
        assert!(mean_r.abs() < 5.0 / (3.0 * n as f64).sqrt(), "mean judgment {mean_r}");
        assert_eq!(generate_dataset(&theta, 0, RootLaw::Uniform, &mut rng).len(), 0);
    }

    #[test]
    fn nmse_zero_at_truth_shift_invariant_and_one_at_zero() {
        let truth = DVector::from_vec(vec![0.4, -1.0, 2.2, 0.0]);
        assert_eq!(nmse(&truth, &truth), Some(0.0));
        let shifted = truth.map(|t| t + 17.0);
        let v = nmse(&shifted, &truth).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        assert_eq!(nmse(&DVector::zeros(4), &truth), Some(1.0));
        // Exactness at the zero estimate must hold for arbitrary truths,
        // not just rounding-friendly ones.
        let awkward = DVector::from_fn(13, |i, _| ((i * i) as f64 * 0.377).sin() / 3.0);
        assert_eq!(nmse(&DVector::zeros(13), &awkward), Some(1.0));
        let constant = DVector::from_element(4, 3.0);
        assert_eq!(nmse(&truth, &constant), None);
    }

    #[test]
    fn heatmap_runs_are_deterministic_and_bounded() {
        let opts = HeatmapOptions {
            a_range: (2, 3),
            d_range: (1, 2),
            n_embeddings: 40,
            trials_per: 10,
            mode: HeatmapMode::Plain,
            seed: 1234,
        };
        let rows = run_goodness_heatmap(&opts).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!((0.0..=1.0).contains(&row.estimate), "estimate {}", row.estimate);
            let p = row.estimate;
            let expected = (p * (1.0 - p) / row.n_seeds as f64).sqrt();
            assert_abs_diff_eq!(row.stderr, expected, epsilon = 1e-15);
            assert_eq!(row.n_seeds, 40);
        }
        let again = run_goodness_heatmap(&opts).unwrap();
        assert_eq!(rows, again, "same seed must reproduce identical rows");
    }

    #[test]
    fn identity_concat_mode_shares_draws_and_improves_goodness() {
        let base = HeatmapOptions {
            a_range: (4, 4),
            d_range: (1, 1),
            n_embeddings: 60,
            trials_per: 10,
            mode: HeatmapMode::Plain,
            seed: 77,
        };
        let plain = run_goodness_heatmap(&base).unwrap();
        let concat = run_goodness_heatmap(&HeatmapOptions {
            mode: HeatmapMode::IdentityConcat,
            ..base
        })
        .unwrap();
        // Scarce-feature Gaussians at A=4, D=1 are almost never good, while
        // the identity-stacked variants usually are.
        assert!(plain[0].estimate < 0.5, "plain estimate {}", plain[0].estimate);
        assert!(
            concat[0].estimate > plain[0].estimate,
            "identity stacking must improve the pass rate ({} vs {})",
            concat[0].estimate,
            plain[0].estimate
        );
    }

    #[test]
    fn dim_sweep_produces_three_series_per_dim() {
        let opts = NmseVsDimOptions {
            alternatives: 4,
            comparisons: 12,
            dims: vec![1, 2],
            n_seeds: 4,
            seed: 99,
        };
        let rows = run_nmse_vs_dim(&opts).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert!(row.estimate.is_finite());
            assert!(row.estimate >= 0.0 && row.estimate < 3.0, "estimate {}", row.estimate);
            assert!(row.stderr >= 0.0);
            assert_eq!(row.n_seeds + row.discarded, 4);
        }
        let again = run_nmse_vs_dim(&opts).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn count_sweep_is_exactly_one_at_zero_comparisons() {
        let opts = NmseVsCountOptions {
            partition: vec![2, 2],
            counts: vec![0, 8],
            n_seeds: 5,
            seed: 555,
        };
        let rows = run_nmse_vs_count(&opts).unwrap();
        assert_eq!(rows.len(), 4);
        for row in rows.iter().filter(|r| r.coord("n") == Some(0.0)) {
            assert_eq!(row.estimate, 1.0, "empty fit must give nMSE exactly 1");
            assert_eq!(row.stderr, 0.0);
            assert_eq!(row.n_seeds, 5);
        }
        // More comparisons should help both models on average.
        for series in COUNT_SERIES {
            let at0 = rows
                .iter()
                .find(|r| r.series == series && r.coord("n") == Some(0.0))
                .unwrap()
                .estimate;
            let at8 = rows
                .iter()
                .find(|r| r.series == series && r.coord("n") == Some(8.0))
                .unwrap()
                .estimate;
            assert!(at8 < at0 + 0.2, "{series}: nMSE {at8} at N=8 vs {at0} at N=0");
        }
    }
}
