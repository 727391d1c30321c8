//! End-to-end monotonicity audit: apply a sequence of operations that favor
//! one alternative and check that its fitted score never drops.
//!
//! The audit has three layers:
//!
//! * [`assert_monotone`] — fit before/after each operation of a favoring
//!   trace and report the first score drop beyond a slack;
//! * [`random_favoring_trace`] / [`InstanceGenerator`] — randomized
//!   generators for traces and whole problem instances, spanning certified
//!   embedding families (identity, one-hot, verified diffusion) and
//!   families known to misbehave (collinear columns, raw Gaussian);
//! * [`hunt_violation`] — search random instances for a monotonicity
//!   failure and greedily shrink the first one found into a small
//!   replayable witness.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::{op_favors, Dataset, DatasetOp};
use crate::embedding::{default_lambda_grid, is_diffusion_embedding, Embedding};
use crate::error::{Error, Result};
use crate::laplacian::{psd_sqrt, random_laplacian, random_super_laplacian, spd_inverse, PREDICATE_TOL};
use crate::model::{fit, FitResult, ModelConfig, SolverOptions};
use crate::root_law::RootLaw;

/// Default absolute slack for monotonicity checks: solver tolerance
/// (1e-10) amplified by conditioning headroom.
pub const MONOTONE_SLACK: f64 = 1e-7;

/// An ordered list of dataset operations together with the alternative they
/// are claimed to favor.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OperationTrace {
    /// The operations, applied left to right.
    pub ops: Vec<DatasetOp>,
    /// The alternative each operation favors.
    pub target: usize,
    /// Whether the favoring claim has been established for this trace.
    pub claims_favoring: bool,
}

/// Whether `op` favors `target` over *some* other alternative on `d`:
/// exchange and shuffle are neutral members of any favoring composition;
/// update and append must push a comparison involving `target` toward it.
pub fn favors_target(op: &DatasetOp, target: usize, d: &Dataset, law: RootLaw) -> bool {
    match op {
        DatasetOp::Exchange { .. } | DatasetOp::Shuffle { .. } => true,
        _ => (0..d.num_alternatives()).any(|b| b != target && op_favors(op, target, b, d, law)),
    }
}

impl OperationTrace {
    /// Builds a trace after verifying that every operation favors `target`
    /// on the dataset state it will actually see (operations compose, so
    /// each is checked against the result of its predecessors).
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] naming the first non-favoring step; any
    /// error applying an operation.
    pub fn favoring(
        ops: Vec<DatasetOp>,
        target: usize,
        d0: &Dataset,
        law: RootLaw,
    ) -> Result<Self> {
        let trace = OperationTrace { ops, target, claims_favoring: true };
        trace.verify_favoring(d0, law)?;
        Ok(trace)
    }

    /// Re-verifies the favoring claim by walking the trace over `d0`.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] naming the first non-favoring step; any
    /// error applying an operation.
    pub fn verify_favoring(&self, d0: &Dataset, law: RootLaw) -> Result<()> {
        let mut d = d0.clone();
        for (step, op) in self.ops.iter().enumerate() {
            if !favors_target(op, self.target, &d, law) {
                return Err(Error::InvalidParameter(format!(
                    "trace step {step} does not favor alternative {}",
                    self.target
                )));
            }
            d = op.apply(&d, law)?;
        }
        Ok(())
    }
}

/// The first monotonicity failure along a trace: which step dropped the
/// target's score, by how much, and the fits on both sides of it.
#[derive(Debug, Clone)]
pub struct MonotoneFailure {
    /// Index (into the trace) of the operation that dropped the score.
    pub step: usize,
    /// Score decrease `θ_before − θ_after` (positive, above slack).
    pub drop: f64,
    /// Fit before the failing operation.
    pub before: FitResult,
    /// Fit after the failing operation.
    pub after: FitResult,
}

/// Outcome of [`assert_monotone`].
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    /// True iff the target's score never dropped by more than the slack.
    pub pass: bool,
    /// The audited alternative.
    pub target: usize,
    /// Operations checked before passing or stopping at a failure.
    pub steps_checked: usize,
    /// The failure, when `pass` is false.
    pub failure: Option<MonotoneFailure>,
}

/// Fits before and after each operation of a favoring trace and checks the
/// target's score never decreases by more than `slack`. The trace's
/// favoring claim is re-verified step by step; a trace that does not claim
/// to favor its target is refused outright.
///
/// # Errors
/// [`Error::InvalidParameter`] for an unclaimed or false favoring claim or
/// an out-of-bounds target; solver failures propagate.
pub fn assert_monotone(
    cfg: &ModelConfig,
    d: &Dataset,
    trace: &OperationTrace,
    slack: f64,
) -> Result<MonotonicityReport> {
    if !trace.claims_favoring {
        return Err(Error::InvalidParameter(
            "monotonicity audit requires a trace that claims to favor its target".into(),
        ));
    }
    if trace.target >= cfg.num_alternatives() {
        return Err(Error::AlternativeOutOfBounds {
            id: trace.target,
            num_alternatives: cfg.num_alternatives(),
        });
    }
    let opts = SolverOptions::default();
    let mut current = d.clone();
    let mut before = fit(cfg, &current, &opts)?;
    for (step, op) in trace.ops.iter().enumerate() {
        if !favors_target(op, trace.target, &current, cfg.law()) {
            return Err(Error::InvalidParameter(format!(
                "trace step {step} does not favor alternative {}",
                trace.target
            )));
        }
        let next = op.apply(&current, cfg.law())?;
        let after = fit(cfg, &next, &opts)?;
        let drop = before.theta_star[trace.target] - after.theta_star[trace.target];
        if drop > slack {
            return Ok(MonotonicityReport {
                pass: false,
                target: trace.target,
                steps_checked: step + 1,
                failure: Some(MonotoneFailure { step, drop, before, after }),
            });
        }
        current = next;
        before = after;
    }
    Ok(MonotonicityReport {
        pass: true,
        target: trace.target,
        steps_checked: trace.ops.len(),
        failure: None,
    })
}

fn random_favoring_op<R: Rng + ?Sized>(
    d: &Dataset,
    law: RootLaw,
    target: usize,
    rng: &mut R,
) -> DatasetOp {
    // Entries whose pair involves the target are the only updatable ones.
    let touching: Vec<usize> = d
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.a == target || s.b == target)
        .map(|(i, _)| i)
        .collect();
    // Weight the score-moving kinds; exchange/shuffle are neutral filler.
    let mut kinds = vec!["exchange", "shuffle"];
    if !touching.is_empty() {
        kinds.extend(["update"; 3]);
    }
    if law.range_sup().is_finite() {
        kinds.extend(["append"; 3]);
    }
    match *kinds.choose(rng).expect("kind pool is never empty") {
        "update" => {
            let n = *touching.choose(rng).expect("update picked from non-empty pool");
            let s = d.samples()[n];
            let raise = s.a == target; // oriented (target, b): push r up; else down
            let r = match law {
                RootLaw::Binary => {
                    if raise {
                        1.0
                    } else {
                        -1.0
                    }
                }
                RootLaw::Uniform => {
                    if raise {
                        s.r + (1.0 - s.r) * rng.gen::<f64>()
                    } else {
                        s.r - (s.r + 1.0) * rng.gen::<f64>()
                    }
                }
                RootLaw::Gaussian => {
                    if raise {
                        s.r + 2.0 * rng.gen::<f64>()
                    } else {
                        s.r - 2.0 * rng.gen::<f64>()
                    }
                }
            };
            DatasetOp::Update { n, r }
        }
        "append" => {
            let a = d.num_alternatives();
            let partner = (target + rng.gen_range(1..a)) % a;
            let sup = law.range_sup();
            // Only the supremum judgment favors; write it from either side.
            if rng.gen::<bool>() {
                DatasetOp::Append { a: target, b: partner, r: sup }
            } else {
                DatasetOp::Append { a: partner, b: target, r: -sup }
            }
        }
        "shuffle" => {
            let n_first = rng.gen_range(0..=d.len());
            let mut perm: Vec<usize> = (0..n_first).collect();
            perm.shuffle(rng);
            DatasetOp::Shuffle { n_first, perm }
        }
        _ => {
            // Inclusive upper bound: index == len is the identity exchange.
            DatasetOp::Exchange { n: rng.gen_range(0..=d.len()) }
        }
    }
}

/// Generates a random trace of 1–10 operations, each favoring `target` on
/// the dataset state it will see. Mixes all four operation kinds; laws with
/// unbounded range get no appends (no judgment infinitely favors there).
///
/// # Panics
/// If the dataset has fewer than two alternatives.
pub fn random_favoring_trace<R: Rng + ?Sized>(
    d0: &Dataset,
    law: RootLaw,
    target: usize,
    rng: &mut R,
) -> OperationTrace {
    assert!(d0.num_alternatives() >= 2, "favoring traces need at least two alternatives");
    assert!(target < d0.num_alternatives(), "target out of bounds");
    let len = rng.gen_range(1..=10);
    let mut ops = Vec::with_capacity(len);
    let mut d = d0.clone();
    for _ in 0..len {
        let op = random_favoring_op(&d, law, target, rng);
        debug_assert!(favors_target(&op, target, &d, law));
        d = op.apply(&d, law).expect("generated operation must apply cleanly");
        ops.push(op);
    }
    OperationTrace { ops, target, claims_favoring: true }
}

/// Embedding families the instance generator can draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFamily {
    /// Identity features: one exclusive feature per alternative.
    Identity,
    /// I.i.d. standard normal features (no certificate; violations exist).
    Gaussian,
    /// Random-partition one-hot features under a shared exclusive
    /// component, drawn with a random component weight.
    OneHot,
    /// Square root of the inverse of a random strictly dominant graph
    /// matrix, re-verified on the default shift grid (resampled if the
    /// verification fails numerically).
    DiffusionVerified,
    /// Two collinear columns of different lengths plus random filler — the
    /// family behind the introductory failure example.
    Collinear,
}

/// Randomized problem-instance source: embedding family, root law, and
/// ranges for every size parameter. Inclusive ranges throughout.
#[derive(Debug, Clone)]
pub struct InstanceGenerator {
    /// Which embedding family to draw.
    pub family: EmbeddingFamily,
    /// Root law for judgments and fits.
    pub law: RootLaw,
    /// Alternative-count range (min 2).
    pub alternatives: (usize, usize),
    /// Feature-dimension range (Gaussian and Collinear families).
    pub feature_dims: (usize, usize),
    /// Dataset-size range.
    pub dataset_sizes: (usize, usize),
    /// Prior scale range.
    pub sigma_range: (f64, f64),
    /// Draw a random comparison graph for the prior (else no graph term).
    pub with_laplacian: bool,
}

impl InstanceGenerator {
    /// A generator with moderate defaults: 2–6 alternatives, 1–4 features,
    /// 2–12 samples, σ ∈ [0.5, 2), random prior graph.
    pub fn new(family: EmbeddingFamily, law: RootLaw) -> Self {
        InstanceGenerator {
            family,
            law,
            alternatives: (2, 6),
            feature_dims: (1, 4),
            dataset_sizes: (2, 12),
            sigma_range: (0.5, 2.0),
            with_laplacian: true,
        }
    }

    fn sample_embedding<R: Rng + ?Sized>(&self, a: usize, rng: &mut R) -> Result<Embedding> {
        match self.family {
            EmbeddingFamily::Identity => Ok(Embedding::identity(a)),
            EmbeddingFamily::Gaussian => {
                let dim = rng.gen_range(self.feature_dims.0..=self.feature_dims.1);
                Ok(Embedding::gaussian(dim, a, rng))
            }
            EmbeddingFamily::OneHot => {
                // Random composition of `a` into 1..=a nonempty classes.
                let k = rng.gen_range(1..=a);
                let mut partition = vec![1usize; k];
                for _ in 0..(a - k) {
                    partition[rng.gen_range(0..k)] += 1;
                }
                let s = rng.gen_range(0.0..2.0);
                Embedding::one_hot(&partition, s)
            }
            EmbeddingFamily::DiffusionVerified => {
                for _ in 0..50 {
                    let delta = random_super_laplacian(a, rng);
                    let gram = spd_inverse(&delta)?;
                    let emb = Embedding::new(psd_sqrt(&gram));
                    if is_diffusion_embedding(&emb, &default_lambda_grid(), PREDICATE_TOL)?.pass
                    {
                        return Ok(emb);
                    }
                }
                Err(Error::Numerical(
                    "could not draw a grid-verified diffusion embedding in 50 tries".into(),
                ))
            }
            EmbeddingFamily::Collinear => {
                let dim = rng.gen_range(self.feature_dims.0..=self.feature_dims.1).max(1);
                let mut x = DMatrix::from_fn(dim, a, |_, _| {
                    rng.sample::<f64, _>(rand_distr::StandardNormal)
                });
                // Make column 1 a stretched copy of column 0.
                let stretch = rng.gen_range(1.5..3.0);
                let head = x.column(0).into_owned();
                x.set_column(1, &(head * stretch));
                Ok(Embedding::new(x))
            }
        }
    }

    /// Draws one `(config, dataset)` instance.
    ///
    /// # Errors
    /// Numerical failure drawing a verified diffusion embedding; config
    /// validation errors cannot occur for generated inputs.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(ModelConfig, Dataset)> {
        let a = rng.gen_range(self.alternatives.0.max(2)..=self.alternatives.1);
        let emb = self.sample_embedding(a, rng)?;
        let lap = if self.with_laplacian {
            random_laplacian(a, rng)
        } else {
            DMatrix::zeros(a, a)
        };
        let sigma = rng.gen_range(self.sigma_range.0..self.sigma_range.1);
        let cfg = ModelConfig::new(self.law, sigma, emb, lap)?;
        let n = rng.gen_range(self.dataset_sizes.0..=self.dataset_sizes.1);
        let mut d = Dataset::new(a);
        for _ in 0..n {
            let i = rng.gen_range(0..a);
            let j = (i + rng.gen_range(1..a)) % a;
            d.push(i, j, arbitrary_judgment(self.law, rng))?;
        }
        Ok((cfg, d))
    }
}

fn arbitrary_judgment<R: Rng + ?Sized>(law: RootLaw, rng: &mut R) -> f64 {
    match law {
        RootLaw::Uniform => rng.gen_range(-1.0..1.0),
        RootLaw::Binary => {
            if rng.gen::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
        RootLaw::Gaussian => rng.sample(rand_distr::StandardNormal),
    }
}

/// A shrunk, replayable monotonicity failure: the full model inputs plus
/// the favoring trace whose application drops the target's score.
#[derive(Debug, Clone)]
pub struct ViolationWitness {
    /// Root law of the failing instance.
    pub law: RootLaw,
    /// Prior scale.
    pub sigma: f64,
    /// Feature matrix (one column per alternative).
    pub embedding: DMatrix<f64>,
    /// Prior comparison-graph matrix.
    pub laplacian: DMatrix<f64>,
    /// Dataset the trace is applied to.
    pub dataset: Dataset,
    /// The favoring trace (shrunk to the single failing operation).
    pub trace: OperationTrace,
    /// Score drop observed when the witness was produced.
    pub drop: f64,
}

impl ViolationWitness {
    /// Rebuilds the model and re-runs the audit on this witness.
    ///
    /// # Errors
    /// Config validation or solver failures.
    pub fn replay(&self, slack: f64) -> Result<MonotonicityReport> {
        let cfg = ModelConfig::new(
            self.law,
            self.sigma,
            Embedding::new(self.embedding.clone()),
            self.laplacian.clone(),
        )?;
        assert_monotone(&cfg, &self.dataset, &self.trace, slack)
    }
}

/// Whether the candidate (cfg parts, dataset, single-op trace) still fails.
fn still_fails(
    law: RootLaw,
    sigma: f64,
    x: &DMatrix<f64>,
    lap: &DMatrix<f64>,
    d: &Dataset,
    trace: &OperationTrace,
    slack: f64,
) -> Option<f64> {
    let cfg = ModelConfig::new(law, sigma, Embedding::new(x.clone()), lap.clone()).ok()?;
    match assert_monotone(&cfg, d, trace, slack) {
        Ok(report) if !report.pass => Some(report.failure.expect("failed report").drop),
        _ => None,
    }
}

fn drop_sample(d: &Dataset, index: usize) -> Dataset {
    let mut out = Dataset::new(d.num_alternatives());
    for (i, s) in d.samples().iter().enumerate() {
        if i != index {
            out.push(s.a, s.b, s.r).expect("copying valid samples");
        }
    }
    out
}

/// Shifts an op's entry index after removing `removed` from the dataset.
/// Returns `None` when the op addresses the removed entry itself.
fn reindex_op(op: &DatasetOp, removed: usize) -> Option<DatasetOp> {
    match op {
        DatasetOp::Update { n, r } => {
            if *n == removed {
                None
            } else if *n > removed {
                Some(DatasetOp::Update { n: n - 1, r: *r })
            } else {
                Some(op.clone())
            }
        }
        DatasetOp::Exchange { n } => {
            if *n == removed {
                None
            } else if *n > removed {
                Some(DatasetOp::Exchange { n: n - 1 })
            } else {
                Some(op.clone())
            }
        }
        // Appends are index-free; a shuffle over a shrunk prefix is not
        // worth preserving (it cannot cause a drop anyway).
        DatasetOp::Append { .. } => Some(op.clone()),
        DatasetOp::Shuffle { .. } => None,
    }
}

/// Greedy witness shrinking: truncate the trace to the failing operation
/// (replaying the prefix into the dataset), then drop samples, then zero
/// prior-graph edges, then zero feature entries — keeping each change only
/// while the single-op failure persists.
fn shrink_witness(
    cfg: &ModelConfig,
    d0: &Dataset,
    trace: &OperationTrace,
    failure: &MonotoneFailure,
    slack: f64,
) -> Result<ViolationWitness> {
    let law = cfg.law();
    let sigma = cfg.sigma();
    // Replay the prefix: the failing op acts on this dataset state.
    let mut d = d0.clone();
    for op in &trace.ops[..failure.step] {
        d = op.apply(&d, law)?;
    }
    let mut single = OperationTrace {
        ops: vec![trace.ops[failure.step].clone()],
        target: trace.target,
        claims_favoring: true,
    };
    let mut x = cfg.embedding().matrix().clone();
    let mut lap = cfg.laplacian().clone();
    let mut drop = failure.drop;

    // Drop dataset samples while the failure persists.
    let mut i = 0;
    while i < d.len() {
        let candidate_d = drop_sample(&d, i);
        if let Some(op) = reindex_op(&single.ops[0], i) {
            let candidate_trace = OperationTrace {
                ops: vec![op],
                target: single.target,
                claims_favoring: true,
            };
            if let Some(next_drop) =
                still_fails(law, sigma, &x, &lap, &candidate_d, &candidate_trace, slack)
            {
                d = candidate_d;
                single = candidate_trace;
                drop = next_drop;
                continue; // index i now names the next sample
            }
        }
        i += 1;
    }

    // Zero prior-graph edges (removing the edge keeps the matrix a valid
    // graph matrix; zeroing one entry alone would not).
    let a = lap.nrows();
    for i in 0..a {
        for j in (i + 1)..a {
            if lap[(i, j)] == 0.0 {
                continue;
            }
            let mut candidate = lap.clone();
            let w = candidate[(i, j)];
            candidate[(i, j)] = 0.0;
            candidate[(j, i)] = 0.0;
            candidate[(i, i)] += w;
            candidate[(j, j)] += w;
            if let Some(next_drop) = still_fails(law, sigma, &x, &candidate, &d, &single, slack)
            {
                lap = candidate;
                drop = next_drop;
            }
        }
    }

    // Zero individual feature entries.
    for c in 0..x.ncols() {
        for r in 0..x.nrows() {
            if x[(r, c)] == 0.0 {
                continue;
            }
            let mut candidate = x.clone();
            candidate[(r, c)] = 0.0;
            if let Some(next_drop) = still_fails(law, sigma, &candidate, &lap, &d, &single, slack)
            {
                x = candidate;
                drop = next_drop;
            }
        }
    }

    Ok(ViolationWitness {
        law,
        sigma,
        embedding: x,
        laplacian: lap,
        dataset: d,
        trace: single,
        drop,
    })
}

/// Draws random instances and favoring traces from `gen` and returns the
/// first monotonicity violation found within `budget` trials, shrunk to a
/// small replayable witness. Absence of a witness is a normal outcome.
/// Instances whose solves fail are skipped, not fatal.
///
/// # Errors
/// Only from shrinking the found witness (requires re-solves).
pub fn hunt_violation<R: Rng + ?Sized>(
    gen: &InstanceGenerator,
    rng: &mut R,
    budget: usize,
) -> Result<Option<ViolationWitness>> {
    for _ in 0..budget {
        let Ok((cfg, d)) = gen.sample(rng) else { continue };
        let target = rng.gen_range(0..cfg.num_alternatives());
        let trace = random_favoring_trace(&d, gen.law, target, rng);
        match assert_monotone(&cfg, &d, &trace, MONOTONE_SLACK) {
            Ok(report) if !report.pass => {
                let failure = report.failure.expect("failed report carries its failure");
                let witness = shrink_witness(&cfg, &d, &trace, &failure, MONOTONE_SLACK)?;
                return Ok(Some(witness));
            }
            _ => {}
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn seeded_dataset<R: Rng + ?Sized>(a: usize, n: usize, law: RootLaw, rng: &mut R) -> Dataset {
        let mut d = Dataset::new(a);
        for _ in 0..n {
            let i = rng.gen_range(0..a);
            let j = (i + rng.gen_range(1..a)) % a;
            d.push(i, j, arbitrary_judgment(law, rng)).unwrap();
        }
        d
    }

    #[test]
    fn favoring_trace_generator_is_sound() {
        for (k, law) in RootLaw::ALL.iter().enumerate() {
            let mut rng = stream(81, k as u64);
            for _ in 0..40 {
                let a = rng.gen_range(2..6);
                let d = seeded_dataset(a, rng.gen_range(0..8), *law, &mut rng);
                let target = rng.gen_range(0..a);
                let trace = random_favoring_trace(&d, *law, target, &mut rng);
                assert!(trace.claims_favoring);
                trace.verify_favoring(&d, *law).unwrap();
                if !law.range_sup().is_finite() {
                    assert!(
                        !trace.ops.iter().any(|op| matches!(op, DatasetOp::Append { .. })),
                        "unbounded law must not generate appends"
                    );
                }
            }
        }
    }

    #[test]
    fn classic_fits_are_monotone_on_random_favoring_traces() {
        for (k, law) in RootLaw::ALL.iter().enumerate() {
            let mut rng = stream(82, k as u64);
            let generator = InstanceGenerator {
                with_laplacian: false,
                alternatives: (2, 4),
                dataset_sizes: (1, 6),
                ..InstanceGenerator::new(EmbeddingFamily::Identity, *law)
            };
            for _ in 0..10 {
                let (cfg, d) = generator.sample(&mut rng).unwrap();
                let target = rng.gen_range(0..cfg.num_alternatives());
                let trace = random_favoring_trace(&d, *law, target, &mut rng);
                let report = assert_monotone(&cfg, &d, &trace, MONOTONE_SLACK).unwrap();
                assert!(report.pass, "{law:?}: {:?}", report.failure);
            }
        }
    }

    #[test]
    fn one_hot_with_prior_graph_is_monotone() {
        let mut rng = stream(83, 0);
        let generator = InstanceGenerator {
            alternatives: (2, 5),
            dataset_sizes: (1, 8),
            ..InstanceGenerator::new(EmbeddingFamily::OneHot, RootLaw::Uniform)
        };
        for _ in 0..15 {
            let (cfg, d) = generator.sample(&mut rng).unwrap();
            let target = rng.gen_range(0..cfg.num_alternatives());
            let trace = random_favoring_trace(&d, RootLaw::Uniform, target, &mut rng);
            let report = assert_monotone(&cfg, &d, &trace, MONOTONE_SLACK).unwrap();
            assert!(report.pass, "{:?}", report.failure);
        }
    }

    #[test]
    fn verified_diffusion_family_is_monotone() {
        let mut rng = stream(84, 0);
        let generator = InstanceGenerator {
            alternatives: (2, 5),
            dataset_sizes: (1, 8),
            ..InstanceGenerator::new(EmbeddingFamily::DiffusionVerified, RootLaw::Binary)
        };
        for _ in 0..8 {
            let (cfg, d) = generator.sample(&mut rng).unwrap();
            let target = rng.gen_range(0..cfg.num_alternatives());
            let trace = random_favoring_trace(&d, RootLaw::Binary, target, &mut rng);
            let report = assert_monotone(&cfg, &d, &trace, MONOTONE_SLACK).unwrap();
            assert!(report.pass, "{:?}", report.failure);
        }
    }

    /// Two features, three alternatives, second column twice the first:
    /// appending a top judgment for the first alternative over the second
    /// *drops* the first alternative's score.
    #[test]
    fn collinear_embedding_fails_on_a_favoring_append() {
        let x = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let cfg = ModelConfig::new(
            RootLaw::Uniform,
            1.0,
            Embedding::new(x),
            DMatrix::zeros(3, 3),
        )
        .unwrap();
        let d = Dataset::new(3);
        let trace = OperationTrace::favoring(
            vec![DatasetOp::Append { a: 0, b: 1, r: 1.0 }],
            0,
            &d,
            RootLaw::Uniform,
        )
        .unwrap();
        let report = assert_monotone(&cfg, &d, &trace, MONOTONE_SLACK).unwrap();
        assert!(!report.pass);
        let failure = report.failure.unwrap();
        assert_eq!(failure.step, 0);
        // The drop is the full collinear pull: θ_0 goes from 0 to β₁ < 0.
        assert!(failure.drop > 0.5, "drop = {}", failure.drop);
    }

    #[test]
    fn hunter_finds_and_shrinks_a_collinear_violation() {
        let mut rng = stream(85, 0);
        let generator = InstanceGenerator {
            alternatives: (3, 5),
            feature_dims: (2, 3),
            dataset_sizes: (2, 8),
            ..InstanceGenerator::new(EmbeddingFamily::Collinear, RootLaw::Uniform)
        };
        let witness = hunt_violation(&generator, &mut rng, 300).unwrap();
        let w = witness.expect("collinear family must yield a violation");
        assert_eq!(w.trace.ops.len(), 1, "shrunk trace is a single operation");
        assert!(w.drop > MONOTONE_SLACK);
        // The witness replays: same failure, fresh solves.
        let replay = w.replay(MONOTONE_SLACK).unwrap();
        assert!(!replay.pass);
        let drop = replay.failure.unwrap().drop;
        assert!((drop - w.drop).abs() <= 1e-8, "replay drop {drop} vs witness {}", w.drop);
    }

    #[test]
    fn hunter_finds_gaussian_violations_when_features_are_scarce() {
        let mut rng = stream(86, 0);
        let generator = InstanceGenerator {
            alternatives: (4, 6),
            feature_dims: (1, 2),
            dataset_sizes: (1, 6),
            ..InstanceGenerator::new(EmbeddingFamily::Gaussian, RootLaw::Uniform)
        };
        let witness = hunt_violation(&generator, &mut rng, 400).unwrap();
        assert!(witness.is_some(), "scarce-feature Gaussian embeddings violate at a visible rate");
    }

    #[test]
    fn hunter_reports_no_witness_for_certified_families() {
        let mut rng = stream(87, 0);
        for family in [EmbeddingFamily::Identity, EmbeddingFamily::OneHot] {
            let generator = InstanceGenerator {
                alternatives: (2, 4),
                dataset_sizes: (0, 5),
                ..InstanceGenerator::new(family, RootLaw::Uniform)
            };
            let witness = hunt_violation(&generator, &mut rng, 40).unwrap();
            assert!(witness.is_none(), "{family:?} yielded a spurious witness");
        }
    }

    #[test]
    fn audit_rejects_unclaimed_or_false_traces() {
        let cfg = ModelConfig::classic(RootLaw::Uniform, 1.0, 3);
        let d = Dataset::from_triples(3, &[(0, 1, 0.5)]).unwrap();
        let unclaimed = OperationTrace {
            ops: vec![DatasetOp::Exchange { n: 0 }],
            target: 0,
            claims_favoring: false,
        };
        assert!(matches!(
            assert_monotone(&cfg, &d, &unclaimed, MONOTONE_SLACK),
            Err(Error::InvalidParameter(_))
        ));
        // Updating (0,1) downward favors 1, not 0: the claim is false.
        let false_claim = OperationTrace {
            ops: vec![DatasetOp::Update { n: 0, r: -0.9 }],
            target: 0,
            claims_favoring: true,
        };
        assert!(matches!(
            assert_monotone(&cfg, &d, &false_claim, MONOTONE_SLACK),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            OperationTrace::favoring(
                vec![DatasetOp::Update { n: 0, r: -0.9 }],
                0,
                &d,
                RootLaw::Uniform
            ),
            Err(Error::InvalidParameter(_))
        ));
        // Neutral ops never change the fit, so slack 0 still passes.
        let neutral = OperationTrace::favoring(
            vec![
                DatasetOp::Exchange { n: 0 },
                DatasetOp::Shuffle { n_first: 1, perm: vec![0] },
            ],
            2,
            &d,
            RootLaw::Uniform,
        )
        .unwrap();
        let report = assert_monotone(&cfg, &d, &neutral, 1e-12).unwrap();
        assert!(report.pass);
    }
}
