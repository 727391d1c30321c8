//! The linear GBT model: loss, derivatives, and the Newton solver.
//!
//! Scores are `θ = xᵀβ` for a parameter vector `β` over feature space. Given
//! a dataset `D`, the maximum-a-posteriori estimate minimizes the strongly
//! convex loss
//!
//! ```text
//! 𝓛(β|D) = ‖β‖²/(2σ²) + ½·θᵀLθ + Σ_{(a,b,r) ∈ D} [Φ(x_abᵀβ) − r·x_abᵀβ]
//! ```
//!
//! with `x_ab = x_a − x_b`: a Gaussian prior on `β`, a graph-diffusion prior
//! coupling scores of similar alternatives through the Laplacian `L`, and one
//! convex comparison term per sample. Strong convexity (modulus `1/σ²`)
//! gives a unique minimizer `β*`; [`fit`] finds it with damped Newton plus
//! Armijo backtracking, which converges globally here and costs microseconds
//! at desk scale.
//!
//! [`smoothened_fit`] minimizes the interpolated loss `𝓛_λ(β|D, o)` that
//! connects a dataset to its edit by an append or update operation
//! (`λ = 0` is `D`, `λ = 1` is `o(D)`); the sensitivity module differentiates
//! scores along exactly this path.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{Dataset, DatasetOp};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::laplacian::{is_laplacian, PREDICATE_TOL};
use crate::root_law::RootLaw;

/// Full model specification: root law, prior strength, embedding, and
/// diffusion prior.
#[derive(Debug, Clone)]
pub struct ModelConfig {
    law: RootLaw,
    sigma: f64,
    embedding: Embedding,
    laplacian: DMatrix<f64>,
}

impl ModelConfig {
    /// Validates and assembles a model: `sigma > 0`, `laplacian` an `A×A`
    /// Laplacian matching the embedding's alternative count.
    pub fn new(
        law: RootLaw,
        sigma: f64,
        embedding: Embedding,
        laplacian: DMatrix<f64>,
    ) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let a = embedding.num_alternatives();
        if laplacian.nrows() != a || laplacian.ncols() != a {
            return Err(Error::DimensionMismatch {
                what: "laplacian side must equal the number of alternatives",
                expected: a,
                got: laplacian.nrows(),
            });
        }
        if !crate::laplacian::is_symmetric(&laplacian, PREDICATE_TOL)
            || !is_laplacian(&laplacian, PREDICATE_TOL)
        {
            return Err(Error::NotLaplacian(
                "prior matrix must be symmetric with nonpositive off-diagonal and zero row sums"
                    .into(),
            ));
        }
        Ok(ModelConfig { law, sigma, embedding, laplacian })
    }

    /// The classic special case: identity embedding, no diffusion prior.
    pub fn classic(law: RootLaw, sigma: f64, num_alternatives: usize) -> Self {
        ModelConfig::new(
            law,
            sigma,
            Embedding::identity(num_alternatives),
            DMatrix::zeros(num_alternatives, num_alternatives),
        )
        .expect("identity embedding with zero Laplacian is always valid")
    }

    pub fn law(&self) -> RootLaw {
        self.law
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    pub fn num_alternatives(&self) -> usize {
        self.embedding.num_alternatives()
    }

    pub fn feature_dim(&self) -> usize {
        self.embedding.dim()
    }
}

/// Solver knobs; the defaults satisfy every tolerance promised in this
/// crate's reports.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Convergence threshold factor: stop when
    /// `‖∇𝓛‖ ≤ tol_factor · max(1, ‖∇𝓛(0)‖)`.
    pub tol_factor: f64,
    /// Newton iteration cap before reporting failure.
    pub max_iterations: usize,
    /// Armijo sufficient-decrease constant for backtracking.
    pub armijo_c: f64,
    /// Starting point (defaults to the origin).
    pub initial_beta: Option<DVector<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_factor: 1e-10,
            max_iterations: 200,
            armijo_c: 1e-4,
            initial_beta: None,
        }
    }
}

/// Converged solver output.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Minimizer in feature space.
    pub beta_star: DVector<f64>,
    /// Scores `θ* = xᵀβ*`.
    pub theta_star: DVector<f64>,
    /// Gradient norm at the reported minimizer.
    pub grad_norm: f64,
    /// Newton steps taken.
    pub iterations: usize,
}

/// One comparison term with an interpolation weight, the common currency of
/// plain and smoothened losses.
#[derive(Debug, Clone, Copy)]
struct WeightedSample {
    a: usize,
    b: usize,
    r: f64,
    w: f64,
}

/// Smoothened-loss descriptor: which differentiable edit, interpolated how far.
#[derive(Debug, Clone, Copy)]
enum SmoothTerm {
    /// Entry `n`'s value moves to `(1−λ)·r_old + λ·r_new`.
    Update { n: usize, r: f64, lambda: f64 },
    /// The appended sample's whole comparison term enters with weight `λ`.
    Append { a: usize, b: usize, r: f64, lambda: f64 },
}

fn weighted_samples(d: &Dataset, smooth: Option<SmoothTerm>) -> Vec<WeightedSample> {
    let mut out: Vec<WeightedSample> =
        d.samples().iter().map(|s| WeightedSample { a: s.a, b: s.b, r: s.r, w: 1.0 }).collect();
    match smooth {
        None => {}
        Some(SmoothTerm::Update { n, r, lambda }) => {
            if let Some(ws) = out.get_mut(n) {
                ws.r += lambda * (r - ws.r);
            }
        }
        Some(SmoothTerm::Append { a, b, r, lambda }) => {
            out.push(WeightedSample { a, b, r, w: lambda });
        }
    }
    out
}

fn check_dims(cfg: &ModelConfig, d: &Dataset, beta: Option<&DVector<f64>>) -> Result<()> {
    if cfg.num_alternatives() != d.num_alternatives() {
        return Err(Error::DimensionMismatch {
            what: "dataset and embedding alternative counts",
            expected: cfg.num_alternatives(),
            got: d.num_alternatives(),
        });
    }
    if let Some(b) = beta {
        if b.len() != cfg.feature_dim() {
            return Err(Error::DimensionMismatch {
                what: "beta length and feature dimension",
                expected: cfg.feature_dim(),
                got: b.len(),
            });
        }
    }
    Ok(())
}

fn loss_weighted(cfg: &ModelConfig, samples: &[WeightedSample], beta: &DVector<f64>) -> f64 {
    let theta = cfg.embedding.matrix().tr_mul(beta);
    let mut value = beta.norm_squared() / (2.0 * cfg.sigma * cfg.sigma);
    value += 0.5 * theta.dot(&(&cfg.laplacian * &theta));
    for s in samples {
        let t = theta[s.a] - theta[s.b];
        value += s.w * (cfg.law.phi(t) - s.r * t);
    }
    value
}

fn gradient_weighted(
    cfg: &ModelConfig,
    samples: &[WeightedSample],
    beta: &DVector<f64>,
) -> DVector<f64> {
    let x = cfg.embedding.matrix();
    let theta = x.tr_mul(beta);
    // Accumulate the score-space part first, then pull back through x once.
    let mut score_grad = &cfg.laplacian * &theta;
    for s in samples {
        let t = theta[s.a] - theta[s.b];
        let g = s.w * (cfg.law.phi_prime(t) - s.r);
        score_grad[s.a] += g;
        score_grad[s.b] -= g;
    }
    x * score_grad + beta / (cfg.sigma * cfg.sigma)
}

fn hessian_weighted(
    cfg: &ModelConfig,
    samples: &[WeightedSample],
    beta: &DVector<f64>,
) -> DMatrix<f64> {
    let x = cfg.embedding.matrix();
    let theta = x.tr_mul(beta);
    let a = cfg.num_alternatives();
    // L + H in score space, then sandwich: x (L + H) xᵀ + I/σ².
    let mut curvature = cfg.laplacian.clone();
    for s in samples {
        let w = s.w * cfg.law.phi_second(theta[s.a] - theta[s.b]);
        curvature[(s.a, s.b)] -= w;
        curvature[(s.b, s.a)] -= w;
        curvature[(s.a, s.a)] += w;
        curvature[(s.b, s.b)] += w;
    }
    debug_assert_eq!(curvature.nrows(), a);
    let d = cfg.feature_dim();
    x * curvature * x.transpose() + DMatrix::identity(d, d) / (cfg.sigma * cfg.sigma)
}

/// The loss `𝓛(β|D)`.
///
/// # Errors
/// [`Error::DimensionMismatch`] if `beta` or the dataset disagree with the
/// config's dimensions.
pub fn loss(cfg: &ModelConfig, d: &Dataset, beta: &DVector<f64>) -> Result<f64> {
    check_dims(cfg, d, Some(beta))?;
    Ok(loss_weighted(cfg, &weighted_samples(d, None), beta))
}

/// The gradient `∇𝓛(β|D) = β/σ² + x·L·θ + Σ (Φ'(θ_ab) − r)·x_ab`.
pub fn gradient(cfg: &ModelConfig, d: &Dataset, beta: &DVector<f64>) -> Result<DVector<f64>> {
    check_dims(cfg, d, Some(beta))?;
    Ok(gradient_weighted(cfg, &weighted_samples(d, None), beta))
}

/// The Hessian `∇²𝓛(β|D) = I/σ² + x·(L + H)·xᵀ`, symmetric positive
/// definite with spectrum bounded below by `1/σ²`.
pub fn hessian(cfg: &ModelConfig, d: &Dataset, beta: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_dims(cfg, d, Some(beta))?;
    Ok(hessian_weighted(cfg, &weighted_samples(d, None), beta))
}

fn newton_minimize(
    cfg: &ModelConfig,
    samples: &[WeightedSample],
    opts: &SolverOptions,
) -> Result<FitResult> {
    let dim = cfg.feature_dim();
    let mut beta = match &opts.initial_beta {
        Some(b0) => {
            if b0.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "initial beta length and feature dimension",
                    expected: dim,
                    got: b0.len(),
                });
            }
            b0.clone()
        }
        None => DVector::zeros(dim),
    };
    // Tolerance anchored at the origin so restarts share one stopping rule.
    let grad_at_origin = gradient_weighted(cfg, samples, &DVector::zeros(dim)).norm();
    let tol = opts.tol_factor * grad_at_origin.max(1.0);

    let mut grad = gradient_weighted(cfg, samples, &beta);
    for iteration in 0..opts.max_iterations {
        let grad_norm = grad.norm();
        if grad_norm <= tol {
            let theta_star = cfg.embedding.matrix().tr_mul(&beta);
            return Ok(FitResult { beta_star: beta, theta_star, grad_norm, iterations: iteration });
        }
        let hess = hessian_weighted(cfg, samples, &beta);
        let step = hess
            .cholesky()
            .ok_or_else(|| Error::Numerical("Newton system not positive definite".into()))?
            .solve(&(-&grad));
        // Armijo backtracking: halve until sufficient decrease. Once the
        // predicted decrement drops below float noise on the loss itself the
        // comparison is meaningless; take the full (locally safe) Newton step.
        let value = loss_weighted(cfg, samples, &beta);
        let slope = grad.dot(&step);
        if -slope <= 1e-13 * value.abs().max(1.0) {
            beta += step;
        } else {
            let mut t = 1.0;
            let mut candidate = &beta + &step;
            let mut halvings = 0;
            while loss_weighted(cfg, samples, &candidate) > value + opts.armijo_c * t * slope {
                t *= 0.5;
                halvings += 1;
                if halvings > 60 {
                    return Err(Error::Numerical("line search stalled below machine step".into()));
                }
                candidate = &beta + &step * t;
            }
            beta = candidate;
        }
        grad = gradient_weighted(cfg, samples, &beta);
    }
    Err(Error::NotConverged { grad_norm: grad.norm(), iterations: opts.max_iterations })
}

/// Minimizes `𝓛(·|D)` and returns `β*`, `θ* = xᵀβ*`, and diagnostics.
///
/// Deterministic given its inputs; the default tolerance is
/// `1e-10 · max(1, ‖∇𝓛(0)‖)`.
///
/// # Errors
/// Dimension mismatches, out-of-range comparison values,
/// [`Error::NotConverged`] past the iteration cap.
pub fn fit(cfg: &ModelConfig, d: &Dataset, opts: &SolverOptions) -> Result<FitResult> {
    check_dims(cfg, d, None)?;
    d.validate_range(cfg.law)?;
    newton_minimize(cfg, &weighted_samples(d, None), opts)
}

/// Classic GBT: [`fit`] with the identity embedding and no diffusion prior.
pub fn fit_classic_gbt(law: RootLaw, sigma: f64, d: &Dataset) -> Result<FitResult> {
    let cfg = ModelConfig::classic(law, sigma, d.num_alternatives());
    fit(&cfg, d, &SolverOptions::default())
}

/// Minimizes the smoothened loss `𝓛_λ(β | D, o)` interpolating between `D`
/// (`λ = 0`) and `o(D)` (`λ = 1`).
///
/// For an update, entry `n`'s comparison value moves linearly to its new
/// value; for an append, the new sample's comparison term enters with weight
/// `λ`. Only these two operations are differentiable edits; exchange and
/// shuffle are rejected.
///
/// # Errors
/// [`Error::InvalidParameter`] for non-differentiable operations or `λ`
/// outside `[0, 1]`; otherwise as [`fit`].
pub fn smoothened_fit(
    cfg: &ModelConfig,
    d: &Dataset,
    op: &DatasetOp,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<FitResult> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    check_dims(cfg, d, None)?;
    d.validate_range(cfg.law)?;
    let smooth = match op {
        DatasetOp::Update { n, r } => {
            if !cfg.law.contains(*r) {
                return Err(Error::ComparisonOutOfRange { value: *r, law: cfg.law.name() });
            }
            SmoothTerm::Update { n: *n, r: *r, lambda }
        }
        DatasetOp::Append { a, b, r } => {
            if !cfg.law.contains(*r) {
                return Err(Error::ComparisonOutOfRange { value: *r, law: cfg.law.name() });
            }
            if *a >= cfg.num_alternatives() || *b >= cfg.num_alternatives() {
                return Err(Error::AlternativeOutOfBounds {
                    id: *a.max(b),
                    num_alternatives: cfg.num_alternatives(),
                });
            }
            SmoothTerm::Append { a: *a, b: *b, r: *r, lambda }
        }
        DatasetOp::Exchange { .. } | DatasetOp::Shuffle { .. } => {
            return Err(Error::InvalidParameter(
                "smoothened loss is defined for append and update operations only".into(),
            ));
        }
    };
    newton_minimize(cfg, &weighted_samples(d, Some(smooth)), opts)
}
