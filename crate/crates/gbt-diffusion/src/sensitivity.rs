//! Derivatives of fitted scores along a smoothened dataset edit.
//!
//! For the two differentiable edits (update, append), the minimizer
//! `θ*_μ` of the smoothened loss moves smoothly with the interpolation
//! weight `μ`, and its derivative has a closed form obtained from the
//! implicit-function theorem:
//!
//! * update of entry `n ≃ (a, b, s)` to value `r`:
//!   `dθ*/dμ = (r − s) · (I + X(L + H))⁻¹ X e_ab`
//! * append of `(a, b, r)`:
//!   `dθ*/dμ = (r − Φ'(θ*_ab)) · (I + X(L + H + μ·Φ''(θ*_ab)·S_ab))⁻¹ X e_ab`
//!
//! where `X = σ²·xᵀx` is the scaled Gram matrix, `H` is the comparison
//! curvature of the *unedited* dataset at `θ*_μ`, `S_ab = e_ab e_abᵀ`, and
//! `e_ab = e_a − e_b`. Integrating the derivative over `μ ∈ [0, 1]`
//! reproduces the total score change `θ*[o(D)] − θ*[D]`; this module also
//! provides that quadrature as an independent cross-check.

use nalgebra::{DMatrix, DVector};

use crate::dataset::{Dataset, DatasetOp};
use crate::error::{Error, Result};
use crate::laplacian::{hessian_of_dataset, lu_solve};
use crate::model::{smoothened_fit, FitResult, ModelConfig, SolverOptions};

/// The scaled Gram matrix `X = σ²·xᵀx` appearing in both derivative
/// formulas.
pub fn scaled_gram(cfg: &ModelConfig) -> DMatrix<f64> {
    cfg.embedding().gram() * (cfg.sigma() * cfg.sigma())
}

/// A differentiable edit frozen at one interpolation point `μ`, bundled with
/// the pieces every derivative evaluation needs.
#[derive(Debug, Clone)]
pub struct SensitivitySetup<'a> {
    cfg: &'a ModelConfig,
    dataset: &'a Dataset,
    op: &'a DatasetOp,
    mu: f64,
    scaled_gram: DMatrix<f64>,
}

impl<'a> SensitivitySetup<'a> {
    /// Builds a setup, validating that `op` is an update or an append (the
    /// two differentiable kinds), that `μ ∈ [0, 1]`, and that the edit's
    /// parameters are admissible for `cfg`.
    ///
    /// # Errors
    /// [`Error::InvalidParameter`] for exchange/shuffle or `μ` outside
    /// `[0, 1]`; [`Error::ComparisonOutOfRange`],
    /// [`Error::AlternativeOutOfBounds`], or [`Error::SelfComparison`] for
    /// inadmissible edit parameters; [`Error::DimensionMismatch`] if `cfg`
    /// and `dataset` disagree on the number of alternatives.
    pub fn new(
        cfg: &'a ModelConfig,
        dataset: &'a Dataset,
        op: &'a DatasetOp,
        mu: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParameter(format!("mu must lie in [0, 1], got {mu}")));
        }
        if cfg.num_alternatives() != dataset.num_alternatives() {
            return Err(Error::DimensionMismatch {
                what: "dataset and embedding alternative counts",
                expected: cfg.num_alternatives(),
                got: dataset.num_alternatives(),
            });
        }
        match op {
            DatasetOp::Update { r, .. } => {
                if !cfg.law().contains(*r) {
                    return Err(Error::ComparisonOutOfRange { value: *r, law: cfg.law().name() });
                }
            }
            DatasetOp::Append { a, b, r } => {
                if !cfg.law().contains(*r) {
                    return Err(Error::ComparisonOutOfRange { value: *r, law: cfg.law().name() });
                }
                let n = cfg.num_alternatives();
                if *a >= n || *b >= n {
                    return Err(Error::AlternativeOutOfBounds {
                        id: *a.max(b),
                        num_alternatives: n,
                    });
                }
                if a == b {
                    return Err(Error::SelfComparison(*a));
                }
            }
            DatasetOp::Exchange { .. } | DatasetOp::Shuffle { .. } => {
                return Err(Error::InvalidParameter(
                    "sensitivity is defined for append and update operations only".into(),
                ));
            }
        }
        let scaled_gram = scaled_gram(cfg);
        Ok(SensitivitySetup { cfg, dataset, op, mu, scaled_gram })
    }

    /// The model configuration this setup differentiates.
    pub fn cfg(&self) -> &ModelConfig {
        self.cfg
    }

    /// The unedited dataset.
    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    /// The differentiable edit.
    pub fn op(&self) -> &DatasetOp {
        self.op
    }

    /// The interpolation point `μ`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// The cached scaled Gram matrix `σ²·xᵀx`.
    pub fn scaled_gram(&self) -> &DMatrix<f64> {
        &self.scaled_gram
    }

    /// Solves the smoothened problem at this setup's `μ`, producing the fit
    /// the derivative formulas must be evaluated at.
    pub fn fit(&self, opts: &SolverOptions) -> Result<FitResult> {
        smoothened_fit(self.cfg, self.dataset, self.op, self.mu, opts)
    }

    /// The derivative vector `dθ*_μ/dμ` for this setup's edit, evaluated at
    /// `fit_at_mu` (which must be the minimizer at this setup's `μ`; use
    /// [`SensitivitySetup::fit`]).
    pub fn score_derivative(&self, fit_at_mu: &FitResult) -> Result<DVector<f64>> {
        match self.op {
            DatasetOp::Update { n, r } => sensitivity_update(self, fit_at_mu, *n, *r),
            DatasetOp::Append { a, b, r } => sensitivity_append(self, fit_at_mu, *a, *b, *r),
            // Unreachable per the constructor, but keep the error honest.
            _ => Err(Error::InvalidParameter(
                "sensitivity is defined for append and update operations only".into(),
            )),
        }
    }
}

fn check_fit_dims(setup: &SensitivitySetup, fit_at_mu: &FitResult) -> Result<()> {
    let a = setup.cfg.num_alternatives();
    if fit_at_mu.theta_star.len() != a {
        return Err(Error::DimensionMismatch {
            what: "fit score length and alternative count",
            expected: a,
            got: fit_at_mu.theta_star.len(),
        });
    }
    Ok(())
}

/// Solves `(I + X·M)·v = X·e_ab` for `v`, the common core of both formulas.
fn resolvent_times_gram_edge(
    scaled_gram: &DMatrix<f64>,
    m: &DMatrix<f64>,
    a: usize,
    b: usize,
) -> Result<DVector<f64>> {
    let n = scaled_gram.nrows();
    let k = DMatrix::identity(n, n) + scaled_gram * m;
    // X·e_ab is the difference of two columns of the (symmetric) X.
    let rhs =
        DMatrix::from_fn(n, 1, |i, _| scaled_gram[(i, a)] - scaled_gram[(i, b)]);
    let v = lu_solve(k, &rhs)?;
    Ok(v.column(0).clone_owned())
}

/// Derivative of the smoothened minimizer for an update of entry `n` to
/// value `r`:
///
/// `dθ*/dμ = (r − s) · (I + X(L + H))⁻¹ X e_ab`,
///
/// with `H` the comparison curvature at `θ*_μ`. Updating a value never
/// changes curvature (second derivatives do not see the linear judgment
/// term), so `H` here is the full dataset's curvature regardless of `μ`.
/// An update addressing a missing entry is the identity edit, so its
/// derivative is the zero vector.
///
/// # Errors
/// Dimension mismatches between `fit_at_mu` and the setup; numerical
/// failure of the linear solve (cannot occur for admissible inputs: the
/// system matrix is similar to an SPD matrix with spectrum ≥ 1).
pub fn sensitivity_update(
    setup: &SensitivitySetup,
    fit_at_mu: &FitResult,
    n: usize,
    r: f64,
) -> Result<DVector<f64>> {
    check_fit_dims(setup, fit_at_mu)?;
    let num = setup.cfg.num_alternatives();
    let Some(sample) = setup.dataset.get(n) else {
        return Ok(DVector::zeros(num));
    };
    let h = hessian_of_dataset(setup.dataset, &fit_at_mu.theta_star, setup.cfg.law());
    let m = setup.cfg.laplacian() + h;
    let v = resolvent_times_gram_edge(&setup.scaled_gram, &m, sample.a, sample.b)?;
    Ok(v * (r - sample.r))
}

/// Derivative of the smoothened minimizer for an append of `(a, b, r)`:
///
/// `dθ*/dμ = (r − Φ'(θ*_ab)) · (I + X(L + H + μ·Φ''(θ*_ab)·S_ab))⁻¹ X e_ab`,
///
/// all quantities evaluated at `θ*_μ`; `H` is the curvature of the
/// unedited dataset and the `μ`-weighted rank-one term is the appended
/// sample's own curvature.
///
/// # Errors
/// [`Error::SelfComparison`] / [`Error::AlternativeOutOfBounds`] for bad
/// pair indices; otherwise as [`sensitivity_update`].
pub fn sensitivity_append(
    setup: &SensitivitySetup,
    fit_at_mu: &FitResult,
    a: usize,
    b: usize,
    r: f64,
) -> Result<DVector<f64>> {
    check_fit_dims(setup, fit_at_mu)?;
    let num = setup.cfg.num_alternatives();
    if a >= num || b >= num {
        return Err(Error::AlternativeOutOfBounds { id: a.max(b), num_alternatives: num });
    }
    if a == b {
        return Err(Error::SelfComparison(a));
    }
    let law = setup.cfg.law();
    let theta_ab = fit_at_mu.theta_star[a] - fit_at_mu.theta_star[b];
    let mut m = setup.cfg.laplacian()
        + hessian_of_dataset(setup.dataset, &fit_at_mu.theta_star, law);
    let w = setup.mu * law.phi_second(theta_ab);
    m[(a, a)] += w;
    m[(b, b)] += w;
    m[(a, b)] -= w;
    m[(b, a)] -= w;
    let v = resolvent_times_gram_edge(&setup.scaled_gram, &m, a, b)?;
    Ok(v * (r - law.phi_prime(theta_ab)))
}

/// Reconstructs the total score change `θ*[o(D)] − θ*[D]` by integrating
/// the sensitivity derivative over `μ ∈ [0, 1]` with composite Simpson
/// quadrature on `points` equispaced nodes (odd, at least 3). Each node
/// costs one smoothened solve.
///
/// # Errors
/// [`Error::InvalidParameter`] for an even or too-small `points`;
/// otherwise whatever the setup construction or solves report.
pub fn path_integral_score_change(
    cfg: &ModelConfig,
    d: &Dataset,
    op: &DatasetOp,
    points: usize,
    opts: &SolverOptions,
) -> Result<DVector<f64>> {
    if points < 3 || points % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "Simpson quadrature needs an odd number of points >= 3, got {points}"
        )));
    }
    let h = 1.0 / (points - 1) as f64;
    let mut integral = DVector::zeros(cfg.num_alternatives());
    for i in 0..points {
        let mu = (i as f64 * h).min(1.0);
        let setup = SensitivitySetup::new(cfg, d, op, mu)?;
        let fit_at_mu = setup.fit(opts)?;
        let derivative = setup.score_derivative(&fit_at_mu)?;
        let weight = if i == 0 || i == points - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        integral += derivative * (weight * h / 3.0);
    }
    Ok(integral)
}
