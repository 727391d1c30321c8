//! Symmetric-matrix predicates and utilities around graph Laplacians.
//!
//! Three matrix classes recur throughout the crate:
//!
//! * **Laplacian**: symmetric, nonpositive off-diagonal, zero row sums.
//!   Encodes a weighted similarity graph; used as the diffusion prior `L`
//!   and as the adversarial `Y` in goodness checks.
//! * **Super-Laplacian**: symmetric, nonpositive off-diagonal, *strictly*
//!   positive row sums (diagonal strictly dominates). Inverses of these are
//!   max-diagonally dominant, which is the algebraic heart of the
//!   monotonicity guarantees.
//! * **Max-diagonally dominant**: every row's diagonal entry is at least
//!   every off-diagonal entry of that row.
//!
//! Matrices are plain [`DMatrix<f64>`]; the predicates take a tolerance
//! relative to the largest absolute entry, defaulting to [`PREDICATE_TOL`].
//! All solves are dense: the crate targets desk scale (hundreds of
//! alternatives), where SPD factorizations are microseconds.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::root_law::RootLaw;

/// Default relative tolerance for matrix predicates: double-precision
/// factorization error at desk scale.
pub const PREDICATE_TOL: f64 = 1e-9;

/// Largest absolute entry, floored at 1 so tolerances stay meaningful for
/// all-zero and tiny matrices.
fn scale(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(1.0_f64, |acc, &v| acc.max(v.abs()))
}

/// Whether `m` is symmetric within `tol` relative to its largest entry.
pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let eps = tol * scale(m);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > eps {
                return false;
            }
        }
    }
    true
}

/// Signed satisfaction margin for the Laplacian predicate.
///
/// Minimum over all constraints of their slack: `-M_ab` for off-diagonal
/// entries (which must be `<= 0`) and `-|row sum|` for rows (which must be
/// `0`). Nonnegative (up to tolerance) iff `m` is a Laplacian; an exact
/// Laplacian has margin `0`.
pub fn laplacian_margin(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut margin = f64::INFINITY;
    for a in 0..n {
        let mut row_sum = 0.0;
        for b in 0..n {
            row_sum += m[(a, b)];
            if a != b {
                margin = margin.min(-m[(a, b)]);
            }
        }
        margin = margin.min(-row_sum.abs());
    }
    margin
}

/// Whether `m` is a Laplacian matrix: off-diagonal `<= 0`, row sums `= 0`.
///
/// # Panics
/// If `m` is not symmetric within `tol` (contract violation).
pub fn is_laplacian(m: &DMatrix<f64>, tol: f64) -> bool {
    assert!(is_symmetric(m, tol), "is_laplacian: matrix must be symmetric");
    laplacian_margin(m) >= -tol * scale(m)
}

/// Signed margins for the super-Laplacian predicate:
/// `(off_diagonal_margin, dominance_margin)`.
///
/// The first is `min(-M_ab)` over off-diagonal entries (must be `>= 0` up to
/// tolerance); the second is the minimum row sum (must be `> 0` strictly).
pub fn super_laplacian_margins(m: &DMatrix<f64>) -> (f64, f64) {
    let n = m.nrows();
    let mut off = f64::INFINITY;
    let mut dom = f64::INFINITY;
    for a in 0..n {
        let mut row_sum = 0.0;
        for b in 0..n {
            row_sum += m[(a, b)];
            if a != b {
                off = off.min(-m[(a, b)]);
            }
        }
        dom = dom.min(row_sum);
    }
    if n == 1 {
        off = f64::INFINITY; // no off-diagonal constraints
    }
    (off, dom)
}

/// Whether `m` is super-Laplacian: off-diagonal `<= 0` and every diagonal
/// entry *strictly* dominates, `M_aa > -sum of its off-diagonal row`.
///
/// # Panics
/// If `m` is not symmetric within `tol` (contract violation).
pub fn is_super_laplacian(m: &DMatrix<f64>, tol: f64) -> bool {
    assert!(is_symmetric(m, tol), "is_super_laplacian: matrix must be symmetric");
    let eps = tol * scale(m);
    let (off, dom) = super_laplacian_margins(m);
    off >= -eps && dom > eps
}

/// The single-edge graph Laplacian `S_ab`: `+1` at `(a,a)` and `(b,b)`,
/// `-1` at `(a,b)` and `(b,a)`, zero elsewhere.
pub fn single_edge(n: usize, a: usize, b: usize) -> DMatrix<f64> {
    assert!(a != b && a < n && b < n, "single_edge: need distinct a, b < n");
    let mut m = DMatrix::zeros(n, n);
    m[(a, a)] = 1.0;
    m[(b, b)] = 1.0;
    m[(a, b)] = -1.0;
    m[(b, a)] = -1.0;
    m
}

/// Laplacian of the complete graph on `n` vertices: `n·I - J`.
pub fn complete_graph(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |a, b| if a == b { n as f64 - 1.0 } else { -1.0 })
}

/// Negated-curvature Hessian of the comparison terms, as a graph Laplacian
/// over alternatives.
///
/// `H_ab = -N_ab · Φ''(θ_ab)` summed over every occurrence of the pair
/// `{a, b}` in the dataset (duplicates accumulate), with the diagonal set to
/// row absolute sums. Always passes [`is_laplacian`]: `Φ'' > 0` makes each
/// pair contribute a nonnegatively weighted edge.
pub fn hessian_of_dataset(d: &Dataset, theta: &DVector<f64>, law: RootLaw) -> DMatrix<f64> {
    let n = d.num_alternatives();
    assert_eq!(theta.len(), n, "hessian_of_dataset: theta length must equal A");
    let mut h = DMatrix::zeros(n, n);
    for s in d.samples() {
        let w = law.phi_second(theta[s.a] - theta[s.b]);
        h[(s.a, s.b)] -= w;
        h[(s.b, s.a)] -= w;
        h[(s.a, s.a)] += w;
        h[(s.b, s.b)] += w;
    }
    h
}

/// Minimal diagonal-dominance gap of `(I + Y)^{-1}`:
/// `min over a != b of (I+Y)^{-1}_aa - (I+Y)^{-1}_ab`.
///
/// Strictly positive for every Laplacian `Y`; it measures how much identity
/// padding an embedding needs before `Y` cannot break its goodness.
///
/// # Errors
/// [`Error::Numerical`] if the SPD factorization fails (cannot happen for a
/// true Laplacian, whose shifted spectrum is `>= 1`).
pub fn diag_dom(y: &DMatrix<f64>) -> Result<f64> {
    let n = y.nrows();
    let shifted = DMatrix::identity(n, n) + y;
    let inv = spd_inverse(&shifted)?;
    let mut gap = f64::INFINITY;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                gap = gap.min(inv[(a, a)] - inv[(a, b)]);
            }
        }
    }
    Ok(gap)
}

/// Worst max-diagonal-dominance gap and where it occurs:
/// `(min over a != b of M_aa - M_ab, argmin pair)`.
pub fn diag_dominance_margin(m: &DMatrix<f64>) -> (f64, (usize, usize)) {
    let n = m.nrows();
    let mut gap = f64::INFINITY;
    let mut arg = (0, 0);
    for a in 0..n {
        for b in 0..n {
            if a != b && m[(a, a)] - m[(a, b)] < gap {
                gap = m[(a, a)] - m[(a, b)];
                arg = (a, b);
            }
        }
    }
    (gap, arg)
}

/// Whether every row's diagonal entry is `>=` every off-diagonal entry of
/// that row, within `tol` relative to the largest entry.
pub fn max_diag_dominant(m: &DMatrix<f64>, tol: f64) -> bool {
    m.nrows() < 2 || diag_dominance_margin(m).0 >= -tol * scale(m)
}

/// Test oracle for the super-Laplacian inverse property: `Δ^{-1}` of a
/// super-Laplacian is expected to be max-diagonally dominant, always.
///
/// # Errors
/// [`Error::Numerical`] if the factorization fails.
pub fn inverse_dominance_check(delta: &DMatrix<f64>) -> Result<bool> {
    let inv = spd_inverse(delta)?;
    Ok(max_diag_dominant(&inv, PREDICATE_TOL))
}

/// Random weighted-graph Laplacian: Erdős–Rényi edges with probability
/// `1/2`, half-normal weights, diagonal set to row sums. Covers everything
/// from the empty graph to dense similarity structures.
pub fn random_laplacian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen::<bool>() {
                let w: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal);
                let w = w.abs();
                m[(a, b)] = -w;
                m[(b, a)] = -w;
                m[(a, a)] += w;
                m[(b, b)] += w;
            }
        }
    }
    m
}

/// Random super-Laplacian: a [`random_laplacian`] plus `κ·I` with
/// `κ ~ U(0.1, 2)`.
pub fn random_super_laplacian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let kappa: f64 = rng.gen_range(0.1..2.0);
    random_laplacian(n, rng) + DMatrix::from_diagonal_element(n, n, kappa)
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    m.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Numerical("Cholesky factorization failed: matrix not SPD".into()))
}

/// Solves `A · X = B` for general square `A` via LU with partial pivoting.
pub fn lu_solve(a: DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical("LU solve failed: matrix singular".into()))
}

/// Symmetric positive-semidefinite square root via an eigendecomposition,
/// with tiny negative eigenvalues (roundoff) clamped to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}
