//! Audit embeddings for the two algebraic properties that guarantee
//! monotone behavior: the *diffusion* predicate (exact, grid-checked) and
//! *goodness* (hunted by Monte Carlo over random comparison graphs).
//!
//! Run with: `cargo run --example check_embedding`

use std::path::Path;

use gbt_diffusion::embedding::{
    default_lambda_grid, dominance_matrix, good_check_monte_carlo, identity_padding_bound,
    is_diffusion_embedding,
};
use gbt_diffusion::laplacian::PREDICATE_TOL;
use gbt_diffusion::rng::stream;
use gbt_diffusion::{Embedding, GoodnessOptions, Verdict, DEFAULT_SEED};

fn main() -> gbt_diffusion::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");

    // --- Diffusion check: one-hot classes pass ---------------------------
    // x is one-hot over classes {1,2,3} and {4,5} stacked with identity
    // features; every shifted Gram inverse on the grid must be
    // super-Laplacian (nonpositive off-diagonal, dominant diagonal).
    let x = Embedding::new(gbt_diffusion::io::load_matrix(
        fixtures.join("one_hot_shift_a5.csv"),
    )?);
    let report = is_diffusion_embedding(&x, &default_lambda_grid(), PREDICATE_TOL)?;
    println!(
        "one-hot + identity embedding: diffusion = {} ({} shifts, worst margin {:.2e})",
        report.pass, report.lambdas_checked, report.margin
    );
    assert!(report.pass);

    // --- Goodness hunt: a 3-alternative concatenation fails --------------
    // Feature columns (0,1), (1,1), (1,0): alternative 1 overlaps both
    // neighbors. One tested graph couples the alternatives so strongly that
    // a comparison favoring 0 raises 1's score *more* than 0's own.
    let x_bad = Embedding::new(gbt_diffusion::io::load_matrix(
        fixtures.join("concat_not_good_a3.csv"),
    )?);
    let mut rng = stream(DEFAULT_SEED, 0);
    let report = good_check_monte_carlo(&x_bad, &GoodnessOptions::default(), &mut rng)?;
    println!("\n3-alternative concatenation: verdict = {:?}", report.verdict);
    assert_eq!(report.verdict, Verdict::NotGood);
    let witness = report.witness.as_ref().expect("not_good always carries a witness");
    println!(
        "  witness graph breaks dominance at entry ({}, {}) by {:.3e}",
        witness.a, witness.b, -witness.margin
    );

    // Recompute the dominance matrix at the witness graph to see the
    // failure directly: row 0 of M = (I + X L)^{-1} X has a larger
    // off-diagonal than diagonal entry.
    let m = dominance_matrix(x_bad.gram(), &witness.y_matrix())?;
    println!("  dominance matrix at the witness graph:");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:+.4}", m[(i, j)])).collect();
        println!("    [{}]", row.join(", "));
    }
    assert!(m[(0, 1)] > m[(0, 0)], "entry (0,1) must dominate the diagonal");

    // --- Rescue by identity padding ---------------------------------------
    // Concatenating scaled identity features restores goodness for any
    // fixed graph: for lambda above the printed bound, [I; x/lambda] keeps
    // max-diagonal dominance at that graph.
    let y = witness.y_matrix();
    let bound = identity_padding_bound(&x_bad, &y, 1.0)?;
    let lambda = 2.0 * bound;
    let padded = x_bad.identity_padded(lambda);
    let m_padded = dominance_matrix(padded.gram(), &y)?;
    let mut dominant = true;
    for i in 0..m_padded.nrows() {
        for j in 0..m_padded.ncols() {
            if i != j && m_padded[(i, j)] > m_padded[(i, i)] {
                dominant = false;
            }
        }
    }
    println!(
        "\nidentity padding: bound lambda > {bound:.3}; at lambda = {lambda:.3} the witness \
         graph is {} dominated",
        if dominant { "again" } else { "still not" }
    );
    assert!(dominant);

    // The padded embedding also survives a fresh hunt.
    let mut rng = stream(DEFAULT_SEED, 1);
    let report = good_check_monte_carlo(&padded, &GoodnessOptions::light(200), &mut rng)?;
    println!(
        "padded embedding hunt: verdict = {:?} after {} graph trials",
        report.verdict, report.trials
    );
    assert_ne!(report.verdict, Verdict::NotGood);
    Ok(())
}
