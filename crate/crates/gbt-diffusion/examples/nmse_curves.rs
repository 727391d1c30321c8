//! Estimation error on synthetic ground truth: how the choice of embedding
//! changes normalized mean squared error as the feature dimension or the
//! number of comparisons grows. Scaled-down desk runs of the two curve
//! experiments the CLI exposes as `gbt experiment nmse-vs-d` and
//! `gbt experiment nmse-vs-n`.
//!
//! Run with: `cargo run --release --example nmse_curves`

use gbt_diffusion::experiment::{
    run_nmse_vs_count, run_nmse_vs_dim, ExperimentResult, NmseVsCountOptions, NmseVsDimOptions,
};
use gbt_diffusion::io;
use gbt_diffusion::plot::render_line_chart;
use gbt_diffusion::DEFAULT_SEED;

fn print_series(rows: &[ExperimentResult], coord: &str) {
    let mut names: Vec<&str> = Vec::new();
    for row in rows {
        if !names.contains(&row.series.as_str()) {
            names.push(&row.series);
        }
    }
    for series in names {
        let points: Vec<String> = rows
            .iter()
            .filter(|r| r.series == series)
            .map(|r| {
                format!("{}={}: {:.3}±{:.3}", coord, r.coord(coord).unwrap(), r.estimate, r.stderr)
            })
            .collect();
        println!("  {series:<18} {}", points.join("  "));
    }
}

fn main() -> gbt_diffusion::Result<()> {
    // --- nMSE vs feature dimension ----------------------------------------
    // Ground truth lives on a full D-dimensional Gaussian embedding. The
    // fitter sees either that full embedding, plain identity features, or a
    // fresh (misspecified) Gaussian draw. Knowing the right features helps
    // most when they are scarce.
    let dim_opts = NmseVsDimOptions {
        alternatives: 8,
        comparisons: 60,
        dims: vec![1, 2, 4, 6],
        n_seeds: 10,
        seed: DEFAULT_SEED,
    };
    let dim_rows = run_nmse_vs_dim(&dim_opts)?;
    println!("nMSE vs feature dimension (A = 8, N = 60, 10 seeds):");
    print_series(&dim_rows, "d");

    for d in &dim_opts.dims {
        let at = |series: &str| {
            dim_rows
                .iter()
                .find(|r| r.series == series && r.coord("d") == Some(*d as f64))
                .expect("series covers every dim")
        };
        let full = at("full_embedding");
        let identity = at("identity");
        assert!(
            full.estimate <= identity.estimate + 2.0 * (full.stderr + identity.stderr),
            "the true embedding must not lose to identity features at D = {d}"
        );
    }
    println!("  -> the true embedding never loses to identity features\n");

    // --- nMSE vs comparison count ------------------------------------------
    // Ground truth is one-hot over two classes: within a class, alternatives
    // share their score. The one-hot fitter exploits that and needs far
    // fewer comparisons; the classic fitter must estimate every alternative
    // separately. At N = 0 both predict zero scores, so nMSE is exactly 1.
    let count_opts = NmseVsCountOptions {
        partition: vec![4, 4],
        counts: vec![0, 10, 20, 40],
        n_seeds: 10,
        seed: DEFAULT_SEED,
    };
    let count_rows = run_nmse_vs_count(&count_opts)?;
    println!("nMSE vs comparison count (one-hot classes [4, 4], 10 seeds):");
    print_series(&count_rows, "n");

    for row in count_rows.iter().filter(|r| r.coord("n") == Some(0.0)) {
        assert_eq!(row.estimate, 1.0, "with no data the MAP fit is 0, so nMSE is exactly 1");
    }
    let at = |series: &str, n: f64| {
        count_rows
            .iter()
            .find(|r| r.series == series && r.coord("n") == Some(n))
            .expect("series covers every count")
    };
    let one_hot = at("one_hot", 10.0);
    let classic = at("classic", 10.0);
    assert!(one_hot.estimate <= classic.estimate + 2.0 * (one_hot.stderr + classic.stderr));
    println!("  -> class features pay off most in the scarce-data regime (N = 10)");

    // Persist both curves the same way the CLI does.
    let out_d = std::env::temp_dir().join("gbt_example_nmse_vs_d");
    io::write_experiment_dir(
        &out_d,
        &dim_rows,
        &serde_json::json!({"experiment": "nmse-vs-d", "seed": DEFAULT_SEED}),
        &render_line_chart(&dim_rows, "d", "nMSE", "Error vs feature dimension"),
    )?;
    let out_n = std::env::temp_dir().join("gbt_example_nmse_vs_n");
    io::write_experiment_dir(
        &out_n,
        &count_rows,
        &serde_json::json!({"experiment": "nmse-vs-n", "seed": DEFAULT_SEED}),
        &render_line_chart(&count_rows, "n", "nMSE", "Error vs comparison count"),
    )?;
    println!("\nwrote {} and {}", out_d.display(), out_n.display());
    Ok(())
}
