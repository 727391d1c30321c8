//! How often is a random Gaussian embedding good? Sweeps alternative count
//! A and feature dimension D, estimating the pass probability of the
//! goodness hunt per cell — with and without identity concatenation — and
//! renders the grid as an SVG heatmap.
//!
//! This is a scaled-down desk run (the CLI exposes the full version as
//! `gbt experiment goodness-heatmap`).
//!
//! Run with: `cargo run --release --example goodness_heatmap`

use gbt_diffusion::experiment::{
    run_goodness_heatmap, ExperimentResult, HeatmapMode, HeatmapOptions,
};
use gbt_diffusion::io;
use gbt_diffusion::plot::render_heatmap;
use gbt_diffusion::DEFAULT_SEED;

fn cell<'a>(
    rows: &'a [ExperimentResult],
    series: &str,
    a: usize,
    d: usize,
) -> &'a ExperimentResult {
    rows.iter()
        .find(|r| {
            r.series == series && r.coord("a") == Some(a as f64) && r.coord("d") == Some(d as f64)
        })
        .expect("grid covers every cell")
}

fn main() -> gbt_diffusion::Result<()> {
    let base = HeatmapOptions {
        a_range: (2, 6),
        d_range: (1, 6),
        n_embeddings: 40,
        trials_per: 30,
        mode: HeatmapMode::Plain,
        seed: DEFAULT_SEED,
    };
    // Same seed for both modes: each concatenated embedding pairs with the
    // plain draw it extends, so the comparison is one-to-one.
    let mut rows = run_goodness_heatmap(&base)?;
    rows.extend(run_goodness_heatmap(&HeatmapOptions {
        mode: HeatmapMode::IdentityConcat,
        ..base.clone()
    })?);

    for series in ["plain", "identity_concat"] {
        println!("P(pass) for {series} embeddings, rows A = 2..6, cols D = 1..6:");
        for a in base.a_range.0..=base.a_range.1 {
            let line: Vec<String> = (base.d_range.0..=base.d_range.1)
                .map(|d| format!("{:.2}", cell(&rows, series, a, d).estimate))
                .collect();
            println!("  A={a}: [{}]", line.join(" "));
        }
        println!();
    }

    // The expected shape: pass probability grows with D (more features
    // separate alternatives better), shrinks with A (more alternatives to
    // entangle), and identity concatenation helps in every cell (up to
    // Monte Carlo noise, measured by the cells' standard errors).
    let plain_scarce = cell(&rows, "plain", 6, 1).estimate;
    let plain_rich = cell(&rows, "plain", 6, 6).estimate;
    println!("plain at A=6: D=1 gives {plain_scarce:.2}, D=6 gives {plain_rich:.2}");
    assert!(plain_rich > plain_scarce);
    for a in base.a_range.0..=base.a_range.1 {
        for d in base.d_range.0..=base.d_range.1 {
            let concat = cell(&rows, "identity_concat", a, d);
            let plain = cell(&rows, "plain", a, d);
            let noise = 3.0 * (concat.stderr + plain.stderr);
            assert!(
                concat.estimate + noise >= plain.estimate,
                "concatenation must not hurt: A={a} D={d} {} < {}",
                concat.estimate,
                plain.estimate
            );
        }
    }
    println!("identity concatenation dominates the plain draw in every cell");

    // Persist the full run the same way the CLI does: results.csv for the
    // numbers, meta.json for the provenance, figure.svg for the picture.
    let out = std::env::temp_dir().join("gbt_example_heatmap");
    let svg = render_heatmap(&rows, "d", "a", "P(goodness hunt passes)");
    let meta = serde_json::json!({
        "experiment": "goodness-heatmap",
        "seed": DEFAULT_SEED,
        "embeddings_per_cell": base.n_embeddings,
        "graphs_per_embedding": base.trials_per,
        "series": ["plain", "identity_concat"],
    });
    io::write_experiment_dir(&out, &rows, &meta, &svg)?;
    println!("wrote {}", out.display());
    Ok(())
}
