//! Hunting monotonicity violations across random instance families, then
//! shrinking the first hit to a minimal witness and replaying it from a
//! saved bundle.
//!
//! Run with: `cargo run --example hunt_demo`

use gbt_diffusion::io;
use gbt_diffusion::monotonicity::{
    hunt_violation, EmbeddingFamily, InstanceGenerator, MONOTONE_SLACK,
};
use gbt_diffusion::rng::stream;
use gbt_diffusion::{RootLaw, DEFAULT_SEED};

fn main() -> gbt_diffusion::Result<()> {
    // --- Families with a safety certificate never produce a witness -------
    // Identity embeddings and diffusion-verified random embeddings are
    // certified monotone, so the hunt comes back empty.
    for family in [EmbeddingFamily::Identity, EmbeddingFamily::DiffusionVerified] {
        let generator = InstanceGenerator::new(family, RootLaw::Uniform);
        let mut rng = stream(DEFAULT_SEED, 0);
        let witness = hunt_violation(&generator, &mut rng, 40)?;
        println!("{family:?}: {}", if witness.is_none() { "no violation in 40 instances" } else { "violation (unexpected!)" });
        assert!(witness.is_none());
    }

    // --- Scarce random features violate quickly ---------------------------
    // Gaussian embeddings with fewer features than alternatives entangle
    // scores; the hunt finds a violating instance and then shrinks it:
    // dropping trace steps and dataset rows while the violation persists.
    let generator = InstanceGenerator::new(EmbeddingFamily::Gaussian, RootLaw::Uniform);
    let mut rng = stream(DEFAULT_SEED, 1);
    let witness = hunt_violation(&generator, &mut rng, 300)?
        .expect("scarce Gaussian features violate within the budget");
    println!(
        "\nGaussian family: shrunk witness has {} alternatives, {} dataset rows, {} trace ops,",
        witness.dataset.num_alternatives(),
        witness.dataset.len(),
        witness.trace.ops.len()
    );
    println!(
        "  favoring target {} drops its score by {:.6}",
        witness.trace.target, witness.drop
    );

    // Replaying re-fits everything from the stored pieces and must
    // reproduce a failure (not necessarily the same drop to the last bit).
    let replayed = witness.replay(MONOTONE_SLACK)?;
    assert!(!replayed.pass);
    println!("  replay confirms the violation");

    // --- Bundles survive the disk ------------------------------------------
    // The JSON bundle stores the model, dataset, and trace; loading
    // re-verifies that every stored operation actually favors the target,
    // so a tampered bundle is rejected rather than trusted.
    let path = std::env::temp_dir().join("gbt_example_witness.json");
    io::write_witness_bundle(&path, &witness)?;
    let reloaded = io::read_witness_bundle(&path)?;
    let replayed = reloaded.replay(MONOTONE_SLACK)?;
    assert!(!replayed.pass);
    println!("  bundle at {} replays to the same verdict", path.display());

    // --- The reliably-bad family for quick demos ---------------------------
    let generator = InstanceGenerator::new(EmbeddingFamily::Collinear, RootLaw::Uniform);
    let mut rng = stream(DEFAULT_SEED, 2);
    let witness = hunt_violation(&generator, &mut rng, 20)?
        .expect("collinear features violate almost surely");
    println!(
        "\nCollinear family: witness drop {:.6} with {} trace op(s)",
        witness.drop,
        witness.trace.ops.len()
    );
    Ok(())
}
