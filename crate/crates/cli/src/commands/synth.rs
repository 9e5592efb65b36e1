use anyhow::Context;
use speechrisk::synth::{synth_dataset, SynthConfig};

use crate::SynthArgs;

pub fn run(args: SynthArgs) -> anyhow::Result<()> {
    anyhow::ensure!(args.imbalance >= 1.0, "--imbalance must be >= 1");
    anyhow::ensure!(
        (0.0..=1.0).contains(&args.sep),
        "--sep must be in [0, 1], got {}",
        args.sep
    );
    anyhow::ensure!(
        args.min_duration_s > 0.0 && args.min_duration_s <= args.max_duration_s,
        "duration range is empty"
    );
    let config = SynthConfig {
        n_recordings: args.n,
        imbalance: args.imbalance,
        separability: args.sep,
        duration_range_s: (args.min_duration_s, args.max_duration_s),
        sample_rate_hz: args.sample_rate,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let manifest = synth_dataset(&config, &args.out)
        .with_context(|| format!("writing dataset under {}", args.out.display()))?;
    let positives = manifest.rows.iter().filter(|r| r.label == 1).count();
    eprintln!(
        "wrote {} recordings ({} positive / {} negative)",
        manifest.rows.len(),
        positives,
        manifest.rows.len() - positives
    );
    println!("{}", args.out.join("manifest.csv").display());
    Ok(())
}
