//! Every pipeline stage on the quick configuration. Pass an output directory
//! as the first argument; a temporary directory is used otherwise.

use std::path::PathBuf;

use mqml::pipeline::{ModelChoice, Pipeline, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/quick.toml");
    let cfg = PipelineConfig::load(cfg_path)?;
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("mqml-example"));
    let p = Pipeline::new(cfg, &out)?;
    for m in p.run_all(ModelChoice::Qnn32)? {
        println!("{:>9}  {} outputs", m.stage, m.outputs.len());
    }
    p.train(ModelChoice::Lr)?;
    let e = p.evaluate(ModelChoice::Lr)?;
    println!(
        "LR test accuracy {}",
        e.summary["splits"]["test"]["accuracy"]
    );
    println!("artifacts in {}", out.display());
    Ok(())
}
