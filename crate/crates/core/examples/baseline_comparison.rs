// Spectral clustering with and without the density filter on the same
// sample. Without it, isolated background points each add a zero
// eigenvalue.

use levelset_spectral::{run_baseline, run_pipeline, PipelineConfig};

pub fn run_example() -> levelset_spectral::Result<()> {
    let config = PipelineConfig { seed: 2, ..PipelineConfig::default() };
    let filtered = run_pipeline(&config)?.summary;
    let plain = run_baseline(&config)?.summary;
    println!("{:>10} {:>6} {:>8} {:>11}", "", "points", "ell_hat", "components");
    for (name, s) in [("level set", &filtered), ("baseline", &plain)] {
        println!("{name:>10} {:>6} {:>8} {:>11}", s.jn, s.ell_hat, s.component_count);
    }
    Ok(())
}

fn main() -> levelset_spectral::Result<()> {
    run_example()
}
