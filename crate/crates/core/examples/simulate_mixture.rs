// Draws the four-component planar mixture and prints per-component counts.

use levelset_spectral::{simulate_mixture, MixtureSpec};

pub fn run_example() -> levelset_spectral::Result<()> {
    let spec = MixtureSpec::default().with_seed(7);
    let points = simulate_mixture(&spec, 1900)?;
    let mut counts = [0usize; 4];
    for &l in points.labels().expect("simulated points are labeled") {
        counts[l] += 1;
    }
    let names = ["gaussian", "inner ring", "outer ring", "background"];
    for (name, (count, p)) in names.iter().zip(counts.iter().zip(&spec.proportions)) {
        println!("{name:>10}: {count:>4} points (expected {:.0})", p * points.len() as f64);
    }
    Ok(())
}

fn main() -> levelset_spectral::Result<()> {
    run_example()
}
