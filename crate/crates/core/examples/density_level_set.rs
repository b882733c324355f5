// Picks a KDE bandwidth by least-squares cross-validation and extracts the
// level set that keeps 85% of the sample.

use levelset_spectral::density::default_bandwidth_grid;
use levelset_spectral::{
    extract_level_set, kde_fit, lscv_bandwidth, select_level_by_retention, simulate_mixture,
    MixtureSpec,
};

pub fn run_example() -> levelset_spectral::Result<()> {
    let points = simulate_mixture(&MixtureSpec::default().with_seed(3), 1900)?;
    let b = lscv_bandwidth(&points, &default_bandwidth_grid(&points))?;
    let model = kde_fit(&points, b)?;
    let t = select_level_by_retention(&model.eval_sample(), 0.85)?;
    let level_set = extract_level_set(&model, t)?;
    println!("bandwidth {b:.4}, level t = {t:.4}");
    println!("kept {} of {} points", level_set.retained_len(), level_set.sample_len());

    let mut dropped = [0usize; 4];
    let labels = points.labels().expect("labeled");
    for i in (0..points.len()).filter(|&i| !level_set.is_retained(i)) {
        dropped[labels[i]] += 1;
    }
    println!("dropped per component: {dropped:?}");
    Ok(())
}

fn main() -> levelset_spectral::Result<()> {
    run_example()
}
