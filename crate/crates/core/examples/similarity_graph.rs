// Builds the compact-support similarity graph and checks its components
// against union-find.

use levelset_spectral::graph::{bump_kernel, BUMP_PEAK};
use levelset_spectral::{build_graph, connected_components, min_intercomponent_distance, PointSet};

pub fn run_example() -> levelset_spectral::Result<()> {
    println!("k(0) = {BUMP_PEAK:.6}, k(h/2) = {:.6}", bump_kernel(&[0.5], 1.0));

    // two short chains 1.5 apart
    let rows: Vec<[f64; 2]> = (0..5)
        .map(|k| [0.3 * k as f64, 0.0])
        .chain((0..5).map(|k| [0.3 * k as f64, 1.5]))
        .collect();
    let points = PointSet::from_rows(&rows)?;
    let h = 0.5;
    let g = build_graph(&points, h)?;
    println!("{} vertices, {} stored entries", g.size(), g.stored_entries());
    println!("Q row sums: {:?}", g.markov().row_sums());

    let comps = connected_components(&points, h)?;
    let d_min = min_intercomponent_distance(&points, &comps)?;
    println!("components: {} (labels {:?}), d_min = {d_min}", comps.count, comps.labels);
    Ok(())
}

fn main() -> levelset_spectral::Result<()> {
    run_example()
}
