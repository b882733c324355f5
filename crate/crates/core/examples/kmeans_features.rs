// Runs seeded k-means with restarts and scores the result with the adjusted
// Rand index.

use levelset_spectral::cluster::to_labels;
use levelset_spectral::{adjusted_rand_index, kmeans};

pub fn run_example() -> levelset_spectral::Result<()> {
    let centers = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]];
    let mut rows = Vec::new();
    let mut truth = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        for k in 0..20 {
            let a = k as f64 * 0.7;
            rows.push(vec![center[0] + 0.5 * a.sin(), center[1] + 0.5 * a.cos()]);
            truth.push(c);
        }
    }
    let fit = kmeans(&rows, 3, 10, 42)?;
    println!("inertia {:.4} after {} iterations (restart {})", fit.inertia, fit.iterations, fit.restart);
    for c in &fit.centroids {
        println!("centroid {c:.3?}");
    }
    let ari = adjusted_rand_index(&to_labels(&fit.assignments), &to_labels(&truth))?;
    println!("ARI against the generating centers: {ari:.3}");
    Ok(())
}

fn main() -> levelset_spectral::Result<()> {
    run_example()
}
