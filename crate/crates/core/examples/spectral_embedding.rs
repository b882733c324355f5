// Counts the zero eigenvalues of `I - S` and shows that the embedding
// collapses every component to a single point.

use levelset_spectral::spectral::{embed, DEFAULT_ZERO_TOL};
use levelset_spectral::{build_graph, count_zero_eigenvalues, eigendecompose, PointSet};

pub fn run_example() -> levelset_spectral::Result<()> {
    let mut rows = Vec::new();
    for (cx, cy) in [(0.0, 0.0), (2.0, 0.0), (1.0, 2.0)] {
        for k in 0..6 {
            let a = k as f64;
            rows.push([cx + 0.1 * a.cos(), cy + 0.1 * a.sin()]);
        }
    }
    let points = PointSet::from_rows(&rows)?;
    let g = build_graph(&points, 0.5)?;
    let spectrum = eigendecompose(&g, g.size())?;
    let zeros = count_zero_eigenvalues(&spectrum, DEFAULT_ZERO_TOL)?;
    let head: Vec<String> = zeros.eigenvalues_head[..5].iter().map(|mu| format!("{mu:.2e}")).collect();
    println!("first eigenvalues: {}", head.join(" "));
    println!("zero eigenvalues: {}", zeros.count);

    for (i, row) in embed(&spectrum, zeros.count)?.iter().enumerate().step_by(6) {
        println!("point {i:>2} -> {row:+.4?}");
    }
    Ok(())
}

fn main() -> levelset_spectral::Result<()> {
    run_example()
}
