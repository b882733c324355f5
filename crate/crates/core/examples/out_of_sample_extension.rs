// Evaluates the extended eigenfunctions at new points. Inside a cluster
// they take that cluster's constant value; far from the data they are
// undefined.

use levelset_spectral::spectral::extend_eigenfunction;
use levelset_spectral::{build_graph, eigendecompose, Error, PointSet};

pub fn run_example() -> levelset_spectral::Result<()> {
    let rows: Vec<[f64; 1]> = [0.0, 0.1, 0.2, 0.3, 2.0, 2.1, 2.2].map(|x| [x]).to_vec();
    let points = PointSet::from_rows(&rows)?;
    let h = 0.5;
    let spectrum = eigendecompose(&build_graph(&points, h)?, points.len())?;
    for x in [0.15, 0.45, 2.05] {
        let values: Vec<f64> = (0..2)
            .map(|k| extend_eigenfunction(&[x], &spectrum, k, &points, h))
            .collect::<levelset_spectral::Result<_>>()?;
        println!("x = {x:<5} -> {values:+.5?}");
    }
    match extend_eigenfunction(&[1.1], &spectrum, 0, &points, h) {
        Err(Error::OutsideSupport) => println!("x = 1.1   -> outside the kernel support"),
        other => println!("x = 1.1   -> {other:?}"),
    }
    Ok(())
}

fn main() -> levelset_spectral::Result<()> {
    run_example()
}
