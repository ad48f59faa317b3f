//! Length of a planar binary network from its boundary alone, through
//! twisting numbers and a single complex inner product.

use maxwell_trees::geometry::BoundaryConfig;
use maxwell_trees::planar::{ComplexConfig, PlanarEmbedding};
use maxwell_trees::primal::{solve_primal, PrimalOptions};
use maxwell_trees::topology::Tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Two Steiner points: 5 joins terminals 1 and 4, 6 joins 2 and 3.
    let tree = Tree::new(6, 4, vec![(0, 4), (3, 4), (4, 5), (1, 5), (2, 5)])?;
    let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![0.0, 1.0]])?;

    let primal = solve_primal(&tree, &z, &PrimalOptions::default())?;
    let emb = PlanarEmbedding::from_network(&primal.network)?;
    let table = emb.twisting_table();
    println!("twisting numbers:");
    for row in &table.values {
        println!("  {row:?}");
    }

    let w = ComplexConfig::from_boundary(&z)?;
    for k in 0..z.len() {
        let pl = emb.planar_length(&w, k)?;
        println!("k = {}: length {:.12}, psi {:.6} deg", k + 1, pl.length, pl.psi.to_degrees());
    }
    println!("primal length {:.12}", primal.length);
    let dirs = emb.edge_directions(&w)?;
    println!("direction discrepancy {:.2e}", dirs.max_discrepancy);
    Ok(())
}
