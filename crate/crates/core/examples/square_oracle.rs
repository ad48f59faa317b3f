//! Every full topology on the unit square, and the shortest among them.

use maxwell_trees::geometry::BoundaryConfig;
use maxwell_trees::oracle::{mst_length, steiner_oracle};
use maxwell_trees::primal::PrimalOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]])?;
    let best = steiner_oracle(&z, &PrimalOptions::default())?;

    for (i, l) in best.lengths.iter().enumerate() {
        println!("topology {} length {:.12}", i + 1, l);
    }
    println!("shortest: topology {} with edges {:?}", best.index + 1, best.tree.edges());
    println!("1 + sqrt(3) = {:.12}", 1.0 + 3f64.sqrt());
    println!("minimum spanning tree {:.12}", mst_length(&z));
    Ok(())
}
