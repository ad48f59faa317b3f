//! Two terminals joined by a single edge: the smallest primal/dual pair.

use maxwell_trees::dual::{build_system, solve_dual, DualOptions};
use maxwell_trees::geometry::BoundaryConfig;
use maxwell_trees::primal::{solve_primal, PrimalOptions};
use maxwell_trees::topology::Tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = Tree::new(2, 2, vec![(0, 1)])?;
    let z = BoundaryConfig::new(3, &[vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 2.0]])?;

    let primal = solve_primal(&tree, &z, &PrimalOptions::default())?;
    let dual = solve_dual(&build_system(&tree, 3), &z, &DualOptions::default())?;

    println!("length {:.12}", primal.length);
    println!("dual   {:.12}", dual.value);
    println!("theta  {:?}", dual.theta.as_slice());
    Ok(())
}
