//! Removing the cylinder of an interior edge from the dual is the same as
//! contracting that edge in the tree.

use maxwell_trees::dual::{build_system, drop_edges, solve_dual, DualOptions};
use maxwell_trees::geometry::BoundaryConfig;
use maxwell_trees::primal::{solve_primal, PrimalOptions};
use maxwell_trees::topology::{AdmissibleFamily, EdgeId, Tree};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = Tree::new(6, 4, vec![(0, 4), (3, 4), (4, 5), (1, 5), (2, 5)])?;
    let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]])?;

    let bad = tree.admissibility(&[EdgeId(0), EdgeId(1), EdgeId(2)])?;
    println!("dropping e1, e2, e3 admissible: {}", bad.admissible);

    let family = AdmissibleFamily::new(&tree, &[EdgeId(2)])?;
    let reduced = tree.reduce(&family);
    let system = drop_edges(&build_system(&tree, 2), &tree, &family)?;

    let dual = solve_dual(&system, &z, &DualOptions::default())?;
    let primal = solve_primal(&reduced.tree, &z, &PrimalOptions::default())?;
    println!("reduced tree {:?}", reduced.tree.edges());
    println!("dual with e3 dropped {:.12}", dual.value);
    println!("primal on reduced    {:.12}", primal.length);
    println!("2 sqrt(2)            {:.12}", 2.0 * 2f64.sqrt());
    Ok(())
}
