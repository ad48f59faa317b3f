//! A triangle with a 120+ degree angle: the Steiner point collapses onto a
//! terminal, and the reduced network is a path.

use maxwell_trees::geometry::BoundaryConfig;
use maxwell_trees::primal::{solve_primal, PrimalOptions};
use maxwell_trees::topology::{EdgeId, Tree};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = Tree::new(4, 3, vec![(0, 3), (1, 3), (2, 3)])?;
    let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![-0.6, 0.3]])?;
    let p = solve_primal(&tree, &z, &PrimalOptions::default())?;
    let tol = z.default_degeneracy_tol();

    for e in tree.edge_ids() {
        println!("e{} length {:.3e}", e.0 + 1, p.network.edge_length(e));
    }
    let degenerate: Vec<EdgeId> = p.network.degenerate_edges(tol).degenerate_edges;
    println!("degenerate: {degenerate:?}");

    let (reduced, net) = p.network.gamma_reduce(tol)?;
    println!("reduced edges {:?}, length {:.12}", reduced.tree.edges(), net.length());
    let lm = p.network.local_minimality(0.01, tol)?;
    println!("locally minimal: {}", lm.locally_minimal);
    Ok(())
}
