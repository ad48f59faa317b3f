//! The Fermat point of a triangle and the 120 degree angles around it.

use maxwell_trees::geometry::{angle_deg, BoundaryConfig};
use maxwell_trees::primal::{solve_primal, PrimalOptions};
use maxwell_trees::topology::Tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = Tree::new(4, 3, vec![(0, 3), (1, 3), (2, 3)])?;
    let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![4.0, 0.0], vec![1.0, 3.0]])?;
    let p = solve_primal(&tree, &z, &PrimalOptions::default())?;
    let net = &p.network;
    let s = net.position(3);

    println!("Steiner point ({:.9}, {:.9})", s[0], s[1]);
    println!("length {:.12} after {} Newton steps", p.length, p.iterations);
    for (a, b) in [(0, 1), (1, 2), (2, 0)] {
        println!("angle v{}-s-v{}: {:.6}", a + 1, b + 1, angle_deg(s, net.position(a), net.position(b)));
    }
    Ok(())
}
