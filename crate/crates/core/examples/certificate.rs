//! Turning an extreme network into a feasible dual point and checking it.

use maxwell_trees::dual::{certificate_from_primal, verify_certificate};
use maxwell_trees::geometry::BoundaryConfig;
use maxwell_trees::primal::{solve_primal, PrimalOptions};
use maxwell_trees::topology::Tree;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tree = Tree::new(6, 4, vec![(0, 4), (3, 4), (4, 5), (1, 5), (2, 5)])?;
    let z = BoundaryConfig::new(3, &[
        vec![0.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.2],
        vec![1.0, 1.0, -0.1],
        vec![0.0, 1.0, 0.4],
    ])?;
    let tol = z.default_degeneracy_tol();

    let primal = solve_primal(&tree, &z, &PrimalOptions::default())?;
    let cert = certificate_from_primal(&primal.network, tol)?;
    let report = verify_certificate(&cert.point, &primal.network, 1e-8);

    println!("primal length   {:.12}", primal.length);
    println!("certified value {:.12}", cert.value);
    println!("raw residual    {:.2e}", cert.raw_residual);
    println!("cylinders       {:.2e}", report.max_cylinder_residual());
    println!("balance         {:.2e}", report.sigma_residual);
    println!("interior        {:.2e}", report.interior_residual);
    println!("feasible {} / weak duality {}", report.feasible, report.weak_duality_holds);
    Ok(())
}
