//! Projected-gradient ascent for `max ⟨θ, z⟩` over the solution body.

use super::projection::{project_equality, restore_feasibility, Dykstra};
use super::{norm, ConstraintSystem, DualError, DualPoint};
use crate::geometry::BoundaryConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct DualOptions {
    /// Largest admissible constraint violation.
    pub feas_tol: f64,
    /// Relative optimality tolerance.
    pub val_tol: f64,
    pub max_dykstra_sweeps: usize,
    pub max_iters: usize,
    /// Step length in units of `radius / |z|`.
    pub step_scale: f64,
    /// Cylinders with `|Σ θ_k| ≥ 1 - act_tol` are reported active.
    pub act_tol: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            val_tol: 1e-10,
            max_dykstra_sweeps: 10_000,
            max_iters: 100_000,
            step_scale: 10.0,
            act_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualResult {
    pub theta: DualPoint,
    /// `⟨θ, z⟩` at the returned point.
    pub value: f64,
    pub feasibility_residual: f64,
    pub converged: bool,
    /// Indices into the system's cylinder list.
    pub active_cylinders: Vec<usize>,
    pub iterations: usize,
    pub dykstra_sweeps: usize,
    /// Upper bound on `max - value` certified by the last step.
    pub optimality_bound: f64,
}

/// Maximizes `⟨θ, z⟩` over the solutions of `system`.
///
/// Each step is `θ ← P(θ + η z)` with `P` the projection onto the body. For
/// a linear objective the step satisfies
/// `max - ⟨z, θ⁺⟩ ≤ |θ⁺ - θ| · diam / η`, which is the stopping rule.
pub fn solve_dual(system: &ConstraintSystem, z: &BoundaryConfig, options: &DualOptions) -> Result<DualResult, DualError> {
    if z.len() != system.n() || z.dim() != system.m() {
        return Err(DualError::DimensionMismatch {
            n: system.n(),
            m: system.m(),
            got_n: z.len(),
            got_m: z.dim(),
        });
    }
    if !(options.feas_tol > 0.0 && options.val_tol > 0.0 && options.step_scale > 0.0) {
        return Err(DualError::Options("tolerances and step scale must be positive"));
    }
    let m = system.m();
    let zflat = z.as_flat();
    // Only the balanced part of z matters on the body.
    let zb = project_equality(&DualPoint::new(m, zflat.to_vec()));
    let znorm = norm(zb.as_slice());
    let radius = system.radius_bound().max(1.0);
    let diameter = 2.0 * radius;

    let mut theta = DualPoint::zeros(system.n(), m);
    let mut result = DualResult {
        theta: theta.clone(),
        value: 0.0,
        feasibility_residual: 0.0,
        converged: true,
        active_cylinders: Vec::new(),
        iterations: 0,
        dykstra_sweeps: 0,
        optimality_bound: 0.0,
    };
    if znorm == 0.0 {
        result.active_cylinders = active(system, &theta, options.act_tol);
        return Ok(result);
    }
    let eta = options.step_scale * radius / znorm;
    let mut dykstra = Dykstra::new(system);
    let mut converged = false;
    let mut bound = f64::INFINITY;
    let mut sweeps = 0;
    let mut iters = 0;
    let mut trial = theta.clone();
    while iters < options.max_iters {
        for ((t, x), g) in trial.theta.iter_mut().zip(&theta.theta).zip(zb.as_slice()) {
            *t = x + eta * g;
        }
        let proj = dykstra.project(&trial, options.feas_tol * 1e-2, options.max_dykstra_sweeps);
        sweeps += proj.sweeps;
        iters += 1;
        let step = proj.point.distance(&theta);
        theta = proj.point;
        let value = theta.value(zflat);
        bound = step * diameter / eta;
        if proj.converged && bound <= options.val_tol * (1.0 + value.abs()) {
            converged = true;
            break;
        }
    }
    let feasible = restore_feasibility(&theta, system);
    let residual = system.violation(&feasible);
    result.value = feasible.value(zflat);
    result.feasibility_residual = residual;
    result.converged = converged && residual <= options.feas_tol;
    result.active_cylinders = active(system, &feasible, options.act_tol);
    result.theta = feasible;
    result.iterations = iters;
    result.dykstra_sweeps = sweeps;
    result.optimality_bound = bound;
    Ok(result)
}

fn active(system: &ConstraintSystem, theta: &DualPoint, act_tol: f64) -> Vec<usize> {
    system
        .cylinders()
        .iter()
        .enumerate()
        .filter(|(_, c)| norm(&theta.block_sum(c.subset.iter().copied())) >= 1.0 - act_tol)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::build_system;
    use super::*;
    use crate::topology::fixtures::*;
    use crate::topology::Tree;
    use approx::assert_abs_diff_eq;

    #[test]
    fn segment_value_and_maximizer() {
        let t = Tree::new(2, 2, vec![(0, 1)]).unwrap();
        let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let r = solve_dual(&build_system(&t, 2), &z, &DualOptions::default()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value, 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.theta.as_slice(), [-0.6, -0.8, 0.6, 0.8].as_slice(), epsilon = 1e-8);
    }

    #[test]
    fn equilateral_value() {
        let h = 3f64.sqrt() / 2.0;
        let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap();
        let r = solve_dual(&build_system(&star3(), 2), &z, &DualOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert_abs_diff_eq!(r.value, 3f64.sqrt(), epsilon = 1e-9);
        assert_eq!(r.active_cylinders, vec![0, 1, 2]);
    }

    #[test]
    fn obtuse_value_without_topology_hints() {
        let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![-0.6, 0.3]]).unwrap();
        let r = solve_dual(&build_system(&star3(), 2), &z, &DualOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert_abs_diff_eq!(r.value, 1.0 + 0.45f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn dimension_mismatch() {
        let z = BoundaryConfig::new(3, &[vec![0.0; 3], vec![1.0; 3], vec![2.0; 3]]).unwrap();
        assert!(solve_dual(&build_system(&star3(), 2), &z, &DualOptions::default()).is_err());
    }

    #[test]
    fn coincident_boundary_gives_zero() {
        let z = BoundaryConfig::new(2, &vec![vec![1.0, 1.0]; 4]).unwrap();
        let r = solve_dual(&build_system(&binary4(), 2), &z, &DualOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }
}
