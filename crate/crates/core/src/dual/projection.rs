//! Euclidean projections onto the balance subspace, single cylinders, and
//! the solution body.

use super::{norm, ConstraintSystem, DualPoint};

/// Projection onto `{θ : |Σ_{k ∈ subset} θ_k| ≤ 1}` in `R^{mn}`.
///
/// The constraint map has Gram matrix `p·I`, so the correction is spread
/// evenly over the `p` blocks of the subset.
pub fn project_cylinder(theta: &DualPoint, subset: &[usize]) -> DualPoint {
    let mut out = theta.clone();
    if subset.is_empty() {
        return out;
    }
    let s = theta.block_sum(subset.iter().copied());
    let r = norm(&s);
    if r <= 1.0 {
        return out;
    }
    let p = subset.len() as f64;
    let corr: Vec<f64> = s.iter().map(|x| (x / r - x) / p).collect();
    for &k in subset {
        for (a, c) in out.block_mut(k).iter_mut().zip(&corr) {
            *a += c;
        }
    }
    out
}

/// Projection onto the balance subspace `Σ θ_k = 0`.
pub fn project_equality(theta: &DualPoint) -> DualPoint {
    let mut out = theta.clone();
    subtract_mean(&mut out);
    out
}

pub(crate) fn subtract_mean(theta: &mut DualPoint) {
    let n = theta.n();
    if n == 0 {
        return;
    }
    let mean: Vec<f64> = theta.block_sum(0..n).iter().map(|x| x / n as f64).collect();
    for k in 0..n {
        for (a, c) in theta.block_mut(k).iter_mut().zip(&mean) {
            *a -= c;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub point: DualPoint,
    pub converged: bool,
    pub sweeps: usize,
    /// Largest constraint violation of `point`.
    pub residual: f64,
}

/// Nearest point of the solution body `|S_G|` by Dykstra's method.
///
/// The input is first projected onto the balance subspace; Dykstra then
/// cycles through the sets `{cylinder} ∩ {Σ θ_k = 0}`, each of which has a
/// closed-form projection, so every iterate satisfies the balance equation.
pub fn project_feasible(theta: &DualPoint, system: &ConstraintSystem, tol: f64, max_iters: usize) -> Projection {
    let mut d = Dykstra::new(system);
    d.project(theta, tol, max_iters)
}

/// Dykstra state: one multiplier in `R^m` per cylinder. Keeping it between
/// calls warm-starts the dual block-coordinate ascent that Dykstra performs.
#[derive(Debug, Clone)]
pub(crate) struct Dykstra<'a> {
    system: &'a ConstraintSystem,
    multipliers: Vec<Vec<f64>>,
}

impl<'a> Dykstra<'a> {
    pub fn new(system: &'a ConstraintSystem) -> Self {
        Self {
            system,
            multipliers: vec![vec![0.0; system.m()]; system.cylinders().len()],
        }
    }

    /// Adds `P_Π A_eᵀ λ` to `x`.
    fn apply(x: &mut DualPoint, subset: &[usize], n: usize, lambda: &[f64], sign: f64) {
        let p = subset.len() as f64;
        let inside = sign * (n as f64 - p) / n as f64;
        let outside = -sign * p / n as f64;
        let mut in_subset = subset.iter().peekable();
        for k in 0..n {
            let w = if in_subset.peek() == Some(&&k) {
                in_subset.next();
                inside
            } else {
                outside
            };
            for (a, l) in x.block_mut(k).iter_mut().zip(lambda) {
                *a += w * l;
            }
        }
    }

    pub fn project(&mut self, y: &DualPoint, tol: f64, max_iters: usize) -> Projection {
        let n = self.system.n();
        let m = self.system.m();
        let mut x = project_equality(y);
        // Warm start: x = y - Σ P A_eᵀ λ_e.
        for (c, lambda) in self.system.cylinders().iter().zip(&self.multipliers) {
            if lambda.iter().any(|&l| l != 0.0) {
                Self::apply(&mut x, &c.subset, n, lambda, -1.0);
            }
        }
        let mut sweeps = 0;
        let mut converged = self.system.cylinders().is_empty();
        let mut prev = x.clone();
        let mut delta = vec![0.0; m];
        while !converged && sweeps < max_iters {
            prev.theta.copy_from_slice(&x.theta);
            for (c, lambda) in self.system.cylinders().iter().zip(self.multipliers.iter_mut()) {
                let p = c.subset.len();
                if p == 0 || p == n {
                    continue;
                }
                let gram = (p * (n - p)) as f64 / n as f64;
                // s = A_e (x + P A_eᵀ λ_old)
                let mut s = x.block_sum(c.subset.iter().copied());
                for (si, l) in s.iter_mut().zip(lambda.iter()) {
                    *si += gram * l;
                }
                let r = norm(&s);
                for j in 0..m {
                    let new = if r > 1.0 { (s[j] - s[j] / r) / gram } else { 0.0 };
                    delta[j] = lambda[j] - new;
                    lambda[j] = new;
                }
                Self::apply(&mut x, &c.subset, n, &delta, 1.0);
            }
            sweeps += 1;
            let change = x.distance(&prev);
            let residual = self.system.violation(&x);
            converged = residual <= tol && change <= tol;
        }
        subtract_mean(&mut x);
        let residual = self.system.violation(&x);
        Projection {
            point: x,
            converged: converged && residual <= tol,
            sweeps,
            residual,
        }
    }
}

/// `θ / max(1, max_e |A_e θ|)` after exact balancing.
///
/// The body is the unit ball of a gauge on the balance subspace, so scaling
/// down restores feasibility exactly.
pub(crate) fn restore_feasibility(theta: &DualPoint, system: &ConstraintSystem) -> DualPoint {
    let mut x = project_equality(theta);
    let worst = system
        .cylinders()
        .iter()
        .map(|c| norm(&x.block_sum(c.subset.iter().copied())))
        .fold(1.0f64, f64::max);
    if worst > 1.0 {
        // Shave one ulp-scale margin so rounding cannot push a norm above one.
        let factor = (1.0 - 4.0 * f64::EPSILON) / worst;
        x.theta.iter_mut().for_each(|v| *v *= factor);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::super::build_system;
    use super::*;
    use crate::topology::fixtures::*;
    use crate::topology::Tree;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cylinder_projection_examples() {
        let t = DualPoint::from_blocks(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]);
        let p = project_cylinder(&t, &[0, 1]);
        assert_abs_diff_eq!(p.as_slice(), [0.5, 0.0, 0.5, 0.0].as_slice(), epsilon = 1e-15);

        let t = DualPoint::from_blocks(2, &[vec![0.45, 0.0], vec![0.45, 0.0]]);
        assert_eq!(project_cylinder(&t, &[0, 1]), t);

        let t = DualPoint::from_blocks(2, &[vec![0.0, -2.0]]);
        assert_eq!(project_cylinder(&t, &[0]).as_slice(), &[0.0, -1.0]);
    }

    #[test]
    fn equality_projection_examples() {
        let t = DualPoint::from_blocks(2, &[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(project_equality(&t).as_slice(), &[0.5, 0.0, -0.5, 0.0]);
        let inside = DualPoint::from_blocks(2, &[vec![0.5, 1.0], vec![-0.5, -1.0]]);
        assert_eq!(project_equality(&inside), inside);
    }

    #[test]
    fn origin_is_feasible() {
        let s = build_system(&binary4(), 2);
        let p = project_feasible(&DualPoint::zeros(4, 2), &s, 1e-12, 100);
        assert!(p.converged);
        assert_eq!(p.point, DualPoint::zeros(4, 2));
    }

    #[test]
    fn feasible_point_is_fixed() {
        let s = build_system(&star3(), 2);
        let t = DualPoint::from_blocks(2, &[vec![0.3, 0.1], vec![-0.2, 0.2], vec![-0.1, -0.3]]);
        let p = project_feasible(&t, &s, 1e-12, 100);
        assert!(p.converged);
        assert_abs_diff_eq!(p.point.as_slice(), t.as_slice(), epsilon = 1e-12);
    }

    #[test]
    fn two_point_projection_is_exact() {
        let tree = Tree::new(2, 2, vec![(0, 1)]).unwrap();
        let s = build_system(&tree, 2);
        let t = DualPoint::from_blocks(2, &[vec![-3.0, 1.0], vec![2.0, 2.0]]);
        let p = project_feasible(&t, &s, 1e-12, 1000);
        assert!(p.converged);
        // Balance forces θ_1 = -θ_2; nearest such point with |θ_2| ≤ 1.
        let c = [2.5f64, 0.5];
        let r = (c[0] * c[0] + c[1] * c[1]).sqrt();
        assert_abs_diff_eq!(p.point.block(1), [c[0] / r, c[1] / r].as_slice(), epsilon = 1e-12);
        assert_abs_diff_eq!(p.point.block(0), [-c[0] / r, -c[1] / r].as_slice(), epsilon = 1e-12);
    }

    #[test]
    fn restored_point_is_feasible() {
        let s = build_system(&binary4(), 2);
        let t = DualPoint::new(2, vec![3.0, -1.0, 0.5, 2.0, -1.0, 0.0, 0.2, 0.2]);
        let r = restore_feasibility(&t, &s);
        assert!(s.violation(&r) <= 1e-15);
    }
}
