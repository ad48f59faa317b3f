//! Exact projections by active-set enumeration.
//!
//! For a guessed active set `S` the multipliers `μ_S > 0` solve
//! `|A_e x(μ)| = 1` for `e ∈ S`, where `x(μ)` minimizes
//! `½|x - θ|² + ½ Σ μ_e |A_e x|²` on the balance subspace (a dense linear
//! KKT system, the same for every coordinate). A guess is accepted when the
//! multipliers are positive and every other cylinder holds; the closest
//! accepted point is returned.

use nalgebra::{DMatrix, DVector};

use super::OracleError;
use crate::dual::{ConstraintSystem, DualPoint};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleProjection {
    pub point: DualPoint,
    /// Indices of the active constraints.
    pub active: Vec<usize>,
    pub multipliers: Vec<f64>,
}

struct Problem {
    n: usize,
    m: usize,
    /// `theta` split by coordinate: `cols[j][k] = θ_k[j]`.
    cols: Vec<DVector<f64>>,
    indicators: Vec<DVector<f64>>,
    balance: bool,
}

const FEAS_SLACK: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-14;

impl Problem {
    fn new(theta: &DualPoint, subsets: &[Vec<usize>], balance: bool) -> Self {
        let (n, m) = (theta.n(), theta.m());
        let cols = (0..m)
            .map(|j| DVector::from_fn(n, |k, _| theta.block(k)[j]))
            .collect();
        let indicators = subsets
            .iter()
            .map(|s| DVector::from_fn(n, |k, _| if s.contains(&k) { 1.0 } else { 0.0 }))
            .collect();
        Self {
            n,
            m,
            cols,
            indicators,
            balance,
        }
    }

    fn kkt(&self, active: &[usize], mu: &[f64]) -> DMatrix<f64> {
        let size = self.n + usize::from(self.balance);
        let mut k = DMatrix::zeros(size, size);
        for i in 0..self.n {
            k[(i, i)] = 1.0;
        }
        for (&e, &w) in active.iter().zip(mu) {
            let a = &self.indicators[e];
            for i in 0..self.n {
                for j in 0..self.n {
                    k[(i, j)] += w * a[i] * a[j];
                }
            }
        }
        if self.balance {
            for i in 0..self.n {
                k[(i, self.n)] = 1.0;
                k[(self.n, i)] = 1.0;
            }
        }
        k
    }

    fn solve(&self, kkt: &DMatrix<f64>, rhs: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
        let lu = kkt.clone().lu();
        rhs.iter()
            .map(|r| {
                let mut full = DVector::zeros(kkt.nrows());
                full.rows_mut(0, self.n).copy_from(r);
                lu.solve(&full).map(|s| s.rows(0, self.n).into_owned())
            })
            .collect()
    }

    fn residuals(&self, active: &[usize], x: &[DVector<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            active.len(),
            active
                .iter()
                .map(|&e| x.iter().map(|c| self.indicators[e].dot(c).powi(2)).sum::<f64>() - 1.0),
        )
    }

    fn point(&self, active: &[usize], mu: &[f64]) -> Option<Vec<DVector<f64>>> {
        self.solve(&self.kkt(active, mu), &self.cols)
    }

    /// Newton on the active equations from a uniform start.
    fn multipliers(&self, active: &[usize], start: f64) -> Option<(Vec<f64>, Vec<DVector<f64>>)> {
        let mut mu = vec![start; active.len()];
        let mut x = self.point(active, &mu)?;
        let mut f = self.residuals(active, &x);
        for _ in 0..200 {
            if f.amax() <= ROOT_TOL {
                return Some((mu, x));
            }
            let kkt = self.kkt(active, &mu);
            let mut jac = DMatrix::zeros(active.len(), active.len());
            for (col, &g) in active.iter().enumerate() {
                let a = &self.indicators[g];
                let rhs: Vec<DVector<f64>> = x.iter().map(|c| -a * a.dot(c)).collect();
                let dx = self.solve(&kkt, &rhs)?;
                for (row, &e) in active.iter().enumerate() {
                    let b = &self.indicators[e];
                    jac[(row, col)] = x.iter().zip(&dx).map(|(c, d)| 2.0 * b.dot(c) * b.dot(d)).sum();
                }
            }
            let step = jac.lu().solve(&(-&f))?;
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-12 {
                let trial: Vec<f64> = mu.iter().zip(step.iter()).map(|(m, s)| m + t * s).collect();
                if trial.iter().all(|&v| v > 0.0) {
                    if let Some(xt) = self.point(active, &trial) {
                        let ft = self.residuals(active, &xt);
                        if ft.norm() < f.norm() {
                            mu = trial;
                            x = xt;
                            f = ft;
                            accepted = true;
                            break;
                        }
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (f.amax() <= ROOT_TOL * 1e3).then_some((mu, x))
    }

    fn project(&self) -> Result<OracleProjection, OracleError> {
        let count = self.indicators.len();
        let mut best: Option<(f64, OracleProjection)> = None;
        for mask in 0u32..(1 << count) {
            let active: Vec<usize> = (0..count).filter(|&e| mask & (1 << e) != 0).collect();
            let found = if active.is_empty() {
                self.point(&active, &[]).map(|x| (Vec::new(), x))
            } else {
                [1.0, 0.1, 10.0, 100.0]
                    .iter()
                    .find_map(|&s| self.multipliers(&active, s))
            };
            let Some((mu, x)) = found else { continue };
            let feasible = (0..count).all(|e| {
                let r: f64 = x.iter().map(|c| self.indicators[e].dot(c).powi(2)).sum::<f64>().sqrt();
                r <= 1.0 + FEAS_SLACK
            });
            if !feasible {
                continue;
            }
            let dist: f64 = x.iter().zip(&self.cols).map(|(a, b)| (a - b).norm_squared()).sum();
            if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                let mut flat = vec![0.0; self.n * self.m];
                for (j, c) in x.iter().enumerate() {
                    for k in 0..self.n {
                        flat[k * self.m + j] = c[k];
                    }
                }
                best = Some((
                    dist,
                    OracleProjection {
                        point: DualPoint::new(self.m, flat),
                        active,
                        multipliers: mu,
                    },
                ));
            }
        }
        best.map(|(_, p)| p).ok_or(OracleError::NoKktPoint)
    }
}

/// Nearest point of a single cylinder `|Σ_{k ∈ subset} θ_k| ≤ 1`.
pub fn cylinder_projection_oracle(theta: &DualPoint, subset: &[usize]) -> Result<OracleProjection, OracleError> {
    Problem::new(theta, &[subset.to_vec()], false).project()
}

/// Nearest point of the solution body. Enumerates `2^{#cylinders}` active
/// sets, so only meant for small systems.
pub fn feasible_projection_oracle(theta: &DualPoint, system: &ConstraintSystem) -> Result<OracleProjection, OracleError> {
    if system.cylinders().len() > 12 {
        return Err(OracleError::TooLarge(system.cylinders().len()));
    }
    let subsets: Vec<Vec<usize>> = system.cylinders().iter().map(|c| c.subset.clone()).collect();
    Problem::new(theta, &subsets, true).project()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::build_system;
    use crate::topology::Tree;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_cylinder_closed_form() {
        let t = DualPoint::from_blocks(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]);
        let p = cylinder_projection_oracle(&t, &[0, 1]).unwrap();
        assert_abs_diff_eq!(p.point.as_slice(), [0.5, 0.0, 0.5, 0.0].as_slice(), epsilon = 1e-12);
        assert_eq!(p.active, vec![0]);
    }

    #[test]
    fn inside_point_is_fixed() {
        let t = DualPoint::from_blocks(2, &[vec![0.2, 0.1], vec![-0.2, -0.1]]);
        let tree = Tree::new(2, 2, vec![(0, 1)]).unwrap();
        let p = feasible_projection_oracle(&t, &build_system(&tree, 2)).unwrap();
        assert!(p.active.is_empty());
        assert_abs_diff_eq!(p.point.as_slice(), t.as_slice(), epsilon = 1e-15);
    }

    #[test]
    fn two_point_body() {
        let tree = Tree::new(2, 2, vec![(0, 1)]).unwrap();
        let t = DualPoint::from_blocks(2, &[vec![-3.0, 1.0], vec![2.0, 2.0]]);
        let p = feasible_projection_oracle(&t, &build_system(&tree, 2)).unwrap();
        let r = (2.5f64 * 2.5 + 0.25).sqrt();
        assert_abs_diff_eq!(p.point.block(1), [2.5 / r, 0.5 / r].as_slice(), epsilon = 1e-12);
    }
}
