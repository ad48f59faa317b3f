//! Extreme networks by direct minimization of the length functional.
//!
//! The length of a network of fixed type is a convex but non-smooth
//! function of the interior vertex positions. We minimize the smoothed
//! functional `Σ sqrt(|z_k - z_l|² + ε²)` with damped Newton steps and
//! drive `ε` geometrically towards zero, warm-starting each stage.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{BoundaryConfig, GeometryError, Network};
use crate::topology::Tree;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimalError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid options: {0}")]
    Options(&'static str),
}

/// Solver settings. Lengths are relative to the boundary diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalOptions {
    pub smoothing_start: f64,
    pub smoothing_end: f64,
    pub continuation_factor: f64,
    pub max_outer_iters: usize,
    pub max_inner_iters: usize,
    /// Cap on Newton steps over all stages.
    pub max_total_iters: usize,
    pub grad_tol: f64,
    /// Stage stops once half the squared Newton decrement drops below this.
    pub decrement_tol: f64,
    pub armijo: f64,
    pub backtrack: f64,
    /// Relative size of the deterministic initial perturbation.
    pub perturbation: f64,
}

impl Default for PrimalOptions {
    fn default() -> Self {
        Self {
            smoothing_start: 1e-2,
            smoothing_end: 1e-10,
            continuation_factor: 0.1,
            max_outer_iters: 64,
            max_inner_iters: 500,
            max_total_iters: 100_000,
            grad_tol: 1e-9,
            decrement_tol: 1e-15,
            armijo: 1e-4,
            backtrack: 0.5,
            perturbation: 1e-3,
        }
    }
}

impl PrimalOptions {
    fn check(&self) -> Result<(), PrimalError> {
        if !(self.smoothing_end > 0.0) {
            return Err(PrimalError::Options("smoothing_end must be positive"));
        }
        if self.smoothing_start < self.smoothing_end {
            return Err(PrimalError::Options("smoothing_start must be at least smoothing_end"));
        }
        if !(self.continuation_factor > 0.0 && self.continuation_factor < 1.0) {
            return Err(PrimalError::Options("continuation_factor must lie in (0, 1)"));
        }
        if !(self.grad_tol > 0.0 && self.decrement_tol > 0.0) {
            return Err(PrimalError::Options("tolerances must be positive"));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0 && self.armijo > 0.0 && self.armijo < 0.5) {
            return Err(PrimalError::Options("line search parameters out of range"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalResult {
    pub network: Network,
    /// Exact length of the final iterate.
    pub length: f64,
    /// Smoothed minus exact length at the final smoothing level.
    pub smoothed_length_gap: f64,
    pub converged: bool,
    /// Newton steps over all stages.
    pub iterations: usize,
    /// Exact length after each continuation stage.
    pub stage_lengths: Vec<f64>,
    pub final_epsilon: f64,
    pub gradient_norm: f64,
    /// Half the squared Newton decrement at the last step.
    pub decrement: f64,
}

/// `Σ_e sqrt(|z_k - z_l|² + ε²)` over all edges; `positions` holds every vertex.
pub fn smoothed_length(tree: &Tree, dim: usize, positions: &[f64], epsilon: f64) -> f64 {
    let eps2 = epsilon * epsilon;
    tree.edges()
        .iter()
        .map(|&(a, b)| {
            let pa = &positions[a * dim..(a + 1) * dim];
            let pb = &positions[b * dim..(b + 1) * dim];
            let d2: f64 = pa.iter().zip(pb).map(|(x, y)| (x - y) * (x - y)).sum();
            (d2 + eps2).sqrt()
        })
        .sum()
}

/// Gradient of [`smoothed_length`] with respect to interior coordinates.
pub fn smoothed_gradient(tree: &Tree, dim: usize, positions: &[f64], epsilon: f64) -> Vec<f64> {
    let n = tree.boundary_count();
    let mut grad = vec![0.0; tree.interior_count() * dim];
    let eps2 = epsilon * epsilon;
    let mut d = vec![0.0; dim];
    for &(a, b) in tree.edges() {
        let r = edge_delta(dim, positions, a, b, eps2, &mut d);
        if r == 0.0 {
            continue;
        }
        for (v, sign) in [(a, 1.0), (b, -1.0)] {
            if v >= n {
                let off = (v - n) * dim;
                for j in 0..dim {
                    grad[off + j] += sign * d[j] / r;
                }
            }
        }
    }
    grad
}

/// Writes `z_a - z_b` into `d` and returns `sqrt(|d|² + ε²)`.
fn edge_delta(dim: usize, positions: &[f64], a: usize, b: usize, eps2: f64, d: &mut [f64]) -> f64 {
    let mut d2 = 0.0;
    for j in 0..dim {
        d[j] = positions[a * dim + j] - positions[b * dim + j];
        d2 += d[j] * d[j];
    }
    (d2 + eps2).sqrt()
}

fn smoothed_hessian(tree: &Tree, dim: usize, positions: &[f64], epsilon: f64) -> DMatrix<f64> {
    let n = tree.boundary_count();
    let size = tree.interior_count() * dim;
    let mut h = DMatrix::zeros(size, size);
    let eps2 = epsilon * epsilon;
    let mut d = vec![0.0; dim];
    for &(a, b) in tree.edges() {
        let r = edge_delta(dim, positions, a, b, eps2, &mut d);
        if r == 0.0 {
            continue;
        }
        let r3 = r * r * r;
        let block = |i: usize, j: usize| {
            let id = if i == j { r * r } else { 0.0 };
            (id - d[i] * d[j]) / r3
        };
        let ia = (a >= n).then(|| (a - n) * dim);
        let ib = (b >= n).then(|| (b - n) * dim);
        for i in 0..dim {
            for j in 0..dim {
                let v = block(i, j);
                if let Some(oa) = ia {
                    h[(oa + i, oa + j)] += v;
                }
                if let Some(ob) = ib {
                    h[(ob + i, ob + j)] += v;
                }
                if let (Some(oa), Some(ob)) = (ia, ib) {
                    h[(oa + i, ob + j)] -= v;
                    h[(ob + i, oa + j)] -= v;
                }
            }
        }
    }
    h
}

fn initial_positions(tree: &Tree, config: &BoundaryConfig, perturbation: f64) -> Vec<f64> {
    let dim = config.dim();
    let scale = config.scale();
    let centroid = config.centroid();
    let mut positions = config.as_flat().to_vec();
    for v in tree.boundary_count()..tree.vertex_count() {
        for (j, c) in centroid.iter().enumerate() {
            // Weyl-sequence offsets keep every vertex at a distinct point.
            let u = ((v + 1) as f64 * 0.754_877_666_246_692_7 + (j + 1) as f64 * 0.569_840_290_998_053_3).fract();
            positions.push(c + perturbation * scale * (u - 0.5));
        }
    }
    debug_assert_eq!(positions.len(), tree.vertex_count() * dim);
    positions
}

struct StageOutcome {
    converged: bool,
    steps: usize,
    gradient_norm: f64,
    decrement: f64,
}

fn newton_stage(
    tree: &Tree,
    dim: usize,
    positions: &mut [f64],
    epsilon: f64,
    grad_tol: f64,
    decrement_tol: f64,
    max_steps: usize,
    opts: &PrimalOptions,
) -> StageOutcome {
    let offset = tree.boundary_count() * dim;
    let mut outcome = StageOutcome {
        converged: false,
        steps: 0,
        gradient_norm: f64::INFINITY,
        decrement: f64::INFINITY,
    };
    let mut trial = positions.to_vec();
    while outcome.steps < max_steps {
        let g = DVector::from_vec(smoothed_gradient(tree, dim, positions, epsilon));
        outcome.gradient_norm = g.norm();
        if outcome.gradient_norm <= grad_tol {
            outcome.converged = true;
            break;
        }
        let h = smoothed_hessian(tree, dim, positions, epsilon);
        let step = match h.clone().cholesky() {
            Some(ch) => -ch.solve(&g),
            None => {
                // Positive definite in exact arithmetic; shift when rounding
                // destroys that.
                let shift = h.diagonal().max().abs().max(1.0) * 1e-12;
                let shifted = h + DMatrix::identity(g.len(), g.len()) * shift;
                match shifted.cholesky() {
                    Some(ch) => -ch.solve(&g),
                    None => -g.clone(),
                }
            }
        };
        let slope = g.dot(&step);
        outcome.decrement = -slope / 2.0;
        if outcome.decrement <= decrement_tol {
            outcome.converged = true;
            break;
        }
        let f0 = smoothed_length(tree, dim, positions, epsilon);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-20 {
            for (i, s) in step.iter().enumerate() {
                trial[offset + i] = positions[offset + i] + t * s;
            }
            let f1 = smoothed_length(tree, dim, &trial, epsilon);
            if f1 <= f0 + opts.armijo * t * slope {
                accepted = true;
                break;
            }
            t *= opts.backtrack;
        }
        outcome.steps += 1;
        if !accepted {
            // No representable decrease: we are at the rounding floor.
            outcome.converged = outcome.decrement <= decrement_tol * 1e3;
            break;
        }
        positions[offset..].copy_from_slice(&trial[offset..]);
    }
    outcome
}

/// Computes an extreme network of type `tree` with boundary `config`.
pub fn solve_primal(tree: &Tree, config: &BoundaryConfig, options: &PrimalOptions) -> Result<PrimalResult, PrimalError> {
    options.check()?;
    if config.len() != tree.boundary_count() {
        return Err(GeometryError::BoundaryCountMismatch {
            expected: tree.boundary_count(),
            got: config.len(),
        }
        .into());
    }
    let dim = config.dim();
    let scale = config.scale();
    let mut positions = initial_positions(tree, config, options.perturbation);

    let eps_end = options.smoothing_end * scale;
    let grad_tol = options.grad_tol * scale;
    let decrement_tol = options.decrement_tol * scale;

    let mut eps = options.smoothing_start * scale;
    let mut total = 0usize;
    let mut stage_lengths = Vec::new();
    let mut last = StageOutcome {
        converged: tree.interior_count() == 0,
        steps: 0,
        gradient_norm: 0.0,
        decrement: 0.0,
    };
    if tree.interior_count() > 0 {
        for stage in 0..options.max_outer_iters {
            let budget = options.max_inner_iters.min(options.max_total_iters - total);
            last = newton_stage(tree, dim, &mut positions, eps, grad_tol, decrement_tol, budget, options);
            total += last.steps;
            stage_lengths.push(smoothed_length(tree, dim, &positions, 0.0));
            let final_stage = eps <= eps_end * (1.0 + 1e-12);
            if final_stage || total >= options.max_total_iters {
                break;
            }
            if stage + 1 == options.max_outer_iters {
                last.converged = false;
                break;
            }
            eps = (eps * options.continuation_factor).max(eps_end);
        }
    } else {
        eps = eps_end;
    }
    let length = smoothed_length(tree, dim, &positions, 0.0);
    let smoothed = smoothed_length(tree, dim, &positions, eps);
    let final_reached = eps <= eps_end * (1.0 + 1e-12);
    let network = Network::from_positions(tree.clone(), dim, positions)?;
    Ok(PrimalResult {
        network,
        length,
        smoothed_length_gap: smoothed - length,
        converged: last.converged && final_reached,
        iterations: total,
        stage_lengths,
        final_epsilon: eps,
        gradient_norm: last.gradient_norm,
        decrement: last.decrement,
    })
}
