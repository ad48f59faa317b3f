//! The cylinder-constrained maximization dual to the length functional.
//!
//! For a tree `G` with boundary `{v_1, .., v_n}` the system `S_G` consists of
//! the vector equation `Σ θ_k = 0` and, for every edge `e`, the inequality
//! `|Σ_{k ∈ B_e} θ_k| ≤ 1` where `B_e` is one side of the boundary partition
//! cut out by `e`. The length of an extreme network equals the maximum of
//! `⟨θ, z⟩` over the solutions of `S_G`.

mod ascent;
mod certificate;
mod projection;

pub use ascent::{solve_dual, DualOptions, DualResult};
pub use certificate::{
    certificate_from_primal, edge_vectors, verify_certificate, Certificate, CertificateReport, EdgeVectorMap,
    EdgeVectors,
};
pub use projection::{project_cylinder, project_equality, project_feasible, Projection};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::topology::{AdmissibleFamily, EdgeId, TopologyError, Tree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualError {
    #[error("dimension mismatch: system has n = {n}, m = {m}; got {got_n} points of dimension {got_m}")]
    DimensionMismatch {
        n: usize,
        m: usize,
        got_n: usize,
        got_m: usize,
    },
    #[error("point violates the balance equation by {residual:e}")]
    SigmaViolated { residual: f64 },
    #[error("degenerate-edge subproblem did not converge (residual {residual:e} after {sweeps} sweeps)")]
    CertificateSubproblem { residual: f64, sweeps: usize },
    #[error("invalid options: {0}")]
    Options(&'static str),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One inequality `|Σ_{k ∈ subset} θ_k| ≤ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    /// Edge of the tree the inequality came from.
    pub edge: EdgeId,
    /// Boundary indices, sorted.
    pub subset: Vec<usize>,
}

/// The system `S_G`: the balance equation plus one cylinder per retained edge.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    n: usize,
    m: usize,
    cylinders: Vec<Cylinder>,
    /// Degree of each boundary vertex in the underlying tree; bounds `|θ_k|`.
    boundary_degrees: Vec<usize>,
}

impl ConstraintSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn cylinders(&self) -> &[Cylinder] {
        &self.cylinders
    }

    pub fn boundary_degrees(&self) -> &[usize] {
        &self.boundary_degrees
    }

    /// `sqrt(Σ deg(v_k)²)`, an upper bound on `|θ|` over the solution body.
    pub fn radius_bound(&self) -> f64 {
        self.boundary_degrees
            .iter()
            .map(|&d| (d * d) as f64)
            .sum::<f64>()
            .sqrt()
    }

    /// Replaces every subset by its complement. The solution set is
    /// unchanged because of the balance equation.
    pub fn complemented(&self) -> Self {
        let cylinders = self
            .cylinders
            .iter()
            .map(|c| Cylinder {
                edge: c.edge,
                subset: (0..self.n).filter(|k| !c.subset.contains(k)).collect(),
            })
            .collect();
        Self {
            cylinders,
            ..self.clone()
        }
    }

    /// Sorted list of subsets, for comparing systems up to edge labels.
    pub fn subset_multiset(&self) -> Vec<Vec<usize>> {
        let mut s: Vec<Vec<usize>> = self.cylinders.iter().map(|c| c.subset.clone()).collect();
        s.sort();
        s
    }

    /// Largest constraint violation of `theta`: the balance residual or the
    /// excess of any cylinder norm over one.
    pub fn violation(&self, theta: &DualPoint) -> f64 {
        let mut worst = norm(&theta.block_sum(0..self.n));
        for c in &self.cylinders {
            worst = worst.max(norm(&theta.block_sum(c.subset.iter().copied())) - 1.0);
        }
        worst.max(0.0)
    }
}

/// Builds `S_G` for `tree` in `R^m`, one cylinder per edge using the
/// canonical side of its boundary partition.
pub fn build_system(tree: &Tree, m: usize) -> ConstraintSystem {
    let cylinders = tree
        .edge_ids()
        .map(|e| Cylinder {
            edge: e,
            subset: tree.edge_partition(e).expect("edge of the tree").side_one,
        })
        .collect();
    ConstraintSystem {
        n: tree.boundary_count(),
        m,
        cylinders,
        boundary_degrees: (0..tree.boundary_count()).map(|k| tree.degree(k)).collect(),
    }
}

/// Removes the inequalities of the edges in `family` (the system `S_G ∖ E_d`).
pub fn drop_edges(system: &ConstraintSystem, tree: &Tree, family: &AdmissibleFamily) -> Result<ConstraintSystem, DualError> {
    // Re-checking guards against families built for another tree.
    let family = AdmissibleFamily::new(tree, &family.edges)?;
    let reduced = tree.reduce(&family);
    let cylinders = system
        .cylinders
        .iter()
        .filter(|c| family.edges.binary_search(&c.edge).is_err())
        .cloned()
        .collect();
    Ok(ConstraintSystem {
        n: system.n,
        m: system.m,
        cylinders,
        boundary_degrees: (0..system.n).map(|k| reduced.tree.degree(k)).collect(),
    })
}

/// A point `θ = (θ_1, .., θ_n)` of `R^{mn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    m: usize,
    theta: Vec<f64>,
}

impl DualPoint {
    pub fn new(m: usize, theta: Vec<f64>) -> Self {
        assert!(m > 0 && theta.len() % m == 0, "theta length must be a multiple of m");
        Self { m, theta }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self::new(m, vec![0.0; n * m])
    }

    pub fn from_blocks(m: usize, blocks: &[Vec<f64>]) -> Self {
        let theta = blocks.iter().flat_map(|b| b.iter().copied()).collect();
        Self::new(m, theta)
    }

    pub fn n(&self) -> usize {
        self.theta.len() / self.m
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn block(&self, k: usize) -> &[f64] {
        &self.theta[k * self.m..(k + 1) * self.m]
    }

    pub(crate) fn block_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.theta[k * self.m..(k + 1) * self.m]
    }

    pub fn block_sum(&self, subset: impl IntoIterator<Item = usize>) -> Vec<f64> {
        let mut s = vec![0.0; self.m];
        for k in subset {
            for (a, b) in s.iter_mut().zip(self.block(k)) {
                *a += b;
            }
        }
        s
    }

    /// `ρ_φ(θ) = ⟨θ, z⟩`.
    pub fn value(&self, z: &[f64]) -> f64 {
        dot(&self.theta, z)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.m, self.theta.iter().map(|x| x * factor).collect())
    }

    pub fn distance(&self, other: &DualPoint) -> f64 {
        self.theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
