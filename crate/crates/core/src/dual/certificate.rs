//! Vertex-edge vectors `θ(v, e)`, certificate checks, and the certificate
//! `ξ` built from an extreme network.

use nalgebra::DMatrix;

use super::projection::{project_equality, restore_feasibility};
use super::{build_system, dot, norm, DualError, DualPoint};
use crate::geometry::Network;
use crate::topology::{EdgeId, Tree};

/// The two vectors attached to one edge `e = ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVectors {
    pub edge: EdgeId,
    /// `(a, θ(a, e))`
    pub first: (usize, Vec<f64>),
    /// `(b, θ(b, e))`
    pub second: (usize, Vec<f64>),
}

/// `θ(v, e)` for every incidence of a tree, indexed by edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVectorMap {
    pub entries: Vec<EdgeVectors>,
}

impl EdgeVectorMap {
    pub fn get(&self, v: usize, e: EdgeId) -> Option<&[f64]> {
        let ev = self.entries.get(e.0)?;
        if ev.first.0 == v {
            Some(&ev.first.1)
        } else if ev.second.0 == v {
            Some(&ev.second.1)
        } else {
            None
        }
    }

    /// `max_e |θ(a, e) + θ(b, e)|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|ev| {
                let s: Vec<f64> = ev.first.1.iter().zip(&ev.second.1).map(|(a, b)| a + b).collect();
                norm(&s)
            })
            .fold(0.0, f64::max)
    }

    /// `Σ_{e ∋ v} θ(v, e)`.
    pub fn vertex_sum(&self, tree: &Tree, v: usize) -> Vec<f64> {
        let m = self.entries.first().map_or(0, |ev| ev.first.1.len());
        let mut s = vec![0.0; m];
        for &(_, e) in tree.neighbors(v) {
            for (a, b) in s.iter_mut().zip(self.get(v, e).expect("incidence")) {
                *a += b;
            }
        }
        s
    }

    pub fn max_norm(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|ev| [norm(&ev.first.1), norm(&ev.second.1)])
            .fold(0.0, f64::max)
    }
}

fn edge_vectors_unchecked(theta: &DualPoint, tree: &Tree) -> EdgeVectorMap {
    let entries = tree
        .edge_ids()
        .map(|e| {
            let (a, b) = tree.edges()[e.0];
            let (near, far) = tree.edge_sides(e).expect("edge of the tree");
            EdgeVectors {
                edge: e,
                first: (a, theta.block_sum(near)),
                second: (b, theta.block_sum(far)),
            }
        })
        .collect();
    EdgeVectorMap { entries }
}

/// `θ(v, e) = Σ θ_k` over the boundary vertices on `v`'s side of `e`.
///
/// Both vectors of an edge are summed independently; they are opposite only
/// when `θ` satisfies the balance equation, which is checked against `tol`.
pub fn edge_vectors(theta: &DualPoint, tree: &Tree, tol: f64) -> Result<EdgeVectorMap, DualError> {
    let residual = norm(&theta.block_sum(0..theta.n()));
    if residual > tol {
        return Err(DualError::SigmaViolated { residual });
    }
    Ok(edge_vectors_unchecked(theta, tree))
}

/// Everything [`verify_certificate`] measured.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// `|Σ θ_k|`.
    pub sigma_residual: f64,
    /// `max(0, |Σ_{B_e} θ_k| - 1)` per edge.
    pub cylinder_residuals: Vec<f64>,
    /// `max_e |θ(v, e) + θ(w, e)|`.
    pub antisymmetry_residual: f64,
    /// `max_k |θ_k - Σ_{e ∋ v_k} θ(v_k, e)|`.
    pub boundary_residual: f64,
    /// `max_v |Σ_{e ∋ v} θ(v, e)|` over interior vertices.
    pub interior_residual: f64,
    /// `max |θ(v, e)|`.
    pub max_edge_vector_norm: f64,
    /// `|⟨z, θ⟩ - Σ_{e = v_k v_l} ⟨z_k - z_l, θ(v_k, e)⟩|`.
    pub edge_sum_residual: f64,
    pub value: f64,
    pub primal_length: f64,
    /// `primal_length - value`.
    pub gap: f64,
    pub weak_duality_holds: bool,
    pub feasible: bool,
}

impl CertificateReport {
    pub fn max_cylinder_residual(&self) -> f64 {
        self.cylinder_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks a candidate `θ` against a network of the same type and boundary.
pub fn verify_certificate(theta: &DualPoint, network: &Network, tol: f64) -> CertificateReport {
    let tree = network.tree();
    let z = network.boundary();
    let sigma_residual = norm(&theta.block_sum(0..theta.n()));
    let system = build_system(tree, network.dim());
    let cylinder_residuals: Vec<f64> = system
        .cylinders()
        .iter()
        .map(|c| (norm(&theta.block_sum(c.subset.iter().copied())) - 1.0).max(0.0))
        .collect();
    let map = edge_vectors_unchecked(theta, tree);

    let mut boundary_residual: f64 = 0.0;
    for k in 0..tree.boundary_count() {
        let s = map.vertex_sum(tree, k);
        let d: Vec<f64> = s.iter().zip(theta.block(k)).map(|(a, b)| a - b).collect();
        boundary_residual = boundary_residual.max(norm(&d));
    }
    let interior_residual = (tree.boundary_count()..tree.vertex_count())
        .map(|v| norm(&map.vertex_sum(tree, v)))
        .fold(0.0, f64::max);

    let value = theta.value(z.as_flat());
    let edge_sum: f64 = map
        .entries
        .iter()
        .map(|ev| {
            let (a, ref ta) = ev.first;
            let b = ev.second.0;
            let d: Vec<f64> = network
                .position(a)
                .iter()
                .zip(network.position(b))
                .map(|(x, y)| x - y)
                .collect();
            dot(&d, ta)
        })
        .sum();
    let primal_length = network.length();
    let max_cyl = cylinder_residuals.iter().copied().fold(0.0, f64::max);
    CertificateReport {
        sigma_residual,
        antisymmetry_residual: map.antisymmetry_residual(),
        boundary_residual,
        interior_residual,
        max_edge_vector_norm: map.max_norm(),
        edge_sum_residual: (value - edge_sum).abs(),
        value,
        primal_length,
        gap: primal_length - value,
        weak_duality_holds: value <= primal_length + tol,
        feasible: sigma_residual <= tol && max_cyl <= tol,
        cylinder_residuals,
    }
}

/// A feasible point built from an extreme network.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `ξ` balanced and scaled into the body exactly.
    pub point: DualPoint,
    /// `ξ` exactly as assembled from `ξ(v, e)`.
    pub raw: DualPoint,
    pub edge_vectors: EdgeVectorMap,
    /// Constraint violation of `raw`.
    pub raw_residual: f64,
    pub degenerate_edges: Vec<EdgeId>,
    /// Residual of the balance equations at interior vertices.
    pub subproblem_residual: f64,
    pub sweeps: usize,
    /// `⟨z, point⟩`.
    pub value: f64,
}

const SUBPROBLEM_SWEEPS: usize = 10_000;

/// Builds `ξ` from an extreme network.
///
/// Non-degenerate edges get the unit vector of the edge entering each
/// endpoint. Degenerate edges get vectors of norm at most one that balance
/// every interior vertex; those are found by alternating projections between
/// the affine balance constraints and the product of unit balls.
pub fn certificate_from_primal(network: &Network, tol: f64) -> Result<Certificate, DualError> {
    let tree = network.tree();
    let m = network.dim();
    let degenerate = network.degenerate_edges(tol).degenerate_edges;
    let mut is_degenerate = vec![false; tree.edge_count()];
    for e in &degenerate {
        is_degenerate[e.0] = true;
    }

    // xi[e] = ξ(a, e) for e = (a, b); ξ(b, e) = -xi[e].
    let mut xi: Vec<Vec<f64>> = tree
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            if is_degenerate[i] {
                return vec![0.0; m];
            }
            let d: Vec<f64> = network
                .position(a)
                .iter()
                .zip(network.position(b))
                .map(|(x, y)| x - y)
                .collect();
            let r = norm(&d);
            d.iter().map(|x| x / r).collect()
        })
        .collect();

    let (subproblem_residual, sweeps) = if degenerate.is_empty() {
        (0.0, 0)
    } else {
        solve_degenerate(tree, &degenerate, &mut xi, tol)?
    };

    let n = tree.boundary_count();
    let mut raw = DualPoint::zeros(n, m);
    for (i, &(a, b)) in tree.edges().iter().enumerate() {
        for (v, sign) in [(a, 1.0), (b, -1.0)] {
            if v < n {
                for (t, x) in raw.block_mut(v).iter_mut().zip(&xi[i]) {
                    *t += sign * x;
                }
            }
        }
    }
    let entries = tree
        .edges()
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| EdgeVectors {
            edge: EdgeId(i),
            first: (a, xi[i].clone()),
            second: (b, xi[i].iter().map(|x| -x).collect()),
        })
        .collect();
    let system = build_system(tree, m);
    let raw_residual = system.violation(&raw);
    let point = restore_feasibility(&project_equality(&raw), &system);
    let value = point.value(network.boundary().as_flat());
    Ok(Certificate {
        point,
        raw,
        edge_vectors: EdgeVectorMap { entries },
        raw_residual,
        degenerate_edges: degenerate,
        subproblem_residual,
        sweeps,
        value,
    })
}

/// Fills `xi` on degenerate edges. Returns the final balance residual and
/// the number of sweeps.
fn solve_degenerate(tree: &Tree, degenerate: &[EdgeId], xi: &mut [Vec<f64>], tol: f64) -> Result<(f64, usize), DualError> {
    let m = xi.first().map_or(0, Vec::len);
    let n = tree.boundary_count();
    // Interior vertices touched by a degenerate edge.
    let rows: Vec<usize> = (n..tree.vertex_count())
        .filter(|&v| tree.neighbors(v).iter().any(|(_, e)| degenerate.contains(e)))
        .collect();
    let cols = degenerate.len();
    if rows.is_empty() {
        for e in degenerate {
            xi[e.0].iter_mut().for_each(|x| *x = 0.0);
        }
        return Ok((0.0, 0));
    }
    // M y = b, one row per vertex, one column per degenerate edge; the same
    // matrix acts on every coordinate.
    let mut mat = DMatrix::<f64>::zeros(rows.len(), cols);
    let mut rhs = DMatrix::<f64>::zeros(rows.len(), m);
    for (r, &v) in rows.iter().enumerate() {
        for &(_, e) in tree.neighbors(v) {
            let sign = if tree.edges()[e.0].0 == v { 1.0 } else { -1.0 };
            match degenerate.iter().position(|&d| d == e) {
                Some(c) => mat[(r, c)] = sign,
                None => {
                    for j in 0..m {
                        rhs[(r, j)] -= sign * xi[e.0][j];
                    }
                }
            }
        }
    }
    let pinv = mat
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|_| DualError::CertificateSubproblem {
            residual: f64::INFINITY,
            sweeps: 0,
        })?;
    let mut y = DMatrix::<f64>::zeros(cols, m);
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    let target = tol.max(1e-14);
    while sweeps < SUBPROBLEM_SWEEPS {
        sweeps += 1;
        // Affine step.
        let r = &mat * &y - &rhs;
        y -= &pinv * r;
        // Ball step.
        for mut row in y.row_iter_mut() {
            let nrm = row.norm();
            if nrm > 1.0 {
                row /= nrm;
            }
        }
        residual = (&mat * &y - &rhs).norm();
        if residual <= target {
            break;
        }
    }
    for (c, e) in degenerate.iter().enumerate() {
        for j in 0..m {
            xi[e.0][j] = y[(c, j)];
        }
    }
    if residual > target * 1e2 {
        return Err(DualError::CertificateSubproblem { residual, sweeps });
    }
    Ok((residual, sweeps))
}
