//! Boundary configurations and embedded networks.

use thiserror::Error;

use crate::topology::{AdmissibleFamily, EdgeId, ReducedTree, TopologyError, Tree};

/// Relative degeneracy threshold: edges shorter than this times the boundary
/// diameter are treated as collapsed.
pub const DEFAULT_DEGENERACY_RATIO: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("expected {expected} boundary points, got {got}")]
    BoundaryCountMismatch { expected: usize, got: usize },
    #[error("expected {expected} coordinates, got {got}")]
    CoordinateCount { expected: usize, got: usize },
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("boundary vertices v{} and v{} coincide", .0 + 1, .1 + 1)]
    NonInjectiveBoundary(usize, usize),
    #[error(
        "degenerate edges join boundary vertices v{} and v{} that are {distance:e} apart; tolerance is inconsistent",
        .a + 1, .b + 1
    )]
    InconsistentTolerance { a: usize, b: usize, distance: f64 },
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Boundary points `z_1, .., z_n` in `R^m`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConfig {
    dim: usize,
    coords: Vec<f64>,
}

impl BoundaryConfig {
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let mut coords = Vec::with_capacity(dim * points.len());
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(GeometryError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if coords.len() % dim != 0 {
            return Err(GeometryError::CoordinateCount {
                expected: coords.len().div_ceil(dim) * dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// The configuration vector `z ∈ R^{mn}`.
    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Largest pairwise distance between boundary points.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max(dist(self.point(i), self.point(j)));
            }
        }
        d
    }

    /// Length scale used for relative tolerances; never zero.
    pub fn scale(&self) -> f64 {
        let d = self.diameter();
        if d > 0.0 {
            d
        } else {
            1.0
        }
    }

    pub fn default_degeneracy_tol(&self) -> f64 {
        DEFAULT_DEGENERACY_RATIO * self.scale()
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.points() {
            for (ci, x) in c.iter_mut().zip(p) {
                *ci += x;
            }
        }
        let n = self.len().max(1) as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }
}

/// A network of type `G`: positions for all `n + s` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    tree: Tree,
    dim: usize,
    positions: Vec<f64>,
}

impl Network {
    /// Builds a network from boundary points and interior positions
    /// (`s·m` numbers, vertex `n` first).
    pub fn new(tree: Tree, boundary: &BoundaryConfig, interior: &[f64]) -> Result<Self, GeometryError> {
        if boundary.len() != tree.boundary_count() {
            return Err(GeometryError::BoundaryCountMismatch {
                expected: tree.boundary_count(),
                got: boundary.len(),
            });
        }
        let expected = tree.interior_count() * boundary.dim();
        if interior.len() != expected {
            return Err(GeometryError::CoordinateCount {
                expected,
                got: interior.len(),
            });
        }
        if interior.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let mut positions = boundary.as_flat().to_vec();
        positions.extend_from_slice(interior);
        Ok(Self {
            tree,
            dim: boundary.dim(),
            positions,
        })
    }

    /// Builds a network from all `(n + s)·m` coordinates.
    pub fn from_positions(tree: Tree, dim: usize, positions: Vec<f64>) -> Result<Self, GeometryError> {
        if dim == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        let expected = tree.vertex_count() * dim;
        if positions.len() != expected {
            return Err(GeometryError::CoordinateCount {
                expected,
                got: positions.len(),
            });
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self {
            tree,
            dim,
            positions,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn position(&self, v: usize) -> &[f64] {
        &self.positions[v * self.dim..(v + 1) * self.dim]
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn interior_positions(&self) -> &[f64] {
        &self.positions[self.tree.boundary_count() * self.dim..]
    }

    pub fn boundary(&self) -> BoundaryConfig {
        BoundaryConfig {
            dim: self.dim,
            coords: self.positions[..self.tree.boundary_count() * self.dim].to_vec(),
        }
    }

    pub fn edge_length(&self, e: EdgeId) -> f64 {
        let (a, b) = self.tree.edges()[e.0];
        dist(self.position(a), self.position(b))
    }

    /// Sum of the Euclidean lengths of all edges.
    pub fn length(&self) -> f64 {
        self.tree.edge_ids().map(|e| self.edge_length(e)).sum()
    }

    pub fn degenerate_edges(&self, tol: f64) -> DegeneracyReport {
        let degenerate_edges = self
            .tree
            .edge_ids()
            .filter(|&e| self.edge_length(e) <= tol)
            .collect();
        DegeneracyReport {
            degenerate_edges,
            tolerance: tol,
        }
    }

    /// Checks that distinct boundary vertices are more than `tol` apart.
    pub fn check_injective_boundary(&self, tol: f64) -> Result<(), GeometryError> {
        let n = self.tree.boundary_count();
        for a in 0..n {
            for b in a + 1..n {
                if dist(self.position(a), self.position(b)) <= tol {
                    return Err(GeometryError::NonInjectiveBoundary(a, b));
                }
            }
        }
        Ok(())
    }

    /// Contracts the components of `Γ`-degenerate edges, returning the
    /// reduced tree and the induced network on it.
    pub fn gamma_reduce(&self, tol: f64) -> Result<(ReducedTree, Network), GeometryError> {
        let report = self.degenerate_edges(tol);
        let adm = self.tree.admissibility(&report.degenerate_edges)?;
        if let Some(i) = adm.offending {
            let bnd: Vec<usize> = adm.components[i]
                .vertices
                .iter()
                .copied()
                .filter(|&v| self.tree.is_boundary(v))
                .collect();
            let (a, b) = (bnd[0], bnd[1]);
            let distance = dist(self.position(a), self.position(b));
            return Err(if distance <= tol {
                GeometryError::NonInjectiveBoundary(a, b)
            } else {
                GeometryError::InconsistentTolerance { a, b, distance }
            });
        }
        let family = AdmissibleFamily {
            edges: report.degenerate_edges,
            components: adm.components,
        };
        let reduced = self.tree.reduce(&family);
        let count = reduced.tree.vertex_count();
        let mut sums = vec![0.0; count * self.dim];
        let mut weights = vec![0usize; count];
        let mut pinned = vec![false; count];
        for v in 0..self.tree.vertex_count() {
            let q = reduced.vertex_map[v];
            let target = &mut sums[q * self.dim..(q + 1) * self.dim];
            if self.tree.is_boundary(v) {
                target.copy_from_slice(self.position(v));
                pinned[q] = true;
                weights[q] = 1;
            } else if !pinned[q] {
                for (t, x) in target.iter_mut().zip(self.position(v)) {
                    *t += x;
                }
                weights[q] += 1;
            }
        }
        for q in 0..count {
            if !pinned[q] {
                let w = weights[q] as f64;
                sums[q * self.dim..(q + 1) * self.dim]
                    .iter_mut()
                    .for_each(|x| *x /= w);
            }
        }
        let network = Network::from_positions(reduced.tree.clone(), self.dim, sums)?;
        Ok((reduced, network))
    }

    /// Tests the 120° condition on the `Γ`-reduced network.
    ///
    /// `angle_tol` is in degrees; `len_tol` is used both for the boundary
    /// injectivity check and as the degeneracy threshold.
    pub fn local_minimality(&self, angle_tol: f64, len_tol: f64) -> Result<LocalMinimality, GeometryError> {
        self.check_injective_boundary(len_tol)?;
        let (reduced, net) = self.gamma_reduce(len_tol)?;
        let mut angles = Vec::new();
        for v in 0..net.tree.vertex_count() {
            let nbrs = net.tree.neighbors(v);
            for i in 0..nbrs.len() {
                for j in i + 1..nbrs.len() {
                    let (a, ea) = nbrs[i];
                    let (b, eb) = nbrs[j];
                    let angle = angle_deg(net.position(v), net.position(a), net.position(b));
                    angles.push(VertexAngle {
                        vertex: v,
                        edges: (ea, eb),
                        degrees: angle,
                    });
                }
            }
        }
        let threshold = 120.0 - angle_tol;
        let offending = angles
            .iter()
            .filter(|a| a.degrees < threshold)
            .cloned()
            .collect::<Vec<_>>();
        Ok(LocalMinimality {
            locally_minimal: offending.is_empty(),
            reduced,
            angles,
            offending,
        })
    }

    pub fn is_locally_minimal(&self, angle_tol: f64, len_tol: f64) -> Result<bool, GeometryError> {
        Ok(self.local_minimality(angle_tol, len_tol)?.locally_minimal)
    }
}

/// Angle at `apex` between the rays towards `a` and `b`, in degrees.
pub fn angle_deg(apex: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let u: Vec<f64> = a.iter().zip(apex).map(|(x, y)| x - y).collect();
    let w: Vec<f64> = b.iter().zip(apex).map(|(x, y)| x - y).collect();
    let c = dot(&u, &w) / (norm(&u) * norm(&w));
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub degenerate_edges: Vec<EdgeId>,
    pub tolerance: f64,
}

/// Angle between two edges of the reduced network at one of its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexAngle {
    /// Vertex of the reduced tree.
    pub vertex: usize,
    /// Edges of the reduced tree.
    pub edges: (EdgeId, EdgeId),
    pub degrees: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMinimality {
    pub locally_minimal: bool,
    pub reduced: ReducedTree,
    pub angles: Vec<VertexAngle>,
    pub offending: Vec<VertexAngle>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::fixtures::*;

    fn equilateral() -> BoundaryConfig {
        let h = 3f64.sqrt() / 2.0;
        BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap()
    }

    fn fermat_network() -> Network {
        let z = equilateral();
        let c = z.centroid();
        Network::new(star3(), &z, &c).unwrap()
    }

    #[test]
    fn segment_length() {
        let t = Tree::new(2, 2, vec![(0, 1)]).unwrap();
        let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let net = Network::new(t, &z, &[]).unwrap();
        assert_eq!(net.length(), 5.0);
        assert!(net.is_locally_minimal(0.0, 1e-9).unwrap());
    }

    #[test]
    fn centroid_star_length() {
        let net = fermat_network();
        approx::assert_abs_diff_eq!(net.length(), 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn coincident_network_has_zero_length() {
        let z = BoundaryConfig::new(3, &vec![vec![1.0, 2.0, 3.0]; 4]).unwrap();
        let net = Network::new(binary4(), &z, &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(net.length(), 0.0);
        assert_eq!(net.degenerate_edges(0.0).degenerate_edges.len(), 5);
    }

    #[test]
    fn degeneracy_thresholds() {
        let net = fermat_network();
        assert!(net.degenerate_edges(1e-9).degenerate_edges.is_empty());
        assert_eq!(net.degenerate_edges(1.0).degenerate_edges.len(), 3);
    }

    #[test]
    fn obtuse_reduction_merges_steiner_point() {
        let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![-0.6, 0.3]]).unwrap();
        let net = Network::new(star3(), &z, &[0.0, 0.0]).unwrap();
        let rep = net.degenerate_edges(1e-9);
        assert_eq!(rep.degenerate_edges, vec![EdgeId(0)]);
        let (reduced, rnet) = net.gamma_reduce(1e-9).unwrap();
        assert_eq!(reduced.tree.vertex_count(), 3);
        assert_eq!(reduced.tree.degree(0), 2);
        approx::assert_abs_diff_eq!(rnet.length(), net.length(), epsilon = 1e-15);
        let lm = net.local_minimality(0.0, 1e-9).unwrap();
        assert!(lm.locally_minimal);
        assert_eq!(lm.angles.len(), 1);
        assert!(lm.angles[0].degrees > 150.0);
    }

    #[test]
    fn collapsed_interior_edge_gives_star() {
        let z = BoundaryConfig::new(2, &[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]])
            .unwrap();
        let net = Network::new(binary4(), &z, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        let (reduced, rnet) = net.gamma_reduce(1e-12).unwrap();
        assert_eq!(reduced.tree.vertex_count(), 5);
        assert_eq!(reduced.tree.edge_count(), 4);
        assert_eq!(rnet.position(4), &[0.5, 0.5]);
        // Degree-4 interior vertex: right angles.
        assert!(!net.is_locally_minimal(0.5, 1e-12).unwrap());
    }

    #[test]
    fn nondegenerate_reduction_is_identity() {
        let net = fermat_network();
        let (reduced, rnet) = net.gamma_reduce(1e-9).unwrap();
        assert_eq!(&reduced.tree, net.tree());
        assert_eq!(rnet, net);
    }

    #[test]
    fn fermat_angles_are_120() {
        let lm = fermat_network().local_minimality(0.0 + 1e-9, 1e-9).unwrap();
        assert!(lm.locally_minimal);
        for a in &lm.angles {
            approx::assert_abs_diff_eq!(a.degrees, 120.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn displaced_steiner_point_is_not_minimal() {
        let z = equilateral();
        let mut c = z.centroid();
        c[0] += 0.1;
        let net = Network::new(star3(), &z, &c).unwrap();
        let lm = net.local_minimality(0.0, 1e-9).unwrap();
        assert!(!lm.locally_minimal);
        assert!(!lm.offending.is_empty());
    }

    #[test]
    fn merged_boundary_points_are_rejected() {
        let t = Tree::new(2, 2, vec![(0, 1)]).unwrap();
        let z = BoundaryConfig::new(1, &[vec![0.0], vec![0.0]]).unwrap();
        let net = Network::new(t, &z, &[]).unwrap();
        assert_eq!(
            net.gamma_reduce(1e-9),
            Err(GeometryError::NonInjectiveBoundary(0, 1))
        );
        assert!(net.local_minimality(0.0, 1e-9).is_err());
    }

    #[test]
    fn chained_tolerance_is_inconsistent() {
        // Path v1 - v3 - v2 with two short edges; boundary points 1.5·tol apart.
        let t = Tree::new(3, 2, vec![(0, 2), (2, 1)]);
        // v3 has degree 2 and is interior, so this is not a valid tree; use a star.
        assert!(t.is_err());
        let z = BoundaryConfig::new(1, &[vec![0.0], vec![1.5], vec![10.0]]).unwrap();
        let net = Network::new(star3(), &z, &[0.75]).unwrap();
        assert!(matches!(
            net.gamma_reduce(1.0),
            Err(GeometryError::InconsistentTolerance { a: 0, b: 1, .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(BoundaryConfig::new(0, &[]).is_err());
        assert!(BoundaryConfig::new(2, &[vec![0.0]]).is_err());
        assert!(BoundaryConfig::new(1, &[vec![f64::NAN]]).is_err());
        assert!(Network::new(star3(), &equilateral(), &[0.0]).is_err());
    }
}
