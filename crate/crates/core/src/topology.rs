//! Combinatorial trees with a boundary.
//!
//! Vertices are numbered `0..n` for the boundary and `n..n+s` for the
//! interior. Every vertex of degree one or two must be a boundary vertex.
//! Messages and the instance file format use 1-based indices; everything in
//! this module is 0-based.

use std::collections::VecDeque;
use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

/// Index of an edge in [`Tree::edges`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0 + 1)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("tree must have at least one vertex")]
    Empty,
    #[error("boundary size {boundary} exceeds vertex count {vertices}")]
    BoundaryTooLarge { boundary: usize, vertices: usize },
    #[error("edge ({}, {}) references a vertex outside 1..={vertices}", .a + 1, .b + 1)]
    VertexOutOfRange { a: usize, b: usize, vertices: usize },
    #[error("edge ({}, {}) is a self-loop", .0 + 1, .0 + 1)]
    SelfLoop(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("no edge joins v{} and v{}", .0 + 1, .1 + 1)]
    NoSuchEdge(usize, usize),
    #[error("invalid tree: {0}")]
    Invalid(ValidationReport),
    #[error("edge family is not admissible: one component contains boundary vertices {}", fmt_vertices(.boundary))]
    NotAdmissible { boundary: Vec<usize> },
}

fn fmt_vertices(vs: &[usize]) -> String {
    vs.iter()
        .map(|v| format!("v{}", v + 1))
        .collect::<Vec<_>>()
        .join(", ")
}

/// A single problem found by [`Tree::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `|E| != |V| - 1`.
    EdgeCount { vertices: usize, edges: usize },
    /// The edge closes a cycle.
    Cycle { edge: EdgeId },
    /// The graph has more than one connected component.
    Disconnected { components: usize },
    /// A vertex of degree 1 or 2 is not in the boundary.
    LowDegreeInterior { vertex: usize, degree: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeCount { vertices, edges } => write!(
                f,
                "not a tree: {edges} edges on {vertices} vertices (expected {})",
                vertices.saturating_sub(1)
            ),
            Violation::Cycle { edge } => write!(f, "edge {edge} closes a cycle"),
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
            Violation::LowDegreeInterior { vertex, degree } => write!(
                f,
                "vertex v{} has degree {degree} but is not in the boundary",
                vertex + 1
            ),
        }
    }
}

/// Result of [`Tree::validate`]; empty means the tree is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A finite tree `G = (V, E)` with boundary `{0, .., n-1}`.
///
/// A `Tree` built with [`Tree::from_edges`] only has in-range, loop-free
/// edges; [`Tree::new`] additionally requires [`Tree::validate`] to pass.
/// All other operations assume a valid tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    vertex_count: usize,
    boundary_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, EdgeId)>>,
}

impl Tree {
    /// Builds and validates a tree.
    pub fn new(
        vertex_count: usize,
        boundary_count: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, TopologyError> {
        let tree = Self::from_edges(vertex_count, boundary_count, edges)?;
        let report = tree.validate();
        if report.is_valid() {
            Ok(tree)
        } else {
            Err(TopologyError::Invalid(report))
        }
    }

    /// Builds a graph that may still violate the tree invariants.
    pub fn from_edges(
        vertex_count: usize,
        boundary_count: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, TopologyError> {
        if vertex_count == 0 {
            return Err(TopologyError::Empty);
        }
        if boundary_count > vertex_count {
            return Err(TopologyError::BoundaryTooLarge {
                boundary: boundary_count,
                vertices: vertex_count,
            });
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a >= vertex_count || b >= vertex_count {
                return Err(TopologyError::VertexOutOfRange {
                    a,
                    b,
                    vertices: vertex_count,
                });
            }
            if a == b {
                return Err(TopologyError::SelfLoop(a));
            }
            adjacency[a].push((b, EdgeId(i)));
            adjacency[b].push((a, EdgeId(i)));
        }
        Ok(Self {
            vertex_count,
            boundary_count,
            edges,
            adjacency,
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.edges.len() + 1 != self.vertex_count {
            violations.push(Violation::EdgeCount {
                vertices: self.vertex_count,
                edges: self.edges.len(),
            });
        }
        let mut uf = UnionFind::<usize>::new(self.vertex_count);
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if !uf.union(a, b) {
                violations.push(Violation::Cycle { edge: EdgeId(i) });
            }
        }
        let mut roots: Vec<usize> = (0..self.vertex_count).map(|v| uf.find(v)).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() > 1 {
            violations.push(Violation::Disconnected {
                components: roots.len(),
            });
        }
        for v in self.boundary_count..self.vertex_count {
            let degree = self.degree(v);
            if degree == 1 || degree == 2 {
                violations.push(Violation::LowDegreeInterior { vertex: v, degree });
            }
        }
        ValidationReport { violations }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Boundary size `n`.
    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    /// Interior size `s`.
    pub fn interior_count(&self) -> usize {
        self.vertex_count - self.boundary_count
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        v < self.boundary_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> Result<(usize, usize), TopologyError> {
        self.edges
            .get(e.0)
            .copied()
            .ok_or(TopologyError::UnknownEdge(e))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Neighbours of `v` with the joining edge, in edge-list order.
    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<EdgeId> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|&&(w, _)| w == b)
            .map(|&(_, e)| e)
    }

    /// Vertices reachable from `start` without crossing `cut`.
    fn component_without(&self, start: usize, cut: EdgeId) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &self.adjacency[v] {
                if e != cut && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Boundary vertices on each side of `e`, ordered like the edge's
    /// endpoints: the first list is the side containing `edges()[e].0`.
    pub fn edge_sides(&self, e: EdgeId) -> Result<(Vec<usize>, Vec<usize>), TopologyError> {
        let (a, _) = self.edge(e)?;
        let side_a = self.component_without(a, e);
        let (near, far): (Vec<usize>, Vec<usize>) =
            (0..self.boundary_count).partition(|&k| side_a[k]);
        Ok((near, far))
    }

    /// The partition `{B_1, B_2}` of the boundary induced by deleting `e`.
    pub fn edge_partition(&self, e: EdgeId) -> Result<EdgePartition, TopologyError> {
        let (near, far) = self.edge_sides(e)?;
        Ok(EdgePartition::canonical(e, near, far))
    }

    /// Checks whether `edges` is an admissible family and returns the
    /// components it spans.
    pub fn admissibility(&self, edges: &[EdgeId]) -> Result<Admissibility, TopologyError> {
        let mut uf = UnionFind::<usize>::new(self.vertex_count);
        let mut in_family = vec![false; self.edges.len()];
        for &e in edges {
            let (a, b) = self.edge(e)?;
            in_family[e.0] = true;
            uf.union(a, b);
        }
        // Group touched vertices by their union-find root, ordered by the
        // smallest member.
        let mut touched = vec![false; self.vertex_count];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if in_family[i] {
                touched[a] = true;
                touched[b] = true;
            }
        }
        let mut components: Vec<Component> = Vec::new();
        let mut root_slot: Vec<Option<usize>> = vec![None; self.vertex_count];
        for v in (0..self.vertex_count).filter(|&v| touched[v]) {
            let r = uf.find(v);
            let slot = *root_slot[r].get_or_insert_with(|| {
                components.push(Component::default());
                components.len() - 1
            });
            components[slot].vertices.push(v);
        }
        for (i, &(a, _)) in self.edges.iter().enumerate() {
            if in_family[i] {
                let slot = root_slot[uf.find(a)].expect("touched vertex");
                components[slot].edges.push(EdgeId(i));
            }
        }
        let offending = components
            .iter()
            .position(|c| c.vertices.iter().filter(|&&v| self.is_boundary(v)).count() > 1);
        Ok(Admissibility {
            admissible: offending.is_none(),
            components,
            offending,
        })
    }

    pub fn is_admissible(&self, edges: &[EdgeId]) -> Result<bool, TopologyError> {
        Ok(self.admissibility(edges)?.admissible)
    }

    /// Contracts each component of an admissible family to a single vertex.
    pub fn reduce(&self, family: &AdmissibleFamily) -> ReducedTree {
        let n = self.boundary_count;
        let mut vertex_map: Vec<Option<usize>> = vec![None; self.vertex_count];
        // Components holding a boundary vertex take its index.
        let mut component_of = vec![None; self.vertex_count];
        for (ci, c) in family.components.iter().enumerate() {
            for &v in &c.vertices {
                component_of[v] = Some(ci);
            }
        }
        for k in 0..n {
            match component_of[k] {
                Some(ci) => {
                    for &v in &family.components[ci].vertices {
                        vertex_map[v] = Some(k);
                    }
                }
                None => vertex_map[k] = Some(k),
            }
        }
        let mut next = n;
        for v in n..self.vertex_count {
            if vertex_map[v].is_some() {
                continue;
            }
            match component_of[v] {
                Some(ci) => {
                    for &w in &family.components[ci].vertices {
                        vertex_map[w] = Some(next);
                    }
                }
                None => vertex_map[v] = Some(next),
            }
            next += 1;
        }
        let vertex_map: Vec<usize> = vertex_map.into_iter().map(|v| v.expect("mapped")).collect();

        let mut dropped = vec![false; self.edges.len()];
        for &e in &family.edges {
            dropped[e.0] = true;
        }
        let mut edges = Vec::new();
        let mut edge_map = vec![None; self.edges.len()];
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if !dropped[i] {
                edge_map[i] = Some(EdgeId(edges.len()));
                edges.push((vertex_map[a], vertex_map[b]));
            }
        }
        let tree = Tree::new(next, n, edges).expect("quotient of a valid tree by an admissible family is a tree");
        ReducedTree {
            tree,
            vertex_map,
            edge_map,
        }
    }

    /// Vertices on the unique path from `from` to `to`, inclusive.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.vertex_count];
        let mut queue = VecDeque::from([from]);
        parent[from] = from;
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(w, _) in &self.adjacency[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![to];
        let mut v = to;
        while v != from {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        path
    }
}

/// The boundary partition `{side_one, side_two}` induced by deleting an edge.
///
/// `side_one` is the smaller side; on a tie it is the side without the
/// lowest-index boundary vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePartition {
    pub edge: EdgeId,
    pub side_one: Vec<usize>,
    pub side_two: Vec<usize>,
}

impl EdgePartition {
    fn canonical(edge: EdgeId, a: Vec<usize>, b: Vec<usize>) -> Self {
        let a_first = match a.len().cmp(&b.len()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => !a.contains(&0),
        };
        let (side_one, side_two) = if a_first { (a, b) } else { (b, a) };
        Self {
            edge,
            side_one,
            side_two,
        }
    }
}

/// A connected component of the subgraph spanned by an edge family.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub components: Vec<Component>,
    /// Index of the first component with two or more boundary vertices.
    pub offending: Option<usize>,
}

/// An edge family `E_d` whose components each meet the boundary at most once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleFamily {
    pub edges: Vec<EdgeId>,
    pub components: Vec<Component>,
}

impl AdmissibleFamily {
    pub fn new(tree: &Tree, edges: &[EdgeId]) -> Result<Self, TopologyError> {
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        edges.dedup();
        let adm = tree.admissibility(&edges)?;
        if let Some(i) = adm.offending {
            let boundary = adm.components[i]
                .vertices
                .iter()
                .copied()
                .filter(|&v| tree.is_boundary(v))
                .collect();
            return Err(TopologyError::NotAdmissible { boundary });
        }
        Ok(Self {
            edges,
            components: adm.components,
        })
    }

    pub fn empty() -> Self {
        Self {
            edges: Vec::new(),
            components: Vec::new(),
        }
    }
}

/// The quotient `G/α` together with the maps from the original tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedTree {
    pub tree: Tree,
    /// Original vertex -> quotient vertex. Boundary vertex `k` maps to `k`.
    pub vertex_map: Vec<usize>,
    /// Original edge -> quotient edge, `None` for contracted edges.
    pub edge_map: Vec<Option<EdgeId>>,
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn star_is_valid() {
        assert!(star3().validate().is_valid());
    }

    #[test]
    fn leaf_outside_boundary_is_reported() {
        let t = Tree::from_edges(4, 2, vec![(0, 3), (1, 3), (2, 3)]).unwrap();
        let report = t.validate();
        assert_eq!(
            report.violations,
            vec![Violation::LowDegreeInterior {
                vertex: 2,
                degree: 1
            }]
        );
    }

    #[test]
    fn cycle_is_reported() {
        let t = Tree::from_edges(4, 4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let report = t.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EdgeCount { .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle { .. })));
        assert!(Tree::new(4, 4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).is_err());
    }

    #[test]
    fn disconnected_is_reported() {
        let t = Tree::from_edges(4, 4, vec![(0, 1), (2, 3), (2, 3)]).unwrap();
        let report = t.validate();
        assert!(report
            .violations
            .contains(&Violation::Disconnected { components: 2 }));
    }

    #[test]
    fn rejects_out_of_range_and_loops() {
        assert!(matches!(
            Tree::from_edges(2, 2, vec![(0, 2)]),
            Err(TopologyError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            Tree::from_edges(2, 2, vec![(1, 1)]),
            Err(TopologyError::SelfLoop(1))
        ));
        assert!(Tree::from_edges(0, 0, vec![]).is_err());
        assert!(Tree::from_edges(2, 3, vec![(0, 1)]).is_err());
    }

    #[test]
    fn partitions_match_hand_computation() {
        let star = star3();
        let p = star.edge_partition(EdgeId(0)).unwrap();
        assert_eq!(p.side_one, vec![0]);
        assert_eq!(p.side_two, vec![1, 2]);

        let path = Tree::new(3, 3, vec![(0, 1), (1, 2)]).unwrap();
        let p = path.edge_partition(EdgeId(1)).unwrap();
        assert_eq!(p.side_one, vec![2]);
        assert_eq!(p.side_two, vec![0, 1]);

        let bin = binary4();
        let p = bin.edge_partition(EdgeId(2)).unwrap();
        assert_eq!(p.side_one, vec![2, 3]);
        assert_eq!(p.side_two, vec![0, 1]);

        assert_eq!(
            bin.edge_partition(EdgeId(9)),
            Err(TopologyError::UnknownEdge(EdgeId(9)))
        );
    }

    #[test]
    fn two_vertex_tree_partition_excludes_first_vertex() {
        let t = Tree::new(2, 2, vec![(0, 1)]).unwrap();
        let p = t.edge_partition(EdgeId(0)).unwrap();
        assert_eq!(p.side_one, vec![1]);
    }

    #[test]
    fn admissibility_examples() {
        let bin = binary4();
        let a = bin.admissibility(&[EdgeId(2)]).unwrap();
        assert!(a.admissible);
        assert_eq!(a.components.len(), 1);
        assert_eq!(a.components[0].vertices, vec![4, 5]);

        let a = bin.admissibility(&[EdgeId(0), EdgeId(1)]).unwrap();
        assert!(!a.admissible);
        assert_eq!(
            AdmissibleFamily::new(&bin, &[EdgeId(0), EdgeId(1)]),
            Err(TopologyError::NotAdmissible {
                boundary: vec![0, 1]
            })
        );

        let a = bin.admissibility(&[]).unwrap();
        assert!(a.admissible && a.components.is_empty());

        assert!(bin.admissibility(&[EdgeId(7)]).is_err());
    }

    #[test]
    fn contracting_interior_edge_gives_star() {
        let bin = binary4();
        let fam = AdmissibleFamily::new(&bin, &[EdgeId(2)]).unwrap();
        let r = bin.reduce(&fam);
        assert_eq!(r.tree.vertex_count(), 5);
        assert_eq!(r.tree.boundary_count(), 4);
        assert_eq!(r.tree.degree(4), 4);
        assert_eq!(r.vertex_map, vec![0, 1, 2, 3, 4, 4]);
        assert_eq!(r.edge_map[2], None);
        assert!(r.tree.validate().is_valid());
    }

    #[test]
    fn empty_family_is_identity() {
        let bin = binary4();
        let r = bin.reduce(&AdmissibleFamily::empty());
        assert_eq!(r.tree, bin);
        assert_eq!(r.vertex_map, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn contracting_leaf_edge_of_star_gives_path() {
        let star = star3();
        let fam = AdmissibleFamily::new(&star, &[EdgeId(0)]).unwrap();
        let r = star.reduce(&fam);
        assert_eq!(r.tree.vertex_count(), 3);
        assert_eq!(r.tree.degree(0), 2);
        assert_eq!(r.vertex_map, vec![0, 1, 2, 0]);
        assert!(r.tree.validate().is_valid());
    }

    #[test]
    fn path_between_leaves() {
        let bin = binary4();
        assert_eq!(bin.path(0, 3), vec![0, 4, 5, 3]);
        assert_eq!(bin.path(2, 2), vec![2]);
    }
}
