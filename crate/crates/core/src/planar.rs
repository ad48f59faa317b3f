//! The planar length formula for locally minimal binary trees.
//!
//! Identify `R²` with `ℂ`. For a planar immersed binary tree the boundary
//! edge directions `e^{iψ_q}` (pointing into the terminals) are fixed by one
//! of them and the twisting numbers: walking from terminal `p` to terminal
//! `q`, every left turn rotates the direction of travel by `+60°` and every
//! right turn by `-60°`, so `e^{iψ_q} = -e^{iψ_p} e^{iπ t_pq / 3}`.
//!
//! With `t_k` the vector whose `k`-th entry is `1` and whose `q`-th entry is
//! `-e^{iπ t_kq / 3}`, the direction vector is `θ = e^{iψ_k} t_k`, the
//! length is `|⟨z, t_k⟩|` and `e^{iψ_k} = ⟨z, t_k⟩ / |⟨z, t_k⟩|`, where
//! `⟨a, b⟩ = Σ a_q conj(b_q)`.
//!
//! Turn convention: the rotation at a vertex lists its edges
//! counterclockwise. Arriving along edge `a`, leaving along the edge that
//! follows `a` counterclockwise is a right turn (`-1`); leaving along the
//! edge that precedes it is a left turn (`+1`).

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{BoundaryConfig, GeometryError, Network};
use crate::topology::{EdgeId, Tree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanarError {
    #[error("planar formulas need dimension 2, got {0}")]
    Dimension(usize),
    #[error("tree is not binary: v{} has degree {degree}", .vertex + 1)]
    NotBinary { vertex: usize, degree: usize },
    #[error("missing rotation for interior vertex v{}", .0 + 1)]
    MissingRotation(usize),
    #[error("rotation at v{} must list exactly its neighbours", .0 + 1)]
    BadRotation(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A binary tree with a counterclockwise edge order at each interior vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarEmbedding {
    tree: Tree,
    /// Indexed by vertex; empty for boundary vertices.
    rotation: Vec<Vec<EdgeId>>,
}

impl PlanarEmbedding {
    /// `rotations[i]` lists the neighbours of interior vertex `n + i`
    /// counterclockwise.
    pub fn new(tree: Tree, rotations: &[Vec<usize>]) -> Result<Self, PlanarError> {
        check_binary(&tree)?;
        let n = tree.boundary_count();
        let mut rotation = vec![Vec::new(); tree.vertex_count()];
        for v in n..tree.vertex_count() {
            let order = rotations.get(v - n).ok_or(PlanarError::MissingRotation(v))?;
            if order.len() != 3 {
                return Err(PlanarError::BadRotation(v));
            }
            let mut edges = Vec::with_capacity(3);
            for &w in order {
                let e = tree.find_edge(v, w).ok_or(PlanarError::BadRotation(v))?;
                if edges.contains(&e) {
                    return Err(PlanarError::BadRotation(v));
                }
                edges.push(e);
            }
            rotation[v] = edges;
        }
        Ok(Self { tree, rotation })
    }

    /// The embedding realized by a planar network: neighbours sorted by the
    /// polar angle of the edge leaving the vertex.
    pub fn from_network(network: &Network) -> Result<Self, PlanarError> {
        if network.dim() != 2 {
            return Err(PlanarError::Dimension(network.dim()));
        }
        let tree = network.tree();
        let rotations: Vec<Vec<usize>> = (tree.boundary_count()..tree.vertex_count())
            .map(|v| {
                let p = network.position(v);
                let mut nbrs: Vec<(f64, usize)> = tree
                    .neighbors(v)
                    .iter()
                    .map(|&(w, _)| {
                        let q = network.position(w);
                        ((q[1] - p[1]).atan2(q[0] - p[0]), w)
                    })
                    .collect();
                nbrs.sort_by(|a, b| a.0.total_cmp(&b.0));
                nbrs.into_iter().map(|(_, w)| w).collect()
            })
            .collect();
        Self::new(tree.clone(), &rotations)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// Counterclockwise neighbour order of an interior vertex.
    pub fn rotation_neighbors(&self, v: usize) -> Vec<usize> {
        self.rotation[v]
            .iter()
            .map(|&e| {
                let (a, b) = self.tree.edges()[e.0];
                if a == v {
                    b
                } else {
                    a
                }
            })
            .collect()
    }

    /// The unique edge at boundary vertex `k`.
    pub fn boundary_edge(&self, k: usize) -> EdgeId {
        self.tree.neighbors(k)[0].1
    }

    /// Vertex walk from the far end of `e_p` to the far end of `e_q`.
    fn edge_walk(&self, e_p: EdgeId, e_q: EdgeId) -> Result<Vec<usize>, PlanarError> {
        let (a, b) = self.tree.edge(e_p).map_err(|_| PlanarError::UnknownEdge(e_p))?;
        let (c, d) = self.tree.edge(e_q).map_err(|_| PlanarError::UnknownEdge(e_q))?;
        let walk = [(a, c), (a, d), (b, c), (b, d)]
            .into_iter()
            .map(|(x, y)| self.tree.path(x, y))
            .max_by_key(Vec::len)
            .expect("four candidates");
        Ok(walk)
    }

    fn turns(&self, walk: &[usize]) -> i32 {
        let mut tw = 0;
        for w in walk.windows(3) {
            let (prev, here, next) = (w[0], w[1], w[2]);
            let incoming = self.tree.find_edge(prev, here).expect("walk edge");
            let outgoing = self.tree.find_edge(here, next).expect("walk edge");
            let rot = &self.rotation[here];
            let i = rot.iter().position(|&e| e == incoming).expect("rotation lists incident edges");
            if rot[(i + 1) % 3] == outgoing {
                tw -= 1;
            } else {
                tw += 1;
            }
        }
        tw
    }

    fn twisting_between(&self, p: usize, q: usize) -> i32 {
        if p == q {
            return 0;
        }
        self.turns(&self.tree.path(p, q))
    }

    /// Left turns minus right turns at the interior vertices of the path
    /// that starts along `e_p` and ends along `e_q`.
    pub fn twisting_number(&self, e_p: EdgeId, e_q: EdgeId) -> Result<i32, PlanarError> {
        if e_p == e_q {
            self.tree.edge(e_p).map_err(|_| PlanarError::UnknownEdge(e_p))?;
            return Ok(0);
        }
        Ok(self.turns(&self.edge_walk(e_p, e_q)?))
    }

    /// Checks `tw(e_1, e_3) = tw(e_1, e_2) + tw(e_2, e_3)` for every pair of
    /// edges and every edge `e_2` on the path between them.
    pub fn is_path_additive(&self) -> bool {
        let edges: Vec<EdgeId> = self.tree.edge_ids().collect();
        for &e1 in &edges {
            for &e3 in &edges {
                if e1 == e3 {
                    continue;
                }
                let walk = self.edge_walk(e1, e3).expect("tree edges");
                let total = self.turns(&walk);
                for pair in walk.windows(2) {
                    let e2 = self.tree.find_edge(pair[0], pair[1]).expect("walk edge");
                    let split = self.twisting_number(e1, e2).expect("tree edge")
                        + self.twisting_number(e2, e3).expect("tree edge");
                    if split != total {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `t_pq` for all pairs of boundary edges, indexed by boundary vertex.
    pub fn twisting_table(&self) -> TwistingTable {
        let n = self.tree.boundary_count();
        let values = (0..n)
            .map(|p| (0..n).map(|q| self.twisting_between(p, q)).collect())
            .collect();
        TwistingTable { values }
    }

    /// `t_k`: entry `k` is `1`, entry `q` is `-e^{iπ t_kq / 3}`.
    pub fn t_vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.tree.boundary_count())
            .map(|q| {
                if q == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    -Complex64::from_polar(1.0, PI * self.twisting_between(k, q) as f64 / 3.0)
                }
            })
            .collect()
    }

    /// `|⟨z, t_k⟩|` and the direction `ψ_k` of the edge entering `z_k`.
    pub fn planar_length(&self, z: &ComplexConfig, k: usize) -> Result<PlanarLength, PlanarError> {
        let n = self.tree.boundary_count();
        if z.points.len() != n {
            return Err(PlanarError::PointCount {
                expected: n,
                got: z.points.len(),
            });
        }
        let ip = hermitian(&z.points, &self.t_vector(k));
        Ok(PlanarLength {
            length: ip.norm(),
            psi: ip.arg(),
        })
    }

    /// Boundary edge directions, computed per terminal and propagated from
    /// the first one by the twisting numbers.
    pub fn edge_directions(&self, z: &ComplexConfig) -> Result<EdgeDirections, PlanarError> {
        let n = self.tree.boundary_count();
        let direct = (0..n)
            .map(|k| self.planar_length(z, k).map(|p| p.psi))
            .collect::<Result<Vec<_>, _>>()?;
        let base = direct.first().copied().unwrap_or(0.0);
        let propagated: Vec<f64> = (0..n)
            .map(|q| {
                if q == 0 {
                    base
                } else {
                    wrap(base + PI + PI * self.twisting_between(0, q) as f64 / 3.0)
                }
            })
            .collect();
        let max_discrepancy = direct
            .iter()
            .zip(&propagated)
            .map(|(a, b)| wrap(a - b).abs())
            .fold(0.0, f64::max);
        Ok(EdgeDirections {
            direct,
            propagated,
            max_discrepancy,
        })
    }
}

fn check_binary(tree: &Tree) -> Result<(), PlanarError> {
    for v in 0..tree.vertex_count() {
        let degree = tree.degree(v);
        let ok = if tree.is_boundary(v) { degree == 1 } else { degree == 3 };
        if !ok {
            return Err(PlanarError::NotBinary { vertex: v, degree });
        }
    }
    Ok(())
}

/// Angle in `(-π, π]`.
pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `⟨a, b⟩ = Σ a_q conj(b_q)`.
pub fn hermitian(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistingTable {
    pub values: Vec<Vec<i32>>,
}

impl TwistingTable {
    pub fn is_skew_symmetric(&self) -> bool {
        let n = self.values.len();
        (0..n).all(|p| (0..n).all(|q| self.values[p][q] == -self.values[q][p]))
    }

    /// Composing the paths `p → q` and `q → r` retraces the branch to `q`
    /// and turns around there, which is worth three units of turning: so
    /// `t_pq + t_qr - t_pr` is `±3` for distinct `p, q, r` and `0` otherwise.
    pub fn is_consistent(&self) -> bool {
        let n = self.values.len();
        (0..n).all(|p| {
            (0..n).all(|q| {
                (0..n).all(|r| {
                    let d = self.values[p][q] + self.values[q][r] - self.values[p][r];
                    if p == q || q == r || p == r {
                        d == 0
                    } else {
                        d.abs() == 3
                    }
                })
            })
        })
    }
}

/// Boundary points as complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexConfig {
    pub points: Vec<Complex64>,
}

impl ComplexConfig {
    pub fn from_boundary(config: &BoundaryConfig) -> Result<Self, PlanarError> {
        if config.dim() != 2 {
            return Err(PlanarError::Dimension(config.dim()));
        }
        Ok(Self {
            points: config.points().map(|p| Complex64::new(p[0], p[1])).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarLength {
    pub length: f64,
    /// Direction of the boundary edge entering `z_k`, in `(-π, π]`.
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDirections {
    pub direct: Vec<f64>,
    pub propagated: Vec<f64>,
    /// Largest disagreement between the two, modulo `2π`.
    pub max_discrepancy: f64,
}

/// One binary piece of a reduced network.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarComponent {
    /// Vertices of the reduced tree, boundary first.
    pub vertices: Vec<usize>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPlanarLength {
    pub length: f64,
    pub components: Vec<PlanarComponent>,
}

/// Planar length of a possibly degenerate locally minimal network.
///
/// The network is `Γ`-reduced, cut at every boundary vertex of degree two
/// or more, and each binary piece is evaluated with the rotations of the
/// given embedding. Interior vertices of the reduced tree must be single
/// original vertices of degree three.
pub fn planar_length_general(
    embedding: &PlanarEmbedding,
    network: &Network,
    len_tol: f64,
) -> Result<GeneralPlanarLength, PlanarError> {
    if network.dim() != 2 {
        return Err(PlanarError::Dimension(network.dim()));
    }
    let (reduced, rnet) = network.gamma_reduce(len_tol)?;
    let rtree = &reduced.tree;
    let n = rtree.boundary_count();

    // Interior vertex of the reduced tree -> its single original vertex.
    let mut origin = vec![None; rtree.vertex_count()];
    let mut multiplicity = vec![0usize; rtree.vertex_count()];
    for (v, &q) in reduced.vertex_map.iter().enumerate() {
        multiplicity[q] += 1;
        origin[q] = Some(v);
    }
    for q in n..rtree.vertex_count() {
        if multiplicity[q] != 1 || rtree.degree(q) != 3 {
            return Err(PlanarError::NotBinary {
                vertex: q,
                degree: rtree.degree(q),
            });
        }
    }
    // Components: edges connected through interior vertices.
    let mut comp_of_edge = vec![usize::MAX; rtree.edge_count()];
    let mut comps: Vec<Vec<EdgeId>> = Vec::new();
    for start in rtree.edge_ids() {
        if comp_of_edge[start.0] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![start];
        comp_of_edge[start.0] = id;
        let mut edges = Vec::new();
        while let Some(e) = stack.pop() {
            edges.push(e);
            let (a, b) = rtree.edges()[e.0];
            for v in [a, b] {
                if rtree.is_boundary(v) {
                    continue;
                }
                for &(_, f) in rtree.neighbors(v) {
                    if comp_of_edge[f.0] == usize::MAX {
                        comp_of_edge[f.0] = id;
                        stack.push(f);
                    }
                }
            }
        }
        comps.push(edges);
    }

    let mut total = 0.0;
    let mut components = Vec::new();
    for edges in comps {
        let mut verts: Vec<usize> = edges
            .iter()
            .flat_map(|e| {
                let (a, b) = rtree.edges()[e.0];
                [a, b]
            })
            .collect();
        verts.sort_unstable();
        verts.dedup();
        // Boundary vertices sort first already (indices < n).
        let local = |v: usize| verts.binary_search(&v).expect("component vertex");
        let nb = verts.iter().filter(|&&v| v < n).count();
        let local_edges: Vec<(usize, usize)> = edges
            .iter()
            .map(|e| {
                let (a, b) = rtree.edges()[e.0];
                (local(a), local(b))
            })
            .collect();
        let sub = Tree::new(verts.len(), nb, local_edges)
            .map_err(|e| PlanarError::Geometry(GeometryError::Topology(e)))?;
        let rotations: Vec<Vec<usize>> = verts[nb..]
            .iter()
            .map(|&q| {
                let v = origin[q].expect("interior origin");
                embedding.rotation[v]
                    .iter()
                    .map(|&oe| {
                        let re = reduced.edge_map[oe.0].expect("edges at a binary vertex survive reduction");
                        let (a, b) = rtree.edges()[re.0];
                        local(if a == q { b } else { a })
                    })
                    .collect()
            })
            .collect();
        let sub_embedding = PlanarEmbedding::new(sub, &rotations)?;
        let z = ComplexConfig {
            points: verts[..nb]
                .iter()
                .map(|&v| {
                    let p = rnet.position(v);
                    Complex64::new(p[0], p[1])
                })
                .collect(),
        };
        let length = sub_embedding.planar_length(&z, 0)?.length;
        total += length;
        components.push(PlanarComponent { vertices: verts, length });
    }
    Ok(GeneralPlanarLength {
        length: total,
        components,
    })
}
