//! Brute-force ground truth: topology enumeration, exact projections and
//! batch duality-gap experiments.

mod experiment;
mod qp;

pub use experiment::{
    generate_instances, random_admissible_family, random_topology, run_gap_experiment, screen_planar, write_records,
    ExperimentConfig, GapRecord, Instance, GAP_TOL, PLANAR_MIN_EDGE, WEAK_TOL,
};
pub use qp::{cylinder_projection_oracle, feasible_projection_oracle, OracleProjection};

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::BoundaryConfig;
use crate::primal::{solve_primal, PrimalError, PrimalOptions, PrimalResult};
use crate::topology::Tree;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("terminal count {0} outside 3..=7")]
    TerminalCount(usize),
    #[error("no KKT point found")]
    NoKktPoint,
    #[error("{0} constraints is too many to enumerate")]
    TooLarge(usize),
    #[error(transparent)]
    Primal(#[from] PrimalError),
}

/// Every full Steiner topology on `n` labelled terminals.
///
/// Terminals are vertices `0..n`, Steiner points `n..2n-2`. Entries are
/// listed in insertion order: terminal `k` is inserted into each edge of
/// each `(k-1)`-terminal entry in turn.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologyCatalog {
    pub n: usize,
    pub trees: Vec<Tree>,
}

impl TopologyCatalog {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}

/// `(2n-5)!!`.
pub fn full_topology_count(n: usize) -> usize {
    (1..=n.saturating_sub(3)).map(|j| 2 * j + 1).product()
}

/// Inserts terminal `k` into edge `at`, creating Steiner point `steiner`.
pub(crate) fn insert_terminal(edges: &[(usize, usize)], at: usize, k: usize, steiner: usize) -> Vec<(usize, usize)> {
    let mut out = edges.to_vec();
    let (a, b) = out[at];
    out[at] = (a, steiner);
    out.push((steiner, b));
    out.push((k, steiner));
    out
}

pub fn enumerate_topologies(n: usize) -> Result<TopologyCatalog, OracleError> {
    if !(3..=7).contains(&n) {
        return Err(OracleError::TerminalCount(n));
    }
    let mut level = vec![vec![(0, n), (1, n), (2, n)]];
    for k in 3..n {
        let steiner = n + k - 2;
        level = level
            .iter()
            .flat_map(|edges| (0..edges.len()).map(move |at| insert_terminal(edges, at, k, steiner)))
            .collect();
    }
    let trees = level
        .into_iter()
        .map(|edges| Tree::new(2 * n - 2, n, edges).expect("insertion preserves validity"))
        .collect();
    Ok(TopologyCatalog { n, trees })
}

/// Sorted canonical boundary splits of the interior edges: equal keys mean
/// isomorphic labelled trees.
pub fn split_key(tree: &Tree) -> Vec<Vec<usize>> {
    let mut key: Vec<Vec<usize>> = tree
        .edge_ids()
        .filter_map(|e| {
            let p = tree.edge_partition(e).ok()?;
            (p.side_one.len() > 1).then_some(p.side_one)
        })
        .collect();
    key.sort();
    key
}

#[derive(Debug, Clone)]
pub struct SteinerResult {
    /// Catalog index of the shortest topology.
    pub index: usize,
    pub tree: Tree,
    pub length: f64,
    pub primal: PrimalResult,
    /// Catalog indices whose primal solve did not converge.
    pub non_converged: Vec<usize>,
    /// Length per catalog entry.
    pub lengths: Vec<f64>,
}

impl SteinerResult {
    pub fn flagged(&self) -> bool {
        !self.non_converged.is_empty()
    }
}

/// Shortest extreme network over the whole catalog. Lengths within a
/// relative `1e-12` count as ties and go to the earlier entry.
pub fn steiner_oracle(z: &BoundaryConfig, options: &PrimalOptions) -> Result<SteinerResult, OracleError> {
    let catalog = enumerate_topologies(z.len())?;
    let results = catalog
        .trees
        .par_iter()
        .map(|t| solve_primal(t, z, options))
        .collect::<Result<Vec<_>, _>>()?;
    let tie = 1e-12 * z.scale();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.length < results[best].length - tie {
            best = i;
        }
    }
    let non_converged = results
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.converged)
        .map(|(i, _)| i)
        .collect();
    let lengths = results.iter().map(|r| r.length).collect();
    let primal = results.into_iter().nth(best).expect("catalog is non-empty");
    Ok(SteinerResult {
        index: best,
        tree: catalog.trees[best].clone(),
        length: primal.length,
        primal,
        non_converged,
        lengths,
    })
}

/// Total length of a minimum spanning tree on the boundary points.
pub fn mst_length(z: &BoundaryConfig) -> f64 {
    use petgraph::algo::min_spanning_tree;
    use petgraph::data::Element;
    use petgraph::graph::UnGraph;

    let mut g = UnGraph::<(), f64>::new_undirected();
    let nodes: Vec<_> = (0..z.len()).map(|_| g.add_node(())).collect();
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            g.add_edge(nodes[i], nodes[j], crate::geometry::dist(z.point(i), z.point(j)));
        }
    }
    min_spanning_tree(&g)
        .filter_map(|el| match el {
            Element::Edge { weight, .. } => Some(weight),
            _ => None,
        })
        .sum()
}
