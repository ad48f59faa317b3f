//! The JSON instance file.
//!
//! ```json
//! {
//!   "m": 2,
//!   "vertices": 4,
//!   "edges": [[1, 4], [2, 4], [3, 4]],
//!   "boundary": [1, 2, 3],
//!   "coordinates": [[0, 0], [1, 0], [0.5, 0.866]],
//!   "rotations": {"4": [1, 2, 3]},
//!   "drop_edges": [1]
//! }
//! ```
//!
//! Vertices and edges are numbered from 1. `coordinates[i]` belongs to
//! `boundary[i]`. `rotations` lists the neighbours of each interior vertex
//! counterclockwise; `drop_edges` are indices into `edges`.
//!
//! Internally the boundary vertices come first, in file order, followed by
//! the interior vertices in increasing label order. Edge order is kept.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BoundaryConfig, GeometryError};
use crate::topology::{AdmissibleFamily, EdgeId, TopologyError, Tree, ValidationReport, Violation};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed instance: {0}")]
    Json(#[from] serde_json::Error),
    #[error("vertex {label} is outside 1..={vertices}")]
    VertexLabel { label: usize, vertices: usize },
    #[error("vertex {0} is listed twice in the boundary")]
    DuplicateBoundary(usize),
    #[error("{coordinates} coordinate rows for {boundary} boundary vertices")]
    CoordinateRows { coordinates: usize, boundary: usize },
    #[error("edge index {index} is outside 1..={edges}")]
    EdgeIndex { index: usize, edges: usize },
    #[error("rotation given for unknown vertex {0}")]
    RotationVertex(usize),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub m: usize,
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub boundary: Vec<usize>,
    pub coordinates: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotations: Option<BTreeMap<usize, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop_edges: Option<Vec<usize>>,
}

/// A checked instance in internal numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub tree: Tree,
    pub boundary: BoundaryConfig,
    /// File label of each internal vertex.
    pub labels: Vec<usize>,
    /// Counterclockwise neighbours per interior vertex, `None` where the
    /// file gives no rotation.
    pub rotations: Option<Vec<Option<Vec<usize>>>>,
    pub drop: Option<AdmissibleFamily>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        Ok(serde_json::from_str(text)?)
    }

    /// One key per line, values written compactly.
    pub fn to_json(&self) -> String {
        fn compact<T: Serialize>(v: &T) -> String {
            serde_json::to_string(v).expect("instance serializes")
        }
        let mut fields = vec![
            format!("  \"m\": {}", self.m),
            format!("  \"vertices\": {}", self.vertices),
            format!("  \"edges\": {}", compact(&self.edges)),
            format!("  \"boundary\": {}", compact(&self.boundary)),
            format!("  \"coordinates\": {}", compact(&self.coordinates)),
        ];
        if let Some(r) = &self.rotations {
            fields.push(format!("  \"rotations\": {}", compact(r)));
        }
        if let Some(d) = &self.drop_edges {
            fields.push(format!("  \"drop_edges\": {}", compact(d)));
        }
        format!("{{\n{}\n}}", fields.join(",\n"))
    }

    /// Builds the instance file of a tree already in internal numbering.
    pub fn from_parts(tree: &Tree, boundary: &BoundaryConfig) -> Self {
        Self {
            m: boundary.dim(),
            vertices: tree.vertex_count(),
            edges: tree.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
            boundary: (1..=tree.boundary_count()).collect(),
            coordinates: boundary.points().map(<[f64]>::to_vec).collect(),
            rotations: None,
            drop_edges: None,
        }
    }

    pub fn resolve(&self) -> Result<Instance, InstanceError> {
        let label_ok = |label: usize| {
            if (1..=self.vertices).contains(&label) {
                Ok(())
            } else {
                Err(InstanceError::VertexLabel {
                    label,
                    vertices: self.vertices,
                })
            }
        };
        let mut internal = vec![usize::MAX; self.vertices + 1];
        let mut labels = Vec::with_capacity(self.vertices);
        for &b in &self.boundary {
            label_ok(b)?;
            if internal[b] != usize::MAX {
                return Err(InstanceError::DuplicateBoundary(b));
            }
            internal[b] = labels.len();
            labels.push(b);
        }
        for v in 1..=self.vertices {
            if internal[v] == usize::MAX {
                internal[v] = labels.len();
                labels.push(v);
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for &[a, b] in &self.edges {
            label_ok(a)?;
            label_ok(b)?;
            edges.push((internal[a], internal[b]));
        }
        if self.coordinates.len() != self.boundary.len() {
            return Err(InstanceError::CoordinateRows {
                coordinates: self.coordinates.len(),
                boundary: self.boundary.len(),
            });
        }
        let tree = Tree::new(self.vertices, self.boundary.len(), edges).map_err(|e| relabel(e, &labels))?;
        let boundary = BoundaryConfig::new(self.m, &self.coordinates)?;

        let rotations = match &self.rotations {
            None => None,
            Some(map) => {
                let mut rot = vec![None; tree.interior_count()];
                for (&v, order) in map {
                    label_ok(v).map_err(|_| InstanceError::RotationVertex(v))?;
                    for &w in order {
                        label_ok(w)?;
                    }
                    let iv = internal[v];
                    if iv >= tree.boundary_count() {
                        rot[iv - tree.boundary_count()] = Some(order.iter().map(|&w| internal[w]).collect());
                    }
                }
                Some(rot)
            }
        };
        let drop = match &self.drop_edges {
            None => None,
            Some(list) => {
                let mut ids = Vec::with_capacity(list.len());
                for &i in list {
                    if !(1..=self.edges.len()).contains(&i) {
                        return Err(InstanceError::EdgeIndex {
                            index: i,
                            edges: self.edges.len(),
                        });
                    }
                    ids.push(EdgeId(i - 1));
                }
                Some(AdmissibleFamily::new(&tree, &ids).map_err(|e| relabel(e, &labels))?)
            }
        };
        Ok(Instance {
            tree,
            boundary,
            labels,
            rotations,
            drop,
        })
    }
}

/// Rewrites internal vertex indices in an error so that it prints file labels.
pub fn relabel(err: TopologyError, labels: &[usize]) -> TopologyError {
    let l = |v: usize| labels.get(v).map_or(v, |&x| x - 1);
    match err {
        TopologyError::Invalid(report) => TopologyError::Invalid(ValidationReport {
            violations: report
                .violations
                .into_iter()
                .map(|v| match v {
                    Violation::LowDegreeInterior { vertex, degree } => Violation::LowDegreeInterior {
                        vertex: l(vertex),
                        degree,
                    },
                    other => other,
                })
                .collect(),
        }),
        TopologyError::NotAdmissible { boundary } => TopologyError::NotAdmissible {
            boundary: boundary.into_iter().map(l).collect(),
        },
        TopologyError::SelfLoop(v) => TopologyError::SelfLoop(l(v)),
        TopologyError::NoSuchEdge(a, b) => TopologyError::NoSuchEdge(l(a), l(b)),
        other => other,
    }
}
