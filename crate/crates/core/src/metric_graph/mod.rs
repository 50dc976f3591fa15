//! Weighted metric graphs standing in for the finite levels `F_i` of a
//! projective system, their finite-difference discretization and the fiber
//! operators that connect consecutive levels.
//!
//! A level-`i` space is stored as a [`MetricGraph`]: every edge is a segment
//! of the base space carrying a fiber word and a measure density (the weight
//! of its sheet). Discretizing with a common pitch gives a [`Mesh`], and
//! [`assemble`] turns the mesh into the lumped-mass pencil `(A, M)` whose
//! generalized eigenvalues approximate the Laplacian spectrum.

mod fiber;
mod mesh;
mod operator;
pub mod quotient;

pub use fiber::{compose_parents, FiberStructure};
pub use mesh::{discretize, GraphMass, Mesh, MeshNode, NodeLabel, NodeOrigin, Segment};
pub use operator::{assemble, dirichlet_energy, DiscreteOperator};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex condition. Unmarked vertices carry the weighted Kirchhoff condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Neumann,
    Dirichlet,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neumann" => Ok(Boundary::Neumann),
            "dirichlet" => Ok(Boundary::Dirichlet),
            other => Err(Error::InvalidSpec(format!("unknown boundary mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    /// Position of the vertex in the base space.
    pub x: f64,
    /// Canonical fiber word; collapsed coordinates are stored as 0.
    #[serde(default)]
    pub word: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Boundary>,
}

impl Vertex {
    pub fn is_dirichlet(&self) -> bool {
        self.boundary == Some(Boundary::Dirichlet)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
    /// Measure density of the sheet this edge lives on.
    pub weight: f64,
    /// Fiber word of the sheet. Needed to tell parallel strands apart.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub word: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl MetricGraph {
    /// Checks the structural invariants and returns the graph unchanged.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        let g = MetricGraph { vertices, edges };
        g.validate()?;
        Ok(g)
    }

    /// The interval `[0, length]` with the given end conditions.
    pub fn interval(length: f64, left: Boundary, right: Boundary) -> Self {
        let b = |c: Boundary| match c {
            Boundary::Neumann => None,
            Boundary::Dirichlet => Some(Boundary::Dirichlet),
        };
        MetricGraph {
            vertices: vec![
                Vertex { id: 0, x: 0.0, word: vec![], boundary: b(left) },
                Vertex { id: 1, x: length, word: vec![], boundary: b(right) },
            ],
            edges: vec![Edge { u: 0, v: 1, length, weight: 1.0, word: vec![] }],
        }
    }

    pub fn total_measure(&self) -> f64 {
        self.edges.iter().map(|e| e.length * e.weight).sum()
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::InvalidGraph(format!("vertex {i} has id {}", v.id)));
            }
        }
        let n = self.vertices.len();
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidGraph(format!("edge {i} references a missing vertex")));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("edge {i} is a loop")));
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::InvalidGraph(format!("edge {i} has length {}", e.length)));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::InvalidGraph(format!("edge {i} has weight {}", e.weight)));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for v in &self.vertices {
            if !seen.insert((v.x.to_bits(), v.word.clone())) {
                return Err(Error::InvalidGraph(format!(
                    "two vertices share position {} and word {:?}",
                    v.x, v.word
                )));
            }
        }
        let components = self.components();
        if components != 1 {
            return Err(Error::DisconnectedGraph { components });
        }
        Ok(())
    }

    fn components(&self) -> usize {
        let n = self.vertices.len();
        if n == 0 {
            return 0;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a] = b;
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.edges.iter().filter(|e| e.u == vertex || e.v == vertex).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: MetricGraph = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }
}

/// Levels `0..=n` discretized at one pitch, with their pencils and the
/// fiber maps between consecutive levels (`fibers[i - 1]` joins level `i - 1`
/// to level `i`).
#[derive(Debug, Clone)]
pub struct Tower {
    pub meshes: Vec<Mesh>,
    pub operators: Vec<DiscreteOperator>,
    pub fibers: Vec<FiberStructure>,
}

impl Tower {
    /// `fiber_sizes[i - 1]` is `|G_i|`.
    pub fn new(meshes: Vec<Mesh>, fiber_sizes: &[usize]) -> Result<Self> {
        if meshes.len() != fiber_sizes.len() + 1 {
            return Err(Error::IncompatibleMesh(format!(
                "{} meshes for {} fiber levels",
                meshes.len(),
                fiber_sizes.len()
            )));
        }
        let fibers = meshes
            .windows(2)
            .zip(fiber_sizes)
            .enumerate()
            .map(|(i, (pair, &size))| FiberStructure::between(&pair[0], &pair[1], i + 1, size))
            .collect::<Result<Vec<_>>>()?;
        let operators = meshes.iter().map(assemble).collect();
        Ok(Tower { meshes, operators, fibers })
    }

    pub fn depth(&self) -> usize {
        self.fibers.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(strands: usize) -> MetricGraph {
        let mut vertices = vec![
            Vertex { id: 0, x: 0.0, word: vec![], boundary: Some(Boundary::Dirichlet) },
            Vertex { id: 1, x: 1.0, word: vec![], boundary: Some(Boundary::Dirichlet) },
        ];
        vertices.truncate(2);
        let edges = (0..strands)
            .map(|s| Edge { u: 0, v: 1, length: 1.0, weight: 1.0 / strands as f64, word: vec![s as u32] })
            .collect();
        MetricGraph::new(vertices, edges).unwrap()
    }

    #[test]
    fn interval_has_unit_measure() {
        let g = MetricGraph::interval(1.0, Boundary::Neumann, Boundary::Neumann);
        g.validate().unwrap();
        assert_eq!(g.total_measure(), 1.0);
    }

    #[test]
    fn theta_graph_measure_is_strand_length() {
        assert!((theta(3).total_measure() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_disconnected_and_bad_edges() {
        let v = |id, x| Vertex { id, x, word: vec![], boundary: None };
        let e = |u, v, length| Edge { u, v, length, weight: 1.0, word: vec![] };
        let err = MetricGraph::new(vec![v(0, 0.0), v(1, 1.0), v(2, 2.0), v(3, 3.0)], vec![e(0, 1, 1.0), e(2, 3, 1.0)])
            .unwrap_err();
        assert!(matches!(err, Error::DisconnectedGraph { components: 2 }));
        let err = MetricGraph::new(vec![v(0, 0.0), v(1, 1.0)], vec![e(0, 1, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
        let err = MetricGraph::new(vec![v(0, 0.0), v(1, 0.0)], vec![e(0, 1, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidGraph(_)));
    }

    #[test]
    fn json_round_trip() {
        let g = theta(2);
        let back = MetricGraph::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(g, back);
        // the documented minimal schema also parses
        let minimal = r#"{"vertices":[{"id":0,"x":0,"word":[],"boundary":"dirichlet"},{"id":1,"x":1,"word":[]}],
                          "edges":[{"u":0,"v":1,"length":1,"weight":1}]}"#;
        let g = MetricGraph::from_json(minimal).unwrap();
        assert!(g.vertices[0].is_dirichlet());
        assert_eq!(g.vertices[1].boundary, None);
    }
}
