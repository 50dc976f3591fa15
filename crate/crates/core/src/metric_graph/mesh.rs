use serde::{Deserialize, Serialize};

use super::MetricGraph;
use crate::error::{Error, Result};

/// Base position (on the pitch grid, or a gasket vertex index) plus fiber word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeLabel {
    pub site: i64,
    pub word: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrigin {
    Vertex(usize),
    Interior { edge: usize, step: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshNode {
    pub label: NodeLabel,
    pub origin: NodeOrigin,
    pub mass: f64,
}

/// One stiffness coupling. `None` marks an eliminated (Dirichlet) endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub conductance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    /// Common subdivision step; `None` for meshes that come straight from a
    /// combinatorial graph.
    pub pitch: Option<f64>,
    pub nodes: Vec<MeshNode>,
    pub segments: Vec<Segment>,
    /// Measure carried by eliminated Dirichlet vertices.
    pub pinned_mass: f64,
}

/// Mass assigned to a node of a combinatorial graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphMass {
    /// Weighted degree: the pencil is the probabilistic (random-walk) Laplacian.
    Degree,
    /// Unit mass: the pencil is the combinatorial Laplacian `D - W`.
    Unit,
}

const PITCH_TOL: f64 = 1e-12;

/// Subdivides every edge of `g` into steps of length `h`.
///
/// Interior nodes get mass `h * weight`; vertices get half a cell from each
/// incident edge. Dirichlet vertices are eliminated.
pub fn discretize(g: &MetricGraph, h: f64) -> Result<Mesh> {
    g.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidSpec(format!("pitch must be positive, got {h}")));
    }
    let steps: Vec<usize> = g
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let ratio = e.length / h;
            let n = ratio.round();
            if n < 1.0 || (ratio - n).abs() > PITCH_TOL * ratio.max(1.0) {
                Err(Error::NonDividingPitch { pitch: h, edge: i, length: e.length })
            } else {
                Ok(n as usize)
            }
        })
        .collect::<Result<_>>()?;

    let site = |x: f64| (x / h).round() as i64;
    let mut nodes = Vec::new();
    let mut vertex_node = vec![None; g.vertices.len()];
    for v in &g.vertices {
        if !v.is_dirichlet() {
            vertex_node[v.id] = Some(nodes.len());
            nodes.push(MeshNode {
                label: NodeLabel { site: site(v.x), word: v.word.clone() },
                origin: NodeOrigin::Vertex(v.id),
                mass: 0.0,
            });
        }
    }
    let mut pinned_mass = 0.0;
    let mut segments = Vec::new();
    for (ei, (e, &n)) in g.edges.iter().zip(&steps).enumerate() {
        let half = 0.5 * h * e.weight;
        for end in [e.u, e.v] {
            match vertex_node[end] {
                Some(k) => nodes[k].mass += half,
                None => pinned_mass += half,
            }
        }
        let (xu, xv) = (g.vertices[e.u].x, g.vertices[e.v].x);
        let first_interior = nodes.len();
        for step in 1..n {
            let x = xu + (xv - xu) * step as f64 / n as f64;
            nodes.push(MeshNode {
                label: NodeLabel { site: site(x), word: e.word.clone() },
                origin: NodeOrigin::Interior { edge: ei, step },
                mass: h * e.weight,
            });
        }
        let chain: Vec<Option<usize>> = std::iter::once(vertex_node[e.u])
            .chain((0..n - 1).map(|s| Some(first_interior + s)))
            .chain(std::iter::once(vertex_node[e.v]))
            .collect();
        let conductance = e.weight / h;
        segments.extend(chain.windows(2).map(|w| Segment { a: w[0], b: w[1], conductance }));
    }
    Ok(Mesh { pitch: Some(h), nodes, segments, pinned_mass })
}

impl Mesh {
    /// Mesh of a weighted combinatorial graph: no subdivision, one node per
    /// unpinned vertex, one segment per edge with conductance equal to its weight.
    pub fn from_graph(
        vertices: &[(NodeLabel, bool)],
        edges: &[(usize, usize, f64)],
        mass: GraphMass,
    ) -> Result<Mesh> {
        let mut index = vec![None; vertices.len()];
        let mut nodes = Vec::new();
        for (i, (label, pinned)) in vertices.iter().enumerate() {
            if !pinned {
                index[i] = Some(nodes.len());
                nodes.push(MeshNode {
                    label: label.clone(),
                    origin: NodeOrigin::Vertex(i),
                    mass: if mass == GraphMass::Unit { 1.0 } else { 0.0 },
                });
            }
        }
        let mut pinned_mass = 0.0;
        let mut segments = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u >= vertices.len() || v >= vertices.len() || u == v || !(w > 0.0) {
                return Err(Error::InvalidGraph(format!("bad edge ({u}, {v}, {w})")));
            }
            if mass == GraphMass::Degree {
                for end in [u, v] {
                    match index[end] {
                        Some(k) => nodes[k].mass += w,
                        None => pinned_mass += w,
                    }
                }
            }
            segments.push(Segment { a: index[u], b: index[v], conductance: w });
        }
        Ok(Mesh { pitch: None, nodes, segments, pinned_mass })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn masses(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.mass).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.nodes.iter().map(|n| n.mass).sum::<f64>() + self.pinned_mass
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::{Boundary, Edge, MetricGraph, Vertex};

    #[test]
    fn neumann_interval_half_cells() {
        let g = MetricGraph::interval(1.0, Boundary::Neumann, Boundary::Neumann);
        let m = discretize(&g, 0.25).unwrap();
        let mut by_site: Vec<(i64, f64)> = m.nodes.iter().map(|n| (n.label.site, n.mass)).collect();
        by_site.sort_by_key(|p| p.0);
        let masses: Vec<f64> = by_site.iter().map(|p| p.1).collect();
        assert_eq!(masses, vec![0.125, 0.25, 0.25, 0.25, 0.125]);
        assert_eq!(m.segments.len(), 4);
    }

    #[test]
    fn dirichlet_interval_drops_ends() {
        let g = MetricGraph::interval(1.0, Boundary::Dirichlet, Boundary::Dirichlet);
        let m = discretize(&g, 0.25).unwrap();
        assert_eq!(m.masses(), vec![0.25, 0.25, 0.25]);
        assert!((m.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_strand_theta_masses() {
        let d = Some(Boundary::Dirichlet);
        let g = MetricGraph::new(
            vec![
                Vertex { id: 0, x: 0.0, word: vec![], boundary: d },
                Vertex { id: 1, x: 1.0, word: vec![], boundary: d },
            ],
            vec![
                Edge { u: 0, v: 1, length: 1.0, weight: 0.5, word: vec![0] },
                Edge { u: 0, v: 1, length: 1.0, weight: 0.5, word: vec![1] },
            ],
        )
        .unwrap();
        let m = discretize(&g, 0.5).unwrap();
        assert_eq!(m.masses(), vec![0.25, 0.25]);
        assert_ne!(m.nodes[0].label, m.nodes[1].label);
    }

    #[test]
    fn non_dividing_pitch_rejected() {
        let g = MetricGraph::interval(1.0, Boundary::Neumann, Boundary::Neumann);
        assert!(matches!(discretize(&g, 0.3), Err(Error::NonDividingPitch { .. })));
        assert!(matches!(discretize(&g, 2.0), Err(Error::NonDividingPitch { .. })));
    }

    #[test]
    fn node_count_formula() {
        let g = MetricGraph::interval(1.0, Boundary::Dirichlet, Boundary::Neumann);
        let m = discretize(&g, 1.0 / 16.0).unwrap();
        assert_eq!(m.len(), 15 + 2 - 1);
    }
}
