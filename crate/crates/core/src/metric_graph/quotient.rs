//! Iterated product-and-glue construction `F_i = (F_{i-1} \ B_i) x G_i  U  B_i`.
//!
//! A point of `F_i` is a base point together with a fiber word `(g_1, ..., g_i)`.
//! At level `k` the coordinate `g_k` is collapsed wherever the point lies in
//! `B_k`; the rule may depend on the earlier coordinates, which is how the
//! stitched strings restrict duplication to a single sheet. Collapsed
//! coordinates are stored canonically as `0`, so truncating a canonical
//! level-`i` word gives the canonical level-`(i-1)` word of its image.

use std::collections::HashMap;

use super::{Boundary, Edge, MetricGraph, Vertex};

#[derive(Debug, Clone, PartialEq)]
pub struct BaseVertex {
    /// Integer key of the base point (grid tick or gasket vertex index).
    pub site: i64,
    pub x: f64,
    pub boundary: Option<Boundary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub weight: f64,
}

/// The level-0 space, already subdivided at every point where a later gluing
/// can happen.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BaseGraph {
    pub vertices: Vec<BaseVertex>,
    pub edges: Vec<BaseEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locus {
    Vertex(usize),
    /// Interior of a base edge.
    Edge(usize),
}

pub trait GluingRule {
    /// Number of fiber levels.
    fn depth(&self) -> usize;
    /// `|G_level|` for `level` in `1..=depth`.
    fn fiber_size(&self, level: usize) -> u32;
    /// Whether coordinate `level` is collapsed at `locus` on the sheet whose
    /// earlier coordinates are `prefix` (length `level - 1`).
    fn collapses(&self, level: usize, locus: Locus, prefix: &[u32]) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientVertex {
    pub base: usize,
    pub word: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientEdge {
    pub u: usize,
    pub v: usize,
    pub base_edge: usize,
    pub word: Vec<u32>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientGraph {
    pub level: usize,
    pub vertices: Vec<QuotientVertex>,
    pub edges: Vec<QuotientEdge>,
}

pub fn canonical_word(rule: &dyn GluingRule, base_vertex: usize, word: &[u32]) -> Vec<u32> {
    let mut w = word.to_vec();
    for k in 1..=w.len() {
        if rule.collapses(k, Locus::Vertex(base_vertex), &w[..k - 1]) {
            w[k - 1] = 0;
        }
    }
    w
}

/// Sheet words carried by the interior of `edge` at `level`, with the
/// measure factor of each sheet.
fn edge_sheets(rule: &dyn GluingRule, edge: usize, level: usize) -> Vec<(Vec<u32>, f64)> {
    let mut sheets = vec![(Vec::new(), 1.0)];
    for k in 1..=level {
        let size = rule.fiber_size(k);
        let mut next = Vec::with_capacity(sheets.len() * size as usize);
        for (prefix, factor) in sheets {
            if rule.collapses(k, Locus::Edge(edge), &prefix) {
                let mut w = prefix;
                w.push(0);
                next.push((w, factor));
            } else {
                for g in 0..size {
                    let mut w = prefix.clone();
                    w.push(g);
                    next.push((w, factor / size as f64));
                }
            }
        }
        sheets = next;
    }
    sheets
}

/// Builds `F_level` over `base`.
pub fn quotient_level(base: &BaseGraph, rule: &dyn GluingRule, level: usize) -> QuotientGraph {
    assert!(level <= rule.depth(), "level {level} beyond rule depth {}", rule.depth());
    let mut index: HashMap<QuotientVertex, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |qv: QuotientVertex, vertices: &mut Vec<QuotientVertex>| -> usize {
        *index.entry(qv.clone()).or_insert_with(|| {
            vertices.push(qv);
            vertices.len() - 1
        })
    };
    for (ei, e) in base.edges.iter().enumerate() {
        for (word, factor) in edge_sheets(rule, ei, level) {
            let wa = canonical_word(rule, e.a, &word);
            let wb = canonical_word(rule, e.b, &word);
            let u = intern(QuotientVertex { base: e.a, word: wa }, &mut vertices);
            let v = intern(QuotientVertex { base: e.b, word: wb }, &mut vertices);
            edges.push(QuotientEdge { u, v, base_edge: ei, word, weight: e.weight * factor });
        }
    }
    QuotientGraph { level, vertices, edges }
}

impl QuotientGraph {
    /// Realizes the quotient as a metric graph over a one-dimensional base.
    pub fn to_metric_graph(&self, base: &BaseGraph) -> MetricGraph {
        let vertices = self
            .vertices
            .iter()
            .enumerate()
            .map(|(id, qv)| {
                let bv = &base.vertices[qv.base];
                Vertex { id, x: bv.x, word: qv.word.clone(), boundary: bv.boundary }
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|qe| Edge {
                u: qe.u,
                v: qe.v,
                length: base.edges[qe.base_edge].length,
                weight: qe.weight,
                word: qe.word.clone(),
            })
            .collect();
        MetricGraph { vertices, edges }
    }
}

/// Independent count of the points of `F_level` over each base vertex: the
/// full product `V x G_1 x ... x G_level` is enumerated and glued with a
/// union-find, one elementary identification at a time.
pub fn brute_force_vertex_count(base: &BaseGraph, rule: &dyn GluingRule, level: usize) -> usize {
    let sizes: Vec<u32> = (1..=level).map(|k| rule.fiber_size(k)).collect();
    let words = all_words(&sizes);
    let mut total = 0;
    for bv in 0..base.vertices.len() {
        let pos: HashMap<&Vec<u32>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut parent: Vec<usize> = (0..words.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (i, w) in words.iter().enumerate() {
            for k in 1..=level {
                if rule.collapses(k, Locus::Vertex(bv), &w[..k - 1]) {
                    for g in 0..sizes[k - 1] {
                        let mut other = w.clone();
                        other[k - 1] = g;
                        let j = pos[&other];
                        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                        if a != b {
                            parent[a] = b;
                        }
                    }
                }
            }
        }
        total += (0..words.len()).filter(|&i| find(&mut parent, i) == i).count();
    }
    total
}

fn all_words(sizes: &[u32]) -> Vec<Vec<u32>> {
    let mut words = vec![Vec::new()];
    for &s in sizes {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..s).map(move |g| {
                    let mut w = w.clone();
                    w.push(g);
                    w
                })
            })
            .collect();
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two binary levels over a path 0-1-2; level 1 glues at vertex 1,
    /// level 2 glues nowhere.
    struct Toy;
    impl GluingRule for Toy {
        fn depth(&self) -> usize {
            2
        }
        fn fiber_size(&self, _: usize) -> u32 {
            2
        }
        fn collapses(&self, level: usize, locus: Locus, _: &[u32]) -> bool {
            level == 1 && locus == Locus::Vertex(1)
        }
    }

    fn path() -> BaseGraph {
        BaseGraph {
            vertices: (0..3).map(|i| BaseVertex { site: i, x: i as f64, boundary: None }).collect(),
            edges: vec![
                BaseEdge { a: 0, b: 1, length: 1.0, weight: 1.0 },
                BaseEdge { a: 1, b: 2, length: 1.0, weight: 1.0 },
            ],
        }
    }

    #[test]
    fn canonical_words_zero_collapsed_coordinates() {
        assert_eq!(canonical_word(&Toy, 1, &[1, 1]), vec![0, 1]);
        assert_eq!(canonical_word(&Toy, 0, &[1, 1]), vec![1, 1]);
    }

    #[test]
    fn level_counts_match_brute_force() {
        let base = path();
        for level in 0..=2 {
            let q = quotient_level(&base, &Toy, level);
            assert_eq!(q.vertices.len(), brute_force_vertex_count(&base, &Toy, level));
        }
        let q = quotient_level(&base, &Toy, 2);
        // ends: 4 copies each, middle: 2 copies
        assert_eq!(q.vertices.len(), 10);
        assert_eq!(q.edges.len(), 8);
        let mass: f64 = q.edges.iter().map(|e| e.weight).sum();
        assert!((mass - 2.0).abs() < 1e-15);
    }
}
