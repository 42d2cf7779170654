use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Vertex role tags used by the protocol layouts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub circle: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub star: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub square: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub white: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub output_box: Vec<usize>,
}

impl Roles {
    pub fn is_empty(&self) -> bool {
        self.circle.is_empty()
            && self.star.is_empty()
            && self.square.is_empty()
            && self.white.is_empty()
            && self.output_box.is_empty()
    }

    fn all(&self) -> impl Iterator<Item = &usize> {
        self.circle
            .iter()
            .chain(&self.star)
            .chain(&self.square)
            .chain(&self.white)
            .chain(&self.output_box)
    }
}

/// Simple undirected graph. Edges are stored as `(min, max)` pairs, sorted
/// and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    pub roles: Roles,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Roles::is_empty")]
    roles: Roles,
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Graph> {
        let mut g = Graph::new(j.n, j.edges.iter().map(|e| (e[0], e[1])))?;
        if let Some(&v) = j.roles.all().find(|&&v| v >= j.n) {
            return Err(Error::InvalidGraph(format!("role vertex {v} out of range")));
        }
        g.roles = j.roles;
        Ok(g)
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> GraphJson {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            roles: g.roles,
        }
    }
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self {
            n,
            edges,
            adjacency,
            roles: Roles::default(),
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("no edges")
    }

    pub fn line(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("valid line")
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("ring needs at least 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// `width × height` square lattice; vertex `(col, row)` has index
    /// `row * width + col`.
    pub fn lattice(width: usize, height: usize) -> Self {
        let idx = |c: usize, r: usize| r * width + c;
        let mut edges = Vec::new();
        for r in 0..height {
            for c in 0..width {
                if c + 1 < width {
                    edges.push((idx(c, r), idx(c + 1, r)));
                }
                if r + 1 < height {
                    edges.push((idx(c, r), idx(c, r + 1)));
                }
            }
        }
        Self::new(width * height, edges).expect("valid lattice")
    }

    /// Erdős–Rényi graph with edge probability `p`.
    pub fn random(n: usize, p: f64, rng: &mut impl Rng) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        Self::new(n, edges).expect("valid random graph")
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// S_j, sorted ascending.
    pub fn neighbors(&self, j: usize) -> &[usize] {
        &self.adjacency[j]
    }

    pub fn degree(&self, j: usize) -> usize {
        self.adjacency[j].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Graph on `vertices` (new vertex `i` is `vertices[i]`) with the edges
    /// among them.
    pub fn induced(&self, vertices: &[usize]) -> Result<Self> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(Error::InvalidGraph(format!("vertex {v} out of range")));
            }
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| pos[a] != usize::MAX && pos[b] != usize::MAX)
            .map(|&(a, b)| (pos[a], pos[b]));
        Self::new(vertices.len(), edges)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedups_and_normalizes() {
        let g = Graph::new(3, [(1, 0), (0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::new(2, [(1, 1)]).is_err());
        assert!(Graph::new(2, [(0, 2)]).is_err());
    }

    #[test]
    fn lattice_shape() {
        let g = Graph::lattice(3, 3);
        assert_eq!(g.edges().len(), 12);
        assert_eq!(g.degree(4), 4);
        assert_eq!(g.degree(0), 2);
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"n":3,"edges":[[0,1],[1,2]],"roles":{"circle":[0,1],"white":[2]}}"#;
        let g = Graph::from_json(json).unwrap();
        assert_eq!(g.roles.circle, vec![0, 1]);
        let back = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
        assert!(Graph::from_json(r#"{"n":2,"edges":[],"roles":{"star":[5]}}"#).is_err());
    }

    #[test]
    fn ring_and_induced() {
        let r = Graph::ring(5).unwrap();
        assert_eq!(r.edges().len(), 5);
        let sub = r.induced(&[0, 1, 4]).unwrap();
        assert_eq!(sub.edges(), &[(0, 1), (0, 2)]);
        assert!(Graph::ring(2).is_err());
    }
}
