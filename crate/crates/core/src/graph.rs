//! Simple undirected graphs, deterministic generators and the structural
//! statistics the error bounds are stated in terms of.
//!
//! Edges are canonicalized to `(u, v)` with `u < v` and labelled
//! `0..m` in input order.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::rng::CounterRng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    // sorted neighbor lists
    adjacency: Vec<Vec<usize>>,
    // incident edge labels, sorted
    incident: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a validated graph. Pairs may be given in either orientation.
    pub fn from_edge_list(pairs: &[(usize, usize)], vertex_count: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        let mut seen = std::collections::HashSet::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for vertex in [a, b] {
                if vertex >= vertex_count {
                    return Err(Error::EndpointOutOfRange { vertex, vertex_count });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
            edges.push(e);
        }

        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut incident = vec![Vec::new(); vertex_count];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push(v);
            adjacency[v].push(u);
            incident[u].push(i);
            incident[v].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let degrees = adjacency.iter().map(Vec::len).collect();
        Ok(Graph {
            vertex_count,
            edges,
            degrees,
            adjacency,
            incident,
        })
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self::from_edge_list(&[], vertex_count).expect("empty graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Edge labels incident to `v`, ascending.
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    fn check_edge(&self, i: usize) -> Result<(usize, usize)> {
        self.edges.get(i).copied().ok_or(Error::EdgeOutOfRange {
            index: i,
            m: self.edges.len(),
        })
    }

    /// The endpoint of edge `i` with the smaller degree; ties go to the
    /// smaller vertex id.
    pub fn min_degree_endpoint(&self, i: usize) -> Result<usize> {
        let (u, v) = self.check_edge(i)?;
        Ok(if self.degrees[v] < self.degrees[u] { v } else { u })
    }

    /// All edges incident to the min-degree endpoint of edge `i`,
    /// including `i` itself.
    pub fn neighborhood(&self, i: usize) -> Result<Vec<usize>> {
        let v = self.min_degree_endpoint(i)?;
        Ok(self.incident[v].clone())
    }

    pub fn edge_stats(&self) -> EdgeStats {
        let min_degrees: Vec<usize> = self
            .edges
            .iter()
            .map(|&(u, v)| self.degrees[u].min(self.degrees[v]))
            .collect();
        let k_m = min_degrees.iter().map(|&d| d as u64).sum();
        EdgeStats {
            m: self.edges.len(),
            degrees: self.degrees.clone(),
            min_degrees,
            k_m,
            triangle_count: self.triangle_count(),
            component_sizes: self.connected_components().iter().map(|c| c.vertices.len()).collect(),
        }
    }

    /// Counts each triangle once, from its lowest edge `(u, v)` and apex `w > v`.
    pub fn triangle_count(&self) -> u64 {
        self.edges
            .par_iter()
            .map(|&(u, v)| {
                let (a, b) = (&self.adjacency[u], &self.adjacency[v]);
                let (mut x, mut y) = (a.partition_point(|&w| w <= v), b.partition_point(|&w| w <= v));
                let mut count = 0u64;
                while x < a.len() && y < b.len() {
                    match a[x].cmp(&b[y]) {
                        std::cmp::Ordering::Less => x += 1,
                        std::cmp::Ordering::Greater => y += 1,
                        std::cmp::Ordering::Equal => {
                            count += 1;
                            x += 1;
                            y += 1;
                        }
                    }
                }
                count
            })
            .sum()
    }

    /// Connected components ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<Component> {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut components = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.vertex_count {
            if label[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            label[start] = id;
            stack.push(start);
            let mut vertices = Vec::new();
            while let Some(v) = stack.pop() {
                vertices.push(v);
                for &w in &self.adjacency[v] {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        stack.push(w);
                    }
                }
            }
            vertices.sort_unstable();
            components.push(Component {
                vertices,
                edges: Vec::new(),
            });
        }
        for (i, &(u, _)) in self.edges.iter().enumerate() {
            components[label[u]].edges.push(i);
        }
        components
    }

    /// The subgraph spanned by `component`, with vertices relabelled
    /// `0..k` in ascending order and edges kept in label order.
    pub fn induced(&self, component: &Component) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (new, &old) in component.vertices.iter().enumerate() {
            index[old] = new;
        }
        let pairs: Vec<_> = component
            .edges
            .iter()
            .map(|&i| {
                let (u, v) = self.edges[i];
                (index[u], index[v])
            })
            .collect();
        Graph::from_edge_list(&pairs, component.vertices.len()).expect("subgraph of a valid graph")
    }

    pub fn is_forest(&self) -> bool {
        self.connected_components()
            .iter()
            .all(|c| c.edges.len() + 1 == c.vertices.len())
    }

    /// Edge-list text: `# vertices N` header, then edges sorted
    /// lexicographically, one `u v` per line.
    pub fn to_edge_list_string(&self) -> String {
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        let mut out = format!("# vertices {}\n", self.vertex_count);
        for (u, v) in sorted {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// SHA-256 of the canonical edge-list text, hex encoded. Independent
    /// of the order edges were supplied in.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_edge_list_string().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

impl FromStr for Graph {
    type Err = Error;

    /// Parses the edge-list format. Without a header the vertex count is
    /// one more than the largest endpoint.
    fn from_str(text: &str) -> Result<Self> {
        let mut vertex_count = None;
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let trimmed = raw.trim();
            if let Some(comment) = trimmed.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("vertices") {
                    let count = words
                        .next()
                        .and_then(|w| w.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse {
                            line: line_no,
                            msg: "malformed vertices header".into(),
                        })?;
                    if vertex_count.replace(count).is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "repeated vertices header".into(),
                        });
                    }
                }
                continue;
            }
            let body = trimmed.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected two vertex ids, found {}", fields.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad vertex id {s:?}: {e}"),
                })
            };
            pairs.push((parse(fields[0])?, parse(fields[1])?));
        }
        let vertex_count = vertex_count.unwrap_or_else(|| pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0));
        Graph::from_edge_list(&pairs, vertex_count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStats {
    pub m: usize,
    pub degrees: Vec<usize>,
    /// `min(deg u, deg v)` for each edge.
    pub min_degrees: Vec<usize>,
    /// Sum of `min_degrees`.
    pub k_m: u64,
    pub triangle_count: u64,
    pub component_sizes: Vec<usize>,
}

/// Graph families the generator knows. Sizes are vertex counts except for
/// `Matching`, which takes its number of edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    Complete { n: usize },
    Cycle { n: usize },
    Path { n: usize },
    Star { n: usize },
    Matching { edges: usize },
    CompleteBipartite { left: usize, right: usize },
    ErdosRenyi { n: usize, p: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Complete { .. } => "complete",
            Family::Cycle { .. } => "cycle",
            Family::Path { .. } => "path",
            Family::Star { .. } => "star",
            Family::Matching { .. } => "matching",
            Family::CompleteBipartite { .. } => "complete_bipartite",
            Family::ErdosRenyi { .. } => "erdos_renyi",
        }
    }

    /// The size parameter reported in sweep output.
    pub fn size(&self) -> usize {
        match *self {
            Family::Complete { n }
            | Family::Cycle { n }
            | Family::Path { n }
            | Family::Star { n }
            | Family::ErdosRenyi { n, .. } => n,
            Family::Matching { edges } => edges,
            Family::CompleteBipartite { left, right } => left + right,
        }
    }
}

/// Stream id reserved for Erdős–Rényi edge draws.
const ER_STREAM: u64 = 0x4552;

pub fn generate(family: Family, seed: Option<u64>) -> Result<Graph> {
    let mut pairs = Vec::new();
    let vertex_count = match family {
        Family::Complete { n } => {
            require(n >= 1, "complete graph needs n >= 1")?;
            for u in 0..n {
                for v in u + 1..n {
                    pairs.push((u, v));
                }
            }
            n
        }
        Family::Cycle { n } => {
            require(n >= 3, "cycle needs n >= 3")?;
            pairs.extend((0..n).map(|u| (u, (u + 1) % n)));
            n
        }
        Family::Path { n } => {
            require(n >= 1, "path needs n >= 1")?;
            pairs.extend((1..n).map(|u| (u - 1, u)));
            n
        }
        Family::Star { n } => {
            require(n >= 1, "star needs n >= 1")?;
            pairs.extend((1..n).map(|u| (0, u)));
            n
        }
        Family::Matching { edges } => {
            require(edges >= 1, "matching needs at least one edge")?;
            pairs.extend((0..edges).map(|k| (2 * k, 2 * k + 1)));
            2 * edges
        }
        Family::CompleteBipartite { left, right } => {
            require(left >= 1 && right >= 1, "complete bipartite needs both sides >= 1")?;
            for u in 0..left {
                for v in 0..right {
                    pairs.push((u, left + v));
                }
            }
            left + right
        }
        Family::ErdosRenyi { n, p } => {
            require(n >= 1, "erdos_renyi needs n >= 1")?;
            require((0.0..=1.0).contains(&p), "erdos_renyi needs p in [0, 1]")?;
            let seed = seed.ok_or_else(|| invalid("erdos_renyi requires a seed"))?;
            let rng = CounterRng::new(seed, ER_STREAM);
            let mut index = 0u64;
            for u in 0..n {
                for v in u + 1..n {
                    let word = rng.sample(index).word(0, 0);
                    if unit_interval(word) < p {
                        pairs.push((u, v));
                    }
                    index += 1;
                }
            }
            n
        }
    };
    Graph::from_edge_list(&pairs, vertex_count)
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}

/// Top 53 bits as a double in `[0, 1)`.
fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
