//! Simplicial graphs with opaque string vertex ids.
//!
//! Vertex indices are stable insertion indices. The canonical vertex order is
//! shortlex on ids (length first, then bytes); neighbor lists are kept in that
//! order so every traversal breaks ties the same way.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// Shortlex comparison of vertex ids.
pub fn shortlex_cmp(a: &str, b: &str) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.as_bytes().cmp(b.as_bytes()))
}

/// Undirected graph without loops or multiple edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    /// Neighbors of each vertex, sorted by rank.
    adj: Vec<Vec<usize>>,
    /// Position of each vertex in the shortlex order of ids.
    rank: Vec<usize>,
    edge_count: usize,
}

impl SimplicialGraph {
    /// Builds a graph from ids and index pairs. Repeated edges collapse to one;
    /// loops and unknown endpoints are rejected.
    pub fn new(ids: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate vertex id `{id}`")));
            }
        }
        let mut order: Vec<usize> = (0..ids.len()).collect();
        order.sort_by(|&a, &b| shortlex_cmp(&ids[a], &ids[b]));
        let mut rank = vec![0; ids.len()];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        let mut adj = vec![Vec::new(); ids.len()];
        for (u, v) in edges {
            if u >= ids.len() || v >= ids.len() {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) has an unknown endpoint"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!(
                    "loop at `{}` (graphs are anti-reflexive)",
                    ids[u]
                )));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_by_key(|&w| rank[w]);
            list.dedup();
            edge_count += list.len();
        }
        Ok(SimplicialGraph {
            ids,
            index,
            adj,
            rank,
            edge_count: edge_count / 2,
        })
    }

    /// Builds a graph from id pairs.
    pub fn from_named_edges(ids: Vec<String>, edges: &[(String, String)]) -> Result<Self> {
        let index: HashMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let pairs = edges
            .iter()
            .map(|(a, b)| {
                let u = *index
                    .get(a.as_str())
                    .ok_or_else(|| Error::UnknownVertex(a.clone()))?;
                let v = *index
                    .get(b.as_str())
                    .ok_or_else(|| Error::UnknownVertex(b.clone()))?;
                Ok((u, v))
            })
            .collect::<Result<Vec<_>>>()?;
        SimplicialGraph::new(ids, pairs)
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Index of `id`, or an unknown-vertex error.
    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// Neighbors of `v` (the set `T_v`), in shortlex order of ids.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u]
            .binary_search_by_key(&self.rank[v], |&w| self.rank[w])
            .is_ok()
    }

    /// Vertex indices in shortlex order of ids.
    pub fn vertices_in_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.ids.len()).collect();
        order.sort_by_key(|&v| self.rank[v]);
        order
    }

    /// Each edge once as `(u, v)` with `rank(u) < rank(v)`, in lexicographic rank order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in self.vertices_in_order() {
            for &v in &self.adj[u] {
                if self.rank[u] < self.rank[v] {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Same vertices plus `extra` edges.
    pub fn with_edges(&self, extra: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges = self.edges().into_iter().chain(extra);
        SimplicialGraph::new(self.ids.clone(), edges)
    }

    /// Appends new vertices (indices continue after the existing ones) and edges.
    pub fn with_vertices(
        &self,
        new_ids: impl IntoIterator<Item = String>,
        extra: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut ids = self.ids.clone();
        ids.extend(new_ids);
        SimplicialGraph::new(ids, self.edges().into_iter().chain(extra))
    }

    /// Component label of every vertex; labels follow shortlex order of the
    /// least vertex in each component.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.ids.len()];
        let mut next = 0;
        for s in self.vertices_in_order() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// True when `path` is a sequence of adjacent vertices.
    pub fn is_path(&self, path: &[usize]) -> bool {
        !path.is_empty() && path.windows(2).all(|p| self.has_edge(p[0], p[1]))
    }
}
