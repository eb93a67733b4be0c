//! Brute-force oracles, written independently of the library kernels: they
//! use adjacency matrices, Floyd–Warshall and set relaxation instead of BFS.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};

use finegraph::graph::SimplicialGraph;
use finegraph::group::{Element, Group, Subgroup};

pub const INF: usize = usize::MAX / 4;

pub fn adjacency(g: &SimplicialGraph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// All-pairs distances, optionally with one vertex deleted (its row is `INF`).
pub fn floyd(adj: &[Vec<bool>], removed: Option<usize>) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        if Some(i) == removed {
            continue;
        }
        d[i][i] = 0;
        for j in 0..n {
            if adj[i][j] && Some(j) != removed {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == INF {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// `uv⃗(k)` by set relaxation: `w ∈ T_u` is in iff `v` is reachable from
/// `w` within `k − 1` steps without entering `u`.
pub fn escaping_oracle(adj: &[Vec<bool>], u: usize, v: usize, k: usize) -> BTreeSet<usize> {
    let n = adj.len();
    let mut out = BTreeSet::new();
    for w in (0..n).filter(|&w| adj[u][w]) {
        let mut reached = vec![false; n];
        reached[w] = true;
        for _ in 1..k {
            let snapshot = reached.clone();
            for x in (0..n).filter(|&x| snapshot[x]) {
                for y in 0..n {
                    if adj[x][y] && y != u {
                        reached[y] = true;
                    }
                }
            }
        }
        if reached[v] {
            out.insert(w);
        }
    }
    out
}

/// Second vertices of explicitly enumerated walks `[u, x₁, …, x_m = v]`,
/// `m ≤ k`, avoiding `u` after the start.
pub fn escaping_by_walks(adj: &[Vec<bool>], u: usize, v: usize, k: usize) -> BTreeSet<usize> {
    fn walk(
        adj: &[Vec<bool>],
        u: usize,
        v: usize,
        left: usize,
        x: usize,
        first: usize,
        out: &mut BTreeSet<usize>,
    ) {
        if x == v {
            out.insert(first);
        }
        if left == 0 || out.contains(&first) {
            return;
        }
        for y in 0..adj.len() {
            if adj[x][y] && y != u {
                walk(adj, u, v, left - 1, y, first, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    for w in (0..adj.len()).filter(|&w| adj[u][w]) {
        walk(adj, u, v, k - 1, w, w, &mut out);
    }
    out
}

/// Twice the largest four-point defect over all quadruples.
pub fn four_point_doubled(d: &[Vec<usize>]) -> usize {
    let n = d.len();
    let mut best = 0;
    for x in 0..n {
        for y in x..n {
            for z in y..n {
                for w in z..n {
                    let mut s = [d[x][y] + d[z][w], d[x][z] + d[y][w], d[x][w] + d[y][z]];
                    s.sort_unstable();
                    best = best.max(s[2] - s[1]);
                }
            }
        }
    }
    best
}

/// Direct construction of the coned-off graph and the relative Cayley graph of
/// a finite group, from the multiplication alone.
pub struct FiniteConedOff {
    pub elements: Vec<Element>,
    pub index: HashMap<Element, usize>,
    /// Coset of each element (index into `cosets`).
    pub coset_of: Vec<usize>,
    pub cosets: usize,
    /// Γ̂ on `elements.len() + cosets` vertices; cone `c` is vertex `n + c`.
    pub hat: Vec<Vec<bool>>,
    /// Γ(G, X ⊔ H) collapsed to a simple graph.
    pub rel: Vec<Vec<bool>>,
    pub in_h: Vec<bool>,
    pub x_closed: Vec<Element>,
    pub h_nontrivial: Vec<Element>,
}

impl FiniteConedOff {
    pub fn new(group: &Group, h: &Subgroup, x: &[Element]) -> Self {
        let elements: Vec<Element> = group.full_window(100_000).unwrap().elements().to_vec();
        let n = elements.len();
        let index: HashMap<Element, usize> = elements
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, g)| (g, i))
            .collect();
        let in_h: Vec<bool> = elements.iter().map(|g| h.contains(g)).collect();
        let h_elems: Vec<Element> = elements.iter().filter(|g| h.contains(g)).cloned().collect();
        let mut key_of: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut coset_of = Vec::new();
        for g in &elements {
            let key: BTreeSet<usize> = h_elems
                .iter()
                .map(|k| index[&group.multiply(g, k)])
                .collect();
            let next = key_of.len();
            coset_of.push(*key_of.entry(key).or_insert(next));
        }
        let cosets = key_of.len();
        let mut x_closed = Vec::new();
        for g in x {
            for y in [g.clone(), group.invert(g)] {
                if !group.is_identity(&y) && !x_closed.contains(&y) {
                    x_closed.push(y);
                }
            }
        }
        let h_nontrivial: Vec<Element> = h_elems
            .iter()
            .filter(|g| !group.is_identity(g))
            .cloned()
            .collect();
        let mut hat = vec![vec![false; n + cosets]; n + cosets];
        let mut rel = vec![vec![false; n]; n];
        for (i, g) in elements.iter().enumerate() {
            for y in &x_closed {
                let j = index[&group.multiply(g, y)];
                hat[i][j] = true;
                hat[j][i] = true;
                rel[i][j] = true;
                rel[j][i] = true;
            }
            for y in &h_nontrivial {
                let j = index[&group.multiply(g, y)];
                rel[i][j] = true;
                rel[j][i] = true;
            }
            hat[i][n + coset_of[i]] = true;
            hat[n + coset_of[i]][i] = true;
        }
        FiniteConedOff {
            elements,
            index,
            coset_of,
            cosets,
            hat,
            rel,
            in_h,
            x_closed,
            h_nontrivial,
        }
    }

    /// Shortest admissible path lengths from `src` (H-labeled steps allowed
    /// only between elements outside `H`).
    pub fn admissible_from(&self, group: &Group, src: usize) -> Vec<usize> {
        let n = self.elements.len();
        let mut d = vec![INF; n];
        d[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(i) = queue.pop_front() {
            let g = &self.elements[i];
            let mut next: Vec<usize> = self
                .x_closed
                .iter()
                .map(|y| self.index[&group.multiply(g, y)])
                .collect();
            if !self.in_h[i] {
                next.extend(
                    self.h_nontrivial
                        .iter()
                        .map(|y| self.index[&group.multiply(g, y)])
                        .filter(|&j| !self.in_h[j]),
                );
            }
            for j in next {
                if d[j] == INF {
                    d[j] = d[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        d
    }

    /// The cone vertex of `H` itself.
    pub fn apex(&self) -> usize {
        self.elements.len() + self.coset_of[0]
    }
}

pub fn connected(adj: &[Vec<bool>]) -> bool {
    let d = floyd(adj, None);
    d[0].iter().all(|&x| x < INF)
}
