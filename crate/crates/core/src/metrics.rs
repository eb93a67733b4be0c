//! Path metrics, angle metrics, escaping sets, fineness probes, four-point
//! hyperbolicity estimates and quasi-isometry checks.

use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::SimplicialGraph;

/// A path distance; `Infinite` means the endpoints lie in different components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Finite(usize),
    Infinite,
}

impl Dist {
    pub fn finite(self) -> Option<usize> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    /// `factor · self + add`, with infinity absorbing.
    pub fn affine(self, factor: usize, add: usize) -> Dist {
        match self {
            Dist::Finite(d) => Dist::Finite(factor * d + add),
            Dist::Infinite => Dist::Infinite,
        }
    }

    fn from_raw(d: u32) -> Dist {
        if d == UNREACHED {
            Dist::Infinite
        } else {
            Dist::Finite(d as usize)
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Infinite => f.write_str("infinity"),
        }
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dist::Finite(d) => s.serialize_u64(*d as u64),
            Dist::Infinite => s.serialize_str("infinity"),
        }
    }
}

pub(crate) const UNREACHED: u32 = u32::MAX;

/// BFS distances from `source`, optionally in the graph with `removed` deleted.
/// Unreached vertices (and `removed` itself) get `UNREACHED`.
pub fn bfs(graph: &SimplicialGraph, source: usize, removed: Option<usize>) -> Vec<u32> {
    bfs_multi(graph, &[source], removed)
}

/// BFS distances to the nearest of several sources.
pub fn bfs_multi(graph: &SimplicialGraph, sources: &[usize], removed: Option<usize>) -> Vec<u32> {
    let mut dist = vec![UNREACHED; graph.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if Some(s) != removed && dist[s] == UNREACHED {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in graph.neighbors(x) {
            if dist[y] == UNREACHED && Some(y) != removed {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist
}

pub fn path_distance(graph: &SimplicialGraph, x: usize, y: usize) -> Dist {
    Dist::from_raw(bfs(graph, x, None)[y])
}

/// Lexicographically least geodesic from `x` to `y` (comparing vertex ranks
/// position by position), optionally avoiding `removed`.
pub fn geodesic(
    graph: &SimplicialGraph,
    x: usize,
    y: usize,
    removed: Option<usize>,
) -> Option<Vec<usize>> {
    let to_y = bfs(graph, y, removed);
    geodesic_with(graph, x, &to_y)
}

/// Greedy descent along a precomputed distance field towards its source.
fn geodesic_with(graph: &SimplicialGraph, x: usize, to_target: &[u32]) -> Option<Vec<usize>> {
    if to_target[x] == UNREACHED {
        return None;
    }
    let mut path = vec![x];
    let mut cur = x;
    while to_target[cur] > 0 {
        let want = to_target[cur] - 1;
        cur = *graph
            .neighbors(cur)
            .iter()
            .find(|&&w| to_target[w] == want)?;
        path.push(cur);
    }
    Some(path)
}

fn require_neighbor(graph: &SimplicialGraph, v: usize, x: usize) -> Result<()> {
    if graph.has_edge(v, x) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "`{}` is not adjacent to `{}`",
            graph.id(x),
            graph.id(v)
        )))
    }
}

/// `∠_v(x, y)`: distance between two neighbors of `v` in `Γ − {v}`.
pub fn angle_distance(graph: &SimplicialGraph, v: usize, x: usize, y: usize) -> Result<Dist> {
    require_neighbor(graph, v, x)?;
    require_neighbor(graph, v, y)?;
    Ok(Dist::from_raw(bfs(graph, x, Some(v))[y]))
}

/// Closed ball in `(T_vΓ, ∠_v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleBall {
    pub base: usize,
    pub center: usize,
    pub radius: usize,
    /// Members in shortlex order of ids.
    pub members: Vec<usize>,
}

impl AngleBall {
    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn angle_ball(
    graph: &SimplicialGraph,
    v: usize,
    center: usize,
    radius: usize,
) -> Result<AngleBall> {
    require_neighbor(graph, v, center)?;
    let dist = bfs(graph, center, Some(v));
    let members = graph
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&w| dist[w] != UNREACHED && dist[w] as usize <= radius)
        .collect();
    Ok(AngleBall {
        base: v,
        center,
        radius,
        members,
    })
}

/// The set `uv⃗(k)` of neighbors of `u` lying on an escaping path from `u` to
/// `v` of length at most `k`, with one witness path per member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscapingPathSet {
    pub u: usize,
    pub v: usize,
    pub k: usize,
    /// Members in shortlex order of ids.
    pub members: Vec<usize>,
    /// `witnesses[i]` starts `[u, members[i], ...]` and ends at `v`.
    pub witnesses: Vec<Vec<usize>>,
}

impl EscapingPathSet {
    pub fn contains(&self, w: usize) -> bool {
        self.members.contains(&w)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn to_json(&self, graph: &SimplicialGraph) -> Value {
        let ids = |p: &[usize]| {
            p.iter()
                .map(|&x| graph.id(x).to_string())
                .collect::<Vec<_>>()
        };
        json!({
            "u": graph.id(self.u),
            "v": graph.id(self.v),
            "k": self.k,
            "members": ids(&self.members),
            "witnesses": self.witnesses.iter().map(|p| ids(p)).collect::<Vec<_>>(),
        })
    }
}

/// Computes `uv⃗(k)`.
///
/// A neighbor `w` of `u` lies on an escaping path of length `≤ k` exactly when
/// `d_{Γ−u}(w, v) ≤ k − 1`: a vertex anywhere on such a path reaches `v` along
/// it without touching `u`, and conversely `[u, w]` followed by a geodesic in
/// `Γ − u` is escaping. One BFS from `v` in `Γ − u` therefore decides every
/// member, and the witness is `[u, w]` plus the least geodesic to `v`.
pub fn escaping_set(
    graph: &SimplicialGraph,
    u: usize,
    v: usize,
    k: usize,
) -> Result<EscapingPathSet> {
    if u == v {
        return Err(Error::Precondition(
            "escaping set needs distinct endpoints".into(),
        ));
    }
    if k == 0 {
        return Err(Error::Precondition("escaping set needs k ≥ 1".into()));
    }
    let to_v = bfs(graph, v, Some(u));
    let mut members = Vec::new();
    let mut witnesses = Vec::new();
    for &w in graph.neighbors(u) {
        if to_v[w] != UNREACHED && (to_v[w] as usize) < k {
            let mut path = vec![u];
            path.extend(geodesic_with(graph, w, &to_v).expect("reachable"));
            members.push(w);
            witnesses.push(path);
        }
    }
    Ok(EscapingPathSet {
        u,
        v,
        k,
        members,
        witnesses,
    })
}

/// Whether a stable pattern was observed across the last two windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Growing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FinenessRow {
    pub window: usize,
    pub k: usize,
    /// Size of the angle ball of radius `k` around the probe center.
    pub angle_ball: usize,
    /// Largest `|vt⃗(k)|` over probe targets `t`.
    pub escaping_max: usize,
    /// Sum of `|vt⃗(k)|` over probe targets `t`.
    pub escaping_total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FinenessProbe {
    pub vertex: String,
    /// Shortlex-least neighbor of the vertex in the first window.
    pub center: String,
    pub k_max: usize,
    /// Vertices within distance `k_max` of the probed vertex in the first window.
    pub targets: Vec<String>,
    pub rows: Vec<FinenessRow>,
    /// Radii whose figures changed between the last two windows.
    pub growing_at: Vec<usize>,
    pub verdict: Stability,
}

/// Tracks angle-ball and escaping-set sizes at one vertex across a nested
/// family of window graphs `(label, graph)`. The verdict is `Stable` when the
/// last two windows give identical figures for every `k ≤ k_max`; this is
/// evidence, not a certificate.
pub fn fineness_probe(
    family: &[(usize, &SimplicialGraph)],
    vertex: &str,
    k_max: usize,
) -> Result<FinenessProbe> {
    let (_, first) = family
        .first()
        .ok_or_else(|| Error::Precondition("empty graph family".into()))?;
    if k_max == 0 {
        return Err(Error::Precondition("fineness probe needs k_max ≥ 1".into()));
    }
    let v0 = first.vertex(vertex)?;
    let center = first
        .neighbors(v0)
        .first()
        .map(|&x| first.id(x).to_string())
        .ok_or_else(|| Error::Precondition(format!("`{vertex}` has no neighbors")))?;
    let dist0 = bfs(first, v0, None);
    let mut targets: Vec<usize> = (0..first.vertex_count())
        .filter(|&t| t != v0 && dist0[t] != UNREACHED && dist0[t] as usize <= k_max)
        .collect();
    targets.sort_by_key(|&t| first.rank(t));
    let target_ids: Vec<String> = targets.iter().map(|&t| first.id(t).to_string()).collect();

    let mut rows = Vec::new();
    for &(label, graph) in family {
        let v = graph.vertex(vertex)?;
        let c = graph.vertex(&center)?;
        let ts = target_ids
            .iter()
            .map(|t| graph.vertex(t))
            .collect::<Result<Vec<_>>>()?;
        let from_center = bfs(graph, c, Some(v));
        let to_targets: Vec<Vec<u32>> = ts.par_iter().map(|&t| bfs(graph, t, Some(v))).collect();
        for k in 1..=k_max {
            let angle = graph
                .neighbors(v)
                .iter()
                .filter(|&&w| from_center[w] != UNREACHED && from_center[w] as usize <= k)
                .count();
            let sizes: Vec<usize> = to_targets
                .iter()
                .map(|d| {
                    graph
                        .neighbors(v)
                        .iter()
                        .filter(|&&w| d[w] != UNREACHED && (d[w] as usize) < k)
                        .count()
                })
                .collect();
            rows.push(FinenessRow {
                window: label,
                k,
                angle_ball: angle,
                escaping_max: sizes.iter().copied().max().unwrap_or(0),
                escaping_total: sizes.iter().sum(),
            });
        }
    }
    let mut growing_at = Vec::new();
    if family.len() >= 2 {
        let last = &rows[rows.len() - k_max..];
        let prev = &rows[rows.len() - 2 * k_max..rows.len() - k_max];
        for (a, b) in prev.iter().zip(last) {
            if (a.angle_ball, a.escaping_max, a.escaping_total)
                != (b.angle_ball, b.escaping_max, b.escaping_total)
            {
                growing_at.push(a.k);
            }
        }
    }
    let verdict = if growing_at.is_empty() {
        Stability::Stable
    } else {
        Stability::Growing
    };
    Ok(FinenessProbe {
        vertex: vertex.to_string(),
        center,
        k_max,
        targets: target_ids,
        rows,
        growing_at,
        verdict,
    })
}

/// All-pairs BFS distances, row per source, `UNREACHED` for infinity.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl DistanceMatrix {
    pub fn new(graph: &SimplicialGraph) -> Self {
        let n = graph.vertex_count();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|s| bfs(graph, s, None))
            .collect();
        DistanceMatrix {
            n,
            d: rows.concat(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, x: usize, y: usize) -> Dist {
        Dist::from_raw(self.d[x * self.n + y])
    }

    pub(crate) fn raw(&self, x: usize, y: usize) -> u32 {
        self.d[x * self.n + y]
    }
}

/// Four-point δ estimate. Gromov products are half-integers, so `δ` is stored doubled.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct HyperbolicityEstimate {
    pub delta: f64,
    pub delta_doubled: usize,
    pub basepoint: String,
    pub method: &'static str,
    pub vertices: usize,
    /// Max over all basepoints, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_all_basepoints: Option<f64>,
}

/// `max_{x,y,z} min((x|z)_w, (y|z)_w) − (x|y)_w`, doubled.
fn doubled_delta_at(dm: &DistanceMatrix, w: usize) -> usize {
    let n = dm.len();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let dxw = dm.raw(x, w) as i64;
            let mut best = 0i64;
            for y in 0..n {
                let dyw = dm.raw(y, w) as i64;
                let pxy = dxw + dyw - dm.raw(x, y) as i64;
                for z in 0..n {
                    let dzw = dm.raw(z, w) as i64;
                    let pxz = dxw + dzw - dm.raw(x, z) as i64;
                    let pyz = dyw + dzw - dm.raw(y, z) as i64;
                    best = best.max(pxz.min(pyz) - pxy);
                }
            }
            best as usize
        })
        .max()
        .unwrap_or(0)
}

/// Four-point δ with the shortlex-least vertex as basepoint, or `basepoint`
/// if given; `all_basepoints` adds the maximum over every basepoint.
pub fn hyperbolicity_delta(
    graph: &SimplicialGraph,
    basepoint: Option<usize>,
    all_basepoints: bool,
) -> Result<HyperbolicityEstimate> {
    if graph.vertex_count() == 0 {
        return Err(Error::Precondition("empty graph".into()));
    }
    if !graph.is_connected() {
        return Err(Error::Precondition(
            "hyperbolicity estimate needs a connected graph".into(),
        ));
    }
    let w = basepoint.unwrap_or_else(|| graph.vertices_in_order()[0]);
    let dm = DistanceMatrix::new(graph);
    let doubled = doubled_delta_at(&dm, w);
    let all = all_basepoints.then(|| {
        (0..graph.vertex_count())
            .map(|b| doubled_delta_at(&dm, b))
            .max()
            .unwrap_or(0) as f64
            / 2.0
    });
    Ok(HyperbolicityEstimate {
        delta: doubled as f64 / 2.0,
        delta_doubled: doubled,
        basepoint: graph.id(w).to_string(),
        method: "four-point",
        vertices: graph.vertex_count(),
        delta_all_basepoints: all,
    })
}

/// Two-sided distortion bounds for a vertex map `q: Γ → Δ`:
/// `d_Δ(qx, qy) ≤ upper_factor · d_Γ(x, y) + upper_add`,
/// `d_Γ(x, y) ≤ lower_factor · d_Δ(qx, qy) + lower_add`,
/// and every target vertex within `density` of the image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct QiBounds {
    pub upper_factor: usize,
    pub upper_add: usize,
    pub lower_factor: usize,
    pub lower_add: usize,
    pub density: Option<usize>,
}

impl QiBounds {
    /// The `(L, C)`-quasi-isometry conditions:
    /// `d_Γ/L − C ≤ d_Δ ≤ L·d_Γ + C` and `C`-dense image.
    pub fn standard(l: usize, c: usize) -> Self {
        QiBounds {
            upper_factor: l,
            upper_add: c,
            lower_factor: l,
            lower_add: l * c,
            density: Some(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct QiViolation {
    /// `upper`, `lower` or `density`.
    pub kind: &'static str,
    pub x: String,
    pub y: String,
    pub domain_distance: Dist,
    pub target_distance: Dist,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct QIWitness {
    pub bounds: QiBounds,
    pub pairs_checked: usize,
    pub targets_checked: usize,
    pub violations: usize,
    pub first_violation: Option<QiViolation>,
    pub pass: bool,
}

/// Exhaustively checks `bounds` for `q` (domain index → target index) over all
/// unordered pairs of in-scope domain vertices and all in-scope target vertices.
pub fn qi_check(
    q: &[usize],
    domain: &SimplicialGraph,
    target: &SimplicialGraph,
    bounds: QiBounds,
    domain_scope: Option<&[bool]>,
    target_scope: Option<&[bool]>,
) -> Result<QIWitness> {
    if q.len() != domain.vertex_count() {
        return Err(Error::Precondition(
            "vertex map must be total on the domain".into(),
        ));
    }
    if let Some(&bad) = q.iter().find(|&&t| t >= target.vertex_count()) {
        return Err(Error::Precondition(format!(
            "vertex map hits unknown target index {bad}"
        )));
    }
    let mut xs: Vec<usize> = domain
        .vertices_in_order()
        .into_iter()
        .filter(|&x| domain_scope.is_none_or(|s| s[x]))
        .collect();
    xs.dedup();
    let per_x: Vec<(usize, usize, Option<QiViolation>)> = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let dg = bfs(domain, x, None);
            let dd = bfs(target, q[x], None);
            let mut count = 0;
            let mut first = None;
            let mut checked = 0;
            for &y in &xs[i + 1..] {
                checked += 1;
                let a = Dist::from_raw(dg[y]);
                let b = Dist::from_raw(dd[q[y]]);
                let kind = if b > a.affine(bounds.upper_factor, bounds.upper_add) {
                    Some("upper")
                } else if a > b.affine(bounds.lower_factor, bounds.lower_add) {
                    Some("lower")
                } else {
                    None
                };
                if let Some(kind) = kind {
                    count += 1;
                    first.get_or_insert_with(|| QiViolation {
                        kind,
                        x: domain.id(x).to_string(),
                        y: domain.id(y).to_string(),
                        domain_distance: a,
                        target_distance: b,
                    });
                }
            }
            (checked, count, first)
        })
        .collect();
    let pairs_checked = per_x.iter().map(|p| p.0).sum();
    let mut violations: usize = per_x.iter().map(|p| p.1).sum();
    let mut first_violation = per_x.into_iter().find_map(|p| p.2);

    let mut targets_checked = 0;
    if let Some(radius) = bounds.density {
        let image: Vec<usize> = xs.iter().map(|&x| q[x]).collect();
        let near = bfs_multi(target, &image, None);
        for t in target.vertices_in_order() {
            if !target_scope.is_none_or(|s| s[t]) {
                continue;
            }
            targets_checked += 1;
            let d = Dist::from_raw(near[t]);
            if d > Dist::Finite(radius) {
                violations += 1;
                first_violation.get_or_insert_with(|| QiViolation {
                    kind: "density",
                    x: target.id(t).to_string(),
                    y: String::new(),
                    domain_distance: Dist::Finite(0),
                    target_distance: d,
                });
            }
        }
    }
    Ok(QIWitness {
        bounds,
        pairs_checked,
        targets_checked,
        violations,
        first_violation,
        pass: violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(ids: &[&str], edges: &[(&str, &str)]) -> SimplicialGraph {
        SimplicialGraph::from_named_edges(
            ids.iter().map(|s| s.to_string()).collect(),
            &edges
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn cycle(n: usize) -> SimplicialGraph {
        let ids = (0..n).map(|i| format!("c{i}")).collect();
        SimplicialGraph::new(ids, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn c4() -> SimplicialGraph {
        named(
            &["a", "b", "c", "d"],
            &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")],
        )
    }

    #[test]
    fn path_distances() {
        let g = named(&["x", "y", "z", "w"], &[("x", "y"), ("y", "z")]);
        assert_eq!(path_distance(&g, 0, 0), Dist::Finite(0));
        assert_eq!(path_distance(&g, 0, 1), Dist::Finite(1));
        assert_eq!(path_distance(&g, 0, 3), Dist::Infinite);
    }

    #[test]
    fn angle_examples() {
        let k3 = named(&["v", "x", "y"], &[("v", "x"), ("x", "y"), ("v", "y")]);
        assert_eq!(angle_distance(&k3, 0, 1, 2).unwrap(), Dist::Finite(1));
        let g = c4();
        assert_eq!(angle_distance(&g, 1, 0, 2).unwrap(), Dist::Finite(2));
        let star = named(
            &["c", "l1", "l2", "l3"],
            &[("c", "l1"), ("c", "l2"), ("c", "l3")],
        );
        assert_eq!(angle_distance(&star, 0, 1, 2).unwrap(), Dist::Infinite);
        assert!(angle_distance(&g, 1, 0, 3).is_err());
    }

    #[test]
    fn escaping_examples() {
        let k3 = named(&["u", "v", "w"], &[("u", "v"), ("v", "w"), ("u", "w")]);
        assert_eq!(escaping_set(&k3, 0, 1, 1).unwrap().members, vec![1]);
        let g = c4();
        assert!(escaping_set(&g, 0, 2, 1).unwrap().is_empty());
        let e = escaping_set(&g, 0, 2, 2).unwrap();
        assert_eq!(e.members, vec![1, 3]);
        assert_eq!(e.witnesses, vec![vec![0, 1, 2], vec![0, 3, 2]]);
        assert!(escaping_set(&g, 0, 0, 2).is_err());
    }

    #[test]
    fn least_geodesic_breaks_ties_by_id() {
        let g = c4();
        assert_eq!(geodesic(&g, 0, 2, None).unwrap(), vec![0, 1, 2]);
        assert_eq!(geodesic(&g, 0, 2, Some(1)).unwrap(), vec![0, 3, 2]);
        assert_eq!(geodesic(&g, 0, 1, Some(1)), None);
    }

    #[test]
    fn delta_of_cycles_and_trees() {
        let path = named(&["p", "q", "r", "s"], &[("p", "q"), ("q", "r"), ("r", "s")]);
        assert_eq!(
            hyperbolicity_delta(&path, None, true)
                .unwrap()
                .delta_doubled,
            0
        );
        let c8 = hyperbolicity_delta(&cycle(8), None, true).unwrap();
        assert_eq!(c8.delta, 2.0);
        assert_eq!(c8.delta_all_basepoints, Some(2.0));
        let disconnected = named(&["a", "b"], &[]);
        assert!(hyperbolicity_delta(&disconnected, None, false).is_err());
    }

    #[test]
    fn qi_identity_and_collapse() {
        let g = cycle(10);
        let id: Vec<usize> = (0..10).collect();
        assert!(
            qi_check(&id, &g, &g, QiBounds::standard(1, 0), None, None)
                .unwrap()
                .pass
        );
        let point = named(&["p"], &[]);
        let w = qi_check(&[0; 10], &g, &point, QiBounds::standard(1, 1), None, None).unwrap();
        assert!(!w.pass);
        let v = w.first_violation.unwrap();
        assert_eq!(v.kind, "lower");
        assert_eq!((v.x.as_str(), v.y.as_str()), ("c0", "c2"));
    }

    #[test]
    fn fineness_probe_on_a_constant_family() {
        let g = cycle(6);
        let p = fineness_probe(&[(1, &g), (2, &g)], "c0", 3).unwrap();
        assert_eq!(p.verdict, Stability::Stable);
        assert_eq!(p.rows.len(), 6);
        assert_eq!(p.center, "c1");
        assert_eq!(p.rows[0].angle_ball, 1);
        assert_eq!(p.rows[2].angle_ball, 1);
    }

    #[test]
    fn dist_serializes_infinity_as_text() {
        assert_eq!(
            serde_json::to_string(&Dist::Infinite).unwrap(),
            "\"infinity\""
        );
        assert_eq!(serde_json::to_string(&Dist::Finite(3)).unwrap(), "3");
    }
}
