//! Graphs with a (possibly partial) group action over a window: orbits,
//! stabilizers, edge-orbit attachment and (G,H)-graph validation.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::SimplicialGraph;
use crate::group::{Element, Group, Subgroup, Window};
use crate::metrics::{fineness_probe, hyperbolicity_delta, HyperbolicityEstimate, Stability};

const OUT: u32 = u32::MAX;

/// Partial vertex permutations, one per window element.
#[derive(Clone, Debug)]
pub struct GroupAction {
    group: Arc<Group>,
    window: Arc<Window>,
    /// `images[i][v]` is `g_i . v`, or `OUT` when it leaves the graph.
    images: Vec<Vec<u32>>,
}

impl GroupAction {
    /// Tabulates `f(window index, vertex)`.
    pub fn from_fn(
        group: Arc<Group>,
        window: Arc<Window>,
        vertex_count: usize,
        f: impl Fn(usize, usize) -> Option<usize>,
    ) -> Self {
        let images = (0..window.len())
            .map(|i| {
                (0..vertex_count)
                    .map(|v| f(i, v).map_or(OUT, |w| w as u32))
                    .collect()
            })
            .collect();
        GroupAction {
            group,
            window,
            images,
        }
    }

    pub fn trivial(group: Arc<Group>, window: Arc<Window>, vertex_count: usize) -> Self {
        GroupAction::from_fn(group, window, vertex_count, |_, v| Some(v))
    }

    /// Extends generator maps along shortlex words: for `g = p·x` with `p` the
    /// shortlex prefix, `g.v = p.(x.v)`.
    pub fn from_generator_maps(
        group: Arc<Group>,
        window: Arc<Window>,
        vertex_count: usize,
        maps: &[Vec<Option<usize>>],
    ) -> Result<Self> {
        if maps.len() != group.generators().len() {
            return Err(Error::invalid(format!(
                "action lists {} generator maps, group has {} generators",
                maps.len(),
                group.generators().len()
            )));
        }
        let mut letter_maps = Vec::with_capacity(2 * maps.len());
        for (i, m) in maps.iter().enumerate() {
            if m.len() != vertex_count {
                return Err(Error::invalid(format!(
                    "generator map {i} has wrong length"
                )));
            }
            let mut inv = vec![None; vertex_count];
            for (v, w) in m.iter().enumerate() {
                if let Some(w) = *w {
                    if w >= vertex_count || inv[w].is_some() {
                        return Err(Error::invalid(format!(
                            "generator `{}` does not act injectively",
                            group.generator_names()[i]
                        )));
                    }
                    inv[w] = Some(v);
                }
            }
            letter_maps.push(m.clone());
            letter_maps.push(inv);
        }
        let mut images: Vec<Vec<u32>> = Vec::with_capacity(window.len());
        for i in 0..window.len() {
            let row = match window.parent(i) {
                None => (0..vertex_count as u32).collect(),
                Some((p, l)) => (0..vertex_count)
                    .map(|v| match letter_maps[l][v] {
                        Some(x) => images[p][x],
                        None => OUT,
                    })
                    .collect(),
            };
            images.push(row);
        }
        Ok(GroupAction {
            group,
            window,
            images,
        })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn vertex_count(&self) -> usize {
        self.images.first().map_or(0, Vec::len)
    }

    /// `g_i . v` for window index `i`.
    pub fn image(&self, i: usize, v: usize) -> Option<usize> {
        let w = self.images[i][v];
        (w != OUT).then_some(w as usize)
    }

    /// `g . v`; elements outside the window are a window-exceeded error.
    pub fn apply(&self, g: &Element, v: usize) -> Result<Option<usize>> {
        let i = self.window.index_of(g).ok_or_else(|| {
            Error::WindowExceeded(format!(
                "`{}` is outside the window",
                self.group.format_element(g)
            ))
        })?;
        Ok(self.image(i, v))
    }

    /// Same action with extra vertices appended; `f(i, v)` gives images of new vertices.
    pub fn extended(&self, extra: usize, f: impl Fn(usize, usize) -> Option<usize>) -> Self {
        let n = self.vertex_count();
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut row = row.clone();
                row.extend((n..n + extra).map(|v| f(i, v).map_or(OUT, |w| w as u32)));
                row
            })
            .collect();
        GroupAction {
            group: self.group.clone(),
            window: self.window.clone(),
            images,
        }
    }

    /// True when every window element maps every vertex into the graph.
    pub fn is_total(&self) -> bool {
        self.images.iter().all(|row| row.iter().all(|&w| w != OUT))
    }

    /// Checks the action axioms on the window: identity acts trivially, each
    /// element is injective, `(gx).v = g.(x.v)` for generator letters `x`, and
    /// edges go to edges.
    pub fn validate(&self, graph: &SimplicialGraph) -> Result<()> {
        let n = graph.vertex_count();
        if self.vertex_count() != n {
            return Err(Error::invalid(
                "action and graph have different vertex counts",
            ));
        }
        if self.images[0]
            .iter()
            .enumerate()
            .any(|(v, &w)| w as usize != v)
        {
            return Err(Error::invalid("identity does not act trivially"));
        }
        let letters: Vec<Element> = (0..self.group.letter_count())
            .map(|l| self.group.letter_element(l))
            .collect();
        let letter_index: Vec<Option<usize>> =
            letters.iter().map(|x| self.window.index_of(x)).collect();
        let edges = graph.edges();
        for (i, g) in self.window.elements().iter().enumerate() {
            let row = &self.images[i];
            let mut seen = vec![false; n];
            for &w in row.iter().filter(|&&w| w != OUT) {
                if std::mem::replace(&mut seen[w as usize], true) {
                    return Err(Error::invalid(format!(
                        "`{}` is not injective on vertices",
                        self.group.format_element(g)
                    )));
                }
            }
            for (x, xi) in letters.iter().zip(&letter_index) {
                let (Some(xi), Some(gx)) = (xi, self.window.index_of(&self.group.multiply(g, x)))
                else {
                    continue;
                };
                for v in 0..n {
                    let via = self.images[*xi][v];
                    if via == OUT
                        || self.images[i][via as usize] == OUT
                        || self.images[gx][v] == OUT
                    {
                        continue;
                    }
                    if self.images[i][via as usize] != self.images[gx][v] {
                        return Err(Error::invalid(format!(
                            "action is not compatible with multiplication at `{}`·`{}` on `{}`",
                            self.group.format_element(g),
                            self.group.format_element(x),
                            graph.id(v)
                        )));
                    }
                }
            }
            for &(a, b) in &edges {
                let (ga, gb) = (row[a], row[b]);
                if ga != OUT && gb != OUT && !graph.has_edge(ga as usize, gb as usize) {
                    return Err(Error::invalid(format!(
                        "`{}` maps edge {{{}, {}}} to a non-edge",
                        self.group.format_element(g),
                        graph.id(a),
                        graph.id(b)
                    )));
                }
            }
        }
        Ok(())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Vertex and edge orbits as seen through the window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    /// Orbit label of each vertex; labels follow the shortlex order of representatives.
    pub vertex_orbit: Vec<usize>,
    /// Shortlex-least vertex of each orbit.
    pub vertex_reps: Vec<usize>,
    /// Orbit label of each edge of `graph.edges()`, in that order.
    pub edge_orbit: Vec<usize>,
    /// Least edge (by endpoint ranks) of each edge orbit.
    pub edge_reps: Vec<(usize, usize)>,
    /// Some window element sends a vertex outside the graph.
    pub truncated: bool,
}

impl OrbitDecomposition {
    pub fn vertex_orbit_count(&self) -> usize {
        self.vertex_reps.len()
    }

    pub fn edge_orbit_count(&self) -> usize {
        self.edge_reps.len()
    }
}

fn relabel(uf: &mut UnionFind, order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let n = uf.0.len();
    let mut label = vec![usize::MAX; n];
    let mut root_label: HashMap<usize, usize> = HashMap::new();
    let mut reps = Vec::new();
    for &x in order {
        let r = uf.find(x);
        let l = *root_label.entry(r).or_insert_with(|| {
            reps.push(x);
            reps.len() - 1
        });
        label[x] = l;
    }
    (label, reps)
}

pub fn orbit_decomposition(graph: &SimplicialGraph, act: &GroupAction) -> OrbitDecomposition {
    let n = graph.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut truncated = false;
    for row in &act.images {
        for (v, &w) in row.iter().enumerate() {
            if w == OUT {
                truncated = true;
            } else {
                uf.union(v, w as usize);
            }
        }
    }
    let (vertex_orbit, vertex_reps) = relabel(&mut uf, &graph.vertices_in_order());

    let edges = graph.edges();
    let edge_index: HashMap<(usize, usize), usize> = edges
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| ((a.min(b), a.max(b)), i))
        .collect();
    let mut ef = UnionFind::new(edges.len());
    for row in &act.images {
        for (i, &(a, b)) in edges.iter().enumerate() {
            let (ga, gb) = (row[a], row[b]);
            if ga == OUT || gb == OUT {
                continue;
            }
            let (ga, gb) = (ga as usize, gb as usize);
            if let Some(&j) = edge_index.get(&(ga.min(gb), ga.max(gb))) {
                ef.union(i, j);
            }
        }
    }
    let order: Vec<usize> = (0..edges.len()).collect();
    let (edge_orbit, edge_rep_idx) = relabel(&mut ef, &order);
    let edge_reps = edge_rep_idx.into_iter().map(|i| edges[i]).collect();
    OrbitDecomposition {
        vertex_orbit,
        vertex_reps,
        edge_orbit,
        edge_reps,
        truncated,
    }
}

/// Window elements fixing a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilizer {
    /// Window indices, in shortlex order.
    pub elements: Vec<usize>,
    /// The window does not exhaust the group.
    pub truncated: bool,
}

impl Stabilizer {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub fn stabilizer(act: &GroupAction, v: usize) -> Stabilizer {
    let elements = (0..act.window.len())
        .filter(|&i| act.images[i][v] == v as u32)
        .collect();
    Stabilizer {
        elements,
        truncated: !act.window.is_complete(),
    }
}

/// Window elements preserving the edge `{a, b}` setwise.
pub fn edge_stabilizer(act: &GroupAction, a: usize, b: usize) -> Stabilizer {
    let (a32, b32) = (a as u32, b as u32);
    let elements = (0..act.window.len())
        .filter(|&i| {
            let (x, y) = (act.images[i][a], act.images[i][b]);
            (x == a32 && y == b32) || (x == b32 && y == a32)
        })
        .collect();
    Stabilizer {
        elements,
        truncated: !act.window.is_complete(),
    }
}

/// Result of adding the orbit of the edge `{u, v}`.
#[derive(Clone, Debug)]
pub struct Attachment {
    pub graph: SimplicialGraph,
    pub representative: (usize, usize),
    /// Edges of the orbit not already present, by endpoint ranks.
    pub new_edges: Vec<(usize, usize)>,
    /// Window indices of elements moving `u` or `v` outside the graph.
    pub dropped: Vec<usize>,
    /// `T_aΓ′ − T_aΓ` for every vertex `a`, in shortlex order.
    pub new_neighbors: Vec<Vec<usize>>,
}

/// Adds `{g.u, g.v}` for every window element `g`.
pub fn attach_edge_orbit(
    graph: &SimplicialGraph,
    act: &GroupAction,
    u: usize,
    v: usize,
) -> Result<Attachment> {
    if u == v {
        return Err(Error::Precondition(
            "attachment needs distinct endpoints".into(),
        ));
    }
    if graph.has_edge(u, v) {
        return Err(Error::Precondition(format!(
            "{{{}, {}}} is already an edge",
            graph.id(u),
            graph.id(v)
        )));
    }
    let mut extra = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..act.window.len() {
        match (act.image(i, u), act.image(i, v)) {
            (Some(a), Some(b)) => {
                if !graph.has_edge(a, b) {
                    extra.push(if graph.rank(a) < graph.rank(b) {
                        (a, b)
                    } else {
                        (b, a)
                    });
                }
            }
            _ => dropped.push(i),
        }
    }
    extra.sort_by_key(|&(a, b)| (graph.rank(a), graph.rank(b)));
    extra.dedup();
    let new_graph = graph.with_edges(extra.iter().copied())?;
    let mut new_neighbors = vec![Vec::new(); graph.vertex_count()];
    for &(a, b) in &extra {
        new_neighbors[a].push(b);
        new_neighbors[b].push(a);
    }
    for list in &mut new_neighbors {
        list.sort_by_key(|&x| graph.rank(x));
    }
    Ok(Attachment {
        graph: new_graph,
        representative: (u, v),
        new_edges: extra,
        dropped,
        new_neighbors,
    })
}

impl Attachment {
    /// Partition of `T_aΓ′ − T_aΓ` into orbits of the window stabilizer of `a`.
    pub fn new_neighbor_orbits(&self, act: &GroupAction, a: usize) -> Vec<Vec<usize>> {
        let d = &self.new_neighbors[a];
        if d.is_empty() {
            return Vec::new();
        }
        let pos: HashMap<usize, usize> = d.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut uf = UnionFind::new(d.len());
        for g in stabilizer(act, a).elements {
            for (i, &x) in d.iter().enumerate() {
                if let Some(j) = act.image(g, x).and_then(|y| pos.get(&y)) {
                    uf.union(i, *j);
                }
            }
        }
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..d.len() {
            let r = uf.find(i);
            classes.entry(r).or_default().push(d[i]);
        }
        classes.into_values().collect()
    }

    /// Largest number of new-neighbor orbits at any vertex, with that vertex.
    pub fn max_new_neighbor_orbits(&self, act: &GroupAction) -> (usize, Option<usize>) {
        let mut best = (0, None);
        for a in self.graph.vertices_in_order() {
            let c = self.new_neighbor_orbits(act, a).len();
            if c > best.0 {
                best = (c, Some(a));
            }
        }
        best
    }

    pub fn record(&self, act: &GroupAction) -> AttachmentRecord {
        let g = &self.graph;
        let (max_orbits, at) = self.max_new_neighbor_orbits(act);
        AttachmentRecord {
            representative: (
                g.id(self.representative.0).to_string(),
                g.id(self.representative.1).to_string(),
            ),
            new_edges: self.new_edges.len(),
            dropped: self
                .dropped
                .iter()
                .map(|&i| act.group.format_element(act.window.element(i)))
                .collect(),
            max_new_neighbor_orbits: max_orbits,
            max_at: at.map(|a| g.id(a).to_string()),
        }
    }
}

/// Summary of one attachment, as kept in validation reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct AttachmentRecord {
    pub representative: (String, String),
    pub new_edges: usize,
    /// Elements whose translate of the representative left the window.
    pub dropped: Vec<String>,
    pub max_new_neighbor_orbits: usize,
    pub max_at: Option<String>,
}

/// Declared stabilizer type of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilizerTag {
    Finite,
    /// Stabilizer equal to `H`.
    H,
    /// Stabilizer a conjugate of `H`.
    ConjH,
}

/// A graph with an action and optional per-vertex stabilizer declarations.
#[derive(Clone, Debug)]
pub struct GGraph {
    pub graph: SimplicialGraph,
    pub action: GroupAction,
    pub declared: Vec<Option<StabilizerTag>>,
}

impl GGraph {
    pub fn new(graph: SimplicialGraph, action: GroupAction) -> Self {
        let declared = vec![None; graph.vertex_count()];
        GGraph {
            graph,
            action,
            declared,
        }
    }

    pub fn with_declared(mut self, declared: Vec<Option<StabilizerTag>>) -> Self {
        self.declared = declared;
        self
    }

    /// Vertices declared to have infinite stabilizer.
    pub fn infinite_stabilizer_vertices(&self) -> Vec<usize> {
        self.graph
            .vertices_in_order()
            .into_iter()
            .filter(|&v| {
                matches!(
                    self.declared[v],
                    Some(StabilizerTag::H | StabilizerTag::ConjH)
                )
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    WindowInconclusive,
    Fail,
}

impl Verdict {
    /// The worse of two verdicts.
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::WindowInconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ItemReport {
    pub item: u8,
    pub property: &'static str,
    pub verdict: Verdict,
    pub evidence: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GHGraphReport {
    pub items: Vec<ItemReport>,
    /// Four-point δ of the largest window; an estimate that never decides item 1.
    pub hyperbolicity: Option<HyperbolicityEstimate>,
    pub hyperbolicity_verdict: Verdict,
    /// Vertices with (declared) infinite stabilizer.
    pub v_infinity: Vec<String>,
    pub vertex_orbit_representatives: Vec<String>,
    pub attachments: Vec<AttachmentRecord>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct ValidateOptions {
    pub k_max: usize,
    /// Skip the δ estimate above this many vertices.
    pub delta_vertex_limit: usize,
    pub attachments: Vec<AttachmentRecord>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            k_max: 3,
            delta_vertex_limit: 800,
            attachments: Vec::new(),
        }
    }
}

fn elements_json(act: &GroupAction, idx: &[usize]) -> Vec<String> {
    idx.iter()
        .map(|&i| act.group.format_element(act.window.element(i)))
        .collect()
}

/// Window indices of `H ∩ window`.
fn subgroup_in_window(act: &GroupAction, h: &Subgroup) -> Vec<usize> {
    (0..act.window.len())
        .filter(|&i| h.contains(act.window.element(i)))
        .collect()
}

/// Is the finite subgroup `s` (window indices) a conjugate of `h`?
fn is_conjugate_of(act: &GroupAction, s: &[usize], h_idx: &[usize]) -> bool {
    if s.len() != h_idx.len() {
        return false;
    }
    let group = &act.group;
    let mut target: Vec<&Element> = s.iter().map(|&i| act.window.element(i)).collect();
    target.sort();
    act.window.elements().iter().any(|g| {
        let gi = group.invert(g);
        let mut conj: Vec<Element> = h_idx
            .iter()
            .map(|&i| group.multiply(&group.multiply(g, act.window.element(i)), &gi))
            .collect();
        conj.sort();
        conj.iter().zip(&target).all(|(a, b)| a == *b)
    })
}

/// Heuristic finiteness evidence for a windowed stabilizer: it did not change
/// between the last two windows, or (with one window) stays within half the radius.
fn windowed_finiteness(
    current: &Stabilizer,
    previous: Option<&Stabilizer>,
    window: &Window,
) -> Verdict {
    match previous {
        Some(p) if p.len() == current.len() => Verdict::Pass,
        Some(_) => Verdict::WindowInconclusive,
        None => {
            if current
                .elements
                .iter()
                .all(|&i| 2 * window.length(i) <= window.radius())
            {
                Verdict::Pass
            } else {
                Verdict::WindowInconclusive
            }
        }
    }
}

/// Checks the five (G,H)-graph conditions on a nested family of window graphs
/// (smallest first; the last is the one being validated). Finite, completely
/// enumerated groups are decided exactly; windowed evidence is reported as
/// `window-inconclusive` whenever it does not settle an item.
pub fn validate_gh_graph(
    family: &[&GGraph],
    h: &Subgroup,
    opts: &ValidateOptions,
) -> Result<GHGraphReport> {
    let gg = *family
        .last()
        .ok_or_else(|| Error::Precondition("empty graph family".into()))?;
    let prev = family.len().checked_sub(2).map(|i| family[i]);
    let graph = &gg.graph;
    let act = &gg.action;
    let complete = act.window.is_complete();
    let mut items = Vec::new();

    // (1) connected and hyperbolic
    let components = graph.component_count();
    let connected = components <= 1;
    let (hyperbolicity, hyperbolicity_verdict) = if !connected {
        (None, Verdict::Fail)
    } else if graph.vertex_count() > opts.delta_vertex_limit {
        (
            None,
            if complete {
                Verdict::Pass
            } else {
                Verdict::WindowInconclusive
            },
        )
    } else {
        let est = hyperbolicity_delta(graph, None, false)?;
        (
            Some(est),
            if complete {
                Verdict::Pass
            } else {
                Verdict::WindowInconclusive
            },
        )
    };
    items.push(ItemReport {
        item: 1,
        property: "connected and hyperbolic",
        verdict: if connected {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        evidence: json!({
            "components": components,
            "delta": hyperbolicity.as_ref().map(|e| e.delta),
            "hyperbolicity": hyperbolicity_verdict,
        }),
    });

    // (2) finitely many vertex orbits
    let orbits = orbit_decomposition(graph, act);
    let count = orbits.vertex_orbit_count();
    let prev_orbits = prev.map(|p| orbit_decomposition(&p.graph, &p.action));
    let v2 = if complete {
        Verdict::Pass
    } else {
        match &prev_orbits {
            Some(p) if p.vertex_orbit_count() == count => Verdict::Pass,
            _ => Verdict::WindowInconclusive,
        }
    };
    items.push(ItemReport {
        item: 2,
        property: "finitely many vertex orbits",
        verdict: v2,
        evidence: json!({
            "vertex-orbits": count,
            "previous-window-vertex-orbits": prev_orbits.as_ref().map(|p| p.vertex_orbit_count()),
            "truncated": orbits.truncated,
        }),
    });

    // (3) vertex stabilizers finite or conjugate to H; some vertex fixed by exactly H
    let h_idx = subgroup_in_window(act, h);
    let mut v3 = Verdict::Pass;
    let mut rows = Vec::new();
    let mut exact_h = Vec::new();
    for &r in &orbits.vertex_reps {
        let st = stabilizer(act, r);
        let declared = gg.declared[r];
        let equals_h = st.elements == h_idx;
        if equals_h {
            exact_h.push(r);
        }
        let verdict = if complete {
            match declared {
                Some(StabilizerTag::H) if !equals_h => Verdict::Fail,
                Some(StabilizerTag::ConjH) if !is_conjugate_of(act, &st.elements, &h_idx) => {
                    Verdict::Fail
                }
                _ => Verdict::Pass,
            }
        } else {
            match declared {
                Some(StabilizerTag::H) if !equals_h => Verdict::Fail,
                Some(StabilizerTag::H | StabilizerTag::ConjH) => Verdict::Pass,
                _ => {
                    let p = prev.and_then(|p| {
                        p.graph
                            .index_of(graph.id(r))
                            .map(|pr| stabilizer(&p.action, pr))
                    });
                    windowed_finiteness(&st, p.as_ref(), &act.window)
                }
            }
        };
        v3 = v3.and(verdict);
        rows.push(json!({
            "vertex": graph.id(r),
            "declared": declared,
            "stabilizer-in-window": elements_json(act, &st.elements),
            "verdict": verdict,
        }));
    }
    // non-representative vertices declared `h` must also be fixed by exactly H
    for v in 0..graph.vertex_count() {
        if gg.declared[v] == Some(StabilizerTag::H) && !orbits.vertex_reps.contains(&v) {
            let st = stabilizer(act, v);
            if st.elements != h_idx {
                v3 = Verdict::Fail;
                rows.push(json!({
                    "vertex": graph.id(v),
                    "declared": "h",
                    "stabilizer-in-window": elements_json(act, &st.elements),
                    "verdict": Verdict::Fail,
                }));
            } else {
                exact_h.push(v);
            }
        }
    }
    let has_h_vertex = !exact_h.is_empty();
    let existence = if has_h_vertex {
        Verdict::Pass
    } else if complete {
        Verdict::Fail
    } else {
        Verdict::WindowInconclusive
    };
    v3 = v3.and(existence);
    items.push(ItemReport {
        item: 3,
        property: "vertex stabilizers finite or conjugate to H, one equal to H",
        verdict: v3,
        evidence: json!({
            "representatives": rows,
            "vertices-with-stabilizer-h": exact_h.iter().map(|&v| graph.id(v)).collect::<Vec<_>>(),
            "declared-trust-boundary": !complete,
        }),
    });

    // (4) finite edge stabilizers
    let mut v4 = Verdict::Pass;
    let mut edge_rows = Vec::new();
    for &(a, b) in &orbits.edge_reps {
        let st = edge_stabilizer(act, a, b);
        let verdict = if complete {
            Verdict::Pass
        } else {
            let p = prev.and_then(|p| {
                let pa = p.graph.index_of(graph.id(a))?;
                let pb = p.graph.index_of(graph.id(b))?;
                Some(edge_stabilizer(&p.action, pa, pb))
            });
            windowed_finiteness(&st, p.as_ref(), &act.window)
        };
        v4 = v4.and(verdict);
        edge_rows.push(json!({
            "edge": [graph.id(a), graph.id(b)],
            "stabilizer-in-window": elements_json(act, &st.elements),
            "verdict": verdict,
        }));
    }
    items.push(ItemReport {
        item: 4,
        property: "finite edge stabilizers",
        verdict: v4,
        evidence: json!({ "edge-orbits": edge_rows }),
    });

    // (5) fine at vertices with infinite stabilizer
    let v_inf = gg.infinite_stabilizer_vertices();
    let mut probe_vertices: Vec<usize> = Vec::new();
    let mut seen_orbits = Vec::new();
    for &v in &v_inf {
        let o = orbits.vertex_orbit[v];
        if !seen_orbits.contains(&o) {
            seen_orbits.push(o);
            probe_vertices.push(v);
        }
    }
    let mut v5 = Verdict::Pass;
    let mut probes = Vec::new();
    let graphs: Vec<(usize, &SimplicialGraph)> = family
        .iter()
        .map(|g| (g.action.window.radius(), &g.graph))
        .collect();
    for &v in &probe_vertices {
        if complete {
            // finite graphs are fine everywhere
            probes.push(json!({ "vertex": graph.id(v), "finite-graph": true }));
            continue;
        }
        let id = graph.id(v);
        let members: Vec<(usize, &SimplicialGraph)> = graphs
            .iter()
            .copied()
            .filter(|(_, g)| g.index_of(id).is_some())
            .collect();
        let verdict = if members.len() < 2 {
            probes.push(json!({ "vertex": id, "windows": members.len() }));
            Verdict::WindowInconclusive
        } else {
            let probe = fineness_probe(&members, id, opts.k_max)?;
            let verdict = match probe.verdict {
                Stability::Stable => Verdict::Pass,
                Stability::Growing => Verdict::WindowInconclusive,
            };
            probes.push(serde_json::to_value(&probe)?);
            verdict
        };
        v5 = v5.and(verdict);
    }
    items.push(ItemReport {
        item: 5,
        property: "fine at vertices with infinite stabilizer",
        verdict: v5,
        evidence: json!({ "probes": probes }),
    });

    let verdict = items
        .iter()
        .fold(Verdict::Pass, |acc, it| acc.and(it.verdict));
    Ok(GHGraphReport {
        items,
        hyperbolicity,
        hyperbolicity_verdict,
        v_infinity: v_inf.iter().map(|&v| graph.id(v).to_string()).collect(),
        vertex_orbit_representatives: orbits
            .vertex_reps
            .iter()
            .map(|&v| graph.id(v).to_string())
            .collect(),
        attachments: opts.attachments.clone(),
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_CAP;

    fn cycle(n: usize) -> SimplicialGraph {
        let ids = (0..n).map(|i| format!("v{i}")).collect();
        SimplicialGraph::new(ids, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// `Z/m` rotating `C_n` by `n/m` steps.
    fn rotation(n: usize, m: usize) -> (SimplicialGraph, GroupAction) {
        let group = Arc::new(Group::cyclic(m, "t").unwrap());
        let window = Arc::new(group.full_window(DEFAULT_CAP).unwrap());
        let step = n / m;
        let maps = vec![(0..n).map(|v| Some((v + step) % n)).collect()];
        let act = GroupAction::from_generator_maps(group, window, n, &maps).unwrap();
        (cycle(n), act)
    }

    fn s3_star() -> (SimplicialGraph, GroupAction) {
        let group = Arc::new(
            Group::permutation(
                3,
                vec![("s".into(), vec![1, 0, 2]), ("r".into(), vec![1, 2, 0])],
            )
            .unwrap(),
        );
        let window = Arc::new(group.full_window(DEFAULT_CAP).unwrap());
        let ids = vec!["c".to_string(), "l1".into(), "l2".into(), "l3".into()];
        let g = SimplicialGraph::new(ids, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let act = GroupAction::from_fn(group, window.clone(), 4, |i, v| {
            if v == 0 {
                return Some(0);
            }
            match window.element(i) {
                Element::Perm(p) => Some(1 + p[v - 1] as usize),
                _ => None,
            }
        });
        (g, act)
    }

    #[test]
    fn rotation_orbits() {
        let (g, act) = rotation(4, 4);
        act.validate(&g).unwrap();
        let o = orbit_decomposition(&g, &act);
        assert_eq!((o.vertex_orbit_count(), o.edge_orbit_count()), (1, 1));
        let (g6, act6) = rotation(6, 3);
        assert_eq!(orbit_decomposition(&g6, &act6).vertex_orbit_count(), 2);
        let trivial = GroupAction::trivial(act.group().clone(), act.window().clone(), 4);
        assert_eq!(orbit_decomposition(&g, &trivial).vertex_orbit_count(), 4);
    }

    #[test]
    fn stabilizers() {
        let (g, act) = rotation(4, 4);
        assert_eq!(stabilizer(&act, 2).elements, vec![0]);
        let (star, sact) = s3_star();
        sact.validate(&star).unwrap();
        assert_eq!(stabilizer(&sact, 0).len(), 6);
        assert_eq!(stabilizer(&sact, 1).len(), 2);
        assert!(!stabilizer(&sact, 1).truncated);
        let _ = g;
    }

    #[test]
    fn attachment_on_rotated_square() {
        let (g, act) = rotation(4, 4);
        let att = attach_edge_orbit(&g, &act, 0, 2).unwrap();
        assert_eq!(att.new_edges, vec![(0, 2), (1, 3)]);
        assert!(att.dropped.is_empty());
        let o = orbit_decomposition(&att.graph, &act);
        assert_eq!(o.edge_orbit_count(), 2);
        assert!(attach_edge_orbit(&g, &act, 0, 1).is_err());
        assert!(attach_edge_orbit(&g, &act, 0, 0).is_err());
        let trivial = GroupAction::trivial(act.group().clone(), act.window().clone(), 4);
        assert_eq!(
            attach_edge_orbit(&g, &trivial, 0, 2)
                .unwrap()
                .new_edges
                .len(),
            1
        );
    }

    #[test]
    fn invalid_actions_are_rejected() {
        let (g, act) = rotation(4, 4);
        let bad = vec![vec![Some(1), Some(0), Some(2), Some(3)]];
        let not_auto =
            GroupAction::from_generator_maps(act.group().clone(), act.window().clone(), 4, &bad)
                .unwrap();
        assert!(not_auto.validate(&g).is_err());
        let collide = vec![vec![Some(1), Some(1), Some(2), Some(3)]];
        assert!(GroupAction::from_generator_maps(
            act.group().clone(),
            act.window().clone(),
            4,
            &collide
        )
        .is_err());
    }

    #[test]
    fn disconnected_graph_fails_item_one() {
        let (g, act) = rotation(4, 2);
        let two = SimplicialGraph::new(g.ids().to_vec(), [(0, 1), (2, 3)]).unwrap();
        let gg = GGraph::new(two, act.clone());
        let h = Subgroup::trivial(act.group());
        let r = validate_gh_graph(&[&gg], &h, &ValidateOptions::default()).unwrap();
        assert_eq!(r.items[0].verdict, Verdict::Fail);
        assert_eq!(r.verdict, Verdict::Fail);
    }
}
