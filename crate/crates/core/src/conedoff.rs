//! Coned-off Cayley graphs `Γ̂(G, H, X)`, relative Cayley multigraphs
//! `Γ(G, X ⊔ H)`, the admissible distance `d̂_H`, and the comparison checks
//! between them.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ggraph::{GGraph, GroupAction, StabilizerTag, Verdict};
use crate::graph::SimplicialGraph;
use crate::group::{closure, CosetTable, Element, Group, Subgroup, Window};
use crate::metrics::{bfs, Dist, UNREACHED};

/// Which part of `G ∪ G/H` a vertex of `Γ̂` belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// Window index of the group element.
    Group(usize),
    /// Window index of the coset representative.
    Cone(usize),
}

/// Closes `x` under inverses and drops the identity; order follows the
/// user's list with each inverse right after its element.
pub fn symmetrize(group: &Group, x: &[Element]) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::new();
    for g in x {
        for y in [g.clone(), group.invert(g)] {
            if !group.is_identity(&y) && !out.contains(&y) {
                out.push(y);
            }
        }
    }
    out
}

/// Windowed coned-off Cayley graph. Group vertices share indices with the
/// window; cone vertices follow, one per coset meeting the window.
#[derive(Clone, Debug)]
pub struct ConedOffGraph {
    pub group: Arc<Group>,
    pub subgroup: Arc<Subgroup>,
    pub window: Arc<Window>,
    pub cosets: CosetTable,
    /// `X` as given.
    pub x: Vec<Element>,
    /// `X ∪ X⁻¹` without the identity.
    pub x_closed: Vec<Element>,
    pub graph: SimplicialGraph,
    pub kinds: Vec<VertexKind>,
    cone_of_rep: HashMap<usize, usize>,
}

/// Vertex id of the cone vertex `gH`.
pub fn cone_id(group: &Group, rep: &Element) -> String {
    if group.is_identity(rep) {
        "H".to_string()
    } else {
        format!("{}H", group.format_element(rep))
    }
}

impl ConedOffGraph {
    pub fn new(
        group: Arc<Group>,
        subgroup: Arc<Subgroup>,
        x: Vec<Element>,
        window: Arc<Window>,
    ) -> Result<Self> {
        for g in &x {
            group.validate(g)?;
        }
        let x_closed = symmetrize(&group, &x);
        let cosets = CosetTable::new(&group, &subgroup, &window);
        let n = window.len();
        let mut ids: Vec<String> = window
            .elements()
            .iter()
            .map(|g| group.format_element(g))
            .collect();
        let mut kinds: Vec<VertexKind> = (0..n).map(VertexKind::Group).collect();
        let mut cone_of_rep = HashMap::new();
        for &r in cosets.representatives() {
            cone_of_rep.insert(r, ids.len());
            ids.push(cone_id(&group, window.element(r)));
            kinds.push(VertexKind::Cone(r));
        }
        let mut edges = Vec::new();
        for (i, g) in window.elements().iter().enumerate() {
            for s in &x_closed {
                if let Some(j) = window.index_of(&group.multiply(g, s)) {
                    if i < j {
                        edges.push((i, j));
                    }
                }
            }
            edges.push((i, cone_of_rep[&cosets.representative_of(i)]));
        }
        let graph = SimplicialGraph::new(ids, edges)?;
        Ok(ConedOffGraph {
            group,
            subgroup,
            window,
            cosets,
            x,
            x_closed,
            graph,
            kinds,
            cone_of_rep,
        })
    }

    /// Vertex of the cone `gH`, if that coset meets the window.
    pub fn cone_vertex(&self, g: &Element) -> Option<usize> {
        let rep = self.cosets.lookup(&self.group, &self.subgroup, g)?;
        self.cone_of_rep.get(&rep).copied()
    }

    /// Vertex of the apex `H`.
    pub fn apex(&self) -> usize {
        self.cone_of_rep[&0]
    }

    pub fn group_vertex_count(&self) -> usize {
        self.window.len()
    }

    pub fn cone_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.window.len()..self.graph.vertex_count()
    }

    /// Left multiplication, restricted to the window.
    pub fn action(&self) -> GroupAction {
        let n = self.window.len();
        GroupAction::from_fn(
            self.group.clone(),
            self.window.clone(),
            self.graph.vertex_count(),
            |i, v| {
                let g = self.window.element(i);
                match self.kinds[v] {
                    VertexKind::Group(j) => self
                        .window
                        .index_of(&self.group.multiply(g, self.window.element(j))),
                    VertexKind::Cone(r) => {
                        let v =
                            self.cone_vertex(&self.group.multiply(g, self.window.element(r)))?;
                        debug_assert!(v >= n);
                        Some(v)
                    }
                }
            },
        )
    }

    /// Declared stabilizers: group vertices finite, `H` fixed by `H`, other
    /// cones by conjugates of `H`.
    pub fn declared(&self) -> Vec<Option<StabilizerTag>> {
        let apex = self.apex();
        (0..self.graph.vertex_count())
            .map(|v| {
                Some(match self.kinds[v] {
                    VertexKind::Group(_) => StabilizerTag::Finite,
                    VertexKind::Cone(_) if v == apex => StabilizerTag::H,
                    VertexKind::Cone(_) => StabilizerTag::ConjH,
                })
            })
            .collect()
    }

    pub fn ggraph(&self) -> GGraph {
        GGraph::new(self.graph.clone(), self.action()).with_declared(self.declared())
    }
}

pub fn build_coned_off(
    group: Arc<Group>,
    subgroup: Arc<Subgroup>,
    x: Vec<Element>,
    radius: usize,
    cap: usize,
) -> Result<ConedOffGraph> {
    let window = Arc::new(group.ball(radius, cap)?);
    ConedOffGraph::new(group, subgroup, x, window)
}

/// Edge label in `Γ(G, X ⊔ H)`; the two alphabets stay formally disjoint.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelLabel {
    X(Element),
    H(Element),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelArc {
    pub to: usize,
    pub label: RelLabel,
}

/// Relative Cayley multigraph on a window: an arc `g → g·s` for every letter
/// `s ∈ X ∪ X⁻¹` and every `s ∈ H ∖ {e}` with both ends in the window.
#[derive(Clone, Debug)]
pub struct RelativeCayleyGraph {
    pub group: Arc<Group>,
    pub subgroup: Arc<Subgroup>,
    pub window: Arc<Window>,
    pub x_closed: Vec<Element>,
    arcs: Vec<Vec<RelArc>>,
    in_h: Vec<bool>,
}

impl RelativeCayleyGraph {
    pub fn new(
        group: Arc<Group>,
        subgroup: Arc<Subgroup>,
        x: &[Element],
        window: Arc<Window>,
    ) -> Result<Self> {
        for g in x {
            group.validate(g)?;
        }
        let x_closed = symmetrize(&group, x);
        let cosets = CosetTable::new(&group, &subgroup, &window);
        let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..window.len() {
            classes
                .entry(cosets.representative_of(i))
                .or_default()
                .push(i);
        }
        let mut arcs = vec![Vec::new(); window.len()];
        for (i, g) in window.elements().iter().enumerate() {
            for s in &x_closed {
                if let Some(j) = window.index_of(&group.multiply(g, s)) {
                    arcs[i].push(RelArc {
                        to: j,
                        label: RelLabel::X(s.clone()),
                    });
                }
            }
            let gi = group.invert(g);
            for &j in &classes[&cosets.representative_of(i)] {
                if j != i {
                    let h = group.multiply(&gi, window.element(j));
                    arcs[i].push(RelArc {
                        to: j,
                        label: RelLabel::H(h),
                    });
                }
            }
        }
        let in_h = window
            .elements()
            .iter()
            .map(|g| subgroup.contains(g))
            .collect();
        Ok(RelativeCayleyGraph {
            group,
            subgroup,
            window,
            x_closed,
            arcs,
            in_h,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.window.len()
    }

    pub fn arcs(&self, v: usize) -> &[RelArc] {
        &self.arcs[v]
    }

    /// Number of labeled edges at `v`, parallel edges counted separately.
    pub fn degree(&self, v: usize) -> usize {
        self.arcs[v].len()
    }

    pub fn in_subgroup(&self, v: usize) -> bool {
        self.in_h[v]
    }

    /// The underlying simplicial graph `Γ(G, H ∪ X)` on the window.
    pub fn simple_graph(&self) -> Result<SimplicialGraph> {
        let ids = self
            .window
            .elements()
            .iter()
            .map(|g| self.group.format_element(g))
            .collect();
        let edges = self
            .arcs
            .iter()
            .enumerate()
            .flat_map(|(i, a)| a.iter().map(move |arc| (i, arc.to)));
        SimplicialGraph::new(ids, edges)
    }

    /// Distances from `source` along admissible edges only.
    fn admissible_bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.vertex_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(a) = queue.pop_front() {
            for arc in &self.arcs[a] {
                let admissible = match arc.label {
                    RelLabel::X(_) => true,
                    RelLabel::H(_) => !self.in_h[a] && !self.in_h[arc.to],
                };
                if admissible && dist[arc.to] == UNREACHED {
                    dist[arc.to] = dist[a] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        dist
    }
}

pub fn build_relative_cayley(
    group: Arc<Group>,
    subgroup: Arc<Subgroup>,
    x: &[Element],
    radius: usize,
    cap: usize,
) -> Result<RelativeCayleyGraph> {
    let window = Arc::new(group.ball(radius, cap)?);
    RelativeCayleyGraph::new(group, subgroup, x, window)
}

/// Value of `d̂_H`. `InfiniteAtWindow` means no admissible path exists inside
/// the window; only a complete enumeration of a finite group proves `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum HatDist {
    Finite(usize),
    InfiniteAtWindow,
    Infinite,
}

impl HatDist {
    pub fn finite(self) -> Option<usize> {
        match self {
            HatDist::Finite(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for HatDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HatDist::Finite(d) => write!(f, "{d}"),
            HatDist::InfiniteAtWindow => f.write_str("infinity-at-window"),
            HatDist::Infinite => f.write_str("infinity"),
        }
    }
}

impl Serialize for HatDist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HatDist::Finite(d) => s.serialize_u64(*d as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

fn hat_from_raw(rel: &RelativeCayleyGraph, d: u32) -> HatDist {
    if d != UNREACHED {
        HatDist::Finite(d as usize)
    } else if rel.window.is_complete() {
        HatDist::Infinite
    } else {
        HatDist::InfiniteAtWindow
    }
}

fn subgroup_vertex(rel: &RelativeCayleyGraph, h: &Element) -> Result<usize> {
    if !rel.subgroup.contains(h) {
        return Err(Error::Precondition(format!(
            "`{}` is not in H",
            rel.group.format_element(h)
        )));
    }
    rel.window.index_of(h).ok_or_else(|| {
        Error::WindowExceeded(format!(
            "`{}` is outside the window",
            rel.group.format_element(h)
        ))
    })
}

/// `d̂_H(h, k)`: shortest admissible path in the windowed relative Cayley graph.
pub fn hat_distance(rel: &RelativeCayleyGraph, h: &Element, k: &Element) -> Result<HatDist> {
    let (a, b) = (subgroup_vertex(rel, h)?, subgroup_vertex(rel, k)?);
    Ok(hat_from_raw(rel, rel.admissible_bfs(a)[b]))
}

/// `d̂_H` on all pairs of `H ∩ window`, as `(h, k, value)` with window indices.
pub fn hat_distance_table(rel: &RelativeCayleyGraph) -> Vec<(usize, usize, HatDist)> {
    let hs: Vec<usize> = (0..rel.vertex_count()).filter(|&v| rel.in_h[v]).collect();
    hs.par_iter()
        .flat_map_iter(|&h| {
            let d = rel.admissible_bfs(h);
            hs.iter()
                .map(move |&k| (h, k, hat_from_raw(rel, d[k])))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CheckRecord {
    pub check: &'static str,
    pub verdict: Verdict,
    pub evidence: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ConedOffLemmaReport {
    pub checks: Vec<CheckRecord>,
    /// The comparison results are stated for infinite `H`; finite `H` is run anyway.
    pub subgroup_infinite: bool,
    pub verdict: Verdict,
}

/// Checks, on the window: (i) `Γ̂` connected iff `Γ(G, H ∪ X)` connected (and,
/// for a completely enumerated group, iff `X ∪ H` generates `G`);
/// (ii) `d_Γ ≤ d_Γ̂ ≤ 2 d_Γ` on group vertices; (iii) `½ d̂_H ≤ ∠_H ≤ 2 d̂_H`
/// on `H`, with finiteness agreeing; (iv) `h ↦ r·h` carries `(T_H, ∠_H)`
/// isometrically onto `(T_{rH}, ∠_{rH})` for sampled cosets `rH`.
pub fn check_coned_off_lemma(
    coned: &ConedOffGraph,
    rel: &RelativeCayleyGraph,
    coset_samples: usize,
) -> Result<ConedOffLemmaReport> {
    let group = &coned.group;
    let window = &coned.window;
    if rel.window.len() != window.len() {
        return Err(Error::Precondition(
            "coned-off and relative graphs must share one window".into(),
        ));
    }
    let complete = window.is_complete();
    let hat = &coned.graph;
    let simple = rel.simple_graph()?;
    let n = window.len();
    let mut checks = Vec::new();

    // (i)
    let hat_connected = hat.is_connected();
    let rel_connected = simple.is_connected();
    let generates = if complete {
        let mut gens = coned.x.clone();
        gens.extend(coned.subgroup.generators().iter().cloned());
        Some(closure(group, &gens, window.len().max(1))?.len() == window.len())
    } else {
        None
    };
    let ok = hat_connected == rel_connected && generates.is_none_or(|g| g == hat_connected);
    checks.push(CheckRecord {
        check: "connectivity-equivalence",
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        evidence: json!({
            "coned-off-connected": hat_connected,
            "relative-connected": rel_connected,
            "x-and-h-generate": generates,
        }),
    });

    // (ii)
    let violations: Vec<(usize, usize, Dist, Dist)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|x| {
            let dr = bfs(&simple, x, None);
            let dh = bfs(hat, x, None);
            (x + 1..n)
                .filter_map(move |y| {
                    let a = raw(dr[y]);
                    let b = raw(dh[y]);
                    (!(a <= b && b <= a.affine(2, 0))).then_some((x, y, a, b))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    checks.push(CheckRecord {
        check: "group-vertex-distance-sandwich",
        verdict: if violations.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        evidence: json!({
            "pairs": n * n.saturating_sub(1) / 2,
            "violations": violations.len(),
            "witness": violations.first().map(|&(x, y, a, b)| json!({
                "x": hat.id(x), "y": hat.id(y), "relative": a, "coned-off": b,
            })),
        }),
    });

    // (iii)
    let apex = coned.apex();
    let table = hat_distance_table(rel);
    let mut angle_rows: HashMap<usize, Vec<u32>> = HashMap::new();
    let mut pairs = 0;
    let mut bad = Vec::new();
    for &(h, k, d) in &table {
        if h >= k {
            continue;
        }
        pairs += 1;
        let row = angle_rows
            .entry(h)
            .or_insert_with(|| bfs(hat, h, Some(apex)));
        let angle = raw(row[k]);
        let ok = match (d.finite(), angle.finite()) {
            (Some(d), Some(a)) => d <= 2 * a && a <= 2 * d,
            (None, None) => true,
            _ => false,
        };
        if !ok {
            bad.push(json!({ "h": hat.id(h), "k": hat.id(k), "hat-distance": d, "angle": angle }));
        }
    }
    checks.push(CheckRecord {
        check: "angle-vs-admissible-distance",
        verdict: if bad.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        evidence: json!({ "pairs": pairs, "violations": bad.len(), "witness": bad.first() }),
    });

    // (iv)
    let h_members: Vec<usize> = (0..n).filter(|&v| rel.in_subgroup(v)).collect();
    let base: Vec<Vec<u32>> = h_members.iter().map(|&h| bfs(hat, h, Some(apex))).collect();
    let mut verdict = Verdict::Pass;
    let mut sampled = Vec::new();
    let mut witness = None;
    for &r in coned
        .cosets
        .representatives()
        .iter()
        .skip(1)
        .take(coset_samples)
    {
        let rg = window.element(r);
        let cone = coned.cone_vertex(rg).expect("representative cone");
        let image: Vec<Option<usize>> = h_members
            .iter()
            .map(|&h| window.index_of(&group.multiply(rg, window.element(h))))
            .collect();
        let mut compared = 0;
        let mut mismatch = None;
        for (i, &hi) in image.iter().enumerate() {
            let Some(a) = hi else { continue };
            let row = bfs(hat, a, Some(cone));
            for (j, &hj) in image.iter().enumerate().skip(i + 1) {
                let Some(b) = hj else { continue };
                compared += 1;
                let here = raw(row[b]);
                let there = raw(base[i][h_members[j]]);
                if here != there && mismatch.is_none() {
                    mismatch = Some(json!({
                        "coset": hat.id(cone),
                        "pair": [hat.id(h_members[i]), hat.id(h_members[j])],
                        "at-h": there,
                        "translated": here,
                    }));
                }
            }
        }
        let v = match (&mismatch, complete) {
            (None, _) => Verdict::Pass,
            (Some(_), true) => Verdict::Fail,
            (Some(_), false) => Verdict::WindowInconclusive,
        };
        verdict = verdict.and(v);
        if witness.is_none() {
            witness = mismatch;
        }
        sampled.push(json!({ "coset": hat.id(cone), "pairs": compared, "verdict": v }));
    }
    checks.push(CheckRecord {
        check: "cone-angle-isometry",
        verdict,
        evidence: json!({ "cosets": sampled, "witness": witness }),
    });

    let overall = checks
        .iter()
        .fold(Verdict::Pass, |acc, c| acc.and(c.verdict));
    Ok(ConedOffLemmaReport {
        checks,
        subgroup_infinite: coned.subgroup.is_infinite(),
        verdict: overall,
    })
}

fn raw(d: u32) -> Dist {
    if d == UNREACHED {
        Dist::Infinite
    } else {
        Dist::Finite(d as usize)
    }
}
