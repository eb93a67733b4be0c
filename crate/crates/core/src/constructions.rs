//! Constructions used when attaching edge orbits and thickening graphs:
//! α-replacement, the W/Z filtration with `X₀`, trivial-stabilizer vertices,
//! thickening, extraction of a relative generating set, and the comparison
//! map from the coned-off graph.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::conedoff::ConedOffGraph;
use crate::error::{Error, Result};
use crate::ggraph::{
    attach_edge_orbit, orbit_decomposition, stabilizer, GGraph, GroupAction, StabilizerTag,
};
use crate::graph::SimplicialGraph;
use crate::group::{Element, Subgroup};
use crate::metrics::{
    bfs, bfs_multi, escaping_set, geodesic, qi_check, Dist, DistanceMatrix, QIWitness, QiBounds,
    UNREACHED,
};

/// A fixed geodesic `α` from `u` to `v` in `Γ`, with a chosen translating
/// element for every attached edge `{g.u, g.v}`.
#[derive(Clone, Debug)]
pub struct ReplacementScheme {
    pub u: usize,
    pub v: usize,
    /// Lexicographically least geodesic from `u` to `v` in `Γ`.
    pub alpha: Vec<usize>,
    pub length: usize,
    /// Unordered edge → shortlex-least window element carrying `{u, v}` onto it
    /// with every vertex of `α` staying in the graph.
    translates: HashMap<(usize, usize), usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl ReplacementScheme {
    pub fn new(graph: &SimplicialGraph, act: &GroupAction, u: usize, v: usize) -> Result<Self> {
        if u == v {
            return Err(Error::Precondition(
                "replacement scheme needs distinct endpoints".into(),
            ));
        }
        let alpha = geodesic(graph, u, v, None).ok_or_else(|| {
            Error::Precondition(format!(
                "`{}` and `{}` lie in different components",
                graph.id(u),
                graph.id(v)
            ))
        })?;
        let mut translates = HashMap::new();
        for g in 0..act.window().len() {
            if alpha.iter().all(|&x| act.image(g, x).is_some()) {
                let (gu, gv) = (act.image(g, u).unwrap(), act.image(g, v).unwrap());
                translates.entry(key(gu, gv)).or_insert(g);
            }
        }
        Ok(ReplacementScheme {
            u,
            v,
            length: alpha.len() - 1,
            alpha,
            translates,
        })
    }

    /// The reverse path `α̂`.
    pub fn alpha_reversed(&self) -> Vec<usize> {
        self.alpha.iter().rev().copied().collect()
    }

    /// Chosen translating element for the edge `{x, y}`, if any.
    pub fn translate(&self, x: usize, y: usize) -> Option<usize> {
        self.translates.get(&key(x, y)).copied()
    }

    /// `g.α` for window index `g`.
    pub fn translated_alpha(&self, act: &GroupAction, g: usize) -> Option<Vec<usize>> {
        self.alpha.iter().map(|&x| act.image(g, x)).collect()
    }

    /// Pairs `(z, w)` with `[z, a, w]` a translate of a corner of `α` or `α̂`.
    pub fn corner_pairs(&self, act: &GroupAction, a: usize) -> Result<Vec<(usize, usize)>> {
        let mut pairs = Vec::new();
        for g in 0..act.window().len() {
            for i in 1..self.length {
                if act.image(g, self.alpha[i]) != Some(a) {
                    continue;
                }
                match (
                    act.image(g, self.alpha[i - 1]),
                    act.image(g, self.alpha[i + 1]),
                ) {
                    (Some(z), Some(w)) => {
                        pairs.push((z, w));
                        pairs.push((w, z));
                    }
                    _ => {
                        return Err(Error::WindowExceeded(format!(
                            "a corner translate through vertex {a} leaves the window"
                        )))
                    }
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(pairs)
    }
}

/// Replaces every attached edge `[g.u, g.v]` (resp. `[g.v, g.u]`) of a path in
/// `Γ′` by `g.α` (resp. `g.α̂`); edges of `Γ` are copied.
pub fn alpha_replacement(
    path: &[usize],
    graph: &SimplicialGraph,
    attached: &SimplicialGraph,
    act: &GroupAction,
    scheme: &ReplacementScheme,
) -> Result<Vec<usize>> {
    let Some(&first) = path.first() else {
        return Err(Error::Precondition("empty path".into()));
    };
    let mut out = vec![first];
    for step in path.windows(2) {
        let (x, y) = (step[0], step[1]);
        if graph.has_edge(x, y) {
            out.push(y);
            continue;
        }
        if !attached.has_edge(x, y) {
            return Err(Error::Precondition(format!(
                "[{}, {}] is not an edge",
                graph.id(x),
                graph.id(y)
            )));
        }
        let g = scheme.translate(x, y).ok_or_else(|| {
            Error::WindowExceeded(format!(
                "no in-window element carries the representative onto {{{}, {}}}",
                graph.id(x),
                graph.id(y)
            ))
        })?;
        let mut seg = scheme
            .translated_alpha(act, g)
            .expect("translate keeps α in the graph");
        if seg[0] != x {
            seg.reverse();
        }
        out.extend_from_slice(&seg[1..]);
    }
    Ok(out)
}

/// All walks `[a, x₁, …, x_m = b]` with `m ≤ k` and no `x_i = a`, in
/// lexicographic order of vertex ranks. Fails once `cap` partial walks have
/// been expanded.
pub fn escaping_paths(
    graph: &SimplicialGraph,
    a: usize,
    b: usize,
    k: usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    if a == b {
        return Err(Error::Precondition(
            "escaping paths need distinct endpoints".into(),
        ));
    }
    let to_b = bfs(graph, b, Some(a));
    let mut out = Vec::new();
    let mut expanded = 0usize;
    let mut stack = vec![a];
    fn go(
        graph: &SimplicialGraph,
        a: usize,
        b: usize,
        k: usize,
        to_b: &[u32],
        stack: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        expanded: &mut usize,
        cap: usize,
    ) -> Result<()> {
        *expanded += 1;
        if *expanded > cap {
            return Err(Error::ResourceCap {
                what: "escaping-path expansions".into(),
                cap,
            });
        }
        let last = *stack.last().unwrap();
        if last == b {
            out.push(stack.clone());
        }
        let used = stack.len() - 1;
        for &y in graph.neighbors(last) {
            if y == a || to_b[y] == UNREACHED || used + 1 + to_b[y] as usize > k {
                continue;
            }
            stack.push(y);
            go(graph, a, b, k, to_b, stack, out, expanded, cap)?;
            stack.pop();
        }
        Ok(())
    }
    go(
        graph,
        a,
        b,
        k,
        &to_b,
        &mut stack,
        &mut out,
        &mut expanded,
        cap,
    )?;
    Ok(out)
}

/// The sets `W_n ⊆ … ⊆ W_1`, `Z_{n−1}, …, Z_1` and `X₀` for an attachment,
/// at vertices `a ≠ b` and bound `k`, with `n = kℓ`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct WZFiltration {
    pub a: usize,
    pub b: usize,
    pub k: usize,
    pub ell: usize,
    pub n: usize,
    /// `ℓ = 1`: nothing was attached and the filtration is empty.
    pub degenerate: bool,
    /// `w_sets[j − 1] = W_j` for `j = 1..=n`, members in shortlex order.
    pub w_sets: Vec<Vec<usize>>,
    /// `z_sets[j − 1] = Z_j` for `j = 1..n`.
    pub z_sets: Vec<Vec<usize>>,
    pub x0: Vec<usize>,
    /// Window indices `g` with `g.u = a` and `g.v ∈ ab⃗(k)_{Γ′}`.
    pub y: Vec<usize>,
    /// `ab⃗(k)_{Γ′}`.
    pub escaping_attached: Vec<usize>,
    pub corner_pairs: Vec<(usize, usize)>,
}

fn sorted_members(graph: &SimplicialGraph, mask: &[bool]) -> Vec<usize> {
    let mut v: Vec<usize> = (0..mask.len()).filter(|&x| mask[x]).collect();
    v.sort_by_key(|&x| graph.rank(x));
    v
}

pub fn wz_filtration(
    graph: &SimplicialGraph,
    attached: &SimplicialGraph,
    act: &GroupAction,
    scheme: &ReplacementScheme,
    a: usize,
    b: usize,
    k: usize,
) -> Result<WZFiltration> {
    if a == b {
        return Err(Error::Precondition("filtration needs a ≠ b".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("filtration needs k ≥ 1".into()));
    }
    let ell = scheme.length;
    let n = k * ell;
    let escaping_attached = escaping_set(attached, a, b, k)?.members;
    if ell == 1 {
        return Ok(WZFiltration {
            a,
            b,
            k,
            ell,
            n,
            degenerate: true,
            w_sets: Vec::new(),
            z_sets: Vec::new(),
            x0: Vec::new(),
            y: Vec::new(),
            escaping_attached,
            corner_pairs: Vec::new(),
        });
    }
    let nv = graph.vertex_count();
    let corner_pairs = scheme.corner_pairs(act, a)?;
    let mut w = vec![false; nv];
    for x in escaping_set(graph, a, b, n)?.members {
        w[x] = true;
    }
    let mut w_rev = vec![sorted_members(graph, &w)];
    let mut z_rev = Vec::new();
    for _j in (2..=n).rev() {
        let mut z = w.clone();
        for &(zz, ww) in &corner_pairs {
            if w[ww] {
                z[zz] = true;
            }
        }
        let sources: Vec<usize> = (0..nv).filter(|&x| z[x]).collect();
        let near = bfs_multi(graph, &sources, Some(a));
        let mut next = w.clone();
        for &t in graph.neighbors(a) {
            if near[t] != UNREACHED && near[t] as usize <= n {
                next[t] = true;
            }
        }
        z_rev.push(sorted_members(graph, &z));
        w_rev.push(sorted_members(graph, &next));
        w = next;
    }
    w_rev.reverse();
    z_rev.reverse();
    let x0: Vec<usize> = escaping_attached
        .iter()
        .copied()
        .filter(|&x| !graph.has_edge(a, x))
        .collect();
    let y = (0..act.window().len())
        .filter(|&g| {
            act.image(g, scheme.u) == Some(a)
                && act
                    .image(g, scheme.v)
                    .is_some_and(|gv| escaping_attached.contains(&gv))
        })
        .collect();
    Ok(WZFiltration {
        a,
        b,
        k,
        ell,
        n,
        degenerate: false,
        w_sets: w_rev,
        z_sets: z_rev,
        x0,
        y,
        escaping_attached,
        corner_pairs,
    })
}

/// Outcome of auditing one escaping path against the filtration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PathAudit {
    pub path_attached: Vec<usize>,
    pub path: Vec<usize>,
    /// `(w_i, z_i)` for each maximal segment of the replaced path avoiding `a`.
    pub segments: Vec<(usize, usize)>,
    pub failure: Option<String>,
}

impl WZFiltration {
    /// `W_j` for `1 ≤ j ≤ n`.
    pub fn w(&self, j: usize) -> &[usize] {
        &self.w_sets[j - 1]
    }

    /// `Z_j` for `1 ≤ j < n`.
    pub fn z(&self, j: usize) -> &[usize] {
        &self.z_sets[j - 1]
    }

    /// First `j` where `W_j ⊆ Z_{j−1} ⊆ W_{j−1}` fails.
    pub fn chain_violation(&self) -> Option<usize> {
        (2..=self.n.min(self.w_sets.len())).find(|&j| {
            let sub = |a: &[usize], b: &[usize]| a.iter().all(|x| b.contains(x));
            !(sub(self.w(j), self.z(j - 1)) && sub(self.z(j - 1), self.w(j - 1)))
        })
    }

    /// A member of `ab⃗(k)_{Γ′}` outside `W_1 ∪ X₀`, if any.
    pub fn containment_violation(&self) -> Option<usize> {
        if self.degenerate {
            return None;
        }
        self.escaping_attached
            .iter()
            .copied()
            .find(|x| !self.w(1).contains(x) && !self.x0.contains(x))
    }

    /// Checks, for an escaping path `γ′` in `Γ′` from `a` ending at `b`, that
    /// its α-replacement `γ` satisfies `γ′ ∩ T_aΓ ⊆ γ ∩ T_aΓ ⊆ W_1`, that `γ`
    /// splits at `a` into `m ≤ n` segments, and that the segment ends satisfy
    /// `w_i ∈ W_i` and `z_i ∈ Z_i`.
    pub fn audit_path(
        &self,
        path_attached: &[usize],
        graph: &SimplicialGraph,
        attached: &SimplicialGraph,
        act: &GroupAction,
        scheme: &ReplacementScheme,
    ) -> Result<PathAudit> {
        let (a, b) = (self.a, self.b);
        if path_attached.first() != Some(&a)
            || path_attached.last() != Some(&b)
            || path_attached[1..].contains(&a)
            || !attached.is_path(path_attached)
        {
            return Err(Error::Precondition(
                "expected an escaping path from a ending at b".into(),
            ));
        }
        let path = alpha_replacement(path_attached, graph, attached, act, scheme)?;
        let mut audit = PathAudit {
            path_attached: path_attached.to_vec(),
            path,
            segments: Vec::new(),
            failure: None,
        };
        if self.degenerate {
            return Ok(audit);
        }
        let in_t = |x: usize| graph.has_edge(a, x);
        let on_path: Vec<usize> = audit.path.iter().copied().filter(|&x| in_t(x)).collect();
        if let Some(&x) = path_attached
            .iter()
            .find(|&&x| in_t(x) && !on_path.contains(&x))
        {
            audit.failure = Some(format!("{} lost by replacement", graph.id(x)));
            return Ok(audit);
        }
        if let Some(&x) = on_path.iter().find(|x| !self.w(1).contains(x)) {
            audit.failure = Some(format!("{} on replaced path is outside W_1", graph.id(x)));
            return Ok(audit);
        }
        let mut start = 1;
        for i in 1..=audit.path.len() {
            if i == audit.path.len() || audit.path[i] == a {
                audit.segments.push((audit.path[start], audit.path[i - 1]));
                start = i + 1;
            }
        }
        let m = audit.segments.len();
        if m > self.n {
            audit.failure = Some(format!("{m} segments exceed n = {}", self.n));
            return Ok(audit);
        }
        for (idx, &(wi, zi)) in audit.segments.iter().enumerate() {
            let i = idx + 1;
            if !self.w(i).contains(&wi) {
                audit.failure = Some(format!("w_{i} = {} is outside W_{i}", graph.id(wi)));
                break;
            }
            if i < m && !self.z(i).contains(&zi) {
                audit.failure = Some(format!("z_{i} = {} is outside Z_{i}", graph.id(zi)));
                break;
            }
        }
        Ok(audit)
    }
}

/// Outcome of checking `d_Γ′ ≤ d_Γ ≤ ℓ·d_Γ′` after an attachment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DistanceSandwich {
    pub ell: usize,
    pub pairs_checked: usize,
    /// Pairs skipped because a distance changed in the next window.
    pub pairs_unverified: usize,
    /// `(x, y, d_Γ, d_Γ′)` of the first violating pair.
    pub violation: Option<(String, String, Dist, Dist)>,
}

/// Checks the attachment sandwich on all unordered pairs. With `next` (the
/// same two graphs one window larger), a pair counts only when both of its
/// distances agree between the windows.
pub fn distance_sandwich(
    graph: &SimplicialGraph,
    attached: &SimplicialGraph,
    ell: usize,
    next: Option<(&SimplicialGraph, &SimplicialGraph)>,
) -> Result<DistanceSandwich> {
    let d = DistanceMatrix::new(graph);
    let dp = DistanceMatrix::new(attached);
    let (big, big_p, map) = match next {
        Some((b, bp)) => {
            let map = graph
                .ids()
                .iter()
                .map(|id| b.vertex(id))
                .collect::<Result<Vec<_>>>()?;
            (
                Some(DistanceMatrix::new(b)),
                Some(DistanceMatrix::new(bp)),
                map,
            )
        }
        None => (None, None, Vec::new()),
    };
    let mut out = DistanceSandwich {
        ell,
        pairs_checked: 0,
        pairs_unverified: 0,
        violation: None,
    };
    let order = graph.vertices_in_order();
    for (i, &x) in order.iter().enumerate() {
        for &y in &order[i + 1..] {
            let (a, b) = (d.get(x, y), dp.get(x, y));
            if let (Some(big), Some(big_p)) = (&big, &big_p) {
                if big.get(map[x], map[y]) != a || big_p.get(map[x], map[y]) != b {
                    out.pairs_unverified += 1;
                    continue;
                }
            }
            out.pairs_checked += 1;
            if out.violation.is_none() && (b > a || a > b.affine(ell, 0)) {
                out.violation = Some((graph.id(x).to_string(), graph.id(y).to_string(), a, b));
            }
        }
    }
    Ok(out)
}

/// Result of ensuring a vertex with trivial stabilizer.
#[derive(Clone, Debug)]
pub struct TrivialVertex {
    pub ggraph: GGraph,
    pub u0: usize,
    /// Number of vertices added (zero when one already existed).
    pub added: usize,
    /// Inclusion of the old graph into the new one.
    pub inclusion_qi: Option<QIWitness>,
}

fn trivial_stabilizer_vertex(gg: &GGraph) -> Option<usize> {
    let trivial = |v: usize| stabilizer(&gg.action, v).elements == [0];
    if let Some(e) = gg.graph.index_of("e").filter(|&e| trivial(e)) {
        return Some(e);
    }
    gg.graph
        .vertices_in_order()
        .into_iter()
        .find(|&v| trivial(v))
}

/// Returns the graph unchanged when some vertex has trivial stabilizer
/// (preferring the vertex `e`); otherwise adds a free orbit of new vertices
/// `gU`, each joined to `g.anchor`.
pub fn add_trivial_stabilizer_vertex(gg: &GGraph, anchor: usize) -> Result<TrivialVertex> {
    if let Some(u0) = trivial_stabilizer_vertex(gg) {
        return Ok(TrivialVertex {
            ggraph: gg.clone(),
            u0,
            added: 0,
            inclusion_qi: None,
        });
    }
    let act = &gg.action;
    let window = act.window().clone();
    let group = act.group().clone();
    let n = gg.graph.vertex_count();
    let ids: Vec<String> = window
        .elements()
        .iter()
        .map(|g| {
            if group.is_identity(g) {
                "U".to_string()
            } else {
                format!("{}U", group.format_element(g))
            }
        })
        .collect();
    let edges: Vec<(usize, usize)> = (0..window.len())
        .filter_map(|i| act.image(i, anchor).map(|a| (n + i, a)))
        .collect();
    let graph = gg.graph.with_vertices(ids, edges)?;
    let action = act.extended(window.len(), |i, v| {
        window
            .index_of(&group.multiply(window.element(i), window.element(v - n)))
            .map(|j| n + j)
    });
    let mut declared = gg.declared.clone();
    declared.extend(std::iter::repeat_n(
        Some(StabilizerTag::Finite),
        window.len(),
    ));
    let q: Vec<usize> = (0..n).collect();
    let qi = qi_check(&q, &gg.graph, &graph, QiBounds::standard(1, 1), None, None)?;
    Ok(TrivialVertex {
        ggraph: GGraph {
            graph,
            action,
            declared,
        },
        u0: n,
        added: window.len(),
        inclusion_qi: Some(qi),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PlannedAttachment {
    /// `apex`, `generator` or `orbit-representative`.
    pub kind: &'static str,
    pub edge: (String, String),
    pub new_edges: usize,
    pub dropped: usize,
}

/// The data of a thick graph and the attachments that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ThickeningPlan {
    pub u0: String,
    pub v0: String,
    pub s: Vec<String>,
    /// Orbit representatives `u_1, …, u_ℓ` of finite-stabilizer vertices other than `u0`'s orbit.
    pub reps: Vec<String>,
    pub added_trivial_vertices: usize,
    pub attachments: Vec<PlannedAttachment>,
}

impl ThickeningPlan {
    /// Edges the thick graph must contain, each with its presence in `graph`.
    pub fn required_edges(&self, gg: &GGraph) -> Result<Vec<((String, String), bool)>> {
        let g = &gg.graph;
        let u0 = g.vertex(&self.u0)?;
        let mut want = vec![(u0, g.vertex(&self.v0)?)];
        for s in &self.s {
            let el = gg.action.group().parse_element(s)?;
            let su0 = gg
                .action
                .apply(&el, u0)?
                .ok_or_else(|| Error::WindowExceeded(format!("{s}.u0")))?;
            want.push((u0, su0));
        }
        for r in &self.reps {
            want.push((u0, g.vertex(r)?));
        }
        Ok(want
            .into_iter()
            .map(|(x, y)| ((g.id(x).to_string(), g.id(y).to_string()), g.has_edge(x, y)))
            .collect())
    }
}

#[derive(Clone, Debug)]
pub struct Thickening {
    pub ggraph: GGraph,
    pub plan: ThickeningPlan,
}

/// Makes `gg` thick: ensures a trivial-stabilizer vertex `u0` (given, or
/// found/created), picks the apex `v0` fixed by exactly `H` (preferring one
/// declared `h`), and attaches the orbits of `{u0, v0}`, `{u0, s.u0}` for
/// `s ∈ S` in order, and `{u0, u_j}` for the remaining finite-stabilizer
/// orbit representatives, skipping edges already present.
pub fn thicken(gg: &GGraph, h: &Subgroup, s: &[Element], u0: Option<&str>) -> Result<Thickening> {
    let act0 = &gg.action;
    let h_idx: Vec<usize> = (0..act0.window().len())
        .filter(|&i| h.contains(act0.window().element(i)))
        .collect();
    let v0 = gg
        .graph
        .vertices_in_order()
        .into_iter()
        .filter(|&v| stabilizer(act0, v).elements == h_idx)
        .min_by_key(|&v| (gg.declared[v] != Some(StabilizerTag::H), gg.graph.rank(v)))
        .ok_or_else(|| Error::Precondition("no vertex has stabilizer H in the window".into()))?;

    let (mut cur, u0, added) = match u0 {
        Some(id) => {
            let u = gg.graph.vertex(id)?;
            if stabilizer(act0, u).elements != [0] {
                return Err(Error::Precondition(format!(
                    "`{id}` does not have trivial stabilizer"
                )));
            }
            (gg.clone(), u, 0)
        }
        None => {
            let t = add_trivial_stabilizer_vertex(gg, v0)?;
            (t.ggraph, t.u0, t.added)
        }
    };
    let act = cur.action.clone();

    let orbits = orbit_decomposition(&cur.graph, &act);
    if orbits.vertex_orbit[u0] == orbits.vertex_orbit[v0] {
        return Err(Error::Precondition(
            "the apex lies in the orbit of the base vertex (H is trivial)".into(),
        ));
    }
    let skip = [orbits.vertex_orbit[u0], orbits.vertex_orbit[v0]];
    let reps: Vec<usize> = orbits
        .vertex_reps
        .iter()
        .copied()
        .filter(|&r| {
            !skip.contains(&orbits.vertex_orbit[r])
                && !matches!(
                    cur.declared[r],
                    Some(StabilizerTag::H | StabilizerTag::ConjH)
                )
        })
        .collect();

    let mut targets: Vec<(&'static str, usize)> = vec![("apex", v0)];
    for el in s {
        let su0 = act.apply(el, u0)?.ok_or_else(|| {
            Error::WindowExceeded(format!(
                "{}.u0 leaves the window",
                act.group().format_element(el)
            ))
        })?;
        targets.push(("generator", su0));
    }
    targets.extend(reps.iter().map(|&r| ("orbit-representative", r)));

    let mut attachments = Vec::new();
    for (kind, t) in targets {
        if t == u0 || cur.graph.has_edge(u0, t) {
            continue;
        }
        let att = attach_edge_orbit(&cur.graph, &act, u0, t)?;
        attachments.push(PlannedAttachment {
            kind,
            edge: (cur.graph.id(u0).to_string(), cur.graph.id(t).to_string()),
            new_edges: att.new_edges.len(),
            dropped: att.dropped.len(),
        });
        cur.graph = att.graph;
    }
    let g = &cur.graph;
    let plan = ThickeningPlan {
        u0: g.id(u0).to_string(),
        v0: g.id(v0).to_string(),
        s: s.iter().map(|el| act.group().format_element(el)).collect(),
        reps: reps.iter().map(|&r| g.id(r).to_string()).collect(),
        added_trivial_vertices: added,
        attachments,
    };
    Ok(Thickening { ggraph: cur, plan })
}

/// Which distance-one condition put an element into `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Provenance {
    /// Index `i` of `u_i` (0 is `u0`).
    pub i: usize,
    /// Index `j` of `u_j`, or `None` for the apex `v0`.
    pub j: Option<usize>,
}

/// `X = {g : d(u_i, g.u_j) = 1 or d(u_i, g.v0) = 1}` over the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RelativeGenSet {
    #[serde(skip)]
    pub elements: Vec<Element>,
    pub formatted: Vec<String>,
    pub provenance: Vec<Vec<Provenance>>,
    /// Some `g.u_j` or `g.v0` left the graph.
    pub truncated: bool,
}

impl RelativeGenSet {
    pub fn contains(&self, g: &Element) -> bool {
        self.elements.contains(g)
    }
}

pub fn extract_x(thick: &GGraph, plan: &ThickeningPlan) -> Result<RelativeGenSet> {
    let g = &thick.graph;
    let act = &thick.action;
    let mut us = vec![g.vertex(&plan.u0)?];
    for r in &plan.reps {
        us.push(g.vertex(r)?);
    }
    let v0 = g.vertex(&plan.v0)?;
    let mut out = RelativeGenSet {
        elements: Vec::new(),
        formatted: Vec::new(),
        provenance: Vec::new(),
        truncated: false,
    };
    for w in 0..act.window().len() {
        let mut prov = Vec::new();
        let targets = us
            .iter()
            .enumerate()
            .map(|(j, &u)| (Some(j), u))
            .chain([(None, v0)]);
        for (j, t) in targets {
            let Some(gt) = act.image(w, t) else {
                out.truncated = true;
                continue;
            };
            for (i, &ui) in us.iter().enumerate() {
                if g.has_edge(ui, gt) {
                    prov.push(Provenance { i, j });
                }
            }
        }
        if !prov.is_empty() {
            let el = act.window().element(w).clone();
            out.formatted.push(act.group().format_element(&el));
            out.elements.push(el);
            out.provenance.push(prov);
        }
    }
    Ok(out)
}

/// The comparison map `q: Γ̂(G, H, X) → Γ`, `g ↦ g.u0`, `gH ↦ g.v0`, checked
/// for `d_Γ(qa, qb) ≤ 3 d_Γ̂(a, b)`, `d_Γ̂(a, b) ≤ 2 d_Γ(qa, qb)` and 1-density.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ConedOffComparison {
    pub coned_off_vertices: usize,
    pub thick_vertices: usize,
    /// Domain vertices whose image left the window (excluded from the check).
    pub unmapped: usize,
    pub witness: QIWitness,
}

pub fn coned_off_qi_witness(
    thick: &GGraph,
    plan: &ThickeningPlan,
    x: &RelativeGenSet,
    h: Arc<Subgroup>,
) -> Result<ConedOffComparison> {
    let act = &thick.action;
    let coned = ConedOffGraph::new(
        act.group().clone(),
        h,
        x.elements.clone(),
        act.window().clone(),
    )?;
    let u0 = thick.graph.vertex(&plan.u0)?;
    let v0 = thick.graph.vertex(&plan.v0)?;
    let nd = coned.graph.vertex_count();
    let mut q = vec![0; nd];
    let mut scope = vec![true; nd];
    for (v, kind) in coned.kinds.iter().enumerate() {
        let image = match *kind {
            crate::conedoff::VertexKind::Group(i) => act.image(i, u0),
            crate::conedoff::VertexKind::Cone(r) => act.image(r, v0),
        };
        match image {
            Some(t) => q[v] = t,
            None => scope[v] = false,
        }
    }
    let bounds = QiBounds {
        upper_factor: 3,
        upper_add: 0,
        lower_factor: 2,
        lower_add: 0,
        density: Some(1),
    };
    let witness = qi_check(&q, &coned.graph, &thick.graph, bounds, Some(&scope), None)?;
    Ok(ConedOffComparison {
        coned_off_vertices: nd,
        thick_vertices: thick.graph.vertex_count(),
        unmapped: scope.iter().filter(|&&s| !s).count(),
        witness,
    })
}
