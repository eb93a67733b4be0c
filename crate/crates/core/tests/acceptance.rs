//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use finegraph::conedoff::{
    build_coned_off, check_coned_off_lemma, hat_distance, ConedOffGraph, RelativeCayleyGraph,
};
use finegraph::constructions::{
    coned_off_qi_witness, distance_sandwich, escaping_paths, extract_x, thicken, wz_filtration,
    ReplacementScheme,
};
use finegraph::corpus::{self, Instance};
use finegraph::ggraph::{attach_edge_orbit, orbit_decomposition, GGraph, Verdict};
use finegraph::graph::SimplicialGraph;
use finegraph::group::{all_subgroups, Element, Group, Subgroup, DEFAULT_CAP};
use finegraph::metrics::{
    angle_distance, escaping_set, fineness_probe, hyperbolicity_delta, path_distance, Dist,
    Stability,
};

use common::*;

const SEED: u64 = 0x05ee_df1e;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: detail.into(),
    }
}

fn ac1() -> Outcome {
    let graphs = corpus::random_graphs(SEED, 200, 25);
    let mut checked = 0usize;
    for (gi, g) in graphs.iter().enumerate() {
        let adj = adjacency(g);
        let n = g.vertex_count();
        for u in 0..n {
            let du = floyd(&adj, Some(u));
            let ball = |w: usize, r: usize| -> BTreeSet<usize> {
                (0..n).filter(|&x| adj[u][x] && du[w][x] <= r).collect()
            };
            for v in (0..n).filter(|&v| v != u) {
                for k in 1..=4 {
                    let lib = escaping_set(g, u, v, k).unwrap();
                    let lib_set: BTreeSet<usize> = lib.members.iter().copied().collect();
                    let oracle = escaping_oracle(&adj, u, v, k);
                    if lib_set != oracle {
                        return fail(format!(
                            "graph {gi}: escaping set mismatch at u={u} v={v} k={k}"
                        ));
                    }
                    for &w in &oracle {
                        if !oracle.is_subset(&ball(w, 2 * k - 2)) {
                            return fail(format!(
                                "graph {gi}: uv(k) ⊄ B(w,2k-2) at u={u} v={v} k={k} w={w}"
                            ));
                        }
                        if !ball(w, k).is_subset(&escaping_oracle(&adj, u, w, k + 1)) {
                            return fail(format!(
                                "graph {gi}: B(w,k) ⊄ uw(k+1) at u={u} v={v} k={k} w={w}"
                            ));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    ok(format!("200 graphs, {checked} (u,v,k,w) cases"))
}

/// Every subset of `elements` with at most two members.
fn small_subsets(elements: &[Element]) -> Vec<Vec<Element>> {
    let mut out = vec![vec![]];
    for (i, a) in elements.iter().enumerate() {
        out.push(vec![a.clone()]);
        for b in &elements[i + 1..] {
            out.push(vec![a.clone(), b.clone()]);
        }
    }
    out
}

fn ac2() -> Outcome {
    let mut cases = 0usize;
    for (name, group) in [
        ("S3", corpus::s3()),
        ("D4", corpus::d4()),
        ("Z12", corpus::z12()),
    ] {
        let group = Arc::new(group);
        let window = Arc::new(group.full_window(DEFAULT_CAP).unwrap());
        for h in all_subgroups(&group, DEFAULT_CAP).unwrap() {
            let h = Arc::new(h);
            for x in small_subsets(window.elements()) {
                let tag = || {
                    let xs: Vec<String> = x.iter().map(|g| group.format_element(g)).collect();
                    format!("{name}, |H|={}, X={{{}}}", h.order().unwrap(), xs.join(","))
                };
                let oracle = FiniteConedOff::new(&group, &h, &x);
                let n = oracle.elements.len();
                let d_hat = floyd(&oracle.hat, None);
                let d_rel = floyd(&oracle.rel, None);
                let d_angle = floyd(&oracle.hat, Some(oracle.apex()));
                if connected(&oracle.hat) != connected(&oracle.rel) {
                    return fail(format!("{}: connectivity differs", tag()));
                }
                for i in 0..n {
                    for j in 0..n {
                        let (a, b) = (d_rel[i][j], d_hat[i][j]);
                        if (a == INF) != (b == INF) || (a < INF && (a > b || b > 2 * a)) {
                            return fail(format!("{}: d_rel={a} d_hat={b} at ({i},{j})", tag()));
                        }
                    }
                }
                let hs: Vec<usize> = (0..n).filter(|&i| oracle.in_h[i]).collect();
                for &a in &hs {
                    let adm = oracle.admissible_from(&group, a);
                    for &b in &hs {
                        let (dh, ang) = (adm[b], d_angle[a][b]);
                        if (dh == INF) != (ang == INF) {
                            return fail(format!(
                                "{}: finiteness of d̂={dh} and ∠={ang} differs",
                                tag()
                            ));
                        }
                        if dh < INF && (dh > 2 * ang || ang > 2 * dh) {
                            return fail(format!("{}: d̂={dh} ∠={ang}", tag()));
                        }
                    }
                }
                let coned = ConedOffGraph::new(group.clone(), h.clone(), x.clone(), window.clone())
                    .unwrap();
                let rel =
                    RelativeCayleyGraph::new(group.clone(), h.clone(), &x, window.clone()).unwrap();
                let report = check_coned_off_lemma(&coned, &rel, 3).unwrap();
                if report.verdict != Verdict::Pass {
                    return fail(format!(
                        "{}: library check verdict {:?}",
                        tag(),
                        report.verdict
                    ));
                }
                cases += 1;
            }
        }
    }
    ok(format!("{cases} (G, H, X) cases"))
}

/// Attachments `{u, v}` with `u` a vertex-orbit representative and `v` any
/// non-neighbor, in shortlex order.
fn attachment_pairs(gg: &GGraph) -> Vec<(usize, usize)> {
    let orbits = orbit_decomposition(&gg.graph, &gg.action);
    let mut out = Vec::new();
    for &u in &orbits.vertex_reps {
        for v in gg.graph.vertices_in_order() {
            if v != u && !gg.graph.has_edge(u, v) && path_distance(&gg.graph, u, v).is_finite() {
                out.push((u, v));
            }
        }
    }
    out
}

fn f2_cayley(radius: usize) -> GGraph {
    let g = Arc::new(corpus::f2());
    let w = Arc::new(g.ball(radius, DEFAULT_CAP).unwrap());
    corpus::cayley_graph(g, w).unwrap()
}

fn ac3_ac6() -> (Outcome, Outcome) {
    let mut attachments = 0usize;
    let mut pairs = 0usize;
    let mut unverified = 0usize;
    let mut worst_orbits = 0usize;
    let mut sandwich_fail = None;
    let mut orbit_fail = None;
    let mut record = |name: &str, gg: &GGraph, u: usize, v: usize, next: Option<&GGraph>| {
        let att = attach_edge_orbit(&gg.graph, &gg.action, u, v).unwrap();
        let ell = path_distance(&gg.graph, u, v).finite().unwrap();
        let next_pair = next.map(|big| {
            let (bu, bv) = (
                big.graph.vertex(gg.graph.id(u)).unwrap(),
                big.graph.vertex(gg.graph.id(v)).unwrap(),
            );
            (
                big.graph.clone(),
                attach_edge_orbit(&big.graph, &big.action, bu, bv)
                    .unwrap()
                    .graph,
            )
        });
        let s = distance_sandwich(
            &gg.graph,
            &att.graph,
            ell,
            next_pair.as_ref().map(|(a, b)| (a, b)),
        )
        .unwrap();
        attachments += 1;
        pairs += s.pairs_checked;
        unverified += s.pairs_unverified;
        if let Some(v) = s.violation {
            sandwich_fail.get_or_insert(format!("{name}: {v:?}"));
        }
        let (orbits, at) = att.max_new_neighbor_orbits(&gg.action);
        worst_orbits = worst_orbits.max(orbits);
        if orbits > 2 {
            orbit_fail.get_or_insert(format!(
                "{name}: {orbits} new orbits at {:?}",
                at.map(|a| gg.graph.id(a))
            ));
        }
    };
    for inst in corpus::finite_instances() {
        for (u, v) in attachment_pairs(&inst.ggraph) {
            record(&inst.name, &inst.ggraph, u, v, None);
        }
    }
    for radius in 1..=4 {
        let gg = f2_cayley(radius);
        let big = f2_cayley(radius + 1);
        let e = gg.graph.vertex("e").unwrap();
        for v in gg.graph.vertices_in_order() {
            if v != e
                && !gg.graph.has_edge(e, v)
                && path_distance(&gg.graph, e, v).finite() <= Some(3)
            {
                record(&format!("cayley(F2, L={radius})"), &gg, e, v, Some(&big));
            }
        }
    }
    let ac3 = match sandwich_fail {
        None => ok(format!("{attachments} attachments, {pairs} pairs checked, {unverified} pairs not verifiable in-window")),
        Some(f) => fail(f),
    };
    let ac6 = match orbit_fail {
        None => ok(format!(
            "{attachments} attachments, at most {worst_orbits} new G_a-orbits"
        )),
        Some(f) => fail(f),
    };
    (ac3, ac6)
}

fn ac4() -> Outcome {
    let mut filtrations = 0usize;
    let mut audited = 0usize;
    for inst in corpus::finite_instances() {
        let gg = &inst.ggraph;
        let (graph, act) = (&gg.graph, &gg.action);
        for (u, v) in attachment_pairs(gg) {
            let att = attach_edge_orbit(graph, act, u, v).unwrap();
            let scheme = ReplacementScheme::new(graph, act, u, v).unwrap();
            for a in 0..graph.vertex_count() {
                for b in (0..graph.vertex_count()).filter(|&b| b != a) {
                    for k in 1..=3 {
                        let f = wz_filtration(graph, &att.graph, act, &scheme, a, b, k).unwrap();
                        let at = || {
                            format!(
                                "{}: {{{},{}}} a={} b={} k={k}",
                                inst.name,
                                graph.id(u),
                                graph.id(v),
                                graph.id(a),
                                graph.id(b)
                            )
                        };
                        if let Some(j) = f.chain_violation() {
                            return fail(format!("{}: chain breaks at j={j}", at()));
                        }
                        if let Some(x) = f.containment_violation() {
                            return fail(format!("{}: {} ∉ W1 ∪ X0", at(), graph.id(x)));
                        }
                        let paths = escaping_paths(&att.graph, a, b, k, 1_000_000).unwrap();
                        let direct: BTreeSet<usize> = paths.iter().map(|p| p[1]).collect();
                        let lib: BTreeSet<usize> = f.escaping_attached.iter().copied().collect();
                        if direct != lib {
                            return fail(format!(
                                "{}: direct enumeration disagrees with the escaping set",
                                at()
                            ));
                        }
                        for p in &paths {
                            let audit = f.audit_path(p, graph, &att.graph, act, &scheme).unwrap();
                            if let Some(why) = audit.failure {
                                return fail(format!("{}: path {p:?}: {why}", at()));
                            }
                            audited += 1;
                        }
                        filtrations += 1;
                    }
                }
            }
        }
    }
    ok(format!(
        "{filtrations} filtrations, {audited} escaping paths audited"
    ))
}

fn relative_generators(group: &Group, h: &Subgroup) -> Vec<Element> {
    group
        .generators()
        .iter()
        .map(|g| g.element.clone())
        .filter(|g| !h.contains(g))
        .collect()
}

fn ac5() -> Outcome {
    let mut cases: Vec<(String, GGraph, Arc<Subgroup>)> = Vec::new();
    let f2 = Arc::new(corpus::f2());
    let h = Arc::new(Subgroup::free_letters(&f2, &["a".into()]).unwrap());
    let b = f2.parse_element("b").unwrap();
    let coned = build_coned_off(f2.clone(), h.clone(), vec![b], 4, DEFAULT_CAP).unwrap();
    cases.push(("coned-off(F2, <a>, {b}), L=4".into(), coned.ggraph(), h));
    for Instance {
        name,
        ggraph,
        subgroup,
    } in corpus::finite_instances()
    {
        if subgroup.order() != Some(1) {
            cases.push((name, ggraph, subgroup));
        }
    }
    let mut summary = Vec::new();
    for (name, gg, h) in cases {
        let group = gg.action.group().clone();
        let s = relative_generators(&group, &h);
        let t = match thicken(&gg, &h, &s, None) {
            Ok(t) => t,
            Err(e) => return fail(format!("{name}: thickening failed: {e}")),
        };
        let required = t.plan.required_edges(&t.ggraph).unwrap();
        if let Some((edge, _)) = required.iter().find(|(_, present)| !present) {
            return fail(format!("{name}: thick edge {edge:?} missing"));
        }
        let x = extract_x(&t.ggraph, &t.plan).unwrap();
        let cmp = coned_off_qi_witness(&t.ggraph, &t.plan, &x, h).unwrap();
        if !cmp.witness.pass || cmp.witness.violations != 0 {
            return fail(format!("{name}: {:?}", cmp.witness.first_violation));
        }
        summary.push(format!("{name}: {} pairs", cmp.witness.pairs_checked));
    }
    ok(summary.join("; "))
}

fn coned_family(
    group: Group,
    h: &[&str],
    x: &str,
    radii: std::ops::RangeInclusive<usize>,
) -> Vec<(usize, SimplicialGraph)> {
    let group = Arc::new(group);
    let gens = h.iter().map(|g| group.parse_element(g).unwrap()).collect();
    let h = Arc::new(Subgroup::generated(&group, gens, DEFAULT_CAP).unwrap());
    let x = vec![group.parse_element(x).unwrap()];
    radii
        .map(|l| {
            (
                l,
                build_coned_off(group.clone(), h.clone(), x.clone(), l, DEFAULT_CAP)
                    .unwrap()
                    .graph,
            )
        })
        .collect()
}

fn ac7() -> Outcome {
    let free = coned_family(corpus::f2(), &["a"], "b", 3..=6);
    let abelian = coned_family(corpus::z2(), &["y"], "x", 3..=6);
    let probe = |fam: &[(usize, SimplicialGraph)]| {
        let refs: Vec<(usize, &SimplicialGraph)> = fam.iter().map(|(l, g)| (*l, g)).collect();
        fineness_probe(&refs, "H", 4).unwrap()
    };
    let (pf, pz) = (probe(&free), probe(&abelian));
    let detail = format!(
        "F2: {:?}; Z2: {:?} (growing at k={:?})",
        pf.verdict, pz.verdict, pz.growing_at
    );
    if pf.verdict == Stability::Stable && pz.verdict == Stability::Growing {
        ok(detail)
    } else {
        fail(detail)
    }
}

fn ac8() -> Outcome {
    let mut rng_graphs = corpus::random_graphs(SEED ^ 8, 40, 20);
    for g in &mut rng_graphs {
        // spanning tree of the first component: keep BFS tree edges only
        let d = finegraph::metrics::bfs(g, 0, None);
        let mut edges = Vec::new();
        for v in 1..g.vertex_count() {
            if let Some(&p) = g
                .neighbors(v)
                .iter()
                .find(|&&p| d[v] != u32::MAX && d[p] + 1 == d[v])
            {
                edges.push((p, v));
            }
        }
        let keep: Vec<usize> = (0..g.vertex_count())
            .filter(|&v| d[v] != u32::MAX)
            .collect();
        let ids: Vec<String> = keep.iter().map(|&v| g.id(v).to_string()).collect();
        let pos = |v: usize| keep.iter().position(|&k| k == v).unwrap();
        *g = SimplicialGraph::new(ids, edges.into_iter().map(|(a, b)| (pos(a), pos(b)))).unwrap();
    }
    for t in &rng_graphs {
        let est = hyperbolicity_delta(t, None, true).unwrap();
        if est.delta != 0.0 || est.delta_all_basepoints != Some(0.0) {
            return fail(format!(
                "tree with {} vertices has δ={}",
                t.vertex_count(),
                est.delta
            ));
        }
    }
    let ids = (0..8).map(|i| format!("c{i}")).collect();
    let c8 = SimplicialGraph::new(ids, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
    let est = hyperbolicity_delta(&c8, None, true).unwrap();
    let c8_doubled = four_point_doubled(&floyd(&adjacency(&c8), None));
    if est.delta_all_basepoints != Some(c8_doubled as f64 / 2.0) || est.delta_doubled > c8_doubled {
        return fail(format!(
            "C8: δ={:?}, oracle {}",
            est.delta_all_basepoints,
            c8_doubled as f64 / 2.0
        ));
    }

    let s3 = Arc::new(corpus::s3());
    let h = Arc::new(
        Subgroup::generated(&s3, vec![s3.parse_element("t").unwrap()], DEFAULT_CAP).unwrap(),
    );
    let x = vec![s3.parse_element("s").unwrap()];
    let (e, t) = (s3.identity(), s3.parse_element("t").unwrap());
    let window = Arc::new(s3.full_window(DEFAULT_CAP).unwrap());
    let rel = RelativeCayleyGraph::new(s3.clone(), h.clone(), &x, window.clone()).unwrap();
    let coned = ConedOffGraph::new(s3.clone(), h.clone(), x.clone(), window).unwrap();
    let lib_hat = hat_distance(&rel, &e, &t).unwrap().finite();
    let g = &coned.graph;
    let lib_angle = angle_distance(
        g,
        coned.apex(),
        g.vertex("e").unwrap(),
        g.vertex(&s3.format_element(&t)).unwrap(),
    )
    .unwrap();
    let oracle = FiniteConedOff::new(&s3, &h, &x);
    let (oi, ot) = (oracle.index[&e], oracle.index[&t]);
    let o_hat = oracle.admissible_from(&s3, oi)[ot];
    let o_angle = floyd(&oracle.hat, Some(oracle.apex()))[oi][ot];
    if lib_hat != Some(3) || lib_angle != Dist::Finite(4) || o_hat != 3 || o_angle != 4 {
        return fail(format!(
            "d̂: lib {lib_hat:?} oracle {o_hat}; ∠: lib {lib_angle} oracle {o_angle}"
        ));
    }
    ok(format!(
        "{} trees δ=0; C8 δ={}; d̂(e,(1 2 3))=3, ∠=4",
        rng_graphs.len(),
        c8_doubled as f64 / 2.0
    ))
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if let Some(limit) = limit.filter(|&l| took > l) {
        out = fail(format!(
            "{} (took {:.1}s, limit {}s)",
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        ));
    }
    (out, took)
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let mut results: Vec<(&str, &str, Outcome, Duration)> = Vec::new();
    let (o, d) = timed(secs(60), ac1);
    results.push(("AC1", "escaping-set / angle-ball sandwich", o, d));
    let (o, d) = timed(secs(120), ac2);
    results.push(("AC2", "coned-off metric comparability", o, d));
    let start = Instant::now();
    let (o3, o6) = ac3_ac6();
    let d36 = start.elapsed();
    results.push(("AC3", "attachment distance sandwich", o3, d36));
    let (o, d) = timed(None, ac4);
    results.push(("AC4", "W/Z filtration", o, d));
    let (o, d) = timed(None, ac5);
    results.push(("AC5", "coned-off comparison constants (3, 2)", o, d));
    results.push(("AC6", "at most two new orbits per attachment", o6, d36));
    let (o, d) = timed(secs(180), ac7);
    results.push(("AC7", "fineness separation", o, d));
    let (o, d) = timed(None, ac8);
    results.push(("AC8", "δ sanity and worked values", o, d));

    let mut failed = 0;
    for (id, what, o, d) in &results {
        let mark = if o.pass { "PASS" } else { "FAIL" };
        println!("{id} {mark} {what} [{:.2}s] {}", d.as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
