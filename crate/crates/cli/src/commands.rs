use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use finegraph::conedoff::{ConedOffGraph, HatDist, RelLabel, RelativeCayleyGraph};
use finegraph::constructions::{
    alpha_replacement, coned_off_qi_witness, distance_sandwich, escaping_paths, extract_x, thicken,
    wz_filtration, ReplacementScheme,
};
use finegraph::corpus::random_graphs;
use finegraph::format::{window_for, GraphFile, GroupFile, Record, Report};
use finegraph::ggraph::{
    attach_edge_orbit, orbit_decomposition, validate_gh_graph, GGraph, ValidateOptions, Verdict,
};
use finegraph::graph::SimplicialGraph;
use finegraph::group::{Element, Group, Subgroup, Window};
use finegraph::metrics::{
    angle_ball, angle_distance, escaping_set, fineness_probe, geodesic, hyperbolicity_delta,
    path_distance, Stability,
};
use finegraph::{Error, Result};

use crate::{Command, Common, Lemma};

/// Largest graph for which the δ estimate is attempted.
const DELTA_LIMIT: usize = 800;
const PATH_CAP: usize = 2_000_000;

struct Loaded {
    group: Arc<Group>,
    h: Arc<Subgroup>,
    /// Subgroup given explicitly in the group file.
    has_subgroup: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn load_group(path: Option<&PathBuf>, cap: usize) -> Result<Loaded> {
    match path {
        Some(p) => {
            let file = GroupFile::parse(&read(p)?)?;
            let (group, h) = file.build(cap)?;
            Ok(Loaded {
                group,
                h,
                has_subgroup: file.subgroup.is_some(),
            })
        }
        None => {
            let group = Arc::new(Group::free(vec![])?);
            let h = Arc::new(Subgroup::trivial(&group));
            Ok(Loaded {
                group,
                h,
                has_subgroup: false,
            })
        }
    }
}

/// Splits a comma-separated element list, ignoring commas inside parentheses.
fn split_elements(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out.into_iter()
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect()
}

fn parse_elements(group: &Group, s: &str) -> Result<Vec<Element>> {
    split_elements(s)
        .iter()
        .map(|x| group.parse_element(x))
        .collect()
}

fn window(group: &Group, common: &Common, radius: usize) -> Result<Arc<Window>> {
    window_for(group, radius, common.cap)
}

fn load_graph(path: &Path, group: Arc<Group>, window: Arc<Window>) -> Result<GGraph> {
    GraphFile::parse(&read(path)?)?.build(group, window)
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn finish(report: &Report, out: Option<&PathBuf>) -> Result<u8> {
    write_out(out, &report.to_json_lines())?;
    Ok(report.verdict().exit_code() as u8)
}

fn fmt(group: &Group, g: &Element) -> String {
    group.format_element(g)
}

fn graph_text(gg: &GGraph) -> Result<String> {
    Ok(GraphFile::from_ggraph(gg)?.to_json() + "\n")
}

/// Graph from `--graph`, or the coned-off graph of `--gens` at `radius`.
fn input_graph(
    l: &Loaded,
    graph: Option<&PathBuf>,
    gens: &str,
    common: &Common,
    radius: usize,
) -> Result<GGraph> {
    let w = window(&l.group, common, radius)?;
    match graph {
        Some(p) => load_graph(p, l.group.clone(), w),
        None => {
            let x = parse_elements(&l.group, gens)?;
            Ok(ConedOffGraph::new(l.group.clone(), l.h.clone(), x, w)?.ggraph())
        }
    }
}

fn instance_name(graph: Option<&PathBuf>, gens: &str, common: &Common) -> String {
    match graph {
        Some(p) => p.file_name().map_or_else(
            || p.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        ),
        None => format!("coned-off(X={{{gens}}}, L={})", common.window),
    }
}

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::BuildConedOff {
            group,
            gens,
            common,
        } => {
            let l = load_group(Some(&group), common.cap)?;
            let coned = input_graph(&l, None, &gens, &common, common.window as usize)?;
            write_out(common.out.as_ref(), &graph_text(&coned)?)?;
            Ok(0)
        }
        Command::BuildRelative {
            group,
            gens,
            common,
        } => build_relative(&group, &gens, &common),
        Command::HatDistance {
            group,
            gens,
            from,
            to,
            common,
        } => hat(&group, &gens, &from, &to, &common),
        Command::Attach {
            group,
            graph,
            u,
            v,
            common,
        } => attach(group.as_ref(), &graph, &u, &v, &common),
        Command::Analyze {
            group,
            graph,
            gens,
            fineness,
            vertex,
            k_max,
            common,
        } => analyze(
            group.as_ref(),
            graph.as_ref(),
            &gens,
            fineness,
            vertex.as_deref(),
            k_max,
            &common,
        ),
        Command::Thicken {
            group,
            graph,
            gens,
            u0,
            common,
        } => {
            let l = load_group(Some(&group), common.cap)?;
            let gg = load_graph(
                &graph,
                l.group.clone(),
                window(&l.group, &common, common.window as usize)?,
            )?;
            let s = parse_elements(&l.group, &gens)?;
            let t = thicken(&gg, &l.h, &s, u0.as_deref())?;
            let required = t.plan.required_edges(&t.ggraph)?;
            if let Some((edge, _)) = required.iter().find(|(_, ok)| !ok) {
                eprintln!(
                    "finegraph: thick edge {{{}, {}}} is missing",
                    edge.0, edge.1
                );
                return Ok(1);
            }
            write_out(common.out.as_ref(), &graph_text(&t.ggraph)?)?;
            eprintln!("{}", serde_json::to_string(&t.plan)?);
            Ok(0)
        }
        Command::ExtractX {
            group,
            graph,
            u0,
            common,
        } => {
            let l = load_group(Some(&group), common.cap)?;
            let gg = load_graph(
                &graph,
                l.group.clone(),
                window(&l.group, &common, common.window as usize)?,
            )?;
            let t = thicken(&gg, &l.h, &[], u0.as_deref())?;
            let mut report = Report::default();
            let name = instance_name(Some(&graph), "", &common);
            if !t.plan.attachments.is_empty() || t.plan.added_trivial_vertices > 0 {
                let missing: Vec<_> = t.plan.attachments.iter().map(|a| &a.edge).collect();
                report.push(Record::new(
                    "input-is-thick",
                    name,
                    Verdict::Fail,
                    json!({"missing-orbits": missing, "added-trivial-vertices": t.plan.added_trivial_vertices}),
                ));
                return finish(&report, common.out.as_ref());
            }
            let x = extract_x(&t.ggraph, &t.plan)?;
            let verdict = if x.truncated {
                Verdict::WindowInconclusive
            } else {
                Verdict::Pass
            };
            let items: Vec<Value> = x
                .formatted
                .iter()
                .zip(&x.provenance)
                .map(|(g, p)| json!({"element": g, "provenance": p}))
                .collect();
            report.push(Record::new(
                "extract-x",
                name,
                verdict,
                json!({"u0": t.plan.u0, "v0": t.plan.v0, "reps": t.plan.reps, "x": items, "truncated": x.truncated}),
            ));
            finish(&report, common.out.as_ref())
        }
        Command::Certify {
            lemma,
            group,
            graph,
            gens,
            s,
            u,
            v,
            k_max,
            samples,
            common,
        } => {
            let mut report = Report::default();
            match lemma {
                Lemma::Escaping => certify_escaping(&mut report, &common, samples, k_max),
                Lemma::Qi53 => {
                    let l = load_group(group.as_ref(), common.cap)?;
                    let gg =
                        input_graph(&l, graph.as_ref(), &gens, &common, common.window as usize)?;
                    let name = instance_name(graph.as_ref(), &gens, &common);
                    certify_qi(&mut report, &l, &gg, s.as_deref(), &name)?;
                }
                Lemma::Alpha | Lemma::Wz => {
                    let l = load_group(group.as_ref(), common.cap)?;
                    let radius = common.window as usize;
                    let gg = input_graph(&l, graph.as_ref(), &gens, &common, radius)?;
                    let next = if graph.is_none() && !l.group.is_finite() {
                        Some(input_graph(&l, None, &gens, &common, radius + 1)?)
                    } else {
                        None
                    };
                    let name = instance_name(graph.as_ref(), &gens, &common);
                    let pairs = match (u, v) {
                        (Some(u), Some(v)) => vec![(gg.graph.vertex(&u)?, gg.graph.vertex(&v)?)],
                        (None, None) => attachment_pairs(&gg),
                        _ => {
                            return Err(Error::Invalid("give both --u and --v, or neither".into()))
                        }
                    };
                    for (a, b) in pairs {
                        if lemma == Lemma::Alpha {
                            certify_alpha(&mut report, &gg, next.as_ref(), a, b, &name)?;
                        } else {
                            certify_wz(&mut report, &gg, a, b, k_max, &name)?;
                        }
                    }
                }
            }
            finish(&report, common.out.as_ref())
        }
    }
}

fn build_relative(group: &PathBuf, gens: &str, common: &Common) -> Result<u8> {
    let l = load_group(Some(group), common.cap)?;
    let w = window(&l.group, common, common.window as usize)?;
    let x = parse_elements(&l.group, gens)?;
    let rel = RelativeCayleyGraph::new(l.group.clone(), l.h.clone(), &x, w.clone())?;
    let simple = rel.simple_graph()?;
    let degrees: Vec<usize> = (0..rel.vertex_count()).map(|v| rel.degree(v)).collect();
    let (mut x_arcs, mut h_arcs) = (0usize, 0usize);
    for v in 0..rel.vertex_count() {
        for arc in rel.arcs(v) {
            match arc.label {
                RelLabel::X(_) => x_arcs += 1,
                RelLabel::H(_) => h_arcs += 1,
            }
        }
    }
    let identity = rel
        .arcs(0)
        .iter()
        .map(|a| {
            let (kind, g) = match &a.label {
                RelLabel::X(g) => ("x", g),
                RelLabel::H(g) => ("h", g),
            };
            json!({"to": fmt(&l.group, w.element(a.to)), "label": kind, "letter": fmt(&l.group, g)})
        })
        .collect::<Vec<_>>();
    let mut report = Report::default();
    report.push(Record::new(
        "relative-cayley",
        format!("X={{{gens}}}, L={}", common.window),
        Verdict::Pass,
        json!({
            "vertices": rel.vertex_count(),
            "x-arcs": x_arcs,
            "h-arcs": h_arcs,
            "min-degree": degrees.iter().min(),
            "max-degree": degrees.iter().max(),
            "simple-edges": simple.edge_count(),
            "connected": simple.is_connected(),
            "complete-window": w.is_complete(),
            "arcs-at-identity": identity,
        }),
    ));
    finish(&report, common.out.as_ref())
}

fn hat(group: &PathBuf, gens: &str, from: &str, to: &str, common: &Common) -> Result<u8> {
    let l = load_group(Some(group), common.cap)?;
    let w = window(&l.group, common, common.window as usize)?;
    let x = parse_elements(&l.group, gens)?;
    let (h, k) = (l.group.parse_element(from)?, l.group.parse_element(to)?);
    let rel = RelativeCayleyGraph::new(l.group.clone(), l.h.clone(), &x, w.clone())?;
    let value = finegraph::conedoff::hat_distance(&rel, &h, &k)?;
    let coned = ConedOffGraph::new(l.group.clone(), l.h.clone(), x, w)?;
    let (hi, ki) = match (coned.window.index_of(&h), coned.window.index_of(&k)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::WindowExceeded(format!(
                "{from} or {to} lies outside the window"
            )))
        }
    };
    let angle = angle_distance(&coned.graph, coned.apex(), hi, ki)?;
    let verdict = match value {
        HatDist::InfiniteAtWindow => Verdict::WindowInconclusive,
        _ => Verdict::Pass,
    };
    let mut report = Report::default();
    report.push(Record::new(
        "hat-distance",
        format!("X={{{gens}}}, L={}", common.window),
        verdict,
        json!({"from": fmt(&l.group, &h), "to": fmt(&l.group, &k), "value": value, "angle-at-H": angle}),
    ));
    finish(&report, common.out.as_ref())
}

fn attach(group: Option<&PathBuf>, graph: &Path, u: &str, v: &str, common: &Common) -> Result<u8> {
    let l = load_group(group, common.cap)?;
    let gg = load_graph(
        graph,
        l.group.clone(),
        window(&l.group, common, common.window as usize)?,
    )?;
    let (a, b) = (gg.graph.vertex(u)?, gg.graph.vertex(v)?);
    let att = attach_edge_orbit(&gg.graph, &gg.action, a, b)?;
    let rec = att.record(&gg.action);
    let out = GGraph {
        graph: att.graph,
        action: gg.action.clone(),
        declared: gg.declared.clone(),
    };
    write_out(common.out.as_ref(), &graph_text(&out)?)?;
    eprintln!("{}", serde_json::to_string(&rec)?);
    Ok(if rec.max_new_neighbor_orbits > 2 {
        1
    } else {
        0
    })
}

fn analyze(
    group: Option<&PathBuf>,
    graph: Option<&PathBuf>,
    gens: &str,
    fineness: bool,
    vertex: Option<&str>,
    k_max: usize,
    common: &Common,
) -> Result<u8> {
    let l = load_group(group, common.cap)?;
    let radius = common.window as usize;
    let family: Vec<GGraph> = match graph {
        Some(_) => vec![input_graph(&l, graph, gens, common, radius)?],
        None if l.group.is_finite() => vec![input_graph(&l, None, gens, common, radius)?],
        None => (radius.min(3)..=radius)
            .map(|r| input_graph(&l, None, gens, common, r))
            .collect::<Result<_>>()?,
    };
    let gg = family.last().expect("nonempty");
    let g = &gg.graph;
    let name = instance_name(graph, gens, common);
    let complete = gg.action.window().is_complete();
    let mut report = Report::default();

    let labels = g.components();
    let components = g.component_count();
    let witness = if components > 1 {
        let other = g
            .vertices_in_order()
            .into_iter()
            .find(|&x| labels[x] != labels[g.vertices_in_order()[0]]);
        json!({"components": components, "separated": [g.id(g.vertices_in_order()[0]), other.map(|x| g.id(x))]})
    } else {
        json!({"components": components})
    };
    let verdict = if components <= 1 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    report.push(Record::new("connectivity", name.clone(), verdict, witness));

    if components == 1 && g.vertex_count() <= DELTA_LIMIT {
        let est = hyperbolicity_delta(g, None, g.vertex_count() <= 200)?;
        report.push(Record::new(
            "hyperbolicity-estimate",
            name.clone(),
            Verdict::Pass,
            json!({"estimate": est, "complete-window": complete, "decides-hyperbolicity": false}),
        ));
    }

    let orbits = orbit_decomposition(g, &gg.action);
    report.push(Record::new(
        "orbits",
        name.clone(),
        Verdict::Pass,
        json!({
            "vertex-orbits": orbits.vertex_orbit_count(),
            "edge-orbits": orbits.edge_orbit_count(),
            "representatives": orbits.vertex_reps.iter().map(|&v| g.id(v)).collect::<Vec<_>>(),
            "truncated": orbits.truncated,
        }),
    ));

    if l.has_subgroup {
        let refs: Vec<&GGraph> = family.iter().collect();
        let opts = ValidateOptions {
            k_max,
            ..ValidateOptions::default()
        };
        let r = validate_gh_graph(&refs, &l.h, &opts)?;
        report.push(Record::new(
            "gh-graph",
            name.clone(),
            r.verdict,
            serde_json::to_value(&r)?,
        ));
    }

    if fineness {
        let targets: Vec<String> = match vertex {
            Some(v) => vec![g.vertex(v).map(|x| g.id(x).to_string())?],
            // The smallest window's ids are present in every larger one.
            None => {
                let first = &family[0];
                first
                    .infinite_stabilizer_vertices()
                    .into_iter()
                    .map(|x| first.graph.id(x).to_string())
                    .collect()
            }
        };
        if targets.is_empty() {
            return Err(Error::Invalid(
                "no vertex to probe: give --vertex or declare infinite stabilizers".into(),
            ));
        }
        let fam: Vec<(usize, &SimplicialGraph)> = family
            .iter()
            .map(|x| (x.action.window().radius(), &x.graph))
            .collect();
        for t in targets {
            let probe = fineness_probe(&fam, &t, k_max)?;
            let verdict = match probe.verdict {
                Stability::Stable if complete || fam.len() >= 2 => Verdict::Pass,
                _ => Verdict::WindowInconclusive,
            };
            report.push(Record::new(
                "fineness-probe",
                name.clone(),
                verdict,
                serde_json::to_value(&probe)?,
            ));
        }
    }
    finish(&report, common.out.as_ref())
}

/// `{u, v}` with `u` a vertex-orbit representative and `v` a non-neighbor in
/// the same component.
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

fn edge_name(g: &SimplicialGraph, u: usize, v: usize) -> String {
    format!("{{{}, {}}}", g.id(u), g.id(v))
}

fn ids(g: &SimplicialGraph, path: &[usize]) -> Vec<String> {
    path.iter().map(|&x| g.id(x).to_string()).collect()
}

fn certify_alpha(
    report: &mut Report,
    gg: &GGraph,
    next: Option<&GGraph>,
    u: usize,
    v: usize,
    name: &str,
) -> Result<()> {
    let (g, act) = (&gg.graph, &gg.action);
    let complete = act.window().is_complete();
    let inst = format!("{name} + {}", edge_name(g, u, v));
    let att = attach_edge_orbit(g, act, u, v)?;
    let scheme = ReplacementScheme::new(g, act, u, v)?;
    let ell = scheme.length;

    let next_graphs = match next {
        Some(big) => {
            let (bu, bv) = (big.graph.vertex(g.id(u))?, big.graph.vertex(g.id(v))?);
            Some((
                big.graph.clone(),
                attach_edge_orbit(&big.graph, &big.action, bu, bv)?.graph,
            ))
        }
        None => None,
    };
    let s = distance_sandwich(
        g,
        &att.graph,
        ell,
        next_graphs.as_ref().map(|(a, b)| (a, b)),
    )?;
    let verdict = match &s.violation {
        None => Verdict::Pass,
        Some(_) if complete || next.is_some() => Verdict::Fail,
        Some(_) => Verdict::WindowInconclusive,
    };
    report.push(Record::new(
        "attachment-distance-sandwich",
        inst.clone(),
        verdict,
        serde_json::to_value(&s)?,
    ));

    let orbits = attach_orbits_record(&att, act);
    report.push(Record::new(
        "new-neighbor-orbits",
        inst.clone(),
        orbits.0,
        orbits.1,
    ));

    // α-replacement of lexicographically least geodesics in Γ′ from orbit representatives.
    let reps = orbit_decomposition(&att.graph, act).vertex_reps;
    let mut checked = 0usize;
    let mut verdict = Verdict::Pass;
    let mut witness = Value::Null;
    'outer: for &x in &reps {
        for y in att.graph.vertices_in_order() {
            let Some(gp) = geodesic(&att.graph, x, y, None) else {
                continue;
            };
            let gamma = match alpha_replacement(&gp, g, &att.graph, act, &scheme) {
                Ok(p) => p,
                Err(e) if e.is_window_exceeded() => {
                    verdict = verdict.and(Verdict::WindowInconclusive);
                    continue;
                }
                Err(e) => return Err(e),
            };
            checked += 1;
            let len_ok = gamma.len() - 1 <= ell * (gp.len() - 1);
            let covers = gp.iter().all(|p| gamma.contains(p));
            if !(len_ok && covers && g.is_path(&gamma)) {
                verdict = Verdict::Fail;
                witness = json!({"path": ids(g, &gp), "replacement": ids(g, &gamma), "ell": ell});
                break 'outer;
            }
        }
    }
    if witness.is_null() {
        witness = json!({"paths-checked": checked, "ell": ell, "alpha": ids(g, &scheme.alpha)});
    }
    report.push(Record::new("alpha-replacement", inst, verdict, witness));
    Ok(())
}

fn attach_orbits_record(
    att: &finegraph::ggraph::Attachment,
    act: &finegraph::ggraph::GroupAction,
) -> (Verdict, Value) {
    let (max, at) = att.max_new_neighbor_orbits(act);
    let verdict = if max <= 2 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let g = &att.graph;
    let witness = match at {
        Some(a) if max > 2 => json!({
            "vertex": g.id(a),
            "orbits": att.new_neighbor_orbits(act, a).iter().map(|o| ids(g, o)).collect::<Vec<_>>(),
        }),
        _ => json!({"max-orbits": max, "at": at.map(|a| g.id(a))}),
    };
    (verdict, witness)
}

fn certify_wz(
    report: &mut Report,
    gg: &GGraph,
    u: usize,
    v: usize,
    k_max: usize,
    name: &str,
) -> Result<()> {
    let (g, act) = (&gg.graph, &gg.action);
    let inst = format!("{name} + {}", edge_name(g, u, v));
    let att = attach_edge_orbit(g, act, u, v)?;
    let scheme = ReplacementScheme::new(g, act, u, v)?;
    let mut chain = (Verdict::Pass, Value::Null);
    let mut contain = (Verdict::Pass, Value::Null);
    let mut audit = (Verdict::Pass, Value::Null);
    let (mut filtrations, mut skipped, mut paths) = (0usize, 0usize, 0usize);
    for a in g.vertices_in_order() {
        for b in g.vertices_in_order() {
            if a == b {
                continue;
            }
            for k in 1..=k_max {
                let at = || json!({"a": g.id(a), "b": g.id(b), "k": k});
                let f = match wz_filtration(g, &att.graph, act, &scheme, a, b, k) {
                    Ok(f) => f,
                    Err(e) if e.is_window_exceeded() => {
                        chain.0 = chain.0.and(Verdict::WindowInconclusive);
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                filtrations += 1;
                if let (Some(j), Verdict::Pass) = (f.chain_violation(), chain.0) {
                    chain = (Verdict::Fail, json!({"at": at(), "j": j}));
                }
                if let (Some(x), Verdict::Pass) = (f.containment_violation(), contain.0) {
                    contain = (Verdict::Fail, json!({"at": at(), "vertex": g.id(x)}));
                }
                for p in escaping_paths(&att.graph, a, b, k, PATH_CAP)? {
                    match f.audit_path(&p, g, &att.graph, act, &scheme) {
                        Ok(r) => {
                            paths += 1;
                            if let (Some(why), Verdict::Pass) = (r.failure, audit.0) {
                                audit = (
                                    Verdict::Fail,
                                    json!({"at": at(), "path": ids(g, &p), "reason": why}),
                                );
                            }
                        }
                        Err(e) if e.is_window_exceeded() => {
                            audit.0 = audit.0.and(Verdict::WindowInconclusive)
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    let fill = |w: Value, extra: Value| if w.is_null() { extra } else { w };
    let counts = json!({"filtrations": filtrations, "outside-window": skipped, "k-max": k_max, "ell": scheme.length});
    report.push(Record::new(
        "wz-chain",
        inst.clone(),
        chain.0,
        fill(chain.1, counts.clone()),
    ));
    report.push(Record::new(
        "wz-containment",
        inst.clone(),
        contain.0,
        fill(contain.1, counts),
    ));
    report.push(Record::new(
        "wz-path-audit",
        inst,
        audit.0,
        fill(audit.1, json!({"paths": paths})),
    ));
    Ok(())
}

fn certify_qi(
    report: &mut Report,
    l: &Loaded,
    gg: &GGraph,
    s: Option<&str>,
    name: &str,
) -> Result<()> {
    let s: Vec<Element> = match s {
        Some(s) => parse_elements(&l.group, s)?,
        None => l
            .group
            .generators()
            .iter()
            .map(|g| g.element.clone())
            .filter(|g| !l.h.contains(g))
            .collect(),
    };
    let t = thicken(gg, &l.h, &s, None)?;
    let required = t.plan.required_edges(&t.ggraph)?;
    let missing: Vec<_> = required
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(e, _)| e.clone())
        .collect();
    let verdict = if missing.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    report.push(Record::new(
        "thick-edges",
        name,
        verdict,
        json!({"plan": t.plan, "missing": missing}),
    ));
    let x = extract_x(&t.ggraph, &t.plan)?;
    let absent: Vec<String> = s
        .iter()
        .filter(|g| !x.contains(g))
        .map(|g| fmt(&l.group, g))
        .collect();
    let verdict = if absent.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    report.push(Record::new(
        "s-in-x",
        name,
        verdict,
        json!({"x": x.formatted, "absent": absent}),
    ));
    let cmp = coned_off_qi_witness(&t.ggraph, &t.plan, &x, l.h.clone())?;
    let verdict = if cmp.witness.pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    report.push(Record::new(
        "coned-off-comparison",
        name,
        verdict,
        serde_json::to_value(&cmp)?,
    ));
    Ok(())
}

fn certify_escaping(report: &mut Report, common: &Common, samples: usize, k_max: usize) {
    for (i, g) in random_graphs(common.seed, samples, 25).iter().enumerate() {
        let inst = format!("random(seed={}, #{i}, n={})", common.seed, g.vertex_count());
        let mut cases = 0usize;
        let mut witness = Value::Null;
        'graph: for u in 0..g.vertex_count() {
            for v in (0..g.vertex_count()).filter(|&v| v != u) {
                for k in 1..=k_max {
                    let set = escaping_set(g, u, v, k).expect("valid arguments");
                    for &w in &set.members {
                        let outer = angle_ball(g, u, w, 2 * k - 2).expect("w is a neighbor");
                        let inner = angle_ball(g, u, w, k).expect("w is a neighbor");
                        let around = escaping_set(g, u, w, k + 1).expect("valid arguments");
                        cases += 1;
                        let escapes = set.members.iter().find(|x| !outer.contains(**x));
                        let missed = inner.members.iter().find(|x| !around.contains(**x));
                        if escapes.is_some() || missed.is_some() {
                            witness = json!({
                                "u": g.id(u), "v": g.id(v), "k": k, "w": g.id(w),
                                "outside-ball": escapes.map(|&x| g.id(x)),
                                "outside-escaping-set": missed.map(|&x| g.id(x)),
                            });
                            break 'graph;
                        }
                    }
                }
            }
        }
        let verdict = if witness.is_null() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        if witness.is_null() {
            witness = json!({"cases": cases, "k-max": k_max});
        }
        report.push(Record::new(
            "escaping-angle-sandwich",
            inst,
            verdict,
            witness,
        ));
    }
}
