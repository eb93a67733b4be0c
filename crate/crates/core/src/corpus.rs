//! Standard small groups, G-graphs built from them, and seeded random graphs.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conedoff::{cone_id, ConedOffGraph};
use crate::error::{Error, Result};
use crate::ggraph::{GGraph, GroupAction, StabilizerTag};
use crate::graph::SimplicialGraph;
use crate::group::{CosetTable, Element, FiniteTable, Group, Subgroup, Window, DEFAULT_CAP};

/// `S₃` generated by `s = (1 2)` and `t = (1 2 3)`.
pub fn s3() -> Group {
    Group::permutation(
        3,
        vec![("s".into(), vec![1, 0, 2]), ("t".into(), vec![1, 2, 0])],
    )
    .expect("valid")
}

/// The dihedral group of order 8 acting on the corners of a square:
/// `r = (1 2 3 4)`, `f = (2 4)`.
pub fn d4() -> Group {
    Group::permutation(
        4,
        vec![
            ("r".into(), vec![1, 2, 3, 0]),
            ("f".into(), vec![0, 3, 2, 1]),
        ],
    )
    .expect("valid")
}

pub fn z12() -> Group {
    Group::cyclic(12, "t").expect("valid")
}

/// `Z/2 * Z/3` with factor generators `a` and `b`.
pub fn z2_free_z3() -> Group {
    Group::free_product(vec![
        (
            FiniteTable::cyclic(2).expect("valid"),
            vec![("a".into(), 1)],
        ),
        (
            FiniteTable::cyclic(3).expect("valid"),
            vec![("b".into(), 1)],
        ),
    ])
    .expect("valid")
}

pub fn f2() -> Group {
    Group::free(vec!["a".into(), "b".into()]).expect("valid")
}

pub fn z2() -> Group {
    Group::free_abelian(vec!["x".into(), "y".into()]).expect("valid")
}

/// The Cayley graph on `window` with edges `{g, gs}` for the generators,
/// acted on by left multiplication.
pub fn cayley_graph(group: Arc<Group>, window: Arc<Window>) -> Result<GGraph> {
    let ids = window
        .elements()
        .iter()
        .map(|g| group.format_element(g))
        .collect();
    let mut edges = Vec::new();
    for (i, g) in window.elements().iter().enumerate() {
        for s in group.generators() {
            if let Some(j) = window.index_of(&group.multiply(g, &s.element)) {
                if i != j {
                    edges.push((i, j));
                }
            }
        }
    }
    let graph = SimplicialGraph::new(ids, edges)?;
    let action = GroupAction::from_fn(
        group.clone(),
        window.clone(),
        graph.vertex_count(),
        |i, j| window.index_of(&group.multiply(window.element(i), window.element(j))),
    );
    let declared = vec![Some(StabilizerTag::Finite); graph.vertex_count()];
    Ok(GGraph {
        graph,
        action,
        declared,
    })
}

/// Vertices `G/K_1 ⊔ … ⊔ G/K_m` (ids `gK` with the given suffixes), edges
/// `{gK_i, gK_j}` for every `g` and `i < j`. Finite groups only. The coset
/// `K_1` is declared `h`, its translates `conj-h`, everything else finite.
pub fn coset_graph(group: Arc<Group>, parts: &[(Arc<Subgroup>, &str)]) -> Result<GGraph> {
    if !group.is_finite() {
        return Err(Error::Unsupported(
            "coset graphs are built for finite groups".into(),
        ));
    }
    let window = Arc::new(group.full_window(DEFAULT_CAP)?);
    let tables: Vec<CosetTable> = parts
        .iter()
        .map(|(k, _)| CosetTable::new(&group, k, &window))
        .collect();
    let mut ids = Vec::new();
    let mut declared = Vec::new();
    // (part, representative) → vertex
    let mut vertex_of = std::collections::HashMap::new();
    for (p, ((_, suffix), table)) in parts.iter().zip(&tables).enumerate() {
        for &r in table.representatives() {
            vertex_of.insert((p, r), ids.len());
            let rep = window.element(r);
            ids.push(if p == 0 && *suffix == "H" {
                cone_id(&group, rep)
            } else if group.is_identity(rep) {
                suffix.to_string()
            } else {
                format!("{}{suffix}", group.format_element(rep))
            });
            declared.push(Some(match (p, r) {
                (0, 0) => StabilizerTag::H,
                (0, _) => StabilizerTag::ConjH,
                _ => StabilizerTag::Finite,
            }));
        }
    }
    let coset = |p: usize, g: &Element| {
        vertex_of[&(p, tables[p].lookup(&group, &parts[p].0, g).expect("finite"))]
    };
    let mut edges = Vec::new();
    for g in window.elements() {
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                edges.push((coset(i, g), coset(j, g)));
            }
        }
    }
    let graph = SimplicialGraph::new(ids, edges)?;
    let mut part_of = vec![(0, 0); graph.vertex_count()];
    for (&(p, r), &v) in &vertex_of {
        part_of[v] = (p, r);
    }
    let action = GroupAction::from_fn(
        group.clone(),
        window.clone(),
        graph.vertex_count(),
        |i, v| {
            let (p, r) = part_of[v];
            Some(coset(
                p,
                &group.multiply(window.element(i), window.element(r)),
            ))
        },
    );
    Ok(GGraph {
        graph,
        action,
        declared,
    })
}

/// A named finite G-graph with the subgroup playing the role of `H`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub ggraph: GGraph,
    pub subgroup: Arc<Subgroup>,
}

fn subgroup(group: &Group, gens: &[&str]) -> Arc<Subgroup> {
    let els = gens
        .iter()
        .map(|g| group.parse_element(g).expect("valid"))
        .collect();
    Arc::new(Subgroup::generated(group, els, DEFAULT_CAP).expect("valid"))
}

/// Finite G-graphs over `S₃`, `D₄` and `Z/12`: Cayley graphs, coned-off
/// graphs and coset graphs.
pub fn finite_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for (name, group) in [("S3", s3()), ("D4", d4()), ("Z12", z12())] {
        let group = Arc::new(group);
        let window = Arc::new(group.full_window(DEFAULT_CAP).expect("finite"));
        out.push(Instance {
            name: format!("cayley({name})"),
            ggraph: cayley_graph(group.clone(), window).expect("valid"),
            subgroup: Arc::new(Subgroup::trivial(&group)),
        });
    }
    let coned = [
        ("S3", s3(), vec!["t"], vec!["s"]),
        ("D4", d4(), vec!["r"], vec!["f"]),
        ("D4", d4(), vec!["f"], vec!["r"]),
        ("Z12", z12(), vec!["t^4"], vec!["t^3"]),
    ];
    for (name, group, h, x) in coned {
        let group = Arc::new(group);
        let label = format!("coned-off({name}, <{}>, {{{}}})", h.join(","), x.join(","));
        let h = subgroup(&group, &h);
        let xs: Vec<Element> = x
            .iter()
            .map(|g| group.parse_element(g).expect("valid"))
            .collect();
        let window = Arc::new(group.full_window(DEFAULT_CAP).expect("finite"));
        let c = ConedOffGraph::new(group.clone(), h.clone(), xs, window).expect("finite");
        out.push(Instance {
            name: label,
            ggraph: c.ggraph(),
            subgroup: h,
        });
    }
    for (name, group, h, k) in [("S3", s3(), "t", "s"), ("D4", d4(), "r", "f")] {
        let group = Arc::new(group);
        let hh = subgroup(&group, &[h]);
        let kk = subgroup(&group, &[k]);
        let gg = coset_graph(group.clone(), &[(hh.clone(), "H"), (kk, "K")]).expect("finite");
        out.push(Instance {
            name: format!("cosets({name}, <{h}>, <{k}>)"),
            ggraph: gg,
            subgroup: hh,
        });
    }
    out
}

/// A random graph with `n` vertices `v0, v1, …` and each edge present with
/// probability `p`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SimplicialGraph {
    let ids = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    SimplicialGraph::new(ids, edges).expect("valid")
}

/// `count` random graphs of at most `max_n` vertices, reproducible from `seed`.
pub fn random_graphs(seed: u64, count: usize, max_n: usize) -> Vec<SimplicialGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(3..=max_n.max(3));
            let p = rng.gen_range(0.1..0.5);
            random_graph(&mut rng, n, p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_groups_have_expected_orders() {
        assert_eq!(s3().order(), Some(6));
        assert_eq!(d4().order(), Some(8));
        assert_eq!(z12().order(), Some(12));
        assert_eq!(z2_free_z3().order(), None);
    }

    #[test]
    fn finite_instances_have_valid_actions() {
        for inst in finite_instances() {
            inst.ggraph.action.validate(&inst.ggraph.graph).unwrap();
            assert!(inst.ggraph.graph.is_connected(), "{}", inst.name);
            assert!(inst.ggraph.action.is_total(), "{}", inst.name);
            assert!(inst.ggraph.graph.vertex_count() >= 5, "{}", inst.name);
        }
    }

    #[test]
    fn coset_graph_of_s3_is_complete_bipartite() {
        let g = Arc::new(s3());
        let h = subgroup(&g, &["t"]);
        let k = subgroup(&g, &["s"]);
        let gg = coset_graph(g, &[(h, "H"), (k, "K")]).unwrap();
        assert_eq!(gg.graph.vertex_count(), 5);
        assert_eq!(gg.graph.edge_count(), 6);
    }

    #[test]
    fn random_graphs_are_reproducible() {
        assert_eq!(random_graphs(7, 5, 12), random_graphs(7, 5, 12));
        assert_ne!(random_graphs(7, 5, 12), random_graphs(8, 5, 12));
    }
}
