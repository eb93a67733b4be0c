//! JSON file formats for groups and graphs, and JSON-lines report records.
//!
//! Group file:
//!
//! ```json
//! {"kind": "permutation", "generators": ["s", "t"],
//!  "permutation-images": [[1, 0, 2], [1, 2, 0]],
//!  "subgroup": {"generators": ["t"]}}
//! ```
//!
//! `finite-table` takes `table` (row `i`, column `j` is `i·j`) and
//! `generator-elements`; `free` and `free-abelian` take only `generators`
//! (`free-rank`, if given, must match); `free-product` takes `factors`, each
//! with its own `table`, `generators` and `generator-elements`.
//!
//! Graph file: `vertices` (ids, or objects with `id` and an optional
//! `stabilizer` of `finite` / `h` / `conj-h`), `edges` as id pairs, and
//! `action` mapping each generator name to `{vertex: image}`; an image of
//! `"out"` or a missing vertex means the image lies outside the graph.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ggraph::{GGraph, GroupAction, StabilizerTag, Verdict};
use crate::graph::SimplicialGraph;
use crate::group::{FiniteTable, Group, GroupKind, Subgroup, Window};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GroupFile {
    pub kind: GroupKind,
    #[serde(default)]
    pub generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_elements: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_images: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<SubgroupFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FactorFile {
    pub table: Vec<Vec<u32>>,
    pub generators: Vec<String>,
    pub generator_elements: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SubgroupFile {
    /// Elements in the group's text syntax.
    pub generators: Vec<String>,
}

fn need<T: Clone>(field: &Option<T>, name: &str, kind: GroupKind) -> Result<T> {
    field
        .clone()
        .ok_or_else(|| Error::invalid(format!("`{name}` is required for kind `{kind}`")))
}

fn named(names: &[String], elems: &[u32], what: &str) -> Result<Vec<(String, u32)>> {
    if names.len() != elems.len() {
        return Err(Error::invalid(format!(
            "{what}: {} generator names but {} generator elements",
            names.len(),
            elems.len()
        )));
    }
    Ok(names.iter().cloned().zip(elems.iter().copied()).collect())
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("group file: {e}")))
    }

    pub fn build_group(&self) -> Result<Group> {
        let kind = self.kind;
        match kind {
            GroupKind::FiniteTable => {
                let table = FiniteTable::new(need(&self.table, "table", kind)?)?;
                let elems = need(&self.generator_elements, "generator-elements", kind)?;
                Group::finite_table(table, named(&self.generators, &elems, "group")?)
            }
            GroupKind::Permutation => {
                let images = need(&self.permutation_images, "permutation-images", kind)?;
                if images.len() != self.generators.len() {
                    return Err(Error::invalid(
                        "`permutation-images` must list one image per generator",
                    ));
                }
                let degree = images.first().map_or(1, Vec::len);
                Group::permutation(
                    degree,
                    self.generators.iter().cloned().zip(images).collect(),
                )
            }
            GroupKind::Free | GroupKind::FreeAbelian => {
                if let Some(r) = self.free_rank.filter(|&r| r != self.generators.len()) {
                    return Err(Error::invalid(format!(
                        "`free-rank` is {r} but {} generators are named",
                        self.generators.len()
                    )));
                }
                if kind == GroupKind::Free {
                    Group::free(self.generators.clone())
                } else {
                    Group::free_abelian(self.generators.clone())
                }
            }
            GroupKind::FreeProduct => {
                let factors = need(&self.factors, "factors", kind)?;
                let built = factors
                    .iter()
                    .enumerate()
                    .map(|(i, f)| {
                        Ok((
                            FiniteTable::new(f.table.clone())?,
                            named(&f.generators, &f.generator_elements, &format!("factor {i}"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let group = Group::free_product(built)?;
                if !self.generators.is_empty() && self.generators != group.generator_names() {
                    return Err(Error::invalid(
                        "top-level `generators` disagree with the factors",
                    ));
                }
                Ok(group)
            }
        }
    }

    /// The group and its subgroup (trivial when none is given).
    pub fn build(&self, cap: usize) -> Result<(Arc<Group>, Arc<Subgroup>)> {
        let group = self.build_group()?;
        let h = match &self.subgroup {
            None => Subgroup::trivial(&group),
            Some(s) => {
                let gens = s
                    .generators
                    .iter()
                    .map(|g| group.parse_element(g))
                    .collect::<Result<Vec<_>>>()?;
                Subgroup::generated(&group, gens, cap)?
            }
        };
        Ok((Arc::new(group), Arc::new(h)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexEntry {
    Id(String),
    Declared {
        id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stabilizer: Option<StabilizerTag>,
    },
}

impl VertexEntry {
    fn id(&self) -> &str {
        match self {
            VertexEntry::Id(id) | VertexEntry::Declared { id, .. } => id,
        }
    }

    fn tag(&self) -> Option<StabilizerTag> {
        match self {
            VertexEntry::Id(_) => None,
            VertexEntry::Declared { stabilizer, .. } => *stabilizer,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub action: BTreeMap<String, BTreeMap<String, String>>,
}

const OUT_MARK: &str = "out";

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("graph file: {e}")))
    }

    pub fn build_graph(&self) -> Result<SimplicialGraph> {
        let ids = self.vertices.iter().map(|v| v.id().to_string()).collect();
        SimplicialGraph::from_named_edges(ids, &self.edges)
    }

    /// Builds the G-graph. An empty `action` is the trivial action; otherwise
    /// every generator must be listed.
    pub fn build(&self, group: Arc<Group>, window: Arc<Window>) -> Result<GGraph> {
        let graph = self.build_graph()?;
        let n = graph.vertex_count();
        let declared = self.vertices.iter().map(VertexEntry::tag).collect();
        let action = if self.action.is_empty() {
            GroupAction::trivial(group, window, n)
        } else {
            for name in self.action.keys() {
                if !group.generator_names().contains(name) {
                    return Err(Error::invalid(format!(
                        "action names unknown generator `{name}`"
                    )));
                }
            }
            let maps = group
                .generator_names()
                .iter()
                .map(|name| {
                    let table = self.action.get(name).ok_or_else(|| {
                        Error::invalid(format!("action is missing generator `{name}`"))
                    })?;
                    let mut map = vec![None; n];
                    for (src, dst) in table {
                        let v = graph.vertex(src)?;
                        if dst != OUT_MARK {
                            map[v] = Some(graph.vertex(dst)?);
                        }
                    }
                    Ok(map)
                })
                .collect::<Result<Vec<_>>>()?;
            GroupAction::from_generator_maps(group, window, n, &maps)?
        };
        action.validate(&graph)?;
        Ok(GGraph {
            graph,
            action,
            declared,
        })
    }

    pub fn from_ggraph(gg: &GGraph) -> Result<Self> {
        let g = &gg.graph;
        let order = g.vertices_in_order();
        let vertices = order
            .iter()
            .map(|&v| match gg.declared[v] {
                None => VertexEntry::Id(g.id(v).to_string()),
                Some(t) => VertexEntry::Declared {
                    id: g.id(v).to_string(),
                    stabilizer: Some(t),
                },
            })
            .collect();
        let edges = g
            .edges()
            .into_iter()
            .map(|(u, v)| (g.id(u).to_string(), g.id(v).to_string()))
            .collect();
        let act = &gg.action;
        let mut action = BTreeMap::new();
        for gen in act.group().generators() {
            let mut table = BTreeMap::new();
            for &v in &order {
                let image = act.apply(&gen.element, v)?;
                table.insert(
                    g.id(v).to_string(),
                    image.map_or(OUT_MARK.to_string(), |w| g.id(w).to_string()),
                );
            }
            action.insert(gen.name.clone(), table);
        }
        Ok(GraphFile {
            vertices,
            edges,
            action,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph files serialize")
    }
}

/// The window used for a group: all of it when finite, else the ball of `radius`.
pub fn window_for(group: &Group, radius: usize, cap: usize) -> Result<Arc<Window>> {
    let w = if group.is_finite() {
        group.full_window(cap)?
    } else {
        group.ball(radius, cap)?
    };
    Ok(Arc::new(w))
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub assertion: String,
    pub instance: String,
    pub verdict: Verdict,
    pub witness: Value,
}

impl Record {
    pub fn new(
        assertion: impl Into<String>,
        instance: impl Into<String>,
        verdict: Verdict,
        witness: Value,
    ) -> Self {
        Record {
            assertion: assertion.into(),
            instance: instance.into(),
            verdict,
            witness,
        }
    }
}

/// Accumulates records; the overall verdict is the worst one seen.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn verdict(&self) -> Verdict {
        self.records
            .iter()
            .fold(Verdict::Pass, |acc, r| acc.and(r.verdict))
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_CAP;

    #[test]
    fn s3_from_permutations() {
        let f = GroupFile::parse(
            r#"{"kind":"permutation","generators":["s","t"],
                "permutation-images":[[1,0,2],[1,2,0]],"subgroup":{"generators":["t"]}}"#,
        )
        .unwrap();
        let (g, h) = f.build(DEFAULT_CAP).unwrap();
        assert_eq!(g.order(), Some(6));
        assert_eq!(h.order(), Some(3));
    }

    #[test]
    fn empty_free_group_is_trivial() {
        let f = GroupFile::parse(r#"{"kind":"free","generators":[]}"#).unwrap();
        let g = f.build_group().unwrap();
        assert_eq!(g.full_window(DEFAULT_CAP).unwrap().len(), 1);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(GroupFile::parse(r#"{"kind":"free","generatorz":[]}"#).is_err());
        assert!(
            GroupFile::parse(r#"{"kind":"permutation","generators":["s"]}"#)
                .unwrap()
                .build_group()
                .is_err()
        );
        let loop_edge = GraphFile::parse(r#"{"vertices":["a"],"edges":[["a","a"]]}"#).unwrap();
        assert!(loop_edge.build_graph().is_err());
    }

    #[test]
    fn graph_round_trip() {
        let g = Arc::new(Group::cyclic(4, "t").unwrap());
        let w = window_for(&g, 1, DEFAULT_CAP).unwrap();
        let text = r#"{"vertices":["v0","v1","v2",{"id":"v3","stabilizer":"finite"}],
            "edges":[["v0","v1"],["v1","v2"],["v2","v3"],["v3","v0"]],
            "action":{"t":{"v0":"v1","v1":"v2","v2":"v3","v3":"v0"}}}"#;
        let gg = GraphFile::parse(text)
            .unwrap()
            .build(g.clone(), w.clone())
            .unwrap();
        let back = GraphFile::from_ggraph(&gg).unwrap();
        let again = back.build(g, w).unwrap();
        assert_eq!(again.graph.edges().len(), 4);
        assert_eq!(GraphFile::from_ggraph(&again).unwrap(), back);
    }
}
