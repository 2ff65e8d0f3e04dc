//! JSON envelopes for every structure the crate handles.
//!
//! ```json
//! {"format_version": "1", "kind": "tree",
//!  "payload": {"nodes": ["a", "b"], "edges": [["a", "b"]]}}
//! ```
//!
//! Labels may be given as strings or numbers; they are written back as
//! strings.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bipart::BipartitionFamily;
use crate::graphdecomp::{Graph, TreeDecomposition};
use crate::orderbridge::{OrderTree, Poset};
use crate::stree::STree;
use crate::system::{Members, SeparationSystem};
use crate::treebridge::GraphTree;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(String),
    #[error("unknown kind {0}")]
    UnknownKind(String),
    #[error("expected kind {expected}, got {got}")]
    Kind { expected: &'static str, got: String },
    #[error("invalid {kind}: {detail}")]
    Invalid { kind: &'static str, detail: String },
}

fn invalid(kind: &'static str, detail: impl ToString) -> JsonError {
    JsonError::Invalid { kind, detail: detail.to_string() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub format_version: String,
    pub kind: String,
    pub payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// A label written as a string or a number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Text(String),
    Int(i64),
}

impl Label {
    fn into_string(self) -> String {
        match self {
            Label::Text(s) => s,
            Label::Int(n) => n.to_string(),
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Text(s.to_string())
    }
}

fn strings(labels: Vec<Label>) -> Vec<String> {
    labels.into_iter().map(Label::into_string).collect()
}

fn texts(labels: &[String]) -> Vec<Label> {
    labels.iter().map(|l| Label::Text(l.clone())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub count: usize,
    pub inv: Vec<usize>,
    /// Pairs `[i, j]` with `i <= j`; the order is their reflexive transitive
    /// closure.
    pub le: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeJson {
    pub nodes: Vec<Label>,
    pub edges: Vec<[Label; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTreeJson {
    pub elements: Vec<Label>,
    pub lt: Vec<[Label; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyJson {
    pub ground: Vec<Label>,
    pub pairs: Vec<[Vec<Label>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct STreeJson {
    pub tree: TreeJson,
    /// `[x, y, s]`: the oriented edge `(x, y)` is labelled `s`. An edge
    /// labelled in one direction only gets the inverse label in the other.
    pub alpha: Vec<(Label, Label, usize)>,
    pub system: SystemJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<Label>,
    pub edges: Vec<[Label; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separations: Option<Vec<[Vec<Label>; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub graph: GraphJson,
    pub tree: TreeJson,
    pub parts: BTreeMap<String, Vec<Label>>,
}

/// A graph, optionally with a set of oriented separations of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDoc {
    pub graph: Graph,
    pub separations: Option<Vec<(Members, Members)>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    System(SeparationSystem),
    Tree(GraphTree),
    OrderTree(OrderTree),
    Family(BipartitionFamily),
    STree(STree),
    Graph(GraphDoc),
    Decomposition(TreeDecomposition),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::System(_) => "system",
            Document::Tree(_) => "tree",
            Document::OrderTree(_) => "order_tree",
            Document::Family(_) => "bipartition_family",
            Document::STree(_) => "stree",
            Document::Graph(_) => "graph",
            Document::Decomposition(_) => "tree_decomposition",
        }
    }

    pub fn parse(text: &str) -> Result<Self, JsonError> {
        Self::from_envelope(serde_json::from_str(text)?)
    }

    pub fn from_envelope(env: Envelope) -> Result<Self, JsonError> {
        if env.format_version != FORMAT_VERSION {
            return Err(JsonError::Version(env.format_version));
        }
        let payload = env.payload;
        Ok(match env.kind.as_str() {
            "system" => Document::System(system_from_json(serde_json::from_value(payload)?)?),
            "tree" => Document::Tree(tree_from_json(serde_json::from_value(payload)?)?),
            "order_tree" => {
                Document::OrderTree(order_tree_from_json(serde_json::from_value(payload)?)?)
            }
            "bipartition_family" => {
                Document::Family(family_from_json(serde_json::from_value(payload)?)?)
            }
            "stree" => Document::STree(stree_from_json(serde_json::from_value(payload)?)?),
            "graph" => Document::Graph(graph_from_json(serde_json::from_value(payload)?)?),
            "tree_decomposition" => {
                Document::Decomposition(decomposition_from_json(serde_json::from_value(payload)?)?)
            }
            other => return Err(JsonError::UnknownKind(other.to_string())),
        })
    }

    pub fn payload(&self) -> Value {
        let value = match self {
            Document::System(s) => serde_json::to_value(system_to_json(s)),
            Document::Tree(t) => serde_json::to_value(tree_to_json(t)),
            Document::OrderTree(t) => serde_json::to_value(order_tree_to_json(t)),
            Document::Family(f) => serde_json::to_value(family_to_json(f)),
            Document::STree(s) => serde_json::to_value(stree_to_json(s)),
            Document::Graph(g) => {
                serde_json::to_value(graph_to_json(&g.graph, g.separations.as_deref()))
            }
            Document::Decomposition(d) => serde_json::to_value(decomposition_to_json(d)),
        };
        value.expect("payload types serialize")
    }

    pub fn envelope(&self, witness: Option<Value>) -> Envelope {
        Envelope {
            format_version: FORMAT_VERSION.to_string(),
            kind: self.kind().to_string(),
            payload: self.payload(),
            witness,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.envelope(None)).expect("envelope serializes")
    }
}

pub fn system_to_json(sys: &SeparationSystem) -> SystemJson {
    SystemJson {
        count: sys.len(),
        inv: sys.involution().to_vec(),
        le: sys.strict_pairs().into_iter().map(|(a, b)| [a, b]).collect(),
        labels: sys.labels().map(texts),
    }
}

pub fn system_from_json(json: SystemJson) -> Result<SeparationSystem, JsonError> {
    let pairs: Vec<(usize, usize)> = json.le.iter().map(|&[a, b]| (a, b)).collect();
    let sys = SeparationSystem::from_relation(json.count, json.inv, &pairs)
        .map_err(|e| invalid("system", e))?;
    match json.labels {
        Some(labels) => sys.with_labels(strings(labels)).map_err(|e| invalid("system", e)),
        None => Ok(sys),
    }
}

pub fn tree_to_json(tree: &GraphTree) -> TreeJson {
    TreeJson {
        nodes: texts(tree.labels()),
        edges: tree
            .edges()
            .iter()
            .map(|&(a, b)| [tree.label(a).into(), tree.label(b).into()])
            .collect(),
    }
}

fn index_of(labels: &[String], label: &str, kind: &'static str) -> Result<usize, JsonError> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| invalid(kind, format!("unknown label {label}")))
}

pub fn tree_from_json(json: TreeJson) -> Result<GraphTree, JsonError> {
    let labels = strings(json.nodes);
    let edges = json
        .edges
        .into_iter()
        .map(|[a, b]| {
            Ok((
                index_of(&labels, &a.into_string(), "tree")?,
                index_of(&labels, &b.into_string(), "tree")?,
            ))
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    GraphTree::new(labels, edges).map_err(|e| invalid("tree", e))
}

pub fn order_tree_to_json(tree: &OrderTree) -> OrderTreeJson {
    let poset = tree.poset();
    let name = |i: usize| Label::Text(poset.labels()[i].clone());
    OrderTreeJson {
        elements: texts(poset.labels()),
        lt: poset.strict_pairs().into_iter().map(|(a, b)| [name(a), name(b)]).collect(),
    }
}

pub fn order_tree_from_json(json: OrderTreeJson) -> Result<OrderTree, JsonError> {
    let labels = strings(json.elements);
    let generators = json
        .lt
        .into_iter()
        .map(|[a, b]| {
            Ok((
                index_of(&labels, &a.into_string(), "order_tree")?,
                index_of(&labels, &b.into_string(), "order_tree")?,
            ))
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    let poset = Poset::new(labels, &generators).map_err(|e| invalid("order_tree", e))?;
    OrderTree::new(poset).map_err(|e| invalid("order_tree", e))
}

fn side_to_json(labels: &[String], side: &Members) -> Vec<Label> {
    side.iter().map(|&x| Label::Text(labels[x].clone())).collect()
}

fn side_from_json(
    labels: &[String],
    side: Vec<Label>,
    kind: &'static str,
) -> Result<Members, JsonError> {
    side.into_iter().map(|l| index_of(labels, &l.into_string(), kind)).collect()
}

pub fn family_to_json(family: &BipartitionFamily) -> FamilyJson {
    let ground = family.ground();
    FamilyJson {
        ground: texts(ground),
        pairs: family
            .pairs()
            .iter()
            .map(|(a, b)| [side_to_json(ground, a), side_to_json(ground, b)])
            .collect(),
    }
}

pub fn family_from_json(json: FamilyJson) -> Result<BipartitionFamily, JsonError> {
    let ground = strings(json.ground);
    let pairs = json
        .pairs
        .into_iter()
        .map(|[a, b]| {
            Ok((
                side_from_json(&ground, a, "bipartition_family")?,
                side_from_json(&ground, b, "bipartition_family")?,
            ))
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    BipartitionFamily::new(ground, pairs).map_err(|e| invalid("bipartition_family", e))
}

pub fn stree_to_json(st: &STree) -> STreeJson {
    let tree = st.tree();
    STreeJson {
        tree: tree_to_json(tree),
        alpha: (0..tree.oriented_count())
            .map(|i| {
                let (x, y) = tree.oriented(i);
                (tree.label(x).into(), tree.label(y).into(), st.alpha()[i])
            })
            .collect(),
        system: system_to_json(st.host()),
    }
}

pub fn stree_from_json(json: STreeJson) -> Result<STree, JsonError> {
    let tree = tree_from_json(json.tree)?;
    let host = system_from_json(json.system)?;
    let mut alpha = vec![None; tree.oriented_count()];
    for (x, y, s) in json.alpha {
        let (x, y) = (x.into_string(), y.into_string());
        let i = match (tree.node_index(&x), tree.node_index(&y)) {
            (Some(a), Some(b)) => tree.oriented_index(a, b),
            _ => None,
        }
        .ok_or_else(|| invalid("stree", format!("({x},{y}) is not an edge")))?;
        alpha[i] = Some(s);
    }
    let alpha = (0..alpha.len())
        .map(|i| match (alpha[i], alpha[i ^ 1]) {
            (Some(s), _) => Ok(s),
            (None, Some(s)) if s < host.len() => Ok(host.inv(s)),
            _ => Err(invalid("stree", format!("oriented edge {i} has no label"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    STree::new(tree, alpha, Arc::new(host)).map_err(|e| invalid("stree", e))
}

pub fn graph_to_json(graph: &Graph, separations: Option<&[(Members, Members)]>) -> GraphJson {
    let v = graph.vertices();
    GraphJson {
        vertices: texts(v),
        edges: graph
            .edges()
            .iter()
            .map(|&(a, b)| [v[a].as_str().into(), v[b].as_str().into()])
            .collect(),
        separations: separations.map(|seps| {
            seps.iter().map(|(a, b)| [side_to_json(v, a), side_to_json(v, b)]).collect()
        }),
    }
}

pub fn graph_from_json(json: GraphJson) -> Result<GraphDoc, JsonError> {
    let vertices = strings(json.vertices);
    let edges = json
        .edges
        .into_iter()
        .map(|[a, b]| {
            Ok((
                index_of(&vertices, &a.into_string(), "graph")?,
                index_of(&vertices, &b.into_string(), "graph")?,
            ))
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    let separations = json
        .separations
        .map(|seps| {
            seps.into_iter()
                .map(|[a, b]| {
                    Ok((
                        side_from_json(&vertices, a, "graph")?,
                        side_from_json(&vertices, b, "graph")?,
                    ))
                })
                .collect::<Result<Vec<_>, JsonError>>()
        })
        .transpose()?;
    let graph = Graph::new(vertices, edges).map_err(|e| invalid("graph", e))?;
    Ok(GraphDoc { graph, separations })
}

pub fn decomposition_to_json(td: &TreeDecomposition) -> DecompositionJson {
    let v = td.graph().vertices();
    DecompositionJson {
        graph: graph_to_json(td.graph(), None),
        tree: tree_to_json(td.tree()),
        parts: td
            .parts_by_label()
            .into_iter()
            .map(|(node, part)| (node, side_to_json(v, &part)))
            .collect(),
    }
}

pub fn decomposition_from_json(json: DecompositionJson) -> Result<TreeDecomposition, JsonError> {
    let graph = graph_from_json(json.graph)?.graph;
    let tree = tree_from_json(json.tree)?;
    let mut parts = vec![None; tree.node_count()];
    for (node, part) in json.parts {
        let t = tree
            .node_index(&node)
            .ok_or_else(|| invalid("tree_decomposition", format!("unknown node {node}")))?;
        parts[t] = Some(side_from_json(graph.vertices(), part, "tree_decomposition")?);
    }
    let parts = parts
        .into_iter()
        .enumerate()
        .map(|(t, p)| {
            p.ok_or_else(|| {
                invalid("tree_decomposition", format!("node {} has no part", tree.label(t)))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    TreeDecomposition::new(graph, tree, parts).map_err(|e| invalid("tree_decomposition", e))
}
