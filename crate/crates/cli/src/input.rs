use std::io::Read;

use serde_json::Value;
use tressec_core::graphdecomp::{extract_separations, separation_system};
use tressec_core::json::{Document, Envelope, JsonError, Label};
use tressec_core::orderbridge::treeset_from_order_tree;
use tressec_core::orient::Limits;
use tressec_core::treebridge::edge_tree_set;
use tressec_core::{Members, SeparationSystem};

pub enum Failure {
    /// Unreadable or malformed input: exit code 2.
    Input(String),
    /// Well-formed input that fails a check or precondition: exit code 1.
    Domain { message: String, report: Option<Value> },
}

impl Failure {
    pub fn domain(message: impl ToString) -> Self {
        Failure::Domain { message: message.to_string(), report: None }
    }

    pub fn with_report(message: impl ToString, report: Value) -> Self {
        Failure::Domain { message: message.to_string(), report: Some(report) }
    }
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        match e {
            JsonError::Invalid { .. } => Failure::domain(e),
            _ => Failure::Input(e.to_string()),
        }
    }
}

pub fn read(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let result = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    result.map_err(|e| Failure::Input(format!("{path}: {e}")))?;
    Ok(text)
}

pub fn envelope(text: &str) -> Result<Envelope, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::Input(format!("malformed JSON: {e}")))
}

pub fn document(text: &str) -> Result<Document, Failure> {
    Ok(Document::from_envelope(envelope(text)?)?)
}

/// Limits, with `TRESSEC_MAX_ORIENTED` overriding the backtracking cap.
pub fn limits() -> Result<Limits, Failure> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var("TRESSEC_MAX_ORIENTED") {
        limits.max_oriented = raw
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("TRESSEC_MAX_ORIENTED={raw} is not a number")))?;
    }
    Ok(limits)
}

/// The separation system a document describes.
pub fn system_of(doc: &Document) -> Result<SeparationSystem, Failure> {
    Ok(match doc {
        Document::System(sys) => sys.clone(),
        Document::Tree(tree) => edge_tree_set(tree).system,
        Document::OrderTree(tree) => treeset_from_order_tree(tree).map_err(Failure::domain)?.system,
        Document::Family(family) => family.system(),
        Document::STree(st) => st.host().clone(),
        Document::Graph(g) => match &g.separations {
            Some(seps) => separation_system(&g.graph, seps).map_err(Failure::domain)?,
            None => return Err(Failure::domain("graph has no separations")),
        },
        Document::Decomposition(td) => {
            extract_separations(td).map_err(Failure::domain)?.stree.host().clone()
        }
    })
}

/// Reads an orientation given as a JSON list, or an object with an
/// `orientation` list, of labels or indices of `sys`.
pub fn orientation(path: &str, sys: &SeparationSystem) -> Result<Members, Failure> {
    let value: Value = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::Input(format!("{path}: malformed JSON: {e}")))?;
    let list = match value {
        Value::Object(mut map) => map.remove("orientation").unwrap_or(Value::Null),
        other => other,
    };
    let items: Vec<Label> = serde_json::from_value(list)
        .map_err(|e| Failure::Input(format!("{path}: expected a list of labels: {e}")))?;
    items
        .into_iter()
        .map(|item| match item {
            Label::Int(i) if i >= 0 && (i as usize) < sys.len() => Ok(i as usize),
            Label::Int(i) => Err(Failure::domain(format!("element {i} is out of range"))),
            Label::Text(s) => (0..sys.len())
                .find(|&i| sys.label(i) == s)
                .ok_or_else(|| Failure::domain(format!("unknown element {s}"))),
        })
        .collect()
}

pub fn labels(sys: &SeparationSystem, members: impl IntoIterator<Item = usize>) -> Vec<String> {
    members.into_iter().map(|i| sys.label(i)).collect()
}
