//! Plain-text instance documents and build-vector files.
//!
//! An instance is a TOML document:
//!
//! ```toml
//! format = "potnet-instance"
//! version = 1
//! degree = 2.0
//! pi_bar = 1.0
//!
//! [[node]]
//! id = "s"
//! kind = "entry"
//! balance = 1.0
//!
//! [[node]]
//! id = "t"
//! kind = "exit"
//! balance = -1.0
//!
//! [[arc]]
//! id = "a0"
//! tail = "s"
//! head = "t"
//! beta = 1.0
//! cost = 1.0
//! ```
//!
//! Nodes may carry `lower`/`upper` potential bounds. They must then be given
//! for every node, and `pi_bar` is derived from them and must be omitted.
//! Arcs may carry `diameter` and `length` metadata.
//!
//! [`serialize_instance`] writes a canonical layout with shortest round-trip
//! float literals, so a canonical document survives parse and serialize
//! byte for byte.
//!
//! Build vectors are text files with one `arc_id value` pair per line; `#`
//! starts a comment and arcs that are not listed are 0.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{
    validate_instance, ArcMeta, Instance, Labels, ModelError, MultiGraph, Network, NodeKind, PotentialBounds,
    Violation,
};

/// Value of the `format` key.
pub const FORMAT_TAG: &str = "potnet-instance";
/// Current document version.
pub const FORMAT_VERSION: i64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{location}: field `{field}`: {message}")]
    Field {
        location: String,
        field: &'static str,
        message: String,
    },
    #[error("{location}: {rule} rule violated: {detail}")]
    Rule {
        location: String,
        rule: &'static str,
        detail: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl FormatError {
    /// Name of the broken rule, for rule violations.
    pub fn rule(&self) -> Option<&'static str> {
        match self {
            FormatError::Rule { rule, .. } => Some(rule),
            _ => None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    version: i64,
    degree: f64,
    pi_bar: Option<f64>,
    #[serde(default)]
    node: Vec<NodeEntry>,
    #[serde(default)]
    arc: Vec<ArcEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: String,
    kind: String,
    #[serde(default)]
    balance: f64,
    lower: Option<f64>,
    upper: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcEntry {
    id: String,
    tail: String,
    head: String,
    beta: f64,
    cost: f64,
    diameter: Option<f64>,
    length: Option<f64>,
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Lines of the `[[node]]` and `[[arc]]` table headers, in order.
fn table_lines(text: &str, header: &str) -> Vec<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim() == header)
        .map(|(i, _)| i + 1)
        .collect()
}

struct Locator {
    nodes: Vec<usize>,
    arcs: Vec<usize>,
    node_ids: Vec<String>,
    arc_ids: Vec<String>,
}

impl Locator {
    fn node(&self, v: usize) -> String {
        match self.nodes.get(v) {
            Some(line) => format!("line {line}, node \"{}\"", self.node_ids[v]),
            None => format!("node \"{}\"", self.node_ids[v]),
        }
    }

    fn arc(&self, a: usize) -> String {
        match self.arcs.get(a) {
            Some(line) => format!("line {line}, arc \"{}\"", self.arc_ids[a]),
            None => format!("arc \"{}\"", self.arc_ids[a]),
        }
    }
}

fn parse_kind(kind: &str) -> Option<NodeKind> {
    match kind {
        "entry" => Some(NodeKind::Entry),
        "exit" => Some(NodeKind::Exit),
        "inner" => Some(NodeKind::Inner),
        _ => None,
    }
}

fn kind_name(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Entry => "entry",
        NodeKind::Exit => "exit",
        NodeKind::Inner => "inner",
    }
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: Document = toml::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let loc = Locator {
        nodes: table_lines(text, "[[node]]"),
        arcs: table_lines(text, "[[arc]]"),
        node_ids: doc.node.iter().map(|n| n.id.clone()).collect(),
        arc_ids: doc.arc.iter().map(|a| a.id.clone()).collect(),
    };
    let header = "document header".to_string();
    if doc.format != FORMAT_TAG {
        return Err(FormatError::Field {
            location: header,
            field: "format",
            message: format!("expected \"{FORMAT_TAG}\", got \"{}\"", doc.format),
        });
    }
    if doc.version != FORMAT_VERSION {
        return Err(FormatError::Field {
            location: header,
            field: "version",
            message: format!("unsupported version {} (expected {FORMAT_VERSION})", doc.version),
        });
    }
    if doc.node.is_empty() {
        return Err(FormatError::Field {
            location: header,
            field: "node",
            message: "document has no nodes".into(),
        });
    }

    let mut node_index = HashMap::new();
    let mut kinds = Vec::with_capacity(doc.node.len());
    let mut balance = Vec::with_capacity(doc.node.len());
    for (v, node) in doc.node.iter().enumerate() {
        if node_index.insert(node.id.as_str(), v).is_some() {
            return Err(FormatError::Field {
                location: loc.node(v),
                field: "id",
                message: "duplicate node id".into(),
            });
        }
        let kind = parse_kind(&node.kind).ok_or_else(|| FormatError::Field {
            location: loc.node(v),
            field: "kind",
            message: format!("expected entry, exit or inner, got \"{}\"", node.kind),
        })?;
        kinds.push(kind);
        balance.push(node.balance);
    }

    let bounded = doc.node.iter().filter(|n| n.lower.is_some() || n.upper.is_some()).count();
    let bounds = if bounded == 0 {
        None
    } else {
        let mut bounds = Vec::with_capacity(doc.node.len());
        for (v, node) in doc.node.iter().enumerate() {
            match (node.lower, node.upper) {
                (Some(lower), Some(upper)) => bounds.push(PotentialBounds { lower, upper }),
                _ => {
                    return Err(FormatError::Field {
                        location: loc.node(v),
                        field: if node.lower.is_none() { "lower" } else { "upper" },
                        message: "potential bounds must be given for every node or for none".into(),
                    })
                }
            }
        }
        Some(bounds)
    };
    let pi_bar = match (&bounds, doc.pi_bar) {
        (None, Some(p)) => p,
        (None, None) => {
            return Err(FormatError::Field {
                location: header,
                field: "pi_bar",
                message: "missing (required unless nodes carry potential bounds)".into(),
            })
        }
        (Some(_), Some(_)) => {
            return Err(FormatError::Field {
                location: header,
                field: "pi_bar",
                message: "must be omitted when nodes carry potential bounds".into(),
            })
        }
        (Some(_), None) => 0.0,
    };

    let mut arcs = Vec::with_capacity(doc.arc.len());
    let mut arc_ids = HashMap::new();
    for (a, arc) in doc.arc.iter().enumerate() {
        if arc_ids.insert(arc.id.as_str(), a).is_some() {
            return Err(FormatError::Field {
                location: loc.arc(a),
                field: "id",
                message: "duplicate arc id".into(),
            });
        }
        let end = |field: &'static str, id: &str| {
            node_index.get(id).copied().ok_or_else(|| FormatError::Field {
                location: loc.arc(a),
                field,
                message: format!("unknown node \"{id}\""),
            })
        };
        arcs.push(crate::model::Arc::new(end("tail", &arc.tail)?, end("head", &arc.head)?));
    }
    let graph = MultiGraph::new(doc.node.len(), arcs)?;
    let network = Network::new(graph, doc.arc.iter().map(|a| a.beta).collect(), doc.degree)?;
    let mut inst = Instance::new(network, kinds, balance, pi_bar, doc.arc.iter().map(|a| a.cost).collect())?;
    if let Some(bounds) = bounds {
        inst.set_individual_bounds(bounds);
    }
    inst.labels = Labels {
        nodes: loc.node_ids.clone(),
        arcs: loc.arc_ids.clone(),
        arc_meta: doc
            .arc
            .iter()
            .map(|a| ArcMeta {
                diameter: a.diameter,
                length: a.length,
            })
            .collect(),
    };

    let report = validate_instance(&inst);
    if let Some(v) = report.violations.first() {
        let (rule, location) = describe(v, &loc);
        return Err(FormatError::Rule {
            location: location.unwrap_or(header),
            rule,
            detail: v.to_string(),
        });
    }
    Ok(inst)
}

/// Rule name and document location of a model violation.
fn describe(v: &Violation, loc: &Locator) -> (&'static str, Option<String>) {
    match *v {
        Violation::LoopArc { arc, .. } => ("loop", Some(loc.arc(arc))),
        Violation::Disconnected { .. } => ("connectivity", None),
        Violation::NonPositiveDegree(_) => ("degree", None),
        Violation::NonPositiveResistance { arc, .. } | Violation::DegenerateConductance { arc } => {
            ("resistance", Some(loc.arc(arc)))
        }
        Violation::Unbalanced { .. } => ("balance", None),
        Violation::EntryWithNegativeBalance { node, .. }
        | Violation::ExitWithPositiveBalance { node, .. }
        | Violation::InnerWithBalance { node, .. }
        | Violation::NonFiniteBalance { node } => ("balance", Some(loc.node(node))),
        Violation::NonPositivePiBar(_) => ("pi_bar", None),
        Violation::NonPositiveCost { arc, .. } => ("cost", Some(loc.arc(arc))),
        Violation::InvertedBounds { node } => ("bounds", Some(loc.node(node))),
        Violation::Dimension { .. } => ("dimension", None),
    }
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Shortest float literal that parses back to the same bits.
fn float(x: f64) -> String {
    format!("{x:?}")
}

/// Canonical document for an instance.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "format = {}", quote(FORMAT_TAG)).unwrap();
    writeln!(out, "version = {FORMAT_VERSION}").unwrap();
    writeln!(out, "degree = {}", float(inst.degree())).unwrap();
    if inst.bounds.is_none() {
        writeln!(out, "pi_bar = {}", float(inst.pi_bar)).unwrap();
    }
    for v in 0..inst.num_nodes() {
        out.push_str("\n[[node]]\n");
        writeln!(out, "id = {}", quote(&inst.labels.nodes[v])).unwrap();
        writeln!(out, "kind = {}", quote(kind_name(inst.kinds[v]))).unwrap();
        writeln!(out, "balance = {}", float(inst.balance[v])).unwrap();
        if let Some(bounds) = &inst.bounds {
            writeln!(out, "lower = {}", float(bounds[v].lower)).unwrap();
            writeln!(out, "upper = {}", float(bounds[v].upper)).unwrap();
        }
    }
    for (a, arc) in inst.graph().arcs().iter().enumerate() {
        out.push_str("\n[[arc]]\n");
        writeln!(out, "id = {}", quote(&inst.labels.arcs[a])).unwrap();
        writeln!(out, "tail = {}", quote(&inst.labels.nodes[arc.tail])).unwrap();
        writeln!(out, "head = {}", quote(&inst.labels.nodes[arc.head])).unwrap();
        writeln!(out, "beta = {}", float(inst.network.beta()[a])).unwrap();
        writeln!(out, "cost = {}", float(inst.cost[a])).unwrap();
        let meta = inst.labels.arc_meta.get(a).copied().unwrap_or_default();
        if let Some(d) = meta.diameter {
            writeln!(out, "diameter = {}", float(d)).unwrap();
        }
        if let Some(l) = meta.length {
            writeln!(out, "length = {}", float(l)).unwrap();
        }
    }
    out
}

/// Parses a build-vector file against the arc names of `labels`.
pub fn parse_build_vector(text: &str, labels: &Labels) -> Result<Vec<f64>, FormatError> {
    let mut x = vec![0.0; labels.arcs.len()];
    let mut seen = vec![false; labels.arcs.len()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| FormatError::Syntax { line, message };
        let mut parts = content.split_whitespace();
        let (Some(id), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(syntax(format!("expected `arc_id value`, got \"{content}\"")));
        };
        let a = labels
            .arc_index(id)
            .ok_or_else(|| syntax(format!("unknown arc \"{id}\"")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| syntax(format!("invalid value \"{value}\" for arc \"{id}\"")))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(syntax(format!("value {value} for arc \"{id}\" is outside [0, 1]")));
        }
        if std::mem::replace(&mut seen[a], true) {
            return Err(syntax(format!("arc \"{id}\" listed twice")));
        }
        x[a] = value;
    }
    Ok(x)
}

/// Writes a build vector, listing every arc.
pub fn serialize_build_vector(x: &[f64], labels: &Labels) -> String {
    let mut out = String::new();
    for (a, v) in x.iter().enumerate() {
        writeln!(out, "{} {}", labels.arcs[a], float(*v)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"format = "potnet-instance"
version = 1
degree = 2.0
pi_bar = 1.0

[[node]]
id = "s"
kind = "entry"
balance = 1.0

[[node]]
id = "t"
kind = "exit"
balance = -1.0

[[arc]]
id = "a0"
tail = "s"
head = "t"
beta = 1.0
cost = 1.0
"#;

    #[test]
    fn minimal_document_parses_and_round_trips() {
        let inst = parse_instance(MINIMAL).unwrap();
        assert_eq!(inst.num_nodes(), 2);
        assert_eq!(inst.num_arcs(), 1);
        assert_eq!(inst.entries(), vec![0]);
        assert_eq!(serialize_instance(&inst), MINIMAL);
    }

    #[test]
    fn unbalanced_document_names_balance_rule() {
        let text = MINIMAL.replace("balance = -1.0", "balance = -0.7");
        let err = parse_instance(&text).unwrap_err();
        assert_eq!(err.rule(), Some("balance"));
        assert!(err.to_string().contains("balance rule"), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = MINIMAL.replace("tail = \"s\"", "tail = \"q\"");
        let err = parse_instance(&text).unwrap_err();
        assert!(err.to_string().starts_with("line 16, arc \"a0\": field `tail`"), "{err}");
        let text = MINIMAL.replace("beta = 1.0", "beta = ");
        match parse_instance(&text).unwrap_err() {
            FormatError::Syntax { line, .. } => assert_eq!(line, 20),
            e => panic!("unexpected {e}"),
        }
        let text = MINIMAL.replace("cost = 1.0", "cost = 1.0\ncolour = \"red\"");
        assert!(matches!(parse_instance(&text), Err(FormatError::Syntax { .. })));
    }

    #[test]
    fn individual_bounds_derive_pi_bar() {
        let text = MINIMAL
            .replace("pi_bar = 1.0\n", "")
            .replace("balance = 1.0\n", "balance = 1.0\nlower = 0.5\nupper = 3.0\n")
            .replace("balance = -1.0\n", "balance = -1.0\nlower = 1.0\nupper = 2.0\n");
        let inst = parse_instance(&text).unwrap();
        assert_eq!(inst.pi_bar, 2.5);
        assert_eq!(serialize_instance(&inst), text);
        let partial = text.replace("lower = 1.0\nupper = 2.0\n", "");
        let err = parse_instance(&partial).unwrap_err();
        assert!(matches!(err, FormatError::Field { field: "lower", .. }), "{err}");
    }

    #[test]
    fn awkward_floats_round_trip() {
        let mut inst = parse_instance(MINIMAL).unwrap();
        inst.pi_bar = 0.1 + 0.2;
        inst.cost[0] = 1e-300;
        inst.labels.nodes[0] = "quoted \"s\"".into();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn build_vector_file() {
        let inst = parse_instance(MINIMAL).unwrap();
        let x = parse_build_vector("# comment\n\na0 0.25  # half of half\n", &inst.labels).unwrap();
        assert_eq!(x, vec![0.25]);
        assert_eq!(parse_build_vector("", &inst.labels).unwrap(), vec![0.0]);
        assert!(parse_build_vector("a1 1", &inst.labels).is_err());
        assert!(parse_build_vector("a0 1\na0 0", &inst.labels).is_err());
        assert!(parse_build_vector("a0 2", &inst.labels).is_err());
        let text = serialize_build_vector(&x, &inst.labels);
        assert_eq!(parse_build_vector(&text, &inst.labels).unwrap(), x);
    }
}
