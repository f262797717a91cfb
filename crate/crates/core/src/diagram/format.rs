//! Text (`hkdiag 1`) and JSON encodings of diagrams.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{
    Circle, CircleStep, DiagramCode, Edge, Node, NodeKind, Orientation, PortRef, RawDiagram,
    ValidationError,
};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid diagram: {0}")]
    Invalid(#[from] ValidationError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub const HEADER: &str = "hkdiag 1";

fn valid_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Reads a diagram file, choosing the JSON reader for `.json` files.
pub fn load(path: impl AsRef<Path>) -> Result<DiagramCode, ParseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut d = if path.extension().is_some_and(|e| e == "json") {
        parse_json(&text)?
    } else {
        parse(&text)?
    };
    if d.name.is_none() {
        if let Some(stem) = path.file_stem() {
            d.name = Some(stem.to_string_lossy().into_owned());
        }
    }
    Ok(d)
}

struct Line<'a> {
    number: usize,
    text: &'a str,
    tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    fn new(number: usize, text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut start = None;
        for (i, c) in text.char_indices() {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    tokens.push((s, &text[s..i]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            tokens.push((s, &text[s..]));
        }
        Line { number, text, tokens }
    }

    fn err(&self, token: usize, message: impl Into<String>) -> ParseError {
        let column = self
            .tokens
            .get(token)
            .map(|t| t.0 + 1)
            .unwrap_or(self.text.trim_end().len() + 1);
        ParseError::Syntax {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn tok(&self, i: usize) -> &'a str {
        self.tokens[i].1
    }

    fn expect_len(&self, min: usize, max: Option<usize>, what: &str) -> Result<(), ParseError> {
        let n = self.tokens.len();
        if n < min {
            return Err(self.err(n, format!("`{what}` line is missing fields")));
        }
        if let Some(max) = max {
            if n > max {
                return Err(self.err(max, format!("unexpected token in `{what}` line")));
            }
        }
        Ok(())
    }

    fn ident(&self, i: usize) -> Result<&'a str, ParseError> {
        let t = self.tok(i);
        if valid_token(t) {
            Ok(t)
        } else {
            Err(self.err(i, format!("invalid identifier `{t}`")))
        }
    }
}

/// Builder shared by the text and JSON readers; resolves `node.port` references.
#[derive(Default)]
struct Assembler {
    raw: RawDiagram,
    node_index: HashMap<String, usize>,
}

impl Assembler {
    fn add_node(&mut self, id: &str, kind: NodeKind, ports: Vec<String>) -> Result<(), String> {
        if self.node_index.contains_key(id) {
            return Err(format!("duplicate node id `{id}`"));
        }
        if ports.len() != kind.degree() {
            return Err(format!(
                "node `{id}` needs {} ports, got {}",
                kind.degree(),
                ports.len()
            ));
        }
        self.node_index.insert(id.to_string(), self.raw.nodes.len());
        self.raw.nodes.push(Node {
            id: id.to_string(),
            kind,
            ports,
        });
        Ok(())
    }

    fn port(&self, node: &str, label: &str) -> Result<PortRef, String> {
        let &ni = self
            .node_index
            .get(node)
            .ok_or_else(|| format!("unknown node `{node}`"))?;
        let slot = self.raw.nodes[ni]
            .ports
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| format!("node `{node}` has no port `{label}`"))?;
        Ok(PortRef { node: ni, slot })
    }

    fn port_ref(&self, text: &str) -> Result<PortRef, String> {
        let (node, label) = text
            .split_once('.')
            .ok_or_else(|| format!("expected <node>.<port>, got `{text}`"))?;
        self.port(node, label)
    }

    fn step(&self, text: &str) -> Result<CircleStep, String> {
        let (node, pair) = text
            .split_once('.')
            .ok_or_else(|| format!("expected <crossing>.<in>-<out>, got `{text}`"))?;
        let (pin, pout) = pair
            .split_once('-')
            .ok_or_else(|| format!("expected <crossing>.<in>-<out>, got `{text}`"))?;
        let a = self.port(node, pin)?;
        let b = self.port(node, pout)?;
        Ok(CircleStep {
            crossing: a.node,
            slot_in: a.slot,
            slot_out: b.slot,
        })
    }
}

fn parse_kind(s: &str) -> Option<NodeKind> {
    match s {
        "vertex3" => Some(NodeKind::Vertex3),
        "crossing" => Some(NodeKind::Crossing),
        _ => None,
    }
}

fn kind_name(k: NodeKind) -> &'static str {
    match k {
        NodeKind::Vertex3 => "vertex3",
        NodeKind::Crossing => "crossing",
    }
}

fn parse_sign(s: &str) -> Option<Orientation> {
    match s {
        "+" => Some(Orientation::Forward),
        "-" => Some(Orientation::Reversed),
        _ => None,
    }
}

/// Parses and validates the text format.
pub fn parse(text: &str) -> Result<DiagramCode, ParseError> {
    let mut asm = Assembler::default();
    let mut header_seen = false;
    for (idx, raw_line) in text.lines().enumerate() {
        let content = raw_line.split('#').next().unwrap_or("");
        let line = Line::new(idx + 1, content);
        if line.tokens.is_empty() {
            continue;
        }
        if !header_seen {
            if line.tokens.len() == 2 && line.tok(0) == "hkdiag" && line.tok(1) == "1" {
                header_seen = true;
                continue;
            }
            return Err(line.err(0, format!("expected header `{HEADER}`")));
        }
        match line.tok(0) {
            "meta" => {
                line.expect_len(3, None, "meta")?;
                let rest = content[line.tokens[2].0..].trim();
                match line.tok(1) {
                    "name" => asm.raw.name = Some(rest.to_string()),
                    "genus" => {
                        line.expect_len(3, Some(3), "meta genus")?;
                        asm.raw.genus_hint = Some(
                            rest.parse()
                                .map_err(|_| line.err(2, "genus must be a non-negative integer"))?,
                        );
                    }
                    "framed" => {
                        line.expect_len(3, Some(3), "meta framed")?;
                        asm.raw.framed = match rest {
                            "true" => true,
                            "false" => false,
                            _ => return Err(line.err(2, "expected `true` or `false`")),
                        };
                    }
                    other => return Err(line.err(1, format!("unknown meta key `{other}`"))),
                }
            }
            "node" => {
                line.expect_len(3, None, "node")?;
                let id = line.ident(1)?;
                let kind = parse_kind(line.tok(2))
                    .ok_or_else(|| line.err(2, "node kind must be `vertex3` or `crossing`"))?;
                line.expect_len(3 + kind.degree(), Some(3 + kind.degree()), "node")?;
                let mut ports = Vec::new();
                for i in 3..line.tokens.len() {
                    ports.push(line.ident(i)?.to_string());
                }
                asm.add_node(id, kind, ports).map_err(|m| line.err(1, m))?;
            }
            "edge" => {
                line.expect_len(4, Some(4), "edge")?;
                let id = line.ident(1)?;
                let a = asm.port_ref(line.tok(2)).map_err(|m| line.err(2, m))?;
                let b = asm.port_ref(line.tok(3)).map_err(|m| line.err(3, m))?;
                asm.raw.edges.push(Edge {
                    id: id.to_string(),
                    ends: [a, b],
                });
            }
            "circle" => {
                line.expect_len(2, None, "circle")?;
                let id = line.ident(1)?;
                let mut word = Vec::new();
                for i in 2..line.tokens.len() {
                    word.push(asm.step(line.tok(i)).map_err(|m| line.err(i, m))?);
                }
                asm.raw.circles.push(Circle {
                    id: id.to_string(),
                    word,
                });
            }
            "orient" => {
                line.expect_len(3, Some(3), "orient")?;
                let id = line.ident(1)?;
                let o = parse_sign(line.tok(2)).ok_or_else(|| line.err(2, "expected `+` or `-`"))?;
                asm.raw.orientations.insert(id.to_string(), o);
            }
            other => return Err(line.err(0, format!("unknown directive `{other}`"))),
        }
    }
    if !header_seen {
        return Err(ParseError::Syntax {
            line: 1,
            column: 1,
            message: format!("missing header `{HEADER}`"),
        });
    }
    Ok(asm.raw.validate()?)
}

fn port_text(d: &DiagramCode, p: PortRef) -> String {
    let n = &d.nodes[p.node];
    format!("{}.{}", n.id, n.ports[p.slot])
}

fn step_text(d: &DiagramCode, s: &CircleStep) -> String {
    let n = &d.nodes[s.crossing];
    format!("{}.{}-{}", n.id, n.ports[s.slot_in], n.ports[s.slot_out])
}

/// Canonical text form. Parsing it back yields an equal diagram.
pub fn serialize(d: &DiagramCode) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    if let Some(name) = &d.name {
        let _ = writeln!(out, "meta name {name}");
    }
    if let Some(g) = d.genus_hint {
        let _ = writeln!(out, "meta genus {g}");
    }
    if d.framed {
        out.push_str("meta framed true\n");
    }
    for n in &d.nodes {
        let _ = writeln!(out, "node {} {} {}", n.id, kind_name(n.kind), n.ports.join(" "));
    }
    for e in &d.edges {
        let _ = writeln!(
            out,
            "edge {} {} {}",
            e.id,
            port_text(d, e.ends[0]),
            port_text(d, e.ends[1])
        );
    }
    for c in &d.circles {
        out.push_str("circle ");
        out.push_str(&c.id);
        for s in &c.word {
            out.push(' ');
            out.push_str(&step_text(d, s));
        }
        out.push('\n');
    }
    for (c, o) in d.circles.iter().zip(&d.orientations) {
        if *o == Orientation::Reversed {
            let _ = writeln!(out, "orient {} -", c.id);
        }
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDiagram {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    genus: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    framed: bool,
    #[serde(default)]
    nodes: Vec<JsonNode>,
    #[serde(default)]
    edges: Vec<JsonEdge>,
    #[serde(default)]
    circles: Vec<JsonCircle>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    orient: Vec<JsonOrient>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: String,
    kind: String,
    ports: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    id: String,
    ends: [String; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCircle {
    id: String,
    #[serde(default)]
    word: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonOrient {
    circle: String,
    sign: String,
}

fn json_err(message: String) -> ParseError {
    ParseError::Syntax {
        line: 0,
        column: 0,
        message,
    }
}

/// Parses and validates the JSON mirror of the text format.
pub fn parse_json(text: &str) -> Result<DiagramCode, ParseError> {
    let j: JsonDiagram = serde_json::from_str(text)?;
    let mut asm = Assembler::default();
    asm.raw.name = j.name;
    asm.raw.genus_hint = j.genus;
    asm.raw.framed = j.framed;
    for n in j.nodes {
        let kind = parse_kind(&n.kind)
            .ok_or_else(|| json_err(format!("node `{}`: unknown kind `{}`", n.id, n.kind)))?;
        for t in std::iter::once(&n.id).chain(&n.ports) {
            if !valid_token(t) {
                return Err(json_err(format!("invalid identifier `{t}`")));
            }
        }
        asm.add_node(&n.id, kind, n.ports).map_err(json_err)?;
    }
    for e in j.edges {
        let a = asm.port_ref(&e.ends[0]).map_err(json_err)?;
        let b = asm.port_ref(&e.ends[1]).map_err(json_err)?;
        asm.raw.edges.push(Edge {
            id: e.id,
            ends: [a, b],
        });
    }
    for c in j.circles {
        let word = c
            .word
            .iter()
            .map(|s| asm.step(s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(json_err)?;
        asm.raw.circles.push(Circle { id: c.id, word });
    }
    for o in j.orient {
        let sign = parse_sign(&o.sign)
            .ok_or_else(|| json_err(format!("orientation must be `+` or `-`, got `{}`", o.sign)))?;
        asm.raw.orientations.insert(o.circle, sign);
    }
    Ok(asm.raw.validate()?)
}

pub fn to_json(d: &DiagramCode) -> String {
    let j = JsonDiagram {
        name: d.name.clone(),
        genus: d.genus_hint,
        framed: d.framed,
        nodes: d
            .nodes
            .iter()
            .map(|n| JsonNode {
                id: n.id.clone(),
                kind: kind_name(n.kind).to_string(),
                ports: n.ports.clone(),
            })
            .collect(),
        edges: d
            .edges
            .iter()
            .map(|e| JsonEdge {
                id: e.id.clone(),
                ends: [port_text(d, e.ends[0]), port_text(d, e.ends[1])],
            })
            .collect(),
        circles: d
            .circles
            .iter()
            .map(|c| JsonCircle {
                id: c.id.clone(),
                word: c.word.iter().map(|s| step_text(d, s)).collect(),
            })
            .collect(),
        orient: d
            .circles
            .iter()
            .zip(&d.orientations)
            .filter(|(_, o)| **o == Orientation::Reversed)
            .map(|(c, _)| JsonOrient {
                circle: c.id.clone(),
                sign: "-".into(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&j).expect("diagram json is serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = "hkdiag 1
meta name theta
node u vertex3 a b c
node v vertex3 a b c
edge e1 u.a v.c
edge e2 u.b v.b
edge e3 u.c v.a
";

    #[test]
    fn parses_circle() {
        let d = parse("hkdiag 1\ncircle o\n").unwrap();
        assert_eq!((d.nodes.len(), d.edges.len(), d.circles.len()), (0, 0, 1));
    }

    #[test]
    fn parses_theta_with_comments() {
        let text = format!("# a theta curve\n{THETA}# trailing\n");
        let d = parse(&text).unwrap();
        assert_eq!(d.vertex_count(), 2);
        assert_eq!(d.edges.len(), 3);
        assert_eq!(d.faces().len(), 3);
        assert_eq!(d.name.as_deref(), Some("theta"));
    }

    #[test]
    fn text_round_trip() {
        let d = parse(THETA).unwrap();
        let again = parse(&serialize(&d)).unwrap();
        assert_eq!(d, again);
        assert_eq!(serialize(&d), serialize(&again));
    }

    #[test]
    fn json_round_trip() {
        let d = parse(THETA).unwrap();
        let j = to_json(&d);
        assert_eq!(parse_json(&j).unwrap(), d);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("hkdiag 1\nnode u vertex3 a b\n") {
            Err(ParseError::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(column, 19);
            }
            other => panic!("unexpected {other:?}"),
        }
        match parse("hkdiag 1\nnode u vertex3 a b c\nedge e u.a u.z\n") {
            Err(ParseError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 12)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("hkdiag 2\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn validation_errors() {
        let unused = "hkdiag 1\nnode u vertex3 a b c\nnode v vertex3 a b c\nedge e1 u.a v.a\nedge e2 u.b v.b\n";
        assert!(matches!(
            parse(unused),
            Err(ParseError::Invalid(ValidationError::UnusedPort { .. }))
        ));
        let reused = "hkdiag 1\nnode u vertex3 a b c\nnode v vertex3 a b c\nedge e1 u.a v.a\nedge e2 u.a v.b\nedge e3 u.c v.c\n";
        assert!(matches!(
            parse(reused),
            Err(ParseError::Invalid(ValidationError::PortReused { .. }))
        ));
    }

    #[test]
    fn rejects_non_spherical_rotation() {
        // K4 with one rotation reversed lives on the torus.
        let text = "hkdiag 1
node a vertex3 p q r
node b vertex3 p q r
node c vertex3 p q r
node d vertex3 p r q
edge ab a.p b.p
edge bc b.q c.p
edge ca c.q a.q
edge ad a.r d.p
edge bd b.r d.q
edge cd c.r d.r
";
        assert!(matches!(
            parse(text),
            Err(ParseError::Invalid(ValidationError::NotSpherical { .. }))
        ));
    }

    #[test]
    fn orientation_lines() {
        let d = parse("hkdiag 1\nmeta framed true\ncircle o\norient o -\n").unwrap();
        assert_eq!(d.orientations, vec![Orientation::Reversed]);
        assert!(serialize(&d).contains("orient o -"));
        assert!(parse("hkdiag 1\ncircle o\norient p +\n").is_err());
    }
}
