//! Top-to-bottom slice construction of diagrams.
//!
//! The builder keeps a row of open strand ends hanging downward and applies
//! elementary slices to adjacent positions. Everything it produces is planar
//! by construction, so rotation systems never need to be written by hand.

use std::collections::HashMap;

use super::model::{
    Circle, CircleStep, DiagramCode, Edge, Node, NodeKind, PortRef, RawDiagram, ValidationError,
};

/// Crossing type for strands running downward through adjacent positions.
/// `Pos` puts the strand from the upper right on top, `Neg` the strand from
/// the upper left. With both strands oriented downward, `Pos` is a positive
/// crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cross {
    Pos,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Pt {
    Port(usize, usize),
    /// Side of a cap: the two sides are joined.
    Cap(usize, u8),
}

#[derive(Debug, Clone, Default)]
pub struct Builder {
    name: Option<String>,
    genus_hint: Option<u32>,
    framed: bool,
    nodes: Vec<Node>,
    row: Vec<Pt>,
    links: Vec<(Pt, Pt)>,
    caps: usize,
}

impl Builder {
    pub fn new(name: &str) -> Self {
        Builder {
            name: Some(name.to_string()),
            ..Default::default()
        }
    }

    pub fn genus(mut self, g: u32) -> Self {
        self.genus_hint = Some(g);
        self
    }

    pub fn framed(mut self) -> Self {
        self.framed = true;
        self
    }

    pub fn width(&self) -> usize {
        self.row.len()
    }

    fn add_node(&mut self, kind: NodeKind) -> usize {
        let (prefix, labels): (&str, &[&str]) = match kind {
            NodeKind::Vertex3 => ("v", &["a", "b", "c"]),
            NodeKind::Crossing => ("x", &["a", "b", "c", "d"]),
        };
        let count = self.nodes.iter().filter(|n| n.kind == kind).count();
        self.nodes.push(Node {
            id: format!("{prefix}{}", count + 1),
            kind,
            ports: labels.iter().map(|s| s.to_string()).collect(),
        });
        self.nodes.len() - 1
    }

    fn link(&mut self, a: Pt, b: Pt) {
        self.links.push((a, b));
    }

    /// New arc with both ends at positions `i`, `i+1`.
    pub fn cap(&mut self, i: usize) -> &mut Self {
        assert!(i <= self.row.len(), "cap position {i} out of range");
        let c = self.caps;
        self.caps += 1;
        self.row.insert(i, Pt::Cap(c, 1));
        self.row.insert(i, Pt::Cap(c, 0));
        self
    }

    /// Joins the ends at positions `i`, `i+1`.
    pub fn cup(&mut self, i: usize) -> &mut Self {
        assert!(i + 1 < self.row.len(), "cup position {i} out of range");
        let a = self.row.remove(i);
        let b = self.row.remove(i);
        self.link(a, b);
        self
    }

    /// Crosses the strands at positions `i`, `i+1`.
    pub fn cross(&mut self, i: usize, kind: Cross) -> &mut Self {
        assert!(i + 1 < self.row.len(), "cross position {i} out of range");
        let x = self.add_node(NodeKind::Crossing);
        let (nw, ne) = (self.row[i], self.row[i + 1]);
        // Counterclockwise port order, over-strand through slots 0 and 2.
        let (s_ne, s_nw, s_sw, s_se) = match kind {
            Cross::Pos => (0, 1, 2, 3),
            Cross::Neg => (3, 0, 1, 2),
        };
        self.link(ne, Pt::Port(x, s_ne));
        self.link(nw, Pt::Port(x, s_nw));
        self.row[i] = Pt::Port(x, s_sw);
        self.row[i + 1] = Pt::Port(x, s_se);
        self
    }

    /// Joins the strands at `i`, `i+1` into one at `i` through a vertex.
    pub fn merge(&mut self, i: usize) -> &mut Self {
        assert!(i + 1 < self.row.len(), "merge position {i} out of range");
        let v = self.add_node(NodeKind::Vertex3);
        let nw = self.row[i];
        let ne = self.row.remove(i + 1);
        self.link(ne, Pt::Port(v, 0));
        self.link(nw, Pt::Port(v, 1));
        self.row[i] = Pt::Port(v, 2);
        self
    }

    /// Splits the strand at `i` into two at `i`, `i+1` through a vertex.
    pub fn split(&mut self, i: usize) -> &mut Self {
        assert!(i < self.row.len(), "split position {i} out of range");
        let v = self.add_node(NodeKind::Vertex3);
        let n = self.row[i];
        self.link(n, Pt::Port(v, 0));
        self.row[i] = Pt::Port(v, 1);
        self.row.insert(i + 1, Pt::Port(v, 2));
        self
    }

    /// Closes the diagram. Panics if strand ends are still open.
    pub fn finish(&self) -> Result<DiagramCode, ValidationError> {
        assert!(self.row.is_empty(), "{} strand ends left open", self.row.len());
        let mut partner: HashMap<Pt, Pt> = HashMap::new();
        for &(a, b) in &self.links {
            partner.insert(a, b);
            partner.insert(b, a);
        }
        let other_side = |p: Pt| match p {
            Pt::Cap(c, s) => Pt::Cap(c, 1 - s),
            Pt::Port(..) => unreachable!(),
        };

        // Port-to-port connections through caps, and cap-only circles.
        let mut conn: HashMap<PortRef, PortRef> = HashMap::new();
        let mut cap_seen = vec![false; self.caps];
        let mut empty_circles = 0;
        for (ni, node) in self.nodes.iter().enumerate() {
            for slot in 0..node.kind.degree() {
                let start = PortRef { node: ni, slot };
                if conn.contains_key(&start) {
                    continue;
                }
                let mut p = partner[&Pt::Port(ni, slot)];
                while let Pt::Cap(c, _) = p {
                    cap_seen[c] = true;
                    p = partner[&other_side(p)];
                }
                let Pt::Port(n2, s2) = p else { unreachable!() };
                let end = PortRef { node: n2, slot: s2 };
                conn.insert(start, end);
                conn.insert(end, start);
            }
        }
        for c in 0..self.caps {
            if cap_seen[c] {
                continue;
            }
            let mut p = Pt::Cap(c, 0);
            loop {
                let Pt::Cap(c2, _) = p else { unreachable!() };
                cap_seen[c2] = true;
                p = partner[&other_side(p)];
                if p == Pt::Cap(c, 0) {
                    break;
                }
            }
            empty_circles += 1;
        }

        assemble(
            Meta {
                name: self.name.clone(),
                genus_hint: self.genus_hint,
                framed: self.framed,
            },
            self.nodes.clone(),
            &conn,
            empty_circles,
        )
    }
}

pub(crate) struct Meta {
    pub name: Option<String>,
    pub genus_hint: Option<u32>,
    pub framed: bool,
}

/// Turns a port-to-port pairing into edges and circles. Closed chains that
/// only pass through crossings become circle words.
pub(crate) fn assemble(
    meta: Meta,
    nodes: Vec<Node>,
    conn: &HashMap<PortRef, PortRef>,
    empty_circles: usize,
) -> Result<DiagramCode, ValidationError> {
    let is_crossing = |n: usize| nodes[n].kind == NodeKind::Crossing;
    let mut in_circle: HashMap<PortRef, ()> = HashMap::new();
    let mut circles = Vec::new();
    for (ni, node) in nodes.iter().enumerate() {
        if node.kind != NodeKind::Crossing {
            continue;
        }
        for slot in 0..4 {
            let start = PortRef { node: ni, slot };
            if in_circle.contains_key(&start) {
                continue;
            }
            let mut word = Vec::new();
            let mut out = start;
            let closed = loop {
                let arrive = conn[&out];
                if !is_crossing(arrive.node) {
                    break false;
                }
                let next_out = PortRef {
                    node: arrive.node,
                    slot: (arrive.slot + 2) % 4,
                };
                word.push(CircleStep {
                    crossing: arrive.node,
                    slot_in: arrive.slot,
                    slot_out: next_out.slot,
                });
                out = next_out;
                if out == start {
                    break true;
                }
            };
            if closed {
                for s in &word {
                    for slot in [s.slot_in, s.slot_out] {
                        in_circle.insert(PortRef { node: s.crossing, slot }, ());
                    }
                }
                circles.push(word);
            }
        }
    }

    let mut edges = Vec::new();
    for (ni, node) in nodes.iter().enumerate() {
        for slot in 0..node.kind.degree() {
            let a = PortRef { node: ni, slot };
            let b = conn[&a];
            if in_circle.contains_key(&a) || b < a {
                continue;
            }
            edges.push(Edge {
                id: format!("e{}", edges.len() + 1),
                ends: [a, b],
            });
        }
    }

    let mut all_circles: Vec<Circle> = circles
        .into_iter()
        .map(|word| Circle { id: String::new(), word })
        .collect();
    all_circles.extend((0..empty_circles).map(|_| Circle {
        id: String::new(),
        word: Vec::new(),
    }));
    for (k, c) in all_circles.iter_mut().enumerate() {
        c.id = format!("o{}", k + 1);
    }

    RawDiagram {
        name: meta.name,
        genus_hint: meta.genus_hint,
        framed: meta.framed,
        nodes,
        edges,
        circles: all_circles,
        orientations: HashMap::new(),
    }
    .validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle() {
        let d = Builder::new("o").cap(0).cup(0).finish().unwrap();
        assert_eq!((d.nodes.len(), d.circles.len()), (0, 1));
        assert_eq!(d.genus_and_components(), (1, 1));
        assert_eq!(d.faces().len(), 2);
    }

    #[test]
    fn theta() {
        let d = Builder::new("t")
            .cap(0)
            .split(0)
            .merge(0)
            .cup(0)
            .finish()
            .unwrap();
        assert_eq!((d.vertex_count(), d.edges.len()), (2, 3));
        assert_eq!(d.genus_and_components(), (2, 1));
        assert_eq!(d.faces().len(), 3);
    }

    #[test]
    fn kinked_circle_is_a_circle_word() {
        let mut b = Builder::new("kink");
        b.cap(0).cap(1).cross(0, Cross::Pos).cup(1).cup(0);
        let d = b.finish().unwrap();
        assert_eq!(d.edges.len(), 0);
        assert_eq!(d.circles.len(), 1);
        assert_eq!(d.circles[0].word.len(), 2);
        assert_eq!(d.faces().len(), 3);
    }

    #[test]
    fn hopf_link() {
        let mut b = Builder::new("hopf");
        b.cap(0)
            .cap(2)
            .cross(1, Cross::Pos)
            .cross(1, Cross::Pos)
            .cup(2)
            .cup(0);
        let d = b.finish().unwrap();
        assert_eq!(d.circles.len(), 2);
        assert_eq!(d.genus_and_components(), (2, 2));
        assert_eq!(d.diagram_component_count(), 1);
    }
}
