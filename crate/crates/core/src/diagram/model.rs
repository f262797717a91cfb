use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Trivalent vertex or a crossing. Crossing ports `0,2` carry the
/// over-strand, ports `1,3` the under-strand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Vertex3,
    Crossing,
}

impl NodeKind {
    pub fn degree(self) -> usize {
        match self {
            NodeKind::Vertex3 => 3,
            NodeKind::Crossing => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    /// Port labels in counterclockwise order.
    pub ports: Vec<String>,
}

/// A node port by position in the node's counterclockwise port list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortRef {
    pub node: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: [PortRef; 2],
}

/// One pass of a circle through a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CircleStep {
    pub crossing: usize,
    pub slot_in: usize,
    pub slot_out: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    pub id: String,
    pub word: Vec<CircleStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Forward,
    Reversed,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("node `{node}` has {found} ports, expected {expected}")]
    BadDegree { node: String, found: usize, expected: usize },
    #[error("node `{node}` repeats port label `{port}`")]
    DuplicatePort { node: String, port: String },
    #[error("port {node}.{port} is used more than once")]
    PortReused { node: String, port: String },
    #[error("port {node}.{port} is not used by any edge or circle")]
    UnusedPort { node: String, port: String },
    #[error("circle `{circle}` passes `{node}` through non-opposite ports")]
    NotStraightThrough { circle: String, node: String },
    #[error("circle `{circle}` steps through `{node}`, which is not a crossing")]
    NotACrossing { circle: String, node: String },
    #[error("closed strand through `{node}` has no trivalent vertex; declare it as a circle")]
    UndeclaredCircle { node: String },
    #[error("rotation system is not spherical: component has V - E + F = {euler}")]
    NotSpherical { euler: i64 },
    #[error("orientation given for unknown circle `{0}`")]
    UnknownCircle(String),
    #[error("framed link may not contain trivalent vertices or edges")]
    NotALink,
}

/// A segment of the diagram between two node ports. Edges are segments;
/// circles through crossings contribute implicit segments between
/// consecutive steps of their word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub ends: [PortRef; 2],
    pub source: SegmentSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentSource {
    Edge(usize),
    /// Circle index and step index: joins step `k`'s exit to step `k+1`'s entry.
    Circle(usize, usize),
}

/// A strand of the underlying spatial graph: an edge of the abstract graph
/// (vertex to vertex, possibly through crossings) or a circle component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strand {
    pub name: String,
    pub kind: StrandKind,
    /// Segments in traversal order, with `true` when traversed `ends[0] -> ends[1]`.
    pub segments: Vec<(usize, bool)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrandKind {
    /// Joins two vertex ports (possibly the same vertex).
    Open { start: PortRef, end: PortRef },
    Circle(usize),
}

/// One side of a segment as seen from a node: the segment leaves the node
/// at `ends[side]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub segment: usize,
    pub side: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Face {
    /// Darts in boundary order.
    Walk(Vec<Dart>),
    /// One of the two faces of a crossing-free circle.
    CircleSide(usize),
}

/// Validated trivalent spatial-graph diagram (or framed-link diagram).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramCode {
    pub name: Option<String>,
    pub genus_hint: Option<u32>,
    pub framed: bool,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub circles: Vec<Circle>,
    /// Per circle, in circle order.
    pub orientations: Vec<Orientation>,
    topo: Topology,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Topology {
    segments: Vec<Segment>,
    /// `port_segment[node][slot] = dart leaving that port`.
    port_dart: Vec<Vec<Dart>>,
    strands: Vec<Strand>,
    segment_strand: Vec<usize>,
}

/// Unvalidated parts of a diagram, as produced by parsers and builders.
#[derive(Debug, Clone, Default)]
pub struct RawDiagram {
    pub name: Option<String>,
    pub genus_hint: Option<u32>,
    pub framed: bool,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub circles: Vec<Circle>,
    pub orientations: HashMap<String, Orientation>,
}

impl RawDiagram {
    pub fn validate(self) -> Result<DiagramCode, ValidationError> {
        DiagramCode::from_raw(self)
    }
}

impl DiagramCode {
    pub fn from_raw(mut raw: RawDiagram) -> Result<Self, ValidationError> {
        let mut seen = HashMap::new();
        for id in raw
            .nodes
            .iter()
            .map(|n| &n.id)
            .chain(raw.edges.iter().map(|e| &e.id))
            .chain(raw.circles.iter().map(|c| &c.id))
        {
            if seen.insert(id.clone(), ()).is_some() {
                return Err(ValidationError::DuplicateId(id.clone()));
            }
        }
        for node in &raw.nodes {
            if node.ports.len() != node.kind.degree() {
                return Err(ValidationError::BadDegree {
                    node: node.id.clone(),
                    found: node.ports.len(),
                    expected: node.kind.degree(),
                });
            }
            for (a, pa) in node.ports.iter().enumerate() {
                if node.ports[..a].contains(pa) {
                    return Err(ValidationError::DuplicatePort {
                        node: node.id.clone(),
                        port: pa.clone(),
                    });
                }
            }
        }
        normalize_crossings(&mut raw);

        let mut orientations = vec![Orientation::Forward; raw.circles.len()];
        for (id, o) in &raw.orientations {
            let idx = raw
                .circles
                .iter()
                .position(|c| &c.id == id)
                .ok_or_else(|| ValidationError::UnknownCircle(id.clone()))?;
            orientations[idx] = *o;
        }

        let mut segments = Vec::new();
        for (ei, e) in raw.edges.iter().enumerate() {
            segments.push(Segment {
                ends: e.ends,
                source: SegmentSource::Edge(ei),
            });
        }
        for (ci, c) in raw.circles.iter().enumerate() {
            for (k, step) in c.word.iter().enumerate() {
                let node = &raw.nodes[step.crossing];
                if node.kind != NodeKind::Crossing {
                    return Err(ValidationError::NotACrossing {
                        circle: c.id.clone(),
                        node: node.id.clone(),
                    });
                }
                if (step.slot_in + 2) % 4 != step.slot_out {
                    return Err(ValidationError::NotStraightThrough {
                        circle: c.id.clone(),
                        node: node.id.clone(),
                    });
                }
                let next = c.word[(k + 1) % c.word.len()];
                segments.push(Segment {
                    ends: [
                        PortRef { node: step.crossing, slot: step.slot_out },
                        PortRef { node: next.crossing, slot: next.slot_in },
                    ],
                    source: SegmentSource::Circle(ci, k),
                });
            }
        }

        let unset = Dart { segment: usize::MAX, side: 0 };
        let mut port_dart: Vec<Vec<Dart>> =
            raw.nodes.iter().map(|n| vec![unset; n.kind.degree()]).collect();
        for (si, seg) in segments.iter().enumerate() {
            for side in 0..2 {
                let p = seg.ends[side];
                let slot = &mut port_dart[p.node][p.slot];
                if slot.segment != usize::MAX {
                    return Err(ValidationError::PortReused {
                        node: raw.nodes[p.node].id.clone(),
                        port: raw.nodes[p.node].ports[p.slot].clone(),
                    });
                }
                *slot = Dart { segment: si, side };
            }
        }
        for (ni, darts) in port_dart.iter().enumerate() {
            for (slot, d) in darts.iter().enumerate() {
                if d.segment == usize::MAX {
                    return Err(ValidationError::UnusedPort {
                        node: raw.nodes[ni].id.clone(),
                        port: raw.nodes[ni].ports[slot].clone(),
                    });
                }
            }
        }

        let mut code = DiagramCode {
            name: raw.name,
            genus_hint: raw.genus_hint,
            framed: raw.framed,
            nodes: raw.nodes,
            edges: raw.edges,
            circles: raw.circles,
            orientations,
            topo: Topology {
                segments,
                port_dart,
                strands: Vec::new(),
                segment_strand: Vec::new(),
            },
        };
        code.build_strands()?;
        code.check_spherical()?;
        if code.framed && !code.is_link() {
            return Err(ValidationError::NotALink);
        }
        Ok(code)
    }

    fn build_strands(&mut self) -> Result<(), ValidationError> {
        let nseg = self.topo.segments.len();
        let mut segment_strand = vec![usize::MAX; nseg];
        let mut strands = Vec::new();

        // Open strands, started from every vertex port in node order.
        for (ni, node) in self.nodes.iter().enumerate() {
            if node.kind != NodeKind::Vertex3 {
                continue;
            }
            for slot in 0..3 {
                let start = PortRef { node: ni, slot };
                let first = self.topo.port_dart[ni][slot];
                if segment_strand[first.segment] != usize::MAX {
                    continue;
                }
                let idx = strands.len();
                let mut segs = Vec::new();
                let mut dart = first;
                let end = loop {
                    segment_strand[dart.segment] = idx;
                    segs.push((dart.segment, dart.side == 0));
                    let arrive = self.topo.segments[dart.segment].ends[1 - dart.side];
                    match self.nodes[arrive.node].kind {
                        NodeKind::Vertex3 => break arrive,
                        NodeKind::Crossing => {
                            dart = self.topo.port_dart[arrive.node][(arrive.slot + 2) % 4];
                        }
                    }
                };
                let name = match self.topo.segments[first.segment].source {
                    SegmentSource::Edge(e) => self.edges[e].id.clone(),
                    SegmentSource::Circle(..) => unreachable!("circle segments avoid vertices"),
                };
                strands.push(Strand {
                    name,
                    kind: StrandKind::Open { start, end },
                    segments: segs,
                });
            }
        }

        for (ci, circle) in self.circles.iter().enumerate() {
            let idx = strands.len();
            let segs: Vec<(usize, bool)> = (0..nseg)
                .filter(|&s| matches!(self.topo.segments[s].source, SegmentSource::Circle(c, _) if c == ci))
                .map(|s| (s, true))
                .collect();
            for &(s, _) in &segs {
                segment_strand[s] = idx;
            }
            strands.push(Strand {
                name: circle.id.clone(),
                kind: StrandKind::Circle(ci),
                segments: segs,
            });
        }

        if let Some(s) = segment_strand.iter().position(|&s| s == usize::MAX) {
            let node = self.topo.segments[s].ends[0].node;
            return Err(ValidationError::UndeclaredCircle {
                node: self.nodes[node].id.clone(),
            });
        }
        self.topo.strands = strands;
        self.topo.segment_strand = segment_strand;
        Ok(())
    }

    fn check_spherical(&self) -> Result<(), ValidationError> {
        let faces = self.faces();
        let comps = self.diagram_components();
        let mut v = vec![0i64; comps.count];
        let mut e = vec![0i64; comps.count];
        let mut f = vec![0i64; comps.count];
        for ni in 0..self.nodes.len() {
            v[comps.node[ni]] += 1;
        }
        for seg in &self.topo.segments {
            e[comps.node[seg.ends[0].node]] += 1;
        }
        for face in &faces {
            match face {
                Face::Walk(darts) => {
                    let seg = &self.topo.segments[darts[0].segment];
                    f[comps.node[seg.ends[0].node]] += 1;
                }
                Face::CircleSide(c) => f[comps.circle[*c]] += 1,
            }
        }
        for c in 0..comps.count {
            let euler = v[c] - e[c] + f[c];
            if euler != 2 {
                return Err(ValidationError::NotSpherical { euler });
            }
        }
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.topo.segments
    }

    pub fn strands(&self) -> &[Strand] {
        &self.topo.strands
    }

    /// Strand carrying the given segment.
    pub fn segment_strand(&self, segment: usize) -> usize {
        self.topo.segment_strand[segment]
    }

    /// Dart leaving the given port.
    pub fn dart_at(&self, port: PortRef) -> Dart {
        self.topo.port_dart[port.node][port.slot]
    }

    /// Strand index by strand name (the first edge id of a graph edge, or a
    /// circle id). Any edge id along a strand also resolves to that strand.
    pub fn strand_by_name(&self, name: &str) -> Option<usize> {
        if let Some(i) = self.topo.strands.iter().position(|s| s.name == name) {
            return Some(i);
        }
        let e = self.edges.iter().position(|e| e.id == name)?;
        let seg = self
            .topo
            .segments
            .iter()
            .position(|s| s.source == SegmentSource::Edge(e))?;
        Some(self.topo.segment_strand[seg])
    }

    pub fn crossing_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Crossing).count()
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Vertex3).count()
    }

    /// No trivalent vertices and no edges: only circles and crossings.
    pub fn is_link(&self) -> bool {
        self.vertex_count() == 0 && self.edges.is_empty()
    }

    /// Strands meeting each trivalent vertex, in port order. A loop edge
    /// appears twice.
    pub fn vertex_strands(&self) -> Vec<(usize, [usize; 3])> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == NodeKind::Vertex3)
            .map(|(ni, _)| {
                let s = |slot: usize| self.topo.segment_strand[self.topo.port_dart[ni][slot].segment];
                (ni, [s(0), s(1), s(2)])
            })
            .collect()
    }

    /// Next dart of a face walk: arrive at the far end and leave through the
    /// clockwise-neighboring port.
    fn face_next(&self, d: Dart) -> Dart {
        let arrive = self.topo.segments[d.segment].ends[1 - d.side];
        let deg = self.nodes[arrive.node].kind.degree();
        self.topo.port_dart[arrive.node][(arrive.slot + deg - 1) % deg]
    }

    /// Face boundary walks of the rotation system, crossings treated as
    /// 4-valent vertices.
    pub fn faces(&self) -> Vec<Face> {
        let nseg = self.topo.segments.len();
        let mut seen = vec![[false; 2]; nseg];
        let mut faces = Vec::new();
        for s in 0..nseg {
            for side in 0..2 {
                if seen[s][side] {
                    continue;
                }
                let start = Dart { segment: s, side };
                let mut walk = Vec::new();
                let mut d = start;
                loop {
                    seen[d.segment][d.side] = true;
                    walk.push(d);
                    d = self.face_next(d);
                    if d == start {
                        break;
                    }
                }
                faces.push(Face::Walk(walk));
            }
        }
        for (ci, c) in self.circles.iter().enumerate() {
            if c.word.is_empty() {
                faces.push(Face::CircleSide(ci));
                faces.push(Face::CircleSide(ci));
            }
        }
        faces
    }

    /// Connected components of the diagram, crossings connecting the
    /// strands through them.
    fn diagram_components(&self) -> Components {
        let n = self.nodes.len();
        let mut uf = UnionFind::new(n);
        for seg in &self.topo.segments {
            uf.union(seg.ends[0].node, seg.ends[1].node);
        }
        let mut label = HashMap::new();
        let node: Vec<usize> = (0..n)
            .map(|i| {
                let root = uf.find(i);
                let next = label.len();
                *label.entry(root).or_insert(next)
            })
            .collect();
        let mut count = label.len();
        let circle = self
            .circles
            .iter()
            .map(|c| match c.word.first() {
                Some(step) => node[step.crossing],
                None => {
                    count += 1;
                    count - 1
                }
            })
            .collect();
        Components { node, circle, count }
    }

    /// Number of connected pieces of the diagram (crossings join strands).
    pub fn diagram_component_count(&self) -> usize {
        self.diagram_components().count
    }

    /// Genus of each component of the represented handlebody-link: graph
    /// components first (`e - v + 1`), then one per circle.
    pub fn component_genera(&self) -> Vec<u32> {
        let n = self.nodes.len();
        let mut uf = UnionFind::new(n);
        for s in &self.topo.strands {
            if let StrandKind::Open { start, end } = s.kind {
                uf.union(start.node, end.node);
            }
        }
        let mut edges_in = vec![0i64; n];
        for s in &self.topo.strands {
            if let StrandKind::Open { start, .. } = s.kind {
                edges_in[uf.find(start.node)] += 1;
            }
        }
        let mut verts_in = vec![0i64; n];
        let mut roots = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.kind == NodeKind::Vertex3 {
                let r = uf.find(i);
                verts_in[r] += 1;
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
        let mut out: Vec<u32> = roots
            .iter()
            .map(|&r| (edges_in[r] - verts_in[r] + 1) as u32)
            .collect();
        out.extend(self.circles.iter().map(|_| 1));
        out
    }

    /// `(g, l)`: total genus and number of components.
    pub fn genus_and_components(&self) -> (u32, u32) {
        let g = self.component_genera();
        (g.iter().sum(), g.len() as u32)
    }

    /// Reflect through the projection plane: every crossing changes.
    pub fn mirror(&self) -> DiagramCode {
        let mut out = self.clone();
        for ni in 0..out.nodes.len() {
            if out.nodes[ni].kind == NodeKind::Crossing {
                out = out.crossing_changed(ni);
            }
        }
        out
    }

    /// Change the crossing at node `node`: rotate its port list by one so
    /// the former under-strand occupies ports `0,2`. Changing twice gives
    /// back the same code.
    pub fn crossing_changed(&self, node: usize) -> DiagramCode {
        assert_eq!(self.nodes[node].kind, NodeKind::Crossing);
        let mut raw = self.to_raw();
        raw.nodes[node].ports.rotate_left(1);
        let remap = |p: &mut PortRef| {
            if p.node == node {
                p.slot = (p.slot + 3) % 4;
            }
        };
        for e in &mut raw.edges {
            e.ends.iter_mut().for_each(remap);
        }
        for c in &mut raw.circles {
            for step in &mut c.word {
                if step.crossing == node {
                    step.slot_in = (step.slot_in + 3) % 4;
                    step.slot_out = (step.slot_out + 3) % 4;
                }
            }
        }
        raw.validate().expect("crossing change preserves validity")
    }

    pub fn to_raw(&self) -> RawDiagram {
        RawDiagram {
            name: self.name.clone(),
            genus_hint: self.genus_hint,
            framed: self.framed,
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            circles: self.circles.clone(),
            orientations: self
                .circles
                .iter()
                .zip(&self.orientations)
                .filter(|(_, o)| **o == Orientation::Reversed)
                .map(|(c, o)| (c.id.clone(), *o))
                .collect(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("<unnamed>")
    }
}

/// A crossing's port list can start at either end of the over-strand.
/// Keep the lexicographically smaller of the two listings.
fn normalize_crossings(raw: &mut RawDiagram) {
    for ni in 0..raw.nodes.len() {
        let node = &mut raw.nodes[ni];
        if node.kind != NodeKind::Crossing {
            continue;
        }
        let mut turned = node.ports.clone();
        turned.rotate_left(2);
        if turned >= node.ports {
            continue;
        }
        node.ports = turned;
        let shift = |slot: usize| (slot + 2) % 4;
        for e in &mut raw.edges {
            for p in e.ends.iter_mut().filter(|p| p.node == ni) {
                p.slot = shift(p.slot);
            }
        }
        for c in &mut raw.circles {
            for step in c.word.iter_mut().filter(|s| s.crossing == ni) {
                step.slot_in = shift(step.slot_in);
                step.slot_out = shift(step.slot_out);
            }
        }
    }
}

impl fmt::Display for DiagramCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::format::serialize(self))
    }
}

struct Components {
    node: Vec<usize>,
    circle: Vec<usize>,
    count: usize,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
