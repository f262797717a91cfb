//! Colored trivalent nets with crossings, reduced by fusion, bubble,
//! triangle and recoupling moves.

use num_complex::Complex64;

use super::{Coloring, EvalError};
use crate::diagram::{DiagramCode, NodeKind, PortRef, StrandKind};
use crate::skein::{Color, QuantumParams, TwistSense};

#[derive(Debug, Clone)]
struct NetNode {
    crossing: bool,
    /// Darts leaving this node, counterclockwise.
    darts: Vec<usize>,
    alive: bool,
}

/// A colored diagram in the middle of evaluation, together with the scalar
/// already split off. Edge `e` owns darts `2e` and `2e + 1`; a dart sits at
/// the node it leaves.
#[derive(Debug, Clone)]
pub struct Net {
    nodes: Vec<NetNode>,
    dart_at: Vec<(usize, usize)>,
    colors: Vec<Color>,
    edge_alive: Vec<bool>,
    coef: Complex64,
}

/// A crossing-free net.
pub type PlanarNet = Net;

enum Step {
    Progress,
    Stuck,
    Zero,
}

impl Net {
    /// Builds the net of `d` with strand colors `c`. Returns `None` when the
    /// coloring is not admissible at some vertex.
    pub fn from_diagram(d: &DiagramCode, c: &Coloring, p: &QuantumParams) -> Option<Net> {
        let colors = &c.0;
        assert_eq!(colors.len(), d.strands().len(), "one color per strand");
        for (_, s) in d.vertex_strands() {
            if !p.admissible(colors[s[0]], colors[s[1]], colors[s[2]]) {
                return None;
            }
        }
        if colors.iter().any(|&x| x > p.color_max()) {
            return None;
        }
        let nseg = d.segments().len();
        let mut net = Net {
            nodes: d
                .nodes
                .iter()
                .enumerate()
                .map(|(ni, n)| NetNode {
                    crossing: n.kind == NodeKind::Crossing,
                    darts: (0..n.kind.degree())
                        .map(|slot| {
                            let dart = d.dart_at(PortRef { node: ni, slot });
                            2 * dart.segment + dart.side
                        })
                        .collect(),
                    alive: true,
                })
                .collect(),
            dart_at: vec![(0, 0); 2 * nseg],
            colors: (0..nseg).map(|s| colors[d.segment_strand(s)]).collect(),
            edge_alive: vec![true; nseg],
            coef: Complex64::new(1.0, 0.0),
        };
        for (s, seg) in d.segments().iter().enumerate() {
            for side in 0..2 {
                net.dart_at[2 * s + side] = (seg.ends[side].node, seg.ends[side].slot);
            }
        }
        for (si, strand) in d.strands().iter().enumerate() {
            if let StrandKind::Circle(ci) = strand.kind {
                if d.circles[ci].word.is_empty() {
                    net.coef *= p.delta(colors[si] as i64);
                }
            }
        }
        Some(net)
    }

    pub fn coefficient(&self) -> Complex64 {
        self.coef
    }

    pub fn crossing_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive && n.crossing).count()
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive && !n.crossing).count()
    }

    fn color(&self, dart: usize) -> Color {
        self.colors[dart / 2]
    }

    fn node_of(&self, dart: usize) -> usize {
        self.dart_at[dart].0
    }

    fn place(&mut self, dart: usize, node: usize, slot: usize) {
        self.nodes[node].darts[slot] = dart;
        self.dart_at[dart] = (node, slot);
    }

    fn new_edge(&mut self, color: Color) -> usize {
        self.colors.push(color);
        self.edge_alive.push(true);
        self.dart_at.push((usize::MAX, 0));
        self.dart_at.push((usize::MAX, 0));
        self.colors.len() - 1
    }

    fn kill_edge(&mut self, dart: usize) {
        self.edge_alive[dart / 2] = false;
    }

    fn resync(&mut self, node: usize) {
        for slot in 0..self.nodes[node].darts.len() {
            let d = self.nodes[node].darts[slot];
            self.dart_at[d] = (node, slot);
        }
    }

    /// Joins the far ends of darts `da` and `db`, whose own ends are being
    /// discarded. Returns false if the colors disagree.
    fn join(&mut self, da: usize, db: usize, p: &QuantumParams) -> bool {
        if self.color(da) != self.color(db) {
            return false;
        }
        if da ^ 1 == db {
            self.coef *= p.delta(self.color(da) as i64);
            self.kill_edge(da);
            return true;
        }
        let (n, s) = self.dart_at[db ^ 1];
        self.place(da, n, s);
        self.kill_edge(db);
        true
    }

    /// Removes 0-colored edges and the 2-valent nodes they leave behind.
    fn drop_zero_edges(&mut self, p: &QuantumParams) -> Step {
        let mut changed = false;
        for e in 0..self.colors.len() {
            if !self.edge_alive[e] || self.colors[e] != 0 {
                continue;
            }
            changed = true;
            self.edge_alive[e] = false;
            let (n1, s1) = self.dart_at[2 * e];
            let (n2, s2) = self.dart_at[2 * e + 1];
            if n1 == n2 {
                self.nodes[n1].darts.remove(s1.max(s2));
                self.nodes[n1].darts.remove(s1.min(s2));
                self.resync(n1);
            } else {
                self.nodes[n1].darts.remove(s1);
                self.resync(n1);
                self.nodes[n2].darts.remove(s2);
                self.resync(n2);
            }
        }
        if !changed {
            return Step::Stuck;
        }
        for n in 0..self.nodes.len() {
            if !self.nodes[n].alive {
                continue;
            }
            let full = if self.nodes[n].crossing { 4 } else { 3 };
            let deg = self.nodes[n].darts.len();
            if deg == full {
                continue;
            }
            match deg {
                0 => self.nodes[n].alive = false,
                2 => {
                    let (da, db) = (self.nodes[n].darts[0], self.nodes[n].darts[1]);
                    self.nodes[n].alive = false;
                    if !self.join(da, db, p) {
                        return Step::Zero;
                    }
                }
                _ => return Step::Zero,
            }
        }
        Step::Progress
    }

    /// True if some edge is a bridge. Colors are nonzero at this point, so a
    /// bridge forces the value to vanish.
    fn has_bridge(&self) -> bool {
        let n = self.nodes.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut time = 0;
        for root in 0..n {
            if !self.nodes[root].alive || disc[root] != usize::MAX {
                continue;
            }
            // Iterative DFS: (node, edge used to enter, next dart index).
            let mut stack = vec![(root, usize::MAX, 0usize)];
            disc[root] = time;
            low[root] = time;
            time += 1;
            while let Some(&mut (v, in_edge, ref mut idx)) = stack.last_mut() {
                if *idx < self.nodes[v].darts.len() {
                    let d = self.nodes[v].darts[*idx];
                    *idx += 1;
                    if d / 2 == in_edge {
                        continue;
                    }
                    let w = self.node_of(d ^ 1);
                    if disc[w] == usize::MAX {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, d / 2, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    fn face_next(&self, d: usize) -> usize {
        let (n, t) = self.dart_at[d ^ 1];
        let deg = self.nodes[n].darts.len();
        self.nodes[n].darts[(t + deg - 1) % deg]
    }

    /// Face walks, in order of their smallest starting dart.
    fn faces(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.dart_at.len()];
        let mut faces = Vec::new();
        for d in 0..self.dart_at.len() {
            if seen[d] || !self.edge_alive[d / 2] {
                continue;
            }
            let mut walk = Vec::new();
            let mut x = d;
            loop {
                seen[x] = true;
                walk.push(x);
                x = self.face_next(x);
                if x == d {
                    break;
                }
            }
            faces.push(walk);
        }
        faces
    }

    fn is_vertex(&self, n: usize) -> bool {
        !self.nodes[n].crossing
    }

    /// The dart at `node` other than those in `used`.
    fn third_dart(&self, node: usize, used: [usize; 2]) -> usize {
        *self.nodes[node]
            .darts
            .iter()
            .find(|d| !used.contains(d))
            .expect("trivalent node")
    }

    fn collapse_bigon(&mut self, walk: &[usize], p: &QuantumParams) -> Step {
        let (d1, d2) = (walk[0], walk[1]);
        let (u, v) = (self.node_of(d1), self.node_of(d2));
        let ou = self.third_dart(u, [d1, d2 ^ 1]);
        let ov = self.third_dart(v, [d2, d1 ^ 1]);
        let (a, b) = (self.color(ou), self.color(ov));
        if a != b {
            return Step::Zero;
        }
        let theta = match p.theta(a, self.color(d1), self.color(d2)) {
            Ok(t) => t,
            Err(_) => return Step::Zero,
        };
        self.coef *= theta / p.delta(a as i64);
        self.kill_edge(d1);
        self.kill_edge(d2);
        self.nodes[u].alive = false;
        self.nodes[v].alive = false;
        self.join(ou, ov, p);
        Step::Progress
    }

    fn collapse_triangle(&mut self, walk: &[usize], p: &QuantumParams) -> Step {
        let (d1, d2, d3) = (walk[0], walk[1], walk[2]);
        let (u, v, w) = (self.node_of(d1), self.node_of(d2), self.node_of(d3));
        let ou = self.third_dart(u, [d1, d3 ^ 1]);
        let ov = self.third_dart(v, [d2, d1 ^ 1]);
        let ow = self.third_dart(w, [d3, d2 ^ 1]);
        let (a, b, c) = (self.color(ou), self.color(ov), self.color(ow));
        let (uv, vw, wu) = (self.color(d1), self.color(d2), self.color(d3));
        if !p.admissible(a, b, c) {
            return Step::Zero;
        }
        let tet = p.tet(a, b, c, vw, wu, uv).expect("triangle vertices are admissible");
        self.coef *= tet / p.theta(a, b, c).expect("checked above");
        for d in [d1, d2, d3] {
            self.kill_edge(d);
        }
        self.nodes[v].alive = false;
        self.nodes[w].alive = false;
        self.nodes[u].darts = vec![ou, ov, ow];
        self.resync(u);
        Step::Progress
    }

    /// One round of deterministic simplification.
    fn simplify(&mut self, p: &QuantumParams) -> Step {
        match self.drop_zero_edges(p) {
            Step::Stuck => {}
            other => return other,
        }
        if self.has_bridge() {
            return Step::Zero;
        }
        let faces = self.faces();
        let simple = |walk: &Vec<usize>| {
            let nodes: Vec<usize> = walk.iter().map(|&d| self.node_of(d)).collect();
            nodes.iter().all(|&n| self.is_vertex(n))
                && (1..nodes.len()).all(|i| !nodes[..i].contains(&nodes[i]))
                && (1..walk.len()).all(|i| !walk[..i].iter().any(|&d| d / 2 == walk[i] / 2))
        };
        for len in [2, 3] {
            if let Some(walk) = faces.iter().find(|w| w.len() == len && simple(w)) {
                let walk = walk.clone();
                return if len == 2 {
                    self.collapse_bigon(&walk, p)
                } else {
                    self.collapse_triangle(&walk, p)
                };
            }
        }
        Step::Stuck
    }

    fn crossing_colors(&self, x: usize) -> (Color, Color) {
        let d = &self.nodes[x].darts;
        (self.color(d[0]), self.color(d[1]))
    }

    fn fusion_channels(a: Color, b: Color, p: &QuantumParams) -> impl Iterator<Item = Color> + '_ {
        p.colors().filter(move |&k| p.admissible(a, b, k))
    }

    /// Crossing with the fewest fusion channels, first by index on ties.
    pub fn best_crossing(&self, p: &QuantumParams) -> Option<usize> {
        (0..self.nodes.len())
            .filter(|&n| self.nodes[n].alive && self.nodes[n].crossing)
            .min_by_key(|&n| {
                let (a, b) = self.crossing_colors(n);
                Self::fusion_channels(a, b, p).count()
            })
    }

    /// Replaces crossing `x` (over-strand colored `a` through ports 0,2,
    /// under-strand `b` through 1,3) by the fusion sum over channels `k`:
    /// vertices `(p0, p1, k)` and `(k, p2, p3)` weighted by
    /// `Delta_k / theta(a,b,k)` and the twist phase.
    pub fn resolve_crossing(&self, x: usize, p: &QuantumParams) -> Vec<Net> {
        assert!(self.nodes[x].alive && self.nodes[x].crossing);
        let (a, b) = self.crossing_colors(x);
        let d = self.nodes[x].darts.clone();
        Self::fusion_channels(a, b, p)
            .map(|k| {
                let mut net = self.clone();
                let e = net.new_edge(k);
                let y = net.nodes.len();
                net.nodes.push(NetNode {
                    crossing: false,
                    darts: vec![2 * e + 1, d[2], d[3]],
                    alive: true,
                });
                net.nodes[x].crossing = false;
                net.nodes[x].darts = vec![d[0], d[1], 2 * e];
                net.resync(x);
                net.resync(y);
                let theta = p.theta(a, b, k).expect("admissible channel");
                let twist = p.lambda(a, b, k, TwistSense::Negative).expect("admissible channel");
                net.coef *= twist * (p.delta(k as i64) / theta);
                net
            })
            .collect()
    }

    /// Recoupling move on the first edge of a smallest face. Requires a
    /// crossing-free net with at least one vertex.
    fn recouple(&self, p: &QuantumParams) -> Vec<Net> {
        let faces = self.faces();
        let walk = faces.iter().min_by_key(|w| w.len()).expect("nonempty net");
        let d1 = walk[0];
        let (u, su) = self.dart_at[d1];
        let (v, sv) = self.dart_at[d1 ^ 1];
        let rot = |n: usize, s: usize| {
            let ds = &self.nodes[n].darts;
            [ds[(s + 1) % 3], ds[(s + 2) % 3]]
        };
        let [dp, dq] = rot(u, su);
        let [ds, dt] = rot(v, sv);
        let (cp, cq, cs, ct, m) = (
            self.color(dp),
            self.color(dq),
            self.color(ds),
            self.color(dt),
            self.color(d1),
        );
        p.colors()
            .filter(|&n| p.admissible(cp, ct, n) && p.admissible(cq, cs, n))
            .filter_map(|n| {
                let w = p.sixj(cp, cq, m, cs, ct, n).ok()?;
                let mut net = self.clone();
                net.colors[d1 / 2] = n;
                net.nodes[u].darts = vec![d1, dq, ds];
                net.nodes[v].darts = vec![d1 ^ 1, dt, dp];
                net.resync(u);
                net.resync(v);
                net.coef *= w;
                Some(net)
            })
            .collect()
    }

    /// `budget` bounds the number of moves along any single branch.
    fn evaluate(mut self, p: &QuantumParams, mut budget: usize) -> Result<Complex64, EvalError> {
        loop {
            if budget == 0 {
                return Err(EvalError::NoProgress);
            }
            budget -= 1;
            match self.simplify(p) {
                Step::Zero => return Ok(Complex64::new(0.0, 0.0)),
                Step::Progress => continue,
                Step::Stuck => break,
            }
        }
        if self.nodes.iter().all(|n| !n.alive) {
            return Ok(self.coef);
        }
        let children = match self.best_crossing(p) {
            Some(x) => self.resolve_crossing(x, p),
            None => self.recouple(p),
        };
        let mut acc = crate::sum::Neumaier::default();
        for child in children {
            acc.add(child.evaluate(p, budget)?);
        }
        Ok(acc.value())
    }

    /// Evaluates the net, crossings included.
    pub fn value(self, p: &QuantumParams) -> Result<Complex64, EvalError> {
        let size = self.nodes.len() + self.colors.len() + 1;
        self.evaluate(p, 1000 + 100 * size * size)
    }
}

/// Value of a crossing-free net in the skein of the sphere.
pub fn reduce_planar(net: PlanarNet, p: &QuantumParams) -> Result<f64, EvalError> {
    if net.crossing_count() > 0 {
        return Err(EvalError::NotPlanar);
    }
    Ok(net.value(p)?.re)
}
