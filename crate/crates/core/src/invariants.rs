//! Admissible colorings, Yokota's invariant and the handlebody-link
//! invariant `<.>_H`, with closed forms used as regression oracles.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::builder::{assemble, Meta};
use crate::diagram::{DiagramCode, PortRef, StrandKind, UnionFind};
use crate::evaluator::{bracket, Coloring, EvalError};
use crate::skein::{Color, QuantumParams, TwistSense};
use crate::sum::Neumaier;

/// Depth-first enumeration of admissible colorings. Strands are ordered
/// along a breadth-first walk of the vertices so each vertex constraint is
/// checked as soon as its last strand gets a color.
pub struct Colorings {
    max: Color,
    admissible: Vec<Vec<bool>>,
    order: Vec<usize>,
    /// Vertex triples (strand indices) to check once position `k` is set.
    checks: Vec<Vec<[usize; 3]>>,
    colors: Vec<Color>,
    started: bool,
    done: bool,
}

impl Colorings {
    fn ok(&self, k: usize) -> bool {
        let side = self.max as usize + 1;
        self.checks[k].iter().all(|t| {
            let (a, b, c) = (self.colors[t[0]], self.colors[t[1]], self.colors[t[2]]);
            self.admissible[a as usize * side + b as usize][c as usize]
        })
    }
}

impl Iterator for Colorings {
    type Item = Coloring;

    fn next(&mut self) -> Option<Coloring> {
        if self.done {
            return None;
        }
        let n = self.order.len();
        if n == 0 {
            self.done = true;
            return Some(Coloring(Vec::new()));
        }
        let (mut k, mut bump) = if self.started {
            (n - 1, true)
        } else {
            self.started = true;
            self.colors[self.order[0]] = 0;
            (0, false)
        };
        loop {
            let s = self.order[k];
            if bump {
                self.colors[s] += 1;
            }
            if self.colors[s] > self.max {
                if k == 0 {
                    self.done = true;
                    return None;
                }
                k -= 1;
                bump = true;
                continue;
            }
            if !self.ok(k) {
                bump = true;
                continue;
            }
            if k == n - 1 {
                return Some(Coloring(self.colors.clone()));
            }
            k += 1;
            self.colors[self.order[k]] = 0;
            bump = false;
        }
    }
}

/// All colorings of `d` admissible at every vertex, in a fixed order.
pub fn enumerate_colorings(d: &DiagramCode, p: &QuantumParams) -> Colorings {
    let nstrands = d.strands().len();
    let vs = d.vertex_strands();
    let mut by_node: HashMap<usize, [usize; 3]> = HashMap::new();
    let mut node_adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(v, s) in &vs {
        by_node.insert(v, s);
    }
    for s in d.strands() {
        if let StrandKind::Open { start, end } = s.kind {
            node_adj.entry(start.node).or_default().push(end.node);
            node_adj.entry(end.node).or_default().push(start.node);
        }
    }
    let mut order = Vec::new();
    let mut placed = vec![false; nstrands];
    let mut seen: HashMap<usize, ()> = HashMap::new();
    for &(root, _) in &vs {
        if seen.contains_key(&root) {
            continue;
        }
        seen.insert(root, ());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for s in by_node[&v] {
                if !placed[s] {
                    placed[s] = true;
                    order.push(s);
                }
            }
            for &w in &node_adj[&v] {
                if seen.insert(w, ()).is_none() {
                    queue.push_back(w);
                }
            }
        }
    }
    for (s, done) in placed.iter().enumerate() {
        if !done {
            order.push(s);
        }
    }
    let pos: Vec<usize> = {
        let mut pos = vec![0; nstrands];
        for (k, &s) in order.iter().enumerate() {
            pos[s] = k;
        }
        pos
    };
    let mut checks = vec![Vec::new(); nstrands];
    for &(_, s) in &vs {
        let last = s.iter().map(|&x| pos[x]).max().unwrap();
        checks[last].push(s);
    }
    let side = p.color_max() as usize + 1;
    let admissible = (0..side * side)
        .map(|ab| {
            (0..side)
                .map(|c| p.admissible((ab / side) as Color, (ab % side) as Color, c as Color))
                .collect()
        })
        .collect();
    Colorings {
        max: p.color_max(),
        admissible,
        order,
        checks,
        colors: vec![0; nstrands],
        started: false,
        done: false,
    }
}

/// Product of vertex thetas for an admissible coloring.
fn theta_product(d: &DiagramCode, c: &Coloring, p: &QuantumParams) -> f64 {
    d.vertex_strands()
        .iter()
        .map(|(_, s)| {
            p.theta(c.0[s[0]], c.0[s[1]], c.0[s[2]])
                .expect("coloring is admissible")
        })
        .product()
}

/// `|<D>|^2 / prod_v theta(v)` for an admissible coloring.
pub fn yokota_value(d: &DiagramCode, c: &Coloring, p: &QuantumParams) -> Result<f64, EvalError> {
    if !c.is_admissible(d, p) {
        return Ok(0.0);
    }
    let b = bracket(d, c, p)?;
    Ok(b.norm_sqr() / theta_product(d, c, p))
}

/// Edge weight `prod Delta_c` over graph edges; circles carry no weight.
fn edge_weight(d: &DiagramCode, c: &Coloring, p: &QuantumParams) -> f64 {
    d.strands()
        .iter()
        .zip(&c.0)
        .filter(|(s, _)| matches!(s.kind, StrandKind::Open { .. }))
        .map(|(_, &col)| p.delta(col as i64))
        .product()
}

#[derive(Debug, Clone, Serialize)]
pub struct Term {
    pub coloring: Vec<Color>,
    pub weight: f64,
    pub yokota: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantReport {
    pub name: String,
    pub r: u32,
    pub value: f64,
    /// Largest imaginary part of any per-coloring Yokota term.
    pub imaginary_residue: f64,
    pub coloring_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<Term>>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// `<D>_H`: Delta-weighted sum of Yokota values over admissible colorings.
/// Terms are computed in parallel on the current rayon pool and summed in
/// enumeration order.
pub fn hk_invariant(d: &DiagramCode, p: &QuantumParams) -> Result<InvariantReport, EvalError> {
    hk_invariant_with(d, p, false)
}

pub fn hk_invariant_with(
    d: &DiagramCode,
    p: &QuantumParams,
    audit: bool,
) -> Result<InvariantReport, EvalError> {
    let start = Instant::now();
    let colorings: Vec<Coloring> = enumerate_colorings(d, p).collect();
    let results: Vec<Result<(Term, f64), EvalError>> = colorings
        .par_iter()
        .map(|c| {
            let b = bracket(d, c, p)?;
            let w = edge_weight(d, c, p);
            let tp = theta_product(d, c, p);
            let y = (b * b.conj()) / tp;
            Ok((
                Term {
                    coloring: c.0.clone(),
                    weight: w,
                    yokota: y.re,
                },
                y.im.abs(),
            ))
        })
        .collect();
    let mut acc = Neumaier::default();
    let mut residue: f64 = 0.0;
    let mut terms = Vec::with_capacity(if audit { results.len() } else { 0 });
    for r in results {
        let (t, im) = r?;
        acc.add_real(t.weight * t.yokota);
        residue = residue.max(im);
        if audit {
            terms.push(t);
        }
    }
    Ok(InvariantReport {
        name: d.display_name().to_string(),
        r: p.r(),
        value: acc.value().re,
        imaginary_residue: residue,
        coloring_count: colorings.len(),
        terms: audit.then_some(terms),
        elapsed: start.elapsed(),
    })
}

/// `r^2 / (4 sin^4(pi/r))`, the value on the trivial genus-2 handlebody-knot.
pub fn trivial_genus2_closed_form(p: &QuantumParams) -> f64 {
    let r = p.r() as f64;
    let s = (PI / r).sin();
    r * r / (4.0 * s.powi(4))
}

/// Inner factor of the `4_1` formula for a loop colored `i` on a bar
/// colored `k`: a sum over the channel fusing the loop with the bar.
fn four_one_half(p: &QuantumParams, i: Color, k: Color) -> Complex64 {
    let mut s = Neumaier::default();
    for l in p.colors().filter(|&l| p.admissible(i, k, l)) {
        let lam = p.lambda(i, k, l, TwistSense::Positive).unwrap();
        let tet = p.tet(i, k, l, k, i, k).unwrap();
        let th = p.theta(i, k, l).unwrap();
        s.add((lam * lam).inv() * (p.delta(l as i64) * tet / th));
    }
    s.value()
}

/// Summand of the closed `4_1` formula for loop colors `i`, `j` and bar
/// color `k`; zero unless `(i,i,k)`, `(j,j,k)` and `(k,k,k)` are admissible.
pub fn four_one_term(p: &QuantumParams, i: Color, j: Color, k: Color) -> f64 {
    if !(p.admissible(i, i, k) && p.admissible(j, j, k) && p.admissible(k, k, k)) {
        return 0.0;
    }
    let d = |n: Color| p.delta(n as i64);
    let th = |a, b, c| p.theta(a, b, c).unwrap();
    let inner = four_one_half(p, i, k) * four_one_half(p, j, k) / th(k, k, k);
    d(i) * d(j) * d(k) / (th(i, i, k) * th(j, j, k)) * inner.norm_sqr()
}

/// Closed double-sum formula for the handlebody-knot `4_1`.
pub fn four_one_closed_form(p: &QuantumParams) -> f64 {
    let mut outer = Neumaier::default();
    for k in p.colors() {
        for i in p.colors() {
            for j in p.colors() {
                outer.add_real(four_one_term(p, i, j, k));
            }
        }
    }
    outer.value().re
}

/// Extracts the part of `d` on `keep` nodes, removing vertex `cut` (if any)
/// and joining its two remaining legs.
fn sub_diagram(
    d: &DiagramCode,
    keep: &[bool],
    cut: Option<(usize, usize)>,
    circles: &[usize],
    suffix: &str,
) -> DiagramCode {
    let mut index = vec![usize::MAX; d.nodes.len()];
    let mut nodes = Vec::new();
    for (i, node) in d.nodes.iter().enumerate() {
        if keep[i] && cut.is_none_or(|(v, _)| v != i) {
            index[i] = nodes.len();
            nodes.push(node.clone());
        }
    }
    let mut far: HashMap<PortRef, PortRef> = HashMap::new();
    for seg in d.segments() {
        let [a, b] = seg.ends;
        far.insert(a, b);
        far.insert(b, a);
    }
    let mut conn = HashMap::new();
    let map = |p: PortRef| PortRef { node: index[p.node], slot: p.slot };
    for seg in d.segments() {
        let [a, b] = seg.ends;
        if index[a.node] != usize::MAX && index[b.node] != usize::MAX {
            conn.insert(map(a), map(b));
            conn.insert(map(b), map(a));
        }
    }
    let mut empty = circles
        .iter()
        .filter(|&&c| d.circles[c].word.is_empty())
        .count();
    if let Some((v, bridge_slot)) = cut {
        let legs: Vec<usize> = (0..3).filter(|&s| s != bridge_slot).collect();
        let pa = far[&PortRef { node: v, slot: legs[0] }];
        let pb = far[&PortRef { node: v, slot: legs[1] }];
        if pa.node == v {
            // The two legs form a loop at the removed vertex.
            empty += 1;
        } else {
            conn.insert(map(pa), map(pb));
            conn.insert(map(pb), map(pa));
        }
    }
    assemble(
        Meta {
            name: Some(format!("{}{suffix}", d.display_name())),
            genus_hint: None,
            framed: d.framed,
        },
        nodes,
        &conn,
        empty,
    )
    .expect("a separated part of a valid diagram is valid")
}

/// Splits `d` along a separating edge, or into disjoint pieces. Returns
/// `None` when neither exists.
pub fn split_reducible(d: &DiagramCode) -> Option<(DiagramCode, DiagramCode)> {
    let n = d.nodes.len();
    let mut uf = UnionFind::new(n);
    for seg in d.segments() {
        uf.union(seg.ends[0].node, seg.ends[1].node);
    }
    let roots: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let mut node_comps: Vec<usize> = Vec::new();
    for &r in &roots {
        if !node_comps.contains(&r) {
            node_comps.push(r);
        }
    }
    let home = |c: usize| d.circles[c].word.first().map(|s| roots[s.crossing]);
    let free: Vec<usize> = (0..d.circles.len()).filter(|&c| home(c).is_none()).collect();
    if node_comps.len() + free.len() >= 2 {
        let (keep, c1): (Vec<bool>, Vec<usize>) = match node_comps.first() {
            Some(&first) => (
                roots.iter().map(|&r| r == first).collect(),
                (0..d.circles.len()).filter(|&c| home(c) == Some(first)).collect(),
            ),
            None => (vec![false; n], vec![free[0]]),
        };
        let rest: Vec<bool> = keep.iter().map(|k| !k).collect();
        let c2: Vec<usize> = (0..d.circles.len()).filter(|c| !c1.contains(c)).collect();
        return Some((
            sub_diagram(d, &keep, None, &c1, "_a"),
            sub_diagram(d, &rest, None, &c2, "_b"),
        ));
    }

    // A graph edge without crossings whose removal disconnects the diagram.
    for strand in d.strands() {
        let StrandKind::Open { start, end } = strand.kind else { continue };
        if strand.segments.len() != 1 || start.node == end.node {
            continue;
        }
        let seg = strand.segments[0].0;
        let mut uf = UnionFind::new(n);
        for (k, s) in d.segments().iter().enumerate() {
            if k != seg {
                uf.union(s.ends[0].node, s.ends[1].node);
            }
        }
        if uf.find(start.node) == uf.find(end.node) {
            continue;
        }
        let side_a = uf.find(start.node);
        let keep: Vec<bool> = (0..n).map(|i| uf.find(i) == side_a).collect();
        let rest: Vec<bool> = keep.iter().map(|k| !k).collect();
        let c1: Vec<usize> = (0..d.circles.len())
            .filter(|&c| d.circles[c].word.first().is_some_and(|s| keep[s.crossing]))
            .collect();
        let c2: Vec<usize> = (0..d.circles.len()).filter(|c| !c1.contains(c)).collect();
        return Some((
            sub_diagram(d, &keep, Some((start.node, start.slot)), &c1, "_a"),
            sub_diagram(d, &rest, Some((end.node, end.slot)), &c2, "_b"),
        ));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::catalog;
    use std::collections::BTreeSet;

    fn q(r: u32) -> QuantumParams {
        QuantumParams::new(r).unwrap()
    }

    #[test]
    fn theta_colorings_at_r3() {
        let d = catalog::theta();
        let got: BTreeSet<Vec<Color>> = enumerate_colorings(&d, &q(3)).map(|c| c.0).collect();
        let want: BTreeSet<Vec<Color>> = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]
            .iter()
            .map(|c| c.to_vec())
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn coloring_counts() {
        for r in 3..=8 {
            assert_eq!(enumerate_colorings(&catalog::circle(), &q(r)).count(), r as usize - 1);
        }
        let cuffs: Vec<Coloring> = enumerate_colorings(&catalog::handcuffs(), &q(3)).collect();
        assert_eq!(cuffs.len(), 4);
    }

    #[test]
    fn enumeration_matches_filtering() {
        let d = catalog::tetrahedron();
        let p = q(5);
        let n = d.strands().len();
        let base = p.color_max() as usize + 1;
        let brute = (0..base.pow(n as u32))
            .map(|mut code| {
                Coloring(
                    (0..n)
                        .map(|_| {
                            let c = (code % base) as Color;
                            code /= base;
                            c
                        })
                        .collect(),
                )
            })
            .filter(|c| c.is_admissible(&d, &p))
            .count();
        assert_eq!(enumerate_colorings(&d, &p).count(), brute);
    }

    #[test]
    fn yokota_values() {
        let p = q(6);
        let theta = catalog::theta();
        for c in enumerate_colorings(&theta, &p) {
            assert!((yokota_value(&theta, &c, &p).unwrap() - 1.0).abs() < 1e-9);
        }
        let circle = catalog::circle();
        for n in p.colors() {
            let y = yokota_value(&circle, &Coloring(vec![n]), &p).unwrap();
            assert!((y - p.delta(n as i64).powi(2)).abs() < 1e-9);
        }
        let d = catalog::four_one();
        let m = d.mirror();
        for c in enumerate_colorings(&d, &p) {
            let (a, b) = (yokota_value(&d, &c, &p).unwrap(), yokota_value(&m, &c, &p).unwrap());
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn closed_forms() {
        for (r, v) in [(3, 4.0), (6, 144.0), (7, 345.654799)] {
            assert!((trivial_genus2_closed_form(&q(r)) - v).abs() < 1e-6);
        }
        for r in 3..=12 {
            let p = q(r);
            let n = p.n_value();
            assert!((trivial_genus2_closed_form(&p) - n * n).abs() < 1e-9 * n * n);
        }
        for (r, v) in [(5, 84.721359), (6, 216.0)] {
            assert!((four_one_closed_form(&q(r)) - v).abs() < 1e-6);
        }
    }

    #[test]
    fn worked_examples() {
        let v = hk_invariant(&catalog::theta(), &q(5)).unwrap().value;
        assert!((v - 52.360679).abs() < 1e-6);
        let v = hk_invariant(&catalog::circle(), &q(3)).unwrap().value;
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn four_one_terms_match_diagram() {
        let d = catalog::four_one();
        let vs = d.vertex_strands();
        let loop_of = |v: usize| {
            let s = vs[v].1;
            if s[0] == s[1] || s[0] == s[2] { s[0] } else { s[1] }
        };
        let (li, lj) = (loop_of(0), loop_of(1));
        let bar = (0..3).find(|&s| s != li && s != lj).unwrap();
        for r in [5, 7] {
            let p = q(r);
            for c in enumerate_colorings(&d, &p) {
                let (i, j, k) = (c.0[li], c.0[lj], c.0[bar]);
                let term = edge_weight(&d, &c, &p) * yokota_value(&d, &c, &p).unwrap();
                let want = four_one_term(&p, i, j, k);
                assert!((term - want).abs() < 1e-9 * want.abs().max(1.0), "{i} {j} {k}");
            }
            let c = Coloring(
                (0..3)
                    .map(|s| if s == bar { 0 } else { 1 })
                    .collect(),
            );
            let term = edge_weight(&d, &c, &p) * yokota_value(&d, &c, &p).unwrap();
            assert!(term > 0.0);
            assert!((term - four_one_term(&p, 1, 1, 0)).abs() < 1e-9);
        }
    }

    #[test]
    fn four_one_closed_form_agrees_with_diagram() {
        for r in 3..=8 {
            let p = q(r);
            let v = hk_invariant(&catalog::four_one(), &p).unwrap().value;
            assert!((v - four_one_closed_form(&p)).abs() < 1e-9 * v.max(1.0));
        }
    }

    #[test]
    fn splitting() {
        assert!(split_reducible(&catalog::theta()).is_none());
        let (a, b) = split_reducible(&catalog::handcuffs()).unwrap();
        assert_eq!((a.genus_and_components(), b.genus_and_components()), ((1, 1), (1, 1)));
        for r in 3..=8 {
            let p = q(r);
            let n = p.n_value();
            let whole = hk_invariant(&catalog::handcuffs(), &p).unwrap().value;
            let parts = hk_invariant(&a, &p).unwrap().value * hk_invariant(&b, &p).unwrap().value;
            assert!((whole - parts).abs() < 1e-9 * whole);
            assert!((parts - n * n).abs() < 1e-9 * whole);
        }
        let two = catalog::unlink(2);
        let (a, b) = split_reducible(&two).unwrap();
        assert_eq!((a.circles.len(), b.circles.len()), (1, 1));
    }

    #[test]
    fn report_audit_terms() {
        let p = q(5);
        let rep = hk_invariant_with(&catalog::handcuffs(), &p, true).unwrap();
        let terms = rep.terms.as_ref().unwrap();
        assert_eq!(terms.len(), rep.coloring_count);
        let s: f64 = terms.iter().map(|t| t.weight * t.yokota).sum();
        assert!((s - rep.value).abs() < 1e-9 * rep.value);
        assert!(rep.imaginary_residue < 1e-9);
    }
}
