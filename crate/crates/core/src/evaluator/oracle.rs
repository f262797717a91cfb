//! Brute-force bracket: cable every strand, expand Jones-Wenzl projectors
//! into Temperley-Lieb diagrams, smooth every elementary crossing and count
//! loops. Exponential, and only meant to cross-check the recoupling path.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_complex::Complex64;

use super::{Coloring, EvalError};
use crate::diagram::{DiagramCode, NodeKind, StrandKind};
use crate::skein::QuantumParams;

pub const MAX_JW: u32 = 5;
pub const MAX_CABLED_STRANDS: u32 = 24;

/// A planar matching of `2n` points: bottom `0..n` then top `n..2n`, each
/// row read left to right. Entry `i` is the partner of point `i`.
pub type Matching = Vec<u8>;

/// Formal linear combination of Temperley-Lieb diagrams on `n` strands.
#[derive(Debug, Clone, PartialEq)]
pub struct TlSum {
    pub n: usize,
    pub terms: BTreeMap<Matching, Complex64>,
}

fn identity(n: usize) -> Matching {
    (0..2 * n).map(|i| ((i + n) % (2 * n)) as u8).collect()
}

/// Generator `e_i` (1-based): cup and cap joining strands `i-1` and `i`.
fn generator(n: usize, i: usize) -> Matching {
    let mut m = identity(n);
    let (a, b) = (i - 1, i);
    m[a] = b as u8;
    m[b] = a as u8;
    m[n + a] = (n + b) as u8;
    m[n + b] = (n + a) as u8;
    m
}

/// Stacks `upper` on top of `lower`; returns the product and the number of
/// closed loops formed in the middle.
fn compose(lower: &Matching, upper: &Matching, n: usize) -> (Matching, usize) {
    let mut out = vec![0u8; 2 * n];
    let mut middle_seen = vec![false; n];
    // Endpoints: lower bottom `i` is point `i`, upper top `j` is `n + j`.
    for start in 0..2 * n {
        let (mut in_lower, mut at) = if start < n { (true, start) } else { (false, start) };
        let end = loop {
            if in_lower {
                let q = lower[at] as usize;
                if q < n {
                    break q;
                }
                middle_seen[q - n] = true;
                in_lower = false;
                at = q - n;
            } else {
                let q = upper[at] as usize;
                if q >= n {
                    break q;
                }
                middle_seen[q] = true;
                in_lower = true;
                at = q + n;
            }
        };
        out[start] = end as u8;
    }
    let mut loops = 0;
    for m in 0..n {
        if middle_seen[m] {
            continue;
        }
        loops += 1;
        let mut at = m;
        loop {
            middle_seen[at] = true;
            let q = upper[at] as usize;
            middle_seen[q] = true;
            at = lower[q + n] as usize - n;
            if at == m {
                break;
            }
        }
    }
    (out, loops)
}

impl TlSum {
    pub fn from_matching(n: usize, m: Matching) -> Self {
        TlSum {
            n,
            terms: BTreeMap::from([(m, Complex64::new(1.0, 0.0))]),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_matching(n, identity(n))
    }

    fn add_term(&mut self, m: Matching, c: Complex64) {
        *self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TlSum {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &TlSum) -> Self {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), *v);
        }
        out
    }

    /// `self` below, `upper` stacked on top; loops evaluate to `delta`.
    pub fn then(&self, upper: &TlSum, delta: f64) -> Self {
        let mut out = TlSum {
            n: self.n,
            terms: BTreeMap::new(),
        };
        for (a, ca) in &self.terms {
            for (b, cb) in &upper.terms {
                let (m, loops) = compose(a, b, self.n);
                out.add_term(m, ca * cb * delta.powi(loops as i32));
            }
        }
        out
    }

    /// Adds one straight strand on the right.
    pub fn extend(&self) -> Self {
        let n = self.n;
        let remap = |i: u8| {
            let i = i as usize;
            (if i < n { i } else { i + 1 }) as u8
        };
        let mut out = TlSum {
            n: n + 1,
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut w = vec![0u8; 2 * n + 2];
            for (i, &q) in m.iter().enumerate() {
                w[remap(i as u8) as usize] = remap(q);
            }
            w[n] = (2 * n + 1) as u8;
            w[2 * n + 1] = n as u8;
            out.add_term(w, *c);
        }
        out
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn distance(&self, other: &TlSum) -> f64 {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Jones-Wenzl projector on `n` strands expanded over planar matchings.
pub fn jw_expand(n: u32, p: &QuantumParams) -> Result<TlSum, EvalError> {
    if n > MAX_JW || n > p.color_max() {
        return Err(EvalError::OracleScale(format!(
            "Jones-Wenzl projector on {n} strands at r = {}",
            p.r()
        )));
    }
    let delta = p.delta(1);
    let mut jw = TlSum::identity(0);
    for k in 1..=n as usize {
        let ext = jw.extend();
        if k == 1 {
            jw = ext;
            continue;
        }
        let ratio = p.delta(k as i64 - 2) / p.delta(k as i64 - 1);
        let e = TlSum::from_matching(k, generator(k, k - 1));
        let sandwich = ext.then(&e, delta).then(&ext, delta);
        jw = ext.add(&sandwich.scale(Complex64::new(-ratio, 0.0)));
    }
    Ok(jw)
}

struct Piece {
    options: Vec<(Complex64, Vec<(u32, u32)>)>,
}

#[derive(Default)]
struct Points {
    ids: HashMap<(usize, usize, usize), u32>,
    next: u32,
}

impl Points {
    fn port(&mut self, node: usize, slot: usize, t: u32) -> u32 {
        let next = &mut self.next;
        *self.ids.entry((node, slot, t as usize)).or_insert_with(|| {
            *next += 1;
            *next - 1
        })
    }

    fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next - 1
    }
}

/// Joins path ends according to `arcs`; returns the number of loops closed.
fn apply_arcs(state: &mut HashMap<u32, u32>, arcs: &[(u32, u32)]) -> usize {
    let mut loops = 0;
    for &(x, y) in arcs {
        let xo = state.remove(&x);
        if let Some(px) = xo {
            state.remove(&px);
        }
        if xo == Some(y) {
            loops += 1;
            continue;
        }
        let yo = state.remove(&y);
        if let Some(py) = yo {
            state.remove(&py);
        }
        let (ex, ey) = (xo.unwrap_or(x), yo.unwrap_or(y));
        state.insert(ex, ey);
        state.insert(ey, ex);
    }
    loops
}

/// Bracket by exhaustive Temperley-Lieb expansion. Strand colors must be
/// at most 5 and the cabled diagram must have at most 24 strands.
pub fn brute_bracket(d: &DiagramCode, c: &Coloring, p: &QuantumParams) -> Result<Complex64, EvalError> {
    if !c.is_admissible(d, p) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let seg_color = |s: usize| c.0[d.segment_strand(s)];
    let mut cabled: u32 = (0..d.segments().len()).map(seg_color).sum();
    for (si, s) in d.strands().iter().enumerate() {
        if let StrandKind::Circle(ci) = s.kind {
            if d.circles[ci].word.is_empty() {
                cabled += c.0[si];
            }
        }
    }
    if cabled > MAX_CABLED_STRANDS {
        return Err(EvalError::OracleScale(format!("{cabled} cabled strands")));
    }
    let delta = p.delta(1);
    let mut jw_cache: HashMap<u32, TlSum> = HashMap::new();
    let mut jw = |n: u32| -> Result<TlSum, EvalError> {
        if let Some(t) = jw_cache.get(&n) {
            return Ok(t.clone());
        }
        let t = jw_expand(n, p)?;
        jw_cache.insert(n, t.clone());
        Ok(t)
    };

    let mut scalar = Complex64::new(1.0, 0.0);
    for (si, s) in d.strands().iter().enumerate() {
        if let StrandKind::Circle(ci) = s.kind {
            if d.circles[ci].word.is_empty() {
                scalar *= trace(&jw(c.0[si])?, delta);
            }
        }
    }

    // Visit nodes breadth-first so pieces sharing points stay close.
    let n = d.nodes.len();
    let mut adj = vec![Vec::new(); n];
    for (si, seg) in d.segments().iter().enumerate() {
        adj[seg.ends[0].node].push(si);
        adj[seg.ends[1].node].push(si);
    }
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &si in &adj[v] {
                for end in d.segments()[si].ends {
                    if !seen[end.node] {
                        seen[end.node] = true;
                        queue.push_back(end.node);
                    }
                }
            }
        }
    }

    let mut pts = Points::default();
    let mut pieces = Vec::new();
    let mut seg_done = vec![false; d.segments().len()];
    let one = Complex64::new(1.0, 0.0);
    for &v in &order {
        let node = &d.nodes[v];
        let port_color = |slot: usize| seg_color(d.dart_at(crate::diagram::PortRef { node: v, slot }).segment);
        match node.kind {
            NodeKind::Vertex3 => {
                let cs = [port_color(0), port_color(1), port_color(2)];
                let mut arcs = Vec::new();
                for s in 0..3 {
                    let (c0, c1, c2) = (cs[s], cs[(s + 1) % 3], cs[(s + 2) % 3]);
                    for t in 0..(c0 + c1 - c2) / 2 {
                        arcs.push((pts.port(v, s, c0 - 1 - t), pts.port(v, (s + 1) % 3, t)));
                    }
                }
                pieces.push(Piece { options: vec![(one, arcs)] });
            }
            NodeKind::Crossing => {
                let (a, b) = (port_color(0), port_color(1));
                if b == 0 || a == 0 {
                    let (s0, s1, w) = if b == 0 { (0, 2, a) } else { (1, 3, b) };
                    let arcs = (0..w).map(|t| (pts.port(v, s0, t), pts.port(v, s1, w - 1 - t))).collect();
                    pieces.push(Piece { options: vec![(one, arcs)] });
                } else {
                    let mut h = vec![vec![0u32; b as usize + 1]; a as usize];
                    for t in 0..a {
                        h[t as usize][0] = pts.port(v, 0, t);
                        h[t as usize][b as usize] = pts.port(v, 2, a - 1 - t);
                        for j in 1..b as usize {
                            h[t as usize][j] = pts.fresh();
                        }
                    }
                    let mut vv = vec![vec![0u32; a as usize + 1]; b as usize];
                    for s in 0..b {
                        vv[s as usize][0] = pts.port(v, 1, s);
                        vv[s as usize][a as usize] = pts.port(v, 3, b - 1 - s);
                        for i in 1..a as usize {
                            vv[s as usize][i] = pts.fresh();
                        }
                    }
                    let (pa, pai) = (p.a(), p.a().inv());
                    for t in (0..a as usize).rev() {
                        for s in 0..b as usize {
                            let east = h[t][s];
                            let west = h[t][s + 1];
                            let north = vv[s][a as usize - 1 - t];
                            let south = vv[s][a as usize - t];
                            pieces.push(Piece {
                                options: vec![
                                    (pa, vec![(north, west), (south, east)]),
                                    (pai, vec![(east, north), (west, south)]),
                                ],
                            });
                        }
                    }
                }
            }
        }
        for &si in &adj[v] {
            if seg_done[si] {
                continue;
            }
            seg_done[si] = true;
            let col = seg_color(si);
            if col == 0 {
                continue;
            }
            let [e0, e1] = d.segments()[si].ends;
            let bottom: Vec<u32> = (0..col).map(|t| pts.port(e0.node, e0.slot, t)).collect();
            let top: Vec<u32> = (0..col).map(|t| pts.port(e1.node, e1.slot, col - 1 - t)).collect();
            let local = |i: usize| if i < col as usize { bottom[i] } else { top[i - col as usize] };
            let options = jw(col)?
                .terms
                .iter()
                .map(|(m, coef)| {
                    let arcs = m
                        .iter()
                        .enumerate()
                        .filter(|&(i, &q)| i < q as usize)
                        .map(|(i, &q)| (local(i), local(q as usize)))
                        .collect();
                    (*coef, arcs)
                })
                .collect();
            pieces.push(Piece { options });
        }
    }

    let mut states: HashMap<Vec<(u32, u32)>, Complex64> = HashMap::from([(Vec::new(), scalar)]);
    for piece in &pieces {
        let mut next: HashMap<Vec<(u32, u32)>, Complex64> = HashMap::new();
        for (key, coef) in &states {
            for (w, arcs) in &piece.options {
                let mut state: HashMap<u32, u32> = HashMap::with_capacity(2 * key.len() + 8);
                for &(x, y) in key {
                    state.insert(x, y);
                    state.insert(y, x);
                }
                let loops = apply_arcs(&mut state, arcs);
                let mut k: Vec<(u32, u32)> = state.into_iter().filter(|(x, y)| x < y).collect();
                k.sort_unstable();
                *next.entry(k).or_insert(Complex64::new(0.0, 0.0)) += coef * w * delta.powi(loops as i32);
            }
        }
        states = next;
    }
    Ok(states.get(&Vec::new()).copied().unwrap_or(Complex64::new(0.0, 0.0)))
}

/// Closure of a Temperley-Lieb element: bottom `i` joined to top `i`.
fn trace(t: &TlSum, delta: f64) -> Complex64 {
    let n = t.n;
    t.terms
        .iter()
        .map(|(m, c)| {
            let mut seen = vec![false; 2 * n];
            let mut loops = 0;
            for s in 0..2 * n {
                if seen[s] {
                    continue;
                }
                loops += 1;
                let mut at = s;
                loop {
                    seen[at] = true;
                    let q = m[at] as usize;
                    seen[q] = true;
                    at = if q < n { q + n } else { q - n };
                    if at == s {
                        break;
                    }
                }
            }
            c * delta.powi(loops)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jw_small_cases() {
        let p = QuantumParams::new(5).unwrap();
        let j0 = jw_expand(0, &p).unwrap();
        assert_eq!(j0.terms.len(), 1);
        assert!(j0.terms.keys().next().unwrap().is_empty());
        let j1 = jw_expand(1, &p).unwrap();
        assert_eq!(j1, TlSum::identity(1));
        let j2 = jw_expand(2, &p).unwrap();
        let cupcap = generator(2, 1);
        let coef = j2.terms[&cupcap].re;
        assert!((coef - 1.0 / 1.618033988749895).abs() < 1e-9);
        assert!((j2.terms[&identity(2)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jw_is_idempotent_and_kills_turnbacks() {
        let p = QuantumParams::new(8).unwrap();
        let delta = p.delta(1);
        for n in 1..=5 {
            let j = jw_expand(n, &p).unwrap();
            assert!(j.then(&j, delta).distance(&j) < 1e-9, "n = {n}");
            for i in 1..n as usize {
                let e = TlSum::from_matching(n as usize, generator(n as usize, i));
                assert!(j.then(&e, delta).terms.values().all(|c| c.norm() < 1e-9));
            }
        }
    }

    #[test]
    fn jw_trace_is_loop_value() {
        for r in 4..9 {
            let p = QuantumParams::new(r).unwrap();
            for n in 0..=5.min(r - 2) {
                let t = trace(&jw_expand(n, &p).unwrap(), p.delta(1));
                assert!((t.re - p.delta(n as i64)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_large_projectors() {
        let p = QuantumParams::new(10).unwrap();
        assert!(matches!(jw_expand(6, &p), Err(EvalError::OracleScale(_))));
    }
}
