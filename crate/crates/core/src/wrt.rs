//! Witten-Reshetikhin-Turaev invariants of framed-link surgery diagrams.

use num_complex::Complex64;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diagram::{DiagramCode, Orientation, StrandKind};
use crate::evaluator::{bracket, Coloring, EvalError};
use crate::invariants::hk_invariant;
use crate::skein::{Color, QuantumParams};
use crate::sum::Neumaier;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkError {
    #[error("diagram `{0}` has trivalent vertices or graph edges; a framed link may only contain circles")]
    NotALink(String),
}

/// Framed link in blackboard framing: circles and crossings only.
#[derive(Debug, Clone)]
pub struct FramedLink {
    diagram: DiagramCode,
}

impl FramedLink {
    pub fn new(d: DiagramCode) -> Result<Self, LinkError> {
        if !d.is_link() {
            return Err(LinkError::NotALink(d.display_name().to_string()));
        }
        Ok(FramedLink { diagram: d })
    }

    pub fn diagram(&self) -> &DiagramCode {
        &self.diagram
    }

    pub fn component_count(&self) -> usize {
        self.diagram.circles.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkingData {
    pub matrix: Vec<Vec<i64>>,
    pub signature: i64,
    pub components: usize,
}

/// Linking matrix (writhes on the diagonal) and its signature.
pub fn linking_data(l: &FramedLink) -> LinkingData {
    let d = &l.diagram;
    let t = d.circles.len();
    // For each crossing: (component, outgoing slot) of the over and under passes.
    let mut passes: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); d.nodes.len()];
    for (ci, c) in d.circles.iter().enumerate() {
        for step in &c.word {
            let out = match d.orientations[ci] {
                Orientation::Forward => step.slot_out,
                Orientation::Reversed => step.slot_in,
            };
            passes[step.crossing].push((ci, out, step.slot_in % 2));
        }
    }
    let mut twice = vec![vec![0i64; t]; t];
    for p in passes.iter().filter(|p| p.len() == 2) {
        let over = p.iter().find(|x| x.2 == 0).expect("over pass");
        let under = p.iter().find(|x| x.2 == 1).expect("under pass");
        let sign = if under.1 == (over.1 + 1) % 4 { 1 } else { -1 };
        if over.0 == under.0 {
            twice[over.0][over.0] += 2 * sign;
        } else {
            twice[over.0][under.0] += sign;
            twice[under.0][over.0] += sign;
        }
    }
    let matrix: Vec<Vec<i64>> = twice
        .iter()
        .map(|row| row.iter().map(|&x| x / 2).collect())
        .collect();
    LinkingData {
        signature: signature(&matrix),
        matrix,
        components: t,
    }
}

/// Signature of a symmetric integer matrix by exact congruence
/// diagonalization over the rationals.
pub fn signature(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<Rational64>> = m
        .iter()
        .map(|row| row.iter().map(|&x| Rational64::from_integer(x)).collect())
        .collect();
    let zero = Rational64::from_integer(0);
    let mut sig = 0;
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| a[i][i] != zero);
        let k = match pivot {
            Some(k) => k,
            None => {
                // Zero diagonal: fold a partner row into one with a nonzero
                // off-diagonal entry, or stop if the block vanishes.
                let pair = active
                    .iter()
                    .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && a[i][j] != zero);
                let Some((i, j)) = pair else { break };
                for c in 0..n {
                    let v = a[j][c];
                    a[i][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j];
                    a[r][i] += v;
                }
                i
            }
        };
        let pv = a[k][k];
        sig += if pv > zero { 1 } else { -1 };
        active.retain(|&x| x != k);
        for &i in &active {
            let f = a[i][k] / pv;
            if f == zero {
                continue;
            }
            for c in 0..n {
                let v = a[k][c];
                a[i][c] -= f * v;
            }
            for r in 0..n {
                let v = a[r][k];
                a[r][i] -= f * v;
            }
        }
    }
    sig
}

/// `<Omega L>`: every component colored by `sum_n Delta_n n`.
pub fn omega_bracket(l: &FramedLink, p: &QuantumParams) -> Result<Complex64, EvalError> {
    let d = &l.diagram;
    let t = d.strands().len();
    debug_assert!(d.strands().iter().all(|s| matches!(s.kind, StrandKind::Circle(_))));
    let base = p.color_max() as usize + 1;
    let total = base.pow(t as u32);
    let terms: Vec<Result<Complex64, EvalError>> = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut colors = Vec::with_capacity(t);
            for _ in 0..t {
                colors.push((code % base) as Color);
                code /= base;
            }
            let weight: f64 = colors.iter().map(|&c| p.delta(c as i64)).product();
            Ok(bracket(d, &Coloring(colors), p)? * weight)
        })
        .collect();
    let mut acc = Neumaier::default();
    for t in terms {
        acc.add(t?);
    }
    Ok(acc.value())
}

/// `Z = N^{-(t+1)/2} kappa^{-sigma} <Omega L>`.
pub fn z_wrt(l: &FramedLink, p: &QuantumParams) -> Result<Complex64, EvalError> {
    let ld = linking_data(l);
    let n = p.n_value();
    let scale = n.powf(-(ld.components as f64 + 1.0) / 2.0);
    let phase = p.kappa().powi(-ld.signature as i32);
    Ok(omega_bracket(l, p)? * phase * scale)
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem3Report {
    pub r: u32,
    pub genus: u32,
    pub components: u32,
    pub hk: f64,
    /// `N^{(g-l)/2+1} Z` of the supplied double.
    pub scaled_wrt: Complex64,
    pub difference: f64,
    pub pass: bool,
}

/// Compares `<J>_H` with `N^{(g-l)/2+1} Z_WRT` of a framed link supplied
/// for the double of the exterior of `J`.
pub fn theorem3_check(
    d: &DiagramCode,
    double: &FramedLink,
    p: &QuantumParams,
) -> Result<Theorem3Report, EvalError> {
    let (g, l) = d.genus_and_components();
    let hk = hk_invariant(d, p)?.value;
    let exponent = (g as f64 - l as f64) / 2.0 + 1.0;
    let scaled = z_wrt(double, p)? * p.n_value().powf(exponent);
    let difference = (scaled - hk).norm();
    Ok(Theorem3Report {
        r: p.r(),
        genus: g,
        components: l,
        hk,
        scaled_wrt: scaled,
        difference,
        pass: difference < 1e-6 * hk.abs().max(1.0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KirbyReport {
    pub r: u32,
    pub before: Complex64,
    pub after: Complex64,
    pub difference: f64,
    pub pass: bool,
}

pub fn kirby_move_pair_check(
    l1: &FramedLink,
    l2: &FramedLink,
    p: &QuantumParams,
) -> Result<KirbyReport, EvalError> {
    let before = z_wrt(l1, p)?;
    let after = z_wrt(l2, p)?;
    let difference = (before - after).norm();
    Ok(KirbyReport {
        r: p.r(),
        before,
        after,
        difference,
        pass: difference < 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&[]), 0);
        assert_eq!(signature(&[vec![0]]), 0);
        assert_eq!(signature(&[vec![1]]), 1);
        assert_eq!(signature(&[vec![-3]]), -1);
        assert_eq!(signature(&[vec![0, 1], vec![1, 0]]), 0);
        assert_eq!(signature(&[vec![2, 1], vec![1, 2]]), 2);
        assert_eq!(signature(&[vec![1, 2], vec![2, 1]]), 0);
        assert_eq!(
            signature(&[vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 0]]),
            0
        );
        assert_eq!(
            signature(&[vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -2]]),
            -3
        );
    }

    use crate::diagram::{catalog, Orientation};
    use std::collections::HashMap;

    fn q(r: u32) -> QuantumParams {
        QuantumParams::new(r).unwrap()
    }

    fn link(d: DiagramCode) -> FramedLink {
        FramedLink::new(d).unwrap()
    }

    #[test]
    fn linking_matrices() {
        let ld = linking_data(&link(catalog::unlink(1)));
        assert_eq!((ld.matrix, ld.signature), (vec![vec![0]], 0));
        let ld = linking_data(&link(catalog::framed_unknot(1)));
        assert_eq!((ld.matrix, ld.signature), (vec![vec![1]], 1));
        let ld = linking_data(&link(catalog::framed_unknot(-1)));
        assert_eq!((ld.matrix, ld.signature), (vec![vec![-1]], -1));
        let ld = linking_data(&link(catalog::hopf(0)));
        assert_eq!(ld.matrix[0][0], 0);
        assert_eq!(ld.matrix[0][1].abs(), 1);
        assert_eq!(ld.signature, 0);
    }

    #[test]
    fn graphs_are_not_links() {
        assert!(FramedLink::new(catalog::theta()).is_err());
    }

    #[test]
    fn omega_values() {
        for r in 3..=10 {
            let p = q(r);
            let n = p.n_value();
            let z = omega_bracket(&link(catalog::unlink(1)), &p).unwrap();
            assert!((z - n).norm() < 1e-9 * n);
            let z = omega_bracket(&link(catalog::framed_unknot(1)), &p).unwrap();
            assert!((z - p.kappa() * n.sqrt()).norm() < 1e-9 * n);
        }
    }

    #[test]
    fn omega_circle_kills_encircled_colors() {
        let d = catalog::hopf(0);
        for r in 3..=8 {
            let p = q(r);
            for m in p.colors() {
                let mut acc = Neumaier::default();
                for k in p.colors() {
                    acc.add(bracket(&d, &Coloring(vec![k, m]), &p).unwrap() * p.delta(k as i64));
                }
                let want = if m == 0 { p.n_value() } else { 0.0 };
                assert!((acc.value() - want).norm() < 1e-9 * p.n_value(), "r={r} m={m}");
            }
        }
    }

    #[test]
    fn unlinks() {
        for r in 3..=10 {
            let p = q(r);
            let n = p.n_value();
            let z = z_wrt(&link(catalog::empty_link()), &p).unwrap();
            assert!((z - n.powf(-0.5)).norm() < 1e-9);
            for g in 1..=3 {
                let z = z_wrt(&link(catalog::unlink(g)), &p).unwrap();
                let want = n.powf((g as f64 - 1.0) / 2.0);
                assert!((z - want).norm() < 1e-9 * want);
            }
        }
    }

    #[test]
    fn orientation_does_not_matter() {
        let d = catalog::hopf(2);
        let mut raw = d.to_raw();
        raw.orientations = HashMap::from([(d.circles[0].id.clone(), Orientation::Reversed)]);
        let flipped = raw.validate().unwrap();
        let (a, b) = (link(d), link(flipped));
        assert_eq!(linking_data(&a).signature, linking_data(&b).signature);
        for r in 3..=7 {
            let p = q(r);
            assert!((z_wrt(&a, &p).unwrap() - z_wrt(&b, &p).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn kirby_moves() {
        for m in catalog::kirby_pairs() {
            let top = if m.name == "KII" { 8 } else { 12 };
            for r in 3..=top {
                let rep = kirby_move_pair_check(&link(m.before.clone()), &link(m.after.clone()), &q(r))
                    .unwrap();
                assert!(rep.pass, "{} r={r}: {}", m.name, rep.difference);
            }
        }
    }

    #[test]
    fn trivial_doubles() {
        for (d, double) in catalog::double_cases() {
            let l = link(double);
            for r in 3..=10 {
                let rep = theorem3_check(&d, &l, &q(r)).unwrap();
                assert!(rep.pass, "{} r={r}", d.display_name());
            }
        }
    }
}
