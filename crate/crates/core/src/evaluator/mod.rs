//! Colored Kauffman brackets: recoupling evaluation and a brute-force
//! Temperley-Lieb oracle.

mod net;
mod oracle;

use num_complex::Complex64;
use thiserror::Error;

pub use net::{reduce_planar, Net, PlanarNet};
pub use oracle::{brute_bracket, jw_expand, Matching, TlSum};

use crate::diagram::DiagramCode;
use crate::skein::{Color, QuantumParams, SkeinError};

/// One color per strand, in the order of [`DiagramCode::strands`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring(pub Vec<Color>);

impl Coloring {
    /// Colors by strand name; unnamed strands get 0.
    pub fn by_name(d: &DiagramCode, pairs: &[(&str, Color)]) -> Option<Coloring> {
        let mut c = vec![0; d.strands().len()];
        for &(name, color) in pairs {
            c[d.strand_by_name(name)?] = color;
        }
        Some(Coloring(c))
    }

    /// Every strand gets the same color.
    pub fn uniform(d: &DiagramCode, color: Color) -> Coloring {
        Coloring(vec![color; d.strands().len()])
    }

    pub fn is_admissible(&self, d: &DiagramCode, p: &QuantumParams) -> bool {
        self.0.len() == d.strands().len()
            && self.0.iter().all(|&c| c <= p.color_max())
            && d
                .vertex_strands()
                .iter()
                .all(|(_, s)| p.admissible(self.0[s[0]], self.0[s[1]], self.0[s[2]]))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("reduction made no progress within its move budget")]
    NoProgress,
    #[error("net still contains crossings")]
    NotPlanar,
    #[error("oracle limit exceeded: {0}")]
    OracleScale(String),
    #[error(transparent)]
    Skein(#[from] SkeinError),
}

/// Kauffman bracket of `d` colored by `c`. Inadmissible colorings give 0.
pub fn bracket(d: &DiagramCode, c: &Coloring, p: &QuantumParams) -> Result<Complex64, EvalError> {
    match Net::from_diagram(d, c, p) {
        Some(net) => net.value(p),
        None => Ok(Complex64::new(0.0, 0.0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Builder, Cross};
    use crate::skein::TwistSense;

    fn circle() -> DiagramCode {
        Builder::new("circle").cap(0).cup(0).finish().unwrap()
    }

    fn theta() -> DiagramCode {
        Builder::new("theta").cap(0).split(0).merge(0).cup(0).finish().unwrap()
    }

    fn tetrahedron() -> DiagramCode {
        Builder::new("tet")
            .cap(0)
            .split(0)
            .split(1)
            .merge(0)
            .merge(1)
            .cup(0)
            .finish()
            .unwrap()
    }

    fn kink(kind: Cross) -> DiagramCode {
        Builder::new("kink")
            .cap(0)
            .cap(1)
            .cross(0, kind)
            .cup(1)
            .cup(0)
            .finish()
            .unwrap()
    }

    fn hopf(a: Cross, b: Cross) -> DiagramCode {
        Builder::new("hopf")
            .cap(0)
            .cap(2)
            .cross(1, a)
            .cross(1, b)
            .cup(2)
            .cup(0)
            .finish()
            .unwrap()
    }

    /// Theta curve with two of its edges twisted around each other.
    fn twisted_theta(a: Cross, b: Cross) -> DiagramCode {
        Builder::new("twisted")
            .cap(0)
            .split(0)
            .cross(0, a)
            .cross(0, b)
            .merge(0)
            .cup(0)
            .finish()
            .unwrap()
    }

    fn colorings(d: &DiagramCode, p: &QuantumParams, max: u32) -> Vec<Coloring> {
        let n = d.strands().len();
        let top = max.min(p.color_max());
        let mut out = Vec::new();
        let mut c = vec![0; n];
        loop {
            let col = Coloring(c.clone());
            if col.is_admissible(d, p) {
                out.push(col);
            }
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                if c[i] < top {
                    c[i] += 1;
                    break;
                }
                c[i] = 0;
                i += 1;
            }
        }
    }

    fn corpus() -> Vec<DiagramCode> {
        vec![
            circle(),
            theta(),
            tetrahedron(),
            kink(Cross::Pos),
            kink(Cross::Neg),
            hopf(Cross::Pos, Cross::Pos),
            hopf(Cross::Neg, Cross::Neg),
            hopf(Cross::Pos, Cross::Neg),
            twisted_theta(Cross::Pos, Cross::Pos),
            twisted_theta(Cross::Neg, Cross::Pos),
        ]
    }

    #[test]
    fn recoupling_matches_oracle() {
        for r in 4..=6 {
            let p = QuantumParams::new(r).unwrap();
            for d in corpus() {
                for c in colorings(&d, &p, 3) {
                    let fast = bracket(&d, &c, &p).unwrap();
                    let slow = brute_bracket(&d, &c, &p).unwrap();
                    assert!(
                        (fast - slow).norm() < 1e-9,
                        "{} r={r} {:?}: {fast} vs {slow}",
                        d.display_name(),
                        c.0
                    );
                }
            }
        }
    }

    #[test]
    fn base_networks() {
        let p = QuantumParams::new(7).unwrap();
        for n in p.colors() {
            let v = bracket(&circle(), &Coloring(vec![n]), &p).unwrap();
            assert!((v.re - p.delta(n as i64)).abs() < 1e-12);
        }
        let d = theta();
        for c in colorings(&d, &p, 5) {
            let v = bracket(&d, &c, &p).unwrap();
            assert!((v.re - p.theta(c.0[0], c.0[1], c.0[2]).unwrap()).abs() < 1e-9);
        }
        let d = tetrahedron();
        let c = Coloring::uniform(&d, 2);
        let v = bracket(&d, &c, &p).unwrap();
        assert!((v.re - p.tet(2, 2, 2, 2, 2, 2).unwrap()).abs() < 1e-9);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn curl_phase() {
        for r in 3..=9 {
            let p = QuantumParams::new(r).unwrap();
            for n in p.colors() {
                let c = Coloring(vec![n]);
                let pos = bracket(&kink(Cross::Pos), &c, &p).unwrap();
                let neg = bracket(&kink(Cross::Neg), &c, &p).unwrap();
                let dn = p.delta(n as i64);
                assert!((pos - p.curl(n, TwistSense::Positive) * dn).norm() < 1e-9);
                assert!((neg - p.curl(n, TwistSense::Negative) * dn).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn encircling_ring() {
        for r in 3..=9 {
            let p = QuantumParams::new(r).unwrap();
            let d = hopf(Cross::Pos, Cross::Pos);
            for n in p.colors() {
                for i in p.colors() {
                    let v = bracket(&d, &Coloring(vec![n, i]), &p).unwrap();
                    let m = 2 * (n as i64 + 1);
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    let ratio = (p.a_pow(m * (i as i64 + 1)) - p.a_pow(-m * (i as i64 + 1)))
                        / (p.a_pow(m) - p.a_pow(-m));
                    let expected = ratio * sign * p.delta(n as i64);
                    assert!((v - expected).norm() < 1e-9, "r={r} n={n} i={i}");
                }
            }
        }
    }

    #[test]
    fn reidemeister_two() {
        for r in 3..=8 {
            let p = QuantumParams::new(r).unwrap();
            let flat = Builder::new("flat").cap(0).cap(2).cup(2).cup(0).finish().unwrap();
            let crossed = hopf(Cross::Pos, Cross::Neg);
            for c in colorings(&crossed, &p, 6) {
                let a = bracket(&flat, &c, &p).unwrap();
                let b = bracket(&crossed, &c, &p).unwrap();
                assert!((a - b).norm() < 1e-9);
            }
            let t = theta();
            let tt = twisted_theta(Cross::Pos, Cross::Neg);
            for c in colorings(&t, &p, 6) {
                let a = bracket(&t, &c, &p).unwrap();
                let b = bracket(&tt, &c, &p).unwrap();
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn inadmissible_is_zero() {
        let p = QuantumParams::new(5).unwrap();
        let v = bracket(&theta(), &Coloring(vec![1, 1, 1]), &p).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn planar_reduction_rejects_crossings() {
        let p = QuantumParams::new(5).unwrap();
        let d = kink(Cross::Pos);
        let net = Net::from_diagram(&d, &Coloring(vec![1]), &p).unwrap();
        assert_eq!(reduce_planar(net, &p), Err(EvalError::NotPlanar));
        let net = Net::from_diagram(&theta(), &Coloring(vec![1, 1, 2]), &p).unwrap();
        assert!((reduce_planar(net, &p).unwrap() - 1.618033988749895).abs() < 1e-9);
    }
}
