//! Built-in verification suites over the catalog.

use std::fmt;

use serde::Serialize;

use crate::diagram::{catalog, DiagramCode};
use crate::evaluator::{brute_bracket, bracket, EvalError};
use crate::invariants::{enumerate_colorings, hk_invariant};
use crate::skein::QuantumParams;
use crate::wrt::{kirby_move_pair_check, theorem3_check, FramedLink};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Reidemeister,
    Mirror,
    Oracle,
    Kirby,
    Theorem3,
    CrossingChange,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Reidemeister,
        Suite::Mirror,
        Suite::Oracle,
        Suite::Kirby,
        Suite::Theorem3,
        Suite::CrossingChange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reidemeister => "reidemeister",
            Suite::Mirror => "mirror",
            Suite::Oracle => "oracle",
            Suite::Kirby => "kirby",
            Suite::Theorem3 => "theorem3",
            Suite::CrossingChange => "crossing-change",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn default_rs(self) -> Vec<u32> {
        match self {
            Suite::Reidemeister | Suite::Mirror => (3..=8).collect(),
            Suite::Oracle => vec![4, 5, 6],
            Suite::Kirby => (3..=12).collect(),
            Suite::Theorem3 => (3..=10).collect(),
            Suite::CrossingChange => vec![3],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: usize,
    pub max_deviation: f64,
    pub failures: Vec<String>,
    pub pass: bool,
}

struct Tally {
    tolerance: f64,
    checks: usize,
    max: f64,
    failures: Vec<String>,
}

impl Tally {
    fn new(tolerance: f64) -> Self {
        Tally {
            tolerance,
            checks: 0,
            max: 0.0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, what: impl FnOnce() -> String, deviation: f64, ok: bool) {
        self.checks += 1;
        self.max = self.max.max(deviation);
        if !ok || deviation.is_nan() {
            self.failures.push(format!("{} (deviation {deviation:.3e})", what()));
        }
    }

    fn diff(&mut self, what: impl FnOnce() -> String, a: f64, b: f64) {
        let d = (a - b).abs();
        self.record(what, d, d < self.tolerance);
    }

    fn finish(self, suite: Suite) -> SuiteReport {
        SuiteReport {
            suite,
            checks: self.checks,
            max_deviation: self.max,
            pass: self.failures.is_empty(),
            failures: self.failures,
        }
    }
}

fn params(r: u32) -> Result<QuantumParams, EvalError> {
    Ok(QuantumParams::new(r)?)
}

/// Small diagrams for the oracle comparison: circles, theta, tetrahedron
/// and diagrams with one or two crossings.
pub fn oracle_corpus() -> Vec<DiagramCode> {
    let moves = catalog::reidemeister_pairs();
    vec![
        catalog::circle(),
        catalog::unlink(2),
        catalog::theta(),
        catalog::handcuffs(),
        catalog::tetrahedron(),
        catalog::framed_unknot(1),
        catalog::framed_unknot(-1),
        catalog::hopf(0),
        moves[0].before.clone(),
        moves[1].before.clone(),
        moves[4].before.clone(),
    ]
}

/// Runs one suite over the given `rs` (or its defaults). The crossing-change
/// suite only holds at `r = 3` and ignores `rs`.
pub fn run_suite(suite: Suite, rs: Option<&[u32]>, tolerance: f64) -> Result<SuiteReport, EvalError> {
    let rs: Vec<u32> = match rs {
        Some(x) if suite != Suite::CrossingChange => x.to_vec(),
        _ => suite.default_rs(),
    };
    let mut t = Tally::new(tolerance);
    match suite {
        Suite::Reidemeister => {
            for m in catalog::reidemeister_pairs() {
                for &r in &rs {
                    let p = params(r)?;
                    let a = hk_invariant(&m.before, &p)?.value;
                    let b = hk_invariant(&m.after, &p)?.value;
                    t.diff(|| format!("{} r={r}", m.name), a, b);
                }
            }
        }
        Suite::Mirror => {
            for e in catalog::entries() {
                let m = e.diagram.mirror();
                for &r in &rs {
                    let p = params(r)?;
                    let a = hk_invariant(&e.diagram, &p)?.value;
                    let b = hk_invariant(&m, &p)?.value;
                    t.diff(|| format!("{} r={r}", e.name), a, b);
                }
            }
        }
        Suite::Oracle => {
            for d in oracle_corpus() {
                for &r in &rs {
                    let p = params(r)?;
                    for c in enumerate_colorings(&d, &p).filter(|c| c.0.iter().all(|&x| x <= 3)) {
                        let fast = bracket(&d, &c, &p)?;
                        let slow = match brute_bracket(&d, &c, &p) {
                            Ok(v) => v,
                            Err(EvalError::OracleScale(_)) => continue,
                            Err(e) => return Err(e),
                        };
                        let dev = (fast - slow).norm();
                        t.record(
                            || format!("{} r={r} {:?}", d.display_name(), c.0),
                            dev,
                            dev < tolerance,
                        );
                    }
                }
            }
        }
        Suite::Kirby => {
            for m in catalog::kirby_pairs() {
                let (a, b) = (link(&m.before), link(&m.after));
                for &r in &rs {
                    let rep = kirby_move_pair_check(&a, &b, &params(r)?)?;
                    t.record(
                        || format!("{} r={r}", m.name),
                        rep.difference,
                        rep.difference < tolerance,
                    );
                }
            }
        }
        Suite::Theorem3 => {
            for (d, double) in catalog::double_cases() {
                let l = link(&double);
                for &r in &rs {
                    let rep = theorem3_check(&d, &l, &params(r)?)?;
                    t.record(
                        || format!("{} r={r}", d.display_name()),
                        rep.difference,
                        rep.pass,
                    );
                }
            }
        }
        Suite::CrossingChange => {
            for e in catalog::entries() {
                let d = &e.diagram;
                let want = 2f64.powi(e.genus() as i32);
                let crossings = (0..d.nodes.len()).filter(|&n| d.nodes[n].ports.len() == 4);
                let variants = std::iter::once(d.clone()).chain(crossings.map(|n| d.crossing_changed(n)));
                for (k, v) in variants.enumerate() {
                    for &r in &rs {
                        let got = hk_invariant(&v, &params(r)?)?.value;
                        t.diff(|| format!("{} variant {k} r={r}", e.name), got, want);
                    }
                }
            }
        }
    }
    Ok(t.finish(suite))
}

fn link(d: &DiagramCode) -> FramedLink {
    FramedLink::new(d.clone()).expect("catalog links contain only circles")
}
