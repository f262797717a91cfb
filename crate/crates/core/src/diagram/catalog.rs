//! Built-in diagrams: small handlebody-knots, Reidemeister move pairs and
//! framed links for the surgery checks.

use super::builder::{Builder, Cross};
use super::model::DiagramCode;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub diagram: DiagramCode,
    /// Genus of each component (graph components first, then circles).
    pub genera: Vec<u32>,
    pub components: u32,
    pub note: &'static str,
}

impl CatalogEntry {
    fn new(diagram: DiagramCode, note: &'static str) -> Self {
        let genera = diagram.component_genera();
        CatalogEntry {
            name: diagram.display_name().to_string(),
            components: genera.len() as u32,
            genera,
            diagram,
            note,
        }
    }

    pub fn genus(&self) -> u32 {
        self.genera.iter().sum()
    }
}

/// Before/after diagrams of one local move.
#[derive(Debug, Clone)]
pub struct MovePair {
    pub name: &'static str,
    pub before: DiagramCode,
    pub after: DiagramCode,
}

fn done(b: &Builder) -> DiagramCode {
    b.finish().expect("catalog diagrams are valid")
}

pub fn circle() -> DiagramCode {
    let mut b = Builder::new("circle");
    b.cap(0).cup(0);
    done(&b)
}

pub fn theta() -> DiagramCode {
    let mut b = Builder::new("0_1_theta");
    b.cap(0).split(0).merge(0).cup(0);
    done(&b)
}

pub fn handcuffs() -> DiagramCode {
    let mut b = Builder::new("0_1_handcuffs");
    b.cap(0).split(1).cup(0).cap(1).merge(0).cup(0);
    done(&b)
}

/// Handcuff graph whose bar clasps the loop at one end and twists once
/// fully around a leg of the loop at the other.
pub fn four_one() -> DiagramCode {
    let mut b = Builder::new("4_1");
    b.cap(0).split(1).cap(3).split(4);
    b.cross(2, Cross::Pos).cross(2, Cross::Pos);
    b.cross(1, Cross::Pos).cross(1, Cross::Pos);
    b.cup(0).cup(1).cup(0);
    done(&b)
}

/// Planar tetrahedral graph: the trivial genus-3 handlebody-knot.
pub fn tetrahedron() -> DiagramCode {
    let mut b = Builder::new("trivial_genus3");
    b.cap(0).split(0).split(1).merge(0).merge(1).cup(0);
    done(&b)
}

/// Handlebody-knots and links with their notes.
pub fn entries() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry::new(circle(), "unknotted solid torus"),
        CatalogEntry::new(theta(), "trivial genus-2 knot, theta-curve diagram"),
        CatalogEntry::new(handcuffs(), "trivial genus-2 knot, handcuff diagram"),
        CatalogEntry::new(four_one(), "genus-2 handlebody-knot 4_1, four crossings"),
        CatalogEntry::new(tetrahedron(), "trivial genus-3 knot, planar tetrahedral graph"),
    ]
}

pub fn get(name: &str) -> Option<CatalogEntry> {
    entries().into_iter().find(|e| e.name == name)
}

fn theta_with(name: &str, f: impl FnOnce(&mut Builder)) -> DiagramCode {
    let mut b = Builder::new(name);
    b.cap(0).split(0);
    f(&mut b);
    b.merge(0).cup(0);
    done(&b)
}

/// Genus-3 graph ending in a tree that joins three strands, with a circle
/// around the first two of them.
fn ih(name: &str, h: bool) -> DiagramCode {
    let mut b = Builder::new(name);
    b.cap(0).split(1).split(2);
    b.cap(1)
        .cross(2, Cross::Pos)
        .cross(3, Cross::Pos)
        .cross(1, Cross::Neg)
        .cross(2, Cross::Neg)
        .cup(3);
    if h {
        b.merge(2).merge(1);
    } else {
        b.merge(1).merge(1);
    }
    b.cup(0);
    done(&b)
}

/// One before/after pair for each of the moves RI to RVI.
pub fn reidemeister_pairs() -> Vec<MovePair> {
    let r3 = |name: &str, word: [usize; 4]| {
        let mut b = Builder::new(name);
        b.cap(0).split(1);
        for i in word {
            b.cross(i, Cross::Pos);
        }
        b.merge(1).cup(0);
        done(&b)
    };
    let r4 = |name: &str, before: bool| {
        let mut b = Builder::new(name);
        b.cap(0).split(1);
        if before {
            b.cross(0, Cross::Neg).cross(1, Cross::Neg).merge(0);
        } else {
            b.merge(1).cross(0, Cross::Neg);
        }
        b.cup(0);
        done(&b)
    };
    vec![
        MovePair {
            name: "RI",
            before: theta_with("r1_kink", |b| {
                b.cap(2).cross(1, Cross::Pos).cup(2);
            }),
            after: theta().with_name("r1_plain"),
        },
        MovePair {
            name: "RII",
            before: theta_with("r2_clasp", |b| {
                b.cross(0, Cross::Pos).cross(0, Cross::Neg);
            }),
            after: theta().with_name("r2_plain"),
        },
        MovePair {
            name: "RIII",
            before: r3("r3_left", [0, 1, 0, 1]),
            after: r3("r3_right", [1, 0, 1, 1]),
        },
        MovePair {
            name: "RIV",
            before: r4("r4_over_legs", true),
            after: r4("r4_over_stem", false),
        },
        MovePair {
            name: "RV",
            before: theta_with("r5_twisted_legs", |b| {
                b.cross(0, Cross::Pos);
            }),
            after: theta().with_name("r5_plain"),
        },
        MovePair {
            name: "RVI",
            before: ih("r6_i", false),
            after: ih("r6_h", true),
        },
    ]
}

fn framed(name: &str, f: impl FnOnce(&mut Builder)) -> DiagramCode {
    let mut b = Builder::new(name).framed();
    f(&mut b);
    done(&b)
}

/// Blackboard-framed unknot with `|framing|` kinks of the given sign.
pub fn framed_unknot(framing: i32) -> DiagramCode {
    framed(&format!("unknot_{framing:+}"), |b| {
        b.cap(0);
        let kind = if framing > 0 { Cross::Pos } else { Cross::Neg };
        for _ in 0..framing.unsigned_abs() {
            b.cap(1).cross(0, kind).cup(1);
        }
        b.cup(0);
    })
}

pub fn empty_link() -> DiagramCode {
    framed("empty", |_| {})
}

/// `g` split 0-framed unknots.
pub fn unlink(g: usize) -> DiagramCode {
    framed(&format!("unlink_{g}"), |b| {
        for _ in 0..g {
            b.cap(0).cup(0);
        }
    })
}

/// Hopf link; the first component carries `kinks` extra framing.
pub fn hopf(kinks: i32) -> DiagramCode {
    framed(&format!("hopf_{kinks}_0"), |b| {
        b.cap(0).cap(2);
        let kind = if kinks > 0 { Cross::Pos } else { Cross::Neg };
        for _ in 0..kinks.unsigned_abs() {
            b.cap(1).cross(0, kind).cup(1);
        }
        b.cross(1, Cross::Pos).cross(1, Cross::Pos).cup(2).cup(0);
    })
}

/// 0-framed unknot next to a `framing`-framed one.
fn unknot_plus(framing: i32) -> DiagramCode {
    framed(&format!("unknot_0_and_{framing:+}"), |b| {
        b.cap(0).cup(0).cap(0);
        let kind = if framing > 0 { Cross::Pos } else { Cross::Neg };
        for _ in 0..framing.unsigned_abs() {
            b.cap(1).cross(0, kind).cup(1);
        }
        b.cup(0);
    })
}

/// Kirby move pairs: stabilizations (KI) and a handle slide (KII).
pub fn kirby_pairs() -> Vec<MovePair> {
    vec![
        MovePair {
            name: "KI+",
            before: empty_link(),
            after: framed_unknot(1),
        },
        MovePair {
            name: "KI-",
            before: empty_link(),
            after: framed_unknot(-1),
        },
        MovePair {
            name: "KI+ beside unknot",
            before: unlink(1),
            after: unknot_plus(1),
        },
        MovePair {
            name: "KI- beside unknot",
            before: unlink(1),
            after: unknot_plus(-1),
        },
        MovePair {
            name: "KII",
            before: hopf(0),
            after: hopf(2),
        },
    ]
}

/// Trivial handlebody-knots with surgery diagrams of their doubles.
pub fn double_cases() -> Vec<(DiagramCode, DiagramCode)> {
    vec![
        (circle(), unlink(1)),
        (theta(), unlink(2)),
        (tetrahedron(), unlink(3)),
    ]
}
