//! Trivalent spatial-graph diagrams: data model, file formats, slice
//! builder and the built-in catalog.

pub(crate) mod builder;
pub mod catalog;
mod format;
mod model;

pub use builder::{Builder, Cross};
pub use catalog::{CatalogEntry, MovePair};
pub use format::{load, parse, parse_json, serialize, to_json, ParseError, HEADER};
pub use model::{
    Circle, CircleStep, Dart, DiagramCode, Edge, Face, Node, NodeKind, Orientation, PortRef,
    RawDiagram, Segment, SegmentSource, Strand, StrandKind, ValidationError,
};
pub(crate) use model::UnionFind;
