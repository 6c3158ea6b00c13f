//! Allen relations, the simple interval algebra and its constraint networks.

mod network;
mod point;
mod relation;
pub mod text;

use thiserror::Error;

use crate::time::Time;

pub use network::{
    anchor_id, minimal_relation, necessary, possible, Constraint, End, EndpointBound, MinimalNetwork,
    NodeKind, SiaNetwork, TemporalNode,
};
pub use point::{EndpointEncoding, PointKind, PointNetwork, PointRelation};
pub use relation::{composition_table, BasicRelation, RelationSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SiaError {
    #[error("relation set {0} is not SIA-encodable")]
    NotSia(RelationSet),
    #[error("inconsistent network")]
    Inconsistent,
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` redeclared with a different kind")]
    NodeConflict(String),
    #[error("grounded node `{id}` has invalid bounds [{lo}, {hi}]")]
    InvalidBounds { id: String, lo: Time, hi: Time },
    #[error("unknown relation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("malformed relation set `{0}`")]
    Malformed(String),
}
