use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::point::{PointKind, PointNetwork, PointRelation};
use super::relation::{BasicRelation, RelationSet};
use super::SiaError;
use crate::time::Time;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Variable,
    Grounded { lo: Time, hi: Time },
}

/// An interval node. Grounded nodes are fixed to `[lo, hi]` on the time line;
/// `lo == hi` denotes a time point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TemporalNode {
    pub id: String,
    pub kind: NodeKind,
}

impl TemporalNode {
    pub fn is_point(&self) -> bool {
        matches!(self.kind, NodeKind::Grounded { lo, hi } if lo == hi)
    }

    pub fn is_grounded(&self) -> bool {
        matches!(self.kind, NodeKind::Grounded { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum End {
    Start,
    End,
}

/// A constraint `node.end rel value` against a fixed time value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EndpointBound {
    pub node: usize,
    pub end: End,
    pub relation: PointRelation,
    pub value: Time,
}

/// A qualitative constraint `from rel to` addressed by node id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub from: String,
    pub to: String,
    pub relation: RelationSet,
}

impl Constraint {
    pub fn new(from: impl Into<String>, to: impl Into<String>, relation: RelationSet) -> Self {
        Constraint { from: from.into(), to: to.into(), relation }
    }
}

/// Canonical id of the grounded anchor `[lo, hi]`.
pub fn anchor_id(lo: Time, hi: Time) -> String {
    format!("[{lo}, {hi}]")
}

/// Interval network whose edge labels are SIA relation sets. Absent edges
/// stand for the full set.
#[derive(Clone, Default)]
pub struct SiaNetwork {
    nodes: Vec<TemporalNode>,
    index: HashMap<String, usize>,
    /// Keyed by `(i, j)` with `i < j`; the label reads `i rel j`.
    edges: BTreeMap<(usize, usize), RelationSet>,
    bounds: Vec<EndpointBound>,
    contradiction: bool,
}

impl std::fmt::Debug for SiaNetwork {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SiaNetwork")
            .field("nodes", &self.nodes)
            .field("edges", &self.edges)
            .field("bounds", &self.bounds)
            .field("contradiction", &self.contradiction)
            .finish()
    }
}

impl SiaNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nodes(&self) -> &[TemporalNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &TemporalNode {
        &self.nodes[i]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize, SiaError> {
        self.node_index(id).ok_or_else(|| SiaError::UnknownNode(id.to_string()))
    }

    fn insert(&mut self, node: TemporalNode) -> Result<usize, SiaError> {
        if let Some(&i) = self.index.get(&node.id) {
            if self.nodes[i].kind != node.kind {
                return Err(SiaError::NodeConflict(node.id));
            }
            return Ok(i);
        }
        let i = self.nodes.len();
        self.index.insert(node.id.clone(), i);
        self.nodes.push(node);
        Ok(i)
    }

    pub fn add_variable(&mut self, id: impl Into<String>) -> Result<usize, SiaError> {
        self.insert(TemporalNode { id: id.into(), kind: NodeKind::Variable })
    }

    pub fn add_grounded(&mut self, id: impl Into<String>, lo: Time, hi: Time) -> Result<usize, SiaError> {
        let id = id.into();
        if lo > hi || (lo == hi && !lo.is_finite()) {
            return Err(SiaError::InvalidBounds { id, lo, hi });
        }
        self.insert(TemporalNode { id, kind: NodeKind::Grounded { lo, hi } })
    }

    /// Adds (or finds) the grounded anchor `[lo, hi]` under its canonical id.
    pub fn add_anchor(&mut self, lo: Time, hi: Time) -> Result<usize, SiaError> {
        self.add_grounded(anchor_id(lo, hi), lo, hi)
    }

    /// Intersects the label of `i → j` with `rel`.
    pub fn constrain(&mut self, i: usize, j: usize, rel: RelationSet) -> Result<(), SiaError> {
        rel.encode()?;
        if i == j {
            if !rel.contains(BasicRelation::Equals) {
                self.contradiction = true;
            }
            return Ok(());
        }
        let (key, oriented) = if i < j { ((i, j), rel) } else { ((j, i), rel.converse()) };
        let slot = self.edges.entry(key).or_insert(RelationSet::ALL);
        *slot = *slot & oriented;
        Ok(())
    }

    pub fn constrain_ids(&mut self, from: &str, to: &str, rel: RelationSet) -> Result<(), SiaError> {
        let i = self.require(from)?;
        let j = self.require(to)?;
        self.constrain(i, j, rel)
    }

    pub fn apply(&mut self, c: &Constraint) -> Result<(), SiaError> {
        self.constrain_ids(&c.from, &c.to, c.relation)
    }

    /// Restricts one endpoint of `node` against a fixed value.
    pub fn bound_endpoint(&mut self, node: usize, end: End, relation: PointRelation, value: Time) {
        self.bounds.push(EndpointBound { node, end, relation, value });
    }

    /// Stored label of `i → j` (full set when absent).
    pub fn relation(&self, i: usize, j: usize) -> RelationSet {
        if i == j {
            return RelationSet::single(BasicRelation::Equals);
        }
        if i < j {
            self.edges.get(&(i, j)).copied().unwrap_or(RelationSet::ALL)
        } else {
            self.edges.get(&(j, i)).map(|r| r.converse()).unwrap_or(RelationSet::ALL)
        }
    }

    /// Explicitly stored edges, oriented `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, RelationSet)> + '_ {
        self.edges.iter().map(|(&(i, j), &r)| (i, j, r))
    }

    pub fn bounds(&self) -> &[EndpointBound] {
        &self.bounds
    }

    /// Node-merging union: nodes are identified by id, shared edges intersect.
    pub fn merge(&mut self, other: &SiaNetwork) -> Result<(), SiaError> {
        let mut map = Vec::with_capacity(other.nodes.len());
        for n in &other.nodes {
            map.push(self.insert(n.clone())?);
        }
        for (&(i, j), &r) in &other.edges {
            self.constrain(map[i], map[j], r)?;
        }
        for b in &other.bounds {
            self.bounds.push(EndpointBound { node: map[b.node], ..*b });
        }
        self.contradiction |= other.contradiction;
        Ok(())
    }

    /// Endpoint translation: two points per variable interval with an internal
    /// `<`, grounded endpoints as shared value points, each edge expanded
    /// through its endpoint encoding.
    pub fn to_point_network(&self) -> Result<PointNetwork, SiaError> {
        let mut values = BTreeSet::new();
        for n in &self.nodes {
            if let NodeKind::Grounded { lo, hi } = n.kind {
                values.insert(lo);
                values.insert(hi);
            }
        }
        for b in &self.bounds {
            values.insert(b.value);
        }
        let mut kinds: Vec<PointKind> = values.iter().map(|v| PointKind::Value(*v)).collect();
        let value_idx: HashMap<Time, usize> = values.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut endpoints = Vec::with_capacity(self.nodes.len());
        for (i, n) in self.nodes.iter().enumerate() {
            match n.kind {
                NodeKind::Grounded { lo, hi } => endpoints.push((value_idx[&lo], value_idx[&hi])),
                NodeKind::Variable => {
                    let s = kinds.len();
                    kinds.push(PointKind::Start(i));
                    kinds.push(PointKind::End(i));
                    endpoints.push((s, s + 1));
                }
            }
        }
        let mut pn = PointNetwork::with_points(kinds, endpoints.clone());
        for (i, n) in self.nodes.iter().enumerate() {
            if n.kind == NodeKind::Variable {
                pn.restrict(endpoints[i].0, endpoints[i].1, PointRelation::LT);
            }
        }
        if self.contradiction {
            return Err(SiaError::Inconsistent);
        }
        for (&(i, j), &r) in &self.edges {
            let enc = r.encode()?.entries();
            let (xs, xe) = endpoints[i];
            let (ys, ye) = endpoints[j];
            pn.restrict(xs, ys, enc[0]);
            pn.restrict(xs, ye, enc[1]);
            pn.restrict(xe, ys, enc[2]);
            pn.restrict(xe, ye, enc[3]);
        }
        for b in &self.bounds {
            let (s, e) = endpoints[b.node];
            let p = if b.end == End::Start { s } else { e };
            pn.restrict(p, value_idx[&b.value], b.relation);
        }
        Ok(pn)
    }

    pub fn solve(&self) -> Result<MinimalNetwork, SiaError> {
        let points = self.to_point_network()?.propagate()?;
        Ok(MinimalNetwork { nodes: self.nodes.clone(), index: self.index.clone(), points })
    }

    pub fn is_consistent(&self) -> bool {
        self.solve().is_ok()
    }
}

/// A propagated network: every query reads minimal labels.
#[derive(Clone, Debug)]
pub struct MinimalNetwork {
    nodes: Vec<TemporalNode>,
    index: HashMap<String, usize>,
    points: PointNetwork,
}

impl MinimalNetwork {
    pub fn nodes(&self) -> &[TemporalNode] {
        &self.nodes
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn points(&self) -> &PointNetwork {
        &self.points
    }

    /// Endpoint encoding of the minimal label between `i` and `j`.
    pub fn encoding(&self, i: usize, j: usize) -> super::point::EndpointEncoding {
        let (xs, xe) = self.points.endpoints(i);
        let (ys, ye) = self.points.endpoints(j);
        super::point::EndpointEncoding::new([
            self.points.get(xs, ys),
            self.points.get(xs, ye),
            self.points.get(xe, ys),
            self.points.get(xe, ye),
        ])
    }

    /// Basic relations between `i` and `j` feasible in some solution.
    pub fn relation(&self, i: usize, j: usize) -> RelationSet {
        if i == j {
            return RelationSet::single(BasicRelation::Equals);
        }
        self.encoding(i, j)
            .decode_with(self.nodes[i].is_point(), self.nodes[j].is_point())
    }

    pub fn relation_ids(&self, from: &str, to: &str) -> Result<RelationSet, SiaError> {
        let i = self.node_index(from).ok_or_else(|| SiaError::UnknownNode(from.to_string()))?;
        let j = self.node_index(to).ok_or_else(|| SiaError::UnknownNode(to.to_string()))?;
        Ok(self.relation(i, j))
    }

    /// Tightest `[lo, hi]` containing every feasible value of the endpoint.
    pub fn endpoint_window(&self, node: usize, end: End) -> (Time, Time) {
        let (s, e) = self.points.endpoints(node);
        let p = if end == End::Start { s } else { e };
        (self.points.lower_bound(p), self.points.upper_bound(p))
    }
}

/// Minimal label between two nodes of `net`.
pub fn minimal_relation(net: &SiaNetwork, i: usize, j: usize) -> Result<RelationSet, SiaError> {
    Ok(net.solve()?.relation(i, j))
}

/// Is `phi` possibly true with respect to `c`: does `c` stay consistent with
/// every constraint of `phi` intersected in.
pub fn possible(c: &SiaNetwork, phi: &[Constraint]) -> Result<bool, SiaError> {
    let mut net = c.clone();
    for k in phi {
        net.apply(k)?;
    }
    Ok(net.is_consistent())
}

/// Is `phi` necessarily true with respect to `c`: `c` is consistent and every
/// minimal label of `c` lies inside the corresponding constraint of `phi`.
pub fn necessary(c: &SiaNetwork, phi: &[Constraint]) -> Result<bool, SiaError> {
    for k in phi {
        c.require(&k.from)?;
        c.require(&k.to)?;
    }
    let Ok(solved) = c.solve() else {
        return Ok(false);
    };
    for k in phi {
        if !solved.relation_ids(&k.from, &k.to)?.is_subset(k.relation) {
            return Ok(false);
        }
    }
    Ok(true)
}
