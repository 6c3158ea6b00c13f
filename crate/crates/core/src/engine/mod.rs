//! Candidate generation and abstract temporal diagnosis.

mod abduction;
mod consistency;
mod diagnosis;
mod window;

use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::model::{BehavioralModel, DurationBound, KnowledgeBase, Manifestation, ModelError};
use crate::observations::{AbstractObservation, Anchor, Observation, ObservationTable};
use crate::sia::{self, Constraint, End, EndpointEncoding, NodeKind, PointRelation, RelationSet, SiaError, SiaNetwork};
use crate::time::Time;

pub use abduction::Abduction;
pub use diagnosis::{verify_coverage, verify_path, verify_possible, Diagnosis, ModeRelation};
pub use window::{static_eval, StaticOutcome, Window};

/// A behavioral mode assumed over an indefinite interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atbma {
    pub mode: String,
    pub component: String,
    pub extent: String,
    /// Qualitative constraints `extent rel [lo, hi]`.
    pub anchors: Vec<Anchor>,
    /// Start and end windows, once normalized.
    pub window: Option<Window>,
    /// Duration bounds recorded by the static step.
    pub durations: Vec<DurationBound>,
}

impl Atbma {
    /// Label towards the anchor `[lo, hi]`, if present.
    pub fn label(&self, lo: Time, hi: Time) -> Option<RelationSet> {
        self.anchors.iter().find(|a| a.lo == lo && a.hi == hi).map(|a| a.relation)
    }
}

/// A model manifestation bound to an abstract observation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binding {
    pub manifestation: Manifestation,
    pub aobs: AbstractObservation,
}

/// An ATBMA with the abstract observations it covers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Hypothesis {
    pub atbma: Atbma,
    pub covered: Vec<Binding>,
    /// Negative abstract observations chosen for the closed-world part.
    pub negatives: Vec<Binding>,
    /// Observation time the mode extent is required to contain.
    pub covering: Option<Time>,
    /// Constraint network backing the ATBMA.
    #[serde(skip)]
    pub network: SiaNetwork,
}

impl PartialEq for Hypothesis {
    fn eq(&self, other: &Self) -> bool {
        self.atbma == other.atbma
            && self.covered == other.covered
            && self.negatives == other.negatives
            && self.covering == other.covering
    }
}

impl Hypothesis {
    pub fn covered_aobs(&self) -> impl Iterator<Item = &AbstractObservation> {
        self.covered.iter().map(|b| &b.aobs)
    }

    pub fn associated_observations(&self) -> BTreeSet<Observation> {
        crate::observations::associated_observations(self.covered_aobs())
    }

    /// `(earliest, latest)` covered observation time.
    pub fn span(&self) -> Option<(Rational64, Rational64)> {
        let lo = self.covered_aobs().map(|a| a.first_time()).min()?;
        let hi = self.covered_aobs().map(|a| a.last_time()).max()?;
        Some((lo, hi))
    }
}

/// Counters for the expensive steps of one engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub necessary_calls: usize,
    pub possible_calls: usize,
    pub splits: usize,
    pub hypotheses: usize,
    pub candidates: usize,
}

#[derive(Default)]
struct Counters {
    necessary: Cell<usize>,
    possible: Cell<usize>,
    splits: Cell<usize>,
    hypotheses: Cell<usize>,
    candidates: Cell<usize>,
}

fn bump(c: &Cell<usize>) {
    c.set(c.get() + 1);
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Network(#[from] SiaError),
}

/// Diagnosis engine over one knowledge base and one observation table.
pub struct Engine<'a> {
    kb: &'a KnowledgeBase,
    table: &'a ObservationTable,
    aobs: Vec<AbstractObservation>,
    consistency_models: HashMap<String, BehavioralModel>,
    counters: Counters,
    observed: RefCell<HashMap<(String, String), (RelationSet, EndpointEncoding)>>,
    candidates: RefCell<HashMap<String, Vec<Hypothesis>>>,
}

impl<'a> Engine<'a> {
    pub fn new(kb: &'a KnowledgeBase, table: &'a ObservationTable) -> Result<Self, EngineError> {
        let mut consistency_models = HashMap::new();
        for bm in &kb.models {
            consistency_models.insert(bm.mode.clone(), kb.consistency_model(&bm.mode)?);
        }
        Ok(Engine {
            kb,
            table,
            aobs: table.maximal_aobs(),
            consistency_models,
            counters: Counters::default(),
            observed: RefCell::new(HashMap::new()),
            candidates: RefCell::new(HashMap::new()),
        })
    }

    pub fn knowledge_base(&self) -> &KnowledgeBase {
        self.kb
    }

    pub fn table(&self) -> &ObservationTable {
        self.table
    }

    /// All maximal abstract observations.
    pub fn aobs(&self) -> &[AbstractObservation] {
        &self.aobs
    }

    /// Maximal abstract observations of values some model predicts.
    pub fn positive_aobs(&self) -> impl Iterator<Item = &AbstractObservation> {
        self.aobs.iter().filter(|a| self.kb.is_abnormal(&a.parameter, &a.value))
    }

    /// Observations a diagnosis has to explain.
    pub fn positive_observations(&self) -> BTreeSet<Observation> {
        self.table
            .observations()
            .filter(|o| self.kb.is_abnormal(&o.parameter, &o.value))
            .cloned()
            .collect()
    }

    pub fn consistency_model(&self, mode: &str) -> Option<&BehavioralModel> {
        self.consistency_models.get(mode)
    }

    pub fn stats(&self) -> Stats {
        Stats {
            necessary_calls: self.counters.necessary.get(),
            possible_calls: self.counters.possible.get(),
            splits: self.counters.splits.get(),
            hypotheses: self.counters.hypotheses.get(),
            candidates: self.counters.candidates.get(),
        }
    }

    fn necessary(&self, c: &SiaNetwork, phi: &[Constraint]) -> bool {
        bump(&self.counters.necessary);
        let verdict = sia::necessary(c, phi).unwrap_or(false);
        log::debug!("necessary over {} constraints: {verdict}", phi.len());
        verdict
    }

    fn possible(&self, c: &SiaNetwork) -> bool {
        bump(&self.counters.possible);
        let verdict = c.is_consistent();
        log::debug!("possible over {} nodes: {verdict}", c.nodes().len());
        verdict
    }

    /// Minimal relation between the extents of two abstract observations as
    /// fixed by their anchors.
    pub fn observed_relation(&self, a: &AbstractObservation, b: &AbstractObservation) -> RelationSet {
        self.observed_pair(a, b).0
    }

    fn observed_pair(&self, a: &AbstractObservation, b: &AbstractObservation) -> (RelationSet, EndpointEncoding) {
        let key = (a.extent.clone(), b.extent.clone());
        if let Some(r) = self.observed.borrow().get(&key) {
            return *r;
        }
        let mut net = SiaNetwork::new();
        let r = (|| {
            let i = a.add_to(&mut net)?;
            let j = b.add_to(&mut net)?;
            let solved = net.solve()?;
            Ok::<_, SiaError>((solved.relation(i, j), solved.encoding(i, j)))
        })()
        .unwrap_or((RelationSet::EMPTY, EndpointEncoding::new([PointRelation::EMPTY; 4])));
        self.observed.borrow_mut().insert(key, r);
        r
    }
}

/// Node id of a manifestation left unbound in a mode instantiation.
fn free_extent(bm: &BehavioralModel, m: &Manifestation) -> String {
    format!("{}:{}", bm.extent, m.extent)
}

/// Substitutes bound abstract observations for manifestation extents and
/// collects the model's constraints over the result. Unbound manifestations
/// become free nodes. `patterns` also adds the manifestation relations.
fn instantiate_network(
    bm: &BehavioralModel,
    bindings: &[(Manifestation, Option<AbstractObservation>)],
    patterns: bool,
) -> Result<SiaNetwork, SiaError> {
    let mut net = SiaNetwork::new();
    net.add_variable(bm.extent.clone())?;
    let mut ids: HashMap<&str, String> = HashMap::new();
    for (m, a) in bindings {
        let id = match a {
            Some(a) => {
                a.add_to(&mut net)?;
                a.extent.clone()
            }
            None => {
                let id = free_extent(bm, m);
                net.add_variable(id.clone())?;
                id
            }
        };
        ids.insert(m.extent.as_str(), id);
    }
    let resolve = |e: &str| -> String {
        if e == bm.extent {
            e.to_string()
        } else {
            ids.get(e).cloned().unwrap_or_else(|| e.to_string())
        }
    };
    let mut list: Vec<&Constraint> = bm.anchors.iter().collect();
    if patterns {
        list.extend(&bm.patterns);
    }
    for c in list {
        net.constrain_ids(&resolve(&c.from), &resolve(&c.to), c.relation)?;
    }
    Ok(net)
}

/// Relations from `extent` to every grounded interval of a solved network,
/// ordered by the interval.
fn anchor_labels(net: &SiaNetwork, extent: &str) -> Result<Vec<Anchor>, SiaError> {
    let solved = net.solve()?;
    let t = net.require(extent)?;
    let mut out: Vec<Anchor> = net
        .nodes()
        .iter()
        .enumerate()
        .filter_map(|(k, n)| match n.kind {
            NodeKind::Grounded { lo, hi } => Some(Anchor::new(solved.relation(t, k), lo, hi)),
            NodeKind::Variable => None,
        })
        .collect();
    out.sort_by_key(|a| (a.lo, a.hi));
    Ok(out)
}

/// Restricts `extent` to start inside `s` and end inside `e`; open windows
/// except where a window is a single value.
fn bound_by_window(net: &mut SiaNetwork, extent: &str, w: &Window) -> Result<(), SiaError> {
    use crate::sia::PointRelation as P;
    let t = net.require(extent)?;
    for (end, lo, hi) in [(End::Start, w.s_lo, w.s_hi), (End::End, w.e_lo, w.e_hi)] {
        if lo == hi {
            net.bound_endpoint(t, end, P::EQ, lo);
            continue;
        }
        if lo.is_finite() {
            net.bound_endpoint(t, end, P::GT, lo);
        }
        if hi.is_finite() {
            net.bound_endpoint(t, end, P::LT, hi);
        }
    }
    Ok(())
}
