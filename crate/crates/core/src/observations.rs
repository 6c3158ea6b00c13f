//! Point observations and their abstraction into anchored intervals.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::ops::RangeInclusive;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sia::{BasicRelation, Constraint, RelationSet, SiaError, SiaNetwork};
use crate::time::{format_rational, parse_rational, rational_serde, Time};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObservationError {
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("row {row}: duplicate observation of `{parameter}` at time {time}")]
    Duplicate { row: usize, parameter: String, time: String },
    #[error("observation of `{parameter}` has value `{value}` outside its domain")]
    Domain { parameter: String, value: String },
    #[error("split of `{0}` keeps no observation")]
    EmptySplit(String),
    #[error("split range {start}..={end} is not a proper sub-range of `{id}`")]
    BadSplit { id: String, start: usize, end: usize },
}

/// A measurement of one parameter at one time point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Observation {
    pub parameter: String,
    pub value: String,
    #[serde(with = "rational_serde")]
    pub time: Rational64,
}

impl Observation {
    pub fn new(parameter: impl Into<String>, value: impl Into<String>, time: Rational64) -> Self {
        Observation { parameter: parameter.into(), value: value.into(), time }
    }
}

/// Observations grouped per parameter in time order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationTable {
    records: BTreeMap<String, Vec<Observation>>,
    times: Vec<Rational64>,
}

#[derive(Deserialize)]
struct Row {
    parameter: String,
    value: String,
    time: String,
}

impl ObservationTable {
    /// Builds a table, rejecting two observations of one parameter at one time.
    pub fn from_observations(obs: impl IntoIterator<Item = Observation>) -> Result<Self, ObservationError> {
        let mut table = ObservationTable::default();
        for (k, o) in obs.into_iter().enumerate() {
            table.insert(o, k + 1)?;
        }
        table.finish();
        Ok(table)
    }

    fn insert(&mut self, o: Observation, row: usize) -> Result<(), ObservationError> {
        let record = self.records.entry(o.parameter.clone()).or_default();
        if record.iter().any(|p| p.time == o.time) {
            return Err(ObservationError::Duplicate {
                row,
                parameter: o.parameter,
                time: format_rational(&o.time),
            });
        }
        record.push(o);
        Ok(())
    }

    fn finish(&mut self) {
        let mut times = BTreeSet::new();
        for record in self.records.values_mut() {
            record.sort_by_key(|o| o.time);
            times.extend(record.iter().map(|o| o.time));
        }
        self.times = times.into_iter().collect();
    }

    /// Reads CSV with header `parameter,value,time`; rows are numbered from 1
    /// after the header.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, ObservationError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| ObservationError::Csv { row: 0, message: e.to_string() })?
            .clone();
        let expected = ["parameter", "value", "time"];
        if !headers.is_empty() && headers.iter().collect::<Vec<_>>() != expected {
            return Err(ObservationError::Csv {
                row: 0,
                message: format!("expected header `parameter,value,time`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut table = ObservationTable::default();
        for (k, rec) in rdr.deserialize::<Row>().enumerate() {
            let row = k + 1;
            let rec = rec.map_err(|e| ObservationError::Csv { row, message: e.to_string() })?;
            if rec.parameter.is_empty() || rec.value.is_empty() {
                return Err(ObservationError::Csv { row, message: "empty parameter or value".into() });
            }
            let time = parse_rational(&rec.time).map_err(|e| ObservationError::Csv { row, message: e.to_string() })?;
            table.insert(Observation::new(rec.parameter, rec.value, time), row)?;
        }
        table.finish();
        Ok(table)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, ObservationError> {
        Self::from_csv(text.as_bytes())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("parameter,value,time\n");
        for o in self.observations() {
            out.push_str(&format!("{},{},{}\n", o.parameter, o.value, format_rational(&o.time)));
        }
        out
    }

    /// Checks every value against `allowed(parameter, value)`.
    pub fn check_domain(&self, allowed: impl Fn(&str, &str) -> bool) -> Result<(), ObservationError> {
        match self.observations().find(|o| !allowed(&o.parameter, &o.value)) {
            Some(o) => Err(ObservationError::Domain { parameter: o.parameter.clone(), value: o.value.clone() }),
            None => Ok(()),
        }
    }

    pub fn record(&self, parameter: &str) -> &[Observation] {
        self.records.get(parameter).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn parameters(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    pub fn observations(&self) -> impl Iterator<Item = &Observation> {
        self.records.values().flatten()
    }

    /// All distinct timestamps, ascending.
    pub fn times(&self) -> &[Rational64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.records.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The sub-table of observations satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Observation) -> bool) -> ObservationTable {
        let mut table = ObservationTable::default();
        for o in self.observations().filter(|o| keep(o)) {
            table.records.entry(o.parameter.clone()).or_default().push(o.clone());
        }
        table.finish();
        table
    }

    /// Abstracts `record(parameter)[range]` into an anchored interval.
    pub fn abstract_run(&self, parameter: &str, range: RangeInclusive<usize>) -> AbstractObservation {
        let record = self.record(parameter);
        let (i, j) = (*range.start(), *range.end());
        let covered = record[i..=j].to_vec();
        let first = Time::At(covered[0].time);
        let last = Time::At(covered[covered.len() - 1].time);
        let prev = i.checked_sub(1).map(|k| Time::At(record[k].time));
        let next = record.get(j + 1).map(|o| Time::At(o.time));
        let mut anchors = Vec::new();
        if let Some(p) = prev {
            anchors.push(Anchor::new(BasicRelation::OverlappedBy.into(), p, first));
        }
        if prev.is_none() || next.is_none() {
            anchors.push(Anchor::new(BasicRelation::Contains.into(), first, last));
        }
        if let Some(n) = next {
            anchors.push(Anchor::new(BasicRelation::Overlaps.into(), last, n));
        }
        AbstractObservation {
            parameter: parameter.to_string(),
            value: covered[0].value.clone(),
            extent: aobs_id(parameter, &covered[0].value, covered[0].time, covered[covered.len() - 1].time),
            anchors,
            covered,
            record_start: i,
        }
    }

    /// One abstract observation per maximal same-value run of each parameter,
    /// ordered by parameter, then time.
    pub fn maximal_aobs(&self) -> Vec<AbstractObservation> {
        let mut out = Vec::new();
        for (param, record) in &self.records {
            let mut start = 0;
            for k in 1..=record.len() {
                if k == record.len() || record[k].value != record[start].value {
                    out.push(self.abstract_run(param, start..=k - 1));
                    start = k;
                }
            }
        }
        out
    }

    /// Shrinks `a` to the covered observations `keep` (indices into `a.covered`).
    pub fn split(&self, a: &AbstractObservation, keep: RangeInclusive<usize>) -> Result<AbstractObservation, ObservationError> {
        let (s, e) = (*keep.start(), *keep.end());
        if keep.is_empty() {
            return Err(ObservationError::EmptySplit(a.extent.clone()));
        }
        if e >= a.covered.len() || (s == 0 && e + 1 == a.covered.len()) {
            return Err(ObservationError::BadSplit { id: a.extent.clone(), start: s, end: e });
        }
        Ok(self.abstract_run(&a.parameter, a.record_start + s..=a.record_start + e))
    }
}

/// `param=value[first..last]`, the node id of an abstract observation.
pub fn aobs_id(parameter: &str, value: &str, first: Rational64, last: Rational64) -> String {
    format!("{parameter}={value}[{}..{}]", format_rational(&first), format_rational(&last))
}

/// One qualitative anchor `extent rel [lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Anchor {
    pub relation: RelationSet,
    pub lo: Time,
    pub hi: Time,
}

impl Anchor {
    pub fn new(relation: RelationSet, lo: Time, hi: Time) -> Self {
        Anchor { relation, lo, hi }
    }
}

impl std::fmt::Display for Anchor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}[{}, {}]", self.relation, self.lo, self.hi)
    }
}

/// A parameter-value assumption over an indefinite interval covering a run
/// of consecutive point observations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbstractObservation {
    pub parameter: String,
    pub value: String,
    pub extent: String,
    pub anchors: Vec<Anchor>,
    pub covered: Vec<Observation>,
    /// Index of the first covered observation in the parameter's record.
    #[serde(skip)]
    record_start: usize,
}

impl PartialEq for AbstractObservation {
    fn eq(&self, other: &Self) -> bool {
        self.extent == other.extent && self.anchors == other.anchors && self.covered == other.covered
    }
}

impl Eq for AbstractObservation {}

impl AbstractObservation {
    pub fn first_time(&self) -> Rational64 {
        self.covered[0].time
    }

    pub fn last_time(&self) -> Rational64 {
        self.covered[self.covered.len() - 1].time
    }

    /// Adds the extent and its anchors to `net`, returning the extent node.
    pub fn add_to(&self, net: &mut SiaNetwork) -> Result<usize, SiaError> {
        let t = net.add_variable(self.extent.clone())?;
        for a in &self.anchors {
            let g = net.add_anchor(a.lo, a.hi)?;
            net.constrain(t, g, a.relation)?;
        }
        Ok(t)
    }
}

/// `child {s, d, f, e} parent`: a split extent lies within the one it came
/// from. `{s, d, f}` alone is not SIA, so the label carries its closure.
pub fn split_constraint(child: &AbstractObservation, parent: &AbstractObservation) -> Constraint {
    use BasicRelation::*;
    Constraint::new(child.extent.clone(), parent.extent.clone(), RelationSet::of(&[Starts, During, Finishes, Equals]))
}

/// Network of the given abstract observations with their anchors, plus the
/// derived pairwise relations among the extents stored as edge labels.
pub fn sia_aobs(aset: &[AbstractObservation]) -> Result<SiaNetwork, SiaError> {
    let mut net = SiaNetwork::new();
    let ids = aset.iter().map(|a| a.add_to(&mut net)).collect::<Result<Vec<_>, _>>()?;
    let solved = net.solve()?;
    for (k, &i) in ids.iter().enumerate() {
        for &j in &ids[k + 1..] {
            net.constrain(i, j, solved.relation(i, j))?;
        }
    }
    Ok(net)
}

/// Union of the covered observations.
pub fn associated_observations<'a>(aset: impl IntoIterator<Item = &'a AbstractObservation>) -> BTreeSet<Observation> {
    aset.into_iter().flat_map(|a| a.covered.iter().cloned()).collect()
}
