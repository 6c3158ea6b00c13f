use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{enumerate_paths, KnowledgeBase};
use crate::observations::{AbstractObservation, Anchor, Observation};
use crate::sia::{RelationSet, SiaError, SiaNetwork};
use crate::time::{distance, Time};

use super::consistency::{consistency_network, windows_of};
use super::{bound_by_window, Atbma, Binding, Engine, Hypothesis};

/// Relation between the extents of two modes of a diagnosis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeRelation {
    pub from: String,
    pub to: String,
    pub relation: RelationSet,
}

/// Candidates along one path of the mode graph that together cover every
/// positive observation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    /// Modes of the path up to the last one used.
    pub path: Vec<String>,
    pub candidates: Vec<Hypothesis>,
    /// Relations between consecutive present modes.
    pub relations: Vec<ModeRelation>,
    /// Modes added in the gaps, covering nothing.
    pub completed: Vec<Atbma>,
}

impl Diagnosis {
    pub fn atbmas(&self) -> impl Iterator<Item = &Atbma> {
        self.candidates.iter().map(|h| &h.atbma).chain(&self.completed)
    }

    pub fn candidate(&self, mode: &str) -> Option<&Hypothesis> {
        self.candidates.iter().find(|h| h.atbma.mode == mode)
    }

    pub fn relation(&self, from: &str, to: &str) -> Option<RelationSet> {
        self.relations.iter().find(|r| r.from == from && r.to == to).map(|r| r.relation)
    }

    pub fn associated_observations(&self) -> BTreeSet<Observation> {
        self.candidates.iter().flat_map(|h| h.associated_observations()).collect()
    }

    fn sort_key(&self) -> (Vec<String>, Vec<String>) {
        let cands = self
            .atbmas()
            .map(|a| {
                let anchors: Vec<String> = a.anchors.iter().map(Anchor::to_string).collect();
                format!("{}:{}", a.mode, anchors.join(","))
            })
            .chain(self.candidates.iter().map(|h| {
                h.covered_aobs().map(|a| a.extent.as_str()).collect::<Vec<_>>().join(",")
            }))
            .collect();
        (self.path.clone(), cands)
    }
}

fn extent_of<'k>(kb: &'k KnowledgeBase, mode: &str) -> Result<&'k str, SiaError> {
    kb.model(mode).map(|m| m.extent.as_str()).ok_or_else(|| SiaError::UnknownNode(mode.to_string()))
}

/// Mode extents of `path` with the graph's relations between neighbours.
fn path_edges(kb: &KnowledgeBase, path: &[String], net: &mut SiaNetwork) -> Result<(), SiaError> {
    for mode in path {
        net.add_variable(extent_of(kb, mode)?)?;
    }
    for w in path.windows(2) {
        if let Some(r) = kb.graph.edge(&w[0], &w[1]) {
            net.constrain_ids(extent_of(kb, &w[0])?, extent_of(kb, &w[1])?, r)?;
        }
    }
    Ok(())
}

fn relations_between(net: &SiaNetwork, extents: &[&str]) -> Result<Vec<ModeRelation>, SiaError> {
    let solved = net.solve()?;
    extents
        .windows(2)
        .map(|w| {
            Ok(ModeRelation { from: w[0].to_string(), to: w[1].to_string(), relation: solved.relation_ids(w[0], w[1])? })
        })
        .collect()
}

impl<'a> Engine<'a> {
    /// Abstract temporal diagnoses over every path of the mode graph, in
    /// canonical order.
    pub fn atd(&self, max_path_len: Option<usize>) -> Vec<Diagnosis> {
        let uncovered = self.positive_observations();
        if uncovered.is_empty() {
            return vec![Diagnosis::default()];
        }
        let mut out = Vec::new();
        for path in enumerate_paths(&self.kb.graph, max_path_len) {
            log::debug!("atd: path {}", path.join(" -> "));
            self.explore(&path, 0, &mut Vec::new(), &uncovered, &mut out);
        }
        out.sort_by_key(Diagnosis::sort_key);
        out.dedup_by(|a, b| a.sort_key() == b.sort_key());
        out
    }

    fn explore(
        &self,
        path: &[String],
        i: usize,
        accepted: &mut Vec<Hypothesis>,
        uncovered: &BTreeSet<Observation>,
        out: &mut Vec<Diagnosis>,
    ) {
        if uncovered.is_empty() {
            if let Ok(d) = self.diagnosis(&path[..i], accepted) {
                out.push(d);
            }
            return;
        }
        if i == path.len() {
            return;
        }
        let fitting: Vec<Hypothesis> = self
            .candidates(&path[i])
            .into_iter()
            .filter(|h| self.fits_path(&path[..=i], accepted, h))
            .collect();
        if fitting.is_empty() {
            log::debug!("atd: no candidate of {} fits", path[i]);
            self.explore(path, i + 1, accepted, uncovered, out);
            return;
        }
        for h in fitting {
            let rest = uncovered - &h.associated_observations();
            accepted.push(h);
            self.explore(path, i + 1, accepted, &rest, out);
            accepted.pop();
        }
    }

    fn path_network(&self, path: &[String], accepted: &[Hypothesis]) -> Result<SiaNetwork, SiaError> {
        let mut net = SiaNetwork::new();
        for h in accepted {
            net.merge(&h.network)?;
        }
        path_edges(self.kb, path, &mut net)?;
        Ok(net)
    }

    fn fits_path(&self, path: &[String], accepted: &[Hypothesis], h: &Hypothesis) -> bool {
        let mut all = accepted.to_vec();
        all.push(h.clone());
        self.path_network(path, &all).is_ok_and(|net| self.possible(&net))
    }

    fn diagnosis(&self, path: &[String], accepted: &[Hypothesis]) -> Result<Diagnosis, SiaError> {
        let net = self.path_network(path, accepted)?;
        let extents: Vec<&str> = accepted.iter().map(|h| h.atbma.extent.as_str()).collect();
        Ok(Diagnosis {
            path: path.to_vec(),
            candidates: accepted.to_vec(),
            relations: relations_between(&net, &extents)?,
            completed: Vec::new(),
        })
    }

    /// Adds the path's modes lying between two present modes, each over the
    /// gap between them, while the whole network stays consistent.
    pub fn complete(&self, d: &Diagnosis) -> Diagnosis {
        let mut out = d.clone();
        let Ok(mut net) = self.path_network(&d.path, &d.candidates) else {
            return out;
        };
        let present: Vec<usize> = d
            .path
            .iter()
            .enumerate()
            .filter(|(_, m)| d.candidate(m).is_some())
            .map(|(k, _)| k)
            .collect();
        let mut order: Vec<(usize, String)> =
            d.candidates.iter().filter_map(|h| Some((d.path.iter().position(|m| *m == h.atbma.mode)?, h.atbma.extent.clone()))).collect();
        for w in present.windows(2) {
            let prev = d.candidate(&d.path[w[0]]).and_then(|h| h.atbma.window);
            let next = d.candidate(&d.path[w[1]]).and_then(|h| h.atbma.window);
            let gap = match (prev, next) {
                (Some(p), Some(n)) if p.e_lo < n.s_hi => Some((p.e_lo, n.s_hi)),
                _ => None,
            };
            for k in w[0] + 1..w[1] {
                if let Some((atbma, grown)) = self.fill_gap(&net, &d.path[k], gap) {
                    log::debug!("complete: added {}", atbma.mode);
                    order.push((k, atbma.extent.clone()));
                    out.completed.push(atbma);
                    net = grown;
                }
            }
        }
        order.sort();
        let extents: Vec<&str> = order.iter().map(|(_, e)| e.as_str()).collect();
        if let Ok(rel) = relations_between(&net, &extents) {
            out.relations = rel;
        }
        out
    }

    fn fill_gap(&self, net: &SiaNetwork, mode: &str, gap: Option<(Time, Time)>) -> Option<(Atbma, SiaNetwork)> {
        let cm = self.consistency_model(mode)?;
        let mut base = net.clone();
        let anchor = match gap {
            Some((lo, hi)) => Some((base.add_anchor(lo, hi).ok()?, lo, hi)),
            None => None,
        };
        let free = consistency_network(cm, &[], &[], None).ok()?;
        base.merge(&free).ok()?;
        if !self.possible(&base) {
            return None;
        }
        let near = |a: &AbstractObservation| match gap {
            Some((Time::At(lo), _)) if a.last_time() < lo => distance(a.last_time(), lo),
            Some((_, Time::At(hi))) if a.first_time() > hi => distance(a.first_time(), hi),
            _ => Default::default(),
        };
        let mut negatives: Vec<Binding> = Vec::new();
        let mut grown = base;
        for m in &cm.closed_world {
            let mut options: Vec<&AbstractObservation> =
                self.aobs.iter().filter(|a| a.parameter == m.parameter && a.value == m.value).collect();
            if options.is_empty() {
                continue;
            }
            options.sort_by_key(|a| (near(a), a.first_time()));
            let (chosen, next) = options.into_iter().find_map(|a| {
                let mut trial = negatives.clone();
                trial.push(Binding { manifestation: m.clone(), aobs: a.clone() });
                let mut n = net.clone();
                if let Some((_, lo, hi)) = anchor {
                    n.add_anchor(lo, hi).ok()?;
                }
                n.merge(&consistency_network(cm, &[], &trial, None).ok()?).ok()?;
                self.possible(&n).then_some((a, n))
            })?;
            negatives.push(Binding { manifestation: m.clone(), aobs: chosen.clone() });
            grown = next;
        }
        let t = grown.require(&cm.extent).ok()?;
        let solved = grown.solve().ok()?;
        let anchors = anchor.map(|(g, lo, hi)| vec![Anchor::new(solved.relation(t, g), lo, hi)]).unwrap_or_default();
        let window = windows_of(&grown, &cm.extent).ok();
        let atbma = Atbma {
            mode: cm.mode.clone(),
            component: cm.component.clone(),
            extent: cm.extent.clone(),
            anchors,
            window,
            durations: Vec::new(),
        };
        Some((atbma, grown))
    }
}

/// Every positive observation is associated with some candidate.
pub fn verify_coverage(d: &Diagnosis, positives: &BTreeSet<Observation>) -> bool {
    positives.is_subset(&d.associated_observations())
}

/// Consistency models of all candidates, rebuilt from their bindings.
fn rebuilt(d: &Diagnosis, kb: &KnowledgeBase) -> Result<SiaNetwork, SiaError> {
    let mut net = SiaNetwork::new();
    for h in &d.candidates {
        let cm = kb.consistency_model(&h.atbma.mode).map_err(|e| SiaError::Malformed(e.to_string()))?;
        net.merge(&consistency_network(&cm, &h.covered, &h.negatives, h.covering)?)?;
    }
    Ok(net)
}

/// The candidates' consistency models hold together.
pub fn verify_possible(d: &Diagnosis, kb: &KnowledgeBase) -> bool {
    rebuilt(d, kb).is_ok_and(|net| net.is_consistent())
}

/// The candidates with their windows and the path relations are consistent,
/// and every recorded duration bound can still be met.
pub fn verify_path(d: &Diagnosis, kb: &KnowledgeBase) -> bool {
    let check = || -> Result<bool, SiaError> {
        let mut net = rebuilt(d, kb)?;
        for h in &d.candidates {
            if let Some(w) = &h.atbma.window {
                bound_by_window(&mut net, &h.atbma.extent, w)?;
                for b in &h.atbma.durations {
                    if !w.min_duration().is_some_and(|m| m < Time::At(b.bound)) {
                        return Ok(false);
                    }
                }
            }
        }
        path_edges(kb, &d.path, &mut net)?;
        Ok(net.is_consistent())
    };
    check().unwrap_or(false)
}
