use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;

use crate::model::{BehavioralModel, DurationBound, Manifestation};
use crate::observations::{AbstractObservation, Anchor};
use crate::sia::{BasicRelation, End, RelationSet, SiaError, SiaNetwork};
use crate::time::{distance, Time};

use super::window::{static_eval, StaticOutcome, Window};
use super::{anchor_labels, bound_by_window, bump, instantiate_network, Binding, Engine, Hypothesis};

/// The consistency model bound to the hypothesis' positives and the chosen
/// negatives, with the mode extent containing `covering`.
pub(crate) fn consistency_network(
    cm: &BehavioralModel,
    covered: &[Binding],
    negatives: &[Binding],
    covering: Option<Time>,
) -> Result<SiaNetwork, SiaError> {
    let bindings: Vec<(Manifestation, Option<AbstractObservation>)> = cm
        .all_manifestations()
        .map(|m| {
            let a = covered
                .iter()
                .chain(negatives)
                .find(|b| b.manifestation.extent == m.extent)
                .map(|b| b.aobs.clone());
            (m.clone(), a)
        })
        .collect();
    let mut net = instantiate_network(cm, &bindings, true)?;
    if let Some(p) = covering {
        let g = net.add_anchor(p, p)?;
        let t = net.require(&cm.extent)?;
        net.constrain(t, g, BasicRelation::Contains.into())?;
    }
    Ok(net)
}

/// Start and end windows of `extent` in `net`.
pub(crate) fn windows_of(net: &SiaNetwork, extent: &str) -> Result<Window, SiaError> {
    let solved = net.solve()?;
    let t = net.require(extent)?;
    Ok(Window::new(solved.endpoint_window(t, End::Start), solved.endpoint_window(t, End::End)))
}

/// `{oi}[s⁻, s⁺]` and `{o}[e⁻, e⁺]`, skipping single-value windows.
pub(crate) fn window_anchors(w: &Window) -> Vec<Anchor> {
    let mut out = Vec::new();
    if w.s_lo != w.s_hi {
        out.push(Anchor::new(BasicRelation::OverlappedBy.into(), w.s_lo, w.s_hi));
    }
    if w.e_lo != w.e_hi {
        out.push(Anchor::new(BasicRelation::Overlaps.into(), w.e_lo, w.e_hi));
    }
    out
}

impl<'a> Engine<'a> {
    /// Checks a hypothesis against the mode's consistency model and tightens
    /// its anchors. `None` when no choice of covered time and negative
    /// observations keeps the model possible.
    pub fn consistency(&self, h: &Hypothesis) -> Option<Hypothesis> {
        let cm = self.consistency_model(&h.atbma.mode)?;
        let span = h.span()?;
        let times: BTreeSet<Rational64> = h.associated_observations().iter().map(|o| o.time).collect();
        for p in times {
            let covering = Some(Time::At(p));
            let Ok(base) = consistency_network(cm, &h.covered, &[], covering) else {
                continue;
            };
            if !self.possible(&base) {
                continue;
            }
            let Some((negatives, network)) = self.fill_closed_world(cm, h, covering, span) else {
                continue;
            };
            let Ok(labels) = anchor_labels(&network, &cm.extent) else {
                continue;
            };
            let mut anchors: BTreeMap<(Time, Time), RelationSet> =
                labels.iter().map(|a| ((a.lo, a.hi), a.relation)).collect();
            for a in &h.atbma.anchors {
                if let Some(r) = anchors.get_mut(&(a.lo, a.hi)) {
                    *r = *r & a.relation;
                }
            }
            let mut atbma = h.atbma.clone();
            atbma.anchors = anchors.into_iter().map(|((lo, hi), r)| Anchor::new(r, lo, hi)).collect();
            log::debug!("consistency {}: possible covering {}", cm.mode, Time::At(p));
            return Some(Hypothesis { atbma, covered: h.covered.clone(), negatives, covering, network });
        }
        log::debug!("consistency {}: rejected", cm.mode);
        None
    }

    /// Binds each closed-world manifestation to the nearest negative
    /// observation that keeps the network possible. Manifestations with no
    /// negative observation stay free.
    fn fill_closed_world(
        &self,
        cm: &BehavioralModel,
        h: &Hypothesis,
        covering: Option<Time>,
        (lo, hi): (Rational64, Rational64),
    ) -> Option<(Vec<Binding>, SiaNetwork)> {
        let gap = |a: &AbstractObservation| {
            if a.last_time() < lo {
                distance(a.last_time(), lo)
            } else if a.first_time() > hi {
                distance(a.first_time(), hi)
            } else {
                Rational64::from_integer(0)
            }
        };
        let mut negatives: Vec<Binding> = Vec::new();
        for m in &cm.closed_world {
            let mut options: Vec<&AbstractObservation> =
                self.aobs.iter().filter(|a| a.parameter == m.parameter && a.value == m.value).collect();
            if options.is_empty() {
                continue;
            }
            options.sort_by_key(|a| (gap(a), a.first_time()));
            let chosen = options.into_iter().find(|a| {
                let mut trial = negatives.clone();
                trial.push(Binding { manifestation: m.clone(), aobs: (*a).clone() });
                consistency_network(cm, &h.covered, &trial, covering).is_ok_and(|net| self.possible(&net))
            })?;
            negatives.push(Binding { manifestation: m.clone(), aobs: chosen.clone() });
        }
        let network = consistency_network(cm, &h.covered, &negatives, covering).ok()?;
        Some((negatives, network))
    }

    /// Applies the mode's duration bounds to the hypothesis windows and
    /// rewrites its anchors in window form.
    pub fn static_step(&self, h: &Hypothesis) -> Option<Hypothesis> {
        let extent = &h.atbma.extent;
        let window = windows_of(&h.network, extent).ok()?;
        let bm = self.kb.model(&h.atbma.mode)?;
        let bounds: Vec<Rational64> =
            bm.durations.iter().filter(|d| &d.subject == extent).map(|d| d.bound).collect();
        let StaticOutcome::Tightened { window, recorded } = static_eval(window, &bounds) else {
            log::debug!("static {}: duration violated", h.atbma.mode);
            return None;
        };
        let mut network = h.network.clone();
        bound_by_window(&mut network, extent, &window).ok()?;
        if !network.is_consistent() {
            log::debug!("static {}: tightened window {window} inconsistent", h.atbma.mode);
            return None;
        }
        let mut out = h.clone();
        out.atbma.anchors = window_anchors(&window);
        out.atbma.window = Some(window);
        out.atbma.durations =
            recorded.into_iter().map(|bound| DurationBound { subject: extent.clone(), bound }).collect();
        out.network = network;
        Some(out)
    }

    /// Every candidate of `mode`: abduction, consistency and the static step
    /// in turn. Sorted by covered span, then covered extents.
    pub fn candidates(&self, mode: &str) -> Vec<Hypothesis> {
        if let Some(c) = self.candidates.borrow().get(mode) {
            return c.clone();
        }
        let mut out: Vec<Hypothesis> = Vec::new();
        for h in self.abduction(mode).into_iter().flatten() {
            let Some(h) = self.consistency(&h).and_then(|h| self.static_step(&h)) else {
                continue;
            };
            if !out.contains(&h) {
                bump(&self.counters.candidates);
                out.push(h);
            }
        }
        out.sort_by(|a, b| {
            let key = |h: &Hypothesis| (h.span(), h.covered_aobs().map(|a| a.extent.clone()).collect::<Vec<_>>());
            key(a).cmp(&key(b))
        });
        self.candidates.borrow_mut().insert(mode.to_string(), out.clone());
        out
    }
}
