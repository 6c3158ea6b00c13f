use std::ops::RangeInclusive;

use crate::model::BehavioralModel;
use crate::observations::AbstractObservation;
use crate::sia::{Constraint, End, EndpointEncoding, MinimalNetwork, PointRelation, SiaError};

use super::{anchor_labels, bump, instantiate_network, Atbma, Binding, Engine, Hypothesis};

/// Abductive hypotheses of one mode, one per surviving combination.
pub struct Abduction<'e, 'a> {
    engine: &'e Engine<'a>,
    bm: &'a BehavioralModel,
    combos: std::vec::IntoIter<Vec<Binding>>,
}

impl Iterator for Abduction<'_, '_> {
    type Item = Hypothesis;

    fn next(&mut self) -> Option<Hypothesis> {
        for mut caobs in self.combos.by_ref() {
            log::debug!("abduction {}: trying {}", self.bm.mode, describe(&caobs));
            loop {
                if self.engine.covers(self.bm, &caobs) {
                    break;
                }
                match self.engine.split(self.bm, &caobs) {
                    Some(next) => caobs = next,
                    None => {
                        caobs.clear();
                        break;
                    }
                }
            }
            if caobs.is_empty() {
                continue;
            }
            match self.engine.instantiate(self.bm, &caobs) {
                Ok(h) => {
                    bump(&self.engine.counters.hypotheses);
                    return Some(h);
                }
                Err(e) => log::debug!("abduction {}: instantiation failed: {e}", self.bm.mode),
            }
        }
        None
    }
}

fn describe(caobs: &[Binding]) -> String {
    caobs.iter().map(|b| b.aobs.extent.as_str()).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Head,
    Tail,
}

impl<'a> Engine<'a> {
    /// Enumerates hypotheses for `mode`: one positive abstract observation per
    /// manifestation, earliest combinations first.
    pub fn abduction<'e>(&'e self, mode: &str) -> Option<Abduction<'e, 'a>> {
        let bm = self.kb.model(mode)?;
        let options: Vec<Vec<&AbstractObservation>> = bm
            .manifestations
            .iter()
            .map(|m| {
                self.positive_aobs()
                    .filter(|a| a.parameter == m.parameter && a.value == m.value)
                    .collect()
            })
            .collect();
        let mut combos: Vec<Vec<&AbstractObservation>> = vec![vec![]];
        for opts in &options {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    opts.iter().map(move |a| {
                        let mut next = c.clone();
                        next.push(*a);
                        next
                    })
                })
                .collect();
        }
        if bm.manifestations.is_empty() {
            combos.clear();
        }
        combos.sort_by_key(|c| {
            let firsts: Vec<_> = c.iter().map(|a| a.first_time()).collect();
            (firsts.iter().min().copied(), firsts)
        });
        let combos: Vec<Vec<Binding>> = combos
            .into_iter()
            .map(|c| {
                bm.manifestations
                    .iter()
                    .zip(c)
                    .map(|(m, a)| Binding { manifestation: m.clone(), aobs: a.clone() })
                    .collect()
            })
            .collect();
        Some(Abduction { engine: self, bm, combos: combos.into_iter() })
    }

    /// Whether the model's relations among the manifestations are necessarily
    /// true given the observed relations among the bound observations.
    pub fn covers(&self, bm: &BehavioralModel, caobs: &[Binding]) -> bool {
        let Ok(c) = bm.network() else {
            return false;
        };
        let mut phi = Vec::new();
        for (i, x) in caobs.iter().enumerate() {
            for y in &caobs[i + 1..] {
                let rel = self.observed_relation(&x.aobs, &y.aobs);
                phi.push(Constraint::new(&x.manifestation.extent, &y.manifestation.extent, rel));
            }
        }
        self.necessary(&c, &phi)
    }

    /// Shrinks the observations on every violated pair, one pair after
    /// another. `None` when some violated pair cannot be shrunk.
    pub fn split(&self, bm: &BehavioralModel, caobs: &[Binding]) -> Option<Vec<Binding>> {
        let model = bm.network().ok()?.solve().ok()?;
        let mut cur = caobs.to_vec();
        let mut changed = false;
        for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                let mi = model.node_index(&cur[i].manifestation.extent)?;
                let mj = model.node_index(&cur[j].manifestation.extent)?;
                let want = model.relation(mi, mj);
                let (have, observed) = self.observed_pair(&cur[i].aobs, &cur[j].aobs);
                if want.is_subset(have) {
                    continue;
                }
                let options = split_options(&model.encoding(mi, mj), &observed);
                let options: Vec<(usize, Side)> = options
                    .into_iter()
                    .map(|(x, side)| (if x { i } else { j }, side))
                    .filter(|&(k, _)| cur[k].aobs.covered.len() > 1)
                    .collect();
                let Some(&first) = options.first() else {
                    log::debug!("split {}: no shrink for {} / {}", bm.mode, cur[i].aobs.extent, cur[j].aobs.extent);
                    return None;
                };
                let chosen = self.repair(&model, &cur, (i, j), (mi, mj), &options).unwrap_or_else(|| {
                    let (k, side) = first;
                    let range = keep_ranges(cur[k].aobs.covered.len(), side).next().unwrap();
                    (k, self.table.split(&cur[k].aobs, range).unwrap())
                });
                log::debug!("split {}: {} -> {}", bm.mode, cur[chosen.0].aobs.extent, chosen.1.extent);
                bump(&self.counters.splits);
                cur[chosen.0].aobs = chosen.1;
                changed = true;
            }
        }
        changed.then_some(cur)
    }

    /// First shrink, over all options and largest keep first, after which
    /// the pair's observed relation admits the model's.
    fn repair(
        &self,
        model: &MinimalNetwork,
        cur: &[Binding],
        (i, j): (usize, usize),
        (mi, mj): (usize, usize),
        options: &[(usize, Side)],
    ) -> Option<(usize, AbstractObservation)> {
        let want = model.relation(mi, mj);
        for &(k, side) in options {
            for range in keep_ranges(cur[k].aobs.covered.len(), side) {
                let Ok(shrunk) = self.table.split(&cur[k].aobs, range) else {
                    continue;
                };
                let (x, y) = if k == i { (&shrunk, &cur[j].aobs) } else { (&cur[i].aobs, &shrunk) };
                if want.is_subset(self.observed_pair(x, y).0) {
                    return Some((k, shrunk));
                }
            }
        }
        None
    }

    /// Binds the matched observations into the model and reads off the mode
    /// extent's relation to every grounded interval.
    pub fn instantiate(&self, bm: &BehavioralModel, caobs: &[Binding]) -> Result<Hypothesis, SiaError> {
        let bindings: Vec<_> = caobs.iter().map(|b| (b.manifestation.clone(), Some(b.aobs.clone()))).collect();
        let network = instantiate_network(bm, &bindings, false)?;
        let anchors = anchor_labels(&network, &bm.extent)?;
        Ok(Hypothesis {
            atbma: Atbma {
                mode: bm.mode.clone(),
                component: bm.component.clone(),
                extent: bm.extent.clone(),
                anchors,
                window: None,
                durations: Vec::new(),
            },
            covered: caobs.to_vec(),
            negatives: Vec::new(),
            covering: None,
            network,
        })
    }
}

/// Which extent to shrink on which side, `true` for the first of the pair.
/// Entries of the encodings read `X⁻Y⁻, X⁻Y⁺, X⁺Y⁻, X⁺Y⁺`.
fn split_options(model: &EndpointEncoding, observed: &EndpointEncoding) -> Vec<(bool, Side)> {
    const ENDS: [(End, End); 4] = [(End::Start, End::Start), (End::Start, End::End), (End::End, End::Start), (End::End, End::End)];
    let mut out = Vec::new();
    let mut push = |o: (bool, Side)| {
        if !out.contains(&o) {
            out.push(o);
        }
    };
    for (k, &(xa, yb)) in ENDS.iter().enumerate() {
        let m = model.entries()[k];
        let o = observed.entries()[k];
        let missing = PointRelation::from_bits(m.bits() & !o.bits());
        let has = |r: PointRelation| missing.bits() & r.bits() != 0;
        let decrease = has(PointRelation::LT) || (has(PointRelation::EQ) && o == PointRelation::GT);
        let increase = has(PointRelation::GT) || (has(PointRelation::EQ) && o == PointRelation::LT);
        if decrease {
            if xa == End::End {
                push((true, Side::Tail));
            }
            if yb == End::Start {
                push((false, Side::Head));
            }
        }
        if increase {
            if xa == End::Start {
                push((true, Side::Head));
            }
            if yb == End::End {
                push((false, Side::Tail));
            }
        }
    }
    out
}

/// Proper contiguous keep ranges of a run of `len` observations that drop
/// observations from one side, largest first.
fn keep_ranges(len: usize, side: Side) -> Box<dyn Iterator<Item = RangeInclusive<usize>>> {
    match side {
        Side::Tail => Box::new((0..len - 1).rev().map(|k| 0..=k)),
        Side::Head => Box::new((1..len).map(move |k| k..=len - 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keep_ranges_largest_first() {
        assert_eq!(keep_ranges(3, Side::Tail).collect::<Vec<_>>(), vec![0..=1, 0..=0]);
        assert_eq!(keep_ranges(3, Side::Head).collect::<Vec<_>>(), vec![1..=2, 2..=2]);
        assert_eq!(keep_ranges(1, Side::Head).count(), 0);
    }

    #[test]
    fn tail_shrink_for_late_end() {
        use PointRelation as P;
        // model {o, fi, di} against observed {oi, si, di}
        let model = EndpointEncoding::new([P::LT, P::LT, P::GT, P::ALL]);
        let observed = EndpointEncoding::new([P::ALL, P::LT, P::GT, P::GT]);
        assert_eq!(split_options(&model, &observed), vec![(true, Side::Tail)]);
    }
}
