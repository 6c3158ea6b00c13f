use std::fmt::Write;

use serde::{Deserialize, Serialize};
use tempdx_core::engine::{Atbma, Diagnosis, Stats};
use tempdx_core::observations::AbstractObservation;
use tempdx_core::time::format_rational;

/// Everything `diagnose` prints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisReport {
    pub diagnoses: Vec<Diagnosis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aobs: Option<Vec<AbstractObservation>>,
    pub stats: RunStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub observations: usize,
    pub positive_observations: usize,
    pub abstract_observations: usize,
    #[serde(flatten)]
    pub engine: Stats,
}

fn anchors(a: &Atbma) -> String {
    let mut parts: Vec<String> = a.anchors.iter().map(ToString::to_string).collect();
    parts.extend(a.durations.iter().map(|d| format!("{} < {}", d.subject, format_rational(&d.bound))));
    parts.join(" ")
}

pub fn aobs_line(a: &AbstractObservation) -> String {
    let anchors: Vec<String> = a.anchors.iter().map(ToString::to_string).collect();
    format!("{} {}", a.extent, anchors.join(" "))
}

pub fn render_text(report: &DiagnosisReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    if let Some(aobs) = &report.aobs {
        writeln!(w, "abstract observations:").unwrap();
        for a in aobs {
            writeln!(w, "  {}", aobs_line(a)).unwrap();
        }
        w.push('\n');
    }
    if report.diagnoses.is_empty() {
        writeln!(w, "no diagnosis").unwrap();
    }
    for (k, d) in report.diagnoses.iter().enumerate() {
        if d.candidates.is_empty() {
            writeln!(w, "diagnosis {}: nothing to explain", k + 1).unwrap();
            continue;
        }
        writeln!(w, "diagnosis {}: {}", k + 1, d.path.join(" -> ")).unwrap();
        for h in &d.candidates {
            let a = &h.atbma;
            writeln!(w, "  {}({}, {}) {}", a.mode, a.component, a.extent, anchors(a)).unwrap();
            if let Some(win) = &a.window {
                writeln!(w, "    window {win}").unwrap();
            }
            let covered: Vec<&str> = h.covered_aobs().map(|a| a.extent.as_str()).collect();
            writeln!(w, "    covers {}", covered.join(", ")).unwrap();
        }
        for a in &d.completed {
            writeln!(w, "  added {}({}, {}) {}", a.mode, a.component, a.extent, anchors(a)).unwrap();
        }
        for r in &d.relations {
            writeln!(w, "  {} {} {}", r.from, r.relation, r.to).unwrap();
        }
    }
    let s = &report.stats;
    writeln!(
        w,
        "\n{} observations ({} positive), {} abstract observations, {} candidates, {} Necessary and {} Possible checks, {} splits",
        s.observations,
        s.positive_observations,
        s.abstract_observations,
        s.engine.candidates,
        s.engine.necessary_calls,
        s.engine.possible_calls,
        s.engine.splits
    )
    .unwrap();
    out
}
