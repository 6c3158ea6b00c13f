//! Behavioral knowledge base: abductive models, derived consistency models,
//! the mode constraint graph, and the model file format.
//!
//! ```text
//! param hbs_ag values p n complement p=n
//! mode incubation component b extent t_in
//!   anchor t_in {o} t_hbs
//!   pattern hbs_ag(p,t_hbs) {o, fi, di} hbe_ag(p,t_hbe)
//!   manifest anti_hbc(p,t_hbc)
//!   duration t_in < 3
//! end
//! sigma+ hbs_ag hbe_ag
//! sigma- hbs_ag hbe_ag
//! graph start incubation
//! edge incubation {m} acute2
//! ```
//!
//! `complement a=b` makes `b` the closed-world negation of `a`; the first pair
//! is the one used when a model is closed. `#` starts a comment.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sia::{BasicRelation, Constraint, RelationSet, SiaError, SiaNetwork};
use crate::time::{format_rational, parse_rational, rational_serde};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("value `{value}` is not in the domain of `{parameter}`")]
    UnknownValue { parameter: String, value: String },
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
    #[error("unknown extent `{0}`")]
    UnknownExtent(String),
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
    #[error("relation set {0} is not SIA-encodable")]
    NotSia(RelationSet),
    #[error("the temporal network of mode `{0}` is inconsistent")]
    Inconsistent(String),
    #[error("duration bound of `{0}` must be positive")]
    NonPositiveDuration(String),
    #[error("parameter `{0}` has no complement value")]
    ComplementUndefined(String),
    #[error("{0}")]
    Network(#[from] SiaError),
}

/// A model error, anchored to a line when it came from a file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ModelError {
    pub line: Option<usize>,
    pub kind: ModelErrorKind,
}

impl std::fmt::Display for ModelError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

impl From<ModelErrorKind> for ModelError {
    fn from(kind: ModelErrorKind) -> Self {
        ModelError { line: None, kind }
    }
}

impl From<SiaError> for ModelError {
    fn from(e: SiaError) -> Self {
        ModelErrorKind::Network(e).into()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub values: Vec<String>,
    /// Pairs `(value, negation)` in declaration order.
    pub complement: Vec<(String, String)>,
}

impl Parameter {
    /// Value asserted by the closed-world assumption for this parameter.
    pub fn negative_value(&self) -> Option<&str> {
        self.complement.first().map(|(_, n)| n.as_str())
    }
}

/// `parameter(value, extent)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Manifestation {
    pub parameter: String,
    pub value: String,
    pub extent: String,
}

impl Manifestation {
    pub fn new(parameter: impl Into<String>, value: impl Into<String>, extent: impl Into<String>) -> Self {
        Manifestation { parameter: parameter.into(), value: value.into(), extent: extent.into() }
    }
}

impl std::fmt::Display for Manifestation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({},{})", self.parameter, self.value, self.extent)
    }
}

/// `subject < bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DurationBound {
    pub subject: String,
    #[serde(with = "rational_serde")]
    pub bound: Rational64,
}

/// `mode(component, extent) ∧ anchors → patterns ∧ durations`.
///
/// Abductive models have no closed-world manifestations; derived consistency
/// models list them separately so they can be matched against negative data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehavioralModel {
    pub mode: String,
    pub component: String,
    pub extent: String,
    pub manifestations: Vec<Manifestation>,
    pub closed_world: Vec<Manifestation>,
    /// C(t): constraints from the mode extent to manifestation extents.
    pub anchors: Vec<Constraint>,
    /// B_t: constraints among manifestation extents.
    pub patterns: Vec<Constraint>,
    /// B_s.
    pub durations: Vec<DurationBound>,
}

impl BehavioralModel {
    pub fn new(mode: impl Into<String>, component: impl Into<String>, extent: impl Into<String>) -> Self {
        BehavioralModel {
            mode: mode.into(),
            component: component.into(),
            extent: extent.into(),
            manifestations: Vec::new(),
            closed_world: Vec::new(),
            anchors: Vec::new(),
            patterns: Vec::new(),
            durations: Vec::new(),
        }
    }

    pub fn all_manifestations(&self) -> impl Iterator<Item = &Manifestation> {
        self.manifestations.iter().chain(&self.closed_world)
    }

    pub fn manifestation(&self, extent: &str) -> Option<&Manifestation> {
        self.all_manifestations().find(|m| m.extent == extent)
    }

    fn add_manifestation(&mut self, m: Manifestation) -> Result<(), ModelErrorKind> {
        match self.manifestation(&m.extent) {
            Some(old) if *old != m => Err(ModelErrorKind::Duplicate(m.extent)),
            Some(_) => Ok(()),
            None if m.extent == self.extent => Err(ModelErrorKind::Duplicate(m.extent)),
            None => {
                self.manifestations.push(m);
                Ok(())
            }
        }
    }

    /// SIA-BM: the mode extent, every manifestation extent, C(t) and B_t.
    pub fn network(&self) -> Result<SiaNetwork, SiaError> {
        let mut net = SiaNetwork::new();
        net.add_variable(self.extent.clone())?;
        for m in self.all_manifestations() {
            net.add_variable(m.extent.clone())?;
        }
        for c in self.anchors.iter().chain(&self.patterns) {
            net.apply(c)?;
        }
        Ok(net)
    }

    fn uses_parameter(&self, p: &str) -> bool {
        self.all_manifestations().any(|m| m.parameter == p)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaSets {
    pub sigma_plus: BTreeSet<String>,
    pub sigma_minus: BTreeSet<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeConstraintGraph {
    pub start: Vec<String>,
    pub edges: Vec<(String, String, RelationSet)>,
}

impl ModeConstraintGraph {
    pub fn modes(&self) -> BTreeSet<&str> {
        let mut out: BTreeSet<&str> = self.start.iter().map(String::as_str).collect();
        for (a, b, _) in &self.edges {
            out.insert(a);
            out.insert(b);
        }
        out
    }

    /// Label of the edge `from → to`, if any.
    pub fn edge(&self, from: &str, to: &str) -> Option<RelationSet> {
        self.edges.iter().find(|(a, b, _)| a == from && b == to).map(|e| e.2)
    }

    fn successors(&self, mode: &str) -> BTreeSet<&str> {
        self.edges.iter().filter(|(a, _, _)| a == mode).map(|(_, b, _)| b.as_str()).collect()
    }
}

/// Orders mode sequences lexicographically, a longer path before its prefix.
pub fn path_order(a: &[String], b: &[String]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    b.len().cmp(&a.len())
}

/// All simple paths from a start mode, at most `max_len` modes long.
pub fn enumerate_paths(g: &ModeConstraintGraph, max_len: Option<usize>) -> Vec<Vec<String>> {
    fn walk(g: &ModeConstraintGraph, path: &mut Vec<String>, max: usize, out: &mut Vec<Vec<String>>) {
        out.push(path.clone());
        if path.len() >= max {
            return;
        }
        let last = path[path.len() - 1].clone();
        for next in g.successors(&last) {
            if !path.iter().any(|m| m == next) {
                path.push(next.to_string());
                walk(g, path, max, out);
                path.pop();
            }
        }
    }
    let max = max_len.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    let starts: BTreeSet<&String> = g.start.iter().collect();
    if max == 0 {
        return out;
    }
    for s in starts {
        walk(g, &mut vec![s.clone()], max, &mut out);
    }
    out.sort_by(|a, b| path_order(a, b));
    out.dedup();
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub parameters: Vec<Parameter>,
    pub models: Vec<BehavioralModel>,
    pub sigma: SigmaSets,
    pub graph: ModeConstraintGraph,
}

impl KnowledgeBase {
    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn model(&self, mode: &str) -> Option<&BehavioralModel> {
        self.models.iter().find(|m| m.mode == mode)
    }

    pub fn consistency_model(&self, mode: &str) -> Result<BehavioralModel, ModelError> {
        let bm = self.model(mode).ok_or_else(|| ModelErrorKind::UnknownMode(mode.to_string()))?;
        derive_consistency_model(bm, &self.sigma, &self.parameters)
    }

    /// Whether some abductive model predicts this parameter value; such
    /// observations are the ones a diagnosis must explain.
    pub fn is_abnormal(&self, parameter: &str, value: &str) -> bool {
        self.models
            .iter()
            .flat_map(|m| &m.manifestations)
            .any(|m| m.parameter == parameter && m.value == value)
    }

    pub fn allows(&self, parameter: &str, value: &str) -> bool {
        self.parameter(parameter).is_some_and(|p| p.values.iter().any(|v| v == value))
    }
}

/// `Nec(BM⁺, Σ⁺) ⊎ CWA(BM⁺, Σ⁻)`.
///
/// The necessary part keeps the manifestations whose parameter is in Σ⁺. The
/// closed-world part adds, for each Σ⁻ parameter the model does not mention,
/// its negative value over an extent the mode extent lies during, with `cont`
/// among all added negatives.
pub fn derive_consistency_model(
    bm: &BehavioralModel,
    sig: &SigmaSets,
    params: &[Parameter],
) -> Result<BehavioralModel, ModelError> {
    let mut out = BehavioralModel::new(&bm.mode, &bm.component, &bm.extent);
    out.manifestations = bm
        .manifestations
        .iter()
        .filter(|m| sig.sigma_plus.contains(&m.parameter))
        .cloned()
        .collect();
    let kept: BTreeSet<&str> = out
        .manifestations
        .iter()
        .map(|m| m.extent.as_str())
        .chain([bm.extent.as_str()])
        .collect();
    let keep = |c: &&Constraint| kept.contains(c.from.as_str()) && kept.contains(c.to.as_str());
    out.anchors = bm.anchors.iter().filter(keep).cloned().collect();
    out.patterns = bm.patterns.iter().filter(keep).cloned().collect();
    out.durations = bm.durations.clone();

    for p in &sig.sigma_minus {
        if bm.uses_parameter(p) {
            continue;
        }
        let param = params
            .iter()
            .find(|q| &q.name == p)
            .ok_or_else(|| ModelErrorKind::UnknownParameter(p.clone()))?;
        let neg = param
            .negative_value()
            .ok_or_else(|| ModelErrorKind::ComplementUndefined(p.clone()))?;
        let m = Manifestation::new(p, neg, format!("{}_{}_{}", bm.extent, p, neg));
        out.anchors.push(Constraint::new(&bm.extent, &m.extent, BasicRelation::During.into()));
        for other in &out.closed_world {
            out.patterns.push(Constraint::new(&other.extent, &m.extent, RelationSet::CONT));
        }
        out.closed_world.push(m);
    }
    Ok(out)
}

fn syntax(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError { line: Some(line), kind: ModelErrorKind::Syntax(msg.into()) }
}

fn at(line: usize, kind: ModelErrorKind) -> ModelError {
    ModelError { line: Some(line), kind }
}

/// Splits `left {rels} right` around the braced relation set.
fn split_relation(s: &str, line: usize) -> Result<(&str, RelationSet, &str), ModelError> {
    let open = s.find('{').ok_or_else(|| syntax(line, "expected a relation set `{...}`"))?;
    let close = s[open..].find('}').map(|k| open + k).ok_or_else(|| syntax(line, "unterminated `{`"))?;
    let rel: RelationSet = s[open..=close].parse().map_err(|e: SiaError| at(line, ModelErrorKind::Network(e)))?;
    if !rel.is_sia() {
        return Err(at(line, ModelErrorKind::NotSia(rel)));
    }
    Ok((s[..open].trim(), rel, s[close + 1..].trim()))
}

fn parse_manifestation(s: &str, line: usize) -> Result<Manifestation, ModelError> {
    let bad = || syntax(line, format!("expected `param(value,extent)`, found `{s}`"));
    let s = s.trim();
    let open = s.find('(').ok_or_else(bad)?;
    let body = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let (value, extent) = body.split_once(',').ok_or_else(bad)?;
    let (p, v, e) = (s[..open].trim(), value.trim(), extent.trim());
    if p.is_empty() || v.is_empty() || e.is_empty() || p.contains(char::is_whitespace) {
        return Err(bad());
    }
    Ok(Manifestation::new(p, v, e))
}

fn ident(s: &str, line: usize, what: &str) -> Result<String, ModelError> {
    let s = s.trim();
    if s.is_empty() || s.contains(char::is_whitespace) || s.contains(['{', '}', '(', ')']) {
        return Err(syntax(line, format!("expected {what}, found `{s}`")));
    }
    Ok(s.to_string())
}

/// Parses a model file and validates it.
pub fn parse_model(text: &str) -> Result<KnowledgeBase, ModelError> {
    let mut kb = KnowledgeBase::default();
    let mut lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut current: Option<(BehavioralModel, usize)> = None;

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        if let Some((bm, _)) = current.as_mut() {
            match kw {
                "anchor" => {
                    let (from, rel, to) = split_relation(rest, line)?;
                    bm.anchors.push(Constraint::new(ident(from, line, "an extent")?, ident(to, line, "an extent")?, rel));
                }
                "pattern" => {
                    let (l, rel, r) = split_relation(rest, line)?;
                    let (l, r) = (parse_manifestation(l, line)?, parse_manifestation(r, line)?);
                    bm.patterns.push(Constraint::new(&l.extent, &r.extent, rel));
                    bm.add_manifestation(l).map_err(|k| at(line, k))?;
                    bm.add_manifestation(r).map_err(|k| at(line, k))?;
                }
                "manifest" => {
                    let m = parse_manifestation(rest, line)?;
                    bm.add_manifestation(m).map_err(|k| at(line, k))?;
                }
                "duration" => {
                    let (subject, bound) = rest.split_once('<').ok_or_else(|| syntax(line, "expected `duration <t> < <d>`"))?;
                    let bound = parse_rational(bound).map_err(|e| syntax(line, e.to_string()))?;
                    bm.durations.push(DurationBound { subject: ident(subject, line, "an extent")?, bound });
                }
                "end" if rest.is_empty() => {
                    let (bm, start) = current.take().expect("inside a mode block");
                    lines.insert(format!("mode:{}", bm.mode), start);
                    kb.models.push(bm);
                }
                other => return Err(syntax(line, format!("unexpected `{other}` inside a mode block"))),
            }
            continue;
        }
        let words: Vec<&str> = rest.split_whitespace().collect();
        match kw {
            "param" => {
                let name = words.first().ok_or_else(|| syntax(line, "missing parameter name"))?;
                let mut values = Vec::new();
                let mut complement = Vec::new();
                let mut section = "";
                for w in &words[1..] {
                    match *w {
                        "values" | "complement" => section = w,
                        _ if section == "values" => values.push(w.to_string()),
                        _ if section == "complement" => {
                            let (a, b) = w.split_once('=').ok_or_else(|| syntax(line, format!("expected `a=b`, found `{w}`")))?;
                            complement.push((a.to_string(), b.to_string()));
                        }
                        _ => return Err(syntax(line, format!("unexpected `{w}`"))),
                    }
                }
                if values.is_empty() {
                    return Err(syntax(line, "parameter needs at least one value"));
                }
                if kb.parameter(name).is_some() {
                    return Err(at(line, ModelErrorKind::Duplicate(name.to_string())));
                }
                lines.insert(format!("param:{name}"), line);
                kb.parameters.push(Parameter { name: name.to_string(), values, complement });
            }
            "mode" => {
                let [name, "component", component, "extent", extent] = words.as_slice() else {
                    return Err(syntax(line, "expected `mode <name> component <c> extent <t>`"));
                };
                current = Some((BehavioralModel::new(*name, *component, *extent), line));
            }
            "sigma+" | "sigma-" => {
                let set = if kw == "sigma+" { &mut kb.sigma.sigma_plus } else { &mut kb.sigma.sigma_minus };
                for w in &words {
                    lines.entry(format!("{kw}:{w}")).or_insert(line);
                    set.insert(w.to_string());
                }
            }
            "graph" => match words.as_slice() {
                ["start", modes @ ..] if !modes.is_empty() => {
                    for m in modes {
                        lines.entry(format!("graph:{m}")).or_insert(line);
                        kb.graph.start.push(m.to_string());
                    }
                }
                ["edge", ..] => parse_edge(&mut kb.graph, &mut lines, rest["edge".len()..].trim(), line)?,
                _ => return Err(syntax(line, "expected `graph start <mode>` or `graph edge ...`")),
            },
            "edge" => parse_edge(&mut kb.graph, &mut lines, rest, line)?,
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    if let Some((_, start)) = current {
        return Err(syntax(start, "mode block is missing `end`"));
    }
    for bm in &kb.models {
        validate_behavioral_model(&kb, bm).map_err(|e| ModelError {
            line: e.line.or_else(|| lines.get(&format!("mode:{}", bm.mode)).copied()),
            kind: e.kind,
        })?;
    }
    validate_model(&kb).map_err(|e| match e.line {
        Some(_) => e,
        None => ModelError { line: locate(&e.kind, &lines), kind: e.kind },
    })?;
    Ok(kb)
}

fn parse_edge(g: &mut ModeConstraintGraph, lines: &mut BTreeMap<String, usize>, s: &str, line: usize) -> Result<(), ModelError> {
    let (a, rel, b) = split_relation(s, line)?;
    let (a, b) = (ident(a, line, "a mode")?, ident(b, line, "a mode")?);
    lines.entry(format!("graph:{a}")).or_insert(line);
    lines.entry(format!("graph:{b}")).or_insert(line);
    lines.entry(format!("edge:{a}:{b}")).or_insert(line);
    g.edges.push((a, b, rel));
    Ok(())
}

fn locate(kind: &ModelErrorKind, lines: &BTreeMap<String, usize>) -> Option<usize> {
    let key = match kind {
        ModelErrorKind::UnknownMode(m) => format!("graph:{m}"),
        ModelErrorKind::Inconsistent(m) => format!("mode:{m}"),
        ModelErrorKind::Duplicate(d) => format!("mode:{d}"),
        ModelErrorKind::UnknownParameter(p) => {
            return ["sigma+:", "sigma-:"].iter().find_map(|k| lines.get(&format!("{k}{p}")).copied());
        }
        _ => return None,
    };
    lines.get(&key).copied()
}

/// Checks every structural invariant of a knowledge base. Errors from a mode
/// block name the mode; file positions are attached by [`parse_model`].
pub fn validate_model(kb: &KnowledgeBase) -> Result<(), ModelError> {
    let mut modes = BTreeSet::new();
    let mut extents = BTreeSet::new();
    for bm in &kb.models {
        if !modes.insert(bm.mode.as_str()) {
            return Err(ModelErrorKind::Duplicate(bm.mode.clone()).into());
        }
        if !extents.insert(bm.extent.as_str()) {
            return Err(ModelErrorKind::Duplicate(bm.extent.clone()).into());
        }
        validate_behavioral_model(kb, bm)?;
    }
    for p in kb.sigma.sigma_plus.iter().chain(&kb.sigma.sigma_minus) {
        if kb.parameter(p).is_none() {
            return Err(ModelErrorKind::UnknownParameter(p.clone()).into());
        }
    }
    for m in kb.graph.modes() {
        if kb.model(m).is_none() {
            return Err(ModelErrorKind::UnknownMode(m.to_string()).into());
        }
    }
    for (_, _, r) in &kb.graph.edges {
        if !r.is_sia() {
            return Err(ModelErrorKind::NotSia(*r).into());
        }
    }
    Ok(())
}

fn validate_behavioral_model(kb: &KnowledgeBase, bm: &BehavioralModel) -> Result<(), ModelError> {
    let in_mode = |kind: ModelErrorKind| -> ModelError { ModelError { line: None, kind } };
    for m in bm.all_manifestations() {
        let p = kb
            .parameter(&m.parameter)
            .ok_or_else(|| in_mode(ModelErrorKind::UnknownParameter(m.parameter.clone())))?;
        if !p.values.contains(&m.value) {
            return Err(in_mode(ModelErrorKind::UnknownValue { parameter: m.parameter.clone(), value: m.value.clone() }));
        }
    }
    for c in &bm.anchors {
        if c.from != bm.extent {
            return Err(in_mode(ModelErrorKind::UnknownExtent(c.from.clone())));
        }
        if bm.manifestation(&c.to).is_none() {
            return Err(in_mode(ModelErrorKind::UnknownExtent(c.to.clone())));
        }
    }
    for c in bm.anchors.iter().chain(&bm.patterns) {
        if !c.relation.is_sia() {
            return Err(in_mode(ModelErrorKind::NotSia(c.relation)));
        }
    }
    for d in &bm.durations {
        if d.subject != bm.extent {
            return Err(in_mode(ModelErrorKind::UnknownExtent(d.subject.clone())));
        }
        if d.bound <= Rational64::from_integer(0) {
            return Err(in_mode(ModelErrorKind::NonPositiveDuration(d.subject.clone())));
        }
    }
    let net = bm.network()?;
    if !net.is_consistent() {
        return Err(ModelErrorKind::Inconsistent(bm.mode.clone()).into());
    }
    Ok(())
}

/// Renders a knowledge base in the model file format.
pub fn print_model(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    let w = &mut out;
    for p in &kb.parameters {
        write!(w, "param {} values {}", p.name, p.values.join(" ")).unwrap();
        if !p.complement.is_empty() {
            let pairs: Vec<String> = p.complement.iter().map(|(a, b)| format!("{a}={b}")).collect();
            write!(w, " complement {}", pairs.join(" ")).unwrap();
        }
        w.push('\n');
    }
    for bm in &kb.models {
        writeln!(w, "\nmode {} component {} extent {}", bm.mode, bm.component, bm.extent).unwrap();
        let mut shown = BTreeSet::new();
        for c in &bm.patterns {
            let (l, r) = (bm.manifestation(&c.from), bm.manifestation(&c.to));
            if let (Some(l), Some(r)) = (l, r) {
                writeln!(w, "  pattern {l} {} {r}", c.relation).unwrap();
                shown.insert(&l.extent);
                shown.insert(&r.extent);
            }
        }
        for m in bm.all_manifestations().filter(|m| !shown.contains(&m.extent)) {
            writeln!(w, "  manifest {m}").unwrap();
        }
        for c in &bm.anchors {
            writeln!(w, "  anchor {} {} {}", c.from, c.relation, c.to).unwrap();
        }
        for d in &bm.durations {
            writeln!(w, "  duration {} < {}", d.subject, format_rational(&d.bound)).unwrap();
        }
        w.push_str("end\n");
    }
    let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
    if !kb.sigma.sigma_plus.is_empty() {
        writeln!(w, "\nsigma+ {}", join(&kb.sigma.sigma_plus)).unwrap();
    }
    if !kb.sigma.sigma_minus.is_empty() {
        writeln!(w, "sigma- {}", join(&kb.sigma.sigma_minus)).unwrap();
    }
    if !kb.graph.start.is_empty() || !kb.graph.edges.is_empty() {
        w.push('\n');
    }
    for s in &kb.graph.start {
        writeln!(w, "graph start {s}").unwrap();
    }
    for (a, b, r) in &kb.graph.edges {
        writeln!(w, "edge {a} {r} {b}").unwrap();
    }
    out
}
