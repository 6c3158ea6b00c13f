//! Plain-text network format.
//!
//! ```text
//! # comment
//! node hbs_ag
//! node [1, 2] grounded 1 2
//! rel hbs_ag [1, 2] {oi}
//! ```
//!
//! Node ids must not contain whitespace unless they are bracketed anchor ids
//! such as `[1, 2]`.

use std::fmt::Write;

use thiserror::Error;

use super::{Constraint, NodeKind, RelationSet, SiaError, SiaNetwork};
use crate::time::Time;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

/// One parsed document: node declarations in order, then relation lines.
#[derive(Debug, Clone, Default)]
pub struct NetworkText {
    pub nodes: Vec<(String, Option<(Time, Time)>)>,
    pub constraints: Vec<Constraint>,
}

/// Splits off the next id token, treating a `[..]` group as one token.
fn take_id(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    if s.is_empty() {
        return None;
    }
    if s.starts_with('[') {
        let close = s.find(']')?;
        let (id, rest) = s.split_at(close + 1);
        return Some((id.to_string(), rest));
    }
    let end = s.find(char::is_whitespace).unwrap_or(s.len());
    Some((s[..end].to_string(), &s[end..]))
}

pub fn parse(text: &str) -> Result<NetworkText, TextError> {
    let mut doc = NetworkText::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |message: String| TextError { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        match kw {
            "node" => {
                let (id, rest) = take_id(rest).ok_or_else(|| err("missing node id".into()))?;
                let words: Vec<&str> = rest.split_whitespace().collect();
                let bounds = match words.as_slice() {
                    [] => None,
                    ["grounded", lo, hi] => {
                        let lo: Time = lo.parse().map_err(|e| err(format!("{e}")))?;
                        let hi: Time = hi.parse().map_err(|e| err(format!("{e}")))?;
                        Some((lo, hi))
                    }
                    _ => return Err(err(format!("expected `grounded <lo> <hi>`, found `{}`", rest.trim()))),
                };
                doc.nodes.push((id, bounds));
            }
            "rel" => {
                let (from, rest) = take_id(rest).ok_or_else(|| err("missing source node".into()))?;
                let (to, rest) = take_id(rest).ok_or_else(|| err("missing target node".into()))?;
                let relation: RelationSet = rest.trim().parse().map_err(|e: SiaError| err(e.to_string()))?;
                doc.constraints.push(Constraint { from, to, relation });
            }
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    Ok(doc)
}

/// Parses a full network; relation lines may reference only declared nodes.
pub fn parse_network(text: &str) -> Result<SiaNetwork, TextError> {
    let doc = parse(text)?;
    let mut net = SiaNetwork::new();
    let at = |message: String| TextError { line: 0, message };
    for (id, bounds) in &doc.nodes {
        match bounds {
            None => net.add_variable(id.clone()),
            Some((lo, hi)) => net.add_grounded(id.clone(), *lo, *hi),
        }
        .map_err(|e| at(e.to_string()))?;
    }
    for c in &doc.constraints {
        net.apply(c).map_err(|e| at(e.to_string()))?;
    }
    Ok(net)
}

/// Parses a query formula: only `rel` lines matter, node lines are ignored.
pub fn parse_constraints(text: &str) -> Result<Vec<Constraint>, TextError> {
    Ok(parse(text)?.constraints)
}

pub fn format_network(net: &SiaNetwork) -> String {
    let mut out = String::new();
    for node in net.nodes() {
        match node.kind {
            NodeKind::Variable => writeln!(out, "node {}", node.id),
            NodeKind::Grounded { lo, hi } => writeln!(out, "node {} grounded {lo} {hi}", node.id),
        }
        .expect("writing to a string");
    }
    for (i, j, r) in net.edges() {
        writeln!(out, "rel {} {} {r}", net.node(i).id, net.node(j).id).expect("writing to a string");
    }
    out
}
