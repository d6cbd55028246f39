//! JSON and Graphviz DOT renderings of trees, labelings and decompositions.
//!
//! Output is a pure function of the input, so exports are bit-reproducible.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::decomposition::{Decomposition, HostKind};
use crate::error::{Error, Result};
use crate::labeling::{verify_beta, Labeling};
use crate::perm::Permutation;
use crate::tree::FunctionalTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
}

impl ExportFormat {
    pub fn parse(s: &str) -> Result<ExportFormat> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum ExportObject<'a> {
    Tree(&'a FunctionalTree),
    Labeling(&'a Labeling),
    Decomposition(&'a Decomposition),
}

#[derive(Serialize, Deserialize)]
struct LabelingJson {
    sigma: Permutation,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TreeInput {
    Object(FunctionalTree),
    ParentMap(Vec<usize>),
}

pub fn export(format: ExportFormat, object: ExportObject<'_>) -> Result<String> {
    match (format, object) {
        (ExportFormat::Json, ExportObject::Tree(t)) => Ok(serde_json::to_string(t)?),
        (ExportFormat::Json, ExportObject::Labeling(l)) => {
            Ok(serde_json::to_string(&LabelingJson { sigma: l.sigma.clone() })?)
        }
        (ExportFormat::Json, ExportObject::Decomposition(d)) => Ok(serde_json::to_string(d)?),
        (ExportFormat::Dot, ExportObject::Tree(t)) => Ok(tree_dot(t, None)),
        (ExportFormat::Dot, ExportObject::Labeling(l)) => Ok(tree_dot(&l.h, Some(&l.signed_labels))),
        (ExportFormat::Dot, ExportObject::Decomposition(d)) => Ok(decomposition_dot(d)),
    }
}

/// Accepts `{"n": .., "g": [..]}` or a bare parent map `[..]`.
pub fn parse_tree(json: &str) -> Result<FunctionalTree> {
    match serde_json::from_str::<TreeInput>(json) {
        Ok(TreeInput::Object(t)) => Ok(t),
        Ok(TreeInput::ParentMap(g)) => FunctionalTree::from_parent_map(g.len(), g),
        Err(e) => Err(Error::MalformedInput(format!("not a functional tree: {e}"))),
    }
}

/// Accepts `{"sigma": [..]}` or a bare permutation and verifies it against `t`.
pub fn parse_labeling(t: &FunctionalTree, json: &str) -> Result<Labeling> {
    let sigma = match serde_json::from_str::<LabelingJson>(json) {
        Ok(l) => l.sigma,
        Err(_) => serde_json::from_str::<Permutation>(json)
            .map_err(|e| Error::MalformedInput(format!("not a permutation: {e}")))?,
    };
    verify_beta(t, &sigma)
}

pub fn parse_decomposition(json: &str) -> Result<Decomposition> {
    Ok(serde_json::from_str(json)?)
}

/// Edges point from child to parent; the root carries its loop. Signed edge
/// labels, when given, annotate each vertex's out-edge.
fn tree_dot(t: &FunctionalTree, labels: Option<&[usize]>) -> String {
    let mut out = String::from("digraph tree {\n  rankdir=BT;\n  node [shape=circle];\n");
    for v in 0..t.n() {
        let _ = writeln!(out, "  {v};");
    }
    for v in 0..t.n() {
        let _ = match labels {
            Some(l) => writeln!(out, "  {v} -> {} [label=\"{}\"];", t.parent(v), l[v]),
            None => writeln!(out, "  {v} -> {};", t.parent(v)),
        };
    }
    out.push_str("}\n");
    out
}

/// One graph per copy: the current copy in black, all earlier copies grayed.
fn decomposition_dot(d: &Decomposition) -> String {
    let directed = d.host.kind == HostKind::DirectedKnn;
    let (keyword, arrow) = if directed { ("digraph", "->") } else { ("graph", "--") };
    let vertices = d.host.vertex_count();
    let parts: Option<usize> = match d.host.kind {
        HostKind::K2n1 => None,
        _ => Some(vertices / 2),
    };
    let mut out = String::new();
    for (frame, copy) in d.copies.iter().enumerate() {
        let _ = writeln!(out, "{keyword} frame_{frame} {{");
        out.push_str("  node [shape=circle];\n");
        match parts {
            Some(half) => {
                out.push_str("  rankdir=LR;\n");
                for (side, range) in [("left", 0..half), ("right", half..vertices)] {
                    let names: Vec<String> = range.map(|v| v.to_string()).collect();
                    let _ = writeln!(out, "  {{ rank=same; /* {side} */ {}; }}", names.join("; "));
                }
            }
            None => {
                for v in 0..vertices {
                    let _ = writeln!(out, "  {v};");
                }
            }
        }
        for earlier in &d.copies[..frame] {
            for (a, b) in earlier {
                let _ = writeln!(out, "  {a} {arrow} {b} [color=gray80];");
            }
        }
        for (a, b) in copy {
            let _ = writeln!(out, "  {a} {arrow} {b} [color=black, penwidth=2];");
        }
        out.push_str("}\n");
    }
    out
}
