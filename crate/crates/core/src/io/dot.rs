use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::automaton::{Lfsa, EPSILON};

/// A named, rendered view of any automaton: node names, initial nodes and captioned edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphView {
    pub name: String,
    pub nodes: Vec<String>,
    pub initial: Vec<usize>,
    pub edges: Vec<(usize, String, usize)>,
}

impl GraphView {
    /// Edges are captioned `event(label)`, or just the event when `plain` is set.
    pub fn from_lfsa(name: &str, m: &Lfsa, plain: bool) -> GraphView {
        let edges = m
            .transitions()
            .iter()
            .map(|t| {
                let e = m.event_name(t.event);
                let caption = if plain {
                    e.to_string()
                } else {
                    format!("{e}({})", m.label(t.event).map_or(EPSILON, |a| m.output_name(a)))
                };
                (t.from.0, caption, t.to.0)
            })
            .collect();
        GraphView {
            name: name.to_string(),
            nodes: m.state_names().to_vec(),
            initial: m.initial().iter().map(|q| q.0).collect(),
            edges,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph serialization");
        s.push('\n');
        s
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Graphviz rendering. Parallel edges are merged into one multi-line caption.
pub fn export_dot(view: &GraphView) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(&view.name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=ellipse];").unwrap();
    for (k, &i) in view.initial.iter().enumerate() {
        writeln!(out, "  __start{k} [shape=point, label=\"\"];").unwrap();
        writeln!(out, "  __start{k} -> {};", quote(&view.nodes[i])).unwrap();
    }
    for n in &view.nodes {
        writeln!(out, "  {};", quote(n)).unwrap();
    }
    let mut merged: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for (a, caption, b) in &view.edges {
        merged.entry((*a, *b)).or_default().push(caption);
    }
    for ((a, b), captions) in merged {
        let label: Vec<String> = captions
            .iter()
            .map(|c| quote(c).trim_matches('"').to_string())
            .collect();
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            quote(&view.nodes[a]),
            quote(&view.nodes[b]),
            label.join("\\n")
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn renders_edges_and_initial_marker() {
        let m = gallery::s1().lfsa;
        let dot = export_dot(&GraphView::from_lfsa("s1", &m, false));
        assert!(dot.starts_with("digraph \"s1\" {"));
        assert!(dot.contains("__start0 -> \"q0\";"));
        assert!(dot.contains("\"q0\" -> \"q0\" [label=\"e1(a)\"];"));
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn empty_view_is_an_empty_digraph() {
        let view = GraphView {
            name: "empty".into(),
            nodes: vec![],
            initial: vec![],
            edges: vec![],
        };
        assert_eq!(export_dot(&view), "digraph \"empty\" {\n  rankdir=LR;\n  node [shape=ellipse];\n}\n");
    }

    #[test]
    fn quotes_are_escaped() {
        assert_eq!(quote("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }
}
