use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::script::ScriptSet;

pub type ContextGraph = BTreeMap<String, BTreeSet<String>>;

/// Static goto edges. Every context is a key, even with no out-edges.
pub fn context_graph(set: &ScriptSet) -> ContextGraph {
    set.contexts
        .iter()
        .map(|ctx| {
            let targets = ctx
                .rules
                .iter()
                .flat_map(|r| &r.response.alternatives)
                .flat_map(|b| b.actions())
                .map(|a| a.target.clone())
                .collect();
            (ctx.name.clone(), targets)
        })
        .collect()
}

/// One `from -> to` line per edge.
pub fn edge_list(graph: &ContextGraph) -> String {
    let mut out = String::new();
    for (from, tos) in graph {
        for to in tos {
            let _ = writeln!(out, "{from} -> {to}");
        }
    }
    out
}

/// Graphviz digraph. Isolated contexts are listed as bare nodes.
pub fn dot(graph: &ContextGraph, name: &str) -> String {
    let mut out = format!("digraph \"{}\" {{\n", name.replace('"', "\\\""));
    for (from, tos) in graph {
        if tos.is_empty() {
            let _ = writeln!(out, "  {from};");
        }
        for to in tos {
            let _ = writeln!(out, "  {from} -> {to};");
        }
    }
    out.push_str("}\n");
    out
}
