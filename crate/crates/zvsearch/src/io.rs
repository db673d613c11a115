//! Text formats.
//!
//! Edge lists hold one edge `u v` per line; a line with a single label adds an
//! isolated vertex, `#` starts a comment, and an optional `terminals a b`
//! line names a terminal pair. Search files hold one step per line with
//! vertices separated by spaces; `-` denotes an empty step.

use crate::error::{input, Result};
use crate::graph::{Graph, VertexSet};

/// A parsed edge list.
#[derive(Clone, Debug)]
pub struct EdgeList {
    pub graph: Graph,
    pub terminals: Option<(String, String)>,
}

fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_edge_list(text: &str) -> Result<EdgeList> {
    let mut vertices = vec![];
    let mut edges = vec![];
    let mut terminals = None;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let words: Vec<&str> = content(raw).split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            ["terminals", a, b] => {
                if terminals.is_some() {
                    return input(format!("line {no}: duplicate terminals line"));
                }
                if a == b {
                    return input(format!("line {no}: terminals must differ"));
                }
                terminals = Some((a.to_string(), b.to_string()));
            }
            ["terminals", ..] => return input(format!("line {no}: terminals line needs two vertices")),
            [v] => vertices.push(v.to_string()),
            [u, v] => {
                if u == v {
                    return input(format!("line {no}: self-loop at {u}"));
                }
                edges.push((u.to_string(), v.to_string()));
            }
            _ => return input(format!("line {no}: expected `u v`, got {:?}", content(raw))),
        }
    }
    let graph = Graph::new(&vertices, edges.iter().map(|(a, b)| (a.as_str(), b.as_str())))?;
    if let Some((a, b)) = &terminals {
        for t in [a, b] {
            if graph.id(t).is_none() {
                return input(format!("terminal {t:?} is not a vertex"));
            }
        }
    }
    Ok(EdgeList { graph, terminals })
}

pub fn format_edge_list(g: &Graph, terminals: Option<(&str, &str)>) -> String {
    let mut out = String::new();
    if let Some((a, b)) = terminals {
        out.push_str(&format!("terminals {a} {b}\n"));
    }
    for v in 0..g.n() {
        if g.degree(v) == 0 {
            out.push_str(g.label(v));
            out.push('\n');
        }
    }
    for (u, v) in g.label_edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn parse_search(g: &Graph, text: &str) -> Result<Vec<VertexSet>> {
    let mut steps = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let mut s = g.empty_set();
        if line != "-" {
            for w in line.split_whitespace() {
                match g.id(w) {
                    Some(v) => s.insert(v),
                    None => return input(format!("line {}: unknown vertex {w:?}", i + 1)),
                }
            }
        }
        steps.push(s);
    }
    Ok(steps)
}

pub fn format_search(g: &Graph, steps: &[VertexSet]) -> String {
    let mut out = String::new();
    for s in steps {
        let labels = g.set_labels(s);
        out.push_str(&if labels.is_empty() { "-".to_string() } else { labels.join(" ") });
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn round_trip() {
        let g = generate::grid(3, 4).unwrap();
        let text = format_edge_list(&g, Some(("v0", "v11")));
        let back = parse_edge_list(&text).unwrap();
        assert_eq!(back.graph, g);
        assert_eq!(back.terminals, Some(("v0".into(), "v11".into())));
    }

    #[test]
    fn isolated_and_comments() {
        let e = parse_edge_list("# header\na b # trailing\n\nc\n").unwrap();
        assert_eq!(e.graph.n(), 3);
        assert_eq!(e.graph.m(), 1);
    }

    #[test]
    fn errors_name_lines() {
        let err = parse_edge_list("a b\na b c\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let g = generate::path(3).unwrap();
        let err = parse_search(&g, "0 1\n\n7\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn search_round_trip() {
        let g = generate::path(3).unwrap();
        let steps = vec![g.set_of([0, 1]), g.empty_set(), g.set_of([2])];
        let text = format_search(&g, &steps);
        assert_eq!(text, "0 1\n-\n2\n");
        assert_eq!(parse_search(&g, &text).unwrap(), steps);
    }
}
