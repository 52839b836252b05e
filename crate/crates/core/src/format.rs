//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! nodes 5
//! source 0
//! sink 3
//! arc 0 0 1 1 1        # id tail head cost removable
//! known 3 5            # initial interdictor knowledge, may repeat
//! ```
//!
//! `a0` is accepted as a synonym of `known`. Writers emit arcs in id order.

use std::fmt::Write as _;

use thiserror::Error;

use crate::arcset::ArcSet;
use crate::graph::{Arc, DirectedGraph, GraphError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate arc id {id}")]
    DuplicateArc { line: usize, id: usize },
    #[error("line {line}: negative cost {cost}")]
    NegativeCost { line: usize, cost: i64 },
    #[error("missing `{0}` directive")]
    Missing(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A network together with the interdictor's initial knowledge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: DirectedGraph,
    pub known: ArcSet,
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<T, FormatError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("bad {what} `{token}`")))
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut nodes: Option<usize> = None;
    let mut source = None;
    let mut sink = None;
    let mut arcs: Vec<Option<Arc>> = Vec::new();
    let mut known = ArcSet::new();
    let mut known_lines = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().unwrap_or_default();
        match keyword {
            "nodes" => nodes = Some(field(line, tokens.next(), "node count")?),
            "source" => source = Some(field(line, tokens.next(), "source")?),
            "sink" => sink = Some(field(line, tokens.next(), "sink")?),
            "arc" => {
                let id: usize = field(line, tokens.next(), "arc id")?;
                let tail = field(line, tokens.next(), "tail")?;
                let head = field(line, tokens.next(), "head")?;
                let cost: i64 = field(line, tokens.next(), "cost")?;
                let removable: u8 = field(line, tokens.next(), "removable flag")?;
                if cost < 0 {
                    return Err(FormatError::NegativeCost { line, cost });
                }
                if removable > 1 {
                    return Err(syntax(line, "removable flag must be 0 or 1"));
                }
                if let Some(n) = nodes {
                    for node in [tail, head] {
                        if node >= n {
                            return Err(syntax(line, format!("endpoint {node} >= node count {n}")));
                        }
                    }
                }
                if id >= arcs.len() {
                    arcs.resize(id + 1, None);
                }
                if arcs[id].is_some() {
                    return Err(FormatError::DuplicateArc { line, id });
                }
                arcs[id] = Some(Arc {
                    id,
                    tail,
                    head,
                    cost: cost as u64,
                    removable: removable == 1,
                });
            }
            "known" | "a0" => {
                for token in tokens.by_ref() {
                    known.insert(field(line, Some(token), "arc id")?);
                }
                known_lines.push(line);
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
        if tokens.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
    }

    let nodes = nodes.ok_or(FormatError::Missing("nodes"))?;
    let source = source.ok_or(FormatError::Missing("source"))?;
    let sink = sink.ok_or(FormatError::Missing("sink"))?;
    let arcs = arcs
        .into_iter()
        .enumerate()
        .map(|(i, a)| {
            a.ok_or(GraphError::NonDenseIds {
                expected: i,
                found: i + 1,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let graph = DirectedGraph::new(nodes, source, sink, arcs)?;
    if let Some(bad) = known.iter().find(|&a| a >= graph.arc_count()) {
        return Err(GraphError::InvalidArcId(bad).into());
    }
    Ok(Instance { graph, known })
}

/// Serializes the graph, followed by a `known_tag` line when `known` is
/// non-empty. Comment lines are written first, each prefixed with `# `.
pub fn write_instance(graph: &DirectedGraph, known: &ArcSet, known_tag: &str, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "nodes {}", graph.node_count());
    let _ = writeln!(out, "source {}", graph.source());
    let _ = writeln!(out, "sink {}", graph.sink());
    for a in graph.arcs() {
        let _ = writeln!(
            out,
            "arc {} {} {} {} {}",
            a.id,
            a.tail,
            a.head,
            a.cost,
            u8::from(a.removable)
        );
    }
    if !known.is_empty() {
        let ids: Vec<String> = known.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(out, "{known_tag} {}", ids.join(" "));
    }
    out
}

impl Instance {
    pub fn to_text(&self) -> String {
        write_instance(&self.graph, &self.known, "known", &[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip_five_node() {
        let g = fixtures::five_node(6);
        let inst = Instance {
            known: fixtures::example2_a0(&g),
            graph: g,
        };
        let text = inst.to_text();
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn accepts_comments_and_a0() {
        let text = "# two nodes\nnodes 2\nsource 0\nsink 1\narc 0 0 1 5 0 # unremovable\na0 0\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.graph.arc(0).cost, 5);
        assert!(!inst.graph.arc(0).removable);
        assert_eq!(inst.known.to_vec(), vec![0]);
    }

    #[test]
    fn rejects_bad_input() {
        let head = "nodes 2\nsource 0\nsink 1\n";
        assert!(matches!(
            parse_instance(&format!("{head}arc 0 0 1 1 1\narc 0 0 1 2 1\n")),
            Err(FormatError::DuplicateArc { id: 0, .. })
        ));
        assert!(matches!(
            parse_instance(&format!("{head}arc 0 0 1 -3 1\n")),
            Err(FormatError::NegativeCost { cost: -3, .. })
        ));
        assert!(matches!(
            parse_instance(&format!("{head}arc 0 0 2 1 1\n")),
            Err(FormatError::Syntax { .. })
        ));
        assert!(matches!(
            parse_instance(&format!("{head}arc 1 0 1 1 1\n")),
            Err(FormatError::Graph(GraphError::NonDenseIds { .. }))
        ));
        assert!(matches!(
            parse_instance(&format!("{head}arc 0 0 1 1 1\nknown 4\n")),
            Err(FormatError::Graph(GraphError::InvalidArcId(4)))
        ));
        assert!(matches!(parse_instance("source 0\n"), Err(FormatError::Missing("nodes"))));
    }
}
