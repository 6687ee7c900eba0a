//! Plain-text edge lists.
//!
//! ```text
//! # comment
//! n M
//! u v
//! ...
//! ```
//!
//! Vertices are 0-based; each `u v` line is the arc `u -> v`.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::graph::{GraphError, OrientedDigraph};

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("header declares {declared} arcs, found {found}")]
    ArcCount { declared: usize, found: usize },
    #[error("missing `n M` header")]
    MissingHeader,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), EdgeListError> {
    let mut it = line.split_whitespace();
    let syntax = |msg: &str| EdgeListError::Syntax { line: lineno, msg: msg.to_string() };
    let a = it.next().ok_or_else(|| syntax("expected two integers"))?;
    let b = it.next().ok_or_else(|| syntax("expected two integers"))?;
    if it.next().is_some() {
        return Err(syntax("trailing tokens"));
    }
    let a = a.parse().map_err(|_| syntax(&format!("bad integer `{a}`")))?;
    let b = b.parse().map_err(|_| syntax(&format!("bad integer `{b}`")))?;
    Ok((a, b))
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<OrientedDigraph, EdgeListError> {
    let mut header = None;
    let mut arcs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let pair = parse_pair(trimmed, i + 1)?;
        if header.is_none() {
            header = Some(pair);
        } else {
            arcs.push(pair);
        }
    }
    let (n, m) = header.ok_or(EdgeListError::MissingHeader)?;
    if arcs.len() != m {
        return Err(EdgeListError::ArcCount { declared: m, found: arcs.len() });
    }
    Ok(OrientedDigraph::new(n, arcs)?)
}

pub fn parse_edge_list(text: &str) -> Result<OrientedDigraph, EdgeListError> {
    read_edge_list(text.as_bytes())
}

pub fn write_edge_list<W: Write>(g: &OrientedDigraph, mut w: W) -> io::Result<()> {
    writeln!(w, "{} {}", g.n(), g.m())?;
    for &(u, v) in g.arcs() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn to_edge_list_string(g: &OrientedDigraph) -> String {
    let mut buf = Vec::new();
    write_edge_list(g, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("edge list is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_blank_lines() {
        let text = "# a triangle\n\n3 3\n0 1\n# mid\n1 2\n2 0\n";
        let g = parse_edge_list(text).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.arcs(), &[(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_edge_list(""), Err(EdgeListError::MissingHeader)));
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n"),
            Err(EdgeListError::ArcCount { declared: 2, found: 1 })
        ));
        assert!(matches!(
            parse_edge_list("3 1\n0 x\n"),
            Err(EdgeListError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("2 2\n0 1\n1 0\n"),
            Err(EdgeListError::Graph(GraphError::TwoCycle(1, 0)))
        ));
    }

    #[test]
    fn empty_graph_round_trip() {
        let g = OrientedDigraph::empty(4);
        let s = to_edge_list_string(&g);
        assert_eq!(s, "4 0\n");
        assert_eq!(parse_edge_list(&s).unwrap(), g);
    }
}
