//! Edge-list text format.
//!
//! First line `n m [weighted|unweighted]`, then `m` lines `u v w` (the weight
//! column may be omitted for unweighted graphs). Lines starting with `#` and
//! blank lines are ignored. Weights accept integers, decimals, and `p/q`
//! fractions. Edge ids of the built graph follow canonical `(u, v)` order,
//! not file order.

use crate::error::{Error, Result};
use crate::graph::{build_graph_rational, Graph, VertexId};
use crate::util::Frac;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub fn read_graph<R: Read>(reader: R) -> Result<Graph> {
    let buf = BufReader::new(reader);
    let mut header: Option<(u32, usize)> = None;
    let mut edges: Vec<(VertexId, VertexId, Frac)> = Vec::new();
    for (ln, line) in buf.lines().enumerate() {
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        if header.is_none() {
            let n: u32 = parse_tok(tok.next(), ln, "vertex count")?;
            let m: usize = parse_tok(tok.next(), ln, "edge count")?;
            match tok.next() {
                None | Some("weighted") | Some("unweighted") => {}
                Some(other) => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown graph flavor {other:?}",
                        ln + 1
                    )))
                }
            }
            header = Some((n, m));
            continue;
        }
        let u: u32 = parse_tok(tok.next(), ln, "endpoint")?;
        let v: u32 = parse_tok(tok.next(), ln, "endpoint")?;
        let w = match tok.next() {
            Some(s) => Frac::parse(s)?,
            None => Frac::integer(1),
        };
        edges.push((u, v, w));
    }
    let (n, m) = header.ok_or_else(|| Error::Parse("missing header line".into()))?;
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header promises {m} edges, found {}",
            edges.len()
        )));
    }
    build_graph_rational(&edges, n)
}

pub fn read_graph_file<P: AsRef<Path>>(path: P) -> Result<Graph> {
    read_graph(std::fs::File::open(path)?)
}

pub fn write_graph<W: Write>(mut out: W, g: &Graph) -> Result<()> {
    let flavor = if g.is_unweighted() {
        "unweighted"
    } else {
        "weighted"
    };
    writeln!(out, "{} {} {}", g.vertex_count(), g.edge_count(), flavor)?;
    for e in g.edges() {
        if g.is_unweighted() {
            writeln!(out, "{} {}", e.u, e.v)?;
        } else {
            writeln!(out, "{} {} {}", e.u, e.v, Frac::new(e.w, g.scale()))?;
        }
    }
    Ok(())
}

pub fn write_graph_file<P: AsRef<Path>>(path: P, g: &Graph) -> Result<()> {
    write_graph(std::fs::File::create(path)?, g)
}

fn parse_tok<T: std::str::FromStr>(tok: Option<&str>, ln: usize, what: &str) -> Result<T> {
    tok.and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("line {}: expected {what}", ln + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Rat;

    #[test]
    fn roundtrip_weighted() {
        let g = crate::graph::build_graph(&[(0, 1, 3), (1, 2, 5)], 3).unwrap();
        let mut buf = Vec::new();
        write_graph(&mut buf, &g).unwrap();
        let g2 = read_graph(&buf[..]).unwrap();
        assert_eq!(g2.fingerprint(), g.fingerprint());
    }

    #[test]
    fn tolerates_comments_and_decimals() {
        let text = "# a comment\n3 2 weighted\n0 1 2.5\n1 2 1/2 # trailing\n";
        let g = read_graph(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 2);
        // 2.5 / 0.5 = 5 after normalization.
        assert_eq!(g.weight_ratio(), Rat::from_integer(5));
    }

    #[test]
    fn unweighted_lines_without_weight() {
        let text = "2 1 unweighted\n0 1\n";
        let g = read_graph(text.as_bytes()).unwrap();
        assert!(g.is_unweighted());
    }

    #[test]
    fn rejects_edge_count_mismatch() {
        assert!(read_graph("2 2 weighted\n0 1 1\n".as_bytes()).is_err());
    }
}
