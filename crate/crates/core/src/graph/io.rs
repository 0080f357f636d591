//! Plain-text edge-list format.
//!
//! First line: `n m`. Then exactly m lines `u v` with 0 <= u < v < n. The
//! writer emits edges in sorted order, so write-then-read round-trips to an
//! identical file.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{FamilyTag, Graph};
use crate::{Error, Result};

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{} {}", g.n(), g.edge_count())?;
    for &(u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge-list file".into()))??;
    let mut it = header.split_whitespace();
    let n: usize = parse_field(it.next(), "vertex count")?;
    let m: usize = parse_field(it.next(), "edge count")?;
    if it.next().is_some() {
        return Err(Error::Parse("header must be exactly 'n m'".into()));
    }

    let mut edges = Vec::with_capacity(m);
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let u: u32 = parse_field(it.next(), "edge endpoint")?;
        let v: u32 = parse_field(it.next(), "edge endpoint")?;
        if it.next().is_some() {
            return Err(Error::Parse(format!("line {}: expected 'u v'", lineno + 2)));
        }
        if u >= v {
            return Err(Error::Parse(format!("line {}: endpoints must satisfy u < v, got {u} {v}", lineno + 2)));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header promises {m} edges, file has {}", edges.len())));
    }
    Graph::from_edges(n, edges, FamilyTag::Custom)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::petersen_graph;

    #[test]
    fn round_trip_is_byte_identical() {
        let dir = std::env::temp_dir().join(format!("percnb-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p1 = dir.join("a.edges");
        let p2 = dir.join("b.edges");
        let g = petersen_graph();
        write_edge_list(&g, &p1).unwrap();
        let g2 = read_edge_list(&p1).unwrap();
        write_edge_list(&g2, &p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        assert_eq!(g.edges(), g2.edges());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rejects_malformed_input() {
        let dir = std::env::temp_dir().join(format!("percnb-io-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cases: &[(&str, &str)] = &[
            ("unsorted", "3 1\n2 1\n"),
            ("loop", "3 1\n1 1\n"),
            ("dup", "3 2\n0 1\n0 1\n"),
            ("range", "3 1\n0 5\n"),
            ("count", "3 2\n0 1\n"),
            ("junk", "3 1\n0 1 7\n"),
        ];
        for (name, content) in cases {
            let p = dir.join(name);
            std::fs::write(&p, content).unwrap();
            assert!(read_edge_list(&p).is_err(), "case {name} should fail");
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
