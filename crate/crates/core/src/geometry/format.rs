//! Line-oriented text format for decoding graphs.
//!
//! ```text
//! decoding-graph 1
//! vertices <V> edges <E> boundary <T>
//! boundary <t1> <t2> ...
//! <u> <v> <weight> <rate|-> <logical 0|1> [<projected qubits, comma separated>|-]
//! ```

use std::io::{BufRead, Write};

use crate::error::GraphError;
use crate::geometry::graph::DecodingGraph;

const MAGIC: &str = "decoding-graph 1";

pub fn write_graph<W: Write>(graph: &DecodingGraph, mut out: W) -> std::io::Result<()> {
    let boundary = graph.boundary_vertices();
    writeln!(out, "{MAGIC}")?;
    writeln!(
        out,
        "vertices {} edges {} boundary {}",
        graph.num_vertices(),
        graph.num_edges(),
        boundary.len()
    )?;
    write!(out, "boundary")?;
    for t in &boundary {
        write!(out, " {t}")?;
    }
    writeln!(out)?;
    for e in 0..graph.num_edges() {
        let [u, v] = graph.endpoints(e);
        write!(out, "{u} {v} {:?} ", graph.weight(e))?;
        match graph.rates() {
            Some(r) => write!(out, "{:?}", r[e])?,
            None => write!(out, "-")?,
        }
        write!(out, " {}", graph.is_logical(e) as u8)?;
        if let Some(proj) = graph.projection() {
            if proj[e].is_empty() {
                write!(out, " -")?;
            } else {
                let list: Vec<String> = proj[e].iter().map(|q| q.to_string()).collect();
                write!(out, " {}", list.join(","))?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn graph_to_string(graph: &DecodingGraph) -> String {
    let mut buf = Vec::new();
    write_graph(graph, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_graph<R: BufRead>(input: R) -> Result<DecodingGraph, GraphError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String), GraphError> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i, l)),
            Some((i, Err(e))) => Err(parse_err(i, e.to_string())),
            None => Err(parse_err(0, format!("missing {what}"))),
        }
    };
    let (i, magic) = next("header")?;
    if magic.trim() != MAGIC {
        return Err(parse_err(i, "unknown header"));
    }
    let (i, counts) = next("counts")?;
    let tok: Vec<&str> = counts.split_whitespace().collect();
    if tok.len() != 6 || tok[0] != "vertices" || tok[2] != "edges" || tok[4] != "boundary" {
        return Err(parse_err(i, "expected 'vertices V edges E boundary T'"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|e| parse_err(i, e.to_string()));
    let (nv, ne, nt) = (num(tok[1])?, num(tok[3])?, num(tok[5])?);
    let (i, bline) = next("boundary list")?;
    let mut btok = bline.split_whitespace();
    if btok.next() != Some("boundary") {
        return Err(parse_err(i, "expected boundary list"));
    }
    let boundary: Vec<usize> = btok
        .map(|s| s.parse::<usize>().map_err(|e| parse_err(i, e.to_string())))
        .collect::<Result<_, _>>()?;
    if boundary.len() != nt {
        return Err(parse_err(i, "boundary count mismatch"));
    }
    let mut edges = Vec::with_capacity(ne);
    let mut weights = Vec::with_capacity(ne);
    let mut rates = Vec::with_capacity(ne);
    let mut logical = Vec::new();
    let mut projection: Vec<Vec<usize>> = Vec::new();
    let mut has_rates = None;
    let mut has_proj = None;
    for e in 0..ne {
        let (i, line) = next("edge line")?;
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != 5 && tok.len() != 6 {
            return Err(parse_err(i, "expected 5 or 6 fields"));
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|err| parse_err(i, err.to_string()))
        };
        let float = |s: &str| {
            s.parse::<f64>()
                .map_err(|err| parse_err(i, err.to_string()))
        };
        edges.push([int(tok[0])?, int(tok[1])?]);
        weights.push(float(tok[2])?);
        let rate = if tok[3] == "-" {
            None
        } else {
            Some(float(tok[3])?)
        };
        if *has_rates.get_or_insert(rate.is_some()) != rate.is_some() {
            return Err(parse_err(i, "rates must be given for all edges or none"));
        }
        rates.push(rate.unwrap_or(0.0));
        match tok[4] {
            "1" => logical.push(e),
            "0" => {}
            _ => return Err(parse_err(i, "logical flag must be 0 or 1")),
        }
        let proj = tok.get(5).copied();
        if *has_proj.get_or_insert(proj.is_some()) != proj.is_some() {
            return Err(parse_err(
                i,
                "projection must be given for all edges or none",
            ));
        }
        if let Some(p) = proj {
            let list = if p == "-" {
                Vec::new()
            } else {
                p.split(',').map(int).collect::<Result<_, _>>()?
            };
            projection.push(list);
        }
    }
    let mut graph = DecodingGraph::new(nv, &boundary, edges, weights, &logical)?;
    if has_rates == Some(true) {
        graph.set_rates(rates)?;
    }
    if has_proj == Some(true) {
        graph.set_projection(projection)?;
    }
    Ok(graph)
}
