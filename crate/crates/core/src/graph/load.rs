//! Edge-list ingestion.
//!
//! Format: UTF-8 text, one edge per line as `u<ws>v` where `<ws>` is any run
//! of spaces or tabs. Lines starting with `#` are comments; blank lines are
//! ignored. Input ids may be sparse; they are remapped to dense `0..|V|` and
//! the mapping is recorded in a `<path>.idmap` sidecar (CSV
//! `original_id,dense_id`).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// Suffix appended to the input path for the id-map sidecar.
pub const ID_MAP_SUFFIX: &str = ".idmap";

/// Loads an edge list, remapping sparse ids to dense ones and writing the
/// id-map sidecar next to the input file.
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw = parse_edges(BufReader::new(file), path)?;
    let (graph, _) = build_remapped(&raw, directed)?;
    write_id_map(&graph, path)?;
    Ok(graph)
}

fn parse_edges(reader: impl BufRead, path: &Path) -> Result<Vec<(u64, u64)>> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (u, v) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(u), Some(v), None) => (u, v),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    msg: format!("expected two integer tokens, got {trimmed:?}"),
                })
            }
        };
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                msg: format!("invalid vertex id {tok:?}"),
            })
        };
        edges.push((parse(u)?, parse(v)?));
    }
    Ok(edges)
}

/// Remaps raw ids to dense indices (ascending original-id order) and builds
/// the graph. Returns the graph and the sorted original ids.
fn build_remapped(raw: &[(u64, u64)], directed: bool) -> Result<(Graph, Vec<u64>)> {
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let dense = |id: u64| ids.binary_search(&id).expect("id was collected") as u32;
    let edges: Vec<(u32, u32)> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    let graph = Graph::assemble(ids.len(), &edges, directed, ids.clone())?;
    Ok((graph, ids))
}

fn write_id_map(graph: &Graph, input_path: &Path) -> Result<()> {
    let mut sidecar = input_path.as_os_str().to_owned();
    sidecar.push(ID_MAP_SUFFIX);
    let sidecar = Path::new(&sidecar);
    let file = File::create(sidecar).map_err(|source| Error::Io {
        path: sidecar.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |source| Error::Io {
        path: sidecar.to_path_buf(),
        source,
    };
    writeln!(w, "original_id,dense_id").map_err(io_err)?;
    for v in graph.vertices() {
        writeln!(w, "{},{}", graph.original_id(v), v.0).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes a graph back out as an edge list over the original ids. Directed
/// graphs emit every directed edge; undirected graphs emit each edge once
/// with the smaller endpoint first.
pub fn save_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dv) = graph.directed_view() {
        for u in graph.vertices() {
            for &v in dv.out_neighbors(u) {
                writeln!(w, "{} {}", graph.original_id(u), graph.original_id(v)).map_err(io_err)?;
            }
        }
    } else {
        for u in graph.vertices() {
            for &v in graph.neighbors(u) {
                if u < v {
                    writeln!(w, "{} {}", graph.original_id(u), graph.original_id(v))
                        .map_err(io_err)?;
                }
            }
        }
    }
    w.flush().map_err(io_err)
}
