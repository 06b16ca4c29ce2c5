//! Content store persistence.
//!
//! Tab-separated UTF-8 with LF line endings. The header line is
//! `H=<count>\tgraph=<name>\tscheme=<id>\tseed=<seed>`, followed by one
//! record per content:
//! `content_id\tlabel\tf\tspecial_vertex\tv1,v2,...,vf`.
//! Loading re-validates every store invariant, so hand-edited files that
//! break them are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Content, ContentStore, StoreMeta};
use crate::error::{Error, Result};
use crate::graph::VertexId;

pub fn save_store(store: &ContentStore, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut w = BufWriter::new(file);
    write_store(store, &mut w).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_store(store: &ContentStore, w: &mut impl Write) -> std::io::Result<()> {
    let meta = store.meta();
    writeln!(
        w,
        "H={}\tgraph={}\tscheme={}\tseed={}",
        store.num_contents(),
        meta.graph_name,
        meta.scheme,
        meta.seed
    )?;
    for c in store.contents() {
        let hosts: Vec<String> = c.copies.iter().map(|v| v.0.to_string()).collect();
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            c.id,
            c.label,
            c.copy_count,
            c.special_vertex.0,
            hosts.join(",")
        )?;
    }
    w.flush()
}

pub fn load_store(path: impl AsRef<Path>) -> Result<ContentStore> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::Integrity("store file is empty".into()))?
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let (count, meta) = parse_header(&header)?;

    let mut contents = Vec::with_capacity(count);
    let mut max_vertex = 0u32;
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.is_empty() {
            continue;
        }
        let content = parse_record(&line, idx + 2)?;
        for &v in &content.copies {
            max_vertex = max_vertex.max(v.0);
        }
        contents.push(content);
    }
    if contents.len() != count {
        return Err(Error::Integrity(format!(
            "header claims H={count} but file has {} records",
            contents.len()
        )));
    }
    let num_vertices = if contents.is_empty() {
        0
    } else {
        max_vertex as usize + 1
    };
    ContentStore::assemble(contents, num_vertices, meta)
}

fn parse_header(header: &str) -> Result<(usize, StoreMeta)> {
    let fields: Vec<&str> = header.split('\t').collect();
    let take = |idx: usize, key: &str| -> Result<&str> {
        fields
            .get(idx)
            .and_then(|f| f.strip_prefix(key))
            .ok_or_else(|| Error::Integrity(format!("store header missing {key}...")))
    };
    let count: usize = take(0, "H=")?
        .parse()
        .map_err(|_| Error::Integrity("store header has a non-numeric H".into()))?;
    let graph_name = take(1, "graph=")?.to_string();
    let scheme = take(2, "scheme=")?.to_string();
    let seed: u64 = take(3, "seed=")?
        .parse()
        .map_err(|_| Error::Integrity("store header has a non-numeric seed".into()))?;
    Ok((
        count,
        StoreMeta {
            graph_name,
            scheme,
            seed,
        },
    ))
}

fn parse_record(line: &str, line_no: usize) -> Result<Content> {
    let bad = |msg: &str| Error::Integrity(format!("record at line {line_no}: {msg}"));
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 5 {
        return Err(bad("expected 5 tab-separated fields"));
    }
    let id: u32 = fields[0].parse().map_err(|_| bad("bad content id"))?;
    let label: u32 = fields[1].parse().map_err(|_| bad("bad label"))?;
    let copy_count: u32 = fields[2].parse().map_err(|_| bad("bad copy count"))?;
    let special: u32 = fields[3].parse().map_err(|_| bad("bad special vertex"))?;
    let copies = fields[4]
        .split(',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u32>().map(VertexId).map_err(|_| bad("bad copy vertex")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Content {
        id,
        label,
        copy_count,
        copies,
        special_vertex: VertexId(special),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::{generate_cds1, ParetoConfig};
    use crate::graph::random_connected_graph;
    use std::fs;

    #[test]
    fn round_trip_is_byte_identical() {
        let g = random_connected_graph(50, 5.0, 1);
        let store = generate_cds1(&g, 200, &ParetoConfig::new(1.0, 8).unwrap(), 4)
            .unwrap()
            .with_graph_name("toy");
        let dir = tempfile::tempdir().unwrap();
        let first = dir.path().join("store.tsv");
        let second = dir.path().join("store2.tsv");
        save_store(&store, &first).unwrap();
        let reloaded = load_store(&first).unwrap();
        assert_eq!(store.num_contents(), reloaded.num_contents());
        save_store(&reloaded, &second).unwrap();
        assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    }

    #[test]
    fn empty_store_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.tsv");
        fs::write(&path, "H=0\tgraph=g\tscheme=cds1\tseed=7\n").unwrap();
        let store = load_store(&path).unwrap();
        assert_eq!(store.num_contents(), 0);
        assert_eq!(store.meta().seed, 7);
    }

    #[test]
    fn copy_count_mismatch_is_an_integrity_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.tsv");
        fs::write(
            &path,
            "H=1\tgraph=g\tscheme=cds1\tseed=1\n0\t3\t3\t0\t0,1\n",
        )
        .unwrap();
        assert!(matches!(load_store(&path), Err(Error::Integrity(_))));
    }

    #[test]
    fn missing_special_copy_is_an_integrity_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.tsv");
        fs::write(
            &path,
            "H=1\tgraph=g\tscheme=cds1\tseed=1\n0\t2\t2\t5\t0,1\n",
        )
        .unwrap();
        assert!(matches!(load_store(&path), Err(Error::Integrity(_))));
    }

    #[test]
    fn header_record_count_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.tsv");
        fs::write(&path, "H=2\tgraph=g\tscheme=cds1\tseed=1\n0\t1\t1\t0\t0\n").unwrap();
        assert!(matches!(load_store(&path), Err(Error::Integrity(_))));
    }
}
