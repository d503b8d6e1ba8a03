//! Edge-list and Matrix Market loaders.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::store::SparseSymStore;

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads an undirected graph from whitespace-separated integer id pairs, one
/// edge per line; `#` starts a comment line. Ids are compacted to `0..n` in
/// order of first appearance, reverse and repeated edges collapse and
/// self-loops are dropped. Every edge has weight 1.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<SparseSymStore> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut edges = BTreeSet::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(path, k + 1, format!("expected 2 node ids, found {}", tokens.len())));
        }
        let mut pair = [0usize; 2];
        for (slot, tok) in pair.iter_mut().zip(&tokens) {
            let raw: u64 = tok
                .parse()
                .map_err(|_| parse_err(path, k + 1, format!("invalid node id `{tok}`")))?;
            let next = ids.len();
            *slot = *ids.entry(raw).or_insert(next);
        }
        let [a, b] = pair;
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    let entries: Vec<_> = edges.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    SparseSymStore::build(ids.len(), &entries)
}

/// Reads a real or integer coordinate Matrix Market file with the
/// `symmetric` or `general` qualifier. A general file must itself be
/// symmetric; mismatched mirror values are rejected.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseSymStore> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing %%MatrixMarket header"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(path, 1, "missing %%MatrixMarket header"));
    }
    if fields[2] != "coordinate" {
        return Err(Error::Format(format!("`{}` storage is not supported", fields[2])));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(Error::Format(format!("`{}` field is not supported", fields[3])));
    }
    if fields[4] != "symmetric" && fields[4] != "general" {
        return Err(Error::Format(format!("`{}` symmetry is not supported", fields[4])));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for (k, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let bad = |what: &str| parse_err(path, k + 1, what.to_string());
        match size {
            None => {
                if tokens.len() != 3 {
                    return Err(bad("size line must be `rows cols nnz`"));
                }
                let nums: Vec<usize> = tokens
                    .iter()
                    .map(|t| t.parse().map_err(|_| bad("invalid size line")))
                    .collect::<Result<_>>()?;
                if nums[0] != nums[1] {
                    return Err(Error::Format(format!(
                        "matrix must be square, got {}x{}",
                        nums[0], nums[1]
                    )));
                }
                size = Some((nums[0], nums[2]));
            }
            Some((n, _)) => {
                if tokens.len() != 3 {
                    return Err(bad("entry line must be `row col value`"));
                }
                let i: usize = tokens[0].parse().map_err(|_| bad("invalid row index"))?;
                let j: usize = tokens[1].parse().map_err(|_| bad("invalid column index"))?;
                let v: f64 = tokens[2].parse().map_err(|_| bad("invalid value"))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(bad("index out of range"));
                }
                entries.push((i - 1, j - 1, v));
            }
        }
    }
    let (n, declared) = size.ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    if entries.len() != declared {
        return Err(parse_err(
            path,
            text.lines().count(),
            format!("expected {declared} entries, found {}", entries.len()),
        ));
    }
    SparseSymStore::build(n, &entries)
}

/// Writes the lower triangle with the `symmetric` qualifier.
pub fn write_matrix_market(store: &SparseSymStore, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    let lower: Vec<_> = store.upper_entries().collect();
    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{} {} {}", store.n(), store.n(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(out, "{} {} {:e}", j + 1, i + 1, v)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;
    use std::io::Write;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reverse_edge_collapses() {
        let f = file_with("0 1\n1 0\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.total_nnz(), 2);
        assert_eq!(g.n(), 2);
    }

    #[test]
    fn empty_edge_list() {
        let f = file_with("# nothing here\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.n(), 0);
        assert_eq!(g.total_nnz(), 0);
    }

    #[test]
    fn first_appearance_compaction_and_loops() {
        let f = file_with("# header\n10 3\n3 3\n7 10\n");
        let g = load_edge_list(f.path()).unwrap();
        // 10 -> 0, 3 -> 1, 7 -> 2
        assert_eq!(g.n(), 3);
        assert_eq!(g.get(0, 1), 1.0);
        assert_eq!(g.get(2, 0), 1.0);
        assert_eq!(g.get(1, 1), 0.0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = file_with("0 1\n2 x\n");
        match load_edge_list(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let f = file_with("0 1 2\n");
        assert!(matches!(load_edge_list(f.path()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn random_edge_file_recount() {
        let mut rng = rng_from_seed(3);
        let mut text = String::new();
        let mut set = BTreeSet::new();
        for _ in 0..100 {
            let (a, b) = (rng.random_range(0..40u32), rng.random_range(0..40u32));
            text.push_str(&format!("{a} {b}\n"));
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        }
        let g = load_edge_list(file_with(&text).path()).unwrap();
        assert_eq!(g.total_nnz(), 2 * set.len());
    }

    #[test]
    fn minimal_matrix_market() {
        let f = file_with("%%MatrixMarket matrix coordinate real symmetric\n% c\n2 2 1\n2 1 3.5\n");
        let s = load_matrix_market(f.path()).unwrap();
        assert_eq!(s.get(0, 1), 3.5);
        assert_eq!(s.get(1, 0), 3.5);
        assert_eq!(s.frob_sq(), 24.5);
    }

    #[test]
    fn asymmetric_general_file_is_rejected() {
        let f = file_with("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 2.0\n");
        assert!(matches!(
            load_matrix_market(f.path()),
            Err(Error::ConflictingMirror { .. })
        ));
    }

    #[test]
    fn unsupported_qualifiers() {
        for field in ["complex", "pattern"] {
            let f = file_with(&format!("%%MatrixMarket matrix coordinate {field} symmetric\n1 1 0\n"));
            assert!(matches!(load_matrix_market(f.path()), Err(Error::Format(_))));
        }
        let f = file_with("%%MatrixMarket matrix array real general\n1 1\n1.0\n");
        assert!(matches!(load_matrix_market(f.path()), Err(Error::Format(_))));
        let f = file_with("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n");
        assert!(matches!(load_matrix_market(f.path()), Err(Error::Parse { .. })));
    }

    #[test]
    fn matrix_market_round_trip() {
        let mut rng = rng_from_seed(4);
        let n = 70;
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                if rng.random_bool(0.05) {
                    entries.push((i, j, rng.random_range(-10.0..10.0)));
                }
            }
        }
        let store = SparseSymStore::build(n, &entries).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_matrix_market(&store, f.path()).unwrap();
        let back = load_matrix_market(f.path()).unwrap();
        assert_eq!(back.total_nnz(), store.total_nnz());
        assert_eq!(back.frob_sq(), store.frob_sq());
        for i in 0..n {
            assert_eq!(back.row(i), store.row(i));
        }
    }
}
