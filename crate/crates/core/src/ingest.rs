//! File ingestion and serialization: edge lists, registry JSON, matrix CSV.
//!
//! Two graph formats are supported. The edge-list format holds one
//! `source,target` pair per line with `#` starting a comment; it cannot
//! represent isolated nodes. The registry format is a JSON array of
//! `{"name": ..., "dependencies": [...]}` records; dependencies naming a
//! package with no record of its own become placeholder nodes flagged
//! external. Matrices are written as CSV with a label header row and values
//! printed with enough digits to reload exactly.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DependencyGraph, GraphBuilder};
use crate::matrix::DissimilarityMatrix;

/// One package record in the registry JSON format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegistryRecord {
    /// Unique package name.
    pub name: String,
    /// Names of the packages this one depends on.
    #[serde(default)]
    pub dependencies: Vec<String>,
}

/// Loads a directed graph from an edge-list CSV file.
///
/// Node ids are assigned in first-appearance order. Lines that are empty or
/// start with `#` are skipped; anything else must be exactly two non-empty
/// comma-separated names. Duplicate edges are tolerated silently; self-loops
/// and malformed lines are rejected with their line number.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<DependencyGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let display = path.display().to_string();
    let mut builder = GraphBuilder::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split(',');
        let source = fields.next().map(str::trim).unwrap_or("");
        let target = fields.next().map(str::trim).unwrap_or("");
        if source.is_empty() || target.is_empty() || fields.next().is_some() {
            return Err(Error::MalformedLine {
                path: display,
                line,
                reason: format!("expected `source,target`, got {trimmed:?}"),
            });
        }
        if source == target {
            return Err(Error::MalformedLine {
                path: display,
                line,
                reason: format!("self-loop on {source:?}"),
            });
        }
        let from = builder.ensure_node(source);
        builder.mark_internal(from);
        let to = builder.ensure_node(target);
        builder.mark_internal(to);
        builder.add_edge(from, to)?;
    }
    if builder.node_count() == 0 {
        return Err(Error::MalformedLine {
            path: display,
            line: 0,
            reason: "no nodes: file holds no edges".into(),
        });
    }
    Ok(builder.build())
}

/// Writes a graph as an edge-list CSV file.
///
/// Only edges are written, so isolated nodes are not representable in this
/// format; use [`write_registry_json`] when they must survive a round trip.
pub fn write_edge_list(g: &DependencyGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for v in g.node_ids() {
        validate_label(g.label(v))?;
        for &t in g.out_neighbors(v) {
            out.push_str(g.label(v));
            out.push(',');
            out.push_str(g.label(t));
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Loads a directed graph from a registry JSON file.
///
/// Node ids follow first-appearance order across record names and their
/// dependency lists. Dependencies with no record of their own become
/// placeholder nodes flagged external.
pub fn load_registry_json(path: impl AsRef<Path>) -> Result<DependencyGraph> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(display.clone(), e))?;
    let records: Vec<RegistryRecord> =
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: display.clone(),
            source: e,
        })?;
    let mut builder = GraphBuilder::new();
    let mut seen_records: std::collections::HashSet<String> = std::collections::HashSet::new();
    for record in &records {
        if record.name.trim().is_empty() {
            return Err(Error::MalformedRegistry {
                path: display,
                reason: "record with empty name".into(),
            });
        }
        if !seen_records.insert(record.name.clone()) {
            return Err(Error::MalformedRegistry {
                path: display,
                reason: format!("duplicate record for {:?}", record.name),
            });
        }
        let from = builder.ensure_node(&record.name);
        builder.mark_internal(from);
        for dep in &record.dependencies {
            if dep == &record.name {
                return Err(Error::MalformedRegistry {
                    path: display,
                    reason: format!("record {:?} depends on itself", record.name),
                });
            }
            let to = builder.ensure_node(dep);
            builder.add_edge(from, to)?;
        }
    }
    if builder.node_count() == 0 {
        return Err(Error::MalformedRegistry {
            path: display,
            reason: "no nodes: registry holds no records".into(),
        });
    }
    Ok(builder.build())
}

/// Writes a graph as registry JSON, the lossless graph format.
///
/// Every non-external node becomes a record; external placeholder nodes are
/// omitted and reappear as externals when the file is loaded back.
pub fn write_registry_json(g: &DependencyGraph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let records: Vec<RegistryRecord> = g
        .node_ids()
        .filter(|&v| !g.is_external(v))
        .map(|v| RegistryRecord {
            name: g.label(v).to_owned(),
            dependencies: g
                .out_neighbors(v)
                .iter()
                .map(|&t| g.label(t).to_owned())
                .collect(),
        })
        .collect();
    let text = serde_json::to_string_pretty(&records).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() || label.contains(',') || label.contains('\n') || label.contains('"') {
        return Err(Error::InvalidParameter(format!(
            "label {label:?} cannot be written to CSV"
        )));
    }
    Ok(())
}

/// Writes a dissimilarity matrix as CSV: a header row of node labels, then
/// one row of values per node.
///
/// Values are printed with the shortest representation that parses back to
/// the identical float, so a reload is exact (well inside the documented
/// 1e-6 guarantee).
pub fn write_matrix_csv(
    m: &DissimilarityMatrix,
    labels: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    if labels.len() != m.len() {
        return Err(Error::InvalidParameter(format!(
            "{} labels for a {}-node matrix",
            labels.len(),
            m.len()
        )));
    }
    for label in labels {
        validate_label(label)?;
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = std::io::BufWriter::new(file);
    let io_err = |e| Error::io(path.display().to_string(), e);
    writeln!(w, "{}", labels.join(",")).map_err(io_err)?;
    for i in 0..m.len() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a matrix CSV produced by [`write_matrix_csv`].
///
/// Returns the matrix together with the header labels. Entries must form a
/// symmetric matrix in `[0, 1]` with a zero diagonal.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<(DissimilarityMatrix, Vec<String>)> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(display.clone(), e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::MalformedLine {
        path: display.clone(),
        line: 1,
        reason: "empty file".into(),
    })?;
    let labels: Vec<String> = header.split(',').map(|s| s.trim().to_owned()).collect();
    let n = labels.len();
    let mut values = Vec::with_capacity(n * n);
    let mut rows = 0usize;
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != n {
            return Err(Error::MalformedLine {
                path: display,
                line,
                reason: format!("expected {n} values, got {}", fields.len()),
            });
        }
        for field in fields {
            let v: f64 = field.trim().parse().map_err(|_| Error::MalformedLine {
                path: display.clone(),
                line,
                reason: format!("not a number: {field:?}"),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::MalformedLine {
            path: display,
            line: 0,
            reason: format!("expected {n} rows, got {rows}"),
        });
    }
    let m = DissimilarityMatrix::from_values(n, values)?;
    Ok((m, labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Direction, NodeId};

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(f.path(), content).unwrap();
        f
    }

    #[test]
    fn edge_list_loads_in_first_appearance_order() {
        let f = write_temp("# header comment\nb,a\na,c\n\nc,d\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.label(NodeId::new(0)), "b");
        assert_eq!(g.label(NodeId::new(1)), "a");
        assert_eq!(g.label(NodeId::new(2)), "c");
    }

    #[test]
    fn edge_list_reports_malformed_line_number() {
        let f = write_temp("a,b\nnot-an-edge\n");
        match load_edge_list(f.path()) {
            Err(Error::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed-line error, got {other:?}"),
        }
    }

    #[test]
    fn edge_list_rejects_self_loop_with_line_number() {
        let f = write_temp("a,b\nc,c\n");
        match load_edge_list(f.path()) {
            Err(Error::MalformedLine { line, reason, .. }) => {
                assert_eq!(line, 2);
                assert!(reason.contains("self-loop"));
            }
            other => panic!("expected self-loop error, got {other:?}"),
        }
    }

    #[test]
    fn edge_list_rejects_empty_file() {
        let f = write_temp("# only a comment\n");
        assert!(load_edge_list(f.path()).is_err());
    }

    #[test]
    fn edge_list_tolerates_duplicate_edges() {
        let f = write_temp("a,b\na,b\n");
        let g = load_edge_list(f.path()).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn edge_list_round_trips() {
        let f = write_temp("a,b\na,c\nb,c\n");
        let g = load_edge_list(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_edge_list(&g, out.path()).unwrap();
        let g2 = load_edge_list(out.path()).unwrap();
        assert_eq!(g2.node_count(), g.node_count());
        assert_eq!(g2.edge_count(), g.edge_count());
        for v in g.node_ids() {
            let v2 = g2.node_by_label(g.label(v)).unwrap();
            let out_labels: Vec<&str> = g.out_neighbors(v).iter().map(|&t| g.label(t)).collect();
            let out_labels2: Vec<&str> =
                g2.out_neighbors(v2).iter().map(|&t| g2.label(t)).collect();
            assert_eq!(out_labels, out_labels2);
        }
    }

    #[test]
    fn registry_counts_every_mentioned_name() {
        let f = write_temp(
            r#"[
                {"name": "app", "dependencies": ["lib", "util"]},
                {"name": "lib", "dependencies": ["util"]}
            ]"#,
        );
        let g = load_registry_json(f.path()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        let util = g.node_by_label("util").unwrap();
        assert!(g.is_external(util));
        assert!(!g.is_external(g.node_by_label("app").unwrap()));
    }

    #[test]
    fn registry_clears_external_flag_when_record_appears_later() {
        let f = write_temp(
            r#"[
                {"name": "app", "dependencies": ["lib"]},
                {"name": "lib", "dependencies": []}
            ]"#,
        );
        let g = load_registry_json(f.path()).unwrap();
        assert!(!g.is_external(g.node_by_label("lib").unwrap()));
    }

    #[test]
    fn registry_rejects_duplicate_records() {
        let f = write_temp(r#"[{"name": "a"}, {"name": "a"}]"#);
        assert!(matches!(
            load_registry_json(f.path()),
            Err(Error::MalformedRegistry { .. })
        ));
    }

    #[test]
    fn registry_rejects_missing_name() {
        let f = write_temp(r#"[{"dependencies": ["x"]}]"#);
        assert!(matches!(
            load_registry_json(f.path()),
            Err(Error::Json { .. })
        ));
    }

    #[test]
    fn registry_round_trips_isolated_nodes() {
        let f = write_temp(
            r#"[
                {"name": "solo", "dependencies": []},
                {"name": "app", "dependencies": ["ghost"]}
            ]"#,
        );
        let g = load_registry_json(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_registry_json(&g, out.path()).unwrap();
        let g2 = load_registry_json(out.path()).unwrap();
        assert_eq!(g2.node_count(), 3);
        assert_eq!(g2.edge_count(), 1);
        let solo = g2.node_by_label("solo").unwrap();
        assert_eq!(g2.degree(solo, Direction::Total), 0);
        assert!(!g2.is_external(solo));
        assert!(g2.is_external(g2.node_by_label("ghost").unwrap()));
    }

    #[test]
    fn matrix_csv_round_trips_exactly() {
        let mut m = DissimilarityMatrix::filled(3, 1.0);
        m.set_pair(0, 1, 1.0 / 3.0);
        m.set_pair(1, 2, 0.123456789012345);
        let labels = vec!["a".to_owned(), "b".to_owned(), "c".to_owned()];
        let out = tempfile::NamedTempFile::new().unwrap();
        write_matrix_csv(&m, &labels, out.path()).unwrap();
        let (m2, labels2) = read_matrix_csv(out.path()).unwrap();
        assert_eq!(labels2, labels);
        assert_eq!(m2, m);
    }

    #[test]
    fn matrix_csv_rejects_ragged_rows() {
        let f = write_temp("a,b\n0,0.5\n0.5\n");
        assert!(read_matrix_csv(f.path()).is_err());
    }

    #[test]
    fn matrix_csv_rejects_commas_in_labels() {
        let m = DissimilarityMatrix::filled(2, 0.5);
        let labels = vec!["a,b".to_owned(), "c".to_owned()];
        let out = tempfile::NamedTempFile::new().unwrap();
        assert!(write_matrix_csv(&m, &labels, out.path()).is_err());
    }
}
