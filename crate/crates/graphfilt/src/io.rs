//! File formats.
//!
//! * edge list: first line `N`, then one `k l w` line per undirected edge,
//!   1-based node ids;
//! * coordinates: one `k x y` line per node, 1-based;
//! * CSV outputs (`msd.csv`, `theory.csv`, `clusters_<i>.csv`,
//!   `trace_node<k>.csv`, signal streams) with a header row.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use graphfilt_core::graph::Graph;
use graphfilt_core::theory::to_db;

use crate::{HarnessError, Result};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, reason: String) -> HarnessError {
    HarnessError::Format {
        path: path.to_path_buf(),
        reason,
    }
}

fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            out.push((idx + 1, trimmed.to_string()));
        }
    }
    Ok(out)
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect()
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let lines = data_lines(path)?;
    let (first_no, first) = lines
        .first()
        .ok_or_else(|| format_err(path, "empty edge list".into()))?;
    let n: usize = first
        .parse()
        .map_err(|_| format_err(path, format!("line {first_no}: expected the node count")))?;
    let mut edges = Vec::with_capacity(lines.len() - 1);
    for (no, line) in &lines[1..] {
        let f = fields(line);
        if f.len() != 3 {
            return Err(format_err(path, format!("line {no}: expected `k l w`")));
        }
        let parse_node = |s: &str| -> Result<usize> {
            let k: usize = s
                .parse()
                .map_err(|_| format_err(path, format!("line {no}: bad node id `{s}`")))?;
            if k == 0 || k > n {
                return Err(format_err(path, format!("line {no}: node {k} outside 1..={n}")));
            }
            Ok(k - 1)
        };
        let w: f64 = f[2]
            .parse()
            .map_err(|_| format_err(path, format!("line {no}: bad weight `{}`", f[2])))?;
        edges.push((parse_node(f[0])?, parse_node(f[1])?, w));
    }
    Ok(Graph::from_edges(n, &edges)?)
}

pub fn write_edge_list(path: &Path, graph: &Graph) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let a = graph.adjacency();
    let n = graph.n_nodes();
    let mut body = format!("{n}\n");
    for k in 0..n {
        for l in k + 1..n {
            if a[(k, l)] != 0.0 {
                body.push_str(&format!("{} {} {}\n", k + 1, l + 1, a[(k, l)]));
            }
        }
    }
    w.write_all(body.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn read_coordinates(path: &Path) -> Result<Vec<[f64; 2]>> {
    let lines = data_lines(path)?;
    let mut coords = vec![None; lines.len()];
    for (no, line) in &lines {
        let f = fields(line);
        let parsed = (f.len() == 3)
            .then(|| {
                Some((
                    f[0].parse::<usize>().ok()?,
                    f[1].parse::<f64>().ok()?,
                    f[2].parse::<f64>().ok()?,
                ))
            })
            .flatten();
        let (k, x, y) = parsed.ok_or_else(|| format_err(path, format!("line {no}: expected `k x y`")))?;
        if k == 0 || k > coords.len() {
            return Err(format_err(path, format!("line {no}: node {k} outside 1..={}", coords.len())));
        }
        coords[k - 1] = Some([x, y]);
    }
    coords
        .into_iter()
        .enumerate()
        .map(|(k, c)| c.ok_or_else(|| format_err(path, format!("node {} has no coordinates", k + 1))))
        .collect()
}

pub fn write_coordinates(path: &Path, coords: &[[f64; 2]]) -> Result<()> {
    let body: String = coords
        .iter()
        .enumerate()
        .map(|(k, c)| format!("{} {} {}\n", k + 1, c[0], c[1]))
        .collect();
    std::fs::write(path, body).map_err(io_err(path))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| format_err(path, e.to_string()))
}

fn csv_done(path: &Path, mut w: csv::Writer<File>) -> Result<()> {
    w.flush().map_err(io_err(path))
}

fn write_row(path: &Path, w: &mut csv::Writer<File>, row: &[String]) -> Result<()> {
    w.write_record(row).map_err(|e| format_err(path, e.to_string()))
}

/// `i, msd, msd_db[, theory, theory_db]`.
pub fn write_msd_csv(path: &Path, msd: &[f64], theory: Option<&[f64]>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["i".to_string(), "msd".into(), "msd_db".into()];
    if theory.is_some() {
        header.extend(["theory".to_string(), "theory_db".into()]);
    }
    write_row(path, &mut w, &header)?;
    for (i, &v) in msd.iter().enumerate() {
        let mut row = vec![i.to_string(), v.to_string(), to_db(v).to_string()];
        if let Some(t) = theory.and_then(|t| t.get(i)) {
            row.extend([t.to_string(), to_db(*t).to_string()]);
        }
        write_row(path, &mut w, &row)?;
    }
    csv_done(path, w)
}

/// `i, zeta, zeta_db`.
pub fn write_theory_csv(path: &Path, zeta: &[f64]) -> Result<()> {
    let mut w = csv_writer(path)?;
    write_row(path, &mut w, &["i".into(), "zeta".into(), "zeta_db".into()])?;
    for (i, &z) in zeta.iter().enumerate() {
        write_row(path, &mut w, &[i.to_string(), z.to_string(), to_db(z).to_string()])?;
    }
    csv_done(path, w)
}

/// 0/1 matrix, row `ℓ`, column `k`, no header.
pub fn write_cluster_csv(path: &Path, e: &DMatrix<u8>) -> Result<()> {
    let body: String = (0..e.nrows())
        .map(|l| {
            let row: Vec<String> = (0..e.ncols()).map(|k| e[(l, k)].to_string()).collect();
            row.join(",") + "\n"
        })
        .collect();
    std::fs::write(path, body).map_err(io_err(path))
}

pub fn read_cluster_csv(path: &Path) -> Result<DMatrix<u8>> {
    let lines = data_lines(path)?;
    let rows: Vec<Vec<u8>> = lines
        .iter()
        .map(|(no, line)| {
            fields(line)
                .iter()
                .map(|f| match *f {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    other => Err(format_err(path, format!("line {no}: `{other}` is not 0 or 1"))),
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format_err(path, "cluster matrix is not square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |l, k| rows[l][k]))
}

/// `i, k, h1..hM` for one node; `trace` is row-major by iteration.
pub fn write_trace_csv(path: &Path, node: usize, order: usize, trace: &[f64]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["i".to_string(), "k".into()];
    header.extend((1..=order).map(|m| format!("h{m}")));
    write_row(path, &mut w, &header)?;
    for (i, h) in trace.chunks(order).enumerate() {
        let mut row = vec![i.to_string(), (node + 1).to_string()];
        row.extend(h.iter().map(f64::to_string));
        write_row(path, &mut w, &row)?;
    }
    csv_done(path, w)
}

/// `i, x1..xN, y1..yN`.
pub fn write_stream_csv(path: &Path, x: &[Vec<f64>], y: &[Vec<f64>]) -> Result<()> {
    let n = x.first().map_or(0, Vec::len);
    let mut w = csv_writer(path)?;
    let mut header = vec!["i".to_string()];
    header.extend((1..=n).map(|k| format!("x{k}")));
    header.extend((1..=n).map(|k| format!("y{k}")));
    write_row(path, &mut w, &header)?;
    for (i, (xi, yi)) in x.iter().zip(y).enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(xi.iter().map(f64::to_string));
        row.extend(yi.iter().map(f64::to_string));
        write_row(path, &mut w, &row)?;
    }
    csv_done(path, w)
}

/// Reads a `T×N` numeric table; a non-numeric first row is a header.
/// Empty, `NaN` or unparsable cells are rejected with their position.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format_err(path, e.to_string()))?;
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format_err(path, e.to_string()))?;
        if idx == 0 && record.iter().any(|c| !c.is_empty() && c.parse::<f64>().is_err()) {
            continue;
        }
        let row_no = idx + 1;
        let mut row = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(format_err(
                        path,
                        format!("missing or invalid value `{cell}` at row {row_no}, column {}", col + 1),
                    ))
                }
            }
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(format_err(
                    path,
                    format!("row {row_no} has {} columns, expected {w}", row.len()),
                ))
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_matrix_csv(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        write_row(path, &mut w, &r.iter().map(f64::to_string).collect::<Vec<_>>())?;
    }
    csv_done(path, w)
}
