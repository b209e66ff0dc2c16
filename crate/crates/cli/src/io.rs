//! Dataset ingestion: edge lists, point clouds and label files.

use std::fs;
use std::path::Path;

use matr_core::{AdjacencyMatrix, Matrix};

use crate::CliError;

/// Whitespace-separated `u v` pairs, 0-indexed. `#` starts a comment, and a
/// `#n=<N>` line fixes the node count. Duplicates and reversed pairs collapse
/// into one edge; self-loops are dropped with a warning.
pub fn load_edge_list(path: &Path) -> Result<AdjacencyMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_edge_list(&text)
}

pub fn parse_edge_list(text: &str) -> Result<AdjacencyMatrix, CliError> {
    let mut edges = Vec::new();
    let mut declared_n: Option<usize> = None;
    let mut max_index: Option<usize> = None;
    let mut loops = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("n=") {
                let n = v.trim().parse().map_err(|_| CliError::parse(lineno + 1, "bad #n= header"))?;
                declared_n = Some(n);
            }
            continue;
        }
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut it = body.split_whitespace();
        let (Some(u), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(CliError::parse(lineno + 1, "expected two node indices"));
        };
        let u: usize = u.parse().map_err(|_| CliError::parse(lineno + 1, format!("bad node index {u:?}")))?;
        let v: usize = v.parse().map_err(|_| CliError::parse(lineno + 1, format!("bad node index {v:?}")))?;
        max_index = Some(max_index.map_or(u.max(v), |m| m.max(u).max(v)));
        if u == v {
            loops += 1;
            continue;
        }
        edges.push((u, v));
    }
    if loops > 0 {
        log::warn!("dropped {loops} self-loop(s)");
    }
    let n = match (declared_n, max_index) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };
    if let Some(m) = max_index {
        if m >= n {
            return Err(CliError::Config(format!("node {m} exceeds declared #n={n}")));
        }
    }
    Ok(AdjacencyMatrix::from_edges(n, edges)?)
}

/// Rectangular numeric CSV. A first line with any non-numeric cell is taken
/// as a header. With `standardize`, each column is shifted to mean 0 and
/// scaled to variance 1; constant columns become 0.
pub fn load_points_csv(path: &Path, standardize: bool) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_points_csv(&text, standardize)
}

pub fn parse_points_csv(text: &str, standardize: bool) -> Result<Matrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::parse(idx + 1, e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) => {
                if let Some(first) = rows.first() {
                    if first.len() != r.len() {
                        return Err(CliError::parse(
                            idx + 1,
                            format!("{} fields, expected {}", r.len(), first.len()),
                        ));
                    }
                }
                rows.push(r);
            }
            Err(_) if idx == 0 => continue,
            Err(_) => return Err(CliError::parse(idx + 1, "non-numeric cell")),
        }
    }
    if rows.is_empty() {
        return Err(CliError::Config("no numeric rows".into()));
    }
    let mut m = Matrix::from_rows(&rows)?;
    if standardize {
        let (n, d) = (m.rows(), m.cols());
        for j in 0..d {
            let mean = (0..n).map(|i| m.get(i, j)).sum::<f64>() / n as f64;
            let var = (0..n).map(|i| (m.get(i, j) - mean).powi(2)).sum::<f64>() / n as f64;
            let sd = var.sqrt();
            for i in 0..n {
                let v = if sd > 1e-12 { (m.get(i, j) - mean) / sd } else { 0.0 };
                m.set(i, j, v);
            }
        }
    }
    Ok(m)
}

/// One integer label per line (blank lines and `#` comments skipped), or
/// `node label` pairs.
pub fn load_labels(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_labels(&text)
}

pub fn parse_labels(text: &str) -> Result<Vec<usize>, CliError> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut plain: Vec<usize> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| CliError::parse(lineno + 1, format!("bad label {s:?}")));
        match fields.as_slice() {
            [l] => plain.push(num(l)?),
            [i, l] => pairs.push((num(i)?, num(l)?)),
            _ => return Err(CliError::parse(lineno + 1, "expected `label` or `node label`")),
        }
    }
    if !pairs.is_empty() && !plain.is_empty() {
        return Err(CliError::Config("mixed label formats".into()));
    }
    if pairs.is_empty() {
        return Ok(plain);
    }
    let n = pairs.iter().map(|p| p.0).max().unwrap() + 1;
    let mut out = vec![usize::MAX; n];
    for (i, l) in pairs {
        out[i] = l;
    }
    if let Some(i) = out.iter().position(|&l| l == usize::MAX) {
        return Err(CliError::Config(format!("node {i} has no label")));
    }
    Ok(out)
}
