//! Embedding TSV files.
//!
//! ```text
//! # kappa=1.5
//! # loss=rel
//! node    x0      x1
//! a       0.125   -1.5
//! ```
//!
//! Numbers carry nine significant digits. The `# kappa=` line is always the
//! first comment; the `# loss=` line is optional.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::{EmbeddingSet, LossKind};
use crate::error::{Error, Result};
use crate::fmt::sig9;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingFile {
    pub names: Vec<String>,
    pub embedding: EmbeddingSet,
    pub loss: Option<LossKind>,
}

impl EmbeddingFile {
    /// Rows reordered to follow `order`, which must name exactly the stored nodes.
    pub fn reorder<'a>(&self, order: impl IntoIterator<Item = &'a str>) -> Result<EmbeddingSet> {
        let index: std::collections::HashMap<&str, usize> = self
            .names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let order: Vec<&str> = order.into_iter().collect();
        if order.len() != self.names.len() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} vertices, embedding has {} rows",
                order.len(),
                self.names.len()
            )));
        }
        let m = self.embedding.dim();
        let mut coords = Array2::zeros((order.len(), m));
        for (dst, name) in order.iter().enumerate() {
            let src = *index
                .get(name)
                .ok_or_else(|| Error::UnknownNode((*name).to_owned()))?;
            coords
                .row_mut(dst)
                .assign(&self.embedding.coords().row(src));
        }
        EmbeddingSet::new(coords, self.embedding.kappa())
    }
}

pub fn format_tsv<'a>(
    e: &EmbeddingSet,
    names: impl IntoIterator<Item = &'a str>,
    loss: Option<LossKind>,
) -> String {
    let mut out = String::new();
    writeln!(out, "# kappa={}", sig9(e.kappa())).unwrap();
    if let Some(loss) = loss {
        writeln!(out, "# loss={loss}").unwrap();
    }
    out.push_str("node");
    for c in 0..e.dim() {
        write!(out, "\tx{c}").unwrap();
    }
    out.push('\n');
    let mut count = 0;
    for (i, name) in names.into_iter().enumerate() {
        out.push_str(name);
        for &x in e.row(i) {
            out.push('\t');
            out.push_str(&sig9(x));
        }
        out.push('\n');
        count += 1;
    }
    assert_eq!(count, e.n(), "one name per embedding row");
    out
}

pub fn parse_tsv(text: &str) -> Result<EmbeddingFile> {
    let mut kappa = None;
    let mut loss = None;
    let mut dim = None;
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("kappa=") {
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("invalid kappa `{v}`")))?;
                kappa = Some(v);
            } else if let Some(v) = comment.strip_prefix("loss=") {
                loss = Some(
                    v.trim()
                        .parse()
                        .map_err(|e: Error| Error::parse(lineno, e.to_string()))?,
                );
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match dim {
            None => {
                if fields.first() != Some(&"node") {
                    return Err(Error::parse(lineno, "expected header starting with `node`"));
                }
                dim = Some(fields.len() - 1);
            }
            Some(m) => {
                if fields.len() != m + 1 {
                    return Err(Error::parse(
                        lineno,
                        format!("expected {} fields, found {}", m + 1, fields.len()),
                    ));
                }
                names.push(fields[0].to_owned());
                for f in &fields[1..] {
                    let x: f64 = f
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("invalid number `{f}`")))?;
                    values.push(x);
                }
            }
        }
    }
    let kappa = kappa.ok_or_else(|| Error::parse(1, "missing `# kappa=` line"))?;
    let m = dim.ok_or_else(|| Error::parse(1, "missing header"))?;
    let coords = Array2::from_shape_vec((names.len(), m), values)
        .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    Ok(EmbeddingFile {
        names,
        embedding: EmbeddingSet::new(coords, kappa)?,
        loss,
    })
}

pub fn read_tsv(path: impl AsRef<Path>) -> Result<EmbeddingFile> {
    parse_tsv(&fs::read_to_string(path)?)
}
