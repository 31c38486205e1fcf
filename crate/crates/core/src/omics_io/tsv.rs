use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::{ClinicalRecord, ClinicalTable, LabeledDataset, OmicKind, OmicsMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Replace missing cells with the mean of the observed values of that feature.
    pub impute_mean: bool,
    /// Unit tag; defaults to the conventional unit of the omic kind.
    pub unit: Option<String>,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "null" | "NULL")
}

fn parse_err(origin: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Parse a feature-by-sample TSV matrix and transpose it to sample-by-feature.
pub fn parse_omic_matrix(
    text: &str,
    omic_kind: OmicKind,
    opts: &ParseOptions,
    origin: &Path,
) -> Result<OmicsMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(origin, 1, "no header"))?;
    let sample_ids: Vec<String> = header
        .trim_end_matches('\r')
        .split('\t')
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    if sample_ids.is_empty() || sample_ids.iter().any(String::is_empty) {
        return Err(parse_err(origin, 1, "malformed header"));
    }
    let n_samples = sample_ids.len();

    let mut feature_ids = Vec::new();
    // feature-major buffer; None marks a missing cell
    let mut cells: Vec<Option<f64>> = Vec::new();
    for (lineno, line) in lines {
        let mut parts = line.trim_end_matches('\r').split('\t');
        let id = parts.next().unwrap_or_default().trim().to_string();
        let row: Vec<&str> = parts.map(str::trim).collect();
        if row.len() != n_samples {
            return Err(parse_err(
                origin,
                lineno + 1,
                format!("expected {n_samples} values, found {}", row.len()),
            ));
        }
        for cell in row {
            if is_missing(cell) {
                if !opts.impute_mean {
                    return Err(parse_err(
                        origin,
                        lineno + 1,
                        format!("missing value for feature {id:?}"),
                    ));
                }
                cells.push(None);
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => cells.push(Some(v)),
                _ if opts.impute_mean => cells.push(None),
                _ => {
                    return Err(parse_err(
                        origin,
                        lineno + 1,
                        format!("non-numeric cell {cell:?} for feature {id:?}"),
                    ))
                }
            }
        }
        feature_ids.push(id);
    }

    let n_features = feature_ids.len();
    let mut values = Array2::<f64>::zeros((n_samples, n_features));
    for j in 0..n_features {
        let col = &cells[j * n_samples..(j + 1) * n_samples];
        let observed: Vec<f64> = col.iter().flatten().copied().collect();
        let fill = if observed.len() < col.len() {
            if observed.is_empty() {
                return Err(Error::invalid(format!(
                    "feature {:?} has no observed values to impute from",
                    feature_ids[j]
                )));
            }
            observed.iter().sum::<f64>() / observed.len() as f64
        } else {
            0.0
        };
        for (i, c) in col.iter().enumerate() {
            values[[i, j]] = c.unwrap_or(fill);
        }
    }
    let unit = opts
        .unit
        .clone()
        .unwrap_or_else(|| omic_kind.default_unit().to_string());
    OmicsMatrix::new(omic_kind, feature_ids, sample_ids, values, unit)
}

pub fn read_omic_matrix(
    path: impl AsRef<Path>,
    omic_kind: OmicKind,
    opts: &ParseOptions,
) -> Result<OmicsMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_omic_matrix(&text, omic_kind, opts, path)
}

/// Write any sample-by-feature matrix in the on-disk feature-by-sample dialect.
pub fn write_feature_matrix<W: Write>(
    mut w: W,
    feature_ids: &[String],
    sample_ids: &[String],
    values: &Array2<f64>,
) -> std::io::Result<()> {
    write!(w, "sample")?;
    for s in sample_ids {
        write!(w, "\t{s}")?;
    }
    writeln!(w)?;
    for (j, f) in feature_ids.iter().enumerate() {
        write!(w, "{f}")?;
        for v in values.column(j) {
            write!(w, "\t{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_omic_matrix<W: Write>(w: W, m: &OmicsMatrix) -> std::io::Result<()> {
    write_feature_matrix(w, m.feature_ids(), m.sample_ids(), m.values())
}

/// Marker for the label row of a labeled-dataset file.
pub const LABEL_ROW: &str = "#label";

/// Labeled dataset in the same feature-by-sample layout as omic inputs, with
/// a `#label` row (0 = LUSC, 1 = LUAD) directly under the header.
pub fn write_labeled_dataset<W: Write>(mut w: W, d: &LabeledDataset) -> std::io::Result<()> {
    write!(w, "sample")?;
    for s in d.sample_ids() {
        write!(w, "\t{s}")?;
    }
    writeln!(w)?;
    write!(w, "{LABEL_ROW}")?;
    for l in d.labels() {
        write!(w, "\t{l}")?;
    }
    writeln!(w)?;
    for (j, f) in d.feature_ids().iter().enumerate() {
        write!(w, "{f}")?;
        for v in d.values().column(j) {
            write!(w, "\t{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn parse_labeled_dataset(text: &str, origin: &Path) -> Result<LabeledDataset> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(origin, 1, "no header"))?;
    let sample_ids: Vec<String> = header
        .trim_end_matches('\r')
        .split('\t')
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    if sample_ids.is_empty() {
        return Err(parse_err(origin, 1, "malformed header"));
    }
    let (lno, label_line) = lines
        .next()
        .ok_or_else(|| parse_err(origin, 2, "missing label row"))?;
    let mut cells = label_line.trim_end_matches('\r').split('\t');
    if cells.next() != Some(LABEL_ROW) {
        return Err(parse_err(origin, lno + 1, "expected label row"));
    }
    let labels = cells
        .map(|c| {
            c.trim()
                .parse::<u8>()
                .map_err(|_| parse_err(origin, lno + 1, format!("bad label {c:?}")))
        })
        .collect::<Result<Vec<u8>>>()?;
    if labels.len() != sample_ids.len() {
        return Err(parse_err(
            origin,
            lno + 1,
            "label count differs from sample count",
        ));
    }
    let mut feature_ids = Vec::new();
    let mut data = Vec::new();
    for (lno, line) in lines {
        let mut cells = line.trim_end_matches('\r').split('\t');
        let id = cells.next().unwrap_or_default().trim().to_string();
        let row = cells
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(origin, lno + 1, format!("non-numeric cell {c:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != sample_ids.len() {
            return Err(parse_err(origin, lno + 1, "row length differs from header"));
        }
        feature_ids.push(id);
        data.push(row);
    }
    let values = Array2::from_shape_fn((sample_ids.len(), feature_ids.len()), |(i, j)| data[j][i]);
    LabeledDataset::new(feature_ids, sample_ids, values, labels)
}

pub fn read_labeled_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labeled_dataset(&text, path)
}

const CLINICAL_COLUMNS: [&str; 3] = ["sample_id", "subtype", "sample_type"];

pub fn parse_clinical(text: &str, origin: &Path) -> Result<ClinicalTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(origin, 1, "no header"))?;
    let columns: Vec<&str> = header
        .trim_end_matches('\r')
        .split('\t')
        .map(str::trim)
        .collect();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| parse_err(origin, 1, format!("missing column {name:?}")))
    };
    let id_col = find(CLINICAL_COLUMNS[0])?;
    let subtype_col = find(CLINICAL_COLUMNS[1])?;
    let type_col = find(CLINICAL_COLUMNS[2])?;

    let mut records = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line
            .trim_end_matches('\r')
            .split('\t')
            .map(str::trim)
            .collect();
        if cells.len() != columns.len() {
            return Err(parse_err(
                origin,
                lineno + 1,
                format!("expected {} columns, found {}", columns.len(), cells.len()),
            ));
        }
        let wrap = |e: Error| parse_err(origin, lineno + 1, e.to_string());
        let attributes: BTreeMap<String, String> = columns
            .iter()
            .enumerate()
            .filter(|(i, _)| ![id_col, subtype_col, type_col].contains(i))
            .map(|(i, c)| (c.to_string(), cells[i].to_string()))
            .collect();
        records.push(ClinicalRecord {
            sample_id: cells[id_col].to_string(),
            subtype: cells[subtype_col].parse().map_err(wrap)?,
            sample_type: cells[type_col].parse().map_err(wrap)?,
            attributes,
        });
    }
    ClinicalTable::new(records)
}

pub fn read_clinical(path: impl AsRef<Path>) -> Result<ClinicalTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_clinical(&text, path)
}

pub fn write_clinical<W: Write>(mut w: W, c: &ClinicalTable) -> std::io::Result<()> {
    let extra: Vec<String> = c
        .records()
        .iter()
        .flat_map(|r| r.attributes.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    write!(w, "{}", CLINICAL_COLUMNS.join("\t"))?;
    for k in &extra {
        write!(w, "\t{k}")?;
    }
    writeln!(w)?;
    for r in c.records() {
        write!(
            w,
            "{}\t{}\t{}",
            r.sample_id,
            r.subtype.as_str(),
            r.sample_type.as_str()
        )?;
        for k in &extra {
            write!(
                w,
                "\t{}",
                r.attributes.get(k).map(String::as_str).unwrap_or("")
            )?;
        }
        writeln!(w)?;
    }
    Ok(())
}
