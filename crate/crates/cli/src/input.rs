use serde::Deserialize;
use svfkit_core::multilinear::{FMat, QMat};
use svfkit_core::{parse_rational, MatrixTuple};

/// On-disk tuple schema: dimension, backend tag, matrices with string
/// entries (`"p/q"` for the rational backend, decimal for the float
/// backend), and optional labels.
#[derive(Debug, Deserialize)]
pub struct TupleFile {
    pub dimension: usize,
    pub scalars: String,
    pub matrices: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

pub fn parse_input(path: &std::path::Path) -> Result<MatrixTuple, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let file: TupleFile = serde_json::from_str(&text)
        .map_err(|e| format!("{} is not a valid tuple file: {e}", path.display()))?;
    let d = file.dimension;
    if file.matrices.len() < 2 {
        return Err(format!(
            "{}: a tuple needs at least 2 matrices, found {}",
            path.display(),
            file.matrices.len()
        ));
    }
    for (mi, rows) in file.matrices.iter().enumerate() {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(format!(
                "{}: matrix {} is not {d}x{d}",
                path.display(),
                mi + 1
            ));
        }
    }
    match file.scalars.as_str() {
        "rational" => {
            let mut mats = Vec::with_capacity(file.matrices.len());
            for (mi, rows) in file.matrices.iter().enumerate() {
                let parsed: Result<Vec<Vec<_>>, String> = rows
                    .iter()
                    .enumerate()
                    .map(|(ri, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(ci, entry)| {
                                parse_rational(entry).map_err(|e| {
                                    format!(
                                        "matrix {} row {} column {}: {e}",
                                        mi + 1,
                                        ri + 1,
                                        ci + 1
                                    )
                                })
                            })
                            .collect()
                    })
                    .collect();
                let mat = QMat::from_rows(parsed?).map_err(|e| e.to_string())?;
                mats.push(mat);
            }
            MatrixTuple::from_rational(mats, file.labels).map_err(|e| e.to_string())
        }
        "float" => {
            let mut mats = Vec::with_capacity(file.matrices.len());
            for (mi, rows) in file.matrices.iter().enumerate() {
                let parsed: Result<Vec<Vec<f64>>, String> = rows
                    .iter()
                    .enumerate()
                    .map(|(ri, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(ci, entry)| {
                                entry.trim().parse::<f64>().map_err(|_| {
                                    format!(
                                        "matrix {} row {} column {}: cannot parse {entry:?} \
                                         as a decimal",
                                        mi + 1,
                                        ri + 1,
                                        ci + 1
                                    )
                                })
                            })
                            .collect()
                    })
                    .collect();
                let mat = FMat::from_rows(parsed?).map_err(|e| e.to_string())?;
                mats.push(mat);
            }
            MatrixTuple::from_float(mats, file.labels).map_err(|e| e.to_string())
        }
        other => Err(format!(
            "{}: scalars must be \"rational\" or \"float\", got {other:?}",
            path.display()
        )),
    }
}
