//! JSON tuple files: `{"d": .., "n": .., "entries": [[[[re, im], ..], ..], ..]}`
//! with each entry a row-major `d × d` matrix.

use std::fs;
use std::path::Path;

use ncinterp_core::{ComplexMatrix, MatrixTuple, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleFile {
    pub d: usize,
    pub n: usize,
    pub entries: Vec<Vec<Vec<[f64; 2]>>>,
}

impl TupleFile {
    pub fn from_tuple(x: &MatrixTuple) -> Self {
        let d = x.dim();
        let entries = x
            .iter()
            .map(|m| {
                (0..d)
                    .map(|i| (0..d).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
                    .collect()
            })
            .collect();
        Self { d, n: x.len(), entries }
    }

    pub fn to_tuple(&self) -> Result<MatrixTuple, CliError> {
        let shape = |msg: String| CliError::Input(msg);
        if self.d == 0 || self.n == 0 {
            return Err(shape(format!("d = {} and n = {} must be positive", self.d, self.n)));
        }
        if self.entries.len() != self.n {
            return Err(shape(format!(
                "n = {} but {} entries are present",
                self.n,
                self.entries.len()
            )));
        }
        let mut mats = Vec::with_capacity(self.n);
        for (k, rows) in self.entries.iter().enumerate() {
            if rows.len() != self.d {
                return Err(shape(format!("entry {k} has {} rows, expected {}", rows.len(), self.d)));
            }
            let mut flat = Vec::with_capacity(self.d * self.d);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != self.d {
                    return Err(shape(format!(
                        "entry {k}, row {i} has {} columns, expected {}",
                        row.len(),
                        self.d
                    )));
                }
                for (j, &[re, im]) in row.iter().enumerate() {
                    if !(re.is_finite() && im.is_finite()) {
                        return Err(shape(format!("entry {k}, element ({i}, {j}) is not finite")));
                    }
                    flat.push(C64::new(re, im));
                }
            }
            mats.push(ComplexMatrix::from_row_slice(self.d, &flat)?);
        }
        Ok(MatrixTuple::new(mats)?)
    }
}

pub fn load_tuple(path: &Path) -> Result<MatrixTuple, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: TupleFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    file.to_tuple().map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// One matrix per line.
pub fn tuple_json(x: &MatrixTuple) -> String {
    let file = TupleFile::from_tuple(x);
    let entries: Vec<String> = file
        .entries
        .iter()
        .map(|e| serde_json::to_string(e).expect("finite entries serialize"))
        .collect();
    format!(
        "{{\n  \"d\": {},\n  \"n\": {},\n  \"entries\": [\n    {}\n  ]\n}}",
        file.d,
        file.n,
        entries.join(",\n    ")
    )
}

pub fn save_tuple(x: &MatrixTuple, path: &Path) -> Result<(), CliError> {
    fs::write(path, tuple_json(x) + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
