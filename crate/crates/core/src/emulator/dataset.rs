//! Tabular experiment datasets: a CSV of measurements plus a JSON sidecar
//! declaring the parameter bounds, the target column and the goal.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Goal, ParamSpace};

pub const MIN_ROWS: usize = 10;
pub const META_SUFFIX: &str = ".meta.json";

/// Contents of `<name>.meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub params: ParamSpace,
    pub target: String,
    #[serde(default)]
    pub goal: Goal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetTable {
    pub name: String,
    pub space: ParamSpace,
    pub target_name: String,
    pub goal: Goal,
    /// Feature values followed by the target, one entry per row.
    pub rows: Vec<Vec<f64>>,
}

impl DatasetTable {
    pub fn new(
        name: impl Into<String>,
        space: ParamSpace,
        target_name: impl Into<String>,
        goal: Goal,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let table = DatasetTable {
            name: name.into(),
            space,
            target_name: target_name.into(),
            goal,
            rows,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let d = self.space.dim();
        if self.rows.len() < MIN_ROWS {
            return Err(Error::Config(format!(
                "dataset `{}` has {} rows; at least {MIN_ROWS} are required",
                self.name,
                self.rows.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != d + 1 {
                return Err(Error::Contract(format!("row {} has {} values, expected {}", i + 1, row.len(), d + 1)));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("row {} of dataset `{}`", i + 1, self.name)));
            }
            if !self.space.contains(&row[..d]) {
                return Err(Error::Domain(format!(
                    "row {} of dataset `{}` lies outside the declared bounds",
                    i + 1,
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.rows[i][..self.dim()]
    }

    pub fn target(&self, i: usize) -> f64 {
        self.rows[i][self.dim()]
    }

    pub fn targets(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.target(i)).collect()
    }

    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            params: self.space.clone(),
            target: self.target_name.clone(),
            goal: self.goal,
        }
    }

    /// Reads `path` and its sidecar `<stem>.meta.json` from the same directory.
    pub fn ingest(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let name = dataset_name(path)?;
        Self::ingest_with_meta(path, path.with_file_name(format!("{name}{META_SUFFIX}")))
    }

    /// Reads `path` against metadata stored at `meta_path`.
    pub fn ingest_with_meta(path: impl AsRef<Path>, meta_path: impl AsRef<Path>) -> Result<Self> {
        let (path, meta_path) = (path.as_ref(), meta_path.as_ref());
        let name = dataset_name(path)?;
        let meta_text = fs::read_to_string(meta_path).map_err(|e| Error::io(meta_path, e))?;
        let meta: DatasetMeta = serde_json::from_str(&meta_text).map_err(|e| Error::Parse {
            path: meta_path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(name, meta, path, file)
    }

    /// Finds the single `*.csv` with a sidecar in `dir` and ingests it.
    pub fn ingest_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if dir.is_file() {
            return Self::ingest(dir);
        }
        let mut found: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        found.sort();
        match found.as_slice() {
            [one] => Self::ingest(one),
            [] => Err(Error::NotFound(format!("no .csv dataset in {}", dir.display()))),
            _ => Err(Error::Config(format!(
                "{} holds several datasets; name the .csv file instead",
                dir.display()
            ))),
        }
    }

    fn from_reader(name: String, meta: DatasetMeta, path: &Path, reader: impl std::io::Read) -> Result<Self> {
        let ingest_err = |row: usize, column: &str, message: String| Error::Ingest {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            message,
        };
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = csv
            .headers()
            .map_err(|e| ingest_err(0, "", e.to_string()))?
            .clone();
        let mut columns: Vec<(String, usize)> = Vec::new();
        let wanted = meta.params.params().iter().map(|p| p.name.as_str()).chain([meta.target.as_str()]);
        for column in wanted {
            let idx = header
                .iter()
                .position(|h| h == column)
                .ok_or_else(|| ingest_err(0, column, "missing column".into()))?;
            columns.push((column.to_string(), idx));
        }
        let d = meta.params.dim();
        let mut rows = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let row_no = i + 1;
            let record = record.map_err(|e| ingest_err(row_no, "", e.to_string()))?;
            let mut row = Vec::with_capacity(d + 1);
            for (k, (column, idx)) in columns.iter().enumerate() {
                let cell = record.get(*idx).unwrap_or("");
                let v: f64 = cell
                    .parse()
                    .map_err(|_| ingest_err(row_no, column, format!("non-numeric cell `{cell}`")))?;
                if !v.is_finite() {
                    return Err(ingest_err(row_no, column, format!("non-finite cell `{cell}`")));
                }
                if k < d {
                    let p = &meta.params.params()[k];
                    if v < p.low || v > p.high {
                        return Err(ingest_err(
                            row_no,
                            column,
                            format!("{v} outside [{}, {}]", p.low, p.high),
                        ));
                    }
                }
                row.push(v);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(ingest_err(0, "", "no data rows".into()));
        }
        if rows.len() < MIN_ROWS {
            return Err(ingest_err(
                rows.len(),
                "",
                format!("{} data rows; at least {MIN_ROWS} are required", rows.len()),
            ));
        }
        Ok(DatasetTable {
            name,
            space: meta.params.clone(),
            target_name: meta.target,
            goal: meta.goal,
            rows,
        })
    }

    /// Writes `<dir>/<name>.csv` and its sidecar; returns the CSV path.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&csv_path).map_err(|e| Error::Config(e.to_string()))?;
        let header: Vec<&str> = self
            .space
            .params()
            .iter()
            .map(|p| p.name.as_str())
            .chain([self.target_name.as_str()])
            .collect();
        let csv_err = |e: csv::Error| Error::Config(format!("writing {}: {e}", csv_path.display()));
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(&csv_path, e))?;
        let meta_path = dir.join(format!("{}{META_SUFFIX}", self.name));
        let meta = serde_json::to_string_pretty(&self.meta())?;
        fs::write(&meta_path, meta + "\n").map_err(|e| Error::io(&meta_path, e))?;
        Ok(csv_path)
    }
}

fn dataset_name(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| Error::Config(format!("cannot derive a dataset name from {}", path.display())))
}

/// Row indices of a train/test partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded random partition with `⌈ratio·n⌉` training rows.
pub fn split(n: usize, ratio: f64, seed: u64) -> Result<Split> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Config(format!("split ratio must lie in (0, 1), got {ratio}")));
    }
    // The tolerance keeps e.g. 0.7 * 10 from rounding up to 8.
    let n_train = ((ratio * n as f64) - 1e-9).ceil() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::Config(format!(
            "{n} rows cannot be split {ratio} into two non-empty parts"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = idx.split_off(n_train);
    Ok(Split { train: idx, test })
}

/// Seeded partition of `rows` into `k` folds whose sizes differ by at most one.
pub fn folds(rows: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > rows.len() {
        return Err(Error::Config(format!(
            "cannot make {k} folds from {} rows (need 2 <= k <= rows)",
            rows.len()
        )));
    }
    let mut idx = rows.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    idx.shuffle(&mut rng);
    let (base, extra) = (idx.len() / k, idx.len() % k);
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        out.push(idx[start..start + size].to_vec());
        start += size;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::ParamDef;

    fn write_dataset(dir: &Path, csv: &str) -> PathBuf {
        let meta = r#"{"params":[{"name":"a","low":0,"high":1},{"name":"b","low":-1,"high":1}],"target":"y","goal":"maximize"}"#;
        fs::write(dir.join("demo.meta.json"), meta).unwrap();
        let p = dir.join("demo.csv");
        fs::write(&p, csv).unwrap();
        p
    }

    fn csv_rows(n: usize) -> String {
        let mut s = String::from("b,a,y,notes\n");
        for i in 0..n {
            s += &format!("{},{},{},x\n", -0.5 + 0.01 * i as f64, i as f64 / n as f64, i * 2);
        }
        s
    }

    #[test]
    fn ingests_columns_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let t = DatasetTable::ingest(write_dataset(dir.path(), &csv_rows(12))).unwrap();
        assert_eq!((t.len(), t.dim(), t.goal), (12, 2, Goal::Maximize));
        assert_eq!(t.rows[3], vec![0.25, -0.5 + 0.01 * 3.0, 6.0]);
        assert_eq!(t.name, "demo");
        assert_eq!(DatasetTable::ingest_dir(dir.path()).unwrap(), t);
    }

    #[test]
    fn header_only_has_no_data_rows() {
        let dir = tempfile::tempdir().unwrap();
        let err = DatasetTable::ingest(write_dataset(dir.path(), "a,b,y\n")).unwrap_err();
        assert!(err.to_string().contains("no data rows"), "{err}");
    }

    #[test]
    fn errors_name_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let mut csv = csv_rows(12);
        csv = csv.replacen("0.25,6", "1.25,6", 1);
        let err = DatasetTable::ingest(write_dataset(dir.path(), &csv)).unwrap_err();
        assert!(matches!(&err, Error::Ingest { row: 4, column, .. } if column == "a"), "{err}");

        let csv = csv_rows(12).replacen(",6,", ",six,", 1);
        let err = DatasetTable::ingest(write_dataset(dir.path(), &csv)).unwrap_err();
        assert!(matches!(&err, Error::Ingest { row: 4, column, .. } if column == "y"), "{err}");

        let err = DatasetTable::ingest(write_dataset(dir.path(), "a,y\n0.5,1\n")).unwrap_err();
        assert!(matches!(&err, Error::Ingest { column, .. } if column == "b"), "{err}");
    }

    #[test]
    fn missing_sidecar_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lonely.csv");
        fs::write(&p, csv_rows(12)).unwrap();
        assert!(matches!(DatasetTable::ingest(&p), Err(Error::Io { .. })));
    }

    #[test]
    fn write_then_ingest_round_trips() {
        let space = ParamSpace::new(vec![ParamDef::new("t", 20.0, 80.0)]).unwrap();
        let rows: Vec<Vec<f64>> = (0..15).map(|i| vec![20.0 + i as f64 * 0.1, 1.0 / (i + 1) as f64]).collect();
        let t = DatasetTable::new("rt", space, "yield", Goal::Minimize, rows).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let back = DatasetTable::ingest(t.write(dir.path()).unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn split_sizes_and_determinism() {
        let s = split(10, 0.8, 3).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (8, 2));
        assert_eq!(split(10, 0.8, 3).unwrap(), s);
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert_eq!(split(10, 0.7, 0).unwrap().train.len(), 7);
        assert_eq!(split(101, 0.8, 0).unwrap().train.len(), 81);
        assert_ne!(split(100, 0.8, 1).unwrap(), split(100, 0.8, 2).unwrap());
        assert!(split(1, 0.8, 0).is_err());
        assert!(split(10, 1.0, 0).is_err());
    }

    #[test]
    fn folds_partition_rows() {
        let rows: Vec<usize> = (100..200).collect();
        let f = folds(&rows, 5, 9).unwrap();
        assert!(f.iter().all(|fold| fold.len() == 20));
        let mut all: Vec<usize> = f.concat();
        all.sort_unstable();
        assert_eq!(all, rows);
        assert_eq!(folds(&rows, 5, 9).unwrap(), f);
        assert_eq!(folds(&rows[..7], 3, 0).unwrap().iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 2, 2]);
        assert!(folds(&rows, 1, 0).is_err());
    }
}
