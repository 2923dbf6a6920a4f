//! Append-only campaign store in JSON Lines form: one campaign object per line.
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! reload reproduces every stored value bit for bit.

use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::campaign::Campaign;
use crate::error::{Error, Result};

#[derive(Debug)]
pub struct Database {
    path: PathBuf,
    entries: Vec<Campaign>,
    ids: HashSet<String>,
}

impl Database {
    /// Loads an existing database file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut entries = Vec::new();
        let mut ids = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let campaign: Campaign = serde_json::from_str(line).map_err(|e| Error::Parse {
                path: path.clone(),
                line: i + 1,
                message: e.to_string(),
            })?;
            if !ids.insert(campaign.id.clone()) {
                return Err(Error::Parse {
                    path: path.clone(),
                    line: i + 1,
                    message: format!("duplicate campaign id `{}`", campaign.id),
                });
            }
            entries.push(campaign);
        }
        Ok(Database { path, entries, ids })
    }

    /// Loads `path`, or starts an empty database there if the file does not exist yet.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Database {
                path: path.to_path_buf(),
                entries: Vec::new(),
                ids: HashSet::new(),
            })
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn entries(&self) -> &[Campaign] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    /// Returns `base` if unused, otherwise the first free `base~N`.
    pub fn unique_id(&self, base: &str) -> String {
        if !self.contains_id(base) {
            return base.to_string();
        }
        (2..)
            .map(|n| format!("{base}~{n}"))
            .find(|id| !self.contains_id(id))
            .expect("unbounded suffix search")
    }

    /// Appends one campaign as a single line and flushes it to disk.
    pub fn append(&mut self, campaign: Campaign) -> Result<()> {
        if self.ids.contains(&campaign.id) {
            return Err(Error::DuplicateId(campaign.id));
        }
        let mut line = serde_json::to_string(&campaign)?;
        line.push('\n');
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::io(&self.path, e))?;
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| Error::io(&self.path, e))?;
        self.ids.insert(campaign.id.clone());
        self.entries.push(campaign);
        Ok(())
    }

    pub fn campaigns_for<'a>(&'a self, surface: &'a str) -> impl Iterator<Item = &'a Campaign> + 'a {
        self.entries.iter().filter(move |c| c.surface == surface)
    }

    /// Distinct target ids in first-appearance order.
    pub fn targets(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        self.entries
            .iter()
            .filter(|c| seen.insert(c.surface.as_str()))
            .map(|c| c.surface.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::Observation;
    use crate::space::{Goal, ParamSpace};

    fn campaign(id: &str, values: &[f64]) -> Campaign {
        let space = ParamSpace::uniform(2, -5.0, 5.0).unwrap();
        let mut c = Campaign::new(id, "RandomSearch", "dejong:d=2", Goal::Minimize, 7, space.clone());
        for (i, v) in values.iter().enumerate() {
            let x = space.vector(vec![0.1 * i as f64, -1.0 / 3.0]).unwrap();
            c.record(Observation::new(x, *v, i as u64 + 1).unwrap()).unwrap();
        }
        c
    }

    #[test]
    fn append_then_load_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.jsonl");
        let mut db = Database::open(&path).unwrap();
        let c = campaign("a", &[std::f64::consts::PI, 1e-300, -0.1 + 0.2]);
        db.append(c.clone()).unwrap();
        let back = Database::load(&path).unwrap();
        assert_eq!(back.entries(), &[c.clone()]);
        for (a, b) in back.entries()[0].observations.iter().zip(&c.observations) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.timestamp, b.timestamp);
        }
    }

    #[test]
    fn empty_file_is_empty_database() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.jsonl");
        fs::write(&path, "").unwrap();
        assert!(Database::load(&path).unwrap().is_empty());
    }

    #[test]
    fn preserves_append_order_and_rejects_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.jsonl");
        let mut db = Database::open(&path).unwrap();
        db.append(campaign("b", &[1.0])).unwrap();
        db.append(campaign("a", &[2.0])).unwrap();
        assert!(matches!(db.append(campaign("a", &[3.0])), Err(Error::DuplicateId(_))));
        let ids: Vec<_> = Database::load(&path)
            .unwrap()
            .entries()
            .iter()
            .map(|c| c.id.clone())
            .collect();
        assert_eq!(ids, ["b", "a"]);
        assert_eq!(db.unique_id("a"), "a~2");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.jsonl");
        let good = serde_json::to_string(&campaign("a", &[1.0])).unwrap();
        fs::write(&path, format!("{good}\n{{not json\n")).unwrap();
        match Database::load(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn line_has_the_documented_keys() {
        let v: serde_json::Value = serde_json::to_value(campaign("a", &[1.0])).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["goal", "id", "observations", "planner", "seed", "space", "surface"]);
    }
}
