//! On-disk cache of point counts, one JSON file per surface fingerprint.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::CountError;

#[derive(Debug, Default, Serialize, Deserialize)]
struct Entry {
    p: u64,
    counts: BTreeMap<u32, u64>,
}

pub struct CountCache {
    dir: PathBuf,
    lock: Mutex<()>,
}

impl CountCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<CountCache, CountError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| CountError::Cache(e.to_string()))?;
        Ok(CountCache {
            dir,
            lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, fingerprint: &str) -> PathBuf {
        self.dir.join(format!("{fingerprint}.json"))
    }

    fn load(&self, fingerprint: &str) -> Result<Option<Entry>, CountError> {
        let path = self.path(fingerprint);
        match fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map(Some)
                .map_err(|e| CountError::Cache(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(CountError::Cache(e.to_string())),
        }
    }

    pub fn get(&self, fingerprint: &str, n: u32) -> Result<Option<u64>, CountError> {
        let _g = self.lock.lock().expect("cache lock");
        Ok(self.load(fingerprint)?.and_then(|e| e.counts.get(&n).copied()))
    }

    pub fn put(&self, fingerprint: &str, p: u64, n: u32, count: u64) -> Result<(), CountError> {
        let _g = self.lock.lock().expect("cache lock");
        let mut entry = self.load(fingerprint)?.unwrap_or(Entry {
            p,
            counts: BTreeMap::new(),
        });
        entry.counts.insert(n, count);
        let bytes = serde_json::to_vec_pretty(&entry).map_err(|e| CountError::Cache(e.to_string()))?;
        // write then rename so readers never see a partial file
        let err = |e: std::io::Error| CountError::Cache(e.to_string());
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(err)?;
        tmp.write_all(&bytes).map_err(err)?;
        tmp.persist(self.path(fingerprint))
            .map_err(|e| CountError::Cache(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = CountCache::new(dir.path()).unwrap();
        assert_eq!(c.get("abc", 1).unwrap(), None);
        c.put("abc", 3, 1, 15).unwrap();
        c.put("abc", 3, 2, 99).unwrap();
        let c2 = CountCache::new(dir.path()).unwrap();
        assert_eq!(c2.get("abc", 1).unwrap(), Some(15));
        assert_eq!(c2.get("abc", 2).unwrap(), Some(99));
        assert_eq!(c2.get("abc", 3).unwrap(), None);
    }
}
