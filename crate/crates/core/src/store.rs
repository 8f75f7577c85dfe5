//! Persistent memo of exact bracket values.
//!
//! On disk the cache is a single JSON document
//! `{"schema":1,"entries":{"<key>":"<num>/<den>", ...}}`. Keys must be
//! canonical; values are reduced rationals with an explicit denominator.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::bracket::parse_canonical_key;
use crate::error::{Error, Result};
use crate::rational::{from_wire, to_wire, Rational};

pub const SCHEMA_VERSION: u64 = 1;

/// Environment variable naming the cache file used by the CLI.
pub const CACHE_ENV: &str = "RSPIN_CACHE";

/// File used when neither `--cache` nor `RSPIN_CACHE` is given.
pub const DEFAULT_CACHE_FILE: &str = "rspin-cache.json";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CacheStore {
    entries: BTreeMap<String, Rational>,
    dirty: bool,
}

impl CacheStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schema_version(&self) -> u64 {
        SCHEMA_VERSION
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    pub fn get(&self, key: &str) -> Option<&Rational> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Inserts after checking that `key` is canonical.
    pub fn put(&mut self, key: &str, value: Rational) -> Result<()> {
        parse_canonical_key(key)?;
        self.put_canonical(key.to_string(), value);
        Ok(())
    }

    /// Inserts a key produced by a bracket's own `key()`.
    pub(crate) fn put_canonical(&mut self, key: String, value: Rational) {
        if self.entries.get(&key) != Some(&value) {
            self.entries.insert(key, value);
            self.dirty = true;
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::CacheParse {
            context: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let parse_err = |context: String, message: &str| Error::CacheParse {
            context,
            message: message.to_string(),
        };
        let obj = doc
            .as_object()
            .ok_or_else(|| parse_err("document".into(), "expected a JSON object"))?;
        let schema = obj
            .get("schema")
            .and_then(Value::as_u64)
            .ok_or_else(|| parse_err("schema".into(), "missing or non-integer schema"))?;
        if schema != SCHEMA_VERSION {
            return Err(Error::SchemaVersion(schema));
        }
        let raw = obj
            .get("entries")
            .and_then(Value::as_object)
            .ok_or_else(|| parse_err("entries".into(), "missing entries object"))?;
        let mut entries = BTreeMap::new();
        for (key, value) in raw {
            let ctx = || format!("entry {key:?}");
            parse_canonical_key(key).map_err(|e| parse_err(ctx(), &e.to_string()))?;
            let text = value
                .as_str()
                .ok_or_else(|| parse_err(ctx(), "value is not a string"))?;
            let q = from_wire(text).map_err(|e| parse_err(ctx(), &e.to_string()))?;
            entries.insert(key.clone(), q);
        }
        Ok(CacheStore { entries, dirty: false })
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        self.write_json(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("JSON is UTF-8")
    }

    fn write_json(&self, w: &mut dyn Write) -> io::Result<()> {
        let entries: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(to_wire(v))))
            .collect();
        write!(w, "{{\"schema\":{SCHEMA_VERSION},\"entries\":")?;
        serde_json::to_writer(&mut *w, &entries)?;
        w.write_all(b"}\n")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Loads `path`, or starts empty when the file does not exist yet.
    pub fn load_or_default(path: impl AsRef<Path>) -> Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&mut self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), |w| self.write_json(w))?;
        self.dirty = false;
        Ok(())
    }

    /// Adds every entry of `other`, overwriting on conflict.
    pub fn merge(&mut self, other: &CacheStore) {
        for (k, v) in &other.entries {
            self.put_canonical(k.clone(), v.clone());
        }
    }
}

/// Writes `path` through a sibling temporary file that is renamed over the
/// target only after `fill` succeeds and the data is synced. If `fill` fails
/// or panics the previous contents of `path` are left untouched.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let dir: PathBuf = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(&dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn put_get() {
        let mut s = CacheStore::new();
        s.put("g0:r=5:a=1,1,3,3", ratio(1, 5)).unwrap();
        assert_eq!(s.get("g0:r=5:a=1,1,3,3"), Some(&ratio(1, 5)));
        assert_eq!(s.get("g0:r=5:a=1,1,1,1"), None);
        assert!(s.is_dirty());
    }

    #[test]
    fn rejects_non_canonical_put() {
        let mut s = CacheStore::new();
        assert!(matches!(
            s.put("g0:r=5:a=3,1,3,1", ratio(1, 5)),
            Err(Error::NonCanonicalKey { .. })
        ));
        assert!(s.is_empty());
    }

    #[test]
    fn load_errors_carry_context() {
        assert!(matches!(CacheStore::from_json("{\"schema\":2,\"entries\":{}}"), Err(Error::SchemaVersion(2))));
        let err = CacheStore::from_json("{\"schema\":1,\n\"entries\":{\"g0:r=5:a=1,1,3,3\":\"1/0\"}}")
            .unwrap_err();
        match err {
            Error::CacheParse { context, .. } => assert!(context.contains("g0:r=5:a=1,1,3,3")),
            e => panic!("unexpected {e:?}"),
        }
        let err = CacheStore::from_json("{\"schema\":1,\n \"entries\": [").unwrap_err();
        match err {
            Error::CacheParse { context, .. } => assert!(context.starts_with("line 2")),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            CacheStore::from_json("{\"schema\":1,\"entries\":{\"dr1:r=4:k=-2,2:a=2,2\":\"1/32\"}}"),
            Err(Error::CacheParse { .. })
        ));
    }

    #[test]
    fn file_format() {
        let mut s = CacheStore::new();
        s.put("dr1:r=4:k=2,-2:a=2,2", ratio(1, 32)).unwrap();
        s.put("g0:r=3:a=0,0,1", ratio(1, 1)).unwrap();
        assert_eq!(
            s.to_json(),
            "{\"schema\":1,\"entries\":{\"dr1:r=4:k=2,-2:a=2,2\":\"1/32\",\"g0:r=3:a=0,0,1\":\"1/1\"}}\n"
        );
    }
}
