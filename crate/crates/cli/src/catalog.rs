//! Append-only JSON-lines catalog of forms keyed by their invariant tuple
//! (rank, signature, discriminant representative, sorted Hasse vector).
//! Writes are serialized through an exclusive file lock.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use fs2::FileExt;
use serde_json::{json, Value};

use qfe_core::json as qjson;
use qfe_core::quadform::QuadraticForm;

pub fn catalog_path(cli_override: Option<&Path>) -> PathBuf {
    if let Some(p) = cli_override {
        return p.to_path_buf();
    }
    if let Ok(p) = std::env::var("QFE_CATALOG") {
        return PathBuf::from(p);
    }
    PathBuf::from("qfe_catalog.jsonl")
}

/// Canonical invariant key of a form over Q.
pub fn canonical_key(f: &QuadraticForm) -> anyhow::Result<Value> {
    let profile = f.invariant_profile()?;
    // record only the places with Hasse invariant -1: the invariant is +1
    // almost everywhere, so this is diagonalization-independent
    let hasse: Vec<Value> = profile
        .hasse
        .iter()
        .filter(|(_, e)| **e == -1)
        .map(|(p, e)| json!([p.to_string(), e]))
        .collect();
    Ok(json!({
        "rank": profile.rank,
        "signature": profile.signatures,
        "disc": profile.disc.representative().to_string(),
        "hasse": hasse,
    }))
}

pub struct Catalog {
    path: PathBuf,
}

impl Catalog {
    pub fn open(path: PathBuf) -> Catalog {
        Catalog { path }
    }

    fn read_entries(&self) -> anyhow::Result<Vec<Value>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let file = std::fs::File::open(&self.path)
            .with_context(|| format!("cannot open catalog {}", self.path.display()))?;
        file.lock_shared()?;
        let mut out = Vec::new();
        for line in BufReader::new(&file).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line).context("corrupt catalog line")?);
        }
        FileExt::unlock(&file)?;
        Ok(out)
    }

    fn append(&self, entry: &Value) -> anyhow::Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(&self.path)
            .with_context(|| format!("cannot open catalog {}", self.path.display()))?;
        file.lock_exclusive()?;
        file.seek(SeekFrom::End(0))?;
        writeln!(file, "{entry}")?;
        file.flush()?;
        FileExt::unlock(&file)?;
        Ok(())
    }

    /// Insert a form; enforces that key collisions only happen between
    /// equivalent forms.
    pub fn add(&self, f: &QuadraticForm) -> anyhow::Result<Value> {
        let key = canonical_key(f)?;
        for entry in self.read_entries()? {
            if entry.get("kind").and_then(Value::as_str) != Some("form") {
                continue;
            }
            if entry.get("key") == Some(&key) {
                let stored = qjson::form_from_json(
                    entry.get("form").ok_or_else(|| anyhow!("corrupt entry"))?,
                )?;
                if !f.equivalent_over_q(&stored)?.0 {
                    bail!(
                        "catalog integrity error: key collision between inequivalent forms \
                         (invariant bug)"
                    );
                }
            }
        }
        let entry = json!({"kind": "form", "key": key, "form": qjson::form_to_json(f)});
        self.append(&entry)?;
        Ok(entry)
    }

    /// All stored forms whose key matches the given form's key.
    pub fn query(&self, f: &QuadraticForm) -> anyhow::Result<(Value, Vec<Value>)> {
        let key = canonical_key(f)?;
        let matches: Vec<Value> = self
            .read_entries()?
            .into_iter()
            .filter(|e| {
                e.get("kind").and_then(Value::as_str) == Some("form") && e.get("key") == Some(&key)
            })
            .collect();
        Ok((key, matches))
    }

    /// Record an extension edge f -> g with its q.
    pub fn link(&self, f: &QuadraticForm, g: &QuadraticForm, q: &Value) -> anyhow::Result<Value> {
        let entry = json!({
            "kind": "link",
            "from_key": canonical_key(f)?,
            "to_key": canonical_key(g)?,
            "q": q,
        });
        self.append(&entry)?;
        Ok(entry)
    }
}
