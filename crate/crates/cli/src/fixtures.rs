//! Bundled verification corpus and loading of replacement corpora.
//!
//! The fixtures are embedded so the binary is self-contained; the same
//! files ship in `fixtures/` for direct CLI use. A replacement directory
//! must provide files with the same names (extension `.cfg` or `.cone`),
//! since the expectations in the check registry are keyed by name.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureKind {
    Config,
    Cone,
}

/// The corpus a verification run works on: fixture name -> contents.
#[derive(Clone, Debug)]
pub struct FixtureSet {
    entries: BTreeMap<String, (FixtureKind, String)>,
}

const BUNDLED: &[(&str, FixtureKind, &str)] = &[
    (
        "semistable.cfg",
        FixtureKind::Config,
        include_str!("../fixtures/semistable.cfg"),
    ),
    (
        "multifiber.cfg",
        FixtureKind::Config,
        include_str!("../fixtures/multifiber.cfg"),
    ),
    (
        "chain.cfg",
        FixtureKind::Config,
        include_str!("../fixtures/chain.cfg"),
    ),
    (
        "adversarial.cfg",
        FixtureKind::Config,
        include_str!("../fixtures/adversarial.cfg"),
    ),
    (
        "g1_pass.cone",
        FixtureKind::Cone,
        include_str!("../fixtures/g1_pass.cone"),
    ),
    (
        "g1_oddmu.cone",
        FixtureKind::Cone,
        include_str!("../fixtures/g1_oddmu.cone"),
    ),
    (
        "g1_rough.cone",
        FixtureKind::Cone,
        include_str!("../fixtures/g1_rough.cone"),
    ),
    (
        "g2_pass.cone",
        FixtureKind::Cone,
        include_str!("../fixtures/g2_pass.cone"),
    ),
    (
        "g1_swap.cone",
        FixtureKind::Cone,
        include_str!("../fixtures/g1_swap.cone"),
    ),
];

impl FixtureSet {
    pub fn bundled() -> Self {
        let entries = BUNDLED
            .iter()
            .map(|(name, kind, text)| (name.to_string(), (*kind, text.to_string())))
            .collect();
        FixtureSet { entries }
    }

    /// Load `.cfg`/`.cone` files from a directory, replacing the bundled
    /// corpus. Every bundled name must be present.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
            let path = entry?.path();
            let kind = match path.extension().and_then(|e| e.to_str()) {
                Some("cfg") => FixtureKind::Config,
                Some("cone") => FixtureKind::Cone,
                _ => continue,
            };
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .map(str::to_string)
                .context("non-utf8 fixture name")?;
            let text =
                fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            entries.insert(name, (kind, text));
        }
        for (name, _, _) in BUNDLED {
            if !entries.contains_key(*name) {
                bail!("fixture directory {} is missing {name}", dir.display());
            }
        }
        Ok(FixtureSet { entries })
    }

    pub fn get(&self, name: &str) -> Result<&str> {
        match self.entries.get(name) {
            Some((_, text)) => Ok(text),
            None => bail!("unknown fixture `{name}`"),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, FixtureKind, &str)> {
        self.entries
            .iter()
            .map(|(name, (kind, text))| (name.as_str(), *kind, text.as_str()))
    }

    /// Stable digest input: every fixture name and body in sorted order.
    pub fn digest_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (name, (_, text)) in &self.entries {
            out.extend_from_slice(name.as_bytes());
            out.push(0);
            out.extend_from_slice(text.as_bytes());
            out.push(0);
        }
        out
    }
}
