//! Service configuration file.
//!
//! ```toml
//! bind = "127.0.0.1"
//! port = 8080
//! did_model = "did.model.json"
//!
//! [dialects.msa]
//! db = "toy-msa.json"
//! tagger = "tagger-msa.model.json"
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use morphdis_core::{Dialect, DidModel, MorphDatabase, Pipeline, Registry, TaggerModel};
use serde::Deserialize;

pub const DEFAULT_CONFIG_PATH: &str = "morphdis.toml";

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialectPaths {
    pub db: PathBuf,
    pub tagger: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_bind")]
    pub bind: String,
    #[serde(default = "default_port")]
    pub port: u16,
    #[serde(default)]
    pub did_model: Option<PathBuf>,
    #[serde(default)]
    pub dialects: BTreeMap<Dialect, DialectPaths>,
}

fn default_bind() -> String {
    "127.0.0.1".into()
}

fn default_port() -> u16 {
    8080
}

impl ServiceConfig {
    pub fn parse(source: &str, base: &Path) -> anyhow::Result<Self> {
        let mut config: ServiceConfig = toml::from_str(source)?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = config.did_model.as_mut() {
            resolve(p);
        }
        for paths in config.dialects.values_mut() {
            resolve(&mut paths.db);
            resolve(&mut paths.tagger);
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let source = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&source, base).with_context(|| format!("parsing {}", path.display()))
    }

    /// Loads the file named by `explicit`, else `CONFIG_PATH`, else the
    /// default path, then applies the `PORT` override.
    pub fn from_env(explicit: Option<&Path>) -> anyhow::Result<Self> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => std::env::var_os("CONFIG_PATH")
                .map(PathBuf::from)
                .unwrap_or_else(|| DEFAULT_CONFIG_PATH.into()),
        };
        let mut config = Self::load(&path)?;
        if let Ok(port) = std::env::var("PORT") {
            config.port = port.parse().with_context(|| format!("invalid PORT {port:?}"))?;
        }
        Ok(config)
    }

    /// Reads every configured model; any unreadable file fails the load.
    pub fn load_pipeline(&self) -> anyhow::Result<Pipeline> {
        let mut registry = Registry::new();
        for (dialect, paths) in &self.dialects {
            let db = MorphDatabase::load(&paths.db).with_context(|| format!("loading {}", paths.db.display()))?;
            anyhow::ensure!(
                db.dialect == *dialect,
                "{} holds a {} database, configured as {}",
                paths.db.display(),
                db.dialect,
                dialect
            );
            let tagger =
                TaggerModel::load(&paths.tagger).with_context(|| format!("loading {}", paths.tagger.display()))?;
            registry.insert(db, tagger);
        }
        let identifier = match &self.did_model {
            Some(p) => {
                let model = DidModel::load(p).with_context(|| format!("loading {}", p.display()))?;
                Some(Box::new(model) as Box<dyn morphdis_core::DialectIdentifier>)
            }
            None => None,
        };
        Ok(Pipeline::new(registry, identifier))
    }
}
