use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regional variety of Arabic handled by a dedicated analyzer and tagger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    Msa,
    Egy,
    Glf,
    Lev,
}

impl Dialect {
    pub const ALL: [Dialect; 4] = [Dialect::Msa, Dialect::Egy, Dialect::Glf, Dialect::Lev];

    pub fn id(self) -> &'static str {
        match self {
            Dialect::Msa => "msa",
            Dialect::Egy => "egy",
            Dialect::Glf => "glf",
            Dialect::Lev => "lev",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Dialect::Msa => "MSA",
            Dialect::Egy => "Egyptian",
            Dialect::Glf => "Gulf",
            Dialect::Lev => "Levantine",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dialect::ALL
            .into_iter()
            .find(|d| d.id() == s)
            .ok_or_else(|| Error::invalid(format!("unknown dialect {s:?}")))
    }
}
