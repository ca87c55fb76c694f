use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::NaiveDate;
use serde::Deserialize;
use teaming_core::team::TeamingConfig;

/// Optional TOML file; command-line flags take precedence.
///
/// ```toml
/// reference_date = "2015-01-01"
/// designations = ["Emeritus", "Staff"]
///
/// [corpus]
/// calls = "fixtures/calls.txt"
/// roster = "fixtures/roster.csv"
/// awards = "fixtures/awards.xml"
///
/// [teaming]
/// team_cap = 5
/// relevance_floor = 40
///
/// [serve]
/// store = "var/store"
/// addr = "127.0.0.1:8080"
/// ```
///
/// Relative paths are resolved against the file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub reference_date: Option<NaiveDate>,
    pub designations: Option<Vec<String>>,
    pub corpus: CorpusSection,
    pub teaming: TeamingConfig,
    pub serve: ServeSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub calls: Option<PathBuf>,
    pub roster: Option<PathBuf>,
    pub awards: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeSection {
    pub store: Option<PathBuf>,
    pub addr: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config: FileConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        config.teaming.validate().with_context(|| format!("invalid [teaming] in {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.corpus.calls,
            &mut config.corpus.roster,
            &mut config.corpus.awards,
            &mut config.serve.store,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("teaming.toml");
        std::fs::write(
            &path,
            "reference_date = \"2015-01-01\"\n[corpus]\ncalls = \"c.txt\"\nroster = \"/abs/r.csv\"\n[teaming]\nteam_cap = 4\n",
        )
        .unwrap();
        let config = FileConfig::load(&path).unwrap();
        assert_eq!(config.corpus.calls.unwrap(), dir.path().join("c.txt"));
        assert_eq!(config.corpus.roster.unwrap(), PathBuf::from("/abs/r.csv"));
        assert_eq!(config.teaming.team_cap, 4);
        assert_eq!(config.teaming.page_size, 3);
    }

    #[test]
    fn rejects_invalid_tunables() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "[teaming]\nteam_cap = 1\n").unwrap();
        assert!(FileConfig::load(&path).is_err());
        std::fs::write(&path, "[teaming]\nteem_cap = 3\n").unwrap();
        assert!(FileConfig::load(&path).is_err());
    }
}
