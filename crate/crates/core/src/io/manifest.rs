//! Run manifests: the resolved configuration and headline results of a
//! run, written next to its outputs. No timestamps, so identical runs give
//! identical files.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.txt";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest::default();
        m.add(
            "run",
            [
                ("program", env!("CARGO_PKG_NAME").to_string()),
                ("version", env!("CARGO_PKG_VERSION").to_string()),
                ("command", command.to_string()),
            ],
        );
        m
    }

    /// Appends entries to a section, creating it if needed.
    pub fn add<K: Into<String>>(&mut self, section: &str, entries: impl IntoIterator<Item = (K, String)>) {
        let idx = match self.sections.iter().position(|(s, _)| s == section) {
            Some(i) => i,
            None => {
                self.sections.push((section.to_string(), Vec::new()));
                self.sections.len() - 1
            }
        };
        self.sections[idx]
            .1
            .extend(entries.into_iter().map(|(k, v)| (k.into(), v.replace('\n', " "))));
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .iter()
            .find(|(s, _)| s == section)?
            .1
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, (name, entries)) in self.sections.iter().enumerate() {
            if i > 0 {
                s.push('\n');
            }
            s.push_str(&format!("[{name}]\n"));
            for (k, v) in entries {
                s.push_str(&format!("{k} = {v}\n"));
            }
        }
        s
    }

    /// Writes `manifest.txt` into `dir`, creating the directory.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(MANIFEST_NAME);
        std::fs::write(&path, self.to_text()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
