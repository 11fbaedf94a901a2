//! Scenario configuration files.
//!
//! Line-oriented `key = value` pairs, optionally grouped under `[params]`,
//! `[time]`, `[bc]` and `[output]`. `#` starts a comment. The global keys
//! `scenario`, `geometry`, `resolution` and `elements` come before any section.
//! Settings not given keep the values of the selected scenario.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scenarios::{example2_config, scenario_by_name, ScenarioConfig};

pub const SECTIONS: [&str; 4] = ["params", "time", "bc", "output"];

/// Section of every key, `""` for global keys.
pub const KEYS: &[(&str, &str)] = &[
    ("", "scenario"),
    ("", "geometry"),
    ("", "resolution"),
    ("", "elements"),
    ("params", "mu"),
    ("params", "s0"),
    ("params", "alpha"),
    ("params", "alpha_bjs"),
    ("params", "youngs"),
    ("params", "poisson"),
    ("params", "k_xx"),
    ("params", "k_xy"),
    ("params", "k_yy"),
    ("params", "critical_porosity"),
    ("params", "raster"),
    ("params", "porosity_file"),
    ("params", "permeability_file"),
    ("time", "t_end"),
    ("time", "tau"),
    ("bc", "injection"),
    ("bc", "boundary_pressure"),
    ("bc", "initial_pressure"),
    ("output", "every"),
    ("output", "dir"),
];

fn section_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(_, k)| *k == key).map(|(s, _)| *s)
}

/// A scenario plus where its results go.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: example2_config(),
            output_dir: PathBuf::from("output"),
        }
    }
}

impl RunConfig {
    pub fn for_scenario(name: &str) -> Result<Self> {
        Ok(RunConfig {
            scenario: scenario_by_name(name)?,
            ..Default::default()
        })
    }

    /// Applies one setting. `key` may carry its section as `section.key`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = match key.split_once('.') {
            Some((sec, k)) => {
                if section_of(k) != Some(sec) {
                    return Err(Error::InvalidArgument(format!("unknown setting '{sec}.{k}'")));
                }
                k
            }
            None => key,
        };
        match key {
            "dir" => {
                if value.is_empty() {
                    return Err(Error::InvalidArgument("output directory must not be empty".into()));
                }
                self.output_dir = value.into();
                Ok(())
            }
            "scenario" => {
                let base = scenario_by_name(value)?;
                self.scenario = base;
                Ok(())
            }
            _ => self.scenario.set(key, value),
        }
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("override '{o}' is not of the form key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        self.scenario.validate()
    }

    /// Resolved settings grouped by section, in the file vocabulary.
    pub fn sections(&self) -> Vec<(&'static str, Vec<(&'static str, String)>)> {
        let mut out: Vec<(&'static str, Vec<(&'static str, String)>)> =
            std::iter::once("").chain(SECTIONS).map(|s| (s, Vec::new())).collect();
        let mut entries = self.scenario.entries();
        entries.push(("dir", self.output_dir.display().to_string()));
        for (k, v) in entries {
            let sec = section_of(k).unwrap_or("");
            if let Some(slot) = out.iter_mut().find(|(s, _)| *s == sec) {
                slot.1.push((k, v));
            }
        }
        out
    }

    /// The resolved configuration in the file format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (sec, entries) in self.sections() {
            if !sec.is_empty() {
                s.push_str(&format!("\n[{sec}]\n"));
            }
            for (k, v) in entries {
                s.push_str(&format!("{k} = {v}\n"));
            }
        }
        s
    }
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

/// Parses a configuration; relative file paths are resolved against `base_dir`.
pub fn parse_config(text: &str, name: &str, base_dir: Option<&Path>) -> Result<RunConfig> {
    let mut section = "";
    let mut seen = HashSet::new();
    let mut seen_sections = HashSet::new();
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix('[') {
            let sec = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(name, line, "unterminated section header"))?
                .trim();
            section = SECTIONS
                .iter()
                .find(|s| **s == sec)
                .ok_or_else(|| Error::parse(name, line, format!("unknown section '[{sec}]'")))?;
            if !seen_sections.insert(section) {
                return Err(Error::parse(name, line, format!("duplicate section '[{sec}]'")));
            }
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::parse(name, line, "expected 'key = value'"))?;
        let (key, value) = (k.trim(), v.trim());
        match section_of(key) {
            None => return Err(Error::parse(name, line, format!("unknown key '{key}'"))),
            Some(s) if s != section => {
                let want = if s.is_empty() {
                    "before any section".to_string()
                } else {
                    format!("in section [{s}]")
                };
                return Err(Error::parse(name, line, format!("key '{key}' belongs {want}")));
            }
            Some(_) => {}
        }
        if value.is_empty() {
            return Err(Error::parse(name, line, format!("key '{key}' has no value")));
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::parse(name, line, format!("duplicate key '{key}'")));
        }
        entries.push(Entry {
            line,
            key: key.into(),
            value: value.into(),
        });
    }

    let mut cfg = RunConfig::default();
    // the scenario selects the defaults, wherever it appears
    entries.sort_by_key(|e| e.key != "scenario");
    for e in &entries {
        let value = match (e.key.as_str(), base_dir) {
            ("porosity_file" | "permeability_file" | "dir", Some(b)) if Path::new(&e.value).is_relative() => {
                b.join(&e.value).display().to_string()
            }
            _ => e.value.clone(),
        };
        cfg.set(&e.key, &value)
            .map_err(|err| Error::parse(name, e.line, strip_kind(err)))?;
    }
    cfg.scenario
        .validate()
        .map_err(|err| Error::parse(name, 0, strip_kind(err)))?;
    Ok(cfg)
}

fn strip_kind(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string(), path.parent())
}
