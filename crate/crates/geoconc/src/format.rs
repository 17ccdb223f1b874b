//! JSON model files.
//!
//! Three kinds of document are recognised by their fields: automata
//! (`cells`), ST-structures (`events` with `{s, t}` configurations) and
//! configuration structures (`events` with plain event-id lists).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use geoconc_core::hda::BuildError;
use geoconc_core::st::{Event, StError};
use geoconc_core::{ConfigurationStructure, EventSet, Hda, HdaBuilder, StConfig, StStructure};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    pub id: String,
    pub dim: usize,
    pub s: Vec<String>,
    pub t: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HdaFile {
    pub cells: Vec<CellRecord>,
    pub labels: BTreeMap<String, String>,
    pub initial: Vec<String>,
    #[serde(rename = "final")]
    pub finals: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigRecord {
    pub s: Vec<String>,
    pub t: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StFile {
    pub events: BTreeMap<String, String>,
    pub configs: Vec<ConfigRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfgFile {
    pub events: BTreeMap<String, String>,
    pub configs: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub enum Model {
    Hda(Hda),
    St(StStructure),
    Cfg(ConfigurationStructure),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Hda(_) => "hda",
            Model::St(_) => "st",
            Model::Cfg(_) => "cfg",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: Box<FormatError> },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("not a model file: expected a `cells` or `events` field")]
    UnknownKind,
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    St(#[from] StError),
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
}

impl HdaFile {
    pub fn from_hda(hda: &Hda) -> Self {
        let name = |q| hda.name(q).to_string();
        let cells = hda
            .cells()
            .iter()
            .map(|c| CellRecord {
                id: c.name.clone(),
                dim: c.dim,
                s: c.sources.iter().map(|&q| name(q)).collect(),
                t: c.targets.iter().map(|&q| name(q)).collect(),
            })
            .collect();
        HdaFile {
            cells,
            labels: hda.labels().iter().map(|(&q, l)| (name(q), l.clone())).collect(),
            initial: hda.initial().iter().map(|&q| name(q)).collect(),
            finals: hda.finals().iter().map(|&q| name(q)).collect(),
            valuation: hda
                .valuation()
                .iter()
                .filter(|(_, props)| !props.is_empty())
                .map(|(&q, props)| (name(q), props.iter().cloned().collect()))
                .collect(),
        }
    }

    /// Builds the automaton; structural laws are left to `validate`.
    pub fn to_hda(&self) -> Result<Hda, FormatError> {
        let mut b = HdaBuilder::new();
        for c in &self.cells {
            b.raw_cell(&c.id, c.dim, c.s.clone(), c.t.clone());
        }
        for (cell, label) in &self.labels {
            b.label(cell, label);
        }
        for q in &self.initial {
            b.initial(q);
        }
        for q in &self.finals {
            b.final_state(q);
        }
        for (cell, props) in &self.valuation {
            for p in props {
                b.proposition(cell, p);
            }
        }
        Ok(b.build()?)
    }
}

fn event_table(events: &BTreeMap<String, String>) -> Vec<Event> {
    events.iter().map(|(name, label)| Event { name: name.clone(), label: label.clone() }).collect()
}

fn event_set(events: &[Event], ids: &[String]) -> Result<EventSet, FormatError> {
    ids.iter()
        .map(|id| events.iter().position(|e| &e.name == id).ok_or_else(|| FormatError::UnknownEvent(id.clone())))
        .collect()
}

fn sorted_names(events: &[Event], set: EventSet) -> Vec<String> {
    let mut names: Vec<String> = set.iter().map(|e| events[e].name.clone()).collect();
    names.sort();
    names
}

impl StFile {
    pub fn from_st(st: &StStructure) -> Self {
        let events = st.events();
        let mut configs: Vec<ConfigRecord> = st
            .configs()
            .iter()
            .map(|c| ConfigRecord { s: sorted_names(events, c.s), t: sorted_names(events, c.t) })
            .collect();
        configs.sort_by(|x, y| (x.s.len(), &x.s, x.t.len(), &x.t).cmp(&(y.s.len(), &y.s, y.t.len(), &y.t)));
        StFile { events: events.iter().map(|e| (e.name.clone(), e.label.clone())).collect(), configs }
    }

    pub fn to_st(&self) -> Result<StStructure, FormatError> {
        let events = event_table(&self.events);
        let configs = self
            .configs
            .iter()
            .map(|c| Ok(StConfig::new(event_set(&events, &c.s)?, event_set(&events, &c.t)?)))
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(StStructure::new(events, configs)?)
    }
}

impl CfgFile {
    pub fn from_cfg(cfg: &ConfigurationStructure) -> Self {
        let events = cfg.events();
        let mut configs: Vec<Vec<String>> = cfg.configs().iter().map(|&c| sorted_names(events, c)).collect();
        configs.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
        CfgFile { events: events.iter().map(|e| (e.name.clone(), e.label.clone())).collect(), configs }
    }

    pub fn to_cfg(&self) -> Result<ConfigurationStructure, FormatError> {
        let events = event_table(&self.events);
        let configs = self.configs.iter().map(|c| event_set(&events, c)).collect::<Result<Vec<_>, _>>()?;
        Ok(ConfigurationStructure::new(events, configs)?)
    }
}

/// Parses a model document of any of the three kinds.
pub fn parse_model(text: &str) -> Result<Model, FormatError> {
    let value: Value = serde_json::from_str(text)?;
    let Value::Object(fields) = &value else {
        return Err(FormatError::UnknownKind);
    };
    if fields.contains_key("cells") {
        let file: HdaFile = serde_json::from_value(value)?;
        return Ok(Model::Hda(file.to_hda()?));
    }
    if !fields.contains_key("events") {
        return Err(FormatError::UnknownKind);
    }
    let plain = fields.get("configs").and_then(Value::as_array).and_then(|c| c.first()).is_some_and(Value::is_array);
    if plain {
        let file: CfgFile = serde_json::from_value(value)?;
        Ok(Model::Cfg(file.to_cfg()?))
    } else {
        let file: StFile = serde_json::from_value(value)?;
        Ok(Model::St(file.to_st()?))
    }
}

pub fn render_model(model: &Model) -> String {
    let value = match model {
        Model::Hda(h) => serde_json::to_value(HdaFile::from_hda(h)),
        Model::St(st) => serde_json::to_value(StFile::from_st(st)),
        Model::Cfg(cfg) => serde_json::to_value(CfgFile::from_cfg(cfg)),
    };
    let mut text = serde_json::to_string_pretty(&value.expect("model files serialize")).expect("values serialize");
    text.push('\n');
    text
}

/// Reads and parses a model file; errors name the file.
pub fn load_model(path: &Path) -> Result<Model, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })?;
    parse_model(&text).map_err(|e| FormatError::InFile { path: path.to_path_buf(), source: Box::new(e) })
}

pub fn save_model(path: &Path, model: &Model) -> Result<(), FormatError> {
    fs::write(path, render_model(model)).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

/// Reads a configuration written as by `StStructure::format_config`, e.g.
/// `({a1,b1},{a1})`.
pub fn parse_config(st: &StStructure, text: &str) -> Result<StConfig, FormatError> {
    let bad = || FormatError::UnknownEvent(text.to_string());
    let inner = text.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
    let split = inner.find("},").ok_or_else(bad)?;
    let (s, t) = (&inner[..=split], &inner[split + 2..]);
    let set = |part: &str| -> Result<EventSet, FormatError> {
        let body = part.trim().strip_prefix('{').and_then(|p| p.strip_suffix('}')).ok_or_else(bad)?;
        body.split(',')
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .map(|n| st.event_id(n).ok_or_else(|| FormatError::UnknownEvent(n.to_string())))
            .collect()
    };
    Ok(StConfig::new(set(s)?, set(t)?))
}
