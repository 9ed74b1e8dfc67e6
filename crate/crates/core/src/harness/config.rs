use std::collections::BTreeMap;
use std::path::Path;

use toml::Value;

use super::{E1Config, E2Config, HarnessError};
use crate::gnn::TrainConfig;
use crate::graph::AttributeMode;
use crate::pfaffian::Activation;

/// Flat `key = value` settings read from a TOML file. Section headers only
/// group keys; `[e1] epochs = 10` and `epochs = 10` set the same key.
///
/// Files that are not valid TOML are read line by line as INI-style
/// `key = value` pairs, so bare words such as `activation = tanh` work.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, Value>,
}

fn flatten(table: toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        match v {
            Value::Table(t) => flatten(t, out),
            v => {
                out.insert(k, v);
            }
        }
    }
}

fn ini_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.trim_matches(|c| c == '"' || c == '\'').to_string()))
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut values = BTreeMap::new();
        match text.parse::<toml::Table>() {
            Ok(table) => flatten(table, &mut values),
            Err(toml_err) => {
                for (n, line) in text.lines().enumerate() {
                    let line = line.split(['#', ';']).next().unwrap_or("").trim();
                    if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                        continue;
                    }
                    let (k, v) = line.split_once('=').ok_or_else(|| {
                        HarnessError::Config(format!("line {}: expected key = value ({toml_err})", n + 1))
                    })?;
                    values.insert(k.trim().to_string(), ini_value(v.trim()));
                }
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    fn bad(key: &str, v: &Value, want: &str) -> HarnessError {
        HarnessError::Config(format!("{key} = {v}: expected {want}"))
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, HarnessError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Ok(Some(v.to_string())),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, HarnessError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(v) => Err(Self::bad(key, v, "a non-negative integer")),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, HarnessError> {
        Ok(self.u64(key)?.map(|x| x as usize))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, HarnessError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(Self::bad(key, v, "a number")),
        }
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>, HarnessError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(Self::bad(key, v, "true or false")),
        }
    }

    /// An array of integers, a single integer, or a comma-separated string.
    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>, HarnessError> {
        let Some(v) = self.values.get(key) else {
            return Ok(None);
        };
        let err = || Self::bad(key, v, "a list of non-negative integers");
        match v {
            Value::Integer(i) if *i >= 0 => Ok(Some(vec![*i as usize])),
            Value::Array(items) => items
                .iter()
                .map(|x| match x {
                    Value::Integer(i) if *i >= 0 => Ok(*i as usize),
                    _ => Err(err()),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Value::String(s) => s
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| err()))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            _ => Err(err()),
        }
    }

    pub fn activation(&self, key: &str) -> Result<Option<Activation>, HarnessError> {
        self.string(key)?
            .map(|s| s.parse::<Activation>().map_err(|e| HarnessError::Config(e.to_string())))
            .transpose()
    }

    /// Applies `lr`, `batch`, `train_frac` and `labels_only`.
    pub fn apply_train(&self, cfg: &mut TrainConfig) -> Result<(), HarnessError> {
        if let Some(x) = self.f64("lr")? {
            cfg.learning_rate = x;
        }
        if let Some(x) = self.usize("batch")? {
            cfg.batch_size = x;
        }
        if let Some(x) = self.f64("train_frac")? {
            cfg.train_fraction = x;
        }
        if let Some(true) = self.bool("labels_only")? {
            cfg.attribute_mode = AttributeMode::LabelsOnly;
        }
        Ok(())
    }

    /// Applies `activation`, `epochs`, `runs`, `seed`, `hidden`, `layers`,
    /// `sweep_layers` and `sweep_hidden`, then the training keys.
    pub fn apply_e1(&self, cfg: &mut E1Config) -> Result<(), HarnessError> {
        if let Some(a) = self.activation("activation")? {
            cfg.activation = a;
        }
        if let Some(x) = self.usize("epochs")? {
            cfg.epochs = x;
        }
        if let Some(x) = self.usize("runs")? {
            cfg.runs = x;
        }
        if let Some(x) = self.u64("seed")? {
            cfg.base_seed = x;
        }
        if let Some(x) = self.usize_list("hidden")? {
            cfg.hidden_sweep = x;
        }
        if let Some(x) = self.usize_list("layers")? {
            cfg.layer_sweep = x;
        }
        if let Some(x) = self.usize("sweep_layers")? {
            cfg.hidden_sweep_layers = x;
        }
        if let Some(x) = self.usize("sweep_hidden")? {
            cfg.layer_sweep_hidden = x;
        }
        self.apply_train(&mut cfg.base)
    }

    /// Applies `activation`, `epochs`, `runs`, `seed`, `splits`, `hidden`
    /// and `layers`, then the training keys.
    pub fn apply_e2(&self, cfg: &mut E2Config) -> Result<(), HarnessError> {
        if let Some(a) = self.activation("activation")? {
            cfg.activation = a;
        }
        if let Some(x) = self.usize("epochs")? {
            cfg.epochs = x;
        }
        if let Some(x) = self.usize("runs")? {
            cfg.runs = x;
        }
        if let Some(x) = self.u64("seed")? {
            cfg.base_seed = x;
        }
        if let Some(x) = self.usize("splits")? {
            cfg.splits = x;
        }
        if let Some(x) = self.usize("hidden")? {
            cfg.hidden = x;
        }
        if let Some(x) = self.usize("layers")? {
            cfg.layers = x;
        }
        self.apply_train(&mut cfg.base)
    }
}
