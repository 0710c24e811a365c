//! Flat key = value configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Parsed scenario configuration. Unknown keys are rejected at scenario
/// dispatch, where the legal key set is known.
#[derive(Debug, Clone, Default)]
pub struct ScenarioConfig {
    pub scenario: Option<String>,
    pub params: BTreeMap<String, String>,
    pub sweep: Option<Sweep>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub param: String,
    pub grid: Vec<f64>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = Result<T, ConfigError>;

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> ConfigResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    pub fn from_str_named(text: &str, name: &str) -> ConfigResult<Self> {
        let mut cfg = ScenarioConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("{name}:{}: expected key = value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| ConfigError(format!("{name}:{}: {}", lineno + 1, e.0)))?;
        }
        Ok(cfg)
    }

    /// Apply one assignment; used both for config lines and `-P` overrides
    /// (overrides win because they are applied last).
    pub fn set(&mut self, key: &str, value: &str) -> ConfigResult<()> {
        match key {
            "scenario" => self.scenario = Some(value.to_string()),
            "seed" => {
                self.seed = Some(
                    value
                        .parse()
                        .map_err(|_| ConfigError(format!("seed `{value}` is not an integer")))?,
                )
            }
            "sweep" => self.sweep = Some(parse_sweep(value)?),
            _ => {
                self.params.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    pub fn require_f64(&self, key: &str, default: Option<f64>) -> ConfigResult<f64> {
        match self.params.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| ConfigError(format!("parameter {key} = `{v}` is not a number"))),
            None => {
                default.ok_or_else(|| ConfigError(format!("missing required parameter {key}")))
            }
        }
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        self.params
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    /// Reject parameter keys outside the scenario's legal set.
    pub fn check_keys(&self, allowed: &[&str]) -> ConfigResult<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError(format!(
                    "unknown parameter `{key}` (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        if let Some(sw) = &self.sweep {
            if !allowed.contains(&sw.param.as_str()) {
                return Err(ConfigError(format!("cannot sweep unknown parameter `{}`", sw.param)));
            }
        }
        Ok(())
    }

    /// Render as config-file text (used to embed the configuration in the
    /// output so a run can be reproduced byte for byte).
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.scenario {
            out += &format!("scenario = {s}\n");
        }
        if let Some(seed) = self.seed {
            out += &format!("seed = {seed}\n");
        }
        if let Some(sw) = &self.sweep {
            out += &format!("sweep = {} {}\n", sw.param, sw.grid_spec());
        }
        for (k, v) in &self.params {
            out += &format!("{k} = {v}\n");
        }
        out
    }
}

impl Sweep {
    fn grid_spec(&self) -> String {
        self.grid
            .iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Sweep spec: `name start:stop:step` or `name v1,v2,v3`.
pub fn parse_sweep(spec: &str) -> ConfigResult<Sweep> {
    let mut parts = spec.split_whitespace();
    let param = parts
        .next()
        .ok_or_else(|| ConfigError("empty sweep spec".into()))?
        .to_string();
    let grid_spec = parts
        .next()
        .ok_or_else(|| ConfigError("sweep needs `param start:stop:step`".into()))?;
    if parts.next().is_some() {
        return Err(ConfigError("trailing tokens in sweep spec".into()));
    }
    let grid = if grid_spec.contains(':') {
        let nums: Vec<&str> = grid_spec.split(':').collect();
        if nums.len() != 3 {
            return Err(ConfigError(format!("bad sweep range `{grid_spec}`")));
        }
        let parse = |s: &str| -> ConfigResult<f64> {
            s.parse()
                .map_err(|_| ConfigError(format!("bad number `{s}` in sweep")))
        };
        let (start, stop, step) = (parse(nums[0])?, parse(nums[1])?, parse(nums[2])?);
        if step <= 0.0 || stop < start {
            return Err(ConfigError("sweep needs step > 0 and stop >= start".into()));
        }
        let n = ((stop - start) / step).round() as usize;
        (0..=n).map(|k| start + step * k as f64).collect()
    } else {
        grid_spec
            .split(',')
            .map(|s| {
                s.parse()
                    .map_err(|_| ConfigError(format!("bad number `{s}` in sweep")))
            })
            .collect::<ConfigResult<Vec<f64>>>()?
    };
    if grid.is_empty() {
        return Err(ConfigError("sweep grid is empty".into()));
    }
    Ok(Sweep { param, grid })
}
