use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::schur::MAX_COPIES;

/// What produces the pre/post-change stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Qubit pair in the canonical frame `(r0, r1, theta)`.
    Qubit,
    /// Coin with bias `p_bias` before and `q_bias` after the change.
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measurement {
    Hayashi,
    Optimized,
    /// Detect with the optimized measurement and also report the
    /// variational rate of each block length.
    VariationalReport,
}

/// Configuration error with the place it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub location: String,
    pub message: String,
}

impl ConfigError {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self { location: location.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Every knob of a run. Field names double as config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub source: Source,
    pub r0: f64,
    pub r1: f64,
    pub theta: f64,
    pub p_bias: f64,
    pub q_bias: f64,
    pub l_list: Vec<u32>,
    pub measurement: Measurement,
    pub h_list: Vec<f64>,
    pub trials: u64,
    pub cap: u64,
    pub seed: u64,
    /// Post-change alternatives `(r1, theta)` sharing `r0`.
    pub family: Vec<(f64, f64)>,
    pub alpha: Vec<f64>,
    pub eps: Vec<f64>,
    /// Largest `l` for which the variational rate is computed (0 disables).
    pub variational_max_l: u32,
    pub max_censored_fraction: f64,
    /// Number of trajectories written by `simulate` and `classical-demo`.
    pub trajectories: u64,
    pub trajectory_steps: u64,
    /// Change point in blocks.
    pub nu: u64,
    pub post_steps: u64,
}

pub const PRESETS: &[&str] = &["fig2", "sm-classical", "fast-accept"];

pub const KEYS: &[&str] = &[
    "source",
    "r0",
    "r1",
    "theta",
    "p_bias",
    "q_bias",
    "l_list",
    "measurement",
    "h_list",
    "trials",
    "cap",
    "seed",
    "family",
    "alpha",
    "eps",
    "variational_max_l",
    "max_censored_fraction",
    "trajectories",
    "trajectory_steps",
    "nu",
    "post_steps",
];

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::fig2()
    }
}

impl ScenarioConfig {
    /// Canonical qubit pair `r0 = r1 = 0.9`, `θ = π/4` at `l ∈ {1, 5, 50}`.
    pub fn fig2() -> Self {
        Self {
            source: Source::Qubit,
            r0: 0.9,
            r1: 0.9,
            theta: PI / 4.0,
            p_bias: 0.2,
            q_bias: 0.25,
            l_list: vec![1, 5, 50],
            measurement: Measurement::Optimized,
            h_list: vec![2.0, 4.0, 6.0, 8.0],
            trials: 1000,
            cap: 10_000_000,
            seed: 1,
            family: Vec::new(),
            alpha: vec![0.5, 1.5, 2.0],
            eps: vec![0.1],
            variational_max_l: 12,
            max_censored_fraction: 1.0,
            trajectories: 3,
            trajectory_steps: 200,
            nu: 100,
            post_steps: 100,
        }
    }

    /// Coin with bias 1/5 switching to 1/4 after `10⁴` tosses.
    pub fn sm_classical() -> Self {
        Self {
            source: Source::Bernoulli,
            p_bias: 0.2,
            q_bias: 0.25,
            l_list: vec![1],
            measurement: Measurement::Hayashi,
            h_list: vec![6.0, 22.0],
            trials: 200,
            cap: 1_000_000,
            trajectories: 3,
            trajectory_steps: 20_000,
            nu: 10_000,
            post_steps: 10_000,
            ..Self::fig2()
        }
    }

    /// Well-separated coin `0.2 → 0.6` for quick runs.
    pub fn fast_accept() -> Self {
        Self {
            source: Source::Bernoulli,
            p_bias: 0.2,
            q_bias: 0.6,
            l_list: vec![1],
            measurement: Measurement::Hayashi,
            h_list: vec![2.0, 3.0, 4.0, 6.0],
            trials: 2000,
            trajectories: 0,
            trajectory_steps: 100,
            nu: 50,
            post_steps: 50,
            ..Self::fig2()
        }
    }

    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        match name {
            "fig2" => Ok(Self::fig2()),
            "sm-classical" => Ok(Self::sm_classical()),
            "fast-accept" => Ok(Self::fast_accept()),
            _ => Err(ConfigError::new(
                "--preset",
                format!("unknown preset `{name}` (expected one of {})", PRESETS.join(", ")),
            )),
        }
    }

    /// Sets one key from its text form. Range checks happen in [`Self::validate`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let value = value.trim();
        match key {
            "source" => {
                self.source = match value {
                    "qubit" => Source::Qubit,
                    "bernoulli" => Source::Bernoulli,
                    _ => return Err(format!("expected `qubit` or `bernoulli`, got `{value}`")),
                }
            }
            "r0" => self.r0 = parse_f64(value)?,
            "r1" => self.r1 = parse_f64(value)?,
            "theta" => self.theta = parse_f64(value)?,
            "p_bias" => self.p_bias = parse_f64(value)?,
            "q_bias" => self.q_bias = parse_f64(value)?,
            "l_list" => self.l_list = parse_list(value, parse_u32)?,
            "measurement" => {
                self.measurement = match value {
                    "hayashi" => Measurement::Hayashi,
                    "optimized" => Measurement::Optimized,
                    "variational-report" => Measurement::VariationalReport,
                    _ => return Err(format!("expected `hayashi`, `optimized` or `variational-report`, got `{value}`")),
                }
            }
            "h_list" => self.h_list = parse_list(value, parse_f64)?,
            "trials" => self.trials = parse_u64(value)?,
            "cap" => self.cap = parse_u64(value)?,
            "seed" => self.seed = parse_u64(value)?,
            "family" => self.family = parse_list(value, parse_member)?,
            "alpha" => self.alpha = parse_list(value, parse_f64)?,
            "eps" => self.eps = parse_list(value, parse_f64)?,
            "variational_max_l" => self.variational_max_l = parse_u32(value)?,
            "max_censored_fraction" => self.max_censored_fraction = parse_f64(value)?,
            "trajectories" => self.trajectories = parse_u64(value)?,
            "trajectory_steps" => self.trajectory_steps = parse_u64(value)?,
            "nu" => self.nu = parse_u64(value)?,
            "post_steps" => self.post_steps = parse_u64(value)?,
            _ => return Err(format!("unknown key (expected one of {})", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::new(format!("line {line_no}"), "expected `key = value`"));
            };
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::new(format!("line {line_no}"), format!("duplicate key `{key}`")));
            }
            self.set(key, value).map_err(|m| ConfigError::new(format!("line {line_no}: field `{key}`"), m))?;
        }
        Ok(())
    }

    /// Applies a JSON object on top of `self`. A run manifest is accepted
    /// too: its `config` object is used.
    pub fn apply_json(&mut self, text: &str) -> Result<(), ConfigError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| ConfigError::new(format!("line {}", e.line()), e.to_string()))?;
        let Value::Object(mut map) = value else {
            return Err(ConfigError::new("json", "top level must be an object"));
        };
        if let Some(Value::Object(inner)) = map.remove("config") {
            map = inner;
        }
        for (key, v) in &map {
            let text = json_to_text(v).map_err(|m| ConfigError::new(format!("field `{key}`"), m))?;
            self.set(key, &text).map_err(|m| ConfigError::new(format!("field `{key}`"), m))?;
        }
        Ok(())
    }

    /// Applies a config file, choosing JSON when it starts with `{`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        if text.trim_start().starts_with('{') {
            self.apply_json(text)
        } else {
            self.apply_kv(text)
        }
    }

    /// Parses a config file on top of the defaults and validates it.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let field = |name: &str, msg: String| Err(ConfigError::new(format!("field `{name}`"), msg));
        for (name, v) in [("r0", self.r0), ("r1", self.r1), ("p_bias", self.p_bias), ("q_bias", self.q_bias)] {
            if !(0.0..=1.0).contains(&v) {
                return field(name, format!("{v} is outside [0, 1]"));
            }
        }
        if !self.theta.is_finite() {
            return field("theta", "must be finite".into());
        }
        if self.l_list.is_empty() {
            return field("l_list", "needs at least one block length".into());
        }
        if let Some(l) = self.l_list.iter().find(|&&l| l == 0 || l > MAX_COPIES) {
            return field("l_list", format!("{l} is outside 1..={MAX_COPIES}"));
        }
        if let Some(h) = self.h_list.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
            return field("h_list", format!("{h} is not a positive threshold"));
        }
        if self.trials == 0 {
            return field("trials", "must be at least 1".into());
        }
        if self.cap == 0 {
            return field("cap", "must be at least 1".into());
        }
        for &(r1, theta) in &self.family {
            if !(0.0..=1.0).contains(&r1) || !theta.is_finite() {
                return field("family", format!("member {r1}:{theta} needs r1 in [0, 1] and finite theta"));
            }
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0) || !a.is_finite() || **a == 1.0) {
            return field("alpha", format!("{a} must be positive, finite and not 1"));
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return field("eps", format!("{e} is outside (0, 1)"));
        }
        if self.variational_max_l > MAX_COPIES {
            return field("variational_max_l", format!("must be at most {MAX_COPIES}"));
        }
        if !(0.0..=1.0).contains(&self.max_censored_fraction) {
            return field("max_censored_fraction", format!("{} is outside [0, 1]", self.max_censored_fraction));
        }
        if self.trajectory_steps == 0 {
            return field("trajectory_steps", "must be at least 1".into());
        }
        if self.nu == 0 {
            return field("nu", "must be at least 1".into());
        }
        if self.post_steps == 0 {
            return field("post_steps", "must be at least 1".into());
        }
        Ok(())
    }

    /// Block lengths used by simulation; a coin is always observed one toss
    /// at a time.
    pub fn sim_l_list(&self) -> Vec<u32> {
        match self.source {
            Source::Qubit => self.l_list.clone(),
            Source::Bernoulli => vec![1],
        }
    }

    /// JSON echo that [`Self::apply_json`] reads back to the same config.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    match s {
        "pi" => return Ok(PI),
        "pi/2" => return Ok(PI / 2.0),
        "pi/4" => return Ok(PI / 4.0),
        _ => {}
    }
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_u64(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    // accept integral scientific notation such as 1e7
    match s.parse::<f64>() {
        Ok(x) if x.fract() == 0.0 && (0.0..1.8e19).contains(&x) => Ok(x as u64),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

fn parse_u32(s: &str) -> Result<u32, String> {
    let v = parse_u64(s)?;
    u32::try_from(v).map_err(|_| format!("`{s}` is too large"))
}

fn parse_member(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("`{s}` is not of the form r1:theta"))?;
    Ok((parse_f64(a.trim())?, parse_f64(b.trim())?))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| item(x.trim())).collect()
}

fn json_to_text(v: &Value) -> Result<String, String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        Value::Array(items) => items
            .iter()
            .map(|item| match item {
                Value::Number(n) => Ok(n.to_string()),
                Value::String(s) => Ok(s.clone()),
                Value::Array(pair) if pair.len() == 2 => {
                    Ok(format!("{}:{}", json_to_text(&pair[0])?, json_to_text(&pair[1])?))
                }
                _ => Err("list entries must be numbers or [r1, theta] pairs".to_string()),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|parts| parts.join(",")),
        _ => Err("expected a number, string or list".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_overrides_defaults() {
        let cfg = ScenarioConfig::parse(
            "# comment\nr0 = 0.5\nl_list = 1, 2, 3  # trailing\nfamily = 0.9:pi/4, 0.8:1.0\ncap = 1e6\n",
        )
        .unwrap();
        assert_eq!(cfg.r0, 0.5);
        assert_eq!(cfg.l_list, vec![1, 2, 3]);
        assert_eq!(cfg.family, vec![(0.9, PI / 4.0), (0.8, 1.0)]);
        assert_eq!(cfg.cap, 1_000_000);
    }

    #[test]
    fn kv_errors_carry_line_and_field() {
        let err = ScenarioConfig::parse("r0 = 0.5\n\nr1 = abc\n").unwrap_err();
        assert_eq!(err.location, "line 3: field `r1`");
        let err = ScenarioConfig::parse("r0 0.5\n").unwrap_err();
        assert_eq!(err.location, "line 1");
        let err = ScenarioConfig::parse("r0 = 1.5\n").unwrap_err();
        assert_eq!(err.location, "field `r0`");
        assert!(ScenarioConfig::parse("bogus = 1\n").is_err());
        assert!(ScenarioConfig::parse("r0 = 0.1\nr0 = 0.2\n").is_err());
    }

    #[test]
    fn json_round_trips_through_echo() {
        let mut cfg = ScenarioConfig::sm_classical();
        cfg.family = vec![(0.5, 0.25)];
        let text = cfg.to_json().to_string();
        let mut back = ScenarioConfig::fig2();
        back.apply_json(&text).unwrap();
        assert_eq!(back, cfg);
        let manifest = serde_json::json!({ "tool": "qusum", "config": cfg.to_json() }).to_string();
        assert_eq!(ScenarioConfig::parse(&manifest).unwrap(), cfg);
    }

    #[test]
    fn range_checks() {
        for bad in ["l_list = 0", "l_list = 127", "h_list = 1, -2", "alpha = 1", "eps = 1", "trials = 0", "theta = inf"]
        {
            assert!(ScenarioConfig::parse(bad).is_err(), "{bad}");
        }
        assert!(ScenarioConfig::parse("l_list =").is_err());
        assert!(ScenarioConfig::parse("h_list =").is_ok());
    }

    #[test]
    fn presets_are_valid() {
        for name in PRESETS {
            ScenarioConfig::preset(name).unwrap().validate().unwrap();
        }
        assert!(ScenarioConfig::preset("nope").is_err());
    }
}
