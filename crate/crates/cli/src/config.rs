//! Flat key=value configuration with dotted sections.
//!
//! A run is described by keys like `model.q0=0.6`, resolved from three
//! layers: experiment defaults, an optional config file, and command-line
//! overrides. The fully resolved map is written into every output file's
//! metadata so a run can be reproduced from its data alone.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use mislearn::beliefs::{History, ObsMode};
use mislearn::dynamics::SimConfig;
use mislearn::model::ModelParams;
use mislearn::welfare::SubsidyRule;
use mislearn::{CostModelF64, ModelParamsF64};

/// Experiment selector, one per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Simulate,
    Value,
    Benchmarks,
    BreakTime,
    Welfare,
    Subsidy,
    Sweep,
    EarlyTable,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Value => "value",
            Self::Benchmarks => "benchmarks",
            Self::BreakTime => "breaktime",
            Self::Welfare => "welfare",
            Self::Subsidy => "subsidy",
            Self::Sweep => "sweep",
            Self::EarlyTable => "earlytable",
        }
    }
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutFormat {
    Csv,
    Json,
}

const KNOWN_KEYS: &[&str] = &[
    "model.mu0",
    "model.q0",
    "model.q1",
    "model.qhat0",
    "model.qhat1",
    "model.rho",
    "model.eta",
    "model.beta",
    "model.epsilon",
    "cost.family",
    "cost.fbar",
    "cost.rate",
    "cost.location",
    "cost.scale",
    "sim.horizon",
    "sim.reps",
    "sim.seed",
    "sim.mode",
    "sim.theta",
    "history.file",
    "history.inline",
    "subsidy.kind",
    "subsidy.s",
    "subsidy.eta",
    "subsidy.pi_bar",
    "subsidy.p_star",
    "subsidy.dacc",
    "subsidy.dv",
    "bench.q",
    "bench.qhat",
    "bench.fosd_tol",
    "breaktime.delta",
    "breaktime.pstar",
    "sweep.target",
    "sweep.from",
    "sweep.to",
    "sweep.steps",
    "value.lu",
    "value.le",
    "out.path",
    "out.format",
];

/// Resolved configuration: a validated typed view plus the raw key map for
/// metadata.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: RunKind,
    map: BTreeMap<String, String>,
}

impl RunConfig {
    /// Builds the layered configuration: defaults for `kind`, then the file,
    /// then `overrides` (already `key=value` strings).
    pub fn resolve(
        kind: RunKind,
        config_path: Option<&Path>,
        overrides: &[(String, String)],
    ) -> Result<Self> {
        let mut map = defaults(kind);
        if let Some(path) = config_path {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            for (key, value) in parse_pairs(&text)? {
                check_key(&key)?;
                map.insert(key, value);
            }
        }
        for (key, value) in overrides {
            check_key(key)?;
            map.insert(key.clone(), value.clone());
        }
        Ok(Self { kind, map })
    }

    /// The full resolved key map (used as output metadata).
    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.map
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .map
            .get(key)
            .ok_or_else(|| anyhow!("missing config key `{key}`"))?;
        raw.parse()
            .map_err(|_| anyhow!("invalid value `{raw}` for config key `{key}`"))
    }

    pub fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.map.contains_key(key) {
            self.parse(key)
        } else {
            Ok(default)
        }
    }

    pub fn params(&self) -> Result<ModelParamsF64> {
        let params = ModelParams::new(
            self.parse("model.mu0")?,
            self.parse("model.q0")?,
            self.parse("model.q1")?,
            self.parse("model.qhat0")?,
            self.parse("model.qhat1")?,
            self.parse("model.rho")?,
            self.parse("model.eta")?,
            self.parse("model.beta")?,
            self.parse("model.epsilon")?,
        )?;
        Ok(params)
    }

    pub fn cost_model(&self) -> Result<CostModelF64> {
        let family: String = self.parse("cost.family")?;
        let model = match family.as_str() {
            "uniform" => mislearn::costs::CostModel::uniform(self.parse("cost.fbar")?)?,
            "exponential" => mislearn::costs::CostModel::exponential(self.parse("cost.rate")?)?,
            "logit" => mislearn::costs::CostModel::logit(
                self.parse("cost.location")?,
                self.parse("cost.scale")?,
            )?,
            other => bail!("invalid value `{other}` for config key `cost.family`"),
        };
        Ok(model)
    }

    pub fn mode(&self) -> Result<ObsMode> {
        match self.get("sim.mode") {
            Some("perfect") | None => Ok(ObsMode::Perfect),
            Some("imperfect") => Ok(ObsMode::Imperfect),
            Some(other) => bail!("invalid value `{other}` for config key `sim.mode`"),
        }
    }

    pub fn theta(&self) -> Result<Option<bool>> {
        match self.get("sim.theta") {
            Some("free") | None => Ok(None),
            Some("0") => Ok(Some(false)),
            Some("1") => Ok(Some(true)),
            Some(other) => bail!("invalid value `{other}` for config key `sim.theta`"),
        }
    }

    pub fn subsidy(&self) -> Result<SubsidyRule<f64>> {
        match self.get("subsidy.kind") {
            Some("none") | None => Ok(SubsidyRule::None),
            Some("flat") => Ok(SubsidyRule::Flat(self.parse("subsidy.s")?)),
            Some("myopic") => {
                let eta = self.parse_or("subsidy.eta", self.parse("model.eta")?)?;
                Ok(SubsidyRule::Myopic { eta })
            }
            Some("target") => Ok(SubsidyRule::TargetBreak {
                pi_bar: self.parse("subsidy.pi_bar")?,
                p_star: self.parse("subsidy.p_star")?,
            }),
            Some(other) => bail!("invalid value `{other}` for config key `subsidy.kind`"),
        }
    }

    pub fn history(&self) -> Result<Option<History>> {
        if let Some(path) = self.get("history.file") {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read history file {path} (history.file)"))?;
            return Ok(Some(History::parse(&text)?));
        }
        if let Some(inline) = self.get("history.inline") {
            return Ok(Some(History::parse(inline)?));
        }
        Ok(None)
    }

    pub fn sim_config(&self) -> Result<SimConfig<f64>> {
        let config = SimConfig {
            params: self.params()?,
            cost_model: self.cost_model()?,
            horizon: self.parse("sim.horizon")?,
            n_reps: self.parse("sim.reps")?,
            mode: self.mode()?,
            initial_history: self.history()?,
            subsidy: self.subsidy()?,
            seed: self.parse("sim.seed")?,
            theta: self.theta()?,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn out_path(&self) -> Option<PathBuf> {
        self.get("out.path").map(PathBuf::from)
    }

    pub fn format(&self) -> Result<OutFormat> {
        match self.get("out.format") {
            Some("csv") | None => Ok(OutFormat::Csv),
            Some("json") => Ok(OutFormat::Json),
            Some(other) => bail!("invalid value `{other}` for config key `out.format`"),
        }
    }

    /// Inserts a key (used by flag shortcuts); the key must be known.
    pub fn set(&mut self, key: &str, value: String) -> Result<()> {
        check_key(key)?;
        self.map.insert(key.to_string(), value);
        Ok(())
    }
}

fn check_key(key: &str) -> Result<()> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        bail!("unknown config key `{key}`");
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Splits a `--set key=value` argument.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    let (key, value) = arg
        .split_once('=')
        .ok_or_else(|| anyhow!("expected KEY=VALUE in `--set {arg}`"))?;
    Ok((key.trim().to_string(), value.trim().to_string()))
}

fn defaults(kind: RunKind) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        map.insert(k.to_string(), v);
    };
    let base = ModelParams::baseline();
    put("model.mu0", format!("{}", base.mu0));
    put("model.q0", format!("{}", base.q0));
    put("model.q1", format!("{}", base.q1));
    put("model.qhat0", format!("{}", base.qhat0));
    put("model.qhat1", format!("{}", base.qhat1));
    put("model.rho", format!("{}", base.rho));
    put("model.eta", format!("{}", base.eta));
    put("model.beta", format!("{}", base.beta));
    put("model.epsilon", format!("{}", base.epsilon));
    put("cost.family", "uniform".to_string());
    put("cost.fbar", "1".to_string());
    put("sim.horizon", "50".to_string());
    put("sim.reps", "1000".to_string());
    put("sim.seed", "42".to_string());
    put("sim.mode", "perfect".to_string());
    put("sim.theta", "free".to_string());
    put("subsidy.kind", "none".to_string());
    put("out.format", "csv".to_string());
    match kind {
        RunKind::Benchmarks => {
            put("bench.q", "0.7".to_string());
            put("bench.qhat", "0.9".to_string());
            put("bench.fosd_tol", "0.01".to_string());
            put("sim.horizon", "200".to_string());
        }
        RunKind::BreakTime => {
            // opposing-prior incorrect-cascade scenario; see the library's
            // default_break_scenario
            let scenario = mislearn::dynamics::default_break_scenario(42, 10_000);
            put("model.mu0", format!("{}", scenario.params.mu0));
            put("model.q0", format!("{}", scenario.params.q0));
            put("model.q1", format!("{}", scenario.params.q1));
            put("model.qhat0", format!("{}", scenario.params.qhat0));
            put("model.qhat1", format!("{}", scenario.params.qhat1));
            put(
                "history.inline",
                "1,1,0;2,1,0;3,1,0;4,1,0;5,1,0;6,1,0".to_string(),
            );
            put("sim.theta", "0".to_string());
            put("sim.horizon", "200".to_string());
            put("sim.reps", "10000".to_string());
            put("breaktime.delta", "0.2".to_string());
            put("breaktime.pstar", "0.9".to_string());
        }
        RunKind::Welfare => {
            put("sim.horizon", "140".to_string());
            put("sim.reps", "2000".to_string());
        }
        RunKind::Sweep => {
            put("sweep.target", "kappa0".to_string());
            put("sweep.from", "0".to_string());
            put("sweep.to", "0.5".to_string());
            put("sweep.steps", "26".to_string());
        }
        RunKind::Value => {
            put("value.lu", "0".to_string());
            put("value.le", "0".to_string());
        }
        RunKind::Subsidy => {
            put("subsidy.dacc", "0.3".to_string());
            put("subsidy.dv", "0.1".to_string());
        }
        _ => {}
    }
    map
}
