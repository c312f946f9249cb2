//! Flat `key = value` scenario files with dotted keys.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use posctl::shaping::ContractorKind;
use posctl::sim::IntegratorOptions;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given twice")]
    Duplicate(String),
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn invalid(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.into(), msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Nominal,
    Expander,
    OptimalVolterra,
    UniversalBasic,
    UniversalInvopt,
    HalfUniversal,
    Redesign,
    Direct,
    ContinuousDirect,
}

impl Law {
    pub const ALL: [Law; 9] = [
        Law::Nominal,
        Law::Expander,
        Law::OptimalVolterra,
        Law::UniversalBasic,
        Law::UniversalInvopt,
        Law::HalfUniversal,
        Law::Redesign,
        Law::Direct,
        Law::ContinuousDirect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Nominal => "nominal",
            Law::Expander => "expander",
            Law::OptimalVolterra => "optimal-volterra",
            Law::UniversalBasic => "universal-basic",
            Law::UniversalInvopt => "universal-invopt",
            Law::HalfUniversal => "half-universal",
            Law::Redesign => "redesign",
            Law::Direct => "direct",
            Law::ContinuousDirect => "continuous-direct",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Law::Nominal => "prey/predator nominal harvest U = Y^2/X",
            Law::Expander => "prey/predator harvest U = Y*Sigma(Y/X) for the configured contractor",
            Law::OptimalVolterra => "expander law with the Volterra contractor (optimal for its cost)",
            Law::UniversalBasic => "basic universal formula, needs L_gV >= 0 => L_fV < 0",
            Law::UniversalInvopt => "inverse-optimal universal formula, needs a strong CLF",
            Law::HalfUniversal => "universal formula with halved deviation, needs a strong CLF",
            Law::Redesign => "prey/predator redesign of the nominal law through the expander",
            Law::Direct => "direct design with the configured contractor and r rule, needs a strong CLF",
            Law::ContinuousDirect => "direct design with the midpoint weight written in (L_fV, L_gV)",
        }
    }

    /// Uses the scenario contractor for its design.
    pub fn needs_contractor(self) -> bool {
        matches!(self, Law::Expander | Law::Redesign | Law::Direct | Law::ContinuousDirect)
    }

    /// Only defined on the prey/predator family.
    pub fn predprey_only(self) -> bool {
        matches!(self, Law::Nominal | Law::Expander | Law::OptimalVolterra | Law::Redesign)
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Law::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| format!("unknown law `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    Midpoint,
    SqrtMean,
}

impl FromStr for RuleName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "midpoint" => Ok(Self::Midpoint),
            "sqrt-mean" => Ok(Self::SqrtMean),
            _ => Err(format!("unknown r rule `{s}` (expected midpoint or sqrt-mean)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub system: String,
    pub laws: Vec<Law>,
    /// `None` for `contractor = none`.
    pub contractor: Option<ContractorKind>,
    pub initial_conditions: Vec<Vec<f64>>,
    pub integrator: IntegratorOptions<f64>,
    pub outputs: Option<PathBuf>,
    pub r_rule: RuleName,
    /// Points per axis for the CLF condition check.
    pub check_grid: usize,
}

const KEYS: [&str; 13] = [
    "name",
    "system",
    "law",
    "laws",
    "contractor",
    "initial_conditions",
    "integrator.step",
    "integrator.horizon",
    "integrator.stop_tolerance",
    "integrator.record_stride",
    "outputs",
    "r_rule",
    "check.grid",
];

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse::<f64>().map_err(|e| invalid(key, format!("`{v}`: {e}")))
}

fn parse_ics(v: &str) -> Result<Vec<Vec<f64>>, ConfigError> {
    let key = "initial_conditions";
    let ics: Vec<Vec<f64>> = v
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|ic| ic.split(',').map(|c| parse_f64(key, c.trim())).collect())
        .collect::<Result<_, _>>()?;
    if ics.is_empty() {
        return Err(invalid(key, "no initial condition given"));
    }
    if let Some(bad) = ics.iter().find(|ic| ic.iter().any(|c| !c.is_finite())) {
        return Err(invalid(key, format!("non-finite component in {bad:?}")));
    }
    Ok(ics)
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let fallback = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        Self::parse(&text, fallback)
    }

    /// Parses the file text; `default_name` is used when no `name` key is present.
    pub fn parse(text: &str, default_name: &str) -> Result<Self, ConfigError> {
        let mut pairs: Vec<(&str, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey(k.into()));
            }
            if pairs.iter().any(|(p, _)| *p == k) {
                return Err(ConfigError::Duplicate(k.into()));
            }
            pairs.push((k, v));
        }
        let get = |k: &str| pairs.iter().find(|(p, _)| *p == k).map(|(_, v)| *v);

        let system = get("system").ok_or(ConfigError::Missing("system"))?.to_string();
        let laws_raw = match (get("law"), get("laws")) {
            (Some(_), Some(_)) => return Err(invalid("laws", "give either `law` or `laws`, not both")),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => return Err(ConfigError::Missing("laws")),
        };
        let laws: Vec<Law> = laws_raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|m| invalid("laws", m)))
            .collect::<Result<_, _>>()?;
        if laws.is_empty() {
            return Err(invalid("laws", "no law given"));
        }
        let contractor = match get("contractor").unwrap_or("volterra") {
            "none" => None,
            s => Some(s.parse::<ContractorKind>().map_err(|e| invalid("contractor", e.to_string()))?),
        };
        if contractor == Some(ContractorKind::Custom) {
            return Err(invalid("contractor", "custom contractors cannot be configured from a file"));
        }
        let initial_conditions = parse_ics(get("initial_conditions").ok_or(ConfigError::Missing("initial_conditions"))?)?;

        let mut integrator = IntegratorOptions::<f64>::default();
        if let Some(v) = get("integrator.step") {
            integrator.step = parse_f64("integrator.step", v)?;
        }
        if let Some(v) = get("integrator.horizon") {
            integrator.horizon = parse_f64("integrator.horizon", v)?;
        }
        if let Some(v) = get("integrator.stop_tolerance") {
            integrator.stop_tolerance = parse_f64("integrator.stop_tolerance", v)?;
        }
        if let Some(v) = get("integrator.record_stride") {
            integrator.record_stride =
                v.parse().map_err(|e| invalid("integrator.record_stride", format!("`{v}`: {e}")))?;
        }
        integrator.validate().map_err(|e| invalid("integrator", e.to_string()))?;

        let r_rule = get("r_rule").map(str::parse).transpose().map_err(|m| invalid("r_rule", m))?.unwrap_or(RuleName::Midpoint);
        let check_grid = match get("check.grid") {
            Some(v) => v.parse().map_err(|e| invalid("check.grid", format!("`{v}`: {e}")))?,
            None => 32,
        };
        if check_grid < 2 {
            return Err(invalid("check.grid", "need at least 2 points per axis"));
        }

        for law in &laws {
            if law.needs_contractor() && contractor.is_none() {
                return Err(invalid("contractor", format!("law `{law}` needs a contractor")));
            }
            if *law == Law::OptimalVolterra && !matches!(contractor, None | Some(ContractorKind::Volterra)) {
                return Err(invalid("contractor", "law `optimal-volterra` is scored with the Volterra contractor"));
            }
        }
        Ok(Self {
            name: get("name").unwrap_or(default_name).to_string(),
            system,
            laws,
            contractor,
            initial_conditions,
            integrator,
            outputs: get("outputs").map(PathBuf::from),
            r_rule,
            check_grid,
        })
    }
}
