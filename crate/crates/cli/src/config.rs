//! JSON run configuration.
//!
//! A run is described by up to three layers merged in order: a figure preset,
//! a config file and `--set key=value` overrides. The merged document is then
//! validated into a [`RunConfig`].
//!
//! ```json
//! {
//!   "protocol": { "delta": 1, "gamma0": 0.2, "gamma1": 0, "omega": 1, "t0_fraction": 0.5 },
//!   "sweep": {
//!     "x": { "field": "omega", "min": 0.8, "max": 1.25, "count": 400 },
//!     "y": { "field": "gamma0", "min": 0, "max": 0.5, "count": 400 }
//!   },
//!   "tolerances": { "ep_tol": 1e-9, "root_tol": 1e-10 }
//! }
//! ```

use std::path::PathBuf;

use floquet_pt::analysis::{AxisMap, AxisTerm, EpBoundary, ProtocolField, DEFAULT_ROOT_TOL};
use floquet_pt::dynamics::{DEFAULT_DISCARD, DEFAULT_SUBSTEPS};
use floquet_pt::{DriveError, DriveProtocol, SegmentParams, DEFAULT_EP_TOL};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Syntax(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("`{key}` is not a valid number: {found}")]
    MalformedNumber { key: String, found: String },
    #[error("give either protocol.t0 and protocol.t1 or protocol.omega and protocol.t0_fraction, not both")]
    TimeConventionConflict,
    #[error("`{0}` and `{1}` cannot both be given")]
    ConflictingKeys(String, String),
    #[error("`{key}` must be positive, got {value}")]
    NonPositiveTolerance { key: String, value: f64 },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("malformed override `{0}`, expected key=value")]
    MalformedOverride(String),
    #[error("invalid protocol: {0}")]
    Protocol(#[from] DriveError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub map: AxisMap,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryChoice {
    PlusOne,
    MinusOne,
    Both,
}

impl BoundaryChoice {
    pub fn boundaries(&self) -> &'static [EpBoundary] {
        match self {
            BoundaryChoice::PlusOne => &[EpBoundary::PlusOne],
            BoundaryChoice::MinusOne => &[EpBoundary::MinusOne],
            BoundaryChoice::Both => &[EpBoundary::PlusOne, EpBoundary::MinusOne],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpSpec {
    pub axis: AxisSpec,
    pub boundary: BoundaryChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsSpec {
    pub periods: usize,
    pub substeps: usize,
    pub discard: usize,
    pub initial: InitialState,
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        Self {
            periods: 300,
            substeps: DEFAULT_SUBSTEPS,
            discard: DEFAULT_DISCARD,
            initial: InitialState::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub protocol: DriveProtocol,
    pub sweep: Option<(AxisSpec, AxisSpec)>,
    pub ep: Option<EpSpec>,
    pub dynamics: DynamicsSpec,
    pub hf_levels: usize,
    pub k_max: u32,
    pub ep_tol: f64,
    pub root_tol: f64,
    pub out: Option<PathBuf>,
}

const TOP_KEYS: &[&str] = &[
    "protocol",
    "sweep",
    "ep",
    "dynamics",
    "hfcompare",
    "resonances",
    "tolerances",
    "out",
];
const PROTOCOL_KEYS: &[&str] = &[
    "delta",
    "delta0",
    "delta1",
    "gamma0",
    "gamma1",
    "t0",
    "t1",
    "omega",
    "t0_fraction",
];
const AXIS_KEYS: &[&str] = &["name", "field", "terms", "min", "max", "count"];
const TERM_KEYS: &[&str] = &["field", "scale", "offset"];
const DURATION_KEYS: &[&str] = &["t0", "t1"];
const FREQUENCY_KEYS: &[&str] = &["omega", "t0_fraction"];

pub fn parse_document(text: &str) -> Result<Value, ConfigError> {
    let v: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    if !v.is_object() {
        return Err(ConfigError::Syntax("top level must be an object".into()));
    }
    Ok(v)
}

/// Turns `key.path=value` overrides into one document layer. Values that
/// parse as JSON are taken as such; anything else is a string.
pub fn overrides_layer(sets: &[String]) -> Result<Value, ConfigError> {
    let mut root = Value::Object(Map::new());
    for s in sets {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::MalformedOverride(s.clone()))?;
        let path: Vec<&str> = key.trim().split('.').collect();
        if path.iter().any(|p| p.is_empty()) {
            return Err(ConfigError::MalformedOverride(s.clone()));
        }
        let value = serde_json::from_str(raw.trim())
            .unwrap_or_else(|_| Value::String(raw.trim().to_string()));
        let mut node = &mut root;
        for (i, part) in path.iter().enumerate() {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| ConfigError::InvalidValue {
                    key: path[..i].join("."),
                    reason: "not an object".into(),
                })?;
            if i + 1 == path.len() {
                obj.insert(part.to_string(), value.clone());
                break;
            }
            node = obj
                .entry(part.to_string())
                .or_insert_with(|| Value::Object(Map::new()));
        }
    }
    Ok(root)
}

/// Deep-merges `top` over `base`. Within an object, a key from one
/// convention in `top` drops the alternative convention from `base`.
pub fn merge(base: &mut Value, top: &Value) {
    let (Some(b), Some(t)) = (base.as_object_mut(), top.as_object()) else {
        *base = top.clone();
        return;
    };
    let exclusive: [(&[&str], &[&str]); 3] = [
        (DURATION_KEYS, FREQUENCY_KEYS),
        (&["delta"], &["delta0", "delta1"]),
        (&["field"], &["terms"]),
    ];
    for (lhs, rhs) in exclusive {
        for (group, other) in [(lhs, rhs), (rhs, lhs)] {
            if group.iter().any(|k| t.contains_key(*k)) {
                for k in other.iter().filter(|k| !t.contains_key(**k)) {
                    b.remove(*k);
                }
            }
        }
    }
    for (k, v) in t {
        match b.get_mut(k) {
            Some(existing) if existing.is_object() && v.is_object() => merge(existing, v),
            _ => {
                b.insert(k.clone(), v.clone());
            }
        }
    }
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], prefix: &str) -> Result<(), ConfigError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::UnknownKey(join(prefix, k))),
        None => Ok(()),
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn object<'a>(v: &'a Value, key: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    v.as_object().ok_or_else(|| ConfigError::InvalidValue {
        key: key.to_string(),
        reason: "expected an object".into(),
    })
}

fn number(obj: &Map<String, Value>, prefix: &str, key: &str) -> Result<Option<f64>, ConfigError> {
    let full = join(prefix, key);
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => match n.as_f64() {
            Some(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(ConfigError::MalformedNumber {
                key: full,
                found: n.to_string(),
            }),
        },
        Some(other) => Err(ConfigError::MalformedNumber {
            key: full,
            found: other.to_string(),
        }),
    }
}

fn required(obj: &Map<String, Value>, prefix: &str, key: &str) -> Result<f64, ConfigError> {
    number(obj, prefix, key)?.ok_or_else(|| ConfigError::MissingKey(join(prefix, key)))
}

fn count(obj: &Map<String, Value>, prefix: &str, key: &str) -> Result<Option<u64>, ConfigError> {
    let full = join(prefix, key);
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => {
            n.as_u64()
                .map(Some)
                .ok_or_else(|| ConfigError::MalformedNumber {
                    key: full,
                    found: n.to_string(),
                })
        }
        Some(other) => Err(ConfigError::MalformedNumber {
            key: full,
            found: other.to_string(),
        }),
    }
}

fn string<'a>(
    obj: &'a Map<String, Value>,
    prefix: &str,
    key: &str,
) -> Result<Option<&'a str>, ConfigError> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(ConfigError::InvalidValue {
            key: join(prefix, key),
            reason: "expected a string".into(),
        }),
    }
}

fn field(name: &str, key: String) -> Result<ProtocolField, ConfigError> {
    ProtocolField::from_name(name).ok_or_else(|| ConfigError::InvalidValue {
        key,
        reason: format!("unknown protocol field `{name}`"),
    })
}

fn parse_protocol(v: &Value) -> Result<DriveProtocol, ConfigError> {
    let obj = object(v, "protocol")?;
    check_keys(obj, PROTOCOL_KEYS, "protocol")?;
    let p = "protocol";

    let delta = number(obj, p, "delta")?;
    let (d0, d1) = match (
        delta,
        obj.contains_key("delta0") || obj.contains_key("delta1"),
    ) {
        (Some(_), true) => {
            let other = if obj.contains_key("delta0") {
                "protocol.delta0"
            } else {
                "protocol.delta1"
            };
            return Err(ConfigError::ConflictingKeys(
                "protocol.delta".into(),
                other.into(),
            ));
        }
        (Some(d), false) => (d, d),
        (None, _) => (required(obj, p, "delta0")?, required(obj, p, "delta1")?),
    };
    let (g0, g1) = (required(obj, p, "gamma0")?, required(obj, p, "gamma1")?);

    let has_durations = DURATION_KEYS.iter().any(|k| obj.contains_key(*k));
    let has_frequency = FREQUENCY_KEYS.iter().any(|k| obj.contains_key(*k));
    match (has_durations, has_frequency) {
        (true, true) => Err(ConfigError::TimeConventionConflict),
        (true, false) => Ok(DriveProtocol::new(
            SegmentParams::new(d0, g0, required(obj, p, "t0")?),
            SegmentParams::new(d1, g1, required(obj, p, "t1")?),
        )?),
        (false, true) => Ok(DriveProtocol::from_frequency(
            required(obj, p, "omega")?,
            required(obj, p, "t0_fraction")?,
            (d0, d1),
            (g0, g1),
        )?),
        (false, false) => Err(ConfigError::MissingKey("protocol.t0".into())),
    }
}

fn parse_axis_map(
    obj: &Map<String, Value>,
    prefix: &str,
) -> Result<(AxisMap, String), ConfigError> {
    match (obj.get("field"), obj.get("terms")) {
        (Some(_), Some(_)) => Err(ConfigError::ConflictingKeys(
            join(prefix, "field"),
            join(prefix, "terms"),
        )),
        (Some(_), None) => {
            let name = string(obj, prefix, "field")?.unwrap_or_default();
            Ok((
                AxisMap::single(field(name, join(prefix, "field"))?),
                name.to_string(),
            ))
        }
        (None, Some(Value::Array(items))) if !items.is_empty() => {
            let mut terms = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let key = format!("{prefix}.terms.{i}");
                let t = object(item, &key)?;
                check_keys(t, TERM_KEYS, &key)?;
                let name = string(t, &key, "field")?
                    .ok_or_else(|| ConfigError::MissingKey(join(&key, "field")))?;
                terms.push(AxisTerm::new(
                    field(name, join(&key, "field"))?,
                    number(t, &key, "scale")?.unwrap_or(1.0),
                    number(t, &key, "offset")?.unwrap_or(0.0),
                ));
            }
            let name = terms
                .iter()
                .map(|t| t.field.name())
                .collect::<Vec<_>>()
                .join("+");
            Ok((AxisMap::new(terms), name))
        }
        (None, Some(_)) => Err(ConfigError::InvalidValue {
            key: join(prefix, "terms"),
            reason: "expected a non-empty array".into(),
        }),
        (None, None) => Err(ConfigError::MissingKey(join(prefix, "field"))),
    }
}

fn parse_axis(
    v: &Value,
    prefix: &str,
    extra_keys: &[&str],
    default_count: u64,
) -> Result<AxisSpec, ConfigError> {
    let obj = object(v, prefix)?;
    let allowed: Vec<&str> = AXIS_KEYS.iter().chain(extra_keys).copied().collect();
    check_keys(obj, &allowed, prefix)?;
    let (map, default_name) = parse_axis_map(obj, prefix)?;
    let name = string(obj, prefix, "name")?
        .map(str::to_string)
        .unwrap_or(default_name);
    let (min, max) = (required(obj, prefix, "min")?, required(obj, prefix, "max")?);
    let n = count(obj, prefix, "count")?.unwrap_or(default_count);
    if n < 2 {
        return Err(ConfigError::InvalidValue {
            key: join(prefix, "count"),
            reason: "need at least 2 points".into(),
        });
    }
    if min == max {
        return Err(ConfigError::InvalidValue {
            key: join(prefix, "max"),
            reason: "range is empty".into(),
        });
    }
    Ok(AxisSpec {
        name,
        map,
        min,
        max,
        count: n as usize,
    })
}

fn section<'a>(
    root: &'a Map<String, Value>,
    key: &str,
    allowed: &[&str],
) -> Result<Option<&'a Map<String, Value>>, ConfigError> {
    match root.get(key) {
        None => Ok(None),
        Some(v) => {
            let obj = object(v, key)?;
            check_keys(obj, allowed, key)?;
            Ok(Some(obj))
        }
    }
}

fn positive_tolerance(
    obj: Option<&Map<String, Value>>,
    key: &str,
    default: f64,
) -> Result<f64, ConfigError> {
    let value = match obj {
        Some(o) => number(o, "tolerances", key)?.unwrap_or(default),
        None => default,
    };
    if value > 0.0 {
        Ok(value)
    } else {
        Err(ConfigError::NonPositiveTolerance {
            key: join("tolerances", key),
            value,
        })
    }
}

/// Validates a merged document.
pub fn parse_config(doc: &Value) -> Result<RunConfig, ConfigError> {
    let root = object(doc, "config")?;
    check_keys(root, TOP_KEYS, "")?;
    let protocol = parse_protocol(
        root.get("protocol")
            .ok_or_else(|| ConfigError::MissingKey("protocol".into()))?,
    )?;

    let sweep = match section(root, "sweep", &["x", "y"])? {
        None => None,
        Some(s) => {
            let x = s
                .get("x")
                .ok_or_else(|| ConfigError::MissingKey("sweep.x".into()))?;
            let y = s
                .get("y")
                .ok_or_else(|| ConfigError::MissingKey("sweep.y".into()))?;
            Some((
                parse_axis(x, "sweep.x", &[], 201)?,
                parse_axis(y, "sweep.y", &[], 201)?,
            ))
        }
    };

    let ep = match root.get("ep") {
        None => None,
        Some(v) => {
            let axis = parse_axis(v, "ep", &["boundary"], 400)?;
            let boundary = match string(object(v, "ep")?, "ep", "boundary")? {
                None | Some("both") => BoundaryChoice::Both,
                Some("plus_one") => BoundaryChoice::PlusOne,
                Some("minus_one") => BoundaryChoice::MinusOne,
                Some(other) => {
                    return Err(ConfigError::InvalidValue {
                        key: "ep.boundary".into(),
                        reason: format!("`{other}`, expected plus_one, minus_one or both"),
                    })
                }
            };
            Some(EpSpec { axis, boundary })
        }
    };

    let mut dynamics = DynamicsSpec::default();
    if let Some(d) = section(
        root,
        "dynamics",
        &["periods", "substeps", "discard", "initial"],
    )? {
        if let Some(n) = count(d, "dynamics", "periods")? {
            dynamics.periods = n as usize;
        }
        if let Some(n) = count(d, "dynamics", "substeps")? {
            dynamics.substeps = n as usize;
        }
        if let Some(n) = count(d, "dynamics", "discard")? {
            dynamics.discard = n as usize;
        }
        dynamics.initial = match string(d, "dynamics", "initial")? {
            None | Some("up") => InitialState::Up,
            Some("down") => InitialState::Down,
            Some(other) => {
                return Err(ConfigError::InvalidValue {
                    key: "dynamics.initial".into(),
                    reason: format!("`{other}`, expected up or down"),
                })
            }
        };
    }
    if dynamics.periods < 1 {
        return Err(ConfigError::InvalidValue {
            key: "dynamics.periods".into(),
            reason: "need at least 1".into(),
        });
    }
    if dynamics.substeps < 4 {
        return Err(ConfigError::InvalidValue {
            key: "dynamics.substeps".into(),
            reason: "need at least 4".into(),
        });
    }

    let hf_levels = match section(root, "hfcompare", &["levels"])? {
        Some(h) => count(h, "hfcompare", "levels")?.unwrap_or(6) as usize,
        None => 6,
    };
    if hf_levels < 2 {
        return Err(ConfigError::InvalidValue {
            key: "hfcompare.levels".into(),
            reason: "need at least 2".into(),
        });
    }
    let k_max = match section(root, "resonances", &["k_max"])? {
        Some(r) => count(r, "resonances", "k_max")?.unwrap_or(6),
        None => 6,
    };
    let k_max = u32::try_from(k_max).map_err(|_| ConfigError::InvalidValue {
        key: "resonances.k_max".into(),
        reason: "too large".into(),
    })?;

    let tol = section(root, "tolerances", &["ep_tol", "root_tol"])?;
    let ep_tol = positive_tolerance(tol, "ep_tol", DEFAULT_EP_TOL)?;
    let root_tol = positive_tolerance(tol, "root_tol", DEFAULT_ROOT_TOL)?;

    let out = string(root, "", "out")?.map(PathBuf::from);

    Ok(RunConfig {
        protocol,
        sweep,
        ep,
        dynamics,
        hf_levels,
        k_max,
        ep_tol,
        root_tol,
        out,
    })
}

/// Parses a single JSON document with no preset and no overrides.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config(&parse_document(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn minimal_classify_config() {
        let cfg = parse_config_str(
            r#"{"protocol": {"delta0": 1, "delta1": 1, "gamma0": 0.2, "gamma1": 0, "t0": 3.14, "t1": 3.14}}"#,
        )
        .unwrap();
        assert_eq!(cfg.protocol.seg0().gamma, 0.2);
        assert_eq!(cfg.ep_tol, DEFAULT_EP_TOL);
        assert!(cfg.sweep.is_none());
    }

    #[test]
    fn both_time_conventions_rejected() {
        let err = parse_config_str(
            r#"{"protocol": {"delta": 1, "gamma0": 0, "gamma1": 0, "t0": 1, "t1": 1, "omega": 2}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::TimeConventionConflict));
    }

    #[test]
    fn malformed_number_names_key() {
        let err = parse_config_str(
            r#"{"protocol": {"delta": "one", "gamma0": 0, "gamma1": 0, "t0": 1, "t1": 1}}"#,
        )
        .unwrap_err();
        match err {
            ConfigError::MalformedNumber { key, .. } => assert_eq!(key, "protocol.delta"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn override_replaces_time_convention() {
        let mut doc = json!({"protocol": {"delta": 1, "gamma0": 0, "gamma1": 0, "omega": 1, "t0_fraction": 0.5}});
        let layer = overrides_layer(&["protocol.t0=1".into(), "protocol.t1=2".into()]).unwrap();
        merge(&mut doc, &layer);
        let cfg = parse_config(&doc).unwrap();
        assert_eq!(cfg.protocol.period(), 3.0);
    }

    #[test]
    fn non_json_override_is_a_string() {
        let layer = overrides_layer(&["protocol.gamma0=abc".into()]).unwrap();
        assert_eq!(layer["protocol"]["gamma0"], json!("abc"));
        assert!(overrides_layer(&["noequals".into()]).is_err());
    }

    #[test]
    fn zero_tolerance_rejected() {
        let err = parse_config_str(
            r#"{"protocol": {"delta": 1, "gamma0": 0, "gamma1": 0, "t0": 1, "t1": 1}, "tolerances": {"root_tol": 0}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::NonPositiveTolerance { .. }));
    }
}
