//! TOML run configuration and its validation.

use std::fmt;

use finsler_core::{DomainSpec, GFamily, MetricSpec, NormSpec, PhiFamily};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Eval,
    Certify,
    Curvature,
    Sandwich,
    Schwarz,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Task::Eval => "eval",
            Task::Certify => "certify",
            Task::Curvature => "curvature",
            Task::Sandwich => "sandwich",
            Task::Schwarz => "schwarz",
        };
        f.write_str(s)
    }
}

/// One field-level problem, `path` in dotted form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError(pub Vec<FieldError>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| format!("{}: {}", e.path, e.message)).collect();
        write!(f, "invalid config: {}", parts.join("; "))
    }
}

impl ConfigError {
    fn one(path: &str, message: impl Into<String>) -> Self {
        Self(vec![FieldError {
            path: path.into(),
            message: message.into(),
        }])
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    task: Option<Task>,
    seed: Option<u64>,
    samples: Option<usize>,
    domain: Option<RawDomain>,
    metric: Option<RawMetric>,
    schwarz: Option<RawSchwarz>,
    tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    kind: Option<String>,
    m: Option<usize>,
    n: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    family: Option<String>,
    t: Option<f64>,
    k: Option<i64>,
    c: Option<f64>,
    weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchwarz {
    target: Option<RawDomain>,
    target_metric: Option<RawMetric>,
    maps: Option<usize>,
}

/// Pass/fail thresholds; anything below `1e-14` is raised to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative deviation of `F` under automorphisms.
    pub invariance: f64,
    /// Slack on sampled curvature values against `[−K₁, −K₂]`.
    pub curvature: f64,
    /// Relative slack of the comparison inequalities.
    pub sandwich: f64,
    /// Equality residual at the curvature extremizers.
    pub equality: f64,
    /// Schwarz margin, relative to `F₁`.
    pub violation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            invariance: 1e-9,
            curvature: 1e-7,
            sandwich: finsler_core::comparison::SANDWICH_SLACK,
            equality: finsler_core::comparison::EQUALITY_TOL,
            violation: finsler_core::schwarz::VIOLATION_TOL,
        }
    }
}

impl Tolerances {
    fn clamped(mut self) -> Self {
        for x in [
            &mut self.invariance,
            &mut self.curvature,
            &mut self.sandwich,
            &mut self.equality,
            &mut self.violation,
        ] {
            if !x.is_finite() || *x < 1e-14 {
                *x = x.max(1e-14);
                if !x.is_finite() {
                    *x = 1e-14;
                }
            }
        }
        self
    }
}

#[derive(Debug, Clone)]
pub struct SchwarzTarget {
    pub metric: MetricSpec,
    pub maps: usize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub task: Task,
    pub seed: u64,
    pub samples: usize,
    pub metric: MetricSpec,
    pub schwarz: SchwarzTarget,
    pub tolerances: Tolerances,
}

pub const DEFAULT_SEED: u64 = 1;

/// Sample count when neither the config nor the command line sets one;
/// for `schwarz` it counts samples per map.
pub fn default_samples(task: Task) -> usize {
    match task {
        Task::Eval | Task::Certify => 1000,
        Task::Curvature | Task::Sandwich => 10_000,
        Task::Schwarz => 100,
    }
}
pub const DEFAULT_MAPS: usize = 100;

fn domain_of(raw: &RawDomain, path: &str, errors: &mut Vec<FieldError>) -> Option<DomainSpec> {
    let mut err = |field: &str, msg: String| {
        errors.push(FieldError {
            path: format!("{path}.{field}"),
            message: msg,
        });
    };
    let Some(kind) = raw.kind.as_deref() else {
        err("kind", "missing field".into());
        return None;
    };
    let need = |v: Option<usize>, field: &str, err: &mut dyn FnMut(&str, String)| {
        if v.is_none() {
            err(field, "missing field".into());
        }
        v
    };
    let spec = match kind.to_ascii_uppercase().as_str() {
        "I" => {
            let (m, n) = (need(raw.m, "m", &mut err), need(raw.n, "n", &mut err));
            DomainSpec::type_i(m?, n?)
        }
        "II" => DomainSpec::type_ii(need(raw.m, "m", &mut err)?),
        "III" => DomainSpec::type_iii(need(raw.m, "m", &mut err)?),
        "IV" => DomainSpec::type_iv(need(raw.n, "n", &mut err)?),
        other => {
            err(
                "kind",
                format!("unknown domain kind `{other}` (expected I, II, III or IV)"),
            );
            return None;
        }
    };
    match spec {
        Ok(s) => Some(s),
        Err(e) => {
            err("kind", e.to_string());
            None
        }
    }
}

fn metric_of(raw: &RawMetric, domain: DomainSpec, path: &str, errors: &mut Vec<FieldError>) -> Option<MetricSpec> {
    let before = errors.len();
    let mut err = |field: &str, msg: &str| {
        errors.push(FieldError {
            path: format!("{path}.{field}"),
            message: msg.into(),
        });
    };
    let Some(family) = raw.family.as_deref() else {
        err("family", "missing field");
        return None;
    };
    let iv = domain.kind == finsler_core::DomainKind::IV;
    let c = raw.c.unwrap_or_else(|| finsler_core::metrics::default_c(&domain));
    if !(c.is_finite() && c > 0.0) {
        err("c", "c must be positive");
    }
    let norm = match family.to_ascii_lowercase().as_str() {
        "bergman" if iv => Some(NormSpec::Phi(PhiFamily::Constant {
            c: raw.c.unwrap_or(1.0),
        })),
        "bergman" => Some(NormSpec::G(GFamily::Bergman { c })),
        "tk" => {
            let t = raw.t.unwrap_or(0.0);
            if !(t.is_finite() && t >= 0.0) {
                err("t", "t ∈ [0,∞)");
            }
            match raw.k {
                None => err("k", "missing field"),
                Some(k) if k < 2 => err("k", "k ≥ 2"),
                _ => {}
            }
            if iv {
                err("family", "tk does not apply to type IV");
            }
            GFamily::tk(t, raw.k.unwrap_or(2).max(2) as usize, c)
                .ok()
                .map(NormSpec::G)
        }
        "linear" => match &raw.weights {
            Some(w) if !w.is_empty() && w.iter().all(|x| x.is_finite()) => {
                if iv {
                    err("family", "linear does not apply to type IV");
                }
                Some(NormSpec::G(GFamily::Linear { weights: w.clone() }))
            }
            _ => {
                err("weights", "a nonempty list of finite weights is required");
                None
            }
        },
        "constant" => {
            if !iv {
                err("family", "constant applies to type IV only");
            }
            Some(NormSpec::Phi(PhiFamily::Constant {
                c: raw.c.unwrap_or(1.0),
            }))
        }
        "affine" => {
            let t = raw.t.unwrap_or(0.0);
            if !iv {
                err("family", "affine applies to type IV only");
            }
            match PhiFamily::affine(t) {
                Ok(p) => Some(NormSpec::Phi(p)),
                Err(_) => {
                    err("t", "t ∈ (−1,∞)");
                    None
                }
            }
        }
        other => {
            err("family", &format!("unknown family `{other}`"));
            None
        }
    };
    if errors.len() > before {
        return None;
    }
    match MetricSpec::new(domain, norm?) {
        Ok(m) => Some(m),
        Err(e) => {
            errors.push(FieldError {
                path: format!("{path}.family"),
                message: e.to_string(),
            });
            None
        }
    }
}

/// Parses and validates a TOML document. `task` from the command line takes
/// the place of a missing `task` key and must agree with a present one.
pub fn parse_config(text: &str, task: Option<Task>) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let path = e
            .span()
            .map(|s| format!("byte {}", s.start))
            .unwrap_or_else(|| "document".into());
        ConfigError::one(&path, e.message().to_string())
    })?;
    let mut errors = Vec::new();
    let task = match (raw.task, task) {
        (Some(a), Some(b)) if a != b => {
            errors.push(FieldError {
                path: "task".into(),
                message: format!("config says `{a}` but `{b}` was requested"),
            });
            b
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => {
            errors.push(FieldError {
                path: "task".into(),
                message: "missing field".into(),
            });
            Task::Eval
        }
    };
    let samples = raw.samples.unwrap_or(default_samples(task));
    if samples == 0 {
        errors.push(FieldError {
            path: "samples".into(),
            message: "samples ≥ 1".into(),
        });
    }
    let domain = match &raw.domain {
        Some(d) => domain_of(d, "domain", &mut errors),
        None => {
            errors.push(FieldError {
                path: "domain".into(),
                message: "missing table".into(),
            });
            None
        }
    };
    let metric = match (&raw.metric, domain) {
        (Some(m), Some(d)) => metric_of(m, d, "metric", &mut errors),
        (None, _) => {
            errors.push(FieldError {
                path: "metric".into(),
                message: "missing table".into(),
            });
            None
        }
        _ => None,
    };
    let schwarz = raw.schwarz.clone().unwrap_or(RawSchwarz {
        target: None,
        target_metric: None,
        maps: None,
    });
    let target_domain = match &schwarz.target {
        Some(t) => domain_of(t, "schwarz.target", &mut errors),
        None => domain,
    };
    let target_metric = match (&schwarz.target_metric, target_domain, &metric) {
        (Some(m), Some(d), _) => metric_of(m, d, "schwarz.target_metric", &mut errors),
        (None, Some(d), Some(src)) if Some(d) == domain => Some(src.clone()),
        (None, Some(d), Some(src)) => {
            // same family on a different domain
            let raw_src = raw.metric.clone().expect("source metric parsed");
            let _ = src;
            metric_of(&raw_src, d, "schwarz.target_metric", &mut errors)
        }
        _ => None,
    };
    let maps = schwarz.maps.unwrap_or(DEFAULT_MAPS);
    if maps == 0 {
        errors.push(FieldError {
            path: "schwarz.maps".into(),
            message: "maps ≥ 1".into(),
        });
    }
    if !errors.is_empty() {
        return Err(ConfigError(errors));
    }
    Ok(RunConfig {
        task,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        samples,
        metric: metric.expect("validated"),
        schwarz: SchwarzTarget {
            metric: target_metric.expect("validated"),
            maps,
        },
        tolerances: raw.tolerances.unwrap_or_default().clamped(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
task = "eval"
[domain]
kind = "I"
m = 2
n = 2
[metric]
family = "bergman"
"#;

    fn paths(e: ConfigError) -> Vec<String> {
        e.0.into_iter().map(|f| format!("{}: {}", f.path, f.message)).collect()
    }

    #[test]
    fn minimal_config() {
        let c = parse_config(MINIMAL, None).unwrap();
        assert_eq!(c.task, Task::Eval);
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.metric.label(), "bergman(c=4) on I(2,2)");
        assert_eq!(c.schwarz.metric.label(), c.metric.label());
    }

    #[test]
    fn tk_parameter_errors() {
        let text = MINIMAL.replace("\"bergman\"", "\"tk\"\nk = 1\nt = -1.0");
        let errs = paths(parse_config(&text, None).unwrap_err());
        assert!(errs.contains(&"metric.k: k ≥ 2".to_string()), "{errs:?}");
        assert!(errs.contains(&"metric.t: t ∈ [0,∞)".to_string()), "{errs:?}");
    }

    #[test]
    fn unknown_family_and_missing_fields() {
        let text = MINIMAL.replace("\"bergman\"", "\"nope\"");
        let errs = paths(parse_config(&text, None).unwrap_err());
        assert_eq!(errs, vec!["metric.family: unknown family `nope`"]);
        let errs = paths(parse_config("task = \"eval\"", None).unwrap_err());
        assert_eq!(errs, vec!["domain: missing table", "metric: missing table"]);
        let errs = paths(parse_config("[domain]\nkind = \"I\"\n[metric]\nfamily=\"bergman\"", None).unwrap_err());
        assert!(errs.contains(&"task: missing field".to_string()));
        assert!(errs.contains(&"domain.m: missing field".to_string()));
    }

    #[test]
    fn task_conflict_and_unknown_keys() {
        assert!(parse_config(MINIMAL, Some(Task::Curvature)).is_err());
        assert!(parse_config(&format!("{MINIMAL}\nbogus = 1"), None).is_err());
    }

    #[test]
    fn tolerances_are_clamped() {
        let text = format!("{MINIMAL}\n[tolerances]\nviolation = 0.0\n");
        let c = parse_config(&text, None).unwrap();
        assert_eq!(c.tolerances.violation, 1e-14);
        assert_eq!(c.tolerances.invariance, 1e-9);
    }

    #[test]
    fn family_must_fit_domain() {
        let text = MINIMAL.replace("\"bergman\"", "\"affine\"\nt = 0.5");
        assert!(parse_config(&text, None).is_err());
        let iv = "task = \"certify\"\n[domain]\nkind = \"IV\"\nn = 3\n[metric]\nfamily = \"affine\"\nt = 2.0\n";
        assert!(parse_config(iv, None).is_ok());
    }
}
