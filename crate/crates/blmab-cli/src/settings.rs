//! Key=value config files, flag overrides, and the effective-settings echo
//! that every manifest hash covers. Flags win over file entries; defaults
//! fill whatever remains, so the echo always shows the values actually used.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use blmab::arrivals::Tail;
use blmab::engine::{PolicySpec, SweepConfig};
use blmab::lambertw::DEFAULT_TRADEOFF;
use blmab::policies::MossNormalization;
use blmab::{Error, Result};

pub const DEFAULT_HORIZONS: [u64; 5] = [10_000, 20_000, 50_000, 70_000, 100_000];
pub const DEFAULT_INSTANCES: u32 = 200;
pub const DEFAULT_SUBINSTANCES: u32 = 20;
pub const DEFAULT_DEMO_SUBINSTANCES: u32 = 5;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DEMO_EPSILON: f64 = 0.1;
pub const DEFAULT_DEMO_ALPHA: f64 = 1.0;

pub const RUN_KEYS: &[&str] = &[
    "tail", "param", "policy", "c", "alpha", "norm", "epsilon", "horizon", "horizons",
    "n_instances", "n_sub", "seed",
];
pub const DEMO_KEYS: &[&str] =
    &["epsilon", "baseline", "alpha", "horizons", "n_instances", "n_sub", "seed"];
pub const FIT_KEYS: &[&str] = &["input", "beta"];
pub const ESTIMATE_KEYS: &[&str] = &["input", "horizon", "mu", "delta"];

/// Raw string settings keyed by name.
#[derive(Debug, Default)]
pub struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    /// Loads `key = value` lines. Blank lines and lines starting with `#`
    /// are skipped; keys outside `allowed` are usage errors.
    pub fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self> {
        let mut kv = KeyValues::default();
        let Some(path) = path else { return Ok(kv) };
        let text = fs::read_to_string(path)?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected key=value, got {line:?}"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !allowed.contains(&key) {
                return Err(Error::config(format!("unknown config key `{key}`")));
            }
            if value.is_empty() {
                return Err(Error::config(format!("config key `{key}` has an empty value")));
            }
            kv.map.insert(key.to_string(), value.to_string());
        }
        Ok(kv)
    }

    /// Installs a flag value over whatever the file said.
    pub fn override_with<T: Display>(&mut self, key: &str, flag: Option<T>) {
        if let Some(value) = flag {
            self.map.insert(key.to_string(), value.to_string());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    /// Parses a key if present; failures name the key and the raw text.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                Error::config(format!("config key `{key}`: {e} (got `{raw}`)"))
            }),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.parsed(key)?
            .ok_or_else(|| Error::config(format!("missing required key `{key}`")))
    }
}

/// A simulate/sweep/bound-check run plus its manifest echo.
#[derive(Debug)]
pub struct RunPlan {
    pub sweep: SweepConfig,
    pub echo: BTreeMap<String, String>,
}

pub fn run_plan(kv: &KeyValues, single_horizon: bool) -> Result<RunPlan> {
    let tail = parse_tail(kv)?;
    let policy = parse_policy(kv)?;
    let epsilon = kv.parsed::<f64>("epsilon")?;
    let horizons = parse_horizons(kv, single_horizon)?;
    let (n_instances, n_subinstances, seed) = parse_protocol(kv, DEFAULT_SUBINSTANCES)?;
    let sweep = SweepConfig {
        tail,
        epsilon,
        policy,
        horizons,
        n_instances,
        n_subinstances,
        master_seed: seed,
    };
    let echo = sweep_echo(&sweep, single_horizon);
    Ok(RunPlan { sweep, echo })
}

/// The demonstration runs two sweeps over the same instances: an all-arms
/// baseline and the capped policy with a pinned exploration fraction.
pub struct DemoPlan {
    pub baseline: SweepConfig,
    pub capped: SweepConfig,
    pub echo: BTreeMap<String, String>,
}

pub fn demo_plan(kv: &KeyValues) -> Result<DemoPlan> {
    let epsilon = kv.parsed::<f64>("epsilon")?.unwrap_or(DEFAULT_DEMO_EPSILON);
    let baseline_name = kv.raw("baseline").unwrap_or("ucb1");
    let baseline_policy = match baseline_name {
        "ucb1" => PolicySpec::Ucb1,
        "moss" => PolicySpec::Moss,
        other => {
            return Err(Error::config(format!(
                "unknown baseline `{other}` (expected ucb1 or moss)"
            )))
        }
    };
    let alpha = kv.parsed::<f64>("alpha")?.unwrap_or(DEFAULT_DEMO_ALPHA);
    let horizons = parse_horizons(kv, false)?;
    let (n_instances, n_subinstances, seed) = parse_protocol(kv, DEFAULT_DEMO_SUBINSTANCES)?;

    let baseline = SweepConfig {
        tail: Tail::Uniform,
        epsilon: Some(epsilon),
        policy: baseline_policy,
        horizons,
        n_instances,
        n_subinstances,
        master_seed: seed,
    };
    let capped = SweepConfig {
        policy: PolicySpec::BlMoss {
            c: DEFAULT_TRADEOFF,
            norm: MossNormalization::default(),
            alpha_override: Some(alpha),
        },
        ..baseline.clone()
    };

    let mut echo = BTreeMap::new();
    echo.insert("baseline".to_string(), baseline_name.to_string());
    echo.insert("epsilon".to_string(), epsilon.to_string());
    echo.insert("alpha".to_string(), alpha.to_string());
    echo.insert("horizons".to_string(), join_horizons(&baseline.horizons));
    echo.insert("n_instances".to_string(), n_instances.to_string());
    echo.insert("n_sub".to_string(), n_subinstances.to_string());
    echo.insert("seed".to_string(), seed.to_string());
    Ok(DemoPlan { baseline, capped, echo })
}

pub struct FitPlan {
    pub input: PathBuf,
    pub beta: Option<f64>,
    pub echo: BTreeMap<String, String>,
}

pub fn fit_plan(kv: &KeyValues) -> Result<FitPlan> {
    let input: PathBuf = kv.required("input")?;
    let beta = kv.parsed::<f64>("beta")?;
    let mut echo = BTreeMap::new();
    echo.insert("input".to_string(), input.display().to_string());
    if let Some(beta) = beta {
        echo.insert("beta".to_string(), beta.to_string());
    }
    Ok(FitPlan { input, beta, echo })
}

pub struct EstimatePlan {
    pub input: PathBuf,
    pub horizon: u64,
    pub mu: f64,
    pub delta: f64,
    pub echo: BTreeMap<String, String>,
}

pub fn estimate_plan(kv: &KeyValues) -> Result<EstimatePlan> {
    let input: PathBuf = kv.required("input")?;
    let horizon: u64 = kv.required("horizon")?;
    let mu = kv.parsed::<f64>("mu")?.unwrap_or(0.05);
    let delta = kv.parsed::<f64>("delta")?.unwrap_or(0.05);
    let mut echo = BTreeMap::new();
    echo.insert("input".to_string(), input.display().to_string());
    echo.insert("horizon".to_string(), horizon.to_string());
    echo.insert("mu".to_string(), mu.to_string());
    echo.insert("delta".to_string(), delta.to_string());
    Ok(EstimatePlan { input, horizon, mu, delta, echo })
}

fn parse_tail(kv: &KeyValues) -> Result<Tail> {
    let family = kv
        .raw("tail")
        .ok_or_else(|| Error::config("missing required key `tail`".to_string()))?;
    let param = kv.parsed::<f64>("param")?;
    match family {
        "subexp" => param
            .map(|lambda| Tail::SubExponential { lambda })
            .ok_or_else(|| Error::config("tail `subexp` needs `param` (the rate)".to_string())),
        "subpareto" => param
            .map(|beta| Tail::SubPareto { beta })
            .ok_or_else(|| {
                Error::config("tail `subpareto` needs `param` (the power)".to_string())
            }),
        "uniform" => {
            if param.is_some() {
                Err(Error::config("tail `uniform` takes no `param`".to_string()))
            } else {
                Ok(Tail::Uniform)
            }
        }
        other => Err(Error::config(format!(
            "unknown tail `{other}` (expected subexp, subpareto, or uniform)"
        ))),
    }
}

fn parse_policy(kv: &KeyValues) -> Result<PolicySpec> {
    let name = kv.raw("policy").unwrap_or("blmoss");
    match name {
        "blmoss" => Ok(PolicySpec::BlMoss {
            c: kv.parsed::<f64>("c")?.unwrap_or(DEFAULT_TRADEOFF),
            norm: parse_norm(kv)?,
            alpha_override: kv.parsed::<f64>("alpha")?,
        }),
        "moss" | "ucb1" | "thompson" => {
            for key in ["c", "alpha", "norm"] {
                if kv.contains(key) {
                    return Err(Error::config(format!(
                        "key `{key}` applies to the blmoss policy only"
                    )));
                }
            }
            Ok(match name {
                "moss" => PolicySpec::Moss,
                "ucb1" => PolicySpec::Ucb1,
                _ => PolicySpec::Thompson,
            })
        }
        other => Err(Error::config(format!(
            "unknown policy `{other}` (expected blmoss, moss, ucb1, or thompson)"
        ))),
    }
}

fn parse_norm(kv: &KeyValues) -> Result<MossNormalization> {
    match kv.raw("norm") {
        None | Some("admission_cap") => Ok(MossNormalization::AdmissionCap),
        Some("admitted_count") => Ok(MossNormalization::AdmittedCount),
        Some(other) => Err(Error::config(format!(
            "unknown norm `{other}` (expected admission_cap or admitted_count)"
        ))),
    }
}

fn parse_horizons(kv: &KeyValues, single: bool) -> Result<Vec<u64>> {
    if single {
        if kv.contains("horizons") {
            return Err(Error::config("this command takes `horizon`, not `horizons`".to_string()));
        }
        Ok(vec![kv.required("horizon")?])
    } else {
        if kv.contains("horizon") {
            return Err(Error::config("this command takes `horizons`, not `horizon`".to_string()));
        }
        match kv.raw("horizons") {
            None => Ok(DEFAULT_HORIZONS.to_vec()),
            Some(raw) => raw
                .split(',')
                .map(|part| {
                    part.trim().parse::<u64>().map_err(|e| {
                        Error::config(format!("config key `horizons`: {e} (got `{part}`)"))
                    })
                })
                .collect(),
        }
    }
}

fn parse_protocol(kv: &KeyValues, default_sub: u32) -> Result<(u32, u32, u64)> {
    let n_instances = kv.parsed::<u32>("n_instances")?.unwrap_or(DEFAULT_INSTANCES);
    let n_subinstances = kv.parsed::<u32>("n_sub")?.unwrap_or(default_sub);
    let seed = kv.parsed::<u64>("seed")?.unwrap_or(DEFAULT_SEED);
    if n_instances == 0 || n_subinstances == 0 {
        return Err(Error::config("n_instances and n_sub must be positive".to_string()));
    }
    Ok((n_instances, n_subinstances, seed))
}

pub fn policy_label(policy: &PolicySpec) -> &'static str {
    match policy {
        PolicySpec::BlMoss { .. } => "blmoss",
        PolicySpec::Moss => "moss",
        PolicySpec::Ucb1 => "ucb1",
        PolicySpec::Thompson => "thompson",
    }
}

pub fn policy_tradeoff(policy: &PolicySpec) -> Option<f64> {
    match policy {
        PolicySpec::BlMoss { c, .. } => Some(*c),
        _ => None,
    }
}

pub fn policy_alpha_override(policy: &PolicySpec) -> Option<f64> {
    match policy {
        PolicySpec::BlMoss { alpha_override, .. } => *alpha_override,
        _ => None,
    }
}

fn join_horizons(horizons: &[u64]) -> String {
    horizons.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Materializes the effective settings, defaults included, so two ways of
/// expressing the same run hash identically.
fn sweep_echo(cfg: &SweepConfig, single: bool) -> BTreeMap<String, String> {
    let mut echo = BTreeMap::new();
    echo.insert("tail".to_string(), cfg.tail.label().to_string());
    if let Some(param) = cfg.tail.parameter() {
        echo.insert("param".to_string(), param.to_string());
    }
    echo.insert("policy".to_string(), policy_label(&cfg.policy).to_string());
    if let PolicySpec::BlMoss { c, norm, alpha_override } = &cfg.policy {
        echo.insert("c".to_string(), c.to_string());
        let norm_name = match norm {
            MossNormalization::AdmissionCap => "admission_cap",
            MossNormalization::AdmittedCount => "admitted_count",
        };
        echo.insert("norm".to_string(), norm_name.to_string());
        if let Some(alpha) = alpha_override {
            echo.insert("alpha".to_string(), alpha.to_string());
        }
    }
    if let Some(epsilon) = cfg.epsilon {
        echo.insert("epsilon".to_string(), epsilon.to_string());
    }
    let horizon_key = if single { "horizon" } else { "horizons" };
    echo.insert(horizon_key.to_string(), join_horizons(&cfg.horizons));
    echo.insert("n_instances".to_string(), cfg.n_instances.to_string());
    echo.insert("n_sub".to_string(), cfg.n_subinstances.to_string());
    echo.insert("seed".to_string(), cfg.master_seed.to_string());
    echo
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn kv_from(text: &str, allowed: &[&str]) -> Result<KeyValues> {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        KeyValues::load(Some(file.path()), allowed)
    }

    #[test]
    fn config_file_round_trip() {
        let kv = kv_from(
            "# comment\n\ntail = subexp\nparam=0.5\nseed = 7\n",
            RUN_KEYS,
        )
        .unwrap();
        let plan = run_plan(&kv, false).unwrap();
        assert_eq!(plan.sweep.tail, Tail::SubExponential { lambda: 0.5 });
        assert_eq!(plan.sweep.master_seed, 7);
        assert_eq!(plan.sweep.horizons, DEFAULT_HORIZONS.to_vec());
        assert_eq!(plan.sweep.n_instances, DEFAULT_INSTANCES);
        assert_eq!(plan.echo.get("param").map(String::as_str), Some("0.5"));
        assert_eq!(plan.echo.get("c").map(String::as_str), Some("0.5"));
    }

    #[test]
    fn flags_override_file_values() {
        let mut kv = kv_from("tail=subexp\nparam=0.5\n", RUN_KEYS).unwrap();
        kv.override_with("param", Some(2.0));
        let plan = run_plan(&kv, false).unwrap();
        assert_eq!(plan.sweep.tail, Tail::SubExponential { lambda: 2.0 });
    }

    #[test]
    fn bad_configs_name_the_key() {
        let err = kv_from("tial=subexp\n", RUN_KEYS).unwrap_err();
        assert!(err.to_string().contains("tial"), "{err}");

        let err = kv_from("tail=subexp\nparam=1\nseed=soon\n", RUN_KEYS)
            .and_then(|kv| run_plan(&kv, false))
            .unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");

        let err = kv_from("tail=uniform\nparam=1\n", RUN_KEYS)
            .and_then(|kv| run_plan(&kv, false))
            .unwrap_err();
        assert!(err.to_string().contains("uniform"), "{err}");

        let err = kv_from("tail=subexp\nparam=1\npolicy=ucb1\nc=0.5\n", RUN_KEYS)
            .and_then(|kv| run_plan(&kv, false))
            .unwrap_err();
        assert!(err.to_string().contains("blmoss"), "{err}");
    }

    #[test]
    fn single_and_grid_horizon_keys_are_exclusive() {
        let kv = kv_from("tail=subexp\nparam=1\nhorizons=10,20\n", RUN_KEYS).unwrap();
        assert!(run_plan(&kv, true).is_err());
        let kv = kv_from("tail=subexp\nparam=1\nhorizon=10\n", RUN_KEYS).unwrap();
        assert!(run_plan(&kv, false).is_err());
        let kv = kv_from("tail=subexp\nparam=1\nhorizon=10\n", RUN_KEYS).unwrap();
        assert_eq!(run_plan(&kv, true).unwrap().sweep.horizons, vec![10]);
    }

    #[test]
    fn demo_defaults() {
        let plan = demo_plan(&KeyValues::default()).unwrap();
        assert_eq!(plan.baseline.policy, PolicySpec::Ucb1);
        assert_eq!(plan.baseline.tail, Tail::Uniform);
        assert_eq!(plan.baseline.epsilon, Some(DEFAULT_DEMO_EPSILON));
        assert_eq!(plan.capped.tail, Tail::Uniform);
        assert_eq!(policy_alpha_override(&plan.capped.policy), Some(1.0));
        assert_eq!(plan.baseline.n_subinstances, DEFAULT_DEMO_SUBINSTANCES);
        assert_eq!(plan.baseline.master_seed, plan.capped.master_seed);
    }

    #[test]
    fn equivalent_spellings_share_an_echo() {
        let a = kv_from("tail=subexp\nparam=0.50\nc=0.500\n", RUN_KEYS).unwrap();
        let b = kv_from("tail=subexp\nparam=0.5\n", RUN_KEYS).unwrap();
        assert_eq!(run_plan(&a, false).unwrap().echo, run_plan(&b, false).unwrap().echo);
    }
}
