//! Command runners: merge settings, drive the engine, assemble artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use blmab::analysis::{fit_report, theoretical_exponent_subpareto, FitReport};
use blmab::engine::{audit_blmoss_point, run_sweep_with, PolicySpec, RegretCurve, RegretPoint, SweepConfig};
use blmab::estimation::{fit_event_time_file, required_samples, EventTimeFit};
use blmab::{Error, Result};

use crate::output::{self, CsvGroup, GroupSummary, RunSummary};
use crate::settings::{self, KeyValues};
use crate::{DemoArgs, EstimateArgs, FitArgs, RunArgs};

pub fn run_points(
    command: &'static str,
    args: RunArgs,
    single_horizon: bool,
    enforce_bounds: bool,
) -> Result<u8> {
    init_threads(args.threads)?;
    let mut kv = KeyValues::load(args.config.as_deref(), settings::RUN_KEYS)?;
    kv.override_with("tail", args.tail.as_ref());
    kv.override_with("param", args.param);
    kv.override_with("policy", args.policy.as_ref());
    kv.override_with("c", args.c);
    kv.override_with("alpha", args.alpha);
    kv.override_with("norm", args.norm.as_ref());
    kv.override_with("epsilon", args.epsilon);
    kv.override_with("horizon", args.horizon);
    kv.override_with("horizons", args.horizons.as_ref());
    kv.override_with("n_instances", args.n_instances);
    kv.override_with("n_sub", args.n_sub);
    kv.override_with("seed", args.seed);
    let plan = settings::run_plan(&kv, single_horizon)?;
    if enforce_bounds && !matches!(plan.sweep.policy, PolicySpec::BlMoss { .. }) {
        return Err(Error::config(
            "bound-check audits the blmoss policy; pick policy=blmoss".to_string(),
        ));
    }
    execute(command, plan.echo, vec![plan.sweep], args.out.as_deref(), enforce_bounds)
}

pub fn demo(args: DemoArgs) -> Result<u8> {
    init_threads(args.threads)?;
    let mut kv = KeyValues::load(args.config.as_deref(), settings::DEMO_KEYS)?;
    kv.override_with("epsilon", args.epsilon);
    kv.override_with("baseline", args.baseline.as_ref());
    kv.override_with("alpha", args.alpha);
    kv.override_with("horizons", args.horizons.as_ref());
    kv.override_with("n_instances", args.n_instances);
    kv.override_with("n_sub", args.n_sub);
    kv.override_with("seed", args.seed);
    let plan = settings::demo_plan(&kv)?;
    execute(
        "demo-lower-bound",
        plan.echo,
        vec![plan.baseline, plan.capped],
        args.out.as_deref(),
        false,
    )
}

/// Shared tail of the simulation commands: run each sweep, audit capped
/// groups, fit what can be fitted, and emit the CSV and JSON artifacts.
/// Returns exit code 1 when bounds are enforced and violated.
fn execute(
    command: &'static str,
    echo: BTreeMap<String, String>,
    runs: Vec<SweepConfig>,
    out: Option<&Path>,
    enforce_bounds: bool,
) -> Result<u8> {
    let manifest = output::manifest_hash(command, &echo);
    let seed = runs.first().map_or(0, |cfg| cfg.master_seed);
    let mut csv_groups = Vec::with_capacity(runs.len());
    let mut group_summaries = Vec::with_capacity(runs.len());
    let mut violations = 0u32;

    for cfg in &runs {
        let label = settings::policy_label(&cfg.policy);
        eprintln!(
            "[{label}] {} instances x {} redraws, horizons {:?}",
            cfg.n_instances, cfg.n_subinstances, cfg.horizons
        );
        let curve = run_sweep_with(cfg, |horizon, point| {
            eprintln!(
                "[{label}] T={horizon}: mean regret {:.4} (se {:.4})",
                point.mean_regret, point.std_error
            );
        })?;

        let bounds = match &cfg.policy {
            PolicySpec::BlMoss { .. } => Some(
                cfg.horizons
                    .iter()
                    .map(|&t| audit_blmoss_point(cfg.tail, t, &cfg.policy))
                    .collect::<Result<Vec<_>>>()?,
            ),
            _ => None,
        };
        if enforce_bounds {
            let audits = bounds.as_ref().expect("bound-check runs blmoss only");
            for (point, audit) in curve.points.iter().zip(audits) {
                let measured = point.mean_regret + 3.0 * point.std_error;
                if measured > audit.bound {
                    eprintln!(
                        "[{label}] T={}: BOUND VIOLATION {measured:.4} > {:.4}",
                        point.horizon, audit.bound
                    );
                    violations += 1;
                } else {
                    eprintln!(
                        "[{label}] T={}: bound ok ({measured:.4} <= {:.4})",
                        point.horizon, audit.bound
                    );
                }
            }
        }

        let (fit, fit_error) = match fit_report(&curve, None) {
            Ok(report) => (Some(report), None),
            Err(err) => (None, Some(err.to_string())),
        };
        csv_groups.push(CsvGroup {
            policy: label,
            tail: cfg.tail.label(),
            param: cfg.tail.parameter(),
            c: settings::policy_tradeoff(&cfg.policy),
            n_subinstances: cfg.n_subinstances,
            seed: cfg.master_seed,
            points: curve.points.clone(),
        });
        group_summaries.push(GroupSummary {
            policy: label,
            tail: cfg.tail.label(),
            param: cfg.tail.parameter(),
            c: settings::policy_tradeoff(&cfg.policy),
            alpha_override: settings::policy_alpha_override(&cfg.policy),
            points: curve.points,
            fit,
            fit_error,
            bounds,
        });
    }

    let csv = output::render_csv(&manifest, &csv_groups);
    let summary = RunSummary {
        version: output::VERSION,
        command,
        manifest,
        timestamp_unix: output::unix_timestamp(),
        seed,
        config: echo,
        groups: group_summaries,
        csv_sha256: output::sha256_hex(csv.as_bytes()),
    };
    output::write_run_outputs(out, command, &csv, &summary)?;

    if violations > 0 {
        eprintln!("{violations} bound violation(s)");
        return Ok(1);
    }
    Ok(0)
}

#[derive(Serialize)]
struct FitGroupReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<String>,
    fit: FitReport,
}

#[derive(Serialize)]
struct FitSummary {
    version: &'static str,
    command: &'static str,
    manifest: String,
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    theoretical_gamma: Option<f64>,
    reports: Vec<FitGroupReport>,
}

pub fn fit(args: FitArgs) -> Result<u8> {
    let mut kv = KeyValues::load(args.config.as_deref(), settings::FIT_KEYS)?;
    kv.override_with("input", args.input.as_ref().map(|p| p.display()));
    kv.override_with("beta", args.beta);
    let plan = settings::fit_plan(&kv)?;
    let theory = plan.beta.map(theoretical_exponent_subpareto).transpose()?;

    let text = fs::read_to_string(&plan.input)?;
    let groups = parse_curve_csv(&text)?;
    if groups.is_empty() {
        return Err(Error::Data("no data rows in the curve file".to_string()));
    }
    let mut reports = Vec::with_capacity(groups.len());
    for group in groups {
        let report = fit_report(&group.curve, theory)?;
        if report.gamma_delta > 0.01 {
            let subject = group
                .policy
                .as_deref()
                .map(|p| format!(" for policy {p}"))
                .unwrap_or_default();
            eprintln!(
                "warning: fit methods disagree by {:.4}{subject} (grid {:.2}, log-log {:.4})",
                report.gamma_delta, report.gamma_grid, report.gamma_loglog
            );
        }
        reports.push(FitGroupReport {
            policy: group.policy,
            tail: group.tail,
            param: group.param,
            fit: report,
        });
    }
    let summary = FitSummary {
        version: output::VERSION,
        command: "fit",
        manifest: output::manifest_hash("fit", &plan.echo),
        input: plan.input.display().to_string(),
        theoretical_gamma: theory,
        reports,
    };
    output::write_json_report(args.out.as_deref(), &summary)?;
    Ok(0)
}

#[derive(Serialize)]
struct EstimateSummary {
    version: &'static str,
    command: &'static str,
    manifest: String,
    input: String,
    horizon: u64,
    mu: f64,
    delta: f64,
    fit: EventTimeFit,
    required_samples: u64,
    sufficient: bool,
}

pub fn estimate(args: EstimateArgs) -> Result<u8> {
    let mut kv = KeyValues::load(args.config.as_deref(), settings::ESTIMATE_KEYS)?;
    kv.override_with("input", args.input.as_ref().map(|p| p.display()));
    kv.override_with("horizon", args.horizon);
    kv.override_with("mu", args.mu);
    kv.override_with("delta", args.delta);
    let plan = settings::estimate_plan(&kv)?;

    let fit = fit_event_time_file(&plan.input)?;
    let required = required_samples(plan.horizon, plan.mu, plan.delta)?;
    let sufficient = fit.n_samples >= required;
    if !sufficient {
        eprintln!(
            "warning: {} samples fall short of the {required} required for horizon {} at mu={} delta={}",
            fit.n_samples, plan.horizon, plan.mu, plan.delta
        );
    }
    let summary = EstimateSummary {
        version: output::VERSION,
        command: "estimate",
        manifest: output::manifest_hash("estimate", &plan.echo),
        input: plan.input.display().to_string(),
        horizon: plan.horizon,
        mu: plan.mu,
        delta: plan.delta,
        fit,
        required_samples: required,
        sufficient,
    };
    output::write_json_report(args.out.as_deref(), &summary)?;
    Ok(0)
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    let Some(threads) = threads else { return Ok(()) };
    if threads == 0 {
        return Err(Error::config("threads must be positive".to_string()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::config(format!("thread pool: {e}")))
}

#[derive(Debug)]
struct ParsedGroup {
    policy: Option<String>,
    tail: Option<String>,
    param: Option<String>,
    c: Option<String>,
    curve: RegretCurve,
}

struct CurveHeader {
    n_fields: usize,
    t_col: usize,
    mean_col: usize,
    se_col: Option<usize>,
    n_col: Option<usize>,
    policy_col: Option<usize>,
    tail_col: Option<usize>,
    param_col: Option<usize>,
    c_col: Option<usize>,
}

/// Reads a regret CSV back. Comment lines (`#`) and blanks are skipped; the
/// first remaining line must be a header naming at least `T` and
/// `mean_regret`. Rows are grouped by the policy/tail/param/c columns when
/// present, in first-seen order, so multi-group files fit per group.
fn parse_curve_csv(text: &str) -> Result<Vec<ParsedGroup>> {
    let mut header: Option<CurveHeader> = None;
    let mut groups: Vec<ParsedGroup> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let Some(head) = &header else {
            let position = |name: &str| fields.iter().position(|f| *f == name);
            let (Some(t_col), Some(mean_col)) = (position("T"), position("mean_regret")) else {
                return Err(Error::Parse {
                    line: line_no,
                    message: "header must name `T` and `mean_regret` columns".to_string(),
                });
            };
            header = Some(CurveHeader {
                n_fields: fields.len(),
                t_col,
                mean_col,
                se_col: position("std_err"),
                n_col: position("n_instances"),
                policy_col: position("policy"),
                tail_col: position("tail"),
                param_col: position("param"),
                c_col: position("c"),
            });
            continue;
        };
        if fields.len() != head.n_fields {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, got {}", head.n_fields, fields.len()),
            });
        }
        let point = RegretPoint {
            horizon: parse_field(fields[head.t_col], line_no, "T")?,
            mean_regret: parse_field(fields[head.mean_col], line_no, "mean_regret")?,
            std_error: match head.se_col {
                Some(col) => parse_field(fields[col], line_no, "std_err")?,
                None => 0.0,
            },
            n_instances: match head.n_col {
                Some(col) => parse_field(fields[col], line_no, "n_instances")?,
                None => 0,
            },
        };
        let text_at = |col: Option<usize>| -> Option<String> {
            col.map(|c| fields[c].to_string()).filter(|s| !s.is_empty())
        };
        let key = (
            text_at(head.policy_col),
            text_at(head.tail_col),
            text_at(head.param_col),
            text_at(head.c_col),
        );
        match groups.iter_mut().find(|g| {
            (g.policy.clone(), g.tail.clone(), g.param.clone(), g.c.clone()) == key
        }) {
            Some(group) => group.curve.points.push(point),
            None => groups.push(ParsedGroup {
                policy: key.0,
                tail: key.1,
                param: key.2,
                c: key.3,
                curve: RegretCurve { points: vec![point] },
            }),
        }
    }
    Ok(groups)
}

fn parse_field<T: std::str::FromStr>(raw: &str, line: usize, column: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| Error::Parse {
        line,
        message: format!("column `{column}`: {e} (got `{raw}`)"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_csv_round_trips_groups() {
        let text = "# manifest abc\n\
                    policy,tail,param,c,T,n_instances,n_sub,mean_regret,std_err,seed\n\
                    ucb1,uniform,,,100,3,5,7.5,0.2,7\n\
                    ucb1,uniform,,,200,3,5,15.5,0.3,7\n\
                    blmoss,uniform,,0.5,100,3,5,2.5,0.1,7\n";
        let groups = parse_curve_csv(text).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].policy.as_deref(), Some("ucb1"));
        assert_eq!(groups[0].curve.points.len(), 2);
        assert_eq!(groups[0].curve.points[1].horizon, 200);
        assert_eq!(groups[0].curve.points[1].mean_regret, 15.5);
        assert_eq!(groups[1].policy.as_deref(), Some("blmoss"));
        assert_eq!(groups[1].c.as_deref(), Some("0.5"));
    }

    #[test]
    fn bare_two_column_files_parse() {
        let groups = parse_curve_csv("T,mean_regret\n10,3\n100,9.5\n").unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].policy, None);
        assert_eq!(groups[0].curve.points[0].std_error, 0.0);
    }

    #[test]
    fn curve_csv_errors_carry_line_numbers() {
        let err = parse_curve_csv("time,regret\n1,2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");

        let err = parse_curve_csv("T,mean_regret\n10,oops\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");

        let err = parse_curve_csv("T,mean_regret\n10\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
