//! `greedylab`: command-line front end of the greedy-algorithm laboratory.
//!
//! Exit status: 0 on success (and when every check passes), 1 when a check
//! fails or a computation gives up, 2 on usage errors.

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use greedylab::basis::{enumerate_greedy_sets, greedy_projection, greedy_trace, sigma, sigma_tilde, BasisModel, SigmaMode};
use greedylab::constants::{democracy_functions, estimate_all, ConstantKind, Estimator, TestFamily};
use greedylab::gallery::{self, EXAMPLE_NAMES};
use greedylab::renorm::{renorm_isometry_check, renorm_samples, RenormKind, RenormedSpace};
use greedylab::spaces::{hardy_check, harmonic_prefixes, parse_weight, prefix_indicators, weight_report};
use greedylab::verify::{all_pass, report_write, run_suite, ReportFormat, Selection};
use greedylab::{Error, SpVec};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "greedylab", version, about = "Numerical laboratory for the thresholding greedy algorithm in quasi-Banach sequence spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Output {
    /// Output format: text, csv or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Clone)]
struct Budget {
    /// Dimension cap of every search.
    #[arg(long, default_value_t = 8)]
    dim: usize,
    /// Seed of every randomized family.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Random sign patterns per set beyond the exhaustive cap.
    #[arg(long = "budget-signs")]
    budget_signs: Option<usize>,
    /// Random vectors added to the search pool.
    #[arg(long = "budget-random")]
    budget_random: Option<usize>,
}

impl Budget {
    fn family(&self) -> TestFamily {
        let mut f = TestFamily::new(self.dim).with_seed(self.seed);
        if let Some(n) = self.budget_signs {
            f = f.with_sign_samples(n);
        }
        if let Some(n) = self.budget_random {
            f = f.with_random_draws(n);
        }
        f
    }
}

#[derive(Subcommand)]
enum Command {
    /// Quasi-norm of a vector.
    Norm {
        #[arg(long)]
        space: String,
        /// Vector literal `<coef>@<index>,…`.
        #[arg(long = "vec")]
        vector: String,
        #[command(flatten)]
        out: Output,
    },
    /// Greedy ordering, the m-th greedy projection and the residual norms.
    Greedy {
        #[arg(long)]
        space: String,
        #[arg(long = "vec")]
        vector: String,
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Best m-term errors σ_m and σ̃_m.
    Sigma {
        #[arg(long)]
        space: String,
        #[arg(long = "vec")]
        vector: String,
        #[arg(long)]
        m: usize,
        /// Use the seeded heuristic even when exhaustive search is affordable.
        #[arg(long)]
        heuristic: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Lower-bound estimates of every basis constant, with witnesses.
    Constants {
        #[arg(long)]
        space: String,
        /// Restrict to these constants (comma-separated names such as C_qg,Gamma).
        #[arg(long)]
        kinds: Option<String>,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Output,
    },
    /// Democracy functions φ_u, φ_l, φ^ε_u, φ^ε_l.
    Democracy {
        #[arg(long)]
        space: String,
        /// Largest cardinality (defaults to --dim).
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Output,
    },
    /// Weight predicates and discrete Hardy ratios.
    Weights {
        /// Weight such as pot:0.5, const:1 or expl:[1,0.5;tail=0.25].
        #[arg(long)]
        weight: String,
        /// Exponent of the Hardy check.
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        /// Indices tested by the predicates.
        #[arg(long = "N", default_value_t = 4096)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Renormed quasi-norms and their isometry checks.
    Renorm {
        #[arg(long)]
        space: String,
        /// chain0, trunc1 or almost_a.
        #[arg(long)]
        kind: String,
        /// Evaluate this vector instead of running the isometry check.
        #[arg(long = "vec")]
        vector: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Output,
    },
    /// Reports of the classical examples.
    Examples {
        /// One of: vp-alternating, lplq, hilbert, kt-not-qg, kt-qg-bound, garling-escape, t-eta.
        #[arg(long)]
        name: String,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Exponent r of the constant C[s,r] (kt-qg-bound).
        #[arg(long)]
        r: Option<f64>,
        /// First tuple length tried at every stage (garling-escape).
        #[arg(long = "k-start")]
        k_start: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Output,
    },
    /// The inequality suite over one or more spaces.
    Verify {
        /// Space to check (repeat the flag for several).
        #[arg(long, required = true)]
        space: Vec<String>,
        /// Comma-separated check ids (default: all).
        #[arg(long)]
        checks: Option<String>,
        /// Sample vectors per per-vector check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        budget: Budget,
        #[command(flatten)]
        out: Output,
    },
}

/// An error attributable to a flag value.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(flag: &str, e: impl std::fmt::Display) -> anyhow::Error {
    Usage(format!("invalid value for --{flag}: {e}")).into()
}

fn flag<T>(name: &str, r: greedylab::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| usage(name, e))
}

fn model(space: &str) -> anyhow::Result<BasisModel<f64>> {
    flag("space", BasisModel::parse(space))
}

fn vector(text: &str) -> anyhow::Result<SpVec<f64>> {
    flag("vec", SpVec::parse_literal(text))
}

fn format(out: &Output) -> anyhow::Result<ReportFormat> {
    flag("format", out.format.parse())
}

fn sink(out: &Output) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {path}"))?),
        None => Box::new(io::stdout().lock()),
    })
}

/// Flattens nested JSON into `(dotted key, scalar)` pairs.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Emits a structured report: JSON verbatim, CSV as `key,value` rows, text as `key: value` lines.
fn emit(out: &Output, report: &Value) -> anyhow::Result<()> {
    let fmt = format(out)?;
    let mut w = sink(out)?;
    match fmt {
        ReportFormat::Json => writeln!(w, "{}", serde_json::to_string_pretty(report)?)?,
        ReportFormat::Csv | ReportFormat::Text => {
            let mut pairs = Vec::new();
            flatten("", report, &mut pairs);
            if fmt == ReportFormat::Csv {
                writeln!(w, "key,value")?;
                for (k, v) in pairs {
                    let quote = |s: &str| {
                        if s.contains([',', '"', '\n']) {
                            format!("\"{}\"", s.replace('"', "\"\""))
                        } else {
                            s.to_string()
                        }
                    };
                    writeln!(w, "{},{}", quote(&k), quote(&v))?;
                }
            } else {
                for (k, v) in pairs {
                    writeln!(w, "{k}: {v}")?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn to_value<T: serde::Serialize>(v: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs one command and returns whether every check it ran passed.
fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Norm { space, vector: v, out } => {
            let model = model(&space)?;
            let f = vector(&v)?;
            if let Some(s) = model.space() {
                flag("vec", s.check_support(&f))?;
            }
            let norm = model.norm(&f);
            if format(&out)? == ReportFormat::Text {
                let mut w = sink(&out)?;
                writeln!(w, "{norm}")?;
                return Ok(true);
            }
            emit(&out, &json!({ "space": model.label(), "vector": f.to_literal(), "norm": norm }))?;
        }
        Command::Greedy { space, vector: v, m, out } => {
            let model = model(&space)?;
            let f = vector(&v)?;
            let trace = greedy_trace(&model, &f);
            let mut report = json!({
                "space": model.label(),
                "vector": f.to_literal(),
                "ordering": trace.ordering,
                "residual_norms": trace.residual_norms,
            });
            if let Some(m) = m {
                let proj = greedy_projection(&f, m);
                let sets: Vec<Vec<usize>> = match enumerate_greedy_sets(&f, m) {
                    Ok(s) => s.into_iter().map(|s| s.into_iter().collect()).collect(),
                    Err(_) => Vec::new(),
                };
                let r = report.as_object_mut().expect("object");
                r.insert("m".into(), json!(m));
                r.insert("greedy_set".into(), json!(trace.greedy_set(m)));
                r.insert("all_greedy_sets".into(), json!(sets));
                r.insert("projection".into(), json!(proj.to_literal()));
                r.insert("projection_norm".into(), json!(model.norm(&proj)));
                r.insert("residual_norm".into(), json!(model.norm(&f.sub(&proj))));
            }
            emit(&out, &report)?;
        }
        Command::Sigma { space, vector: v, m, heuristic, seed, out } => {
            let model = model(&space)?;
            let f = vector(&v)?;
            let run = |exact: bool| -> greedylab::Result<Value> {
                let mode = if exact { SigmaMode::Exact } else { SigmaMode::Heuristic { seed } };
                let s = sigma(&model, &f, m, mode)?;
                let t = sigma_tilde(&model, &f, m, mode)?;
                Ok(json!({
                    "space": model.label(),
                    "vector": f.to_literal(),
                    "m": m,
                    "sigma": s.value,
                    "sigma_set": s.set,
                    "sigma_approximant": s.approximant.to_literal(),
                    "sigma_exact": s.exact,
                    "sigma_tilde": t.value,
                    "sigma_tilde_set": t.set,
                    "sigma_tilde_exact": t.exact,
                }))
            };
            let report = if heuristic {
                run(false)?
            } else {
                match run(true) {
                    Err(Error::Budget(_)) => run(false)?,
                    r => r?,
                }
            };
            emit(&out, &report)?;
        }
        Command::Constants { space, kinds, budget, out } => {
            let model = model(&space)?;
            let family = budget.family();
            flag("dim", model.check_dim(family.dim))?;
            let entry = |kind: ConstantKind, r: std::result::Result<greedylab::constants::ConstantEstimate, String>| match r {
                Ok(e) => json!({
                    "kind": kind.name(),
                    "value": e.value,
                    "witness_lhs": e.witness.lhs.to_literal(),
                    "witness_rhs": e.witness.rhs.as_ref().map(SpVec::to_literal),
                    "witness_factor": e.witness.factor,
                    "recheck": e.recheck(&model),
                }),
                Err(reason) => json!({ "kind": kind.name(), "unsupported": reason }),
            };
            let rows: Vec<Value> = match kinds {
                None => estimate_all(&model, &family)?.into_iter().map(|(k, r)| entry(k, r)).collect(),
                Some(list) => {
                    let est = Estimator::new(&model, family.clone())?;
                    let mut rows = Vec::new();
                    for name in list.split(',') {
                        let kind: ConstantKind = flag("kinds", name.parse())?;
                        rows.push(match est.estimate(kind) {
                            Ok(e) => entry(kind, Ok(e)),
                            Err(Error::Unsupported(m)) => entry(kind, Err(m)),
                            Err(e) => return Err(e.into()),
                        });
                    }
                    rows
                }
            };
            emit(&out, &json!({ "space": model.label(), "budget": family.descriptor(), "estimates": rows }))?;
        }
        Command::Democracy { space, m, budget, out } => {
            let model = model(&space)?;
            let family = budget.family();
            let m = m.unwrap_or(family.dim);
            flag("m", model.check_dim(m))?;
            let d = democracy_functions(&model, m, &family)?;
            let mut report = to_value(&d)?;
            report.as_object_mut().expect("object").insert("space".into(), json!(model.label()));
            emit(&out, &report)?;
        }
        Command::Weights { weight, q, n, out } => {
            let w = flag("weight", parse_weight(&weight))?;
            if !(q > 1.0) {
                return Err(usage("q", "the Hardy check needs q > 1"));
            }
            let report = json!({
                "weight": weight,
                "predicates": to_value(&flag("N", weight_report(&w, n))?)?,
                "hardy_harmonic_prefixes": to_value(&hardy_check(&w, q, &harmonic_prefixes(12))?)?,
                "hardy_prefix_indicators": to_value(&hardy_check(&w, q, &prefix_indicators(12))?)?,
            });
            emit(&out, &report)?;
        }
        Command::Renorm { space, kind, vector: v, tol, budget, out } => {
            let base = model(&space)?;
            let kind: RenormKind = flag("kind", kind.parse())?;
            let symmetric = base.is_symmetric();
            let label = base.label();
            let r = RenormedSpace::new(base, kind);
            if let Some(v) = v {
                let f = vector(&v)?;
                let value = r.eval(&f)?;
                emit(&out, &json!({ "space": label, "kind": kind.to_string(), "vector": f.to_literal(), "base_norm": r.base.norm(&f), "value": value }))?;
                return Ok(true);
            }
            let n = budget.budget_random.unwrap_or(1000);
            let samples = renorm_samples(n, budget.dim, budget.dim.min(8), budget.seed);
            let report = renorm_isometry_check(&r, &samples, symmetric, tol)?;
            let mut value = to_value(&report)?;
            value.as_object_mut().expect("object").insert("space".into(), json!(label));
            emit(&out, &value)?;
            return Ok(report.violations == 0);
        }
        Command::Examples { name, p, q, n, m, r, k_start, tol, budget, out } => {
            let report = match name.as_str() {
                "vp-alternating" => to_value(&gallery::vp_alternating_report(p.unwrap_or(0.5), m.unwrap_or(1024))?)?,
                "lplq" => to_value(&gallery::lplq_succ_not_lucc_report(p.unwrap_or(0.5), q.unwrap_or(2.0), m.unwrap_or(64))?)?,
                "hilbert" => to_value(&gallery::hilbert_block_report(n.unwrap_or(8), true)?)?,
                "kt-not-qg" => to_value(&gallery::kt_not_qg_witness(q.unwrap_or(2.0), n.unwrap_or(1 << 16))?)?,
                "kt-qg-bound" => {
                    let samples = gallery::kt_qg_samples(budget.budget_random.unwrap_or(1000), budget.dim, budget.seed);
                    let rep = gallery::kt_qg_bound_check(p.unwrap_or(2.0), q.unwrap_or(2.0), &samples, r.or(Some(1.5)), tol)?;
                    let ok = rep.violations == 0;
                    emit(&out, &to_value(&rep)?)?;
                    return Ok(ok);
                }
                "garling-escape" => {
                    to_value(&gallery::garling_l1_escape_from(p.unwrap_or(0.2), n.unwrap_or(6), k_start.unwrap_or(16))?)?
                }
                "t-eta" => {
                    let len = n.unwrap_or(20);
                    let eta = gallery::dyadic_schedule(len);
                    let samples = gallery::t_eta_samples(budget.budget_random.unwrap_or(1000), len.min(m.unwrap_or(10)), budget.seed);
                    to_value(&gallery::t_eta_check(q.unwrap_or(2.0), &eta, &samples)?)?
                }
                other => return Err(usage("name", format!("unknown example `{other}`; known: {}", EXAMPLE_NAMES.join(", ")))),
            };
            emit(&out, &report)?;
        }
        Command::Verify { space, checks, samples, tol, budget, out } => {
            let models = space.iter().map(|s| model(s)).collect::<anyhow::Result<Vec<_>>>()?;
            let selection = match checks {
                Some(list) => flag("checks", Selection::only(&list.split(',').collect::<Vec<_>>()))?,
                None => Selection::default(),
            }
            .with_samples(samples)
            .with_tol(tol);
            let fmt = format(&out)?;
            let results = run_suite(&models, &budget.family(), &selection);
            report_write(&results, fmt, sink(&out)?)?;
            return Ok(all_pass(&results));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let is_usage = e.downcast_ref::<Usage>().is_some()
                || matches!(e.downcast_ref::<Error>(), Some(Error::Parse { .. } | Error::InvalidParameter(_)));
            ExitCode::from(if is_usage { 2 } else { 1 })
        }
    }
}
