//! Library side of the `qk` command: model files, reports and the
//! subcommand implementations.

pub mod error;
pub mod model;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use quasikernel::oracle;
use quasikernel::random;
use quasikernel::refine::RefinementResult;
use quasikernel::towers::{compatible_chain, conditional_kernel, tail_pipeline};
use quasikernel::{
    classify, delta_class, e_pi, enum_vertices, je_hrep, jstar_hrep, n_pi, normal_refinement,
    normality_report, proper_refinement, proper_refinement_on_full, sigma_pi, ChainSpec, Kernel,
    Subset,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub use error::CliError;
use model::{read_measure, read_model, Model};
use report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "qk",
    version,
    about = "Exact analysis of quasi-probability kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RefineMode {
    Proper,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "JE")]
    Je,
    #[value(name = "Jstar")]
    Jstar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Vertices,
    Hrep,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the kernel and report S_π, N_π, E_π and the normality statements.
    Analyze { model: PathBuf },
    /// Restrict the kernel to a proper or normal refinement.
    Refine {
        model: PathBuf,
        #[arg(long, value_enum)]
        mode: RefineMode,
        /// Comma-separated points of a π-full set to start from (proper mode).
        #[arg(long)]
        full: Option<String>,
    },
    /// Emit J_E(π) or J_*(π) as vertices or constraints, or test membership.
    Polytope {
        model: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, value_enum, default_value = "vertices")]
        emit: Emit,
        /// Measure file to test for membership instead.
        #[arg(long)]
        member: Option<PathBuf>,
    },
    /// Compatible proper family and tail-field refinement of a chain.
    Tower {
        model: PathBuf,
        /// Stabilization window for the limit kernel.
        #[arg(long, default_value_t = 2)]
        window: usize,
        /// Do not repeat the last level to make the chain eventually constant.
        #[arg(long)]
        no_pad: bool,
    },
    /// Re-derive every fast-path result by exhaustive enumeration and diff.
    Oracle {
        #[arg(required_unless_present = "random")]
        model: Option<PathBuf>,
        /// Lift the dimension guard (enumeration cost grows like 4^n).
        #[arg(long)]
        force: bool,
        /// Check this many random models instead of a file.
        #[arg(long, conflicts_with = "model")]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
}

/// Runs one command. Oracle runs with discrepancies still return their
/// report; the caller decides the exit status via [`report_status`].
pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Analyze { model } => analyze(&read_model(model)?),
        Command::Refine { model, mode, full } => {
            refine(&read_model(model)?, *mode, full.as_deref())
        }
        Command::Polytope {
            model,
            which,
            emit,
            member,
        } => polytope(&read_model(model)?, *which, *emit, member.as_ref()),
        Command::Tower {
            model,
            window,
            no_pad,
        } => tower(&read_model(model)?, *window, !*no_pad),
        Command::Oracle {
            model,
            force,
            random,
            seed,
            max_n,
        } => match (model, random) {
            (Some(path), _) => oracle_model(&read_model(path)?, *force),
            (None, Some(count)) => oracle_random(*count, *seed, *max_n, *force),
            (None, None) => Err(CliError::Usage("oracle needs a model or --random".into())),
        },
    }
}

/// Exit status implied by a successful report (nonzero only for oracle
/// discrepancies).
pub fn report_status(report: &Report) -> Result<(), CliError> {
    match report
        .result
        .get("discrepancy_count")
        .and_then(Value::as_u64)
    {
        Some(k) if k > 0 => Err(CliError::Discrepancy(k as usize)),
        _ => Ok(()),
    }
}

fn echo(name: &str, model: &Model, options: Value) -> Value {
    json!({
        "subcommand": name,
        "model": model.label(),
        "options": options,
    })
}

fn analyze(model: &Model) -> Result<Report, CliError> {
    let (k, e) = model.kernel_and_partition()?;
    let c = classify(k, e)?;
    let npi = n_pi(k);
    let delta_classes: Vec<Value> = npi
        .blocks()
        .iter()
        .filter(|b| k.support().contains(b[0]))
        .map(|b| json!(delta_class(k, b[0]).indices()))
        .collect();
    Ok(Report {
        command: echo("analyze", model, json!({})),
        result: json!({
            "n": k.size(),
            "partition": report::blocks(e),
            "classification": report::classification(&c, e),
            "delta_classes": delta_classes,
            "sigma_pi": report::blocks(&sigma_pi(k)),
            "n_pi": report::blocks(&npi),
            "e_pi": report::blocks(&e_pi(k, e)?),
            "normality": report::normality(&normality_report(k, e)?),
        }),
    })
}

pub fn parse_points(text: &str, n: usize) -> Result<Subset, CliError> {
    let points = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{s:?} is not a point index")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Subset::from_indices(n, &points)?)
}

fn refinement(r: &RefinementResult) -> Value {
    json!({
        "restriction_set": report::subset(&r.restriction_set),
        "kernel": report::kernel(&r.kernel),
        "certificate": report::certificate(&r.certificate),
    })
}

fn refine(model: &Model, mode: RefineMode, full: Option<&str>) -> Result<Report, CliError> {
    let (k, e) = model.kernel_and_partition()?;
    let (name, result) = match (mode, full) {
        (RefineMode::Proper, None) => ("proper", proper_refinement(k, e)?),
        (RefineMode::Proper, Some(text)) => {
            let set = parse_points(text, k.size())?;
            ("proper", proper_refinement_on_full(k, e, &set)?)
        }
        (RefineMode::Normal, None) => ("normal", normal_refinement(k, e)?),
        (RefineMode::Normal, Some(_)) => {
            return Err(CliError::Usage(
                "--full applies to --mode proper only".into(),
            ))
        }
    };
    let options = match full {
        Some(text) => json!({"mode": name, "full": report::subset(&parse_points(text, k.size())?)}),
        None => json!({"mode": name}),
    };
    Ok(Report {
        command: echo("refine", model, options),
        result: refinement(&result),
    })
}

fn polytope(
    model: &Model,
    which: Which,
    emit: Emit,
    member: Option<&PathBuf>,
) -> Result<Report, CliError> {
    let (k, e) = model.kernel_and_partition()?;
    let (label, poly) = match which {
        Which::Je => ("JE", je_hrep(k, e)?),
        Which::Jstar => ("Jstar", jstar_hrep(k)?),
    };
    let emit_name = match emit {
        Emit::Vertices => "vertices",
        Emit::Hrep => "hrep",
    };
    if let Some(path) = member {
        let mu = read_measure(path, k.size())?;
        let verdict = match which {
            Which::Je => match k.je_violation(&mu, e)? {
                None => json!({"member": true}),
                Some(v) => {
                    json!({"member": false, "violated_constraint": report::violation(&v, e)})
                }
            },
            Which::Jstar => {
                let pushed = k.push(&mu)?;
                json!({
                    "member": k.in_jstar(&mu)?,
                    "pushed": report::vector(pushed.masses()),
                })
            }
        };
        return Ok(Report {
            command: echo(
                "polytope",
                model,
                json!({"which": label, "member": path.display().to_string()}),
            ),
            result: json!({
                "measure": report::vector(mu.masses()),
                "membership": verdict,
            }),
        });
    }
    let result = match emit {
        Emit::Vertices => {
            let vs = enum_vertices(&poly)?;
            json!({"vertex_count": vs.len(), "vertices": report::vertices(&vs)})
        }
        Emit::Hrep => report::hrep(&poly),
    };
    Ok(Report {
        command: echo(
            "polytope",
            model,
            json!({"which": label, "emit": emit_name}),
        ),
        result,
    })
}

/// Per-level kernels for the pipeline: the chain's own, or conditional
/// kernels of its reference measure.
fn pipeline_chain(chain: &ChainSpec) -> Result<Option<ChainSpec>, CliError> {
    if chain.kernels().is_some() {
        return Ok(Some(chain.clone()));
    }
    let Some(mu) = chain.reference() else {
        return Ok(None);
    };
    let kernels = chain
        .partitions()
        .iter()
        .map(|e| conditional_kernel(mu, e))
        .collect::<Result<Vec<Kernel>, _>>()?;
    Ok(Some(ChainSpec::new(
        chain.partitions().to_vec(),
        Some(kernels),
        Some(mu.clone()),
    )?))
}

fn tower(model: &Model, window: usize, pad: bool) -> Result<Report, CliError> {
    let chain = model.chain()?;
    let mut result = serde_json::Map::new();
    result.insert("tail_partition".into(), report::blocks(&chain.meet_all()));
    if let Some(mu) = chain.reference() {
        let family = compatible_chain(mu, chain)?;
        result.insert(
            "compatible".into(),
            json!({
                "kernels": family.refined.iter().map(report::kernel).collect::<Vec<_>>(),
                "checks": report::checks(&family.checks),
                "all_hold": family.all_hold(),
            }),
        );
    }
    if let Some(levels) = pipeline_chain(chain)? {
        let input = if pad {
            levels.with_stationary_tail(window.saturating_sub(1))
        } else {
            levels.clone()
        };
        let out = tail_pipeline(&input, window)?;
        let refinement = out.refinement.as_ref().expect("pipeline refines");
        result.insert(
            "pipeline".into(),
            json!({
                "level_kernels": levels.kernels().expect("pipeline chains carry kernels")
                    .iter().map(report::kernel).collect::<Vec<_>>(),
                "refined_levels": out.refined.iter().map(report::kernel).collect::<Vec<_>>(),
                "limit": report::limit(out.limit.as_ref().expect("pipeline takes a limit")),
                "result": report::tower_refinement(refinement),
                "checks": report::checks(&out.checks),
                "all_hold": out.all_hold(),
            }),
        );
    }
    Ok(Report {
        command: echo("tower", model, json!({"window": window, "pad": pad})),
        result: Value::Object(result),
    })
}

fn oracle_model(model: &Model, force: bool) -> Result<Report, CliError> {
    if force && model.n > oracle::ORACLE_LIMIT {
        eprintln!(
            "warning: exhaustive enumeration on n = {} visits about 4^{} subset pairs",
            model.n, model.n
        );
    }
    let mut found = Vec::new();
    if let (Some(k), Some(e)) = (&model.kernel, &model.partition) {
        found.extend(oracle::diff(k, e, force)?);
    }
    if let Some(chain) = &model.chain {
        found.extend(oracle::diff_chain(chain, 2, force)?);
        if chain.kernels().is_none() {
            if let Some(levels) = pipeline_chain(chain)? {
                found.extend(oracle::diff_chain(&levels, 2, force)?);
            }
        }
    }
    Ok(Report {
        command: echo("oracle", model, json!({"force": force})),
        result: json!({
            "discrepancy_count": found.len(),
            "discrepancies": report::discrepancies(&found),
        }),
    })
}

fn oracle_random(count: usize, seed: u64, max_n: usize, force: bool) -> Result<Report, CliError> {
    if max_n == 0 {
        return Err(CliError::Usage("--max-n must be at least 1".into()));
    }
    oracle::check_dimension(max_n, force)?;
    let mut entries = Vec::new();
    let mut total = 0;
    for i in 0..count {
        let model_seed = seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(model_seed);
        let n = rng.gen_range(1..=max_n);
        let e = random::partition(&mut rng, n);
        let k = random::any_kernel(&mut rng, &e);
        let found = oracle::diff(&k, &e, force)?;
        if !found.is_empty() {
            total += found.len();
            entries.push(json!({
                "seed": model_seed,
                "partition": report::blocks(&e),
                "kernel": report::kernel(&k),
                "discrepancies": report::discrepancies(&found),
            }));
        }
    }
    Ok(Report {
        command: json!({
            "subcommand": "oracle",
            "model": Value::Null,
            "options": {"random": count, "seed": seed, "max_n": max_n, "force": force},
        }),
        result: json!({
            "models": count,
            "discrepancy_count": total,
            "failing_models": entries,
        }),
    })
}
