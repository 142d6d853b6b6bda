use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ggmle::colored::{catalog, catalog_entry, catalog_json};
use ggmle::existence::{DecideOptions, Decider, Evidence, Status};
use ggmle::graphs::{family, parse_family, GraphJson, FAMILY_HELP};
use ggmle::mldegree::{build_poly, crosscheck_poly, rational_correlation};
use ggmle::mle::{fit, verify_fiber, MleError};
use ggmle::models::{sample_cov, sample_gaussian, ColoredModel, Model, SampleData};
use ggmle::montecarlo::{classify_table, estimate_with, table1_rows, Exec, TABLE1_EXPECTED};
use ggmle::numkernel::SymMatrix;
use ggmle::rankcriterion::{certify, certify_by_atoms};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_EXISTS: u8 = 3;
const EXIT_UNDECIDED: u8 = 4;

#[derive(Parser)]
#[command(name = "ggmle", version, about = "MLE existence and estimation in Gaussian graphical models")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the version/timestamp block so re-runs are byte-identical.
    #[arg(long, global = true)]
    no_meta: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the MLE exists for a dataset.
    Decide {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = ggmle::existence::EPS_PD)]
        eps_pd: f64,
    },
    /// Fit the MLE and re-check it against the data.
    Mle {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Certify almost-sure existence for n observations by exact Jacobian rank.
    Certify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        /// Random rational points to try.
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Certify each clique-sum atom separately (plain models only).
        #[arg(long)]
        by_atoms: bool,
    },
    /// Monte Carlo estimate of the existence probability.
    Prob {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// True covariance as CSV rows (default: identity).
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[arg(long, default_value_t = ggmle::existence::EPS_PD)]
        eps_pd: f64,
    },
    /// Build the critical-point polynomial of K_{2,m} for random data.
    Mldegree {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        /// Include the exact coefficients.
        #[arg(long)]
        coefficients: bool,
    },
    /// Classify a whole table of models by simulation.
    Classify {
        #[arg(long, value_enum, default_value_t = Table::Table1)]
        table: Table,
        #[arg(long, default_value_t = 5000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// List the colored model catalog.
    Catalog,
    /// List the graph families.
    Families,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Table1,
    Colored,
}

#[derive(Args)]
struct ModelArgs {
    /// Graph family, e.g. cycle:5, K:2,3, grid:3,3, table1:c or
    /// colored:<catalog id>.
    #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
    family: Option<String>,
    /// Graph JSON file; vertex_colors/edge_colors make the model colored.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Args)]
struct DataArgs {
    /// Observations, one per line, comma-separated.
    #[arg(long)]
    data: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl ModelArgs {
    fn load(&self) -> Result<(String, Model)> {
        if let Some(path) = &self.graph {
            let js = GraphJson::parse(&read(path)?)?;
            let model = if js.vertex_colors.is_some() || js.edge_colors.is_some() {
                Model::Colored(ColoredModel::from_json(&js)?)
            } else {
                Model::plain(js.graph()?)
            };
            return Ok((path.display().to_string(), model));
        }
        let spec = self.family.as_deref().expect("clap enforces a graph source");
        let model = match spec.strip_prefix("colored:") {
            Some(id) => Model::Colored(
                catalog_entry(id.trim())
                    .ok_or_else(|| anyhow!("unknown colored model `{id}` (see `ggmle catalog`)"))?
                    .model,
            ),
            None => Model::plain(parse_family(spec)?),
        };
        Ok((spec.to_string(), model))
    }
}

fn load_data(args: &DataArgs, model: &Model) -> Result<SampleData> {
    let data = SampleData::from_csv(&read(&args.data)?)?;
    if data.m() != model.order() {
        bail!("data has {} variables but the model has {}", data.m(), model.order());
    }
    Ok(data)
}

fn load_sigma(path: Option<&Path>, m: usize) -> Result<SymMatrix> {
    let Some(path) = path else {
        return Ok(SymMatrix::identity(m));
    };
    let rows = SampleData::from_csv(&read(path)?)?;
    let rows: Vec<Vec<f64>> = (0..rows.n()).map(|k| rows.observation(k).to_vec()).collect();
    let sigma = SymMatrix::from_rows(&rows)?;
    if sigma.order() != m {
        bail!("sigma is {}x{} but the model has {m} variables", sigma.order(), sigma.order());
    }
    Ok(sigma)
}

struct Report {
    result: Value,
    code: u8,
}

fn report(result: impl Serialize, code: u8) -> Result<Report> {
    Ok(Report {
        result: serde_json::to_value(result)?,
        code,
    })
}

fn cmd_decide(model: &ModelArgs, data: &DataArgs, eps_pd: f64) -> Result<Report> {
    let (label, model) = model.load()?;
    let data = load_data(data, &model)?;
    let verdict = Decider::with_options(&model, DecideOptions::with_eps(eps_pd))?.decide(Evidence::Data(&data))?;
    let code = match verdict.status {
        Status::Exists => EXIT_OK,
        Status::NotExists => EXIT_NOT_EXISTS,
        Status::Boundary | Status::Undecided => EXIT_UNDECIDED,
    };
    let mut v = serde_json::to_value(&verdict)?;
    v["model"] = json!(label);
    v["n"] = json!(data.n());
    report(v, code)
}

fn cmd_mle(model: &ModelArgs, data: &DataArgs) -> Result<Report> {
    let (label, model) = model.load()?;
    let data = load_data(data, &model)?;
    let s = sample_cov(&data);
    match fit(&model, &s) {
        Ok(r) => {
            let fiber = verify_fiber(&r, &model, &s);
            report(
                json!({
                    "model": label,
                    "n": data.n(),
                    "status": "Converged",
                    "sigma_hat": r.sigma_hat,
                    "k_hat": r.k_hat,
                    "loglik": r.loglik,
                    "iters": r.iters,
                    "residual": r.residual,
                    "fiber": fiber,
                }),
                EXIT_OK,
            )
        }
        Err(MleError::Diverged {
            iters,
            k_max,
            grad,
            objective,
            direction,
        }) => report(
            json!({
                "model": label,
                "n": data.n(),
                "status": "Diverged",
                "diagnostics": {
                    "iters": iters,
                    "k_max": k_max,
                    "grad": grad,
                    "objective": objective,
                    "direction": direction,
                    "pairing": s.dot(&direction),
                },
            }),
            EXIT_NOT_EXISTS,
        ),
        Err(MleError::NoConvergence { iters, grad }) => report(
            json!({
                "model": label,
                "n": data.n(),
                "status": "NoConvergence",
                "diagnostics": { "iters": iters, "grad": grad },
            }),
            EXIT_UNDECIDED,
        ),
        Err(e) => Err(e.into()),
    }
}

fn cmd_certify(model: &ModelArgs, n: usize, trials: usize, seed: u64, by_atoms: bool) -> Result<Report> {
    let (label, model) = model.load()?;
    if by_atoms {
        let Model::Plain(g) = &model else {
            bail!("--by-atoms needs a plain (uncolored) model");
        };
        let r = certify_by_atoms(&g.graph, n, trials, seed)?;
        return report(json!({ "model": label, "n": n, "seed": seed, "verdict": r.verdict, "atoms": r.atoms }), EXIT_OK);
    }
    let r = certify(&model, n, trials, seed)?;
    let mut v = serde_json::to_value(&r)?;
    v["model"] = json!(label);
    report(v, EXIT_OK)
}

fn cmd_prob(model: &ModelArgs, n: usize, trials: usize, seed: u64, sigma: Option<&Path>, eps_pd: f64) -> Result<Report> {
    let (label, model) = model.load()?;
    let sigma = load_sigma(sigma, model.order())?;
    let opts = DecideOptions {
        completions: false,
        ..DecideOptions::with_eps(eps_pd)
    };
    let decider = Decider::with_options(&model, opts)?;
    let est = estimate_with(&decider, &sigma, n, trials, seed, Exec::default())?;
    let mut v = serde_json::to_value(&est)?;
    v["model"] = json!(label);
    report(v, EXIT_OK)
}

fn cmd_mldegree(m: usize, seed: u64, coefficients: bool) -> Result<Report> {
    if m < 2 {
        bail!("--m must be at least 2");
    }
    let model = Model::plain(family("K", &[2, m])?);
    // Enough observations that the MLE exists almost surely.
    let data = sample_gaussian(&SymMatrix::identity(m + 2), m + 2, seed)?;
    let s = sample_cov(&data);
    let p = build_poly(&rational_correlation(&s)?)?;
    let fitted = fit(&model, &s)?;
    let check = crosscheck_poly(&p, &s, &fitted);
    let mut v = json!({
        "m": m,
        "seed": seed,
        "degree": p.degree(),
        "expected_degree": 2 * m + 1,
        "squarefree": p.is_squarefree(),
        "y_hat": check.y_hat,
        "residual": check.residual,
    });
    if coefficients {
        v["coefficients"] = serde_json::to_value(&p)?;
    }
    report(v, EXIT_OK)
}

fn cmd_classify(table: Table, trials: usize, seed: u64) -> Result<Report> {
    let (rows, expected): (Vec<_>, Vec<_>) = match table {
        Table::Table1 => {
            let rows = table1_rows();
            let expected = rows
                .iter()
                .map(|(label, _, n)| {
                    let row = label.trim_start_matches("table1:");
                    let (_, e) = TABLE1_EXPECTED.iter().find(|(r, _)| *r == row).expect("known row");
                    e[n - 1]
                })
                .collect::<Vec<_>>();
            (rows, expected)
        }
        Table::Colored => catalog()
            .into_iter()
            .flat_map(|e| {
                (1..=3).map(move |n| {
                    ((format!("colored:{}", e.id), Model::Colored(e.model.clone()), n), e.expected_at(n))
                })
            })
            .unzip(),
    };
    let cells = classify_table(&rows, trials, seed)?;
    let cells: Vec<Value> = cells
        .into_iter()
        .zip(expected)
        .map(|(c, e)| {
            let mut v = serde_json::to_value(&c.estimate).expect("serializable");
            v["model"] = json!(c.model);
            v["expected"] = json!(e);
            v
        })
        .collect();
    report(json!({ "table": match table { Table::Table1 => "table1", Table::Colored => "colored" }, "trials": trials, "seed": seed, "cells": cells }), EXIT_OK)
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Decide { .. } => "decide",
        Cmd::Mle { .. } => "mle",
        Cmd::Certify { .. } => "certify",
        Cmd::Prob { .. } => "prob",
        Cmd::Mldegree { .. } => "mldegree",
        Cmd::Classify { .. } => "classify",
        Cmd::Catalog => "catalog",
        Cmd::Families => "families",
    }
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.cmd {
        Cmd::Decide { model, data, eps_pd } => cmd_decide(model, data, *eps_pd),
        Cmd::Mle { model, data } => cmd_mle(model, data),
        Cmd::Certify {
            model,
            n,
            trials,
            seed,
            by_atoms,
        } => cmd_certify(model, *n, *trials, *seed, *by_atoms),
        Cmd::Prob {
            model,
            n,
            trials,
            seed,
            sigma,
            eps_pd,
        } => cmd_prob(model, *n, *trials, *seed, sigma.as_deref(), *eps_pd),
        Cmd::Mldegree { m, seed, coefficients } => cmd_mldegree(*m, *seed, *coefficients),
        Cmd::Classify { table, trials, seed } => cmd_classify(*table, *trials, *seed),
        Cmd::Catalog => report(catalog_json(), EXIT_OK),
        Cmd::Families => report(FAMILY_HELP.lines().collect::<Vec<_>>(), EXIT_OK),
    }
}

fn emit(cli: &Cli, r: &Report) -> Result<()> {
    let mut doc = json!({ "command": command_name(&cli.cmd), "result": r.result });
    if !cli.no_meta {
        let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        doc["meta"] = json!({ "version": env!("CARGO_PKG_VERSION"), "timestamp": ts });
    }
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| emit(&cli, &r).map(|_| r.code)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
