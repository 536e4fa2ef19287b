mod input;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ewitness::choi_demo::{self, AbParams};
use ewitness::extension::{extend_witness, gamma_of_extension_check};
use ewitness::mdiew::{self, AuditOptions, MdiewScenario, PovmModel};
use ewitness::witness::{certify_witness, nd_spanning, Certification, SpanningReport};
use ewitness::{sampling, seed, Execution, ExtensionSpec, SeeSawOptions};

/// Construct, extend and certify bipartite entanglement witnesses.
#[derive(Debug, Parser, Serialize)]
#[command(name = "ewitness", version)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand; recorded in each output.
#[derive(Debug, Args, Serialize)]
struct RunConfig {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// See-saw restarts.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// See-saw iterations per restart.
    #[arg(long, global = true, default_value_t = 500)]
    max_iters: usize,
    /// Decision tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Monte Carlo trials for audits.
    #[arg(long, global = true, default_value_t = 1000)]
    trials: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Suppress the summary table on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Run restarts and trials on one thread. Output is unchanged.
    #[arg(long, global = true)]
    #[serde(skip)]
    sequential: bool,
}

impl RunConfig {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn seesaw(&self) -> SeeSawOptions {
        SeeSawOptions { restarts: self.restarts, max_iters: self.max_iters, seed: self.seed, exec: self.exec() }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check witness-hood, find a detected state and test the spanning property.
    Certify {
        /// Operator JSON file, or a bundled fixture such as @choi.
        witness: String,
    },
    /// Tensor a witness with positive semidefinite caps and re-certify it.
    Extend {
        /// Operator JSON file, or a bundled fixture such as @choi.
        witness: String,
        /// JSON file {"cap_left": operator, "cap_right": operator}.
        #[arg(required_unless_present = "random_caps", conflicts_with = "random_caps")]
        spec: Option<String>,
        /// Draw seeded random caps of dimensions DL,DR instead of reading a spec.
        #[arg(long, value_parser = parse_pair)]
        random_caps: Option<(usize, usize)>,
        /// Also write the extended witness as operator JSON.
        #[arg(long)]
        witness_out: Option<PathBuf>,
    },
    /// Build the state detected by an extended Choi witness but not by Choi itself.
    ChoiDemo {
        /// JSON file {"a": operator, "b": operator}; defaults to the bundled exhibit.
        #[arg(long)]
        params: Option<String>,
        /// Operator JSON for the B' cap; defaults to the all-ones 2x2 matrix.
        #[arg(long)]
        cap: Option<String>,
    },
    /// Measurement-device-independent witnessing.
    #[command(subcommand)]
    Mdiew(MdiewCommand),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MdiewCommand {
    /// Expand a witness over tomographic input-state bases.
    Decompose {
        /// Operator JSON file, or a bundled fixture such as @choi.
        witness: String,
        /// Also write the ideal scenario JSON.
        #[arg(long)]
        scenario_out: Option<PathBuf>,
    },
    /// Check that separable states never produce a negative MDIEW value.
    Audit {
        /// Operator JSON file, or a bundled fixture such as @choi.
        #[arg(required_unless_present = "scenario")]
        witness: Option<String>,
        /// Scenario JSON; replaces the ideal scenario built from WITNESS.
        #[arg(long, conflicts_with = "witness")]
        scenario: Option<String>,
        #[arg(long, value_enum, default_value_t = Model::Arbitrary)]
        model: Model,
        /// Pure product states per separable ensemble.
        #[arg(long, default_value_t = 3)]
        components: usize,
        /// Embed states into physical dimensions PA,PB with random isometries.
        #[arg(long, value_parser = parse_pair)]
        embed: Option<(usize, usize)>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Model {
    Ideal,
    Misaligned,
    Arbitrary,
}

impl From<Model> for PovmModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Ideal => PovmModel::Ideal,
            Model::Misaligned => PovmModel::Misaligned,
            Model::Arbitrary => PovmModel::Arbitrary,
        }
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected two comma-separated integers")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Result of a subcommand: the JSON payload, summary rows and whether a
/// checked property failed.
struct Outcome {
    result: Value,
    summary: Vec<(String, String)>,
    violation: bool,
}

fn row(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

fn certification_rows(c: &Certification) -> Vec<(String, String)> {
    vec![
        row("is_witness_numeric", c.is_witness_numeric),
        row("min_product_value", sci(c.min_product_value)),
        row("min_eigenvalue", sci(c.min_eigenvalue)),
        row("detection_value", c.detection_value.map_or("-".into(), sci)),
    ]
}

fn certification_json(c: &Certification) -> Value {
    let s = &c.seesaw;
    json!({
        "is_witness_numeric": c.is_witness_numeric,
        "min_product_value": c.min_product_value,
        "min_eigenvalue": c.min_eigenvalue,
        "detection_state": c.detection_state,
        "detection_value": c.detection_value,
        "seesaw": {
            "best_value": s.best_value,
            "best_vector": s.best_vector,
            "best_restart": s.best_restart,
            "restarts": s.restarts,
            "converged": s.converged.iter().filter(|&&b| b).count(),
            "max_final": s.finals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "seed": s.seed,
        },
    })
}

fn verdict(r: &SpanningReport) -> String {
    serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

fn cmd_certify(cfg: &RunConfig, witness: &str) -> Result<Outcome> {
    let w = input::witness(witness)?;
    let opts = cfg.seesaw();
    let cert = certify_witness(&w, &opts, cfg.tol)?;
    let mut summary = vec![row("witness", &w.provenance), row("dims", format!("{:?}", w.op.dims()))];
    summary.extend(certification_rows(&cert));
    let (spanning, nd) = if cert.is_witness_numeric {
        let nd = nd_spanning(&w, &opts, cfg.tol)?;
        summary.push(row(
            "spanning",
            format!("{} (rank {}/{})", verdict(&nd.witness), nd.witness.rank, nd.witness.total_dim),
        ));
        summary.push(row(
            "gamma spanning",
            format!("{} (rank {}/{})", verdict(&nd.gamma), nd.gamma.rank, nd.gamma.total_dim),
        ));
        summary.push(row("nd_spanning", nd.nd_spanning));
        (serde_json::to_value(&nd.witness)?, json!({ "nd_spanning": nd.nd_spanning, "gamma": nd.gamma }))
    } else {
        summary.push(row("spanning", "not applicable"));
        (Value::Null, Value::Null)
    };
    let mut result = certification_json(&cert);
    result["witness"] = json!({ "provenance": w.provenance, "dims": w.op.dims(), "cut": w.op.layout().cut() });
    result["spanning"] = spanning;
    result["nd_spanning"] = nd;
    Ok(Outcome { result, summary, violation: false })
}

fn random_caps(cfg: &RunConfig, (dl, dr): (usize, usize)) -> Result<ExtensionSpec> {
    if dl == 0 || dr == 0 {
        bail!("cap dimensions must be positive");
    }
    let mut rng = seed::rng(seed::derive(cfg.seed, seed::stream::SAMPLING, 0));
    let left = sampling::random_psd(dl, &mut rng)?;
    let right = sampling::random_psd(dr, &mut rng)?;
    Ok(ExtensionSpec::new(left, right)?)
}

fn cmd_extend(
    cfg: &RunConfig,
    witness: &str,
    spec: Option<&str>,
    caps: Option<(usize, usize)>,
    witness_out: Option<&PathBuf>,
) -> Result<Outcome> {
    let w = input::witness(witness)?;
    let spec = match (spec, caps) {
        (Some(path), _) => {
            let text = input::read_source(path)?;
            ExtensionSpec::from_json(&text).with_context(|| format!("'{path}' is not a valid extension spec"))?
        }
        (None, Some(pair)) => random_caps(cfg, pair)?,
        (None, None) => bail!("either SPEC or --random-caps is required"),
    };
    let ext = extend_witness(&w, &spec)?;
    if let Some(path) = witness_out {
        fs::write(path, ext.op.to_json()?).with_context(|| format!("cannot write '{}'", path.display()))?;
    }
    let cert = certify_witness(&ext, &cfg.seesaw(), cfg.tol)?;
    let gamma_ok = gamma_of_extension_check(&w, &spec)?;
    let mut summary = vec![
        row("witness", &ext.provenance),
        row("dims", format!("{:?}", ext.op.dims())),
        row("party dims", format!("{:?}", ext.party_dims())),
    ];
    summary.extend(certification_rows(&cert));
    summary.push(row("gamma structure", if gamma_ok { "ok" } else { "FAILED" }));
    let result = json!({
        "witness": ext,
        "spec": spec,
        "certification": certification_json(&cert),
        "gamma_structure_ok": gamma_ok,
    });
    Ok(Outcome { result, summary, violation: !cert.is_witness_numeric || !gamma_ok })
}

fn cmd_choi_demo(params: Option<&str>, cap: Option<&str>) -> Result<Outcome> {
    let params = match params {
        Some(path) => AbParams::from_json(&input::read_source(path)?)
            .with_context(|| format!("'{path}' is not a valid parameter file"))?,
        None => AbParams::default_exhibit(),
    };
    let cap = match cap {
        Some(path) => input::operator(path)?,
        None => ExtensionSpec::from_json(input::builtin("choi-extension-spec").expect("bundled"))?.cap_right().clone(),
    };
    let ex = choi_demo::exhibit_for(params, cap)?;
    let v = &ex.values;
    let mut summary = vec![
        row("ext_value", sci(v.ext_value)),
        row("ext_closed_form x kappa", sci(v.ext_closed_form * ex.kappa)),
        row("reduced_value", sci(v.reduced_value)),
        row("reduced_closed_form x kappa", sci(v.reduced_closed_form * ex.kappa)),
        row("rho min eigenvalue", sci(ex.rho_min_eigenvalue)),
        row("detected by extension", ex.detected_extended),
        row("undetected when reduced", ex.undetected_reduced),
        row("accepted", ex.accepted),
    ];
    if let Some(reason) = &ex.rejection {
        summary.push(row("rejection", reason));
    }
    Ok(Outcome { violation: !ex.accepted, result: serde_json::to_value(&ex)?, summary })
}

fn cmd_decompose(witness: &str, scenario_out: Option<&PathBuf>) -> Result<Outcome> {
    let w = input::witness(witness)?;
    let (da, db) = w.party_dims();
    let left = mdiew::tomographic_basis(da)?;
    let right = mdiew::tomographic_basis(db)?;
    let dec = mdiew::decompose_witness(&w, &left, &right)?;
    if let Some(path) = scenario_out {
        let scenario = MdiewScenario::new(
            w.clone(),
            left,
            right,
            dec.beta.clone(),
            mdiew::ideal_projector(da)?,
            mdiew::ideal_projector(db)?,
        )?;
        fs::write(path, scenario.to_json()?).with_context(|| format!("cannot write '{}'", path.display()))?;
    }
    let summary = vec![
        row("witness", &w.provenance),
        row("beta shape", format!("{}x{}", dec.beta.nrows(), dec.beta.ncols())),
        row("residual", sci(dec.residual)),
        row("max imaginary part", sci(dec.max_imag)),
    ];
    let mut result = serde_json::to_value(&dec)?;
    result["basis"] = json!("tomographic");
    result["party_dims"] = json!([da, db]);
    Ok(Outcome { result, summary, violation: false })
}

fn cmd_audit(
    cfg: &RunConfig,
    witness: Option<&str>,
    scenario: Option<&str>,
    model: Model,
    components: usize,
    embed: Option<(usize, usize)>,
) -> Result<Outcome> {
    let scenario = match (scenario, witness) {
        (Some(path), _) => MdiewScenario::from_json(&input::read_source(path)?)
            .with_context(|| format!("'{path}' is not a valid scenario"))?,
        (None, Some(w)) => MdiewScenario::ideal(input::witness(w)?)?,
        (None, None) => bail!("either WITNESS or --scenario is required"),
    };
    let opts = AuditOptions {
        trials: cfg.trials,
        seed: cfg.seed,
        components,
        povm_model: model.into(),
        embed,
        exec: cfg.exec(),
    };
    let report = mdiew::separable_nonnegativity_audit(&scenario, &opts)?;
    let summary = vec![
        row("trials", report.options.trials),
        row("model", format!("{model:?}").to_lowercase()),
        row("min direct value", sci(report.min_direct)),
        row("min extended value", sci(report.min_extended)),
        row("max route gap", sci(report.max_route_gap)),
        row("negative trials", report.negative_trials),
        row("disagreeing trials", report.disagreeing_trials),
        row("passed", report.passed),
    ];
    Ok(Outcome { violation: !report.passed, result: serde_json::to_value(&report)?, summary })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Certify { witness } => cmd_certify(cfg, witness),
        Command::Extend { witness, spec, random_caps, witness_out } => {
            cmd_extend(cfg, witness, spec.as_deref(), *random_caps, witness_out.as_ref())
        }
        Command::ChoiDemo { params, cap } => cmd_choi_demo(params.as_deref(), cap.as_deref()),
        Command::Mdiew(MdiewCommand::Decompose { witness, scenario_out }) => {
            cmd_decompose(witness, scenario_out.as_ref())
        }
        Command::Mdiew(MdiewCommand::Audit { witness, scenario, model, components, embed }) => {
            cmd_audit(cfg, witness.as_deref(), scenario.as_deref(), *model, *components, *embed)
        }
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let envelope = json!({
        "command": cli.command,
        "config": cli.config,
        "result": outcome.result,
    });
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    match &cli.config.json_out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write '{}'", path.display()))?,
        None => print!("{text}"),
    }
    if !cli.config.quiet {
        let width = outcome.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &outcome.summary {
            eprintln!("{k:<width$}  {v}");
        }
    }
    Ok(())
}

/// Numerical breakdowns count as violations; everything else is bad input.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ewitness::Error>() {
        Some(ewitness::Error::Numerical(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|o| emit(&cli, &o).map(|()| o.violation)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
