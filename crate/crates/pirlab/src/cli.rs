//! Command-line front end: run sessions, audit schemes, evaluate
//! capacities.
//!
//! Three subcommands cover the workflow:
//!
//! * `run` executes one retrieval over the simulated network and prints
//!   the per-server queries, answers, and the decoded message. With
//!   `--identity-permutations` the query row reproduces the published
//!   scheme tables verbatim.
//! * `verify` audits a scheme end to end: exhaustive privacy,
//!   exhaustive decodability over GF(2) and GF(3), and an exact rate
//!   comparison against the closed form.
//! * `capacity` sweeps closed-form bounds (optionally against measured
//!   rates and the full-privacy/local-privacy baselines) to CSV or JSON.
//!
//! Exit status contract: 0 = success, 1 = verification failure,
//! 2 = configuration error.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::algebra::{FieldSpec, PermutationProfile};
use crate::audit::{audit_privacy, check_decodability, measure_rate};
use crate::capacity::{baseline, capacity_bound, sweep, sweep_to_csv, Baseline, SweepRow};
use crate::model::{GraphKind, MessageId, PrivacySetting, StorageGraph};
use crate::netsim::{provision, run_session, run_session_with_profile, UserNode};
use crate::schemes::Transcript;

/// Top-level argument structure.
#[derive(Debug, Parser)]
#[command(
    name = "pirlab",
    about = "Private information retrieval on path and cyclic storage graphs",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one retrieval session and print its transcript.
    Run(RunArgs),
    /// Audit privacy, decodability, and rate for a setting.
    Verify(VerifyArgs),
    /// Evaluate closed-form capacity bounds, optionally against measured
    /// rates and baselines.
    Capacity(CapacityArgs),
}

/// Shared scheme-selection flags.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SchemeArgs {
    /// Storage graph kind: path | cycle.
    #[arg(long)]
    #[serde(default)]
    pub graph: Option<String>,
    /// Number of servers N.
    #[arg(long)]
    pub n: Option<u32>,
    /// Privacy setting name (for example modified-edge, one-sided,
    /// two-sided, two-sided-mod-edge, first-neighbor, ith-neighbor).
    #[arg(long)]
    pub setting: Option<String>,
    /// Neighborhood range h, for the h-parameterized settings.
    #[arg(long)]
    #[serde(default)]
    pub h: Option<u32>,
    /// Neighbor stride i, for ith-neighbor privacy.
    #[arg(long)]
    #[serde(default)]
    pub i: Option<u32>,
    /// Field modulus (a prime; default 2).
    #[arg(long, default_value_t = 2)]
    #[serde(default = "default_q")]
    pub q: u64,
    /// RNG seed; falls back to $PIRLAB_SEED, then 0.
    #[arg(long)]
    #[serde(default)]
    pub seed: Option<u64>,
    /// Read the same fields from a JSON config document; explicit flags
    /// win over the file.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<std::path::PathBuf>,
}

fn default_q() -> u64 {
    2
}

impl Default for SchemeArgs {
    fn default() -> Self {
        SchemeArgs {
            graph: None,
            n: None,
            setting: None,
            h: None,
            i: None,
            q: 2,
            seed: None,
            config: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Index of the message to retrieve.
    #[arg(long)]
    pub theta: Option<u32>,
    /// Use identity permutations instead of seeded ones, reproducing the
    /// published table rows byte for byte.
    #[arg(long)]
    pub identity_permutations: bool,
    /// Output format: table | json | csv.
    #[arg(long, default_value = "table")]
    pub format: String,
    /// Write the output to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Output format: table | json | csv.
    #[arg(long, default_value = "table")]
    pub format: String,
    /// Write the output to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Privacy setting name; graph kind is inferred (use --graph for the
    /// ambiguous one-sided/two-sided names).
    #[arg(long)]
    pub setting: String,
    /// Storage graph kind when the setting name does not pin it down.
    #[arg(long)]
    pub graph: Option<String>,
    /// Server count or inclusive range, e.g. 7 or 4..10.
    #[arg(long, default_value = "5..9")]
    pub n: String,
    /// Parameter value or inclusive range, e.g. 2 or 0..3; default is
    /// every accepted value for each N.
    #[arg(long)]
    pub param: Option<String>,
    /// Fixed h (alias for --param).
    #[arg(long)]
    pub h: Option<u32>,
    /// Fixed i (alias for --param).
    #[arg(long)]
    pub i: Option<u32>,
    /// Append the full-privacy and local-privacy baseline columns.
    #[arg(long)]
    pub compare_baselines: bool,
    /// Output format: table | csv | json.
    #[arg(long, default_value = "table")]
    pub format: String,
    /// Write the output to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
}

/// A validated run/verify configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub graph: StorageGraph,
    pub setting: PrivacySetting,
    pub theta: Option<MessageId>,
    pub field: FieldSpec,
    pub seed: u64,
}

/// Configuration errors carry exit status 2; everything else is 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Run(#[from] crate::Error),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_status(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) | CliError::VerificationFailed(_) => 1,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl SchemeArgs {
    /// Merges `--config` (if any), environment fallbacks, and flags into
    /// a validated configuration. Flag values win over the file.
    pub fn resolve(&self, theta: Option<u32>) -> Result<RunConfig, CliError> {
        let mut merged = self.clone();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
            let file: SchemeArgs = serde_json::from_str(&text)
                .map_err(|e| config_err(format!("bad config document: {e}")))?;
            merged.graph = merged.graph.or(file.graph);
            merged.n = merged.n.or(file.n);
            merged.setting = merged.setting.or(file.setting);
            merged.h = merged.h.or(file.h);
            merged.i = merged.i.or(file.i);
            merged.seed = merged.seed.or(file.seed);
            if self.q == 2 {
                merged.q = file.q;
            }
        }

        let kind = match merged.graph.as_deref() {
            Some("path") => Some(GraphKind::Path),
            Some("cycle") => Some(GraphKind::Cycle),
            Some(other) => return Err(config_err(format!("unknown graph kind `{other}`"))),
            None => None,
        };
        let name = merged
            .setting
            .as_deref()
            .ok_or_else(|| config_err("missing --setting"))?;
        let setting = resolve_setting(name, kind, merged.h, merged.i)?;
        if let Some(kind) = kind {
            if kind != setting.graph_kind() {
                return Err(config_err(format!(
                    "setting `{name}` runs on {} graphs, not {kind}",
                    setting.graph_kind()
                )));
            }
        }
        let n = merged.n.ok_or_else(|| config_err("missing --n"))?;
        let graph = StorageGraph::build(setting.graph_kind(), n)
            .map_err(|e| config_err(e.to_string()))?;
        setting
            .validate(&graph)
            .map_err(|e| config_err(e.to_string()))?;
        let theta = match theta {
            Some(t) => {
                if t < 1 || t > graph.n_messages() {
                    return Err(config_err(format!(
                        "theta = {t} outside 1..={}",
                        graph.n_messages()
                    )));
                }
                Some(MessageId::new(t))
            }
            None => None,
        };
        let field = FieldSpec::new(merged.q).map_err(|e| config_err(e.to_string()))?;
        let seed = merged
            .seed
            .or_else(|| {
                std::env::var("PIRLAB_SEED")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(0);
        Ok(RunConfig {
            graph,
            setting,
            theta,
            field,
            seed,
        })
    }
}

/// Maps a CLI setting name (plus optional graph kind for the ambiguous
/// short names) to a parameterized setting.
pub fn resolve_setting(
    name: &str,
    kind: Option<GraphKind>,
    h: Option<u32>,
    i: Option<u32>,
) -> Result<PrivacySetting, CliError> {
    let need_h = || h.ok_or_else(|| config_err(format!("setting `{name}` needs --h")));
    let setting = match (name, kind) {
        ("modified-edge", _) => PrivacySetting::PathModifiedEdge,
        ("first-neighbor", _) => PrivacySetting::CyclicFirstNeighbor,
        ("ith-neighbor", _) => PrivacySetting::CyclicIthNeighbor {
            i: i.ok_or_else(|| config_err("setting `ith-neighbor` needs --i"))?,
        },
        ("one-sided-path", _) | ("one-sided", Some(GraphKind::Path)) => {
            PrivacySetting::PathOneSidedH { h: need_h()? }
        }
        ("two-sided-path", _) | ("two-sided", Some(GraphKind::Path)) => {
            PrivacySetting::PathTwoSidedH { h: need_h()? }
        }
        ("two-sided-mod-edge", _) => PrivacySetting::PathTwoSidedHModEdge { h: need_h()? },
        ("one-sided-cycle", _) | ("one-sided", Some(GraphKind::Cycle)) => {
            PrivacySetting::CyclicOneSidedH { h: need_h()? }
        }
        ("two-sided-cycle", _) | ("two-sided", Some(GraphKind::Cycle)) => {
            PrivacySetting::CyclicTwoSidedH { h: need_h()? }
        }
        ("one-sided" | "two-sided", None) => {
            return Err(config_err(format!(
                "setting `{name}` is ambiguous without --graph; \
                 use {name}-path or {name}-cycle"
            )))
        }
        _ => return Err(config_err(format!("unknown setting `{name}`"))),
    };
    Ok(setting)
}

/// Executes one session and renders it.
pub fn cmd_run(args: &RunArgs) -> Result<String, CliError> {
    let theta = args
        .theta
        .ok_or_else(|| config_err("run needs --theta"))?;
    let config = args.scheme.resolve(Some(theta))?;
    let theta = config.theta.expect("resolved above");
    let (servers, _) = provision(&config.graph, config.field, config.seed);
    let user = UserNode {
        setting: config.setting,
        graph: config.graph.clone(),
        rng_seed: config.seed,
        field: config.field,
    };
    let transcript = if args.identity_permutations {
        let identity = PermutationProfile::identity(config.graph.n_messages(), 2);
        run_session_with_profile(&user, &servers, theta, &identity)?
    } else {
        run_session(&user, &servers, theta)?
    };
    match args.format.as_str() {
        "table" => Ok(render_transcript(&config, &transcript, args.identity_permutations)),
        "json" => serde_json::to_string_pretty(&transcript)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| config_err(e.to_string())),
        "csv" => Ok(transcript_to_csv(&config, &transcript)),
        other => Err(config_err(format!("unknown format `{other}`"))),
    }
}

/// One row per server; uncontacted servers have empty query and answer
/// fields. The decoded message repeats on every row for easy joins.
fn transcript_to_csv(config: &RunConfig, t: &Transcript) -> String {
    let decoded = t
        .decoded
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";");
    let mut out = String::from("theta,server,query,answer,decoded\n");
    for s in config.graph.servers() {
        let query = t.plan.queries[&s]
            .iter()
            .map(|c| c.render())
            .collect::<Vec<_>>()
            .join(";");
        let answer = t.answers[&s]
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{query},{answer},{decoded}",
            t.plan.theta.index(),
            s.index()
        );
    }
    out
}

/// Letter alias for a message in table output: `a..z` for up to 26
/// messages, `W`-notation beyond that.
fn alias(k: MessageId, k_total: u32) -> String {
    if k_total <= 26 {
        char::from(b'a' + (k.index() - 1) as u8).to_string()
    } else {
        format!("W{}", k.index())
    }
}

/// Renders one query list in the published tables' compact notation
/// (`a2+b1`, `∅` for null).
pub fn render_query_cell(
    queries: &[crate::algebra::LinComb],
    k_total: u32,
) -> String {
    if queries.is_empty() {
        return "∅".to_string();
    }
    queries
        .iter()
        .map(|comb| {
            comb.terms()
                .map(|(sym, coeff)| {
                    let body = format!("{}{}", alias(sym.msg, k_total), sym.sym);
                    if coeff == 1 {
                        body
                    } else {
                        format!("{coeff}*{body}")
                    }
                })
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// The single-retrieval row: query cells for servers 1..N, comma
/// separated.
pub fn render_query_row(plan: &crate::schemes::QueryPlan, graph: &StorageGraph) -> String {
    graph
        .servers()
        .map(|s| render_query_cell(&plan.queries[&s], graph.n_messages()))
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_transcript(config: &RunConfig, t: &Transcript, identity: bool) -> String {
    let g = &config.graph;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} graph, N={}, K={}, setting {}, q={}, seed {}{}",
        g.kind(),
        g.n_servers(),
        g.n_messages(),
        config.setting.name(),
        config.field.q(),
        config.seed,
        if identity { ", identity permutations" } else { "" },
    );
    let _ = writeln!(out, "theta = {}", t.plan.theta.index());
    let _ = writeln!(out, "queries: {}", render_query_row(&t.plan, g));
    let answers = g
        .servers()
        .map(|s| {
            let a = &t.answers[&s];
            if a.is_empty() {
                "∅".to_string()
            } else {
                a.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(";")
            }
        })
        .collect::<Vec<_>>()
        .join(", ");
    let _ = writeln!(out, "answers: {answers}");
    let _ = writeln!(
        out,
        "decoded: W{} = ({})",
        t.plan.theta.index(),
        t.decoded
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    out
}

/// Renders the full scheme table for a setting, rows `θ`, columns
/// `DB n`, identity permutations.
pub fn render_scheme_table(
    setting: &PrivacySetting,
    graph: &StorageGraph,
) -> Result<String, CliError> {
    let identity = PermutationProfile::identity(graph.n_messages(), 2);
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header: Vec<String> = vec![String::new()];
    header.extend(graph.servers().map(|s| format!("DB {}", s.index())));
    rows.push(header);
    for theta in graph.messages() {
        let plan = crate::schemes::plan_for(setting, graph, theta, &identity)?;
        let mut row = vec![format!("θ = {}", theta.index())];
        row.extend(
            graph
                .servers()
                .map(|s| render_query_cell(&plan.queries[&s], graph.n_messages())),
        );
        rows.push(row);
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| {
                let pad = w - cell.chars().count();
                format!("{cell}{}", " ".repeat(pad))
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    Ok(out)
}

/// Verification summary for one scheme.
#[derive(Debug, Serialize)]
pub struct VerifySummary {
    pub setting: String,
    pub graph: String,
    pub n: u32,
    pub privacy_ok: bool,
    pub privacy_comparisons: u64,
    pub decodability_ok: bool,
    pub decodability_checks_gf2: u64,
    pub decodability_checks_gf3: u64,
    pub rate: String,
    pub stated_achievable: String,
    pub rate_matches: bool,
    pub violations: Vec<String>,
}

/// Runs the full audit for a configuration. `Ok` means every check
/// passed; a failed audit is reported as [`CliError::VerificationFailed`]
/// with the rendered summary attached.
pub fn cmd_verify(args: &VerifyArgs) -> Result<String, CliError> {
    let config = args.scheme.resolve(None)?;
    let setting = &config.setting;
    let graph = &config.graph;

    let privacy = audit_privacy(setting, graph)?;
    let gf2 = check_decodability(setting, graph, FieldSpec::GF2)?;
    let gf3 = check_decodability(setting, graph, FieldSpec::new(3).expect("3 is prime"))?;
    let rate = measure_rate(setting, graph)?;
    let bound = capacity_bound(setting, graph.n_servers())?;

    let mut violations: Vec<String> = privacy
        .violations
        .iter()
        .take(5)
        .map(|v| {
            format!(
                "server {} cannot distinguish θ={} from θ={} -- but observed \
                 value [{}] with probability {} vs {}",
                v.server.index(),
                v.theta_pair.0.index(),
                v.theta_pair.1.index(),
                v.witness
                    .iter()
                    .map(|c| c.render())
                    .collect::<Vec<_>>()
                    .join(";"),
                v.probabilities.0,
                v.probabilities.1,
            )
        })
        .collect();
    violations.extend(
        gf2.failures
            .iter()
            .chain(gf3.failures.iter())
            .take(5)
            .map(|f| {
                format!(
                    "θ={} profile #{} cannot decode {:?}",
                    f.theta.index(),
                    f.profile_index,
                    f.unreachable
                )
            }),
    );

    let summary = VerifySummary {
        setting: setting.name().into(),
        graph: graph.kind().to_string(),
        n: graph.n_servers(),
        privacy_ok: privacy.passed(),
        privacy_comparisons: privacy.comparisons,
        decodability_ok: gf2.passed() && gf3.passed(),
        decodability_checks_gf2: gf2.checks,
        decodability_checks_gf3: gf3.checks,
        rate: rate.rate.to_string(),
        stated_achievable: bound.achievable().to_string(),
        rate_matches: rate.rate == bound.achievable(),
        violations,
    };

    let rendered = match args.format.as_str() {
        "json" => {
            let mut s = serde_json::to_string_pretty(&summary)
                .map_err(|e| config_err(e.to_string()))?;
            s.push('\n');
            s
        }
        "table" => render_verify_table(&summary, &bound),
        "csv" => format!(
            "setting,graph,n,privacy_ok,decodability_ok,measured_rate,stated_rate,rate_matches\n\
             {},{},{},{},{},{},{},{}\n",
            summary.setting,
            summary.graph,
            summary.n,
            summary.privacy_ok,
            summary.decodability_ok,
            summary.rate,
            summary.stated_achievable,
            summary.rate_matches,
        ),
        other => return Err(config_err(format!("unknown format `{other}`"))),
    };
    if summary.privacy_ok && summary.decodability_ok && summary.rate_matches {
        Ok(rendered)
    } else {
        Err(CliError::VerificationFailed(rendered))
    }
}

fn render_verify_table(s: &VerifySummary, bound: &crate::capacity::CapacityValue) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "setting {} on {} N={}", s.setting, s.graph, s.n);
    let _ = writeln!(
        out,
        "privacy:      {} ({} distribution comparisons, exact)",
        pass(s.privacy_ok),
        s.privacy_comparisons
    );
    let _ = writeln!(
        out,
        "decodability: {} ({} rank tests over GF(2), {} over GF(3))",
        pass(s.decodability_ok),
        s.decodability_checks_gf2,
        s.decodability_checks_gf3
    );
    let _ = writeln!(
        out,
        "rate:         {} measured {} vs stated {} (capacity {})",
        pass(s.rate_matches),
        s.rate,
        s.stated_achievable,
        bound.render()
    );
    for v in &s.violations {
        let _ = writeln!(out, "  violation: {v}");
    }
    let _ = writeln!(
        out,
        "verdict:      {}",
        pass(s.privacy_ok && s.decodability_ok && s.rate_matches)
    );
    out
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Parses `7` or `4..10` (inclusive on both ends).
fn parse_range(text: &str) -> Result<(u32, u32), CliError> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = lo
            .parse()
            .map_err(|_| config_err(format!("bad range `{text}`")))?;
        let hi = hi
            .parse()
            .map_err(|_| config_err(format!("bad range `{text}`")))?;
        if lo > hi {
            return Err(config_err(format!("empty range `{text}`")));
        }
        Ok((lo, hi))
    } else {
        let v = text
            .parse()
            .map_err(|_| config_err(format!("bad range `{text}`")))?;
        Ok((v, v))
    }
}

/// Every accepted parameter value of a rule at a given N, used when a
/// capacity sweep does not pin the parameter.
fn accepted_params(name: &str, kind: Option<GraphKind>, n: u32) -> Vec<Option<u32>> {
    let n = n as i64;
    let range = |lo: i64, hi: i64| -> Vec<Option<u32>> {
        (lo..=hi).filter(|&v| v >= 0).map(|v| Some(v as u32)).collect()
    };
    match (name, kind) {
        ("modified-edge", _) | ("first-neighbor", _) => vec![None],
        ("ith-neighbor", _) => range(2, n - 3),
        ("one-sided-path", _) | ("one-sided", Some(GraphKind::Path)) => range(1, n - 2),
        ("two-sided-path", _) | ("two-sided", Some(GraphKind::Path)) => range(1, n - 3),
        ("two-sided-mod-edge", _) => range(0, n - 3),
        ("one-sided-cycle", _) | ("one-sided", Some(GraphKind::Cycle)) => range(0, n - 3),
        ("two-sided-cycle", _) | ("two-sided", Some(GraphKind::Cycle)) => range(0, (n - 3) / 2),
        _ => vec![None],
    }
}

/// Evaluates a capacity sweep.
pub fn cmd_capacity(args: &CapacityArgs) -> Result<String, CliError> {
    let kind = match args.graph.as_deref() {
        Some("path") => Some(GraphKind::Path),
        Some("cycle") => Some(GraphKind::Cycle),
        Some(other) => return Err(config_err(format!("unknown graph kind `{other}`"))),
        None => None,
    };
    let (n_lo, n_hi) = parse_range(&args.n)?;
    let fixed_param = match (&args.param, args.h, args.i) {
        (Some(p), _, _) => {
            let (lo, hi) = parse_range(p)?;
            Some((lo, hi))
        }
        (None, Some(h), _) => Some((h, h)),
        (None, None, Some(i)) => Some((i, i)),
        (None, None, None) => None,
    };

    let mut cells: Vec<(PrivacySetting, u32)> = Vec::new();
    for n in n_lo..=n_hi {
        let params: Vec<Option<u32>> = match fixed_param {
            Some((lo, hi)) => (lo..=hi).map(Some).collect(),
            None => accepted_params(&args.setting, kind, n),
        };
        for p in params {
            let setting = resolve_setting(&args.setting, kind, p, p)?;
            cells.push((setting, n));
        }
    }
    let rows = sweep(cells);

    match args.format.as_str() {
        "csv" => {
            if args.compare_baselines {
                Ok(csv_with_baselines(&rows)?)
            } else {
                Ok(sweep_to_csv(&rows))
            }
        }
        "json" => {
            let mut s =
                serde_json::to_string_pretty(&rows).map_err(|e| config_err(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        "table" => Ok(render_capacity_table(&rows, args.compare_baselines)?),
        other => Err(config_err(format!("unknown format `{other}`"))),
    }
}

fn baselines_for(row: &SweepRow) -> Result<(String, String), CliError> {
    let kind = resolve_setting(&row.setting, None, row.param, row.param)?.graph_kind();
    let (pir, lpir) = match kind {
        GraphKind::Path => (Baseline::PirPath, Baseline::LpirPath),
        GraphKind::Cycle => (Baseline::PirCycle, Baseline::LpirCycle),
    };
    let pir = baseline(pir, row.n).map_err(|e| config_err(e.to_string()))?;
    let lpir = baseline(lpir, row.n).map_err(|e| config_err(e.to_string()))?;
    Ok((pir.render(), lpir.render()))
}

fn csv_with_baselines(rows: &[SweepRow]) -> Result<String, CliError> {
    let base = sweep_to_csv(rows);
    let mut lines = base.lines();
    let mut out = String::new();
    let _ = writeln!(out, "{},pir_baseline,lpir_baseline", lines.next().unwrap());
    for (line, row) in lines.zip(rows) {
        let (pir, lpir) = baselines_for(row)?;
        let _ = writeln!(out, "{line},{pir},{lpir}");
    }
    Ok(out)
}

fn render_capacity_table(rows: &[SweepRow], with_baselines: bool) -> Result<String, CliError> {
    let mut out = String::new();
    for row in rows {
        let param = row
            .param
            .map(|p| format!(" param={p}"))
            .unwrap_or_default();
        if let Some(reason) = &row.skipped {
            let _ = writeln!(out, "{} N={}{}: skipped ({reason})", row.setting, row.n, param);
            continue;
        }
        let bound = row.bound.expect("present");
        let measured = row.measured.expect("present");
        let mark = if row.matches == Some(true) { "ok" } else { "MISMATCH" };
        let mut line = format!(
            "{} N={}{}: bound {} measured {measured} [{mark}]",
            row.setting,
            row.n,
            param,
            bound.render()
        );
        if with_baselines {
            let (pir, lpir) = baselines_for(row)?;
            let _ = write!(line, " | PIR {pir} LPIR {lpir}");
        }
        let _ = writeln!(out, "{line}");
    }
    Ok(out)
}
