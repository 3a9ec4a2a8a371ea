//! Commands behind the `treeshift` binary. Each returns a report and a
//! plain-text table; `main` decides what to print and which exit code to use.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;
use treeshift::analysis::{
    branch_certificate, is_level_transitive, law_check, odometer_witness, AnalysisError, ChainCache, Law,
    LevelQuotient, ODOMETER_MAX_N,
};
use treeshift::automata::{config_membership_depth, AutomatonJson, UnrestrictedRabinAutomaton};
use treeshift::presets::{self, GroupFile, GroupSpec, PresetError};
use treeshift::report::Report;
use treeshift::shifts::closure_vs_sft;
use treeshift::{Execution, Signature};

pub const DEFAULT_CAP: usize = 1_000_000;
pub const CAP_ENV: &str = "TREESHIFT_CAP";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Cap { .. } | AnalysisError::Incomplete { .. } => CliError::Cap(e.to_string()),
            AnalysisError::Inconsistency(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PresetError> for CliError {
    fn from(e: PresetError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// A finished command: the JSON report and a table for people.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub table: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            1
        }
    }
}

/// The enumeration cap from `TREESHIFT_CAP`, or the default.
pub fn cap_from_env() -> Result<usize, CliError> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| CliError::Input(format!("{CAP_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

/// `preset:NAME` or the path of a group file.
pub fn load_group(arg: &str) -> Result<GroupSpec, CliError> {
    if let Some(name) = arg.strip_prefix("preset:") {
        return Ok(presets::group_by_name(name)?);
    }
    let file: GroupFile = read_json(arg)?;
    let name = Path::new(arg)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| arg.to_string());
    Ok(file.into_spec(&name)?)
}

/// `preset:example1`, `preset:identity`, `preset:full` or an automaton file
/// read over the given signature.
pub fn load_automaton(arg: &str, sig: Arc<Signature>) -> Result<UnrestrictedRabinAutomaton, CliError> {
    let input = |e: treeshift::automata::AutomatonError| CliError::Input(e.to_string());
    match arg.strip_prefix("preset:") {
        Some("example1") => {
            let e = sig.identity();
            Ok(treeshift::automata::example1_automaton(sig, &[e]).map_err(input)?.automaton)
        }
        Some("identity") => Ok(UnrestrictedRabinAutomaton::identity_acceptor(sig)),
        Some("full") => Ok(UnrestrictedRabinAutomaton::full_shift(sig)),
        Some(other) => Err(CliError::Input(format!("unknown automaton preset {other:?}"))),
        None => {
            let json: AutomatonJson = read_json(arg)?;
            Ok(json.into_automaton(sig).map_err(input)?.underlying().clone())
        }
    }
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        Err(CliError::Input(format!("--{name} must be at least 1")))
    } else {
        Ok(v)
    }
}

#[derive(Debug, Serialize)]
struct QuotientRow {
    size: usize,
    order: usize,
    level_transitive: bool,
    /// `|Triv(m) ∩ π|` for `m = 0..size`.
    triv: Vec<usize>,
    /// `|Stab(m) ∩ π|` for `m = 0..=size`.
    stab: Vec<usize>,
}

pub fn cmd_quotient(spec: &GroupSpec, depth: usize, cap: usize, exec: Execution) -> Result<Outcome, CliError> {
    positive("depth", depth)?;
    let gens = spec.elements();
    let mut rows = Vec::new();
    let mut table = String::from("size  order  transitive  triv  stab\n");
    for n in 1..=depth {
        let q = LevelQuotient::enumerate(spec.signature.clone(), &gens, n, cap, exec)?;
        q.require_complete()?;
        let row = QuotientRow {
            size: n,
            order: q.order(),
            level_transitive: is_level_transitive(&q)?,
            triv: (0..=n).map(|m| q.triv_subset(m).len()).collect(),
            stab: (0..=n).map(|m| q.stab_subset(m).len()).collect(),
        };
        let _ = writeln!(
            table,
            "{:>4}  {:>5}  {:>10}  {:?}  {:?}",
            row.size, row.order, row.level_transitive, row.triv, row.stab
        );
        rows.push(row);
    }
    let report = Report::new(format!("level quotients of {} up to size {depth}", spec.name), true, depth, cap)
        .with_details(&rows);
    Ok(Outcome { report, table })
}

pub fn cmd_branch_check(
    spec: &GroupSpec,
    size: usize,
    depth: usize,
    cap: usize,
    exec: Execution,
) -> Result<Outcome, CliError> {
    positive("size", size)?;
    if size + 1 > depth {
        return Err(CliError::Input(format!("--size {size} needs --depth at least {}", size + 1)));
    }
    let cert = branch_certificate(spec.signature.clone(), &spec.elements(), size, depth, cap, exec)?;
    let mut table = format!(
        "branching over Triv({size}) at size {depth}: {}\nchecked {} elements, {} tuples ({})\n",
        if cert.passed() { "pass" } else { "fail" },
        cert.checked,
        cert.tuples_checked,
        if cert.tuples_exhaustive { "exhaustive" } else { "sampled" }
    );
    if let Some(w) = &cert.witness {
        let _ = writeln!(table, "witness g = {}\nδ_{}(g) = {} is not in the group", w.element, w.letter, w.delta);
    }
    let mut report = Report::new(
        format!("{} is symbolically branching over Triv({size})", spec.name),
        cert.passed(),
        depth,
        cap,
    )
    .with_details(&cert);
    if let Some(w) = &cert.witness {
        report = report.with_witness(w);
    }
    Ok(Outcome { report, table })
}

pub fn cmd_sft_roundtrip(
    spec: &GroupSpec,
    size: usize,
    depth: usize,
    cap: usize,
    exec: Execution,
) -> Result<Outcome, CliError> {
    positive("size", size)?;
    if depth + 1 < size {
        return Err(CliError::Input(format!("--depth must be at least {}", size - 1)));
    }
    let mut cache = ChainCache::new(spec.signature.clone(), spec.elements());
    let mut table = String::from("depth  group order  admitted  equal\n");
    let mut reports = Vec::new();
    let mut witness = None;
    for d in size.saturating_sub(1).max(1)..=depth {
        let r = closure_vs_sft(&mut cache, size, d, cap, exec)?;
        let _ = writeln!(table, "{:>5}  {:>11}  {:>8}  {}", d, r.group_order, r.admitted, r.equal);
        if let Some(c) = &r.counterexample {
            let _ = writeln!(table, "counterexample: {}", c.block);
            witness.get_or_insert_with(|| c.clone());
        }
        reports.push(r);
    }
    let equal = reports.iter().all(|r| r.equal);
    let mut report = Report::new(
        format!("the size-{size} blocks of {} define its closure", spec.name),
        equal,
        depth,
        cap,
    )
    .with_details(&reports);
    if let Some(w) = &witness {
        report = report.with_witness(w);
    }
    Ok(Outcome { report, table })
}

#[derive(Debug, Serialize)]
struct MembershipRow {
    generator: String,
    /// Whether the root block of each size `1..=depth` is allowed.
    allowed: Vec<bool>,
}

pub fn cmd_automaton_check(
    aut: &UnrestrictedRabinAutomaton,
    spec: &GroupSpec,
    depth: usize,
) -> Result<Outcome, CliError> {
    positive("depth", depth)?;
    let mut rows = Vec::new();
    let mut table = String::from("element  allowed at sizes 1..\n");
    let mut first_reject = None;
    for (name, g) in &spec.generators {
        let allowed: Vec<bool> = (1..=depth).map(|n| config_membership_depth(aut, g, n)).collect();
        if let Some(n) = allowed.iter().position(|&a| !a) {
            first_reject.get_or_insert((name.clone(), n + 1));
        }
        let marks: String = allowed.iter().map(|&a| if a { '+' } else { '-' }).collect();
        let _ = writeln!(table, "{name:>7}  {marks}");
        rows.push(MembershipRow {
            generator: name.clone(),
            allowed,
        });
    }
    let mut report = Report::new(
        format!("the automaton allows every root block of {}", spec.name),
        first_reject.is_none(),
        depth,
        0,
    )
    .with_details(&rows);
    if let Some((g, n)) = &first_reject {
        report = report.with_witness(&serde_json::json!({ "generator": g, "size": n }));
    }
    Ok(Outcome { report, table })
}

pub fn cmd_odometer_demo(n: usize, cap: usize, exec: Execution) -> Result<Outcome, CliError> {
    if n == 0 || n > ODOMETER_MAX_N {
        return Err(CliError::Input(format!("--n must be between 1 and {ODOMETER_MAX_N}")));
    }
    let r = odometer_witness(n, cap, exec)?;
    let table = format!(
        "g = id(e, a^{}) = {}\n(a) {} distinct size-{} windows, all among the {} allowed blocks: {}\n(b) root block {} outside the {} elements of the size-{} quotient: {}\n",
        1u64 << n,
        r.element,
        r.windows,
        n + 1,
        r.allowed_blocks,
        r.windows_allowed,
        r.separating_block,
        r.quotient_order,
        n + 2,
        r.block_outside_group
    );
    let report = Report::new(
        format!("id(e, a^{}) is locally allowed but not in the odometer closure", 1u64 << n),
        r.passed(),
        n + 1,
        cap,
    )
    .with_witness(&r.separating_block)
    .with_details(&r);
    Ok(Outcome { report, table })
}

pub fn cmd_law_check(
    spec: &GroupSpec,
    law: &str,
    depth: usize,
    cap: usize,
    exec: Execution,
) -> Result<Outcome, CliError> {
    positive("depth", depth)?;
    let law: Law = law.parse()?;
    let gens = spec.elements();
    let mut table = String::from("size  order  checked  sampled  holds\n");
    let mut reports = Vec::new();
    for n in 1..=depth {
        let q = LevelQuotient::enumerate(spec.signature.clone(), &gens, n, cap, exec)?;
        q.require_complete()?;
        let r = law_check(&q, &law, cap, n as u64, exec)?;
        let _ = writeln!(table, "{:>4}  {:>5}  {:>7}  {:>7}  {}", n, q.order(), r.checked, r.sampled, r.holds);
        let stop = !r.holds;
        reports.push(r);
        if stop {
            break;
        }
    }
    let failed = reports.iter().find(|r| !r.holds);
    let mut report = Report::new(
        format!("{} satisfies the law {law}", spec.name),
        failed.is_none(),
        depth,
        cap,
    );
    if let Some(f) = failed {
        let _ = writeln!(table, "fails at size {} with {:?}", f.size, f.witness);
        report = report.with_witness(&f.witness);
    }
    let report = report.with_details(&reports);
    Ok(Outcome { report, table })
}
