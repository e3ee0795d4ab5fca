use std::path::Path;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use gldpc::capacity::{capacity_ratio_sweep, write_reports_csv, ThresholdSource};
use gldpc::de::{de_run, sc_de_run, sc_threshold_in, uncoupled_threshold, CouplingProfile, DeLimits};
use gldpc::highrate::{sc_scaled_de_run, scaled_threshold, ScaledVariant};
use gldpc::miscorrection::{miscorrection_table, MiscorrectionTable};
use gldpc::potential::{
    potential_curve_finite, potential_curve_scaled, potential_threshold_finite, scaled_potential_threshold,
};
use gldpc::sim::{
    empirical_pq, sample_coupled_graph, sample_uncoupled_graph, simulate_hdd_with, SimMetadata, SimOptions, SlotRule,
    Transmission,
};
use gldpc::{build_bch, weight_spectrum, ComponentCode, Error, Result, SpectrumMethod};

use crate::output::Artifacts;
use crate::table1;

pub enum Outcome {
    Done,
    /// Table reproduction finished but some cell is out of tolerance.
    Deviation,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_config() => 2,
        Error::Numerical(_) | Error::Bracket(_) | Error::Domain(_) => 3,
        _ => 1,
    }
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Finite-length DE threshold of a BCH component code.
    Threshold(ThresholdArgs),
    /// Threshold of the high-rate (Poisson) limit.
    ScaledThreshold(ScaledArgs),
    /// Potential threshold, optionally with a potential curve.
    Potential(PotentialArgs),
    /// Full density-evolution trace at one channel parameter.
    DeTrace(TraceArgs),
    /// Recompute the coupled threshold table for t = 3..7.
    Table1(Table1Args),
    /// Capacity ratio and ε-redundancy over a range of field degrees.
    Capacity(CapacityArgs),
    /// Monte Carlo run of the extrinsic message-passing decoder.
    Simulate(SimulateArgs),
    /// Monte Carlo estimates of the miscorrection probabilities.
    EmpiricalPq(PqArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Threshold(_) => "threshold",
            Command::ScaledThreshold(_) => "scaled-threshold",
            Command::Potential(_) => "potential",
            Command::DeTrace(_) => "de-trace",
            Command::Table1(_) => "table1",
            Command::Capacity(_) => "capacity",
            Command::Simulate(_) => "simulate",
            Command::EmpiricalPq(_) => "empirical-pq",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CodeArgs {
    /// Field degree ν (n = 2^ν − 1).
    #[arg(long)]
    pub nu: u32,
    /// Error-correcting radius.
    #[arg(long)]
    pub t: usize,
    /// Use the even-weight subcode.
    #[arg(long)]
    pub even: bool,
    /// auto, exact, macwilliams or binomial.
    #[arg(long, default_value = "auto")]
    pub spectrum: String,
}

#[derive(Args, Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CouplingArgs {
    /// Chain length.
    #[arg(long = "L", default_value_t = 1025)]
    pub l: usize,
    /// Coupling width.
    #[arg(long, default_value_t = 16)]
    pub w: usize,
}

impl CouplingArgs {
    fn profile(&self) -> Result<CouplingProfile> {
        CouplingProfile::new(self.l, self.w)
    }
}

#[derive(Args, Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LimitArgs {
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub eps_success: Option<f64>,
    #[arg(long)]
    pub eps_stall: Option<f64>,
}

impl LimitArgs {
    fn apply(&self, mut base: DeLimits<f64>) -> DeLimits<f64> {
        if let Some(v) = self.max_iters {
            base.max_iters = v;
        }
        if let Some(v) = self.eps_success {
            base.eps_success = v;
        }
        if let Some(v) = self.eps_stall {
            base.eps_stall = v;
        }
        base
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Plain,
    Even,
    NoMiscorrection,
}

impl VariantArg {
    fn build(self, t: usize) -> Result<ScaledVariant> {
        match self {
            VariantArg::Plain => ScaledVariant::plain(t),
            VariantArg::Even => ScaledVariant::even_subcode(t),
            VariantArg::NoMiscorrection => ScaledVariant::no_miscorrection(t),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Solve the uncoupled ensemble instead of the coupled chain.
    #[arg(long)]
    pub uncoupled: bool,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    /// Bisection tolerance on a = n·p.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[command(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ScaledArgs {
    #[arg(long)]
    pub t: usize,
    #[arg(long, value_enum, default_value = "plain")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[command(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PotentialArgs {
    #[arg(long)]
    pub t: usize,
    /// Finite length n = 2^ν − 1; omit for the high-rate limit.
    #[arg(long)]
    pub nu: Option<u32>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Also emit the curve at this p (finite) or ρ (scaled).
    #[arg(long)]
    pub curve_at: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    /// Upper end of the λ axis for scaled curves (default 3t).
    #[arg(long)]
    pub lambda_max: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct TraceArgs {
    #[arg(long)]
    pub t: usize,
    /// Finite length n = 2^ν − 1; omit for the high-rate limit.
    #[arg(long)]
    pub nu: Option<u32>,
    #[arg(long)]
    pub even: bool,
    #[arg(long, default_value = "auto")]
    pub spectrum: String,
    /// Scaled variant (ignored with `--nu`).
    #[arg(long, value_enum, default_value = "plain")]
    pub variant: VariantArg,
    /// Channel parameter: p for finite length, ρ for the high-rate limit.
    #[arg(long)]
    pub param: f64,
    #[arg(long)]
    pub uncoupled: bool,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    /// Keep every k-th iteration.
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[command(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct Table1Args {
    /// Include the n = 511 and n = 1023 rows.
    #[arg(long)]
    pub full: bool,
    /// Override the per-cell tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Comma-separated subset of rows (e.g. `rho*,rho^**`).
    #[arg(long, value_delimiter = ',')]
    pub rows: Vec<String>,
    /// Restrict to these t values.
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<usize>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CapacityArgs {
    #[arg(long)]
    pub t: usize,
    /// Inclusive range `a..b` or a comma list.
    #[arg(long, default_value = "8..20")]
    pub nu: String,
    #[arg(long)]
    pub even: bool,
    /// Use p* = ρ*/n instead of the ideal 2t/n.
    #[arg(long)]
    pub rho_star: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    pub eps: Vec<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransmissionArg {
    AllZero,
    RandomCodeword,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlotArg {
    Channel,
    Own,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub nu: u32,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub even: bool,
    /// Constraints (per position when coupled).
    #[arg(long)]
    pub m: usize,
    /// Coupled chain length; omit for the uncoupled ensemble.
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub w: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to `--seed`.
    #[arg(long)]
    pub graph_seed: Option<u64>,
    /// Defaults to `--seed`.
    #[arg(long)]
    pub noise_seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value = "all-zero")]
    pub transmission: TransmissionArg,
    #[arg(long, value_enum, default_value = "channel")]
    pub slot: SlotArg,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PqArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Error counts i, as `a..b` or a comma list.
    #[arg(long)]
    pub i: String,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn load_config(path: &Path) -> Result<Command> {
    let text = std::fs::read_to_string(path)?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let config = doc
        .get("config")
        .cloned()
        .ok_or_else(|| Error::Config(format!("{} has no config field", path.display())))?;
    serde_json::from_value(config).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn execute(command: &Command, out_dir: &Path, name: Option<&str>) -> Result<Outcome> {
    let config = serde_json::to_value(command).map_err(|e| Error::Config(e.to_string()))?;
    let stem = name.unwrap_or(command.name()).to_string();
    let mut out = Artifacts::new(out_dir, stem, config)?;
    let outcome = match command {
        Command::Threshold(a) => threshold(a, &mut out)?,
        Command::ScaledThreshold(a) => scaled(a, &mut out)?,
        Command::Potential(a) => potential(a, &mut out)?,
        Command::DeTrace(a) => trace(a, &mut out)?,
        Command::Table1(a) => table(a, &mut out)?,
        Command::Capacity(a) => capacity(a, &mut out)?,
        Command::Simulate(a) => simulate(a, &mut out)?,
        Command::EmpiricalPq(a) => pq(a, &mut out)?,
    };
    for p in out.written() {
        println!("wrote {}", p.display());
    }
    Ok(outcome)
}

/// `a..b` (inclusive) or `a,b,c`.
pub fn parse_list<T>(s: &str) -> Result<Vec<T>>
where
    T: std::str::FromStr + Copy + Into<u64> + TryFrom<u64>,
{
    let bad = || Error::Config(format!("cannot parse list '{s}'"));
    let one = |x: &str| x.trim().parse::<T>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (one(a)?.into(), one(b.trim_start_matches('='))?.into());
        if a > b {
            return Err(bad());
        }
        (a..=b).map(|v| T::try_from(v).map_err(|_| bad())).collect()
    } else {
        s.split(',').map(one).collect()
    }
}

fn component(nu: u32, t: usize, even: bool, spectrum: &str) -> Result<(ComponentCode, MiscorrectionTable<f64>, SpectrumMethod)> {
    let code = build_bch(nu, t, even)?;
    let method = match spectrum {
        "auto" => SpectrumMethod::auto_for(&code),
        other => other.parse()?,
    };
    let spec = weight_spectrum(&code, method)?;
    let table = miscorrection_table(code.n(), t, &spec)?;
    Ok((code, table, method))
}

fn threshold(a: &ThresholdArgs, out: &mut Artifacts) -> Result<Outcome> {
    let (code, table, method) = component(a.code.nu, a.code.t, a.code.even, &a.code.spectrum)?;
    let n = code.n() as f64;
    let res = if a.uncoupled {
        uncoupled_threshold(&table)?
    } else {
        let limits = a.limits.apply(DeLimits::default());
        let hi = 2.0 * a.code.t as f64 / (n - 1.0);
        sc_threshold_in(&table, &a.coupling.profile()?, (0.0, hi), a.tol / n, &limits)?
    };
    let a_star = res.a_star.unwrap_or(res.threshold * n);
    println!("n={} k={} spectrum={} p*={:.6e} a*={:.4}", code.n(), code.k(), method.as_str(), res.threshold, a_star);
    out.json(&json!({
        "n": code.n(),
        "k": code.k(),
        "spectrum": method,
        "p_star": res.threshold,
        "a_star": a_star,
        "bracket": res.bracket,
        "evaluations": res.evaluations,
    }))?;
    Ok(Outcome::Done)
}

fn scaled(a: &ScaledArgs, out: &mut Artifacts) -> Result<Outcome> {
    let variant = a.variant.build(a.t)?;
    let limits = a.limits.apply(DeLimits::scaled());
    let res = scaled_threshold(&variant, &a.coupling.profile()?, a.tol, &limits)?;
    println!("{} t={} rho*={:.4}", variant.kind().as_str(), a.t, res.threshold);
    out.json(&json!({
        "variant": variant.kind().as_str(),
        "rho_star": res.threshold,
        "bracket": res.bracket,
        "evaluations": res.evaluations,
    }))?;
    Ok(Outcome::Done)
}

fn potential(a: &PotentialArgs, out: &mut Artifacts) -> Result<Outcome> {
    let (res, curve) = match a.nu {
        Some(nu) => {
            let n = (1usize << nu) - 1;
            let res = potential_threshold_finite(n, a.t, a.tol / n as f64)?;
            let curve = a.curve_at.map(|p| potential_curve_finite(n, a.t, p, a.points)).transpose()?;
            (res, curve)
        }
        None => {
            let res = scaled_potential_threshold(a.t, a.tol)?;
            let lmax = a.lambda_max.unwrap_or(3.0 * a.t as f64);
            let curve = a.curve_at.map(|r| potential_curve_scaled(a.t, r, lmax, a.points)).transpose()?;
            (res, curve)
        }
    };
    println!("t={} potential threshold={:.6}", a.t, res.a_star.unwrap_or(res.threshold));
    out.json(&json!({
        "threshold": res.threshold,
        "a_star": res.a_star,
        "bracket": res.bracket,
    }))?;
    if let Some(c) = curve {
        out.csv(".curve", |w| c.write_csv(w))?;
    }
    Ok(Outcome::Done)
}

fn trace(a: &TraceArgs, out: &mut Artifacts) -> Result<Outcome> {
    let limits = a.limits.apply(DeLimits::default()).recording(a.record_every);
    let profile = if a.uncoupled { CouplingProfile::uncoupled() } else { a.coupling.profile()? };
    let tr = match a.nu {
        Some(nu) => {
            let (_, table, _) = component(nu, a.t, a.even, &a.spectrum)?;
            if a.uncoupled {
                de_run(a.param, &table, &limits)
            } else {
                sc_de_run(a.param, &table, &profile, &limits)
            }
        }
        None => {
            let variant = a.variant.build(a.t)?;
            let limits = a.limits.apply(DeLimits::scaled()).recording(a.record_every);
            sc_scaled_de_run(a.param, &variant, &profile, &limits)
        }
    };
    println!("verdict={:?} iterations={} residual={:.3e}", tr.verdict, tr.iterations, tr.residual);
    out.json(&json!({
        "verdict": tr.verdict,
        "iterations": tr.iterations,
        "residual": tr.residual,
    }))?;
    out.csv(".trace", |w| tr.write_csv(w))?;
    Ok(Outcome::Done)
}

fn table(a: &Table1Args, out: &mut Artifacts) -> Result<Outcome> {
    for r in &a.rows {
        if !table1::REFERENCE.iter().any(|(row, _)| row == r) {
            return Err(Error::Config(format!("unknown row '{r}'")));
        }
    }
    if let Some(t) = a.t.iter().find(|t| !table1::T_RANGE.contains(t)) {
        return Err(Error::Config(format!("t={t} is not in the table")));
    }
    let select = table1::Selection {
        full: a.full,
        rows: a.rows.clone(),
        t: a.t.clone(),
        tolerance: a.tolerance,
    };
    let cells = table1::report(&select, &table1::Settings::default());
    print!("{}", table1::render(&cells));
    let failing: Vec<_> = cells.iter().filter(|c| !c.pass).collect();
    out.json(&json!({ "cells": cells, "all_pass": failing.is_empty() }))?;
    out.csv("", |w| table1::write_csv(&cells, w))?;
    if let Some(c) = failing.iter().find(|c| c.error.is_some()) {
        eprintln!("{} t={}: {}", c.row, c.t, c.error.as_deref().unwrap_or_default());
    }
    if failing.is_empty() {
        Ok(Outcome::Done)
    } else {
        eprintln!("{} of {} cells outside tolerance", failing.len(), cells.len());
        Ok(Outcome::Deviation)
    }
}

fn capacity(a: &CapacityArgs, out: &mut Artifacts) -> Result<Outcome> {
    let nus: Vec<u32> = parse_list(&a.nu)?;
    let source = match a.rho_star {
        Some(rho_star) => ThresholdSource::Measured { rho_star },
        None => ThresholdSource::Ideal,
    };
    let reports = capacity_ratio_sweep(a.t, nus, a.even, source, &a.eps)?;
    for r in &reports {
        println!("nu={:>2} rate={:.5} ratio={:.5}", r.nu, r.rate, r.ratio);
    }
    out.json(&reports)?;
    out.csv("", |w| write_reports_csv(&reports, w))?;
    Ok(Outcome::Done)
}

fn simulate(a: &SimulateArgs, out: &mut Artifacts) -> Result<Outcome> {
    let code = build_bch(a.nu, a.t, a.even)?;
    let graph_seed = a.graph_seed.unwrap_or(a.seed);
    let noise_seed = a.noise_seed.unwrap_or(a.seed);
    let graph = match a.l {
        Some(l) => sample_coupled_graph(code.n(), a.m, &CouplingProfile::new(l, a.w)?, graph_seed)?,
        None => sample_uncoupled_graph(code.n(), a.m, graph_seed)?,
    };
    let options = SimOptions {
        max_iters: a.max_iters,
        transmission: match a.transmission {
            TransmissionArg::AllZero => Transmission::AllZero,
            TransmissionArg::RandomCodeword => Transmission::RandomCodeword,
        },
        slot_rule: match a.slot {
            SlotArg::Channel => SlotRule::ChannelValue,
            SlotArg::Own => SlotRule::OwnMessage,
        },
        per_position: a.l.is_some(),
    };
    let trace = simulate_hdd_with(&graph, &code, a.p, &options, noise_seed)?;
    let rates = trace.message_error_rates();
    println!(
        "verdict={:?} iterations={} final message error rate={:.3e}",
        trace.verdict,
        rates.len().saturating_sub(1),
        rates.last().copied().unwrap_or(0.0)
    );
    let meta = SimMetadata::new(&code, &graph, &trace, &options);
    out.json(&json!({ "meta": meta, "message_error_rates": rates }))?;
    out.csv(".trace", |w| trace.write_csv(w))?;
    out.metadata(&meta)?;
    Ok(Outcome::Done)
}

fn pq(a: &PqArgs, out: &mut Artifacts) -> Result<Outcome> {
    let (code, table, method) = component(a.code.nu, a.code.t, a.code.even, &a.code.spectrum)?;
    let is: Vec<u64> = parse_list(&a.i)?;
    let mut rows = Vec::new();
    for i in is {
        let i = i as usize;
        let e = empirical_pq(&code, i, a.trials, a.seed)?;
        let (p, q) = (table.p()[i], table.q()[i]);
        println!(
            "i={i:>3} P={:.5} (analytic {p:.5})  Q={:.3e} (analytic {q:.3e})",
            e.p_hat, e.q_hat
        );
        rows.push(json!({
            "empirical": e,
            "analytic_p": p,
            "analytic_q": q,
            "p_sigma": (e.p_hat - p) / e.p_stderr.max(f64::MIN_POSITIVE),
            "q_sigma": (e.q_hat - q) / e.q_stderr.max(f64::MIN_POSITIVE),
        }));
    }
    out.json(&json!({ "n": code.n(), "k": code.k(), "spectrum": method, "rows": rows }))?;
    Ok(Outcome::Done)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list::<u32>("8..11").unwrap(), vec![8, 9, 10, 11]);
        assert_eq!(parse_list::<u32>("3,5").unwrap(), vec![3, 5]);
        assert!(parse_list::<u32>("5..3").is_err());
        assert!(parse_list::<u32>("x").is_err());
    }
}
