use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use tauforge::channel::ChannelSpec;
use tauforge::field::{q, Field, QuadExt, Q};
use tauforge::nekrasov::{agt_equivalence_check, block_sum_at, Dressing, NekrasovKind};
use tauforge::pit::PointSampler;
use tauforge::scalar::{ParameterPoint, Sym};
use tauforge::skew::{solve_c, verify_observed, SkewSolveError};
use tauforge::tau::{generic_points, numeric_check, ode_residual, tau_series, Family, StructureMode, Tau, TauScalar};
use tauforge::verma::{four_point_block, BlockWeights};
use tauforge::whittaker::icb_series;

use crate::cache::{Cache, JobKey};
use crate::formats::{self, approx, coefficient_map, point_json, rational, require, ToJson};
use crate::{CliError, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

#[derive(Parser, Debug, Clone)]
#[command(name = "tauforge", version, about = "Exact conformal-block series and Painlevé tau-function checks")]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every sampled point.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Four-point Virasoro block coefficients B_0..B_M.
    Block(BlockArgs),
    /// Irregular block coefficients a_0..a_M of t^{-k}.
    Icb(IcbArgs),
    #[command(subcommand)]
    Nekrasov(NekrasovCmd),
    #[command(subcommand)]
    Tau(TauCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
    #[command(subcommand)]
    Conjecture(ConjectureCmd),
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Args, Debug, Clone)]
pub struct PointArg {
    /// JSON map from symbol names to rationals ("p/q").
    #[arg(long)]
    pub point: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BlockArgs {
    #[command(flatten)]
    pub point: PointArg,
    #[arg(long)]
    pub order: u32,
}

#[derive(Args, Debug, Clone)]
pub struct IcbArgs {
    #[command(flatten)]
    pub point: PointArg,
    #[arg(long)]
    pub rank: i32,
    #[arg(long)]
    pub order: u32,
}

#[derive(Subcommand, Debug, Clone)]
pub enum NekrasovCmd {
    /// Coefficients of the Young-diagram sum.
    Sum {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        order: u32,
        #[command(flatten)]
        point: PointArg,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum TauCmd {
    /// Channel table of a Fourier-expanded tau function.
    Build {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        nmax: i64,
        #[arg(long)]
        order: u32,
        /// Full structure constants at this many digits (exact when absent).
        #[arg(long)]
        digits: Option<usize>,
        #[command(flatten)]
        point: PointArg,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum VerifyCmd {
    /// Residual of the Hamiltonian ODE on the trusted window.
    Ode {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 1)]
        nmax: i64,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        digits: Option<usize>,
        #[command(flatten)]
        point: PointArg,
    },
    /// Block versus dressed Young-diagram sum.
    Agt {
        #[arg(long)]
        order: u32,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[command(flatten)]
        point: PointArg,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum ConjectureCmd {
    /// Fit the skew-expansion coefficients at one order.
    SolveC {
        #[arg(long)]
        order: u32,
        /// Sample points beyond the number of unknowns.
        #[arg(long, default_value_t = 20)]
        margin: usize,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum CacheCmd {
    Stats,
    Clear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub json: String,
    pub message: Option<String>,
}

pub fn run(cli: &Cli) -> Outcome {
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(cli)),
            Err(e) => Err(CliError::Io(e.to_string())),
        },
        None => execute(cli),
    };
    match result {
        Ok(v) => {
            let code = if v.get("pass") == Some(&Value::Bool(false)) { EXIT_FAIL } else { EXIT_PASS };
            Outcome { code, json: v.to_string(), message: None }
        }
        Err(e) => {
            let code = if matches!(e, CliError::Io(_)) { EXIT_FAIL } else { EXIT_USAGE };
            Outcome { code, json: json!({ "error": e.to_string() }).to_string(), message: Some(e.to_string()) }
        }
    }
}

type Job<'a> = Box<dyn FnOnce() -> Result<Value, CliError> + 'a>;

fn execute(cli: &Cli) -> Result<Value, CliError> {
    if let Command::Cache(c) = &cli.command {
        let cache = Cache::from_env().ok_or_else(|| CliError::Usage("no cache directory configured".into()))?;
        return match c {
            CacheCmd::Stats => Ok(cache.stats()),
            CacheCmd::Clear => cache.clear().map(|n| json!({ "removed": n })).map_err(|e| CliError::Io(e.to_string())),
        };
    }
    let (key, job) = plan(cli)?;
    let cache = if cli.no_cache { None } else { Cache::from_env() };
    if let Some(c) = &cache {
        if let Some(v) = c.get(&key) {
            return Ok(v);
        }
    }
    let v = job()?;
    if let Some(c) = &cache {
        // a failed write only costs a recomputation later
        let _ = c.put(&key, &v);
    }
    Ok(v)
}

fn read_point(arg: &PointArg) -> Result<Option<ParameterPoint>, CliError> {
    match &arg.point {
        None => Ok(None),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {}", path.display(), e)))?;
            formats::parse_point(&text).map(Some)
        }
    }
}

fn need_point(arg: &PointArg) -> Result<ParameterPoint, CliError> {
    read_point(arg)?.ok_or_else(|| CliError::Usage("--point is required".into()))
}

fn family(name: &str) -> Result<Family, CliError> {
    Family::from_name(name).ok_or_else(|| CliError::Usage(format!("unknown family `{}` (pvi, pv, piv)", name)))
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn plan(cli: &Cli) -> Result<(JobKey, Job<'_>), CliError> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Block(a) => {
            let p = need_point(&a.point)?;
            let w = block_weights(&p)?;
            let key = JobKey::new("block", point_json(&p), json!({ "order": a.order }), "exact");
            let order = a.order;
            (key, Box::new(move || Ok(coefficient_map(&four_point_block(&w, order).map_err(domain)?, 0))))
        }
        Command::Icb(a) => {
            let p = need_point(&a.point)?;
            let key = JobKey::new("icb", point_json(&p), json!({ "order": a.order, "rank": a.rank }), "exact");
            let (rank, order) = (a.rank, a.order);
            if !(1..=2).contains(&rank) {
                return Err(CliError::Usage("--rank must be 1 or 2".into()));
            }
            (key, Box::new(move || icb_job(&p, rank, order)))
        }
        Command::Nekrasov(NekrasovCmd::Sum { kind, order, point }) => {
            let k = NekrasovKind::from_name(kind).ok_or_else(|| {
                let names: Vec<&str> = NekrasovKind::ALL.iter().map(|k| k.name()).collect();
                CliError::Usage(format!("unknown kind `{}` ({})", kind, names.join(", ")))
            })?;
            let p = need_point(point)?;
            require(&p, k.symbols())?;
            let key = JobKey::new("nekrasov sum", point_json(&p), json!({ "order": order, "kind": k.name() }), "exact");
            let order = *order;
            (key, Box::new(move || Ok(coefficient_map(&block_sum_at(k, &p, order).map_err(domain)?, 0))))
        }
        Command::Tau(TauCmd::Build { family: f, nmax, order, digits, point }) => {
            let fam = family(f)?;
            let p = need_point(point)?;
            require(&p, fam.symbols())?;
            let mode = digits.map_or("exact".to_string(), |d| format!("numeric:{}", d));
            let key = JobKey::new(
                "tau build",
                point_json(&p),
                json!({ "family": fam.name(), "nmax": nmax, "order": order }),
                &mode,
            );
            let (nmax, order, digits) = (*nmax, *order, *digits);
            (key, Box::new(move || tau_job(fam, &p, nmax, order, digits)))
        }
        Command::Verify(VerifyCmd::Ode { family: f, nmax, order, digits, point }) => {
            let fam = family(f)?;
            if fam == Family::PVI {
                return Err(CliError::Domain("no ODE check for the sixth family".into()));
            }
            let p = match read_point(point)? {
                Some(p) => p,
                None => generic_points(fam, 1, seed).remove(0),
            };
            require(&p, fam.symbols())?;
            let order = order.unwrap_or(if fam == Family::PV { 10 } else { 12 });
            let mode = digits.map_or("exact".to_string(), |d| format!("numeric:{}", d));
            let key = JobKey::new(
                "verify ode",
                point_json(&p),
                json!({ "family": fam.name(), "nmax": nmax, "order": order }),
                &mode,
            );
            let (nmax, digits) = (*nmax, *digits);
            (key, Box::new(move || ode_job(fam, &p, nmax, order, digits)))
        }
        Command::Verify(VerifyCmd::Agt { order, trials, point }) => {
            let given = read_point(point)?;
            if let Some(p) = &given {
                require(p, NekrasovKind::Full4.symbols())?;
            }
            if *trials == 0 {
                return Err(CliError::Usage("--trials must be positive".into()));
            }
            let params = given.as_ref().map_or(Value::Null, point_json);
            let key = JobKey::new("verify agt", params, json!({ "order": order, "trials": trials, "seed": seed }), "exact");
            let (order, trials) = (*order, *trials);
            (key, Box::new(move || agt_job(given, order, trials, seed)))
        }
        Command::Conjecture(ConjectureCmd::SolveC { order, margin }) => {
            let key =
                JobKey::new("conjecture solve-c", Value::Null, json!({ "order": order, "margin": margin, "seed": seed }), "exact");
            let (order, margin) = (*order, *margin);
            (key, Box::new(move || solve_c_job(order, margin, seed)))
        }
        Command::Cache(_) => unreachable!("handled before planning"),
    })
}

/// Explicit weights (`delta_1..4`, `delta`, optional `c`) or the `c = 1`
/// dictionary from `theta_*` and `sigma`.
fn block_weights(p: &ParameterPoint) -> Result<BlockWeights<Q>, CliError> {
    if p.get(Sym::Delta).is_some() {
        let g = |s| p.q(s).map_err(formats::point_error);
        Ok(BlockWeights {
            d1: g(Sym::Delta1)?,
            d2: g(Sym::Delta2)?,
            delta: g(Sym::Delta)?,
            d3: g(Sym::Delta3)?,
            d4: g(Sym::Delta4)?,
            c: p.q_or(Sym::C, Q::ONE).map_err(formats::point_error)?,
        })
    } else {
        let [d1, d2, delta, d3, d4] = p.four_point_weights().map_err(formats::point_error)?;
        Ok(BlockWeights { d1, d2, delta, d3, d4, c: Q::ONE })
    }
}

fn quad_or_rational(x: &QuadExt) -> Value {
    if x.b.is_zero() {
        rational(&x.a)
    } else {
        formats::quad(x)
    }
}

fn icb_job(p: &ParameterPoint, rank: i32, order: u32) -> Result<Value, CliError> {
    let g = |s| p.q(s).map_err(formats::point_error);
    let (th, tt, b) = (g(Sym::Theta)?, g(Sym::ThetaT)?, g(Sym::Beta)?);
    let s = if rank == 1 {
        let t0 = g(Sym::Theta0)?;
        icb_series(1, &t0.square(), &tt.square(), &[th, q(1, 4)], &b, false, order)
    } else {
        icb_series(2, &Q::ZERO, &tt.square(), &[th, Q::ZERO, q(1, 4)], &(b / Q::from(2)), false, order)
    }
    .map_err(domain)?;
    let coeffs: Map<String, Value> = s.coeffs.iter().enumerate().map(|(k, x)| (k.to_string(), quad_or_rational(x))).collect();
    Ok(json!({
        "rank": rank,
        "t_exponent": rational(&s.t_exponent),
        "rate": rational(&s.rate),
        "coefficients": coeffs,
    }))
}

fn spec_json<F: ToJson>(s: &ChannelSpec<F>, digits: usize) -> Value {
    json!({
        "r": s.r,
        "rate0": s.rate0.to_json(digits),
        "rate1": s.rate1.to_json(digits),
        "texp0": s.texp0.to_json(digits),
        "texp1": s.texp1.to_json(digits),
        "texp2": s.texp2,
    })
}

fn tau_table<F: TauScalar + ToJson>(tau: &Tau<F>, digits: usize) -> Value {
    let cells: Map<String, Value> =
        tau.series.cells().map(|(n, k, x)| (format!("{}|{}", n, k), x.to_json(digits))).collect();
    json!({
        "family": tau.family.name(),
        "nmax": tau.truncation.nmax,
        "kmin": tau.truncation.kmin,
        "kmax": tau.truncation.kmax,
        "channel": spec_json(&tau.series.spec, digits),
        "cells": cells,
    })
}

fn tau_job(fam: Family, p: &ParameterPoint, nmax: i64, order: u32, digits: Option<usize>) -> Result<Value, CliError> {
    let mut v = match (digits, fam) {
        (Some(d), _) => tau_table(&tau_series::<tauforge::Real>(fam, p, nmax, order, StructureMode::Full { digits: d }).map_err(domain)?, d),
        (None, Family::PIV) => tau_table(&tau_series::<QuadExt>(fam, p, nmax, order, StructureMode::Reduced).map_err(domain)?, 0),
        (None, _) => tau_table(&tau_series::<Q>(fam, p, nmax, order, StructureMode::Reduced).map_err(domain)?, 0),
    };
    v["mode"] = json!(if digits.is_some() { "numeric" } else { "exact" });
    Ok(v)
}

fn exact_ode<F: TauScalar>(fam: Family, p: &ParameterPoint, nmax: i64, order: u32) -> Result<Value, CliError> {
    let tau = tau_series::<F>(fam, p, nmax, order, StructureMode::Reduced).map_err(domain)?;
    let rep = ode_residual(&tau, p).map_err(domain)?;
    let nonzero: Vec<Value> = rep
        .trusted
        .iter()
        .filter(|&&(n, k)| !rep.value(n, k).is_zero())
        .map(|(n, k)| json!(format!("{}|{}", n, k)))
        .collect();
    let ch0 = rep.channel_cells(0);
    Ok(json!({
        "pass": nonzero.is_empty(),
        "mode": "exact",
        "degree": rep.degree,
        "trusted_cells": rep.trusted.len(),
        "nonzero_cells": nonzero,
        "channel0_window": [ch0.first(), ch0.last()],
    }))
}

fn ode_job(fam: Family, p: &ParameterPoint, nmax: i64, order: u32, digits: Option<usize>) -> Result<Value, CliError> {
    let mut v = match digits {
        None if fam == Family::PIV => exact_ode::<QuadExt>(fam, p, nmax, order)?,
        None => exact_ode::<Q>(fam, p, nmax, order)?,
        Some(d) => {
            if d < 30 {
                return Err(CliError::Usage("--digits must be at least 30".into()));
            }
            let c = numeric_check(fam, p, nmax, order, d).map_err(domain)?;
            // absolute accuracy target: 20 digits of headroom below the
            // requested precision
            let threshold = -(d as f64 - 20.0);
            json!({
                "pass": c.abs_below(threshold),
                "mode": "numeric",
                "digits": d,
                "working_digits": c.working_digits,
                "threshold_log10": approx(threshold),
                "trusted_cells": c.cells,
                "max_abs_log10": c.max_abs_log10.map_or(Value::Null, approx),
                "max_rel_log10": c.max_rel_log10.map_or(Value::Null, approx),
                "max_term_log10": approx(c.max_scale_log10),
                "kappa_log10": approx(c.kappa.log10()),
            })
        }
    };
    v["family"] = json!(fam.name());
    v["nmax"] = json!(nmax);
    v["order"] = json!(order);
    v["point"] = point_json(p);
    Ok(v)
}

const FOUR: [Sym; 5] = [Sym::Theta0, Sym::ThetaT, Sym::Sigma, Sym::Theta1, Sym::ThetaInf];

fn agt_job(given: Option<ParameterPoint>, order: u32, trials: usize, seed: u64) -> Result<Value, CliError> {
    let mut sampler = PointSampler::new(&FOUR, seed);
    let mut points: Vec<ParameterPoint> = given.into_iter().collect();
    while points.len() < trials {
        points.push(sampler.point());
    }
    let results: Vec<Result<(bool, Option<u32>), CliError>> = points
        .par_iter()
        .map(|p| {
            let good = agt_equivalence_check(p, order, Dressing::ThetaTTheta1).map_err(domain)?;
            let printed = agt_equivalence_check(p, order, Dressing::Theta0Theta1).map_err(domain)?;
            Ok((good.pass, printed.first_mismatch))
        })
        .collect();
    let results: Vec<(bool, Option<u32>)> = results.into_iter().collect::<Result<_, _>>()?;
    let failures: Vec<Value> =
        points.iter().zip(&results).filter(|(_, r)| !r.0).map(|(p, _)| point_json(p)).collect();
    Ok(json!({
        "pass": failures.is_empty(),
        "order": order,
        "trials": points.len(),
        "dressing": "(1-t)^(2 theta_t theta_1)",
        "failures": failures,
        "printed_dressing_first_mismatch": results.iter().map(|r| json!(r.1)).collect::<Vec<_>>(),
    }))
}

fn solve_c_job(order: u32, margin: usize, seed: u64) -> Result<Value, CliError> {
    let sol = match solve_c(order, margin, seed) {
        Ok(s) => s,
        Err(SkewSolveError::Falsified { order, witness }) => {
            return Ok(json!({ "pass": false, "order": order, "falsified": true, "witness": point_json(&witness) }))
        }
        Err(e) => return Err(domain(e)),
    };
    let table: Map<String, Value> = sol.table().iter().map(|(t, c)| (t.key(), rational(c))).collect();
    let undetermined: Vec<Value> = sol
        .terms
        .iter()
        .filter(|t| sol.determined(t).is_none() && sol.determined_symmetric(t).is_none())
        .map(|t| json!(t.key()))
        .collect();
    let rep = verify_observed(std::slice::from_ref(&sol));
    let key = |t: &tauforge::skew::SkewTerm| json!(t.key());
    Ok(json!({
        "pass": rep.pass() && sol.symmetric.is_some(),
        "order": order,
        "unknowns": sol.terms.len(),
        "trials": sol.trials,
        "rank": sol.rank(),
        "nullity": sol.nullity(),
        "symmetric_nullity": sol.symmetric.as_ref().map(|s| s.nullspace.len()),
        "integer_points": sol.integer_points.len(),
        "integer_search_complete": sol.search_complete,
        "table": table,
        "undetermined": undetermined,
        "observed": {
            "matches": rep.matches,
            "mismatches": rep.mismatches.iter().map(|(t, v, o)| json!([t.key(), rational(v), o])).collect::<Vec<_>>(),
            "non_integral": rep.non_integral.iter().map(|(t, _)| key(t)).collect::<Vec<_>>(),
            "symmetry_violations": rep.symmetry_violations.iter().map(|(a, b)| json!([a.key(), b.key()])).collect::<Vec<_>>(),
        },
    }))
}
