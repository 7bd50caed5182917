mod format;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use icsep::channel::parse_carriers;
use icsep::dof::db_to_linear;
use icsep::{
    allocate_power, carrier_mac_reduction, make_counterexample, mac_bound_dense_grid, mac_bound_optimize, play_game,
    sweep, CarrierDof, MacBoundResult, MacSearchConfig, Parallel, Position, Tolerance,
};

use crate::format::sig;

const DIGITS: usize = 9;

#[derive(Parser)]
#[command(name = "icsep", version, about = "Rates, outerbounds and separability checks for 3-user Gaussian interference channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a channel and report singularity witnesses and per-carrier DoF.
    Check {
        #[command(flatten)]
        source: Source,
        /// Relative tolerance for the ratio test; 0 compares exactly.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Joint, separate and TDMA rates over an SNR grid, as CSV.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        grid: Grid,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Genie-aided MAC bound for the channel with cross gain h.
    BoundMac {
        /// Cross gain; must exceed 1.
        #[arg(long, allow_negative_numbers = true)]
        h: f64,
        /// Linear SNR values (repeatable or comma separated).
        #[arg(long, value_delimiter = ',')]
        snr: Vec<f64>,
        /// SNR values in dB (repeatable or comma separated).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        snr_db: Vec<f64>,
        /// Also run the dense grid search and report the gap.
        #[arg(long)]
        oracle: bool,
        /// Grid step of the oracle search.
        #[arg(long, default_value_t = 0.01)]
        oracle_step: f64,
        #[arg(long)]
        json: bool,
    },
    /// Let the adversary rewrite one coefficient per carrier and judge the outcome.
    Game {
        #[command(flatten)]
        source: Source,
        /// 1-based off-diagonal position `i,j`, one per carrier in carrier order.
        #[arg(long = "coeff", required = true)]
        coeffs: Vec<String>,
        /// Apply the first position to every carrier.
        #[arg(long)]
        same_coeff: bool,
        #[arg(long)]
        json: bool,
    },
    /// Split a power budget across carriers to maximize a sum of concave bounds.
    Alloc {
        /// Per-carrier bound: `log:<g>` for (1/2)log2(1+g p), or `unit` (g = 1).
        #[arg(long = "bound")]
        bounds: Vec<String>,
        /// Take the bounds from each carrier's MAC reduction instead.
        #[command(flatten)]
        source: OptSource,
        /// Total linear SNR.
        #[arg(long, conflicts_with = "snr_db")]
        snr: Option<f64>,
        /// Total SNR in dB.
        #[arg(long, allow_negative_numbers = true)]
        snr_db: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Counterexample,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Channel file: {"carriers": [{"h": [[..],[..],[..]]}, ...]}.
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct OptSource {
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
}

#[derive(Args)]
struct Grid {
    #[arg(long, allow_negative_numbers = true)]
    snr_db_start: f64,
    #[arg(long, allow_negative_numbers = true)]
    snr_db_stop: f64,
    #[arg(long)]
    snr_db_step: f64,
}

impl Grid {
    /// `start + k * step` up to `stop` inclusive (with a small slack for rounding).
    fn points(&self) -> anyhow::Result<Vec<f64>> {
        let Grid { snr_db_start: a, snr_db_stop: b, snr_db_step: s } = *self;
        if !(a.is_finite() && b.is_finite() && s.is_finite()) || s <= 0.0 || b < a {
            bail!("invalid SNR grid: need finite start <= stop and step > 0");
        }
        let n = ((b - a) / s + 1e-9).floor() as usize;
        if n > 1_000_000 {
            bail!("SNR grid has too many points");
        }
        Ok((0..=n).map(|k| a + k as f64 * s).collect())
    }
}

/// Carriers as written, without validation (builtins are valid by construction).
fn raw_carriers(channel: &Option<PathBuf>, builtin: Option<Builtin>) -> anyhow::Result<Vec<icsep::Channel>> {
    match (channel, builtin) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            Ok(parse_carriers(&text).with_context(|| path.display().to_string())?)
        }
        (None, Some(Builtin::Counterexample)) => Ok(make_counterexample::<f64>().carriers().to_vec()),
        (None, None) => bail!("pass --channel <path> or --builtin counterexample"),
    }
}

fn load(channel: &Option<PathBuf>, builtin: Option<Builtin>) -> anyhow::Result<Parallel> {
    let label = channel.as_ref().map_or("builtin channel".to_string(), |p| p.display().to_string());
    Ok(Parallel::new(raw_carriers(channel, builtin)?).with_context(|| label)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out).and_then(|()| out.flush().map_err(Into::into)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Check { source, tol, json } => check(&source, tol, json, out),
        Command::Sweep { source, grid, output } => {
            let channel = load(&source.channel, source.builtin)?;
            let rows = sweep(&channel, &grid.points()?)?;
            let csv = sweep_csv(&rows);
            match output {
                Some(path) => fs::write(&path, csv).with_context(|| format!("cannot write {}", path.display()))?,
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(())
        }
        Command::BoundMac { h, snr, snr_db, oracle, oracle_step, json } => {
            let snrs: Vec<f64> = snr.into_iter().chain(snr_db.into_iter().map(db_to_linear)).collect();
            bound_mac(h, &snrs, oracle.then_some(oracle_step), json, out)
        }
        Command::Game { source, coeffs, same_coeff, json } => {
            let channel = load(&source.channel, source.builtin)?;
            let mut positions = coeffs
                .iter()
                .map(|s| Position::parse_one_based(s).with_context(|| format!("--coeff {s}")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            if same_coeff {
                positions = vec![positions[0]; channel.num_carriers()];
            }
            game(&channel, &positions, json, out)
        }
        Command::Alloc { bounds, source, snr, snr_db, json } => {
            let total = match (snr, snr_db) {
                (Some(s), _) => s,
                (None, Some(db)) => db_to_linear(db),
                (None, None) => bail!("pass --snr or --snr-db"),
            };
            let gains = if source.channel.is_some() || source.builtin.is_some() {
                if !bounds.is_empty() {
                    bail!("--bound cannot be combined with --channel or --builtin");
                }
                reduction_gains(&load(&source.channel, source.builtin)?)?
            } else {
                bounds.iter().map(|b| parse_bound(b)).collect::<anyhow::Result<Vec<_>>>()?
            };
            alloc(&gains, total, json, out)
        }
    }
}

fn check(source: &Source, tol: f64, json: bool, out: &mut impl Write) -> anyhow::Result<()> {
    if !(tol >= 0.0 && tol.is_finite()) {
        bail!("--tol must be a finite nonnegative number");
    }
    let tol = if tol == 0.0 { Tolerance::Exact } else { Tolerance::Relative(tol) };
    let carriers = raw_carriers(&source.channel, source.builtin)?;
    if carriers.is_empty() {
        bail!(icsep::Error::NoCarriers);
    }
    let mut errors = Vec::new();
    let mut report = Vec::new();
    for (m, carrier) in carriers.iter().enumerate() {
        let problem = carrier.validate().err().map(|e| match e {
            icsep::Error::InvalidGain { rx, tx, .. } => icsep::Error::InvalidGain { carrier: m, rx, tx },
            other => other,
        });
        let witnesses = if problem.is_none() { carrier.singularity_witnesses(tol) } else { Vec::new() };
        let dof = match (&problem, witnesses.is_empty()) {
            (None, false) => Some(CarrierDof::One),
            (None, true) => Some(CarrierDof::Unknown),
            (Some(_), _) => None,
        };
        report.push((m, problem.as_ref().map(|e| e.to_string()), witnesses, dof));
        errors.extend(problem);
    }

    if json {
        let carriers: Vec<_> = report
            .iter()
            .map(|(m, problem, witnesses, dof)| {
                json!({
                    "carrier": m + 1,
                    "valid": problem.is_none(),
                    "error": problem,
                    "witnesses": witnesses
                        .iter()
                        .map(|w| json!({"i": w.i + 1, "j": w.j + 1, "k": w.k + 1, "gamma": w.gamma}))
                        .collect::<Vec<_>>(),
                    "dof": dof,
                })
            })
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&json!({ "carriers": carriers }))?)?;
    } else {
        for (m, problem, witnesses, dof) in &report {
            match problem {
                Some(_) => writeln!(out, "carrier {}: invalid", m + 1)?,
                None => writeln!(out, "carrier {}: valid", m + 1)?,
            }
            if problem.is_none() {
                if witnesses.is_empty() {
                    writeln!(out, "  no witness")?;
                }
                for w in witnesses {
                    writeln!(out, "  witness i={} j={} k={} gamma={}", w.i + 1, w.j + 1, w.k + 1, sig(w.gamma, DIGITS))?;
                }
            }
            if let Some(dof) = dof {
                writeln!(out, "  dof {dof}")?;
            }
        }
        let dofs: Vec<String> = report
            .iter()
            .map(|(_, _, _, d)| d.map_or("invalid".to_string(), |d| d.to_string()))
            .collect();
        writeln!(out, "per-carrier dof: [{}]", dofs.join(", "))?;
    }

    match errors.len() {
        0 => Ok(()),
        1 => bail!(errors.remove(0)),
        n => bail!("{n} invalid carriers; first: {}", errors[0]),
    }
}

fn sweep_csv(rows: &[icsep::SweepResult<f64>]) -> String {
    let mut csv = String::from("snr_db,joint_tin,separate_outer,tdma,scheme_note\n");
    for r in rows {
        let separate = r.separate_outer.map_or(String::new(), |v| sig(v, DIGITS));
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            sig(r.snr_db, DIGITS),
            sig(r.joint_tin, DIGITS),
            separate,
            sig(r.tdma, DIGITS),
            r.scheme_note
        ));
    }
    csv
}

fn bound_mac(h: f64, snrs: &[f64], oracle_step: Option<f64>, json: bool, out: &mut impl Write) -> anyhow::Result<()> {
    if !(h > 1.0) {
        bail!("cross gain h = {h} is not allowed: the genie bound requires h > 1");
    }
    if snrs.is_empty() {
        bail!("pass at least one --snr or --snr-db value");
    }
    let cfg = MacSearchConfig::default();
    let mut rows: Vec<(f64, MacBoundResult<f64>, Option<MacBoundResult<f64>>)> = Vec::new();
    for &snr in snrs {
        let best = mac_bound_optimize(h, snr, &cfg)?;
        let grid = oracle_step.map(|step| mac_bound_dense_grid(h, snr, step, &cfg)).transpose()?;
        rows.push((snr, best, grid));
    }

    if json {
        let items: Vec<_> = rows
            .iter()
            .map(|(snr, best, grid)| {
                json!({
                    "h": h,
                    "snr": snr,
                    "bound": best.value,
                    "a1": best.params.a1,
                    "sigma": best.params.sigma,
                    "rho": best.params.rho,
                    "oracle": grid.as_ref().map(|g| g.value),
                    "oracle_gap": grid.as_ref().map(|g| best.value - g.value),
                })
            })
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&items)?)?;
        return Ok(());
    }

    let oracle = oracle_step.is_some();
    writeln!(out, "h,snr,bound,a1,sigma,rho{}", if oracle { ",oracle,oracle_gap" } else { "" })?;
    for (snr, best, grid) in &rows {
        let p = &best.params;
        write!(
            out,
            "{},{},{},{},{},{}",
            sig(h, DIGITS),
            sig(*snr, DIGITS),
            sig(best.value, DIGITS),
            sig(p.a1, DIGITS),
            sig(p.sigma, DIGITS),
            sig(p.rho, DIGITS)
        )?;
        if let Some(g) = grid {
            write!(out, ",{},{}", sig(g.value, DIGITS), sig(best.value - g.value, DIGITS))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn game(channel: &Parallel, positions: &[Position], json: bool, out: &mut impl Write) -> anyhow::Result<()> {
    let outcome = play_game(channel, positions)?;
    let modified = outcome.modified_channel.carriers();
    let slope = outcome.joint_dof.slope;
    let scheme = match outcome.joint_scheme {
        icsep::JointScheme::AlignedEqualPower => "ia",
        icsep::JointScheme::TdmaFallback => "tdma",
    };

    if json {
        let carriers: Vec<_> = modified
            .iter()
            .zip(positions)
            .zip(&outcome.per_carrier_dof)
            .map(|((c, pos), dof)| json!({"coeff": [pos.rx + 1, pos.tx + 1], "h": c.rows(), "dof": dof}))
            .collect();
        let doc = json!({
            "carriers": carriers,
            "joint_slope": slope,
            "joint_r_squared": outcome.joint_dof.r_squared,
            "joint_scheme": scheme,
            "winner": outcome.winner,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        return Ok(());
    }

    for (m, ((c, pos), dof)) in modified.iter().zip(positions).zip(&outcome.per_carrier_dof).enumerate() {
        writeln!(out, "carrier {}: adversary sets {} to {}", m + 1, pos, sig(c.gain(pos.rx, pos.tx), DIGITS))?;
        for row in c.rows() {
            let cells: Vec<String> = row.iter().map(|&x| sig(x, DIGITS)).collect();
            writeln!(out, "  [{}]", cells.join(", "))?;
        }
        writeln!(out, "  dof {dof}")?;
    }
    writeln!(out, "joint scheme: {scheme}")?;
    writeln!(out, "joint slope: {} (r2 {})", sig(slope, 6), sig(outcome.joint_dof.r_squared, 6))?;
    writeln!(out, "winner: {}", outcome.winner)?;
    Ok(())
}

/// Squared gain `g` of a per-carrier bound `(1/2) log2(1 + g p)`.
fn parse_bound(s: &str) -> anyhow::Result<f64> {
    let g = match s.split_once(':') {
        None if s == "unit" => 1.0,
        Some(("log", g)) => g.trim().parse::<f64>().with_context(|| format!("bad gain in --bound {s}"))?,
        _ => bail!("unknown bound '{s}': expected log:<g> or unit"),
    };
    if !(g > 0.0 && g.is_finite()) {
        bail!("bound gain must be positive and finite, got {g}");
    }
    Ok(g)
}

fn reduction_gains(channel: &Parallel) -> anyhow::Result<Vec<f64>> {
    channel
        .carriers()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            carrier_mac_reduction(c)
                .map(|r| r.gain)
                .with_context(|| format!("carrier {}: no receiver can decode all messages", m + 1))
        })
        .collect()
}

fn alloc(gains: &[f64], total: f64, json: bool, out: &mut impl Write) -> anyhow::Result<()> {
    if gains.is_empty() {
        bail!("pass at least one --bound, or --channel/--builtin");
    }
    let bounds: Vec<_> = gains.iter().map(|&g| move |p: f64| 0.5 * (g * p).ln_1p() / std::f64::consts::LN_2).collect();
    let a = allocate_power(&bounds, total)?;
    let rates: Vec<f64> = bounds.iter().zip(&a.per_carrier).map(|(f, &p)| f(p)).collect();
    let sum: f64 = rates.iter().sum();

    if json {
        let carriers: Vec<_> = gains
            .iter()
            .zip(&a.per_carrier)
            .zip(&rates)
            .map(|((g, p), r)| json!({"gain": g, "power": p, "value": r}))
            .collect();
        let doc = json!({"total_snr": total, "carriers": carriers, "sum": sum});
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        return Ok(());
    }
    writeln!(out, "carrier,gain,power,value")?;
    for (m, ((g, p), r)) in gains.iter().zip(&a.per_carrier).zip(&rates).enumerate() {
        writeln!(out, "{},{},{},{}", m + 1, sig(*g, DIGITS), sig(*p, DIGITS), sig(*r, DIGITS))?;
    }
    writeln!(out, "sum,,{},{}", sig(a.total(), DIGITS), sig(sum, DIGITS))?;
    Ok(())
}
