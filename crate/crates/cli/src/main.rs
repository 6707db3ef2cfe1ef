//! `hvlab`: command-line front end for the hidden-variable laboratory.
//!
//! Five subcommands: `verify` (cross-oracle consistency suite), `scan`
//! (grid scan of F with region classification, CSV + JSON summary),
//! `mc` (Monte Carlo estimates), `constants` (model constants and
//! bounds), and `sup` (approach to the supremum |F| = 4).
//!
//! Exit codes: 0 success, 1 failed check, 2 usage or I/O error.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use hvlab::analysis::{self, SuiteConfig};
use hvlab::baselines::{self, PrBox};
use hvlab::closedform::{self, ChshQuartet};
use hvlab::montecarlo::{self, Estimate, McConfig, Side};
use hvlab::SingletModel;

#[derive(Parser)]
#[command(
    name = "hvlab",
    version,
    about = "Numerical laboratory for a two-level hidden-variable model of the singlet"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write a machine-readable JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Write the primary data output (CSV for `scan`) to this path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// RNG seed. The default is a fixed constant, not the clock, so
    /// casual runs reproduce bit for bit.
    #[arg(long, global = true, default_value_t = hvlab::DEFAULT_SEED)]
    seed: u64,

    /// Cap the worker-thread count (0 = library default). Results never
    /// depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the cross-oracle consistency suite and report per-check results.
    Verify {
        /// Agreement tolerance between the closed forms and the
        /// quadrature oracle.
        #[arg(long, default_value_t = 1e-7)]
        tol_closed_form: f64,

        /// Monte Carlo samples per estimate inside the suite.
        #[arg(long, default_value_t = 200_000)]
        mc_n: u64,

        /// Steps per axis of the oracle-equivalence grid.
        #[arg(long, default_value_t = 101)]
        grid_steps: usize,
    },

    /// Evaluate F on an (alpha, tau) grid, classify each cell, and write
    /// CSV rows `alpha,tau,F,abs_F,region` plus a JSON summary.
    Scan {
        #[arg(long, default_value_t = 201)]
        alpha_steps: usize,

        #[arg(long, default_value_t = 201)]
        tau_steps: usize,
    },

    /// Monte Carlo estimate of a model quantity on the CHSH quartet.
    Mc {
        /// What to estimate.
        #[arg(long, value_enum)]
        quantity: Quantity,

        /// Quartet angle alpha in [0, pi/4] (radians unless --degrees).
        #[arg(long)]
        alpha: Option<f64>,

        /// Conditioning tau in [0, pi) (radians unless --degrees);
        /// required for pair-tau, optional for f.
        #[arg(long)]
        tau: Option<f64>,

        /// Which quartet pair a pair estimate uses.
        #[arg(long, value_enum, default_value_t = PairChoice::Ab)]
        pair: PairChoice,

        /// Which party a marginal estimate averages.
        #[arg(long, value_enum)]
        side: Option<SideChoice>,

        /// Sample count (per term for f).
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,

        /// Interpret --alpha and --tau in degrees.
        #[arg(long)]
        degrees: bool,
    },

    /// Print the model constants and the bound hierarchy.
    Constants,

    /// Evaluate F at (pi/6, pi/2 - eps) for a decreasing eps sequence,
    /// approaching the supremum |F| = 4.
    Sup {
        /// Comma-separated strictly decreasing positive epsilons.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2, 1e-3, 1e-4, 1e-5])]
        epsilons: Vec<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    /// Full correlation of one quartet pair.
    Pair,
    /// tau-conditional correlation of one quartet pair.
    PairTau,
    /// Single-party marginal.
    Marginal,
    /// The CHSH combination F (full or tau-conditional).
    #[value(alias = "F")]
    F,
}

impl Quantity {
    fn as_str(&self) -> &'static str {
        match self {
            Quantity::Pair => "pair",
            Quantity::PairTau => "pair-tau",
            Quantity::Marginal => "marginal",
            Quantity::F => "f",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairChoice {
    Ab,
    Abp,
    Apb,
    Apbp,
}

impl PairChoice {
    fn as_str(&self) -> &'static str {
        match self {
            PairChoice::Ab => "ab",
            PairChoice::Abp => "abp",
            PairChoice::Apb => "apb",
            PairChoice::Apbp => "apbp",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideChoice {
    #[value(alias = "A")]
    A,
    #[value(alias = "B")]
    B,
}

fn main() -> ExitCode {
    // die quietly when a downstream pipe (head, awk) closes early
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();
    if cli.threads > 0 {
        // results are chunk-deterministic, so the pool size is purely a
        // throughput knob
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Verify {
            tol_closed_form,
            mc_n,
            grid_steps,
        } => cmd_verify(&cli, *tol_closed_form, *mc_n, *grid_steps),
        Command::Scan {
            alpha_steps,
            tau_steps,
        } => cmd_scan(&cli, *alpha_steps, *tau_steps),
        Command::Mc {
            quantity,
            alpha,
            tau,
            pair,
            side,
            n,
            degrees,
        } => cmd_mc(&cli, *quantity, *alpha, *tau, *pair, *side, *n, *degrees),
        Command::Constants => cmd_constants(&cli),
        Command::Sup { epsilons } => cmd_sup(&cli, epsilons),
    }
}

fn echo_config(cli: &Cli, command: &str, params: serde_json::Value) {
    println!(
        "config: {}",
        serde_json::json!({
            "command": command,
            "seed": cli.seed,
            "threads": cli.threads,
            "out": cli.out,
            "json": cli.json,
            "params": params,
        })
    );
}

fn write_json(path: &Option<PathBuf>, value: &serde_json::Value) -> anyhow::Result<()> {
    if let Some(path) = path {
        let text = serde_json::to_string_pretty(value)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, tol_closed_form: f64, mc_n: u64, grid_steps: usize) -> anyhow::Result<u8> {
    if grid_steps < 2 || mc_n < 1 || tol_closed_form <= 0.0 {
        bail!("verify: grid-steps must be >= 2, mc-n >= 1, tol-closed-form > 0");
    }
    let cfg = SuiteConfig {
        seed: cli.seed,
        tol_closed_form,
        mc_samples: mc_n,
        grid_steps,
        ..SuiteConfig::default()
    };
    echo_config(
        cli,
        "verify",
        serde_json::json!({
            "tol_closed_form": cfg.tol_closed_form,
            "mc_n": cfg.mc_samples,
            "grid_steps": cfg.grid_steps,
        }),
    );

    let report = analysis::consistency_suite(&cfg);
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        println!(
            "[{status}] {:32} achieved {: >12.4e}  tolerance {: >12.4e}",
            c.name, c.achieved, c.tolerance
        );
    }
    let passed = report.all_passed();
    println!(
        "{} of {} checks passed",
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len()
    );
    write_json(&cli.json, &serde_json::to_value(&report.checks)?)?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_scan(cli: &Cli, alpha_steps: usize, tau_steps: usize) -> anyhow::Result<u8> {
    if alpha_steps < 2 || tau_steps < 2 {
        bail!("scan: both step counts must be at least 2");
    }
    let Some(out) = &cli.out else {
        bail!("scan: --out <PATH> is required for the CSV grid");
    };
    echo_config(
        cli,
        "scan",
        serde_json::json!({
            "alpha_steps": alpha_steps,
            "tau_steps": tau_steps,
        }),
    );

    let result = analysis::scan(alpha_steps, tau_steps);

    let file = fs::File::create(out).with_context(|| format!("writing {}", out.display()))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "alpha,tau,F,abs_F,region")?;
    for i in 0..alpha_steps {
        let alpha = result.grid.alpha_at(i);
        for j in 0..tau_steps {
            let f = result.value_at(i, j);
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{}",
                alpha,
                result.grid.tau_at(j),
                f,
                f.abs(),
                result.label_at(i, j).as_str()
            )?;
        }
    }
    w.flush()?;

    let fractions = result.area_fractions();
    let summary = serde_json::json!({
        "alpha_steps": alpha_steps,
        "tau_steps": tau_steps,
        "counts": result.counts,
        "area_fractions": {
            "local": fractions[0],
            "quantum": fractions[1],
            "superquantum": fractions[2],
        },
        "max_abs_F": result.max_abs_f,
        "arg_max": { "alpha": result.argmax.0, "tau": result.argmax.1 },
        "singular_cell": [result.singular_cell.0, result.singular_cell.1],
    });
    println!("summary: {summary}");
    write_json(&cli.json, &summary)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_mc(
    cli: &Cli,
    quantity: Quantity,
    alpha: Option<f64>,
    tau: Option<f64>,
    pair: PairChoice,
    side: Option<SideChoice>,
    n: u64,
    degrees: bool,
) -> anyhow::Result<u8> {
    if n < 1 {
        bail!("mc: --n must be at least 1");
    }
    let convert = |x: f64| if degrees { x.to_radians() } else { x };
    let alpha = match alpha {
        Some(a) => {
            let a = convert(a);
            if !(0.0..=FRAC_PI_4).contains(&a) {
                bail!("mc: --alpha must lie in [0, pi/4] radians, got {a}");
            }
            a
        }
        None => bail!("mc: --alpha is required"),
    };
    let tau = match tau {
        Some(t) => {
            let t = convert(t);
            if !(0.0..PI).contains(&t) {
                bail!("mc: --tau must lie in [0, pi) radians, got {t}");
            }
            Some(t)
        }
        None => None,
    };
    if quantity == Quantity::PairTau && tau.is_none() {
        bail!("mc: --quantity pair-tau requires --tau");
    }
    if quantity == Quantity::Marginal && side.is_none() {
        bail!("mc: --quantity marginal requires --side");
    }

    echo_config(
        cli,
        "mc",
        serde_json::json!({
            "quantity": quantity.as_str(),
            "alpha": alpha,
            "tau": tau,
            "pair": pair.as_str(),
            "side": side.map(|s| match s {
                SideChoice::A => "A",
                SideChoice::B => "B",
            }),
            "n": n,
        }),
    );

    let model = SingletModel;
    let quartet = ChshQuartet::new(alpha);
    let cfg = McConfig::new(cli.seed, n);
    let (x, y) = match pair {
        PairChoice::Ab => (quartet.a(), quartet.b()),
        PairChoice::Abp => (quartet.a(), quartet.b_prime()),
        PairChoice::Apb => (quartet.a_prime(), quartet.b()),
        PairChoice::Apbp => (quartet.a_prime(), quartet.b_prime()),
    };

    let estimate: Estimate = match quantity {
        Quantity::Pair => montecarlo::estimate_correlation(&model, &x, &y, cfg),
        Quantity::PairTau => {
            montecarlo::estimate_correlation_at_tau(&model, &x, &y, tau.unwrap(), cfg)
        }
        Quantity::Marginal => {
            let side = match side.unwrap() {
                SideChoice::A => Side::A,
                SideChoice::B => Side::B,
            };
            montecarlo::estimate_marginal(&model, side, &x, &y, cfg)
        }
        Quantity::F => montecarlo::estimate_f(&model, &quartet, cfg, tau),
    };

    println!(
        "mean: {:.10}  stderr: {:.3e}  n: {}  seed: {}",
        estimate.mean, estimate.stderr, estimate.n, cli.seed
    );
    write_json(
        &cli.json,
        &serde_json::json!({
            "quantity": quantity.as_str(),
            "alpha": alpha,
            "tau": tau,
            "mean": estimate.mean,
            "stderr": estimate.stderr,
            "n": estimate.n,
            "seed": cli.seed,
        }),
    )?;
    Ok(0)
}

fn cmd_constants(cli: &Cli) -> anyhow::Result<u8> {
    echo_config(cli, "constants", serde_json::json!({}));

    let at = closedform::alpha_tilde();
    let residual = 4.0 * at + PI * at.sin() * at.sin() - PI;
    let (local, _) = baselines::local_max_f();
    let pr = PrBox::chsh_f();
    let quantum = analysis::QUANTUM_BOUND;

    println!("alpha_tilde:    {at:.12}");
    println!("residual:       {residual:.3e}  (defining equation 4a + pi sin^2 a = pi)");
    println!("quantum_bound:  {quantum:.12}");
    println!("local_bound:    {local}");
    println!("pr_box_F:       {pr}");
    println!(
        "note: the value 0.316 sometimes quoted for alpha_tilde solves \
         4a + pi sin^2 a = pi/2, not = pi; the computed root above is \
         the one consistent with the low-branch singular point at alpha = pi/6."
    );

    write_json(
        &cli.json,
        &serde_json::json!({
            "alpha_tilde": at,
            "residual": residual,
            "quantum_bound": quantum,
            "local_bound": local,
            "pr_box_F": pr,
        }),
    )?;
    Ok(0)
}

fn cmd_sup(cli: &Cli, epsilons: &[f64]) -> anyhow::Result<u8> {
    echo_config(cli, "sup", serde_json::json!({ "epsilons": epsilons }));
    let points = analysis::sup_search(epsilons).map_err(|e| anyhow::anyhow!("sup: {e}"))?;
    println!(
        "{:>12}  {:>12}  {:>16}  {:>18}  {:>18}",
        "epsilon", "alpha", "tau", "F", "abs_F"
    );
    for p in &points {
        println!(
            "{:>12.3e}  {:>12.8}  {:>16.12}  {:>18.12}  {:>18.12}",
            p.epsilon,
            p.alpha,
            p.tau,
            p.f,
            p.f.abs()
        );
    }
    write_json(&cli.json, &serde_json::to_value(&points)?)?;
    Ok(0)
}
