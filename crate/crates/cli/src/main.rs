//! `sigfl`: command-line front end.
//!
//! Exit codes: 0 on success, 2 for bad flags, malformed input or violated
//! preconditions, 3 when the numbers violate a standing assumption.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use sigfl_core::experiments::{self, Experiment, ExperimentConfig, ExperimentReport, Sampling};
use sigfl_core::interconnection::{analyze, classify_theorem1, in_e1, in_e2};
use sigfl_core::io::{self, AnalysisExport};
use sigfl_core::{continuous, informativity, lti, numerics, siggen};
use sigfl_core::{Error, Result, TimeDomain, Vector};

const TOL_ENV: &str = "SIGFL_RANK_TOL";

#[derive(Parser)]
#[command(
    name = "sigfl",
    version,
    about = "Data informativity under signal-generator inputs"
)]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Absolute rank tolerance; overrides the SIGFL_RANK_TOL environment variable.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Largest PE order of a signal (one-column CSV, header `u`).
    PeOrder {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Fit a signal generator to a signal.
    Realize {
        #[arg(long = "in")]
        input: PathBuf,
        /// Generator dimension; defaults to the PE order.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Simulate a discrete-time plant and write a `u,y` CSV.
    Simulate {
        #[arg(long)]
        plant: PathBuf,
        /// Input signal CSV.
        #[arg(long = "in", conflicts_with = "generator")]
        input: Option<PathBuf>,
        /// Generator JSON; its response of length `--T` drives the plant.
        #[arg(long, requires = "t_len")]
        generator: Option<PathBuf>,
        #[arg(long = "T")]
        t_len: Option<usize>,
        /// Initial state, comma separated; zero when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
    },
    /// Rank test of the depth-L input-output Hankel matrix of a trajectory.
    Informativity {
        #[arg(long, required_unless_present = "assumed_n")]
        plant: Option<PathBuf>,
        #[arg(long)]
        traj: PathBuf,
        #[arg(long = "L")]
        l: usize,
        /// Plant order to assume when no plant file is given.
        #[arg(long, conflicts_with = "plant")]
        assumed_n: Option<usize>,
    },
    /// Sylvester solution, moment and exceptional-set tests for a plant/generator pair.
    Sylvester {
        #[arg(long)]
        plant: PathBuf,
        #[arg(long)]
        generator: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        /// Hankel depth used for the partition of Pi.
        #[arg(long = "L")]
        l: Option<usize>,
        /// Data length for the case classification (discrete time).
        #[arg(long = "T")]
        t_len: Option<usize>,
    },
    /// Monte Carlo check of the intermediate case L <= N_g < L + n.
    Theorem1Mc {
        #[command(flatten)]
        dims: DtDims,
        /// Extra trials with initial states in the exceptional set.
        #[arg(long, default_value_t = 0)]
        adversarial: usize,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Monte Carlo over any case of N_g against L and L + n.
    InterconnectionMc {
        #[command(flatten)]
        dims: DtDims,
        #[arg(long, default_value_t = 0)]
        adversarial: usize,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Shortest informative experiment, N_g = n + 1 and T = 3n + 1.
    Corollary2 {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Relaxed versus classical excitation, per plant order.
    WillemsCompare {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Continuous-time informativity from derivative jets.
    CtInformativity {
        #[arg(long)]
        n: usize,
        #[arg(long = "ng")]
        n_g: usize,
        #[arg(long = "L")]
        l: usize,
        /// Number of sample instants; defaults to N_g + n + 2.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_enum, default_value_t = SamplingArg::Chebyshev)]
        sampling: SamplingArg,
        /// Also write the jets of trial 0 as CSV.
        #[arg(long)]
        jets: Option<PathBuf>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// PE order and realizability of random signals.
    Lemma2Mc {
        #[arg(long = "T", value_delimiter = ',', required = true)]
        t_len: Vec<usize>,
        #[command(flatten)]
        mc: McArgs,
    },
}

#[derive(Args)]
struct DtDims {
    #[arg(long)]
    n: usize,
    #[arg(long = "ng")]
    n_g: usize,
    #[arg(long = "L")]
    l: usize,
    /// Data length; defaults to N_g + n + L - 1.
    #[arg(long = "T")]
    t_len: Option<usize>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-trial CSV for plotting.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Omit the wall-time field so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Chebyshev,
    Uniform,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("finite values serialize");
    s.push('\n');
    s
}

fn tolerance(flag: Option<f64>) -> Result<Option<f64>> {
    let tol = match flag {
        Some(t) => Some(t),
        None => match std::env::var(TOL_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{TOL_ENV}='{s}' is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Precondition(format!(
                "rank tolerance must be positive, got {t}"
            )));
        }
    }
    Ok(tol)
}

fn x0_or_zero(x0: Option<Vec<f64>>, n: usize) -> Vector {
    x0.map_or_else(|| Vector::zeros(n), Vector::from_vec)
}

fn summary_table(report: &ExperimentReport) {
    eprintln!(
        "{:<16} {:>7} {:>9} {:>7} {:>11} {:>11}",
        "arm", "trials", "success", "errors", "min margin", "unexplained"
    );
    for arm in &report.arms {
        let s = &arm.summary;
        let margin = s
            .min_margin
            .map_or_else(|| "-".to_string(), |m| format!("{m:.2e}"));
        eprintln!(
            "{:<16} {:>7} {:>9} {:>7} {:>11} {:>11}",
            arm.name, s.trials, s.successes, s.errors, margin, s.unexplained_failures
        );
    }
}

fn run_mc(cfg: &ExperimentConfig, mc: &McArgs, out: Option<&Path>) -> Result<ExperimentReport> {
    let report = experiments::run(cfg)?;
    let text = if mc.no_timing {
        let v: serde_json::Value =
            serde_json::from_str(&report.deterministic_json()).expect("report is valid json");
        pretty(&v)
    } else {
        pretty(&report)
    };
    emit(out, &text)?;
    if let Some(p) = &mc.csv {
        std::fs::write(p, io::report_to_csv(&report)?)?;
    }
    summary_table(&report);
    Ok(report)
}

fn dt_config(exp: Experiment, d: &DtDims, adversarial: usize, mc: &McArgs) -> ExperimentConfig {
    let t_len = d.t_len.unwrap_or(d.n_g + d.n + d.l - 1);
    let mut cfg =
        ExperimentConfig::interconnection(exp, d.n, d.n_g, d.l, t_len, mc.trials, mc.seed);
    cfg.adversarial = adversarial;
    cfg
}

fn execute(cli: Cli) -> Result<()> {
    numerics::set_tolerance_override(tolerance(cli.tol)?);
    let out = cli.out.as_deref();
    match cli.cmd {
        Cmd::PeOrder { input } => {
            let u = io::parse_signal_csv(&io::read_to_string(&input)?)?;
            emit(out, &format!("{}\n", siggen::max_pe_order(&u)))
        }
        Cmd::Realize { input, k } => {
            let u = io::parse_signal_csv(&io::read_to_string(&input)?)?;
            let gen = siggen::realize_from_signal(&u, k)?;
            emit(out, &format!("{}\n", io::generator_to_json(&gen)))
        }
        Cmd::Simulate {
            plant,
            input,
            generator,
            t_len,
            x0,
        } => {
            let plant = io::parse_system_json(&io::read_to_string(&plant)?)?;
            let u = match (input, generator) {
                (Some(p), _) => io::parse_signal_csv(&io::read_to_string(&p)?)?,
                (None, Some(g)) => {
                    let gen = io::parse_generator_json(&io::read_to_string(&g)?)?;
                    siggen::response(&gen, t_len.unwrap_or(0))?
                }
                (None, None) => {
                    return Err(Error::Precondition(
                        "give either --in or --generator".into(),
                    ))
                }
            };
            let traj = lti::simulate_dt(&plant, &u, &x0_or_zero(x0, plant.order()))?;
            emit(out, &io::trajectory_to_csv(&traj)?)
        }
        Cmd::Informativity {
            plant,
            traj,
            l,
            assumed_n,
        } => {
            let traj = io::parse_trajectory_csv(&io::read_to_string(&traj)?)?;
            let verdict = match (plant, assumed_n) {
                (Some(p), _) => {
                    let plant = io::parse_system_json(&io::read_to_string(&p)?)?;
                    informativity::is_informative(&traj, l, &plant)?
                }
                (None, Some(n)) => informativity::is_informative_blind(&traj, l, n)?,
                (None, None) => {
                    return Err(Error::Precondition(
                        "give either --plant or --assumed-n".into(),
                    ))
                }
            };
            emit(out, &pretty(&verdict))
        }
        Cmd::Sylvester {
            plant,
            generator,
            x0,
            l,
            t_len,
        } => {
            let plant = io::parse_system_json(&io::read_to_string(&plant)?)?;
            let gen = io::parse_generator_json(&io::read_to_string(&generator)?)?;
            let x0 = x0_or_zero(x0, plant.order());
            let depth = l.unwrap_or(gen.dim());
            let an = analyze(&plant, &gen, &x0, depth)?;
            let e1 = in_e1(&plant, &an, &x0);
            let e2 = if gen.dim() >= depth {
                Some(in_e2(&plant, &an, &x0, depth)?)
            } else {
                None
            };
            let theorem = match (l, plant.domain(), t_len) {
                (Some(l), TimeDomain::Continuous, _) => {
                    Some(continuous::classify_theorem2(&plant, &gen, &x0, l)?)
                }
                (Some(l), TimeDomain::Discrete, Some(t)) => {
                    Some(classify_theorem1(&plant, &gen, &x0, l, t)?)
                }
                _ => None,
            };
            let body = json!({
                "analysis": AnalysisExport::new(&an, Some(e1), e2),
                "theorem": theorem,
            });
            emit(out, &pretty(&body))
        }
        Cmd::Theorem1Mc {
            dims,
            adversarial,
            mc,
        } => {
            let cfg = dt_config(Experiment::Theorem1Mc, &dims, adversarial, &mc);
            run_mc(&cfg, &mc, out).map(drop)
        }
        Cmd::InterconnectionMc {
            dims,
            adversarial,
            mc,
        } => {
            let cfg = dt_config(Experiment::InterconnectionMc, &dims, adversarial, &mc);
            run_mc(&cfg, &mc, out).map(drop)
        }
        Cmd::Corollary2 { n, mc } => {
            let mut cfg = ExperimentConfig::new(Experiment::Corollary2, mc.trials, mc.seed);
            cfg.n = vec![n];
            run_mc(&cfg, &mc, out).map(drop)
        }
        Cmd::WillemsCompare { n, mc } => {
            let mut cfg = ExperimentConfig::new(Experiment::WillemsCompare, mc.trials, mc.seed);
            cfg.n = n.clone();
            run_mc(&cfg, &mc, out)?;
            for n in n {
                eprintln!("n={n}: data length {} -> {}", 4 * n + 1, 3 * n + 1);
            }
            Ok(())
        }
        Cmd::CtInformativity {
            n,
            n_g,
            l,
            k,
            horizon,
            sampling,
            jets,
            mc,
        } => {
            let mut cfg = ExperimentConfig::new(Experiment::CtInformativity, mc.trials, mc.seed);
            cfg.n = vec![n];
            cfg.n_g = Some(n_g);
            cfg.l = Some(l);
            cfg.k = k;
            cfg.horizon = horizon;
            cfg.sampling = match sampling {
                SamplingArg::Chebyshev => Sampling::Chebyshev,
                SamplingArg::Uniform => Sampling::Uniform,
            };
            run_mc(&cfg, &mc, out)?;
            if let Some(p) = jets {
                let samples = experiments::ct_trial_jets(&cfg, 0)?;
                std::fs::write(p, io::jets_to_csv(&samples)?)?;
            }
            Ok(())
        }
        Cmd::Lemma2Mc { t_len, mc } => {
            let mut cfg = ExperimentConfig::new(Experiment::Lemma2Mc, mc.trials, mc.seed);
            cfg.t_len = t_len;
            run_mc(&cfg, &mc, out).map(drop)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
