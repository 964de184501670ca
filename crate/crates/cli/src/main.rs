use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use haltlab::codec::{decode_instance, decode_machine, encode_instance, encode_machine, BitString, Instance};
use haltlab::harness::config::{ExperimentConfig, ExperimentKind, Language, Overrides};
use haltlab::harness::experiment::{acceptor_by_name, reference_for, run_experiment, verify_certificate_files, HarnessError};
use haltlab::languages::decide::{decide_bhp, BhpAnswer};
use haltlab::languages::pool::{curated_cohp_pool, pool_pair, HaltingPair};
use haltlab::levin::{bhp_oracle, levin_search_doubling, schnorr_search_from_decision};
use haltlab::machine::Machine;
use haltlab::runtime::run_measured;
use haltlab::speedup::cap::{detect_runtime_cap, find_hard_pair};

#[derive(Parser)]
#[command(name = "haltlab", version, about = "Bounded halting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where an instance comes from: a `.tm` file, a literal bit string, or a
/// machine (JSON file or pool pair) with an input and a pad length.
#[derive(Args, Clone, Debug)]
struct InstanceArgs {
    /// File holding an encoded instance as 0/1 text.
    #[arg(long, conflicts_with_all = ["bits", "machine", "pool"])]
    tm: Option<PathBuf>,
    /// Encoded instance given inline.
    #[arg(long, conflicts_with_all = ["machine", "pool"])]
    bits: Option<String>,
    /// Machine JSON file.
    #[arg(long, conflicts_with = "pool")]
    machine: Option<PathBuf>,
    /// Machine and input of a pool pair.
    #[arg(long)]
    pool: Option<String>,
    /// Input string x.
    #[arg(long, short = 'x')]
    input: Option<String>,
    /// Pad length t.
    #[arg(long, short = 't', default_value_t = 0)]
    t: u64,
}

/// Experiment flags shared by the sweep verbs.
#[derive(Args, Clone, Debug, Default)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "t-max")]
    t_max: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args, Clone, Debug)]
struct AcceptorArgs {
    /// reference, transformed, shortcut-no-accept, shortcut-dead-start or shortcut-finite-orbit.
    #[arg(long, default_value = "reference")]
    acceptor: String,
    /// Pool pair hardwired into `transformed`.
    #[arg(long, default_value = "loop-right")]
    pair: String,
    /// Use the coDBHP reference instead of coBHP.
    #[arg(long)]
    dbhp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an instance and print it as 0/1 text.
    Encode {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode an instance and print machine, input and pad length as JSON.
    Decode {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Convert a machine between JSON and 0/1 text (by file extension).
    Convert { file: PathBuf },
    /// Decide BHP membership and print a witness path if there is one.
    DecideBhp {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Run one acceptor on an instance and print its run report.
    RunAcceptor {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        acceptor: AcceptorArgs,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Run the reference acceptor and its hardwired transform side by side.
    Transform {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value = "loop-right")]
        pair: String,
        #[arg(long)]
        dbhp: bool,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Look for a runtime cap of an acceptor on a pool pair.
    CapDetect {
        #[command(flatten)]
        acceptor: AcceptorArgs,
        #[arg(long = "t-max", default_value_t = 256)]
        t_max: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// First pool pair on which an acceptor shows no runtime cap.
    FindHardPair {
        #[command(flatten)]
        acceptor: AcceptorArgs,
        #[arg(long = "t-max", default_value_t = 64)]
        t_max: u64,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// b-speedup experiment.
    BSpeedup(ExperimentArgs),
    /// Pad-growth probe experiment.
    StarProbe(ExperimentArgs),
    /// Polynomial dominance experiment.
    Dominance(ExperimentArgs),
    /// Reduction composition experiment.
    ComposeCheck(ExperimentArgs),
    /// Run the experiment named in a config file.
    Experiment(ExperimentArgs),
    /// Levin search on one instance (budget doubling up to --budget).
    LevinSearch {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u64,
    },
    /// Witness search through the BHP decision procedure.
    SchnorrSearch {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Re-validate certificate.json against measurements.csv in a directory.
    SpeedupCert { dir: PathBuf },
    /// List the pool of non-accepting pairs.
    Pool,
}

fn read_bits_file(path: &Path) -> Result<BitString> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.trim().parse().map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn read_machine_json(path: &Path) -> Result<Machine> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

impl InstanceArgs {
    fn resolve(&self) -> Result<Instance> {
        let from_bits = |bits: BitString| decode_instance(&bits).map_err(|e| anyhow!("{e}"));
        if let Some(path) = &self.tm {
            return from_bits(read_bits_file(path)?);
        }
        if let Some(s) = &self.bits {
            return from_bits(s.parse().map_err(|e| anyhow!("{e}"))?);
        }
        let (machine, default_x) = if let Some(path) = &self.machine {
            (read_machine_json(path)?, BitString::default())
        } else if let Some(name) = &self.pool {
            let p = pool_pair(name).ok_or_else(|| anyhow!("no pool pair named {name:?}"))?;
            (p.machine, p.input)
        } else {
            bail!("give an instance with --tm, --bits, --machine or --pool");
        };
        let x = match &self.input {
            Some(s) => s.parse().map_err(|e| anyhow!("{e}"))?,
            None => default_x,
        };
        Ok(Instance::new(machine, x, self.t))
    }
}

impl AcceptorArgs {
    fn resolve(&self) -> Result<(haltlab::runtime::Acceptor, HaltingPair)> {
        let pair = pool_pair(&self.pair).ok_or_else(|| anyhow!("no pool pair named {:?}", self.pair))?;
        let mut cfg = ExperimentConfig::default();
        if self.dbhp {
            cfg.language = Language::Codbhp;
        }
        let a = acceptor_by_name(&self.acceptor, &cfg, &pair)?;
        Ok((a, pair))
    }
}

/// Writes one line to stdout; a closed pipe ends output quietly.
fn emit(line: impl std::fmt::Display) -> Result<()> {
    match writeln!(io::stdout().lock(), "{line}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    emit(serde_json::to_string_pretty(v)?)
}

fn experiment(kind: Option<ExperimentKind>, args: &ExperimentArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(k) = kind {
        cfg.kind = k;
    }
    cfg.apply(&Overrides {
        seed: args.seed,
        t_max: args.t_max,
        out_dir: args.out.clone(),
        budget: args.budget,
    });
    match run_experiment(&cfg) {
        Ok(out) => match out.failure {
            None => {
                print_json(&json!({"experiment": cfg.kind, "status": "pass", "outDir": cfg.out_dir}))?;
                Ok(ExitCode::SUCCESS)
            }
            Some(f) => {
                print_json(&f)?;
                Ok(ExitCode::FAILURE)
            }
        },
        Err(HarnessError::Config(e)) => {
            print_json(&json!({"experiment": cfg.kind, "invariant": "ConfigInvalid", "problems": e.problems}))?;
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Encode { instance, out } => {
            let bits = instance.resolve()?.encoded().to_string();
            match out {
                Some(path) => fs::write(&path, format!("{bits}\n")).with_context(|| format!("writing {}", path.display()))?,
                None => emit(bits)?,
            }
        }
        Command::Decode { instance } => {
            let i = instance.resolve()?;
            print_json(&json!({
                "machine": i.machine(),
                "input": i.input(),
                "t": i.bound(),
                "prefixLength": i.prefix_len(),
                "length": i.encoded().len(),
            }))?;
        }
        Command::Convert { file } => match file.extension().and_then(|e| e.to_str()) {
            Some("json") => emit(encode_machine(&read_machine_json(&file)?))?,
            Some("tm") => {
                let m = decode_machine(&read_bits_file(&file)?).map_err(|e| anyhow!("{e}"))?;
                print_json(&m)?;
            }
            _ => bail!("expected a .json or .tm file"),
        },
        Command::DecideBhp { instance, budget } => {
            let i = instance.resolve()?;
            let out = match decide_bhp(&i, budget)? {
                BhpAnswer::Yes(path) => json!({"answer": "yes", "path": path}),
                BhpAnswer::No => json!({"answer": "no"}),
            };
            print_json(&out)?;
        }
        Command::RunAcceptor { instance, acceptor, budget } => {
            let i = instance.resolve()?;
            let (a, _) = acceptor.resolve()?;
            let mut r = run_measured(&a, i.encoded(), budget);
            r.reads.clear();
            print_json(&r)?;
        }
        Command::Transform { instance, pair, dbhp, budget } => {
            let i = instance.resolve()?;
            let args = AcceptorArgs {
                acceptor: "transformed".into(),
                pair,
                dbhp,
            };
            let (fast, pair) = args.resolve()?;
            let language = if dbhp { Language::Codbhp } else { Language::Cobhp };
            let base = reference_for(language, 1_000_000);
            let mut rb = run_measured(&base, i.encoded(), budget);
            let mut rf = run_measured(&fast, i.encoded(), budget);
            rb.reads.clear();
            rf.reads.clear();
            let on_s = pair.same_pair(i.machine(), i.input());
            print_json(&json!({"pair": pair.name, "onS": on_s, "base": rb, "transformed": rf}))?;
        }
        Command::CapDetect { acceptor, t_max, budget } => {
            let (a, pair) = acceptor.resolve()?;
            let rep = detect_runtime_cap(&a, &pair.machine, &pair.input, t_max, budget);
            print_json(&json!({"acceptor": a.name(), "pair": pair.name, "cap": rep}))?;
            if !rep.confirmed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::FindHardPair { acceptor, t_max, budget } => {
            let (a, _) = acceptor.resolve()?;
            print_json(&find_hard_pair(&a, &curated_cohp_pool(), t_max, budget))?;
        }
        Command::BSpeedup(args) => return experiment(Some(ExperimentKind::BSpeedup), &args),
        Command::StarProbe(args) => return experiment(Some(ExperimentKind::StarProbe), &args),
        Command::Dominance(args) => return experiment(Some(ExperimentKind::Dominance), &args),
        Command::ComposeCheck(args) => return experiment(Some(ExperimentKind::ComposeCheck), &args),
        Command::Experiment(args) => return experiment(None, &args),
        Command::LevinSearch { instance, budget } => {
            let i = instance.resolve()?;
            print_json(&levin_search_doubling(&i, 1 << 10, budget))?;
        }
        Command::SchnorrSearch { instance, budget } => {
            let i = instance.resolve()?;
            print_json(&schnorr_search_from_decision(&i, bhp_oracle(budget))?)?;
        }
        Command::SpeedupCert { dir } => match verify_certificate_files(&dir) {
            Ok(cert) => print_json(&json!({
                "status": "valid",
                "constantC": cert.constant_c,
                "additiveCs": cert.additive_cs,
                "onS": cert.on_s.len(),
                "offS": cert.off_s.len(),
            }))?,
            Err(e) => {
                print_json(&json!({"status": "invalid", "reason": e.to_string()}))?;
                return Ok(ExitCode::FAILURE);
            }
        },
        Command::Pool => {
            let names: Vec<_> = curated_cohp_pool()
                .into_iter()
                .map(|p| json!({"name": p.name, "proof": p.proof.tag(), "pair": encode_instance(&p.machine, &p.input, 0).to_string()}))
                .collect();
            print_json(&names)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
