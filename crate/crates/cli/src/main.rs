//! `keylease`: key lifecycle, lease return and attack simulation on the
//! command line. Keys and ciphertexts are JSON files; messages are hex.

mod config;
mod files;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use keylease::coic::CoicParams;
use keylease::harness::{
    run_coic, run_ind_kla, run_omur, run_ow_kla, run_verification, BenchRow, CoicStrategy, ExperimentReport,
    OracleWindow, Strategy,
};
use keylease::skl::{LeasingScheme, OmurScheme};
use keylease::BitString;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use config::{Built, CommonArgs, Config};
use files::{KeyBody, Kind};

#[derive(Parser)]
#[command(name = "keylease", version, about = "Secure key leasing on a simulated quantum key")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key triple; writes ek.json, qdk.json and vk.json into --out.
    Keygen {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Encrypt a hex message; writes the ciphertext to --out (default ct.json).
    Encrypt {
        ek: PathBuf,
        message: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decrypt and print the hex plaintext; the updated key goes to --out
    /// (default: overwrite the key file).
    Decrypt {
        qdk: PathBuf,
        ct: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Return a leased key for verification; prints ⊤ or ⊥ and writes the
    /// post-verification state to --out (default returned_qdk.json).
    LeaseReturn {
        vk: PathBuf,
        qdk: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run an attack experiment and print its JSON report.
    ///
    /// GAME is one of verification (default), ow-kla, ind-kla, omur, coic or
    /// coic-anytime. The coic games take the strategies random_guess,
    /// measure_decrypt_one_branch, coherent_consistency_test and double_query;
    /// the others take honest, measure_keep, partial_measure:K, never_return,
    /// measure_clone_twice and junk_key.
    Attack {
        strategy: String,
        game: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every strategy through verification and print a table.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Outcome distinguishable by exit code.
enum Outcome {
    Done,
    Rejected,
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Keygen { common } => keygen(&common),
        Command::Encrypt { ek, message, common } => encrypt(&common, &ek, &message),
        Command::Decrypt { qdk, ct, common } => decrypt(&common, &qdk, &ct),
        Command::LeaseReturn { vk, qdk, common } => lease_return(&common, &vk, &qdk),
        Command::Attack { strategy, game, common } => attack(&common, &strategy, game.as_deref().unwrap_or("verification")),
        Command::Bench { common } => bench(&common),
    }
}

/// Reads the configurations of `paths`, checks they agree with each other and
/// with `--scheme` if given.
fn load_config(common: &CommonArgs, paths: &[(&Path, Kind)]) -> Result<Config> {
    let configs = paths
        .iter()
        .map(|(p, k)| files::read_config(p, *k))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<_> = paths.iter().map(|(p, _)| *p).zip(&configs).collect();
    let config = files::same_config(&pairs)?;
    if let Some(s) = common.scheme {
        if s != config.scheme {
            bail!(
                "scheme mismatch: --scheme {} but {} is for `{}`",
                s.name(),
                paths[0].0.display(),
                config.scheme.name()
            );
        }
    }
    Ok(config)
}

/// Parses exactly `ceil(len / 4)` hex digits; the leading padding bits must be
/// zero.
fn parse_message(hex: &str, len: usize) -> Result<BitString> {
    let digits = len.div_ceil(4);
    if hex.len() != digits {
        bail!("message must be {digits} hex digits for {len} bits, got {}", hex.len());
    }
    let bits = BitString::from_hex_digits(hex)?;
    let pad = bits.len() - len;
    if bits.slice(0..pad).iter().any(|b| b) {
        bail!("message {hex} does not fit in {len} bits");
    }
    Ok(bits.slice(pad..bits.len()))
}

fn keygen(common: &CommonArgs) -> Result<Outcome> {
    let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
    let identity = Some(BitString::random(common.id_bits, &mut rng));
    let config = Config::from_args(common, identity)?;
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    dispatch!(config.build()?, s => {
        let k = s.keygen(&mut rng)?;
        files::write(&dir.join("ek.json"), Kind::EncryptionKey, &config, &k.ek)?;
        files::write(&dir.join("qdk.json"), Kind::DecryptionKey, &config, &KeyBody { aux: k.aux, state: k.qdk })?;
        files::write(&dir.join("vk.json"), Kind::VerificationKey, &config, &k.vk)?;
    });
    println!("wrote ek.json, qdk.json and vk.json to {}", dir.display());
    Ok(Outcome::Done)
}

fn encrypt(common: &CommonArgs, ek_path: &Path, message: &str) -> Result<Outcome> {
    let config = load_config(common, &[(ek_path, Kind::EncryptionKey)])?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("ct.json"));
    let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
    dispatch!(config.build()?, s => {
        let ek = files::read_body(ek_path)?;
        let m = parse_message(message, s.message_bits())?;
        let ct = s.encrypt(&ek, &m, &mut rng)?;
        files::write(&out, Kind::Ciphertext, &config, &ct)?;
    });
    println!("wrote {}", out.display());
    Ok(Outcome::Done)
}

fn decrypt(common: &CommonArgs, qdk_path: &Path, ct_path: &Path) -> Result<Outcome> {
    let config = load_config(common, &[(qdk_path, Kind::DecryptionKey), (ct_path, Kind::Ciphertext)])?;
    let out = common.out.clone().unwrap_or_else(|| qdk_path.to_path_buf());
    let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
    let plaintext = dispatch!(config.build()?, s => {
        let key = read_key(&s, qdk_path)?;
        let ct = files::read_body(ct_path)?;
        let (m, post) = s.decrypt(&key.aux, &key.state, &ct, &mut rng)?;
        files::write(&out, Kind::DecryptionKey, &config, &KeyBody { aux: key.aux, state: post })?;
        m
    });
    match plaintext {
        Some(m) => {
            println!("{}", m.to_hex_digits());
            Ok(Outcome::Done)
        }
        None => bail!("decryption produced no message"),
    }
}

fn read_key<S: LeasingScheme>(_: &S, path: &Path) -> Result<KeyBody<S::Aux>> {
    files::read_body(path)
}

fn lease_return(common: &CommonArgs, vk_path: &Path, qdk_path: &Path) -> Result<Outcome> {
    let config = load_config(common, &[(vk_path, Kind::VerificationKey), (qdk_path, Kind::DecryptionKey)])?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("returned_qdk.json"));
    let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
    let accepted = dispatch!(config.build()?, s => {
        let vk = files::read_body(vk_path)?;
        let key = read_key(&s, qdk_path)?;
        let outcome = s.verify(&vk, &key.state, &mut rng)?;
        files::write(&out, Kind::DecryptionKey, &config, &KeyBody { aux: key.aux, state: outcome.post_key })?;
        outcome.accepted
    });
    if accepted {
        println!("⊤");
        Ok(Outcome::Done)
    } else {
        println!("⊥");
        Ok(Outcome::Rejected)
    }
}

/// Configuration for the experiment commands; ABE identities are drawn from
/// the seed.
fn experiment_config(common: &CommonArgs) -> Result<Config> {
    let mut rng = ChaCha20Rng::seed_from_u64(common.seed);
    Config::from_args(common, Some(BitString::random(common.id_bits, &mut rng)))
}

fn attack(common: &CommonArgs, strategy: &str, game: &str) -> Result<Outcome> {
    let config = experiment_config(common)?;
    let (trials, seed) = (common.trials, common.seed);
    let report = match game {
        "coic" | "coic-anytime" => {
            let strategy: CoicStrategy = strategy.parse()?;
            let window = if game == "coic" {
                OracleWindow::BeforeChallenge
            } else {
                OracleWindow::Anytime
            };
            let params = CoicParams {
                msg_bits: config.msg_bits,
                ..CoicParams::default()
            };
            run_coic(&params, strategy, window, trials, seed)?
        }
        _ => {
            let strategy: Strategy = strategy.parse()?;
            run_game(config.build()?, game, strategy, trials, seed)?
        }
    };
    emit_report(common, &report)?;
    Ok(Outcome::Done)
}

fn run_game(built: Built, game: &str, strategy: Strategy, trials: u64, seed: u64) -> Result<ExperimentReport> {
    if game == "omur" {
        return Ok(match built {
            Built::Skl(s) => run_omur(&OmurScheme::new(s), strategy, trials, seed)?,
            Built::Gl(s) => run_omur(&OmurScheme::new(s), strategy, trials, seed)?,
            Built::Abe1(_) | Built::Qabe(_) => bail!("the omur game needs a scheme without a classical key part"),
        });
    }
    Ok(dispatch!(built, s => match game {
        "verification" => run_verification(&s, strategy, trials, seed)?,
        "ow-kla" => run_ow_kla(&s, strategy, trials, seed)?,
        "ind-kla" => run_ind_kla(&s, strategy, trials, seed)?,
        other => bail!("unknown game {other:?}"),
    }))
}

fn emit_report(common: &CommonArgs, report: &ExperimentReport) -> Result<()> {
    let json = report.to_json()?;
    if let Some(out) = &common.out {
        fs::write(out, format!("{json}\n")).with_context(|| format!("writing {}", out.display()))?;
    }
    println!("{json}");
    Ok(())
}

fn bench(common: &CommonArgs) -> Result<Outcome> {
    let config = experiment_config(common)?;
    let built = config.build()?;
    let blocks = dispatch!(&built, s => s.blocks());
    let mut strategies = vec![Strategy::Honest, Strategy::MeasureKeep];
    strategies.extend((1..blocks).map(Strategy::PartialMeasure));
    strategies.extend([Strategy::NeverReturn, Strategy::JunkKey]);
    let rows = strategies
        .iter()
        .map(|&st| {
            let r = dispatch!(&built, s => run_verification(s, st, common.trials, common.seed)?);
            Ok(BenchRow::from(&r))
        })
        .collect::<Result<Vec<_>>>()?;
    println!("{:<20} {:>10} {:>10}   95% CI", "strategy", "analytic", "empirical");
    for r in &rows {
        let analytic = r.analytic.map_or_else(|| "-".to_string(), |a| format!("{a:.6}"));
        println!(
            "{:<20} {:>10} {:>10.6}   [{:.6}, {:.6}]",
            r.strategy, analytic, r.empirical, r.wilson_ci_95.0, r.wilson_ci_95.1
        );
    }
    if let Some(out) = &common.out {
        let json = serde_json::to_string_pretty(&rows)?;
        fs::write(out, format!("{json}\n")).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(Outcome::Done)
}
