use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use keylease::abeskl::{qabe_params, Abe1Params, Abe1Scheme, QabeParams, QabeScheme, SecurityMode};
use keylease::coic::CoicParams;
use keylease::skl::{GlScheme, SklParams, SklScheme};
use keylease::BitString;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    /// Single-block leasing PKE.
    Basic,
    /// Parallel repetition over `--lambda-blocks` blocks.
    Ow,
    /// Single-bit scheme over the parallel repetition.
    Ind,
    /// One-key ABE with an equality relation.
    Abe1,
    /// q-bounded ABE.
    Qabe,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Basic => "basic",
            SchemeKind::Ow => "ow",
            SchemeKind::Ind => "ind",
            SchemeKind::Abe1 => "abe1",
            SchemeKind::Qabe => "qabe",
        }
    }

    fn has_identity(self) -> bool {
        matches!(self, SchemeKind::Abe1 | SchemeKind::Qabe)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Selective,
    Adaptive,
}

impl From<ModeArg> for SecurityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Selective => SecurityMode::Selective,
            ModeArg::Adaptive => SecurityMode::Adaptive,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Scheme; for commands reading files it must match the files.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeKind>,
    /// Number of superposed key blocks (qabe: the security parameter).
    #[arg(long, default_value_t = 1)]
    pub lambda_blocks: usize,
    /// Message bits per block.
    #[arg(long, default_value_t = 16)]
    pub msg_bits: usize,
    /// Identity length for the ABE schemes.
    #[arg(long, default_value_t = 4)]
    pub id_bits: usize,
    /// Number of keys the qabe scheme tolerates.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Selective)]
    pub mode: ModeArg,
    /// All randomness is derived from this seed.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Output path (a directory for keygen).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

/// Scheme configuration recorded in every file the tool writes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub scheme: SchemeKind,
    pub lambda_blocks: usize,
    pub msg_bits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_bits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SecurityMode>,
    /// Identity keys are issued for and messages are encrypted to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<BitString>,
}

impl Config {
    /// Configuration from flags; `identity` is only set for ABE schemes.
    pub fn from_args(args: &CommonArgs, identity: Option<BitString>) -> Result<Self> {
        let Some(scheme) = args.scheme else {
            bail!("--scheme is required for this command");
        };
        if args.lambda_blocks == 0 {
            bail!("--lambda-blocks must be at least 1");
        }
        if matches!(scheme, SchemeKind::Basic | SchemeKind::Abe1) && args.lambda_blocks != 1 {
            bail!("scheme `{}` has exactly one block; drop --lambda-blocks", scheme.name());
        }
        let abe = scheme.has_identity();
        let qabe = scheme == SchemeKind::Qabe;
        Ok(Self {
            scheme,
            lambda_blocks: args.lambda_blocks,
            msg_bits: args.msg_bits,
            id_bits: abe.then_some(args.id_bits),
            q: qabe.then_some(args.q),
            mode: qabe.then_some(args.mode.into()),
            identity: if abe { identity } else { None },
        })
    }

    fn identity(&self) -> Result<BitString> {
        match (&self.identity, self.id_bits) {
            (Some(y), Some(n)) if y.len() == n => Ok(y.clone()),
            (Some(y), Some(n)) => bail!("field `identity` has {} bits, `id_bits` says {n}", y.len()),
            _ => bail!("field `identity` is missing for scheme `{}`", self.scheme.name()),
        }
    }

    pub fn build(&self) -> Result<Built> {
        let coic = CoicParams {
            msg_bits: self.msg_bits,
            ..CoicParams::default()
        };
        let skl = SklParams {
            blocks: self.lambda_blocks,
            coic,
        };
        Ok(match self.scheme {
            SchemeKind::Basic | SchemeKind::Ow => Built::Skl(SklScheme { params: skl }),
            SchemeKind::Ind => Built::Gl(GlScheme { params: skl }),
            SchemeKind::Abe1 => {
                let identity = self.identity()?;
                Built::Abe1(Abe1Scheme {
                    params: Abe1Params::new(identity.len(), self.msg_bits),
                    identity,
                })
            }
            SchemeKind::Qabe => {
                let identity = self.identity()?;
                let (Some(q), Some(mode)) = (self.q, self.mode) else {
                    bail!("fields `q` and `mode` are required for scheme `qabe`");
                };
                let (v, w) = qabe_params(mode, self.lambda_blocks, q, identity.len());
                Built::Qabe(QabeScheme {
                    params: QabeParams {
                        v,
                        w,
                        inner: Abe1Params::new(identity.len(), self.msg_bits),
                    },
                    identity,
                })
            }
        })
    }
}

pub enum Built {
    Skl(SklScheme),
    Gl(GlScheme),
    Abe1(Abe1Scheme),
    Qabe(QabeScheme),
}

/// Runs `$body` with `$s` bound to the concrete scheme.
#[macro_export]
macro_rules! dispatch {
    ($built:expr, $s:ident => $body:expr) => {
        match $built {
            $crate::config::Built::Skl($s) => $body,
            $crate::config::Built::Gl($s) => $body,
            $crate::config::Built::Abe1($s) => $body,
            $crate::config::Built::Qabe($s) => $body,
        }
    };
}
