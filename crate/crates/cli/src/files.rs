//! On-disk envelopes. Every file carries its kind and the scheme
//! configuration; decryption-key files also carry a banner marking them as
//! simulator state rather than key material.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use keylease::skl::QuantumKey;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::Config;

pub const BANNER: &str = "SIMULATED-QUANTUM-STATE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    EncryptionKey,
    DecryptionKey,
    VerificationKey,
    Ciphertext,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::EncryptionKey => "encryption_key",
            Kind::DecryptionKey => "decryption_key",
            Kind::VerificationKey => "verification_key",
            Kind::Ciphertext => "ciphertext",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    banner: Option<String>,
    kind: Kind,
    config: Config,
    body: T,
}

/// Body of a decryption-key file: the classical part and the simulated state.
#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "A: DeserializeOwned", serialize = "A: Serialize"))]
pub struct KeyBody<A> {
    pub aux: A,
    pub state: QuantumKey,
}

pub fn write<T: Serialize>(path: &Path, kind: Kind, config: &Config, body: &T) -> Result<()> {
    let env = Envelope {
        banner: (kind == Kind::DecryptionKey).then(|| BANNER.to_string()),
        kind,
        config: config.clone(),
        body,
    };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Reads the header of a file: its configuration, after checking the kind
/// and banner.
pub fn read_config(path: &Path, kind: Kind) -> Result<Config> {
    let env: Envelope<serde::de::IgnoredAny> = parse(path)?;
    check_header(path, kind, env.kind, env.banner.as_deref())?;
    Ok(env.config)
}

pub fn read_body<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let env: Envelope<serde_json::Value> = parse(path)?;
    serde_json::from_value(env.body).map_err(|e| anyhow!("{}: field `body`: {e}", path.display()))
}

fn parse<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn check_header(path: &Path, want: Kind, got: Kind, banner: Option<&str>) -> Result<()> {
    if want != got {
        bail!(
            "{}: field `kind` is `{}`, expected `{}`",
            path.display(),
            got.name(),
            want.name()
        );
    }
    if want == Kind::DecryptionKey && banner != Some(BANNER) {
        bail!("{}: field `banner` must be {BANNER:?}", path.display());
    }
    Ok(())
}

/// Checks that all files were produced for the same scheme configuration.
pub fn same_config(files: &[(&Path, &Config)]) -> Result<Config> {
    let (first_path, first) = files[0];
    for (path, c) in &files[1..] {
        if c.scheme != first.scheme {
            bail!(
                "scheme mismatch: {} is for `{}` but {} is for `{}`",
                first_path.display(),
                first.scheme.name(),
                path.display(),
                c.scheme.name()
            );
        }
        if *c != first {
            bail!(
                "configuration mismatch between {} and {} (same scheme, different parameters)",
                first_path.display(),
                path.display()
            );
        }
    }
    Ok(first.clone())
}
