//! Session configuration: flags, `key=value` files and defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use voatwist::exponent::Exponent;
use voatwist::rational::{parse_q, Rational};
use voatwist::voa::{ModuleInstance, ModuleKind, Twist, VoaInstance, VoaKind};
use voatwist::zhu::BimoduleMode;

/// A usage error naming the offending flag; the binary exits with code 2.
#[derive(Debug)]
pub struct UsageError {
    /// The flag, configuration key or variable at fault.
    pub flag: String,
    /// What is wrong with it.
    pub message: String,
}

impl UsageError {
    /// Builds an error for `flag`.
    pub fn new(flag: &str, message: impl Into<String>) -> Self {
        UsageError { flag: flag.to_string(), message: message.into() }
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid value for {}: {}", self.flag, self.message)
    }
}

impl std::error::Error for UsageError {}

/// Output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Pretty-printed JSON.
    Json,
    /// LaTeX source.
    Latex,
    /// Plain text lines.
    Text,
}

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug)]
pub struct SessionConfig {
    /// The vertex algebra.
    pub voa: VoaKind,
    /// The automorphism.
    pub twist: Twist,
    /// Global denominator; a multiple of the twist order.
    pub denominator: u32,
    /// Truncation degree, when given.
    pub trunc: Option<Exponent>,
    /// Output format, when given.
    pub format: Option<Format>,
    /// Seed of the random sweeps.
    pub seed: u64,
    /// Output file; standard output when absent.
    pub out: Option<PathBuf>,
    /// Module entries `m1`, `m2`, `m3`, `module`, `mode` from configuration files.
    pub entries: BTreeMap<String, String>,
}

/// Raw `key=value` settings before validation.
#[derive(Clone, Debug, Default)]
pub struct RawSettings(BTreeMap<String, String>);

const KEYS: [&str; 12] = ["voa", "twist", "trunc", "denominator", "format", "seed", "out", "m1", "m2", "m3", "module", "mode"];

impl RawSettings {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self, UsageError> {
        let mut map = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| UsageError::new(origin, format!("line {} is not key=value", no + 1)))?;
            let k = k.trim().trim_start_matches("--").to_string();
            if !KEYS.contains(&k.as_str()) {
                return Err(UsageError::new(origin, format!("unknown key `{k}` on line {}", no + 1)));
            }
            map.insert(k, v.trim().to_string());
        }
        Ok(RawSettings(map))
    }

    /// Reads and parses a file.
    pub fn read(path: &Path, flag: &str) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError::new(flag, format!("{}: {e}", path.display())))?;
        RawSettings::parse(&text, flag)
    }

    /// Sets `key` when `value` is present.
    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v);
        }
    }

    /// Entries of `other` override those of `self`.
    pub fn merged(mut self, other: RawSettings) -> Self {
        self.0.extend(other.0);
        self
    }

    /// Validates every entry.
    pub fn resolve(self) -> Result<SessionConfig, UsageError> {
        let mut map = self.0;
        let voa = match map.remove("voa").as_deref() {
            None | Some("heisenberg") => VoaKind::Heisenberg,
            Some("lattice-a1") => VoaKind::LatticeA1,
            Some(other) => return Err(UsageError::new("--voa", format!("`{other}` is not one of heisenberg, lattice-a1"))),
        };
        let twist = match map.remove("twist").as_deref() {
            None | Some("theta") => Twist::Theta,
            Some("id") | Some("identity") => Twist::Identity,
            Some(other) => return Err(UsageError::new("--twist", format!("`{other}` is not one of id, theta"))),
        };
        let order = match twist {
            Twist::Identity => 1,
            Twist::Theta => 2,
        };
        let denominator = match map.remove("denominator") {
            None => order,
            Some(d) => d.parse::<u32>().ok().filter(|d| *d > 0).ok_or_else(|| UsageError::new("--denominator", format!("`{d}` is not a positive integer")))?,
        };
        if denominator % order != 0 {
            return Err(UsageError::new("--denominator", format!("{denominator} is not divisible by the twist order {order}")));
        }
        let trunc = match map.remove("trunc") {
            None => None,
            Some(t) => {
                let e: Exponent = t.parse().map_err(|_| UsageError::new("--trunc", format!("`{t}` is not a rational number")))?;
                if e.is_negative() {
                    return Err(UsageError::new("--trunc", "the truncation must be nonnegative"));
                }
                if !e.in_lattice(denominator as i64) {
                    return Err(UsageError::new("--trunc", format!("{e} is not a multiple of 1/{denominator}")));
                }
                Some(e)
            }
        };
        let format = match map.remove("format").as_deref() {
            None => None,
            Some("json") => Some(Format::Json),
            Some("latex") => Some(Format::Latex),
            Some("text") => Some(Format::Text),
            Some(other) => return Err(UsageError::new("--format", format!("`{other}` is not one of json, latex, text"))),
        };
        let seed = match map.remove("seed") {
            None => 7,
            Some(s) => s.parse().map_err(|_| UsageError::new("--seed", format!("`{s}` is not an unsigned integer")))?,
        };
        let out = map.remove("out").map(PathBuf::from);
        Ok(SessionConfig { voa, twist, denominator, trunc, format, seed, out, entries: map })
    }
}

impl SessionConfig {
    /// The configured algebra.
    pub fn instance(&self) -> VoaInstance {
        match self.voa {
            VoaKind::Heisenberg => VoaInstance::heisenberg_rank_one(self.twist),
            VoaKind::LatticeA1 => VoaInstance::lattice_a1(self.twist),
        }
    }

    /// The truncation degree, or `default`.
    pub fn trunc_or(&self, default: i64) -> Exponent {
        self.trunc.unwrap_or(Exponent::int(default))
    }

    /// The format, or `default`.
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// A module entry from a flag, the configuration, or `default`.
    pub fn entry(&self, key: &str, flag: Option<&String>, default: &str) -> String {
        flag.cloned().or_else(|| self.entries.get(key).cloned()).unwrap_or_else(|| default.to_string())
    }
}

/// Parses a module name for `voa`.
///
/// Accepted names: `V_L`, `M(1)` or `adjoint`; `V{L+a/2}`; `M(1,q)` for a
/// rational charge `q`; `T+`, `T-` or `twisted`.
pub fn parse_module(voa: &VoaInstance, text: &str, flag: &str) -> Result<ModuleInstance, UsageError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let lattice = *voa.kind() == VoaKind::LatticeA1;
    let twisted = voa.twist() != Twist::Identity;
    let kind = match t.as_str() {
        "adjoint" => ModuleKind::Adjoint,
        "V_L" | "VL" if lattice => ModuleKind::Adjoint,
        "M(1)" if !lattice => ModuleKind::Adjoint,
        "V{L+a/2}" | "V_{L+a/2}" | "half-coset" if lattice => ModuleKind::HalfCoset,
        "T+" | "twisted" if twisted => ModuleKind::Twisted { sign: 1 },
        "M(1)_{Z+1/2}" if twisted && !lattice => ModuleKind::Twisted { sign: 1 },
        "T-" if twisted && lattice => ModuleKind::Twisted { sign: -1 },
        s if !lattice && s.starts_with("M(1,") && s.ends_with(')') => {
            let inner = s["M(1,".len()..s.len() - 1].trim_end_matches('a');
            let c = parse_q(if inner.is_empty() { "1" } else { inner }).map_err(|_| UsageError::new(flag, format!("`{text}` has an unreadable charge")))?;
            ModuleKind::Charged(vec![c])
        }
        _ => return Err(UsageError::new(flag, format!("`{text}` is not a module of the configured algebra and twist"))),
    };
    Ok(voa.module(kind))
}

/// Parses `Ag` or `Bg:q`.
pub fn parse_mode(text: &str) -> Result<BimoduleMode, UsageError> {
    match text.split_once(':') {
        None if text == "Ag" => Ok(BimoduleMode::Ag),
        Some(("Bg", q)) => parse_q(q).map(BimoduleMode::Bg).map_err(|_| UsageError::new("--mode", format!("`{q}` is not a rational number"))),
        _ => Err(UsageError::new("--mode", format!("`{text}` is not Ag or Bg:<rational>"))),
    }
}

/// Parses a rational flag value.
pub fn parse_rational(text: &str, flag: &str) -> Result<Rational, UsageError> {
    parse_q(text).map_err(|_| UsageError::new(flag, format!("`{text}` is not a rational number")))
}
