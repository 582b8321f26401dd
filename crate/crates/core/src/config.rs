//! Plain-text run configuration.
//!
//! A run is described by a line-oriented `key = value` document with two
//! optional-to-one sections for the initial state:
//!
//! ```text
//! representation = positive_p
//! kappa = 0.4
//! t_final = 12.5
//! trajectories = 100000
//! seed = 1
//!
//! [initial.excited]
//! type = fock
//! n = 1
//! ```
//!
//! `#` starts a comment. Omitted optional keys take the documented defaults:
//! scheme = stratonovich, wigner_drift_variant = fpe_consistent,
//! sample_stride = 100, dt = 10⁻³/κ, divergence_threshold = 1e6,
//! max_divergent_fraction = 1e-3, and a vacuum ground mode when
//! [initial.ground] is absent. [initial.excited] is required. Parse errors
//! name the offending key and line.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::engine::{Scheme, SimulationConfig};
use crate::phase::Representation;
use crate::samplers::{InitialStateSpec, ModeState};
use crate::wigner::WignerDriftVariant;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key = value")]
    Malformed { line: usize },
    #[error("line {line}: unknown section \"{section}\"")]
    UnknownSection { section: String, line: usize },
    #[error("line {line}: unknown key \"{key}\"")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: duplicate key \"{key}\"")]
    DuplicateKey { key: String, line: usize },
    #[error("line {line}: bad value for \"{key}\": {reason}")]
    BadValue {
        key: String,
        line: usize,
        reason: String,
    },
    #[error("missing required key \"{key}\"")]
    MissingKey { key: String },
    #[error("\"{key}\" out of range: {reason}")]
    OutOfRange { key: String, reason: String },
    #[error("invalid combination: {reason}")]
    InvalidCombination { reason: String },
}

/// One parsed `key = value` occurrence.
#[derive(Debug, Clone)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
struct Sections {
    top: Vec<Entry>,
    ground: Vec<Entry>,
    excited: Vec<Entry>,
}

fn split_sections(text: &str) -> Result<Sections, ConfigError> {
    let mut sections = Sections::default();
    let mut current: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        if let Some(name) = stripped.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or(ConfigError::Malformed { line })?
                .trim();
            current = match name {
                "initial.ground" => Some("ground"),
                "initial.excited" => Some("excited"),
                _ => {
                    return Err(ConfigError::UnknownSection {
                        section: name.to_string(),
                        line,
                    })
                }
            };
            continue;
        }
        let (key, value) = stripped
            .split_once('=')
            .ok_or(ConfigError::Malformed { line })?;
        let entry = Entry {
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line,
        };
        let bucket = match current {
            None => &mut sections.top,
            Some("ground") => &mut sections.ground,
            Some(_) => &mut sections.excited,
        };
        if bucket.iter().any(|e| e.key == entry.key) {
            return Err(ConfigError::DuplicateKey {
                key: entry.key,
                line,
            });
        }
        bucket.push(entry);
    }
    Ok(sections)
}

fn take(entries: &mut Vec<Entry>, key: &str) -> Option<Entry> {
    entries
        .iter()
        .position(|e| e.key == key)
        .map(|i| entries.remove(i))
}

fn parse_f64(e: &Entry) -> Result<f64, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::BadValue {
        key: e.key.clone(),
        line: e.line,
        reason: "not a number".into(),
    })
}

fn parse_u64(e: &Entry) -> Result<u64, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::BadValue {
        key: e.key.clone(),
        line: e.line,
        reason: "not a non-negative integer".into(),
    })
}

fn bad_choice(e: &Entry, choices: &str) -> ConfigError {
    ConfigError::BadValue {
        key: e.key.clone(),
        line: e.line,
        reason: format!("expected one of: {choices}"),
    }
}

fn build_mode(mut entries: Vec<Entry>, section: &str) -> Result<ModeState, ConfigError> {
    let type_entry = take(&mut entries, "type").ok_or(ConfigError::MissingKey {
        key: format!("{section}.type"),
    })?;
    let mut opt_f64 = |key: &str| -> Result<Option<f64>, ConfigError> {
        take(&mut entries, key).map(|e| parse_f64(&e)).transpose()
    };
    let mode = match type_entry.value.as_str() {
        "coherent" => {
            let re = opt_f64("amplitude_re")?.unwrap_or(0.0);
            let im = opt_f64("amplitude_im")?.unwrap_or(0.0);
            ModeState::Coherent {
                amplitude: C64::new(re, im),
            }
        }
        "fock" => {
            let e = take(&mut entries, "n").ok_or(ConfigError::MissingKey {
                key: format!("{section}.n"),
            })?;
            let n = parse_u64(&e)?;
            let n = u32::try_from(n).map_err(|_| ConfigError::BadValue {
                key: e.key.clone(),
                line: e.line,
                reason: "too large".into(),
            })?;
            ModeState::Fock { n }
        }
        "thermal" => {
            let re = opt_f64("displacement_re")?.unwrap_or(0.0);
            let im = opt_f64("displacement_im")?.unwrap_or(0.0);
            let e = take(&mut entries, "nbar").ok_or(ConfigError::MissingKey {
                key: format!("{section}.nbar"),
            })?;
            let nbar = parse_f64(&e)?;
            if nbar < 0.0 {
                return Err(ConfigError::OutOfRange {
                    key: format!("{section}.nbar"),
                    reason: "must be ≥ 0".into(),
                });
            }
            ModeState::DisplacedThermal {
                displacement: C64::new(re, im),
                nbar,
            }
        }
        _ => return Err(bad_choice(&type_entry, "coherent, fock, thermal")),
    };
    if let Some(extra) = entries.first() {
        return Err(ConfigError::UnknownKey {
            key: format!("{}.{}", section, extra.key),
            line: extra.line,
        });
    }
    Ok(mode)
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let mut sections = split_sections(text)?;
    let top = &mut sections.top;

    let required = |entry: Option<Entry>, key: &str| {
        entry.ok_or(ConfigError::MissingKey { key: key.into() })
    };

    let repr_entry = required(take(top, "representation"), "representation")?;
    let representation = match repr_entry.value.as_str() {
        "positive_p" => Representation::PositiveP,
        "wigner" => Representation::TruncatedWigner,
        _ => return Err(bad_choice(&repr_entry, "positive_p, wigner")),
    };

    let scheme = match take(top, "scheme") {
        None => Scheme::Stratonovich,
        Some(e) => match e.value.as_str() {
            "ito" => Scheme::Ito,
            "stratonovich" => Scheme::Stratonovich,
            _ => return Err(bad_choice(&e, "ito, stratonovich")),
        },
    };

    let wigner_drift_variant = match take(top, "wigner_drift_variant") {
        None => WignerDriftVariant::FpeConsistent,
        Some(e) => match e.value.as_str() {
            "fpe_consistent" => WignerDriftVariant::FpeConsistent,
            "paper_verbatim" => WignerDriftVariant::PaperVerbatim,
            _ => return Err(bad_choice(&e, "fpe_consistent, paper_verbatim")),
        },
    };

    let kappa = parse_f64(&required(take(top, "kappa"), "kappa")?)?;
    let t_final = parse_f64(&required(take(top, "t_final"), "t_final")?)?;
    let trajectories = parse_u64(&required(take(top, "trajectories"), "trajectories")?)?;
    let seed = parse_u64(&required(take(top, "seed"), "seed")?)?;
    let dt = match take(top, "dt") {
        None => 1e-3 / kappa,
        Some(e) => parse_f64(&e)?,
    };
    let sample_stride = match take(top, "sample_stride") {
        None => 100,
        Some(e) => parse_u64(&e)?,
    };
    let divergence_threshold = match take(top, "divergence_threshold") {
        None => 1e6,
        Some(e) => parse_f64(&e)?,
    };
    let max_divergent_fraction = match take(top, "max_divergent_fraction") {
        None => 1e-3,
        Some(e) => parse_f64(&e)?,
    };

    if let Some(extra) = top.first() {
        return Err(ConfigError::UnknownKey {
            key: extra.key.clone(),
            line: extra.line,
        });
    }

    let ground = if sections.ground.is_empty() {
        ModeState::Coherent {
            amplitude: C64::new(0.0, 0.0),
        }
    } else {
        build_mode(std::mem::take(&mut sections.ground), "initial.ground")?
    };
    if sections.excited.is_empty() {
        return Err(ConfigError::MissingKey {
            key: "initial.excited".into(),
        });
    }
    let excited = build_mode(std::mem::take(&mut sections.excited), "initial.excited")?;

    let config = SimulationConfig {
        representation,
        scheme,
        wigner_drift_variant,
        kappa,
        t_final,
        dt,
        sample_stride,
        trajectories,
        seed,
        divergence_threshold,
        max_divergent_fraction,
        initial_state: InitialStateSpec { ground, excited },
    };
    config.validate()?;
    Ok(config)
}

fn emit_mode(out: &mut String, section: &str, mode: &ModeState) {
    let _ = writeln!(out, "[{section}]");
    match *mode {
        ModeState::Coherent { amplitude } => {
            let _ = writeln!(out, "type = coherent");
            let _ = writeln!(out, "amplitude_re = {}", amplitude.re);
            let _ = writeln!(out, "amplitude_im = {}", amplitude.im);
        }
        ModeState::Fock { n } => {
            let _ = writeln!(out, "type = fock");
            let _ = writeln!(out, "n = {n}");
        }
        ModeState::DisplacedThermal { displacement, nbar } => {
            let _ = writeln!(out, "type = thermal");
            let _ = writeln!(out, "displacement_re = {}", displacement.re);
            let _ = writeln!(out, "displacement_im = {}", displacement.im);
            let _ = writeln!(out, "nbar = {nbar}");
        }
    }
}

/// Renders a config as a document parse_config accepts, all keys explicit.
pub fn emit_config(config: &SimulationConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "representation = {}", config.representation.as_str());
    let _ = writeln!(out, "scheme = {}", config.scheme.as_str());
    let _ = writeln!(
        out,
        "wigner_drift_variant = {}",
        config.wigner_drift_variant.as_str()
    );
    let _ = writeln!(out, "kappa = {}", config.kappa);
    let _ = writeln!(out, "t_final = {}", config.t_final);
    let _ = writeln!(out, "dt = {}", config.dt);
    let _ = writeln!(out, "sample_stride = {}", config.sample_stride);
    let _ = writeln!(out, "trajectories = {}", config.trajectories);
    let _ = writeln!(out, "seed = {}", config.seed);
    let _ = writeln!(
        out,
        "divergence_threshold = {}",
        config.divergence_threshold
    );
    let _ = writeln!(
        out,
        "max_divergent_fraction = {}",
        config.max_divergent_fraction
    );
    out.push('\n');
    emit_mode(&mut out, "initial.ground", &config.initial_state.ground);
    out.push('\n');
    emit_mode(&mut out, "initial.excited", &config.initial_state.excited);
    out
}
