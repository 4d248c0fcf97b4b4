//! Run configuration: a flat sectioned key = value text format.
//!
//! ```text
//! [group]
//! kind = free-abelian        # or: free
//! rank = 1
//! generators = t
//!
//! [chain]
//! level = t^2                # generators of Γ_1, comma separated
//! level = t^4
//!
//! [chain2]                   # optional second chain for `factor`
//! level = t^4
//!
//! [run]
//! depth = 2                  # defaults to the chain length
//! ball_radius = 7
//! window_level = 1           # window = D_window_level, defaults to depth-1
//! test_radius = 15
//! sample_radius = 64
//! period_level = 2
//! period_radius = 15
//! tolerance = 1/1000000000
//! max_states = 10000
//! core_cap = 1000000
//! ```
//!
//! `#` starts a comment; blank lines are ignored.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::coset::{DEFAULT_CORE_CAP, DEFAULT_MAX_STATES};
use crate::word::{parse_word, GroupDescriptor, GroupKind, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("syntax error at line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("bad config field `{field}`: {reason}")]
    Semantic { field: String, reason: String },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub group: GroupDescriptor,
    pub chain_gens: Vec<Vec<Word>>,
    pub chain2_gens: Option<Vec<Vec<Word>>>,
    pub depth: usize,
    pub ball_radius: usize,
    pub window_level: usize,
    /// towers and sample closure stop at this level (<= window_level)
    pub tower_level: usize,
    pub test_radius: usize,
    pub sample_radius: usize,
    pub period_level: usize,
    pub period_radius: usize,
    pub tolerance: BigRational,
    pub max_states: usize,
    pub core_cap: usize,
    /// optional pattern file checked against the chain by sampled periodicity
    pub external_array: Option<String>,
    /// original text, hashed into the report
    pub raw_text: String,
}

fn semantic(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Semantic { field: field.into(), reason: reason.into() }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut section = String::new();
    let mut group_kind: Option<String> = None;
    let mut group_rank: Option<usize> = None;
    let mut group_gens: Option<Vec<String>> = None;
    let mut chain_lines: Vec<(usize, String)> = Vec::new();
    let mut chain2_lines: Vec<(usize, String)> = Vec::new();
    let mut run_keys: Vec<(usize, String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: "unterminated section header".into(),
                });
            }
            section = line[1..line.len() - 1].trim().to_string();
            match section.as_str() {
                "group" | "chain" | "chain2" | "run" => {}
                other => {
                    return Err(ConfigError::Syntax {
                        line: line_no,
                        reason: format!("unknown section [{other}]"),
                    });
                }
            }
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(ConfigError::Syntax { line: line_no, reason: "expected key = value".into() });
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if value.is_empty() {
            return Err(ConfigError::Syntax { line: line_no, reason: "empty value".into() });
        }
        match (section.as_str(), key.as_str()) {
            ("group", "kind") => group_kind = Some(value),
            ("group", "rank") => {
                group_rank = Some(value.parse().map_err(|_| ConfigError::Syntax {
                    line: line_no,
                    reason: "rank must be a positive integer".into(),
                })?);
            }
            ("group", "generators") => {
                group_gens = Some(value.split(',').map(|s| s.trim().to_string()).collect());
            }
            ("chain", "level") => chain_lines.push((line_no, value)),
            ("chain2", "level") => chain2_lines.push((line_no, value)),
            ("run", _) => run_keys.push((line_no, key, value)),
            (sec, k) => {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: format!("unexpected key `{k}` in section [{sec}]"),
                });
            }
        }
    }

    let kind = match group_kind.as_deref() {
        Some("free") => GroupKind::Free,
        Some("free-abelian") => GroupKind::FreeAbelian,
        Some(other) => return Err(semantic("group.kind", format!("unknown kind `{other}`"))),
        None => return Err(semantic("group.kind", "missing")),
    };
    let rank = group_rank.ok_or_else(|| semantic("group.rank", "missing"))?;
    let names = group_gens.ok_or_else(|| semantic("group.generators", "missing"))?;
    if names.len() != rank {
        return Err(semantic(
            "group.generators",
            format!("{} names for rank {rank}", names.len()),
        ));
    }
    let group = GroupDescriptor::new(kind, names)
        .map_err(|e| semantic("group.generators", e.to_string()))?;

    if chain_lines.is_empty() {
        return Err(semantic("chain", "missing: at least one level is required"));
    }
    let parse_levels = |lines: &[(usize, String)]| -> Result<Vec<Vec<Word>>, ConfigError> {
        lines
            .iter()
            .map(|(line_no, value)| {
                value
                    .split(',')
                    .map(|s| {
                        parse_word(s.trim(), &group).map_err(|e| ConfigError::Syntax {
                            line: *line_no,
                            reason: e.to_string(),
                        })
                    })
                    .collect()
            })
            .collect()
    };
    let chain_gens = parse_levels(&chain_lines)?;
    let chain2_gens = if chain2_lines.is_empty() {
        None
    } else {
        Some(parse_levels(&chain2_lines)?)
    };

    let mut depth = chain_gens.len();
    let mut ball_radius = 4usize;
    let mut window_level: Option<usize> = None;
    let mut tower_level: Option<usize> = None;
    let mut test_radius = 8usize;
    let mut sample_radius = match kind {
        GroupKind::Free => 4usize,
        GroupKind::FreeAbelian => 32usize,
    };
    let mut period_level: Option<usize> = None;
    let mut period_radius: Option<usize> = None;
    let mut tolerance = crate::partition::default_tolerance();
    let mut max_states = DEFAULT_MAX_STATES;
    let mut core_cap = DEFAULT_CORE_CAP;
    let mut external_array = None;

    for (line_no, key, value) in run_keys {
        let as_usize = |v: &str| -> Result<usize, ConfigError> {
            v.parse().map_err(|_| ConfigError::Syntax {
                line: line_no,
                reason: format!("`{key}` must be a nonnegative integer"),
            })
        };
        match key.as_str() {
            "depth" => depth = as_usize(&value)?,
            "ball_radius" => ball_radius = as_usize(&value)?,
            "window_level" => window_level = Some(as_usize(&value)?),
            "tower_level" => tower_level = Some(as_usize(&value)?),
            "test_radius" => test_radius = as_usize(&value)?,
            "sample_radius" => sample_radius = as_usize(&value)?,
            "period_level" => period_level = Some(as_usize(&value)?),
            "period_radius" => period_radius = Some(as_usize(&value)?),
            "max_states" => max_states = as_usize(&value)?,
            "core_cap" => core_cap = as_usize(&value)?,
            "external_array" => external_array = Some(value.clone()),
            "tolerance" => {
                tolerance = parse_rational(&value).ok_or(ConfigError::Syntax {
                    line: line_no,
                    reason: "tolerance must be `p/q` or an integer".into(),
                })?;
            }
            other => {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    reason: format!("unknown run key `{other}`"),
                });
            }
        }
    }

    if depth == 0 {
        return Err(semantic("run.depth", "must be at least 1"));
    }
    if depth > chain_gens.len() {
        return Err(semantic(
            "run.depth",
            format!("chain has only {} levels", chain_gens.len()),
        ));
    }
    for (field, v) in [
        ("run.ball_radius", ball_radius),
        ("run.test_radius", test_radius),
        ("run.sample_radius", sample_radius),
    ] {
        if v == 0 {
            return Err(semantic(field, "must be positive"));
        }
    }
    let window_level = window_level.unwrap_or(depth - 1);
    if window_level > depth {
        return Err(semantic("run.window_level", "exceeds the depth"));
    }
    let tower_level = tower_level.unwrap_or(window_level);
    if tower_level > window_level {
        return Err(semantic(
            "run.tower_level",
            "towers need their domain positions inside the window",
        ));
    }
    let period_level = period_level.unwrap_or(depth);
    if period_level > depth {
        return Err(semantic("run.period_level", "exceeds the depth"));
    }
    let period_radius = period_radius.unwrap_or(ball_radius);

    Ok(RunConfig {
        group,
        chain_gens,
        chain2_gens,
        depth,
        ball_radius,
        window_level,
        tower_level,
        test_radius,
        sample_radius,
        period_level,
        period_radius,
        tolerance,
        max_states,
        core_cap,
        external_array,
        raw_text: text.to_string(),
    })
}

pub fn parse_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().ok()?;
            let d: BigInt = den.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = text.trim().parse().ok()?;
            Some(BigRational::from(n))
        }
    }
}

/// `ODOFORGE_CAPS=max_states=20000,core_cap=2000000` overrides the state caps.
pub fn apply_caps_env(config: &mut RunConfig, env: Option<&str>) -> Result<(), ConfigError> {
    let Some(text) = env else { return Ok(()) };
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((key, value)) = part.split_once('=') else {
            return Err(semantic("ODOFORGE_CAPS", format!("expected key=value, got `{part}`")));
        };
        let v: usize = value
            .trim()
            .parse()
            .map_err(|_| semantic("ODOFORGE_CAPS", format!("bad number in `{part}`")))?;
        match key.trim() {
            "max_states" => config.max_states = v,
            "core_cap" => config.core_cap = v,
            other => {
                return Err(semantic("ODOFORGE_CAPS", format!("unknown cap `{other}`")));
            }
        }
    }
    Ok(())
}
