//! Command dispatch and deterministic report emission.
//!
//! A report body is byte-identical across runs for a fixed configuration:
//! no timestamps, no absolute paths, all collections in a fixed order.
//! Timing lives next to the body, outside the hashed and compared content.
//! Exit codes: 0 all PASS, 1 any FAIL, 2 any INCONCLUSIVE without FAIL,
//! 3 error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{eigenvalue_group, factor_between, Chain, ChainError, TruncatedPoint};
use crate::config::{ConfigError, RunConfig};
use crate::coset::CosetError;
use crate::partition::{
    base_partition, check_return_law, incidence_matrix, kr_tower_sequence, measure_estimate,
    symbol_refiners, trivial_refiners, MeasureReport, PartitionError, SampleSpace,
};
use crate::snf::IntegerMatrix;
use crate::toeplitz::{
    dump_array, period_structure_check, toeplitz_verify, verify_external, ExternalArray,
    ToeplitzError, ToeplitzSpec,
};
use crate::word::{ball_unchecked, WordError};

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("word-core: {0}")]
    Word(#[from] WordError),
    #[error("coset-algebra: {0}")]
    Coset(#[from] CosetError),
    #[error("odometer-chain: {0}")]
    Chain(#[from] ChainError),
    #[error("toeplitz-engine: {0}")]
    Toeplitz(#[from] ToeplitzError),
    #[error("partition-measures: {0}")]
    Partition(#[from] PartitionError),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verb {
    Validate,
    Toeplitz,
    Periods,
    Factor,
    Eigen,
    Measure,
    All,
}

impl Verb {
    pub fn parse(s: &str) -> Option<Verb> {
        Some(match s {
            "validate" => Verb::Validate,
            "toeplitz" => Verb::Toeplitz,
            "periods" => Verb::Periods,
            "factor" => Verb::Factor,
            "eigen" => Verb::Eigen,
            "measure" => Verb::Measure,
            "all" => Verb::All,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verb::Validate => "validate",
            Verb::Toeplitz => "toeplitz",
            Verb::Periods => "periods",
            Verb::Factor => "factor",
            Verb::Eigen => "eigen",
            Verb::Measure => "measure",
            Verb::All => "all",
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckEntry {
    fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckEntry { name: name.into(), status: Status::Pass, detail: detail.into(), witness: None }
    }

    fn fail(name: impl Into<String>, detail: impl Into<String>, witness: String) -> Self {
        CheckEntry {
            name: name.into(),
            status: Status::Fail,
            detail: detail.into(),
            witness: Some(witness),
        }
    }

    fn inconclusive(name: impl Into<String>, detail: impl Into<String>, witness: Option<String>) -> Self {
        CheckEntry {
            name: name.into(),
            status: Status::Inconclusive,
            detail: detail.into(),
            witness,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportBody {
    pub command: String,
    pub config_hash: String,
    pub group: String,
    pub depth: usize,
    /// per chain level: coset table and transversal, present on validate runs
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelTable>,
    pub checks: Vec<CheckEntry>,
}

/// Wire form of a subgroup handle: the per-generator permutations of the
/// coset table and the shortlex transversal words.
#[derive(Clone, Debug, Serialize)]
pub struct LevelTable {
    pub level: usize,
    pub index: usize,
    pub normal: bool,
    pub permutations: Vec<Vec<u32>>,
    pub transversal: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
struct ReportFile<'a> {
    body: &'a ReportBody,
    timing_ms: u128,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub body: ReportBody,
    pub body_json: String,
    pub exit_code: i32,
    /// artifact file name -> content
    pub artifacts: BTreeMap<String, String>,
}

pub fn fnv1a64(data: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in data {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Decimal rendering of a nonnegative rational, truncated to `places`.
pub fn rational_decimal(r: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = (r * BigRational::from(scale.clone())).trunc();
    let value = scaled.numer().abs();
    let whole = &value / &scale;
    let frac = &value % &scale;
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{whole}.{:0width$}", frac, width = places as usize)
}

pub fn rational_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn build_chain(config: &RunConfig) -> Result<Chain, ChainError> {
    Chain::from_generator_lists(
        &config.group,
        &config.chain_gens[..config.depth],
        config.max_states,
    )
}

fn sample_points(chain: &Chain, count: usize) -> Vec<TruncatedPoint> {
    let mut radius = 1;
    loop {
        let ball = ball_unchecked(chain.group(), radius);
        if ball.len() >= count || radius > 16 {
            return ball.iter().take(count).map(|w| chain.point_of_word(w)).collect();
        }
        radius += 1;
    }
}

fn level_tables(chain: &Chain) -> Vec<LevelTable> {
    (0..=chain.depth())
        .map(|n| {
            let h = chain.level(n);
            LevelTable {
                level: n,
                index: h.index(),
                normal: chain.normal_flags()[n],
                permutations: h.table().permutations().to_vec(),
                transversal: h.transversal().iter().map(|w| w.to_string()).collect(),
            }
        })
        .collect()
}

fn checks_validate(
    config: &RunConfig,
    tables: &mut Vec<LevelTable>,
) -> Result<Vec<CheckEntry>, DispatchError> {
    let mut checks = Vec::new();
    let chain = match build_chain(config) {
        Ok(c) => c,
        Err(ChainError::NestingViolation { level, witness }) => {
            checks.push(CheckEntry::fail(
                "chain-nesting",
                format!("level {level} is not contained in its predecessor"),
                witness.to_string(),
            ));
            return Ok(checks);
        }
        Err(e) => return Err(e.into()),
    };
    checks.push(CheckEntry::pass("chain-nesting", format!("{} levels nested", chain.depth())));
    *tables = level_tables(&chain);
    for n in 0..=chain.depth() {
        let strict = if n == 0 { true } else { chain.strict_flags()[n - 1] };
        checks.push(CheckEntry::pass(
            format!("level-{n}"),
            format!(
                "index={} strict={} normal={}",
                chain.level(n).index(),
                strict,
                chain.normal_flags()[n]
            ),
        ));
    }
    let witnesses = chain.residuality_witnesses(config.ball_radius)?;
    if witnesses.is_empty() {
        checks.push(CheckEntry::pass(
            "residuality",
            format!("certified at radius {} depth {}", config.ball_radius, chain.depth()),
        ));
    } else {
        let listed: Vec<String> = witnesses.iter().map(|w| w.to_string()).collect();
        checks.push(CheckEntry::inconclusive(
            "residuality",
            format!(
                "{} nonidentity ball elements remain in the deepest level",
                witnesses.len()
            ),
            Some(listed.join(" ")),
        ));
    }
    Ok(checks)
}

fn checks_toeplitz(
    config: &RunConfig,
    artifacts: &mut BTreeMap<String, String>,
) -> Result<Vec<CheckEntry>, DispatchError> {
    let chain = build_chain(config)?;
    let spec = ToeplitzSpec::build(&chain)?;
    let window = spec.tower().domain(config.window_level).to_vec();
    artifacts.insert("array.dump".into(), dump_array(&spec, &window));
    let report = toeplitz_verify(&spec, &window, config.test_radius)?;
    let mut checks = Vec::new();
    if report.pass {
        checks.push(CheckEntry::pass(
            "toeplitz-verify",
            format!(
                "{} positions certified, deepest level {}, {} recurrence translates checked",
                report.entries.len(),
                report.recurrence_level.unwrap_or(0),
                report.recurrence_checked
            ),
        ));
    } else {
        let uncertified: Vec<String> = report
            .entries
            .iter()
            .filter(|e| e.certified_at.is_none())
            .map(|e| e.position.to_string())
            .collect();
        checks.push(CheckEntry::fail(
            "toeplitz-verify",
            format!("{} positions uncertified", uncertified.len()),
            uncertified.join(" "),
        ));
    }
    if let Some(path) = &config.external_array {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DispatchError::Io(format!("cannot read {path}: {e}")))?;
        let array = ExternalArray::parse(&text, &config.group)?;
        let report = verify_external(&array, &chain, &window, config.test_radius)?;
        if report.pass {
            let deepest =
                report.entries.iter().filter_map(|e| e.sampled_at).max().unwrap_or(0);
            checks.push(CheckEntry::pass(
                "external-array",
                format!(
                    "{} positions sampled periodic, deepest level {deepest}",
                    report.entries.len()
                ),
            ));
        } else {
            let witnesses: Vec<String> = report
                .entries
                .iter()
                .filter(|e| e.sampled_at.is_none())
                .map(|e| {
                    match &e.witness {
                        Some((g, base, found)) => format!(
                            "{} (translate {g}: {found} != {base})",
                            e.position
                        ),
                        None => e.position.to_string(),
                    }
                })
                .collect();
            checks.push(CheckEntry::fail(
                "external-array",
                "sampled periodicity fails at every chain level".to_string(),
                witnesses.join("; "),
            ));
        }
    }
    Ok(checks)
}

fn checks_periods(config: &RunConfig) -> Result<Vec<CheckEntry>, DispatchError> {
    let chain = build_chain(config)?;
    let spec = ToeplitzSpec::build(&chain)?;
    let report = period_structure_check(&spec, config.period_level, config.period_radius)?;
    let mut checks = Vec::new();
    for level in &report.levels {
        if level.inconclusive.is_empty() {
            checks.push(CheckEntry::pass(
                format!("periods-level-{}", level.level),
                format!(
                    "{} tested: {} falsified, {} in group",
                    level.tested, level.witnesses, level.in_group
                ),
            ));
        } else {
            let listed: Vec<String> =
                level.inconclusive.iter().map(|w| w.to_string()).collect();
            checks.push(CheckEntry::inconclusive(
                format!("periods-level-{}", level.level),
                format!(
                    "{} tested: {} falsified, {} in group, {} inconclusive",
                    level.tested,
                    level.witnesses,
                    level.in_group,
                    level.inconclusive.len()
                ),
                Some(listed.join(" ")),
            ));
        }
    }
    let window = spec.tower().domain(config.window_level).to_vec();
    let verify = toeplitz_verify(&spec, &window, config.test_radius)?;
    if report.all_falsified && verify.pass {
        checks.push(CheckEntry::pass(
            "period-structure",
            format!(
                "certificate at (level {}, radius {})",
                config.period_level, config.period_radius
            ),
        ));
    } else {
        checks.push(CheckEntry::inconclusive(
            "period-structure",
            "certificate incomplete at this truncation".to_string(),
            None,
        ));
    }
    Ok(checks)
}

fn checks_factor(config: &RunConfig) -> Result<Vec<CheckEntry>, DispatchError> {
    let Some(chain2_gens) = &config.chain2_gens else {
        return Err(DispatchError::Config(ConfigError::Semantic {
            field: "chain2".into(),
            reason: "the factor verb needs a second chain".into(),
        }));
    };
    let source = build_chain(config)?;
    let target = Chain::from_generator_lists(&config.group, chain2_gens, config.max_states)?;
    let mut checks = Vec::new();
    match factor_between(&source, &target)? {
        Ok(map) => {
            let points = sample_points(&source, 20);
            let mut pairs = 0usize;
            for w in ball_unchecked(&config.group, 3) {
                for p in &points {
                    if map.apply(&source.act(&w, p)) != target.act(&w, &map.apply(p)) {
                        checks.push(CheckEntry::fail(
                            "factor-equivariance",
                            "induced map is not equivariant".to_string(),
                            w.to_string(),
                        ));
                        return Ok(checks);
                    }
                    pairs += 1;
                }
            }
            let levels: Vec<String> =
                map.source_levels.iter().map(|k| k.to_string()).collect();
            checks.push(CheckEntry::pass(
                "factor-map",
                format!(
                    "source levels [{}], equivariance checked on {} pairs",
                    levels.join(","),
                    pairs
                ),
            ));
        }
        Err(obs) => {
            checks.push(CheckEntry::fail(
                "factor-map",
                format!("no admissible source level for target level {}", obs.level),
                obs.witness.to_string(),
            ));
        }
    }
    Ok(checks)
}

fn checks_eigen(
    config: &RunConfig,
    artifacts: &mut BTreeMap<String, String>,
) -> Result<Vec<CheckEntry>, DispatchError> {
    let chain = build_chain(config)?;
    let mut checks = Vec::new();
    let mut csv = String::from("level,character,components\n");
    // the relation is exact, so a bounded scan keeps large character
    // groups affordable; the acceptance suite runs the full-radius version
    let points = sample_points(&chain, 10);
    let ball = ball_unchecked(chain.group(), config.ball_radius.min(3));
    let mut relation_ok = true;
    let mut relation_witness = None;
    for n in 0..=chain.depth() {
        let group = eigenvalue_group(&chain, n)?;
        for (i, ch) in group.characters.iter().enumerate() {
            let comps: Vec<String> = ch.components().iter().map(rational_string).collect();
            let _ = writeln!(csv, "{n},{i},{}", comps.join(" "));
        }
        let torsion: Vec<String> = group.torsion.iter().map(|d| d.to_string()).collect();
        checks.push(CheckEntry::pass(
            format!("eigen-level-{n}"),
            format!(
                "order={} torsion=[{}] free_rank={}",
                group.order(),
                torsion.join(","),
                group.free_rank
            ),
        ));
        // step eigenfunction f(p) = χ(rep of g_n) satisfies f(g·p) = χ(g)+f(p);
        // bounded scan so large character groups stay affordable
        let transversal = chain.level(n).transversal();
        for ch in group.characters.iter().take(32) {
            for g in &ball {
                for p in &points {
                    let lhs = ch.eval(&transversal[chain.act(g, p).coords()[n] as usize]);
                    let rhs = crate::chain::frac_mod_one(
                        ch.eval(g) + ch.eval(&transversal[p.coords()[n] as usize]),
                    );
                    if lhs != rhs {
                        relation_ok = false;
                        relation_witness.get_or_insert_with(|| g.to_string());
                    }
                }
            }
        }
    }
    artifacts.insert("characters.csv".into(), csv);
    if relation_ok {
        checks.push(CheckEntry::pass(
            "eigenfunction-relation",
            format!(
                "exact over ball({}) x {} points, all levels",
                config.ball_radius.min(3),
                points.len()
            ),
        ));
    } else {
        checks.push(CheckEntry::fail(
            "eigenfunction-relation",
            "relation violated".to_string(),
            relation_witness.unwrap_or_default(),
        ));
    }
    Ok(checks)
}

fn matrices_csv(label: &str, matrices: &[IntegerMatrix], csv: &mut String) {
    for (n, a) in matrices.iter().enumerate() {
        let _ = writeln!(csv, "# tower={label} A_{n} {}x{}", a.rows, a.cols);
        for i in 0..a.rows {
            let row: Vec<String> = (0..a.cols).map(|j| a[(i, j)].to_string()).collect();
            let _ = writeln!(csv, "{}", row.join(","));
        }
    }
}

#[derive(Serialize)]
struct MeasureJson {
    tower: String,
    folner: bool,
    diameter: String,
    diameter_decimal: String,
    unique_ergodicity: bool,
    /// incidence matrices as exact integer rows
    matrices: Vec<Vec<Vec<String>>>,
    levels: Vec<MeasureLevelJson>,
}

#[derive(Serialize)]
struct MeasureLevelJson {
    level: usize,
    intervals: Vec<(String, String)>,
    point: Vec<String>,
    point_decimal: Vec<String>,
    width: String,
}

fn measure_json(label: &str, report: &MeasureReport, matrices: &[IntegerMatrix]) -> MeasureJson {
    MeasureJson {
        tower: label.to_string(),
        folner: report.folner,
        diameter: rational_string(&report.diameter),
        diameter_decimal: rational_decimal(&report.diameter, 12),
        unique_ergodicity: report.unique_ergodicity,
        matrices: matrices
            .iter()
            .map(|a| {
                (0..a.rows)
                    .map(|i| (0..a.cols).map(|j| a[(i, j)].to_string()).collect())
                    .collect()
            })
            .collect(),
        levels: report
            .levels
            .iter()
            .enumerate()
            .map(|(n, l)| MeasureLevelJson {
                level: n,
                intervals: l
                    .intervals
                    .iter()
                    .map(|(lo, hi)| (rational_string(lo), rational_string(hi)))
                    .collect(),
                point: l.point.entries.iter().map(rational_string).collect(),
                point_decimal: l
                    .point
                    .entries
                    .iter()
                    .map(|x| rational_decimal(x, 12))
                    .collect(),
                width: rational_string(&l.width),
            })
            .collect(),
    }
}

fn checks_measure(
    config: &RunConfig,
    artifacts: &mut BTreeMap<String, String>,
) -> Result<Vec<CheckEntry>, DispatchError> {
    let chain = build_chain(config)?;
    let spec = ToeplitzSpec::build(&chain)?;
    let window = spec.tower().domain(config.window_level).to_vec();
    let space = SampleSpace::build(&spec, &window, config.sample_radius, config.tower_level)?;
    let mut checks = Vec::new();
    if space.stable {
        checks.push(CheckEntry::pass(
            "sample-space",
            format!("{} points, {} dropped, stable under doubling", space.len(), space.dropped),
        ));
    } else {
        checks.push(CheckEntry::inconclusive(
            "sample-space",
            format!(
                "{} points, {} dropped, pattern set still growing at radius {}",
                space.len(),
                space.dropped,
                2 * config.sample_radius
            ),
            None,
        ));
    }
    let folner = config.group.kind() == crate::word::GroupKind::FreeAbelian
        || config.group.rank() == 1;
    let max_level = config.tower_level;
    let mut csv = String::new();
    let mut measures = Vec::new();
    for (label, refiners) in [
        ("haar", trivial_refiners(&space, max_level)),
        ("symbol", symbol_refiners(&spec, &space, max_level)?),
    ] {
        let towers = kr_tower_sequence(&spec, &space, &refiners)?;
        // sampled return-time law on the deepest tower base
        check_return_law(&spec, max_level, towers.last().unwrap(), &space, config.test_radius)?;
        let mut matrices = Vec::new();
        let mut column_fail = None;
        for n in 0..towers.len() - 1 {
            match incidence_matrix(&towers[n], &towers[n + 1], &space, &spec) {
                Ok(a) => matrices.push(a),
                Err(e) => {
                    column_fail = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = column_fail {
            checks.push(CheckEntry::fail(
                format!("column-sums-{label}"),
                "incidence matrix construction failed".to_string(),
                e.to_string(),
            ));
            continue;
        }
        checks.push(CheckEntry::pass(
            format!("column-sums-{label}"),
            format!("{} matrices satisfy the exact column-sum law", matrices.len()),
        ));
        matrices_csv(label, &matrices, &mut csv);
        let report = measure_estimate(&matrices, folner, &config.tolerance)?;
        if label == "haar" {
            let mut haar_ok = true;
            for (n, level) in report.levels.iter().enumerate() {
                let expected = chain.haar_cylinder(n)?;
                if level.point.entries != vec![expected] {
                    haar_ok = false;
                }
            }
            if haar_ok {
                checks.push(CheckEntry::pass(
                    "haar-crosscheck",
                    "single-cell tower reproduces 1/index exactly at every level".to_string(),
                ));
            } else {
                checks.push(CheckEntry::fail(
                    "haar-crosscheck",
                    "tower measures differ from the Haar values".to_string(),
                    "see measures.json".to_string(),
                ));
            }
        }
        checks.push(CheckEntry::pass(
            format!("measure-{label}"),
            format!(
                "diameter={} unique_ergodicity={} {}",
                rational_decimal(&report.diameter, 12),
                report.unique_ergodicity,
                if folner {
                    "transversals are Folner, estimate is invariant"
                } else {
                    "inverse-limit element, invariance not guaranteed"
                }
            ),
        ));
        measures.push(measure_json(label, &report, &matrices));
    }
    // base partitions at every level must be well defined
    for n in 0..=max_level {
        base_partition(&spec, n, &space)?;
    }
    artifacts.insert("matrices.csv".into(), csv);
    artifacts.insert(
        "measures.json".into(),
        serde_json::to_string_pretty(&measures).map_err(|e| DispatchError::Io(e.to_string()))?,
    );
    Ok(checks)
}

/// Runs a verb against a configuration; artifacts are returned in memory and
/// optionally written under `out_dir`.
pub fn dispatch(
    config: &RunConfig,
    verb: Verb,
    out_dir: Option<&Path>,
) -> Result<Outcome, DispatchError> {
    let started = std::time::Instant::now();
    let mut artifacts = BTreeMap::new();
    let mut checks = Vec::new();
    let mut tables: Vec<LevelTable> = Vec::new();
    let verbs: Vec<Verb> = match verb {
        Verb::All => {
            let mut v = vec![Verb::Validate, Verb::Toeplitz, Verb::Periods, Verb::Eigen, Verb::Measure];
            if config.chain2_gens.is_some() {
                v.insert(1, Verb::Factor);
            }
            v
        }
        other => vec![other],
    };
    for v in verbs {
        let mut sub = match v {
            Verb::Validate => checks_validate(config, &mut tables)?,
            Verb::Toeplitz => checks_toeplitz(config, &mut artifacts)?,
            Verb::Periods => checks_periods(config)?,
            Verb::Factor => checks_factor(config)?,
            Verb::Eigen => checks_eigen(config, &mut artifacts)?,
            Verb::Measure => checks_measure(config, &mut artifacts)?,
            Verb::All => unreachable!(),
        };
        checks.append(&mut sub);
    }
    let any_fail = checks.iter().any(|c| c.status == Status::Fail);
    let any_open = checks.iter().any(|c| c.status == Status::Inconclusive);
    let exit_code = if any_fail {
        1
    } else if any_open {
        2
    } else {
        0
    };
    let body = ReportBody {
        command: verb.name().to_string(),
        config_hash: format!("{:016x}", fnv1a64(config.raw_text.as_bytes())),
        levels: tables,
        group: format!(
            "{} rank {} <{}>",
            match config.group.kind() {
                crate::word::GroupKind::Free => "free",
                crate::word::GroupKind::FreeAbelian => "free-abelian",
            },
            config.group.rank(),
            config.group.generator_names().join(",")
        ),
        depth: config.depth,
        checks,
    };
    let body_json =
        serde_json::to_string_pretty(&body).map_err(|e| DispatchError::Io(e.to_string()))?;
    let timing_ms = started.elapsed().as_millis();
    let report_file = ReportFile { body: &body, timing_ms };
    let report_json =
        serde_json::to_string_pretty(&report_file).map_err(|e| DispatchError::Io(e.to_string()))?;
    artifacts.insert("report.json".into(), report_json);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| DispatchError::Io(e.to_string()))?;
        for (name, content) in &artifacts {
            std::fs::write(dir.join(name), content)
                .map_err(|e| DispatchError::Io(e.to_string()))?;
        }
    }
    Ok(Outcome { body, body_json, exit_code, artifacts })
}
