use std::path::PathBuf;
use std::process::ExitCode;

use odoforge::config::{apply_caps_env, parse_config};
use odoforge::report::{dispatch, Status, Verb};

const USAGE: &str = "\
usage: odoforge <verb> --config <file> [--depth N] [--radius R] [--out DIR]

verbs:
  validate   chain nesting, flags and residuality certificate
  toeplitz   build the array, dump a window, verify certification
  periods    essential-period falsification batch
  factor     factor map from [chain] onto [chain2]
  eigen      character tables and the eigenfunction relation
  measure    towers, incidence matrices and measure estimates
  all        everything applicable

environment:
  ODOFORGE_CAPS=max_states=N,core_cap=M   override state caps
";

fn run() -> Result<i32, String> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" {
        print!("{USAGE}");
        return Ok(if args.is_empty() { 3 } else { 0 });
    }
    let verb = Verb::parse(&args[0]).ok_or_else(|| format!("unknown verb `{}`", args[0]))?;
    let mut config_path: Option<PathBuf> = None;
    let mut out_dir: Option<PathBuf> = None;
    let mut depth_override: Option<usize> = None;
    let mut radius_override: Option<usize> = None;
    let mut i = 1;
    while i < args.len() {
        let take = |i: &mut usize| -> Result<String, String> {
            *i += 1;
            args.get(*i).cloned().ok_or_else(|| format!("missing value after {}", args[*i - 1]))
        };
        match args[i].as_str() {
            "--config" => config_path = Some(PathBuf::from(take(&mut i)?)),
            "--out" => out_dir = Some(PathBuf::from(take(&mut i)?)),
            "--depth" => {
                depth_override =
                    Some(take(&mut i)?.parse().map_err(|_| "bad --depth".to_string())?);
            }
            "--radius" => {
                radius_override =
                    Some(take(&mut i)?.parse().map_err(|_| "bad --radius".to_string())?);
            }
            other => return Err(format!("unknown option `{other}`")),
        }
        i += 1;
    }
    let config_path = config_path.ok_or_else(|| "missing --config <file>".to_string())?;
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| format!("cannot read {}: {e}", config_path.display()))?;
    let mut config = parse_config(&text).map_err(|e| e.to_string())?;
    if let Some(d) = depth_override {
        if d == 0 || d > config.chain_gens.len() {
            return Err(format!("--depth must be in 1..={}", config.chain_gens.len()));
        }
        config.depth = d;
        config.window_level = config.window_level.min(d - 1);
        config.period_level = config.period_level.min(d);
    }
    if let Some(r) = radius_override {
        if r == 0 {
            return Err("--radius must be positive".to_string());
        }
        config.ball_radius = r;
        config.period_radius = r;
    }
    let caps = std::env::var("ODOFORGE_CAPS").ok();
    apply_caps_env(&mut config, caps.as_deref()).map_err(|e| e.to_string())?;
    let outcome = dispatch(&config, verb, out_dir.as_deref()).map_err(|e| e.to_string())?;
    for check in &outcome.body.checks {
        let tag = match check.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        println!("{tag:12} {:28} {}", check.name, check.detail);
        if let Some(w) = &check.witness {
            println!("{:12} {:28} witness: {w}", "", "");
        }
    }
    if let Some(dir) = &out_dir {
        println!("artifacts written to {}", dir.display());
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}
