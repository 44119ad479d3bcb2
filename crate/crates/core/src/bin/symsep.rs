// Command-line front end for the sweep experiments.
//
// Exit codes: 0 = all hard assertions passed, 1 = an assertion failed,
// 2 = usage error, 3 = a size/overflow abort prevented a record.

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use symsep_core::experiments::{
    default_m_values, default_samples, run_experiment, Experiment, OutputFormat, SweepConfig,
};
use symsep_core::Error;

const USAGE: &str = "\
symsep - symmetric-subspace entanglement experiments

USAGE:
  symsep --experiment NAME [FLAGS]

EXPERIMENTS:
  eof-decay              sample random symmetric states, reduce to two
                         sites, track entanglement of formation and the
                         distance to the separable (PPT) set as m grows
  schmidt-concentration  Monte Carlo check that the ensemble-mean top
                         Schmidt weight of two-site reductions clears the
                         exact dim ratio floor
  theorem2               exact identity and trace-distance bounds for the
                         first-pair reduction of the symmetric maximally
                         entangled state (even m only)
  symtest-demo           run a symmetrization test on a preset state and
                         report stage probabilities
  dims                   print symmetric-subspace dimensions

FLAGS:
  --experiment NAME      one of the experiments above (required)
  --n N                  qubits per site (default: 1)
  --m LIST|A:B:STEP      site counts: comma list (2,4,8) or inclusive
                         range with step (2:8:2); default depends on the
                         experiment
  --samples N            Monte Carlo samples per record
  --seed U64             master seed (default: 1); sample i uses RNG
                         stream i of this seed
  --tol X                separability-solver stationarity tolerance
                         (default: 1e-7)
  --out PATH             write records to PATH in the chosen format
  --format csv|json      output format (default: csv)
  --threads N            worker threads (default: all cores); results are
                         byte-identical for any thread count
  --preset SPEC          symtest-demo state: product, singlet, dicke(k),
                         phi(n,k), random(seed)
  --mode MODE            symtest-demo mode: projector (default), didactic,
                         two-stage
  --help                 this text

ENVIRONMENT:
  Every flag has an override: SYMSEP_EXPERIMENT, SYMSEP_N, SYMSEP_M,
  SYMSEP_SAMPLES, SYMSEP_SEED, SYMSEP_TOL, SYMSEP_OUT, SYMSEP_FORMAT,
  SYMSEP_THREADS, SYMSEP_PRESET, SYMSEP_MODE. Flags win over environment.

EXAMPLES:
  symsep --experiment dims --n 2 --m 1:10:1
  symsep --experiment theorem2 --n 1 --m 2,4,8,16 --out t2.csv
  symsep --experiment eof-decay --m 2,4,8,16,32 --samples 200 --seed 7 \\
         --format json --out decay.json
  symsep --experiment symtest-demo --preset random(7) --m 3 --mode didactic
";

#[derive(Debug)]
struct Cli {
    config: SweepConfig,
    out: Option<PathBuf>,
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}\n\n{USAGE}");
    ExitCode::from(2)
}

fn parse_m_values(spec: &str) -> Result<Vec<usize>, String> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("bad m range {spec:?}, expected A:B:STEP"));
        }
        let a: usize = parts[0]
            .parse()
            .map_err(|_| format!("bad m start {:?}", parts[0]))?;
        let b: usize = parts[1]
            .parse()
            .map_err(|_| format!("bad m end {:?}", parts[1]))?;
        let step: usize = parts[2]
            .parse()
            .map_err(|_| format!("bad m step {:?}", parts[2]))?;
        if step == 0 || b < a {
            return Err(format!("bad m range {spec:?}"));
        }
        Ok((a..=b).step_by(step).collect())
    } else {
        spec.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("bad m value {tok:?}"))
            })
            .collect()
    }
}

/// Flags first, environment second, defaults last.
fn parse_cli() -> Result<Cli, String> {
    let mut flags: Vec<(String, String)> = Vec::new();
    let mut it = env::args().skip(1);
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--help" | "-h" => {
                println!("{USAGE}");
                std::process::exit(0);
            }
            key if key.starts_with("--") => {
                let value = it
                    .next()
                    .ok_or_else(|| format!("missing value for {key}"))?;
                flags.push((key[2..].to_string(), value));
            }
            other => return Err(format!("unexpected argument {other:?}")),
        }
    }
    let lookup = |name: &str, env_name: &str| -> Option<String> {
        flags
            .iter()
            .rev()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.clone())
            .or_else(|| env::var(env_name).ok())
    };

    let experiment_name = lookup("experiment", "SYMSEP_EXPERIMENT")
        .ok_or_else(|| "an --experiment is required".to_string())?;
    let experiment = Experiment::parse(&experiment_name)
        .ok_or_else(|| format!("unknown experiment {experiment_name:?}"))?;
    let mut config = SweepConfig::new(experiment);

    if let Some(v) = lookup("n", "SYMSEP_N") {
        config.n = v.parse().map_err(|_| format!("bad --n {v:?}"))?;
    }
    if let Some(v) = lookup("m", "SYMSEP_M") {
        config.m_values = parse_m_values(&v)?;
    } else {
        config.m_values = default_m_values(experiment);
    }
    if let Some(v) = lookup("samples", "SYMSEP_SAMPLES") {
        config.samples = v.parse().map_err(|_| format!("bad --samples {v:?}"))?;
    } else {
        config.samples = default_samples(experiment);
    }
    if let Some(v) = lookup("seed", "SYMSEP_SEED") {
        config.seed = v.parse().map_err(|_| format!("bad --seed {v:?}"))?;
    }
    if let Some(v) = lookup("tol", "SYMSEP_TOL") {
        config.sep_tol = v.parse().map_err(|_| format!("bad --tol {v:?}"))?;
        if config.sep_tol <= 0.0 {
            return Err("--tol must be positive".to_string());
        }
    }
    if let Some(v) = lookup("format", "SYMSEP_FORMAT") {
        config.format =
            OutputFormat::parse(&v).ok_or_else(|| format!("bad --format {v:?} (csv|json)"))?;
    }
    if let Some(v) = lookup("threads", "SYMSEP_THREADS") {
        config.threads = v.parse().map_err(|_| format!("bad --threads {v:?}"))?;
    }
    if let Some(v) = lookup("preset", "SYMSEP_PRESET") {
        config.preset = Some(v);
    }
    if let Some(v) = lookup("mode", "SYMSEP_MODE") {
        config.mode = Some(v);
    }
    let out = lookup("out", "SYMSEP_OUT").map(PathBuf::from);

    for (key, _) in &flags {
        if ![
            "experiment", "n", "m", "samples", "seed", "tol", "out", "format", "threads",
            "preset", "mode",
        ]
        .contains(&key.as_str())
        {
            return Err(format!("unknown flag --{key}"));
        }
    }

    Ok(Cli { config, out })
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(cli) => cli,
        Err(msg) => return usage_error(&msg),
    };
    if let Err(e) = cli.config.validate() {
        return usage_error(&e.to_string());
    }

    let output = match run_experiment(&cli.config) {
        Ok(output) => output,
        Err(Error::Argument(msg)) => return usage_error(&msg),
        Err(e @ (Error::Size { .. } | Error::Overflow(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    println!(
        "experiment {}  n={}  seed={}  samples={}",
        cli.config.experiment, cli.config.n, cli.config.seed, cli.config.samples
    );
    for line in &output.summary_lines {
        println!("  {line}");
    }
    for (label, err) in &output.record_errors {
        println!("  {label}: ERROR {err}");
    }

    if let Some(path) = &cli.out {
        let body = match cli.config.format {
            OutputFormat::Csv => output.csv(),
            OutputFormat::Json => output.json(&cli.config),
        };
        if let Err(e) = fs::write(path, body) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
        println!(
            "wrote {} records to {}",
            output.records.len(),
            path.display()
        );
    } else {
        print!("{}", output.csv());
    }

    if output.hit_size_or_overflow {
        println!("result: SIZE/OVERFLOW ABORT (partial results emitted)");
        return ExitCode::from(3);
    }
    if !output.all_assertions_pass || !output.record_errors.is_empty() {
        println!("result: ASSERTION FAILURE");
        return ExitCode::from(1);
    }
    println!("result: ok");
    ExitCode::SUCCESS
}
