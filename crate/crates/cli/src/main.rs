use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use furstenberg_core::certificate::{ClassCertificate, Witness};
use furstenberg_core::classify::{check_report_invariants, classify_point, replay_report, Scales};
use furstenberg_core::construct::appendix::{self, AppendixTrace};
use furstenberg_core::construct::generators::{self, RunSpec};
use furstenberg_core::construct::wtp::{self, StartSpec, WtpSpec};
use furstenberg_core::detect::{self, DetectorRequest};
use furstenberg_core::family;
use furstenberg_core::format;
use furstenberg_core::replay::replay;
use furstenberg_core::symbolic::{self, SymbolicWord};
use furstenberg_core::window::WindowSet;

/// Longest word written out as a sequence file.
const DENSE_EXPORT_LIMIT: u64 = 1 << 24;

#[derive(Parser)]
#[command(name = "furst", version, about = "Finite-window set-class certificates and symbolic constructions")]
struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    format: OutputFormat,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Exit with status 3 when an IP search runs out of budget.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, default_value = ".", global = true)]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every set-class detector on a set file.
    AnalyzeSet {
        path: PathBuf,
        #[arg(long, default_value = "")]
        scales: String,
        /// Directory of set files checked as difference-family witnesses.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
    /// Classify the point generated by a sequence file.
    ClassifySeq {
        path: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_word_len: usize,
        #[arg(long, default_value = "")]
        scales: String,
        /// Read PATH as a set file holding the support of a binary word.
        #[arg(long)]
        support: bool,
    },
    /// Build and verify a staged construction.
    #[command(subcommand)]
    Construct(Construct),
    /// Write generated sets.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Subcommand)]
enum Construct {
    Appendix {
        #[arg(long)]
        stages: usize,
        #[arg(long, default_value_t = 1)]
        window: u64,
    },
    Wtp {
        #[arg(long)]
        k: u64,
        #[arg(long, conflicts_with = "starts")]
        quadratic_starts: bool,
        #[arg(long, value_delimiter = ',')]
        starts: Option<Vec<u64>>,
        #[arg(long)]
        stages: usize,
        #[arg(long)]
        window: Option<u64>,
    },
}

#[derive(Args)]
struct Cap {
    #[arg(long)]
    cap: u64,
    /// File name written under the output directory.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Subcommand)]
enum Gen {
    Fs {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<u64>,
        #[command(flatten)]
        cap: Cap,
    },
    Thick {
        /// `start:len` pairs.
        #[arg(long, value_delimiter = ',')]
        runs: Vec<String>,
        /// `base:count`: runs of length i at base^i.
        #[arg(long)]
        geometric: Option<String>,
        #[command(flatten)]
        cap: Cap,
    },
    Syndetic {
        #[arg(long, value_delimiter = ',', required = true)]
        gaps: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[command(flatten)]
        cap: Cap,
    },
    DilatedThick {
        #[arg(long)]
        k: u64,
        #[arg(long, value_delimiter = ',')]
        runs: Vec<String>,
        #[arg(long)]
        geometric: Option<String>,
        #[command(flatten)]
        cap: Cap,
    },
    Random {
        #[arg(long)]
        density: f64,
        #[command(flatten)]
        cap: Cap,
    },
    /// Witness pool files in the output directory.
    Pool {
        #[arg(long, default_value_t = 32)]
        count: usize,
        #[arg(long)]
        horizon: u64,
        /// Multiples `rZ+` for r = 1..=count instead of random weakly thick sets.
        #[arg(long)]
        multiples: bool,
    },
    DeBruijn {
        #[arg(long, default_value_t = 2)]
        alphabet: u8,
        #[arg(long)]
        order: usize,
        /// Cycle the sequence up to this length.
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        name: Option<String>,
    },
}

struct Outcome {
    doc: Value,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let rendered = match cli.format {
                OutputFormat::Json => serde_json::to_string_pretty(&out.doc).expect("serializable"),
                OutputFormat::Text => render_text(&out.doc, 0),
            };
            // A closed pipe is not an error worth reporting.
            let _ = writeln!(std::io::stdout().lock(), "{rendered}");
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::AnalyzeSet {
            path,
            scales,
            witness_dir,
        } => analyze_set(cli, path, scales, witness_dir.as_deref()),
        Command::ClassifySeq {
            path,
            max_word_len,
            scales,
            support,
        } => classify_seq(cli, path, *max_word_len, scales, *support),
        Command::Construct(c) => construct(cli, c),
        Command::Gen(g) => gen(cli, g),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn budget_exhausted(cert: &ClassCertificate) -> bool {
    matches!(cert.witness, Witness::IpSearch { exhausted: false, .. })
}

fn analyze_set(cli: &Cli, path: &Path, scales: &str, witness_dir: Option<&Path>) -> Result<Outcome> {
    let scales: Scales = scales.parse()?;
    let f = format::read_set(path).with_context(|| format!("reading {}", path.display()))?;
    let requests = [
        DetectorRequest::Thick { n: scales.n },
        DetectorRequest::Syndetic { g: scales.g },
        DetectorRequest::PiecewiseSyndetic {
            g: scales.g,
            n: scales.n,
        },
        DetectorRequest::Ip {
            d: scales.d,
            budget: scales.budget,
        },
        DetectorRequest::WeaklyThick {
            k_max: scales.k_max,
            n: scales.n,
        },
        DetectorRequest::Cofinite,
        DetectorRequest::Pubd {
            len: scales.length,
            delta: scales.delta,
        },
        DetectorRequest::ResidueSuperset {
            k_max: scales.k_max,
        },
    ];
    let certs = requests
        .iter()
        .map(|r| r.run(&f))
        .collect::<furstenberg_core::Result<Vec<_>>>()?;
    let replay_failures: Vec<String> = certs
        .iter()
        .filter_map(|c| replay(c, &f).err().map(|e| e.to_string()))
        .collect();
    let mut doc = json!({
        "horizon": f.horizon(),
        "elements": f.len(),
        "scales": to_value(&scales),
        "certificates": to_value(&certs),
        "replay_failures": replay_failures,
    });
    if let Some(dir) = witness_dir {
        let witnesses = family::load_witness_dir(dir)
            .with_context(|| format!("reading witnesses from {}", dir.display()))?;
        let sets: Vec<WindowSet> = witnesses.iter().map(|(_, s)| s.clone()).collect();
        let names: Vec<&str> = witnesses.iter().map(|(n, _)| n.as_str()).collect();
        let generated = family::generated_member(&sets, &f);
        let delta = family::delta_member(&f, &sets);
        let dual: Vec<Value> = witnesses
            .iter()
            .map(|(name, w)| {
                let r = family::delta_star_refute(&f, w);
                json!({"witness": name, "refuted": r.refuted, "intersection_size": r.intersection.len()})
            })
            .collect();
        doc["family"] = json!({
            "witnesses": names,
            "generated": {
                "member": generated.is_member(),
                "witness": generated.index.map(|i| names[i]),
                "truncated": generated.truncated,
            },
            "delta_member": delta.map(|i| names[i]),
            "delta_star": dual,
        });
    }
    let code = if !replay_failures.is_empty() {
        1
    } else if cli.strict && certs.iter().any(budget_exhausted) {
        3
    } else {
        0
    };
    Ok(Outcome { doc, code })
}

fn classify_seq(cli: &Cli, path: &Path, max_len: usize, scales: &str, support: bool) -> Result<Outcome> {
    let scales: Scales = scales.parse()?;
    let x = if support {
        SymbolicWord::indicator(format::read_set(path)?)?
    } else {
        format::read_sequence(path)?
    };
    let report = classify_point(&x, max_len, &scales)?;
    let violations = check_report_invariants(&report);
    let replay_failures = replay_report(&x, &report);
    let exhausted = report.cylinders.iter().any(|c| budget_exhausted(&c.ip));
    let mut doc = to_value(&report);
    doc["invariant_violations"] = json!(violations);
    doc["replay_failures"] = json!(replay_failures);
    let code = if !violations.is_empty() || !replay_failures.is_empty() {
        1
    } else if cli.strict && exhausted {
        3
    } else {
        0
    };
    Ok(Outcome { doc, code })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<String> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(name.to_string())
}

fn appendix_summary(trace: &AppendixTrace) -> Result<Value> {
    let separation = appendix::verify_separation(trace);
    let structure = appendix::verify_trace(trace);
    let mut stages = Vec::new();
    let mut claim2_all = true;
    for s in &trace.stages {
        let claim2 = appendix::verify_claim2(trace, s.n)?;
        claim2_all &= claim2.holds;
        let thick = if s.w.is_empty() {
            None
        } else {
            Some(detect::detect_thick(&s.w.difference_set(), 2)?)
        };
        stages.push(json!({
            "stage": s.n,
            "size": s.w.len(),
            "max": s.w.max(),
            "blocks": s.k,
            "written_blocks": s.written_k,
            "claim2": to_value(&claim2),
            "difference_thick_2": thick.map(|c| c.verdict),
        }));
    }
    let claim1: Vec<Value> = (2..trace.stages.len())
        .map(|n| appendix::verify_claim1(trace, n, 0).map(|r| to_value(&r)))
        .collect::<furstenberg_core::Result<_>>()?;
    Ok(json!({
        "horizon": trace.horizon,
        "separation": to_value(&separation),
        "monotone": structure.monotone,
        "planting_violation": structure.planting_violation,
        "claim2_all_stages": claim2_all,
        "block_count_mismatches": trace.block_count_mismatches(),
        "claim1": claim1,
        "stages": stages,
    }))
}

fn construct(cli: &Cli, c: &Construct) -> Result<Outcome> {
    match c {
        Construct::Appendix { stages, window } => {
            let trace = appendix::build_appendix(*stages, *window)?;
            let mut files = vec![write_file(
                &cli.out_dir,
                "appendix_trace.json",
                &serde_json::to_string(&trace)?,
            )?];
            let support = trace.final_set();
            files.push(write_file(&cli.out_dir, "appendix_support.set", &format::write_set(&support))?);
            if trace.horizon <= DENSE_EXPORT_LIMIT {
                let seq = format::write_sequence(&trace.point(), DENSE_EXPORT_LIMIT)?;
                files.push(write_file(&cli.out_dir, "appendix_point.seq", &seq)?);
            }
            let mut doc = appendix_summary(&trace)?;
            let ok = doc["separation"]["holds"] == json!(true)
                && doc["monotone"] == json!(true)
                && doc["planting_violation"].is_null()
                && doc["claim2_all_stages"] == json!(true);
            doc["files"] = json!(files);
            doc["verified"] = json!(ok);
            Ok(Outcome {
                doc,
                code: if ok { 0 } else { 1 },
            })
        }
        Construct::Wtp {
            k,
            quadratic_starts,
            starts,
            stages,
            window,
        } => {
            let starts = match (quadratic_starts, starts) {
                (true, _) => StartSpec::Quadratic,
                (false, Some(v)) => StartSpec::Explicit(v.clone()),
                (false, None) => bail!("pass --quadratic-starts or --starts"),
            };
            let spec = WtpSpec {
                k: *k,
                starts,
                stages: *stages,
                window: *window,
            };
            let trace = wtp::build_wtp(&spec)?;
            let check = wtp::verify_wtp(&trace);
            let point = trace.point();
            let entering = symbolic::entering_times(&point, &"1".parse()?)?;
            let contained = entering.is_subset(&trace.f0);
            let files = vec![
                write_file(&cli.out_dir, "wtp_trace.json", &serde_json::to_string(&trace)?)?,
                write_file(
                    &cli.out_dir,
                    "wtp_point.seq",
                    &format::write_sequence(&point, DENSE_EXPORT_LIMIT)?,
                )?,
            ];
            let ok = check.ok() && contained;
            Ok(Outcome {
                doc: json!({
                    "k": trace.k,
                    "window": trace.window,
                    "blocks": trace.stages.iter().map(|s| json!({"stage": s.n, "len": s.block_len, "planted": s.planted.len()})).collect::<Vec<_>>(),
                    "check": to_value(&check),
                    "entering_times_in_f0": contained,
                    "files": files,
                    "verified": ok,
                }),
                code: if ok { 0 } else { 1 },
            })
        }
    }
}

fn parse_runs(runs: &[String], geometric: &Option<String>) -> Result<Vec<RunSpec>> {
    if let Some(g) = geometric {
        let (base, count) = g
            .split_once(':')
            .context("--geometric expects base:count")?;
        return Ok(generators::geometric_runs(base.parse()?, count.parse()?));
    }
    runs.iter()
        .map(|r| {
            let (s, l) = r.split_once(':').context("runs are start:len")?;
            Ok(RunSpec {
                start: s.parse()?,
                len: l.parse()?,
            })
        })
        .collect()
}

fn gen(cli: &Cli, g: &Gen) -> Result<Outcome> {
    let set_doc = |s: WindowSet, cap: &Cap, default: &str| -> Result<Outcome> {
        let name = cap.name.clone().unwrap_or_else(|| format!("{default}.set"));
        let file = write_file(&cli.out_dir, &name, &format::write_set(&s))?;
        Ok(Outcome {
            doc: json!({"file": file, "horizon": s.horizon(), "elements": s.len()}),
            code: 0,
        })
    };
    match g {
        Gen::Fs { p, cap } => set_doc(generators::gen_fs(p, cap.cap)?, cap, "fs"),
        Gen::Thick { runs, geometric, cap } => set_doc(
            generators::gen_thick(&parse_runs(runs, geometric)?, cap.cap)?,
            cap,
            "thick",
        ),
        Gen::Syndetic { gaps, start, cap } => {
            set_doc(generators::gen_syndetic(gaps, *start, cap.cap)?, cap, "syndetic")
        }
        Gen::DilatedThick {
            k,
            runs,
            geometric,
            cap,
        } => set_doc(
            generators::gen_dilated_thick(*k, &parse_runs(runs, geometric)?, cap.cap)?,
            cap,
            "dilated_thick",
        ),
        Gen::Random { density, cap } => {
            set_doc(generators::gen_random(*density, cli.seed, cap.cap)?, cap, "random")
        }
        Gen::Pool {
            count,
            horizon,
            multiples,
        } => {
            let pool = if *multiples {
                generators::witness_pool(*count as u64, *horizon)?
            } else {
                generators::weakly_thick_pool(*count, cli.seed, *horizon)?
            };
            let files = pool
                .iter()
                .enumerate()
                .map(|(i, s)| write_file(&cli.out_dir, &format!("pool_{i:03}.set"), &format::write_set(s)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome {
                doc: json!({"files": files}),
                code: 0,
            })
        }
        Gen::DeBruijn {
            alphabet,
            order,
            len,
            name,
        } => {
            let cycle = symbolic::de_bruijn(*alphabet, *order)?;
            let symbols = match len {
                Some(l) => symbolic::cycled(&cycle, *l),
                None => cycle,
            };
            let word = SymbolicWord::new(*alphabet as u16, symbols)?;
            let name = name.clone().unwrap_or_else(|| "de_bruijn.seq".into());
            let file = write_file(&cli.out_dir, &name, &format::write_sequence(&word, DENSE_EXPORT_LIMIT)?)?;
            Ok(Outcome {
                doc: json!({"file": file, "len": word.len()}),
                code: 0,
            })
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Indented `key: value` rendering of the JSON document.
fn render_text(v: &Value, depth: usize) -> String {
    let pad = "  ".repeat(depth);
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match scalar(val) {
                    Some(s) if !s.contains('\n') => out.push_str(&format!("{pad}{k}: {s}\n")),
                    Some(s) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        out.push_str(&s);
                    }
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        out.push_str(&render_text(val, depth + 1));
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        out.push_str(&render_text(item, depth + 1));
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
    out
}
