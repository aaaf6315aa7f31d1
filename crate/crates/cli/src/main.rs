use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

mod run;
mod scenario;

use run::{Params, RunError};

const OK: u8 = 0;
const ASSERTION: u8 = 1;
const PARSE: u8 = 2;
const INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "qgraded", version, about = "Run graded-geometry scenarios")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a scenario file.
    Run {
        scenario: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario degree bound.
        #[arg(long)]
        degree_bound: Option<u32>,
        #[arg(long)]
        verbose: bool,
    },
}

fn main() -> ExitCode {
    let Cmd::Run {
        scenario: path,
        report,
        seed,
        degree_bound,
        verbose,
    } = Cli::parse().cmd;

    let sc = match scenario::load(&path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("parse error: {}", e);
            return ExitCode::from(PARSE);
        }
    };
    let params = Params {
        seed: seed.or(sc.seed),
        degree_bound: degree_bound.or(sc.degree_bound),
        samples: sc.samples,
    };

    let start = Instant::now();
    let res = panic::catch_unwind(AssertUnwindSafe(|| run::execute(&sc, &params)));
    let out = match res {
        Ok(Ok(o)) => o,
        Ok(Err(RunError::Scenario(e))) => {
            eprintln!("parse error: {}: {}", path.display(), e);
            return ExitCode::from(PARSE);
        }
        Ok(Err(RunError::Internal(m))) => {
            eprintln!("internal error: {}", m);
            return ExitCode::from(INTERNAL);
        }
        Err(_) => {
            eprintln!("internal error: kernel panicked");
            return ExitCode::from(INTERNAL);
        }
    };
    let elapsed = start.elapsed();

    // No expectations means every check must pass.
    let mut expect = sc.expect.clone();
    if expect.is_empty() {
        expect.insert("all_pass".into(), Value::Bool(true));
    }
    let mut assertions = Vec::new();
    for (k, want) in &expect {
        let Some(got) = out.facts.get(k) else {
            eprintln!(
                "parse error: {}: expect.{}: not produced by workflow {}",
                path.display(),
                k,
                sc.workflow.name()
            );
            return ExitCode::from(PARSE);
        };
        assertions.push(json!({ "key": k, "expected": want, "actual": got, "pass": got == want }));
    }
    let passed = assertions.iter().all(|a| a["pass"] == true);

    println!("scenario {} ({})", sc.name, sc.workflow.name());
    for c in &out.checks {
        print!("  {} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
        if let Some(d) = &c.detail {
            print!(" [{}]", d);
        }
        println!();
        if let Some(cert) = &c.certificate {
            println!("       certificate: {}", cert);
        }
    }
    for a in &assertions {
        println!(
            "  assert {} = {}: {}",
            a["key"].as_str().unwrap_or_default(),
            a["expected"],
            if a["pass"] == true { "ok" } else { "FAILED" }
        );
        if a["pass"] != true {
            println!("       actual: {}", a["actual"]);
        }
    }
    if verbose {
        for (k, v) in &out.data {
            println!("  {} = {}", k, v);
        }
        eprintln!("elapsed {:.3}s", elapsed.as_secs_f64());
    }
    println!("result: {}", if passed { "PASS" } else { "FAIL" });

    if let Some(rp) = report {
        let doc = json!({
            "schema_version": scenario::SCHEMA_VERSION,
            "scenario": sc.name,
            "workflow": sc.workflow.name(),
            "parameters": params,
            "checks": out.checks,
            "facts": out.facts,
            "data": out.data,
            "assertions": assertions,
            "passed": passed,
        });
        let body = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
        if let Err(e) = std::fs::write(&rp, body) {
            eprintln!("internal error: writing {}: {}", rp.display(), e);
            return ExitCode::from(INTERNAL);
        }
    }
    ExitCode::from(if passed { OK } else { ASSERTION })
}
