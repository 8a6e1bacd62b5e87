//! Subcommand implementations. Each returns the process exit code.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use chowcheck_core::classes::verify_cg_identity;
use chowcheck_core::cone::{
    default_witness_bound, find_invariance_witness, fixed_stratum_check, in_ctilde, is_smooth,
    parse_cone,
};
use chowcheck_core::grr::{delta, parse_cycle_expr, reduce, theorem_grr_certify, BoundaryConfig};
use chowcheck_core::numbers::{bernoulli, euler_number};
use chowcheck_core::weight_one::verify_lemma21;

use crate::checks::{registry, CheckEnv};
use crate::fixtures::FixtureSet;
use crate::report::{fnv64_digest, CheckRecord, RunReport};

/// Environment variable overriding the directory for report files.
pub const OUT_DIR_ENV: &str = "CHOWCHECK_OUT_DIR";

pub fn cmd_numbers(bernoulli_indices: &[usize], euler_indices: &[usize]) -> Result<i32> {
    if bernoulli_indices.is_empty() && euler_indices.is_empty() {
        bail!("nothing to print; pass --bernoulli N and/or --euler N");
    }
    for &n in bernoulli_indices {
        println!("{}", bernoulli(n));
    }
    for &n in euler_indices {
        println!("{}", euler_number(n));
    }
    Ok(0)
}

pub fn cmd_identities(run_cg: bool, run_lambda: bool, g: usize, trunc: usize) -> Result<i32> {
    if !run_cg && !run_lambda {
        bail!("select at least one of --cg / --lambda-product");
    }
    let mut ok = true;
    if run_cg {
        let report = verify_cg_identity(g, trunc);
        if report.passed() {
            println!("cg-identity g={g} D={trunc}: pass");
        } else {
            ok = false;
            println!(
                "cg-identity g={g} D={trunc}: FAIL at degree {}",
                report.first_failing_degree.unwrap()
            );
            for (d, residual) in &report.residual_degrees {
                if !residual.is_zero() {
                    println!("  degree {d} residual:");
                    for line in residual.render_lines() {
                        println!("    {line}");
                    }
                }
            }
        }
    }
    if run_lambda {
        let h = chowcheck_core::classes::KClass::hodge_sum(g);
        let enumerated = chowcheck_core::classes::lambda_t_ch_by_enumeration(&h, trunc)
            .map_err(|e| anyhow!("{e}"))?;
        let product = chowcheck_core::classes::lambda_t_ch_by_product(&h, trunc)
            .map_err(|e| anyhow!("{e}"))?;
        let mut mismatch = None;
        for (k, (a, b)) in enumerated.iter().zip(&product).enumerate() {
            if a != b {
                mismatch = Some(k);
                break;
            }
        }
        match mismatch {
            None => println!(
                "lambda-product g={g} D={trunc}: pass ({} coefficients)",
                enumerated.len()
            ),
            Some(k) => {
                ok = false;
                println!("lambda-product g={g} D={trunc}: FAIL at t^{k}");
                println!("  enumeration route:");
                for line in enumerated[k].render_lines() {
                    println!("    {line}");
                }
                println!("  product route:");
                for line in product[k].render_lines() {
                    println!("    {line}");
                }
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}

pub fn cmd_lemma21(g: usize, trunc: usize, json: bool) -> Result<i32> {
    let report = verify_lemma21(g, trunc)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("genus {g}, truncation {trunc}");
        println!("degree-1 cancellation: {}", report.degree_one_cancels);
        for (d, expr) in &report.odd_residuals {
            println!("odd degree {d}: residual {expr}");
        }
        for (n, lambda) in &report.even_ratios {
            println!("degree {}: P = {lambda} * ch(H), multiplier nonzero", 2 * n);
        }
        println!(
            "certified: every even piece of ch(H) is forced to vanish = {}",
            report.nonvanishing_certified
        );
    }
    Ok(if report.nonvanishing_certified { 0 } else { 1 })
}

fn load_config(path: &Path) -> Result<BoundaryConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    BoundaryConfig::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn cmd_grr_certify(path: &Path) -> Result<i32> {
    let cfg = load_config(path)?;
    match theorem_grr_certify(&cfg) {
        Ok(report) => {
            for line in report.ledger_lines(&cfg) {
                println!("{line}");
            }
            println!(
                "{}: {}",
                path.display(),
                if report.certified {
                    "certified"
                } else {
                    "NOT certified"
                }
            );
            Ok(if report.certified { 0 } else { 1 })
        }
        Err(e) => {
            println!("{}: rejected: {e}", path.display());
            Ok(1)
        }
    }
}

pub fn cmd_grr_delta(path: &Path, set: &str) -> Result<i32> {
    let cfg = load_config(path)?;
    let indices: BTreeSet<usize> = set
        .split(',')
        .map(|s| cfg.y_index(s.trim()).map_err(|e| anyhow!("{e}")))
        .collect::<Result<_>>()?;
    let d = delta(&indices, &cfg).map_err(|e| anyhow!("{e}"))?;
    println!("delta({}) = {d}", cfg.render_y_set(&indices));
    println!("residue factors through the relative log forms: {}", d > 0);
    Ok(0)
}

pub fn cmd_grr_reduce(path: &Path, expr_src: &str) -> Result<i32> {
    let cfg = load_config(path)?;
    let expr = parse_cycle_expr(expr_src, &cfg).map_err(|e| anyhow!("{e}"))?;
    let reduction = reduce(&expr, &cfg).map_err(|e| anyhow!("{e}"))?;
    for step in &reduction.steps {
        match step {
            chowcheck_core::grr::ReduceStep::Killed {
                monomial,
                coeff,
                reason,
            } => println!("kill {coeff}*{} ({reason:?})", monomial.render(&cfg)),
            chowcheck_core::grr::ReduceStep::Substituted {
                monomial,
                coeff,
                step,
            } => println!(
                "substitute {} in {coeff}*{} via Gamma = {}",
                cfg.y_name(step.index),
                monomial.render(&cfg),
                step.gamma.render(&cfg)
            ),
        }
    }
    if !reduction.passed_through.is_zero() {
        println!(
            "passed through (misses the multiple locus): {}",
            reduction.passed_through.render(&cfg)
        );
    }
    println!("normal form: {}", reduction.normal.render(&cfg));
    Ok(0)
}

pub fn cmd_cone_check(path: &Path, even_level: bool, bound: Option<i64>) -> Result<i32> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cone = parse_cone(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let smooth = is_smooth(&cone);
    println!("generators: {}", cone.generators().len());
    for (i, gen) in cone.generators().iter().enumerate() {
        println!(
            "  generator {}: {gen} (in support locus: {})",
            i + 1,
            in_ctilde(gen)
        );
    }
    println!("smooth (partial Z-basis): {smooth}");
    let bound = bound.unwrap_or_else(|| default_witness_bound(&cone));
    match find_invariance_witness(&cone, bound) {
        None => {
            println!("no involution witness found (bounded search, bound = {bound})");
            Ok(0)
        }
        Some(witness) => {
            println!(
                "involution witness: permutation {:?}, mu = {:?}",
                witness.perm, witness.mu
            );
            if !even_level {
                println!("fixed-stratum check skipped (pass --even-level to run it)");
                return Ok(0);
            }
            if !smooth {
                println!("fixed-stratum check unavailable: cone is not smooth");
                return Ok(1);
            }
            let report =
                fixed_stratum_check(&cone, &witness, cone.context()).map_err(|e| anyhow!("{e}"))?;
            println!("{report}");
            Ok(0)
        }
    }
}

pub struct VerifyOptions {
    pub g_max: usize,
    pub d_max: usize,
    pub fixtures_dir: Option<PathBuf>,
    pub only: Vec<String>,
    pub list: bool,
    pub report_path: Option<PathBuf>,
    pub quiet: bool,
}

/// Run the registry and assemble the report. Shared by `verify-all` and
/// `report`.
pub fn run_registry(opts: &VerifyOptions) -> Result<RunReport> {
    let fixtures = match &opts.fixtures_dir {
        Some(dir) => FixtureSet::from_dir(dir)?,
        None => FixtureSet::bundled(),
    };
    let mut params = BTreeMap::new();
    params.insert("g_max".to_string(), opts.g_max.to_string());
    params.insert("d_max".to_string(), opts.d_max.to_string());
    if !opts.only.is_empty() {
        params.insert("only".to_string(), opts.only.join(","));
    }
    let mut digest_input = fixtures.digest_bytes();
    digest_input.extend_from_slice(format!("{}:{}", opts.g_max, opts.d_max).as_bytes());
    let digest = fnv64_digest(&digest_input);

    let env = CheckEnv {
        g_max: opts.g_max,
        d_max: opts.d_max,
        fixtures,
    };
    let mut report = RunReport::new("verify-all", params, digest);
    for check in registry(opts.g_max) {
        let name = check.name();
        if !opts.only.is_empty() && !opts.only.contains(&name) {
            continue;
        }
        let start = Instant::now();
        let outcome = check
            .run(&env)
            .with_context(|| format!("check {name} errored"))?;
        let elapsed = start.elapsed().as_millis();
        report.push(
            CheckRecord {
                name,
                description: check.description(),
                passed: outcome.passed,
                details: outcome.details,
            },
            elapsed,
        );
    }
    if report.checks.is_empty() {
        bail!("no checks selected; see `verify-all --list`");
    }
    Ok(report)
}

pub fn cmd_verify_all(opts: &VerifyOptions) -> Result<i32> {
    if opts.list {
        for check in registry(opts.g_max) {
            println!("{:32} {}", check.name(), check.description());
        }
        return Ok(0);
    }
    let report = run_registry(opts)?;
    if !opts.quiet {
        print!("{}", report.to_text());
    }
    if let Some(path) = &opts.report_path {
        let path = resolve_out_path(path)?;
        fs::write(&path, report.to_json())
            .with_context(|| format!("writing {}", path.display()))?;
        if !opts.quiet {
            eprintln!("report written to {}", path.display());
        }
    }
    Ok(if report.passed() { 0 } else { 1 })
}

pub enum ReportFormat {
    Text,
    Json,
}

pub fn cmd_report(opts: &VerifyOptions, format: ReportFormat, out: Option<&Path>) -> Result<i32> {
    let report = run_registry(opts)?;
    let body = match format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Json => report.to_json(),
    };
    match out {
        None => print!("{body}"),
        Some(path) => {
            let path = resolve_out_path(path)?;
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    // Timings go to stderr, never into the machine-readable body.
    for (name, ms) in &report.timings_ms {
        eprintln!("timing {name}: {ms} ms");
    }
    Ok(if report.passed() { 0 } else { 1 })
}

/// Relative output paths land in `CHOWCHECK_OUT_DIR` when it is set.
fn resolve_out_path(path: &Path) -> Result<PathBuf> {
    if path.is_absolute() {
        return Ok(path.to_path_buf());
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
            Ok(dir.join(path))
        }
        None => Ok(path.to_path_buf()),
    }
}
