use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use dynred_core::amortization::{fit_exponent, ScalingFit};
use dynred_core::dyngraph::OpCounters;
use dynred_core::instances::{
    gen_cnf, gen_oumv, gen_tcstar, plant_tcstar, validate_tcstar, CnfFormula, OuMvInstance, TcStarInstance,
};
use dynred_core::oracles::{oumv_oracle, sat_oracle, tcstar_oracle};
use dynred_core::reduction::diameter::{
    solve_alpha, solve_tcstar_incremental, solve_tcstar_node_addition_with, solve_tcstar_static,
    solve_tcstar_subdivided, verify_h_distances, build_h, BfsRefreshCost, InsertCost, UnitCost,
};
use dynred_core::reduction::flow::{solve_sat_decremental, solve_sat_via_flow};
use dynred_core::reduction::matching::{
    base_size, closed_form_insertions, solve_oumv_decremental, solve_oumv_via_matching,
};

use crate::report::{Answers, InstanceDigest, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dynred_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 3 for guard violations, 2 for every other input problem.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(dynred_core::Error::Guard(_)) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command hands back to `main` for printing.
pub struct Output {
    pub json: Value,
    pub csv: String,
    /// False when some reduction disagreed with its oracle.
    pub ok: bool,
}

pub struct Context {
    pub seed: u64,
    pub command: Vec<String>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_or_print(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bits(v: &[bool]) -> Value {
    Value::from(v.iter().map(|&b| b as u8).collect::<Vec<_>>())
}

// ---------------------------------------------------------------- gen

pub fn gen_oumv_file(n: usize, density: f64, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let inst = gen_oumv(n, density, seed)?;
    write_or_print(out, &(inst.to_json() + "\n"))
}

/// DIMACS unless the output path ends in `.json`.
pub fn gen_cnf_file(vars: usize, clauses: usize, width: usize, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let f = gen_cnf(vars, clauses, width, seed)?;
    let json = out.is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    write_or_print(out, &if json { f.to_json() + "\n" } else { f.to_dimacs() })
}

pub fn gen_tcstar_file(
    n: usize,
    delta: usize,
    p: usize,
    density: f64,
    plant: Option<(usize, usize, usize)>,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<()> {
    let inst = match plant {
        Some(target) => plant_tcstar(n, delta, p, seed, target)?,
        None => gen_tcstar(n, delta, p, density, seed)?,
    };
    let report = validate_tcstar(&inst);
    if !report.is_ok() {
        return Err(CliError::Usage(format!("generated instance invalid: {}", report.violations[0])));
    }
    write_or_print(out, &(inst.to_json() + "\n"))
}

// ---------------------------------------------------------------- solve

fn oumv_digest(inst: &OuMvInstance) -> InstanceDigest {
    InstanceDigest::new("oumv", &inst.to_json(), json!({ "n": inst.n(), "matrix_ones": inst.matrix().count_ones() }))
}

fn cnf_digest(f: &CnfFormula) -> InstanceDigest {
    InstanceDigest::new("cnf", &f.to_json(), json!({ "num_vars": f.num_vars(), "clauses": f.clauses().len() }))
}

fn tcstar_digest(inst: &TcStarInstance) -> InstanceDigest {
    InstanceDigest::new(
        "tcstar",
        &inst.to_json(),
        json!({ "n": inst.n, "delta": inst.delta, "p": inst.p, "bc_edges": inst.bc.len() }),
    )
}

fn finish(report: RunReport) -> Output {
    let ok = report.agreement;
    let csv = report.to_csv();
    Output { json: serde_json::to_value(&report).expect("report serializes"), csv, ok }
}

pub fn solve_matching(ctx: &Context, instance: &Path, decremental: bool) -> CliResult<Output> {
    let inst = OuMvInstance::from_json(&read(instance)?)?;
    let start = Instant::now();
    let run = if decremental { solve_oumv_decremental(&inst)? } else { solve_oumv_via_matching(&inst)? };
    let elapsed = start.elapsed();
    // decremental queries come out in reverse phase order
    let mut phase_bits = run.bits.clone();
    let mut sizes = run.sizes.clone();
    if decremental {
        phase_bits.reverse();
        sizes.reverse();
    }
    let oracle = oumv_oracle(&inst);
    Ok(finish(RunReport {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: ctx.command.clone(),
        seed: ctx.seed,
        mode: format!("matching/{}", if decremental { "decremental" } else { "incremental" }),
        instance: Some(oumv_digest(&inst)),
        answers: Answers { reduction: bits(&phase_bits), oracle: bits(&oracle) },
        agreement: phase_bits == oracle,
        counters: run.counters,
        credit_ledger: None,
        details: json!({ "sizes": sizes, "closed_form_insertions": closed_form_insertions(&inst) }),
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
    }))
}

pub fn solve_flow(ctx: &Context, cnf: &Path, early_exit: bool, decremental: bool) -> CliResult<Output> {
    let f = CnfFormula::parse(&read(cnf)?)?;
    if early_exit && decremental {
        return Err(CliError::Usage("--early-exit and --decremental are exclusive".into()));
    }
    let start = Instant::now();
    let run = if decremental { solve_sat_decremental(&f)? } else { solve_sat_via_flow(&f, early_exit)? };
    let elapsed = start.elapsed();
    let oracle = sat_oracle(&f)?;
    let mode = if decremental {
        "decremental"
    } else if early_exit {
        "incremental-early-exit"
    } else {
        "incremental"
    };
    Ok(finish(RunReport {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: ctx.command.clone(),
        seed: ctx.seed,
        mode: format!("flow/{mode}"),
        instance: Some(cnf_digest(&f)),
        answers: Answers { reduction: json!(run.satisfiable), oracle: json!(oracle) },
        agreement: run.satisfiable == oracle,
        counters: run.counters,
        credit_ledger: None,
        details: json!({ "big_n": run.big_n, "phases": run.phases }),
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DiameterMode {
    Static,
    Incremental,
    NodeAdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CostModel {
    /// One step per insertion.
    Unit,
    /// A BFS from the touched node after every insertion.
    BfsRefresh,
}

pub struct DiameterArgs {
    pub mode: DiameterMode,
    pub gamma: f64,
    pub alpha: Option<f64>,
    pub subdivide: Option<usize>,
    pub cost: CostModel,
}

pub fn solve_diameter(ctx: &Context, instance: &Path, args: &DiameterArgs) -> CliResult<Output> {
    let inst = TcStarInstance::from_json(&read(instance)?)?;
    // check the guard before spending time on the reduction
    let oracle = tcstar_oracle(&inst)?;
    let start = Instant::now();
    let mut ledger = None;
    let (answer, counters, details, mode) = match (args.mode, args.subdivide) {
        (DiameterMode::NodeAdd, Some(_)) => {
            return Err(CliError::Usage("--subdivide applies to static and incremental modes".into()));
        }
        (_, Some(s)) => {
            let run = solve_tcstar_subdivided(&inst, s)?;
            let counters = OpCounters {
                insertions: run.edge_count as u64,
                node_insertions: run.node_count as u64,
                ..OpCounters::default()
            };
            (run.answer, counters, serde_json::to_value(&run).expect("serializes"), format!("subdivided s={s}"))
        }
        (DiameterMode::Static, None) => {
            let run = solve_tcstar_static(&inst, args.gamma)?;
            let details = json!({ "gamma": run.gamma, "block_diameters": run.block_diameters });
            (run.answer, run.counters, details, "static".to_string())
        }
        (DiameterMode::Incremental, None) => {
            let run = solve_tcstar_incremental(&inst)?;
            let details = json!({ "diameter": run.diameter, "nodes": run.node_count, "edges": run.edge_count });
            (run.answer, run.counters, details, "incremental".to_string())
        }
        (DiameterMode::NodeAdd, None) => {
            let alpha = args.alpha.unwrap_or_else(solve_alpha);
            let mut cost: Box<dyn InsertCost> = match args.cost {
                CostModel::Unit => Box::new(UnitCost),
                CostModel::BfsRefresh => Box::new(BfsRefreshCost),
            };
            let run = solve_tcstar_node_addition_with(&inst, alpha, cost.as_mut())?;
            let details = json!({
                "alpha": alpha,
                "phase_diameters": run.phase_diameters,
                "nodes_after_setup": run.nodes_after_setup,
                "final_node_count": run.final_node_count,
            });
            ledger = Some(run.ledger);
            (run.answer, run.counters, details, "node-add".to_string())
        }
    };
    let elapsed = start.elapsed();
    Ok(finish(RunReport {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: ctx.command.clone(),
        seed: ctx.seed,
        mode: format!("diameter/{mode}"),
        instance: Some(tcstar_digest(&inst)),
        answers: Answers {
            reduction: json!(answer),
            oracle: json!({ "answer": oracle.answer, "witnesses": oracle.witnesses }),
        },
        agreement: answer == oracle.answer,
        counters,
        credit_ledger: ledger,
        details,
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
    }))
}

// ---------------------------------------------------------------- verify

/// Inclusive `a..b` or a single value.
pub fn parse_range(text: &str) -> Result<(usize, usize), String> {
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad number `{s}` in range `{text}`"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range `{text}`"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Serialize)]
struct Failure {
    index: usize,
    seed: u64,
    detail: String,
}

#[derive(Debug, Serialize)]
struct Sweep {
    tool_version: &'static str,
    command: Vec<String>,
    problem: &'static str,
    seed: u64,
    count: usize,
    range: (usize, usize),
    agreements: usize,
    failures: Vec<Failure>,
    counters: OpCounters,
    wall_time_ms: f64,
}

fn add_counters(total: &mut OpCounters, c: &OpCounters) {
    total.insertions += c.insertions;
    total.node_insertions += c.node_insertions;
    total.queries += c.queries;
    total.elementary_steps += c.elementary_steps;
}

fn sweep(
    ctx: &Context,
    problem: &'static str,
    count: usize,
    range: (usize, usize),
    mut one: impl FnMut(usize, &mut ChaCha8Rng, &mut OpCounters) -> CliResult<Option<String>>,
) -> CliResult<Output> {
    let start = Instant::now();
    let mut master = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut failures = Vec::new();
    let mut counters = OpCounters::default();
    for index in 0..count {
        let seed = master.gen();
        let size = master.gen_range(range.0..=range.1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(detail) = one(size, &mut rng, &mut counters)? {
            failures.push(Failure { index, seed, detail });
        }
    }
    let sweep = Sweep {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: ctx.command.clone(),
        problem,
        seed: ctx.seed,
        count,
        range,
        agreements: count - failures.len(),
        failures,
        counters,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let csv = format!(
        "problem,count,agreements,failures\n{},{},{},{}\n",
        problem,
        count,
        sweep.agreements,
        sweep.failures.len()
    );
    Ok(Output { ok: sweep.failures.is_empty(), json: serde_json::to_value(&sweep).expect("serializes"), csv })
}

pub fn verify_matching(ctx: &Context, count: usize, n: (usize, usize)) -> CliResult<Output> {
    if n.0 == 0 {
        return Err(CliError::Usage("matrix size must be at least 1".into()));
    }
    sweep(ctx, "matching", count, n, |n, rng, total| {
        let density = rng.gen_range(0.05..0.8);
        let inst = gen_oumv(n, density, rng.gen())?;
        let run = solve_oumv_via_matching(&inst)?;
        add_counters(total, &run.counters);
        let oracle = oumv_oracle(&inst);
        if run.bits != oracle {
            return Ok(Some(format!("n={n}: bits differ from oracle")));
        }
        for (i, (&size, &bit)) in run.sizes.iter().zip(&oracle).enumerate() {
            if size != base_size(n, i) + bit as usize {
                return Ok(Some(format!("n={n} phase {i}: matching size {size}")));
            }
        }
        if run.counters.insertions != closed_form_insertions(&inst) {
            return Ok(Some(format!("n={n}: insertion count off the closed form")));
        }
        Ok(None)
    })
}

pub fn verify_flow(ctx: &Context, count: usize, vars: (usize, usize)) -> CliResult<Output> {
    sweep(ctx, "flow", count, vars, |v, rng, total| {
        // round odd sizes up to the next even count
        let v = (v + 1) & !1;
        let clauses = rng.gen_range(2..=4 * v.max(1));
        let f = gen_cnf(v.max(2), clauses, 3.min(v.max(2)), rng.gen())?;
        let run = solve_sat_via_flow(&f, false)?;
        add_counters(total, &run.counters);
        let oracle = sat_oracle(&f)?;
        if run.satisfiable != oracle {
            return Ok(Some(format!("vars={v}: flow says {}, oracle {oracle}", run.satisfiable)));
        }
        for p in &run.phases {
            if p.pre_value != (p.phase as i64 - 1) * run.big_n {
                return Ok(Some(format!("vars={v} phase {}: pre-phase value {}", p.phase, p.pre_value)));
            }
            if !oracle && p.value != p.phase as i64 * run.big_n {
                return Ok(Some(format!("vars={v} phase {}: value {} on unsat input", p.phase, p.value)));
            }
        }
        Ok(None)
    })
}

pub fn verify_diameter(ctx: &Context, count: usize, n: (usize, usize)) -> CliResult<Output> {
    if n.0 == 0 {
        return Err(CliError::Usage("color count must be at least 1".into()));
    }
    let alpha = solve_alpha();
    sweep(ctx, "diameter", count, n, |n, rng, total| {
        let (delta, p) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let inst = if rng.gen_bool(0.5) {
            let target = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            plant_tcstar(n, delta, p, rng.gen(), target)?
        } else {
            gen_tcstar(n, delta, p, rng.gen_range(0.1..0.95), rng.gen())?
        };
        let oracle = tcstar_oracle(&inst)?.answer;
        let h = build_h(&inst, 1.0, 0)?;
        let lemma = verify_h_distances(&h, &inst)?;
        if let Some(m) = lemma.mismatches.first() {
            return Ok(Some(format!("n={n}: distance mismatch {m:?}")));
        }
        let mut answers = Vec::new();
        for gamma in [1.0, 0.5] {
            let run = solve_tcstar_static(&inst, gamma)?;
            add_counters(total, &run.counters);
            answers.push((format!("static gamma={gamma}"), run.answer));
        }
        let inc = solve_tcstar_incremental(&inst)?;
        add_counters(total, &inc.counters);
        answers.push(("incremental".into(), inc.answer));
        let na = solve_tcstar_node_addition_with(&inst, alpha, &mut UnitCost)?;
        add_counters(total, &na.counters);
        answers.push(("node-add".into(), na.answer));
        for (driver, answer) in answers {
            if answer != oracle {
                return Ok(Some(format!("n={n}: {driver} says {answer}, oracle {oracle}")));
            }
        }
        Ok(None)
    })
}

// ---------------------------------------------------------------- bench

#[derive(Debug, Serialize)]
struct BenchRow {
    size: usize,
    insertions: u64,
    queries: u64,
    elementary_steps: u64,
    /// Expected insertions where a closed form exists.
    expected_insertions: Option<u64>,
}

#[derive(Debug, Serialize)]
struct Bench {
    tool_version: &'static str,
    command: Vec<String>,
    problem: &'static str,
    seed: u64,
    rows: Vec<BenchRow>,
    fit: ScalingFit,
}

fn check_sizes(sizes: &[usize]) -> CliResult<()> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("bench sizes must be at least two strictly ascending values".into()));
    }
    Ok(())
}

fn bench_output(ctx: &Context, problem: &'static str, rows: Vec<BenchRow>) -> CliResult<Output> {
    let samples: Vec<(u64, u64)> = rows.iter().map(|r| (r.size as u64, r.elementary_steps)).collect();
    let fit = fit_exponent(&samples)?;
    let mut csv = String::from("size,insertions,queries,elementary_steps\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{}\n", r.size, r.insertions, r.queries, r.elementary_steps));
    }
    csv.push_str(&format!("# fit exponent={:.4} intercept={:.4} residual={:.4}\n", fit.exponent, fit.intercept, fit.residual));
    let ok = rows.iter().all(|r| r.expected_insertions.is_none_or(|e| e == r.insertions));
    let bench = Bench { tool_version: env!("CARGO_PKG_VERSION"), command: ctx.command.clone(), problem, seed: ctx.seed, rows, fit };
    Ok(Output { json: serde_json::to_value(&bench).expect("serializes"), csv, ok })
}

pub fn bench_matching(ctx: &Context, sizes: &[usize]) -> CliResult<Output> {
    check_sizes(sizes)?;
    let mut rows = Vec::new();
    for &n in sizes {
        let inst = gen_oumv(n, 0.5, ctx.seed)?;
        let run = solve_oumv_via_matching(&inst)?;
        rows.push(BenchRow {
            size: n,
            insertions: run.counters.insertions,
            queries: run.counters.queries,
            elementary_steps: run.counters.elementary_steps,
            expected_insertions: Some(closed_form_insertions(&inst)),
        });
    }
    bench_output(ctx, "matching", rows)
}

pub fn bench_flow(ctx: &Context, sizes: &[usize]) -> CliResult<Output> {
    check_sizes(sizes)?;
    let mut rows = Vec::new();
    for &v in sizes {
        let f = gen_cnf(v, 4 * v, 3.min(v), ctx.seed)?;
        let run = solve_sat_via_flow(&f, false)?;
        rows.push(BenchRow {
            size: v,
            insertions: run.counters.insertions,
            queries: run.counters.queries,
            elementary_steps: run.counters.elementary_steps,
            expected_insertions: None,
        });
    }
    bench_output(ctx, "flow", rows)
}

pub fn bench_diameter(ctx: &Context, sizes: &[usize]) -> CliResult<Output> {
    check_sizes(sizes)?;
    let mut rows = Vec::new();
    for &n in sizes {
        let inst = gen_tcstar(n, 2, 2, 0.5, ctx.seed)?;
        let run = solve_tcstar_incremental(&inst)?;
        rows.push(BenchRow {
            size: n,
            insertions: run.counters.insertions,
            queries: run.counters.queries,
            elementary_steps: run.counters.elementary_steps,
            expected_insertions: Some(run.edge_count as u64),
        });
    }
    bench_output(ctx, "diameter", rows)
}
