use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;
use xtalk_core::analysis::{affinity, impact_matrix, similarity_report, stress_points, stress_regression, Regression};
use xtalk_core::archive::{self, ArchiveError};
use xtalk_core::backend::PRESETS;
use xtalk_core::circuits::{benchmark_circuit, Family};
use xtalk_core::protocol::{run_pairwise_campaign, run_stress, CampaignResult, StressOrder};
use xtalk_core::scheduler::{select_cohort_sized, Cohort, CohortSize, JobQueue, Solver, MAX_EXHAUSTIVE_QUEUE};
use xtalk_core::sim::MAX_SIMULATED_QUBITS;
use xtalk_core::topology::topology_by_name;
use xtalk_core::{AffinityTable, BackendProfile, ImpactMatrix, SimilarityReport};

use crate::svg;
use crate::{AnalyzeArgs, Classify, DemoArgs, Failure, Outcome, RunArgs, ScheduleArgs, SsimArgs, StressArgs};

const TOOL: &str = concat!("xtalk ", env!("CARGO_PKG_VERSION"));

/// Validated run parameters, echoed into every archive.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub tool: &'static str,
    pub command: &'static str,
    pub backend: String,
    pub families: Vec<Family>,
    pub qubits: usize,
    pub p: usize,
    pub trials: usize,
    pub shots: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<StressOrder>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ranking: Option<Vec<Family>>,
}

fn padding(p: i64) -> Outcome<usize> {
    usize::try_from(p).map_err(|_| Failure::Usage(anyhow!("padding depth must be non-negative, got {p}")))
}

fn parse_family(s: &str) -> Outcome<Family> {
    match s.trim().parse::<Family>() {
        Ok(Family::Custom) | Err(_) => Err(Failure::Usage(anyhow!("unknown benchmark family `{s}`"))),
        Ok(f) => Ok(f),
    }
}

fn parse_families(list: &[String]) -> Outcome<Vec<Family>> {
    let fams = list.iter().map(|s| parse_family(s)).collect::<Outcome<Vec<_>>>()?;
    if fams.is_empty() {
        return Err(Failure::Usage(anyhow!("at least one family is required")));
    }
    for (i, f) in fams.iter().enumerate() {
        if fams[..i].contains(f) {
            return Err(Failure::Usage(anyhow!("family {f} listed twice")));
        }
    }
    Ok(fams)
}

fn backend(name: &str) -> Outcome<BackendProfile> {
    BackendProfile::resolve(name).with_context(|| format!("backend `{name}`")).usage()
}

fn validate(args: &RunArgs, command: &'static str, tenants: usize) -> Outcome<(RunConfig, BackendProfile)> {
    let p = padding(args.p)?;
    let usage = |msg: String| Err(Failure::Usage(anyhow!(msg)));
    if args.trials == 0 {
        return usage("--trials must be at least 1".into());
    }
    if args.shots == 0 {
        return usage("--shots must be at least 1".into());
    }
    if args.qubits < 2 {
        return usage(format!("--qubits must be at least 2, got {}", args.qubits));
    }
    if args.qubits * tenants > MAX_SIMULATED_QUBITS {
        return usage(format!(
            "{tenants} tenants of {} qubits exceed the {MAX_SIMULATED_QUBITS}-qubit simulator",
            args.qubits
        ));
    }
    if args.jobs == Some(0) {
        return usage("--jobs must be at least 1".into());
    }
    let families = parse_families(&args.families)?;
    let profile = backend(&args.backend)?;
    let config = RunConfig {
        tool: TOOL,
        command,
        backend: args.backend.clone(),
        families,
        qubits: args.qubits,
        p,
        trials: args.trials,
        shots: args.shots,
        seed: args.seed,
        order: None,
        target: None,
        ranking: None,
    };
    Ok((config, profile))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Outcome<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().runtime()?;
            Ok(pool.install(f))
        }
    }
}

fn write(path: &Path, text: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).runtime()?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).runtime()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).runtime()?;
    text.push('\n');
    write(path, &text)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Outcome<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display())).usage()?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} {}", path.display())).usage()
}

/// Missing roots are usage errors; anything wrong inside them is a runtime one.
fn archive_error(e: ArchiveError) -> Failure {
    match e {
        ArchiveError::Missing(_) | ArchiveError::Empty(_) => Failure::Usage(e.into()),
        other => Failure::Runtime(other.into()),
    }
}

pub fn topology(name: &str, out: Option<&Path>) -> Outcome {
    let map = topology_by_name(name).usage()?;
    let text = serde_json::to_string_pretty(&map).runtime()? + "\n";
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn profiles() -> Outcome {
    println!("{:<18} {:<10} {:<12} {:>6} {:>8} {:>8}", "label", "family", "topology", "zz", "depol2q", "readout");
    for (label, _) in PRESETS {
        let b = BackendProfile::preset(label).runtime()?;
        println!(
            "{:<18} {:<10} {:<12} {:>6.3} {:>8.4} {:>8.3}",
            b.label,
            b.family,
            b.coupling_map.name(),
            b.crosstalk.zz_strength,
            b.crosstalk.depol_2q,
            b.crosstalk.readout_flip
        );
    }
    Ok(())
}

fn suite(config: &RunConfig) -> Outcome<Vec<xtalk_core::Circuit>> {
    config.families.iter().map(|&f| benchmark_circuit(f, config.qubits)).collect::<Result<_, _>>().usage()
}

fn run_campaign(args: &RunArgs) -> Outcome<Vec<CampaignResult>> {
    let (config, profile) = validate(args, "campaign", 2)?;
    let circuits = suite(&config)?;
    let results = with_jobs(args.jobs, || {
        run_pairwise_campaign(&circuits, &profile, config.p, config.trials, config.shots, config.seed)
    })?
    .runtime()?;
    let echo = serde_json::to_value(&config).runtime()?;
    for r in &results {
        archive::write_campaign(&args.out, &echo, r).runtime()?;
    }
    println!(
        "wrote {} trial archives to {}",
        results.len(),
        args.out.join(&profile.label).join(config.p.to_string()).display()
    );
    Ok(results)
}

pub fn campaign(args: &RunArgs) -> Outcome {
    run_campaign(args).map(|_| ())
}

type Groups = Vec<((String, usize), Vec<CampaignResult>)>;

fn load_groups(root: &Path, p: Option<usize>) -> Outcome<Groups> {
    let results = archive::load_campaigns(root).map_err(archive_error)?;
    let groups: Vec<_> =
        archive::group_campaigns(results).into_iter().filter(|((_, gp), _)| p.is_none_or(|p| p == *gp)).collect();
    if groups.is_empty() {
        return Err(Failure::Usage(anyhow!("no campaign trials under {} match the padding filter", root.display())));
    }
    Ok(groups)
}

fn family_labels(fams: &[Family]) -> Vec<String> {
    fams.iter().map(|f| f.label().to_string()).collect()
}

fn print_table(t: &AffinityTable) {
    println!("{:<6} {:>10} {:>12}", "family", "aggression", "sensitivity");
    for (k, f) in t.families.iter().enumerate() {
        println!("{:<6} {:>10.4} {:>12.4}", f.label(), t.aggression[k], t.sensitivity[k]);
    }
    let ranking: Vec<&str> = t.aggression_ranking().iter().map(|f| f.label()).collect();
    println!("aggression ranking (strongest first): {}", ranking.join(" > "));
}

fn analyze_into(root: &Path, p: Option<usize>, out: &Path) -> Outcome<AffinityTable> {
    let groups = load_groups(root, p)?;
    let mut matrices = Vec::new();
    let mut weights = Vec::new();
    for ((backend, gp), results) in &groups {
        let h = impact_matrix(results).runtime()?;
        let mut csv = Vec::new();
        h.write_csv(&mut csv).runtime()?;
        write(&out.join(format!("impact-{backend}-p{gp}.csv")), &String::from_utf8(csv).runtime()?)?;
        weights.push(results.len() as f64);
        matrices.push(h);
    }
    let table = affinity(&matrices, &weights).runtime()?;
    write_json(&out.join("affinity.json"), &table)?;
    let labels = family_labels(&table.families);
    let svg = svg::heatmap("Pairwise impact (row: target, column: cotenant)", &labels, &labels, &table.impact, None);
    write(&out.join("affinity.svg"), &svg)?;
    Ok(table)
}

pub fn analyze(args: &AnalyzeArgs) -> Outcome {
    let table = analyze_into(&args.archives, args.p, &args.out)?;
    println!("backends: {}", table.backends.join(", "));
    print_table(&table);
    println!("wrote impact CSVs, affinity.json and affinity.svg to {}", args.out.display());
    Ok(())
}

fn similarity_into(roots: &[PathBuf], p: Option<usize>, overrides: &[String], out: &Path) -> Outcome<SimilarityReport> {
    let mut groups = Vec::new();
    for root in roots {
        groups.extend(load_groups(root, p)?);
    }
    let mut matrices: Vec<ImpactMatrix> = Vec::new();
    for ((backend, gp), results) in &groups {
        let mut h = impact_matrix(results).runtime()?;
        if groups.iter().filter(|((b, _), _)| b == backend).count() > 1 {
            h.backend = format!("{backend}@p{gp}");
        }
        matrices.push(h);
    }
    let mut group_of: BTreeMap<String, String> =
        matrices.iter().map(|h| (h.backend.clone(), h.backend_family.clone())).collect();
    for o in overrides {
        let (b, g) =
            o.split_once('=').ok_or_else(|| Failure::Usage(anyhow!("--group expects BACKEND=GROUP, got `{o}`")))?;
        group_of.insert(b.to_string(), g.to_string());
    }
    if matrices.len() < 2 {
        return Err(Failure::Usage(anyhow!("similarity needs at least 2 backends, found {}", matrices.len())));
    }
    let report = similarity_report(&matrices, &group_of).runtime()?;
    write_json(&out.join("similarity.json"), &report)?;
    let svg =
        svg::heatmap("Pairwise SSIM between backends", &report.backends, &report.backends, &report.pairwise, Some(1.0));
    write(&out.join("similarity.svg"), &svg)?;
    Ok(report)
}

pub fn ssim(args: &SsimArgs) -> Outcome {
    let report = similarity_into(&args.archives, args.p, &args.groups, &args.out)?;
    for s in &report.group_scores {
        println!("{:<14} {:<14} {:>7.4}  ({} pairs)", s.a, s.b, s.mean_ssim, s.pairs);
    }
    let (within, between) = report.within_and_between();
    if let (Some(w), Some(b)) = (within, between) {
        println!("within-group mean {w:.4}, cross-group mean {b:.4}");
    }
    println!("wrote similarity.json and similarity.svg to {}", args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct StressReport<'a> {
    config: &'a RunConfig,
    regression: Regression,
    /// Mean fidelity to the ideal target distribution per load.
    mean_fidelity_by_load: BTreeMap<usize, f64>,
}

fn run_stress_cmd(args: &StressArgs) -> Outcome<Regression> {
    let (mut config, profile) = validate(&args.run, "stress", 1)?;
    let order: StressOrder = args.order.parse().usage()?;
    let target = parse_family(&args.target)?;
    let ranking: Vec<Family> = match (&args.ranking, &args.affinity) {
        (Some(list), _) => parse_families(list)?,
        (None, Some(path)) => {
            let table: AffinityTable = read_json(path, "affinity table")?;
            table.aggression_ranking().into_iter().filter(|f| *f != target && config.families.contains(f)).collect()
        }
        (None, None) => {
            return Err(Failure::Usage(anyhow!("a cotenant ranking is required: pass --ranking or --affinity")))
        }
    };
    let ranking: Vec<Family> = ranking.into_iter().filter(|f| *f != target).collect();
    if ranking.is_empty() {
        return Err(Failure::Usage(anyhow!("the ranking has no cotenants besides the target")));
    }
    if (ranking.len() + 1) * config.qubits > MAX_SIMULATED_QUBITS {
        return Err(Failure::Usage(anyhow!(
            "{} tenants of {} qubits exceed the {MAX_SIMULATED_QUBITS}-qubit simulator",
            ranking.len() + 1,
            config.qubits
        )));
    }
    config.order = Some(order);
    config.target = Some(target);
    config.ranking = Some(ranking.clone());
    config.families = std::iter::once(target).chain(ranking.iter().copied()).collect();

    let pool = suite(&config)?;
    let target_circuit = pool[0].clone();
    let results = with_jobs(args.run.jobs, || {
        run_stress(
            &target_circuit,
            &pool,
            &ranking,
            order,
            &profile,
            config.p,
            config.trials,
            config.shots,
            config.seed,
        )
    })?
    .runtime()?;
    let echo = serde_json::to_value(&config).runtime()?;
    for r in &results {
        archive::write_stress(&args.run.out, &echo, r).runtime()?;
    }
    let regression = stress_regression(&results).runtime()?;
    let points = stress_points(&results).runtime()?;
    let mut by_load: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for &(x, y) in &points {
        let e = by_load.entry(x as usize).or_default();
        e.0 += y;
        e.1 += 1;
    }
    let report = StressReport {
        config: &config,
        regression,
        mean_fidelity_by_load: by_load.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect(),
    };
    let stem = format!("stress-{}-p{}-{}", profile.label, config.p, order.label().to_lowercase());
    write_json(&args.run.out.join(format!("{stem}.json")), &report)?;
    let title = format!("{} stress on {} ({})", order.label(), target.label(), profile.label);
    let plot = svg::scatter(
        &title,
        "load (concurrent circuits)",
        "fidelity to ideal",
        &points,
        Some((regression.slope, regression.intercept)),
    );
    write(&args.run.out.join(format!("{stem}.svg")), &plot)?;
    println!(
        "{} on {}: slope {:.6} ± {:.6}, p = {:.4} over {} points",
        order.label(),
        target.label(),
        regression.slope,
        regression.slope_std_error,
        regression.p_value,
        regression.n
    );
    println!("wrote {} stress archives, {stem}.json and {stem}.svg to {}", results.len(), args.run.out.display());
    Ok(regression)
}

pub fn stress(args: &StressArgs) -> Outcome {
    run_stress_cmd(args).map(|_| ())
}

#[derive(Serialize)]
struct ScheduleReport {
    #[serde(flatten)]
    cohort: Cohort,
    /// Greedy cost minus exhaustive cost (never negative); absent when
    /// the queue is too large for exhaustive search or either is infeasible.
    greedy_gap: Option<f64>,
}

fn schedule_report(
    queue: &JobQueue,
    table: &AffinityTable,
    profile: &BackendProfile,
    p: usize,
    size: CohortSize,
    solver: Solver,
) -> Outcome<ScheduleReport> {
    let cohort = select_cohort_sized(queue, table, profile, p, size, solver).runtime()?;
    let other = match solver {
        Solver::Exhaustive => Solver::Greedy,
        Solver::Greedy => Solver::Exhaustive,
    };
    let greedy_gap = if queue.len() <= MAX_EXHAUSTIVE_QUEUE {
        select_cohort_sized(queue, table, profile, p, size, other).ok().map(|o| {
            let (g, e) = if solver == Solver::Greedy { (&cohort, &o) } else { (&o, &cohort) };
            g.cost - e.cost
        })
    } else {
        None
    };
    Ok(ScheduleReport { cohort, greedy_gap })
}

pub fn schedule(args: &ScheduleArgs) -> Outcome {
    let p = padding(args.p)?;
    let solver: Solver = args.solver.parse::<Solver>().map_err(|e| Failure::Usage(anyhow!(e)))?;
    if args.min_cohort == 0 || args.min_cohort > args.max_cohort {
        return Err(Failure::Usage(anyhow!(
            "cohort size bounds {}..={} are invalid",
            args.min_cohort,
            args.max_cohort
        )));
    }
    let queue: JobQueue = read_json(&args.queue, "job queue")?;
    let table: AffinityTable = read_json(&args.affinity, "affinity table")?;
    let profile = backend(&args.backend)?;
    if solver == Solver::Exhaustive && queue.len() > MAX_EXHAUSTIVE_QUEUE {
        return Err(Failure::Usage(anyhow!(
            "exhaustive search supports at most {MAX_EXHAUSTIVE_QUEUE} jobs; use --solver greedy"
        )));
    }
    let size = CohortSize { min: args.min_cohort, max: args.max_cohort };
    let report = schedule_report(&queue, &table, &profile, p, size, solver)?;
    let text = serde_json::to_string_pretty(&report).runtime()? + "\n";
    if let Some(out) = &args.out {
        write(out, &text)?;
    }
    print!("{text}");
    Ok(())
}

/// Shipped demo queue.
pub const DEMO_QUEUE: &str = include_str!("../data/demo_queue.json");

const DEMO_BACKENDS: [&str; 3] = ["heron-like-A", "heron-like-B", "nighthawk-like"];

pub fn demo(args: &DemoArgs) -> Outcome {
    let out = &args.out;
    let archives = out.join("archives");
    for (k, label) in DEMO_BACKENDS.iter().enumerate() {
        let run = RunArgs {
            backend: label.to_string(),
            p: 0,
            trials: args.trials,
            shots: args.shots,
            seed: args.seed.wrapping_add(k as u64),
            qubits: 3,
            families: Family::BENCHMARKS.iter().map(|f| f.label().to_string()).collect(),
            jobs: args.jobs,
            out: archives.clone(),
        };
        run_campaign(&run)?;
    }

    println!("\n== affinity ==");
    let table = analyze_into(&archives, Some(0), &out.join("analysis"))?;
    print_table(&table);

    println!("\n== similarity ==");
    let report = similarity_into(std::slice::from_ref(&archives), Some(0), &[], &out.join("similarity"))?;
    for s in &report.group_scores {
        println!("{:<10} {:<10} {:>7.4}", s.a, s.b, s.mean_ssim);
    }

    println!("\n== stress ==");
    let stress_args = StressArgs {
        run: RunArgs {
            backend: DEMO_BACKENDS[0].to_string(),
            p: 0,
            trials: args.trials,
            shots: args.shots,
            seed: args.seed,
            qubits: 3,
            families: Family::BENCHMARKS.iter().map(|f| f.label().to_string()).collect(),
            jobs: args.jobs,
            out: out.join("stress"),
        },
        order: "WTS".into(),
        target: "QFT".into(),
        ranking: None,
        affinity: Some(out.join("analysis").join("affinity.json")),
    };
    run_stress_cmd(&stress_args)?;

    println!("\n== schedule ==");
    let queue: JobQueue = serde_json::from_str(DEMO_QUEUE).context("shipped demo queue").runtime()?;
    let profile = backend(DEMO_BACKENDS[0])?;
    let report = schedule_report(&queue, &table, &profile, 1, CohortSize::up_to(3), Solver::Exhaustive)?;
    write_json(&out.join("cohort.json"), &report)?;
    println!(
        "cohort {:?} objective {:.4} (greedy gap {})",
        report.cohort.ids,
        report.cohort.objective,
        report.greedy_gap.map_or("n/a".to_string(), |g| format!("{g:.4}"))
    );
    if report.cohort.ids.is_empty() {
        bail_runtime("empty cohort")?;
    }
    println!("\ndemo outputs in {}", out.display());
    Ok(())
}

fn bail_runtime(msg: &str) -> Outcome {
    Err(Failure::Runtime(anyhow!("{msg}")))
}
