use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ellcycle::analysis::{estimate_threshold_curve, first_moment, ThresholdConfig, ThresholdCurve};
use ellcycle::gadgets::{build_absorber, build_connector_family, verify_absorber, verify_connector_family, GadgetJson, Report};
use ellcycle::hypergraph::{multi_round_exposure, perturb, PerturbationParams};
use ellcycle::paths::{is_hamilton_ell_cycle, Sequence, SequenceJson};
use ellcycle::search::{
    absorbing_pipeline, connect_paths_into_cycle, connect_paths_into_path, exact_hamilton_search, greedy_path_tiling,
    PipelineParams, SearchLimits, SearchOutcome, Trace,
};
use ellcycle::{EllCycle, EllPath, KUniformHypergraph, VertexSet};
use serde::{Deserialize, Serialize};

use crate::{
    CliError, Command, ConnectArgs, Format, GadgetArgs, GenerateArgs, MomentArgs, PerturbArgs, PipelineArgs, SearchArgs,
    ThresholdArgs, TileArgs, VerifyArgs,
};

type CliResult<T = ()> = Result<T, CliError>;

pub fn dispatch(command: &Command, out_dir: &Path) -> CliResult {
    match command {
        Command::Gadget(a) => gadget(a, out_dir),
        Command::Generate(a) => generate(a, out_dir),
        Command::Perturb(a) => perturb_cmd(a, out_dir),
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a, out_dir),
        Command::Tile(a) => tile(a, out_dir),
        Command::Connect(a) => connect(a, out_dir),
        Command::Pipeline(a) => pipeline(a, out_dir),
        Command::Threshold(a) => threshold(a, out_dir),
        Command::Moment(a) => moment(a, out_dir),
    }
}

fn resolve(out: &Option<PathBuf>, out_dir: &Path, default: &str) -> PathBuf {
    out.clone().unwrap_or_else(|| out_dir.join(default))
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> CliResult<KUniformHypergraph> {
    KUniformHypergraph::from_json_str(&read_input(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_sequence(text: &str) -> CliResult<Sequence> {
    let json: SequenceJson = serde_json::from_str(text).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(json.parse()?)
}

/// Writes `contents`, reads the file back and runs `check` on what was read.
fn write_checked(path: &Path, contents: &str, check: impl FnOnce(&str) -> CliResult) -> CliResult {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    let back = fs::read_to_string(path).with_context(|| format!("re-reading {}", path.display()))?;
    check(&back).map_err(|e| CliError::Other(anyhow::anyhow!("{} failed to re-validate: {e}", path.display())))
}

fn write_graph(path: &Path, g: &KUniformHypergraph) -> CliResult {
    write_checked(path, &g.to_json_string(), |s| {
        if KUniformHypergraph::from_json_str(s)? != *g {
            return Err(CliError::Other(anyhow::anyhow!("graph differs after round trip")));
        }
        Ok(())
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization cannot fail")
}

/// Writes a cycle and checks the copy on disk against `host`.
fn write_cycle(path: &Path, host: &KUniformHypergraph, cycle: &EllCycle, hamiltonian: bool) -> CliResult {
    write_checked(path, &pretty(&cycle.to_json()), |s| match read_sequence(s)? {
        Sequence::Cycle(c) if c == *cycle && cycle_in_host(host, &c, hamiltonian)? => Ok(()),
        _ => Err(CliError::Other(anyhow::anyhow!("cycle does not verify after round trip"))),
    })
}

fn write_path(path: &Path, host: &KUniformHypergraph, p: &EllPath) -> CliResult {
    write_checked(path, &pretty(&p.to_json()), |s| match read_sequence(s)? {
        Sequence::Path(q) if q == *p => Ok(q.validate_in(host)?),
        _ => Err(CliError::Other(anyhow::anyhow!("path differs after round trip"))),
    })
}

fn cycle_in_host(host: &KUniformHypergraph, c: &EllCycle, hamiltonian: bool) -> CliResult<bool> {
    if hamiltonian {
        return Ok(is_hamilton_ell_cycle(host, c)?);
    }
    Ok(c.structure_error().is_none()
        && c.seq().iter().all(|&v| (v as usize) < host.n())
        && c.windows().all(|w| host.contains_edge(&w)))
}

fn check_ell(k: usize, l: usize) -> CliResult {
    if l == 0 || l >= k {
        return Err(CliError::Usage(format!("need 1 <= l < k, got k = {k}, l = {l}")));
    }
    Ok(())
}

fn print_report(name: &str, report: &Report) {
    for c in &report.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        if c.detail.is_empty() {
            println!("{status} {name}/{}", c.name);
        } else {
            println!("{status} {name}/{}: {}", c.name, c.detail);
        }
    }
}

fn gadget(a: &GadgetArgs, out_dir: &Path) -> CliResult {
    check_ell(a.k, a.l)?;
    let dir = resolve(&a.out, out_dir, &format!("gadget-k{}-l{}", a.k, a.l));
    let absorber = build_absorber(a.k, a.l)?;
    let family = build_connector_family(a.k, a.l)?;
    let absorber_report = verify_absorber(&absorber);
    let family_report = verify_connector_family(&family);

    for (file, json) in [("absorber.json", absorber.to_json()), ("connectors.json", family.to_json())] {
        write_checked(&dir.join(file), &pretty(&json), |s| {
            let back: GadgetJson = serde_json::from_str(s).map_err(|e| CliError::Other(e.into()))?;
            KUniformHypergraph::new(back.n, back.k, back.edges.clone())?;
            if back != json {
                return Err(CliError::Other(anyhow::anyhow!("gadget differs after round trip")));
            }
            Ok(())
        })?;
    }
    #[derive(Serialize, Deserialize, PartialEq)]
    struct Certification {
        k: usize,
        l: usize,
        absorber: Report,
        connectors: Report,
        passed: bool,
    }
    let passed = absorber_report.all_passed() && family_report.all_passed();
    let cert = Certification { k: a.k, l: a.l, absorber: absorber_report, connectors: family_report, passed };
    write_checked(&dir.join("report.json"), &pretty(&cert), |s| {
        let back: Certification = serde_json::from_str(s).map_err(|e| CliError::Other(e.into()))?;
        if back != cert {
            return Err(CliError::Other(anyhow::anyhow!("report differs after round trip")));
        }
        Ok(())
    })?;

    print_report("absorber", &cert.absorber);
    print_report("connectors", &cert.connectors);
    if !passed {
        return Err(CliError::Certification(format!("certification failed for k = {}, l = {}", a.k, a.l)));
    }
    println!("certified k = {}, l = {}; wrote {}", a.k, a.l, dir.display());
    Ok(())
}

fn generate(a: &GenerateArgs, out_dir: &Path) -> CliResult {
    let g = a.host.build(a.n, a.k, a.seed)?;
    let path = resolve(&a.out, out_dir, "graph.json");
    write_graph(&path, &g)?;
    println!("{} host: n = {}, k = {}, {} edges -> {}", a.host, g.n(), g.k(), g.edge_count(), path.display());
    Ok(())
}

fn perturb_cmd(a: &PerturbArgs, out_dir: &Path) -> CliResult {
    let host = read_graph(&a.graph)?;
    let params = PerturbationParams::new(a.p, a.rounds, a.seed)?;
    let path = resolve(&a.out, out_dir, "perturbed.json");
    let perturbed = if a.rounds == 1 {
        perturb(&host, &params)?
    } else {
        let exposure = multi_round_exposure(&host, a.p, a.rounds, a.seed)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("perturbed");
        for i in 1..=a.rounds {
            let round = exposure.cumulative(&host, i)?;
            write_graph(&path.with_file_name(format!("{stem}.round{i}.json")), &round)?;
        }
        exposure.perturbed
    };
    write_graph(&path, &perturbed)?;
    println!(
        "perturbed with p = {}: {} -> {} edges -> {}",
        a.p,
        host.edge_count(),
        perturbed.edge_count(),
        path.display()
    );
    Ok(())
}

fn verify(a: &VerifyArgs) -> CliResult {
    let host = read_graph(&a.graph)?;
    match read_sequence(&read_input(&a.sequence)?)? {
        Sequence::Path(p) => {
            p.validate_in(&host)?;
            println!("valid {}-path with {} edges on {} vertices", p.ell(), p.length(), p.vertex_count());
        }
        Sequence::Cycle(c) => {
            if is_hamilton_ell_cycle(&host, &c)? {
                println!("Hamilton {}-cycle on {} vertices", c.ell(), c.len());
            } else if cycle_in_host(&host, &c, false)? {
                println!("valid {}-cycle on {} of {} vertices (not Hamiltonian)", c.ell(), c.len(), host.n());
            } else {
                let why = c.structure_error().unwrap_or_else(|| "some window is not an edge of the graph".into());
                return Err(CliError::Certification(format!("not an {}-cycle in the graph: {why}", c.ell())));
            }
        }
    }
    Ok(())
}

fn limits(nodes: u64) -> SearchLimits {
    SearchLimits::with_nodes(nodes)
}

fn search(a: &SearchArgs, out_dir: &Path) -> CliResult {
    let host = read_graph(&a.graph)?;
    check_ell(host.k(), a.l)?;
    let lim = SearchLimits { symmetry: !a.no_symmetry, ..limits(a.nodes) };
    match exact_hamilton_search(&host, a.l, &lim)? {
        SearchOutcome::Found(c) => {
            let path = resolve(&a.out, out_dir, "cycle.json");
            write_cycle(&path, &host, &c, true)?;
            println!("found Hamilton {}-cycle -> {}", a.l, path.display());
            Ok(())
        }
        SearchOutcome::Exhausted => {
            Err(CliError::SearchFailed(format!("no Hamilton {}-cycle exists (search space exhausted)", a.l)))
        }
        SearchOutcome::BudgetExceeded => {
            Err(CliError::SearchFailed(format!("node budget of {} exhausted; inconclusive", a.nodes)))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TilingJson {
    k: usize,
    l: usize,
    m: usize,
    covered: usize,
    available: usize,
    paths: Vec<SequenceJson>,
}

fn tile(a: &TileArgs, out_dir: &Path) -> CliResult {
    let host = read_graph(&a.graph)?;
    check_ell(host.k(), a.l)?;
    let forbidden = VertexSet::new(a.forbidden.iter().copied())?;
    let t = greedy_path_tiling(&host, a.l, a.m, &forbidden, a.seed, a.retries, &limits(a.nodes))?;
    let json = TilingJson {
        k: host.k(),
        l: a.l,
        m: a.m,
        covered: t.covered,
        available: t.available,
        paths: t.paths.iter().map(EllPath::to_json).collect(),
    };
    let path = resolve(&a.out, out_dir, "tiling.json");
    write_checked(&path, &pretty(&json), |s| {
        let back: TilingJson = serde_json::from_str(s).map_err(|e| CliError::Other(e.into()))?;
        let mut seen = VertexSet::default();
        for p in &back.paths {
            let Sequence::Path(p) = p.parse()? else {
                return Err(CliError::Other(anyhow::anyhow!("tiling contains a cycle")));
            };
            p.validate_in(&host)?;
            let set = p.vertex_set();
            if !set.is_disjoint(&seen) || !set.is_disjoint(&forbidden) || p.length() != a.m {
                return Err(CliError::Other(anyhow::anyhow!("tiling paths overlap or have the wrong length")));
            }
            seen = seen.union(&set);
        }
        Ok(())
    })?;
    println!(
        "{} paths cover {} of {} vertices ({:.1}%) -> {}",
        t.paths.len(),
        t.covered,
        t.available,
        100.0 * t.covered_fraction(),
        path.display()
    );
    Ok(())
}

fn connect(a: &ConnectArgs, out_dir: &Path) -> CliResult {
    let host = read_graph(&a.graph)?;
    let json: Vec<SequenceJson> =
        serde_json::from_str(&read_input(&a.paths)?).map_err(|e| CliError::Usage(format!("{}: {e}", a.paths.display())))?;
    let mut paths = Vec::new();
    for s in &json {
        match s.parse()? {
            Sequence::Path(p) => {
                p.validate_in(&host)?;
                paths.push(p);
            }
            Sequence::Cycle(_) => return Err(CliError::Usage("connect takes paths, not cycles".into())),
        }
    }
    let x = if a.x.is_empty() {
        let used = VertexSet::collect_from(paths.iter().flat_map(|p| p.seq().iter().copied()));
        VertexSet::range(host.n()).difference(&used)
    } else {
        VertexSet::new(a.x.iter().copied())?
    };
    let lim = limits(a.nodes);
    if a.open {
        let joined = connect_paths_into_path(&host, &paths, &x, &lim, a.seed)?;
        let path = resolve(&a.out, out_dir, "connected.json");
        write_path(&path, &host, &joined)?;
        println!("joined {} paths into one with {} vertices -> {}", paths.len(), joined.vertex_count(), path.display());
    } else {
        let cycle = connect_paths_into_cycle(&host, &paths, &x, &lim, a.seed)?;
        let path = resolve(&a.out, out_dir, "connected.json");
        write_cycle(&path, &host, &cycle, false)?;
        println!("joined {} paths into a cycle on {} vertices -> {}", paths.len(), cycle.len(), path.display());
    }
    Ok(())
}

fn pipeline(a: &PipelineArgs, out_dir: &Path) -> CliResult {
    let host = match (&a.graph, &a.host) {
        (Some(g), None) => read_graph(g)?,
        (None, Some(desc)) => {
            let (Some(n), Some(k)) = (a.n, a.k) else {
                return Err(CliError::Usage("--host needs --n and --k".into()));
            };
            desc.build(n, k, a.seed)?
        }
        _ => return Err(CliError::Usage("give either --graph or --host".into())),
    };
    let (n, k) = (host.n(), host.k());
    check_ell(k, a.l)?;
    if n % (k - a.l) != 0 {
        return Err(CliError::Usage(format!("k - l = {} does not divide n = {n}", k - a.l)));
    }
    let params = PipelineParams {
        rounds: a.rounds,
        absorbers: a.absorbers,
        tiling_length: a.m,
        reservoir: (a.reservoir_lo, a.reservoir_hi),
        retries: a.retries,
        bad_threshold: a.bad_threshold,
        seed: a.seed,
        limits: limits(a.nodes),
    };
    params.validate(k, a.l)?;
    let outcome = absorbing_pipeline(&host, a.l, a.p, &params)?;

    let trace_path = resolve(&a.trace, out_dir, "trace.json");
    let trace_text = outcome.trace.to_json_string();
    write_checked(&trace_path, &trace_text, |s| {
        let back: Trace = serde_json::from_str(s).map_err(|e| CliError::Other(e.into()))?;
        let ok = back.stages.iter().all(|r| r.partition.is_partition_of(back.n));
        if !ok || back.to_json_string() != trace_text {
            return Err(CliError::Other(anyhow::anyhow!("trace does not re-validate")));
        }
        Ok(())
    })?;

    let Some(cycle) = outcome.cycle else {
        let stage = outcome.trace.failed_stage().map_or_else(|| "an unknown stage".into(), |s| s.to_string());
        return Err(CliError::SearchFailed(format!(
            "pipeline failed at {stage}; trace written to {}",
            trace_path.display()
        )));
    };
    if !is_hamilton_ell_cycle(&outcome.perturbed, &cycle)? {
        return Err(CliError::Certification("pipeline returned a cycle that does not verify".into()));
    }
    let cycle_path = resolve(&a.out, out_dir, "cycle.json");
    let graph_path = cycle_path.with_file_name("perturbed.json");
    write_graph(&graph_path, &outcome.perturbed)?;
    write_cycle(&cycle_path, &outcome.perturbed, &cycle, true)?;
    println!(
        "Hamilton {}-cycle on {n} vertices -> {} (graph {}, trace {})",
        a.l,
        cycle_path.display(),
        graph_path.display(),
        trace_path.display()
    );
    Ok(())
}

fn inconclusive_fraction(curve: &ThresholdCurve) -> f64 {
    let grid = {
        let total: usize = curve.points.iter().map(|p| p.trials).sum();
        let bad: usize = curve.points.iter().map(|p| p.inconclusive).sum();
        if total == 0 { 0.0 } else { bad as f64 / total as f64 }
    };
    let median = curve.median.as_ref().map_or(0.0, |m| m.inconclusive as f64 / m.trials.max(1) as f64);
    grid.max(median)
}

fn threshold(a: &ThresholdArgs, out_dir: &Path) -> CliResult {
    if !(0.0..=1.0).contains(&a.max_inconclusive) {
        return Err(CliError::Usage("--max-inconclusive must lie in [0, 1]".into()));
    }
    let cfg = ThresholdConfig {
        host: a.host.clone(),
        n: a.n,
        k: a.k,
        l: a.l,
        grid: a.grid.clone(),
        trials: a.trials,
        seed: a.seed,
        median: a.median,
        limits: limits(a.nodes),
    };
    cfg.validate()?;
    let curve = estimate_threshold_curve(&cfg)?;
    let (text, default) = match a.format {
        Format::Csv => (curve.to_csv()?, "threshold.csv"),
        Format::Json => (curve.to_json_string(), "threshold.json"),
    };
    let path = resolve(&a.out, out_dir, default);
    write_checked(&path, &text, |s| match a.format {
        Format::Csv => {
            let mut reader = csv::Reader::from_reader(s.as_bytes());
            let rows: Vec<Vec<f64>> = reader
                .records()
                .map(|r| {
                    let r = r.map_err(|e| CliError::Other(e.into()))?;
                    r.iter().map(|x| x.parse::<f64>().map_err(|e| CliError::Other(e.into()))).collect()
                })
                .collect::<CliResult<_>>()?;
            let matches = rows.len() == curve.points.len()
                && rows.iter().zip(&curve.points).all(|(r, pt)| r.len() == 7 && r[0] == pt.p && r[2] == pt.successes as f64);
            if !matches {
                return Err(CliError::Other(anyhow::anyhow!("CSV rows do not match the curve")));
            }
            Ok(())
        }
        Format::Json => {
            let back: ThresholdCurve = serde_json::from_str(s).map_err(|e| CliError::Other(e.into()))?;
            if back.to_json_string() != text {
                return Err(CliError::Other(anyhow::anyhow!("curve differs after round trip")));
            }
            Ok(())
        }
    })?;

    for pt in &curve.points {
        println!("p = {:<8} {:>5}/{:<5} p_hat = {:.3} [{:.3}, {:.3}]", pt.p, pt.successes, pt.trials, pt.p_hat, pt.ci_lo, pt.ci_hi);
    }
    if let Some(m) = &curve.median {
        let show = |x: Option<f64>| x.map_or_else(|| "inf".to_string(), |v| format!("{v:.4}"));
        println!("median crossing {} [{:.4}, {}]", show(m.p_half), m.ci_lo, show(m.ci_hi));
    }
    println!("wrote {}", path.display());
    let fraction = inconclusive_fraction(&curve);
    if fraction > a.max_inconclusive {
        return Err(CliError::SearchFailed(format!(
            "{:.1}% of searches were inconclusive, above the cap of {:.1}%",
            100.0 * fraction,
            100.0 * a.max_inconclusive
        )));
    }
    Ok(())
}

fn moment(a: &MomentArgs, out_dir: &Path) -> CliResult {
    let report = first_moment(a.n, a.k, a.l, a.m, a.p)?;
    let log = report.log_expectation.map_or_else(|| "-inf".to_string(), |x| x.to_string());
    let (text, default) = match a.format {
        Format::Json => (pretty(&report), "moment.json"),
        Format::Csv => (
            format!(
                "n,k,l,m,b,p,paths,log_expectation,below_one,flagged\n{},{},{},{},{},{},{},{},{},{}\n",
                report.n, report.k, report.l, report.m, report.b, report.p, report.paths, log, report.below_one, report.flagged
            ),
            "moment.csv",
        ),
    };
    let path = resolve(&a.out, out_dir, default);
    write_checked(&path, &text, |s| {
        let ok = match a.format {
            Format::Json => serde_json::from_str::<ellcycle::analysis::MomentReport>(s).map_err(|e| CliError::Other(e.into()))? == report,
            Format::Csv => s == text,
        };
        if !ok {
            return Err(CliError::Other(anyhow::anyhow!("moment report differs after round trip")));
        }
        Ok(())
    })?;
    println!(
        "{} paths of length {}: ln E = {log}, E {} 1{} -> {}",
        report.paths,
        a.m,
        if report.below_one { "<" } else { ">=" },
        if report.flagged { " (2b does not divide n)" } else { "" },
        path.display()
    );
    Ok(())
}
