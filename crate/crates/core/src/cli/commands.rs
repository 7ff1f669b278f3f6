use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{
    self, complete_probabilities, resolve_seed, AggregateConfig, AssortConfig, BoundsConfig, FitConfig, GenerateConfig,
    GraphModel, RewireConfig, ScenarioGainsConfig, SolveEtaConfig,
};
use super::{
    AggregateArgs, AssortArgs, BoundsArgs, CliError, DpaArgs, FitArgs, GenerateArgs, ModelArgs, RewireArgs,
    ScenarioGainsArgs, SolveEtaArgs,
};
use crate::assort::{assortativity_of_graph, AssortProfile, EdgeMixMatrix, TypePair};
use crate::eta::{coefficient_bounds, solve_target_eta, write_bounds_csv, EtaMethod, EtaOutcome, EtaProblem, Interval};
use crate::fit::{fit_ev, EvFit};
use crate::gains::{scenario_gains as run_gains, ScenarioPair};
use crate::generators::{gen_dpa, gen_er, write_scenarios, DpaParams};
use crate::graph::DirectedGraph;
use crate::lp::Simplex;
use crate::rewire::{rewire as run_chain, Checkpoint, RewiringTrace};

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_graph(path: &Path) -> Result<DirectedGraph, CliError> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    DirectedGraph::read_edge_list(BufReader::new(f)).map_err(|e| match e {
        crate::Error::Io(e) => io_err(path, e),
        other => CliError::Config(format!("{}: {other}", path.display())),
    })
}

fn write_with(path: &Path, f: impl FnOnce(BufWriter<File>) -> crate::Result<()>) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    f(BufWriter::new(file)).map_err(|e| io_err(path, e))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

/// `dir/stem.ext` for a single output, `dir/stem_007.ext` otherwise.
fn indexed(dir: &Path, stem: &str, ext: &str, i: usize, total: usize) -> PathBuf {
    if total == 1 {
        dir.join(format!("{stem}.{ext}"))
    } else {
        dir.join(format!("{stem}_{i:03}.{ext}"))
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn profile_json(p: &AssortProfile) -> Value {
    json!({"r11": p.r11, "r12": p.r12, "r21": p.r21, "r22": p.r22})
}

fn observed_json(g: &DirectedGraph) -> Value {
    assortativity_of_graph(g).map(|p| profile_json(&p)).unwrap_or(Value::Null)
}

fn required<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("{what} is required (flag or --config)")))
}

fn positive(n: usize, what: &str) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Config(format!("{what} must be at least 1")));
    }
    Ok(n)
}

fn load_opt<T: serde::de::DeserializeOwned>(path: &Option<PathBuf>) -> Result<Option<T>, CliError> {
    path.as_deref().map(config::load).transpose()
}

/// Resolves DPA parameters from flags over an optional base.
fn dpa_model(d: &DpaArgs, base: Option<GraphModel>) -> Result<GraphModel, CliError> {
    let base = match base {
        Some(GraphModel::Dpa {
            alpha,
            beta,
            gamma,
            delta_in,
            delta_out,
            edges,
        }) => Some((alpha, beta, gamma, delta_in, delta_out, edges)),
        _ => None,
    };
    let edges = required(d.edges.or(base.map(|b| b.5)), "--edges")?;
    let (alpha, beta, gamma, delta_in, delta_out) = if let Some(path) = &d.from_fit {
        let fit: EvFit = config::load(path)?;
        let p = fit.dpa_params(edges, 0);
        (p.alpha, p.beta, p.gamma, p.delta_in, p.delta_out)
    } else {
        let [alpha, beta, gamma] = if d.alpha.is_none() && d.beta.is_none() && d.gamma.is_none() {
            match base {
                Some(b) => [b.0, b.1, b.2],
                None => complete_probabilities(d.alpha, d.beta, d.gamma)?,
            }
        } else {
            complete_probabilities(d.alpha, d.beta, d.gamma)?
        };
        let delta_in = d.delta_in.or(d.delta).or(base.map(|b| b.3)).unwrap_or(1.0);
        let delta_out = d.delta_out.or(d.delta).or(base.map(|b| b.4)).unwrap_or(1.0);
        (alpha, beta, gamma, delta_in, delta_out)
    };
    Ok(GraphModel::Dpa {
        alpha,
        beta,
        gamma,
        delta_in,
        delta_out,
        edges,
    })
}

fn dpa_params(model: GraphModel, seed: u64) -> Option<DpaParams> {
    match model {
        GraphModel::Dpa {
            alpha,
            beta,
            gamma,
            delta_in,
            delta_out,
            edges,
        } => Some(DpaParams {
            alpha,
            beta,
            gamma,
            delta_in,
            delta_out,
            target_edges: edges,
            seed,
        }),
        GraphModel::Er { .. } => None,
    }
}

pub fn generate(a: GenerateArgs) -> Result<Value, CliError> {
    let base: Option<GenerateConfig> = load_opt(&a.config)?;
    let base_model = base.as_ref().map(|c| c.model);
    let model = match &a.model {
        None => required(base_model, "a model (generate er|dpa)")?,
        Some(ModelArgs::Er { n, p }) => {
            let (bn, bp) = match base_model {
                Some(GraphModel::Er { n, p }) => (Some(n), Some(p)),
                _ => (None, None),
            };
            GraphModel::Er {
                n: required(n.or(bn), "--n")?,
                p: required(p.or(bp), "--p")?,
            }
        }
        Some(ModelArgs::Dpa(d)) => dpa_model(d, base_model)?,
    };
    let cfg = GenerateConfig {
        model,
        seed: Some(resolve_seed(a.seed, base.as_ref().and_then(|c| c.seed))?),
        replicates: positive(
            a.replicates.or(base.as_ref().map(|c| c.replicates)).unwrap_or(1),
            "replicates",
        )?,
        out_dir: a
            .out_dir
            .or(base.map(|c| c.out_dir))
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let seed = cfg.seed.unwrap_or_default();
    if let Some(p) = dpa_params(cfg.model, seed) {
        p.validate()?;
    }
    if let GraphModel::Er { p, .. } = cfg.model {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Config(format!("p must lie in [0, 1], got {p}")));
        }
    }
    let echo = config::echo(&cfg, &cfg.out_dir, "generate")?;
    let total = cfg.replicates;
    let outputs: Vec<Value> = pool(a.jobs)?.install(|| {
        (0..total)
            .into_par_iter()
            .map(|k| {
                let s = seed.wrapping_add(k as u64);
                let graph_path = indexed(&cfg.out_dir, "graph", "edges", k, total);
                let mut out = json!({"replicate": k, "seed": s, "graph": graph_path});
                let g = match dpa_params(cfg.model, s) {
                    None => {
                        let GraphModel::Er { n, p } = cfg.model else { unreachable!() };
                        gen_er(n, p, s)?
                    }
                    Some(params) => {
                        let dpa = gen_dpa(&params)?;
                        let labels = indexed(&cfg.out_dir, "graph", "labels", k, total);
                        write_with(&labels, |w| write_scenarios(&dpa.scenarios, w))?;
                        out["labels"] = json!(labels);
                        dpa.graph
                    }
                };
                write_with(&graph_path, |w| g.write_edge_list(w))?;
                out["nodes"] = json!(g.num_nodes());
                out["edges"] = json!(g.num_edges());
                out["assortativity"] = observed_json(&g);
                Ok(out)
            })
            .collect::<Result<_, CliError>>()
    })?;
    Ok(json!({"command": "generate", "config": echo, "outputs": outputs}))
}

pub fn assort(a: AssortArgs) -> Result<Value, CliError> {
    let base: Option<AssortConfig> = load_opt(&a.config)?;
    let graph = required(a.graph.or(base.map(|c| c.graph)), "--graph")?;
    let g = read_graph(&graph)?;
    let r = assortativity_of_graph(&g)?;
    Ok(json!({
        "command": "assort",
        "graph": graph,
        "nodes": g.num_nodes(),
        "edges": g.num_edges(),
        "assortativity": profile_json(&r),
    }))
}

fn unconditional_bounds(problem: &EtaProblem) -> Value {
    let mut p = problem.clone();
    p.targets = None;
    p.intervals.clear();
    match coefficient_bounds(&p, &TypePair::ALL, &Simplex::default()) {
        Ok(b) => {
            let mut m = serde_json::Map::new();
            for pair in TypePair::ALL {
                if let Some((lo, hi)) = b.get(pair) {
                    m.insert(pair.to_string(), json!([lo, hi]));
                }
            }
            json!({"unconditional_bounds": m})
        }
        Err(e) => json!({"bounds_error": e.to_string()}),
    }
}

pub fn bounds(a: BoundsArgs) -> Result<Value, CliError> {
    let base: Option<BoundsConfig> = load_opt(&a.config)?;
    let cfg = match base {
        Some(mut c) => {
            if !a.graphs.is_empty() {
                c.graphs = a.graphs;
            }
            if !a.order.is_empty() {
                c.order = a.order;
            }
            if !a.intervals.is_empty() {
                c.intervals = a.intervals;
            }
            if a.sweep.is_some() {
                c.sweep = a.sweep;
            }
            if let Some(d) = a.out_dir {
                c.out_dir = d;
            }
            c
        }
        None => BoundsConfig {
            graphs: a.graphs,
            order: if a.order.is_empty() { TypePair::ALL.to_vec() } else { a.order },
            intervals: a.intervals,
            sweep: a.sweep,
            out_dir: a.out_dir.unwrap_or_else(|| PathBuf::from(".")),
        },
    };
    if cfg.graphs.is_empty() {
        return Err(CliError::Config("at least one --graph is required".into()));
    }
    if cfg.order.is_empty() {
        return Err(CliError::Config("--order is empty".into()));
    }
    let echo = config::echo(&cfg, &cfg.out_dir, "bounds")?;
    let sweep_values: Vec<Option<Interval>> = match &cfg.sweep {
        Some(s) => s.values.iter().map(|&v| Some(Interval::singleton(s.pair, v))).collect(),
        None => vec![None],
    };
    let total = cfg.graphs.len();
    let outputs: Vec<Value> = pool(a.jobs)?.install(|| {
        cfg.graphs
            .par_iter()
            .enumerate()
            .map(|(gi, path)| {
                let g = read_graph(path)?;
                let mut problem = EtaProblem::from_graph(&g)?;
                for iv in &cfg.intervals {
                    problem = problem.with_interval(Interval::new(iv.pair, iv.lower, iv.upper));
                }
                let rows: Vec<(Option<Interval>, TypePair, (f64, f64))> = sweep_values
                    .par_iter()
                    .map(|cond| {
                        let mut p = problem.clone();
                        let order: Vec<TypePair> = match cond {
                            Some(iv) => {
                                p = p.with_interval(*iv);
                                cfg.order.iter().copied().filter(|&q| q != iv.pair).collect()
                            }
                            None => cfg.order.clone(),
                        };
                        let b = coefficient_bounds(&p, &order, &Simplex::default()).map_err(|e| match e {
                            crate::Error::ConditioningUnattainable => CliError::Unattainable {
                                message: format!(
                                    "{}: conditioning {} unattainable",
                                    path.display(),
                                    cond.map(|iv| format!("{}={}", iv.pair, iv.lower))
                                        .unwrap_or_else(|| "intervals".into())
                                ),
                                guidance: Some(unconditional_bounds(&problem)),
                            },
                            other => other.into(),
                        })?;
                        Ok(order
                            .into_iter()
                            .map(|q| (*cond, q, b.get(q).expect("queried pair has bounds")))
                            .collect::<Vec<_>>())
                    })
                    .collect::<Result<Vec<_>, CliError>>()?
                    .into_iter()
                    .flatten()
                    .collect();
                let out = indexed(&cfg.out_dir, "bounds", "csv", gi, total);
                write_with(&out, |w| write_bounds_csv(w, rows.iter().copied()))?;
                let listed: Vec<Value> = rows
                    .iter()
                    .map(|(c, q, (lo, hi))| {
                        json!({
                            "conditioned_pair": c.map(|iv| iv.pair.to_string()),
                            "conditioned_value": c.map(|iv| iv.lower),
                            "pair": q.to_string(),
                            "lower": lo,
                            "upper": hi,
                        })
                    })
                    .collect();
                Ok(json!({"graph": path, "csv": out, "bounds": listed}))
            })
            .collect::<Result<_, CliError>>()
    })?;
    Ok(json!({"command": "bounds", "config": echo, "outputs": outputs}))
}

/// Solves `η` or fails with the unconditional bounds as guidance.
fn solve_or_guide(g: &DirectedGraph, targets: AssortProfile, method: EtaMethod, label: &Path) -> Result<EdgeMixMatrix, CliError> {
    let problem = EtaProblem::from_graph(g)?.with_targets(targets);
    match solve_target_eta(&problem, method, &Simplex::default())? {
        EtaOutcome::Solved(eta) => Ok(eta),
        EtaOutcome::Unattainable => Err(CliError::Unattainable {
            message: format!(
                "{}: targets r11={} r12={} r21={} r22={} are not jointly attainable",
                label.display(),
                targets.r11,
                targets.r12,
                targets.r21,
                targets.r22
            ),
            guidance: Some(unconditional_bounds(&problem)),
        }),
    }
}

fn marginal_residual(g: &DirectedGraph, eta: &EdgeMixMatrix) -> Result<f64, CliError> {
    let problem = EtaProblem::from_graph(g)?;
    let rows = eta.row_sums();
    let cols = eta.col_sums();
    let r = problem.source_mass().iter().zip(&rows).map(|(s, r)| (s.1 - r).abs());
    let c = problem.target_mass().iter().zip(&cols).map(|(t, c)| (t.1 - c).abs());
    Ok(r.chain(c).fold(0.0, f64::max))
}

pub fn solve_eta(a: SolveEtaArgs) -> Result<Value, CliError> {
    let base: Option<SolveEtaConfig> = load_opt(&a.config)?;
    let cfg = SolveEtaConfig {
        graph: required(a.graph.or(base.as_ref().map(|c| c.graph.clone())), "--graph")?,
        targets: required(a.targets.or(base.as_ref().map(|c| c.targets)), "--targets")?,
        method: a.method.map(Into::into).or(base.as_ref().map(|c| c.method)).unwrap_or_default(),
        out_dir: a
            .out_dir
            .or(base.map(|c| c.out_dir))
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let echo = config::echo(&cfg, &cfg.out_dir, "solve-eta")?;
    let g = read_graph(&cfg.graph)?;
    let eta = solve_or_guide(&g, cfg.targets, cfg.method, &cfg.graph)?;
    let achieved = eta.assortativity()?;
    let out = cfg.out_dir.join("eta.csv");
    write_with(&out, |w| eta.write_csv(w))?;
    Ok(json!({
        "command": "solve-eta",
        "config": echo,
        "eta": out,
        "method": cfg.method,
        "achieved": profile_json(&achieved),
        "max_target_error": achieved.max_abs_diff(&cfg.targets),
        "max_marginal_residual": marginal_residual(&g, &eta)?,
        "support": [eta.rows(), eta.cols()],
    }))
}

fn same_degrees(a: &DirectedGraph, b: &DirectedGraph) -> bool {
    a.out_degrees() == b.out_degrees() && a.in_degrees() == b.in_degrees()
}

fn run_summary(trace: &RewiringTrace, targets: &AssortProfile, tol: f64) -> Value {
    let last = trace.last().expect("trace has the initial checkpoint");
    json!({
        "initial": profile_json(&trace.checkpoints[0].profile()),
        "final": profile_json(&last.profile()),
        "steps": last.step,
        "max_abs_error": last.profile().max_abs_diff(targets),
        "first_checkpoint_within_tolerance": trace.first_within(targets, tol),
    })
}

pub fn rewire(a: RewireArgs) -> Result<Value, CliError> {
    let base: Option<RewireConfig> = load_opt(&a.config)?;
    let mut rewiring = base.as_ref().map(|c| c.rewiring).unwrap_or_default();
    a.rewiring.apply(&mut rewiring);
    let seed = resolve_seed(a.seed, base.as_ref().and_then(|c| c.seed))?;
    rewiring.seed = seed;
    let cfg = RewireConfig {
        graphs: if a.graphs.is_empty() {
            base.as_ref().map(|c| c.graphs.clone()).unwrap_or_default()
        } else {
            a.graphs
        },
        targets: required(a.targets.or(base.as_ref().map(|c| c.targets)), "--targets")?,
        method: a.method.map(Into::into).or(base.as_ref().map(|c| c.method)).unwrap_or_default(),
        rewiring,
        replicates: positive(
            a.replicates.or(base.as_ref().map(|c| c.replicates)).unwrap_or(1),
            "replicates",
        )?,
        seed: Some(seed),
        out_dir: a
            .out_dir
            .or(base.map(|c| c.out_dir))
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    if cfg.graphs.is_empty() {
        return Err(CliError::Config("at least one --graph is required".into()));
    }
    cfg.rewiring.validate()?;
    let echo = config::echo(&cfg, &cfg.out_dir, "rewire")?;

    let pool = pool(a.jobs)?;
    // Fail fast: every η is solved before any chain runs.
    let prepared: Vec<(DirectedGraph, EdgeMixMatrix)> = pool.install(|| {
        cfg.graphs
            .par_iter()
            .map(|path| {
                let g = read_graph(path)?;
                let eta = solve_or_guide(&g, cfg.targets, cfg.method, path)?;
                Ok((g, eta))
            })
            .collect::<Result<_, CliError>>()
    })?;
    let total = cfg.graphs.len() * cfg.replicates;
    let outputs: Vec<Value> = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|i| {
                let (gi, _) = (i / cfg.replicates, i % cfg.replicates);
                let (g, eta) = &prepared[gi];
                let mut rc = cfg.rewiring;
                rc.seed = seed.wrapping_add(i as u64);
                let (out_g, trace) = run_chain(g, eta, &rc)?;
                if !same_degrees(g, &out_g) {
                    return Err(CliError::Lib(crate::Error::InvalidParam(
                        "degree sequences changed during rewiring".into(),
                    )));
                }
                let graph_out = indexed(&cfg.out_dir, "rewired", "edges", i, total);
                let trace_out = indexed(&cfg.out_dir, "trace", "csv", i, total);
                write_with(&graph_out, |w| out_g.write_edge_list(w))?;
                write_with(&trace_out, |w| trace.write_csv(w))?;
                let mut s = run_summary(&trace, &cfg.targets, rc.tolerance);
                s["input"] = json!(cfg.graphs[gi]);
                s["seed"] = json!(rc.seed);
                s["rewired"] = json!(graph_out);
                s["trace"] = json!(trace_out);
                s["degrees_preserved"] = json!(true);
                Ok(s)
            })
            .collect::<Result<_, CliError>>()
    })?;
    Ok(json!({"command": "rewire", "config": echo, "outputs": outputs}))
}

pub fn fit(a: FitArgs) -> Result<Value, CliError> {
    let base: Option<FitConfig> = load_opt(&a.config)?;
    let mut options = base.as_ref().map(|c| c.options).unwrap_or_default();
    if let Some(v) = a.alpha_grid {
        options.alpha_grid = v;
    }
    if let Some(v) = a.sims_per_alpha {
        options.sims_per_alpha = v;
    }
    let seed = resolve_seed(a.seed, base.as_ref().and_then(|c| c.seed))?;
    options.seed = seed;
    let cfg = FitConfig {
        graph: required(a.graph.or(base.as_ref().map(|c| c.graph.clone())), "--graph")?,
        n_tail: required(a.n_tail.or(base.as_ref().map(|c| c.n_tail)), "--n-tail")?,
        options,
        seed: Some(seed),
        out_dir: a
            .out_dir
            .or(base.map(|c| c.out_dir))
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let echo = config::echo(&cfg, &cfg.out_dir, "fit")?;
    let g = read_graph(&cfg.graph)?;
    let fit = fit_ev(&g, cfg.n_tail, &cfg.options)?;
    let out = cfg.out_dir.join("fit.json");
    let text = serde_json::to_string_pretty(&fit).expect("fit serializes");
    std::fs::write(&out, text + "\n").map_err(|e| io_err(&out, e))?;
    Ok(json!({"command": "fit", "config": echo, "output": out, "fit": fit}))
}

pub fn scenario_gains(a: ScenarioGainsArgs) -> Result<Value, CliError> {
    let base: Option<ScenarioGainsConfig> = load_opt(&a.config)?;
    let base_model = base.as_ref().map(|c| GraphModel::Dpa {
        alpha: c.alpha,
        beta: c.beta,
        gamma: c.gamma,
        delta_in: c.delta_in,
        delta_out: c.delta_out,
        edges: c.edges,
    });
    let GraphModel::Dpa {
        alpha,
        beta,
        gamma,
        delta_in,
        delta_out,
        edges,
    } = dpa_model(&a.dpa, base_model)?
    else {
        unreachable!("dpa_model returns a DPA model")
    };
    let mut rewiring = base.as_ref().map(|c| c.rewiring).unwrap_or_default();
    a.rewiring.apply(&mut rewiring);
    let seed = resolve_seed(a.seed, base.as_ref().and_then(|c| c.seed))?;
    rewiring.seed = seed;
    let cfg = ScenarioGainsConfig {
        alpha,
        beta,
        gamma,
        delta_in,
        delta_out,
        edges,
        targets: required(a.targets.or(base.as_ref().map(|c| c.targets)), "--targets")?,
        method: a.method.map(Into::into).or(base.as_ref().map(|c| c.method)).unwrap_or_default(),
        rewiring,
        replicates: positive(
            a.replicates.or(base.as_ref().map(|c| c.replicates)).unwrap_or(1),
            "replicates",
        )?,
        seed: Some(seed),
        out_dir: a
            .out_dir
            .or(base.map(|c| c.out_dir))
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let params = DpaParams {
        alpha,
        beta,
        gamma,
        delta_in,
        delta_out,
        target_edges: edges,
        seed,
    };
    params.validate()?;
    cfg.rewiring.validate()?;
    let echo = config::echo(&cfg, &cfg.out_dir, "scenario-gains")?;
    let total = cfg.replicates;
    let outputs: Vec<Value> = pool(a.jobs)?.install(|| {
        (0..total)
            .into_par_iter()
            .map(|k| {
                let s = seed.wrapping_add(k as u64);
                let dpa = gen_dpa(&DpaParams { seed: s, ..params })?;
                let label = PathBuf::from(format!("replicate {k}"));
                let eta = solve_or_guide(&dpa.graph, cfg.targets, cfg.method, &label)?;
                let mut rc = cfg.rewiring;
                rc.seed = s;
                let (gains, _, trace) = run_gains(&dpa, &eta, &rc)?;
                let gains_out = indexed(&cfg.out_dir, "gains", "csv", k, total);
                let trace_out = indexed(&cfg.out_dir, "trace", "csv", k, total);
                write_with(&gains_out, |w| gains.write_csv(w))?;
                write_with(&trace_out, |w| trace.write_csv(w))?;
                let leaders: BTreeMap<String, &str> = TypePair::ALL
                    .iter()
                    .map(|&p| (p.to_string(), gains.leader(p).name()))
                    .collect();
                let alpha_gamma_leads = TypePair::ALL
                    .iter()
                    .all(|&p| gains.leader(p) == ScenarioPair::AlphaGamma);
                Ok(json!({
                    "replicate": k,
                    "seed": s,
                    "gains": gains_out,
                    "trace": trace_out,
                    "initial": profile_json(&gains.initial),
                    "final": profile_json(&gains.r#final),
                    "leaders": leaders,
                    "alpha_gamma_leads_all": alpha_gamma_leads,
                }))
            })
            .collect::<Result<_, CliError>>()
    })?;
    let leading = outputs.iter().filter(|o| o["alpha_gamma_leads_all"] == json!(true)).count();
    Ok(json!({
        "command": "scenario-gains",
        "config": echo,
        "alpha_gamma_leads_all": leading,
        "replicates": total,
        "outputs": outputs,
    }))
}

/// Mean trace over replicates, aligned by step. Replicates that stopped
/// early contribute only to the steps they reached.
pub fn mean_trace(traces: &[RewiringTrace]) -> Vec<(Checkpoint, usize)> {
    let mut acc: BTreeMap<u64, ([f64; 5], usize)> = BTreeMap::new();
    for t in traces {
        for c in &t.checkpoints {
            let e = acc.entry(c.step).or_insert(([0.0; 5], 0));
            for (s, v) in e.0.iter_mut().zip([c.r11, c.r12, c.r21, c.r22, c.acc_rate]) {
                *s += v;
            }
            e.1 += 1;
        }
    }
    acc.into_iter()
        .map(|(step, (s, n))| {
            let m = s.map(|x| x / n as f64);
            (
                Checkpoint {
                    step,
                    r11: m[0],
                    r12: m[1],
                    r21: m[2],
                    r22: m[3],
                    acc_rate: m[4],
                },
                n,
            )
        })
        .collect()
}

pub fn aggregate(a: AggregateArgs) -> Result<Value, CliError> {
    let base: Option<AggregateConfig> = load_opt(&a.config)?;
    let cfg = AggregateConfig {
        inputs: if a.inputs.is_empty() {
            base.as_ref().map(|c| c.inputs.clone()).unwrap_or_default()
        } else {
            a.inputs
        },
        out: required(a.out.or(base.map(|c| c.out)), "--out")?,
    };
    if cfg.inputs.is_empty() {
        return Err(CliError::Config("at least one --input is required".into()));
    }
    let traces: Vec<RewiringTrace> = cfg
        .inputs
        .iter()
        .map(|p| {
            let f = File::open(p).map_err(|e| io_err(p, e))?;
            RewiringTrace::read_csv(BufReader::new(f)).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        })
        .collect::<Result<_, _>>()?;
    let dir = cfg
        .out
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    create_dir(&dir)?;
    let echo = config::echo(&cfg, &dir, "aggregate")?;
    let rows = mean_trace(&traces);
    write_with(&cfg.out, |w| {
        let mut w = csv::Writer::from_writer(w);
        let err = |e: csv::Error| crate::Error::Io(std::io::Error::other(e));
        w.write_record(["step", "r11", "r12", "r21", "r22", "acc_rate", "replicates"])
            .map_err(err)?;
        for (c, n) in &rows {
            w.write_record(&[
                c.step.to_string(),
                c.r11.to_string(),
                c.r12.to_string(),
                c.r21.to_string(),
                c.r22.to_string(),
                c.acc_rate.to_string(),
                n.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(json!({
        "command": "aggregate",
        "config": echo,
        "output": cfg.out,
        "inputs": cfg.inputs.len(),
        "checkpoints": rows.len(),
    }))
}
