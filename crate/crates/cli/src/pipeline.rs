//! The six commands. Each returns typed rows plus sidecar data; writing is left
//! to [`crate::output`].

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use spinprep_core::circuit::{Circuit, counts, counts_fused, decompose_native, fold_cnots, simplify};
use spinprep_core::erc::{ChainLabels, cost_recursion, erc_chain, tree_circuit};
use spinprep_core::linalg::derive_seed;
use spinprep_core::mitigation::{
    MitigationOptions, calibrate, estimate_at_fold, exact_expectation, mitigated_expectation, noise_parameter,
    richardson,
};
use spinprep_core::sim::{MAX_DENSITY_QUBITS, NoiseModel, Shots, fidelity, run_density, run_statevector};
use spinprep_core::tomography::{TomoSettings, measure_settings, reconstruct, summarize};
use spinprep_core::vqe::{
    Ansatz, CostFunction, CostSpec, OptimizeOptions, OptimizeResult, RunResult, RyAnsatz, TimeEvoAnsatz,
    initial_state_for, optimize_restart, select_best,
};
use spinprep_core::{
    CouplingTree, Error as CoreError, HalfInt, ObservableSum, StateVector, eigenstate_amplitudes, subset_s2, total_s2,
    total_sz,
};

use crate::config::{ExperimentConfig, Method, System};
use crate::error::{CliError, Result};
use crate::format::{CircuitJson, MitigationJson, OptimizationJson, TomographyJson};
use crate::output::Output;

pub const LIST_SCHEMA: &str = "spinprep.list/1";
pub const PREPARE_SCHEMA: &str = "spinprep.prepare/1";
pub const OPTIMIZE_SCHEMA: &str = "spinprep.optimize/1";
pub const MEASURE_SCHEMA: &str = "spinprep.measure/1";
pub const TOMO_SCHEMA: &str = "spinprep.tomo/1";
pub const GATECOUNT_SCHEMA: &str = "spinprep.gatecount/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ListRow {
    pub index: usize,
    pub target: String,
    pub l: String,
    pub m: String,
}

pub fn cmd_list(system: System) -> Result<Output<ListRow>> {
    let rows = system
        .states()?
        .iter()
        .enumerate()
        .map(|(index, (tree, m))| ListRow {
            index,
            target: system.format_target(tree, *m),
            l: tree.spin().to_string(),
            m: m.to_string(),
        })
        .collect();
    Ok(Output { schema: LIST_SCHEMA, rows, results: json!({ "system": system.to_string() }) })
}

/// The circuit for one target and, for variational methods, its optimization.
pub struct Prepared {
    pub tree: CouplingTree,
    pub m: HalfInt,
    pub label: String,
    pub ideal: StateVector,
    pub circuit: Circuit,
    pub optimization: Option<Optimization>,
}

pub struct Optimization {
    pub result: OptimizeResult,
    pub runs: Vec<RunResult>,
}

fn ansatz(cfg: &ExperimentConfig, tree: &CouplingTree, m: HalfInt) -> Result<Box<dyn Ansatz + Send + Sync>> {
    let n = tree.n_qubits();
    Ok(match cfg.method {
        Method::Erc => return Err(CliError::config("erc has no variational parameters")),
        Method::VqeRy => Box::new(RyAnsatz::linear(n, cfg.depth)?),
        Method::VqeTimeevo => {
            let labels = ChainLabels::from_tree(tree, m)?;
            Box::new(TimeEvoAnsatz::all_to_all(n, cfg.depth, initial_state_for(&labels)?)?)
        }
    })
}

fn optimize_target(cfg: &ExperimentConfig, tree: &CouplingTree, m: HalfInt) -> Result<(Circuit, Optimization)> {
    let ansatz = ansatz(cfg, tree, m)?;
    let f = CostFunction::new(&CostSpec::for_tree(tree, m)?, ansatz.n_qubits())?;
    let options = OptimizeOptions { restarts: cfg.restarts, seed: cfg.seed, ..OptimizeOptions::default() };
    let runs = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| optimize_restart(&f, ansatz.as_ref(), &options, i))
        .collect::<std::result::Result<Vec<_>, CoreError>>()?;
    let result = select_best(ansatz.as_ref(), runs.clone())?;
    let circuit = ansatz.build(&result.best.params)?;
    Ok((circuit, Optimization { result, runs }))
}

fn prepare_target(cfg: &ExperimentConfig, tree: &CouplingTree, m: HalfInt) -> Result<Prepared> {
    let ideal = StateVector::from_real(eigenstate_amplitudes(tree, m)?.amplitudes())?;
    let (circuit, optimization) = match cfg.method {
        Method::Erc => (tree_circuit(tree, m)?, None),
        _ => {
            let (c, o) = optimize_target(cfg, tree, m)?;
            (c, Some(o))
        }
    };
    Ok(Prepared { tree: tree.clone(), m, label: cfg.system.format_target(tree, m), ideal, circuit, optimization })
}

/// Rejects combinations that would fail only after simulation started.
fn check(cfg: &ExperimentConfig, needs_density: bool) -> Result<()> {
    let n = cfg.system.n_qubits();
    if cfg.method == Method::VqeTimeevo && cfg.system == System::Bowtie {
        return Err(CliError::config("vqe-timeevo needs a chain system"));
    }
    if cfg.method != Method::Erc && n < 2 {
        return Err(CliError::config("variational methods need at least two qubits"));
    }
    if needs_density && n > MAX_DENSITY_QUBITS {
        return Err(CoreError::RegisterTooLarge { n, max: MAX_DENSITY_QUBITS }.into());
    }
    for &k in &cfg.ks {
        noise_parameter(k)?;
    }
    if needs_density && cfg.re && cfg.ks.iter().collect::<std::collections::BTreeSet<_>>().len() < 2 {
        return Err(CliError::config("extrapolation needs at least two distinct --ks values"));
    }
    Ok(())
}

fn prepare_all(cfg: &ExperimentConfig) -> Result<Vec<Prepared>> {
    cfg.targets()?.iter().map(|(tree, m)| prepare_target(cfg, tree, *m)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepareRow {
    pub target: String,
    pub method: String,
    pub qubits: usize,
    pub cnot: usize,
    pub single_qubit: usize,
    pub depth: usize,
    pub fidelity: f64,
    /// Empty when the register is too large for the density simulator.
    pub fidelity_noisy: Option<f64>,
    pub s2: f64,
    pub sz: f64,
}

pub fn cmd_prepare(cfg: &ExperimentConfig) -> Result<Output<PrepareRow>> {
    check(cfg, false)?;
    let noise = cfg.noise_model();
    let mut rows = Vec::new();
    let mut circuits = Vec::new();
    for p in prepare_all(cfg)? {
        let n = p.tree.n_qubits();
        let native = simplify(&decompose_native(&p.circuit)?);
        let k = counts(&native);
        let psi = run_statevector(&native)?;
        let fidelity_noisy =
            if n <= MAX_DENSITY_QUBITS { Some(fidelity(&run_density(&native, &noise)?, &p.ideal)?) } else { None };
        rows.push(PrepareRow {
            target: p.label.clone(),
            method: cfg.method.to_string(),
            qubits: n,
            cnot: k.cnot,
            single_qubit: k.single_qubit,
            depth: k.depth,
            fidelity: psi.overlap(&p.ideal)?,
            fidelity_noisy,
            s2: total_s2(n)?.expectation(&psi)?,
            sz: total_sz(n)?.expectation(&psi)?,
        });
        circuits.push(json!({ "target": p.label, "circuit": CircuitJson::from_circuit(&native) }));
    }
    Ok(Output { schema: PREPARE_SCHEMA, rows, results: json!({ "circuits": circuits }) })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizeRow {
    pub target: String,
    pub method: String,
    pub depth: usize,
    pub restart: usize,
    pub cost: f64,
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub best: bool,
}

pub fn cmd_optimize(cfg: &ExperimentConfig) -> Result<Output<OptimizeRow>> {
    if cfg.method == Method::Erc {
        return Err(CliError::config("optimize needs --method vqe-ry or vqe-timeevo"));
    }
    check(cfg, false)?;
    let mut rows = Vec::new();
    let mut best = Vec::new();
    for p in prepare_all(cfg)? {
        let opt = p.optimization.as_ref().expect("variational method");
        let ansatz = ansatz(cfg, &p.tree, p.m)?;
        for run in &opt.runs {
            let psi = run_statevector(&ansatz.build(&run.params)?)?;
            rows.push(OptimizeRow {
                target: p.label.clone(),
                method: cfg.method.to_string(),
                depth: cfg.depth,
                restart: run.restart,
                cost: run.cost,
                fidelity: psi.overlap(&p.ideal)?,
                iterations: run.iterations,
                converged: run.converged,
                best: run.restart == opt.result.best.restart,
            });
        }
        let b = &opt.result.best;
        let summary = OptimizationJson {
            params: b.params.clone(),
            cost: b.cost,
            fidelity: opt.result.state.overlap(&p.ideal)?,
            iterations: b.iterations,
            trace: b.trace.clone(),
            seed: cfg.seed,
        };
        best.push(json!({ "target": p.label, "restart": b.restart, "optimization": summary }));
    }
    Ok(Output { schema: OPTIMIZE_SCHEMA, rows, results: json!({ "best": best }) })
}

/// Named observables measured for a target: total `S2`, total `Sz` and `S2`
/// of every proper internal node.
pub fn observables(tree: &CouplingTree) -> Result<Vec<(String, ObservableSum)>> {
    let n = tree.n_qubits();
    let mut out = vec![("S2".to_string(), total_s2(n)?), ("Sz".to_string(), total_sz(n)?)];
    let nodes = tree.internal_nodes();
    for (qubits, _) in &nodes[..nodes.len().saturating_sub(1)] {
        let name = qubits.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        out.push((format!("S2[{name}]"), subset_s2(n, qubits)?));
    }
    Ok(out)
}

/// One repetition of the shot-based estimators.
#[derive(Clone, Debug, PartialEq)]
struct Estimate {
    raw: f64,
    em: f64,
    re: Option<f64>,
    em_re: Option<f64>,
    detail: MitigationJson,
}

fn estimate(
    cfg: &ExperimentConfig,
    obs: &ObservableSum,
    circuit: &Circuit,
    noise: &NoiseModel,
    seed: u64,
) -> Result<Estimate> {
    let options = MitigationOptions { ks: cfg.ks.clone(), shots: cfg.shots.0, seed, method: cfg.mitigation.into() };
    if cfg.re {
        let e = mitigated_expectation(obs, circuit, noise, &options)?;
        let re = richardson(&e.raw_points)?.intercept;
        return Ok(Estimate { raw: e.raw, em: e.em, re: Some(re), em_re: Some(e.em_re), detail: (&e).into() });
    }
    let native = decompose_native(circuit)?;
    let confusion = calibrate(noise, native.n_qubits(), options.shots, derive_seed(seed, &[u64::MAX]))?;
    let (raw, em) = estimate_at_fold(obs, &native, noise, &confusion, 0, &options)?;
    let detail = MitigationJson { raw, em, em_re: em, slope: 0.0, points: vec![(1, em)] };
    Ok(Estimate { raw, em, re: None, em_re: None, detail })
}

type Pick = fn(&Estimate) -> Option<f64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureRow {
    pub target: String,
    pub observable: String,
    pub estimator: String,
    pub value: f64,
    /// Standard error over `--reps` repetitions; empty for a single repetition.
    pub stderr: Option<f64>,
}

fn mean_stderr(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

pub fn cmd_measure(cfg: &ExperimentConfig) -> Result<Output<MeasureRow>> {
    check(cfg, true)?;
    let noise = cfg.noise_model();
    let reps = if cfg.shots.0 == Shots::Exact { 1 } else { cfg.reps };
    let prepared = prepare_all(cfg)?;
    let per_target = prepared
        .par_iter()
        .enumerate()
        .map(|(t, p)| measure_target(cfg, &noise, reps, t, p))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (r, d) in per_target {
        rows.extend(r);
        details.extend(d);
    }
    Ok(Output { schema: MEASURE_SCHEMA, rows, results: json!({ "estimates": details }) })
}

fn measure_target(
    cfg: &ExperimentConfig,
    noise: &NoiseModel,
    reps: usize,
    t: usize,
    p: &Prepared,
) -> Result<(Vec<MeasureRow>, Vec<serde_json::Value>)> {
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (o, (name, obs)) in observables(&p.tree)?.iter().enumerate() {
        let exact = exact_expectation(obs, &p.circuit)?;
        let runs = (0..reps)
            .map(|r| estimate(cfg, obs, &p.circuit, noise, derive_seed(cfg.seed, &[t as u64, o as u64, r as u64])))
            .collect::<Result<Vec<_>>>()?;
        let mut push = |estimator: &str, value: f64, stderr: Option<f64>| {
            rows.push(MeasureRow {
                target: p.label.clone(),
                observable: name.clone(),
                estimator: estimator.to_string(),
                value,
                stderr,
            })
        };
        push("exact", exact, None);
        let column = |f: Pick| runs.iter().map(f).collect::<Option<Vec<f64>>>();
        let mut estimators: Vec<(&str, Pick)> = vec![("raw", |e| Some(e.raw))];
        if cfg.em {
            estimators.push(("em", |e| Some(e.em)));
        }
        if cfg.re {
            estimators.push(("re", |e| e.re));
        }
        if cfg.em && cfg.re {
            estimators.push(("em_re", |e| e.em_re));
        }
        for (estimator, f) in estimators {
            if let Some(values) = column(f) {
                let (mean, se) = mean_stderr(&values);
                push(estimator, mean, se);
            }
        }
        details.push(json!({
            "target": p.label,
            "observable": name,
            "exact": exact,
            "reps": runs.iter().map(|r| &r.detail).collect::<Vec<_>>(),
        }));
    }
    Ok((rows, details))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomoRow {
    pub target: String,
    pub estimator: String,
    /// Fidelity of the PSD-projected reconstruction.
    pub fidelity: f64,
    /// Fidelity of the unprojected linear-inversion estimate.
    pub fidelity_linear: f64,
    pub purity: f64,
}

pub fn cmd_tomo(cfg: &ExperimentConfig) -> Result<Output<TomoRow>> {
    check(cfg, true)?;
    let noise = cfg.noise_model();
    let prepared = prepare_all(cfg)?;
    let per_target =
        prepared.par_iter().enumerate().map(|(t, p)| tomo_target(cfg, &noise, t, p)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for (r, d) in per_target {
        rows.extend(r);
        details.push(d);
    }
    Ok(Output { schema: TOMO_SCHEMA, rows, results: json!({ "targets": details }) })
}

fn tomo_target(
    cfg: &ExperimentConfig,
    noise: &NoiseModel,
    t: usize,
    p: &Prepared,
) -> Result<(Vec<TomoRow>, serde_json::Value)> {
    let native = decompose_native(&p.circuit)?;
    let n = native.n_qubits();
    let mut ks = cfg.ks.clone();
    if !ks.contains(&0) {
        ks.insert(0, 0);
    }
    let mut rows = Vec::new();
    let mut detail = serde_json::Map::new();
    let flags: &[bool] = if cfg.em { &[false, true] } else { &[false] };
    for &em in flags {
        let mut reports = Vec::with_capacity(ks.len());
        for &k in &ks {
            let settings = TomoSettings::full(n, cfg.shots.0, derive_seed(cfg.seed, &[t as u64, k as u64]))?;
            let data = measure_settings(&fold_cnots(&native, k), noise, &settings, em)?;
            let report = summarize(&reconstruct(&data)?, &p.ideal, &data)?;
            reports.push((k, report));
        }
        let (base, direct) = if em { ("em", "em") } else { ("raw", "raw") };
        let r0 = &reports.iter().find(|(k, _)| *k == 0).expect("k = 0 included").1;
        rows.push(TomoRow {
            target: p.label.clone(),
            estimator: direct.to_string(),
            fidelity: r0.fidelity_projected,
            fidelity_linear: r0.fidelity_raw,
            purity: r0.purity,
        });
        if cfg.re {
            let fit = |f: fn(&spinprep_core::TomoReport) -> f64| {
                let pts: Vec<(u32, f64)> = reports
                    .iter()
                    .filter(|(k, _)| cfg.ks.contains(k))
                    .map(|(k, r)| Ok((noise_parameter(*k)?, f(r))))
                    .collect::<Result<_>>()?;
                Ok::<_, CliError>(richardson(&pts)?.intercept)
            };
            rows.push(TomoRow {
                target: p.label.clone(),
                estimator: if em { "em_re" } else { "re" }.to_string(),
                fidelity: fit(|r| r.fidelity_projected)?,
                fidelity_linear: fit(|r| r.fidelity_raw)?,
                purity: fit(|r| r.purity)?,
            });
        }
        let levels: Vec<_> =
            reports.iter().map(|(k, r)| json!({ "k": k, "report": TomographyJson::from(r) })).collect();
        detail.insert(base.to_string(), serde_json::Value::Array(levels));
    }
    detail.insert("target".into(), json!(p.label));
    Ok((rows, serde_json::Value::Object(detail)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GatecountRow {
    pub n: usize,
    pub states: usize,
    pub c_model: u64,
    pub s_model: u64,
    pub cnot_max: usize,
    pub single_max: usize,
    pub within_model: bool,
}

/// Parses `"2..6"`, `"2..=6"` or a single `"4"`; both ends inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || CliError::config(format!("expected a range like 2..6, got {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a < 2 || b < a {
        return Err(CliError::config(format!("range must satisfy 2 <= start <= end, got {s:?}")));
    }
    if b > spinprep_core::sim::MAX_STATEVECTOR_QUBITS {
        return Err(CliError::config(format!("n at most {} is supported", spinprep_core::sim::MAX_STATEVECTOR_QUBITS)));
    }
    Ok(a..=b)
}

/// Model counts next to the largest fused counts over every compiled chain
/// circuit of each size.
pub fn cmd_gatecount(range: RangeInclusive<usize>) -> Result<Output<GatecountRow>> {
    let ns: Vec<usize> = range.clone().collect();
    let rows = ns
        .par_iter()
        .map(|&n| {
            let model = cost_recursion(n)?;
            let states = System::Chain(n).states()?;
            let mut cnot_max = 0;
            let mut single_max = 0;
            for (tree, m) in &states {
                let c = erc_chain(&ChainLabels::from_tree(tree, *m)?)?;
                let k = counts_fused(&decompose_native(&simplify(&c))?);
                cnot_max = cnot_max.max(k.cnot);
                single_max = single_max.max(k.single_qubit);
            }
            Ok(GatecountRow {
                n,
                states: states.len(),
                c_model: model.c,
                s_model: model.s,
                cnot_max,
                single_max,
                within_model: cnot_max as u64 <= model.c && single_max as u64 <= model.s,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Output { schema: GATECOUNT_SCHEMA, rows, results: json!({ "n_min": range.start(), "n_max": range.end() }) })
}
