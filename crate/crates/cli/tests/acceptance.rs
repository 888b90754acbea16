//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line.

#![allow(clippy::type_complexity)]

use std::f64::consts::TAU;
use std::process::ExitCode;

use spinprep::config::{ConfigFile, ExperimentConfig, System};
use spinprep::output::{render_csv, render_sidecar};
use spinprep::pipeline::{cmd_gatecount, cmd_measure, cmd_optimize, cmd_tomo};
use spinprep_core::circuit::{Circuit, counts};
use spinprep_core::erc::{ChainLabels, cost_recursion, erc_chain, tree_circuit};
use spinprep_core::linalg::derive_seed;
use spinprep_core::mitigation::{ConfusionMatrix, MitigationMethod, mitigate_distribution, richardson};
use spinprep_core::nalgebra::{DMatrix, DVector};
use spinprep_core::num_complex::Complex64;
use spinprep_core::sim::{
    DensityMatrix, NoiseModel, Shots, StateVector, apply_readout, run_statevector, sample_distribution,
};
use spinprep_core::tomography::{TomoSettings, measure_settings, measure_state, reconstruct, report};
use spinprep_core::vqe::{
    Ansatz, CostFunction, CostSpec, RyAnsatz, TimeEvoAnsatz, cost_at, gradient, initial_state_for,
};
use spinprep_core::{
    CouplingTree, HalfInt, ObservableSum, TreeShape, eigenstate_amplitudes, enumerate_states, subset_s2, total_sz,
};

type Outcome = Result<String, String>;

fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::resolve(serde_json::from_str::<ConfigFile>(json).expect("config parses")).expect("config valid")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Uniform in `[0, 1)` from a seed path.
fn uniform(root: u64, parts: &[u64]) -> f64 {
    (derive_seed(root, parts) >> 11) as f64 / (1u64 << 53) as f64
}

/// Real state from `(coefficient, ket)` terms, qubit 0 leftmost.
fn kets(terms: &[(f64, &str)]) -> Vec<f64> {
    let n = terms[0].1.len();
    let mut v = vec![0.0; 1 << n];
    for &(c, k) in terms {
        v[usize::from_str_radix(k, 2).unwrap()] += c;
    }
    v
}

fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn overlap2(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (norm(a) * norm(b))).powi(2)
}

fn criterion_1() -> Outcome {
    let s2 = 1.0 / 2f64.sqrt();
    let s3 = 1.0 / 3f64.sqrt();
    let s6 = 1.0 / 6f64.sqrt();
    let c = -(2.0f64 / 3.0).sqrt();
    let three: Vec<((i32, i32, i32), Vec<f64>)> = vec![
        ((0, 1, -1), kets(&[(s2, "011"), (-s2, "101")])),
        ((0, 1, 1), kets(&[(s2, "100"), (-s2, "010")])),
        ((2, 1, -1), kets(&[(s6, "011"), (s6, "101"), (c, "110")])),
        ((2, 1, 1), kets(&[(s6, "100"), (s6, "010"), (c, "001")])),
        ((2, 3, -3), kets(&[(1.0, "111")])),
        ((2, 3, -1), kets(&[(s3, "011"), (s3, "101"), (s3, "110")])),
        ((2, 3, 1), kets(&[(s3, "100"), (s3, "010"), (s3, "001")])),
        ((2, 3, 3), kets(&[(1.0, "000")])),
    ];
    let mut worst: f64 = 1.0;
    for ((l01, l, m), table) in &three {
        ensure((norm(table) - 1.0).abs() < 1e-12, || format!("row {l01},{l},{m} not normalized"))?;
        let tree = CouplingTree::chain(&[h(*l01), h(*l)]).map_err(err)?;
        let ours = eigenstate_amplitudes(&tree, h(*m)).map_err(err)?;
        worst = worst.min(overlap2(table, ours.amplitudes()));
    }
    let singlet = kets(&[(1.0, "01"), (-1.0, "10")]);
    let one = kets(&[(1.0, "1")]);
    let zero = kets(&[(1.0, "0")]);
    let triplet0 = kets(&[(1.0, "01"), (1.0, "10")]);
    let scale = |v: Vec<f64>, s: f64| v.into_iter().map(|x| x * s).collect::<Vec<_>>();
    let sub = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>();
    let bracket_minus = sub(scale(kron(&one, &triplet0), 0.5), kets(&[(1.0, "011")]));
    let bracket_plus = sub(kets(&[(1.0, "100")]), scale(kron(&zero, &triplet0), 0.5));
    let left_minus = sub(scale(kron(&triplet0, &one), 0.5), kets(&[(1.0, "110")]));
    let left_plus = sub(kets(&[(1.0, "001")]), scale(kron(&triplet0, &zero), 0.5));
    let five: Vec<((i32, i32, i32, i32, i32), Vec<f64>)> = vec![
        ((0, 1, 0, 1, -1), scale(kron(&kron(&singlet, &one), &singlet), 0.5)),
        ((0, 1, 0, 1, 1), scale(kron(&kron(&singlet, &zero), &singlet), 0.5)),
        ((0, 1, 2, 1, -1), scale(kron(&singlet, &bracket_minus), s3)),
        ((0, 1, 2, 1, 1), scale(kron(&singlet, &bracket_plus), s3)),
        ((2, 1, 0, 1, -1), scale(kron(&left_minus, &singlet), s3)),
        ((2, 1, 0, 1, 1), scale(kron(&left_plus, &singlet), s3)),
    ];
    for ((ll, llc, lr, l, m), table) in &five {
        ensure((norm(table) - 1.0).abs() < 1e-12, || format!("bowtie row {ll},{llc},{lr},{l},{m} not normalized"))?;
        let tree = CouplingTree::bowtie(h(*ll), h(*llc), h(*lr), h(*l)).map_err(err)?;
        let ours = eigenstate_amplitudes(&tree, h(*m)).map_err(err)?;
        worst = worst.min(overlap2(table, ours.amplitudes()));
    }
    ensure(worst >= 1.0 - 1e-10, || format!("worst overlap^2 {worst}"))?;
    Ok(format!("8 + 6 table states, worst overlap^2 = 1 - {:.1e}", 1.0 - worst))
}

fn dense_moments(obs: &ObservableSum, psi: &StateVector) -> (f64, f64) {
    let m = obs.to_matrix();
    let v = DVector::from_column_slice(psi.amplitudes());
    let mv = &m * &v;
    let mean = v.dotc(&mv).re;
    (mean, mv.norm_squared() - mean * mean)
}

fn criterion_2() -> Outcome {
    let mut cases: Vec<(CouplingTree, HalfInt, Circuit)> = Vec::new();
    for n in 2..=5 {
        for (tree, m) in enumerate_states(&TreeShape::chain(n).map_err(err)?).map_err(err)? {
            let c = erc_chain(&ChainLabels::from_tree(&tree, m).map_err(err)?).map_err(err)?;
            cases.push((tree, m, c));
        }
    }
    for (ll, lr, m) in [(0, 0, -1), (0, 0, 1), (0, 2, -1), (0, 2, 1), (2, 0, -1), (2, 0, 1)] {
        let tree = CouplingTree::bowtie(h(ll), h(1), h(lr), h(1)).map_err(err)?;
        let c = tree_circuit(&tree, h(m)).map_err(err)?;
        cases.push((tree, h(m), c));
    }
    let (mut worst_f, mut worst_mean, mut worst_var): (f64, f64, f64) = (1.0, 0.0, 0.0);
    for (tree, m, c) in &cases {
        let n = tree.n_qubits();
        let psi = run_statevector(c).map_err(err)?;
        let oracle = StateVector::from_real(eigenstate_amplitudes(tree, *m).map_err(err)?.amplitudes()).map_err(err)?;
        worst_f = worst_f.min(psi.overlap(&oracle).map_err(err)?);
        let mut checks = vec![(total_sz(n).map_err(err)?, m.value())];
        for (qubits, l) in tree.internal_nodes() {
            checks.push((subset_s2(n, &qubits).map_err(err)?, l.casimir()));
        }
        for (obs, want) in checks {
            let (mean, var) = dense_moments(&obs, &psi);
            worst_mean = worst_mean.max((mean - want).abs());
            worst_var = worst_var.max(var.abs());
        }
    }
    ensure(worst_f >= 1.0 - 1e-10, || format!("worst fidelity {worst_f}"))?;
    ensure(worst_mean <= 1e-9 && worst_var <= 1e-9, || format!("moment errors {worst_mean:e} / {worst_var:e}"))?;
    Ok(format!(
        "{} circuits, worst fidelity 1 - {:.1e}, moment error {:.1e}, variance {:.1e}",
        cases.len(),
        1.0 - worst_f,
        worst_mean,
        worst_var
    ))
}

fn criterion_3() -> Outcome {
    let first = cost_recursion(2).map_err(err)?;
    ensure((first.c, first.s) == (1, 2), || format!("n = 2 gives ({}, {})", first.c, first.s))?;
    for n in 2..12 {
        let (a, b) = (cost_recursion(n).map_err(err)?, cost_recursion(n + 1).map_err(err)?);
        ensure(b.c == 16 * a.c + 4 * a.s && b.s == 12 * a.c + 4 * a.s, || format!("recursion broken at n = {n}"))?;
    }
    let table = cmd_gatecount(2..=5).map_err(err)?;
    for r in &table.rows {
        ensure(r.cnot_max as u64 <= r.c_model && r.single_max as u64 <= r.s_model, || {
            format!(
                "n = {}: compiled ({}, {}) exceeds model ({}, {})",
                r.n, r.cnot_max, r.single_max, r.c_model, r.s_model
            )
        })?;
    }
    let summary: Vec<String> = table
        .rows
        .iter()
        .map(|r| format!("n={} {}/{} {}/{}", r.n, r.cnot_max, r.c_model, r.single_max, r.s_model))
        .collect();
    Ok(format!("cnot and single-qubit compiled/model: {}", summary.join(", ")))
}

fn best_rows(out: &spinprep::output::Output<spinprep::pipeline::OptimizeRow>) -> Vec<&spinprep::pipeline::OptimizeRow> {
    out.rows.iter().filter(|r| r.best).collect()
}

fn criterion_4() -> Outcome {
    let cfg = config(r#"{"system":"chain-3","method":"vqe-ry","depth":3,"restarts":10,"seed":0}"#);
    let out = cmd_optimize(&cfg).map_err(err)?;
    let mut dicke = Vec::new();
    let mut worst_cost: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for r in best_rows(&out) {
        if r.target.starts_with("l01=1,l=3/2") && (r.target.ends_with("m=-1/2") || r.target.ends_with("m=1/2")) {
            dicke.push(format!("{:.6}", r.fidelity));
            continue;
        }
        worst_cost = worst_cost.max(r.cost);
        worst_f = worst_f.max((r.fidelity - 1.0).abs());
    }
    ensure(dicke.len() == 2, || "expected two Dicke targets".into())?;
    ensure(worst_cost <= 1e-7 && worst_f <= 1e-4, || format!("worst cost {worst_cost:e}, fidelity error {worst_f:e}"))?;
    Ok(format!(
        "6 targets, worst cost {worst_cost:.1e}, worst |F - 1| {worst_f:.1e}; Dicke fidelities {} (reported)",
        dicke.join(", ")
    ))
}

fn criterion_5() -> Outcome {
    let cfg = config(r#"{"system":"chain-3","method":"vqe-timeevo","depth":2,"restarts":10,"seed":0}"#);
    let out = cmd_optimize(&cfg).map_err(err)?;
    let best = best_rows(&out);
    ensure(best.len() == 8, || format!("{} targets", best.len()))?;
    let worst_cost = best.iter().map(|r| r.cost).fold(0.0, f64::max);
    let worst_f = best.iter().map(|r| r.fidelity).fold(1.0, f64::min);
    ensure(worst_cost <= 1e-12 && worst_f > 0.9999, || format!("worst cost {worst_cost:e}, fidelity {worst_f}"))?;
    Ok(format!("8 targets, worst cost {worst_cost:.1e}, worst fidelity {worst_f:.8}"))
}

fn gradient_error<A: Ansatz>(f: &CostFunction, ansatz: &A, root: u64) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for case in 0..50u64 {
        let params: Vec<f64> = (0..ansatz.n_params()).map(|i| TAU * uniform(root, &[case, i as u64])).collect();
        let g = gradient(f, ansatz, &params).map_err(err)?;
        let step = 1e-5;
        for i in 0..params.len() {
            let (mut up, mut down) = (params.clone(), params.clone());
            up[i] += step;
            down[i] -= step;
            let fd = (cost_at(f, ansatz, &up).map_err(err)? - cost_at(f, ansatz, &down).map_err(err)?) / (2.0 * step);
            worst = worst.max((g[i] - fd).abs());
        }
    }
    Ok(worst)
}

fn criterion_6() -> Outcome {
    let labels = ChainLabels::new(vec![h(2), h(1)], h(-1)).map_err(err)?;
    let f = CostFunction::new(&CostSpec::for_tree(&labels.tree(), labels.m()).map_err(err)?, 3).map_err(err)?;
    let ry = gradient_error(&f, &RyAnsatz::linear(3, 3).map_err(err)?, 1)?;
    let te = TimeEvoAnsatz::all_to_all(3, 2, initial_state_for(&labels).map_err(err)?).map_err(err)?;
    let tev = gradient_error(&f, &te, 2)?;
    ensure(ry <= 1e-6 && tev <= 1e-6, || format!("max deviation ry {ry:e}, timeevo {tev:e}"))?;
    Ok(format!("50 instances each, max deviation ry {ry:.1e}, timeevo {tev:.1e}"))
}

fn criterion_7() -> Outcome {
    let noise = NoiseModel::default();
    let factors = noise.readout_matrices(3).map_err(err)?;
    let confusion = ConfusionMatrix::from_factors(&factors).map_err(err)?;
    let total: f64 = (1..=8).map(f64::from).sum();
    let truth: Vec<f64> = (1..=8).map(|i| f64::from(i) / total).collect();
    let observed = apply_readout(&truth, &factors).map_err(err)?;
    let exact = mitigate_distribution(&confusion, &observed, MitigationMethod::default()).map_err(err)?;
    let exact_err = exact.iter().zip(&truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(exact_err <= 1e-10, || format!("exact-mode error {exact_err:e}"))?;

    let shots = 100_000u64;
    let sampled = sample_distribution(&observed, 3, shots, 7).map_err(err)?.frequencies(3).map_err(err)?;
    let est = mitigate_distribution(&confusion, &sampled, MitigationMethod::default()).map_err(err)?;
    // Multinomial covariance of the observed frequencies pushed through M^-1.
    let q = DVector::from_column_slice(&observed);
    let cov_q = (DMatrix::from_diagonal(&q) - &q * q.transpose()) / shots as f64;
    let inv = confusion.matrix().clone().try_inverse().ok_or("confusion matrix singular")?;
    let cov = &inv * cov_q * inv.transpose();
    let worst_z = (0..8).map(|i| (est[i] - truth[i]).abs() / cov[(i, i)].sqrt()).fold(0.0, f64::max);
    ensure(worst_z <= 3.0, || format!("worst deviation {worst_z:.2} sigma"))?;

    let line: Vec<(u32, f64)> = [1u32, 3, 5, 7].iter().map(|&r| (r, 0.8125 - 0.046875 * f64::from(r))).collect();
    let fit = richardson(&line).map_err(err)?;
    ensure((fit.intercept - 0.8125).abs() <= 1e-12 && (fit.slope + 0.046875).abs() <= 1e-12, || {
        format!("fit {} {}", fit.intercept, fit.slope)
    })?;

    let cfg = config(r#"{"system":"chain-3","method":"erc","shots":"exact","ks":[0,1,2]}"#);
    let out = cmd_measure(&cfg).map_err(err)?;
    let mut checked = 0;
    let mut worst_gain: f64 = f64::INFINITY;
    for target in System::Chain(3).states().map_err(err)?.iter().map(|(t, m)| System::Chain(3).format_target(t, *m)) {
        for obs in ["S2", "Sz"] {
            let get = |e: &str| {
                out.rows
                    .iter()
                    .find(|r| r.target == target && r.observable == obs && r.estimator == e)
                    .map(|r| r.value)
                    .ok_or_else(|| format!("missing {target} {obs} {e}"))
            };
            let (exact, raw, em_re) = (get("exact")?, get("raw")?, get("em_re")?);
            ensure((em_re - exact).abs() <= (raw - exact).abs(), || {
                format!(
                    "{target} {obs}: |em_re - exact| = {:e} > |raw - exact| = {:e}",
                    (em_re - exact).abs(),
                    (raw - exact).abs()
                )
            })?;
            if (raw - exact).abs() > 0.0 {
                worst_gain = worst_gain.min((raw - exact).abs() / (em_re - exact).abs().max(1e-300));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "exact EM error {exact_err:.1e}, 1e5-shot worst {worst_z:.2} sigma, Richardson exact, {checked} em_re checks (smallest error reduction {worst_gain:.1}x)"
    ))
}

fn random_state(n: usize, root: u64) -> Result<StateVector, String> {
    let amps =
        (0..1u64 << n).map(|i| Complex64::new(uniform(root, &[i, 0]) - 0.5, uniform(root, &[i, 1]) - 0.5)).collect();
    StateVector::from_amplitudes(amps).map_err(err)
}

fn criterion_8() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=3usize {
        let mut states = vec![random_state(n, n as u64)?, random_state(n, 100 + n as u64)?];
        if n >= 2 {
            for (tree, m) in enumerate_states(&TreeShape::chain(n).map_err(err)?).map_err(err)? {
                states.push(
                    StateVector::from_real(eigenstate_amplitudes(&tree, m).map_err(err)?.amplitudes()).map_err(err)?,
                );
            }
        }
        let settings = TomoSettings::full(n, Shots::Exact, 0).map_err(err)?;
        let all: Vec<usize> = (0..n).collect();
        for psi in &states {
            for p in [0.0, 0.37] {
                let mut rho = DensityMatrix::from_pure(psi).map_err(err)?;
                rho.depolarize(&all, p).map_err(err)?;
                let rec = reconstruct(&measure_state(&rho, &NoiseModel::ideal(), &settings, None).map_err(err)?)
                    .map_err(err)?;
                let d = (&rec.raw - rho.to_matrix()).iter().map(|v| v.norm()).fold(0.0, f64::max);
                worst = worst.max(d);
                count += 1;
            }
        }
        let mixed = DensityMatrix::maximally_mixed(n).map_err(err)?;
        let rec =
            reconstruct(&measure_state(&mixed, &NoiseModel::ideal(), &settings, None).map_err(err)?).map_err(err)?;
        let q = report(&rec.projected, &states[0]).map_err(err)?;
        let want = 1.0 / (1u32 << n) as f64;
        ensure((q.fidelity - want).abs() <= 1e-12 && (q.purity - want).abs() <= 1e-12, || {
            format!("n = {n}: mixed-state fidelity {} purity {}", q.fidelity, q.purity)
        })?;
    }
    ensure(worst <= 1e-10, || format!("worst reconstruction error {worst:e}"))?;
    Ok(format!("{count} states, worst error {worst:.1e}; maximally mixed anchors 1/2, 1/4, 1/8"))
}

fn criterion_9() -> Outcome {
    let cfg = config(r#"{"system":"chain-3","method":"erc"}"#);
    let out = cmd_tomo(&cfg).map_err(err)?;
    let raw: Vec<_> = out.rows.iter().filter(|r| r.estimator == "raw").collect();
    ensure(raw.len() == 8, || format!("{} raw rows", raw.len()))?;
    for r in &raw {
        ensure(r.purity < 1.0 && r.fidelity < 1.0, || {
            format!("{}: purity {} fidelity {}", r.target, r.purity, r.fidelity)
        })?;
    }
    let grid = [0.0, 0.01, 0.02, 0.05];
    let base = NoiseModel::default();
    let settings = TomoSettings::full(3, Shots::Exact, 0).map_err(err)?;
    let mut strict = 0;
    let mut flat = Vec::new();
    for (tree, m) in System::Chain(3).states().map_err(err)? {
        let circuit = tree_circuit(&tree, m).map_err(err)?;
        let purities = grid
            .iter()
            .map(|&p2| {
                let data = measure_settings(&circuit, &base.with_p2(p2), &settings, false)?;
                Ok(reconstruct(&data)?.projected.purity())
            })
            .collect::<Result<Vec<f64>, spinprep_core::Error>>()
            .map_err(err)?;
        let label = System::Chain(3).format_target(&tree, m);
        if counts(&spinprep_core::circuit::decompose_native(&circuit).map_err(err)?).cnot == 0 {
            // No two-qubit gate: p2 never acts.
            ensure(purities.windows(2).all(|w| w[1] <= w[0] + 1e-12), || format!("{label}: {purities:?}"))?;
            flat.push(label);
        } else {
            ensure(purities.windows(2).all(|w| w[1] < w[0]), || {
                format!("{label}: purity not decreasing {purities:?}")
            })?;
            strict += 1;
        }
    }
    let worst = raw.iter().map(|r| r.purity).fold(0.0, f64::max);
    Ok(format!(
        "raw purity <= {worst:.4} and fidelity < 1 for 8 states; purity strictly decreasing over p2 {grid:?} for {strict} circuits, constant for CNOT-free {}",
        flat.join(" and ")
    ))
}

fn criterion_10() -> Outcome {
    let cfg = config(r#"{"system":"chain-3","method":"erc","reps":2,"seed":11}"#);
    let a = cmd_measure(&cfg).map_err(err)?;
    let b = cmd_measure(&cfg).map_err(err)?;
    let (ca, cb) = (render_csv(&a).map_err(err)?, render_csv(&b).map_err(err)?);
    ensure(ca == cb, || "measure CSV differs between runs".into())?;
    let (sa, sb) = (
        render_sidecar("measure", &cfg, Some(11), &a).map_err(err)?,
        render_sidecar("measure", &cfg, Some(11), &b).map_err(err)?,
    );
    ensure(sa == sb, || "measure sidecar differs between runs".into())?;
    let one = config(r#"{"system":"chain-3","method":"erc","target":"l01=1,l=1/2,m=1/2","seed":11}"#);
    let (ta, tb) = (cmd_tomo(&one).map_err(err)?, cmd_tomo(&one).map_err(err)?);
    ensure(render_csv(&ta).map_err(err)? == render_csv(&tb).map_err(err)?, || "tomo CSV differs".into())?;
    let other = config(r#"{"system":"chain-3","method":"erc","reps":2,"seed":12}"#);
    ensure(render_csv(&cmd_measure(&other).map_err(err)?).map_err(err)? != ca, || "seed has no effect".into())?;
    Ok(format!(
        "measure CSV ({} bytes), sidecar and tomo CSV identical across runs; seed change alters output",
        ca.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle eigenstates", criterion_1),
        ("ERC correctness", criterion_2),
        ("gate-count model", criterion_3),
        ("VQE Ry", criterion_4),
        ("VQE time evolution", criterion_5),
        ("gradient check", criterion_6),
        ("mitigation round trips", criterion_7),
        ("tomography", criterion_8),
        ("noisy pipeline realism", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
