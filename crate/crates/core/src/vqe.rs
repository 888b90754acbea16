//! Variational preparation: Ansatz circuits, the penalized spin cost,
//! parameter-shift gradients and a restarted conjugate-gradient optimizer.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate};
use crate::erc::{ChainLabels, erc_chain};
use crate::error::{Error, Result};
use crate::halfint::{HalfInt, check_projection, check_spin};
use crate::pauli::{ObservableSum, PauliExpectation, subset_s2, total_s2, total_sz};
use crate::sim::{StateVector, run_statevector};
use crate::tree::CouplingTree;

/// Target quantum numbers: total `(l, m)` plus the spin of each listed subset.
#[derive(Clone, Debug, PartialEq)]
pub struct CostSpec {
    pub l: HalfInt,
    pub m: HalfInt,
    pub subsets: Vec<(Vec<usize>, HalfInt)>,
}

impl CostSpec {
    pub fn new(l: HalfInt, m: HalfInt, subsets: Vec<(Vec<usize>, HalfInt)>) -> Result<Self> {
        check_spin(l)?;
        check_projection(l, m)?;
        let mut seen: Vec<Vec<usize>> = Vec::new();
        for (s, ls) in &subsets {
            check_spin(*ls)?;
            if s.is_empty() {
                return Err(Error::EmptySubset);
            }
            let mut key = s.clone();
            key.sort_unstable();
            if seen.contains(&key) {
                return Err(Error::InvalidLabel(alloc::format!("subset {s:?} listed twice")));
            }
            seen.push(key);
        }
        Ok(CostSpec { l, m, subsets })
    }

    /// Root spin and projection, plus every non-root internal node of `tree`.
    pub fn for_tree(tree: &CouplingTree, m: HalfInt) -> Result<Self> {
        tree.validate()?;
        let mut nodes = tree.internal_nodes();
        nodes.pop();
        CostSpec::new(tree.spin(), m, nodes)
    }
}

/// The cost's observables and their target values, built once per register.
#[derive(Clone, Debug)]
pub struct CostFunction {
    observables: Vec<ObservableSum>,
    targets: Vec<f64>,
}

impl CostFunction {
    pub fn new(spec: &CostSpec, n: usize) -> Result<Self> {
        let mut observables = vec![total_sz(n)?, total_s2(n)?];
        let mut targets = vec![spec.m.value(), spec.l.casimir()];
        for (subset, l) in &spec.subsets {
            observables.push(subset_s2(n, subset)?);
            targets.push(l.casimir());
        }
        Ok(CostFunction { observables, targets })
    }

    pub fn n_qubits(&self) -> usize {
        self.observables[0].n_qubits()
    }

    /// `<S_z>`, `<S^2>`, then each subset's `<S_Omega^2>`.
    pub fn expectations<S: PauliExpectation + ?Sized>(&self, state: &S) -> Result<Vec<f64>> {
        self.observables.iter().map(|o| o.expectation(state)).collect()
    }

    pub fn from_expectations(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.targets).map(|(v, t)| (v - t) * (v - t)).sum()
    }

    pub fn evaluate<S: PauliExpectation + ?Sized>(&self, state: &S) -> Result<f64> {
        Ok(self.from_expectations(&self.expectations(state)?))
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

/// `(<S_z> - m)^2 + (<S^2> - l(l+1))^2 + sum_k (<S_k^2> - l_k(l_k+1))^2`.
pub fn cost<S: PauliExpectation + ?Sized>(spec: &CostSpec, state: &S) -> Result<f64> {
    CostFunction::new(spec, state.n_qubits())?.evaluate(state)
}

/// A parametrized circuit family. Every parameter must enter exactly one
/// rotation with unit-magnitude angle coefficient, so the two-point shift
/// rule is exact.
pub trait Ansatz {
    fn n_qubits(&self) -> usize;
    fn n_params(&self) -> usize;
    fn build(&self, params: &[f64]) -> Result<Circuit>;

    fn check_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::ParameterCount { expected: self.n_params(), found: params.len() });
        }
        Ok(())
    }
}

/// Layers of `Ry` rotations separated by CNOT entanglers over `edges`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RyAnsatz {
    n: usize,
    reps: usize,
    edges: Vec<(usize, usize)>,
}

impl RyAnsatz {
    pub fn new(n: usize, reps: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_edges(n, &edges)?;
        Ok(RyAnsatz { n, reps, edges })
    }

    /// Entangler over `(0,1), (1,2), ..., (n-2, n-1)`.
    pub fn linear(n: usize, reps: usize) -> Result<Self> {
        RyAnsatz::new(n, reps, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn reps(&self) -> usize {
        self.reps
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

impl Ansatz for RyAnsatz {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn n_params(&self) -> usize {
        self.n * (self.reps + 1)
    }

    fn build(&self, params: &[f64]) -> Result<Circuit> {
        self.check_len(params)?;
        let mut c = Circuit::new(self.n);
        for (layer, angles) in params.chunks(self.n).enumerate() {
            if layer > 0 {
                for &(a, b) in &self.edges {
                    c.push(Gate::cnot(a, b))?;
                }
            }
            for (q, &theta) in angles.iter().enumerate() {
                c.push(Gate::ry(q, theta))?;
            }
        }
        Ok(c)
    }
}

/// Trotterized Heisenberg evolution from a prepared initial state.
///
/// Every edge carries its own three-angle block
/// `exp(-i (tx XX + ty YY + tz ZZ) / 2)`. The first repetition applies only
/// the coupling edges; later ones apply the intra edges, then the coupling
/// edges.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeEvoAnsatz {
    n: usize,
    reps: usize,
    intra: Vec<(usize, usize)>,
    coupling: Vec<(usize, usize)>,
    initial: Circuit,
}

impl TimeEvoAnsatz {
    pub fn new(
        n: usize,
        reps: usize,
        intra: Vec<(usize, usize)>,
        coupling: Vec<(usize, usize)>,
        initial: Circuit,
    ) -> Result<Self> {
        if reps == 0 {
            return Err(Error::InvalidLabel("time-evolution Ansatz needs at least one repetition".into()));
        }
        check_edges(n, &intra)?;
        check_edges(n, &coupling)?;
        if initial.n_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, found: initial.n_qubits() });
        }
        Ok(TimeEvoAnsatz { n, reps, intra, coupling, initial })
    }

    /// All-to-all couplings: intra edges among `0..n-1`, coupling edges
    /// `(i, n-1)`.
    pub fn all_to_all(n: usize, reps: usize, initial: Circuit) -> Result<Self> {
        let last = n.checked_sub(1).ok_or(Error::RegisterTooLarge { n, max: 0 })?;
        let intra = (0..last).flat_map(|i| (i + 1..last).map(move |j| (i, j))).collect();
        let coupling = (0..last).map(|i| (i, last)).collect();
        TimeEvoAnsatz::new(n, reps, intra, coupling, initial)
    }

    /// Edges in application order.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = self.coupling.clone();
        for _ in 1..self.reps {
            out.extend_from_slice(&self.intra);
            out.extend_from_slice(&self.coupling);
        }
        out
    }

    pub fn initial(&self) -> &Circuit {
        &self.initial
    }
}

impl Ansatz for TimeEvoAnsatz {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn n_params(&self) -> usize {
        3 * (self.coupling.len() + (self.reps - 1) * (self.intra.len() + self.coupling.len()))
    }

    fn build(&self, params: &[f64]) -> Result<Circuit> {
        self.check_len(params)?;
        let mut c = self.initial.clone();
        for (&(a, b), t) in self.blocks().iter().zip(params.chunks(3)) {
            for g in heisenberg_block(a, b, t[0], t[1], t[2]) {
                c.push(g)?;
            }
        }
        Ok(c)
    }
}

/// `exp(-i (tx XX + ty YY + tz ZZ) / 2)` on `(a, b)` with three CNOTs, up to
/// global phase. Each angle appears in exactly one rotation.
pub fn heisenberg_block(a: usize, b: usize, tx: f64, ty: f64, tz: f64) -> [Gate; 8] {
    [
        Gate::rz(b, FRAC_PI_2),
        Gate::cnot(b, a),
        Gate::rz(a, tz + FRAC_PI_2),
        Gate::ry(b, FRAC_PI_2 + tx),
        Gate::cnot(a, b),
        Gate::ry(b, -ty - FRAC_PI_2),
        Gate::cnot(b, a),
        Gate::rz(a, -FRAC_PI_2),
    ]
}

fn check_edges(n: usize, edges: &[(usize, usize)]) -> Result<()> {
    for &(a, b) in edges {
        for q in [a, b] {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
        }
        if a == b {
            return Err(Error::ControlCollision(a));
        }
    }
    Ok(())
}

/// Initial state for the time-evolution Ansatz: the `(n-1)`-qubit chain
/// eigenstate `(l^(n-1), m - 1/2)` with the last qubit in `|0>`, or, when that
/// projection is out of range, `(l^(n-1), m + 1/2)` with the last qubit in `|1>`.
pub fn initial_state_for(target: &ChainLabels) -> Result<Circuit> {
    let n = target.n_qubits();
    if n < 2 {
        return Err(Error::InvalidLabel("initial state needs at least two qubits".into()));
    }
    let spins = target.spins();
    let prefix = &spins[..spins.len() - 1];
    let l1 = prefix.last().copied().unwrap_or(HalfInt::HALF);
    let half = HalfInt::HALF;
    let (m1, flip) =
        if (target.m() - half).abs() <= l1 { (target.m() - half, false) } else { (target.m() + half, true) };
    let base = erc_chain(&ChainLabels::new(prefix.to_vec(), m1)?)?;
    let mut c = base.widened(n)?;
    if flip {
        c.push(Gate::x(n - 1))?;
    }
    Ok(c)
}

fn expectations_at<A: Ansatz + ?Sized>(f: &CostFunction, ansatz: &A, params: &[f64]) -> Result<Vec<f64>> {
    f.expectations(&run_statevector(&ansatz.build(params)?)?)
}

pub fn cost_at<A: Ansatz + ?Sized>(f: &CostFunction, ansatz: &A, params: &[f64]) -> Result<f64> {
    Ok(f.from_expectations(&expectations_at(f, ansatz, params)?))
}

/// Exact gradient: each expectation is differentiated with the `+-pi/2`
/// shift rule, then combined through the quadratic cost.
pub fn gradient<A: Ansatz + ?Sized>(f: &CostFunction, ansatz: &A, params: &[f64]) -> Result<Vec<f64>> {
    ansatz.check_len(params)?;
    let center = expectations_at(f, ansatz, params)?;
    let mut shifted = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for j in 0..params.len() {
        shifted[j] = params[j] + FRAC_PI_2;
        let plus = expectations_at(f, ansatz, &shifted)?;
        shifted[j] = params[j] - FRAC_PI_2;
        let minus = expectations_at(f, ansatz, &shifted)?;
        shifted[j] = params[j];
        let g = center
            .iter()
            .zip(f.targets())
            .zip(plus.iter().zip(&minus))
            .map(|((c, t), (p, m))| 2.0 * (c - t) * (p - m) / 2.0)
            .sum();
        grad.push(g);
    }
    Ok(grad)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the gradient's largest component is at most this.
    pub gtol: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { restarts: 10, max_iters: 500, gtol: 1e-9, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub restart: usize,
    pub params: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Cost at the start and after every accepted step.
    pub trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub best: RunResult,
    pub state: StateVector,
    /// Final cost of every restart, in restart order.
    pub restart_costs: Vec<f64>,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_LINE_STEPS: usize = 60;

/// Starting point of restart `index`: uniform in `[0, 2pi)^d`.
pub fn restart_start(seed: u64, index: usize, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..dim).map(|_| rng.random::<f64>() * TAU).collect()
}

/// Polak-Ribiere (PR+) conjugate gradient with an Armijo line search that
/// first expands, then backtracks.
pub fn minimize_from<A: Ansatz + ?Sized>(
    f: &CostFunction,
    ansatz: &A,
    start: Vec<f64>,
    max_iters: usize,
    gtol: f64,
) -> Result<RunResult> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let inf_norm = |a: &[f64]| a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let step_to =
        |x: &[f64], d: &[f64], alpha: f64| -> Vec<f64> { x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect() };

    let mut x = start;
    let mut fx = cost_at(f, ansatz, &x)?;
    let mut g = gradient(f, ansatz, &x)?;
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut trace = vec![fx];
    let mut alpha_guess = 1.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        if inf_norm(&g) <= gtol {
            converged = true;
            break;
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let accepts = |alpha: f64, value: f64| value <= fx + ARMIJO_C1 * alpha * slope;
        let mut alpha = alpha_guess;
        let mut trial = cost_at(f, ansatz, &step_to(&x, &d, alpha))?;
        let mut found = accepts(alpha, trial);
        if found {
            for _ in 0..MAX_LINE_STEPS {
                let bigger = cost_at(f, ansatz, &step_to(&x, &d, 2.0 * alpha))?;
                if !(accepts(2.0 * alpha, bigger) && bigger < trial) {
                    break;
                }
                alpha *= 2.0;
                trial = bigger;
            }
        } else {
            for _ in 0..MAX_LINE_STEPS {
                alpha *= 0.5;
                trial = cost_at(f, ansatz, &step_to(&x, &d, alpha))?;
                if accepts(alpha, trial) {
                    found = true;
                    break;
                }
            }
        }
        if !found || !(trial < fx) {
            // No decrease along the current direction; at round-off level.
            break;
        }
        x = step_to(&x, &d, alpha);
        fx = trial;
        let g_new = gradient(f, ansatz, &x)?;
        let gg = dot(&g, &g);
        let beta = if gg > 0.0 { (dot(&g_new, &g_new) - dot(&g_new, &g)).max(0.0) / gg } else { 0.0 };
        d = g_new.iter().zip(&d).map(|(gn, di)| -gn + beta * di).collect();
        g = g_new;
        alpha_guess = alpha;
        trace.push(fx);
        iterations += 1;
    }
    if !converged && inf_norm(&g) <= gtol {
        converged = true;
    }
    Ok(RunResult { restart: 0, params: x, cost: fx, iterations, converged, trace })
}

/// One restart of [`optimize`].
pub fn optimize_restart<A: Ansatz + ?Sized>(
    f: &CostFunction,
    ansatz: &A,
    options: &OptimizeOptions,
    index: usize,
) -> Result<RunResult> {
    let start = restart_start(options.seed, index, ansatz.n_params());
    let mut run = minimize_from(f, ansatz, start, options.max_iters, options.gtol)?;
    run.restart = index;
    Ok(run)
}

/// Lowest final cost wins; ties go to the earlier restart.
pub fn select_best<A: Ansatz + ?Sized>(ansatz: &A, runs: Vec<RunResult>) -> Result<OptimizeResult> {
    let restart_costs = runs.iter().map(|r| r.cost).collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.cost < a.cost || (b.cost == a.cost && b.restart < a.restart) { b } else { a })
        .ok_or_else(|| Error::InvalidLabel("at least one restart is required".into()))?;
    let state = run_statevector(&ansatz.build(&best.params)?)?;
    Ok(OptimizeResult { best, state, restart_costs })
}

pub fn optimize<A: Ansatz + ?Sized>(spec: &CostSpec, ansatz: &A, options: &OptimizeOptions) -> Result<OptimizeResult> {
    let f = CostFunction::new(spec, ansatz.n_qubits())?;
    let runs = (0..options.restarts).map(|i| optimize_restart(&f, ansatz, options, i)).collect::<Result<Vec<_>>>()?;
    select_best(ansatz, runs)
}
