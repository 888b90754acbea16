//! Readout-error mitigation and Richardson extrapolation over CNOT-folded
//! circuits.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

#[allow(unused_imports)]
use num_traits::Float;

use crate::circuit::{Circuit, Gate, decompose_native, fold_cnots};
use crate::error::{Error, Result};
use crate::linalg::{derive_seed, project_to_simplex};
use crate::pauli::{ObservableSum, estimate_from_distributions, grouping};
use crate::sim::{Confusion, NoiseModel, ShotResult, Shots, StateVector, observed_distribution, run_density, sample};

/// Condition number above which a confusion matrix is rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Column-stochastic map from prepared to measured basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfusionMatrix {
    n: usize,
    matrix: DMatrix<f64>,
}

impl ConfusionMatrix {
    pub fn new(n: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows().max(matrix.ncols()) });
        }
        if matrix.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::InvalidNoise("confusion entries must be nonnegative".into()));
        }
        for col in matrix.column_iter() {
            if (col.sum() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidNoise("confusion columns must sum to 1".into()));
            }
        }
        Ok(Self { n, matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { n, matrix: DMatrix::identity(1 << n, 1 << n) }
    }

    /// Kronecker product of per-qubit matrices, qubit 0 leftmost.
    pub fn from_factors(factors: &[Confusion]) -> Result<Self> {
        let mut m = DMatrix::from_element(1, 1, 1.0);
        for f in factors {
            let f = DMatrix::from_fn(2, 2, |r, c| f[r][c]);
            m = m.kronecker(&f);
        }
        Self::new(factors.len(), m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn condition_number(&self) -> f64 {
        let sv = self.matrix.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min > 0.0 { max / min } else { f64::INFINITY }
    }
}

/// Measures the confusion matrix by preparing every basis state with `X`
/// gates. `Shots::Exact` gives the model's Kronecker product directly.
pub fn calibrate(noise: &NoiseModel, n: usize, shots: Shots, seed: u64) -> Result<ConfusionMatrix> {
    noise.validate()?;
    let shots = match shots {
        Shots::Exact => return ConfusionMatrix::from_factors(&noise.readout_matrices(n)?),
        Shots::Finite(k) => k,
    };
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    let measure = Circuit::new(n);
    for b in 0..dim {
        let mut prep = Circuit::new(n);
        for q in 0..n {
            if crate::basis::qubit_bit(n, b, q) == 1 {
                prep.push(Gate::x(q))?;
            }
        }
        let psi = crate::sim::run_statevector(&prep)?;
        let freq = sample(&psi, &measure, shots, noise, derive_seed(seed, &[b as u64]))?.frequencies(n)?;
        m.set_column(b, &DVector::from_vec(freq));
    }
    ConfusionMatrix::new(n, m)
}

/// How `mitigate_distribution` solves `M p = observed`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MitigationMethod {
    /// Least squares restricted to the probability simplex.
    #[default]
    ConstrainedLeastSquares,
    /// Plain `M^{-1} observed`, which may have negative entries.
    Inversion,
}

pub fn mitigate_distribution(m: &ConfusionMatrix, observed: &[f64], method: MitigationMethod) -> Result<Vec<f64>> {
    let dim = m.matrix.nrows();
    if observed.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: observed.len() });
    }
    let cond = m.condition_number();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularConfusion(cond));
    }
    let y = DVector::from_column_slice(observed);
    let direct = m.matrix.clone().lu().solve(&y).ok_or(Error::SingularConfusion(cond))?;
    let mut p: Vec<f64> = direct.iter().copied().collect();
    match method {
        MitigationMethod::Inversion => {}
        MitigationMethod::ConstrainedLeastSquares => {
            if p.iter().all(|&v| v >= -1e-12) {
                p.iter_mut().for_each(|v| *v = v.max(0.0));
            } else {
                p = simplex_least_squares(&m.matrix, &y, &p);
            }
        }
    }
    let total: f64 = p.iter().sum();
    if !(total.abs() > 0.0) {
        return Err(Error::Numerical("mitigated distribution has zero mass".into()));
    }
    p.iter_mut().for_each(|v| *v /= total);
    Ok(p)
}

pub fn mitigate_counts(m: &ConfusionMatrix, observed: &ShotResult, method: MitigationMethod) -> Result<Vec<f64>> {
    mitigate_distribution(m, &observed.frequencies(m.n)?, method)
}

/// Accelerated projected gradient for `min |M p - y|^2` over the simplex.
fn simplex_least_squares(m: &DMatrix<f64>, y: &DVector<f64>, start: &[f64]) -> Vec<f64> {
    let gram = m.transpose() * m;
    let rhs = m.transpose() * y;
    let lipschitz = m.singular_values().max().powi(2);
    let step = 1.0 / lipschitz;
    let mut x = DVector::from_vec(project_to_simplex(start));
    let mut z = x.clone();
    let mut t = 1.0f64;
    for _ in 0..100_000 {
        let grad = &gram * &z - &rhs;
        let next = DVector::from_vec(project_to_simplex((&z - grad * step).as_slice()));
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        z = &next + (&next - &x) * ((t - 1.0) / t_next);
        let moved = (&next - &x).norm();
        x = next;
        t = t_next;
        if moved < 1e-15 {
            break;
        }
    }
    x.iter().copied().collect()
}

/// Linear fit `A(r) = intercept + slope * r` over noise parameters `r = 2k+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtrapolationResult {
    pub intercept: f64,
    pub slope: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: Vec<(u32, f64)>,
}

pub fn richardson(points: &[(u32, f64)]) -> Result<ExtrapolationResult> {
    if let Some(&(r, _)) = points.iter().find(|(r, _)| r % 2 == 0) {
        return Err(Error::InvalidNoiseParameter(r));
    }
    let mut distinct: Vec<u32> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let count = points.len() as f64;
    let mean_r = points.iter().map(|p| p.0 as f64).sum::<f64>() / count;
    let mean_a = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mean_r).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mean_r) * (p.1 - mean_a)).sum();
    let slope = sxy / sxx;
    let intercept = mean_a - slope * mean_r;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0 as f64).powi(2)).sum();
    Ok(ExtrapolationResult { intercept, slope, residual: (sse / count).sqrt(), points: points.to_vec() })
}

/// Noise parameter `r = 2k+1` of fold level `k`.
pub fn noise_parameter(k: usize) -> Result<u32> {
    u32::try_from(k)
        .ok()
        .and_then(|k| k.checked_mul(2))
        .and_then(|r| r.checked_add(1))
        .ok_or(Error::Overflow("noise parameter"))
}

/// Default fold levels, giving `r = 1, 3, 5`.
pub const DEFAULT_KS: [usize; 3] = [0, 1, 2];

#[derive(Clone, Debug, PartialEq)]
pub struct MitigationOptions {
    pub ks: Vec<usize>,
    pub shots: Shots,
    pub seed: u64,
    pub method: MitigationMethod,
}

impl Default for MitigationOptions {
    fn default() -> Self {
        Self { ks: DEFAULT_KS.to_vec(), shots: Shots::Finite(8192), seed: 0, method: MitigationMethod::default() }
    }
}

/// Raw, readout-mitigated and extrapolated estimates of one observable.
#[derive(Clone, Debug, PartialEq)]
pub struct MitigatedEstimate {
    pub raw: f64,
    pub em: f64,
    pub em_re: f64,
    pub slope: f64,
    /// `(r, em)` at every fold level.
    pub points: Vec<(u32, f64)>,
    /// `(r, raw)` at every fold level.
    pub raw_points: Vec<(u32, f64)>,
}

/// Raw and mitigated estimates of `obs` after `fold_cnots(circuit, k)`.
pub fn estimate_at_fold(
    obs: &ObservableSum,
    circuit: &Circuit,
    noise: &NoiseModel,
    confusion: &ConfusionMatrix,
    k: usize,
    options: &MitigationOptions,
) -> Result<(f64, f64)> {
    let n = circuit.n_qubits();
    if obs.n_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: obs.n_qubits() });
    }
    let rho = run_density(&fold_cnots(circuit, k), noise)?;
    let settings = grouping(obs);
    let mut raw = Vec::with_capacity(settings.len());
    let mut em = Vec::with_capacity(settings.len());
    for (s, setting) in settings.iter().enumerate() {
        let seed = derive_seed(options.seed, &[k as u64, s as u64]);
        let dist = observed_distribution(&rho, &setting.basis_change(), options.shots, noise, seed)?;
        em.push(mitigate_distribution(confusion, &dist, options.method)?);
        raw.push(dist);
    }
    Ok((estimate_from_distributions(obs, &settings, &raw)?, estimate_from_distributions(obs, &settings, &em)?))
}

/// Evaluates `obs` at each fold level, mitigates readout per measurement
/// setting and extrapolates the mitigated values to `r = 0`.
pub fn mitigated_expectation(
    obs: &ObservableSum,
    circuit: &Circuit,
    noise: &NoiseModel,
    options: &MitigationOptions,
) -> Result<MitigatedEstimate> {
    noise.validate()?;
    let native = decompose_native(circuit)?;
    let n = native.n_qubits();
    let confusion = calibrate(noise, n, options.shots, derive_seed(options.seed, &[u64::MAX]))?;
    let mut points = Vec::with_capacity(options.ks.len());
    let mut raw_points = Vec::with_capacity(options.ks.len());
    let mut base = None;
    for &k in &options.ks {
        let r = noise_parameter(k)?;
        let (raw, em) = estimate_at_fold(obs, &native, noise, &confusion, k, options)?;
        if k == 0 {
            base = Some((raw, em));
        }
        points.push((r, em));
        raw_points.push((r, raw));
    }
    let fit = richardson(&points)?;
    let (raw, em) = match base {
        Some(b) => b,
        None => estimate_at_fold(obs, &native, noise, &confusion, 0, options)?,
    };
    Ok(MitigatedEstimate { raw, em, em_re: fit.intercept, slope: fit.slope, points, raw_points })
}

/// Exact expectation of `obs` in the noiseless output of `circuit`.
pub fn exact_expectation(obs: &ObservableSum, circuit: &Circuit) -> Result<f64> {
    let psi: StateVector = crate::sim::run_statevector(circuit)?;
    obs.expectation(&psi)
}
