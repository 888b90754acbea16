//! Full state tomography from local Pauli settings: linear inversion,
//! projection onto density matrices, fidelity and purity.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::circuit::{Circuit, fold_cnots};
use crate::error::{Error, Result};
use crate::linalg::{derive_seed, project_to_simplex};
use crate::mitigation::{
    ConfusionMatrix, ExtrapolationResult, MitigationMethod, calibrate, mitigate_distribution, noise_parameter,
    richardson,
};
use crate::pauli::{Pauli, PauliString, basis_change, parity_expectation};
use crate::sim::{
    DensityMatrix, MAX_DENSITY_QUBITS, Measurable, NoiseModel, Shots, StateVector, fidelity, observed_distribution,
    run_density,
};

const LETTERS: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

/// Measurement bases, one letter in `{X, Y, Z}` per qubit for each setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TomoSettings {
    n: usize,
    settings: Vec<Vec<Pauli>>,
    shots: Shots,
    seed: u64,
}

impl TomoSettings {
    pub fn new(n: usize, settings: Vec<Vec<Pauli>>, shots: Shots, seed: u64) -> Result<Self> {
        check_size(n)?;
        let mut seen = BTreeMap::new();
        for s in &settings {
            if s.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: s.len() });
            }
            if s.contains(&Pauli::I) {
                return Err(Error::InvalidLabel(label(s)));
            }
            if seen.insert(label(s), ()).is_some() {
                return Err(Error::InvalidLabel(alloc::format!("duplicate setting {}", label(s))));
            }
        }
        Ok(TomoSettings { n, settings, shots, seed })
    }

    /// All `3^n` settings, ordered `X < Y < Z` with qubit 0 most significant.
    pub fn full(n: usize, shots: Shots, seed: u64) -> Result<Self> {
        check_size(n)?;
        let count = 3usize.pow(n as u32);
        let settings = (0..count)
            .map(|mut i| {
                let mut s = alloc::vec![Pauli::Z; n];
                for q in (0..n).rev() {
                    s[q] = LETTERS[i % 3];
                    i /= 3;
                }
                s
            })
            .collect();
        Self::new(n, settings, shots, seed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn settings(&self) -> &[Vec<Pauli>] {
        &self.settings
    }

    pub fn shots(&self) -> Shots {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.settings.is_empty()
    }

    /// Seed for one setting, independent of its position in the list.
    pub fn setting_seed(&self, setting: &[Pauli]) -> u64 {
        let code = setting.iter().fold(0u64, |acc, &p| acc.wrapping_mul(4).wrapping_add(p as u64));
        derive_seed(self.seed, &[self.n as u64, code])
    }
}

/// Outcome distributions keyed by setting label such as `"XZY"`.
#[derive(Clone, Debug, PartialEq)]
pub struct TomoData {
    pub n: usize,
    pub shots: Shots,
    pub distributions: BTreeMap<String, Vec<f64>>,
}

/// Measures `state` in every setting, optionally mitigating readout with `em`.
pub fn measure_state<S: Measurable + ?Sized>(
    state: &S,
    noise: &NoiseModel,
    settings: &TomoSettings,
    em: Option<&ConfusionMatrix>,
) -> Result<TomoData> {
    let n = settings.n;
    if state.n_qubits() != n {
        return Err(Error::DimensionMismatch { expected: n, found: state.n_qubits() });
    }
    let mut distributions = BTreeMap::new();
    for s in &settings.settings {
        let mut dist = observed_distribution(state, &basis_change(s), settings.shots, noise, settings.setting_seed(s))?;
        if let Some(m) = em {
            dist = mitigate_distribution(m, &dist, MitigationMethod::default())?;
        }
        distributions.insert(label(s), dist);
    }
    Ok(TomoData { n, shots: settings.shots, distributions })
}

/// Runs `circuit` under `noise` and measures every setting.
pub fn measure_settings(circuit: &Circuit, noise: &NoiseModel, settings: &TomoSettings, em: bool) -> Result<TomoData> {
    let rho = run_density(circuit, noise)?;
    let confusion = if em {
        Some(calibrate(noise, settings.n, settings.shots, derive_seed(settings.seed, &[u64::MAX]))?)
    } else {
        None
    };
    measure_state(&rho, noise, settings, confusion.as_ref())
}

/// Linear-inversion estimate and its nearest density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub raw: DMatrix<Complex64>,
    pub projected: DensityMatrix,
}

/// `rho = sum_P <P> P / 2^n` over all `4^n` strings, each `<P>` averaged over
/// the settings that agree with `P` on its support.
pub fn reconstruct_raw(data: &TomoData) -> Result<DMatrix<Complex64>> {
    let n = data.n;
    check_size(n)?;
    let full = TomoSettings::full(n, data.shots, 0)?;
    let mut entries = Vec::with_capacity(full.len());
    for s in full.settings() {
        let key = label(s);
        let dist = data.distributions.get(&key).ok_or_else(|| Error::MissingSetting(key.clone()))?;
        if dist.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: dist.len() });
        }
        entries.push((s, dist));
    }
    let dim = 1usize << n;
    let mut rho = DMatrix::zeros(dim, dim);
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for code in 0..(1usize << (2 * n)) {
        let letters: Vec<Pauli> = (0..n).map(|q| all[(code >> (2 * (n - 1 - q))) & 3]).collect();
        let p = PauliString::from_letters(&letters)?;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (s, dist) in &entries {
            if letters.iter().zip(s.iter()).all(|(&l, &b)| l == Pauli::I || l == b) {
                sum += parity_expectation(&p, dist);
                count += 1;
            }
        }
        let value = sum / count as f64 / dim as f64;
        let (flip, phase) = p.action();
        for i in 0..dim {
            rho[(i ^ flip, i)] += phase(i) * value;
        }
    }
    Ok(rho)
}

pub fn reconstruct(data: &TomoData) -> Result<Reconstruction> {
    let raw = reconstruct_raw(data)?;
    let projected = DensityMatrix::from_matrix(&project_psd(&raw))?;
    Ok(Reconstruction { raw, projected })
}

/// Frobenius-nearest positive semidefinite matrix of unit trace to the
/// Hermitian part of `m`.
pub fn project_psd(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let clipped = project_to_simplex(&values);
    let d = DVector::from_iterator(clipped.len(), clipped.into_iter().map(|v| Complex64::new(v, 0.0)));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateQuality {
    pub fidelity: f64,
    pub purity: f64,
}

/// Fidelity `<psi|rho|psi>` and purity `Tr(rho^2)`.
pub fn report(rho: &DensityMatrix, ideal: &StateVector) -> Result<StateQuality> {
    Ok(StateQuality { fidelity: fidelity(rho, ideal)?, purity: rho.purity() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomoReport {
    pub fidelity_raw: f64,
    pub fidelity_projected: f64,
    pub purity: f64,
    pub settings: usize,
    /// `None` for exact probabilities.
    pub shots_per_setting: Option<u64>,
}

pub fn summarize(rec: &Reconstruction, ideal: &StateVector, data: &TomoData) -> Result<TomoReport> {
    let q = report(&rec.projected, ideal)?;
    let psi = DVector::from_column_slice(ideal.amplitudes());
    if psi.len() != rec.raw.nrows() {
        return Err(Error::DimensionMismatch { expected: rec.raw.nrows(), found: psi.len() });
    }
    let fidelity_raw = (psi.adjoint() * &rec.raw * &psi)[(0, 0)].re;
    Ok(TomoReport {
        fidelity_raw,
        fidelity_projected: q.fidelity,
        purity: q.purity,
        settings: data.distributions.len(),
        shots_per_setting: match data.shots {
            Shots::Exact => None,
            Shots::Finite(k) => Some(k),
        },
    })
}

/// Tomographic fidelity at every fold level in `ks`, extrapolated to `r = 0`.
pub fn extrapolated_fidelity(
    circuit: &Circuit,
    noise: &NoiseModel,
    ideal: &StateVector,
    settings: &TomoSettings,
    ks: &[usize],
    em: bool,
) -> Result<ExtrapolationResult> {
    let native = crate::circuit::decompose_native(circuit)?;
    let mut points = Vec::with_capacity(ks.len());
    for &k in ks {
        let data = measure_settings(&fold_cnots(&native, k), noise, settings, em)?;
        let rec = reconstruct(&data)?;
        points.push((noise_parameter(k)?, report(&rec.projected, ideal)?.fidelity));
    }
    richardson(&points)
}

fn label(s: &[Pauli]) -> String {
    s.iter().map(|p| p.letter()).collect()
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSITY_QUBITS {
        return Err(Error::RegisterTooLarge { n, max: MAX_DENSITY_QUBITS });
    }
    Ok(())
}
