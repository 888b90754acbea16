//! JSON encodings of trees, observables, circuits, noise models and reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use spinprep_core::circuit::{Circuit, Gate, GateKind, Polarity};
use spinprep_core::mitigation::MitigatedEstimate;
use spinprep_core::nalgebra::DMatrix;
use spinprep_core::num_complex::Complex64;
use spinprep_core::sim::{Confusion, NoiseModel, ShotResult};
use spinprep_core::tomography::TomoReport;
use spinprep_core::{CouplingTree, HalfInt, ObservableSum, PauliString};

use crate::error::{CliError, Result};

/// Half-integer written as a JSON integer when whole, else as `"p/2"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spin(pub HalfInt);

impl Serialize for Spin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() { s.serialize_i32(self.0.twice() / 2) } else { s.serialize_str(&self.0.to_string()) }
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => v
                .checked_mul(2)
                .map(|t| Spin(HalfInt::from_twice(t)))
                .ok_or_else(|| serde::de::Error::custom("spin out of range")),
            Raw::Text(s) => s.parse().map(Spin).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeJson {
    Leaf { leaf: usize },
    Node { l: Spin, left: Box<TreeJson>, right: Box<TreeJson> },
}

impl TreeJson {
    pub fn from_tree(tree: &CouplingTree) -> Self {
        match tree {
            CouplingTree::Leaf(q) => TreeJson::Leaf { leaf: *q },
            CouplingTree::Node { left, right, l } => TreeJson::Node {
                l: Spin(*l),
                left: Box::new(Self::from_tree(left)),
                right: Box::new(Self::from_tree(right)),
            },
        }
    }

    /// Rebuilds and validates the tree.
    pub fn to_tree(&self) -> Result<CouplingTree> {
        fn build(t: &TreeJson) -> CouplingTree {
            match t {
                TreeJson::Leaf { leaf } => CouplingTree::Leaf(*leaf),
                TreeJson::Node { l, left, right } => CouplingTree::node(build(left), build(right), l.0),
            }
        }
        let tree = build(self);
        tree.validate()?;
        Ok(tree)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: f64,
    pub pauli: String,
}

pub fn observable_to_json(obs: &ObservableSum) -> Vec<TermJson> {
    obs.terms().iter().map(|(c, p)| TermJson { coeff: *c, pauli: p.to_string() }).collect()
}

pub fn observable_from_json(terms: &[TermJson]) -> Result<ObservableSum> {
    let n = terms.first().map_or(0, |t| t.pauli.len());
    let parsed = terms.iter().map(|t| Ok((t.coeff, t.pauli.parse::<PauliString>()?))).collect::<Result<Vec<_>>>()?;
    Ok(ObservableSum::from_terms(n, parsed)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateJson {
    pub kind: String,
    /// Targets, preceded by the control for `"cx"`.
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<ControlJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    /// Row-major `[re, im]` entries of a custom unitary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlJson {
    pub qubit: usize,
    /// Control value that fires the gate.
    pub on: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitJson {
    pub n: usize,
    pub gates: Vec<GateJson>,
}

impl CircuitJson {
    pub fn from_circuit(c: &Circuit) -> Self {
        let gates = c.gates().iter().map(gate_to_json).collect();
        CircuitJson { n: c.n_qubits(), gates }
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        let gates = self.gates.iter().map(gate_from_json).collect::<Result<Vec<_>>>()?;
        Ok(Circuit::from_gates(self.n, gates)?)
    }
}

fn gate_to_json(g: &Gate) -> GateJson {
    if g.is_cnot() {
        return GateJson {
            kind: "cx".into(),
            qubits: vec![g.controls()[0].0, g.targets()[0]],
            controls: Vec::new(),
            angle: None,
            matrix: None,
        };
    }
    let matrix = match g.kind() {
        GateKind::Unitary(m) => {
            Some((0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect())
        }
        _ => None,
    };
    GateJson {
        kind: g.kind().name().into(),
        qubits: g.targets().to_vec(),
        controls: g
            .controls()
            .iter()
            .map(|&(qubit, p)| ControlJson { qubit, on: u8::from(p == Polarity::OnOne) })
            .collect(),
        angle: g.kind().angle(),
        matrix,
    }
}

fn gate_from_json(g: &GateJson) -> Result<Gate> {
    let angle = || g.angle.ok_or_else(|| CliError::config(format!("gate {:?} needs an angle", g.kind)));
    if g.kind == "cx" {
        if g.qubits.len() != 2 || !g.controls.is_empty() {
            return Err(CliError::config("cx takes exactly [control, target]"));
        }
        return Ok(Gate::new(GateKind::X, vec![g.qubits[1]], vec![(g.qubits[0], Polarity::OnOne)])?);
    }
    let kind = match g.kind.as_str() {
        "x" => GateKind::X,
        "y" => GateKind::Y,
        "z" => GateKind::Z,
        "h" => GateKind::H,
        "s" => GateKind::S,
        "sdg" => GateKind::Sdg,
        "t" => GateKind::T,
        "tdg" => GateKind::Tdg,
        "rx" => GateKind::Rx(angle()?),
        "ry" => GateKind::Ry(angle()?),
        "rz" => GateKind::Rz(angle()?),
        "swap" => GateKind::Swap,
        "unitary" => {
            let rows = g.matrix.as_ref().ok_or_else(|| CliError::config("unitary gate needs a matrix"))?;
            let dim = rows.len();
            if rows.iter().any(|r| r.len() != dim) {
                return Err(CliError::config("unitary matrix must be square"));
            }
            GateKind::Unitary(DMatrix::from_fn(dim, dim, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
        }
        other => return Err(CliError::config(format!("unknown gate kind {other:?}"))),
    };
    let controls = g
        .controls
        .iter()
        .map(|c| match c.on {
            0 => Ok((c.qubit, Polarity::OnZero)),
            1 => Ok((c.qubit, Polarity::OnOne)),
            v => Err(CliError::config(format!("control value must be 0 or 1, got {v}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Gate::new(kind, g.qubits.clone(), controls)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseJson {
    pub p1: f64,
    pub p2: f64,
    /// `m[measured][prepared]` per qubit; one entry applies to every qubit.
    #[serde(default)]
    pub readout: Vec<Confusion>,
}

impl From<&NoiseModel> for NoiseJson {
    fn from(n: &NoiseModel) -> Self {
        NoiseJson { p1: n.p1, p2: n.p2, readout: n.readout.clone() }
    }
}

impl NoiseJson {
    pub fn to_model(&self) -> Result<NoiseModel> {
        let model = NoiseModel { p1: self.p1, p2: self.p2, readout: self.readout.clone() };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotResultJson {
    pub seed: u64,
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl From<&ShotResult> for ShotResultJson {
    fn from(r: &ShotResult) -> Self {
        ShotResultJson { seed: r.seed, shots: r.shots, counts: r.counts.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationJson {
    pub params: Vec<f64>,
    pub cost: f64,
    pub fidelity: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MitigationJson {
    pub raw: f64,
    pub em: f64,
    pub em_re: f64,
    pub slope: f64,
    pub points: Vec<(u32, f64)>,
}

impl From<&MitigatedEstimate> for MitigationJson {
    fn from(e: &MitigatedEstimate) -> Self {
        MitigationJson { raw: e.raw, em: e.em, em_re: e.em_re, slope: e.slope, points: e.points.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyJson {
    pub fidelity_raw: f64,
    pub fidelity_projected: f64,
    pub purity: f64,
    pub settings: usize,
    /// `null` for exact probabilities.
    pub shots_per_setting: Option<u64>,
}

impl From<&TomoReport> for TomographyJson {
    fn from(r: &TomoReport) -> Self {
        TomographyJson {
            fidelity_raw: r.fidelity_raw,
            fidelity_projected: r.fidelity_projected,
            purity: r.purity,
            settings: r.settings,
            shots_per_setting: r.shots_per_setting,
        }
    }
}
