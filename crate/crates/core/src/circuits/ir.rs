use std::fmt;

use serde::{Deserialize, Serialize};

use super::CircuitError;
use crate::topology::Qubit;

/// Gate kinds of the circuit IR. Angles are in radians.
///
/// `RZZ(θ)` is `exp(-i θ/2 Z⊗Z)`; `P(θ)` is `diag(1, e^{iθ})`; `CP(θ)` is
/// the controlled phase `diag(1, 1, 1, e^{iθ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    SX,
    RX(f64),
    RY(f64),
    RZ(f64),
    P(f64),
    CX,
    CZ,
    CP(f64),
    RZZ(f64),
    SWAP,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::CP(_) | GateKind::RZZ(_) | GateKind::SWAP => 2,
            _ => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::SX => "SX",
            GateKind::RX(_) => "RX",
            GateKind::RY(_) => "RY",
            GateKind::RZ(_) => "RZ",
            GateKind::P(_) => "P",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::CP(_) => "CP",
            GateKind::RZZ(_) => "RZZ",
            GateKind::SWAP => "SWAP",
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match *self {
            GateKind::RX(t)
            | GateKind::RY(t)
            | GateKind::RZ(t)
            | GateKind::P(t)
            | GateKind::CP(t)
            | GateKind::RZZ(t) => Some(t),
            _ => None,
        }
    }

    fn from_parts(name: &str, theta: Option<f64>) -> Result<Self, CircuitError> {
        let angle = || theta.ok_or_else(|| CircuitError::MissingAngle(name.to_string()));
        Ok(match name {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "SX" => GateKind::SX,
            "RX" => GateKind::RX(angle()?),
            "RY" => GateKind::RY(angle()?),
            "RZ" => GateKind::RZ(angle()?),
            "P" => GateKind::P(angle()?),
            "CX" => GateKind::CX,
            "CZ" => GateKind::CZ,
            "CP" => GateKind::CP(angle()?),
            "RZZ" => GateKind::RZZ(angle()?),
            "SWAP" => GateKind::SWAP,
            other => return Err(CircuitError::UnknownGate(other.to_string())),
        })
    }

    /// The kind implementing the adjoint operation.
    pub fn inverse(&self) -> Option<GateKind> {
        Some(match *self {
            GateKind::SX => return None,
            GateKind::RX(t) => GateKind::RX(-t),
            GateKind::RY(t) => GateKind::RY(-t),
            GateKind::RZ(t) => GateKind::RZ(-t),
            GateKind::P(t) => GateKind::P(-t),
            GateKind::CP(t) => GateKind::CP(-t),
            GateKind::RZZ(t) => GateKind::RZZ(-t),
            other => other,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateRecord", into = "GateRecord")]
pub struct Gate {
    kind: GateKind,
    qubits: [Qubit; 2],
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    kind: String,
    qubits: Vec<Qubit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

impl TryFrom<GateRecord> for Gate {
    type Error = CircuitError;

    fn try_from(rec: GateRecord) -> Result<Self, Self::Error> {
        Gate::new(GateKind::from_parts(&rec.kind, rec.theta)?, &rec.qubits)
    }
}

impl From<Gate> for GateRecord {
    fn from(g: Gate) -> Self {
        GateRecord { kind: g.kind.name().to_string(), qubits: g.qubits().to_vec(), theta: g.kind.theta() }
    }
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[Qubit]) -> Result<Self, CircuitError> {
        if qubits.len() != kind.arity() {
            return Err(CircuitError::Arity { gate: kind.name(), expected: kind.arity(), got: qubits.len() });
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(CircuitError::RepeatedQubit(qubits[0]));
        }
        if let Some(t) = kind.theta() {
            if !t.is_finite() {
                return Err(CircuitError::NonFiniteAngle(kind.name()));
            }
        }
        let second = if qubits.len() == 2 { qubits[1] } else { qubits[0] };
        Ok(Self { kind, qubits: [qubits[0], second] })
    }

    fn one(kind: GateKind, q: Qubit) -> Self {
        Self { kind, qubits: [q, q] }
    }

    fn two(kind: GateKind, a: Qubit, b: Qubit) -> Self {
        assert_ne!(a, b, "two-qubit gate on a repeated qubit");
        Self { kind, qubits: [a, b] }
    }

    pub fn h(q: Qubit) -> Self {
        Self::one(GateKind::H, q)
    }
    pub fn x(q: Qubit) -> Self {
        Self::one(GateKind::X, q)
    }
    pub fn sx(q: Qubit) -> Self {
        Self::one(GateKind::SX, q)
    }
    pub fn rx(theta: f64, q: Qubit) -> Self {
        Self::one(GateKind::RX(theta), q)
    }
    pub fn ry(theta: f64, q: Qubit) -> Self {
        Self::one(GateKind::RY(theta), q)
    }
    pub fn rz(theta: f64, q: Qubit) -> Self {
        Self::one(GateKind::RZ(theta), q)
    }
    pub fn p(theta: f64, q: Qubit) -> Self {
        Self::one(GateKind::P(theta), q)
    }
    pub fn cx(control: Qubit, target: Qubit) -> Self {
        Self::two(GateKind::CX, control, target)
    }
    pub fn cz(a: Qubit, b: Qubit) -> Self {
        Self::two(GateKind::CZ, a, b)
    }
    pub fn cp(theta: f64, control: Qubit, target: Qubit) -> Self {
        Self::two(GateKind::CP(theta), control, target)
    }
    pub fn rzz(theta: f64, a: Qubit, b: Qubit) -> Self {
        Self::two(GateKind::RZZ(theta), a, b)
    }
    pub fn swap(a: Qubit, b: Qubit) -> Self {
        Self::two(GateKind::SWAP, a, b)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    /// Same gate with every qubit index passed through `f`.
    pub fn remap(&self, mut f: impl FnMut(Qubit) -> Qubit) -> Self {
        Self { kind: self.kind, qubits: [f(self.qubits[0]), f(self.qubits[1])] }
    }

    /// Gates whose product is the adjoint of this one.
    pub fn inverse(&self) -> Vec<Gate> {
        match self.kind.inverse() {
            Some(kind) => vec![Self { kind, ..*self }],
            // SX† = RZ(π)·SX·RZ(π) up to global phase.
            None => {
                let q = self.qubits[0];
                vec![Gate::rz(std::f64::consts::PI, q), Gate::sx(q), Gate::rz(std::f64::consts::PI, q)]
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if let Some(t) = self.kind.theta() {
            write!(f, "({t:.6})")?;
        }
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, " {}", qs.join(","))
    }
}

/// Benchmark family a circuit was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "QAOA")]
    Qaoa,
    #[serde(rename = "GA")]
    Grover,
    #[serde(rename = "QFT")]
    Qft,
    #[serde(rename = "QPE")]
    Qpe,
    #[serde(rename = "ZZFM")]
    ZzFeatureMap,
    #[serde(rename = "CUSTOM")]
    Custom,
}

impl Family {
    /// The five benchmark families in their canonical order.
    pub const BENCHMARKS: [Family; 5] = [Family::Qaoa, Family::Grover, Family::Qft, Family::Qpe, Family::ZzFeatureMap];

    pub fn label(&self) -> &'static str {
        match self {
            Family::Qaoa => "QAOA",
            Family::Grover => "GA",
            Family::Qft => "QFT",
            Family::Qpe => "QPE",
            Family::ZzFeatureMap => "ZZFM",
            Family::Custom => "CUSTOM",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Family {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "QAOA" => Family::Qaoa,
            "GA" | "GROVER" => Family::Grover,
            "QFT" => Family::Qft,
            "QPE" => Family::Qpe,
            "ZZFM" => Family::ZzFeatureMap,
            "CUSTOM" => Family::Custom,
            _ => return Err(CircuitError::UnknownFamily(s.to_string())),
        })
    }
}

/// Ordered gate list over `num_qubits` logical qubits. Every qubit is
/// measured once at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord")]
pub struct Circuit {
    pub family: Family,
    pub num_qubits: usize,
    gates: Vec<Gate>,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Deserialize)]
struct CircuitRecord {
    family: Family,
    num_qubits: usize,
    gates: Vec<Gate>,
    #[serde(default)]
    params: serde_json::Value,
}

impl TryFrom<CircuitRecord> for Circuit {
    type Error = CircuitError;

    fn try_from(rec: CircuitRecord) -> Result<Self, Self::Error> {
        let mut c = Circuit::new(rec.family, rec.num_qubits);
        c.params = rec.params;
        for g in rec.gates {
            c.try_push(g)?;
        }
        Ok(c)
    }
}

impl Circuit {
    pub fn new(family: Family, num_qubits: usize) -> Self {
        Self { family, num_qubits, gates: Vec::new(), params: serde_json::Value::Null }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn try_push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= self.num_qubits) {
            return Err(CircuitError::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends a gate built internally; panics on an out-of-range index.
    pub fn push(&mut self, gate: Gate) {
        self.try_push(gate).expect("gate qubit out of range");
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        for g in gates {
            self.push(g);
        }
    }

    /// Circuit implementing the adjoint unitary (up to global phase).
    pub fn inverse(&self) -> Circuit {
        let mut out = Circuit::new(self.family, self.num_qubits);
        out.params = self.params.clone();
        for g in self.gates.iter().rev() {
            out.extend(g.inverse());
        }
        out
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Moment index of each gate under greedy packing: a gate lands in the
    /// earliest moment after the last gate on any of its qubits.
    pub fn moments(&self) -> Vec<usize> {
        let mut frontier = vec![0usize; self.num_qubits];
        self.gates
            .iter()
            .map(|g| {
                let m = g.qubits().iter().map(|&q| frontier[q]).max().unwrap_or(0);
                for &q in g.qubits() {
                    frontier[q] = m + 1;
                }
                m
            })
            .collect()
    }
}
