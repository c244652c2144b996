//! Builders for the five benchmark families.
//!
//! Bitstrings follow the usual little-endian convention: qubit 0 is the
//! rightmost character.

use std::f64::consts::PI;

use serde_json::json;

use super::{Circuit, CircuitError, Family, Gate};
use crate::topology::Qubit;

/// Quantum Fourier transform: `|x⟩ ↦ N^{-1/2} Σ_y e^{2πi xy/N} |y⟩`.
pub fn build_qft(n: usize) -> Circuit {
    assert!(n >= 1, "QFT needs at least one qubit");
    let mut c = Circuit::new(Family::Qft, n);
    c.params = json!({ "n": n });
    c.extend(qft_gates(&(0..n).collect::<Vec<_>>()));
    c
}

/// QFT gates acting on `qubits`, where `qubits[k]` carries bit `k`.
fn qft_gates(qubits: &[Qubit]) -> Vec<Gate> {
    let n = qubits.len();
    let mut gates = Vec::new();
    for j in (0..n).rev() {
        gates.push(Gate::h(qubits[j]));
        for k in (0..j).rev() {
            gates.push(Gate::cp(PI / f64::powi(2.0, (j - k) as i32), qubits[k], qubits[j]));
        }
    }
    for j in 0..n / 2 {
        gates.push(Gate::swap(qubits[j], qubits[n - 1 - j]));
    }
    gates
}

/// Multi-controlled phase `diag(1, …, 1, e^{iλ})` over `controls ∪ {target}`,
/// decomposed recursively into CP and CX without ancillas.
fn mcp(lambda: f64, controls: &[Qubit], target: Qubit, out: &mut Vec<Gate>) {
    match controls {
        [] => out.push(Gate::p(lambda, target)),
        [c] => out.push(Gate::cp(lambda, *c, target)),
        [rest @ .., last] => {
            out.push(Gate::cp(lambda / 2.0, *last, target));
            mcx(rest, *last, out);
            out.push(Gate::cp(-lambda / 2.0, *last, target));
            mcx(rest, *last, out);
            mcp(lambda / 2.0, rest, target, out);
        }
    }
}

fn mcx(controls: &[Qubit], target: Qubit, out: &mut Vec<Gate>) {
    match controls {
        [c] => out.push(Gate::cx(*c, target)),
        _ => {
            out.push(Gate::h(target));
            mcp(PI, controls, target, out);
            out.push(Gate::h(target));
        }
    }
}

/// Parses a bitstring (qubit 0 rightmost) into per-qubit bits.
fn parse_bits(s: &str, n: usize) -> Result<Vec<bool>, CircuitError> {
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(CircuitError::InvalidBitstring { value: s.to_string(), expected_len: n });
    }
    Ok(s.chars().rev().map(|c| c == '1').collect())
}

pub fn grover_iterations(n: usize) -> usize {
    (PI / 4.0 * f64::powi(2.0, n as i32).sqrt()).floor() as usize
}

/// Grover search for a single marked bitstring.
pub fn build_grover(n: usize, marked: &str) -> Result<Circuit, CircuitError> {
    if n < 2 {
        return Err(CircuitError::InvalidParameter(format!("Grover needs n >= 2, got {n}")));
    }
    let bits = parse_bits(marked, n)?;
    let all: Vec<Qubit> = (0..n).collect();
    let (controls, target) = all.split_at(n - 1);
    let target = target[0];
    let iterations = grover_iterations(n);

    let mut gates: Vec<Gate> = all.iter().map(|&q| Gate::h(q)).collect();
    for _ in 0..iterations {
        let flips: Vec<Gate> = all.iter().filter(|&&q| !bits[q]).map(|&q| Gate::x(q)).collect();
        gates.extend(flips.iter().copied());
        mcp(PI, controls, target, &mut gates);
        gates.extend(flips);

        gates.extend(all.iter().map(|&q| Gate::h(q)));
        gates.extend(all.iter().map(|&q| Gate::x(q)));
        mcp(PI, controls, target, &mut gates);
        gates.extend(all.iter().map(|&q| Gate::x(q)));
        gates.extend(all.iter().map(|&q| Gate::h(q)));
    }

    let mut c = Circuit::new(Family::Grover, n);
    c.params = json!({ "n": n, "marked": marked, "iterations": iterations });
    c.extend(gates);
    Ok(c)
}

/// Max-cut QAOA with `p = gammas.len()` layers: `RZZ(γ_l)` on every edge,
/// then an `RX(2β_l)` mixer on every qubit.
pub fn build_qaoa_maxcut(
    num_qubits: usize,
    edges: &[(Qubit, Qubit)],
    gammas: &[f64],
    betas: &[f64],
) -> Result<Circuit, CircuitError> {
    if gammas.len() != betas.len() || gammas.is_empty() {
        return Err(CircuitError::ParameterMismatch {
            what: "QAOA gammas/betas",
            expected: gammas.len().max(1),
            got: betas.len(),
        });
    }
    let mut c = Circuit::new(Family::Qaoa, num_qubits);
    c.params = json!({ "edges": edges, "gammas": gammas, "betas": betas });
    for q in 0..num_qubits {
        c.try_push(Gate::h(q))?;
    }
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        for &(a, b) in edges {
            let g = Gate::new(super::GateKind::RZZ(gamma), &[a, b])?;
            c.try_push(g)?;
        }
        for q in 0..num_qubits {
            c.try_push(Gate::rx(2.0 * beta, q))?;
        }
    }
    Ok(c)
}

/// Phase estimation of `P(2πφ)` with `t` counting qubits (0..t) and the
/// eigenstate `|1⟩` on qubit `t`.
pub fn build_qpe(t: usize, phase: f64) -> Result<Circuit, CircuitError> {
    if t < 1 {
        return Err(CircuitError::InvalidParameter("QPE needs at least one counting qubit".into()));
    }
    if !(0.0..1.0).contains(&phase) {
        return Err(CircuitError::InvalidParameter(format!("phase {phase} outside [0, 1)")));
    }
    let mut c = Circuit::new(Family::Qpe, t + 1);
    c.params = json!({ "t": t, "phase": phase });
    c.push(Gate::x(t));
    for k in 0..t {
        c.push(Gate::h(k));
    }
    for k in 0..t {
        let angle = 2.0 * PI * phase * f64::powi(2.0, k as i32);
        c.push(Gate::cp(angle, k, t));
    }
    let counting: Vec<Qubit> = (0..t).collect();
    for g in qft_gates(&counting).iter().rev() {
        c.extend(g.inverse());
    }
    Ok(c)
}

/// ZZ feature map with full entanglement.
pub fn build_zzfeaturemap(n: usize, data: &[f64], reps: usize) -> Result<Circuit, CircuitError> {
    if n < 2 || reps < 1 {
        return Err(CircuitError::InvalidParameter(format!(
            "ZZ feature map needs n >= 2 and reps >= 1 (got n={n}, reps={reps})"
        )));
    }
    if data.len() != n {
        return Err(CircuitError::ParameterMismatch { what: "feature vector", expected: n, got: data.len() });
    }
    let mut c = Circuit::new(Family::ZzFeatureMap, n);
    c.params = json!({ "n": n, "x": data, "reps": reps });
    for _ in 0..reps {
        for q in 0..n {
            c.push(Gate::h(q));
        }
        for (q, &x) in data.iter().enumerate() {
            c.push(Gate::p(2.0 * x, q));
        }
        for i in 0..n {
            for j in i + 1..n {
                c.push(Gate::cx(i, j));
                c.push(Gate::p(2.0 * (PI - data[i]) * (PI - data[j]), j));
                c.push(Gate::cx(i, j));
            }
        }
    }
    Ok(c)
}

/// Default instance of `family` on `n` qubits, as used by campaigns.
///
/// QAOA runs one layer on a ring (a triangle for n = 3); QPE uses `n - 1`
/// counting qubits and φ = 0.3; ZZFM uses two repetitions of a fixed
/// feature vector; Grover marks the all-ones string. QFT acts on
/// `H(0)|0…0⟩`, so its ideal output `P(y) ∝ 1 + cos(2πy/2ⁿ)` is peaked and
/// phase-sensitive, unlike the uniform output of QFT|0…0⟩.
pub fn benchmark_circuit(family: Family, n: usize) -> Result<Circuit, CircuitError> {
    if n < 2 {
        return Err(CircuitError::InvalidParameter(format!("benchmarks need n >= 2, got {n}")));
    }
    match family {
        Family::Qaoa => {
            let edges: Vec<(Qubit, Qubit)> =
                if n == 2 { vec![(0, 1)] } else { (0..n).map(|i| (i, (i + 1) % n)).collect() };
            build_qaoa_maxcut(n, &edges, &[0.8], &[0.4])
        }
        Family::Grover => build_grover(n, &"1".repeat(n)),
        Family::Qft => {
            let mut c = Circuit::new(Family::Qft, n);
            c.params = json!({ "n": n, "input": "H(0)" });
            c.push(Gate::h(0));
            c.extend(build_qft(n).gates().iter().copied());
            Ok(c)
        }
        Family::Qpe => build_qpe(n - 1, 0.3),
        Family::ZzFeatureMap => {
            let data: Vec<f64> = (0..n).map(|i| 0.3 + 0.45 * i as f64).collect();
            build_zzfeaturemap(n, &data, 2)
        }
        Family::Custom => Err(CircuitError::UnknownFamily("CUSTOM has no default instance".into())),
    }
}

/// The five benchmark circuits in canonical family order.
pub fn benchmark_suite(n: usize) -> Result<Vec<Circuit>, CircuitError> {
    Family::BENCHMARKS.iter().map(|&f| benchmark_circuit(f, n)).collect()
}
