use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::circuits::{Gate, GateKind};

type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense `2^n` amplitude vector; qubit `k` is bit `k` of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn gate_matrix(kind: GateKind) -> Matrix2 {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match kind {
        GateKind::H => {
            [[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]]
        }
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::RX(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        GateKind::RY(t) => {
            let (s, co) = (t / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        GateKind::RZ(t) => [[Complex64::from_polar(1.0, -t / 2.0), ZERO], [ZERO, Complex64::from_polar(1.0, t / 2.0)]],
        GateKind::P(t) => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, t)]],
        other => unreachable!("{} is not a single-qubit gate", other.name()),
    }
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = ONE;
        Self { num_qubits, amps }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut s = Self::new(num_qubits);
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr()
    }

    fn apply_matrix(&mut self, m: &Matrix2, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ab) | bb);
            }
        }
    }

    /// Multiplies amplitudes where both `a` and `b` are 1 by `phase`.
    fn apply_controlled_phase(&mut self, a: usize, b: usize, phase: Complex64) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp *= phase;
            }
        }
    }

    /// `exp(-i θ Z_a Z_b)`.
    pub fn apply_zz(&mut self, a: usize, b: usize, theta: f64) {
        let even = Complex64::from_polar(1.0, -theta);
        let odd = even.conj();
        let (ab, bb) = (1usize << a, 1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            let parity = ((i & ab) != 0) ^ ((i & bb) != 0);
            *amp *= if parity { odd } else { even };
        }
    }

    /// Applies a Pauli (0 = I, 1 = X, 2 = Y, 3 = Z) to qubit `q`.
    pub fn apply_pauli(&mut self, q: usize, pauli: u8) {
        let i = Complex64::new(0.0, 1.0);
        match pauli {
            0 => {}
            1 => self.apply_matrix(&gate_matrix(GateKind::X), q),
            2 => self.apply_matrix(&[[ZERO, -i], [i, ZERO]], q),
            3 => self.apply_matrix(&[[ONE, ZERO], [ZERO, -ONE]], q),
            _ => unreachable!("pauli index {pauli}"),
        }
    }

    /// Applies `gate` (indices are positions in this state).
    pub fn apply(&mut self, gate: &Gate) {
        let q = gate.qubits();
        match gate.kind() {
            GateKind::CX => self.apply_cx(q[0], q[1]),
            GateKind::CZ => self.apply_controlled_phase(q[0], q[1], -ONE),
            GateKind::CP(t) => self.apply_controlled_phase(q[0], q[1], Complex64::from_polar(1.0, t)),
            GateKind::RZZ(t) => self.apply_zz(q[0], q[1], t / 2.0),
            GateKind::SWAP => self.apply_swap(q[0], q[1]),
            kind => self.apply_matrix(&gate_matrix(kind), q[0]),
        }
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) {
        for g in gates {
            self.apply(g);
        }
    }

    /// Reorders qubits so that old qubit `k` becomes qubit `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> StateVector {
        let mut out = vec![ZERO; self.amps.len()];
        for (i, &amp) in self.amps.iter().enumerate() {
            let mut j = 0;
            for (k, &p) in perm.iter().enumerate() {
                if i >> k & 1 == 1 {
                    j |= 1 << p;
                }
            }
            out[j] = amp;
        }
        StateVector { num_qubits: self.num_qubits, amps: out }
    }
}
