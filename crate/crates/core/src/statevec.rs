//! Deterministic statevector execution of [`QuantumCircuit`]s.
//!
//! Amplitudes are stored index-ordered (basis state `|b>` at position `b`),
//! little-endian per the register layout in [`crate::circuit`]. Every gate
//! kernel is an exact in-place update touching disjoint amplitude pairs or
//! single entries; the whole simulator is sequential and bit-reproducible.
//!
//! Norm policing: debug builds assert unit norm after every gate, all
//! builds verify it after every circuit.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::circuit::{prediction_circuit, GateOp, QuantumCircuit};
use crate::error::{Error, Result};
use crate::float::{real, tol, Real};
use crate::grid::{AmplitudeState, PhaseSpaceGrid};

/// Hard cap for [`circuit_to_matrix`]; 2^10 columns of 2^10 amplitudes is
/// the largest dense operator worth materializing for oracle checks.
pub const MATRIX_QUBIT_CAP: usize = 10;

/// Mutable simulator state: `2^n_qubits` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState<F> {
    pub n_qubits: usize,
    pub amps: Vec<Complex<F>>,
}

impl<F: Real> SimState<F> {
    /// Starts from `|0...0>`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amps = vec![Complex::new(F::zero(), F::zero()); 1 << n_qubits];
        amps[0] = Complex::new(F::one(), F::zero());
        SimState { n_qubits, amps }
    }

    /// l2 norm of the amplitude vector.
    pub fn norm(&self) -> F {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<F>().sqrt()
    }

    /// Copies the amplitudes back out as an [`AmplitudeState`].
    pub fn extract(&self) -> AmplitudeState<F> {
        AmplitudeState {
            amplitudes: Array1::from_iter(self.amps.iter().copied()),
        }
    }

    /// Applies one gate in place.
    pub fn apply_gate(&mut self, gate: &GateOp<F>) -> Result<()> {
        match gate {
            GateOp::Hadamard { target } => {
                let bit = self.bit(*target)?;
                let s = real::<F>(std::f64::consts::FRAC_1_SQRT_2);
                for idx in 0..self.amps.len() {
                    if idx & bit == 0 {
                        let partner = idx | bit;
                        let a = self.amps[idx];
                        let b = self.amps[partner];
                        self.amps[idx] = (a + b) * s;
                        self.amps[partner] = (a - b) * s;
                    }
                }
            }
            GateOp::Phase { target, theta } => {
                let bit = self.bit(*target)?;
                let e = Complex::from_polar(F::one(), *theta);
                for (idx, amp) in self.amps.iter_mut().enumerate() {
                    if idx & bit != 0 {
                        *amp = *amp * e;
                    }
                }
            }
            GateOp::ControlledPhase {
                control,
                target,
                theta,
            } => {
                let mask = self.bit(*control)? | self.bit(*target)?;
                let e = Complex::from_polar(F::one(), *theta);
                for (idx, amp) in self.amps.iter_mut().enumerate() {
                    if idx & mask == mask {
                        *amp = *amp * e;
                    }
                }
            }
            GateOp::Swap { a, b } => {
                let bit_a = self.bit(*a)?;
                let bit_b = self.bit(*b)?;
                for idx in 0..self.amps.len() {
                    if idx & bit_a != 0 && idx & bit_b == 0 {
                        self.amps.swap(idx, idx ^ bit_a ^ bit_b);
                    }
                }
            }
            GateOp::DiagonalPhase { qubits, thetas } => {
                let table = self.phase_table(qubits, thetas)?;
                let extract = subset_extractor(qubits);
                for (idx, amp) in self.amps.iter_mut().enumerate() {
                    *amp = *amp * table[extract(idx)];
                }
            }
            GateOp::ControlledDiagonalPhase {
                control,
                qubits,
                thetas,
            } => {
                let ctrl = self.bit(*control)?;
                let table = self.phase_table(qubits, thetas)?;
                let extract = subset_extractor(qubits);
                for (idx, amp) in self.amps.iter_mut().enumerate() {
                    if idx & ctrl != 0 {
                        *amp = *amp * table[extract(idx)];
                    }
                }
            }
        }
        debug_assert!(
            (self.norm() - F::one()).abs() <= tol::<F>(1e-12),
            "norm drifted after a single gate"
        );
        Ok(())
    }

    fn bit(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            Err(Error::InvalidArgument(format!(
                "gate references qubit {qubit}, state has {}",
                self.n_qubits
            )))
        } else {
            Ok(1usize << qubit)
        }
    }

    fn phase_table(&self, qubits: &[usize], thetas: &[F]) -> Result<Vec<Complex<F>>> {
        for &q in qubits {
            self.bit(q)?;
        }
        if thetas.len() != 1usize << qubits.len() {
            return Err(Error::InvalidArgument(format!(
                "diagonal table has {} entries, needs {}",
                thetas.len(),
                1usize << qubits.len()
            )));
        }
        Ok(thetas
            .iter()
            .map(|&t| Complex::from_polar(F::one(), t))
            .collect())
    }

    /// Runs the whole circuit, then verifies the norm survived.
    pub fn run(&mut self, circuit: &QuantumCircuit<F>) -> Result<()> {
        if circuit.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "circuit spans {} qubits, state has {}",
                circuit.n_qubits, self.n_qubits
            )));
        }
        for gate in &circuit.gates {
            self.apply_gate(gate)?;
        }
        let norm = self.norm();
        if (norm - F::one()).abs() > tol::<F>(1e-12) {
            return Err(Error::Consistency(format!(
                "norm {norm} deviates from 1 beyond 1e-12 after circuit"
            )));
        }
        Ok(())
    }

    /// Serializes the amplitudes as little-endian 64-bit float pairs
    /// (re, im), index-ordered.
    pub fn write_amplitudes<W: std::io::Write>(&self, writer: &mut W) -> std::io::Result<()> {
        for amp in &self.amps {
            let re = amp.re.to_f64().unwrap_or(f64::NAN);
            let im = amp.im.to_f64().unwrap_or(f64::NAN);
            writer.write_all(&re.to_le_bytes())?;
            writer.write_all(&im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Builds a closure mapping a global basis index to the little-endian index
/// formed by the listed qubits. Contiguous ascending runs (the only layout
/// the builders emit) reduce to a shift and mask.
fn subset_extractor(qubits: &[usize]) -> Box<dyn Fn(usize) -> usize + '_> {
    let contiguous = qubits
        .windows(2)
        .all(|w| w[1] == w[0] + 1);
    if contiguous {
        let start = qubits[0];
        let mask = (1usize << qubits.len()) - 1;
        Box::new(move |idx| (idx >> start) & mask)
    } else {
        Box::new(move |idx| {
            let mut sub = 0usize;
            for (pos, &q) in qubits.iter().enumerate() {
                if idx & (1usize << q) != 0 {
                    sub |= 1usize << pos;
                }
            }
            sub
        })
    }
}

/// Loads an amplitude vector into a fresh simulator state. The vector length
/// must be a power of two and the norm must be 1 within `1e-12`.
pub fn load_state<F: Real>(state: &AmplitudeState<F>) -> Result<SimState<F>> {
    let len = state.amplitudes.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "amplitude vector length {len} is not a power of two >= 2"
        )));
    }
    let norm = state.norm();
    if (norm - F::one()).abs() > tol::<F>(1e-12) {
        return Err(Error::Normalization(format!(
            "amplitude norm {norm} deviates from 1 beyond 1e-12"
        )));
    }
    Ok(SimState {
        n_qubits: len.trailing_zeros() as usize,
        amps: state.amplitudes.to_vec(),
    })
}

/// Materializes the circuit's unitary by running it on every basis state.
/// Capped at [`MATRIX_QUBIT_CAP`] qubits.
pub fn circuit_to_matrix<F: Real>(circuit: &QuantumCircuit<F>) -> Result<Array2<Complex<F>>> {
    if circuit.n_qubits > MATRIX_QUBIT_CAP {
        return Err(Error::SizeCap(format!(
            "circuit_to_matrix supports at most {MATRIX_QUBIT_CAP} qubits, got {}",
            circuit.n_qubits
        )));
    }
    let dim = 1usize << circuit.n_qubits;
    let mut matrix = Array2::zeros((dim, dim));
    for col in 0..dim {
        let mut state = SimState::zero_state(circuit.n_qubits);
        state.amps[0] = Complex::new(F::zero(), F::zero());
        state.amps[col] = Complex::new(F::one(), F::zero());
        for gate in &circuit.gates {
            state.apply_gate(gate)?;
        }
        for row in 0..dim {
            matrix[[row, col]] = state.amps[row];
        }
    }
    Ok(matrix)
}

/// Convenience composition of the whole quantum prediction step: load the
/// state, run one prediction circuit, extract.
pub fn predict<F: Real>(
    state: &AmplitudeState<F>,
    grid: &PhaseSpaceGrid<F>,
    dt: F,
    q: F,
) -> Result<AmplitudeState<F>> {
    if state.amplitudes.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes, grid needs {}",
            state.amplitudes.len(),
            grid.len()
        )));
    }
    let circuit = prediction_circuit(grid, dt, q)?;
    let mut sim = load_state(state)?;
    sim.run(&circuit)?;
    Ok(sim.extract())
}
