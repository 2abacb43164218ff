//! Gate-level circuit representation and the circuit builders for the
//! prediction step.
//!
//! Register layout: qubits `[0, n_x)` form the position register and qubits
//! `[n_x, n_x + n_v)` the velocity register, both little-endian (qubit `t`
//! of a register carries weight `2^t` in that register's index). The
//! computational basis index of the combined register therefore equals the
//! vectorized grid index `j*N_x + i`.
//!
//! The drift builder realizes `exp(dt*L_drift)` exactly: an inverse Fourier
//! transform of the position register turns transport into a diagonal phase
//! whose angle is linear in the velocity value, and that linearity in the
//! bits of `j` is what lets one uncontrolled diagonal block (the `v_min`
//! offset) plus one singly-controlled block per velocity qubit assemble the
//! full phase `beta_k * v_j`.
//!
//! The diffusion builder applies `exp(i*q*dt*D_vv)` on the velocity
//! register: a unitary stand-in for real diffusion obtained by rotating the
//! diffusion coefficient onto the imaginary axis. It dephases Fourier modes
//! instead of damping them; the error this introduces is quantified in
//! [`crate::analysis`].

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::float::{real, Real};
use crate::grid::PhaseSpaceGrid;
use crate::spectral::dvv_eigenvalues;

/// One gate. Phase angles are in radians, reduced to `(-pi, pi]` when the
/// gate is pushed onto a circuit. Diagonal blocks carry an explicit table of
/// `2^{|qubits|}` angles indexed by the little-endian bits of the listed
/// qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp<F> {
    Hadamard {
        target: usize,
    },
    Phase {
        target: usize,
        theta: F,
    },
    ControlledPhase {
        control: usize,
        target: usize,
        theta: F,
    },
    Swap {
        a: usize,
        b: usize,
    },
    DiagonalPhase {
        qubits: Vec<usize>,
        thetas: Vec<F>,
    },
    ControlledDiagonalPhase {
        control: usize,
        qubits: Vec<usize>,
        thetas: Vec<F>,
    },
}

/// Reduces an angle to the half-open interval `(-pi, pi]`.
pub fn reduce_angle<F: Real>(theta: F) -> F {
    let two_pi = real::<F>(2.0) * F::PI();
    let mut r = theta - (theta / two_pi).floor() * two_pi;
    if r > F::PI() {
        r -= two_pi;
    }
    // Round-off at the wrap point can leave r an ulp below -pi.
    if r <= -F::PI() {
        r += two_pi;
    }
    r
}

impl<F: Real> GateOp<F> {
    /// All qubit indices the gate touches.
    fn touched(&self) -> Vec<usize> {
        match self {
            GateOp::Hadamard { target } | GateOp::Phase { target, .. } => vec![*target],
            GateOp::ControlledPhase {
                control, target, ..
            } => vec![*control, *target],
            GateOp::Swap { a, b } => vec![*a, *b],
            GateOp::DiagonalPhase { qubits, .. } => qubits.clone(),
            GateOp::ControlledDiagonalPhase {
                control, qubits, ..
            } => {
                let mut all = qubits.clone();
                all.push(*control);
                all
            }
        }
    }

    fn reduce_phases(&mut self) {
        match self {
            GateOp::Hadamard { .. } | GateOp::Swap { .. } => {}
            GateOp::Phase { theta, .. } | GateOp::ControlledPhase { theta, .. } => {
                *theta = reduce_angle(*theta);
            }
            GateOp::DiagonalPhase { thetas, .. }
            | GateOp::ControlledDiagonalPhase { thetas, .. } => {
                for t in thetas.iter_mut() {
                    *t = reduce_angle(*t);
                }
            }
        }
    }
}

/// Ordered gate list over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit<F> {
    pub n_qubits: usize,
    pub gates: Vec<GateOp<F>>,
}

impl<F: Real> QuantumCircuit<F> {
    pub fn new(n_qubits: usize) -> Self {
        QuantumCircuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    /// Validates the gate (indices in range and distinct, table length
    /// `2^{|qubits|}`), reduces its phases to `(-pi, pi]`, and appends it.
    pub fn push(&mut self, mut gate: GateOp<F>) -> Result<()> {
        let touched = gate.touched();
        for &q in &touched {
            if q >= self.n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "gate references qubit {q}, circuit has {}",
                    self.n_qubits
                )));
            }
        }
        let mut seen = touched.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != touched.len() {
            return Err(Error::InvalidArgument(
                "gate references the same qubit twice".into(),
            ));
        }
        match &gate {
            GateOp::DiagonalPhase { qubits, thetas }
            | GateOp::ControlledDiagonalPhase { qubits, thetas, .. } => {
                if qubits.is_empty() {
                    return Err(Error::InvalidArgument(
                        "diagonal block needs at least one qubit".into(),
                    ));
                }
                if thetas.len() != 1usize << qubits.len() {
                    return Err(Error::InvalidArgument(format!(
                        "diagonal block over {} qubits needs {} phases, got {}",
                        qubits.len(),
                        1usize << qubits.len(),
                        thetas.len()
                    )));
                }
            }
            _ => {}
        }
        gate.reduce_phases();
        self.gates.push(gate);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends all gates of `other` (registers must agree in width).
    pub fn extend(&mut self, other: &QuantumCircuit<F>) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate a {}-qubit circuit onto {} qubits",
                other.n_qubits, self.n_qubits
            )));
        }
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// Plain-text dump, one gate per line, phases at 17 significant digits.
    ///
    /// Line formats:
    /// ```text
    /// H <target>
    /// P <target> <theta>
    /// CP <control> <target> <theta>
    /// SWAP <a> <b>
    /// DIAG <q0,q1,...> <theta0,theta1,...>
    /// CDIAG <control> <q0,q1,...> <theta0,theta1,...>
    /// ```
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for gate in &self.gates {
            match gate {
                GateOp::Hadamard { target } => {
                    let _ = writeln!(out, "H {target}");
                }
                GateOp::Phase { target, theta } => {
                    let _ = writeln!(out, "P {target} {}", fmt_phase(*theta));
                }
                GateOp::ControlledPhase {
                    control,
                    target,
                    theta,
                } => {
                    let _ = writeln!(out, "CP {control} {target} {}", fmt_phase(*theta));
                }
                GateOp::Swap { a, b } => {
                    let _ = writeln!(out, "SWAP {a} {b}");
                }
                GateOp::DiagonalPhase { qubits, thetas } => {
                    let _ = writeln!(out, "DIAG {} {}", join_indices(qubits), join_phases(thetas));
                }
                GateOp::ControlledDiagonalPhase {
                    control,
                    qubits,
                    thetas,
                } => {
                    let _ = writeln!(
                        out,
                        "CDIAG {control} {} {}",
                        join_indices(qubits),
                        join_phases(thetas)
                    );
                }
            }
        }
        out
    }
}

fn fmt_phase<F: Real>(theta: F) -> String {
    format!("{:.16e}", theta)
}

fn join_indices(qubits: &[usize]) -> String {
    qubits
        .iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_phases<F: Real>(thetas: &[F]) -> String {
    thetas
        .iter()
        .map(|t| fmt_phase(*t))
        .collect::<Vec<_>>()
        .join(",")
}

/// Quantum Fourier transform on a contiguous register, matching the
/// positive-sign DFT matrix of [`crate::spectral::dft_matrix`] exactly
/// (bit-reversal swaps included). `inverse` builds the adjoint.
pub fn qft_circuit<F: Real>(
    n_qubits: usize,
    register: Range<usize>,
    inverse: bool,
) -> Result<QuantumCircuit<F>> {
    if register.is_empty() || register.end > n_qubits {
        return Err(Error::InvalidArgument(format!(
            "register {register:?} does not fit a {n_qubits}-qubit circuit"
        )));
    }
    let mut circuit = QuantumCircuit::new(n_qubits);
    for gate in qft_gates(register, inverse) {
        circuit.push(gate)?;
    }
    Ok(circuit)
}

/// Gate sequence of the QFT on `register`; used by the circuit builders to
/// splice transforms into larger circuits.
fn qft_gates<F: Real>(register: Range<usize>, inverse: bool) -> Vec<GateOp<F>> {
    let start = register.start;
    let n = register.end - register.start;
    let mut gates: Vec<GateOp<F>> = Vec::new();
    for t in (0..n).rev() {
        gates.push(GateOp::Hadamard { target: start + t });
        for s in (0..t).rev() {
            // Angle 2*pi / 2^{t-s+1}: the contribution of bit s to the
            // phase accumulating on bit t.
            let theta = real::<F>(2.0) * F::PI() / real::<F>((1u64 << (t - s + 1)) as f64);
            gates.push(GateOp::ControlledPhase {
                control: start + s,
                target: start + t,
                theta,
            });
        }
    }
    for t in 0..n / 2 {
        gates.push(GateOp::Swap {
            a: start + t,
            b: start + n - 1 - t,
        });
    }
    if inverse {
        gates.reverse();
        for g in &mut gates {
            match g {
                GateOp::Phase { theta, .. } | GateOp::ControlledPhase { theta, .. } => {
                    *theta = -*theta;
                }
                _ => {}
            }
        }
    }
    gates
}

/// Phase schedule of the drift circuit.
///
/// For position Fourier mode `k` the transported amplitude picks up the
/// angle `phi[k, j] = beta_k * v_j` with `beta_k = -(dt/delta_x) *
/// sin(2*pi*k/N_x)`. Because `v_j = v_min + delta_v * j` is affine in the
/// bits of `j`, the angle splits into an offset table `theta0[k] =
/// beta_k * v_min` plus one table per velocity bit,
/// `theta_r[r][k] = beta_k * delta_v * 2^r`.
///
/// The tables here are kept unreduced so the reconstruction identity is
/// exact; angle reduction happens when the tables become gates.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePlan<F> {
    pub beta: Vec<F>,
    pub theta0: Vec<F>,
    /// `theta_r[r][k]`, one table per velocity qubit `r`.
    pub theta_r: Vec<Vec<F>>,
}

impl<F: Real> PhasePlan<F> {
    /// Reassembles `phi[k, j]` from the offset and per-bit tables.
    pub fn reconstruct_phase(&self, k: usize, j: usize) -> F {
        let mut phi = self.theta0[k];
        for (r, table) in self.theta_r.iter().enumerate() {
            if (j >> r) & 1 == 1 {
                phi += table[k];
            }
        }
        phi
    }
}

/// Computes the drift phase schedule for one time step.
pub fn drift_phase_plan<F: Real>(grid: &PhaseSpaceGrid<F>, dt: F) -> Result<PhasePlan<F>> {
    if dt < F::zero() {
        return Err(Error::InvalidArgument("dt must be nonnegative".into()));
    }
    let n_x = grid.len_x();
    let step = real::<F>(2.0) * F::PI() / real::<F>(n_x as f64);
    let scale = -(dt / grid.delta_x);
    let beta: Vec<F> = (0..n_x)
        .map(|k| scale * (step * real::<F>(k as f64)).sin())
        .collect();
    let theta0: Vec<F> = beta.iter().map(|&b| b * grid.v_min).collect();
    let theta_r: Vec<Vec<F>> = (0..grid.n_v)
        .map(|r| {
            let weight = grid.delta_v * real::<F>((1u64 << r) as f64);
            beta.iter().map(|&b| b * weight).collect()
        })
        .collect();
    Ok(PhasePlan {
        beta,
        theta0,
        theta_r,
    })
}

/// Exact transport circuit: inverse QFT on the position register, the
/// diagonal offset block, one controlled diagonal block per velocity qubit,
/// and the forward QFT. Induces `exp(dt*L_drift)` on the amplitude vector.
pub fn drift_circuit<F: Real>(grid: &PhaseSpaceGrid<F>, dt: F) -> Result<QuantumCircuit<F>> {
    let plan = drift_phase_plan(grid, dt)?;
    let n_total = grid.n_qubits();
    let position: Vec<usize> = (0..grid.n_x).collect();
    let mut circuit = QuantumCircuit::new(n_total);
    for gate in qft_gates(0..grid.n_x, true) {
        circuit.push(gate)?;
    }
    circuit.push(GateOp::DiagonalPhase {
        qubits: position.clone(),
        thetas: plan.theta0.clone(),
    })?;
    for (r, table) in plan.theta_r.iter().enumerate() {
        circuit.push(GateOp::ControlledDiagonalPhase {
            control: grid.n_x + r,
            qubits: position.clone(),
            thetas: table.clone(),
        })?;
    }
    for gate in qft_gates(0..grid.n_x, false) {
        circuit.push(gate)?;
    }
    Ok(circuit)
}

/// Unitary diffusion surrogate: inverse QFT on the velocity register, the
/// diagonal phase `q*dt*mu_m` per velocity Fourier mode, forward QFT.
/// Induces `exp(i*q*dt*(D_vv (x) I))`.
pub fn diffusion_circuit<F: Real>(
    grid: &PhaseSpaceGrid<F>,
    q: F,
    dt: F,
) -> Result<QuantumCircuit<F>> {
    if dt < F::zero() {
        return Err(Error::InvalidArgument("dt must be nonnegative".into()));
    }
    let n_total = grid.n_qubits();
    let n_v = grid.len_v();
    let mu = dvv_eigenvalues::<F>(n_v, grid.delta_v)?.eigenvalues;
    let thetas: Vec<F> = (0..n_v).map(|m| q * dt * mu[m].re).collect();
    let velocity: Vec<usize> = (grid.n_x..n_total).collect();
    let mut circuit = QuantumCircuit::new(n_total);
    for gate in qft_gates(grid.n_x..n_total, true) {
        circuit.push(gate)?;
    }
    circuit.push(GateOp::DiagonalPhase {
        qubits: velocity,
        thetas,
    })?;
    for gate in qft_gates(grid.n_x..n_total, false) {
        circuit.push(gate)?;
    }
    Ok(circuit)
}

/// One full prediction step: the diffusion block runs first, then the drift
/// block, matching the operator product (drift) * (diffusion).
pub fn prediction_circuit<F: Real>(
    grid: &PhaseSpaceGrid<F>,
    dt: F,
    q: F,
) -> Result<QuantumCircuit<F>> {
    let mut circuit = diffusion_circuit(grid, q, dt)?;
    circuit.extend(&drift_circuit(grid, dt)?)?;
    Ok(circuit)
}

/// Gate tallies for one circuit, with two cost figures.
///
/// `model_cost` follows the per-qubit accounting under which a diagonal
/// block over `n` qubits is priced as `n` phase rotations (controlled ones
/// for a controlled block): the figure behind the
/// `O(n_x^2 + n_v^2 + n_x*n_v)` complexity headline. `diagonal_entries` is
/// the honest size of the same blocks: the number of explicit table entries,
/// `2^{|qubits|}` each, which is the count an exact synthesis of these
/// bit-nonlinear phase profiles has to face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCountReport {
    pub hadamard: usize,
    pub phase: usize,
    pub controlled_phase: usize,
    pub swap: usize,
    pub diagonal: usize,
    pub controlled_diagonal: usize,
    pub total_gates: usize,
    pub model_cost: usize,
    pub diagonal_entries: usize,
}

/// Tallies gate variants and both cost figures for a circuit.
pub fn gate_count_report<F: Real>(circuit: &QuantumCircuit<F>) -> GateCountReport {
    let mut report = GateCountReport::default();
    for gate in &circuit.gates {
        match gate {
            GateOp::Hadamard { .. } => {
                report.hadamard += 1;
                report.model_cost += 1;
            }
            GateOp::Phase { .. } => {
                report.phase += 1;
                report.model_cost += 1;
            }
            GateOp::ControlledPhase { .. } => {
                report.controlled_phase += 1;
                report.model_cost += 1;
            }
            GateOp::Swap { .. } => {
                report.swap += 1;
                report.model_cost += 1;
            }
            GateOp::DiagonalPhase { qubits, .. } => {
                report.diagonal += 1;
                report.model_cost += qubits.len();
                report.diagonal_entries += 1usize << qubits.len();
            }
            GateOp::ControlledDiagonalPhase { qubits, .. } => {
                report.controlled_diagonal += 1;
                report.model_cost += qubits.len();
                report.diagonal_entries += 1usize << qubits.len();
            }
        }
    }
    report.total_gates = circuit.gates.len();
    report
}

impl std::fmt::Display for GateCountReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "hadamard            {}", self.hadamard)?;
        writeln!(f, "phase               {}", self.phase)?;
        writeln!(f, "controlled_phase    {}", self.controlled_phase)?;
        writeln!(f, "swap                {}", self.swap)?;
        writeln!(f, "diagonal            {}", self.diagonal)?;
        writeln!(f, "controlled_diagonal {}", self.controlled_diagonal)?;
        writeln!(f, "total_gates         {}", self.total_gates)?;
        writeln!(f, "model_cost          {}", self.model_cost)?;
        write!(f, "diagonal_entries    {}", self.diagonal_entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_angle_stays_in_half_open_interval() {
        for &theta in &[0.0, 3.5, -3.5, 10.0, -10.0, std::f64::consts::PI] {
            let r = reduce_angle(theta);
            assert!(r > -std::f64::consts::PI && r <= std::f64::consts::PI, "{theta} -> {r}");
            // Same point on the unit circle.
            assert!(((theta - r) / (2.0 * std::f64::consts::PI)).fract().abs() < 1e-12);
        }
    }

    #[test]
    fn push_rejects_malformed_gates() {
        let mut c: QuantumCircuit<f64> = QuantumCircuit::new(2);
        assert!(c.push(GateOp::Hadamard { target: 2 }).is_err());
        assert!(c
            .push(GateOp::ControlledPhase {
                control: 1,
                target: 1,
                theta: 0.1
            })
            .is_err());
        assert!(c
            .push(GateOp::DiagonalPhase {
                qubits: vec![0, 1],
                thetas: vec![0.0; 3]
            })
            .is_err());
    }

    #[test]
    fn qft_gate_count_formula() {
        for n in 1..=6 {
            let c: QuantumCircuit<f64> = qft_circuit(n, 0..n, false).unwrap();
            assert_eq!(c.len(), n + n * (n - 1) / 2 + n / 2);
        }
    }
}
