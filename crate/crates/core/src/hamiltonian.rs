//! Local Hamiltonians `H = sum_i H_i` and first-order Trotter evolution.

use crate::error::{QpeError, Result};
use crate::gate::{arity_of, hermiticity_deviation, max_abs_diff, CMatrix, GateMatrix};
use crate::layout::RegisterLayout;
use crate::oracle::{self, MAX_DENSE_QUBITS};
use crate::statevector::StateVector;

/// Largest support of a single local term.
pub const MAX_TERM_QUBITS: usize = 6;

/// Hermiticity tolerance on `max |H - H^dagger|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// A Hermitian operator acting on a few system qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    support: Vec<usize>,
    matrix: CMatrix,
}

impl LocalTerm {
    /// `support[b]` is the system qubit addressed by bit `b` of the matrix index.
    pub fn new(support: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let k = arity_of(&matrix)?;
        if k == 0 || k > MAX_TERM_QUBITS {
            return Err(QpeError::BadArity(k));
        }
        if support.len() != k {
            return Err(QpeError::ArityMismatch {
                arity: k,
                targets: support.len(),
            });
        }
        for (i, q) in support.iter().enumerate() {
            if support[..i].contains(q) {
                return Err(QpeError::DuplicateQubit(*q));
            }
        }
        let deviation = hermiticity_deviation(&matrix);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(QpeError::NotHermitian { deviation });
        }
        Ok(Self { support, matrix })
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Ordered sum of local terms over `l` system qubits. The term order is the
/// Trotter application order.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSum {
    num_system_qubits: usize,
    terms: Vec<LocalTerm>,
}

impl HamiltonianSum {
    pub fn new(num_system_qubits: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        if num_system_qubits == 0 {
            return Err(QpeError::InvalidParameter(
                "a Hamiltonian needs at least one system qubit".into(),
            ));
        }
        for term in &terms {
            if let Some(&q) = term.support.iter().find(|&&q| q >= num_system_qubits) {
                return Err(QpeError::QubitOutOfRange {
                    qubit: q,
                    num_qubits: num_system_qubits,
                });
            }
        }
        Ok(Self {
            num_system_qubits,
            terms,
        })
    }

    pub fn num_system_qubits(&self) -> usize {
        self.num_system_qubits
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    /// `sum_{i>j} max |[H_i, H_j]|` over the dense embeddings.
    pub fn commutator_sum(&self) -> Result<f64> {
        let l = self.num_system_qubits;
        if l > MAX_DENSE_QUBITS {
            return Err(QpeError::TooLarge {
                qubits: l,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << l;
        let embedded: Vec<CMatrix> = self
            .terms
            .iter()
            .map(|term| {
                let mut full = CMatrix::zeros(dim, dim);
                oracle::embed_into(&mut full, term.matrix(), term.support());
                full
            })
            .collect();
        let mut total = 0.0;
        for i in 0..embedded.len() {
            for j in 0..i {
                let ab = &embedded[i] * &embedded[j];
                let ba = &embedded[j] * &embedded[i];
                total += max_abs_diff(&ab, &ba);
            }
        }
        Ok(total)
    }
}

/// Evolution time, Trotter slice count, and target accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub time: f64,
    pub slices: usize,
    pub accuracy: f64,
}

impl EvolutionParams {
    pub fn new(time: f64, slices: usize, accuracy: f64) -> Result<Self> {
        if !time.is_finite() {
            return Err(QpeError::InvalidParameter("time must be finite".into()));
        }
        if slices == 0 {
            return Err(QpeError::InvalidParameter(
                "at least one Trotter slice is required".into(),
            ));
        }
        if accuracy.is_nan() || accuracy <= 0.0 {
            return Err(QpeError::InvalidParameter(
                "accuracy must be positive".into(),
            ));
        }
        Ok(Self {
            time,
            slices,
            accuracy,
        })
    }

    pub fn slice_time(&self) -> f64 {
        self.time / self.slices as f64
    }
}

/// `e^{-i H_term dt}` via the term's Hermitian eigendecomposition.
pub fn term_exponential(term: &LocalTerm, dt: f64) -> Result<GateMatrix> {
    let decomposition = oracle::eigendecompose(term.matrix())?;
    GateMatrix::new(decomposition.exponential(dt))
}

/// Per-term gates of one Trotter slice, ready to apply repeatedly.
#[derive(Debug, Clone)]
pub struct TrotterSlice {
    gates: Vec<(GateMatrix, Vec<usize>)>,
}

impl TrotterSlice {
    pub fn new(h: &HamiltonianSum, dt: f64) -> Result<Self> {
        let gates = h
            .terms()
            .iter()
            .map(|term| Ok((term_exponential(term, dt)?, term.support().to_vec())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { gates })
    }

    /// Applies the slice with system qubit `q` mapped to state qubit `offset + q`.
    pub fn apply(&self, state: &mut StateVector, offset: usize) -> Result<()> {
        let mut targets = Vec::with_capacity(MAX_TERM_QUBITS);
        for (gate, support) in &self.gates {
            targets.clear();
            targets.extend(support.iter().map(|q| q + offset));
            state.apply_gate(gate, &targets)?;
        }
        Ok(())
    }
}

fn check_layout(h: &HamiltonianSum, layout: &RegisterLayout) -> Result<()> {
    if h.num_system_qubits() != layout.system_size() {
        return Err(QpeError::InvalidLayout(format!(
            "Hamiltonian acts on {} qubits but the system register has {}",
            h.num_system_qubits(),
            layout.system_size()
        )));
    }
    Ok(())
}

/// One first-order slice `prod_i e^{-i H_i dt}` on the system register.
pub fn trotter_step(
    state: &mut StateVector,
    h: &HamiltonianSum,
    dt: f64,
    layout: &RegisterLayout,
) -> Result<()> {
    check_layout(h, layout)?;
    TrotterSlice::new(h, dt)?.apply(state, layout.system_offset())
}

/// `r` slices of length `t / r`.
pub fn trotter_evolve(
    state: &mut StateVector,
    h: &HamiltonianSum,
    params: &EvolutionParams,
    layout: &RegisterLayout,
) -> Result<()> {
    check_layout(h, layout)?;
    let slice = TrotterSlice::new(h, params.slice_time())?;
    for _ in 0..params.slices {
        slice.apply(state, layout.system_offset())?;
    }
    Ok(())
}

/// Dense matrix of the Trotterized evolution, built column by column from
/// the system basis states.
pub fn trotter_unitary(h: &HamiltonianSum, params: &EvolutionParams) -> Result<GateMatrix> {
    let l = h.num_system_qubits();
    if l > MAX_DENSE_QUBITS {
        return Err(QpeError::TooLarge {
            qubits: l,
            max: MAX_DENSE_QUBITS,
        });
    }
    let slice = TrotterSlice::new(h, params.slice_time())?;
    materialize(l, |state| {
        for _ in 0..params.slices {
            slice.apply(state, 0)?;
        }
        Ok(())
    })
}

/// Dense matrix of a state map on `l` qubits, one basis state per column.
pub fn materialize<F>(l: usize, mut evolve: F) -> Result<GateMatrix>
where
    F: FnMut(&mut StateVector) -> Result<()>,
{
    let dim = 1usize << l;
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut state = StateVector::new_basis_state(l, col)?;
        evolve(&mut state)?;
        for (row, amp) in state.amplitudes().iter().enumerate() {
            matrix[(row, col)] = *amp;
        }
    }
    GateMatrix::new(matrix)
}

/// Reference `e^{-iHt}` over the full system space.
pub fn exact_unitary(h: &HamiltonianSum, t: f64) -> Result<GateMatrix> {
    let dense = oracle::assemble_dense(h)?;
    let decomposition = oracle::eigendecompose(&dense)?;
    GateMatrix::new(decomposition.exponential(t))
}

/// Upper-bound heuristic for the slice count reaching accuracy `epsilon`:
/// `r >= (sum_{i>j} ||[H_i, H_j]||) t^2 / (2 epsilon)`. The library never
/// applies this automatically.
pub fn slices_for_accuracy(h: &HamiltonianSum, t: f64, epsilon: f64) -> Result<usize> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(QpeError::InvalidParameter(
            "accuracy must be positive".into(),
        ));
    }
    let bound = h.commutator_sum()? * t * t / (2.0 * epsilon);
    Ok((bound.ceil() as usize).max(1))
}
