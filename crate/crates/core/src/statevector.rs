//! Dense state vectors and the gate/measurement kernels that act on them.
//!
//! Qubit 0 is the least significant bit of the basis-state index.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{QpeError, Result};
use crate::gate::GateMatrix;

/// Hard cap on the total number of simulated qubits (2^26 amplitudes, 1 GiB).
pub const MAX_QUBITS: usize = 26;

/// Allowed deviation of `sum |a_i|^2` from 1.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Result of a projective measurement on a set of qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    /// Outcome value; bit `b` is the result on the `b`-th measured qubit.
    pub bits: usize,
    /// Born probability of this outcome before collapse.
    pub probability: f64,
}

/// Normalized amplitude vector over `2^q` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubit_count(q: usize) -> Result<()> {
    if q == 0 {
        return Err(QpeError::InvalidParameter(
            "a state needs at least one qubit".into(),
        ));
    }
    if q > MAX_QUBITS {
        return Err(QpeError::QubitCap {
            requested: q,
            cap: MAX_QUBITS,
        });
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index>` on `q` qubits.
    pub fn new_basis_state(q: usize, index: usize) -> Result<Self> {
        check_qubit_count(q)?;
        let dim = 1usize << q;
        if index >= dim {
            return Err(QpeError::IndexOutOfRange {
                index,
                num_qubits: q,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits: q,
            amplitudes,
        })
    }

    /// Wraps caller-provided amplitudes; they must already be normalized.
    pub fn from_amplitudes(q: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(q)?;
        let dim = 1usize << q;
        if amplitudes.len() != dim {
            return Err(QpeError::WrongLength {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let state = Self {
            num_qubits: q,
            amplitudes,
        };
        state.check_norm()?;
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Errors if the norm has drifted beyond [`NORM_TOLERANCE`].
    pub fn check_norm(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QpeError::NormViolation { norm });
        }
        Ok(())
    }

    /// `<self|other> = sum conj(a_i) b_i`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(QpeError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product with `self` on the low qubits and `high` above it.
    pub fn tensor(&self, high: &StateVector) -> Result<StateVector> {
        let q = self.num_qubits + high.num_qubits;
        check_qubit_count(q)?;
        let mut amplitudes = Vec::with_capacity(1 << q);
        for h in &high.amplitudes {
            amplitudes.extend(self.amplitudes.iter().map(|l| l * h));
        }
        Ok(StateVector {
            num_qubits: q,
            amplitudes,
        })
    }

    pub fn apply_gate(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        self.apply_controlled_gate(gate, &[], targets)
    }

    /// Applies `gate` on `targets` to the amplitudes whose `controls` bits are all 1.
    pub fn apply_controlled_gate(
        &mut self,
        gate: &GateMatrix,
        controls: &[usize],
        targets: &[usize],
    ) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(QpeError::ArityMismatch {
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        let target_mask = self.qubit_mask(targets)?;
        let control_mask = self.qubit_mask(controls)?;
        if let Some(&q) = controls.iter().find(|q| targets.contains(q)) {
            return Err(QpeError::ControlTargetOverlap(q));
        }

        let local_dim = gate.dim();
        let offsets = local_offsets(targets);
        let matrix = gate.matrix();
        let mut gathered = vec![Complex64::new(0.0, 0.0); local_dim];
        for base in 0..self.dim() {
            if base & target_mask != 0 || base & control_mask != control_mask {
                continue;
            }
            for (slot, off) in gathered.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, value) in gathered.iter().enumerate() {
                    acc += matrix[(row, col)] * value;
                }
                self.amplitudes[base | off] = acc;
            }
        }
        self.check_norm()
    }

    /// Multiplies each amplitude by `e^{i phases[v]}`, where `v` is the value
    /// held by `register` in that basis state.
    pub fn apply_register_phases(&mut self, register: &[usize], phases: &[f64]) -> Result<()> {
        self.qubit_mask(register)?;
        if phases.len() != 1 << register.len() {
            return Err(QpeError::WrongLength {
                expected: 1 << register.len(),
                actual: phases.len(),
            });
        }
        let factors: Vec<Complex64> = phases
            .iter()
            .map(|&p| Complex64::from_polar(1.0, p))
            .collect();
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            *amp *= factors[extract_bits(index, register)];
        }
        self.check_norm()
    }

    /// Applies a controlled phase `e^{i theta}` to states with both qubits set.
    pub fn apply_controlled_phase(&mut self, a: usize, b: usize, theta: f64) -> Result<()> {
        let mask = self.qubit_mask(&[a, b])?;
        let factor = Complex64::from_polar(1.0, theta);
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            if index & mask == mask {
                *amp *= factor;
            }
        }
        Ok(())
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.qubit_mask(&[a, b])?;
        let (bit_a, bit_b) = (1usize << a, 1usize << b);
        for index in 0..self.dim() {
            if index & bit_a != 0 && index & bit_b == 0 {
                self.amplitudes.swap(index, index ^ bit_a ^ bit_b);
            }
        }
        Ok(())
    }

    /// Flips `target` on every basis state for which `predicate(register value)`
    /// holds. A classically parameterized reversible permutation.
    pub fn flip_where<F>(&mut self, register: &[usize], target: usize, predicate: F) -> Result<()>
    where
        F: Fn(usize) -> bool,
    {
        self.qubit_mask(register)?;
        let bit = 1usize << self.qubit_mask(&[target])?.trailing_zeros();
        if register.contains(&target) {
            return Err(QpeError::ControlTargetOverlap(target));
        }
        for index in 0..self.dim() {
            if index & bit == 0 && predicate(extract_bits(index, register)) {
                self.amplitudes.swap(index, index | bit);
            }
        }
        Ok(())
    }

    /// Exact outcome distribution of measuring `qubits` (no sampling).
    pub fn register_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.qubit_mask(qubits)?;
        let mut probs = vec![0.0; 1 << qubits.len()];
        for (index, amp) in self.amplitudes.iter().enumerate() {
            probs[extract_bits(index, qubits)] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Total weight on basis states where any of `qubits` is 1.
    pub fn weight_outside_zero(&self, qubits: &[usize]) -> Result<f64> {
        let mask = self.qubit_mask(qubits)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective measurement of `qubits` with Born-rule sampling. The state
    /// collapses in place onto the outcome and is renormalized.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubits: &[usize],
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        if qubits.is_empty() {
            return Err(QpeError::EmptyRegister);
        }
        let probs = self.register_probabilities(qubits)?;
        let draw: f64 = rng.random();
        let total: f64 = probs.iter().sum();
        let mut acc = 0.0;
        let mut bits = probs.len() - 1;
        for (value, p) in probs.iter().enumerate() {
            acc += p / total;
            if draw < acc && *p > 0.0 {
                bits = value;
                break;
            }
        }
        // Floating-point slack at the top end must never land on a zero-probability outcome.
        while probs[bits] == 0.0 && bits > 0 {
            bits -= 1;
        }
        let probability = probs[bits];
        self.collapse(qubits, bits, probability)?;
        Ok(MeasurementOutcome { bits, probability })
    }

    /// Projects onto `qubits == bits` and renormalizes.
    pub fn collapse(&mut self, qubits: &[usize], bits: usize, probability: f64) -> Result<()> {
        if probability <= 0.0 {
            return Err(QpeError::InvalidParameter(
                "cannot collapse onto a zero-probability outcome".into(),
            ));
        }
        let scale = 1.0 / probability.sqrt();
        for (index, amp) in self.amplitudes.iter_mut().enumerate() {
            if extract_bits(index, qubits) == bits {
                *amp *= scale;
            } else {
                *amp = Complex64::new(0.0, 0.0);
            }
        }
        self.check_norm()
    }

    /// Amplitudes of `register` restricted to basis states where every other
    /// qubit matches `rest_value` on `rest`. The result is renormalized.
    pub fn extract_register(
        &self,
        register: &[usize],
        rest: &[usize],
        rest_value: usize,
    ) -> Result<StateVector> {
        self.qubit_mask(register)?;
        self.qubit_mask(rest)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << register.len()];
        for (index, amp) in self.amplitudes.iter().enumerate() {
            if extract_bits(index, rest) == rest_value {
                amps[extract_bits(index, register)] += amp;
            }
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(QpeError::NormViolation { norm: 0.0 });
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(register.len(), amps)
    }

    /// Bit mask of `qubits`, validating range and distinctness.
    fn qubit_mask(&self, qubits: &[usize]) -> Result<usize> {
        let mut mask = 0usize;
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(QpeError::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if mask & (1 << q) != 0 {
                return Err(QpeError::DuplicateQubit(q));
            }
            mask |= 1 << q;
        }
        Ok(mask)
    }
}

/// Value of `qubits` in basis index `index`; `qubits[0]` is the low bit.
#[inline]
pub fn extract_bits(index: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (b, &q)| acc | (((index >> q) & 1) << b))
}

fn local_offsets(targets: &[usize]) -> Vec<usize> {
    (0..1usize << targets.len())
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .fold(0, |acc, (b, &q)| acc | (((local >> b) & 1) << q))
        })
        .collect()
}
