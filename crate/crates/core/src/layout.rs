use crate::error::{QpeError, Result};
use crate::statevector::MAX_QUBITS;

/// Partition of the machine into index, system, and work registers.
///
/// The index register occupies qubits `[0, m)`, the system register
/// `[m, m + l)`, and the work register everything above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    index: usize,
    system: usize,
    work: usize,
}

impl RegisterLayout {
    pub fn new(index: usize, system: usize, work: usize) -> Result<Self> {
        if index == 0 {
            return Err(QpeError::InvalidLayout(
                "index register needs at least one qubit".into(),
            ));
        }
        if system == 0 {
            return Err(QpeError::InvalidLayout(
                "system register needs at least one qubit".into(),
            ));
        }
        let total = index + system + work;
        if total > MAX_QUBITS {
            return Err(QpeError::QubitCap {
                requested: total,
                cap: MAX_QUBITS,
            });
        }
        Ok(Self {
            index,
            system,
            work,
        })
    }

    pub fn index_size(&self) -> usize {
        self.index
    }

    pub fn system_size(&self) -> usize {
        self.system
    }

    pub fn work_size(&self) -> usize {
        self.work
    }

    pub fn total_qubits(&self) -> usize {
        self.index + self.system + self.work
    }

    /// Number of phase bins, `M = 2^m`.
    pub fn bins(&self) -> usize {
        1 << self.index
    }

    pub fn index_qubits(&self) -> Vec<usize> {
        (0..self.index).collect()
    }

    pub fn system_qubits(&self) -> Vec<usize> {
        (self.index..self.index + self.system).collect()
    }

    pub fn work_qubits(&self) -> Vec<usize> {
        (self.index + self.system..self.total_qubits()).collect()
    }

    /// Qubit offset of the system register.
    pub fn system_offset(&self) -> usize {
        self.index
    }
}
