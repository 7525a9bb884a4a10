//! Demo problem builders and qubit-count arithmetic.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{QpeError, Result};
use crate::gate::{pauli, CMatrix, GateMatrix};
use crate::hamiltonian::{self, EvolutionParams, HamiltonianSum, LocalTerm};
use crate::qft;
use crate::statevector::StateVector;

/// Open-chain transverse-field Ising model
/// `H = -J sum_i Z_i Z_{i+1} - h sum_i X_i` on `n` sites.
/// Bond terms come first, then field terms.
pub fn build_transverse_ising(sites: usize, coupling: f64, field: f64) -> Result<HamiltonianSum> {
    if !(2..=12).contains(&sites) {
        return Err(QpeError::InvalidParameter(format!(
            "TFIM needs 2..=12 sites, got {sites}"
        )));
    }
    let zz = pauli::kron(&pauli::z(), &pauli::z()).scale(-coupling);
    let x = pauli::x().scale(-field);
    let mut terms = Vec::with_capacity(2 * sites - 1);
    for i in 0..sites - 1 {
        terms.push(LocalTerm::new(vec![i, i + 1], zz.clone())?);
    }
    for i in 0..sites {
        terms.push(LocalTerm::new(vec![i], x.clone())?);
    }
    HamiltonianSum::new(sites, terms)
}

/// Potential shapes accepted by the grid builder.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// `omega^2 (x - x0)^2 / 2` in grid units.
    Harmonic {
        omega: f64,
        center: f64,
    },
    Sampled(Vec<f64>),
}

impl Potential {
    /// Parses `zero`, `constant:c`, or `harmonic:omega,x0`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || QpeError::InvalidParameter(format!("unrecognized potential '{text}'"));
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        match text.split_once(':') {
            None if text.trim() == "zero" => Ok(Potential::Zero),
            Some(("constant", value)) => Ok(Potential::Constant(number(value)?)),
            Some(("harmonic", args)) => {
                let (omega, center) = args.split_once(',').ok_or_else(bad)?;
                Ok(Potential::Harmonic {
                    omega: number(omega)?,
                    center: number(center)?,
                })
            }
            _ => Err(bad()),
        }
    }

    pub fn sample(&self, points: usize) -> Vec<f64> {
        match self {
            Potential::Zero => vec![0.0; points],
            Potential::Constant(c) => vec![*c; points],
            Potential::Harmonic { omega, center } => (0..points)
                .map(|x| 0.5 * omega * omega * (x as f64 - center).powi(2))
                .collect(),
            Potential::Sampled(values) => values.clone(),
        }
    }
}

/// Single particle on a periodic grid of `2^l` points. One Trotter slice
/// multiplies by `e^{-iV(x)dt}` in position space, switches to momentum space
/// with the forward QFT, multiplies by `e^{-iT(p)dt}`, and switches back.
#[derive(Debug, Clone, PartialEq)]
pub struct GridParticle {
    qubits: usize,
    potential: Vec<f64>,
    mass: f64,
}

impl GridParticle {
    pub fn new(qubits: usize, potential: &Potential, mass: f64) -> Result<Self> {
        if !(2..=10).contains(&qubits) {
            return Err(QpeError::InvalidParameter(format!(
                "grid needs 2..=10 qubits, got {qubits}"
            )));
        }
        let values = potential.sample(1 << qubits);
        if values.len() != 1 << qubits {
            return Err(QpeError::WrongLength {
                expected: 1 << qubits,
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(QpeError::InvalidParameter(
                "potential values must be finite".into(),
            ));
        }
        if mass.is_nan() || mass <= 0.0 || !mass.is_finite() {
            return Err(QpeError::InvalidParameter("mass must be positive".into()));
        }
        Ok(Self {
            qubits,
            potential: values,
            mass,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn points(&self) -> usize {
        1 << self.qubits
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Centered momentum for index `p`: `p` below `N/2`, `p - N` above.
    pub fn centered_momentum(&self, p: usize) -> i64 {
        let n = self.points() as i64;
        let p = p as i64;
        if p < n / 2 {
            p
        } else {
            p - n
        }
    }

    /// `T(p) = (2 pi p / N)^2 / (2 mass)` for every momentum index.
    pub fn kinetic_energies(&self) -> Vec<f64> {
        let n = self.points() as f64;
        (0..self.points())
            .map(|p| {
                let k = TAU * self.centered_momentum(p) as f64 / n;
                k * k / (2.0 * self.mass)
            })
            .collect()
    }

    /// One slice of length `dt` on qubits `offset..offset + l`.
    pub fn apply_slice(&self, state: &mut StateVector, offset: usize, dt: f64) -> Result<()> {
        let register: Vec<usize> = (offset..offset + self.qubits).collect();
        let potential_phases: Vec<f64> = self.potential.iter().map(|v| -v * dt).collect();
        let kinetic_phases: Vec<f64> = self.kinetic_energies().iter().map(|t| -t * dt).collect();
        state.apply_register_phases(&register, &potential_phases)?;
        qft::qft_forward(state, &register)?;
        state.apply_register_phases(&register, &kinetic_phases)?;
        qft::qft_inverse(state, &register)
    }

    /// Dense matrix of `params.slices` slices of length `t / r`.
    pub fn trotter_unitary(&self, params: &EvolutionParams) -> Result<GateMatrix> {
        let dt = params.slice_time();
        hamiltonian::materialize(self.qubits, |state| {
            for _ in 0..params.slices {
                self.apply_slice(state, 0, dt)?;
            }
            Ok(())
        })
    }

    /// Dense grid Hamiltonian `diag(V) + F^dagger diag(T) F`, evaluated entrywise
    /// from the DFT sum rather than through the circuit.
    pub fn dense_hamiltonian(&self) -> CMatrix {
        let n = self.points();
        let kinetic = self.kinetic_energies();
        let mut h = CMatrix::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, t) in kinetic.iter().enumerate() {
                    let angle = TAU * (k as f64) * (y as f64 - x as f64) / n as f64;
                    acc += Complex64::from_polar(*t, angle);
                }
                h[(x, y)] = acc / n as f64;
            }
            h[(x, x)] += Complex64::new(self.potential[x], 0.0);
        }
        h
    }
}

/// Real Gaussian wave packet on `2^l` grid points, normalized.
pub fn gaussian_guess(qubits: usize, center: f64, width: f64) -> Result<StateVector> {
    if width.is_nan() || width <= 0.0 {
        return Err(QpeError::InvalidParameter("width must be positive".into()));
    }
    let amps: Vec<f64> = (0..1usize << qubits)
        .map(|x| (-(x as f64 - center).powi(2) / (4.0 * width * width)).exp())
        .collect();
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    StateVector::from_amplitudes(
        qubits,
        amps.iter().map(|a| Complex64::new(a / norm, 0.0)).collect(),
    )
}

/// Tensor product of single-qubit states; entry `i` describes system qubit `i`.
pub fn product_state_guess(single_qubit: &[(Complex64, Complex64)]) -> Result<StateVector> {
    let (first, rest) = single_qubit.split_first().ok_or(QpeError::EmptyRegister)?;
    let one = |pair: &(Complex64, Complex64)| StateVector::from_amplitudes(1, vec![pair.0, pair.1]);
    rest.iter()
        .try_fold(one(first)?, |acc, pair| acc.tensor(&one(pair)?))
}

/// Inputs to the qubit-count estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResourceInputs {
    pub particles: usize,
    pub qubits_per_particle: usize,
    pub index_qubits: usize,
    pub scratch_qubits: usize,
    /// Per-particle qubits in the position-space representation (0 if unused).
    pub position_space_qubits_per_particle: usize,
    /// Whether one interacting pair is temporarily held in position space.
    pub interacting_pair_in_position_space: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceEstimate {
    pub inputs: ResourceInputs,
    pub particle_qubits: usize,
    pub total: usize,
}

/// Without position space: `n q + index + scratch`. With one interacting
/// pair in position space: `2 p + (n - 2) q + index + scratch`.
pub fn resource_estimate(inputs: ResourceInputs) -> Result<ResourceEstimate> {
    let overflow = || QpeError::InvalidParameter("qubit count overflows".into());
    let particle_qubits = if inputs.interacting_pair_in_position_space {
        if inputs.particles < 2 {
            return Err(QpeError::InvalidParameter(
                "an interacting pair needs at least 2 particles".into(),
            ));
        }
        let pair = inputs
            .position_space_qubits_per_particle
            .checked_mul(2)
            .ok_or_else(overflow)?;
        let others = (inputs.particles - 2)
            .checked_mul(inputs.qubits_per_particle)
            .ok_or_else(overflow)?;
        pair.checked_add(others).ok_or_else(overflow)?
    } else {
        inputs
            .particles
            .checked_mul(inputs.qubits_per_particle)
            .ok_or_else(overflow)?
    };
    let total = particle_qubits
        .checked_add(inputs.index_qubits)
        .and_then(|t| t.checked_add(inputs.scratch_qubits))
        .ok_or_else(overflow)?;
    Ok(ResourceEstimate {
        inputs,
        particle_qubits,
        total,
    })
}

/// Energy resolution `2 pi / (M t)` of one phase bin.
pub fn bin_width_energy(index_bits: usize, t: f64) -> f64 {
    2.0 * PI / ((1usize << index_bits) as f64 * t.abs())
}
