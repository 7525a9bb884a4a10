//! Phase estimation of a unitary `U` (typically `e^{-iHt}`): index-register
//! superposition, conditional powers `U^j`, inverse-QFT readout, sampling of
//! eigenphases, and collapse of the system register onto eigenvectors.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{QpeError, Result};
use crate::gate::GateMatrix;
use crate::hamiltonian::{self, EvolutionParams, HamiltonianSum};
use crate::layout::RegisterLayout;
use crate::oracle::{self, SpectralComponent, SpectralDecomposition};
use crate::qft;
use crate::rng::{trial_rng, TrialRng};
use crate::statevector::StateVector;

/// Amplitude weight tolerated on registers that must be `|0...0>`.
pub const ZERO_REGISTER_TOLERANCE: f64 = 1e-9;

/// How the conditional powers `sum_j |j><j| (x) U^j` are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerMethod {
    /// `M` iterations; iteration `i` raises a flag qubit on index values
    /// `j >= i`, applies `U` controlled by the flag, then clears the flag.
    FlagLoop,
    /// Index bit `s` controls `U^{2^s}`.
    #[default]
    BinaryPower,
}

/// Transform applied to the index register before measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Readout {
    #[default]
    InverseQft,
    /// Wrong-direction transform; only useful as a negative control.
    ForwardQft,
}

/// Where the unitary comes from.
#[derive(Debug, Clone)]
pub enum UnitarySource {
    Matrix(GateMatrix),
    /// First-order Trotter product of a local Hamiltonian.
    Trotter {
        hamiltonian: HamiltonianSum,
        params: EvolutionParams,
    },
    /// Reference `e^{-iHt}` built by dense diagonalization.
    Exact {
        hamiltonian: HamiltonianSum,
        time: f64,
    },
}

impl UnitarySource {
    /// Dense system-register matrix of the unitary.
    pub fn compile(&self) -> Result<GateMatrix> {
        match self {
            UnitarySource::Matrix(g) => Ok(g.clone()),
            UnitarySource::Trotter {
                hamiltonian,
                params,
            } => hamiltonian::trotter_unitary(hamiltonian, params),
            UnitarySource::Exact { hamiltonian, time } => {
                hamiltonian::exact_unitary(hamiltonian, *time)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhaseEstimationConfig {
    pub layout: RegisterLayout,
    pub unitary: GateMatrix,
    /// Evolution time used to convert phases into energies.
    pub time: f64,
    pub trials: usize,
    pub seed: u64,
    pub power_method: PowerMethod,
    pub readout: Readout,
    /// Peak detection threshold; `None` selects [`default_threshold`].
    pub threshold: Option<f64>,
}

impl PhaseEstimationConfig {
    pub fn new(
        layout: RegisterLayout,
        unitary: GateMatrix,
        time: f64,
        trials: usize,
        seed: u64,
        power_method: PowerMethod,
    ) -> Result<Self> {
        let config = Self {
            layout,
            unitary,
            time,
            trials,
            seed,
            power_method,
            readout: Readout::default(),
            threshold: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.unitary.arity() != self.layout.system_size() {
            return Err(QpeError::DimensionMismatch {
                left: self.unitary.dim(),
                right: 1 << self.layout.system_size(),
            });
        }
        if self.trials == 0 {
            return Err(QpeError::InvalidParameter("trials must be >= 1".into()));
        }
        if self.time == 0.0 || !self.time.is_finite() {
            return Err(QpeError::InvalidParameter(
                "evolution time must be finite and nonzero".into(),
            ));
        }
        if self.power_method == PowerMethod::FlagLoop && self.layout.work_size() == 0 {
            return Err(QpeError::NoWorkQubit);
        }
        Ok(())
    }

    pub fn bins(&self) -> usize {
        self.layout.bins()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
            .unwrap_or_else(|| default_threshold(self.trials))
    }
}

/// `max(0.05, 4 / sqrt(trials))`.
pub fn default_threshold(trials: usize) -> f64 {
    (4.0 / (trials as f64).sqrt()).max(0.05)
}

/// One measured run.
#[derive(Debug, Clone)]
pub struct PhaseSample {
    pub bin: usize,
    /// `2 pi bin / M`.
    pub phase: f64,
    pub energy: f64,
    /// Born probability of `bin` in this run.
    pub probability: f64,
    pub collapsed_state: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl Histogram {
    pub fn empirical_probs(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Peak {
    pub bin: usize,
    pub probability: f64,
    pub phase: f64,
    pub energy: f64,
    /// Collapsed system state from the first trial that landed in this bin.
    pub eigenvector: StateVector,
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub samples: Vec<PhaseSample>,
    pub histogram: Histogram,
    /// Bins at or above `threshold`, by descending probability.
    pub peaks: Vec<Peak>,
    pub threshold: f64,
}

/// Puts the index register into the uniform superposition.
pub fn prepare_index_superposition(state: &mut StateVector, layout: &RegisterLayout) -> Result<()> {
    let index = layout.index_qubits();
    let residual = state.weight_outside_zero(&index)?;
    if residual > ZERO_REGISTER_TOLERANCE {
        return Err(QpeError::IndexNotZero { residual });
    }
    let hadamard = GateMatrix::hadamard();
    for q in index {
        state.apply_gate(&hadamard, &[q])?;
    }
    Ok(())
}

/// Flag-loop realization of `|j>|v> -> |j> U^j |v>`.
pub fn apply_conditional_powers_flag_loop(
    state: &mut StateVector,
    config: &PhaseEstimationConfig,
) -> Result<()> {
    config.validate()?;
    let layout = &config.layout;
    let flag = *layout.work_qubits().first().ok_or(QpeError::NoWorkQubit)?;
    let residual = state.weight_outside_zero(&[flag])?;
    if residual > ZERO_REGISTER_TOLERANCE {
        return Err(QpeError::WorkNotZero { residual });
    }
    let index = layout.index_qubits();
    let system = layout.system_qubits();
    for i in 1..=layout.bins() {
        let raise = |j: usize| i <= j;
        state.flip_where(&index, flag, raise)?;
        state.apply_controlled_gate(&config.unitary, &[flag], &system)?;
        state.flip_where(&index, flag, raise)?;
    }
    let residual = state.weight_outside_zero(&[flag])?;
    if residual > ZERO_REGISTER_TOLERANCE {
        return Err(QpeError::WorkNotZero { residual });
    }
    Ok(())
}

/// Binary-power realization: index bit `s` controls `U^{2^s}`.
pub fn apply_conditional_powers_binary(
    state: &mut StateVector,
    config: &PhaseEstimationConfig,
) -> Result<()> {
    config.validate()?;
    let powers = binary_powers(&config.unitary, config.layout.index_size());
    apply_binary_powers(state, &config.layout, &powers)
}

fn binary_powers(unitary: &GateMatrix, index_bits: usize) -> Vec<GateMatrix> {
    let mut powers = Vec::with_capacity(index_bits);
    let mut current = unitary.clone();
    for s in 0..index_bits {
        if s > 0 {
            current = current.pow(2);
        }
        powers.push(current.clone());
    }
    powers
}

fn apply_binary_powers(
    state: &mut StateVector,
    layout: &RegisterLayout,
    powers: &[GateMatrix],
) -> Result<()> {
    let system = layout.system_qubits();
    for (s, gate) in powers.iter().enumerate() {
        state.apply_controlled_gate(gate, &[s], &system)?;
    }
    Ok(())
}

/// Full register state `|0>_index |va>_system |0>_work`.
fn initial_state(va: &StateVector, layout: &RegisterLayout) -> Result<StateVector> {
    if va.num_qubits() != layout.system_size() {
        return Err(QpeError::DimensionMismatch {
            left: va.dim(),
            right: 1 << layout.system_size(),
        });
    }
    va.check_norm()?;
    let mut state = StateVector::new_basis_state(layout.index_size(), 0)?.tensor(va)?;
    if layout.work_size() > 0 {
        let work = StateVector::new_basis_state(layout.work_size(), 0)?;
        state = state.tensor(&work)?;
    }
    Ok(state)
}

/// Runs everything up to (not including) the measurement.
pub fn pre_measurement_state(
    va: &StateVector,
    config: &PhaseEstimationConfig,
) -> Result<StateVector> {
    config.validate()?;
    let layout = &config.layout;
    let mut state = initial_state(va, layout)?;
    prepare_index_superposition(&mut state, layout)?;
    match config.power_method {
        PowerMethod::FlagLoop => apply_conditional_powers_flag_loop(&mut state, config)?,
        PowerMethod::BinaryPower => apply_conditional_powers_binary(&mut state, config)?,
    }
    let index = layout.index_qubits();
    match config.readout {
        Readout::InverseQft => qft::qft_inverse(&mut state, &index)?,
        Readout::ForwardQft => qft::qft_forward(&mut state, &index)?,
    }
    Ok(state)
}

/// Measures the index register of a pre-measurement state and extracts the
/// collapsed system register.
fn measure_readout(
    mut state: StateVector,
    config: &PhaseEstimationConfig,
    rng: &mut TrialRng,
) -> Result<PhaseSample> {
    let layout = &config.layout;
    let index = layout.index_qubits();
    let outcome = state.measure(&index, rng)?;
    let collapsed_state = collapsed_system(&state, layout, outcome.bits)?;
    let phase = bin_phase(outcome.bits, layout.bins());
    Ok(PhaseSample {
        bin: outcome.bits,
        phase,
        energy: phase_to_energy(phase, config.time)?,
        probability: outcome.probability,
        collapsed_state,
    })
}

fn collapsed_system(
    state: &StateVector,
    layout: &RegisterLayout,
    bin: usize,
) -> Result<StateVector> {
    let work = layout.work_qubits();
    if !work.is_empty() {
        let residual = state.weight_outside_zero(&work)?;
        if residual > ZERO_REGISTER_TOLERANCE {
            return Err(QpeError::WorkNotZero { residual });
        }
    }
    let mut rest = layout.index_qubits();
    rest.extend(work);
    state.extract_register(&layout.system_qubits(), &rest, bin)
}

/// `2 pi bin / M`.
pub fn bin_phase(bin: usize, bins: usize) -> f64 {
    TAU * bin as f64 / bins as f64
}

/// One complete phase-estimation run with a seeded generator.
pub fn run_phase_estimation(
    va: &StateVector,
    config: &PhaseEstimationConfig,
    rng: &mut TrialRng,
) -> Result<PhaseSample> {
    let state = pre_measurement_state(va, config)?;
    measure_readout(state, config, rng)
}

/// `config.trials` independent runs; trial `n` draws from stream `n` of
/// `config.seed`. Everything before the measurement is deterministic, so it
/// is computed once and each trial measures its own copy.
pub fn sample_spectrum(va: &StateVector, config: &PhaseEstimationConfig) -> Result<EigenResult> {
    let prepared = pre_measurement_state(va, config)?;
    let samples = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.seed, trial);
            measure_readout(prepared.clone(), config, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(samples, config))
}

fn aggregate(samples: Vec<PhaseSample>, config: &PhaseEstimationConfig) -> EigenResult {
    let bins = config.bins();
    let mut counts = vec![0u64; bins];
    let mut first_seen: Vec<Option<usize>> = vec![None; bins];
    for (n, sample) in samples.iter().enumerate() {
        counts[sample.bin] += 1;
        first_seen[sample.bin].get_or_insert(n);
    }
    let histogram = Histogram {
        counts,
        trials: samples.len() as u64,
    };
    let threshold = config.threshold();
    let probs = histogram.empirical_probs();
    let mut peaks: Vec<Peak> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0 && p >= threshold)
        .map(|(bin, &probability)| {
            let sample = &samples[first_seen[bin].expect("counted bin has a sample")];
            Peak {
                bin,
                probability,
                phase: sample.phase,
                energy: sample.energy,
                eigenvector: sample.collapsed_state.clone(),
            }
        })
        .collect();
    peaks.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then(a.bin.cmp(&b.bin))
    });
    EigenResult {
        samples,
        histogram,
        peaks,
        threshold,
    }
}

/// Exact (unsampled) readout: outcome distribution and, for every bin with
/// nonzero probability, the collapsed system state.
#[derive(Debug, Clone)]
pub struct ExactReadout {
    pub probabilities: Vec<f64>,
    pub collapsed: Vec<Option<StateVector>>,
}

pub fn exact_readout(va: &StateVector, config: &PhaseEstimationConfig) -> Result<ExactReadout> {
    let state = pre_measurement_state(va, config)?;
    let layout = &config.layout;
    let probabilities = state.register_probabilities(&layout.index_qubits())?;
    let collapsed = probabilities
        .iter()
        .enumerate()
        .map(|(bin, &p)| {
            if p > 1e-14 {
                collapsed_system(&state, layout, bin).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExactReadout {
        probabilities,
        collapsed,
    })
}

/// `F_M(d) = sin^2(M d / 2) / (M^2 sin^2(d / 2))`, with `F_M(0) = 1`.
pub fn fejer_kernel(delta: f64, bins: usize) -> f64 {
    let m = bins as f64;
    let d = (delta + PI).rem_euclid(TAU) - PI;
    if d.abs() < 1e-7 {
        return 1.0 - (m * m - 1.0) * d * d / 12.0;
    }
    let ratio = (m * d / 2.0).sin() / (m * (d / 2.0).sin());
    ratio * ratio
}

/// `P(j) = sum_k w_k F_M(w_k - 2 pi j / M)` for components `(weight, phase)`.
pub fn analytic_bin_distribution(components: &[(f64, f64)], index_bits: usize) -> Result<Vec<f64>> {
    let sum: f64 = components.iter().map(|c| c.0).sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(QpeError::WeightNormalization { sum });
    }
    let bins = 1usize << index_bits;
    Ok((0..bins)
        .map(|j| {
            let grid = bin_phase(j, bins);
            components
                .iter()
                .map(|&(weight, phase)| weight * fejer_kernel(phase - grid, bins))
                .sum()
        })
        .collect())
}

/// Convenience adapter for oracle output.
pub fn analytic_distribution_of(
    components: &[SpectralComponent],
    index_bits: usize,
) -> Result<Vec<f64>> {
    let pairs: Vec<(f64, f64)> = components.iter().map(|c| (c.weight, c.phase)).collect();
    analytic_bin_distribution(&pairs, index_bits)
}

/// Energy from an eigenphase of `e^{-iHt}`: `E = -w / t` wrapped into
/// `(-pi/|t|, pi/|t|]`. Energies outside that window alias.
pub fn phase_to_energy(phase: f64, t: f64) -> Result<f64> {
    if t == 0.0 || !t.is_finite() {
        return Err(QpeError::InvalidParameter(
            "evolution time must be finite and nonzero".into(),
        ));
    }
    let raw = -phase / t;
    let period = TAU / t.abs();
    let half = PI / t.abs();
    let k = ((raw - half) / period).ceil();
    Ok(raw - k * period)
}

/// Weight of `collapsed` inside the reference eigenspaces whose eigenvalues
/// lie within `tol` of `energy`.
pub fn eigenvector_fidelity(
    collapsed: &StateVector,
    h: &HamiltonianSum,
    energy: f64,
    tol: f64,
) -> Result<f64> {
    let dense = oracle::assemble_dense(h)?;
    let decomposition = oracle::eigendecompose(&dense)?;
    eigenvector_fidelity_with(collapsed, &decomposition, energy, tol)
}

pub fn eigenvector_fidelity_with(
    collapsed: &StateVector,
    decomposition: &SpectralDecomposition,
    energy: f64,
    tol: f64,
) -> Result<f64> {
    let matching: Vec<usize> = decomposition
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| (e - energy).abs() <= tol)
        .map(|(k, _)| k)
        .collect();
    if matching.is_empty() {
        return Err(QpeError::NoMatchingEigenvalue { energy, tol });
    }
    if collapsed.dim() != decomposition.dim() {
        return Err(QpeError::DimensionMismatch {
            left: collapsed.dim(),
            right: decomposition.dim(),
        });
    }
    let weight: f64 = matching
        .into_iter()
        .map(|k| decomposition.overlap(collapsed, k).norm_sqr())
        .sum();
    Ok(weight.min(1.0))
}
