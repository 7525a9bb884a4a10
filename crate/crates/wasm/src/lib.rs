//! Browser bindings. Each exported function returns a JSON string so the
//! page can `JSON.parse` it without generated type glue.
//!
//! The plain Rust functions (`*_report`) hold the logic and are what the
//! native tests exercise; the `#[wasm_bindgen]` wrappers only convert errors.

use std::f64::consts::TAU;

use qpe_core::gate::max_abs_diff;
use qpe_core::hamiltonian::{exact_unitary, trotter_unitary};
use qpe_core::oracle::{assemble_dense, eigendecompose, spectral_components};
use qpe_core::phase_estimation::{
    analytic_distribution_of, bin_phase, phase_to_energy, sample_spectrum,
};
use qpe_core::problems::{
    build_transverse_ising, product_state_guess, resource_estimate, ResourceInputs,
};
use qpe_core::{
    Complex64, EvolutionParams, GateMatrix, PhaseEstimationConfig, PowerMethod, RegisterLayout,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Browser runs are single threaded; keep them small enough to stay interactive.
pub const MAX_SITES: usize = 6;
pub const MAX_INDEX_QUBITS: usize = 9;
pub const MAX_TRIALS: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub bins: usize,
    pub energies: Vec<f64>,
    pub sampled: Vec<f64>,
    pub predicted: Vec<f64>,
    pub reference: Vec<Level>,
    pub peaks: Vec<PeakSummary>,
    pub bin_width: f64,
    pub window: f64,
}

#[derive(Debug, Serialize)]
pub struct Level {
    pub energy: f64,
    pub weight: f64,
}

#[derive(Debug, Serialize)]
pub struct PeakSummary {
    pub bin: usize,
    pub energy: f64,
    pub probability: f64,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Samples the transverse-field Ising spectrum seen from `|+...+>` and pairs
/// it with the closed-form bin distribution and the exact eigenvalues.
pub fn tfim_spectrum_report(
    sites: usize,
    coupling: f64,
    field: f64,
    index_qubits: usize,
    time: f64,
    trials: usize,
    seed: u64,
) -> Result<SpectrumReport, String> {
    if !(2..=MAX_SITES).contains(&sites) {
        return Err(format!("sites must be 2..={MAX_SITES}"));
    }
    if !(1..=MAX_INDEX_QUBITS).contains(&index_qubits) {
        return Err(format!("index qubits must be 1..={MAX_INDEX_QUBITS}"));
    }
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be 1..={MAX_TRIALS}"));
    }
    let h = build_transverse_ising(sites, coupling, field).map_err(err)?;
    let decomposition = eigendecompose(&assemble_dense(&h).map_err(err)?).map_err(err)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let guess = product_state_guess(&vec![
        (Complex64::new(s, 0.0), Complex64::new(s, 0.0));
        sites
    ])
    .map_err(err)?;
    let layout = RegisterLayout::new(index_qubits, sites, 0).map_err(err)?;
    let config = PhaseEstimationConfig::new(
        layout,
        GateMatrix::new(decomposition.exponential(time)).map_err(err)?,
        time,
        trials,
        seed,
        PowerMethod::BinaryPower,
    )
    .map_err(err)?;
    let result = sample_spectrum(&guess, &config).map_err(err)?;
    let components = spectral_components(&guess, &decomposition, time).map_err(err)?;
    let predicted = analytic_distribution_of(&components, index_qubits).map_err(err)?;
    let bins = config.bins();
    let energies = (0..bins)
        .map(|j| phase_to_energy(bin_phase(j, bins), time))
        .collect::<qpe_core::Result<Vec<_>>>()
        .map_err(err)?;
    let reference = decomposition
        .eigenspaces()
        .into_iter()
        .map(|range| {
            Ok(Level {
                energy: decomposition.eigenvalues[range.start],
                weight: decomposition.projector_weight(&guess, range)?,
            })
        })
        .collect::<qpe_core::Result<Vec<_>>>()
        .map_err(err)?;
    Ok(SpectrumReport {
        bins,
        energies,
        sampled: result.histogram.empirical_probs(),
        predicted,
        reference,
        peaks: result
            .peaks
            .iter()
            .map(|p| PeakSummary {
                bin: p.bin,
                energy: p.energy,
                probability: p.probability,
            })
            .collect(),
        bin_width: TAU / (bins as f64 * time.abs()),
        window: std::f64::consts::PI / time.abs(),
    })
}

#[derive(Debug, Serialize)]
pub struct TrotterPoint {
    pub slices: usize,
    pub error: f64,
}

/// Operator error of the first-order product for an open TFIM chain at
/// slice counts `1, 2, 4, ..., max_slices`.
pub fn trotter_curve_report(
    sites: usize,
    coupling: f64,
    field: f64,
    time: f64,
    max_slices: usize,
) -> Result<Vec<TrotterPoint>, String> {
    if !(2..=MAX_SITES).contains(&sites) {
        return Err(format!("sites must be 2..={MAX_SITES}"));
    }
    if max_slices == 0 || max_slices > 4096 {
        return Err("max slices must be 1..=4096".into());
    }
    let h = build_transverse_ising(sites, coupling, field).map_err(err)?;
    let exact = exact_unitary(&h, time).map_err(err)?;
    let mut points = Vec::new();
    let mut slices = 1;
    while slices <= max_slices {
        let params = EvolutionParams::new(time, slices, 1e-3).map_err(err)?;
        let approx = trotter_unitary(&h, &params).map_err(err)?;
        points.push(TrotterPoint {
            slices,
            error: max_abs_diff(approx.matrix(), exact.matrix()),
        });
        slices *= 2;
    }
    Ok(points)
}

#[derive(Debug, Serialize)]
pub struct ResourceReport {
    pub particle_qubits: usize,
    pub total: usize,
}

pub fn resources_report(
    particles: usize,
    qubits_per_particle: usize,
    index_qubits: usize,
    scratch_qubits: usize,
    position_qubits_per_particle: usize,
    interacting_pair: bool,
) -> Result<ResourceReport, String> {
    let estimate = resource_estimate(ResourceInputs {
        particles,
        qubits_per_particle,
        index_qubits,
        scratch_qubits,
        position_space_qubits_per_particle: position_qubits_per_particle,
        interacting_pair_in_position_space: interacting_pair,
    })
    .map_err(err)?;
    Ok(ResourceReport {
        particle_qubits: estimate.particle_qubits,
        total: estimate.total,
    })
}

fn to_json<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn tfim_spectrum(
    sites: usize,
    coupling: f64,
    field: f64,
    index_qubits: usize,
    time: f64,
    trials: usize,
    seed: u32,
) -> Result<String, JsError> {
    to_json(tfim_spectrum_report(
        sites,
        coupling,
        field,
        index_qubits,
        time,
        trials,
        seed as u64,
    ))
}

#[wasm_bindgen]
pub fn trotter_curve(
    sites: usize,
    coupling: f64,
    field: f64,
    time: f64,
    max_slices: usize,
) -> Result<String, JsError> {
    to_json(trotter_curve_report(
        sites, coupling, field, time, max_slices,
    ))
}

#[wasm_bindgen]
pub fn resources(
    particles: usize,
    qubits_per_particle: usize,
    index_qubits: usize,
    scratch_qubits: usize,
    position_qubits_per_particle: usize,
    interacting_pair: bool,
) -> Result<String, JsError> {
    to_json(resources_report(
        particles,
        qubits_per_particle,
        index_qubits,
        scratch_qubits,
        position_qubits_per_particle,
        interacting_pair,
    ))
}
