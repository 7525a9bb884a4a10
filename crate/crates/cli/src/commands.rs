use std::f64::consts::{PI, TAU};
use std::path::PathBuf;
use std::time::Instant;

use log::{info, warn};
use qpe_core::gate::max_abs_diff;
use qpe_core::hamiltonian::{exact_unitary, slices_for_accuracy, trotter_unitary};
use qpe_core::oracle::{self, spectral_components, MAX_DENSE_QUBITS};
use qpe_core::phase_estimation::{
    analytic_distribution_of, bin_phase, exact_readout, fejer_kernel, sample_spectrum,
};
use qpe_core::problems::{bin_width_energy, resource_estimate, ResourceInputs};
use qpe_core::{
    EigenResult, EvolutionParams, GateMatrix, PhaseEstimationConfig, Readout, RegisterLayout,
    SpectralDecomposition, StateVector,
};
use serde::Serialize;

use crate::config::{build_guess, build_problem, BuiltProblem, RunConfig, SliceMode, Slices};
use crate::error::{CliError, CliResult};
use crate::output::{self, BenchRow};

/// Largest system for which `solve`/`spectrum` diagonalize automatically to
/// attach reference fidelities. Exact mode and `oracle-check` go up to the
/// dense limit regardless.
pub const AUTO_ORACLE_MAX_QUBITS: usize = 10;

pub const DISTRIBUTION_TOLERANCE: f64 = 1e-10;
pub const COLLAPSE_TOLERANCE: f64 = 1e-8;

pub const DEFAULT_SLICE_SWEEP: [usize; 4] = [16, 32, 64, 128];

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub threads: usize,
    /// Negative control: read the index register out with the forward QFT.
    pub corrupt_qft_sign: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            corrupt_qft_sign: false,
        }
    }
}

/// Everything a run needs, built and validated up front.
pub struct Prepared {
    pub config: RunConfig,
    pub problem: BuiltProblem,
    pub guess: StateVector,
    pub layout: RegisterLayout,
    pub unitary: GateMatrix,
    pub unitary_kind: &'static str,
    pub oracle: Option<SpectralDecomposition>,
    pub warnings: Vec<String>,
}

fn warn_into(warnings: &mut Vec<String>, message: String) {
    warn!("{message}");
    warnings.push(message);
}

fn decompose(problem: &BuiltProblem) -> CliResult<Option<SpectralDecomposition>> {
    match problem.dense_hamiltonian() {
        Some(dense) => Ok(Some(oracle::eigendecompose(&dense)?)),
        None => Ok(None),
    }
}

pub fn prepare(config: RunConfig, force_exact: bool) -> CliResult<Prepared> {
    config.validate()?;
    let problem = build_problem(&config.problem)?;
    let guess = build_guess(config.guess.as_ref(), &problem)?;
    let layout = RegisterLayout::new(
        config.index_qubits,
        problem.system_qubits(),
        config.work_qubits(),
    )
    .map_err(|e| CliError::config("index_qubits", e))?;
    let mut warnings = Vec::new();
    let l = problem.system_qubits();
    let exact = force_exact || config.slices == Slices::Mode(SliceMode::Exact);

    if exact && matches!(problem, BuiltProblem::Unitary(_)) {
        return Err(CliError::config(
            "problem",
            "an explicit unitary has no Hamiltonian to diagonalize",
        ));
    }
    if exact && l > MAX_DENSE_QUBITS {
        return Err(CliError::config(
            "slices",
            format!("exact evolution needs at most {MAX_DENSE_QUBITS} system qubits"),
        ));
    }
    let oracle = if exact || l <= AUTO_ORACLE_MAX_QUBITS {
        info!("diagonalizing the {l}-qubit reference Hamiltonian");
        decompose(&problem)?
    } else {
        info!("system too large for an automatic reference; fidelities omitted");
        None
    };

    let (unitary, unitary_kind) = match (&problem, exact) {
        (BuiltProblem::Unitary(u), _) => (u.clone(), "matrix"),
        (_, true) => {
            let decomposition = oracle.as_ref().expect("exact mode always diagonalizes");
            (
                GateMatrix::new(decomposition.exponential(config.time))?,
                "exact",
            )
        }
        (BuiltProblem::Local(h), false) => {
            let params = evolution_params(&config)?;
            let needed = slices_for_accuracy(h, config.time, config.accuracy)?;
            if params.slices < needed {
                warn_into(
                    &mut warnings,
                    format!(
                        "{} slices is below the {needed} suggested for accuracy {}",
                        params.slices, config.accuracy
                    ),
                );
            }
            (trotter_unitary(h, &params)?, "trotter")
        }
        (BuiltProblem::Grid(g), false) => {
            (g.trotter_unitary(&evolution_params(&config)?)?, "trotter")
        }
    };

    if let Some(decomposition) = &oracle {
        let half = PI / config.time.abs();
        let outside: Vec<f64> = decomposition
            .eigenvalues
            .iter()
            .copied()
            .filter(|e| *e <= -half || *e > half)
            .collect();
        if !outside.is_empty() {
            warn_into(
                &mut warnings,
                format!(
                    "{} reference eigenvalue(s) lie outside the energy window (-{half:.6}, {half:.6}] and will alias",
                    outside.len()
                ),
            );
        }
    }

    Ok(Prepared {
        config,
        problem,
        guess,
        layout,
        unitary,
        unitary_kind,
        oracle,
        warnings,
    })
}

fn evolution_params(config: &RunConfig) -> CliResult<EvolutionParams> {
    match config.slices {
        Slices::Count(r) => Ok(EvolutionParams::new(config.time, r, config.accuracy)?),
        _ => Err(CliError::config("slices", "a slice count is required")),
    }
}

fn pe_config(prepared: &Prepared, options: &RunOptions) -> CliResult<PhaseEstimationConfig> {
    let config = &prepared.config;
    let mut pe = PhaseEstimationConfig::new(
        prepared.layout,
        prepared.unitary.clone(),
        config.time,
        config.trials,
        config.seed,
        config.power_method.into(),
    )?;
    pe.threshold = config.threshold;
    if options.corrupt_qft_sign {
        pe.readout = Readout::ForwardQft;
    }
    Ok(pe)
}

fn sample(prepared: &mut Prepared, options: &RunOptions) -> CliResult<EigenResult> {
    if options.threads == 0 {
        return Err(CliError::config("--threads", "must be at least 1"));
    }
    let pe = pe_config(prepared, options)?;
    if pe.threshold() > 1.0 {
        warn_into(
            &mut prepared.warnings,
            format!(
                "threshold {} exceeds 1; no peak can qualify",
                pe.threshold()
            ),
        );
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
        .map_err(|e| CliError::config("--threads", e))?;
    info!(
        "sampling {} trials over {} bins on {} thread(s)",
        pe.trials,
        pe.bins(),
        options.threads
    );
    Ok(pool.install(|| sample_spectrum(&prepared.guess, &pe))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    pub bin: usize,
    pub phase_radians: f64,
    pub energy: f64,
    pub probability: f64,
    pub counts: u64,
    /// Weight of the collapsed state in the reference eigenspaces whose
    /// phases lie within one bin of this peak.
    pub fidelity: Option<f64>,
    pub matched_eigenvalues: Vec<f64>,
}

/// Circular distance between two phases.
fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn peak_reports(result: &EigenResult, prepared: &Prepared) -> Vec<PeakReport> {
    let bins = prepared.layout.bins();
    let time = prepared.config.time;
    result
        .peaks
        .iter()
        .map(|peak| {
            let (fidelity, matched) = match &prepared.oracle {
                Some(d) => {
                    let tol = TAU / bins as f64 + 1e-12;
                    let ks: Vec<usize> = (0..d.dim())
                        .filter(|&k| phase_distance(-d.eigenvalues[k] * time, peak.phase) <= tol)
                        .collect();
                    let weight: f64 = ks
                        .iter()
                        .map(|&k| d.overlap(&peak.eigenvector, k).norm_sqr())
                        .sum();
                    let mut energies: Vec<f64> = ks.iter().map(|&k| d.eigenvalues[k]).collect();
                    energies.dedup_by(|a, b| (*a - *b).abs() < oracle::DEGENERACY_TOLERANCE);
                    (Some(weight), energies)
                }
                None => (None, Vec::new()),
            };
            PeakReport {
                bin: peak.bin,
                phase_radians: peak.phase,
                energy: peak.energy,
                probability: peak.probability,
                counts: result.histogram.counts[peak.bin],
                fidelity,
                matched_eigenvalues: matched,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleLevel {
    pub energy: f64,
    pub weight: f64,
}

/// Reference eigenvalues with the guess weight in each eigenspace.
fn oracle_levels(prepared: &Prepared) -> CliResult<Option<Vec<OracleLevel>>> {
    let Some(d) = &prepared.oracle else {
        return Ok(None);
    };
    Ok(Some(
        d.eigenspaces()
            .into_iter()
            .map(|range| {
                Ok(OracleLevel {
                    energy: d.eigenvalues[range.start],
                    weight: d.projector_weight(&prepared.guess, range)?,
                })
            })
            .collect::<CliResult<Vec<_>>>()?,
    ))
}

#[derive(Debug, Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    config: &'a RunConfig,
    seed: u64,
    trials: u64,
    bins: usize,
    threshold: f64,
    bin_width_energy: f64,
    unitary: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    dominant_peak: Option<&'a PeakReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    peaks: Option<&'a [PeakReport]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_spectrum: Option<Vec<OracleLevel>>,
    warnings: &'a [String],
}

/// Files written by a sampling command.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub peaks: Vec<PeakReport>,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// `solve` reports the dominant peak; `spectrum` reports every peak and the
/// reference spectrum when available.
pub fn sampling_command(
    name: &str,
    config: RunConfig,
    options: &RunOptions,
) -> CliResult<RunOutcome> {
    let all_peaks = name == "spectrum";
    let mut prepared = prepare(config, false)?;
    let result = sample(&mut prepared, options)?;
    let reports = peak_reports(&result, &prepared);
    if reports.is_empty() {
        warn_into(
            &mut prepared.warnings,
            format!("no bin reached the threshold {}", result.threshold),
        );
    }
    let config = &prepared.config;
    let record = RunRecord {
        command: name,
        config,
        seed: config.seed,
        trials: result.histogram.trials,
        bins: prepared.layout.bins(),
        threshold: result.threshold,
        bin_width_energy: bin_width_energy(config.index_qubits, config.time),
        unitary: prepared.unitary_kind,
        dominant_peak: if all_peaks { None } else { reports.first() },
        peaks: all_peaks.then_some(reports.as_slice()),
        reference_spectrum: if all_peaks {
            oracle_levels(&prepared)?
        } else {
            None
        },
        warnings: &prepared.warnings,
    };
    let json = serde_json::to_string_pretty(&record).map_err(std::io::Error::other)? + "\n";
    let csv = output::histogram_csv(&result.histogram, config.time)?;
    let files = output::write_atomic(
        &config.output_dir(),
        &[(output::HISTOGRAM_FILE, csv), (output::RESULT_FILE, json)],
    )?;

    let shown = if all_peaks {
        reports.len()
    } else {
        reports.len().min(1)
    };
    for peak in &reports[..shown] {
        println!(
            "peak bin {:>5}  phase {:.6}  energy {:+.6}  probability {:.4}{}",
            peak.bin,
            peak.phase_radians,
            peak.energy,
            peak.probability,
            peak.fidelity
                .map(|f| format!("  fidelity {f:.6}"))
                .unwrap_or_default()
        );
    }
    for file in &files {
        println!("wrote {}", file.display());
    }
    Ok(RunOutcome {
        peaks: reports,
        warnings: prepared.warnings,
        files,
    })
}

pub fn trotter_bench(config: RunConfig) -> CliResult<Vec<BenchRow>> {
    let mut probe = config.clone();
    if probe.slices == Slices::Unset {
        probe.slices = Slices::Count(1);
    }
    probe.validate()?;
    let problem = build_problem(&config.problem)?;
    let l = problem.system_qubits();
    if l > MAX_DENSE_QUBITS {
        return Err(CliError::config(
            "problem",
            format!("trotter-bench needs an exact reference, so at most {MAX_DENSE_QUBITS} system qubits"),
        ));
    }
    let time = config.time;
    let reference = match &problem {
        BuiltProblem::Local(h) => exact_unitary(h, time)?,
        BuiltProblem::Grid(_) => {
            let d = decompose(&problem)?.expect("grid problems are dense");
            GateMatrix::new(d.exponential(time))?
        }
        BuiltProblem::Unitary(_) => {
            return Err(CliError::config(
                "problem",
                "trotter-bench needs a Hamiltonian, not an explicit unitary",
            ))
        }
    };
    let sweep = config
        .slice_sweep
        .clone()
        .unwrap_or_else(|| DEFAULT_SLICE_SWEEP.to_vec());
    let mut rows = Vec::with_capacity(sweep.len());
    for &slices in &sweep {
        let params = EvolutionParams::new(time, slices, config.accuracy)?;
        let start = Instant::now();
        let approx = match &problem {
            BuiltProblem::Local(h) => trotter_unitary(h, &params)?,
            BuiltProblem::Grid(g) => g.trotter_unitary(&params)?,
            BuiltProblem::Unitary(_) => unreachable!(),
        };
        let wall = start.elapsed().as_secs_f64();
        let error = max_abs_diff(approx.matrix(), reference.matrix());
        println!("slices {slices:>6}  operator error {error:.6e}  wall {wall:.3e} s");
        rows.push(BenchRow {
            slices,
            operator_error: error,
            wall_time_seconds: wall,
        });
    }
    for pair in rows.windows(2) {
        if pair[1].operator_error > pair[0].operator_error * (1.0 + 1e-6)
            && pair[0].operator_error > 1e-9
        {
            warn!(
                "operator error grew from {} to {} slices",
                pair[0].slices, pair[1].slices
            );
        }
    }
    let files = output::write_atomic(
        &config.output_dir(),
        &[(output::TROTTER_BENCH_FILE, output::trotter_bench_csv(&rows))],
    )?;
    for file in &files {
        println!("wrote {}", file.display());
    }
    Ok(rows)
}

pub fn resources(inputs: ResourceInputs) -> CliResult<usize> {
    let estimate = resource_estimate(inputs).map_err(|e| CliError::config("resources", e))?;
    let i = estimate.inputs;
    if i.interacting_pair_in_position_space {
        println!(
            "interacting pair in position space: 2 x {} qubits",
            i.position_space_qubits_per_particle
        );
        println!(
            "remaining particles:                {} x {} qubits",
            i.particles - 2,
            i.qubits_per_particle
        );
    } else {
        println!(
            "particles:                          {} x {} qubits",
            i.particles, i.qubits_per_particle
        );
    }
    println!(
        "particle register:                  {}",
        estimate.particle_qubits
    );
    println!("index register:                     {}", i.index_qubits);
    println!("scratch:                            {}", i.scratch_qubits);
    println!("total qubits:                       {}", estimate.total);
    Ok(estimate.total)
}

/// Summary of a passing `oracle-check`.
#[derive(Debug, Clone, Copy)]
pub struct OracleReport {
    pub residual: f64,
    pub distribution_deviation: f64,
    pub collapse_deviation: f64,
}

/// Exact-mode cross-checks against the reference diagonalization: the
/// pre-measurement index distribution must match the Fejer-kernel mixture,
/// and each collapsed state must carry the predicted eigenspace weights.
pub fn oracle_check(config: RunConfig, options: &RunOptions) -> CliResult<OracleReport> {
    if matches!(
        config.problem,
        crate::config::ProblemConfig::ExplicitUnitary { .. }
    ) {
        return Err(CliError::config(
            "problem",
            "oracle-check needs a Hamiltonian problem",
        ));
    }
    if config.system_qubits() > MAX_DENSE_QUBITS {
        return Err(CliError::config(
            "problem",
            format!("oracle-check supports at most {MAX_DENSE_QUBITS} system qubits"),
        ));
    }
    let mut config = config;
    if let Slices::Count(_) = config.slices {
        info!("oracle-check always uses exact evolution; ignoring the slice count");
    }
    config.slices = Slices::Mode(SliceMode::Exact);
    let prepared = prepare(config, true)?;
    let d = prepared
        .oracle
        .as_ref()
        .expect("exact mode always diagonalizes");
    let dense = prepared
        .problem
        .dense_hamiltonian()
        .expect("Hamiltonian problems are dense at this size");

    let residual = d.max_residual(&dense);
    let scale = d.norm().max(1.0);
    if residual > 1e-9 * scale {
        return Err(CliError::OracleCheck(format!(
            "oracle-residual: max |Hv - lambda v| = {residual:.3e}"
        )));
    }
    println!("oracle-residual: ok ({residual:.3e})");

    let time = prepared.config.time;
    let m = prepared.config.index_qubits;
    let bins = prepared.layout.bins();
    let pe = pe_config(&prepared, options)?;
    let readout = exact_readout(&prepared.guess, &pe)?;
    let components = spectral_components(&prepared.guess, d, time)?;
    let predicted = analytic_distribution_of(&components, m)?;
    let mut distribution_deviation: f64 = 0.0;
    for (bin, (p, q)) in readout.probabilities.iter().zip(&predicted).enumerate() {
        let dev = (p - q).abs();
        if dev > DISTRIBUTION_TOLERANCE {
            return Err(CliError::OracleCheck(format!(
                "distribution: bin {bin} has probability {p:.12} but the kernel predicts {q:.12}"
            )));
        }
        distribution_deviation = distribution_deviation.max(dev);
    }
    println!("distribution: ok (max deviation {distribution_deviation:.3e})");

    let mut collapse_deviation: f64 = 0.0;
    let spaces = d.eigenspaces();
    for (bin, collapsed) in readout.collapsed.iter().enumerate() {
        let p = readout.probabilities[bin];
        let Some(state) = collapsed else { continue };
        if p < 1e-12 {
            continue;
        }
        let grid = bin_phase(bin, bins);
        for range in &spaces {
            let weight: f64 = range.clone().map(|k| components[k].weight).sum();
            let phase = components[range.start].phase;
            let expected = weight * fejer_kernel(phase - grid, bins) / p;
            let actual = d.projector_weight(state, range.clone())?;
            let dev = (expected - actual).abs();
            if dev > COLLAPSE_TOLERANCE {
                return Err(CliError::OracleCheck(format!(
                    "collapse: bin {bin}, eigenvalue {:.9}: weight {actual:.12} but expected {expected:.12}",
                    d.eigenvalues[range.start]
                )));
            }
            collapse_deviation = collapse_deviation.max(dev);
        }
    }
    println!("collapse: ok (max deviation {collapse_deviation:.3e})");
    Ok(OracleReport {
        residual,
        distribution_deviation,
        collapse_deviation,
    })
}
