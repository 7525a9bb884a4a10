//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use qpe_core::hamiltonian::exact_unitary;
use qpe_core::oracle::{assemble_dense, eigendecompose, spectral_components};
use qpe_core::phase_estimation::{
    analytic_distribution_of, apply_conditional_powers_binary, apply_conditional_powers_flag_loop,
    eigenvector_fidelity_with, exact_readout, prepare_index_superposition, sample_spectrum,
};
use qpe_core::problems::{GridParticle, Potential};
use qpe_core::{
    CMatrix, Complex64, GateMatrix, HamiltonianSum, LocalTerm, PhaseEstimationConfig, PowerMethod,
    RegisterLayout, StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

const BIN: &str = env!("CARGO_BIN_EXE_spectral-qpe");

fn main() {
    let criteria: [Criterion; 10] = [
        ("resource arithmetic", resource_arithmetic, Some(secs(1))),
        ("distribution theorem", distribution_theorem, Some(secs(30))),
        ("sampling law", sampling_law, Some(secs(10))),
        ("collapse correctness", collapse_correctness, None),
        (
            "trotter first-order scaling",
            trotter_scaling,
            Some(secs(5)),
        ),
        ("resolution law", resolution_law, None),
        ("end-to-end tfim", end_to_end_tfim, Some(secs(60))),
        ("power-method equivalence", power_method_equivalence, None),
        ("determinism", determinism, None),
        ("grid problem", grid_problem, None),
    ];
    let mut failures = 0;
    for (n, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > *b => Err(format!(
                "took {:.2} s, budget {:.0} s",
                elapsed.as_secs_f64(),
                b.as_secs_f64()
            )),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {:>2} {name}: {detail} ({:.2} s)",
                n + 1,
                elapsed.as_secs_f64()
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "FAIL criterion {:>2} {name}: {detail} ({:.2} s)",
                    n + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> Result<Output, String> {
    Command::new(BIN)
        .args(args)
        .output()
        .map_err(|e| format!("could not run {BIN}: {e}"))
}

fn cli_ok(args: &[&str]) -> Result<String, String> {
    let out = cli(args)?;
    ensure(out.status.success(), || {
        format!(
            "`{}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).expect("write config");
    path
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temp dir")
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(rng: &mut ChaCha8Rng, qubits: usize) -> StateVector {
    let mut amps: Vec<Complex64> = (0..1usize << qubits)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(qubits, amps).unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        c(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    });
    (&a + a.adjoint()).map(|z| z * 0.5)
}

/// Random local Hamiltonian on `l` qubits: one term per qubit plus one
/// random two-qubit term.
fn random_local_hamiltonian(rng: &mut ChaCha8Rng, l: usize) -> HamiltonianSum {
    let mut terms: Vec<LocalTerm> = (0..l)
        .map(|q| LocalTerm::new(vec![q], random_hermitian(rng, 2)).unwrap())
        .collect();
    if l >= 2 {
        let a = rng.random_range(0..l);
        let b = (a + rng.random_range(1..l)) % l;
        terms.push(LocalTerm::new(vec![a, b], random_hermitian(rng, 4)).unwrap());
    }
    HamiltonianSum::new(l, terms).unwrap()
}

fn circular(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn total_qubits(stdout: &str) -> Result<usize, String> {
    stdout
        .lines()
        .find_map(|line| line.strip_prefix("total qubits:"))
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| format!("no total in output:\n{stdout}"))
}

fn resource_arithmetic() -> Outcome {
    let orbital = total_qubits(&cli_ok(&[
        "resources",
        "--particles",
        "5",
        "--qubits-per-particle",
        "10",
        "--index-qubits",
        "7",
        "--scratch-qubits",
        "3",
    ])?)?;
    let pair = total_qubits(&cli_ok(&[
        "resources",
        "--particles",
        "5",
        "--qubits-per-particle",
        "10",
        "--index-qubits",
        "7",
        "--scratch-qubits",
        "3",
        "--position-qubits-per-particle",
        "30",
        "--interacting-pair",
    ])?)?;
    ensure(orbital == 60 && pair == 100, || {
        format!("got {orbital} and {pair}, expected 60 and 100")
    })?;
    Ok(format!(
        "orbital basis {orbital}, position-space pair {pair}"
    ))
}

fn distribution_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let instances = 24;
    let mut worst: f64 = 0.0;
    for n in 0..instances {
        let l = 1 + n % 4;
        let m = 2 + n % 5;
        let h = random_local_hamiltonian(&mut rng, l);
        let t = 0.3 + 2.0 * rng.random::<f64>();
        let va = random_state(&mut rng, l);
        let decomposition = eigendecompose(&assemble_dense(&h).unwrap()).unwrap();
        let unitary = exact_unitary(&h, t).unwrap();
        let layout = RegisterLayout::new(m, l, 0).unwrap();
        let config =
            PhaseEstimationConfig::new(layout, unitary, t, 1, 0, PowerMethod::BinaryPower).unwrap();
        let readout = exact_readout(&va, &config).map_err(|e| e.to_string())?;
        let components = spectral_components(&va, &decomposition, t).unwrap();
        let predicted = analytic_distribution_of(&components, m).unwrap();
        for (p, q) in readout.probabilities.iter().zip(&predicted) {
            worst = worst.max((p - q).abs());
        }
    }
    ensure(worst <= 1e-10, || {
        format!("max per-bin deviation {worst:.3e}")
    })?;
    Ok(format!(
        "{instances} instances, max per-bin deviation {worst:.2e}"
    ))
}

fn sampling_law() -> Outcome {
    let dir = tempdir();
    let trials = 4000.0_f64;
    let config = write_config(
        dir.path(),
        "two_level.json",
        &format!(
            r#"{{
                "problem": {{"kind": "explicit_unitary", "system_qubits": 1,
                    "matrix": [[{}, {}], [0, 0], [0, 0], [{}, {}]]}},
                "guess": {{"kind": "amplitudes", "values": [[0.5, 0], [{}, 0]]}},
                "index_qubits": 4, "time": 1.0, "trials": 4000, "seed": 11
            }}"#,
            (TAU * 3.0 / 16.0).cos(),
            (TAU * 3.0 / 16.0).sin(),
            (TAU * 11.0 / 16.0).cos(),
            (TAU * 11.0 / 16.0).sin(),
            0.75f64.sqrt()
        ),
    );
    let out = dir.path().join("out");
    cli_ok(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])?;
    let record = read_json(&out.join("result.json"))?;
    let peaks = record["peaks"].as_array().ok_or("no peaks")?;
    ensure(peaks.len() == 2, || {
        format!("expected 2 peaks, got {}", peaks.len())
    })?;
    let mut detail = Vec::new();
    for (bin, weight) in [(3u64, 0.25), (11u64, 0.75)] {
        let peak = peaks
            .iter()
            .find(|p| p["bin"].as_u64() == Some(bin))
            .ok_or_else(|| format!("no peak at bin {bin}"))?;
        let observed = peak["probability"].as_f64().unwrap();
        let sigma = (weight * (1.0 - weight) / trials).sqrt();
        ensure((observed - weight).abs() <= 3.0 * sigma, || {
            format!(
                "bin {bin}: {observed} vs {weight} (3 sigma = {:.4})",
                3.0 * sigma
            )
        })?;
        detail.push(format!("{observed:.4} vs {weight}"));
    }
    Ok(detail.join(", "))
}

fn collapse_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (l, m, t) = (3, 5, 1.0);
    let bins = 1usize << m;
    let mut worst: f64 = 1.0;
    let mut measured = 0;
    for _ in 0..3 {
        let basis = eigendecompose(&random_hermitian(&mut rng, 1 << l))
            .unwrap()
            .eigenvectors;
        let mut chosen: Vec<usize> = Vec::new();
        while chosen.len() < 1 << l {
            let j = rng.random_range(1..bins);
            if !chosen.contains(&j) {
                chosen.push(j);
            }
        }
        // E = -2 pi j / (M t), wrapped into the window so phase j is on-grid.
        let energies: Vec<f64> = chosen
            .iter()
            .map(|&j| {
                let e = -TAU * j as f64 / (bins as f64 * t);
                if e <= -std::f64::consts::PI / t {
                    e + TAU / t
                } else {
                    e
                }
            })
            .collect();
        let diag = CMatrix::from_fn(1 << l, 1 << l, |r, k| {
            if r == k {
                c(energies[r], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let h_matrix = &basis * diag * basis.adjoint();
        let h = HamiltonianSum::new(
            l,
            vec![LocalTerm::new(vec![0, 1, 2], h_matrix.clone()).unwrap()],
        )
        .unwrap();
        let decomposition = eigendecompose(&h_matrix).unwrap();
        let layout = RegisterLayout::new(m, l, 0).unwrap();
        let config = PhaseEstimationConfig::new(
            layout,
            exact_unitary(&h, t).unwrap(),
            t,
            100,
            rng.random(),
            PowerMethod::BinaryPower,
        )
        .unwrap();
        let result =
            sample_spectrum(&random_state(&mut rng, l), &config).map_err(|e| e.to_string())?;
        for sample in &result.samples {
            let fidelity = eigenvector_fidelity_with(
                &sample.collapsed_state,
                &decomposition,
                sample.energy,
                1e-9,
            )
            .map_err(|e| e.to_string())?;
            worst = worst.min(fidelity);
            measured += 1;
        }
    }
    ensure(worst >= 1.0 - 1e-9, || format!("worst fidelity {worst}"))?;
    Ok(format!(
        "{measured} collapsed states, worst fidelity 1 - {:.1e}",
        1.0 - worst
    ))
}

fn bench_errors(dir: &Path, name: &str, body: &str) -> Result<Vec<f64>, String> {
    let config = write_config(dir, name, body);
    let out = dir.join(format!("{name}.out"));
    cli_ok(&[
        "trotter-bench",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])?;
    let csv = fs::read_to_string(out.join("trotter_bench.csv")).map_err(|e| e.to_string())?;
    Ok(csv
        .lines()
        .skip(1)
        .map(|row| row.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .collect())
}

fn trotter_scaling() -> Outcome {
    let dir = tempdir();
    let errors = bench_errors(
        dir.path(),
        "x_plus_z.json",
        r#"{
            "problem": {"kind": "explicit_terms", "system_qubits": 1, "terms": [
                {"support": [0], "matrix": [[0,0],[1,0],[1,0],[0,0]]},
                {"support": [0], "matrix": [[1,0],[0,0],[0,0],[-1,0]]}]},
            "index_qubits": 4, "time": 1.0, "slice_sweep": [16, 32, 64, 128]
        }"#,
    )?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    ensure(
        ratios.len() == 3 && ratios.iter().all(|r| (0.4..=0.6).contains(r)),
        || format!("ratios {ratios:?}"),
    )?;
    let commuting = bench_errors(
        dir.path(),
        "commuting.json",
        r#"{
            "problem": {"kind": "explicit_terms", "system_qubits": 2, "terms": [
                {"support": [0], "matrix": [[1,0],[0,0],[0,0],[-1,0]]},
                {"support": [0, 1], "matrix": [[1,0],[0,0],[0,0],[0,0], [0,0],[-1,0],[0,0],[0,0],
                                               [0,0],[0,0],[-1,0],[0,0], [0,0],[0,0],[0,0],[1,0]]},
                {"support": [1], "matrix": [[0.5,0],[0,0],[0,0],[-0.5,0]]}]},
            "index_qubits": 4, "time": 1.0, "slice_sweep": [1]
        }"#,
    )?;
    ensure(commuting[0] <= 1e-9, || {
        format!("commuting error {}", commuting[0])
    })?;
    Ok(format!(
        "ratios {}, commuting error {:.1e}",
        ratios
            .iter()
            .map(|r| format!("{r:.4}"))
            .collect::<Vec<_>>()
            .join("/"),
        commuting[0]
    ))
}

fn resolution_law() -> Outcome {
    let omega = 2.0_f64;
    let unitary = GateMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, omega),
        ],
    ))
    .unwrap();
    let va = StateVector::new_basis_state(1, 1).unwrap();
    let mut detail = Vec::new();
    for m in 4..=8 {
        let bins = 1usize << m;
        let layout = RegisterLayout::new(m, 1, 0).unwrap();
        let config = PhaseEstimationConfig::new(
            layout,
            unitary.clone(),
            1.0,
            1000,
            m as u64,
            PowerMethod::BinaryPower,
        )
        .unwrap();
        let result = sample_spectrum(&va, &config).map_err(|e| e.to_string())?;
        let peak = result
            .peaks
            .first()
            .ok_or_else(|| format!("m={m}: no peak"))?;
        let error = circular(peak.phase, omega);
        ensure(error <= TAU / bins as f64, || {
            format!(
                "m={m}: phase error {error:.4} exceeds {:.4}",
                TAU / bins as f64
            )
        })?;
        detail.push(format!("m={m}:{error:.4}"));
    }
    Ok(detail.join(" "))
}

const TFIM3: &str = r#"{
    "problem": {"kind": "tfim", "sites": 3, "coupling": 1.0, "field": 1.0},
    "guess": {"kind": "plus"},
    "index_qubits": 7, "time": 0.8, "slices": "exact", "trials": 5000, "seed": 7
}"#;

fn end_to_end_tfim() -> Outcome {
    let dir = tempdir();
    let config = write_config(dir.path(), "tfim3.json", TFIM3);
    let out = dir.path().join("out");
    cli_ok(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])?;
    let record = read_json(&out.join("result.json"))?;

    let h = qpe_core::problems::build_transverse_ising(3, 1.0, 1.0).unwrap();
    let decomposition = eigendecompose(&assemble_dense(&h).unwrap()).unwrap();
    let ground = decomposition.eigenvalues[0];
    let t = 0.8;
    let width = TAU / (128.0 * t);
    let peaks = record["peaks"].as_array().ok_or("no peaks")?;
    let energies: Vec<f64> = peaks
        .iter()
        .map(|p| p["energy"].as_f64().unwrap())
        .collect();
    let dominant = *energies.first().ok_or("no peaks detected")?;
    ensure((dominant - ground).abs() <= width, || {
        format!("dominant {dominant} vs ground {ground}, bin width {width}")
    })?;

    let plus = StateVector::from_amplitudes(3, vec![c(8f64.sqrt().recip(), 0.0); 8]).unwrap();
    let mut covered = 0;
    for range in decomposition.eigenspaces() {
        let energy = decomposition.eigenvalues[range.start];
        let weight = decomposition.projector_weight(&plus, range).unwrap();
        if weight > 0.05 {
            ensure(energies.iter().any(|e| (e - energy).abs() <= width), || {
                format!("eigenvalue {energy} (overlap {weight:.3}) not among peaks {energies:?}")
            })?;
            covered += 1;
        }
    }
    Ok(format!(
        "dominant {dominant:.5} vs ground {ground:.5} (bin width {width:.4}); {covered} overlapping levels covered"
    ))
}

fn power_method_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let instances = 12;
    for n in 0..instances {
        let m = 1 + n % 4;
        let l = 1 + n % 3;
        let h = random_local_hamiltonian(&mut rng, l);
        let unitary = exact_unitary(&h, 0.5 + rng.random::<f64>()).unwrap();
        let layout = RegisterLayout::new(m, l, 1).unwrap();
        let start = StateVector::new_basis_state(m, 0)
            .unwrap()
            .tensor(&random_state(&mut rng, l))
            .unwrap()
            .tensor(&StateVector::new_basis_state(1, 0).unwrap())
            .unwrap();
        let mut flag = start.clone();
        prepare_index_superposition(&mut flag, &layout).unwrap();
        let mut binary = flag.clone();
        let config =
            PhaseEstimationConfig::new(layout, unitary, 1.0, 1, 0, PowerMethod::FlagLoop).unwrap();
        apply_conditional_powers_flag_loop(&mut flag, &config).map_err(|e| e.to_string())?;
        apply_conditional_powers_binary(&mut binary, &config).map_err(|e| e.to_string())?;
        for (a, b) in flag.amplitudes().iter().zip(binary.amplitudes()) {
            worst = worst.max((a - b).norm());
        }
    }
    ensure(worst <= 1e-10, || {
        format!("max amplitude difference {worst:.3e}")
    })?;
    Ok(format!(
        "{instances} instances, max amplitude difference {worst:.2e}"
    ))
}

fn determinism() -> Outcome {
    let dir = tempdir();
    let config = write_config(dir.path(), "tfim3.json", &TFIM3.replace("5000", "1500"));
    let out = dir.path().join("out");
    let files = ["histogram.csv", "result.json"];
    let run = |threads: &str| -> Result<Vec<Vec<u8>>, String> {
        cli_ok(&[
            "solve",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "7",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ])?;
        files
            .iter()
            .map(|f| fs::read(out.join(f)).map_err(|e| e.to_string()))
            .collect()
    };
    let first = run("1")?;
    let second = run("1")?;
    let threaded = run("4")?;
    ensure(first == second, || "two identical runs differ".into())?;
    ensure(first == threaded, || {
        "--threads 1 and --threads 4 differ".into()
    })?;
    Ok(format!(
        "{} and {} identical across repeat and 1 vs 4 threads",
        files[0], files[1]
    ))
}

fn grid_problem() -> Outcome {
    let dir = tempdir();
    let (omega, t, m) = (0.1_f64, 4.0, 6);
    let config = write_config(
        dir.path(),
        "harmonic.json",
        &format!(
            r#"{{
                "problem": {{"kind": "grid", "qubits": 6, "potential": "harmonic:{omega},32"}},
                "guess": {{"kind": "gaussian", "center": 32.0, "width": {}}},
                "index_qubits": {m}, "time": {t}, "slices": 32, "trials": 2000, "seed": 17
            }}"#,
            (1.0 / (2.0 * omega)).sqrt()
        ),
    );
    let out = dir.path().join("out");
    cli_ok(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])?;
    let record = read_json(&out.join("result.json"))?;
    let lowest = record["peaks"]
        .as_array()
        .ok_or("no peaks")?
        .iter()
        .map(|p| p["energy"].as_f64().unwrap())
        .min_by(f64::total_cmp)
        .ok_or("no peaks detected")?;
    let grid = GridParticle::new(
        6,
        &Potential::Harmonic {
            omega,
            center: 32.0,
        },
        1.0,
    )
    .unwrap();
    let reference = eigendecompose(&grid.dense_hamiltonian())
        .unwrap()
        .eigenvalues[0];
    let width = TAU / ((1usize << m) as f64 * t);
    ensure((lowest - reference).abs() <= width, || {
        format!("lowest peak {lowest} vs reference {reference}, bin width {width}")
    })?;
    Ok(format!(
        "lowest peak {lowest:.5} vs reference {reference:.5} (bin width {width:.4})"
    ))
}
