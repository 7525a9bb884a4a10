//! JSON run configuration. Unknown keys are rejected.
//!
//! ```json
//! {
//!   "problem": { "kind": "tfim", "sites": 3, "coupling": 1.0, "field": 1.0 },
//!   "guess": { "kind": "plus" },
//!   "index_qubits": 7,
//!   "time": 0.8,
//!   "slices": "exact",
//!   "trials": 5000,
//!   "seed": 7,
//!   "power_method": "binary_power",
//!   "output": "out"
//! }
//! ```
//!
//! Complex matrices and amplitude lists are arrays of `[re, im]` pairs,
//! matrices in row-major order.

use std::path::{Path, PathBuf};

use qpe_core::hamiltonian::MAX_TERM_QUBITS;
use qpe_core::oracle::MAX_DENSE_QUBITS;
use qpe_core::problems::{
    build_transverse_ising, gaussian_guess, product_state_guess, GridParticle, Potential,
};
use qpe_core::statevector::MAX_QUBITS;
use qpe_core::{
    CMatrix, Complex64, GateMatrix, HamiltonianSum, LocalTerm, PowerMethod, StateVector,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guess: Option<GuessConfig>,
    pub index_qubits: usize,
    /// Defaults to 1 for the flag loop and 0 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_qubits: Option<usize>,
    pub time: f64,
    #[serde(default, skip_serializing_if = "Slices::is_unset")]
    pub slices: Slices,
    #[serde(default = "default_accuracy")]
    pub accuracy: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub power_method: PowerMethodConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Slice counts for `trotter-bench`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice_sweep: Option<Vec<usize>>,
}

fn default_accuracy() -> f64 {
    1e-3
}

fn default_trials() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Tfim {
        sites: usize,
        coupling: f64,
        field: f64,
    },
    Grid {
        qubits: usize,
        #[serde(default = "default_mass")]
        mass: f64,
        potential: PotentialConfig,
    },
    ExplicitTerms {
        system_qubits: usize,
        terms: Vec<TermConfig>,
    },
    ExplicitUnitary {
        system_qubits: usize,
        matrix: Vec<[f64; 2]>,
    },
}

fn default_mass() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialConfig {
    /// `zero`, `constant:c`, or `harmonic:omega,x0`.
    Named(String),
    Sampled(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub support: Vec<usize>,
    pub matrix: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GuessConfig {
    Basis {
        index: usize,
    },
    /// Every system qubit in `(|0> + |1>)/sqrt 2`.
    Plus,
    Product {
        qubits: Vec<[[f64; 2]; 2]>,
    },
    Amplitudes {
        values: Vec<[f64; 2]>,
    },
    Gaussian {
        center: f64,
        width: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Slices {
    Count(usize),
    Mode(SliceMode),
    #[default]
    #[serde(skip)]
    Unset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceMode {
    Exact,
}

impl Slices {
    pub fn is_unset(&self) -> bool {
        *self == Slices::Unset
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        if text == "exact" {
            return Ok(Slices::Mode(SliceMode::Exact));
        }
        text.parse::<usize>()
            .map(Slices::Count)
            .map_err(|_| format!("expected a positive integer or `exact`, got `{text}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMethodConfig {
    FlagLoop,
    #[default]
    BinaryPower,
}

impl From<PowerMethodConfig> for PowerMethod {
    fn from(p: PowerMethodConfig) -> Self {
        match p {
            PowerMethodConfig::FlagLoop => PowerMethod::FlagLoop,
            PowerMethodConfig::BinaryPower => PowerMethod::BinaryPower,
        }
    }
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub index_qubits: Option<usize>,
    pub time: Option<f64>,
    pub slices: Option<Slices>,
    pub trials: Option<usize>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(v) = overrides.seed {
            self.seed = v;
        }
        if let Some(v) = overrides.index_qubits {
            self.index_qubits = v;
        }
        if let Some(v) = overrides.time {
            self.time = v;
        }
        if let Some(v) = overrides.slices {
            self.slices = v;
        }
        if let Some(v) = overrides.trials {
            self.trials = v;
        }
        if let Some(v) = overrides.threshold {
            self.threshold = Some(v);
        }
        if let Some(v) = &overrides.out {
            self.output = Some(v.clone());
        }
    }

    pub fn work_qubits(&self) -> usize {
        self.work_qubits.unwrap_or(match self.power_method {
            PowerMethodConfig::FlagLoop => 1,
            PowerMethodConfig::BinaryPower => 0,
        })
    }

    pub fn system_qubits(&self) -> usize {
        match &self.problem {
            ProblemConfig::Tfim { sites, .. } => *sites,
            ProblemConfig::Grid { qubits, .. } => *qubits,
            ProblemConfig::ExplicitTerms { system_qubits, .. }
            | ProblemConfig::ExplicitUnitary { system_qubits, .. } => *system_qubits,
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Checks everything that does not require building the problem.
    pub fn validate(&self) -> CliResult<()> {
        if self.index_qubits == 0 {
            return Err(CliError::config("index_qubits", "must be at least 1"));
        }
        let total = self.index_qubits + self.system_qubits() + self.work_qubits();
        if total > MAX_QUBITS {
            return Err(CliError::config(
                "index_qubits",
                format!(
                    "index + system + work = {total} qubits exceeds the qubit cap of {MAX_QUBITS}"
                ),
            ));
        }
        if self.time == 0.0 || !self.time.is_finite() {
            return Err(CliError::config("time", "must be finite and nonzero"));
        }
        if self.trials == 0 {
            return Err(CliError::config("trials", "must be at least 1"));
        }
        if self.accuracy.is_nan() || self.accuracy <= 0.0 {
            return Err(CliError::config("accuracy", "must be positive"));
        }
        if let Some(t) = self.threshold {
            if t.is_nan() || t < 0.0 {
                return Err(CliError::config("threshold", "must be non-negative"));
            }
        }
        match self.slices {
            Slices::Count(0) => return Err(CliError::config("slices", "must be at least 1")),
            Slices::Mode(SliceMode::Exact) if self.system_qubits() > MAX_DENSE_QUBITS => {
                return Err(CliError::config(
                    "slices",
                    format!("`exact` needs at most {MAX_DENSE_QUBITS} system qubits"),
                ))
            }
            Slices::Unset if !matches!(self.problem, ProblemConfig::ExplicitUnitary { .. }) => {
                return Err(CliError::config("slices", "required (a count or `exact`)"))
            }
            _ => {}
        }
        if self.power_method == PowerMethodConfig::FlagLoop && self.work_qubits() == 0 {
            return Err(CliError::config(
                "work_qubits",
                "the flag loop needs at least one work qubit",
            ));
        }
        if let Some(sweep) = &self.slice_sweep {
            if sweep.is_empty() || sweep.contains(&0) {
                return Err(CliError::config(
                    "slice_sweep",
                    "must be a non-empty list of positive counts",
                ));
            }
        }
        Ok(())
    }
}

/// A problem after parsing, ready to produce unitaries and references.
#[derive(Debug, Clone)]
pub enum BuiltProblem {
    Local(HamiltonianSum),
    Grid(GridParticle),
    Unitary(GateMatrix),
}

impl BuiltProblem {
    pub fn system_qubits(&self) -> usize {
        match self {
            BuiltProblem::Local(h) => h.num_system_qubits(),
            BuiltProblem::Grid(g) => g.qubits(),
            BuiltProblem::Unitary(u) => u.arity(),
        }
    }

    /// Dense Hamiltonian when one exists and fits the reference solver.
    pub fn dense_hamiltonian(&self) -> Option<CMatrix> {
        if self.system_qubits() > MAX_DENSE_QUBITS {
            return None;
        }
        match self {
            BuiltProblem::Local(h) => qpe_core::oracle::assemble_dense(h).ok(),
            BuiltProblem::Grid(g) => Some(g.dense_hamiltonian()),
            BuiltProblem::Unitary(_) => None,
        }
    }
}

fn complex_list(key: &str, values: &[[f64; 2]]) -> CliResult<Vec<Complex64>> {
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(CliError::config(key, "entries must be finite"));
    }
    Ok(values
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect())
}

fn square_matrix(key: &str, values: &[[f64; 2]], qubits: usize) -> CliResult<CMatrix> {
    let dim = 1usize << qubits;
    if values.len() != dim * dim {
        return Err(CliError::config(
            key,
            format!(
                "expected {} entries for {qubits} qubits, got {}",
                dim * dim,
                values.len()
            ),
        ));
    }
    Ok(CMatrix::from_row_slice(
        dim,
        dim,
        &complex_list(key, values)?,
    ))
}

pub fn build_problem(config: &ProblemConfig) -> CliResult<BuiltProblem> {
    let err = |key: &'static str| move |e: qpe_core::QpeError| CliError::config(key, e);
    match config {
        ProblemConfig::Tfim {
            sites,
            coupling,
            field,
        } => Ok(BuiltProblem::Local(
            build_transverse_ising(*sites, *coupling, *field).map_err(err("problem.sites"))?,
        )),
        ProblemConfig::Grid {
            qubits,
            mass,
            potential,
        } => {
            let potential = match potential {
                PotentialConfig::Named(name) => {
                    Potential::parse(name).map_err(err("problem.potential"))?
                }
                PotentialConfig::Sampled(values) => Potential::Sampled(values.clone()),
            };
            Ok(BuiltProblem::Grid(
                GridParticle::new(*qubits, &potential, *mass).map_err(err("problem"))?,
            ))
        }
        ProblemConfig::ExplicitTerms {
            system_qubits,
            terms,
        } => {
            let built = terms
                .iter()
                .enumerate()
                .map(|(i, term)| {
                    let key = format!("problem.terms[{i}]");
                    let k = term.support.len();
                    if k == 0 || k > MAX_TERM_QUBITS {
                        return Err(CliError::config(
                            &key,
                            format!("support size must be 1..={MAX_TERM_QUBITS}"),
                        ));
                    }
                    let matrix = square_matrix(&format!("{key}.matrix"), &term.matrix, k)?;
                    LocalTerm::new(term.support.clone(), matrix)
                        .map_err(|e| CliError::config(&key, e))
                })
                .collect::<CliResult<Vec<_>>>()?;
            Ok(BuiltProblem::Local(
                HamiltonianSum::new(*system_qubits, built).map_err(err("problem.terms"))?,
            ))
        }
        ProblemConfig::ExplicitUnitary {
            system_qubits,
            matrix,
        } => {
            if *system_qubits == 0 || *system_qubits > MAX_DENSE_QUBITS {
                return Err(CliError::config(
                    "problem.system_qubits",
                    format!("must be 1..={MAX_DENSE_QUBITS}"),
                ));
            }
            let m = square_matrix("problem.matrix", matrix, *system_qubits)?;
            Ok(BuiltProblem::Unitary(
                GateMatrix::new(m).map_err(err("problem.matrix"))?,
            ))
        }
    }
}

/// Initial system state; defaults depend on the problem kind.
pub fn build_guess(guess: Option<&GuessConfig>, problem: &BuiltProblem) -> CliResult<StateVector> {
    let l = problem.system_qubits();
    let err = |e: qpe_core::QpeError| CliError::config("guess", e);
    let default = match problem {
        BuiltProblem::Local(_) => GuessConfig::Plus,
        BuiltProblem::Grid(g) => GuessConfig::Gaussian {
            center: g.points() as f64 / 2.0,
            width: 1.0,
        },
        BuiltProblem::Unitary(_) => GuessConfig::Basis { index: 0 },
    };
    match guess.unwrap_or(&default) {
        GuessConfig::Basis { index } => StateVector::new_basis_state(l, *index).map_err(err),
        GuessConfig::Plus => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let plus = (Complex64::new(s, 0.0), Complex64::new(s, 0.0));
            product_state_guess(&vec![plus; l]).map_err(err)
        }
        GuessConfig::Product { qubits } => {
            if qubits.len() != l {
                return Err(CliError::config(
                    "guess.qubits",
                    format!("expected {l} single-qubit states, got {}", qubits.len()),
                ));
            }
            let pairs = qubits
                .iter()
                .map(|[a, b]| (Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1])))
                .collect::<Vec<_>>();
            product_state_guess(&pairs).map_err(err)
        }
        GuessConfig::Amplitudes { values } => {
            StateVector::from_amplitudes(l, complex_list("guess.values", values)?).map_err(err)
        }
        GuessConfig::Gaussian { center, width } => gaussian_guess(l, *center, *width).map_err(err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TFIM: &str = r#"{
        "problem": {"kind": "tfim", "sites": 3, "coupling": 1.0, "field": 1.0},
        "index_qubits": 5, "time": 0.8, "slices": "exact", "trials": 10, "seed": 1
    }"#;

    #[test]
    fn parses_and_validates() {
        let config = RunConfig::from_json(TFIM).unwrap();
        config.validate().unwrap();
        assert_eq!(config.slices, Slices::Mode(SliceMode::Exact));
        assert_eq!(config.work_qubits(), 0);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = TFIM.replace("\"seed\"", "\"sed\"");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("sed"), "{err}");
        let text = TFIM.replace("\"field\": 1.0", "\"field\": 1.0, \"feild\": 2");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn qubit_cap_is_a_config_error() {
        let mut config = RunConfig::from_json(TFIM).unwrap();
        config.index_qubits = 24;
        let err = config.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("qubit cap"));
    }

    #[test]
    fn zero_time_rejected() {
        let mut config = RunConfig::from_json(TFIM).unwrap();
        config.apply(&Overrides {
            time: Some(0.0),
            ..Default::default()
        });
        assert!(config
            .validate()
            .unwrap_err()
            .to_string()
            .contains("`time`"));
    }

    #[test]
    fn slices_parse() {
        assert_eq!(
            Slices::parse("exact").unwrap(),
            Slices::Mode(SliceMode::Exact)
        );
        assert_eq!(Slices::parse("16").unwrap(), Slices::Count(16));
        assert!(Slices::parse("many").is_err());
        let config = RunConfig::from_json(&TFIM.replace("\"exact\"", "32")).unwrap();
        assert_eq!(config.slices, Slices::Count(32));
    }

    #[test]
    fn explicit_terms_roundtrip() {
        let text = r#"{
            "problem": {"kind": "explicit_terms", "system_qubits": 1,
                        "terms": [{"support": [0], "matrix": [[1,0],[0,0],[0,0],[-1,0]]}]},
            "index_qubits": 3, "time": 1.0, "slices": 1
        }"#;
        let config = RunConfig::from_json(text).unwrap();
        let built = build_problem(&config.problem).unwrap();
        assert_eq!(built.system_qubits(), 1);
        let bad = text.replace("[-1,0]]", "[-1,0],[0,0]]");
        let config = RunConfig::from_json(&bad).unwrap();
        let err = build_problem(&config.problem).unwrap_err();
        assert!(err.to_string().contains("problem.terms[0].matrix"));
    }
}
