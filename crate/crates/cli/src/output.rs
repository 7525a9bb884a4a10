//! Result files. Everything is rendered in memory first, then each file is
//! written to a temporary sibling and renamed into place, so a failed run
//! never leaves partial output behind.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qpe_core::phase_estimation::{bin_phase, phase_to_energy};
use qpe_core::Histogram;

use crate::error::CliResult;

pub const HISTOGRAM_HEADER: &str = "bin,phase_radians,energy,probability,counts";
pub const TROTTER_BENCH_HEADER: &str = "slices,operator_error,wall_time_seconds";

pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const RESULT_FILE: &str = "result.json";
pub const TROTTER_BENCH_FILE: &str = "trotter_bench.csv";

/// Seventeen significant digits, locale independent.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn histogram_csv(histogram: &Histogram, time: f64) -> CliResult<String> {
    let bins = histogram.counts.len();
    let mut out = String::with_capacity(bins * 80);
    out.push_str(HISTOGRAM_HEADER);
    out.push('\n');
    for (bin, &count) in histogram.counts.iter().enumerate() {
        let phase = bin_phase(bin, bins);
        let energy = phase_to_energy(phase, time)?;
        let probability = count as f64 / histogram.trials as f64;
        let _ = writeln!(
            out,
            "{bin},{},{},{},{count}",
            real(phase),
            real(energy),
            real(probability)
        );
    }
    Ok(out)
}

pub struct BenchRow {
    pub slices: usize,
    pub operator_error: f64,
    pub wall_time_seconds: f64,
}

pub fn trotter_bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(TROTTER_BENCH_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            row.slices,
            real(row.operator_error),
            real(row.wall_time_seconds)
        );
    }
    out
}

/// Writes all `(file name, contents)` pairs into `dir`; nothing becomes
/// visible until every temporary file has been written.
pub fn write_atomic(dir: &Path, files: &[(&str, String)]) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        if let Err(e) = fs::write(&tmp, contents) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(e.into());
        }
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, target) in staged {
        fs::rename(&tmp, &target)?;
        written.push(target);
    }
    Ok(written)
}
