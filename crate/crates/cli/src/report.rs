//! Gate-count and depth table across interleave strategies.

use anyhow::Result;
use serde_json::json;
use std::path::Path;

use envspec::fft::{compile_fft, interleave_circuit, interleave_permutation, FftPlan, InterleaveStrategy};

use crate::manifest::{manifest_path, RunManifest};

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub modes: usize,
    pub radix: usize,
    pub strategy: InterleaveStrategy,
    pub interleave_count: usize,
    pub interleave_depth: usize,
    pub fft_count: usize,
    pub fft_depth: usize,
}

/// Every valid (modes, radix, strategy) with `radix < modes ≤ max_modes`.
pub fn rows(max_modes: usize) -> Result<Vec<Row>> {
    let mut out = vec![];
    for radix in [2, 3] {
        let mut modes = radix * radix;
        while modes <= max_modes {
            for strategy in InterleaveStrategy::ALL {
                let Ok(plan) = FftPlan::new(modes, radix, strategy) else { continue };
                let inter = interleave_circuit(&interleave_permutation(modes, radix)?, strategy)?;
                let fft = compile_fft(&plan)?;
                out.push(Row {
                    modes,
                    radix,
                    strategy,
                    interleave_count: inter.two_qubit_count(),
                    interleave_depth: inter.two_qubit_depth(),
                    fft_count: fft.two_qubit_count(),
                    fft_depth: fft.two_qubit_depth(),
                });
            }
            modes *= radix;
        }
    }
    Ok(out)
}

pub fn run(max_modes: usize, out: &Path, manifest: Option<&Path>) -> Result<()> {
    let rows = rows(max_modes)?;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["modes", "radix", "strategy", "interleave_two_qubit", "interleave_depth", "fft_two_qubit", "fft_depth"])?;
    println!("{:>5} {:>5} {:<16} {:>10} {:>10} {:>10} {:>10}", "modes", "radix", "strategy", "il_count", "il_depth", "fft_count", "fft_depth");
    for r in &rows {
        w.write_record([
            r.modes.to_string(),
            r.radix.to_string(),
            r.strategy.name().to_string(),
            r.interleave_count.to_string(),
            r.interleave_depth.to_string(),
            r.fft_count.to_string(),
            r.fft_depth.to_string(),
        ])?;
        println!(
            "{:>5} {:>5} {:<16} {:>10} {:>10} {:>10} {:>10}",
            r.modes,
            r.radix,
            r.strategy.name(),
            r.interleave_count,
            r.interleave_depth,
            r.fft_count,
            r.fft_depth
        );
    }
    let mut m = RunManifest::new("report", json!({ "max_modes": max_modes }), None);
    m.write(out, &w.into_inner()?)?;
    m.save(&manifest_path(out, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imported_rows_only_where_listings_exist() {
        let rows = rows(27).unwrap();
        let imported: Vec<usize> =
            rows.iter().filter(|r| r.strategy == InterleaveStrategy::ImportedSequence).map(|r| r.modes).collect();
        assert_eq!(imported, vec![9, 27]);
        let r27 = rows.iter().find(|r| r.modes == 27 && r.strategy == InterleaveStrategy::ImportedSequence).unwrap();
        assert_eq!(r27.interleave_count, 60);
        assert!(rows.iter().any(|r| r.modes == 4 && r.radix == 2));
    }
}
