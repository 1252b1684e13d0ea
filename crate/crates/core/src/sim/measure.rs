use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::Reg;
use crate::modules::QtvCircuit;

use super::{run_branches, BranchState, ReadoutEntry, ReadoutTable, SimError};

/// Draws `shots` measurements of coordinates and `reg` from the uniform
/// branch distribution. Coordinates never drawn are absent from the table.
pub fn sample_readout(
    state: &BranchState,
    reg: Reg,
    shots: u64,
    seed: u64,
) -> Result<ReadoutTable, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for _ in 0..shots {
        *counts
            .entry(rng.random_range(0..state.branches()))
            .or_insert(0) += 1;
    }
    let mut entries: Vec<_> = counts
        .into_iter()
        .map(|(l, count)| {
            let (x, y) = state.coords(l);
            ReadoutEntry {
                x,
                y,
                value: state.value(l, reg),
                count: Some(count),
            }
        })
        .collect();
    entries.sort_by_key(|e| (e.x, e.y));
    Ok(ReadoutTable {
        shots: Some(shots),
        entries,
    })
}

pub fn measure_sampled(qc: &QtvCircuit, shots: u64, seed: u64) -> Result<ReadoutTable, SimError> {
    let state = run_branches(&qc.circuit)?;
    sample_readout(&state, qc.output(), shots, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Image;
    use crate::modules::build_qtv;

    fn qc() -> QtvCircuit {
        let patch = Image::from_fn(4, 4, 8, |x, y| (x * 30 + y * 7) as u8).unwrap();
        build_qtv(&patch, 1.0, 8).unwrap()
    }

    #[test]
    fn one_shot_one_entry() {
        let t = measure_sampled(&qc(), 1, 3).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.entries[0].count, Some(1));
        assert!(measure_sampled(&qc(), 0, 3).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let c = qc();
        assert_eq!(
            measure_sampled(&c, 50, 9).unwrap(),
            measure_sampled(&c, 50, 9).unwrap()
        );
    }

    #[test]
    fn sampled_values_match_exhaustive() {
        let c = qc();
        let full = crate::sim::run_branchwise(&c).unwrap();
        let t = measure_sampled(&c, 1600, 1).unwrap();
        let total: u64 = t.entries.iter().map(|e| e.count.unwrap()).sum();
        assert_eq!(total, 1600);
        for e in &t.entries {
            assert_eq!(full.get(e.x, e.y), Some(e.value));
        }
    }
}
