use std::collections::BTreeMap;

use super::{DesignSpec, DoeError, Factor, FactorRole, RunPlan, RunSpec, SplitMix64};

/// Generates the full factorial plan for `spec`.
///
/// Runs are produced in standard order (replicate-major, first factor varying
/// slowest), labelled with blocks when a blocking factor is present, shuffled
/// with `spec.seed`, then numbered by execution position starting at 1.
pub fn full_factorial(spec: &DesignSpec) -> Result<RunPlan, DoeError> {
    spec.validate()?;
    let cells = spec.cell_count();
    let mut runs = Vec::with_capacity(cells * spec.replicates as usize);
    for replicate in 1..=spec.replicates {
        for cell in 0..cells {
            let mut combination = BTreeMap::new();
            let mut rest = cell;
            for factor in spec.factors.iter().rev() {
                let n = factor.levels.len();
                combination.insert(factor.name.clone(), factor.levels[rest % n].clone());
                rest /= n;
            }
            runs.push(RunSpec { run: 0, combination, replicate, block: None });
        }
    }
    if let Some(block) = &spec.blocking {
        runs = assign_blocks(runs, block)?;
    }
    let mut runs = randomize_order(runs, spec.seed);
    for (i, run) in runs.iter_mut().enumerate() {
        run.run = i + 1;
    }
    Ok(RunPlan { spec: spec.clone(), runs })
}

/// Shuffles `runs` with the seeded Fisher–Yates shuffle.
///
/// When runs carry block labels, each block keeps the positions it occupied
/// and only the runs inside it are permuted. Blocks are shuffled in order of
/// first appearance, drawing from one generator.
pub fn randomize_order(mut runs: Vec<RunSpec>, seed: u64) -> Vec<RunSpec> {
    let mut rng = SplitMix64::new(seed);
    if runs.iter().all(|r| r.block.is_none()) {
        rng.shuffle(&mut runs);
        return runs;
    }
    let mut groups: Vec<(Option<String>, Vec<usize>)> = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        match groups.iter_mut().find(|(label, _)| *label == run.block) {
            Some((_, positions)) => positions.push(i),
            None => groups.push((run.block.clone(), vec![i])),
        }
    }
    let mut slots: Vec<Option<RunSpec>> = runs.into_iter().map(Some).collect();
    for (_, positions) in &groups {
        let mut members: Vec<RunSpec> = positions.iter().map(|&p| slots[p].take().expect("each slot taken once")).collect();
        rng.shuffle(&mut members);
        for (&p, run) in positions.iter().zip(members) {
            slots[p] = Some(run);
        }
    }
    slots.into_iter().map(|s| s.expect("every slot refilled")).collect()
}

/// Labels each run with a block: replicate `i` goes to level `(i - 1) mod L`.
pub fn assign_blocks(mut runs: Vec<RunSpec>, blocking: &Factor) -> Result<Vec<RunSpec>, DoeError> {
    if blocking.levels.len() < 2 {
        return Err(DoeError::TooFewLevels { factor: blocking.name.clone(), count: blocking.levels.len() });
    }
    if blocking.role != FactorRole::Blocking {
        return Err(DoeError::WrongRole {
            factor: blocking.name.clone(),
            expected: FactorRole::Blocking,
            actual: blocking.role,
        });
    }
    for (i, run) in runs.iter_mut().enumerate() {
        if run.replicate == 0 {
            return Err(DoeError::MissingReplicate { run: if run.run == 0 { i + 1 } else { run.run } });
        }
        let level = &blocking.levels[(run.replicate as usize - 1) % blocking.levels.len()];
        run.block = Some(level.to_string());
    }
    Ok(runs)
}
