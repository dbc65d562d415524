//! Splits a stable-model search into candidate ranges run on a thread
//! pool. Results are sorted afterwards, so output does not depend on the
//! number of workers.

use modsm_core::herbrand::{sort_models, PartialInterpretation, SearchConfig, StableModelSearch};
use modsm_core::{Formula, PredicateList};
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Candidates per work item.
const CHUNK: u64 = 1 << 12;

pub fn run_search(search: &StableModelSearch, jobs: usize) -> Result<Vec<PartialInterpretation>> {
    let total = search.candidate_count();
    if jobs <= 1 || total <= CHUNK {
        return Ok(search.run_all()?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {jobs} worker threads: {e}")))?;
    let chunks: Vec<u64> = (0..total.div_ceil(CHUNK)).collect();
    let parts: Vec<Vec<PartialInterpretation>> = pool.install(|| {
        chunks
            .par_iter()
            .map(|&c| search.run(c * CHUNK..((c + 1) * CHUNK).min(total)))
            .collect::<modsm_core::Result<_>>()
    })?;
    let mut models: Vec<PartialInterpretation> = parts.into_iter().flatten().collect();
    sort_models(&mut models);
    Ok(models)
}

/// The `p`-stable models extending each interpretation in `bases`.
pub fn stable_models_over(
    f: &Formula,
    p: &PredicateList,
    bases: &[PartialInterpretation],
    config: SearchConfig,
    jobs: usize,
) -> Result<Vec<PartialInterpretation>> {
    let mut out = Vec::new();
    for b in bases {
        let search = StableModelSearch::new(f, p, b, config)?;
        out.extend(run_search(&search, jobs)?);
    }
    sort_models(&mut out);
    Ok(out)
}
