//! Row-parallel Galerkin assembly on a rayon pool.

use npspec_core::np_operator::{Assembler, AssemblyPlan, GalerkinConfig, NpSystem};
use npspec_core::{Result, ShapeSpec};
use rayon::prelude::*;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "NPSPEC_THREADS";

/// `--threads` if given, else `NPSPEC_THREADS`, else rayon's default.
/// Zero and unparsable values are rejected.
pub fn resolve_threads(flag: Option<usize>) -> std::result::Result<usize, String> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| format!("{THREADS_ENV}={v:?} is not a thread count"))?,
            Err(_) => rayon::current_num_threads(),
        },
    };
    if n == 0 {
        return Err("thread count must be >= 1".into());
    }
    Ok(n)
}

/// Computes the rows of an [`AssemblyPlan`] concurrently. The result is
/// identical to serial assembly since each row is summed in the same order.
pub struct ParallelAssembler {
    pool: rayon::ThreadPool,
}

impl ParallelAssembler {
    pub fn new(threads: usize) -> std::result::Result<Self, String> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Assembler for ParallelAssembler {
    fn assemble(&self, shape: &ShapeSpec, config: &GalerkinConfig) -> Result<NpSystem> {
        let plan = AssemblyPlan::new(shape, config)?;
        let rows = self.pool.install(|| {
            (0..plan.outer_len())
                .into_par_iter()
                .map(|i| plan.row(i))
                .collect::<Result<Vec<_>>>()
        })?;
        plan.finish(&rows)
    }
}

impl core::fmt::Debug for ParallelAssembler {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ParallelAssembler")
            .field("threads", &self.threads())
            .finish()
    }
}
