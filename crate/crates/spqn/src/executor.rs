//! Thread-pool restart executor.

use rayon::prelude::*;
use spqn_core::optimizer::{RestartExecutor, RestartRecord};

/// Caps the number of worker threads when set to a positive integer.
pub const THREADS_ENV: &str = "SPQN_THREADS";

/// Runs restarts on a rayon pool. Output order is the restart index order,
/// so results do not depend on scheduling.
pub struct PoolExecutor {
    pool: rayon::ThreadPool,
}

impl PoolExecutor {
    /// `None` means one thread per available core.
    pub fn new(threads: Option<usize>) -> Result<Self, String> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| format!("cannot start thread pool: {e}"))?;
        Ok(Self { pool })
    }

    /// Pool sized by [`THREADS_ENV`], defaulting to the available parallelism.
    pub fn from_env() -> Result<Self, String> {
        Self::new(threads_from_env(
            std::env::var(THREADS_ENV).ok().as_deref(),
        )?)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

fn threads_from_env(value: Option<&str>) -> Result<Option<usize>, String> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            )),
        },
    }
}

impl RestartExecutor for PoolExecutor {
    fn run(
        &self,
        count: usize,
        job: &(dyn Fn(usize) -> RestartRecord + Sync),
    ) -> Vec<RestartRecord> {
        self.pool
            .install(|| (0..count).into_par_iter().map(job).collect())
    }
}
