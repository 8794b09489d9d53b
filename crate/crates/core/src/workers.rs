use rayon::ThreadPoolBuilder;

/// Upper bound on the worker threads used by the parallel kernels.
///
/// Results never depend on this value: every parallel reduction collects
/// per-task partials and folds them in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workers(usize);

impl Workers {
    pub const ENV_VAR: &'static str = "CERTIFY_WORKERS";

    pub fn new(count: usize) -> Self {
        Workers(count.max(1))
    }

    pub fn single() -> Self {
        Workers(1)
    }

    /// Reads `CERTIFY_WORKERS`, falling back to the available parallelism.
    pub fn from_env() -> Self {
        let fallback = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        let count = std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(fallback);
        Workers::new(count)
    }

    pub fn count(self) -> usize {
        self.0
    }

    /// Runs `f` inside a dedicated pool with this many threads.
    pub fn install<T: Send>(self, f: impl FnOnce() -> T + Send) -> T {
        match ThreadPoolBuilder::new().num_threads(self.0).build() {
            Ok(pool) => pool.install(f),
            // pool creation only fails on resource exhaustion; run inline
            Err(_) => f(),
        }
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::from_env()
    }
}
